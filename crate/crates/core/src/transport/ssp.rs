//! Exact transportation solver: successive shortest augmenting paths with
//! Johnson potentials on the dense bipartite residual graph.
//!
//! Nodes are laid out as rows `0..n`, columns `n..n+m`, then a super source
//! and a super sink. Forward row→column arcs are uncapacitated; a
//! column→row residual arc exists wherever flow has been placed.

/// Remaining supply/demand at or below this is treated as exhausted.
const MASS_TOL: f64 = 1e-14;

pub(crate) fn solve(cost: &[f64], n: usize, m: usize, supply: &[f64], demand: &[f64]) -> Vec<f64> {
    let nodes = n + m + 2;
    let source = n + m;
    let sink = n + m + 1;

    let mut flow = vec![0.0f64; n * m];
    let mut rem_a = supply.to_vec();
    let mut rem_b = demand.to_vec();
    let mut pot = vec![0.0f64; nodes];

    let mut dist = vec![f64::INFINITY; nodes];
    let mut prev = vec![usize::MAX; nodes];
    let mut done = vec![false; nodes];

    loop {
        if !rem_a.iter().any(|&a| a > MASS_TOL) || !rem_b.iter().any(|&b| b > MASS_TOL) {
            break;
        }

        dist.fill(f64::INFINITY);
        prev.fill(usize::MAX);
        done.fill(false);
        dist[source] = 0.0;

        loop {
            let mut u = usize::MAX;
            let mut best = f64::INFINITY;
            for v in 0..nodes {
                if !done[v] && dist[v] < best {
                    best = dist[v];
                    u = v;
                }
            }
            if u == usize::MAX || u == sink {
                break;
            }
            done[u] = true;
            let du = dist[u];

            let relax = |v: usize, reduced: f64, dist: &mut [f64], prev: &mut [usize]| {
                let nd = du + reduced.max(0.0);
                if nd < dist[v] {
                    dist[v] = nd;
                    prev[v] = u;
                }
            };

            if u == source {
                for i in 0..n {
                    if rem_a[i] > MASS_TOL && !done[i] {
                        relax(i, pot[source] - pot[i], &mut dist, &mut prev);
                    }
                }
            } else if u < n {
                let row = &cost[u * m..(u + 1) * m];
                for (j, &c) in row.iter().enumerate() {
                    let v = n + j;
                    if !done[v] {
                        relax(v, c + pot[u] - pot[v], &mut dist, &mut prev);
                    }
                }
            } else {
                let j = u - n;
                for i in 0..n {
                    if flow[i * m + j] > 0.0 && !done[i] {
                        relax(i, -cost[i * m + j] + pot[u] - pot[i], &mut dist, &mut prev);
                    }
                }
                if rem_b[j] > MASS_TOL && !done[sink] {
                    relax(sink, pot[u] - pot[sink], &mut dist, &mut prev);
                }
            }
        }

        if !dist[sink].is_finite() {
            break;
        }

        let cap = dist[sink];
        for v in 0..nodes {
            pot[v] += dist[v].min(cap);
        }

        // Walk the path back from the sink to find the bottleneck.
        let last_col = prev[sink] - n;
        let mut delta = rem_b[last_col];
        let mut v = prev[sink];
        let first_row;
        loop {
            let p = prev[v];
            if p == source {
                first_row = v;
                delta = delta.min(rem_a[v]);
                break;
            }
            if v < n {
                // column p → row v runs along a residual (reverse) arc
                delta = delta.min(flow[v * m + (p - n)]);
            }
            v = p;
        }

        apply(&mut rem_b[last_col], delta);
        apply(&mut rem_a[first_row], delta);
        let mut v = prev[sink];
        while prev[v] != source {
            let p = prev[v];
            if v >= n {
                flow[p * m + (v - n)] += delta;
            } else {
                apply(&mut flow[v * m + (p - n)], delta);
            }
            v = p;
        }
    }
    flow
}

// Subtracts `delta`, snapping to exactly zero when it was the bottleneck.
fn apply(x: &mut f64, delta: f64) {
    if *x <= delta {
        *x = 0.0;
    } else {
        *x -= delta;
    }
}
