//! Log-domain Sinkhorn scaling. Approximate; never used by default.

pub(crate) fn solve(
    cost: &[f64],
    n: usize,
    m: usize,
    a: &[f64],
    b: &[f64],
    reg: f64,
    iterations: usize,
) -> Vec<f64> {
    let log_a: Vec<f64> = a.iter().map(|x| x.ln()).collect();
    let log_b: Vec<f64> = b.iter().map(|x| x.ln()).collect();
    let mut f = vec![0.0; n];
    let mut g = vec![0.0; m];
    let mut buf = vec![0.0; n.max(m)];

    for _ in 0..iterations.max(1) {
        for i in 0..n {
            for j in 0..m {
                buf[j] = (g[j] - cost[i * m + j]) / reg;
            }
            f[i] = if a[i] > 0.0 { reg * (log_a[i] - logsumexp(&buf[..m])) } else { f64::NEG_INFINITY };
        }
        for j in 0..m {
            for i in 0..n {
                buf[i] = (f[i] - cost[i * m + j]) / reg;
            }
            g[j] = if b[j] > 0.0 { reg * (log_b[j] - logsumexp(&buf[..n])) } else { f64::NEG_INFINITY };
        }
    }

    let mut flows = vec![0.0; n * m];
    for i in 0..n {
        for j in 0..m {
            let v = ((f[i] + g[j] - cost[i * m + j]) / reg).exp();
            flows[i * m + j] = if v.is_finite() { v } else { 0.0 };
        }
    }
    flows
}

fn logsumexp(v: &[f64]) -> f64 {
    let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + v.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}
