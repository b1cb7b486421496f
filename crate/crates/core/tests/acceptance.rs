//! Acceptance suite. Every criterion runs, prints one PASS/FAIL line, and
//! the test fails at the end if any criterion did.

use std::path::Path;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use uscore::corpusio::{EmbeddingStore, Key, ScoredPair, StoreKind, TokenizedSentence};
use uscore::eval::pearson;
use uscore::langmodel::ExternalScores;
use uscore::manifest::RunManifest;
use uscore::mining::{filter_pairs, mine_wmd, select_top_rate, FilterConfig, MiningConfig};
use uscore::remap::{fit_clp, fit_umd, ClpOptions, ProjectionMap, WordPairSet};
use uscore::scorer::{score_ensemble, score_wrd, ScoreWeights, Segment, WordStores};
use uscore::selflearn::{run_contrastive_loop, run_remap_loop, DevEval, LoopConfig, RemapKind, RunDir, Track};
use uscore::sentembed::{contrastive_loss, contrastive_loss_items, ContrastiveConfig, DenominatorMode};
use uscore::synthetic::{planted_sentence_pools, planted_word_pools, random_orthogonal, SentencePoolSpec, WordPoolSpec};
use uscore::transport::{wcd, wmd};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn gaussian_rows(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..d).map(|_| StandardNormal.sample(&mut *rng)).collect())
        .collect()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Row and column sums of a plan against uniform marginals.
fn plan_feasible(plan: &uscore::transport::TransportPlan, n: usize, m: usize) -> Result<(), String> {
    for i in 0..n {
        let s: f64 = (0..m).map(|j| plan.flow(i, j)).sum();
        check((s - 1.0 / n as f64).abs() <= 1e-9, || format!("row {i} sums to {s}"))?;
    }
    for j in 0..m {
        let s: f64 = (0..n).map(|i| plan.flow(i, j)).sum();
        check((s - 1.0 / m as f64).abs() <= 1e-9, || format!("column {j} sums to {s}"))?;
    }
    Ok(())
}

fn transport_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    let mut worst: f64 = 0.0;
    let instances = 240;
    for _ in 0..instances {
        let n = rng.gen_range(1..=6);
        let d = rng.gen_range(1..=16);
        let x = gaussian_rows(&mut rng, n, d);
        let y = gaussian_rows(&mut rng, n, d);
        let oracle = permutations(n)
            .iter()
            .map(|p| p.iter().enumerate().map(|(i, &j)| dist(&x[i], &y[j])).sum::<f64>() / n as f64)
            .fold(f64::INFINITY, f64::min);
        let (got, plan) = wmd(&x, &y, None).map_err(|e| e.to_string())?;
        worst = worst.max((got - oracle).abs());
        check((got - oracle).abs() <= 1e-9, || format!("n={n} d={d}: {got} vs oracle {oracle}"))?;
        plan_feasible(&plan, n, n)?;
    }
    let secs = start.elapsed().as_secs_f64();
    check(secs < 10.0, || format!("took {secs:.1}s"))?;
    Ok(format!("{instances} instances, max |err| {worst:.1e}, {secs:.2}s"))
}

fn wcd_lower_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut min_gap = f64::INFINITY;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=12);
        let m = rng.gen_range(1..=12);
        let d = rng.gen_range(2..=64);
        let x = gaussian_rows(&mut rng, n, d);
        let y = gaussian_rows(&mut rng, m, d);
        let lb = wcd(&x, &y, None).map_err(|e| e.to_string())?;
        let (w, plan) = wmd(&x, &y, None).map_err(|e| e.to_string())?;
        min_gap = min_gap.min(w - lb);
        check(lb <= w + 1e-9, || format!("WCD {lb} > WMD {w} (n={n}, m={m})"))?;
        plan_feasible(&plan, n, m)?;
    }
    Ok(format!("1000 instances, min WMD-WCD {min_gap:.2e}"))
}

fn marginal_feasibility() -> Outcome {
    // also asserted inside the two suites above; here on skewed shapes
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for _ in 0..300 {
        let n = rng.gen_range(1..=20);
        let m = rng.gen_range(1..=20);
        let d = rng.gen_range(1..=8);
        let (_, plan) = wmd(&gaussian_rows(&mut rng, n, d), &gaussian_rows(&mut rng, m, d), None)
            .map_err(|e| e.to_string())?;
        plan_feasible(&plan, n, m)?;
        check(plan.marginal_error() <= 1e-9, || format!("marginal error {}", plan.marginal_error()))?;
    }
    Ok("300 plans within 1e-9".into())
}

fn procrustes_and_bias_removal() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let (d, m) = (16, 1000);
    let r = random_orthogonal(&mut rng, d);
    let mut set = WordPairSet::default();
    for (k, x) in gaussian_rows(&mut rng, m, d).into_iter().enumerate() {
        let y: Vec<f64> = (&r * nalgebra::DVector::from_vec(x.clone())).iter().copied().collect();
        set.push((format!("s{k}"), format!("t{k}")), x, y).map_err(|e| e.to_string())?;
    }
    let fit = fit_clp(&set, ClpOptions::default()).map_err(|e| e.to_string())?;
    let ProjectionMap::Orthogonal { matrix } = &fit.map else {
        return Err("clp did not return an orthogonal map".into());
    };
    let err = (matrix - &r).norm();
    check(err <= 1e-6, || format!("‖W−R‖_F = {err:e}"))?;

    // shared offset along one direction on both sides
    let mut set = WordPairSet::default();
    let bias: Vec<f64> = (0..d).map(|i| if i % 3 == 0 { 2.0 } else { -0.5 }).collect();
    let mut vecs = Vec::new();
    for k in 0..200 {
        let mut x = gaussian_rows(&mut rng, 1, d).remove(0);
        let mut y = gaussian_rows(&mut rng, 1, d).remove(0);
        for i in 0..d {
            x[i] += bias[i];
            y[i] += bias[i];
        }
        vecs.push(x.clone());
        vecs.push(y.clone());
        set.push((format!("s{k}"), format!("t{k}")), x, y).map_err(|e| e.to_string())?;
    }
    let map = fit_umd(&set).map_err(|e| e.to_string())?;
    let ProjectionMap::BiasRemoval { direction } = &map else {
        return Err("umd did not return a bias direction".into());
    };
    let mut worst: f64 = 0.0;
    for v in vecs.iter().chain(&gaussian_rows(&mut rng, 50, d)) {
        let e = map.apply(v);
        let dot: f64 = e.iter().zip(direction).map(|(a, b)| a * b).sum();
        worst = worst.max(dot.abs());
    }
    check(worst <= 1e-9, || format!("max |e'·v| = {worst:e}"))?;
    Ok(format!("‖W−R‖_F {err:.1e}, max |e'·v| {worst:.1e}"))
}

fn non_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] >= w[0])
}

fn p_at_1_series(reports: &[uscore::selflearn::IterationReport]) -> Result<Vec<f64>, String> {
    reports
        .iter()
        .map(|r| r.p_at_1.ok_or_else(|| "missing P@1".to_string()))
        .collect()
}

fn fmt_series(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join(" → ")
}

fn remap_track() -> Outcome {
    let start = Instant::now();
    let p = planted_word_pools(&WordPoolSpec::default()).map_err(|e| e.to_string())?;
    let dev = DevEval {
        gold: Some(p.gold.clone()),
        judged: None,
    };
    let clp = LoopConfig {
        iterations: 1,
        remap_kind: RemapKind::Clp,
        dev: dev.clone(),
        ..Default::default()
    };
    let out = run_remap_loop(&p.source, &p.target, &p.source_store, &p.target_store, &clp, None)
        .map_err(|e| e.to_string())?;
    let c = p_at_1_series(&out.reports)?;
    check(c[0] < 0.2 && c[1] >= 0.9, || format!("CLP P@1 {}", fmt_series(&c)))?;
    let umd = LoopConfig {
        iterations: 5,
        remap_kind: RemapKind::Umd,
        dev,
        ..Default::default()
    };
    let out = run_remap_loop(&p.source, &p.target, &p.source_store, &p.target_store, &umd, None)
        .map_err(|e| e.to_string())?;
    let u = p_at_1_series(&out.reports)?;
    check(out.aborted.is_none(), || format!("UMD aborted: {:?}", out.aborted))?;
    check(non_decreasing(&u), || format!("UMD P@1 {}", fmt_series(&u)))?;
    let secs = start.elapsed().as_secs_f64();
    check(secs < 120.0, || format!("took {secs:.1}s"))?;
    Ok(format!("CLP {}; UMD {}; {secs:.1}s", fmt_series(&c), fmt_series(&u)))
}

fn finite_difference_check() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut worst: f64 = 0.0;
    let configs = 30;
    for c in 0..configs {
        let n = rng.gen_range(2..=8);
        let d = rng.gen_range(2..=8);
        let cfg = ContrastiveConfig {
            temperature: [0.05, 0.1, 0.5, 1.0][c % 4],
            denominator_mode: if c % 2 == 0 {
                DenominatorMode::ExcludePositive
            } else {
                DenominatorMode::IncludePositive
            },
            ..Default::default()
        };
        let x = gaussian_rows(&mut rng, n, d);
        let y = gaussian_rows(&mut rng, n, d);
        let p = DMatrix::<f64>::identity(d, d) + DMatrix::from_fn(d, d, |_, _| 0.3 * rng.gen::<f64>() - 0.15);
        let (_, grad) = contrastive_loss(&p, &x, &y, &cfg).map_err(|e| e.to_string())?;
        let h = 1e-5;
        let mut fd = DMatrix::zeros(d, d);
        for r in 0..d {
            for k in 0..d {
                let mut plus = p.clone();
                plus[(r, k)] += h;
                let mut minus = p.clone();
                minus[(r, k)] -= h;
                let lp = contrastive_loss(&plus, &x, &y, &cfg).map_err(|e| e.to_string())?.0;
                let lm = contrastive_loss(&minus, &x, &y, &cfg).map_err(|e| e.to_string())?.0;
                fd[(r, k)] = (lp - lm) / (2.0 * h);
            }
        }
        // per entry; entries that are zero on both sides up to 1e-8 count as equal
        let rel = grad
            .iter()
            .zip(fd.iter())
            .map(|(g, f)| (g - f).abs() / g.abs().max(f.abs()).max(1e-8))
            .fold(0.0, f64::max);
        worst = worst.max(rel);
        check(rel <= 1e-4, || format!("config {c} (n={n}, d={d}, τ={}): rel err {rel:e}", cfg.temperature))?;
    }
    Ok(format!("{configs} configs, max rel err {worst:.1e}"))
}

fn contrastive_track() -> Outcome {
    let p = planted_sentence_pools(&SentencePoolSpec::default()).map_err(|e| e.to_string())?;
    let cfg = LoopConfig {
        iterations: 6,
        mining: MiningConfig {
            extraction_rate: 0.2,
            ..Default::default()
        },
        contrastive: ContrastiveConfig {
            batch_size: 32,
            learning_rate: 0.02,
            epochs_per_iteration: 3,
            ..Default::default()
        },
        dev: DevEval {
            gold: Some(p.gold.clone()),
            judged: None,
        },
        ..Default::default()
    };
    let out = run_contrastive_loop(&p.source, &p.target, &p.source_store, &p.target_store, &cfg, None)
        .map_err(|e| e.to_string())?;
    check(out.aborted.is_none(), || format!("aborted: {:?}", out.aborted))?;
    let s = p_at_1_series(&out.reports)?;
    let last = *s.last().unwrap();
    check(non_decreasing(&s) && last >= s[0].max(0.9), || format!("P@1 {}", fmt_series(&s)))?;
    let fd = finite_difference_check()?;
    Ok(format!("P@1 {}; {fd}", fmt_series(&s)))
}

fn sentence(tokens: &[String]) -> TokenizedSentence {
    TokenizedSentence::from_tokens(tokens.to_vec())
}

fn mining_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let d = 8;
    let mut src_store = EmbeddingStore::new(StoreKind::StaticWord, d).map_err(|e| e.to_string())?;
    let mut tgt_store = EmbeddingStore::new(StoreKind::StaticWord, d).map_err(|e| e.to_string())?;
    let src_words: Vec<String> = (0..60).map(|k| format!("s{k}")).collect();
    let tgt_words: Vec<String> = (0..60).map(|k| format!("t{k}")).collect();
    for w in &src_words {
        src_store.insert(Key::Word(w.clone()), &gaussian_rows(&mut rng, 1, d)[0]).unwrap();
    }
    for w in &tgt_words {
        tgt_store.insert(Key::Word(w.clone()), &gaussian_rows(&mut rng, 1, d)[0]).unwrap();
    }
    let pool = |words: &[String], rng: &mut ChaCha8Rng| -> Vec<TokenizedSentence> {
        (0..50)
            .map(|_| {
                let len = rng.gen_range(1..=7);
                sentence(&(0..len).map(|_| words[rng.gen_range(0..words.len())].clone()).collect::<Vec<_>>())
            })
            .collect()
    };
    let src = pool(&src_words, &mut rng);
    let tgt = pool(&tgt_words, &mut rng);
    let cfg = MiningConfig {
        k_prefetch: 50,
        extraction_rate: 1.0,
        ..Default::default()
    };
    let mined = mine_wmd(&src, &tgt, &src_store, &tgt_store, &cfg).map_err(|e| e.to_string())?;
    // exhaustive search
    let mut expect = Vec::new();
    for (i, s) in src.iter().enumerate() {
        let xs = src_store.sentence_vectors(i, s).unwrap();
        let mut best = (usize::MAX, f64::INFINITY);
        for (j, t) in tgt.iter().enumerate() {
            let ys = tgt_store.sentence_vectors(j, t).unwrap();
            let w = wmd(&xs, &ys, None).unwrap().0;
            if w < best.1 {
                best = (j, w);
            }
        }
        expect.push((i, best.0, -best.1 + 0.0));
    }
    let mut got: Vec<(usize, usize, f64)> = mined.iter().map(|p| (p.source_index, p.target_index, p.score)).collect();
    got.sort_by_key(|g| g.0);
    check(got.len() == 50, || format!("{} pairs mined", got.len()))?;
    for (g, e) in got.iter().zip(&expect) {
        check(g.0 == e.0 && g.1 == e.1 && g.2.to_bits() == e.2.to_bits(), || {
            format!("source {}: mined {:?}, exhaustive {:?}", e.0, g, e)
        })?;
    }

    let empty = TokenizedSentence::from_tokens(vec!["w".into()]);
    let many: Vec<ScoredPair> = (0..40000)
        .map(|i| ScoredPair {
            source_index: i,
            target_index: i,
            source: empty.clone(),
            target: empty.clone(),
            score: -(((i * 7919) % 40000) as f64),
        })
        .collect();
    let top = select_top_rate(&many, 0.05).map_err(|e| e.to_string())?;
    check(top.len() == 2000, || format!("kept {}", top.len()))?;
    check(top.iter().all(|p| p.score > -2000.0), || "did not keep the best scores".into())?;
    Ok("50×50 exhaustive match; 40000 × 0.05 = 2000".into())
}

fn words(n: usize, prefix: &str) -> TokenizedSentence {
    let toks: Vec<String> = (0..n).map(|i| format!("{prefix}{i}")).collect();
    TokenizedSentence::new(&toks.join(" "), Default::default())
}

fn text(s: &str) -> TokenizedSentence {
    TokenizedSentence::new(s, Default::default())
}

fn pair(s: TokenizedSentence, t: TokenizedSentence, i: usize) -> ScoredPair {
    ScoredPair {
        source_index: i,
        target_index: i,
        source: s,
        target: t,
        score: -(i as f64),
    }
}

fn filters() -> Outcome {
    let cfg = FilterConfig::default();
    let same = words(6, "haus");
    let fixtures = vec![
        pair(words(2, "a"), words(5, "x"), 0),
        pair(words(31, "a"), words(5, "x"), 1),
        pair(same.clone(), same, 2),
        pair(text("the old man sold his boat"), text("der alte Mann verkaufte sein Boot"), 3),
        pair(words(30, "b"), words(3, "y"), 4),
    ];
    let (kept, report) = filter_pairs(&fixtures, &cfg).map_err(|e| e.to_string())?;
    let ids: Vec<usize> = kept.iter().map(|p| p.source_index).collect();
    check(ids == [3, 4], || format!("kept {ids:?}"))?;
    check(report.too_short == 1 && report.too_long == 1 && report.overlap == 1, || {
        format!("{report:?}")
    })?;
    let (again, _) = filter_pairs(&kept, &cfg).map_err(|e| e.to_string())?;
    check(again == kept, || "filtering is not idempotent".into())?;

    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let random: Vec<ScoredPair> = (0..300)
        .map(|i| pair(words(rng.gen_range(1..40), "p"), words(rng.gen_range(1..40), if i % 4 == 0 { "p" } else { "q" }), i))
        .collect();
    let (once, _) = filter_pairs(&random, &cfg).map_err(|e| e.to_string())?;
    let (twice, _) = filter_pairs(&once, &cfg).map_err(|e| e.to_string())?;
    check(once == twice, || "filtering is not idempotent on random pairs".into())?;
    Ok(format!("fixtures behave; idempotent on {} random pairs", random.len()))
}

fn exclude_positive_hand_case() -> Outcome {
    let x = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
    let y = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
    let cfg = ContrastiveConfig {
        temperature: 0.05,
        denominator_mode: DenominatorMode::ExcludePositive,
        ..Default::default()
    };
    let (_, items, _) = contrastive_loss_items(&DMatrix::identity(2, 2), &x, &y, &cfg).map_err(|e| e.to_string())?;
    check(items[0] == -20.0, || format!("L1 = {}", items[0]))?;
    Ok(format!("L1 = {}", items[0]))
}

fn ranks(v: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]).then(a.cmp(&b)));
    idx
}

fn scorer_algebra() -> Outcome {
    let expect = [
        ("tuned", [0.5, 0.1, 0.4, 0.6, 0.4]),
        ("plus", [0.45, 0.1, 0.45, 0.5, 0.5]),
        ("plusplus", [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.5, 0.5]),
    ];
    for (name, w) in expect {
        let p = ScoreWeights::preset(name).map_err(|e| e.to_string())?;
        check([p.w_xlng, p.w_lm, p.w_pseudo, p.w_wrd, p.w_snt] == w, || format!("{name}: {p}"))?;
    }

    // w_pseudo = 0: the pseudo reference has no influence
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let d = 6;
    let mut src = EmbeddingStore::new(StoreKind::StaticWord, d).unwrap();
    let mut tgt = EmbeddingStore::new(StoreKind::StaticWord, d).unwrap();
    let sw: Vec<String> = (0..20).map(|k| format!("s{k}")).collect();
    let tw: Vec<String> = (0..20).map(|k| format!("t{k}")).collect();
    for (a, b) in sw.iter().zip(&tw) {
        src.insert(Key::Word(a.clone()), &gaussian_rows(&mut rng, 1, d)[0]).unwrap();
        tgt.insert(Key::Word(b.clone()), &gaussian_rows(&mut rng, 1, d)[0]).unwrap();
    }
    let lm = ExternalScores((0..10).map(|i| (i, -1.0 - i as f64 / 10.0)).collect());
    let weights = ScoreWeights::word_only(0.8, 0.2, 0.0);
    for i in 0..10 {
        let pick = |ws: &[String], rng: &mut ChaCha8Rng| {
            sentence(&(0..rng.gen_range(2..6)).map(|_| ws[rng.gen_range(0..ws.len())].clone()).collect::<Vec<_>>())
        };
        let (x, y, r) = (pick(&sw, &mut rng), pick(&tw, &mut rng), pick(&tw, &mut rng));
        let stores = WordStores::plain(&src, &tgt);
        let with = Segment {
            index: i,
            source: &x,
            hypothesis: &y,
            pseudo_reference: Some(&r),
        };
        let without = Segment {
            pseudo_reference: None,
            ..with
        };
        let a = score_wrd(&with, &stores, Some(&lm), &weights).map_err(|e| e.to_string())?;
        let b = score_wrd(&without, &stores, Some(&lm), &weights).map_err(|e| e.to_string())?;
        let xs = src.sentence_vectors(i, &x).unwrap();
        let ys = tgt.sentence_vectors(i, &y).unwrap();
        let eq2 = 0.8 * -wmd(&xs, &ys, None).unwrap().0 + 0.2 * lm.0[&i];
        check(a == b && (a - eq2).abs() <= 1e-12, || format!("segment {i}: {a} / {b} / {eq2}"))?;
    }

    let word = gaussian_rows(&mut rng, 1, 40).remove(0);
    let sent = gaussian_rows(&mut rng, 1, 40).remove(0);
    for (w_wrd, reference) in [(1.0, &word), (0.0, &sent)] {
        let mut w = ScoreWeights::preset("tuned").unwrap();
        w.w_wrd = w_wrd;
        w.w_snt = 1.0 - w_wrd;
        let e = score_ensemble(&word, &sent, &w).map_err(|e| e.to_string())?;
        check(ranks(&e) == ranks(reference), || format!("w_wrd={w_wrd}: ranking differs"))?;
    }

    let r = pearson(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).map_err(|e| e.to_string())?.r;
    check((r - 0.5).abs() <= 1e-12, || format!("pearson fixture {r}"))?;
    Ok("presets, reduction, degenerate ensembles, Pearson 0.5".into())
}

fn read_tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    out.sort();
    out
}

fn selflearn_run(threads: usize, track: Track, root: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    pool.install(|| {
        let dir = root.join(format!("{track:?}-{threads}"));
        let result = match track {
            Track::Remap => {
                let p = planted_word_pools(&WordPoolSpec {
                    sentences: 300,
                    seed: 11,
                    ..Default::default()
                })
                .unwrap();
                let cfg = LoopConfig {
                    iterations: 2,
                    mining: MiningConfig {
                        extraction_rate: 0.1,
                        ..Default::default()
                    },
                    dev: DevEval {
                        gold: Some(p.gold.clone()),
                        judged: None,
                    },
                    ..Default::default()
                };
                let m = RunManifest::new(vec!["selflearn".into()], cfg.describe(track), Some(11));
                let rd = RunDir::create(&dir, m).map_err(|e| e.to_string())?;
                run_remap_loop(&p.source, &p.target, &p.source_store, &p.target_store, &cfg, Some(rd)).map(|_| ())
            }
            Track::Contrastive => {
                let p = planted_sentence_pools(&SentencePoolSpec {
                    sentences: 300,
                    seed: 11,
                    ..Default::default()
                })
                .unwrap();
                let cfg = LoopConfig {
                    iterations: 2,
                    mining: MiningConfig {
                        extraction_rate: 0.3,
                        ..Default::default()
                    },
                    contrastive: ContrastiveConfig {
                        batch_size: 16,
                        learning_rate: 0.01,
                        seed: 11,
                        ..Default::default()
                    },
                    dev: DevEval {
                        gold: Some(p.gold.clone()),
                        judged: None,
                    },
                    ..Default::default()
                };
                let m = RunManifest::new(vec!["selflearn".into()], cfg.describe(track), Some(11));
                let rd = RunDir::create(&dir, m).map_err(|e| e.to_string())?;
                run_contrastive_loop(&p.source, &p.target, &p.source_store, &p.target_store, &cfg, Some(rd)).map(|_| ())
            }
        };
        result.map_err(|e| e.to_string())?;
        Ok(read_tree(&dir))
    })
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files = 0;
    for track in [Track::Remap, Track::Contrastive] {
        let one = selflearn_run(1, track, &tmp.path().join("a"))?;
        let again = selflearn_run(1, track, &tmp.path().join("b"))?;
        let four = selflearn_run(4, track, &tmp.path().join("c"))?;
        check(one.iter().any(|(n, _)| n == "manifest.json"), || "no manifest".into())?;
        check(one.iter().any(|(n, _)| n == "reports.tsv"), || "no reports".into())?;
        check(one == again, || format!("{track:?}: repeated run differs"))?;
        check(one == four, || format!("{track:?}: 1 vs 4 workers differ"))?;
        files += one.len();
    }
    Ok(format!("{files} artifacts byte-identical across repeats and 1/4 workers"))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("transport oracle", transport_oracle),
        ("WCD lower bound", wcd_lower_bound),
        ("marginal feasibility", marginal_feasibility),
        ("Procrustes recovery and bias removal", procrustes_and_bias_removal),
        ("self-learning, remap track", remap_track),
        ("self-learning, contrastive track", contrastive_track),
        ("mining soundness", mining_soundness),
        ("filters", filters),
        ("exclude-positive hand case", exclude_positive_hand_case),
        ("scorer algebra", scorer_algebra),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    println!();
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                println!("FAIL  {name}: {why}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
