use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{Context as _, Result};
use serde::Serialize;

use uscore::corpusio::{
    format_scored_pairs, load_corpus, load_embedding_store, load_eval_dataset, read_scored_pairs, EmbeddingStore,
    TokenizedSentence, Tokenizer,
};
use uscore::error::Error;
use uscore::eval::{compare_metrics, format_report, pearson, CompareConfig, ReportRow};
use uscore::langmodel::{load_external_scores, train_ngram, ExternalScores, FluencyModel, NGramConfig, NGramModel};
use uscore::manifest::{write_atomic, RunManifest};
use uscore::mining::{
    dedup_pairs, filter_corpus, filter_pairs, mine_margin, mine_wmd, select_top_rate, ExternalLabels, FilterConfig,
    FilterReport, LanguagePredicate, MiningConfig, MiningStrategy, PoolSide, TrigramLanguageId,
};
use uscore::remap::{apply_remap, extract_word_pairs, fit_clp, fit_umd, ClpOptions, ProjectionMap, Side};
use uscore::scorer::{
    format_scores, score_ensemble, score_snt_batch, score_wrd_batch, ScoreWeights, Segment, WordStores,
};
use uscore::selflearn::{
    format_reports, run_contrastive_loop, run_remap_loop, DevEval, JudgedSet, LoopConfig, RemapKind, RunDir, Track,
};
use uscore::sentembed::{sentence_embeddings, ContrastiveConfig, SentenceProjection};
use uscore::synthetic::{planted_sentence_pools, planted_word_pools, SentencePoolSpec, WordPoolSpec};

use crate::args::*;
use crate::UsageError;

pub struct Context {
    /// Command line as recorded in manifests.
    pub argv: Vec<String>,
    pub config_file: Option<String>,
}

/// Manifest bookkeeping for one invocation.
struct Run {
    manifest: RunManifest,
    path: Option<PathBuf>,
}

fn flatten_config<A: Serialize>(args: &A) -> BTreeMap<String, String> {
    let value = serde_json::to_value(args).expect("arguments serialize");
    let mut out = BTreeMap::new();
    if let serde_json::Value::Object(map) = value {
        for (k, v) in map {
            let s = match v {
                serde_json::Value::String(s) => s,
                serde_json::Value::Null => String::new(),
                other => other.to_string(),
            };
            out.insert(k, s);
        }
    }
    out
}

impl Run {
    fn start<A: Serialize>(
        ctx: &Context,
        args: &A,
        common: &Common,
        seed: Option<u64>,
        default_path: Option<PathBuf>,
    ) -> Result<Self> {
        let mut manifest = RunManifest::new(ctx.argv.clone(), flatten_config(args), seed);
        if let Some(c) = &ctx.config_file {
            manifest.add_input(c)?;
        }
        Ok(Self {
            manifest,
            path: common.manifest.clone().or(default_path),
        })
    }

    fn input(&mut self, path: &Path) -> Result<()> {
        self.manifest.add_input(path)?;
        Ok(())
    }

    fn inputs<'a>(&mut self, paths: impl IntoIterator<Item = &'a PathBuf>) -> Result<()> {
        for p in paths {
            self.input(p)?;
        }
        Ok(())
    }

    fn output(&mut self, path: &Path, bytes: &[u8]) -> Result<()> {
        write_atomic(path, bytes)?;
        self.manifest.add_output(path, None)?;
        Ok(())
    }

    fn finish(self) -> Result<()> {
        if let Some(p) = &self.path {
            self.manifest.write(p)?;
        }
        Ok(())
    }
}

fn manifest_beside(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn corpus(path: &Path, tok: TokenizerArg) -> Result<Vec<TokenizedSentence>> {
    Ok(load_corpus(path, Tokenizer::from(tok))?)
}

fn store(path: &Path) -> Result<EmbeddingStore> {
    Ok(load_embedding_store(path)?)
}

fn same_length(what: &str, a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Format(format!("{what}: {a} vs {b} lines")).into());
    }
    Ok(())
}

fn load_maps(paths: &[PathBuf]) -> Result<Vec<ProjectionMap>> {
    paths
        .iter()
        .map(|p| ProjectionMap::from_store(&store(p)?).with_context(|| format!("reading {}", p.display())))
        .collect()
}

/// Applies maps in order; orthogonal maps leave target-side stores alone.
fn apply_maps(store: &EmbeddingStore, maps: &[ProjectionMap], side: Side) -> Result<EmbeddingStore> {
    let mut out = store.clone();
    for m in maps {
        out = apply_remap(&out, m, side)?;
    }
    Ok(out)
}

fn load_projection(path: Option<&PathBuf>, dim: usize) -> Result<SentenceProjection> {
    Ok(match path {
        Some(p) => SentenceProjection::from_store(&store(p)?)?,
        None => SentenceProjection::identity(dim)?,
    })
}

pub fn score(a: &ScoreArgs, ctx: &Context) -> Result<()> {
    let mut run = Run::start(ctx, a, &a.common, None, Some(manifest_beside(&a.out)))?;
    run.inputs([&a.src, &a.hyp, &a.src_emb, &a.hyp_emb])?;
    run.inputs(a.pseudo_ref.iter().chain(&a.pseudo_emb).chain(&a.map).chain(&a.lm).chain(&a.lm_scores))?;
    run.inputs(a.projection.iter().chain(&a.src_sent_emb).chain(&a.hyp_sent_emb))?;

    let mut weights = ScoreWeights::preset(&a.preset)?;
    let overrides = [
        (&mut weights.w_xlng, a.w_xlng),
        (&mut weights.w_lm, a.w_lm),
        (&mut weights.w_pseudo, a.w_pseudo),
        (&mut weights.w_wrd, a.w_wrd),
        (&mut weights.w_snt, a.w_snt),
    ];
    let mut custom = false;
    for (slot, v) in overrides {
        if let Some(v) = v {
            *slot = v;
            custom = true;
        }
    }
    if custom {
        weights.name = format!("{}+custom", a.preset);
    }
    weights.normalize_components = !a.raw_components;
    weights.remap_iterations = a.map.len();
    weights.validate()?;

    let src = corpus(&a.src, a.tokenizer)?;
    let hyp = corpus(&a.hyp, a.tokenizer)?;
    same_length("sources and hypotheses differ in length", src.len(), hyp.len())?;
    let pseudo = match &a.pseudo_ref {
        Some(p) => {
            let r = corpus(p, a.tokenizer)?;
            same_length("pseudo references and hypotheses differ in length", r.len(), hyp.len())?;
            Some(r)
        }
        None => None,
    };
    let segments: Vec<Segment<'_>> = src
        .iter()
        .zip(&hyp)
        .enumerate()
        .map(|(i, (s, h))| Segment {
            index: i,
            source: s,
            hypothesis: h,
            pseudo_reference: pseudo.as_ref().map(|p| &p[i]),
        })
        .collect();

    let src_store = store(&a.src_emb)?;
    let hyp_store = store(&a.hyp_emb)?;
    let word = if weights.w_wrd != 0.0 {
        let maps = load_maps(&a.map)?;
        let src_mapped = apply_maps(&src_store, &maps, Side::Source)?;
        let hyp_mapped = apply_maps(&hyp_store, &maps, Side::Target)?;
        let pseudo_store = a.pseudo_emb.as_deref().map(store).transpose()?;
        let stores = WordStores {
            source: &src_mapped,
            hypothesis: &hyp_mapped,
            hypothesis_raw: &hyp_store,
            pseudo_reference: pseudo_store.as_ref(),
        };
        let lm: Option<Box<dyn FluencyModel>> = match (&a.lm, &a.lm_scores) {
            (Some(p), _) => Some(Box::new(NGramModel::load(p)?)),
            (None, Some(p)) => Some(Box::new(ExternalScores(load_external_scores(p)?))),
            (None, None) => None,
        };
        score_wrd_batch(&segments, &stores, lm.as_deref(), &weights)?
    } else {
        vec![0.0; segments.len()]
    };
    let sentence = if weights.w_snt != 0.0 {
        let ss = a.src_sent_emb.as_deref().map(store).transpose()?;
        let hs = a.hyp_sent_emb.as_deref().map(store).transpose()?;
        let ss = ss.as_ref().unwrap_or(&src_store);
        let hs = hs.as_ref().unwrap_or(&hyp_store);
        let projection = load_projection(a.projection.as_ref(), ss.dim())?;
        score_snt_batch(&segments, &projection, ss, hs)?
    } else {
        vec![0.0; segments.len()]
    };
    let scores = score_ensemble(&word, &sentence, &weights)?;
    run.output(&a.out, format_scores(&scores, &weights).as_bytes())?;
    run.finish()
}

fn mining_config(strategy: MiningStrategy, k: usize, k_margin: usize, rate: f64, dedup: bool) -> MiningConfig {
    MiningConfig {
        strategy,
        k_prefetch: k,
        k_margin,
        extraction_rate: rate,
        dedup,
    }
}

pub fn mine(a: &MineArgs, ctx: &Context) -> Result<()> {
    let mut run = Run::start(ctx, a, &a.common, None, Some(manifest_beside(&a.out)))?;
    run.inputs([&a.src, &a.tgt, &a.src_emb, &a.tgt_emb])?;
    run.inputs(a.map.iter().chain(&a.projection))?;
    let strategy: MiningStrategy = a.strategy.parse()?;
    let cfg = mining_config(strategy, a.k, a.k_margin, a.rate, a.dedup);
    let src = corpus(&a.src, a.tokenizer)?;
    let tgt = corpus(&a.tgt, a.tokenizer)?;
    let src_store = store(&a.src_emb)?;
    let tgt_store = store(&a.tgt_emb)?;
    let mined = match strategy {
        MiningStrategy::WmdPrefetch => {
            if a.projection.is_some() {
                return Err(UsageError("--projection applies to ratio-margin mining only".into()).into());
            }
            let maps = load_maps(&a.map)?;
            let s = apply_maps(&src_store, &maps, Side::Source)?;
            let t = apply_maps(&tgt_store, &maps, Side::Target)?;
            mine_wmd(&src, &tgt, &s, &t, &cfg)?
        }
        MiningStrategy::RatioMargin => {
            if !a.map.is_empty() {
                return Err(UsageError("--map applies to wmd-prefetch mining only".into()).into());
            }
            let xs = sentence_embeddings(&src, &src_store)?;
            let ys = sentence_embeddings(&tgt, &tgt_store)?;
            let p = load_projection(a.projection.as_ref(), src_store.dim())?;
            mine_margin(&src, &tgt, &p.project_all(&xs)?, &p.project_all(&ys)?, &cfg)?
        }
    };
    let mut kept = select_top_rate(&mined, cfg.extraction_rate)?;
    if cfg.dedup {
        kept = dedup_pairs(&kept);
    }
    log::info!("kept {} of {} mined pairs", kept.len(), mined.len());
    run.output(&a.out, format_scored_pairs(&kept).as_bytes())?;
    run.finish()
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn language_predicate(
    a: &FilterArgs,
    run: &mut Run,
    sources: &[TokenizedSentence],
    targets: &[TokenizedSentence],
) -> Result<Option<Arc<dyn LanguagePredicate>>> {
    match a.langid {
        LangIdArg::None => Ok(None),
        LangIdArg::Trigram => {
            let sample = |p: &Option<PathBuf>, fallback: &[TokenizedSentence], run: &mut Run| -> Result<Vec<TokenizedSentence>> {
                match p {
                    Some(p) => {
                        run.input(p)?;
                        corpus(p, a.tokenizer)
                    }
                    None if !fallback.is_empty() => Ok(fallback.to_vec()),
                    None => Err(UsageError("trigram filtering of a corpus needs --src-pool and --tgt-pool".into()).into()),
                }
            };
            let s = sample(&a.src_pool, sources, run)?;
            let t = sample(&a.tgt_pool, targets, run)?;
            Ok(Some(Arc::new(TrigramLanguageId::train(&s, &t))))
        }
        LangIdArg::Labels => {
            let (Some(sl), Some(tl)) = (&a.src_lang, &a.tgt_lang) else {
                return Err(UsageError("label filtering needs --src-lang and --tgt-lang".into()).into());
            };
            let mut labels = ExternalLabels::new(sl, tl);
            for (side, file, pool) in [
                (PoolSide::Source, &a.src_labels, sources),
                (PoolSide::Target, &a.tgt_labels, targets),
            ] {
                if pool.is_empty() {
                    continue;
                }
                let Some(file) = file else {
                    return Err(UsageError(format!(
                        "label filtering needs --{}-labels",
                        if side == PoolSide::Source { "src" } else { "tgt" }
                    ))
                    .into());
                };
                run.input(file)?;
                labels.attach(side, pool, &read_text(file)?)?;
            }
            Ok(Some(Arc::new(labels)))
        }
    }
}

fn report_line(r: &FilterReport) -> String {
    format!(
        "kept {} of {} (too short {}, too long {}, overlap {}, language {})",
        r.kept, r.input, r.too_short, r.too_long, r.overlap, r.language
    )
}

pub fn filter(a: &FilterArgs, ctx: &Context) -> Result<()> {
    let mut run = Run::start(ctx, a, &a.common, None, Some(manifest_beside(&a.out)))?;
    let mut cfg = FilterConfig {
        min_tokens: a.min_tokens,
        max_tokens: a.max_tokens,
        max_overlap: a.max_overlap,
        language: None,
    };
    let (bytes, report) = if let Some(p) = &a.pairs {
        run.input(p)?;
        let pairs = read_scored_pairs(p, a.tokenizer.into())?;
        let sources: Vec<_> = pairs.iter().map(|p| p.source.clone()).collect();
        let targets: Vec<_> = pairs.iter().map(|p| p.target.clone()).collect();
        cfg.language = language_predicate(a, &mut run, &sources, &targets)?;
        let (kept, report) = filter_pairs(&pairs, &cfg)?;
        (format_scored_pairs(&kept).into_bytes(), report)
    } else {
        let p = a.corpus.as_ref().expect("clap requires --pairs or --corpus");
        run.input(p)?;
        let sents = corpus(p, a.tokenizer)?;
        let side = match a.side {
            SideArg::Source => PoolSide::Source,
            SideArg::Target => PoolSide::Target,
        };
        let (s, t) = match side {
            PoolSide::Source => (&sents[..], &[][..]),
            PoolSide::Target => (&[][..], &sents[..]),
        };
        cfg.language = language_predicate(a, &mut run, s, t)?;
        let (kept, report) = filter_corpus(&sents, side, &cfg)?;
        let mut text = String::new();
        for s in &kept {
            text.push_str(&s.text);
            text.push('\n');
        }
        (text.into_bytes(), report)
    };
    eprintln!("{}", report_line(&report));
    run.output(&a.out, &bytes)?;
    run.finish()
}

pub fn remap(a: &RemapArgs, ctx: &Context) -> Result<()> {
    let mut run = Run::start(ctx, a, &a.common, None, Some(manifest_beside(&a.out)))?;
    run.inputs([&a.pairs, &a.src_emb, &a.tgt_emb])?;
    let pairs = read_scored_pairs(&a.pairs, a.tokenizer.into())?;
    let src_store = store(&a.src_emb)?;
    let tgt_store = store(&a.tgt_emb)?;
    let words = extract_word_pairs(&pairs, &src_store, &tgt_store, a.min_flow)?;
    if words.is_empty() {
        return Err(Error::Degenerate("no word pairs could be aligned".into()).into());
    }
    let kind: RemapKind = a.kind.parse()?;
    let (map, side) = match kind {
        RemapKind::Clp => {
            let fit = fit_clp(
                &words,
                ClpOptions {
                    center: a.center,
                    normalize: a.normalize,
                },
            )?;
            if fit.degenerate {
                log::warn!("the word pairs do not determine the rotation uniquely");
            }
            (fit.map, Side::Source)
        }
        RemapKind::Umd => (fit_umd(&words)?, Side::Both),
    };
    log::info!("fitted on {} word pairs", words.len());
    run.output(&a.out, &map.to_store()?.to_binary_bytes())?;
    if let Some(p) = &a.out_src_emb {
        run.output(p, &apply_remap(&src_store, &map, side)?.to_binary_bytes())?;
    }
    if let Some(p) = &a.out_tgt_emb {
        let t_side = if side == Side::Both { Side::Both } else { Side::Target };
        run.output(p, &apply_remap(&tgt_store, &map, t_side)?.to_binary_bytes())?;
    }
    if let Some(p) = &a.word_pairs {
        run.output(p, words.to_tsv().as_bytes())?;
    }
    run.finish()
}

fn contrastive_config(
    temperature: f64,
    batch_size: usize,
    lr: f64,
    epochs: usize,
    denominator: &str,
    weight_decay: f64,
    seed: u64,
) -> Result<ContrastiveConfig> {
    let cfg = ContrastiveConfig {
        temperature,
        batch_size,
        learning_rate: lr,
        epochs_per_iteration: epochs,
        denominator_mode: denominator.parse()?,
        weight_decay,
        seed,
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn train_sent(a: &TrainSentArgs, ctx: &Context) -> Result<()> {
    let mut run = Run::start(ctx, a, &a.common, Some(a.seed), Some(manifest_beside(&a.out)))?;
    run.inputs([&a.pairs, &a.src_emb, &a.tgt_emb])?;
    run.inputs(&a.init)?;
    let cfg = contrastive_config(
        a.temperature,
        a.batch_size,
        a.lr,
        a.epochs,
        &a.denominator,
        a.weight_decay,
        a.seed,
    )?;
    let pairs = read_scored_pairs(&a.pairs, a.tokenizer.into())?;
    let sources: Vec<_> = pairs.iter().map(|p| p.source.clone()).collect();
    let targets: Vec<_> = pairs.iter().map(|p| p.target.clone()).collect();
    let src_store = store(&a.src_emb)?;
    let tgt_store = store(&a.tgt_emb)?;
    let xs = sentence_embeddings(&sources, &src_store)?;
    let ys = sentence_embeddings(&targets, &tgt_store)?;
    let start = load_projection(a.init.as_ref(), src_store.dim())?;
    let trained = uscore::sentembed::train_projection(&pairs, &xs, &ys, &start, &cfg)?;
    run.output(&a.out, &trained.to_store()?.to_binary_bytes())?;
    if let Some(p) = &a.loss_log {
        run.output(p, trained.loss_log_tsv().as_bytes())?;
    }
    run.finish()
}

pub fn train_lm(a: &TrainLmArgs, ctx: &Context) -> Result<()> {
    let mut run = Run::start(ctx, a, &a.common, None, Some(manifest_beside(&a.out)))?;
    run.input(&a.corpus)?;
    run.inputs(&a.vocab)?;
    let vocabulary = match &a.vocab {
        Some(p) => Some(
            read_text(p)?
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(str::to_owned)
                .collect(),
        ),
        None => None,
    };
    let cfg = NGramConfig {
        order: a.order,
        smoothing: a.smoothing.parse()?,
        vocabulary,
    };
    let model = train_ngram(&corpus(&a.corpus, a.tokenizer)?, &cfg)?;
    run.output(&a.out, &model.to_bytes())?;
    run.finish()
}

fn parse_gold(text: &str, n: usize) -> Result<Vec<usize>> {
    let gold = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(row, l)| {
            l.trim().parse::<usize>().map_err(|_| Error::Parse {
                row: row + 1,
                message: format!("bad target index {l:?}"),
            })
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    same_length("gold alignment and source pool differ in length", gold.len(), n)?;
    Ok(gold)
}

pub fn selflearn(a: &SelflearnArgs, ctx: &Context) -> Result<()> {
    let track: Track = a.track.parse()?;
    let mut manifest = RunManifest::new(ctx.argv.clone(), flatten_config(a), Some(a.seed));
    for p in ctx.config_file.iter().map(PathBuf::from).chain([&a.src, &a.tgt, &a.src_emb, &a.tgt_emb].into_iter().cloned()) {
        manifest.add_input(&p)?;
    }
    for p in a.gold.iter().chain(&a.dev) {
        manifest.add_input(p)?;
    }
    let src = corpus(&a.src, a.tokenizer)?;
    let tgt = corpus(&a.tgt, a.tokenizer)?;
    let src_store = store(&a.src_emb)?;
    let tgt_store = store(&a.tgt_emb)?;
    let gold = match &a.gold {
        Some(p) => Some(parse_gold(&read_text(p)?, src.len())?),
        None => None,
    };
    let judged = match &a.dev {
        Some(p) => {
            let tok = Tokenizer::from(a.tokenizer);
            let records = load_eval_dataset(p)?;
            Some(JudgedSet {
                sources: records.iter().map(|r| TokenizedSentence::new(&r.source, tok)).collect(),
                hypotheses: records.iter().map(|r| TokenizedSentence::new(&r.hypothesis, tok)).collect(),
                human: records.iter().map(|r| r.human_score).collect(),
            })
        }
        None => None,
    };
    let strategy = match track {
        Track::Remap => MiningStrategy::WmdPrefetch,
        Track::Contrastive => MiningStrategy::RatioMargin,
    };
    let config = LoopConfig {
        iterations: a.iterations as usize,
        remap_kind: a.kind.parse()?,
        mining: mining_config(strategy, a.k, a.k_margin, a.rate, a.dedup),
        filter: FilterConfig {
            min_tokens: a.min_tokens,
            max_tokens: a.max_tokens,
            max_overlap: a.max_overlap,
            language: None,
        },
        contrastive: contrastive_config(
            a.temperature,
            a.batch_size,
            a.lr,
            a.epochs,
            &a.denominator,
            a.weight_decay,
            a.seed,
        )?,
        clp: ClpOptions {
            center: a.center,
            normalize: a.normalize,
        },
        min_flow: a.min_flow,
        dev: DevEval { gold, judged },
    };
    let dir = RunDir::create(&a.run_dir, manifest)?;
    let (reports, aborted) = match track {
        Track::Remap => {
            let out = run_remap_loop(&src, &tgt, &src_store, &tgt_store, &config, Some(dir))?;
            (out.reports, out.aborted)
        }
        Track::Contrastive => {
            let out = run_contrastive_loop(&src, &tgt, &src_store, &tgt_store, &config, Some(dir))?;
            (out.reports, out.aborted)
        }
    };
    print!("{}", format_reports(&reports));
    if let Some(reason) = aborted {
        return Err(Error::Aborted {
            completed: reports.len() - 1,
            reason,
        }
        .into());
    }
    Ok(())
}

fn read_scores(path: &Path) -> Result<Vec<f64>> {
    Ok(uscore::scorer::parse_scores(&read_text(path)?)?)
}

fn emit(run: &mut Run, out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => run.output(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn eval(a: &EvalArgs, ctx: &Context) -> Result<()> {
    let mut run = Run::start(ctx, a, &a.common, None, a.out.as_deref().map(manifest_beside))?;
    run.inputs([&a.scores, &a.dataset])?;
    let scores = read_scores(&a.scores)?;
    let records = load_eval_dataset(&a.dataset)?;
    same_length("scores and judged segments differ in length", scores.len(), records.len())?;
    let human: Vec<f64> = records.iter().map(|r| r.human_score).collect();
    let c = pearson(&scores, &human)?;
    eprintln!(
        "n={} r={:.6} 95% CI [{:.6}, {:.6}]",
        c.n, c.r, c.fisher_ci_low, c.fisher_ci_high
    );
    let report = format_report(&[ReportRow {
        metric: a.metric.clone(),
        language_pair: a.langpair.clone(),
        r: c.r,
    }]);
    emit(&mut run, a.out.as_ref(), &report)?;
    run.finish()
}

pub fn compare(a: &CompareArgs, ctx: &Context) -> Result<()> {
    let mut run = Run::start(ctx, a, &a.common, Some(a.seed), a.out.as_deref().map(manifest_beside))?;
    run.inputs([&a.scores_a, &a.scores_b, &a.dataset])?;
    let sa = read_scores(&a.scores_a)?;
    let sb = read_scores(&a.scores_b)?;
    let records = load_eval_dataset(&a.dataset)?;
    same_length("first scores and judged segments differ in length", sa.len(), records.len())?;
    same_length("second scores and judged segments differ in length", sb.len(), records.len())?;
    let human: Vec<f64> = records.iter().map(|r| r.human_score).collect();
    let cmp = compare_metrics(
        &sa,
        &sb,
        &human,
        &CompareConfig {
            resamples: a.resamples,
            seed: a.seed,
            t_test: a.t_test,
        },
    )?;
    let mut text = String::new();
    let _ = writeln!(text, "r_a\t{}", cmp.r_a);
    let _ = writeln!(text, "r_b\t{}", cmp.r_b);
    let _ = writeln!(text, "p_value\t{}", cmp.p_value);
    let _ = writeln!(text, "valid_resamples\t{}", cmp.valid_resamples);
    if let Some(p) = cmp.t_test_p_value {
        let _ = writeln!(text, "t_test_p_value\t{p}");
    }
    emit(&mut run, a.out.as_ref(), &text)?;
    run.finish()
}

pub fn synth(a: &SynthArgs, ctx: &Context) -> Result<()> {
    std::fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;
    let mut run = Run::start(ctx, a, &a.common, Some(a.seed), Some(a.out_dir.join("manifest.json")))?;
    let pools = match a.kind.as_str() {
        "word" => planted_word_pools(&WordPoolSpec {
            sentences: a.sentences,
            seed: a.seed,
            ..Default::default()
        })?,
        _ => planted_sentence_pools(&SentencePoolSpec {
            sentences: a.sentences,
            seed: a.seed,
            ..Default::default()
        })?,
    };
    let lines = |pool: &[TokenizedSentence]| -> String { pool.iter().map(|s| format!("{}\n", s.text)).collect() };
    let gold: String = pools.gold.iter().map(|g| format!("{g}\n")).collect();
    run.output(&a.out_dir.join("src.txt"), lines(&pools.source).as_bytes())?;
    run.output(&a.out_dir.join("tgt.txt"), lines(&pools.target).as_bytes())?;
    run.output(&a.out_dir.join("src.useb"), &pools.source_store.to_binary_bytes())?;
    run.output(&a.out_dir.join("tgt.useb"), &pools.target_store.to_binary_bytes())?;
    run.output(&a.out_dir.join("gold.txt"), gold.as_bytes())?;
    run.finish()
}
