use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use serde::Deserialize;

use ssr_core::baselines::{LassoOracle, PnormLearner, SgdLearner};
use ssr_core::datagen::{
    make_wstar, read_dense_csv, read_sparse_text, shuffle_examples, DataFormat, StreamGenerator,
    StreamSpec, TrueModel,
};
use ssr_core::loss::loss_value;
use ssr_core::metrics::{param_error, support_metrics, LossWindow, Regret, RunRecord};
use ssr_core::ssr::{Mode, SsrHyperparams, SsrLearner};
use ssr_core::{Example, LossModel, OnlineLearner};

use crate::config::{parse_algo, AlgoKind, ExperimentConfig, StreamSource};
use crate::error::{HarnessError, Result};
use crate::registry::PluginRegistry;

/// A stream source resolved to something the run loop can draw from: file
/// sources are loaded and validated once, synthetic sources keep their spec
/// plus the (seed-independent) ground truth.
pub struct ResolvedStream {
    pub d: usize,
    pub loss: LossModel,
    pub truth: Option<TrueModel>,
    kind: StreamKind,
}

enum StreamKind {
    Synthetic(StreamSpec),
    Replay(Vec<Example>),
}

impl ResolvedStream {
    pub fn resolve(src: &StreamSource) -> Result<ResolvedStream> {
        match src {
            StreamSource::Synthetic(spec) => {
                spec.validate().map_err(HarnessError::from_config)?;
                let truth = make_wstar(spec).map_err(HarnessError::from_config)?;
                Ok(ResolvedStream {
                    d: spec.d,
                    loss: spec.loss_kind,
                    truth: Some(truth),
                    kind: StreamKind::Synthetic(spec.clone()),
                })
            }
            StreamSource::File(file) => {
                let (d, mut examples) = match file.format {
                    DataFormat::DenseCsv => {
                        read_dense_csv(&file.path).map_err(HarnessError::from_data)?
                    }
                    DataFormat::SparseText => {
                        read_sparse_text(&file.path, file.d).map_err(HarnessError::from_data)?
                    }
                };
                if let Some(want) = file.d {
                    if file.format == DataFormat::DenseCsv && want != d {
                        return Err(HarnessError::Data(format!(
                            "{} has d={d}, config says d={want}",
                            file.path.display()
                        )));
                    }
                }
                if examples.is_empty() {
                    return Err(HarnessError::Data(format!(
                        "{} holds no examples",
                        file.path.display()
                    )));
                }
                if file.loss_kind == LossModel::Logistic {
                    for (i, e) in examples.iter().enumerate() {
                        if e.y != 0.0 && e.y != 1.0 {
                            return Err(HarnessError::Data(format!(
                                "example {} has label {}; logistic labels must be 0 or 1",
                                i + 1,
                                e.y
                            )));
                        }
                    }
                }
                if let Some(seed) = file.shuffle_seed {
                    shuffle_examples(&mut examples, seed);
                }
                Ok(ResolvedStream {
                    d,
                    loss: file.loss_kind,
                    truth: None,
                    kind: StreamKind::Replay(examples),
                })
            }
        }
    }

    /// Number of examples available per replicate, if bounded.
    pub fn len_limit(&self) -> Option<u64> {
        match &self.kind {
            StreamKind::Synthetic(_) => None,
            StreamKind::Replay(v) => Some(v.len() as u64),
        }
    }

    /// Example source for one replicate. Synthetic streams draw fresh data
    /// per replicate index; file streams replay the same sequence.
    pub fn cursor(&self, replicate: u64) -> Result<StreamCursor<'_>> {
        match &self.kind {
            StreamKind::Synthetic(spec) => {
                let truth = self.truth.as_ref().expect("synthetic stream keeps its truth");
                let gen = StreamGenerator::new(spec, truth, replicate)
                    .map_err(HarnessError::from_config)?;
                Ok(StreamCursor::Synthetic(Box::new(gen)))
            }
            StreamKind::Replay(v) => Ok(StreamCursor::Replay(v.iter())),
        }
    }
}

pub enum StreamCursor<'a> {
    Synthetic(Box<StreamGenerator>),
    Replay(std::slice::Iter<'a, Example>),
}

impl StreamCursor<'_> {
    /// Callers bound the draw count by `len_limit` up front.
    fn next_example(&mut self) -> Example {
        match self {
            StreamCursor::Synthetic(gen) => gen.next_example(),
            StreamCursor::Replay(it) => it.next().expect("replay length was pre-validated").clone(),
        }
    }
}

/// Instrumentation seam for the run loop: called after the prediction and its
/// metrics are fixed, before the learner sees the example. Production runs
/// use the no-op implementation; tests may mutate the example here to verify
/// that recorded metrics never depend on what the update saw.
pub trait StreamHook {
    fn after_prediction(&mut self, _t: u64, _ex: &mut Example) {}
}

/// Default hook: leaves examples untouched.
pub struct NoopHook;

impl StreamHook for NoopHook {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SgdHp {
    eta: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PnormHp {
    lambda: f64,
    step_scale: f64,
    #[serde(default)]
    p: Option<f64>,
}

fn default_oracle_cap() -> usize {
    2500
}

fn default_oracle_tol() -> f64 {
    1e-8
}

fn default_oracle_sweeps() -> usize {
    200
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LassoHp {
    lam: f64,
    #[serde(default = "default_oracle_cap")]
    cap: usize,
    #[serde(default = "default_oracle_tol")]
    tol: f64,
    #[serde(default = "default_oracle_sweeps")]
    max_sweeps: usize,
}

fn hp_err(algo: &str, e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Config(format!("hp for {algo}: {e}"))
}

/// Parse `hp` for the ssr learners, defaulting the schedule to the canonical
/// one for the mode when the config leaves it out.
fn ssr_hp(hp: &serde_json::Value, mode: Mode) -> Result<SsrHyperparams> {
    let mut v = match hp {
        serde_json::Value::Null => serde_json::json!({}),
        other => other.clone(),
    };
    let obj = v
        .as_object_mut()
        .ok_or_else(|| hp_err("ssr", "expected a JSON object"))?;
    if !obj.contains_key("schedule") {
        let default = match mode {
            Mode::Streaming => "sqrt_growth",
            Mode::Averaged => "batch_growth",
        };
        obj.insert("schedule".into(), serde_json::Value::String(default.into()));
    }
    serde_json::from_value(v).map_err(|e| hp_err("ssr", e))
}

/// Construct the learner named by `algo` for dimension `d`.
///
/// `record_every` doubles as the lasso oracle's refit cadence so the oracle
/// fits exactly once per evaluation point, and `t_total` caps its buffer.
pub fn build_learner(
    algo: &AlgoKind,
    d: usize,
    hp: &serde_json::Value,
    record_every: u64,
    t_total: u64,
    registry: &PluginRegistry,
) -> Result<Box<dyn OnlineLearner>> {
    match algo {
        AlgoKind::Ssr => {
            let hp = ssr_hp(hp, Mode::Streaming)?;
            let l = SsrLearner::new(d, hp, Mode::Streaming).map_err(HarnessError::from_config)?;
            Ok(Box::new(l))
        }
        AlgoKind::SsrAvg => {
            let hp = ssr_hp(hp, Mode::Averaged)?;
            let l = SsrLearner::new(d, hp, Mode::Averaged).map_err(HarnessError::from_config)?;
            Ok(Box::new(l))
        }
        AlgoKind::Sgd => {
            let hp: SgdHp = serde_json::from_value(hp.clone()).map_err(|e| hp_err("sgd", e))?;
            let l = SgdLearner::new(d, hp.eta).map_err(HarnessError::from_config)?;
            Ok(Box::new(l))
        }
        AlgoKind::Pnorm => {
            let hp: PnormHp = serde_json::from_value(hp.clone()).map_err(|e| hp_err("pnorm", e))?;
            let l = PnormLearner::new(d, hp.lambda, hp.step_scale, hp.p)
                .map_err(HarnessError::from_config)?;
            Ok(Box::new(l))
        }
        AlgoKind::LassoOracle => {
            let hp: LassoHp =
                serde_json::from_value(hp.clone()).map_err(|e| hp_err("lasso_oracle", e))?;
            let cap = hp.cap.min(t_total as usize).max(1);
            let l = LassoOracle::new(d, hp.lam, cap, hp.tol, hp.max_sweeps, record_every)
                .map_err(HarnessError::from_config)?;
            Ok(Box::new(l))
        }
        AlgoKind::Plugin(name) => registry.build(name, d, hp),
    }
}

/// Why one replicate was abandoned.
#[derive(Debug, Clone)]
pub struct SeedFailure {
    pub seed: u64,
    pub at_step: u64,
    pub message: String,
}

/// One output row: run identity plus the recorded metrics.
#[derive(Debug, Clone)]
pub struct ResultRow {
    pub run_id: String,
    pub seed: u64,
    pub algo: String,
    pub rec: RunRecord,
}

/// Everything a run produced: rows for healthy seeds, failures for the rest.
#[derive(Debug)]
pub struct RunOutput {
    pub rows: Vec<ResultRow>,
    pub failures: Vec<SeedFailure>,
}

struct StepFailure {
    at_step: u64,
    message: String,
}

/// The soft threshold maps everything at or under `lambda` to zero, so a
/// learner exposing threshold diagnostics must hold an exactly-zero weight
/// vector whenever its accumulator sits inside the threshold. Violations are
/// numerical failures, never silent.
fn sparsity_violation(learner: &dyn OnlineLearner) -> Option<String> {
    let diag = learner.threshold_diag()?;
    if diag.theta_inf <= diag.lambda && learner.weights().nnz() != 0 {
        return Some(format!(
            "weights nonzero ({} coords) with |theta|_inf = {} <= lambda = {}",
            learner.weights().nnz(),
            diag.theta_inf,
            diag.lambda
        ));
    }
    None
}

/// Drive one learner over one replicate of the stream for `t_total` steps.
///
/// The loop is prequential: every metric in the row for step t is computed
/// from the weights as they stood before the learner saw example t, and
/// `elapsed_ns` accumulates wall time spent inside `step` alone. Rows are
/// emitted whenever `t % record_every == 0`, plus always at `t = t_total`.
fn run_replicate(
    stream: &ResolvedStream,
    replicate: u64,
    learner: &mut dyn OnlineLearner,
    t_total: u64,
    window_cap: usize,
    record_every: u64,
    hook: &mut dyn StreamHook,
) -> std::result::Result<Vec<RunRecord>, StepFailure> {
    let mut cursor = stream
        .cursor(replicate)
        .map_err(|e| StepFailure { at_step: 0, message: e.to_string() })?;
    let mut window = LossWindow::new(window_cap)
        .map_err(|e| StepFailure { at_step: 0, message: e.to_string() })?;
    let mut regret = Regret::new();
    let mut elapsed_ns: u128 = 0;
    let mut records = Vec::new();

    for t in 1..=t_total {
        if let Some(msg) = sparsity_violation(learner) {
            return Err(StepFailure { at_step: t, message: msg });
        }
        let mut ex = cursor.next_example();

        let inst = loss_value(&stream.loss, learner.weights(), &ex)
            .map_err(|e| StepFailure { at_step: t, message: e.to_string() })?;
        window.push(inst);
        if let Some(truth) = &stream.truth {
            let comparator = loss_value(&stream.loss, &truth.wstar, &ex)
                .map_err(|e| StepFailure { at_step: t, message: e.to_string() })?;
            regret.update(inst, comparator);
        }

        let recording = t % record_every == 0 || t == t_total;
        let mut pending = if recording {
            let w = learner.weights();
            let est = learner.estimate();
            let has_avg = !std::ptr::eq(w, est);
            let mut rec = RunRecord {
                t,
                inst_loss: inst,
                window_loss: window.mean(),
                param_err: None,
                avg_param_err: None,
                regret: None,
                support_size: est.nnz(),
                support_precision: None,
                support_recall: None,
                elapsed_ns: 0,
            };
            if let Some(truth) = &stream.truth {
                let pe = param_error(w, &truth.wstar)
                    .map_err(|e| StepFailure { at_step: t, message: e.to_string() })?;
                rec.param_err = Some(pe);
                if has_avg {
                    let ae = param_error(est, &truth.wstar)
                        .map_err(|e| StepFailure { at_step: t, message: e.to_string() })?;
                    rec.avg_param_err = Some(ae);
                }
                rec.regret = Some(regret.total());
                let sm = support_metrics(est, &truth.support);
                rec.support_precision = Some(sm.precision);
                rec.support_recall = Some(sm.recall);
            }
            Some(rec)
        } else {
            None
        };

        hook.after_prediction(t, &mut ex);

        let started = Instant::now();
        let step = learner.step(&ex, &stream.loss);
        elapsed_ns += started.elapsed().as_nanos();
        if let Err(e) = step {
            return Err(StepFailure { at_step: t, message: e.to_string() });
        }

        if let Some(mut rec) = pending.take() {
            rec.elapsed_ns = elapsed_ns;
            records.push(rec);
        }
    }
    if let Some(msg) = sparsity_violation(learner) {
        return Err(StepFailure { at_step: t_total, message: msg });
    }
    Ok(records)
}

/// Run every seed of an experiment. A failed seed contributes no rows and is
/// reported in `failures`; the other seeds still run.
pub fn run_experiment_hooked(
    cfg: &ExperimentConfig,
    registry: &PluginRegistry,
    hook: &mut dyn StreamHook,
) -> Result<RunOutput> {
    cfg.validate()?;
    let algo = parse_algo(&cfg.algo)?;
    let stream = ResolvedStream::resolve(&cfg.stream)?;
    if let Some(limit) = stream.len_limit() {
        if limit < cfg.t {
            return Err(HarnessError::Data(format!(
                "stream holds {limit} examples but T={}",
                cfg.t
            )));
        }
    }

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for &seed in &cfg.seeds {
        let mut learner =
            build_learner(&algo, stream.d, &cfg.hp, cfg.record_every, cfg.t, registry)?;
        match run_replicate(
            &stream,
            seed,
            learner.as_mut(),
            cfg.t,
            cfg.window,
            cfg.record_every,
            hook,
        ) {
            Ok(records) => {
                let run_id = format!("{}-seed{}", cfg.algo, seed);
                rows.extend(records.into_iter().map(|rec| ResultRow {
                    run_id: run_id.clone(),
                    seed,
                    algo: cfg.algo.clone(),
                    rec,
                }));
            }
            Err(f) => failures.push(SeedFailure {
                seed,
                at_step: f.at_step,
                message: f.message,
            }),
        }
    }
    Ok(RunOutput { rows, failures })
}

pub fn run_experiment(cfg: &ExperimentConfig, registry: &PluginRegistry) -> Result<RunOutput> {
    run_experiment_hooked(cfg, registry, &mut NoopHook)
}

/// One run on the dev replicate (index 0), reduced to its final record.
/// Used by the sweep; dev data is disjoint from every evaluation seed.
/// `record_every` keeps its runner meaning, so the lasso oracle refits at
/// the same cadence it would in the real run.
pub fn run_dev_point(
    stream: &ResolvedStream,
    algo: &AlgoKind,
    hp: &serde_json::Value,
    dev_size: u64,
    window_cap: usize,
    record_every: u64,
    registry: &PluginRegistry,
) -> Result<std::result::Result<RunRecord, String>> {
    if let Some(limit) = stream.len_limit() {
        if limit < dev_size {
            return Err(HarnessError::Data(format!(
                "stream holds {limit} examples but dev_size={dev_size}"
            )));
        }
    }
    let mut learner = build_learner(algo, stream.d, hp, record_every, dev_size, registry)?;
    match run_replicate(
        stream,
        0,
        learner.as_mut(),
        dev_size,
        window_cap,
        record_every,
        &mut NoopHook,
    ) {
        Ok(records) => {
            let last = records.into_iter().last().expect("final row is always recorded");
            Ok(Ok(last))
        }
        Err(f) => Ok(Err(format!("step {}: {}", f.at_step, f.message))),
    }
}

pub const RESULT_COLUMNS: [&str; 13] = [
    "run_id",
    "seed",
    "algo",
    "t",
    "inst_loss",
    "window_loss",
    "param_err",
    "avg_param_err",
    "regret",
    "support_size",
    "support_precision",
    "support_recall",
    "elapsed_ns",
];

fn opt_field(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Write rows in the fixed column order; inapplicable fields stay empty.
pub fn write_results_csv(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let file = std::fs::File::create(path)
        .map_err(|e| HarnessError::Data(format!("cannot create {}: {e}", path.display())))?;
    let mut out = std::io::BufWriter::new(file);
    writeln!(out, "{}", RESULT_COLUMNS.join(","))?;
    for row in rows {
        let r = &row.rec;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            row.run_id,
            row.seed,
            row.algo,
            r.t,
            r.inst_loss,
            opt_field(r.window_loss),
            opt_field(r.param_err),
            opt_field(r.avg_param_err),
            opt_field(r.regret),
            r.support_size,
            opt_field(r.support_precision),
            opt_field(r.support_recall),
            r.elapsed_ns
        )?;
    }
    out.flush()?;
    Ok(())
}
