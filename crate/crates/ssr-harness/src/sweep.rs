use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::Path;

use crate::config::{parse_algo, SelectionMetric, SweepConfig};
use crate::error::{HarnessError, Result};
use crate::registry::PluginRegistry;
use crate::runner::{run_dev_point, ResolvedStream};

/// One evaluated grid point.
#[derive(Debug, Clone)]
pub struct GridRow {
    pub index: usize,
    /// Assignment in sorted-key order, mirroring the grid map.
    pub assignment: BTreeMap<String, serde_json::Value>,
    /// Selection metric at the final dev step; +inf when the run failed.
    pub metric: f64,
    /// Dev run ended in a numerical failure.
    pub failed: bool,
    pub selected: bool,
}

/// Sweep result: the winning hyperparameters and the full table.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub best_index: usize,
    pub best_hp: serde_json::Value,
    pub rows: Vec<GridRow>,
}

fn as_object(v: &serde_json::Value) -> Result<serde_json::Map<String, serde_json::Value>> {
    match v {
        serde_json::Value::Null => Ok(serde_json::Map::new()),
        serde_json::Value::Object(m) => Ok(m.clone()),
        other => Err(HarnessError::Config(format!(
            "hp must be a JSON object, got {other}"
        ))),
    }
}

/// Numeric value of a hyperparameter for tie-breaking; points without the key
/// sort last among ties.
fn tie_key(hp: &serde_json::Map<String, serde_json::Value>, names: &[&str]) -> f64 {
    for name in names {
        if let Some(v) = hp.get(*name).and_then(|v| v.as_f64()) {
            return v;
        }
    }
    f64::INFINITY
}

/// Exhaustive grid evaluation on the dev replicate.
///
/// Points are enumerated in canonical order: grid keys sorted, the last key
/// cycling fastest. The winner minimizes the selection metric at the final
/// dev step; exact ties go to the smaller lambda, then the smaller eta, then
/// the earlier point.
pub fn sweep(cfg: &SweepConfig, registry: &PluginRegistry) -> Result<SweepOutcome> {
    cfg.validate()?;
    let algo = parse_algo(&cfg.base.algo)?;
    let stream = ResolvedStream::resolve(&cfg.base.stream)?;
    let base_hp = as_object(&cfg.base.hp)?;

    let keys: Vec<&String> = cfg.grid.keys().collect();
    let lens: Vec<usize> = keys.iter().map(|k| cfg.grid[*k].len()).collect();
    let total: usize = lens.iter().product();

    let mut rows: Vec<GridRow> = Vec::with_capacity(total);
    let mut candidates: Vec<(f64, f64, f64, usize, serde_json::Value)> = Vec::with_capacity(total);

    for index in 0..total {
        let mut rem = index;
        let mut assignment = BTreeMap::new();
        let mut hp = base_hp.clone();
        for pos in (0..keys.len()).rev() {
            let choice = rem % lens[pos];
            rem /= lens[pos];
            let value = cfg.grid[keys[pos]][choice].clone();
            hp.insert(keys[pos].clone(), value.clone());
            assignment.insert(keys[pos].clone(), value);
        }
        let hp_value = serde_json::Value::Object(hp.clone());

        let point = run_dev_point(
            &stream,
            &algo,
            &hp_value,
            cfg.dev_size,
            cfg.base.window,
            cfg.base.record_every,
            registry,
        )?;
        let (metric, failed) = match point {
            Ok(rec) => {
                let raw = match cfg.selection_metric {
                    SelectionMetric::WindowLoss => rec.window_loss,
                    // Error of the estimate of record: the running average
                    // when the learner keeps one, the weights otherwise.
                    SelectionMetric::ParamErr => rec.avg_param_err.or(rec.param_err),
                };
                match raw {
                    Some(v) if v.is_finite() => (v, false),
                    _ => (f64::INFINITY, false),
                }
            }
            Err(_) => (f64::INFINITY, true),
        };

        candidates.push((
            metric,
            tie_key(&hp, &["lambda", "lam"]),
            tie_key(&hp, &["eta"]),
            index,
            hp_value,
        ));
        rows.push(GridRow { index, assignment, metric, failed, selected: false });
    }

    let best = candidates
        .iter()
        .min_by(|a, b| {
            (a.0, a.1, a.2, a.3)
                .partial_cmp(&(b.0, b.1, b.2, b.3))
                .expect("tie keys are never NaN")
        })
        .expect("grid is nonempty");
    if !best.0.is_finite() {
        return Err(HarnessError::Numerical(
            "every grid point failed or produced a non-finite metric".into(),
        ));
    }
    let best_index = best.3;
    rows[best_index].selected = true;
    Ok(SweepOutcome { best_index, best_hp: best.4.clone(), rows })
}

/// Grid table as CSV: one row per point, keys in sorted order, then the
/// metric and the selection flag.
pub fn write_grid_csv(path: &Path, cfg: &SweepConfig, outcome: &SweepOutcome) -> Result<()> {
    let file = std::fs::File::create(path)
        .map_err(|e| HarnessError::Data(format!("cannot create {}: {e}", path.display())))?;
    let mut out = std::io::BufWriter::new(file);
    let keys: Vec<&String> = cfg.grid.keys().collect();
    let mut header: Vec<String> = vec!["grid_index".into()];
    header.extend(keys.iter().map(|k| (*k).clone()));
    header.push("metric".into());
    header.push("failed".into());
    header.push("selected".into());
    writeln!(out, "{}", header.join(","))?;
    for row in &outcome.rows {
        let mut fields = vec![row.index.to_string()];
        for k in &keys {
            fields.push(row.assignment[*k].to_string());
        }
        fields.push(if row.metric.is_finite() { row.metric.to_string() } else { "inf".into() });
        fields.push(u8::from(row.failed).to_string());
        fields.push(u8::from(row.selected).to_string());
        writeln!(out, "{}", fields.join(","))?;
    }
    out.flush()?;
    Ok(())
}
