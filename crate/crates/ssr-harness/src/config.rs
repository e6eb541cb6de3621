use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use ssr_core::datagen::{DataFormat, StreamSpec};
use ssr_core::metrics::DEFAULT_WINDOW;
use ssr_core::LossModel;

use crate::error::{HarnessError, Result};

/// External dataset played back as a stream.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileSource {
    pub path: PathBuf,
    pub format: DataFormat,
    pub loss_kind: LossModel,
    /// Dimension hint, required only when the sparse format cannot infer it.
    #[serde(default)]
    pub d: Option<usize>,
    /// Optional in-memory reorder of the file before streaming.
    #[serde(default)]
    pub shuffle_seed: Option<u64>,
}

/// Where the examples come from.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StreamSource {
    Synthetic(StreamSpec),
    File(FileSource),
}

fn default_window() -> usize {
    DEFAULT_WINDOW
}

fn default_record_every() -> u64 {
    1
}

fn default_hp() -> serde_json::Value {
    serde_json::Value::Object(serde_json::Map::new())
}

/// One experiment: a stream, an algorithm with its hyperparameters, and the
/// run geometry. Replicated once per entry in `seeds`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub stream: StreamSource,
    pub algo: String,
    #[serde(default = "default_hp")]
    pub hp: serde_json::Value,
    #[serde(rename = "T")]
    pub t: u64,
    #[serde(default = "default_window")]
    pub window: usize,
    pub seeds: Vec<u64>,
    #[serde(default = "default_record_every")]
    pub record_every: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.t < 1 {
            return Err(HarnessError::Config("T must be >= 1".into()));
        }
        if self.record_every < 1 {
            return Err(HarnessError::Config("record_every must be >= 1".into()));
        }
        if self.window < 1 {
            return Err(HarnessError::Config("window must be >= 1".into()));
        }
        if self.seeds.is_empty() {
            return Err(HarnessError::Config("seeds must be nonempty".into()));
        }
        // Replicate index 0 is reserved for the dev stream, so evaluation
        // seeds live at 1 and above; this keeps tuning data disjoint from
        // evaluation data by construction.
        if let Some(bad) = self.seeds.iter().find(|&&s| s == 0) {
            return Err(HarnessError::Config(format!(
                "seed {bad} is reserved for the dev set; use seeds >= 1"
            )));
        }
        parse_algo(&self.algo)?;
        match &self.stream {
            StreamSource::Synthetic(spec) => {
                spec.validate().map_err(HarnessError::from_config)?;
            }
            StreamSource::File(file) => {
                file.loss_kind.validate().map_err(HarnessError::from_config)?;
                if let Some(0) = file.d {
                    return Err(HarnessError::Config("d must be >= 1 when given".into()));
                }
            }
        }
        Ok(())
    }
}

/// Algorithm selector parsed from the `algo` string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgoKind {
    Ssr,
    SsrAvg,
    Sgd,
    Pnorm,
    LassoOracle,
    Plugin(String),
}

pub fn parse_algo(name: &str) -> Result<AlgoKind> {
    match name {
        "ssr" => Ok(AlgoKind::Ssr),
        "ssr_avg" => Ok(AlgoKind::SsrAvg),
        "sgd" => Ok(AlgoKind::Sgd),
        "pnorm" => Ok(AlgoKind::Pnorm),
        "lasso_oracle" => Ok(AlgoKind::LassoOracle),
        other => {
            if let Some(plugin) = other.strip_prefix("plugin:") {
                if plugin.is_empty() {
                    return Err(HarnessError::Config("empty plugin name".into()));
                }
                Ok(AlgoKind::Plugin(plugin.to_string()))
            } else {
                Err(HarnessError::Config(format!(
                    "unknown algo {other:?}; expected ssr, ssr_avg, sgd, pnorm, \
                     lasso_oracle, or plugin:<name>"
                )))
            }
        }
    }
}

/// Metric minimized when picking a grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMetric {
    WindowLoss,
    ParamErr,
}

fn default_dev_size() -> u64 {
    1000
}

/// Grid search over hyperparameters, evaluated on a dev stream that shares
/// the truth with the base config but uses the reserved replicate index 0.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub base: ExperimentConfig,
    /// Hyperparameter name to candidate values; keys iterate in sorted order
    /// so the grid enumeration is canonical.
    pub grid: BTreeMap<String, Vec<serde_json::Value>>,
    #[serde(default = "default_dev_size")]
    pub dev_size: u64,
    pub selection_metric: SelectionMetric,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.grid.is_empty() {
            return Err(HarnessError::Config("grid must be nonempty".into()));
        }
        if let Some((k, _)) = self.grid.iter().find(|(_, v)| v.is_empty()) {
            return Err(HarnessError::Config(format!("grid entry {k:?} has no values")));
        }
        if self.dev_size < 1 {
            return Err(HarnessError::Config("dev_size must be >= 1".into()));
        }
        if self.selection_metric == SelectionMetric::ParamErr
            && matches!(self.base.stream, StreamSource::File(_))
        {
            return Err(HarnessError::Config(
                "param_err selection needs a synthetic stream with known truth".into(),
            ));
        }
        Ok(())
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
}

pub fn load_experiment(path: &Path) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = read_json(path)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_sweep(path: &Path) -> Result<SweepConfig> {
    let cfg: SweepConfig = read_json(path)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_stream_spec(path: &Path) -> Result<StreamSpec> {
    let spec: StreamSpec = read_json(path)?;
    spec.validate().map_err(HarnessError::from_config)?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_json() -> serde_json::Value {
        serde_json::json!({
            "stream": {"synthetic": {
                "d": 4, "k": 2, "design": "iid_gaussian",
                "seed": 7, "loss_kind": "squared"
            }},
            "algo": "ssr",
            "T": 10,
            "seeds": [1, 2]
        })
    }

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg: ExperimentConfig = serde_json::from_value(minimal_json()).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.window, DEFAULT_WINDOW);
        assert_eq!(cfg.record_every, 1);
        assert!(cfg.output.is_none());
        assert!(cfg.hp.as_object().unwrap().is_empty());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut v = minimal_json();
        v["typo_field"] = serde_json::json!(1);
        assert!(serde_json::from_value::<ExperimentConfig>(v).is_err());

        let mut v = minimal_json();
        v["stream"]["synthetic"]["bogus"] = serde_json::json!(true);
        assert!(serde_json::from_value::<ExperimentConfig>(v).is_err());
    }

    #[test]
    fn invariant_violations_are_config_errors() {
        let mut v = minimal_json();
        v["T"] = serde_json::json!(0);
        let cfg: ExperimentConfig = serde_json::from_value(v).unwrap();
        assert!(matches!(cfg.validate(), Err(HarnessError::Config(_))));

        let mut v = minimal_json();
        v["seeds"] = serde_json::json!([]);
        let cfg: ExperimentConfig = serde_json::from_value(v).unwrap();
        assert!(cfg.validate().is_err());

        let mut v = minimal_json();
        v["seeds"] = serde_json::json!([0]);
        let cfg: ExperimentConfig = serde_json::from_value(v).unwrap();
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("dev"), "{err}");
    }

    #[test]
    fn algo_names_parse() {
        assert_eq!(parse_algo("ssr").unwrap(), AlgoKind::Ssr);
        assert_eq!(parse_algo("ssr_avg").unwrap(), AlgoKind::SsrAvg);
        assert_eq!(parse_algo("lasso_oracle").unwrap(), AlgoKind::LassoOracle);
        assert_eq!(
            parse_algo("plugin:anw").unwrap(),
            AlgoKind::Plugin("anw".into())
        );
        assert!(parse_algo("plugin:").is_err());
        assert!(parse_algo("adam").is_err());
    }

    #[test]
    fn sweep_validation() {
        let base: ExperimentConfig = serde_json::from_value(minimal_json()).unwrap();
        let mut sweep = SweepConfig {
            base,
            grid: BTreeMap::new(),
            dev_size: 1000,
            selection_metric: SelectionMetric::WindowLoss,
        };
        assert!(sweep.validate().is_err());
        sweep
            .grid
            .insert("lambda".into(), vec![serde_json::json!(0.5)]);
        sweep.validate().unwrap();
        sweep.grid.insert("eta".into(), vec![]);
        assert!(sweep.validate().is_err());
    }

    #[test]
    fn file_source_round_trips() {
        let v = serde_json::json!({
            "stream": {"file": {
                "path": "data.csv", "format": "dense_csv", "loss_kind": "squared"
            }},
            "algo": "sgd",
            "hp": {"eta": 1.0},
            "T": 5,
            "seeds": [1]
        });
        let cfg: ExperimentConfig = serde_json::from_value(v).unwrap();
        cfg.validate().unwrap();
        match &cfg.stream {
            StreamSource::File(f) => {
                assert_eq!(f.format, DataFormat::DenseCsv);
                assert!(f.d.is_none());
            }
            _ => panic!("expected file source"),
        }
    }
}
