use std::collections::BTreeMap;

use ssr_core::OnlineLearner;

use crate::error::{HarnessError, Result};

/// Builds a learner for a given dimension from its JSON hyperparameters.
pub type LearnerFactory =
    Box<dyn Fn(usize, &serde_json::Value) -> Result<Box<dyn OnlineLearner>> + Send + Sync>;

/// Learners registered by name and selectable as `plugin:<name>`.
#[derive(Default)]
pub struct PluginRegistry {
    factories: BTreeMap<String, LearnerFactory>,
}

impl PluginRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, name: &str, factory: LearnerFactory) -> Result<()> {
        if name.is_empty() || name.contains(':') {
            return Err(HarnessError::Config(format!("bad plugin name {name:?}")));
        }
        if self.factories.contains_key(name) {
            return Err(HarnessError::Config(format!(
                "plugin {name:?} already registered"
            )));
        }
        self.factories.insert(name.to_string(), factory);
        Ok(())
    }

    pub fn build(&self, name: &str, d: usize, hp: &serde_json::Value) -> Result<Box<dyn OnlineLearner>> {
        match self.factories.get(name) {
            Some(f) => f(d, hp),
            None => Err(HarnessError::Config(format!(
                "no plugin registered under {name:?}"
            ))),
        }
    }
}
