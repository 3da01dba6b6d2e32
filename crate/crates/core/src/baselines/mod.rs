//! Budget-metered surrogate explainers used as comparison points.
//!
//! Every call that reaches the wrapped model through [`ClassifierHandle::predict`]
//! costs one unit of the handle's [`Budget`]. Predictions handed to an explainer
//! as its input batch are obtained with [`ClassifierHandle::predict_unmetered`].

mod anchors;
mod lime;
mod oracle;

pub use anchors::{anchors_budgeted, AnchorsOutcome};
pub use lime::{lime_budgeted, AttributionExplanation, LimeConfig, LimeOutcome};
pub use oracle::{serve_ndjson, NdjsonClassifier, OracleRequest, OracleResponse, SubprocessClassifier};

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use serde::Serialize;
use thiserror::Error;

use crate::executor::{ExecError, Example};
use crate::explang::ExplangError;

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("budget exhausted: {needed} calls needed, {remaining} remaining")]
    BudgetExhausted { needed: usize, remaining: usize },
    #[error("at least one perturbation per example is required")]
    ZeroPerturbations,
    #[error("no anchor examples given")]
    NoAnchors,
    #[error("classifier failed: {0}")]
    Classifier(String),
    #[error(transparent)]
    Exec(#[from] ExecError),
    #[error(transparent)]
    Explang(#[from] ExplangError),
}

/// Call allowance for one baseline run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Budget {
    pub limit: usize,
    pub used: usize,
}

impl Budget {
    pub fn new(limit: usize) -> Self {
        Budget { limit, used: 0 }
    }

    pub fn remaining(&self) -> usize {
        self.limit - self.used
    }

    /// Reserves `n` calls, or fails without reserving any.
    pub fn reserve(&mut self, n: usize) -> Result<(), BaselineError> {
        if n > self.remaining() {
            return Err(BaselineError::BudgetExhausted {
                needed: n,
                remaining: self.remaining(),
            });
        }
        self.used += n;
        Ok(())
    }
}

/// A black-box label oracle.
pub trait Classifier: Send + Sync {
    fn predict(&self, example: &Example) -> Result<String, BaselineError>;
}

impl<F> Classifier for F
where
    F: Fn(&Example) -> String + Send + Sync,
{
    fn predict(&self, example: &Example) -> Result<String, BaselineError> {
        Ok(self(example))
    }
}

/// A classifier wired through a budget.
///
/// Clones share the model, the budget and the running total of metered calls.
/// [`ClassifierHandle::with_budget`] gives a fresh budget over the same model
/// while still feeding the same total.
#[derive(Clone)]
pub struct ClassifierHandle {
    model: Arc<dyn Classifier>,
    budget: Arc<Mutex<Budget>>,
    total: Arc<AtomicUsize>,
}

impl std::fmt::Debug for ClassifierHandle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ClassifierHandle")
            .field("budget", &self.budget())
            .field("total_metered", &self.total_metered())
            .finish()
    }
}

impl ClassifierHandle {
    pub fn new(model: Arc<dyn Classifier>, limit: usize) -> Self {
        ClassifierHandle {
            model,
            budget: Arc::new(Mutex::new(Budget::new(limit))),
            total: Arc::new(AtomicUsize::new(0)),
        }
    }

    pub fn with_budget(&self, limit: usize) -> Self {
        ClassifierHandle {
            model: Arc::clone(&self.model),
            budget: Arc::new(Mutex::new(Budget::new(limit))),
            total: Arc::clone(&self.total),
        }
    }

    pub fn budget(&self) -> Budget {
        *self.budget.lock().expect("budget lock poisoned")
    }

    /// Metered calls made through this handle and every handle derived from it.
    pub fn total_metered(&self) -> usize {
        self.total.load(Ordering::SeqCst)
    }

    /// Fails up front if `n` calls would overrun the budget. Spends nothing.
    pub fn ensure_remaining(&self, n: usize) -> Result<(), BaselineError> {
        let b = self.budget();
        if n > b.remaining() {
            return Err(BaselineError::BudgetExhausted {
                needed: n,
                remaining: b.remaining(),
            });
        }
        Ok(())
    }

    /// One metered prediction.
    pub fn predict(&self, example: &Example) -> Result<String, BaselineError> {
        self.budget.lock().expect("budget lock poisoned").reserve(1)?;
        self.total.fetch_add(1, Ordering::SeqCst);
        self.model.predict(example)
    }

    /// A prediction outside the budget, for the explainer's given input pairs.
    pub fn predict_unmetered(&self, example: &Example) -> Result<String, BaselineError> {
        self.model.predict(example)
    }
}
