use std::time::Instant;

use serde::Serialize;

use crate::error::Result;

/// Contribution of one class to a score.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassTerm {
    pub class_id: usize,
    pub n_c: usize,
    /// Weight of this class in the final score; weights of included
    /// classes sum to 1.
    pub weight: f64,
    /// Class entropy (TMI) or class-level term (ICV measures).
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreResult {
    pub method: String,
    pub value: f64,
    /// Seconds of monotonic-clock time spent inside the scorer.
    pub wall_time: f64,
    pub per_class: Vec<ClassTerm>,
    pub warnings: Vec<String>,
    /// Conventions needed to read `value` (orientation, variants).
    pub notes: Vec<String>,
}

impl ScoreResult {
    pub(crate) fn new(method: &str, value: f64) -> Self {
        Self {
            method: method.to_string(),
            value,
            wall_time: 0.0,
            per_class: Vec::new(),
            warnings: Vec::new(),
            notes: Vec::new(),
        }
    }
}

/// Runs a scorer and stamps its wall time.
pub(crate) fn timed(f: impl FnOnce() -> Result<ScoreResult>) -> Result<ScoreResult> {
    let start = Instant::now();
    let mut result = f()?;
    result.wall_time = start.elapsed().as_secs_f64();
    Ok(result)
}
