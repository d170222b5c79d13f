use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::feedback::{CriterionWeights, Smoothing};
use crate::incentives::PointsTable;
use crate::recommend::CollaboratorWeights;
use crate::search::{Bm25Params, Threshold};

/// Tunable constants of the platform's algorithms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlatformConfig {
    pub duplicate_threshold: Threshold,
    pub smoothing: Smoothing,
    pub criterion_weights: CriterionWeights,
    pub bm25: Bm25Params,
    pub collaborator_weights: CollaboratorWeights,
    pub points: PointsTable,
}

impl Default for PlatformConfig {
    fn default() -> Self {
        PlatformConfig {
            duplicate_threshold: Threshold::DEFAULT_DUPLICATE,
            smoothing: Smoothing::default(),
            criterion_weights: CriterionWeights::default(),
            bm25: Bm25Params::default(),
            collaborator_weights: CollaboratorWeights::default(),
            points: PointsTable::default(),
        }
    }
}

impl PlatformConfig {
    pub fn validate(&self) -> Result<()> {
        self.criterion_weights.validate()?;
        self.collaborator_weights.validate()?;
        Ok(())
    }
}
