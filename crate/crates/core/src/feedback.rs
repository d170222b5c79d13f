//! Rating aggregation and the total order behind "best idea".
//!
//! Each rater contributes the weighted mean of their four criterion scores.
//! An idea's smoothed score pulls that average toward a prior:
//!
//! ```text
//! smoothed = (C * m + sum of rater means) / (C + n)
//! ```
//!
//! with prior mean `m = 3.0` and prior weight `C = 5.0` by default.

use std::cmp::Ordering;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{IdeaId, Rating, Scores, Tag, Visibility};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Smoothing {
    pub prior_mean: f64,
    pub prior_weight: f64,
}

impl Default for Smoothing {
    fn default() -> Self {
        Smoothing { prior_mean: 3.0, prior_weight: 5.0 }
    }
}

/// Per-criterion weights; must be non-negative and sum to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriterionWeights {
    pub relevance: f64,
    pub feasibility: f64,
    pub originality: f64,
    pub impact: f64,
}

impl Default for CriterionWeights {
    fn default() -> Self {
        CriterionWeights { relevance: 0.25, feasibility: 0.25, originality: 0.25, impact: 0.25 }
    }
}

impl CriterionWeights {
    pub fn validate(&self) -> Result<()> {
        let w = self.as_array();
        let sum: f64 = w.iter().sum();
        if w.iter().any(|x| !(0.0..=1.0).contains(x)) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput("criterion weights must be in [0,1] and sum to 1".into()));
        }
        Ok(())
    }

    fn as_array(&self) -> [f64; 4] {
        [self.relevance, self.feasibility, self.originality, self.impact]
    }

    pub fn rater_mean(&self, scores: &Scores) -> f64 {
        self.as_array()
            .iter()
            .zip(scores.as_array())
            .map(|(w, s)| w * f64::from(s))
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriterionMeans {
    pub relevance: f64,
    pub feasibility: f64,
    pub originality: f64,
    pub impact: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateScore {
    pub idea_id: IdeaId,
    pub rating_count: u64,
    pub per_criterion_mean: CriterionMeans,
    pub smoothed_score: f64,
}

/// Aggregates every rating given to one idea.
pub fn aggregate<'a>(
    idea_id: IdeaId,
    ratings: impl IntoIterator<Item = &'a Rating>,
    smoothing: &Smoothing,
    weights: &CriterionWeights,
) -> AggregateScore {
    let mut n = 0u64;
    let mut rater_sum = 0.0;
    let mut raw = [0u64; 4];
    for r in ratings {
        n += 1;
        rater_sum += weights.rater_mean(&r.scores);
        for (acc, s) in raw.iter_mut().zip(r.scores.as_array()) {
            *acc += u64::from(s);
        }
    }
    let mean = |i: usize| if n == 0 { smoothing.prior_mean } else { raw[i] as f64 / n as f64 };
    let Smoothing { prior_mean, prior_weight } = *smoothing;
    AggregateScore {
        idea_id,
        rating_count: n,
        per_criterion_mean: CriterionMeans {
            relevance: mean(0),
            feasibility: mean(1),
            originality: mean(2),
            impact: mean(3),
        },
        smoothed_score: (prior_weight * prior_mean + rater_sum) / (prior_weight + n as f64),
    }
}

/// One candidate for ranking.
#[derive(Debug, Clone, PartialEq)]
pub struct Ranked {
    pub idea_id: IdeaId,
    pub created_at: DateTime<Utc>,
    pub score: AggregateScore,
}

/// Score descending, then older first, then lower id.
pub fn rank_order(a: &Ranked, b: &Ranked) -> Ordering {
    b.score
        .smoothed_score
        .total_cmp(&a.score.smoothed_score)
        .then(a.created_at.cmp(&b.created_at))
        .then(a.idea_id.cmp(&b.idea_id))
}

pub fn rank(mut candidates: Vec<Ranked>) -> Vec<Ranked> {
    candidates.sort_by(rank_order);
    candidates
}

/// Optional narrowing of the ranked set.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankFilter {
    pub tag: Option<Tag>,
    pub visibility: Option<Visibility>,
}
