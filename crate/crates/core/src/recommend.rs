//! Content-based suggestions of related ideas and potential collaborators.
//!
//! Collaborator score between two users:
//! `w_tags * jaccard(interest tags) + w_interactions * jaccard(interaction sets)`,
//! where a user's interaction set holds every idea they authored, rated or
//! commented on. `jaccard(∅, ∅)` is 0 so that users with no data are never
//! recommended to everyone.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{GroupId, IdeaId, Tag, UserId};
use crate::search::SearchIndex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    ContentSimilarity,
    TagOverlap,
    CoInteraction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Subject {
    Idea { idea_id: IdeaId },
    User { user_id: UserId },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Suggestion {
    #[serde(flatten)]
    pub subject: Subject,
    pub score: f64,
    pub basis: Basis,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollaboratorWeights {
    pub tags: f64,
    pub interactions: f64,
}

impl Default for CollaboratorWeights {
    fn default() -> Self {
        CollaboratorWeights { tags: 0.5, interactions: 0.5 }
    }
}

impl CollaboratorWeights {
    pub fn validate(&self) -> Result<()> {
        let ok = self.tags >= 0.0 && self.interactions >= 0.0 && (self.tags + self.interactions - 1.0).abs() <= 1e-9;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput("collaborator weights must be non-negative and sum to 1".into()))
        }
    }
}

pub fn jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 0.0;
    }
    a.intersection(b).count() as f64 / union as f64
}

/// Everything the collaborator scorer knows about one user.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub user_id: UserId,
    pub group: GroupId,
    pub interest_tags: BTreeSet<Tag>,
    pub interactions: BTreeSet<IdeaId>,
}

/// Pairwise collaborator score. Symmetric in its arguments.
pub fn collaborator_score(a: &Profile, b: &Profile, weights: &CollaboratorWeights) -> f64 {
    weights.tags * jaccard(&a.interest_tags, &b.interest_tags)
        + weights.interactions * jaccard(&a.interactions, &b.interactions)
}

/// Top-`k` collaborators for `who` among `profiles`.
///
/// Excludes `who` itself, anyone in the Guests group and zero scores. Ties
/// go to the lower user id.
pub fn suggest_collaborators(
    who: &Profile,
    profiles: &[Profile],
    k: usize,
    weights: &CollaboratorWeights,
) -> Vec<Suggestion> {
    let mut scored: Vec<(UserId, f64, Basis)> = profiles
        .iter()
        .filter(|p| p.user_id != who.user_id && p.group != GroupId::GUESTS)
        .filter_map(|p| {
            let tag_part = weights.tags * jaccard(&who.interest_tags, &p.interest_tags);
            let int_part = weights.interactions * jaccard(&who.interactions, &p.interactions);
            let score = tag_part + int_part;
            let basis = if int_part > tag_part { Basis::CoInteraction } else { Basis::TagOverlap };
            (score > 0.0).then_some((p.user_id, score, basis))
        })
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    scored
        .into_iter()
        .take(k)
        .map(|(user_id, score, basis)| Suggestion { subject: Subject::User { user_id }, score, basis })
        .collect()
}

/// Top-`k` published ideas most similar to `idea_id` by TF-IDF cosine.
pub fn similar_ideas(
    index: &SearchIndex,
    idea_id: IdeaId,
    k: usize,
    visible: impl Fn(IdeaId) -> bool,
) -> Result<Vec<Suggestion>> {
    Ok(index
        .similar(idea_id, k, visible)?
        .into_iter()
        .map(|(id, score)| Suggestion {
            subject: Subject::Idea { idea_id: id },
            score,
            basis: Basis::ContentSimilarity,
        })
        .collect())
}
