//! Idea state machine and the validation gate in front of moderation.
//!
//! ```text
//!   Draft --submit--> Submitted --publish--> Published
//!                       ^    \
//!            resubmit   |     `--reject--> Rejected
//!                       `--------------------'
//! ```
//!
//! Invalid submissions never become entities; `Rejected` is reserved for
//! moderator decisions that carry a reason.

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{IdeaId, IdeaState, ReviewId, UserId};
use crate::search::{DraftText, SearchIndex, Threshold};

pub const TITLE_MIN: usize = 3;
pub const TITLE_MAX: usize = 200;
pub const BODY_MIN: usize = 20;
pub const BODY_MAX: usize = 20_000;
pub const TAGS_MAX: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FailureCode {
    TitleLength,
    BodyLength,
    TagCount,
    NearDuplicate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationFailure {
    pub code: FailureCode,
    pub detail: String,
    pub duplicate_of: Option<IdeaId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub failures: Vec<ValidationFailure>,
}

impl ValidationReport {
    fn from_failures(failures: Vec<ValidationFailure>) -> Self {
        ValidationReport { valid: failures.is_empty(), failures }
    }

    pub fn has(&self, code: FailureCode) -> bool {
        self.failures.iter().any(|f| f.code == code)
    }
}

fn length_failure(code: FailureCode, what: &str, len: usize, min: usize, max: usize) -> Option<ValidationFailure> {
    (len < min || len > max).then(|| ValidationFailure {
        code,
        detail: format!("{what} has {len} characters; allowed {min} to {max}"),
        duplicate_of: None,
    })
}

/// The field bounds alone, without the corpus check. Drafts must satisfy these.
pub fn check_bounds(draft: DraftText<'_>) -> Vec<ValidationFailure> {
    let mut failures = Vec::new();
    failures.extend(length_failure(
        FailureCode::TitleLength,
        "title",
        draft.title.chars().count(),
        TITLE_MIN,
        TITLE_MAX,
    ));
    failures.extend(length_failure(
        FailureCode::BodyLength,
        "body",
        draft.body.chars().count(),
        BODY_MIN,
        BODY_MAX,
    ));
    if draft.tags.len() > TAGS_MAX {
        failures.push(ValidationFailure {
            code: FailureCode::TagCount,
            detail: format!("{} tags; at most {TAGS_MAX} allowed", draft.tags.len()),
            duplicate_of: None,
        });
    }
    failures
}

/// Runs every rule and reports all violations, in rule order.
///
/// `exclude` skips one idea during the duplicate check (an idea never
/// duplicates itself).
pub fn validate_idea(
    draft: DraftText<'_>,
    corpus: &SearchIndex,
    threshold: Threshold,
    exclude: Option<IdeaId>,
) -> ValidationReport {
    let mut failures = check_bounds(draft);
    for (id, similarity) in corpus.find_duplicates(draft, threshold) {
        if Some(id) == exclude {
            continue;
        }
        failures.push(ValidationFailure {
            code: FailureCode::NearDuplicate,
            detail: format!("similarity {similarity:.3} with idea {id} (threshold {})", threshold.get()),
            duplicate_of: Some(id),
        });
    }
    ValidationReport::from_failures(failures)
}

/// The edges of the lifecycle machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Transition {
    Submit,
    Publish,
    Reject,
    Resubmit,
}

impl Transition {
    pub const ALL: [Transition; 4] =
        [Transition::Submit, Transition::Publish, Transition::Reject, Transition::Resubmit];

    pub fn verb(self) -> &'static str {
        match self {
            Transition::Submit => "submit",
            Transition::Publish => "publish",
            Transition::Reject => "reject",
            Transition::Resubmit => "resubmit",
        }
    }
}

/// The only legal (from, to) pairs.
pub const LEGAL_EDGES: [(IdeaState, IdeaState); 4] = [
    (IdeaState::Draft, IdeaState::Submitted),
    (IdeaState::Submitted, IdeaState::Published),
    (IdeaState::Submitted, IdeaState::Rejected),
    (IdeaState::Rejected, IdeaState::Submitted),
];

pub fn is_legal_edge(from: IdeaState, to: IdeaState) -> bool {
    LEGAL_EDGES.contains(&(from, to))
}

/// Applies `transition` to an idea believed to be in `expected`.
///
/// Behaves as a compare-and-swap: a mismatch between `expected` and `actual`
/// fails with `InvalidState` exactly like an illegal edge.
pub fn apply(actual: IdeaState, expected: IdeaState, transition: Transition) -> Result<IdeaState> {
    use IdeaState::*;
    let invalid = || Error::InvalidState { from: actual, operation: transition.verb() };
    if actual != expected {
        return Err(invalid());
    }
    match (actual, transition) {
        (Draft, Transition::Submit) => Ok(Submitted),
        (Submitted, Transition::Publish) => Ok(Published),
        (Submitted, Transition::Reject) => Ok(Rejected),
        (Rejected, Transition::Resubmit) => Ok(Submitted),
        _ => Err(invalid()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReviewOutcome {
    Publish,
    Reject,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReviewDecision {
    pub review_id: ReviewId,
    pub idea_id: IdeaId,
    pub reviewer_id: UserId,
    pub outcome: ReviewOutcome,
    pub reason: Option<String>,
    pub decided_at: DateTime<Utc>,
}
