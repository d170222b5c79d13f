use thiserror::Error;

use crate::lifecycle::ValidationReport;
use crate::model::IdeaState;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure a platform operation can report.
///
/// Variants are grouped loosely by the HTTP status the service maps them to;
/// see [`Error::kind`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("tag is empty after normalization")]
    EmptyTag,
    #[error("default groups already seeded")]
    AlreadySeeded,
    #[error("permission denied: {0}")]
    PermissionDenied(String),
    #[error("idea failed validation")]
    ValidationFailed(ValidationReport),
    #[error("invalid state: cannot {operation} an idea in state {from:?}")]
    InvalidState { from: IdeaState, operation: &'static str },
    #[error("a reason is required when rejecting an idea")]
    MissingReason,
    #[error("authors cannot rate their own ideas")]
    SelfRating,
    #[error("score {0} out of range 1..=5")]
    ScoreOutOfRange(i64),
    #[error("idea is not published")]
    IdeaNotPublished,
    #[error("parent comment must be a top-level comment on the same idea")]
    BadParent,
    #[error("comment body must be 1 to 5000 characters")]
    BodyLength,
    #[error("project owner must transfer ownership before leaving")]
    OwnerMustTransfer,
    #[error("user is already a project member")]
    AlreadyMember,
    #[error("user is not a project member")]
    NotMember,
    #[error("illegal task status transition {from:?} -> {to:?}")]
    IllegalTransition {
        from: crate::collaboration::TaskStatus,
        to: crate::collaboration::TaskStatus,
    },
    #[error("task assignee must be a project member")]
    AssigneeNotMember,
    #[error("email address already registered")]
    EmailTaken,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unknown user")]
    UnknownUser,
    #[error("unknown idea")]
    UnknownIdea,
    #[error("unknown comment")]
    UnknownComment,
    #[error("unknown project")]
    UnknownProject,
    #[error("unknown task")]
    UnknownTask,
    #[error("unknown points source")]
    UnknownSource,
    #[error("unknown group")]
    UnknownGroup,
    #[error("stored record is malformed: {0}")]
    CorruptRecord(String),
}

/// Coarse classification used by transport layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Forbidden,
    NotFound,
    Conflict,
    Unprocessable,
    Internal,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            PermissionDenied(_) | SelfRating => ErrorKind::Forbidden,
            UnknownUser | UnknownIdea | UnknownComment | UnknownProject | UnknownTask
            | UnknownSource | UnknownGroup => ErrorKind::NotFound,
            InvalidState { .. } | IdeaNotPublished | OwnerMustTransfer | AlreadyMember
            | NotMember | IllegalTransition { .. } | EmailTaken | AlreadySeeded => {
                ErrorKind::Conflict
            }
            ValidationFailed(_) | MissingReason | ScoreOutOfRange(_) | BadParent
            | BodyLength | AssigneeNotMember | EmptyTag | InvalidInput(_) => {
                ErrorKind::Unprocessable
            }
            CorruptRecord(_) => ErrorKind::Internal,
        }
    }

    /// Stable machine-readable code, used as the `error` field of API responses.
    pub fn code(&self) -> &'static str {
        use Error::*;
        match self {
            EmptyTag => "EmptyTag",
            AlreadySeeded => "AlreadySeeded",
            PermissionDenied(_) => "PermissionDenied",
            ValidationFailed(_) => "ValidationFailed",
            InvalidState { .. } => "InvalidState",
            MissingReason => "MissingReason",
            SelfRating => "SelfRating",
            ScoreOutOfRange(_) => "ScoreOutOfRange",
            IdeaNotPublished => "IdeaNotPublished",
            BadParent => "BadParent",
            BodyLength => "BodyLength",
            OwnerMustTransfer => "OwnerMustTransfer",
            AlreadyMember => "AlreadyMember",
            NotMember => "NotMember",
            IllegalTransition { .. } => "IllegalTransition",
            AssigneeNotMember => "AssigneeNotMember",
            EmailTaken => "EmailTaken",
            InvalidInput(_) => "InvalidInput",
            UnknownUser => "UnknownUser",
            UnknownIdea => "UnknownIdea",
            UnknownComment => "UnknownComment",
            UnknownProject => "UnknownProject",
            UnknownTask => "UnknownTask",
            UnknownSource => "UnknownSource",
            UnknownGroup => "UnknownGroup",
            CorruptRecord(_) => "CorruptRecord",
        }
    }
}
