//! Domain model and algorithms of the ideaforge idea-management platform.
//!
//! The [`Platform`] type owns every entity and exposes one method per
//! operation. The modules it delegates to are usable on their own:
//!
//! - [`lifecycle`]: validation gate and the idea state machine
//! - [`search`]: tokenizer, BM25F-style ranking and TF-IDF duplicate detection
//! - [`feedback`]: smoothed rating aggregation and the ranking order
//! - [`recommend`]: similar ideas and collaborator suggestions
//! - [`access`]: permission matrix and visibility
//! - [`collaboration`]: projects, members and tasks
//! - [`incentives`]: points ledger and leaderboard

pub mod access;
pub mod clock;
pub mod collaboration;
pub mod config;
pub mod error;
pub mod feedback;
pub mod incentives;
pub mod lifecycle;
pub mod model;
pub mod platform;
pub mod recommend;
pub mod search;

pub use clock::{Clock, ManualClock, SystemClock};
pub use config::PlatformConfig;
pub use error::{Error, ErrorKind, Result};
pub use model::*;
pub use platform::{EntityKey, IdeaEdits, NewIdea, NewUser, Platform};
