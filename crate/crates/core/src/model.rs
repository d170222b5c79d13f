//! Persistent domain entities and their validity rules.

use std::collections::BTreeSet;
use std::fmt;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub u64);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt(f)
            }
        }

        impl From<u64> for $name {
            fn from(v: u64) -> Self {
                Self(v)
            }
        }
    };
}

id_type!(UserId);
id_type!(IdeaId);
id_type!(CommentId);
id_type!(ProjectId);
id_type!(TaskId);
id_type!(ReviewId);
id_type!(EventId);

/// One of the five fixed user groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct GroupId(u8);

impl GroupId {
    pub const ADMINISTRATORS: GroupId = GroupId(1);
    pub const CHIEF_EDITORS: GroupId = GroupId(2);
    pub const EDITORS: GroupId = GroupId(3);
    pub const VISITORS: GroupId = GroupId(4);
    pub const GUESTS: GroupId = GroupId(5);

    pub const ALL: [GroupId; 5] = [
        Self::ADMINISTRATORS,
        Self::CHIEF_EDITORS,
        Self::EDITORS,
        Self::VISITORS,
        Self::GUESTS,
    ];

    pub fn new(id: u8) -> Result<Self> {
        if (1..=5).contains(&id) {
            Ok(GroupId(id))
        } else {
            Err(Error::UnknownGroup)
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn name(self) -> &'static str {
        match self.0 {
            1 => "Administrators",
            2 => "Chief Editors",
            3 => "Editor",
            4 => "Visitors",
            _ => "Guests",
        }
    }

    /// Groups 1-3 may open the administration panel.
    pub fn has_admin_panel(self) -> bool {
        self.0 <= 3
    }
}

impl TryFrom<u8> for GroupId {
    type Error = Error;
    fn try_from(v: u8) -> Result<Self> {
        GroupId::new(v)
    }
}

impl From<GroupId> for u8 {
    fn from(g: GroupId) -> u8 {
        g.0
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserGroup {
    pub group_id: GroupId,
    pub name: String,
    pub admin_panel_access: bool,
}

/// Produces the five default groups. Fails if any group already exists.
pub fn seed_default_groups(existing: &[UserGroup]) -> Result<Vec<UserGroup>> {
    if !existing.is_empty() {
        return Err(Error::AlreadySeeded);
    }
    Ok(GroupId::ALL
        .iter()
        .map(|&g| UserGroup {
            group_id: g,
            name: g.name().to_owned(),
            admin_panel_access: g.has_admin_panel(),
        })
        .collect())
}

/// A normalized tag: lowercase letters, digits and hyphens.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Tag(String);

impl Tag {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Tag {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        normalize_tag(&raw).map_err(serde::de::Error::custom)
    }
}

fn fold_case(s: &str) -> String {
    // Upper-then-lower approximates full case folding (e.g. "ß" and "SS" agree).
    s.to_uppercase().to_lowercase()
}

fn normalize_once(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut in_space = false;
    for c in fold_case(raw.trim()).chars() {
        if c.is_whitespace() {
            in_space = true;
            continue;
        }
        if in_space {
            out.push('-');
            in_space = false;
        }
        if c.is_alphanumeric() || c == '-' {
            out.push(c);
        }
    }
    out
}

/// Normalizes a free-form tag.
///
/// Trims, case-folds, collapses each internal whitespace run into one hyphen
/// and keeps only letters, digits and hyphens. The result is a fixpoint:
/// normalizing it again returns it unchanged.
pub fn normalize_tag(raw: &str) -> Result<Tag> {
    let mut current = normalize_once(raw);
    // Case mappings of a handful of code points are not themselves stable;
    // iterate until nothing changes.
    for _ in 0..4 {
        let next = normalize_once(&current);
        if next == current {
            break;
        }
        current = next;
    }
    if current.is_empty() {
        return Err(Error::EmptyTag);
    }
    Ok(Tag(current))
}

pub fn normalize_tags<I, S>(raw: I) -> Result<BTreeSet<Tag>>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    raw.into_iter().map(|t| normalize_tag(t.as_ref())).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserAccount {
    pub user_id: UserId,
    pub display_name: String,
    pub email: String,
    pub group_id: GroupId,
    pub reputation_points: u64,
    pub interest_tags: BTreeSet<Tag>,
    pub created_at: DateTime<Utc>,
}

pub const DISPLAY_NAME_MAX: usize = 80;

pub fn validate_display_name(name: &str) -> Result<()> {
    let n = name.chars().count();
    if n == 0 || n > DISPLAY_NAME_MAX || name.trim().is_empty() {
        return Err(Error::InvalidInput(format!(
            "display_name must be 1 to {DISPLAY_NAME_MAX} characters"
        )));
    }
    Ok(())
}

/// Syntactic email check: one `@`, a non-empty local part, a dotted domain,
/// no whitespace or control characters.
pub fn validate_email(email: &str) -> Result<()> {
    let bad = || Error::InvalidInput(format!("malformed email address {email:?}"));
    if email.len() > 254 || email.chars().any(|c| c.is_whitespace() || c.is_control()) {
        return Err(bad());
    }
    let (local, domain) = email.split_once('@').ok_or_else(bad)?;
    if local.is_empty() || domain.contains('@') {
        return Err(bad());
    }
    let labels: Vec<&str> = domain.split('.').collect();
    if labels.len() < 2 || labels.iter().any(|l| l.is_empty()) {
        return Err(bad());
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub enum Visibility {
    #[default]
    Private,
    Team,
    Public,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum IdeaState {
    Draft,
    Submitted,
    Published,
    Rejected,
}

impl IdeaState {
    pub const ALL: [IdeaState; 4] = [
        IdeaState::Draft,
        IdeaState::Submitted,
        IdeaState::Published,
        IdeaState::Rejected,
    ];
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Idea {
    pub idea_id: IdeaId,
    pub author_id: UserId,
    pub title: String,
    pub body: String,
    pub tags: BTreeSet<Tag>,
    pub visibility: Visibility,
    pub state: IdeaState,
    pub rejection_reason: Option<String>,
    pub created_at: DateTime<Utc>,
    pub updated_at: DateTime<Utc>,
}

/// The four criterion scores one rater gives one idea.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scores {
    pub relevance: u8,
    pub feasibility: u8,
    pub originality: u8,
    pub impact: u8,
}

impl Scores {
    /// Range-checks raw integer input.
    pub fn new(relevance: i64, feasibility: i64, originality: i64, impact: i64) -> Result<Self> {
        let check = |v: i64| -> Result<u8> {
            if (1..=5).contains(&v) {
                Ok(v as u8)
            } else {
                Err(Error::ScoreOutOfRange(v))
            }
        };
        Ok(Scores {
            relevance: check(relevance)?,
            feasibility: check(feasibility)?,
            originality: check(originality)?,
            impact: check(impact)?,
        })
    }

    pub fn as_array(&self) -> [u8; 4] {
        [self.relevance, self.feasibility, self.originality, self.impact]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rating {
    pub idea_id: IdeaId,
    pub rater_id: UserId,
    #[serde(flatten)]
    pub scores: Scores,
    pub created_at: DateTime<Utc>,
}

pub const COMMENT_BODY_MAX: usize = 5_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comment {
    pub comment_id: CommentId,
    pub idea_id: IdeaId,
    pub author_id: UserId,
    pub parent_comment_id: Option<CommentId>,
    pub body: String,
    pub created_at: DateTime<Utc>,
}
