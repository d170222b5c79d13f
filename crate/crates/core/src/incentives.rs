//! Append-only points ledger and the reputation derived from it.
//!
//! | kind           | points |
//! |----------------|--------|
//! | IdeaPublished  | 20     |
//! | ProjectCreated | 5      |
//! | TaskDone       | 3      |
//! | CommentPosted  | 2      |
//! | RatingCast     | 1      |

use std::collections::{BTreeMap, HashMap};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CommentId, EventId, IdeaId, ProjectId, TaskId, UserId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PointsKind {
    IdeaPublished,
    CommentPosted,
    RatingCast,
    ProjectCreated,
    TaskDone,
}

impl PointsKind {
    pub const ALL: [PointsKind; 5] = [
        PointsKind::IdeaPublished,
        PointsKind::CommentPosted,
        PointsKind::RatingCast,
        PointsKind::ProjectCreated,
        PointsKind::TaskDone,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointsTable {
    pub idea_published: u32,
    pub comment_posted: u32,
    pub rating_cast: u32,
    pub project_created: u32,
    pub task_done: u32,
}

impl Default for PointsTable {
    fn default() -> Self {
        PointsTable { idea_published: 20, comment_posted: 2, rating_cast: 1, project_created: 5, task_done: 3 }
    }
}

impl PointsTable {
    pub fn points(&self, kind: PointsKind) -> u32 {
        match kind {
            PointsKind::IdeaPublished => self.idea_published,
            PointsKind::CommentPosted => self.comment_posted,
            PointsKind::RatingCast => self.rating_cast,
            PointsKind::ProjectCreated => self.project_created,
            PointsKind::TaskDone => self.task_done,
        }
    }
}

/// The entity whose creation or completion triggered an award.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceRef {
    Idea(IdeaId),
    Comment(CommentId),
    Rating { idea_id: IdeaId, rater_id: UserId },
    Project(ProjectId),
    Task(TaskId),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointsEvent {
    pub event_id: EventId,
    pub user_id: UserId,
    pub kind: PointsKind,
    pub points: u32,
    pub source_ref: SourceRef,
    pub created_at: DateTime<Utc>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Ledger {
    table: PointsTable,
    events: Vec<PointsEvent>,
    by_source: HashMap<(PointsKind, SourceRef), usize>,
    totals: BTreeMap<UserId, u64>,
}

impl Ledger {
    pub fn new(table: PointsTable) -> Self {
        Ledger { table, ..Default::default() }
    }

    /// Rebuilds a ledger from stored events (sorted by id). Fails if an event
    /// carries the wrong amount for its kind or repeats a (kind, source).
    pub fn replay(table: PointsTable, events: impl IntoIterator<Item = PointsEvent>) -> Result<Self> {
        let mut events: Vec<_> = events.into_iter().collect();
        events.sort_by_key(|e| e.event_id);
        let mut ledger = Ledger::new(table);
        for e in events {
            if e.points != table.points(e.kind) {
                return Err(Error::CorruptRecord(format!("event {} has {} points for {:?}", e.event_id, e.points, e.kind)));
            }
            if ledger.by_source.contains_key(&(e.kind, e.source_ref)) {
                return Err(Error::CorruptRecord(format!("event {} repeats an award", e.event_id)));
            }
            ledger.push(e);
        }
        Ok(ledger)
    }

    fn push(&mut self, e: PointsEvent) {
        *self.totals.entry(e.user_id).or_insert(0) += u64::from(e.points);
        self.by_source.insert((e.kind, e.source_ref), self.events.len());
        self.events.push(e);
    }

    /// Appends an award unless the same (kind, source) was already paid, in
    /// which case the earlier event is returned. The flag says whether a new
    /// event was written.
    pub fn award(&mut self, user: UserId, kind: PointsKind, source: SourceRef, now: DateTime<Utc>) -> (&PointsEvent, bool) {
        if let Some(&i) = self.by_source.get(&(kind, source)) {
            return (&self.events[i], false);
        }
        let next = self.events.last().map_or(1, |e| e.event_id.0 + 1);
        self.push(PointsEvent {
            event_id: EventId(next),
            user_id: user,
            kind,
            points: self.table.points(kind),
            source_ref: source,
            created_at: now,
        });
        (self.events.last().expect("just pushed"), true)
    }

    pub fn events(&self) -> &[PointsEvent] {
        &self.events
    }

    pub fn event(&self, id: EventId) -> Option<&PointsEvent> {
        self.events.binary_search_by_key(&id, |e| e.event_id).ok().map(|i| &self.events[i])
    }

    pub fn reputation(&self, user: UserId) -> u64 {
        self.totals.get(&user).copied().unwrap_or(0)
    }

    pub fn total_points(&self) -> u64 {
        self.totals.values().sum()
    }
}

/// A leaderboard candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Standing {
    pub user_id: UserId,
    pub reputation: u64,
    pub created_at: DateTime<Utc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeaderboardEntry {
    pub user_id: UserId,
    pub reputation_points: u64,
}

/// Top `n` by reputation; ties go to the older account, then the lower id.
pub fn leaderboard(mut standings: Vec<Standing>, n: usize) -> Vec<LeaderboardEntry> {
    standings.sort_by(|a, b| {
        b.reputation
            .cmp(&a.reputation)
            .then(a.created_at.cmp(&b.created_at))
            .then(a.user_id.cmp(&b.user_id))
    });
    standings
        .into_iter()
        .take(n)
        .map(|s| LeaderboardEntry { user_id: s.user_id, reputation_points: s.reputation })
        .collect()
}
