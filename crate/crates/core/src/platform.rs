//! The platform: every entity, every operation, one consistent state.
//!
//! Each operation resolves the caller into a [`Principal`], consults the
//! permission matrix and visibility rules, then delegates to the module that
//! owns the rule being exercised. Mutations record the [`EntityKey`]s they
//! touch; a persistence layer drains them with [`Platform::take_changes`] and
//! reads the new payloads back with [`Platform::record`].

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::access::{self, Action, PermissionMatrix, Principal, Resource};
use crate::clock::Clock;
use crate::collaboration::{Board, Project, Task, TaskFields, TaskStatus};
use crate::config::PlatformConfig;
use crate::error::{Error, Result};
use crate::feedback::{self, AggregateScore, RankFilter, Ranked};
use crate::incentives::{self, LeaderboardEntry, Ledger, PointsEvent, PointsKind, SourceRef, Standing};
use crate::lifecycle::{self, ReviewDecision, ReviewOutcome, Transition, ValidationReport};
use crate::model::*;
use crate::recommend::{self, Profile, Suggestion};
use crate::search::{DraftText, QueryResult, SearchIndex};

/// Identifies one persisted entity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntityKey {
    Group(GroupId),
    User(UserId),
    Idea(IdeaId),
    Review(ReviewId),
    Rating(IdeaId, UserId),
    Comment(CommentId),
    Project(ProjectId),
    Task(TaskId),
    Points(EventId),
}

impl EntityKey {
    pub const KINDS: [&'static str; 9] =
        ["group", "user", "idea", "review", "rating", "comment", "project", "task", "points"];

    pub fn kind(&self) -> &'static str {
        match self {
            EntityKey::Group(_) => "group",
            EntityKey::User(_) => "user",
            EntityKey::Idea(_) => "idea",
            EntityKey::Review(_) => "review",
            EntityKey::Rating(..) => "rating",
            EntityKey::Comment(_) => "comment",
            EntityKey::Project(_) => "project",
            EntityKey::Task(_) => "task",
            EntityKey::Points(_) => "points",
        }
    }

    pub fn id(&self) -> String {
        match self {
            EntityKey::Group(g) => g.to_string(),
            EntityKey::User(u) => u.to_string(),
            EntityKey::Idea(i) => i.to_string(),
            EntityKey::Review(r) => r.to_string(),
            EntityKey::Rating(i, u) => format!("{i}:{u}"),
            EntityKey::Comment(c) => c.to_string(),
            EntityKey::Project(p) => p.to_string(),
            EntityKey::Task(t) => t.to_string(),
            EntityKey::Points(e) => e.to_string(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewUser {
    pub display_name: String,
    pub email: String,
    #[serde(default)]
    pub interest_tags: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewIdea {
    pub title: String,
    pub body: String,
    #[serde(default)]
    pub tags: Vec<String>,
    #[serde(default)]
    pub visibility: Option<Visibility>,
}

/// Replacement fields for a draft or rejected idea; `None` keeps the old value.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdeaEdits {
    #[serde(default)]
    pub title: Option<String>,
    #[serde(default)]
    pub body: Option<String>,
    #[serde(default)]
    pub tags: Option<Vec<String>>,
    #[serde(default)]
    pub visibility: Option<Visibility>,
}

pub struct Platform {
    config: PlatformConfig,
    matrix: PermissionMatrix,
    clock: Arc<dyn Clock>,
    groups: Vec<UserGroup>,
    users: BTreeMap<UserId, UserAccount>,
    ideas: BTreeMap<IdeaId, Idea>,
    reviews: BTreeMap<ReviewId, ReviewDecision>,
    ratings: BTreeMap<(IdeaId, UserId), Rating>,
    comments: BTreeMap<CommentId, Comment>,
    board: Board,
    ledger: Ledger,
    index: SearchIndex,
    changes: BTreeSet<EntityKey>,
}

impl std::fmt::Debug for Platform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Platform")
            .field("users", &self.users.len())
            .field("ideas", &self.ideas.len())
            .field("indexed", &self.index.len())
            .finish_non_exhaustive()
    }
}

fn next_id<K: Copy + Into<u64>, V>(map: &BTreeMap<K, V>) -> u64 {
    map.keys().last().map_or(1, |&k| k.into() + 1)
}

macro_rules! into_u64 {
    ($($t:ty),*) => {$(impl From<$t> for u64 { fn from(v: $t) -> u64 { v.0 } })*};
}
into_u64!(UserId, IdeaId, ReviewId, CommentId);

impl Platform {
    /// An empty platform with the default groups seeded.
    pub fn new(config: PlatformConfig, clock: Arc<dyn Clock>) -> Result<Self> {
        config.validate()?;
        let mut p = Platform {
            index: SearchIndex::new(config.bm25),
            ledger: Ledger::new(config.points),
            config,
            matrix: PermissionMatrix::default(),
            clock,
            groups: Vec::new(),
            users: BTreeMap::new(),
            ideas: BTreeMap::new(),
            reviews: BTreeMap::new(),
            ratings: BTreeMap::new(),
            comments: BTreeMap::new(),
            board: Board::default(),
            changes: BTreeSet::new(),
        };
        p.seed_default_groups()?;
        Ok(p)
    }

    pub fn config(&self) -> &PlatformConfig {
        &self.config
    }

    pub fn matrix(&self) -> &PermissionMatrix {
        &self.matrix
    }

    pub fn now(&self) -> DateTime<Utc> {
        self.clock.now()
    }

    pub fn seed_default_groups(&mut self) -> Result<Vec<UserGroup>> {
        let groups = seed_default_groups(&self.groups)?;
        for g in &groups {
            self.changes.insert(EntityKey::Group(g.group_id));
        }
        self.groups = groups.clone();
        Ok(groups)
    }

    pub fn groups(&self) -> &[UserGroup] {
        &self.groups
    }

    // ---------------------------------------------------------------------
    // principals and permissions
    // ---------------------------------------------------------------------

    pub fn principal(&self, actor: Option<UserId>) -> Result<Principal> {
        match actor {
            None => Ok(Principal::guest()),
            Some(id) => {
                let u = self.users.get(&id).ok_or(Error::UnknownUser)?;
                Ok(Principal::user(id, u.group_id))
            }
        }
    }

    fn on_team(&self, idea: IdeaId, who: &Principal) -> bool {
        who.user_id.is_some_and(|u| self.board.is_team_member(idea, u))
    }

    pub fn is_visible(&self, idea: &Idea, who: &Principal) -> bool {
        access::visible_to(idea, who, self.on_team(idea.idea_id, who))
    }

    fn require(&self, who: &Principal, action: Action, idea: Option<&Idea>) -> Result<()> {
        let resource = idea.map(|i| Resource::Idea { idea: i, on_team: self.on_team(i.idea_id, who) });
        let d = access::can(&self.matrix, who, action, resource);
        if d.allowed {
            Ok(())
        } else {
            Err(Error::PermissionDenied(d.reason))
        }
    }

    fn acting_user(who: &Principal) -> UserId {
        who.user_id.expect("non-read actions require an account")
    }

    /// Matrix check, then existence, then published state, then visibility.
    fn published_idea_for(&self, who: &Principal, action: Action, id: IdeaId) -> Result<&Idea> {
        self.require(who, action, None)?;
        let idea = self.ideas.get(&id).ok_or(Error::UnknownIdea)?;
        if idea.state != IdeaState::Published {
            return Err(Error::IdeaNotPublished);
        }
        self.require(who, action, Some(idea))?;
        Ok(idea)
    }

    // ---------------------------------------------------------------------
    // users
    // ---------------------------------------------------------------------

    pub fn register_user(&mut self, new: NewUser) -> Result<UserAccount> {
        self.register_user_in_group(new, GroupId::VISITORS)
    }

    pub fn register_user_in_group(&mut self, new: NewUser, group: GroupId) -> Result<UserAccount> {
        validate_display_name(&new.display_name)?;
        validate_email(&new.email)?;
        if self.find_user_by_email(&new.email).is_some() {
            return Err(Error::EmailTaken);
        }
        let interest_tags = normalize_tags(&new.interest_tags)?;
        let user = UserAccount {
            user_id: UserId(next_id(&self.users)),
            display_name: new.display_name,
            email: new.email,
            group_id: group,
            reputation_points: 0,
            interest_tags,
            created_at: self.now(),
        };
        self.changes.insert(EntityKey::User(user.user_id));
        self.users.insert(user.user_id, user.clone());
        Ok(user)
    }

    /// Case-insensitive on the whole address.
    pub fn find_user_by_email(&self, email: &str) -> Option<&UserAccount> {
        self.users.values().find(|u| u.email.eq_ignore_ascii_case(email))
    }

    pub fn user(&self, id: UserId) -> Result<&UserAccount> {
        self.users.get(&id).ok_or(Error::UnknownUser)
    }

    pub fn users(&self) -> impl Iterator<Item = &UserAccount> {
        self.users.values()
    }

    pub fn list_users(&self, actor: Option<UserId>) -> Result<Vec<UserAccount>> {
        let who = self.principal(actor)?;
        self.require(&who, Action::AccessAdminPanel, None)?;
        Ok(self.users.values().cloned().collect())
    }

    pub fn set_user_group(&mut self, actor: Option<UserId>, user: UserId, group: GroupId) -> Result<UserAccount> {
        let who = self.principal(actor)?;
        self.require(&who, Action::ManageUsers, None)?;
        let u = self.users.get_mut(&user).ok_or(Error::UnknownUser)?;
        u.group_id = group;
        self.changes.insert(EntityKey::User(user));
        Ok(u.clone())
    }

    // ---------------------------------------------------------------------
    // lifecycle
    // ---------------------------------------------------------------------

    fn validate(&self, title: &str, body: &str, tags: &BTreeSet<Tag>, exclude: Option<IdeaId>) -> ValidationReport {
        lifecycle::validate_idea(
            DraftText { title, body, tags },
            &self.index,
            self.config.duplicate_threshold,
            exclude,
        )
    }

    /// Validates against the current published corpus without storing anything.
    pub fn validate_idea(&self, title: &str, body: &str, tags: &BTreeSet<Tag>) -> ValidationReport {
        self.validate(title, body, tags, None)
    }

    fn store_new_idea(&mut self, author: UserId, new: NewIdea, tags: BTreeSet<Tag>, state: IdeaState) -> Idea {
        let now = self.now();
        let idea = Idea {
            idea_id: IdeaId(next_id(&self.ideas)),
            author_id: author,
            title: new.title,
            body: new.body,
            tags,
            visibility: new.visibility.unwrap_or_default(),
            state,
            rejection_reason: None,
            created_at: now,
            updated_at: now,
        };
        self.changes.insert(EntityKey::Idea(idea.idea_id));
        self.ideas.insert(idea.idea_id, idea.clone());
        idea
    }

    /// Validates and, when valid, stores the idea as Submitted (in the
    /// moderation queue). Invalid ideas are not stored.
    pub fn submit_idea(&mut self, actor: Option<UserId>, new: NewIdea) -> Result<Idea> {
        let who = self.principal(actor)?;
        self.require(&who, Action::SubmitIdea, None)?;
        let tags = normalize_tags(&new.tags)?;
        let report = self.validate(&new.title, &new.body, &tags, None);
        if !report.valid {
            return Err(Error::ValidationFailed(report));
        }
        Ok(self.store_new_idea(Self::acting_user(&who), new, tags, IdeaState::Submitted))
    }

    /// Stores work in progress. Field bounds apply; the duplicate check waits
    /// until submission.
    pub fn save_draft(&mut self, actor: Option<UserId>, new: NewIdea) -> Result<Idea> {
        let who = self.principal(actor)?;
        self.require(&who, Action::SubmitIdea, None)?;
        let tags = normalize_tags(&new.tags)?;
        let failures = lifecycle::check_bounds(DraftText { title: &new.title, body: &new.body, tags: &tags });
        if !failures.is_empty() {
            return Err(Error::ValidationFailed(ValidationReport { valid: false, failures }));
        }
        Ok(self.store_new_idea(Self::acting_user(&who), new, tags, IdeaState::Draft))
    }

    /// Applies edits to a Draft or Rejected idea and moves it to Submitted.
    pub fn resubmit_idea(&mut self, actor: Option<UserId>, id: IdeaId, edits: IdeaEdits) -> Result<Idea> {
        let who = self.principal(actor)?;
        self.require(&who, Action::SubmitIdea, None)?;
        let current = self.ideas.get(&id).ok_or(Error::UnknownIdea)?;
        if who.user_id != Some(current.author_id) {
            return Err(Error::PermissionDenied("only the author may resubmit an idea".into()));
        }
        let transition = match current.state {
            IdeaState::Draft => Transition::Submit,
            _ => Transition::Resubmit,
        };
        let next_state = lifecycle::apply(current.state, current.state, transition)?;

        let mut edited = current.clone();
        if let Some(t) = edits.title {
            edited.title = t;
        }
        if let Some(b) = edits.body {
            edited.body = b;
        }
        if let Some(tags) = edits.tags {
            edited.tags = normalize_tags(&tags)?;
        }
        if let Some(v) = edits.visibility {
            edited.visibility = v;
        }
        let report = self.validate(&edited.title, &edited.body, &edited.tags, Some(id));
        if !report.valid {
            return Err(Error::ValidationFailed(report));
        }
        edited.state = next_state;
        edited.rejection_reason = None;
        edited.updated_at = self.now().max(edited.created_at);
        self.changes.insert(EntityKey::Idea(id));
        self.ideas.insert(id, edited.clone());
        Ok(edited)
    }

    pub fn moderation_queue(&self, actor: Option<UserId>) -> Result<Vec<Idea>> {
        let who = self.principal(actor)?;
        self.require(&who, Action::ModerateIdeas, None)?;
        let mut q: Vec<Idea> = self.ideas.values().filter(|i| i.state == IdeaState::Submitted).cloned().collect();
        q.sort_by_key(|i| (i.updated_at, i.idea_id));
        Ok(q)
    }

    /// Moderator decision on a Submitted idea.
    pub fn review_idea(
        &mut self,
        actor: Option<UserId>,
        id: IdeaId,
        outcome: ReviewOutcome,
        reason: Option<String>,
    ) -> Result<ReviewDecision> {
        let who = self.principal(actor)?;
        self.require(&who, Action::ModerateIdeas, None)?;
        let idea = self.ideas.get(&id).ok_or(Error::UnknownIdea)?;
        let transition = match outcome {
            ReviewOutcome::Publish => Transition::Publish,
            ReviewOutcome::Reject => Transition::Reject,
        };
        let next_state = lifecycle::apply(idea.state, IdeaState::Submitted, transition)?;
        let reason = reason.filter(|r| !r.trim().is_empty());
        if outcome == ReviewOutcome::Reject && reason.is_none() {
            return Err(Error::MissingReason);
        }

        let now = self.now();
        let author = idea.author_id;
        let idea = self.ideas.get_mut(&id).expect("checked above");
        idea.state = next_state;
        idea.updated_at = now.max(idea.created_at);
        idea.rejection_reason = match outcome {
            ReviewOutcome::Reject => reason.clone(),
            ReviewOutcome::Publish => None,
        };
        let snapshot = idea.clone();
        self.changes.insert(EntityKey::Idea(id));
        if outcome == ReviewOutcome::Publish {
            self.index.index_idea(&snapshot)?;
            self.award(author, PointsKind::IdeaPublished, SourceRef::Idea(id))?;
        }
        let decision = ReviewDecision {
            review_id: ReviewId(next_id(&self.reviews)),
            idea_id: id,
            reviewer_id: Self::acting_user(&who),
            outcome,
            reason,
            decided_at: now,
        };
        self.changes.insert(EntityKey::Review(decision.review_id));
        self.reviews.insert(decision.review_id, decision.clone());
        Ok(decision)
    }

    pub fn reviews(&self) -> impl Iterator<Item = &ReviewDecision> {
        self.reviews.values()
    }

    /// The idea if the caller may read it; invisible ideas look unknown.
    pub fn get_idea(&self, actor: Option<UserId>, id: IdeaId) -> Result<&Idea> {
        let who = self.principal(actor)?;
        let idea = self.ideas.get(&id).ok_or(Error::UnknownIdea)?;
        if !self.is_visible(idea, &who) {
            return Err(Error::UnknownIdea);
        }
        Ok(idea)
    }

    pub fn idea(&self, id: IdeaId) -> Result<&Idea> {
        self.ideas.get(&id).ok_or(Error::UnknownIdea)
    }

    pub fn ideas(&self) -> impl Iterator<Item = &Idea> {
        self.ideas.values()
    }

    pub fn set_visibility(&mut self, actor: Option<UserId>, id: IdeaId, level: Visibility) -> Result<Idea> {
        let who = self.principal(actor)?;
        let idea = self.ideas.get(&id).ok_or(Error::UnknownIdea)?;
        self.require(&who, Action::SetVisibility, Some(idea))?;
        let now = self.now();
        let idea = self.ideas.get_mut(&id).expect("checked above");
        idea.visibility = level;
        idea.updated_at = now.max(idea.created_at);
        self.changes.insert(EntityKey::Idea(id));
        Ok(idea.clone())
    }

    // ---------------------------------------------------------------------
    // feedback
    // ---------------------------------------------------------------------

    pub fn rate_idea(&mut self, actor: Option<UserId>, id: IdeaId, scores: Scores) -> Result<Rating> {
        let who = self.principal(actor)?;
        let idea = self.published_idea_for(&who, Action::RateIdea, id)?;
        let rater = Self::acting_user(&who);
        if idea.author_id == rater {
            return Err(Error::SelfRating);
        }
        let rating = Rating { idea_id: id, rater_id: rater, scores, created_at: self.now() };
        self.ratings.insert((id, rater), rating.clone());
        self.changes.insert(EntityKey::Rating(id, rater));
        self.award(rater, PointsKind::RatingCast, SourceRef::Rating { idea_id: id, rater_id: rater })?;
        Ok(rating)
    }

    pub fn ratings(&self) -> impl Iterator<Item = &Rating> {
        self.ratings.values()
    }

    pub fn comment_on_idea(
        &mut self,
        actor: Option<UserId>,
        id: IdeaId,
        body: String,
        parent: Option<CommentId>,
    ) -> Result<Comment> {
        let who = self.principal(actor)?;
        self.published_idea_for(&who, Action::CommentIdea, id)?;
        let len = body.chars().count();
        if len == 0 || len > COMMENT_BODY_MAX || body.trim().is_empty() {
            return Err(Error::BodyLength);
        }
        if let Some(pid) = parent {
            let ok = self
                .comments
                .get(&pid)
                .is_some_and(|p| p.idea_id == id && p.parent_comment_id.is_none());
            if !ok {
                return Err(Error::BadParent);
            }
        }
        let author = Self::acting_user(&who);
        let comment = Comment {
            comment_id: CommentId(next_id(&self.comments)),
            idea_id: id,
            author_id: author,
            parent_comment_id: parent,
            body,
            created_at: self.now(),
        };
        self.changes.insert(EntityKey::Comment(comment.comment_id));
        self.comments.insert(comment.comment_id, comment.clone());
        self.award(author, PointsKind::CommentPosted, SourceRef::Comment(comment.comment_id))?;
        Ok(comment)
    }

    pub fn comments_for(&self, actor: Option<UserId>, id: IdeaId) -> Result<Vec<Comment>> {
        self.get_idea(actor, id)?;
        Ok(self.comments.values().filter(|c| c.idea_id == id).cloned().collect())
    }

    pub fn comments(&self) -> impl Iterator<Item = &Comment> {
        self.comments.values()
    }

    pub fn comment_count(&self, id: IdeaId) -> usize {
        self.comments.values().filter(|c| c.idea_id == id).count()
    }

    pub fn aggregate(&self, id: IdeaId) -> Result<AggregateScore> {
        if !self.ideas.contains_key(&id) {
            return Err(Error::UnknownIdea);
        }
        let ratings = self.ratings.range((id, UserId(0))..=(id, UserId(u64::MAX))).map(|(_, r)| r);
        Ok(feedback::aggregate(id, ratings, &self.config.smoothing, &self.config.criterion_weights))
    }

    /// Visible published ideas, best first.
    pub fn rank_ideas(&self, actor: Option<UserId>, filter: &RankFilter) -> Result<Vec<Ranked>> {
        let who = self.principal(actor)?;
        let candidates = self
            .ideas
            .values()
            .filter(|i| i.state == IdeaState::Published && self.is_visible(i, &who))
            .filter(|i| filter.tag.as_ref().is_none_or(|t| i.tags.contains(t)))
            .filter(|i| filter.visibility.is_none_or(|v| i.visibility == v))
            .map(|i| {
                Ok(Ranked { idea_id: i.idea_id, created_at: i.created_at, score: self.aggregate(i.idea_id)? })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(feedback::rank(candidates))
    }

    pub fn best_idea(&self, actor: Option<UserId>) -> Result<Option<Ranked>> {
        Ok(self.rank_ideas(actor, &RankFilter::default())?.into_iter().next())
    }

    // ---------------------------------------------------------------------
    // search and recommendations
    // ---------------------------------------------------------------------

    pub fn index(&self) -> &SearchIndex {
        &self.index
    }

    pub fn search(&self, actor: Option<UserId>, query: &str, limit: usize) -> Result<Vec<QueryResult>> {
        if limit == 0 {
            return Err(Error::InvalidInput("limit must be at least 1".into()));
        }
        let who = self.principal(actor)?;
        Ok(self.index.search(query, limit, |id| self.ideas.get(&id).is_some_and(|i| self.is_visible(i, &who))))
    }

    pub fn similar_ideas(&self, actor: Option<UserId>, id: IdeaId, k: usize) -> Result<Vec<Suggestion>> {
        if k == 0 {
            return Err(Error::InvalidInput("k must be at least 1".into()));
        }
        let who = self.principal(actor)?;
        let idea = self.get_idea(actor, id)?;
        if idea.state != IdeaState::Published {
            return Err(Error::IdeaNotPublished);
        }
        recommend::similar_ideas(&self.index, id, k, |other| {
            self.ideas.get(&other).is_some_and(|i| self.is_visible(i, &who))
        })
    }

    /// Collaborator profile: interest tags plus every idea authored, rated or commented on.
    pub fn profile(&self, user: UserId) -> Result<Profile> {
        let u = self.user(user)?;
        let mut interactions: BTreeSet<IdeaId> =
            self.ideas.values().filter(|i| i.author_id == user).map(|i| i.idea_id).collect();
        interactions.extend(self.ratings.keys().filter(|(_, r)| *r == user).map(|(i, _)| *i));
        interactions.extend(self.comments.values().filter(|c| c.author_id == user).map(|c| c.idea_id));
        Ok(Profile { user_id: user, group: u.group_id, interest_tags: u.interest_tags.clone(), interactions })
    }

    pub fn suggest_collaborators(&self, user: UserId, k: usize) -> Result<Vec<Suggestion>> {
        if k == 0 {
            return Err(Error::InvalidInput("k must be at least 1".into()));
        }
        let me = self.profile(user)?;
        let all = self.users.keys().map(|&u| self.profile(u)).collect::<Result<Vec<_>>>()?;
        Ok(recommend::suggest_collaborators(&me, &all, k, &self.config.collaborator_weights))
    }

    // ---------------------------------------------------------------------
    // collaboration
    // ---------------------------------------------------------------------

    pub fn board(&self) -> &Board {
        &self.board
    }

    pub fn create_project(&mut self, actor: Option<UserId>, idea: IdeaId, name: &str) -> Result<Project> {
        let who = self.principal(actor)?;
        self.published_idea_for(&who, Action::CreateProject, idea)?;
        let owner = Self::acting_user(&who);
        let now = self.now();
        let project = self.board.create(owner, idea, name, now)?.clone();
        self.changes.insert(EntityKey::Project(project.project_id));
        self.award(owner, PointsKind::ProjectCreated, SourceRef::Project(project.project_id))?;
        Ok(project)
    }

    fn project_for(&self, who: &Principal, project: ProjectId) -> Result<&Project> {
        let p = self.board.project(project)?;
        let idea = self.idea(p.idea_id)?;
        if !self.is_visible(idea, who) {
            return Err(Error::UnknownProject);
        }
        Ok(p)
    }

    pub fn project(&self, actor: Option<UserId>, project: ProjectId) -> Result<&Project> {
        let who = self.principal(actor)?;
        self.project_for(&who, project)
    }

    pub fn join_project(&mut self, actor: Option<UserId>, project: ProjectId) -> Result<Project> {
        let who = self.principal(actor)?;
        self.require(&who, Action::JoinProject, None)?;
        let idea = self.board.project(project)?.idea_id;
        self.require(&who, Action::JoinProject, Some(self.idea(idea)?))?;
        let p = self.board.join(Self::acting_user(&who), project)?.clone();
        self.changes.insert(EntityKey::Project(project));
        Ok(p)
    }

    /// Removes `member` from the project. Members may remove themselves; the
    /// owner may remove anyone else.
    pub fn leave_project(&mut self, actor: Option<UserId>, project: ProjectId, member: UserId) -> Result<Project> {
        let who = self.principal(actor)?;
        self.require(&who, Action::JoinProject, None)?;
        let me = Self::acting_user(&who);
        let p = self.project_for(&who, project)?;
        if me != member && p.owner_id != me {
            return Err(Error::PermissionDenied("only the member or the project owner may remove a member".into()));
        }
        let now = self.now();
        let cleared = self.board.leave(member, project, now)?;
        self.changes.insert(EntityKey::Project(project));
        self.changes.extend(cleared.into_iter().map(EntityKey::Task));
        Ok(self.board.project(project)?.clone())
    }

    pub fn transfer_project(&mut self, actor: Option<UserId>, project: ProjectId, new_owner: UserId) -> Result<Project> {
        let who = self.principal(actor)?;
        self.require(&who, Action::JoinProject, None)?;
        self.project_for(&who, project)?;
        let p = self.board.transfer(Self::acting_user(&who), project, new_owner)?.clone();
        self.changes.insert(EntityKey::Project(project));
        Ok(p)
    }

    fn after_task_change(&mut self, before: Option<TaskStatus>, task: &Task, actor: UserId) -> Result<()> {
        self.changes.insert(EntityKey::Task(task.task_id));
        if task.status == TaskStatus::Done && before != Some(TaskStatus::Done) {
            let who = task.assignee_id.unwrap_or(actor);
            self.award(who, PointsKind::TaskDone, SourceRef::Task(task.task_id))?;
        }
        Ok(())
    }

    pub fn upsert_task(
        &mut self,
        actor: Option<UserId>,
        project: ProjectId,
        task_id: Option<TaskId>,
        fields: TaskFields,
    ) -> Result<Task> {
        let who = self.principal(actor)?;
        self.require(&who, Action::JoinProject, None)?;
        let me = Self::acting_user(&who);
        let before = task_id.and_then(|t| self.board.task(t).ok()).map(|t| t.status);
        let now = self.now();
        let task = self.board.upsert_task(me, project, task_id, fields, now)?.clone();
        self.after_task_change(before, &task, me)?;
        Ok(task)
    }

    pub fn set_task_status(&mut self, actor: Option<UserId>, task: TaskId, status: TaskStatus) -> Result<Task> {
        let who = self.principal(actor)?;
        self.require(&who, Action::JoinProject, None)?;
        let me = Self::acting_user(&who);
        let before = self.board.task(task)?.status;
        let now = self.now();
        let t = self.board.set_status(me, task, status, now)?.clone();
        self.after_task_change(Some(before), &t, me)?;
        Ok(t)
    }

    pub fn project_progress(&self, actor: Option<UserId>, project: ProjectId) -> Result<f64> {
        let who = self.principal(actor)?;
        self.project_for(&who, project)?;
        self.board.progress(project)
    }

    pub fn project_tasks(&self, actor: Option<UserId>, project: ProjectId) -> Result<Vec<Task>> {
        let who = self.principal(actor)?;
        self.project_for(&who, project)?;
        Ok(self.board.tasks_of(project).cloned().collect())
    }

    // ---------------------------------------------------------------------
    // incentives
    // ---------------------------------------------------------------------

    fn source_exists(&self, source: &SourceRef) -> bool {
        match *source {
            SourceRef::Idea(i) => self.ideas.contains_key(&i),
            SourceRef::Comment(c) => self.comments.contains_key(&c),
            SourceRef::Rating { idea_id, rater_id } => self.ratings.contains_key(&(idea_id, rater_id)),
            SourceRef::Project(p) => self.board.project(p).is_ok(),
            SourceRef::Task(t) => self.board.task(t).is_ok(),
        }
    }

    /// Pays `kind` to `user` for `source` once; repeats return the original event.
    pub fn award(&mut self, user: UserId, kind: PointsKind, source: SourceRef) -> Result<PointsEvent> {
        if !self.users.contains_key(&user) {
            return Err(Error::UnknownUser);
        }
        if !self.source_exists(&source) {
            return Err(Error::UnknownSource);
        }
        let now = self.now();
        let (event, fresh) = self.ledger.award(user, kind, source, now);
        let event = event.clone();
        if fresh {
            self.changes.insert(EntityKey::Points(event.event_id));
            let total = self.ledger.reputation(event.user_id);
            let account = self.users.get_mut(&event.user_id).expect("checked above");
            account.reputation_points = total;
            self.changes.insert(EntityKey::User(event.user_id));
        }
        Ok(event)
    }

    pub fn ledger(&self) -> &Ledger {
        &self.ledger
    }

    pub fn leaderboard(&self, n: usize) -> Result<Vec<LeaderboardEntry>> {
        if n == 0 {
            return Err(Error::InvalidInput("n must be at least 1".into()));
        }
        let standings = self
            .users
            .values()
            .filter(|u| u.group_id != GroupId::GUESTS)
            .map(|u| Standing { user_id: u.user_id, reputation: self.ledger.reputation(u.user_id), created_at: u.created_at })
            .collect();
        Ok(incentives::leaderboard(standings, n))
    }

    // ---------------------------------------------------------------------
    // persistence hooks
    // ---------------------------------------------------------------------

    /// Entities touched since the last call, in key order.
    pub fn take_changes(&mut self) -> Vec<EntityKey> {
        std::mem::take(&mut self.changes).into_iter().collect()
    }

    /// Every live entity key, in key order.
    pub fn all_keys(&self) -> Vec<EntityKey> {
        let mut keys: Vec<EntityKey> = self.groups.iter().map(|g| EntityKey::Group(g.group_id)).collect();
        keys.extend(self.users.keys().map(|&k| EntityKey::User(k)));
        keys.extend(self.ideas.keys().map(|&k| EntityKey::Idea(k)));
        keys.extend(self.reviews.keys().map(|&k| EntityKey::Review(k)));
        keys.extend(self.ratings.keys().map(|&(i, u)| EntityKey::Rating(i, u)));
        keys.extend(self.comments.keys().map(|&k| EntityKey::Comment(k)));
        keys.extend(self.board.projects().map(|p| EntityKey::Project(p.project_id)));
        keys.extend(self.board.tasks().map(|t| EntityKey::Task(t.task_id)));
        keys.extend(self.ledger.events().iter().map(|e| EntityKey::Points(e.event_id)));
        keys
    }

    /// Current JSON payload of an entity, or `None` if it no longer exists.
    pub fn record(&self, key: EntityKey) -> Option<Value> {
        fn to_value<T: Serialize>(v: &T) -> Value {
            serde_json::to_value(v).expect("entities serialize")
        }
        match key {
            EntityKey::Group(g) => self.groups.iter().find(|x| x.group_id == g).map(to_value),
            EntityKey::User(u) => self.users.get(&u).map(to_value),
            EntityKey::Idea(i) => self.ideas.get(&i).map(to_value),
            EntityKey::Review(r) => self.reviews.get(&r).map(to_value),
            EntityKey::Rating(i, u) => self.ratings.get(&(i, u)).map(to_value),
            EntityKey::Comment(c) => self.comments.get(&c).map(to_value),
            EntityKey::Project(p) => self.board.project(p).ok().map(to_value),
            EntityKey::Task(t) => self.board.task(t).ok().map(to_value),
            EntityKey::Points(e) => self.ledger.event(e).map(to_value),
        }
    }

    /// Rebuilds a platform from `(kind, payload)` records, re-indexing every
    /// published idea and recomputing reputation from the ledger.
    pub fn restore<I>(config: PlatformConfig, clock: Arc<dyn Clock>, records: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, Value)>,
    {
        config.validate()?;
        fn parse<T: serde::de::DeserializeOwned>(kind: &str, v: Value) -> Result<T> {
            serde_json::from_value(v).map_err(|e| Error::CorruptRecord(format!("{kind}: {e}")))
        }
        let mut groups = Vec::new();
        let mut users = BTreeMap::new();
        let mut ideas = BTreeMap::new();
        let mut reviews = BTreeMap::new();
        let mut ratings = BTreeMap::new();
        let mut comments = BTreeMap::new();
        let mut projects = Vec::new();
        let mut tasks = Vec::new();
        let mut events = Vec::new();
        for (kind, v) in records {
            match kind.as_str() {
                "group" => groups.push(parse::<UserGroup>(&kind, v)?),
                "user" => {
                    let u: UserAccount = parse(&kind, v)?;
                    users.insert(u.user_id, u);
                }
                "idea" => {
                    let i: Idea = parse(&kind, v)?;
                    ideas.insert(i.idea_id, i);
                }
                "review" => {
                    let r: ReviewDecision = parse(&kind, v)?;
                    reviews.insert(r.review_id, r);
                }
                "rating" => {
                    let r: Rating = parse(&kind, v)?;
                    ratings.insert((r.idea_id, r.rater_id), r);
                }
                "comment" => {
                    let c: Comment = parse(&kind, v)?;
                    comments.insert(c.comment_id, c);
                }
                "project" => projects.push(parse::<Project>(&kind, v)?),
                "task" => tasks.push(parse::<Task>(&kind, v)?),
                "points" => events.push(parse::<PointsEvent>(&kind, v)?),
                other => return Err(Error::CorruptRecord(format!("unknown record kind {other:?}"))),
            }
        }
        groups.sort_by_key(|g| g.group_id);

        let mut index = SearchIndex::new(config.bm25);
        for idea in ideas.values().filter(|i| i.state == IdeaState::Published) {
            index.index_idea(idea)?;
        }
        let ledger = Ledger::replay(config.points, events)?;
        for u in users.values_mut() {
            u.reputation_points = ledger.reputation(u.user_id);
        }
        let mut p = Platform {
            config,
            matrix: PermissionMatrix::default(),
            clock,
            groups,
            users,
            ideas,
            reviews,
            ratings,
            comments,
            board: Board::from_parts(projects, tasks),
            ledger,
            index,
            changes: BTreeSet::new(),
        };
        if p.groups.is_empty() {
            p.seed_default_groups()?;
        }
        Ok(p)
    }

    // ---------------------------------------------------------------------
    // invariants
    // ---------------------------------------------------------------------

    /// Checks every cross-entity invariant; returns the first violation found.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let fail = |msg: String| Err(msg);
        if self.groups != seed_default_groups(&[]).expect("empty") {
            return fail("group table differs from the five default groups".into());
        }
        let mut emails = BTreeSet::new();
        for u in self.users.values() {
            if !emails.insert(u.email.to_ascii_lowercase()) {
                return fail(format!("duplicate email {}", u.email));
            }
            if u.reputation_points != self.ledger.reputation(u.user_id) {
                return fail(format!("user {} reputation differs from ledger", u.user_id));
            }
        }
        let published: BTreeSet<IdeaId> =
            self.ideas.values().filter(|i| i.state == IdeaState::Published).map(|i| i.idea_id).collect();
        let indexed: BTreeSet<IdeaId> = self.index.indexed_ids().collect();
        if published != indexed {
            return fail("indexed ideas differ from published ideas".into());
        }
        for i in self.ideas.values() {
            let text = DraftText { title: &i.title, body: &i.body, tags: &i.tags };
            if !lifecycle::check_bounds(text).is_empty() {
                return fail(format!("idea {} violates field bounds", i.idea_id));
            }
            let has_reason = i.rejection_reason.as_ref().is_some_and(|r| !r.trim().is_empty());
            if has_reason != (i.state == IdeaState::Rejected) {
                return fail(format!("idea {} rejection_reason inconsistent with state", i.idea_id));
            }
            if i.updated_at < i.created_at {
                return fail(format!("idea {} updated before created", i.idea_id));
            }
            if !self.users.contains_key(&i.author_id) {
                return fail(format!("idea {} has unknown author", i.idea_id));
            }
            let decisions = |o: ReviewOutcome| self.reviews.values().filter(|r| r.idea_id == i.idea_id && r.outcome == o).count();
            match i.state {
                IdeaState::Published if decisions(ReviewOutcome::Publish) != 1 => {
                    return fail(format!("published idea {} lacks exactly one publish decision", i.idea_id));
                }
                IdeaState::Rejected if decisions(ReviewOutcome::Reject) == 0 => {
                    return fail(format!("rejected idea {} has no reject decision", i.idea_id));
                }
                _ => {}
            }
        }
        for r in self.ratings.values() {
            let Some(idea) = self.ideas.get(&r.idea_id) else { return fail("rating on unknown idea".into()) };
            if idea.state != IdeaState::Published || idea.author_id == r.rater_id {
                return fail(format!("invalid rating on idea {}", r.idea_id));
            }
            if r.scores.as_array().iter().any(|s| !(1..=5).contains(s)) {
                return fail("rating score out of range".into());
            }
        }
        for c in self.comments.values() {
            if self.ideas.get(&c.idea_id).is_none_or(|i| i.state != IdeaState::Published) {
                return fail(format!("comment {} on unpublished idea", c.comment_id));
            }
            if let Some(pid) = c.parent_comment_id {
                let ok = self.comments.get(&pid).is_some_and(|p| p.idea_id == c.idea_id && p.parent_comment_id.is_none());
                if !ok {
                    return fail(format!("comment {} has a bad parent", c.comment_id));
                }
            }
        }
        for p in self.board.projects() {
            if !p.member_ids.contains(&p.owner_id) {
                return fail(format!("project {} owner not a member", p.project_id));
            }
        }
        for t in self.board.tasks() {
            let members = &self.board.project(t.project_id).map_err(|e| e.to_string())?.member_ids;
            if t.assignee_id.is_some_and(|a| !members.contains(&a)) {
                return fail(format!("task {} assignee not a member", t.task_id));
            }
        }
        let sum_users: u64 = self.users.values().map(|u| u.reputation_points).sum();
        let sum_events: u64 = self.ledger.events().iter().map(|e| u64::from(e.points)).sum();
        if sum_users != sum_events {
            return fail("reputation total differs from ledger total".into());
        }
        Ok(())
    }
}
