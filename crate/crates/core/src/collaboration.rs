//! Project teams attached to ideas, their tasks, and progress.

use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{IdeaId, ProjectId, TaskId, UserId};

pub const PROJECT_NAME_MAX: usize = 120;
pub const TASK_TITLE_MAX: usize = 200;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Project {
    pub project_id: ProjectId,
    pub idea_id: IdeaId,
    pub name: String,
    pub owner_id: UserId,
    pub member_ids: BTreeSet<UserId>,
    pub created_at: DateTime<Utc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub enum TaskStatus {
    #[default]
    Open,
    InProgress,
    Done,
}

impl TaskStatus {
    pub const ALL: [TaskStatus; 3] = [TaskStatus::Open, TaskStatus::InProgress, TaskStatus::Done];

    /// Open -> InProgress -> Done, reopen via Done -> InProgress. Staying put is allowed.
    pub fn can_become(self, to: TaskStatus) -> bool {
        use TaskStatus::*;
        matches!(
            (self, to),
            (Open, Open) | (InProgress, InProgress) | (Done, Done)
                | (Open, InProgress) | (InProgress, Done) | (Done, InProgress)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Task {
    pub task_id: TaskId,
    pub project_id: ProjectId,
    pub title: String,
    pub assignee_id: Option<UserId>,
    pub deadline: Option<DateTime<Utc>>,
    pub status: TaskStatus,
    pub created_at: DateTime<Utc>,
    pub updated_at: DateTime<Utc>,
}

/// Fields a member may set when creating or editing a task.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskFields {
    pub title: String,
    #[serde(default)]
    pub assignee_id: Option<UserId>,
    #[serde(default)]
    pub deadline: Option<DateTime<Utc>>,
    #[serde(default)]
    pub status: Option<TaskStatus>,
}

pub fn validate_project_name(name: &str) -> Result<()> {
    let n = name.chars().count();
    if n == 0 || n > PROJECT_NAME_MAX || name.trim().is_empty() {
        return Err(Error::InvalidInput(format!("project name must be 1 to {PROJECT_NAME_MAX} characters")));
    }
    Ok(())
}

fn validate_task_title(title: &str) -> Result<()> {
    let n = title.chars().count();
    if n == 0 || n > TASK_TITLE_MAX || title.trim().is_empty() {
        return Err(Error::InvalidInput(format!("task title must be 1 to {TASK_TITLE_MAX} characters")));
    }
    Ok(())
}

/// Done tasks over all tasks; 0 when there are none.
pub fn progress<'a>(tasks: impl IntoIterator<Item = &'a Task>) -> f64 {
    let (mut done, mut total) = (0u64, 0u64);
    for t in tasks {
        total += 1;
        if t.status == TaskStatus::Done {
            done += 1;
        }
    }
    if total == 0 {
        0.0
    } else {
        done as f64 / total as f64
    }
}

/// All projects and tasks. Enforces membership and task rules; callers are
/// expected to have checked group permissions and idea visibility.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Board {
    projects: BTreeMap<ProjectId, Project>,
    tasks: BTreeMap<TaskId, Task>,
    next_project: u64,
    next_task: u64,
}

impl Board {
    pub fn from_parts(projects: impl IntoIterator<Item = Project>, tasks: impl IntoIterator<Item = Task>) -> Self {
        let projects: BTreeMap<_, _> = projects.into_iter().map(|p| (p.project_id, p)).collect();
        let tasks: BTreeMap<_, _> = tasks.into_iter().map(|t| (t.task_id, t)).collect();
        let next_project = projects.keys().last().map_or(1, |id| id.0 + 1);
        let next_task = tasks.keys().last().map_or(1, |id| id.0 + 1);
        Board { projects, tasks, next_project, next_task }
    }

    pub fn project(&self, id: ProjectId) -> Result<&Project> {
        self.projects.get(&id).ok_or(Error::UnknownProject)
    }

    pub fn task(&self, id: TaskId) -> Result<&Task> {
        self.tasks.get(&id).ok_or(Error::UnknownTask)
    }

    pub fn projects(&self) -> impl Iterator<Item = &Project> {
        self.projects.values()
    }

    pub fn tasks(&self) -> impl Iterator<Item = &Task> {
        self.tasks.values()
    }

    pub fn tasks_of(&self, project: ProjectId) -> impl Iterator<Item = &Task> {
        self.tasks.values().filter(move |t| t.project_id == project)
    }

    /// Whether `user` belongs to any project attached to `idea`.
    pub fn is_team_member(&self, idea: IdeaId, user: UserId) -> bool {
        self.projects.values().any(|p| p.idea_id == idea && p.member_ids.contains(&user))
    }

    pub fn create(&mut self, owner: UserId, idea: IdeaId, name: &str, now: DateTime<Utc>) -> Result<&Project> {
        validate_project_name(name)?;
        let id = ProjectId(self.next_project.max(1));
        self.next_project = id.0 + 1;
        let project = Project {
            project_id: id,
            idea_id: idea,
            name: name.to_owned(),
            owner_id: owner,
            member_ids: BTreeSet::from([owner]),
            created_at: now,
        };
        Ok(self.projects.entry(id).or_insert(project))
    }

    pub fn join(&mut self, user: UserId, project: ProjectId) -> Result<&Project> {
        let p = self.projects.get_mut(&project).ok_or(Error::UnknownProject)?;
        if !p.member_ids.insert(user) {
            return Err(Error::AlreadyMember);
        }
        Ok(p)
    }

    /// Removes `user`; returns the ids of tasks that lost their assignee.
    pub fn leave(&mut self, user: UserId, project: ProjectId, now: DateTime<Utc>) -> Result<Vec<TaskId>> {
        let p = self.projects.get(&project).ok_or(Error::UnknownProject)?;
        if !p.member_ids.contains(&user) {
            return Err(Error::NotMember);
        }
        if p.owner_id == user {
            // A sole owner cannot leave either: a project always keeps one member.
            return Err(Error::OwnerMustTransfer);
        }
        self.projects.get_mut(&project).expect("checked").member_ids.remove(&user);
        let mut cleared = Vec::new();
        for t in self.tasks.values_mut() {
            if t.project_id == project && t.assignee_id == Some(user) {
                t.assignee_id = None;
                t.updated_at = now;
                cleared.push(t.task_id);
            }
        }
        Ok(cleared)
    }

    pub fn transfer(&mut self, owner: UserId, project: ProjectId, new_owner: UserId) -> Result<&Project> {
        let p = self.projects.get_mut(&project).ok_or(Error::UnknownProject)?;
        if p.owner_id != owner {
            return Err(Error::PermissionDenied("only the project owner may transfer ownership".into()));
        }
        if !p.member_ids.contains(&new_owner) {
            return Err(Error::NotMember);
        }
        p.owner_id = new_owner;
        Ok(p)
    }

    fn require_member(&self, user: UserId, project: ProjectId) -> Result<&Project> {
        let p = self.project(project)?;
        if !p.member_ids.contains(&user) {
            return Err(Error::PermissionDenied("only project members may manage its tasks".into()));
        }
        Ok(p)
    }

    /// Creates (`task_id` absent or unused) or edits a task.
    pub fn upsert_task(
        &mut self,
        member: UserId,
        project: ProjectId,
        task_id: Option<TaskId>,
        fields: TaskFields,
        now: DateTime<Utc>,
    ) -> Result<&Task> {
        let p = self.require_member(member, project)?;
        validate_task_title(&fields.title)?;
        if let Some(a) = fields.assignee_id {
            if !p.member_ids.contains(&a) {
                return Err(Error::AssigneeNotMember);
            }
        }
        let existing = task_id.and_then(|id| self.tasks.get(&id));
        if let Some(t) = existing {
            if t.project_id != project {
                return Err(Error::InvalidInput("task belongs to another project".into()));
            }
            if let Some(to) = fields.status {
                if !t.status.can_become(to) {
                    return Err(Error::IllegalTransition { from: t.status, to });
                }
            }
        } else if let Some(to) = fields.status {
            if to != TaskStatus::Open {
                return Err(Error::IllegalTransition { from: TaskStatus::Open, to });
            }
        }

        let id = match task_id {
            Some(id) => id,
            None => TaskId(self.next_task.max(1)),
        };
        self.next_task = self.next_task.max(id.0 + 1);
        let task = self.tasks.entry(id).or_insert_with(|| Task {
            task_id: id,
            project_id: project,
            title: String::new(),
            assignee_id: None,
            deadline: None,
            status: TaskStatus::Open,
            created_at: now,
            updated_at: now,
        });
        task.title = fields.title;
        task.assignee_id = fields.assignee_id;
        task.deadline = fields.deadline;
        if let Some(s) = fields.status {
            task.status = s;
        }
        task.updated_at = now;
        Ok(task)
    }

    pub fn set_status(&mut self, member: UserId, task_id: TaskId, to: TaskStatus, now: DateTime<Utc>) -> Result<&Task> {
        let project = self.task(task_id)?.project_id;
        self.require_member(member, project)?;
        let t = self.tasks.get_mut(&task_id).expect("checked");
        if !t.status.can_become(to) {
            return Err(Error::IllegalTransition { from: t.status, to });
        }
        t.status = to;
        t.updated_at = now;
        Ok(t)
    }

    pub fn progress(&self, project: ProjectId) -> Result<f64> {
        self.project(project)?;
        Ok(progress(self.tasks_of(project)))
    }
}
