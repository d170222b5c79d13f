//! Group permission matrix and per-idea visibility rules.
//!
//! The matrix is the single auditable table below. `docs/permission_matrix.tsv`
//! at the repository root holds the golden copy that tests diff against.
//!
//! | action            | 1 | 2 | 3 | 4 | 5 |
//! |-------------------|---|---|---|---|---|
//! | ReadPublic        | y | y | y | y | y |
//! | SubmitIdea        | y | y | y | y |   |
//! | RateIdea          | y | y | y | y |   |
//! | CommentIdea       | y | y | y | y |   |
//! | CreateProject     | y | y | y | y |   |
//! | JoinProject       | y | y | y | y |   |
//! | SetVisibility     | y | y | y | y |   |
//! | ModerateIdeas     | y | y | y |   |   |
//! | AccessAdminPanel  | y | y | y |   |   |
//! | ManageUsers       | y |   |   |   |   |

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{GroupId, Idea, IdeaState, UserId, Visibility};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Action {
    ReadPublic,
    SubmitIdea,
    RateIdea,
    CommentIdea,
    CreateProject,
    JoinProject,
    ModerateIdeas,
    ManageUsers,
    AccessAdminPanel,
    SetVisibility,
}

impl Action {
    pub const ALL: [Action; 10] = [
        Action::ReadPublic,
        Action::SubmitIdea,
        Action::RateIdea,
        Action::CommentIdea,
        Action::CreateProject,
        Action::JoinProject,
        Action::ModerateIdeas,
        Action::ManageUsers,
        Action::AccessAdminPanel,
        Action::SetVisibility,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Action::ReadPublic => "ReadPublic",
            Action::SubmitIdea => "SubmitIdea",
            Action::RateIdea => "RateIdea",
            Action::CommentIdea => "CommentIdea",
            Action::CreateProject => "CreateProject",
            Action::JoinProject => "JoinProject",
            Action::ModerateIdeas => "ModerateIdeas",
            Action::ManageUsers => "ManageUsers",
            Action::AccessAdminPanel => "AccessAdminPanel",
            Action::SetVisibility => "SetVisibility",
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Immutable (group, action) -> allow table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermissionMatrix {
    allowed: [[bool; 10]; 5],
}

const CONTRIBUTOR: [Action; 7] = [
    Action::ReadPublic,
    Action::SubmitIdea,
    Action::RateIdea,
    Action::CommentIdea,
    Action::CreateProject,
    Action::JoinProject,
    Action::SetVisibility,
];

impl Default for PermissionMatrix {
    fn default() -> Self {
        let mut allowed = [[false; 10]; 5];
        for group in GroupId::ALL {
            let row = &mut allowed[usize::from(group.get() - 1)];
            let mut grant = |a: Action| row[a as usize] = true;
            grant(Action::ReadPublic);
            if group == GroupId::GUESTS {
                continue;
            }
            CONTRIBUTOR.iter().copied().for_each(&mut grant);
            if group.has_admin_panel() {
                grant(Action::ModerateIdeas);
                grant(Action::AccessAdminPanel);
            }
            if group == GroupId::ADMINISTRATORS {
                grant(Action::ManageUsers);
            }
        }
        PermissionMatrix { allowed }
    }
}

impl PermissionMatrix {
    pub fn allows(&self, group: GroupId, action: Action) -> bool {
        self.allowed[usize::from(group.get() - 1)][action as usize]
    }

    /// Renders the matrix as `group_id\taction\tallow` lines with a header.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("group_id\taction\tallow\n");
        for g in GroupId::ALL {
            for a in Action::ALL {
                out.push_str(&format!("{}\t{}\t{}\n", g, a, self.allows(g, a)));
            }
        }
        out
    }
}

/// Who is asking. Guests have no account.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Principal {
    pub user_id: Option<UserId>,
    pub group: GroupId,
}

impl Principal {
    pub fn guest() -> Self {
        Principal { user_id: None, group: GroupId::GUESTS }
    }

    pub fn user(user_id: UserId, group: GroupId) -> Self {
        Principal { user_id: Some(user_id), group }
    }

    pub fn is_moderator(&self) -> bool {
        self.group.has_admin_panel()
    }
}

/// Whether `viewer` may read `idea`. `on_team` says whether the viewer is a
/// member of a project attached to the idea.
pub fn visible_to(idea: &Idea, viewer: &Principal, on_team: bool) -> bool {
    let is_author = viewer.user_id == Some(idea.author_id);
    if is_author || viewer.is_moderator() {
        return true;
    }
    if idea.state != IdeaState::Published {
        return false;
    }
    match idea.visibility {
        Visibility::Public => true,
        Visibility::Team => on_team && viewer.user_id.is_some(),
        Visibility::Private => false,
    }
}

/// The resource an action targets, when there is one.
#[derive(Debug, Clone, Copy)]
pub enum Resource<'a> {
    Idea { idea: &'a Idea, on_team: bool },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub allowed: bool,
    pub reason: String,
}

impl Decision {
    fn allow() -> Self {
        Decision { allowed: true, reason: "allowed".into() }
    }

    fn deny(reason: impl Into<String>) -> Self {
        Decision { allowed: false, reason: reason.into() }
    }
}

/// Matrix lookup followed by the resource-level checks.
pub fn can(
    matrix: &PermissionMatrix,
    who: &Principal,
    action: Action,
    resource: Option<Resource<'_>>,
) -> Decision {
    if !matrix.allows(who.group, action) {
        return Decision::deny(format!("group {} ({}) may not {}", who.group, who.group.name(), action));
    }
    // Every action beyond ReadPublic needs an account to attribute it to.
    if action != Action::ReadPublic && who.user_id.is_none() {
        return Decision::deny(format!("{action} requires a signed-in user"));
    }
    match resource {
        None => Decision::allow(),
        Some(Resource::Idea { idea, on_team }) => {
            if !visible_to(idea, who, on_team) {
                return Decision::deny("idea is not visible to the caller");
            }
            if action == Action::SetVisibility
                && who.user_id != Some(idea.author_id)
                && !matrix.allows(who.group, Action::ManageUsers)
            {
                return Decision::deny("only the author or an administrator may change visibility");
            }
            Decision::allow()
        }
    }
}
