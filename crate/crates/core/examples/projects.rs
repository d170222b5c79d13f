//! Turning a published idea into a project with tasks.

use std::sync::Arc;

use ideaforge_core::collaboration::{TaskFields, TaskStatus};
use ideaforge_core::lifecycle::ReviewOutcome;
use ideaforge_core::{GroupId, ManualClock, NewIdea, NewUser, Platform, PlatformConfig, Visibility};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut p = Platform::new(PlatformConfig::default(), Arc::new(ManualClock::ticking()))?;
    let mut person = |name: &str, group| {
        let u = NewUser { display_name: name.into(), email: format!("{name}@example.org"), interest_tags: vec![] };
        p.register_user_in_group(u, group).map(|u| u.user_id)
    };
    let owner = person("owner", GroupId::EDITORS)?;
    let helper = person("helper", GroupId::VISITORS)?;

    let new = NewIdea {
        title: "Bee hotels".into(),
        body: "Build insect hotels for the park and the school yards.".into(),
        tags: vec!["nature".into()],
        visibility: Some(Visibility::Public),
    };
    let idea = p.submit_idea(Some(owner), new)?;
    p.review_idea(Some(owner), idea.idea_id, ReviewOutcome::Publish, None)?;

    let project = p.create_project(Some(owner), idea.idea_id, "Bee hotel build")?;
    p.join_project(Some(helper), project.project_id)?;

    let task = |title: &str| TaskFields { title: title.into(), assignee_id: Some(helper), ..Default::default() };
    let cut = p.upsert_task(Some(owner), project.project_id, None, task("Cut the wood"))?;
    p.upsert_task(Some(owner), project.project_id, None, task("Drill the holes"))?;
    p.upsert_task(Some(owner), project.project_id, None, task("Mount on posts"))?;

    p.set_task_status(Some(helper), cut.task_id, TaskStatus::InProgress)?;
    p.set_task_status(Some(helper), cut.task_id, TaskStatus::Done)?;
    println!("progress: {:.2}", p.project_progress(None, project.project_id)?);

    let illegal = p.set_task_status(Some(helper), cut.task_id, TaskStatus::Open);
    println!("Done -> Open: {}", illegal.unwrap_err());

    let left = p.leave_project(Some(owner), project.project_id, owner);
    println!("owner leaving: {}", left.unwrap_err());
    p.transfer_project(Some(owner), project.project_id, helper)?;
    p.leave_project(Some(owner), project.project_id, owner)?;
    let now = p.project(None, project.project_id)?;
    println!("owner is now {}, members {:?}", now.owner_id, now.member_ids);
    Ok(())
}
