//! An idea goes from submission through rejection, resubmission and publication.
//!
//!     cargo run -p ideaforge-core --example submit_and_review

use std::sync::Arc;

use ideaforge_core::lifecycle::ReviewOutcome;
use ideaforge_core::{GroupId, IdeaEdits, ManualClock, NewIdea, NewUser, Platform, PlatformConfig, Visibility};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut p = Platform::new(PlatformConfig::default(), Arc::new(ManualClock::ticking()))?;
    let person = |name: &str| NewUser { display_name: name.into(), email: format!("{name}@example.org"), interest_tags: vec![] };
    let editor = p.register_user_in_group(person("editor"), GroupId::EDITORS)?.user_id;
    let author = p.register_user(person("author"))?.user_id;

    let idea = p.submit_idea(
        Some(author),
        NewIdea {
            title: "Tool library".into(),
            body: "Lend drills and ladders from the community centre.".into(),
            tags: vec!["sharing".into()],
            visibility: Some(Visibility::Public),
        },
    )?;
    println!("submitted #{} as {:?}", idea.idea_id, idea.state);

    let decision = p.review_idea(Some(editor), idea.idea_id, ReviewOutcome::Reject, Some("who maintains the tools?".into()))?;
    let rejected = p.idea(idea.idea_id)?;
    println!("review {:?}: {:?} ({})", decision.outcome, rejected.state, rejected.rejection_reason.as_deref().unwrap_or(""));

    let edits = IdeaEdits {
        body: Some("Lend drills and ladders from the community centre; volunteers service them monthly.".into()),
        ..Default::default()
    };
    let again = p.resubmit_idea(Some(author), idea.idea_id, edits)?;
    println!("resubmitted: {:?}", again.state);

    p.review_idea(Some(editor), idea.idea_id, ReviewOutcome::Publish, None)?;
    println!("final state: {:?}", p.idea(idea.idea_id)?.state);

    let bad = p.submit_idea(Some(author), NewIdea { title: "x".into(), body: "short".into(), tags: vec![], visibility: Some(Visibility::Public) });
    println!("invalid submission: {}", bad.unwrap_err());
    Ok(())
}
