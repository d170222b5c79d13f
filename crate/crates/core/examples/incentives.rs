//! Points awarded for contributions and the resulting leaderboard.

use std::sync::Arc;

use ideaforge_core::lifecycle::ReviewOutcome;
use ideaforge_core::{GroupId, ManualClock, NewIdea, NewUser, Platform, PlatformConfig, Scores, Visibility};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut p = Platform::new(PlatformConfig::default(), Arc::new(ManualClock::ticking()))?;
    let mut person = |name: &str, group| {
        let u = NewUser { display_name: name.into(), email: format!("{name}@example.org"), interest_tags: vec![] };
        p.register_user_in_group(u, group).map(|u| u.user_id)
    };
    let editor = person("editor", GroupId::EDITORS)?;
    let author = person("author", GroupId::VISITORS)?;
    let fan = person("fan", GroupId::VISITORS)?;

    let new = NewIdea {
        title: "Seed swap".into(),
        body: "Swap heirloom seeds at the library each spring.".into(),
        tags: vec!["garden".into()],
        visibility: Some(Visibility::Public),
    };
    let idea = p.submit_idea(Some(author), new)?;
    p.review_idea(Some(editor), idea.idea_id, ReviewOutcome::Publish, None)?;
    p.rate_idea(Some(fan), idea.idea_id, Scores::new(5, 4, 5, 4)?)?;
    // A second rating replaces the first and earns nothing more.
    p.rate_idea(Some(fan), idea.idea_id, Scores::new(5, 5, 5, 5)?)?;
    p.comment_on_idea(Some(fan), idea.idea_id, "I have tomato seeds to share.".into(), None)?;
    p.create_project(Some(author), idea.idea_id, "Spring swap")?;

    for e in p.ledger().events() {
        println!("#{} user {} {:?} +{}", e.event_id, e.user_id, e.kind, e.points);
    }
    for (rank, entry) in p.leaderboard(10)?.iter().enumerate() {
        println!("{}. user {} with {} points", rank + 1, entry.user_id, entry.reputation_points);
    }
    Ok(())
}
