//! Collaborator suggestions and similar ideas.

use std::sync::Arc;

use ideaforge_core::lifecycle::ReviewOutcome;
use ideaforge_core::{GroupId, ManualClock, NewIdea, NewUser, Platform, PlatformConfig, Scores, Visibility};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut p = Platform::new(PlatformConfig::default(), Arc::new(ManualClock::ticking()))?;
    let mut person = |name: &str, tags: &[&str], group| {
        let u = NewUser {
            display_name: name.into(),
            email: format!("{name}@example.org"),
            interest_tags: tags.iter().map(|t| t.to_string()).collect(),
        };
        p.register_user_in_group(u, group).map(|u| u.user_id)
    };
    let editor = person("editor", &[], GroupId::EDITORS)?;
    let ana = person("ana", &["energy", "water"], GroupId::VISITORS)?;
    let ben = person("ben", &["energy", "farming"], GroupId::VISITORS)?;
    let cy = person("cy", &["music"], GroupId::VISITORS)?;

    let texts = [
        ("Solar pumps", "Solar powered irrigation pumps for small farms.", "energy"),
        ("Solar dryers", "Solar crop dryers so farms lose less harvest.", "energy"),
        ("Street choir", "An open choir that sings in the square on Sundays.", "music"),
    ];
    let mut ids = Vec::new();
    for (title, body, tag) in texts {
        let idea = p.submit_idea(Some(editor), NewIdea { title: title.into(), body: body.into(), tags: vec![tag.into()], visibility: Some(Visibility::Public) })?;
        p.review_idea(Some(editor), idea.idea_id, ReviewOutcome::Publish, None)?;
        ids.push(idea.idea_id);
    }
    for who in [ana, ben] {
        p.rate_idea(Some(who), ids[0], Scores::new(4, 4, 4, 4)?)?;
    }
    p.comment_on_idea(Some(cy), ids[2], "Count me in.".into(), None)?;

    for (name, id) in [("ana", ana), ("ben", ben), ("cy", cy)] {
        let s: Vec<String> = p.suggest_collaborators(id, 3)?.iter().map(|s| format!("{:?} {:.2}", s.subject, s.score)).collect();
        println!("{name}: {}", if s.is_empty() { "no suggestions".into() } else { s.join(", ") });
    }
    for s in p.similar_ideas(None, ids[0], 3)? {
        println!("similar to #{}: {:?} {:.3}", ids[0], s.subject, s.score);
    }
    Ok(())
}
