//! Keyword search over published ideas.
//!
//!     cargo run -p ideaforge-core --example search -- "solar pump"

use std::sync::Arc;

use ideaforge_core::lifecycle::ReviewOutcome;
use ideaforge_core::{GroupId, ManualClock, NewIdea, NewUser, Platform, PlatformConfig, Visibility};

const IDEAS: [(&str, &str, &str); 4] = [
    ("Solar water pumps", "Replace diesel pumps on small farms with solar powered ones.", "energy"),
    ("Bike repair cafe", "A monthly pop-up where neighbours fix bicycles together.", "transport"),
    ("Rainwater for schools", "Collect roof rainwater to flush school toilets and water gardens.", "water"),
    ("Pump track", "Build a dirt pump track for bikes in the old quarry.", "sport"),
];

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let query = std::env::args().nth(1).unwrap_or_else(|| "solar pump".into());
    let mut p = Platform::new(PlatformConfig::default(), Arc::new(ManualClock::ticking()))?;
    let user = NewUser { display_name: "editor".into(), email: "editor@example.org".into(), interest_tags: vec![] };
    let editor = p.register_user_in_group(user, GroupId::EDITORS)?.user_id;
    for (title, body, tag) in IDEAS {
        let new = NewIdea { title: title.into(), body: body.into(), tags: vec![tag.into()], visibility: Some(Visibility::Public) };
        let idea = p.submit_idea(Some(editor), new)?;
        p.review_idea(Some(editor), idea.idea_id, ReviewOutcome::Publish, None)?;
    }

    println!("query: {query}");
    for hit in p.search(None, &query, 10)? {
        let idea = p.idea(hit.idea_id)?;
        println!("{:>7.3}  {:<24} matched {:?}", hit.score, idea.title, hit.matched_terms);
    }
    Ok(())
}
