//! Near-duplicate detection with TF-IDF cosine similarity.

use std::sync::Arc;

use ideaforge_core::lifecycle::ReviewOutcome;
use ideaforge_core::search::{DraftText, Threshold};
use ideaforge_core::{Error, GroupId, ManualClock, NewIdea, NewUser, Platform, PlatformConfig, Visibility, normalize_tags};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut p = Platform::new(PlatformConfig::default(), Arc::new(ManualClock::ticking()))?;
    let user = NewUser { display_name: "editor".into(), email: "editor@example.org".into(), interest_tags: vec![] };
    let editor = p.register_user_in_group(user, GroupId::EDITORS)?.user_id;
    let original = NewIdea {
        title: "Community compost".into(),
        body: "Shared compost bins in every courtyard, emptied weekly by volunteers.".into(),
        tags: vec!["waste".into()],
        visibility: Some(Visibility::Public),
    };
    let idea = p.submit_idea(Some(editor), original.clone())?;
    p.review_idea(Some(editor), idea.idea_id, ReviewOutcome::Publish, None)?;

    let drafts = [
        ("Community compost", "Shared compost bins in every courtyard, emptied weekly by volunteers."),
        ("Courtyard compost", "Shared compost bins in each courtyard, emptied every week."),
        ("Night buses", "Run two extra buses after midnight on weekends."),
    ];
    for (title, body) in drafts {
        let tags = normalize_tags(["waste"])?;
        let draft = DraftText { title, body, tags: &tags };
        let scores = p.index().find_duplicates(draft, Threshold::new(0.01)?);
        let best = scores.first().map_or(0.0, |s| s.1);
        println!("{title:<20} similarity to #{}: {best:.3}", idea.idea_id);
    }

    match p.submit_idea(Some(editor), original) {
        Err(Error::ValidationFailed(report)) => {
            for f in report.failures {
                println!("refused: {:?} {} (duplicate of {:?})", f.code, f.detail, f.duplicate_of);
            }
        }
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}
