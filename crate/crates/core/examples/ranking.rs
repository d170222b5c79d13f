//! Ratings, smoothed scores and the best idea.

use std::sync::Arc;

use ideaforge_core::feedback::RankFilter;
use ideaforge_core::lifecycle::ReviewOutcome;
use ideaforge_core::{GroupId, ManualClock, NewIdea, NewUser, Platform, PlatformConfig, Scores, Visibility};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut p = Platform::new(PlatformConfig::default(), Arc::new(ManualClock::ticking()))?;
    let mut person = |name: &str, group| {
        let u = NewUser { display_name: name.into(), email: format!("{name}@example.org"), interest_tags: vec![] };
        p.register_user_in_group(u, group).map(|u| u.user_id)
    };
    let editor = person("editor", GroupId::EDITORS)?;
    let raters: Vec<_> = (0..6).map(|i| person(&format!("rater{i}"), GroupId::VISITORS)).collect::<Result<_, _>>()?;

    // One idea loved by a single rater, one liked by six, one never rated.
    let plan: [(&str, &[i64]); 3] = [("Street library", &[5]), ("Repair cafe", &[4, 4, 5, 4, 4, 5]), ("Night market", &[])];
    for (title, marks) in plan {
        let new = NewIdea {
            title: title.into(),
            body: format!("{title} run by neighbours every weekend."),
            tags: vec!["community".into()],
            visibility: Some(Visibility::Public),
        };
        let idea = p.submit_idea(Some(editor), new)?;
        p.review_idea(Some(editor), idea.idea_id, ReviewOutcome::Publish, None)?;
        for (rater, &m) in raters.iter().zip(marks) {
            p.rate_idea(Some(*rater), idea.idea_id, Scores::new(m, m, m, m)?)?;
        }
    }

    for r in p.rank_ideas(None, &RankFilter::default())? {
        let idea = p.idea(r.idea_id)?;
        println!("{:<16} n={} smoothed={:.3}", idea.title, r.score.rating_count, r.score.smoothed_score);
    }
    if let Some(best) = p.best_idea(None)? {
        println!("best: {}", p.idea(best.idea_id)?.title);
    }
    Ok(())
}
