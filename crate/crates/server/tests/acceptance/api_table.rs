//! Table of valid, unauthorized and malformed requests per endpoint, checked
//! against the statuses documented in `docs/api.md`.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value};

use super::{ensure, Outcome};
use crate::support::TestApp;

const API_DOC: &str = include_str!("../../../../docs/api.md");

/// Endpoints every client of the service relies on.
const REQUIRED: [&str; 26] = [
    "POST /api/v1/sessions",
    "DELETE /api/v1/sessions/current",
    "POST /api/v1/users",
    "GET /api/v1/users/{id}",
    "GET /api/v1/users/{id}/collaborators",
    "POST /api/v1/ideas",
    "GET /api/v1/ideas/{id}",
    "POST /api/v1/ideas/{id}/resubmit",
    "PATCH /api/v1/ideas/{id}/visibility",
    "GET /api/v1/ideas/search",
    "GET /api/v1/ideas/best",
    "GET /api/v1/ideas/{id}/similar",
    "GET /api/v1/moderation/queue",
    "POST /api/v1/ideas/{id}/review",
    "PUT /api/v1/ideas/{id}/ratings/mine",
    "POST /api/v1/ideas/{id}/comments",
    "GET /api/v1/ideas/{id}/comments",
    "POST /api/v1/projects",
    "POST /api/v1/projects/{id}/members",
    "DELETE /api/v1/projects/{id}/members/{uid}",
    "PUT /api/v1/tasks/{id}",
    "GET /api/v1/projects/{id}/progress",
    "GET /api/v1/projects/{id}/tasks.export",
    "GET /api/v1/leaderboard",
    "GET /api/v1/admin/users",
    "PATCH /api/v1/admin/users/{id}/group",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Valid,
    Unauthorized,
    Malformed,
    Rule,
}

type Check = fn(&Value) -> bool;

struct Case {
    endpoint: &'static str,
    kind: Kind,
    path: String,
    token: Option<String>,
    body: Option<String>,
    headers: Vec<(&'static str, String)>,
    expect: u16,
    check: Option<Check>,
}

fn case(endpoint: &'static str, kind: Kind, path: impl Into<String>, token: Option<&str>, body: Option<&str>, expect: u16) -> Case {
    Case {
        endpoint,
        kind,
        path: path.into(),
        token: token.map(str::to_owned),
        body: body.map(str::to_owned),
        headers: Vec::new(),
        expect,
        check: None,
    }
}

impl Case {
    fn header(mut self, name: &'static str, value: impl Into<String>) -> Self {
        self.headers.push((name, value.into()));
        self
    }

    fn check(mut self, f: Check) -> Self {
        self.check = Some(f);
        self
    }
}

fn documented() -> Result<BTreeMap<String, BTreeSet<u16>>, String> {
    let mut out = BTreeMap::new();
    for line in API_DOC.lines().filter(|l| l.starts_with("| `")) {
        let cols: Vec<&str> = line.split('|').map(str::trim).collect();
        let endpoint = cols[1].trim_matches('`').to_string();
        let statuses = cols[2]
            .split(',')
            .map(|s| s.trim().parse::<u16>().map_err(|_| format!("bad status list in {line:?}")))
            .collect::<Result<BTreeSet<_>, _>>()?;
        out.insert(endpoint, statuses);
    }
    Ok(out)
}

fn code_is(v: &Value, code: &str) -> bool {
    v["error"]["code"] == code
}

async fn post_id(app: &TestApp, path: &str, token: &str, body: Value, field: &str) -> Result<u64, String> {
    let (s, v) = app.call("POST", path, Some(token), Some(&body.to_string())).await;
    ensure!(s.is_success(), "setup POST {path}: {s} {v}");
    v[field].as_u64().ok_or_else(|| format!("setup POST {path}: no {field} in {v}"))
}

async fn run() -> Outcome {
    let docs = documented()?;
    for e in REQUIRED {
        ensure!(docs.contains_key(e), "{e} is not documented");
    }

    let app = TestApp::new();
    let (_, admin) = app.admin().await;
    let (editor_id, editor) = app.sign_up("Eddie", "eddie@example.org").await;
    let (s, v) = app.call("PATCH", &format!("/api/v1/admin/users/{editor_id}/group"), Some(&admin), Some(r#"{"group_id":3}"#)).await;
    ensure!(s == 200, "promoting the editor: {s} {v}");
    let (v1_id, v1) = app.sign_up("Vera", "vera@example.org").await;
    let (v2_id, v2) = app.sign_up("Walt", "walt@example.org").await;
    let (v3_id, v3) = app.sign_up("Xena", "xena@example.org").await;
    let spare = app.sign_in("xena@example.org", "password-Xena").await;

    let idea = |t: &str, b: &str| json!({"title": t, "body": b, "tags": ["energy"], "visibility": "Public"});
    let p1 = post_id(&app, "/api/v1/ideas", &v1, idea("Solar water pumps for farms", "Low cost solar powered pumps for irrigation in dry regions."), "idea_id").await?;
    let s1 = post_id(&app, "/api/v1/ideas", &v1, idea("Community bike repair workshops", "Volunteers teach bicycle maintenance every Saturday morning."), "idea_id").await?;
    let s2 = post_id(&app, "/api/v1/ideas", &v1, idea("Neighbourhood compost collection routes", "Weekly pickup of kitchen scraps feeding a shared compost site."), "idea_id").await?;
    let r1 = post_id(&app, "/api/v1/ideas", &v1, idea("Rainwater harvesting kits for schools", "Roof gutters and tanks that let schools water their gardens."), "idea_id").await?;
    for (id, body) in [(p1, json!({"outcome": "Publish"})), (r1, json!({"outcome": "Reject", "reason": "needs a cost estimate"}))] {
        let (s, v) = app.call("POST", &format!("/api/v1/ideas/{id}/review"), Some(&editor), Some(&body.to_string())).await;
        ensure!(s == 200, "setup review: {s} {v}");
    }
    let c1 = post_id(&app, &format!("/api/v1/ideas/{p1}/comments"), &v2, json!({"body": "Great idea"}), "comment_id").await?;
    let c2 = post_id(&app, &format!("/api/v1/ideas/{p1}/comments"), &v1, json!({"body": "Thanks!", "parent_comment_id": c1}), "comment_id").await?;
    let pj = post_id(&app, "/api/v1/projects", &v1, json!({"idea_id": p1, "name": "Pump pilot"}), "project_id").await?;
    let t1 = post_id(&app, &format!("/api/v1/projects/{pj}/tasks"), &v1, json!({"title": "Survey wells"}), "task_id").await?;

    // Round trip: what POST returned is what GET serves.
    let (s, created) = app
        .call("POST", "/api/v1/ideas", Some(&v3), Some(&idea("Night market lighting", "Shared solar lamps for the stalls of the evening market.").to_string()))
        .await;
    ensure!(s == 201, "round-trip create: {s} {created}");
    let (s, fetched) = app.call("GET", &format!("/api/v1/ideas/{}", created["idea_id"]), Some(&v3), None).await;
    ensure!(s == 200, "round-trip get: {s}");
    for (k, val) in created.as_object().ok_or("idea is not an object")? {
        ensure!(&fetched[k] == val, "round trip changed {k}: {val} became {}", fetched[k]);
    }

    let bad = Some("not-a-real-token");
    let basic = ("authorization", "Basic dXNlcjpwYXNz".to_string());
    use Kind::*;
    let mut cases = vec![
        // sessions
        case("POST /api/v1/sessions", Valid, "/api/v1/sessions", None, Some(r#"{"email":"vera@example.org","password":"password-Vera"}"#), 201)
            .check(|v| v["token"].is_string()),
        case("POST /api/v1/sessions", Unauthorized, "/api/v1/sessions", None, Some(r#"{"email":"vera@example.org","password":"wrong-password"}"#), 401)
            .check(|v| code_is(v, "BadCredentials")),
        case("POST /api/v1/sessions", Unauthorized, "/api/v1/sessions", None, Some(r#"{"email":"nobody@example.org","password":"whatever-it-is"}"#), 401),
        case("POST /api/v1/sessions", Malformed, "/api/v1/sessions", None, Some("{not json"), 400).check(|v| code_is(v, "MalformedRequest")),
        case("POST /api/v1/sessions", Malformed, "/api/v1/sessions", None, Some(r#"{"email":"vera@example.org"}"#), 400),
        case("DELETE /api/v1/sessions/current", Valid, "/api/v1/sessions/current", Some(&spare), None, 204),
        case("DELETE /api/v1/sessions/current", Unauthorized, "/api/v1/sessions/current", Some(&spare), None, 401)
            .check(|v| code_is(v, "InvalidSession")),
        case("DELETE /api/v1/sessions/current", Unauthorized, "/api/v1/sessions/current", None, None, 401),
        case("DELETE /api/v1/sessions/current", Malformed, "/api/v1/sessions/current", None, None, 401).header(basic.0, basic.1.clone()),
        // users
        case("POST /api/v1/users", Valid, "/api/v1/users", None, Some(r#"{"display_name":"Yuri","email":"yuri@example.org","password":"long-enough"}"#), 201)
            .check(|v| v["group_id"] == 4 && v["reputation_points"] == 0 && v.get("password").is_none()),
        case("POST /api/v1/users", Rule, "/api/v1/users", None, Some(r#"{"display_name":"Yuri","email":"YURI@example.org","password":"long-enough"}"#), 409)
            .check(|v| code_is(v, "EmailTaken")),
        case("POST /api/v1/users", Rule, "/api/v1/users", None, Some(r#"{"display_name":"Zed","email":"zed@example.org","password":"short"}"#), 422)
            .check(|v| code_is(v, "WeakPassword")),
        case("POST /api/v1/users", Rule, "/api/v1/users", None, Some(r#"{"display_name":"Zed","email":"not-an-email","password":"long-enough"}"#), 422),
        case("POST /api/v1/users", Malformed, "/api/v1/users", None, Some(r#"{"display_name":"Zed","email":"zed@example.org"}"#), 400),
        case("POST /api/v1/users", Unauthorized, "/api/v1/users", bad, Some(r#"{"display_name":"Zed","email":"zed@example.org","password":"long-enough"}"#), 401),
        case("GET /api/v1/users/{id}", Valid, format!("/api/v1/users/{v1_id}"), None, None, 200).check(|v| v.get("email").is_none()),
        case("GET /api/v1/users/{id}", Valid, format!("/api/v1/users/{v1_id}"), Some(&v1), None, 200).check(|v| v["email"] == "vera@example.org"),
        case("GET /api/v1/users/{id}", Rule, "/api/v1/users/999", None, None, 404).check(|v| code_is(v, "UnknownUser")),
        case("GET /api/v1/users/{id}", Malformed, "/api/v1/users/abc", None, None, 400),
        case("GET /api/v1/users/{id}", Unauthorized, format!("/api/v1/users/{v1_id}"), bad, None, 401),
        case("GET /api/v1/users/{id}/collaborators", Valid, format!("/api/v1/users/{v2_id}/collaborators"), Some(&v2), None, 200)
            .check(|v| v.as_array().is_some_and(|a| !a.is_empty())),
        case("GET /api/v1/users/{id}/collaborators", Malformed, format!("/api/v1/users/{v2_id}/collaborators?k=abc"), None, None, 400),
        case("GET /api/v1/users/{id}/collaborators", Rule, format!("/api/v1/users/{v2_id}/collaborators?k=0"), None, None, 422),
        case("GET /api/v1/users/{id}/collaborators", Rule, "/api/v1/users/999/collaborators", None, None, 404),
        case("GET /api/v1/users/{id}/collaborators", Unauthorized, format!("/api/v1/users/{v2_id}/collaborators"), bad, None, 401),
        // ideas
        case("POST /api/v1/ideas", Valid, "/api/v1/ideas", Some(&v2), Some(r#"{"title":"Repair cafe","body":"A monthly cafe where neighbours fix broken radios.","tags":["reuse"]}"#), 201)
            .check(|v| v["state"] == "Submitted" && v["version"].is_u64()),
        case("POST /api/v1/ideas", Valid, "/api/v1/ideas", Some(&v2), Some(r#"{"title":"Tool library","body":"Lend drills and ladders from the library.","draft":true}"#), 201)
            .check(|v| v["state"] == "Draft"),
        case("POST /api/v1/ideas", Unauthorized, "/api/v1/ideas", None, Some(r#"{"title":"Guest idea","body":"Guests may not submit anything at all."}"#), 403)
            .check(|v| code_is(v, "PermissionDenied")),
        case("POST /api/v1/ideas", Unauthorized, "/api/v1/ideas", bad, Some(r#"{"title":"Bad token","body":"A token that was never issued by us."}"#), 401),
        case("POST /api/v1/ideas", Malformed, "/api/v1/ideas", Some(&v2), Some("{"), 400),
        case("POST /api/v1/ideas", Rule, "/api/v1/ideas", Some(&v2), Some(r#"{"title":"ab","body":"short"}"#), 422)
            .check(|v| v["error"]["report"]["failures"].as_array().is_some_and(|f| f.len() == 2)),
        case("POST /api/v1/ideas", Rule, "/api/v1/ideas", Some(&v3), Some(&idea("Solar water pumps for farms", "Low cost solar powered pumps for irrigation in dry regions.").to_string()), 422)
            .check(|v| v["error"]["report"]["failures"][0]["code"] == "NearDuplicate"),
        case("GET /api/v1/ideas/{id}", Valid, format!("/api/v1/ideas/{p1}"), None, None, 200).check(|v| v["aggregate"]["smoothed_score"] == 3.0),
        case("GET /api/v1/ideas/{id}", Valid, format!("/api/v1/ideas/{s2}"), Some(&editor), None, 200),
        case("GET /api/v1/ideas/{id}", Rule, format!("/api/v1/ideas/{s2}"), None, None, 404).check(|v| code_is(v, "UnknownIdea")),
        case("GET /api/v1/ideas/{id}", Malformed, "/api/v1/ideas/abc", None, None, 400),
        case("GET /api/v1/ideas/{id}", Unauthorized, format!("/api/v1/ideas/{p1}"), bad, None, 401),
        case("POST /api/v1/ideas/{id}/resubmit", Unauthorized, format!("/api/v1/ideas/{r1}/resubmit"), Some(&v2), Some("{}"), 403),
        case("POST /api/v1/ideas/{id}/resubmit", Unauthorized, format!("/api/v1/ideas/{r1}/resubmit"), None, Some("{}"), 403),
        case("POST /api/v1/ideas/{id}/resubmit", Malformed, format!("/api/v1/ideas/{r1}/resubmit"), Some(&v1), Some("[1,2]"), 400),
        case("POST /api/v1/ideas/{id}/resubmit", Rule, format!("/api/v1/ideas/{r1}/resubmit"), Some(&v1), Some(r#"{"body":"too short"}"#), 422),
        case("POST /api/v1/ideas/{id}/resubmit", Rule, format!("/api/v1/ideas/{r1}/resubmit"), Some(&v1), Some("{}"), 409)
            .header("if-match", "\"999\"")
            .check(|v| code_is(v, "VersionConflict")),
        case("POST /api/v1/ideas/{id}/resubmit", Valid, format!("/api/v1/ideas/{r1}/resubmit"), Some(&v1), Some(r#"{"body":"Roof gutters and tanks; about 300 euros per school."}"#), 200)
            .check(|v| v["state"] == "Submitted" && v["rejection_reason"].is_null()),
        case("POST /api/v1/ideas/{id}/resubmit", Rule, format!("/api/v1/ideas/{r1}/resubmit"), Some(&v1), Some("{}"), 409)
            .check(|v| code_is(v, "InvalidState")),
        case("POST /api/v1/ideas/{id}/resubmit", Rule, "/api/v1/ideas/999/resubmit", Some(&v1), Some("{}"), 404),
        case("PATCH /api/v1/ideas/{id}/visibility", Valid, format!("/api/v1/ideas/{p1}/visibility"), Some(&v1), Some(r#"{"visibility":"Public"}"#), 200),
        case("PATCH /api/v1/ideas/{id}/visibility", Unauthorized, format!("/api/v1/ideas/{p1}/visibility"), Some(&v2), Some(r#"{"visibility":"Private"}"#), 403),
        case("PATCH /api/v1/ideas/{id}/visibility", Malformed, format!("/api/v1/ideas/{p1}/visibility"), Some(&v1), Some(r#"{"visibility":"Everyone"}"#), 400),
        case("PATCH /api/v1/ideas/{id}/visibility", Rule, format!("/api/v1/ideas/{p1}/visibility"), Some(&v1), Some(r#"{"visibility":"Team"}"#), 409)
            .header("if-match", "\"999\""),
        case("PATCH /api/v1/ideas/{id}/visibility", Valid, format!("/api/v1/ideas/{p1}/visibility"), Some(&admin), Some(r#"{"visibility":"Public"}"#), 200),
        case("PATCH /api/v1/ideas/{id}/visibility", Rule, "/api/v1/ideas/999/visibility", Some(&v1), Some(r#"{"visibility":"Public"}"#), 404),
        case("GET /api/v1/ideas", Valid, "/api/v1/ideas?tag=energy", None, None, 200).check(|v| v.as_array().is_some_and(|a| a.len() == 1)),
        case("GET /api/v1/ideas", Malformed, "/api/v1/ideas?visibility=Everyone", None, None, 400),
        case("GET /api/v1/ideas", Unauthorized, "/api/v1/ideas", bad, None, 401),
        case("GET /api/v1/ideas/search", Valid, "/api/v1/ideas/search?q=Solar+PUMPS", None, None, 200)
            .check(|v| v[0]["matched_terms"] == json!(["pumps", "solar"])),
        case("GET /api/v1/ideas/search", Malformed, "/api/v1/ideas/search?q=solar&limit=abc", None, None, 400),
        case("GET /api/v1/ideas/search", Rule, "/api/v1/ideas/search?q=solar&limit=0", None, None, 422),
        case("GET /api/v1/ideas/search", Unauthorized, "/api/v1/ideas/search?q=solar", bad, None, 401),
        case("GET /api/v1/ideas/best", Valid, "/api/v1/ideas/best", None, None, 200),
        case("GET /api/v1/ideas/best", Unauthorized, "/api/v1/ideas/best", bad, None, 401),
        case("GET /api/v1/ideas/best", Malformed, "/api/v1/ideas/best", None, None, 401).header(basic.0, basic.1.clone()),
        case("GET /api/v1/ideas/{id}/similar", Valid, format!("/api/v1/ideas/{p1}/similar"), None, None, 200),
        case("GET /api/v1/ideas/{id}/similar", Malformed, format!("/api/v1/ideas/{p1}/similar?k=abc"), None, None, 400),
        case("GET /api/v1/ideas/{id}/similar", Rule, format!("/api/v1/ideas/{s2}/similar"), Some(&v2), None, 404),
        case("GET /api/v1/ideas/{id}/similar", Rule, format!("/api/v1/ideas/{s2}/similar"), Some(&admin), None, 409),
        case("GET /api/v1/ideas/{id}/similar", Unauthorized, format!("/api/v1/ideas/{p1}/similar"), bad, None, 401),
        // moderation
        case("GET /api/v1/moderation/queue", Valid, "/api/v1/moderation/queue", Some(&editor), None, 200)
            .check(|v| v.as_array().is_some_and(|a| a.iter().all(|i| i["state"] == "Submitted"))),
        case("GET /api/v1/moderation/queue", Unauthorized, "/api/v1/moderation/queue", Some(&v1), None, 403),
        case("GET /api/v1/moderation/queue", Unauthorized, "/api/v1/moderation/queue", None, None, 403),
        case("GET /api/v1/moderation/queue", Unauthorized, "/api/v1/moderation/queue", bad, None, 401),
        case("GET /api/v1/moderation/queue", Malformed, "/api/v1/moderation/queue", None, None, 401).header(basic.0, basic.1.clone()),
        case("POST /api/v1/ideas/{id}/review", Unauthorized, format!("/api/v1/ideas/{s1}/review"), Some(&v1), Some(r#"{"outcome":"Publish"}"#), 403),
        case("POST /api/v1/ideas/{id}/review", Malformed, format!("/api/v1/ideas/{s1}/review"), Some(&editor), Some(r#"{"outcome":"Maybe"}"#), 400),
        case("POST /api/v1/ideas/{id}/review", Rule, format!("/api/v1/ideas/{s2}/review"), Some(&editor), Some(r#"{"outcome":"Reject"}"#), 422)
            .check(|v| code_is(v, "MissingReason")),
        case("POST /api/v1/ideas/{id}/review", Valid, format!("/api/v1/ideas/{s1}/review"), Some(&editor), Some(r#"{"outcome":"Publish"}"#), 200)
            .check(|v| v["outcome"] == "Publish"),
        case("POST /api/v1/ideas/{id}/review", Rule, format!("/api/v1/ideas/{s1}/review"), Some(&editor), Some(r#"{"outcome":"Publish"}"#), 409),
        case("POST /api/v1/ideas/{id}/review", Rule, "/api/v1/ideas/999/review", Some(&editor), Some(r#"{"outcome":"Publish"}"#), 404),
        // ratings
        case("PUT /api/v1/ideas/{id}/ratings/mine", Valid, format!("/api/v1/ideas/{p1}/ratings/mine"), Some(&v2), Some(r#"{"relevance":4,"feasibility":3,"originality":5,"impact":2}"#), 200)
            .check(|v| v["aggregate"]["rating_count"] == 1 && v["aggregate"]["smoothed_score"] == 3.083),
        case("PUT /api/v1/ideas/{id}/ratings/mine", Valid, format!("/api/v1/ideas/{p1}/ratings/mine"), Some(&v2), Some(r#"{"relevance":5,"feasibility":5,"originality":5,"impact":5}"#), 200)
            .check(|v| v["aggregate"]["rating_count"] == 1 && v["aggregate"]["smoothed_score"] == 3.333),
        case("PUT /api/v1/ideas/{id}/ratings/mine", Unauthorized, format!("/api/v1/ideas/{p1}/ratings/mine"), Some(&v1), Some(r#"{"relevance":5,"feasibility":5,"originality":5,"impact":5}"#), 403)
            .check(|v| code_is(v, "SelfRating")),
        case("PUT /api/v1/ideas/{id}/ratings/mine", Unauthorized, format!("/api/v1/ideas/{p1}/ratings/mine"), None, Some(r#"{"relevance":5,"feasibility":5,"originality":5,"impact":5}"#), 403),
        case("PUT /api/v1/ideas/{id}/ratings/mine", Rule, format!("/api/v1/ideas/{p1}/ratings/mine"), Some(&v3), Some(r#"{"relevance":6,"feasibility":5,"originality":5,"impact":5}"#), 422)
            .check(|v| code_is(v, "ScoreOutOfRange")),
        case("PUT /api/v1/ideas/{id}/ratings/mine", Malformed, format!("/api/v1/ideas/{p1}/ratings/mine"), Some(&v3), Some("{"), 400),
        case("PUT /api/v1/ideas/{id}/ratings/mine", Rule, format!("/api/v1/ideas/{s2}/ratings/mine"), Some(&v2), Some(r#"{"relevance":5,"feasibility":5,"originality":5,"impact":5}"#), 409)
            .check(|v| code_is(v, "IdeaNotPublished")),
        // comments
        case("POST /api/v1/ideas/{id}/comments", Valid, format!("/api/v1/ideas/{p1}/comments"), Some(&v3), Some(&format!(r#"{{"body":"Me too","parent_comment_id":{c1}}}"#)), 201),
        case("POST /api/v1/ideas/{id}/comments", Rule, format!("/api/v1/ideas/{p1}/comments"), Some(&v3), Some(&format!(r#"{{"body":"Too deep","parent_comment_id":{c2}}}"#)), 422)
            .check(|v| code_is(v, "BadParent")),
        case("POST /api/v1/ideas/{id}/comments", Rule, format!("/api/v1/ideas/{p1}/comments"), Some(&v3), Some(r#"{"body":""}"#), 422),
        case("POST /api/v1/ideas/{id}/comments", Unauthorized, format!("/api/v1/ideas/{p1}/comments"), None, Some(r#"{"body":"hello"}"#), 403),
        case("POST /api/v1/ideas/{id}/comments", Malformed, format!("/api/v1/ideas/{p1}/comments"), Some(&v3), Some(r#"{"body":5}"#), 400),
        case("GET /api/v1/ideas/{id}/comments", Valid, format!("/api/v1/ideas/{p1}/comments"), None, None, 200)
            .check(|v| v.as_array().is_some_and(|a| a.len() == 3)),
        case("GET /api/v1/ideas/{id}/comments", Rule, format!("/api/v1/ideas/{s2}/comments"), None, None, 404),
        case("GET /api/v1/ideas/{id}/comments", Malformed, "/api/v1/ideas/x/comments", None, None, 400),
        case("GET /api/v1/ideas/{id}/comments", Unauthorized, format!("/api/v1/ideas/{p1}/comments"), bad, None, 401),
        // projects
        case("POST /api/v1/projects", Valid, "/api/v1/projects", Some(&v2), Some(&format!(r#"{{"idea_id":{p1},"name":"Second pilot"}}"#)), 201)
            .check(|v| v["member_ids"].as_array().is_some_and(|m| m.len() == 1)),
        case("POST /api/v1/projects", Unauthorized, "/api/v1/projects", None, Some(&format!(r#"{{"idea_id":{p1},"name":"Guest pilot"}}"#)), 403),
        case("POST /api/v1/projects", Malformed, "/api/v1/projects", Some(&v2), Some(r#"{"idea_id":"x","name":"pilot"}"#), 400),
        case("POST /api/v1/projects", Rule, "/api/v1/projects", Some(&v1), Some(&format!(r#"{{"idea_id":{s2},"name":"Early pilot"}}"#)), 409),
        case("POST /api/v1/projects", Rule, "/api/v1/projects", Some(&v2), Some(&format!(r#"{{"idea_id":{p1},"name":""}}"#)), 422),
        case("POST /api/v1/projects", Rule, "/api/v1/projects", Some(&v2), Some(r#"{"idea_id":999,"name":"Nothing"}"#), 404),
        case("GET /api/v1/projects/{id}", Valid, format!("/api/v1/projects/{pj}"), None, None, 200),
        case("GET /api/v1/projects/{id}", Rule, "/api/v1/projects/999", None, None, 404),
        case("GET /api/v1/projects/{id}", Malformed, "/api/v1/projects/x", None, None, 400),
        case("GET /api/v1/projects/{id}", Unauthorized, format!("/api/v1/projects/{pj}"), bad, None, 401),
        case("POST /api/v1/projects/{id}/members", Valid, format!("/api/v1/projects/{pj}/members"), Some(&v2), None, 200)
            .check(|v| v["member_ids"].as_array().is_some_and(|m| m.len() == 2)),
        case("POST /api/v1/projects/{id}/members", Rule, format!("/api/v1/projects/{pj}/members"), Some(&v2), None, 409).check(|v| code_is(v, "AlreadyMember")),
        case("POST /api/v1/projects/{id}/members", Unauthorized, format!("/api/v1/projects/{pj}/members"), None, None, 403),
        case("POST /api/v1/projects/{id}/members", Malformed, "/api/v1/projects/x/members", Some(&v3), None, 400),
        case("POST /api/v1/projects/{id}/members", Rule, "/api/v1/projects/999/members", Some(&v3), None, 404),
        case("DELETE /api/v1/projects/{id}/members/{uid}", Unauthorized, format!("/api/v1/projects/{pj}/members/{v1_id}"), Some(&v2), None, 403),
        case("DELETE /api/v1/projects/{id}/members/{uid}", Rule, format!("/api/v1/projects/{pj}/members/{v1_id}"), Some(&v1), None, 409)
            .check(|v| code_is(v, "OwnerMustTransfer")),
        case("DELETE /api/v1/projects/{id}/members/{uid}", Valid, format!("/api/v1/projects/{pj}/members/{v2_id}"), Some(&v2), None, 200),
        case("DELETE /api/v1/projects/{id}/members/{uid}", Rule, format!("/api/v1/projects/{pj}/members/{v2_id}"), Some(&v2), None, 409).check(|v| code_is(v, "NotMember")),
        case("DELETE /api/v1/projects/{id}/members/{uid}", Malformed, format!("/api/v1/projects/{pj}/members/x"), Some(&v2), None, 400),
        case("DELETE /api/v1/projects/{id}/members/{uid}", Unauthorized, format!("/api/v1/projects/{pj}/members/{v2_id}"), None, None, 403),
        // tasks
        case("POST /api/v1/projects/{id}/tasks", Valid, format!("/api/v1/projects/{pj}/tasks"), Some(&v1), Some(r#"{"title":"Price pumps"}"#), 201),
        case("POST /api/v1/projects/{id}/tasks", Unauthorized, format!("/api/v1/projects/{pj}/tasks"), Some(&v2), Some(r#"{"title":"Not mine"}"#), 403),
        case("POST /api/v1/projects/{id}/tasks", Malformed, format!("/api/v1/projects/{pj}/tasks"), Some(&v1), Some(r#"{"name":"no title"}"#), 400),
        case("POST /api/v1/projects/{id}/tasks", Rule, format!("/api/v1/projects/{pj}/tasks"), Some(&v1), Some(&format!(r#"{{"title":"Outsider","assignee_id":{v3_id}}}"#)), 422)
            .check(|v| code_is(v, "AssigneeNotMember")),
        case("PUT /api/v1/tasks/{id}", Valid, format!("/api/v1/tasks/{t1}"), Some(&v1), Some(r#"{"title":"Survey wells","status":"InProgress"}"#), 200)
            .check(|v| v["status"] == "InProgress"),
        case("PUT /api/v1/tasks/{id}", Unauthorized, format!("/api/v1/tasks/{t1}"), Some(&v2), Some(r#"{"title":"Survey wells"}"#), 403),
        case("PUT /api/v1/tasks/{id}", Unauthorized, format!("/api/v1/tasks/{t1}"), None, Some(r#"{"title":"Survey wells"}"#), 403),
        case("PUT /api/v1/tasks/{id}", Valid, format!("/api/v1/tasks/{t1}"), Some(&v1), Some(r#"{"title":"Survey wells","status":"Done"}"#), 200),
        case("PUT /api/v1/tasks/{id}", Rule, format!("/api/v1/tasks/{t1}"), Some(&v1), Some(r#"{"title":"Survey wells","status":"Open"}"#), 409)
            .check(|v| code_is(v, "IllegalTransition")),
        case("PUT /api/v1/tasks/{id}", Rule, format!("/api/v1/tasks/{t1}"), Some(&v1), Some(r#"{"title":"Survey wells"}"#), 409).header("if-match", "\"1\""),
        case("PUT /api/v1/tasks/{id}", Malformed, format!("/api/v1/tasks/{t1}"), Some(&v1), Some(r#"{"title":"Survey wells","status":"Finished"}"#), 400),
        case("PUT /api/v1/tasks/{id}", Rule, "/api/v1/tasks/999", Some(&v1), Some(r#"{"title":"Survey wells"}"#), 404),
        case("PUT /api/v1/tasks/{id}", Rule, format!("/api/v1/tasks/{t1}"), Some(&v1), Some(r#"{"title":""}"#), 422),
        case("GET /api/v1/projects/{id}/progress", Valid, format!("/api/v1/projects/{pj}/progress"), Some(&v1), None, 200).check(|v| v["progress"] == 0.5),
        case("GET /api/v1/projects/{id}/progress", Rule, "/api/v1/projects/999/progress", Some(&v1), None, 404),
        case("GET /api/v1/projects/{id}/progress", Malformed, "/api/v1/projects/x/progress", Some(&v1), None, 400),
        case("GET /api/v1/projects/{id}/progress", Unauthorized, format!("/api/v1/projects/{pj}/progress"), bad, None, 401),
        case("GET /api/v1/projects/{id}/tasks.export", Valid, format!("/api/v1/projects/{pj}/tasks.export"), Some(&v1), None, 200)
            .check(|v| v.as_str().is_some_and(|s| s.lines().count() == 2 && s.lines().all(|l| serde_json::from_str::<Value>(l).is_ok()))),
        case("GET /api/v1/projects/{id}/tasks.export", Rule, "/api/v1/projects/999/tasks.export", Some(&v1), None, 404),
        case("GET /api/v1/projects/{id}/tasks.export", Malformed, "/api/v1/projects/x/tasks.export", Some(&v1), None, 400),
        case("GET /api/v1/projects/{id}/tasks.export", Unauthorized, format!("/api/v1/projects/{pj}/tasks.export"), bad, None, 401),
        case("POST /api/v1/projects/{id}/members", Valid, format!("/api/v1/projects/{pj}/members"), Some(&v3), None, 200),
        case("POST /api/v1/projects/{id}/owner", Unauthorized, format!("/api/v1/projects/{pj}/owner"), Some(&v3), Some(&format!(r#"{{"user_id":{v3_id}}}"#)), 403),
        case("POST /api/v1/projects/{id}/owner", Rule, format!("/api/v1/projects/{pj}/owner"), Some(&v1), Some(&format!(r#"{{"user_id":{v2_id}}}"#)), 409),
        case("POST /api/v1/projects/{id}/owner", Malformed, format!("/api/v1/projects/{pj}/owner"), Some(&v1), Some(r#"{"user_id":"x"}"#), 400),
        case("POST /api/v1/projects/{id}/owner", Valid, format!("/api/v1/projects/{pj}/owner"), Some(&v1), Some(&format!(r#"{{"user_id":{v3_id}}}"#)), 200)
            .check(|v| v["owner_id"].is_u64()),
        // incentives and administration
        case("GET /api/v1/leaderboard", Valid, "/api/v1/leaderboard", None, None, 200)
            .check(|v| v.as_array().is_some_and(|a| a.first().is_some_and(|e| e["reputation_points"].as_u64() >= Some(20)))),
        case("GET /api/v1/leaderboard", Rule, "/api/v1/leaderboard?n=0", None, None, 422),
        case("GET /api/v1/leaderboard", Malformed, "/api/v1/leaderboard?n=abc", None, None, 400),
        case("GET /api/v1/leaderboard", Unauthorized, "/api/v1/leaderboard", bad, None, 401),
        case("GET /api/v1/ledger.export", Valid, "/api/v1/ledger.export", Some(&admin), None, 200)
            .check(|v| v.as_str().is_some_and(|s| s.lines().all(|l| serde_json::from_str::<Value>(l).is_ok()))),
        case("GET /api/v1/ledger.export", Unauthorized, "/api/v1/ledger.export", Some(&v1), None, 403),
        case("GET /api/v1/ledger.export", Malformed, "/api/v1/ledger.export", None, None, 401).header(basic.0, basic.1.clone()),
        case("GET /api/v1/admin/users", Valid, "/api/v1/admin/users", Some(&admin), None, 200).check(|v| v.as_array().is_some_and(|a| a.len() == 6)),
        case("GET /api/v1/admin/users", Valid, "/api/v1/admin/users", Some(&editor), None, 200),
        case("GET /api/v1/admin/users", Unauthorized, "/api/v1/admin/users", Some(&v1), None, 403),
        case("GET /api/v1/admin/users", Unauthorized, "/api/v1/admin/users", None, None, 403),
        case("GET /api/v1/admin/users", Malformed, "/api/v1/admin/users", None, None, 401).header(basic.0, basic.1.clone()),
        case("PATCH /api/v1/admin/users/{id}/group", Valid, format!("/api/v1/admin/users/{v3_id}/group"), Some(&admin), Some(r#"{"group_id":4}"#), 200),
        case("PATCH /api/v1/admin/users/{id}/group", Unauthorized, format!("/api/v1/admin/users/{v3_id}/group"), Some(&editor), Some(r#"{"group_id":2}"#), 403),
        case("PATCH /api/v1/admin/users/{id}/group", Malformed, format!("/api/v1/admin/users/{v3_id}/group"), Some(&admin), Some(r#"{"group_id":"four"}"#), 400),
        case("PATCH /api/v1/admin/users/{id}/group", Rule, format!("/api/v1/admin/users/{v3_id}/group"), Some(&admin), Some(r#"{"group_id":9}"#), 422),
        case("PATCH /api/v1/admin/users/{id}/group", Rule, "/api/v1/admin/users/999/group", Some(&admin), Some(r#"{"group_id":4}"#), 404),
    ];

    let empty = TestApp::new();
    let mut per_endpoint: BTreeMap<&str, Vec<Kind>> = BTreeMap::new();
    let mut count = 0;
    for c in cases.drain(..) {
        let allowed = docs.get(c.endpoint).ok_or_else(|| format!("{} is not documented", c.endpoint))?;
        ensure!(allowed.contains(&c.expect), "{}: {} is not a documented status", c.endpoint, c.expect);
        let method = c.endpoint.split(' ').next().expect("method");
        let headers: Vec<(&str, &str)> = c.headers.iter().map(|(k, v)| (*k, v.as_str())).collect();
        let (status, body) = app.call_with(method, &c.path, c.token.as_deref(), c.body.as_deref(), &headers).await;
        ensure!(status.as_u16() == c.expect, "{} {} ({:?}): got {status}, expected {}: {body}", method, c.path, c.kind, c.expect);
        if !status.is_success() {
            ensure!(body["error"]["code"].is_string() && body["error"]["message"].is_string(), "{} {}: bad error body {body}", method, c.path);
        }
        if let Some(f) = c.check {
            ensure!(f(&body), "{} {} ({:?}): unexpected body {body}", method, c.path, c.kind);
        }
        per_endpoint.entry(c.endpoint).or_default().push(c.kind);
        count += 1;
    }
    let (s, _) = empty.call("GET", "/api/v1/ideas/best", None, None).await;
    ensure!(s == 204, "best idea on an empty platform: {s}");
    let (s, v) = app.call("GET", "/api/v1/no/such/route", None, None).await;
    ensure!(s == 404 && code_is(&v, "NoSuchRoute"), "unknown route: {s} {v}");

    for e in docs.keys() {
        let kinds = per_endpoint.get(e.as_str()).ok_or_else(|| format!("{e} has no cases"))?;
        ensure!(kinds.len() >= 3, "{e} has only {} cases", kinds.len());
        for k in [Valid, Unauthorized, Malformed] {
            ensure!(kinds.contains(&k), "{e} has no {k:?} case");
        }
    }
    Ok(format!("{count} cases over {} endpoints match the documented statuses", per_endpoint.len()))
}

pub fn ac9_api() -> Outcome {
    let rt = tokio::runtime::Builder::new_multi_thread().worker_threads(2).enable_all().build().map_err(|e| e.to_string())?;
    rt.block_on(run())
}
