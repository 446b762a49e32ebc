#![allow(dead_code)]

pub mod oracles;

use std::path::PathBuf;
use std::sync::Arc;

use searchenv_core::backend::{Blocklist, CorpusSearch, FixtureProvider, SearchProvider, SearchResult};
use searchenv_core::trajectory::Trajectory;
use searchenv_core::{Action, Session};

pub const EPISODE_QUESTION: &str = "麦田怪圈是什么？它们是怎样形成的？";

pub fn fixtures() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../core/fixtures"))
}

pub fn corpus_dir() -> PathBuf {
    fixtures().join("crop_circles")
}

pub fn blocklist() -> Blocklist {
    Blocklist::from_file(&corpus_dir().join("blocklist.txt")).unwrap()
}

pub fn provider() -> Arc<dyn SearchProvider> {
    Arc::new(FixtureProvider::open(corpus_dir(), blocklist()).unwrap())
}

pub fn episode_actions() -> Vec<Action> {
    let raw = std::fs::read_to_string(corpus_dir().join("episode_actions.json")).unwrap();
    serde_json::from_str(&raw).unwrap()
}

pub fn episode_facts() -> Vec<String> {
    let raw = std::fs::read_to_string(corpus_dir().join("episode_facts.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&raw).unwrap();
    serde_json::from_value(v["facts"].clone()).unwrap()
}

pub fn episode_session() -> Session {
    let mut s = Session::new(EPISODE_QUESTION, 100, provider()).unwrap();
    for (i, a) in episode_actions().into_iter().enumerate() {
        if let Err(e) = s.apply(a.clone()) {
            panic!("step {i} ({a}) rejected: {e}");
        }
    }
    s
}

pub fn episode_trajectory() -> Trajectory {
    episode_session().trajectory(None, None)
}

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use searchenv_core::backend::{CorpusManifest, SnapshotStore, Snapshots, MANIFEST_FILE};
use searchenv_core::env::EnvError;
use searchenv_core::trajectory::validate_trajectory;
use searchenv_core::{ActionKind, SessionState, Window};

pub const QUERIES: [&str; 5] = ["麦田怪圈是什么", "麦田怪圈是如何形成的", "crop circles", "没有结果的查询", "   "];

/// Every search window and page the fixture corpus can serve.
pub fn warm_snapshots() -> Snapshots {
    let store = SnapshotStore::new(provider());
    for q in &QUERIES[..4] {
        for offset in (0..=15).step_by(3) {
            store.search(q, offset).unwrap();
        }
    }
    let raw = std::fs::read_to_string(corpus_dir().join(MANIFEST_FILE)).unwrap();
    let manifest: CorpusManifest = serde_json::from_str(&raw).unwrap();
    for p in &manifest.pages {
        let _ = store.page(&p.url);
    }
    store.snapshots()
}

pub fn random_action(rng: &mut ChaCha8Rng, state: &SessionState) -> Action {
    let legal = state.legal_actions();
    let mut kind = if !legal.is_empty() && rng.gen_bool(0.75) {
        *legal.choose(rng).unwrap()
    } else {
        *ActionKind::ALL.choose(rng).unwrap()
    };
    if kind == ActionKind::Finish && legal.len() > 1 && rng.gen_bool(0.85) {
        let others: Vec<ActionKind> = legal.iter().copied().filter(|k| *k != ActionKind::Finish).collect();
        kind = *others.choose(rng).unwrap();
    }
    match kind {
        ActionKind::Search => Action::search(*QUERIES.choose(rng).unwrap()),
        ActionKind::Quote => {
            let len = match &state.window {
                Window::Browsing(w) => w.char_len(),
                Window::Search(_) => 10,
            };
            let start = rng.gen_range(0..=len);
            let end = rng.gen_range(start..=len + 2);
            Action::Quote { start, end }
        }
        k => Action::bare(k).unwrap(),
    }
}

fn count(state: &SessionState, kind: ActionKind) -> usize {
    state.history.iter().filter(|h| h.action == kind).count()
}

fn check_invariants(state: &SessionState) -> Result<(), String> {
    if state.actions_remaining + state.history.len() != state.max_actions {
        return Err(format!("budget: {} + {} != {}", state.actions_remaining, state.history.len(), state.max_actions));
    }
    for w in [Some(&state.window), state.previous_window.as_ref()].into_iter().flatten() {
        match w {
            Window::Browsing(b) if b.char_len() > 500 => return Err(format!("window of {} chars", b.char_len())),
            Window::Search(s) if s.results.len() > 3 => return Err(format!("{} results", s.results.len())),
            _ => {}
        }
    }
    let expected = count(state, ActionKind::Quote) - count(state, ActionKind::Merge);
    if state.facts.len() != expected {
        return Err(format!("{} facts, expected {expected}", state.facts.len()));
    }
    Ok(())
}

/// One random episode over `snapshots`, checking every state-machine
/// invariant along the way and the replay of the recorded trajectory.
pub fn random_walk(seed: u64, snapshots: &Snapshots) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max = if rng.gen_bool(0.3) { rng.gen_range(1..=12) } else { rng.gen_range(13..=100) };
    let mut session = Session::replaying("麦田怪圈是怎样形成的？", max, snapshots).map_err(|e| e.to_string())?;
    let len = rng.gen_range(1..=120);
    let mut applied = 0;
    for _ in 0..len {
        if rng.gen_bool(0.04) {
            let _ = session.undo();
            check_invariants(session.state())?;
            continue;
        }
        let action = random_action(&mut rng, session.state());
        let before = session.state().clone();
        let steps_before = session.steps().len();
        match session.apply(action.clone()) {
            Ok(obs) => {
                applied += 1;
                if obs.actions_remaining != session.state().actions_remaining {
                    return Err("observation budget differs from state".into());
                }
            }
            Err(e) => {
                if *session.state() != before || session.steps().len() != steps_before {
                    return Err(format!("rejected {action} ({e}) changed the state"));
                }
                if matches!(e, EnvError::SessionClosed) != before.is_closed() {
                    return Err(format!("closed={} but got {e}", before.is_closed()));
                }
            }
        }
        check_invariants(session.state())?;
        if session.state().is_closed() {
            break;
        }
    }

    if !session.state().is_closed() {
        session.apply(Action::Finish).map_err(|e| e.to_string())?;
    }
    let t = session.trajectory(None, None);
    let violations = validate_trajectory(&t);
    if !violations.is_empty() {
        return Err(format!("validation: {violations:?}"));
    }
    let mut again = Session::replaying(&t.question, t.max_actions, &t.snapshots).map_err(|e| e.to_string())?;
    for step in &t.steps {
        again.apply(step.action.clone()).map_err(|e| format!("replay rejected {}: {e}", step.action))?;
    }
    let a = serde_json::to_vec(session.state()).unwrap();
    let b = serde_json::to_vec(again.state()).unwrap();
    if a != b {
        return Err("replay is not byte-identical".into());
    }
    if serde_json::to_vec(&again.trajectory(None, None)).unwrap() != serde_json::to_vec(&t).unwrap() {
        return Err("replayed trajectory differs".into());
    }
    Ok(applied)
}

pub fn random_paragraph(rng: &mut ChaCha8Rng, alphabet: &[char]) -> String {
    let n = rng.gen_range(0..400);
    (0..n).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect()
}

/// A corpus of random pages all returned for `question`.
pub fn random_provider(rng: &mut ChaCha8Rng, question: &str) -> FixtureProvider {
    let alphabet: Vec<char> = "麦田怪圈成因人为自然磁场的是，。".chars().collect();
    let n_pages = rng.gen_range(0..14);
    let mut results = Vec::new();
    let mut pages = Vec::new();
    for p in 0..n_pages {
        let url = format!("https://p{p}.example/");
        let body: Vec<String> =
            (0..rng.gen_range(0..30)).map(|_| format!("<p>{}</p>", random_paragraph(rng, &alphabet))).collect();
        pages.push((url.clone(), "text/html".to_string(), format!("<html><body>{}</body></html>", body.concat())));
        results.push(SearchResult { title: format!("p{p}"), url, snippet: String::new() });
    }
    FixtureProvider::from_parts(vec![CorpusSearch { query: question.into(), results }], pages, Blocklist::default())
        .unwrap()
}
