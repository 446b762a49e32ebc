mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use searchenv_core::agent::{
    encode_fact_span, parse_action_text, run_episode, serialize_state, AgentError, AgentModules, RunnerConfig,
    ScriptStep, ScriptedAgent, SerializeConfig, FORMAT_HEADER,
};
use searchenv_core::trajectory::{validate_trajectory, EpisodeStatus};
use searchenv_core::{Action, ActionKind, Session, Window};

use common::*;

fn window_text(s: &Session) -> String {
    match &s.state().window {
        Window::Browsing(w) => w.text.clone(),
        Window::Search(_) => panic!("not browsing"),
    }
}

#[test]
fn fresh_state_rendering() {
    let s = Session::new("麦田怪圈是什么？", 100, provider()).unwrap();
    let text = serialize_state(s.state(), &SerializeConfig::default());
    let expected = format!(
        "{FORMAT_HEADER}\n<<question>>\n麦田怪圈是什么？\n<<query>>\n<<history>>\n<<previous window>>\n<<current window>>\nmode: search\nquery: \n(no results)\n<<facts>>\n<<remaining actions>>\n100\n"
    );
    assert_eq!(text, expected);
}

#[test]
fn only_last_two_windows_are_rendered() {
    let mut s = Session::new(EPISODE_QUESTION, 100, provider()).unwrap();
    s.apply(Action::search("麦田怪圈是什么")).unwrap();
    s.apply(Action::LoadPage1).unwrap();
    let w2 = window_text(&s);
    s.apply(Action::ScrollDown).unwrap();
    let w3 = window_text(&s);
    let text = serialize_state(s.state(), &SerializeConfig::default());
    assert!(text.contains(&w2));
    assert!(text.contains(&w3));
    assert!(!text.contains("mode: search"), "first window leaked");
    assert!(!text.contains("results 1-3"));
    assert!(text.contains("1. Search: 麦田怪圈是什么\n"));
    assert!(text.contains("2. Load Page <1>: 麦田怪圈 - 百科\n"));
    assert!(text.contains("<<remaining actions>>\n97\n"));
}

#[test]
fn query_text_appears_verbatim() {
    let mut s = Session::new(EPISODE_QUESTION, 100, provider()).unwrap();
    s.apply(Action::search("麦田怪圈")).unwrap();
    let text = serialize_state(s.state(), &SerializeConfig::default());
    let history = text.split("<<history>>\n").nth(1).unwrap().split("<<previous window>>").next().unwrap();
    assert_eq!(history, "1. Search: 麦田怪圈\n");
    assert!(text.contains("<<query>>\n麦田怪圈\n"));
}

#[test]
fn sentinel_like_content_is_escaped() {
    let s = Session::new("<<facts>>\n\\x", 100, provider()).unwrap();
    let text = serialize_state(s.state(), &SerializeConfig::default());
    assert!(text.contains("<<question>>\n\\<<facts>>\n\\\\x\n"));
    assert_eq!(text.matches("\n<<facts>>\n").count(), 1);
}

#[test]
fn oldest_history_is_dropped_first() {
    let s = episode_session();
    let full = serialize_state(s.state(), &SerializeConfig { char_budget: usize::MAX });
    let budget = full.chars().count() - 60;
    let cut = serialize_state(s.state(), &SerializeConfig { char_budget: budget });
    assert!(cut.chars().count() <= budget);
    assert!(cut.contains("earlier actions omitted)"));
    assert!(!cut.contains("\n1. Search:"));
    assert!(cut.contains("\n40. Finish\n"));
}

#[test]
fn parse_action_examples() {
    assert_eq!(parse_action_text("Search").unwrap(), ActionKind::Search);
    assert_eq!(parse_action_text(" Load Page <2>\n").unwrap(), ActionKind::LoadPage2);
    assert!(parse_action_text("Browse").is_err());
}

#[test]
fn scripted_four_step_episode() {
    let q = "crop circles";
    let mut probe = Session::new(q, 100, provider()).unwrap();
    probe.apply(Action::search(q)).unwrap();
    probe.apply(Action::LoadPage1).unwrap();
    let w = window_text(&probe);
    let enc = encode_fact_span(&w, 0..w.chars().count(), 10).unwrap();

    let mut agent = ScriptedAgent::new([
        ScriptStep::search(q),
        ScriptStep::act(ActionKind::LoadPage1),
        ScriptStep::quote(enc.to_string()),
        ScriptStep::act(ActionKind::Finish),
    ]);
    let mut s = Session::new(q, 100, provider()).unwrap();
    let t = run_episode(&mut agent, &mut s, &RunnerConfig::default());
    assert_eq!(t.steps.len(), 4);
    assert_eq!(t.facts.len(), 1);
    assert_eq!(t.facts[0].text, w);
    assert_eq!(t.status, EpisodeStatus::Completed);
    assert!(validate_trajectory(&t).is_empty());
}

struct Always(&'static str);

impl AgentModules for Always {
    fn predict_action(&mut self, _: &str) -> Result<String, AgentError> {
        Ok(self.0.to_string())
    }
    fn generate_query(&mut self, _: &str) -> Result<String, AgentError> {
        Ok("crop circles".into())
    }
    fn extract_fact(&mut self, _: &str) -> Result<String, AgentError> {
        Ok("[s]nowhere[e]".into())
    }
}

#[test]
fn stubborn_agent_is_force_finished() {
    let mut s = Session::new("q", 100, provider()).unwrap();
    let t = run_episode(&mut Always("Scroll Up"), &mut s, &RunnerConfig::default());
    assert_eq!(t.steps.len(), 1);
    assert_eq!(t.steps[0].action, Action::Finish);
    assert!(validate_trajectory(&t).is_empty());

    let mut s = Session::new("q", 100, provider()).unwrap();
    let t = run_episode(&mut Always("Browse"), &mut s, &RunnerConfig { max_retries: 0, ..Default::default() });
    assert_eq!(t.steps.len(), 1);
}

#[test]
fn searching_agent_exhausts_budget() {
    let mut s = Session::new("q", 5, provider()).unwrap();
    let t = run_episode(&mut Always("Search"), &mut s, &RunnerConfig::default());
    assert_eq!(t.steps.len(), 5);
    assert_eq!(t.queries(), 5);
    assert!(validate_trajectory(&t).is_empty());
}

#[test]
fn undecodable_fact_counts_as_a_retry() {
    let mut agent = ScriptedAgent::new([
        ScriptStep::search("crop circles"),
        ScriptStep::act(ActionKind::LoadPage1),
        ScriptStep::quote("[s]不存在的[e]文本"),
        ScriptStep::quote("no markers"),
        ScriptStep::act(ActionKind::ScrollDown),
    ]);
    let mut s = Session::new("q", 100, provider()).unwrap();
    let t = run_episode(&mut agent, &mut s, &RunnerConfig::default());
    let kinds: Vec<_> = t.actions().map(Action::kind).collect();
    assert_eq!(kinds, [ActionKind::Search, ActionKind::LoadPage1, ActionKind::ScrollDown, ActionKind::Finish]);
}

#[test]
fn backend_failure_marks_trajectory_failed() {
    let mut agent = ScriptedAgent::new([
        ScriptStep::search("麦田怪圈是如何形成的"),
        ScriptStep::act(ActionKind::ScrollDown),
        ScriptStep::act(ActionKind::LoadPage2),
    ]);
    let mut s = Session::new("q", 100, provider()).unwrap();
    let t = run_episode(&mut agent, &mut s, &RunnerConfig::default());
    assert_eq!(t.steps.len(), 2);
    assert!(matches!(t.status, EpisodeStatus::Failed { .. }));
}

struct Broken;

impl AgentModules for Broken {
    fn predict_action(&mut self, _: &str) -> Result<String, AgentError> {
        Err(AgentError::Transport("connection refused".into()))
    }
    fn generate_query(&mut self, _: &str) -> Result<String, AgentError> {
        unreachable!()
    }
    fn extract_fact(&mut self, _: &str) -> Result<String, AgentError> {
        unreachable!()
    }
}

#[test]
fn transport_failure_marks_trajectory_failed() {
    let mut s = Session::new("q", 100, provider()).unwrap();
    let t = run_episode(&mut Broken, &mut s, &RunnerConfig::default());
    assert!(t.steps.is_empty());
    assert_eq!(t.status, EpisodeStatus::Failed { reason: "agent transport failed: connection refused".into() });
}

#[test]
fn replaying_a_recording_reproduces_every_state() {
    let recorded = episode_trajectory();
    let mut agent = ScriptedAgent::from_trajectory(&recorded).unwrap();
    let mut s = Session::replaying(&recorded.question, recorded.max_actions, &recorded.snapshots).unwrap();
    let t = run_episode(&mut agent, &mut s, &RunnerConfig::default());
    assert_eq!(t, recorded);
}

/// Emits random action names, queries and span encodings, some of them garbage.
struct Noisy(ChaCha8Rng);

impl AgentModules for Noisy {
    fn predict_action(&mut self, _: &str) -> Result<String, AgentError> {
        if self.0.gen_bool(0.1) {
            return Ok("Jump".into());
        }
        Ok(ActionKind::ALL.choose(&mut self.0).unwrap().name().to_string())
    }
    fn generate_query(&mut self, _: &str) -> Result<String, AgentError> {
        Ok(QUERIES.choose(&mut self.0).unwrap().to_string())
    }
    fn extract_fact(&mut self, state: &str) -> Result<String, AgentError> {
        let window = state.split("<<current window>>\n").nth(1).unwrap_or("");
        let chars: Vec<char> = window.chars().filter(|c| *c != '\n').collect();
        if chars.len() < 4 || self.0.gen_bool(0.2) {
            return Ok("[s]??[e]".into());
        }
        let i = self.0.gen_range(0..chars.len() - 2);
        let n = self.0.gen_range(1..=3);
        let start: String = chars[i..(i + n).min(chars.len())].iter().collect();
        let j = self.0.gen_range(i..chars.len());
        let end: String = chars[j..(j + n).min(chars.len())].iter().collect();
        Ok(format!("[s]{start}[e]{end}"))
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn episodes_always_validate(seed in any::<u64>(), max in 1usize..=60) {
        let mut s = Session::new(EPISODE_QUESTION, max, provider()).unwrap();
        let t = run_episode(&mut Noisy(ChaCha8Rng::seed_from_u64(seed)), &mut s, &RunnerConfig::default());
        if t.status == EpisodeStatus::Completed {
            prop_assert_eq!(validate_trajectory(&t), vec![]);
        } else {
            prop_assert!(t.steps.len() < max);
        }
    }
}
