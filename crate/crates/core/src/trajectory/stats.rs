use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::Trajectory;
use crate::env::ActionKind;
use crate::par::{self, Execution};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("dataset is empty")]
    EmptyDataset,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub trajectories: usize,
    pub mean_actions: f64,
    pub mean_queries: f64,
    pub mean_page_loads: f64,
    pub mean_facts: f64,
    /// Share of each action kind among all recorded actions.
    pub action_proportions: BTreeMap<ActionKind, f64>,
    pub mean_question_chars: f64,
    /// Over all facts; `None` when the dataset has none.
    pub mean_fact_chars: Option<f64>,
    /// Over trajectories that carry an answer.
    pub mean_answer_chars: Option<f64>,
}

#[derive(Default, Clone, Copy)]
struct Counts {
    actions: usize,
    per_kind: [usize; 10],
    facts: usize,
    fact_chars: usize,
    question_chars: usize,
    answers: usize,
    answer_chars: usize,
}

impl Counts {
    fn of(t: &Trajectory) -> Self {
        let mut c = Counts { actions: t.steps.len(), ..Counts::default() };
        for a in t.actions() {
            c.per_kind[a.kind().index()] += 1;
        }
        c.facts = t.facts.len();
        c.fact_chars = t.facts.iter().map(|f| f.text.chars().count()).sum();
        c.question_chars = t.question.chars().count();
        if let Some(a) = &t.answer {
            c.answers = 1;
            c.answer_chars = a.chars().count();
        }
        c
    }

    fn add(mut self, o: Counts) -> Self {
        self.actions += o.actions;
        for (a, b) in self.per_kind.iter_mut().zip(o.per_kind) {
            *a += b;
        }
        self.facts += o.facts;
        self.fact_chars += o.fact_chars;
        self.question_chars += o.question_chars;
        self.answers += o.answers;
        self.answer_chars += o.answer_chars;
        self
    }
}

pub fn compute_stats(dataset: &[Trajectory]) -> Result<DatasetStats, StatsError> {
    compute_stats_with(dataset, Execution::default())
}

/// Integer totals are accumulated first, so the result does not depend on
/// the execution strategy.
pub fn compute_stats_with(dataset: &[Trajectory], exec: Execution) -> Result<DatasetStats, StatsError> {
    if dataset.is_empty() {
        return Err(StatsError::EmptyDataset);
    }
    let total = par::map(exec, dataset, Counts::of).into_iter().fold(Counts::default(), Counts::add);
    let n = dataset.len() as f64;
    let per = |x: usize| x as f64 / n;
    let action_proportions = ActionKind::ALL
        .into_iter()
        .map(|k| {
            let share = if total.actions == 0 { 0.0 } else { total.per_kind[k.index()] as f64 / total.actions as f64 };
            (k, share)
        })
        .collect();
    Ok(DatasetStats {
        trajectories: dataset.len(),
        mean_actions: per(total.actions),
        mean_queries: per(total.per_kind[ActionKind::Search.index()]),
        mean_page_loads: per(total.per_kind[ActionKind::LoadPage1.index()]
            + total.per_kind[ActionKind::LoadPage2.index()]
            + total.per_kind[ActionKind::LoadPage3.index()]),
        mean_facts: per(total.facts),
        action_proportions,
        mean_question_chars: per(total.question_chars),
        mean_fact_chars: (total.facts > 0).then(|| total.fact_chars as f64 / total.facts as f64),
        mean_answer_chars: (total.answers > 0).then(|| total.answer_chars as f64 / total.answers as f64),
    })
}

impl DatasetStats {
    /// `actions/queries/page loads/facts` means, e.g. `40/2/3/4`.
    pub fn headline(&self) -> String {
        format!("{}/{}/{}/{}", self.mean_actions, self.mean_queries, self.mean_page_loads, self.mean_facts)
    }
}
