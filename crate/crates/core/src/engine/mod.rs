//! Model generation for theories with open predicates.

mod answer;
mod check;
mod solve;
mod static_eval;

use std::collections::BTreeSet;

use thiserror::Error;

pub use answer::Answer;
pub use check::{check_model, check_model_with_query, CheckError};

use crate::kr::{KrError, Theory};
use crate::logic::Formula;
use crate::temporal::{TemporalError, TimePoint};
use solve::{Engine, State, Step};

#[derive(Clone, Debug)]
pub struct SolveConfig {
    /// Reduction steps before the search gives up.
    pub budget: u64,
    /// Labelling picks the earliest feasible value at or after this point.
    pub anchor: TimePoint,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig { budget: 1_000_000, anchor: TimePoint { year: 1999, month: 1, day: 1, hour: 0 } }
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("no model found within the budget of {0} steps")]
    BudgetExhausted(u64),
    #[error("floundering: cannot decide {0}")]
    Floundering(String),
    #[error(transparent)]
    Temporal(#[from] TemporalError),
    #[error(transparent)]
    Query(#[from] KrError),
}

/// Lazily generated models of a theory together with a query, in search
/// order. The sequence ends early with an error when the budget runs out.
pub struct Solutions<'t> {
    engine: Engine<'t>,
    stack: Vec<State>,
    steps: u64,
    stopped: bool,
}

impl Solutions<'_> {
    pub fn steps(&self) -> u64 {
        self.steps
    }
}

impl Iterator for Solutions<'_> {
    type Item = Result<Answer, SolveError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.stopped {
            return None;
        }
        while let Some(mut state) = self.stack.pop() {
            loop {
                if self.steps >= self.engine.budget() {
                    self.stopped = true;
                    return Some(Err(SolveError::BudgetExhausted(self.engine.budget())));
                }
                self.steps += 1;
                match self.engine.step(&mut state) {
                    Ok(Step::Continue) => {}
                    Ok(Step::Fail) => break,
                    Ok(Step::Branch(branches)) => {
                        self.stack.extend(branches.into_iter().rev());
                        break;
                    }
                    Ok(Step::Done(answer)) => return Some(Ok(*answer)),
                    Err(e) => {
                        self.stopped = true;
                        return Some(Err(e));
                    }
                }
            }
        }
        self.stopped = true;
        None
    }
}

/// Starts the search for models of `theory` in which `query` holds.
pub fn solve<'t>(theory: &'t Theory, query: &Formula, config: SolveConfig) -> Result<Solutions<'t>, SolveError> {
    theory.check_formula(query)?;
    let (engine, state) = Engine::new(theory, query, config);
    Ok(Solutions { engine, stack: vec![state], steps: 0, stopped: false })
}

/// Up to `n` models, pairwise distinct once time values are ignored, and
/// minimal: no model's abduced atoms strictly contain another's. The whole
/// search space is explored before anything is returned.
pub fn enumerate_models(theory: &Theory, query: &Formula, n: usize, config: SolveConfig) -> Result<Vec<Answer>, SolveError> {
    let mut found: Vec<(BTreeSet<String>, Answer)> = Vec::new();
    for answer in solve(theory, query, config)? {
        let answer = answer?;
        let key = answer.relational_key();
        if found.iter().any(|(k, _)| *k == key) {
            continue;
        }
        found.push((key, answer));
    }
    let minimal: Vec<Answer> = found
        .iter()
        .filter(|(k, _)| !found.iter().any(|(other, _)| other.len() < k.len() && other.is_subset(k)))
        .map(|(_, a)| a.clone())
        .collect();
    Ok(minimal.into_iter().take(n).collect())
}
