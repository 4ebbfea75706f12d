//! End-to-end runs: dataset → black box → digital-twin transitions → program.

use serde::Serialize;
use thiserror::Error;

use crate::audit::{audit_pair, AuditConfig, AuditError, PairReport, RunMeta, RunPair};
use crate::blackbox::{extract_transitions, train, ModelConfig, ModelError, TrainedModel};
use crate::faircv::{build_scenario, BiasMode, Dataset, Demographic, Scenario};
use crate::io::feature_states;
use crate::mvl::{find_conflicts, Conflict, Program, Schema, Transition};
use crate::pride::{pride, LearnError, LearnerConfig};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error(transparent)]
    Audit(#[from] AuditError),
}

#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub scenario: Scenario,
    pub bias: BiasMode,
    pub schema: Schema,
    /// Ground-truth transitions from the dataset.
    pub observed: Vec<Transition>,
    pub model: TrainedModel,
    /// The model's predictions on every observed feature state.
    pub twin: Vec<Transition>,
    pub program: Program,
}

pub fn run_scenario(
    dataset: &Dataset,
    scenario: Scenario,
    bias: BiasMode,
    model_cfg: &ModelConfig,
    learner_cfg: &LearnerConfig,
) -> Result<ScenarioRun, PipelineError> {
    let (schema, observed) = build_scenario(dataset, &scenario, bias);
    let model = train(&schema, &observed, model_cfg)?;
    let twin = extract_transitions(&model, &feature_states(&observed))?;
    let program = pride(&twin, &schema, learner_cfg)?;
    Ok(ScenarioRun { scenario, bias, schema, observed, model, twin, program })
}

/// How well a program's weighted replay reproduces a set of labels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fidelity {
    pub transitions: usize,
    pub agreeing: usize,
    pub conflicts: Vec<Conflict>,
}

impl Fidelity {
    pub fn accuracy(&self) -> f64 {
        self.agreeing as f64 / self.transitions.max(1) as f64
    }
}

pub fn replay_fidelity(program: &Program, ts: &[Transition]) -> Fidelity {
    let agreeing = ts
        .iter()
        .filter(|t| {
            program
                .replay(&t.features)
                .iter()
                .zip(t.targets.values())
                .all(|(got, &want)| *got == Some(want))
        })
        .count();
    Fidelity { transitions: ts.len(), agreeing, conflicts: find_conflicts(ts) }
}

fn meta(run: &ScenarioRun, seed: u64) -> RunMeta {
    RunMeta {
        id: format!("{}-{}-{}", run.scenario.demographic.attribute(), run.scenario.id(), run.bias.label()),
        scenario: Some(run.scenario.id()),
        bias: Some(run.bias.label().to_string()),
        seed: Some(seed),
    }
}

/// Unbiased and biased runs of one scenario and their audit.
#[derive(Debug, Clone)]
pub struct StudyPair {
    pub unbiased: ScenarioRun,
    pub biased: ScenarioRun,
    pub report: PairReport,
}

/// Trains and explains both the unbiased and the demographic-biased score of
/// a scenario. The gender study leaves `i3`/`i7` out of the top-driver
/// ranking, since they are perturbed together with gender.
pub fn study_pair(
    dataset: &Dataset,
    scenario: Scenario,
    model_cfg: &ModelConfig,
    learner_cfg: &LearnerConfig,
) -> Result<StudyPair, PipelineError> {
    let biased_mode = match scenario.demographic {
        Demographic::Gender => BiasMode::Gender,
        Demographic::Ethnicity => BiasMode::Ethnicity,
    };
    let unbiased = run_scenario(dataset, scenario, BiasMode::Unbiased, model_cfg, learner_cfg)?;
    let biased = run_scenario(dataset, scenario, biased_mode, model_cfg, learner_cfg)?;
    let cfg = AuditConfig {
        length_weighted: false,
        exclude_from_top: match scenario.demographic {
            Demographic::Gender => vec!["i3".into(), "i7".into()],
            Demographic::Ethnicity => Vec::new(),
        },
    };
    let pair = RunPair {
        label: format!("{}-{}", scenario.demographic.attribute(), scenario.id()),
        unbiased: (&unbiased.program, meta(&unbiased, model_cfg.seed)),
        biased: (&biased.program, meta(&biased, model_cfg.seed)),
    };
    let report = audit_pair(&pair, &cfg)?;
    Ok(StudyPair { unbiased, biased, report })
}
