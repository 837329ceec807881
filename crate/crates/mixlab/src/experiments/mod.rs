//! Configuration-driven experiment runners, one per estimate-level check.

pub mod cascade;
pub mod commutator;
pub mod common;
pub mod diffusion;
pub mod mixing;
pub mod perturbation;
pub mod regularity;

use crate::config::Config;
use crate::report::ExperimentReport;
use common::ExpError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    StabilityCascade,
    Mixing,
    FieldPerturbation,
    VanishingDiffusion,
    Regularity,
    CommutatorIntegral,
    BesovDecay,
    CounterexamplePart1,
    CounterexamplePart2,
}

impl ExperimentKind {
    pub const ALL: &[ExperimentKind] = &[
        ExperimentKind::StabilityCascade,
        ExperimentKind::Mixing,
        ExperimentKind::FieldPerturbation,
        ExperimentKind::VanishingDiffusion,
        ExperimentKind::Regularity,
        ExperimentKind::CommutatorIntegral,
        ExperimentKind::BesovDecay,
        ExperimentKind::CounterexamplePart1,
        ExperimentKind::CounterexamplePart2,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::StabilityCascade => "stability_cascade",
            ExperimentKind::Mixing => "mixing",
            ExperimentKind::FieldPerturbation => "field_perturbation",
            ExperimentKind::VanishingDiffusion => "vanishing_diffusion",
            ExperimentKind::Regularity => "regularity",
            ExperimentKind::CommutatorIntegral => "commutator_integral",
            ExperimentKind::BesovDecay => "besov_decay",
            ExperimentKind::CounterexamplePart1 => "counterexample_part1",
            ExperimentKind::CounterexamplePart2 => "counterexample_part2",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|k| k.name() == name)
    }
}

pub fn run(kind: ExperimentKind, cfg: &Config, seed: u64) -> Result<ExperimentReport, ExpError> {
    match kind {
        ExperimentKind::StabilityCascade => cascade::run(cfg, seed),
        ExperimentKind::Mixing => mixing::run(cfg, seed),
        ExperimentKind::FieldPerturbation => perturbation::run(cfg, seed),
        ExperimentKind::VanishingDiffusion => diffusion::run(cfg, seed),
        ExperimentKind::Regularity => regularity::run(cfg, seed),
        ExperimentKind::CommutatorIntegral => commutator::run_integral(cfg, seed),
        ExperimentKind::BesovDecay => commutator::run_besov(cfg, seed),
        ExperimentKind::CounterexamplePart1 => commutator::run_counterexample_part1(cfg, seed),
        ExperimentKind::CounterexamplePart2 => commutator::run_counterexample_part2(cfg, seed),
    }
}
