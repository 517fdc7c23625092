//! Staged driver: build every reduction stage for a formula, run the
//! per-stage oracles where budgets permit, and cross-check the verdicts.

use crate::budget::Budget;
use crate::channel::{span_of, solve_exact, SolveOutcome};
use crate::cnf::{satisfying_subsets, sat_oracle, CnfError, CnfFormula};
use crate::family::{cnf_to_families, family_intersect, FamilyError, FamilyFunction, Selector};
use crate::gadget::{cmw_to_ca, GadgetError, MergedGadget};
use crate::matching::{cmw_oracle, cnf_to_cmw, selector_to_matching, CmwStage, MatchingError};
use crate::channel::ChannelError;
use num_bigint::BigUint;
use std::fmt;
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Cnf(#[from] CnfError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error(transparent)]
    Gadget(#[from] GadgetError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

impl PipelineError {
    /// True when the failure is an exhausted enumeration budget rather
    /// than bad input.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            PipelineError::Cnf(CnfError::Budget(_))
                | PipelineError::Family(FamilyError::Budget(_))
                | PipelineError::Matching(MatchingError::ReductionTooLarge(_))
                | PipelineError::Matching(MatchingError::OracleTooLarge(_))
                | PipelineError::Channel(ChannelError::Budget(_))
        )
    }
}

/// Every stage image of one formula, each the reduction of the previous.
pub struct StageArtifacts {
    pub formula: CnfFormula,
    pub consistency_family: FamilyFunction,
    pub satisfaction_family: FamilyFunction,
    pub cmw: CmwStage,
    pub merged: MergedGadget,
}

pub fn build_artifacts(formula: &CnfFormula, budget: Budget) -> Result<StageArtifacts, PipelineError> {
    let (consistency_family, satisfaction_family) = cnf_to_families(formula);
    let cmw = cnf_to_cmw(formula, budget)?;
    let merged = cmw_to_ca(&cmw.consistency_graph, &cmw.satisfaction_graph)?;
    Ok(StageArtifacts {
        formula: formula.clone(),
        consistency_family,
        satisfaction_family,
        cmw,
        merged,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StageVerdict {
    Yes,
    No,
    /// YES direction confirmed by an explicit coloring; the exhaustive
    /// direction was not run.
    ConstructiveYes,
    Skipped { reason: String },
}

impl StageVerdict {
    /// The boolean answer, when the stage was evaluated.
    pub fn decided(&self) -> Option<bool> {
        match self {
            StageVerdict::Yes | StageVerdict::ConstructiveYes => Some(true),
            StageVerdict::No => Some(false),
            StageVerdict::Skipped { .. } => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct StageReport {
    pub stage: &'static str,
    pub verdict: StageVerdict,
    pub detail: String,
    pub wall: Duration,
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub stages: Vec<StageReport>,
    pub disagreements: Vec<String>,
    /// A budget skip hit the satisfiability or family stage, leaving
    /// nothing to cross-check.
    pub mandatory_skipped: bool,
}

impl VerificationReport {
    pub fn agreed(&self) -> bool {
        self.disagreements.is_empty()
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for report in &self.stages {
            let verdict = match &report.verdict {
                StageVerdict::Yes => "YES".to_string(),
                StageVerdict::No => "NO".to_string(),
                StageVerdict::ConstructiveYes => "YES (constructive)".to_string(),
                StageVerdict::Skipped { reason } => format!("skipped: {reason}"),
            };
            writeln!(
                f,
                "stage {:<24} {:<24} {:>9.1?}  {}",
                report.stage, verdict, report.wall, report.detail
            )?;
        }
        if self.disagreements.is_empty() {
            writeln!(f, "agreement: all evaluated stages agree")?;
        } else {
            for disagreement in &self.disagreements {
                writeln!(f, "DISAGREEMENT: {disagreement}")?;
            }
        }
        Ok(())
    }
}

/// Runs the oracles of every stage within `budget` and cross-checks them.
///
/// On satisfiable formulas the channel assignment stage is verified
/// constructively: the satisfying assignment is pushed through selectors,
/// matchings, and the gadget colorings into an explicit proper coloring of
/// the merged instance at exactly the forced span. The exhaustive solver
/// only runs when the ordering space fits the budget.
pub fn verify(formula: &CnfFormula, budget: Budget) -> Result<VerificationReport, PipelineError> {
    let artifacts = build_artifacts(formula, budget)?;
    let mut stages = Vec::new();

    let start = Instant::now();
    let (sat_verdict, sat_witness) = match sat_oracle(formula, budget) {
        Ok(Some(assignment)) => (StageVerdict::Yes, Some(assignment)),
        Ok(None) => (StageVerdict::No, None),
        Err(CnfError::Budget(b)) => (StageVerdict::Skipped { reason: b.to_string() }, None),
        Err(other) => return Err(other.into()),
    };
    stages.push(StageReport {
        stage: "satisfiability",
        verdict: sat_verdict.clone(),
        detail: format!(
            "{} variables, {} clauses{}",
            formula.variable_count(),
            formula.clause_count(),
            sat_witness
                .as_ref()
                .map(|a| format!(", witness {}", bits_of(a)))
                .unwrap_or_default()
        ),
        wall: start.elapsed(),
    });

    let mut family_value = None;
    let start = Instant::now();
    let intersect = family_intersect(&artifacts.consistency_family, &artifacts.satisfaction_family, budget);
    let family_verdict = match intersect {
        Ok(Some((value, _, _))) => {
            family_value = Some(value.clone());
            stages.push(StageReport {
                stage: "family-intersection",
                verdict: StageVerdict::Yes,
                detail: format!(
                    "tables {}x{} and {}x{}, common value {value}",
                    artifacts.consistency_family.rows(),
                    artifacts.consistency_family.columns(),
                    artifacts.satisfaction_family.rows(),
                    artifacts.satisfaction_family.columns()
                ),
                wall: start.elapsed(),
            });
            StageVerdict::Yes
        }
        Ok(None) => {
            stages.push(StageReport {
                stage: "family-intersection",
                verdict: StageVerdict::No,
                detail: "families are disjoint".into(),
                wall: start.elapsed(),
            });
            StageVerdict::No
        }
        Err(FamilyError::Budget(b)) => {
            let verdict = StageVerdict::Skipped { reason: b.to_string() };
            stages.push(StageReport {
                stage: "family-intersection",
                verdict: verdict.clone(),
                detail: String::new(),
                wall: start.elapsed(),
            });
            verdict
        }
        Err(other) => return Err(other.into()),
    };

    let mut cmw_value = None;
    let start = Instant::now();
    let cmw_result = cmw_oracle(&artifacts.cmw.consistency_graph, &artifacts.cmw.satisfaction_graph, budget);
    let sides = format!(
        "sides {} and {}",
        artifacts.cmw.consistency_graph.side(),
        artifacts.cmw.satisfaction_graph.side()
    );
    let cmw_verdict = match cmw_result {
        Ok(Some((weight, _, _))) => {
            cmw_value = Some(weight.clone());
            stages.push(StageReport {
                stage: "common-matching-weight",
                verdict: StageVerdict::Yes,
                detail: format!("{sides}, common weight {weight}"),
                wall: start.elapsed(),
            });
            StageVerdict::Yes
        }
        Ok(None) => {
            stages.push(StageReport {
                stage: "common-matching-weight",
                verdict: StageVerdict::No,
                detail: format!("{sides}, weight sets disjoint"),
                wall: start.elapsed(),
            });
            StageVerdict::No
        }
        Err(MatchingError::OracleTooLarge(b)) | Err(MatchingError::ReductionTooLarge(b)) => {
            let verdict = StageVerdict::Skipped { reason: b.to_string() };
            stages.push(StageReport {
                stage: "common-matching-weight",
                verdict: verdict.clone(),
                detail: sides,
                wall: start.elapsed(),
            });
            verdict
        }
        Err(other) => return Err(other.into()),
    };

    let start = Instant::now();
    let mut disagreements = Vec::new();
    // the weight sets equal the family sets, so the smallest common values
    // of the two stages must coincide when both were computed
    if let (Some(family), Some(cmw)) = (&family_value, &cmw_value) {
        if family != cmw {
            disagreements.push(format!(
                "smallest common family value {family} differs from smallest common matching weight {cmw}"
            ));
        }
    }
    let ca_verdict = channel_stage(
        &artifacts,
        sat_witness.as_deref(),
        budget,
        &mut disagreements,
    )?;
    stages.push(StageReport {
        stage: "channel-assignment",
        verdict: ca_verdict.clone(),
        detail: format!(
            "{} vertices, span bound {}",
            artifacts.merged.instance.vertex_count(),
            artifacts.merged.span
        ),
        wall: start.elapsed(),
    });

    let named = [
        ("satisfiability", &sat_verdict),
        ("family-intersection", &family_verdict),
        ("common-matching-weight", &cmw_verdict),
        ("channel-assignment", &ca_verdict),
    ];
    let decided: Vec<(&str, bool)> =
        named.iter().filter_map(|(n, v)| v.decided().map(|d| (*n, d))).collect();
    for pair in decided.windows(2) {
        if pair[0].1 != pair[1].1 {
            disagreements.push(format!(
                "{} says {} but {} says {}",
                pair[0].0,
                verdict_word(pair[0].1),
                pair[1].0,
                verdict_word(pair[1].1)
            ));
        }
    }
    let mandatory_skipped = sat_verdict.decided().is_none() || family_verdict.decided().is_none();

    Ok(VerificationReport { stages, disagreements, mandatory_skipped })
}

fn verdict_word(yes: bool) -> &'static str {
    if yes {
        "YES"
    } else {
        "NO"
    }
}

fn bits_of(assignment: &[bool]) -> String {
    assignment.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Exact-solver gate: largest vertex count whose full ordering space fits
/// the budget.
fn solver_vertex_gate(budget: Budget) -> usize {
    let mut n = 1u64;
    while Budget(budget.0).admits_factorial("gate", n + 1).is_ok() {
        n += 1;
    }
    n as usize
}

fn channel_stage(
    artifacts: &StageArtifacts,
    sat_witness: Option<&[bool]>,
    budget: Budget,
    disagreements: &mut Vec<String>,
) -> Result<StageVerdict, PipelineError> {
    let merged = &artifacts.merged;
    if let Some(assignment) = sat_witness {
        let coloring = constructive_coloring(artifacts, assignment)?;
        let proper = merged.instance.check_proper(&coloring)?;
        let span = span_of(&coloring)?;
        if let Some(violation) = proper {
            disagreements.push(format!(
                "constructive coloring violates {} vs {} (needs {}, gap {})",
                violation.x, violation.y, violation.required, violation.gap
            ));
            return Ok(StageVerdict::No);
        }
        if span != merged.span {
            disagreements.push(format!(
                "constructive coloring has span {span}, expected {}",
                merged.span
            ));
            return Ok(StageVerdict::No);
        }
        return Ok(StageVerdict::ConstructiveYes);
    }

    let vertices = merged.instance.vertex_count();
    if vertices > solver_vertex_gate(budget) {
        return Ok(StageVerdict::Skipped {
            reason: format!("{vertices} vertices exceeds the exact-solver budget"),
        });
    }
    match solve_exact(&merged.instance, &merged.span, budget)? {
        SolveOutcome::Solved { .. } => Ok(StageVerdict::Yes),
        SolveOutcome::ExceedsCap { .. } => Ok(StageVerdict::No),
    }
}

/// Pushes a satisfying assignment through every reduction: selectors for
/// both families, matchings of both encoded graphs, and finally the
/// composed coloring of the merged instance.
pub fn constructive_coloring(
    artifacts: &StageArtifacts,
    assignment: &[bool],
) -> Result<crate::channel::Coloring, PipelineError> {
    let consistency_selector = Selector(
        (0..artifacts.cmw.consistency_trace.extended_rows())
            .map(|row| match assignment.get(row) {
                Some(true) => 1,
                Some(false) => 2,
                None => 1,
            })
            .collect(),
    );
    let satisfaction_selector = satisfaction_selector(
        &artifacts.formula,
        assignment,
        artifacts.cmw.satisfaction_trace.extended_rows(),
    )?;

    let matching1 = selector_to_matching(&artifacts.cmw.consistency_trace, &consistency_selector)?;
    let matching2 = selector_to_matching(&artifacts.cmw.satisfaction_trace, &satisfaction_selector)?;
    // the canonical coloring hosts row perm[i] in interval i, which is the
    // inverse view of a left-to-right matching
    let perm1 = invert(&matching1);
    let perm2 = invert(&matching2);
    Ok(artifacts.merged.compose_coloring(&perm1, &perm2)?)
}

fn satisfaction_selector(
    formula: &CnfFormula,
    assignment: &[bool],
    rows: usize,
) -> Result<Selector, PipelineError> {
    let width = formula.width();
    let mut entries = Vec::with_capacity(rows);
    for clause_index in 1..=formula.clause_count() {
        let base = width * (clause_index - 1);
        let induced: Vec<usize> = (1..=width)
            .map(|p| base + p)
            .filter(|&occurrence| {
                let literal = formula.occurrence_literal(occurrence);
                assignment[literal.var - 1]
            })
            .collect();
        let subsets = satisfying_subsets(formula, clause_index)?;
        let column = subsets
            .iter()
            .position(|subset| subset == &induced)
            .expect("a satisfying assignment induces a satisfying subset");
        entries.push(column + 1);
    }
    entries.resize(rows, 1);
    Ok(Selector(entries))
}

fn invert(perm: &[usize]) -> Vec<usize> {
    let mut inverse = vec![0; perm.len()];
    for (i, &j) in perm.iter().enumerate() {
        inverse[j] = i;
    }
    inverse
}

/// Size identities of every stage for one formula.
pub struct StatsReport {
    pub variables: usize,
    pub clauses: usize,
    pub width: usize,
    pub occurrences: usize,
    pub family_shapes: [(usize, usize); 2],
    pub word_shapes: [(usize, usize); 2],
    pub sides: [usize; 2],
    pub minimality_ok: [bool; 2],
    pub ca_vertices: usize,
    pub expected_ca_vertices: usize,
    pub span: BigUint,
    pub max_distance: BigUint,
    pub serialized_bits: usize,
    pub violated: Vec<String>,
}

pub fn stats(formula: &CnfFormula, budget: Budget) -> Result<StatsReport, PipelineError> {
    let artifacts = build_artifacts(formula, budget)?;
    let traces = [&artifacts.cmw.consistency_trace, &artifacts.cmw.satisfaction_trace];
    let families = [&artifacts.consistency_family, &artifacts.satisfaction_family];
    let sides = [artifacts.cmw.consistency_graph.side(), artifacts.cmw.satisfaction_graph.side()];
    let minimality_ok = [traces[0].check(families[0].rows()), traces[1].check(families[1].rows())];
    let expected = 8 * sides[0] + 8 * sides[1] + 1;
    let vertices = artifacts.merged.instance.vertex_count();

    let mut violated = Vec::new();
    for (index, ok) in minimality_ok.iter().enumerate() {
        if !ok {
            violated.push(format!("side {} violates the minimal word length rule", index + 1));
        }
        if traces[index].side() != sides[index] {
            violated.push(format!("side {} is not the full word space", index + 1));
        }
    }
    if vertices != expected {
        violated.push(format!("merged instance has {vertices} vertices, expected {expected}"));
    }

    let file = crate::formats::CaFile {
        instance: artifacts.merged.instance.clone(),
        handles: Default::default(),
    };
    let serialized_bits = crate::formats::write_ca(&file).len() * 8;

    Ok(StatsReport {
        variables: formula.variable_count(),
        clauses: formula.clause_count(),
        width: formula.width(),
        occurrences: formula.occurrence_count(),
        family_shapes: [
            (families[0].rows(), families[0].columns()),
            (families[1].rows(), families[1].columns()),
        ],
        word_shapes: [
            (traces[0].alphabet(), traces[0].word_len()),
            (traces[1].alphabet(), traces[1].word_len()),
        ],
        sides,
        minimality_ok,
        ca_vertices: vertices,
        expected_ca_vertices: expected,
        span: artifacts.merged.span.clone(),
        max_distance: artifacts.merged.instance.max_distance(),
        serialized_bits,
        violated,
    })
}

impl fmt::Display for StatsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "formula: {} variables, {} clauses, width {}, {} occurrences",
            self.variables, self.clauses, self.width, self.occurrences
        )?;
        for i in 0..2 {
            writeln!(
                f,
                "side {}: family {}x{} -> words over [{}] of length {} -> {} vertices per side (minimality {})",
                i + 1,
                self.family_shapes[i].0,
                self.family_shapes[i].1,
                self.word_shapes[i].0,
                self.word_shapes[i].1,
                self.sides[i],
                if self.minimality_ok[i] { "ok" } else { "VIOLATED" }
            )?;
        }
        writeln!(
            f,
            "channel assignment: {} vertices (expected {}), span bound {}, max distance {}, {} bits serialized",
            self.ca_vertices, self.expected_ca_vertices, self.span, self.max_distance, self.serialized_bits
        )?;
        if self.violated.is_empty() {
            writeln!(f, "size identities: all hold")?;
        } else {
            for violation in &self.violated {
                writeln!(f, "size identity VIOLATED: {violation}")?;
            }
        }
        Ok(())
    }
}
