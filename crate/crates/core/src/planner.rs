//! Per-dimension search for the `Ô_{n+1}` member with the smallest
//! max-norm reachable by the available constructions.
//!
//! For a target size `m = n + 1` the candidates are, in tie-break order:
//!
//! 1. a Hadamard matrix of order `m`, when the registry covers it;
//! 2. the next covered order `h > m` reduced `h − m` times;
//! 3. the best plan for `m/2` doubled (even `m`), and the best plan for an
//!    even size `s ∈ (m, m + D]` doubled and then reduced `s − m` times;
//! 4. the Fourier construction with the optimal uniform phase, and
//!    optionally a per-column phase grid.
//!
//! Plans are linear step lists. Replaying one reproduces the searched
//! matrix bit for bit, because search and replay execute the same code.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, SQRT_2};
use std::fmt;
use std::io::Write;
use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{self, BoundReport};
use crate::error::{Error, Result};
use crate::hadamard::OrderRegistry;
use crate::ohat::{self, OhatMatrix, PhaseChoice, PivotMode};
use crate::simplex;

/// One operation of a construction chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Step {
    Hadamard { order: usize },
    Fourier { size: usize, phases: PhaseChoice },
    Double,
    Reduce { pivot: PivotMode },
}

/// The candidate family a plan came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Hadamard,
    Reduce,
    Double,
    Fourier,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::Hadamard,
        Strategy::Reduce,
        Strategy::Double,
        Strategy::Fourier,
    ];
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Hadamard => "hadamard",
            Strategy::Reduce => "reduce",
            Strategy::Double => "double",
            Strategy::Fourier => "fourier",
        })
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|k| k.to_string() == s)
            .ok_or_else(|| Error::Parse(format!("unknown strategy {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionPlan {
    pub target_dim: usize,
    pub strategy: Strategy,
    pub steps: Vec<Step>,
    pub achieved_norm: f64,
    pub achieved_edge: f64,
    /// Lower bound on the edge implied by the steps alone.
    pub bound_predicted: f64,
}

impl ConstructionPlan {
    pub fn size(&self) -> usize {
        self.target_dim + 1
    }

    /// Number of reductions in the chain.
    pub fn reductions(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s, Step::Reduce { .. }))
            .count()
    }

    /// Compact form such as `H96 R R R R` or `F7 D R`.
    pub fn summary(&self) -> String {
        let parts: Vec<String> = self
            .steps
            .iter()
            .map(|s| match s {
                Step::Hadamard { order } => format!("H{order}"),
                Step::Fourier { size, .. } => format!("F{size}"),
                Step::Double => "D".into(),
                Step::Reduce { .. } => "R".into(),
            })
            .collect();
        parts.join(" ")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plans serialise")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanConfig {
    pub pivot: PivotMode,
    /// Exhaustive pivoting is used only while the matrix being reduced has
    /// at most this many rows; larger ones fall back to the heuristic.
    pub exhaustive_limit: usize,
    /// Grid size for the per-column Fourier phase search, if enabled.
    pub phase_grid: Option<usize>,
    /// Largest number of reductions after a doubling.
    pub max_double_reductions: usize,
    /// Restricts the top-level candidates; sub-plans always use every family.
    pub strategy: Option<Strategy>,
    /// Randomises the phase-grid offset; `0` means no offset.
    pub seed: u64,
    /// When the automatically chosen plan's edge ratio does not exceed this
    /// value, its final reductions are redone with exhaustive pivots.
    pub escalate_below: Option<f64>,
    /// Escalation is skipped above this size.
    pub escalate_max_size: usize,
}

impl Default for PlanConfig {
    fn default() -> Self {
        PlanConfig {
            pivot: PivotMode::Heuristic,
            exhaustive_limit: 128,
            phase_grid: None,
            max_double_reductions: 12,
            strategy: None,
            seed: 0,
            escalate_below: Some(bounds::theorem1_constant()),
            escalate_max_size: 700,
        }
    }
}

/// Grid size used when the phase search is switched on without a size.
pub const DEFAULT_PHASE_GRID: usize = 64;

/// Matrices of best plans up to this size are cached for reuse as seeds.
const MATRIX_CACHE_LIMIT: usize = 1024;

struct Candidate {
    plan: ConstructionPlan,
    matrix: OhatMatrix,
}

/// Memoising planner. Safe to share between threads.
pub struct Planner {
    config: PlanConfig,
    plans: Mutex<HashMap<usize, Arc<ConstructionPlan>>>,
    matrices: Mutex<HashMap<usize, Arc<OhatMatrix>>>,
}

impl Planner {
    pub fn new(config: PlanConfig) -> Self {
        Planner {
            config,
            plans: Mutex::default(),
            matrices: Mutex::default(),
        }
    }

    pub fn config(&self) -> &PlanConfig {
        &self.config
    }

    /// Best plan for dimension `n`.
    pub fn plan(&self, n: usize) -> Result<ConstructionPlan> {
        Ok(self.plan_with_matrix(n)?.0)
    }

    /// Best plan for dimension `n` and the matrix it produces.
    pub fn plan_with_matrix(&self, n: usize) -> Result<(ConstructionPlan, OhatMatrix)> {
        if n == 0 {
            return Err(Error::Domain("dimension must be ≥ 1".into()));
        }
        match self.config.strategy {
            None => {
                let (plan, matrix) = self.best(n + 1)?;
                Ok((plan.as_ref().clone(), matrix.as_ref().clone()))
            }
            Some(only) => {
                let c = self.search(n + 1, Some(only))?.ok_or_else(|| {
                    Error::InvalidPlan(format!("strategy {only} does not apply to dimension {n}"))
                })?;
                Ok((c.plan, c.matrix))
            }
        }
    }

    fn best(&self, size: usize) -> Result<(Arc<ConstructionPlan>, Arc<OhatMatrix>)> {
        let cached = self.plans.lock().unwrap().get(&size).cloned();
        if let Some(plan) = cached {
            if let Some(m) = self.matrices.lock().unwrap().get(&size).cloned() {
                return Ok((plan, m));
            }
            let m = Arc::new(execute(&plan.steps)?);
            return Ok((plan, m));
        }
        let c = self
            .search(size, None)?
            .expect("Fourier or Hadamard always applies");
        let plan = Arc::new(c.plan);
        let matrix = Arc::new(c.matrix);
        self.plans.lock().unwrap().insert(size, Arc::clone(&plan));
        if size <= MATRIX_CACHE_LIMIT {
            self.matrices
                .lock()
                .unwrap()
                .insert(size, Arc::clone(&matrix));
        }
        Ok((plan, matrix))
    }

    fn pivot_for(&self, size: usize, escalated: bool) -> PivotMode {
        if escalated {
            return PivotMode::Exhaustive;
        }
        match self.config.pivot {
            PivotMode::Exhaustive if size <= self.config.exhaustive_limit => PivotMode::Exhaustive,
            _ => PivotMode::Heuristic,
        }
    }

    /// Applies `count` reductions, extending `steps` and the bound.
    fn reduce_chain(
        &self,
        mut matrix: OhatMatrix,
        steps: &mut Vec<Step>,
        bound: &mut f64,
        count: usize,
        escalated: bool,
    ) -> Result<OhatMatrix> {
        for _ in 0..count {
            let pivot = self.pivot_for(matrix.size(), escalated);
            matrix = reduce_step(&matrix, pivot)?;
            steps.push(Step::Reduce { pivot });
            *bound -= 1.0 / SQRT_2;
        }
        Ok(matrix)
    }

    /// Candidates with the configured pivots. For the automatic choice, the
    /// final reductions are redone with exhaustive pivots when the result
    /// falls short of `escalate_below`.
    fn search(&self, size: usize, only: Option<Strategy>) -> Result<Option<Candidate>> {
        let Some(first) = self.candidates(size, only, false)? else {
            return Ok(None);
        };
        let ratio = first.plan.achieved_edge / ((size - 1) as f64).sqrt();
        match self.config.escalate_below {
            Some(limit)
                if only.is_none() && ratio <= limit && size <= self.config.escalate_max_size =>
            {
                let retry = self.candidates(size, only, true)?;
                Ok(Some(match retry {
                    Some(r) if r.plan.achieved_norm < first.plan.achieved_norm => r,
                    _ => first,
                }))
            }
            _ => Ok(Some(first)),
        }
    }

    fn candidates(
        &self,
        size: usize,
        only: Option<Strategy>,
        escalated: bool,
    ) -> Result<Option<Candidate>> {
        let allow = |s: Strategy| only.is_none_or(|o| o == s);
        let registry = OrderRegistry::global();
        let mut best: Option<Candidate> = None;
        let mut offer = |c: Candidate| {
            if best
                .as_ref()
                .is_none_or(|b| c.plan.achieved_norm < b.plan.achieved_norm)
            {
                best = Some(c);
            }
        };
        let n = size - 1;

        if allow(Strategy::Hadamard) && registry.is_covered(size) {
            let h = registry.generate(size)?;
            let matrix = ohat::from_hadamard(&h);
            let bound = bounds::upper_bound(n);
            offer(finish(
                n,
                Strategy::Hadamard,
                vec![Step::Hadamard { order: size }],
                bound,
                matrix,
            ));
            // nothing beats a Hadamard matrix
            return Ok(best);
        }

        if allow(Strategy::Reduce) && size >= 2 {
            let order = registry.next_covered(size + 1);
            let h = registry.generate(order)?;
            let mut steps = vec![Step::Hadamard { order }];
            let mut bound = bounds::upper_bound(order - 1);
            let matrix = self.reduce_chain(
                ohat::from_hadamard(&h),
                &mut steps,
                &mut bound,
                order - size,
                escalated,
            )?;
            offer(finish(n, Strategy::Reduce, steps, bound, matrix));
        }

        if allow(Strategy::Double) {
            let first = if size % 2 == 0 { size } else { size + 1 };
            let last = (size + self.config.max_double_reductions).min(2 * size - 2);
            for seed in (first..=last).step_by(2) {
                if seed / 2 < 2 {
                    continue;
                }
                let (sub, sub_matrix) = self.best(seed / 2)?;
                let mut steps = sub.steps.clone();
                steps.push(Step::Double);
                let mut bound = sub.bound_predicted * SQRT_2;
                let doubled = ohat::double(&sub_matrix);
                let matrix =
                    self.reduce_chain(doubled, &mut steps, &mut bound, seed - size, escalated)?;
                offer(finish(n, Strategy::Double, steps, bound, matrix));
            }
        }

        if allow(Strategy::Fourier) && size >= 2 {
            let phases = ohat::optimal_phases(size);
            let matrix = ohat::fourier(size, &phases)?;
            let bound = bounds::fourier_bounds(n).refined;
            offer(finish(
                n,
                Strategy::Fourier,
                vec![Step::Fourier { size, phases }],
                bound,
                matrix,
            ));
            if let Some(grid) = self.config.phase_grid {
                let phases = ohat::grid_phases(size, grid, self.grid_offset(grid));
                let matrix = ohat::fourier(size, &phases)?;
                let bound = bounds::fourier_bounds(n).basic;
                offer(finish(
                    n,
                    Strategy::Fourier,
                    vec![Step::Fourier { size, phases }],
                    bound,
                    matrix,
                ));
            }
        }

        Ok(best)
    }

    fn grid_offset(&self, grid: usize) -> f64 {
        if self.config.seed == 0 {
            return 0.0;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.random_range(0.0..FRAC_PI_2 / grid.max(1) as f64)
    }

    /// One record per dimension in `n_from..=n_to`, computed in parallel.
    pub fn sweep(&self, n_from: usize, n_to: usize) -> Result<Vec<SweepRecord>> {
        self.sweep_dims(&(n_from..=n_to).collect::<Vec<_>>())
    }

    /// Like [`Planner::sweep`] over an arbitrary list of dimensions.
    pub fn sweep_dims(&self, dims: &[usize]) -> Result<Vec<SweepRecord>> {
        if dims.contains(&0) {
            return Err(Error::Domain("dimensions must be ≥ 1".into()));
        }
        dims.par_iter().map(|&n| self.record(n)).collect()
    }

    fn record(&self, n: usize) -> Result<SweepRecord> {
        let (plan, matrix) = self.plan_with_matrix(n)?;
        let embedding = simplex::extract(&matrix)?;
        let report: BoundReport = bounds::bound_report(n)?;
        Ok(SweepRecord {
            n,
            edge_length: embedding.edge_length(),
            edge_ratio: simplex::edge_ratio(&embedding),
            best_lower: report.best_lower,
            upper: report.upper,
            strategy: plan.strategy,
            summary: plan.summary(),
            bound_predicted: plan.bound_predicted,
        })
    }
}

impl Default for Planner {
    fn default() -> Self {
        Planner::new(PlanConfig::default())
    }
}

fn reduce_step(a: &OhatMatrix, pivot: PivotMode) -> Result<OhatMatrix> {
    ohat::reduce_best_unchecked(a, pivot)
}

fn finish(
    n: usize,
    strategy: Strategy,
    steps: Vec<Step>,
    bound_predicted: f64,
    matrix: OhatMatrix,
) -> Candidate {
    let achieved_norm = matrix.norm().value();
    Candidate {
        plan: ConstructionPlan {
            target_dim: n,
            strategy,
            steps,
            achieved_norm,
            achieved_edge: matrix.norm().edge_length(),
            bound_predicted,
        },
        matrix,
    }
}

/// Runs the steps without any validation of the result.
fn execute(steps: &[Step]) -> Result<OhatMatrix> {
    let mut iter = steps.iter();
    let mut current = match iter.next() {
        Some(Step::Hadamard { order }) => {
            ohat::from_hadamard(&*OrderRegistry::global().generate(*order)?)
        }
        Some(Step::Fourier { size, phases }) => ohat::fourier(*size, phases)?,
        Some(other) => {
            return Err(Error::InvalidPlan(format!(
                "a plan must start from a Hadamard or Fourier seed, not {other:?}"
            )))
        }
        None => return Err(Error::InvalidPlan("empty plan".into())),
    };
    for step in iter {
        current = match step {
            Step::Double => ohat::double(&current),
            Step::Reduce { pivot } => {
                if current.size() < 3 {
                    return Err(Error::InvalidPlan(format!(
                        "cannot reduce a matrix of size {}",
                        current.size()
                    )));
                }
                reduce_step(&current, *pivot)?
            }
            seed => {
                return Err(Error::InvalidPlan(format!(
                    "seed step {seed:?} in the middle of a plan"
                )))
            }
        };
    }
    Ok(current)
}

/// Executes a plan and validates the result as a member of `Ô_{n+1}` with
/// the recorded norm.
pub fn replay(plan: &ConstructionPlan) -> Result<OhatMatrix> {
    let out = execute(&plan.steps)?;
    if out.size() != plan.size() {
        return Err(Error::InvalidPlan(format!(
            "steps produce size {}, plan targets {}",
            out.size(),
            plan.size()
        )));
    }
    out.check()?;
    let norm = out.norm().value();
    if norm.to_bits() != plan.achieved_norm.to_bits() {
        return Err(Error::InvalidPlan(format!(
            "replayed norm {norm:e} differs from recorded {:e}",
            plan.achieved_norm
        )));
    }
    Ok(out)
}

/// Best plan for `n` with a fresh planner.
pub fn plan(n: usize, config: &PlanConfig) -> Result<ConstructionPlan> {
    Planner::new(config.clone()).plan(n)
}

pub fn sweep(n_from: usize, n_to: usize, config: &PlanConfig) -> Result<Vec<SweepRecord>> {
    if n_from == 0 || n_from > n_to {
        return Err(Error::Domain(format!(
            "sweep needs 1 ≤ from ≤ to, got {n_from}..{n_to}"
        )));
    }
    Planner::new(config.clone()).sweep(n_from, n_to)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub n: usize,
    pub edge_length: f64,
    pub edge_ratio: f64,
    pub best_lower: f64,
    pub upper: f64,
    pub strategy: Strategy,
    #[serde(skip)]
    pub summary: String,
    #[serde(skip)]
    pub bound_predicted: f64,
}

/// CSV with header `n,edge_length,edge_ratio,best_lower,upper,strategy`.
pub fn write_sweep_csv<W: Write>(records: &[SweepRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r).map_err(|e| Error::Io(e.into()))?;
    }
    w.flush()?;
    Ok(())
}
