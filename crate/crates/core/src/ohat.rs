//! Orthogonal matrices with a constant first column.
//!
//! `Ô_n` is the set of `n × n` orthogonal matrices whose first column is
//! `(1/√n)·𝟙`. Deleting that column leaves `n` rows which, scaled by
//! `1/√2`, are the vertices of a unit regular simplex centred at the origin,
//! so a small max-norm means a large simplex fits in the cube.
//!
//! Four ways to produce members are provided:
//!
//! * [`from_hadamard`]: normalise the rows of a Hadamard matrix (optimal).
//! * [`fourier`]: the cosine/sine construction, valid for every `n ≥ 2`.
//! * [`double`]: `B₂ ⊗ A`, doubling the size and dividing the norm by `√2`.
//! * [`reduce`]: drop one row and one column of an `Ô_{n+1}` member and
//!   repair orthogonality with a rank-one correction.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use std::sync::atomic::{AtomicU64, Ordering};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hadamard::HadamardMatrix;
use crate::matrix::{b2, Matrix, NormValue};

/// Allowed `‖AᵀA − I‖` per unit of dimension.
pub const RESIDUAL_TOL_PER_DIM: f64 = 1e-10;
/// Allowed deviation of first-column entries from `1/√n`.
pub const FIRST_COLUMN_TOL: f64 = 1e-12;

/// A member of `Ô_n` together with its cached max-norm.
#[derive(Debug, Clone, PartialEq)]
pub struct OhatMatrix {
    body: Matrix,
    norm: NormValue,
}

impl OhatMatrix {
    /// Validates orthogonality and the constant first column.
    pub fn new(body: Matrix) -> Result<Self> {
        let m = OhatMatrix::trusted(body);
        m.check()?;
        Ok(m)
    }

    /// Output of an operation that preserves membership by construction.
    pub(crate) fn trusted(body: Matrix) -> Self {
        let norm = body.max_norm();
        OhatMatrix { body, norm }
    }

    pub fn size(&self) -> usize {
        self.body.rows()
    }

    pub fn body(&self) -> &Matrix {
        &self.body
    }

    pub fn into_body(self) -> Matrix {
        self.body
    }

    pub fn norm(&self) -> NormValue {
        self.norm
    }

    /// `1/(√2·‖A‖)`, the edge of the simplex this matrix encodes.
    pub fn edge_length(&self) -> f64 {
        self.norm.edge_length()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.body[(i, j)]
    }

    /// Full membership check, `O(n³)`.
    pub fn check(&self) -> Result<()> {
        let n = self.size();
        if !self.body.is_square() {
            return Err(Error::Invariant(format!(
                "Ô matrix must be square, got {}x{}",
                self.body.rows(),
                self.body.cols()
            )));
        }
        let expect = 1.0 / (n as f64).sqrt();
        let worst = self
            .body
            .row_iter()
            .map(|r| (r[0] - expect).abs())
            .fold(0.0_f64, f64::max);
        if worst > FIRST_COLUMN_TOL {
            return Err(Error::Invariant(format!(
                "first column deviates from 1/√{n} by {worst:e}"
            )));
        }
        let residual = self.body.orthogonality_residual()?;
        let tol = RESIDUAL_TOL_PER_DIM * n as f64;
        if residual > tol {
            return Err(Error::Invariant(format!(
                "orthogonality residual {residual:e} exceeds {tol:e}"
            )));
        }
        Ok(())
    }
}

/// Normalises the rows of `h` so that its first column is `+𝟙`, then scales
/// by `1/√m`. The result has the smallest norm possible for its size.
pub fn from_hadamard(h: &HadamardMatrix) -> OhatMatrix {
    let m = h.order();
    let scale = 1.0 / (m as f64).sqrt();
    let mut data = Vec::with_capacity(m * m);
    for i in 0..m {
        let sign = f64::from(h.get(i, 0));
        data.extend(h.row(i).iter().map(|&e| sign * f64::from(e) * scale));
    }
    OhatMatrix::trusted(Matrix::new(m, m, data).expect("order ≥ 1"))
}

/// Phase offsets `θ_j`, one per cosine/sine column pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseChoice {
    theta: Vec<f64>,
}

impl PhaseChoice {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::Invariant("phase angles must be finite".into()));
        }
        Ok(PhaseChoice { theta })
    }

    /// The same angle for all `⌊(n−1)/2⌋` column pairs.
    pub fn uniform(n: usize, theta: f64) -> Result<Self> {
        PhaseChoice::new(vec![theta; pair_count(n)])
    }

    pub fn angles(&self) -> &[f64] {
        &self.theta
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }
}

/// `⌊(n−1)/2⌋`.
pub fn pair_count(n: usize) -> usize {
    n.saturating_sub(1) / 2
}

/// `2π·((i·j) mod n)/n`, reduced before scaling to keep large products exact.
fn root_angle(i: usize, j: usize, n: usize) -> f64 {
    2.0 * PI * ((i * j) % n) as f64 / n as f64
}

/// Cosine/sine construction of an `Ô_n` member:
/// `√(2/n)·[𝟙/√2 | v/√2 | C | S]` for even `n` (`v_i = (−1)^i`) and
/// `√(2/n)·[𝟙/√2 | C | S]` for odd `n`, with
/// `c_ij = cos(θ_j + 2πij/n)`, `s_ij = sin(θ_j + 2πij/n)`, `i = 1..n`.
pub fn fourier(n: usize, phases: &PhaseChoice) -> Result<OhatMatrix> {
    if n < 2 {
        return Err(Error::dim(format!(
            "Fourier construction needs n ≥ 2, got {n}"
        )));
    }
    let pairs = pair_count(n);
    if phases.len() != pairs {
        return Err(Error::dim(format!(
            "n = {n} needs {pairs} phases, got {}",
            phases.len()
        )));
    }
    let root = 1.0 / (n as f64).sqrt();
    let amp = (2.0 / n as f64).sqrt();
    let mut data = Vec::with_capacity(n * n);
    for i in 1..=n {
        data.push(root);
        if n % 2 == 0 {
            data.push(if i % 2 == 0 { root } else { -root });
        }
        data.extend(
            phases
                .angles()
                .iter()
                .enumerate()
                .map(|(j, t)| amp * (t + root_angle(i, j + 1, n)).cos()),
        );
        data.extend(
            phases
                .angles()
                .iter()
                .enumerate()
                .map(|(j, t)| amp * (t + root_angle(i, j + 1, n)).sin()),
        );
    }
    Ok(OhatMatrix::trusted(Matrix::new(n, n, data)?))
}

/// Uniform phase minimising the Fourier norm: `π/n` when `n ≡ 0 (mod 4)`,
/// `π/4` otherwise.
pub fn optimal_phases(n: usize) -> PhaseChoice {
    let theta = if n % 4 == 0 { PI / n as f64 } else { FRAC_PI_4 };
    PhaseChoice::uniform(n, theta).expect("finite angle")
}

/// Per-column grid search over `grid` angles in `[offset, offset + π/2)`.
///
/// `|cos|` and `|sin|` swap under `θ → θ + π/2`, so a quarter turn covers
/// every distinct column.
pub fn grid_phases(n: usize, grid: usize, offset: f64) -> PhaseChoice {
    let grid = grid.max(1);
    let theta = (1..=pair_count(n))
        .map(|j| {
            let mut best = (f64::INFINITY, offset);
            for t in 0..grid {
                let theta = offset + FRAC_PI_2 * t as f64 / grid as f64;
                let worst = (1..=n)
                    .map(|i| {
                        let a = theta + root_angle(i, j, n);
                        a.cos().abs().max(a.sin().abs())
                    })
                    .fold(0.0_f64, f64::max);
                if worst < best.0 {
                    best = (worst, theta);
                }
            }
            best.1
        })
        .collect();
    PhaseChoice { theta }
}

/// `B₂ ⊗ A ∈ Ô_{2n}` with norm `‖A‖/√2`.
pub fn double(a: &OhatMatrix) -> OhatMatrix {
    OhatMatrix::trusted(
        b2().kronecker(a.body())
            .expect("doubling a valid matrix cannot overflow"),
    )
}

/// Location of the entry used to eliminate one row and one column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pivot {
    pub row: usize,
    pub col: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PivotMode {
    /// Largest `|a_rc|` over `c ≥ 1`; first in row-major order on ties.
    #[default]
    Heuristic,
    /// Every admissible pivot is tried; smallest resulting norm wins, ties
    /// go to the lexicographically first pivot.
    Exhaustive,
}

impl std::str::FromStr for PivotMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "heuristic" => Ok(PivotMode::Heuristic),
            "exhaustive" => Ok(PivotMode::Exhaustive),
            other => Err(Error::Parse(format!("unknown pivot mode {other:?}"))),
        }
    }
}

impl std::fmt::Display for PivotMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PivotMode::Heuristic => "heuristic",
            PivotMode::Exhaustive => "exhaustive",
        })
    }
}

/// Scalars shared by every entry of one reduction.
struct Correction {
    /// `(√(n/(n+1)) + a)⁻¹`
    coef: f64,
    /// `1/√(n(n+1))`
    shift: f64,
    /// sign applied to the pivot column so that `a ≥ 0`
    sign: f64,
}

impl Correction {
    fn new(a: &OhatMatrix, pivot: Pivot) -> Self {
        let n = (a.size() - 1) as f64;
        let p = a.get(pivot.row, pivot.col);
        let sign = if p >= 0.0 { 1.0 } else { -1.0 };
        Correction {
            coef: 1.0 / ((n / (n + 1.0)).sqrt() + p.abs()),
            shift: 1.0 / (n * (n + 1.0)).sqrt(),
            sign,
        }
    }

    /// Row weight `coef · (shift − σ·a_ic)`.
    fn weight(&self, a_ic: f64) -> f64 {
        self.coef * (self.shift - self.sign * a_ic)
    }
}

fn check_pivot(a: &OhatMatrix, pivot: Pivot) -> Result<()> {
    let size = a.size();
    if size < 3 {
        return Err(Error::dim(format!(
            "reduction needs a matrix of size ≥ 3, got {size}"
        )));
    }
    if pivot.row >= size || pivot.col == 0 || pivot.col >= size {
        return Err(Error::dim(format!(
            "pivot ({}, {}) outside rows 0..{size}, columns 1..{size}",
            pivot.row, pivot.col
        )));
    }
    Ok(())
}

/// Reduction without the final `O(n³)` orthogonality check.
pub(crate) fn reduce_unchecked(a: &OhatMatrix, pivot: Pivot) -> Result<OhatMatrix> {
    check_pivot(a, pivot)?;
    let size = a.size();
    let n = size - 1;
    let corr = Correction::new(a, pivot);
    let top = a.body().row(pivot.row);
    let root = 1.0 / (n as f64).sqrt();
    let mut data = Vec::with_capacity(n * n);
    for (i, row) in a.body().row_iter().enumerate() {
        if i == pivot.row {
            continue;
        }
        let w = corr.weight(row[pivot.col]);
        data.push(root);
        for j in 1..size {
            if j != pivot.col {
                data.push(row[j] + w * top[j]);
            }
        }
    }
    Ok(OhatMatrix::trusted(Matrix::from_raw(n, n, data)))
}

/// Shrinks `A ∈ Ô_{n+1}` to a member of `Ô_n`.
///
/// The pivot row moves to the top and the pivot column to position 1, with
/// its sign flipped if needed so that the pivot `a ≥ 0`. Writing the first
/// row as `(1/√(n+1), a, u)` and the rest as `(·, vᵀ, X)`, the result has
/// first column `(1/√n)·𝟙` and remaining block
/// `X + (√(n/(n+1)) + a)⁻¹·(−vᵀ + 𝟙ᵀ/√(n(n+1)))·u`.
/// Remaining rows and columns keep their relative order.
pub fn reduce(a: &OhatMatrix, row: usize, col: usize) -> Result<OhatMatrix> {
    let out = reduce_unchecked(a, Pivot { row, col })?;
    let residual = out.body().orthogonality_residual()?;
    let tol = RESIDUAL_TOL_PER_DIM * out.size() as f64;
    if residual > tol {
        return Err(Error::Numerical(format!(
            "reduced matrix has orthogonality residual {residual:e} > {tol:e}"
        )));
    }
    Ok(out)
}

/// Norm the reduction at `pivot` would produce, without materialising it.
/// Gives up and returns `None` as soon as some entry exceeds `cutoff`.
fn norm_after(a: &OhatMatrix, pivot: Pivot, cutoff: f64) -> Option<f64> {
    let size = a.size();
    let corr = Correction::new(a, pivot);
    let top = a.body().row(pivot.row);
    let mut worst = 1.0 / ((size - 1) as f64).sqrt();
    for (i, row) in a.body().row_iter().enumerate() {
        if i == pivot.row {
            continue;
        }
        let w = corr.weight(row[pivot.col]);
        let row_max = row
            .iter()
            .zip(top)
            .enumerate()
            .skip(1)
            .filter(|&(j, _)| j != pivot.col)
            .map(|(_, (x, t))| (x + w * t).abs())
            .fold(0.0_f64, f64::max);
        worst = worst.max(row_max);
        if worst > cutoff {
            return None;
        }
    }
    Some(worst)
}

pub fn select_pivot(a: &OhatMatrix, mode: PivotMode) -> Result<Pivot> {
    check_pivot(a, Pivot { row: 0, col: 1 })?;
    let size = a.size();
    match mode {
        PivotMode::Heuristic => {
            let mut best = (f64::NEG_INFINITY, Pivot { row: 0, col: 1 });
            for (r, row) in a.body().row_iter().enumerate() {
                for (c, v) in row.iter().enumerate().skip(1) {
                    if v.abs() > best.0 {
                        best = (v.abs(), Pivot { row: r, col: c });
                    }
                }
            }
            Ok(best.1)
        }
        PivotMode::Exhaustive => {
            // Candidates strictly worse than the best norm seen so far are
            // abandoned early. Ties are always evaluated in full, so the
            // smallest norm and then the smallest (row, col) wins regardless
            // of scheduling.
            let start = Pivot { row: 0, col: 1 };
            let shared = AtomicU64::new(norm_after(a, start, f64::INFINITY).unwrap().to_bits());
            let best = (0..size)
                .into_par_iter()
                .map(|r| {
                    let mut best = (f64::INFINITY, Pivot { row: r, col: 1 });
                    for c in 1..size {
                        let pivot = Pivot { row: r, col: c };
                        let cutoff = f64::from_bits(shared.load(Ordering::Relaxed));
                        if let Some(v) = norm_after(a, pivot, cutoff) {
                            if v < best.0 {
                                best = (v, pivot);
                                shared.fetch_min(v.to_bits(), Ordering::Relaxed);
                            }
                        }
                    }
                    best
                })
                .reduce(
                    || {
                        (
                            f64::INFINITY,
                            Pivot {
                                row: usize::MAX,
                                col: usize::MAX,
                            },
                        )
                    },
                    |x, y| {
                        let key = |p: &(f64, Pivot)| (p.1.row, p.1.col);
                        if y.0 < x.0 || (y.0 == x.0 && key(&y) < key(&x)) {
                            y
                        } else {
                            x
                        }
                    },
                );
            Ok(best.1)
        }
    }
}

pub(crate) fn reduce_best_unchecked(a: &OhatMatrix, mode: PivotMode) -> Result<OhatMatrix> {
    let pivot = select_pivot(a, mode)?;
    reduce_unchecked(a, pivot)
}

/// [`reduce`] at the pivot chosen by `mode`.
pub fn reduce_best(a: &OhatMatrix, mode: PivotMode) -> Result<OhatMatrix> {
    let pivot = select_pivot(a, mode)?;
    reduce(a, pivot.row, pivot.col)
}

/// Seeded random member of `Ô_n`: the fixed first column followed by
/// standard-normal columns, orthonormalised in column order.
pub fn random_member(n: usize, seed: u64) -> Result<OhatMatrix> {
    if n == 0 {
        return Err(Error::dim("random member needs n ≥ 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let root = 1.0 / (n as f64).sqrt();
    let mut cols: Vec<Vec<f64>> = vec![vec![root; n]];
    while cols.len() < n {
        let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for q in &cols {
                let d: f64 = v.iter().zip(q).map(|(x, y)| x * y).sum();
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= d * y);
            }
        }
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len < 1e-8 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= len);
        cols.push(v);
    }
    let data = (0..n)
        .flat_map(|i| cols.iter().map(move |c| c[i]).collect::<Vec<_>>())
        .collect();
    OhatMatrix::new(Matrix::new(n, n, data)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hadamard::{generate, sylvester};
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn from_hadamard_examples() {
        let a2 = from_hadamard(&sylvester(1).unwrap());
        let r = 1.0 / 2f64.sqrt();
        assert_eq!(a2.body().to_rows(), vec![vec![r, r], vec![r, -r]]);
        a2.check().unwrap();

        let a8 = from_hadamard(&generate(8).unwrap());
        assert_eq!(a8.norm().value(), 1.0 / 8f64.sqrt());
        assert!(rel(a8.edge_length(), 2.0) < 1e-15);

        let a4 = from_hadamard(&generate(4).unwrap());
        assert!(rel(a4.edge_length(), SQRT_2) < 1e-15);

        // rows with a leading −1 are flipped
        let a12 = from_hadamard(&generate(12).unwrap());
        a12.check().unwrap();
    }

    #[test]
    fn fourier_n4_quarter_phase_is_all_halves() {
        let a = fourier(4, &optimal_phases(4)).unwrap();
        for v in a.body().as_slice() {
            assert!((v.abs() - 0.5).abs() < 1e-15, "{v}");
        }
        assert!((a.norm().value() - 0.5).abs() < 1e-15);
        a.check().unwrap();
    }

    #[test]
    fn fourier_n3() {
        let a = fourier(3, &PhaseChoice::uniform(3, FRAC_PI_4).unwrap()).unwrap();
        a.check().unwrap();
        // entries cos/sin(π/4 + 2πi/3): largest magnitude is cos(π/12)
        let want = (2.0f64 / 3.0).sqrt() * (PI / 12.0).cos();
        assert!(rel(a.norm().value(), want) < 1e-14);
        // same value via √n / (2 cos(π/4n)) for f₀(2)
        let f0 = 3f64.sqrt() / (2.0 * (PI / 12.0).cos());
        assert!(rel(a.edge_length(), f0) < 1e-14);
    }

    #[test]
    fn fourier_phase_count_mismatch() {
        let bad = PhaseChoice::new(vec![0.0, 0.0]).unwrap();
        assert!(matches!(fourier(4, &bad), Err(Error::Dimension(_))));
        assert!(matches!(
            fourier(1, &PhaseChoice::new(vec![]).unwrap()),
            Err(Error::Dimension(_))
        ));
        assert!(PhaseChoice::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn fourier_n2_and_odd_sizes_are_members() {
        for n in 2..20 {
            let a = fourier(n, &optimal_phases(n)).unwrap();
            a.check().unwrap();
            assert!(a.norm().value() <= (2.0 / n as f64).sqrt() + 1e-12);
        }
    }

    #[test]
    fn optimal_phase_cases() {
        assert_eq!(optimal_phases(4).angles(), &[FRAC_PI_4]);
        assert_eq!(optimal_phases(6).angles(), &[FRAC_PI_4, FRAC_PI_4]);
        assert_eq!(optimal_phases(5).angles(), &[FRAC_PI_4, FRAC_PI_4]);
        assert_eq!(optimal_phases(8).angles(), &[PI / 8.0; 3]);
        assert!(optimal_phases(2).is_empty());

        let e6 = fourier(6, &optimal_phases(6)).unwrap().edge_length();
        assert!(rel(e6, 6f64.sqrt() / (2.0 * (PI / 12.0).cos())) < 1e-12);
        let e5 = fourier(5, &optimal_phases(5)).unwrap().edge_length();
        assert!(rel(e5, 5f64.sqrt() / (2.0 * (PI / 20.0).cos())) < 1e-12);
    }

    #[test]
    fn double_examples() {
        let a2 = from_hadamard(&sylvester(1).unwrap());
        let d = double(&a2);
        d.check().unwrap();
        assert_eq!(d.size(), 4);
        assert!((d.norm().value() - 0.5).abs() < 1e-16);
        for v in d.body().as_slice() {
            assert!((v.abs() - 0.5).abs() < 1e-15);
        }
        let r = random_member(7, 3).unwrap();
        let dr = double(&r);
        dr.check().unwrap();
        assert_eq!(dr.norm().value(), r.norm().value() * FRAC_1_SQRT_2);
    }

    #[test]
    fn reduce_h4() {
        let a = from_hadamard(&generate(4).unwrap());
        let r = reduce(&a, 0, 1).unwrap();
        assert_eq!(r.size(), 3);
        assert!(r.body().orthogonality_residual().unwrap() <= 1e-13);
        r.check().unwrap();
        assert!(1.0 / r.norm().value() - 1.0 / a.norm().value() + 1.0 > 0.0);
    }

    #[test]
    fn reduce_argument_errors() {
        let a = from_hadamard(&generate(4).unwrap());
        assert!(matches!(reduce(&a, 4, 1), Err(Error::Dimension(_))));
        assert!(matches!(reduce(&a, 0, 0), Err(Error::Dimension(_))));
        assert!(matches!(reduce(&a, 0, 4), Err(Error::Dimension(_))));
        let a2 = from_hadamard(&sylvester(1).unwrap());
        assert!(matches!(reduce(&a2, 0, 1), Err(Error::Dimension(_))));
    }

    #[test]
    fn reduce_matches_block_formula() {
        // Build the permuted block form by hand and compare.
        let a = random_member(6, 11).unwrap();
        let (row, col) = (3, 4);
        let out = reduce(&a, row, col).unwrap();
        let n = 5.0_f64;
        let sign = a.get(row, col).signum();
        let p = a.get(row, col) * sign;
        let rows: Vec<usize> = (0..6).filter(|&i| i != row).collect();
        let cols: Vec<usize> = (1..6).filter(|&j| j != col).collect();
        for (oi, &i) in rows.iter().enumerate() {
            let v = a.get(i, col) * sign;
            for (oj, &j) in cols.iter().enumerate() {
                let u = a.get(row, j);
                let x = a.get(i, j);
                let want =
                    x + (-v + 1.0 / (n * (n + 1.0)).sqrt()) * u / ((n / (n + 1.0)).sqrt() + p);
                assert!((out.get(oi, oj + 1) - want).abs() < 1e-15);
            }
            assert!((out.get(oi, 0) - 1.0 / n.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn hadamard_8_reduced_once_meets_gap_bound() {
        let a = from_hadamard(&generate(8).unwrap());
        let r = reduce_best(&a, PivotMode::Heuristic).unwrap();
        // dimension 6 with Hadamard order 8, k = 2
        let bound = (8f64.sqrt() - 1.0) / SQRT_2;
        assert!(r.edge_length() >= bound - 1e-12);
        assert!((bound - 1.2929).abs() < 1e-4);
    }

    #[test]
    fn exhaustive_never_worse_and_deterministic() {
        for seed in 0..5 {
            let a = random_member(9, seed).unwrap();
            let h = reduce_best(&a, PivotMode::Heuristic).unwrap();
            let e1 = reduce_best(&a, PivotMode::Exhaustive).unwrap();
            let e2 = reduce_best(&a, PivotMode::Exhaustive).unwrap();
            assert!(e1.norm() <= h.norm());
            assert_eq!(e1, e2);
        }
    }

    #[test]
    fn exhaustive_pivot_matches_sequential_scan() {
        let a = random_member(8, 42).unwrap();
        let mut best = (f64::INFINITY, (0, 0));
        for r in 0..8 {
            for c in 1..8 {
                let v = reduce(&a, r, c).unwrap().norm().value();
                if v < best.0 {
                    best = (v, (r, c));
                }
            }
        }
        let p = select_pivot(&a, PivotMode::Exhaustive).unwrap();
        assert_eq!((p.row, p.col), best.1);
    }

    #[test]
    fn heuristic_pivot_is_largest_entry() {
        let a = random_member(7, 5).unwrap();
        let p = select_pivot(&a, PivotMode::Heuristic).unwrap();
        let want = a.get(p.row, p.col).abs();
        for r in 0..7 {
            for c in 1..7 {
                assert!(a.get(r, c).abs() <= want);
            }
        }
        // all-equal magnitudes: first in row-major order
        let h = from_hadamard(&generate(8).unwrap());
        assert_eq!(
            select_pivot(&h, PivotMode::Heuristic).unwrap(),
            Pivot { row: 0, col: 1 }
        );
    }

    #[test]
    fn random_members_are_seeded() {
        let a = random_member(10, 7).unwrap();
        let b = random_member(10, 7).unwrap();
        let c = random_member(10, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        a.check().unwrap();
    }

    #[test]
    fn grid_phases_do_not_beat_optimal_uniform() {
        for n in [5, 6, 8, 9, 12] {
            let grid = fourier(n, &grid_phases(n, 64, 0.0)).unwrap();
            let opt = fourier(n, &optimal_phases(n)).unwrap();
            grid.check().unwrap();
            assert!(grid.norm().value() >= opt.norm().value() - 1e-12, "n = {n}");
        }
    }

    #[test]
    fn new_rejects_non_members() {
        assert!(OhatMatrix::new(Matrix::identity(3).unwrap()).is_err());
        let rect = Matrix::zeros(2, 3).unwrap();
        assert!(OhatMatrix::new(rect).is_err());
    }
}
