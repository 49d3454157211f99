//! Closed-form bounds on `f₀(n)`, the longest edge of an origin-centred
//! regular `n`-simplex inside `[-1/2, 1/2]^n`.
//!
//! | bound | value |
//! |---|---|
//! | upper | `√((n+1)/2)`, attained iff a Hadamard matrix of order `n+1` exists |
//! | Fourier | `√(n+1)/2`, refined by a cosine factor depending on `(n+1) mod 4` |
//! | Hadamard gap | `(√(n+k) − k + 1)/√2` from a Hadamard matrix of order `n+k` |
//! | doubling chain | `(c − (1+√2)/√N)·√(n/2)` when `f₀ ≥ c·√(n/2)` on `[N, 2N−1]` |
//!
//! The chain instantiated at `N = 332`, `c = (√336 − 3)/√332` gives the
//! universal ratio `(√336 − 4 − √2)/√664 ≈ 0.50124`.

use std::f64::consts::{PI, SQRT_2};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hadamard::OrderRegistry;

/// `(√336 − 4 − √2)/√664`.
pub fn theorem1_constant() -> f64 {
    (336f64.sqrt() - 4.0 - SQRT_2) / 664f64.sqrt()
}

/// Chain base used for the universal constant.
pub const CHAIN_BASE: usize = 332;

/// `(√336 − 3)/√332`, the chain slope at [`CHAIN_BASE`].
pub fn chain_slope() -> f64 {
    (336f64.sqrt() - 3.0) / 332f64.sqrt()
}

/// Smallest order with no Hadamard matrix known in the literature the
/// bounds are quoted against.
pub const FIRST_UNKNOWN_ORDER: usize = 668;

/// `√((n+1)/2)`.
pub fn upper_bound(n: usize) -> f64 {
    (n as f64 + 1.0).sqrt() / SQRT_2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierBounds {
    /// `√(n+1)/2`
    pub basic: f64,
    /// with `m = n+1`: `√m/(2cos(π/m))` if `m ≡ 0`, `√m/(2cos(π/2m))` if
    /// `m ≡ 2`, `√m/(2cos(π/4m))` otherwise (mod 4)
    pub refined: f64,
}

pub fn fourier_bounds(n: usize) -> FourierBounds {
    let m = n as f64 + 1.0;
    let angle = match (n + 1) % 4 {
        0 => PI / m,
        2 => PI / (2.0 * m),
        _ => PI / (4.0 * m),
    };
    FourierBounds {
        basic: m.sqrt() / 2.0,
        refined: m.sqrt() / (2.0 * angle.cos()),
    }
}

/// Lower bound from a Hadamard matrix `k` orders above `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapBound {
    pub value: f64,
    pub k: usize,
    /// The bound equals `f₀(n)` only for `k = 1`.
    pub exact: bool,
}

/// `(√(n+k) − k + 1)/√2` with no availability check.
pub fn hadamard_gap_formula(n: usize, k: usize) -> f64 {
    ((n as f64 + k as f64).sqrt() - (k as f64 - 1.0)) / SQRT_2
}

/// Hadamard-gap bound for an order `n + k` the registry can construct.
pub fn hadamard_gap_bound(n: usize, k: usize) -> Result<GapBound> {
    if k == 0 {
        return Err(Error::Domain("the Hadamard gap needs k ≥ 1".into()));
    }
    let order = n + k;
    if !OrderRegistry::global().is_covered(order) {
        return Err(Error::UnsupportedOrder {
            order,
            reason: "not reachable by the registry".into(),
        });
    }
    Ok(GapBound {
        value: hadamard_gap_formula(n, k),
        k,
        exact: k == 1,
    })
}

/// Which Hadamard orders are taken to exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderSource {
    /// Orders the registry can build.
    Registry,
    /// 1, 2 and every multiple of 4 below [`FIRST_UNKNOWN_ORDER`].
    Literature,
}

fn literature_has(order: usize) -> bool {
    (order == 1 || order == 2 || order % 4 == 0) && order > 0 && order < FIRST_UNKNOWN_ORDER
}

/// Smallest `k ≥ 1` with an available order `n + k`. The gap bound decreases
/// in `k`, so this is the best gap bound for `n`.
pub fn smallest_gap(n: usize, source: OrderSource) -> Option<usize> {
    match source {
        OrderSource::Registry => Some(OrderRegistry::global().next_covered(n + 1) - n),
        OrderSource::Literature => (n + 1..FIRST_UNKNOWN_ORDER)
            .find(|&o| literature_has(o))
            .map(|o| o - n),
    }
}

pub fn best_gap_bound(n: usize, source: OrderSource) -> Option<GapBound> {
    smallest_gap(n, source).map(|k| GapBound {
        value: hadamard_gap_formula(n, k),
        k,
        exact: k == 1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainBound {
    /// `(c − (1+√2)/√N)·√(n/2)`
    pub final_bound: f64,
    /// `c·√(n/2) − (√2^k − 1)/(2 − √2)` with `2^k·N ≤ n < 2^{k+1}·N`
    pub intermediate: f64,
    pub k: u32,
    /// Whether `c ≤ √((n+1)/n)`, the premise the induction relies on.
    pub premise_holds: bool,
}

/// Lower bound propagated by doubling from a base interval `[N, 2N−1]` on
/// which `f₀(n) ≥ c·√(n/2)` is assumed.
pub fn chain_bound(n: usize, base: usize, c: f64) -> Result<ChainBound> {
    if base == 0 {
        return Err(Error::Domain("chain base must be positive".into()));
    }
    if n < base {
        return Err(Error::Domain(format!(
            "chain bound needs n ≥ {base}, got {n}"
        )));
    }
    let mut k = 0_u32;
    while (base << (k + 1)) <= n {
        k += 1;
    }
    let nf = n as f64;
    let half = (nf / 2.0).sqrt();
    Ok(ChainBound {
        final_bound: (c - (1.0 + SQRT_2) / (base as f64).sqrt()) * half,
        intermediate: c * half - (SQRT_2.powi(k as i32) - 1.0) / (2.0 - SQRT_2),
        k,
        premise_holds: c <= ((nf + 1.0) / nf).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Check {
    pub constant: f64,
    /// Best proven lower bound on `f₀(n)/√n`.
    pub satisfied_by: f64,
}

impl Theorem1Check {
    pub fn holds(&self) -> bool {
        self.satisfied_by > self.constant
    }
}

/// Lower bound on `f₀(n)/√n` that the universal constant is compared with.
///
/// Below the chain base: the better of the Fourier bound and the
/// `k ≤ 4` Hadamard-gap bound. From the base on: the intermediate chain
/// value, which exceeds the constant strictly. Where both apply, the larger.
pub fn theorem1_check(n: usize) -> Theorem1Check {
    let nf = n.max(1) as f64;
    let mut best = (nf + 1.0).sqrt() / (2.0 * nf.sqrt());
    if n + 4 < FIRST_UNKNOWN_ORDER {
        best = best.max(((nf + 4.0).sqrt() - 3.0) / (2.0 * nf).sqrt());
    }
    if n >= CHAIN_BASE {
        let chain = chain_bound(n, CHAIN_BASE, chain_slope()).expect("n ≥ base");
        best = best.max(chain.intermediate / nf.sqrt());
    }
    Theorem1Check {
        constant: theorem1_constant(),
        satisfied_by: best,
    }
}

/// Every bound for one dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: usize,
    pub upper: f64,
    pub fourier_basic: f64,
    pub fourier_refined: f64,
    /// Gap bound assuming the orders known in the literature.
    pub hadamard_gap: Option<GapBound>,
    /// Gap bound restricted to orders the registry can build.
    pub hadamard_gap_registry: Option<GapBound>,
    /// Final doubling-chain bound, for `n ≥` [`CHAIN_BASE`].
    pub chain: Option<f64>,
    pub theorem1_constant_times_sqrt_n: f64,
    pub best_lower: f64,
}

pub fn bound_report(n: usize) -> Result<BoundReport> {
    if n == 0 {
        return Err(Error::Domain("dimension must be ≥ 1".into()));
    }
    let fb = fourier_bounds(n);
    let gap = best_gap_bound(n, OrderSource::Literature);
    let gap_reg = best_gap_bound(n, OrderSource::Registry);
    let chain = (n >= CHAIN_BASE).then(|| {
        chain_bound(n, CHAIN_BASE, chain_slope())
            .expect("n ≥ base")
            .final_bound
    });
    let thm = theorem1_constant() * (n as f64).sqrt();
    let best_lower = [
        Some(fb.basic),
        Some(fb.refined),
        gap.map(|g| g.value),
        gap_reg.map(|g| g.value),
        chain,
        Some(thm),
    ]
    .into_iter()
    .flatten()
    .fold(f64::NEG_INFINITY, f64::max);
    Ok(BoundReport {
        n,
        upper: upper_bound(n),
        fourier_basic: fb.basic,
        fourier_refined: fb.refined,
        hadamard_gap: gap,
        hadamard_gap_registry: gap_reg,
        chain,
        theorem1_constant_times_sqrt_n: thm,
        best_lower,
    })
}

#[derive(Serialize)]
struct BoundRow {
    n: usize,
    upper: f64,
    fourier_basic: f64,
    fourier_refined: f64,
    hadamard_gap: Option<f64>,
    hadamard_gap_k: Option<usize>,
    hadamard_gap_registry: Option<f64>,
    hadamard_gap_registry_k: Option<usize>,
    chain: Option<f64>,
    theorem1_constant_times_sqrt_n: f64,
    best_lower: f64,
}

impl From<&BoundReport> for BoundRow {
    fn from(r: &BoundReport) -> Self {
        BoundRow {
            n: r.n,
            upper: r.upper,
            fourier_basic: r.fourier_basic,
            fourier_refined: r.fourier_refined,
            hadamard_gap: r.hadamard_gap.map(|g| g.value),
            hadamard_gap_k: r.hadamard_gap.map(|g| g.k),
            hadamard_gap_registry: r.hadamard_gap_registry.map(|g| g.value),
            hadamard_gap_registry_k: r.hadamard_gap_registry.map(|g| g.k),
            chain: r.chain,
            theorem1_constant_times_sqrt_n: r.theorem1_constant_times_sqrt_n,
            best_lower: r.best_lower,
        }
    }
}

/// Writes one CSV row per report, with a header.
pub fn write_csv<W: Write>(reports: &[BoundReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in reports {
        w.serialize(BoundRow::from(r))
            .map_err(|e| Error::Io(e.into()))?;
    }
    w.flush()?;
    Ok(())
}
