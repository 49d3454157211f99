//! Hadamard matrices: Sylvester, Paley I/II and Kronecker products.
//!
//! Matrices are held as `±1` bytes and verified with integer arithmetic
//! (`H·Hᵀ = m·I`, zero tolerance) before they leave this module.

pub mod gf;
mod registry;

use rayon::prelude::*;
use serde::Serialize;

pub use registry::{best_recipe, covered_orders, generate, OrderRegistry, Recipe};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use gf::{prime_power, FiniteField};

/// A verified Hadamard matrix.
#[derive(Clone, PartialEq, Eq, Serialize)]
pub struct HadamardMatrix {
    order: usize,
    entries: Vec<i8>,
}

impl std::fmt::Debug for HadamardMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "HadamardMatrix(order {})", self.order)
    }
}

impl HadamardMatrix {
    /// Wraps `entries` (row-major) after checking `H·Hᵀ = m·I` exactly.
    pub fn new(order: usize, entries: Vec<i8>) -> Result<Self> {
        if order == 0 || entries.len() != order * order {
            return Err(Error::dim(format!(
                "order {order} needs {} entries, got {}",
                order * order,
                entries.len()
            )));
        }
        if entries.iter().any(|&e| e != 1 && e != -1) {
            return Err(Error::Invariant("entries must be +1 or -1".into()));
        }
        let h = HadamardMatrix { order, entries };
        h.check_gram()?;
        Ok(h)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[i8] {
        &self.entries[i * self.order..(i + 1) * self.order]
    }

    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.entries[i * self.order + j]
    }

    pub fn to_rows(&self) -> Vec<Vec<i8>> {
        self.entries
            .chunks_exact(self.order)
            .map(<[i8]>::to_vec)
            .collect()
    }

    /// Exact check of `H·Hᵀ = m·I`.
    pub fn verify(&self) -> bool {
        self.check_gram().is_ok()
    }

    fn check_gram(&self) -> Result<()> {
        let m = self.order as i32;
        let bad = (0..self.order).into_par_iter().find_map_first(|i| {
            let ri = self.row(i);
            (i..self.order).find_map(|j| {
                let dot: i32 = ri
                    .iter()
                    .zip(self.row(j))
                    .map(|(&a, &b)| i32::from(a * b))
                    .sum();
                let want = if i == j { m } else { 0 };
                (dot != want).then_some((i, j, dot))
            })
        });
        match bad {
            None => Ok(()),
            Some((i, j, dot)) => Err(Error::Invariant(format!(
                "rows {i} and {j} of the order-{} matrix have inner product {dot}",
                self.order
            ))),
        }
    }

    /// Integer Kronecker product; the result is Hadamard whenever both
    /// factors are.
    pub fn kronecker(&self, rhs: &HadamardMatrix) -> Result<HadamardMatrix> {
        let order = self
            .order
            .checked_mul(rhs.order)
            .filter(|o| o.checked_mul(*o).is_some())
            .ok_or_else(|| Error::dim("Hadamard order overflows"))?;
        let mut entries = Vec::with_capacity(order * order);
        for i in 0..self.order {
            for k in 0..rhs.order {
                for &a in self.row(i) {
                    entries.extend(rhs.row(k).iter().map(|&b| a * b));
                }
            }
        }
        HadamardMatrix::new(order, entries)
    }

    /// `H` scaled to a real matrix, `scale · H`.
    pub fn to_matrix(&self, scale: f64) -> Matrix {
        Matrix::new(
            self.order,
            self.order,
            self.entries.iter().map(|&e| f64::from(e) * scale).collect(),
        )
        .expect("Hadamard matrices are non-empty")
    }

    /// Rows as `+`/`-` strings.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.order * (self.order + 1));
        for row in self.entries.chunks_exact(self.order) {
            out.extend(row.iter().map(|&e| if e > 0 { '+' } else { '-' }));
            out.push('\n');
        }
        out
    }
}

/// Sylvester matrix of order `2^k`: `H₁ = [1]`, `H₂ₘ = [[H, H], [H, −H]]`.
pub fn sylvester(k: u32) -> Result<HadamardMatrix> {
    let order = 1_usize
        .checked_shl(k)
        .filter(|o| k < usize::BITS && o.checked_mul(*o).is_some())
        .ok_or_else(|| Error::dim(format!("2^{k} is too large an order")))?;
    let mut entries = vec![0_i8; order * order];
    for i in 0..order {
        for j in 0..order {
            // (-1)^{popcount(i & j)}
            entries[i * order + j] = if (i & j).count_ones() % 2 == 0 { 1 } else { -1 };
        }
    }
    HadamardMatrix::new(order, entries)
}

fn check_paley_field(q: usize, residue: usize, name: &str) -> Result<FiniteField> {
    if prime_power(q).is_none() {
        return Err(Error::UnsupportedOrder {
            order: q,
            reason: format!("{name} needs a prime power, {q} is not one"),
        });
    }
    if q % 4 != residue {
        return Err(Error::UnsupportedOrder {
            order: q,
            reason: format!("{name} needs q ≡ {residue} (mod 4), got q ≡ {}", q % 4),
        });
    }
    FiniteField::new(q)
}

/// Jacobsthal matrix `Q[a][b] = χ(a − b)` over GF(q).
fn jacobsthal(field: &FiniteField) -> Vec<i8> {
    let q = field.order();
    let chi = field.quadratic_character();
    let mut out = vec![0_i8; q * q];
    for a in 0..q {
        for b in 0..q {
            out[a * q + b] = chi[field.sub(a, b)];
        }
    }
    out
}

/// Paley I: order `q + 1` for a prime power `q ≡ 3 (mod 4)`.
///
/// `H = I + S` with `S = [[0, 𝟙ᵀ], [−𝟙, Q]]` skew-symmetric.
pub fn paley_i(q: usize) -> Result<HadamardMatrix> {
    let field = check_paley_field(q, 3, "Paley I")?;
    let jac = jacobsthal(&field);
    let order = q + 1;
    let mut entries = vec![0_i8; order * order];
    for i in 0..order {
        for j in 0..order {
            let s = match (i, j) {
                (0, 0) => 0,
                (0, _) => 1,
                (_, 0) => -1,
                _ => jac[(i - 1) * q + (j - 1)],
            };
            entries[i * order + j] = if i == j { s + 1 } else { s };
        }
    }
    HadamardMatrix::new(order, entries)
}

/// Paley II: order `2(q + 1)` for a prime power `q ≡ 1 (mod 4)`.
///
/// With the symmetric conference matrix `C = [[0, 𝟙ᵀ], [𝟙, Q]]`, each zero
/// of `C` becomes `[[1, −1], [−1, −1]]` and each `±1` becomes
/// `±[[1, 1], [1, −1]]`.
pub fn paley_ii(q: usize) -> Result<HadamardMatrix> {
    let field = check_paley_field(q, 1, "Paley II")?;
    let jac = jacobsthal(&field);
    let half = q + 1;
    let order = 2 * half;
    let mut entries = vec![0_i8; order * order];
    for i in 0..half {
        for j in 0..half {
            let c = match (i, j) {
                (0, 0) => 0,
                (0, _) | (_, 0) => 1,
                _ => jac[(i - 1) * q + (j - 1)],
            };
            let block: [i8; 4] = match c {
                0 => [1, -1, -1, -1],
                s => [s, s, s, -s],
            };
            for (k, &v) in block.iter().enumerate() {
                entries[(2 * i + k / 2) * order + 2 * j + k % 2] = v;
            }
        }
    }
    HadamardMatrix::new(order, entries)
}
