//! Arithmetic in GF(p^e), just enough for the quadratic character.
//!
//! Elements are encoded as integers `0..q` whose base-`p` digits are the
//! polynomial coefficients (least significant digit = constant term). The
//! field is `GF(p)[x] / (f)` with `f` the first monic irreducible polynomial
//! of degree `e` in lexicographic order of its coefficient digits.

use crate::error::{Error, Result};

/// Factors `q` as `p^e` with `p` prime, or returns `None`.
pub fn prime_power(q: usize) -> Option<(usize, u32)> {
    if q < 2 {
        return None;
    }
    let p = smallest_prime_factor(q);
    let mut rest = q;
    let mut e = 0;
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

fn smallest_prime_factor(n: usize) -> usize {
    if n % 2 == 0 {
        return 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return d;
        }
        d += 2;
    }
    n
}

#[derive(Debug, Clone)]
pub struct FiniteField {
    p: usize,
    degree: usize,
    order: usize,
    /// Low-order coefficients of the monic modulus (`degree` entries).
    modulus: Vec<usize>,
}

impl FiniteField {
    pub fn new(q: usize) -> Result<Self> {
        let (p, e) = prime_power(q).ok_or_else(|| Error::UnsupportedOrder {
            order: q,
            reason: "field size is not a prime power".into(),
        })?;
        let degree = e as usize;
        let modulus = if degree == 1 {
            vec![0]
        } else {
            first_irreducible(p, degree)
        };
        Ok(FiniteField {
            p,
            degree,
            order: q,
            modulus,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn characteristic(&self) -> usize {
        self.p
    }

    fn digits(&self, mut x: usize) -> Vec<usize> {
        let mut d = vec![0; self.degree];
        for slot in d.iter_mut() {
            *slot = x % self.p;
            x /= self.p;
        }
        d
    }

    fn encode(&self, digits: &[usize]) -> usize {
        digits.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        if self.degree == 1 {
            return (a + self.p - b) % self.p;
        }
        let (da, db) = (self.digits(a), self.digits(b));
        let diff: Vec<usize> = da
            .iter()
            .zip(&db)
            .map(|(x, y)| (x + self.p - y) % self.p)
            .collect();
        self.encode(&diff)
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        if self.degree == 1 {
            return a * b % self.p;
        }
        let (da, db) = (self.digits(a), self.digits(b));
        let mut prod = vec![0; 2 * self.degree - 1];
        for (i, x) in da.iter().enumerate() {
            for (j, y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        // x^degree ≡ -(modulus low terms)
        for k in (self.degree..prod.len()).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for (i, m) in self.modulus.iter().enumerate() {
                let idx = k - self.degree + i;
                prod[idx] = (prod[idx] + (self.p - c) * m) % self.p;
            }
        }
        self.encode(&prod[..self.degree])
    }

    /// Quadratic character table: `chi[x]` is 0 for `x = 0`, +1 for non-zero
    /// squares and −1 otherwise.
    pub fn quadratic_character(&self) -> Vec<i8> {
        let mut chi = vec![-1_i8; self.order];
        chi[0] = 0;
        for x in 1..self.order {
            chi[self.mul(x, x)] = 1;
        }
        chi
    }
}

/// Remainder of `num` modulo the monic polynomial `den` (coefficients low to
/// high, `den` monic).
fn poly_rem(num: &[usize], den: &[usize], p: usize) -> Vec<usize> {
    let mut r = num.to_vec();
    let dd = den.len() - 1;
    while r.len() > dd {
        let c = *r.last().unwrap();
        if c != 0 {
            let shift = r.len() - 1 - dd;
            for (i, d) in den.iter().enumerate() {
                r[shift + i] = (r[shift + i] + (p - c) * d) % p;
            }
        }
        r.pop();
    }
    r
}

fn monic_from_index(mut idx: usize, degree: usize, p: usize) -> Vec<usize> {
    let mut coeffs = Vec::with_capacity(degree + 1);
    for _ in 0..degree {
        coeffs.push(idx % p);
        idx /= p;
    }
    coeffs.push(1);
    coeffs
}

fn is_irreducible(poly: &[usize], p: usize) -> bool {
    let degree = poly.len() - 1;
    for d in 1..=degree / 2 {
        for idx in 0..p.pow(d as u32) {
            let divisor = monic_from_index(idx, d, p);
            if poly_rem(poly, &divisor, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Low-order coefficients of the first monic irreducible polynomial of the
/// given degree over GF(p).
fn first_irreducible(p: usize, degree: usize) -> Vec<usize> {
    (0..p.pow(degree as u32))
        .map(|idx| monic_from_index(idx, degree, p))
        .find(|poly| is_irreducible(poly, p))
        .map(|mut poly| {
            poly.pop();
            poly
        })
        .expect("an irreducible polynomial exists for every degree")
}
