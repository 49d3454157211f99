use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use super::gf::prime_power;
use super::{paley_i, paley_ii, sylvester, HadamardMatrix};
use crate::error::{Error, Result};

/// How a covered order is generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Recipe {
    Sylvester {
        exponent: u32,
    },
    Paley1 {
        q: usize,
    },
    Paley2 {
        q: usize,
    },
    /// Product of the matrices for two covered orders.
    Kronecker {
        left: usize,
        right: usize,
    },
}

impl Recipe {
    pub fn order(&self) -> usize {
        match *self {
            Recipe::Sylvester { exponent } => 1 << exponent,
            Recipe::Paley1 { q } => q + 1,
            Recipe::Paley2 { q } => 2 * (q + 1),
            Recipe::Kronecker { left, right } => left * right,
        }
    }
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Recipe::Sylvester { exponent } => write!(f, "sylvester(k={exponent})"),
            Recipe::Paley1 { q } => write!(f, "paley1(q={q})"),
            Recipe::Paley2 { q } => write!(f, "paley2(q={q})"),
            Recipe::Kronecker { left, right } => write!(f, "kronecker({left},{right})"),
        }
    }
}

/// Memoised order → recipe lookup plus a cache of generated matrices.
///
/// Recipes are a pure function of the order, so the caches never change
/// what a lookup returns.
#[derive(Default)]
pub struct OrderRegistry {
    recipes: Mutex<HashMap<usize, Option<Recipe>>>,
    matrices: Mutex<HashMap<usize, Arc<HadamardMatrix>>>,
}

impl OrderRegistry {
    pub fn global() -> &'static OrderRegistry {
        static REGISTRY: OnceLock<OrderRegistry> = OnceLock::new();
        REGISTRY.get_or_init(OrderRegistry::default)
    }

    /// Preference: Sylvester, Paley I, Paley II, then the Kronecker split
    /// with the smallest left factor.
    pub fn best_recipe(&self, order: usize) -> Option<Recipe> {
        if let Some(hit) = self.recipes.lock().unwrap().get(&order) {
            return *hit;
        }
        let found = self.search(order);
        self.recipes.lock().unwrap().insert(order, found);
        found
    }

    fn search(&self, order: usize) -> Option<Recipe> {
        if order == 0 || (order > 2 && order % 4 != 0) {
            return None;
        }
        if order.is_power_of_two() {
            return Some(Recipe::Sylvester {
                exponent: order.trailing_zeros(),
            });
        }
        let q = order - 1;
        if q % 4 == 3 && prime_power(q).is_some() {
            return Some(Recipe::Paley1 { q });
        }
        let q = order / 2 - 1;
        if q % 4 == 1 && prime_power(q).is_some() {
            return Some(Recipe::Paley2 { q });
        }
        // smallest left factor with both sides covered
        divisors(order)
            .into_iter()
            .filter(|&d| d >= 2 && d < order)
            .find(|&d| self.best_recipe(d).is_some() && self.best_recipe(order / d).is_some())
            .map(|d| Recipe::Kronecker {
                left: d,
                right: order / d,
            })
    }

    pub fn is_covered(&self, order: usize) -> bool {
        self.best_recipe(order).is_some()
    }

    /// Covered orders `≤ limit`, ascending.
    pub fn covered_orders(&self, limit: usize) -> Vec<usize> {
        (1..=limit).filter(|&m| self.is_covered(m)).collect()
    }

    /// Smallest covered order `≥ order`.
    pub fn next_covered(&self, order: usize) -> usize {
        (order.max(1)..)
            .find(|&m| self.is_covered(m))
            .expect("powers of two are always covered")
    }

    /// Generates (and caches) the matrix for a covered order.
    pub fn generate(&self, order: usize) -> Result<Arc<HadamardMatrix>> {
        if let Some(h) = self.matrices.lock().unwrap().get(&order) {
            return Ok(Arc::clone(h));
        }
        let recipe = self
            .best_recipe(order)
            .ok_or_else(|| Error::UnsupportedOrder {
                order,
                reason: "no Sylvester, Paley or Kronecker recipe reaches this order".into(),
            })?;
        let h = Arc::new(self.build(recipe)?);
        self.matrices.lock().unwrap().insert(order, Arc::clone(&h));
        Ok(h)
    }

    fn build(&self, recipe: Recipe) -> Result<HadamardMatrix> {
        match recipe {
            Recipe::Sylvester { exponent } => sylvester(exponent),
            Recipe::Paley1 { q } => paley_i(q),
            Recipe::Paley2 { q } => paley_ii(q),
            Recipe::Kronecker { left, right } => {
                let l = self.generate(left)?;
                let r = self.generate(right)?;
                l.kronecker(&r)
            }
        }
    }
}

fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|d| n % d == 0).collect()
}

pub fn best_recipe(order: usize) -> Option<Recipe> {
    OrderRegistry::global().best_recipe(order)
}

pub fn covered_orders(limit: usize) -> Vec<usize> {
    OrderRegistry::global().covered_orders(limit)
}

pub fn generate(order: usize) -> Result<Arc<HadamardMatrix>> {
    OrderRegistry::global().generate(order)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recipe_examples() {
        assert_eq!(best_recipe(2), Some(Recipe::Sylvester { exponent: 1 }));
        assert_eq!(best_recipe(4), Some(Recipe::Sylvester { exponent: 2 }));
        assert_eq!(best_recipe(12), Some(Recipe::Paley1 { q: 11 }));
        assert_eq!(best_recipe(20), Some(Recipe::Paley1 { q: 19 }));
        assert_eq!(best_recipe(52), Some(Recipe::Paley2 { q: 25 }));
        assert_eq!(best_recipe(92), None);
        assert_eq!(best_recipe(668), None);
        assert_eq!(best_recipe(6), None);
        assert_eq!(best_recipe(0), None);
        assert_eq!(
            best_recipe(144),
            Some(Recipe::Kronecker { left: 2, right: 72 })
        );
    }

    #[test]
    fn covered_examples() {
        assert_eq!(covered_orders(12), vec![1, 2, 4, 8, 12]);
        assert_eq!(covered_orders(2), vec![1, 2]);
        let upto96 = covered_orders(96);
        let mut expect = vec![1, 2];
        expect.extend((4..=96).step_by(4).filter(|&m| m != 92));
        assert_eq!(upto96, expect);
    }

    #[test]
    fn deterministic() {
        let reg = OrderRegistry::default();
        for m in [4, 36, 100, 144, 256, 400, 600] {
            assert_eq!(reg.best_recipe(m), best_recipe(m));
            assert_eq!(reg.best_recipe(m), reg.best_recipe(m));
        }
    }

    #[test]
    fn unavailable_generate_errors() {
        assert!(matches!(generate(92), Err(Error::UnsupportedOrder { .. })));
    }
}
