//! Stratum signatures and the low-dimensional arithmetic around them.
//!
//! A signature records the genus together with the labeled orders of
//! zeroes and poles of the differentials in a stratum H_g(m_1,...,m_n).
//! This module owns the dimension formula, the genus-0/1 component
//! labels, index/rotation arithmetic, and the cusp counting for the
//! modular curves that classify the ends of the genus-1 two-point
//! strata components.

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StratumError {
    #[error("order sum {sum} does not match 2g-2 = {expected}")]
    DegreeMismatch { sum: i64, expected: i64 },
    #[error("order list must be non-empty")]
    EmptyOrderList,
    #[error("argument must be positive, got {0}")]
    NonPositive(i64),
    #[error("{r} does not divide {m}")]
    NotDivisor { m: i64, r: i64 },
    #[error("expected genus 1, got genus {0}")]
    WrongGenus(u32),
    #[error("signature has no pole")]
    NoPole,
    #[error("component label inconsistent with signature: {0}")]
    InconsistentComponent(String),
    #[error("the stratum is empty: {0}")]
    EmptyStratum(String),
}

/// A stratum signature: genus plus the labeled integer orders
/// (m_1,...,m_n), with sum m_i = 2g - 2. Points are labeled by
/// position, 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    genus: u32,
    orders: Vec<i64>,
}

impl Signature {
    pub fn new(genus: u32, orders: Vec<i64>) -> Result<Self, StratumError> {
        if orders.is_empty() {
            return Err(StratumError::EmptyOrderList);
        }
        let sum: i64 = orders.iter().sum();
        let expected = 2 * genus as i64 - 2;
        if sum != expected {
            return Err(StratumError::DegreeMismatch { sum, expected });
        }
        Ok(Signature { genus, orders })
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn orders(&self) -> &[i64] {
        &self.orders
    }

    pub fn n(&self) -> usize {
        self.orders.len()
    }

    /// Holomorphic iff no order is negative; orders equal to zero
    /// (ordinary marked points) are allowed either way.
    pub fn is_holomorphic(&self) -> bool {
        self.orders.iter().all(|&m| m >= 0)
    }

    pub fn has_pole(&self) -> bool {
        self.orders.iter().any(|&m| m < 0)
    }

    /// gcd of the absolute values of the orders; 0 if all orders are 0.
    pub fn order_gcd(&self) -> i64 {
        self.orders.iter().fold(0i64, |d, &m| d.gcd(&m.abs()))
    }

    /// Dimension of the projectivized stratum: 2g + n - 2 in the
    /// holomorphic case, 2g + n - 3 otherwise (rank of relative first
    /// homology of the punctured surface, minus 1 for
    /// projectivization). Clamped at 0.
    pub fn projective_dimension(&self) -> u32 {
        let raw = if self.is_holomorphic() {
            2 * self.genus as i64 + self.n() as i64 - 2
        } else {
            2 * self.genus as i64 + self.n() as i64 - 3
        };
        raw.max(0) as u32
    }
}

/// Label for a connected component of a stratum.
///
/// Genus-0 strata are connected. Genus-1 components are classified by
/// their rotation number. For g >= 2 the classification (spin,
/// hyperelliptic) is out of scope and the label is an opaque tag.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ComponentLabel {
    Genus0,
    Genus1Rotation(i64),
    HigherGenusOpaque(String),
}

impl ComponentLabel {
    /// Checks the label against a signature: rotation numbers must
    /// divide the gcd of the orders (and for n=2 satisfy r < m).
    pub fn check_against(&self, sig: &Signature) -> Result<(), StratumError> {
        match self {
            ComponentLabel::Genus0 => {
                if sig.genus() != 0 {
                    return Err(StratumError::InconsistentComponent(
                        "Genus0 label on positive-genus signature".into(),
                    ));
                }
            }
            ComponentLabel::Genus1Rotation(r) => {
                if sig.genus() != 1 {
                    return Err(StratumError::InconsistentComponent(
                        "rotation label on non-genus-1 signature".into(),
                    ));
                }
                let components = genus1_components(sig)?;
                if !components.contains(self) {
                    return Err(StratumError::InconsistentComponent(format!(
                        "rotation number {r} is not a component of this stratum"
                    )));
                }
            }
            ComponentLabel::HigherGenusOpaque(_) => {
                if sig.genus() < 2 {
                    return Err(StratumError::InconsistentComponent(
                        "opaque label on genus <= 1 signature".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// An index class for the components of the irreducible-type
/// horizontal boundary in genus 1: an integer 1 <= I <= d modulo the
/// identification I ~ d - I (swapping the labels of the two simple
/// poles), with 0 read back as d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndexClass {
    index: i64,
    modulus: i64,
}

impl IndexClass {
    pub fn new(index: i64, modulus: i64) -> Result<Self, StratumError> {
        if modulus < 1 {
            return Err(StratumError::NonPositive(modulus));
        }
        if index < 1 || index > modulus {
            return Err(StratumError::InconsistentComponent(format!(
                "index {index} out of range 1..={modulus}"
            )));
        }
        Ok(IndexClass { index, modulus })
    }

    /// Canonical representative: min over {I, d - I}, with 0 replaced by d.
    pub fn canonical(&self) -> i64 {
        let mirror = self.modulus - self.index;
        let mirror = if mirror == 0 { self.modulus } else { mirror };
        self.index.min(mirror)
    }

    pub fn index(&self) -> i64 {
        self.index
    }

    pub fn modulus(&self) -> i64 {
        self.modulus
    }

    pub fn same_class(&self, other: &IndexClass) -> bool {
        self.modulus == other.modulus && self.canonical() == other.canonical()
    }
}

/// rotation(I) = gcd(I, d); equal on both representatives of a class.
pub fn rotation_of_index(class: &IndexClass) -> i64 {
    class.index().gcd(&class.modulus())
}

/// Canonical representatives of {1,...,d} under I ~ d - I (with 0
/// identified back to d), sorted ascending.
pub fn index_classes(d: i64) -> Vec<IndexClass> {
    let mut reps: Vec<i64> = (1..=d)
        .map(|i| IndexClass { index: i, modulus: d }.canonical())
        .collect();
    reps.sort_unstable();
    reps.dedup();
    reps.into_iter()
        .map(|i| IndexClass { index: i, modulus: d })
        .collect()
}

/// Euler totient: #{1 <= k <= n : gcd(k, n) = 1}.
pub fn euler_phi(n: i64) -> Result<i64, StratumError> {
    if n < 1 {
        return Err(StratumError::NonPositive(n));
    }
    let mut phi = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            phi -= phi / p;
        }
        p += 1;
    }
    if m > 1 {
        phi -= phi / m;
    }
    Ok(phi)
}

/// The closed-form cusp count (1/2) sum_{d | N} phi(d) phi(N/d) for
/// N = m/r, returned as an exact rational. The value is non-integral
/// for N = 4 and undercounts at N = 2; callers reconcile against
/// [`cusp_count_oracle`].
pub fn cusp_count_formula(m: i64, r: i64) -> Result<Ratio<i64>, StratumError> {
    if m < 1 {
        return Err(StratumError::NonPositive(m));
    }
    if r < 1 || m % r != 0 {
        return Err(StratumError::NotDivisor { m, r });
    }
    let level = m / r;
    let mut sum = 0i64;
    for d in 1..=level {
        if level % d == 0 {
            sum += euler_phi(d)? * euler_phi(level / d)?;
        }
    }
    Ok(Ratio::new(sum, 2))
}

/// Query for the cusp count of X_1(N), N = m/r.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CuspQuery {
    pub level: i64,
}

impl CuspQuery {
    pub fn new(level: i64) -> Result<Self, StratumError> {
        if level < 1 {
            return Err(StratumError::NonPositive(level));
        }
        Ok(CuspQuery { level })
    }
}

/// Brute-force cusp count of X_1(N): orbits of pairs (a, c) mod N
/// with gcd(a, c, N) = 1 under (a, c) ~ +-(a + j*c, c).
pub fn cusp_count_oracle(q: CuspQuery) -> i64 {
    let n = q.level;
    let mut seen: HashSet<(i64, i64)> = HashSet::new();
    let mut orbits = 0;
    for a in 0..n {
        for c in 0..n {
            if a.gcd(&c).gcd(&n) != 1 {
                continue;
            }
            if seen.contains(&(a, c)) {
                continue;
            }
            orbits += 1;
            // close the orbit under translation and negation
            let mut stack = vec![(a, c)];
            while let Some((x, y)) = stack.pop() {
                if !seen.insert((x, y)) {
                    continue;
                }
                stack.push(((x + y).rem_euclid(n), y));
                stack.push(((-x).rem_euclid(n), (-y).rem_euclid(n)));
            }
        }
    }
    orbits
}

/// Connected components of a genus-1 stratum, as rotation-number
/// labels. For n = 2 with orders (m, -m) these are {r | m, r < m};
/// for n >= 3 every divisor of d = gcd(|m_i|) is included.
pub fn genus1_components(sig: &Signature) -> Result<Vec<ComponentLabel>, StratumError> {
    if sig.genus() != 1 {
        return Err(StratumError::WrongGenus(sig.genus()));
    }
    if !sig.has_pole() {
        return Err(StratumError::NoPole);
    }
    let d = sig.order_gcd();
    let mut rotations: Vec<i64> = (1..=d).filter(|r| d % r == 0).collect();
    if sig.n() == 2 {
        // two-pointed case: components C_r for r | m with r < m only
        let m = sig.orders()[0].abs();
        rotations.retain(|&r| r < m);
    }
    Ok(rotations
        .into_iter()
        .map(ComponentLabel::Genus1Rotation)
        .collect())
}
