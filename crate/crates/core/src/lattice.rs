//! Exact arithmetic in the Picard lattice of an iterated blow-up of the plane.
//!
//! Classes live in Z^{1+n} with basis H, E_1, ..., E_n and intersection form
//! diag(1, -1, ..., -1). A [`DivisorClass`] stores `(d; m_1, ..., m_n)` for the
//! class `d*H - sum m_i E_i`, so curve multiplicities read off positively and an
//! exceptional divisor E_i itself is `(0; ..., -1, ...)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

use crate::error::LatticeError;

/// Exact integer used for all lattice coordinates.
pub type Int = BigInt;
/// Exact rational used for genus, discrepancies and projections.
pub type Rat = BigRational;

/// A divisor class `d*H - sum m_i E_i` on an `n`-fold blow-up of the plane.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DivisorClass {
    pub degree: Int,
    pub mults: Vec<Int>,
}

impl fmt::Debug for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};", self.degree)?;
        for (i, m) in self.mults.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", m)?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl DivisorClass {
    pub fn new(degree: impl Into<Int>, mults: Vec<i64>) -> Self {
        DivisorClass {
            degree: degree.into(),
            mults: mults.into_iter().map(Int::from).collect(),
        }
    }

    pub fn from_ints(degree: Int, mults: Vec<Int>) -> Self {
        DivisorClass { degree, mults }
    }

    /// The zero class in the lattice of an `n`-fold blow-up.
    pub fn zero(n: usize) -> Self {
        DivisorClass {
            degree: Int::zero(),
            mults: vec![Int::zero(); n],
        }
    }

    /// Class of the total transform of the i-th exceptional divisor (0-based).
    pub fn exceptional(n: usize, i: usize) -> Self {
        let mut c = Self::zero(n);
        c.mults[i] = -Int::one();
        c
    }

    /// Ambient blow-up count.
    pub fn ambient(&self) -> usize {
        self.mults.len()
    }

    pub fn is_zero(&self) -> bool {
        self.degree.is_zero() && self.mults.iter().all(|m| m.is_zero())
    }

    pub fn add(&self, other: &DivisorClass) -> Result<DivisorClass, LatticeError> {
        self.check_ambient(other)?;
        Ok(DivisorClass {
            degree: &self.degree + &other.degree,
            mults: self
                .mults
                .iter()
                .zip(&other.mults)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &DivisorClass) -> Result<DivisorClass, LatticeError> {
        self.check_ambient(other)?;
        Ok(DivisorClass {
            degree: &self.degree - &other.degree,
            mults: self
                .mults
                .iter()
                .zip(&other.mults)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&self, k: &Int) -> DivisorClass {
        DivisorClass {
            degree: &self.degree * k,
            mults: self.mults.iter().map(|m| m * k).collect(),
        }
    }

    /// Extend the class to a larger ambient lattice, padding with zero mults.
    pub fn extended(&self, n: usize) -> DivisorClass {
        assert!(n >= self.mults.len());
        let mut mults = self.mults.clone();
        mults.resize(n, Int::zero());
        DivisorClass {
            degree: self.degree.clone(),
            mults,
        }
    }

    fn check_ambient(&self, other: &DivisorClass) -> Result<(), LatticeError> {
        if self.ambient() != other.ambient() {
            return Err(LatticeError::DimensionMismatch {
                left: self.ambient(),
                right: other.ambient(),
            });
        }
        Ok(())
    }
}

/// Intersection pairing `d*e - sum m_i m'_i`.
pub fn intersect(a: &DivisorClass, b: &DivisorClass) -> Result<Int, LatticeError> {
    if a.ambient() != b.ambient() {
        return Err(LatticeError::DimensionMismatch {
            left: a.ambient(),
            right: b.ambient(),
        });
    }
    let mut acc = &a.degree * &b.degree;
    for (m, m2) in a.mults.iter().zip(&b.mults) {
        acc -= m * m2;
    }
    Ok(acc)
}

/// Canonical class `K = -3H + sum E_i`, i.e. `(-3; -1, ..., -1)`.
pub fn canonical_class(n: usize) -> DivisorClass {
    DivisorClass {
        degree: Int::from(-3),
        mults: vec![-Int::one(); n],
    }
}

/// Arithmetic genus via adjunction: `(C^2 + C.K)/2 + 1`, exact rational.
pub fn arithmetic_genus(c: &DivisorClass) -> Rat {
    let k = canonical_class(c.ambient());
    let c2 = intersect(c, c).expect("same ambient");
    let ck = intersect(c, &k).expect("same ambient");
    Rat::new(c2 + ck, Int::from(2)) + Rat::one()
}

/// Lattice reflection of the standard Cremona transformation with centers
/// `i, j, k` (0-based indices): `d' = 2d - m_i - m_j - m_k`,
/// `m_i' = d - m_j - m_k` and cyclically, other entries fixed.
pub fn cremona_image(
    c: &DivisorClass,
    i: usize,
    j: usize,
    k: usize,
) -> Result<DivisorClass, LatticeError> {
    let n = c.ambient();
    if i == j || j == k || i == k {
        return Err(LatticeError::RepeatedIndex);
    }
    for &t in &[i, j, k] {
        if t >= n {
            return Err(LatticeError::IndexOutOfRange { index: t, len: n });
        }
    }
    let s = &c.mults[i] + &c.mults[j] + &c.mults[k];
    let mut out = c.clone();
    out.degree = Int::from(2) * &c.degree - &s;
    out.mults[i] = &c.degree - &c.mults[j] - &c.mults[k];
    out.mults[j] = &c.degree - &c.mults[i] - &c.mults[k];
    out.mults[k] = &c.degree - &c.mults[i] - &c.mults[j];
    Ok(out)
}

/// All classes `r` with `r^2 = -2` and `r.K = 0` on an `n`-fold blow-up,
/// `n <= 8`. These form the finite root system of type E_n.
///
/// Search bound `|d| <= max_degree`; `max_degree = 6` is already past the true
/// maximum for n <= 8, and the completeness re-search at 7 is a test oracle.
pub fn enumerate_roots_bounded(
    n: usize,
    max_degree: i64,
) -> Result<Vec<DivisorClass>, LatticeError> {
    if n > 8 {
        return Err(LatticeError::RootSystemInfinite { n });
    }
    let mut out = Vec::new();
    let mut mults = vec![0i64; n];
    for d in -max_degree..=max_degree {
        // r.r = -2 and r.K = 0 translate to sum m_i^2 = d^2 + 2, sum m_i = 3d.
        let target_sq = d * d + 2;
        let target_sum = 3 * d;
        search_roots(d, n, 0, target_sum, target_sq, &mut mults, &mut out);
    }
    // Exactness cross-check of every candidate through the public pairing.
    let k = canonical_class(n);
    for r in &out {
        debug_assert_eq!(intersect(r, r).unwrap(), Int::from(-2));
        debug_assert_eq!(intersect(r, &k).unwrap(), Int::zero());
    }
    Ok(out)
}

/// Root enumeration with the default degree bound.
pub fn enumerate_roots(n: usize) -> Result<Vec<DivisorClass>, LatticeError> {
    enumerate_roots_bounded(n, 6)
}

fn search_roots(
    d: i64,
    n: usize,
    pos: usize,
    rem_sum: i64,
    rem_sq: i64,
    mults: &mut Vec<i64>,
    out: &mut Vec<DivisorClass>,
) {
    if pos == n {
        if rem_sum == 0 && rem_sq == 0 {
            out.push(DivisorClass::new(d, mults.clone()));
        }
        return;
    }
    let rem_count = (n - pos) as i64;
    // Cauchy-Schwarz prune: rem_sum^2 <= rem_count * rem_sq is necessary.
    if rem_sum * rem_sum > rem_count * rem_sq {
        return;
    }
    let bound = (rem_sq as f64).sqrt() as i64 + 1;
    for m in -bound..=bound {
        let sq = m * m;
        if sq > rem_sq {
            continue;
        }
        mults[pos] = m;
        search_roots(d, n, pos + 1, rem_sum - m, rem_sq - sq, mults, out);
    }
    mults[pos] = 0;
}

/// Exact solve of `G x = b` for symmetric invertible `G` over the rationals.
/// Used for discrepancy systems and model projections.
pub fn solve_symmetric(g: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let n = g.len();
    let mut a: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut row = g[i].clone();
            row.push(b[i].clone());
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let inv = a[col][col].clone();
        for j in col..=n {
            a[col][j] = &a[col][j] / &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in col..=n {
                    let t = &a[col][j] * &f;
                    a[r][j] = &a[r][j] - &t;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n].clone()).collect())
}

/// Negative definiteness of a symmetric rational matrix, by checking that the
/// leading principal minors alternate in sign starting negative.
pub fn is_negative_definite(g: &[Vec<Rat>]) -> bool {
    let n = g.len();
    let mut a: Vec<Vec<Rat>> = g.to_vec();
    // Fraction-free-ish Gaussian elimination tracking leading minors exactly.
    let mut det = Rat::one();
    for col in 0..n {
        let pivot = match (col..n).find(|&r| !a[r][col].is_zero()) {
            Some(p) => p,
            None => return false,
        };
        if pivot != col {
            a.swap(col, pivot);
            det = -det;
        }
        det *= a[col][col].clone();
        // Leading minor of size col+1 must have sign (-1)^(col+1).
        let want_negative = (col + 1) % 2 == 1;
        if det.is_zero() || (det.is_negative() != want_negative) {
            return false;
        }
        for r in col + 1..n {
            if !a[r][col].is_zero() {
                let f = &a[r][col] / &a[col][col];
                for j in col..n {
                    let t = &a[col][j] * &f;
                    a[r][j] = &a[r][j] - &t;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(d: i64, m: &[i64]) -> DivisorClass {
        DivisorClass::new(d, m.to_vec())
    }

    #[test]
    fn pairing_examples() {
        let h = c(1, &[0, 0, 0]);
        assert_eq!(intersect(&h, &h).unwrap(), Int::from(1));
        let e1 = c(0, &[-1, 0, 0]);
        assert_eq!(intersect(&e1, &e1).unwrap(), Int::from(-1));
        let a = c(3, &[2, 1, 1]);
        let b = c(1, &[1, 1, 0]);
        assert_eq!(intersect(&a, &b).unwrap(), Int::zero());
    }

    #[test]
    fn pairing_dimension_mismatch() {
        let a = c(1, &[0]);
        let b = c(1, &[0, 0]);
        assert!(intersect(&a, &b).is_err());
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(canonical_class(0), c(-3, &[]));
        assert_eq!(canonical_class(3), c(-3, &[-1, -1, -1]));
        let cubic = c(3, &[]);
        assert_eq!(
            intersect(&canonical_class(0), &cubic).unwrap(),
            Int::from(-9)
        );
        // K + C = 0 in class for a plane cubic.
        assert!(canonical_class(0).add(&cubic).unwrap().is_zero());
    }

    #[test]
    fn genus_examples() {
        assert_eq!(arithmetic_genus(&c(1, &[0])), Rat::zero());
        assert_eq!(arithmetic_genus(&c(3, &[2])), Rat::zero());
        assert_eq!(arithmetic_genus(&c(1, &[2])), Rat::from_integer(Int::from(-1)));
        assert_eq!(arithmetic_genus(&c(3, &[])), Rat::one());
    }

    #[test]
    fn cremona_examples() {
        let line = c(1, &[0, 0, 0]);
        assert_eq!(cremona_image(&line, 0, 1, 2).unwrap(), c(2, &[1, 1, 1]));
        let nodal = c(3, &[2, 1, 1]);
        assert_eq!(cremona_image(&nodal, 0, 1, 2).unwrap(), c(2, &[1, 0, 0]));
        let through12 = c(1, &[1, 1, 0]);
        assert_eq!(
            cremona_image(&through12, 0, 1, 2).unwrap(),
            c(0, &[0, 0, -1])
        );
    }

    #[test]
    fn cremona_bad_indices() {
        let line = c(1, &[0, 0, 0]);
        assert!(cremona_image(&line, 0, 0, 2).is_err());
        assert!(cremona_image(&line, 0, 1, 3).is_err());
    }

    #[test]
    fn root_counts_small() {
        // Frozen counts of the E_n root systems, n = 0..8.
        let expected = [0usize, 0, 2, 8, 20, 40, 72, 126, 240];
        for (n, want) in expected.iter().enumerate() {
            let roots = enumerate_roots(n).unwrap();
            assert_eq!(roots.len(), *want, "n = {}", n);
        }
        assert!(enumerate_roots(9).is_err());
    }

    #[test]
    fn roots_n2_explicit() {
        let roots = enumerate_roots(2).unwrap();
        assert!(roots.contains(&c(0, &[1, -1])));
        assert!(roots.contains(&c(0, &[-1, 1])));
    }

    #[test]
    fn roots_are_rational_curves() {
        for r in enumerate_roots(8).unwrap() {
            assert_eq!(arithmetic_genus(&r), Rat::zero());
        }
    }

    #[test]
    fn negative_definite_checks() {
        let q = |x: i64| Rat::from_integer(Int::from(x));
        let a2 = vec![vec![q(-2), q(1)], vec![q(1), q(-2)]];
        assert!(is_negative_definite(&a2));
        let cycle = vec![
            vec![q(-2), q(1), q(1)],
            vec![q(1), q(-2), q(1)],
            vec![q(1), q(1), q(-2)],
        ];
        assert!(!is_negative_definite(&cycle));
        let minus_one = vec![vec![q(-1)]];
        assert!(is_negative_definite(&minus_one));
        let plus = vec![vec![q(1)]];
        assert!(!is_negative_definite(&plus));
    }

    #[test]
    fn solve_small_system() {
        let q = |x: i64| Rat::from_integer(Int::from(x));
        let g = vec![vec![q(-2), q(1)], vec![q(1), q(-2)]];
        let b = vec![q(0), q(3)];
        let x = solve_symmetric(&g, &b).unwrap();
        assert_eq!(x[0], q(-1));
        assert_eq!(x[1], q(-2));
    }
}
