//! Sparse multivariate polynomials over Q in the fixed variables
//! `a, b, c, d`, enough for symbolic minors of a 5x5 parameter matrix.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::rational::BigRational;
use num::{One, Zero};

use crate::scalar::{ExactScalar, ScalarDomain};
use crate::Error;

pub const VAR_NAMES: [&str; 4] = ["a", "b", "c", "d"];

/// Exponent vector `(deg_a, deg_b, deg_c, deg_d)` -> nonzero coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MultiPoly {
    terms: BTreeMap<[u32; 4], BigRational>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly::default()
    }

    pub fn constant(c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert([0; 4], c);
        }
        MultiPoly { terms }
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(BigRational::from_integer(n.into()))
    }

    /// The variable with index 0..=3 (a, b, c, d).
    pub fn var(idx: usize) -> Self {
        assert!(idx < 4, "variable index out of range");
        let mut exp = [0u32; 4];
        exp[idx] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(exp, BigRational::one());
        MultiPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32; 4], &BigRational)> {
        self.terms.iter()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum())
            .max()
            .unwrap_or(0)
    }

    fn insert(&mut self, exp: [u32; 4], coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + coeff;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    /// Exact evaluation at a point `(a, b, c, d)`.
    pub fn eval(&self, point: &[ExactScalar; 4], domain: ScalarDomain) -> Result<ExactScalar, Error> {
        for p in point {
            if p.domain() == ScalarDomain::Quad && domain == ScalarDomain::Rat {
                return Err(Error::WrongDomain(
                    "quadratic point under rational domain".into(),
                ));
            }
        }
        let mut acc = ExactScalar::zero(domain);
        for (exp, coeff) in &self.terms {
            let mut term = ExactScalar::Rat(coeff.clone()).into_domain(domain)?;
            for (idx, &e) in exp.iter().enumerate() {
                for _ in 0..e {
                    term = &term * &point[idx];
                }
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (exp, coeff) in &rhs.terms {
            out.insert(*exp, coeff.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (exp, coeff) in &rhs.terms {
            out.insert(*exp, -coeff.clone());
        }
        out
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let exp = [e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2], e1[3] + e2[3]];
                out.insert(exp, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }
}

macro_rules! owned_ops {
    ($($trait:ident :: $method:ident),*) => {$(
        impl $trait for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$method(&rhs)
            }
        }
    )*};
}
owned_ops!(Add::add, Sub::sub, Mul::mul);

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (exp, coeff) in self.terms.iter().rev() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "{coeff}")?;
            for (idx, &e) in exp.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*{}", VAR_NAMES[idx])?,
                    _ => write!(f, "*{}^{}", VAR_NAMES[idx], e)?,
                }
            }
        }
        Ok(())
    }
}

/// Determinant of a small square grid of polynomials, by cofactor
/// expansion along the first row.
pub fn det_symbolic(grid: &[Vec<MultiPoly>]) -> MultiPoly {
    let n = grid.len();
    assert!(grid.iter().all(|row| row.len() == n), "grid must be square");
    assert!(n <= 5, "cofactor expansion limited to size 5");
    match n {
        0 => MultiPoly::from_int(1),
        1 => grid[0][0].clone(),
        _ => {
            let mut acc = MultiPoly::zero();
            for j in 0..n {
                if grid[0][j].is_zero() {
                    continue;
                }
                let sub: Vec<Vec<MultiPoly>> = (1..n)
                    .map(|i| {
                        (0..n)
                            .filter(|&c| c != j)
                            .map(|c| grid[i][c].clone())
                            .collect()
                    })
                    .collect();
                let term = &grid[0][j] * &det_symbolic(&sub);
                acc = if j % 2 == 0 { acc + term } else { acc - term };
            }
            acc
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, quad, rat};

    fn a() -> MultiPoly {
        MultiPoly::var(0)
    }
    fn b() -> MultiPoly {
        MultiPoly::var(1)
    }
    fn d() -> MultiPoly {
        MultiPoly::var(3)
    }

    /// 2d^2 - 4d + 1, the polynomial whose roots are 1 +- sqrt(0.5).
    fn key_quadratic() -> MultiPoly {
        MultiPoly::from_int(2) * d() * d() - MultiPoly::from_int(4) * d() + MultiPoly::from_int(1)
    }

    #[test]
    fn add_and_cancel() {
        let sum = (a() + b()) + (a() - b());
        assert_eq!(sum, MultiPoly::from_int(2) * a());
    }

    #[test]
    fn square_of_binomial() {
        let p = d() - MultiPoly::from_int(1);
        let sq = &p * &p;
        let expected = d() * d() - MultiPoly::from_int(2) * d() + MultiPoly::from_int(1);
        assert_eq!(sq, expected);
    }

    #[test]
    fn eval_key_quadratic() {
        let q = key_quadratic();
        let alpha = quad(1, 1, 1, 2);
        let at = |x: crate::scalar::ExactScalar, dom| {
            q.eval(&[int(0), int(0), int(0), x], dom).unwrap()
        };
        assert!(at(alpha, ScalarDomain::Quad).is_zero());
        assert_eq!(at(int(1), ScalarDomain::Rat), int(-1));
        assert_eq!(at(rat(1, 2), ScalarDomain::Rat), rat(-1, 2));
        assert_eq!(at(rat(-1, 2), ScalarDomain::Rat), rat(7, 2));
    }

    #[test]
    fn eval_rejects_quad_point_in_rat_domain() {
        let q = key_quadratic();
        assert!(q
            .eval(&[int(0), int(0), int(0), quad(1, 1, 1, 2)], ScalarDomain::Rat)
            .is_err());
    }

    #[test]
    fn det_identity_and_duplicate_row() {
        let id: Vec<Vec<MultiPoly>> = (0..4)
            .map(|i| {
                (0..4)
                    .map(|j| MultiPoly::from_int(if i == j { 1 } else { 0 }))
                    .collect()
            })
            .collect();
        assert_eq!(det_symbolic(&id), MultiPoly::from_int(1));

        let dup = vec![
            vec![a(), b()],
            vec![a(), b()],
        ];
        assert!(det_symbolic(&dup).is_zero());
    }

    #[test]
    fn eval_is_ring_homomorphism() {
        let p = a() * b() - MultiPoly::from_int(3) * d();
        let q = key_quadratic();
        let pt = [rat(2, 3), rat(-1, 2), int(4), rat(5, 7)];
        let lhs = (&p * &q).eval(&pt, ScalarDomain::Rat).unwrap();
        let rhs = &p.eval(&pt, ScalarDomain::Rat).unwrap() * &q.eval(&pt, ScalarDomain::Rat).unwrap();
        assert_eq!(lhs, rhs);
        let lhs = (&p + &q).eval(&pt, ScalarDomain::Rat).unwrap();
        let rhs = &p.eval(&pt, ScalarDomain::Rat).unwrap() + &q.eval(&pt, ScalarDomain::Rat).unwrap();
        assert_eq!(lhs, rhs);
    }
}
