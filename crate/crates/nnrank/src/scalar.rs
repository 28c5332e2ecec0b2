//! Exact arithmetic over the rationals and the quadratic field Q(sqrt 2).
//!
//! Every value is kept in canonical form so equality is structural. Signs
//! of `p + q*sqrt(2)` are decided by integer comparisons only; no floating
//! point enters this module.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

use crate::Error;

/// Which field a matrix or factorization lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScalarDomain {
    Rat,
    Quad,
}

impl ScalarDomain {
    pub fn token(self) -> &'static str {
        match self {
            ScalarDomain::Rat => "rat",
            ScalarDomain::Quad => "quad",
        }
    }

    pub fn parse_token(tok: &str) -> Result<Self, Error> {
        match tok {
            "rat" => Ok(ScalarDomain::Rat),
            "quad" => Ok(ScalarDomain::Quad),
            _ => Err(Error::MalformedScalar(format!("unknown domain `{tok}`"))),
        }
    }
}

impl fmt::Display for ScalarDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// `p + q*sqrt(2)` with rational `p`, `q`. The representation is unique.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadScalar {
    pub p: BigRational,
    pub q: BigRational,
}

/// An element of Q or of Q(sqrt 2).
///
/// The `Rat` variant embeds into `Quad` implicitly during mixed arithmetic;
/// the reverse direction is only possible when the sqrt(2) part vanishes.
#[derive(Clone, Debug)]
pub enum ExactScalar {
    Rat(BigRational),
    Quad(QuadScalar),
}

fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn rat(n: i64, d: i64) -> ExactScalar {
    ExactScalar::Rat(BigRational::new(big(n), big(d)))
}

pub fn int(n: i64) -> ExactScalar {
    ExactScalar::Rat(BigRational::from_integer(big(n)))
}

/// `p + q*sqrt(2)` from four integers: `pn/pd + (qn/qd)*sqrt(2)`.
pub fn quad(pn: i64, pd: i64, qn: i64, qd: i64) -> ExactScalar {
    ExactScalar::Quad(QuadScalar {
        p: BigRational::new(big(pn), big(pd)),
        q: BigRational::new(big(qn), big(qd)),
    })
}

impl ExactScalar {
    pub fn zero(domain: ScalarDomain) -> Self {
        match domain {
            ScalarDomain::Rat => int(0),
            ScalarDomain::Quad => ExactScalar::Quad(QuadScalar {
                p: BigRational::zero(),
                q: BigRational::zero(),
            }),
        }
    }

    pub fn one(domain: ScalarDomain) -> Self {
        match domain {
            ScalarDomain::Rat => int(1),
            ScalarDomain::Quad => ExactScalar::Quad(QuadScalar {
                p: BigRational::one(),
                q: BigRational::zero(),
            }),
        }
    }

    pub fn domain(&self) -> ScalarDomain {
        match self {
            ExactScalar::Rat(_) => ScalarDomain::Rat,
            ExactScalar::Quad(_) => ScalarDomain::Quad,
        }
    }

    /// Coefficients `(p, q)` of `p + q*sqrt(2)`.
    pub fn parts(&self) -> (BigRational, BigRational) {
        match self {
            ExactScalar::Rat(r) => (r.clone(), BigRational::zero()),
            ExactScalar::Quad(s) => (s.p.clone(), s.q.clone()),
        }
    }

    /// Re-tag the value into `domain`. Widening Rat -> Quad always works;
    /// narrowing requires the sqrt(2) part to be zero.
    pub fn into_domain(self, domain: ScalarDomain) -> Result<Self, Error> {
        match (self, domain) {
            (ExactScalar::Rat(r), ScalarDomain::Rat) => Ok(ExactScalar::Rat(r)),
            (ExactScalar::Rat(r), ScalarDomain::Quad) => Ok(ExactScalar::Quad(QuadScalar {
                p: r,
                q: BigRational::zero(),
            })),
            (ExactScalar::Quad(s), ScalarDomain::Quad) => Ok(ExactScalar::Quad(s)),
            (ExactScalar::Quad(s), ScalarDomain::Rat) => {
                if s.q.is_zero() {
                    Ok(ExactScalar::Rat(s.p))
                } else {
                    Err(Error::WrongDomain(
                        "value has a sqrt(2) component, cannot narrow to Q".into(),
                    ))
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ExactScalar::Rat(r) => r.is_zero(),
            ExactScalar::Quad(s) => s.p.is_zero() && s.q.is_zero(),
        }
    }

    /// Exact sign: -1, 0 or +1.
    pub fn sign(&self) -> i32 {
        match self {
            ExactScalar::Rat(r) => rational_sign(r),
            ExactScalar::Quad(s) => quad_sign(s),
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.sign() >= 0
    }

    pub fn inv(&self) -> Result<Self, Error> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match self {
            ExactScalar::Rat(r) => Ok(ExactScalar::Rat(r.recip())),
            ExactScalar::Quad(s) => {
                // 1/(p+q*r2) = (p - q*r2) / (p^2 - 2 q^2); the norm is
                // nonzero because sqrt(2) is irrational.
                let norm = &s.p * &s.p - BigRational::from_integer(big(2)) * &s.q * &s.q;
                Ok(ExactScalar::Quad(QuadScalar {
                    p: &s.p / &norm,
                    q: -&s.q / &norm,
                }))
            }
        }
    }

    /// Exact comparison as real numbers.
    pub fn cmp_exact(&self, other: &Self) -> Ordering {
        let diff = self.clone() - other.clone();
        match diff.sign() {
            s if s < 0 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }

    /// Nearest-double conversion; `sqrt(2)` is taken at the nearest double.
    pub fn to_f64(&self) -> f64 {
        use num::ToPrimitive;
        match self {
            ExactScalar::Rat(r) => r.to_f64().unwrap_or(f64::NAN),
            ExactScalar::Quad(s) => {
                let p = s.p.to_f64().unwrap_or(f64::NAN);
                let q = s.q.to_f64().unwrap_or(f64::NAN);
                p + q * std::f64::consts::SQRT_2
            }
        }
    }
}

fn rational_sign(r: &BigRational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

/// Exact sign of `p + q*sqrt(2)` by comparing `p^2` against `2 q^2`.
pub fn quad_sign(s: &QuadScalar) -> i32 {
    let sp = rational_sign(&s.p);
    let sq = rational_sign(&s.q);
    if sq == 0 {
        return sp;
    }
    if sp == 0 {
        return sq;
    }
    if sp == sq {
        return sp;
    }
    // Opposite signs: the larger of p^2 and 2 q^2 decides.
    let p2 = &s.p * &s.p;
    let q2x2 = BigRational::from_integer(big(2)) * &s.q * &s.q;
    match p2.cmp(&q2x2) {
        Ordering::Greater => sp,
        Ordering::Less => sq,
        // p^2 = 2 q^2 with p, q nonzero would make sqrt(2) rational.
        Ordering::Equal => unreachable!("sqrt(2) is irrational"),
    }
}

impl PartialEq for ExactScalar {
    fn eq(&self, other: &Self) -> bool {
        self.parts() == other.parts()
    }
}

impl Eq for ExactScalar {}

impl std::hash::Hash for ExactScalar {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.parts().hash(state);
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: ExactScalar) -> ExactScalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&ExactScalar> for &ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: &ExactScalar) -> ExactScalar {
                match (self, rhs) {
                    (ExactScalar::Rat(a), ExactScalar::Rat(b)) => ExactScalar::Rat(a.$method(b)),
                    _ => {
                        let (ap, aq) = self.parts();
                        let (bp, bq) = rhs.parts();
                        quad_op_parts(ap, aq, bp, bq, stringify!($method))
                    }
                }
            }
        }
    };
}

fn quad_op_parts(
    ap: BigRational,
    aq: BigRational,
    bp: BigRational,
    bq: BigRational,
    op: &str,
) -> ExactScalar {
    let (p, q) = match op {
        "add" => (ap + bp, aq + bq),
        "sub" => (ap - bp, aq - bq),
        "mul" => (
            &ap * &bp + BigRational::from_integer(big(2)) * &aq * &bq,
            ap * bq + aq * bp,
        ),
        _ => unreachable!(),
    };
    ExactScalar::Quad(QuadScalar { p, q })
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        match self {
            ExactScalar::Rat(r) => ExactScalar::Rat(-r),
            ExactScalar::Quad(s) => ExactScalar::Quad(QuadScalar { p: -s.p, q: -s.q }),
        }
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        -self.clone()
    }
}

/// Exact division (fields, so always possible for nonzero divisor).
pub fn div(a: &ExactScalar, b: &ExactScalar) -> Result<ExactScalar, Error> {
    Ok(a * &b.inv()?)
}

fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Canonical text form. `parse(format(x), x.domain())` is the identity.
pub fn scalar_format(x: &ExactScalar) -> String {
    match x {
        ExactScalar::Rat(r) => format_rational(r),
        ExactScalar::Quad(s) => {
            if s.q.is_zero() {
                format_rational(&s.p)
            } else {
                let sign = if s.q.is_negative() { "-" } else { "+" };
                format!(
                    "{}{}{}r2",
                    format_rational(&s.p),
                    sign,
                    format_rational(&s.q.abs())
                )
            }
        }
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&scalar_format(self))
    }
}

fn parse_ratpart(text: &str) -> Result<BigRational, Error> {
    let bad = || Error::MalformedScalar(format!("bad rational `{text}`"));
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        if d <= BigInt::zero() {
            return Err(Error::MalformedScalar(format!(
                "denominator must be positive in `{text}`"
            )));
        }
        Ok(BigRational::new(n, d))
    } else {
        let n: BigInt = text.parse().map_err(|_| bad())?;
        Ok(BigRational::from_integer(n))
    }
}

/// Parse a scalar token. Grammar:
/// `INT | INT "/" POSINT | RATPART ("+"|"-") RATPART "r2"`.
pub fn scalar_parse(text: &str, domain: ScalarDomain) -> Result<ExactScalar, Error> {
    if text.is_empty() || text.chars().any(|c| c.is_whitespace()) {
        return Err(Error::MalformedScalar(format!("bad scalar `{text}`")));
    }
    if let Some(stripped) = text.strip_suffix("r2") {
        // Find the sign that separates the two rational parts; the leading
        // character may itself be a sign of the first part.
        let sep = stripped
            .char_indices()
            .skip(1)
            .find(|&(i, c)| (c == '+' || c == '-') && !stripped[..i].ends_with('/'))
            .map(|(i, c)| (i, c));
        let (i, sign) = sep.ok_or_else(|| {
            Error::MalformedScalar(format!("missing sign before sqrt part in `{text}`"))
        })?;
        let p = parse_ratpart(&stripped[..i])?;
        let q_mag = parse_ratpart(&stripped[i + 1..])?;
        if q_mag.is_negative() {
            return Err(Error::MalformedScalar(format!(
                "sqrt coefficient must carry its sign on the separator in `{text}`"
            )));
        }
        let q = if sign == '-' { -q_mag } else { q_mag };
        match domain {
            ScalarDomain::Rat => Err(Error::WrongDomain(format!(
                "sqrt(2) component in `{text}` not allowed in the rational domain"
            ))),
            ScalarDomain::Quad => Ok(ExactScalar::Quad(QuadScalar { p, q })),
        }
    } else {
        let r = parse_ratpart(text)?;
        ExactScalar::Rat(r).into_domain(domain)
    }
}
