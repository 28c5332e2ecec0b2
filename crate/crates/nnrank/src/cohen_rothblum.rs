//! The field-sensitive separation: a 21x21 integer matrix whose
//! nonnegative rank over the reals is at most 19 while every nonnegative
//! factorization over the rationals needs at least 20 terms. The matrix
//! is produced by eliminating the four variables of a 5x5 parameter
//! matrix; the real upper bound is an explicit 19-term witness and the
//! rational lower bound rests on a symbolic minor certificate.

use std::collections::BTreeMap;

use num::rational::BigRational;
use num::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gadgets::{eliminate_variable, Entry, GadgetTrace, PartialMatrix};
use crate::matrix::{int_matrix, ExactMatrix, NNFactorization, RankOneTerm};
use crate::poly::{det_symbolic, MultiPoly};
use crate::scalar::{int, quad, rat, ExactScalar, ScalarDomain};
use crate::Error;

/// A point `(a, b, c, d)` for the parameter matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CPoint {
    pub a: ExactScalar,
    pub b: ExactScalar,
    pub c: ExactScalar,
    pub d: ExactScalar,
}

/// `1 + (1/2) sqrt 2`, the common value of `b, c, d` at the special point.
pub fn alpha() -> ExactScalar {
    quad(1, 1, 1, 2)
}

/// `sqrt 2`, the value of `a` at the special point.
pub fn a_star() -> ExactScalar {
    quad(0, 1, 1, 1)
}

pub fn special_point() -> CPoint {
    CPoint {
        a: a_star(),
        b: alpha(),
        c: alpha(),
        d: alpha(),
    }
}

/// The 5x5 parameter matrix at a concrete point.
pub fn build_c(pt: &CPoint) -> Result<ExactMatrix, Error> {
    let domain = if [&pt.a, &pt.b, &pt.c, &pt.d]
        .iter()
        .any(|x| x.domain() == ScalarDomain::Quad)
    {
        ScalarDomain::Quad
    } else {
        ScalarDomain::Rat
    };
    let e = |n: i64| int(n);
    let rows = vec![
        vec![pt.a.clone(), e(2), e(2), e(1), e(0)],
        vec![e(1), e(2), e(1), e(0), e(1)],
        vec![e(0), e(0), e(1), pt.b.clone(), e(0)],
        vec![e(0), e(1), e(0), e(0), pt.c.clone()],
        vec![e(0), e(1), e(1), pt.d.clone(), pt.d.clone()],
    ];
    ExactMatrix::from_rows(domain, rows)
}

/// The same matrix with `a, b, c, d` left symbolic.
pub fn c_symbolic() -> Vec<Vec<MultiPoly>> {
    let v = MultiPoly::var;
    let k = MultiPoly::from_int;
    vec![
        vec![v(0), k(2), k(2), k(1), k(0)],
        vec![k(1), k(2), k(1), k(0), k(1)],
        vec![k(0), k(0), k(1), v(1), k(0)],
        vec![k(0), k(1), k(0), k(0), v(2)],
        vec![k(0), k(1), k(1), v(3), v(3)],
    ]
}

/// All 25 order-4 minors, keyed by (deleted row, deleted col) and
/// ordered by deleted row, then deleted column.
pub fn symbolic_minors_c() -> Vec<((usize, usize), MultiPoly)> {
    let grid = c_symbolic();
    let mut out = Vec::with_capacity(25);
    for di in 0..5 {
        for dj in 0..5 {
            let sub: Vec<Vec<MultiPoly>> = (0..5)
                .filter(|&i| i != di)
                .map(|i| {
                    (0..5)
                        .filter(|&j| j != dj)
                        .map(|j| grid[i][j].clone())
                        .collect()
                })
                .collect();
            out.push(((di, dj), det_symbolic(&sub)));
        }
    }
    out
}

/// Symbolic determinant of the full 5x5 parameter matrix.
pub fn det5_symbolic() -> MultiPoly {
    det_symbolic(&c_symbolic())
}

/// A polynomial combination of order-4 minors claimed to equal `target`.
#[derive(Clone, Debug)]
pub struct MinorCombination {
    /// (deleted row, deleted col, coefficient polynomial).
    pub terms: Vec<(usize, usize, MultiPoly)>,
    pub target: MultiPoly,
}

/// Certificate that the order-4 minors have no common rational zero.
/// The last combination's target is a univariate quadratic in `d`; every
/// common zero of the minors kills every target, and the quadratic has no
/// rational root, so no rational point drops the rank of the parameter
/// matrix below 4.
#[derive(Clone, Debug)]
pub struct RationalExclusionCertificate {
    pub combinations: Vec<MinorCombination>,
    /// Rational-root candidates of the key quadratic and its (nonzero)
    /// values there.
    pub root_tests: Vec<(ExactScalar, ExactScalar)>,
}

fn poly_2dd_4d_1() -> MultiPoly {
    let d = MultiPoly::var(3);
    MultiPoly::from_int(2) * d.clone() * d - MultiPoly::from_int(4) * MultiPoly::var(3)
        + MultiPoly::from_int(1)
}

/// The frozen certificate data.
pub fn certificate() -> RationalExclusionCertificate {
    let one = MultiPoly::from_int(1);
    let v = MultiPoly::var;
    let k = MultiPoly::from_int;
    RationalExclusionCertificate {
        combinations: vec![
            MinorCombination {
                terms: vec![(0, 4, one.clone())],
                target: v(1) - v(3),
            },
            MinorCombination {
                terms: vec![(0, 3, one.clone())],
                target: v(2) - v(3),
            },
            MinorCombination {
                terms: vec![(4, 4, one)],
                target: v(0) * v(1) - k(2) * v(1) + k(1),
            },
            MinorCombination {
                terms: vec![(3, 0, k(-1)), (0, 4, k(-2) * v(3))],
                target: poly_2dd_4d_1(),
            },
        ],
        root_tests: vec![
            (int(1), int(-1)),
            (int(-1), int(7)),
            (rat(1, 2), rat(-1, 2)),
            (rat(-1, 2), rat(7, 2)),
        ],
    }
}

#[derive(Clone, Debug)]
pub struct CertificateReport {
    pub minors_computed: usize,
    pub identities_checked: usize,
    pub roots_excluded: usize,
}

/// Verifies a certificate from scratch: recomputes the symbolic minors,
/// checks every claimed identity, and reruns the rational-root exclusion
/// on the final univariate target. Tampered data fails loudly.
pub fn verify_certificate(
    cert: &RationalExclusionCertificate,
) -> Result<CertificateReport, Error> {
    let minors = symbolic_minors_c();
    let lookup = |di: usize, dj: usize| -> Result<&MultiPoly, Error> {
        minors
            .iter()
            .find(|((i, j), _)| *i == di && *j == dj)
            .map(|(_, p)| p)
            .ok_or_else(|| Error::CertificateFailure(format!("no minor ({di}, {dj})")))
    };
    if cert.combinations.is_empty() {
        return Err(Error::CertificateFailure("no combinations".into()));
    }
    for (idx, combo) in cert.combinations.iter().enumerate() {
        let mut acc = MultiPoly::zero();
        for (di, dj, coeff) in &combo.terms {
            acc = acc + coeff * lookup(*di, *dj)?;
        }
        if acc != combo.target {
            return Err(Error::CertificateFailure(format!(
                "combination {idx} does not match its target: got {acc}, claimed {}",
                combo.target
            )));
        }
    }
    // The last target must be univariate in d; collect its coefficients.
    let key = &cert.combinations.last().unwrap().target;
    let mut coeffs: BTreeMap<u32, BigRational> = BTreeMap::new();
    for (exp, c) in key.terms() {
        if exp[0] != 0 || exp[1] != 0 || exp[2] != 0 {
            return Err(Error::CertificateFailure(
                "key polynomial is not univariate in d".into(),
            ));
        }
        coeffs.insert(exp[3], c.clone());
    }
    let deg = *coeffs.keys().max().unwrap_or(&0);
    let lead = coeffs.get(&deg).cloned().unwrap_or_else(BigRational::zero);
    let constant = coeffs.get(&0).cloned().unwrap_or_else(BigRational::zero);
    if deg == 0 || lead.is_zero() || constant.is_zero() {
        return Err(Error::CertificateFailure(
            "key polynomial admits the root 0 or is constant".into(),
        ));
    }
    if !lead.is_integer() || !constant.is_integer() {
        return Err(Error::CertificateFailure(
            "key polynomial must have integer lead and constant".into(),
        ));
    }
    // Candidate roots p/q with p | constant and q | lead; the stored
    // tests must cover them all with nonzero values.
    let divisors = |n: &BigRational| -> Vec<BigInt> {
        let n = n.to_integer().abs();
        let mut out = Vec::new();
        let mut k = BigInt::from(1);
        while &k * &k <= n {
            if (&n % &k).is_zero() {
                out.push(k.clone());
                out.push(&n / &k);
            }
            k += 1;
        }
        out.sort();
        out.dedup();
        out
    };
    use num::bigint::BigInt;
    let mut candidates: Vec<ExactScalar> = Vec::new();
    for p in divisors(&constant) {
        for q in divisors(&lead) {
            for sign in [1i64, -1] {
                let cand = ExactScalar::Rat(BigRational::new(
                    &p * BigInt::from(sign),
                    q.clone(),
                ));
                if !candidates.contains(&cand) {
                    candidates.push(cand);
                }
            }
        }
    }
    let mut excluded = 0;
    for cand in &candidates {
        let stored = cert
            .root_tests
            .iter()
            .find(|(x, _)| x == cand)
            .ok_or_else(|| {
                Error::CertificateFailure(format!("candidate root {cand} untested"))
            })?;
        let value = key.eval(
            &[int(0), int(0), int(0), cand.clone()],
            ScalarDomain::Rat,
        )?;
        if value.is_zero() || value != stored.1 {
            return Err(Error::CertificateFailure(format!(
                "candidate {cand}: key polynomial evaluates to {value}, stored {}",
                stored.1
            )));
        }
        excluded += 1;
    }
    Ok(CertificateReport {
        minors_computed: minors.len(),
        identities_checked: cert.combinations.len(),
        roots_excluded: excluded,
    })
}

/// Verifies the frozen certificate.
pub fn certify_no_rational_point() -> Result<CertificateReport, Error> {
    verify_certificate(&certificate())
}

/// Three-term nonnegative factorization of the parameter matrix at the
/// special point; its existence is what the 19-term witness hinges on.
pub fn explicit_c_factorization() -> NNFactorization {
    let inv_alpha = quad(2, 1, -1, 1); // 2 - sqrt 2
    let z = || int(0);
    let terms = vec![
        RankOneTerm {
            u: vec![z(), inv_alpha.clone(), z(), int(1), int(1)],
            v: vec![z(), int(1), z(), z(), alpha()],
        },
        RankOneTerm {
            u: vec![inv_alpha, z(), int(1), z(), int(1)],
            v: vec![z(), z(), int(1), alpha(), z()],
        },
        RankOneTerm {
            u: vec![a_star(), int(1), z(), z(), z()],
            v: vec![int(1), a_star(), int(1), z(), z()],
        },
    ];
    NNFactorization::new(5, 5, ScalarDomain::Quad, terms).expect("fixed dimensions")
}

/// The parameter matrix with its entries left variable, each ranging
/// over `[1, 2]`.
pub fn partial_c() -> PartialMatrix {
    let e = |n: i64| Entry::Const(int(n));
    let v = |name: &str| Entry::Var(name.to_string());
    let entries = vec![
        v("a"), e(2), e(2), e(1), e(0),
        e(1), e(2), e(1), e(0), e(1),
        e(0), e(0), e(1), v("b"), e(0),
        e(0), e(1), e(0), e(0), v("c"),
        e(0), e(1), e(1), v("d"), v("d"),
    ];
    let vars: BTreeMap<String, ExactScalar> = ["a", "b", "c", "d"]
        .iter()
        .map(|n| (n.to_string(), int(2)))
        .collect();
    PartialMatrix::new(5, 5, ScalarDomain::Rat, entries, vars).expect("fixed shape")
}

/// The assignment realizing the special point.
pub fn special_assignment() -> BTreeMap<String, ExactScalar> {
    [
        ("a", a_star()),
        ("b", alpha()),
        ("c", alpha()),
        ("d", alpha()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

/// The 21x21 integer matrix, written out entry by entry.
pub fn build_m() -> ExactMatrix {
    int_matrix(&[
        &[2, 2, 2, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1],
        &[1, 2, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
        &[0, 0, 1, 2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0],
        &[0, 1, 0, 0, 2, 0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0],
        &[0, 1, 1, 2, 2, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
        &[0, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
        &[0, 0, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
        &[0, 0, 0, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
        &[0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
        &[0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
        &[0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0],
        &[0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0],
        &[0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0],
        &[0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 0, 0],
        &[0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 0],
        &[0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0],
        &[0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0],
        &[1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 0, 0],
        &[0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 0],
        &[0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1],
        &[0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1],
    ])
}

/// Eliminates `d, c, b, a` in that order from the partial parameter
/// matrix and checks the result equals the hard-coded 21x21 matrix.
pub fn rebuild_m_from_gadgets() -> Result<(ExactMatrix, GadgetTrace), Error> {
    let pm0 = partial_c();
    let mut pm = pm0.clone();
    let mut steps = Vec::new();
    for (var, r) in [("d", Some(3)), ("c", None), ("b", None), ("a", None)] {
        let (next, step) = eliminate_variable(&pm, var, r)?;
        steps.push(step);
        pm = next;
    }
    let m = pm.into_exact()?;
    let reference = build_m();
    for i in 0..21 {
        for j in 0..21 {
            if m.get(i, j) != reference.get(i, j) {
                return Err(Error::ReconstructionMismatch(i, j));
            }
        }
    }
    Ok((
        m,
        GadgetTrace {
            initial_rows: 5,
            initial_cols: 5,
            steps,
        },
    ))
}

/// Lifts the three-term factorization at the special point through the
/// four eliminations: a validated 19-term nonnegative factorization of
/// the 21x21 matrix over the quadratic domain.
pub fn build_m_factorization_19() -> Result<NNFactorization, Error> {
    let (_, trace) = rebuild_m_from_gadgets()?;
    crate::gadgets::lift_through_trace(
        &partial_c(),
        &trace,
        &special_assignment(),
        explicit_c_factorization(),
    )
}

#[derive(Clone, Debug)]
pub struct ProbeReport {
    pub samples: usize,
    pub rank4: usize,
    pub rank5: usize,
    pub min_rank: usize,
}

/// Samples rational points of `[1, 2]^4` and checks the parameter matrix
/// never drops below rank 4 there, consistent with the certificate. The
/// full determinant is not identically zero, so random points typically
/// give rank 5; rank 4 needs the determinant hypersurface.
pub fn probe_rational_points(samples: usize, seed: u64) -> Result<ProbeReport, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| {
        let den: i64 = rng.gen_range(1..=1000);
        let num: i64 = rng.gen_range(den..=2 * den);
        rat(num, den)
    };
    let mut rank4 = 0;
    let mut rank5 = 0;
    let mut min_rank = 5;
    for _ in 0..samples {
        let pt = CPoint {
            a: draw(&mut rng),
            b: draw(&mut rng),
            c: draw(&mut rng),
            d: draw(&mut rng),
        };
        let rank = build_c(&pt)?.rank_exact();
        min_rank = min_rank.min(rank);
        match rank {
            4 => rank4 += 1,
            5 => rank5 += 1,
            r => {
                return Err(Error::CertificateFailure(format!(
                    "rational point with rank {r} found at ({}, {}, {}, {})",
                    pt.a, pt.b, pt.c, pt.d
                )))
            }
        }
    }
    Ok(ProbeReport {
        samples,
        rank4,
        rank5,
        min_rank,
    })
}

#[derive(Clone, Debug)]
pub struct SeparationReport {
    pub rank_m: usize,
    pub real_ub_terms: usize,
    pub real_ub_valid: bool,
    pub certificate: CertificateReport,
    pub rational_lb: usize,
    pub probe: ProbeReport,
}

/// End-to-end separation summary: the conventional rank of the 21x21
/// matrix, the validated 19-term real witness, the certificate behind the
/// rational lower bound of 20, and a randomized consistency probe.
pub fn separation_report(samples: usize, seed: u64) -> Result<SeparationReport, Error> {
    let (m, _) = rebuild_m_from_gadgets()?;
    let fact = build_m_factorization_19()?;
    let m_quad = ExactMatrix::new(
        21,
        21,
        ScalarDomain::Quad,
        (0..21)
            .flat_map(|i| (0..21).map(move |j| (i, j)))
            .map(|(i, j)| m.get(i, j).clone())
            .collect(),
    )?;
    let report = m_quad.validate_factorization(&fact)?;
    let certificate = certify_no_rational_point()?;
    Ok(SeparationReport {
        rank_m: m.rank_exact(),
        real_ub_terms: fact.terms.len(),
        real_ub_valid: report.pass(),
        certificate,
        rational_lb: 20,
        probe: probe_rational_points(samples, seed)?,
    })
}
