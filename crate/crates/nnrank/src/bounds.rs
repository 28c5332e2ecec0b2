//! Nonnegative-rank bounding: the exact conventional-rank lower bound,
//! the exact rectangle-covering lower bound on the support, and a
//! floating-point multistart heuristic for upper bounds. The heuristic is
//! a semi-decision: failure at a rank is evidence, never a certificate.

use std::collections::BTreeSet;

use num::bigint::BigInt;
use num::rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::{ExactMatrix, NNFactorization, RankOneTerm};
use crate::scalar::ExactScalar;
use crate::Error;

/// Cell-count cap for the exact rectangle-cover search.
pub const DEFAULT_CELL_LIMIT: usize = 600;

/// Zero/nonzero pattern of a matrix, derived by exact sign tests.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportPattern {
    rows: usize,
    cols: usize,
    bits: Vec<bool>,
}

impl SupportPattern {
    pub fn from_matrix(m: &ExactMatrix) -> Self {
        let bits = (0..m.rows())
            .flat_map(|i| (0..m.cols()).map(move |j| !m.get(i, j).is_zero()))
            .collect();
        SupportPattern {
            rows: m.rows(),
            cols: m.cols(),
            bits,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.cols + j]
    }

    pub fn transpose(&self) -> Self {
        let bits = (0..self.cols)
            .flat_map(|j| (0..self.rows).map(move |i| self.at(i, j)))
            .collect();
        SupportPattern {
            rows: self.cols,
            cols: self.rows,
            bits,
        }
    }
}

/// Exact minimum number of all-ones combinatorial rectangles covering the
/// support; a lower bound on the nonnegative rank.
pub fn rectangle_cover_lb(p: &SupportPattern) -> Result<usize, Error> {
    rectangle_cover_lb_with_limit(p, DEFAULT_CELL_LIMIT)
}

pub fn rectangle_cover_lb_with_limit(p: &SupportPattern, limit: usize) -> Result<usize, Error> {
    if p.rows * p.cols > limit {
        return Err(Error::TooLarge(format!(
            "{}x{} exceeds the {limit}-cell limit",
            p.rows, p.cols
        )));
    }
    let cells: Vec<(usize, usize)> = (0..p.rows)
        .flat_map(|i| (0..p.cols).map(move |j| (i, j)))
        .filter(|&(i, j)| p.at(i, j))
        .collect();
    if cells.is_empty() {
        return Ok(0);
    }
    let rects = maximal_rectangles(p);
    // Per-cell membership bitmask over the rectangle list.
    let cell_index = |i: usize, j: usize| cells.binary_search(&(i, j)).unwrap();
    let words = cells.len().div_ceil(64);
    let rect_masks: Vec<Vec<u64>> = rects
        .iter()
        .map(|(rows, cols)| {
            let mut mask = vec![0u64; words];
            for &i in rows {
                for &j in cols {
                    let c = cell_index(i, j);
                    mask[c / 64] |= 1 << (c % 64);
                }
            }
            mask
        })
        .collect();
    let rects_of_cell: Vec<Vec<usize>> = (0..cells.len())
        .map(|c| {
            (0..rects.len())
                .filter(|&r| rect_masks[r][c / 64] & (1 << (c % 64)) != 0)
                .collect()
        })
        .collect();

    // Two cells fit in one rectangle exactly when their 2x2 closure lies
    // in the support; a pairwise-incompatible set of cells (fooling set)
    // lower-bounds the cover size.
    let compatible = |a: (usize, usize), b: (usize, usize)| -> bool {
        p.at(a.0, b.1) && p.at(b.0, a.1)
    };
    let fooling_lb = |uncovered: &[u64]| -> usize {
        let mut chosen: Vec<(usize, usize)> = Vec::new();
        for (c, &cell) in cells.iter().enumerate() {
            if uncovered[c / 64] & (1 << (c % 64)) == 0 {
                continue;
            }
            if chosen.iter().all(|&other| !compatible(cell, other)) {
                chosen.push(cell);
            }
        }
        chosen.len()
    };

    // Greedy cover for the initial upper bound.
    let mut best = {
        let mut uncovered: Vec<u64> = vec![!0u64; words];
        trim_mask(&mut uncovered, cells.len());
        let mut count = 0;
        while uncovered.iter().any(|&w| w != 0) {
            let r = (0..rects.len())
                .max_by_key(|&r| {
                    (
                        covered_count(&rect_masks[r], &uncovered),
                        usize::MAX - r, // lexicographic tie-break
                    )
                })
                .unwrap();
            for w in 0..words {
                uncovered[w] &= !rect_masks[r][w];
            }
            count += 1;
        }
        count
    };

    let mut uncovered: Vec<u64> = vec![!0u64; words];
    trim_mask(&mut uncovered, cells.len());
    branch_cover(
        &uncovered,
        0,
        &rect_masks,
        &rects_of_cell,
        &fooling_lb,
        &mut best,
        words,
    );
    Ok(best)
}

fn trim_mask(mask: &mut [u64], n: usize) {
    let words = mask.len();
    if n % 64 != 0 {
        mask[words - 1] &= (1u64 << (n % 64)) - 1;
    }
}

fn covered_count(rect: &[u64], uncovered: &[u64]) -> usize {
    rect.iter()
        .zip(uncovered)
        .map(|(r, u)| (r & u).count_ones() as usize)
        .sum()
}

#[allow(clippy::too_many_arguments)]
fn branch_cover(
    uncovered: &[u64],
    chosen: usize,
    rect_masks: &[Vec<u64>],
    rects_of_cell: &[Vec<usize>],
    fooling_lb: &dyn Fn(&[u64]) -> usize,
    best: &mut usize,
    words: usize,
) {
    let first = (0..rects_of_cell.len())
        .find(|&c| uncovered[c / 64] & (1 << (c % 64)) != 0);
    let first = match first {
        Some(c) => c,
        None => {
            *best = (*best).min(chosen);
            return;
        }
    };
    if chosen + fooling_lb(uncovered).max(1) >= *best {
        return;
    }
    for &r in &rects_of_cell[first] {
        let mut next = uncovered.to_vec();
        for w in 0..words {
            next[w] &= !rect_masks[r][w];
        }
        branch_cover(
            &next,
            chosen + 1,
            rect_masks,
            rects_of_cell,
            fooling_lb,
            best,
            words,
        );
    }
}

/// All maximal all-ones rectangles, as (row set, column set) pairs. The
/// column sets of maximal rectangles are exactly the nonempty
/// intersections of row supports, so we close the row supports under
/// pairwise intersection.
fn maximal_rectangles(p: &SupportPattern) -> Vec<(Vec<usize>, Vec<usize>)> {
    let supports: Vec<BTreeSet<usize>> = (0..p.rows)
        .map(|i| (0..p.cols).filter(|&j| p.at(i, j)).collect())
        .collect();
    let mut closed: BTreeSet<BTreeSet<usize>> = supports
        .iter()
        .filter(|s| !s.is_empty())
        .cloned()
        .collect();
    loop {
        let snapshot: Vec<BTreeSet<usize>> = closed.iter().cloned().collect();
        let mut grew = false;
        for a in &snapshot {
            for b in &snapshot {
                let inter: BTreeSet<usize> = a.intersection(b).copied().collect();
                if !inter.is_empty() && closed.insert(inter) {
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    closed
        .into_iter()
        .map(|cols| {
            let rows: Vec<usize> = (0..p.rows)
                .filter(|&i| cols.iter().all(|&j| p.at(i, j)))
                .collect();
            (rows, cols.into_iter().collect())
        })
        .collect()
}

/// A floating-point rank-`r` candidate factorization `w * h`.
#[derive(Clone, Debug)]
pub struct FloatFactorization {
    pub w: Vec<Vec<f64>>,
    pub h: Vec<Vec<f64>>,
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct HeuristicOptions {
    pub restarts: usize,
    pub iters: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for HeuristicOptions {
    fn default() -> Self {
        HeuristicOptions {
            restarts: 64,
            iters: 2000,
            tol: 1e-9,
            seed: 0,
        }
    }
}

fn frobenius(m: &[Vec<f64>]) -> f64 {
    m.iter()
        .flat_map(|r| r.iter())
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
}

fn residual_norm(m: &[Vec<f64>], w: &[Vec<f64>], h: &[Vec<f64>]) -> f64 {
    let r = w.first().map_or(0, |row| row.len());
    let mut acc = 0.0;
    for (i, mrow) in m.iter().enumerate() {
        for (j, &mij) in mrow.iter().enumerate() {
            let mut wh = 0.0;
            for k in 0..r {
                wh += w[i][k] * h[k][j];
            }
            let d = mij - wh;
            acc += d * d;
        }
    }
    acc.sqrt()
}

/// One HALS (hierarchical alternating least squares) sweep updating every
/// component of `h` and then of `w`.
fn hals_sweep(m: &[Vec<f64>], w: &mut [Vec<f64>], h: &mut [Vec<f64>]) {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let rank = h.len();
    for k in 0..rank {
        // h_k <- max(0, h_k + w_k^T (M - WH) / ||w_k||^2)
        let wk_norm: f64 = (0..rows).map(|i| w[i][k] * w[i][k]).sum();
        if wk_norm > 1e-14 {
            for j in 0..cols {
                let mut g = 0.0;
                for i in 0..rows {
                    let mut wh = 0.0;
                    for l in 0..rank {
                        wh += w[i][l] * h[l][j];
                    }
                    g += w[i][k] * (m[i][j] - wh);
                }
                h[k][j] = (h[k][j] + g / wk_norm).max(0.0);
            }
        }
        let hk_norm: f64 = (0..cols).map(|j| h[k][j] * h[k][j]).sum();
        if hk_norm > 1e-14 {
            for i in 0..rows {
                let mut g = 0.0;
                for j in 0..cols {
                    let mut wh = 0.0;
                    for l in 0..rank {
                        wh += w[i][l] * h[l][j];
                    }
                    g += h[k][j] * (m[i][j] - wh);
                }
                w[i][k] = (w[i][k] + g / hk_norm).max(0.0);
            }
        }
    }
}

/// Multistart heuristic search for a rank-`r` nonnegative factorization
/// with relative Frobenius residual at most `tol`. Deterministic given the
/// seed; restart 0 (and 1) are canonical identity-style starts whenever
/// `r` reaches the row (column) count, so those cases always succeed.
pub fn heuristic_nnr_ub(
    m: &[Vec<f64>],
    r: usize,
    opts: &HeuristicOptions,
) -> Option<FloatFactorization> {
    let rows = m.len();
    let cols = m.first().map_or(0, |row| row.len());
    if r == 0 {
        return None;
    }
    let norm = frobenius(m);
    if norm == 0.0 {
        return Some(FloatFactorization {
            w: vec![vec![0.0; r]; rows],
            h: vec![vec![0.0; cols]; r],
            residual: 0.0,
        });
    }
    let target = opts.tol * norm;
    let mut canonical: Vec<(Vec<Vec<f64>>, Vec<Vec<f64>>)> = Vec::new();
    if r >= rows {
        let mut w = vec![vec![0.0; r]; rows];
        let mut h = vec![vec![0.0; cols]; r];
        for (i, row) in m.iter().enumerate() {
            w[i][i] = 1.0;
            h[i] = row.clone();
        }
        canonical.push((w, h));
    }
    if r >= cols {
        let mut w = vec![vec![0.0; r]; rows];
        let mut h = vec![vec![0.0; cols]; r];
        for j in 0..cols {
            h[j][j] = 1.0;
            for i in 0..rows {
                w[i][j] = m[i][j];
            }
        }
        canonical.push((w, h));
    }
    let mut best: Option<FloatFactorization> = None;
    for restart in 0..opts.restarts.max(canonical.len()) {
        let (mut w, mut h) = if restart < canonical.len() {
            canonical[restart].clone()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(restart as u64));
            let scale = (norm / ((rows * cols) as f64).sqrt() / r as f64).sqrt().max(1e-3);
            let w: Vec<Vec<f64>> = (0..rows)
                .map(|_| (0..r).map(|_| rng.gen::<f64>() * scale).collect())
                .collect();
            let h: Vec<Vec<f64>> = (0..r)
                .map(|_| (0..cols).map(|_| rng.gen::<f64>() * scale).collect())
                .collect();
            (w, h)
        };
        let mut res = residual_norm(m, &w, &h);
        for _ in 0..opts.iters {
            if res <= target {
                break;
            }
            hals_sweep(m, &mut w, &mut h);
            res = residual_norm(m, &w, &h);
        }
        if best.as_ref().is_none_or(|b| res < b.residual) {
            best = Some(FloatFactorization { w, h, residual: res });
        }
        if best.as_ref().is_some_and(|b| b.residual <= target) {
            break;
        }
    }
    best.filter(|b| b.residual <= target)
}

/// Combined lower/upper bound report; `pinned` is set when the best lower
/// bound meets the heuristic upper bound.
#[derive(Clone, Debug)]
pub struct BoundsReport {
    pub rank_lb: usize,
    pub rect_lb: usize,
    pub heur_ub: Option<usize>,
    pub heur_residual: Option<f64>,
    pub pinned: Option<usize>,
}

#[derive(Clone, Debug, Default)]
pub struct BoundsOptions {
    pub heuristic: HeuristicOptions,
    pub max_rank: Option<usize>,
    pub cell_limit: Option<usize>,
}

/// Nearest-double image of an exact matrix.
pub fn matrix_to_floats(m: &ExactMatrix) -> Vec<Vec<f64>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j).to_f64()).collect())
        .collect()
}

pub fn bounds_report(m: &ExactMatrix, opts: &BoundsOptions) -> Result<BoundsReport, Error> {
    let rank_lb = m.rank_exact();
    let support = SupportPattern::from_matrix(m);
    let rect_lb =
        rectangle_cover_lb_with_limit(&support, opts.cell_limit.unwrap_or(DEFAULT_CELL_LIMIT))?;
    let lb = rank_lb.max(rect_lb);
    let floats = matrix_to_floats(m);
    let cap = opts
        .max_rank
        .unwrap_or_else(|| m.rows().min(m.cols()))
        .min(m.rows().min(m.cols()));
    let mut heur_ub = None;
    let mut heur_residual = None;
    if support.bits.iter().all(|&b| !b) {
        heur_ub = Some(0);
        heur_residual = Some(0.0);
    } else {
        for r in lb.max(1)..=cap {
            if let Some(f) = heuristic_nnr_ub(&floats, r, &opts.heuristic) {
                heur_ub = Some(r);
                heur_residual = Some(f.residual);
                break;
            }
        }
    }
    let pinned = match heur_ub {
        Some(ub) if ub == lb => Some(ub),
        _ => None,
    };
    Ok(BoundsReport {
        rank_lb,
        rect_lb,
        heur_ub,
        heur_residual,
        pinned,
    })
}

/// Rounds a float factorization to rationals with denominators at most
/// `denom_bound` and validates exactly; the exact witness or nothing.
pub fn exactify_factorization(
    f: &FloatFactorization,
    m: &ExactMatrix,
    denom_bound: u64,
) -> Option<NNFactorization> {
    let rank = f.h.len();
    let terms: Vec<RankOneTerm> = (0..rank)
        .map(|k| RankOneTerm {
            u: f.w.iter().map(|row| best_rational(row[k], denom_bound)).collect(),
            v: f.h[k].iter().map(|&x| best_rational(x, denom_bound)).collect(),
        })
        .collect();
    let fact = NNFactorization::new(m.rows(), m.cols(), m.domain(), terms).ok()?;
    match m.validate_factorization(&fact) {
        Ok(report) if report.pass() => Some(fact),
        _ => None,
    }
}

/// Best rational approximation with bounded denominator, by scanning all
/// denominators (the bound is small in practice). Negative inputs clamp
/// to zero.
fn best_rational(x: f64, denom_bound: u64) -> ExactScalar {
    let x = x.max(0.0);
    let mut best_num = 0i64;
    let mut best_den = 1i64;
    let mut best_err = f64::INFINITY;
    for d in 1..=denom_bound.max(1) {
        let n = (x * d as f64).round();
        let err = (x - n / d as f64).abs();
        if err < best_err {
            best_err = err;
            best_num = n as i64;
            best_den = d as i64;
        }
    }
    ExactScalar::Rat(BigRational::new(BigInt::from(best_num), BigInt::from(best_den)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::{build_b, build_b0, factor_b_equal};
    use crate::matrix::int_matrix;
    use crate::scalar::rat;

    fn support(m: &ExactMatrix) -> SupportPattern {
        SupportPattern::from_matrix(m)
    }

    #[test]
    fn rectangle_bound_examples() {
        assert_eq!(rectangle_cover_lb(&support(&build_b0())).unwrap(), 4);
        let ones = int_matrix(&[&[1, 1, 1], &[1, 1, 1], &[1, 1, 1]]);
        assert_eq!(rectangle_cover_lb(&support(&ones)).unwrap(), 1);
        let id = int_matrix(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(rectangle_cover_lb(&support(&id)).unwrap(), 3);
        let zero = ExactMatrix::zero(3, 3, crate::scalar::ScalarDomain::Rat);
        assert_eq!(rectangle_cover_lb(&support(&zero)).unwrap(), 0);
    }

    #[test]
    fn rectangle_bound_invariance() {
        let b = build_b(&[rat(1, 2), rat(1, 2)]).unwrap();
        let p = support(&b);
        let lb = rectangle_cover_lb(&p).unwrap();
        assert_eq!(rectangle_cover_lb(&p.transpose()).unwrap(), lb);
    }

    #[test]
    fn rectangle_bound_respects_limit() {
        let ones = int_matrix(&[&[1, 1, 1], &[1, 1, 1], &[1, 1, 1]]);
        assert!(matches!(
            rectangle_cover_lb_with_limit(&support(&ones), 8),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn heuristic_b0_rank4_succeeds_rank3_fails() {
        let floats = matrix_to_floats(&build_b0());
        let opts = HeuristicOptions::default();
        let found = heuristic_nnr_ub(&floats, 4, &opts).unwrap();
        assert!(found.residual <= 1e-9 * frobenius(&floats));
        assert!(heuristic_nnr_ub(&floats, 3, &opts).is_none());
    }

    #[test]
    fn heuristic_is_deterministic() {
        let floats = matrix_to_floats(&build_b(&[rat(1, 2)]).unwrap());
        let opts = HeuristicOptions {
            restarts: 8,
            ..Default::default()
        };
        let a = heuristic_nnr_ub(&floats, 4, &opts).unwrap();
        let b = heuristic_nnr_ub(&floats, 4, &opts).unwrap();
        assert_eq!(a.w, b.w);
        assert_eq!(a.h, b.h);
        assert_eq!(a.residual, b.residual);
    }

    #[test]
    fn bounds_report_pins_b0() {
        let report = bounds_report(&build_b0(), &BoundsOptions::default()).unwrap();
        assert_eq!(report.rank_lb, 3);
        assert_eq!(report.rect_lb, 4);
        assert_eq!(report.heur_ub, Some(4));
        assert_eq!(report.pinned, Some(4));
    }

    #[test]
    fn bounds_report_identity_five() {
        let id = int_matrix(&[
            &[1, 0, 0, 0, 0],
            &[0, 1, 0, 0, 0],
            &[0, 0, 1, 0, 0],
            &[0, 0, 0, 1, 0],
            &[0, 0, 0, 0, 1],
        ]);
        let report = bounds_report(&id, &BoundsOptions::default()).unwrap();
        assert_eq!(report.pinned, Some(5));
    }

    #[test]
    fn bounds_report_honest_on_out_of_range_alpha() {
        // B(3/2, 3/2) has nonnegative rank 5 but both lower bounds stop
        // at 4: the report must stay unpinned.
        let b = build_b(&[rat(3, 2), rat(3, 2)]).unwrap();
        let report = bounds_report(&b, &BoundsOptions::default()).unwrap();
        assert_eq!(report.rank_lb, 4);
        assert!(report.rect_lb <= 4);
        assert_eq!(report.heur_ub, Some(5));
        assert_eq!(report.pinned, None);
    }

    #[test]
    fn exactify_recovers_exact_witnesses() {
        let b = build_b(&[rat(1, 2)]).unwrap();
        let exact = factor_b_equal(&rat(1, 2), 1).unwrap();
        let float = FloatFactorization {
            w: (0..5)
                .map(|i| exact.terms.iter().map(|t| t.u[i].to_f64()).collect())
                .collect(),
            h: exact.terms.iter().map(|t| t.v.iter().map(|x| x.to_f64()).collect()).collect(),
            residual: 0.0,
        };
        let recovered = exactify_factorization(&float, &b, 2).unwrap();
        assert!(b.validate_factorization(&recovered).unwrap().pass());
        // A clearly wrong factorization is rejected.
        let noisy = FloatFactorization {
            w: vec![vec![0.3; 1]; 5],
            h: vec![vec![0.3; 5]; 1],
            residual: 1.0,
        };
        assert!(exactify_factorization(&noisy, &b, 10).is_none());
    }
}
