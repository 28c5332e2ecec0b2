//! Dense exact matrices, fraction-free rank, minors, permutation
//! equivalence and validation of nonnegative rank-one factorizations.

use std::fmt::Write as _;

use crate::scalar::{div, scalar_format, scalar_parse, ExactScalar, ScalarDomain};
use crate::Error;

/// Row-major dense matrix over Q or Q(sqrt 2). Immutable after construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    domain: ScalarDomain,
    entries: Vec<ExactScalar>,
}

impl ExactMatrix {
    pub fn new(
        rows: usize,
        cols: usize,
        domain: ScalarDomain,
        entries: Vec<ExactScalar>,
    ) -> Result<Self, Error> {
        if entries.len() != rows * cols {
            return Err(Error::DimMismatch(format!(
                "expected {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        let entries = entries
            .into_iter()
            .map(|e| e.into_domain(domain))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ExactMatrix {
            rows,
            cols,
            domain,
            entries,
        })
    }

    pub fn from_rows(domain: ScalarDomain, rows: Vec<Vec<ExactScalar>>) -> Result<Self, Error> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimMismatch("ragged rows".into()));
        }
        Self::new(r, c, domain, rows.into_iter().flatten().collect())
    }

    pub fn zero(rows: usize, cols: usize, domain: ScalarDomain) -> Self {
        ExactMatrix {
            rows,
            cols,
            domain,
            entries: vec![ExactScalar::zero(domain); rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn domain(&self) -> ScalarDomain {
        self.domain
    }

    pub fn get(&self, i: usize, j: usize) -> &ExactScalar {
        &self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> Vec<ExactScalar> {
        (0..self.cols).map(|j| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.rows * self.cols);
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j).clone());
            }
        }
        ExactMatrix {
            rows: self.cols,
            cols: self.rows,
            domain: self.domain,
            entries,
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.iter().all(|e| e.is_nonnegative())
    }

    pub fn submatrix(&self, row_idx: &[usize], col_idx: &[usize]) -> Result<Self, Error> {
        if row_idx.iter().any(|&i| i >= self.rows) || col_idx.iter().any(|&j| j >= self.cols) {
            return Err(Error::DimMismatch("submatrix index out of range".into()));
        }
        let mut entries = Vec::with_capacity(row_idx.len() * col_idx.len());
        for &i in row_idx {
            for &j in col_idx {
                entries.push(self.get(i, j).clone());
            }
        }
        Ok(ExactMatrix {
            rows: row_idx.len(),
            cols: col_idx.len(),
            domain: self.domain,
            entries,
        })
    }

    /// Rank over the fraction field by fraction-free (Bareiss) elimination
    /// with full pivoting; the pivot is the first nonzero in scan order.
    pub fn rank_exact(&self) -> usize {
        bareiss(&mut self.to_grid()).0
    }

    /// Exact determinant of a square matrix.
    pub fn det(&self) -> Result<ExactScalar, Error> {
        if self.rows != self.cols {
            return Err(Error::DimMismatch("determinant of non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(ExactScalar::one(self.domain));
        }
        let mut grid = self.to_grid();
        let (rank, last_pivot, sign) = bareiss(&mut grid);
        if rank < n {
            return Ok(ExactScalar::zero(self.domain));
        }
        // Bareiss leaves the determinant (up to swap sign) as the last pivot.
        Ok(if sign < 0 { -last_pivot } else { last_pivot })
    }

    /// Determinant of the square submatrix selected by `row_idx` x `col_idx`.
    pub fn minor_det(&self, row_idx: &[usize], col_idx: &[usize]) -> Result<ExactScalar, Error> {
        if row_idx.len() != col_idx.len() {
            return Err(Error::DimMismatch(
                "minor needs equally many rows and columns".into(),
            ));
        }
        self.submatrix(row_idx, col_idx)?.det()
    }

    /// Entry `(i, j)` of the result is entry `(row_perm[i], col_perm[j])`
    /// of `self`.
    pub fn permute(&self, row_perm: &[usize], col_perm: &[usize]) -> Result<Self, Error> {
        check_permutation(row_perm, self.rows)?;
        check_permutation(col_perm, self.cols)?;
        self.submatrix(row_perm, col_perm)
    }

    /// Searches for `(row_perm, col_perm)` with
    /// `self.permute(row_perm, col_perm) == other`.
    pub fn permutation_equivalent(
        &self,
        other: &ExactMatrix,
    ) -> Result<Option<(Vec<usize>, Vec<usize>)>, Error> {
        if self.rows != other.rows || self.cols != other.cols || self.domain != other.domain {
            return Err(Error::DimMismatch(
                "permutation equivalence needs equal shapes and domains".into(),
            ));
        }
        Ok(permutation_search(self, other))
    }

    /// Checks an alleged nonnegative factorization term by term and
    /// entry by entry; everything exact.
    pub fn validate_factorization(&self, f: &NNFactorization) -> Result<ValidationReport, Error> {
        if f.rows != self.rows || f.cols != self.cols {
            return Err(Error::DimMismatch(format!(
                "factorization is {}x{}, matrix is {}x{}",
                f.rows, f.cols, self.rows, self.cols
            )));
        }
        let mut report = ValidationReport {
            terms: f.terms.len(),
            nonneg_ok: true,
            first_negative: None,
            sum_ok: true,
            first_mismatch: None,
        };
        'outer: for (t, term) in f.terms.iter().enumerate() {
            for (idx, e) in term.u.iter().enumerate() {
                if e.sign() < 0 {
                    report.nonneg_ok = false;
                    report.first_negative = Some(FactorCoord::U(t, idx));
                    break 'outer;
                }
            }
            for (idx, e) in term.v.iter().enumerate() {
                if e.sign() < 0 {
                    report.nonneg_ok = false;
                    report.first_negative = Some(FactorCoord::V(t, idx));
                    break 'outer;
                }
            }
        }
        let sum = f.sum()?;
        for i in 0..self.rows {
            for j in 0..self.cols {
                if sum.get(i, j) != self.get(i, j) {
                    report.sum_ok = false;
                    report.first_mismatch = Some((i, j));
                    return Ok(report);
                }
            }
        }
        Ok(report)
    }

    fn to_grid(&self) -> Vec<Vec<ExactScalar>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }
}

fn check_permutation(perm: &[usize], n: usize) -> Result<(), Error> {
    if perm.len() != n {
        return Err(Error::BadPermutation(format!(
            "permutation length {} does not match dimension {}",
            perm.len(),
            n
        )));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::BadPermutation(format!(
                "not a bijection of 0..{n}"
            )));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Fraction-free elimination in place. Returns `(rank, last_pivot, sign)`
/// where `sign` accounts for row and column swaps.
fn bareiss(grid: &mut [Vec<ExactScalar>]) -> (usize, ExactScalar, i32) {
    let rows = grid.len();
    let cols = grid.first().map_or(0, |r| r.len());
    let domain = grid
        .first()
        .and_then(|r| r.first())
        .map_or(ScalarDomain::Rat, |e| e.domain());
    let mut prev = ExactScalar::one(domain);
    let mut sign = 1;
    let mut k = 0;
    while k < rows && k < cols {
        // First nonzero in scan order over the remaining block.
        let pivot = (k..rows)
            .flat_map(|i| (k..cols).map(move |j| (i, j)))
            .find(|&(i, j)| !grid[i][j].is_zero());
        let (pi, pj) = match pivot {
            Some(p) => p,
            None => break,
        };
        if pi != k {
            grid.swap(pi, k);
            sign = -sign;
        }
        if pj != k {
            for row in grid.iter_mut() {
                row.swap(pj, k);
            }
            sign = -sign;
        }
        let pivot_val = grid[k][k].clone();
        for i in k + 1..rows {
            let lead = grid[i][k].clone();
            for j in k + 1..cols {
                let num = &pivot_val * &grid[i][j] - &lead * &grid[k][j];
                // Exact by the Bareiss identity (and we are over a field).
                grid[i][j] = div(&num, &prev).expect("previous pivot is nonzero");
            }
            grid[i][k] = ExactScalar::zero(domain);
        }
        prev = pivot_val;
        k += 1;
    }
    (k, prev, sign)
}

/// Multiset signature of a row or column, used to prune the
/// permutation-equivalence search.
fn signature(entries: &[ExactScalar]) -> Vec<(num::BigRational, num::BigRational)> {
    let mut sig: Vec<_> = entries.iter().map(|e| e.parts()).collect();
    sig.sort();
    sig
}

fn permutation_search(m1: &ExactMatrix, m2: &ExactMatrix) -> Option<(Vec<usize>, Vec<usize>)> {
    let rows = m1.rows();
    let row_sig1: Vec<_> = (0..rows).map(|i| signature(&m1.row(i))).collect();
    let row_sig2: Vec<_> = (0..rows).map(|i| signature(&m2.row(i))).collect();
    {
        let mut a = row_sig1.clone();
        let mut b = row_sig2.clone();
        a.sort();
        b.sort();
        if a != b {
            return None;
        }
    }
    // Assign to each row of m2 a distinct row of m1 with equal signature,
    // then try to complete a consistent column permutation.
    let mut row_perm = vec![usize::MAX; rows];
    let mut used = vec![false; rows];
    fn assign_rows(
        i: usize,
        m1: &ExactMatrix,
        m2: &ExactMatrix,
        row_sig1: &[Vec<(num::BigRational, num::BigRational)>],
        row_sig2: &[Vec<(num::BigRational, num::BigRational)>],
        row_perm: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> Option<Vec<usize>> {
        if i == m2.rows() {
            return complete_columns(m1, m2, row_perm);
        }
        for r in 0..m1.rows() {
            if used[r] || row_sig1[r] != row_sig2[i] {
                continue;
            }
            used[r] = true;
            row_perm[i] = r;
            if let Some(col_perm) = assign_rows(i + 1, m1, m2, row_sig1, row_sig2, row_perm, used) {
                return Some(col_perm);
            }
            used[r] = false;
        }
        None
    }
    let col_perm = assign_rows(
        0, m1, m2, &row_sig1, &row_sig2, &mut row_perm, &mut used,
    )?;
    Some((row_perm, col_perm))
}

/// With rows fixed, a column of m2 can map to a column of m1 only if the
/// entry sequences agree; find a system of distinct representatives.
fn complete_columns(m1: &ExactMatrix, m2: &ExactMatrix, row_perm: &[usize]) -> Option<Vec<usize>> {
    let cols = m1.cols();
    let rows = m1.rows();
    let candidates: Vec<Vec<usize>> = (0..cols)
        .map(|j| {
            (0..cols)
                .filter(|&c| (0..rows).all(|i| m1.get(row_perm[i], c) == m2.get(i, j)))
                .collect()
        })
        .collect();
    let mut col_perm = vec![usize::MAX; cols];
    let mut used = vec![false; cols];
    fn assign(
        j: usize,
        candidates: &[Vec<usize>],
        col_perm: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if j == candidates.len() {
            return true;
        }
        for &c in &candidates[j] {
            if !used[c] {
                used[c] = true;
                col_perm[j] = c;
                if assign(j + 1, candidates, col_perm, used) {
                    return true;
                }
                used[c] = false;
            }
        }
        false
    }
    if assign(0, &candidates, &mut col_perm, &mut used) {
        Some(col_perm)
    } else {
        None
    }
}

/// One nonnegative rank-one summand `u * v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankOneTerm {
    pub u: Vec<ExactScalar>,
    pub v: Vec<ExactScalar>,
}

/// Where a negative entry was found in a factorization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorCoord {
    U(usize, usize),
    V(usize, usize),
}

#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub terms: usize,
    pub nonneg_ok: bool,
    pub first_negative: Option<FactorCoord>,
    pub sum_ok: bool,
    pub first_mismatch: Option<(usize, usize)>,
}

impl ValidationReport {
    pub fn pass(&self) -> bool {
        self.nonneg_ok && self.sum_ok
    }
}

/// An ordered list of rank-one terms; a witness for a nonnegative-rank
/// upper bound equal to the term count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NNFactorization {
    pub rows: usize,
    pub cols: usize,
    pub domain: ScalarDomain,
    pub terms: Vec<RankOneTerm>,
}

impl NNFactorization {
    pub fn new(
        rows: usize,
        cols: usize,
        domain: ScalarDomain,
        terms: Vec<RankOneTerm>,
    ) -> Result<Self, Error> {
        for term in &terms {
            if term.u.len() != rows || term.v.len() != cols {
                return Err(Error::DimMismatch(format!(
                    "term has u of length {} and v of length {}, expected {} and {}",
                    term.u.len(),
                    term.v.len(),
                    rows,
                    cols
                )));
            }
        }
        Ok(NNFactorization {
            rows,
            cols,
            domain,
            terms,
        })
    }

    pub fn sum(&self) -> Result<ExactMatrix, Error> {
        let mut entries = vec![ExactScalar::zero(self.domain); self.rows * self.cols];
        for term in &self.terms {
            for (i, ui) in term.u.iter().enumerate() {
                if ui.is_zero() {
                    continue;
                }
                for (j, vj) in term.v.iter().enumerate() {
                    entries[i * self.cols + j] = &entries[i * self.cols + j] + &(ui * vj);
                }
            }
        }
        ExactMatrix::new(self.rows, self.cols, self.domain, entries)
    }
}

/// Writes `matrix <rows> <cols> <rat|quad>` followed by one line per row.
pub fn format_matrix(m: &ExactMatrix) -> String {
    let mut out = format!("matrix {} {} {}\n", m.rows(), m.cols(), m.domain().token());
    for i in 0..m.rows() {
        let line: Vec<String> = (0..m.cols()).map(|j| scalar_format(m.get(i, j))).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out
}

pub fn parse_matrix(text: &str) -> Result<ExactMatrix, Error> {
    let mut tokens = text.split_whitespace();
    let bad = |msg: &str| Error::MalformedMatrix(msg.into());
    if tokens.next() != Some("matrix") {
        return Err(bad("missing `matrix` header"));
    }
    let rows: usize = tokens
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| bad("bad row count"))?;
    let cols: usize = tokens
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| bad("bad column count"))?;
    let domain = ScalarDomain::parse_token(tokens.next().ok_or_else(|| bad("missing domain"))?)?;
    let mut entries = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        let tok = tokens.next().ok_or_else(|| bad("too few entries"))?;
        entries.push(scalar_parse(tok, domain)?);
    }
    if tokens.next().is_some() {
        return Err(bad("trailing tokens"));
    }
    ExactMatrix::new(rows, cols, domain, entries)
}

/// `factorization <rows> <cols> <rat|quad> <terms>`, then per term one
/// line for `u` and one line for `v`.
pub fn format_factorization(f: &NNFactorization) -> String {
    let mut out = format!(
        "factorization {} {} {} {}\n",
        f.rows,
        f.cols,
        f.domain.token(),
        f.terms.len()
    );
    for term in &f.terms {
        let u: Vec<String> = term.u.iter().map(scalar_format).collect();
        let v: Vec<String> = term.v.iter().map(scalar_format).collect();
        let _ = writeln!(out, "{}", u.join(" "));
        let _ = writeln!(out, "{}", v.join(" "));
    }
    out
}

pub fn parse_factorization(text: &str) -> Result<NNFactorization, Error> {
    let mut tokens = text.split_whitespace();
    let bad = |msg: &str| Error::MalformedFactorization(msg.into());
    if tokens.next() != Some("factorization") {
        return Err(bad("missing `factorization` header"));
    }
    fn next_count<'a>(
        tokens: &mut impl Iterator<Item = &'a str>,
        what: &str,
    ) -> Result<usize, Error> {
        tokens
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::MalformedFactorization(format!("bad {what}")))
    }
    let rows = next_count(&mut tokens, "row count")?;
    let cols = next_count(&mut tokens, "column count")?;
    let domain = ScalarDomain::parse_token(tokens.next().ok_or_else(|| bad("missing domain"))?)?;
    let nterms = next_count(&mut tokens, "term count")?;
    let mut terms = Vec::with_capacity(nterms);
    for _ in 0..nterms {
        let mut u = Vec::with_capacity(rows);
        for _ in 0..rows {
            let tok = tokens.next().ok_or_else(|| bad("too few u entries"))?;
            u.push(scalar_parse(tok, domain)?);
        }
        let mut v = Vec::with_capacity(cols);
        for _ in 0..cols {
            let tok = tokens.next().ok_or_else(|| bad("too few v entries"))?;
            v.push(scalar_parse(tok, domain)?);
        }
        terms.push(RankOneTerm { u, v });
    }
    if tokens.next().is_some() {
        return Err(bad("trailing tokens"));
    }
    NNFactorization::new(rows, cols, domain, terms)
}

/// Convenience constructor from integer literals, rational domain.
pub fn int_matrix(rows: &[&[i64]]) -> ExactMatrix {
    let grid: Vec<Vec<ExactScalar>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| crate::scalar::int(x)).collect())
        .collect();
    ExactMatrix::from_rows(ScalarDomain::Rat, grid).expect("literal grid is rectangular")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::build_b0;
    use crate::scalar::{int, rat};

    /// Cofactor-expansion determinant, the independent oracle for Bareiss.
    fn det_cofactor(m: &ExactMatrix) -> ExactScalar {
        let n = m.rows();
        assert_eq!(n, m.cols());
        if n == 0 {
            return ExactScalar::one(m.domain());
        }
        if n == 1 {
            return m.get(0, 0).clone();
        }
        let mut acc = ExactScalar::zero(m.domain());
        let rest: Vec<usize> = (1..n).collect();
        for j in 0..n {
            let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
            let sub = m.submatrix(&rest, &cols).unwrap();
            let term = m.get(0, j) * &det_cofactor(&sub);
            acc = if j % 2 == 0 { acc + term } else { acc - term };
        }
        acc
    }

    #[test]
    fn rank_of_b0_is_3() {
        assert_eq!(build_b0().rank_exact(), 3);
    }

    #[test]
    fn rank_of_identity() {
        let id = int_matrix(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]);
        assert_eq!(id.rank_exact(), 4);
    }

    #[test]
    fn b0_four_by_four_minor_vanishes() {
        let b0 = build_b0();
        let idx = [0, 1, 2, 3];
        assert_eq!(b0.minor_det(&idx, &idx).unwrap(), int(0));
    }

    #[test]
    fn one_by_one_minor_is_the_entry() {
        let m = int_matrix(&[&[5, 7], &[11, 13]]);
        assert_eq!(m.minor_det(&[1], &[0]).unwrap(), int(11));
    }

    #[test]
    fn bareiss_matches_cofactor_expansion() {
        // Deterministic pseudo-random small rational matrices.
        let mut state: u64 = 0x9e3779b97f4a7c15;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) % 11) as i64 - 5
        };
        for n in 1..=5 {
            for _ in 0..8 {
                let grid: Vec<Vec<ExactScalar>> = (0..n)
                    .map(|_| (0..n).map(|_| rat(next(), 1 + next().abs())).collect())
                    .collect();
                let m = ExactMatrix::from_rows(ScalarDomain::Rat, grid).unwrap();
                assert_eq!(m.det().unwrap(), det_cofactor(&m));
            }
        }
    }

    #[test]
    fn permute_round_trip() {
        let b0 = build_b0();
        let swapped = b0.permute(&[1, 0, 2, 3], &[0, 1, 2, 3]).unwrap();
        let back = swapped.permute(&[1, 0, 2, 3], &[0, 1, 2, 3]).unwrap();
        assert_eq!(back, b0);
        assert_eq!(swapped.rank_exact(), b0.rank_exact());
    }

    #[test]
    fn bad_permutation_rejected() {
        let b0 = build_b0();
        assert!(matches!(
            b0.permute(&[0, 0, 1, 2], &[0, 1, 2, 3]),
            Err(Error::BadPermutation(_))
        ));
    }

    #[test]
    fn permutation_equivalence_finds_shift() {
        let b0 = build_b0();
        let shifted = b0.permute(&[1, 2, 3, 0], &[0, 1, 2, 3]).unwrap();
        let (rp, cp) = b0.permutation_equivalent(&shifted).unwrap().unwrap();
        assert_eq!(b0.permute(&rp, &cp).unwrap(), shifted);

        let ones = int_matrix(&[&[1, 1, 1, 1], &[1, 1, 1, 1], &[1, 1, 1, 1], &[1, 1, 1, 1]]);
        assert!(b0.permutation_equivalent(&ones).unwrap().is_none());

        let (rp, cp) = b0.permutation_equivalent(&b0).unwrap().unwrap();
        assert_eq!(b0.permute(&rp, &cp).unwrap(), b0);
    }

    #[test]
    fn empty_factorization_of_zero_matrix() {
        let z = ExactMatrix::zero(3, 3, ScalarDomain::Rat);
        let f = NNFactorization::new(3, 3, ScalarDomain::Rat, vec![]).unwrap();
        let report = z.validate_factorization(&f).unwrap();
        assert!(report.pass());
        assert_eq!(report.terms, 0);
    }

    #[test]
    fn row_factorization_of_b0_validates() {
        let b0 = build_b0();
        let terms: Vec<RankOneTerm> = (0..4)
            .map(|i| RankOneTerm {
                u: (0..4).map(|k| int(if k == i { 1 } else { 0 })).collect(),
                v: b0.row(i),
            })
            .collect();
        let f = NNFactorization::new(4, 4, ScalarDomain::Rat, terms).unwrap();
        let report = b0.validate_factorization(&f).unwrap();
        assert!(report.pass());
        assert_eq!(report.terms, 4);
    }

    #[test]
    fn validation_reports_first_mismatch() {
        let b0 = build_b0();
        let f = NNFactorization::new(4, 4, ScalarDomain::Rat, vec![]).unwrap();
        let report = b0.validate_factorization(&f).unwrap();
        assert!(!report.pass());
        assert_eq!(report.first_mismatch, Some((0, 0)));
    }

    #[test]
    fn validation_flags_negative_entries() {
        let m = ExactMatrix::zero(2, 2, ScalarDomain::Rat);
        let f = NNFactorization::new(
            2,
            2,
            ScalarDomain::Rat,
            vec![RankOneTerm {
                u: vec![int(1), int(-1)],
                v: vec![int(0), int(0)],
            }],
        )
        .unwrap();
        let report = m.validate_factorization(&f).unwrap();
        assert!(!report.nonneg_ok);
        assert_eq!(report.first_negative, Some(FactorCoord::U(0, 1)));
    }

    #[test]
    fn matrix_file_round_trip() {
        let b0 = build_b0();
        assert_eq!(parse_matrix(&format_matrix(&b0)).unwrap(), b0);
        let m = ExactMatrix::from_rows(
            ScalarDomain::Quad,
            vec![vec![crate::scalar::quad(1, 1, 1, 2), int(2)]],
        )
        .unwrap();
        assert_eq!(parse_matrix(&format_matrix(&m)).unwrap(), m);
    }

    #[test]
    fn factorization_file_round_trip() {
        let f = NNFactorization::new(
            2,
            3,
            ScalarDomain::Rat,
            vec![RankOneTerm {
                u: vec![int(1), rat(1, 2)],
                v: vec![int(0), int(3), rat(2, 5)],
            }],
        )
        .unwrap();
        assert_eq!(parse_factorization(&format_factorization(&f)).unwrap(), f);
    }
}
