//! Gadget constructions: the 4x4 cyclic matrix B0, the 5x(n+4) coupling
//! gadget B(alpha_1..alpha_n), the wrapper matrix that turns a one-variable
//! completion instance into a plain nonnegative-rank instance, in-place
//! variable elimination on partial matrices, and lifting of factorizations
//! through eliminations.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::matrix::{ExactMatrix, NNFactorization, RankOneTerm};
use crate::scalar::{scalar_format, scalar_parse, ExactScalar, ScalarDomain};
use crate::Error;

/// The 4x4 cyclic 0/1 matrix with conventional rank 3 and nonnegative
/// rank 4.
pub fn build_b0() -> ExactMatrix {
    crate::matrix::int_matrix(&[
        &[1, 1, 0, 0],
        &[0, 1, 1, 0],
        &[0, 0, 1, 1],
        &[1, 0, 0, 1],
    ])
}

fn join_domain(scalars: &[ExactScalar]) -> ScalarDomain {
    if scalars.iter().any(|s| s.domain() == ScalarDomain::Quad) {
        ScalarDomain::Quad
    } else {
        ScalarDomain::Rat
    }
}

/// The 5x(n+4) gadget whose nonnegative rank is 4 exactly when all the
/// alphas coincide and lie in [0, 1].
pub fn build_b(alphas: &[ExactScalar]) -> Result<ExactMatrix, Error> {
    for a in alphas {
        if a.sign() < 0 {
            return Err(Error::NegativeInput(format!("alpha = {a}")));
        }
    }
    let n = alphas.len();
    let domain = join_domain(alphas);
    let zero = || ExactScalar::zero(domain);
    let one = || ExactScalar::one(domain);
    let mut rows: Vec<Vec<ExactScalar>> = Vec::with_capacity(5);
    let mut row1: Vec<ExactScalar> = alphas.to_vec();
    row1.extend([one(), one(), one(), one()]);
    rows.push(row1);
    let tail = |t: [i64; 4]| {
        let mut r = vec![zero(); n];
        r.extend(t.iter().map(|&x| if x == 0 { zero() } else { one() }));
        r
    };
    let mut row2 = vec![one(); n];
    row2.extend([one(), one(), zero(), zero()]);
    rows.push(row2);
    rows.push(tail([0, 1, 1, 0]));
    rows.push(tail([0, 0, 1, 1]));
    rows.push(tail([1, 0, 0, 1]));
    ExactMatrix::from_rows(domain, rows)
}

/// The 4-term factorization of `B(alpha, ..., alpha)` (n copies) that
/// exists exactly when `0 <= alpha <= 1`: the first row is the convex
/// combination `alpha*(row2 + row4) + (1-alpha)*(row3 + row5)`.
pub fn factor_b_equal(alpha: &ExactScalar, n: usize) -> Result<NNFactorization, Error> {
    if alpha.sign() < 0 || (&ExactScalar::one(alpha.domain()) - alpha).sign() < 0 {
        return Err(Error::AlphaOutOfRange(format!("alpha = {alpha}")));
    }
    let b = build_b(&vec![alpha.clone(); n])?;
    let domain = b.domain();
    let zero = || ExactScalar::zero(domain);
    let one_minus = &ExactScalar::one(domain) - alpha;
    let coeffs = [alpha.clone(), one_minus.clone(), alpha.clone(), one_minus];
    let terms = (0..4)
        .map(|i| {
            let mut u = vec![zero(); 5];
            u[0] = coeffs[i].clone();
            u[i + 1] = ExactScalar::one(domain);
            RankOneTerm { u, v: b.row(i + 1) }
        })
        .collect();
    NNFactorization::new(5, n + 4, domain, terms)
}

/// Builds the wrapper matrix of blocks `A`, `B`, `c` with parameter `s`:
/// top block `(A | B | 0)`, then the row `(c | s..s | 1 1 1 1)`, then four
/// rows carrying `B` indicators and the rows of B0.
pub fn wrap_gadget(
    a: &ExactMatrix,
    b: &ExactMatrix,
    c: &ExactMatrix,
    s: &ExactScalar,
    r: usize,
) -> Result<ExactMatrix, Error> {
    let (m, n) = (a.rows(), a.cols());
    let k = b.cols();
    if b.rows() != m {
        return Err(Error::DimMismatch(format!(
            "A has {} rows but B has {}",
            m,
            b.rows()
        )));
    }
    if c.rows() != 1 || c.cols() != n {
        return Err(Error::DimMismatch(format!(
            "c must be 1x{}, got {}x{}",
            n,
            c.rows(),
            c.cols()
        )));
    }
    if k == 0 {
        return Err(Error::DimMismatch("B must have at least one column".into()));
    }
    for mat in [a, b, c] {
        if !mat.is_nonnegative() {
            return Err(Error::NegativeInput("blocks must be nonnegative".into()));
        }
    }
    if (s - &ExactScalar::one(s.domain())).sign() < 0 {
        return Err(Error::NegativeInput(format!("s = {s} must be at least 1")));
    }
    if k > 1 && a.rank_exact() < r {
        return Err(Error::PreconditionNotCertified(format!(
            "k = {k} > 1 and rank(A) = {} < r = {r}",
            a.rank_exact()
        )));
    }
    let domain = if [a.domain(), b.domain(), c.domain(), s.domain()]
        .contains(&ScalarDomain::Quad)
    {
        ScalarDomain::Quad
    } else {
        ScalarDomain::Rat
    };
    let zero = || ExactScalar::zero(domain);
    let one = || ExactScalar::one(domain);
    let b0 = build_b0();
    let mut rows: Vec<Vec<ExactScalar>> = Vec::with_capacity(m + 5);
    for i in 0..m {
        let mut row = a.row(i);
        row.extend(b.row(i));
        row.extend(std::iter::repeat_with(zero).take(4));
        rows.push(row);
    }
    let mut pivot = c.row(0);
    pivot.extend(vec![s.clone(); k]);
    pivot.extend(std::iter::repeat_with(one).take(4));
    rows.push(pivot);
    for bi in 0..4 {
        let mut row = vec![zero(); n];
        row.extend(vec![if bi == 0 { one() } else { zero() }; k]);
        row.extend((0..4).map(|j| {
            if b0.get(bi, j).is_zero() {
                zero()
            } else {
                one()
            }
        }));
        rows.push(row);
    }
    ExactMatrix::from_rows(domain, rows)
}

/// An entry of a partial matrix: a known nonnegative constant or a named
/// interval-constrained variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Entry {
    Const(ExactScalar),
    Var(String),
}

/// Matrix with variable entries; each variable `x` ranges over
/// `[s - 1, s]` for its recorded `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialMatrix {
    rows: usize,
    cols: usize,
    domain: ScalarDomain,
    entries: Vec<Entry>,
    vars: BTreeMap<String, ExactScalar>,
}

impl PartialMatrix {
    pub fn new(
        rows: usize,
        cols: usize,
        domain: ScalarDomain,
        entries: Vec<Entry>,
        vars: BTreeMap<String, ExactScalar>,
    ) -> Result<Self, Error> {
        if entries.len() != rows * cols {
            return Err(Error::DimMismatch(format!(
                "expected {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        let mut canon = Vec::with_capacity(entries.len());
        for e in entries {
            match e {
                Entry::Const(c) => {
                    if c.sign() < 0 {
                        return Err(Error::NegativeInput(format!("constant entry {c}")));
                    }
                    canon.push(Entry::Const(c.into_domain(domain)?));
                }
                Entry::Var(name) => {
                    if !vars.contains_key(&name) {
                        return Err(Error::UnknownVar(name));
                    }
                    canon.push(Entry::Var(name));
                }
            }
        }
        Ok(PartialMatrix {
            rows,
            cols,
            domain,
            entries: canon,
            vars,
        })
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

    pub fn get(&self, i: usize, j: usize) -> &Entry {
        &self.entries[i * self.cols + j]
    }

    pub fn vars(&self) -> &BTreeMap<String, ExactScalar> {
        &self.vars
    }

    pub fn var_names(&self) -> Vec<String> {
        self.vars.keys().cloned().collect()
    }

    /// Substitutes every variable with its assigned value.
    pub fn complete(
        &self,
        assignment: &BTreeMap<String, ExactScalar>,
    ) -> Result<ExactMatrix, Error> {
        let domain = if assignment
            .values()
            .any(|v| v.domain() == ScalarDomain::Quad)
        {
            ScalarDomain::Quad
        } else {
            self.domain
        };
        let mut entries = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            match e {
                Entry::Const(c) => entries.push(c.clone()),
                Entry::Var(name) => {
                    let v = assignment
                        .get(name)
                        .ok_or_else(|| Error::UnresolvedVariables(name.clone()))?;
                    entries.push(v.clone());
                }
            }
        }
        ExactMatrix::new(self.rows, self.cols, domain, entries)
    }

    /// A fully-constant partial matrix as an exact matrix.
    pub fn into_exact(self) -> Result<ExactMatrix, Error> {
        for e in &self.entries {
            if let Entry::Var(name) = e {
                return Err(Error::UnresolvedVariables(name.clone()));
            }
        }
        self.complete(&BTreeMap::new())
    }
}

/// Replayable record of one variable elimination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetStep {
    pub var: String,
    pub s: ExactScalar,
    pub pivot_row: usize,
    pub var_cols: Vec<usize>,
    pub new_rows: [usize; 4],
    pub new_cols: [usize; 4],
    pub r_checked: Option<usize>,
}

/// Ordered elimination steps from a starting partial matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetTrace {
    pub initial_rows: usize,
    pub initial_cols: usize,
    pub steps: Vec<GadgetStep>,
}

/// Removes variable `var` by appending the coupling gadget in place: the
/// pivot row keeps its position, four rows and four columns are appended
/// at the end. For multi-column variables (`k > 1`) the caller must supply
/// the target rank `r`, certified on the constant part of the matrix.
pub fn eliminate_variable(
    pm: &PartialMatrix,
    var: &str,
    r: Option<usize>,
) -> Result<(PartialMatrix, GadgetStep), Error> {
    let s = pm
        .vars
        .get(var)
        .cloned()
        .ok_or_else(|| Error::UnknownVar(var.to_string()))?;
    let mut occ: Vec<(usize, usize)> = Vec::new();
    for i in 0..pm.rows {
        for j in 0..pm.cols {
            if matches!(pm.get(i, j), Entry::Var(name) if name == var) {
                occ.push((i, j));
            }
        }
    }
    if occ.is_empty() {
        return Err(Error::UnknownVar(format!("{var} (no occurrences)")));
    }
    let pivot_row = occ[0].0;
    if occ.iter().any(|&(i, _)| i != pivot_row) {
        return Err(Error::VarSpansMultipleRows(var.to_string()));
    }
    let var_cols: Vec<usize> = occ.iter().map(|&(_, j)| j).collect();
    let k = var_cols.len();
    let r_checked = if k > 1 {
        let r = r.ok_or_else(|| {
            Error::PreconditionNotCertified(format!(
                "variable {var} occupies {k} columns, a target rank r is required"
            ))
        })?;
        let cand_cols: Vec<usize> = (0..pm.cols).filter(|c| !var_cols.contains(c)).collect();
        let cand_rows: Vec<usize> = (0..pm.rows)
            .filter(|&i| {
                i != pivot_row
                    && cand_cols
                        .iter()
                        .all(|&c| matches!(pm.get(i, c), Entry::Const(_)))
            })
            .collect();
        let grid: Vec<Vec<ExactScalar>> = cand_rows
            .iter()
            .map(|&i| {
                cand_cols
                    .iter()
                    .map(|&c| match pm.get(i, c) {
                        Entry::Const(v) => v.clone(),
                        Entry::Var(_) => unreachable!(),
                    })
                    .collect()
            })
            .collect();
        let sub = ExactMatrix::from_rows(pm.domain, grid)?;
        if sub.rank_exact() < r {
            return Err(Error::PreconditionNotCertified(format!(
                "constant block has rank {} < r = {r}",
                sub.rank_exact()
            )));
        }
        Some(r)
    } else {
        r
    };

    let domain = if s.domain() == ScalarDomain::Quad {
        ScalarDomain::Quad
    } else {
        pm.domain
    };
    let (rows, cols) = (pm.rows, pm.cols);
    let zero = || Entry::Const(ExactScalar::zero(domain));
    let one = || Entry::Const(ExactScalar::one(domain));
    let mut entries: Vec<Entry> = Vec::with_capacity((rows + 4) * (cols + 4));
    for i in 0..rows {
        for j in 0..cols {
            let e = pm.get(i, j).clone();
            if i == pivot_row && var_cols.contains(&j) {
                entries.push(Entry::Const(s.clone()));
            } else {
                entries.push(e);
            }
        }
        if i == pivot_row {
            entries.extend(std::iter::repeat_with(one).take(4));
        } else {
            entries.extend(std::iter::repeat_with(zero).take(4));
        }
    }
    let b0 = build_b0();
    for bi in 0..4 {
        for j in 0..cols {
            if bi == 0 && var_cols.contains(&j) {
                entries.push(one());
            } else {
                entries.push(zero());
            }
        }
        for bj in 0..4 {
            entries.push(if b0.get(bi, bj).is_zero() { zero() } else { one() });
        }
    }
    let mut vars = pm.vars.clone();
    vars.remove(var);
    let out = PartialMatrix::new(rows + 4, cols + 4, domain, entries, vars)?;
    let step = GadgetStep {
        var: var.to_string(),
        s,
        pivot_row,
        var_cols,
        new_rows: [rows, rows + 1, rows + 2, rows + 3],
        new_cols: [cols, cols + 1, cols + 2, cols + 3],
        r_checked,
    };
    Ok((out, step))
}

/// Lifts a factorization of the pre-elimination matrix (completed with
/// `var := xi`) to one of the post-elimination matrix, by adding the four
/// terms of `factor_b_equal(s - xi, k)` at the gadget's positions.
pub fn lift_factorization(
    inner: &NNFactorization,
    pre: &ExactMatrix,
    step: &GadgetStep,
    xi: &ExactScalar,
) -> Result<NNFactorization, Error> {
    let one = ExactScalar::one(step.s.domain());
    let low = &step.s - &one;
    if (xi - &low).sign() < 0 || (&step.s - xi).sign() < 0 {
        return Err(Error::XiOutOfRange(format!(
            "xi = {xi} outside [{low}, {}]",
            step.s
        )));
    }
    let report = pre.validate_factorization(inner)?;
    if !report.pass() {
        return Err(Error::ValidationFailure(format!(
            "inner factorization does not validate: mismatch at {:?}, negative at {:?}",
            report.first_mismatch, report.first_negative
        )));
    }
    let k = step.var_cols.len();
    let alpha = &step.s - xi;
    let b_terms = factor_b_equal(&alpha, k)?;
    let rows = pre.rows() + 4;
    let cols = pre.cols() + 4;
    let domain = if inner.domain == ScalarDomain::Quad || alpha.domain() == ScalarDomain::Quad {
        ScalarDomain::Quad
    } else {
        inner.domain
    };
    let zero = || ExactScalar::zero(domain);
    let mut terms: Vec<RankOneTerm> = Vec::with_capacity(inner.terms.len() + 4);
    for t in &inner.terms {
        let mut u = t.u.clone();
        u.extend(std::iter::repeat_with(zero).take(4));
        let mut v = t.v.clone();
        v.extend(std::iter::repeat_with(zero).take(4));
        terms.push(RankOneTerm { u, v });
    }
    for t in &b_terms.terms {
        let mut u = vec![zero(); rows];
        u[step.pivot_row] = t.u[0].clone();
        for (i, &nr) in step.new_rows.iter().enumerate() {
            u[nr] = t.u[i + 1].clone();
        }
        let mut v = vec![zero(); cols];
        for (j, &vc) in step.var_cols.iter().enumerate() {
            v[vc] = t.v[j].clone();
        }
        for (j, &nc) in step.new_cols.iter().enumerate() {
            v[nc] = t.v[k + j].clone();
        }
        terms.push(RankOneTerm { u, v });
    }
    NNFactorization::new(rows, cols, domain, terms)
}

/// Replays a trace from a starting partial matrix down to a constant
/// matrix. Each step is re-derived and checked against the record.
pub fn replay_trace(pm0: &PartialMatrix, trace: &GadgetTrace) -> Result<ExactMatrix, Error> {
    if pm0.rows() != trace.initial_rows || pm0.cols() != trace.initial_cols {
        return Err(Error::MalformedTrace(format!(
            "trace starts at {}x{}, matrix is {}x{}",
            trace.initial_rows,
            trace.initial_cols,
            pm0.rows(),
            pm0.cols()
        )));
    }
    let mut pm = pm0.clone();
    for step in &trace.steps {
        let (next, derived) = eliminate_variable(&pm, &step.var, step.r_checked)?;
        if derived.pivot_row != step.pivot_row
            || derived.var_cols != step.var_cols
            || derived.s != step.s
        {
            return Err(Error::MalformedTrace(format!(
                "step for `{}` does not match the matrix state",
                step.var
            )));
        }
        pm = next;
    }
    pm.into_exact()
}

/// Runs a full trace while carrying a factorization of the completed
/// matrix upward: at each step the current factorization is validated
/// against the completion and lifted with `xi` = the assigned value of the
/// eliminated variable.
pub fn lift_through_trace(
    pm0: &PartialMatrix,
    trace: &GadgetTrace,
    assignment: &BTreeMap<String, ExactScalar>,
    inner: NNFactorization,
) -> Result<NNFactorization, Error> {
    let mut pm = pm0.clone();
    let mut fact = inner;
    for step in &trace.steps {
        let pre = pm.complete(assignment)?;
        let xi = assignment
            .get(&step.var)
            .ok_or_else(|| Error::UnresolvedVariables(step.var.clone()))?;
        let (next, derived) = eliminate_variable(&pm, &step.var, step.r_checked)?;
        fact = lift_factorization(&fact, &pre, &derived, xi)?;
        pm = next;
    }
    Ok(fact)
}

/// `partial <rows> <cols> <rat|quad>`, entries as scalar tokens or
/// `?name`, then one `var <name> s=<scalar>` line per variable.
pub fn format_partial(pm: &PartialMatrix) -> String {
    let mut out = format!(
        "partial {} {} {}\n",
        pm.rows(),
        pm.cols(),
        pm.domain().token()
    );
    for i in 0..pm.rows() {
        let line: Vec<String> = (0..pm.cols())
            .map(|j| match pm.get(i, j) {
                Entry::Const(c) => scalar_format(c),
                Entry::Var(name) => format!("?{name}"),
            })
            .collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    for (name, s) in pm.vars() {
        let _ = writeln!(out, "var {} s={}", name, scalar_format(s));
    }
    out
}

pub fn parse_partial(text: &str) -> Result<PartialMatrix, Error> {
    let bad = |msg: &str| Error::MalformedPartial(msg.into());
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad("empty file"))?;
    let mut head = header.split_whitespace();
    if head.next() != Some("partial") {
        return Err(bad("missing `partial` header"));
    }
    let rows: usize = head
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| bad("bad row count"))?;
    let cols: usize = head
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| bad("bad column count"))?;
    let domain = ScalarDomain::parse_token(head.next().ok_or_else(|| bad("missing domain"))?)?;
    let rest: Vec<&str> = lines.collect();
    let mut var_lines = Vec::new();
    let mut tokens = Vec::new();
    for line in rest {
        if line.trim_start().starts_with("var ") {
            var_lines.push(line.trim());
        } else {
            tokens.extend(line.split_whitespace());
        }
    }
    if tokens.len() != rows * cols {
        return Err(bad(&format!(
            "expected {} entry tokens, got {}",
            rows * cols,
            tokens.len()
        )));
    }
    let mut vars = BTreeMap::new();
    for line in var_lines {
        let mut parts = line.split_whitespace();
        parts.next(); // "var"
        let name = parts.next().ok_or_else(|| bad("var line missing name"))?;
        let s_part = parts.next().ok_or_else(|| bad("var line missing s="))?;
        let s_tok = s_part
            .strip_prefix("s=")
            .ok_or_else(|| bad("var line missing s="))?;
        vars.insert(name.to_string(), scalar_parse(s_tok, domain)?);
    }
    let entries = tokens
        .into_iter()
        .map(|tok| {
            if let Some(name) = tok.strip_prefix('?') {
                Ok(Entry::Var(name.to_string()))
            } else {
                Ok(Entry::Const(scalar_parse(tok, domain)?))
            }
        })
        .collect::<Result<Vec<_>, Error>>()?;
    PartialMatrix::new(rows, cols, domain, entries, vars)
}

/// One line per step:
/// `step var=<name> s=<scalar> pivot=<row> cols=<c1,...> r=<r|none>`.
pub fn format_trace(trace: &GadgetTrace) -> String {
    let mut out = String::new();
    for step in &trace.steps {
        let cols: Vec<String> = step.var_cols.iter().map(|c| c.to_string()).collect();
        let r = step
            .r_checked
            .map_or("none".to_string(), |r| r.to_string());
        let _ = writeln!(
            out,
            "step var={} s={} pivot={} cols={} r={}",
            step.var,
            scalar_format(&step.s),
            step.pivot_row,
            cols.join(","),
            r
        );
    }
    out
}

/// Parses step lines. The appended row/column indices are reconstructed
/// during replay, so they are not part of the file format.
pub fn parse_trace_steps(text: &str, domain: ScalarDomain) -> Result<Vec<GadgetStep>, Error> {
    let bad = |msg: &str| Error::MalformedTrace(msg.into());
    let mut steps = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        if parts.next() != Some("step") {
            return Err(bad("line must start with `step`"));
        }
        let mut fields: BTreeMap<&str, &str> = BTreeMap::new();
        for part in parts {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| bad("fields must be key=value"))?;
            fields.insert(key, value);
        }
        let get = |key: &str| {
            fields
                .get(key)
                .copied()
                .ok_or_else(|| Error::MalformedTrace(format!("missing field `{key}`")))
        };
        let var = get("var")?.to_string();
        let s = scalar_parse(get("s")?, domain)?;
        let pivot_row: usize = get("pivot")?
            .parse()
            .map_err(|_| bad("bad pivot index"))?;
        let var_cols = get("cols")?
            .split(',')
            .map(|c| c.parse::<usize>().map_err(|_| bad("bad column index")))
            .collect::<Result<Vec<_>, _>>()?;
        let r_checked = match get("r")? {
            "none" => None,
            other => Some(other.parse().map_err(|_| bad("bad r"))?),
        };
        steps.push(GadgetStep {
            var,
            s,
            pivot_row,
            var_cols,
            new_rows: [0; 4],
            new_cols: [0; 4],
            r_checked,
        });
    }
    Ok(steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn var(name: &str) -> Entry {
        Entry::Var(name.to_string())
    }

    #[test]
    fn b0_row_sums_and_cover_shape() {
        let b0 = build_b0();
        for i in 0..4 {
            let sum = b0
                .row(i)
                .into_iter()
                .fold(int(0), |acc, x| acc + x);
            assert_eq!(sum, int(2));
        }
        assert_eq!(b0.rank_exact(), 3);
    }

    #[test]
    fn build_b_examples() {
        let b = build_b(&[rat(1, 2)]).unwrap();
        assert_eq!((b.rows(), b.cols()), (5, 5));
        assert_eq!(b.rank_exact(), 4);

        let b = build_b(&[int(0), int(1)]).unwrap();
        assert_eq!((b.rows(), b.cols()), (5, 6));
        assert_eq!(b.rank_exact(), 5);

        // For a single alpha = 1 the last four columns of rows 2..5
        // reproduce B0.
        let b = build_b(&[int(1)]).unwrap();
        let tail = b.submatrix(&[1, 2, 3, 4], &[1, 2, 3, 4]).unwrap();
        assert_eq!(tail, build_b0());

        assert!(matches!(
            build_b(&[int(-1)]),
            Err(Error::NegativeInput(_))
        ));
    }

    #[test]
    fn factor_b_equal_validates_at_boundaries() {
        for (alpha, n) in [(int(0), 1), (int(1), 2), (rat(1, 3), 3)] {
            let b = build_b(&vec![alpha.clone(); n]).unwrap();
            let f = factor_b_equal(&alpha, n).unwrap();
            let report = b.validate_factorization(&f).unwrap();
            assert!(report.pass(), "alpha = {alpha}, n = {n}");
            assert_eq!(report.terms, 4);
        }
        assert!(matches!(
            factor_b_equal(&rat(3, 2), 1),
            Err(Error::AlphaOutOfRange(_))
        ));
        assert!(matches!(
            factor_b_equal(&int(-1), 1),
            Err(Error::AlphaOutOfRange(_))
        ));
    }

    #[test]
    fn wrap_gadget_smallest_case() {
        let a = crate::matrix::int_matrix(&[&[1]]);
        let b = crate::matrix::int_matrix(&[&[0]]);
        let c = crate::matrix::int_matrix(&[&[1]]);
        let g = wrap_gadget(&a, &b, &c, &int(1), 1).unwrap();
        assert_eq!((g.rows(), g.cols()), (6, 6));
        assert_eq!(g.row(1), vec![int(1); 6]);
        // The lower-right 4x4 block of the last four rows is B0.
        let tail = g.submatrix(&[2, 3, 4, 5], &[2, 3, 4, 5]).unwrap();
        assert_eq!(tail, build_b0());
    }

    #[test]
    fn wrap_gadget_requires_certified_rank_for_wide_b() {
        let a = crate::matrix::int_matrix(&[&[1, 1], &[1, 1]]);
        let b = crate::matrix::int_matrix(&[&[1, 0], &[0, 1]]);
        let c = crate::matrix::int_matrix(&[&[1, 1]]);
        assert!(matches!(
            wrap_gadget(&a, &b, &c, &int(1), 2),
            Err(Error::PreconditionNotCertified(_))
        ));
        // k = 1 never needs the certificate.
        let b1 = crate::matrix::int_matrix(&[&[1], &[0]]);
        assert!(wrap_gadget(&a, &b1, &c, &int(1), 2).is_ok());
    }

    #[test]
    fn eliminate_single_cell_variable() {
        let mut vars = BTreeMap::new();
        vars.insert("x".to_string(), int(1));
        let pm = PartialMatrix::new(1, 1, ScalarDomain::Rat, vec![var("x")], vars).unwrap();
        let (out, step) = eliminate_variable(&pm, "x", None).unwrap();
        assert_eq!((out.rows(), out.cols()), (5, 5));
        let m = out.into_exact().unwrap();
        assert_eq!(m, build_b(&[int(1)]).unwrap());
        assert_eq!(step.pivot_row, 0);
        assert_eq!(step.var_cols, vec![0]);
        assert_eq!(step.r_checked, None);
    }

    #[test]
    fn eliminate_agrees_with_wrap_gadget() {
        // A 2x2 block instance: A | B over c | x x with s = 1.
        let mut vars = BTreeMap::new();
        vars.insert("x".to_string(), int(1));
        let entries = vec![
            Entry::Const(int(1)),
            Entry::Const(int(2)),
            Entry::Const(int(3)),
            Entry::Const(int(1)),
            var("x"),
            var("x"),
        ];
        let pm = PartialMatrix::new(2, 3, ScalarDomain::Rat, entries, vars).unwrap();
        let (out, step) = eliminate_variable(&pm, "x", Some(1)).unwrap();
        assert_eq!(step.r_checked, Some(1));
        let a = crate::matrix::int_matrix(&[&[1]]);
        let b = crate::matrix::int_matrix(&[&[2, 3]]);
        let c = crate::matrix::int_matrix(&[&[1]]);
        let g = wrap_gadget(&a, &b, &c, &int(1), 1).unwrap();
        assert_eq!(out.into_exact().unwrap(), g);
    }

    #[test]
    fn variable_spanning_rows_rejected() {
        let mut vars = BTreeMap::new();
        vars.insert("x".to_string(), int(1));
        let entries = vec![var("x"), Entry::Const(int(0)), Entry::Const(int(0)), var("x")];
        let pm = PartialMatrix::new(2, 2, ScalarDomain::Rat, entries, vars).unwrap();
        assert!(matches!(
            eliminate_variable(&pm, "x", None),
            Err(Error::VarSpansMultipleRows(_))
        ));
    }

    #[test]
    fn lift_empty_factorization_through_k1_step() {
        let mut vars = BTreeMap::new();
        vars.insert("x".to_string(), int(1));
        let pm = PartialMatrix::new(1, 1, ScalarDomain::Rat, vec![var("x")], vars).unwrap();
        let (out, step) = eliminate_variable(&pm, "x", None).unwrap();
        // Complete the 1x1 matrix with xi = s = 1; the inner factorization
        // is the single term [1] x [1].
        let pre = crate::matrix::int_matrix(&[&[1]]);
        let inner = NNFactorization::new(
            1,
            1,
            ScalarDomain::Rat,
            vec![RankOneTerm {
                u: vec![int(1)],
                v: vec![int(1)],
            }],
        )
        .unwrap();
        let lifted = lift_factorization(&inner, &pre, &step, &int(1)).unwrap();
        assert_eq!(lifted.terms.len(), 5);
        let post = out.into_exact().unwrap();
        assert!(post.validate_factorization(&lifted).unwrap().pass());
    }

    #[test]
    fn lift_rejects_xi_out_of_range() {
        let mut vars = BTreeMap::new();
        vars.insert("x".to_string(), int(1));
        let pm = PartialMatrix::new(1, 1, ScalarDomain::Rat, vec![var("x")], vars).unwrap();
        let (_, step) = eliminate_variable(&pm, "x", None).unwrap();
        let pre = crate::matrix::int_matrix(&[&[2]]);
        let inner = NNFactorization::new(1, 1, ScalarDomain::Rat, vec![]).unwrap();
        assert!(matches!(
            lift_factorization(&inner, &pre, &step, &int(2)),
            Err(Error::XiOutOfRange(_))
        ));
    }

    #[test]
    fn elimination_order_gives_permutation_equivalent_results() {
        let mut vars = BTreeMap::new();
        vars.insert("x".to_string(), int(1));
        vars.insert("y".to_string(), int(1));
        let entries = vec![
            var("x"),
            Entry::Const(int(1)),
            Entry::Const(int(1)),
            var("y"),
        ];
        let pm = PartialMatrix::new(2, 2, ScalarDomain::Rat, entries, vars).unwrap();
        let run = |order: [&str; 2]| {
            let mut p = pm.clone();
            for v in order {
                p = eliminate_variable(&p, v, None).unwrap().0;
            }
            p.into_exact().unwrap()
        };
        let m_xy = run(["x", "y"]);
        let m_yx = run(["y", "x"]);
        let found = m_xy.permutation_equivalent(&m_yx).unwrap();
        assert!(found.is_some());
        let (rp, cp) = found.unwrap();
        assert_eq!(m_xy.permute(&rp, &cp).unwrap(), m_yx);
    }

    #[test]
    fn replay_trace_round_trip() {
        let mut vars = BTreeMap::new();
        vars.insert("x".to_string(), int(1));
        let pm = PartialMatrix::new(1, 1, ScalarDomain::Rat, vec![var("x")], vars).unwrap();
        let (out, step) = eliminate_variable(&pm, "x", None).unwrap();
        let trace = GadgetTrace {
            initial_rows: 1,
            initial_cols: 1,
            steps: vec![step],
        };
        let replayed = replay_trace(&pm, &trace).unwrap();
        assert_eq!(replayed, out.into_exact().unwrap());

        // Empty trace on a constant matrix returns it unchanged.
        let constant = PartialMatrix::new(
            1,
            1,
            ScalarDomain::Rat,
            vec![Entry::Const(int(7))],
            BTreeMap::new(),
        )
        .unwrap();
        let empty = GadgetTrace {
            initial_rows: 1,
            initial_cols: 1,
            steps: vec![],
        };
        assert_eq!(
            replay_trace(&constant, &empty).unwrap(),
            crate::matrix::int_matrix(&[&[7]])
        );
    }

    #[test]
    fn partial_and_trace_files_round_trip() {
        let mut vars = BTreeMap::new();
        vars.insert("x".to_string(), int(1));
        let entries = vec![
            Entry::Const(int(1)),
            var("x"),
            var("x"),
            Entry::Const(int(2)),
            Entry::Const(int(0)),
            Entry::Const(rat(1, 2)),
        ];
        let pm = PartialMatrix::new(2, 3, ScalarDomain::Rat, entries, vars).unwrap();
        let text = format_partial(&pm);
        assert_eq!(parse_partial(&text).unwrap(), pm);

        let (_, step) = eliminate_variable(&pm, "x", Some(1)).unwrap();
        let trace = GadgetTrace {
            initial_rows: 2,
            initial_cols: 3,
            steps: vec![step.clone()],
        };
        let text = format_trace(&trace);
        let parsed = parse_trace_steps(&text, ScalarDomain::Rat).unwrap();
        assert_eq!(parsed.len(), 1);
        assert_eq!(parsed[0].var, step.var);
        assert_eq!(parsed[0].var_cols, step.var_cols);
        assert_eq!(parsed[0].pivot_row, step.pivot_row);
        assert_eq!(parsed[0].r_checked, step.r_checked);
    }
}
