//! Graph -> matrix reduction: the partial 0-1 matrix of a graph, exact
//! minimum clique covers, completions built from covers, clique extraction
//! from factorizations, and the full reduction to a constant matrix whose
//! nonnegative rank encodes the clique covering number.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::gadgets::{
    eliminate_variable, lift_through_trace, Entry, GadgetStep, GadgetTrace, PartialMatrix,
};
use crate::matrix::{ExactMatrix, NNFactorization, RankOneTerm};
use crate::scalar::{ExactScalar, ScalarDomain};
use crate::Error;

/// Largest vertex count accepted by the exact clique-cover search.
pub const DEFAULT_VERTEX_LIMIT: usize = 16;

/// Simple graph on vertices `0..n`; edges stored as ordered pairs `u < v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edge_list: &[(usize, usize)]) -> Result<Self, Error> {
        let mut edges = BTreeSet::new();
        for &(u, v) in edge_list {
            if u == v {
                return Err(Error::LoopEdge(u));
            }
            if u >= n || v >= n {
                return Err(Error::MalformedGraph(format!(
                    "edge ({u}, {v}) out of range for {n} vertices"
                )));
            }
            let e = (u.min(v), u.max(v));
            if !edges.insert(e) {
                return Err(Error::MalformedGraph(format!(
                    "duplicate edge ({}, {})",
                    e.0, e.1
                )));
            }
        }
        Ok(Graph { n, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        u != v && self.edges.contains(&(u.min(v), u.max(v)))
    }
}

/// A list of cliques covering the vertex set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueCover {
    pub cliques: Vec<BTreeSet<usize>>,
}

/// `graph <n>` then one `u v` pair per line.
pub fn parse_graph(text: &str) -> Result<Graph, Error> {
    let bad = |msg: &str| Error::MalformedGraph(msg.into());
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| bad("empty file"))?;
    let mut head = header.split_whitespace();
    if head.next() != Some("graph") {
        return Err(bad("missing `graph` header"));
    }
    let n: usize = head
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| bad("bad vertex count"))?;
    if head.next().is_some() {
        return Err(bad("trailing tokens in header"));
    }
    let mut edge_list = Vec::new();
    for line in lines {
        let mut parts = line.split_whitespace();
        let u: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad("bad edge line"))?;
        let v: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad("bad edge line"))?;
        if parts.next().is_some() {
            return Err(bad("trailing tokens on edge line"));
        }
        edge_list.push((u, v));
    }
    Graph::new(n, &edge_list)
}

pub fn format_graph(g: &Graph) -> String {
    let mut out = format!("graph {}\n", g.n());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

fn var_name(u: usize, v: usize) -> String {
    format!("x_{u}_{v}")
}

/// The partial 0-1 matrix of a graph: ones on the diagonal, a variable
/// with interval [0, 1] at each ordered adjacent pair, zeros elsewhere.
/// `x_u_v` and `x_v_u` are independent variables.
pub fn build_partial_01(g: &Graph) -> PartialMatrix {
    let n = g.n();
    let mut vars = BTreeMap::new();
    let mut entries = Vec::with_capacity(n * n);
    for u in 0..n {
        for v in 0..n {
            if u == v {
                entries.push(Entry::Const(crate::scalar::int(1)));
            } else if g.adjacent(u, v) {
                let name = var_name(u, v);
                vars.insert(name.clone(), crate::scalar::int(1));
                entries.push(Entry::Var(name));
            } else {
                entries.push(Entry::Const(crate::scalar::int(0)));
            }
        }
    }
    PartialMatrix::new(n, n, ScalarDomain::Rat, entries, vars)
        .expect("partial 0-1 matrix is well formed")
}

/// Exact minimum clique cover via branch-and-bound coloring of the
/// complement graph. Deterministic: vertices are processed in index order
/// and colors tried lowest first.
pub fn clique_cover_number(g: &Graph) -> Result<(usize, CliqueCover), Error> {
    clique_cover_number_with_limit(g, DEFAULT_VERTEX_LIMIT)
}

pub fn clique_cover_number_with_limit(
    g: &Graph,
    limit: usize,
) -> Result<(usize, CliqueCover), Error> {
    let n = g.n();
    if n > limit {
        return Err(Error::TooLarge(format!(
            "{n} vertices exceeds the limit {limit}"
        )));
    }
    if n == 0 {
        return Ok((0, CliqueCover { cliques: vec![] }));
    }
    // Conflict graph = complement of g; a proper coloring of it is a
    // clique partition of g.
    let conflict: Vec<Vec<bool>> = (0..n)
        .map(|u| (0..n).map(|v| u != v && !g.adjacent(u, v)).collect())
        .collect();

    fn color_with(
        conflict: &[Vec<bool>],
        k: usize,
        colors: &mut Vec<usize>,
        next: usize,
        max_used: usize,
    ) -> bool {
        let n = conflict.len();
        if next == n {
            return true;
        }
        // Trying at most one brand-new color breaks color symmetry.
        for c in 0..k.min(max_used + 2) {
            if (0..next).any(|v| conflict[next][v] && colors[v] == c) {
                continue;
            }
            colors[next] = c;
            if color_with(conflict, k, colors, next + 1, max_used.max(c)) {
                return true;
            }
        }
        colors[next] = usize::MAX;
        false
    }

    for k in 1..=n {
        let mut colors = vec![usize::MAX; n];
        if color_with(&conflict, k, &mut colors, 0, 0) {
            let mut cliques: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); k];
            for (v, &c) in colors.iter().enumerate() {
                cliques[c].insert(v);
            }
            cliques.retain(|c| !c.is_empty());
            let count = cliques.len();
            return Ok((count, CliqueCover { cliques }));
        }
    }
    unreachable!("n colors always suffice")
}

fn check_cover(g: &Graph, cover: &CliqueCover) -> Result<(), Error> {
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    for clique in &cover.cliques {
        for &v in clique {
            if v >= g.n() {
                return Err(Error::InvalidCover(format!("vertex {v} out of range")));
            }
            seen.insert(v);
        }
        for &u in clique {
            for &v in clique {
                if u < v && !g.adjacent(u, v) {
                    return Err(Error::InvalidCover(format!(
                        "vertices {u} and {v} are not adjacent"
                    )));
                }
            }
        }
    }
    if seen.len() != g.n() {
        return Err(Error::InvalidCover("cover misses a vertex".into()));
    }
    Ok(())
}

/// Disjointifies the cover (each vertex goes to its first containing
/// clique) and builds the 0/1 completion together with its rank-one
/// factorization: one indicator term per clique.
pub fn cover_to_completion(
    g: &Graph,
    cover: &CliqueCover,
) -> Result<(ExactMatrix, NNFactorization), Error> {
    check_cover(g, cover)?;
    let n = g.n();
    let mut assigned = vec![usize::MAX; n];
    for (i, clique) in cover.cliques.iter().enumerate() {
        for &v in clique {
            if assigned[v] == usize::MAX {
                assigned[v] = i;
            }
        }
    }
    let terms: Vec<RankOneTerm> = (0..cover.cliques.len())
        .map(|i| {
            let indicator: Vec<ExactScalar> = (0..n)
                .map(|v| crate::scalar::int(if assigned[v] == i { 1 } else { 0 }))
                .collect();
            RankOneTerm {
                u: indicator.clone(),
                v: indicator,
            }
        })
        .collect();
    let f = NNFactorization::new(n, n, ScalarDomain::Rat, terms)?;
    let m = f.sum()?;
    Ok((m, f))
}

/// Reads the cliques back off a factorization of a completion: vertex `v`
/// belongs to term `l` when the `(v, v)` entry of the term is positive.
pub fn extract_cliques(f: &NNFactorization, g: &Graph) -> Result<CliqueCover, Error> {
    if f.rows != g.n() || f.cols != g.n() {
        return Err(Error::DimMismatch(format!(
            "factorization is {}x{}, graph has {} vertices",
            f.rows,
            f.cols,
            g.n()
        )));
    }
    let mut cliques = Vec::new();
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    for term in &f.terms {
        let members: BTreeSet<usize> = (0..g.n())
            .filter(|&v| (&term.u[v] * &term.v[v]).sign() > 0)
            .collect();
        for &u in &members {
            for &v in &members {
                if u < v && !g.adjacent(u, v) {
                    return Err(Error::NotAClique(u, v));
                }
            }
        }
        if !members.is_empty() {
            seen.extend(members.iter().copied());
            cliques.push(members);
        }
    }
    if seen.len() != g.n() {
        return Err(Error::NotACover);
    }
    Ok(CliqueCover { cliques })
}

fn eliminate_all(pm0: &PartialMatrix) -> Result<(ExactMatrix, GadgetTrace), Error> {
    let trace_start = (pm0.rows(), pm0.cols());
    let mut pm = pm0.clone();
    let mut steps: Vec<GadgetStep> = Vec::new();
    // Lexicographic variable order for deterministic golden output.
    for name in pm0.var_names() {
        let (next, step) = eliminate_variable(&pm, &name, None)?;
        steps.push(step);
        pm = next;
    }
    let m = pm.into_exact()?;
    Ok((
        m,
        GadgetTrace {
            initial_rows: trace_start.0,
            initial_cols: trace_start.1,
            steps,
        },
    ))
}

/// Full reduction: eliminates all `t = 2|E|` variables of the partial 0-1
/// matrix, producing an `(n+4t) x (n+4t)` constant matrix whose
/// nonnegative rank is the clique covering number plus `4t`.
pub fn reduce_graph(g: &Graph) -> Result<(ExactMatrix, GadgetTrace, usize), Error> {
    let (cc, _) = clique_cover_number(g)?;
    let pm = build_partial_01(g);
    let (m, trace) = eliminate_all(&pm)?;
    let predicted = cc + 4 * trace.steps.len();
    Ok((m, trace, predicted))
}

/// The machine-checked upper-bound half of the reduction: the minimum
/// cover's completion factorization lifted through every elimination.
/// The result has exactly `cc(G) + 4t` terms and validates against the
/// reduced matrix.
pub fn certify_reduction_ub(g: &Graph) -> Result<NNFactorization, Error> {
    let (_, cover) = clique_cover_number(g)?;
    let (completion, inner) = cover_to_completion(g, &cover)?;
    let pm = build_partial_01(g);
    let (_, trace) = eliminate_all(&pm)?;
    let mut assignment: BTreeMap<String, ExactScalar> = BTreeMap::new();
    for u in 0..g.n() {
        for v in 0..g.n() {
            if g.adjacent(u, v) {
                assignment.insert(var_name(u, v), completion.get(u, v).clone());
            }
        }
    }
    lift_through_trace(&pm, &trace, &assignment, inner)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    fn four_cycle() -> Graph {
        Graph::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap()
    }

    /// Exact minimum clique cover by enumerating set partitions; the
    /// independent oracle for the branch-and-bound search.
    pub(crate) fn clique_cover_brute(g: &Graph) -> usize {
        fn rec(g: &Graph, v: usize, blocks: &mut Vec<Vec<usize>>, best: &mut usize) {
            if blocks.len() >= *best {
                return;
            }
            if v == g.n() {
                *best = (*best).min(blocks.len());
                return;
            }
            for i in 0..blocks.len() {
                if blocks[i].iter().all(|&u| g.adjacent(u, v)) {
                    blocks[i].push(v);
                    rec(g, v + 1, blocks, best);
                    blocks[i].pop();
                }
            }
            blocks.push(vec![v]);
            rec(g, v + 1, blocks, best);
            blocks.pop();
        }
        if g.n() == 0 {
            return 0;
        }
        let mut best = g.n();
        rec(g, 0, &mut Vec::new(), &mut best);
        best
    }

    #[test]
    fn parse_examples() {
        let t = parse_graph("graph 3\n0 1\n1 2\n0 2\n").unwrap();
        assert_eq!(t, triangle());
        assert!(matches!(parse_graph("graph 2\n0 0\n"), Err(Error::LoopEdge(0))));
        let c4 = parse_graph("graph 4\n0 1\n1 2\n2 3\n3 0\n").unwrap();
        assert_eq!(c4, four_cycle());
        assert!(parse_graph("graph 2\n0 1\n1 0\n").is_err()); // duplicate
        assert_eq!(parse_graph(&format_graph(&c4)).unwrap(), c4);
    }

    #[test]
    fn partial_01_shapes() {
        let single = Graph::new(2, &[(0, 1)]).unwrap();
        let pm = build_partial_01(&single);
        assert_eq!(pm.get(0, 0), &Entry::Const(crate::scalar::int(1)));
        assert_eq!(pm.get(0, 1), &Entry::Var("x_0_1".into()));
        assert_eq!(pm.get(1, 0), &Entry::Var("x_1_0".into()));
        assert_eq!(pm.vars().len(), 2);

        let edgeless = Graph::new(3, &[]).unwrap();
        let pm = build_partial_01(&edgeless);
        assert!(pm.vars().is_empty());
        assert_eq!(
            pm.into_exact().unwrap(),
            crate::matrix::int_matrix(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]])
        );

        assert_eq!(build_partial_01(&triangle()).vars().len(), 6);
    }

    #[test]
    fn clique_cover_examples() {
        assert_eq!(clique_cover_number(&triangle()).unwrap().0, 1);
        assert_eq!(clique_cover_number(&four_cycle()).unwrap().0, 2);
        let path = Graph::new(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(clique_cover_number(&path).unwrap().0, 2);
        let big = Graph::new(DEFAULT_VERTEX_LIMIT + 1, &[]).unwrap();
        assert!(matches!(
            clique_cover_number(&big),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn clique_cover_matches_brute_force_on_small_graphs() {
        // All graphs on 4 vertices.
        let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        for mask in 0u32..64 {
            let edges: Vec<_> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &e)| e)
                .collect();
            let g = Graph::new(4, &edges).unwrap();
            let (cc, cover) = clique_cover_number(&g).unwrap();
            assert_eq!(cc, clique_cover_brute(&g), "mask {mask}");
            check_cover(&g, &cover).unwrap();
            assert_eq!(cover.cliques.len(), cc);
        }
    }

    #[test]
    fn cover_completion_examples() {
        let (m, f) = cover_to_completion(
            &triangle(),
            &CliqueCover {
                cliques: vec![[0, 1, 2].into_iter().collect()],
            },
        )
        .unwrap();
        assert_eq!(m, crate::matrix::int_matrix(&[&[1, 1, 1], &[1, 1, 1], &[1, 1, 1]]));
        assert_eq!(f.terms.len(), 1);

        let (m, f) = cover_to_completion(
            &four_cycle(),
            &CliqueCover {
                cliques: vec![[0, 1].into_iter().collect(), [2, 3].into_iter().collect()],
            },
        )
        .unwrap();
        assert_eq!(
            m,
            crate::matrix::int_matrix(&[
                &[1, 1, 0, 0],
                &[1, 1, 0, 0],
                &[0, 0, 1, 1],
                &[0, 0, 1, 1]
            ])
        );
        assert_eq!(f.terms.len(), 2);

        let edgeless = Graph::new(2, &[]).unwrap();
        let (m, f) = cover_to_completion(
            &edgeless,
            &CliqueCover {
                cliques: vec![[0].into_iter().collect(), [1].into_iter().collect()],
            },
        )
        .unwrap();
        assert_eq!(m, crate::matrix::int_matrix(&[&[1, 0], &[0, 1]]));
        assert_eq!(f.terms.len(), 2);

        assert!(matches!(
            cover_to_completion(
                &four_cycle(),
                &CliqueCover {
                    cliques: vec![[0, 1, 2, 3].into_iter().collect()],
                }
            ),
            Err(Error::InvalidCover(_))
        ));
    }

    #[test]
    fn extract_round_trips() {
        for (g, cover) in [
            (
                triangle(),
                CliqueCover {
                    cliques: vec![[0, 1, 2].into_iter().collect()],
                },
            ),
            (
                four_cycle(),
                CliqueCover {
                    cliques: vec![[0, 1].into_iter().collect(), [2, 3].into_iter().collect()],
                },
            ),
        ] {
            let (_, f) = cover_to_completion(&g, &cover).unwrap();
            assert_eq!(extract_cliques(&f, &g).unwrap(), cover);
        }
    }

    #[test]
    fn extract_rejects_non_clique_terms() {
        let g = Graph::new(3, &[(0, 1)]).unwrap(); // 0-2 non-adjacent
        let ind: Vec<ExactScalar> = vec![
            crate::scalar::int(1),
            crate::scalar::int(0),
            crate::scalar::int(1),
        ];
        let f = NNFactorization::new(
            3,
            3,
            ScalarDomain::Rat,
            vec![RankOneTerm {
                u: ind.clone(),
                v: ind,
            }],
        )
        .unwrap();
        assert!(matches!(
            extract_cliques(&f, &g),
            Err(Error::NotAClique(0, 2))
        ));
    }

    #[test]
    fn reduce_examples() {
        let edgeless = Graph::new(2, &[]).unwrap();
        let (m, trace, predicted) = reduce_graph(&edgeless).unwrap();
        assert_eq!(m, crate::matrix::int_matrix(&[&[1, 0], &[0, 1]]));
        assert!(trace.steps.is_empty());
        assert_eq!(predicted, 2);

        let single = Graph::new(2, &[(0, 1)]).unwrap();
        let (m, trace, predicted) = reduce_graph(&single).unwrap();
        assert_eq!((m.rows(), m.cols()), (10, 10));
        assert_eq!(trace.steps.len(), 2);
        assert_eq!(predicted, 9);

        let (m, trace, predicted) = reduce_graph(&four_cycle()).unwrap();
        assert_eq!((m.rows(), m.cols()), (36, 36));
        assert_eq!(trace.steps.len(), 8);
        assert_eq!(predicted, 34);
    }

    #[test]
    fn certify_examples() {
        let single = Graph::new(2, &[(0, 1)]).unwrap();
        let f = certify_reduction_ub(&single).unwrap();
        assert_eq!(f.terms.len(), 9);
        let (m, _, _) = reduce_graph(&single).unwrap();
        assert!(m.validate_factorization(&f).unwrap().pass());

        let f = certify_reduction_ub(&triangle()).unwrap();
        assert_eq!(f.terms.len(), 25);
        let (m, _, _) = reduce_graph(&triangle()).unwrap();
        assert!(m.validate_factorization(&f).unwrap().pass());

        let edgeless = Graph::new(3, &[]).unwrap();
        let f = certify_reduction_ub(&edgeless).unwrap();
        assert_eq!(f.terms.len(), 3);
    }
}
