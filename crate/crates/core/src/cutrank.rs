//! Cut-rank, bi-cut-rank and the connectivity function of the partitioned
//! matroid built from `(I | M_G)`.

use std::cell::RefCell;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::field::{Elem, Sesquimorphism};
use crate::graph::{ColoredGraph, SigmaGraph};
use crate::matrix::rank_in_place;

/// A vertex subset as a bitmask over vertex indices.
pub type VSet = u64;

/// Largest graph a [`VSet`] can index.
pub const MAX_VERTICES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CutKind {
    /// `rk M[X][V-X]`; requires a sigma-symmetric graph.
    CutRank,
    /// `rk M[X][V-X] + rk M[V-X][X]`.
    BiCutRank,
    /// Connectivity of the partitioned matroid on `(I | M)` with classes `{x, x'}`.
    MatroidLambda,
}

impl CutKind {
    pub fn name(self) -> &'static str {
        match self {
            CutKind::CutRank => "cutrk",
            CutKind::BiCutRank => "bicutrk",
            CutKind::MatroidLambda => "lambda",
        }
    }

    pub fn parse(s: &str) -> Option<CutKind> {
        match s {
            "cutrk" | "rank" => Some(CutKind::CutRank),
            "bicutrk" | "birank" => Some(CutKind::BiCutRank),
            "lambda" => Some(CutKind::MatroidLambda),
            _ => None,
        }
    }
}

pub fn full_set(n: usize) -> VSet {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub fn set_of(xs: &[usize]) -> VSet {
    xs.iter().fold(0, |m, &x| m | (1 << x))
}

pub fn members(mut s: VSet) -> Vec<usize> {
    let mut out = Vec::with_capacity(s.count_ones() as usize);
    while s != 0 {
        out.push(s.trailing_zeros() as usize);
        s &= s - 1;
    }
    out
}

/// `rk M[A][B]` for bitmasks `A` and `B`.
pub fn block_rank(g: &ColoredGraph, a: VSet, b: VSet) -> usize {
    let rows = members(a);
    let cols = members(b);
    if rows.is_empty() || cols.is_empty() {
        return 0;
    }
    let mut buf: Vec<Elem> = Vec::with_capacity(rows.len() * cols.len());
    for &x in &rows {
        for &y in &cols {
            buf.push(g.get(x, y));
        }
    }
    rank_in_place(g.field(), &mut buf, rows.len(), cols.len())
}

/// A symmetric submodular function on the vertex subsets of a graph,
/// memoized by bitmask. The cache is owned by this value.
pub struct CutFunction<'g> {
    graph: &'g ColoredGraph,
    kind: CutKind,
    full: VSet,
    memo: RefCell<HashMap<VSet, u32>>,
}

impl<'g> CutFunction<'g> {
    /// Cut-rank with respect to `sigma`; refuses graphs that are not sigma-symmetric.
    pub fn cutrk(graph: &'g ColoredGraph, sigma: &Sesquimorphism) -> Result<Self> {
        if !graph.is_sigma_symmetric(sigma)? {
            return Err(Error::NotSigmaSymmetric);
        }
        Self::unchecked(graph, CutKind::CutRank)
    }

    pub fn for_sigma_graph(g: &'g SigmaGraph) -> Self {
        Self::unchecked(g.graph(), CutKind::CutRank).expect("size checked by caller")
    }

    pub fn bicutrk(graph: &'g ColoredGraph) -> Result<Self> {
        Self::unchecked(graph, CutKind::BiCutRank)
    }

    pub fn matroid_lambda(graph: &'g ColoredGraph) -> Result<Self> {
        Self::unchecked(graph, CutKind::MatroidLambda)
    }

    /// Builds the function of the given kind without any symmetry check.
    pub fn of_kind(graph: &'g ColoredGraph, kind: CutKind) -> Result<Self> {
        Self::unchecked(graph, kind)
    }

    fn unchecked(graph: &'g ColoredGraph, kind: CutKind) -> Result<Self> {
        if graph.n() > MAX_VERTICES {
            return Err(Error::SizeBound {
                what: "cut function",
                max: MAX_VERTICES,
                got: graph.n(),
            });
        }
        Ok(CutFunction {
            graph,
            kind,
            full: full_set(graph.n()),
            memo: RefCell::new(HashMap::new()),
        })
    }

    /// Builds the function of the given kind, checking sigma-symmetry for cut-rank.
    pub fn new(graph: &'g ColoredGraph, kind: CutKind, sigma: Option<&Sesquimorphism>) -> Result<Self> {
        match (kind, sigma) {
            (CutKind::CutRank, Some(s)) => Self::cutrk(graph, s),
            (CutKind::CutRank, None) => Err(Error::Unsupported(
                "cut-rank needs a sesqui-morphism".into(),
            )),
            (k, _) => Self::unchecked(graph, k),
        }
    }

    pub fn graph(&self) -> &ColoredGraph {
        self.graph
    }

    pub fn kind(&self) -> CutKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn full(&self) -> VSet {
        self.full
    }

    /// `f(X)`.
    pub fn eval(&self, x: VSet) -> u32 {
        let x = x & self.full;
        // symmetric: key on the side without the top vertex
        let key = if self.n() > 0 && x >> (self.n() - 1) & 1 == 1 {
            self.full & !x
        } else {
            x
        };
        if let Some(&v) = self.memo.borrow().get(&key) {
            return v;
        }
        let v = self.compute(key);
        self.memo.borrow_mut().insert(key, v);
        v
    }

    /// `f(X)` computed from scratch, bypassing the cache and the symmetric
    /// folding it relies on. Used when symmetry itself is under test.
    pub fn eval_direct(&self, x: VSet) -> u32 {
        self.compute(x & self.full)
    }

    /// A fresh function on the same graph with an empty cache.
    pub fn fork(&self) -> CutFunction<'g> {
        CutFunction {
            graph: self.graph,
            kind: self.kind,
            full: self.full,
            memo: RefCell::new(HashMap::new()),
        }
    }

    fn compute(&self, x: VSet) -> u32 {
        let y = self.full & !x;
        let g = self.graph;
        match self.kind {
            CutKind::CutRank => block_rank(g, x, y) as u32,
            CutKind::BiCutRank => (block_rank(g, x, y) + block_rank(g, y, x)) as u32,
            CutKind::MatroidLambda => matroid_connectivity(g, x) as u32,
        }
    }

    /// `f` of a vertex subset given by indices; errors on unknown vertices.
    pub fn eval_indices(&self, xs: &[usize]) -> Result<u32> {
        if let Some(&bad) = xs.iter().find(|&&x| x >= self.n()) {
            return Err(Error::UnknownVertex(bad.to_string()));
        }
        Ok(self.eval(set_of(xs)))
    }

    pub fn eval_labels<S: AsRef<str>>(&self, xs: &[S]) -> Result<u32> {
        let idx = xs
            .iter()
            .map(|l| self.graph.index_of(l.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.eval(set_of(&idx)))
    }

    /// A lower bound on `f(X)` for every `X` with `A ⊆ X` and `B ∩ X = ∅`,
    /// valid because ranks only grow when rows and columns are added.
    pub fn partial(&self, a: VSet, b: VSet) -> u32 {
        if a | b == self.full {
            return self.eval(a);
        }
        let g = self.graph;
        match self.kind {
            CutKind::CutRank => block_rank(g, a, b) as u32,
            CutKind::BiCutRank => (block_rank(g, a, b) + block_rank(g, b, a)) as u32,
            CutKind::MatroidLambda => (block_rank(g, a, b) + block_rank(g, b, a)) as u32 + 1,
        }
    }

    pub fn cache_len(&self) -> usize {
        self.memo.borrow().len()
    }
}

/// `r(X ∪ X') + r((V-X) ∪ (V-X)') - r(V ∪ V') + 1` in the matroid of columns
/// of `(I | M_G)`, where `x` indexes the identity column and `x'` column `x` of `M_G`.
fn matroid_connectivity(g: &ColoredGraph, x: VSet) -> usize {
    let n = g.n();
    let full = full_set(n);
    let column = |j: usize| -> Vec<Elem> {
        if j < n {
            (0..n).map(|i| Elem::from(i == j)).collect()
        } else {
            (0..n).map(|i| g.get(i, j - n)).collect()
        }
    };
    let rank_of = |cols: &[usize]| -> usize {
        if cols.is_empty() || n == 0 {
            return 0;
        }
        // rows of the buffer are the chosen columns
        let mut buf = Vec::with_capacity(cols.len() * n);
        for &j in cols {
            buf.extend(column(j));
        }
        rank_in_place(g.field(), &mut buf, cols.len(), n)
    };
    let side = |s: VSet| -> Vec<usize> {
        let m = members(s);
        m.iter().copied().chain(m.iter().map(|&v| v + n)).collect()
    };
    let all: Vec<usize> = (0..2 * n).collect();
    rank_of(&side(x)) + rank_of(&side(full & !x)) + 1 - rank_of(&all)
}
