//! Terms over bilinear products: evaluation to colored graphs, syntactic
//! layouts, and compilation of a layout into a term.
//!
//! A rank term evaluates to a sigma-symmetric graph whose vertices carry
//! color vectors `γ(x)`; a product joins `x` on the left and `y` on the right
//! with color `γ(x)·M·σ(γ(y))ᵀ`. Bi-rank terms carry two colorings `γ⁺`,
//! `γ⁻` and arcs in each direction from separate matrices.

use std::fmt::Write as _;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::field::{Elem, Field, Sesquimorphism};
use crate::graph::{default_labels, ColoredGraph, SigmaGraph};
use crate::layout::{Layout, Rooted};
use crate::matrix::FMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RankTerm {
    Const(Vec<Elem>),
    Prod {
        m: FMatrix,
        n: FMatrix,
        p: FMatrix,
        left: Box<RankTerm>,
        right: Box<RankTerm>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BiRankTerm {
    Const {
        plus: Vec<Elem>,
        minus: Vec<Elem>,
    },
    /// `m1` is `k1 x l2` and `m2` is `k2 x l1` for a left operand with
    /// widths `(k1, k2)` and a right operand with widths `(l1, l2)`.
    Prod {
        m1: FMatrix,
        m2: FMatrix,
        n1: FMatrix,
        n2: FMatrix,
        p1: FMatrix,
        p2: FMatrix,
        left: Box<BiRankTerm>,
        right: Box<BiRankTerm>,
    },
}

/// A graph with one color vector per vertex (the rows of `gamma`).
#[derive(Clone, Debug)]
pub struct VColoredGraph {
    pub graph: SigmaGraph,
    pub gamma: FMatrix,
}

#[derive(Clone, Debug)]
pub struct BiColoredGraph {
    pub graph: ColoredGraph,
    pub gamma_plus: FMatrix,
    pub gamma_minus: FMatrix,
}

/// Coloring of one subterm; its vertices are a contiguous range in leaf order.
#[derive(Clone, Debug)]
pub struct SubtermColoring {
    pub vertices: Range<usize>,
    pub gammas: Vec<FMatrix>,
}

/// A term together with the graph vertex behind each of its leaves.
#[derive(Clone, Debug)]
pub struct Compiled<T> {
    pub term: T,
    /// `leaf_vertices[i]` is the vertex of the input graph at leaf `i`.
    pub leaf_vertices: Vec<usize>,
}

fn dim_err(what: impl Into<String>) -> Error {
    Error::DimensionMismatch(what.into())
}

fn expect_shape(m: &FMatrix, field: &Field, r: usize, c: usize, name: &str) -> Result<()> {
    if m.field() != field {
        return Err(Error::FieldMismatch);
    }
    if m.shape() != (r, c) {
        return Err(dim_err(format!(
            "{name} is {}x{}, expected {r}x{c}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// Dense adjacency under construction.
struct Block {
    n: usize,
    adj: Vec<Elem>,
}

impl Block {
    fn single() -> Self {
        Block { n: 1, adj: vec![0] }
    }

    fn join(a: Block, b: Block) -> Self {
        let n = a.n + b.n;
        let mut adj = vec![0; n * n];
        for i in 0..a.n {
            adj[i * n..i * n + a.n].copy_from_slice(&a.adj[i * a.n..(i + 1) * a.n]);
        }
        for i in 0..b.n {
            let r = (a.n + i) * n + a.n;
            adj[r..r + b.n].copy_from_slice(&b.adj[i * b.n..(i + 1) * b.n]);
        }
        Block { n, adj }
    }

    fn into_graph(self, field: &Field) -> ColoredGraph {
        let m = FMatrix::from_rows(field, self.n, self.n, self.adj).expect("square");
        ColoredGraph::from_matrix(default_labels(self.n), m).expect("products leave the diagonal zero")
    }
}

fn row_times(f: &Field, v: &[Elem], m: &FMatrix) -> Vec<Elem> {
    (0..m.ncols())
        .map(|j| v.iter().enumerate().fold(0, |acc, (i, &a)| f.add(acc, f.mul(a, m.get(i, j)))))
        .collect()
}

fn dot(f: &Field, a: &[Elem], b: &[Elem]) -> Elem {
    a.iter().zip(b).fold(0, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
}

impl RankTerm {
    pub fn constant(u: Vec<Elem>) -> Self {
        RankTerm::Const(u)
    }

    pub fn prod(m: FMatrix, n: FMatrix, p: FMatrix, left: RankTerm, right: RankTerm) -> Self {
        RankTerm::Prod {
            m,
            n,
            p,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            RankTerm::Const(_) => 1,
            RankTerm::Prod { left, right, .. } => left.leaf_count() + right.leaf_count(),
        }
    }

    /// Largest dimension of any constant or matrix in the term.
    pub fn max_width(&self) -> usize {
        match self {
            RankTerm::Const(u) => u.len(),
            RankTerm::Prod { m, n, p, left, right } => [m.nrows(), m.ncols(), n.ncols(), p.ncols()]
                .into_iter()
                .chain([left.max_width(), right.max_width()])
                .max()
                .unwrap_or(0),
        }
    }

    /// Width of the coloring produced by the term.
    pub fn width(&self) -> usize {
        match self {
            RankTerm::Const(u) => u.len(),
            RankTerm::Prod { n, .. } => n.ncols(),
        }
    }

    pub fn eval(&self, sigma: &Sesquimorphism) -> Result<VColoredGraph> {
        self.eval_traced(sigma).map(|(g, _)| g)
    }

    /// Evaluates and also returns the coloring of every subterm in post-order.
    pub fn eval_traced(&self, sigma: &Sesquimorphism) -> Result<(VColoredGraph, Vec<SubtermColoring>)> {
        let f = sigma.field();
        let mut trace = Vec::new();
        let (block, gamma) = self.eval_rec(sigma, 0, &mut trace)?;
        let graph = SigmaGraph::new_unchecked(block.into_graph(f), sigma.clone());
        Ok((VColoredGraph { graph, gamma }, trace))
    }

    fn eval_rec(
        &self,
        sigma: &Sesquimorphism,
        offset: usize,
        trace: &mut Vec<SubtermColoring>,
    ) -> Result<(Block, FMatrix)> {
        let f = sigma.field();
        let (block, gamma) = match self {
            RankTerm::Const(u) => {
                for &c in u {
                    f.check(c)?;
                }
                (Block::single(), FMatrix::from_rows(f, 1, u.len(), u.clone())?)
            }
            RankTerm::Prod { m, n, p, left, right } => {
                let (a, ga) = left.eval_rec(sigma, offset, trace)?;
                let (b, gb) = right.eval_rec(sigma, offset + a.n, trace)?;
                let (k, l) = (ga.ncols(), gb.ncols());
                let out = n.ncols();
                expect_shape(m, f, k, l, "M")?;
                expect_shape(n, f, k, out, "N")?;
                expect_shape(p, f, l, out, "P")?;
                let (na, nb) = (a.n, b.n);
                let mut joined = Block::join(a, b);
                let gbs = gb.apply_sigma(sigma)?;
                let total = joined.n;
                for x in 0..na {
                    let xm = row_times(f, ga.row(x), m);
                    for y in 0..nb {
                        let c = dot(f, &xm, gbs.row(y));
                        joined.adj[x * total + na + y] = c;
                        joined.adj[(na + y) * total + x] = sigma.apply(c);
                    }
                }
                let gamma = ga.mul(n)?.vstack(&gb.mul(p)?)?;
                (joined, gamma)
            }
        };
        trace.push(SubtermColoring {
            vertices: offset..offset + block.n,
            gammas: vec![gamma.clone()],
        });
        Ok((block, gamma))
    }

    /// The same graph with operands swapped at the root: `t2 ⊗_{M',P,N} t1`
    /// with `M' = σ(M)ᵀ / σ(1)²`.
    pub fn commuted(&self, sigma: &Sesquimorphism) -> Result<RankTerm> {
        match self {
            RankTerm::Const(_) => Ok(self.clone()),
            RankTerm::Prod { m, n, p, left, right } => {
                let f = sigma.field();
                let s1 = sigma.sigma_one();
                let scale = f.inv(f.mul(s1, s1)).expect("sigma(1) is nonzero");
                let m2 = m.apply_sigma(sigma)?.transpose().scale(scale);
                Ok(RankTerm::prod(m2, p.clone(), n.clone(), (**right).clone(), (**left).clone()))
            }
        }
    }

    fn shape(&self) -> Rooted {
        let mut next = 0;
        self.shape_rec(&mut next)
    }

    fn shape_rec(&self, next: &mut usize) -> Rooted {
        match self {
            RankTerm::Const(_) => {
                *next += 1;
                Rooted::Leaf(*next - 1)
            }
            RankTerm::Prod { left, right, .. } => {
                let a = left.shape_rec(next);
                let b = right.shape_rec(next);
                Rooted::Node(Box::new(a), Box::new(b))
            }
        }
    }

    /// The syntactic tree as a layout; vertex `i` is the `i`-th leaf.
    pub fn syntactic_layout(&self) -> Layout {
        Layout::from_rooted(&self.shape()).expect("leaves are numbered in order")
    }

    pub fn to_sexpr(&self) -> String {
        let mut s = String::new();
        self.write_sexpr(&mut s, 0);
        s
    }

    fn write_sexpr(&self, s: &mut String, depth: usize) {
        match self {
            RankTerm::Const(u) => write_const(s, "const", u),
            RankTerm::Prod { m, n, p, left, right } => {
                let _ = write!(s, "(prod {} {} {}", m.to_literal(), n.to_literal(), p.to_literal());
                for t in [left, right] {
                    newline(s, depth + 1);
                    t.write_sexpr(s, depth + 1);
                }
                s.push(')');
            }
        }
    }

    pub fn parse(field: &Field, text: &str) -> Result<RankTerm> {
        let sx = parse_sexpr(text)?;
        rank_from_sx(field, &sx)
    }
}

impl BiRankTerm {
    pub fn constant(plus: Vec<Elem>, minus: Vec<Elem>) -> Self {
        BiRankTerm::Const { plus, minus }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn prod(
        m1: FMatrix,
        m2: FMatrix,
        n1: FMatrix,
        n2: FMatrix,
        p1: FMatrix,
        p2: FMatrix,
        left: BiRankTerm,
        right: BiRankTerm,
    ) -> Self {
        BiRankTerm::Prod {
            m1,
            m2,
            n1,
            n2,
            p1,
            p2,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            BiRankTerm::Const { .. } => 1,
            BiRankTerm::Prod { left, right, .. } => left.leaf_count() + right.leaf_count(),
        }
    }

    /// Widths `(k1, k2)` of the bi-coloring produced by the term.
    pub fn widths(&self) -> (usize, usize) {
        match self {
            BiRankTerm::Const { plus, minus } => (plus.len(), minus.len()),
            BiRankTerm::Prod { n1, n2, .. } => (n1.ncols(), n2.ncols()),
        }
    }

    /// Largest `k1 + k2` over all colorings occurring in the term.
    pub fn max_width(&self) -> usize {
        match self {
            BiRankTerm::Const { plus, minus } => plus.len() + minus.len(),
            BiRankTerm::Prod {
                n1, n2, p1, p2, left, right, ..
            } => [
                n1.nrows() + n2.nrows(),
                p1.nrows() + p2.nrows(),
                n1.ncols() + n2.ncols(),
                left.max_width(),
                right.max_width(),
            ]
            .into_iter()
            .max()
            .unwrap_or(0),
        }
    }

    pub fn eval(&self, field: &Field) -> Result<BiColoredGraph> {
        self.eval_traced(field).map(|(g, _)| g)
    }

    pub fn eval_traced(&self, field: &Field) -> Result<(BiColoredGraph, Vec<SubtermColoring>)> {
        let mut trace = Vec::new();
        let (block, gp, gm) = self.eval_rec(field, 0, &mut trace)?;
        Ok((
            BiColoredGraph {
                graph: block.into_graph(field),
                gamma_plus: gp,
                gamma_minus: gm,
            },
            trace,
        ))
    }

    fn eval_rec(
        &self,
        f: &Field,
        offset: usize,
        trace: &mut Vec<SubtermColoring>,
    ) -> Result<(Block, FMatrix, FMatrix)> {
        let (block, gp, gm) = match self {
            BiRankTerm::Const { plus, minus } => {
                for &c in plus.iter().chain(minus) {
                    f.check(c)?;
                }
                (
                    Block::single(),
                    FMatrix::from_rows(f, 1, plus.len(), plus.clone())?,
                    FMatrix::from_rows(f, 1, minus.len(), minus.clone())?,
                )
            }
            BiRankTerm::Prod {
                m1,
                m2,
                n1,
                n2,
                p1,
                p2,
                left,
                right,
            } => {
                let (a, gap, gam) = left.eval_rec(f, offset, trace)?;
                let (b, gbp, gbm) = right.eval_rec(f, offset + a.n, trace)?;
                let (k1, k2) = (gap.ncols(), gam.ncols());
                let (l1, l2) = (gbp.ncols(), gbm.ncols());
                let (o1, o2) = (n1.ncols(), n2.ncols());
                expect_shape(m1, f, k1, l2, "M1")?;
                expect_shape(m2, f, k2, l1, "M2")?;
                expect_shape(n1, f, k1, o1, "N1")?;
                expect_shape(n2, f, k2, o2, "N2")?;
                expect_shape(p1, f, l1, o1, "P1")?;
                expect_shape(p2, f, l2, o2, "P2")?;
                let (na, nb) = (a.n, b.n);
                let mut joined = Block::join(a, b);
                let total = joined.n;
                for x in 0..na {
                    let out = row_times(f, gap.row(x), m1);
                    let inn = row_times(f, gam.row(x), m2);
                    for y in 0..nb {
                        joined.adj[x * total + na + y] = dot(f, &out, gbm.row(y));
                        joined.adj[(na + y) * total + x] = dot(f, &inn, gbp.row(y));
                    }
                }
                let gp = gap.mul(n1)?.vstack(&gbp.mul(p1)?)?;
                let gm = gam.mul(n2)?.vstack(&gbm.mul(p2)?)?;
                (joined, gp, gm)
            }
        };
        trace.push(SubtermColoring {
            vertices: offset..offset + block.n,
            gammas: vec![gp.clone(), gm.clone()],
        });
        Ok((block, gp, gm))
    }

    /// `t2 ⊗_{M2ᵀ, M1ᵀ, P1, P2, N1, N2} t1`.
    pub fn commuted(&self) -> BiRankTerm {
        match self {
            BiRankTerm::Const { .. } => self.clone(),
            BiRankTerm::Prod {
                m1,
                m2,
                n1,
                n2,
                p1,
                p2,
                left,
                right,
            } => BiRankTerm::prod(
                m2.transpose(),
                m1.transpose(),
                p1.clone(),
                p2.clone(),
                n1.clone(),
                n2.clone(),
                (**right).clone(),
                (**left).clone(),
            ),
        }
    }

    fn shape_rec(&self, next: &mut usize) -> Rooted {
        match self {
            BiRankTerm::Const { .. } => {
                *next += 1;
                Rooted::Leaf(*next - 1)
            }
            BiRankTerm::Prod { left, right, .. } => {
                let a = left.shape_rec(next);
                let b = right.shape_rec(next);
                Rooted::Node(Box::new(a), Box::new(b))
            }
        }
    }

    pub fn syntactic_layout(&self) -> Layout {
        Layout::from_rooted(&self.shape_rec(&mut 0)).expect("leaves are numbered in order")
    }

    pub fn to_sexpr(&self) -> String {
        let mut s = String::new();
        self.write_sexpr(&mut s, 0);
        s
    }

    fn write_sexpr(&self, s: &mut String, depth: usize) {
        match self {
            BiRankTerm::Const { plus, minus } => {
                s.push_str("(biconst ");
                write_vector(s, plus);
                s.push(' ');
                write_vector(s, minus);
                s.push(')');
            }
            BiRankTerm::Prod {
                m1,
                m2,
                n1,
                n2,
                p1,
                p2,
                left,
                right,
            } => {
                s.push_str("(biprod");
                for m in [m1, m2, n1, n2, p1, p2] {
                    s.push(' ');
                    s.push_str(&m.to_literal());
                }
                for t in [left, right] {
                    newline(s, depth + 1);
                    t.write_sexpr(s, depth + 1);
                }
                s.push(')');
            }
        }
    }

    pub fn parse(field: &Field, text: &str) -> Result<BiRankTerm> {
        let sx = parse_sexpr(text)?;
        birank_from_sx(field, &sx)
    }
}

fn newline(s: &mut String, depth: usize) {
    s.push('\n');
    for _ in 0..depth {
        s.push_str("  ");
    }
}

fn write_const(s: &mut String, head: &str, u: &[Elem]) {
    s.push('(');
    s.push_str(head);
    for c in u {
        let _ = write!(s, " {c}");
    }
    s.push(')');
}

fn write_vector(s: &mut String, u: &[Elem]) {
    let body: Vec<String> = u.iter().map(|c| c.to_string()).collect();
    let _ = write!(s, "({})", body.join(" "));
}

// S-expression reader. Matrix literals `[...]` are single atoms.

#[derive(Debug)]
enum Sx {
    Atom(String),
    List(Vec<Sx>),
}

fn term_err(msg: impl Into<String>) -> Error {
    Error::Parse {
        line: 0,
        msg: msg.into(),
    }
}

fn parse_sexpr(text: &str) -> Result<Sx> {
    let stripped: String = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .collect::<Vec<_>>()
        .join("\n");
    let chars: Vec<char> = stripped.chars().collect();
    let mut pos = 0;
    let sx = read_sx(&chars, &mut pos)?;
    while pos < chars.len() && chars[pos].is_whitespace() {
        pos += 1;
    }
    if pos != chars.len() {
        return Err(term_err("trailing text after term"));
    }
    Ok(sx)
}

fn read_sx(c: &[char], pos: &mut usize) -> Result<Sx> {
    while *pos < c.len() && c[*pos].is_whitespace() {
        *pos += 1;
    }
    match c.get(*pos) {
        None => Err(term_err("unexpected end of term")),
        Some('(') => {
            *pos += 1;
            let mut items = Vec::new();
            loop {
                while *pos < c.len() && c[*pos].is_whitespace() {
                    *pos += 1;
                }
                match c.get(*pos) {
                    None => return Err(term_err("unclosed `(`")),
                    Some(')') => {
                        *pos += 1;
                        return Ok(Sx::List(items));
                    }
                    _ => items.push(read_sx(c, pos)?),
                }
            }
        }
        Some(')') => Err(term_err("unexpected `)`")),
        Some('[') => {
            let start = *pos;
            while *pos < c.len() && c[*pos] != ']' {
                *pos += 1;
            }
            if *pos == c.len() {
                return Err(term_err("unclosed `[`"));
            }
            *pos += 1;
            Ok(Sx::Atom(c[start..*pos].iter().collect()))
        }
        Some(_) => {
            let start = *pos;
            while *pos < c.len() && !c[*pos].is_whitespace() && !"()[]".contains(c[*pos]) {
                *pos += 1;
            }
            Ok(Sx::Atom(c[start..*pos].iter().collect()))
        }
    }
}

fn elem_of(field: &Field, sx: &Sx) -> Result<Elem> {
    match sx {
        Sx::Atom(a) => {
            let v: Elem = a.parse().map_err(|_| term_err(format!("bad element {a:?}")))?;
            field.check(v)
        }
        Sx::List(_) => Err(term_err("expected an element code")),
    }
}

fn matrix_of(field: &Field, sx: &Sx) -> Result<FMatrix> {
    match sx {
        Sx::Atom(a) if a.starts_with('[') => FMatrix::parse_literal(field, a),
        _ => Err(term_err("expected a matrix literal")),
    }
}

fn vector_of(field: &Field, sx: &Sx) -> Result<Vec<Elem>> {
    match sx {
        Sx::List(items) => items.iter().map(|i| elem_of(field, i)).collect(),
        Sx::Atom(_) => Err(term_err("expected a parenthesized vector")),
    }
}

fn head(sx: &Sx) -> Result<(&str, &[Sx])> {
    match sx {
        Sx::List(items) => match items.first() {
            Some(Sx::Atom(h)) => Ok((h.as_str(), &items[1..])),
            _ => Err(term_err("term must start with a keyword")),
        },
        Sx::Atom(a) => Err(term_err(format!("expected a term, found {a:?}"))),
    }
}

fn rank_from_sx(field: &Field, sx: &Sx) -> Result<RankTerm> {
    match head(sx)? {
        ("const", args) => Ok(RankTerm::Const(
            args.iter().map(|a| elem_of(field, a)).collect::<Result<_>>()?,
        )),
        ("prod", [m, n, p, l, r]) => Ok(RankTerm::prod(
            matrix_of(field, m)?,
            matrix_of(field, n)?,
            matrix_of(field, p)?,
            rank_from_sx(field, l)?,
            rank_from_sx(field, r)?,
        )),
        ("prod", _) => Err(term_err("prod takes three matrices and two terms")),
        (h, _) => Err(term_err(format!("unknown rank term keyword {h:?}"))),
    }
}

fn birank_from_sx(field: &Field, sx: &Sx) -> Result<BiRankTerm> {
    match head(sx)? {
        ("biconst", [u, v]) => Ok(BiRankTerm::constant(vector_of(field, u)?, vector_of(field, v)?)),
        ("biconst", _) => Err(term_err("biconst takes two vectors")),
        ("biprod", [m1, m2, n1, n2, p1, p2, l, r]) => Ok(BiRankTerm::prod(
            matrix_of(field, m1)?,
            matrix_of(field, m2)?,
            matrix_of(field, n1)?,
            matrix_of(field, n2)?,
            matrix_of(field, p1)?,
            matrix_of(field, p2)?,
            birank_from_sx(field, l)?,
            birank_from_sx(field, r)?,
        )),
        ("biprod", _) => Err(term_err("biprod takes six matrices and two terms")),
        (h, _) => Err(term_err(format!("unknown bi-rank term keyword {h:?}"))),
    }
}

/// Row positions of a leftmost maximal independent set of rows.
pub fn vertex_basis(m: &FMatrix) -> Vec<usize> {
    m.row_basis()
}

// Compilation of layouts into terms.

fn check_layout(g: &ColoredGraph, l: &Layout) -> Result<()> {
    if l.n() != g.n() {
        return Err(Error::LayoutMismatch(format!(
            "layout has {} leaves, graph has {} vertices",
            l.n(),
            g.n()
        )));
    }
    Ok(())
}

/// Rows `z` of `M[cands][rest]` (as ordered vertex lists): a leftmost basis
/// and the coordinates of every candidate row against it.
struct Reduction {
    basis: Vec<usize>,
    coords: Vec<Vec<Elem>>,
}

fn reduce(f: &Field, rows: &[Vec<Elem>], cands: &[usize]) -> Reduction {
    let width = rows.first().map_or(0, |r| r.len());
    let data: Vec<Elem> = rows.iter().flatten().copied().collect();
    let m = FMatrix::from_rows(f, rows.len(), width, data).expect("rows have equal length");
    let pos = vertex_basis(&m);
    let bm = m.select(&pos, &(0..width).collect::<Vec<_>>());
    let coords = rows
        .iter()
        .map(|r| bm.solve_left(r).expect("candidate rows lie in the span of the basis"))
        .collect();
    Reduction {
        basis: pos.iter().map(|&i| cands[i]).collect(),
        coords,
    }
}

/// The same entries with default row and column labels.
fn plain(m: FMatrix) -> FMatrix {
    FMatrix::from_rows(m.field(), m.nrows(), m.ncols(), m.entries().to_vec()).expect("same shape")
}

fn coord_matrix(f: &Field, coords: &[Vec<Elem>], width: usize) -> FMatrix {
    let data = coords.iter().flatten().copied().collect();
    FMatrix::from_rows(f, coords.len(), width, data).expect("coordinate rows have equal length")
}

fn sorted_union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
    v.sort_unstable();
    v
}

fn complement(n: usize, inside: &[usize]) -> Vec<usize> {
    let mut mark = vec![false; n];
    for &v in inside {
        mark[v] = true;
    }
    (0..n).filter(|&v| !mark[v]).collect()
}

struct RankNode {
    term: RankTerm,
    basis: Vec<usize>,
    vertices: Vec<usize>,
}

fn compile_rank_connected(g: &SigmaGraph, tree: &Rooted) -> RankNode {
    let graph = g.graph();
    let f = graph.field();
    let n = graph.n();
    match tree {
        Rooted::Leaf(v) => RankNode {
            term: RankTerm::Const(vec![1]),
            basis: vec![*v],
            vertices: vec![*v],
        },
        Rooted::Node(a, b) => {
            let left = compile_rank_connected(g, a);
            let right = compile_rank_connected(g, b);
            let s1 = g.sigma().sigma_one();
            let inv = f.inv(s1).expect("sigma(1) is nonzero");
            let m = plain(graph.adj().select(&left.basis, &right.basis).scale(inv));
            let vertices: Vec<usize> = left.vertices.iter().chain(&right.vertices).copied().collect();
            let rest = complement(n, &vertices);
            let cands = sorted_union(&left.basis, &right.basis);
            let row = |z: usize| -> Vec<Elem> { rest.iter().map(|&t| graph.get(z, t)).collect() };
            let (basis, n_mat, p_mat) = if rest.is_empty() {
                // the root: nothing left to span, keep one zero color
                (
                    Vec::new(),
                    FMatrix::zeros(f, left.basis.len(), 1),
                    FMatrix::zeros(f, right.basis.len(), 1),
                )
            } else {
                let rows: Vec<Vec<Elem>> = cands.iter().map(|&z| row(z)).collect();
                let red = reduce(f, &rows, &cands);
                let coord = |z: &usize| red.coords[cands.binary_search(z).expect("candidate")].clone();
                let w = red.basis.len();
                let nm = coord_matrix(f, &left.basis.iter().map(coord).collect::<Vec<_>>(), w);
                let pm = coord_matrix(f, &right.basis.iter().map(coord).collect::<Vec<_>>(), w);
                (red.basis, nm, pm)
            };
            RankNode {
                term: RankTerm::prod(m, n_mat, p_mat, left.term, right.term),
                basis,
                vertices,
            }
        }
    }
}

fn join_all<T>(parts: Vec<Compiled<T>>, join: impl Fn(T, T) -> T) -> Compiled<T> {
    let mut it = parts.into_iter();
    let first = it.next().expect("graph has a vertex");
    it.fold(first, |acc, next| Compiled {
        term: join(acc.term, next.term),
        leaf_vertices: acc.leaf_vertices.into_iter().chain(next.leaf_vertices).collect(),
    })
}

/// Compiles a layout of a sigma-symmetric graph into a rank term whose value
/// is isomorphic to the graph, with colors no wider than the layout's width.
pub fn term_from_layout_rank(g: &SigmaGraph, l: &Layout) -> Result<Compiled<RankTerm>> {
    check_layout(g.graph(), l)?;
    if g.n() == 0 {
        return Err(Error::LayoutMismatch("graph has no vertices".into()));
    }
    let f = g.field().clone();
    let mut parts = Vec::new();
    for comp in g.graph().components() {
        let sub = g.induced(&comp);
        let layout = l.restrict(&comp)?;
        let node = compile_rank_connected(&sub, &layout.rooted());
        parts.push(Compiled {
            term: node.term,
            leaf_vertices: node.vertices.iter().map(|&i| comp[i]).collect(),
        });
    }
    let o = FMatrix::zeros(&f, 1, 1);
    Ok(join_all(parts, |a, b| RankTerm::prod(o.clone(), o.clone(), o.clone(), a, b)))
}

struct BiNode {
    term: BiRankTerm,
    plus: Vec<usize>,
    minus: Vec<usize>,
    vertices: Vec<usize>,
}

fn compile_birank(g: &ColoredGraph, tree: &Rooted) -> BiNode {
    let f = g.field();
    let n = g.n();
    match tree {
        Rooted::Leaf(v) => {
            let v = *v;
            let out = (0..n).any(|t| g.get(v, t) != 0);
            let inn = (0..n).any(|t| g.get(t, v) != 0);
            let plus: Vec<usize> = if out { vec![v] } else { vec![] };
            let minus: Vec<usize> = if inn { vec![v] } else { vec![] };
            BiNode {
                term: BiRankTerm::constant(vec![1; plus.len()], vec![1; minus.len()]),
                plus,
                minus,
                vertices: vec![v],
            }
        }
        Rooted::Node(a, b) => {
            let left = compile_birank(g, a);
            let right = compile_birank(g, b);
            let adj = g.adj();
            let m1 = plain(adj.select(&left.plus, &right.minus));
            let m2 = plain(adj.select(&right.plus, &left.minus).transpose());
            let vertices: Vec<usize> = left.vertices.iter().chain(&right.vertices).copied().collect();
            let rest = complement(n, &vertices);
            let side = |cands: &[usize], outgoing: bool| -> Reduction {
                let rows: Vec<Vec<Elem>> = cands
                    .iter()
                    .map(|&z| {
                        rest.iter()
                            .map(|&t| if outgoing { g.get(z, t) } else { g.get(t, z) })
                            .collect()
                    })
                    .collect();
                reduce(f, &rows, cands)
            };
            let plus_cands = sorted_union(&left.plus, &right.plus);
            let minus_cands = sorted_union(&left.minus, &right.minus);
            let rp = side(&plus_cands, true);
            let rm = side(&minus_cands, false);
            let pick = |red: &Reduction, cands: &[usize], zs: &[usize]| -> FMatrix {
                let rows: Vec<Vec<Elem>> = zs
                    .iter()
                    .map(|z| red.coords[cands.binary_search(z).expect("candidate")].clone())
                    .collect();
                coord_matrix(f, &rows, red.basis.len())
            };
            let n1 = pick(&rp, &plus_cands, &left.plus);
            let p1 = pick(&rp, &plus_cands, &right.plus);
            let n2 = pick(&rm, &minus_cands, &left.minus);
            let p2 = pick(&rm, &minus_cands, &right.minus);
            BiNode {
                term: BiRankTerm::prod(m1, m2, n1, n2, p1, p2, left.term, right.term),
                plus: rp.basis,
                minus: rm.basis,
                vertices,
            }
        }
    }
}

/// Compiles a layout into a bi-rank term whose value is isomorphic to the
/// graph. Bases are exact, so a vertex without outgoing (incoming) arcs gets
/// an empty outgoing (incoming) color.
pub fn term_from_layout_birank(g: &ColoredGraph, l: &Layout) -> Result<Compiled<BiRankTerm>> {
    check_layout(g, l)?;
    if g.n() == 0 {
        return Err(Error::LayoutMismatch("graph has no vertices".into()));
    }
    let f = g.field().clone();
    let mut parts = Vec::new();
    for comp in g.components() {
        let sub = g.induced(&comp);
        let layout = l.restrict(&comp)?;
        let node = compile_birank(&sub, &layout.rooted());
        parts.push(Compiled {
            term: node.term,
            leaf_vertices: node.vertices.iter().map(|&i| comp[i]).collect(),
        });
    }
    let o = FMatrix::zeros(&f, 0, 0);
    Ok(join_all(parts, |a, b| {
        BiRankTerm::prod(o.clone(), o.clone(), o.clone(), o.clone(), o.clone(), o.clone(), a, b)
    }))
}

impl<T> Compiled<T> {
    /// Input vertex order that makes the evaluated graph equal (not just
    /// isomorphic) to the input: leaf `i` becomes vertex `leaf_vertices[i]`.
    pub fn relabel_into_input(&self, evaluated: &ColoredGraph, labels: &[String]) -> Result<ColoredGraph> {
        evaluated.relabeled(&self.leaf_vertices).with_labels(labels.to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutrank::CutFunction;
    use crate::graph::{random_sigma_graph, GF4_A, GF4_A2};
    use crate::iso::isomorphic;
    use crate::layout::{layout_width, rankwidth};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gf2() -> (Field, Sesquimorphism) {
        let f = Field::prime(2).unwrap();
        let id = Sesquimorphism::identity(&f);
        (f, id)
    }

    fn lit(f: &Field, s: &str) -> FMatrix {
        FMatrix::parse_literal(f, s).unwrap()
    }

    #[test]
    fn constants_and_single_products() {
        let (f, id) = gf2();
        let c = RankTerm::Const(vec![1]).eval(&id).unwrap();
        assert_eq!(c.graph.n(), 1);
        assert_eq!(c.gamma.entries(), &[1]);
        let one = lit(&f, "[1 1; 1]");
        let zero = lit(&f, "[1 1; 0]");
        let k2 = RankTerm::prod(one.clone(), one.clone(), one.clone(), RankTerm::Const(vec![1]), RankTerm::Const(vec![1]));
        let v = k2.eval(&id).unwrap();
        assert_eq!(v.graph.graph().arc_count(), 2);
        assert_eq!(v.gamma.entries(), &[1, 1]);
        let two = RankTerm::prod(zero, one.clone(), one, RankTerm::Const(vec![1]), RankTerm::Const(vec![1]));
        assert_eq!(two.eval(&id).unwrap().graph.graph().arc_count(), 0);
    }

    #[test]
    fn dimension_errors() {
        let (f, id) = gf2();
        let bad = RankTerm::prod(
            lit(&f, "[2 1; 1; 1]"),
            lit(&f, "[1 1; 1]"),
            lit(&f, "[1 1; 1]"),
            RankTerm::Const(vec![1]),
            RankTerm::Const(vec![1]),
        );
        assert!(matches!(bad.eval(&id), Err(Error::DimensionMismatch(_))));
        let f3 = Field::prime(3).unwrap();
        let mixed = RankTerm::prod(
            lit(&f3, "[1 1; 1]"),
            lit(&f, "[1 1; 1]"),
            lit(&f, "[1 1; 1]"),
            RankTerm::Const(vec![1]),
            RankTerm::Const(vec![1]),
        );
        assert!(matches!(mixed.eval(&id), Err(Error::FieldMismatch)));
    }

    #[test]
    fn sexpr_round_trip() {
        let (f, id) = gf2();
        let c5 = SigmaGraph::undirected(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let w = rankwidth(&c5).unwrap();
        let t = term_from_layout_rank(&c5, &w.witness).unwrap().term;
        let text = t.to_sexpr();
        assert_eq!(RankTerm::parse(&f, &text).unwrap(), t);
        assert!(t.max_width() <= 2);
        let val = t.eval(&id).unwrap();
        assert!(isomorphic(val.graph.graph(), c5.graph()).unwrap().is_some());
        assert!(RankTerm::parse(&f, "(prod [1 1; 1] (const 1))").is_err());
        assert!(RankTerm::parse(&f, "(const 1").is_err());
        assert!(RankTerm::parse(&f, "(const 2)").is_err());
        let b = BiRankTerm::parse(&f, "(biprod [1 1; 1] [0 0;] [1 0;] [0 0;] [0 0;] [1 0;] (biconst (1) ()) (biconst () (1)))").unwrap();
        let g = b.eval(&f).unwrap();
        assert_eq!(g.graph.get(0, 1), 1);
        assert_eq!(g.graph.get(1, 0), 0);
        assert_eq!(BiRankTerm::parse(&f, &b.to_sexpr()).unwrap(), b);
    }

    #[test]
    fn commuted_rank_terms_over_gf4() {
        let f = Field::new(2, 2).unwrap();
        let s = Sesquimorphism::new(&f, vec![0, 1, GF4_A2, GF4_A]).unwrap();
        let t = RankTerm::prod(
            lit(&f, "[1 2; 2 3]"),
            lit(&f, "[1 1; 1]"),
            lit(&f, "[2 1; 1; 0]"),
            RankTerm::Const(vec![1]),
            RankTerm::Const(vec![1, 2]),
        );
        let a = t.eval(&s).unwrap().graph;
        let b = t.commuted(&s).unwrap().eval(&s).unwrap().graph;
        assert!(isomorphic(a.graph(), b.graph()).unwrap().is_some());
    }

    #[test]
    fn compiled_terms_reproduce_the_graph() {
        let f3 = Field::prime(3).unwrap();
        let neg = Sesquimorphism::negation(&f3);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..30 {
            let g = random_sigma_graph(&neg, 6, 0.4, &mut rng);
            let w = rankwidth(&g).unwrap();
            let c = term_from_layout_rank(&g, &w.witness).unwrap();
            assert!(c.term.max_width() <= (w.width as usize).max(1));
            let val = c.term.eval(&neg).unwrap();
            assert_eq!(&c.relabel_into_input(val.graph.graph(), g.graph().labels()).unwrap(), g.graph());
            let syn = c.term.syntactic_layout();
            let f = CutFunction::for_sigma_graph(&val.graph);
            assert!(layout_width(&f, &syn).unwrap().width <= w.width);
        }
    }

    #[test]
    fn birank_single_arc() {
        let g = ColoredGraph::digraph(2, &[(0, 1)]).unwrap();
        let (l, _) = Layout::parse_newick("(v1,v2);", g.labels()).unwrap();
        let c = term_from_layout_birank(&g, &l).unwrap();
        let BiRankTerm::Prod { m1, m2, .. } = &c.term else {
            panic!("expected a product");
        };
        assert_eq!(m1.entries(), &[1]);
        assert_eq!(m2.shape(), (0, 0));
        let val = c.term.eval(g.field()).unwrap();
        assert_eq!(c.relabel_into_input(&val.graph, g.labels()).unwrap(), g);
        assert_eq!(c.term.max_width(), 1);
    }

    #[test]
    fn basis_examples() {
        let f = Field::prime(2).unwrap();
        assert!(vertex_basis(&FMatrix::zeros(&f, 3, 2)).is_empty());
        assert_eq!(vertex_basis(&FMatrix::identity(&f, 3)), vec![0, 1, 2]);
        let dup = lit(&f, "[3 2; 1 1; 1 1; 0 1]");
        assert_eq!(vertex_basis(&dup), vec![0, 2]);
    }

    #[test]
    fn isolated_vertices_chain() {
        let (f, id) = gf2();
        let g = SigmaGraph::undirected(3, &[]).unwrap();
        let l = crate::layout::enumerate_layouts(3).next().unwrap();
        let c = term_from_layout_rank(&g, &l).unwrap();
        let val = c.term.eval(&id).unwrap();
        assert_eq!(val.graph.graph().arc_count(), 0);
        assert_eq!(val.graph.n(), 3);
        let RankTerm::Prod { m, .. } = &c.term else {
            panic!("expected a product");
        };
        assert_eq!(*m, FMatrix::zeros(&f, 1, 1));
    }
}
