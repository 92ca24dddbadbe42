//! Layouts of a vertex set (sub-cubic trees with leaves labeled by vertices),
//! their widths under a cut function, and exact width search.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicU32, Ordering};

use rayon::prelude::*;

use crate::cutrank::{full_set, members, CutFunction, VSet};
use crate::error::{Error, Result};
use crate::graph::{ColoredGraph, SigmaGraph};

/// A tree with maximum degree 3 whose leaves are in bijection with the
/// vertices `0..n`. Internal nodes of degree 2 are tolerated.
#[derive(Clone, Debug)]
pub struct Layout {
    adj: Vec<Vec<usize>>,
    /// node of each vertex
    leaf: Vec<usize>,
}

/// A rooted binary tree over vertex indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rooted {
    Leaf(usize),
    Node(Box<Rooted>, Box<Rooted>),
}

impl Rooted {
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut Vec<usize>) {
        match self {
            Rooted::Leaf(v) => out.push(*v),
            Rooted::Node(a, b) => {
                a.collect(out);
                b.collect(out);
            }
        }
    }

    pub fn min_leaf(&self) -> usize {
        match self {
            Rooted::Leaf(v) => *v,
            Rooted::Node(a, b) => a.min_leaf().min(b.min_leaf()),
        }
    }

    /// Same tree with children ordered by least leaf.
    pub fn sorted(self) -> Rooted {
        match self {
            Rooted::Leaf(v) => Rooted::Leaf(v),
            Rooted::Node(a, b) => {
                let (a, b) = (a.sorted(), b.sorted());
                if a.min_leaf() <= b.min_leaf() {
                    Rooted::Node(Box::new(a), Box::new(b))
                } else {
                    Rooted::Node(Box::new(b), Box::new(a))
                }
            }
        }
    }

    fn newick(&self, labels: &[String], out: &mut String) {
        match self {
            Rooted::Leaf(v) => out.push_str(&labels[*v]),
            Rooted::Node(a, b) => {
                out.push('(');
                a.newick(labels, out);
                out.push(',');
                b.newick(labels, out);
                out.push(')');
            }
        }
    }
}

impl Layout {
    /// Builds and validates a layout from an edge list over nodes
    /// `0..node_count` and the node of each vertex.
    pub fn from_edges(node_count: usize, edges: &[(usize, usize)], leaf: Vec<usize>) -> Result<Self> {
        let bad = |m: String| Error::InvalidLayout(m);
        let mut adj = vec![Vec::new(); node_count];
        for &(a, b) in edges {
            if a >= node_count || b >= node_count || a == b {
                return Err(bad(format!("bad edge ({a}, {b})")));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        if node_count == 0 || edges.len() + 1 != node_count {
            return Err(bad("not a tree: wrong edge count".into()));
        }
        let mut seen = vec![false; node_count];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(bad("not a tree: disconnected".into()));
        }
        if let Some(u) = (0..node_count).find(|&u| adj[u].len() > 3) {
            return Err(bad(format!("node {u} has degree {}", adj[u].len())));
        }
        let mut owner = vec![usize::MAX; node_count];
        for (v, &node) in leaf.iter().enumerate() {
            if node >= node_count || owner[node] != usize::MAX {
                return Err(bad(format!("vertex {v} is not on its own leaf")));
            }
            owner[node] = v;
        }
        for u in 0..node_count {
            let is_leaf = adj[u].len() <= 1;
            if is_leaf != (owner[u] != usize::MAX) {
                return Err(bad(format!("leaves and vertices disagree at node {u}")));
            }
        }
        Ok(Layout { adj, leaf })
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.leaf.len()
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn leaf_of(&self, v: usize) -> usize {
        self.leaf[v]
    }

    pub fn tree_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, ns) in self.adj.iter().enumerate() {
            for &w in ns {
                if u < w {
                    out.push((u, w));
                }
            }
        }
        out
    }

    fn vertex_at(&self) -> Vec<Option<usize>> {
        let mut at = vec![None; self.adj.len()];
        for (v, &node) in self.leaf.iter().enumerate() {
            at[node] = Some(v);
        }
        at
    }

    /// Vertices on the `a` side of every tree edge `(a, b)`, in [`Layout::tree_edges`] order.
    pub fn cuts(&self) -> Vec<VSet> {
        let at = self.vertex_at();
        self.tree_edges()
            .into_iter()
            .map(|(a, b)| {
                let mut mask = 0;
                let mut stack = vec![(a, b)];
                while let Some((u, from)) = stack.pop() {
                    if let Some(v) = at[u] {
                        mask |= 1 << v;
                    }
                    for &w in &self.adj[u] {
                        if w != from {
                            stack.push((w, u));
                        }
                    }
                }
                mask
            })
            .collect()
    }

    /// The canonical rooting: subdivide the edge at the leaf of vertex 0.
    pub fn rooted(&self) -> Rooted {
        let n = self.n();
        if n == 1 {
            return Rooted::Leaf(0);
        }
        let at = self.vertex_at();
        let l0 = self.leaf[0];
        let w = self.adj[l0][0];
        let sub = self.rooted_from(w, l0, &at);
        Rooted::Node(Box::new(Rooted::Leaf(0)), Box::new(sub)).sorted()
    }

    fn rooted_from(&self, u: usize, parent: usize, at: &[Option<usize>]) -> Rooted {
        if let Some(v) = at[u] {
            return Rooted::Leaf(v);
        }
        let kids: Vec<usize> = self.adj[u].iter().copied().filter(|&w| w != parent).collect();
        match kids.as_slice() {
            [c] => self.rooted_from(*c, u, at),
            [a, b] => Rooted::Node(
                Box::new(self.rooted_from(*a, u, at)),
                Box::new(self.rooted_from(*b, u, at)),
            ),
            _ => unreachable!("validated sub-cubic tree"),
        }
    }

    /// Layout of a rooted binary tree whose leaves are exactly `0..n`.
    pub fn from_rooted(tree: &Rooted) -> Result<Self> {
        let leaves = tree.leaves();
        let n = leaves.len();
        let mut leaf = vec![usize::MAX; n];
        let mut edges = Vec::new();
        let mut next = 0;
        fn build(
            t: &Rooted,
            leaf: &mut [usize],
            edges: &mut Vec<(usize, usize)>,
            next: &mut usize,
        ) -> Result<usize> {
            let id = *next;
            *next += 1;
            match t {
                Rooted::Leaf(v) => {
                    let slot = leaf
                        .get_mut(*v)
                        .ok_or_else(|| Error::InvalidLayout(format!("vertex {v} out of range")))?;
                    if *slot != usize::MAX {
                        return Err(Error::InvalidLayout(format!("vertex {v} repeated")));
                    }
                    *slot = id;
                }
                Rooted::Node(a, b) => {
                    let ia = build(a, leaf, edges, next)?;
                    let ib = build(b, leaf, edges, next)?;
                    edges.push((id, ia));
                    edges.push((id, ib));
                }
            }
            Ok(id)
        }
        build(tree, &mut leaf, &mut edges, &mut next)?;
        if let Rooted::Node(..) = tree {
            // the root has degree 2: splice it out
            let (_, a) = edges[edges.len() - 2];
            let (_, b) = edges[edges.len() - 1];
            edges.truncate(edges.len() - 2);
            edges.push((a, b));
            // renumber nodes to drop node 0
            for e in edges.iter_mut() {
                *e = (e.0 - 1, e.1 - 1);
            }
            for l in leaf.iter_mut() {
                *l -= 1;
            }
            next -= 1;
        }
        Layout::from_edges(next, &edges, leaf)
    }

    /// Newick text over the given vertex labels, rooted canonically.
    pub fn to_newick(&self, labels: &[String]) -> String {
        let mut s = String::new();
        self.rooted().newick(labels, &mut s);
        s.push(';');
        s
    }

    pub fn to_newick_with_width(&self, labels: &[String], width: u32) -> String {
        let mut s = self.to_newick(labels);
        let _ = write!(s, "\n# width {width}");
        s
    }

    /// Parses Newick text over `labels`; returns the layout and the optional
    /// `# width k` trailer.
    pub fn parse_newick(text: &str, labels: &[String]) -> Result<(Layout, Option<u32>)> {
        let mut body = String::new();
        let mut width = None;
        for line in text.lines() {
            let t = line.trim();
            if let Some(rest) = t.strip_prefix('#') {
                let words: Vec<&str> = rest.split_whitespace().collect();
                if let ["width", k] = words.as_slice() {
                    width = Some(k.parse().map_err(|_| Error::InvalidLayout("bad width trailer".into()))?);
                }
                continue;
            }
            body.push_str(t);
        }
        let body = body.trim();
        let body = body
            .strip_suffix(';')
            .ok_or_else(|| Error::InvalidLayout("missing terminating `;`".into()))?;
        let index: HashMap<&str, usize> =
            labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        let mut p = NewickParser {
            s: body.as_bytes(),
            pos: 0,
            index: &index,
            edges: Vec::new(),
            leaf: vec![usize::MAX; labels.len()],
            count: 0,
        };
        let root = p.node()?;
        if p.pos != p.s.len() {
            return Err(Error::InvalidLayout(format!("trailing text at byte {}", p.pos)));
        }
        if let Some(v) = p.leaf.iter().position(|&l| l == usize::MAX) {
            return Err(Error::LayoutMismatch(format!("vertex {} missing", labels[v])));
        }
        let mut edges = p.edges;
        let mut count = p.count;
        let mut leaf = p.leaf;
        let root_deg = edges.iter().filter(|e| e.0 == root || e.1 == root).count();
        let root_is_vertex = leaf.contains(&root);
        if !root_is_vertex && root_deg <= 2 {
            // suppress a root of degree 1 or 2
            let nbrs: Vec<usize> = edges
                .iter()
                .filter_map(|&(a, b)| if a == root { Some(b) } else if b == root { Some(a) } else { None })
                .collect();
            edges.retain(|&(a, b)| a != root && b != root);
            if let [a, b] = nbrs.as_slice() {
                edges.push((*a, *b));
            }
            let shift = |x: usize| if x > root { x - 1 } else { x };
            edges = edges.into_iter().map(|(a, b)| (shift(a), shift(b))).collect();
            leaf = leaf.into_iter().map(shift).collect();
            count -= 1;
        }
        Ok((Layout::from_edges(count, &edges, leaf)?, width))
    }

    /// The layout induced on a vertex subset: the subtree spanning their
    /// leaves with degree-2 nodes suppressed. Vertex `i` of the result is `vs[i]`.
    pub fn restrict(&self, vs: &[usize]) -> Result<Layout> {
        if vs.is_empty() {
            return Err(Error::LayoutMismatch("empty vertex subset".into()));
        }
        let keep_vertex: Vec<Option<usize>> = {
            let mut k = vec![None; self.n()];
            for (i, &v) in vs.iter().enumerate() {
                if v >= self.n() || k[v].is_some() {
                    return Err(Error::LayoutMismatch(format!("bad vertex {v}")));
                }
                k[v] = Some(i);
            }
            k
        };
        let rooted = self.rooted();
        fn prune(t: &Rooted, keep: &[Option<usize>]) -> Option<Rooted> {
            match t {
                Rooted::Leaf(v) => keep[*v].map(Rooted::Leaf),
                Rooted::Node(a, b) => match (prune(a, keep), prune(b, keep)) {
                    (Some(x), Some(y)) => Some(Rooted::Node(Box::new(x), Box::new(y))),
                    (x, None) => x,
                    (None, y) => y,
                },
            }
        }
        let t = prune(&rooted, &keep_vertex).expect("subset is nonempty");
        Layout::from_rooted(&t)
    }

    /// Nontrivial splits, each normalized to the side without vertex 0.
    fn split_signature(&self) -> Vec<VSet> {
        let full = full_set(self.n());
        let mut s: Vec<VSet> = self
            .cuts()
            .into_iter()
            .map(|m| if m & 1 == 1 { full & !m } else { m })
            .collect();
        s.sort_unstable();
        s.dedup();
        s
    }
}

impl PartialEq for Layout {
    fn eq(&self, other: &Self) -> bool {
        self.n() == other.n() && self.split_signature() == other.split_signature()
    }
}

impl Eq for Layout {}

struct NewickParser<'a> {
    s: &'a [u8],
    pos: usize,
    index: &'a HashMap<&'a str, usize>,
    edges: Vec<(usize, usize)>,
    leaf: Vec<usize>,
    count: usize,
}

impl NewickParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn node(&mut self) -> Result<usize> {
        self.skip_ws();
        let id = self.count;
        self.count += 1;
        if self.s.get(self.pos) == Some(&b'(') {
            self.pos += 1;
            loop {
                let child = self.node()?;
                self.edges.push((id, child));
                self.skip_ws();
                match self.s.get(self.pos) {
                    Some(b',') => self.pos += 1,
                    Some(b')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(Error::InvalidLayout(format!("expected `,` or `)` at byte {}", self.pos))),
                }
            }
        } else {
            let start = self.pos;
            while self.pos < self.s.len() && !b"(),; \t\r\n".contains(&self.s[self.pos]) {
                self.pos += 1;
            }
            let name = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
            if name.is_empty() {
                return Err(Error::InvalidLayout(format!("empty label at byte {start}")));
            }
            let v = *self
                .index
                .get(name)
                .ok_or_else(|| Error::LayoutMismatch(format!("unknown vertex {name:?}")))?;
            if self.leaf[v] != usize::MAX {
                return Err(Error::LayoutMismatch(format!("vertex {name:?} repeated")));
            }
            self.leaf[v] = id;
        }
        Ok(id)
    }
}

/// Number of layout shapes on `n` labeled leaves: `(2n-5)!!`, or 1 for `n <= 3`.
pub fn layout_count(n: usize) -> u128 {
    let mut c: u128 = 1;
    let mut k = 3u128;
    for _ in 3..n {
        c *= k;
        k += 2;
    }
    c
}

/// Replays an insertion sequence: vertex `i` (for `i >= 3`) is attached to the
/// middle of edge `choice[i - 3]` of the tree built so far.
fn build_from_choices(n: usize, choices: &[usize]) -> Layout {
    match n {
        0 => panic!("layouts need at least one vertex"),
        1 => return Layout::from_edges(1, &[], vec![0]).expect("single leaf"),
        2 => return Layout::from_edges(2, &[(0, 1)], vec![0, 1]).expect("single edge"),
        _ => {}
    }
    // vertices are nodes 0..n, internal nodes follow
    let mut edges = vec![(0, n), (1, n), (2, n)];
    let mut next = n + 1;
    for (i, &e) in choices.iter().enumerate() {
        let v = i + 3;
        let (a, b) = edges[e];
        let w = next;
        next += 1;
        edges[e] = (a, w);
        edges.push((w, b));
        edges.push((v, w));
    }
    Layout::from_edges(next, &edges, (0..n).collect()).expect("insertion keeps a cubic tree")
}

/// Every layout shape on `n` labeled leaves exactly once, in insertion order.
pub fn enumerate_layouts(n: usize) -> impl Iterator<Item = Layout> {
    let radices: Vec<usize> = (3..n.max(3)).map(|v| 2 * v - 3).collect();
    let mut digits = vec![0usize; radices.len()];
    let mut done = n == 0;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let out = build_from_choices(n, &digits);
        // advance the mixed-radix counter, last digit fastest
        let mut i = digits.len();
        loop {
            if i == 0 {
                done = true;
                break;
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < radices[i] {
                break;
            }
            digits[i] = 0;
        }
        Some(out)
    })
}

/// Width of one layout together with every cut value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WidthResult {
    pub width: u32,
    pub witness: Layout,
    /// `f` of each tree edge, in [`Layout::tree_edges`] order
    pub cut_values: Vec<u32>,
}

impl WidthResult {
    pub fn cuts(&self) -> Vec<(VSet, u32)> {
        self.witness.cuts().into_iter().zip(self.cut_values.iter().copied()).collect()
    }
}

pub fn layout_width(f: &CutFunction, l: &Layout) -> Result<WidthResult> {
    if l.n() != f.n() {
        return Err(Error::LayoutMismatch(format!(
            "layout has {} leaves, graph has {} vertices",
            l.n(),
            f.n()
        )));
    }
    let cut_values: Vec<u32> = l.cuts().into_iter().map(|m| f.eval(m)).collect();
    Ok(WidthResult {
        width: cut_values.iter().copied().max().unwrap_or(0),
        witness: l.clone(),
        cut_values,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    /// Evaluate every layout shape.
    Enumerate,
    /// Depth-first insertion search pruned by partial cut ranks.
    #[default]
    BranchAndBound,
    /// Dynamic programming over vertex subsets, `O(3^n)` cut combinations.
    SubsetDp,
}

impl Strategy {
    /// Default and hard size limits.
    fn limits(self) -> (usize, usize) {
        match self {
            Strategy::Enumerate => (9, 12),
            Strategy::BranchAndBound => (12, 24),
            Strategy::SubsetDp => (16, 24),
        }
    }

    pub fn parse(s: &str) -> Option<Strategy> {
        match s {
            "enumerate" => Some(Strategy::Enumerate),
            "bnb" | "branch-and-bound" => Some(Strategy::BranchAndBound),
            "dp" | "subset-dp" => Some(Strategy::SubsetDp),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct WidthOptions {
    pub strategy: Strategy,
    /// Allow sizes beyond the default limit (up to the hard limit).
    pub force: bool,
    /// Worker threads for branch and bound; 0 or 1 runs sequentially.
    pub jobs: usize,
}

fn check_size(n: usize, strategy: Strategy, force: bool) -> Result<()> {
    let (soft, hard) = strategy.limits();
    let max = if force { hard } else { soft };
    if n > max {
        return Err(Error::SizeBound {
            what: match strategy {
                Strategy::Enumerate => "layout enumeration",
                Strategy::BranchAndBound => "branch and bound",
                Strategy::SubsetDp => "subset dynamic programming",
            },
            max,
            got: n,
        });
    }
    Ok(())
}

fn trivial(f: &CutFunction) -> Option<WidthResult> {
    match f.n() {
        0 => None,
        1 | 2 => {
            let l = build_from_choices(f.n(), &[]);
            Some(layout_width(f, &l).expect("sizes agree"))
        }
        _ => None,
    }
}

/// Minimum width over all layouts, with an optimal witness.
pub fn width_exact(f: &CutFunction, opts: &WidthOptions) -> Result<WidthResult> {
    let n = f.n();
    if n == 0 {
        return Err(Error::LayoutMismatch("graph has no vertices".into()));
    }
    check_size(n, opts.strategy, opts.force)?;
    if let Some(r) = trivial(f) {
        return Ok(r);
    }
    let witness = match opts.strategy {
        Strategy::Enumerate => {
            let mut best: Option<WidthResult> = None;
            for l in enumerate_layouts(n) {
                let r = layout_width(f, &l)?;
                if best.as_ref().is_none_or(|b| r.width < b.width) {
                    best = Some(r);
                }
            }
            return Ok(best.expect("at least one layout"));
        }
        Strategy::SubsetDp => subset_dp(f),
        Strategy::BranchAndBound => {
            if opts.jobs > 1 {
                let w = parallel_bnb_width(f, opts.jobs);
                Search::new(f, w + 1).run().expect("a layout of the optimal width exists")
            } else {
                Search::new(f, u32::MAX).run().expect("some layout exists")
            }
        }
    };
    layout_width(f, &witness)
}

/// A layout of width at most `k`, if one exists.
pub fn decide_width_at_most(f: &CutFunction, k: u32, opts: &WidthOptions) -> Result<Option<Layout>> {
    let n = f.n();
    if n == 0 {
        return Err(Error::LayoutMismatch("graph has no vertices".into()));
    }
    check_size(n, opts.strategy, opts.force)?;
    if let Some(r) = trivial(f) {
        return Ok((r.width <= k).then_some(r.witness));
    }
    match opts.strategy {
        Strategy::BranchAndBound => Ok(Search::new(f, k.saturating_add(1)).first_only().run()),
        _ => {
            let r = width_exact(f, opts)?;
            Ok((r.width <= k).then_some(r.witness))
        }
    }
}

/// Rank-width of a sigma-symmetric graph with the default search.
pub fn rankwidth(g: &SigmaGraph) -> Result<WidthResult> {
    let f = CutFunction::for_sigma_graph(g);
    width_exact(&f, &WidthOptions::default())
}

/// Bi-rank-width with the default search.
pub fn birankwidth(g: &ColoredGraph) -> Result<WidthResult> {
    let f = CutFunction::bicutrk(g)?;
    width_exact(&f, &WidthOptions::default())
}

/// Exact DP: `w(S)` is the best width of a rooted binary tree on `S`
/// counting the edges strictly below its root. The layout hangs the tree on
/// `V - {0}` off the leaf of vertex 0.
fn subset_dp(f: &CutFunction) -> Layout {
    let n = f.n();
    let full = full_set(n);
    let rest = full & !1;
    // index by mask >> 1 over vertices 1..n
    let size = 1usize << (n - 1);
    let mut w = vec![u32::MAX; size];
    let mut split = vec![0u64; size];
    let idx = |m: VSet| (m >> 1) as usize;
    for m in 1..size as u64 {
        let s = m << 1;
        if s.count_ones() == 1 {
            w[m as usize] = 0;
            continue;
        }
        let low = s & s.wrapping_neg();
        let others = s & !low;
        // A contains the lowest vertex of S; B = S - A is nonempty
        let mut best = u32::MAX;
        let mut best_a = 0;
        let mut sub = others;
        loop {
            let a = low | (others & !sub);
            let b = s & !a;
            if b != 0 {
                let v = f
                    .eval(a)
                    .max(f.eval(b))
                    .max(w[idx(a)])
                    .max(w[idx(b)]);
                if v < best {
                    best = v;
                    best_a = a;
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & others;
        }
        w[m as usize] = best;
        split[m as usize] = best_a;
    }
    fn rebuild(s: VSet, split: &[u64]) -> Rooted {
        if s.count_ones() == 1 {
            return Rooted::Leaf(s.trailing_zeros() as usize);
        }
        let a = split[(s >> 1) as usize];
        Rooted::Node(Box::new(rebuild(a, split)), Box::new(rebuild(s & !a, split)))
    }
    let tree = Rooted::Node(Box::new(Rooted::Leaf(0)), Box::new(rebuild(rest, &split)));
    Layout::from_rooted(&tree).expect("DP tree covers every vertex")
}

/// Incremental tree for insertion search, rooted at the leaf of vertex 0.
/// Nodes `0..n` are the vertex leaves; every non-root node names the edge to its parent.
struct Search<'a, 'g> {
    f: &'a CutFunction<'g>,
    n: usize,
    parent: Vec<usize>,
    mask: Vec<VSet>,
    edges: Vec<usize>,
    best: u32,
    best_tree: Option<Vec<(usize, usize)>>,
    floor: u32,
    partial_memo: HashMap<(VSet, VSet), u32>,
    stop: Option<&'a AtomicU32>,
    first_only: bool,
}

impl<'a, 'g> Search<'a, 'g> {
    /// `bound`: only layouts of width strictly below it are reported.
    fn new(f: &'a CutFunction<'g>, bound: u32) -> Self {
        let n = f.n();
        debug_assert!(n >= 3);
        let c = n;
        let mut parent = vec![usize::MAX; 2 * n];
        let mut mask = vec![0; 2 * n];
        for v in 0..n {
            mask[v] = 1 << v;
        }
        parent[c] = 0;
        parent[1] = c;
        parent[2] = c;
        mask[c] = 0b110;
        let floor = (0..n).map(|v| f.eval(1 << v)).max().unwrap_or(0);
        Search {
            f,
            n,
            parent,
            mask,
            edges: vec![c, 1, 2],
            best: bound,
            best_tree: None,
            floor,
            partial_memo: HashMap::new(),
            stop: None,
            first_only: false,
        }
    }

    fn first_only(mut self) -> Self {
        self.first_only = true;
        self
    }

    fn with_shared(mut self, shared: &'a AtomicU32) -> Self {
        self.stop = Some(shared);
        self
    }

    fn bound(&self) -> u32 {
        match self.stop {
            Some(s) => self.best.min(s.load(Ordering::Relaxed)),
            None => self.best,
        }
    }

    fn partial(&mut self, a: VSet, b: VSet) -> u32 {
        if let Some(&v) = self.partial_memo.get(&(a, b)) {
            return v;
        }
        let v = self.f.partial(a, b);
        self.partial_memo.insert((a, b), v);
        v
    }

    fn lower_bound(&mut self, inserted: VSet) -> u32 {
        let mut lb = 0;
        for i in 0..self.edges.len() {
            let a = self.mask[self.edges[i]];
            let v = self.partial(a, inserted & !a);
            lb = lb.max(v);
        }
        lb
    }

    fn insert(&mut self, v: usize, e: usize) -> usize {
        let w = self.n + v - 2;
        let p = self.parent[e];
        self.parent[w] = p;
        self.parent[e] = w;
        self.parent[v] = w;
        self.mask[w] = self.mask[e] | 1 << v;
        let mut a = p;
        while a != 0 {
            self.mask[a] |= 1 << v;
            a = self.parent[a];
        }
        self.edges.push(w);
        self.edges.push(v);
        w
    }

    fn remove(&mut self, v: usize, e: usize, w: usize) {
        self.edges.pop();
        self.edges.pop();
        let p = self.parent[w];
        self.parent[e] = p;
        self.parent[v] = usize::MAX;
        let mut a = p;
        while a != 0 {
            self.mask[a] &= !(1 << v);
            a = self.parent[a];
        }
    }

    fn snapshot(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|&c| (c, self.parent[c])).collect()
    }

    /// Places vertices `v..n`; `prefix` restricts the first choices.
    fn dfs(&mut self, v: usize, inserted: VSet, prefix: &[usize]) -> bool {
        if v == self.n {
            let lb = self.lower_bound(inserted);
            if lb < self.bound() {
                self.best = lb;
                self.best_tree = Some(self.snapshot());
                if let Some(s) = self.stop {
                    s.fetch_min(lb, Ordering::Relaxed);
                }
                return lb <= self.floor || self.first_only;
            }
            return false;
        }
        let edge_count = self.edges.len();
        let mut options: Vec<(u32, usize)> = Vec::with_capacity(edge_count);
        let range: Vec<usize> = match prefix.first() {
            Some(&e) => vec![e],
            None => (0..edge_count).collect(),
        };
        let ins = inserted | 1 << v;
        for i in range {
            let e = self.edges[i];
            let w = self.insert(v, e);
            let lb = self.lower_bound(ins);
            self.remove(v, e, w);
            if lb < self.bound() {
                options.push((lb, i));
            }
        }
        options.sort_unstable();
        for (lb, i) in options {
            if lb >= self.bound() {
                continue;
            }
            let e = self.edges[i];
            let w = self.insert(v, e);
            let rest = if prefix.is_empty() { prefix } else { &prefix[1..] };
            let done = self.dfs(v + 1, ins, rest);
            self.remove(v, e, w);
            if done {
                return true;
            }
        }
        false
    }

    fn layout_from(&self, tree: &[(usize, usize)]) -> Layout {
        Layout::from_edges(2 * self.n - 2, tree, (0..self.n).collect())
            .expect("search keeps a valid cubic tree")
    }

    fn run(mut self) -> Option<Layout> {
        self.dfs(3, 0b111, &[]);
        self.best_tree.as_ref().map(|t| self.layout_from(t))
    }
}

/// Optimal width by branch and bound, the first two insertion choices split
/// across a rayon pool sharing the incumbent.
fn parallel_bnb_width(f: &CutFunction, jobs: usize) -> u32 {
    let n = f.n();
    let mut prefixes: Vec<Vec<usize>> = vec![vec![]];
    for v in 3..n.min(5) {
        let radix = 2 * v - 3;
        prefixes = prefixes
            .into_iter()
            .flat_map(|p| (0..radix).map(move |e| [p.clone(), vec![e]].concat()))
            .collect();
    }
    let shared = AtomicU32::new(u32::MAX);
    let graph = f.graph().clone();
    let kind = f.kind();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool");
    pool.install(|| {
        prefixes.par_iter().for_each(|p| {
            let local = CutFunction::of_kind(&graph, kind).expect("size checked by caller");
            let mut s = Search::new(&local, u32::MAX).with_shared(&shared);
            s.dfs(3, 0b111, p);
        });
    });
    shared.load(Ordering::Relaxed)
}

/// Renders cut values as `side: value` lines using vertex labels.
pub fn describe_cuts(r: &WidthResult, labels: &[String]) -> String {
    let mut s = String::new();
    for (mask, v) in r.cuts() {
        let names: Vec<&str> = members(mask).into_iter().map(|i| labels[i].as_str()).collect();
        let _ = writeln!(s, "{{{}}} {v}", names.join(","));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutrank::CutFunction;
    use crate::graph::{default_labels, SigmaGraph};

    fn cycle(n: usize) -> SigmaGraph {
        let e: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        SigmaGraph::undirected(n, &e).unwrap()
    }

    #[test]
    fn shape_counts() {
        for n in 1..=8 {
            let shapes: Vec<Layout> = enumerate_layouts(n).collect();
            assert_eq!(shapes.len() as u128, layout_count(n), "n = {n}");
            let distinct: std::collections::HashSet<Vec<VSet>> =
                shapes.iter().map(|l| l.split_signature()).collect();
            assert_eq!(distinct.len(), shapes.len());
        }
        assert_eq!(layout_count(6), 105);
        assert_eq!(layout_count(4), 3);
    }

    #[test]
    fn newick_round_trip() {
        let labels = default_labels(6);
        for l in enumerate_layouts(6) {
            let text = l.to_newick(&labels);
            let (back, w) = Layout::parse_newick(&text, &labels).unwrap();
            assert_eq!(back, l);
            assert_eq!(w, None);
            assert_eq!(back.to_newick(&labels), text);
        }
        let (l, w) = Layout::parse_newick("((v1,v2),(v3,(v4,v5)));\n# width 2", &default_labels(5)).unwrap();
        assert_eq!(w, Some(2));
        assert_eq!(l.n(), 5);
        assert_eq!(l.to_newick(&default_labels(5)), "(v1,(v2,(v3,(v4,v5))));");
        let (one, _) = Layout::parse_newick("v1;", &default_labels(1)).unwrap();
        assert_eq!(one.n(), 1);
        assert!(Layout::parse_newick("(v1,v2);", &default_labels(3)).is_err());
        assert!(Layout::parse_newick("(v1,v1,v2);", &default_labels(2)).is_err());
        assert!(Layout::parse_newick("(v1,(v2,v3,v4,v5));", &default_labels(5)).is_err());
    }

    #[test]
    fn caterpillar_on_c5() {
        let c5 = cycle(5);
        let f = CutFunction::for_sigma_graph(&c5);
        let (l, _) = Layout::parse_newick("(v1,(v2,(v3,(v4,v5))));", c5.graph().labels()).unwrap();
        let r = layout_width(&f, &l).unwrap();
        assert_eq!(r.width, 2);
        assert_eq!(r.cut_values.len(), 7);
    }

    #[test]
    fn strategies_agree() {
        for n in 3..=8 {
            let c = cycle(n);
            let f = CutFunction::for_sigma_graph(&c);
            let expected = if n >= 5 { 2 } else { 1 };
            for strategy in [Strategy::Enumerate, Strategy::BranchAndBound, Strategy::SubsetDp] {
                let r = width_exact(&f, &WidthOptions { strategy, ..Default::default() }).unwrap();
                assert_eq!(r.width, expected, "C{n} {strategy:?}");
                assert_eq!(layout_width(&f, &r.witness).unwrap().width, r.width);
            }
            let par = width_exact(&f, &WidthOptions { jobs: 3, ..Default::default() }).unwrap();
            let seq = width_exact(&f, &WidthOptions::default()).unwrap();
            assert_eq!(par, seq);
        }
    }

    #[test]
    fn degenerate_sizes() {
        let one = SigmaGraph::undirected(1, &[]).unwrap();
        assert_eq!(rankwidth(&one).unwrap().width, 0);
        let two = SigmaGraph::undirected(2, &[(0, 1)]).unwrap();
        assert_eq!(rankwidth(&two).unwrap().width, 1);
        let big = SigmaGraph::undirected(13, &[]).unwrap();
        assert!(matches!(rankwidth(&big), Err(Error::SizeBound { .. })));
        let f = CutFunction::for_sigma_graph(&big);
        let forced = WidthOptions { force: true, ..Default::default() };
        assert_eq!(width_exact(&f, &forced).unwrap().width, 0);
    }

    #[test]
    fn decisions() {
        let c5 = cycle(5);
        let f = CutFunction::for_sigma_graph(&c5);
        let o = WidthOptions::default();
        assert!(decide_width_at_most(&f, 1, &o).unwrap().is_none());
        let l = decide_width_at_most(&f, 2, &o).unwrap().unwrap();
        assert!(layout_width(&f, &l).unwrap().width <= 2);
        assert!(decide_width_at_most(&f, 5, &o).unwrap().is_some());
    }

    #[test]
    fn restriction() {
        let (l, _) = Layout::parse_newick("((v1,v2),(v3,(v4,v5)));", &default_labels(5)).unwrap();
        let r = l.restrict(&[1, 3, 4]).unwrap();
        assert_eq!(r.n(), 3);
        let r2 = l.restrict(&[0, 1, 2, 3]).unwrap();
        let labels = ["v1", "v2", "v3", "v4"].map(String::from);
        assert_eq!(r2.to_newick(&labels), "(v1,(v2,(v3,v4)));");
    }
}
