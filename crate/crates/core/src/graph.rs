//! Edge-colored graphs over a finite field, sigma-symmetry, the standard
//! encodings of undirected, directed and oriented graphs, and the text format.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::Rng;

use crate::error::{parse_err, Error, Result};
use crate::field::{Elem, Field, QuadraticExtension, Sesquimorphism};
use crate::matrix::FMatrix;

/// Code of the generator `a` of GF(4) under the canonical modulus `x^2 + x + 1`.
pub const GF4_A: Elem = 2;
/// Code of `a^2` in GF(4).
pub const GF4_A2: Elem = 3;

/// A loop-free graph whose arcs carry nonzero field elements.
///
/// `adj[x][y]` is the color of the arc `(x, y)`; zero means no arc.
#[derive(Clone, PartialEq, Eq)]
pub struct ColoredGraph {
    labels: Vec<String>,
    adj: FMatrix,
}

fn check_labels(labels: &[String]) -> Result<()> {
    let mut seen = HashMap::new();
    for l in labels {
        if l.is_empty()
            || l.chars()
                .any(|c| c.is_whitespace() || "(),;#".contains(c))
        {
            return Err(Error::UnknownVertex(l.clone()));
        }
        if seen.insert(l.as_str(), ()).is_some() {
            return Err(Error::DuplicateVertex(l.clone()));
        }
    }
    Ok(())
}

/// Labels `v1 .. vn`.
pub fn default_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("v{i}")).collect()
}

impl ColoredGraph {
    /// The edgeless graph on the given labels.
    pub fn new(field: &Field, labels: Vec<String>) -> Result<Self> {
        check_labels(&labels)?;
        let n = labels.len();
        Ok(ColoredGraph {
            labels,
            adj: FMatrix::zeros(field, n, n),
        })
    }

    /// The edgeless graph on `v1 .. vn`.
    pub fn empty(field: &Field, n: usize) -> Self {
        Self::new(field, default_labels(n)).expect("default labels are valid")
    }

    pub fn from_matrix(labels: Vec<String>, adj: FMatrix) -> Result<Self> {
        check_labels(&labels)?;
        let n = labels.len();
        if adj.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "adjacency matrix {:?} for {n} vertices",
                adj.shape()
            )));
        }
        if let Some(i) = (0..n).find(|&i| adj.get(i, i) != 0) {
            return Err(Error::Loop(labels[i].clone()));
        }
        let adj = FMatrix::from_rows(adj.field(), n, n, adj.entries().to_vec())?;
        Ok(ColoredGraph { labels, adj })
    }

    /// Graph on `v1 .. vn` with the listed colored arcs `(x, y, color)`.
    pub fn from_arcs(field: &Field, n: usize, arcs: &[(usize, usize, Elem)]) -> Result<Self> {
        let mut g = Self::empty(field, n);
        for &(x, y, c) in arcs {
            g.set(x, y, c)?;
        }
        Ok(g)
    }

    /// GF(2) graph with `adj[x][y] = 1` exactly for the listed arcs.
    pub fn digraph(n: usize, arcs: &[(usize, usize)]) -> Result<Self> {
        let f = Field::prime(2)?;
        let arcs: Vec<_> = arcs.iter().map(|&(x, y)| (x, y, 1)).collect();
        Self::from_arcs(&f, n, &arcs)
    }

    pub fn field(&self) -> &Field {
        self.adj.field()
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownVertex(label.into()))
    }

    pub fn adj(&self) -> &FMatrix {
        &self.adj
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Elem {
        self.adj.get(x, y)
    }

    pub fn set(&mut self, x: usize, y: usize, c: Elem) -> Result<()> {
        let n = self.n();
        if x >= n || y >= n {
            return Err(Error::UnknownVertex(x.max(y).to_string()));
        }
        self.field().check(c)?;
        if x == y && c != 0 {
            return Err(Error::Loop(self.labels[x].clone()));
        }
        self.adj.set(x, y, c);
        Ok(())
    }

    /// Set both `(x, y)` and `(y, x)`, the latter to `sigma(c)`.
    pub fn set_sym(&mut self, sigma: &Sesquimorphism, x: usize, y: usize, c: Elem) -> Result<()> {
        self.set(x, y, c)?;
        self.set(y, x, sigma.apply(c))
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(Error::DimensionMismatch("label count differs".into()));
        }
        check_labels(&labels)?;
        self.labels = labels;
        Ok(self)
    }

    pub fn is_sigma_symmetric(&self, sigma: &Sesquimorphism) -> Result<bool> {
        if sigma.field() != self.field() {
            return Err(Error::FieldMismatch);
        }
        let n = self.n();
        Ok((0..n).all(|x| (x + 1..n).all(|y| self.get(y, x) == sigma.apply(self.get(x, y)))))
    }

    /// `G[X]` by vertex indices, in the given order.
    pub fn induced(&self, xs: &[usize]) -> ColoredGraph {
        ColoredGraph {
            labels: xs.iter().map(|&i| self.labels[i].clone()).collect(),
            adj: self
                .adj
                .select(xs, xs)
                .with_labels((0..xs.len()).collect(), (0..xs.len()).collect())
                .expect("shape matches"),
        }
    }

    pub fn induced_by_labels<S: AsRef<str>>(&self, xs: &[S]) -> Result<ColoredGraph> {
        let idx = xs
            .iter()
            .map(|l| self.index_of(l.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        let mut sorted = idx.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != idx.len() {
            return Err(Error::DuplicateVertex("in vertex subset".into()));
        }
        Ok(self.induced(&idx))
    }

    /// `G - v`.
    pub fn delete_vertex(&self, v: usize) -> ColoredGraph {
        let keep: Vec<usize> = (0..self.n()).filter(|&u| u != v).collect();
        self.induced(&keep)
    }

    /// The graph whose vertex `perm[i]` plays the role of vertex `i` here.
    pub fn relabeled(&self, perm: &[usize]) -> ColoredGraph {
        let n = self.n();
        let mut inv = vec![0; n];
        for (i, &p) in perm.iter().enumerate() {
            inv[p] = i;
        }
        self.induced(&inv)
    }

    /// Applies `f` to every entry; `f` must fix zero.
    pub fn map_colors(&self, f: impl Fn(Elem) -> Elem) -> ColoredGraph {
        ColoredGraph {
            labels: self.labels.clone(),
            adj: self.adj.map(f),
        }
    }

    /// Adds a vertex with outgoing colors `row` and incoming colors `col`.
    pub fn extended(&self, label: &str, row: &[Elem], col: &[Elem]) -> Result<ColoredGraph> {
        let n = self.n();
        if row.len() != n || col.len() != n {
            return Err(Error::DimensionMismatch("extension row length".into()));
        }
        let mut labels = self.labels.clone();
        labels.push(label.to_string());
        let mut data = Vec::with_capacity((n + 1) * (n + 1));
        for i in 0..n {
            data.extend_from_slice(self.adj.row(i));
            data.push(col[i]);
        }
        data.extend_from_slice(row);
        data.push(0);
        let adj = FMatrix::from_rows(self.field(), n + 1, n + 1, data)?;
        Self::from_matrix(labels, adj)
    }

    /// Disjoint union; labels of `other` are suffixed if they clash.
    pub fn disjoint_union(&self, other: &ColoredGraph) -> Result<ColoredGraph> {
        if other.field() != self.field() {
            return Err(Error::FieldMismatch);
        }
        let (n, m) = (self.n(), other.n());
        let mut labels = self.labels.clone();
        for l in &other.labels {
            let mut name = l.clone();
            while labels.contains(&name) {
                name.push('\'');
            }
            labels.push(name);
        }
        let mut g = ColoredGraph::new(self.field(), labels)?;
        for x in 0..n {
            for y in 0..n {
                g.adj.set(x, y, self.get(x, y));
            }
        }
        for x in 0..m {
            for y in 0..m {
                g.adj.set(n + x, n + y, other.get(x, y));
            }
        }
        Ok(g)
    }

    /// Number of ordered pairs with a nonzero color.
    pub fn arc_count(&self) -> usize {
        self.adj.entries().iter().filter(|&&c| c != 0).count()
    }

    pub fn is_symmetric_pair_free(&self) -> bool {
        let n = self.n();
        (0..n).all(|x| (0..n).all(|y| self.get(x, y) == 0 || self.get(y, x) == 0))
    }

    /// Weakly connected components, each sorted, ordered by least vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut stack = vec![s];
            comp[s] = id;
            let mut members = vec![s];
            while let Some(u) = stack.pop() {
                for w in 0..n {
                    if comp[w] == usize::MAX && (self.get(u, w) != 0 || self.get(w, u) != 0) {
                        comp[w] = id;
                        members.push(w);
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    fn reaches_all(&self, forward: bool) -> bool {
        let n = self.n();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut stack = vec![0];
        while let Some(u) = stack.pop() {
            for w in 0..n {
                let c = if forward { self.get(u, w) } else { self.get(w, u) };
                if !seen[w] && c != 0 {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Every vertex reaches every other along arcs with nonzero color.
    pub fn is_strongly_connected(&self) -> bool {
        self.reaches_all(true) && self.reaches_all(false)
    }

    /// Graphviz rendering with one labeled arc per nonzero entry.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph G {\n");
        for l in &self.labels {
            let _ = writeln!(s, "  \"{l}\";");
        }
        for x in 0..self.n() {
            for y in 0..self.n() {
                let c = self.get(x, y);
                if c != 0 {
                    let _ = writeln!(
                        s,
                        "  \"{}\" -> \"{}\" [label=\"{c}\"];",
                        self.labels[x], self.labels[y]
                    );
                }
            }
        }
        s.push_str("}\n");
        s
    }
}

impl std::fmt::Debug for ColoredGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ColoredGraph({:?}, {:?})", self.labels, self.adj)
    }
}

/// A graph together with a sesqui-morphism it is symmetric under.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SigmaGraph {
    graph: ColoredGraph,
    sigma: Sesquimorphism,
}

impl SigmaGraph {
    pub fn new(graph: ColoredGraph, sigma: Sesquimorphism) -> Result<Self> {
        if !graph.is_sigma_symmetric(&sigma)? {
            return Err(Error::NotSigmaSymmetric);
        }
        Ok(SigmaGraph { graph, sigma })
    }

    /// Caller guarantees sigma-symmetry.
    pub(crate) fn new_unchecked(graph: ColoredGraph, sigma: Sesquimorphism) -> Self {
        debug_assert!(graph.is_sigma_symmetric(&sigma).unwrap_or(false));
        SigmaGraph { graph, sigma }
    }

    /// Undirected graph on `v1 .. vn` over GF(2) with the identity.
    pub fn undirected(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let f = Field::prime(2)?;
        let sigma = Sesquimorphism::identity(&f);
        let mut g = ColoredGraph::empty(&f, n);
        for &(x, y) in edges {
            g.set_sym(&sigma, x, y, 1)?;
        }
        Ok(SigmaGraph { graph: g, sigma })
    }

    /// Two vertices joined by color `a` forwards and `sigma(a)` backwards.
    pub fn const_pair(sigma: &Sesquimorphism, a: Elem) -> Result<Self> {
        let mut g = ColoredGraph::empty(sigma.field(), 2);
        g.set_sym(sigma, 0, 1, a)?;
        Ok(SigmaGraph {
            graph: g,
            sigma: sigma.clone(),
        })
    }

    pub fn graph(&self) -> &ColoredGraph {
        &self.graph
    }

    pub fn into_graph(self) -> ColoredGraph {
        self.graph
    }

    pub fn sigma(&self) -> &Sesquimorphism {
        &self.sigma
    }

    pub fn field(&self) -> &Field {
        self.graph.field()
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn induced(&self, xs: &[usize]) -> SigmaGraph {
        SigmaGraph {
            graph: self.graph.induced(xs),
            sigma: self.sigma.clone(),
        }
    }

    pub fn delete_vertex(&self, v: usize) -> SigmaGraph {
        SigmaGraph {
            graph: self.graph.delete_vertex(v),
            sigma: self.sigma.clone(),
        }
    }

    pub fn relabeled(&self, perm: &[usize]) -> SigmaGraph {
        SigmaGraph {
            graph: self.graph.relabeled(perm),
            sigma: self.sigma.clone(),
        }
    }
}

fn index_map(labels: &[String]) -> HashMap<&str, usize> {
    labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect()
}

fn resolve(map: &HashMap<&str, usize>, l: &str) -> Result<usize> {
    map.get(l).copied().ok_or_else(|| Error::UnknownVertex(l.into()))
}

/// An undirected graph as a GF(2) graph with the identity.
pub fn encode_undirected(labels: Vec<String>, edges: &[(String, String)]) -> Result<SigmaGraph> {
    let f = Field::prime(2)?;
    let sigma = Sesquimorphism::identity(&f);
    let mut g = ColoredGraph::new(&f, labels)?;
    let mut resolved = Vec::with_capacity(edges.len());
    {
        let map = index_map(&g.labels);
        for (a, b) in edges {
            let x = resolve(&map, a)?;
            let y = resolve(&map, b)?;
            if x == y {
                return Err(Error::Loop(a.clone()));
            }
            resolved.push((x, y));
        }
    }
    for (x, y) in resolved {
        g.set_sym(&sigma, x, y, 1)?;
    }
    SigmaGraph::new(g, sigma)
}

/// A directed graph over GF(4) with the conjugation: a bidirected pair gets 1,
/// a lone arc `(x, y)` gets `a` at `(x, y)` and `a^2` at `(y, x)`.
pub fn encode_directed(labels: Vec<String>, arcs: &[(String, String)]) -> Result<SigmaGraph> {
    let f = Field::new(2, 2)?;
    let sigma = Sesquimorphism::frobenius_conjugation(&f)?;
    let mut g = ColoredGraph::new(&f, labels)?;
    let n = g.n();
    let mut present = vec![false; n * n];
    {
        let map = index_map(&g.labels);
        for (a, b) in arcs {
            let x = resolve(&map, a)?;
            let y = resolve(&map, b)?;
            if x == y {
                return Err(Error::Loop(a.clone()));
            }
            present[x * n + y] = true;
        }
    }
    for x in 0..n {
        for y in 0..n {
            let c = match (present[x * n + y], present[y * n + x]) {
                (true, true) => 1,
                (true, false) => GF4_A,
                (false, true) => GF4_A2,
                (false, false) => 0,
            };
            g.adj.set(x, y, c);
        }
    }
    SigmaGraph::new(g, sigma)
}

/// Index form of [`encode_directed`] on `v1 .. vn`.
pub fn directed(n: usize, arcs: &[(usize, usize)]) -> Result<SigmaGraph> {
    let labels = default_labels(n);
    let named: Vec<_> = arcs
        .iter()
        .map(|&(x, y)| {
            let l = |i: usize| labels.get(i).cloned().unwrap_or_else(|| format!("#{i}"));
            (l(x), l(y))
        })
        .collect();
    encode_directed(labels, &named)
}

/// An oriented graph over GF(3) with negation: arc `(x, y)` gets 1 forwards
/// and `-1` backwards.
pub fn encode_oriented(labels: Vec<String>, arcs: &[(String, String)]) -> Result<SigmaGraph> {
    let f = Field::prime(3)?;
    let sigma = Sesquimorphism::negation(&f);
    let mut g = ColoredGraph::new(&f, labels)?;
    {
        let map = index_map(&g.labels);
        let mut resolved = Vec::with_capacity(arcs.len());
        for (a, b) in arcs {
            let x = resolve(&map, a)?;
            let y = resolve(&map, b)?;
            if x == y {
                return Err(Error::Loop(a.clone()));
            }
            resolved.push((x, y));
        }
        for &(x, y) in &resolved {
            if resolved.contains(&(y, x)) {
                return Err(Error::OppositeArcs(
                    g.labels[x].clone(),
                    g.labels[y].clone(),
                ));
            }
        }
        for (x, y) in resolved {
            g.adj.set(x, y, 1);
            g.adj.set(y, x, 2);
        }
    }
    SigmaGraph::new(g, sigma)
}

/// The sigma~-symmetric graph over the quadratic extension with
/// `adj~[x][y] = f~(adj[x][y], adj[y][x])`.
pub fn tilde_with(g: &ColoredGraph, ext: &QuadraticExtension) -> Result<SigmaGraph> {
    if ext.base() != g.field() {
        return Err(Error::FieldMismatch);
    }
    let n = g.n();
    let mut data = vec![0; n * n];
    for x in 0..n {
        for y in 0..n {
            if x != y {
                data[x * n + y] = ext.f_tilde(g.get(x, y), g.get(y, x));
            }
        }
    }
    let adj = FMatrix::from_rows(ext.ext(), n, n, data)?;
    let graph = ColoredGraph::from_matrix(g.labels.clone(), adj)?;
    SigmaGraph::new(graph, ext.sigma_tilde().clone())
}

pub fn tilde(g: &ColoredGraph) -> Result<SigmaGraph> {
    tilde_with(g, &QuadraticExtension::new(g.field())?)
}

/// Recovers `G` from its tilde graph.
pub fn untilde(t: &ColoredGraph, ext: &QuadraticExtension) -> Result<ColoredGraph> {
    if ext.ext() != t.field() {
        return Err(Error::FieldMismatch);
    }
    let n = t.n();
    let mut g = ColoredGraph::new(ext.base(), t.labels.clone())?;
    for x in 0..n {
        for y in 0..n {
            g.adj.set(x, y, ext.coordinates(t.get(x, y)).0);
        }
    }
    Ok(g)
}

// Random instances for tests and the self-check battery.

/// Arbitrary graph: each ordered pair independently nonzero with probability `density`.
pub fn random_graph(field: &Field, n: usize, density: f64, rng: &mut impl Rng) -> ColoredGraph {
    let mut g = ColoredGraph::empty(field, n);
    let q = field.order();
    for x in 0..n {
        for y in 0..n {
            if x != y && rng.gen_bool(density) {
                g.adj.set(x, y, rng.gen_range(1..q));
            }
        }
    }
    g
}

/// Sigma-symmetric graph: each pair `x < y` independently an edge with
/// probability `density`, with a uniform nonzero color.
pub fn random_sigma_graph(
    sigma: &Sesquimorphism,
    n: usize,
    density: f64,
    rng: &mut impl Rng,
) -> SigmaGraph {
    let f = sigma.field();
    let mut g = ColoredGraph::empty(f, n);
    let q = f.order();
    for x in 0..n {
        for y in x + 1..n {
            if rng.gen_bool(density) {
                let c = rng.gen_range(1..q);
                g.adj.set(x, y, c);
                g.adj.set(y, x, sigma.apply(c));
            }
        }
    }
    SigmaGraph::new_unchecked(g, sigma.clone())
}

/// Random GF(2) digraph: each ordered pair an arc with probability `density`.
pub fn random_digraph(n: usize, density: f64, rng: &mut impl Rng) -> ColoredGraph {
    let f = Field::prime(2).expect("2 is prime");
    random_graph(&f, n, density, rng)
}

/// Every sigma-symmetric graph on `n` vertices, by upper-triangle color vectors.
pub fn all_sigma_graphs(sigma: &Sesquimorphism, n: usize) -> impl Iterator<Item = SigmaGraph> + '_ {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|x| (x + 1..n).map(move |y| (x, y)))
        .collect();
    let q = u64::from(sigma.field().order());
    let total = q.pow(pairs.len() as u32);
    (0..total).map(move |mut code| {
        let mut g = ColoredGraph::empty(sigma.field(), n);
        for &(x, y) in &pairs {
            let c = (code % q) as Elem;
            code /= q;
            g.adj.set(x, y, c);
            g.adj.set(y, x, sigma.apply(c));
        }
        SigmaGraph::new_unchecked(g, sigma.clone())
    })
}

/// Parsed content of a graph file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphFile {
    pub graph: ColoredGraph,
    pub sigma: Option<Sesquimorphism>,
}

impl GraphFile {
    /// The graph as a sigma-symmetric graph, if the file declared a sigma.
    pub fn sigma_graph(&self) -> Result<SigmaGraph> {
        let sigma = self
            .sigma
            .clone()
            .ok_or_else(|| Error::Unsupported("graph file has no sigma line".into()))?;
        SigmaGraph::new(self.graph.clone(), sigma)
    }
}

/// Parses the line-oriented graph format.
pub fn parse_graph(text: &str) -> Result<GraphFile> {
    let mut field: Option<Field> = None;
    let mut sigma = None;
    let mut graph: Option<ColoredGraph> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        let key = words.next().unwrap_or_default();
        let rest: Vec<&str> = words.collect();
        match key {
            "field" => {
                let [p, k] = rest.as_slice() else {
                    return Err(parse_err(line_no, "expected `field <p> <k>`"));
                };
                let p = p.parse().map_err(|_| parse_err(line_no, "bad characteristic"))?;
                let k = k.parse().map_err(|_| parse_err(line_no, "bad degree"))?;
                if field.is_some() {
                    return Err(parse_err(line_no, "field declared twice"));
                }
                field = Some(Field::new(p, k)?);
            }
            "sigma" => {
                let f = field
                    .as_ref()
                    .ok_or_else(|| parse_err(line_no, "sigma before field"))?;
                sigma = Some(Sesquimorphism::parse(f, &rest.join(" "))?);
            }
            "vertices" => {
                let f = field
                    .as_ref()
                    .ok_or_else(|| parse_err(line_no, "vertices before field"))?;
                if graph.is_some() {
                    return Err(parse_err(line_no, "vertices declared twice"));
                }
                let labels = rest.iter().map(|s| s.to_string()).collect();
                graph = Some(ColoredGraph::new(f, labels)?);
            }
            "edge" => {
                let g = graph
                    .as_mut()
                    .ok_or_else(|| parse_err(line_no, "edge before vertices"))?;
                let [u, v, c] = rest.as_slice() else {
                    return Err(parse_err(line_no, "expected `edge <u> <v> <code>`"));
                };
                let x = g.index_of(u)?;
                let y = g.index_of(v)?;
                let c: Elem = c.parse().map_err(|_| parse_err(line_no, "bad element code"))?;
                g.set(x, y, c)?;
            }
            other => return Err(parse_err(line_no, format!("unknown declaration {other:?}"))),
        }
    }
    let graph = match (graph, field) {
        (Some(g), _) => g,
        (None, Some(f)) => ColoredGraph::new(&f, Vec::new())?,
        (None, None) => return Err(parse_err(0, "missing field declaration")),
    };
    Ok(GraphFile { graph, sigma })
}

/// Writes the graph format; every nonzero ordered pair in row-major order.
pub fn write_graph(g: &ColoredGraph, sigma: Option<&Sesquimorphism>) -> String {
    let f = g.field();
    let mut s = format!("field {} {}\n", f.characteristic(), f.degree());
    if let Some(sigma) = sigma {
        let _ = writeln!(s, "sigma {}", sigma.spec_string());
    }
    let _ = writeln!(s, "vertices {}", g.labels.join(" "));
    for x in 0..g.n() {
        for y in 0..g.n() {
            let c = g.get(x, y);
            if c != 0 {
                let _ = writeln!(s, "edge {} {} {c}", g.labels[x], g.labels[y]);
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn pairs(v: &[(&str, &str)]) -> Vec<(String, String)> {
        v.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    #[test]
    fn undirected_encoding() {
        let k3 = SigmaGraph::undirected(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(k3.graph().adj().entries(), &[0, 1, 1, 1, 0, 1, 1, 1, 0]);
        let e = SigmaGraph::undirected(4, &[]).unwrap();
        assert!(e.graph().adj().is_zero());
        let err = encode_undirected(names(&["a"]), &pairs(&[("a", "a")])).unwrap_err();
        assert_eq!(err, Error::Loop("a".into()));
    }

    #[test]
    fn directed_encoding() {
        let g = encode_directed(names(&["x", "y"]), &pairs(&[("x", "y")])).unwrap();
        assert_eq!(g.graph().get(0, 1), GF4_A);
        assert_eq!(g.graph().get(1, 0), GF4_A2);
        let b = encode_directed(names(&["x", "y"]), &pairs(&[("x", "y"), ("y", "x")])).unwrap();
        assert_eq!(b.graph().get(0, 1), 1);
        assert_eq!(b.graph().get(1, 0), 1);
    }

    #[test]
    fn oriented_encoding() {
        let g = encode_oriented(names(&["x", "y"]), &pairs(&[("x", "y")])).unwrap();
        assert_eq!((g.graph().get(0, 1), g.graph().get(1, 0)), (1, 2));
        let err = encode_oriented(names(&["x", "y"]), &pairs(&[("x", "y"), ("y", "x")]));
        assert!(matches!(err, Err(Error::OppositeArcs(..))));
        let t = encode_oriented(
            names(&["a", "b", "c"]),
            &pairs(&[("a", "b"), ("b", "c"), ("c", "a")]),
        )
        .unwrap();
        assert_eq!(t.graph().adj().entries(), &[0, 1, 2, 2, 0, 1, 1, 2, 0]);
    }

    #[test]
    fn symmetry_checks() {
        let f4 = Field::new(2, 2).unwrap();
        let s4 = Sesquimorphism::frobenius_conjugation(&f4).unwrap();
        let good = ColoredGraph::from_arcs(&f4, 2, &[(0, 1, GF4_A), (1, 0, GF4_A2)]).unwrap();
        assert!(good.is_sigma_symmetric(&s4).unwrap());
        let bad = ColoredGraph::from_arcs(&f4, 2, &[(0, 1, GF4_A), (1, 0, GF4_A)]).unwrap();
        assert!(!bad.is_sigma_symmetric(&s4).unwrap());
        let f3 = Field::prime(3).unwrap();
        assert_eq!(
            good.is_sigma_symmetric(&Sesquimorphism::identity(&f3)),
            Err(Error::FieldMismatch)
        );
    }

    #[test]
    fn tilde_of_single_arc_and_pair() {
        let f2 = Field::prime(2).unwrap();
        let ext = QuadraticExtension::new(&f2).unwrap();
        let arc = ColoredGraph::digraph(2, &[(0, 1)]).unwrap();
        let t = tilde_with(&arc, &ext).unwrap();
        assert_eq!(t.graph().get(0, 1), ext.gamma());
        assert_eq!(t.graph().get(1, 0), ext.tau());
        let pair = ColoredGraph::digraph(2, &[(0, 1), (1, 0)]).unwrap();
        let t = tilde_with(&pair, &ext).unwrap();
        assert_eq!((t.graph().get(0, 1), t.graph().get(1, 0)), (1, 1));
        assert_eq!(untilde(t.graph(), &ext).unwrap(), pair);
    }

    #[test]
    fn tilde_is_symmetric_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [2, 3] {
            let f = Field::prime(p).unwrap();
            let ext = QuadraticExtension::new(&f).unwrap();
            for _ in 0..100 {
                let n = rng.gen_range(1..=8);
                let g = random_graph(&f, n, 0.5, &mut rng);
                let t = tilde_with(&g, &ext).unwrap();
                assert!(t.graph().is_sigma_symmetric(ext.sigma_tilde()).unwrap());
                assert_eq!(untilde(t.graph(), &ext).unwrap(), g);
            }
        }
    }

    #[test]
    fn induced_subgraphs() {
        let k4 = SigmaGraph::undirected(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let k3 = SigmaGraph::undirected(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(k4.graph().induced(&[0, 1, 2]).adj(), k3.graph().adj());
        assert_eq!(k4.graph().induced(&[0, 1, 2, 3]), *k4.graph());
        assert_eq!(k4.graph().induced(&[]).n(), 0);
        assert!(k4.graph().induced_by_labels(&["v1", "zz"]).is_err());
    }

    #[test]
    fn components_and_connectivity() {
        let g = SigmaGraph::undirected(5, &[(0, 3), (1, 2)]).unwrap();
        assert_eq!(g.graph().components(), vec![vec![0, 3], vec![1, 2], vec![4]]);
        let cyc = ColoredGraph::digraph(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(cyc.is_strongly_connected());
        let path = ColoredGraph::digraph(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(path.is_connected() && !path.is_strongly_connected());
    }

    #[test]
    fn file_round_trip() {
        let g = encode_directed(names(&["a", "b", "c"]), &pairs(&[("a", "b"), ("b", "c"), ("c", "b")]))
            .unwrap();
        let text = write_graph(g.graph(), Some(g.sigma()));
        let back = parse_graph(&text).unwrap();
        assert_eq!(back.graph, *g.graph());
        assert_eq!(back.sigma.as_ref(), Some(g.sigma()));
        assert_eq!(back.sigma_graph().unwrap(), g);
    }

    #[test]
    fn file_errors() {
        assert!(matches!(parse_graph("vertices a b"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(
            parse_graph("field 2 1\nvertices a b\nedge a c 1"),
            Err(Error::UnknownVertex(_))
        ));
        assert!(matches!(
            parse_graph("field 2 1\nvertices a b\nedge a a 1"),
            Err(Error::Loop(_))
        ));
        assert!(matches!(
            parse_graph("field 2 1\nvertices a a"),
            Err(Error::DuplicateVertex(_))
        ));
        let g = parse_graph("# comment\nfield 3 1\nvertices a b # two\nedge a b 1\nedge a b 2\n").unwrap();
        assert_eq!(g.graph.get(0, 1), 2);
    }

    #[test]
    fn enumerates_all_symmetric_graphs() {
        let f4 = Field::new(2, 2).unwrap();
        let s4 = Sesquimorphism::frobenius_conjugation(&f4).unwrap();
        assert_eq!(all_sigma_graphs(&s4, 3).count(), 64);
        assert!(all_sigma_graphs(&s4, 3).all(|g| g.graph().is_sigma_symmetric(&s4).unwrap()));
    }
}
