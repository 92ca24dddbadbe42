//! Color-preserving isomorphism and canonical forms for small graphs.

use crate::error::{Error, Result};
use crate::field::Elem;
use crate::graph::ColoredGraph;

/// Largest graph accepted by [`canonical_form`].
pub const CANON_MAX: usize = 12;

/// Isomorphism-invariant code of a graph: the lexicographically least
/// adjacency matrix (row-major) over the explored vertex orderings.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm {
    pub order: u32,
    pub n: usize,
    pub code: Vec<Elem>,
}

impl CanonicalForm {
    /// Compact single-token rendering used in obstruction index files.
    pub fn to_text(&self) -> String {
        let body: Vec<String> = self.code.iter().map(|c| c.to_string()).collect();
        format!("q{}n{}:{}", self.order, self.n, body.join("."))
    }
}

fn profile(g: &ColoredGraph, v: usize) -> Vec<(Elem, Elem)> {
    let mut p: Vec<(Elem, Elem)> = (0..g.n())
        .filter(|&w| w != v)
        .map(|w| (g.get(v, w), g.get(w, v)))
        .collect();
    p.sort_unstable();
    p
}

/// A color-preserving bijection `h` with `G[x][y] = H[h(x)][h(y)]`, if any.
///
/// Plain backtracking over the vertices of `G` in order, pruned by the
/// multiset of (out-color, in-color) pairs at each vertex.
pub fn isomorphic(g: &ColoredGraph, h: &ColoredGraph) -> Result<Option<Vec<usize>>> {
    if g.field() != h.field() {
        return Err(Error::FieldMismatch);
    }
    let n = g.n();
    if h.n() != n || g.arc_count() != h.arc_count() {
        return Ok(None);
    }
    let pg: Vec<_> = (0..n).map(|v| profile(g, v)).collect();
    let ph: Vec<_> = (0..n).map(|v| profile(h, v)).collect();
    let mut sg = pg.clone();
    let mut sh = ph.clone();
    sg.sort();
    sh.sort();
    if sg != sh {
        return Ok(None);
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn go(
        i: usize,
        g: &ColoredGraph,
        h: &ColoredGraph,
        pg: &[Vec<(Elem, Elem)>],
        ph: &[Vec<(Elem, Elem)>],
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        let n = g.n();
        if i == n {
            return true;
        }
        for c in 0..n {
            if used[c] || pg[i] != ph[c] {
                continue;
            }
            let ok = (0..i).all(|j| {
                g.get(i, j) == h.get(c, map[j]) && g.get(j, i) == h.get(map[j], c)
            });
            if !ok {
                continue;
            }
            map[i] = c;
            used[c] = true;
            if go(i + 1, g, h, pg, ph, map, used) {
                return true;
            }
            used[c] = false;
        }
        map[i] = usize::MAX;
        false
    }
    Ok(go(0, g, h, &pg, &ph, &mut map, &mut used).then_some(map))
}

/// Splits cells of an ordered partition by neighbourhood signature until
/// no cell splits any more. Cell order depends only on colors, never on labels.
fn refine(g: &ColoredGraph, cells: &mut Vec<Vec<usize>>) {
    let n = g.n();
    let mut cell_of = vec![0; n];
    loop {
        for (i, c) in cells.iter().enumerate() {
            for &v in c {
                cell_of[v] = i;
            }
        }
        let signature = |v: usize| -> Vec<(usize, Elem, Elem)> {
            let mut s: Vec<(usize, Elem, Elem)> = (0..n)
                .filter(|&w| w != v)
                .map(|w| (cell_of[w], g.get(v, w), g.get(w, v)))
                .filter(|&(_, a, b)| a != 0 || b != 0)
                .collect();
            s.sort_unstable();
            s
        };
        let mut next = Vec::with_capacity(cells.len());
        for c in cells.iter() {
            if c.len() == 1 {
                next.push(c.clone());
                continue;
            }
            let mut keyed: Vec<(Vec<(usize, Elem, Elem)>, usize)> =
                c.iter().map(|&v| (signature(v), v)).collect();
            keyed.sort();
            let mut start = 0;
            for i in 1..=keyed.len() {
                if i == keyed.len() || keyed[i].0 != keyed[start].0 {
                    next.push(keyed[start..i].iter().map(|(_, v)| *v).collect());
                    start = i;
                }
            }
        }
        let stable = next.len() == cells.len();
        *cells = next;
        if stable {
            return;
        }
    }
}

/// `u` and `v` can be swapped without changing any color.
fn twins(g: &ColoredGraph, u: usize, v: usize) -> bool {
    if g.get(u, v) != g.get(v, u) {
        return false;
    }
    (0..g.n())
        .filter(|&w| w != u && w != v)
        .all(|w| g.get(u, w) == g.get(v, w) && g.get(w, u) == g.get(w, v))
}

fn code_of(g: &ColoredGraph, order: &[usize]) -> Vec<Elem> {
    let n = order.len();
    let mut code = Vec::with_capacity(n * n);
    for &x in order {
        for &y in order {
            code.push(g.get(x, y));
        }
    }
    code
}

/// Canonical form and a vertex ordering realizing it (`order[i]` is the
/// vertex placed at position `i`).
///
/// Individualization-refinement: starting from the degree-refined equitable
/// partition, the first non-singleton cell is split on each of its vertices
/// (one per twin class) and the least code over all discrete leaves wins.
pub fn canonical_form_with_order(g: &ColoredGraph) -> Result<(CanonicalForm, Vec<usize>)> {
    let n = g.n();
    if n > CANON_MAX {
        return Err(Error::SizeBound {
            what: "canonical form",
            max: CANON_MAX,
            got: n,
        });
    }
    let mut root = vec![(0..n).collect::<Vec<_>>()];
    if n == 0 {
        root.clear();
    }
    refine(g, &mut root);
    let mut best: Option<(Vec<Elem>, Vec<usize>)> = None;
    search(g, root, &mut best);
    let (code, order) = best.unwrap_or_default();
    Ok((
        CanonicalForm {
            order: g.field().order(),
            n,
            code,
        },
        order,
    ))
}

fn search(g: &ColoredGraph, cells: Vec<Vec<usize>>, best: &mut Option<(Vec<Elem>, Vec<usize>)>) {
    let Some(target) = cells.iter().position(|c| c.len() > 1) else {
        let order: Vec<usize> = cells.iter().map(|c| c[0]).collect();
        let code = code_of(g, &order);
        if best.as_ref().is_none_or(|(b, _)| code < *b) {
            *best = Some((code, order));
        }
        return;
    };
    let cell = &cells[target];
    let mut reps: Vec<usize> = Vec::new();
    for &v in cell {
        if reps.iter().any(|&r| twins(g, r, v)) {
            continue;
        }
        reps.push(v);
    }
    for v in reps {
        let mut next = Vec::with_capacity(cells.len() + 1);
        next.extend_from_slice(&cells[..target]);
        next.push(vec![v]);
        next.push(cells[target].iter().copied().filter(|&w| w != v).collect());
        next.extend_from_slice(&cells[target + 1..]);
        refine(g, &mut next);
        search(g, next, best);
    }
}

pub fn canonical_form(g: &ColoredGraph) -> Result<CanonicalForm> {
    canonical_form_with_order(g).map(|(c, _)| c)
}

/// The graph rebuilt from a canonical form, on labels `v1 .. vn`.
pub fn canonical_graph(g: &ColoredGraph) -> Result<ColoredGraph> {
    let (_, order) = canonical_form_with_order(g)?;
    let h = g.induced(&order);
    h.with_labels(crate::graph::default_labels(order.len()))
}
