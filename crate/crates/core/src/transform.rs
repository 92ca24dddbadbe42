//! Local and pivot complementation, equivalence orbits, minor containment
//! and the search for minimal obstructions.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;

use crate::cutrank::CutFunction;
use crate::error::{Error, Result};
use crate::field::{Elem, Sesquimorphism};
use crate::graph::{default_labels, ColoredGraph, SigmaGraph};
use crate::iso::{canonical_form, canonical_graph, CanonicalForm};
use crate::layout::{decide_width_at_most, WidthOptions};

/// Largest graph accepted by the orbit and minor routines.
pub const ORBIT_MAX: usize = 10;
/// Largest vertex count for obstruction search.
pub const OBSTRUCTION_MAX: usize = 8;
/// Default cap on orbit size.
pub const DEFAULT_BUDGET: usize = 200_000;

/// `G * x` with weight `lambda`: `M[z][t] += lambda * M[z][x] * M[x][t]`
/// for distinct `z, t` other than `x`.
pub fn local_complement(g: &ColoredGraph, x: usize, lambda: Elem) -> Result<ColoredGraph> {
    let f = g.field();
    if lambda == 0 {
        return Err(Error::ZeroLambda);
    }
    f.check(lambda)?;
    if x >= g.n() {
        return Err(Error::UnknownVertex(x.to_string()));
    }
    let n = g.n();
    let mut out = g.clone();
    for z in (0..n).filter(|&z| z != x) {
        let zx = g.get(z, x);
        if zx == 0 {
            continue;
        }
        let lzx = f.mul(lambda, zx);
        for t in (0..n).filter(|&t| t != x && t != z) {
            let xt = g.get(x, t);
            if xt != 0 {
                out.set(z, t, f.add(g.get(z, t), f.mul(lzx, xt)))?;
            }
        }
    }
    Ok(out)
}

/// Local complementation restricted to weights compatible with `sigma`,
/// which keeps the graph sigma-symmetric.
pub fn local_complement_sigma(g: &SigmaGraph, x: usize, lambda: Elem) -> Result<SigmaGraph> {
    if !g.sigma().is_compatible(lambda)? {
        return Err(Error::IncompatibleLambda(lambda));
    }
    let h = local_complement(g.graph(), x, lambda)?;
    Ok(SigmaGraph::new_unchecked(h, g.sigma().clone()))
}

/// Pivot complementation at the arc `xy` with the given `sigma(1)`.
/// Works for any graph with `M[x][y]` and `M[y][x]` nonzero.
pub fn pivot_raw(g: &ColoredGraph, sigma_one: Elem, x: usize, y: usize) -> Result<ColoredGraph> {
    let n = g.n();
    if x >= n {
        return Err(Error::UnknownVertex(x.to_string()));
    }
    if y >= n {
        return Err(Error::UnknownVertex(y.to_string()));
    }
    let f = g.field();
    let mxy = g.get(x, y);
    let myx = g.get(y, x);
    if x == y || mxy == 0 || myx == 0 {
        return Err(Error::NotAnEdge(g.label(x).into(), g.label(y).into()));
    }
    let s1 = sigma_one;
    let mut out = g.clone();
    for z in 0..n {
        for t in 0..n {
            let v = if z == t {
                0
            } else if z == x && t == y {
                f.neg(f.div(1, myx))
            } else if z == y && t == x {
                f.neg(f.div(f.mul(s1, s1), mxy))
            } else if z == x {
                f.div(g.get(y, t), myx)
            } else if z == y {
                f.div(f.mul(s1, g.get(x, t)), mxy)
            } else if t == x {
                f.div(f.mul(s1, g.get(z, y)), mxy)
            } else if t == y {
                f.div(g.get(z, x), myx)
            } else {
                let a = f.div(f.mul(g.get(z, x), g.get(y, t)), myx);
                let b = f.div(f.mul(g.get(z, y), g.get(x, t)), mxy);
                f.sub(f.sub(g.get(z, t), a), b)
            };
            out.set(z, t, v)?;
        }
    }
    Ok(out)
}

/// `G ∧ xy`.
pub fn pivot_complement(g: &SigmaGraph, x: usize, y: usize) -> Result<SigmaGraph> {
    let h = pivot_raw(g.graph(), g.sigma().sigma_one(), x, y)?;
    Ok(SigmaGraph::new_unchecked(h, g.sigma().clone()))
}

/// Which moves generate an equivalence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    /// Local complementations with sigma-compatible weights.
    SigmaVertex,
    /// Local complementations with every nonzero weight.
    Vertex,
    /// Pivot complementations on edges.
    Pivot,
}

impl Relation {
    pub fn parse(s: &str) -> Option<Relation> {
        match s {
            "sigma-vertex" => Some(Relation::SigmaVertex),
            "vertex" => Some(Relation::Vertex),
            "pivot" => Some(Relation::Pivot),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Relation::SigmaVertex => "sigma-vertex",
            Relation::Vertex => "vertex",
            Relation::Pivot => "pivot",
        }
    }

    /// Whether moves keep sigma-symmetry.
    pub fn preserves_symmetry(self) -> bool {
        self != Relation::Vertex
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Move {
    Local { x: usize, lambda: Elem },
    Pivot { x: usize, y: usize },
}

/// All single moves available at `g`, by vertex then weight code, or by
/// ordered edge for pivots.
pub fn moves(g: &ColoredGraph, sigma: &Sesquimorphism, rel: Relation) -> Vec<Move> {
    let n = g.n();
    match rel {
        Relation::Pivot => (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .filter(|&(x, y)| x != y && g.get(x, y) != 0 && g.get(y, x) != 0)
            .map(|(x, y)| Move::Pivot { x, y })
            .collect(),
        Relation::SigmaVertex | Relation::Vertex => {
            let weights: Vec<Elem> = if rel == Relation::SigmaVertex {
                sigma.compatible_set()
            } else {
                g.field().nonzero().collect()
            };
            (0..n)
                .flat_map(|x| weights.iter().map(move |&lambda| Move::Local { x, lambda }))
                .collect()
        }
    }
}

pub fn apply_move(g: &ColoredGraph, sigma: &Sesquimorphism, mv: Move) -> Result<ColoredGraph> {
    match mv {
        Move::Local { x, lambda } => local_complement(g, x, lambda),
        Move::Pivot { x, y } => pivot_raw(g, sigma.sigma_one(), x, y),
    }
}

/// Isomorphism classes reachable by moves, in breadth-first discovery order.
#[derive(Clone, Debug)]
pub struct Orbit {
    pub members: Vec<ColoredGraph>,
    pub forms: Vec<CanonicalForm>,
    /// False when the budget stopped the search.
    pub complete: bool,
}

impl Orbit {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

fn check_relation_input(g: &ColoredGraph, sigma: &Sesquimorphism, rel: Relation) -> Result<()> {
    if sigma.field() != g.field() {
        return Err(Error::FieldMismatch);
    }
    if rel.preserves_symmetry() && !g.is_sigma_symmetric(sigma)? {
        return Err(Error::NotSigmaSymmetric);
    }
    Ok(())
}

/// Breadth-first closure of `g` under the moves of `rel`, deduplicated by
/// canonical form. Each frontier is expanded in parallel and merged in order,
/// so the result does not depend on scheduling.
pub fn equivalence_orbit(
    g: &ColoredGraph,
    sigma: &Sesquimorphism,
    rel: Relation,
    budget: usize,
) -> Result<Orbit> {
    if g.n() > ORBIT_MAX {
        return Err(Error::SizeBound {
            what: "equivalence orbit",
            max: ORBIT_MAX,
            got: g.n(),
        });
    }
    check_relation_input(g, sigma, rel)?;
    let start = canonical_form(g)?;
    let mut seen: HashSet<CanonicalForm> = HashSet::from([start.clone()]);
    let mut orbit = Orbit {
        members: vec![g.clone()],
        forms: vec![start],
        complete: true,
    };
    let mut frontier = vec![g.clone()];
    while !frontier.is_empty() {
        let expanded: Vec<Vec<(CanonicalForm, ColoredGraph)>> = frontier
            .par_iter()
            .map(|h| {
                moves(h, sigma, rel)
                    .into_iter()
                    .map(|mv| {
                        let next = apply_move(h, sigma, mv).expect("moves are valid");
                        (canonical_form(&next).expect("size checked"), next)
                    })
                    .collect()
            })
            .collect();
        let mut next_frontier = Vec::new();
        for (form, h) in expanded.into_iter().flatten() {
            if seen.contains(&form) {
                continue;
            }
            if orbit.members.len() >= budget {
                orbit.complete = false;
                return Ok(orbit);
            }
            seen.insert(form.clone());
            orbit.forms.push(form);
            orbit.members.push(h.clone());
            next_frontier.push(h);
        }
        frontier = next_frontier;
    }
    Ok(orbit)
}

/// Outcome of a minor containment query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MinorAnswer {
    /// `H` is isomorphic to `member[vertices]` for a member of the orbit.
    Found { member: ColoredGraph, vertices: Vec<usize> },
    /// Not found among the first `budget` orbit members; the orbit is larger.
    NotFound { budget: usize },
    /// The whole orbit was explored and `H` does not occur.
    Absent,
}

impl MinorAnswer {
    pub fn is_found(&self) -> bool {
        matches!(self, MinorAnswer::Found { .. })
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            if n - v < k - cur.len() {
                break;
            }
            cur.push(v);
            go(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// Whether `h` is a minor of `g` under `rel`.
///
/// Vertex deletion commutes with every move at a surviving vertex or edge, so
/// the minors of `g` are exactly the induced subgraphs of its orbit members.
pub fn is_minor(
    h: &ColoredGraph,
    g: &ColoredGraph,
    sigma: &Sesquimorphism,
    rel: Relation,
    budget: usize,
) -> Result<MinorAnswer> {
    if h.field() != g.field() {
        return Err(Error::FieldMismatch);
    }
    if h.n() > g.n() {
        return Ok(MinorAnswer::Absent);
    }
    let target = canonical_form(h)?;
    let orbit = equivalence_orbit(g, sigma, rel, budget)?;
    let subsets = combinations(g.n(), h.n());
    for member in &orbit.members {
        for s in &subsets {
            if canonical_form(&member.induced(s))? == target {
                return Ok(MinorAnswer::Found {
                    member: member.clone(),
                    vertices: s.clone(),
                });
            }
        }
    }
    Ok(if orbit.complete {
        MinorAnswer::Absent
    } else {
        MinorAnswer::NotFound { budget }
    })
}

/// A minimal graph of width above `k` under a minor relation.
#[derive(Clone, Debug)]
pub struct Obstruction {
    pub graph: SigmaGraph,
    pub relation: Relation,
    pub k: u32,
    pub form: CanonicalForm,
}

fn small_width_at_most(g: &ColoredGraph, k: u32) -> bool {
    let f = CutFunction::of_kind(g, crate::cutrank::CutKind::CutRank).expect("small graph");
    decide_width_at_most(&f, k, &WidthOptions::default())
        .expect("size checked")
        .is_some()
}

/// Upper bound on obstruction size for width `k >= 1`: `(6^(k+1) - 1) / 5`.
/// For `k = 0` the obstructions are the two-vertex graphs.
pub fn obstruction_size_bound(k: u32) -> u64 {
    (6u64.pow(k + 1) - 1) / 5
}

/// All obstructions of width above `k` on at most `max_n` vertices, one per
/// isomorphism class, in canonical-form order.
///
/// Graphs of width at most `k` are generated level by level. Each class on
/// `n` vertices extends a class on `n - 1` vertices by a new vertex whose
/// arcs are chosen freely in one direction and forced by `sigma` in the other.
/// An extension of width above `k` is an obstruction when it is connected
/// and every single-vertex deletion of every orbit member lies in the
/// previous level.
pub fn find_obstructions(
    sigma: &Sesquimorphism,
    rel: Relation,
    k: u32,
    max_n: usize,
) -> Result<Vec<Obstruction>> {
    if max_n > OBSTRUCTION_MAX {
        return Err(Error::SizeBound {
            what: "obstruction search",
            max: OBSTRUCTION_MAX,
            got: max_n,
        });
    }
    if !rel.preserves_symmetry() {
        return Err(Error::Unsupported(
            "obstruction search needs a symmetry-preserving relation".into(),
        ));
    }
    let field = sigma.field().clone();
    let q = field.order();
    let mut found: BTreeMap<CanonicalForm, ColoredGraph> = BTreeMap::new();
    // level n: canonical graphs of width <= k on n vertices
    let mut level: BTreeMap<CanonicalForm, ColoredGraph> = BTreeMap::new();
    if max_n >= 1 {
        let g = ColoredGraph::empty(&field, 1);
        level.insert(canonical_form(&g)?, g);
    }
    for n in 2..=max_n {
        let prev: Vec<&ColoredGraph> = level.values().collect();
        let rows = (q as u64).pow((n - 1) as u32);
        let label = default_labels(n).pop().expect("n >= 2");
        let batches: Vec<Vec<(CanonicalForm, ColoredGraph)>> = prev
            .par_iter()
            .map(|base| {
                let mut local: BTreeMap<CanonicalForm, ColoredGraph> = BTreeMap::new();
                for mut code in 0..rows {
                    let mut row = Vec::with_capacity(n - 1);
                    for _ in 0..n - 1 {
                        row.push((code % q as u64) as Elem);
                        code /= q as u64;
                    }
                    let col: Vec<Elem> = row.iter().map(|&c| sigma.apply(c)).collect();
                    let ext = base.extended(&label, &row, &col).expect("fresh label");
                    let form = canonical_form(&ext).expect("small graph");
                    local.entry(form).or_insert(ext);
                }
                local.into_iter().collect()
            })
            .collect();
        let mut candidates: BTreeMap<CanonicalForm, ColoredGraph> = BTreeMap::new();
        for (form, g) in batches.into_iter().flatten() {
            candidates.entry(form).or_insert(g);
        }
        let classified: Vec<(CanonicalForm, ColoredGraph, bool, bool)> = candidates
            .into_par_iter()
            .map(|(form, g)| {
                let small = small_width_at_most(&g, k);
                let minimal = !small && g.is_connected() && is_minimal(&g, sigma, rel, &level);
                (form, g, small, minimal)
            })
            .collect();
        let mut next = BTreeMap::new();
        for (form, g, small, minimal) in classified {
            if small {
                next.insert(form, g);
            } else if minimal {
                found.insert(form, g);
            }
        }
        level = next;
    }
    Ok(found
        .into_iter()
        .map(|(form, g)| Obstruction {
            graph: SigmaGraph::new_unchecked(
                canonical_graph(&g).expect("small graph"),
                sigma.clone(),
            ),
            relation: rel,
            k,
            form,
        })
        .collect())
}

fn deletions_in(g: &ColoredGraph, level: &BTreeMap<CanonicalForm, ColoredGraph>) -> bool {
    (0..g.n()).all(|v| {
        let d = g.delete_vertex(v);
        level.contains_key(&canonical_form(&d).expect("small graph"))
    })
}

fn is_minimal(
    g: &ColoredGraph,
    sigma: &Sesquimorphism,
    rel: Relation,
    level: &BTreeMap<CanonicalForm, ColoredGraph>,
) -> bool {
    if !deletions_in(g, level) {
        return false;
    }
    let orbit = equivalence_orbit(g, sigma, rel, usize::MAX).expect("small sigma-symmetric graph");
    orbit.members.iter().all(|h| deletions_in(h, level))
}

/// The cycle on `m` vertices with alternating orientation: even-indexed
/// vertices are sources, odd-indexed ones sinks. A GF(2) digraph.
pub fn ec_cycle(m: usize) -> Result<ColoredGraph> {
    if m % 2 == 1 {
        return Err(Error::OddCycle(m));
    }
    if m < 4 {
        return Err(Error::Unsupported(format!("cycle length {m} is below 4")));
    }
    let arcs: Vec<(usize, usize)> = (0..m)
        .step_by(2)
        .flat_map(|s| [(s, (s + 1) % m), (s, (s + m - 1) % m)])
        .collect();
    ColoredGraph::digraph(m, &arcs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::graph::{random_graph, random_sigma_graph, GF4_A, GF4_A2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gf4_sigma() -> Sesquimorphism {
        let f = Field::new(2, 2).unwrap();
        Sesquimorphism::new(&f, vec![0, 1, GF4_A2, GF4_A]).unwrap()
    }

    #[test]
    fn local_twice_is_identity_over_gf2() {
        let f = Field::prime(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let n = rng.gen_range(1..8);
            let g = random_graph(&f, n, 0.5, &mut rng);
            let x = rng.gen_range(0..n);
            let h = local_complement(&local_complement(&g, x, 1).unwrap(), x, 1).unwrap();
            assert_eq!(g, h);
        }
    }

    #[test]
    fn local_complement_on_a_star() {
        // complementing the center of a star on 4 leaves yields K5
        let g = SigmaGraph::undirected(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let h = local_complement_sigma(&g, 0, 1).unwrap();
        assert_eq!(h.graph().arc_count(), 20);
        assert!(matches!(local_complement(g.graph(), 0, 0), Err(Error::ZeroLambda)));
        assert!(local_complement(g.graph(), 7, 1).is_err());
    }

    #[test]
    fn gf4_uniform_pattern() {
        let s = gf4_sigma();
        let mut g = ColoredGraph::empty(s.field(), 3);
        // z <- x -> t with x = 0, z = 1, t = 2
        g.set_sym(&s, 1, 0, GF4_A2).unwrap();
        g.set_sym(&s, 0, 2, GF4_A).unwrap();
        let h = local_complement_sigma(&SigmaGraph::new(g, s.clone()).unwrap(), 0, 1).unwrap();
        assert_eq!(h.graph().get(1, 2), 1);
        assert_eq!(h.graph().get(2, 1), 1);
    }

    #[test]
    fn pivot_matches_three_local_moves_over_gf2() {
        let f = Field::prime(2).unwrap();
        let id = Sesquimorphism::identity(&f);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut checked = 0;
        while checked < 100 {
            let g = random_sigma_graph(&id, 6, 0.5, &mut rng);
            let (x, y) = (rng.gen_range(0..6), rng.gen_range(0..6));
            if x == y || g.graph().get(x, y) == 0 {
                continue;
            }
            let p = pivot_complement(&g, x, y).unwrap();
            let q = pivot_complement(&g, y, x).unwrap();
            let l = |h: &ColoredGraph, v| local_complement(h, v, 1).unwrap();
            let three = l(&l(&l(g.graph(), x), y), x);
            assert_eq!(p.graph(), &three);
            assert_eq!(p, q);
            assert_eq!(pivot_complement(&p, x, y).unwrap(), g);
            checked += 1;
        }
        let g = SigmaGraph::undirected(3, &[(0, 1)]).unwrap();
        assert!(matches!(pivot_complement(&g, 1, 2), Err(Error::NotAnEdge(..))));
    }

    #[test]
    fn orbits() {
        let k2 = SigmaGraph::undirected(2, &[(0, 1)]).unwrap();
        let o = equivalence_orbit(k2.graph(), k2.sigma(), Relation::SigmaVertex, 10).unwrap();
        assert_eq!(o.len(), 1);
        assert!(o.complete);
        let f3 = Field::prime(3).unwrap();
        let neg = Sesquimorphism::negation(&f3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = random_sigma_graph(&neg, 5, 0.6, &mut rng);
        let o = equivalence_orbit(g.graph(), &neg, Relation::SigmaVertex, 10).unwrap();
        assert_eq!(o.len(), 1);
        let big = ColoredGraph::empty(&f3, 11);
        assert!(equivalence_orbit(&big, &neg, Relation::Pivot, 10).is_err());
    }

    #[test]
    fn minors() {
        let c5 = SigmaGraph::undirected(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let c6 = SigmaGraph::undirected(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]).unwrap();
        let s = c5.sigma();
        let r = is_minor(c5.graph(), c6.graph(), s, Relation::SigmaVertex, DEFAULT_BUDGET).unwrap();
        assert!(r.is_found());
        let p4 = SigmaGraph::undirected(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let r = is_minor(p4.graph(), c5.graph(), s, Relation::SigmaVertex, DEFAULT_BUDGET).unwrap();
        assert!(r.is_found());
        // C5 has rank-width 2, so it is not a vertex-minor of a path
        let p6 = SigmaGraph::undirected(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]).unwrap();
        let r = is_minor(c5.graph(), p6.graph(), s, Relation::SigmaVertex, DEFAULT_BUDGET).unwrap();
        assert_eq!(r, MinorAnswer::Absent);
        let r = is_minor(c5.graph(), c6.graph(), s, Relation::Pivot, 1).unwrap();
        assert!(matches!(r, MinorAnswer::NotFound { budget: 1 } | MinorAnswer::Found { .. }));
    }

    #[test]
    fn k0_obstructions_over_gf2() {
        let f = Field::prime(2).unwrap();
        let id = Sesquimorphism::identity(&f);
        let obs = find_obstructions(&id, Relation::Pivot, 0, 3).unwrap();
        assert_eq!(obs.len(), 1);
        assert_eq!(obs[0].graph.n(), 2);
        assert!(find_obstructions(&id, Relation::Vertex, 0, 3).is_err());
        assert!(find_obstructions(&id, Relation::Pivot, 0, 9).is_err());
    }

    #[test]
    fn c5_class_is_the_only_small_vertex_minor_obstruction() {
        let f = Field::prime(2).unwrap();
        let id = Sesquimorphism::identity(&f);
        let obs = find_obstructions(&id, Relation::SigmaVertex, 1, 5).unwrap();
        let c5 = SigmaGraph::undirected(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let orbit = equivalence_orbit(c5.graph(), &id, Relation::SigmaVertex, 100).unwrap();
        // one obstruction per isomorphism class in the orbit of C5
        assert_eq!(obs.len(), orbit.len());
        for o in &obs {
            assert!(orbit.forms.contains(&o.form));
        }
    }

    #[test]
    fn ec_cycles() {
        let c4 = ec_cycle(4).unwrap();
        assert_eq!(c4.arc_count(), 4);
        assert!(matches!(ec_cycle(5), Err(Error::OddCycle(5))));
        assert!(ec_cycle(2).is_err());
        for v in 0..4 {
            let out = (0..4).filter(|&w| c4.get(v, w) != 0).count();
            let inn = (0..4).filter(|&w| c4.get(w, v) != 0).count();
            assert!(out == 2 && inn == 0 || out == 0 && inn == 2);
        }
    }

    #[test]
    fn size_bound() {
        assert_eq!(obstruction_size_bound(1), 7);
        assert_eq!(obstruction_size_bound(2), 43);
    }
}
