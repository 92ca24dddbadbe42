//! Property battery run by `rankw selfcheck`.
//!
//! Every check draws its instances from a seeded generator, so a report is
//! reproducible from the seed alone. Sizes are kept small enough for the
//! whole battery to finish in seconds.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cutrank::{full_set, CutFunction};
use crate::field::{sesqui_check, Field, QuadraticExtension, Sesquimorphism};
use crate::graph::{all_sigma_graphs, random_digraph, random_graph, random_sigma_graph, tilde, SigmaGraph};
use crate::iso::isomorphic;
use crate::layout::{birankwidth, layout_width, rankwidth, width_exact, Layout, Strategy, WidthOptions};
use crate::terms::{term_from_layout_birank, term_from_layout_rank, BiRankTerm, RankTerm};
use crate::transform::{ec_cycle, find_obstructions, local_complement, local_complement_sigma, pivot_complement, Relation};

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub module: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_table(&self) -> String {
        let w = self.checks.iter().map(|c| c.module.len() + c.name.len() + 1).max().unwrap_or(0);
        let mut out = String::new();
        for c in &self.checks {
            let label = format!("{}/{}", c.module, c.name);
            let status = if c.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("{status}  {label:<w$}  {} ({} ms)\n", c.detail, c.millis));
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        out.push_str(&format!("{} checks, {failed} failed, seed {}\n", self.checks.len(), self.seed));
        out
    }
}

type Outcome = std::result::Result<String, String>;

struct Check {
    module: &'static str,
    name: &'static str,
    run: fn(&mut ChaCha8Rng) -> Outcome,
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn checks() -> Vec<Check> {
    vec![
        Check { module: "field", name: "axioms", run: field_axioms },
        Check { module: "field", name: "extension", run: extension },
        Check { module: "matrix", name: "rank", run: matrix_rank },
        Check { module: "cutrank", name: "submodular", run: cut_submodular },
        Check { module: "cutrank", name: "matroid", run: matroid_bridge },
        Check { module: "layout", name: "strategies", run: strategies_agree },
        Check { module: "layout", name: "newick", run: newick_round_trip },
        Check { module: "layout", name: "double", run: birank_doubles },
        Check { module: "transform", name: "local", run: local_invariance },
        Check { module: "transform", name: "pivot", run: pivot_invariance },
        Check { module: "transform", name: "cycles", run: even_cycles },
        Check { module: "transform", name: "obstructions", run: small_obstructions },
        Check { module: "terms", name: "rank", run: rank_terms },
        Check { module: "terms", name: "birank", run: birank_terms },
        Check { module: "graph", name: "tilde", run: tilde_sandwich },
    ]
}

/// Runs the battery. Checks run in parallel, each from its own stream of `seed`.
pub fn run(seed: u64) -> Report {
    let checks = checks()
        .into_par_iter()
        .enumerate()
        .map(|(i, c)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let start = Instant::now();
            let outcome = (c.run)(&mut rng);
            let millis = start.elapsed().as_millis();
            let (passed, detail) = match outcome {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CheckResult {
                module: c.module,
                name: c.name,
                passed,
                detail,
                millis,
            }
        })
        .collect();
    Report { seed, checks }
}

fn small_fields() -> Vec<Field> {
    [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (11, 1), (13, 1), (2, 4)]
        .into_iter()
        .map(|(p, k)| Field::new(p, k).expect("small field"))
        .collect()
}

fn symmetric_configs() -> Vec<Sesquimorphism> {
    let f2 = Field::prime(2).expect("prime");
    let f3 = Field::prime(3).expect("prime");
    let f4 = Field::new(2, 2).expect("GF(4)");
    vec![
        Sesquimorphism::identity(&f2),
        Sesquimorphism::identity(&f3),
        Sesquimorphism::negation(&f3),
        Sesquimorphism::frobenius_conjugation(&f4).expect("even degree"),
    ]
}

fn field_axioms(_: &mut ChaCha8Rng) -> Outcome {
    for f in small_fields() {
        let name = f.name();
        for a in f.elements() {
            ensure!(f.add(a, f.neg(a)) == 0, "{name}: additive inverse of {a}");
            if a != 0 {
                ensure!(f.mul(a, f.inv(a).unwrap_or(0)) == 1, "{name}: inverse of {a}");
            }
            for b in f.elements() {
                ensure!(f.add(a, b) == f.add(b, a) && f.mul(a, b) == f.mul(b, a), "{name}: commutativity");
                for c in f.elements().step_by(3) {
                    let l = f.mul(a, f.add(b, c));
                    ensure!(l == f.add(f.mul(a, b), f.mul(a, c)), "{name}: distributivity");
                }
            }
        }
    }
    Ok("10 fields up to order 16".into())
}

fn extension(_: &mut ChaCha8Rng) -> Outcome {
    for f in small_fields() {
        let name = f.name();
        let x = QuadraticExtension::new(&f).map_err(|e| e.to_string())?;
        let e = x.ext();
        let pinv = e.inv(x.embed(x.p_elt())).ok_or("p is zero")?;
        let (g, t) = (x.gamma(), x.tau());
        let comb = |c, d| e.add(e.mul(c, g), e.mul(d, t));
        let one_p = e.add(1, pinv);
        ensure!(e.add(g, t) == 1, "{name}: gamma + tau");
        ensure!(e.mul(g, g) == comb(one_p, pinv), "{name}: gamma^2");
        ensure!(e.mul(t, t) == comb(pinv, one_p), "{name}: tau^2");
        ensure!(e.mul(g, t) == comb(e.neg(pinv), e.neg(pinv)), "{name}: gamma tau");
        let mut hit = vec![false; e.order() as usize];
        for a in f.elements() {
            for b in f.elements() {
                hit[x.f_tilde(a, b) as usize] = true;
            }
        }
        ensure!(hit.iter().all(|&h| h), "{name}: f~ not a bijection");
        let st = x.sigma_tilde();
        ensure!(sesqui_check(e, st.table()).map_err(|e| e.to_string())?, "{name}: sigma~");
        ensure!(st.compatible_set().contains(&1), "{name}: 1 not compatible");
    }
    Ok("10 base fields".into())
}

fn matrix_rank(rng: &mut ChaCha8Rng) -> Outcome {
    let fields = small_fields();
    for i in 0..200 {
        let f = &fields[i % fields.len()];
        let n = rng.gen_range(1..=7);
        let g = random_graph(f, n, 0.6, rng);
        let m = g.adj();
        ensure!(m.rank() == m.transpose().rank(), "rank differs from transpose rank");
        ensure!(m.rank() <= n, "rank above size");
        let basis = m.row_basis();
        ensure!(basis.len() == m.rank(), "row basis size");
    }
    Ok("200 matrices".into())
}

fn cut_submodular(rng: &mut ChaCha8Rng) -> Outcome {
    let configs = symmetric_configs();
    for i in 0..60 {
        let n = rng.gen_range(1..=6);
        let g = random_sigma_graph(&configs[i % configs.len()], n, 0.5, rng);
        let a = random_graph(g.field(), n, 0.5, rng);
        for f in [CutFunction::for_sigma_graph(&g), CutFunction::bicutrk(&a).map_err(|e| e.to_string())?] {
            let full = full_set(n);
            for x in 0..=full {
                ensure!(f.eval_direct(x) == f.eval_direct(full & !x), "asymmetric cut");
                for y in 0..=full {
                    ensure!(f.eval(x) + f.eval(y) >= f.eval(x & y) + f.eval(x | y), "submodularity");
                }
            }
        }
    }
    Ok("120 functions".into())
}

fn matroid_bridge(rng: &mut ChaCha8Rng) -> Outcome {
    let configs = symmetric_configs();
    for i in 0..100 {
        let n = rng.gen_range(1..=6);
        let g = random_sigma_graph(&configs[i % configs.len()], n, 0.5, rng);
        let l = CutFunction::matroid_lambda(g.graph()).map_err(|e| e.to_string())?;
        let b = CutFunction::bicutrk(g.graph()).map_err(|e| e.to_string())?;
        let c = CutFunction::for_sigma_graph(&g);
        for x in 0..=full_set(n) {
            ensure!(l.eval(x) == b.eval(x) + 1, "lambda != bicutrk + 1");
            ensure!(b.eval(x) == 2 * c.eval(x), "bicutrk != 2 cutrk");
        }
    }
    Ok("100 graphs".into())
}

fn strategies_agree(rng: &mut ChaCha8Rng) -> Outcome {
    let configs = symmetric_configs();
    for i in 0..40 {
        let n = rng.gen_range(2..=7);
        let g = random_sigma_graph(&configs[i % configs.len()], n, 0.5, rng);
        let f = CutFunction::for_sigma_graph(&g);
        let mut widths = Vec::new();
        for strategy in [Strategy::Enumerate, Strategy::BranchAndBound, Strategy::SubsetDp] {
            let opts = WidthOptions { strategy, ..Default::default() };
            let r = width_exact(&f, &opts).map_err(|e| e.to_string())?;
            ensure!(layout_width(&f, &r.witness).map_err(|e| e.to_string())?.width == r.width, "witness width");
            widths.push(r.width);
        }
        ensure!(widths.windows(2).all(|w| w[0] == w[1]), "strategies disagree: {widths:?}");
    }
    Ok("40 graphs, 3 strategies".into())
}

fn newick_round_trip(rng: &mut ChaCha8Rng) -> Outcome {
    for _ in 0..50 {
        let n = rng.gen_range(2..=9);
        let g = random_digraph(n, 0.4, rng);
        let l = birankwidth(&g).map_err(|e| e.to_string())?.witness;
        let text = l.to_newick_with_width(g.labels(), 3);
        let (back, w) = Layout::parse_newick(&text, g.labels()).map_err(|e| e.to_string())?;
        ensure!(back == l && w == Some(3), "round trip changed {text}");
    }
    Ok("50 layouts".into())
}

fn birank_doubles(rng: &mut ChaCha8Rng) -> Outcome {
    let configs = symmetric_configs();
    for i in 0..40 {
        let n = rng.gen_range(1..=6);
        let g = random_sigma_graph(&configs[i % configs.len()], n, 0.5, rng);
        let r = rankwidth(&g).map_err(|e| e.to_string())?.width;
        let b = birankwidth(g.graph()).map_err(|e| e.to_string())?.width;
        ensure!(b == 2 * r, "birankwidth {b}, rankwidth {r}");
    }
    Ok("40 graphs".into())
}

fn local_invariance(rng: &mut ChaCha8Rng) -> Outcome {
    for s in symmetric_configs() {
        let lambdas = s.compatible_set();
        for _ in 0..40 {
            let n = rng.gen_range(2..=6);
            let x = rng.gen_range(0..n);
            let g = random_sigma_graph(&s, n, 0.6, rng);
            let a = random_graph(s.field(), n, 0.6, rng);
            let any = rng.gen_range(1..s.field().order());
            let h = local_complement(&a, x, any).map_err(|e| e.to_string())?;
            let (fa, fh) = (CutFunction::bicutrk(&a).map_err(|e| e.to_string())?, CutFunction::bicutrk(&h).map_err(|e| e.to_string())?);
            for c in 0..=full_set(n) {
                ensure!(fa.eval(c) == fh.eval(c), "bicutrk changed");
            }
            if let Some(&lam) = lambdas.first() {
                let h = local_complement_sigma(&g, x, lam).map_err(|e| e.to_string())?;
                let (fg, fh) = (CutFunction::for_sigma_graph(&g), CutFunction::for_sigma_graph(&h));
                for c in 0..=full_set(n) {
                    ensure!(fg.eval(c) == fh.eval(c), "cutrk changed");
                }
            }
        }
    }
    Ok("160 moves".into())
}

fn pivot_invariance(rng: &mut ChaCha8Rng) -> Outcome {
    let mut done = 0;
    for s in symmetric_configs() {
        for _ in 0..40 {
            let n = rng.gen_range(2..=6);
            let g = random_sigma_graph(&s, n, 0.6, rng);
            let Some((x, y)) = (0..n)
                .flat_map(|x| (0..n).map(move |y| (x, y)))
                .find(|&(x, y)| g.graph().get(x, y) != 0)
            else {
                continue;
            };
            let h = pivot_complement(&g, x, y).map_err(|e| e.to_string())?;
            let (fg, fh) = (CutFunction::for_sigma_graph(&g), CutFunction::for_sigma_graph(&h));
            for c in 0..=full_set(n) {
                ensure!(fg.eval(c) == fh.eval(c), "cutrk changed by pivot");
            }
            done += 1;
        }
    }
    Ok(format!("{done} pivots"))
}

fn even_cycles(_: &mut ChaCha8Rng) -> Outcome {
    for m in [4, 6, 8] {
        let g = ec_cycle(m).map_err(|e| e.to_string())?;
        for x in 0..m {
            let h = local_complement(&g, x, 1).map_err(|e| e.to_string())?;
            ensure!(isomorphic(&g, &h).map_err(|e| e.to_string())?.is_some(), "cycle {m} at {x}");
        }
    }
    Ok("lengths 4, 6, 8".into())
}

fn small_obstructions(_: &mut ChaCha8Rng) -> Outcome {
    let f2 = Field::prime(2).expect("prime");
    let id = Sesquimorphism::identity(&f2);
    let k0 = find_obstructions(&id, Relation::SigmaVertex, 0, 4).map_err(|e| e.to_string())?;
    ensure!(k0.len() == 1 && k0[0].graph.n() == 2, "width 0 obstructions over GF(2)");
    let k1 = find_obstructions(&id, Relation::SigmaVertex, 1, 6).map_err(|e| e.to_string())?;
    let c5 = SigmaGraph::undirected(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).map_err(|e| e.to_string())?;
    ensure!(k1.iter().all(|o| o.graph.n() == 5), "width 1 obstruction off five vertices");
    ensure!(
        k1.iter().any(|o| isomorphic(o.graph.graph(), c5.graph()).ok().flatten().is_some()),
        "C5 missing"
    );
    Ok(format!("{} width 1 classes", k1.len()))
}

fn rank_terms(rng: &mut ChaCha8Rng) -> Outcome {
    let configs = symmetric_configs();
    let id = &configs[0];
    let mut cases: Vec<SigmaGraph> = all_sigma_graphs(id, 4).collect();
    for i in 0..40 {
        let n = rng.gen_range(1..=6);
        cases.push(random_sigma_graph(&configs[i % configs.len()], n, 0.5, rng));
    }
    for g in &cases {
        let opt = rankwidth(g).map_err(|e| e.to_string())?;
        let c = term_from_layout_rank(g, &opt.witness).map_err(|e| e.to_string())?;
        let back = RankTerm::parse(g.field(), &c.term.to_sexpr()).map_err(|e| e.to_string())?;
        ensure!(back == c.term, "s-expression round trip");
        let ev = c.term.eval(g.sigma()).map_err(|e| e.to_string())?;
        let exact = c.relabel_into_input(ev.graph.graph(), g.graph().labels()).map_err(|e| e.to_string())?;
        ensure!(exact == *g.graph(), "evaluation does not reproduce the graph");
        let f = CutFunction::for_sigma_graph(&ev.graph);
        let syn = layout_width(&f, &c.term.syntactic_layout()).map_err(|e| e.to_string())?;
        ensure!(syn.width <= opt.width, "syntactic layout wider than optimum");
    }
    Ok(format!("{} graphs", cases.len()))
}

fn birank_terms(rng: &mut ChaCha8Rng) -> Outcome {
    for _ in 0..40 {
        let n = rng.gen_range(1..=6);
        let g = random_digraph(n, 0.4, rng);
        let opt = birankwidth(&g).map_err(|e| e.to_string())?;
        let c = term_from_layout_birank(&g, &opt.witness).map_err(|e| e.to_string())?;
        let back = BiRankTerm::parse(g.field(), &c.term.to_sexpr()).map_err(|e| e.to_string())?;
        ensure!(back == c.term, "s-expression round trip");
        let ev = c.term.eval(g.field()).map_err(|e| e.to_string())?;
        let exact = c.relabel_into_input(&ev.graph, g.labels()).map_err(|e| e.to_string())?;
        ensure!(exact == g, "evaluation does not reproduce the digraph");
        let commuted = c.term.commuted().eval(g.field()).map_err(|e| e.to_string())?;
        ensure!(isomorphic(&commuted.graph, &g).map_err(|e| e.to_string())?.is_some(), "commuted term");
    }
    Ok("40 digraphs".into())
}

fn tilde_sandwich(rng: &mut ChaCha8Rng) -> Outcome {
    for _ in 0..40 {
        let n = rng.gen_range(2..=6);
        let g = random_digraph(n, 0.4, rng);
        let t = tilde(&g).map_err(|e| e.to_string())?;
        let r = rankwidth(&t).map_err(|e| e.to_string())?.width;
        let b = birankwidth(&g).map_err(|e| e.to_string())?.width;
        ensure!(r <= b && b <= 4 * r, "rw {r}, brw {b}");
    }
    Ok("40 digraphs".into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn battery_passes() {
        let report = run(7);
        assert!(report.passed(), "{}", report.to_table());
        assert_eq!(report.checks.len(), checks().len());
    }
}
