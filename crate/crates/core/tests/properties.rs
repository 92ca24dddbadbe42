//! Rank identities behind the deletion step of the obstruction bound, width
//! monotonicity under minors, and agreement of the two directed encodings.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rankw_core::cutrank::{full_set, members, CutFunction};
use rankw_core::graph::{directed, random_digraph, random_graph, random_sigma_graph, tilde};
use rankw_core::layout::{birankwidth, rankwidth};
use rankw_core::transform::{local_complement, local_complement_sigma, pivot_complement};
use rankw_core::{Elem, FMatrix, Field, Sesquimorphism, SigmaGraph};

fn configs() -> Vec<Sesquimorphism> {
    let f2 = Field::prime(2).unwrap();
    let f3 = Field::prime(3).unwrap();
    let f4 = Field::new(2, 2).unwrap();
    let f5 = Field::prime(5).unwrap();
    vec![
        Sesquimorphism::identity(&f2),
        Sesquimorphism::identity(&f3),
        Sesquimorphism::negation(&f3),
        Sesquimorphism::frobenius_conjugation(&f4).unwrap(),
        Sesquimorphism::identity(&f5),
        Sesquimorphism::negation(&f5),
    ]
}

fn instance(cfg: usize, n: usize, seed: u64) -> (SigmaGraph, ChaCha8Rng) {
    let s = &configs()[cfg];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_sigma_graph(s, n, rng.gen_range(0.3..0.9), &mut rng);
    (g, rng)
}

/// `rk [[corner, M[x][Y]], [M[X][x], M[X][Y]]]` with `Y` the rest of `V - x`.
fn bordered_rank(g: &SigmaGraph, x: usize, xs: &[usize], corner: Elem) -> usize {
    let m = g.graph();
    let ys: Vec<usize> = (0..g.n()).filter(|&v| v != x && !xs.contains(&v)).collect();
    let rows: Vec<usize> = std::iter::once(x).chain(xs.iter().copied()).collect();
    let cols: Vec<usize> = std::iter::once(x).chain(ys.iter().copied()).collect();
    let mut data = Vec::with_capacity(rows.len() * cols.len());
    for (i, &r) in rows.iter().enumerate() {
        for (j, &c) in cols.iter().enumerate() {
            data.push(if i == 0 && j == 0 { corner } else { m.get(r, c) });
        }
    }
    FMatrix::from_rows(g.field(), rows.len(), cols.len(), data).unwrap().rank()
}

/// Vertex subsets of `V - x`, as index lists in the graph with `x` present,
/// paired with the mask of the same set after `x` is deleted.
fn subsets_without(n: usize, x: usize) -> Vec<(Vec<usize>, u64)> {
    (0..=full_set(n - 1))
        .map(|mask| {
            let after: Vec<usize> = members(mask);
            let before = after.iter().map(|&v| if v >= x { v + 1 } else { v }).collect();
            (before, mask)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn local_complement_deletion_identity(cfg in 0usize..6, n in 2usize..7, seed in any::<u64>()) {
        let (g, mut rng) = instance(cfg, n, seed);
        let lambdas = g.sigma().compatible_set();
        prop_assume!(!lambdas.is_empty());
        let f = g.field().clone();
        let x = rng.gen_range(0..n);
        for &lam in &lambdas {
            let h = local_complement_sigma(&g, x, lam).unwrap().delete_vertex(x);
            let cut = CutFunction::for_sigma_graph(&h);
            let corner = f.neg(f.inv(lam).unwrap());
            for (xs, mask) in subsets_without(n, x) {
                let want = bordered_rank(&g, x, &xs, corner) - 1;
                prop_assert_eq!(cut.eval(mask) as usize, want);
                if lam == 1 {
                    prop_assert_eq!(bordered_rank(&g, x, &xs, f.neg(1)) - 1, want);
                }
            }
        }
    }

    #[test]
    fn pivot_deletion_identity(cfg in 0usize..6, n in 2usize..7, seed in any::<u64>()) {
        let (g, mut rng) = instance(cfg, n, seed);
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .filter(|&(a, b)| g.graph().get(a, b) != 0)
            .collect();
        prop_assume!(!edges.is_empty());
        let (x, y) = edges[rng.gen_range(0..edges.len())];
        let h = pivot_complement(&g, x, y).unwrap().delete_vertex(x);
        let cut = CutFunction::for_sigma_graph(&h);
        for (xs, mask) in subsets_without(n, x) {
            prop_assert_eq!(cut.eval(mask) as usize, bordered_rank(&g, x, &xs, 0) - 1);
        }
    }

    #[test]
    fn rankwidth_monotone_under_minors(cfg in 0usize..6, n in 2usize..8, seed in any::<u64>(), steps in 1usize..4) {
        let (mut g, mut rng) = instance(cfg, n, seed);
        let before = rankwidth(&g).unwrap().width;
        for _ in 0..steps {
            let n = g.n();
            let lambdas = g.sigma().compatible_set();
            let x = rng.gen_range(0..n);
            let y = rng.gen_range(0..n);
            if !lambdas.is_empty() && rng.gen_bool(0.5) {
                g = local_complement_sigma(&g, x, lambdas[rng.gen_range(0..lambdas.len())]).unwrap();
            } else if g.graph().get(x, y) != 0 {
                g = pivot_complement(&g, x, y).unwrap();
            }
        }
        let v = rng.gen_range(0..g.n());
        let minor = g.delete_vertex(v);
        prop_assert!(rankwidth(&minor).unwrap().width <= before);
        prop_assert_eq!(rankwidth(&g).unwrap().width, before);
    }

    #[test]
    fn birankwidth_monotone_under_vertex_minors(p in prop::sample::select(vec![(2u32, 1u32), (3, 1), (2, 2)]), n in 2usize..8, seed in any::<u64>()) {
        let f = Field::new(p.0, p.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = random_graph(&f, n, rng.gen_range(0.2..0.8), &mut rng);
        let before = birankwidth(&g).unwrap().width;
        for _ in 0..3 {
            let x = rng.gen_range(0..n);
            g = local_complement(&g, x, rng.gen_range(1..f.order())).unwrap();
        }
        prop_assert_eq!(birankwidth(&g).unwrap().width, before);
        let minor = g.delete_vertex(rng.gen_range(0..n));
        prop_assert!(birankwidth(&minor).unwrap().width <= before);
    }

    #[test]
    fn directed_encoding_is_conjugate_tilde(n in 1usize..8, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_digraph(n, 0.4, &mut rng);
        let arcs: Vec<(usize, usize)> = (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .filter(|&(x, y)| g.get(x, y) != 0)
            .collect();
        let d = directed(n, &arcs).unwrap();
        let t = tilde(&g).unwrap();
        prop_assert_eq!(d.field(), t.field());
        let conj = t.graph().map_colors(|c| t.field().frobenius(c));
        prop_assert_eq!(conj.adj(), d.graph().adj());
        let (fd, ft) = (CutFunction::for_sigma_graph(&d), CutFunction::for_sigma_graph(&t));
        for x in 0..=full_set(n) {
            prop_assert_eq!(fd.eval(x), ft.eval(x));
        }
    }
}
