use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rankw_core::graph::{parse_graph, random_graph, random_sigma_graph, write_graph};
use rankw_core::iso::canonical_form;
use rankw_core::layout::{birankwidth, rankwidth};
use rankw_core::terms::{term_from_layout_birank, term_from_layout_rank};
use rankw_core::{BiRankTerm, Field, Layout, RankTerm, Sesquimorphism};

fn field(i: usize) -> Field {
    let (p, k) = [(2, 1), (3, 1), (2, 2), (5, 1), (2, 3), (3, 2)][i];
    Field::new(p, k).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn graph_files_round_trip(fi in 0usize..6, n in 0usize..9, seed in any::<u64>()) {
        let f = field(fi);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&f, n, 0.5, &mut rng);
        let text = write_graph(&g, None);
        let back = parse_graph(&text).unwrap();
        prop_assert_eq!(&back.graph, &g);
        prop_assert!(back.sigma.is_none());
        let s = Sesquimorphism::identity(&f);
        let sg = random_sigma_graph(&s, n, 0.5, &mut rng);
        let back = parse_graph(&write_graph(sg.graph(), Some(&s))).unwrap();
        prop_assert_eq!(back.sigma_graph().unwrap(), sg);
    }

    #[test]
    fn canonical_form_ignores_vertex_order(fi in 0usize..6, n in 1usize..8, seed in any::<u64>()) {
        let f = field(fi);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&f, n, 0.5, &mut rng);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        prop_assert_eq!(canonical_form(&g).unwrap(), canonical_form(&g.relabeled(&perm)).unwrap());
    }

    #[test]
    fn layouts_and_terms_round_trip(fi in 0usize..4, n in 1usize..8, seed in any::<u64>()) {
        let f = field(fi);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = Sesquimorphism::identity(&f);
        let g = random_sigma_graph(&s, n, rng.gen_range(0.2..0.9), &mut rng);
        let r = rankwidth(&g).unwrap();
        let labels = g.graph().labels();
        let text = r.witness.to_newick_with_width(labels, r.width);
        let (back, w) = Layout::parse_newick(&text, labels).unwrap();
        prop_assert_eq!(&back, &r.witness);
        prop_assert_eq!(w, Some(r.width));

        let t = term_from_layout_rank(&g, &r.witness).unwrap().term;
        prop_assert_eq!(RankTerm::parse(&f, &t.to_sexpr()).unwrap(), t);

        let d = random_graph(&f, n, 0.4, &mut rng);
        let b = birankwidth(&d).unwrap();
        let t = term_from_layout_birank(&d, &b.witness).unwrap().term;
        prop_assert_eq!(BiRankTerm::parse(&f, &t.to_sexpr()).unwrap(), t);
    }
}
