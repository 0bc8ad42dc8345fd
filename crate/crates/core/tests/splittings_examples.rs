mod common;

use std::collections::BTreeSet;

use cubecut::corpus;
use cubecut::cube_complex::{CubeComplex, HomologyGroup};
use cubecut::simplicial::SimplicialComplex;
use cubecut::splittings::{
    abstract_component, candidate_subcomplexes, classify_cut, detect_periodic_2cut, search_ball,
    search_free_splitting, unfold_grushko, verify_periodic_2cut, wall_width, whitehead_lemma_certificate, SplitError,
};
use cubecut::whitehead::{crossing_walls, cut_subcomplex, whitehead_complex};
use cubecut::words::{double_complex, mapping_cylinder_complex, CyclicWord};
use proptest::prelude::*;

use common::{npc_corpus, word, W_PRIME};

fn is_zero_cut(wh: &SimplicialComplex) -> bool {
    wh.num_components() >= 2
}

fn is_one_cut(wh: &SimplicialComplex) -> bool {
    wh.is_connected() && !wh.cut_sets_of_size(1, true).is_empty()
}

/// Smallest separating independent set, by exhaustion over all subsets.
fn brute_min_cut(s: &SimplicialComplex, k_max: usize) -> Option<usize> {
    let vs: Vec<usize> = s.vertices().collect();
    (1..=k_max.min(vs.len())).find(|&k| {
        (0u32..1 << vs.len()).filter(|m| m.count_ones() as usize == k).any(|m| {
            let set: Vec<usize> = (0..vs.len()).filter(|i| m & (1 << i) != 0).map(|i| vs[i]).collect();
            let independent = set.iter().enumerate().all(|(i, &a)| set[i + 1..].iter().all(|&b| !s.are_adjacent(a, b)));
            independent && s.separates(&set)
        })
    })
}

#[test]
fn producing_zero_cuts() {
    let mut checked = 0;
    for x in [corpus::rose(2), corpus::rose(3), corpus::torus_wedge_circle()] {
        let ball = search_ball(&x, 3).unwrap();
        for y in candidate_subcomplexes(&ball) {
            let wh = whitehead_complex(&ball, &y).unwrap();
            if !wh.stabilized || !is_zero_cut(&wh.complex) {
                continue;
            }
            for h in crossing_walls(&ball, &y) {
                let (y1, y2) = cut_subcomplex(&ball, &y, h).unwrap();
                let w1 = whitehead_complex(&ball, &y1).unwrap();
                let w2 = whitehead_complex(&ball, &y2).unwrap();
                if !(w1.stabilized && w2.stabilized) {
                    continue;
                }
                let ok = is_zero_cut(&w1.complex)
                    || is_zero_cut(&w2.complex)
                    || (is_one_cut(&w1.complex) && is_one_cut(&w2.complex));
                assert!(ok, "Y = {:?}, H = {h}", y.vertices);
                checked += 1;
            }
        }
    }
    assert!(checked > 20, "only {checked} instances");
}

#[test]
fn reported_cut_size_is_minimal_and_monotone() {
    let mut checked = 0;
    for (name, x) in npc_corpus() {
        if x.dimension() > 2 {
            continue;
        }
        let ball = search_ball(&x, 3).unwrap();
        for y in candidate_subcomplexes(&ball).into_iter().take(6) {
            let wh = whitehead_complex(&ball, &y).unwrap();
            if !wh.stabilized || wh.complex.num_vertices() > 16 {
                continue;
            }
            let report = classify_cut(&ball, &y, 3).unwrap();
            let expected = if is_zero_cut(&wh.complex) { Some(0) } else { brute_min_cut(&wh.complex, 3) };
            assert_eq!(report.as_ref().map(|r| r.k), expected, "{name}: Y = {:?}", y.vertices);
            // enlarging a cut set of a connected complex keeps it separating
            if let Some(r) = report.filter(|r| r.k > 0) {
                for v in wh.complex.vertices() {
                    if r.cut_walls.iter().all(|&c| c != v && !wh.complex.are_adjacent(c, v)) {
                        let mut bigger = r.cut_walls.clone();
                        bigger.push(v);
                        assert!(wh.complex.separates(&bigger), "{name}");
                    }
                }
            }
            checked += 1;
        }
    }
    assert!(checked > 10);
}

#[test]
fn width_between_parallel_walls() {
    let ball = search_ball(&corpus::torus(), 4).unwrap();
    let far = ball.follow(&ball.parse_word("aa").unwrap()).unwrap();
    let y = ball.convex_hull(&[0, far]).unwrap();
    let wh = whitehead_complex(&ball, &y).unwrap();
    assert!(wh.stabilized);
    let walls = wh.walls();
    let mut widths: Vec<usize> = Vec::new();
    for (i, &a) in walls.iter().enumerate() {
        for &b in &walls[i + 1..] {
            if !wh.complex.are_adjacent(a, b) {
                widths.push(wall_width(&ball, a, b));
            }
        }
    }
    widths.sort();
    // the walls capping the two ends of the path, and the two running along it
    assert_eq!(widths, [1, 3]);
    let r = classify_cut(&ball, &y, 2).unwrap().unwrap();
    assert_eq!(r.k, 2);
    let rose = search_ball(&corpus::rose(2), 3).unwrap();
    let v = rose.convex_hull(&[0]).unwrap();
    assert_eq!(classify_cut(&rose, &v, 2).unwrap().unwrap().k, 0);
}

#[test]
fn free_splitting_search() {
    let r = search_free_splitting(&corpus::rose(2), 2).unwrap().unwrap();
    assert_eq!(r.k, 0);
    assert_eq!(r.classes.len(), 7);
    let r = search_free_splitting(&corpus::torus_wedge_circle(), 2).unwrap().unwrap();
    assert_eq!(r.y.len(), 1);
    assert!(search_free_splitting(&corpus::torus(), 3).unwrap().is_none());
    assert!(search_free_splitting(&double_complex(&word(W_PRIME)), 2).unwrap().is_none());
}

#[test]
fn periodic_cut_replays() {
    let x = double_complex(&word(W_PRIME));
    let cut = detect_periodic_2cut(&x, 2, 2).unwrap().unwrap();
    assert!(verify_periodic_2cut(&x, &cut).unwrap());
    let mut forged = cut.clone();
    forged.witness.to = forged.witness.from;
    assert!(!verify_periodic_2cut(&x, &forged).unwrap());
    // the pulled-back classes are recomputed from c_Y independently
    let ball = search_ball(&x, 2).unwrap();
    let again = abstract_component(&ball, &cut.report.y, cut.report.cut_walls[0], &cut.class).unwrap();
    assert_eq!(again, cut.first);
    assert!(matches!(detect_periodic_2cut(&corpus::torus_wedge_circle(), 2, 2), Err(SplitError::Preflight { k: 0, .. })));
}

fn grushko_checks(name: &str, x: &CubeComplex) {
    let r = unfold_grushko(x, None).unwrap();
    assert_eq!(r.h1_before, r.h1_after, "{name}");
    assert_eq!(r.h1_before, x.homology_h1(), "{name}");
    assert!(r.unfolded.is_npc(), "{name}");
    assert_eq!(r.unfolded.num_squares(), x.num_squares(), "{name}");
    // H1 of a free product: graph part plus the factors
    let mut rank = r.graph_rank;
    let mut torsion: Vec<u64> = Vec::new();
    for f in &r.factors {
        assert!(whitehead_lemma_certificate(f).unwrap().is_certified(), "{name}");
        let h = f.homology_h1();
        rank += h.rank;
        torsion.extend(h.torsion);
    }
    for s in &r.squares {
        assert_eq!(s.homology_h1(), HomologyGroup { rank: 0, torsion: vec![] });
    }
    torsion.sort();
    let mut expected = r.h1_after.torsion.clone();
    expected.sort();
    assert_eq!((rank, torsion), (r.h1_after.rank, expected), "{name}");
}

#[test]
fn grushko_on_the_corpus() {
    for (name, x) in npc_corpus() {
        if x.dimension() <= 2 {
            grushko_checks(&name, &x);
        }
    }
    assert!(matches!(unfold_grushko(&corpus::three_torus(), None), Err(SplitError::UnsupportedDimension(3))));
    assert!(matches!(unfold_grushko(&corpus::cube_surface(), None), Err(SplitError::NotNpc(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn grushko_on_word_complexes(
        letters in proptest::collection::vec(prop_oneof![Just('a'), Just('b'), Just('A'), Just('B')], 1..10),
        cylinder in any::<bool>(),
    ) {
        let Ok(w) = CyclicWord::parse(&letters.into_iter().collect::<String>(), Some(2)) else { return Ok(()) };
        let x = if cylinder { mapping_cylinder_complex(&w) } else { double_complex(&w) };
        grushko_checks(&w.to_string(), &x);
    }
}

#[test]
fn certificate_names_the_vertex() {
    let twi = corpus::torus_wedge_interval();
    let cert = whitehead_lemma_certificate(&twi).unwrap();
    assert!(!cert.is_certified());
    let tws = corpus::torus_wedge_circle();
    let names: BTreeSet<String> = (0..tws.num_vertices()).map(|v| tws.vertex_id(v).to_string()).collect();
    match whitehead_lemma_certificate(&tws).unwrap() {
        cubecut::splittings::Certificate::Inapplicable { vertex, .. } => assert!(names.contains(&vertex)),
        other => panic!("{other:?}"),
    }
}
