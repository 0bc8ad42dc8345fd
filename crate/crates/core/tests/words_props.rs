mod common;

use cubecut::words::{
    abelianize, apply_automorphism, check_automorphism, cyclically_reduce, format_letters, inverse, parse_images,
    parse_letters, reduce, shenitzer_test, vertex_of, whitehead_graph, CyclicWord, Images, Letter, ShenitzerReason,
    ShenitzerVerdict, WordError,
};
use proptest::prelude::*;

use common::{word, W, W_PRIME};

fn letters(rank: i32, max_len: usize) -> impl Strategy<Value = Vec<Letter>> {
    proptest::collection::vec((1..=rank, any::<bool>()).prop_map(|(i, s)| if s { i } else { -i }), 0..max_len)
}

fn substitute(word: &[Letter], images: &Images) -> Vec<Letter> {
    let out: Vec<Letter> = word
        .iter()
        .flat_map(|&l| {
            let img = &images[l.unsigned_abs() as usize - 1];
            if l > 0 {
                img.clone()
            } else {
                inverse(img)
            }
        })
        .collect();
    reduce(&out)
}

/// Elementary Nielsen moves on a rank-2 basis.
fn nielsen(k: u8) -> Images {
    match k % 5 {
        0 => vec![vec![1, 2], vec![2]],
        1 => vec![vec![1, -2], vec![2]],
        2 => vec![vec![1], vec![2, 1]],
        3 => vec![vec![-1], vec![2]],
        _ => vec![vec![2], vec![1]],
    }
}

fn automorphism() -> impl Strategy<Value = Images> {
    proptest::collection::vec(any::<u8>(), 0..6).prop_map(|moves| {
        moves.into_iter().fold(vec![vec![1], vec![2]], |acc, k| {
            let m = nielsen(k);
            acc.iter().map(|img| substitute(img, &m)).collect()
        })
    })
}

proptest! {
    #[test]
    fn whitehead_degrees_count_letters(w in letters(3, 14)) {
        let Ok(cw) = CyclicWord::new(cyclically_reduce(&w), 3) else { return Ok(()) };
        let g = whitehead_graph(&cw);
        prop_assert_eq!(g.edges.len(), cw.len());
        let total: usize = (0..g.num_vertices()).map(|v| g.degree(v)).sum();
        prop_assert_eq!(total, 2 * cw.len());
        for i in 1..=3 {
            let count = cw.letters().iter().filter(|l| l.abs() == i).count();
            prop_assert_eq!(g.degree(vertex_of(i)), count);
            prop_assert_eq!(g.degree(vertex_of(-i)), count);
        }
    }

    #[test]
    fn free_reduction_laws(w in letters(3, 16), v in letters(3, 8)) {
        let r = reduce(&w);
        prop_assert_eq!(reduce(&r), r.clone());
        prop_assert!(r.windows(2).all(|p| p[0] != -p[1]));
        prop_assert_eq!(inverse(&inverse(&w)), w.clone());
        let mut ww = w.clone();
        ww.extend(inverse(&w));
        prop_assert!(reduce(&ww).is_empty());
        // conjugating does not change the cyclic reduction up to rotation
        let mut conj = v.clone();
        conj.extend(&w);
        conj.extend(inverse(&v));
        let (a, b) = (cyclically_reduce(&w), cyclically_reduce(&conj));
        prop_assert_eq!(a.len(), b.len());
        prop_assert_eq!(cyclically_reduce(&a), a.clone());
        if let (Ok(x), Ok(y)) = (CyclicWord::new(a, 3), CyclicWord::new(b, 3)) {
            prop_assert!(x.is_conjugate(&y));
        }
        prop_assert_eq!(parse_letters(&format_letters(&r)).unwrap(), r);
    }

    #[test]
    fn automorphisms_act_linearly_on_abelianization(phi in automorphism(), w in letters(2, 12)) {
        prop_assert!(check_automorphism(&phi, 2).is_ok());
        let cols: Vec<Vec<i64>> = phi.iter().map(|img| abelianize(img, 2)).collect();
        let det = cols[0][0] * cols[1][1] - cols[1][0] * cols[0][1];
        prop_assert!(det == 1 || det == -1);
        let Ok(cw) = CyclicWord::new(cyclically_reduce(&w), 2) else { return Ok(()) };
        let Ok(image) = apply_automorphism(&cw, &phi) else {
            return Err(TestCaseError::fail("automorphism rejected"));
        };
        let ab = cw.abelianization();
        let expected: Vec<i64> = (0..2).map(|r| cols[0][r] * ab[0] + cols[1][r] * ab[1]).collect();
        prop_assert_eq!(image.abelianization(), expected);
        let direct = CyclicWord::new(cyclically_reduce(&substitute(cw.letters(), &phi)), 2).unwrap();
        prop_assert!(image.is_conjugate(&direct));
    }
}

#[test]
fn shenitzer_examples() {
    match shenitzer_test(&word(W)) {
        ShenitzerVerdict::Inconclusive { reason: ShenitzerReason::CutVertex { vertex } } => assert_eq!(vertex, "b"),
        other => panic!("{other:?}"),
    }
    assert_eq!(shenitzer_test(&word(W_PRIME)), ShenitzerVerdict::NoFreeSplitting);
    assert!(matches!(
        shenitzer_test(&word("ab")),
        ShenitzerVerdict::Inconclusive { reason: ShenitzerReason::Disconnected { .. } }
    ));
    assert_eq!(shenitzer_test(&word("abAB")), ShenitzerVerdict::NoFreeSplitting);
}

#[test]
fn automorphism_parsing_and_rejection() {
    let phi = parse_images("a=aBB,b=b", 2).unwrap();
    assert_eq!(phi, vec![vec![1, -2, -2], vec![2]]);
    assert_eq!(apply_automorphism(&word(W), &phi).unwrap().to_string(), W_PRIME);
    let squash = parse_images("a=aa,b=b", 2).unwrap();
    assert!(matches!(check_automorphism(&squash, 2), Err(WordError::NotAutomorphism(_))));
    // determinant 1 but not an automorphism: a -> a b a B A, b -> b
    let sneaky = parse_images("a=abaBA,b=b", 2).unwrap();
    assert!(check_automorphism(&sneaky, 2).is_err());
    assert!(parse_images("a=ab", 2).is_err());
    assert!(CyclicWord::parse("aA", Some(2)).is_err());
    assert!(CyclicWord::parse("a?b", Some(2)).is_err());
}
