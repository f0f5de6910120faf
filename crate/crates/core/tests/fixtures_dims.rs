use saguaro_core::algebra::Algebra;
use saguaro_core::fixtures;
use saguaro_core::presentation::parse_presentation;
use saguaro_core::{Fp, Rationals};

fn per_vertex(name: &str) -> Vec<usize> {
    let p = fixtures::presentation(name).unwrap();
    let a = Algebra::build(&p, Rationals).unwrap();
    (0..p.quiver.n).map(|e| a.basis_from(e).len()).collect()
}

#[test]
fn projective_dimensions_match_drawn_graphs() {
    assert_eq!(per_vertex("ex1.1"), vec![13, 10, 9, 6]);
    assert_eq!(per_vertex("ex4.2"), vec![4, 2]);
    assert_eq!(per_vertex("ex4.3"), vec![4, 2, 2, 2, 2, 4]);
    assert_eq!(per_vertex("ex4.4"), vec![4, 2, 4]);
    assert_eq!(per_vertex("ex4.5"), vec![4, 2, 5]);
    assert_eq!(per_vertex("ex7.3"), vec![3, 5, 4, 5, 3]);
    assert_eq!(per_vertex("ex7.5"), vec![4, 5, 4, 4, 6, 5, 5, 5, 5, 5, 5, 3, 3, 2]);
    assert_eq!(per_vertex("ex8.7"), vec![7, 7, 2, 8, 7, 4, 2, 2, 3]);
    assert_eq!(per_vertex("ex3-brush"), vec![6, 2, 2, 1, 2, 2]);
}

#[test]
fn every_fixture_round_trips() {
    for name in fixtures::NAMES {
        let p = fixtures::presentation(name).unwrap();
        let again = parse_presentation(&p.pretty()).unwrap();
        assert_eq!(p, again, "{name}");
        assert_eq!(p.pretty(), again.pretty());
    }
}

#[test]
fn monomial_fixtures_agree_over_f2() {
    for name in ["ex4.2", "ex4.3", "ex7.3", "ex7.5", "ex1.1"] {
        let p = fixtures::presentation(name).unwrap();
        let q = Algebra::build(&p, Rationals).unwrap();
        let f = Algebra::build(&p, Fp::new(2).unwrap()).unwrap();
        assert_eq!(q.basis, f.basis, "{name}");
    }
}

#[test]
fn binomial_rewrites() {
    let p = fixtures::presentation("ex8.7").unwrap();
    let a = Algebra::build(&p, Rationals).unwrap();
    let q = a.quiver();
    let lhs = a.nf_path(&q.parse_path("a9*g2").unwrap());
    let rhs = a.nf_path(&q.parse_path("a3*a2*b2").unwrap());
    assert!(!lhs.is_empty());
    assert_eq!(lhs, rhs);
    assert_eq!(a.loewy_length, 5);
}
