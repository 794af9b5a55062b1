//! Boolean-algebra laws of base projections, checked on every subset triple
//! of small spaces.

use vecmeasure::{AtomicMeasureSpace, BaseProjection, Space};

fn space(n: usize) -> Space {
    AtomicMeasureSpace::new((0..n).map(|i| (format!("w{i}"), 1.0 + i as f64))).unwrap()
}

fn all_subsets(space: &Space) -> Vec<BaseProjection> {
    let n = space.len();
    (0..1usize << n)
        .map(|bits| {
            BaseProjection::from_mask(space, (0..n).map(|i| bits >> i & 1 == 1).collect()).unwrap()
        })
        .collect()
}

#[test]
fn boolean_algebra_laws_hold_exhaustively() {
    for n in 0..=4 {
        let s = space(n);
        let sets = all_subsets(&s);
        let full = BaseProjection::full(&s);
        let empty = BaseProjection::empty(&s);
        for a in &sets {
            assert_eq!(a.join(&a.complement()).unwrap(), full);
            assert_eq!(a.meet(&a.complement()).unwrap(), empty);
            assert_eq!(a.complement().complement(), *a);
            assert_eq!(a.join(&empty).unwrap(), *a);
            assert_eq!(a.meet(&full).unwrap(), *a);
            for b in &sets {
                assert_eq!(a.join(b).unwrap(), b.join(a).unwrap());
                assert_eq!(a.meet(b).unwrap(), b.meet(a).unwrap());
                assert_eq!(a.join(&a.meet(b).unwrap()).unwrap(), *a);
                assert_eq!(a.meet(&a.join(b).unwrap()).unwrap(), *a);
                assert_eq!(
                    a.join(b).unwrap().complement(),
                    a.complement().meet(&b.complement()).unwrap()
                );
                assert_eq!(a.minus(b).unwrap(), a.meet(&b.complement()).unwrap());
                assert_eq!(
                    a.sym_diff(b).unwrap(),
                    a.minus(b).unwrap().join(&b.minus(a).unwrap()).unwrap()
                );
                assert_eq!(a.is_disjoint(b).unwrap(), a.meet(b).unwrap().is_empty());
                for c in &sets {
                    assert_eq!(
                        a.meet(&b.join(c).unwrap()).unwrap(),
                        a.meet(b).unwrap().join(&a.meet(c).unwrap()).unwrap()
                    );
                    assert_eq!(
                        a.join(&b.meet(c).unwrap()).unwrap(),
                        a.join(b).unwrap().meet(&a.join(c).unwrap()).unwrap()
                    );
                    assert_eq!(
                        a.join(&b.join(c).unwrap()).unwrap(),
                        a.join(b).unwrap().join(c).unwrap()
                    );
                }
            }
        }
    }
}

#[test]
fn integrals_are_additive_over_disjoint_sets() {
    let s = space(4);
    let f = vecmeasure::ScalarField::new(&s, vec![0.5, -1.0, 2.0, 3.25]).unwrap();
    for a in all_subsets(&s) {
        let whole = f.integrate(&BaseProjection::full(&s)).unwrap();
        let split = f.integrate(&a).unwrap() + f.integrate(&a.complement()).unwrap();
        assert!((whole - split).abs() < 1e-12);
    }
}
