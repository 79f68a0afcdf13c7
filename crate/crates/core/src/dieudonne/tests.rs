use num_rational::Ratio;

use super::*;
use crate::eo::{check_involution, enumerate_shuffles, w_fol_shuffle, w_ord_shuffle, Shuffle};

fn gf(p: u64) -> FiniteField {
    FiniteField::new(p, 1).unwrap()
}

fn sig(d: usize, f: &[usize]) -> SignatureFn {
    SignatureFn::new(d, f.to_vec()).unwrap()
}

fn inert(size: usize) -> OrbitDatum {
    OrbitDatum::new(size, OrbitKind::Inert).unwrap()
}

fn split(size: usize) -> OrbitDatum {
    OrbitDatum::new(size, OrbitKind::Split).unwrap()
}

/// All signatures of the given length with values in 0..=d.
fn all_signatures(d: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|f| {
                (0..=d).map(move |v| {
                    let mut g = f.clone();
                    g.push(v);
                    g
                })
            })
            .collect();
    }
    out
}

/// Signatures on an inert orbit of size 2m obeying f(i) + f(i+m) = d.
fn inert_signatures(d: usize, m: usize) -> Vec<Vec<usize>> {
    all_signatures(d, m)
        .into_iter()
        .map(|half| {
            let mut f = half.clone();
            f.extend(half.iter().map(|&v| d - v));
            f
        })
        .collect()
}

#[test]
fn orbit_constructor_validates() {
    assert_eq!(
        OrbitDatum::new(0, OrbitKind::Split),
        Err(DieudonneError::ZeroOrbitSize)
    );
    assert_eq!(
        OrbitDatum::new(3, OrbitKind::Inert),
        Err(DieudonneError::OddInertSize { size: 3 })
    );
    assert_eq!(inert(4).half_shift(), Some(2));
    assert_eq!(split(3).half_shift(), None);
    assert_eq!(split(3).wrap(-1), 2);
    assert_eq!(split(3).wrap(7), 1);
}

#[test]
fn signature_constructor_validates() {
    assert_eq!(
        SignatureFn::new(2, vec![1, 3]),
        Err(DieudonneError::SignatureRange {
            index: 1,
            value: 3,
            d: 2
        })
    );
    assert!(SignatureFn::new(2, vec![]).is_err());
    let f = sig(3, &[2, 1]);
    assert_eq!(f.at(-1), 1);
    assert_eq!(f.at(4), 2);
    assert_eq!(f.mirror().values(), &[1, 2]);
}

#[test]
fn datum_rejects_bad_shapes() {
    let orbit = inert(2);
    assert_eq!(
        CMTypeDatum::single(orbit, sig(3, &[1, 1])),
        Err(DieudonneError::InertSignatureSum {
            slot: 0,
            index: 0,
            sum: 2,
            d: 3
        })
    );
    let slots = vec![
        OrbitSlot {
            orbit: split(1),
            sig: sig(2, &[1]),
        },
        OrbitSlot {
            orbit: split(1),
            sig: sig(3, &[1]),
        },
    ];
    assert_eq!(
        CMTypeDatum::new(2, slots),
        Err(DieudonneError::RankMismatch {
            slot: 1,
            expected: 2,
            got: 3
        })
    );
    assert!(matches!(
        CMTypeDatum::single(split(2), sig(2, &[1])),
        Err(DieudonneError::SignatureLength { expected: 2, got: 1 })
    ));
}

#[test]
fn pair_normalization_inert() {
    // f = (2, 1): the single pair is represented at index 0
    let datum = CMTypeDatum::single(inert(2), sig(3, &[2, 1])).unwrap();
    assert_eq!(datum.pairs().len(), 1);
    let p = datum.pairs()[0];
    assert!(p.stored_side);
    assert_eq!((p.rep_index, p.r, p.r_prev), (0, 2, 1));

    // f = (1, 2): predecessor beats the index, representative moves to the
    // mirror index 1 with signatures unchanged as a multiset
    let datum = CMTypeDatum::single(inert(2), sig(3, &[1, 2])).unwrap();
    let p = datum.pairs()[0];
    assert_eq!((p.rep_index, p.r, p.r_prev), (1, 2, 1));

    // size 4, f = (0, 1, 2, 1): pair 0 rebalances, pair 1 stays
    let datum = CMTypeDatum::single(inert(4), sig(2, &[0, 1, 2, 1])).unwrap();
    assert_eq!(datum.pairs().len(), 2);
    assert_eq!(
        (datum.pairs()[0].rep_index, datum.pairs()[0].r, datum.pairs()[0].r_prev),
        (2, 2, 1)
    );
    assert_eq!(
        (datum.pairs()[1].rep_index, datum.pairs()[1].r, datum.pairs()[1].r_prev),
        (1, 1, 0)
    );
}

#[test]
fn pair_normalization_split() {
    let datum = CMTypeDatum::single(split(2), sig(3, &[1, 2])).unwrap();
    assert_eq!(datum.pairs().len(), 2);
    let p0 = datum.pairs()[0];
    // f(0)=1 < f(-1)=2: representative lies on the derived mirror orbit
    assert!(!p0.stored_side);
    assert_eq!((p0.rep_index, p0.r, p0.r_prev), (0, 2, 1));
    let p1 = datum.pairs()[1];
    assert!(p1.stored_side);
    assert_eq!((p1.rep_index, p1.r, p1.r_prev), (1, 2, 1));
    for p in datum.pairs() {
        assert!(p.r_prev <= p.r);
    }
}

#[test]
fn sigma_validation() {
    let datum = CMTypeDatum::single(split(3), sig(2, &[1, 1, 0])).unwrap();
    assert!(datum.validate_sigma(&[]).is_ok());
    assert!(datum.validate_sigma(&[0, 2]).is_ok());
    assert_eq!(
        datum.validate_sigma(&[2, 1]),
        Err(DieudonneError::SigmaNotStrictlyIncreasing)
    );
    assert_eq!(
        datum.validate_sigma(&[3]),
        Err(DieudonneError::SigmaOutOfRange { got: 3, count: 3 })
    );
    assert_eq!(datum.all_pairs(), vec![0, 1, 2]);
}

#[test]
fn standard_module_frozen_matrices() {
    let field = gf(2);
    let orbit = inert(2);
    let f = sig(3, &[2, 1]);
    let module = build_standard(&field, &orbit, &f).unwrap();
    let dense = |m: &Matrix| -> Vec<Vec<i64>> {
        (0..m.rows())
            .map(|r| {
                (0..m.cols())
                    .map(|c| i64::from(!m[(r, c)].is_zero()))
                    .collect()
            })
            .collect()
    };
    assert_eq!(
        dense(module.f_matrix(0)),
        vec![vec![1, 0, 0], vec![0, 0, 0], vec![0, 0, 0]]
    );
    assert_eq!(
        dense(module.f_matrix(1)),
        vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 0]]
    );
    assert_eq!(
        dense(module.v_matrix(0)),
        vec![vec![0, 0, 0], vec![0, 0, 0], vec![0, 0, 1]]
    );
    assert_eq!(
        dense(module.v_matrix(1)),
        vec![vec![0, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]
    );
    assert!(module.composites_vanish());
}

#[test]
fn shuffle_module_frozen_matrices() {
    let field = gf(2);
    let orbit = inert(2);
    let f = sig(3, &[2, 1]);
    // stored shuffle 1-3-2 at index 0, its check 2-1-3 at index 1
    let w0 = w_fol_shuffle(3, 2, 1);
    assert_eq!(w0.one_line(), &[1, 3, 2]);
    let w1 = check_involution(&w0);
    assert_eq!(w1.one_line(), &[2, 1, 3]);
    let module = build_from_shuffle(&field, &orbit, &f, &[w0, w1]).unwrap();
    let ones = |m: &Matrix| -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                if !m[(r, c)].is_zero() {
                    out.push((r, c));
                }
            }
        }
        out
    };
    assert_eq!(ones(module.f_matrix(0)), vec![(0, 1)]);
    assert_eq!(ones(module.f_matrix(1)), vec![(0, 0), (1, 2)]);
    assert_eq!(ones(module.v_matrix(0)), vec![(1, 2)]);
    assert_eq!(ones(module.v_matrix(1)), vec![(0, 1), (2, 2)]);
    assert!(module.composites_vanish());
    assert_eq!(module.dim_ker_v_on_cotangent(0), 1);
    assert_eq!(module.dim_ker_v_on_cotangent(1), 0);
}

#[test]
fn shuffle_module_rejects_mismatches() {
    let field = gf(2);
    let orbit = split(2);
    let f = sig(2, &[1, 1]);
    let w = Shuffle::identity(2, 1);
    assert!(matches!(
        build_from_shuffle(&field, &orbit, &f, std::slice::from_ref(&w)),
        Err(DieudonneError::ShuffleCount { expected: 2, got: 1 })
    ));
    let bad = Shuffle::identity(2, 2);
    assert!(matches!(
        build_from_shuffle(&field, &orbit, &f, &[w, bad]),
        Err(DieudonneError::ShuffleBlocks { index: 1, .. })
    ));
}

#[test]
fn ord_shuffles_reproduce_standard_module() {
    let field = gf(3);
    for d in 1..=4 {
        for size in 1..=3 {
            let orbit = split(size);
            for f in all_signatures(d, size) {
                let f = sig(d, &f);
                let ws: Vec<Shuffle> = (0..size)
                    .map(|i| {
                        let fi = f.at(i as isize);
                        w_ord_shuffle(fi, d - fi)
                    })
                    .collect();
                let std_module = build_standard(&field, &orbit, &f).unwrap();
                let ord_module = build_from_shuffle(&field, &orbit, &f, &ws).unwrap();
                let same = |x: &Matrix, y: &Matrix| {
                    (0..x.rows()).all(|r| (0..x.cols()).all(|c| x[(r, c)] == y[(r, c)]))
                };
                for i in 0..size {
                    assert!(
                        same(std_module.f_matrix(i), ord_module.f_matrix(i))
                            && same(std_module.v_matrix(i), ord_module.v_matrix(i)),
                        "d={d} f={:?} i={i}",
                        f.values()
                    );
                }
            }
        }
    }
}

#[test]
fn cotangent_dimension_is_signature() {
    let field = gf(5);
    for d in 0..=4 {
        for f in all_signatures(d, 2) {
            let f = sig(d, &f);
            let orbit = split(2);
            let module = build_standard(&field, &orbit, &f).unwrap();
            for i in 0..2 {
                assert_eq!(module.cotangent_component(i).cols(), f.at(i as isize));
            }
            for ws in [
                (0..2)
                    .map(|i| {
                        let fi = f.at(i as isize);
                        w_ord_shuffle(fi, d - fi)
                    })
                    .collect::<Vec<_>>(),
                (0..2)
                    .map(|i| Shuffle::identity(d, f.at(i as isize)))
                    .collect::<Vec<_>>(),
            ] {
                let module = build_from_shuffle(&field, &orbit, &f, &ws).unwrap();
                for i in 0..2 {
                    assert_eq!(module.cotangent_component(i).cols(), f.at(i as isize));
                }
            }
        }
    }
}

#[test]
fn standard_module_kernel_count_is_signature_drop() {
    let field = gf(2);
    for d in 0..=4 {
        for size in 1..=3 {
            let orbit = split(size);
            for f in all_signatures(d, size) {
                let f = sig(d, &f);
                let module = build_standard(&field, &orbit, &f).unwrap();
                for i in 0..size {
                    let fi = f.at(i as isize);
                    let fprev = f.at(i as isize - 1);
                    assert_eq!(
                        module.dim_ker_v_on_cotangent(i),
                        fi.saturating_sub(fprev),
                        "d={d} f={:?} i={i}",
                        f.values()
                    );
                }
            }
        }
    }
}

#[test]
fn identity_shuffle_kernel_count_is_min() {
    let field = gf(2);
    for d in 0..=4 {
        let orbit = split(2);
        for f in all_signatures(d, 2) {
            let f = sig(d, &f);
            let ws: Vec<Shuffle> = (0..2).map(|i| Shuffle::identity(d, f.at(i as isize))).collect();
            let module = build_from_shuffle(&field, &orbit, &f, &ws).unwrap();
            for i in 0..2 {
                let fi = f.at(i as isize);
                let fprev = f.at(i as isize - 1);
                assert_eq!(module.dim_ker_v_on_cotangent(i), fi.min(d - fprev));
            }
        }
    }
}

#[test]
fn kernel_counts_are_field_independent() {
    // structure constants are 0/1 and each operator is a sub-permutation
    // matrix, so ranks cannot depend on the coefficient field
    let fields = [gf(2), gf(7), FiniteField::new(3, 2).unwrap()];
    let orbit = split(2);
    let d = 3;
    for f in all_signatures(d, 2) {
        let f = sig(d, &f);
        for w0 in enumerate_shuffles(f.at(0), d) {
            for w1 in enumerate_shuffles(f.at(1), d) {
                let dims: Vec<Vec<usize>> = fields
                    .iter()
                    .map(|field| {
                        let module =
                            build_from_shuffle(field, &orbit, &f, &[w0.clone(), w1.clone()])
                                .unwrap();
                        (0..2).map(|i| module.dim_ker_v_on_cotangent(i)).collect()
                    })
                    .collect();
                assert!(dims.windows(2).all(|w| w[0] == w[1]));
            }
        }
    }
}

#[test]
fn composites_vanish_for_all_shuffle_modules() {
    let field = FiniteField::new(2, 2).unwrap();
    let orbit = split(2);
    let d = 3;
    for f in all_signatures(d, 2) {
        let f = sig(d, &f);
        for w0 in enumerate_shuffles(f.at(0), d) {
            for w1 in enumerate_shuffles(f.at(1), d) {
                let module = build_from_shuffle(&field, &orbit, &f, &[w0.clone(), w1.clone()]).unwrap();
                assert!(module.composites_vanish(), "f={:?} w0={w0} w1={w1}", f.values());
            }
        }
    }
}

#[test]
fn slope_profile_frozen_small() {
    // balanced signature on a 2-cycle: F and V each act invertibly on one
    // slot per index, so the slopes split as 0 and 1
    let profile = slope_decomposition(&inert(2), &sig(2, &[1, 1]));
    assert_eq!(
        profile.classes,
        vec![
            SlopeClass {
                slope: Ratio::new(0, 1),
                multiplicity: 1,
                g: vec![false, false],
            },
            SlopeClass {
                slope: Ratio::new(1, 1),
                multiplicity: 1,
                g: vec![true, true],
            },
        ]
    );

    // extreme signature (0, 2): F vanishes at one index, V at the other, and
    // everything sits in a single slope-1/2 class
    let profile = slope_decomposition(&inert(2), &sig(2, &[0, 2]));
    assert_eq!(
        profile.classes,
        vec![SlopeClass {
            slope: Ratio::new(1, 2),
            multiplicity: 2,
            g: vec![false, true],
        }]
    );

    let profile = slope_decomposition(&split(2), &sig(2, &[1, 2]));
    assert_eq!(
        profile.classes,
        vec![
            SlopeClass {
                slope: Ratio::new(1, 2),
                multiplicity: 1,
                g: vec![false, true],
            },
            SlopeClass {
                slope: Ratio::new(1, 1),
                multiplicity: 1,
                g: vec![true, true],
            },
        ]
    );
}

#[test]
fn slope_profile_frozen_d3() {
    let profile = slope_decomposition(&split(2), &sig(3, &[1, 2]));
    let got: Vec<(Ratio<i64>, usize, Vec<bool>)> = profile
        .classes
        .iter()
        .map(|c| (c.slope, c.multiplicity, c.g.clone()))
        .collect();
    assert_eq!(
        got,
        vec![
            (Ratio::new(0, 1), 1, vec![false, false]),
            (Ratio::new(1, 2), 1, vec![false, true]),
            (Ratio::new(1, 1), 1, vec![true, true]),
        ]
    );
}

#[test]
fn slope_profile_ordinary_and_supersingular() {
    // constant signature c on a single index: slopes 0 and 1
    let profile = slope_decomposition(&split(1), &sig(3, &[1]));
    let got: Vec<(Ratio<i64>, usize)> = profile
        .classes
        .iter()
        .map(|c| (c.slope, c.multiplicity))
        .collect();
    assert_eq!(got, vec![(Ratio::new(0, 1), 2), (Ratio::new(1, 1), 1)]);

    // rank 1, signature (0, 1): a single slope-1/2 class
    let profile = slope_decomposition(&inert(2), &sig(1, &[0, 1]));
    assert_eq!(profile.classes.len(), 1);
    assert_eq!(profile.classes[0].slope, Ratio::new(1, 2));
    assert_eq!(profile.classes[0].multiplicity, 1);
    assert_eq!(profile.rank(), 1);
}

#[test]
fn slope_profile_invariants_exhaustive() {
    for d in 1..=5 {
        for size in 1..=4 {
            let orbit = split(size);
            for f in all_signatures(d, size) {
                let f = sig(d, &f);
                let profile = slope_decomposition(&orbit, &f);
                assert_eq!(profile.rank(), d);
                // slopes strictly increasing
                assert!(profile
                    .classes
                    .windows(2)
                    .all(|w| w[0].slope < w[1].slope));
                // g profiles grow with the slope
                for i in 0..size {
                    assert!(profile
                        .classes
                        .windows(2)
                        .all(|w| w[0].g[i] <= w[1].g[i]));
                }
                // the signature is recovered from multiplicities and g
                for i in 0..size {
                    let recovered: usize = profile
                        .classes
                        .iter()
                        .map(|c| c.multiplicity * usize::from(c.g[i]))
                        .sum();
                    assert_eq!(recovered, f.at(i as isize), "d={d} f={:?} i={i}", f.values());
                }
            }
        }
    }
}

#[test]
fn duality_holds_for_inert_signatures() {
    for d in 1..=4 {
        for m in 1..=2 {
            let orbit = inert(2 * m);
            for f in inert_signatures(d, m) {
                let f = sig(d, &f);
                let report = duality_check(&orbit, &f).unwrap();
                assert_eq!(report, DualityReport { pass: true, failure: None });
            }
        }
    }
}

#[test]
fn duality_rejects_unbalanced_signature() {
    let report = duality_check(&inert(2), &sig(3, &[1, 1])).unwrap();
    assert!(!report.pass);
    assert_eq!(
        report.failure,
        Some(DualityFailure::SignatureSum { index: 0, sum: 2 })
    );
    assert_eq!(
        duality_check(&split(2), &sig(2, &[1, 1])),
        Err(DieudonneError::NotInert)
    );
}
