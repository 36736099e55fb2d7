//! Property tests for the library-level invariants: exact reflection
//! identities, multilinearity, lift independence, record bookkeeping,
//! comparison symmetry and format round-trips.

use proptest::prelude::*;

use mori_class::classifier::compare;
use mori_class::cubic::CubicForm;
use mori_class::format::{parse_str, print, MfsFile};
use mori_class::intmat::IntMatrix;
use mori_class::lattice::{divisibility, BilinearLattice, Mod2Class};
use mori_class::mfs::{
    invariants_singular, DelPezzoFibration, FanoRankOne, FibrationKind, MfsDescription,
    SingularConicBundle, SmoothConicBundle, SurfaceData,
};
use mori_class::Outcome;

fn diag_lattice() -> impl Strategy<Value = BilinearLattice> {
    (1usize..=2, 1usize..=3).prop_map(|(p, q)| BilinearLattice::diag(p, q))
}

/// A lattice together with a reflection vector of norm +-2 in it.
fn lattice_with_reflection_vector() -> impl Strategy<Value = (BilinearLattice, Vec<i64>)> {
    diag_lattice()
        .prop_flat_map(|lat| {
            let n = lat.rank();
            (Just(lat), proptest::collection::vec(-3i64..=3, n))
        })
        .prop_filter("norm +-2", |(lat, u)| matches!(lat.norm(u), Ok(2) | Ok(-2)))
}

fn arb_description() -> impl Strategy<Value = MfsDescription> {
    prop_oneof![
        (1i64..=30, 0i64..=2).prop_map(|(deg, m)| {
            MfsDescription::Fano(FanoRankOne::new(deg, 4 - 2 * m).expect("bookkeeping"))
        }),
        (-6i64..=-1).prop_map(|t| {
            MfsDescription::DelPezzo(DelPezzoFibration::QuadricBundle { twist: t })
        }),
        (-4i64..=4).prop_map(|t| {
            MfsDescription::DelPezzo(DelPezzoFibration::PlaneBundle { twist: t })
        }),
        (1i64..=6, -15i64..=15, 0i64..=6).prop_map(|(k, rel_k3, m)| {
            MfsDescription::DelPezzo(DelPezzoFibration::LowDegree {
                k,
                d: 1,
                rel_k3,
                euler: 6 - 2 * m,
            })
        }),
        (0usize..=2).prop_flat_map(|q| {
            (proptest::collection::vec(-2i64..=2, q + 1), -3i64..=3).prop_map(move |(c1e, c2e)| {
                MfsDescription::CbSmooth(
                    SmoothConicBundle::new(SurfaceData::blown_up_plane(q), c1e, c2e)
                        .expect("dims agree"),
                )
            })
        }),
        (0usize..=2).prop_flat_map(|q| {
            (proptest::collection::vec(-3i64..=3, q + 1), -5i64..=5).prop_filter_map(
                "valid singular bundle",
                move |(c1rel, c2rel)| {
                    SingularConicBundle::new(SurfaceData::blown_up_plane(q), c1rel, c2rel)
                        .ok()
                        .map(MfsDescription::CbSingular)
                },
            )
        }),
    ]
}

proptest! {
    #[test]
    fn reflections_are_isometric_involutions((lat, u) in lattice_with_reflection_vector()) {
        let f = lat.reflection(&u).unwrap();
        let m = f.matrix();
        prop_assert_eq!(&m.transpose().mul(lat.gram()).mul(m), lat.gram());
        prop_assert_eq!(m.mul(m), IntMatrix::identity(lat.rank()));
    }

    #[test]
    fn isometries_preserve_vector_invariants(
        ((lat, u), seed) in lattice_with_reflection_vector()
            .prop_flat_map(|(lat, u)| {
                let n = lat.rank();
                ((Just(lat), Just(u)), proptest::collection::vec(-4i64..=4, n))
            })
            .prop_filter("nonzero", |(_, v)| v.iter().any(|&x| x != 0)),
    ) {
        let f = lat.reflection(&u).unwrap();
        let w = f.apply(&seed);
        prop_assert_eq!(lat.norm(&w).unwrap(), lat.norm(&seed).unwrap());
        prop_assert_eq!(divisibility(&w).unwrap(), divisibility(&seed).unwrap());
        prop_assert_eq!(lat.vector_type(&w).unwrap(), lat.vector_type(&seed).unwrap());
    }

    #[test]
    fn alpha_is_lift_independent(
        (lat, bits, shift) in diag_lattice()
            .prop_flat_map(|lat| {
                let n = lat.rank();
                (
                    Just(lat),
                    proptest::collection::vec(0u8..=1, n),
                    proptest::collection::vec(-3i64..=3, n),
                )
            })
            .prop_filter("nonzero class", |(_, bits, _)| bits.iter().any(|&b| b == 1)),
    ) {
        let alpha = lat.alpha_mod4(&Mod2Class::new(bits.clone())).unwrap();
        let lift: Vec<i64> = bits
            .iter()
            .zip(shift.iter())
            .map(|(&b, &s)| b as i64 + 2 * s)
            .collect();
        prop_assert_eq!(lat.norm(&lift).unwrap().rem_euclid(4) as u8, alpha);
    }

    #[test]
    fn divisibility_scales(
        v in proptest::collection::vec(-9i64..=9, 1..=6),
        k in 1i64..=5,
    ) {
        prop_assume!(v.iter().any(|&x| x != 0));
        let scaled: Vec<i64> = v.iter().map(|x| k * x).collect();
        prop_assert_eq!(
            divisibility(&scaled).unwrap(),
            k * divisibility(&v).unwrap()
        );
    }

    #[test]
    fn cubic_evaluation_is_multilinear_and_symmetric(
        entries in proptest::collection::vec(-4i64..=4, 10),
        a in proptest::collection::vec(-3i64..=3, 3),
        a2 in proptest::collection::vec(-3i64..=3, 3),
        b in proptest::collection::vec(-3i64..=3, 3),
        c in proptest::collection::vec(-3i64..=3, 3),
    ) {
        // ten free coefficients of a symmetric rank-3 tensor on sorted triples
        let mut it = entries.into_iter();
        let mut coef = std::collections::HashMap::new();
        for i in 0..3usize {
            for j in i..3 {
                for k in j..3 {
                    coef.insert((i, j, k), it.next().unwrap());
                }
            }
        }
        let form = CubicForm::from_fn(3, |i, j, k| coef[&(i, j, k)]);
        let sum: Vec<i64> = a.iter().zip(a2.iter()).map(|(x, y)| x + y).collect();
        prop_assert_eq!(
            form.evaluate(&sum, &b, &c).unwrap(),
            form.evaluate(&a, &b, &c).unwrap() + form.evaluate(&a2, &b, &c).unwrap()
        );
        prop_assert_eq!(
            form.evaluate(&a, &b, &c).unwrap(),
            form.evaluate(&c, &a, &b).unwrap()
        );
    }

    #[test]
    fn records_keep_their_bookkeeping(desc in arb_description()) {
        let r = desc.invariants();
        prop_assert!(r.validate().is_ok(), "{r:?}");
        prop_assert_eq!(r.euler, 2 + 2 * r.b2 - r.b3);
        prop_assert!(r.b3 >= 0 && r.b3 % 2 == 0);
        match &desc {
            MfsDescription::CbSmooth(_) => prop_assert_eq!(r.b3, 0),
            MfsDescription::CbSingular(m) => {
                prop_assert_eq!(r.euler + r.b3, 2 * m.surface.euler());
                prop_assert!(matches!(
                    r.w2_type,
                    Some(mori_class::mfs::W2Type::II) | Some(mori_class::mfs::W2Type::III1)
                ));
            }
            MfsDescription::DelPezzo(dp) => {
                let (k, d) = (dp.k(), dp.d());
                prop_assert_eq!(d * (r.rel_k3.unwrap() - r.k3.unwrap()), 6 * k);
            }
            MfsDescription::Fano(_) => {}
        }
    }

    #[test]
    fn singular_c2_inverts(desc in arb_description()) {
        if let MfsDescription::CbSingular(m) = &desc {
            let r = invariants_singular(m);
            let c2_back = -r.k3.unwrap() + 3 * r.euler - 72 * r.chi
                + 5 * r.cf_norm.unwrap() / 2;
            prop_assert_eq!(c2_back, m.c2rel());
        }
    }

    #[test]
    fn compare_is_symmetric_and_reflexive(
        a in arb_description(),
        b in arb_description(),
    ) {
        let ra = a.invariants();
        let rb = b.invariants();
        let fwd = compare(&ra, &rb).unwrap();
        let bwd = compare(&rb, &ra).unwrap();
        prop_assert_eq!(fwd.outcome, bwd.outcome);
        let self_cmp = compare(&ra, &ra.clone()).unwrap();
        let exceptional = ra.kind == FibrationKind::Singular && ra.b2 >= 10 && ra.chi == 1;
        if exceptional {
            prop_assert_eq!(self_cmp.outcome, Outcome::UndeterminedFinite);
        } else {
            prop_assert_eq!(self_cmp.outcome, Outcome::Diffeomorphic);
        }
    }

    #[test]
    fn parser_never_panics(text in "\\PC{0,200}") {
        let _ = parse_str(&text);
    }

    #[test]
    fn parser_never_panics_on_near_valid_input(
        keys in proptest::collection::vec("[a-zA-Z0-9_]{1,8}", 0..6),
        vals in proptest::collection::vec("[-0-9\\[\\], \"a-z]{0,20}", 0..6),
    ) {
        let mut text = String::from("[mfs]\n");
        for (k, v) in keys.iter().zip(vals.iter()) {
            text.push_str(&format!("{k} = {v}\n"));
        }
        let _ = parse_str(&text);
    }

    #[test]
    fn format_round_trips(desc in arb_description(), with_name in any::<bool>()) {
        let file = MfsFile {
            name: with_name.then(|| "round trip".to_string()),
            description: desc,
        };
        let text = print(&file);
        let parsed = parse_str(&text).unwrap();
        prop_assert_eq!(parsed, file);
    }

    #[test]
    fn hrr_residue_on_random_models(desc in arb_description()) {
        if let (Some(t), Some(c1)) = (desc.wall_jupp_triple(), mori_class::mfs::c1_coordinates(&desc)) {
            let r = desc.invariants();
            let c1_cubed = t.cubic().evaluate(&c1, &c1, &c1).unwrap();
            prop_assert_eq!(c1_cubed, -r.k3.unwrap());
            prop_assert_eq!(c1_cubed - t.p1_pair(&c1).unwrap(), 48 * r.chi);
        }
    }
}
