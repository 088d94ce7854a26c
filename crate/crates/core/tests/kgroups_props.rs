use num_rational::BigRational;
use proptest::prelude::*;
use qdp4_core::hyperoct::SignedPerm;
use qdp4_core::kgroups::{
    closed_form_rank, euler_x, g_invariant_rank, kernel_rank, orbit_self_pairing,
    twist_by_canonical, K0ClassX, SignedAction, Space,
};
use qdp4_core::pencil::CycleSignature;
use qdp4_core::picard::PicClass;

fn class() -> impl Strategy<Value = K0ClassX> {
    (-4i64..5, prop::array::uniform6(-3i64..4), -6i64..7)
        .prop_map(|(r, c1, s2)| K0ClassX::new(r, PicClass(c1), s2))
}

// signature on `n` points: a composition of n with arbitrary signs
fn signature(n: usize) -> impl Strategy<Value = CycleSignature> {
    prop::collection::vec((1usize..=n, prop::bool::ANY), 1..=n).prop_map(move |parts| {
        let mut left = n;
        let mut cycles = Vec::new();
        for (m, s) in parts {
            if left == 0 {
                break;
            }
            let m = m.min(left);
            left -= m;
            cycles.push((m, if s { 1 } else { -1 }));
        }
        if left > 0 {
            cycles.push((left, 1));
        }
        CycleSignature::new(cycles).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn serre_duality_on_classes(u in class(), v in class()) {
        prop_assert_eq!(euler_x(&u, &v), euler_x(&v, &twist_by_canonical(&u)));
    }

    #[test]
    fn euler_form_is_bilinear(u in class(), v in class(), w in class()) {
        let sum = K0ClassX::from_coords(&std::array::from_fn(|i| u.coords()[i] + v.coords()[i]));
        prop_assert_eq!(euler_x(&sum, &w), euler_x(&u, &w) + euler_x(&v, &w));
        prop_assert_eq!(euler_x(&u.neg(), &w), -euler_x(&u, &w));
    }

    #[test]
    fn weighted_line_ranks((n, sig) in (1usize..9).prop_flat_map(|n| (Just(n), signature(n)))) {
        prop_assert_eq!(g_invariant_rank(&sig, Space::Wpl(n)).unwrap(), 2 + sig.plus_cycles());
        prop_assert_eq!(g_invariant_rank(&sig, Space::Torsion(n)).unwrap(), 1 + sig.plus_cycles());
    }

    #[test]
    fn signature_ranks(sig in signature(5)) {
        for space in [Space::Picard, Space::Wpl(5), Space::SurfaceK0, Space::Atom, Space::Torsion(5)] {
            prop_assert_eq!(g_invariant_rank(&sig, space).unwrap(), closed_form_rank(&sig, space));
        }
        prop_assert_eq!(
            g_invariant_rank(&sig, Space::Wpl(5)).unwrap(),
            g_invariant_rank(&sig, Space::Picard).unwrap() + 1
        );
    }

    #[test]
    fn ranks_depend_only_on_the_class(idx in 0usize..3840, space_ix in 0usize..5) {
        let g = SignedPerm::from_index(idx);
        let space = [Space::Picard, Space::Wpl(5), Space::SurfaceK0, Space::Atom, Space::Torsion(5)][space_ix];
        prop_assert_eq!(
            kernel_rank(&SignedAction::from_signed_perm(&g), space).unwrap(),
            closed_form_rank(&g.cycle_signature(), space)
        );
    }

    #[test]
    fn orbit_sums_pair_positively(n in 1usize..9, mask in 1u32..256) {
        let orbit: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        prop_assume!(!orbit.is_empty());
        prop_assert_eq!(
            orbit_self_pairing(n, &orbit).unwrap(),
            BigRational::from_integer(orbit.len().into())
        );
    }
}
