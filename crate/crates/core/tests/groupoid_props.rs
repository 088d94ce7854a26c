use proptest::prelude::*;
use qdp4_core::groupoidsep::random::random_instance;
use qdp4_core::groupoidsep::{
    build_psi, independence_check, standard_choices, transport_splittings, validate,
    validate_functor, verify_heavy_separability, verify_s2, Groupoid, TableGroupoid,
    DEFAULT_SEARCH_BOUND,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_instances_are_heavily_separable(seed in any::<u64>()) {
        let inst = random_instance(seed).unwrap();
        let (c, d, phi) = (&inst.source, &inst.target, &inst.functor);
        prop_assert!(validate(c).is_ok());
        prop_assert!(validate(d).is_ok());
        prop_assert!(validate_functor(c, d, phi).is_ok());
        let choices = standard_choices(c, d, phi, DEFAULT_SEARCH_BOUND).unwrap();
        let psi = build_psi(c, d, phi, &choices).unwrap();
        prop_assert_eq!(verify_heavy_separability(c, d, phi, &psi), Ok(()));
        prop_assert_eq!(verify_s2(c, d, phi, &psi), Ok(()));
    }

    #[test]
    fn psi_retracts_the_image(seed in any::<u64>()) {
        let inst = random_instance(seed).unwrap();
        let (c, d, phi) = (&inst.source, &inst.target, &inst.functor);
        let psi = build_psi(c, d, phi, &standard_choices(c, d, phi, DEFAULT_SEARCH_BOUND).unwrap()).unwrap();
        for f in 0..c.morphism_count() {
            let (x, y) = (c.source(f), c.target(f));
            prop_assert_eq!(psi.get(x, y, phi.mor(f)), Some(f));
        }
    }

    #[test]
    fn transported_splittings_give_the_same_psi(seed in any::<u64>()) {
        let inst = random_instance(seed).unwrap();
        let (c, d, phi) = (&inst.source, &inst.target, &inst.functor);
        let choices = standard_choices(c, d, phi, DEFAULT_SEARCH_BOUND).unwrap();
        let family = transport_splittings(c, d, phi, &choices).unwrap();
        prop_assert_eq!(independence_check(c, d, phi, &family).unwrap(), Ok(()));
    }

    #[test]
    fn tables_survive_json(seed in any::<u64>()) {
        let inst = random_instance(seed).unwrap();
        let back = TableGroupoid::from_json(&inst.target.to_json()).unwrap();
        prop_assert_eq!(back.composition(), inst.target.composition());
        prop_assert_eq!(back.objects(), inst.target.objects());
    }
}
