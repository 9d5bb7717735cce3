use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use pointdec::beta::{beta_elimination_order, build_beta_pd, verify_beta_order};
use pointdec::cover::build_spd_from_order;
use pointdec::csp::{brute_force_opt, format_rational, parse_rational, MaxCspInstance};
use pointdec::decomposition::{width_of_bags, PointDecomposition, SimplifiedPointDecomposition};
use pointdec::exec::Exec;
use pointdec::generate::{self, rng};
use pointdec::hypergraph::Hypergraph;
use pointdec::mim::{flatten, BranchDecomposition};
use pointdec::solver::{solve, SolveOptions};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rationals_round_trip(p in -1000i64..1000, q in 1i64..1000) {
        let r = BigRational::new(BigInt::from(p), BigInt::from(q));
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }

    #[test]
    fn hypergraph_and_branch_json_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let h = generate::random_hypergraph(&mut r, 6, 5);
        let again = Hypergraph::from_json(&h.to_json()).unwrap();
        prop_assert_eq!(again.to_json(), h.to_json());
        let bd = generate::random_branch(&mut r, &h).unwrap();
        let bd2 = BranchDecomposition::from_json(&h, &bd.to_json(&h)).unwrap();
        prop_assert_eq!(bd2.to_json(&h), bd.to_json(&h));
    }

    #[test]
    fn decomposition_json_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let h = generate::random_hypergraph(&mut r, 5, 4);
        let spd = build_spd_from_order(&h, &generate::random_order(&mut r, &h)).unwrap();
        let back = SimplifiedPointDecomposition::from_json(&h, &spd.to_json(&h)).unwrap();
        prop_assert_eq!(back.to_json(&h), spd.to_json(&h));
        let pd = flatten(&spd, &h, width_of_bags(&h, &spd.bags).unwrap(), Exec::Sequential).unwrap();
        let back = PointDecomposition::from_json(&h, &pd.to_json(&h)).unwrap();
        prop_assert_eq!(back.to_json(&h), pd.to_json(&h));
    }

    #[test]
    fn instance_json_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let h = generate::random_hypergraph(&mut r, 5, 4);
        let inst = generate::random_instance(&mut r, &h, 3, 8);
        let again = MaxCspInstance::from_json(&inst.to_json()).unwrap();
        prop_assert_eq!(again.to_json(), inst.to_json());
    }

    #[test]
    fn beta_orders_are_verified(seed in any::<u64>()) {
        let h = generate::random_hypergraph(&mut rng(seed), 6, 5);
        if let Some(order) = beta_elimination_order(&h) {
            prop_assert!(verify_beta_order(&h, &order));
        }
    }

    #[test]
    fn strategies_agree_and_witness_attains_opt(seed in any::<u64>()) {
        let mut r = rng(seed);
        let h0 = generate::random_beta_acyclic(&mut r, 6, 5);
        let inst = generate::random_instance(&mut r, &h0, 3, 8);
        let h = inst.hypergraph();
        let pd = build_beta_pd(h, &beta_elimination_order(h).unwrap()).unwrap();
        let seq = SolveOptions { width: Some(1), witness: true, exec: Exec::Sequential };
        let par = SolveOptions { exec: Exec::Parallel, ..seq };
        let a = solve(&inst, &pd, &seq).unwrap();
        let b = solve(&inst, &pd, &par).unwrap();
        prop_assert_eq!(&a, &b);
        let w = a.witness.unwrap();
        prop_assert_eq!(pointdec::csp::partial_value(&inst, &w), a.opt.clone());
        prop_assert_eq!(brute_force_opt(&inst, Exec::Sequential).unwrap().0, a.opt);
    }
}
