use linf_equilateral::gen::{random_polytope, random_spec};
use linf_equilateral::polytope::embed;
use linf_equilateral::*;
use proptest::prelude::*;

fn rat() -> impl Strategy<Value = Rational> {
    (-50i64..50, 1i64..20).prop_map(|(a, b)| Rational::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rational_strings_round_trip(x in rat()) {
        let text = x.to_string();
        prop_assert_eq!(text.parse::<Rational>().unwrap(), x.clone());
        let json = serde_json::to_string(&x).unwrap();
        prop_assert_eq!(serde_json::from_str::<Rational>(&json).unwrap(), x);
    }

    #[test]
    fn polytope_norm_is_cube_norm_of_lift(seed in 0u64..1000, xs in proptest::collection::vec(rat(), 4)) {
        let p = random_polytope(4, 6, seed);
        let section = embed(&p).unwrap();
        let lifted = section.lift(&xs).unwrap();
        let linf = lifted.iter().map(Rational::abs).fold(Rational::zero(), Rational::max);
        prop_assert_eq!(p.norm(&xs), linf);
        prop_assert_eq!(section.project(&lifted).unwrap(), xs);
    }

    #[test]
    fn orthant_split_verifies(seed in 0u64..10_000, k in 1usize..3, extra in 2usize..6) {
        let n = 2 * k + extra;
        let spec = random_spec(k, n, seed);
        let cert = construct_bound2(&spec, 1, &ConstructOptions::sequential()).unwrap();
        prop_assert!(verify_certificate(&cert, Some(&spec)).valid);
        prop_assert!(cert.len() as u64 >= cert.source.guaranteed.unwrap());
    }

    #[test]
    fn bumped_coordinate_is_caught(seed in 0u64..10_000, bump in rat()) {
        prop_assume!(!bump.is_zero());
        let spec = random_spec(1, 6, seed);
        let mut cert = construct_bound3(&spec, 1, &ConstructOptions::sequential()).unwrap();
        let p = (seed % cert.len() as u64) as usize;
        let i = (seed / 7 % 6) as usize;
        cert.points[p][i] += &bump;
        let report = verify_certificate(&cert, Some(&spec));
        prop_assert!(!report.valid);
        prop_assert!(report.failures.iter().all(|f| f.involves(p)));
    }
}
