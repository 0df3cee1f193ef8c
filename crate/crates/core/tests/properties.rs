use bsfiedler::congruence::main_permutation;
use bsfiedler::families::FamilyTag;
use bsfiedler::fiedler::{build_gfpr, GfprSpec, TvConvention};
use bsfiedler::random::{random_gfpr_spec, random_polynomial, random_symmetric};
use bsfiedler::tuples::{csf, heads, satisfies_sip, Csf};
use bsfiedler::{BlockPermutation, IndexTuple, MatrixPolynomial};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn grade_and_h() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=6).prop_flat_map(|k| (Just(k), 0..k))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gfpr_is_block_symmetric((k, h) in grade_and_h(), n in 1usize..=2, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_polynomial(&mut rng, n, k, false, false);
        let spec = random_gfpr_spec(&mut rng, k, h, n, 4);
        prop_assert!(build_gfpr(&p, &spec).unwrap().is_block_symmetric());
    }

    #[test]
    fn symmetric_data_gives_symmetric_pencil((k, h) in grade_and_h(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 2;
        let p = MatrixPolynomial::new((0..=k).map(|_| random_symmetric(&mut rng, n)).collect()).unwrap();
        let s = random_gfpr_spec(&mut rng, k, h, n, 3);
        let z_w = s.t_w.as_slice().iter().map(|_| random_symmetric(&mut rng, n)).collect();
        let z_v = s.t_v.as_slice().iter().map(|_| random_symmetric(&mut rng, n)).collect();
        let spec = GfprSpec::new(k, h, s.t_w, s.t_v, TvConvention::Negative, z_w, z_v).unwrap();
        prop_assert!(build_gfpr(&p, &spec).unwrap().is_symmetric());
    }

    #[test]
    fn congruence_lands_in_parity_family((k, h) in grade_and_h(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_polynomial(&mut rng, 2, k, true, true);
        let spec = random_gfpr_spec(&mut rng, k, h, 2, 4);
        let cert = main_permutation(&p, &spec).unwrap();
        prop_assert!(cert.residual);
        prop_assert_eq!(cert.tag(), FamilyTag::for_gfpr(k, h));
        prop_assert!(cert.wing_param_nonsingular());
    }

    #[test]
    fn csf_is_a_fixed_point(v in prop::collection::vec(0i64..=5, 0..8)) {
        let t = IndexTuple::new(v);
        if satisfies_sip(&t).unwrap() {
            let c = csf(&t).unwrap();
            let again = csf(&c.to_tuple()).unwrap();
            prop_assert_eq!(&again, &c);
            prop_assert_eq!(Csf::from_tuple(c.to_tuple().as_slice()), Some(c.clone()));
            prop_assert_eq!(heads(&t).unwrap(), c.heads());
        }
    }

    #[test]
    fn permutation_round_trip(perm in Just((1..=7usize).collect::<Vec<_>>()).prop_shuffle(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_polynomial(&mut rng, 1, 7, false, false);
        let l = build_gfpr(&p, &GfprSpec::simple(7, 3).unwrap()).unwrap();
        let c = BlockPermutation::new(perm).unwrap();
        let back = l.congruence(&c).unwrap().congruence(&c.inverse()).unwrap();
        prop_assert_eq!(back, l);
    }
}
