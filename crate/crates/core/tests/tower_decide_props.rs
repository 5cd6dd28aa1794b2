use extcore::decide::{brute_force, compute_h0, decide, generate_instance, validate_instance, Answer, GenParams};
use extcore::format;
use extcore::sample;
use extcore::tower::{build_actions, common_theta, enumerate_lifts, verify_ladder};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn params() -> impl Strategy<Value = (GenParams, u64)> {
    (2u64..=16, 1usize..=3, prop::option::of(any::<bool>()), any::<u64>()).prop_map(|(theta, max_rank, hint, seed)| {
        (GenParams { theta, max_rank, hint, ..GenParams::default() }, seed)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn decide_matches_exhaustive_search((p, seed) in params()) {
        let inst = generate_instance(&p, seed).unwrap();
        prop_assert!(validate_instance(&inst).is_clean());
        let fast = decide(&inst).unwrap();
        let slow = brute_force(&inst).unwrap();
        prop_assert_eq!(fast.answer, slow.answer);
        if fast.answer == Answer::Yes {
            prop_assert_eq!(inst.r_map[fast.witness.unwrap()], inst.f);
        }
    }

    #[test]
    fn h0_reps_lie_in_the_coset((p, seed) in params()) {
        let inst = generate_instance(&p, seed).unwrap();
        if let Some(h) = compute_h0(&inst).unwrap() {
            prop_assert_eq!(inst.r_prime.apply(&h.h0).unwrap(), inst.f_prime.clone());
            for rep in &h.reps {
                prop_assert_eq!(inst.r_prime.apply(rep).unwrap(), inst.f_prime.clone());
            }
            // each coordinate ranges over |z| <= Θ/2, capped at the summand order
            let width = 2 * (p.theta / 2) + 1;
            let bound = h.kernel.orders().iter().map(|q| q.to_u64().unwrap().min(width)).product::<u64>();
            prop_assert!(h.reps.len() as u64 <= bound);
        }
    }

    #[test]
    fn instance_files_round_trip((p, seed) in params()) {
        let inst = generate_instance(&p, seed).unwrap();
        let text = format::write_instance(&inst);
        let back = format::parse_instance(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(format::write_instance(&back), text);
    }

    #[test]
    fn random_ladders_verify(seed in any::<u64>(), ell0 in 1u64..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = sample::random_tower(&mut rng, &[2, 3, 4, 8, 9]);
        let ladder = build_actions(&t, ell0).unwrap();
        let report = verify_ladder(&t, &ladder).unwrap();
        prop_assert!(report.is_clean(), "{:?}", report.violations);
        for (i, theta) in ladder.thetas().iter().enumerate() {
            prop_assert_eq!(common_theta(&ladder) % theta, BigInt::from(0), "stage {}", i);
        }
        let back = format::parse_tower(&format::write_tower(&t)).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn lifts_project_back(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = sample::random_tower(&mut rng, &[2, 3, 4]);
        if t.top() > 0 {
            let h: Vec<usize> = (0..2).map(|i| i % t.carrier_size(0)).collect();
            let lifts = enumerate_lifts(&t, &h, 1).unwrap();
            prop_assert_eq!(lifts.len(), (t.layer(1).q() as usize).pow(2));
            for l in lifts {
                let down: Vec<usize> = l.iter().map(|&x| t.parent(1, x)).collect();
                prop_assert_eq!(&down, &h);
            }
        }
    }
}
