mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use subnorm::loadbal::{brute_force_assign, greedy_assign, symmetric_reduction, LoadBalError, LoadBalInstance};
use subnorm::norms::Norm;

fn inner(kind: usize, n: usize) -> Norm<f64> {
    match kind % 4 {
        0 => Norm::l1(n),
        1 => Norm::l2(n),
        2 => Norm::top_k(n, 2.min(n)).unwrap(),
        _ => Norm::linf(n),
    }
}

fn instance(m: usize, n: usize, kinds: &[usize], seed: u64) -> LoadBalInstance<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = common::random_times(m, n, &mut rng);
    LoadBalInstance::new(p, (0..m).map(|i| inner(kinds[i % kinds.len()], n)).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn brute_force_matches_depth_first_enumeration(m in 1usize..=3, n in 1usize..=6, kinds in prop::collection::vec(0usize..4, 3), seed in any::<u64>()) {
        let inst = instance(m, n, &kinds, seed);
        let opt = brute_force_assign(&inst).unwrap();
        prop_assert!(opt.is_consistent(&inst));
        let reference = common::brute_force_loadbal(&inst);
        prop_assert!((opt.total_cost - reference).abs() <= 1e-12 * reference.max(1.0));
    }

    #[test]
    fn greedy_is_consistent_and_never_beats_opt(m in 1usize..=3, n in 1usize..=6, kinds in prop::collection::vec(0usize..4, 3), seed in any::<u64>()) {
        let inst = instance(m, n, &kinds, seed);
        let g = greedy_assign(&inst, None).unwrap();
        prop_assert!(g.is_consistent(&inst));
        let opt = brute_force_assign(&inst).unwrap();
        prop_assert!(g.total_cost >= opt.total_cost - 1e-12);
    }

    #[test]
    fn l1_greedy_is_optimal(m in 1usize..=3, n in 1usize..=6, seed in any::<u64>()) {
        // with additive loads each job independently takes its cheapest machine
        let inst = instance(m, n, &[0], seed);
        let g = greedy_assign(&inst, None).unwrap();
        let expect: f64 = (0..n).map(|j| (0..m).map(|i| inst.times()[i][j]).fold(f64::INFINITY, f64::min)).sum();
        prop_assert!((g.total_cost - expect).abs() <= 1e-12 * expect.max(1.0));
    }

    #[test]
    fn any_job_order_is_consistent(n in 2usize..=6, seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let inst = instance(2, n, &[1, 2], seed);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(greedy_assign(&inst, Some(&order)).unwrap().is_consistent(&inst));
    }
}

#[test]
fn reduction_factors_bound_the_distortion() {
    for seed in 0..10 {
        let inst = instance(3, 5, &[1, 2, 3], seed);
        let (reduced, factors) = symmetric_reduction(&inst, seed).unwrap();
        assert_eq!(factors.len(), 3);
        let g = greedy_assign(&inst, None).unwrap();
        let r = reduced.evaluate(&g.sigma).unwrap();
        for ((&reduced_load, &load), &factor) in r.loads.iter().zip(&g.loads).zip(&factors) {
            assert!(reduced_load >= load * (1.0 - 1e-9));
            assert!(reduced_load <= factor * load * (1.0 + 1e-9) + 1e-12);
        }
    }
}

#[test]
fn rejects_bad_inputs() {
    assert!(matches!(
        LoadBalInstance::new(vec![vec![1.0, -1.0]], vec![Norm::l1(2)]),
        Err(LoadBalError::InvalidInstance(_))
    ));
    assert!(LoadBalInstance::new(vec![vec![1.0, 1.0]], vec![Norm::l1(3)]).is_err());
    let inst = instance(2, 3, &[0], 1);
    assert!(greedy_assign(&inst, Some(&[0, 0, 1])).is_err());
    assert!(inst.evaluate(&[0, 2, 1]).is_err());
    let big = instance(3, 13, &[0], 1);
    assert!(matches!(brute_force_assign(&big), Err(LoadBalError::Budget(_))));
}
