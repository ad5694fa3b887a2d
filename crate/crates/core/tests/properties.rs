//! Property-based invariants across modules.

use magiclab::clifford::generators;
use magiclab::magic::{magic_bound, stabilizer_entropy};
use magiclab::search::{objective, objective_gap, target};
use magiclab::sic::{
    catalog_fiducial, frame_potential, k_alpha, k_alpha_bound, orbit_identity_sides, verify_sic, wh_orbit,
    FiducialRecord, FiducialSource, StateSet,
};
use magiclab::states::{fidelity, haar_random_state, tensor, PureState};
use magiclab::wh_group::{Factorization, WhGroup};
use proptest::prelude::*;

fn random_set(d: usize, seed: u64) -> StateSet {
    let states = (0..(d * d) as u64)
        .map(|i| haar_random_state(d, seed.wrapping_mul(1_000_003).wrapping_add(i)).unwrap())
        .collect();
    StateSet::new(states).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tensor_is_associative(da in 2usize..4, db in 2usize..4, dc in 2usize..4, seed in any::<u64>()) {
        let a = haar_random_state(da, seed).unwrap();
        let b = haar_random_state(db, seed ^ 1).unwrap();
        let c = haar_random_state(dc, seed ^ 2).unwrap();
        let left = tensor(&tensor(&a, &b), &c);
        let right = tensor(&a, &tensor(&b, &c));
        for (x, y) in left.amplitudes().iter().zip(right.amplitudes()) {
            prop_assert!((x - y).norm() < 1e-15);
        }
        prop_assert!((left.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn canonical_phase_is_idempotent(d in 2usize..8, seed in any::<u64>()) {
        let psi = haar_random_state(d, seed).unwrap();
        let c = psi.canonical_phase();
        prop_assert!((fidelity(&psi, &c).unwrap() - 1.0).abs() < 1e-12);
        let again = c.canonical_phase();
        prop_assert_eq!(again.amplitudes(), c.amplitudes());
    }

    #[test]
    fn entropy_lies_below_bound(d in 2usize..7, seed in any::<u64>(), alpha in 2.0f64..5.0) {
        let g = WhGroup::single(d).unwrap();
        let psi = haar_random_state(d, seed).unwrap();
        let r = stabilizer_entropy(&g, &psi, alpha).unwrap();
        prop_assert!(r.value >= 0.0);
        prop_assert!(r.value <= magic_bound(d, alpha).unwrap() + 1e-9);
    }

    #[test]
    fn renyi_entropies_decrease_with_order(d in 2usize..6, seed in any::<u64>(), a in 0.5f64..4.0, b in 0.5f64..4.0) {
        let g = WhGroup::single(d).unwrap();
        let psi = haar_random_state(d, seed).unwrap();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let m_lo = stabilizer_entropy(&g, &psi, lo).unwrap().value;
        let m_hi = stabilizer_entropy(&g, &psi, hi).unwrap().value;
        prop_assert!(m_hi <= m_lo + 1e-12);
    }

    #[test]
    fn k_alpha_respects_lower_bound(d in 2usize..5, seed in any::<u64>(), alpha in 1.0f64..3.0) {
        let set = random_set(d, seed);
        prop_assert!(k_alpha(&set, alpha).unwrap() >= k_alpha_bound(d, alpha).unwrap() - 1e-9);
    }

    #[test]
    fn jensen_chain(d in 2usize..5, seed in any::<u64>(), alpha in 1.0f64..3.0) {
        let set = random_set(d, seed);
        let pairs = (d.pow(4) - d.pow(2)) as f64;
        let k1 = k_alpha(&set, 1.0).unwrap();
        let ka = k_alpha(&set, alpha).unwrap();
        prop_assert!(ka >= pairs * (k1 / pairs).powf(alpha) - 1e-9 * ka.max(1.0));
    }

    #[test]
    fn frame_potential_minus_diagonal_is_k(d in 2usize..5, seed in any::<u64>(), t in 2u32..7) {
        let set = random_set(d, seed);
        let alpha = t as f64 / 2.0;
        let f = frame_potential(&set, t).unwrap();
        let k = k_alpha(&set, alpha).unwrap();
        prop_assert!(close(f - set.len() as f64, k, 1e-12));
    }

    #[test]
    fn orbit_identity_holds(d in 2usize..6, seed in any::<u64>(), alpha in 1.0f64..3.0) {
        let g = WhGroup::single(d).unwrap();
        let phi = haar_random_state(d, seed).unwrap();
        let (lhs, rhs) = orbit_identity_sides(&g, &phi, alpha).unwrap();
        prop_assert!(close(lhs, rhs, 1e-9), "lhs {lhs} rhs {rhs}");
    }

    #[test]
    fn entropy_is_additive_on_products(seed in any::<u64>(), alpha in prop_oneof![Just(1.0), 0.5f64..4.0]) {
        let a = haar_random_state(2, seed).unwrap();
        let b = haar_random_state(3, seed ^ 0xabcdef).unwrap();
        let joint = WhGroup::from_factors(&[2, 3]).unwrap();
        let m = stabilizer_entropy(&joint, &tensor(&a, &b), alpha).unwrap().value;
        let ma = stabilizer_entropy(&WhGroup::single(2).unwrap(), &a, alpha).unwrap().value;
        let mb = stabilizer_entropy(&WhGroup::single(3).unwrap(), &b, alpha).unwrap().value;
        prop_assert!((m - ma - mb).abs() < 1e-10);
    }

    #[test]
    fn objective_never_below_target(factors in prop_oneof![
        Just(vec![2]), Just(vec![3]), Just(vec![4]), Just(vec![5]), Just(vec![2, 2]), Just(vec![2, 3]), Just(vec![2, 2, 2])
    ], seed in any::<u64>()) {
        let g = WhGroup::from_factors(&factors).unwrap();
        let phi = haar_random_state(g.dim(), seed).unwrap();
        let f = objective(&g, &phi).unwrap();
        prop_assert!(f >= target(g.dim()) - 1e-9);
        prop_assert!((objective_gap(&g, &phi).unwrap() - (f - target(g.dim()))).abs() < 1e-12);
    }

    #[test]
    fn clifford_words_preserve_fiducials(d in 2usize..4, word in prop::collection::vec(any::<prop::sample::Index>(), 1..6)) {
        let g = WhGroup::single(d).unwrap();
        let gens = generators(&g);
        let mut phi = catalog_fiducial(d).unwrap().vector;
        for i in &word {
            phi = gens[i.index(gens.len())].apply(&phi).unwrap();
        }
        let report = verify_sic(&wh_orbit(&g, &phi).unwrap(), 1e-9).unwrap();
        prop_assert!(report.is_sic, "residual {}", report.max_residual);
    }

    #[test]
    fn record_round_trip_is_lossless(factors in prop_oneof![Just(vec![2]), Just(vec![5]), Just(vec![2, 3])], seed in any::<u64>()) {
        let fact = Factorization::new(factors).unwrap();
        let psi = haar_random_state(fact.dim(), seed).unwrap();
        let record = FiducialRecord::new(fact, psi, FiducialSource::User).unwrap();
        let back = FiducialRecord::from_json_line(&record.to_json_line().unwrap()).unwrap();
        prop_assert!(back.trusted);
        prop_assert_eq!(back.vector.amplitudes(), record.vector.amplitudes());
        prop_assert_eq!(back.sic_residual, record.sic_residual);
    }
}

#[test]
fn composite_and_single_groups_differ_in_d4() {
    // the same vector has different characteristic distributions under W(4)
    // and W(2)⊗W(2), but both are normalized
    let phi = haar_random_state(4, 11).unwrap();
    let single = stabilizer_entropy(&WhGroup::single(4).unwrap(), &phi, 2.0)
        .unwrap()
        .value;
    let pair = stabilizer_entropy(&WhGroup::from_factors(&[2, 2]).unwrap(), &phi, 2.0)
        .unwrap()
        .value;
    assert!((single - pair).abs() > 1e-6);
}

#[test]
fn duplicate_states_push_k_above_bound() {
    let mut states: Vec<PureState> = random_set(2, 3).states().to_vec();
    states[1] = states[0].clone();
    let set = StateSet::new(states).unwrap();
    assert!(k_alpha(&set, 1.0).unwrap() > k_alpha_bound(2, 1.0).unwrap());
}
