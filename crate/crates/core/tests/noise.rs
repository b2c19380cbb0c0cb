use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mfqec::noise::*;

fn single_qubit_locations(n: usize) -> Vec<FaultLocation> {
    (0..n)
        .map(|i| FaultLocation {
            slot: i,
            class: LocationClass::SingleQubit,
            qubits: vec![i % 7],
        })
        .collect()
}

#[test]
fn mean_fault_count_is_expected_value() {
    let locs = single_qubit_locations(50);
    let m = NoiseModel::new(0.01, 0.01, 0.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let draws = 100_000;
    let total: usize = (0..draws)
        .map(|_| {
            sample_config_conditioned(&locs, &m, 0, &mut rng)
                .unwrap()
                .len()
        })
        .sum();
    let mean = total as f64 / draws as f64;
    let sd = (50.0 * 0.01 * 0.99 / draws as f64).sqrt();
    assert!((mean - 0.5).abs() < 3.0 * sd, "mean {mean}");
}

#[test]
fn tail_matches_binomial_closed_form() {
    let n = 150;
    let q: f64 = 0.004;
    let locs = single_qubit_locations(n);
    let m = NoiseModel::new(0.01, q, 0.0).unwrap();
    let p0 = (1.0 - q).powi(n as i32);
    let p1 = n as f64 * q * (1.0 - q).powi(n as i32 - 1);
    let want = 1.0 - p0 - p1;
    let got = tail_probability(&locs, &m, 2);
    assert!((got / want - 1.0).abs() < 1e-10, "{got} vs {want}");
    assert!((tail_probability(&locs, &m, 0) - 1.0).abs() < 1e-15);
    assert!((tail_probability(&locs, &m, 1) - (1.0 - p0)).abs() < 1e-14);
}

#[test]
fn conditioned_samples_respect_k_min_and_mean() {
    let n = 40;
    let q: f64 = 0.01;
    let locs = single_qubit_locations(n);
    let m = NoiseModel::new(0.01, q, 0.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let draws = 20_000;
    let mut total = 0usize;
    let mut sq = 0usize;
    for _ in 0..draws {
        let k = sample_config_conditioned(&locs, &m, 2, &mut rng)
            .unwrap()
            .len();
        assert!(k >= 2);
        total += k;
        sq += k * k;
    }
    // E[K | K ≥ 2] = (E[K] - P(K=1)) / P(K ≥ 2)
    let p1 = n as f64 * q * (1.0 - q).powi(n as i32 - 1);
    let tail = tail_probability(&locs, &m, 2);
    let want = (n as f64 * q - p1) / tail;
    let mean = total as f64 / draws as f64;
    let var = sq as f64 / draws as f64 - mean * mean;
    assert!(
        (mean - want).abs() < 4.0 * (var / draws as f64).sqrt(),
        "{mean} vs {want}"
    );
}

#[test]
fn infeasible_conditioning_is_an_error() {
    let locs = single_qubit_locations(3);
    let m = NoiseModel::new(0.01, 0.01, 0.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    assert!(sample_config_conditioned(&locs, &m, 4, &mut rng).is_err());
}

#[test]
fn perfect_bias_only_produces_z_faults() {
    let m = NoiseModel::biased(0.2).unwrap();
    for arity in 2..=4 {
        let support = fault_support(LocationClass::MultiQubit(arity), &m);
        assert_eq!(support.len(), (1 << arity) - 1);
        assert!(support
            .iter()
            .all(|(p, _)| p.is_z_type() && !p.is_identity()));
    }
    let m = NoiseModel::new(0.2, 0.0, 1.0).unwrap();
    let support = fault_support(LocationClass::MultiQubit(2), &m);
    // only Paulis with an X or Y component
    assert_eq!(support.len(), 12);
    assert!(support.iter().all(|(p, _)| !p.is_z_type()));
}

#[test]
fn initialization_faults_are_bit_flips() {
    let m = NoiseModel::new(0.01, 0.01, 0.0).unwrap();
    let support = fault_support(LocationClass::Initialization, &m);
    assert_eq!(support.len(), 1);
    assert_eq!(support[0].0.letter(0), 'X');
    assert!((support[0].1 - 1.0).abs() < 1e-15);
}
