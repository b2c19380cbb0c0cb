//! Pauli noise channels and fault-configuration sampling.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Noise parameters and enabled channel classes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Fault probability of every multi-qubit gate.
    pub p: f64,
    /// Fault probability of single-qubit gates and initializations.
    pub p1: f64,
    /// Proportion of non-Z faults on multi-qubit gates.
    pub epsilon: f64,
    pub multi_qubit: bool,
    pub single_qubit: bool,
    pub initialization: bool,
    /// A mid-circuit reset is an initialization location.
    pub reset_is_init: bool,
}

impl NoiseModel {
    /// Perfectly biased noise on multi-qubit gates only.
    pub fn biased(p: f64) -> Result<NoiseModel> {
        NoiseModel::new(p, 0.0, 0.0)
    }

    /// General model; single-qubit and initialization channels are enabled
    /// whenever `p1 > 0`.
    pub fn new(p: f64, p1: f64, epsilon: f64) -> Result<NoiseModel> {
        let m = NoiseModel {
            p,
            p1,
            epsilon,
            multi_qubit: true,
            single_qubit: p1 > 0.0,
            initialization: p1 > 0.0,
            reset_is_init: p1 > 0.0,
        };
        m.validate()?;
        Ok(m)
    }

    /// `p1 = α·p`.
    pub fn with_alpha(p: f64, alpha: f64, epsilon: f64) -> Result<NoiseModel> {
        if !(alpha >= 0.0) {
            return Err(Error::InvalidNoise(format!("alpha = {alpha}")));
        }
        NoiseModel::new(p, alpha * p, epsilon)
    }

    /// Same channel structure, different strengths.
    pub fn rescaled(&self, p: f64, p1: f64) -> Result<NoiseModel> {
        let m = NoiseModel { p, p1, ..*self };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let in_unit = |x: f64| (0.0..1.0).contains(&x);
        if !in_unit(self.p) {
            return Err(Error::InvalidNoise(format!(
                "p = {} outside [0, 1)",
                self.p
            )));
        }
        if !in_unit(self.p1) {
            return Err(Error::InvalidNoise(format!(
                "p1 = {} outside [0, 1)",
                self.p1
            )));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::InvalidNoise(format!(
                "epsilon = {} outside [0, 1]",
                self.epsilon
            )));
        }
        Ok(())
    }

    /// `p1 / p`, if defined.
    pub fn alpha(&self) -> Option<f64> {
        (self.p > 0.0).then(|| self.p1 / self.p)
    }

    /// Probability that a location of `class` is faulty.
    pub fn location_probability(&self, class: LocationClass) -> f64 {
        match class {
            LocationClass::MultiQubit(_) if self.multi_qubit => self.p,
            LocationClass::SingleQubit if self.single_qubit => self.p1,
            LocationClass::Initialization if self.initialization => self.p1,
            _ => 0.0,
        }
    }
}

/// Pauli string over the (at most 8) qubits of one location.
///
/// Bit `j` of `xs`/`zs` refers to the `j`-th qubit of the location;
/// `X` and `Z` on the same position make a `Y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    pub xs: u8,
    pub zs: u8,
}

impl PauliString {
    pub fn is_identity(&self) -> bool {
        self.xs == 0 && self.zs == 0
    }

    pub fn is_z_type(&self) -> bool {
        self.xs == 0 && self.zs != 0
    }

    /// Pauli letter at position `j`.
    pub fn letter(&self, j: usize) -> char {
        match ((self.xs >> j) & 1, (self.zs >> j) & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (0, 1) => 'Z',
            _ => 'Y',
        }
    }

    pub fn to_string_len(&self, len: usize) -> String {
        (0..len).map(|j| self.letter(j)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LocationClass {
    MultiQubit(usize),
    SingleQubit,
    Initialization,
}

/// A position in a circuit where a fault may occur.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultLocation {
    /// Faults at this location act after `slot` operations of the circuit.
    pub slot: usize,
    pub class: LocationClass,
    pub qubits: Vec<usize>,
}

/// Conditional error distribution at a faulty location of `class`.
pub fn fault_support(class: LocationClass, model: &NoiseModel) -> Vec<(PauliString, f64)> {
    match class {
        LocationClass::MultiQubit(l) => {
            let full = 1u16 << l;
            let n_z = (full - 1) as f64;
            let n_other = (full as f64) * (full as f64) - full as f64;
            let eps = model.epsilon;
            let mut out = Vec::new();
            if eps < 1.0 {
                for zs in 1..full {
                    out.push((
                        PauliString {
                            xs: 0,
                            zs: zs as u8,
                        },
                        (1.0 - eps) / n_z,
                    ));
                }
            }
            if eps > 0.0 {
                for xs in 1..full {
                    for zs in 0..full {
                        out.push((
                            PauliString {
                                xs: xs as u8,
                                zs: zs as u8,
                            },
                            eps / n_other,
                        ));
                    }
                }
            }
            out
        }
        LocationClass::SingleQubit => vec![
            (PauliString { xs: 1, zs: 0 }, 1.0 / 3.0),
            (PauliString { xs: 1, zs: 1 }, 1.0 / 3.0),
            (PauliString { xs: 0, zs: 1 }, 1.0 / 3.0),
        ],
        LocationClass::Initialization => vec![(PauliString { xs: 1, zs: 0 }, 1.0)],
    }
}

/// Concrete faults: `(location index, Pauli)` pairs, sorted by location.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaultConfig {
    pub assignments: Vec<(usize, PauliString)>,
    /// Probability of exactly this configuration under the model.
    pub weight: f64,
}

impl FaultConfig {
    pub fn empty() -> FaultConfig {
        FaultConfig {
            assignments: Vec::new(),
            weight: 1.0,
        }
    }

    pub fn single(location: usize, pauli: PauliString) -> FaultConfig {
        FaultConfig {
            assignments: vec![(location, pauli)],
            weight: 1.0,
        }
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }
}

fn fault_probabilities(locations: &[FaultLocation], model: &NoiseModel) -> Vec<f64> {
    locations
        .iter()
        .map(|l| model.location_probability(l.class))
        .collect()
}

/// Poisson-binomial tail `P(K ≥ k_min)` for independent fault probabilities.
pub fn tail_from_probabilities(qs: &[f64], k_min: usize) -> f64 {
    if k_min == 0 {
        return 1.0;
    }
    // dist[k] = P(K = k) for k < k_min
    let mut dist = vec![0.0f64; k_min];
    dist[0] = 1.0;
    for &q in qs {
        for k in (0..k_min).rev() {
            let stay = dist[k] * (1.0 - q);
            let come = if k > 0 { dist[k - 1] * q } else { 0.0 };
            dist[k] = stay + come;
        }
    }
    (1.0 - dist.iter().sum::<f64>()).max(0.0)
}

/// `P(at least k_min faulty locations)`.
pub fn tail_probability(locations: &[FaultLocation], model: &NoiseModel, k_min: usize) -> f64 {
    tail_from_probabilities(&fault_probabilities(locations, model), k_min)
}

pub const MIN_CONDITIONING_PROBABILITY: f64 = 1e-15;

/// Draws one configuration conditioned on at least `k_min` faulty locations.
///
/// Fault sets are drawn by rejection over Bernoulli bitmasks; the Paulis are
/// then drawn from [`fault_support`].
pub fn sample_config_conditioned<R: Rng + ?Sized>(
    locations: &[FaultLocation],
    model: &NoiseModel,
    k_min: usize,
    rng: &mut R,
) -> Result<FaultConfig> {
    let qs = fault_probabilities(locations, model);
    let tail = tail_from_probabilities(&qs, k_min);
    if tail < MIN_CONDITIONING_PROBABILITY {
        return Err(Error::InfeasibleConditioning {
            k_min,
            probability: tail,
        });
    }
    let mut faulty: Vec<usize> = Vec::new();
    loop {
        faulty.clear();
        for (i, &q) in qs.iter().enumerate() {
            if q > 0.0 && rng.gen::<f64>() < q {
                faulty.push(i);
            }
        }
        if faulty.len() >= k_min {
            break;
        }
    }
    let mut weight = 1.0;
    let mut next = faulty.iter().peekable();
    for (i, &q) in qs.iter().enumerate() {
        if next.peek() == Some(&&i) {
            next.next();
            weight *= q;
        } else {
            weight *= 1.0 - q;
        }
    }
    let mut assignments = Vec::with_capacity(faulty.len());
    for &i in &faulty {
        let support = fault_support(locations[i].class, model);
        let (pauli, prob) = draw(&support, rng);
        weight *= prob;
        assignments.push((i, pauli));
    }
    Ok(FaultConfig {
        assignments,
        weight,
    })
}

fn draw<R: Rng + ?Sized>(support: &[(PauliString, f64)], rng: &mut R) -> (PauliString, f64) {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for &(p, w) in support {
        acc += w;
        if u < acc {
            return (p, w);
        }
    }
    *support.last().expect("non-empty support")
}

/// Every configuration with between `k_min` and `k_max` faults, with exact
/// probabilities. Exponential; intended for toy models.
pub fn enumerate_configs(
    locations: &[FaultLocation],
    model: &NoiseModel,
    k_min: usize,
    k_max: usize,
) -> Vec<FaultConfig> {
    let qs = fault_probabilities(locations, model);
    let n = locations.len();
    let mut out = Vec::new();
    assert!(n < 24, "enumeration is limited to small models");
    for mask in 0u32..(1u32 << n) {
        let k = mask.count_ones() as usize;
        if k < k_min || k > k_max {
            continue;
        }
        let mut base = 1.0;
        for (i, &q) in qs.iter().enumerate() {
            base *= if mask & (1 << i) != 0 { q } else { 1.0 - q };
        }
        if base == 0.0 {
            continue;
        }
        let faulty: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let supports: Vec<_> = faulty
            .iter()
            .map(|&i| fault_support(locations[i].class, model))
            .collect();
        let mut idx = vec![0usize; faulty.len()];
        loop {
            let mut weight = base;
            let mut assignments = Vec::with_capacity(faulty.len());
            for (j, &i) in faulty.iter().enumerate() {
                let (p, w) = supports[j][idx[j]];
                weight *= w;
                assignments.push((i, p));
            }
            out.push(FaultConfig {
                assignments,
                weight,
            });
            let mut j = 0;
            loop {
                if j == idx.len() {
                    break;
                }
                idx[j] += 1;
                if idx[j] < supports[j].len() {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
            if j == idx.len() {
                break;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn two_qubit(n: usize) -> Vec<FaultLocation> {
        (0..n)
            .map(|i| FaultLocation {
                slot: i + 1,
                class: LocationClass::MultiQubit(2),
                qubits: vec![0, 1],
            })
            .collect()
    }

    #[test]
    fn support_examples() {
        let m = NoiseModel::biased(0.01).unwrap();
        let s = fault_support(LocationClass::MultiQubit(2), &m);
        assert_eq!(s.len(), 3);
        for (p, w) in &s {
            assert!(p.is_z_type());
            assert!((w - 1.0 / 3.0).abs() < 1e-15);
        }
        let s = fault_support(LocationClass::MultiQubit(4), &m);
        assert_eq!(s.len(), 15);
        assert!(s.iter().all(|(_, w)| (w - 1.0 / 15.0).abs() < 1e-15));

        let m = NoiseModel::new(0.01, 0.0, 0.1).unwrap();
        let s = fault_support(LocationClass::MultiQubit(2), &m);
        assert_eq!(s.len(), 15);
        for (p, w) in &s {
            let expected = if p.is_z_type() { 0.9 / 3.0 } else { 0.1 / 12.0 };
            assert!((w - expected).abs() < 1e-15);
        }
        let s = fault_support(LocationClass::Initialization, &m);
        assert_eq!(s, vec![(PauliString { xs: 1, zs: 0 }, 1.0)]);
    }

    #[test]
    fn supports_sum_to_one() {
        for eps in [0.0, 0.3, 1.0] {
            let m = NoiseModel::new(0.01, 0.01, eps).unwrap();
            for class in [
                LocationClass::MultiQubit(2),
                LocationClass::MultiQubit(3),
                LocationClass::MultiQubit(4),
                LocationClass::SingleQubit,
                LocationClass::Initialization,
            ] {
                let total: f64 = fault_support(class, &m).iter().map(|(_, w)| w).sum();
                assert!((total - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn invalid_parameters() {
        assert!(NoiseModel::new(1.0, 0.0, 0.0).is_err());
        assert!(NoiseModel::new(0.1, -0.1, 0.0).is_err());
        assert!(NoiseModel::new(0.1, 0.0, 1.5).is_err());
    }

    #[test]
    fn tail_examples() {
        assert_eq!(tail_from_probabilities(&[0.3, 0.2], 0), 1.0);
        assert!((tail_from_probabilities(&[0.5, 0.5], 2) - 0.25).abs() < 1e-15);
        let q: f64 = 0.001;
        let oracle = 1.0 - (1.0 - q).powi(150) - 150.0 * q * (1.0 - q).powi(149);
        let got = tail_from_probabilities(&vec![q; 150], 2);
        assert!((got - oracle).abs() < 1e-12 * oracle.max(1e-3));
    }

    #[test]
    fn noiseless_sampling() {
        let m = NoiseModel::biased(0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = sample_config_conditioned(&two_qubit(5), &m, 0, &mut rng).unwrap();
        assert!(c.is_empty());
        assert_eq!(c.weight, 1.0);
        assert!(matches!(
            sample_config_conditioned(&two_qubit(5), &m, 1, &mut rng),
            Err(Error::InfeasibleConditioning { .. })
        ));
    }

    #[test]
    fn conditioning_contract() {
        let m = NoiseModel::biased(0.05).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let c = sample_config_conditioned(&two_qubit(20), &m, 2, &mut rng).unwrap();
            assert!(c.len() >= 2);
        }
    }

    #[test]
    fn enumeration_sums_to_tail() {
        let m = NoiseModel::new(0.2, 0.0, 0.25).unwrap();
        let locs = two_qubit(3);
        let all: f64 = enumerate_configs(&locs, &m, 0, 3)
            .iter()
            .map(|c| c.weight)
            .sum();
        assert!((all - 1.0).abs() < 1e-12);
        let tail: f64 = enumerate_configs(&locs, &m, 2, 3)
            .iter()
            .map(|c| c.weight)
            .sum();
        assert!((tail - tail_probability(&locs, &m, 2)).abs() < 1e-12);
    }
}
