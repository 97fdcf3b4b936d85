//! p-level QAOA over a partition objective: circuit execution, a
//! deterministic ramp-schedule grid calibration, and best-of-samples
//! partition readout.
//!
//! The simulator evaluates the objective at all 2^T points to build the
//! phase operator, so nothing here says anything about quantum speedup.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::criterion::{objective_table, ContingencyTable, Partition, SplitScore};
use crate::error::{Error, Result};
use crate::qsim::{StateVector, MAX_QUBITS};

/// Phase angles γ and mixer angles β, one of each per layer.
#[derive(Debug, Clone, PartialEq)]
pub struct QaoaAngles {
    gammas: Vec<f64>,
    betas: Vec<f64>,
}

impl QaoaAngles {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        if gammas.is_empty() || gammas.len() != betas.len() {
            return Err(Error::Config(format!(
                "need equally many gammas and betas, at least one each (got {} and {})",
                gammas.len(),
                betas.len()
            )));
        }
        if gammas.iter().chain(&betas).any(|x| !x.is_finite()) {
            return Err(Error::Config("angles must be finite".into()));
        }
        Ok(QaoaAngles { gammas, betas })
    }

    pub fn zeros(p: usize) -> Self {
        QaoaAngles {
            gammas: vec![0.0; p.max(1)],
            betas: vec![0.0; p.max(1)],
        }
    }

    pub fn p(&self) -> usize {
        self.gammas.len()
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Calibration {
    Fixed(QaoaAngles),
    /// Search a `resolution × resolution` grid of linear-ramp schedules.
    RampGrid { resolution: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QaoaConfig {
    pub p: usize,
    pub shots: usize,
    pub seed: u64,
    pub calibration: Calibration,
}

impl Default for QaoaConfig {
    fn default() -> Self {
        QaoaConfig {
            p: 5,
            shots: 1024,
            seed: 42,
            calibration: Calibration::RampGrid { resolution: 16 },
        }
    }
}

impl QaoaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.p == 0 {
            return Err(Error::Config("p must be at least 1".into()));
        }
        if self.shots == 0 {
            return Err(Error::Config("shots must be at least 1".into()));
        }
        match &self.calibration {
            Calibration::RampGrid { resolution } if *resolution < 2 => {
                Err(Error::Config("grid resolution must be at least 2".into()))
            }
            Calibration::Fixed(a) if a.p() != self.p => Err(Error::Config(format!(
                "fixed angles have {} layers but p = {}",
                a.p(),
                self.p
            ))),
            _ => Ok(()),
        }
    }
}

fn qubits_for(f: &[f64]) -> Result<usize> {
    if !f.len().is_power_of_two() || f.len() < 2 {
        return Err(Error::LengthMismatch {
            expected: f.len().next_power_of_two().max(2),
            got: f.len(),
        });
    }
    let n = f.len().trailing_zeros() as usize;
    if n > MAX_QUBITS {
        return Err(Error::QubitCap(n));
    }
    Ok(n)
}

/// U_M(β_p) U_P(γ_p) ⋯ U_M(β_1) U_P(γ_1) |+⟩^⊗n.
pub fn run_circuit(f: &[f64], angles: &QaoaAngles) -> Result<StateVector> {
    let mut state = StateVector::uniform(qubits_for(f)?)?;
    for (&gamma, &beta) in angles.gammas.iter().zip(&angles.betas) {
        state.apply_phase(f, gamma)?;
        state.apply_mixer(beta);
    }
    Ok(state)
}

/// Linear ramp: γ_k = (k/p)·gamma_max, β_k = (1 − k/p)·beta_max for k = 1..p.
pub fn ramp_angles(gamma_max: f64, beta_max: f64, p: usize) -> QaoaAngles {
    let p = p.max(1);
    let frac = |k: usize| k as f64 / p as f64;
    QaoaAngles {
        gammas: (1..=p).map(|k| frac(k) * gamma_max).collect(),
        betas: (1..=p).map(|k| (1.0 - frac(k)) * beta_max).collect(),
    }
}

/// `resolution` points in (0, max]: the first half a step above zero, the last at `max`.
pub fn grid_points(max: f64, resolution: usize) -> Vec<f64> {
    let step = max / (resolution as f64 - 0.5);
    (0..resolution)
        .map(|i| if i + 1 == resolution { max } else { (i as f64 + 0.5) * step })
        .collect()
}

/// ⟨H_P⟩ after the ramp circuit for every (gamma_max, beta_max) grid point;
/// rows follow gamma, columns follow beta.
pub fn expectation_landscape(f: &[f64], p: usize, resolution: usize) -> Result<Vec<Vec<f64>>> {
    let betas = grid_points(FRAC_PI_2, resolution);
    grid_points(PI, resolution)
        .into_iter()
        .map(|g| {
            betas
                .iter()
                .map(|&b| run_circuit(f, &ramp_angles(g, b, p))?.expectation(f))
                .collect()
        })
        .collect()
}

/// Picks the ramp schedule that maximizes ⟨H_P⟩ over the grid. Grid points
/// within rounding noise of the incumbent count as ties, and ties keep the
/// smallest (gamma_max, beta_max).
pub fn calibrate_angles(f: &[f64], config: &QaoaConfig) -> Result<QaoaAngles> {
    config.validate()?;
    let resolution = match &config.calibration {
        Calibration::Fixed(angles) => return Ok(angles.clone()),
        Calibration::RampGrid { resolution } => *resolution,
    };
    let landscape = expectation_landscape(f, config.p, resolution)?;
    let scale = f.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let tol = 1e-12 * scale;
    let gammas = grid_points(PI, resolution);
    let betas = grid_points(FRAC_PI_2, resolution);
    let mut best = (f64::NEG_INFINITY, 0, 0);
    for (i, row) in landscape.iter().enumerate() {
        for (j, &value) in row.iter().enumerate() {
            if value > best.0 + tol {
                best = (value, i, j);
            }
        }
    }
    Ok(ramp_angles(gammas[best.1], betas[best.2], config.p))
}

/// Runs the circuit on the table's objective, samples `shots` bitstrings and
/// returns the best sampled partition in canonical form. Trivial bitstrings
/// never win; equal scores resolve to the smaller canonical mask.
pub fn qaoa_best_partition(table: &ContingencyTable, angles: &QaoaAngles, shots: usize, seed: u64) -> Result<SplitScore> {
    let t = table.n_values();
    if t < 2 {
        return Err(Error::Config("a partition search needs at least two categories".into()));
    }
    let f = objective_table(table)?;
    let state = run_circuit(&f, angles)?;
    let mut best: Option<(f64, u64)> = None;
    for z in state.sample(shots, seed) {
        let candidate = Partition::new(z as u64, t);
        if candidate.is_trivial() {
            continue;
        }
        let mask = candidate.canonical().mask();
        let value = f[z];
        let better = match best {
            None => true,
            Some((v, m)) => value > v || (value == v && mask < m),
        };
        if better {
            best = Some((value, mask));
        }
    }
    Ok(match best {
        Some((value, mask)) => SplitScore {
            value,
            partition: Some(Partition::new(mask, t)),
        },
        None => SplitScore {
            value: 0.0,
            partition: None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criterion::exhaustive_best_partition;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn table(rows: &[&[u64]]) -> ContingencyTable {
        ContingencyTable::from_counts(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn random_table(rng: &mut ChaCha8Rng, t: usize, m: usize) -> ContingencyTable {
        let rows: Vec<Vec<u64>> = (0..t).map(|_| (0..m).map(|_| rng.random_range(0..=50)).collect()).collect();
        ContingencyTable::from_counts(&rows).unwrap()
    }

    #[test]
    fn zero_angles_leave_uniform_state() {
        let f = [0.0, 0.25, 0.25, 0.0];
        let s = run_circuit(&f, &QaoaAngles::zeros(3)).unwrap();
        assert_eq!(s, StateVector::uniform(2).unwrap());
    }

    #[test]
    fn mixer_alone_keeps_uniform_probabilities() {
        let f = [0.0, 0.1, 0.2, 0.05, 0.0, 0.1, 0.3, 0.0];
        let angles = QaoaAngles::new(vec![0.0], vec![1.234]).unwrap();
        let s = run_circuit(&f, &angles).unwrap();
        assert!(s.probabilities().iter().all(|p| (p - 0.125).abs() < 1e-14));
    }

    #[test]
    fn single_layer_against_dense_product() {
        let f = [0.0, 0.25, 0.25, 0.0];
        let (gamma, beta) = (PI, PI / 4.0);
        let s = run_circuit(&f, &QaoaAngles::new(vec![gamma], vec![beta]).unwrap()).unwrap();

        let (c, sn) = (beta.cos(), beta.sin());
        let rx = [[Complex64::new(c, 0.0), Complex64::new(0.0, -sn)], [Complex64::new(0.0, -sn), Complex64::new(c, 0.0)]];
        // Bit 0 is qubit 0, so index z = 2*b1 + b0 and U_M = Rx ⊗ Rx.
        let mixer = |r: usize, col: usize| rx[r >> 1][col >> 1] * rx[r & 1][col & 1];
        let phased: Vec<Complex64> = f
            .iter()
            .map(|&fz| Complex64::new(0.5, 0.0) * Complex64::new((gamma * fz).cos(), -(gamma * fz).sin()))
            .collect();
        for r in 0..4 {
            let expected: Complex64 = (0..4).map(|col| mixer(r, col) * phased[col]).sum();
            assert!((s.amplitudes()[r] - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn ramp_examples() {
        let a = ramp_angles(2.0, 3.0, 1);
        assert_eq!(a.gammas(), &[2.0]);
        assert_eq!(a.betas(), &[0.0]);
        let a = ramp_angles(1.0, 1.0, 5);
        let close = |x: &[f64], y: &[f64]| x.iter().zip(y).all(|(a, b)| (a - b).abs() < 1e-15);
        assert!(close(a.gammas(), &[0.2, 0.4, 0.6, 0.8, 1.0]));
        assert!(close(a.betas(), &[0.8, 0.6, 0.4, 0.2, 0.0]));
    }

    #[test]
    fn grid_is_open_at_zero_and_closed_at_max() {
        let g = grid_points(PI, 16);
        assert_eq!(g.len(), 16);
        assert!(g[0] > 0.0);
        assert_eq!(*g.last().unwrap(), PI);
        let steps: Vec<f64> = g.windows(2).map(|w| w[1] - w[0]).collect();
        assert!(steps.iter().all(|s| (s - 2.0 * g[0]).abs() < 1e-12));
    }

    #[test]
    fn flat_objective_calibrates_to_first_grid_point() {
        let config = QaoaConfig::default();
        let angles = calibrate_angles(&[0.3; 8], &config).unwrap();
        let expected = ramp_angles(grid_points(PI, 16)[0], grid_points(FRAC_PI_2, 16)[0], 5);
        assert_eq!(angles, expected);
    }

    #[test]
    fn calibration_concentrates_on_unique_maximizer() {
        let t = table(&[&[9, 1], &[1, 7], &[6, 2], &[0, 5]]);
        let f = objective_table(&t).unwrap();
        let best = exhaustive_best_partition(&t);
        let z_star = best.partition.unwrap().mask() as usize;
        let config = QaoaConfig::default();
        let angles = calibrate_angles(&f, &config).unwrap();
        let probs = run_circuit(&f, &angles).unwrap().probabilities();
        // z* and its complement carry the same objective value
        let comp = 0b1111 ^ z_star;
        assert!(probs[z_star] > 1.0 / 16.0, "{}", probs[z_star]);
        assert!(probs[comp] > 1.0 / 16.0);
        assert_eq!(angles, calibrate_angles(&f, &config).unwrap());
    }

    #[test]
    fn two_value_domain_is_forced() {
        let t = table(&[&[3, 1], &[1, 4]]);
        let angles = ramp_angles(1.0, 0.5, 5);
        let s = qaoa_best_partition(&t, &angles, 64, 9).unwrap();
        assert_eq!(s.partition.unwrap().mask(), 0b01);
        assert_eq!(s.value, crate::criterion::twoing_of_partition(&t, 0b01));
    }

    #[test]
    fn pure_table_scores_zero() {
        let t = table(&[&[3, 0], &[4, 0], &[1, 0]]);
        let s = qaoa_best_partition(&t, &ramp_angles(1.0, 0.5, 5), 256, 1).unwrap();
        assert_eq!(s.value, 0.0);
    }

    #[test]
    fn rejects_single_value_domain_and_wide_tables() {
        let angles = ramp_angles(1.0, 0.5, 2);
        assert!(qaoa_best_partition(&table(&[&[3, 1]]), &angles, 16, 0).is_err());
        let wide = ContingencyTable::zeros(MAX_QUBITS + 1, 2);
        assert!(matches!(qaoa_best_partition(&wide, &angles, 16, 0), Err(Error::QubitCap(_))));
    }

    #[test]
    fn random_four_value_tables_match_exhaustive() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let config = QaoaConfig::default();
        for i in 0..20 {
            let t = random_table(&mut rng, 4, 3);
            let f = objective_table(&t).unwrap();
            let angles = calibrate_angles(&f, &config).unwrap();
            let q = qaoa_best_partition(&t, &angles, 4096, i).unwrap();
            assert_eq!(q.value, exhaustive_best_partition(&t).value);
        }
    }

    #[test]
    fn uniform_sampling_recovers_optimum() {
        for t_values in 2..=5usize {
            let mut rng = ChaCha8Rng::seed_from_u64(t_values as u64);
            let shots = 64 << t_values;
            let hits = (0..100)
                .filter(|&trial| {
                    let t = random_table(&mut rng, t_values, 3);
                    let q = qaoa_best_partition(&t, &QaoaAngles::zeros(1), shots, trial).unwrap();
                    q.value == exhaustive_best_partition(&t).value
                })
                .count();
            assert!(hits >= 99, "T={t_values}: {hits}/100");
        }
    }

    #[test]
    fn config_validation() {
        assert!(QaoaConfig::default().validate().is_ok());
        assert!(QaoaConfig { p: 0, ..Default::default() }.validate().is_err());
        assert!(QaoaConfig { shots: 0, ..Default::default() }.validate().is_err());
        let bad_grid = QaoaConfig {
            calibration: Calibration::RampGrid { resolution: 1 },
            ..Default::default()
        };
        assert!(bad_grid.validate().is_err());
        assert!(QaoaAngles::new(vec![1.0], vec![]).is_err());
    }

    fn arb_table() -> impl Strategy<Value = ContingencyTable> {
        (2usize..=5, 2usize..=4).prop_flat_map(|(t, m)| {
            proptest::collection::vec(proptest::collection::vec(0u64..30, m), t)
                .prop_map(|rows| ContingencyTable::from_counts(&rows).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn never_beats_exhaustive(t in arb_table(), shots in 1usize..64, seed in any::<u64>(), g in 0.0f64..3.0, b in 0.0f64..1.5) {
            let angles = ramp_angles(g, b, 3);
            let q = qaoa_best_partition(&t, &angles, shots, seed).unwrap();
            let e = exhaustive_best_partition(&t);
            prop_assert!(q.value <= e.value);

            let f = objective_table(&t).unwrap();
            let z_star = e.partition.unwrap().mask() as usize;
            let sampled = run_circuit(&f, &angles).unwrap().sample(shots, seed);
            let comp = ((1usize << t.n_values()) - 1) ^ z_star;
            if sampled.iter().any(|&z| z == z_star || z == comp) {
                prop_assert_eq!(q.value, e.value);
            }
            prop_assert_eq!(q, qaoa_best_partition(&t, &angles, shots, seed).unwrap());
        }
    }
}
