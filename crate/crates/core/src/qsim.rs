//! A small statevector simulator covering exactly what the QAOA circuit
//! needs: the uniform superposition, a diagonal phase operator, the
//! transverse-field mixer, expectation values and computational-basis
//! sampling.
//!
//! Basis index `z` encodes qubit `j` in bit `j`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 16;

/// Name of the generator behind [`StateVector::sample`], recorded in run metadata.
pub const RNG_NAME: &str = "chacha8";

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

fn check_qubits(n: usize) -> Result<()> {
    if (1..=MAX_QUBITS).contains(&n) {
        Ok(())
    } else {
        Err(Error::QubitCap(n))
    }
}

impl StateVector {
    /// |+⟩^⊗n: every amplitude equal to 2^(-n/2).
    pub fn uniform(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        let dim = 1usize << n_qubits;
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Ok(StateVector {
            n_qubits,
            amps: vec![a; dim],
        })
    }

    pub fn basis(n_qubits: usize, z: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        let dim = 1usize << n_qubits;
        if z >= dim {
            return Err(Error::Config(format!("basis index {z} out of range for {n_qubits} qubits")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[z] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n_qubits, amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let n_qubits = amps.len().trailing_zeros() as usize;
        if !amps.len().is_power_of_two() {
            return Err(Error::Config(format!("{} amplitudes is not a power of two", amps.len())));
        }
        check_qubits(n_qubits)?;
        Ok(StateVector { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    fn check_len(&self, f: &[f64]) -> Result<()> {
        if f.len() == self.dim() {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                expected: self.dim(),
                got: f.len(),
            })
        }
    }

    /// e^{-iγH_P} with H_P = diag(f).
    pub fn apply_phase(&mut self, f: &[f64], gamma: f64) -> Result<()> {
        self.check_len(f)?;
        for (a, &fz) in self.amps.iter_mut().zip(f) {
            let (s, c) = (gamma * fz).sin_cos();
            *a *= Complex64::new(c, -s);
        }
        Ok(())
    }

    /// e^{-iβΣX_j}, applied as one RX-type rotation per qubit.
    pub fn apply_mixer(&mut self, beta: f64) {
        let (s, c) = beta.sin_cos();
        let minus_i_sin = Complex64::new(0.0, -s);
        for j in 0..self.n_qubits {
            let bit = 1usize << j;
            for z in 0..self.dim() {
                if z & bit != 0 {
                    continue;
                }
                let a = self.amps[z];
                let b = self.amps[z | bit];
                self.amps[z] = a * c + b * minus_i_sin;
                self.amps[z | bit] = b * c + a * minus_i_sin;
            }
        }
    }

    /// ⟨ψ|diag(f)|ψ⟩.
    pub fn expectation(&self, f: &[f64]) -> Result<f64> {
        self.check_len(f)?;
        Ok(self.amps.iter().zip(f).map(|(a, &fz)| a.norm_sqr() * fz).sum())
    }

    /// Draws `shots` computational-basis outcomes with a generator seeded from `seed`.
    pub fn sample(&self, shots: usize, seed: u64) -> Vec<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_with(shots, &mut rng)
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, shots: usize, rng: &mut R) -> Vec<usize> {
        let mut cdf = Vec::with_capacity(self.dim());
        let mut acc = 0.0;
        for a in &self.amps {
            acc += a.norm_sqr();
            cdf.push(acc);
        }
        // Rounding can leave the cumulative sum slightly below 1; draws past it
        // land on the last outcome with nonzero weight.
        let last = self.amps.iter().rposition(|a| a.norm_sqr() > 0.0).unwrap_or(0);
        (0..shots)
            .map(|_| {
                let u = rng.random::<f64>() * acc;
                cdf.partition_point(|&c| c <= u).min(last)
            })
            .collect()
    }
}
