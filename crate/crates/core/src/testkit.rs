//! Test-support kernels: seeded random linear stencils and a five-point
//! average, used by the oracle-equivalence suites. Not part of the CLI
//! kernel registry.

use crate::grid::{KernelError, Neighborhood, Stencil};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Averages the center with its four edge neighbors; spreads any
/// perturbation by exactly one cell per sub-step.
pub struct FivePointAverage;

impl Stencil for FivePointAverage {
    fn name(&self) -> &str {
        "five-point-average"
    }

    fn arity(&self, _step: u64) -> usize {
        1
    }

    fn apply(
        &self,
        _step: u64,
        nbhd: &Neighborhood<'_>,
        out: &mut [f64],
    ) -> Result<(), KernelError> {
        // Balanced summation tree: bitwise invariant under transposition
        // (axis swap only commutes additions, never reassociates them).
        let ns = nbhd.north()[0] + nbhd.south()[0];
        let ew = nbhd.east()[0] + nbhd.west()[0];
        out[0] = 0.2 * (nbhd.center()[0] + (ns + ew));
        Ok(())
    }
}

/// A linear stencil with seeded pseudorandom coefficients, a configurable
/// period, and a per-sub-step arity schedule. Exercises everything the
/// component algorithms must get right: full 3x3 reads, phase-dependent
/// operations, and arity changes between levels.
pub struct RandomLinear {
    arities: Vec<usize>,
    /// weights[phase][out_component][cell][in_component]
    weights: Vec<Vec<Vec<Vec<f64>>>>,
    bias: Vec<Vec<f64>>,
    name: String,
}

impl RandomLinear {
    /// `arities[p]` is the state length at sub-steps congruent to p.
    pub fn new(seed: u64, arities: Vec<usize>) -> RandomLinear {
        assert!(!arities.is_empty() && arities.iter().all(|&a| a > 0));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let period = arities.len();
        let mut weights = Vec::with_capacity(period);
        let mut bias = Vec::with_capacity(period);
        for p in 0..period {
            let arity_in = arities[p];
            let arity_out = arities[(p + 1) % period];
            // Small coefficients keep long runs bounded.
            let w: Vec<Vec<Vec<f64>>> = (0..arity_out)
                .map(|_| {
                    (0..9)
                        .map(|_| (0..arity_in).map(|_| rng.gen_range(-0.11..0.11)).collect())
                        .collect()
                })
                .collect();
            weights.push(w);
            bias.push((0..arity_out).map(|_| rng.gen_range(-0.01..0.01)).collect());
        }
        RandomLinear {
            arities,
            weights,
            bias,
            name: format!("random-linear-{seed}"),
        }
    }

    pub fn scalar(seed: u64) -> RandomLinear {
        RandomLinear::new(seed, vec![1])
    }
}

impl Stencil for RandomLinear {
    fn name(&self) -> &str {
        &self.name
    }

    fn arity(&self, step: u64) -> usize {
        self.arities[(step % self.period()) as usize]
    }

    fn period(&self) -> u64 {
        self.arities.len() as u64
    }

    fn apply(
        &self,
        step: u64,
        nbhd: &Neighborhood<'_>,
        out: &mut [f64],
    ) -> Result<(), KernelError> {
        let phase = (step % self.period()) as usize;
        let expected = self.arities[phase];
        if nbhd.center().len() != expected {
            return Err(KernelError::Arity {
                expected,
                got: nbhd.center().len(),
            });
        }
        let weights = &self.weights[phase];
        for (c, slot) in out.iter_mut().enumerate() {
            let mut acc = self.bias[phase][c];
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let cell = nbhd.at(dx, dy);
                    let w = &weights[c][((dy + 1) * 3 + (dx + 1)) as usize];
                    for (v, wv) in cell.iter().zip(w) {
                        acc += v * wv;
                    }
                }
            }
            *slot = acc;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engines::serial_reference;
    use crate::grid::{init_global, Topology};

    #[test]
    fn random_linear_is_deterministic() {
        let topo = Topology::new(1, 1, 8).unwrap();
        let init = crate::kernels::seeded_scalar_init(3, 9);
        let f = init_global(&topo, 3, &init).unwrap();
        let k = RandomLinear::new(4, vec![3, 2, 3]);
        let a = serial_reference(&k, f.clone(), 9).unwrap();
        let b = serial_reference(&k, f, 9).unwrap();
        assert_eq!(a.values(), b.values());
    }
}
