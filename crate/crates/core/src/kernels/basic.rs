//! Trivial scalar kernels used for engine verification.

use crate::grid::{KernelError, Neighborhood, Stencil};

/// Copies the center value unchanged; every field is a fixed point.
pub struct Identity;

impl Stencil for Identity {
    fn name(&self) -> &str {
        "identity"
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
        out[0] = nbhd.center()[0];
        Ok(())
    }
}

/// Adds 1 to the center value each sub-step, so the value at sub-step t is
/// `initial + t`; handy for checking how far an engine advanced.
pub struct Increment;

impl Stencil for Increment {
    fn name(&self) -> &str {
        "increment"
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
        out[0] = nbhd.center()[0] + 1.0;
        Ok(())
    }
}
