//! 2D wave equation, second-order central differences in space with
//! leapfrog time stepping carried as (u, u_previous) state.

use crate::grid::{KernelError, Neighborhood, StateVector, Stencil};

#[derive(Debug, Clone)]
pub struct WaveConfig {
    /// Courant number c*dt/dx; must satisfy 0 < cfl <= 1/sqrt(2) for 2D
    /// stability.
    pub cfl: f64,
    /// Gaussian pulse width as a fraction of the shorter domain side.
    pub pulse_sigma_frac: f64,
    pub pulse_amplitude: f64,
}

impl Default for WaveConfig {
    fn default() -> Self {
        WaveConfig {
            cfl: 0.3,
            pulse_sigma_frac: 0.0625,
            pulse_amplitude: 1.0,
        }
    }
}

impl WaveConfig {
    pub fn validate(&self) -> Result<(), String> {
        let max = 1.0 / 2.0_f64.sqrt();
        if !(self.cfl > 0.0 && self.cfl <= max) {
            return Err(format!(
                "cfl must be in (0, {max:.4}] for 2D stability, got {}",
                self.cfl
            ));
        }
        Ok(())
    }

    /// Centered Gaussian pulse, at rest (u_prev = u).
    pub fn pulse_init(&self, width: usize, height: usize, i: u64, j: u64) -> StateVector {
        let cx = width as f64 / 2.0;
        let cy = height as f64 / 2.0;
        let sigma = self.pulse_sigma_frac * width.min(height) as f64;
        let dx = i as f64 - cx;
        let dy = j as f64 - cy;
        let u = self.pulse_amplitude * (-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp();
        StateVector(vec![u, u])
    }
}

/// State is (u, u_prev); one sub-step advances one time step:
/// `u_next = 2u - u_prev + cfl^2 * (u_E + u_W + u_N + u_S - 4u)`.
pub struct Wave {
    cfl2: f64,
    config: WaveConfig,
}

impl Wave {
    pub fn new(config: WaveConfig) -> Wave {
        Wave {
            cfl2: config.cfl * config.cfl,
            config,
        }
    }

    pub fn config(&self) -> &WaveConfig {
        &self.config
    }
}

impl Stencil for Wave {
    fn name(&self) -> &str {
        "wave"
    }

    fn arity(&self, _step: u64) -> usize {
        2
    }

    fn apply(
        &self,
        _step: u64,
        nbhd: &Neighborhood<'_>,
        out: &mut [f64],
    ) -> Result<(), KernelError> {
        let c = nbhd.center();
        let (u, u_prev) = (c[0], c[1]);
        let laplacian =
            nbhd.east()[0] + nbhd.west()[0] + nbhd.north()[0] + nbhd.south()[0] - 4.0 * u;
        out[0] = 2.0 * u - u_prev + self.cfl2 * laplacian;
        out[1] = u;
        Ok(())
    }
}
