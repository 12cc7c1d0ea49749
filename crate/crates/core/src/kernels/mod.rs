//! Stencil kernels: 2D wave, 2D Euler gas dynamics (RK4 staged into
//! sub-steps), the two-sub-step wide-stencil demo, and trivial
//! identity/increment kernels used for verification.
//!
//! Every kernel is a pure [`Stencil`]: deterministic, side-effect free, and
//! reading only its 3-by-3 neighborhood, so repeated runs are bitwise
//! identical no matter which engine drives them.

mod basic;
mod euler;
mod wave;
mod wide;

pub use basic::{Identity, Increment};
pub use euler::{Euler, EulerConfig};
pub use wave::{Wave, WaveConfig};
pub use wide::WideStencilDemo;

use crate::grid::{StateVector, Stencil};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Kernel names accepted by the CLI and verification sweeps.
pub const KERNEL_NAMES: [&str; 5] = ["identity", "increment", "wide-stencil", "wave", "euler"];

/// Kernel parameters needed to instantiate any named kernel.
#[derive(Debug, Clone, Default)]
pub struct KernelConfig {
    pub wave: WaveConfig,
    pub euler: EulerConfig,
}

/// Instantiate a kernel by name. `global_dims` supplies the global grid size
/// kernels that discretize a physical domain need for their spacing.
pub fn by_name(
    name: &str,
    config: &KernelConfig,
    global_dims: (usize, usize),
) -> Option<Box<dyn Stencil + Send + Sync>> {
    match name {
        "identity" => Some(Box::new(Identity)),
        "increment" => Some(Box::new(Increment)),
        "wide-stencil" => Some(Box::new(WideStencilDemo)),
        "wave" => Some(Box::new(Wave::new(config.wave.clone()))),
        "euler" => Some(Box::new(Euler::new(
            config.euler.clone().with_resolution(global_dims.0, global_dims.1),
        ))),
        _ => None,
    }
}

/// Deterministic initial condition for a named kernel. Physical kernels get
/// their natural initial state (plus a small seeded perturbation so fields
/// are not spatially uniform); the demo kernels get seeded random values.
pub fn default_init(
    name: &str,
    config: &KernelConfig,
    global_dims: (usize, usize),
    seed: u64,
) -> Option<Box<dyn Fn(u64, u64) -> StateVector + Send + Sync>> {
    let (w, h) = global_dims;
    match name {
        "identity" | "increment" | "wide-stencil" => Some(seeded_scalar_init(1, seed)),
        "wave" => {
            let cfg = config.wave.clone();
            Some(Box::new(move |i, j| cfg.pulse_init(w, h, i, j)))
        }
        "euler" => {
            let cfg = config.euler.clone().with_resolution(w, h);
            Some(Box::new(move |i, j| cfg.perturbed_freestream_init(i, j, seed)))
        }
        _ => None,
    }
}

/// Seeded pseudorandom scalar field in [0, 1), evaluated point by point so
/// the same (i, j) always yields the same value regardless of visit order.
pub fn seeded_scalar_init(
    arity: usize,
    seed: u64,
) -> Box<dyn Fn(u64, u64) -> StateVector + Send + Sync> {
    Box::new(move |i, j| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (i.wrapping_mul(0x9E37_79B9_7F4A_7C15)) ^ j);
        StateVector((0..arity).map(|_| rng.gen_range(0.0..1.0)).collect())
    })
}
