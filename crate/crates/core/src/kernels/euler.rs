//! 2D compressible Euler equations: central-difference flux divergence with
//! skew-symmetric splitting of the convective terms, advanced by classical
//! 4-stage Runge-Kutta.
//!
//! Each RK stage is one sub-step (`step % 4` selects the stage), so the
//! kernel fits the 3-by-3 one-sub-step contract. The state carries the stage
//! value, the base state from the start of the physical step, and the
//! accumulated stage sum:
//!
//! - `[0..4)` stage state (rho, rho*u, rho*v, E)
//! - `[4..8)` base state
//! - `[8..12)` stage accumulator k1 + 2*k2 + 2*k3
//! - `[12]` obstacle mask (only when the obstacle term is enabled)
//!
//! Mass uses the pure divergence form so total mass telescopes exactly on
//! the periodic domain; momentum and energy convection use the averaged
//! divergence/advective (skew-symmetric) form.

use crate::grid::{KernelError, Neighborhood, StateVector, Stencil};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const VARS: usize = 4;
const STAGE: usize = 0;
const BASE: usize = VARS;
const ACC: usize = 2 * VARS;

#[derive(Debug, Clone)]
pub struct EulerConfig {
    /// Domain lengths.
    pub lx: f64,
    pub ly: f64,
    /// Global resolution; spacing is lx/nx by ly/ny.
    pub nx: usize,
    pub ny: usize,
    /// Physical time step advanced by one 4-sub-step RK cycle.
    pub dt: f64,
    pub gamma: f64,
    /// Free stream: density, Mach number, static pressure. Velocity is
    /// u = c*M eastward, v = 0.
    pub rho0: f64,
    pub mach: f64,
    pub p0: f64,
    /// Optional penalization obstacle near the domain center. Off by
    /// default; excluded from the conservation checks.
    pub obstacle: bool,
    pub obstacle_strength: f64,
    pub obstacle_sigma: f64,
}

impl Default for EulerConfig {
    fn default() -> Self {
        EulerConfig {
            lx: 50.0,
            ly: 25.0,
            nx: 1024,
            ny: 512,
            dt: 1e-6,
            gamma: 1.4,
            rho0: 1.084,
            mach: 0.2,
            p0: 101_325.0,
            obstacle: false,
            obstacle_strength: 1e4,
            obstacle_sigma: 1.0,
        }
    }
}

impl EulerConfig {
    pub fn with_resolution(mut self, nx: usize, ny: usize) -> EulerConfig {
        self.nx = nx;
        self.ny = ny;
        self
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.lx <= 0.0 || self.ly <= 0.0 || self.nx == 0 || self.ny == 0 {
            return Err("domain lengths and resolution must be positive".into());
        }
        if self.dt <= 0.0 {
            return Err(format!("dt must be positive, got {}", self.dt));
        }
        if self.rho0 <= 0.0 || self.p0 <= 0.0 {
            return Err("free-stream density and pressure must be positive".into());
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    pub fn sound_speed(&self) -> f64 {
        (self.gamma * self.p0 / self.rho0).sqrt()
    }

    pub fn arity(&self) -> usize {
        if self.obstacle {
            3 * VARS + 1
        } else {
            3 * VARS
        }
    }

    /// Free-stream conservative state (rho, rho*u, rho*v, E).
    pub fn freestream(&self) -> [f64; VARS] {
        let u = self.sound_speed() * self.mach;
        let e = self.p0 / (self.gamma - 1.0) + 0.5 * self.rho0 * u * u;
        [self.rho0, self.rho0 * u, 0.0, e]
    }

    /// Penalization mask: ~1 inside a blob near the domain center, ~0
    /// elsewhere. Coordinates are centered on the domain midpoint.
    pub fn obstacle_mask(&self, i: u64, j: u64) -> f64 {
        let x = (i as f64 + 0.5) * self.dx() - 0.5 * self.lx;
        let y = (j as f64 + 0.5) * self.dy() - 0.5 * self.ly;
        let yo = y + 0.25 * self.ly / self.nx as f64;
        let r2 = x * x + yo * yo;
        (-(r2.powi(8)) * self.obstacle_sigma).exp()
    }

    /// Free stream plus a small smooth density perturbation so fields are
    /// spatially varying; the seed only moves the perturbation phase.
    pub fn perturbed_freestream_init(&self, i: u64, j: u64, seed: u64) -> StateVector {
        let phase = (seed % 1009) as f64 / 1009.0;
        let free = self.freestream();
        let sx = (2.0 * std::f64::consts::PI * (i as f64 / self.nx as f64 + phase)).sin();
        let sy = (2.0 * std::f64::consts::PI * j as f64 / self.ny as f64).sin();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ i.wrapping_mul(0x9E37_79B9) ^ (j << 20));
        let noise: f64 = rng.gen_range(-1.0..1.0);
        let rho = free[0] * (1.0 + 1e-3 * sx * sy + 1e-6 * noise);
        let u = free[1] / free[0];
        let e = self.p0 / (self.gamma - 1.0) + 0.5 * rho * u * u;
        let mut state = vec![rho, rho * u, 0.0, e];
        state.extend_from_slice(&[rho, rho * u, 0.0, e]);
        state.extend_from_slice(&[0.0; VARS]);
        if self.obstacle {
            state.push(self.obstacle_mask(i, j));
        }
        StateVector(state)
    }

    pub fn freestream_init(&self, i: u64, j: u64) -> StateVector {
        let free = self.freestream();
        let mut state = Vec::with_capacity(self.arity());
        state.extend_from_slice(&free);
        state.extend_from_slice(&free);
        state.extend_from_slice(&[0.0; VARS]);
        if self.obstacle {
            state.push(self.obstacle_mask(i, j));
        }
        StateVector(state)
    }
}

pub struct Euler {
    config: EulerConfig,
    dx: f64,
    dy: f64,
    freestream: [f64; VARS],
}

impl Euler {
    pub fn new(config: EulerConfig) -> Euler {
        let dx = config.dx();
        let dy = config.dy();
        let freestream = config.freestream();
        Euler {
            config,
            dx,
            dy,
            freestream,
        }
    }

    pub fn config(&self) -> &EulerConfig {
        &self.config
    }

    /// Pressure from the conservative state.
    fn pressure(&self, q: &[f64]) -> f64 {
        (self.config.gamma - 1.0) * (q[3] - 0.5 * (q[1] * q[1] + q[2] * q[2]) / q[0])
    }

    /// Flux divergence of the stage state at the neighborhood center.
    fn rhs(&self, nbhd: &Neighborhood<'_>) -> Result<[f64; VARS], KernelError> {
        let q = |dx: i32, dy: i32| &nbhd.at(dx, dy)[STAGE..STAGE + VARS];
        let c = q(0, 0);
        if c[0] <= 0.0 {
            return Err(KernelError::NonPhysical(format!("density {} <= 0", c[0])));
        }
        let p_c = self.pressure(c);
        if p_c <= 0.0 {
            return Err(KernelError::NonPhysical(format!("pressure {p_c} <= 0")));
        }

        // Primitive helpers per neighborhood cell.
        let prim = |s: &[f64]| {
            let rho = s[0];
            let u = s[1] / rho;
            let v = s[2] / rho;
            let p = self.pressure(s);
            let h = (s[3] + p) / rho;
            (rho, u, v, p, h)
        };
        let (e, w) = (q(1, 0), q(-1, 0));
        let (s, n) = (q(0, 1), q(0, -1));
        let (_, u_c, v_c, _, h_c) = prim(c);
        let (_, u_e, v_e, p_e, h_e) = prim(e);
        let (_, u_w, v_w, p_w, h_w) = prim(w);
        let (_, u_s, v_s, p_s, h_s) = prim(s);
        let (_, u_n, v_n, p_n, h_n) = prim(n);

        let inv2dx = 1.0 / (2.0 * self.dx);
        let inv2dy = 1.0 / (2.0 * self.dy);
        // Central differences; y grows southward, which fixes the sign
        // convention consistently everywhere on the periodic domain.
        let ddx = |fe: f64, fw: f64| (fe - fw) * inv2dx;
        let ddy = |fs: f64, fn_: f64| (fs - fn_) * inv2dy;

        // Mass: pure divergence form (telescopes exactly over the domain).
        let mass = ddx(e[1], w[1]) + ddy(s[2], n[2]);

        // Skew-symmetric convective derivative of quantity phi along x:
        // 1/2 d(m phi)/dx + 1/2 (m dphi/dx + phi dm/dx), with m = rho*u.
        let skew_x = |phi_c: f64, phi_e: f64, phi_w: f64| {
            0.5 * ddx(e[1] * phi_e, w[1] * phi_w)
                + 0.5 * (c[1] * ddx(phi_e, phi_w) + phi_c * ddx(e[1], w[1]))
        };
        let skew_y = |phi_c: f64, phi_s: f64, phi_n: f64| {
            0.5 * ddy(s[2] * phi_s, n[2] * phi_n)
                + 0.5 * (c[2] * ddy(phi_s, phi_n) + phi_c * ddy(s[2], n[2]))
        };

        let mom_x = skew_x(u_c, u_e, u_w) + skew_y(u_c, u_s, u_n) + ddx(p_e, p_w);
        let mom_y = skew_x(v_c, v_e, v_w) + skew_y(v_c, v_s, v_n) + ddy(p_s, p_n);
        let energy = skew_x(h_c, h_e, h_w) + skew_y(h_c, h_s, h_n);

        Ok([-mass, -mom_x, -mom_y, -energy])
    }
}

impl Stencil for Euler {
    fn name(&self) -> &str {
        "euler"
    }

    fn arity(&self, _step: u64) -> usize {
        self.config.arity()
    }

    fn period(&self) -> u64 {
        4
    }

    fn apply(
        &self,
        step: u64,
        nbhd: &Neighborhood<'_>,
        out: &mut [f64],
    ) -> Result<(), KernelError> {
        let center = nbhd.center();
        if center.len() != self.config.arity() {
            return Err(KernelError::Arity {
                expected: self.config.arity(),
                got: center.len(),
            });
        }
        let mut k = self.rhs(nbhd)?;
        if self.config.obstacle {
            let mask = center[3 * VARS];
            let rate = self.config.obstacle_strength * mask;
            for i in 0..VARS {
                k[i] -= rate * (center[STAGE + i] - self.freestream[i]);
            }
        }

        let dt = self.config.dt;
        let stage = step % 4;
        let base: [f64; VARS] = if stage == 0 {
            center[STAGE..STAGE + VARS].try_into().unwrap()
        } else {
            center[BASE..BASE + VARS].try_into().unwrap()
        };
        for i in 0..VARS {
            let (next, acc) = match stage {
                0 => (base[i] + 0.5 * dt * k[i], k[i]),
                1 => (base[i] + 0.5 * dt * k[i], center[ACC + i] + 2.0 * k[i]),
                2 => (base[i] + dt * k[i], center[ACC + i] + 2.0 * k[i]),
                _ => (base[i] + dt / 6.0 * (center[ACC + i] + k[i]), 0.0),
            };
            out[STAGE + i] = next;
            out[BASE + i] = if stage == 3 { next } else { base[i] };
            out[ACC + i] = acc;
        }
        if self.config.obstacle {
            out[3 * VARS] = center[3 * VARS];
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engines::serial_reference;
    use crate::grid::init_global;
    use crate::grid::Topology;

    fn desk_config(nx: usize, ny: usize) -> EulerConfig {
        EulerConfig::default().with_resolution(nx, ny)
    }

    #[test]
    fn defaults_match_experiment_setup() {
        let c = EulerConfig::default();
        assert_eq!(c.lx, 50.0);
        assert_eq!(c.ly, 25.0);
        assert_eq!(c.nx, 1024);
        assert_eq!(c.ny, 512);
        assert_eq!(c.dt, 1e-6);
        assert_eq!(c.gamma, 1.4);
        assert_eq!(c.rho0, 1.084);
        assert_eq!(c.mach, 0.2);
        assert_eq!(c.p0, 101_325.0);
        assert!(!c.obstacle);
        c.validate().unwrap();
    }

    #[test]
    fn freestream_is_fixed_point() {
        let cfg = desk_config(16, 16);
        let kernel = Euler::new(cfg.clone());
        let topo = Topology::new(1, 1, 16).unwrap();
        let f = init_global(&topo, cfg.arity(), &|i, j| cfg.freestream_init(i, j)).unwrap();
        let out = serial_reference(&kernel, f.clone(), 40).unwrap();
        for (a, b) in out.values().iter().zip(f.values()) {
            let rel = (a - b).abs() / b.abs().max(1.0);
            assert!(rel <= 1e-12, "free stream drifted: {a} vs {b}");
        }
    }

    #[test]
    fn mass_conserved_on_periodic_domain() {
        let cfg = desk_config(64, 32);
        let kernel = Euler::new(cfg.clone());
        let topo = Topology::new(2, 1, 32).unwrap();
        let f = init_global(&topo, cfg.arity(), &|i, j| {
            cfg.perturbed_freestream_init(i, j, 11)
        })
        .unwrap();
        let mass = |field: &crate::grid::GlobalField| -> f64 {
            let mut total = 0.0;
            for j in 0..field.height() {
                for i in 0..field.width() {
                    total += field.value(i, j)[0];
                }
            }
            total * cfg.dx() * cfg.dy()
        };
        let m0 = mass(&f);
        let out = serial_reference(&kernel, f, 100).unwrap();
        let m1 = mass(&out);
        assert!(
            ((m1 - m0) / m0).abs() <= 1e-12,
            "mass drifted from {m0} to {m1}"
        );
    }

    #[test]
    fn obstacle_mode_carries_mask_and_stays_finite() {
        let mut cfg = desk_config(32, 16);
        cfg.obstacle = true;
        let kernel = Euler::new(cfg.clone());
        assert_eq!(kernel.arity(0), 13);
        let topo = Topology::new(1, 1, 16).unwrap();
        let f = init_global(&topo, cfg.arity(), &|i, j| {
            cfg.perturbed_freestream_init(i, j, 3)
        })
        .unwrap();
        let out = serial_reference(&kernel, f.clone(), 8).unwrap();
        assert!(out.values().iter().all(|v| v.is_finite()));
        // Mask rides along unchanged.
        for j in 0..16 {
            for i in 0..16 {
                assert_eq!(out.value(i, j)[12], f.value(i, j)[12]);
            }
        }
    }

    #[test]
    fn negative_pressure_is_reported() {
        let cfg = desk_config(16, 16);
        let kernel = Euler::new(cfg.clone());
        let topo = Topology::new(1, 1, 16).unwrap();
        let f = init_global(&topo, cfg.arity(), &|_, _| {
            // Energy far below kinetic: pressure comes out negative.
            let mut s = vec![1.0, 5.0, 0.0, 1.0];
            s.extend_from_slice(&[1.0, 5.0, 0.0, 1.0]);
            s.extend_from_slice(&[0.0; 4]);
            StateVector(s)
        })
        .unwrap();
        let err = serial_reference(&kernel, f, 1).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("pressure"), "{msg}");
    }
}
