//! Analytic per-sub-step cost model for the swept scheme.
//!
//! A half cycle performs n/2 sub-steps over n^2 points, builds one of each
//! component, and waits on two communication rounds, so the seconds per
//! sub-step come out as
//!
//! ```text
//! [ (n^2 s) * n/2 + a_u(n) + a_d(n) + 2 a_b(n) + 2 tau ] / (n/2)
//! ```
//!
//! with `s` the compute seconds per sub-step per point, `tau` the one-way
//! message latency per round, and the `a_*` the per-component build
//! overheads (modeled linear in n, zero by default). Dropping the overheads
//! simplifies to `n^2 s + 4 tau / n`: an up-sloping compute term and a
//! down-sloping latency term whose sum is U-shaped in n. The minimizing n
//! sits at the stationary point `(2 tau / s)^(1/3)`, where the cost is well
//! below the one-latency-per-sub-step floor that communicate-every-step
//! schemes pay.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("model parameter {field}: {detail}")]
    Invalid {
        field: &'static str,
        detail: String,
    },
}

/// Per-component overhead, linear in n: `a(n) = coeff * n`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AlphaCoeffs {
    pub upward: f64,
    pub downward: f64,
    pub bridge: f64,
}

/// Inputs to the full cost formula.
#[derive(Debug, Clone, Copy)]
pub struct CostParams {
    /// Points per subdomain side (even, >= 4).
    pub n: usize,
    /// Seconds of compute per sub-step per grid point.
    pub s: f64,
    /// One-way latency per communication round, seconds.
    pub tau: f64,
    pub alpha: AlphaCoeffs,
}

impl CostParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.n < 4 || self.n % 2 != 0 {
            return Err(ModelError::Invalid {
                field: "n",
                detail: format!("must be even and >= 4, got {}", self.n),
            });
        }
        if !(self.s > 0.0) {
            return Err(ModelError::Invalid {
                field: "s",
                detail: format!("must be positive, got {}", self.s),
            });
        }
        if !(self.tau >= 0.0) {
            return Err(ModelError::Invalid {
                field: "tau",
                detail: format!("must be non-negative, got {}", self.tau),
            });
        }
        Ok(())
    }
}

/// Seconds per sub-step with per-component overheads included.
pub fn predict_full(p: &CostParams) -> f64 {
    let n = p.n as f64;
    let half = n / 2.0;
    let overhead = p.alpha.upward * n + p.alpha.downward * n + 2.0 * p.alpha.bridge * n;
    // Algebraically [ (n^2 s)(n/2) + overhead + 2 tau ] / (n/2); dividing the
    // compute term through keeps the tau path identical to the simplified
    // formula's 4 tau / n.
    n * n * p.s + (overhead + 2.0 * p.tau) / half
}

/// Seconds per sub-step ignoring overheads: `n^2 s + 4 tau / n`.
pub fn predict_simplified(n: usize, s: f64, tau: f64) -> f64 {
    let n = n as f64;
    n * n * s + 4.0 * tau / n
}

/// Result of the optimal-subdomain search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    /// Brute-force minimizer over even n in range (ties toward smaller n).
    pub n: usize,
    pub cost: f64,
    /// Stationary point (2 tau / s)^(1/3) of the continuous cost.
    pub stationary: f64,
}

/// Brute-force search for the even n minimizing [`predict_simplified`].
/// The optimum is the scaling limit: fewer points per rank than this slows
/// the run back down.
pub fn optimal_n(s: f64, tau: f64, n_min: usize, n_max: usize) -> Result<Optimum, ModelError> {
    if !(s > 0.0) {
        return Err(ModelError::Invalid {
            field: "s",
            detail: format!("must be positive, got {s}"),
        });
    }
    if n_min < 4 || n_min % 2 != 0 || n_max < n_min {
        return Err(ModelError::Invalid {
            field: "n_min",
            detail: format!("need even 4 <= n_min <= n_max, got {n_min}..{n_max}"),
        });
    }
    let mut best = (n_min, predict_simplified(n_min, s, tau));
    let mut n = n_min + 2;
    while n <= n_max {
        let cost = predict_simplified(n, s, tau);
        if cost < best.1 {
            best = (n, cost);
        }
        n += 2;
    }
    Ok(Optimum {
        n: best.0,
        cost: best.1,
        stationary: (2.0 * tau / s).cbrt(),
    })
}

/// Nearest even integer to x (used to compare the analytic stationary point
/// with the brute-force optimum).
pub fn round_to_even(x: f64) -> usize {
    let half = (x / 2.0).round();
    (half.max(0.0) as usize) * 2
}

/// Interconnect latency presets.
pub const TAU_PRESETS: [(&str, f64); 4] = [
    // Amazon EC2 cloud.
    ("ec2", 150e-6),
    // Typical gigabit Ethernet.
    ("gige", 50e-6),
    // Fast 100-gigabit Ethernet.
    ("100gige", 5e-6),
    // Mellanox 56 Gb/s FDR InfiniBand.
    ("infiniband", 0.7e-6),
];

/// Compute-time presets: seconds per sub-step per point for representative
/// discretizations on a single Nehalem-class thread (~10 GFLOPS) and on a
/// 40 TFLOPS GPU node.
pub const S_PRESETS: [(&str, f64); 6] = [
    // Finite-element system, ~8000 FLOP per step-point, single thread.
    ("fe-thread", 800e-9),
    // Finite-volume system, ~400 FLOP, single thread.
    ("fv-thread", 40e-9),
    // Finite-difference scalar, ~6 FLOP, single thread.
    ("fd-thread", 0.6e-9),
    // The same three on a 40 TFLOPS node.
    ("fe-gpu", 200e-12),
    ("fv-gpu", 10e-12),
    ("fd-gpu", 150e-15),
];

pub fn tau_preset(name: &str) -> Option<f64> {
    TAU_PRESETS
        .iter()
        .find(|(k, _)| *k == name)
        .map(|(_, v)| *v)
}

pub fn s_preset(name: &str) -> Option<f64> {
    S_PRESETS.iter().find(|(k, _)| *k == name).map(|(_, v)| *v)
}

/// One row of the model-curve CSV.
#[derive(Debug, Clone, Copy)]
pub struct CurvePoint {
    pub n: usize,
    pub s: f64,
    pub tau: f64,
    pub term_compute: f64,
    pub term_latency: f64,
    pub total: f64,
}

/// Evaluate the two cost terms over even n in [n_min, n_max].
pub fn model_curve(s: f64, tau: f64, n_min: usize, n_max: usize) -> Vec<CurvePoint> {
    let mut points = Vec::new();
    let mut n = n_min + n_min % 2;
    while n <= n_max {
        let nf = n as f64;
        points.push(CurvePoint {
            n,
            s,
            tau,
            term_compute: nf * nf * s,
            term_latency: 4.0 * tau / nf,
            total: predict_simplified(n, s, tau),
        });
        n += 2;
    }
    points
}

/// Ideal compute work of one component build, in point-updates. With
/// cross-sections shrinking or growing by two per level, the pyramid updates
/// sum_{i=1}^{n/2-1} (2i)^2 points, the downward pyramid one level more, and
/// each bridge fills the complement of two pyramid halves.
pub fn component_point_updates(component: ComponentKind, n: usize) -> u64 {
    let half = (n / 2) as u64;
    match component {
        ComponentKind::Upward => (1..half).map(|i| (2 * i) * (2 * i)).sum(),
        ComponentKind::Downward => (1..=half).map(|i| (2 * i) * (2 * i)).sum(),
        ComponentKind::Bridge => (1..half)
            .map(|i| 2 * i * (n as u64 - 2 * i))
            .sum(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentKind {
    Upward,
    Downward,
    Bridge,
}

/// Calibrate the linear overhead coefficient of one component kind from
/// measured build times: least squares of (measured - ideal_compute) against
/// n through the origin.
pub fn fit_linear_alpha(
    component: ComponentKind,
    s: f64,
    samples: &[(usize, f64)],
) -> Result<f64, ModelError> {
    if samples.is_empty() {
        return Err(ModelError::Invalid {
            field: "samples",
            detail: "need at least one (n, seconds) sample".into(),
        });
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for &(n, seconds) in samples {
        let ideal = component_point_updates(component, n) as f64 * s;
        let overhead = seconds - ideal;
        num += n as f64 * overhead;
        den += (n * n) as f64;
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_cost_worked_example() {
        let p = CostParams {
            n: 8,
            s: 40e-9,
            tau: 150e-6,
            alpha: AlphaCoeffs::default(),
        };
        p.validate().unwrap();
        let cost = predict_full(&p);
        assert!((cost - 7.756e-5).abs() < 1e-12, "{cost}");
    }

    #[test]
    fn simplified_worked_example() {
        let cost = predict_simplified(8, 40e-9, 150e-6);
        assert!((cost - 7.756e-5).abs() < 1e-12, "{cost}");
    }

    #[test]
    fn zero_latency_leaves_pure_compute() {
        assert_eq!(predict_simplified(16, 3e-9, 0.0), 256.0 * 3e-9);
        // Doubling n quadruples the latency-free cost.
        let a = predict_simplified(16, 3e-9, 0.0);
        let b = predict_simplified(32, 3e-9, 0.0);
        assert!((b / a - 4.0).abs() < 1e-12);
    }

    #[test]
    fn full_equals_simplified_without_overheads() {
        // 2 tau / (n/2) and 4 tau / n are the same real number, so the two
        // formulas must agree bitwise when the alphas vanish.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..1000 {
            let n = 4 + 2 * rng.gen_range(0..200usize);
            let s = rng.gen_range(1e-12..1e-6);
            let tau = rng.gen_range(0.0..1e-3);
            let p = CostParams {
                n,
                s,
                tau,
                alpha: AlphaCoeffs::default(),
            };
            assert_eq!(
                predict_full(&p).to_bits(),
                predict_simplified(n, s, tau).to_bits(),
                "n={n} s={s} tau={tau}"
            );
        }
    }

    #[test]
    fn zero_tau_optimum_is_n_min() {
        let opt = optimal_n(1e-9, 0.0, 4, 512).unwrap();
        assert_eq!(opt.n, 4);
    }

    #[test]
    fn stationary_point_worked_example() {
        let opt = optimal_n(0.6e-9, 150e-6, 4, 4096).unwrap();
        assert!((opt.stationary - 79.37).abs() < 0.01, "{}", opt.stationary);
        assert!(opt.n == 78 || opt.n == 80, "brute force found {}", opt.n);
    }

    #[test]
    fn brute_force_matches_exhaustive_scan() {
        let (s, tau) = (40e-9, 0.7e-6);
        let opt = optimal_n(s, tau, 4, 4096).unwrap();
        let mut best = (0usize, f64::INFINITY);
        for n in (4..=4096).step_by(2) {
            let c = predict_simplified(n, s, tau);
            if c < best.1 {
                best = (n, c);
            }
        }
        assert_eq!(opt.n, best.0);
        assert_eq!(opt.cost, best.1);
    }

    #[test]
    fn optimum_beats_every_even_n() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..20 {
            let s = rng.gen_range(1e-11..1e-7);
            let tau = rng.gen_range(0.0..1e-3);
            let opt = optimal_n(s, tau, 4, 2048).unwrap();
            for n in (4..=2048).step_by(2) {
                assert!(
                    opt.cost <= predict_simplified(n, s, tau),
                    "s={s} tau={tau} beaten at n={n}"
                );
            }
        }
    }

    #[test]
    fn preset_pairs_agree_with_stationary_point() {
        for (tau_name, tau) in TAU_PRESETS {
            for (s_name, s) in S_PRESETS {
                let opt = optimal_n(s, tau, 4, 4096).unwrap();
                if opt.stationary < 4.0 || opt.stationary > 4096.0 {
                    continue;
                }
                let rounded = round_to_even(opt.stationary) as i64;
                assert!(
                    (opt.n as i64 - rounded).abs() <= 2,
                    "{tau_name}/{s_name}: brute {} vs analytic {}",
                    opt.n,
                    opt.stationary
                );
            }
        }
    }

    #[test]
    fn latency_barrier_broken_at_optimum() {
        // At the continuous optimum n* = (2 tau / s)^(1/3) the cost is
        // 6 tau / n*, so the barrier breaks exactly when n* exceeds 6.
        // Every preset pair past that point must come in under one latency.
        let mut checked = 0;
        for (_, tau) in TAU_PRESETS {
            for (_, s) in S_PRESETS {
                let opt = optimal_n(s, tau, 4, 4096).unwrap();
                if opt.stationary > 6.0 && opt.stationary <= 4096.0 {
                    checked += 1;
                    assert!(opt.cost < tau, "cost {} vs tau {tau} (s={s})", opt.cost);
                }
            }
        }
        assert!(checked >= 18, "only {checked} preset pairs in range");
    }

    #[test]
    fn fit_recovers_synthetic_alpha() {
        let s = 20e-9;
        let true_coeff = 3e-7;
        let samples: Vec<(usize, f64)> = [8usize, 16, 32, 64]
            .iter()
            .map(|&n| {
                let ideal = component_point_updates(ComponentKind::Upward, n) as f64 * s;
                (n, ideal + true_coeff * n as f64)
            })
            .collect();
        let fitted = fit_linear_alpha(ComponentKind::Upward, s, &samples).unwrap();
        assert!((fitted - true_coeff).abs() < 1e-12, "{fitted}");
    }

    #[test]
    fn component_work_sums_to_half_cycle_volume() {
        // One pyramid, one downward pyramid, and two bridges together update
        // each of the n^2 points exactly n/2 times per half cycle.
        for n in [4usize, 8, 16, 32] {
            let total = component_point_updates(ComponentKind::Upward, n)
                + component_point_updates(ComponentKind::Downward, n)
                + 2 * component_point_updates(ComponentKind::Bridge, n);
            assert_eq!(total, (n * n * n / 2) as u64, "n={n}");
        }
    }
}
