//! Typed resolution of the raw settings into a validated run specification.

use crate::config::Settings;
use crate::CliError;
use std::path::PathBuf;
use std::time::Duration;
use swept2d_core::grid::{StateVector, Topology};
use swept2d_core::kernels::{self, EulerConfig, KernelConfig, WaveConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineKind {
    Serial,
    Classic,
    Swept,
}

impl EngineKind {
    pub fn name(&self) -> &'static str {
        match self {
            EngineKind::Serial => "serial",
            EngineKind::Classic => "classic",
            EngineKind::Swept => "swept",
        }
    }

    pub fn parse(s: &str) -> Result<EngineKind, CliError> {
        match s {
            "serial" => Ok(EngineKind::Serial),
            "classic" => Ok(EngineKind::Classic),
            "swept" => Ok(EngineKind::Swept),
            other => Err(CliError::Usage(format!(
                "engine must be serial | classic | swept, got {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransportKind {
    InProc,
    Tcp,
}

pub struct RunSpec {
    pub kernel_name: String,
    pub kernel_config: KernelConfig,
    pub topo: Topology,
    pub engine: EngineKind,
    pub transport: TransportKind,
    pub tau: Duration,
    pub roster: Option<PathBuf>,
    pub rank_index: Option<u32>,
    pub cycles: u64,
    pub substeps: u64,
    pub reps: usize,
    pub warmup: usize,
    pub seed: u64,
    pub snapshot_out: Option<PathBuf>,
    pub report_out: Option<PathBuf>,
    pub timeout: Duration,
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

pub fn kernel_config(s: &Settings) -> Result<KernelConfig, CliError> {
    let wave_defaults = WaveConfig::default();
    let wave = WaveConfig {
        cfl: s.get_f64("wave", "cfl", wave_defaults.cfl).map_err(usage)?,
        pulse_sigma_frac: s
            .get_f64("wave", "sigma_frac", wave_defaults.pulse_sigma_frac)
            .map_err(usage)?,
        pulse_amplitude: s
            .get_f64("wave", "amplitude", wave_defaults.pulse_amplitude)
            .map_err(usage)?,
    };
    wave.validate().map_err(|e| CliError::Usage(format!("wave config: {e}")))?;
    let d = EulerConfig::default();
    let euler = EulerConfig {
        lx: s.get_f64("euler", "lx", d.lx).map_err(usage)?,
        ly: s.get_f64("euler", "ly", d.ly).map_err(usage)?,
        nx: s.get_usize("euler", "nx", d.nx).map_err(usage)?,
        ny: s.get_usize("euler", "ny", d.ny).map_err(usage)?,
        dt: s.get_f64("euler", "dt", d.dt).map_err(usage)?,
        gamma: s.get_f64("euler", "gamma", d.gamma).map_err(usage)?,
        rho0: s.get_f64("euler", "rho", d.rho0).map_err(usage)?,
        mach: s.get_f64("euler", "mach", d.mach).map_err(usage)?,
        p0: s.get_f64("euler", "p", d.p0).map_err(usage)?,
        obstacle: s.get_bool("euler", "obstacle", d.obstacle).map_err(usage)?,
        obstacle_strength: s
            .get_f64("euler", "obstacle_strength", d.obstacle_strength)
            .map_err(usage)?,
        obstacle_sigma: s
            .get_f64("euler", "obstacle_sigma", d.obstacle_sigma)
            .map_err(usage)?,
    };
    euler
        .validate()
        .map_err(|e| CliError::Usage(format!("euler config: {e}")))?;
    Ok(KernelConfig { wave, euler })
}

pub fn resolve_run(s: &Settings) -> Result<RunSpec, CliError> {
    let kernel_name = s.get_str("run", "kernel", "wave");
    if !kernels::KERNEL_NAMES.contains(&kernel_name.as_str()) {
        return Err(CliError::Usage(format!(
            "kernel must be one of {:?}, got {kernel_name:?}",
            kernels::KERNEL_NAMES
        )));
    }
    let engine = EngineKind::parse(&s.get_str("run", "engine", "swept"))?;
    let px = s.get_u32("run", "px", 2).map_err(usage)?;
    let py = s.get_u32("run", "py", 2).map_err(usage)?;
    let n = s.get_usize("run", "n", 16).map_err(usage)?;
    let topo = Topology::new(px, py, n).map_err(usage)?;

    let cycles_key = s.get_u64("run", "cycles", 0).map_err(usage)?;
    let substeps_key = s.get_u64("run", "substeps", 0).map_err(usage)?;
    let (cycles, substeps) = match (cycles_key, substeps_key) {
        (0, 0) => (1, n as u64),
        (c, 0) => (c, c * n as u64),
        (0, t) => {
            if engine == EngineKind::Swept && t % n as u64 != 0 {
                return Err(CliError::Usage(format!(
                    "substeps: swept engine needs a multiple of n = {n}, got {t}"
                )));
            }
            (t / n as u64, t)
        }
        (c, t) => {
            if c * n as u64 != t {
                return Err(CliError::Usage(format!(
                    "cycles and substeps disagree: {c} cycles is {} sub-steps, got substeps = {t}",
                    c * n as u64
                )));
            }
            (c, t)
        }
    };

    let transport = match s.get_str("run", "transport", "inproc").as_str() {
        "inproc" => TransportKind::InProc,
        "tcp" => TransportKind::Tcp,
        other => {
            return Err(CliError::Usage(format!(
                "transport must be inproc | tcp, got {other:?}"
            )))
        }
    };
    let tau_us = s.get_f64("run", "tau_us", 0.0).map_err(usage)?;
    if tau_us < 0.0 {
        return Err(CliError::Usage(format!(
            "tau_us must be non-negative, got {tau_us}"
        )));
    }
    let roster = s.raw("run", "roster").map(PathBuf::from);
    if transport == TransportKind::Tcp && roster.is_none() {
        return Err(CliError::Usage(
            "tcp transport requires a roster file (run.roster / --roster)".into(),
        ));
    }
    let rank_index = s.raw("run", "rank").map(|v| {
        v.parse::<u32>()
            .map_err(|e| CliError::Usage(format!("rank: invalid value {v:?}: {e}")))
    });
    let rank_index = match rank_index {
        Some(r) => Some(r?),
        None => None,
    };

    let mut kernel_cfg = kernel_config(s)?;
    // Physical kernels discretize the topology's global grid.
    kernel_cfg.euler.nx = topo.global_width();
    kernel_cfg.euler.ny = topo.global_height();

    Ok(RunSpec {
        kernel_name,
        kernel_config: kernel_cfg,
        topo,
        engine,
        transport,
        tau: Duration::from_secs_f64(tau_us * 1e-6),
        roster,
        rank_index,
        cycles,
        substeps,
        reps: s.get_usize("run", "reps", 5).map_err(usage)?,
        warmup: s.get_usize("run", "warmup", 2).map_err(usage)?,
        seed: s.get_u64("run", "seed", 42).map_err(usage)?,
        snapshot_out: s.raw("run", "snapshot_out").map(PathBuf::from),
        report_out: s.raw("run", "report_out").map(PathBuf::from),
        timeout: Duration::from_secs_f64(s.get_f64("run", "timeout_s", 30.0).map_err(usage)?),
    })
}

impl RunSpec {
    pub fn stencil(&self) -> Result<Box<dyn swept2d_core::grid::Stencil + Send + Sync>, CliError> {
        kernels::by_name(
            &self.kernel_name,
            &self.kernel_config,
            (self.topo.global_width(), self.topo.global_height()),
        )
        .ok_or_else(|| CliError::Usage(format!("unknown kernel {:?}", self.kernel_name)))
    }

    pub fn init_fn(&self) -> Result<Box<dyn Fn(u64, u64) -> StateVector + Send + Sync>, CliError> {
        kernels::default_init(
            &self.kernel_name,
            &self.kernel_config,
            (self.topo.global_width(), self.topo.global_height()),
            self.seed,
        )
        .ok_or_else(|| CliError::Usage(format!("unknown kernel {:?}", self.kernel_name)))
    }

    pub fn with_n(&self, n: usize) -> Result<RunSpec, CliError> {
        let topo = Topology::new(self.topo.px(), self.topo.py(), n).map_err(usage)?;
        let mut kernel_config = self.kernel_config.clone();
        kernel_config.euler.nx = topo.global_width();
        kernel_config.euler.ny = topo.global_height();
        Ok(RunSpec {
            kernel_name: self.kernel_name.clone(),
            kernel_config,
            topo,
            cycles: self.cycles,
            substeps: self.cycles * n as u64,
            roster: self.roster.clone(),
            snapshot_out: self.snapshot_out.clone(),
            report_out: self.report_out.clone(),
            ..*self
        })
    }
}
