//! `swept2d verify`: exhaustive bitwise comparison of the swept and classic
//! engines against the serial oracle over a desk-scale configuration sweep.
//! Exit 0 iff every value of every configuration matches.

use crate::resolve::kernel_config;
use crate::{config::Settings, CliError};
use std::process::ExitCode;
use std::time::Duration;
use swept2d_core::engines::{
    gather, run_classic, run_swept_halves, serial_reference, FaultInjection, SweptOptions,
};
use swept2d_core::grid::{init_global, init_grid, GlobalField, Topology};
use swept2d_core::kernels::{by_name, default_init, KERNEL_NAMES};
use swept2d_core::transport::InProcNet;

struct Divergence {
    engine: &'static str,
    rank: (u32, u32),
    i: usize,
    j: usize,
    step: u64,
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

pub fn cmd_verify(s: &Settings) -> Result<ExitCode, CliError> {
    let max_px = s.get_u32("verify", "max_px", 3).map_err(usage)?;
    let max_py = s.get_u32("verify", "max_py", 3).map_err(usage)?;
    let n_list = s
        .get_usize_list("verify", "n_list", &[4, 8, 16])
        .map_err(usage)?;
    let kernels = s.get_str_list("verify", "kernels", &KERNEL_NAMES);
    let cycles = s.get_u64("verify", "cycles", 1).map_err(usage)?;
    let seed = s.get_u64("run", "seed", 42).map_err(usage)?;
    let fault = if s.get_bool("verify", "inject_fault", false).map_err(usage)? {
        Some(FaultInjection::SwapBridgeOutputs)
    } else {
        None
    };

    let mut configs = 0usize;
    for px in 1..=max_px {
        for py in 1..=max_py {
            for &n in &n_list {
                for kernel_name in &kernels {
                    let topo = Topology::new(px, py, n).map_err(usage)?;
                    match verify_one(s, &topo, kernel_name, cycles, seed, fault)? {
                        None => {
                            configs += 1;
                            println!(
                                "verify kernel={kernel_name} topo={px}x{py} n={n} cycles={cycles}: ok"
                            );
                        }
                        Some(d) => {
                            println!(
                                "verify kernel={kernel_name} topo={px}x{py} n={n} cycles={cycles}: \
                                 DIVERGED engine={} rank=({},{}) i={} j={} step={}",
                                d.engine, d.rank.0, d.rank.1, d.i, d.j, d.step
                            );
                            return Ok(ExitCode::FAILURE);
                        }
                    }
                }
            }
        }
    }
    println!("verify: {configs} configurations match the serial oracle bitwise");
    Ok(ExitCode::SUCCESS)
}

fn first_divergence(
    topo: &Topology,
    engine: &'static str,
    got: &GlobalField,
    want: &GlobalField,
) -> Option<Divergence> {
    for j in 0..want.height() {
        for i in 0..want.width() {
            if got.value(i, j) != want.value(i, j) {
                return Some(Divergence {
                    engine,
                    rank: (
                        (i / topo.n()) as u32,
                        (j / topo.n()) as u32,
                    ),
                    i,
                    j,
                    step: want.step(),
                });
            }
        }
    }
    None
}

fn verify_one(
    s: &Settings,
    topo: &Topology,
    kernel_name: &str,
    cycles: u64,
    seed: u64,
    fault: Option<FaultInjection>,
) -> Result<Option<Divergence>, CliError> {
    let mut cfg = kernel_config(s)?;
    cfg.euler.nx = topo.global_width();
    cfg.euler.ny = topo.global_height();
    let dims = (topo.global_width(), topo.global_height());
    let kernel = by_name(kernel_name, &cfg, dims)
        .ok_or_else(|| CliError::Usage(format!("unknown kernel {kernel_name:?}")))?;
    let init = default_init(kernel_name, &cfg, dims, seed).expect("kernel name checked");
    let arity0 = kernel.arity(0);
    let substeps = cycles * topo.n() as u64;

    let reference = serial_reference(
        kernel.as_ref(),
        init_global(topo, arity0, &init).map_err(usage)?,
        substeps,
    )?;

    let grids: Vec<_> = topo
        .ranks()
        .map(|r| init_grid(topo, r, arity0, &init))
        .collect::<Result<_, _>>()
        .map_err(usage)?;
    let net = InProcNet::with_timeout(topo, Duration::ZERO, Duration::from_secs(20));
    let (classic_grids, _) = run_classic(kernel.as_ref(), topo, &net, grids.clone(), substeps)?;
    let classic = gather(topo, &classic_grids, (0, 0))?;
    if let Some(d) = first_divergence(topo, "classic", &classic, &reference) {
        return Ok(Some(d));
    }

    let net = InProcNet::with_timeout(topo, Duration::ZERO, Duration::from_secs(20));
    let (swept_grids, _, shift) = run_swept_halves(
        kernel.as_ref(),
        topo,
        &net,
        grids,
        2 * cycles,
        SweptOptions { fault },
    )?;
    let swept = gather(topo, &swept_grids, shift)?;
    Ok(first_divergence(topo, "swept", &swept, &reference))
}
