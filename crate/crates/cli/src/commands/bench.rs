//! `swept2d bench`: sweep subdomain sizes and engines, reporting the median
//! per-sub-step wall time over R repetitions after W warmups.

use crate::report::{median, per_rank_messages, write_csv, ReportRow, CSV_HEADER};
use crate::resolve::{resolve_run, EngineKind, RunSpec, TransportKind};
use crate::{config::Settings, CliError};
use std::path::PathBuf;
use std::process::ExitCode;
use swept2d_core::engines::{run_classic, run_swept, EngineReport};
use swept2d_core::transport::InProcNet;

pub fn cmd_bench(s: &Settings) -> Result<ExitCode, CliError> {
    let base = resolve_run(s)?;
    if base.transport != TransportKind::InProc {
        return Err(CliError::Usage(
            "bench sweeps run on the inproc transport".into(),
        ));
    }
    let n_list = s
        .get_usize_list("bench", "n_list", &[8, 16, 32, 64])
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let engine_names = s.get_str_list("bench", "engines", &["classic", "swept"]);
    let engines = engine_names
        .iter()
        .map(|name| EngineKind::parse(name))
        .collect::<Result<Vec<_>, _>>()?;
    let out_path = s.raw("bench", "out").map(PathBuf::from);

    let mut rows = vec![CSV_HEADER.to_string()];
    println!("{CSV_HEADER}");
    for &n in &n_list {
        for &engine in &engines {
            let mut spec = base.with_n(n)?;
            spec.engine = engine;
            let row = measure(&spec)?;
            println!("{}", row.to_csv());
            rows.push(row.to_csv());
        }
    }
    if let Some(path) = &out_path {
        write_csv(path, &rows)
            .map_err(|e| CliError::Other(format!("writing {}: {e}", path.display())))?;
    }
    Ok(ExitCode::SUCCESS)
}

/// One (engine, n) measurement: fresh grids and transport per repetition,
/// median of the post-warmup per-sub-step times.
pub(crate) fn measure(spec: &RunSpec) -> Result<ReportRow, CliError> {
    let kernel = spec.stencil()?;
    let arity0 = kernel.arity(0);
    let mut timings = Vec::with_capacity(spec.reps);
    let mut last_report: Option<EngineReport> = None;
    for rep in 0..spec.warmup + spec.reps {
        let grids = super::run::rank_grids(spec, arity0)?;
        let net = InProcNet::with_timeout(&spec.topo, spec.tau, spec.timeout);
        let report = match spec.engine {
            EngineKind::Classic => {
                run_classic(kernel.as_ref(), &spec.topo, &net, grids, spec.substeps)?.1
            }
            EngineKind::Swept => {
                run_swept(kernel.as_ref(), &spec.topo, &net, grids, spec.cycles)?.1
            }
            EngineKind::Serial => {
                return Err(CliError::Usage(
                    "bench compares the transported engines; use run for serial".into(),
                ))
            }
        };
        if rep >= spec.warmup {
            timings.push(report.seconds_per_substep() * 1e6);
        }
        last_report = Some(report);
    }
    let report = last_report.expect("at least one repetition");
    let (messages_per_rank, bytes_per_rank) = per_rank_messages(&report);
    Ok(ReportRow {
        kernel: spec.kernel_name.clone(),
        engine: spec.engine.name(),
        px: spec.topo.px(),
        py: spec.topo.py(),
        n: spec.topo.n(),
        tau_us: spec.tau.as_secs_f64() * 1e6,
        substeps: spec.substeps,
        us_per_substep: median(timings),
        messages_per_rank,
        bytes_per_rank,
    })
}
