//! `swept2d run`: one simulation, one snapshot, one CSV report row.

use crate::report::{per_rank_messages, ReportRow, CSV_HEADER};
use crate::resolve::{resolve_run, EngineKind, RunSpec, TransportKind};
use crate::{config::Settings, CliError};
use std::process::ExitCode;
use std::time::Instant;
use swept2d_core::engines::{gather, run_classic, run_classic_rank, run_swept, run_swept_rank};
use swept2d_core::engines::{serial_reference, EngineReport, SweptOptions};
use swept2d_core::grid::{init_global, init_grid, GlobalField, Grid};
use swept2d_core::transport::{codec, parse_roster, InProcNet, TcpEndpoint, Transport};

/// Rank-0 gather channel for one-rank-per-process runs; outside the engine
/// tag space for any realistic cycle count.
const GATHER_TAG: u32 = 0xFFFF_FF00;

pub fn cmd_run(s: &Settings) -> Result<ExitCode, CliError> {
    let spec = resolve_run(s)?;
    match execute(&spec)? {
        Some((field, row)) => {
            if let Some(path) = &spec.snapshot_out {
                std::fs::write(path, codec::encode_field(&field))
                    .map_err(|e| CliError::Other(format!("writing {}: {e}", path.display())))?;
            }
            if let Some(path) = &spec.report_out {
                crate::report::write_csv(path, &[CSV_HEADER.to_string(), row.to_csv()])
                    .map_err(|e| CliError::Other(format!("writing {}: {e}", path.display())))?;
            }
            println!("{CSV_HEADER}");
            println!("{}", row.to_csv());
            Ok(ExitCode::SUCCESS)
        }
        // Non-root ranks of a tcp run only contribute their block.
        None => Ok(ExitCode::SUCCESS),
    }
}

fn report_row(spec: &RunSpec, report: &EngineReport) -> ReportRow {
    let (messages_per_rank, bytes_per_rank) = per_rank_messages(report);
    ReportRow {
        kernel: spec.kernel_name.clone(),
        engine: spec.engine.name(),
        px: spec.topo.px(),
        py: spec.topo.py(),
        n: spec.topo.n(),
        tau_us: spec.tau.as_secs_f64() * 1e6,
        substeps: spec.substeps,
        us_per_substep: report.seconds_per_substep() * 1e6,
        messages_per_rank,
        bytes_per_rank,
    }
}

pub(crate) fn rank_grids(spec: &RunSpec, arity: usize) -> Result<Vec<Grid>, CliError> {
    let init = spec.init_fn()?;
    spec.topo
        .ranks()
        .map(|r| {
            init_grid(&spec.topo, r, arity, &init).map_err(|e| CliError::Usage(e.to_string()))
        })
        .collect()
}

pub(crate) fn execute(spec: &RunSpec) -> Result<Option<(GlobalField, ReportRow)>, CliError> {
    let kernel = spec.stencil()?;
    let arity0 = kernel.arity(0);
    match (spec.engine, spec.transport) {
        (EngineKind::Serial, _) => {
            let init = spec.init_fn()?;
            let field = init_global(&spec.topo, arity0, &init)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let started = Instant::now();
            let out = serial_reference(kernel.as_ref(), field, spec.substeps)?;
            let report = EngineReport {
                substeps_advanced: spec.substeps,
                wall_time: started.elapsed(),
                ranks: vec![],
            };
            Ok(Some((out, report_row(spec, &report))))
        }
        (engine, TransportKind::InProc) => {
            let grids = rank_grids(spec, arity0)?;
            let net = InProcNet::with_timeout(&spec.topo, spec.tau, spec.timeout);
            let (grids, report, shift) = match engine {
                EngineKind::Classic => {
                    let (g, r) =
                        run_classic(kernel.as_ref(), &spec.topo, &net, grids, spec.substeps)?;
                    (g, r, (0, 0))
                }
                EngineKind::Swept => {
                    run_swept(kernel.as_ref(), &spec.topo, &net, grids, spec.cycles)?
                }
                EngineKind::Serial => unreachable!(),
            };
            let field = gather(&spec.topo, &grids, shift)?;
            Ok(Some((field, report_row(spec, &report))))
        }
        (engine, TransportKind::Tcp) => execute_tcp(spec, engine, kernel.as_ref(), arity0),
    }
}

fn execute_tcp(
    spec: &RunSpec,
    engine: EngineKind,
    kernel: &(dyn swept2d_core::grid::Stencil + Send + Sync),
    arity0: usize,
) -> Result<Option<(GlobalField, ReportRow)>, CliError> {
    let roster_path = spec.roster.as_ref().expect("validated in resolve");
    let text = std::fs::read_to_string(roster_path)
        .map_err(|e| CliError::Usage(format!("roster {}: {e}", roster_path.display())))?;
    let roster = parse_roster(&text).map_err(|e| CliError::Usage(e.to_string()))?;
    if roster.len() != spec.topo.rank_count() {
        return Err(CliError::Usage(format!(
            "roster has {} ranks, topology needs {}",
            roster.len(),
            spec.topo.rank_count()
        )));
    }
    for entry in &roster {
        if !spec.topo.contains(entry.rank)
            || spec.topo.rank_index(entry.rank) != entry.index as usize
        {
            return Err(CliError::Usage(format!(
                "roster rank {} at index {} does not match the row-major topology order",
                entry.rank, entry.index
            )));
        }
    }
    let my_index = spec.rank_index.ok_or_else(|| {
        CliError::Usage("tcp transport requires this process's rank (run.rank / --rank)".into())
    })?;
    let my_rank = spec.topo.rank_at(my_index as usize);
    let endpoint = TcpEndpoint::establish(my_index, &roster, spec.tau, spec.timeout)
        .map_err(|e| CliError::Transport(e.to_string()))?;

    let init = spec.init_fn()?;
    let grid = init_grid(&spec.topo, my_rank, arity0, &init)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let started = Instant::now();
    let (out, rank_report) = match engine {
        EngineKind::Classic => {
            run_classic_rank(kernel, &spec.topo, &endpoint, my_rank, grid, spec.substeps)?
        }
        EngineKind::Swept => run_swept_rank(
            kernel,
            &spec.topo,
            &endpoint,
            my_rank,
            grid,
            2 * spec.cycles,
            SweptOptions::default(),
        )?,
        EngineKind::Serial => {
            return Err(CliError::Usage(
                "serial engine does not use a transport".into(),
            ))
        }
    };
    let wall_time = started.elapsed();

    if my_index != 0 {
        endpoint
            .send(spec.topo.rank_at(0), GATHER_TAG, codec::encode_grid(&out))
            .map_err(|e| CliError::Transport(e.to_string()))?;
        return Ok(None);
    }
    let mut grids = vec![out];
    for entry in roster.iter().filter(|e| e.index != 0) {
        let bytes = endpoint
            .recv(entry.rank, GATHER_TAG)
            .map_err(|e| CliError::Transport(e.to_string()))?;
        grids.push(codec::decode_grid(&bytes).map_err(|e| CliError::Transport(e.to_string()))?);
    }
    let field = gather(&spec.topo, &grids, (0, 0))?;
    let report = EngineReport {
        substeps_advanced: spec.substeps,
        wall_time,
        ranks: vec![rank_report],
    };
    Ok(Some((field, report_row(spec, &report))))
}
