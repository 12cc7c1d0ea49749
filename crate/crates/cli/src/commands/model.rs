//! `swept2d model`: emit the analytic cost curve as CSV and report the
//! optimal subdomain size, both brute-force and analytic.

use crate::{config::Settings, CliError};
use std::path::PathBuf;
use std::process::ExitCode;
use swept2d_core::model::{model_curve, optimal_n, s_preset, tau_preset, S_PRESETS, TAU_PRESETS};

pub const MODEL_CSV_HEADER: &str = "n,s,tau,term_compute,term_latency,total";

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

pub fn cmd_model(s: &Settings) -> Result<ExitCode, CliError> {
    // Presets fill in whichever of s/tau is not given explicitly.
    let tau = match s.raw("model", "tau") {
        Some(_) => s.get_f64("model", "tau", 0.0).map_err(usage)?,
        None => match s.raw("model", "interconnect") {
            Some(name) => tau_preset(name).ok_or_else(|| {
                CliError::Usage(format!(
                    "interconnect must be one of {:?}, got {name:?}",
                    TAU_PRESETS.map(|(k, _)| k)
                ))
            })?,
            None => tau_preset("ec2").unwrap(),
        },
    };
    let s_value = match s.raw("model", "s") {
        Some(_) => s.get_f64("model", "s", 0.0).map_err(usage)?,
        None => match s.raw("model", "compute") {
            Some(name) => s_preset(name).ok_or_else(|| {
                CliError::Usage(format!(
                    "compute must be one of {:?}, got {name:?}",
                    S_PRESETS.map(|(k, _)| k)
                ))
            })?,
            None => s_preset("fv-thread").unwrap(),
        },
    };
    let n_min = s.get_usize("model", "n_min", 4).map_err(usage)?;
    let n_max = s.get_usize("model", "n_max", 1024).map_err(usage)?;
    let optimum = optimal_n(s_value, tau, n_min, n_max).map_err(usage)?;

    let mut rows = vec![MODEL_CSV_HEADER.to_string()];
    for p in model_curve(s_value, tau, n_min, n_max) {
        rows.push(format!(
            "{},{:e},{:e},{:e},{:e},{:e}",
            p.n, p.s, p.tau, p.term_compute, p.term_latency, p.total
        ));
    }
    match s.raw("model", "out").map(PathBuf::from) {
        Some(path) => {
            crate::report::write_csv(&path, &rows)
                .map_err(|e| CliError::Other(format!("writing {}: {e}", path.display())))?;
            println!("model curve written to {}", path.display());
        }
        None => {
            for row in &rows {
                println!("{row}");
            }
        }
    }
    println!(
        "optimal_n {} cost_s {:e} stationary {:.2} tau_s {:e} s {:e}",
        optimum.n, optimum.cost, optimum.stationary, tau, s_value
    );
    Ok(ExitCode::SUCCESS)
}
