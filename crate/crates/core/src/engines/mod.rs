//! Integration engines: the single-threaded serial reference, the classic
//! two-phase halo-exchange engine, and the swept engine, plus gather.
//!
//! All three engines produce bitwise-identical fields for any pure kernel;
//! the serial reference is the oracle the other two are verified against.

pub mod classic;
pub mod serial;
pub mod swept;

pub use classic::{run_classic, run_classic_rank};
pub use serial::{serial_reference, serial_trace};
pub use swept::{run_swept, run_swept_halves, run_swept_rank, FaultInjection, SweptOptions};

use crate::components::ComponentError;
use crate::grid::{GlobalField, Grid, GridError, RankCoord, Topology};
use crate::transport::{Network, Transport, TransportError};
use std::time::Duration;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("rank {rank}: {source}")]
    Compute {
        rank: RankCoord,
        #[source]
        source: ComponentError,
    },
    #[error("rank {rank}: {source}")]
    Transport {
        rank: RankCoord,
        #[source]
        source: TransportError,
    },
    #[error("rank {rank}: protocol: {detail}")]
    Protocol { rank: RankCoord, detail: String },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("numeric error at point ({x},{y}), sub-step {step}: {detail}")]
    Numeric {
        step: u64,
        x: u64,
        y: u64,
        detail: String,
    },
}

impl EngineError {
    pub fn is_transport(&self) -> bool {
        matches!(self, EngineError::Transport { .. })
    }

    pub fn is_numeric(&self) -> bool {
        match self {
            EngineError::Numeric { .. } => true,
            EngineError::Compute { source, .. } => {
                matches!(source, ComponentError::Numeric { .. })
            }
            _ => false,
        }
    }
}

/// Per-component compute seconds accumulated by the swept engine.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComponentTimes {
    pub upward: Duration,
    pub longitudinal: Duration,
    pub latitudinal: Duration,
    pub downward: Duration,
}

/// Exact per-rank counters for one engine run.
#[derive(Debug, Clone, Default)]
pub struct RankReport {
    pub rank: RankCoord,
    pub substeps_advanced: u64,
    /// Point-to-point transport messages; self-exchanges short-circuit in
    /// memory and are not counted.
    pub messages_sent: u64,
    pub messages_received: u64,
    pub bytes_sent: u64,
    pub bytes_received: u64,
    /// Latency-bearing communication rounds the rank waited on (each round
    /// may carry several messages sent concurrently).
    pub comm_rounds: u64,
    pub compute: Duration,
    pub comm_wait: Duration,
    pub components: ComponentTimes,
}

/// Aggregate over one engine run; counters are exact, not sampled.
#[derive(Debug, Clone, Default)]
pub struct EngineReport {
    pub substeps_advanced: u64,
    pub wall_time: Duration,
    pub ranks: Vec<RankReport>,
}

impl EngineReport {
    pub fn total_messages_sent(&self) -> u64 {
        self.ranks.iter().map(|r| r.messages_sent).sum()
    }

    pub fn total_bytes_sent(&self) -> u64 {
        self.ranks.iter().map(|r| r.bytes_sent).sum()
    }

    pub fn seconds_per_substep(&self) -> f64 {
        if self.substeps_advanced == 0 {
            0.0
        } else {
            self.wall_time.as_secs_f64() / self.substeps_advanced as f64
        }
    }
}

/// Run one worker thread per rank, each talking to the others only through
/// its transport endpoint. Results come back in rank order; the first error
/// wins.
pub(crate) fn run_workers<F>(
    topo: &Topology,
    net: &dyn Network,
    grids: Vec<Grid>,
    worker: F,
) -> Result<Vec<(Grid, RankReport)>, EngineError>
where
    F: Fn(RankCoord, Box<dyn Transport>, Grid) -> Result<(Grid, RankReport), EngineError> + Sync,
{
    if grids.len() != topo.rank_count() {
        return Err(GridError::Validation {
            field: "grids",
            detail: format!("expected {} grids, got {}", topo.rank_count(), grids.len()),
        }
        .into());
    }
    let worker = &worker;
    let joined: Vec<std::thread::Result<Result<(Grid, RankReport), EngineError>>> =
        std::thread::scope(|scope| {
            let handles: Vec<_> = topo
                .ranks()
                .zip(grids)
                .map(|(rank, grid)| {
                    let endpoint = net.endpoint(rank);
                    scope.spawn(move || worker(rank, endpoint, grid))
                })
                .collect();
            handles.into_iter().map(|h| h.join()).collect()
        });
    let mut results = Vec::with_capacity(joined.len());
    for (i, r) in joined.into_iter().enumerate() {
        match r {
            Ok(Ok(pair)) => results.push(pair),
            Ok(Err(e)) => return Err(e),
            Err(_) => {
                return Err(EngineError::Protocol {
                    rank: topo.rank_at(i),
                    detail: "rank worker panicked".into(),
                })
            }
        }
    }
    Ok(results)
}

pub(crate) fn gather_reports(
    results: Vec<(Grid, RankReport)>,
    substeps: u64,
    wall_time: Duration,
) -> (Vec<Grid>, EngineReport) {
    let mut grids = Vec::with_capacity(results.len());
    let mut ranks = Vec::with_capacity(results.len());
    for (grid, report) in results {
        grids.push(grid);
        ranks.push(report);
    }
    (
        grids,
        EngineReport {
            substeps_advanced: substeps,
            wall_time,
            ranks,
        },
    )
}

/// Assemble per-rank grids into a global field, cyclically un-shifting by
/// `shift` so output coordinates are original global coordinates.
pub fn gather(
    topo: &Topology,
    grids: &[Grid],
    shift: (usize, usize),
) -> Result<GlobalField, EngineError> {
    if grids.len() != topo.rank_count() {
        return Err(GridError::Validation {
            field: "grids",
            detail: format!("expected {} grids, got {}", topo.rank_count(), grids.len()),
        }
        .into());
    }
    let n = topo.n();
    let step = grids[0].step();
    let arity = grids[0].arity();
    for (i, g) in grids.iter().enumerate() {
        if g.step() != step || g.arity() != arity || g.n() != n {
            return Err(GridError::Contract(format!(
                "grid for rank {} disagrees: step {} arity {} n {} (expected {step}/{arity}/{n})",
                topo.rank_at(i),
                g.step(),
                g.arity(),
                g.n()
            ))
            .into());
        }
    }
    let (w, h) = (topo.global_width(), topo.global_height());
    let mut field = GlobalField::zeroed(w, h, step, arity);
    field.set_shift((0, 0));
    for rank in topo.ranks() {
        let grid = &grids[topo.rank_index(rank)];
        let x_base = rank.cx as usize * n + shift.0;
        let y_base = rank.cy as usize * n + shift.1;
        for ly in 0..n {
            let gy = (y_base + ly) % h;
            for lx in 0..n {
                let gx = (x_base + lx) % w;
                field.value_mut(gx, gy).copy_from_slice(grid.value(lx, ly));
            }
        }
    }
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{init_global, init_grid, StateVector};

    #[test]
    fn gather_reconstructs_init_exactly() {
        let topo = Topology::new(3, 2, 4).unwrap();
        let init = |i: u64, j: u64| StateVector(vec![i as f64 * 1000.0 + j as f64, -(i as f64)]);
        let grids: Vec<Grid> = topo
            .ranks()
            .map(|r| init_grid(&topo, r, 2, &init).unwrap())
            .collect();
        let gathered = gather(&topo, &grids, (0, 0)).unwrap();
        let direct = init_global(&topo, 2, &init).unwrap();
        assert_eq!(gathered.values(), direct.values());
    }

    #[test]
    fn gather_rejects_inconsistent_steps() {
        let topo = Topology::new(2, 1, 4).unwrap();
        let g0 = Grid::zeroed(4, 0, 1).unwrap();
        let g1 = Grid::zeroed(4, 1, 1).unwrap();
        assert!(gather(&topo, &[g0, g1], (0, 0)).is_err());
    }
}
