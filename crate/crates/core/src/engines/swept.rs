//! The swept engine: advances every rank a half cycle at a time through
//! upward pyramid, bridges, and downward pyramid, with two panel-exchange
//! rounds per half cycle.
//!
//! Half cycle A sends the north and west panels (pyramid panels in round 1,
//! bridge panels in round 2) and receives their counterparts from the south
//! and east; the rank's downward pyramid then covers the region straddling
//! its original south-east corner, shifting ownership by (+n/2, +n/2) in
//! global coordinates. Half cycle B mirrors the exchange southward and
//! eastward and shifts ownership back. A full cycle advances exactly n
//! sub-steps, restores shift (0, 0), and costs four communication rounds
//! (eight panel messages) per rank; exchanges with a self-neighbor
//! short-circuit in memory.

use super::classic::finish_report;
use super::{gather_reports, run_workers, EngineError, EngineReport, RankReport};
use crate::components::{
    downward_pyramid, latitudinal_bridge, longitudinal_bridge, upward_pyramid,
};
use crate::grid::{
    Compass, Direction, Grid, Orientation, Panel, RankCoord, Stencil, Topology,
};
use crate::transport::{codec, make_tag, Network, Transport};
use std::time::Instant;

/// Deliberate mis-wirings used as negative controls by the verifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaultInjection {
    /// Swap the two longitudinal bridge outputs' values while keeping their
    /// metadata, producing silently wrong fields the oracle check must catch.
    SwapBridgeOutputs,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SweptOptions {
    pub fault: Option<FaultInjection>,
}

/// Run whole swept cycles (two half cycles each); the returned shift is
/// always (0, 0).
pub fn run_swept(
    prog: &dyn Stencil,
    topo: &Topology,
    net: &dyn Network,
    grids: Vec<Grid>,
    cycles: u64,
) -> Result<(Vec<Grid>, EngineReport, (usize, usize)), EngineError> {
    run_swept_halves(prog, topo, net, grids, 2 * cycles, SweptOptions::default())
}

/// Run a number of half cycles. Odd counts leave the domain shifted by
/// (n/2, n/2); [`super::gather`] undoes the shift.
pub fn run_swept_halves(
    prog: &dyn Stencil,
    topo: &Topology,
    net: &dyn Network,
    grids: Vec<Grid>,
    halves: u64,
    options: SweptOptions,
) -> Result<(Vec<Grid>, EngineReport, (usize, usize)), EngineError> {
    let started = Instant::now();
    let results = run_workers(topo, net, grids, |rank, endpoint, grid| {
        run_swept_rank(prog, topo, endpoint.as_ref(), rank, grid, halves, options)
    })?;
    let substeps = halves * (topo.n() as u64 / 2);
    let shift = if halves % 2 == 1 {
        (topo.n() / 2, topo.n() / 2)
    } else {
        (0, 0)
    };
    let (grids, report) = gather_reports(results, substeps, started.elapsed());
    Ok((grids, report, shift))
}

/// Drive a single rank through `halves` half cycles; the entry point for
/// one-rank-per-process runs.
pub fn run_swept_rank(
    prog: &dyn Stencil,
    topo: &Topology,
    endpoint: &dyn Transport,
    rank: RankCoord,
    grid: Grid,
    halves: u64,
    options: SweptOptions,
) -> Result<(Grid, RankReport), EngineError> {
    let mut report = RankReport {
        rank,
        ..RankReport::default()
    };
    let mut grid = grid;
    for half in 0..halves {
        grid = run_half_cycle(
            prog, topo, endpoint, rank, grid, half, options, &mut report,
        )?;
        report.substeps_advanced += topo.n() as u64 / 2;
    }
    finish_report(&mut report, endpoint);
    Ok((grid, report))
}

/// Trade two panels with the round's two neighbors: both sends go out
/// before either receive so the round costs a single latency.
/// Self-exchanges return the panel unsent.
#[allow(clippy::too_many_arguments)]
fn exchange_round(
    endpoint: &dyn Transport,
    prog: &dyn Stencil,
    rank: RankCoord,
    dests: (RankCoord, RankCoord),
    srcs: (RankCoord, RankCoord),
    tags: (u32, u32),
    panels: (Panel, Panel),
    report: &mut RankReport,
) -> Result<(Panel, Panel), EngineError> {
    let transport_err = |source| EngineError::Transport { rank, source };
    let a_is_real = dests.0 != rank;
    let b_is_real = dests.1 != rank;
    if a_is_real {
        endpoint
            .send(dests.0, tags.0, codec::encode_panel(&panels.0))
            .map_err(transport_err)?;
    }
    if b_is_real {
        endpoint
            .send(dests.1, tags.1, codec::encode_panel(&panels.1))
            .map_err(transport_err)?;
    }
    if a_is_real || b_is_real {
        report.comm_rounds += 1;
    }
    let waited = Instant::now();
    let recv_one = |src: RankCoord,
                    tag: u32,
                    sent: &Panel|
     -> Result<Panel, EngineError> {
        let bytes = endpoint
            .recv(src, tag)
            .map_err(|source| EngineError::Transport { rank, source })?;
        let received =
            codec::decode_panel_with_arity(&bytes, |step| prog.arity(step)).map_err(|e| {
                EngineError::Protocol {
                    rank,
                    detail: format!("panel from {src}: {e}"),
                }
            })?;
        let expected = (sent.direction, sent.orientation, sent.n, sent.start_step);
        let got = (
            received.direction,
            received.orientation,
            received.n,
            received.start_step,
        );
        if got != expected {
            return Err(EngineError::Protocol {
                rank,
                detail: format!("panel from {src}: expected {expected:?}, got {got:?}"),
            });
        }
        Ok(received)
    };
    let recv_a = if a_is_real {
        recv_one(srcs.0, tags.0, &panels.0)?
    } else {
        panels.0
    };
    let recv_b = if b_is_real {
        recv_one(srcs.1, tags.1, &panels.1)?
    } else {
        panels.1
    };
    report.comm_wait += waited.elapsed();
    Ok((recv_a, recv_b))
}

#[allow(clippy::too_many_arguments)]
fn run_half_cycle(
    prog: &dyn Stencil,
    topo: &Topology,
    endpoint: &dyn Transport,
    rank: RankCoord,
    grid: Grid,
    half: u64,
    options: SweptOptions,
    report: &mut RankReport,
) -> Result<Grid, EngineError> {
    let compute = |source| EngineError::Compute { rank, source };
    let north = topo.neighbor(rank, Compass::N);
    let south = topo.neighbor(rank, Compass::S);
    let west = topo.neighbor(rank, Compass::W);
    let east = topo.neighbor(rank, Compass::E);
    let northward = half % 2 == 0;

    let t = Instant::now();
    let up = upward_pyramid(prog, &grid).map_err(compute)?;
    report.components.upward += t.elapsed();

    // Round 1: trade pyramid panels with the two downstream neighbors.
    let (sent_a, sent_b, keep_a, keep_b, dest_ab, src_ab);
    if northward {
        (sent_a, sent_b) = (up.north, up.west);
        (keep_a, keep_b) = (up.south, up.east);
        dest_ab = (north, west);
        src_ab = (south, east);
    } else {
        (sent_a, sent_b) = (up.south, up.east);
        (keep_a, keep_b) = (up.north, up.west);
        dest_ab = (south, east);
        src_ab = (north, west);
    }
    let tags = (
        make_tag(half, 1, sent_a.direction),
        make_tag(half, 1, sent_b.direction),
    );
    let (recv_a, recv_b) = exchange_round(
        endpoint,
        prog,
        rank,
        dest_ab,
        src_ab,
        tags,
        (sent_a, sent_b),
        report,
    )?;

    // Bridges: the valley's north wall is always the South panel of the
    // pyramid north of it, and so on around the compass.
    let t = Instant::now();
    let (mut w_d, mut e_d) = if northward {
        longitudinal_bridge(prog, &keep_a, &recv_a).map_err(compute)?
    } else {
        longitudinal_bridge(prog, &recv_a, &keep_a).map_err(compute)?
    };
    report.components.longitudinal += t.elapsed();
    let t = Instant::now();
    let (n_d, s_d) = if northward {
        latitudinal_bridge(prog, &keep_b, &recv_b).map_err(compute)?
    } else {
        latitudinal_bridge(prog, &recv_b, &keep_b).map_err(compute)?
    };
    report.components.latitudinal += t.elapsed();

    if options.fault == Some(FaultInjection::SwapBridgeOutputs) {
        let (wl, el) = (w_d.levels().to_vec(), e_d.levels().to_vec());
        w_d = Panel::from_levels(Direction::West, Orientation::Downward, w_d.n, w_d.start_step, el)?;
        e_d = Panel::from_levels(Direction::East, Orientation::Downward, e_d.n, e_d.start_step, wl)?;
    }

    // Round 2: trade bridge panels the same way.
    let (sent_c, sent_d, keep_c, keep_d);
    if northward {
        (sent_c, sent_d) = (n_d, w_d);
        (keep_c, keep_d) = (s_d, e_d);
    } else {
        (sent_c, sent_d) = (s_d, e_d);
        (keep_c, keep_d) = (n_d, w_d);
    }
    let tags = (
        make_tag(half, 2, sent_c.direction),
        make_tag(half, 2, sent_d.direction),
    );
    let (recv_c, recv_d) = exchange_round(
        endpoint,
        prog,
        rank,
        dest_ab,
        src_ab,
        tags,
        (sent_c, sent_d),
        report,
    )?;

    // Downward pyramid walls: each wall panel's direction points from its
    // producing bridge toward this pyramid.
    let t = Instant::now();
    let out = if northward {
        downward_pyramid(prog, &keep_c, &recv_c, &keep_d, &recv_d).map_err(compute)?
    } else {
        downward_pyramid(prog, &recv_c, &keep_c, &recv_d, &keep_d).map_err(compute)?
    };
    report.components.downward += t.elapsed();
    Ok(out)
}
