//! Classic space-only decomposition: every sub-step each rank refreshes a
//! one-cell halo with a two-phase, four-message exchange, then advances its
//! interior.
//!
//! Phase 1 trades the bare east/west edge columns. Phase 2 trades the
//! north/south edge rows extended by the just-received corner halo cells, so
//! diagonal values arrive without extra messages. Exchanges with a
//! self-neighbor (single-rank axes) short-circuit in memory and send
//! nothing.

use super::{gather_reports, run_workers, EngineError, EngineReport, RankReport};
use crate::components::geometry::Rect;
use crate::components::{advance, Scratch};
use crate::grid::{Compass, Direction, Grid, RankCoord, Stencil, Topology};
use crate::transport::{codec, make_tag, Network, Transport};
use std::time::Instant;

/// Advance every rank `substeps` sub-steps with per-sub-step halo exchange.
/// The gathered result is bitwise identical to the serial reference.
pub fn run_classic(
    prog: &dyn Stencil,
    topo: &Topology,
    net: &dyn Network,
    grids: Vec<Grid>,
    substeps: u64,
) -> Result<(Vec<Grid>, EngineReport), EngineError> {
    let started = Instant::now();
    let results = run_workers(topo, net, grids, |rank, endpoint, grid| {
        run_classic_rank(prog, topo, endpoint.as_ref(), rank, grid, substeps)
    })?;
    Ok(gather_reports(results, substeps, started.elapsed()))
}

/// Drive a single rank; the entry point for one-rank-per-process runs.
pub fn run_classic_rank(
    prog: &dyn Stencil,
    topo: &Topology,
    endpoint: &dyn Transport,
    rank: RankCoord,
    grid: Grid,
    substeps: u64,
) -> Result<(Grid, RankReport), EngineError> {
    let n = topo.n();
    let t0 = grid.step();
    if grid.arity() != prog.arity(t0) {
        return Err(EngineError::Protocol {
            rank,
            detail: format!(
                "grid arity {} does not match kernel arity {} at sub-step {t0}",
                grid.arity(),
                prog.arity(t0)
            ),
        });
    }
    let west = topo.neighbor(rank, Compass::W);
    let east = topo.neighbor(rank, Compass::E);
    let north = topo.neighbor(rank, Compass::N);
    let south = topo.neighbor(rank, Compass::S);

    let mut report = RankReport {
        rank,
        ..RankReport::default()
    };
    let mut halo = Scratch::from_grid(&grid);
    let ni = n as i64;

    for s in 0..substeps {
        let t = t0 + s;
        let arity = prog.arity(t);

        // Phase 1: east/west edge columns, nothing extra.
        let col = |h: &Scratch, x: i64| -> Vec<f64> {
            let mut v = Vec::with_capacity(n * arity);
            for y in 0..ni {
                v.extend_from_slice(h.cell(x, y));
            }
            v
        };
        if west == rank {
            let east_col = col(&halo, ni - 1);
            let west_col = col(&halo, 0);
            put_col(&mut halo, -1, &east_col, arity);
            put_col(&mut halo, ni, &west_col, arity);
        } else {
            endpoint
                .send(
                    west,
                    make_tag(t, 1, Direction::West),
                    codec::encode_values(&col(&halo, 0)),
                )
                .map_err(|source| EngineError::Transport { rank, source })?;
            endpoint
                .send(
                    east,
                    make_tag(t, 1, Direction::East),
                    codec::encode_values(&col(&halo, ni - 1)),
                )
                .map_err(|source| EngineError::Transport { rank, source })?;
            let from_west = recv_values(endpoint, rank, west, make_tag(t, 1, Direction::East), n * arity, &mut report)?;
            let from_east = recv_values(endpoint, rank, east, make_tag(t, 1, Direction::West), n * arity, &mut report)?;
            put_col(&mut halo, -1, &from_west, arity);
            put_col(&mut halo, ni, &from_east, arity);
            report.comm_rounds += 1;
        }

        // Phase 2: north/south edge rows extended by the received corners.
        let row = |h: &Scratch, y: i64| -> Vec<f64> {
            let mut v = Vec::with_capacity((n + 2) * arity);
            for x in -1..=ni {
                v.extend_from_slice(h.cell(x, y));
            }
            v
        };
        if north == rank {
            let south_row = row(&halo, ni - 1);
            let north_row = row(&halo, 0);
            put_row(&mut halo, -1, &south_row, arity);
            put_row(&mut halo, ni, &north_row, arity);
        } else {
            endpoint
                .send(
                    north,
                    make_tag(t, 2, Direction::North),
                    codec::encode_values(&row(&halo, 0)),
                )
                .map_err(|source| EngineError::Transport { rank, source })?;
            endpoint
                .send(
                    south,
                    make_tag(t, 2, Direction::South),
                    codec::encode_values(&row(&halo, ni - 1)),
                )
                .map_err(|source| EngineError::Transport { rank, source })?;
            let from_north = recv_values(endpoint, rank, north, make_tag(t, 2, Direction::South), (n + 2) * arity, &mut report)?;
            let from_south = recv_values(endpoint, rank, south, make_tag(t, 2, Direction::North), (n + 2) * arity, &mut report)?;
            put_row(&mut halo, -1, &from_north, arity);
            put_row(&mut halo, ni, &from_south, arity);
            report.comm_rounds += 1;
        }

        let compute_started = Instant::now();
        let mut next = Scratch::new(n, prog.arity(t + 1));
        advance(prog, t, &halo, &mut next, Rect::new(0, 0, n, n))
            .map_err(|source| EngineError::Compute { rank, source })?;
        halo = next;
        report.compute += compute_started.elapsed();
        report.substeps_advanced += 1;
    }

    let out = halo.to_grid(t0 + substeps)?;
    finish_report(&mut report, endpoint);
    Ok((out, report))
}

fn put_col(halo: &mut Scratch, x: i64, values: &[f64], arity: usize) {
    for (y, chunk) in values.chunks_exact(arity).enumerate() {
        halo.cell_mut(x, y as i64).copy_from_slice(chunk);
    }
}

fn put_row(halo: &mut Scratch, y: i64, values: &[f64], arity: usize) {
    for (i, chunk) in values.chunks_exact(arity).enumerate() {
        halo.cell_mut(i as i64 - 1, y).copy_from_slice(chunk);
    }
}

fn recv_values(
    endpoint: &dyn Transport,
    rank: RankCoord,
    src: RankCoord,
    tag: u32,
    expected: usize,
    report: &mut RankReport,
) -> Result<Vec<f64>, EngineError> {
    let waited = Instant::now();
    let bytes = endpoint
        .recv(src, tag)
        .map_err(|source| EngineError::Transport { rank, source })?;
    report.comm_wait += waited.elapsed();
    codec::decode_values(&bytes, expected).map_err(|e| EngineError::Protocol {
        rank,
        detail: format!("halo from {src}: {e}"),
    })
}

pub(super) fn finish_report(report: &mut RankReport, endpoint: &dyn Transport) {
    let c = endpoint.counters();
    report.messages_sent = c.messages_sent;
    report.messages_received = c.messages_received;
    report.bytes_sent = c.bytes_sent;
    report.bytes_received = c.bytes_received;
}
