//! Engine-level oracle tests: classic and swept runs gathered back to the
//! global field must be bitwise identical to the serial reference, message
//! counters must match the exchange pattern exactly, and the mid-cycle
//! domain shift must land where gather expects it.

use std::time::Duration;
use swept2d_core::engines::{
    gather, run_classic, run_swept, run_swept_halves, serial_reference, FaultInjection,
    SweptOptions,
};
use swept2d_core::grid::{init_global, init_grid, Grid, StateVector, Topology};
use swept2d_core::kernels::{seeded_scalar_init, Increment, Wave, WaveConfig};
use swept2d_core::testkit::RandomLinear;
use swept2d_core::transport::InProcNet;

fn rank_grids(
    topo: &Topology,
    arity: usize,
    init: &dyn Fn(u64, u64) -> StateVector,
) -> Vec<Grid> {
    topo.ranks()
        .map(|r| init_grid(topo, r, arity, init).unwrap())
        .collect()
}

fn net(topo: &Topology) -> InProcNet {
    InProcNet::with_timeout(topo, Duration::ZERO, Duration::from_secs(20))
}

#[test]
fn classic_increment_2x2() {
    let topo = Topology::new(2, 2, 8).unwrap();
    let grids = rank_grids(&topo, 1, &|_, _| StateVector(vec![1.0]));
    let (out, report) = run_classic(&Increment, &topo, &net(&topo), grids, 8).unwrap();
    let field = gather(&topo, &out, (0, 0)).unwrap();
    assert!(field.values().iter().all(|&v| v == 9.0));
    for r in &report.ranks {
        assert_eq!(r.messages_sent, 4 * 8, "4 messages per sub-step");
        assert_eq!(r.messages_received, 4 * 8);
        assert_eq!(r.comm_rounds, 2 * 8);
    }
}

#[test]
fn classic_single_rank_sends_nothing() {
    let topo = Topology::new(1, 1, 8).unwrap();
    let grids = rank_grids(&topo, 1, &seeded_scalar_init(1, 3));
    let (out, report) = run_classic(&Increment, &topo, &net(&topo), grids, 5).unwrap();
    assert_eq!(report.ranks[0].messages_sent, 0);
    assert_eq!(report.ranks[0].comm_rounds, 0);
    let field = gather(&topo, &out, (0, 0)).unwrap();
    assert_eq!(field.step(), 5);
}

#[test]
fn classic_matches_oracle_wave_3x3() {
    let topo = Topology::new(3, 3, 8).unwrap();
    let wave = Wave::new(WaveConfig::default());
    let cfg = WaveConfig::default();
    let (w, h) = (topo.global_width(), topo.global_height());
    let init = move |i: u64, j: u64| cfg.pulse_init(w, h, i, j);
    let grids = rank_grids(&topo, 2, &init);
    let reference = serial_reference(
        &wave,
        init_global(&topo, 2, &init).unwrap(),
        24,
    )
    .unwrap();
    let (out, _) = run_classic(&wave, &topo, &net(&topo), grids, 24).unwrap();
    let field = gather(&topo, &out, (0, 0)).unwrap();
    assert_eq!(field.values(), reference.values());
}

#[test]
fn swept_increment_one_cycle_advances_n_levels() {
    let topo = Topology::new(2, 2, 8).unwrap();
    let grids = rank_grids(&topo, 1, &|_, _| StateVector(vec![1.0]));
    let (out, report, shift) = run_swept(&Increment, &topo, &net(&topo), grids, 1).unwrap();
    assert_eq!(shift, (0, 0));
    assert_eq!(report.substeps_advanced, 8);
    let field = gather(&topo, &out, shift).unwrap();
    assert_eq!(field.step(), 8);
    assert!(field.values().iter().all(|&v| v == 9.0));
    // Four communication rounds per cycle, two panel messages each.
    for r in &report.ranks {
        assert_eq!(r.comm_rounds, 4);
        assert_eq!(r.messages_sent, 8);
        assert_eq!(r.messages_received, 8);
    }
}

#[test]
fn swept_single_rank_short_circuits() {
    let topo = Topology::new(1, 1, 8).unwrap();
    let grids = rank_grids(&topo, 1, &seeded_scalar_init(1, 11));
    let prog = RandomLinear::scalar(2);
    let reference = serial_reference(
        &prog,
        init_global(&topo, 1, &seeded_scalar_init(1, 11)).unwrap(),
        16,
    )
    .unwrap();
    let (out, report, shift) = run_swept(&prog, &topo, &net(&topo), grids, 2).unwrap();
    assert_eq!(report.ranks[0].messages_sent, 0);
    assert_eq!(report.ranks[0].comm_rounds, 0);
    let field = gather(&topo, &out, shift).unwrap();
    assert_eq!(field.values(), reference.values());
}

#[test]
fn swept_matches_oracle_wave_three_cycles() {
    let topo = Topology::new(2, 2, 16).unwrap();
    let wave = Wave::new(WaveConfig::default());
    let cfg = WaveConfig::default();
    let (w, h) = (topo.global_width(), topo.global_height());
    let init = move |i: u64, j: u64| cfg.pulse_init(w, h, i, j);
    let grids = rank_grids(&topo, 2, &init);
    let reference = serial_reference(&wave, init_global(&topo, 2, &init).unwrap(), 48).unwrap();
    let (out, _, shift) = run_swept(&wave, &topo, &net(&topo), grids, 3).unwrap();
    let field = gather(&topo, &out, shift).unwrap();
    assert_eq!(field.values(), reference.values());
}

/// The shift-sign check: after one half cycle the gathered field must equal
/// the oracle at sub-step n/2. A spatially varying field under the identity
/// kernel pins the data rearrangement itself.
#[test]
fn half_cycle_shift_lands_where_gather_expects() {
    let topo = Topology::new(2, 2, 8).unwrap();
    let init = |i: u64, j: u64| StateVector(vec![i as f64 * 1000.0 + j as f64]);
    let grids = rank_grids(&topo, 1, &init);
    let prog = swept2d_core::kernels::Identity;
    let (out, _, shift) = run_swept_halves(
        &prog,
        &topo,
        &net(&topo),
        grids,
        1,
        SweptOptions::default(),
    )
    .unwrap();
    assert_eq!(shift, (4, 4));
    let field = gather(&topo, &out, shift).unwrap();
    let reference = serial_reference(&prog, init_global(&topo, 1, &init).unwrap(), 4).unwrap();
    assert_eq!(field.values(), reference.values());
}

#[test]
fn half_cycle_shift_with_computation() {
    let topo = Topology::new(3, 2, 8).unwrap();
    let prog = RandomLinear::scalar(77);
    let init = seeded_scalar_init(1, 21);
    let grids = rank_grids(&topo, 1, &init);
    let reference = serial_reference(&prog, init_global(&topo, 1, &init).unwrap(), 4).unwrap();
    let (out, _, shift) = run_swept_halves(
        &prog,
        &topo,
        &net(&topo),
        grids,
        1,
        SweptOptions::default(),
    )
    .unwrap();
    let field = gather(&topo, &out, shift).unwrap();
    assert_eq!(field.values(), reference.values());
}

#[test]
fn swept_varying_arity_kernel_over_transport() {
    // Panels with per-level arity schedules cross the wire intact.
    let topo = Topology::new(2, 2, 8).unwrap();
    let prog = RandomLinear::new(5, vec![2, 3]);
    let init = seeded_scalar_init(2, 9);
    let grids = rank_grids(&topo, 2, &init);
    let reference = serial_reference(&prog, init_global(&topo, 2, &init).unwrap(), 16).unwrap();
    let (out, _, shift) = run_swept(&prog, &topo, &net(&topo), grids, 2).unwrap();
    let field = gather(&topo, &out, shift).unwrap();
    assert_eq!(field.values(), reference.values());
}

#[test]
fn fault_injection_diverges_from_oracle() {
    let topo = Topology::new(2, 2, 8).unwrap();
    let init = seeded_scalar_init(1, 5);
    let prog = RandomLinear::scalar(1);
    let grids = rank_grids(&topo, 1, &init);
    let reference = serial_reference(&prog, init_global(&topo, 1, &init).unwrap(), 8).unwrap();
    let (out, _, shift) = run_swept_halves(
        &prog,
        &topo,
        &net(&topo),
        grids,
        2,
        SweptOptions {
            fault: Some(FaultInjection::SwapBridgeOutputs),
        },
    )
    .unwrap();
    let field = gather(&topo, &out, shift).unwrap();
    assert_ne!(
        field.values(),
        reference.values(),
        "mis-wired bridge panels must not reproduce the oracle"
    );
}

#[test]
fn swept_bytes_accounting() {
    // n=8, arity 1: each panel message is 28 + 40*8 = 348 bytes; eight panel
    // messages per rank per cycle.
    let topo = Topology::new(2, 2, 8).unwrap();
    let grids = rank_grids(&topo, 1, &|_, _| StateVector(vec![1.0]));
    let (_, report, _) = run_swept(&Increment, &topo, &net(&topo), grids, 1).unwrap();
    for r in &report.ranks {
        assert_eq!(r.bytes_sent, 8 * 348);
        assert_eq!(r.bytes_received, 8 * 348);
    }
}

#[test]
fn engines_agree_over_tcp_transport() {
    use swept2d_core::transport::{RosterEntry, TcpNet};
    let topo = Topology::new(2, 1, 8).unwrap();
    let roster: Vec<RosterEntry> = (0..2)
        .map(|index| {
            let l = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
            let port = l.local_addr().unwrap().port();
            drop(l);
            RosterEntry {
                index,
                rank: topo.rank_at(index as usize),
                host: "127.0.0.1".into(),
                port,
            }
        })
        .collect();
    let tcp = TcpNet::establish_local(&roster, Duration::ZERO, Duration::from_secs(10)).unwrap();
    let prog = RandomLinear::scalar(31);
    let init = seeded_scalar_init(1, 44);
    let grids = rank_grids(&topo, 1, &init);
    let reference = serial_reference(&prog, init_global(&topo, 1, &init).unwrap(), 8).unwrap();
    let (out, report, shift) = run_swept(&prog, &topo, &tcp, grids, 1).unwrap();
    let field = gather(&topo, &out, shift).unwrap();
    assert_eq!(field.values(), reference.values());
    // Only the west/east exchanges are real on a 2x1 topology.
    for r in &report.ranks {
        assert_eq!(r.messages_sent, 4);
    }
}
