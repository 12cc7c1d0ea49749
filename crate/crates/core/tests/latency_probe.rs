//! Manual diagnostics for injected-latency timing; run with --ignored.

use std::time::{Duration, Instant};
use swept2d_core::engines::run_swept;
use swept2d_core::grid::{init_grid, StateVector, Topology};
use swept2d_core::kernels::Increment;
use swept2d_core::transport::{InProcNet, Network};

#[test]
#[ignore]
fn probe_round_timing() {
    let topo = Topology::new(2, 2, 8).unwrap();
    let tau = Duration::from_millis(1);
    let net = InProcNet::new(&topo, tau);
    let grids: Vec<_> = topo
        .ranks()
        .map(|r| init_grid(&topo, r, 1, &|_, _| StateVector(vec![1.0])).unwrap())
        .collect();
    let started = Instant::now();
    let (_, report, _) = run_swept(&Increment, &topo, &net, grids, 4).unwrap();
    println!("wall {:?} for 4 cycles (expect ~16ms + spawn)", started.elapsed());
    for r in &report.ranks {
        println!(
            "rank {}: rounds {} wait {:?} compute {:?} up {:?} long {:?} lat {:?} down {:?}",
            r.rank,
            r.comm_rounds,
            r.comm_wait,
            r.compute,
            r.components.upward,
            r.components.longitudinal,
            r.components.latitudinal,
            r.components.downward
        );
    }
}

#[test]
#[ignore]
fn probe_ping_pong() {
    let topo = Topology::new(2, 1, 4).unwrap();
    let tau = Duration::from_millis(1);
    let net = InProcNet::new(&topo, tau);
    let a = net.endpoint(topo.rank_at(0));
    let b = net.endpoint(topo.rank_at(1));
    let legs = 20;
    let h = std::thread::spawn(move || {
        for _ in 0..legs {
            let m = b.recv(swept2d_core::grid::RankCoord::new(0, 0), 1).unwrap();
            b.send(swept2d_core::grid::RankCoord::new(0, 0), 2, m).unwrap();
        }
    });
    let started = Instant::now();
    for _ in 0..legs {
        a.send(swept2d_core::grid::RankCoord::new(1, 0), 1, vec![0u8; 64])
            .unwrap();
        a.recv(swept2d_core::grid::RankCoord::new(1, 0), 2).unwrap();
    }
    let elapsed = started.elapsed();
    h.join().unwrap();
    println!(
        "{legs} ping-pongs at tau=1ms took {elapsed:?} ({:?} per leg, expect ~1ms)",
        elapsed / (2 * legs)
    );
}

#[test]
#[ignore]
fn probe_classic_timing() {
    let topo = Topology::new(2, 2, 8).unwrap();
    let tau = Duration::from_millis(1);
    let net = InProcNet::new(&topo, tau);
    let grids: Vec<_> = topo
        .ranks()
        .map(|r| init_grid(&topo, r, 1, &|_, _| StateVector(vec![1.0])).unwrap())
        .collect();
    let started = Instant::now();
    let (_, report) = swept2d_core::engines::run_classic(&Increment, &topo, &net, grids, 16).unwrap();
    println!(
        "classic wall {:?} for 16 substeps (expect ~32ms + spawn)",
        started.elapsed()
    );
    for r in report.ranks.iter().take(1) {
        println!(
            "rank {}: rounds {} wait {:?} compute {:?}",
            r.rank, r.comm_rounds, r.comm_wait, r.compute
        );
    }
}
