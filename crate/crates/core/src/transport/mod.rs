//! Message transports with latency injection, the byte-exact panel codec,
//! and traffic counters.
//!
//! A transport provides reliable, per-(src, dest, tag) FIFO delivery with
//! blocking receive. Latency injection happens on the delivery path: a
//! message becomes visible to `recv` no earlier than its send time plus the
//! configured one-way latency, so a ping-pong costs two latencies and
//! messages sent concurrently mature concurrently.

pub mod codec;
pub mod inproc;
pub mod tcp;

pub use inproc::InProcNet;
pub use tcp::{parse_roster, RosterEntry, TcpEndpoint, TcpNet};

use crate::grid::{Direction, RankCoord};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};
use thiserror::Error;

/// OS timers on some hosts round timed waits up to a millisecond or more,
/// which would distort injected sub-millisecond latencies badly. Sleep
/// through all but the tail of the wait, then spin (yielding, so
/// oversubscribed rank workers still progress) for the final stretch.
pub(crate) fn precise_sleep_until(deadline: Instant) {
    const SPIN_WINDOW: Duration = Duration::from_millis(3);
    loop {
        let now = Instant::now();
        if now >= deadline {
            return;
        }
        let remaining = deadline - now;
        if remaining > SPIN_WINDOW {
            std::thread::sleep(remaining - SPIN_WINDOW);
        } else {
            std::thread::yield_now();
        }
    }
}

pub type Tag = u32;

/// Encode (sequence, phase, direction) into a tag so out-of-phase messages
/// are detectable. The sequence is a sub-step for the classic engine and a
/// half-cycle index for the swept engine; the phase distinguishes exchange
/// rounds within a sequence point.
pub fn make_tag(seq: u64, phase: u8, dir: Direction) -> Tag {
    (((seq % (1 << 24)) as u32) << 8) | ((phase as u32 & 0xF) << 4) | dir.code() as u32
}

#[derive(Debug, Error)]
pub enum TransportError {
    #[error("timeout after {waited:?} waiting for message from rank {src} tag {tag:#x}")]
    Timeout {
        src: RankCoord,
        tag: Tag,
        waited: Duration,
    },
    #[error("peer closed: {0}")]
    Closed(String),
    #[error("transport i/o: {0}")]
    Io(String),
    #[error("unknown rank {0}")]
    UnknownRank(RankCoord),
}

/// Monotone per-endpoint traffic counters.
#[derive(Debug, Default)]
pub struct Counters {
    messages_sent: AtomicU64,
    messages_received: AtomicU64,
    bytes_sent: AtomicU64,
    bytes_received: AtomicU64,
    injected_delay_nanos: AtomicU64,
}

impl Counters {
    pub fn on_send(&self, bytes: usize) {
        self.messages_sent.fetch_add(1, Ordering::Relaxed);
        self.bytes_sent.fetch_add(bytes as u64, Ordering::Relaxed);
    }

    pub fn on_recv(&self, bytes: usize, injected: Duration) {
        self.messages_received.fetch_add(1, Ordering::Relaxed);
        self.bytes_received.fetch_add(bytes as u64, Ordering::Relaxed);
        self.injected_delay_nanos
            .fetch_add(injected.as_nanos() as u64, Ordering::Relaxed);
    }

    pub fn snapshot(&self) -> CounterSnapshot {
        CounterSnapshot {
            messages_sent: self.messages_sent.load(Ordering::Relaxed),
            messages_received: self.messages_received.load(Ordering::Relaxed),
            bytes_sent: self.bytes_sent.load(Ordering::Relaxed),
            bytes_received: self.bytes_received.load(Ordering::Relaxed),
            injected_delay: Duration::from_nanos(
                self.injected_delay_nanos.load(Ordering::Relaxed),
            ),
        }
    }
}

/// Point-in-time copy of an endpoint's counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CounterSnapshot {
    pub messages_sent: u64,
    pub messages_received: u64,
    pub bytes_sent: u64,
    pub bytes_received: u64,
    pub injected_delay: Duration,
}

/// One rank's handle onto a transport. A single endpoint is driven by one
/// rank worker; distinct endpoints may be used concurrently.
pub trait Transport: Send {
    fn rank(&self) -> RankCoord;

    /// Buffered send: may complete before delivery.
    fn send(&self, dest: RankCoord, tag: Tag, payload: Vec<u8>) -> Result<(), TransportError>;

    /// Blocks until the matching message arrives or the transport's
    /// configured timeout elapses.
    fn recv(&self, src: RankCoord, tag: Tag) -> Result<Vec<u8>, TransportError>;

    fn counters(&self) -> CounterSnapshot;
}

/// A transport spanning all ranks in one process, handing out per-rank
/// endpoints for worker threads.
pub trait Network: Send + Sync {
    fn endpoint(&self, rank: RankCoord) -> Box<dyn Transport>;
}
