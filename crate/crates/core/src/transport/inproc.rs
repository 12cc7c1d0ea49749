//! In-process transport: one shared mailbox per (src, dest, tag) channel,
//! with latency injected by stamping each message with the earliest instant
//! it may be delivered.

use super::{CounterSnapshot, Counters, Network, Tag, Transport, TransportError};
use crate::grid::{RankCoord, Topology};
use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, Condvar, Mutex};
use std::time::{Duration, Instant};

const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

struct Message {
    visible_at: Instant,
    payload: Vec<u8>,
}

type ChannelKey = (RankCoord, RankCoord, Tag);

struct Shared {
    queues: Mutex<HashMap<ChannelKey, VecDeque<Message>>>,
    arrived: Condvar,
    latency: Duration,
    timeout: Duration,
    counters: HashMap<RankCoord, Arc<Counters>>,
}

/// Shared in-process network; hand one endpoint to each rank worker.
pub struct InProcNet {
    shared: Arc<Shared>,
}

impl InProcNet {
    pub fn new(topo: &Topology, latency: Duration) -> InProcNet {
        Self::with_timeout(topo, latency, DEFAULT_TIMEOUT)
    }

    pub fn with_timeout(topo: &Topology, latency: Duration, timeout: Duration) -> InProcNet {
        let counters = topo
            .ranks()
            .map(|r| (r, Arc::new(Counters::default())))
            .collect();
        InProcNet {
            shared: Arc::new(Shared {
                queues: Mutex::new(HashMap::new()),
                arrived: Condvar::new(),
                latency,
                timeout,
                counters,
            }),
        }
    }

    pub fn latency(&self) -> Duration {
        self.shared.latency
    }
}

impl Network for InProcNet {
    fn endpoint(&self, rank: RankCoord) -> Box<dyn Transport> {
        let counters = self
            .shared
            .counters
            .get(&rank)
            .expect("endpoint for rank outside topology")
            .clone();
        Box::new(InProcEndpoint {
            shared: self.shared.clone(),
            rank,
            counters,
        })
    }
}

pub struct InProcEndpoint {
    shared: Arc<Shared>,
    rank: RankCoord,
    counters: Arc<Counters>,
}

impl Transport for InProcEndpoint {
    fn rank(&self) -> RankCoord {
        self.rank
    }

    fn send(&self, dest: RankCoord, tag: Tag, payload: Vec<u8>) -> Result<(), TransportError> {
        if !self.shared.counters.contains_key(&dest) {
            return Err(TransportError::UnknownRank(dest));
        }
        let bytes = payload.len();
        let msg = Message {
            visible_at: Instant::now() + self.shared.latency,
            payload,
        };
        {
            let mut queues = self.shared.queues.lock().unwrap();
            queues
                .entry((self.rank, dest, tag))
                .or_default()
                .push_back(msg);
        }
        self.shared.arrived.notify_all();
        self.counters.on_send(bytes);
        Ok(())
    }

    fn recv(&self, src: RankCoord, tag: Tag) -> Result<Vec<u8>, TransportError> {
        let key = (src, self.rank, tag);
        let started = Instant::now();
        let deadline = started + self.shared.timeout;
        let mut queues = self.shared.queues.lock().unwrap();
        loop {
            let now = Instant::now();
            let next_visible = queues
                .get(&key)
                .and_then(|q| q.front())
                .map(|m| m.visible_at);
            match next_visible {
                Some(at) if at <= now => {
                    let msg = queues.get_mut(&key).unwrap().pop_front().unwrap();
                    self.counters
                        .on_recv(msg.payload.len(), self.shared.latency);
                    return Ok(msg.payload);
                }
                // Queued but not yet mature: the maturity instant is known,
                // so wait it out precisely instead of trusting timer
                // granularity.
                Some(at) => {
                    drop(queues);
                    super::precise_sleep_until(at.min(deadline));
                    if Instant::now() >= deadline {
                        return Err(TransportError::Timeout {
                            src,
                            tag,
                            waited: started.elapsed(),
                        });
                    }
                    queues = self.shared.queues.lock().unwrap();
                }
                // Nothing queued: block until a sender's notify.
                None => {
                    if now >= deadline {
                        return Err(TransportError::Timeout {
                            src,
                            tag,
                            waited: started.elapsed(),
                        });
                    }
                    let (guard, _) = self
                        .shared
                        .arrived
                        .wait_timeout(queues, deadline - now)
                        .unwrap();
                    queues = guard;
                }
            }
        }
    }

    fn counters(&self) -> CounterSnapshot {
        self.counters.snapshot()
    }
}
