//! TCP transport: one rank per process (or per thread in tests), full-duplex
//! mesh established at startup from a roster file, one connection per rank
//! pair.
//!
//! Wire format: every message is framed as `length: u32 LE | tag: u32 LE |
//! payload`, with `length = 4 + payload.len()`. Latency injection happens on
//! the send path: a per-peer writer thread holds each frame until its send
//! time plus the configured latency before writing it, so delivery is never
//! earlier than send + latency and concurrently sent messages mature
//! concurrently.
//!
//! Roster file: one `rank cx cy host port` line per rank, whitespace
//! separated; `#` starts a comment.

use super::{CounterSnapshot, Counters, Network, Tag, Transport, TransportError};
use crate::grid::RankCoord;
use std::collections::{HashMap, HashSet, VecDeque};
use std::io::{Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::mpsc;
use std::sync::{Arc, Condvar, Mutex};
use std::time::{Duration, Instant};

const HELLO_MAGIC: [u8; 4] = *b"SWH1";

#[derive(Debug, Clone)]
pub struct RosterEntry {
    pub index: u32,
    pub rank: RankCoord,
    pub host: String,
    pub port: u16,
}

impl RosterEntry {
    pub fn addr(&self) -> Result<SocketAddr, TransportError> {
        (self.host.as_str(), self.port)
            .to_socket_addrs()
            .map_err(|e| TransportError::Io(format!("resolving {}:{}: {e}", self.host, self.port)))?
            .next()
            .ok_or_else(|| TransportError::Io(format!("no address for {}:{}", self.host, self.port)))
    }
}

/// Parse a roster file body. Lines: `rank cx cy host port`.
pub fn parse_roster(text: &str) -> Result<Vec<RosterEntry>, TransportError> {
    let mut entries = Vec::new();
    let mut seen = HashSet::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(TransportError::Io(format!(
                "roster line {}: expected `rank cx cy host port`, got {raw:?}",
                lineno + 1
            )));
        }
        let parse = |s: &str, what: &str| -> Result<u32, TransportError> {
            s.parse()
                .map_err(|_| TransportError::Io(format!("roster line {}: bad {what} {s:?}", lineno + 1)))
        };
        let index = parse(fields[0], "rank index")?;
        let cx = parse(fields[1], "cx")?;
        let cy = parse(fields[2], "cy")?;
        let port = parse(fields[4], "port")? as u16;
        if !seen.insert(index) {
            return Err(TransportError::Io(format!(
                "roster line {}: duplicate rank index {index}",
                lineno + 1
            )));
        }
        entries.push(RosterEntry {
            index,
            rank: RankCoord::new(cx, cy),
            host: fields[3].to_string(),
            port,
        });
    }
    entries.sort_by_key(|e| e.index);
    Ok(entries)
}

struct Inbox {
    queues: Mutex<HashMap<(u32, Tag), VecDeque<Vec<u8>>>>,
    arrived: Condvar,
    closed: Mutex<HashSet<u32>>,
}

impl Inbox {
    fn new() -> Inbox {
        Inbox {
            queues: Mutex::new(HashMap::new()),
            arrived: Condvar::new(),
            closed: Mutex::new(HashSet::new()),
        }
    }

    fn push(&self, src: u32, tag: Tag, payload: Vec<u8>) {
        self.queues
            .lock()
            .unwrap()
            .entry((src, tag))
            .or_default()
            .push_back(payload);
        self.arrived.notify_all();
    }

    fn mark_closed(&self, src: u32) {
        self.closed.lock().unwrap().insert(src);
        self.arrived.notify_all();
    }
}

type Outgoing = (Instant, Tag, Vec<u8>);

/// One rank's endpoint on an established TCP mesh.
pub struct TcpEndpoint {
    rank: RankCoord,
    index: u32,
    index_of: HashMap<RankCoord, u32>,
    inbox: Arc<Inbox>,
    writers: HashMap<u32, mpsc::Sender<Outgoing>>,
    sockets: Vec<TcpStream>,
    counters: Arc<Counters>,
    latency: Duration,
    timeout: Duration,
}

/// Frame a message for the wire: `length | tag | payload`.
pub fn frame_message(tag: Tag, payload: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + payload.len());
    out.extend_from_slice(&((payload.len() + 4) as u32).to_le_bytes());
    out.extend_from_slice(&tag.to_le_bytes());
    out.extend_from_slice(payload);
    out
}

fn read_exact_or_eof(stream: &mut TcpStream, buf: &mut [u8]) -> std::io::Result<bool> {
    let mut filled = 0;
    while filled < buf.len() {
        match stream.read(&mut buf[filled..]) {
            Ok(0) => return Ok(false),
            Ok(k) => filled += k,
            Err(e) if e.kind() == std::io::ErrorKind::Interrupted => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(true)
}

fn read_frame(stream: &mut TcpStream) -> std::io::Result<Option<(Tag, Vec<u8>)>> {
    let mut len_buf = [0u8; 4];
    if !read_exact_or_eof(stream, &mut len_buf)? {
        return Ok(None);
    }
    let len = u32::from_le_bytes(len_buf) as usize;
    if len < 4 {
        return Err(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            "frame shorter than its tag",
        ));
    }
    let mut body = vec![0u8; len];
    if !read_exact_or_eof(stream, &mut body)? {
        return Ok(None);
    }
    let tag = Tag::from_le_bytes(body[..4].try_into().unwrap());
    Ok(Some((tag, body[4..].to_vec())))
}

impl TcpEndpoint {
    /// Bind the roster address for `my_index` and establish the mesh.
    pub fn establish(
        my_index: u32,
        roster: &[RosterEntry],
        latency: Duration,
        timeout: Duration,
    ) -> Result<TcpEndpoint, TransportError> {
        let me = roster
            .iter()
            .find(|e| e.index == my_index)
            .ok_or_else(|| TransportError::Io(format!("rank index {my_index} not in roster")))?;
        let listener = TcpListener::bind(me.addr()?)
            .map_err(|e| TransportError::Io(format!("bind {}:{}: {e}", me.host, me.port)))?;
        Self::establish_with_listener(listener, my_index, roster, latency, timeout)
    }

    /// Establish using an already-bound listener (ephemeral ports in tests).
    pub fn establish_with_listener(
        listener: TcpListener,
        my_index: u32,
        roster: &[RosterEntry],
        latency: Duration,
        timeout: Duration,
    ) -> Result<TcpEndpoint, TransportError> {
        let me = roster
            .iter()
            .find(|e| e.index == my_index)
            .ok_or_else(|| TransportError::Io(format!("rank index {my_index} not in roster")))?;
        let deadline = Instant::now() + timeout;
        let mut streams: HashMap<u32, TcpStream> = HashMap::new();

        // Connect toward lower indices, accept from higher ones; exactly one
        // connection per communicating pair.
        for peer in roster.iter().filter(|e| e.index < my_index) {
            let addr = peer.addr()?;
            let stream = loop {
                match TcpStream::connect(addr) {
                    Ok(s) => break s,
                    Err(e) => {
                        if Instant::now() >= deadline {
                            return Err(TransportError::Io(format!(
                                "connecting to rank {}: {e}",
                                peer.index
                            )));
                        }
                        std::thread::sleep(Duration::from_millis(10));
                    }
                }
            };
            let mut hello = Vec::with_capacity(8);
            hello.extend_from_slice(&HELLO_MAGIC);
            hello.extend_from_slice(&my_index.to_le_bytes());
            let mut stream = stream;
            stream
                .write_all(&hello)
                .map_err(|e| TransportError::Io(format!("hello to rank {}: {e}", peer.index)))?;
            streams.insert(peer.index, stream);
        }
        let expected_higher = roster.iter().filter(|e| e.index > my_index).count();
        listener
            .set_nonblocking(false)
            .map_err(|e| TransportError::Io(e.to_string()))?;
        for _ in 0..expected_higher {
            let (mut stream, _) = listener
                .accept()
                .map_err(|e| TransportError::Io(format!("accept: {e}")))?;
            let mut hello = [0u8; 8];
            if !read_exact_or_eof(&mut stream, &mut hello)
                .map_err(|e| TransportError::Io(format!("hello: {e}")))?
            {
                return Err(TransportError::Closed("peer hung up during hello".into()));
            }
            if hello[..4] != HELLO_MAGIC {
                return Err(TransportError::Io("bad hello magic".into()));
            }
            let peer_index = u32::from_le_bytes(hello[4..].try_into().unwrap());
            streams.insert(peer_index, stream);
        }

        let inbox = Arc::new(Inbox::new());
        let counters = Arc::new(Counters::default());
        let mut writers = HashMap::new();
        let mut sockets = Vec::new();
        for (peer_index, stream) in streams {
            stream
                .set_nodelay(true)
                .map_err(|e| TransportError::Io(e.to_string()))?;
            sockets.push(
                stream
                    .try_clone()
                    .map_err(|e| TransportError::Io(e.to_string()))?,
            );

            let mut reader = stream
                .try_clone()
                .map_err(|e| TransportError::Io(e.to_string()))?;
            let inbox_r = inbox.clone();
            std::thread::spawn(move || loop {
                match read_frame(&mut reader) {
                    Ok(Some((tag, payload))) => inbox_r.push(peer_index, tag, payload),
                    Ok(None) | Err(_) => {
                        inbox_r.mark_closed(peer_index);
                        return;
                    }
                }
            });

            let (tx, rx) = mpsc::channel::<Outgoing>();
            let mut writer = stream;
            std::thread::spawn(move || {
                while let Ok((due, tag, payload)) = rx.recv() {
                    super::precise_sleep_until(due);
                    if writer.write_all(&frame_message(tag, &payload)).is_err() {
                        return;
                    }
                }
            });
            writers.insert(peer_index, tx);
        }

        let index_of = roster.iter().map(|e| (e.rank, e.index)).collect();
        Ok(TcpEndpoint {
            rank: me.rank,
            index: my_index,
            index_of,
            inbox,
            writers,
            sockets,
            counters,
            latency,
            timeout,
        })
    }
}

impl Transport for TcpEndpoint {
    fn rank(&self) -> RankCoord {
        self.rank
    }

    fn send(&self, dest: RankCoord, tag: Tag, payload: Vec<u8>) -> Result<(), TransportError> {
        let dest_index = *self
            .index_of
            .get(&dest)
            .ok_or(TransportError::UnknownRank(dest))?;
        let bytes = payload.len();
        if dest_index == self.index {
            // Local delivery; no wire, no injected latency.
            self.inbox.push(self.index, tag, payload);
        } else {
            let writer = self
                .writers
                .get(&dest_index)
                .ok_or(TransportError::UnknownRank(dest))?;
            writer
                .send((Instant::now() + self.latency, tag, payload))
                .map_err(|_| TransportError::Closed(format!("writer to rank {dest} gone")))?;
        }
        self.counters.on_send(bytes);
        Ok(())
    }

    fn recv(&self, src: RankCoord, tag: Tag) -> Result<Vec<u8>, TransportError> {
        let src_index = *self
            .index_of
            .get(&src)
            .ok_or(TransportError::UnknownRank(src))?;
        let key = (src_index, tag);
        let started = Instant::now();
        let deadline = started + self.timeout;
        let mut queues = self.inbox.queues.lock().unwrap();
        loop {
            if let Some(payload) = queues.get_mut(&key).and_then(|q| q.pop_front()) {
                self.counters.on_recv(payload.len(), self.latency);
                return Ok(payload);
            }
            if self.inbox.closed.lock().unwrap().contains(&src_index) {
                return Err(TransportError::Closed(format!("rank {src} disconnected")));
            }
            let now = Instant::now();
            if now >= deadline {
                return Err(TransportError::Timeout {
                    src,
                    tag,
                    waited: started.elapsed(),
                });
            }
            let (guard, _) = self
                .inbox
                .arrived
                .wait_timeout(queues, deadline - now)
                .unwrap();
            queues = guard;
        }
    }

    fn counters(&self) -> CounterSnapshot {
        self.counters.snapshot()
    }
}

impl Drop for TcpEndpoint {
    fn drop(&mut self) {
        self.writers.clear();
        for s in &self.sockets {
            let _ = s.shutdown(std::net::Shutdown::Both);
        }
    }
}

/// A whole TCP mesh inside one process: one endpoint per rank, each driven
/// by its own thread. Used by tests and by single-machine multi-endpoint
/// runs; real multi-process runs establish one [`TcpEndpoint`] each.
pub struct TcpNet {
    endpoints: Mutex<HashMap<RankCoord, TcpEndpoint>>,
}

impl TcpNet {
    /// Establish all endpoints of the roster on this host, binding ephemeral
    /// listeners first so the roster ports are authoritative.
    pub fn establish_local(
        roster: &[RosterEntry],
        latency: Duration,
        timeout: Duration,
    ) -> Result<TcpNet, TransportError> {
        let mut handles = Vec::new();
        for entry in roster.iter().cloned() {
            let roster = roster.to_vec();
            handles.push(std::thread::spawn(move || {
                TcpEndpoint::establish(entry.index, &roster, latency, timeout)
                    .map(|ep| (entry.rank, ep))
            }));
        }
        let mut endpoints = HashMap::new();
        for h in handles {
            let (rank, ep) = h.join().map_err(|_| {
                TransportError::Io("mesh establishment thread panicked".into())
            })??;
            endpoints.insert(rank, ep);
        }
        Ok(TcpNet {
            endpoints: Mutex::new(endpoints),
        })
    }
}

impl Network for TcpNet {
    fn endpoint(&self, rank: RankCoord) -> Box<dyn Transport> {
        let ep = self
            .endpoints
            .lock()
            .unwrap()
            .remove(&rank)
            .expect("endpoint already taken or rank unknown");
        Box::new(ep)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn local_roster(count: u32) -> Vec<RosterEntry> {
        // Bind ephemeral listeners to reserve ports, then free them for the
        // real establishment. Small race, acceptable in tests.
        (0..count)
            .map(|index| {
                let l = TcpListener::bind("127.0.0.1:0").unwrap();
                let port = l.local_addr().unwrap().port();
                drop(l);
                RosterEntry {
                    index,
                    rank: RankCoord::new(index, 0),
                    host: "127.0.0.1".into(),
                    port,
                }
            })
            .collect()
    }

    fn pair(latency: Duration) -> (TcpEndpoint, TcpEndpoint) {
        let roster = local_roster(2);
        let r0 = roster.clone();
        let r1 = roster.clone();
        let timeout = Duration::from_secs(10);
        let h0 = std::thread::spawn(move || TcpEndpoint::establish(0, &r0, latency, timeout));
        let h1 = std::thread::spawn(move || TcpEndpoint::establish(1, &r1, latency, timeout));
        (h0.join().unwrap().unwrap(), h1.join().unwrap().unwrap())
    }

    #[test]
    fn parse_roster_with_comments() {
        let text = "# my cluster\n0 0 0 127.0.0.1 7000\n1 1 0 127.0.0.1 7001 # second\n\n";
        let roster = parse_roster(text).unwrap();
        assert_eq!(roster.len(), 2);
        assert_eq!(roster[1].rank, RankCoord::new(1, 0));
        assert_eq!(roster[1].port, 7001);
    }

    #[test]
    fn parse_roster_rejects_duplicates() {
        let text = "0 0 0 h 1\n0 1 0 h 2\n";
        assert!(parse_roster(text).is_err());
    }

    #[test]
    fn frame_layout_is_pinned() {
        let frame = frame_message(0x0102_0304, &[0xAA, 0xBB]);
        assert_eq!(frame, vec![6, 0, 0, 0, 0x04, 0x03, 0x02, 0x01, 0xAA, 0xBB]);
    }

    #[test]
    fn round_trip_over_loopback() {
        let (a, b) = pair(Duration::ZERO);
        a.send(b.rank(), 42, vec![1, 2, 3, 4]).unwrap();
        assert_eq!(b.recv(a.rank(), 42).unwrap(), vec![1, 2, 3, 4]);
        b.send(a.rank(), 43, vec![9]).unwrap();
        assert_eq!(a.recv(b.rank(), 43).unwrap(), vec![9]);
    }

    #[test]
    fn soak_fifo_over_loopback() {
        let (a, b) = pair(Duration::ZERO);
        let count: u64 = 100_000;
        let a_rank = a.rank();
        let writer = std::thread::spawn(move || {
            for i in 0..count {
                a.send(RankCoord::new(1, 0), 5, i.to_le_bytes().to_vec())
                    .unwrap();
            }
            a
        });
        for i in 0..count {
            let bytes = b.recv(a_rank, 5).unwrap();
            assert_eq!(u64::from_le_bytes(bytes.try_into().unwrap()), i);
        }
        let _a = writer.join().unwrap();
        assert_eq!(b.counters().messages_received, count);
    }

    #[test]
    fn latency_applies_from_send_time() {
        let tau = Duration::from_millis(30);
        let (a, b) = pair(tau);
        let start = Instant::now();
        a.send(b.rank(), 1, vec![1]).unwrap();
        a.send(b.rank(), 2, vec![2]).unwrap();
        b.recv(a.rank(), 1).unwrap();
        b.recv(a.rank(), 2).unwrap();
        let elapsed = start.elapsed();
        assert!(elapsed >= tau, "{elapsed:?}");
        assert!(elapsed < 2 * tau, "two concurrent sends took {elapsed:?}");
    }
}
