//! Discrete-event core: virtual clock, ordered event queue, and the node
//! identifiers of the three-node topology (server, base station, mobile).
//!
//! Dispatch order is total and reproducible: events fire in `(fire_at, seqno)`
//! order, where `seqno` is the insertion sequence number. Two runs that
//! schedule the same events therefore dispatch them identically, which the
//! queue witnesses with a running FNV-1a hash of the dispatch log.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::tcp::Segment;
use crate::time::SimTime;

/// The three nodes of the topology.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeId {
    Server,
    BaseStation,
    Mobile,
}

/// Timers owned by the server TCP sender and the base-station proxy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TimerKind {
    TcpRto,
    ProxyRetx,
}

/// What an event does when it fires.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EventPayload {
    /// A segment finishes crossing a link and arrives at `target`.
    SegmentArrival { seg: Segment },
    /// Start of wireless slot `slot` (drives downlink and uplink service).
    SlotTick { slot: u64 },
    /// HARQ feedback for an outstanding link-layer transmission is due.
    HarqFeedbackDue { entry: u64 },
    /// A retransmission timer may have expired; the owner revalidates.
    TimerExpiry { timer: TimerKind },
    /// The server application is offered its next paced send opportunity.
    AppSendCredit,
}

/// A scheduled event.
#[derive(Clone, Copy, Debug)]
pub struct Event {
    pub fire_at: SimTime,
    pub seqno: u64,
    pub target: NodeId,
    pub payload: EventPayload,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.fire_at == other.fire_at && self.seqno == other.seqno
    }
}
impl Eq for Event {}

// BinaryHeap is a max-heap; reverse so the earliest (fire_at, seqno) pops first.
impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.fire_at.cmp(&other.fire_at) {
            Ordering::Equal => self.seqno.cmp(&other.seqno),
            ord => ord,
        }
        .reverse()
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Wiring of the wired server -> base-station segment of the path.
///
/// The wired link is error-free and has no capacity limit; the only wired
/// bottleneck is the server's own rate cap. Delay must be strictly positive.
#[derive(Clone, Copy, Debug)]
pub struct Topology {
    pub wired_one_way_delay: crate::time::SimDuration,
}

impl Topology {
    pub fn new(wired_one_way_delay: crate::time::SimDuration) -> Self {
        assert!(!wired_one_way_delay.is_zero(), "wired delay must be positive");
        Topology { wired_one_way_delay }
    }
}

/// The event queue and virtual clock of one simulation instance.
#[derive(Debug)]
pub struct EventQueue {
    heap: BinaryHeap<Event>,
    now: SimTime,
    next_seqno: u64,
    dispatched: u64,
    log_hash: u64,
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(mut hash: u64, word: u64) -> u64 {
    for byte in word.to_le_bytes() {
        hash ^= byte as u64;
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    hash
}

impl Default for EventQueue {
    fn default() -> Self {
        Self::new()
    }
}

impl EventQueue {
    pub fn new() -> Self {
        EventQueue {
            heap: BinaryHeap::new(),
            now: SimTime::ZERO,
            next_seqno: 0,
            dispatched: 0,
            log_hash: FNV_OFFSET,
        }
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    /// Number of events dispatched so far.
    pub fn dispatched(&self) -> u64 {
        self.dispatched
    }

    /// Running hash over the dispatch log; equal hashes mean identical
    /// dispatch sequences.
    pub fn dispatch_hash(&self) -> u64 {
        self.log_hash
    }

    /// Schedule `payload` for `target` at `fire_at`.
    ///
    /// Scheduling in the past is a logic error and aborts the simulation.
    pub fn schedule(&mut self, fire_at: SimTime, target: NodeId, payload: EventPayload) {
        assert!(
            fire_at >= self.now,
            "scheduled event in the past: {fire_at} < {}",
            self.now
        );
        let seqno = self.next_seqno;
        self.next_seqno += 1;
        self.heap.push(Event { fire_at, seqno, target, payload });
    }

    /// Pop the next event with `fire_at <= t_end`, advancing the clock to it.
    pub fn pop_until(&mut self, t_end: SimTime) -> Option<Event> {
        let next = self.heap.peek()?;
        if next.fire_at > t_end {
            return None;
        }
        let ev = self.heap.pop().expect("peeked event vanished");
        assert!(ev.fire_at >= self.now, "event queue violated clock monotonicity");
        self.now = ev.fire_at;
        self.dispatched += 1;
        self.log_hash = self.hash_event(&ev);
        Some(ev)
    }

    fn hash_event(&self, ev: &Event) -> u64 {
        let mut h = fnv1a(self.log_hash, ev.fire_at.as_nanos());
        h = fnv1a(h, ev.seqno);
        h = fnv1a(h, ev.target as u64);
        let (tag, a, b) = match ev.payload {
            EventPayload::SegmentArrival { seg } => match seg {
                Segment::Data { seq, .. } => (1u64, seq, 0),
                Segment::Ack { ack_seq, rwin, .. } => (2, ack_seq, rwin),
            },
            EventPayload::SlotTick { slot } => (3, slot, 0),
            EventPayload::HarqFeedbackDue { entry } => (4, entry, 0),
            EventPayload::TimerExpiry { timer } => (5, timer as u64, 0),
            EventPayload::AppSendCredit => (6, 0, 0),
        };
        h = fnv1a(h, tag);
        h = fnv1a(h, a);
        fnv1a(h, b)
    }
}
