//! The mmWave wireless hop: LOS/NLOS alternation, the slotted TDD structure,
//! and per-slot downlink service.
//!
//! Blockage is all-or-nothing: a slot whose start falls in LOS delivers, a
//! slot whose start falls in NLOS loses everything launched in it. Service
//! capacity is a deterministic credit accumulator so that the mean launch
//! budget over whole TDD cycles equals `alpha` packets per slot exactly,
//! with no randomness involved.

use serde::{Deserialize, Serialize};

use crate::time::{SimDuration, SimTime};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelState {
    Los,
    Nlos,
}

/// Slot roles in a TDD cycle: control, downlink, uplink.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlotKind {
    Control,
    Downlink,
    Uplink,
}

/// Deterministic LOS/NLOS schedule: either a periodic alternation or an
/// explicit interval list. State is defined for every instant; intervals are
/// half-open, so the instant an interval ends already belongs to the next.
#[derive(Clone, Debug)]
pub enum ChannelSchedule {
    Periodic {
        los: SimDuration,
        nlos: SimDuration,
        start: ChannelState,
    },
    /// Scripted intervals; after the list is exhausted the last state holds
    /// forever. Must be non-empty with positive durations.
    Explicit(Vec<(ChannelState, SimDuration)>),
    /// Permanently in one state (blockage never ends, or never happens).
    Constant(ChannelState),
}

impl ChannelSchedule {
    pub fn periodic(los: SimDuration, nlos: SimDuration, start: ChannelState) -> Self {
        if nlos.is_zero() {
            return ChannelSchedule::Constant(ChannelState::Los);
        }
        if los.is_zero() {
            return ChannelSchedule::Constant(ChannelState::Nlos);
        }
        ChannelSchedule::Periodic { los, nlos, start }
    }

    pub fn explicit(intervals: Vec<(ChannelState, SimDuration)>) -> Self {
        assert!(!intervals.is_empty(), "explicit schedule must be non-empty");
        assert!(
            intervals.iter().all(|(_, d)| !d.is_zero()),
            "explicit schedule durations must be positive"
        );
        ChannelSchedule::Explicit(intervals)
    }

    /// Channel state at instant `t`.
    pub fn state_at(&self, t: SimTime) -> ChannelState {
        self.locate(t).0
    }

    /// How long the channel has been in its current state at `t`.
    pub fn time_in_state(&self, t: SimTime) -> SimDuration {
        self.locate(t).1
    }

    /// One LOS+NLOS period, when the schedule is periodic.
    pub fn cycle_len(&self) -> Option<SimDuration> {
        match self {
            ChannelSchedule::Periodic { los, nlos, .. } => Some(*los + *nlos),
            _ => None,
        }
    }

    fn locate(&self, t: SimTime) -> (ChannelState, SimDuration) {
        match self {
            ChannelSchedule::Constant(s) => (*s, SimDuration::from_nanos(t.as_nanos())),
            ChannelSchedule::Periodic { los, nlos, start } => {
                let period = los.as_nanos() + nlos.as_nanos();
                let phase = t.as_nanos() % period;
                let first = match start {
                    ChannelState::Los => los.as_nanos(),
                    ChannelState::Nlos => nlos.as_nanos(),
                };
                if phase < first {
                    (*start, SimDuration::from_nanos(phase))
                } else {
                    let other = match start {
                        ChannelState::Los => ChannelState::Nlos,
                        ChannelState::Nlos => ChannelState::Los,
                    };
                    (other, SimDuration::from_nanos(phase - first))
                }
            }
            ChannelSchedule::Explicit(intervals) => {
                let mut elapsed = 0u64;
                for (state, dur) in intervals {
                    let end = elapsed + dur.as_nanos();
                    if t.as_nanos() < end {
                        return (*state, SimDuration::from_nanos(t.as_nanos() - elapsed));
                    }
                    elapsed = end;
                }
                let (last_state, _) = *intervals.last().expect("non-empty");
                (last_state, SimDuration::from_nanos(t.as_nanos() - elapsed))
            }
        }
    }
}

/// The slot grid: slot length, TDD pattern, per-slot service rate, and
/// segment payload size.
#[derive(Clone, Debug)]
pub struct SlotStructure {
    slot_len: SimDuration,
    pattern: Vec<SlotKind>,
    /// Service rate in micro-packets per slot, averaged over the TDD cycle.
    alpha_upkt: u64,
    pub payload_bytes: u64,
}

impl SlotStructure {
    pub fn new(slot_len: SimDuration, tdd_pattern: &str, alpha: f64, payload_bytes: u64) -> Self {
        assert!(!slot_len.is_zero(), "slot length must be positive");
        assert!(alpha > 0.0, "alpha must be positive");
        assert!(payload_bytes > 0, "payload size must be positive");
        let pattern: Vec<SlotKind> = tdd_pattern
            .chars()
            .map(|c| match c {
                'C' | 'c' => SlotKind::Control,
                'D' | 'd' => SlotKind::Downlink,
                'U' | 'u' => SlotKind::Uplink,
                other => panic!("invalid TDD pattern symbol: {other:?}"),
            })
            .collect();
        assert!(!pattern.is_empty(), "TDD pattern must be non-empty");
        assert!(
            pattern.iter().any(|k| *k == SlotKind::Downlink),
            "TDD pattern needs at least one downlink slot"
        );
        SlotStructure {
            slot_len,
            pattern,
            alpha_upkt: (alpha * 1e6).round() as u64,
            payload_bytes,
        }
    }

    pub fn slot_len(&self) -> SimDuration {
        self.slot_len
    }

    pub fn cycle_slots(&self) -> u64 {
        self.pattern.len() as u64
    }

    pub fn downlink_slots_per_cycle(&self) -> u64 {
        self.pattern.iter().filter(|k| **k == SlotKind::Downlink).count() as u64
    }

    pub fn kind(&self, slot: u64) -> SlotKind {
        self.pattern[(slot % self.pattern.len() as u64) as usize]
    }

    pub fn slot_start(&self, slot: u64) -> SimTime {
        SimTime::from_nanos(slot * self.slot_len.as_nanos())
    }

    pub fn slot_of(&self, t: SimTime) -> u64 {
        t.as_nanos() / self.slot_len.as_nanos()
    }

    /// Cycle-averaged service rate in packets per slot.
    pub fn alpha(&self) -> f64 {
        self.alpha_upkt as f64 / 1e6
    }

    /// Sustained LOS throughput in bits per second implied by the slot grid.
    pub fn los_capacity_bps(&self) -> f64 {
        self.alpha() * self.payload_bytes as f64 * 8.0 / self.slot_len.as_secs_f64()
    }
}

/// Fractional service credit carried across eligible downlink slots.
///
/// Exact rational arithmetic: each eligible slot adds
/// `alpha_upkt * cycle_slots` micro-packets against a denominator of
/// `downlink_slots * 1e6`, so whole TDD cycles emit exactly
/// `alpha * cycle_slots` packets with zero long-run drift.
#[derive(Clone, Debug)]
struct CreditAccumulator {
    num: u64,
    inc: u64,
    den: u64,
}

impl CreditAccumulator {
    fn new(slots: &SlotStructure) -> Self {
        CreditAccumulator {
            num: 0,
            inc: slots.alpha_upkt * slots.cycle_slots(),
            den: slots.downlink_slots_per_cycle() * 1_000_000,
        }
    }

    fn tick(&mut self) -> u64 {
        self.num += self.inc;
        let emitted = self.num / self.den;
        self.num %= self.den;
        emitted
    }

    /// Smallest whole-packet budget covering one eligible slot's credit.
    fn per_slot_cap(&self) -> u64 {
        self.num_div_ceil()
    }

    fn num_div_ceil(&self) -> u64 {
        (self.inc + self.den - 1) / self.den
    }
}

/// Outcome of launching one segment on the wireless downlink.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeliveryOutcome {
    Delivered { after: SimDuration },
    Lost,
}

/// The wireless hop of one simulation instance.
#[derive(Clone, Debug)]
pub struct Channel {
    pub schedule: ChannelSchedule,
    pub slots: SlotStructure,
    credit: CreditAccumulator,
    ota_latency: SimDuration,
    /// How long after blockage onset the scheduler keeps granting launch
    /// budget for new data before channel-state knowledge catches up. Zero
    /// means the scheduler reacts instantly and never launches into NLOS.
    scheduler_lag: SimDuration,
}

impl Channel {
    pub fn new(
        schedule: ChannelSchedule,
        slots: SlotStructure,
        ota_latency_slots: u64,
        scheduler_lag: SimDuration,
    ) -> Self {
        let credit = CreditAccumulator::new(&slots);
        let ota_latency = slots.slot_len() * ota_latency_slots.max(1);
        Channel { schedule, slots, credit, ota_latency, scheduler_lag }
    }

    pub fn state_at(&self, t: SimTime) -> ChannelState {
        self.schedule.state_at(t)
    }

    /// Number of data segments the base station may launch in this slot.
    ///
    /// Zero for control and uplink slots. Zero in NLOS once the scheduler has
    /// detected the blockage; within `scheduler_lag` of onset the budget is
    /// still granted (and everything launched is lost). In LOS the credit
    /// accumulator averages to exactly `alpha` packets per slot over whole
    /// TDD cycles.
    pub fn downlink_capacity(&mut self, slot: u64) -> u64 {
        if self.slots.kind(slot) != SlotKind::Downlink {
            return 0;
        }
        let start = self.slots.slot_start(slot);
        match self.schedule.state_at(start) {
            ChannelState::Los => self.credit.tick(),
            ChannelState::Nlos => {
                if self.schedule.time_in_state(start) < self.scheduler_lag {
                    self.credit.tick()
                } else {
                    0
                }
            }
        }
    }

    /// Per-slot launch allowance for link-layer retransmissions in a blocked
    /// downlink slot. The radio keeps its transmission opportunities during
    /// NLOS even though nothing gets through, so pending HARQ retransmissions
    /// still burn their attempts.
    pub fn nlos_retx_slot_cap(&self) -> u64 {
        self.credit.per_slot_cap()
    }

    /// Delivery outcome for a segment launched in `slot`. The channel state
    /// is sampled at the slot start: a launch in the boundary slot of a
    /// LOS->NLOS transition is lost.
    pub fn attempt_delivery(&self, slot: u64) -> DeliveryOutcome {
        match self.schedule.state_at(self.slots.slot_start(slot)) {
            ChannelState::Los => DeliveryOutcome::Delivered { after: self.ota_latency },
            ChannelState::Nlos => DeliveryOutcome::Lost,
        }
    }

    pub fn ota_latency(&self) -> SimDuration {
        self.ota_latency
    }
}
