//! TCP endpoints: the segment type crossing every link, the NewReno sender
//! at the server, and the reassembling receiver at the mobile.
//!
//! Sequence numbers are packet-granular: every DATA segment carries exactly
//! one MSS of payload, so window arithmetic is `segments * mss` bytes.

mod receiver;
mod sender;

pub use receiver::{ReceiverOutcome, TcpReceiver};
pub use sender::{SenderActions, SenderPhase, TcpSender, TcpSenderConfig};

use crate::time::SimTime;

/// The unit crossing every link: a data packet or a (possibly proxy-forged)
/// cumulative acknowledgement carrying the advertised receive window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Segment {
    Data {
        seq: u64,
        sent_at: SimTime,
    },
    Ack {
        /// Cumulative next-expected sequence number.
        ack_seq: u64,
        /// Advertised window in bytes (free receive or cache space).
        rwin: u64,
        sent_at: SimTime,
    },
}

impl Segment {
    pub fn is_data(&self) -> bool {
        matches!(self, Segment::Data { .. })
    }

    pub fn sent_at(&self) -> SimTime {
        match self {
            Segment::Data { sent_at, .. } | Segment::Ack { sent_at, .. } => *sent_at,
        }
    }
}
