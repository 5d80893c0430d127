//! Packets and protocol identifiers.

use std::fmt;

use crate::attacks::AttackKind;
use crate::flows::FlowKey;
use crate::topology::NodeId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Proto {
    Udp,
    Icmp,
    /// Congestion-responsive transport, the protocol of legitimate senders.
    TcpLike,
}

impl fmt::Display for Proto {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Proto::Udp => "udp",
            Proto::Icmp => "icmp",
            Proto::TcpLike => "tcp_like",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Packet {
    pub id: u64,
    pub src: NodeId,
    /// Claimed source carried in the packet, when forged.
    pub spoofed_src: Option<NodeId>,
    pub dst: NodeId,
    pub proto: Proto,
    /// Payload size in bytes. Values above 65535 are malformed on purpose.
    pub size: u32,
    /// Echo-service request: a responder answers the claimed source.
    pub echo: bool,
    pub created_at: f64,
    /// Ground-truth label for metrics only; agents never read it.
    pub attack_tag: Option<AttackKind>,
}

impl Packet {
    /// Source as seen by everything downstream of the sender.
    pub fn effective_src(&self) -> NodeId {
        self.spoofed_src.unwrap_or(self.src)
    }

    pub fn flow_key(&self) -> FlowKey {
        FlowKey {
            src: self.effective_src(),
            dst: self.dst,
            proto: self.proto,
        }
    }
}
