//! Per-flow sliding windows and the feature vectors handed to detection.
//!
//! A sensor keys traffic by (effective source, destination, protocol) and
//! accumulates one window of counters per flow. At each window boundary the
//! non-empty flows are summarized into a 4-dimensional feature vector:
//!
//! * `f1` log packet rate: `ln(1 + pkt_count / window_len)`
//! * `f2` mean packet size over 1500 bytes
//! * `f3` burstiness: max subwindow count over the uniform expectation
//! * `f4` log fan-in of the destination: `ln(1 + distinct sources)`

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::packet::Proto;
use crate::topology::NodeId;

pub const WINDOW_LEN: f64 = 1.0;
pub const SUBWINDOWS: usize = 10;
pub const IDLE_TIMEOUT: f64 = 5.0;
/// Reference packet size for the size-ratio feature.
pub const SIZE_REF: f64 = 1500.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FlowKey {
    pub src: NodeId,
    pub dst: NodeId,
    pub proto: Proto,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeatureVector(pub [f64; 4]);

impl FeatureVector {
    pub fn dist(&self, other: &FeatureVector) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// Counters for one flow inside the current window.
#[derive(Clone, Debug)]
pub struct WindowStats {
    pub pkt_count: u64,
    pub byte_sum: u64,
    pub sub_counts: [u64; SUBWINDOWS],
    pub last_active: f64,
}

impl WindowStats {
    fn fresh(now: f64) -> WindowStats {
        WindowStats {
            pkt_count: 0,
            byte_sum: 0,
            sub_counts: [0; SUBWINDOWS],
            last_active: now,
        }
    }
}

/// Features for a window with `pkt_count >= 1` packets.
pub fn extract_features(stats: &WindowStats, window_len: f64, dst_fanin: usize) -> FeatureVector {
    debug_assert!(stats.pkt_count >= 1);
    let count = stats.pkt_count as f64;
    let f1 = (1.0 + count / window_len).ln();
    let f2 = (stats.byte_sum as f64 / count) / SIZE_REF;
    let max_sub = *stats.sub_counts.iter().max().unwrap() as f64;
    let f3 = max_sub / (count / SUBWINDOWS as f64);
    let f4 = (1.0 + dst_fanin as f64).ln();
    FeatureVector([f1, f2, f3, f4])
}

/// Per-flow records emitted at a window boundary.
#[derive(Clone, Debug)]
pub struct FlowWindow {
    pub key: FlowKey,
    pub features: FeatureVector,
    /// Packets per second over the window, exact.
    pub pkt_rate: f64,
    /// Mean packet size in bytes.
    pub mean_size: f64,
}

/// Sliding-window flow table of one sensor.
pub struct FlowTable {
    window_len: f64,
    idle_timeout: f64,
    window_start: f64,
    flows: BTreeMap<FlowKey, WindowStats>,
    fanin: BTreeMap<NodeId, BTreeSet<NodeId>>,
    /// Flows evicted by idle timeout, drained at the next window close.
    closed: VecDeque<FlowKey>,
}

impl FlowTable {
    pub fn new(window_len: f64, idle_timeout: f64) -> FlowTable {
        FlowTable {
            window_len,
            idle_timeout,
            window_start: 0.0,
            flows: BTreeMap::new(),
            fanin: BTreeMap::new(),
            closed: VecDeque::new(),
        }
    }

    pub fn window_start(&self) -> f64 {
       self.window_start
    }

    /// Records one packet observation at `now`, inside the current window.
    pub fn update_flow(&mut self, key: FlowKey, size: u32, now: f64) {
        let frac = ((now - self.window_start) / self.window_len).clamp(0.0, 1.0);
        let mut idx = (frac * SUBWINDOWS as f64) as usize;
        if idx >= SUBWINDOWS {
            idx = SUBWINDOWS - 1;
        }
        let stats = self
            .flows
            .entry(key)
            .or_insert_with(|| WindowStats::fresh(now));
        stats.pkt_count += 1;
        stats.byte_sum += size as u64;
        stats.sub_counts[idx] += 1;
        stats.last_active = now;
        self.fanin.entry(key.dst).or_default().insert(key.src);
    }

    /// Closes the window ending at `now`: emits features for every flow that
    /// saw traffic, evicts flows idle past the timeout, and starts the next
    /// window. Returns (per-flow windows, flows closed by idling out).
    pub fn close_window(&mut self, now: f64) -> (Vec<FlowWindow>, Vec<FlowKey>) {
        let mut out = Vec::new();
        for (key, stats) in &self.flows {
            if stats.pkt_count == 0 {
                continue;
            }
            let fanin = self.fanin.get(&key.dst).map_or(1, |s| s.len().max(1));
            out.push(FlowWindow {
                key: *key,
                features: extract_features(stats, self.window_len, fanin),
                pkt_rate: stats.pkt_count as f64 / self.window_len,
                mean_size: stats.byte_sum as f64 / stats.pkt_count as f64,
            });
        }
        let timeout = self.idle_timeout;
        let mut evicted: Vec<FlowKey> = Vec::new();
        self.flows.retain(|key, stats| {
            if now - stats.last_active >= timeout {
                evicted.push(*key);
                false
            } else {
                stats.pkt_count = 0;
                stats.byte_sum = 0;
                stats.sub_counts = [0; SUBWINDOWS];
                true
            }
        });
        self.fanin.clear();
        self.window_start = now;
        let mut closed: Vec<FlowKey> = self.closed.drain(..).collect();
        closed.extend(evicted);
        (out, closed)
    }

    pub fn open_flows(&self) -> usize {
        self.flows.len()
    }
}
