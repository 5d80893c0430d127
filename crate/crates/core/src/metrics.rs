//! Run report: packet accounting, detection/mitigation timing, and phase
//! goodput, all derived from the structured run log.
//!
//! Goodput is demand-based: a phase's offered load is each sender's
//! configured peak rate times its active overlap with the phase, so a sender
//! throttled by losses shows up as degraded goodput even though it offered
//! fewer packets.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::engine::SimStats;
use crate::eventlog::{EventLog, LogEvent};
use crate::packet::Proto;
use crate::scenario::Scenario;
use crate::topology::NodeId;
use crate::trust::TrustClass;

/// How long after mitigation the recovery window starts.
pub const RECOVERY_DELAY: f64 = 10.0;

#[derive(Clone, Debug, Serialize)]
pub struct MetricsReport {
    pub scenario: String,
    pub seed: u64,
    pub duration: f64,
    /// Attack kinds in the scenario, joined by `+`, or `none`.
    pub attacks: String,
    pub attack_start: Option<f64>,
    pub attack_stop: Option<f64>,
    /// First malicious classification of a cluster whose member flows are
    /// mostly attack traffic (by ground-truth tag), minus attack start.
    pub detection_latency: Option<f64>,
    /// First rule installation minus attack start.
    pub mitigation_latency: Option<f64>,
    /// Legitimate flows with at least one filtered packet over all
    /// legitimate flows.
    pub false_positive_rate: f64,
    pub goodput_before: Option<f64>,
    pub goodput_during: Option<f64>,
    pub goodput_after: Option<f64>,
    /// Goodput from [`RECOVERY_DELAY`] after mitigation to the end.
    pub goodput_recovery: Option<f64>,
    pub injected: u64,
    pub delivered: u64,
    pub queue_dropped: u64,
    pub filter_dropped: u64,
    pub in_flight: u64,
    pub conservation: bool,
    pub legit_delivered: u64,
    pub legit_queue_dropped: u64,
    pub legit_filter_dropped: u64,
    pub attack_delivered: u64,
    pub attack_queue_dropped: u64,
    pub attack_filter_dropped: u64,
    pub alarms: u64,
    pub reputation_msgs: u64,
    pub classifications: u64,
    pub rules_installed: u64,
    pub rules_expired: u64,
    pub crashes: u64,
    pub log_hash: String,
}

/// Sender demand overlapping `[lo, hi)`, in packets.
fn offered_in(sc: &Scenario, lo: f64, hi: f64) -> f64 {
    sc.senders
        .iter()
        .map(|s| {
            let span = (s.stop.min(hi) - s.start.max(lo)).max(0.0);
            s.max_rate * span
        })
        .sum()
}

pub fn compute_metrics(
    sc: &Scenario,
    seed: u64,
    log: &EventLog,
    stats: &SimStats,
) -> MetricsReport {
    let sender_triples: BTreeSet<(NodeId, NodeId, Proto)> = sc
        .senders
        .iter()
        .map(|s| (s.src, s.dst, s.proto))
        .collect();

    let mut first_malicious: Option<f64> = None;
    let mut first_install: Option<f64> = None;
    let mut legit_delivered = 0u64;
    let mut legit_queue_dropped = 0u64;
    let mut legit_filter_dropped = 0u64;
    let mut attack_delivered = 0u64;
    let mut attack_queue_dropped = 0u64;
    let mut attack_filter_dropped = 0u64;
    let mut alarms = 0u64;
    let mut reputation_msgs = 0u64;
    let mut classifications = 0u64;
    let mut rules_installed = 0u64;
    let mut rules_expired = 0u64;
    let mut crashes = 0u64;
    let mut sender_delivery_times: Vec<f64> = Vec::new();
    // Ground truth per flow, from inject records: (tagged, untagged) counts.
    let mut flow_truth: BTreeMap<(NodeId, NodeId, Proto), (u64, u64)> = BTreeMap::new();
    let mut pkt_flow: BTreeMap<u64, (NodeId, NodeId, Proto)> = BTreeMap::new();
    let mut legit_flows: BTreeSet<(NodeId, NodeId, Proto)> = BTreeSet::new();
    let mut blocked_flows: BTreeSet<(NodeId, NodeId, Proto)> = BTreeSet::new();

    for rec in log.records() {
        match &rec.event {
            LogEvent::Inject {
                pkt,
                src,
                spoof,
                dst,
                proto,
                tag,
                ..
            } => {
                let key = (spoof.unwrap_or(*src), *dst, *proto);
                let counts = flow_truth.entry(key).or_insert((0, 0));
                if tag.is_some() {
                    counts.0 += 1;
                } else {
                    counts.1 += 1;
                    legit_flows.insert(key);
                    pkt_flow.insert(*pkt, key);
                }
            }
            LogEvent::Deliver {
                src,
                dst,
                proto,
                tag,
                ..
            } => {
                if tag.is_some() {
                    attack_delivered += 1;
                } else if sender_triples.contains(&(*src, *dst, *proto)) {
                    legit_delivered += 1;
                    sender_delivery_times.push(rec.t);
                }
            }
            LogEvent::QueueDrop { tag, .. } => {
                if tag.is_some() {
                    attack_queue_dropped += 1;
                } else {
                    legit_queue_dropped += 1;
                }
            }
            LogEvent::RuleDrop { pkt, tag, .. } => {
                if tag.is_some() {
                    attack_filter_dropped += 1;
                } else {
                    legit_filter_dropped += 1;
                    if let Some(key) = pkt_flow.get(pkt) {
                        blocked_flows.insert(*key);
                    }
                }
            }
            LogEvent::Alarm { .. } => alarms += 1,
            LogEvent::Reputation { .. } => reputation_msgs += 1,
            LogEvent::Classify { class, members, .. } => {
                classifications += 1;
                if *class == TrustClass::Malicious && first_malicious.is_none() {
                    let attack_members = members
                        .iter()
                        .filter(|m| {
                            flow_truth
                                .get(&(m.src, m.dst, m.proto))
                                .is_some_and(|(tagged, untagged)| tagged > untagged)
                        })
                        .count();
                    if attack_members * 2 > members.len() {
                        first_malicious = Some(rec.t);
                    }
                }
            }
            LogEvent::RuleInstall { .. } => {
                rules_installed += 1;
                if first_install.is_none() {
                    first_install = Some(rec.t);
                }
            }
            LogEvent::RuleExpire { .. } => rules_expired += 1,
            LogEvent::Crash { .. } => crashes += 1,
            _ => {}
        }
    }

    let false_positive_rate = if legit_flows.is_empty() {
        0.0
    } else {
        blocked_flows.len() as f64 / legit_flows.len() as f64
    };

    let attack_start = sc
        .attacks
        .iter()
        .map(|a| a.start)
        .fold(None, |m: Option<f64>, s| Some(m.map_or(s, |v| v.min(s))));
    let attack_stop = sc
        .attacks
        .iter()
        .map(|a| a.stop)
        .fold(None, |m: Option<f64>, s| Some(m.map_or(s, |v| v.max(s))));

    let end = sc.duration + 1e-9;
    // Phase boundaries: the attack splits the run at its start, and again at
    // mitigation (or, failing that, the attack's own end).
    let (before, during, after) = match (attack_start, attack_stop) {
        (Some(start), Some(stop)) => {
            let pivot = first_install.unwrap_or(f64::INFINITY).min(stop).min(end);
            ((0.0, start), (start, pivot), (pivot, end))
        }
        _ => ((0.0, end), (0.0, end), (0.0, end)),
    };

    let goodput = |lo: f64, hi: f64| -> Option<f64> {
        let offered = offered_in(sc, lo, hi);
        if offered <= 1e-9 {
            return None;
        }
        let got = sender_delivery_times
            .iter()
            .filter(|&&t| t >= lo && t < hi)
            .count() as f64;
        Some(got / offered)
    };

    let recovery = first_install.and_then(|fi| {
        let lo = fi + RECOVERY_DELAY;
        if lo >= end {
            return None;
        }
        goodput(lo, end)
    });

    let kinds = if sc.attacks.is_empty() {
        "none".to_string()
    } else {
        sc.attacks
            .iter()
            .map(|a| a.kind.to_string())
            .collect::<Vec<_>>()
            .join("+")
    };

    MetricsReport {
        scenario: sc.name.clone(),
        seed,
        duration: sc.duration,
        attacks: kinds,
        attack_start,
        attack_stop,
        detection_latency: match (first_malicious, attack_start) {
            (Some(t), Some(s)) => Some(t - s),
            _ => None,
        },
        mitigation_latency: match (first_install, attack_start) {
            (Some(t), Some(s)) => Some(t - s),
            _ => None,
        },
        false_positive_rate,
        goodput_before: goodput(before.0, before.1),
        goodput_during: goodput(during.0, during.1),
        goodput_after: goodput(after.0, after.1),
        goodput_recovery: recovery,
        injected: stats.injected,
        delivered: stats.delivered,
        queue_dropped: stats.queue_dropped,
        filter_dropped: stats.filter_dropped,
        in_flight: stats.in_flight,
        conservation: stats.conservation_holds(),
        legit_delivered,
        legit_queue_dropped,
        legit_filter_dropped,
        attack_delivered,
        attack_queue_dropped,
        attack_filter_dropped,
        alarms,
        reputation_msgs,
        classifications,
        rules_installed,
        rules_expired,
        crashes,
        log_hash: log.hash(),
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| format!("{x:.6}"))
}

impl MetricsReport {
    pub const CSV_HEADER: &'static str = "scenario,seed,duration,attacks,attack_start,attack_stop,detection_latency,mitigation_latency,false_positive_rate,goodput_before,goodput_during,goodput_after,goodput_recovery,injected,delivered,queue_dropped,filter_dropped,in_flight,conservation,legit_delivered,legit_queue_dropped,legit_filter_dropped,attack_delivered,attack_queue_dropped,attack_filter_dropped,alarms,reputation_msgs,classifications,rules_installed,rules_expired,crashes,log_hash";

    pub fn to_csv_row(&self) -> String {
        let mut s = String::new();
        write!(
            s,
            "{},{},{:.6},{},{},{},{},{},{:.6},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.scenario,
            self.seed,
            self.duration,
            self.attacks,
            opt(self.attack_start),
            opt(self.attack_stop),
            opt(self.detection_latency),
            opt(self.mitigation_latency),
            self.false_positive_rate,
            opt(self.goodput_before),
            opt(self.goodput_during),
            opt(self.goodput_after),
            opt(self.goodput_recovery),
            self.injected,
            self.delivered,
            self.queue_dropped,
            self.filter_dropped,
            self.in_flight,
            self.conservation,
            self.legit_delivered,
            self.legit_queue_dropped,
            self.legit_filter_dropped,
            self.attack_delivered,
            self.attack_queue_dropped,
            self.attack_filter_dropped,
            self.alarms,
            self.reputation_msgs,
            self.classifications,
            self.rules_installed,
            self.rules_expired,
            self.crashes,
            self.log_hash,
        )
        .unwrap();
        s
    }

    pub fn to_csv(&self) -> String {
        format!("{}\n{}\n", Self::CSV_HEADER, self.to_csv_row())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
