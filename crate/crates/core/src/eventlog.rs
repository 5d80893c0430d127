//! Structured run log with a stable text rendering.
//!
//! Every observable event of a run is appended here in simulation order.
//! The text form is deterministic line by line, so a SHA-256 over it serves
//! as a fingerprint for reproducibility checks; the structured form feeds
//! the metrics pass without reparsing.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::agents::{AlarmKind, Predicate, RuleId};
use crate::attacks::AttackKind;
use crate::flows::FlowKey;
use crate::packet::Proto;
use crate::topology::NodeId;
use crate::trust::{ClusterId, RepMode, TrustClass};

#[derive(Clone, Debug)]
pub enum LogEvent {
    Inject {
        pkt: u64,
        src: NodeId,
        spoof: Option<NodeId>,
        dst: NodeId,
        proto: Proto,
        size: u32,
        tag: Option<AttackKind>,
    },
    Deliver {
        pkt: u64,
        src: NodeId,
        dst: NodeId,
        proto: Proto,
        size: u32,
        tag: Option<AttackKind>,
    },
    QueueDrop {
        pkt: u64,
        from: NodeId,
        to: NodeId,
        tag: Option<AttackKind>,
    },
    RuleDrop {
        pkt: u64,
        ne: NodeId,
        rule: RuleId,
        rate: f64,
        dst: NodeId,
        proto: Proto,
        tag: Option<AttackKind>,
    },
    /// A packet screened by an element with live rules and let through.
    NePass {
        pkt: u64,
        ne: NodeId,
        rate: f64,
        dst: NodeId,
        proto: Proto,
        tag: Option<AttackKind>,
    },
    Alarm {
        host: NodeId,
        severity: f64,
        kind: AlarmKind,
    },
    Reputation {
        origin: String,
        to: String,
        mode: RepMode,
        centroid: [f64; 4],
        trust: f64,
        weight: u64,
    },
    Classify {
        dra: String,
        cluster: ClusterId,
        class: TrustClass,
        trust: f64,
        members: Vec<FlowKey>,
    },
    RuleInstall {
        ne: NodeId,
        rule: RuleId,
        predicates: Vec<Predicate>,
        ttl: f64,
        origin: String,
        refreshed: bool,
    },
    RuleExpire {
        ne: NodeId,
        rule: RuleId,
    },
    Crash {
        host: NodeId,
        cause: String,
    },
    Recover {
        host: NodeId,
    },
}

#[derive(Clone, Debug)]
pub struct LogRecord {
    pub t: f64,
    pub event: LogEvent,
}

pub struct EventLog {
    names: Vec<String>,
    records: Vec<LogRecord>,
}

fn tag_token(tag: &Option<AttackKind>) -> String {
    match tag {
        Some(k) => k.to_string(),
        None => "-".to_string(),
    }
}

fn members_token(names: &[String], members: &[FlowKey]) -> String {
    if members.is_empty() {
        return "-".to_string();
    }
    members
        .iter()
        .map(|k| {
            format!(
                "{}>{}:{}",
                names[k.src.idx()],
                names[k.dst.idx()],
                k.proto
            )
        })
        .collect::<Vec<_>>()
        .join("|")
}

fn predicates_token(names: &[String], predicates: &[Predicate]) -> String {
    let one = |p: &Predicate| match p {
        Predicate::Dst(n) => format!("dst:{}", names[n.idx()]),
        Predicate::Proto(pr) => format!("proto:{pr}"),
        Predicate::SrcIn(set) => {
            let list: Vec<&str> = set.iter().map(|n| names[n.idx()].as_str()).collect();
            format!("src_in:{}", list.join("|"))
        }
        Predicate::RateAtLeast(r) => format!("rate>={r:.6}"),
        Predicate::SizeAtLeast(s) => format!("size>={s}"),
    };
    predicates
        .iter()
        .map(one)
        .collect::<Vec<_>>()
        .join(",")
}

impl EventLog {
    /// `names` maps node index to display name.
    pub fn new(names: Vec<String>) -> EventLog {
        EventLog {
            names,
            records: Vec::new(),
        }
    }

    pub fn push(&mut self, t: f64, event: LogEvent) {
        self.records.push(LogRecord { t, event });
    }

    pub fn records(&self) -> &[LogRecord] {
        &self.records
    }

    pub fn name(&self, n: NodeId) -> &str {
        &self.names[n.idx()]
    }

    pub fn render_record(&self, rec: &LogRecord) -> String {
        let nm = |n: NodeId| self.names[n.idx()].as_str();
        let mut s = format!("t={:.6} ", rec.t);
        match &rec.event {
            LogEvent::Inject {
                pkt,
                src,
                spoof,
                dst,
                proto,
                size,
                tag,
            } => {
                let spoof_tok = match spoof {
                    Some(n) => nm(*n).to_string(),
                    None => "-".to_string(),
                };
                write!(
                    s,
                    "ev=inject pkt={pkt} src={} spoof={spoof_tok} dst={} proto={proto} size={size} tag={}",
                    nm(*src),
                    nm(*dst),
                    tag_token(tag)
                )
                .unwrap();
            }
            LogEvent::Deliver {
                pkt,
                src,
                dst,
                proto,
                size,
                tag,
            } => {
                write!(
                    s,
                    "ev=deliver pkt={pkt} src={} dst={} proto={proto} size={size} tag={}",
                    nm(*src),
                    nm(*dst),
                    tag_token(tag)
                )
                .unwrap();
            }
            LogEvent::QueueDrop { pkt, from, to, tag } => {
                write!(
                    s,
                    "ev=queue_drop pkt={pkt} link={}->{} tag={}",
                    nm(*from),
                    nm(*to),
                    tag_token(tag)
                )
                .unwrap();
            }
            LogEvent::RuleDrop {
                pkt,
                ne,
                rule,
                rate,
                dst,
                proto,
                tag,
            } => {
                write!(
                    s,
                    "ev=rule_drop pkt={pkt} ne={} rule={rule} rate={rate:.6} dst={} proto={proto} tag={}",
                    nm(*ne),
                    nm(*dst),
                    tag_token(tag)
                )
                .unwrap();
            }
            LogEvent::NePass {
                pkt,
                ne,
                rate,
                dst,
                proto,
                tag,
            } => {
                write!(
                    s,
                    "ev=ne_pass pkt={pkt} ne={} rate={rate:.6} dst={} proto={proto} tag={}",
                    nm(*ne),
                    nm(*dst),
                    tag_token(tag)
                )
                .unwrap();
            }
            LogEvent::Alarm {
                host,
                severity,
                kind,
            } => {
                write!(
                    s,
                    "ev=alarm host={} severity={severity:.6} kind={kind}",
                    nm(*host)
                )
                .unwrap();
            }
            LogEvent::Reputation {
                origin,
                to,
                mode,
                centroid,
                trust,
                weight,
            } => {
                write!(
                    s,
                    "ev=reputation origin={origin} to={to} mode={mode} f1={:.6} f2={:.6} f3={:.6} f4={:.6} trust={trust:.6} weight={weight}",
                    centroid[0], centroid[1], centroid[2], centroid[3]
                )
                .unwrap();
            }
            LogEvent::Classify {
                dra,
                cluster,
                class,
                trust,
                members,
            } => {
                write!(
                    s,
                    "ev=classify dra={dra} cluster=c{cluster} class={class} trust={trust:.6} members={}",
                    members_token(&self.names, members)
                )
                .unwrap();
            }
            LogEvent::RuleInstall {
                ne,
                rule,
                predicates,
                ttl,
                origin,
                refreshed,
            } => {
                write!(
                    s,
                    "ev=rule_install ne={} rule={rule} predicates=[{}] ttl={ttl:.6} origin={origin} refreshed={refreshed}",
                    nm(*ne),
                    predicates_token(&self.names, predicates)
                )
                .unwrap();
            }
            LogEvent::RuleExpire { ne, rule } => {
                write!(s, "ev=rule_expire ne={} rule={rule}", nm(*ne)).unwrap();
            }
            LogEvent::Crash { host, cause } => {
                write!(s, "ev=crash host={} cause={cause}", nm(*host)).unwrap();
            }
            LogEvent::Recover { host } => {
                write!(s, "ev=recover host={}", nm(*host)).unwrap();
            }
        }
        s
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for rec in &self.records {
            out.push_str(&self.render_record(rec));
            out.push('\n');
        }
        out
    }

    /// SHA-256 of the rendered log, as lowercase hex.
    pub fn hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.render().as_bytes());
        let digest = hasher.finalize();
        let mut hex = String::with_capacity(64);
        for byte in digest {
            write!(hex, "{byte:02x}").unwrap();
        }
        hex
    }
}
