//! Scenario files: the TOML schema, strict parsing, and cross-checks.
//!
//! A scenario declares the topology, the legitimate senders, the attack
//! schedule, and the agent deployment. Parsing is strict: unknown keys are
//! rejected by name, and every cross-reference (node names, agent ids) is
//! checked before a world is built.

use std::collections::BTreeSet;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::agents::Policy;
use crate::attacks::{AimdConfig, AttackKind, BurstParams, GeneratorConfig, GeneratorError};
use crate::packet::Proto;
use crate::topology::{Link, Node, NodeId, NodeKind, Topology, TopologyError};
use crate::trust::TrustParams;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read scenario file: {0}")]
    Io(#[from] std::io::Error),
    #[error("scenario parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("duration must be positive, got {0}")]
    BadDuration(f64),
    #[error("bus_latency must be positive and finite, got {0}")]
    BadBusLatency(f64),
    #[error("recovery_after must be positive and finite, got {0}")]
    BadRecovery(f64),
    #[error("{context} refers to unknown node {name:?}")]
    UnknownNode { context: String, name: String },
    #[error("node kind {0:?} is not one of host, router, ne")]
    BadNodeKind(String),
    #[error("protocol {0:?} is not one of udp, icmp, tcp_like")]
    BadProto(String),
    #[error("attack kind {0:?} is not recognized (see `list-attacks`)")]
    BadAttackKind(String),
    #[error("duplicate agent id {0:?}")]
    DuplicateAgent(String),
    #[error("{context} refers to unknown detection agent {name:?}")]
    UnknownDra { context: String, name: String },
    #[error("detection agent {dra:?} lists {node:?} which is not an ne node")]
    NotAnNe { dra: String, node: String },
    #[error("sensor {id:?} watches {from:?}->{to:?} but no such link is declared")]
    NoSuchLink { id: String, from: String, to: String },
    #[error("sender from {src:?} to itself is not allowed")]
    SelfSender { src: String },
    #[error("sender rates must satisfy 0 < min <= max, got min {min} max {max}")]
    BadSenderRates { min: f64, max: f64 },
    #[error("reflector {name:?} does not answer echoes (set echo_responder = true)")]
    SilentReflector { name: String },
    #[error("attack window [{start}, {stop}) is empty or outside the run")]
    BadAttackWindow { start: f64, stop: f64 },
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Attack(#[from] GeneratorError),
}

fn default_bus_latency() -> f64 {
    0.01
}
fn default_cpu() -> f64 {
    1000.0
}
fn default_mem() -> u32 {
    64
}
fn default_queue() -> u32 {
    64
}
fn default_link_latency() -> f64 {
    0.005
}
fn default_min_rate() -> f64 {
    1.0
}
fn default_additive_step() -> f64 {
    1.0
}
fn default_rto() -> f64 {
    1.0
}
fn default_sender_size() -> u32 {
    1000
}
fn default_proto() -> String {
    "tcp_like".to_string()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: Option<String>,
    duration: f64,
    seed: Option<u64>,
    /// Seconds a crashed host stays down. Absent means the crash is final.
    recovery_after: Option<f64>,
    #[serde(default = "default_bus_latency")]
    bus_latency: f64,
    #[serde(default)]
    nodes: Vec<RawNode>,
    #[serde(default)]
    links: Vec<RawLink>,
    #[serde(default)]
    senders: Vec<RawSender>,
    #[serde(default)]
    attacks: Vec<RawAttack>,
    #[serde(default)]
    agents: RawAgents,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    name: String,
    kind: String,
    #[serde(default = "default_cpu")]
    cpu: f64,
    #[serde(default = "default_mem")]
    mem: u32,
    #[serde(default)]
    echo_responder: bool,
    #[serde(default)]
    vulnerable_to: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLink {
    from: String,
    to: String,
    capacity: f64,
    #[serde(default = "default_queue")]
    queue: u32,
    #[serde(default = "default_link_latency")]
    latency: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSender {
    src: String,
    dst: String,
    #[serde(default = "default_proto")]
    proto: String,
    max_rate: f64,
    #[serde(default = "default_min_rate")]
    min_rate: f64,
    initial_rate: Option<f64>,
    #[serde(default = "default_additive_step")]
    additive_step: f64,
    #[serde(default = "default_rto")]
    rto: f64,
    #[serde(default = "default_sender_size")]
    size: u32,
    #[serde(default)]
    start: f64,
    stop: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAttack {
    kind: String,
    #[serde(default)]
    sources: Vec<String>,
    victim: String,
    #[serde(default)]
    reflectors: Vec<String>,
    #[serde(default)]
    rate: f64,
    #[serde(default)]
    repeat_interval: f64,
    #[serde(default)]
    start: f64,
    stop: Option<f64>,
    burst: Option<RawBurst>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBurst {
    period: f64,
    length: f64,
    rate: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAgents {
    #[serde(default)]
    ns: Vec<RawNs>,
    #[serde(default)]
    hs: Vec<RawHs>,
    #[serde(default)]
    dra: Vec<RawDra>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNs {
    id: Option<String>,
    /// Directed link watched, as [from, to].
    vantage: [String; 2],
    dra: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHs {
    id: Option<String>,
    host: String,
    dra: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDra {
    id: Option<String>,
    #[serde(default)]
    nes: Vec<String>,
    #[serde(default)]
    subscriptions: Vec<String>,
    policy: Option<RawPolicy>,
    trust: Option<RawTrust>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPolicy {
    k_confirm: Option<u32>,
    rule_ttl: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTrust {
    tau: Option<f64>,
    eta: Option<f64>,
    alpha: Option<f64>,
    theta_mal: Option<f64>,
    theta_ben: Option<f64>,
    prior: Option<f64>,
    member_cap: Option<usize>,
}

/// Network sensor placement: watches traffic flowing `from -> to`.
#[derive(Clone, Debug)]
pub struct NsSpec {
    pub id: String,
    pub from: NodeId,
    pub to: NodeId,
    pub dra: String,
}

#[derive(Clone, Debug)]
pub struct HsSpec {
    pub id: String,
    pub host: NodeId,
    pub dra: String,
}

#[derive(Clone, Debug)]
pub struct DraSpec {
    pub id: String,
    pub nes: Vec<NodeId>,
    pub subscriptions: Vec<String>,
    pub policy: Policy,
    pub trust: TrustParams,
}

/// A fully resolved and validated scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub duration: f64,
    /// Seed baked into the file; the CLI flag overrides it.
    pub seed: Option<u64>,
    /// Crashed hosts come back after this many seconds, or never.
    pub recovery_after: Option<f64>,
    pub bus_latency: f64,
    pub topology: Topology,
    pub senders: Vec<AimdConfig>,
    pub attacks: Vec<GeneratorConfig>,
    pub ns: Vec<NsSpec>,
    pub hs: Vec<HsSpec>,
    pub dra: Vec<DraSpec>,
}

fn parse_kind(s: &str) -> Result<NodeKind, ScenarioError> {
    match s {
        "host" => Ok(NodeKind::Host),
        "router" => Ok(NodeKind::Router),
        "ne" => Ok(NodeKind::Ne),
        other => Err(ScenarioError::BadNodeKind(other.to_string())),
    }
}

fn parse_proto(s: &str) -> Result<Proto, ScenarioError> {
    match s {
        "udp" => Ok(Proto::Udp),
        "icmp" => Ok(Proto::Icmp),
        "tcp_like" => Ok(Proto::TcpLike),
        other => Err(ScenarioError::BadProto(other.to_string())),
    }
}

fn lookup_node(nodes: &[Node], context: &str, name: &str) -> Result<NodeId, ScenarioError> {
    nodes
        .iter()
        .find(|n| n.name == name)
        .map(|n| n.id)
        .ok_or_else(|| ScenarioError::UnknownNode {
            context: context.to_string(),
            name: name.to_string(),
        })
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Scenario, ScenarioError> {
        let text = std::fs::read_to_string(path)?;
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "scenario".to_string());
        Scenario::from_toml_str(&text, &stem)
    }

    pub fn from_toml_str(text: &str, default_name: &str) -> Result<Scenario, ScenarioError> {
        let raw: RawScenario = toml::from_str(text)?;
        resolve(raw, default_name)
    }
}

fn resolve(raw: RawScenario, default_name: &str) -> Result<Scenario, ScenarioError> {
    if !(raw.duration.is_finite() && raw.duration > 0.0) {
        return Err(ScenarioError::BadDuration(raw.duration));
    }
    if !(raw.bus_latency.is_finite() && raw.bus_latency > 0.0) {
        return Err(ScenarioError::BadBusLatency(raw.bus_latency));
    }
    if let Some(r) = raw.recovery_after {
        if !(r.is_finite() && r > 0.0) {
            return Err(ScenarioError::BadRecovery(r));
        }
    }
    let duration = raw.duration;

    let mut nodes = Vec::with_capacity(raw.nodes.len());
    for (i, n) in raw.nodes.iter().enumerate() {
        let mut vulnerable_to = Vec::new();
        for v in &n.vulnerable_to {
            let kind: AttackKind = v
                .parse()
                .map_err(|_| ScenarioError::BadAttackKind(v.clone()))?;
            vulnerable_to.push(kind);
        }
        nodes.push(Node {
            id: NodeId(i as u32),
            name: n.name.clone(),
            kind: parse_kind(&n.kind)?,
            cpu_capacity: n.cpu,
            mem_slots: n.mem as usize,
            echo_responder: n.echo_responder,
            vulnerable_to,
        });
    }

    let mut links = Vec::with_capacity(raw.links.len());
    for l in &raw.links {
        links.push(Link {
            from: lookup_node(&nodes, "link", &l.from)?,
            to: lookup_node(&nodes, "link", &l.to)?,
            capacity: l.capacity,
            queue_limit: l.queue as usize,
            latency: l.latency,
        });
    }
    let topology = Topology { nodes, links };
    topology.validate()?;

    let mut senders = Vec::with_capacity(raw.senders.len());
    for s in &raw.senders {
        let src = lookup_node(&topology.nodes, "sender", &s.src)?;
        let dst = lookup_node(&topology.nodes, "sender", &s.dst)?;
        if src == dst {
            return Err(ScenarioError::SelfSender {
                src: s.src.clone(),
            });
        }
        let rates_ok = s.min_rate.is_finite()
            && s.max_rate.is_finite()
            && s.min_rate > 0.0
            && s.min_rate <= s.max_rate;
        if !rates_ok {
            return Err(ScenarioError::BadSenderRates {
                min: s.min_rate,
                max: s.max_rate,
            });
        }
        senders.push(AimdConfig {
            src,
            dst,
            proto: parse_proto(&s.proto)?,
            max_rate: s.max_rate,
            min_rate: s.min_rate,
            initial_rate: s.initial_rate.unwrap_or(s.max_rate),
            additive_step: s.additive_step,
            rto: s.rto,
            size: s.size,
            start: s.start,
            stop: s.stop.unwrap_or(duration),
        });
    }

    let mut attacks = Vec::with_capacity(raw.attacks.len());
    for a in &raw.attacks {
        let kind: AttackKind = a
            .kind
            .parse()
            .map_err(|_| ScenarioError::BadAttackKind(a.kind.clone()))?;
        let victim = lookup_node(&topology.nodes, "attack victim", &a.victim)?;
        let mut sources = Vec::new();
        for s in &a.sources {
            sources.push(lookup_node(&topology.nodes, "attack source", s)?);
        }
        let mut reflectors = Vec::new();
        for r in &a.reflectors {
            let id = lookup_node(&topology.nodes, "attack reflector", r)?;
            if !topology.node(id).echo_responder {
                return Err(ScenarioError::SilentReflector { name: r.clone() });
            }
            reflectors.push(id);
        }
        let stop = a.stop.unwrap_or(duration);
        if !(a.start >= 0.0 && a.start < stop && a.start < duration) {
            return Err(ScenarioError::BadAttackWindow {
                start: a.start,
                stop,
            });
        }
        let cfg = GeneratorConfig {
            kind,
            sources,
            victim,
            reflectors,
            rate: a.rate,
            start: a.start,
            stop,
            repeat_interval: a.repeat_interval,
            burst: a.burst.as_ref().map(|b| BurstParams {
                period: b.period,
                length: b.length,
                burst_rate: b.rate,
            }),
        };
        cfg.validate()?;
        attacks.push(cfg);
    }

    let mut agent_ids: BTreeSet<String> = BTreeSet::new();
    let mut claim = |id: &str| -> Result<(), ScenarioError> {
        if !agent_ids.insert(id.to_string()) {
            return Err(ScenarioError::DuplicateAgent(id.to_string()));
        }
        Ok(())
    };

    let mut dra = Vec::with_capacity(raw.agents.dra.len());
    for (i, d) in raw.agents.dra.iter().enumerate() {
        let id = d.id.clone().unwrap_or_else(|| format!("dra{i}"));
        claim(&id)?;
        let mut nes = Vec::new();
        for n in &d.nes {
            let nid = lookup_node(&topology.nodes, "detection agent", n)?;
            if topology.node(nid).kind != NodeKind::Ne {
                return Err(ScenarioError::NotAnNe {
                    dra: id.clone(),
                    node: n.clone(),
                });
            }
            nes.push(nid);
        }
        let mut policy = Policy::default();
        if let Some(p) = &d.policy {
            if let Some(k) = p.k_confirm {
                policy.k_confirm = k;
            }
            if let Some(t) = p.rule_ttl {
                policy.rule_ttl = t;
            }
        }
        let mut trust = TrustParams::default();
        if let Some(t) = &d.trust {
            if let Some(v) = t.tau {
                trust.tau = v;
            }
            if let Some(v) = t.eta {
                trust.eta = v;
            }
            if let Some(v) = t.alpha {
                trust.alpha = v;
            }
            if let Some(v) = t.theta_mal {
                trust.theta_mal = v;
            }
            if let Some(v) = t.theta_ben {
                trust.theta_ben = v;
            }
            if let Some(v) = t.prior {
                trust.prior = v;
            }
            if let Some(v) = t.member_cap {
                trust.member_cap = v;
            }
        }
        dra.push(DraSpec {
            id,
            nes,
            subscriptions: d.subscriptions.clone(),
            policy,
            trust,
        });
    }
    let dra_exists = |context: &str, name: &str| -> Result<(), ScenarioError> {
        if dra.iter().any(|d| d.id == name) {
            Ok(())
        } else {
            Err(ScenarioError::UnknownDra {
                context: context.to_string(),
                name: name.to_string(),
            })
        }
    };
    for d in &dra {
        for sub in &d.subscriptions {
            dra_exists(&format!("subscription of {}", d.id), sub)?;
        }
    }

    let mut ns = Vec::with_capacity(raw.agents.ns.len());
    for (i, n) in raw.agents.ns.iter().enumerate() {
        let id = n.id.clone().unwrap_or_else(|| format!("ns{i}"));
        claim(&id)?;
        let from = lookup_node(&topology.nodes, "sensor vantage", &n.vantage[0])?;
        let to = lookup_node(&topology.nodes, "sensor vantage", &n.vantage[1])?;
        let declared = topology
            .links
            .iter()
            .any(|l| (l.from == from && l.to == to) || (l.from == to && l.to == from));
        if !declared {
            return Err(ScenarioError::NoSuchLink {
                id: id.clone(),
                from: n.vantage[0].clone(),
                to: n.vantage[1].clone(),
            });
        }
        dra_exists(&format!("sensor {id}"), &n.dra)?;
        ns.push(NsSpec {
            id,
            from,
            to,
            dra: n.dra.clone(),
        });
    }

    let mut hs = Vec::with_capacity(raw.agents.hs.len());
    for (i, h) in raw.agents.hs.iter().enumerate() {
        let id = h.id.clone().unwrap_or_else(|| format!("hs{i}"));
        claim(&id)?;
        let host = lookup_node(&topology.nodes, "host sensor", &h.host)?;
        dra_exists(&format!("host sensor {id}"), &h.dra)?;
        hs.push(HsSpec {
            id,
            host,
            dra: h.dra.clone(),
        });
    }

    Ok(Scenario {
        name: raw.name.unwrap_or_else(|| default_name.to_string()),
        duration,
        seed: raw.seed,
        recovery_after: raw.recovery_after,
        bus_latency: raw.bus_latency,
        topology,
        senders,
        attacks,
        ns,
        hs,
        dra,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINI: &str = r#"
        duration = 10.0

        [[nodes]]
        name = "a"
        kind = "host"

        [[nodes]]
        name = "ne1"
        kind = "ne"

        [[nodes]]
        name = "v"
        kind = "host"
        cpu = 100.0

        [[links]]
        from = "a"
        to = "ne1"
        capacity = 1000.0

        [[links]]
        from = "ne1"
        to = "v"
        capacity = 200.0
        queue = 50
        latency = 0.01

        [[senders]]
        src = "a"
        dst = "v"
        max_rate = 15.0

        [[attacks]]
        kind = "udp_flood"
        sources = ["a"]
        victim = "v"
        rate = 100.0
        start = 2.0

        [agents]
        [[agents.dra]]
        id = "dra0"
        nes = ["ne1"]

        [[agents.ns]]
        vantage = ["ne1", "v"]
        dra = "dra0"

        [[agents.hs]]
        host = "v"
        dra = "dra0"
    "#;

    #[test]
    fn parses_and_resolves_names() {
        let sc = Scenario::from_toml_str(MINI, "mini").unwrap();
        assert_eq!(sc.name, "mini");
        assert_eq!(sc.topology.nodes.len(), 3);
        assert_eq!(sc.senders[0].dst, NodeId(2));
        assert_eq!(sc.senders[0].stop, 10.0);
        assert_eq!(sc.senders[0].initial_rate, 15.0);
        assert_eq!(sc.attacks[0].victim, NodeId(2));
        assert_eq!(sc.ns[0].id, "ns0");
        assert_eq!(sc.ns[0].from, NodeId(1));
        assert_eq!(sc.dra[0].policy.k_confirm, 3);
        assert_eq!(sc.topology.links[1].queue_limit, 50);
        assert_eq!(sc.topology.links[0].queue_limit, 64);
    }

    #[test]
    fn rejects_unknown_keys_by_name() {
        let bad = MINI.replace("max_rate = 15.0", "max_rate = 15.0\nburst_len = 3");
        let err = Scenario::from_toml_str(&bad, "mini").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("burst_len"), "got: {msg}");
    }

    #[test]
    fn rejects_unknown_node_references() {
        let bad = MINI.replace("victim = \"v\"", "victim = \"ghost\"");
        let err = Scenario::from_toml_str(&bad, "mini").unwrap_err();
        assert!(err.to_string().contains("ghost"));
    }

    #[test]
    fn rejects_sensor_on_undeclared_link() {
        let bad = MINI.replace("vantage = [\"ne1\", \"v\"]", "vantage = [\"a\", \"v\"]");
        let err = Scenario::from_toml_str(&bad, "mini").unwrap_err();
        assert!(matches!(err, ScenarioError::NoSuchLink { .. }));
    }

    #[test]
    fn rejects_sensor_without_its_agent() {
        let bad = MINI.replace("dra = \"dra0\"", "dra = \"dra9\"");
        let err = Scenario::from_toml_str(&bad, "mini").unwrap_err();
        assert!(matches!(err, ScenarioError::UnknownDra { .. }));
    }

    #[test]
    fn rejects_reflection_off_silent_nodes() {
        let bad = MINI.replace(
            "kind = \"udp_flood\"\n        sources = [\"a\"]\n        victim = \"v\"\n        rate = 100.0",
            "kind = \"smurf\"\n        sources = [\"a\"]\n        victim = \"v\"\n        reflectors = [\"ne1\"]\n        rate = 100.0",
        );
        let err = Scenario::from_toml_str(&bad, "mini").unwrap_err();
        assert!(matches!(err, ScenarioError::SilentReflector { .. }));
    }

    #[test]
    fn rejects_vulnerability_to_unknown_kind() {
        let bad = MINI.replace(
            "name = \"v\"\n        kind = \"host\"",
            "name = \"v\"\n        kind = \"host\"\n        vulnerable_to = [\"slowloris\"]",
        );
        let err = Scenario::from_toml_str(&bad, "mini").unwrap_err();
        assert!(matches!(err, ScenarioError::BadAttackKind(_)));
    }

    #[test]
    fn rejects_empty_attack_window() {
        let bad = MINI.replace("start = 2.0", "start = 2.0\n        stop = 2.0");
        let err = Scenario::from_toml_str(&bad, "mini").unwrap_err();
        assert!(matches!(err, ScenarioError::BadAttackWindow { .. }));
    }

    #[test]
    fn rejects_non_finite_knobs() {
        // `inf` is valid TOML; an infinite rate would collapse the emission
        // spacing to zero and hang the run.
        let bad = MINI.replace("rate = 100.0", "rate = inf");
        assert!(Scenario::from_toml_str(&bad, "mini").is_err());

        let bad = MINI.replace("max_rate = 15.0", "max_rate = inf");
        assert!(matches!(
            Scenario::from_toml_str(&bad, "mini").unwrap_err(),
            ScenarioError::BadSenderRates { .. }
        ));

        let bad = MINI.replace("capacity = 200.0", "capacity = nan");
        assert!(Scenario::from_toml_str(&bad, "mini").is_err());

        let bad = MINI.replace("cpu = 100.0", "cpu = inf");
        assert!(Scenario::from_toml_str(&bad, "mini").is_err());
    }

    #[test]
    fn explicit_name_wins_over_file_stem() {
        let named = format!("name = \"custom\"\n{MINI}");
        let sc = Scenario::from_toml_str(&named, "mini").unwrap();
        assert_eq!(sc.name, "custom");
    }

    #[test]
    fn seed_and_recovery_are_optional_knobs() {
        let sc = Scenario::from_toml_str(MINI, "mini").unwrap();
        assert_eq!(sc.seed, None);
        assert_eq!(sc.recovery_after, None);

        let with = format!("seed = 7\nrecovery_after = 12.5\n{MINI}");
        let sc = Scenario::from_toml_str(&with, "mini").unwrap();
        assert_eq!(sc.seed, Some(7));
        assert_eq!(sc.recovery_after, Some(12.5));

        let bad = format!("recovery_after = 0.0\n{MINI}");
        let err = Scenario::from_toml_str(&bad, "mini").unwrap_err();
        assert!(matches!(err, ScenarioError::BadRecovery(_)));
    }
}
