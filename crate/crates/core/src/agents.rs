//! The four agent roles and the filter-rule model.
//!
//! * Network sensors summarize link traffic into per-flow windows and raise
//!   immediate signature alarms for malformed packets.
//! * Host sensors watch CPU, memory, and liveness of one host.
//! * Detection agents own a trust model, fold alarms back into cluster
//!   trust, exchange reputation with subscribed peers, and emit filter rules
//!   once a cluster stays malicious long enough.
//! * Network elements enforce installed rules on every packet they forward.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::attacks::AttackKind;
use crate::flows::{FlowKey, FlowTable, FlowWindow, SIZE_REF};
use crate::packet::{Packet, Proto};
use crate::topology::{DirLinkId, NodeId, Routes};
use crate::trust::{
    ClusterId, RepMode, ReputationMessage, TrustClass, TrustModel, TrustUpdate,
};

/// How far back alarms count when aggregating feedback, in seconds.
pub const FEEDBACK_HORIZON: f64 = 5.0;
/// CPU utilization above this is considered depleted.
pub const CPU_ALARM_LEVEL: f64 = 0.9;
/// The depletion must hold this long before a host sensor alarms.
pub const CPU_SUSTAIN: f64 = 1.0;
/// Minimum spacing of resource alarms per host.
pub const ALARM_COOLDOWN: f64 = 1.0;
/// Packets larger than this are malformed.
pub const MAX_PACKET_SIZE: u32 = 65535;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignatureId {
    PingOfDeath,
    Land,
}

impl fmt::Display for SignatureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SignatureId::PingOfDeath => "ping_of_death",
            SignatureId::Land => "land",
        })
    }
}

/// Packet-shape checks that need no traffic history.
pub fn signature_match(p: &Packet) -> Option<SignatureId> {
    if p.size > MAX_PACKET_SIZE {
        Some(SignatureId::PingOfDeath)
    } else if p.effective_src() == p.dst {
        Some(SignatureId::Land)
    } else {
        None
    }
}

/// Attack kind a signature corresponds to, for vulnerability checks.
pub fn signature_kind(sig: SignatureId) -> AttackKind {
    match sig {
        SignatureId::PingOfDeath => AttackKind::PingOfDeath,
        SignatureId::Land => AttackKind::Land,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlarmKind {
    ResourceDepletion,
    Signature(SignatureId),
}

impl fmt::Display for AlarmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlarmKind::ResourceDepletion => f.write_str("resource_depletion"),
            AlarmKind::Signature(s) => write!(f, "signature:{s}"),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Alarm {
    pub host: NodeId,
    pub at: f64,
    /// Damage estimate in [0, 1].
    pub severity: f64,
    pub kind: AlarmKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RuleId(pub u64);

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Predicate {
    Dst(NodeId),
    Proto(Proto),
    SrcIn(Vec<NodeId>),
    /// Matches flows currently at or above this packet rate.
    RateAtLeast(f64),
    SizeAtLeast(u32),
}

#[derive(Clone, Debug)]
pub struct FilterRule {
    pub id: RuleId,
    pub predicates: Vec<Predicate>,
    pub installed_at: f64,
    pub ttl: f64,
    pub origin_dra: String,
}

impl FilterRule {
    /// Active over the half-open interval [installed_at, installed_at + ttl).
    pub fn active_at(&self, t: f64) -> bool {
        t >= self.installed_at && t < self.installed_at + self.ttl
    }

    /// True when every predicate holds for the packet at the given measured
    /// flow rate.
    pub fn matches(&self, p: &Packet, rate: f64) -> bool {
        self.predicates.iter().all(|pred| match pred {
            Predicate::Dst(n) => p.dst == *n,
            Predicate::Proto(pr) => p.proto == *pr,
            Predicate::SrcIn(set) => set.contains(&p.effective_src()),
            Predicate::RateAtLeast(r) => rate >= *r,
            Predicate::SizeAtLeast(s) => p.size >= *s,
        })
    }
}

#[derive(Debug, Error)]
pub enum RuleError {
    #[error("cannot generalize a rule from an empty member list")]
    EmptyMembers,
    #[error("refusing a rule whose only predicate is a rate bound")]
    RateOnly,
}

/// Latest window summary of one member flow.
#[derive(Clone, Copy, Debug)]
pub struct MemberRecord {
    pub key: FlowKey,
    pub pkt_rate: f64,
    pub mean_size: f64,
}

/// Derives filter predicates shared by every member flow of a cluster:
/// common destination and protocol when they exist, a minimum-rate bound,
/// and a size bound when the members run oversized.
pub fn generalize_rule(members: &[MemberRecord]) -> Result<Vec<Predicate>, RuleError> {
    if members.is_empty() {
        return Err(RuleError::EmptyMembers);
    }
    let mut predicates = Vec::new();
    let first = members[0].key;
    if members.iter().all(|m| m.key.dst == first.dst) {
        predicates.push(Predicate::Dst(first.dst));
    }
    if members.iter().all(|m| m.key.proto == first.proto) {
        predicates.push(Predicate::Proto(first.proto));
    }
    let mean_ratio =
        members.iter().map(|m| m.mean_size / SIZE_REF).sum::<f64>() / members.len() as f64;
    if mean_ratio > 2.0 {
        predicates.push(Predicate::SizeAtLeast(MAX_PACKET_SIZE + 1));
    }
    let min_rate = members
        .iter()
        .map(|m| m.pkt_rate)
        .fold(f64::INFINITY, f64::min);
    predicates.push(Predicate::RateAtLeast(min_rate));
    if predicates.len() == 1 {
        return Err(RuleError::RateOnly);
    }
    Ok(predicates)
}

/// Filter state of one reconfigurable network element.
pub struct NeState {
    pub node: NodeId,
    rules: Vec<FilterRule>,
    counters: BTreeMap<FlowKey, std::collections::VecDeque<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum NeVerdict {
    Drop { rule: RuleId, rate: f64 },
    Pass { rate: f64, rules_active: bool },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InstallOutcome {
    Installed,
    /// Same predicates already present: the existing rule's clock restarts.
    Refreshed(RuleId),
}

impl NeState {
    pub fn new(node: NodeId) -> NeState {
        NeState {
            node,
            rules: Vec::new(),
            counters: BTreeMap::new(),
        }
    }

    pub fn rules(&self) -> &[FilterRule] {
        &self.rules
    }

    /// Removes rules whose ttl has lapsed, returning their ids.
    pub fn expire_rules(&mut self, now: f64) -> Vec<RuleId> {
        let mut gone = Vec::new();
        self.rules.retain(|r| {
            if r.active_at(now) {
                true
            } else {
                gone.push(r.id);
                false
            }
        });
        gone
    }

    pub fn install(&mut self, rule: FilterRule) -> InstallOutcome {
        if let Some(existing) = self
            .rules
            .iter_mut()
            .find(|r| r.predicates == rule.predicates)
        {
            existing.installed_at = rule.installed_at;
            existing.ttl = rule.ttl;
            existing.origin_dra = rule.origin_dra;
            return InstallOutcome::Refreshed(existing.id);
        }
        self.rules.push(rule);
        self.rules.sort_by_key(|r| r.id);
        InstallOutcome::Installed
    }

    /// Screens one packet offered for forwarding: updates the flow's 1 s rate
    /// counter, then the lowest-id active rule whose predicates all hold
    /// drops it.
    pub fn apply(&mut self, p: &Packet, now: f64) -> NeVerdict {
        let counter = self.counters.entry(p.flow_key()).or_default();
        counter.push_back(now);
        while counter.front().is_some_and(|&t| t <= now - 1.0) {
            counter.pop_front();
        }
        let rate = counter.len() as f64;
        let mut rules_active = false;
        for rule in &self.rules {
            if !rule.active_at(now) {
                continue;
            }
            rules_active = true;
            if rule.matches(p, rate) {
                return NeVerdict::Drop { rule: rule.id, rate };
            }
        }
        NeVerdict::Pass { rate, rules_active }
    }
}

/// Traffic summaries one sensor sends its detection agent each window.
#[derive(Clone, Debug)]
pub struct FlowReport {
    pub sensor: String,
    pub at: f64,
    pub flows: Vec<FlowWindow>,
    pub closed: Vec<FlowKey>,
}

/// Network sensor: watches one directed link.
pub struct NsAgent {
    pub id: String,
    pub vantage: DirLinkId,
    pub dra: String,
    pub table: FlowTable,
}

impl NsAgent {
    pub fn new(id: String, vantage: DirLinkId, dra: String) -> NsAgent {
        NsAgent {
            id,
            vantage,
            dra,
            table: FlowTable::new(crate::flows::WINDOW_LEN, crate::flows::IDLE_TIMEOUT),
        }
    }

    /// Folds one observed packet into the current window; malformed packets
    /// raise an immediate full-severity alarm against their destination.
    pub fn observe(&mut self, p: &Packet, now: f64) -> Option<Alarm> {
        self.table.update_flow(p.flow_key(), p.size, now);
        signature_match(p).map(|sig| Alarm {
            host: p.dst,
            at: now,
            severity: 1.0,
            kind: AlarmKind::Signature(sig),
        })
    }

    pub fn close_window(&mut self, now: f64) -> FlowReport {
        let (flows, closed) = self.table.close_window(now);
        FlowReport {
            sensor: self.id.clone(),
            at: now,
            flows,
            closed,
        }
    }
}

/// What a host sensor sees when it samples its host.
#[derive(Clone, Copy, Debug)]
pub struct HostSnapshot {
    pub crashed: bool,
    pub cpu_util: f64,
    /// Utilization has been above [`CPU_ALARM_LEVEL`] for at least
    /// [`CPU_SUSTAIN`] seconds.
    pub cpu_sustained_high: bool,
    pub mem_full: bool,
}

/// Host sensor: samples one host's resources on a fixed cadence.
pub struct HsAgent {
    pub id: String,
    pub host: NodeId,
    pub dra: String,
    last_resource_alarm: Option<f64>,
    crash_reported: bool,
}

impl HsAgent {
    pub fn new(id: String, host: NodeId, dra: String) -> HsAgent {
        HsAgent {
            id,
            host,
            dra,
            last_resource_alarm: None,
            crash_reported: false,
        }
    }

    pub fn sample(&mut self, snap: &HostSnapshot, now: f64) -> Option<Alarm> {
        if snap.crashed {
            if self.crash_reported {
                return None;
            }
            self.crash_reported = true;
            return Some(Alarm {
                host: self.host,
                at: now,
                severity: 1.0,
                kind: AlarmKind::ResourceDepletion,
            });
        }
        self.crash_reported = false;
        let severity = if snap.mem_full {
            1.0
        } else if snap.cpu_sustained_high {
            ((snap.cpu_util - CPU_ALARM_LEVEL) / (1.0 - CPU_ALARM_LEVEL)).clamp(0.0, 1.0)
        } else {
            return None;
        };
        if let Some(last) = self.last_resource_alarm {
            if now - last < ALARM_COOLDOWN - 1e-9 {
                return None;
            }
        }
        self.last_resource_alarm = Some(now);
        Some(Alarm {
            host: self.host,
            at: now,
            severity,
            kind: AlarmKind::ResourceDepletion,
        })
    }
}

/// Reaction policy of a detection agent.
#[derive(Clone, Copy, Debug)]
pub struct Policy {
    /// Consecutive malicious windows before a rule is emitted.
    pub k_confirm: u32,
    /// Lifetime of emitted filter rules, seconds.
    pub rule_ttl: f64,
}

impl Default for Policy {
    fn default() -> Self {
        Policy {
            k_confirm: 3,
            rule_ttl: 30.0,
        }
    }
}

/// Messages delivered to a detection agent over the bus.
#[derive(Clone, Debug)]
pub enum DraMessage {
    FlowReport(FlowReport),
    Alarm(Alarm),
    Reputation(ReputationMessage),
}

/// A reputation message addressed to one peer.
#[derive(Clone, Debug)]
pub struct OutMessage {
    pub to: String,
    pub msg: ReputationMessage,
}

/// Instruction to install a rule at a network element.
#[derive(Clone, Debug)]
pub struct RuleDirective {
    pub ne: NodeId,
    pub predicates: Vec<Predicate>,
    pub ttl: f64,
}

#[derive(Clone, Debug)]
pub struct ClassificationEvent {
    pub cluster: ClusterId,
    pub class: TrustClass,
    pub trust: f64,
    pub members: Vec<FlowKey>,
}

#[derive(Clone, Debug, Default)]
pub struct DraStepResult {
    pub outgoing: Vec<OutMessage>,
    pub rules: Vec<RuleDirective>,
    pub classifications: Vec<ClassificationEvent>,
}

#[derive(Clone, Debug)]
struct FlowInfo {
    cluster: ClusterId,
    last_report: f64,
    pkt_rate: f64,
    mean_size: f64,
    closed: bool,
}

/// Detection-and-reaction agent.
pub struct DraAgent {
    pub id: String,
    pub nes: Vec<NodeId>,
    pub subscriptions: Vec<String>,
    pub policy: Policy,
    pub model: TrustModel,
    inbox: Vec<DraMessage>,
    alarms: Vec<Alarm>,
    flows: BTreeMap<FlowKey, FlowInfo>,
    streaks: BTreeMap<ClusterId, u32>,
    last_class: BTreeMap<ClusterId, TrustClass>,
    queried: BTreeSet<ClusterId>,
}

impl DraAgent {
    pub fn new(
        id: String,
        nes: Vec<NodeId>,
        subscriptions: Vec<String>,
        policy: Policy,
        model: TrustModel,
    ) -> DraAgent {
        DraAgent {
            id,
            nes,
            subscriptions,
            policy,
            model,
            inbox: Vec::new(),
            alarms: Vec::new(),
            flows: BTreeMap::new(),
            streaks: BTreeMap::new(),
            last_class: BTreeMap::new(),
            queried: BTreeSet::new(),
        }
    }

    /// Queues a delivered message until the next step.
    pub fn deliver(&mut self, msg: DraMessage) {
        self.inbox.push(msg);
    }

    /// Among this agent's elements, the one closest to `victim` by hop count.
    fn select_ne(&self, victim: Option<NodeId>, routes: &Routes) -> Option<NodeId> {
        let mut nes = self.nes.clone();
        nes.sort();
        let victim = match victim {
            Some(v) => v,
            None => return nes.first().copied(),
        };
        nes.into_iter().min_by_key(|&ne| {
            (
                routes.hop_dist(ne, victim).unwrap_or(u32::MAX),
                ne,
            )
        })
    }

    /// One detection round, run each window after bus delivery. Processes the
    /// inbox in arrival order, aggregates alarm feedback into cluster trust,
    /// reclassifies touched clusters, informs peers on a downward trust
    /// crossing, and emits a rule once a cluster has stayed malicious for
    /// `k_confirm` consecutive windows.
    pub fn step(&mut self, now: f64, routes: &Routes) -> DraStepResult {
        let mut res = DraStepResult::default();
        let mut touched: BTreeSet<ClusterId> = BTreeSet::new();
        let mut crossed_down: BTreeSet<ClusterId> = BTreeSet::new();
        let theta_mal = self.model.params.theta_mal;
        let note_crossing = |up: &TrustUpdate, set: &mut BTreeSet<ClusterId>| {
            if up.trust_before >= theta_mal && up.trust_after < theta_mal {
                set.insert(up.cluster);
            }
        };

        for msg in std::mem::take(&mut self.inbox) {
            match msg {
                DraMessage::Alarm(a) => self.alarms.push(a),
                DraMessage::Reputation(rep) => match rep.mode {
                    RepMode::Query => {
                        if let Some(c) = self.model.answer_query(&rep.centroid) {
                            res.outgoing.push(OutMessage {
                                to: rep.origin.clone(),
                                msg: ReputationMessage {
                                    origin: self.id.clone(),
                                    centroid: c.centroid,
                                    trust: c.trust,
                                    weight: c.weight,
                                    mode: RepMode::Reply,
                                    at: now,
                                },
                            });
                        }
                    }
                    RepMode::Inform | RepMode::Reply => {
                        if let Ok(up) = self.model.merge_reputation(&rep, now) {
                            touched.insert(up.cluster);
                            note_crossing(&up, &mut crossed_down);
                        }
                    }
                },
                DraMessage::FlowReport(report) => {
                    for w in &report.flows {
                        let up = self.model.observe(&w.features, w.key, now);
                        touched.insert(up.cluster);
                        if up.created && self.queried.insert(up.cluster) {
                            for sub in &self.subscriptions {
                                res.outgoing.push(OutMessage {
                                    to: sub.clone(),
                                    msg: ReputationMessage {
                                        origin: self.id.clone(),
                                        centroid: w.features,
                                        trust: self.model.params.prior,
                                        weight: 1,
                                        mode: RepMode::Query,
                                        at: now,
                                    },
                                });
                            }
                        }
                        self.flows.insert(
                            w.key,
                            FlowInfo {
                                cluster: up.cluster,
                                last_report: now,
                                pkt_rate: w.pkt_rate,
                                mean_size: w.mean_size,
                                closed: false,
                            },
                        );
                    }
                    for key in &report.closed {
                        if let Some(info) = self.flows.get_mut(key) {
                            info.closed = true;
                        }
                    }
                }
            }
        }

        self.alarms.retain(|a| now - a.at <= FEEDBACK_HORIZON);

        // Feedback: flows toward recently alarmed hosts absorb the blame;
        // flows that closed while their host stayed quiet earn it back.
        let mut observations: Vec<(ClusterId, f64)> = Vec::new();
        for (key, info) in &self.flows {
            if !info.closed && now - info.last_report > FEEDBACK_HORIZON {
                continue;
            }
            let sev: f64 = self
                .alarms
                .iter()
                .filter(|a| a.host == key.dst)
                .map(|a| a.severity)
                .sum();
            if sev > 0.0 {
                observations.push((info.cluster, (1.0 - sev).max(0.0)));
            } else if info.closed {
                observations.push((info.cluster, 1.0));
            }
        }
        for (cluster, o) in observations {
            if let Ok(up) = self.model.update_trust(cluster, o) {
                touched.insert(up.cluster);
                note_crossing(&up, &mut crossed_down);
            }
        }
        self.flows.retain(|_, info| !info.closed);

        for &cid in &touched {
            let Some(class) = self.model.classify(cid) else {
                continue;
            };
            let cluster = self.model.cluster(cid).unwrap();
            let trust = cluster.trust;
            let members = cluster.members();
            let streak = self.streaks.entry(cid).or_insert(0);
            if class == TrustClass::Malicious {
                *streak += 1;
            } else {
                *streak = 0;
            }
            let streak = *streak;
            if self.last_class.get(&cid) != Some(&class) {
                self.last_class.insert(cid, class);
                res.classifications.push(ClassificationEvent {
                    cluster: cid,
                    class,
                    trust,
                    members: members.clone(),
                });
            }
            if crossed_down.contains(&cid) {
                let centroid = cluster.centroid;
                let weight = cluster.weight;
                for sub in &self.subscriptions {
                    res.outgoing.push(OutMessage {
                        to: sub.clone(),
                        msg: ReputationMessage {
                            origin: self.id.clone(),
                            centroid,
                            trust,
                            weight,
                            mode: RepMode::Inform,
                            at: now,
                        },
                    });
                }
            }
            if streak == self.policy.k_confirm {
                self.streaks.insert(cid, 0);
                let records: Vec<MemberRecord> = members
                    .iter()
                    .filter_map(|key| {
                        self.flows.get(key).map(|info| MemberRecord {
                            key: *key,
                            pkt_rate: info.pkt_rate,
                            mean_size: info.mean_size,
                        })
                    })
                    .collect();
                if let Ok(predicates) = generalize_rule(&records) {
                    let victim = predicates.iter().find_map(|p| match p {
                        Predicate::Dst(n) => Some(*n),
                        _ => None,
                    });
                    if let Some(ne) = self.select_ne(victim, routes) {
                        res.rules.push(RuleDirective {
                            ne,
                            predicates,
                            ttl: self.policy.rule_ttl,
                        });
                    }
                }
            }
        }
        res
    }
}
