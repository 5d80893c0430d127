//! Attack catalog, traffic generators, and the adaptive legitimate sender.
//!
//! Generators are pure schedules: given their config they enumerate emission
//! times and packet shapes deterministically, so a run never depends on
//! generator-side randomness.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::packet::Proto;
use crate::topology::NodeId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AttackKind {
    UdpFlood,
    IcmpFlood,
    Smurf,
    Fraggle,
    PingOfDeath,
    Land,
    Shrew,
    Roq,
}

impl AttackKind {
    pub const ALL: [AttackKind; 8] = [
        AttackKind::UdpFlood,
        AttackKind::IcmpFlood,
        AttackKind::Smurf,
        AttackKind::Fraggle,
        AttackKind::PingOfDeath,
        AttackKind::Land,
        AttackKind::Shrew,
        AttackKind::Roq,
    ];
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AttackKind::UdpFlood => "udp_flood",
            AttackKind::IcmpFlood => "icmp_flood",
            AttackKind::Smurf => "smurf",
            AttackKind::Fraggle => "fraggle",
            AttackKind::PingOfDeath => "ping_of_death",
            AttackKind::Land => "land",
            AttackKind::Shrew => "shrew",
            AttackKind::Roq => "roq",
        })
    }
}

impl FromStr for AttackKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "udp_flood" => Ok(AttackKind::UdpFlood),
            "icmp_flood" => Ok(AttackKind::IcmpFlood),
            "smurf" => Ok(AttackKind::Smurf),
            "fraggle" => Ok(AttackKind::Fraggle),
            "ping_of_death" => Ok(AttackKind::PingOfDeath),
            "land" => Ok(AttackKind::Land),
            "shrew" => Ok(AttackKind::Shrew),
            "roq" => Ok(AttackKind::Roq),
            other => Err(format!("unknown attack kind `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dispersion {
    Distributed,
    NonDistributed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TargetAxis {
    NetworkResources,
    TargetResources,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    Direct,
    Reflector,
    Hidden,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Impact {
    Consumption,
    Exploitive,
}

impl fmt::Display for Dispersion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dispersion::Distributed => "distributed",
            Dispersion::NonDistributed => "non_distributed",
        })
    }
}

impl fmt::Display for TargetAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TargetAxis::NetworkResources => "network_resources",
            TargetAxis::TargetResources => "target_resources",
        })
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Direct => "direct",
            Scheme::Reflector => "reflector",
            Scheme::Hidden => "hidden",
        })
    }
}

impl fmt::Display for Impact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Impact::Consumption => "consumption",
            Impact::Exploitive => "exploitive",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AttackTaxonomy {
    pub kind: AttackKind,
    pub dispersion: Dispersion,
    pub target: TargetAxis,
    pub scheme: Scheme,
    pub impact: Impact,
}

/// Classification axes for every supported attack.
pub fn taxonomy_of(kind: AttackKind) -> AttackTaxonomy {
    use AttackKind::*;
    let (dispersion, target, scheme, impact) = match kind {
        UdpFlood | IcmpFlood => (
            Dispersion::Distributed,
            TargetAxis::NetworkResources,
            Scheme::Direct,
            Impact::Consumption,
        ),
        Smurf | Fraggle => (
            Dispersion::Distributed,
            TargetAxis::NetworkResources,
            Scheme::Reflector,
            Impact::Consumption,
        ),
        PingOfDeath | Land => (
            Dispersion::NonDistributed,
            TargetAxis::TargetResources,
            Scheme::Direct,
            Impact::Exploitive,
        ),
        Shrew | Roq => (
            Dispersion::Distributed,
            TargetAxis::TargetResources,
            Scheme::Hidden,
            Impact::Consumption,
        ),
    };
    AttackTaxonomy {
        kind,
        dispersion,
        target,
        scheme,
        impact,
    }
}

/// Apportionment scheme of a generator, derived from its kind.
fn scheme_of(kind: AttackKind) -> Scheme {
    taxonomy_of(kind).scheme
}

pub const FLOOD_PACKET_SIZE: u32 = 500;
pub const OVERSIZED_PACKET: u32 = 70_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BurstParams {
    /// Seconds between burst starts.
    pub period: f64,
    /// Burst length in seconds.
    pub length: f64,
    /// Packets per second while the burst is on.
    pub burst_rate: f64,
}

#[derive(Clone, Debug)]
pub struct GeneratorConfig {
    pub kind: AttackKind,
    pub sources: Vec<NodeId>,
    pub victim: NodeId,
    pub reflectors: Vec<NodeId>,
    /// Aggregate packets per second across all sources (flood and reflector
    /// kinds).
    pub rate: f64,
    pub start: f64,
    pub stop: f64,
    /// Seconds between packets for the exploit kinds.
    pub repeat_interval: f64,
    pub burst: Option<BurstParams>,
}

#[derive(Debug, Error)]
pub enum GeneratorError {
    #[error("attack needs at least one source")]
    NoSources,
    #[error("{0} requires a positive rate")]
    MissingRate(AttackKind),
    #[error("{0} requires a non-empty reflector set")]
    MissingReflectors(AttackKind),
    #[error("reflectors are only meaningful for reflector attacks, not {0}")]
    UnexpectedReflectors(AttackKind),
    #[error("{0} requires burst parameters (period, length, burst_rate)")]
    MissingBurst(AttackKind),
    #[error("burst length must be positive and below the period")]
    BadBurst,
    #[error("repeat interval must be positive")]
    BadRepeat,
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<(), GeneratorError> {
        use AttackKind::*;
        if self.sources.is_empty() {
            return Err(GeneratorError::NoSources);
        }
        match scheme_of(self.kind) {
            Scheme::Reflector => {
                if self.reflectors.is_empty() {
                    return Err(GeneratorError::MissingReflectors(self.kind));
                }
            }
            _ => {
                if !self.reflectors.is_empty() {
                    return Err(GeneratorError::UnexpectedReflectors(self.kind));
                }
            }
        }
        // NaN and infinity both fail these checks: a non-finite rate would
        // collapse the emission spacing to zero.
        match self.kind {
            UdpFlood | IcmpFlood | Smurf | Fraggle => {
                if !self.rate.is_finite() || self.rate <= 0.0 {
                    return Err(GeneratorError::MissingRate(self.kind));
                }
            }
            PingOfDeath | Land => {
                if !self.repeat_interval.is_finite() || self.repeat_interval <= 0.0 {
                    return Err(GeneratorError::BadRepeat);
                }
            }
            Shrew | Roq => match self.burst {
                None => return Err(GeneratorError::MissingBurst(self.kind)),
                Some(b) => {
                    let ok = b.length.is_finite()
                        && b.period.is_finite()
                        && b.burst_rate.is_finite()
                        && b.length > 0.0
                        && b.period > b.length
                        && b.burst_rate > 0.0;
                    if !ok {
                        return Err(GeneratorError::BadBurst);
                    }
                }
            },
        }
        Ok(())
    }
}

/// One scheduled transmission: a set of identical packets from one source.
#[derive(Clone, Debug, PartialEq)]
pub struct Emission {
    pub at: f64,
    pub src: NodeId,
    /// One entry per packet: destination plus claimed source.
    pub targets: Vec<(NodeId, Option<NodeId>)>,
    pub proto: Proto,
    pub size: u32,
    pub echo: bool,
}

/// Walks a generator's deterministic emission schedule.
pub struct GeneratorRuntime {
    pub cfg: GeneratorConfig,
    /// Emission rounds completed so far.
    round: u64,
    /// Shrew bookkeeping: current period and packets emitted inside it.
    period: u64,
    in_period: u64,
}

impl GeneratorRuntime {
    pub fn new(cfg: GeneratorConfig) -> GeneratorRuntime {
        GeneratorRuntime {
            cfg,
            round: 0,
            period: 0,
            in_period: 0,
        }
    }

    /// Instantaneous scheduled rate of an on-off burst attack at time `t`.
    pub fn shrew_rate(burst: &BurstParams, start: f64, t: f64) -> f64 {
        if t < start {
            return 0.0;
        }
        let phase = (t - start) % burst.period;
        if phase < burst.length {
            burst.burst_rate
        } else {
            0.0
        }
    }

    /// Packets a burst attack emits per full period: within one packet of
    /// `burst_rate * length`, balanced across periods.
    fn burst_quota(burst: &BurstParams, period: u64) -> u64 {
        let per = burst.burst_rate * burst.length;
        let done = (period as f64 * per).floor() as u64;
        let total = ((period + 1) as f64 * per).floor() as u64;
        total - done
    }

    /// Next emission at or after the current position, or `None` once the
    /// generator is past its stop time.
    pub fn next_emission(&mut self) -> Option<Emission> {
        use AttackKind::*;
        let cfg = &self.cfg;
        let nsrc = cfg.sources.len() as u64;
        match cfg.kind {
            UdpFlood | IcmpFlood => {
                let at = cfg.start + self.round as f64 / cfg.rate;
                if at >= cfg.stop {
                    return None;
                }
                let src = cfg.sources[(self.round % nsrc) as usize];
                self.round += 1;
                let proto = if cfg.kind == UdpFlood {
                    Proto::Udp
                } else {
                    Proto::Icmp
                };
                Some(Emission {
                    at,
                    src,
                    targets: vec![(cfg.victim, None)],
                    proto,
                    size: FLOOD_PACKET_SIZE,
                    echo: false,
                })
            }
            Smurf | Fraggle => {
                // Each round sends one trigger to every reflector, claiming
                // the victim as source; interval keeps the aggregate trigger
                // rate at cfg.rate.
                let interval = cfg.reflectors.len() as f64 / cfg.rate;
                let at = cfg.start + self.round as f64 * interval;
                if at >= cfg.stop {
                    return None;
                }
                let src = cfg.sources[(self.round % nsrc) as usize];
                self.round += 1;
                let proto = if cfg.kind == Smurf {
                    Proto::Icmp
                } else {
                    Proto::Udp
                };
                Some(Emission {
                    at,
                    src,
                    targets: cfg
                        .reflectors
                        .iter()
                        .map(|&r| (r, Some(cfg.victim)))
                        .collect(),
                    proto,
                    size: FLOOD_PACKET_SIZE,
                    echo: true,
                })
            }
            PingOfDeath | Land => {
                let at = cfg.start + self.round as f64 * cfg.repeat_interval;
                if at >= cfg.stop {
                    return None;
                }
                let src = cfg.sources[(self.round % nsrc) as usize];
                self.round += 1;
                if cfg.kind == PingOfDeath {
                    Some(Emission {
                        at,
                        src,
                        targets: vec![(cfg.victim, None)],
                        proto: Proto::Icmp,
                        size: OVERSIZED_PACKET,
                        echo: false,
                    })
                } else {
                    Some(Emission {
                        at,
                        src,
                        targets: vec![(cfg.victim, Some(cfg.victim))],
                        proto: Proto::TcpLike,
                        size: FLOOD_PACKET_SIZE,
                        echo: false,
                    })
                }
            }
            Shrew | Roq => {
                let burst = cfg.burst.as_ref().unwrap();
                loop {
                    let quota = Self::burst_quota(burst, self.period);
                    if self.in_period >= quota {
                        self.period += 1;
                        self.in_period = 0;
                        if cfg.start + self.period as f64 * burst.period >= cfg.stop {
                            return None;
                        }
                        continue;
                    }
                    let at = cfg.start
                        + self.period as f64 * burst.period
                        + self.in_period as f64 / burst.burst_rate;
                    if at >= cfg.stop {
                        return None;
                    }
                    let k = self.round;
                    self.round += 1;
                    self.in_period += 1;
                    let src = cfg.sources[(k % nsrc) as usize];
                    return Some(Emission {
                        at,
                        src,
                        targets: vec![(cfg.victim, None)],
                        proto: Proto::Udp,
                        size: FLOOD_PACKET_SIZE,
                        echo: false,
                    });
                }
            }
        }
    }
}

/// Legitimate sender parameters.
#[derive(Clone, Debug)]
pub struct AimdConfig {
    pub src: NodeId,
    pub dst: NodeId,
    pub proto: Proto,
    pub max_rate: f64,
    pub min_rate: f64,
    pub initial_rate: f64,
    /// Packets per second gained per clean second.
    pub additive_step: f64,
    /// Pause after a whole window of losses.
    pub rto: f64,
    pub size: u32,
    pub start: f64,
    pub stop: f64,
}

/// Additive-increase / multiplicative-decrease rate state.
#[derive(Clone, Debug)]
pub struct AimdSender {
    pub cfg: AimdConfig,
    pub rate: f64,
    pub paused_until: f64,
    /// Send time of the most recent packet reported lost, when the loss run
    /// is unbroken by an ack.
    last_drop_sent_at: Option<f64>,
    /// When the sender last heard about any loss.
    pub last_drop_notice: Option<f64>,
}

/// Span within which an unbroken run of losses counts as losing the whole
/// window.
pub const LOSS_WINDOW: f64 = 0.1;

impl AimdSender {
    pub fn new(cfg: AimdConfig) -> AimdSender {
        let rate = cfg.initial_rate.clamp(cfg.min_rate, cfg.max_rate);
        AimdSender {
            cfg,
            rate,
            paused_until: f64::NEG_INFINITY,
            last_drop_sent_at: None,
            last_drop_notice: None,
        }
    }

    /// A clean second passed: additive increase.
    pub fn on_clean_interval(&mut self) {
        self.rate = (self.rate + self.cfg.additive_step).min(self.cfg.max_rate);
    }

    /// A packet sent at `sent_at` was acknowledged.
    pub fn on_ack(&mut self, _sent_at: f64) {
        self.last_drop_sent_at = None;
    }

    /// A packet sent at `sent_at` was reported lost at `now`. Two losses in a
    /// row within [`LOSS_WINDOW`] mean every packet of that span was lost:
    /// collapse to the minimum rate and pause one timeout. A lone loss halves
    /// the rate.
    pub fn on_drop(&mut self, sent_at: f64, now: f64) {
        self.last_drop_notice = Some(now);
        let window_loss = matches!(
            self.last_drop_sent_at,
            Some(prev) if sent_at - prev <= LOSS_WINDOW + 1e-9
        );
        self.last_drop_sent_at = Some(sent_at);
        if window_loss {
            self.rate = self.cfg.min_rate;
            self.paused_until = now + self.cfg.rto;
        } else {
            self.rate = (self.rate / 2.0).max(self.cfg.min_rate);
        }
    }

    pub fn paused_at(&self, now: f64) -> bool {
        now < self.paused_until
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nodes(n: u32) -> Vec<NodeId> {
        (0..n).map(NodeId).collect()
    }

    #[test]
    fn taxonomy_table() {
        use AttackKind::*;
        let expect = [
            (UdpFlood, "distributed network_resources direct consumption"),
            (IcmpFlood, "distributed network_resources direct consumption"),
            (Smurf, "distributed network_resources reflector consumption"),
            (Fraggle, "distributed network_resources reflector consumption"),
            (
                PingOfDeath,
                "non_distributed target_resources direct exploitive",
            ),
            (Land, "non_distributed target_resources direct exploitive"),
            (Shrew, "distributed target_resources hidden consumption"),
            (Roq, "distributed target_resources hidden consumption"),
        ];
        for (kind, want) in expect {
            let t = taxonomy_of(kind);
            let got = format!("{} {} {} {}", t.dispersion, t.target, t.scheme, t.impact);
            assert_eq!(got, want, "{kind}");
        }
    }

    #[test]
    fn flood_splits_rate_evenly_across_sources() {
        let cfg = GeneratorConfig {
            kind: AttackKind::UdpFlood,
            sources: nodes(10),
            victim: NodeId(50),
            reflectors: vec![],
            rate: 1000.0,
            start: 0.0,
            stop: 0.1,
            repeat_interval: 1.0,
            burst: None,
        };
        cfg.validate().unwrap();
        let mut gen = GeneratorRuntime::new(cfg);
        let mut per_source = [0u32; 10];
        let mut times = Vec::new();
        while let Some(e) = gen.next_emission() {
            per_source[e.src.idx()] += 1;
            times.push(e.at);
            assert_eq!(e.size, FLOOD_PACKET_SIZE);
            assert_eq!(e.proto, Proto::Udp);
        }
        // 100 packets in 0.1 s at 1000 pps, 10 per source, spaced 1 ms.
        assert_eq!(times.len(), 100);
        assert!(per_source.iter().all(|&c| c == 10));
        for w in times.windows(2) {
            assert!((w[1] - w[0] - 0.001).abs() < 1e-9);
        }
    }

    #[test]
    fn reflector_round_sends_one_trigger_per_reflector() {
        let cfg = GeneratorConfig {
            kind: AttackKind::Smurf,
            sources: nodes(1),
            victim: NodeId(50),
            reflectors: (10..15).map(NodeId).collect(),
            rate: 500.0,
            start: 0.0,
            stop: 10.0,
            repeat_interval: 1.0,
            burst: None,
        };
        cfg.validate().unwrap();
        let mut gen = GeneratorRuntime::new(cfg);
        let e = gen.next_emission().unwrap();
        assert_eq!(e.targets.len(), 5);
        for (dst, spoof) in &e.targets {
            assert!((10..15).contains(&dst.0));
            assert_eq!(*spoof, Some(NodeId(50)));
        }
        assert!(e.echo);
        assert_eq!(e.proto, Proto::Icmp);
        // Next round 5/500 s later keeps the aggregate trigger rate at 500.
        let e2 = gen.next_emission().unwrap();
        assert!((e2.at - 0.01).abs() < 1e-12);
    }

    #[test]
    fn exploit_kinds_shape_packets() {
        let pod = GeneratorConfig {
            kind: AttackKind::PingOfDeath,
            sources: nodes(1),
            victim: NodeId(5),
            reflectors: vec![],
            rate: 0.0,
            start: 1.0,
            stop: 10.0,
            repeat_interval: 2.0,
            burst: None,
        };
        pod.validate().unwrap();
        let mut gen = GeneratorRuntime::new(pod);
        let e = gen.next_emission().unwrap();
        assert_eq!(e.size, OVERSIZED_PACKET);
        assert!(e.size > 65535);
        assert_eq!(gen.next_emission().unwrap().at, 3.0);

        let land = GeneratorConfig {
            kind: AttackKind::Land,
            sources: nodes(1),
            victim: NodeId(5),
            reflectors: vec![],
            rate: 0.0,
            start: 0.0,
            stop: 1.0,
            repeat_interval: 1.0,
            burst: None,
        };
        land.validate().unwrap();
        let e = GeneratorRuntime::new(land).next_emission().unwrap();
        assert_eq!(e.targets, vec![(NodeId(5), Some(NodeId(5)))]);
    }

    #[test]
    fn shrew_schedule_is_on_off() {
        let burst = BurstParams {
            period: 1.0,
            length: 0.1,
            burst_rate: 1000.0,
        };
        assert_eq!(GeneratorRuntime::shrew_rate(&burst, 0.0, 0.05), 1000.0);
        assert_eq!(GeneratorRuntime::shrew_rate(&burst, 0.0, 0.5), 0.0);
        assert_eq!(GeneratorRuntime::shrew_rate(&burst, 0.0, 1.02), 1000.0);
    }

    #[test]
    fn shrew_average_rate_identity() {
        // 1000 pps bursts of 0.1 s each second: 100 packets per period, an
        // average of 100 pps, within one packet over any whole period count.
        let cfg = GeneratorConfig {
            kind: AttackKind::Shrew,
            sources: nodes(5),
            victim: NodeId(9),
            reflectors: vec![],
            rate: 0.0,
            start: 0.0,
            stop: 30.0,
            repeat_interval: 1.0,
            burst: Some(BurstParams {
                period: 1.0,
                length: 0.1,
                burst_rate: 1000.0,
            }),
        };
        cfg.validate().unwrap();
        let mut gen = GeneratorRuntime::new(cfg);
        let mut count = 0u64;
        while let Some(e) = gen.next_emission() {
            assert!(GeneratorRuntime::shrew_rate(
                &BurstParams {
                    period: 1.0,
                    length: 0.1,
                    burst_rate: 1000.0
                },
                0.0,
                e.at + 1e-9,
            ) > 0.0);
            count += 1;
        }
        let expect = 30.0 * 1000.0 * 0.1;
        assert!((count as f64 - expect).abs() <= 1.0);
    }

    #[test]
    fn aimd_halves_on_loss_and_clamps() {
        let cfg = AimdConfig {
            src: NodeId(0),
            dst: NodeId(1),
            proto: Proto::TcpLike,
            max_rate: 100.0,
            min_rate: 5.0,
            initial_rate: 100.0,
            additive_step: 10.0,
            rto: 1.0,
            size: 1000,
            start: 0.0,
            stop: 60.0,
        };
        let mut s = AimdSender::new(cfg);
        s.on_drop(2.0, 2.05);
        assert!((s.rate - 50.0).abs() < 1e-12);
        s.on_ack(2.1);
        s.on_clean_interval();
        assert!((s.rate - 60.0).abs() < 1e-12);
        for _ in 0..10 {
            s.on_clean_interval();
        }
        assert!((s.rate - 100.0).abs() < 1e-12);
    }

    #[test]
    fn whole_window_lost_collapses_and_pauses() {
        let cfg = AimdConfig {
            src: NodeId(0),
            dst: NodeId(1),
            proto: Proto::TcpLike,
            max_rate: 100.0,
            min_rate: 5.0,
            initial_rate: 100.0,
            additive_step: 10.0,
            rto: 1.0,
            size: 1000,
            start: 0.0,
            stop: 60.0,
        };
        let mut s = AimdSender::new(cfg);
        s.on_drop(2.00, 2.02);
        s.on_drop(2.05, 2.07);
        assert!((s.rate - 5.0).abs() < 1e-12);
        assert!((s.paused_until - 3.07).abs() < 1e-12);
        assert!(s.paused_at(2.5));
        assert!(!s.paused_at(3.2));
        // An ack breaks the loss run: the next drop is just a halving.
        s.on_ack(3.3);
        s.rate = 40.0;
        s.on_drop(3.4, 3.45);
        assert!((s.rate - 20.0).abs() < 1e-12);
    }

    #[test]
    fn generator_config_validation() {
        let mut cfg = GeneratorConfig {
            kind: AttackKind::Smurf,
            sources: nodes(2),
            victim: NodeId(9),
            reflectors: vec![],
            rate: 100.0,
            start: 0.0,
            stop: 10.0,
            repeat_interval: 1.0,
            burst: None,
        };
        assert!(matches!(
            cfg.validate(),
            Err(GeneratorError::MissingReflectors(_))
        ));
        cfg.kind = AttackKind::UdpFlood;
        cfg.reflectors = nodes(2);
        assert!(matches!(
            cfg.validate(),
            Err(GeneratorError::UnexpectedReflectors(_))
        ));
        cfg.reflectors = vec![];
        cfg.rate = 0.0;
        assert!(matches!(cfg.validate(), Err(GeneratorError::MissingRate(_))));
        cfg.kind = AttackKind::Shrew;
        assert!(matches!(
            cfg.validate(),
            Err(GeneratorError::MissingBurst(_))
        ));
        cfg.burst = Some(BurstParams {
            period: 0.5,
            length: 0.6,
            burst_rate: 100.0,
        });
        assert!(matches!(cfg.validate(), Err(GeneratorError::BadBurst)));
    }
}
