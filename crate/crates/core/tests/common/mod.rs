//! Property bodies shared between the property suite and the acceptance
//! gate. Each function panics on violation so it can back either a proptest
//! macro or an explicit runner.

use proptest::prelude::*;

use sentinet::attacks::{AimdConfig, AimdSender, AttackKind, BurstParams, GeneratorConfig, GeneratorRuntime};
use sentinet::flows::{extract_features, FeatureVector, FlowKey, WindowStats, SUBWINDOWS};
use sentinet::packet::Proto;
use sentinet::runner::{run_scenario, RunOptions};
use sentinet::scenario::Scenario;
use sentinet::topology::NodeId;
use sentinet::trust::{RepMode, ReputationMessage, TrustModel, TrustParams};

fn key(n: u32) -> FlowKey {
    FlowKey {
        src: NodeId(n % 13),
        dst: NodeId(100 + n % 3),
        proto: Proto::Udp,
    }
}

pub fn feature_vec() -> impl Strategy<Value = FeatureVector> {
    [0.0..8.0f64, 0.0..50.0f64, 1.0..10.0f64, 0.0..6.0f64].prop_map(FeatureVector)
}

// ---------------------------------------------------------------- trust ----

/// One step against a trust model: fold in a flow, apply feedback to some
/// existing cluster, or merge a peer's (possibly out-of-range) verdict.
#[derive(Clone, Debug)]
pub enum TrustOp {
    Observe(FeatureVector),
    Feedback(usize, f64),
    Merge(FeatureVector, f64, u64),
}

pub fn trust_ops() -> impl Strategy<Value = Vec<TrustOp>> {
    let op = prop_oneof![
        feature_vec().prop_map(TrustOp::Observe),
        (any::<usize>(), 0.0..=1.0f64).prop_map(|(i, o)| TrustOp::Feedback(i, o)),
        (feature_vec(), -1.0..2.0f64, 1..50u64).prop_map(|(v, t, w)| TrustOp::Merge(v, t, w)),
    ];
    prop::collection::vec(op, 1..40)
}

/// Trust never leaves [0, 1] and weights never fall below one, whatever the
/// mix of observations, feedback, and remote verdicts.
pub fn trust_stays_in_unit_interval(ops: &[TrustOp]) {
    let mut model = TrustModel::new(TrustParams::default());
    let mut now = 0.0;
    let mut n = 0u32;
    for op in ops {
        now += 0.25;
        match op {
            TrustOp::Observe(v) => {
                n += 1;
                model.observe(v, key(n), now);
            }
            TrustOp::Feedback(i, o) => {
                if !model.clusters().is_empty() {
                    let id = model.clusters()[i % model.clusters().len()].id;
                    model.update_trust(id, *o).unwrap();
                }
            }
            TrustOp::Merge(v, t, w) => {
                let msg = ReputationMessage {
                    origin: "peer".into(),
                    centroid: *v,
                    trust: *t,
                    weight: *w,
                    mode: RepMode::Inform,
                    at: now,
                };
                model.merge_reputation(&msg, now).unwrap();
            }
        }
        for c in model.clusters() {
            assert!(
                (0.0..=1.0).contains(&c.trust),
                "trust {} escaped the unit interval",
                c.trust
            );
            assert!(c.weight >= 1, "cluster weight dropped to {}", c.weight);
            assert!(c.centroid.0.iter().all(|x| x.is_finite()));
        }
    }
}

/// `nearest` agrees with a flat scan: smallest distance, lowest id on ties.
pub fn nearest_matches_brute_scan(seeds: &[FeatureVector], q: &FeatureVector) {
    let mut model = TrustModel::new(TrustParams::default());
    for (i, v) in seeds.iter().enumerate() {
        model.observe(v, key(i as u32), i as f64);
    }
    let got = model.nearest(q);
    let best_d = model
        .clusters()
        .iter()
        .map(|c| c.centroid.dist(q))
        .fold(f64::INFINITY, f64::min);
    let want = model
        .clusters()
        .iter()
        .filter(|c| c.centroid.dist(q) == best_d)
        .map(|c| c.id)
        .min();
    match (got, want) {
        (None, None) => {}
        (Some((id, d)), Some(wid)) => {
            assert_eq!(id, wid, "picked cluster {id}, scan says {wid}");
            assert_eq!(d, best_d);
        }
        (g, w) => panic!("nearest {g:?} disagrees with scan {w:?}"),
    }
}

// ----------------------------------------------------------------- sims ----

/// A tiny random network: two edge hosts and a sink behind one relay, with
/// an optional flood on top of the adaptive sender.
#[derive(Clone, Debug)]
pub struct MiniNet {
    pub duration: f64,
    pub relay_is_ne: bool,
    pub cap_in: f64,
    pub cap_out: f64,
    pub queue_in: u32,
    pub queue_out: u32,
    pub send_rate: f64,
    pub flood_rate: Option<f64>,
}

pub fn mini_net() -> impl Strategy<Value = MiniNet> {
    (
        0.3..1.2f64,
        any::<bool>(),
        3.0..60.0f64,
        3.0..60.0f64,
        1..7u32,
        1..7u32,
        2.0..90.0f64,
        prop::option::of(10.0..150.0f64),
    )
        .prop_map(
            |(duration, relay_is_ne, cap_in, cap_out, queue_in, queue_out, send_rate, flood_rate)| {
                MiniNet {
                    duration,
                    relay_is_ne,
                    cap_in,
                    cap_out,
                    queue_in,
                    queue_out,
                    send_rate,
                    flood_rate,
                }
            },
        )
}

fn mini_toml(net: &MiniNet) -> String {
    let mut t = format!(
        r#"
duration = {}
[[nodes]]
name = "a"
kind = "host"
[[nodes]]
name = "z"
kind = "host"
[[nodes]]
name = "m"
kind = "{}"
[[nodes]]
name = "b"
kind = "host"
[[links]]
from = "a"
to = "m"
capacity = {}
queue = {}
[[links]]
from = "z"
to = "m"
capacity = {}
queue = {}
[[links]]
from = "m"
to = "b"
capacity = {}
queue = {}
[[senders]]
src = "a"
dst = "b"
max_rate = {}
"#,
        net.duration,
        if net.relay_is_ne { "ne" } else { "router" },
        net.cap_in,
        net.queue_in,
        net.cap_in,
        net.queue_in,
        net.cap_out,
        net.queue_out,
        net.send_rate,
    );
    if let Some(rate) = net.flood_rate {
        t.push_str(&format!(
            r#"
[[attacks]]
kind = "udp_flood"
sources = ["z"]
victim = "b"
rate = {rate}
start = 0.05
"#
        ));
    }
    t
}

/// Every injected packet is delivered, dropped at a queue, dropped by a
/// filter, or still on the wire when the run ends -- recounted from the
/// rendered log, not from the simulator's own accumulators.
pub fn packets_are_conserved(net: &MiniNet) {
    let sc = Scenario::from_toml_str(&mini_toml(net), "mini").unwrap();
    let out = run_scenario(&sc, &RunOptions::default());
    assert!(
        out.report.conservation,
        "report flags a conservation breach: {:?}",
        out.stats
    );
    let text = out.log.render();
    let count = |ev: &str| {
        text.lines()
            .filter(|l| l.contains(&format!(" ev={ev} ")))
            .count() as u64
    };
    let injected = count("inject");
    let settled = count("deliver") + count("queue_drop") + count("rule_drop");
    assert_eq!(
        injected,
        settled + out.report.in_flight,
        "log recount disagrees: {injected} in, {settled} settled, {} flying",
        out.report.in_flight
    );
    assert_eq!(injected, out.report.injected);
}

// ----------------------------------------------------------------- aimd ----

#[derive(Clone, Debug)]
pub enum SenderOp {
    Ack,
    Drop(f64),
    CleanSecond,
}

pub fn sender_ops() -> impl Strategy<Value = Vec<SenderOp>> {
    let op = prop_oneof![
        Just(SenderOp::Ack),
        (0.0..0.5f64).prop_map(SenderOp::Drop),
        Just(SenderOp::CleanSecond),
    ];
    prop::collection::vec(op, 0..60)
}

/// The send rate stays inside [min_rate, max_rate] under any feedback order.
pub fn aimd_rate_stays_bounded(lo: f64, hi: f64, initial: f64, step: f64, ops: &[SenderOp]) {
    let (min_rate, max_rate) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let cfg = AimdConfig {
        src: NodeId(0),
        dst: NodeId(1),
        proto: Proto::TcpLike,
        max_rate,
        min_rate,
        initial_rate: initial,
        additive_step: step,
        rto: 1.0,
        size: 1000,
        start: 0.0,
        stop: f64::INFINITY,
    };
    let mut s = AimdSender::new(cfg);
    let mut now = 0.0;
    let mut sent = 0.0;
    assert!(s.rate >= min_rate && s.rate <= max_rate);
    for op in ops {
        now += 0.05;
        match op {
            SenderOp::Ack => s.on_ack(sent),
            SenderOp::Drop(gap) => {
                sent += gap;
                s.on_drop(sent, now);
            }
            SenderOp::CleanSecond => s.on_clean_interval(),
        }
        assert!(
            s.rate >= min_rate && s.rate <= max_rate,
            "rate {} left [{min_rate}, {max_rate}]",
            s.rate
        );
    }
}

// ------------------------------------------------------------- features ----

/// Burstiness is a ratio of the busiest subwindow to the mean subwindow, so
/// it is pinned to [1, SUBWINDOWS] for any non-empty window.
pub fn burstiness_is_bounded(sub_counts: [u64; SUBWINDOWS], mean_size: u32, fanin: usize) {
    let pkt_count: u64 = sub_counts.iter().sum();
    if pkt_count == 0 {
        return;
    }
    let stats = WindowStats {
        pkt_count,
        byte_sum: pkt_count * mean_size as u64,
        sub_counts,
        last_active: 0.0,
    };
    let f = extract_features(&stats, 1.0, fanin);
    let f3 = f.0[2];
    assert!(
        (1.0..=SUBWINDOWS as f64 + 1e-9).contains(&f3),
        "burstiness {f3} out of range for {sub_counts:?}"
    );
    assert!(f.0.iter().all(|x| x.is_finite()));
}

// ---------------------------------------------------------------- bursts ---

#[derive(Clone, Debug)]
pub struct BurstPlan {
    pub period: f64,
    pub length: f64,
    pub burst_rate: f64,
    pub start: f64,
    pub periods: u32,
}

pub fn burst_plan() -> impl Strategy<Value = BurstPlan> {
    (0.2..3.0f64, 0.01..0.5f64, 10.0..200.0f64, 0.0..10.0f64, 1..12u32).prop_map(
        |(period, frac, burst_rate, start, periods)| BurstPlan {
            period,
            length: (period * frac).max(1e-4),
            burst_rate,
            start,
            periods,
        },
    )
}

/// Over any whole number of periods a pulsed generator emits
/// floor(periods * burst_rate * length) packets: the long-run average is
/// exact to within one packet, never drifting.
pub fn burst_volume_is_exact(plan: &BurstPlan) {
    let stop = plan.start + plan.periods as f64 * plan.period;
    let cfg = GeneratorConfig {
        kind: AttackKind::Shrew,
        sources: vec![NodeId(0), NodeId(1)],
        victim: NodeId(2),
        reflectors: vec![],
        rate: 0.0,
        start: plan.start,
        stop,
        repeat_interval: 0.0,
        burst: Some(BurstParams {
            period: plan.period,
            length: plan.length,
            burst_rate: plan.burst_rate,
        }),
    };
    cfg.validate().unwrap();
    let mut rt = GeneratorRuntime::new(cfg);
    let mut total = 0u64;
    let mut last_at = f64::NEG_INFINITY;
    while let Some(e) = rt.next_emission() {
        assert!(e.at >= plan.start && e.at < stop, "emission at {} outside run", e.at);
        assert!(e.at >= last_at, "emissions went backwards");
        last_at = e.at;
        total += e.targets.len() as u64;
        assert!(total < 1_000_000, "runaway generator");
    }
    let nominal = plan.periods as f64 * plan.burst_rate * plan.length;
    assert!(
        (total as f64 - nominal).abs() <= 1.0 + 1e-6,
        "emitted {total}, nominal volume {nominal}"
    );
}
