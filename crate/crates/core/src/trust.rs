//! Streaming trust model: leader clustering over flow features plus
//! exponentially smoothed per-cluster trust.
//!
//! Each detection agent owns one model. Feature vectors attach to the nearest
//! cluster within an attach radius or found a new one; feedback observations
//! in [0, 1] pull the cluster's trust toward them; remote evidence merges in
//! as a weighted mean. Classification is a pair of strict thresholds.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::flows::{FeatureVector, FlowKey};

#[derive(Clone, Copy, Debug)]
pub struct TrustParams {
    /// Attach radius in feature space.
    pub tau: f64,
    /// Centroid learning rate.
    pub eta: f64,
    /// Trust smoothing factor.
    pub alpha: f64,
    /// Below this, a cluster is malicious.
    pub theta_mal: f64,
    /// Above this, a cluster is benign.
    pub theta_ben: f64,
    /// Trust assigned to a freshly observed cluster.
    pub prior: f64,
    /// Member-flow ring capacity.
    pub member_cap: usize,
}

impl Default for TrustParams {
    fn default() -> Self {
        TrustParams {
            tau: 0.5,
            eta: 0.05,
            alpha: 0.1,
            theta_mal: 0.3,
            theta_ben: 0.7,
            prior: 0.5,
            member_cap: 64,
        }
    }
}

pub type ClusterId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrustClass {
    Malicious,
    Unknown,
    Benign,
}

impl fmt::Display for TrustClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrustClass::Malicious => "malicious",
            TrustClass::Unknown => "unknown",
            TrustClass::Benign => "benign",
        })
    }
}

#[derive(Clone, Debug)]
pub struct TrustCluster {
    pub id: ClusterId,
    pub centroid: FeatureVector,
    pub trust: f64,
    /// Evidence count: local observations plus merged remote weight.
    pub weight: u64,
    /// Recently attached flows, oldest first.
    pub member_flows: VecDeque<FlowKey>,
    pub last_seen: f64,
    /// Built from remote evidence only; no local flow has attached yet.
    pub shadow: bool,
}

impl TrustCluster {
    /// Distinct member flows, in key order.
    pub fn members(&self) -> Vec<FlowKey> {
        let mut m: Vec<FlowKey> = self.member_flows.iter().copied().collect();
        m.sort();
        m.dedup();
        m
    }
}

#[derive(Clone, Copy, Debug)]
pub enum RepMode {
    Inform,
    Query,
    Reply,
}

impl fmt::Display for RepMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RepMode::Inform => "inform",
            RepMode::Query => "query",
            RepMode::Reply => "reply",
        })
    }
}

/// Cluster evidence exchanged between detection agents.
#[derive(Clone, Debug)]
pub struct ReputationMessage {
    pub origin: String,
    pub centroid: FeatureVector,
    pub trust: f64,
    pub weight: u64,
    pub mode: RepMode,
    pub at: f64,
}

/// Feedback derived from host alarms, applied to the cluster owning `flow`.
#[derive(Clone, Copy, Debug)]
pub struct FeedbackObservation {
    pub flow: FlowKey,
    pub o: f64,
}

#[derive(Debug, Error)]
pub enum TrustError {
    #[error("feedback observation {0} outside [0, 1]")]
    ObservationRange(f64),
    #[error("reputation weight must be at least 1")]
    ZeroWeight,
    #[error("unknown cluster {0}")]
    UnknownCluster(ClusterId),
}

/// Outcome of folding one observation or message into the model.
#[derive(Clone, Copy, Debug)]
pub struct TrustUpdate {
    pub cluster: ClusterId,
    pub created: bool,
    pub trust_before: f64,
    pub trust_after: f64,
}

pub struct TrustModel {
    pub params: TrustParams,
    clusters: Vec<TrustCluster>,
    next_id: ClusterId,
}

impl TrustModel {
    pub fn new(params: TrustParams) -> TrustModel {
        TrustModel {
            params,
            clusters: Vec::new(),
            next_id: 0,
        }
    }

    pub fn clusters(&self) -> &[TrustCluster] {
        &self.clusters
    }

    pub fn cluster(&self, id: ClusterId) -> Option<&TrustCluster> {
        self.clusters.iter().find(|c| c.id == id)
    }

    fn cluster_mut(&mut self, id: ClusterId) -> Option<&mut TrustCluster> {
        self.clusters.iter_mut().find(|c| c.id == id)
    }

    /// Nearest cluster by Euclidean distance; ties go to the lowest id.
    pub fn nearest(&self, v: &FeatureVector) -> Option<(ClusterId, f64)> {
        let mut best: Option<(ClusterId, f64)> = None;
        for c in &self.clusters {
            let d = c.centroid.dist(v);
            match best {
                Some((_, bd)) if d >= bd => {}
                _ => best = Some((c.id, d)),
            }
        }
        best
    }

    /// Folds one observed feature vector in: attaches to the nearest cluster
    /// within `tau`, nudging its centroid, or creates a new cluster at the
    /// prior trust.
    pub fn observe(&mut self, v: &FeatureVector, flow: FlowKey, now: f64) -> TrustUpdate {
        let eta = self.params.eta;
        let cap = self.params.member_cap;
        if let Some((id, d)) = self.nearest(v) {
            if d <= self.params.tau {
                let c = self.cluster_mut(id).unwrap();
                for i in 0..4 {
                    c.centroid.0[i] += eta * (v.0[i] - c.centroid.0[i]);
                }
                c.weight += 1;
                c.last_seen = now;
                c.member_flows.push_back(flow);
                while c.member_flows.len() > cap {
                    c.member_flows.pop_front();
                }
                return TrustUpdate {
                    cluster: id,
                    created: false,
                    trust_before: c.trust,
                    trust_after: c.trust,
                };
            }
        }
        let id = self.next_id;
        self.next_id += 1;
        let trust = self.params.prior;
        let mut member_flows = VecDeque::new();
        member_flows.push_back(flow);
        self.clusters.push(TrustCluster {
            id,
            centroid: *v,
            trust,
            weight: 1,
            member_flows,
            last_seen: now,
            shadow: false,
        });
        TrustUpdate {
            cluster: id,
            created: true,
            trust_before: trust,
            trust_after: trust,
        }
    }

    /// Exponentially smooths the cluster's trust toward observation `o`.
    pub fn update_trust(&mut self, id: ClusterId, o: f64) -> Result<TrustUpdate, TrustError> {
        if !(0.0..=1.0).contains(&o) {
            return Err(TrustError::ObservationRange(o));
        }
        let alpha = self.params.alpha;
        let c = self
            .cluster_mut(id)
            .ok_or(TrustError::UnknownCluster(id))?;
        let before = c.trust;
        c.trust = (1.0 - alpha) * c.trust + alpha * o;
        c.trust = c.trust.clamp(0.0, 1.0);
        Ok(TrustUpdate {
            cluster: id,
            created: false,
            trust_before: before,
            trust_after: c.trust,
        })
    }

    pub fn classify(&self, id: ClusterId) -> Option<TrustClass> {
        self.cluster(id).map(|c| {
            if c.trust < self.params.theta_mal {
                TrustClass::Malicious
            } else if c.trust > self.params.theta_ben {
                TrustClass::Benign
            } else {
                TrustClass::Unknown
            }
        })
    }

    /// Folds remote cluster evidence in. Near an existing cluster the trust
    /// becomes the weighted mean of both sides; otherwise the evidence seeds
    /// a shadow cluster.
    pub fn merge_reputation(
        &mut self,
        msg: &ReputationMessage,
        now: f64,
    ) -> Result<TrustUpdate, TrustError> {
        if msg.weight < 1 {
            return Err(TrustError::ZeroWeight);
        }
        if let Some((id, d)) = self.nearest(&msg.centroid) {
            if d <= self.params.tau {
                let c = self.cluster_mut(id).unwrap();
                let before = c.trust;
                let w = c.weight as f64;
                let mw = msg.weight as f64;
                c.trust = ((c.trust * w + msg.trust * mw) / (w + mw)).clamp(0.0, 1.0);
                c.weight += msg.weight;
                c.last_seen = now;
                return Ok(TrustUpdate {
                    cluster: id,
                    created: false,
                    trust_before: before,
                    trust_after: c.trust,
                });
            }
        }
        let id = self.next_id;
        self.next_id += 1;
        let trust = msg.trust.clamp(0.0, 1.0);
        self.clusters.push(TrustCluster {
            id,
            centroid: msg.centroid,
            trust,
            weight: msg.weight,
            member_flows: VecDeque::new(),
            last_seen: now,
            shadow: true,
        });
        Ok(TrustUpdate {
            cluster: id,
            created: true,
            trust_before: trust,
            trust_after: trust,
        })
    }

    /// Answers a reputation query: the nearest cluster within `tau`, if any.
    pub fn answer_query(&self, centroid: &FeatureVector) -> Option<&TrustCluster> {
        match self.nearest(centroid) {
            Some((id, d)) if d <= self.params.tau => self.cluster(id),
            _ => None,
        }
    }
}
