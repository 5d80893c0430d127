//! Static network topology and shortest-path routing.
//!
//! Links are declared once and used in both directions; each direction gets
//! its own queue. Routes are computed at load time by hop count, with ties
//! broken toward the lowest node id so forwarding is deterministic.

use thiserror::Error;

use crate::attacks::AttackKind;

/// Index into [`Topology::nodes`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

/// Index into the directed-link table built from the declared links.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DirLinkId(pub u32);

impl DirLinkId {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Host,
    Router,
    /// Reconfigurable network element: forwards like a router but honors
    /// installed filter rules.
    Ne,
}

#[derive(Clone, Debug)]
pub struct Node {
    pub id: NodeId,
    pub name: String,
    pub kind: NodeKind,
    /// Packets per second the host can process before saturating.
    pub cpu_capacity: f64,
    /// Concurrent flows the host can hold state for.
    pub mem_slots: usize,
    /// Answers echo requests with one reply to the claimed source.
    pub echo_responder: bool,
    pub vulnerable_to: Vec<AttackKind>,
}

#[derive(Clone, Debug)]
pub struct Link {
    pub from: NodeId,
    pub to: NodeId,
    /// Service rate in packets per second.
    pub capacity: f64,
    /// Drop-tail queue length bound, in packets.
    pub queue_limit: usize,
    /// Propagation delay in seconds.
    pub latency: f64,
}

/// One direction of a declared link.
#[derive(Clone, Debug)]
pub struct DirLink {
    pub id: DirLinkId,
    pub from: NodeId,
    pub to: NodeId,
    pub capacity: f64,
    pub queue_limit: usize,
    pub latency: f64,
}

#[derive(Clone, Debug, Default)]
pub struct Topology {
    pub nodes: Vec<Node>,
    pub links: Vec<Link>,
}

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("link endpoint {0} does not exist")]
    MissingEndpoint(String),
    #[error("duplicate node name {0}")]
    DuplicateName(String),
    #[error("link capacity must be positive, got {0}")]
    BadCapacity(f64),
    #[error("link latency must be non-negative and finite, got {0}")]
    BadLatency(f64),
    #[error("node {0} has non-positive cpu capacity")]
    BadCpu(String),
    #[error("topology graph is not connected (node {0} unreachable)")]
    Disconnected(String),
    #[error("link connects {0} to itself")]
    SelfLink(String),
}

impl Topology {
    pub fn node_by_name(&self, name: &str) -> Option<NodeId> {
        self.nodes
            .iter()
            .position(|n| n.name == name)
            .map(|i| NodeId(i as u32))
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.idx()]
    }

    pub fn name(&self, id: NodeId) -> &str {
        &self.nodes[id.idx()].name
    }

    pub fn validate(&self) -> Result<(), TopologyError> {
        for (i, n) in self.nodes.iter().enumerate() {
            if self.nodes[..i].iter().any(|m| m.name == n.name) {
                return Err(TopologyError::DuplicateName(n.name.clone()));
            }
            if !n.cpu_capacity.is_finite() || n.cpu_capacity <= 0.0 {
                return Err(TopologyError::BadCpu(n.name.clone()));
            }
        }
        for l in &self.links {
            for end in [l.from, l.to] {
                if end.idx() >= self.nodes.len() {
                    return Err(TopologyError::MissingEndpoint(format!("#{}", end.0)));
                }
            }
            if l.from == l.to {
                return Err(TopologyError::SelfLink(self.name(l.from).to_string()));
            }
            if !l.capacity.is_finite() || l.capacity <= 0.0 {
                return Err(TopologyError::BadCapacity(l.capacity));
            }
            if !l.latency.is_finite() || l.latency < 0.0 {
                return Err(TopologyError::BadLatency(l.latency));
            }
        }
        if self.nodes.len() > 1 {
            let routes = Routes::build(self);
            for n in &self.nodes {
                if n.id != NodeId(0) && routes.hop_dist(NodeId(0), n.id).is_none() {
                    return Err(TopologyError::Disconnected(n.name.clone()));
                }
            }
        }
        Ok(())
    }
}

/// Precomputed next-hop tables over the directed-link view.
pub struct Routes {
    pub dlinks: Vec<DirLink>,
    /// next_hop[src][dst] = directed link to take from src toward dst.
    next_hop: Vec<Vec<Option<DirLinkId>>>,
    hop_dist: Vec<Vec<Option<u32>>>,
}

impl Routes {
    pub fn build(topo: &Topology) -> Routes {
        let n = topo.nodes.len();
        let mut dlinks = Vec::with_capacity(topo.links.len() * 2);
        for l in &topo.links {
            for (from, to) in [(l.from, l.to), (l.to, l.from)] {
                dlinks.push(DirLink {
                    id: DirLinkId(dlinks.len() as u32),
                    from,
                    to,
                    capacity: l.capacity,
                    queue_limit: l.queue_limit,
                    latency: l.latency,
                });
            }
        }
        // Outgoing directed links per node, ordered by (neighbor, link id).
        let mut out: Vec<Vec<DirLinkId>> = vec![Vec::new(); n];
        for d in &dlinks {
            out[d.from.idx()].push(d.id);
        }
        for o in &mut out {
            o.sort_by_key(|&d| (dlinks[d.idx()].to, d));
        }

        let mut next_hop = vec![vec![None; n]; n];
        let mut hop_dist = vec![vec![None; n]; n];
        for dst in 0..n {
            // BFS from the destination; links are symmetric so distances
            // toward dst equal distances from it.
            let mut dist: Vec<Option<u32>> = vec![None; n];
            dist[dst] = Some(0);
            let mut frontier = vec![dst];
            while !frontier.is_empty() {
                let mut next = Vec::new();
                for &u in &frontier {
                    for &dl in &out[u] {
                        let v = dlinks[dl.idx()].to.idx();
                        if dist[v].is_none() {
                            dist[v] = Some(dist[u].unwrap() + 1);
                            next.push(v);
                        }
                    }
                }
                frontier = next;
            }
            for src in 0..n {
                hop_dist[src][dst] = dist[src];
                if src == dst || dist[src].is_none() {
                    continue;
                }
                let want = dist[src].unwrap() - 1;
                next_hop[src][dst] = out[src]
                    .iter()
                    .copied()
                    .find(|&dl| dist[dlinks[dl.idx()].to.idx()] == Some(want));
            }
        }
        Routes {
            dlinks,
            next_hop,
            hop_dist,
        }
    }

    pub fn next_hop(&self, from: NodeId, to: NodeId) -> Option<DirLinkId> {
        self.next_hop[from.idx()][to.idx()]
    }

    pub fn hop_dist(&self, from: NodeId, to: NodeId) -> Option<u32> {
        self.hop_dist[from.idx()][to.idx()]
    }

    pub fn dlink(&self, id: DirLinkId) -> &DirLink {
        &self.dlinks[id.idx()]
    }

    /// Directed link from `from` to `to`, if the nodes are adjacent.
    pub fn dlink_between(&self, from: NodeId, to: NodeId) -> Option<DirLinkId> {
        self.dlinks
            .iter()
            .find(|d| d.from == from && d.to == to)
            .map(|d| d.id)
    }

    /// Sum of propagation delays along the routed path.
    pub fn path_latency(&self, from: NodeId, to: NodeId) -> f64 {
        let mut at = from;
        let mut total = 0.0;
        while at != to {
            match self.next_hop(at, to) {
                Some(dl) => {
                    let d = self.dlink(dl);
                    total += d.latency;
                    at = d.to;
                }
                None => return total,
            }
        }
        total
    }
}
