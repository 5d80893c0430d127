//! Deterministic discrete-event simulation of a network under denial-of-service
//! attack, defended by cooperating agents.
//!
//! The simulator models hosts, routers, and reconfigurable network elements
//! connected by finite-capacity links. Attack generators and adaptive
//! legitimate senders inject packets; network sensors summarize traffic into
//! per-flow feature vectors; host sensors watch CPU and memory; detection
//! agents cluster flows, track per-cluster trust, exchange reputation with
//! their peers, and push filter rules down to network elements when a cluster
//! is confirmed malicious.
//!
//! Everything runs single-threaded off one event queue. Given the same
//! scenario and seed, a run reproduces byte-identical reports and event logs.

pub mod agents;
pub mod attacks;
pub mod engine;
pub mod eventlog;
pub mod flows;
pub mod metrics;
pub mod packet;
pub mod rng;
pub mod runner;
pub mod scenario;
pub mod sim;
pub mod topology;
pub mod trust;

pub use engine::{EngineError, EventQueue, SimStats};
pub use metrics::MetricsReport;
pub use runner::{run_scenario, RunOptions, RunOutput};
pub use scenario::Scenario;
