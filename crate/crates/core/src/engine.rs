//! Event queue and global packet accounting.
//!
//! Events are ordered by (time, insertion sequence): ties on time run in the
//! order they were scheduled. The queue is the only clock in the simulator.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("event scheduled at t={time} which is before now={now}")]
    Causality { time: f64, now: f64 },
    #[error("event time {0} is not finite")]
    BadTime(f64),
}

struct Entry<T> {
    time: f64,
    seq: u64,
    payload: T,
}

impl<T> PartialEq for Entry<T> {
    fn eq(&self, other: &Self) -> bool {
        self.seq == other.seq
    }
}

impl<T> Eq for Entry<T> {}

impl<T> PartialOrd for Entry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T> Ord for Entry<T> {
    // Reversed so the std max-heap pops the earliest (time, seq) first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Min-heap of timed events with a deterministic tiebreak.
pub struct EventQueue<T> {
    heap: BinaryHeap<Entry<T>>,
    next_seq: u64,
    now: f64,
}

impl<T> Default for EventQueue<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T> EventQueue<T> {
    pub fn new() -> Self {
        EventQueue {
            heap: BinaryHeap::new(),
            next_seq: 0,
            now: 0.0,
        }
    }

    /// Current simulation time: the timestamp of the last popped event.
    pub fn now(&self) -> f64 {
        self.now
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    /// Schedules `payload` at absolute time `time`. Scheduling into the past
    /// is a causality error.
    pub fn schedule(&mut self, time: f64, payload: T) -> Result<u64, EngineError> {
        if !time.is_finite() {
            return Err(EngineError::BadTime(time));
        }
        if time < self.now {
            return Err(EngineError::Causality {
                time,
                now: self.now,
            });
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Entry { time, seq, payload });
        Ok(seq)
    }

    /// Pops the next event if it occurs at or before `t_end`, advancing the
    /// clock to it. Returns `None` once nothing is due, leaving later events
    /// queued.
    pub fn pop_until(&mut self, t_end: f64) -> Option<(f64, T)> {
        match self.heap.peek() {
            Some(e) if e.time <= t_end => {
                let e = self.heap.pop().unwrap();
                self.now = e.time;
                Some((e.time, e.payload))
            }
            _ => None,
        }
    }

    /// Moves the clock forward to `t_end` after draining, e.g. at end of run.
    pub fn advance_to(&mut self, t_end: f64) {
        if t_end > self.now {
            self.now = t_end;
        }
    }
}

/// Global packet accounting. After every event:
/// `injected == delivered + queue_dropped + filter_dropped + in_flight`,
/// as exact integer equality.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SimStats {
    /// Packets created by senders, generators, and reflector replies.
    pub injected: u64,
    /// Packets that reached their destination host, whether or not the host
    /// accepted them.
    pub delivered: u64,
    /// Packets lost to drop-tail queue overflow.
    pub queue_dropped: u64,
    /// Packets removed by a filter rule at a network element.
    pub filter_dropped: u64,
    /// Packets still queued, on the wire, or awaiting arrival.
    pub in_flight: u64,
}

impl SimStats {
    pub fn conservation_holds(&self) -> bool {
        self.injected == self.delivered + self.queue_dropped + self.filter_dropped + self.in_flight
    }
}
