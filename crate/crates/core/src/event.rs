//! Global events and traces.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geometry::Angle;
use crate::message::Message;
use crate::node::NodeId;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Event {
    Bcast {
        actor: NodeId,
        start: Scalar,
        msg: Message,
    },
    Dcast {
        actor: NodeId,
        start: Scalar,
        alpha: Angle,
        beta: Angle,
        msg: Message,
    },
    Receive {
        actor: NodeId,
        start: Scalar,
        sender: NodeId,
        msg: Message,
    },
    Neighbor {
        actor: NodeId,
        start: Scalar,
        neighbor: NodeId,
        declared_time: Scalar,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    Bcast,
    Dcast,
    Receive,
    Neighbor,
}

impl Event {
    pub fn bcast(actor: impl Into<NodeId>, start: Scalar, msg: Message) -> Self {
        Event::Bcast { actor: actor.into(), start, msg }
    }

    pub fn dcast(
        actor: impl Into<NodeId>,
        start: Scalar,
        alpha: Angle,
        beta: Angle,
        msg: Message,
    ) -> Self {
        Event::Dcast { actor: actor.into(), start, alpha, beta, msg }
    }

    pub fn receive(
        actor: impl Into<NodeId>,
        start: Scalar,
        sender: impl Into<NodeId>,
        msg: Message,
    ) -> Self {
        Event::Receive { actor: actor.into(), start, sender: sender.into(), msg }
    }

    pub fn neighbor(
        actor: impl Into<NodeId>,
        start: Scalar,
        neighbor: impl Into<NodeId>,
        declared_time: Scalar,
    ) -> Self {
        Event::Neighbor { actor: actor.into(), start, neighbor: neighbor.into(), declared_time }
    }

    pub fn actor(&self) -> &NodeId {
        match self {
            Event::Bcast { actor, .. }
            | Event::Dcast { actor, .. }
            | Event::Receive { actor, .. }
            | Event::Neighbor { actor, .. } => actor,
        }
    }

    pub fn start(&self) -> &Scalar {
        match self {
            Event::Bcast { start, .. }
            | Event::Dcast { start, .. }
            | Event::Receive { start, .. }
            | Event::Neighbor { start, .. } => start,
        }
    }

    pub fn kind(&self) -> EventKind {
        match self {
            Event::Bcast { .. } => EventKind::Bcast,
            Event::Dcast { .. } => EventKind::Dcast,
            Event::Receive { .. } => EventKind::Receive,
            Event::Neighbor { .. } => EventKind::Neighbor,
        }
    }

    pub fn msg(&self) -> Option<&Message> {
        match self {
            Event::Bcast { msg, .. } | Event::Dcast { msg, .. } | Event::Receive { msg, .. } => {
                Some(msg)
            }
            Event::Neighbor { .. } => None,
        }
    }

    /// start + |m| for message events, start for Neighbor.
    pub fn end(&self) -> Scalar {
        match self.msg() {
            Some(m) => self.start() + m.duration(),
            None => self.start().clone(),
        }
    }

    /// Structural well-formedness: non-negative times, angles in range,
    /// positive message duration.
    pub fn well_formed(&self) -> Result<(), String> {
        if self.start().is_negative() {
            return Err(format!("negative start time {}", self.start()));
        }
        if let Some(m) = self.msg() {
            if !m.duration().is_positive() {
                return Err(format!("non-positive message duration {}", m.duration()));
            }
        }
        match self {
            Event::Dcast { alpha, beta, .. } => {
                if !alpha.is_valid_direction() {
                    return Err(format!("direction {alpha} outside [0, 2π)"));
                }
                if !beta.is_valid_width() {
                    return Err(format!("angle {beta} outside (0, 2π]"));
                }
            }
            Event::Neighbor { declared_time, .. } if declared_time.is_negative() => {
                return Err(format!("negative declared time {declared_time}"));
            }
            _ => {}
        }
        Ok(())
    }
}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        self.start()
            .cmp(other.start())
            .then_with(|| self.actor().cmp(other.actor()))
            .then_with(|| self.kind().cmp(&other.kind()))
            .then_with(|| match (self, other) {
                (Event::Bcast { msg: a, .. }, Event::Bcast { msg: b, .. }) => a.cmp(b),
                (
                    Event::Dcast { alpha: a1, beta: b1, msg: m1, .. },
                    Event::Dcast { alpha: a2, beta: b2, msg: m2, .. },
                ) => (m1, a1, b1).cmp(&(m2, a2, b2)),
                (
                    Event::Receive { sender: s1, msg: m1, .. },
                    Event::Receive { sender: s2, msg: m2, .. },
                ) => (m1, s1).cmp(&(m2, s2)),
                (
                    Event::Neighbor { neighbor: n1, declared_time: t1, .. },
                    Event::Neighbor { neighbor: n2, declared_time: t2, .. },
                ) => (n1, t1).cmp(&(n2, t2)),
                _ => Ordering::Equal,
            })
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::Bcast { actor, start, msg } => write!(f, "Bcast({actor}; {start}; {msg})"),
            Event::Dcast { actor, start, alpha, beta, msg } => {
                write!(f, "Dcast({actor}; {start}; {alpha}, {beta}, {msg})")
            }
            Event::Receive { actor, start, sender, msg } => {
                write!(f, "Receive({actor}; {start}; {sender}, {msg})")
            }
            Event::Neighbor { actor, start, neighbor, declared_time } => {
                write!(f, "Neighbor({actor}; {start}; {neighbor}, {declared_time})")
            }
        }
    }
}

/// A finite set of events, kept in canonical order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Trace {
    events: BTreeSet<Event>,
}

impl Trace {
    pub fn new() -> Self {
        Trace::default()
    }

    /// Returns `false` if the event was already present.
    pub fn insert(&mut self, e: Event) -> bool {
        self.events.insert(e)
    }

    pub fn remove(&mut self, e: &Event) -> bool {
        self.events.remove(e)
    }

    pub fn contains(&self, e: &Event) -> bool {
        self.events.contains(e)
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Event> + '_ {
        self.events.iter()
    }

    pub fn by_actor<'a>(&'a self, node: &'a NodeId) -> impl Iterator<Item = &'a Event> + 'a {
        self.events.iter().filter(move |e| e.actor() == node)
    }

    /// Every node mentioned as actor, sender or declared neighbor.
    pub fn nodes(&self) -> BTreeSet<NodeId> {
        let mut out = BTreeSet::new();
        for e in &self.events {
            out.insert(e.actor().clone());
            match e {
                Event::Receive { sender, .. } => {
                    out.insert(sender.clone());
                }
                Event::Neighbor { neighbor, .. } => {
                    out.insert(neighbor.clone());
                }
                _ => {}
            }
        }
        out
    }

    pub fn map_events(&self, f: impl Fn(&Event) -> Event) -> Trace {
        self.events.iter().map(f).collect()
    }
}

impl FromIterator<Event> for Trace {
    fn from_iter<I: IntoIterator<Item = Event>>(iter: I) -> Self {
        Trace { events: iter.into_iter().collect() }
    }
}

impl Extend<Event> for Trace {
    fn extend<I: IntoIterator<Item = Event>>(&mut self, iter: I) {
        self.events.extend(iter)
    }
}

impl<'a> IntoIterator for &'a Trace {
    type Item = &'a Event;
    type IntoIter = std::collections::btree_set::Iter<'a, Event>;
    fn into_iter(self) -> Self::IntoIter {
        self.events.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m() -> Message {
        Message::opaque("m", Scalar::from_int(2))
    }

    #[test]
    fn end_times() {
        let b = Event::bcast("A", Scalar::from_int(3), m());
        assert_eq!(b.end(), Scalar::from_int(5));
        let n = Event::neighbor("A", Scalar::from_int(3), "B", Scalar::one());
        assert_eq!(n.end(), Scalar::from_int(3));
    }

    #[test]
    fn canonical_order_is_start_then_actor_then_kind() {
        let t: Trace = [
            Event::neighbor("A", Scalar::from_int(1), "B", Scalar::zero()),
            Event::receive("B", Scalar::zero(), "A", m()),
            Event::bcast("A", Scalar::from_int(1), m()),
            Event::bcast("A", Scalar::zero(), m()),
        ]
        .into_iter()
        .collect();
        let kinds: Vec<_> = t.iter().map(|e| (e.start().clone(), e.actor().0.clone(), e.kind())).collect();
        assert_eq!(
            kinds,
            vec![
                (Scalar::zero(), "A".into(), EventKind::Bcast),
                (Scalar::zero(), "B".into(), EventKind::Receive),
                (Scalar::one(), "A".into(), EventKind::Bcast),
                (Scalar::one(), "A".into(), EventKind::Neighbor),
            ]
        );
    }

    #[test]
    fn duplicates_collapse() {
        let mut t = Trace::new();
        assert!(t.insert(Event::bcast("A", Scalar::zero(), m())));
        assert!(!t.insert(Event::bcast("A", Scalar::zero(), m())));
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn malformed_dcast_angles() {
        let e = Event::dcast("C", Scalar::zero(), Angle(Scalar::from_int(2)), Angle::half_turn(), m());
        assert!(e.well_formed().is_err());
        let e = Event::dcast("C", Scalar::zero(), Angle::zero(), Angle(Scalar::zero()), m());
        assert!(e.well_formed().is_err());
    }
}
