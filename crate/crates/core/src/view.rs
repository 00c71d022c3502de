//! Local views: what a single node can observe of a trace.
//!
//! A local trace keeps the node's own sends and neighbor declarations that
//! started strictly before the cut-off, and the receptions that *completed*
//! strictly before it. Receptions carry no sender: a receiver only learns the
//! payload, never who transmitted it.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::event::{Event, Trace};
use crate::geometry::Point;
use crate::message::Message;
use crate::node::NodeId;
use crate::scalar::Scalar;
use crate::setting::{ModelError, Setting};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LocalEvent {
    Bcast { start: Scalar, msg: Message },
    Receive { start: Scalar, msg: Message },
    Neighbor { start: Scalar, neighbor: NodeId, declared_time: Scalar },
}

impl LocalEvent {
    pub fn start(&self) -> &Scalar {
        match self {
            LocalEvent::Bcast { start, .. }
            | LocalEvent::Receive { start, .. }
            | LocalEvent::Neighbor { start, .. } => start,
        }
    }

    pub fn end(&self) -> Scalar {
        match self {
            LocalEvent::Bcast { start, msg } | LocalEvent::Receive { start, msg } => {
                start + msg.duration()
            }
            LocalEvent::Neighbor { start, .. } => start.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Flavor {
    /// Time only.
    T,
    /// Time and own location.
    TL,
}

/// Cut-off time for a projection; `Infinity` gives the complete local trace.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Cutoff {
    At(Scalar),
    Infinity,
}

impl Cutoff {
    fn admits(&self, t: &Scalar) -> bool {
        match self {
            Cutoff::At(c) => t < c,
            Cutoff::Infinity => true,
        }
    }

    pub fn time(&self) -> Option<&Scalar> {
        match self {
            Cutoff::At(c) => Some(c),
            Cutoff::Infinity => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LocalView {
    pub flavor: Flavor,
    pub owner: NodeId,
    pub as_of: Cutoff,
    pub owner_loc: Option<Point>,
    pub local_trace: BTreeSet<LocalEvent>,
}

impl LocalView {
    pub fn receptions(&self) -> impl Iterator<Item = (&Scalar, &Message)> + '_ {
        self.local_trace.iter().filter_map(|e| match e {
            LocalEvent::Receive { start, msg } => Some((start, msg)),
            _ => None,
        })
    }
}

/// The local trace of `node` in `trace`, censored at `cutoff`.
pub fn local_trace(trace: &Trace, node: &NodeId, cutoff: &Cutoff) -> BTreeSet<LocalEvent> {
    let mut out = BTreeSet::new();
    for e in trace.by_actor(node) {
        match e {
            Event::Bcast { start, msg, .. } if cutoff.admits(start) => {
                out.insert(LocalEvent::Bcast { start: start.clone(), msg: msg.clone() });
            }
            Event::Receive { start, msg, .. } => {
                let end = start + msg.duration();
                if cutoff.admits(&end) {
                    out.insert(LocalEvent::Receive { start: start.clone(), msg: msg.clone() });
                }
            }
            Event::Neighbor { start, neighbor, declared_time, .. } if cutoff.admits(start) => {
                out.insert(LocalEvent::Neighbor {
                    start: start.clone(),
                    neighbor: neighbor.clone(),
                    declared_time: declared_time.clone(),
                });
            }
            _ => {}
        }
    }
    out
}

/// Project `trace` onto `node` at `cutoff`. A TL view needs the setting to
/// supply the owner's location. `node` must appear in the trace or the setting.
pub fn project_local(
    trace: &Trace,
    node: &NodeId,
    cutoff: Cutoff,
    flavor: Flavor,
    setting: Option<&Setting>,
) -> Result<LocalView, ViewError> {
    let known = setting.is_some_and(|s| s.contains(node)) || trace.nodes().contains(node);
    if !known {
        return Err(ViewError::Model(ModelError::UnknownNode(node.clone())));
    }
    let owner_loc = match flavor {
        Flavor::T => None,
        Flavor::TL => {
            let s = setting.ok_or(ViewError::SettingRequired)?;
            Some(s.loc(node)?.clone())
        }
    };
    Ok(LocalView {
        flavor,
        owner: node.clone(),
        local_trace: local_trace(trace, node, &cutoff),
        as_of: cutoff,
        owner_loc,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ViewError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("a TL view requires a setting")]
    SettingRequired,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m() -> Message {
        Message::opaque("m", Scalar::one())
    }

    fn s(x: i64) -> Scalar {
        Scalar::from_int(x)
    }

    #[test]
    fn reception_needs_strict_completion() {
        let t: Trace = [Event::receive("A", s(2), "B", m())].into_iter().collect();
        let v = project_local(&t, &"A".into(), Cutoff::At(s(3)), Flavor::T, None).unwrap();
        assert!(v.local_trace.is_empty());
        let v = project_local(&t, &"A".into(), Cutoff::At(Scalar::ratio(7, 2)), Flavor::T, None).unwrap();
        assert_eq!(
            v.local_trace.into_iter().collect::<Vec<_>>(),
            vec![LocalEvent::Receive { start: s(2), msg: m() }]
        );
    }

    #[test]
    fn neighbor_needs_strict_start() {
        let t: Trace = [Event::bcast("A", s(0), m()), Event::neighbor("A", s(5), "B", s(1))]
            .into_iter()
            .collect();
        let v = project_local(&t, &"A".into(), Cutoff::At(s(5)), Flavor::T, None).unwrap();
        assert_eq!(
            v.local_trace.into_iter().collect::<Vec<_>>(),
            vec![LocalEvent::Bcast { start: s(0), msg: m() }]
        );
    }

    #[test]
    fn complete_projection_includes_everything_own() {
        let t: Trace = [
            Event::bcast("A", s(0), m()),
            Event::neighbor("A", s(5), "B", s(1)),
            Event::receive("A", s(100), "C", m()),
            Event::bcast("B", s(0), m()),
        ]
        .into_iter()
        .collect();
        let v = project_local(&t, &"A".into(), Cutoff::Infinity, Flavor::T, None).unwrap();
        assert_eq!(v.local_trace.len(), 3);
    }

    #[test]
    fn unknown_node_and_missing_setting() {
        let t: Trace = [Event::bcast("A", s(0), m())].into_iter().collect();
        assert!(matches!(
            project_local(&t, &"Z".into(), Cutoff::Infinity, Flavor::T, None),
            Err(ViewError::Model(ModelError::UnknownNode(_)))
        ));
        assert_eq!(
            project_local(&t, &"A".into(), Cutoff::Infinity, Flavor::TL, None),
            Err(ViewError::SettingRequired)
        );
    }
}
