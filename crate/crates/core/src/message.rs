//! Message payloads: opaque tokens and symbolically authenticated beacons.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::geometry::Point;
use crate::node::NodeId;
use crate::scalar::Scalar;

/// A message in flight.
///
/// Beacons are authenticated symbolically: the `creator` field *is* the
/// authentication tag, and nothing in this crate lets an adversary produce a
/// beacon for a correct creator other than by relaying one it received.
///
/// Opaque messages are identified by their token alone; two opaque messages
/// with the same token compare equal regardless of duration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Message {
    Opaque {
        token: String,
        duration: Scalar,
    },
    /// `auth_creator(time)`
    BeaconT {
        creator: NodeId,
        time: Scalar,
        duration: Scalar,
    },
    /// `auth_creator(time, loc)`
    BeaconTl {
        creator: NodeId,
        time: Scalar,
        loc: Point,
        duration: Scalar,
    },
}

const IDENTITY_PREFIX: &str = "hello:";

impl Message {
    pub fn opaque(token: impl Into<String>, duration: Scalar) -> Self {
        Message::Opaque { token: token.into(), duration }
    }

    pub fn beacon_t(creator: NodeId, time: Scalar, duration: Scalar) -> Self {
        Message::BeaconT { creator, time, duration }
    }

    pub fn beacon_tl(creator: NodeId, time: Scalar, loc: Point, duration: Scalar) -> Self {
        Message::BeaconTl { creator, time, loc, duration }
    }

    /// Unauthenticated "I am `node`" beacon used by the naive protocol.
    pub fn identity(node: &NodeId, duration: Scalar) -> Self {
        Message::opaque(format!("{IDENTITY_PREFIX}{node}"), duration)
    }

    /// |m|
    pub fn duration(&self) -> &Scalar {
        match self {
            Message::Opaque { duration, .. }
            | Message::BeaconT { duration, .. }
            | Message::BeaconTl { duration, .. } => duration,
        }
    }

    /// The authenticated creator, if this is a beacon.
    pub fn creator(&self) -> Option<&NodeId> {
        match self {
            Message::Opaque { .. } => None,
            Message::BeaconT { creator, .. } | Message::BeaconTl { creator, .. } => Some(creator),
        }
    }

    /// Identity the message *claims*, authenticated or not.
    pub fn claimed_identity(&self) -> Option<NodeId> {
        match self {
            Message::Opaque { token, .. } => {
                token.strip_prefix(IDENTITY_PREFIX).map(NodeId::from)
            }
            _ => self.creator().cloned(),
        }
    }

    pub fn is_beacon(&self) -> bool {
        !matches!(self, Message::Opaque { .. })
    }

    fn rank(&self) -> u8 {
        match self {
            Message::Opaque { .. } => 0,
            Message::BeaconT { .. } => 1,
            Message::BeaconTl { .. } => 2,
        }
    }
}

impl PartialEq for Message {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Message {}

impl Ord for Message {
    fn cmp(&self, other: &Self) -> Ordering {
        use Message::*;
        match (self, other) {
            (Opaque { token: a, .. }, Opaque { token: b, .. }) => a.cmp(b),
            (
                BeaconT { creator: c1, time: t1, duration: d1 },
                BeaconT { creator: c2, time: t2, duration: d2 },
            ) => (c1, t1, d1).cmp(&(c2, t2, d2)),
            (
                BeaconTl { creator: c1, time: t1, loc: l1, duration: d1 },
                BeaconTl { creator: c2, time: t2, loc: l2, duration: d2 },
            ) => (c1, t1, l1, d1).cmp(&(c2, t2, l2, d2)),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for Message {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Hash for Message {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rank().hash(state);
        match self {
            Message::Opaque { token, .. } => token.hash(state),
            Message::BeaconT { creator, time, duration } => (creator, time, duration).hash(state),
            Message::BeaconTl { creator, time, loc, duration } => {
                (creator, time, loc, duration).hash(state)
            }
        }
    }
}

impl fmt::Display for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Message::Opaque { token, .. } => write!(f, "`{token}`"),
            Message::BeaconT { creator, time, .. } => write!(f, "auth_{creator}({time})"),
            Message::BeaconTl { creator, time, loc, .. } => {
                write!(f, "auth_{creator}({time}, {loc})")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn opaque_identity_is_token_only() {
        let a = Message::opaque("x", Scalar::from_int(1));
        let b = Message::opaque("x", Scalar::from_int(5));
        assert_eq!(a, b);
        assert_ne!(a, Message::opaque("y", Scalar::from_int(1)));
    }

    #[test]
    fn beacons_compare_all_fields() {
        let b = NodeId::from("B");
        let one = Scalar::from_int(1);
        let m1 = Message::beacon_t(b.clone(), Scalar::zero(), one.clone());
        let m2 = Message::beacon_t(b.clone(), Scalar::from_int(2), one.clone());
        assert_ne!(m1, m2);
        assert_eq!(m1, Message::beacon_t(b, Scalar::zero(), one));
    }

    #[test]
    fn identity_beacon_claims_node() {
        let m = Message::identity(&NodeId::from("B"), Scalar::one());
        assert_eq!(m.claimed_identity(), Some(NodeId::from("B")));
        assert_eq!(m.creator(), None);
    }
}
