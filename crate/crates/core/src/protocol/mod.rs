//! Protocol models: a pure `decide` function from a local view to a set of
//! permitted actions, and the generic checker that holds correct nodes in a
//! trace to those permissions.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::event::{Event, Trace};
use crate::message::Message;
use crate::node::NodeId;
use crate::params::{InaccuracyParams, SystemParams};
use crate::scalar::Scalar;
use crate::setting::Setting;
use crate::verdict::{rules, Collector, Verdict};
use crate::view::{project_local, Cutoff, Flavor, LocalView};

mod naive;
mod pgt;
mod pt;

pub use naive::{naive_decide, NaiveProtocol};
pub use pgt::{check_pgt_feasible, pgt_approx_decide, pgt_decide, PgtProtocol};
pub use pt::{check_pt_feasible, pt_decide, PtProtocol};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Action {
    Epsilon,
    Bcast(Message),
    Neighbor { node: NodeId, declared_time: Scalar },
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Epsilon => f.write_str("ε"),
            Action::Bcast(m) => write!(f, "Bcast({m})"),
            Action::Neighbor { node, declared_time } => write!(f, "Neighbor({node}, {declared_time})"),
        }
    }
}

pub trait ProtocolModel: Send + Sync {
    fn name(&self) -> &str;
    fn flavor(&self) -> Flavor;
    /// Finite, non-empty set of actions permitted by `view`.
    fn decide(&self, view: &LocalView) -> BTreeSet<Action>;
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("protocol `{0}` needs time-and-location views, which require a setting")]
    FlavorMismatch(String),
}

/// Check the Bcast, Neighbor and idle permissions of every correct node.
///
/// Idle permission is sampled at 0, at every start and end of the node's
/// events, at midpoints between consecutive such times and one unit past the
/// last; start times of the node's own Bcast and Neighbor events are skipped.
/// Without a setting every actor is treated as correct.
pub fn check_protocol_feasible(
    trace: &Trace,
    setting: Option<&Setting>,
    protocol: &dyn ProtocolModel,
) -> Result<Verdict, ProtocolError> {
    if protocol.flavor() == Flavor::TL && setting.is_none() {
        return Err(ProtocolError::FlavorMismatch(protocol.name().to_owned()));
    }
    let correct: BTreeSet<NodeId> = match setting {
        Some(s) => s.correct_nodes(),
        None => trace.iter().map(|e| e.actor().clone()).collect(),
    };
    let mut out = Collector::default();
    for node in &correct {
        let view_at = |t: &Scalar| {
            project_local(trace, node, Cutoff::At(t.clone()), protocol.flavor(), setting)
                .expect("correct node is known")
        };
        let mut acting = BTreeSet::new();
        let mut boundaries = BTreeSet::from([Scalar::zero()]);
        for e in trace.by_actor(node) {
            boundaries.insert(e.start().clone());
            boundaries.insert(e.end());
            let wanted = match e {
                Event::Bcast { start, msg, .. } => {
                    acting.insert(start.clone());
                    Some((Action::Bcast(msg.clone()), rules::PROTOCOL_BCAST))
                }
                Event::Neighbor { start, neighbor, declared_time, .. } => {
                    acting.insert(start.clone());
                    Some((
                        Action::Neighbor { node: neighbor.clone(), declared_time: declared_time.clone() },
                        rules::PROTOCOL_NEIGHBOR,
                    ))
                }
                _ => None,
            };
            if let Some((action, rule)) = wanted {
                if !protocol.decide(&view_at(e.start())).contains(&action) {
                    out.add(rule, vec![e.clone()], format!("{} does not permit {action}", protocol.name()));
                }
            }
        }
        for t in sample_times(&boundaries) {
            if acting.contains(&t) {
                continue;
            }
            if !protocol.decide(&view_at(&t)).contains(&Action::Epsilon) {
                out.add(
                    rules::PROTOCOL_EPSILON,
                    Vec::new(),
                    format!("{} forbids {node} from idling at {t}", protocol.name()),
                );
            }
        }
    }
    Ok(out.finish())
}

fn sample_times(boundaries: &BTreeSet<Scalar>) -> Vec<Scalar> {
    let mut out: Vec<Scalar> = boundaries.iter().cloned().collect();
    let two = Scalar::from_int(2);
    for w in boundaries.iter().collect::<Vec<_>>().windows(2) {
        out.push((w[0] + w[1]) / two.clone());
    }
    if let Some(last) = boundaries.iter().next_back() {
        out.push(last + &Scalar::one());
    }
    out
}

/// Whether the time estimate `elapsed` and the location estimate
/// `sqrt(dist_sq) / v` agree within `tolerance` (time units), decided
/// without taking square roots.
pub(crate) fn estimates_agree(elapsed: &Scalar, dist_sq: &Scalar, v: &Scalar, tolerance: &Scalar) -> bool {
    let hi = v * &(elapsed + tolerance);
    if hi.is_negative() || dist_sq > &hi.square() {
        return false;
    }
    let lo = v * &(elapsed - tolerance);
    !lo.is_positive() || dist_sq >= &lo.square()
}

/// Protocol selection as written in scenario files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum ProtocolSpec {
    Naive,
    Pt,
    Pgt,
    PgtApprox(InaccuracyParams),
}

impl ProtocolSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ProtocolSpec::Naive => "naive",
            ProtocolSpec::Pt => "pt",
            ProtocolSpec::Pgt => "pgt",
            ProtocolSpec::PgtApprox(_) => "pgt-approx",
        }
    }

    pub fn flavor(&self) -> Flavor {
        match self {
            ProtocolSpec::Naive | ProtocolSpec::Pt => Flavor::T,
            ProtocolSpec::Pgt | ProtocolSpec::PgtApprox(_) => Flavor::TL,
        }
    }

    pub fn inaccuracy(&self) -> Option<&InaccuracyParams> {
        match self {
            ProtocolSpec::PgtApprox(i) => Some(i),
            _ => None,
        }
    }

    pub fn model(&self, params: &SystemParams) -> Box<dyn ProtocolModel> {
        match self {
            ProtocolSpec::Naive => Box::new(NaiveProtocol::new(params.clone())),
            ProtocolSpec::Pt => Box::new(PtProtocol::new(params.clone())),
            ProtocolSpec::Pgt => Box::new(PgtProtocol::new(params.clone(), None)),
            ProtocolSpec::PgtApprox(i) => Box::new(PgtProtocol::new(params.clone(), Some(i.clone()))),
        }
    }

    /// Protocol feasibility using the protocol's own trace conditions where
    /// they exist, and the generic view-based checker for the naive baseline.
    pub fn check(&self, trace: &Trace, setting: &Setting, params: &SystemParams) -> Verdict {
        match self {
            ProtocolSpec::Naive => check_protocol_feasible(trace, Some(setting), &NaiveProtocol::new(params.clone()))
                .expect("setting supplied"),
            ProtocolSpec::Pt => check_pt_feasible(trace, setting, params),
            ProtocolSpec::Pgt => check_pgt_feasible(trace, setting, params, None),
            ProtocolSpec::PgtApprox(i) => check_pgt_feasible(trace, setting, params, Some(i)),
        }
    }
}

impl FromStr for ProtocolSpec {
    type Err = String;

    /// Parses the names without inaccuracy keys; `pgt-approx` defaults to
    /// zero error bounds.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "naive" => Ok(ProtocolSpec::Naive),
            "pt" => Ok(ProtocolSpec::Pt),
            "pgt" => Ok(ProtocolSpec::Pgt),
            "pgt-approx" => Ok(ProtocolSpec::PgtApprox(InaccuracyParams::exact())),
            other => Err(format!("unknown protocol `{other}` (expected naive, pt, pgt or pgt-approx)")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: i64) -> Scalar {
        Scalar::from_int(x)
    }

    #[test]
    fn agreement_without_roots() {
        let v = s(1);
        // distance 5, elapsed 5
        assert!(estimates_agree(&s(5), &s(25), &v, &s(0)));
        assert!(!estimates_agree(&s(6), &s(25), &v, &s(0)));
        assert!(estimates_agree(&s(6), &s(25), &v, &s(1)));
        assert!(!estimates_agree(&s(-5), &s(25), &v, &s(0)));
        // sqrt(2) ~ 1.414 within [1, 2]
        assert!(estimates_agree(&Scalar::ratio(3, 2), &s(2), &v, &Scalar::ratio(1, 2)));
        assert!(!estimates_agree(&s(2), &s(2), &v, &Scalar::ratio(1, 2)));
    }

    #[test]
    fn sample_set_includes_midpoints() {
        let b = BTreeSet::from([s(0), s(2), s(4)]);
        let got: BTreeSet<_> = sample_times(&b).into_iter().collect();
        assert_eq!(got, BTreeSet::from([s(0), s(1), s(2), s(3), s(4), s(5)]));
    }

    #[test]
    fn spec_names_round_trip() {
        for n in ["naive", "pt", "pgt", "pgt-approx"] {
            assert_eq!(n.parse::<ProtocolSpec>().unwrap().name(), n);
        }
        assert!("leash".parse::<ProtocolSpec>().is_err());
    }
}
