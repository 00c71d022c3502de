//! Temporal plus geographical leash: accept a beacon when the distance
//! implied by its flight time matches the distance to its claimed location.

use std::collections::BTreeSet;

use super::{estimates_agree, Action, ProtocolModel};
use crate::event::{Event, Trace};
use crate::message::Message;
use crate::params::{InaccuracyParams, SystemParams};
use crate::scalar::Scalar;
use crate::setting::Setting;
use crate::verdict::{rules, Collector, Verdict};
use crate::view::{Cutoff, Flavor, LocalView};

fn decide_with(view: &LocalView, params: &SystemParams, tolerance: &Scalar) -> BTreeSet<Action> {
    let mut out = BTreeSet::from([Action::Epsilon]);
    let Some(here) = &view.owner_loc else {
        return out;
    };
    if let Cutoff::At(now) = &view.as_of {
        out.insert(Action::Bcast(Message::beacon_tl(
            view.owner.clone(),
            now.clone(),
            here.clone(),
            params.msg_duration_default.clone(),
        )));
    }
    for (t1, msg) in view.receptions() {
        if let Message::BeaconTl { creator, time, loc, .. } = msg {
            if estimates_agree(&(t1 - time), &here.dist_sq(loc), &params.v, tolerance) {
                out.insert(Action::Neighbor { node: creator.clone(), declared_time: t1.clone() });
            }
        }
    }
    out
}

/// Exact agreement of the two distance estimates. Views without an owner
/// location only permit idling.
pub fn pgt_decide(view: &LocalView, params: &SystemParams) -> BTreeSet<Action> {
    decide_with(view, params, &Scalar::zero())
}

/// Agreement within `delta + tau` time units, boundary inclusive.
pub fn pgt_approx_decide(view: &LocalView, params: &SystemParams, inacc: &InaccuracyParams) -> BTreeSet<Action> {
    decide_with(view, params, &inacc.tolerance())
}

#[derive(Debug, Clone)]
pub struct PgtProtocol {
    params: SystemParams,
    inacc: Option<InaccuracyParams>,
}

impl PgtProtocol {
    pub fn new(params: SystemParams, inacc: Option<InaccuracyParams>) -> Self {
        PgtProtocol { params, inacc }
    }
}

impl ProtocolModel for PgtProtocol {
    fn name(&self) -> &str {
        if self.inacc.is_some() {
            "pgt-approx"
        } else {
            "pgt"
        }
    }

    fn flavor(&self) -> Flavor {
        Flavor::TL
    }

    fn decide(&self, view: &LocalView) -> BTreeSet<Action> {
        match &self.inacc {
            Some(i) => pgt_approx_decide(view, &self.params, i),
            None => pgt_decide(view, &self.params),
        }
    }
}

/// Trace-level conditions. With `inacc`, a correct node's beacon may carry a
/// timestamp off by up to `delta` and a location off by up to `tau * v`, and
/// neighbor declarations need agreement only within `delta + tau`.
pub fn check_pgt_feasible(
    trace: &Trace,
    setting: &Setting,
    params: &SystemParams,
    inacc: Option<&InaccuracyParams>,
) -> Verdict {
    let arith = setting.arithmetic();
    let exact = InaccuracyParams::exact();
    let inacc = inacc.unwrap_or(&exact);
    let loc_slack_sq = (&inacc.tau * &params.v).square();
    let tolerance = inacc.tolerance() + arith.epsilon();
    let mut out = Collector::default();
    for e in trace {
        if !setting.is_correct(e.actor()) {
            continue;
        }
        match e {
            Event::Bcast { actor, start, msg } => {
                let own = setting.loc(actor).expect("correct node is in the setting");
                match msg {
                    Message::BeaconTl { creator, time, loc, .. }
                        if creator == actor
                            && arith.le(&(time - start).abs(), &inacc.delta)
                            && own.dist_sq(loc) <= loc_slack_sq => {}
                    Message::BeaconTl { .. } => out.add(
                        rules::PGT_BEACON,
                        vec![e.clone()],
                        format!("{actor} may only send its own beacon stamped {start} at {own}"),
                    ),
                    _ => out.add(rules::PGT_BEACON, vec![e.clone()], format!("{msg} is not a time-location beacon")),
                }
            }
            Event::Neighbor { actor, start: t0, neighbor, declared_time: t1 } => {
                let here = setting.loc(actor).expect("correct node is in the setting");
                let justified = trace.by_actor(actor).any(|r| match r {
                    Event::Receive { start, msg: Message::BeaconTl { creator, time, loc, .. }, .. } => {
                        creator == neighbor
                            && arith.same(start, t1)
                            && estimates_agree(&(start - time), &here.dist_sq(loc), &params.v, &tolerance)
                            && t0 > &r.end()
                    }
                    _ => false,
                });
                if !justified {
                    out.add(
                        rules::PGT_NEIGHBOR,
                        vec![e.clone()],
                        format!("no consistent beacon of {neighbor} received at {t1} and completed before {t0}"),
                    );
                }
            }
            _ => {}
        }
    }
    out.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::node::NodeId;
    use crate::view::LocalEvent;

    fn s(x: i64) -> Scalar {
        Scalar::from_int(x)
    }

    fn params() -> SystemParams {
        SystemParams::new(s(1), s(1), s(10), s(1), s(1)).unwrap()
    }

    fn view_with(t1: Scalar, beacon_time: Scalar, l: Point) -> LocalView {
        let msg = Message::beacon_tl(NodeId::from("B"), beacon_time, l, s(1));
        LocalView {
            flavor: Flavor::TL,
            owner: "A".into(),
            as_of: Cutoff::At(s(100)),
            owner_loc: Some(Point::origin()),
            local_trace: BTreeSet::from([LocalEvent::Receive { start: t1, msg }]),
        }
    }

    fn offers_neighbor(acts: &BTreeSet<Action>) -> bool {
        acts.iter().any(|a| matches!(a, Action::Neighbor { .. }))
    }

    #[test]
    fn pythagorean_estimates_match() {
        assert!(offers_neighbor(&pgt_decide(&view_with(s(5), s(0), Point::from_ints(3, 4)), &params())));
    }

    #[test]
    fn relay_delay_breaks_equality() {
        assert!(!offers_neighbor(&pgt_decide(&view_with(s(6), s(0), Point::from_ints(3, 4)), &params())));
    }

    #[test]
    fn zero_distance_self_consistent() {
        assert!(offers_neighbor(&pgt_decide(&view_with(s(3), s(3), Point::origin()), &params())));
    }

    #[test]
    fn approximate_boundary_inclusive() {
        let inacc = InaccuracyParams::new(Scalar::ratio(1, 2), Scalar::ratio(1, 4)).unwrap();
        let at = view_with(s(5) + Scalar::ratio(3, 4), s(0), Point::from_ints(3, 4));
        assert!(offers_neighbor(&pgt_approx_decide(&at, &params(), &inacc)));
        let past = view_with(s(5) + Scalar::ratio(3, 4) + Scalar::ratio(1, 1000), s(0), Point::from_ints(3, 4));
        assert!(!offers_neighbor(&pgt_approx_decide(&past, &params(), &inacc)));
    }
}
