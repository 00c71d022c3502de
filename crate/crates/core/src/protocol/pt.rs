//! Temporal packet leash: timestamped authenticated beacons accepted while
//! fresh within R/v.

use std::collections::BTreeSet;

use super::{Action, ProtocolModel};
use crate::event::{Event, Trace};
use crate::message::Message;
use crate::params::SystemParams;
use crate::setting::Setting;
use crate::verdict::{rules, Collector, Verdict};
use crate::view::{Cutoff, Flavor, LocalView};

pub fn pt_decide(view: &LocalView, params: &SystemParams) -> BTreeSet<Action> {
    let mut out = BTreeSet::from([Action::Epsilon]);
    if let Cutoff::At(now) = &view.as_of {
        out.insert(Action::Bcast(Message::beacon_t(
            view.owner.clone(),
            now.clone(),
            params.msg_duration_default.clone(),
        )));
    }
    let window = params.range_time();
    for (t1, msg) in view.receptions() {
        if let Message::BeaconT { creator, time, .. } = msg {
            if t1 - time <= window {
                out.insert(Action::Neighbor { node: creator.clone(), declared_time: t1.clone() });
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct PtProtocol {
    params: SystemParams,
}

impl PtProtocol {
    pub fn new(params: SystemParams) -> Self {
        PtProtocol { params }
    }
}

impl ProtocolModel for PtProtocol {
    fn name(&self) -> &str {
        "pt"
    }

    fn flavor(&self) -> Flavor {
        Flavor::T
    }

    fn decide(&self, view: &LocalView) -> BTreeSet<Action> {
        pt_decide(view, &self.params)
    }
}

/// Trace-level conditions: correct nodes only broadcast their own beacon
/// stamped with the send time, and only declare neighbors justified by a
/// fresh beacon whose reception has ended.
pub fn check_pt_feasible(trace: &Trace, setting: &Setting, params: &SystemParams) -> Verdict {
    let arith = setting.arithmetic();
    let window = params.range_time();
    let mut out = Collector::default();
    for e in trace {
        if !setting.is_correct(e.actor()) {
            continue;
        }
        match e {
            Event::Bcast { actor, start, msg } => match msg {
                Message::BeaconT { creator, time, .. } if creator == actor && arith.same(time, start) => {}
                Message::BeaconT { .. } => out.add(
                    rules::PT_BEACON,
                    vec![e.clone()],
                    format!("{actor} may only send its own beacon stamped {start}"),
                ),
                _ => out.add(rules::PT_BEACON, vec![e.clone()], format!("{msg} is not a time beacon")),
            },
            Event::Neighbor { actor, start: t0, neighbor, declared_time: t1 } => {
                let justified = trace.by_actor(actor).any(|r| match r {
                    Event::Receive { start, msg: Message::BeaconT { creator, time, .. }, .. } => {
                        creator == neighbor
                            && arith.same(start, t1)
                            && arith.le(&(start - time), &window)
                            && t0 > &r.end()
                    }
                    _ => false,
                });
                if !justified {
                    out.add(
                        rules::PT_NEIGHBOR,
                        vec![e.clone()],
                        format!("no fresh beacon of {neighbor} received at {t1} and completed before {t0}"),
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
    use crate::node::NodeKind;
    use crate::scalar::Scalar;
    use crate::setting::LinkSchedule;
    use crate::view::project_local;

    fn s(x: i64) -> Scalar {
        Scalar::from_int(x)
    }

    fn params() -> SystemParams {
        SystemParams::new(s(1), s(1), s(10), s(0), s(1)).unwrap()
    }

    fn beacon(t: i64) -> Message {
        Message::beacon_t("B".into(), s(t), s(1))
    }

    fn setting() -> Setting {
        Setting::builder()
            .node("A", Point::origin(), NodeKind::Correct)
            .node("B", Point::from_ints(8, 0), NodeKind::Correct)
            .link_both("A", "B", LinkSchedule::always())
            .build()
            .unwrap()
    }

    fn decide_at(t: &Trace, cut: i64) -> BTreeSet<Action> {
        let v = project_local(t, &"A".into(), Cutoff::At(s(cut)), Flavor::T, None).unwrap();
        pt_decide(&v, &params())
    }

    #[test]
    fn fresh_beacon_offers_neighbor() {
        let t: Trace = [Event::receive("A", s(8), "B", beacon(0))].into_iter().collect();
        let acts = decide_at(&t, 10);
        assert!(acts.contains(&Action::Neighbor { node: "B".into(), declared_time: s(8) }));
        assert!(acts.contains(&Action::Epsilon));
    }

    #[test]
    fn stale_beacon_is_ignored() {
        let t: Trace = [Event::receive("A", s(12), "B", beacon(0))].into_iter().collect();
        assert!(!decide_at(&t, 20).iter().any(|a| matches!(a, Action::Neighbor { .. })));
    }

    #[test]
    fn freshness_boundary_is_inclusive() {
        let t: Trace = [Event::receive("A", s(10), "B", beacon(0))].into_iter().collect();
        assert!(decide_at(&t, 20).contains(&Action::Neighbor { node: "B".into(), declared_time: s(10) }));
    }

    #[test]
    fn forged_creator_rejected() {
        let t: Trace = [
            Event::bcast("A", s(1), beacon(5)),
            Event::receive("A", s(1), "A", beacon(5)),
        ]
        .into_iter()
        .collect();
        assert!(check_pt_feasible(&t, &setting(), &params()).has_rule(rules::PT_BEACON));
    }

    #[test]
    fn wrong_stamp_rejected() {
        let m = Message::beacon_t("A".into(), s(2), s(1));
        let t: Trace = [Event::bcast("A", s(1), m)].into_iter().collect();
        assert!(check_pt_feasible(&t, &setting(), &params()).has_rule(rules::PT_BEACON));
    }

    #[test]
    fn declaration_must_follow_reception_end() {
        let base = vec![
            Event::bcast("B", s(0), beacon(0)),
            Event::receive("B", s(0), "B", beacon(0)),
            Event::receive("A", s(8), "B", beacon(0)),
        ];
        let at_end: Trace = base.iter().cloned().chain([Event::neighbor("A", s(9), "B", s(8))]).collect();
        assert!(check_pt_feasible(&at_end, &setting(), &params()).has_rule(rules::PT_NEIGHBOR));
        let after: Trace = base.into_iter().chain([Event::neighbor("A", s(10), "B", s(8))]).collect();
        assert!(check_pt_feasible(&after, &setting(), &params()).ok);
    }
}
