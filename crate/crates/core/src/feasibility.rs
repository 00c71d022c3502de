//! Physical consistency of a trace with a setting: every reception has
//! exactly one matching transmission, and every transmission is received
//! wherever its link is up for the whole reception window.

use std::collections::BTreeMap;

use crate::event::{Event, Trace};
use crate::geometry::Angle;
use crate::message::Message;
use crate::node::NodeId;
use crate::params::SystemParams;
use crate::scalar::Scalar;
use crate::setting::{Arithmetic, Setting};
use crate::verdict::{rules, Collector, Verdict};

type SendKey<'a> = (&'a NodeId, &'a Message);

/// Lookup tables over a trace's transmissions and receptions.
type SendEntry<'a> = (&'a Scalar, Option<(&'a Angle, &'a Angle)>, &'a Event);

pub(crate) struct TraceIndex<'a> {
    /// (sender, msg) -> sorted (start, sector, event); `None` sector for Bcast.
    sends: BTreeMap<SendKey<'a>, Vec<SendEntry<'a>>>,
    /// (receiver, sender, msg) -> sorted starts
    receives: BTreeMap<(&'a NodeId, &'a NodeId, &'a Message), Vec<&'a Scalar>>,
}

impl<'a> TraceIndex<'a> {
    pub fn new(trace: &'a Trace) -> Self {
        let mut sends: BTreeMap<_, Vec<_>> = BTreeMap::new();
        let mut receives: BTreeMap<_, Vec<_>> = BTreeMap::new();
        for e in trace {
            match e {
                Event::Bcast { actor, start, msg } => {
                    sends.entry((actor, msg)).or_default().push((start, None, e))
                }
                Event::Dcast { actor, start, alpha, beta, msg } => {
                    sends.entry((actor, msg)).or_default().push((start, Some((alpha, beta)), e))
                }
                Event::Receive { actor, start, sender, msg } => {
                    receives.entry((actor, sender, msg)).or_default().push(start)
                }
                Event::Neighbor { .. } => {}
            }
        }
        for v in sends.values_mut() {
            v.sort_by(|a, b| a.0.cmp(b.0));
        }
        for v in receives.values_mut() {
            v.sort();
        }
        TraceIndex { sends, receives }
    }

    /// Transmissions by `sender` of `msg` starting at `t` (up to `arith` slack).
    pub fn sends_at(
        &self,
        sender: &'a NodeId,
        msg: &'a Message,
        t: &Scalar,
        arith: &Arithmetic,
    ) -> Vec<(Option<(&'a Angle, &'a Angle)>, &'a Event)> {
        let Some(list) = self.sends.get(&(sender, msg)) else {
            return Vec::new();
        };
        let eps = arith.epsilon();
        let lo = t - &eps;
        let hi = t + &eps;
        let first = list.partition_point(|(s, _, _)| *s < &lo);
        list[first..]
            .iter()
            .take_while(|(s, _, _)| *s <= &hi)
            .map(|(_, sector, e)| (*sector, *e))
            .collect()
    }

    pub fn has_receive(
        &self,
        receiver: &'a NodeId,
        sender: &'a NodeId,
        msg: &'a Message,
        t: &Scalar,
        arith: &Arithmetic,
    ) -> bool {
        let Some(list) = self.receives.get(&(receiver, sender, msg)) else {
            return false;
        };
        let eps = arith.epsilon();
        let lo = t - &eps;
        let first = list.partition_point(|s| *s < &lo);
        list.get(first).is_some_and(|s| arith.same(s, t))
    }
}

/// Check every condition of setting-feasibility and report all failures.
pub fn check_setting_feasible(trace: &Trace, setting: &Setting, params: &SystemParams) -> Verdict {
    let index = TraceIndex::new(trace);
    let arith = setting.arithmetic();
    let mut out = Collector::default();
    let all_nodes: Vec<&NodeId> = setting.nodes().collect();

    for e in trace {
        if let Err(why) = e.well_formed() {
            out.add(rules::EVENT_MALFORMED, vec![e.clone()], why);
            continue;
        }
        if !setting.contains(e.actor()) {
            out.add(rules::SETTING_UNKNOWN_NODE, vec![e.clone()], format!("actor `{}` not in setting", e.actor()));
            continue;
        }
        match e {
            Event::Receive { actor, start, sender, msg } => {
                if !setting.contains(sender) {
                    out.add(rules::SETTING_UNKNOWN_NODE, vec![e.clone()], format!("sender `{sender}` not in setting"));
                    continue;
                }
                let end = start + msg.duration();
                if !setting.link_up(sender, actor, start, &end) {
                    out.add(
                        rules::SETTING_RECEIVE_LINK,
                        vec![e.clone()],
                        format!("link {sender}->{actor} not up over [{start}, {end}]"),
                    );
                }
                let tof = setting.time_of_flight(params, actor, sender).expect("nodes checked");
                let sent_at = start - &tof;
                let mut bcast = Vec::new();
                let mut dcast = Vec::new();
                if arith.le(&Scalar::zero(), &sent_at) {
                    for (sector, send) in index.sends_at(sender, msg, &sent_at, arith) {
                        match sector {
                            None => bcast.push(send.clone()),
                            Some((alpha, beta)) => {
                                if setting.inrange(sender, alpha, beta, actor).unwrap_or(false) {
                                    dcast.push(send.clone());
                                }
                            }
                        }
                    }
                }
                match (bcast.is_empty(), dcast.is_empty()) {
                    (true, true) => out.add(
                        rules::SETTING_RECEIVE_UNMATCHED,
                        vec![e.clone()],
                        format!("no transmission of {msg} by {sender} at {sent_at} reaches {actor}"),
                    ),
                    (false, false) => {
                        let mut ev = vec![e.clone()];
                        ev.extend(bcast);
                        ev.extend(dcast);
                        out.add(
                            rules::SETTING_RECEIVE_AMBIGUOUS,
                            ev,
                            "reception matched by both a broadcast and a directional send".to_string(),
                        )
                    }
                    _ => {}
                }
            }
            Event::Bcast { actor, start, msg } => {
                for b in &all_nodes {
                    expect_reception(&mut out, &index, setting, params, e, actor, start, msg, b);
                }
            }
            Event::Dcast { actor, start, alpha, beta, msg } => {
                if !setting.is_adversarial(actor) {
                    out.add(
                        rules::SETTING_DCAST_ACTOR,
                        vec![e.clone()],
                        format!("correct node {actor} cannot use directional sends"),
                    );
                }
                for b in &all_nodes {
                    if setting.inrange(actor, alpha, beta, b).unwrap_or(false) {
                        expect_reception(&mut out, &index, setting, params, e, actor, start, msg, b);
                    }
                }
            }
            Event::Neighbor { neighbor, .. } => {
                if !setting.contains(neighbor) {
                    out.add(
                        rules::SETTING_UNKNOWN_NODE,
                        vec![e.clone()],
                        format!("declared neighbor `{neighbor}` not in setting"),
                    );
                }
            }
        }
    }
    out.finish()
}

/// The receptions a send must cause: one at every node it covers whose
/// link from the sender is up for the whole reception window, the sender
/// included. Returns nothing for Receive and Neighbor events.
pub fn induced_receptions(setting: &Setting, params: &SystemParams, send: &Event) -> Vec<Event> {
    let (sender, start, msg, sector) = match send {
        Event::Bcast { actor, start, msg } => (actor, start, msg, None),
        Event::Dcast { actor, start, alpha, beta, msg } => (actor, start, msg, Some((alpha, beta))),
        _ => return Vec::new(),
    };
    let mut out = Vec::new();
    for b in setting.nodes() {
        if let Some((alpha, beta)) = sector {
            if !setting.inrange(sender, alpha, beta, b).unwrap_or(false) {
                continue;
            }
        }
        let Ok(tof) = setting.time_of_flight(params, sender, b) else {
            continue;
        };
        let arrive = start + &tof;
        let end = &arrive + msg.duration();
        if setting.link_up(sender, b, &arrive, &end) {
            out.push(Event::receive(b.clone(), arrive, sender.clone(), msg.clone()));
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn expect_reception<'a>(
    out: &mut Collector,
    index: &TraceIndex<'a>,
    setting: &Setting,
    params: &SystemParams,
    send: &Event,
    sender: &'a NodeId,
    start: &Scalar,
    msg: &'a Message,
    receiver: &'a NodeId,
) {
    let tof = setting.time_of_flight(params, sender, receiver).expect("nodes checked");
    let arrive = start + &tof;
    let end = &arrive + msg.duration();
    if setting.link_up(sender, receiver, &arrive, &end)
        && !index.has_receive(receiver, sender, msg, &arrive, setting.arithmetic())
    {
        let rule = match send {
            Event::Dcast { .. } => rules::SETTING_DCAST_MISSING_RECEIVE,
            _ => rules::SETTING_BCAST_MISSING_RECEIVE,
        };
        out.add(
            rule,
            vec![send.clone()],
            format!("{receiver} should receive {msg} from {sender} at {arrive}"),
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::node::NodeKind;
    use crate::setting::LinkSchedule;

    fn s(x: i64) -> Scalar {
        Scalar::from_int(x)
    }

    fn params() -> SystemParams {
        SystemParams::new(s(1), s(1), s(10), s(1), s(1)).unwrap()
    }

    fn pair() -> Setting {
        Setting::builder()
            .node("A", Point::origin(), NodeKind::Correct)
            .node("B", Point::from_ints(8, 0), NodeKind::Correct)
            .link_both("A", "B", LinkSchedule::always())
            .build()
            .unwrap()
    }

    fn m() -> Message {
        Message::opaque("m", s(1))
    }

    #[test]
    fn bcast_with_all_receptions_is_feasible() {
        let t: Trace = [
            Event::bcast("A", s(0), m()),
            Event::receive("A", s(0), "A", m()),
            Event::receive("B", s(8), "A", m()),
        ]
        .into_iter()
        .collect();
        let v = check_setting_feasible(&t, &pair(), &params());
        assert!(v.ok, "{v}");
    }

    #[test]
    fn induced_receptions_complete_a_send() {
        let send = Event::bcast("A", s(0), m());
        let mut t: Trace = induced_receptions(&pair(), &params(), &send).into_iter().collect();
        assert_eq!(t.len(), 2);
        t.insert(send);
        assert!(check_setting_feasible(&t, &pair(), &params()).ok);
    }

    #[test]
    fn self_reception_is_demanded() {
        let t: Trace = [Event::bcast("A", s(0), m()), Event::receive("B", s(8), "A", m())]
            .into_iter()
            .collect();
        let v = check_setting_feasible(&t, &pair(), &params());
        assert_eq!(v.rules(), vec![rules::SETTING_BCAST_MISSING_RECEIVE]);
    }

    #[test]
    fn orphan_receive_violates_matching() {
        let t: Trace = [Event::receive("B", s(5), "A", m())].into_iter().collect();
        let v = check_setting_feasible(&t, &pair(), &params());
        assert!(v.has_rule(rules::SETTING_RECEIVE_UNMATCHED));
    }

    #[test]
    fn receive_over_down_link() {
        let st = Setting::builder()
            .node("A", Point::origin(), NodeKind::Correct)
            .node("B", Point::from_ints(8, 0), NodeKind::Correct)
            .build()
            .unwrap();
        let t: Trace = [
            Event::bcast("A", s(0), m()),
            Event::receive("A", s(0), "A", m()),
            Event::receive("B", s(8), "A", m()),
        ]
        .into_iter()
        .collect();
        let v = check_setting_feasible(&t, &st, &params());
        assert_eq!(v.rules(), vec![rules::SETTING_RECEIVE_LINK]);
    }

    #[test]
    fn unknown_actor_reported() {
        let t: Trace = [Event::bcast("Z", s(0), m())].into_iter().collect();
        let v = check_setting_feasible(&t, &pair(), &params());
        assert!(v.has_rule(rules::SETTING_UNKNOWN_NODE));
    }

    #[test]
    fn correct_node_cannot_dcast() {
        let t: Trace = [
            Event::dcast("A", s(0), Angle::zero(), Angle::full_turn(), m()),
            Event::receive("A", s(0), "A", m()),
            Event::receive("B", s(8), "A", m()),
        ]
        .into_iter()
        .collect();
        let v = check_setting_feasible(&t, &pair(), &params());
        assert_eq!(v.rules(), vec![rules::SETTING_DCAST_ACTOR]);
    }

    #[test]
    fn bcast_and_dcast_together_are_ambiguous() {
        let st = Setting::builder()
            .node("A", Point::origin(), NodeKind::Adversarial)
            .node("B", Point::from_ints(8, 0), NodeKind::Correct)
            .link_both("A", "B", LinkSchedule::always())
            .build()
            .unwrap();
        let t: Trace = [
            Event::bcast("A", s(0), m()),
            Event::dcast("A", s(0), Angle::zero(), Angle::full_turn(), m()),
            Event::receive("A", s(0), "A", m()),
            Event::receive("B", s(8), "A", m()),
        ]
        .into_iter()
        .collect();
        let v = check_setting_feasible(&t, &st, &params());
        assert!(v.has_rule(rules::SETTING_RECEIVE_AMBIGUOUS));
    }

    #[test]
    fn dcast_reaches_only_sector() {
        let st = Setting::builder()
            .node("A", Point::origin(), NodeKind::Correct)
            .node("C", Point::from_ints(4, 0), NodeKind::Adversarial)
            .node("B", Point::from_ints(8, 0), NodeKind::Correct)
            .link_both("A", "C", LinkSchedule::always())
            .link_both("C", "B", LinkSchedule::always())
            .build()
            .unwrap();
        // Half-plane centred on +x: reaches B and C itself, not A.
        let alpha = Angle(Scalar::ratio(3, 2));
        let t: Trace = [
            Event::dcast("C", s(0), alpha.clone(), Angle::half_turn(), m()),
            Event::receive("C", s(0), "C", m()),
            Event::receive("B", s(4), "C", m()),
        ]
        .into_iter()
        .collect();
        assert!(check_setting_feasible(&t, &st, &params()).ok);
        let mut bad = t.clone();
        bad.insert(Event::receive("A", s(4), "C", m()));
        assert!(check_setting_feasible(&bad, &st, &params()).has_rule(rules::SETTING_RECEIVE_UNMATCHED));
    }

    #[test]
    fn partial_window_does_not_require_reception() {
        let st = Setting::builder()
            .node("A", Point::origin(), NodeKind::Correct)
            .node("B", Point::from_ints(8, 0), NodeKind::Correct)
            .link(
                "A",
                "B",
                LinkSchedule::from_intervals(vec![crate::setting::Interval::new(s(0), Some(s(9)))]).unwrap(),
            )
            .build()
            .unwrap();
        // Arrival at 8, window [8, 9] but link is down at 9.
        let t: Trace = [Event::bcast("A", s(0), m()), Event::receive("A", s(0), "A", m())]
            .into_iter()
            .collect();
        assert!(check_setting_feasible(&t, &st, &params()).ok);
    }
}
