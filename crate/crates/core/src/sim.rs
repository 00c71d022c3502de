//! Seeded random scenarios: rational placements, random link schedules,
//! honest beacons, adversaries that relay and author beacons, and neighbor
//! declarations made whenever the protocol would allow them.
//!
//! With `inject_faults` some relays are too fast, some broadcasts and
//! forgeries slip in and some declarations are unjustified, so that the
//! checkers have infeasible traces to reject.

use std::collections::BTreeMap;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::adversary::{check_adversary_feasible, AdversaryKind, AdversaryModel, CorpusEntry};
use crate::attack::{beacon_for, plan_attack, AttackRequest, Variant};
use crate::event::{Event, Trace};
use crate::feasibility::{check_setting_feasible, induced_receptions};
use crate::geometry::{Angle, Point};
use crate::message::Message;
use crate::node::{NodeId, NodeKind};
use crate::params::SystemParams;
use crate::protocol::{estimates_agree, ProtocolSpec};
use crate::scalar::Scalar;
use crate::setting::{Interval, LinkSchedule, Setting};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaPolicy {
    /// Δ_relay ≥ R/v.
    AtLeastRangeTime,
    /// Δ_relay > 0, anywhere up to 2R/v.
    Positive,
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    /// Beacon format and acceptance rule; `Pt` or `Pgt`.
    pub protocol: ProtocolSpec,
    pub delta_policy: DeltaPolicy,
    /// Force v_adv = v.
    pub equal_speeds: bool,
    pub inject_faults: bool,
}

#[derive(Debug, Clone)]
pub struct SimCase {
    pub setting: Setting,
    pub params: SystemParams,
    pub trace: Trace,
}

fn rat<R: Rng>(rng: &mut R, lo: i64, hi: i64, den: i64) -> Scalar {
    Scalar::ratio(rng.random_range(lo..=hi), den)
}

/// 2 to 5 distinct points with rational pairwise distances.
fn placement<R: Rng>(rng: &mut R, n: usize) -> Vec<Point> {
    let scale = rat(rng, 1, 8, 2);
    let offset = Point::new(rat(rng, -20, 20, 4), rat(rng, -20, 20, 4));
    let mut xs: Vec<i64> = (0..=24).collect();
    let base: Vec<Point> = match rng.random_range(0..3) {
        0 => {
            xs.shuffle(rng);
            xs[..n].iter().map(|&x| Point::from_ints(x, 0)).collect()
        }
        1 => {
            xs.shuffle(rng);
            xs[..n]
                .iter()
                .map(|&t| Point::new(Scalar::ratio(3 * t, 5), Scalar::ratio(4 * t, 5)))
                .collect()
        }
        _ => {
            let mut corners = vec![
                Point::from_ints(0, 0),
                Point::from_ints(3, 0),
                Point::from_ints(0, 4),
                Point::from_ints(3, 4),
                Point::new(Scalar::ratio(3, 2), Scalar::from_int(2)),
            ];
            corners.shuffle(rng);
            corners.truncate(n);
            corners
        }
    };
    base.into_iter()
        .map(|p| Point::new(&p.x * &scale + offset.x.clone(), &p.y * &scale + offset.y.clone()))
        .collect()
}

fn schedule<R: Rng>(rng: &mut R, horizon: i64) -> LinkSchedule {
    match rng.random_range(0..10) {
        0..=3 => LinkSchedule::always(),
        4..=5 => LinkSchedule::never(),
        _ => {
            let k = rng.random_range(1..=3);
            let mut cuts: Vec<i64> = (0..2 * k).map(|_| rng.random_range(0..=2 * horizon)).collect();
            cuts.sort();
            cuts.dedup();
            let intervals = cuts
                .chunks(2)
                .filter(|c| c.len() == 2)
                .map(|c| Interval::new(Scalar::ratio(c[0], 2), Some(Scalar::ratio(c[1], 2))))
                .collect();
            LinkSchedule::from_intervals(intervals).unwrap_or_else(|_| LinkSchedule::always())
        }
    }
}

fn sector<R: Rng>(rng: &mut R) -> (Angle, Angle) {
    let beta = [Scalar::from_int(2), Scalar::one(), Scalar::ratio(1, 2)].choose(rng).expect("non-empty").clone();
    (Angle(Scalar::ratio(rng.random_range(0..8), 4)), Angle(beta))
}

struct Pending {
    send: Event,
    hops: u8,
}

const MAX_HOPS: u8 = 3;
const MAX_SENDS: usize = 60;

/// Generate one random case. Traces are built to be setting-feasible;
/// protocol and adversary feasibility hold unless faults are injected.
pub fn random_case<R: Rng>(rng: &mut R, cfg: &SimConfig) -> SimCase {
    let horizon = 30;
    let n = rng.random_range(2..=5);
    let adversaries = rng.random_range(0..=n - 2);
    let points = placement(rng, n);

    let v = rat(rng, 1, 4, 2);
    let ratio = if cfg.equal_speeds { Scalar::one() } else { Scalar::from_int(*[1, 2, 5].choose(rng).expect("non-empty")) };
    let nd_range = rat(rng, 2, 40, 2);
    let range_time = &nd_range / &v;
    let delta_relay = match cfg.delta_policy {
        DeltaPolicy::AtLeastRangeTime => {
            if rng.random_bool(0.3) {
                range_time.clone()
            } else {
                &range_time * &(Scalar::one() + rat(rng, 1, 8, 8))
            }
        }
        DeltaPolicy::Positive => &range_time * &rat(rng, 1, 16, 8),
    };
    let params = SystemParams::new(
        v.clone(),
        &v * &ratio,
        nd_range,
        delta_relay,
        Scalar::ratio(rng.random_range(1..=4), 2),
    )
    .expect("generated parameters are valid");

    let ids: Vec<NodeId> = (0..n).map(|i| NodeId::from(format!("N{i}"))).collect();
    let mut builder = Setting::builder();
    for (i, (id, p)) in ids.iter().zip(&points).enumerate() {
        let kind = if i >= n - adversaries { NodeKind::Adversarial } else { NodeKind::Correct };
        builder = builder.node(id.clone(), p.clone(), kind);
    }
    for a in &ids {
        for b in &ids {
            if a != b {
                builder = builder.link(a.clone(), b.clone(), schedule(rng, horizon));
            }
        }
    }
    let setting = builder.build().expect("generated setting is valid");
    let correct: Vec<NodeId> = setting.correct_nodes().into_iter().collect();
    let adv: Vec<NodeId> = setting.adversarial_nodes().into_iter().collect();

    let mut queue: BTreeMap<(Scalar, usize), Pending> = BTreeMap::new();
    let mut seq = 0usize;
    let mut push = |queue: &mut BTreeMap<(Scalar, usize), Pending>, send: Event, hops: u8| {
        queue.insert((send.start().clone(), seq), Pending { send, hops });
        seq += 1;
    };

    for id in &correct {
        for _ in 0..rng.random_range(1..=2) {
            let t = rat(rng, 0, horizon, 2);
            let loc = setting.loc(id).expect("known").clone();
            let mut msg = beacon_for(&cfg.protocol, id, t.clone(), loc, &params);
            if cfg.inject_faults && rng.random_bool(0.03) {
                msg = beacon_for(&cfg.protocol, id, &t + &Scalar::one(), Point::origin(), &params);
            }
            push(&mut queue, Event::bcast(id.clone(), t, msg), 0);
        }
    }
    for id in &adv {
        for _ in 0..rng.random_range(0..=2) {
            let creator = if cfg.inject_faults && rng.random_bool(0.05) {
                correct.choose(rng).expect("at least two correct nodes").clone()
            } else {
                adv.choose(rng).expect("non-empty").clone()
            };
            let t = rat(rng, 0, horizon, 2);
            // Authored beacons may be stamped in the future.
            let stamp = &t + &rat(rng, -4, 8, 2);
            let stamp = stamp.max(Scalar::zero());
            let msg = beacon_for(&cfg.protocol, &creator, stamp, Point::new(rat(rng, -10, 10, 1), rat(rng, -10, 10, 1)), &params);
            let (alpha, beta) = sector(rng);
            push(&mut queue, Event::dcast(id.clone(), t, alpha, beta, msg), 1);
        }
    }

    let mut trace = Trace::new();
    let mut sends = 0;
    while let Some((_, Pending { send, hops })) = queue.pop_first() {
        sends += 1;
        if sends > MAX_SENDS {
            break;
        }
        let receptions = induced_receptions(&setting, &params, &send);
        trace.insert(send.clone());
        for r in receptions {
            trace.insert(r.clone());
            let Event::Receive { actor, start, sender, msg } = &r else { continue };
            if !setting.is_adversarial(actor) || sender == actor || hops >= MAX_HOPS || !rng.random_bool(0.6) {
                continue;
            }
            let relay = if rng.random_bool(0.5) { actor.clone() } else { adv.choose(rng).expect("non-empty").clone() };
            let channel = if &relay == actor {
                Scalar::zero()
            } else {
                setting.dist(actor, &relay).expect("known") / params.v_adv.clone()
            };
            let extra = match rng.random_range(0..10) {
                0..=5 => Scalar::zero(),
                6..=8 => rat(rng, 1, 8, 4),
                _ if cfg.inject_faults => -rat(rng, 1, 8, 4),
                _ => Scalar::zero(),
            };
            let at = start + &(&params.delta_relay + &channel) + extra;
            if at.is_negative() {
                continue;
            }
            let event = if cfg.inject_faults && rng.random_bool(0.05) {
                Event::bcast(relay, at, msg.clone())
            } else {
                let (alpha, beta) = sector(rng);
                Event::dcast(relay, at, alpha, beta, msg.clone())
            };
            push(&mut queue, event, hops + 1);
        }
    }

    let mut declarations = Vec::new();
    for e in &trace {
        let Event::Receive { actor, start, msg, .. } = e else { continue };
        if !setting.is_correct(actor) {
            continue;
        }
        let Some(creator) = msg.creator() else { continue };
        if creator == actor {
            continue;
        }
        let acceptable = accepts(&cfg.protocol, &setting, &params, actor, start, msg);
        let forced = cfg.inject_faults && rng.random_bool(0.03);
        if (acceptable && rng.random_bool(0.8)) || forced {
            let t0 = e.end() + rat(rng, 1, 4, 4);
            declarations.push(Event::neighbor(actor.clone(), t0, creator.clone(), start.clone()));
        }
    }
    trace.extend(declarations);
    SimCase { setting, params, trace }
}

fn accepts(protocol: &ProtocolSpec, setting: &Setting, params: &SystemParams, node: &NodeId, t1: &Scalar, msg: &Message) -> bool {
    match (protocol, msg) {
        (ProtocolSpec::Pt, Message::BeaconT { time, .. }) => t1 - time <= params.range_time(),
        (ProtocolSpec::Pgt, Message::BeaconTl { time, loc, .. }) => {
            let here = setting.loc(node).expect("known");
            estimates_agree(&(t1 - time), &here.dist_sq(loc), &params.v, &Scalar::zero())
        }
        (ProtocolSpec::PgtApprox(i), Message::BeaconTl { time, loc, .. }) => {
            let here = setting.loc(node).expect("known");
            estimates_agree(&(t1 - time), &here.dist_sq(loc), &params.v, &i.tolerance())
        }
        (ProtocolSpec::Naive, _) => true,
        _ => false,
    }
}

/// A fixed set of labelled traces over time beacons covering broadcast
/// relays, channel relays, local relays, authored beacons and random runs.
/// Every entry is setting-feasible.
pub fn golden_corpus<R: Rng>(rng: &mut R) -> Vec<CorpusEntry> {
    let mut out = Vec::new();
    let base = SystemParams::new(Scalar::one(), Scalar::from_int(2), Scalar::from_int(10), Scalar::one(), Scalar::one())
        .expect("valid");
    let plans = [
        ("single-relay-dcast", Variant::SingleRelay, AdversaryKind::Relay),
        ("single-relay-bcast", Variant::SingleRelay, AdversaryKind::RelayBcast),
        ("wormhole-dcast", Variant::Wormhole, AdversaryKind::Relay),
        ("wormhole-bcast", Variant::Wormhole, AdversaryKind::RelayBcast),
    ];
    for (name, variant, adversary) in plans {
        let req = AttackRequest {
            variant,
            d_ab: Scalar::from_int(10),
            placement: None,
            target: None,
            protocol: ProtocolSpec::Pt,
            adversary,
        };
        let plan = plan_attack(&req, &base).expect("canonical layout exists");
        out.push(CorpusEntry { name: name.into(), setting: plan.attack, params: base.clone(), trace: plan.relay_trace });
    }
    out.push(self_authored_entry());

    let configs = [
        SimConfig { protocol: ProtocolSpec::Pt, delta_policy: DeltaPolicy::Positive, equal_speeds: false, inject_faults: false },
        SimConfig { protocol: ProtocolSpec::Pt, delta_policy: DeltaPolicy::Positive, equal_speeds: false, inject_faults: true },
    ];
    let mut i = 0;
    while out.len() < 40 {
        let cfg = &configs[i % 2];
        let case = random_case(rng, cfg);
        if check_setting_feasible(&case.trace, &case.setting, &case.params).ok {
            out.push(CorpusEntry {
                name: format!("random-{i:03}"),
                setting: case.setting,
                params: case.params,
                trace: case.trace,
            });
        }
        i += 1;
    }
    out
}

/// An adversarial node sending a beacon authored by another adversarial
/// node that nobody ever transmitted before: admitted by the Dolev-Yao
/// models only.
pub fn self_authored_entry() -> CorpusEntry {
    let params = SystemParams::new(Scalar::one(), Scalar::one(), Scalar::from_int(10), Scalar::one(), Scalar::one())
        .expect("valid");
    let setting = Setting::builder()
        .node("A", Point::origin(), NodeKind::Correct)
        .node("B", Point::from_ints(6, 0), NodeKind::Correct)
        .node("C", Point::from_ints(3, 0), NodeKind::Adversarial)
        .node("D", Point::from_ints(3, 4), NodeKind::Adversarial)
        .link_both("A", "C", LinkSchedule::always())
        .build()
        .expect("valid");
    let msg = Message::beacon_t("D".into(), Scalar::from_int(5), Scalar::one());
    let send = Event::dcast("C", Scalar::from_int(2), Angle::zero(), Angle::full_turn(), msg);
    let mut trace: Trace = induced_receptions(&setting, &params, &send).into_iter().collect();
    trace.insert(send);
    CorpusEntry { name: "self-authored".into(), setting, params, trace }
}

/// Every relayed beacon a correct node receives, with (time estimate −
/// location estimate − Δ_relay) known to be non-negative or not.
pub fn relay_estimate_gaps(case: &SimCase) -> Vec<(Event, bool)> {
    let mut out = Vec::new();
    for e in &case.trace {
        let Event::Receive { actor, start, sender, msg: Message::BeaconTl { creator, time, loc, .. } } = e else {
            continue;
        };
        if !case.setting.is_correct(actor) || !case.setting.is_adversarial(sender) || !case.setting.is_correct(creator) {
            continue;
        }
        let here = case.setting.loc(actor).expect("known");
        let slack = start - time - case.params.delta_relay.clone();
        let ok = !slack.is_negative() && (&slack * &case.params.v).square() >= here.dist_sq(loc);
        out.push((e.clone(), ok));
    }
    out
}

/// Whether the case passes setting, protocol and adversary feasibility.
pub fn fully_feasible(case: &SimCase, protocol: &ProtocolSpec, adversary: AdversaryKind) -> bool {
    if !check_setting_feasible(&case.trace, &case.setting, &case.params).ok {
        return false;
    }
    if !protocol.check(&case.trace, &case.setting, &case.params).ok {
        return false;
    }
    let model = AdversaryModel::new(adversary, case.params.delta_relay.clone());
    check_adversary_feasible(&case.trace, &case.setting, &case.params, &model).is_ok_and(|v| v.ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_traces_are_setting_feasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cfg = SimConfig { protocol: ProtocolSpec::Pt, delta_policy: DeltaPolicy::Positive, equal_speeds: false, inject_faults: false };
        for _ in 0..50 {
            let case = random_case(&mut rng, &cfg);
            let v = check_setting_feasible(&case.trace, &case.setting, &case.params);
            assert!(v.ok, "{v}");
        }
    }

    #[test]
    fn faults_produce_some_rejections() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cfg = SimConfig { protocol: ProtocolSpec::Pt, delta_policy: DeltaPolicy::Positive, equal_speeds: false, inject_faults: true };
        let rejected = (0..200)
            .filter(|_| !fully_feasible(&random_case(&mut rng, &cfg), &ProtocolSpec::Pt, AdversaryKind::DyT))
            .count();
        assert!(rejected > 0);
    }

    #[test]
    fn same_seed_same_case() {
        let cfg = SimConfig { protocol: ProtocolSpec::Pgt, delta_policy: DeltaPolicy::Positive, equal_speeds: true, inject_faults: true };
        let a = random_case(&mut ChaCha8Rng::seed_from_u64(3), &cfg);
        let b = random_case(&mut ChaCha8Rng::seed_from_u64(3), &cfg);
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.setting, b.setting);
    }

    #[test]
    fn corpus_is_large_enough() {
        let corpus = golden_corpus(&mut ChaCha8Rng::seed_from_u64(2024));
        assert!(corpus.len() >= 30);
    }

    #[test]
    fn placements_have_rational_distances() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let pts = placement(&mut rng, 5);
            for p in &pts {
                for q in &pts {
                    assert!(p.dist_sq(q).sqrt_exact().is_some());
                }
            }
        }
    }
}
