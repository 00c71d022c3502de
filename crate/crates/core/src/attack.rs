//! Relay attack construction.
//!
//! Two correct nodes A and B are placed at distance `d_ab` in a reference
//! setting where they are neighbors. In the attack setting their direct link
//! is down and adversarial relays forward every transmission so that each
//! reception happens at exactly the same time as in the reference run. A
//! time-only node cannot tell the runs apart and declares a neighbor that is
//! not there.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adversary::{check_adversary_feasible, rename_dcast_to_bcast, AdversaryKind, AdversaryModel};
use crate::event::{Event, Trace};
use crate::feasibility::{check_setting_feasible, induced_receptions};
use crate::geometry::{in_sector, Angle, Point, Vector};
use crate::message::Message;
use crate::node::{NodeId, NodeKind};
use crate::params::SystemParams;
use crate::protocol::ProtocolSpec;
use crate::scalar::Scalar;
use crate::setting::{LinkSchedule, ModelError, Setting};
use crate::verdict::{rules, Collector, Verdict};
use crate::view::{local_trace, Cutoff};

pub const NODE_A: &str = "A";
pub const NODE_B: &str = "B";
pub const NODE_C: &str = "C";
pub const NODE_D: &str = "D";

/// Time between the end of the justifying reception and a declaration.
pub fn declaration_offset() -> Scalar {
    Scalar::one()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// One adversarial node C between A and B.
    SingleRelay,
    /// C near A and D near B, joined by the adversary channel.
    Wormhole,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::SingleRelay => "single-relay",
            Variant::Wormhole => "wormhole",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "single-relay" | "single" => Ok(Variant::SingleRelay),
            "wormhole" => Ok(Variant::Wormhole),
            other => Err(format!("unknown variant `{other}` (expected single-relay or wormhole)")),
        }
    }
}

/// Locations in the attack setting; A sits at the origin.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placement {
    pub b: Point,
    pub c: Point,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Point>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AttackError {
    #[error("placement infeasible: {0}")]
    PlacementInfeasible(String),
    #[error("no neighbor witness: {0}")]
    NoWitness(String),
    #[error("distance {d} outside (0, {range}]")]
    OutOfRange { d: Box<Scalar>, range: Box<Scalar> },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// `lhs <= rhs`, with `margin = rhs - lhs`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Inequality {
    pub name: String,
    pub lhs: Scalar,
    pub rhs: Scalar,
    pub margin: Scalar,
    pub holds: bool,
}

impl Inequality {
    fn new(name: &str, lhs: Scalar, rhs: Scalar) -> Self {
        let margin = &rhs - &lhs;
        Inequality { name: name.to_owned(), holds: !margin.is_negative(), lhs, rhs, margin }
    }

    fn strict(name: &str, lhs: Scalar, rhs: Scalar) -> Self {
        let mut i = Inequality::new(name, lhs, rhs);
        i.holds = i.margin.is_positive();
        i
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.holds { "holds" } else { "FAILS" };
        write!(f, "{}: {} vs {} (margin {}) {verdict}", self.name, self.lhs, self.rhs, self.margin)
    }
}

/// Relay timing relative to each original send. `d1`/`d2` are the
/// reception and re-send offsets for A's messages, `d3`/`d4` for B's.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Deltas {
    /// Reference flight time dist(A, B) / v.
    pub flight: Scalar,
    pub d1: Scalar,
    pub d2: Scalar,
    pub d3: Scalar,
    pub d4: Scalar,
    /// Adversary-channel delay between the two relays (0 for one relay).
    pub channel: Scalar,
}

impl Deltas {
    /// Processing time available to the relay, after the channel delay.
    pub fn slack(&self) -> Scalar {
        &self.d2 - &self.d1 - &self.channel
    }
}

fn s_int(x: i64) -> Scalar {
    Scalar::from_int(x)
}

/// A placement on the A-B axis that meets the layout constraints when one
/// exists. `target` is dist(A, B) in the attack setting; by default the
/// largest value a single relay allows, `d_ab - v * delta_relay`.
pub fn canonical_placement(
    variant: Variant,
    d_ab: &Scalar,
    target: Option<&Scalar>,
    params: &SystemParams,
) -> Result<Placement, AttackError> {
    let reach = d_ab - &(&params.v * &params.delta_relay);
    let target = target.cloned().unwrap_or_else(|| reach.clone());
    if !target.is_positive() {
        return Err(AttackError::PlacementInfeasible(format!(
            "A-B distance {target} in the attack setting must be positive (d_ab - v*delta_relay = {reach})"
        )));
    }
    let b = Point::new(target.clone(), Scalar::zero());
    match variant {
        Variant::SingleRelay => {
            if target > reach {
                return Err(AttackError::PlacementInfeasible(format!(
                    "A-B distance {target} exceeds d_ab - v*delta_relay = {reach}"
                )));
            }
            Ok(Placement { b, c: Point::new(&target / &s_int(2), Scalar::zero()), d: None })
        }
        Variant::Wormhole => {
            let ratio = &params.v / &params.v_adv;
            let slack = &reach - &(&ratio * &target);
            let quarter = &target / &s_int(4);
            let gap = if ratio == Scalar::one() {
                if slack.is_negative() {
                    return Err(AttackError::PlacementInfeasible(format!(
                        "A-B distance {target} exceeds (v_adv/v)(d_ab - v*delta_relay)"
                    )));
                }
                quarter
            } else {
                if !slack.is_positive() {
                    return Err(AttackError::PlacementInfeasible(format!(
                        "A-B distance {target} leaves no room for relays off the endpoints (slack {slack})"
                    )));
                }
                quarter.min(&slack / &(s_int(4) * (Scalar::one() - ratio)))
            };
            Ok(Placement {
                c: Point::new(gap.clone(), Scalar::zero()),
                d: Some(Point::new(&target - &gap, Scalar::zero())),
                b,
            })
        }
    }
}

fn dist(p: &Point, q: &Point, what: (&str, &str)) -> Result<Scalar, AttackError> {
    p.dist_sq(q).sqrt_exact().ok_or_else(|| {
        AttackError::Model(ModelError::IrrationalDistance {
            a: what.0.into(),
            b: what.1.into(),
            squared: p.dist_sq(q),
        })
    })
}

/// The layout constraints for a placement, in checking order.
pub fn layout_inequalities(
    variant: Variant,
    d_ab: &Scalar,
    placement: &Placement,
    params: &SystemParams,
) -> Result<Vec<Inequality>, AttackError> {
    let a = Point::origin();
    let vd = &params.v * &params.delta_relay;
    let mut out = vec![
        Inequality::strict("0 < d_ab", Scalar::zero(), d_ab.clone()),
        Inequality::new("d_ab <= R", d_ab.clone(), params.nd_range.clone()),
    ];
    match variant {
        Variant::SingleRelay => {
            let ac = dist(&a, &placement.c, (NODE_A, NODE_C))?;
            let cb = dist(&placement.c, &placement.b, (NODE_C, NODE_B))?;
            out.push(Inequality::new("dist(A,C) + dist(C,B) + v*delta_relay <= d_ab", ac + cb + vd, d_ab.clone()));
        }
        Variant::Wormhole => {
            let d = placement
                .d
                .as_ref()
                .ok_or_else(|| AttackError::PlacementInfeasible("wormhole needs a location for D".into()))?;
            let ac = dist(&a, &placement.c, (NODE_A, NODE_C))?;
            let db = dist(d, &placement.b, (NODE_D, NODE_B))?;
            let cd = dist(&placement.c, d, (NODE_C, NODE_D))?;
            let lhs = ac + db + &params.v / &params.v_adv * cd + vd;
            out.push(Inequality::new(
                "dist(A,C) + dist(D,B) + (v/v_adv)*dist(C,D) + v*delta_relay <= d_ab",
                lhs,
                d_ab.clone(),
            ));
        }
    }
    Ok(out)
}

fn two_node_setting(d: &Scalar) -> Result<Setting, ModelError> {
    Setting::builder()
        .node(NODE_A, Point::origin(), NodeKind::Correct)
        .node(NODE_B, Point::new(d.clone(), Scalar::zero()), NodeKind::Correct)
        .link_both(NODE_A, NODE_B, LinkSchedule::always())
        .build()
}

/// Reference setting (A and B neighbors at `d_ab`) and attack setting.
pub fn build_attack_settings(
    d_ab: &Scalar,
    variant: Variant,
    placement: &Placement,
    params: &SystemParams,
) -> Result<(Setting, Setting), AttackError> {
    if let Some(bad) = layout_inequalities(variant, d_ab, placement, params)?.into_iter().find(|i| !i.holds) {
        return Err(AttackError::PlacementInfeasible(bad.to_string()));
    }
    let reference = two_node_setting(d_ab)?;
    let always = LinkSchedule::always();
    let builder = Setting::builder()
        .node(NODE_A, Point::origin(), NodeKind::Correct)
        .node(NODE_B, placement.b.clone(), NodeKind::Correct)
        .node(NODE_C, placement.c.clone(), NodeKind::Adversarial)
        .link_both(NODE_A, NODE_C, always.clone());
    let attack = match variant {
        Variant::SingleRelay => builder.link_both(NODE_C, NODE_B, always).build()?,
        Variant::Wormhole => builder
            .node(NODE_D, placement.d.clone().expect("checked above"), NodeKind::Adversarial)
            .link_both(NODE_D, NODE_B, always)
            .build()?,
    };
    Ok((reference, attack))
}

/// The beacon `node` sends at `time` under `protocol`.
pub fn beacon_for(protocol: &ProtocolSpec, node: &NodeId, time: Scalar, loc: Point, params: &SystemParams) -> Message {
    let dur = params.msg_duration_default.clone();
    match protocol {
        ProtocolSpec::Naive => Message::identity(node, dur),
        ProtocolSpec::Pt => Message::beacon_t(node.clone(), time, dur),
        ProtocolSpec::Pgt | ProtocolSpec::PgtApprox(_) => Message::beacon_tl(node.clone(), time, loc, dur),
    }
}

fn transmit(trace: &mut Trace, setting: &Setting, params: &SystemParams, send: Event) {
    trace.extend(induced_receptions(setting, params, &send));
    trace.insert(send);
}

/// One successful run in the reference setting: B beacons at 0, A receives
/// it one flight time later and declares B a neighbor shortly after.
pub fn synth_base_trace(reference: &Setting, protocol: &ProtocolSpec, params: &SystemParams) -> Result<Trace, AttackError> {
    let (a, b) = (NodeId::from(NODE_A), NodeId::from(NODE_B));
    let d = reference.dist(&a, &b)?;
    if d > params.nd_range {
        return Err(AttackError::NoWitness(format!("dist(A,B) = {d} exceeds R = {}", params.nd_range)));
    }
    let msg = beacon_for(protocol, &b, Scalar::zero(), reference.loc(&b)?.clone(), params);
    let mut trace = Trace::new();
    transmit(&mut trace, reference, params, Event::bcast(b.clone(), Scalar::zero(), msg.clone()));
    let arrival = reference.time_of_flight(params, &b, &a)?;
    let declared = &arrival + msg.duration() + declaration_offset();
    trace.insert(Event::neighbor(a, declared, b, arrival));
    Ok(trace)
}

/// A half-plane (or a narrower sector) centred on `to` that leaves out
/// every node in `avoid`.
fn aim(setting: &Setting, from: &NodeId, to: &NodeId, avoid: &[NodeId]) -> Result<(Angle, Angle), AttackError> {
    let apex = setting.loc(from)?;
    let target = setting.loc(to)?;
    let heading = Angle::of_vector(&target.sub(apex));
    let mut fallback = None;
    for k in 0..7 {
        let beta = Scalar::one() / Scalar::from_int(1 << k);
        let alpha = Angle(heading.0.clone() - &beta / &s_int(2)).normalized();
        let beta = Angle(beta);
        fallback.get_or_insert_with(|| (alpha.clone(), beta.clone()));
        if !in_sector(apex, &alpha, &beta, target) {
            continue;
        }
        let mut clear = true;
        for n in avoid {
            if in_sector(apex, &alpha, &beta, setting.loc(n)?) {
                clear = false;
            }
        }
        if clear {
            return Ok((alpha, beta));
        }
    }
    Ok(fallback.expect("loop ran"))
}

/// Rebuild a time-location beacon for the attack setting. With error
/// bounds, the timestamp runs `delta` ahead and the location is pushed
/// `tau * v` away from the receiver: both shrink the apparent relay delay.
fn relocated_beacon(
    msg: &Message,
    protocol: &ProtocolSpec,
    attack: &Setting,
    sender: &NodeId,
    receiver: &NodeId,
    params: &SystemParams,
) -> Result<Message, AttackError> {
    let Message::BeaconTl { creator, time, duration, .. } = msg else {
        return Ok(msg.clone());
    };
    let here = attack.loc(sender)?.clone();
    let (time, loc) = match protocol.inaccuracy() {
        None => (time.clone(), here),
        Some(inacc) => {
            let away: Vector = here.sub(attack.loc(receiver)?);
            let len = attack.dist(sender, receiver)?;
            let unit = Vector { x: &away.x / &len, y: &away.y / &len };
            (time + &inacc.delta, here.offset(&unit, &(&inacc.tau * &params.v)))
        }
    };
    Ok(Message::beacon_tl(creator.clone(), time, loc, duration.clone()))
}

/// Relay every A/B transmission of `base` through the adversarial nodes of
/// `attack` so that each correct reception keeps its reference time.
/// `adversary` selects broadcast relays for `relay-bcast` and aimed
/// directional sends otherwise.
pub fn synth_relay_trace(
    base: &Trace,
    reference: &Setting,
    attack: &Setting,
    variant: Variant,
    protocol: &ProtocolSpec,
    adversary: AdversaryKind,
    params: &SystemParams,
) -> Result<(Trace, Deltas), AttackError> {
    let (a, b, c) = (NodeId::from(NODE_A), NodeId::from(NODE_B), NodeId::from(NODE_C));
    let near_b = match variant {
        Variant::SingleRelay => c.clone(),
        Variant::Wormhole => NodeId::from(NODE_D),
    };
    let v = &params.v;
    let flight = reference.dist(&a, &b)? / v.clone();
    let deltas = Deltas {
        d1: attack.dist(&a, &c)? / v.clone(),
        d2: &flight - &(attack.dist(&near_b, &b)? / v.clone()),
        d3: attack.dist(&b, &near_b)? / v.clone(),
        d4: &flight - &(attack.dist(&c, &a)? / v.clone()),
        channel: attack.dist(&c, &near_b)? / params.v_adv.clone(),
        flight,
    };
    if deltas.slack() < params.delta_relay {
        return Err(AttackError::PlacementInfeasible(format!(
            "relay window d2 - d1 - channel = {} is below delta_relay = {}",
            deltas.slack(),
            params.delta_relay
        )));
    }

    let mut out = Trace::new();
    for e in base {
        match e {
            Event::Bcast { actor, start, msg } if actor == &a || actor == &b => {
                let (peer, forward, resend) =
                    if actor == &a { (&b, &near_b, &deltas.d2) } else { (&a, &c, &deltas.d4) };
                let msg = relocated_beacon(msg, protocol, attack, actor, peer, params)?;
                transmit(&mut out, attack, params, Event::bcast(actor.clone(), start.clone(), msg.clone()));
                let at = start + resend;
                let relay = if adversary == AdversaryKind::RelayBcast {
                    Event::bcast(forward.clone(), at, msg)
                } else {
                    let (alpha, beta) = aim(attack, forward, peer, std::slice::from_ref(actor))?;
                    Event::dcast(forward.clone(), at, alpha, beta, msg)
                };
                transmit(&mut out, attack, params, relay);
            }
            Event::Neighbor { .. } => {
                out.insert(e.clone());
            }
            _ => {}
        }
    }
    Ok((out, deltas))
}

/// Declarations by a correct node about a correct node whose link towards
/// it is down at the declared time.
pub fn detect_nd1_violation(trace: &Trace, setting: &Setting) -> Verdict {
    let mut out = Collector::default();
    for e in trace {
        if let Event::Neighbor { actor, neighbor, declared_time, .. } = e {
            if setting.is_correct(actor)
                && setting.is_correct(neighbor)
                && !setting.link_up_at(neighbor, actor, declared_time)
            {
                out.add(
                    rules::ND1,
                    vec![e.clone()],
                    format!("{actor} declares {neighbor} but link {neighbor}->{actor} is down at {declared_time}"),
                );
            }
        }
    }
    out.finish()
}

/// Two correct neighbors at distance `d` and a run in which A declares B.
pub fn nd2_witness(protocol: &ProtocolSpec, d: &Scalar, params: &SystemParams) -> Result<(Setting, Trace), AttackError> {
    if !d.is_positive() || d > &params.nd_range {
        return Err(AttackError::OutOfRange { d: Box::new(d.clone()), range: Box::new(params.nd_range.clone()) });
    }
    let setting = two_node_setting(d)?;
    let trace = synth_base_trace(&setting, protocol, params)?;
    Ok((setting, trace))
}

/// Whether every listed node has the same complete local trace in both.
pub fn check_local_views_equal(theta: &Trace, theta_prime: &Trace, nodes: &BTreeSet<NodeId>) -> bool {
    nodes
        .iter()
        .all(|n| local_trace(theta, n, &Cutoff::Infinity) == local_trace(theta_prime, n, &Cutoff::Infinity))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackRequest {
    pub variant: Variant,
    /// Reference distance between A and B.
    pub d_ab: Scalar,
    /// Explicit relay layout; canonical when absent.
    pub placement: Option<Placement>,
    /// A-B distance in the attack setting for the canonical layout.
    pub target: Option<Scalar>,
    pub protocol: ProtocolSpec,
    pub adversary: AdversaryKind,
}

#[derive(Debug, Clone)]
pub struct AttackPlan {
    pub request: AttackRequest,
    pub placement: Placement,
    pub reference: Setting,
    pub attack: Setting,
    pub base_trace: Trace,
    pub relay_trace: Trace,
    pub deltas: Deltas,
    pub inequalities: Vec<Inequality>,
}

pub fn plan_attack(request: &AttackRequest, params: &SystemParams) -> Result<AttackPlan, AttackError> {
    let placement = match &request.placement {
        Some(p) => p.clone(),
        None => canonical_placement(request.variant, &request.d_ab, request.target.as_ref(), params)?,
    };
    let inequalities = layout_inequalities(request.variant, &request.d_ab, &placement, params)?;
    let (reference, attack) = build_attack_settings(&request.d_ab, request.variant, &placement, params)?;
    let base_trace = synth_base_trace(&reference, &request.protocol, params)?;
    let (relay_trace, deltas) = synth_relay_trace(
        &base_trace,
        &reference,
        &attack,
        request.variant,
        &request.protocol,
        request.adversary,
        params,
    )?;
    Ok(AttackPlan {
        request: request.clone(),
        placement,
        reference,
        attack,
        base_trace,
        relay_trace,
        deltas,
        inequalities,
    })
}

/// Every check run against a synthesized relay trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Assessment {
    pub setting: Verdict,
    pub protocol: Verdict,
    /// Under the requested adversary model.
    pub adversary: Verdict,
    pub nd1: Verdict,
    pub views_equal: bool,
    pub relay_ok: bool,
    pub relay_local_ok: bool,
    /// Relay-bcast feasibility of the trace with every adversarial
    /// directional send turned into a broadcast.
    pub relay_bcast_renamed_ok: bool,
    /// Feasible for setting, protocol and adversary, and ND1 is violated.
    pub success: bool,
}

pub(crate) fn adversary_verdict(trace: &Trace, setting: &Setting, params: &SystemParams, kind: AdversaryKind) -> Verdict {
    let model = AdversaryModel::new(kind, params.delta_relay.clone());
    check_adversary_feasible(trace, setting, params, &model).unwrap_or_else(|err| {
        let mut v = Verdict::pass();
        v.push(rules::ADV_PAYLOAD, Vec::new(), err.to_string());
        v
    })
}

pub fn assess(plan: &AttackPlan, params: &SystemParams) -> Assessment {
    let trace = &plan.relay_trace;
    let setting = check_setting_feasible(trace, &plan.attack, params);
    let protocol = plan.request.protocol.check(trace, &plan.attack, params);
    let adversary = adversary_verdict(trace, &plan.attack, params, plan.request.adversary);
    let nd1 = detect_nd1_violation(trace, &plan.attack);
    let success = setting.ok && protocol.ok && adversary.ok && !nd1.ok;
    Assessment {
        views_equal: check_local_views_equal(&plan.base_trace, trace, &plan.attack.correct_nodes()),
        relay_ok: adversary_verdict(trace, &plan.attack, params, AdversaryKind::Relay).ok,
        relay_local_ok: adversary_verdict(trace, &plan.attack, params, AdversaryKind::RelayLocal).ok,
        relay_bcast_renamed_ok: adversary_verdict(
            &rename_dcast_to_bcast(trace, &plan.attack),
            &plan.attack,
            params,
            AdversaryKind::RelayBcast,
        )
        .ok,
        setting,
        protocol,
        adversary,
        nd1,
        success,
    }
}

/// Plan and assess in one step; `Ok(false)` when no layout exists.
pub fn attack_succeeds(request: &AttackRequest, params: &SystemParams) -> Result<bool, AttackError> {
    match plan_attack(request, params) {
        Ok(plan) => Ok(assess(&plan, params).success),
        Err(AttackError::PlacementInfeasible(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::InaccuracyParams;
    use crate::protocol::check_pt_feasible;

    fn s(x: i64) -> Scalar {
        Scalar::from_int(x)
    }

    fn params(delta_relay: Scalar) -> SystemParams {
        SystemParams::new(s(1), s(1), s(10), delta_relay, s(1)).unwrap()
    }

    fn request(variant: Variant, protocol: ProtocolSpec, placement: Option<Placement>) -> AttackRequest {
        AttackRequest { variant, d_ab: s(10), placement, target: None, protocol, adversary: AdversaryKind::Relay }
    }

    fn collinear() -> Placement {
        Placement { b: Point::from_ints(8, 0), c: Point::from_ints(4, 0), d: None }
    }

    #[test]
    fn worked_single_relay_example() {
        let p = params(s(1));
        let plan = plan_attack(&request(Variant::SingleRelay, ProtocolSpec::Pt, Some(collinear())), &p).unwrap();
        assert_eq!(plan.deltas.d1, s(4));
        assert_eq!(plan.deltas.d2, s(6));
        assert_eq!(&plan.deltas.d4 - &plan.deltas.d3, s(2));
        let a = assess(&plan, &p);
        assert!(a.setting.ok, "{}", a.setting);
        assert!(a.protocol.ok, "{}", a.protocol);
        assert!(a.adversary.ok, "{}", a.adversary);
        assert!(a.views_equal);
        assert_eq!(a.nd1.violations.len(), 1);
        assert!(a.success);
    }

    #[test]
    fn layout_inequality_rejects_slow_relay() {
        let p = params(s(3));
        let err = plan_attack(&request(Variant::SingleRelay, ProtocolSpec::Pt, Some(collinear())), &p).unwrap_err();
        assert!(matches!(err, AttackError::PlacementInfeasible(_)));
    }

    #[test]
    fn reference_beyond_range_rejected() {
        let p = params(s(1));
        let mut req = request(Variant::SingleRelay, ProtocolSpec::Pt, Some(collinear()));
        req.d_ab = s(11);
        assert!(matches!(plan_attack(&req, &p), Err(AttackError::PlacementInfeasible(_))));
    }

    #[test]
    fn threshold_delay_has_no_layout() {
        let p = params(s(10));
        assert!(matches!(
            canonical_placement(Variant::SingleRelay, &s(10), None, &p),
            Err(AttackError::PlacementInfeasible(_))
        ));
    }

    #[test]
    fn base_trace_declares_after_reception() {
        let p = params(s(1));
        let (setting, trace) = nd2_witness(&ProtocolSpec::Pt, &s(8), &p).unwrap();
        assert!(trace.contains(&Event::neighbor("A", s(10), "B", s(8))));
        assert!(check_setting_feasible(&trace, &setting, &p).ok);
        assert!(check_pt_feasible(&trace, &setting, &p).ok);
        assert!(detect_nd1_violation(&trace, &setting).ok);
    }

    #[test]
    fn witness_range() {
        let p = params(s(1));
        assert!(nd2_witness(&ProtocolSpec::Pt, &s(10), &p).is_ok());
        assert!(matches!(nd2_witness(&ProtocolSpec::Pt, &s(0), &p), Err(AttackError::OutOfRange { .. })));
        assert!(matches!(nd2_witness(&ProtocolSpec::Pt, &s(20), &p), Err(AttackError::OutOfRange { .. })));
    }

    #[test]
    fn location_check_stops_relay() {
        let p = params(s(1));
        let plan = plan_attack(&request(Variant::SingleRelay, ProtocolSpec::Pgt, None), &p).unwrap();
        let a = assess(&plan, &p);
        assert!(a.setting.ok && a.adversary.ok);
        assert!(a.protocol.has_rule(rules::PGT_NEIGHBOR));
        assert!(!a.success);
    }

    #[test]
    fn error_bounds_reopen_relay() {
        let p = params(s(1));
        let lax = InaccuracyParams::new(Scalar::ratio(1, 4), Scalar::ratio(1, 4)).unwrap();
        let plan = plan_attack(&request(Variant::SingleRelay, ProtocolSpec::PgtApprox(lax), None), &p).unwrap();
        assert!(assess(&plan, &p).success);
        let tight = InaccuracyParams::new(Scalar::ratio(1, 8), Scalar::ratio(1, 4)).unwrap();
        let plan = plan_attack(&request(Variant::SingleRelay, ProtocolSpec::PgtApprox(tight), None), &p).unwrap();
        assert!(!assess(&plan, &p).success);
    }

    #[test]
    fn wormhole_spans_beyond_single_relay_reach() {
        let p = SystemParams::new(s(1), s(4), s(10), s(1), s(1)).unwrap();
        let mut req = request(Variant::Wormhole, ProtocolSpec::Pt, None);
        req.target = Some(s(20));
        let plan = plan_attack(&req, &p).unwrap();
        let a = assess(&plan, &p);
        assert!(a.success, "{a:?}");
        assert!(!a.relay_local_ok);
    }

    #[test]
    fn broadcast_relays_through_wormhole() {
        let p = params(s(1));
        let mut req = request(Variant::Wormhole, ProtocolSpec::Pt, None);
        req.adversary = AdversaryKind::RelayBcast;
        let plan = plan_attack(&req, &p).unwrap();
        let a = assess(&plan, &p);
        assert!(a.success && a.views_equal, "{a:?}");
    }

    #[test]
    fn views_compare_complete_local_traces() {
        let p = params(s(1));
        let (_, t) = nd2_witness(&ProtocolSpec::Pt, &s(8), &p).unwrap();
        let mut cut = t.clone();
        cut.remove(&Event::receive("A", s(8), "B", Message::beacon_t("B".into(), s(0), s(1))));
        let nodes: BTreeSet<NodeId> = ["A".into(), "B".into()].into();
        assert!(check_local_views_equal(&t, &t, &nodes));
        assert!(!check_local_views_equal(&t, &cut, &nodes));
        assert!(check_local_views_equal(&t, &cut, &BTreeSet::new()));
    }
}
