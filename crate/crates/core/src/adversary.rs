//! Adversary capability models and the trace-inclusion ordering between
//! them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::event::{Event, Trace};
use crate::feasibility::check_setting_feasible;
use crate::geometry::Angle;
use crate::message::Message;
use crate::node::NodeId;
use crate::params::SystemParams;
use crate::scalar::Scalar;
use crate::setting::Setting;
use crate::verdict::{rules, Collector, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdversaryKind {
    /// Directional relays, possibly across the adversary channel.
    Relay,
    /// Broadcast-only relays.
    RelayBcast,
    /// Directional relays of what the same node received.
    RelayLocal,
    /// Relays or authors time beacons.
    DyT,
    /// Relays or authors time-location beacons.
    DyGt,
}

impl AdversaryKind {
    pub const ALL: [AdversaryKind; 5] =
        [AdversaryKind::Relay, AdversaryKind::RelayBcast, AdversaryKind::RelayLocal, AdversaryKind::DyT, AdversaryKind::DyGt];

    pub fn name(self) -> &'static str {
        match self {
            AdversaryKind::Relay => "relay",
            AdversaryKind::RelayBcast => "relay-bcast",
            AdversaryKind::RelayLocal => "relay-local",
            AdversaryKind::DyT => "dy-t",
            AdversaryKind::DyGt => "dy-gt",
        }
    }
}

impl fmt::Display for AdversaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AdversaryKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AdversaryKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown adversary `{s}` (expected relay, relay-bcast, relay-local, dy-t or dy-gt)"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdversaryModel {
    pub kind: AdversaryKind,
    pub delta_relay: Scalar,
}

impl AdversaryModel {
    pub fn new(kind: AdversaryKind, delta_relay: Scalar) -> Self {
        AdversaryModel { kind, delta_relay }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdversaryError {
    #[error("{kind} only covers beacon payloads, found `{event}`")]
    ModelMessageMismatch { kind: AdversaryKind, event: String },
}

/// Check the capabilities of every adversarial node in `trace`.
pub fn check_adversary_feasible(
    trace: &Trace,
    setting: &Setting,
    params: &SystemParams,
    model: &AdversaryModel,
) -> Result<Verdict, AdversaryError> {
    use AdversaryKind::*;
    let mut out = Collector::default();
    let arith = setting.arithmetic();
    let delta = &model.delta_relay;

    // Some adversarial node received `msg` early enough to send it from
    // `sender` at `t`. With `local`, only `sender` itself counts.
    let relayed = |sender: &NodeId, t: &Scalar, msg: &Message, local: bool| {
        trace.iter().any(|r| match r {
            Event::Receive { actor, start, sender: from, msg: m } if m == msg => {
                if !setting.is_adversarial(actor) || (local && actor != sender) {
                    return false;
                }
                // A node's reception of its own transmission cannot justify it.
                if actor == sender && from == sender && start == t {
                    return false;
                }
                let channel = if actor == sender {
                    Scalar::zero()
                } else {
                    setting.dist(actor, sender).expect("adversarial node is known") / params.v_adv.clone()
                };
                arith.le(&(delta + &channel), &(t - start))
            }
            _ => false,
        })
    };

    for e in trace {
        if !setting.is_adversarial(e.actor()) {
            continue;
        }
        let (is_bcast, actor, start, msg) = match e {
            Event::Bcast { actor, start, msg } => (true, actor, start, msg),
            Event::Dcast { actor, start, msg, .. } => (false, actor, start, msg),
            _ => continue,
        };
        match (model.kind, is_bcast) {
            (Relay | RelayLocal | DyT | DyGt, true) => {
                out.add(rules::ADV_BCAST, vec![e.clone()], format!("{} forbids adversarial broadcasts", model.kind));
                continue;
            }
            (RelayBcast, false) => {
                out.add(rules::ADV_DCAST, vec![e.clone()], format!("{} forbids directional sends", model.kind));
                continue;
            }
            _ => {}
        }
        match model.kind {
            Relay | RelayBcast | RelayLocal => {
                if !relayed(actor, start, msg, model.kind == RelayLocal) {
                    out.add(
                        rules::ADV_NOT_RELAY,
                        vec![e.clone()],
                        format!("{actor} sends {msg} at {start} without receiving it at least {delta} earlier"),
                    );
                }
            }
            DyT | DyGt => {
                let fits =
                    matches!((model.kind, msg), (DyT, Message::BeaconT { .. }) | (DyGt, Message::BeaconTl { .. }));
                if !fits {
                    return Err(AdversaryError::ModelMessageMismatch { kind: model.kind, event: e.to_string() });
                }
                let creator = msg.creator().expect("beacon has a creator");
                if !setting.is_adversarial(creator) && !relayed(actor, start, msg, false) {
                    out.add(
                        rules::ADV_FORGED,
                        vec![e.clone()],
                        format!("{actor} sends {msg}, authored by correct {creator}, without relaying it"),
                    );
                }
            }
        }
    }
    Ok(out.finish())
}

/// Replace every adversarial broadcast by the equivalent full-circle
/// directional send.
pub fn rename_bcast_to_dcast(trace: &Trace, setting: &Setting) -> Trace {
    trace.map_events(|e| match e {
        Event::Bcast { actor, start, msg } if setting.is_adversarial(actor) => {
            Event::dcast(actor.clone(), start.clone(), Angle::zero(), Angle::full_turn(), msg.clone())
        }
        other => other.clone(),
    })
}

/// Replace every adversarial directional send by a broadcast of the same
/// message. Coverage grows unless the sector was already the full circle.
pub fn rename_dcast_to_bcast(trace: &Trace, setting: &Setting) -> Trace {
    trace.map_events(|e| match e {
        Event::Dcast { actor, start, msg, .. } if setting.is_adversarial(actor) => {
            Event::bcast(actor.clone(), start.clone(), msg.clone())
        }
        other => other.clone(),
    })
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub setting: Setting,
    pub params: SystemParams,
    pub trace: Trace,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderReport {
    pub weaker: AdversaryKind,
    pub stronger: AdversaryKind,
    pub renamed: bool,
    /// Entries that passed setting-feasibility.
    pub checked: usize,
    /// Entries feasible under the weaker model.
    pub admitted: usize,
    /// Entries skipped because they are not setting-feasible.
    pub skipped: Vec<String>,
    pub counterexamples: Vec<String>,
}

impl OrderReport {
    pub fn holds(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

fn feasible(trace: &Trace, entry: &CorpusEntry, kind: AdversaryKind) -> bool {
    let model = AdversaryModel::new(kind, entry.params.delta_relay.clone());
    check_adversary_feasible(trace, &entry.setting, &entry.params, &model).is_ok_and(|v| v.ok)
}

/// Test `weaker <= stronger` on a corpus: every setting-feasible entry
/// admitted by `weaker` must be admitted by `stronger`, after renaming
/// adversarial broadcasts when `use_renaming` is set. Payload mismatches
/// count as infeasible. Each entry's own Δ_relay is used.
pub fn weaker_on_corpus(
    weaker: AdversaryKind,
    stronger: AdversaryKind,
    corpus: &[CorpusEntry],
    use_renaming: bool,
) -> OrderReport {
    let mut report = OrderReport {
        weaker,
        stronger,
        renamed: use_renaming,
        checked: 0,
        admitted: 0,
        skipped: Vec::new(),
        counterexamples: Vec::new(),
    };
    for entry in corpus {
        if !check_setting_feasible(&entry.trace, &entry.setting, &entry.params).ok {
            report.skipped.push(entry.name.clone());
            continue;
        }
        report.checked += 1;
        if !feasible(&entry.trace, entry, weaker) {
            continue;
        }
        report.admitted += 1;
        let image = if use_renaming { rename_bcast_to_dcast(&entry.trace, &entry.setting) } else { entry.trace.clone() };
        if !feasible(&image, entry, stronger) {
            report.counterexamples.push(entry.name.clone());
        }
    }
    report
}
