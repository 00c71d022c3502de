use std::fmt;

use serde::Serialize;

use crate::event::Event;

/// One failed condition, with the events that witness the failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: String,
    #[serde(serialize_with = "events_as_strings")]
    pub events: Vec<Event>,
    pub detail: String,
}

fn events_as_strings<S: serde::Serializer>(events: &[Event], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(events.iter().map(|e| e.to_string()))
}

/// Result of a feasibility or property check. `ok` iff there are no violations.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Verdict {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl Verdict {
    pub fn pass() -> Self {
        Verdict { ok: true, violations: Vec::new() }
    }

    pub fn from_violations(mut violations: Vec<Violation>) -> Self {
        violations.sort_by(|a, b| (&a.rule, &a.events, &a.detail).cmp(&(&b.rule, &b.events, &b.detail)));
        violations.dedup();
        Verdict { ok: violations.is_empty(), violations }
    }

    pub fn push(&mut self, rule: &str, events: Vec<Event>, detail: impl Into<String>) {
        self.violations.push(Violation { rule: rule.to_owned(), events, detail: detail.into() });
        self.ok = false;
    }

    pub fn merge(mut self, other: Verdict) -> Verdict {
        self.violations.extend(other.violations);
        Verdict::from_violations(self.violations)
    }

    pub fn rules(&self) -> Vec<&str> {
        self.violations.iter().map(|v| v.rule.as_str()).collect()
    }

    pub fn has_rule(&self, rule: &str) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok {
            return f.write_str("ok");
        }
        writeln!(f, "{} violation(s)", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  [{}] {}", v.rule, v.detail)?;
            for e in &v.events {
                writeln!(f, "      {e}")?;
            }
        }
        Ok(())
    }
}

/// Accumulates violations and normalizes them into a [`Verdict`].
#[derive(Debug, Default)]
pub(crate) struct Collector {
    violations: Vec<Violation>,
}

impl Collector {
    pub fn add(&mut self, rule: &str, events: Vec<Event>, detail: impl Into<String>) {
        self.violations.push(Violation { rule: rule.to_owned(), events, detail: detail.into() });
    }

    pub fn finish(self) -> Verdict {
        Verdict::from_violations(self.violations)
    }
}

/// Rule identifiers reported in verdicts.
pub mod rules {
    pub const EVENT_MALFORMED: &str = "event.malformed";
    pub const SETTING_UNKNOWN_NODE: &str = "setting.unknown-node";
    pub const SETTING_RECEIVE_LINK: &str = "setting.receive.link-down";
    pub const SETTING_RECEIVE_UNMATCHED: &str = "setting.receive.unmatched";
    pub const SETTING_RECEIVE_AMBIGUOUS: &str = "setting.receive.bcast-and-dcast";
    pub const SETTING_BCAST_MISSING_RECEIVE: &str = "setting.bcast.missing-receive";
    pub const SETTING_DCAST_ACTOR: &str = "setting.dcast.correct-actor";
    pub const SETTING_DCAST_MISSING_RECEIVE: &str = "setting.dcast.missing-receive";

    pub const PROTOCOL_BCAST: &str = "protocol.bcast-not-allowed";
    pub const PROTOCOL_NEIGHBOR: &str = "protocol.neighbor-not-allowed";
    pub const PROTOCOL_EPSILON: &str = "protocol.epsilon-not-allowed";

    pub const PT_BEACON: &str = "pt.beacon-not-self-authenticated";
    pub const PT_NEIGHBOR: &str = "pt.neighbor-unjustified";
    pub const PGT_BEACON: &str = "pgt.beacon-not-self-authenticated";
    pub const PGT_NEIGHBOR: &str = "pgt.neighbor-unjustified";

    pub const ADV_BCAST: &str = "adversary.bcast-forbidden";
    pub const ADV_DCAST: &str = "adversary.dcast-forbidden";
    pub const ADV_NOT_RELAY: &str = "adversary.not-a-relay";
    pub const ADV_FORGED: &str = "adversary.forged-beacon";
    pub const ADV_PAYLOAD: &str = "adversary.payload-mismatch";

    pub const ND1: &str = "nd1.false-neighbor";
}
