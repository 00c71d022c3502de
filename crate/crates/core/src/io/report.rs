//! Command reports. Each has a stable JSON form (`structured`) and a
//! plain-text rendering of the same content.

use std::fmt::Write as _;

use serde::Serialize;

use crate::adversary::OrderReport;
use crate::attack::{Assessment, Deltas, Inequality, Placement};
use crate::scalar::Scalar;
use crate::verdict::Verdict;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Structured,
}

pub trait Report: Serialize {
    fn text(&self) -> String;

    fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text(),
            Format::Structured => {
                // Through `Value` so that keys come out sorted.
                let value = serde_json::to_value(self).expect("reports serialize");
                let mut s = serde_json::to_string_pretty(&value).expect("values serialize");
                s.push('\n');
                s
            }
        }
    }
}

fn verdict_lines(out: &mut String, name: &str, v: &Verdict) {
    let _ = writeln!(out, "{name}: {}", if v.ok { "ok" } else { "VIOLATED" });
    for violation in &v.violations {
        let _ = writeln!(out, "  [{}] {}", violation.rule, violation.detail);
        for e in &violation.events {
            let _ = writeln!(out, "    {e}");
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Ok,
    Infeasible,
    Attack,
}

impl CheckStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            CheckStatus::Ok => 0,
            CheckStatus::Infeasible => 2,
            CheckStatus::Attack => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub status: CheckStatus,
    pub protocol: String,
    pub adversary: String,
    pub setting_feasible: Verdict,
    pub protocol_feasible: Verdict,
    pub adversary_feasible: Verdict,
    pub nd1: Verdict,
}

impl CheckReport {
    pub fn new(protocol: String, adversary: String, setting: Verdict, proto: Verdict, adv: Verdict, nd1: Verdict) -> Self {
        let status = if !(setting.ok && proto.ok && adv.ok) {
            CheckStatus::Infeasible
        } else if !nd1.ok {
            CheckStatus::Attack
        } else {
            CheckStatus::Ok
        };
        CheckReport {
            status,
            protocol,
            adversary,
            setting_feasible: setting,
            protocol_feasible: proto,
            adversary_feasible: adv,
            nd1,
        }
    }
}

impl Report for CheckReport {
    fn text(&self) -> String {
        let mut out = String::new();
        let status = match self.status {
            CheckStatus::Ok => "ok",
            CheckStatus::Infeasible => "infeasible",
            CheckStatus::Attack => "attack (feasible trace violates ND1)",
        };
        let _ = writeln!(out, "status: {status}");
        verdict_lines(&mut out, "setting", &self.setting_feasible);
        verdict_lines(&mut out, &format!("protocol {}", self.protocol), &self.protocol_feasible);
        verdict_lines(&mut out, &format!("adversary {}", self.adversary), &self.adversary_feasible);
        verdict_lines(&mut out, "nd1", &self.nd1);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AttackSummary {
    pub variant: String,
    pub protocol: String,
    pub adversary: String,
    pub d_ab: Scalar,
    /// "attack" or "infeasible".
    pub status: String,
    /// Why no attack exists, when infeasible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub placement: Option<Placement>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deltas: Option<Deltas>,
    pub inequalities: Vec<Inequality>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assessment: Option<Assessment>,
    pub files: Vec<String>,
}

impl AttackSummary {
    pub fn succeeded(&self) -> bool {
        self.status == "attack"
    }
}

impl Report for AttackSummary {
    fn text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} attack on {} against {} at d_ab = {}: {}",
            self.variant, self.protocol, self.adversary, self.d_ab, self.status
        );
        if let Some(r) = &self.reason {
            let _ = writeln!(out, "reason: {r}");
        }
        if let Some(p) = &self.placement {
            let _ = write!(out, "placement: B = {}, C = {}", p.b, p.c);
            if let Some(d) = &p.d {
                let _ = write!(out, ", D = {d}");
            }
            out.push('\n');
        }
        if let Some(d) = &self.deltas {
            let _ = writeln!(
                out,
                "deltas: flight = {}, d1 = {}, d2 = {}, d3 = {}, d4 = {}, channel = {}",
                d.flight, d.d1, d.d2, d.d3, d.d4, d.channel
            );
        }
        for i in &self.inequalities {
            let _ = writeln!(out, "  {i}");
        }
        if let Some(a) = &self.assessment {
            verdict_lines(&mut out, "setting", &a.setting);
            verdict_lines(&mut out, "protocol", &a.protocol);
            verdict_lines(&mut out, "adversary", &a.adversary);
            verdict_lines(&mut out, "nd1", &a.nd1);
            let _ = writeln!(
                out,
                "local views equal: {}; relay: {}; relay-local: {}; relay-bcast after renaming: {}",
                a.views_equal, a.relay_ok, a.relay_local_ok, a.relay_bcast_renamed_ok
            );
        }
        for f in &self.files {
            let _ = writeln!(out, "wrote {f}");
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessSummary {
    pub protocol: String,
    pub distance: Scalar,
    pub checks: CheckReport,
    pub files: Vec<String>,
}

impl Report for WitnessSummary {
    fn text(&self) -> String {
        let mut out = format!("{} witness at distance {}\n", self.protocol, self.distance);
        out.push_str(&self.checks.text());
        for f in &self.files {
            let _ = writeln!(out, "wrote {f}");
        }
        out
    }
}

impl Report for OrderReport {
    fn text(&self) -> String {
        let mut out = String::new();
        let rename = if self.renamed { " (after renaming)" } else { "" };
        let verdict = if self.holds() { "holds" } else { "FAILS" };
        let _ = writeln!(out, "{} <= {}{rename}: {verdict}", self.weaker, self.stronger);
        let _ = writeln!(out, "checked {} traces, {} admitted by {}", self.checked, self.admitted, self.weaker);
        for s in &self.skipped {
            let _ = writeln!(out, "skipped (not setting-feasible): {s}");
        }
        for c in &self.counterexamples {
            let _ = writeln!(out, "counterexample: {c}");
        }
        out
    }
}
