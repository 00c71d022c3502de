//! Scenario files (TOML).
//!
//! ```toml
//! horizon = 100
//!
//! [arithmetic]
//! mode = "exact"            # or "approx" with epsilon = "1/1000"
//!
//! [params]
//! v = "3/10"
//! v_adv = "3/10"
//! nd_range = 100
//! delta_relay = 40
//! msg_duration_default = 1
//!
//! [protocol]
//! name = "pgt-approx"       # naive | pt | pgt | pgt-approx
//! delta = 2
//! tau = 1
//!
//! [adversary]
//! name = "relay"            # relay | relay-bcast | relay-local | dy-t | dy-gt
//!
//! [[nodes]]
//! id = "A"
//! x = 0
//! y = 0
//! type = "correct"
//!
//! [[links]]
//! from = "A"
//! to = "B"
//! both = true
//! up = [["0", "inf"]]
//! ```

use std::collections::BTreeMap;
use std::ops::Range;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use toml::Spanned;

use super::LoadError;
use crate::adversary::{AdversaryKind, AdversaryModel};
use crate::attack::{Placement, Variant};
use crate::geometry::Point;
use crate::node::{NodeId, NodeKind};
use crate::params::{InaccuracyParams, SystemParams};
use crate::protocol::ProtocolSpec;
use crate::scalar::Scalar;
use crate::setting::{Arithmetic, Interval, LinkSchedule, ModelError, Setting};

/// Optional attack layout carried by a scenario.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackSection {
    pub variant: Variant,
    /// Reference A-B distance; R when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_ab: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub placement: Option<Placement>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub params: SystemParams,
    pub setting: Setting,
    pub protocol: ProtocolSpec,
    pub adversary: AdversaryModel,
    pub horizon: Scalar,
    pub attack: Option<AttackSection>,
}

/// Interval end; `"inf"` for unbounded.
#[derive(Debug, Clone)]
struct End(Option<Scalar>);

impl Serialize for End {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match &self.0 {
            Some(x) => x.serialize(s),
            None => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for End {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => Ok(End(Some(Scalar::from_int(n)))),
            Raw::Text(t) if t.trim() == "inf" => Ok(End(None)),
            Raw::Text(t) => t.parse().map(|x| End(Some(x))).map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProtocol {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tau: Option<Scalar>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAdversary {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta_relay: Option<Scalar>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    id: String,
    x: Scalar,
    y: Scalar,
    #[serde(rename = "type")]
    kind: NodeKind,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLink {
    from: String,
    to: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    both: bool,
    up: Vec<(Scalar, End)>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario<N, L> {
    horizon: Scalar,
    #[serde(default)]
    arithmetic: Arithmetic,
    params: SystemParams,
    protocol: RawProtocol,
    adversary: RawAdversary,
    nodes: Vec<N>,
    #[serde(default = "Vec::new")]
    links: Vec<L>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    attack: Option<AttackSection>,
}

fn line_of(text: &str, span: &Range<usize>) -> usize {
    text[..span.start.min(text.len())].matches('\n').count() + 1
}

impl Scenario {
    pub fn new(
        params: SystemParams,
        setting: Setting,
        protocol: ProtocolSpec,
        adversary: AdversaryKind,
        horizon: Scalar,
    ) -> Self {
        let adversary = AdversaryModel::new(adversary, params.delta_relay.clone());
        Scenario { params, setting, protocol, adversary, horizon, attack: None }
    }

    pub fn inaccuracy(&self) -> Option<&InaccuracyParams> {
        self.protocol.inaccuracy()
    }

    pub fn parse(text: &str) -> Result<Scenario, LoadError> {
        Self::parse_with(text, None)
    }

    /// Parses, replacing the file's arithmetic mode when `arithmetic` is given.
    pub fn parse_with(text: &str, arithmetic: Option<&Arithmetic>) -> Result<Scenario, LoadError> {
        let mut raw: RawScenario<Spanned<RawNode>, Spanned<RawLink>> = toml::from_str(text).map_err(|e| {
            LoadError::parse(e.span().map(|s| line_of(text, &s)), None, e.message().to_owned())
        })?;
        if let Some(a) = arithmetic {
            raw.arithmetic = a.clone();
        }

        let at = |span: Range<usize>, field: String, message: String| {
            LoadError::validation(Some(line_of(text, &span)), field, message)
        };
        if !raw.horizon.is_positive() {
            return Err(LoadError::validation(None, "horizon".into(), "horizon must be positive".into()));
        }
        raw.params
            .validate()
            .map_err(|e| LoadError::validation(None, "params".into(), e.to_string()))?;
        if let Arithmetic::Approx { epsilon } = &raw.arithmetic {
            if !epsilon.is_positive() {
                return Err(LoadError::validation(None, "arithmetic.epsilon".into(), "epsilon must be positive".into()));
            }
        }
        let protocol = parse_protocol(&raw.protocol)?;
        let kind: AdversaryKind = raw
            .adversary
            .name
            .parse()
            .map_err(|e: String| LoadError::validation(None, "adversary.name".into(), e))?;
        if let Some(d) = &raw.adversary.delta_relay {
            if d != &raw.params.delta_relay {
                return Err(LoadError::validation(
                    None,
                    "adversary.delta_relay".into(),
                    format!("{d} differs from params.delta_relay = {}", raw.params.delta_relay),
                ));
            }
        }

        let mut lines: BTreeMap<NodeId, usize> = BTreeMap::new();
        let mut builder = Setting::builder().arithmetic(raw.arithmetic.clone());
        for (i, node) in raw.nodes.iter().enumerate() {
            let span = node.span();
            let node = node.get_ref();
            let id = NodeId::from(node.id.clone());
            if lines.insert(id.clone(), line_of(text, &span)).is_some() {
                return Err(at(span, format!("nodes[{i}].id"), format!("duplicate node `{id}`")));
            }
            builder = builder.node(id, Point::new(node.x.clone(), node.y.clone()), node.kind);
        }
        for (i, link) in raw.links.iter().enumerate() {
            let span = link.span();
            let link = link.get_ref();
            for (field, id) in [("from", &link.from), ("to", &link.to)] {
                if !lines.contains_key(&NodeId::from(id.as_str())) {
                    return Err(at(span, format!("links[{i}].{field}"), format!("unknown node `{id}`")));
                }
            }
            if link.from == link.to {
                return Err(at(span, format!("links[{i}]"), "self-links are implicit".into()));
            }
            let intervals = link.up.iter().map(|(a, b)| Interval::new(a.clone(), b.0.clone())).collect();
            let schedule = LinkSchedule::from_intervals(intervals).map_err(|e| at(span.clone(), format!("links[{i}].up"), e))?;
            builder = if link.both {
                builder.link_both(link.from.as_str(), link.to.as_str(), schedule)
            } else {
                builder.link(link.from.as_str(), link.to.as_str(), schedule)
            };
        }
        let setting = builder.build().map_err(|e| {
            let line = match &e {
                ModelError::SharedLocation(_, b) | ModelError::IrrationalDistance { b, .. } => lines.get(b).copied(),
                _ => None,
            };
            LoadError::validation(line, "nodes".into(), e.to_string())
        })?;
        if let Some(a) = &raw.attack {
            if let Some(d) = &a.d_ab {
                if !d.is_positive() {
                    return Err(LoadError::validation(None, "attack.d_ab".into(), "must be positive".into()));
                }
            }
        }

        Ok(Scenario {
            adversary: AdversaryModel::new(kind, raw.params.delta_relay.clone()),
            params: raw.params,
            setting,
            protocol,
            horizon: raw.horizon,
            attack: raw.attack,
        })
    }

    pub fn to_toml(&self) -> String {
        let (delta, tau) = match &self.protocol {
            ProtocolSpec::PgtApprox(i) => (Some(i.delta.clone()), Some(i.tau.clone())),
            _ => (None, None),
        };
        let nodes = self
            .setting
            .nodes()
            .map(|id| {
                let info = self.setting.node_info(id).expect("listed node");
                RawNode { id: id.0.clone(), x: info.loc.x.clone(), y: info.loc.y.clone(), kind: info.kind }
            })
            .collect();
        let links = self
            .setting
            .links()
            .map(|((from, to), s)| RawLink {
                from: from.0.clone(),
                to: to.0.clone(),
                both: false,
                up: s.intervals().iter().map(|iv| (iv.start.clone(), End(iv.end.clone()))).collect(),
            })
            .collect();
        let raw: RawScenario<RawNode, RawLink> = RawScenario {
            horizon: self.horizon.clone(),
            arithmetic: self.setting.arithmetic().clone(),
            params: self.params.clone(),
            protocol: RawProtocol { name: self.protocol.name().into(), delta, tau },
            adversary: RawAdversary { name: self.adversary.kind.name().into(), delta_relay: None },
            nodes,
            links,
            attack: self.attack.clone(),
        };
        toml::to_string(&raw).expect("scenario serializes")
    }

    /// The same scenario with a different arithmetic mode.
    pub fn with_arithmetic(&self, arithmetic: Arithmetic) -> Result<Scenario, ModelError> {
        let mut builder = Setting::builder().arithmetic(arithmetic);
        for id in self.setting.nodes() {
            let info = self.setting.node_info(id).expect("listed node");
            builder = builder.node(id.clone(), info.loc.clone(), info.kind);
        }
        for ((from, to), s) in self.setting.links() {
            builder = builder.link(from.clone(), to.clone(), s.clone());
        }
        Ok(Scenario { setting: builder.build()?, ..self.clone() })
    }
}

fn parse_protocol(raw: &RawProtocol) -> Result<ProtocolSpec, LoadError> {
    let field = |f: &str| format!("protocol.{f}");
    let spec = match raw.name.as_str() {
        "naive" => ProtocolSpec::Naive,
        "pt" => ProtocolSpec::Pt,
        "pgt" => ProtocolSpec::Pgt,
        "pgt-approx" => {
            let get = |v: &Option<Scalar>, name: &str| {
                v.clone().ok_or_else(|| {
                    LoadError::validation(None, field(name), "required for pgt-approx".into())
                })
            };
            let inacc = InaccuracyParams::new(get(&raw.delta, "delta")?, get(&raw.tau, "tau")?)
                .map_err(|e| LoadError::validation(None, field("delta"), e.to_string()))?;
            return Ok(ProtocolSpec::PgtApprox(inacc));
        }
        other => {
            return Err(LoadError::validation(
                None,
                field("name"),
                format!("unknown protocol `{other}` (expected naive, pt, pgt or pgt-approx)"),
            ))
        }
    };
    if raw.delta.is_some() || raw.tau.is_some() {
        return Err(LoadError::validation(None, field("delta"), "only pgt-approx takes delta and tau".into()));
    }
    Ok(spec)
}
