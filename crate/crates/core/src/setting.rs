//! Static world description: node placement, node types and link schedules.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{in_sector, Angle, Point};
use crate::node::{NodeId, NodeKind};
use crate::params::SystemParams;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown node `{0}`")]
    UnknownNode(NodeId),
    #[error("duplicate node `{0}`")]
    DuplicateNode(NodeId),
    #[error("nodes `{0}` and `{1}` share location")]
    SharedLocation(NodeId, NodeId),
    #[error("distance between `{a}` and `{b}` is irrational (squared distance {squared})")]
    IrrationalDistance { a: NodeId, b: NodeId, squared: Scalar },
    #[error("invalid link interval for {from}->{to}: {reason}")]
    BadInterval { from: NodeId, to: NodeId, reason: String },
    #[error("link {0}->{0} is implicit and cannot be scheduled")]
    SelfLink(NodeId),
}

/// Half-open interval `[start, end)`; `end = None` means unbounded.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    pub start: Scalar,
    pub end: Option<Scalar>,
}

impl Interval {
    pub fn new(start: Scalar, end: Option<Scalar>) -> Self {
        Interval { start, end }
    }

    pub fn from(start: Scalar) -> Self {
        Interval { start, end: None }
    }

    fn contains_closed(&self, lo: &Scalar, hi: &Scalar) -> bool {
        &self.start <= lo && self.end.as_ref().is_none_or(|e| hi < e)
    }
}

/// Up-intervals of one directed link, normalized to sorted, disjoint,
/// non-adjacent intervals.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct LinkSchedule {
    intervals: Vec<Interval>,
}

impl LinkSchedule {
    pub fn always() -> Self {
        LinkSchedule { intervals: vec![Interval::from(Scalar::zero())] }
    }

    pub fn never() -> Self {
        LinkSchedule::default()
    }

    pub fn from_intervals(mut intervals: Vec<Interval>) -> Result<Self, String> {
        for iv in &intervals {
            if iv.start.is_negative() {
                return Err(format!("interval starts before 0: {}", iv.start));
            }
            if let Some(end) = &iv.end {
                if end <= &iv.start {
                    return Err(format!("empty interval [{}, {})", iv.start, end));
                }
            }
        }
        intervals.sort();
        let mut merged: Vec<Interval> = Vec::with_capacity(intervals.len());
        for iv in intervals {
            if let Some(last) = merged.last_mut() {
                let touches = last.end.as_ref().is_none_or(|e| iv.start <= *e);
                if touches {
                    last.end = match (&last.end, &iv.end) {
                        (None, _) | (_, None) => None,
                        (Some(a), Some(b)) => Some(a.clone().max(b.clone())),
                    };
                    continue;
                }
            }
            merged.push(iv);
        }
        Ok(LinkSchedule { intervals: merged })
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    /// Up at every point of the closed interval `[lo, hi]`.
    pub fn up_over(&self, lo: &Scalar, hi: &Scalar) -> bool {
        self.intervals.iter().any(|iv| iv.contains_closed(lo, hi))
    }

    pub fn up_at(&self, t: &Scalar) -> bool {
        self.up_over(t, t)
    }

    pub fn is_never(&self) -> bool {
        self.intervals.is_empty()
    }
}

/// How distances that are not rational are handled.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Arithmetic {
    /// All pairwise distances must be rational; time matching is exact.
    #[default]
    Exact,
    /// Irrational distances are approximated and time matching allows
    /// `epsilon` slack.
    Approx { epsilon: Scalar },
}

impl Arithmetic {
    pub fn epsilon(&self) -> Scalar {
        match self {
            Arithmetic::Exact => Scalar::zero(),
            Arithmetic::Approx { epsilon } => epsilon.clone(),
        }
    }

    pub fn same(&self, a: &Scalar, b: &Scalar) -> bool {
        match self {
            Arithmetic::Exact => a == b,
            Arithmetic::Approx { epsilon } => (a - b).abs() <= *epsilon,
        }
    }

    /// `a <= b` up to the slack.
    pub fn le(&self, a: &Scalar, b: &Scalar) -> bool {
        match self {
            Arithmetic::Exact => a <= b,
            Arithmetic::Approx { epsilon } => a <= &(b + epsilon),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeInfo {
    pub loc: Point,
    pub kind: NodeKind,
}

/// A setting: nodes with fixed locations and types, plus a link schedule
/// for every ordered pair. Unlisted links are always down; self-links are
/// always up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Setting {
    nodes: BTreeMap<NodeId, NodeInfo>,
    links: BTreeMap<(NodeId, NodeId), LinkSchedule>,
    arithmetic: Arithmetic,
    distances: BTreeMap<(NodeId, NodeId), Scalar>,
}

#[derive(Debug, Default)]
pub struct SettingBuilder {
    nodes: Vec<(NodeId, Point, NodeKind)>,
    links: Vec<(NodeId, NodeId, LinkSchedule)>,
    arithmetic: Arithmetic,
}

impl SettingBuilder {
    pub fn node(mut self, id: impl Into<NodeId>, loc: Point, kind: NodeKind) -> Self {
        self.nodes.push((id.into(), loc, kind));
        self
    }

    pub fn link(mut self, from: impl Into<NodeId>, to: impl Into<NodeId>, s: LinkSchedule) -> Self {
        self.links.push((from.into(), to.into(), s));
        self
    }

    /// Same schedule in both directions.
    pub fn link_both(self, a: impl Into<NodeId>, b: impl Into<NodeId>, s: LinkSchedule) -> Self {
        let (a, b) = (a.into(), b.into());
        self.link(a.clone(), b.clone(), s.clone()).link(b, a, s)
    }

    pub fn arithmetic(mut self, a: Arithmetic) -> Self {
        self.arithmetic = a;
        self
    }

    pub fn build(self) -> Result<Setting, ModelError> {
        let mut nodes = BTreeMap::new();
        for (id, loc, kind) in self.nodes {
            if nodes.insert(id.clone(), NodeInfo { loc, kind }).is_some() {
                return Err(ModelError::DuplicateNode(id));
            }
        }
        let mut links = BTreeMap::new();
        for (from, to, s) in self.links {
            for n in [&from, &to] {
                if !nodes.contains_key(n) {
                    return Err(ModelError::UnknownNode(n.clone()));
                }
            }
            if from == to {
                return Err(ModelError::SelfLink(from));
            }
            let merged = match links.remove(&(from.clone(), to.clone())) {
                Some(prev) => {
                    let prev: LinkSchedule = prev;
                    let mut all = prev.intervals;
                    all.extend(s.intervals);
                    LinkSchedule::from_intervals(all).map_err(|reason| ModelError::BadInterval {
                        from: from.clone(),
                        to: to.clone(),
                        reason,
                    })?
                }
                None => s,
            };
            links.insert((from, to), merged);
        }
        let ids: Vec<&NodeId> = nodes.keys().collect();
        let mut distances = BTreeMap::new();
        for (i, a) in ids.iter().enumerate() {
            distances.insert(((*a).clone(), (*a).clone()), Scalar::zero());
            for b in &ids[i + 1..] {
                let sq = nodes[*a].loc.dist_sq(&nodes[*b].loc);
                if sq.is_zero() {
                    return Err(ModelError::SharedLocation((*a).clone(), (*b).clone()));
                }
                let d = match &self.arithmetic {
                    Arithmetic::Exact => sq.sqrt_exact().ok_or_else(|| ModelError::IrrationalDistance {
                        a: (*a).clone(),
                        b: (*b).clone(),
                        squared: sq.clone(),
                    })?,
                    Arithmetic::Approx { epsilon } => sq.sqrt_approx(epsilon),
                };
                distances.insert(((*a).clone(), (*b).clone()), d.clone());
                distances.insert(((*b).clone(), (*a).clone()), d);
            }
        }
        Ok(Setting { nodes, links, arithmetic: self.arithmetic, distances })
    }
}

impl Setting {
    pub fn builder() -> SettingBuilder {
        SettingBuilder::default()
    }

    pub fn nodes(&self) -> impl Iterator<Item = &NodeId> + '_ {
        self.nodes.keys()
    }

    pub fn node_info(&self, id: &NodeId) -> Option<&NodeInfo> {
        self.nodes.get(id)
    }

    pub fn contains(&self, id: &NodeId) -> bool {
        self.nodes.contains_key(id)
    }

    pub fn loc(&self, id: &NodeId) -> Result<&Point, ModelError> {
        self.nodes.get(id).map(|n| &n.loc).ok_or_else(|| ModelError::UnknownNode(id.clone()))
    }

    pub fn kind(&self, id: &NodeId) -> Option<NodeKind> {
        self.nodes.get(id).map(|n| n.kind)
    }

    pub fn is_correct(&self, id: &NodeId) -> bool {
        self.kind(id) == Some(NodeKind::Correct)
    }

    pub fn is_adversarial(&self, id: &NodeId) -> bool {
        self.kind(id) == Some(NodeKind::Adversarial)
    }

    pub fn correct_nodes(&self) -> BTreeSet<NodeId> {
        self.nodes.iter().filter(|(_, n)| n.kind == NodeKind::Correct).map(|(k, _)| k.clone()).collect()
    }

    pub fn adversarial_nodes(&self) -> BTreeSet<NodeId> {
        self.nodes
            .iter()
            .filter(|(_, n)| n.kind == NodeKind::Adversarial)
            .map(|(k, _)| k.clone())
            .collect()
    }

    pub fn arithmetic(&self) -> &Arithmetic {
        &self.arithmetic
    }

    /// Explicitly scheduled links (self-links are implicit).
    pub fn links(&self) -> impl Iterator<Item = (&(NodeId, NodeId), &LinkSchedule)> + '_ {
        self.links.iter()
    }

    /// Euclidean distance between two nodes.
    pub fn dist(&self, a: &NodeId, b: &NodeId) -> Result<Scalar, ModelError> {
        for n in [a, b] {
            if !self.nodes.contains_key(n) {
                return Err(ModelError::UnknownNode(n.clone()));
            }
        }
        Ok(self.distances[&(a.clone(), b.clone())].clone())
    }

    /// dist(a, b) / v
    pub fn time_of_flight(&self, params: &SystemParams, a: &NodeId, b: &NodeId) -> Result<Scalar, ModelError> {
        Ok(self.dist(a, b)? / params.v.clone())
    }

    /// Link `from -> to` up over the whole closed interval `[lo, hi]`.
    pub fn link_up(&self, from: &NodeId, to: &NodeId, lo: &Scalar, hi: &Scalar) -> bool {
        if from == to {
            return self.nodes.contains_key(from);
        }
        self.links.get(&(from.clone(), to.clone())).is_some_and(|s| s.up_over(lo, hi))
    }

    pub fn link_up_at(&self, from: &NodeId, to: &NodeId, t: &Scalar) -> bool {
        self.link_up(from, to, t, t)
    }

    pub fn schedule(&self, from: &NodeId, to: &NodeId) -> LinkSchedule {
        if from == to {
            return LinkSchedule::always();
        }
        self.links.get(&(from.clone(), to.clone())).cloned().unwrap_or_default()
    }

    /// Whether `target` lies in the sector `(alpha, beta)` seen from `apex`.
    pub fn inrange(&self, apex: &NodeId, alpha: &Angle, beta: &Angle, target: &NodeId) -> Result<bool, ModelError> {
        Ok(in_sector(self.loc(apex)?, alpha, beta, self.loc(target)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: i64) -> Scalar {
        Scalar::from_int(x)
    }

    fn two_nodes(b: Point) -> Result<Setting, ModelError> {
        Setting::builder()
            .node("A", Point::origin(), NodeKind::Correct)
            .node("B", b, NodeKind::Correct)
            .link("A", "B", LinkSchedule::from_intervals(vec![Interval::new(s(0), Some(s(10)))]).unwrap())
            .build()
    }

    #[test]
    fn distance_examples() {
        let st = two_nodes(Point::from_ints(3, 4)).unwrap();
        let (a, b) = (NodeId::from("A"), NodeId::from("B"));
        assert_eq!(st.dist(&a, &b).unwrap(), s(5));
        assert_eq!(st.dist(&b, &a).unwrap(), s(5));
        assert_eq!(st.dist(&a, &a).unwrap(), s(0));
        let st = two_nodes(Point::from_ints(8, 0)).unwrap();
        assert_eq!(st.dist(&a, &b).unwrap(), s(8));
        assert_eq!(st.dist(&a, &b).unwrap().to_f64(), (64f64).sqrt());
    }

    #[test]
    fn irrational_distance_rejected_in_exact_mode() {
        assert!(matches!(two_nodes(Point::from_ints(1, 1)), Err(ModelError::IrrationalDistance { .. })));
    }

    #[test]
    fn irrational_distance_approximated_in_approx_mode() {
        let st = Setting::builder()
            .node("A", Point::origin(), NodeKind::Correct)
            .node("B", Point::from_ints(1, 1), NodeKind::Correct)
            .arithmetic(Arithmetic::Approx { epsilon: Scalar::ratio(1, 1_000_000) })
            .build()
            .unwrap();
        let d = st.dist(&"A".into(), &"B".into()).unwrap();
        assert!((d.to_f64() - 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn shared_location_rejected() {
        assert!(matches!(two_nodes(Point::origin()), Err(ModelError::SharedLocation(..))));
    }

    #[test]
    fn unknown_node_distance() {
        let st = two_nodes(Point::from_ints(3, 4)).unwrap();
        assert!(matches!(st.dist(&"A".into(), &"Z".into()), Err(ModelError::UnknownNode(_))));
    }

    #[test]
    fn time_of_flight_examples() {
        let st = two_nodes(Point::from_ints(8, 0)).unwrap();
        let p = SystemParams::new(s(1), s(1), s(10), s(0), s(1)).unwrap();
        assert_eq!(st.time_of_flight(&p, &"A".into(), &"B".into()).unwrap(), s(8));
        // 100 m at c = 3e8 m/s: 1/3 microsecond.
        let st = two_nodes(Point::from_ints(100, 0)).unwrap();
        let c = s(300_000_000);
        let p = SystemParams::new(c.clone(), c, s(100), s(0), s(1)).unwrap();
        let tof = st.time_of_flight(&p, &"A".into(), &"B".into()).unwrap();
        assert_eq!(tof, Scalar::ratio(1, 3_000_000));
        assert!((tof.to_f64() * 1e9 - 333.333).abs() < 0.001);
        // 50 km: about 166 microseconds.
        let st = two_nodes(Point::from_ints(50_000, 0)).unwrap();
        let tof = st.time_of_flight(&p, &"A".into(), &"B".into()).unwrap();
        assert_eq!(tof, Scalar::ratio(1, 6_000));
        assert!((tof.to_f64() * 1e6 - 166.67).abs() < 0.01);
    }

    #[test]
    fn link_up_examples() {
        let st = two_nodes(Point::from_ints(8, 0)).unwrap();
        let (a, b) = (NodeId::from("A"), NodeId::from("B"));
        assert!(st.link_up(&a, &a, &s(0), &s(1_000_000)));
        assert!(st.link_up(&a, &b, &s(2), &s(5)));
        assert!(!st.link_up(&a, &b, &s(9), &s(11)));
        // half-open: 10 itself is down
        assert!(!st.link_up(&a, &b, &s(9), &s(10)));
        assert!(!st.link_up(&b, &a, &s(2), &s(5)));
    }

    #[test]
    fn adjacent_intervals_merge() {
        let sched = LinkSchedule::from_intervals(vec![
            Interval::new(s(5), Some(s(10))),
            Interval::new(s(0), Some(s(5))),
            Interval::new(s(20), None),
        ])
        .unwrap();
        assert_eq!(sched.intervals().len(), 2);
        assert!(sched.up_over(&s(4), &s(6)));
        assert!(!sched.up_over(&s(9), &s(21)));
        assert!(sched.up_at(&s(1000)));
    }

    #[test]
    fn empty_interval_rejected() {
        assert!(LinkSchedule::from_intervals(vec![Interval::new(s(3), Some(s(3)))]).is_err());
    }
}
