//! Baseline: nodes announce their identity and believe any announcement.

use std::collections::BTreeSet;

use super::{Action, ProtocolModel};
use crate::message::Message;
use crate::params::SystemParams;
use crate::view::{Cutoff, Flavor, LocalView};

pub fn naive_decide(view: &LocalView, params: &SystemParams) -> BTreeSet<Action> {
    let mut out = BTreeSet::from([Action::Epsilon]);
    if matches!(view.as_of, Cutoff::At(_)) {
        out.insert(Action::Bcast(Message::identity(&view.owner, params.msg_duration_default.clone())));
    }
    for (t1, msg) in view.receptions() {
        if let Some(node) = msg.claimed_identity() {
            out.insert(Action::Neighbor { node, declared_time: t1.clone() });
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct NaiveProtocol {
    params: SystemParams,
}

impl NaiveProtocol {
    pub fn new(params: SystemParams) -> Self {
        NaiveProtocol { params }
    }
}

impl ProtocolModel for NaiveProtocol {
    fn name(&self) -> &str {
        "naive"
    }

    fn flavor(&self) -> Flavor {
        Flavor::T
    }

    fn decide(&self, view: &LocalView) -> BTreeSet<Action> {
        naive_decide(view, &self.params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::node::NodeId;
    use crate::scalar::Scalar;
    use crate::view::LocalEvent;

    fn params() -> SystemParams {
        let one = Scalar::one();
        SystemParams::new(one.clone(), one.clone(), one.clone(), one.clone(), one).unwrap()
    }

    fn view(local: BTreeSet<LocalEvent>) -> LocalView {
        LocalView { flavor: Flavor::T, owner: "A".into(), as_of: Cutoff::At(Scalar::from_int(5)), owner_loc: None, local_trace: local }
    }

    #[test]
    fn empty_view_only_idles_or_announces() {
        let acts = naive_decide(&view(BTreeSet::new()), &params());
        assert_eq!(
            acts,
            BTreeSet::from([
                Action::Epsilon,
                Action::Bcast(Message::identity(&NodeId::from("A"), Scalar::one()))
            ])
        );
    }

    #[test]
    fn any_announcement_is_believed() {
        let m = Message::identity(&NodeId::from("Z"), Scalar::one());
        let acts = naive_decide(&view(BTreeSet::from([LocalEvent::Receive { start: Scalar::one(), msg: m }])), &params());
        assert!(acts.contains(&Action::Neighbor { node: "Z".into(), declared_time: Scalar::one() }));
    }
}
