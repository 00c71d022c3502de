use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamsError {
    #[error("parameter `{name}` = {value} violates {rule}")]
    OutOfDomain { name: &'static str, value: Scalar, rule: &'static str },
}

/// Physical and protocol constants shared by every checker.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Signal propagation speed on the wireless channel.
    pub v: Scalar,
    /// Propagation speed of the adversary's private channel.
    pub v_adv: Scalar,
    /// Neighbor discovery range R.
    pub nd_range: Scalar,
    /// Minimum processing delay of an adversarial relay.
    pub delta_relay: Scalar,
    /// Duration used for beacons built by the protocols.
    pub msg_duration_default: Scalar,
}

impl SystemParams {
    pub fn new(
        v: Scalar,
        v_adv: Scalar,
        nd_range: Scalar,
        delta_relay: Scalar,
        msg_duration_default: Scalar,
    ) -> Result<Self, ParamsError> {
        let p = SystemParams { v, v_adv, nd_range, delta_relay, msg_duration_default };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ParamsError> {
        let err = |name, value: &Scalar, rule| {
            Err(ParamsError::OutOfDomain { name, value: value.clone(), rule })
        };
        if !self.v.is_positive() {
            return err("v", &self.v, "v > 0");
        }
        if self.v_adv < self.v {
            return err("v_adv", &self.v_adv, "v_adv >= v");
        }
        if !self.nd_range.is_positive() {
            return err("nd_range", &self.nd_range, "nd_range > 0");
        }
        if self.delta_relay.is_negative() {
            return err("delta_relay", &self.delta_relay, "delta_relay >= 0");
        }
        if !self.msg_duration_default.is_positive() {
            return err("msg_duration_default", &self.msg_duration_default, "duration > 0");
        }
        Ok(())
    }

    /// R / v, the freshness window of the temporal leash.
    pub fn range_time(&self) -> Scalar {
        &self.nd_range / &self.v
    }

    pub fn with_delta_relay(&self, delta_relay: Scalar) -> SystemParams {
        SystemParams { delta_relay, ..self.clone() }
    }
}

/// Bounds on time-measurement error (`delta`) and location error
/// (`tau`, expressed in time units: a distance error of at most `tau * v`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InaccuracyParams {
    pub delta: Scalar,
    pub tau: Scalar,
}

impl InaccuracyParams {
    pub fn new(delta: Scalar, tau: Scalar) -> Result<Self, ParamsError> {
        if delta.is_negative() {
            return Err(ParamsError::OutOfDomain { name: "delta", value: delta, rule: "delta >= 0" });
        }
        if tau.is_negative() {
            return Err(ParamsError::OutOfDomain { name: "tau", value: tau, rule: "tau >= 0" });
        }
        Ok(InaccuracyParams { delta, tau })
    }

    pub fn exact() -> Self {
        InaccuracyParams { delta: Scalar::zero(), tau: Scalar::zero() }
    }

    pub fn tolerance(&self) -> Scalar {
        &self.delta + &self.tau
    }

    pub fn is_exact(&self) -> bool {
        self.delta.is_zero() && self.tau.is_zero()
    }
}
