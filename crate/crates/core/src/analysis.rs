//! Closed-form security boundaries and parameter sweeps that set them
//! against constructive attack synthesis.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::adversary::AdversaryKind;
use crate::attack::{attack_succeeds, AttackError, AttackRequest, Variant};
use crate::params::{InaccuracyParams, ParamsError, SystemParams};
use crate::protocol::ProtocolSpec;
use crate::scalar::{Scalar, ScalarParseError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundaryReport {
    /// R / v: minimum relay delay that defeats the temporal leash.
    pub pt_threshold: Scalar,
    /// Largest A-B distance one relay can fake, R - v*Δ_relay, at least 0.
    pub single_relay_max_dist: Scalar,
    /// (v_adv / v) * single_relay_max_dist.
    pub wormhole_max_dist: Scalar,
    /// R + v*δ, the range the temporal leash must accept under clock error.
    pub pt_effective_range: Scalar,
    /// 2(δ + τ)
    pub pgt_threshold: Scalar,
    /// Δ_relay < 2(δ + τ)
    pub pgt_vulnerable: bool,
}

pub fn compute_boundaries(params: &SystemParams, inacc: &InaccuracyParams) -> BoundaryReport {
    let reach = (&params.nd_range - &(&params.v * &params.delta_relay)).max(Scalar::zero());
    let pgt_threshold = Scalar::from_int(2) * inacc.tolerance();
    BoundaryReport {
        pt_threshold: params.range_time(),
        wormhole_max_dist: &params.v_adv / &params.v * reach.clone(),
        single_relay_max_dist: reach,
        pt_effective_range: &params.nd_range + &(&params.v * &inacc.delta),
        pgt_vulnerable: params.delta_relay < pgt_threshold,
        pgt_threshold,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    DeltaRelay,
    /// v_adv / v
    VAdvRatio,
    NdRange,
    V,
    Delta,
    Tau,
}

impl SweepParam {
    pub const ALL: [SweepParam; 6] =
        [SweepParam::DeltaRelay, SweepParam::VAdvRatio, SweepParam::NdRange, SweepParam::V, SweepParam::Delta, SweepParam::Tau];

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::DeltaRelay => "delta_relay",
            SweepParam::VAdvRatio => "v_adv_ratio",
            SweepParam::NdRange => "nd_range",
            SweepParam::V => "v",
            SweepParam::Delta => "delta",
            SweepParam::Tau => "tau",
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SweepError {
    #[error("bad range `{spec}`: {reason}")]
    BadRange { spec: String, reason: String },
    #[error("row {row}: {source}")]
    InvalidRow { row: usize, source: ParamsError },
    #[error(transparent)]
    Attack(#[from] AttackError),
}

/// `start..=end` in increments of `step`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRange {
    pub param: SweepParam,
    pub start: Scalar,
    pub end: Scalar,
    pub step: Scalar,
}

impl SweepRange {
    pub fn new(param: SweepParam, start: Scalar, end: Scalar, step: Scalar) -> Result<Self, SweepError> {
        let spec = format!("{param}={start}:{end}:{step}");
        if !step.is_positive() {
            return Err(SweepError::BadRange { spec, reason: "step must be positive".into() });
        }
        if start > end {
            return Err(SweepError::BadRange { spec, reason: "start exceeds end".into() });
        }
        Ok(SweepRange { param, start, end, step })
    }

    pub fn values(&self) -> Vec<Scalar> {
        let n = ((&self.end - &self.start) / self.step.clone()).floor();
        let count = n.to_f64() as i64 + 1;
        (0..count).map(|i| &self.start + &(Scalar::from_int(i) * self.step.clone())).collect()
    }
}

impl FromStr for SweepRange {
    type Err = SweepError;

    /// `name=start:end:step`, or `name=value` for a single point.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |reason: String| SweepError::BadRange { spec: s.to_owned(), reason };
        let (name, rest) = s.split_once('=').ok_or_else(|| bad("expected name=start:end:step".into()))?;
        let param = SweepParam::ALL
            .into_iter()
            .find(|p| p.name() == name.trim())
            .ok_or_else(|| bad(format!("unknown parameter `{name}`")))?;
        let parts: Vec<&str> = rest.split(':').collect();
        let num = |x: &str| x.trim().parse::<Scalar>().map_err(|e: ScalarParseError| bad(e.to_string()));
        match parts.as_slice() {
            [v] => SweepRange::new(param, num(v)?, num(v)?, Scalar::one()),
            [a, b, st] => SweepRange::new(param, num(a)?, num(b)?, num(st)?),
            _ => Err(bad("expected name=start:end:step".into())),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub params: SystemParams,
    pub inacc: InaccuracyParams,
    pub protocol: ProtocolSpec,
    pub variant: Variant,
    pub adversary: AdversaryKind,
    pub ranges: Vec<SweepRange>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    pub values: Vec<(SweepParam, Scalar)>,
    pub boundaries: BoundaryReport,
    /// Vulnerability predicted by the closed-form bounds.
    pub predicted: bool,
    /// Attack synthesized and confirmed on the canonical layout.
    pub attack: bool,
}

fn apply(
    params: &SystemParams,
    inacc: &InaccuracyParams,
    values: &[(SweepParam, Scalar)],
) -> (SystemParams, InaccuracyParams) {
    let mut p = params.clone();
    let mut i = inacc.clone();
    let ratio = &params.v_adv / &params.v;
    let mut new_ratio = None;
    for (param, x) in values {
        match param {
            SweepParam::DeltaRelay => p.delta_relay = x.clone(),
            SweepParam::VAdvRatio => new_ratio = Some(x.clone()),
            SweepParam::NdRange => p.nd_range = x.clone(),
            SweepParam::V => p.v = x.clone(),
            SweepParam::Delta => i.delta = x.clone(),
            SweepParam::Tau => i.tau = x.clone(),
        }
    }
    p.v_adv = &p.v * &new_ratio.unwrap_or(ratio);
    (p, i)
}

fn predicted(protocol: &ProtocolSpec, b: &BoundaryReport, params: &SystemParams) -> bool {
    let reachable = b.single_relay_max_dist.is_positive();
    match protocol {
        ProtocolSpec::Naive | ProtocolSpec::Pt => reachable,
        ProtocolSpec::Pgt => reachable && params.delta_relay.is_zero(),
        ProtocolSpec::PgtApprox(_) => reachable && b.pgt_vulnerable,
    }
}

/// Evaluate every point of the cartesian product of `ranges`, first range
/// varying slowest. Rows are computed in parallel and returned in order.
/// Each row attempts the canonical attack with d_ab = R.
pub fn sweep(config: &SweepConfig) -> Result<Vec<SweepRow>, SweepError> {
    if config.ranges.is_empty() {
        return Ok(Vec::new());
    }
    let mut points: Vec<Vec<(SweepParam, Scalar)>> = vec![Vec::new()];
    for r in &config.ranges {
        let vals = r.values();
        points = points
            .into_iter()
            .flat_map(|prefix| {
                vals.iter().map(move |x| {
                    let mut p = prefix.clone();
                    p.push((r.param, x.clone()));
                    p
                })
            })
            .collect();
    }
    points
        .into_par_iter()
        .enumerate()
        .map(|(row, values)| {
            let (params, inacc) = apply(&config.params, &config.inacc, &values);
            params.validate().map_err(|source| SweepError::InvalidRow { row, source })?;
            let protocol = match &config.protocol {
                ProtocolSpec::PgtApprox(_) => ProtocolSpec::PgtApprox(inacc.clone()),
                other => other.clone(),
            };
            let boundaries = compute_boundaries(&params, &inacc);
            let request = AttackRequest {
                variant: config.variant,
                d_ab: params.nd_range.clone(),
                placement: None,
                target: None,
                protocol: protocol.clone(),
                adversary: config.adversary,
            };
            Ok(SweepRow {
                predicted: predicted(&protocol, &boundaries, &params),
                attack: attack_succeeds(&request, &params)?,
                boundaries,
                values,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: i64) -> Scalar {
        Scalar::from_int(x)
    }

    fn wifi() -> SystemParams {
        // metres and nanoseconds
        SystemParams::new(Scalar::ratio(3, 10), Scalar::ratio(3, 10), s(100), s(40), s(1)).unwrap()
    }

    #[test]
    fn boundaries_for_short_range_radio() {
        let b = compute_boundaries(&wifi(), &InaccuracyParams::exact());
        assert_eq!(b.pt_threshold, Scalar::ratio(1000, 3));
        assert_eq!(b.single_relay_max_dist, s(88));
        assert_eq!(b.wormhole_max_dist, s(88));
        assert!(!b.pgt_vulnerable);
    }

    #[test]
    fn reach_clamps_at_zero() {
        let p = wifi().with_delta_relay(s(1000));
        let b = compute_boundaries(&p, &InaccuracyParams::exact());
        assert_eq!(b.single_relay_max_dist, s(0));
        assert_eq!(b.wormhole_max_dist, s(0));
    }

    #[test]
    fn effective_range_grows_with_clock_error() {
        let inacc = InaccuracyParams::new(s(10), s(0)).unwrap();
        assert_eq!(compute_boundaries(&wifi(), &inacc).pt_effective_range, s(103));
    }

    #[test]
    fn range_syntax() {
        let r: SweepRange = "delta_relay=0:400:10".parse().unwrap();
        assert_eq!(r.values().len(), 41);
        assert_eq!("tau=1/2".parse::<SweepRange>().unwrap().values(), vec![Scalar::ratio(1, 2)]);
        assert!("delta_relay=10:0:1".parse::<SweepRange>().is_err());
        assert!("delta_relay=0:10:0".parse::<SweepRange>().is_err());
        assert!("speed=0:1:1".parse::<SweepRange>().is_err());
    }

    #[test]
    fn empty_sweep_is_empty() {
        let cfg = SweepConfig {
            params: wifi(),
            inacc: InaccuracyParams::exact(),
            protocol: ProtocolSpec::Pt,
            variant: Variant::SingleRelay,
            adversary: AdversaryKind::Relay,
            ranges: Vec::new(),
        };
        assert!(sweep(&cfg).unwrap().is_empty());
    }

    #[test]
    fn flip_at_range_time() {
        let cfg = SweepConfig {
            params: wifi(),
            inacc: InaccuracyParams::exact(),
            protocol: ProtocolSpec::Pt,
            variant: Variant::SingleRelay,
            adversary: AdversaryKind::Relay,
            ranges: vec!["delta_relay=0:400:10".parse().unwrap()],
        };
        let rows = sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 41);
        let first_safe = rows.iter().position(|r| !r.attack).unwrap();
        assert_eq!(rows[first_safe].values[0].1, s(340));
        assert!(rows.iter().all(|r| r.attack == r.predicted));
    }
}
