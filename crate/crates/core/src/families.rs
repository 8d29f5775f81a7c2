//! Named prior sequences `P_n → P` together with their channel and cost.
//!
//! Each family comes with closed forms for `J*(P_n)`, `J*(P)` and the
//! mismatch `J(P, Q, γ*_{P_n})`, derived by hand; they are what the
//! reproduction driver compares the numerical pipeline against.

use std::fmt;
use std::str::FromStr;

use crate::channels::{Channel, ChannelKind, Quantizer};
use crate::error::{Error, Result};
use crate::measures::{Interval, MixedMeasure};
use crate::single_stage::CostFunction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// `P = ½δ0 + ½δ1`, `P_n = ½δ_{1/n} + ½δ1`, half identity, half erasure to 0.
    ErasurePair,
    /// `P = ½δ_{1/2} + ½δ1`, `P_n = ½δ_{1/2-1/n} + ½δ1`, cells `[0,½)`, `[½,1]`.
    QuantizerPair,
    /// `P = U[0,1]`, `P_n` the square wave with density 2 on every other
    /// cell of width `1/(2n)`, half identity, half uniform noise.
    SetwiseSquareWave,
    /// `P = δ0`, `P_n = (½ - 1/n)δ_{±1/n} + (1/(2n))δ_{±a_n} + (1/n)δ0`,
    /// uniform noise independent of the state. The atom at 0 carries the
    /// mass the four outer atoms leave over.
    Noninformative,
}

/// Qualitative outcome along a family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub continuity_holds: bool,
    pub robustness_holds: bool,
}

impl Verdict {
    pub fn label(&self) -> String {
        let word = |b: bool| if b { "holds" } else { "fails" };
        format!("continuity {}; robustness {}", word(self.continuity_holds), word(self.robustness_holds))
    }
}

/// One member of a family together with its limit.
#[derive(Clone, Debug)]
pub struct Instance {
    pub n: usize,
    pub p_n: MixedMeasure,
    pub p: MixedMeasure,
    pub channel: Channel,
    pub cost: CostFunction,
}

pub const ALL: [Family; 4] = [
    Family::ErasurePair,
    Family::QuantizerPair,
    Family::SetwiseSquareWave,
    Family::Noninformative,
];

impl Family {
    pub fn id(&self) -> &'static str {
        match self {
            Family::ErasurePair => "erasure_pair",
            Family::QuantizerPair => "quantizer_pair",
            Family::SetwiseSquareWave => "setwise_squarewave",
            Family::Noninformative => "noninformative",
        }
    }

    /// Smallest admissible `n`.
    pub fn min_n(&self) -> usize {
        match self {
            Family::SetwiseSquareWave => 1,
            _ => 2,
        }
    }

    pub fn verdict(&self) -> Verdict {
        match self {
            Family::ErasurePair | Family::QuantizerPair | Family::SetwiseSquareWave => Verdict {
                continuity_holds: false,
                robustness_holds: false,
            },
            // the mismatched policy is still 0, which is optimal for δ0
            Family::Noninformative => Verdict {
                continuity_holds: false,
                robustness_holds: true,
            },
        }
    }

    fn domain(&self, n: usize) -> Interval {
        match self {
            Family::Noninformative => {
                let r = (n as f64).sqrt() + 1.0;
                Interval { lo: -r, hi: r }
            }
            _ => Interval::unit(),
        }
    }

    pub fn instance(&self, n: usize) -> Result<Instance> {
        if n < self.min_n() {
            return Err(Error::Argument(format!("{} needs n ≥ {}, got {n}", self.id(), self.min_n())));
        }
        let nf = n as f64;
        let d = self.domain(n);
        let (p_n, p, channel) = match self {
            Family::ErasurePair => (
                MixedMeasure::discrete(d, &[(1.0 / nf, 0.5), (1.0, 0.5)])?,
                MixedMeasure::discrete(d, &[(0.0, 0.5), (1.0, 0.5)])?,
                Channel::mixture(d, 0.5, ChannelKind::Identity, ChannelKind::Constant(0.0))?,
            ),
            Family::QuantizerPair => (
                MixedMeasure::discrete(d, &[(0.5 - 1.0 / nf, 0.5), (1.0, 0.5)])?,
                MixedMeasure::discrete(d, &[(0.5, 0.5), (1.0, 0.5)])?,
                Channel::pure(d, ChannelKind::Quantizer(Quantizer::new(vec![0.0, 0.5, 1.0])?))?,
            ),
            Family::SetwiseSquareWave => (
                square_wave(n)?,
                MixedMeasure::uniform(d, 0.0, 1.0)?,
                Channel::mixture(d, 0.5, ChannelKind::Identity, ChannelKind::UniformNoise { lo: 0.0, hi: 1.0 })?,
            ),
            Family::Noninformative => {
                let a = noninformative_outer(n);
                let near = 0.5 - 1.0 / nf;
                let far = 0.5 / nf;
                (
                    MixedMeasure::discrete(d, &[(-a, far), (-1.0 / nf, near), (0.0, 1.0 / nf), (1.0 / nf, near), (a, far)])?,
                    MixedMeasure::dirac(d, 0.0)?,
                    Channel::pure(d, ChannelKind::UniformNoise { lo: 0.0, hi: 1.0 })?,
                )
            }
        };
        let cost = CostFunction::quadratic(d, d)?;
        Ok(Instance { n, p_n, p, channel, cost })
    }

    /// `J*(P_n, Q)` in closed form.
    pub fn optimal_cost_n(&self, n: usize) -> f64 {
        let nf = n as f64;
        match self {
            Family::ErasurePair => (nf - 1.0).powi(2) / (8.0 * nf * nf),
            Family::QuantizerPair => 0.0,
            Family::SetwiseSquareWave => 1.0 / 18.0 - 1.0 / (24.0 * nf * nf),
            Family::Noninformative => 1.0 - 4.0 / nf.powi(3),
        }
    }

    /// `J*(P, Q)` in closed form.
    pub fn optimal_cost_limit(&self) -> f64 {
        match self {
            Family::ErasurePair => 1.0 / 6.0,
            Family::QuantizerPair => 1.0 / 16.0,
            Family::SetwiseSquareWave => 1.0 / 16.0,
            Family::Noninformative => 0.0,
        }
    }

    /// `J(P, Q, γ*_{P_n})` in closed form.
    pub fn mismatch_cost(&self, n: usize) -> f64 {
        let nf = n as f64;
        match self {
            Family::ErasurePair => (3.0 * nf * nf + 2.0 * nf + 3.0) / (16.0 * nf * nf),
            Family::QuantizerPair => 1.0 / 8.0,
            Family::SetwiseSquareWave => 2.0 / 27.0 + 5.0 / (72.0 * nf * nf),
            Family::Noninformative => 0.0,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ALL.iter()
            .copied()
            .find(|f| f.id() == s)
            .ok_or_else(|| Error::Argument(format!("unknown family `{s}`")))
    }
}

/// Density 2 on `[2k/(2n), (2k+1)/(2n))`, `k = 0, …, n-1`, zero elsewhere in `[0, 1]`.
pub fn square_wave(n: usize) -> Result<MixedMeasure> {
    let w = 1.0 / (2 * n) as f64;
    let steps: Vec<(f64, f64, f64)> = (0..n).map(|k| (2.0 * k as f64 * w, (2 * k + 1) as f64 * w, 2.0)).collect();
    MixedMeasure::piecewise_constant(Interval::unit(), &steps)
}

/// `a_n = sqrt(n - 1/n - 2/n²)`, which makes `E_{P_n} X² = 1 - 4/n³`.
pub fn noninformative_outer(n: usize) -> f64 {
    let nf = n as f64;
    (nf - 1.0 / nf - 2.0 / (nf * nf)).sqrt()
}
