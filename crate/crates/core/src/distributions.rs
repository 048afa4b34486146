//! Parametric generators used as ground truth in the simulation study.
//!
//! Each [`DistributionSpec`] pairs a family with the finite range used for
//! binning. Samples are drawn by rejection inside that range; the
//! theoretical functionals refer to the untruncated family.
//!
//! Text form: `family:p1,p2[,p3]@lo:hi`, for example `normal:3,1@0:10`,
//! `gamma:1,2@0:8` (shape, scale), `gev:1,2,0@-4:35` (location, scale,
//! shape; only shape 0 is supported) and `triangular:0,1,0.5@0:1`
//! (min, max, mode).

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Gumbel, Normal, Triangular};
use serde::{Deserialize, Serialize};
use statrs::distribution::ContinuousCDF;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Generator behind every seeded stream in the crate.
pub type SimRng = ChaCha8Rng;
pub const RNG_NAME: &str = "ChaCha8";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    Normal { mean: f64, sd: f64 },
    Gamma { shape: f64, scale: f64 },
    /// Generalized extreme value with shape 0.
    Gumbel { location: f64, scale: f64 },
    Triangular { min: f64, max: f64, mode: f64 },
}

/// Which functional [`DistributionSpec::theoretical`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Functional {
    Cdf(f64),
    Quantile(f64),
    Mean,
    Sd,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionSpec {
    family: Family,
    range: (f64, f64),
}

impl DistributionSpec {
    pub fn new(family: Family, range: (f64, f64)) -> Result<Self> {
        let (lo, hi) = range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidParameter(format!("range ({lo}, {hi}) must be finite and ordered")));
        }
        let ok = match family {
            Family::Normal { mean, sd } => mean.is_finite() && sd > 0.0 && sd.is_finite(),
            Family::Gamma { shape, scale } => shape > 0.0 && scale > 0.0 && shape.is_finite() && scale.is_finite(),
            Family::Gumbel { location, scale } => location.is_finite() && scale > 0.0 && scale.is_finite(),
            Family::Triangular { min, max, mode } => {
                min.is_finite() && max.is_finite() && min < max && (min..=max).contains(&mode)
            }
        };
        if !ok {
            return Err(Error::InvalidParameter(format!("parameters out of domain: {family:?}")));
        }
        let spec = Self { family, range };
        // the truncation window must carry probability mass
        if !(spec.cdf(hi) - spec.cdf(lo) > 0.0) {
            return Err(Error::InvalidParameter(format!("range ({lo}, {hi}) carries no mass")));
        }
        Ok(spec)
    }

    pub fn normal(mean: f64, sd: f64, range: (f64, f64)) -> Result<Self> {
        Self::new(Family::Normal { mean, sd }, range)
    }

    pub fn gamma(shape: f64, scale: f64, range: (f64, f64)) -> Result<Self> {
        Self::new(Family::Gamma { shape, scale }, range)
    }

    pub fn gumbel(location: f64, scale: f64, range: (f64, f64)) -> Result<Self> {
        Self::new(Family::Gumbel { location, scale }, range)
    }

    pub fn triangular(min: f64, max: f64, mode: f64, range: (f64, f64)) -> Result<Self> {
        Self::new(Family::Triangular { min, max, mode }, range)
    }

    /// The four study generators: N(3,1), G(1,2), GEV(1,2,0), T(0,1,0.5).
    pub fn study_defaults() -> Vec<Self> {
        vec![
            Self::normal(3.0, 1.0, (0.0, 10.0)).unwrap(),
            Self::gamma(1.0, 2.0, (0.0, 8.0)).unwrap(),
            Self::gumbel(1.0, 2.0, (-4.0, 35.0)).unwrap(),
            Self::triangular(0.0, 1.0, 0.5, (0.0, 1.0)).unwrap(),
        ]
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn range(&self) -> (f64, f64) {
        self.range
    }

    /// Short family name.
    pub fn name(&self) -> &'static str {
        match self.family {
            Family::Normal { .. } => "normal",
            Family::Gamma { .. } => "gamma",
            Family::Gumbel { .. } => "gev",
            Family::Triangular { .. } => "triangular",
        }
    }

    /// One untruncated draw.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.family {
            Family::Normal { mean, sd } => Normal::new(mean, sd).unwrap().sample(rng),
            Family::Gamma { shape, scale } => Gamma::new(shape, scale).unwrap().sample(rng),
            Family::Gumbel { location, scale } => Gumbel::new(location, scale).unwrap().sample(rng),
            Family::Triangular { min, max, mode } => Triangular::new(min, max, mode).unwrap().sample(rng),
        }
    }

    /// `n` draws restricted to the range by rejection.
    pub fn sample_with<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        let (lo, hi) = self.range;
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let v = self.draw(rng);
            if v >= lo && v <= hi {
                out.push(v);
            }
        }
        out
    }

    /// Seeded, reproducible sample inside the range.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<f64> {
        self.sample_with(n, &mut SimRng::seed_from_u64(seed))
    }

    /// Seeded sample from the untruncated family.
    pub fn sample_untruncated(&self, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = SimRng::seed_from_u64(seed);
        (0..n).map(|_| self.draw(&mut rng)).collect()
    }

    pub fn cdf(&self, tau: f64) -> f64 {
        match self.family {
            Family::Normal { mean, sd } => 0.5 * erfc(-(tau - mean) / (sd * std::f64::consts::SQRT_2)),
            Family::Gamma { shape, scale } => {
                if tau <= 0.0 {
                    0.0
                } else if shape == 1.0 {
                    -(-tau / scale).exp_m1()
                } else {
                    statrs::distribution::Gamma::new(shape, 1.0 / scale).unwrap().cdf(tau)
                }
            }
            Family::Gumbel { location, scale } => (-(-(tau - location) / scale).exp()).exp(),
            Family::Triangular { min, max, mode } => {
                if tau <= min {
                    0.0
                } else if tau >= max {
                    1.0
                } else if tau <= mode {
                    (tau - min).powi(2) / ((max - min) * (mode - min))
                } else {
                    1.0 - (max - tau).powi(2) / ((max - min) * (max - mode))
                }
            }
        }
    }

    /// CDF of the range-truncated distribution actually sampled.
    pub fn truncated_cdf(&self, tau: f64) -> f64 {
        let (lo, hi) = self.range;
        let (flo, fhi) = (self.cdf(lo), self.cdf(hi));
        ((self.cdf(tau.clamp(lo, hi)) - flo) / (fhi - flo)).clamp(0.0, 1.0)
    }

    /// Probability mass outside the range.
    pub fn truncated_mass(&self) -> f64 {
        let (lo, hi) = self.range;
        self.cdf(lo) + (1.0 - self.cdf(hi))
    }

    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::InvalidLevel(q));
        }
        Ok(match self.family {
            Family::Normal { mean, sd } => statrs::distribution::Normal::new(mean, sd).unwrap().inverse_cdf(q),
            Family::Gamma { shape, scale } => {
                if shape == 1.0 {
                    -scale * (-q).ln_1p()
                } else {
                    statrs::distribution::Gamma::new(shape, 1.0 / scale).unwrap().inverse_cdf(q)
                }
            }
            Family::Gumbel { location, scale } => location - scale * (-q.ln()).ln(),
            Family::Triangular { min, max, mode } => {
                let split = (mode - min) / (max - min);
                if q <= split {
                    min + (q * (max - min) * (mode - min)).sqrt()
                } else {
                    max - ((1.0 - q) * (max - min) * (max - mode)).sqrt()
                }
            }
        })
    }

    pub fn mean(&self) -> f64 {
        match self.family {
            Family::Normal { mean, .. } => mean,
            Family::Gamma { shape, scale } => shape * scale,
            Family::Gumbel { location, scale } => location + scale * EULER_GAMMA,
            Family::Triangular { min, max, mode } => (min + max + mode) / 3.0,
        }
    }

    pub fn sd(&self) -> f64 {
        match self.family {
            Family::Normal { sd, .. } => sd,
            Family::Gamma { shape, scale } => shape.sqrt() * scale,
            Family::Gumbel { scale, .. } => scale * std::f64::consts::PI / 6f64.sqrt(),
            Family::Triangular { min: a, max: b, mode: c } => {
                ((a * a + b * b + c * c - a * b - a * c - b * c) / 18.0).sqrt()
            }
        }
    }

    pub fn theoretical(&self, kind: Functional) -> Result<f64> {
        match kind {
            Functional::Cdf(t) => Ok(self.cdf(t)),
            Functional::Quantile(q) => self.quantile(q),
            Functional::Mean => Ok(self.mean()),
            Functional::Sd => Ok(self.sd()),
        }
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lo, hi) = self.range;
        match self.family {
            Family::Normal { mean, sd } => write!(f, "normal:{mean},{sd}")?,
            Family::Gamma { shape, scale } => write!(f, "gamma:{shape},{scale}")?,
            Family::Gumbel { location, scale } => write!(f, "gev:{location},{scale},0")?,
            Family::Triangular { min, max, mode } => write!(f, "triangular:{min},{max},{mode}")?,
        }
        write!(f, "@{lo}:{hi}")
    }
}

impl FromStr for DistributionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::InvalidParameter(format!("distribution {s:?}: {why}"));
        let (head, range) = s.trim().split_once('@').ok_or_else(|| bad("missing @lo:hi"))?;
        let (lo, hi) = range.split_once(':').ok_or_else(|| bad("range must be lo:hi"))?;
        let num = |v: &str| v.trim().parse::<f64>().map_err(|_| bad("not a number"));
        let range = (num(lo)?, num(hi)?);
        let (name, params) = head.split_once(':').ok_or_else(|| bad("missing family:params"))?;
        let p = params.split(',').map(num).collect::<Result<Vec<_>>>()?;
        let family = match (name.trim().to_ascii_lowercase().as_str(), p.as_slice()) {
            ("normal", &[mean, sd]) => Family::Normal { mean, sd },
            ("gamma", &[shape, scale]) => Family::Gamma { shape, scale },
            ("gev", &[location, scale, shape]) | ("gumbel", &[location, scale, shape]) => {
                if shape != 0.0 {
                    return Err(bad("only GEV shape 0 (Gumbel) is supported"));
                }
                Family::Gumbel { location, scale }
            }
            ("gumbel", &[location, scale]) => Family::Gumbel { location, scale },
            ("triangular", &[min, max, mode]) => Family::Triangular { min, max, mode },
            _ => return Err(bad("unknown family or wrong parameter count")),
        };
        Self::new(family, range)
    }
}

impl Serialize for DistributionSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DistributionSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
