use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// Law of a single edge weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", content = "params")]
pub enum DistributionSpec {
    PointMass { v: f64 },
    Exponential { rate: f64 },
    Uniform { lo: f64, hi: f64 },
    /// Mass `p0` at 0, mass 1 − p0 at `v1`.
    BernoulliZero { p0: f64, v1: f64 },
    /// P(τ > x) = (scale / x)^alpha for x ≥ scale.
    ParetoTail { alpha: f64, scale: f64 },
    /// Mass `p0` at 0, otherwise drawn from `continuous`.
    ZeroMixture {
        p0: f64,
        continuous: Box<DistributionSpec>,
    },
}

use DistributionSpec::*;

fn check(ok: bool, field: &str, msg: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::validation(field, msg))
    }
}

impl DistributionSpec {
    pub fn exponential(rate: f64) -> Self {
        Exponential { rate }
    }

    pub fn zero_mixture(p0: f64, continuous: DistributionSpec) -> Self {
        ZeroMixture {
            p0,
            continuous: Box::new(continuous),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |x: f64| x.is_finite();
        match self {
            PointMass { v } => check(finite(*v) && *v >= 0.0, "dist.v", "must be finite and ≥ 0"),
            Exponential { rate } => check(finite(*rate) && *rate > 0.0, "dist.rate", "must be > 0"),
            Uniform { lo, hi } => check(
                finite(*lo) && finite(*hi) && 0.0 <= *lo && lo <= hi,
                "dist.lo/hi",
                "need 0 ≤ lo ≤ hi",
            ),
            BernoulliZero { p0, v1 } => {
                check((0.0..=1.0).contains(p0), "dist.p0", "must lie in [0,1]")?;
                check(finite(*v1) && *v1 >= 0.0, "dist.v1", "must be finite and ≥ 0")
            }
            ParetoTail { alpha, scale } => {
                check(finite(*alpha) && *alpha > 0.0, "dist.alpha", "must be > 0")?;
                check(finite(*scale) && *scale > 0.0, "dist.scale", "must be > 0")
            }
            ZeroMixture { p0, continuous } => {
                check((0.0..1.0).contains(p0), "dist.p0", "must lie in [0,1)")?;
                check(
                    matches!(**continuous, Exponential { .. } | Uniform { .. } | ParetoTail { .. }),
                    "dist.continuous",
                    "must be Exponential, Uniform or ParetoTail",
                )?;
                continuous.validate()
            }
        }
    }

    /// Inverse distribution function (left-continuous generalized inverse).
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&u) {
            return Err(Error::contract(format!("quantile level {u} outside [0,1)")));
        }
        Ok(self.quantile_unchecked(u))
    }

    #[inline]
    pub(crate) fn quantile_unchecked(&self, u: f64) -> f64 {
        match self {
            PointMass { v } => *v,
            Exponential { rate } => -(-u).ln_1p() / rate,
            Uniform { lo, hi } => lo + (hi - lo) * u,
            BernoulliZero { p0, v1 } => {
                if u < *p0 {
                    0.0
                } else {
                    *v1
                }
            }
            ParetoTail { alpha, scale } => scale * (1.0 - u).powf(-1.0 / alpha),
            ZeroMixture { p0, continuous } => {
                if u < *p0 {
                    0.0
                } else {
                    continuous.quantile_unchecked((u - p0) / (1.0 - p0))
                }
            }
        }
    }

    /// P(τ > x).
    pub fn tail_prob(&self, x: f64) -> f64 {
        match self {
            PointMass { v } => (x < *v) as u8 as f64,
            Exponential { rate } => {
                if x < 0.0 {
                    1.0
                } else {
                    (-rate * x).exp()
                }
            }
            Uniform { lo, hi } => {
                if x < *lo {
                    1.0
                } else if x >= *hi {
                    0.0
                } else {
                    (hi - x) / (hi - lo)
                }
            }
            BernoulliZero { p0, v1 } => {
                if x < 0.0 {
                    1.0
                } else if x < *v1 {
                    1.0 - p0
                } else {
                    0.0
                }
            }
            ParetoTail { alpha, scale } => {
                if x < *scale {
                    1.0
                } else {
                    (scale / x).powf(*alpha)
                }
            }
            ZeroMixture { p0, continuous } => {
                if x < 0.0 {
                    1.0
                } else {
                    (1.0 - p0) * continuous.tail_prob(x)
                }
            }
        }
    }

    /// E[τ^p], +∞ when divergent.
    pub fn moment(&self, p: f64) -> f64 {
        match self {
            PointMass { v } => v.powf(p),
            Exponential { rate } => gamma(p + 1.0) / rate.powf(p),
            Uniform { lo, hi } => {
                if hi == lo {
                    lo.powf(p)
                } else {
                    (hi.powf(p + 1.0) - lo.powf(p + 1.0)) / ((p + 1.0) * (hi - lo))
                }
            }
            BernoulliZero { p0, v1 } => (1.0 - p0) * v1.powf(p),
            ParetoTail { alpha, scale } => {
                if p >= *alpha {
                    f64::INFINITY
                } else {
                    alpha * scale.powf(p) / (alpha - p)
                }
            }
            ZeroMixture { p0, continuous } => (1.0 - p0) * continuous.moment(p),
        }
    }

    pub fn mean(&self) -> f64 {
        self.moment(1.0)
    }

    /// P(τ = 0).
    pub fn zero_mass(&self) -> f64 {
        match self {
            PointMass { v } => (*v == 0.0) as u8 as f64,
            Uniform { lo, hi } => (*lo == 0.0 && *hi == 0.0) as u8 as f64,
            BernoulliZero { p0, v1 } => {
                if *v1 == 0.0 {
                    1.0
                } else {
                    *p0
                }
            }
            ZeroMixture { p0, .. } => *p0,
            Exponential { .. } | ParetoTail { .. } => 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_examples() {
        let e = DistributionSpec::exponential(1.0);
        assert!((e.quantile(1.0 - (-2f64).exp()).unwrap() - 2.0).abs() < 1e-12);
        let b = BernoulliZero { p0: 0.5, v1: 1.0 };
        assert_eq!(b.quantile(0.25).unwrap(), 0.0);
        assert_eq!(b.quantile(0.75).unwrap(), 1.0);
        assert!((Uniform { lo: 0.0, hi: 1.0 }.quantile(0.3).unwrap() - 0.3).abs() < 1e-15);
        assert!(matches!(e.quantile(1.0), Err(Error::Contract(_))));
        assert!(matches!(e.quantile(-0.1), Err(Error::Contract(_))));
    }

    #[test]
    fn tail_and_moment_examples() {
        let e = DistributionSpec::exponential(1.0);
        assert!((e.tail_prob(2.0) - (-2f64).exp()).abs() < 1e-15);
        assert!((e.moment(2.0) - 2.0).abs() < 1e-10);
        assert_eq!(ParetoTail { alpha: 1.5, scale: 1.0 }.moment(2.0), f64::INFINITY);
        let b = BernoulliZero { p0: 0.5, v1: 1.0 };
        for p in [0.5, 1.0, 3.0] {
            assert_eq!(b.moment(p), 0.5);
        }
    }

    #[test]
    fn quantile_is_consistent_with_tail() {
        let laws = [
            DistributionSpec::exponential(2.0),
            Uniform { lo: 1.0, hi: 3.0 },
            ParetoTail { alpha: 2.5, scale: 0.5 },
            DistributionSpec::zero_mixture(0.3, ParetoTail { alpha: 1.0, scale: 1.0 }),
        ];
        for law in &laws {
            law.validate().unwrap();
            let mut prev = 0.0;
            for k in 1..100 {
                let u = k as f64 / 100.0;
                let x = law.quantile(u).unwrap();
                assert!(x >= prev);
                prev = x;
                // P(τ > Q(u)) = 1 − u for laws without atoms above 0
                if x > 0.0 {
                    assert!((law.tail_prob(x) - (1.0 - u)).abs() < 1e-9, "{law:?} {u}");
                }
            }
        }
    }

    #[test]
    fn moments_match_numerical_integration() {
        // E[X^p] = p ∫ x^{p−1} P(X > x) dx, midpoint rule
        let laws = [
            DistributionSpec::exponential(1.5),
            Uniform { lo: 0.5, hi: 2.0 },
            ParetoTail { alpha: 4.0, scale: 1.0 },
            DistributionSpec::zero_mixture(0.4, Uniform { lo: 0.0, hi: 1.0 }),
        ];
        for law in &laws {
            for p in [1.0, 2.0] {
                let h = 1e-3;
                let mut s = 0.0;
                let mut x: f64 = h / 2.0;
                while x < 200.0 {
                    s += p * x.powf(p - 1.0) * law.tail_prob(x) * h;
                    x += h;
                }
                let m = law.moment(p);
                assert!((s - m).abs() < 2e-3 * m.max(1.0), "{law:?} p={p}: {s} vs {m}");
            }
        }
    }

    #[test]
    fn json_shape() {
        let j = serde_json::to_string(&DistributionSpec::exponential(1.0)).unwrap();
        assert_eq!(j, r#"{"variant":"Exponential","params":{"rate":1.0}}"#);
        let z: DistributionSpec = serde_json::from_str(
            r#"{"variant":"ZeroMixture","params":{"p0":0.2,"continuous":{"variant":"Uniform","params":{"lo":0,"hi":1}}}}"#,
        )
        .unwrap();
        assert_eq!(z.zero_mass(), 0.2);
    }

    #[test]
    fn validation() {
        assert!(DistributionSpec::exponential(0.0).validate().is_err());
        assert!(BernoulliZero { p0: 1.5, v1: 1.0 }.validate().is_err());
        assert!(DistributionSpec::zero_mixture(0.5, PointMass { v: 1.0 }).validate().is_err());
    }
}
