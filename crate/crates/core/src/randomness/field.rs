use serde::{Deserialize, Serialize};

use super::distribution::DistributionSpec;
use super::mixing::{uniform, STREAM_CLOCK, STREAM_WEIGHT};
use crate::error::{Error, Result};
use crate::geometry::{CanonicalEdge, RegionSpec, Site};

/// Anything that assigns a non-negative weight to each lattice edge.
pub trait EdgeWeights: Sync {
    fn weight(&self, edge: &CanonicalEdge) -> f64;
}

impl<F: Fn(&CanonicalEdge) -> f64 + Sync> EdgeWeights for F {
    fn weight(&self, edge: &CanonicalEdge) -> f64 {
        self(edge)
    }
}

/// Static i.i.d. environment. The weight of an edge depends only on the seed
/// and the edge, so every region query sees the same restriction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightField {
    pub seed: u64,
    pub dist: DistributionSpec,
}

impl WeightField {
    pub fn new(seed: u64, dist: DistributionSpec) -> Self {
        WeightField { seed, dist }
    }

    #[inline]
    pub fn sample_weight(&self, edge: &CanonicalEdge) -> f64 {
        self.dist
            .quantile_unchecked(uniform(self.seed, edge.id(), STREAM_WEIGHT, 0))
    }
}

impl EdgeWeights for WeightField {
    #[inline]
    fn weight(&self, edge: &CanonicalEdge) -> f64 {
        self.sample_weight(edge)
    }
}

/// bar ≤ τ_e(s) ≤ hat on [0, δ].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopePair {
    pub bar: f64,
    pub hat: f64,
}

/// Ring times in [0, S] and the weights active on each piece:
/// weights[j] holds on [rings[j-1], rings[j]).
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeTimeline {
    pub rings: Vec<f64>,
    pub weights: Vec<f64>,
}

impl EdgeTimeline {
    pub fn weight_at(&self, s: f64) -> f64 {
        let j = self.rings.partition_point(|&t| t <= s);
        self.weights[j]
    }

    pub fn envelope(&self, delta: f64) -> EnvelopePair {
        self.envelope_on(0.0, delta)
    }

    /// Weights active at some time in [a, b].
    pub fn active_on(&self, a: f64, b: f64) -> &[f64] {
        let i = self.rings.partition_point(|&t| t <= a);
        let j = self.rings.partition_point(|&t| t <= b);
        &self.weights[i..=j]
    }

    /// bar = weight at a if no ring in (a, b], else 0; hat = max active weight.
    pub fn envelope_on(&self, a: f64, b: f64) -> EnvelopePair {
        let active = self.active_on(a, b);
        EnvelopePair {
            bar: if active.len() == 1 { active[0] } else { 0.0 },
            hat: active.iter().copied().fold(0.0, f64::max),
        }
    }

    pub fn min_on(&self, a: f64, b: f64) -> f64 {
        self.active_on(a, b).iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Ring times in (a, b].
    pub fn rings_in(&self, a: f64, b: f64) -> &[f64] {
        let i = self.rings.partition_point(|&t| t <= a);
        let j = self.rings.partition_point(|&t| t <= b);
        &self.rings[i..j]
    }
}

/// Dynamical environment on [0, S]: every edge carries a rate-1 Poisson clock
/// and its weight is redrawn from `dist` at each ring. At time 0 it agrees with
/// the static field of the same seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DynamicalWeightField {
    pub seed: u64,
    pub dist: DistributionSpec,
    pub window: f64,
}

impl DynamicalWeightField {
    pub fn new(seed: u64, dist: DistributionSpec, window: f64) -> Self {
        assert!(window >= 0.0, "window must be non-negative");
        DynamicalWeightField { seed, dist, window }
    }

    pub fn static_field(&self) -> WeightField {
        WeightField::new(self.seed, self.dist.clone())
    }

    #[inline]
    fn jth_weight(&self, id: u128, j: usize) -> f64 {
        self.dist
            .quantile_unchecked(uniform(self.seed, id, STREAM_WEIGHT, j as u64))
    }

    pub fn ring_times(&self, edge: &CanonicalEdge) -> Vec<f64> {
        let id = edge.id();
        let mut t = 0.0;
        let mut out = Vec::new();
        for k in 0u64.. {
            t += -(-uniform(self.seed, id, STREAM_CLOCK, k)).ln_1p();
            if t > self.window {
                break;
            }
            out.push(t);
        }
        out
    }

    pub fn timeline(&self, edge: &CanonicalEdge) -> EdgeTimeline {
        let rings = self.ring_times(edge);
        let id = edge.id();
        let weights = (0..=rings.len()).map(|j| self.jth_weight(id, j)).collect();
        EdgeTimeline { rings, weights }
    }

    fn check_time(&self, s: f64) -> Result<()> {
        if !(0.0..=self.window).contains(&s) {
            return Err(Error::contract(format!(
                "time {s} outside the window [0, {}]",
                self.window
            )));
        }
        Ok(())
    }

    pub fn weight_at(&self, edge: &CanonicalEdge, s: f64) -> Result<f64> {
        self.check_time(s)?;
        Ok(self.weight_at_unchecked(edge, s))
    }

    fn weight_at_unchecked(&self, edge: &CanonicalEdge, s: f64) -> f64 {
        let id = edge.id();
        let mut t = 0.0;
        let mut j = 0usize;
        loop {
            t += -(-uniform(self.seed, id, STREAM_CLOCK, j as u64)).ln_1p();
            if t > s {
                break;
            }
            j += 1;
        }
        self.jth_weight(id, j)
    }

    pub fn envelope_weights(&self, edge: &CanonicalEdge, delta: f64) -> Result<EnvelopePair> {
        self.check_time(delta)?;
        Ok(self.envelope_unchecked(edge, delta))
    }

    fn envelope_unchecked(&self, edge: &CanonicalEdge, delta: f64) -> EnvelopePair {
        let id = edge.id();
        let first = self.jth_weight(id, 0);
        let mut hat = first;
        let mut t = 0.0;
        let mut n = 0usize;
        loop {
            t += -(-uniform(self.seed, id, STREAM_CLOCK, n as u64)).ln_1p();
            if t > delta {
                break;
            }
            n += 1;
            hat = hat.max(self.jth_weight(id, n));
        }
        EnvelopePair {
            bar: if n == 0 { first } else { 0.0 },
            hat,
        }
    }

    /// Weights frozen at time `s`.
    pub fn at(&self, s: f64) -> Result<TimeSlice<'_>> {
        self.check_time(s)?;
        Ok(TimeSlice { field: self, s })
    }

    /// Lower envelope weights on [0, δ].
    pub fn bar(&self, delta: f64) -> Result<Envelope<'_>> {
        self.check_time(delta)?;
        Ok(Envelope { field: self, delta, upper: false })
    }

    /// Upper envelope weights on [0, δ].
    pub fn hat(&self, delta: f64) -> Result<Envelope<'_>> {
        self.check_time(delta)?;
        Ok(Envelope { field: self, delta, upper: true })
    }
}

pub struct TimeSlice<'a> {
    field: &'a DynamicalWeightField,
    s: f64,
}

impl EdgeWeights for TimeSlice<'_> {
    fn weight(&self, edge: &CanonicalEdge) -> f64 {
        self.field.weight_at_unchecked(edge, self.s)
    }
}

pub struct Envelope<'a> {
    field: &'a DynamicalWeightField,
    delta: f64,
    upper: bool,
}

impl EdgeWeights for Envelope<'_> {
    fn weight(&self, edge: &CanonicalEdge) -> f64 {
        let p = self.field.envelope_unchecked(edge, self.delta);
        if self.upper {
            p.hat
        } else {
            p.bar
        }
    }
}

/// Minimum weight over the region's edges incident to `site`.
pub fn y_statistic<W: EdgeWeights + ?Sized>(weights: &W, site: &Site, region: &RegionSpec) -> Result<f64> {
    let nbrs = region.neighbors(site)?;
    nbrs.iter()
        .map(|n| weights.weight(&CanonicalEdge::between_adjacent(site, n)))
        .min_by(|a, b| a.total_cmp(b))
        .ok_or(Error::IsolatedSite(*site))
}
