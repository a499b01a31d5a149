//! Monte Carlo checks shared by the integration and acceptance suites.
#![allow(dead_code)]

use conefpp::estimators::per_replica;
use conefpp::geometry::{CanonicalEdge, RegionSpec, Site};
use conefpp::metric::travel_time;
use conefpp::randomness::{y_statistic, DistributionSpec, DynamicalWeightField, WeightField};
use conefpp::stats::{ks_one_sample, ks_two_sample, summarize};

/// Empirical value, bound and slack of a one-sided "≤ bound + 3σ" check.
#[derive(Debug, Clone)]
pub struct Check {
    pub label: String,
    pub empirical: f64,
    pub bound: f64,
    pub sigma: f64,
}

impl Check {
    pub fn holds(&self) -> bool {
        self.empirical <= self.bound + 3.0 * self.sigma
    }

    /// Two-sided |empirical − bound| ≤ 3σ.
    pub fn matches(&self) -> bool {
        (self.empirical - self.bound).abs() <= 3.0 * self.sigma
    }
}

/// P(Y > x) at `n` well-separated origins of Z^d against P(τ > x)^{2d}.
pub fn y_tail(dist: &DistributionSpec, d: usize, xs: &[f64], n: usize, seed: u64) -> Vec<Check> {
    let field = WeightField::new(seed, dist.clone());
    let region = RegionSpec::full(d);
    let ys: Vec<f64> = (0..n as i64)
        .map(|k| {
            let mut c = vec![0i64; d];
            c[0] = 3 * (k % 1000);
            c[1] = 3 * (k / 1000);
            y_statistic(&field, &Site::new(&c), &region).unwrap()
        })
        .collect();
    xs.iter()
        .map(|&x| {
            let expected = dist.tail_prob(x).powi(2 * d as i32);
            let p = ys.iter().filter(|&&y| y > x).count() as f64 / n as f64;
            Check {
                label: format!("P(Y>{x})"),
                empirical: p,
                bound: expected,
                sigma: (expected * (1.0 - expected) / n as f64).sqrt(),
            }
        })
        .collect()
}

fn iid_draws(dist: &DistributionSpec, seed: u64, k: u64, q: usize) -> Vec<f64> {
    let f = WeightField::new(seed, dist.clone());
    (0..q as i64)
        .map(|j| f.sample_weight(&CanonicalEdge::new(Site::new(&[k as i64, j]), 0)))
        .collect()
}

/// E[Y_q^{pq}] against q·E[τ^p]^q, with Y_q the minimum of q i.i.d. weights.
pub fn min_moment_bound(dist: &DistributionSpec, q: usize, p: f64, n: usize, seed: u64) -> Check {
    let vals: Vec<f64> = (0..n as u64)
        .map(|k| {
            let m = iid_draws(dist, seed, k, q).into_iter().fold(f64::INFINITY, f64::min);
            m.powf(p * q as f64)
        })
        .collect();
    let s = summarize(&vals);
    Check {
        label: format!("E[Y_{q}^{}] <= {q} E[tau^{p}]^{q}", p * q as f64),
        empirical: s.mean,
        bound: q as f64 * dist.moment(p).powi(q as i32),
        sigma: s.stderr,
    }
}

/// E[min over q edges of the running max over [0, δ], to the p] against
/// (1+δ)^q E[min of q weights to the p], on the same edges.
pub fn envelope_min_bound(dist: &DistributionSpec, q: usize, p: f64, delta: f64, n: usize, seed: u64) -> Check {
    let field = DynamicalWeightField::new(seed, dist.clone(), delta);
    let factor = (1.0 + delta).powi(q as i32);
    let (mut hats, mut diffs) = (Vec::with_capacity(n), Vec::with_capacity(n));
    let mut statics = Vec::with_capacity(n);
    for k in 0..n as i64 {
        let edges: Vec<CanonicalEdge> = (0..q as i64).map(|j| CanonicalEdge::new(Site::new(&[k, j]), 0)).collect();
        let hat = edges
            .iter()
            .map(|e| field.envelope_weights(e, delta).unwrap().hat)
            .fold(f64::INFINITY, f64::min)
            .powf(p);
        let stat = edges
            .iter()
            .map(|e| field.weight_at(e, 0.0).unwrap())
            .fold(f64::INFINITY, f64::min)
            .powf(p);
        hats.push(hat);
        statics.push(factor * stat);
        diffs.push(hat - factor * stat);
    }
    Check {
        label: format!("E[min hat^{p}] <= (1+{delta})^{q} E[min tau^{p}]"),
        empirical: summarize(&hats).mean,
        bound: summarize(&statics).mean,
        sigma: summarize(&diffs).stderr,
    }
}

/// P(T_D(0, z) > 9‖z‖₁x) in the capsule D(0, z, 4√d) against 9^{2d}‖z‖₁P(Y > x).
pub fn capsule_tail_bound(dist: &DistributionSpec, z: &Site, x: f64, replicas: usize, seed: u64) -> Check {
    let d = z.dim();
    let region = RegionSpec::capsule_sites(&Site::origin(d), z, 4.0 * (d as f64).sqrt());
    let norm = z.l1() as f64;
    let costs = per_replica(seed, replicas, |_, s| {
        Ok(travel_time(&region, &WeightField::new(s, dist.clone()), &Site::origin(d), z, 1 << 20)?.cost)
    })
    .unwrap();
    let p = costs.iter().filter(|&&t| t > 9.0 * norm * x).count() as f64 / replicas as f64;
    Check {
        label: format!("P(T_D(0,{z}) > 9|z|{x})"),
        empirical: p,
        bound: 9f64.powi(2 * d as i32) * norm * dist.tail_prob(x).powi(2 * d as i32),
        sigma: (p * (1.0 - p) / replicas as f64).sqrt(),
    }
}

/// KS p-value of T^{(0)}(0, z) against T^{(s)}(0, z) on disjoint replica sets.
pub fn slice_stationarity(dist: &DistributionSpec, region: &RegionSpec, z: &Site, s: f64, replicas: usize, seed: u64) -> f64 {
    let o = Site::origin(z.dim());
    let run = |time: f64, offset: u64| -> Vec<f64> {
        per_replica(seed.wrapping_add(offset), replicas, |_, r| {
            let field = DynamicalWeightField::new(r, dist.clone(), s.max(time));
            Ok(travel_time(region, &field.at(time)?, &o, z, 1 << 22)?.cost)
        })
        .unwrap()
    };
    ks_two_sample(&run(0.0, 0), &run(s, 0x9e37_79b9)).p_value
}

/// KS p-value of single-edge weights at time s against the law's CDF.
pub fn weight_stationarity(dist: &DistributionSpec, s: f64, n: usize, seed: u64) -> f64 {
    let field = DynamicalWeightField::new(seed, dist.clone(), s);
    let ws: Vec<f64> = (0..n as i64)
        .map(|k| field.weight_at(&CanonicalEdge::new(Site::new(&[k, 0]), 1), s).unwrap())
        .collect();
    ks_one_sample(&ws, |x| 1.0 - dist.tail_prob(x)).p_value
}
