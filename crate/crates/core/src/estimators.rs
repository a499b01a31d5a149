//! Monte Carlo estimators: time constants, deviation probabilities, tail sums
//! and L^p deviations. Replica k always uses the environment seeded by
//! `replica_seed(seed, k)`; all sites of one replica share that environment.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{box_sites, classify, Direction, RegionSpec, Site, SiteClass};
use crate::metric::{reachable_set, travel_time, travel_times_from};
use crate::randomness::{replica_seed, DistributionSpec, WeightField};
use crate::stats::{loglog_slope, summarize, t_interval, wilson};

/// Runs `f` for replicas 0..n in parallel and returns results in replica order.
pub fn per_replica<T, F>(seed: u64, replicas: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, u64) -> Result<T> + Sync,
{
    (0..replicas)
        .into_par_iter()
        .map(|k| f(k, replica_seed(seed, k as u64)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeConstantEstimate {
    pub direction: Site,
    pub n: i64,
    pub replicas: usize,
    pub seed: u64,
    /// Mean of T(0, nz) / (n‖z‖₁) over replicas.
    pub mean: f64,
    pub stderr: f64,
    pub values: Vec<f64>,
    /// (m, mean T(0, mz) / (m‖z‖₁)) for m = n/4, n/2, n.
    pub fekete: Vec<(i64, f64)>,
    pub region: RegionSpec,
}

impl TimeConstantEstimate {
    pub fn ci95(&self) -> (f64, f64) {
        t_interval(&self.values, 0.95)
    }
}

fn fekete_levels(n: i64) -> Vec<i64> {
    let mut ms: Vec<i64> = [n / 4, n / 2, n].into_iter().filter(|&m| m >= 1).collect();
    ms.dedup();
    ms
}

/// μ̂ for direction `z` over the given region, by the ratio T(0, nz)/(n‖z‖₁).
pub fn estimate_region_constant(
    region: &RegionSpec,
    dist: &DistributionSpec,
    z: &Site,
    n: i64,
    replicas: usize,
    seed: u64,
    cap: usize,
) -> Result<TimeConstantEstimate> {
    if n < 1 {
        return Err(Error::contract("n must be at least 1"));
    }
    if replicas < 2 {
        return Err(Error::contract("at least two replicas are needed"));
    }
    if z.is_origin() {
        return Err(Error::contract("direction must be non-zero"));
    }
    z.check_dim(region.dim())?;
    let ms = fekete_levels(n);
    let targets: Vec<Site> = ms.iter().map(|&m| z.scale(m)).collect();
    let origin = Site::origin(z.dim());
    let norm = z.l1() as f64;
    let rows = per_replica(seed, replicas, |_, s| {
        let field = WeightField::new(s, dist.clone());
        travel_times_from(region, &field, &origin, &targets, cap)
    })?;
    let values: Vec<f64> = rows
        .iter()
        .map(|r| r[ms.len() - 1] / (n as f64 * norm))
        .collect();
    let fekete = ms
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            let mean = rows.iter().map(|r| r[i]).sum::<f64>() / replicas as f64;
            (m, mean / (m as f64 * norm))
        })
        .collect();
    let s = summarize(&values);
    Ok(TimeConstantEstimate {
        direction: *z,
        n,
        replicas,
        seed,
        mean: s.mean,
        stderr: s.stderr,
        values,
        fekete,
        region: region.clone(),
    })
}

pub fn estimate_time_constant(
    dist: &DistributionSpec,
    z: &Site,
    n: i64,
    replicas: usize,
    seed: u64,
    cap: usize,
) -> Result<TimeConstantEstimate> {
    estimate_region_constant(&RegionSpec::full(z.dim()), dist, z, n, replicas, seed, cap)
}

/// μ̂ over the cylinder of radius `r` around the line through `z`.
pub fn estimate_cylinder_constant(
    dist: &DistributionSpec,
    z: &Site,
    r: f64,
    n: i64,
    replicas: usize,
    seed: u64,
    cap: usize,
) -> Result<TimeConstantEstimate> {
    let d = z.dim();
    if r < 4.0 * (d as f64).sqrt() - 1e-12 {
        return Err(Error::contract("cylinder radius must be at least 4√d"));
    }
    let region = RegionSpec::cylinder(Direction::new(*z)?, r);
    estimate_region_constant(&region, dist, z, n, replicas, seed, cap)
}

/// A plug-in value for μ(z).
pub trait MuReference: Sync {
    fn mu(&self, z: &Site) -> Result<f64>;
    /// Largest standard error of μ̂ per unit ℓ1 length.
    fn stderr_per_unit(&self) -> f64;
}

impl MuReference for TimeConstantEstimate {
    fn mu(&self, z: &Site) -> Result<f64> {
        if z.is_origin() {
            return Ok(0.0);
        }
        let u = &self.direction;
        let d = u.dim();
        let parallel = (0..d).all(|i| (0..d).all(|j| z.get(i) * u.get(j) == z.get(j) * u.get(i)));
        if !parallel || z.dot(u) <= 0 {
            return Err(Error::contract(format!(
                "{z} is not a positive multiple of the estimated direction {u}"
            )));
        }
        Ok(self.mean * z.l1() as f64)
    }

    fn stderr_per_unit(&self) -> f64 {
        self.stderr
    }
}

/// The stderr < ε/10 gate. μ̂ per unit ℓ1 converts to per unit Euclidean
/// length by at most a factor √d.
pub fn check_plugin(mu_ref: &dyn MuReference, epsilon: f64, d: usize) -> Result<()> {
    let se = mu_ref.stderr_per_unit() * (d as f64).sqrt();
    if !(se < epsilon / 10.0) {
        return Err(Error::contract(format!(
            "plug-in μ̂ too coarse: stderr {se:.4} is not below ε/10 = {:.4}",
            epsilon / 10.0
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviationEstimate {
    pub site: Site,
    pub epsilon: f64,
    pub replicas: usize,
    pub seed: u64,
    pub deviations: usize,
    pub p_hat: f64,
    pub wilson_ci: (f64, f64),
    pub mu_used: f64,
    pub mu_stderr: f64,
    pub values: Vec<f64>,
}

impl DeviationEstimate {
    pub(crate) fn from_values(
        site: Site,
        epsilon: f64,
        seed: u64,
        mu_used: f64,
        mu_stderr: f64,
        values: Vec<f64>,
    ) -> Self {
        let thr = epsilon * site.l2();
        let deviations = values.iter().filter(|&&t| (t - mu_used).abs() > thr).count();
        let replicas = values.len();
        DeviationEstimate {
            site,
            epsilon,
            replicas,
            seed,
            deviations,
            p_hat: deviations as f64 / replicas as f64,
            wilson_ci: wilson(deviations, replicas),
            mu_used,
            mu_stderr,
            values,
        }
    }
}

/// Fraction of replicas with |T_region(0, z) − μ̂(z)| > ε|z|.
#[allow(clippy::too_many_arguments)]
pub fn deviation_probability(
    dist: &DistributionSpec,
    region: &RegionSpec,
    z: &Site,
    epsilon: f64,
    replicas: usize,
    seed: u64,
    mu_ref: &dyn MuReference,
    cap: usize,
) -> Result<DeviationEstimate> {
    check_plugin(mu_ref, epsilon, z.dim())?;
    let mu = mu_ref.mu(z)?;
    let origin = Site::origin(z.dim());
    let values = per_replica(seed, replicas, |_, s| {
        let field = WeightField::new(s, dist.clone());
        Ok(travel_time(region, &field, &origin, z, cap)?.cost)
    })?;
    Ok(DeviationEstimate::from_values(
        *z,
        epsilon,
        seed,
        mu,
        mu_ref.stderr_per_unit(),
        values,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SiteSet {
    Interior,
    Boundary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ConvergentLooking,
    DivergentLooking,
    Inconclusive,
}

/// Slope thresholds for the growth-rate verdict.
pub const CONVERGENT_SLOPE: f64 = 0.1;
pub const DIVERGENT_SLOPE: f64 = 0.5;

pub fn verdict(slope: Option<f64>) -> Verdict {
    match slope {
        None => Verdict::ConvergentLooking,
        Some(s) if s < CONVERGENT_SLOPE => Verdict::ConvergentLooking,
        Some(s) if s > DIVERGENT_SLOPE => Verdict::DivergentLooking,
        _ => Verdict::Inconclusive,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SiteDeviation {
    pub site: Site,
    pub norm: f64,
    pub mu: f64,
    pub p_hat: f64,
    pub wilson_ci: (f64, f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailSumDiagnostic {
    pub p: f64,
    pub epsilon: f64,
    pub radius: f64,
    pub replicas: usize,
    pub seed: u64,
    pub site_set: SiteSet,
    pub mu_stderr: f64,
    pub sites: Vec<SiteDeviation>,
    /// (r, Σ_{|z| ≤ r} |z|^{p−d} p̂(z)) for r = 1, 2, …, R.
    pub partial_sums: Vec<(f64, f64)>,
    /// Least-squares slope of ln S(r) on ln r over r ∈ [R/2, R].
    pub slope: Option<f64>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailSumParams {
    pub p: f64,
    pub epsilon: f64,
    pub radius: f64,
    pub replicas: usize,
    pub seed: u64,
    pub site_set: SiteSet,
    pub cap: usize,
}

/// Sites of the cone's interior or boundary with 0 < |z| ≤ radius.
pub fn cone_sites(cone: &RegionSpec, radius: f64, set: SiteSet) -> Result<Vec<Site>> {
    let d = cone.dim();
    let r = radius.floor() as i64;
    let want = match set {
        SiteSet::Interior => SiteClass::Interior,
        SiteSet::Boundary => SiteClass::Boundary,
    };
    let mut out = Vec::new();
    for z in box_sites(&Site::new(&vec![-r; d]), &Site::new(&vec![r; d])) {
        if z.is_origin() || z.l2() > radius {
            continue;
        }
        if classify(cone, &z)? == want {
            out.push(z);
        }
    }
    Ok(out)
}

/// Partial sums of |z|^{p−d} P(|T_H(0,z) − μ̂(z)| > ε|z|) over one class of
/// cone sites, with one environment per replica shared by all sites.
pub fn tail_sum(
    dist: &DistributionSpec,
    cone: &RegionSpec,
    params: &TailSumParams,
    mu_ref: &dyn MuReference,
) -> Result<TailSumDiagnostic> {
    if !cone.is_cone() {
        return Err(Error::contract("tail sums are defined over cone regions"));
    }
    let d = cone.dim();
    check_plugin(mu_ref, params.epsilon, d)?;
    let sites = cone_sites(cone, params.radius, params.site_set)?;
    let mus: Vec<f64> = sites.iter().map(|z| mu_ref.mu(z)).collect::<Result<_>>()?;
    let horizon = sites
        .iter()
        .zip(&mus)
        .map(|(z, m)| m + params.epsilon * z.l2())
        .fold(0.0, f64::max)
        * (1.0 + 1e-9);
    let origin = Site::origin(d);
    let index: rustc_hash::FxHashMap<Site, usize> =
        sites.iter().enumerate().map(|(i, z)| (*z, i)).collect();
    let counts = per_replica(params.seed, params.replicas, |_, s| {
        let field = WeightField::new(s, dist.clone());
        let ball = reachable_set(cone, &field, &origin, horizon, params.cap)?;
        let mut time = vec![f64::INFINITY; sites.len()];
        for (z, t) in ball {
            if let Some(&i) = index.get(&z) {
                time[i] = t;
            }
        }
        // unreached sites have T > horizon ≥ μ̂(z) + ε|z|
        Ok(sites
            .iter()
            .enumerate()
            .map(|(i, z)| (time[i] - mus[i]).abs() > params.epsilon * z.l2())
            .collect::<Vec<bool>>())
    })?;
    let mut devs = vec![0usize; sites.len()];
    for row in &counts {
        for (i, &b) in row.iter().enumerate() {
            devs[i] += b as usize;
        }
    }
    let n = params.replicas;
    let site_rows: Vec<SiteDeviation> = sites
        .iter()
        .enumerate()
        .map(|(i, z)| SiteDeviation {
            site: *z,
            norm: z.l2(),
            mu: mus[i],
            p_hat: devs[i] as f64 / n as f64,
            wilson_ci: wilson(devs[i], n),
        })
        .collect();
    let partial_sums = partial_sums(&site_rows, params.p, d, params.radius);
    let slope = dyadic_slope(&partial_sums, params.radius);
    Ok(TailSumDiagnostic {
        p: params.p,
        epsilon: params.epsilon,
        radius: params.radius,
        replicas: n,
        seed: params.seed,
        site_set: params.site_set,
        mu_stderr: mu_ref.stderr_per_unit(),
        sites: site_rows,
        partial_sums,
        slope,
        verdict: verdict(slope),
    })
}

pub fn partial_sums(rows: &[SiteDeviation], p: f64, d: usize, radius: f64) -> Vec<(f64, f64)> {
    let rmax = radius.floor() as usize;
    let mut bucket = vec![0.0; rmax + 1];
    for row in rows {
        let k = row.norm.ceil() as usize;
        if k <= rmax {
            bucket[k] += row.norm.powf(p - d as f64) * row.p_hat;
        }
    }
    let mut acc = 0.0;
    (1..=rmax)
        .map(|r| {
            acc += bucket[r];
            (r as f64, acc)
        })
        .collect()
}

/// Slope of ln S(r) on ln r over the last dyadic window [R/2, R].
pub fn dyadic_slope(sums: &[(f64, f64)], radius: f64) -> Option<f64> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = sums
        .iter()
        .filter(|(r, _)| *r >= radius / 2.0)
        .copied()
        .unzip();
    if ys.iter().all(|&y| y == 0.0) {
        return None;
    }
    loglog_slope(&xs, &ys)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpDeviation {
    pub site: Site,
    pub p: f64,
    pub mean: f64,
    pub stderr: f64,
    pub ci95: (f64, f64),
    pub mu_used: f64,
    pub values: Vec<f64>,
}

/// Empirical E|(T_region(0, z) − μ̂(z)) / |z||^p.
#[allow(clippy::too_many_arguments)]
pub fn lp_deviation(
    dist: &DistributionSpec,
    region: &RegionSpec,
    z: &Site,
    p: f64,
    replicas: usize,
    seed: u64,
    mu_ref: &dyn MuReference,
    cap: usize,
) -> Result<LpDeviation> {
    let mu = mu_ref.mu(z)?;
    let origin = Site::origin(z.dim());
    let norm = z.l2();
    let values = per_replica(seed, replicas, |_, s| {
        let field = WeightField::new(s, dist.clone());
        let t = travel_time(region, &field, &origin, z, cap)?.cost;
        Ok(((t - mu) / norm).abs().powf(p))
    })?;
    let s = summarize(&values);
    Ok(LpDeviation {
        site: *z,
        p,
        mean: s.mean,
        stderr: s.stderr,
        ci95: t_interval(&values, 0.95),
        mu_used: mu,
        values,
    })
}

/// μ̂(z) along a sequence of weight laws.
pub fn mu_continuity_probe(
    dists: &[DistributionSpec],
    z: &Site,
    n: i64,
    replicas: usize,
    seed: u64,
    cap: usize,
) -> Result<Vec<TimeConstantEstimate>> {
    dists
        .iter()
        .map(|d| estimate_time_constant(d, z, n, replicas, seed, cap))
        .collect()
}

/// True iff the means are within 2·stderr of a monotone sequence in the
/// given direction: every later mean exceeds (or undercuts) every earlier
/// one by at most twice the combined stderr.
pub fn monotone_within(ests: &[TimeConstantEstimate], increasing: bool) -> bool {
    for i in 0..ests.len() {
        for j in i + 1..ests.len() {
            let slack = 2.0 * (ests[i].stderr.powi(2) + ests[j].stderr.powi(2)).sqrt();
            let diff = ests[j].mean - ests[i].mean;
            let ok = if increasing { diff >= -slack } else { diff <= slack };
            if !ok {
                return false;
            }
        }
    }
    true
}
