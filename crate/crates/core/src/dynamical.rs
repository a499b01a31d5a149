//! Dynamical first-passage percolation: exact piecewise-constant trajectories
//! s ↦ T^{(s)}(src, dst) and their envelope bounds.

use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{check_plugin, per_replica, DeviationEstimate, MuReference};
use crate::geometry::{CanonicalEdge, RegionSpec, Site};
use crate::metric::{reachable_set, travel_time, travel_time_in, TravelTimeResult};
use crate::randomness::{DistributionSpec, DynamicalWeightField, EdgeTimeline};

/// Static travel time in the environment frozen at time s.
pub fn travel_time_at(
    field: &DynamicalWeightField,
    region: &RegionSpec,
    src: &Site,
    dst: &Site,
    s: f64,
    cap: usize,
) -> Result<TravelTimeResult> {
    travel_time(region, &field.at(s)?, src, dst, cap)
}

/// (bar cost, hat cost) for the envelope weights on [0, δ].
pub fn envelope_travel_times(
    field: &DynamicalWeightField,
    region: &RegionSpec,
    src: &Site,
    dst: &Site,
    delta: f64,
    cap: usize,
) -> Result<(f64, f64)> {
    let bar = travel_time(region, &field.bar(delta)?, src, dst, cap)?.cost;
    let hat = travel_time(region, &field.hat(delta)?, src, dst, cap)?.cost;
    Ok((bar, hat))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TravelTimeTrajectory {
    pub src: Site,
    pub site: Site,
    pub window: (f64, f64),
    /// Ring times of box edges inside the window; values[k+1] holds from breakpoints[k].
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
    pub sup: f64,
    pub inf: f64,
    pub events: usize,
    pub box_sites: usize,
    pub box_edges: usize,
    /// Cost under the running-max weights of the window.
    pub hat_cost: f64,
    /// Cost under the running-min weights of the window.
    pub lower_cost: f64,
    pub recomputations: usize,
}

impl TravelTimeTrajectory {
    pub fn value_at(&self, s: f64) -> f64 {
        self.values[self.breakpoints.partition_point(|&t| t <= s)]
    }
}

fn check_window(field: &DynamicalWeightField, window: (f64, f64)) -> Result<()> {
    if !(0.0 <= window.0 && window.0 <= window.1 && window.1 <= field.window) {
        return Err(Error::contract(format!(
            "window [{}, {}] is not inside [0, {}]",
            window.0, window.1, field.window
        )));
    }
    Ok(())
}

/// Exact trajectory of T^{(s)}(src, dst) over the window.
///
/// Every s-optimal path costs at most the hat cost Ĉ and every weight is at
/// least its window minimum, so the path stays in the box of sites v with
/// L(src, v) + L(v, dst) ≤ Ĉ, L the running-min metric. Events are the ring
/// times of box edges. An event leaves the cost unchanged when an edge off
/// the current optimal path gets heavier, or gets lighter but cannot beat
/// the current cost even with running-min distances to its endpoints; an
/// edge on the path getting lighter keeps the path optimal, so only its new
/// cost is summed. All other events trigger a recomputation on the box.
pub fn sup_travel_time(
    field: &DynamicalWeightField,
    region: &RegionSpec,
    src: &Site,
    dst: &Site,
    window: (f64, f64),
    cap: usize,
) -> Result<TravelTimeTrajectory> {
    check_window(field, window)?;
    let (a, b) = window;
    let hat = |e: &CanonicalEdge| field.timeline(e).envelope_on(a, b).hat;
    let low = |e: &CanonicalEdge| field.timeline(e).min_on(a, b);
    let hat_cost = travel_time(region, &hat, src, dst, cap)?.cost;
    let lower_cost = travel_time(region, &low, src, dst, cap)?.cost;
    let slack = hat_cost * (1.0 + 1e-12) + 1e-12;
    let from_src: FxHashMap<Site, f64> = reachable_set(region, &low, src, slack, cap)?.into_iter().collect();
    let to_dst: FxHashMap<Site, f64> = reachable_set(region, &low, dst, slack, cap)?.into_iter().collect();
    let inbox: FxHashSet<Site> = from_src
        .iter()
        .filter(|(v, c)| to_dst.get(v).is_some_and(|e| *c + e <= slack))
        .map(|(v, _)| *v)
        .collect();

    let mut timelines: FxHashMap<CanonicalEdge, EdgeTimeline> = FxHashMap::default();
    for v in &inbox {
        for axis in 0..v.dim() {
            let n = v.step(axis, 1);
            if inbox.contains(&n) {
                let e = CanonicalEdge::new(*v, axis);
                timelines.insert(e, field.timeline(&e));
            }
        }
    }
    let mut current: FxHashMap<CanonicalEdge, f64> =
        timelines.iter().map(|(e, tl)| (*e, tl.weight_at(a))).collect();
    let mut events: Vec<(f64, CanonicalEdge)> = timelines
        .iter()
        .flat_map(|(e, tl)| tl.rings_in(a, b).iter().map(move |&t| (t, *e)))
        .collect();
    events.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));

    let solve = |w: &FxHashMap<CanonicalEdge, f64>| -> Result<TravelTimeResult> {
        let weights = |e: &CanonicalEdge| w[e];
        travel_time_in(|s: &Site| inbox.contains(s), &weights, src, dst, cap)
    };
    let on_path = |r: &TravelTimeResult| -> FxHashSet<CanonicalEdge> {
        r.path
            .windows(2)
            .map(|p| CanonicalEdge::between(&p[0], &p[1]).expect("paths are adjacent"))
            .collect()
    };
    let mut best = solve(&current)?;
    let mut path_edges = on_path(&best);
    let mut cost = best.cost;
    let mut recomputations = 1;
    let mut breakpoints = Vec::with_capacity(events.len());
    let mut values = Vec::with_capacity(events.len() + 1);
    values.push(cost);
    for (t, e) in &events {
        let tl = &timelines[e];
        let new_w = tl.weight_at(*t);
        let old_w = current.insert(*e, new_w).expect("box edge");
        let used = path_edges.contains(e);
        let (p, q) = e.endpoints();
        let unchanged = if new_w >= old_w {
            !used
        } else if used {
            // Same summation order as the search, so the value is bit-identical
            // to a fresh solve.
            cost = best.path.windows(2).fold(0.0, |acc, p| {
                acc + current[&CanonicalEdge::between(&p[0], &p[1]).expect("paths are adjacent")]
            });
            true
        } else {
            let via = (from_src[&p] + new_w + to_dst[&q]).min(from_src[&q] + new_w + to_dst[&p]);
            via >= cost
        };
        if !unchanged {
            best = solve(&current)?;
            path_edges = on_path(&best);
            cost = best.cost;
            recomputations += 1;
        }
        breakpoints.push(*t);
        values.push(cost);
    }
    let sup = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let inf = values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(TravelTimeTrajectory {
        src: *src,
        site: *dst,
        window,
        events: events.len(),
        breakpoints,
        values,
        sup,
        inf,
        box_sites: inbox.len(),
        box_edges: timelines.len(),
        hat_cost,
        lower_cost,
        recomputations,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubwindowBound {
    pub start: f64,
    pub end: f64,
    pub bar_cost: f64,
    pub hat_cost: f64,
}

/// Envelope costs over consecutive subwindows of length δ covering the window.
pub fn subwindow_bounds(
    field: &DynamicalWeightField,
    region: &RegionSpec,
    src: &Site,
    dst: &Site,
    window: (f64, f64),
    delta: f64,
    cap: usize,
) -> Result<Vec<SubwindowBound>> {
    check_window(field, window)?;
    if !(delta > 0.0) {
        return Err(Error::contract("subwindow length must be positive"));
    }
    let mut out = Vec::new();
    let mut start = window.0;
    while start < window.1 {
        let end = (start + delta).min(window.1);
        let bar = |e: &CanonicalEdge| field.timeline(e).envelope_on(start, end).bar;
        let hat = |e: &CanonicalEdge| field.timeline(e).envelope_on(start, end).hat;
        out.push(SubwindowBound {
            start,
            end,
            bar_cost: travel_time(region, &bar, src, dst, cap)?.cost,
            hat_cost: travel_time(region, &hat, src, dst, cap)?.cost,
        });
        start = end;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DynamicalDeviation {
    /// Per replica, the trajectory value furthest from μ̂(z).
    pub dynamic: DeviationEstimate,
    /// The same replicas at s = window start.
    pub initial: DeviationEstimate,
    pub trajectories: Vec<TravelTimeTrajectory>,
}

/// Fraction of replicas with sup_s |T^{(s)}(0, z) − μ̂(z)| > ε|z| over the window.
#[allow(clippy::too_many_arguments)]
pub fn dynamical_deviation_probability(
    dist: &DistributionSpec,
    region: &RegionSpec,
    z: &Site,
    epsilon: f64,
    replicas: usize,
    seed: u64,
    mu_ref: &dyn MuReference,
    window: (f64, f64),
    cap: usize,
) -> Result<DynamicalDeviation> {
    check_plugin(mu_ref, epsilon, z.dim())?;
    let mu = mu_ref.mu(z)?;
    let origin = Site::origin(z.dim());
    let trajectories = per_replica(seed, replicas, |_, s| {
        let field = DynamicalWeightField::new(s, dist.clone(), window.1);
        sup_travel_time(&field, region, &origin, z, window, cap)
    })?;
    let worst = trajectories
        .iter()
        .map(|tr| if (tr.sup - mu).abs() >= (tr.inf - mu).abs() { tr.sup } else { tr.inf })
        .collect();
    let first = trajectories.iter().map(|tr| tr.values[0]).collect();
    let se = mu_ref.stderr_per_unit();
    Ok(DynamicalDeviation {
        dynamic: DeviationEstimate::from_values(*z, epsilon, seed, mu, se, worst),
        initial: DeviationEstimate::from_values(*z, epsilon, seed, mu, se, first),
        trajectories,
    })
}
