//! Config-driven experiment execution and content-addressed persistence.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{
    ExperimentConfig, ExperimentKind, Metadata, MuMethod, PlotData, Provenance, RawValue, ResultRecord, Table,
};
use crate::dynamical::{subwindow_bounds, sup_travel_time};
use crate::error::{Error, Result};
use crate::estimators::{
    check_plugin, deviation_probability, estimate_cylinder_constant, estimate_region_constant, lp_deviation,
    monotone_within, mu_continuity_probe, per_replica, tail_sum, DeviationEstimate, MuReference, SiteSet,
    TailSumParams, TimeConstantEstimate,
};
use crate::geometry::{
    default_collar, partition_census, verify_connectivity, verify_detours_along_segment, Direction, RegionSpec,
    Segment, Site,
};
use crate::metric::travel_time;
use crate::plot::emit_plot;
use crate::randomness::{replica_seed, uniform, DistributionSpec, DynamicalWeightField, WeightField};
use crate::shape::{empirical_shape, limit_shape, restrict_shape, shape_deviation, LimitShape};
use crate::stats::median;

/// Replica index of the seed stream reserved for plug-in references.
const REFERENCE_STREAM: u64 = u64::MAX;
const DEFAULT_CUTOFF: f64 = 0.25;

struct Outcome {
    metrics: Value,
    raw: Vec<RawValue>,
    table: Option<Table>,
    plot: Option<PlotData>,
    passed: Option<bool>,
}

impl Outcome {
    fn new(metrics: Value, raw: Vec<RawValue>) -> Self {
        Outcome {
            metrics,
            raw,
            table: None,
            plot: None,
            passed: None,
        }
    }
}

fn now_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("result types serialize")
}

fn raw_values(label: &str, seed: u64, values: &[f64]) -> Vec<RawValue> {
    values
        .iter()
        .enumerate()
        .map(|(k, &value)| RawValue {
            label: label.to_string(),
            replica: k,
            seed: replica_seed(seed, k as u64),
            value,
        })
        .collect()
}

fn raw_table(raw: &[RawValue]) -> Table {
    Table {
        columns: ["label", "replica", "seed", "value"].map(String::from).to_vec(),
        rows: raw
            .iter()
            .map(|r| vec![r.label.clone(), r.replica.to_string(), r.seed.to_string(), r.value.to_string()])
            .collect(),
    }
}

/// Runs one experiment. The record depends only on the config, apart from
/// the metadata timestamps.
pub fn run(config: &ExperimentConfig) -> Result<ResultRecord> {
    config.validate()?;
    let started = now_ms();
    use ExperimentKind::*;
    let out = match config.experiment {
        Mu => run_mu(config)?,
        CylinderMu => run_cylinder_mu(config)?,
        Deviation => run_deviation(config)?,
        TailSum => run_tail_sum(config)?,
        Lp => run_lp(config)?,
        Shape => run_shape(config)?,
        LogWedge => run_log_wedge(config)?,
        Dynamical => run_dynamical(config)?,
        VerifyGeometry => run_verify_geometry(config)?,
        MuContinuity => run_mu_continuity(config)?,
    };
    let table = out.table.unwrap_or_else(|| raw_table(&out.raw));
    let mut echo = config.clone();
    echo.output_dir = PathBuf::new();
    Ok(ResultRecord {
        kind: config.experiment,
        config: echo,
        provenance: Provenance::for_config(config),
        metrics: out.metrics,
        raw: out.raw,
        table,
        plot: out.plot,
        passed: out.passed,
        metadata: Metadata {
            started_unix_ms: started,
            finished_unix_ms: now_ms(),
        },
    })
}

/// Directory a config's outputs go to: `<root>/<kind>/<hash>`.
pub fn output_path(root: &Path, config: &ExperimentConfig) -> PathBuf {
    root.join(config.experiment.name()).join(config.hash())
}

/// Writes result.json, data.csv and, for plottable records, plot.svg under
/// `output_path(root, config)`.
pub fn write_outputs(record: &ResultRecord, root: &Path) -> Result<PathBuf> {
    let dir = output_path(root, &record.config);
    fs::create_dir_all(&dir)?;
    let json = serde_json::to_string_pretty(record).expect("record serializes");
    fs::write(dir.join("result.json"), json + "\n")?;
    write_csv(&dir.join("data.csv"), &record.table)?;
    if record.plot.is_some() {
        fs::write(dir.join("plot.svg"), emit_plot(record)?)?;
    }
    Ok(dir)
}

fn write_csv(path: &Path, table: &Table) -> Result<()> {
    let io = |e: csv::Error| Error::Io(e.to_string());
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(&table.columns).map_err(io)?;
    for row in &table.rows {
        w.write_record(row).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_record(path: &Path) -> Result<ResultRecord> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::validation("record", e.to_string()))
}

/// The plug-in μ̂ a config asks for.
pub fn build_mu_reference(config: &ExperimentConfig, dist: &DistributionSpec) -> Result<Box<dyn MuReference>> {
    let m = config.mu_reference()?;
    let seed = replica_seed(config.seed(), REFERENCE_STREAM);
    let d = config
        .dimension()
        .ok_or_else(|| Error::validation("dim", "cannot infer the dimension"))?;
    Ok(match m.method {
        MuMethod::Shape => Box::new(limit_shape(dist, d, m.n, m.replicas, seed, config.cap())?),
        MuMethod::Direction => {
            let z = config.site()?;
            Box::new(estimate_region_constant(
                &RegionSpec::full(d),
                dist,
                &z,
                m.n,
                m.replicas,
                seed,
                config.cap(),
            )?)
        }
    })
}

fn estimate_summary(e: &TimeConstantEstimate) -> Value {
    json!({
        "direction": e.direction,
        "n": e.n,
        "mean": e.mean,
        "stderr": e.stderr,
        "ci95": e.ci95(),
        "fekete": e.fekete,
        "region": e.region,
    })
}

fn run_mu(config: &ExperimentConfig) -> Result<Outcome> {
    let dist = config.dist()?;
    let z = config.site()?;
    let region = config.region.clone().unwrap_or_else(|| RegionSpec::full(z.dim()));
    let mut estimates = Vec::new();
    let mut raw = Vec::new();
    for &n in &config.sizes.n {
        let e = estimate_region_constant(&region, dist, &z, n, config.sizes.replicas, config.seed(), config.cap())?;
        raw.extend(raw_values(&format!("mu@n={n}"), config.seed(), &e.values));
        estimates.push(e);
    }
    let plot = (estimates.len() > 1).then(|| PlotData::Trend {
        x_label: "n".into(),
        y_label: "T(0,nz)/(n|z|_1)".into(),
        xs: estimates.iter().map(|e| e.n as f64).collect(),
        ys: estimates.iter().map(|e| e.mean).collect(),
        log_log: false,
        slope: None,
    });
    let metrics = json!({ "estimates": estimates.iter().map(estimate_summary).collect::<Vec<_>>() });
    Ok(Outcome { plot, ..Outcome::new(metrics, raw) })
}

fn run_cylinder_mu(config: &ExperimentConfig) -> Result<Outcome> {
    let dist = config.dist()?;
    let z = config.site()?;
    let n = config.sizes.n[0];
    let (reps, seed, cap) = (config.sizes.replicas, config.seed(), config.cap());
    let mut raw = Vec::new();
    let lattice = estimate_region_constant(&RegionSpec::full(z.dim()), dist, &z, n, reps, seed, cap)?;
    raw.extend(raw_values("lattice", seed, &lattice.values));
    let mut ests = Vec::new();
    for &r in &config.radii {
        let e = estimate_cylinder_constant(dist, &z, r, n, reps, seed, cap)?;
        raw.extend(raw_values(&format!("cylinder@r={r}"), seed, &e.values));
        ests.push(e);
    }
    let non_increasing = monotone_within(&ests, false);
    let above_lattice = ests.iter().all(|e| e.mean >= lattice.mean - 2.0 * e.stderr.hypot(lattice.stderr));
    let metrics = json!({
        "radii": config.radii,
        "cylinder": ests.iter().map(estimate_summary).collect::<Vec<_>>(),
        "lattice": estimate_summary(&lattice),
        "non_increasing_within_2se": non_increasing,
        "above_lattice_within_2se": above_lattice,
    });
    let plot = Some(PlotData::Trend {
        x_label: "cylinder radius r".into(),
        y_label: "mu estimate".into(),
        xs: config.radii.clone(),
        ys: ests.iter().map(|e| e.mean).collect(),
        log_log: false,
        slope: None,
    });
    Ok(Outcome { plot, ..Outcome::new(metrics, raw) })
}

fn run_mu_continuity(config: &ExperimentConfig) -> Result<Outcome> {
    let z = config.site()?;
    let n = config.sizes.n[0];
    let ests = mu_continuity_probe(&config.dists, &z, n, config.sizes.replicas, config.seed(), config.cap())?;
    let mut raw = Vec::new();
    for (i, e) in ests.iter().enumerate() {
        raw.extend(raw_values(&format!("dist#{i}"), config.seed(), &e.values));
    }
    let metrics = json!({
        "dists": config.dists,
        "estimates": ests.iter().map(estimate_summary).collect::<Vec<_>>(),
    });
    let plot = Some(PlotData::Trend {
        x_label: "law index".into(),
        y_label: "mu estimate".into(),
        xs: (0..ests.len()).map(|i| i as f64).collect(),
        ys: ests.iter().map(|e| e.mean).collect(),
        log_log: false,
        slope: None,
    });
    Ok(Outcome { plot, ..Outcome::new(metrics, raw) })
}

fn run_deviation(config: &ExperimentConfig) -> Result<Outcome> {
    let dist = config.dist()?;
    let z = config.site()?;
    let region = config.region.clone().unwrap_or_else(|| RegionSpec::full(z.dim()));
    let mu_ref = build_mu_reference(config, dist)?;
    let est = deviation_probability(
        dist,
        &region,
        &z,
        config.epsilon()?,
        config.sizes.replicas,
        config.seed(),
        mu_ref.as_ref(),
        config.cap(),
    )?;
    let raw = raw_values("T(0,z)", config.seed(), &est.values);
    let mut metrics = to_value(&est);
    metrics.as_object_mut().expect("object").remove("values");
    Ok(Outcome::new(metrics, raw))
}

fn run_lp(config: &ExperimentConfig) -> Result<Outcome> {
    let dist = config.dist()?;
    let z = config.site()?;
    let region = config.region.clone().unwrap_or_else(|| RegionSpec::full(z.dim()));
    let mu_ref = build_mu_reference(config, dist)?;
    let est = lp_deviation(
        dist,
        &region,
        &z,
        config.p()?,
        config.sizes.replicas,
        config.seed(),
        mu_ref.as_ref(),
        config.cap(),
    )?;
    let raw = raw_values("|T-mu|^p/|z|^p", config.seed(), &est.values);
    let mut metrics = to_value(&est);
    metrics.as_object_mut().expect("object").remove("values");
    Ok(Outcome::new(metrics, raw))
}

fn run_tail_sum(config: &ExperimentConfig) -> Result<Outcome> {
    let dist = config.dist()?;
    let cone = config.region()?;
    let mu_ref = build_mu_reference(config, dist)?;
    let params = TailSumParams {
        p: config.p()?,
        epsilon: config.epsilon()?,
        radius: config.sizes.radius.expect("validated"),
        replicas: config.sizes.replicas,
        seed: config.seed(),
        site_set: config.site_set.unwrap_or(SiteSet::Interior),
        cap: config.cap(),
    };
    let diag = tail_sum(dist, cone, &params, mu_ref.as_ref())?;
    let raw = diag
        .sites
        .iter()
        .map(|s| RawValue {
            label: format!("p_hat@{}", s.site),
            replica: usize::MAX,
            seed: config.seed(),
            value: s.p_hat,
        })
        .collect();
    let plot = Some(PlotData::Trend {
        x_label: "r".into(),
        y_label: "partial tail sum S(r)".into(),
        xs: diag.partial_sums.iter().map(|x| x.0).collect(),
        ys: diag.partial_sums.iter().map(|x| x.1).collect(),
        log_log: true,
        slope: diag.slope,
    });
    let table = Table {
        columns: ["site", "norm", "mu", "p_hat", "wilson_lo", "wilson_hi"].map(String::from).to_vec(),
        rows: diag
            .sites
            .iter()
            .map(|s| {
                vec![
                    s.site.to_string(),
                    s.norm.to_string(),
                    s.mu.to_string(),
                    s.p_hat.to_string(),
                    s.wilson_ci.0.to_string(),
                    s.wilson_ci.1.to_string(),
                ]
            })
            .collect(),
    };
    Ok(Outcome {
        plot,
        table: Some(table),
        ..Outcome::new(to_value(&diag), raw)
    })
}

/// The limit shape a region's empirical balls are compared against: the
/// lattice shape, restricted to B(u, c) for cones.
pub fn reference_shape(ls: &LimitShape, region: &RegionSpec) -> Result<LimitShape> {
    match region {
        RegionSpec::Cone { .. } => restrict_shape(ls, region),
        RegionSpec::FullLattice { .. } => Ok(ls.clone()),
        _ => Err(Error::validation("region", "shape runs support the lattice and cones")),
    }
}

fn run_shape(config: &ExperimentConfig) -> Result<Outcome> {
    let dist = config.dist()?;
    let region = config.region()?;
    let m = config.mu_reference()?;
    if m.method != MuMethod::Shape {
        return Err(Error::validation("mu_reference.method", "shape runs need the shape reference"));
    }
    let ls = limit_shape(
        dist,
        region.dim(),
        m.n,
        m.replicas,
        replica_seed(config.seed(), REFERENCE_STREAM),
        config.cap(),
    )?;
    let reference = reference_shape(&ls, region)?;
    let eps = config.epsilon()?;
    let cutoff = config.cutoff.unwrap_or(DEFAULT_CUTOFF);
    let t_max = config.sizes.t.iter().copied().fold(0.0, f64::max);
    let mut per_t = Vec::new();
    let mut raw = Vec::new();
    let mut plot = None;
    for &t in &config.sizes.t {
        let rows = per_replica(config.seed(), config.sizes.replicas, |k, s| {
            let se = empirical_shape(region, &WeightField::new(s, dist.clone()), t, config.cap())?;
            let report = shape_deviation(&se, &reference, eps, cutoff)?;
            let cells = (k == 0 && t == t_max && se.region.dim() == 2)
                .then(|| se.cells.iter().map(|(z, _)| [z.get(0) as f64 / t, z.get(1) as f64 / t]).collect());
            Ok((report, cells))
        })?;
        let sups: Vec<f64> = rows.iter().map(|r| r.0.sup_statistic).collect();
        raw.extend(raw_values(&format!("sup@t={t}"), config.seed(), &sups));
        let both = rows.iter().filter(|r| r.0.inner && r.0.outer).count();
        per_t.push(json!({
            "t": t,
            "inner_passes": rows.iter().filter(|r| r.0.inner).count(),
            "outer_passes": rows.iter().filter(|r| r.0.outer).count(),
            "both_passes": both,
            "replicas": rows.len(),
            "median_sup_statistic": median(&sups),
            "reports": rows.iter().map(|r| &r.0).collect::<Vec<_>>(),
        }));
        if let Some(Some(cells)) = rows.into_iter().next().map(|r| r.1) {
            if region.dim() == 2 {
                let outline = reference.outline(360)?;
                let scaled = |f: f64| outline.iter().map(|p| [p[0] * f, p[1] * f]).collect();
                let cone = match region {
                    RegionSpec::Cone { u, c, .. } => {
                        let v = u.unit();
                        Some(([v[0], v[1]], *c))
                    }
                    _ => None,
                };
                plot = Some(PlotData::Shape {
                    cells,
                    cell_size: 1.0 / t,
                    inner: scaled(1.0 - eps),
                    outer: scaled(1.0 + eps),
                    cone,
                });
            }
        }
    }
    let metrics = json!({
        "epsilon": eps,
        "cutoff": cutoff,
        "limit_shape": reference,
        "by_time": per_t,
    });
    Ok(Outcome { plot, ..Outcome::new(metrics, raw) })
}

/// T_G(0, n·e1 + e2)/n per replica, environments shared across n.
pub fn log_wedge_ratios(
    dist: &DistributionSpec,
    region: &RegionSpec,
    ns: &[i64],
    replicas: usize,
    seed: u64,
    cap: usize,
) -> Result<Vec<Vec<f64>>> {
    let origin = Site::origin(2);
    per_replica(seed, replicas, |_, s| {
        let field = WeightField::new(s, dist.clone());
        ns.iter()
            .map(|&n| Ok(travel_time(region, &field, &origin, &Site::new(&[n, 1]), cap)?.cost / n as f64))
            .collect()
    })
}

fn run_log_wedge(config: &ExperimentConfig) -> Result<Outcome> {
    let dist = config.dist()?;
    let region = config.region()?;
    let ns = &config.sizes.n;
    let rows = log_wedge_ratios(dist, region, ns, config.sizes.replicas, config.seed(), config.cap())?;
    let mut raw = Vec::new();
    let mut medians = Vec::new();
    for (i, n) in ns.iter().enumerate() {
        let vals: Vec<f64> = rows.iter().map(|r| r[i]).collect();
        raw.extend(raw_values(&format!("T/n@n={n}"), config.seed(), &vals));
        medians.push(median(&vals));
    }
    let metrics = json!({
        "n": ns,
        "median": medians,
        "last_over_first": medians.last().expect("nonempty") / medians[0],
    });
    let plot = Some(PlotData::Trend {
        x_label: "n".into(),
        y_label: "median T(0, n e1 + e2)/n".into(),
        xs: ns.iter().map(|&n| n as f64).collect(),
        ys: medians,
        log_log: true,
        slope: None,
    });
    Ok(Outcome { plot, ..Outcome::new(metrics, raw) })
}

fn run_dynamical(config: &ExperimentConfig) -> Result<Outcome> {
    let dist = config.dist()?;
    let region = config.region()?;
    let z = config.site()?;
    let window = config.window.expect("validated");
    let origin = Site::origin(z.dim());
    let cap = config.cap();
    let rows = per_replica(config.seed(), config.sizes.replicas, |_, s| {
        let field = DynamicalWeightField::new(s, dist.clone(), window.1);
        let tr = sup_travel_time(&field, region, &origin, &z, window, cap)?;
        // Over long windows the bar environment can percolate through zeros;
        // its cost is then left out rather than failing the run.
        let hat = tr.hat_cost;
        let bar = if window.1 > window.0 {
            match subwindow_bounds(&field, region, &origin, &z, window, window.1 - window.0, cap) {
                Ok(w) => Some(w[0].bar_cost),
                Err(Error::BudgetExceeded { .. }) => None,
                Err(e) => return Err(e),
            }
        } else {
            Some(tr.values[0])
        };
        let bracket_failures = match config.delta {
            Some(delta) => subwindow_bounds(&field, region, &origin, &z, window, delta, cap)?
                .iter()
                .filter(|w| {
                    [w.start, w.end].iter().any(|&s| {
                        let v = tr.value_at(s);
                        v < w.bar_cost || v > w.hat_cost
                    })
                })
                .count(),
            None => 0,
        };
        Ok((tr, bar, hat, bracket_failures))
    })?;
    let sandwich_ok = rows
        .iter()
        .all(|(tr, bar, hat, _)| bar.is_none_or(|b| b <= tr.inf) && tr.sup <= *hat);
    let bracket_failures: usize = rows.iter().map(|r| r.3).sum();
    let sups: Vec<f64> = rows.iter().map(|r| r.0.sup).collect();
    let mut raw = raw_values("sup", config.seed(), &sups);
    raw.extend(raw_values("inf", config.seed(), &rows.iter().map(|r| r.0.inf).collect::<Vec<_>>()));
    let deviation = match config.epsilon {
        Some(eps) => {
            let mu_ref = build_mu_reference(config, dist)?;
            check_plugin(mu_ref.as_ref(), eps, z.dim())?;
            let mu = mu_ref.mu(&z)?;
            let se = mu_ref.stderr_per_unit();
            let worst = rows
                .iter()
                .map(|(tr, ..)| if (tr.sup - mu).abs() >= (tr.inf - mu).abs() { tr.sup } else { tr.inf })
                .collect();
            let first = rows.iter().map(|(tr, ..)| tr.values[0]).collect();
            let mut dynamic = to_value(&DeviationEstimate::from_values(z, eps, config.seed(), mu, se, worst));
            let mut initial = to_value(&DeviationEstimate::from_values(z, eps, config.seed(), mu, se, first));
            dynamic.as_object_mut().expect("object").remove("values");
            initial.as_object_mut().expect("object").remove("values");
            Some(json!({ "dynamic": dynamic, "initial": initial }))
        }
        None => None,
    };
    let summaries: Vec<Value> = rows
        .iter()
        .map(|(tr, bar, hat, _)| {
            json!({
                "sup": tr.sup, "inf": tr.inf, "initial": tr.values[0], "bar": bar, "hat": hat,
                "events": tr.events, "recomputations": tr.recomputations,
                "box_sites": tr.box_sites, "box_edges": tr.box_edges,
            })
        })
        .collect();
    let metrics = json!({
        "window": window,
        "sandwich_holds": sandwich_ok,
        "subwindow_bracket_failures": bracket_failures,
        "deviation": deviation,
        "replicas": summaries,
    });
    let mut table = Table {
        columns: ["replica", "time", "value"].map(String::from).to_vec(),
        rows: Vec::new(),
    };
    for (k, (tr, ..)) in rows.iter().enumerate() {
        let times = std::iter::once(window.0).chain(tr.breakpoints.iter().copied());
        for (t, v) in times.zip(&tr.values) {
            table.rows.push(vec![k.to_string(), t.to_string(), v.to_string()]);
        }
    }
    let plot = rows.first().map(|(tr, bar, hat, _)| PlotData::Trajectory {
        window,
        breakpoints: tr.breakpoints.clone(),
        values: tr.values.clone(),
        bar: *bar,
        hat: *hat,
    });
    Ok(Outcome {
        plot,
        table: Some(table),
        ..Outcome::new(metrics, raw)
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeometryCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Sup-norm bound of the boundary partition census.
pub const CENSUS_RADIUS: i64 = 60;
/// Longest segment used for the detour check.
pub const DETOUR_SEGMENT_LENGTH: i64 = 50;

/// The three exact geometry checks: connectivity of r = √d capsules for 50
/// random endpoints, detours along every integer-length segment up to 50 in
/// each direction with coordinates in {0, 1, 2}, and the boundary partition
/// of Cone(e1, 0.5) for ‖z‖∞ ≤ 60.
pub fn verify_geometry(d: usize, seed: u64) -> Result<Vec<GeometryCheck>> {
    let sd = (d as f64).sqrt();
    let mut checks = Vec::new();

    let mut bad = Vec::new();
    for k in 0..50u64 {
        let coords: Vec<i64> = (0..d as u64)
            .map(|i| (uniform(seed, k as u128, 7, i) * 61.0).floor() as i64 - 30)
            .collect();
        let z = Site::new(&coords);
        if !z.is_origin() && !verify_connectivity(&z, sd) {
            bad.push(z.to_string());
        }
    }
    checks.push(GeometryCheck {
        name: "capsule connectivity (50 random endpoints, r = sqrt(d))".into(),
        passed: bad.is_empty(),
        detail: if bad.is_empty() { "all connected".into() } else { format!("disconnected: {}", bad.join(", ")) },
    });

    let collar = default_collar(d);
    let mut failures = Vec::new();
    let (mut pairs, mut max_len, mut max_dist) = (0, 0, 0.0f64);
    let mut segments = 0;
    for code in 1..3i64.pow(d as u32) {
        let coords: Vec<i64> = (0..d).map(|i| code / 3i64.pow(i as u32) % 3).collect();
        let u = Direction::new(Site::new(&coords))?;
        for len in 1..=DETOUR_SEGMENT_LENGTH {
            let l = len as f64;
            let end: Vec<i64> = u.unit().iter().map(|x| (x * l).round() as i64).collect();
            let rep = verify_detours_along_segment(&Site::origin(d), &Site::new(&end), &Segment::new(u, 0.0, l), collar)?;
            segments += 1;
            pairs += rep.pairs;
            max_len = max_len.max(rep.max_length);
            max_dist = max_dist.max(rep.max_distance);
            failures.extend(rep.failures.into_iter().map(|f| format!("{coords:?} len {len}: {f}")));
        }
    }
    checks.push(GeometryCheck {
        name: "edge-disjoint detours inside the 4 sqrt(d) sausage".into(),
        passed: failures.is_empty(),
        detail: format!(
            "{segments} segments, {pairs} steps, longest detour {max_len}, max distance {max_dist:.3}{}",
            failures.first().map(|f| format!("; first failure {f}")).unwrap_or_default()
        ),
    });

    let cone = RegionSpec::cone(Direction::axis(d, 0), 0.5);
    let census = partition_census(&cone, CENSUS_RADIUS)?;
    checks.push(GeometryCheck {
        name: format!("boundary partition witnesses, sup norm <= {CENSUS_RADIUS}"),
        passed: census.passed(),
        detail: format!(
            "{} boundary sites, fitted M {:?}, max witness distance {}{}",
            census.boundary_sites,
            census.fitted_m,
            census.max_witness_distance,
            census.failures.first().map(|f| format!("; first failure {f}")).unwrap_or_default()
        ),
    });
    Ok(checks)
}

fn run_verify_geometry(config: &ExperimentConfig) -> Result<Outcome> {
    let d = config.dimension().expect("validated");
    let checks = verify_geometry(d, config.seed())?;
    let passed = checks.iter().all(|c| c.passed);
    let table = Table {
        columns: ["check", "result", "detail"].map(String::from).to_vec(),
        rows: checks
            .iter()
            .map(|c| vec![c.name.clone(), if c.passed { "PASS" } else { "FAIL" }.into(), c.detail.clone()])
            .collect(),
    };
    Ok(Outcome {
        table: Some(table),
        passed: Some(passed),
        ..Outcome::new(json!({ "d": d, "checks": checks }), Vec::new())
    })
}
