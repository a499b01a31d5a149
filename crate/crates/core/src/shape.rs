//! Empirical balls W(t), the polygonal μ̂ unit ball, its cone restriction and
//! the shape-inclusion report.

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{estimate_time_constant, MuReference, TimeConstantEstimate};
use crate::geometry::{box_sites, RegionSpec, Site};
use crate::metric::reachable_set;
use crate::randomness::{DistributionSpec, EdgeWeights};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeEstimate {
    pub t: f64,
    /// Sites with T(0, z) ≤ t and their travel times, in settle order.
    pub cells: Vec<(Site, f64)>,
    pub scale: f64,
    pub region: RegionSpec,
}

impl ShapeEstimate {
    pub fn cell_set(&self) -> FxHashSet<Site> {
        self.cells.iter().map(|c| c.0).collect()
    }
}

/// Sites reachable from the origin within time t.
pub fn empirical_shape<W: EdgeWeights + ?Sized>(
    region: &RegionSpec,
    weights: &W,
    t: f64,
    cap: usize,
) -> Result<ShapeEstimate> {
    let origin = Site::origin(region.dim());
    let cells = reachable_set(region, weights, &origin, t, cap)?;
    Ok(ShapeEstimate {
        t,
        cells,
        scale: if t > 0.0 { 1.0 / t } else { f64::INFINITY },
        region: region.clone(),
    })
}

/// The lattice symmetry group: all signed coordinate permutations.
pub fn lattice_symmetries(d: usize) -> Vec<(Vec<usize>, Vec<i64>)> {
    fn perms(items: Vec<usize>) -> Vec<Vec<usize>> {
        if items.len() <= 1 {
            return vec![items];
        }
        let mut out = Vec::new();
        for i in 0..items.len() {
            let mut rest = items.clone();
            let h = rest.remove(i);
            for mut p in perms(rest) {
                p.insert(0, h);
                out.push(p);
            }
        }
        out
    }
    let mut out = Vec::new();
    for p in perms((0..d).collect()) {
        for mask in 0..(1u32 << d) {
            let signs = (0..d).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
            out.push((p.clone(), signs));
        }
    }
    out
}

fn apply(sym: &(Vec<usize>, Vec<i64>), z: &Site) -> Site {
    let v: Vec<i64> = (0..z.dim()).map(|i| sym.1[i] * z.get(sym.0[i])).collect();
    Site::new(&v)
}

/// Orbit of a site under the lattice symmetries, sorted.
pub fn orbit(z: &Site) -> Vec<Site> {
    let mut out: Vec<Site> = lattice_symmetries(z.dim()).iter().map(|s| apply(s, z)).collect();
    out.sort();
    out.dedup();
    out
}

/// Representatives of the direction fan: primitive (a, b), 0 ≤ b ≤ a ≤ 4 in
/// d = 2, and {(1,0,0), (1,1,0), (1,1,1)} (the 26 vectors of {−1,0,1}^3) in d = 3.
pub fn fan_representatives(d: usize) -> Result<Vec<Site>> {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    match d {
        2 => {
            let mut out = Vec::new();
            for a in 1..=4 {
                for b in 0..=a {
                    if gcd(a, b) == 1 {
                        out.push(Site::new(&[a, b]));
                    }
                }
            }
            Ok(out)
        }
        3 => Ok(vec![Site::new(&[1, 0, 0]), Site::new(&[1, 1, 0]), Site::new(&[1, 1, 1])]),
        _ => Err(Error::contract("direction fans exist for d = 2 and d = 3")),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FanDirection {
    pub direction: Site,
    pub representative: Site,
    /// μ̂(direction) for the lattice vector itself.
    pub mu: f64,
    pub mu_stderr: f64,
    /// Euclidean radius |z| / μ̂(z) of the unit ball in this direction.
    pub radius: f64,
    pub radius_ci: (f64, f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitShape {
    pub d: usize,
    /// Sorted by angle in d = 2.
    pub directions: Vec<FanDirection>,
    pub estimates: Vec<TimeConstantEstimate>,
    /// B(u, c) when the shape has been restricted to a cone.
    pub restriction: Option<RegionSpec>,
}

fn angle(z: &[f64]) -> f64 {
    z[1].atan2(z[0])
}

impl LimitShape {
    pub fn from_directions(d: usize, mut directions: Vec<FanDirection>, estimates: Vec<TimeConstantEstimate>) -> Self {
        if d == 2 {
            directions.sort_by(|a, b| {
                angle(&a.direction.to_f64()).total_cmp(&angle(&b.direction.to_f64()))
            });
        } else {
            directions.sort_by_key(|f| f.direction);
        }
        LimitShape {
            d,
            directions,
            estimates,
            restriction: None,
        }
    }

    /// Vertices z / μ̂(z) of the star-shaped polygon, in angle order.
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        self.directions
            .iter()
            .map(|f| f.direction.to_f64().iter().map(|x| x / f.mu).collect())
            .collect()
    }

    /// Precomputed gauge for repeated evaluation (d = 2).
    pub fn polygon_gauge(&self) -> Result<PolygonGauge> {
        if self.d != 2 {
            return Err(Error::contract("the polygon gauge is implemented for d = 2"));
        }
        let verts: Vec<[f64; 2]> = self.vertices().iter().map(|v| [v[0], v[1]]).collect();
        let angles = verts.iter().map(|v| angle(v)).collect();
        Ok(PolygonGauge {
            verts,
            angles,
            restriction: self.restriction.clone(),
        })
    }

    /// Piecewise-linear gauge of the star-shaped polygon, ignoring any restriction.
    pub fn gauge_unrestricted(&self, x: &[f64]) -> Result<f64> {
        Ok(self.polygon_gauge()?.gauge_unrestricted(x))
    }

    /// Gauge of the (possibly restricted) shape; +∞ outside the restriction.
    pub fn gauge(&self, x: &[f64]) -> Result<f64> {
        Ok(self.polygon_gauge()?.gauge(x))
    }

    pub fn max_stderr_per_unit(&self) -> f64 {
        self.estimates.iter().map(|e| e.stderr).fold(0.0, f64::max)
    }

    /// Boundary polygon for drawing: the vertices, clipped to the restriction
    /// cone by sampling rays when restricted.
    pub fn outline(&self, samples: usize) -> Result<Vec<[f64; 2]>> {
        if self.d != 2 {
            return Err(Error::contract("outlines are drawn for d = 2"));
        }
        if self.restriction.is_none() {
            return Ok(self.vertices().iter().map(|v| [v[0], v[1]]).collect());
        }
        let mut out = vec![[0.0, 0.0]];
        for k in 0..samples {
            let th = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * k as f64 / samples as f64;
            let x = [th.cos(), th.sin()];
            let g = self.gauge(&x)?;
            if g.is_finite() {
                out.push([x[0] / g, x[1] / g]);
            }
        }
        Ok(out)
    }
}

pub struct PolygonGauge {
    verts: Vec<[f64; 2]>,
    angles: Vec<f64>,
    restriction: Option<RegionSpec>,
}

impl PolygonGauge {
    pub fn gauge_unrestricted(&self, x: &[f64]) -> f64 {
        if x[0] == 0.0 && x[1] == 0.0 {
            return 0.0;
        }
        let n = self.verts.len();
        let th = angle(x);
        // first vertex strictly beyond θ in angle order, cyclically
        let k = self.angles.partition_point(|&a| a <= th) % n;
        let b = &self.verts[k];
        let a = &self.verts[(k + n - 1) % n];
        let det = a[0] * b[1] - a[1] * b[0];
        let alpha = (x[0] * b[1] - x[1] * b[0]) / det;
        let beta = (a[0] * x[1] - a[1] * x[0]) / det;
        alpha + beta
    }

    pub fn gauge(&self, x: &[f64]) -> f64 {
        match &self.restriction {
            Some(r) if !r.contains_point(x) => f64::INFINITY,
            _ => self.gauge_unrestricted(x),
        }
    }
}

impl MuReference for LimitShape {
    fn mu(&self, z: &Site) -> Result<f64> {
        self.gauge_unrestricted(&z.to_f64())
    }

    fn stderr_per_unit(&self) -> f64 {
        self.max_stderr_per_unit()
    }
}

/// Degenerate when the 95% interval for μ̂ reaches 0, or when μ̂ at scale n
/// has dropped below half its value at n/4 (the 1/n decay of a vanishing
/// time constant).
fn degenerate(e: &TimeConstantEstimate) -> bool {
    let (lo, _) = e.ci95();
    if lo <= 0.0 {
        return true;
    }
    match (e.fekete.first(), e.fekete.last()) {
        (Some(&(m0, a)), Some(&(m1, b))) if m1 > m0 => b < 0.5 * a,
        _ => false,
    }
}

/// μ̂ over the direction fan. Each representative z is estimated at scale
/// ⌈n / |z|⌉ so all endpoints sit at Euclidean distance about n; the other
/// fan directions inherit the value by lattice symmetry.
pub fn limit_shape(
    dist: &DistributionSpec,
    d: usize,
    n: i64,
    replicas: usize,
    seed: u64,
    cap: usize,
) -> Result<LimitShape> {
    let reps = fan_representatives(d)?;
    let mut directions = Vec::new();
    let mut estimates = Vec::new();
    for rep in reps {
        let nk = ((n as f64 / rep.l2()).ceil() as i64).max(1);
        let e = estimate_time_constant(dist, &rep, nk, replicas, seed, cap)?;
        if degenerate(&e) {
            return Err(Error::DegenerateShape(rep));
        }
        let norm1 = rep.l1() as f64;
        let mu = e.mean * norm1;
        let (lo, hi) = e.ci95();
        for z in orbit(&rep) {
            directions.push(FanDirection {
                direction: z,
                representative: rep,
                mu,
                mu_stderr: e.stderr * norm1,
                radius: z.l2() / mu,
                radius_ci: (z.l2() / (hi * norm1), z.l2() / (lo * norm1)),
            });
        }
        estimates.push(e);
    }
    Ok(LimitShape::from_directions(d, directions, estimates))
}

/// W^μ ∩ B(u, c). A cone with c > 1 covers the plane and changes nothing.
pub fn restrict_shape(ls: &LimitShape, cone: &RegionSpec) -> Result<LimitShape> {
    let RegionSpec::Cone { c, .. } = cone else {
        return Err(Error::contract("restriction needs a cone region"));
    };
    let mut out = ls.clone();
    if *c <= 1.0 {
        out.restriction = Some(cone.interior()?);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InclusionReport {
    pub t: f64,
    pub epsilon: f64,
    /// (1 − ε)·shape ⊆ W(t)/t
    pub inner: bool,
    /// W(t)/t ⊆ (1 + ε)·shape
    pub outer: bool,
    pub inner_failures: usize,
    pub outer_failures: usize,
    /// max over cells with ‖z‖₁ ≥ cutoff·t of |T(0,z) − μ̂(z)| / ‖z‖₁
    pub sup_statistic: f64,
    pub cutoff: f64,
}

/// Compares an empirical ball with a limit shape. For cone regions the
/// inner test and the sup statistic use interior sites only, and the outer
/// test only the parts of cells inside B(u, c).
pub fn shape_deviation(
    se: &ShapeEstimate,
    ls: &LimitShape,
    epsilon: f64,
    cutoff: f64,
) -> Result<InclusionReport> {
    let d = se.region.dim();
    if d != ls.d {
        return Err(Error::DimensionMismatch { expected: d, got: ls.d });
    }
    let interior = if se.region.is_cone() {
        Some(se.region.interior()?)
    } else {
        None
    };
    let in_scope = |x: &[f64]| interior.as_ref().is_none_or(|r| r.contains_point(x));
    let t = se.t;
    let cells = se.cell_set();
    let g = ls.polygon_gauge()?;

    let reach = ls
        .directions
        .iter()
        .map(|f| f.radius)
        .fold(0.0, f64::max)
        * t
        + 2.0;
    let r = reach.ceil() as i64;
    let mut inner_failures = 0;
    for z in box_sites(&Site::new(&vec![-r; d]), &Site::new(&vec![r; d])) {
        let p = z.to_f64();
        if !in_scope(&p) {
            continue;
        }
        if g.gauge(&p) <= (1.0 - epsilon) * t && !cells.contains(&z) {
            inner_failures += 1;
        }
    }

    let mut outer_failures = 0;
    let mut sup: f64 = 0.0;
    for (z, tz) in &se.cells {
        let centre = z.to_f64();
        let mut bad = false;
        for corner in 0..(1u32 << d) {
            let p: Vec<f64> = (0..d)
                .map(|i| centre[i] + if corner >> i & 1 == 1 { 0.5 } else { -0.5 })
                .collect();
            if in_scope(&p) && g.gauge_unrestricted(&p) > (1.0 + epsilon) * t {
                bad = true;
            }
        }
        if in_scope(&centre) && g.gauge_unrestricted(&centre) > (1.0 + epsilon) * t {
            bad = true;
        }
        outer_failures += bad as usize;
        let n1 = z.l1() as f64;
        if n1 >= cutoff * t && in_scope(&centre) {
            sup = sup.max((tz - g.gauge_unrestricted(&centre)).abs() / n1);
        }
    }
    Ok(InclusionReport {
        t,
        epsilon,
        inner: inner_failures == 0,
        outer: outer_failures == 0,
        inner_failures,
        outer_failures,
        sup_statistic: sup,
        cutoff,
    })
}

fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut p = points.to_vec();
    p.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let cross = |o: &[f64; 2], a: &[f64; 2], b: &[f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for q in &p {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], q) <= 0.0 {
            lower.pop();
        }
        lower.push(*q);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for q in p.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], q) <= 0.0 {
            upper.pop();
        }
        upper.push(*q);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Gauge of a convex polygon (counter-clockwise, origin inside).
fn hull_gauge(hull: &[[f64; 2]], x: &[f64; 2]) -> f64 {
    let n = hull.len();
    (0..n)
        .map(|i| {
            let a = hull[i];
            let b = hull[(i + 1) % n];
            let normal = [b[1] - a[1], a[0] - b[0]];
            (normal[0] * x[0] + normal[1] * x[1]) / (normal[0] * a[0] + normal[1] * a[1])
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexityDefect {
    pub direction: Site,
    /// 1 − hull gauge of the vertex: 0 on the hull, positive inside.
    pub defect: f64,
    /// 2·stderr of μ̂ relative to μ̂ in that direction.
    pub band: f64,
}

/// How far each polygon vertex falls inside the convex hull of all vertices.
pub fn convexity_defects(ls: &LimitShape) -> Result<Vec<ConvexityDefect>> {
    if ls.d != 2 {
        return Err(Error::contract("convexity is measured for d = 2"));
    }
    let v: Vec<[f64; 2]> = ls.vertices().iter().map(|p| [p[0], p[1]]).collect();
    let hull = convex_hull(&v);
    Ok(ls
        .directions
        .iter()
        .zip(&v)
        .map(|(f, p)| ConvexityDefect {
            direction: f.direction,
            defect: 1.0 - hull_gauge(&hull, p),
            band: 2.0 * f.mu_stderr / f.mu,
        })
        .collect())
}

/// Fraction of lattice sites inside (1 − ε)·hull(cells) that are not cells.
pub fn hull_defect(se: &ShapeEstimate, epsilon: f64) -> Result<f64> {
    if se.region.dim() != 2 {
        return Err(Error::contract("hull defects are measured for d = 2"));
    }
    let pts: Vec<[f64; 2]> = se.cells.iter().map(|(z, _)| [z.get(0) as f64, z.get(1) as f64]).collect();
    let hull = convex_hull(&pts);
    if hull.len() < 3 {
        return Ok(0.0);
    }
    let cells = se.cell_set();
    let r = pts.iter().map(|p| p[0].abs().max(p[1].abs())).fold(0.0, f64::max).ceil() as i64;
    let (mut inside, mut missing) = (0usize, 0usize);
    for z in box_sites(&Site::new(&[-r, -r]), &Site::new(&[r, r])) {
        let p = [z.get(0) as f64, z.get(1) as f64];
        if hull_gauge(&hull, &p) <= 1.0 - epsilon {
            inside += 1;
            missing += !cells.contains(&z) as usize;
        }
    }
    Ok(if inside == 0 { 0.0 } else { missing as f64 / inside as f64 })
}
