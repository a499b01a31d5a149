use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::site::Site;
use crate::error::{Error, Result};

/// Relative slack applied to closed-ball tests. Points inside the slack count as members.
pub const BALL_MARGIN: f64 = 1e-9;

/// A lattice direction z, used in the rational unit form z/|z|.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Direction {
    z: Site,
    norm: f64,
}

impl Direction {
    pub fn new(z: Site) -> Result<Self> {
        if z.is_origin() {
            return Err(Error::contract("direction vector must be non-zero"));
        }
        Ok(Direction { z, norm: z.l2() })
    }

    pub fn axis(dim: usize, axis: usize) -> Self {
        Direction::new(Site::unit(dim, axis)).unwrap()
    }

    /// Rational approximation of an arbitrary unit vector: `u` is scaled by
    /// `resolution` and rounded. Returns the direction and the Euclidean
    /// distance between `u/|u|` and the approximation.
    pub fn approximate(u: &[f64], resolution: f64) -> Result<(Self, f64)> {
        let n = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::contract("cannot approximate a zero direction"));
        }
        let z: Vec<i64> = u.iter().map(|x| (x / n * resolution).round() as i64).collect();
        let dir = Direction::new(Site::try_new(&z)?)?;
        let err = u
            .iter()
            .zip(dir.unit())
            .map(|(a, b)| (a / n - b).powi(2))
            .sum::<f64>()
            .sqrt();
        Ok((dir, err))
    }

    pub fn lattice(&self) -> Site {
        self.z
    }

    pub fn dim(&self) -> usize {
        self.z.dim()
    }

    /// |z|
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn unit(&self) -> Vec<f64> {
        self.z.coords().iter().map(|&x| x as f64 / self.norm).collect()
    }

    /// x·u for a lattice site x.
    #[inline]
    pub fn project(&self, x: &Site) -> f64 {
        x.dot(&self.z) as f64 / self.norm
    }
}

impl Serialize for Direction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.z.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Direction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let z = Site::deserialize(d)?;
        Direction::new(z).map_err(serde::de::Error::custom)
    }
}

/// The collar 4√d that makes the cone graph well connected.
pub fn default_collar(dim: usize) -> f64 {
    4.0 * (dim as f64).sqrt()
}

/// Vertex sets of induced subgraphs of Z^d.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RegionSpec {
    FullLattice {
        d: usize,
    },
    /// ⋃_{a≥0} B(au, ca + collar)
    Cone {
        d: usize,
        u: Direction,
        c: f64,
        collar: f64,
    },
    /// ⋃_{a≥0} B(au, ca)
    ConeInterior {
        d: usize,
        u: Direction,
        c: f64,
    },
    /// ⋃_{a∈R} B(a·axis, r)
    Cylinder {
        d: usize,
        axis: Direction,
        r: f64,
    },
    /// ⋃_{a∈[0,1]} B(x + a(y−x), r)
    Capsule {
        d: usize,
        x: Vec<f64>,
        y: Vec<f64>,
        r: f64,
    },
    /// {x : normal·x ≥ offset}
    HalfSpace {
        d: usize,
        normal: Vec<i64>,
        offset: f64,
    },
    /// {(x,y) : x ≥ 0, 0 ≤ y ≤ a·log(1+x)}, d = 2 only.
    LogWedge {
        a: f64,
    },
}

/// Interior / boundary / outside split of a cone graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SiteClass {
    Interior,
    Boundary,
    Outside,
}

/// Does some a ≥ 0 satisfy |x − au| ≤ ca + k? Closed form of
/// (1−c²)a² − 2(t+ck)a + (|x|²−k²) ≤ 0 with t = x·u.
#[inline]
fn cone_feasible(t: f64, x2: f64, c: f64, k: f64) -> bool {
    let cq = x2 - k * k;
    if cq <= BALL_MARGIN * k * k.max(1.0) {
        return true;
    }
    let a = 1.0 - c * c;
    let bh = t + c * k;
    if a < 0.0 {
        return true;
    }
    if bh <= 0.0 {
        return false;
    }
    if a == 0.0 {
        return true;
    }
    let disc = bh * bh - a * cq;
    disc >= -BALL_MARGIN * (bh * bh).max(a * cq).max(1.0)
}

fn point_segment_dist_sq(p: &[f64], x: &[f64], y: &[f64]) -> f64 {
    let mut dd = 0.0;
    let mut pd = 0.0;
    for i in 0..p.len() {
        let di = y[i] - x[i];
        dd += di * di;
        pd += (p[i] - x[i]) * di;
    }
    let a = if dd == 0.0 { 0.0 } else { (pd / dd).clamp(0.0, 1.0) };
    (0..p.len())
        .map(|i| {
            let q = x[i] + a * (y[i] - x[i]);
            (p[i] - q).powi(2)
        })
        .sum()
}

impl RegionSpec {
    pub fn full(d: usize) -> Self {
        RegionSpec::FullLattice { d }
    }

    /// H(u, c) with the standard 4√d collar.
    pub fn cone(u: Direction, c: f64) -> Self {
        let d = u.dim();
        RegionSpec::Cone {
            d,
            u,
            c,
            collar: default_collar(d),
        }
    }

    pub fn cone_interior(u: Direction, c: f64) -> Self {
        RegionSpec::ConeInterior { d: u.dim(), u, c }
    }

    pub fn cylinder(axis: Direction, r: f64) -> Self {
        RegionSpec::Cylinder {
            d: axis.dim(),
            axis,
            r,
        }
    }

    pub fn capsule(x: &[f64], y: &[f64], r: f64) -> Self {
        assert_eq!(x.len(), y.len());
        RegionSpec::Capsule {
            d: x.len(),
            x: x.to_vec(),
            y: y.to_vec(),
            r,
        }
    }

    pub fn capsule_sites(x: &Site, y: &Site, r: f64) -> Self {
        Self::capsule(&x.to_f64(), &y.to_f64(), r)
    }

    pub fn half_space(normal: Site, offset: f64) -> Self {
        RegionSpec::HalfSpace {
            d: normal.dim(),
            normal: normal.to_vec(),
            offset,
        }
    }

    pub fn log_wedge(a: f64) -> Self {
        RegionSpec::LogWedge { a }
    }

    pub fn dim(&self) -> usize {
        match self {
            RegionSpec::FullLattice { d }
            | RegionSpec::Cone { d, .. }
            | RegionSpec::ConeInterior { d, .. }
            | RegionSpec::Cylinder { d, .. }
            | RegionSpec::Capsule { d, .. }
            | RegionSpec::HalfSpace { d, .. } => *d,
            RegionSpec::LogWedge { .. } => 2,
        }
    }

    /// Checks parameter sanity; used by config validation.
    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        if !(2..=super::MAX_DIM).contains(&d) {
            return Err(Error::validation("region.d", format!("unsupported dimension {d}")));
        }
        let check_dir = |u: &Direction, field: &str| {
            if u.dim() != d {
                Err(Error::validation(field, "direction dimension differs from d"))
            } else {
                Ok(())
            }
        };
        match self {
            RegionSpec::FullLattice { .. } => Ok(()),
            RegionSpec::Cone { u, c, collar, .. } => {
                check_dir(u, "region.u")?;
                if !(*c > 0.0) || !c.is_finite() {
                    return Err(Error::validation("region.c", "must be positive"));
                }
                if !(*collar >= 0.0) {
                    return Err(Error::validation("region.collar", "must be non-negative"));
                }
                Ok(())
            }
            RegionSpec::ConeInterior { u, c, .. } => {
                check_dir(u, "region.u")?;
                if !(*c > 0.0) {
                    return Err(Error::validation("region.c", "must be positive"));
                }
                Ok(())
            }
            RegionSpec::Cylinder { axis, r, .. } => {
                check_dir(axis, "region.axis")?;
                if !(*r >= 0.0) {
                    return Err(Error::validation("region.r", "must be non-negative"));
                }
                Ok(())
            }
            RegionSpec::Capsule { x, y, r, .. } => {
                if x.len() != d || y.len() != d {
                    return Err(Error::validation("region.x", "endpoint dimension differs from d"));
                }
                if !(*r >= 0.0) {
                    return Err(Error::validation("region.r", "must be non-negative"));
                }
                Ok(())
            }
            RegionSpec::HalfSpace { normal, .. } => {
                if normal.len() != d || normal.iter().all(|&n| n == 0) {
                    return Err(Error::validation("region.normal", "must be a non-zero d-vector"));
                }
                Ok(())
            }
            RegionSpec::LogWedge { a } => {
                if !(*a > 0.0) {
                    return Err(Error::validation("region.a", "must be positive"));
                }
                Ok(())
            }
        }
    }

    /// Membership predicate. Panics only through `contains`'s checked twin.
    #[inline]
    pub fn contains_unchecked(&self, x: &Site) -> bool {
        match self {
            RegionSpec::FullLattice { .. } => true,
            RegionSpec::Cone { u, c, collar, .. } => {
                cone_feasible(u.project(x), x.l2_sq() as f64, *c, *collar)
            }
            RegionSpec::ConeInterior { u, c, .. } => {
                cone_feasible(u.project(x), x.l2_sq() as f64, *c, 0.0)
            }
            RegionSpec::Cylinder { axis, r, .. } => {
                let z = axis.lattice();
                let z2 = z.l2_sq() as i128;
                let xz = x.dot(&z) as i128;
                let perp = x.l2_sq() as i128 * z2 - xz * xz;
                let rhs = r * r * z2 as f64;
                (perp as f64) <= rhs + BALL_MARGIN * rhs.max(1.0)
            }
            RegionSpec::Capsule { x: a, y: b, r, .. } => {
                let p = x.to_f64();
                let dist2 = point_segment_dist_sq(&p, a, b);
                dist2 <= r * r + BALL_MARGIN * (r * r).max(1.0)
            }
            RegionSpec::HalfSpace { normal, offset, .. } => {
                let dot: i64 = normal.iter().enumerate().map(|(i, n)| n * x.get(i)).sum();
                dot as f64 >= *offset
            }
            RegionSpec::LogWedge { a } => {
                let (px, py) = (x.get(0), x.get(1));
                px >= 0 && py >= 0 && (py as f64) <= a * ((px as f64).ln_1p()) + BALL_MARGIN
            }
        }
    }

    /// Membership of a continuum point.
    pub fn contains_point(&self, x: &[f64]) -> bool {
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
        let x2 = dot(x, x);
        match self {
            RegionSpec::FullLattice { .. } => true,
            RegionSpec::Cone { u, c, collar, .. } => cone_feasible(dot(x, &u.unit()), x2, *c, *collar),
            RegionSpec::ConeInterior { u, c, .. } => cone_feasible(dot(x, &u.unit()), x2, *c, 0.0),
            RegionSpec::Cylinder { axis, r, .. } => {
                let t = dot(x, &axis.unit());
                x2 - t * t <= r * r * (1.0 + BALL_MARGIN)
            }
            RegionSpec::Capsule { x: a, y: b, r, .. } => {
                point_segment_dist_sq(x, a, b) <= r * r + BALL_MARGIN * (r * r).max(1.0)
            }
            RegionSpec::HalfSpace { normal, offset, .. } => {
                normal.iter().zip(x).map(|(n, v)| *n as f64 * v).sum::<f64>() >= *offset
            }
            RegionSpec::LogWedge { a } => x[0] >= 0.0 && x[1] >= 0.0 && x[1] <= a * x[0].ln_1p() + BALL_MARGIN,
        }
    }

    pub fn contains(&self, x: &Site) -> Result<bool> {
        x.check_dim(self.dim())?;
        Ok(self.contains_unchecked(x))
    }

    /// Neighbours of `x` inside the region, axis ascending, minus before plus.
    pub fn neighbors(&self, x: &Site) -> Result<Vec<Site>> {
        if !self.contains(x)? {
            return Err(Error::contract(format!("{x} is not in the region")));
        }
        Ok(x.lattice_neighbors().filter(|n| self.contains_unchecked(n)).collect())
    }

    /// Interior B(u,c) form of a cone region.
    pub fn interior(&self) -> Result<RegionSpec> {
        match self {
            RegionSpec::Cone { d, u, c, .. } => Ok(RegionSpec::ConeInterior { d: *d, u: *u, c: *c }),
            RegionSpec::ConeInterior { .. } => Ok(self.clone()),
            RegionSpec::FullLattice { .. } => Ok(self.clone()),
            _ => Err(Error::contract("interior is defined for cone regions only")),
        }
    }

    pub fn is_cone(&self) -> bool {
        matches!(self, RegionSpec::Cone { .. })
    }

    /// Axis-aligned box containing all member sites, when the region is bounded.
    pub fn bounding_box(&self) -> Option<(Site, Site)> {
        match self {
            RegionSpec::Capsule { x, y, r, .. } => {
                let lo: Vec<i64> = x.iter().zip(y).map(|(a, b)| (a.min(*b) - r).floor() as i64).collect();
                let hi: Vec<i64> = x.iter().zip(y).map(|(a, b)| (a.max(*b) + r).ceil() as i64).collect();
                Some((Site::new(&lo), Site::new(&hi)))
            }
            _ => None,
        }
    }
}

/// Interior / Boundary / Outside classification for a cone region.
pub fn classify(cone: &RegionSpec, site: &Site) -> Result<SiteClass> {
    let RegionSpec::Cone { d, u, c, collar } = cone else {
        return Err(Error::contract("classify requires a cone region"));
    };
    site.check_dim(*d)?;
    let t = u.project(site);
    let x2 = site.l2_sq() as f64;
    Ok(if cone_feasible(t, x2, *c, 0.0) {
        SiteClass::Interior
    } else if cone_feasible(t, x2, *c, *collar) {
        SiteClass::Boundary
    } else {
        SiteClass::Outside
    })
}

/// Sites of a bounded box [lo, hi] (inclusive), lexicographic order.
pub fn box_sites(lo: &Site, hi: &Site) -> Vec<Site> {
    let d = lo.dim();
    let mut out = Vec::new();
    let mut cur = *lo;
    loop {
        out.push(cur);
        let mut axis = d;
        loop {
            if axis == 0 {
                return out;
            }
            axis -= 1;
            if cur.get(axis) < hi.get(axis) {
                cur = cur.step(axis, 1);
                break;
            }
            cur = cur.with(axis, lo.get(axis));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1(d: usize) -> Direction {
        Direction::axis(d, 0)
    }

    /// Independent oracle: minimise |x − au| − (ca + k) over a ∈ [0, amax] by
    /// grid search followed by ternary refinement.
    fn cone_gap_oracle(x: &[f64], u: &[f64], c: f64, k: f64, amax: f64) -> f64 {
        let f = |a: f64| {
            let d2: f64 = x.iter().zip(u).map(|(xi, ui)| (xi - a * ui).powi(2)).sum();
            d2.sqrt() - (c * a + k)
        };
        let steps = 4000;
        let mut best = (f64::INFINITY, 0.0);
        for i in 0..=steps {
            let a = amax * i as f64 / steps as f64;
            let v = f(a);
            if v < best.0 {
                best = (v, a);
            }
        }
        let h = amax / steps as f64;
        let (mut lo, mut hi) = ((best.1 - h).max(0.0), best.1 + h);
        for _ in 0..200 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if f(m1) < f(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        f((lo + hi) / 2.0).min(best.0)
    }

    #[test]
    fn full_lattice_contains_everything() {
        assert!(RegionSpec::full(2).contains(&Site::new(&[7, -3])).unwrap());
    }

    #[test]
    fn cone_examples() {
        let cone = RegionSpec::cone(e1(2), 0.5);
        let s = Site::new(&[10, 6]);
        assert!(cone.contains(&s).unwrap());
        assert!(cone_gap_oracle(&[10.0, 6.0], &[1.0, 0.0], 0.5, 4.0 * 2f64.sqrt(), 40.0) <= 0.0);

        let interior = RegionSpec::cone_interior(e1(2), 0.5);
        assert!(!interior.contains(&s).unwrap());
        assert!(cone_gap_oracle(&[10.0, 6.0], &[1.0, 0.0], 0.5, 0.0, 40.0) > 0.0);
    }

    #[test]
    fn classify_examples() {
        let cone = RegionSpec::cone(e1(2), 0.5);
        assert_eq!(classify(&cone, &Site::new(&[10, 5])).unwrap(), SiteClass::Interior);
        assert_eq!(classify(&cone, &Site::new(&[-10, 0])).unwrap(), SiteClass::Outside);
        let wide = RegionSpec::cone(e1(2), 2.0);
        for s in [[-50, 3], [0, 0], [-1, -100], [7, 7]] {
            assert_eq!(classify(&wide, &Site::new(&s)).unwrap(), SiteClass::Interior);
        }
        assert!(matches!(
            classify(&RegionSpec::full(2), &Site::origin(2)),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn cone_matches_oracle_on_a_grid() {
        let dir = Direction::new(Site::new(&[2, 1])).unwrap();
        let u = dir.unit();
        for c in [0.3, 0.5, 0.9] {
            let cone = RegionSpec::cone(dir, c);
            let k = default_collar(2);
            for x in -15..=30 {
                for y in -15..=30 {
                    let gap = cone_gap_oracle(&[x as f64, y as f64], &u, c, k, 120.0);
                    if gap.abs() < 1e-6 {
                        continue;
                    }
                    let s = Site::new(&[x, y]);
                    assert_eq!(cone.contains(&s).unwrap(), gap < 0.0, "site {s} c {c}");
                }
            }
        }
    }

    #[test]
    fn cone_surface_points_are_inside() {
        // (4,3) has sin θ = 3/5 exactly.
        let interior = RegionSpec::cone_interior(e1(2), 0.6);
        assert!(interior.contains(&Site::new(&[4, 3])).unwrap());
        assert!(interior.contains(&Site::new(&[400, 300])).unwrap());
    }

    #[test]
    fn half_space_cone() {
        let h = RegionSpec::cone(e1(2), 1.0);
        assert!(h.contains(&Site::new(&[-5, 1000])).unwrap());
        assert!(!h.contains(&Site::new(&[-6, 0])).unwrap());
        assert_eq!(classify(&h, &Site::new(&[0, 3])).unwrap(), SiteClass::Boundary);
        assert_eq!(classify(&h, &Site::new(&[1, 300])).unwrap(), SiteClass::Interior);
    }

    #[test]
    fn log_wedge_neighbors() {
        let w = RegionSpec::log_wedge(2.0);
        assert_eq!(w.neighbors(&Site::origin(2)).unwrap(), vec![Site::new(&[1, 0])]);
        // y = 1 at x = 1 needs 1 ≤ 2·log 2.
        assert!(2.0 * 2f64.ln() >= 1.0);
        assert!(w.contains(&Site::new(&[1, 1])).unwrap());
        assert!(!w.contains(&Site::new(&[1, 2])).unwrap());
    }

    #[test]
    fn neighbors_of_full_lattice_origin() {
        assert_eq!(
            RegionSpec::full(2).neighbors(&Site::origin(2)).unwrap(),
            vec![
                Site::new(&[-1, 0]),
                Site::new(&[1, 0]),
                Site::new(&[0, -1]),
                Site::new(&[0, 1])
            ]
        );
    }

    #[test]
    fn neighbors_outside_is_contract_violation() {
        let w = RegionSpec::log_wedge(2.0);
        assert!(matches!(w.neighbors(&Site::new(&[-1, 0])), Err(Error::Contract(_))));
    }

    #[test]
    fn dimension_mismatch() {
        let r = RegionSpec::full(3);
        assert!(matches!(
            r.contains(&Site::origin(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn diagonal_example_has_single_neighbour_sites() {
        // u = (1,1,1)/√3, b = 7 ≥ 4√3, c = 1/√3: the plane z3 = −b is tangent to
        // the cone along the ray {z1 = z2 ≥ 0}, so each diagonal site keeps only
        // its neighbour above the plane.
        let u = Direction::new(Site::new(&[1, 1, 1])).unwrap();
        let g = RegionSpec::Cone { d: 3, u, c: 1.0 / 3f64.sqrt(), collar: 7.0 };
        for k in 0..40i64 {
            let s = Site::new(&[k, k, -7]);
            assert!(g.contains(&s).unwrap(), "{s}");
            assert_eq!(g.neighbors(&s).unwrap(), vec![Site::new(&[k, k, -6])], "{s}");
            assert!(!g.contains(&Site::new(&[k + 1, k, -7])).unwrap());
        }
    }

    #[test]
    fn json_round_trip_keeps_field_order() {
        let r = RegionSpec::cone(e1(2), 0.5);
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.starts_with(r#"{"kind":"cone","d":2,"u":[1,0],"c":0.5,"collar":"#));
        let back: RegionSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn box_enumeration() {
        let b = box_sites(&Site::new(&[0, 0]), &Site::new(&[2, 1]));
        assert_eq!(b.len(), 6);
        assert_eq!(b[1], Site::new(&[0, 1]));
    }

    #[test]
    fn approximate_direction_reports_error() {
        let (d, err) = Direction::approximate(&[1.0, 2f64.sqrt()], 1000.0).unwrap();
        assert!(err < 1e-3);
        assert_eq!(d.dim(), 2);
    }
}
