//! Constructive lattice geometry: staircase paths near a
//! segment, edge-disjoint detours around a lattice edge, connectivity of thin
//! capsules, and the boundary partition with its witness paths.

use std::collections::{BTreeMap, VecDeque};

use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use super::region::{box_sites, classify, Direction, RegionSpec, SiteClass, BALL_MARGIN};
use super::site::{CanonicalEdge, Site};
use super::{path_steps, LatticePath};
use crate::error::{Error, Result};

/// The segment {a·u : a ∈ [b, c]}.
#[derive(Clone, Copy, Debug)]
pub struct Segment {
    pub u: Direction,
    pub b: f64,
    pub c: f64,
}

impl Segment {
    pub fn new(u: Direction, b: f64, c: f64) -> Self {
        assert!(b <= c, "segment bounds out of order");
        Segment { u, b, c }
    }

    fn endpoints(&self) -> (Vec<f64>, Vec<f64>) {
        let u = self.u.unit();
        (
            u.iter().map(|x| x * self.b).collect(),
            u.iter().map(|x| x * self.c).collect(),
        )
    }

    /// ⋃_{a∈[b,c]} B(au, r)
    pub fn sausage(&self, r: f64) -> RegionSpec {
        let (p, q) = self.endpoints();
        RegionSpec::capsule(&p, &q, r)
    }
}

/// Euclidean distance from a point to the segment.
pub fn distance_to_segment(p: &[f64], seg: &Segment) -> f64 {
    let u = seg.u.unit();
    let t: f64 = p.iter().zip(&u).map(|(a, b)| a * b).sum();
    let a = t.clamp(seg.b, seg.c);
    p.iter()
        .zip(&u)
        .map(|(x, ui)| (x - a * ui).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn within(dist: f64, bound: f64) -> bool {
    dist <= bound + BALL_MARGIN * bound.max(1.0)
}

/// A shortest lattice path from `y` to `z` that follows the straight segment
/// between them: at every step the coordinate lagging furthest behind the
/// straight-line parametrisation advances, so every vertex is within one unit
/// per coordinate of the segment [y, z].
pub fn segment_path(y: &Site, z: &Site, segment: &Segment) -> Result<LatticePath> {
    let d = y.dim();
    z.check_dim(d)?;
    if segment.u.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: segment.u.dim(),
        });
    }
    let reach = (d as f64).sqrt();
    for p in [y, z] {
        if !within(distance_to_segment(&p.to_f64(), segment), reach) {
            return Err(Error::contract(format!(
                "{p} is further than √d from the segment"
            )));
        }
    }
    if y == z {
        return Ok(Vec::new());
    }
    let delta: Vec<i64> = (0..d).map(|i| z.get(i) - y.get(i)).collect();
    let total = y.l1_dist(z);
    let mut done = vec![0i64; d];
    let mut cur = *y;
    let mut path = Vec::with_capacity(total as usize + 1);
    path.push(cur);
    for k in 0..total {
        let t = (k + 1) as f64 / total as f64;
        let axis = (0..d)
            .filter(|&i| done[i].abs() < delta[i].abs())
            .max_by(|&i, &j| {
                let li = t * delta[i].abs() as f64 - done[i].abs() as f64;
                let lj = t * delta[j].abs() as f64 - done[j].abs() as f64;
                // prefer lower axis on ties
                li.partial_cmp(&lj).unwrap().then(j.cmp(&i))
            })
            .expect("steps remain");
        let s = delta[axis].signum();
        done[axis] += s;
        cur = cur.step(axis, s);
        path.push(cur);
    }
    debug_assert_eq!(cur, *z);
    let limit = 2.0 * reach;
    for p in &path {
        if !within(distance_to_segment(&p.to_f64(), segment), limit) {
            return Err(Error::contract(format!(
                "staircase vertex {p} left the 2√d sausage"
            )));
        }
    }
    Ok(path)
}

fn path_edges(path: &[Site]) -> impl Iterator<Item = CanonicalEdge> + '_ {
    path.windows(2)
        .map(|w| CanonicalEdge::between_adjacent(&w[0], &w[1]))
}

/// True iff no lattice edge is used by two of the paths (or twice by one).
pub fn check_edge_disjoint(paths: &[LatticePath]) -> bool {
    let mut seen = FxHashSet::default();
    for p in paths {
        for w in p.windows(2) {
            if !w[0].is_adjacent(&w[1]) {
                return false;
            }
        }
        for e in path_edges(p) {
            if !seen.insert(e) {
                return false;
            }
        }
    }
    true
}

/// 2d edge-disjoint paths of length at most 9 between the neighbours `v` and
/// `w`, all inside `region`. One direct edge, 2(d−1) three-step paths through
/// the perpendicular neighbours, and one nine-step loop behind `v` and `w`.
/// The loop's perpendicular side is the first choice that fits the region.
pub fn disjoint_detours(v: &Site, w: &Site, region: &RegionSpec) -> Result<Vec<LatticePath>> {
    let d = region.dim();
    v.check_dim(d)?;
    w.check_dim(d)?;
    if !v.is_adjacent(w) {
        return Err(Error::contract(format!("{v} and {w} are not lattice neighbours")));
    }
    let axis = (0..d).find(|&i| v.get(i) != w.get(i)).unwrap();
    let s = w.get(axis) - v.get(axis);
    let inside = |p: &LatticePath| p.iter().all(|x| region.contains_unchecked(x));
    let no_fit = || Error::NoDetours {
        from: *v,
        to: *w,
        needed: 2 * d,
    };

    let mut paths: Vec<LatticePath> = vec![vec![*v, *w]];
    for j in (0..d).filter(|&j| j != axis) {
        for sigma in [-1, 1] {
            paths.push(vec![*v, v.step(j, sigma), w.step(j, sigma), *w]);
        }
    }
    if !paths.iter().all(inside) {
        return Err(no_fit());
    }
    for j in (0..d).filter(|&j| j != axis) {
        for sigma in [-1, 1] {
            let back = v.step(axis, -s);
            let front = w.step(axis, s);
            let long = vec![
                *v,
                back,
                back.step(j, sigma),
                back.step(j, 2 * sigma),
                v.step(j, 2 * sigma),
                w.step(j, 2 * sigma),
                front.step(j, 2 * sigma),
                front.step(j, sigma),
                front,
                *w,
            ];
            if inside(&long) {
                paths.push(long);
                debug_assert!(check_edge_disjoint(&paths));
                return Ok(paths);
            }
        }
    }
    Err(no_fit())
}

/// Result of checking every consecutive pair of a staircase for detours.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct DetourReport {
    pub pairs: usize,
    pub max_length: usize,
    /// Largest distance from the segment reached by any detour vertex.
    pub max_distance: f64,
    pub failures: Vec<String>,
}

/// Staircase from `y` to `z` plus detours for every consecutive pair, all
/// inside the radius-`r` sausage around `segment`. Checks edge-disjointness,
/// lengths ≤ 9, and the 2√d + √5 distance bound.
pub fn verify_detours_along_segment(
    y: &Site,
    z: &Site,
    segment: &Segment,
    r: f64,
) -> Result<DetourReport> {
    let d = y.dim();
    let sausage = segment.sausage(r);
    let path = segment_path(y, z, segment)?;
    let bound = 2.0 * (d as f64).sqrt() + 5f64.sqrt();
    let mut report = DetourReport::default();
    for pair in path.windows(2) {
        report.pairs += 1;
        match disjoint_detours(&pair[0], &pair[1], &sausage) {
            Ok(detours) => {
                if detours.len() != 2 * d || !check_edge_disjoint(&detours) {
                    report.failures.push(format!("{}-{}: not 2d disjoint paths", pair[0], pair[1]));
                }
                for p in &detours {
                    report.max_length = report.max_length.max(path_steps(p));
                    for x in p {
                        let dist = distance_to_segment(&x.to_f64(), segment);
                        report.max_distance = report.max_distance.max(dist);
                        if !within(dist, bound) {
                            report.failures.push(format!("{x} is {dist:.3} from the segment"));
                        }
                    }
                }
            }
            Err(e) => report.failures.push(e.to_string()),
        }
    }
    if report.max_length > 9 {
        report.failures.push(format!("detour of length {}", report.max_length));
    }
    Ok(report)
}

/// Flood fill of the graph induced by ⋃_{a∈[0,1]} B(az, r).
pub fn verify_connectivity(z: &Site, r: f64) -> bool {
    let origin = Site::origin(z.dim());
    let region = RegionSpec::capsule_sites(&origin, z, r);
    let (lo, hi) = region.bounding_box().expect("capsules are bounded");
    let members: FxHashSet<Site> = box_sites(&lo, &hi)
        .into_iter()
        .filter(|s| region.contains_unchecked(s))
        .collect();
    let Some(start) = members.iter().min().copied() else {
        return true;
    };
    let mut seen = FxHashSet::default();
    seen.insert(start);
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for n in x.lattice_neighbors() {
            if members.contains(&n) && seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    seen.len() == members.len()
}

/// Witness that a boundary site connects to the interior on its sup-norm sphere.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PartitionWitness {
    pub site: Site,
    /// Class index: number of non-zero coordinates among indices ≥ 2,
    /// raised to 1 for sites on the axis itself.
    pub q: usize,
    pub v_z: Site,
    pub paths: Vec<LatticePath>,
    pub m_bound: f64,
}

/// Search bound on ‖v_z − z‖ in lattice steps.
pub fn witness_search_bound(d: usize) -> f64 {
    16.0 * (d as f64).sqrt()
}

fn block_path(from: &Site, to: &Site, order: &[usize]) -> LatticePath {
    let mut cur = *from;
    let mut path = vec![cur];
    for &axis in order {
        let s = (to.get(axis) - cur.get(axis)).signum();
        while cur.get(axis) != to.get(axis) {
            cur = cur.step(axis, s);
            path.push(cur);
        }
    }
    path
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// `count` pairwise edge-disjoint shortest paths from `a` to `b` inside
/// `region`, chosen among the axis-block orderings.
fn disjoint_shortest_paths(
    a: &Site,
    b: &Site,
    count: usize,
    region: &RegionSpec,
) -> Option<Vec<LatticePath>> {
    let axes: Vec<usize> = (0..a.dim()).filter(|&i| a.get(i) != b.get(i)).collect();
    if axes.len() < count {
        return None;
    }
    let candidates: Vec<LatticePath> = permutations(&axes)
        .iter()
        .map(|o| block_path(a, b, o))
        .filter(|p| p.iter().all(|x| region.contains_unchecked(x)))
        .collect();
    fn pick(
        cands: &[LatticePath],
        start: usize,
        chosen: &mut Vec<LatticePath>,
        count: usize,
    ) -> bool {
        if chosen.len() == count {
            return true;
        }
        for i in start..cands.len() {
            chosen.push(cands[i].clone());
            if check_edge_disjoint(chosen) && pick(cands, i + 1, chosen, count) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    let mut chosen = Vec::new();
    pick(&candidates, 0, &mut chosen, count).then_some(chosen)
}

/// Witness for a boundary site of H(e1, c), c < 1: an interior site v_z on the
/// same sup-norm sphere inside the rectangle between z and the axis, joined to
/// z by q edge-disjoint shortest paths.
pub fn boundary_partition(cone: &RegionSpec, site: &Site) -> Result<PartitionWitness> {
    let RegionSpec::Cone { d, u, c, .. } = cone else {
        return Err(Error::contract("boundary_partition requires a cone region"));
    };
    let d = *d;
    site.check_dim(d)?;
    let zu = u.lattice();
    if zu.get(0) <= 0 || (1..d).any(|i| zu.get(i) != 0) {
        return Err(Error::contract("boundary_partition is implemented for u = e1"));
    }
    if *c >= 1.0 {
        return Err(Error::contract("boundary_partition needs c < 1"));
    }
    if classify(cone, site)? != SiteClass::Boundary {
        return Err(Error::contract(format!("{site} is not a boundary site")));
    }
    let interior = cone.interior()?;
    let signs: Vec<i64> = (0..d)
        .map(|i| if i > 0 && site.get(i) < 0 { -1 } else { 1 })
        .collect();
    let reflect = |s: &Site| -> Site {
        let v: Vec<i64> = (0..d).map(|i| s.get(i) * signs[i]).collect();
        Site::new(&v)
    };
    let z = reflect(site);
    let n = z.linf();
    let q_raw = (1..d).filter(|&i| z.get(i) != 0).count();
    let q = q_raw.max(1);
    let m_max = witness_search_bound(d);
    let steps = m_max.floor() as i64;

    // Offsets: δ1 ≥ 0 bounded by n − z1, δi ∈ [−zi, 0] for i ≥ 2, by ℓ1 shell.
    let lo: Vec<i64> = (0..d).map(|i| if i == 0 { 0 } else { -z.get(i).min(steps) }).collect();
    let hi: Vec<i64> = (0..d).map(|i| if i == 0 { (n - z.get(0)).min(steps) } else { 0 }).collect();
    let mut shells: BTreeMap<i64, Vec<Site>> = BTreeMap::new();
    for off in box_sites(&Site::new(&lo), &Site::new(&hi)) {
        let m = off.l1();
        if m > steps {
            continue;
        }
        let v = z.add(&off);
        if v.linf() != n || !interior.contains_unchecked(&v) || !cone.contains_unchecked(&v) {
            continue;
        }
        shells.entry(m).or_default().push(v);
    }
    for (_, cands) in shells {
        for v in cands {
            if let Some(paths) = disjoint_shortest_paths(&z, &v, q, cone) {
                let paths = paths.iter().map(|p| p.iter().map(reflect).collect()).collect();
                return Ok(PartitionWitness {
                    site: *site,
                    q,
                    v_z: reflect(&v),
                    paths,
                    m_bound: m_max,
                });
            }
        }
    }
    Err(Error::WitnessNotFound {
        site: *site,
        bound: m_max,
    })
}

/// Census of the boundary partition over all boundary sites with ‖z‖∞ ≤ n_max.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PartitionCensus {
    pub d: usize,
    pub n_max: i64,
    pub boundary_sites: usize,
    /// counts[q-1][n] = |D_q ∩ H_n|
    pub counts: Vec<Vec<usize>>,
    /// max over n ≥ 1 of |D_q ∩ H_n| / n^{q−1}
    pub fitted_m: Vec<f64>,
    pub max_witness_distance: i64,
    pub failures: Vec<String>,
}

impl PartitionCensus {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs `boundary_partition` on every boundary site with ‖z‖∞ ≤ n_max and
/// re-verifies each witness independently.
pub fn partition_census(cone: &RegionSpec, n_max: i64) -> Result<PartitionCensus> {
    let d = cone.dim();
    let interior = cone.interior()?;
    let lo = Site::new(&vec![-n_max; d]);
    let hi = Site::new(&vec![n_max; d]);
    let mut census = PartitionCensus {
        d,
        n_max,
        boundary_sites: 0,
        counts: vec![vec![0; n_max as usize + 1]; d - 1],
        fitted_m: vec![0.0; d - 1],
        max_witness_distance: 0,
        failures: Vec::new(),
    };
    for z in box_sites(&lo, &hi) {
        if classify(cone, &z)? != SiteClass::Boundary {
            continue;
        }
        census.boundary_sites += 1;
        match boundary_partition(cone, &z) {
            Ok(w) => {
                let n = z.linf();
                census.counts[w.q - 1][n as usize] += 1;
                let dist = w.v_z.l1_dist(&z);
                census.max_witness_distance = census.max_witness_distance.max(dist);
                let ok = w.v_z.linf() == n
                    && interior.contains_unchecked(&w.v_z)
                    && (dist as f64) <= w.m_bound
                    && w.paths.len() == w.q
                    && check_edge_disjoint(&w.paths)
                    && w.paths.iter().all(|p| {
                        p.first() == Some(&z)
                            && p.last() == Some(&w.v_z)
                            && path_steps(p) as i64 == dist
                            && p.iter().all(|x| cone.contains_unchecked(x))
                    });
                if !ok {
                    census.failures.push(format!("invalid witness for {z}"));
                }
            }
            Err(e) => census.failures.push(e.to_string()),
        }
    }
    for q in 1..d {
        census.fitted_m[q - 1] = (1..=n_max)
            .map(|n| census.counts[q - 1][n as usize] as f64 / (n as f64).powi(q as i32 - 1))
            .fold(0.0, f64::max);
    }
    Ok(census)
}

/// Euclidean distance from a cone site to the nearest interior site, searched
/// up to `max_dist`. `None` if nothing interior is that close.
pub fn nearest_interior_distance(cone: &RegionSpec, z: &Site, max_dist: f64) -> Result<Option<f64>> {
    let interior = cone.interior()?;
    if interior.contains(z)? {
        return Ok(Some(0.0));
    }
    let d = z.dim();
    let r = max_dist.floor() as i64;
    thread_local! {
        static OFFSETS: std::cell::RefCell<FxHashMap<(usize, i64), Vec<Site>>> = Default::default();
    }
    let offsets = OFFSETS.with(|cache| {
        cache
            .borrow_mut()
            .entry((d, r))
            .or_insert_with(|| {
                let mut v: Vec<Site> = box_sites(&Site::new(&vec![-r; d]), &Site::new(&vec![r; d]))
                    .into_iter()
                    .filter(|o| (o.l2_sq() as f64) <= max_dist * max_dist)
                    .collect();
                v.sort_by_key(|o| (o.l2_sq(), *o));
                v
            })
            .clone()
    });
    Ok(offsets
        .iter()
        .find(|o| interior.contains_unchecked(&z.add(o)))
        .map(|o| o.l2()))
}

/// Projection onto the hyperplane {z_1 = 0}.
pub fn halfspace_projection(site: &Site) -> Site {
    site.with(0, 0)
}

/// The 2d − 1 edge-disjoint paths between z and its projection v_z: the
/// straight segment along e1 and, for each perpendicular unit step ±e_j, the
/// parallel segment shifted by that step. Lengths are ‖v_z − z‖ and ‖v_z − z‖ + 2.
pub fn projection_paths(site: &Site) -> Vec<LatticePath> {
    let d = site.dim();
    let v = halfspace_projection(site);
    if v == *site {
        return Vec::new();
    }
    let mut paths = vec![block_path(site, &v, &[0])];
    for j in 1..d {
        for sigma in [-1, 1] {
            let a = site.step(j, sigma);
            let mut p = vec![*site];
            p.extend(block_path(&a, &a.with(0, 0), &[0]));
            p.push(v);
            paths.push(p);
        }
    }
    paths
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::default_collar;

    fn e1(d: usize) -> Direction {
        Direction::axis(d, 0)
    }

    #[test]
    fn straight_segment_path() {
        let seg = Segment::new(e1(2), 0.0, 3.0);
        let p = segment_path(&Site::new(&[0, 0]), &Site::new(&[3, 0]), &seg).unwrap();
        assert_eq!(path_steps(&p), 3);
        assert_eq!(p[1], Site::new(&[1, 0]));
        assert_eq!(p[2], Site::new(&[2, 0]));
    }

    #[test]
    fn identity_segment_path_is_empty() {
        let seg = Segment::new(e1(2), 0.0, 3.0);
        let y = Site::new(&[1, 0]);
        assert!(segment_path(&y, &y, &seg).unwrap().is_empty());
    }

    #[test]
    fn diagonal_staircase_against_exhaustive_oracle() {
        let u = Direction::new(Site::new(&[1, 1])).unwrap();
        let seg = Segment::new(u, 0.0, 8f64.sqrt());
        let y = Site::origin(2);
        let z = Site::new(&[2, 2]);
        let p = segment_path(&y, &z, &seg).unwrap();
        assert_eq!(path_steps(&p), 4);
        // Oracle: every monotone staircase from (0,0) to (2,2) stays within
        // 2√2 of the segment, so whichever one is chosen must satisfy it.
        let orders = [[0, 0, 1, 1], [0, 1, 0, 1], [0, 1, 1, 0], [1, 0, 0, 1], [1, 0, 1, 0], [1, 1, 0, 0]];
        for o in orders {
            let mut cur = y;
            for ax in o {
                cur = cur.step(ax, 1);
                assert!(distance_to_segment(&cur.to_f64(), &seg) <= 2.0 * 2f64.sqrt());
            }
        }
        for x in &p {
            assert!(distance_to_segment(&x.to_f64(), &seg) <= 2.0 * 2f64.sqrt());
        }
    }

    #[test]
    fn segment_path_precondition() {
        let seg = Segment::new(e1(2), 0.0, 3.0);
        assert!(matches!(
            segment_path(&Site::new(&[0, 5]), &Site::new(&[3, 0]), &seg),
            Err(Error::Contract(_))
        ));
    }

    /// Exhaustive oracle: all simple paths of length ≤ 9 from v to w in Z^2,
    /// then the largest edge-disjoint family by backtracking.
    fn max_disjoint_short_paths_2d() -> usize {
        let v = Site::origin(2);
        let w = Site::unit(2, 0);
        let mut all = Vec::new();
        fn dfs(cur: Site, w: Site, path: &mut Vec<Site>, all: &mut Vec<Vec<Site>>) {
            if cur == w {
                all.push(path.clone());
                return;
            }
            if path.len() > 9 || cur.l1_dist(&w) as usize > 10 - path.len() {
                return;
            }
            for n in cur.lattice_neighbors().collect::<Vec<_>>() {
                if path.contains(&n) {
                    continue;
                }
                path.push(n);
                dfs(n, w, path, all);
                path.pop();
            }
        }
        dfs(v, w, &mut vec![v], &mut all);
        all.sort_by_key(|p| p.len());
        fn best(all: &[Vec<Site>], start: usize, chosen: &mut Vec<Vec<Site>>, target: usize) -> bool {
            if chosen.len() == target {
                return true;
            }
            for i in start..all.len() {
                chosen.push(all[i].clone());
                if check_edge_disjoint(chosen) && best(all, i + 1, chosen, target) {
                    return true;
                }
                chosen.pop();
            }
            false
        }
        let mut k = 0;
        while best(&all, 0, &mut Vec::new(), k + 1) {
            k += 1;
        }
        k
    }

    #[test]
    fn detours_2d_match_exhaustive_oracle() {
        assert_eq!(max_disjoint_short_paths_2d(), 4);
        let ps = disjoint_detours(&Site::origin(2), &Site::unit(2, 0), &RegionSpec::full(2)).unwrap();
        assert_eq!(ps.len(), 4);
        assert!(check_edge_disjoint(&ps));
        let mut lens: Vec<_> = ps.iter().map(|p| path_steps(p)).collect();
        lens.sort();
        assert_eq!(lens, vec![1, 3, 3, 9]);
        // within √5 of either endpoint
        for p in &ps {
            for x in p {
                let a = x.l2_sq();
                let b = x.sub(&Site::unit(2, 0)).l2_sq();
                assert!(a.min(b) <= 5);
            }
        }
    }

    #[test]
    fn detours_3d() {
        let ps = disjoint_detours(&Site::origin(3), &Site::unit(3, 0), &RegionSpec::full(3)).unwrap();
        assert_eq!(ps.len(), 6);
        assert!(check_edge_disjoint(&ps));
        assert!(ps.iter().all(|p| path_steps(p) <= 9));
        // negative orientation too
        let ps = disjoint_detours(&Site::origin(3), &Site::new(&[0, 0, -1]), &RegionSpec::full(3)).unwrap();
        assert!(check_edge_disjoint(&ps));
    }

    #[test]
    fn detours_need_neighbours() {
        let v = Site::origin(2);
        assert!(matches!(
            disjoint_detours(&v, &v, &RegionSpec::full(2)),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn detours_fail_in_thin_region() {
        let thin = RegionSpec::capsule(&[-5.0, 0.0], &[5.0, 0.0], 1.0);
        assert!(matches!(
            disjoint_detours(&Site::origin(2), &Site::unit(2, 0), &thin),
            Err(Error::NoDetours { .. })
        ));
    }

    #[test]
    fn detours_along_segments() {
        for d in [2, 3] {
            let k = default_collar(d);
            for z in [vec![1, 0, 0], vec![3, 2, 1], vec![1, 1, 1], vec![5, 1, 0]] {
                let u = Direction::new(Site::new(&z[..d])).unwrap();
                let seg = Segment::new(u, 0.0, 20.0);
                let end: Vec<i64> = u.unit().iter().map(|x| (x * 20.0).round() as i64).collect();
                let rep = verify_detours_along_segment(&Site::origin(d), &Site::new(&end), &seg, k).unwrap();
                assert!(rep.failures.is_empty(), "{:?}", rep.failures);
                assert!(rep.max_length <= 9);
            }
        }
    }

    #[test]
    fn connectivity_examples() {
        assert!(verify_connectivity(&Site::new(&[5, 3]), 2f64.sqrt()));
        assert!(!verify_connectivity(&Site::new(&[5, 3]), 0.4));
        assert!(verify_connectivity(&Site::new(&[10, 0, 0]), 3f64.sqrt()));
    }

    #[test]
    fn partition_witness_2d() {
        let cone = RegionSpec::cone(e1(2), 0.5);
        let z = Site::new(&[10, 8]);
        assert_eq!(classify(&cone, &z).unwrap(), SiteClass::Boundary);
        let w = boundary_partition(&cone, &z).unwrap();
        assert_eq!(w.q, 1);
        assert_eq!(w.paths.len(), 1);
        assert_eq!(w.v_z.linf(), z.linf());
        assert_eq!(classify(&cone, &w.v_z).unwrap(), SiteClass::Interior);
        // Oracle: BFS for the nearest interior site on the same sup sphere
        // within the rectangle; the witness must be at least that far.
        let n = z.linf();
        let best = (0..=8)
            .map(|v2| Site::new(&[n, v2]))
            .filter(|v| classify(&cone, v).unwrap() == SiteClass::Interior)
            .map(|v| v.l1_dist(&z))
            .min()
            .unwrap();
        assert_eq!(w.v_z.l1_dist(&z), best);
    }

    #[test]
    fn partition_witness_3d_two_paths() {
        let cone = RegionSpec::cone(e1(3), 0.5);
        let z = Site::new(&[12, 6, 6]);
        assert_eq!(classify(&cone, &z).unwrap(), SiteClass::Boundary);
        let w = boundary_partition(&cone, &z).unwrap();
        assert_eq!(w.q, 2);
        assert_eq!(w.paths.len(), 2);
        assert!(check_edge_disjoint(&w.paths));
        for p in &w.paths {
            assert_eq!(path_steps(p) as i64, w.v_z.l1_dist(&z));
        }
    }

    #[test]
    fn partition_rejects_interior_site() {
        let cone = RegionSpec::cone(e1(2), 0.5);
        assert!(matches!(
            boundary_partition(&cone, &Site::new(&[10, 1])),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn small_census_passes() {
        for d in [2, 3] {
            let cone = RegionSpec::cone(e1(d), 0.5);
            let c = partition_census(&cone, 20).unwrap();
            assert!(c.passed(), "{:?}", &c.failures[..c.failures.len().min(5)]);
            assert!(c.boundary_sites > 0);
        }
    }

    #[test]
    fn boundary_sites_are_near_interior() {
        let cone = RegionSpec::cone(e1(2), 0.5);
        let bound = 5.0 * 2f64.sqrt();
        for z in box_sites(&Site::new(&[-40, -40]), &Site::new(&[40, 40])) {
            if classify(&cone, &z).unwrap() == SiteClass::Boundary {
                assert!(nearest_interior_distance(&cone, &z, bound).unwrap().is_some(), "{z}");
            }
        }
    }

    #[test]
    fn projection_examples() {
        assert_eq!(halfspace_projection(&Site::new(&[3, 5])), Site::new(&[0, 5]));
        assert_eq!(halfspace_projection(&Site::new(&[0, 5])), Site::new(&[0, 5]));
        assert_eq!(halfspace_projection(&Site::new(&[2, 1, 1])), Site::new(&[0, 1, 1]));
    }

    #[test]
    fn projection_paths_are_disjoint() {
        for z in [Site::new(&[-4, 7]), Site::new(&[3, -2, 5])] {
            let v = halfspace_projection(&z);
            let ps = projection_paths(&z);
            assert_eq!(ps.len(), 2 * z.dim() - 1);
            assert!(check_edge_disjoint(&ps));
            for p in &ps {
                assert_eq!(p.first(), Some(&z));
                assert_eq!(p.last(), Some(&v));
                assert!(path_steps(p) as i64 <= v.l1_dist(&z) + 2);
            }
        }
    }
}
