//! Travel times on induced subgraphs of Z^d: best-first search over implicit
//! regions with deterministic tie-breaking and an exploration cap.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{box_sites, CanonicalEdge, LatticePath, RegionSpec, Site};
use crate::randomness::EdgeWeights;

/// Default bound on the number of settled sites per query.
pub const DEFAULT_SITE_CAP: usize = 50_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TravelTimeResult {
    pub cost: f64,
    pub path: LatticePath,
    pub certified: bool,
    pub explored: usize,
}

/// Heap key. Equal costs are served in insertion order, which is
/// deterministic and explores zero-weight clusters breadth-first.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Key {
    cost: f64,
    seq: u64,
    site: Site,
}

impl Eq for Key {}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cost
            .total_cmp(&other.cost)
            .then_with(|| self.seq.cmp(&other.seq))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const NO_PARENT: u8 = u8::MAX;

/// `parent` encodes the step back to the predecessor as 2·axis + (sign > 0).
struct Entry {
    cost: f64,
    parent: u8,
    settled: bool,
}

fn step_code(axis: usize, sign: i64) -> u8 {
    (2 * axis + (sign > 0) as usize) as u8
}

fn undo_step(site: &Site, code: u8) -> Site {
    let axis = (code / 2) as usize;
    site.step(axis, if code % 2 == 1 { 1 } else { -1 })
}

/// Best-first search state over a domain predicate.
pub(crate) struct Search<'a, D, W: ?Sized> {
    domain: D,
    weights: &'a W,
    bound: f64,
    cap: usize,
    table: FxHashMap<Site, Entry>,
    heap: BinaryHeap<Reverse<Key>>,
    seq: u64,
    settled: usize,
}

impl<'a, D: Fn(&Site) -> bool, W: EdgeWeights + ?Sized> Search<'a, D, W> {
    pub(crate) fn new(domain: D, weights: &'a W, cap: usize) -> Self {
        Search {
            domain,
            weights,
            bound: f64::INFINITY,
            cap,
            table: FxHashMap::default(),
            heap: BinaryHeap::new(),
            seq: 0,
            settled: 0,
        }
    }

    /// Sites with tentative cost above `bound` are never queued.
    pub(crate) fn with_bound(mut self, bound: f64) -> Self {
        self.bound = bound;
        self
    }

    fn push(&mut self, cost: f64, site: Site) {
        self.seq += 1;
        self.heap.push(Reverse(Key {
            cost,
            seq: self.seq,
            site,
        }));
    }

    pub(crate) fn add_source(&mut self, site: Site, cost: f64) {
        let better = self.table.get(&site).is_none_or(|e| cost < e.cost);
        if better {
            self.table.insert(
                site,
                Entry {
                    cost,
                    parent: NO_PARENT,
                    settled: false,
                },
            );
            self.push(cost, site);
        }
    }

    /// Settles the next site, or `None` when the frontier is empty.
    pub(crate) fn next(&mut self) -> Result<Option<(Site, f64)>> {
        while let Some(Reverse(Key { cost, site, .. })) = self.heap.pop() {
            let e = self.table.get_mut(&site).expect("queued sites are tabled");
            if e.settled || cost > e.cost {
                continue;
            }
            e.settled = true;
            self.settled += 1;
            if self.settled > self.cap {
                return Err(Error::BudgetExceeded {
                    cap: self.cap,
                    lower_bound: cost,
                });
            }
            for axis in 0..site.dim() {
                for sign in [-1, 1] {
                    let n = site.step(axis, sign);
                    if !(self.domain)(&n) {
                        continue;
                    }
                    let c = cost + self.weights.weight(&CanonicalEdge::between_adjacent(&site, &n));
                    if !c.is_finite() || c > self.bound {
                        continue;
                    }
                    let back = step_code(axis, -sign);
                    match self.table.get_mut(&n) {
                        Some(ne) if ne.settled || ne.cost <= c => continue,
                        Some(ne) => {
                            ne.cost = c;
                            ne.parent = back;
                        }
                        None => {
                            self.table.insert(
                                n,
                                Entry {
                                    cost: c,
                                    parent: back,
                                    settled: false,
                                },
                            );
                        }
                    }
                    self.push(c, n);
                }
            }
            return Ok(Some((site, cost)));
        }
        Ok(None)
    }

    pub(crate) fn settled(&self) -> usize {
        self.settled
    }

    pub(crate) fn path_to(&self, site: &Site) -> LatticePath {
        let mut path = vec![*site];
        let mut cur = *site;
        while let Some(e) = self.table.get(&cur).filter(|e| e.parent != NO_PARENT) {
            cur = undo_step(&cur, e.parent);
            path.push(cur);
        }
        path.reverse();
        path
    }

    /// Runs until the first settled site satisfying `is_target`.
    pub(crate) fn run_to(&mut self, is_target: impl Fn(&Site) -> bool) -> Result<Option<(Site, f64)>> {
        while let Some((s, c)) = self.next()? {
            if is_target(&s) {
                return Ok(Some((s, c)));
            }
        }
        Ok(None)
    }
}

/// Lattice staircase along the straight segment from `a` to `b`.
pub(crate) fn straight_staircase(a: &Site, b: &Site) -> LatticePath {
    let d = a.dim();
    let delta: Vec<i64> = (0..d).map(|i| b.get(i) - a.get(i)).collect();
    let total = a.l1_dist(b);
    let mut done = vec![0i64; d];
    let mut cur = *a;
    let mut path = vec![cur];
    for k in 0..total {
        let t = (k + 1) as f64 / total as f64;
        let axis = (0..d)
            .filter(|&i| done[i].abs() < delta[i].abs())
            .max_by(|&i, &j| {
                let li = t * delta[i].abs() as f64 - done[i].abs() as f64;
                let lj = t * delta[j].abs() as f64 - done[j].abs() as f64;
                li.total_cmp(&lj).then(j.cmp(&i))
            })
            .unwrap();
        let s = delta[axis].signum();
        done[axis] += s;
        cur = cur.step(axis, s);
        path.push(cur);
    }
    path
}

/// Sum of edge weights along a path, in path order.
pub fn path_cost<W: EdgeWeights + ?Sized>(weights: &W, path: &[Site]) -> Result<f64> {
    let mut total = 0.0;
    for w in path.windows(2) {
        total += weights.weight(&CanonicalEdge::between(&w[0], &w[1])?);
    }
    Ok(total)
}

/// Shortest path inside an arbitrary site predicate. The staircase upper
/// bound is used for pruning when it stays inside the domain.
pub(crate) fn travel_time_in<D, W>(
    domain: D,
    weights: &W,
    src: &Site,
    dst: &Site,
    cap: usize,
) -> Result<TravelTimeResult>
where
    D: Fn(&Site) -> bool,
    W: EdgeWeights + ?Sized,
{
    if src == dst {
        return Ok(TravelTimeResult {
            cost: 0.0,
            path: Vec::new(),
            certified: true,
            explored: 0,
        });
    }
    let stair = straight_staircase(src, dst);
    let bound = if stair.iter().all(&domain) {
        path_cost(weights, &stair)?
    } else {
        f64::INFINITY
    };
    let mut search = Search::new(domain, weights, cap).with_bound(bound);
    search.add_source(*src, 0.0);
    match search.run_to(|s| s == dst)? {
        Some((_, cost)) => Ok(TravelTimeResult {
            cost,
            path: search.path_to(dst),
            certified: true,
            explored: search.settled(),
        }),
        None => Err(Error::Unreachable {
            src: *src,
            dst: *dst,
        }),
    }
}

/// Travel times from `src` to each target with one search, in target order.
pub(crate) fn travel_times_in<D, W>(
    domain: D,
    weights: &W,
    src: &Site,
    targets: &[Site],
    cap: usize,
) -> Result<Vec<f64>>
where
    D: Fn(&Site) -> bool,
    W: EdgeWeights + ?Sized,
{
    let mut bound: f64 = 0.0;
    for t in targets {
        let stair = straight_staircase(src, t);
        if stair.iter().all(&domain) {
            bound = bound.max(path_cost(weights, &stair)?);
        } else {
            bound = f64::INFINITY;
            break;
        }
    }
    let mut pending: FxHashMap<Site, Vec<usize>> = FxHashMap::default();
    for (i, t) in targets.iter().enumerate() {
        pending.entry(*t).or_default().push(i);
    }
    let mut out = vec![f64::NAN; targets.len()];
    let mut search = Search::new(domain, weights, cap).with_bound(bound);
    search.add_source(*src, 0.0);
    while !pending.is_empty() {
        match search.next()? {
            Some((s, c)) => {
                if let Some(ix) = pending.remove(&s) {
                    for i in ix {
                        out[i] = c;
                    }
                }
            }
            None => {
                let (dst, _) = pending.into_iter().min_by_key(|(s, _)| *s).unwrap();
                return Err(Error::Unreachable { src: *src, dst });
            }
        }
    }
    Ok(out)
}

/// Travel times from `src` to several targets in one search.
pub fn travel_times_from<W: EdgeWeights + ?Sized>(
    region: &RegionSpec,
    weights: &W,
    src: &Site,
    targets: &[Site],
    cap: usize,
) -> Result<Vec<f64>> {
    check_member(region, src)?;
    for t in targets {
        check_member(region, t)?;
    }
    travel_times_in(|s: &Site| region.contains_unchecked(s), weights, src, targets, cap)
}

fn check_member(region: &RegionSpec, s: &Site) -> Result<()> {
    if !region.contains(s)? {
        return Err(Error::contract(format!("{s} is not a site of the region")));
    }
    Ok(())
}

/// T_G(src, dst) over the subgraph induced by `region`.
pub fn travel_time<W: EdgeWeights + ?Sized>(
    region: &RegionSpec,
    weights: &W,
    src: &Site,
    dst: &Site,
    cap: usize,
) -> Result<TravelTimeResult> {
    check_member(region, src)?;
    check_member(region, dst)?;
    travel_time_in(|s: &Site| region.contains_unchecked(s), weights, src, dst, cap)
}

/// Sites of the ℓ1 hyperplane {z_1 + … + z_d = level} inside a cylinder or capsule.
pub fn hyperplane_slice(region: &RegionSpec, level: i64) -> Result<Vec<Site>> {
    let d = region.dim();
    let (lo, hi) = match region {
        RegionSpec::Cylinder { axis, r, .. } => {
            let u = axis.unit();
            let s: f64 = u.iter().sum();
            if s.abs() < 1e-12 {
                return Err(Error::contract("cylinder axis is parallel to the hyperplanes"));
            }
            let a = level as f64 / s;
            let half = r + (d as f64).sqrt() * r / s.abs() + 1.0;
            let lo: Vec<i64> = u.iter().map(|x| (a * x - half).floor() as i64).collect();
            let hi: Vec<i64> = u.iter().map(|x| (a * x + half).ceil() as i64).collect();
            (Site::new(&lo), Site::new(&hi))
        }
        RegionSpec::Capsule { .. } => region.bounding_box().expect("capsules are bounded"),
        _ => {
            return Err(Error::contract(
                "hyperplane queries need a cylinder or capsule region",
            ))
        }
    };
    Ok(box_sites(&lo, &hi)
        .into_iter()
        .filter(|s| s.coords().iter().map(|&x| x as i64).sum::<i64>() == level)
        .filter(|s| region.contains_unchecked(s))
        .collect())
}

/// min over sources on H_from ∩ region of the travel time to H_to ∩ region.
pub fn travel_time_to_hyperplane<W: EdgeWeights + ?Sized>(
    region: &RegionSpec,
    weights: &W,
    from: i64,
    to: i64,
    cap: usize,
) -> Result<TravelTimeResult> {
    if from >= to {
        return Err(Error::contract("hyperplane levels must increase"));
    }
    let sources = hyperplane_slice(region, from)?;
    if sources.is_empty() {
        return Err(Error::EmptySlice(from));
    }
    if hyperplane_slice(region, to)?.is_empty() {
        return Err(Error::EmptySlice(to));
    }
    let level = |s: &Site| s.coords().iter().map(|&x| x as i64).sum::<i64>();
    // After its last visit to H_from an optimal path stays strictly between
    // the two levels, so the slab loses nothing.
    let slab = |s: &Site| (from..=to).contains(&level(s)) && region.contains_unchecked(s);
    let mut search = Search::new(slab, weights, cap);
    for s in sources {
        search.add_source(s, 0.0);
    }
    match search.run_to(|s| level(s) == to)? {
        Some((t, cost)) => Ok(TravelTimeResult {
            cost,
            path: search.path_to(&t),
            certified: true,
            explored: search.settled(),
        }),
        None => Err(Error::EmptySlice(to)),
    }
}

/// All sites with T(src, ·) ≤ t, in settle order (cost, then site order).
pub fn reachable_set<W: EdgeWeights + ?Sized>(
    region: &RegionSpec,
    weights: &W,
    src: &Site,
    t: f64,
    cap: usize,
) -> Result<Vec<(Site, f64)>> {
    if !(t >= 0.0) {
        return Err(Error::contract("time budget must be non-negative"));
    }
    check_member(region, src)?;
    reachable_in(|s: &Site| region.contains_unchecked(s), weights, &[*src], t, cap)
}

pub(crate) fn reachable_in<D, W>(
    domain: D,
    weights: &W,
    sources: &[Site],
    t: f64,
    cap: usize,
) -> Result<Vec<(Site, f64)>>
where
    D: Fn(&Site) -> bool,
    W: EdgeWeights + ?Sized,
{
    let mut search = Search::new(domain, weights, cap).with_bound(t);
    for s in sources {
        search.add_source(*s, 0.0);
    }
    let mut out = Vec::new();
    while let Some(x) = search.next()? {
        out.push(x);
    }
    Ok(out)
}

/// One search per region over the same weights; costs in input order.
pub fn coupled_travel_times<W: EdgeWeights + ?Sized>(
    regions: &[RegionSpec],
    weights: &W,
    src: &Site,
    dst: &Site,
    cap: usize,
) -> Result<Vec<f64>> {
    regions
        .iter()
        .map(|r| travel_time(r, weights, src, dst, cap).map(|t| t.cost))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Direction;
    use crate::randomness::{y_statistic, DistributionSpec, WeightField};

    fn ones() -> WeightField {
        WeightField::new(0, DistributionSpec::PointMass { v: 1.0 })
    }

    fn expo(seed: u64) -> WeightField {
        WeightField::new(seed, DistributionSpec::exponential(1.0))
    }

    /// Bellman–Ford style relaxation over every site of a finite region, to a
    /// fixed point. Independent of the heap-based engine.
    fn bellman_oracle(region: &RegionSpec, w: &WeightField, src: &Site, lo: &Site, hi: &Site) -> FxHashMap<Site, f64> {
        let sites: Vec<Site> = box_sites(lo, hi)
            .into_iter()
            .filter(|s| region.contains_unchecked(s))
            .collect();
        let mut dist: FxHashMap<Site, f64> = sites.iter().map(|s| (*s, f64::INFINITY)).collect();
        dist.insert(*src, 0.0);
        loop {
            let mut changed = false;
            for s in &sites {
                for n in s.lattice_neighbors() {
                    if let Some(&dn) = dist.get(&n) {
                        let c = dn + w.sample_weight(&CanonicalEdge::between(s, &n).unwrap());
                        if c < dist[s] {
                            dist.insert(*s, c);
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return dist;
            }
        }
    }

    #[test]
    fn deterministic_examples() {
        let r = travel_time(&RegionSpec::full(2), &ones(), &Site::origin(2), &Site::new(&[3, 4]), DEFAULT_SITE_CAP).unwrap();
        assert_eq!(r.cost, 7.0);
        assert_eq!(path_cost(&ones(), &r.path).unwrap(), 7.0);
        assert!(r.certified);
        let cone = RegionSpec::cone(Direction::axis(2, 0), 0.5);
        let r = travel_time(&cone, &ones(), &Site::origin(2), &Site::new(&[10, 5]), DEFAULT_SITE_CAP).unwrap();
        assert_eq!(r.cost, 15.0);
        assert!(r.path.iter().all(|s| cone.contains_unchecked(s)));
        let o = Site::origin(2);
        let r = travel_time(&cone, &ones(), &o, &o, DEFAULT_SITE_CAP).unwrap();
        assert_eq!(r.cost, 0.0);
        assert!(r.path.is_empty());
    }

    #[test]
    fn matches_bellman_oracle_on_small_boxes() {
        for seed in 0..20 {
            let w = expo(seed);
            for d in [2usize, 3] {
                let (lo, hi) = if d == 2 {
                    (Site::new(&[0, 0]), Site::new(&[5, 5]))
                } else {
                    (Site::new(&[0, 0, 0]), Site::new(&[5, 5, 5]))
                };
                let centre: Vec<f64> = vec![2.5; d];
                // a box as a capsule of huge radius intersected by the box predicate
                let region = RegionSpec::capsule(&centre, &centre, 100.0);
                let src = lo;
                let oracle = bellman_oracle(&region, &w, &src, &lo, &hi);
                let inside = |s: &Site| (0..d).all(|i| s.get(i) >= lo.get(i) && s.get(i) <= hi.get(i));
                for (dst, want) in &oracle {
                    let got = travel_time_in(inside, &w, &src, dst, DEFAULT_SITE_CAP).unwrap();
                    assert_eq!(got.cost, *want, "seed {seed} {dst}");
                }
            }
        }
    }

    #[test]
    fn symmetric_and_path_consistent() {
        let w = expo(4);
        let r = RegionSpec::full(2);
        let a = Site::new(&[-7, 3]);
        let b = Site::new(&[9, -2]);
        let ab = travel_time(&r, &w, &a, &b, DEFAULT_SITE_CAP).unwrap();
        let ba = travel_time(&r, &w, &b, &a, DEFAULT_SITE_CAP).unwrap();
        assert!((ab.cost - ba.cost).abs() < 1e-12);
        assert!((path_cost(&w, &ab.path).unwrap() - ab.cost).abs() < 1e-12);
        assert!(ab.cost >= y_statistic(&w, &a, &r).unwrap());
    }

    #[test]
    fn unreachable_and_budget() {
        let thin = RegionSpec::capsule(&[0.0, 0.0], &[0.0, 0.0], 1.0);
        let far = RegionSpec::capsule(&[0.0, 0.0], &[6.0, 0.0], 1.0);
        assert!(matches!(
            travel_time(&thin, &ones(), &Site::origin(2), &Site::new(&[5, 0]), 10),
            Err(Error::Contract(_))
        ));
        let w = |e: &CanonicalEdge| if e.base.get(0) == 2 && e.base.get(1) == 0 && e.axis == 0 { f64::INFINITY } else { 1.0 };
        // an infinite edge blocks, but the engine still returns the finite detour if one exists
        let r = travel_time(&far, &w, &Site::origin(2), &Site::new(&[5, 0]), 1000).unwrap();
        assert!(r.cost.is_finite());
        let line = RegionSpec::capsule(&[0.0, 0.0], &[6.0, 0.0], 0.5);
        assert!(matches!(
            travel_time(&line, &w, &Site::origin(2), &Site::new(&[5, 0]), 1000),
            Err(Error::Unreachable { .. })
        ));
        let zero = WeightField::new(0, DistributionSpec::PointMass { v: 0.0 });
        let err = travel_time(&RegionSpec::full(2), &zero, &Site::origin(2), &Site::new(&[100, 0]), 50);
        assert!(matches!(err, Err(Error::BudgetExceeded { cap: 50, .. })));
        let err = reachable_set(&RegionSpec::full(2), &zero, &Site::origin(2), 0.0, 50);
        assert!(matches!(err, Err(Error::BudgetExceeded { cap: 50, .. })));
    }

    #[test]
    fn hyperplane_examples() {
        let c = RegionSpec::cylinder(Direction::axis(2, 0), 6.0);
        let r = travel_time_to_hyperplane(&c, &ones(), 0, 10, DEFAULT_SITE_CAP).unwrap();
        assert_eq!(r.cost, 10.0);
        let zero = WeightField::new(0, DistributionSpec::PointMass { v: 0.0 });
        assert_eq!(travel_time_to_hyperplane(&c, &zero, 0, 10, DEFAULT_SITE_CAP).unwrap().cost, 0.0);
        let cap = RegionSpec::capsule(&[0.0, 0.0], &[5.0, 0.0], 1.0);
        assert!(matches!(
            travel_time_to_hyperplane(&cap, &ones(), 0, 40, DEFAULT_SITE_CAP),
            Err(Error::EmptySlice(40))
        ));
        let c3 = RegionSpec::cylinder(Direction::new(Site::new(&[1, 1, 0])).unwrap(), 3.0);
        let s = hyperplane_slice(&c3, 8).unwrap();
        assert!(!s.is_empty());
        assert!(s.iter().all(|x| c3.contains_unchecked(x) && x.coords().iter().map(|&v| v as i64).sum::<i64>() == 8));
    }

    #[test]
    fn reachable_examples() {
        let r = reachable_set(&RegionSpec::full(2), &ones(), &Site::origin(2), 2.0, DEFAULT_SITE_CAP).unwrap();
        assert_eq!(r.len(), 13);
        let r = reachable_set(&RegionSpec::full(2), &expo(1), &Site::origin(2), 0.0, DEFAULT_SITE_CAP).unwrap();
        assert_eq!(r, vec![(Site::origin(2), 0.0)]);
    }

    #[test]
    fn reachable_zero_cluster_matches_union_find() {
        let w = WeightField::new(8, DistributionSpec::BernoulliZero { p0: 0.9, v1: 1.0 });
        let region = RegionSpec::capsule(&[0.0, 0.0], &[0.0, 0.0], 6.0);
        let (lo, hi) = region.bounding_box().unwrap();
        let sites: Vec<Site> = box_sites(&lo, &hi).into_iter().filter(|s| region.contains_unchecked(s)).collect();
        let index: FxHashMap<Site, usize> = sites.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let mut parent: Vec<usize> = (0..sites.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for (i, s) in sites.iter().enumerate() {
            for n in s.lattice_neighbors() {
                if let Some(&j) = index.get(&n) {
                    if w.sample_weight(&CanonicalEdge::between(s, &n).unwrap()) == 0.0 {
                        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                        parent[a] = b;
                    }
                }
            }
        }
        let root = find(&mut parent, index[&Site::origin(2)]);
        let mut cluster: Vec<Site> = (0..sites.len()).filter(|&i| find(&mut parent, i) == root).map(|i| sites[i]).collect();
        cluster.sort();
        let mut got: Vec<Site> = reachable_set(&region, &w, &Site::origin(2), 0.0, DEFAULT_SITE_CAP)
            .unwrap()
            .into_iter()
            .map(|x| x.0)
            .collect();
        got.sort();
        assert_eq!(got, cluster);
    }

    #[test]
    fn coupling_examples() {
        let w = expo(2);
        let o = Site::origin(2);
        let z = Site::new(&[20, 3]);
        let cone = RegionSpec::cone(Direction::axis(2, 0), 0.5);
        let c = coupled_travel_times(&[RegionSpec::full(2), cone.clone(), cone], &w, &o, &z, DEFAULT_SITE_CAP).unwrap();
        assert!(c[0] <= c[1]);
        assert_eq!(c[1], c[2]);
        let u = Direction::new(z).unwrap();
        let c = coupled_travel_times(&[RegionSpec::cylinder(u, 8.0), RegionSpec::cylinder(u, 16.0)], &w, &o, &z, DEFAULT_SITE_CAP).unwrap();
        assert!(c[1] <= c[0]);
    }

    #[test]
    fn multi_target_matches_single_queries() {
        let w = expo(6);
        let cone = RegionSpec::cone(Direction::axis(2, 0), 0.5);
        let o = Site::origin(2);
        let ts = [Site::new(&[12, 2]), Site::new(&[3, 0]), Site::new(&[12, 2]), o];
        let got = travel_times_from(&cone, &w, &o, &ts, DEFAULT_SITE_CAP).unwrap();
        for (t, g) in ts.iter().zip(&got) {
            assert_eq!(*g, travel_time(&cone, &w, &o, t, DEFAULT_SITE_CAP).unwrap().cost);
        }
    }

    #[test]
    fn path_cost_contract() {
        assert_eq!(path_cost(&ones(), &[]).unwrap(), 0.0);
        let p: Vec<Site> = (0..8).map(|i| Site::new(&[i, 0])).collect();
        assert_eq!(path_cost(&ones(), &p).unwrap(), 7.0);
        assert!(matches!(
            path_cost(&ones(), &[Site::origin(2), Site::new(&[1, 1])]),
            Err(Error::Contract(_))
        ));
    }
}
