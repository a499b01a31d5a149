mod common;

use proptest::prelude::*;

use conefpp::dynamical::{subwindow_bounds, sup_travel_time};
use conefpp::geometry::{classify, Direction, RegionSpec, Site, SiteClass};
use conefpp::metric::{path_cost, reachable_set, travel_time};
use conefpp::randomness::{y_statistic, DistributionSpec, DynamicalWeightField, WeightField};

const CAP: usize = 1 << 22;

fn exp1() -> DistributionSpec {
    DistributionSpec::exponential(1.0)
}

fn site2(range: i64) -> impl Strategy<Value = Site> {
    (-range..=range, -range..=range).prop_map(|(a, b)| Site::new(&[a, b]))
}

fn cone() -> RegionSpec {
    RegionSpec::cone(Direction::axis(2, 0), 0.5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn triangle_inequality(seed in any::<u64>(), x in site2(25), y in site2(25), z in site2(25)) {
        let f = WeightField::new(seed, exp1());
        let r = RegionSpec::full(2);
        let xy = travel_time(&r, &f, &x, &y, CAP).unwrap().cost;
        let xz = travel_time(&r, &f, &x, &z, CAP).unwrap().cost;
        let zy = travel_time(&r, &f, &z, &y, CAP).unwrap().cost;
        prop_assert!(xy <= xz + zy + 1e-9 * (xz + zy));
    }

    #[test]
    fn symmetric(seed in any::<u64>(), x in site2(20), y in site2(20)) {
        let f = WeightField::new(seed, exp1());
        let r = RegionSpec::full(2);
        let a = travel_time(&r, &f, &x, &y, CAP).unwrap().cost;
        let b = travel_time(&r, &f, &y, &x, CAP).unwrap().cost;
        prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
    }

    #[test]
    fn reported_path_realises_cost(seed in any::<u64>(), y in site2(20)) {
        let f = WeightField::new(seed, exp1());
        let r = RegionSpec::full(2);
        let res = travel_time(&r, &f, &Site::origin(2), &y, CAP).unwrap();
        prop_assert_eq!(res.path.first().copied(), Some(Site::origin(2)));
        prop_assert_eq!(res.path.last().copied(), Some(y));
        prop_assert!((path_cost(&f, &res.path).unwrap() - res.cost).abs() <= 1e-9 * res.cost.max(1.0));
    }

    #[test]
    fn refinement_never_lowers_cost(seed in any::<u64>(), a in 4i64..40, b in -10i64..=10) {
        let z = Site::new(&[a, b]);
        prop_assume!(classify(&cone(), &z).unwrap() == SiteClass::Interior);
        let f = WeightField::new(seed, exp1());
        let o = Site::origin(2);
        let lattice = travel_time(&RegionSpec::full(2), &f, &o, &z, CAP).unwrap().cost;
        let in_cone = travel_time(&cone(), &f, &o, &z, CAP).unwrap().cost;
        let capsule = RegionSpec::capsule_sites(&o, &z, 4.0 * 2f64.sqrt());
        let in_capsule = travel_time(&capsule, &f, &o, &z, CAP).unwrap().cost;
        prop_assert!(lattice <= in_cone && in_cone <= in_capsule);
    }

    #[test]
    fn point_mass_gives_l1(z in site2(40)) {
        let f = WeightField::new(0, DistributionSpec::PointMass { v: 1.0 });
        prop_assert_eq!(travel_time(&RegionSpec::full(2), &f, &Site::origin(2), &z, CAP).unwrap().cost, z.l1() as f64);
    }

    #[test]
    fn sandwich_holds(seed in any::<u64>(), a in 3i64..16, b in -2i64..=2) {
        let z = Site::new(&[a, b]);
        let field = DynamicalWeightField::new(seed, exp1(), 1.0);
        let r = cone();
        let o = Site::origin(2);
        let tr = sup_travel_time(&field, &r, &o, &z, (0.0, 1.0), CAP).unwrap();
        // Quarter windows keep the bar environment subcritical.
        for w in subwindow_bounds(&field, &r, &o, &z, (0.0, 1.0), 0.25, CAP).unwrap() {
            for s in [w.start, 0.5 * (w.start + w.end)] {
                let v = tr.value_at(s);
                prop_assert!(w.bar_cost <= v && v <= w.hat_cost);
            }
        }
        prop_assert!(tr.lower_cost <= tr.inf && tr.sup <= tr.hat_cost);
    }
}

#[test]
fn travel_time_dominates_site_minimum() {
    let r = cone();
    let f = WeightField::new(17, exp1());
    let cells = reachable_set(&r, &f, &Site::origin(2), 80.0, CAP).unwrap();
    assert!(cells.len() > 10_000);
    for (z, t) in cells.iter().filter(|(z, _)| !z.is_origin()).take(10_000) {
        assert!(*t >= y_statistic(&f, z, &r).unwrap(), "{z}");
    }
}

#[test]
fn y_tail_matches_product_form() {
    let pareto = DistributionSpec::ParetoTail { alpha: 1.5, scale: 0.3 };
    for dist in [exp1(), pareto] {
        for c in common::y_tail(&dist, 2, &[0.5, 1.0, 2.0], 100_000, 5) {
            assert!(c.matches(), "{c:?}");
        }
    }
}

#[test]
fn minimum_moment_bound() {
    for q in [2, 3, 4] {
        for p in [1.0, 2.0] {
            let c = common::min_moment_bound(&exp1(), q, p, 20_000, 3);
            assert!(c.holds(), "{c:?}");
        }
    }
}

#[test]
fn envelope_minimum_bound() {
    let c = common::envelope_min_bound(&exp1(), 4, 2.0, 0.5, 20_000, 4);
    assert!(c.holds(), "{c:?}");
}

#[test]
fn capsule_tail_bound_small() {
    let c = common::capsule_tail_bound(&exp1(), &Site::new(&[4, 0]), 0.5, 2000, 6);
    assert!(c.holds(), "{c:?}");
}

#[test]
fn marginals_are_stationary() {
    for s in [0.0, 0.5, 1.0] {
        let p = common::weight_stationarity(&exp1(), s, 5000, 8);
        assert!(p > 0.01, "s = {s}: p = {p}");
    }
    let p = common::slice_stationarity(&exp1(), &cone(), &Site::new(&[12, 0]), 1.0, 200, 2);
    assert!(p > 0.01, "p = {p}");
}
