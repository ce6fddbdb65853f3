use proptest::prelude::*;
use submodlab_core::factor::{feasible, grid_min, objective, reference_point, verify_certificate, Point};
use submodlab_core::ProgramId;

fn lower_bound(p: ProgramId) -> f64 {
    match p {
        ProgramId::FptPlusA => 2.0 * (6.0 - 2f64.sqrt()) / 17.0,
        ProgramId::FptPlusB | ProgramId::FptB => 0.6,
        ProgramId::SymA | ProgramId::SymB => 0.5029,
        ProgramId::FptA => 0.0,
    }
}

fn point() -> impl Strategy<Value = Point> {
    (-0.9f64..=0.9, 0.0f64..=0.9, 0.0f64..=0.9, 0.0f64..=0.9, 0.0f64..=1.0, 0.0f64..=1.0, 0.0f64..=1.0)
        .prop_map(|(a, b, c, d, alpha, beta0, beta1)| Point { a, b, c, d, alpha, beta0, beta1 })
}

#[test]
fn coarse_grids_bracket_the_reference_points() {
    for p in ProgramId::ALL {
        let r = grid_min(p, 0.05, 0.0).unwrap();
        assert!(r.certified_lower_bound <= r.grid_minimum);
        assert!(r.certified_lower_bound <= objective(p, &reference_point(p)) + 1e-12);
        assert!(feasible(p, &r.argmin, 0.0).feasible);
        assert!(r.grid_minimum >= lower_bound(p) - 1e-12, "{p}");
    }
}

#[test]
fn slack_only_lowers_the_grid_minimum() {
    let strict = grid_min(ProgramId::SymA, 0.02, 0.0).unwrap();
    let loose = grid_min(ProgramId::SymA, 0.02, 0.01).unwrap();
    assert!(loose.grid_minimum <= strict.grid_minimum);
}

#[test]
fn reports_serialize() {
    let r = verify_certificate(ProgramId::FptPlusA).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    assert_eq!(v["program"], "FPTPLUS-A");
    let p: Point = serde_json::from_value(serde_json::json!({"a": 0.1, "b": 0.2, "c": 0.3})).unwrap();
    assert_eq!(p.d, 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4000))]

    #[test]
    fn points_below_the_bound_are_infeasible(x in point()) {
        for p in ProgramId::ALL {
            if objective(p, &x) < lower_bound(p) - 1e-9 {
                prop_assert!(!feasible(p, &x, 0.0).feasible, "{} {:?}", p, x);
            }
        }
    }

    #[test]
    fn objective_dominates_each_term(x in point()) {
        let r = objective(ProgramId::FptB, &x);
        prop_assert!(r >= x.b && r >= x.a + x.b && r >= x.beta1 + x.c && r >= x.alpha + x.c);
        let s = objective(ProgramId::SymA, &x);
        prop_assert!(s >= x.b && s >= x.d + x.c);
    }
}
