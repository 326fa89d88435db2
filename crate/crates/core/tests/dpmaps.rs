use painleve_core::dpmaps::{
    contour_grid, k_invariant, level_range, run_trajectory, DP1Params, GridSpec, MapParams, QP1Params, TrajectoryOptions,
};
use painleve_core::precision::q;
use painleve_core::Scalar;

fn s(n: i64, d: i64) -> Scalar {
    Scalar::exact(n, d).unwrap()
}

#[test]
fn autonomous_csv_has_constant_invariant() {
    let t = run_trajectory(&MapParams::Qp1Auto, (s(2, 1), s(3, 1)), 0, 5, &TrajectoryOptions::default()).unwrap();
    let csv = t.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,chart,coord1,coord2,K"));
    let ks: Vec<&str> = lines.filter_map(|l| l.rsplit(',').next()).filter(|k| !k.is_empty()).collect();
    assert!(ks.len() >= 5);
    assert!(ks.iter().all(|k| *k == "41/6"));
}

#[test]
fn dp1_fixed_point_is_constant() {
    let p = MapParams::Dp1(DP1Params::new(s(0, 1), s(3, 1), s(0, 1)));
    let t = run_trajectory(&p, (s(1, 1), s(1, 1)), 0, 10, &TrajectoryOptions::default()).unwrap();
    assert!(t.completed());
    assert!(t.entries().iter().all(|v| *v == Some(s(1, 1))));
}

#[test]
fn q_map_from_zero_reports_singular_step() {
    let p = MapParams::Qp1(QP1Params::new(s(1, 1), s(2, 1)).unwrap());
    let t = run_trajectory(&p, (s(0, 1), s(1, 1)), 0, 6, &TrajectoryOptions::default()).unwrap();
    assert!(!t.completed());
    assert_eq!(t.termination.unwrap().kind, "singular-step");
}

#[test]
fn q_map_confines_through_base_point() {
    // a start with w₁ = 1/z₁ enters the singularity pattern and leaves it
    let qp = QP1Params::new(s(1, 1), s(2, 1)).unwrap();
    let inv = qp.z(1).one_like().checked_div(&qp.z(1)).unwrap();
    let t = run_trajectory(&MapParams::Qp1(qp), (s(3, 1), inv), 0, 8, &TrajectoryOptions::default()).unwrap();
    assert!(t.completed(), "{:?}", t.termination);
    assert_eq!(t.passages.len(), 1);
    let e = t.entries();
    assert_eq!((&e[2], &e[3], &e[4]), (&Some(s(0, 1)), &None, &Some(s(0, 1))));
}

#[test]
fn contour_grid_corner_and_levels() {
    let spec = GridSpec { x: (q(1, 1), q(2, 1)), y: (q(1, 1), q(2, 1)), nx: 3, ny: 3 };
    let g = contour_grid(&spec, level_range(&q(3, 1), &q(6, 1), 4)).unwrap();
    assert_eq!(Scalar::from(g.values[0][0].clone()), k_invariant(&s(1, 1), &s(1, 1)).unwrap());
    assert_eq!(g.levels.len(), 4);
    assert!(g.to_csv().starts_with("x,y,K\n"));
    let bad = GridSpec { x: (q(0, 1), q(2, 1)), ..spec };
    assert!(contour_grid(&bad, vec![]).is_err());
}
