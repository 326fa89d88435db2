mod common;

use common::{p4_jets, p4_rhs, up_jet, Jet};
use painleve_core::pode::{integrate, IntegrateOptions, OdeSpec, OdeTrajectory};
use painleve_core::weyl::{
    backlund_p4_down, backlund_p4_up, check_relations, check_translation, ladder_params, ladder_step, ladder_sum_residual,
    SignConvention,
};
use painleve_core::{PrecisionContext, Scalar};
use rug::{Float, Rational};

const TOL: f64 = 1e-10;

struct Ladder {
    ctx: PrecisionContext,
    traj: OdeTrajectory,
    alpha: Float,
    beta: Float,
    next: (Float, Float),
    spacing: f64,
}

fn ladder() -> Ladder {
    let ctx = PrecisionContext::new(128).unwrap();
    let (c0, c1) = (Rational::from((1, 3)), Rational::from((1, 5)));
    let (a, b) = ladder_params(&c0, &c1, 0);
    let (a1, b1) = ladder_params(&c0, &c1, 1);
    let spec = OdeSpec::P4 { alpha: Scalar::from(a.clone()), beta: Scalar::from(b.clone()) };
    let spacing = 0.01;
    let samples: Vec<Float> = (1..=90).map(|i| ctx.float(0.1 + spacing * i as f64)).collect();
    let opts = IntegrateOptions { samples, ..Default::default() };
    let traj = integrate(&spec, &[ctx.float(0.5), ctx.float(0.2)], (&ctx.float(0.1), &ctx.float(1.0)), TOL, &ctx, &opts).unwrap();
    assert!(traj.completed);
    let f = |r: &Rational| Float::with_val(128, r);
    Ladder { alpha: f(&a), beta: f(&b), next: (f(&a1), f(&b1)), traj, ctx, spacing }
}

#[test]
fn relations_hold_exactly() {
    let checks = check_relations(100, 2024, SignConvention::PlusNext);
    assert_eq!(checks.len(), 20);
    assert!(checks.iter().all(|c| c.passed && c.trials == 100));
    assert!(check_translation(100, 2025).passed());
}

#[test]
fn up_transform_solves_shifted_equation() {
    let l = ladder();
    let (a1, b1) = &l.next;
    // the shifted parameters also follow from the previous rung
    let (sa, sb) = ladder_step(&Rational::from((2, 15)), &Rational::from((8, 15)));
    assert_eq!((Float::with_val(128, &sa), Float::with_val(128, &sb)), (a1.clone(), b1.clone()));
    let mut worst = 0f64;
    for (t, y) in l.traj.times.iter().zip(&l.traj.states) {
        let (wj, wpj) = p4_jets(t, &y[0], &y[1], &l.alpha, &l.beta);
        let tj = Jet([t.clone(), l.ctx.float(1), l.ctx.float(0)]);
        let u = up_jet(&tj, &wj, &wpj, &l.beta);
        let up = backlund_p4_up(&y[0], &y[1], t, &l.beta).unwrap();
        assert!(Float::with_val(128, &up - u.value()).abs() < 1e-25);
        // residual of u in the equation with the next parameters
        let ud = Jet::constant(&u.d1());
        let rhs = p4_rhs(&Jet::constant(t), &Jet::constant(u.value()), &ud, a1, b1);
        let r = Float::with_val(128, u.d2() - rhs.value()).to_f64().abs();
        worst = worst.max(r);
    }
    assert!(worst < 10.0 * TOL, "worst residual {worst:e}");
}

#[test]
fn up_then_down_recovers_solution() {
    let l = ladder();
    let (_, b1) = &l.next;
    let ts = &l.traj.times;
    let us: Vec<Float> =
        ts.iter().zip(&l.traj.states).map(|(t, y)| backlund_p4_up(&y[0], &y[1], t, &l.beta).unwrap()).collect();
    let mut worst = 0f64;
    for i in 2..ts.len() - 2 {
        // five-point central difference on the uniform sample grid
        let d = (Float::with_val(128, &us[i - 2] - &us[i + 2]) + Float::with_val(128, &us[i + 1] - &us[i - 1]) * 8u32)
            / (12.0 * l.spacing);
        let back = backlund_p4_down(&us[i], &d, &ts[i], b1).unwrap();
        worst = worst.max(Float::with_val(128, &back - &l.traj.states[i][0]).abs().to_f64());
    }
    assert!(worst < 1e-6, "worst {worst:e}");
}

#[test]
fn summed_relation_holds_pointwise() {
    let l = ladder();
    for (t, y) in l.traj.times.iter().zip(&l.traj.states) {
        let up = backlund_p4_up(&y[0], &y[1], t, &l.beta).unwrap();
        let down = backlund_p4_down(&y[0], &y[1], t, &l.beta).unwrap();
        let r = ladder_sum_residual(&y[0], &up, &down, t, &l.beta).to_f64().abs();
        assert!(r < 1e-8, "t = {t}: {r:e}");
    }
}
