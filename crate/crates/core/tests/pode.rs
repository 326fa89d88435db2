use painleve_core::pode::{
    integrate, integrate_fixed, laurent_p1, ny_p4_params, ny_sum_drift, ny_to_p4, residual, weierstrass_drift,
    IntegrateOptions, LaurentSeries, OdeSpec, DESIGN_ORDER, RESONANCE,
};
use painleve_core::{PrecisionContext, Scalar};
use rug::Float;

fn ctx() -> PrecisionContext {
    PrecisionContext::new(128).unwrap()
}

fn s(n: i64, d: i64) -> Scalar {
    Scalar::exact(n, d).unwrap()
}

fn ny_spec() -> OdeSpec {
    OdeSpec::Ny { gamma: [s(1, 3), s(1, 5), s(7, 15)] }
}

#[test]
fn three_field_sum_is_conserved() {
    let c = ctx();
    let tol = 1e-10;
    let y0 = [c.float(0.3), c.float(-0.2), c.float(0.1)];
    let tr = integrate(&ny_spec(), &y0, (&c.float(0.2), &c.float(1.5)), tol, &c, &Default::default()).unwrap();
    assert!(tr.completed);
    assert!(ny_sum_drift(&tr) < 10.0 * tol, "{}", ny_sum_drift(&tr));
}

#[test]
fn three_field_image_solves_p4() {
    let c = ctx();
    let tol = 1e-10;
    let spec = ny_spec();
    let OdeSpec::Ny { gamma } = &spec else { unreachable!() };
    let (alpha, beta) = ny_p4_params(gamma);
    let p4 = OdeSpec::P4 { alpha, beta };
    let y0 = [c.float(0.3), c.float(-0.2), c.float(0.1)];
    let tr = integrate(&spec, &y0, (&c.float(0.2), &c.float(1.5)), tol, &c, &Default::default()).unwrap();
    for pt in ny_to_p4(&tr, &c).unwrap() {
        let r = residual(&p4, &pt.t, &pt.w, &pt.wp, &pt.wpp).unwrap();
        assert!(r.to_f64().abs() < 100.0 * tol, "t = {} residual {}", pt.t, r);
    }
    // the other sign of the shifted β leaves an O(1) residual
    let OdeSpec::Ny { gamma } = &spec else { unreachable!() };
    let wrong = OdeSpec::P4 { alpha: gamma[0].sub(&gamma[2]), beta: gamma[1].clone() };
    let pt = &ny_to_p4(&tr, &c).unwrap()[3];
    assert!(residual(&wrong, &pt.t, &pt.w, &pt.wp, &pt.wpp).unwrap().to_f64().abs() > 1e-3);
}

fn p1auto_drift(tol: f64) -> f64 {
    let c = ctx();
    let spec = OdeSpec::P1Auto { g2: s(1, 1) };
    let tr = integrate(&spec, &[c.float(0.3), c.float(0.2)], (&c.float(0.0), &c.float(1.0)), tol, &c, &Default::default())
        .unwrap();
    weierstrass_drift(&tr, &c.float(1))
}

#[test]
fn weierstrass_invariant_is_conserved() {
    for tol in [1e-8, 1e-10, 1e-12] {
        let d = p1auto_drift(tol);
        assert!(d < 100.0 * tol, "tol {tol}: drift {d}");
    }
}

#[test]
fn fixed_step_convergence_matches_design_order() {
    let c = ctx();
    let spec = OdeSpec::P1Auto { g2: s(1, 1) };
    let drift = |n: usize| {
        let tr = integrate_fixed(&spec, &[c.float(0.3), c.float(0.2)], (&c.float(0.0), &c.float(1.0)), n, &c).unwrap();
        weierstrass_drift(&tr, &c.float(1))
    };
    let (d1, d2) = (drift(20), drift(40));
    let ratio = d1 / d2;
    assert!(ratio >= 2f64.powi(DESIGN_ORDER as i32 - 1), "ratio {ratio}: {d1} / {d2}");
}

#[test]
fn halving_tolerance_reduces_drift() {
    let (d1, d2) = (p1auto_drift(1e-9), p1auto_drift(5e-10));
    println!("adaptive drift ratio {}", d1 / d2);
    assert!(d2 < d1);
}

/// Independent order-by-order check: builds `w''`, `6w²` and `t` as
/// coefficient lists in powers `τ^(k-4)` and compares them.
fn series_defect(sr: &LaurentSeries) -> Vec<f64> {
    let p = sr.t0.prec();
    let m = sr.coeffs.len();
    let mut out = Vec::new();
    for k in 0..m {
        // τ^(k-4) coefficient
        let d2 = Float::with_val(p, &sr.coeffs[k] * ((k as i64 - 2) * (k as i64 - 3)));
        let mut sq = Float::with_val(p, 0);
        for i in 0..=k {
            sq += Float::with_val(p, &sr.coeffs[i] * &sr.coeffs[k - i]);
        }
        let mut rhs = sq * 6u32;
        if k == 4 {
            rhs += &sr.t0;
        }
        if k == 5 {
            rhs += 1u32;
        }
        out.push(Float::with_val(p, d2 - rhs).to_f64().abs());
    }
    out
}

#[test]
fn laurent_coefficients_match_order_by_order() {
    let c = ctx();
    let sr = laurent_p1(&c.float(-0.4), &c.float(1.25), 12).unwrap();
    for (k, d) in series_defect(&sr).iter().enumerate() {
        assert!(*d < 1e-30, "order {k}: {d}");
    }
    assert_eq!(sr.coeffs[RESONANCE], 1.25);
}

#[test]
fn laurent_series_matches_integration_near_pole() {
    let c = PrecisionContext::new(160).unwrap();
    let tol = 1e-16;
    let y0 = [c.float(0.0), c.float(1.0)];
    let start = c.float(0.0);
    let first = integrate(&OdeSpec::P1, &y0, (&start, &c.float(10.0)), tol, &c, &Default::default()).unwrap();
    let ev = &first.events[0];
    let (tf, wf) = (&first.times[ev.index], &first.states[ev.index]);
    // w ≈ τ⁻² locates the pole
    let guess_t0 = Float::with_val(160, tf + Float::with_val(160, wf[0].clone().sqrt().recip()));
    let fit = LaurentSeries::fit(tf, (&wf[0], &wf[1]), (guess_t0, c.float(0.0)), 10).unwrap();
    let probe = Float::with_val(160, &fit.t0 - c.float(1e-2));
    let opts = IntegrateOptions { halt_on_pole: false, samples: vec![probe.clone()], ..Default::default() };
    let second = integrate(&OdeSpec::P1, &y0, (&start, &probe), tol, &c, &opts).unwrap();
    let (w_series, _) = fit.eval(&probe);
    let w_num = &second.last_state()[0];
    let abs = Float::with_val(160, w_num - &w_series).abs().to_f64();
    println!("pole at {}, h = {}, |Δw| = {abs:e}, w = {}", fit.t0.to_f64(), fit.h.to_f64(), w_num.to_f64());
    assert!(abs < 1e-6);
}
