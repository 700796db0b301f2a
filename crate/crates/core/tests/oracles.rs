mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use warpgray::profile::{quartic_roots, solve, StepControl};
use warpgray::verify::{self, c1_alpha_sign, expected_constants, SampleSpec};
use warpgray::{Family, FamilyParams, WarpedMetric};

use common::{canonical, simpson, slice_oracle};

#[test]
fn eigenvalues_match_slice_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for (name, m) in canonical() {
        let (a, b) = m.profile().sampling_interval();
        for _ in 0..20 {
            let t = rng.gen_range(a + 0.05 * (b - a)..b - 0.05 * (b - a));
            let (lo, mo) = slice_oracle(&m, t);
            let (l, mu) = m.ricci_eigenvalues(t).unwrap();
            assert!((l - lo).abs() < 1e-5, "{name} t={t}: lambda {l} vs {lo}");
            assert!((mu - mo).abs() < 1e-5, "{name} t={t}: mu {mu} vs {mo}");
        }
    }
}

#[test]
fn slice_oracle_sees_perturbation() {
    let (_, m) = canonical().remove(0);
    let p = WarpedMetric::new(m.profile().perturbed(0.01, 3.0));
    let (lo, _) = slice_oracle(&p, 1.0);
    let (l, _) = m.ricci_eigenvalues(1.0).unwrap();
    assert!((l - lo).abs() > 1e-3);
}

#[test]
fn turning_point_matches_lemniscate_quadrature() {
    // int_0^1 dx / sqrt(1 - x^4), with x = sin(theta)
    let oracle = simpson(|th: f64| 1.0 / (1.0 + th.sin().powi(2)).sqrt(), 0.0, std::f64::consts::FRAC_PI_2, 2000);
    assert!((oracle - 1.311_028_777_1).abs() < 1e-9);
    let p = solve(&FamilyParams::sphere(3, -1.0, 0.0).unwrap(), Family::Compact, &StepControl::default())
        .unwrap();
    assert!((p.t0().unwrap() - oracle).abs() < 1e-6);
}

#[test]
fn quartic_roots_from_quadratic_formula() {
    let (a, b) = quartic_roots(&FamilyParams::periodic(3, -2.0, 3.0).unwrap()).unwrap();
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    assert!((a - (golden - 1.0)).abs() < 1e-14 && (b - golden).abs() < 1e-14);
    let (a, _) = quartic_roots(&FamilyParams::sphere(3, 1.0, -2.5).unwrap()).unwrap();
    assert!((a - 0.5f64.sqrt()).abs() < 1e-14);
    assert!(quartic_roots(&FamilyParams::periodic(3, -2.0, 1.0).unwrap()).is_err());
}

#[test]
fn period_matches_simpson_oracle() {
    let p = solve(&FamilyParams::periodic(3, -2.0, 3.0).unwrap(), Family::Periodic, &StepControl::default())
        .unwrap();
    // t-period of f'^2 = -(f^2 - a^2)(f^2 - b^2) in the theta substitution
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    let (a, b) = (golden - 1.0, golden);
    let oracle = 2.0
        * simpson(
            |th: f64| 1.0 / (a * a * th.cos().powi(2) + b * b * th.sin().powi(2)).sqrt(),
            0.0,
            std::f64::consts::FRAC_PI_2,
            4000,
        );
    assert!((p.period().unwrap() - oracle).abs() < 1e-9, "{} vs {oracle}", p.period().unwrap());
    assert!(p.period_event_mismatch().unwrap() < 1e-8);
}

/// Which sign s makes s (m-1)^2 alpha^2 + (m-2) mu^2 constant, found by
/// trying both on sampled data.
fn brute_force_c1(m: &WarpedMetric) -> (f64, f64) {
    let n = m.params().nf();
    let (a, b) = m.profile().sampling_interval();
    let ts: Vec<f64> = (1..50).map(|i| a + (b - a) * i as f64 / 50.0).collect();
    let mut best = (0.0, f64::INFINITY, 0.0);
    for s in [1.0, -1.0] {
        let vals: Vec<f64> = ts
            .iter()
            .map(|&t| {
                let e = m.scalar_and_shifted(t).unwrap();
                s * n * n * e.alpha * e.alpha + (n - 1.0) * e.mu * e.mu
            })
            .collect();
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if hi - lo < best.1 {
            best = (s, hi - lo, vals[0]);
        }
    }
    assert!(best.1 < 1e-7, "no constant combination");
    (best.0, best.2)
}

#[test]
fn c1_sign_confirmed_by_brute_force() {
    for (name, m) in canonical() {
        let (s, value) = brute_force_c1(&m);
        assert_eq!(s, c1_alpha_sign(&m), "{name}");
        let exp = expected_constants(&m).c1;
        assert!((value - exp).abs() < 1e-7 * exp.abs().max(1.0), "{name}: {value} vs {exp}");
    }
    // n=3, eps=+1, A=-2: n^2 (n-1) (A^2 - 4) = 0; eps=-1, A=0: 4 n^2 (n-1) = 72
    let m = &canonical()[2].1;
    assert!((expected_constants(m).c1 - 72.0).abs() < 1e-12);
}

#[test]
fn invariants_hold_on_every_family() {
    for (name, m) in canonical() {
        for r in verify::invariants_scan(&m, SampleSpec::default()).unwrap() {
            assert!(r.pass, "{name}: {r:?}");
        }
        let e = expected_constants(&m);
        let p = m.params();
        assert_eq!(e.c0, 3.0 * 2.0 * p.a);
        assert!((e.mu_s - 3.0 * p.a * 2.0 / 6.0).abs() < 1e-15);
    }
}

/// `(m-1) alpha alpha' = sigma (m-2)/(m-1) mu mu'` with the sign of the expansion
/// `(n-2)` (not `2-n`) once `sigma = -c1_alpha_sign` absorbs the branch.
#[test]
fn alpha_mu_differential_identity_sign() {
    let h = 1e-5;
    for (name, m) in canonical() {
        let mf = m.params().m();
        let sigma = -c1_alpha_sign(&m);
        let (a, b) = m.profile().sampling_interval();
        for i in 1..20 {
            let t = a + (b - a) * i as f64 / 20.0;
            let e = m.scalar_and_shifted(t).unwrap();
            let ep = m.scalar_and_shifted(t + h).unwrap();
            let em = m.scalar_and_shifted(t - h).unwrap();
            let dalpha = (ep.alpha - em.alpha) / (2.0 * h);
            let dmu = (ep.mu - em.mu) / (2.0 * h);
            let lhs = (mf - 1.0) * e.alpha * dalpha;
            let rhs = sigma * (mf - 2.0) / (mf - 1.0) * e.mu * dmu;
            let scale = 1.0 + lhs.abs() + rhs.abs();
            assert!((lhs - rhs).abs() < 1e-5 * scale, "{name} t={t}: {lhs} vs {rhs}");
            if (e.mu * dmu).abs() > 1e-3 {
                assert!((lhs + rhs).abs() > 1e-3, "{name} t={t}: opposite sign also fits");
            }
        }
    }
}
