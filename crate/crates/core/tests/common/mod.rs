#![allow(dead_code)]

use warpgray::profile::{build, StepControl};
use warpgray::{Family, FamilyParams, WarpedMetric};

/// The four canonical families: tanh ray, compact eps=+1 A=-2.5,
/// compact eps=-1 A=0, periodic n=3 tau=-2 A=3.
pub fn canonical() -> Vec<(&'static str, WarpedMetric)> {
    let ctl = StepControl::default();
    let mk = |p: FamilyParams, fam| WarpedMetric::new(build(&p, fam, &ctl).unwrap());
    vec![
        ("tanh", mk(FamilyParams::sphere(3, 1.0, -2.0).unwrap(), Family::Ray)),
        ("compact+", mk(FamilyParams::sphere(3, 1.0, -2.5).unwrap(), Family::Compact)),
        ("compact-", mk(FamilyParams::sphere(3, -1.0, 0.0).unwrap(), Family::Compact)),
        ("periodic", mk(FamilyParams::periodic(3, -2.0, 3.0).unwrap(), Family::Periodic)),
    ]
}

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Ricci eigenvalues from the sectional curvatures of the totally geodesic
/// slice `dt^2 + f^2 dtheta^2` (Brioschi form, with `G = f^2` differentiated
/// by central differences) and the fiber-fiber planes of a constant-curvature
/// fiber. Uses only values of `f`.
/// Richardson-extrapolated in the step so the profile's interpolation noise stays small.
pub fn slice_oracle(metric: &WarpedMetric, t: f64) -> (f64, f64) {
    let (l1, m1) = slice_oracle_h(metric, t, 1e-2);
    let (l2, m2) = slice_oracle_h(metric, t, 5e-3);
    ((4.0 * l2 - l1) / 3.0, (4.0 * m2 - m1) / 3.0)
}

fn slice_oracle_h(metric: &WarpedMetric, t: f64, h: f64) -> (f64, f64) {
    let p = metric.params();
    let n = p.n as f64;
        let g = |s: f64| metric.profile().jet(s).unwrap().f.powi(2);
    let dg = |s: f64| (g(s + h) - g(s - h)) / (2.0 * h);
    // K = -(1/(2 sqrt G)) d/dt (G_t / sqrt G)
    let q = |s: f64| dg(s) / g(s).sqrt();
    let k_rad = -((q(t + h) - q(t - h)) / (2.0 * h)) / (2.0 * g(t).sqrt());
    let f = g(t).sqrt();
    let fp = dg(t) / (2.0 * f);
    let k_fib = (p.tau / (n - 1.0) - fp * fp) / (f * f);
    let mu = n * k_rad;
    let lambda = k_rad + (n - 1.0) * k_fib;
    (lambda, mu)
}
