//! Shared oracle machinery for the integration tests: adaptive
//! Gauss-Kronrod quadrature and independent series evaluations of the
//! digamma/trigamma functions. Nothing here touches the closed-form paths
//! it is used to check.

#![allow(dead_code)]

/// Kronrod-15 abscissae on [0, 1] side (mirrored), paired with weights.
const K15_NODES: [f64; 8] = [
    0.0,
    0.207784955007898,
    0.405845151377397,
    0.586087235467691,
    0.741531185599394,
    0.864864423359769,
    0.949107912342759,
    0.991455371120813,
];
const K15_WEIGHTS: [f64; 8] = [
    0.209482141084728,
    0.204432940075298,
    0.190350578064785,
    0.169004726639267,
    0.140653259715525,
    0.104790010322250,
    0.063092092629979,
    0.022935322010529,
];
/// Gauss-7 weights for nodes 0, ±n2, ±n4, ±n6 of the Kronrod set.
const G7_WEIGHTS: [f64; 4] = [
    0.417959183673469,
    0.381830050505119,
    0.279705391489277,
    0.129484966168870,
];

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let center = 0.5 * (a + b);
    let f_center = f(center);
    let mut kronrod = K15_WEIGHTS[0] * f_center;
    let mut gauss = G7_WEIGHTS[0] * f_center;
    for i in 1..8 {
        let offset = half * K15_NODES[i];
        let sum = f(center - offset) + f(center + offset);
        kronrod += K15_WEIGHTS[i] * sum;
        if i % 2 == 0 {
            gauss += G7_WEIGHTS[i / 2] * sum;
        }
    }
    kronrod *= half;
    gauss *= half;
    (kronrod, (kronrod - gauss).abs())
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (estimate, err) = gauss_kronrod(f, a, b);
    if err <= tol || depth >= 60 {
        return estimate;
    }
    let mid = 0.5 * (a + b);
    adapt(f, a, mid, 0.5 * tol, depth + 1) + adapt(f, mid, b, 0.5 * tol, depth + 1)
}

/// Adaptive Gauss-Kronrod integration of `f` over (a, b) to a relative
/// tolerance. Endpoints are never evaluated, so integrable endpoint
/// singularities are fine.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    let (rough, _) = gauss_kronrod(&f, a, b);
    let scale = rough.abs().max(1e-30);
    adapt(&f, a, b, rel_tol * scale, 0)
}

/// Nested 2-D integration over (a1,b1)×(a2,b2); the inner integral is
/// resolved one decade tighter than the outer request.
pub fn integrate2<F: Fn(f64, f64) -> f64>(
    f: F,
    a1: f64,
    b1: f64,
    a2: f64,
    b2: f64,
    rel_tol: f64,
) -> f64 {
    integrate(
        |x| integrate(|y| f(x, y), a2, b2, rel_tol * 0.1),
        a1,
        b1,
        rel_tol,
    )
}

const EULER_MASCHERONI: f64 = 0.5772156649015329;
const SERIES_CUTOFF: usize = 20_000;

/// Independent digamma evaluation:
/// ψ(x) = −γ + Σ_{k≥0} (1/(k+1) − 1/(k+x)), with the tail beyond a fixed
/// cutoff replaced by its integral plus Euler-Maclaurin corrections.
pub fn digamma_series(x: f64) -> f64 {
    assert!(x > 0.0);
    let mut sum = 0.0;
    let mut comp = 0.0; // Kahan compensation
    for k in 0..SERIES_CUTOFF {
        let kf = k as f64;
        let term = 1.0 / (kf + 1.0) - 1.0 / (kf + x);
        let t = sum + (term + comp);
        comp = (term + comp) - (t - sum);
        sum = t;
    }
    let k = SERIES_CUTOFF as f64;
    let (p, q) = (k + 1.0, k + x);
    let integral = (q / p).ln();
    let half = 0.5 * (1.0 / p - 1.0 / q);
    let bern2 = -(-1.0 / (p * p) + 1.0 / (q * q)) / 12.0;
    let bern4 = (-6.0 / p.powi(4) + 6.0 / q.powi(4)) / 720.0;
    -EULER_MASCHERONI + sum + integral + half + bern2 + bern4
}

/// Independent trigamma evaluation: ψ′(x) = Σ_{k≥0} 1/(k+x)², tail by
/// integral plus Euler-Maclaurin corrections.
pub fn trigamma_series(x: f64) -> f64 {
    assert!(x > 0.0);
    let mut sum = 0.0;
    let mut comp = 0.0;
    for k in 0..SERIES_CUTOFF {
        let term = 1.0 / ((k as f64 + x) * (k as f64 + x));
        let t = sum + (term + comp);
        comp = (term + comp) - (t - sum);
        sum = t;
    }
    let q = SERIES_CUTOFF as f64 + x;
    sum + 1.0 / q + 0.5 / (q * q) + 1.0 / (6.0 * q * q * q) - 1.0 / (30.0 * q.powi(5))
}
