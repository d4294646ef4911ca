//! Quadrature cross-checks: closed-form moments, masses, and covariances
//! against adaptive integration of the densities themselves.

mod common;

use common::{integrate, integrate2};
use rankset_core::concomitant::{joint_minmax_pdf, minmax_covariance, ConcomitantLaw};
use rankset_core::mtbged::{joint_cdf, joint_pdf, marginal_pdf, marginal_quantile, ModelParams};
use rankset_core::special::delta_r;

fn upper(alpha: f64, theta: f64) -> f64 {
    marginal_quantile(alpha, theta, 1.0 - 1e-12).unwrap()
}

#[test]
fn joint_pdf_integrates_to_one() {
    let p = ModelParams::new(2.0, 0.8, 1.0, 3.0, -0.6).unwrap();
    let mass = integrate2(
        |x, y| joint_pdf(&p, x, y).unwrap(),
        0.0,
        upper(2.0, 1.0),
        0.0,
        upper(0.8, 3.0),
        1e-10,
    );
    assert!((mass - 1.0).abs() <= 1e-8, "mass = {mass}");
}

#[test]
fn joint_pdf_is_mixed_partial_of_cdf() {
    let p = ModelParams::new(1.0, 2.0, 1.0, 0.7, 0.9).unwrap();
    let (x, y) = (1.0, 2.0);
    let h = 1e-4;
    let fd = (joint_cdf(&p, x + h, y + h).unwrap() - joint_cdf(&p, x + h, y - h).unwrap()
        - joint_cdf(&p, x - h, y + h).unwrap()
        + joint_cdf(&p, x - h, y - h).unwrap())
        / (4.0 * h * h);
    let pdf = joint_pdf(&p, x, y).unwrap();
    assert!((fd - pdf).abs() <= 1e-5, "fd {fd} vs pdf {pdf}");
}

#[test]
fn joint_cdf_value_via_quadrature() {
    let p = ModelParams::new(1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
    let ln2 = std::f64::consts::LN_2;
    let mass = integrate2(|x, y| joint_pdf(&p, x, y).unwrap(), 0.0, ln2, 0.0, ln2, 1e-10);
    assert!((mass - 0.3125).abs() <= 1e-8, "mass = {mass}");
    assert!((joint_cdf(&p, ln2, ln2).unwrap() - mass).abs() <= 1e-8);
}

#[test]
fn concomitant_moments_match_density_quadrature() {
    for &(alpha2, theta2) in &[(0.8f64, 2.0f64), (1.0, 1.0), (2.0, 0.5), (5.0, 3.0)] {
        for &d in &[-1.0, -0.5, 0.0, 1.0 / 3.0, 0.7, 1.0] {
            let law = ConcomitantLaw::new(alpha2, theta2, d).unwrap();
            let hi = upper(alpha2, theta2);
            let mass = integrate(|y| law.pdf(y).unwrap(), 0.0, hi, 1e-11);
            let mean = integrate(|y| y * law.pdf(y).unwrap(), 0.0, hi, 1e-11);
            let second = integrate(|y| y * y * law.pdf(y).unwrap(), 0.0, hi, 1e-11);
            let var = second - mean * mean;
            assert!((mass - 1.0).abs() <= 1e-9, "mass {mass} at ({alpha2},{theta2},{d})");
            assert!(
                (mean - law.mean()).abs() <= 1e-7,
                "mean {mean} vs {} at ({alpha2},{theta2},{d})",
                law.mean()
            );
            assert!(
                (var - law.variance()).abs() <= 1e-7,
                "variance {var} vs {} at ({alpha2},{theta2},{d})",
                law.variance()
            );
        }
    }
}

#[test]
fn nominal_variance_is_not_the_density_variance() {
    // the classical closed-form expression differs from the density's
    // variance away from d = 0; the canonical example: 13/12 vs 29/36
    let law = ConcomitantLaw::new(1.0, 1.0, 1.0 / 3.0).unwrap();
    let hi = upper(1.0, 1.0);
    let mean = integrate(|y| y * law.pdf(y).unwrap(), 0.0, hi, 1e-11);
    let second = integrate(|y| y * y * law.pdf(y).unwrap(), 0.0, hi, 1e-11);
    let var = second - mean * mean;
    assert!((var - 29.0 / 36.0).abs() <= 1e-8);
    assert!((law.nominal_variance() - 13.0 / 12.0).abs() <= 1e-13);
    assert!((var - law.nominal_variance()).abs() > 0.2);
}

#[test]
fn minmax_density_mass_and_marginals() {
    // total mass for n=2, α₂=2, θ₂=1, λ=−1
    let p = ModelParams::new(1.0, 2.0, 1.0, 1.0, -1.0).unwrap();
    let hi = upper(2.0, 1.0);
    let mass = integrate2(
        |z, w| joint_minmax_pdf(&p, 2, z, w).unwrap(),
        0.0,
        hi,
        0.0,
        hi,
        1e-9,
    );
    assert!((mass - 1.0).abs() <= 1e-6, "mass = {mass}");

    // integrating out the min coordinate recovers the max-concomitant
    // density at w = 0.7 for n=3, α₂=1, θ₂=1, λ=1
    let p = ModelParams::new(1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
    let hi = upper(1.0, 1.0);
    let w = 0.7;
    let marginal = integrate(|z| joint_minmax_pdf(&p, 3, z, w).unwrap(), 0.0, hi, 1e-10);
    let law = ConcomitantLaw::new(1.0, 1.0, delta_r(3, 3, 1.0).unwrap()).unwrap();
    assert!(
        (marginal - law.pdf(w).unwrap()).abs() <= 1e-6,
        "marginal {marginal} vs law {}",
        law.pdf(w).unwrap()
    );

    // λ = 0 factorizes into the product of plain marginals
    let p0 = ModelParams::new(1.0, 2.0, 1.0, 1.5, 0.0).unwrap();
    let f = joint_minmax_pdf(&p0, 4, 0.4, 1.1).unwrap();
    let prod = marginal_pdf(2.0, 1.5, 0.4).unwrap() * marginal_pdf(2.0, 1.5, 1.1).unwrap();
    assert!((f - prod).abs() <= 1e-14);
}

#[test]
fn minmax_covariance_matches_quadrature() {
    for &n in &[2usize, 3, 4] {
        for &lambda in &[0.5, 1.0] {
            for &alpha2 in &[1.0, 2.0] {
                let p = ModelParams::new(1.0, alpha2, 1.0, 1.0, lambda).unwrap();
                let hi = upper(alpha2, 1.0);
                let pdf = |z: f64, w: f64| joint_minmax_pdf(&p, n, z, w).unwrap();
                let mean_z = integrate2(|z, w| z * pdf(z, w), 0.0, hi, 0.0, hi, 1e-9);
                let mean_w = integrate2(|z, w| w * pdf(z, w), 0.0, hi, 0.0, hi, 1e-9);
                let cross = integrate2(|z, w| z * w * pdf(z, w), 0.0, hi, 0.0, hi, 1e-9);
                let cov = cross - mean_z * mean_w;
                let formula = minmax_covariance(&p, n).unwrap();
                assert!(
                    (cov - formula).abs() <= 1e-6,
                    "n={n} lambda={lambda} alpha2={alpha2}: quadrature {cov} vs formula {formula}"
                );
            }
        }
    }
}
