//! The bivariate model: a Morgenstern (FGM) copula over two generalized
//! exponential marginals, with exact random-pair generation by conditional
//! inversion.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::open01;
use crate::special::aux_constants;

/// The five model parameters.
///
/// `alpha1`/`theta1` are shape and rate of the auxiliary variate X,
/// `alpha2`/`theta2` shape and rate of the study variate Y, and `lambda`
/// in [-1, 1] is the copula dependence parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModelParams")]
pub struct ModelParams {
    alpha1: f64,
    alpha2: f64,
    theta1: f64,
    theta2: f64,
    lambda: f64,
}

impl ModelParams {
    pub fn new(alpha1: f64, alpha2: f64, theta1: f64, theta2: f64, lambda: f64) -> Result<Self> {
        for (name, value) in [
            ("alpha1", alpha1),
            ("alpha2", alpha2),
            ("theta1", theta1),
            ("theta2", theta2),
        ] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::NonPositive { name, value });
            }
        }
        if !(-1.0..=1.0).contains(&lambda) {
            return Err(Error::OutOfRange {
                name: "lambda",
                low: -1.0,
                high: 1.0,
                value: lambda,
            });
        }
        Ok(ModelParams {
            alpha1,
            alpha2,
            theta1,
            theta2,
            lambda,
        })
    }

    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }
    pub fn alpha2(&self) -> f64 {
        self.alpha2
    }
    pub fn theta1(&self) -> f64 {
        self.theta1
    }
    pub fn theta2(&self) -> f64 {
        self.theta2
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

#[derive(Deserialize)]
struct RawModelParams {
    alpha1: f64,
    alpha2: f64,
    theta1: f64,
    theta2: f64,
    lambda: f64,
}

impl TryFrom<RawModelParams> for ModelParams {
    type Error = Error;

    fn try_from(raw: RawModelParams) -> Result<Self> {
        ModelParams::new(raw.alpha1, raw.alpha2, raw.theta1, raw.theta2, raw.lambda)
    }
}

/// One draw from the model: auxiliary variate `x`, study variate `y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BivariatePair {
    pub x: f64,
    pub y: f64,
}

fn check_positive(name: &'static str, t: f64) -> Result<()> {
    if !(t > 0.0) {
        return Err(Error::NonPositive { name, value: t });
    }
    Ok(())
}

/// Marginal CDF (1 − e^{−θt})^α.
pub fn marginal_cdf(alpha: f64, theta: f64, t: f64) -> Result<f64> {
    check_positive("alpha", alpha)?;
    check_positive("theta", theta)?;
    check_positive("t", t)?;
    Ok((-(-theta * t).exp_m1()).powf(alpha))
}

/// Marginal density αθe^{−θt}(1 − e^{−θt})^{α−1}.
pub fn marginal_pdf(alpha: f64, theta: f64, t: f64) -> Result<f64> {
    check_positive("alpha", alpha)?;
    check_positive("theta", theta)?;
    check_positive("t", t)?;
    let base = -(-theta * t).exp_m1();
    Ok(alpha * theta * (-theta * t).exp() * base.powf(alpha - 1.0))
}

/// Marginal quantile −ln(1 − u^{1/α})/θ, the exact inverse of
/// [`marginal_cdf`]. Uses expm1 so both tails stay accurate.
pub fn marginal_quantile(alpha: f64, theta: f64, u: f64) -> Result<f64> {
    check_positive("alpha", alpha)?;
    check_positive("theta", theta)?;
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::OutOfRange {
            name: "u",
            low: 0.0,
            high: 1.0,
            value: u,
        });
    }
    let one_minus_pow = -(u.ln() / alpha).exp_m1(); // 1 − u^{1/α}
    Ok(-one_minus_pow.ln() / theta)
}

/// Joint CDF F(x, y) = u_x u_y [1 + λ(1 − u_x)(1 − u_y)] with
/// u_x, u_y the marginal CDFs.
pub fn joint_cdf(p: &ModelParams, x: f64, y: f64) -> Result<f64> {
    let ux = marginal_cdf(p.alpha1, p.theta1, x)?;
    let uy = marginal_cdf(p.alpha2, p.theta2, y)?;
    Ok(ux * uy * (1.0 + p.lambda * (1.0 - ux) * (1.0 - uy)))
}

/// Joint density f(x, y) = f_X(x) f_Y(y) [1 + λ(2u_x − 1)(2u_y − 1)].
pub fn joint_pdf(p: &ModelParams, x: f64, y: f64) -> Result<f64> {
    let fx = marginal_pdf(p.alpha1, p.theta1, x)?;
    let fy = marginal_pdf(p.alpha2, p.theta2, y)?;
    let ux = marginal_cdf(p.alpha1, p.theta1, x)?;
    let uy = marginal_cdf(p.alpha2, p.theta2, y)?;
    Ok(fx * fy * (1.0 + p.lambda * (2.0 * ux - 1.0) * (2.0 * uy - 1.0)))
}

/// Marginal means (μ_x, μ_y) = (B(α1)/θ1, B(α2)/θ2).
pub fn marginal_means(p: &ModelParams) -> (f64, f64) {
    let b1 = aux_constants(p.alpha1).expect("validated alpha1").b;
    let b2 = aux_constants(p.alpha2).expect("validated alpha2").b;
    (b1 / p.theta1, b2 / p.theta2)
}

/// Correlation coefficient ρ = λ g(α1) g(α2).
pub fn correlation(p: &ModelParams) -> f64 {
    let g1 = aux_constants(p.alpha1).expect("validated alpha1").g;
    let g2 = aux_constants(p.alpha2).expect("validated alpha2").g;
    p.lambda * g1 * g2
}

/// Solve v[1 + a(1 − v)] = w for v in (0, 1), the inverse of a linearly
/// tilted uniform CDF. Used both for the copula conditional and for
/// rank-tilted study-variate laws.
///
/// The quadratic root is evaluated in the conjugate form
/// v = 2w / [(1+a) + √((1+a)² − 4aw)], which avoids cancellation for
/// small w and is valid for either sign of `a`. The discriminant satisfies
/// (1+a)² − 4aw ≥ (1−|a|)² ≥ 0 whenever |a| ≤ 1.
pub(crate) fn tilted_uniform_inverse(a: f64, w: f64) -> f64 {
    if a.abs() <= 1e-12 {
        return w;
    }
    let disc = ((1.0 + a) * (1.0 + a) - 4.0 * a * w).max(0.0);
    2.0 * w / ((1.0 + a) + disc.sqrt())
}

/// Draw one (X, Y) pair by conditional inversion: u gives X through the
/// marginal quantile, then V | U = u follows the tilted-uniform CDF with
/// tilt A = λ(1 − 2u).
pub fn sample_pair<R: Rng + ?Sized>(p: &ModelParams, rng: &mut R) -> BivariatePair {
    let u = open01(rng);
    let w = open01(rng);
    let a = p.lambda * (1.0 - 2.0 * u);
    let v = tilted_uniform_inverse(a, w);
    BivariatePair {
        x: marginal_quantile(p.alpha1, p.theta1, u).expect("u in (0,1)"),
        y: marginal_quantile(p.alpha2, p.theta2, v).expect("v in (0,1)"),
    }
}
