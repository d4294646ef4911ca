//! Point estimators of the study-variate mean with their closed-form
//! variances, the BLUE coefficient machinery, and the moment estimator of
//! the dependence parameter.
//!
//! Every estimator takes the known shape `alpha2` explicitly (and `lambda`
//! where the weights need it). The rate `theta2` only scales the reported
//! variance; when it is not supplied the variance is reported in units of
//! 1/θ₂².

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scheme::{RankedSample, SchemeSpec};
use crate::special::{aux_constants, delta_r, delta_sum, stage_ratio};

/// Which estimator produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorId {
    Rss,
    Blue,
    Crss,
    Lrss,
    Erss1,
    Erss2,
    Erss3,
    Merss,
    Urss,
    Msrss,
    Ussrss,
}

impl EstimatorId {
    pub fn name(&self) -> &'static str {
        match self {
            EstimatorId::Rss => "rss",
            EstimatorId::Blue => "blue",
            EstimatorId::Crss => "crss",
            EstimatorId::Lrss => "lrss",
            EstimatorId::Erss1 => "erss1",
            EstimatorId::Erss2 => "erss2",
            EstimatorId::Erss3 => "erss3",
            EstimatorId::Merss => "merss",
            EstimatorId::Urss => "urss",
            EstimatorId::Msrss => "msrss",
            EstimatorId::Ussrss => "ussrss",
        }
    }

    /// The estimator normally paired with a scheme's samples.
    pub fn canonical_for(scheme: &SchemeSpec) -> EstimatorId {
        match scheme {
            SchemeSpec::Rss { .. } => EstimatorId::Rss,
            SchemeSpec::Crss { .. } => EstimatorId::Crss,
            SchemeSpec::Lrss { .. } => EstimatorId::Lrss,
            SchemeSpec::Erss1 { .. } => EstimatorId::Erss1,
            SchemeSpec::Erss2 { .. } => EstimatorId::Erss2,
            SchemeSpec::Erss3 { .. } => EstimatorId::Erss3,
            SchemeSpec::Merss { .. } => EstimatorId::Merss,
            SchemeSpec::Urss { .. } => EstimatorId::Urss,
            SchemeSpec::Msrss { .. } => EstimatorId::Msrss,
            SchemeSpec::Ussrss { .. } => EstimatorId::Ussrss,
        }
    }
}

impl std::fmt::Display for EstimatorId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for EstimatorId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rss" => Ok(EstimatorId::Rss),
            "blue" => Ok(EstimatorId::Blue),
            "crss" => Ok(EstimatorId::Crss),
            "lrss" => Ok(EstimatorId::Lrss),
            "erss1" => Ok(EstimatorId::Erss1),
            "erss2" => Ok(EstimatorId::Erss2),
            "erss3" => Ok(EstimatorId::Erss3),
            "merss" => Ok(EstimatorId::Merss),
            "urss" => Ok(EstimatorId::Urss),
            "msrss" => Ok(EstimatorId::Msrss),
            "ussrss" => Ok(EstimatorId::Ussrss),
            other => Err(Error::InvalidScheme(format!("unknown estimator {other:?}"))),
        }
    }
}

/// Parameters an estimate actually used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UsedParams {
    pub alpha2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

/// A point estimate with its closed-form variance.
///
/// Serializes with the fixed field names `estimator_id`, `point`,
/// `variance`, `n`, `params`. When `params.theta2` is absent the variance
/// is in units of 1/θ₂².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub estimator_id: EstimatorId,
    pub point: f64,
    pub variance: f64,
    pub n: usize,
    pub params: UsedParams,
    #[serde(skip)]
    pub scheme: Option<SchemeSpec>,
}

impl EstimateResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }
}

/// BLUE weights a_r with the mean factors H(α₂, r), variance factors
/// W(α₂, r), and the variance constant v₂ = (Σ H²/W)⁻¹.
#[derive(Debug, Clone, PartialEq)]
pub struct BlueCoefficients {
    pub a: Vec<f64>,
    pub h: Vec<f64>,
    pub w: Vec<f64>,
    pub v2: f64,
}

/// Compute the BLUE coefficient set for an RSS design of size n.
pub fn blue_coefficients(n: usize, alpha2: f64, lambda: f64) -> Result<BlueCoefficients> {
    let aux = aux_constants(alpha2)?;
    let c2 = aux_constants(2.0 * alpha2)?.c;
    let mut h = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    let mut sum = 0.0;
    for r in 1..=n {
        let d = delta_r(n, r, lambda)?;
        let hr = 1.0 - d * aux.d / aux.b;
        let wr = aux.c + d * (c2 - aux.c);
        sum += hr * hr / wr;
        h.push(hr);
        w.push(wr);
    }
    let v2 = 1.0 / sum;
    let a = h
        .iter()
        .zip(&w)
        .map(|(hr, wr)| hr / wr * v2)
        .collect();
    Ok(BlueCoefficients { a, h, w, v2 })
}

fn check_scheme<'a>(
    sample: &'a RankedSample,
    expected: &'static str,
    ok: bool,
) -> Result<&'a SchemeSpec> {
    if !ok {
        return Err(Error::SchemeMismatch {
            expected,
            found: sample.scheme.to_string(),
        });
    }
    sample.scheme.validate()?;
    let layout = sample.scheme.expected_layout();
    if sample.observations.len() != layout.len() {
        return Err(Error::MalformedSample(format!(
            "{} expects {} observations, got {}",
            sample.scheme,
            layout.len(),
            sample.observations.len()
        )));
    }
    Ok(&sample.scheme)
}

fn check_alpha(alpha2: f64) -> Result<()> {
    if !(alpha2 > 0.0) {
        return Err(Error::NonPositive {
            name: "alpha2",
            value: alpha2,
        });
    }
    Ok(())
}

fn theta_factor(theta2: Option<f64>) -> Result<f64> {
    match theta2 {
        None => Ok(1.0),
        Some(t) if t > 0.0 => Ok(t),
        Some(t) => Err(Error::NonPositive {
            name: "theta2",
            value: t,
        }),
    }
}

fn result(
    estimator_id: EstimatorId,
    point: f64,
    variance: f64,
    sample: &RankedSample,
    params: UsedParams,
) -> EstimateResult {
    EstimateResult {
        estimator_id,
        point,
        variance,
        n: sample.scheme.set_size(),
        params,
        scheme: Some(sample.scheme.clone()),
    }
}

/// Closed-form variance of an estimator on a scheme, in units of 1/θ₂²
/// (multiply by 1/θ₂² yourself, or pass `theta2` to the estimator entry
/// points). `lambda` is required whenever the weights or the variance
/// depend on it.
pub fn variance_factor(
    estimator: EstimatorId,
    scheme: &SchemeSpec,
    alpha2: f64,
    lambda: Option<f64>,
) -> Result<f64> {
    check_alpha(alpha2)?;
    scheme.validate()?;
    let aux = aux_constants(alpha2)?;
    let c2 = aux_constants(2.0 * alpha2)?.c;
    let n = scheme.set_size() as f64;
    let need_lambda = || lambda.ok_or(Error::InvalidScheme("lambda required".into()));
    match (estimator, scheme) {
        (EstimatorId::Rss, SchemeSpec::Rss { .. })
        | (EstimatorId::Lrss, SchemeSpec::Lrss { .. })
        | (EstimatorId::Erss1, SchemeSpec::Erss1 { .. })
        | (EstimatorId::Erss3, SchemeSpec::Erss3 { .. }) => Ok(aux.c / n),
        (EstimatorId::Merss, SchemeSpec::Merss { .. }) => Ok(aux.c / (2.0 * n)),
        (EstimatorId::Blue, SchemeSpec::Rss { .. }) => {
            Ok(blue_coefficients(scheme.set_size(), alpha2, need_lambda()?)?.v2)
        }
        (EstimatorId::Crss, SchemeSpec::Crss { retained, .. }) => {
            let lambda = need_lambda()?;
            let nn = scheme.set_size();
            let dsum = delta_sum(nn, retained.iter().copied(), lambda)?;
            let w = retained.len() as f64 - (aux.d / aux.b) * dsum;
            if w <= 0.0 {
                return Err(Error::DegenerateWeight(w));
            }
            let mut v3 = 0.0;
            for &m in retained {
                v3 += aux.c + delta_r(nn, m, lambda)? * (c2 - aux.c);
            }
            Ok(v3 / (w * w))
        }
        (EstimatorId::Erss2, SchemeSpec::Erss2 { .. }) => {
            let lambda = need_lambda()?;
            let cov = 4.0 * lambda * lambda * aux.d * aux.d / ((n + 1.0) * (n + 1.0) * (n + 2.0));
            Ok(((2.0 * n - 1.0) * aux.c + cov) / (2.0 * n * n))
        }
        (EstimatorId::Msrss, SchemeSpec::Msrss { l, .. }) => {
            let lambda = need_lambda()?;
            if lambda <= 0.0 {
                return Err(Error::LambdaNotPositive(lambda));
            }
            let ratio = stage_ratio(scheme.set_size(), *l);
            let xi = 1.0 + lambda * ratio * aux.d / aux.b;
            let gamma = aux.c + lambda * ratio * (aux.c - c2);
            Ok(gamma / (n * xi * xi))
        }
        (EstimatorId::Urss, SchemeSpec::Urss { .. }) => {
            let lambda = need_lambda()?;
            if lambda <= 0.0 {
                return Err(Error::LambdaNotPositive(lambda));
            }
            let ratio = stage_ratio(scheme.set_size(), 1);
            let xi = 1.0 + lambda * ratio * aux.d / aux.b;
            let gamma = aux.c + lambda * ratio * (aux.c - c2);
            Ok(gamma / (n * xi * xi))
        }
        (EstimatorId::Ussrss, SchemeSpec::Ussrss { .. }) => {
            let lambda = need_lambda()?;
            if lambda <= 0.0 {
                return Err(Error::LambdaNotPositive(lambda));
            }
            let z = 1.0 + lambda * aux.d / aux.b;
            let i = aux.c + lambda * (aux.c - c2);
            Ok(i / (n * z * z))
        }
        (est, scheme) => Err(Error::SchemeMismatch {
            expected: est.name(),
            found: scheme.to_string(),
        }),
    }
}

/// Exact sampling variance of an estimator on a scheme, in units of 1/θ₂².
///
/// Unlike [`variance_factor`] (the classical closed forms the efficiency
/// tables are built on), this uses the density-exact per-observation
/// variances, so it matches what Monte Carlo actually measures. The two
/// agree at λ = 0 and drift apart as |λ| grows.
pub fn exact_variance_factor(
    estimator: EstimatorId,
    scheme: &SchemeSpec,
    alpha2: f64,
    lambda: Option<f64>,
) -> Result<f64> {
    check_alpha(alpha2)?;
    scheme.validate()?;
    let aux = aux_constants(alpha2)?;
    let c2 = aux_constants(2.0 * alpha2)?.c;
    // density-exact variance factor of the d-tilted law
    let tv = |d: f64| aux.c + d * (aux.c - c2 - aux.d * aux.d) - d * d * aux.d * aux.d;
    let n = scheme.set_size();
    let nf = n as f64;
    let need_lambda = || lambda.ok_or(Error::InvalidScheme("lambda required".into()));
    match (estimator, scheme) {
        (EstimatorId::Rss, SchemeSpec::Rss { .. }) => {
            let lambda = need_lambda()?;
            let mut sum = 0.0;
            for r in 1..=n {
                sum += tv(delta_r(n, r, lambda)?);
            }
            Ok(sum / (nf * nf))
        }
        (EstimatorId::Blue, SchemeSpec::Rss { .. }) => {
            let lambda = need_lambda()?;
            let coeffs = blue_coefficients(n, alpha2, lambda)?;
            let mut sum = 0.0;
            for (r, a) in coeffs.a.iter().enumerate() {
                sum += a * a * tv(delta_r(n, r + 1, lambda)?);
            }
            Ok(sum)
        }
        (EstimatorId::Crss, SchemeSpec::Crss { retained, .. }) => {
            let lambda = need_lambda()?;
            let dsum = delta_sum(n, retained.iter().copied(), lambda)?;
            let w = retained.len() as f64 - (aux.d / aux.b) * dsum;
            if w <= 0.0 {
                return Err(Error::DegenerateWeight(w));
            }
            let mut sum = 0.0;
            for &m in retained {
                sum += tv(delta_r(n, m, lambda)?);
            }
            Ok(sum / (w * w))
        }
        (EstimatorId::Lrss, SchemeSpec::Lrss { k, .. }) => {
            let lambda = need_lambda()?;
            let mut sum = 0.0;
            for set in 1..=n {
                let rank = if set <= *k {
                    k + 1
                } else if set <= n - k {
                    set
                } else {
                    n - k
                };
                sum += tv(delta_r(n, rank, lambda)?);
            }
            Ok(sum / (nf * nf))
        }
        (EstimatorId::Erss1, SchemeSpec::Erss1 { .. }) => {
            let lambda = need_lambda()?;
            let half = nf / 2.0;
            Ok(half * (tv(delta_r(n, 1, lambda)?) + tv(delta_r(n, n, lambda)?)) / (nf * nf))
        }
        (EstimatorId::Erss2, SchemeSpec::Erss2 { .. }) => {
            let lambda = need_lambda()?;
            let cov = 4.0 * lambda * lambda * aux.d * aux.d
                / ((nf + 1.0) * (nf + 1.0) * (nf + 2.0));
            let tmin = tv(delta_r(n, 1, lambda)?);
            let tmax = tv(delta_r(n, n, lambda)?);
            let singles = (nf - 1.0) / 2.0 * (tmin + tmax);
            let pair = (tmin + tmax + 2.0 * cov) / 4.0;
            Ok((singles + pair) / (nf * nf))
        }
        (EstimatorId::Erss3, SchemeSpec::Erss3 { .. }) => {
            let lambda = need_lambda()?;
            let singles = (nf - 1.0) / 2.0
                * (tv(delta_r(n, 1, lambda)?) + tv(delta_r(n, n, lambda)?));
            Ok((singles + tv(0.0)) / (nf * nf))
        }
        (EstimatorId::Merss, SchemeSpec::Merss { .. }) => {
            let lambda = need_lambda()?;
            let sum = nf * (tv(delta_r(n, 1, lambda)?) + tv(delta_r(n, n, lambda)?));
            Ok(sum / (4.0 * nf * nf))
        }
        (EstimatorId::Msrss, SchemeSpec::Msrss { l, .. }) => {
            let lambda = need_lambda()?;
            if lambda <= 0.0 {
                return Err(Error::LambdaNotPositive(lambda));
            }
            let ratio = stage_ratio(n, *l);
            let xi = 1.0 + lambda * ratio * aux.d / aux.b;
            Ok(tv(-lambda * ratio) / (nf * xi * xi))
        }
        (EstimatorId::Urss, SchemeSpec::Urss { .. }) => {
            let lambda = need_lambda()?;
            if lambda <= 0.0 {
                return Err(Error::LambdaNotPositive(lambda));
            }
            let ratio = stage_ratio(n, 1);
            let xi = 1.0 + lambda * ratio * aux.d / aux.b;
            Ok(tv(-lambda * ratio) / (nf * xi * xi))
        }
        (EstimatorId::Ussrss, SchemeSpec::Ussrss { .. }) => {
            let lambda = need_lambda()?;
            if lambda <= 0.0 {
                return Err(Error::LambdaNotPositive(lambda));
            }
            let z = 1.0 + lambda * aux.d / aux.b;
            Ok(tv(-lambda) / (nf * z * z))
        }
        (est, scheme) => Err(Error::SchemeMismatch {
            expected: est.name(),
            found: scheme.to_string(),
        }),
    }
}

/// Unbiased RSS mean: the plain average of the diagonal concomitants.
pub fn est_rss(sample: &RankedSample, alpha2: f64, theta2: Option<f64>) -> Result<EstimateResult> {
    check_scheme(sample, "rss", matches!(sample.scheme, SchemeSpec::Rss { .. }))?;
    check_alpha(alpha2)?;
    let t = theta_factor(theta2)?;
    let n = sample.scheme.set_size() as f64;
    let point = sample.ys().sum::<f64>() / n;
    let v = variance_factor(EstimatorId::Rss, &sample.scheme, alpha2, None)?;
    Ok(result(
        EstimatorId::Rss,
        point,
        v / (t * t),
        sample,
        UsedParams {
            alpha2,
            theta2,
            lambda: None,
        },
    ))
}

/// Best linear unbiased combination of the RSS concomitants, for known λ.
pub fn est_blue(
    sample: &RankedSample,
    alpha2: f64,
    theta2: Option<f64>,
    lambda: f64,
) -> Result<(EstimateResult, BlueCoefficients)> {
    check_scheme(sample, "blue", matches!(sample.scheme, SchemeSpec::Rss { .. }))?;
    check_alpha(alpha2)?;
    let t = theta_factor(theta2)?;
    let coeffs = blue_coefficients(sample.scheme.set_size(), alpha2, lambda)?;
    let point = sample
        .ys()
        .zip(&coeffs.a)
        .map(|(y, a)| a * y)
        .sum::<f64>();
    let res = result(
        EstimatorId::Blue,
        point,
        coeffs.v2 / (t * t),
        sample,
        UsedParams {
            alpha2,
            theta2,
            lambda: Some(lambda),
        },
    );
    Ok((res, coeffs))
}

/// Unbiased mean from a censored RSS: Σ Y_{[m]m} / w with the bias-correcting
/// normalizer w = (n−k) + (1 − B(2α₂)/B(α₂)) Σ δ_m.
pub fn est_crss(
    sample: &RankedSample,
    alpha2: f64,
    theta2: Option<f64>,
    lambda: f64,
) -> Result<EstimateResult> {
    check_scheme(sample, "crss", matches!(sample.scheme, SchemeSpec::Crss { .. }))?;
    check_alpha(alpha2)?;
    let t = theta_factor(theta2)?;
    let retained = match &sample.scheme {
        SchemeSpec::Crss { retained, .. } => retained.clone(),
        _ => unreachable!(),
    };
    let n = sample.scheme.set_size();
    let aux = aux_constants(alpha2)?;
    let dsum = delta_sum(n, retained.iter().copied(), lambda)?;
    let w = retained.len() as f64 - (aux.d / aux.b) * dsum;
    if w <= 0.0 {
        return Err(Error::DegenerateWeight(w));
    }
    let point = sample.ys().sum::<f64>() / w;
    let v = variance_factor(EstimatorId::Crss, &sample.scheme, alpha2, Some(lambda))?;
    Ok(result(
        EstimatorId::Crss,
        point,
        v / (t * t),
        sample,
        UsedParams {
            alpha2,
            theta2,
            lambda: Some(lambda),
        },
    ))
}

/// Unbiased mean from the L ranked set sample; its variance equals the RSS
/// variance for every trimming coefficient.
pub fn est_lrss(sample: &RankedSample, alpha2: f64, theta2: Option<f64>) -> Result<EstimateResult> {
    check_scheme(sample, "lrss", matches!(sample.scheme, SchemeSpec::Lrss { .. }))?;
    check_alpha(alpha2)?;
    let t = theta_factor(theta2)?;
    let n = sample.scheme.set_size() as f64;
    let point = sample.ys().sum::<f64>() / n;
    let v = variance_factor(EstimatorId::Lrss, &sample.scheme, alpha2, None)?;
    Ok(result(
        EstimatorId::Lrss,
        point,
        v / (t * t),
        sample,
        UsedParams {
            alpha2,
            theta2,
            lambda: None,
        },
    ))
}

/// Unbiased mean from an extreme ranked set sample (any of the three
/// variants). `lambda` is only needed for the ERSS₂ variance, where the
/// final min-max pair is dependent.
pub fn est_erss(
    sample: &RankedSample,
    alpha2: f64,
    theta2: Option<f64>,
    lambda: Option<f64>,
) -> Result<EstimateResult> {
    check_alpha(alpha2)?;
    let t = theta_factor(theta2)?;
    match sample.scheme {
        SchemeSpec::Erss1 { n } => {
            check_scheme(sample, "erss1", true)?;
            let point = sample.ys().sum::<f64>() / n as f64;
            let v = variance_factor(EstimatorId::Erss1, &sample.scheme, alpha2, None)?;
            Ok(result(
                EstimatorId::Erss1,
                point,
                v / (t * t),
                sample,
                UsedParams {
                    alpha2,
                    theta2,
                    lambda: None,
                },
            ))
        }
        SchemeSpec::Erss2 { n } => {
            check_scheme(sample, "erss2", true)?;
            let lambda = lambda.ok_or(Error::InvalidScheme(
                "lambda is required for the erss2 variance".into(),
            ))?;
            let mut singles = 0.0;
            let mut pair = 0.0;
            for obs in &sample.observations {
                if obs.set_index == n {
                    pair += obs.y;
                } else {
                    singles += obs.y;
                }
            }
            let point = (singles + pair / 2.0) / n as f64;
            let v = variance_factor(EstimatorId::Erss2, &sample.scheme, alpha2, Some(lambda))?;
            Ok(result(
                EstimatorId::Erss2,
                point,
                v / (t * t),
                sample,
                UsedParams {
                    alpha2,
                    theta2,
                    lambda: Some(lambda),
                },
            ))
        }
        SchemeSpec::Erss3 { n } => {
            check_scheme(sample, "erss3", true)?;
            let point = sample.ys().sum::<f64>() / n as f64;
            let v = variance_factor(EstimatorId::Erss3, &sample.scheme, alpha2, None)?;
            Ok(result(
                EstimatorId::Erss3,
                point,
                v / (t * t),
                sample,
                UsedParams {
                    alpha2,
                    theta2,
                    lambda: None,
                },
            ))
        }
        _ => Err(Error::SchemeMismatch {
            expected: "erss1/erss2/erss3",
            found: sample.scheme.to_string(),
        }),
    }
}

/// Unbiased mean from a moving extreme ranked set sample: the average of all
/// 2n extremes, with half the RSS variance.
pub fn est_merss(sample: &RankedSample, alpha2: f64, theta2: Option<f64>) -> Result<EstimateResult> {
    check_scheme(sample, "merss", matches!(sample.scheme, SchemeSpec::Merss { .. }))?;
    check_alpha(alpha2)?;
    let t = theta_factor(theta2)?;
    let n = sample.scheme.set_size() as f64;
    let point = sample.ys().sum::<f64>() / (2.0 * n);
    let v = variance_factor(EstimatorId::Merss, &sample.scheme, alpha2, None)?;
    Ok(result(
        EstimatorId::Merss,
        point,
        v / (t * t),
        sample,
        UsedParams {
            alpha2,
            theta2,
            lambda: None,
        },
    ))
}

/// BLUE from a multistage (or single-stage) unbalanced maximum sample:
/// Σ Y / (n ξ). Requires λ > 0.
pub fn est_msrss(
    sample: &RankedSample,
    alpha2: f64,
    theta2: Option<f64>,
    lambda: f64,
) -> Result<EstimateResult> {
    let (estimator, l) = match sample.scheme {
        SchemeSpec::Msrss { l, .. } => (EstimatorId::Msrss, l),
        SchemeSpec::Urss { .. } => (EstimatorId::Urss, 1),
        _ => {
            return Err(Error::SchemeMismatch {
                expected: "msrss",
                found: sample.scheme.to_string(),
            })
        }
    };
    check_scheme(sample, "msrss", true)?;
    check_alpha(alpha2)?;
    if lambda <= 0.0 {
        return Err(Error::LambdaNotPositive(lambda));
    }
    let t = theta_factor(theta2)?;
    let n = sample.scheme.set_size();
    let aux = aux_constants(alpha2)?;
    let xi = 1.0 + lambda * stage_ratio(n, l) * aux.d / aux.b;
    let point = sample.ys().sum::<f64>() / (n as f64 * xi);
    let v = variance_factor(estimator, &sample.scheme, alpha2, Some(lambda))?;
    Ok(result(
        estimator,
        point,
        v / (t * t),
        sample,
        UsedParams {
            alpha2,
            theta2,
            lambda: Some(lambda),
        },
    ))
}

/// BLUE from a steady-state unbalanced maximum sample: Σ Y / (n Z).
/// Requires λ > 0.
pub fn est_ussrss(
    sample: &RankedSample,
    alpha2: f64,
    theta2: Option<f64>,
    lambda: f64,
) -> Result<EstimateResult> {
    check_scheme(
        sample,
        "ussrss",
        matches!(sample.scheme, SchemeSpec::Ussrss { .. }),
    )?;
    check_alpha(alpha2)?;
    if lambda <= 0.0 {
        return Err(Error::LambdaNotPositive(lambda));
    }
    let t = theta_factor(theta2)?;
    let n = sample.scheme.set_size();
    let aux = aux_constants(alpha2)?;
    let z = 1.0 + lambda * aux.d / aux.b;
    let point = sample.ys().sum::<f64>() / (n as f64 * z);
    let v = variance_factor(EstimatorId::Ussrss, &sample.scheme, alpha2, Some(lambda))?;
    Ok(result(
        EstimatorId::Ussrss,
        point,
        v / (t * t),
        sample,
        UsedParams {
            alpha2,
            theta2,
            lambda: Some(lambda),
        },
    ))
}

/// Moment estimator of λ from the RSS pairs: the sample correlation scaled
/// by 1/(g(α₁)g(α₂)) and clamped to [−1, 1].
pub fn est_lambda(sample: &RankedSample, alpha1: f64, alpha2: f64) -> Result<f64> {
    check_scheme(sample, "rss", matches!(sample.scheme, SchemeSpec::Rss { .. }))?;
    let n = sample.scheme.set_size();
    if n < 3 {
        return Err(Error::TooFewObservations { need: 3, got: n });
    }
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for obs in &sample.observations {
        let x = obs.x.ok_or_else(|| {
            Error::MalformedSample("lambda estimation needs the auxiliary x values".into())
        })?;
        xs.push(x);
        ys.push(obs.y);
    }
    let g1 = aux_constants(alpha1)?.g;
    let g2 = aux_constants(alpha2)?.g;
    let q = crate::stats::pearson(&xs, &ys);
    Ok((q / (g1 * g2)).clamp(-1.0, 1.0))
}

/// Run the estimator canonically paired with the sample's scheme.
pub fn estimate(
    sample: &RankedSample,
    alpha2: f64,
    theta2: Option<f64>,
    lambda: Option<f64>,
) -> Result<EstimateResult> {
    estimate_with(
        EstimatorId::canonical_for(&sample.scheme),
        sample,
        alpha2,
        theta2,
        lambda,
    )
}

/// Run a specific estimator on a sample.
pub fn estimate_with(
    estimator: EstimatorId,
    sample: &RankedSample,
    alpha2: f64,
    theta2: Option<f64>,
    lambda: Option<f64>,
) -> Result<EstimateResult> {
    let need_lambda =
        || lambda.ok_or(Error::InvalidScheme(format!("{estimator} requires lambda")));
    match estimator {
        EstimatorId::Rss => est_rss(sample, alpha2, theta2),
        EstimatorId::Blue => Ok(est_blue(sample, alpha2, theta2, need_lambda()?)?.0),
        EstimatorId::Crss => est_crss(sample, alpha2, theta2, need_lambda()?),
        EstimatorId::Lrss => est_lrss(sample, alpha2, theta2),
        EstimatorId::Erss1 | EstimatorId::Erss2 | EstimatorId::Erss3 => {
            est_erss(sample, alpha2, theta2, lambda)
        }
        EstimatorId::Merss => est_merss(sample, alpha2, theta2),
        EstimatorId::Urss | EstimatorId::Msrss => est_msrss(sample, alpha2, theta2, need_lambda()?),
        EstimatorId::Ussrss => est_ussrss(sample, alpha2, theta2, need_lambda()?),
    }
}
