//! Distributions of study-variate concomitants under rank selection on the
//! auxiliary variate: the single-rank family, the joint min-max law, the
//! multistage maximum family, and its steady-state limit.

use rand::Rng;

use crate::error::{Error, Result};
use crate::mtbged::{marginal_cdf, marginal_pdf, marginal_quantile, tilted_uniform_inverse, ModelParams};
use crate::rng::open01;
use crate::special::{aux_constants, delta_1n, delta_r, stage_ratio, AuxConstants};

/// The one-parameter family of concomitant laws.
///
/// On the uniform scale v = (1 − e^{−θ₂y})^{α₂}, the density is tilted by
/// the factor 1 + d(1 − 2v) with |d| ≤ 1. The shape coefficient `d` is
/// δ_r for the rank-r concomitant, −λ(nˡ−1)/(nˡ+1) for the stage-l maximum,
/// and −λ in the steady-state limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcomitantLaw {
    alpha2: f64,
    theta2: f64,
    d: f64,
    aux: AuxConstants,
    c2: f64,
}

impl ConcomitantLaw {
    pub fn new(alpha2: f64, theta2: f64, d: f64) -> Result<Self> {
        if !(theta2 > 0.0) {
            return Err(Error::NonPositive {
                name: "theta2",
                value: theta2,
            });
        }
        if !(-1.0..=1.0).contains(&d) {
            return Err(Error::OutOfRange {
                name: "d",
                low: -1.0,
                high: 1.0,
                value: d,
            });
        }
        let aux = aux_constants(alpha2)?;
        let c2 = aux_constants(2.0 * alpha2)?.c;
        Ok(ConcomitantLaw {
            alpha2,
            theta2,
            d,
            aux,
            c2,
        })
    }

    /// Law of the concomitant of the rank-r order statistic in a set of n.
    pub fn for_rank(alpha2: f64, theta2: f64, n: usize, r: usize, lambda: f64) -> Result<Self> {
        Self::new(alpha2, theta2, delta_r(n, r, lambda)?)
    }

    /// Law of the concomitant of the stage-l maximum of nˡ units.
    pub fn for_stage_max(alpha2: f64, theta2: f64, n: usize, l: u32, lambda: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::SetSizeTooSmall(n));
        }
        if l < 1 {
            return Err(Error::InvalidScheme("stage count must be at least 1".into()));
        }
        Self::new(alpha2, theta2, -lambda * stage_ratio(n, l))
    }

    /// Steady-state (l → ∞) maximum-selection law.
    pub fn steady_state_max(alpha2: f64, theta2: f64, lambda: f64) -> Result<Self> {
        Self::new(alpha2, theta2, -lambda)
    }

    pub fn alpha2(&self) -> f64 {
        self.alpha2
    }
    pub fn theta2(&self) -> f64 {
        self.theta2
    }
    pub fn shape_coefficient(&self) -> f64 {
        self.d
    }

    pub fn pdf(&self, y: f64) -> Result<f64> {
        let v = marginal_cdf(self.alpha2, self.theta2, y)?;
        let f = marginal_pdf(self.alpha2, self.theta2, y)?;
        Ok(f * (1.0 + self.d * (1.0 - 2.0 * v)))
    }

    /// CDF v + d·v(1 − v) on the uniform scale.
    pub fn cdf(&self, y: f64) -> Result<f64> {
        let v = marginal_cdf(self.alpha2, self.theta2, y)?;
        Ok(v * (1.0 + self.d * (1.0 - v)))
    }

    /// Inverse CDF: solves v + d·v(1 − v) = u for v, then maps v through the
    /// marginal quantile.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::OutOfRange {
                name: "u",
                low: 0.0,
                high: 1.0,
                value: u,
            });
        }
        let v = tilted_uniform_inverse(self.d, u);
        marginal_quantile(self.alpha2, self.theta2, v)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(open01(rng)).expect("u in (0,1)")
    }

    /// Mean [B(α₂) − d·D(α₂)]/θ₂.
    pub fn mean(&self) -> f64 {
        (self.aux.b - self.d * self.aux.d) / self.theta2
    }

    /// Exact variance of the law,
    /// [C(α₂) + d(C(α₂) − C(2α₂) − D²(α₂)) − d²D²(α₂)]/θ₂².
    ///
    /// Follows from the mixture decomposition of the tilt factor,
    /// 1 + d(1 − 2v) = (1 − d) + d·2(1 − v) for d ≥ 0 (and its mirror for
    /// d < 0): the law is a mixture of the plain marginal and the min (or
    /// max) of two marginals, whose moments are all ψ-function expressions.
    /// Agrees with direct quadrature of the density to full precision.
    pub fn variance(&self) -> f64 {
        let (c, dd) = (self.aux.c, self.aux.d);
        let d = self.d;
        (c + d * (c - self.c2 - dd * dd) - d * d * dd * dd) / (self.theta2 * self.theta2)
    }

    /// The classical closed-form variance expression
    /// [C(α₂) + d(C(2α₂) − C(α₂))]/θ₂².
    ///
    /// This is the form the published estimator variances (and through them
    /// the efficiency tables) are built on. It is NOT the variance of the
    /// density — see [`ConcomitantLaw::variance`] for the exact value; the
    /// two coincide only at d = 0. Both are kept because the reference
    /// tables are defined in terms of this form.
    pub fn nominal_variance(&self) -> f64 {
        (self.aux.c + self.d * (self.c2 - self.aux.c)) / (self.theta2 * self.theta2)
    }

    /// (mean, exact variance).
    pub fn moments(&self) -> (f64, f64) {
        (self.mean(), self.variance())
    }
}

/// Joint density of the min- and max-concomitants (Y_{[1]n}, Y_{[n]n}) from
/// one ranked set of size n. The two are dependent; `z` is the min-side
/// value, `w` the max-side value.
pub fn joint_minmax_pdf(p: &ModelParams, n: usize, z: f64, w: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::SetSizeTooSmall(n));
    }
    let (a2, t2, lambda) = (p.alpha2(), p.theta2(), p.lambda());
    let fz = marginal_pdf(a2, t2, z)?;
    let fw = marginal_pdf(a2, t2, w)?;
    let vz = marginal_cdf(a2, t2, z)?;
    let vw = marginal_cdf(a2, t2, w)?;
    let coef = 2.0 * lambda * (n as f64 - 1.0) / (n as f64 + 1.0);
    let d1n = delta_1n(n, lambda)?;
    Ok(fz * fw * (1.0 + coef * (vw - vz) + d1n * (1.0 - 2.0 * vw) * (1.0 - 2.0 * vz)))
}

/// Cov(Y_{[1]n}, Y_{[n]n}) = 4λ²D²(α₂) / ((n+1)²(n+2)θ₂²).
pub fn minmax_covariance(p: &ModelParams, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::SetSizeTooSmall(n));
    }
    let aux = aux_constants(p.alpha2())?;
    let nf = n as f64;
    let lambda = p.lambda();
    Ok(4.0 * lambda * lambda * aux.d * aux.d
        / ((nf + 1.0) * (nf + 1.0) * (nf + 2.0) * p.theta2() * p.theta2()))
}

/// Mean and variance factors (ξ, γ) of the stage-l maximum concomitant:
/// its mean is μ_y·ξ and its variance γ/θ₂².
pub fn msrss_moments(p: &ModelParams, n: usize, l: u32) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::SetSizeTooSmall(n));
    }
    if l < 1 {
        return Err(Error::InvalidScheme("stage count must be at least 1".into()));
    }
    let aux = aux_constants(p.alpha2())?;
    let c2 = aux_constants(2.0 * p.alpha2())?.c;
    let ratio = stage_ratio(n, l);
    let xi = 1.0 + p.lambda() * ratio * aux.d / aux.b;
    let gamma = aux.c + p.lambda() * ratio * (aux.c - c2);
    Ok((xi, gamma))
}

/// Steady-state factors (Z, I): the l → ∞ limit of [`msrss_moments`].
pub fn steady_state_moments(p: &ModelParams) -> Result<(f64, f64)> {
    let aux = aux_constants(p.alpha2())?;
    let c2 = aux_constants(2.0 * p.alpha2())?.c;
    let z = 1.0 + p.lambda() * aux.d / aux.b;
    let i = aux.c + p.lambda() * (aux.c - c2);
    Ok((z, i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params(a2: f64, t2: f64, lambda: f64) -> ModelParams {
        ModelParams::new(1.0, a2, 1.0, t2, lambda).unwrap()
    }

    #[test]
    fn law_validation() {
        assert!(ConcomitantLaw::new(1.0, 1.0, 1.1).is_err());
        assert!(ConcomitantLaw::new(0.0, 1.0, 0.5).is_err());
        assert!(ConcomitantLaw::new(1.0, 0.0, 0.5).is_err());
        assert!(ConcomitantLaw::new(1.0, 1.0, -1.0).is_ok());
    }

    #[test]
    fn moments_reduce_to_marginal_at_d_zero() {
        let law = ConcomitantLaw::new(0.8, 2.0, 0.0).unwrap();
        let aux = aux_constants(0.8).unwrap();
        let (mean, var) = law.moments();
        assert_abs_diff_eq!(mean, aux.b / 2.0, epsilon = 1e-13);
        assert_abs_diff_eq!(var, aux.c / 4.0, epsilon = 1e-13);
    }

    #[test]
    fn moments_rank_one_of_two() {
        // n=2, r=1, λ=1 gives d = 1/3
        let law = ConcomitantLaw::for_rank(1.0, 1.0, 2, 1, 1.0).unwrap();
        assert_abs_diff_eq!(law.shape_coefficient(), 1.0 / 3.0, epsilon = 0.0);
        let (mean, var) = law.moments();
        assert_abs_diff_eq!(mean, 5.0 / 6.0, epsilon = 1e-13);
        // exact variance from quadrature of the density: 29/36, while the
        // classical closed-form expression gives 13/12
        assert_abs_diff_eq!(var, 29.0 / 36.0, epsilon = 1e-13);
        assert_abs_diff_eq!(law.nominal_variance(), 13.0 / 12.0, epsilon = 1e-13);
    }

    #[test]
    fn moments_negative_tilt() {
        let law = ConcomitantLaw::new(2.0, 2.0, -0.5).unwrap();
        let d2 = 25.0 / 12.0 - 1.5; // B(4) − B(2)
        let (mean, var) = law.moments();
        assert_abs_diff_eq!(mean, (1.5 + 0.5 * d2) / 2.0, epsilon = 1e-13);
        assert_abs_diff_eq!(mean, 0.8958333333333334, epsilon = 1e-13);
        // frozen 30-digit quadrature value
        assert_abs_diff_eq!(var, 0.35546875, epsilon = 1e-13);
    }

    #[test]
    fn variance_against_quadrature_oracle_values() {
        // frozen from 30-digit quadrature of Q(v)·(1 + d(1−2v)) on (0,1)
        let law = ConcomitantLaw::new(0.8, 3.0, 0.7).unwrap();
        let (mean, var) = law.moments();
        assert_abs_diff_eq!(mean, 0.17865596151988803, epsilon = 1e-12);
        assert_abs_diff_eq!(var, 0.05122945382929491, epsilon = 1e-12);

        // d = 1, α₂ = 1: the law is the min of two unit exponentials,
        // i.e. Exp(2) with mean 1/2 and variance 1/4
        let law = ConcomitantLaw::new(1.0, 1.0, 1.0).unwrap();
        let (mean, var) = law.moments();
        assert_abs_diff_eq!(mean, 0.5, epsilon = 1e-13);
        assert_abs_diff_eq!(var, 0.25, epsilon = 1e-13);

        // d = −1, α₂ = 5: the max of two, i.e. the 2α law, so the variance
        // is exactly C(10)
        let law = ConcomitantLaw::new(5.0, 1.0, -1.0).unwrap();
        let (mean, var) = law.moments();
        assert_abs_diff_eq!(mean, 2.928968253968254, epsilon = 1e-12);
        assert_abs_diff_eq!(var, 1.5497677311665407, epsilon = 1e-12);
    }

    #[test]
    fn quantile_matches_marginal_at_d_zero() {
        let law = ConcomitantLaw::new(2.0, 1.5, 0.0).unwrap();
        for &u in &[0.01, 0.37, 0.99] {
            assert_abs_diff_eq!(
                law.quantile(u).unwrap(),
                marginal_quantile(2.0, 1.5, u).unwrap(),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn quantile_roundtrip() {
        for &d in &[-1.0, -0.4, 0.0, 0.3, 1.0] {
            let law = ConcomitantLaw::new(0.8, 2.0, d).unwrap();
            for i in 1..40 {
                let u = i as f64 / 40.0;
                let y = law.quantile(u).unwrap();
                assert_abs_diff_eq!(law.cdf(y).unwrap(), u, epsilon = 1e-10);
            }
        }
        // d=1, u=0.5 hits the same quadratic as the copula conditional
        let law = ConcomitantLaw::new(1.0, 1.0, 1.0).unwrap();
        let y = law.quantile(0.5).unwrap();
        let v = marginal_cdf(1.0, 1.0, y).unwrap();
        assert_abs_diff_eq!(v, 0.2928932188134525, epsilon = 1e-12);
    }

    #[test]
    fn mixture_of_rank_laws_is_marginal() {
        // Σ_r δ_r = 0, so the equal-weight mixture of rank laws is the marginal
        let (n, a2, t2, lambda) = (5, 0.8, 2.0, 0.7);
        for i in 1..30 {
            let y = i as f64 * 0.1;
            let mut mix = 0.0;
            for r in 1..=n {
                mix += ConcomitantLaw::for_rank(a2, t2, n, r, lambda)
                    .unwrap()
                    .pdf(y)
                    .unwrap();
            }
            mix /= n as f64;
            assert_abs_diff_eq!(mix, marginal_pdf(a2, t2, y).unwrap(), epsilon = 1e-13);
        }
    }

    #[test]
    fn minmax_pdf_independent_at_lambda_zero() {
        let p = params(2.0, 1.0, 0.0);
        let f = joint_minmax_pdf(&p, 3, 0.7, 1.2).unwrap();
        let prod = marginal_pdf(2.0, 1.0, 0.7).unwrap() * marginal_pdf(2.0, 1.0, 1.2).unwrap();
        assert_abs_diff_eq!(f, prod, epsilon = 1e-14);
    }

    #[test]
    fn minmax_covariance_values() {
        assert_eq!(minmax_covariance(&params(1.0, 1.0, 0.0), 4).unwrap(), 0.0);
        assert_abs_diff_eq!(
            minmax_covariance(&params(1.0, 1.0, 1.0), 2).unwrap(),
            1.0 / 36.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            minmax_covariance(&params(1.0, 2.0, 0.5), 5).unwrap(),
            0.25 / 1008.0,
            epsilon = 1e-14
        );
        assert!(minmax_covariance(&params(1.0, 1.0, 0.5), 1).is_err());
    }

    #[test]
    fn msrss_moment_factors() {
        // λ=0 collapses to the marginal factors
        let (xi, gamma) = msrss_moments(&params(0.8, 1.0, 0.0), 3, 2).unwrap();
        assert_abs_diff_eq!(xi, 1.0, epsilon = 0.0);
        assert_abs_diff_eq!(gamma, aux_constants(0.8).unwrap().c, epsilon = 1e-13);

        let (xi, gamma) = msrss_moments(&params(1.0, 1.0, 1.0), 2, 1).unwrap();
        assert_abs_diff_eq!(xi, 7.0 / 6.0, epsilon = 1e-13);
        assert_abs_diff_eq!(gamma, 11.0 / 12.0, epsilon = 1e-13);
    }

    #[test]
    fn msrss_limits_to_steady_state() {
        let p = params(2.0, 1.0, 0.6);
        let (xi, gamma) = msrss_moments(&p, 3, 60).unwrap();
        let (z, i) = steady_state_moments(&p).unwrap();
        assert_abs_diff_eq!(xi, z, epsilon = 1e-12);
        assert_abs_diff_eq!(gamma, i, epsilon = 1e-12);
    }

    #[test]
    fn steady_state_values() {
        let (z, i) = steady_state_moments(&params(1.0, 1.0, 0.0)).unwrap();
        assert_eq!(z, 1.0);
        assert_abs_diff_eq!(i, 1.0, epsilon = 1e-13);

        let (z, i) = steady_state_moments(&params(1.0, 1.0, 1.0)).unwrap();
        assert_abs_diff_eq!(z, 1.5, epsilon = 1e-13);
        assert_abs_diff_eq!(i, 0.75, epsilon = 1e-13);

        // frozen 40-digit values for α₂ = 0.8, λ = 1
        let (z, i) = steady_state_moments(&params(0.8, 1.0, 1.0)).unwrap();
        assert_abs_diff_eq!(z, 1.5405383700216262, epsilon = 1e-12);
        assert_abs_diff_eq!(i, 0.6387926849694059, epsilon = 1e-12);
    }

    #[test]
    fn stage_max_law_matches_urss_rank_law() {
        // at l = 1 the stage-max coefficient equals δ_n
        let stage = ConcomitantLaw::for_stage_max(2.0, 1.0, 4, 1, 0.7).unwrap();
        let rank = ConcomitantLaw::for_rank(2.0, 1.0, 4, 4, 0.7).unwrap();
        assert_abs_diff_eq!(
            stage.shape_coefficient(),
            rank.shape_coefficient(),
            epsilon = 1e-15
        );
    }
}
