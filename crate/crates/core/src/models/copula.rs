//! Analytic copula zoo and deterministic samplers.
//!
//! Variants: the product copula, the Fréchet-Hoeffding bounds M and W,
//! the one-parameter Frank family, convex combinations, and vertical
//! gluings. Compositions are recursive, so e.g. a gluing of two Frank
//! copulas or a convex mixture of gluings is a single model value.

use crate::error::{Error, Result};
use crate::ingest::BivariateSample;
use crate::models::marginal::MarginalModel;
use crate::models::rng::SplitMix64;
use crate::ranks::PseudoObservations;

#[derive(Debug, Clone, PartialEq)]
pub enum CopulaModel {
    /// Pi(u, v) = u v; independence.
    Product,
    /// M(u, v) = min(u, v); comonotone upper bound.
    UpperBound,
    /// W(u, v) = max(u + v - 1, 0); countermonotone lower bound.
    LowerBound,
    /// Frank family; theta > 0 is PQD, theta < 0 is NQD.
    Frank { theta: f64 },
    /// (1 - weight) * first + weight * second.
    ConvexCombo {
        weight: f64,
        first: Box<CopulaModel>,
        second: Box<CopulaModel>,
    },
    /// `first` rescaled to the strip u <= theta, `second` to u > theta.
    Glued {
        theta: f64,
        first: Box<CopulaModel>,
        second: Box<CopulaModel>,
    },
}

impl CopulaModel {
    pub fn frank(theta: f64) -> Result<Self> {
        if !(theta.is_finite() && theta != 0.0) {
            return Err(Error::InvalidParameter(format!(
                "frank theta must be finite and nonzero, got {theta}"
            )));
        }
        Ok(CopulaModel::Frank { theta })
    }

    pub fn convex(weight: f64, first: CopulaModel, second: CopulaModel) -> Result<Self> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::InvalidParameter(format!(
                "convex weight must be in [0,1], got {weight}"
            )));
        }
        Ok(CopulaModel::ConvexCombo {
            weight,
            first: Box::new(first),
            second: Box::new(second),
        })
    }

    pub fn glued(theta: f64, first: CopulaModel, second: CopulaModel) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "gluing point must be in (0,1), got {theta}"
            )));
        }
        Ok(CopulaModel::Glued {
            theta,
            first: Box::new(first),
            second: Box::new(second),
        })
    }

    /// Copula CDF at (u, v) in the closed unit square.
    pub fn cdf(&self, u: f64, v: f64) -> Result<f64> {
        if !((0.0..=1.0).contains(&u) && (0.0..=1.0).contains(&v)) {
            return Err(Error::ArgumentOutOfRange {
                what: "copula argument",
                value: if (0.0..=1.0).contains(&u) { v } else { u },
            });
        }
        Ok(self.cdf_unchecked(u, v))
    }

    fn cdf_unchecked(&self, u: f64, v: f64) -> f64 {
        match self {
            CopulaModel::Product => u * v,
            CopulaModel::UpperBound => u.min(v),
            CopulaModel::LowerBound => (u + v - 1.0).max(0.0),
            CopulaModel::Frank { theta } => frank_cdf(*theta, u, v),
            CopulaModel::ConvexCombo {
                weight,
                first,
                second,
            } => {
                (1.0 - weight) * first.cdf_unchecked(u, v) + weight * second.cdf_unchecked(u, v)
            }
            CopulaModel::Glued {
                theta,
                first,
                second,
            } => {
                if u <= *theta {
                    theta * first.cdf_unchecked(u / theta, v)
                } else {
                    (1.0 - theta) * second.cdf_unchecked((u - theta) / (1.0 - theta), v)
                        + theta * v
                }
            }
        }
    }

    /// One draw from the copula. The per-variant draw order is fixed, so
    /// a given seed reproduces the same point stream forever.
    pub fn sample_pair(&self, rng: &mut SplitMix64) -> (f64, f64) {
        match self {
            CopulaModel::Product => (rng.next_open01(), rng.next_open01()),
            CopulaModel::UpperBound => {
                let u = rng.next_open01();
                (u, u)
            }
            CopulaModel::LowerBound => {
                let u = rng.next_open01();
                (u, 1.0 - u)
            }
            CopulaModel::Frank { theta } => {
                let u = rng.next_open01();
                let w = rng.next_open01();
                (u, frank_conditional_inverse(*theta, u, w))
            }
            CopulaModel::ConvexCombo {
                weight,
                first,
                second,
            } => {
                if rng.bernoulli(*weight) {
                    second.sample_pair(rng)
                } else {
                    first.sample_pair(rng)
                }
            }
            CopulaModel::Glued {
                theta,
                first,
                second,
            } => {
                if rng.bernoulli(*theta) {
                    let (u, v) = first.sample_pair(rng);
                    (theta * u, v)
                } else {
                    let (u, v) = second.sample_pair(rng);
                    (theta + (1.0 - theta) * u, v)
                }
            }
        }
    }

    /// n i.i.d. pairs with this copula as their joint CDF.
    pub fn sample(&self, n: usize, rng: &mut SplitMix64) -> Result<PseudoObservations> {
        if n < 2 {
            return Err(Error::TooFewRows { min: 2, got: n });
        }
        let mut u = Vec::with_capacity(n);
        let mut v = Vec::with_capacity(n);
        for _ in 0..n {
            let (a, b) = self.sample_pair(rng);
            u.push(a);
            v.push(b);
        }
        PseudoObservations::from_unit_pairs(u, v)
    }
}

/// Frank CDF, numerically stable over the whole parameter range.
///
/// For theta >= 2 the naive closed form cancels catastrophically, so the
/// grouped expression below keeps every term positive; negative theta
/// goes through the reflection C_{-t}(u, v) = u - C_t(u, 1 - v).
fn frank_cdf(theta: f64, u: f64, v: f64) -> f64 {
    if u == 0.0 || v == 0.0 {
        return 0.0;
    }
    if u == 1.0 {
        return v;
    }
    if v == 1.0 {
        return u;
    }
    if theta < 0.0 {
        return u - frank_cdf(-theta, u, 1.0 - v);
    }
    if theta < 2.0 {
        let x = (-theta * u).exp_m1();
        let y = (-theta * v).exp_m1();
        let a = (-theta).exp_m1();
        return -(x * y / a).ln_1p() / theta;
    }
    let m = u.min(v);
    let mx = u.max(v);
    let num = (-theta * m).exp() * (-(-theta * mx).exp_m1())
        + (-theta * mx).exp() * (-(-theta * (1.0 - mx)).exp_m1());
    let den = -(-theta).exp_m1();
    let s = num / den;
    (-s.ln() / theta).clamp(0.0, 1.0)
}

/// Conditional-inversion sampler for the Frank family: solves
/// dC/du (u, v) = w for v given u and a uniform w.
fn frank_conditional_inverse(theta: f64, u: f64, w: f64) -> f64 {
    if theta < 0.0 {
        return 1.0 - frank_conditional_inverse(-theta, u, w);
    }
    let den = w + (1.0 - w) * (-theta * u).exp();
    let v = if theta < 2.0 {
        -(w * (-theta).exp_m1() / den).ln_1p() / theta
    } else {
        // direct ratio of positive terms; precise when exp(-theta u)
        // underflows toward the v -> 1 corner
        let num = (1.0 - w) * (-theta * u).exp() + w * (-theta).exp();
        -(num / den).ln() / theta
    };
    v.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
}

/// Sklar-type simulation: copula pairs pushed through marginal quantiles.
pub fn simulate_bivariate(
    copula: &CopulaModel,
    margin_x: &MarginalModel,
    margin_y: &MarginalModel,
    n: usize,
    rng: &mut SplitMix64,
) -> Result<BivariateSample> {
    if n < 2 {
        return Err(Error::TooFewRows { min: 2, got: n });
    }
    let pairs = copula.sample(n, rng)?;
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for (&u, &v) in pairs.u.iter().zip(&pairs.v) {
        x.push(margin_x.quantile(u)?);
        y.push(margin_y.quantile(v)?);
    }
    BivariateSample::new(x, y, None)
}

/// Structural-equation simulator for contaminated-line models:
/// y = x + noise with probability 1 - mix_p, an independent draw from
/// `alt` with probability mix_p.
#[derive(Debug, Clone)]
pub struct NoisyLineMixture {
    pub x: MarginalModel,
    pub noise: MarginalModel,
    pub alt: MarginalModel,
    pub mix_p: f64,
}

impl NoisyLineMixture {
    pub fn new(
        x: MarginalModel,
        noise: MarginalModel,
        alt: MarginalModel,
        mix_p: f64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&mix_p) {
            return Err(Error::InvalidParameter(format!(
                "mixing probability must be in [0,1], got {mix_p}"
            )));
        }
        Ok(NoisyLineMixture {
            x,
            noise,
            alt,
            mix_p,
        })
    }

    /// Per point the draws are: x-level, mixing flag, then either the
    /// alternative level or the noise level.
    pub fn simulate(&self, n: usize, rng: &mut SplitMix64) -> Result<BivariateSample> {
        if n < 2 {
            return Err(Error::TooFewRows { min: 2, got: n });
        }
        let mut x = Vec::with_capacity(n);
        let mut y = Vec::with_capacity(n);
        for _ in 0..n {
            let xv = self.x.quantile(rng.next_open01())?;
            let contaminated = rng.bernoulli(self.mix_p);
            let yv = if contaminated {
                self.alt.quantile(rng.next_open01())?
            } else {
                xv + self.noise.quantile(rng.next_open01())?
            };
            x.push(xv);
            y.push(yv);
        }
        BivariateSample::new(x, y, None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ecopula::EmpiricalCopula;

    #[test]
    fn basic_cdf_values() {
        assert_eq!(CopulaModel::Product.cdf(0.3, 0.5).unwrap(), 0.15);
        assert_eq!(CopulaModel::UpperBound.cdf(0.3, 0.5).unwrap(), 0.3);
        assert_eq!(CopulaModel::LowerBound.cdf(0.3, 0.5).unwrap(), 0.0);
        let cv = CopulaModel::convex(0.5, CopulaModel::UpperBound, CopulaModel::LowerBound)
            .unwrap();
        assert_eq!(cv.cdf(0.5, 0.5).unwrap(), 0.25);
    }

    #[test]
    fn arguments_outside_unit_square_rejected() {
        assert!(CopulaModel::Product.cdf(-0.1, 0.5).is_err());
        assert!(CopulaModel::Product.cdf(0.1, 1.5).is_err());
    }

    #[test]
    fn frank_strong_pqd_value() {
        // closed form at (0.5, 0.5), theta = 30:
        // C = (15 - ln 2 + ln(1 + e^-15)) / 30 = 0.47689510417807761...
        let c = CopulaModel::frank(30.0).unwrap();
        let got = c.cdf(0.5, 0.5).unwrap();
        assert!((got - 0.476_895_104_178_077_61).abs() < 1e-12, "got {got}");
        // strong PQD sits close to M
        assert!((got - 0.5).abs() < 0.03);
    }

    #[test]
    fn frank_reflection_antisymmetry() {
        let pos = CopulaModel::frank(7.0).unwrap();
        let neg = CopulaModel::frank(-7.0).unwrap();
        for i in 1..10 {
            for j in 1..10 {
                let u = i as f64 / 10.0;
                let v = j as f64 / 10.0;
                let lhs = neg.cdf(u, v).unwrap();
                let rhs = u - pos.cdf(u, 1.0 - v).unwrap();
                assert!((lhs - rhs).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn frank_small_theta_approaches_independence() {
        let c = CopulaModel::frank(1e-7).unwrap();
        for i in 1..10 {
            for j in 1..10 {
                let u = i as f64 / 10.0;
                let v = j as f64 / 10.0;
                assert!((c.cdf(u, v).unwrap() - u * v).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn frank_matches_naive_form_at_moderate_theta() {
        // stable branch against the textbook expression where the
        // textbook expression is still well conditioned
        for &theta in &[2.5f64, 5.0, 10.0] {
            let c = CopulaModel::frank(theta).unwrap();
            for i in 1..8 {
                for j in 1..8 {
                    let u = i as f64 / 8.0;
                    let v = j as f64 / 8.0;
                    let naive = -1.0 / theta
                        * (1.0
                            + ((-theta * u).exp() - 1.0) * ((-theta * v).exp() - 1.0)
                                / ((-theta).exp() - 1.0))
                            .ln();
                    assert!(
                        (c.cdf(u, v).unwrap() - naive).abs() < 1e-10,
                        "theta={theta} u={u} v={v}"
                    );
                }
            }
        }
    }

    fn grid_check_copula_axioms(c: &CopulaModel) {
        let g = 20;
        // uniform margins and groundedness
        for k in 0..=g {
            let t = k as f64 / g as f64;
            assert!((c.cdf(t, 1.0).unwrap() - t).abs() < 1e-12);
            assert!((c.cdf(1.0, t).unwrap() - t).abs() < 1e-12);
            assert!(c.cdf(t, 0.0).unwrap().abs() < 1e-12);
            assert!(c.cdf(0.0, t).unwrap().abs() < 1e-12);
        }
        // FH bounds and 2-increasing rectangle volumes
        for i in 0..g {
            for j in 0..g {
                let u0 = i as f64 / g as f64;
                let u1 = (i + 1) as f64 / g as f64;
                let v0 = j as f64 / g as f64;
                let v1 = (j + 1) as f64 / g as f64;
                let c11 = c.cdf(u1, v1).unwrap();
                let w = (u1 + v1 - 1.0).max(0.0);
                let m = u1.min(v1);
                assert!(c11 >= w - 1e-12 && c11 <= m + 1e-12);
                let vol = c11 - c.cdf(u0, v1).unwrap() - c.cdf(u1, v0).unwrap()
                    + c.cdf(u0, v0).unwrap();
                assert!(vol >= -1e-10, "negative volume {vol}");
            }
        }
    }

    #[test]
    fn copula_axioms_hold_across_the_zoo() {
        let zoo = [
            CopulaModel::Product,
            CopulaModel::UpperBound,
            CopulaModel::LowerBound,
            CopulaModel::frank(30.0).unwrap(),
            CopulaModel::frank(-30.0).unwrap(),
            CopulaModel::frank(0.5).unwrap(),
            CopulaModel::convex(0.3, CopulaModel::UpperBound, CopulaModel::LowerBound).unwrap(),
            CopulaModel::glued(
                0.5,
                CopulaModel::frank(-30.0).unwrap(),
                CopulaModel::frank(30.0).unwrap(),
            )
            .unwrap(),
            CopulaModel::glued(0.25, CopulaModel::UpperBound, CopulaModel::Product).unwrap(),
        ];
        for c in &zoo {
            grid_check_copula_axioms(c);
        }
    }

    #[test]
    fn upper_bound_sampler_is_diagonal() {
        let mut rng = SplitMix64::new(1);
        let p = CopulaModel::UpperBound.sample(500, &mut rng).unwrap();
        for (u, v) in p.u.iter().zip(&p.v) {
            assert_eq!(u, v);
        }
    }

    #[test]
    fn lower_bound_sampler_is_antidiagonal() {
        let mut rng = SplitMix64::new(2);
        let p = CopulaModel::LowerBound.sample(500, &mut rng).unwrap();
        for (&u, &v) in p.u.iter().zip(&p.v) {
            assert!((v - (1.0 - u)).abs() < 1e-15);
        }
    }

    #[test]
    fn glued_m_w_piecewise_identities() {
        let g = CopulaModel::glued(0.5, CopulaModel::UpperBound, CopulaModel::LowerBound)
            .unwrap();
        let mut rng = SplitMix64::new(3);
        let p = g.sample(2000, &mut rng).unwrap();
        for (&u, &v) in p.u.iter().zip(&p.v) {
            if u <= 0.5 {
                assert!((v - 2.0 * u).abs() < 1e-12, "left: u={u} v={v}");
            } else {
                assert!((v - 2.0 * (1.0 - u)).abs() < 1e-12, "right: u={u} v={v}");
            }
        }
    }

    #[test]
    fn frank_negative_gives_strong_discordance() {
        let c = CopulaModel::frank(-30.0).unwrap();
        let mut rng = SplitMix64::new(4);
        let p = c.sample(2000, &mut rng).unwrap();
        let rho = EmpiricalCopula::from_pseudo(&p).unwrap().spearman_rho();
        assert!(rho < -0.9, "rho = {rho}");
    }

    #[test]
    fn sampler_margins_are_uniform() {
        // Kolmogorov-style bound 2/sqrt(n) on the u and v marginals
        let models = [
            CopulaModel::Product,
            CopulaModel::frank(30.0).unwrap(),
            CopulaModel::frank(-5.0).unwrap(),
            CopulaModel::convex(0.4, CopulaModel::Product, CopulaModel::UpperBound).unwrap(),
            CopulaModel::glued(
                0.5,
                CopulaModel::frank(-30.0).unwrap(),
                CopulaModel::frank(30.0).unwrap(),
            )
            .unwrap(),
        ];
        let n = 10_000;
        let bound = 2.0 / (n as f64).sqrt();
        for (k, c) in models.iter().enumerate() {
            let mut rng = SplitMix64::new(100 + k as u64);
            let p = c.sample(n, &mut rng).unwrap();
            for axis in [&p.u, &p.v] {
                let mut sorted = axis.clone();
                sorted.sort_by(f64::total_cmp);
                let max_dev = sorted
                    .iter()
                    .enumerate()
                    .map(|(i, &x)| (x - (i + 1) as f64 / n as f64).abs())
                    .fold(0.0, f64::max);
                assert!(max_dev <= bound, "model {k}: deviation {max_dev}");
            }
        }
    }

    #[test]
    fn sampler_agrees_with_cdf_on_a_grid() {
        let models = [
            CopulaModel::Product,
            CopulaModel::frank(8.0).unwrap(),
            CopulaModel::frank(-30.0).unwrap(),
            CopulaModel::convex(0.5, CopulaModel::UpperBound, CopulaModel::LowerBound).unwrap(),
            CopulaModel::glued(0.3, CopulaModel::UpperBound, CopulaModel::Product).unwrap(),
        ];
        let n = 20_000;
        for (k, c) in models.iter().enumerate() {
            let mut rng = SplitMix64::new(900 + k as u64);
            let p = c.sample(n, &mut rng).unwrap();
            let mut worst = 0.0f64;
            for i in 1..=20 {
                for j in 1..=20 {
                    let u = i as f64 / 20.0;
                    let v = j as f64 / 20.0;
                    let emp = p
                        .u
                        .iter()
                        .zip(&p.v)
                        .filter(|&(&a, &b)| a <= u && b <= v)
                        .count() as f64
                        / n as f64;
                    worst = worst.max((emp - c.cdf(u, v).unwrap()).abs());
                }
            }
            assert!(worst <= 0.02, "model {k}: sup deviation {worst}");
        }
    }

    #[test]
    fn frank_sign_law() {
        // theta > 0: sigma ~ rho (PQD); theta < 0: sigma ~ -rho (NQD)
        let n = 5000;
        for &theta in &[6.0, -6.0] {
            let c = CopulaModel::frank(theta).unwrap();
            let mut rng = SplitMix64::new(55);
            let p = c.sample(n, &mut rng).unwrap();
            let e = EmpiricalCopula::from_pseudo(&p).unwrap();
            let m = e.measures();
            if theta > 0.0 {
                assert!((m.sigma_n - m.rho_n).abs() <= 0.02, "{m:?}");
            } else {
                assert!((m.sigma_n + m.rho_n).abs() <= 0.02, "{m:?}");
            }
        }
    }

    #[test]
    fn simulate_bivariate_is_deterministic() {
        let c = CopulaModel::frank(30.0).unwrap();
        let mx = MarginalModel::kumaraswamy(0.25, 0.15).unwrap();
        let my = MarginalModel::student_t(3.0, 1.5, 2.5).unwrap();
        let a = simulate_bivariate(&c, &mx, &my, 100, &mut SplitMix64::new(9)).unwrap();
        let b = simulate_bivariate(&c, &mx, &my, 100, &mut SplitMix64::new(9)).unwrap();
        assert_eq!(a.x, b.x);
        assert_eq!(a.y, b.y);
    }

    #[test]
    fn noisy_line_mixture_extremes() {
        let base = NoisyLineMixture::new(
            MarginalModel::pareto(2.0, 10.0).unwrap(),
            MarginalModel::normal(0.0, 0.03).unwrap(),
            MarginalModel::pareto(2.0, 10.0).unwrap(),
            0.0,
        )
        .unwrap();
        let s = base.simulate(2000, &mut SplitMix64::new(21)).unwrap();
        let p = crate::ranks::rank_transform(&s, crate::ranks::TiePolicy::Average).unwrap();
        let e = EmpiricalCopula::from_pseudo(&p).unwrap();
        assert!(e.spearman_rho() > 0.99);

        let indep = NoisyLineMixture::new(
            MarginalModel::pareto(2.0, 10.0).unwrap(),
            MarginalModel::normal(0.0, 0.03).unwrap(),
            MarginalModel::pareto(2.0, 10.0).unwrap(),
            1.0,
        )
        .unwrap();
        let s = indep.simulate(2000, &mut SplitMix64::new(22)).unwrap();
        let p = crate::ranks::rank_transform(&s, crate::ranks::TiePolicy::Average).unwrap();
        let e = EmpiricalCopula::from_pseudo(&p).unwrap();
        assert!(e.schweizer_wolff() < 0.12);
    }

    #[test]
    fn invalid_model_parameters() {
        assert!(CopulaModel::frank(0.0).is_err());
        assert!(CopulaModel::convex(1.5, CopulaModel::Product, CopulaModel::Product).is_err());
        assert!(CopulaModel::glued(0.0, CopulaModel::Product, CopulaModel::Product).is_err());
        assert!(CopulaModel::glued(1.0, CopulaModel::Product, CopulaModel::Product).is_err());
        assert!(NoisyLineMixture::new(
            MarginalModel::uniform(0.0, 1.0).unwrap(),
            MarginalModel::normal(0.0, 1.0).unwrap(),
            MarginalModel::uniform(0.0, 1.0).unwrap(),
            1.2
        )
        .is_err());
    }
}
