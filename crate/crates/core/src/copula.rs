//! Parametric copula families: CDFs, partial derivatives, conditional-inversion
//! samplers, and dependence-condition checks.
//!
//! Five families cover the roles the covariance analysis needs: independence,
//! FGM (polynomial, LTD for theta >= 0), Gumbel--Barnett (NQD, violates the
//! relaxed derivative bounds), Clayton and Gaussian (classic LTD families).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normal::{bvn_cdf, norm_cdf, norm_ppf};
use crate::rng::SplitMix64;
use crate::sample::{MarginKind, PairSample};

/// Tolerance separating a genuine condition violation from roundoff.
pub const CONDITION_TOL: f64 = 1e-9;

/// A parametric copula. Immutable once constructed; parameters are validated
/// by the constructors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum CopulaModel {
    Independence,
    Fgm { theta: f64 },
    GumbelBarnett { theta: f64 },
    Clayton { theta: f64 },
    Gaussian { rho: f64 },
}

/// A dependence condition checkable on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DependenceCondition {
    /// Left-tail decreasing: both derivative bounds `C1 <= C/u`, `C2 <= C/v`.
    Ltd,
    /// Positive quadrant dependence: `C(u,v) >= uv`.
    Pqd,
    /// Negative quadrant dependence: `C(u,v) <= uv`.
    Nqd,
    /// NQD together with the relaxed bounds `C1 <= 2C/u`, `C2 <= 2C/v`.
    Condition3,
}

impl std::fmt::Display for DependenceCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            DependenceCondition::Ltd => "LTD",
            DependenceCondition::Pqd => "PQD",
            DependenceCondition::Nqd => "NQD",
            DependenceCondition::Condition3 => "condition-3",
        };
        f.write_str(s)
    }
}

/// Outcome of a grid check of a dependence condition.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConditionReport {
    pub condition: DependenceCondition,
    pub holds: bool,
    /// Largest signed violation over the grid (positive means violated).
    pub worst_violation: f64,
    /// Grid point achieving the worst violation.
    pub witness: (f64, f64),
    pub grid_resolution: usize,
}

fn check_unit(name: &'static str, x: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(Error::Domain {
            name,
            value: x,
            expected: "[0, 1]",
        })
    }
}

impl CopulaModel {
    pub fn independence() -> Self {
        CopulaModel::Independence
    }

    /// FGM copula, `theta` in [-1, 1].
    pub fn fgm(theta: f64) -> Result<Self> {
        if (-1.0..=1.0).contains(&theta) {
            Ok(CopulaModel::Fgm { theta })
        } else {
            Err(Error::ParameterOutOfRange {
                family: "FGM",
                value: theta,
                range: "[-1, 1]",
            })
        }
    }

    /// Gumbel--Barnett copula, `theta` in (0, 1].
    pub fn gumbel_barnett(theta: f64) -> Result<Self> {
        if theta > 0.0 && theta <= 1.0 {
            Ok(CopulaModel::GumbelBarnett { theta })
        } else {
            Err(Error::ParameterOutOfRange {
                family: "Gumbel-Barnett",
                value: theta,
                range: "(0, 1]",
            })
        }
    }

    /// Clayton copula, `theta` in (0, inf).
    pub fn clayton(theta: f64) -> Result<Self> {
        if theta > 0.0 && theta.is_finite() {
            Ok(CopulaModel::Clayton { theta })
        } else {
            Err(Error::ParameterOutOfRange {
                family: "Clayton",
                value: theta,
                range: "(0, inf)",
            })
        }
    }

    /// Gaussian copula, `rho` in (-1, 1).
    pub fn gaussian(rho: f64) -> Result<Self> {
        if rho > -1.0 && rho < 1.0 {
            Ok(CopulaModel::Gaussian { rho })
        } else {
            Err(Error::ParameterOutOfRange {
                family: "Gaussian",
                value: rho,
                range: "(-1, 1)",
            })
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            CopulaModel::Independence => "independence",
            CopulaModel::Fgm { .. } => "fgm",
            CopulaModel::GumbelBarnett { .. } => "gumbel-barnett",
            CopulaModel::Clayton { .. } => "clayton",
            CopulaModel::Gaussian { .. } => "gaussian",
        }
    }

    pub fn parameter(&self) -> Option<f64> {
        match *self {
            CopulaModel::Independence => None,
            CopulaModel::Fgm { theta }
            | CopulaModel::GumbelBarnett { theta }
            | CopulaModel::Clayton { theta } => Some(theta),
            CopulaModel::Gaussian { rho } => Some(rho),
        }
    }

    /// C(u, v).
    pub fn cdf(&self, u: f64, v: f64) -> Result<f64> {
        let u = check_unit("u", u)?;
        let v = check_unit("v", v)?;
        // Uniform-margin boundaries, shared by every family.
        if u == 0.0 || v == 0.0 {
            return Ok(0.0);
        }
        if u == 1.0 {
            return Ok(v);
        }
        if v == 1.0 {
            return Ok(u);
        }
        Ok(match *self {
            CopulaModel::Independence => u * v,
            CopulaModel::Fgm { theta } => u * v + theta * u * v * (1.0 - u) * (1.0 - v),
            CopulaModel::GumbelBarnett { theta } => u * v * (-theta * u.ln() * v.ln()).exp(),
            CopulaModel::Clayton { theta } => {
                (u.powf(-theta) + v.powf(-theta) - 1.0).powf(-1.0 / theta)
            }
            CopulaModel::Gaussian { rho } => bvn_cdf(norm_ppf(u), norm_ppf(v), rho),
        })
    }

    /// dC/du. Defined on [0,1]^2 for the closed-form families; the Gaussian
    /// copula has no derivative at u in {0, 1}.
    pub fn partial_u(&self, u: f64, v: f64) -> Result<f64> {
        let u = check_unit("u", u)?;
        let v = check_unit("v", v)?;
        self.partial_first(u, v, "u")
    }

    /// dC/dv. All implemented families are exchangeable, so this is the
    /// u-derivative with the arguments swapped.
    pub fn partial_v(&self, u: f64, v: f64) -> Result<f64> {
        let u = check_unit("u", u)?;
        let v = check_unit("v", v)?;
        self.partial_first(v, u, "v")
    }

    /// Derivative with respect to the first of (a, b); `axis` only labels errors.
    fn partial_first(&self, a: f64, b: f64, axis: &'static str) -> Result<f64> {
        Ok(match *self {
            CopulaModel::Independence => b,
            CopulaModel::Fgm { theta } => b + theta * b * (1.0 - b) * (1.0 - 2.0 * a),
            CopulaModel::GumbelBarnett { theta } => {
                if b == 0.0 {
                    0.0
                } else if a == 0.0 {
                    // limit of (C/a)(1 - theta ln b) as a -> 0
                    if b < 1.0 {
                        0.0
                    } else {
                        1.0
                    }
                } else {
                    // (C/a)(1 - theta ln b); written directly to stay finite at b = 1
                    b * (-theta * a.ln() * b.ln()).exp() * (1.0 - theta * b.ln())
                }
            }
            CopulaModel::Clayton { theta } => {
                if b == 0.0 {
                    0.0
                } else if a == 0.0 {
                    1.0
                } else {
                    let s = a.powf(-theta) + b.powf(-theta) - 1.0;
                    a.powf(-theta - 1.0) * s.powf(-1.0 / theta - 1.0)
                }
            }
            CopulaModel::Gaussian { rho } => {
                if a == 0.0 || a == 1.0 {
                    let (u, v) = if axis == "u" { (a, b) } else { (b, a) };
                    return Err(Error::DerivativeUndefined {
                        family: "gaussian",
                        axis,
                        u,
                        v,
                    });
                }
                if b == 0.0 {
                    0.0
                } else if b == 1.0 {
                    1.0
                } else {
                    let x = norm_ppf(a);
                    let y = norm_ppf(b);
                    norm_cdf((y - rho * x) / (1.0 - rho * rho).sqrt())
                }
            }
        })
    }

    /// Draw `n` i.i.d. pairs from the copula by conditional inversion:
    /// U uniform, then solve `dC/du (U, V) = W` for V with W uniform.
    /// Fixed seed, fixed output.
    pub fn sample(&self, n: usize, seed: u64) -> PairSample {
        let mut rng = SplitMix64::new(seed);
        let mut pairs = Vec::with_capacity(n);
        for _ in 0..n {
            let u = rng.next_open01();
            let w = rng.next_open01();
            let v = self.conditional_quantile(u, w);
            pairs.push((u, v));
        }
        PairSample::from_pairs(pairs, MarginKind::Uniform)
    }

    /// Solve `dC/du (u, v) = w` for v in (0, 1).
    fn conditional_quantile(&self, u: f64, w: f64) -> f64 {
        match *self {
            CopulaModel::Independence => w,
            CopulaModel::Fgm { theta } => {
                // a v^2 - (1+a) v + w = 0 with a = theta (1 - 2u); the root in
                // [0,1] in a cancellation-free form, continuous through a = 0.
                let a = theta * (1.0 - 2.0 * u);
                let disc = (1.0 + a) * (1.0 + a) - 4.0 * a * w;
                2.0 * w / ((1.0 + a) + disc.sqrt())
            }
            CopulaModel::Clayton { theta } => {
                let q = w.powf(-theta / (1.0 + theta)) - 1.0;
                (q * u.powf(-theta) + 1.0).powf(-1.0 / theta)
            }
            CopulaModel::Gaussian { rho } => {
                let x = norm_ppf(u);
                let z = norm_ppf(w);
                norm_cdf(rho * x + (1.0 - rho * rho).sqrt() * z)
            }
            CopulaModel::GumbelBarnett { .. } => {
                // Monotone conditional CDF: bisect dC/du (u, .) = w.
                let eps = 1e-15;
                let mut lo = eps;
                let mut hi = 1.0 - eps;
                let cond = |v: f64| self.partial_first(u, v, "u").expect("interior");
                for _ in 0..200 {
                    if hi - lo <= 1e-12 {
                        break;
                    }
                    let mid = 0.5 * (lo + hi);
                    if cond(mid) < w {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        }
    }

    /// Evaluate a dependence condition on the interior grid {i/m : 0 < i < m}^2
    /// and report the worst signed violation.
    pub fn check_condition(
        &self,
        condition: DependenceCondition,
        grid_resolution: usize,
    ) -> Result<ConditionReport> {
        if grid_resolution < 2 {
            return Err(Error::InvalidConfig(format!(
                "grid resolution must be >= 2, got {grid_resolution}"
            )));
        }
        let m = grid_resolution;
        let mut worst = f64::NEG_INFINITY;
        let mut witness = (0.0, 0.0);
        for i in 1..m {
            let u = i as f64 / m as f64;
            for j in 1..m {
                let v = j as f64 / m as f64;
                let violation = self.condition_violation(condition, u, v)?;
                if violation > worst {
                    worst = violation;
                    witness = (u, v);
                }
            }
        }
        Ok(ConditionReport {
            condition,
            holds: worst <= CONDITION_TOL,
            worst_violation: worst,
            witness,
            grid_resolution,
        })
    }

    /// Signed violation of `condition` at an interior point (positive = violated).
    fn condition_violation(&self, condition: DependenceCondition, u: f64, v: f64) -> Result<f64> {
        let c = self.cdf(u, v)?;
        Ok(match condition {
            DependenceCondition::Ltd => {
                let d1 = self.partial_u(u, v)? - c / u;
                let d2 = self.partial_v(u, v)? - c / v;
                d1.max(d2)
            }
            DependenceCondition::Pqd => u * v - c,
            DependenceCondition::Nqd => c - u * v,
            DependenceCondition::Condition3 => {
                let d1 = self.partial_u(u, v)? - 2.0 * c / u;
                let d2 = self.partial_v(u, v)? - 2.0 * c / v;
                d1.max(d2).max(c - u * v)
            }
        })
    }
}

impl std::fmt::Display for CopulaModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.parameter() {
            Some(p) => write!(f, "{}({})", self.family_name(), p),
            None => f.write_str(self.family_name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn models() -> Vec<CopulaModel> {
        vec![
            CopulaModel::independence(),
            CopulaModel::fgm(1.0).unwrap(),
            CopulaModel::fgm(-0.7).unwrap(),
            CopulaModel::gumbel_barnett(1.0).unwrap(),
            CopulaModel::gumbel_barnett(0.4).unwrap(),
            CopulaModel::clayton(0.5).unwrap(),
            CopulaModel::clayton(2.0).unwrap(),
            CopulaModel::gaussian(0.25).unwrap(),
            CopulaModel::gaussian(0.75).unwrap(),
            CopulaModel::gaussian(-0.6).unwrap(),
        ]
    }

    #[test]
    fn parameter_ranges_enforced() {
        assert!(CopulaModel::fgm(1.5).is_err());
        assert!(CopulaModel::gumbel_barnett(0.0).is_err());
        assert!(CopulaModel::gumbel_barnett(1.2).is_err());
        assert!(CopulaModel::clayton(0.0).is_err());
        assert!(CopulaModel::gaussian(1.0).is_err());
        assert!(CopulaModel::fgm(-1.0).is_ok());
    }

    #[test]
    fn cdf_known_values() {
        let fgm = CopulaModel::fgm(1.0).unwrap();
        assert_eq!(fgm.cdf(0.5, 0.5).unwrap(), 0.3125);

        let gb = CopulaModel::gumbel_barnett(1.0).unwrap();
        let e1 = (-1.0f64).exp();
        assert!((gb.cdf(e1, e1).unwrap() - (-3.0f64).exp()).abs() < 1e-15);

        // mpmath reference for the Gaussian copula at the median
        let g = CopulaModel::gaussian(0.75).unwrap();
        assert!((g.cdf(0.5, 0.5).unwrap() - 0.3849732719186920573931).abs() < 1e-14);
        let g = CopulaModel::gaussian(0.25).unwrap();
        assert!((g.cdf(0.5, 0.5).unwrap() - 0.2902153116275831218855).abs() < 1e-14);
        assert!((g.cdf(0.25, 0.75).unwrap() - 0.2113379056614172308906).abs() < 1e-14);

        for m in models() {
            assert_eq!(m.cdf(0.3, 1.0).unwrap(), 0.3);
            assert_eq!(m.cdf(1.0, 0.85).unwrap(), 0.85);
            assert_eq!(m.cdf(0.0, 0.4).unwrap(), 0.0);
            assert_eq!(m.cdf(0.6, 0.0).unwrap(), 0.0);
        }
        assert!(models()[0].cdf(1.2, 0.5).is_err());
        assert!(models()[0].cdf(0.5, -0.1).is_err());
    }

    #[test]
    fn partials_known_values() {
        let ind = CopulaModel::independence();
        assert_eq!(ind.partial_u(0.7, 0.4).unwrap(), 0.4);
        assert_eq!(ind.partial_v(0.7, 0.4).unwrap(), 0.7);

        let fgm = CopulaModel::fgm(1.0).unwrap();
        assert_eq!(fgm.partial_u(0.5, 0.5).unwrap(), 0.5);

        // Gumbel--Barnett identity: u C1 / C = 1 - theta ln v
        let gb = CopulaModel::gumbel_barnett(1.0).unwrap();
        let (u, v) = (0.5, (-1.0f64).exp());
        let c = gb.cdf(u, v).unwrap();
        let c1 = gb.partial_u(u, v).unwrap();
        assert!((u * c1 / c - (1.0 - v.ln())).abs() < 1e-13);

        // mpmath reference for the Gaussian partial
        let g = CopulaModel::gaussian(0.75).unwrap();
        assert!((g.partial_u(0.3, 0.7).unwrap() - 0.9173451683397068724736).abs() < 1e-13);
        assert_eq!(CopulaModel::gaussian(0.25).unwrap().partial_u(0.5, 0.5).unwrap(), 0.5);

        assert!(g.partial_u(0.0, 0.5).is_err());
        assert!(g.partial_u(1.0, 0.5).is_err());
        assert!(g.partial_v(0.5, 1.0).is_err());
        // ... but the off-axis boundary is fine
        assert_eq!(g.partial_u(0.3, 0.0).unwrap(), 0.0);
        assert_eq!(g.partial_u(0.3, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn partials_match_finite_differences() {
        let h = 1e-5;
        for model in models() {
            for i in 1..51 {
                for j in 1..51 {
                    let u = i as f64 / 51.0;
                    let v = j as f64 / 51.0;
                    let fd_u =
                        (model.cdf(u + h, v).unwrap() - model.cdf(u - h, v).unwrap()) / (2.0 * h);
                    let fd_v =
                        (model.cdf(u, v + h).unwrap() - model.cdf(u, v - h).unwrap()) / (2.0 * h);
                    let du = model.partial_u(u, v).unwrap();
                    let dv = model.partial_v(u, v).unwrap();
                    assert!(
                        (du - fd_u).abs() < 1e-6,
                        "{model} dC/du at ({u},{v}): {du} vs fd {fd_u}"
                    );
                    assert!(
                        (dv - fd_v).abs() < 1e-6,
                        "{model} dC/dv at ({u},{v}): {dv} vs fd {fd_v}"
                    );
                }
            }
        }
    }

    #[test]
    fn frechet_bounds_and_two_increasing() {
        for model in models() {
            let m = 40;
            for i in 0..=m {
                for j in 0..=m {
                    let u = i as f64 / m as f64;
                    let v = j as f64 / m as f64;
                    let c = model.cdf(u, v).unwrap();
                    let lower = (u + v - 1.0).max(0.0);
                    let upper = u.min(v);
                    assert!(
                        c >= lower - 1e-12 && c <= upper + 1e-12,
                        "{model} violates Frechet bounds at ({u},{v}): {c}"
                    );
                    assert!(du_in_unit(&model, u, v));
                }
            }
            // rectangle volumes are nonnegative
            for i in 0..m {
                for j in 0..m {
                    let (u0, u1) = (i as f64 / m as f64, (i + 1) as f64 / m as f64);
                    let (v0, v1) = (j as f64 / m as f64, (j + 1) as f64 / m as f64);
                    let vol = model.cdf(u1, v1).unwrap() - model.cdf(u1, v0).unwrap()
                        - model.cdf(u0, v1).unwrap()
                        + model.cdf(u0, v0).unwrap();
                    assert!(vol >= -1e-12, "{model} rectangle volume {vol} at ({u0},{v0})");
                }
            }
        }
    }

    fn du_in_unit(model: &CopulaModel, u: f64, v: f64) -> bool {
        match model.partial_u(u, v) {
            Ok(d) => (-1e-12..=1.0 + 1e-12).contains(&d),
            Err(_) => true, // undefined at the boundary is allowed
        }
    }

    #[test]
    fn sampler_is_deterministic() {
        for model in models() {
            let a = model.sample(100, 777);
            let b = model.sample(100, 777);
            assert_eq!(a.pairs(), b.pairs());
            let c = model.sample(100, 778);
            assert_ne!(a.pairs(), c.pairs());
        }
    }

    #[test]
    fn sampler_matches_cdf_at_grid_points() {
        let n = 100_000;
        for model in models() {
            let sample = model.sample(n, 0xC0FFEE);
            for i in 1..4 {
                for j in 1..4 {
                    let (u, v) = (i as f64 / 4.0, j as f64 / 4.0);
                    let p = model.cdf(u, v).unwrap();
                    let hits = sample
                        .pairs()
                        .iter()
                        .filter(|&&(x, y)| x <= u && y <= v)
                        .count();
                    let phat = hits as f64 / n as f64;
                    let se = (p * (1.0 - p) / n as f64).sqrt();
                    assert!(
                        (phat - p).abs() <= 4.0 * se,
                        "{model} at ({u},{v}): phat={phat}, p={p}, se={se}"
                    );
                }
            }
        }
    }

    #[test]
    fn conditions_known_verdicts() {
        let m = 101;
        for theta in [0.25, 0.5, 1.0] {
            let fgm = CopulaModel::fgm(theta).unwrap();
            let r = fgm.check_condition(DependenceCondition::Ltd, m).unwrap();
            assert!(r.holds, "FGM({theta}) should be LTD, worst={}", r.worst_violation);
        }
        // negative theta breaks LTD
        let fgm_neg = CopulaModel::fgm(-0.5).unwrap();
        assert!(!fgm_neg.check_condition(DependenceCondition::Ltd, m).unwrap().holds);

        let ind = CopulaModel::independence();
        let r = ind.check_condition(DependenceCondition::Ltd, m).unwrap();
        assert!(r.holds);
        // equality case: zero up to one rounding of (u*v)/u
        assert!(r.worst_violation.abs() <= 1e-15);

        let gb = CopulaModel::gumbel_barnett(1.0).unwrap();
        assert!(gb.check_condition(DependenceCondition::Nqd, m).unwrap().holds);
        let r = gb.check_condition(DependenceCondition::Condition3, m).unwrap();
        assert!(!r.holds, "Gumbel-Barnett should violate the relaxed bounds");
        assert!(r.worst_violation > 1.0); // violation is gross near v -> 0

        for c in [DependenceCondition::Ltd, DependenceCondition::Condition3] {
            for m in [CopulaModel::clayton(2.0).unwrap(), CopulaModel::gaussian(0.75).unwrap()] {
                assert!(m.check_condition(c, 51).unwrap().holds, "{m} fails {c:?}");
            }
        }
    }
}
