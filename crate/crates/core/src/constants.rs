//! Closed-form constants, exponents and thresholds for the complex
//! k-Hessian problems on the unit ball of `C^n`, and the linearization of
//! the radial phase-plane system at its interior equilibrium.
//!
//! Everything that is a rational multiple of a power of `pi` is computed
//! exactly (see [`PiMultiple`]) and only rounded when converted to `f64`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exact::{
    binomial, binomial_f64, factorial, rational, rational_to_f64, sphere_volume_exact, PiMultiple,
    MAX_EXACT,
};

/// Complex dimension `n` and Hessian order `k` with `1 <= k <= n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProblemSpec {
    n: u32,
    k: u32,
}

impl ProblemSpec {
    pub fn new(n: u32, k: u32) -> Result<Self> {
        if k < 1 || k > n {
            return Err(Error::InvalidSpec(format!(
                "need 1 <= k <= n, got n = {n}, k = {k}"
            )));
        }
        if n > MAX_EXACT {
            return Err(Error::InvalidSpec(format!(
                "n = {n} exceeds the supported maximum {MAX_EXACT}"
            )));
        }
        Ok(Self { n, k })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// `n - k`.
    pub fn codim(&self) -> u32 {
        self.n - self.k
    }

    /// `k = n`: the complex Monge-Ampere case, where the phase-plane system
    /// is explicitly integrable.
    pub fn is_monge_ampere(&self) -> bool {
        self.n == self.k
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    pub fn kf(&self) -> f64 {
        self.k as f64
    }

    /// `k^k` as a float.
    pub fn k_pow_k(&self) -> f64 {
        self.kf().powi(self.k as i32)
    }
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(n = {}, k = {})", self.n, self.k)
    }
}

fn int(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

/// `omega_{2n-1} = 2 pi^n / (n-1)!`, the area of the unit sphere in `C^n`.
pub fn omega_exact(n: u32) -> PiMultiple {
    sphere_volume_exact(2 * n).expect("2n >= 2")
}

/// `A(k,n) = omega_{2n-1} / (2k) * C(n-1, k-1)`.
pub fn energy_constant_exact(spec: ProblemSpec) -> PiMultiple {
    let q = int(binomial(spec.n - 1, spec.k - 1)) / int(2 * spec.k);
    omega_exact(spec.n).scale(&q)
}

/// `B(k,n) = omega_{2n-1} / 2`.
pub fn volume_constant_exact(spec: ProblemSpec) -> PiMultiple {
    omega_exact(spec.n).scale(&rational(1, 2))
}

/// Levi invariant of the sphere of radius `r`: `C(n-1,k-1) / (2^{k+1} r^{k+1})`.
pub fn levi_ball(spec: ProblemSpec, radius: f64) -> Result<f64> {
    if !(radius > 0.0) {
        return invalid(format!("radius must be positive, got {radius}"));
    }
    let k1 = spec.k as i32 + 1;
    Ok(binomial_f64(spec.n - 1, spec.k - 1) / (2f64.powi(k1) * radius.powi(k1)))
}

/// Levi invariant of the unit sphere, exactly.
pub fn levi_unit_exact(spec: ProblemSpec) -> BigRational {
    int(binomial(spec.n - 1, spec.k - 1)) / int(BigInt::from(2).pow(spec.k + 1))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizationConstants {
    pub omega: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    /// Levi invariant of the unit sphere; use [`levi_ball`] for other radii.
    pub levi_unit: f64,
}

impl NormalizationConstants {
    pub fn new(spec: ProblemSpec) -> Self {
        Self {
            omega: omega_exact(spec.n).to_f64(),
            a: energy_constant_exact(spec).to_f64(),
            b: volume_constant_exact(spec).to_f64(),
            levi_unit: rational_to_f64(&levi_unit_exact(spec)),
        }
    }

    pub fn levi_ball(&self, spec: ProblemSpec, radius: f64) -> Result<f64> {
        levi_ball(spec, radius)
    }
}

/// An exponent that is either a finite rational or the `+inf` sentinel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Exponent {
    Finite(BigRational),
    Infinite,
}

impl Exponent {
    pub fn to_f64(&self) -> f64 {
        match self {
            Exponent::Finite(q) => rational_to_f64(q),
            Exponent::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinite)
    }

    /// Exact comparison of a finite float against the exponent.
    pub fn cmp_f64(&self, p: f64) -> Ordering {
        match self {
            Exponent::Infinite => Ordering::Greater,
            Exponent::Finite(q) => match BigRational::from_float(p) {
                Some(pq) => q.cmp(&pq),
                None => Ordering::Less,
            },
        }
    }

    /// `p >= self`, decided exactly.
    pub fn at_most(&self, p: f64) -> bool {
        self.cmp_f64(p) != Ordering::Greater
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(q) => write!(f, "{q}"),
            Exponent::Infinite => write!(f, "inf"),
        }
    }
}

/// `gamma(k,n) = (n+1)k / (n-k)`, infinite when `k = n`.
pub fn critical_exponent(spec: ProblemSpec) -> Exponent {
    if spec.is_monge_ampere() {
        Exponent::Infinite
    } else {
        Exponent::Finite(rational((spec.n + 1) * spec.k, spec.codim()))
    }
}

/// The real k-Hessian critical exponent on `R^d`: `(d+2)k/(d-2k)` for
/// `k < d/2` and infinite for `d/2 <= k < d`.
pub fn real_critical_exponent(k: u32, d: u32) -> Result<Exponent> {
    if k < 1 || k >= d {
        return invalid(format!("need 1 <= k < d, got k = {k}, d = {d}"));
    }
    if 2 * k >= d {
        Ok(Exponent::Infinite)
    } else {
        Ok(Exponent::Finite(rational((d + 2) * k, d - 2 * k)))
    }
}

/// `a0(n) = (n+1)^n pi^n / n!`.
pub fn a0_exact(n: u32) -> PiMultiple {
    PiMultiple::new(
        int(BigInt::from(n + 1).pow(n)) / int(factorial(n)),
        n,
    )
}

/// `alpha_1(k,n) = (n(k+1)/k)^k C(n,k) pi^n / n!`.
pub fn alpha1_exact(spec: ProblemSpec) -> PiMultiple {
    let (n, k) = (spec.n, spec.k);
    let base: BigRational = rational(n * (k + 1), k);
    let q = Pow::pow(base, k) * int(binomial(n, k)) / int(factorial(n));
    PiMultiple::new(q, n)
}

/// `alpha_1` through the Levi-invariant route
/// `(2n(k+1))^k omega_{2n-1} S_{k-1} / k^{k+1}`.
pub fn alpha1_via_levi_exact(spec: ProblemSpec) -> PiMultiple {
    let (n, k) = (spec.n, spec.k);
    let q = int(BigInt::from(2 * n * (k + 1)).pow(k)) * levi_unit_exact(spec)
        / int(BigInt::from(k).pow(k + 1));
    omega_exact(n).scale(&q)
}

/// `beta(k,n) = k^{k-1} C(n-1,k-1) pi^n / (n-1)!`.
pub fn beta_exact(spec: ProblemSpec) -> PiMultiple {
    let (n, k) = (spec.n, spec.k);
    let q = int(BigInt::from(k).pow(k - 1)) * int(binomial(n - 1, k - 1)) / int(factorial(n - 1));
    PiMultiple::new(q, n)
}

/// `k^k A(k,n)`, the factor converting the phase variable `v(0)` into the
/// parameter `a`.
pub fn parameter_scale_exact(spec: ProblemSpec) -> PiMultiple {
    energy_constant_exact(spec).scale(&int(BigInt::from(spec.k).pow(spec.k)))
}

/// `theta = (n-k) / (n(k+1))`, the ratio `c2/c1` of the improved bound.
pub fn improvement_ratio(spec: ProblemSpec) -> f64 {
    spec.codim() as f64 / (spec.nf() * (spec.kf() + 1.0))
}

/// `1 - theta + theta log theta`, with the `theta = 0` limit equal to 1.
pub fn improvement_factor(spec: ProblemSpec) -> f64 {
    let theta = improvement_ratio(spec);
    if theta == 0.0 {
        1.0
    } else {
        1.0 - theta + theta * theta.ln()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// `None` encodes the `+inf` sentinel (`k = n`).
    pub gamma: Option<f64>,
    /// Sharp Monge-Ampere threshold, present only for `k = n`.
    pub a0: Option<f64>,
    pub alpha1: f64,
    pub alpha2: f64,
    /// Spiral-centre parameter, absent for `k = n`.
    pub beta: Option<f64>,
}

impl Thresholds {
    pub fn gamma_exponent(spec: ProblemSpec) -> Exponent {
        critical_exponent(spec)
    }
}

pub fn thresholds(spec: ProblemSpec) -> Thresholds {
    let gamma = critical_exponent(spec);
    let alpha1 = alpha1_exact(spec).to_f64();
    if spec.is_monge_ampere() {
        let a0 = a0_exact(spec.n).to_f64();
        return Thresholds {
            gamma: None,
            a0: Some(a0),
            alpha1,
            alpha2: alpha1,
            beta: None,
        };
    }
    Thresholds {
        gamma: Some(gamma.to_f64()),
        a0: None,
        alpha1,
        alpha2: alpha1 * improvement_factor(spec).powi(spec.k as i32),
        beta: Some(beta_exact(spec).to_f64()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquilibriumKind {
    /// `k = n`: no interior equilibrium, the system integrates explicitly.
    Integrable,
    /// `0 < n-k < 4`.
    Spiral,
    /// `n-k = 4`.
    DegenerateNode,
    /// `n-k > 4`.
    Node,
}

impl fmt::Display for EquilibriumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EquilibriumKind::Integrable => "integrable",
            EquilibriumKind::Spiral => "spiral",
            EquilibriumKind::DegenerateNode => "degenerate-node",
            EquilibriumKind::Node => "node",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Linearization {
    /// `(k-n + sqrt(disc)) / 2`, the slower eigenvalue.
    pub eig1: Complex64,
    pub eig2: Complex64,
    pub kind: EquilibriumKind,
    /// `[(-eig2)^-1, (-eig1)^-1]`, defined for `n-k >= 4`.
    pub b_range: Option<(f64, f64)>,
}

pub fn equilibrium_linearization(spec: ProblemSpec) -> Linearization {
    let c = spec.codim() as f64;
    if spec.is_monge_ampere() {
        return Linearization {
            eig1: Complex64::zero(),
            eig2: Complex64::zero(),
            kind: EquilibriumKind::Integrable,
            b_range: None,
        };
    }
    // trace k-n, determinant n-k
    let disc = c * c - 4.0 * c;
    let root = Complex64::new(disc, 0.0).sqrt();
    let half_trace = Complex64::new(-c / 2.0, 0.0);
    let eig1 = half_trace + root / 2.0;
    let eig2 = half_trace - root / 2.0;
    let kind = match spec.codim() {
        1..=3 => EquilibriumKind::Spiral,
        4 => EquilibriumKind::DegenerateNode,
        _ => EquilibriumKind::Node,
    };
    let b_range = (spec.codim() >= 4).then(|| (-1.0 / eig2.re, -1.0 / eig1.re));
    Linearization {
        eig1,
        eig2,
        kind,
        b_range,
    }
}

/// Coefficient `n/(p+1) - (n-k)/(k+1)` of the power-case Pohozaev identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerCoefficient {
    pub coefficient: f64,
    /// Set iff the coefficient is `<= 0`, equivalently `p >= gamma(k,n)`.
    pub nonexistence: bool,
}

pub fn pohozaev_power_coefficient(spec: ProblemSpec, p: f64) -> Result<PowerCoefficient> {
    if !(p > 0.0) || !p.is_finite() {
        return invalid(format!("exponent p must be positive and finite, got {p}"));
    }
    let pq = BigRational::from_float(p).expect("finite");
    let coeff = int(spec.n) / (pq + BigRational::one()) - rational(spec.codim(), spec.k + 1);
    let nonexistence = !spec.is_monge_ampere() && coeff <= BigRational::zero();
    debug_assert_eq!(nonexistence, critical_exponent(spec).at_most(p));
    Ok(PowerCoefficient {
        coefficient: rational_to_f64(&coeff),
        nonexistence,
    })
}

/// Moser-Trudinger constants of the real `k = d/2` Hessian problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealMtConstants {
    pub d: u32,
    pub k: u32,
    #[serde(rename = "D")]
    pub big_d: f64,
    pub p0: f64,
    #[serde(rename = "E")]
    pub e: f64,
    pub q0: f64,
    /// Closed form `(d+2)^{d/2} (2/d) C(d-1, d/2-1) omega_{d-1}`.
    pub alpha_tilde: f64,
    /// `(E (k+1))^{-1}` evaluated from `D`, `p0`, `q0`.
    pub alpha_tilde_from_e: f64,
    pub identity_residual: f64,
}

/// `alpha~(k,d) = ((k+1)d)^k C(d-1,k-1) omega_{d-1} / k^{k+1}`, exactly.
pub fn real_alpha_tilde_exact(k: u32, d: u32) -> Result<PiMultiple> {
    if k < 1 || k >= d {
        return invalid(format!("need 1 <= k < d, got k = {k}, d = {d}"));
    }
    let q = int(BigInt::from((k + 1) * d).pow(k)) * int(binomial(d - 1, k - 1))
        / int(BigInt::from(k).pow(k + 1));
    Ok(sphere_volume_exact(d)?.scale(&q))
}

pub fn moser_trudinger(d: u32) -> Result<RealMtConstants> {
    if d < 2 || d % 2 != 0 {
        return invalid(format!("Moser-Trudinger constants need even d >= 2, got {d}"));
    }
    let k = d / 2;
    let df = d as f64;
    let omega = sphere_volume_exact(d)?.to_f64();
    let big_d = df * (omega / k as f64 * binomial_f64(d - 1, k - 1)).powf(2.0 / df);
    let p0 = (df + 2.0) / df;
    let q0 = df / 2.0 + 1.0;
    let e = (big_d * p0).powf(-q0 / p0) / q0;
    let alpha_tilde_from_e = 1.0 / (e * (k as f64 + 1.0));
    // (d+2)^{d/2} (2/d) C(d-1, d/2-1) omega_{d-1}
    let closed = sphere_volume_exact(d)?.scale(
        &(int(BigInt::from(d + 2).pow(k)) * rational(2, d) * int(binomial(d - 1, k - 1))),
    );
    let alpha_tilde = closed.to_f64();
    let identity_residual = ((alpha_tilde - alpha_tilde_from_e) / alpha_tilde).abs();
    Ok(RealMtConstants {
        d,
        k,
        big_d,
        p0,
        e,
        q0,
        alpha_tilde,
        alpha_tilde_from_e,
        identity_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn spec(n: u32, k: u32) -> ProblemSpec {
        ProblemSpec::new(n, k).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(ProblemSpec::new(3, 0).is_err());
        assert!(ProblemSpec::new(3, 4).is_err());
        assert!(ProblemSpec::new(65, 1).is_err());
        assert!(ProblemSpec::new(1, 1).is_ok());
    }

    #[test]
    fn critical_exponent_examples() {
        assert_eq!(critical_exponent(spec(2, 1)), Exponent::Finite(rational(3, 1)));
        // (n+1)k/(n-k) = 14/4
        assert_eq!(critical_exponent(spec(6, 2)), Exponent::Finite(rational(7, 2)));
        for n in 1..=12 {
            assert!(critical_exponent(spec(n, n)).is_infinite());
        }
    }

    #[test]
    fn critical_exponent_matches_real_case() {
        for n in 2..=12 {
            for k in 1..n {
                assert_eq!(
                    critical_exponent(spec(n, k)),
                    real_critical_exponent(k, 2 * n).unwrap()
                );
            }
        }
        // k = n sits in the d/2 <= k < d branch
        assert!(real_critical_exponent(4, 8).unwrap().is_infinite());
    }

    #[test]
    fn a0_examples() {
        let t = thresholds(spec(1, 1));
        assert_eq!(a0_exact(1), PiMultiple::new(rational(2, 1), 1));
        assert_relative_eq!(t.a0.unwrap(), 2.0 * PI, max_relative = 1e-15);
        assert_eq!(a0_exact(2), PiMultiple::new(rational(9, 2), 2));
        let t = thresholds(spec(2, 2));
        assert_relative_eq!(t.a0.unwrap(), 4.5 * PI * PI, max_relative = 1e-15);
        assert_eq!(t.alpha1, t.alpha2);
        assert!(t.beta.is_none());
        assert!(t.gamma.is_none());
    }

    #[test]
    fn alpha2_improves_alpha1() {
        let t = thresholds(spec(6, 5));
        assert!(t.alpha2 < t.alpha1);
        for n in 2..=12 {
            for k in 1..n {
                let t = thresholds(spec(n, k));
                assert!(t.alpha2 < t.alpha1 && t.alpha2 > 0.0, "{n} {k}");
            }
        }
    }

    #[test]
    fn alpha1_two_routes_agree() {
        for n in 1..=12 {
            for k in 1..=n {
                assert_eq!(alpha1_exact(spec(n, k)), alpha1_via_levi_exact(spec(n, k)));
            }
        }
    }

    #[test]
    fn beta_is_k_pow_k_times_a() {
        for n in 2..=12 {
            for k in 1..n {
                assert_eq!(beta_exact(spec(n, k)), parameter_scale_exact(spec(n, k)));
            }
        }
    }

    #[test]
    fn alpha1_at_k_equals_n_is_a0() {
        for n in 1..=12 {
            assert_eq!(alpha1_exact(spec(n, n)), a0_exact(n));
        }
    }

    #[test]
    fn levi_ball_values() {
        for n in 1..=8 {
            assert_eq!(levi_ball(spec(n, 1), 1.0).unwrap(), 0.25);
        }
        // C(4,2) / (2^4 * 2^4)
        assert_relative_eq!(levi_ball(spec(5, 3), 2.0).unwrap(), 6.0 / 256.0);
        assert!(levi_ball(spec(5, 3), 0.0).is_err());
    }

    #[test]
    fn normalization_constants() {
        let c = NormalizationConstants::new(spec(3, 2));
        // omega_5 = pi^3, A = pi^3/4 * 2, B = pi^3/2
        assert_relative_eq!(c.omega, PI.powi(3), max_relative = 1e-15);
        assert_relative_eq!(c.a, PI.powi(3) / 2.0, max_relative = 1e-15);
        assert_relative_eq!(c.b, PI.powi(3) / 2.0, max_relative = 1e-15);
        assert_relative_eq!(c.levi_unit, 2.0 / 8.0);
    }

    /// Roots of x^2 - tr x + det by the quadratic formula in complex form.
    fn quadratic_roots(tr: f64, det: f64) -> (Complex64, Complex64) {
        let disc = Complex64::new(tr * tr - 4.0 * det, 0.0).sqrt();
        ((tr + disc) / 2.0, (tr - disc) / 2.0)
    }

    #[test]
    fn linearization_examples() {
        let l = equilibrium_linearization(spec(6, 2));
        assert_eq!(l.kind, EquilibriumKind::DegenerateNode);
        assert_eq!(l.eig1, Complex64::new(-2.0, 0.0));
        assert_eq!(l.eig2, Complex64::new(-2.0, 0.0));

        let l = equilibrium_linearization(spec(6, 3));
        assert_eq!(l.kind, EquilibriumKind::Spiral);
        let (r1, r2) = quadratic_roots(-3.0, 3.0);
        assert!((l.eig1 - r1).norm() < 1e-15 && (l.eig2 - r2).norm() < 1e-15);
        assert!((l.eig1 - Complex64::new(-1.5, 3f64.sqrt() / 2.0)).norm() < 1e-15);

        let l = equilibrium_linearization(spec(6, 1));
        assert_eq!(l.kind, EquilibriumKind::Node);
        assert_relative_eq!(l.eig1.re, (-5.0 + 5f64.sqrt()) / 2.0, max_relative = 1e-15);
        assert_relative_eq!(l.eig2.re, (-5.0 - 5f64.sqrt()) / 2.0, max_relative = 1e-15);
        let (lo, hi) = l.b_range.unwrap();
        assert!(lo < hi);

        assert_eq!(equilibrium_linearization(spec(4, 4)).kind, EquilibriumKind::Integrable);
    }

    #[test]
    fn linearization_trace_and_determinant() {
        for n in 2..=30 {
            for k in 1..n {
                let l = equilibrium_linearization(spec(n, k));
                let c = (n - k) as f64;
                assert!(((l.eig1 + l.eig2) - Complex64::new(-c, 0.0)).norm() <= 1e-14 * c);
                assert!(((l.eig1 * l.eig2) - Complex64::new(c, 0.0)).norm() <= 1e-14 * c * c);
                assert_eq!(l.kind == EquilibriumKind::Spiral, l.eig1.im != 0.0);
            }
        }
    }

    #[test]
    fn power_coefficient_examples() {
        let c = pohozaev_power_coefficient(spec(2, 1), 3.0).unwrap();
        assert_eq!(c.coefficient, 0.0);
        assert!(c.nonexistence);
        let c = pohozaev_power_coefficient(spec(2, 1), 2.0).unwrap();
        assert_relative_eq!(c.coefficient, 1.0 / 6.0, max_relative = 1e-15);
        assert!(!c.nonexistence);
        assert!(pohozaev_power_coefficient(spec(6, 2), 6.0).unwrap().nonexistence);
        assert!(pohozaev_power_coefficient(spec(6, 2), 0.0).is_err());
        let c = pohozaev_power_coefficient(spec(3, 3), 1e6).unwrap();
        assert!(c.coefficient > 0.0 && !c.nonexistence);
    }

    #[test]
    fn power_flag_tracks_gamma_exactly() {
        let s = spec(6, 2);
        let g = 3.5;
        assert!(pohozaev_power_coefficient(s, g).unwrap().nonexistence);
        let below = f64::from_bits(g.to_bits() - 1);
        assert!(!pohozaev_power_coefficient(s, below).unwrap().nonexistence);
    }

    #[test]
    fn moser_trudinger_examples() {
        let mt = moser_trudinger(2).unwrap();
        assert_eq!(mt.p0, 2.0);
        assert_eq!(mt.q0, 2.0);
        assert_relative_eq!(mt.alpha_tilde, 8.0 * PI, max_relative = 1e-15);
        for d in (2..=16).step_by(2) {
            let mt = moser_trudinger(d).unwrap();
            assert!(mt.identity_residual < 1e-12, "d = {d}: {}", mt.identity_residual);
            let general = real_alpha_tilde_exact(d / 2, d).unwrap().to_f64();
            assert_relative_eq!(general, mt.alpha_tilde, max_relative = 1e-14);
        }
        assert!(moser_trudinger(3).is_err());
        assert!(moser_trudinger(0).is_err());
    }
}
