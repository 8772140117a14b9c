//! Dirichlet and Fejér kernels, and symmetric partial Fourier sums.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::RationalAngle;

/// Below this value of |sin(θ/2)| the closed forms give way to finite sums.
pub const SWITCH_THRESHOLD: f64 = 1e-6;

/// Constant in the Fejér decay bound F_n(θ) ≤ C / ((n+1)θ²).
pub const FEJER_C: f64 = PI * PI / 2.0;

/// D_n(θ) = 1/2 + Σ_{l=1}^{n} cos(lθ).
pub fn dirichlet(n: u64, theta: f64) -> f64 {
    let s = (theta / 2.0).sin();
    if s.abs() > SWITCH_THRESHOLD {
        ((n as f64 + 0.5) * theta).sin() / (2.0 * s)
    } else {
        dirichlet_cosine_sum(n, theta)
    }
}

/// Dirichlet kernel by direct summation of its cosines.
pub fn dirichlet_cosine_sum(n: u64, theta: f64) -> f64 {
    0.5 + (1..=n).map(|l| (l as f64 * theta).cos()).sum::<f64>()
}

/// F_n(θ) = (1/(n+1)) Σ_{l=0}^{n} D_l(θ).
pub fn fejer(n: u64, theta: f64) -> f64 {
    let s = (theta / 2.0).sin();
    if s.abs() > SWITCH_THRESHOLD {
        let r = ((n as f64 + 1.0) * theta / 2.0).sin() / (2.0 * s);
        2.0 / (n as f64 + 1.0) * r * r
    } else {
        fejer_cosine_sum(n, theta)
    }
}

/// Fejér kernel through its coefficients 1/2 + Σ (1 − l/(n+1)) cos(lθ).
pub fn fejer_cosine_sum(n: u64, theta: f64) -> f64 {
    let np1 = n as f64 + 1.0;
    let v = 0.5
        + (1..=n)
            .map(|l| (1.0 - l as f64 / np1) * (l as f64 * theta).cos())
            .sum::<f64>();
    v.max(0.0)
}

/// Upper envelope (π²/2)/((n+1)θ²) of the Fejér kernel on (0, π].
pub fn fejer_bound(n: u64, theta: f64) -> f64 {
    FEJER_C / ((n as f64 + 1.0) * theta * theta)
}

/// F_m(θ) for a big order, given m + 1, at an exact rational angle.
///
/// Both sines are evaluated after exact reduction of their arguments, so the
/// result keeps full double precision for orders with hundreds of digits.
pub fn fejer_huge(m_plus_one: &BigUint, theta: &RationalAngle) -> Result<f64> {
    if m_plus_one.is_zero() {
        return Err(Error::InvalidArgument("Fejér order m + 1 must be at least 1".into()));
    }
    if theta.is_zero() {
        return Ok(half_big(m_plus_one));
    }
    let s = theta.sin_half();
    let num = theta.sin_half_multiple(m_plus_one);
    Ok(fejer_from_sines(num, s, two_over(m_plus_one)))
}

/// D_m(θ) for a big order, given 2m + 1, at an exact rational angle.
pub fn dirichlet_huge(two_m_plus_one: &BigUint, theta: &RationalAngle) -> Result<f64> {
    if two_m_plus_one.is_zero() || !two_m_plus_one.bit(0) {
        return Err(Error::InvalidArgument("2m + 1 must be odd".into()));
    }
    if theta.is_zero() {
        return Ok(half_big(two_m_plus_one));
    }
    Ok(theta.sin_half_multiple(two_m_plus_one) / (2.0 * theta.sin_half()))
}

fn half_big(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY) / 2.0
}

/// 2/(m+1) · (num / (2s))² without overflowing on the intermediate factors.
pub(crate) fn fejer_from_sines(num: f64, s: f64, scale: Scale) -> f64 {
    let ratio = num / (2.0 * s);
    match scale {
        Scale::Direct(c) => c * ratio * ratio,
        Scale::Log(ln_c) => {
            if ratio == 0.0 {
                0.0
            } else {
                (ln_c + 2.0 * ratio.abs().ln()).exp()
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) enum Scale {
    Direct(f64),
    Log(f64),
}

/// 2/x as a plain double when representable, otherwise as its logarithm.
pub(crate) fn two_over(x: &BigUint) -> Scale {
    if x.bits() < 1000 {
        Scale::Direct(2.0 / x.to_f64().unwrap())
    } else {
        Scale::Log(std::f64::consts::LN_2 - ln_big(x))
    }
}

/// Natural logarithm of a big positive integer.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// A real even coefficient sequence c(−l) = c(l), truncated at a known degree.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffSeries {
    coeffs: Vec<f64>,
}

impl CoeffSeries {
    /// Coefficients c(0), c(1), ..., c(bound).
    pub fn from_nonnegative(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least the constant term");
        CoeffSeries { coeffs }
    }

    /// Build from signed degrees; every stored degree must match its mirror.
    pub fn from_map(map: &BTreeMap<i64, f64>) -> Result<Self> {
        let bound = map.keys().map(|k| k.unsigned_abs()).max().unwrap_or(0);
        let mut coeffs = vec![0.0; bound as usize + 1];
        for (&k, &v) in map {
            let mirror = map.get(&-k).copied().unwrap_or(0.0);
            if mirror != v {
                return Err(Error::AsymmetricSeries { degree: k });
            }
            coeffs[k.unsigned_abs() as usize] = v;
        }
        Ok(CoeffSeries { coeffs })
    }

    pub fn dirichlet(n: u64) -> Self {
        CoeffSeries { coeffs: vec![0.5; n as usize + 1] }
    }

    pub fn fejer(n: u64) -> Self {
        let np1 = n as f64 + 1.0;
        CoeffSeries {
            coeffs: (0..=n).map(|l| 0.5 * (1.0 - l as f64 / np1)).collect(),
        }
    }

    pub fn bound(&self) -> u64 {
        self.coeffs.len() as u64 - 1
    }

    pub fn coeff(&self, l: i64) -> f64 {
        self.coeffs.get(l.unsigned_abs() as usize).copied().unwrap_or(0.0)
    }

    /// Σ_{|l|≤n} c(l) e^{ilθ} = c(0) + 2 Σ_{l=1}^{n} c(l) cos(lθ).
    pub fn partial_sum(&self, n: u64, theta: f64) -> Result<f64> {
        if n > self.bound() {
            return Err(Error::TruncationExceeded {
                requested: n,
                available: self.bound(),
            });
        }
        // cosines by a rotation recurrence, re-anchored periodically
        let (s1, c1) = theta.sin_cos();
        let mut acc = 0.0;
        let (mut c, mut s) = (1.0f64, 0.0f64);
        for l in 1..=n as usize {
            if l % 256 == 0 {
                let (sl, cl) = (l as f64 * theta).sin_cos();
                c = cl;
                s = sl;
            } else {
                let nc = c * c1 - s * s1;
                s = s * c1 + c * s1;
                c = nc;
            }
            acc += self.coeffs[l] * c;
        }
        Ok(self.coeffs[0] + 2.0 * acc)
    }
}
