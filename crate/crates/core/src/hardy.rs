//! Level-n construction: the angles A_l, the degree sequence m_l, the kernels
//! f_n and φ_n, their truncated Fourier sums and the divergence sets Ω_n, E_n.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, RwLock};

use astro_float::{BigFloat, Consts, RoundingMode};
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{decimal_digits, mod_u64, mulmod, ratio_to_f64, sin_pi_frac, sin_pi_residue, cos_pi_residue, BigLag, RationalAngle};
use crate::kernels::{fejer_from_sines, two_over, CoeffSeries, Scale, FEJER_C};
use crate::rng::substream;

pub const MIN_LEVEL: u64 = 50;

/// Largest degree for which a full coefficient series is materialized.
pub const SERIES_CAP: u64 = 10_000_000;

/// Bits of the dyadic grid used for Monte Carlo sampling of angles.
pub const SAMPLE_BITS: u32 = 40;

const RESIDUE_CACHE_LIMIT: usize = 64;

/// How the first degree m_1 is seeded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    /// m_1 is the smallest admissible integer above n⁴.
    Full,
    /// m_1 is the smallest admissible integer ≥ n, which keeps degrees small
    /// enough for brute-force coefficient sums.
    Mini,
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Full => write!(f, "full"),
            Profile::Mini => write!(f, "mini"),
        }
    }
}

#[derive(Debug)]
struct Residues {
    mp1: Vec<u64>,
    two_mp1: Vec<u64>,
}

#[derive(Default)]
struct ResidueCache(RwLock<HashMap<u64, Arc<Residues>>>);

/// All data of one level n.
pub struct HardyLevel {
    n: u64,
    profile: Profile,
    x: usize,
    modulus: u64,
    m: Vec<BigUint>,
    mp1: Vec<BigUint>,
    two_mp1: Vec<BigUint>,
    scale: Vec<Scale>,
    big_m: f64,
    log_n: f64,
    threshold: f64,
    omega_max_j: usize,
    cache: ResidueCache,
}

impl Clone for HardyLevel {
    fn clone(&self) -> Self {
        HardyLevel {
            n: self.n,
            profile: self.profile,
            x: self.x,
            modulus: self.modulus,
            m: self.m.clone(),
            mp1: self.mp1.clone(),
            two_mp1: self.two_mp1.clone(),
            scale: self.scale.clone(),
            big_m: self.big_m,
            log_n: self.log_n,
            threshold: self.threshold,
            omega_max_j: self.omega_max_j,
            cache: ResidueCache::default(),
        }
    }
}

impl fmt::Debug for HardyLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HardyLevel")
            .field("n", &self.n)
            .field("profile", &self.profile)
            .field("x_n", &self.x)
            .field("M_n", &self.big_m)
            .field("q_n_digits", &decimal_digits(self.q_n()))
            .finish()
    }
}

/// The open interval J_j = (A_j + 1/n², A_{j+1} − 1/n²), in radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LevelInterval {
    pub j: usize,
    pub lo: f64,
    pub hi: f64,
}

/// Serializable digest of a level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub n: u64,
    pub profile: Profile,
    pub x_n: usize,
    #[serde(rename = "M_n")]
    pub m_n: f64,
    pub m_digits: Vec<usize>,
    pub q_n_digits: usize,
}

/// Outcome of the Ω_n / E_n membership test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    Outside,
    Inside { j: usize, p: BigLag },
}

impl Membership {
    pub fn is_inside(&self) -> bool {
        matches!(self, Membership::Inside { .. })
    }
}

/// The three pieces of the closed form of S_{m_j}(f_n, ±θ), each divided by x_n.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncatedParts {
    pub fejer_low: f64,
    pub fejer_high: f64,
    pub dirichlet: f64,
}

impl TruncatedParts {
    pub fn total(&self) -> f64 {
        self.fejer_low + self.fejer_high + self.dirichlet
    }

    /// S minus the Dirichlet term; lies in [0, π²/2] inside the J intervals.
    pub fn fejer_part(&self) -> f64 {
        self.fejer_low + self.fejer_high
    }
}

/// x_n = ⌊((4n+1)/4)(1 − (ln n)^{−1/6})⌋, with an extended-precision guard
/// when the argument sits next to an integer.
pub fn x_of(n: u64) -> u64 {
    let u = (n as f64).ln().powf(-1.0 / 6.0);
    let arg = (4 * n + 1) as f64 / 4.0 * (1.0 - u);
    let r = arg.round();
    if (arg - r).abs() >= 1e-9 {
        return arg.floor() as u64;
    }
    let k = r as u64;
    let p = 256;
    let rm = RoundingMode::ToEven;
    let mut cc = Consts::new().expect("astro-float constants");
    let ln = BigFloat::from_u64(n, p).ln(p, rm, &mut cc);
    let sixth = BigFloat::from_u64(1, p).div(&BigFloat::from_u64(6, p), p, rm);
    let root = ln.pow(&sixth, p, rm, &mut cc);
    let one = BigFloat::from_u64(1, p);
    let t = one.sub(&one.div(&root, p, rm), p, rm);
    let a = BigFloat::from_u64(4 * n + 1, p)
        .div(&BigFloat::from_u64(4, p), p, rm)
        .mul(&t, p, rm);
    match BigFloat::from_u64(k, p).cmp(&a) {
        Some(c) if c <= 0 => k,
        _ => k - 1,
    }
}

/// Smallest m > seed with 2m + 1 ≡ 0 (mod modulus).
pub fn next_admissible(seed: &BigUint, modulus: u64) -> BigUint {
    let n = BigUint::from(modulus);
    let quotient = (seed * 2u32 + 1u32) / &n;
    let mut k = quotient + 1u32;
    if k.is_even() {
        k += 1u32;
    }
    (k * &n - 1u32) >> 1u32
}

pub fn build_level(n: u64) -> Result<HardyLevel> {
    build_level_with(n, Profile::Full)
}

pub fn build_level_with(n: u64, profile: Profile) -> Result<HardyLevel> {
    if n < MIN_LEVEL {
        return Err(Error::LevelTooSmall(n));
    }
    let x = x_of(n) as usize;
    let modulus = 4 * n + 1;
    let log_n = (n as f64).ln();
    let threshold = log_n.powf(-1.0 / 6.0);
    let big_m = (1.0 / (16.0 * PI * PI)) * (modulus as f64 / x as f64) * log_n.sqrt() - FEJER_C;

    let mut m = Vec::with_capacity(x);
    let first = match profile {
        Profile::Full => next_admissible(&BigUint::from(n).pow(4), modulus),
        // 2n is admissible, and 2n − (4n+1) < 0 < n
        Profile::Mini => BigUint::from(2 * n),
    };
    m.push(first);
    for l in 1..x {
        let seed: BigUint = &m[l - 1] << 1u32;
        m.push(next_admissible(&seed, modulus));
    }
    let omega_max_j = {
        let v = (x as f64 - (n as f64).sqrt()).floor();
        if v < 0.0 {
            0
        } else {
            v as usize
        }
    };
    let mp1: Vec<BigUint> = m.iter().map(|v| v + 1u32).collect();
    let two_mp1: Vec<BigUint> = m.iter().map(|v| (v << 1u32) + 1u32).collect();
    let scale = mp1.iter().map(two_over).collect();
    let level = HardyLevel {
        n,
        profile,
        x,
        modulus,
        m,
        mp1,
        two_mp1,
        scale,
        big_m,
        log_n,
        threshold,
        omega_max_j,
        cache: ResidueCache::default(),
    };
    level.verify()?;
    Ok(level)
}

impl HardyLevel {
    /// Re-checks every structural invariant with exact integer arithmetic.
    pub fn verify(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::LevelInvariant(msg));
        if self.x < 2 {
            return fail(format!("x_n = {} < 2", self.x));
        }
        if self.m.len() != self.x {
            return fail("degree sequence length differs from x_n".into());
        }
        let n_big = BigUint::from(self.n);
        let floor = match self.profile {
            Profile::Full => n_big.pow(4),
            Profile::Mini => n_big,
        };
        if self.m[0] < floor {
            return fail(format!("m_1 = {} below its seed {}", self.m[0], floor));
        }
        let modulus = BigUint::from(self.modulus);
        for (l, v) in self.m.iter().enumerate() {
            if !((v << 1u32) + 1u32).is_multiple_of(&modulus) {
                return fail(format!("2 m_{} + 1 is not a multiple of {}", l + 1, self.modulus));
            }
            if l > 0 && *v <= (&self.m[l - 1] << 1u32) {
                return fail(format!("m_{} <= 2 m_{}", l + 1, l));
            }
        }
        if (self.big_m + FEJER_C).is_nan() || self.big_m + FEJER_C <= 0.0 {
            return fail("M_n + pi^2/2 is not positive".into());
        }
        Ok(())
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn profile(&self) -> Profile {
        self.profile
    }

    pub fn x(&self) -> usize {
        self.x
    }

    /// 4n + 1.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn m_seq(&self) -> &[BigUint] {
        &self.m
    }

    /// m_l for 1 ≤ l ≤ x_n.
    pub fn m(&self, l: usize) -> &BigUint {
        &self.m[l - 1]
    }

    /// q_n = m_{x_n}, the degree of φ_n.
    pub fn q_n(&self) -> &BigUint {
        &self.m[self.x - 1]
    }

    pub fn big_m(&self) -> f64 {
        self.big_m
    }

    /// (ln n)^{−1/6}.
    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn log_n(&self) -> f64 {
        self.log_n
    }

    /// ⌊x_n − √n⌋, the last interval index admitted into Ω_n.
    pub fn omega_max_j(&self) -> usize {
        self.omega_max_j
    }

    /// Lower bound (1/(16π²))((4n+1)/x_n)√(ln n) on the Dirichlet part of
    /// S_{p_n(θ)}(φ_n, θ) over Ω_n; equals M_n + π²/2.
    pub fn dirichlet_part_bound(&self) -> f64 {
        self.big_m + FEJER_C
    }

    /// A_l = 4πl/(4n+1) as an exact angle.
    pub fn angle(&self, l: usize) -> RationalAngle {
        RationalAngle::level_angle(l as u64, self.modulus)
    }

    pub fn angle_radians(&self, l: usize) -> f64 {
        4.0 * PI * l as f64 / self.modulus as f64
    }

    pub fn interval(&self, j: usize) -> Result<LevelInterval> {
        if j == 0 || j >= self.x {
            return Err(Error::IndexOutOfRange { index: j, max: self.x - 1 });
        }
        let d = 1.0 / (self.n as f64 * self.n as f64);
        Ok(LevelInterval {
            j,
            lo: self.angle_radians(j) + d,
            hi: self.angle_radians(j + 1) - d,
        })
    }

    pub fn summary(&self) -> LevelSummary {
        LevelSummary {
            n: self.n,
            profile: self.profile,
            x_n: self.x,
            m_n: self.big_m,
            m_digits: self.m.iter().map(decimal_digits).collect(),
            q_n_digits: decimal_digits(self.q_n()),
        }
    }

    fn residues(&self, modulus: u64) -> Arc<Residues> {
        if let Some(r) = self.cache.0.read().unwrap().get(&modulus) {
            return r.clone();
        }
        let r = Arc::new(Residues {
            mp1: self.mp1.iter().map(|v| mod_u64(v, modulus)).collect(),
            two_mp1: self.two_mp1.iter().map(|v| mod_u64(v, modulus)).collect(),
        });
        let mut w = self.cache.0.write().unwrap();
        if w.len() >= RESIDUE_CACHE_LIMIT {
            w.clear();
        }
        w.insert(modulus, r.clone());
        r
    }

    fn frame(&self, theta: &RationalAngle) -> Frame {
        let modulus = self.modulus;
        if let (Some(q), Some(p)) = (theta.denom().to_u64(), theta.numer().to_i64()) {
            let four_q = 4u128 * q as u128 * modulus as u128;
            if four_q <= u64::MAX as u128 / 2 {
                let four_q = four_q as u64;
                let p_mod = (p as i128).rem_euclid(four_q as i128) as u64;
                return Frame::Fast {
                    four_q,
                    base: mulmod(p_mod, modulus, four_q),
                    step: 4 * q,
                    res: self.residues(four_q),
                };
            }
        }
        let q = BigInt::from_biguint(Sign::Plus, theta.denom().clone());
        Frame::Slow {
            base: theta.numer() * BigInt::from(modulus),
            step: q.clone() * 4,
            two_q: (theta.denom() * modulus) << 1u32,
        }
    }

    /// F_{m_l}(θ − A_l), with `plus` selecting θ + A_l instead.
    fn fejer_at(&self, frame: &Frame, l: usize, plus: bool) -> f64 {
        let t = frame.shift(l, plus);
        if frame.is_zero(&t) {
            return self.half_mp1(l);
        }
        let s = frame.sin_half(&t);
        let num = frame.sin_half_mul(self, &t, l, Mul::MPlusOne(l));
        fejer_from_sines(num, s, self.scale[l - 1])
    }

    fn half_mp1(&self, l: usize) -> f64 {
        self.mp1[l - 1].to_f64().unwrap_or(f64::INFINITY) / 2.0
    }

    /// f_n(θ) = (1/x_n) Σ_l F_{m_l}(θ − A_l).
    pub fn fn_eval(&self, theta: &RationalAngle) -> f64 {
        let frame = self.frame(theta);
        (1..=self.x).map(|l| self.fejer_at(&frame, l, false)).sum::<f64>() / self.x as f64
    }

    /// φ_n(θ) = (f_n(θ) + f_n(−θ))/2.
    pub fn phi_eval(&self, theta: &RationalAngle) -> f64 {
        let frame = self.frame(theta);
        let s: f64 = (1..=self.x)
            .map(|l| self.fejer_at(&frame, l, false) + self.fejer_at(&frame, l, true))
            .sum();
        s / (2.0 * self.x as f64)
    }

    /// Degree-r coefficient of φ_n.
    pub fn phi_coeff(&self, r: &BigUint) -> f64 {
        if r.is_zero() {
            return 0.5;
        }
        if r > self.q_n() {
            return 0.0;
        }
        let n = self.modulus;
        let rr = mod_u64(r, n);
        let r_small = r.to_u64();
        let mut acc = 0.0;
        for l in 1..=self.x {
            let m = &self.m[l - 1];
            if r > m {
                continue;
            }
            let weight = match (r_small, self.mp1[l - 1].to_u64()) {
                (Some(rs), Some(mp)) => (mp - rs) as f64 / mp as f64,
                (Some(rs), None) if self.mp1[l - 1].bits() > 80 => {
                    1.0 - rs as f64 * (1.0 / self.mp1[l - 1].to_f64().unwrap_or(f64::INFINITY))
                }
                _ => ratio_to_f64(&(&self.mp1[l - 1] - r), &self.mp1[l - 1]),
            };
            // cos(r A_l) = cos(2π·((2rl) mod N)/N)
            let t = mulmod(2 * rr % n, l as u64, n);
            acc += weight * cos_pi_residue(2 * t, n);
        }
        acc / (2.0 * self.x as f64)
    }

    /// Full coefficient series of φ_n; refused above `SERIES_CAP`.
    pub fn phi_series(&self) -> Result<CoeffSeries> {
        let q = self.q_n().to_u64().filter(|&q| q <= SERIES_CAP).ok_or_else(|| Error::TooManyTerms {
            needed: self.q_n().to_string(),
            cap: SERIES_CAP,
        })?;
        let coeffs = (0..=q)
            .into_par_iter()
            .map(|r| self.phi_coeff(&BigUint::from(r)))
            .collect();
        Ok(CoeffSeries::from_nonnegative(coeffs))
    }

    fn check_j(&self, j: usize) -> Result<()> {
        if j == 0 || j >= self.x {
            Err(Error::IndexOutOfRange { index: j, max: self.x - 1 })
        } else {
            Ok(())
        }
    }

    /// Closed form of S_{m_j}(f_n, sign·θ) split into its three sums.
    pub fn truncated_parts(&self, j: usize, theta: &RationalAngle, sign: i8) -> Result<TruncatedParts> {
        self.check_j(j)?;
        let t = if sign < 0 { theta.neg() } else { theta.clone() };
        let frame = self.frame(&t);
        let x = self.x as f64;
        let fejer_low: f64 = (1..=j).map(|l| self.fejer_at(&frame, l, false)).sum();
        let mut fejer_high = 0.0;
        let mut dirichlet = 0.0;
        let mj1 = &self.mp1[j - 1];
        for l in j + 1..=self.x {
            let ml1 = &self.mp1[l - 1];
            let ratio = ratio_to_f64(mj1, ml1);
            let sh = frame.shift(l, false);
            if frame.is_zero(&sh) {
                fejer_high += ratio * self.half_mp1(j);
                dirichlet += (1.0 - ratio) * (self.two_mp1[j - 1].to_f64().unwrap_or(f64::INFINITY) / 2.0);
                continue;
            }
            let s = frame.sin_half(&sh);
            // ((m_j+1)/(m_l+1))·F_{m_j} = (2/(m_l+1))·(sin((m_j+1)t/2)/(2 sin(t/2)))²
            let num = frame.sin_half_mul(self, &sh, l, Mul::MPlusOne(j));
            fejer_high += fejer_from_sines(num, s, self.scale[l - 1]);
            let dn = frame.sin_half_mul(self, &sh, l, Mul::TwoMPlusOne(j));
            dirichlet += (1.0 - ratio) * dn / (2.0 * s);
        }
        Ok(TruncatedParts {
            fejer_low: fejer_low / x,
            fejer_high: fejer_high / x,
            dirichlet: dirichlet / x,
        })
    }

    /// S_{m_j}(f_n, sign·θ) through the closed form.
    pub fn truncated_sum_closed(&self, j: usize, theta: &RationalAngle, sign: i8) -> Result<f64> {
        Ok(self.truncated_parts(j, theta, sign)?.total())
    }

    /// S_{m_j}(φ_n, θ) = (S_{m_j}(f_n, θ) + S_{m_j}(f_n, −θ))/2.
    pub fn phi_truncated_sum(&self, j: usize, theta: &RationalAngle) -> Result<f64> {
        Ok(0.5 * (self.truncated_sum_closed(j, theta, 1)? + self.truncated_sum_closed(j, theta, -1)?))
    }

    /// Index j with |θ| ∈ J_j, decided by exact rational comparison.
    ///
    /// The 1/n² margins are compared against a 40-digit rational enclosure of
    /// π; a margin too close to call is treated as outside.
    pub fn interval_of(&self, theta: &RationalAngle) -> Option<usize> {
        let a = theta.abs();
        let p = a.numer().magnitude().clone();
        let q = a.denom().clone();
        let n = BigUint::from(self.modulus);
        let pn = &p * &n;
        let four_q: BigUint = &q << 2u32;
        let j = (&pn / &four_q).to_usize()?;
        if j == 0 || j >= self.x {
            return None;
        }
        let left = &pn - &four_q * j;
        let right = &four_q * (j + 1) - &pn;
        let n2 = BigUint::from(self.n) * self.n;
        let rhs = &q * &n;
        if pi_times_exceeds(&(&left * &n2), &rhs) == Some(true)
            && pi_times_exceeds(&(&right * &n2), &rhs) == Some(true)
        {
            Some(j)
        } else {
            None
        }
    }

    /// Membership of |θ| in Ω_n, which is membership of θ in E_n.
    pub fn omega_membership(&self, theta: &RationalAngle) -> Membership {
        let a = theta.abs();
        if a.to_radians() < self.threshold {
            return Membership::Outside;
        }
        let j = match self.interval_of(&a) {
            Some(j) if j <= self.omega_max_j => j,
            _ => return Membership::Outside,
        };
        if self.sin_m_half_abs(j, &a) < self.threshold {
            return Membership::Outside;
        }
        Membership::Inside {
            j,
            p: BigLag::new(self.m[j - 1].clone()),
        }
    }

    /// |sin((m_j + 1/2)θ)| with exact reduction.
    pub fn sin_m_half_abs(&self, j: usize, theta: &RationalAngle) -> f64 {
        let p = theta.numer();
        let q = theta.denom();
        if let (Some(qq), Some(pp)) = (q.to_u64(), p.to_i64()) {
            if qq <= u64::MAX / 8 {
                let four_q = 4 * qq;
                let res = self.residues(four_q);
                let pm = (pp as i128).rem_euclid(four_q as i128) as u64;
                return sin_pi_residue(mulmod(res.two_mp1[j - 1], pm, four_q), 2 * qq).abs();
            }
        }
        let num = p * BigInt::from(self.two_mp1[j - 1].clone());
        sin_pi_frac(&num, &(q << 1u32)).abs()
    }

    /// Fraction-of-2π Monte Carlo estimate of m(E_n) on a dyadic grid.
    pub fn en_measure_estimate(&self, samples: usize, seed: u64) -> f64 {
        assert!(samples >= 1, "at least one sample");
        let inside = (0..samples)
            .into_par_iter()
            .filter(|&i| self.omega_membership(&sample_angle(seed, i as u64)).is_inside())
            .count();
        2.0 * PI * inside as f64 / samples as f64
    }

    /// Estimator applied to explicit angles.
    pub fn en_measure_from(&self, thetas: &[RationalAngle]) -> f64 {
        assert!(!thetas.is_empty());
        let inside = thetas.iter().filter(|t| self.omega_membership(t).is_inside()).count();
        2.0 * PI * inside as f64 / thetas.len() as f64
    }

    /// Per-interval lower bound 4π/N − 2/n² − (4π/N)(ln n)^{−1/6} on the
    /// measure of the points of J_j passing the sine condition.
    pub fn interval_mass_bound(&self) -> f64 {
        let a = 4.0 * PI / self.modulus as f64;
        a - 2.0 / (self.n as f64 * self.n as f64) - a * self.threshold
    }

    /// ⌊x_n − √n⌋ times the per-interval bound: a lower bound on m(Σ_n),
    /// the set before the restriction θ ≥ (ln n)^{−1/6}.
    pub fn sigma_lower_bound(&self) -> f64 {
        self.omega_max_j as f64 * self.interval_mass_bound()
    }

    /// Twice the Σ_n bound, clipped at 0.
    pub fn en_lower_bound_sigma(&self) -> f64 {
        2.0 * self.sigma_lower_bound().max(0.0)
    }

    /// Lower bound on m(E_n) that accounts for the cut θ ≥ (ln n)^{−1/6}:
    /// only intervals lying entirely above the cut are credited.
    pub fn en_lower_bound(&self) -> f64 {
        let b = self.interval_mass_bound();
        if b <= 0.0 {
            return 0.0;
        }
        let d = 1.0 / (self.n as f64 * self.n as f64);
        let credited = (1..=self.omega_max_j.min(self.x - 1))
            .filter(|&j| self.angle_radians(j) + d >= self.threshold)
            .count();
        let counted = 2.0 * credited as f64 * b;
        let shifted = 2.0 * (self.sigma_lower_bound() - self.threshold);
        counted.max(shifted).max(0.0)
    }
}

/// Uniform draw from the grid {πk/2^b : −2^b < k ≤ 2^b}.
pub fn sample_angle(seed: u64, index: u64) -> RationalAngle {
    let mut rng = substream(seed, index);
    let half = 1i64 << SAMPLE_BITS;
    let k = rng.random_range(0..2 * half) - half + 1;
    RationalAngle::new(BigInt::from(k), BigUint::one() << SAMPLE_BITS).expect("positive denominator")
}

const PI_DIGITS: &str = "31415926535897932384626433832795028841971";
const PI_SCALE_DIGITS: u32 = 40;

/// Whether π·a > b, using lo < π < hi with hi − lo = 10^−40; `None` if unresolved.
fn pi_times_exceeds(a: &BigUint, b: &BigUint) -> Option<bool> {
    let lo = BigUint::parse_bytes(PI_DIGITS.as_bytes(), 10).unwrap();
    let hi = &lo + 1u32;
    let scale = BigUint::from(10u32).pow(PI_SCALE_DIGITS);
    let rhs = b * &scale;
    if &lo * a > rhs {
        Some(true)
    } else if &hi * a <= rhs {
        Some(false)
    } else {
        None
    }
}

enum Frame {
    Fast {
        four_q: u64,
        base: u64,
        step: u64,
        res: Arc<Residues>,
    },
    Slow {
        base: BigInt,
        step: BigInt,
        two_q: BigUint,
    },
}

enum Shifted {
    Fast(u64),
    Slow(BigInt),
}

#[derive(Clone, Copy)]
enum Mul {
    MPlusOne(usize),
    TwoMPlusOne(usize),
}

impl Frame {
    /// θ ∓ A_l as π·P/Q with Q = q(4n+1), stored as P (reduced mod 4Q on the fast path).
    fn shift(&self, l: usize, plus: bool) -> Shifted {
        match self {
            Frame::Fast { four_q, base, step, .. } => {
                let d = mulmod(*step % *four_q, l as u64, *four_q);
                let v = if plus {
                    ((*base as u128 + d as u128) % *four_q as u128) as u64
                } else {
                    ((*base as u128 + *four_q as u128 - d as u128) % *four_q as u128) as u64
                };
                Shifted::Fast(v)
            }
            Frame::Slow { base, step, .. } => {
                let d = step * BigInt::from(l);
                Shifted::Slow(if plus { base + d } else { base - d })
            }
        }
    }

    /// Whether the shifted angle is a multiple of 2π.
    fn is_zero(&self, t: &Shifted) -> bool {
        match (self, t) {
            (Frame::Fast { four_q, .. }, Shifted::Fast(v)) => *v % (*four_q / 2) == 0,
            (Frame::Slow { two_q, .. }, Shifted::Slow(v)) => {
                let two_q = BigInt::from_biguint(Sign::Plus, two_q.clone());
                v.mod_floor(&two_q).is_zero()
            }
            _ => unreachable!(),
        }
    }

    fn sin_half(&self, t: &Shifted) -> f64 {
        match (self, t) {
            (Frame::Fast { four_q, .. }, Shifted::Fast(v)) => sin_pi_residue(*v, *four_q / 2),
            (Frame::Slow { two_q, .. }, Shifted::Slow(v)) => sin_pi_frac(v, two_q),
            _ => unreachable!(),
        }
    }

    /// sin(K·t/2) with K = m_i + 1 or 2m_i + 1.
    fn sin_half_mul(&self, level: &HardyLevel, t: &Shifted, _l: usize, mul: Mul) -> f64 {
        match (self, t) {
            (Frame::Fast { four_q, res, .. }, Shifted::Fast(v)) => {
                let k = match mul {
                    Mul::MPlusOne(i) => res.mp1[i - 1],
                    Mul::TwoMPlusOne(i) => res.two_mp1[i - 1],
                };
                sin_pi_residue(mulmod(k, *v, *four_q), *four_q / 2)
            }
            (Frame::Slow { two_q, .. }, Shifted::Slow(v)) => {
                let k = match mul {
                    Mul::MPlusOne(i) => &level.mp1[i - 1],
                    Mul::TwoMPlusOne(i) => &level.two_mp1[i - 1],
                };
                sin_pi_frac(&(v * BigInt::from(k.clone())), two_q)
            }
            _ => unreachable!(),
        }
    }
}
