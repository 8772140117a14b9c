//! The K-block spectral density, its autocovariances at arbitrary lags, its
//! partial Fourier sums and the blockwise divergence certificates.
//!
//! Block k is the polynomial w_k(φ_{n_k}(c_k θ) − 1/2). It occupies the
//! frequencies c_k, 2c_k, ..., q_{n_k} c_k, and consecutive blocks never
//! overlap. All partial sums below are stated for 2π·f, whose Fourier
//! coefficients are the autocovariances themselves.

use std::f64::consts::PI;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{cos_pi_frac, cos_pi_residue, decimal_digits, mulmod, BigLag, RationalAngle};
use crate::hardy::{build_level_with, sample_angle, HardyLevel, Membership, Profile};
use crate::kernels::FEJER_C;
use crate::quad::{integrate_vec, AdaptiveOptions, QuadResult};

/// γ(0), the variance of the process.
pub const GAMMA0: f64 = 5.0;

/// Largest number of nonzero coefficients a partial sum may touch.
pub const PARTIAL_SUM_CAP: u64 = 10_000_000;

/// Slack allowed on the certificate inequality.
pub const CERTIFICATE_TOL: f64 = 1e-8;

/// Levels of the default chain.
pub const DEFAULT_LEVELS: [u64; 2] = [500, 10_000];

/// Binary digits used when a floating-point node is turned into an exact angle.
pub const NODE_BITS: u32 = 52;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpacingRule {
    /// c_1 = 1 and c_{k+1} the smallest odd integer above q_{n_k} c_k.
    Standard,
    /// One odd spacing per level.
    Explicit(Vec<BigLag>),
}

#[derive(Clone, Debug)]
pub struct Block {
    pub k: usize,
    pub level: HardyLevel,
    pub c: BigUint,
    pub weight: f64,
    /// Last frequency of the block, q_{n_k} c_k.
    pub end: BigUint,
}

/// One named predicate of the chain validity check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct BlockChain {
    blocks: Vec<Block>,
    profile: Profile,
    floor: f64,
    checks: Vec<Check>,
    printed: Vec<Check>,
}

/// γ(h) together with the block bookkeeping that produced it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AutocovRecord {
    pub lag: BigLag,
    pub value: f64,
    pub block: Option<usize>,
    pub r: Option<BigLag>,
}

/// Digest of a chain for run manifests.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainManifest {
    pub levels: Vec<u64>,
    pub profile: Profile,
    pub spacings: Vec<String>,
    pub c_digits: Vec<usize>,
    pub q_digits: Vec<usize>,
    pub weights: Vec<f64>,
    #[serde(rename = "M")]
    pub big_m: Vec<f64>,
    pub floor: f64,
    pub checks: Vec<Check>,
    pub printed_admissibility: Vec<Check>,
    pub notes: Vec<String>,
}

/// Result of testing one angle against block k's divergence set.
#[derive(Clone, Debug, PartialEq)]
pub enum Certificate {
    NotInE,
    Certified(CertificateData),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateData {
    pub j: usize,
    pub p: BigLag,
    /// S_p(φ_{n_k}, c_k θ).
    pub phi_sum: f64,
    /// w_k (S_p(φ_{n_k}, c_k θ) − 1/2), the block's contribution to 2π·S_{p c_k}(f, θ).
    pub block_sum: f64,
    /// w_k (M − 1/2).
    pub lower_bound: f64,
    /// Dirichlet part of S_p(φ_{n_k}, c_k θ).
    pub dirichlet_part: f64,
    /// Lower bound on |dirichlet_part| that holds on E_n for every profile.
    pub dirichlet_bound: f64,
    pub holds: bool,
}

pub fn build_chain(levels: &[u64], rule: SpacingRule) -> Result<BlockChain> {
    build_chain_with(levels, rule, Profile::Full)
}

pub fn build_chain_with(levels: &[u64], rule: SpacingRule, profile: Profile) -> Result<BlockChain> {
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::ChainInvalid("levels must be strictly increasing".into()));
    }
    if let SpacingRule::Explicit(cs) = &rule {
        if cs.len() != levels.len() {
            return Err(Error::ChainInvalid(format!(
                "{} spacings given for {} levels",
                cs.len(),
                levels.len()
            )));
        }
    }
    let built: Vec<HardyLevel> = levels
        .par_iter()
        .map(|&n| build_level_with(n, profile))
        .collect::<Result<_>>()?;
    let mut blocks: Vec<Block> = Vec::with_capacity(levels.len());
    for (i, level) in built.into_iter().enumerate() {
        let c = match &rule {
            SpacingRule::Explicit(cs) => cs[i].value().clone(),
            SpacingRule::Standard => match blocks.last() {
                None => BigUint::one(),
                Some(prev) => {
                    let mut c = &prev.end + 1u32;
                    if c.is_even() {
                        c += 1u32;
                    }
                    c
                }
            },
        };
        if c.is_zero() || c.is_even() {
            return Err(Error::ChainInvalid(format!("spacing c_{} = {} must be odd and positive", i + 1, c)));
        }
        let weight = 1.0 / (level.big_m() + FEJER_C).sqrt();
        let end = level.q_n() * &c;
        blocks.push(Block {
            k: i + 1,
            level,
            c,
            weight,
            end,
        });
    }

    let mut checks = Vec::new();
    for w in blocks.windows(2) {
        let ok = w[0].end < w[1].c;
        checks.push(Check {
            name: format!("non-overlap k={}", w[0].k),
            passed: ok,
            detail: format!("q_{{n_{}}} c_{} < c_{}", w[0].k, w[0].k, w[1].k),
        });
    }
    let mut printed = Vec::new();
    for b in &blocks {
        let limit = 10.0 / 2f64.powi(b.k as i32);
        checks.push(Check {
            name: format!("admissibility k={}", b.k),
            passed: b.weight.is_finite() && b.weight > 0.0 && b.weight < limit,
            detail: format!("1/sqrt(M + pi^2/2) = {:.6} < {}", b.weight, limit),
        });
        let v = 1.0 / (b.level.big_m() + FEJER_C);
        printed.push(Check {
            name: format!("printed admissibility k={}", b.k),
            passed: v < limit,
            detail: format!("1/(M + pi^2/2) = {:.6} < {}", v, limit),
        });
    }
    let floor = (GAMMA0 - 0.5 * blocks.iter().map(|b| b.weight).sum::<f64>()) / (2.0 * PI);
    checks.push(Check {
        name: "positive floor".into(),
        passed: floor > 0.0,
        detail: format!("(5 - sum w_k / 2) / (2 pi) = {floor:.12}"),
    });
    if let Some(bad) = checks.iter().find(|c| !c.passed) {
        return Err(Error::ChainInvalid(format!("{} failed: {}", bad.name, bad.detail)));
    }
    Ok(BlockChain {
        blocks,
        profile,
        floor,
        checks,
        printed,
    })
}

/// The two-level chain (500, 10000) with c_1 = 1 and c_2 = q_{500} + 2.
pub fn default_chain() -> Result<BlockChain> {
    build_chain(&DEFAULT_LEVELS, SpacingRule::Standard)
}

impl BlockChain {
    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    pub fn profile(&self) -> Profile {
        self.profile
    }

    pub fn block(&self, k: usize) -> Result<&Block> {
        if k == 0 || k > self.blocks.len() {
            return Err(Error::IndexOutOfRange {
                index: k,
                max: self.blocks.len(),
            });
        }
        Ok(&self.blocks[k - 1])
    }

    /// (5 − Σ w_k / 2)/(2π), the minimum of the density.
    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn checks(&self) -> &[Check] {
        &self.checks
    }

    /// The admissibility predicate without the square root, reported only.
    pub fn printed_admissibility(&self) -> &[Check] {
        &self.printed
    }

    pub fn manifest(&self) -> ChainManifest {
        let mut notes = vec![
            "admissibility uses 1/sqrt(M + pi^2/2) < 10/2^k; the form without the square root is listed separately"
                .to_string(),
            "in-block autocovariances use r = h / c_k inside the coefficient".to_string(),
        ];
        if self.printed.iter().any(|c| !c.passed) {
            notes.push("the admissibility form without the square root fails for this chain".into());
        }
        if self.blocks.iter().any(|b| b.level.big_m() < 0.0) {
            notes.push("some level has M_n < 0".into());
        }
        ChainManifest {
            levels: self.blocks.iter().map(|b| b.level.n()).collect(),
            profile: self.profile,
            spacings: self.blocks.iter().map(|b| b.c.to_string()).collect(),
            c_digits: self.blocks.iter().map(|b| decimal_digits(&b.c)).collect(),
            q_digits: self.blocks.iter().map(|b| decimal_digits(b.level.q_n())).collect(),
            weights: self.blocks.iter().map(|b| b.weight).collect(),
            big_m: self.blocks.iter().map(|b| b.level.big_m()).collect(),
            floor: self.floor,
            checks: self.checks.clone(),
            printed_admissibility: self.printed.clone(),
            notes,
        }
    }

    /// Block containing frequency h, i.e. with c_k ≤ h ≤ q_{n_k} c_k.
    pub fn locate(&self, h: &BigUint) -> Option<&Block> {
        let i = self.blocks.partition_point(|b| b.end < *h);
        self.blocks.get(i).filter(|b| b.c <= *h)
    }

    pub fn gamma(&self, h: &BigUint) -> AutocovRecord {
        let lag = BigLag::new(h.clone());
        if h.is_zero() {
            return AutocovRecord {
                lag,
                value: GAMMA0,
                block: None,
                r: None,
            };
        }
        match self.locate(h) {
            None => AutocovRecord {
                lag,
                value: 0.0,
                block: None,
                r: None,
            },
            Some(b) => {
                let (r, rem) = h.div_rem(&b.c);
                if !rem.is_zero() {
                    return AutocovRecord {
                        lag,
                        value: 0.0,
                        block: Some(b.k),
                        r: None,
                    };
                }
                let value = b.weight * b.level.phi_coeff(&r);
                AutocovRecord {
                    lag,
                    value,
                    block: Some(b.k),
                    r: Some(BigLag::new(r)),
                }
            }
        }
    }

    /// γ(h) for a signed lag; negative lags are refused.
    pub fn gamma_signed(&self, h: &BigInt) -> Result<AutocovRecord> {
        match h.to_biguint() {
            Some(u) => Ok(self.gamma(&u)),
            None => Err(Error::InvalidArgument(format!("lag {h} is negative"))),
        }
    }

    pub fn gamma_value(&self, h: u64) -> f64 {
        self.gamma(&BigUint::from(h)).value
    }

    /// f̂(h) = γ(h)/(2π).
    pub fn fhat(&self, h: &BigUint) -> f64 {
        self.gamma(h).value / (2.0 * PI)
    }

    /// f(θ) = (1/2π)(5 − Σ w_k/2 + Σ w_k φ_{n_k}(c_k θ)).
    pub fn density_eval(&self, theta: &RationalAngle) -> f64 {
        let mut s = GAMMA0;
        for b in &self.blocks {
            let psi = theta.scale(&b.c);
            s += b.weight * (b.level.phi_eval(&psi) - 0.5);
        }
        s / (2.0 * PI)
    }

    /// Density at a floating-point angle, through its nearest dyadic rational.
    pub fn density_at(&self, theta: f64) -> f64 {
        self.density_eval(&RationalAngle::from_radians(theta, NODE_BITS))
    }

    /// Number of nonzero-frequency terms up to N, block by block.
    pub fn contributing_terms(&self, n: &BigUint) -> Vec<BigUint> {
        self.blocks
            .iter()
            .map(|b| (n / &b.c).min(b.level.q_n().clone()))
            .collect()
    }

    /// S_N(f, θ) = f̂(0) + 2 Σ_{h=1}^{N} f̂(h) cos(hθ), summed over block multiples only.
    pub fn partial_fourier_sum_f(&self, n: &BigUint, theta: &RationalAngle) -> Result<f64> {
        let counts = self.contributing_terms(n);
        let total: BigUint = counts.iter().sum();
        if total > BigUint::from(PARTIAL_SUM_CAP) {
            return Err(Error::TooManyTerms {
                needed: total.to_string(),
                cap: PARTIAL_SUM_CAP,
            });
        }
        let mut s = GAMMA0;
        for (b, count) in self.blocks.iter().zip(&counts) {
            let count = count.to_u64().unwrap();
            if count == 0 {
                continue;
            }
            let psi = theta.scale(&b.c);
            s += 2.0 * b.weight * block_cosine_sum(&b.level, count, &psi);
        }
        Ok(s / (2.0 * PI))
    }

    /// Closed form of S_N(f, θ) at N = q_{n_k} c_k (k ≥ 1) or N = 0 (k = 0).
    pub fn block_boundary_sum(&self, k: usize, theta: &RationalAngle) -> Result<f64> {
        if k > self.blocks.len() {
            return Err(Error::IndexOutOfRange {
                index: k,
                max: self.blocks.len(),
            });
        }
        let mut s = GAMMA0;
        for b in &self.blocks[..k] {
            s += b.weight * (b.level.phi_eval(&theta.scale(&b.c)) - 0.5);
        }
        Ok(s / (2.0 * PI))
    }

    /// Last frequency of block k, or 0 for k = 0.
    pub fn boundary(&self, k: usize) -> BigUint {
        if k == 0 {
            BigUint::zero()
        } else {
            self.blocks[k - 1].end.clone()
        }
    }

    /// Tests c_k θ against E_{n_k} and, inside, evaluates the block partial sum.
    pub fn divergence_certificate(&self, k: usize, theta: &RationalAngle) -> Result<Certificate> {
        let b = self.block(k)?;
        // c_k is odd, so reducing c_k θ mod 2π keeps its class in E_{n_k}
        let psi = theta.scale(&b.c);
        let (j, p) = match b.level.omega_membership(&psi) {
            Membership::Outside => return Ok(Certificate::NotInE),
            Membership::Inside { j, p } => (j, p),
        };
        let plus = b.level.truncated_parts(j, &psi, 1)?;
        let minus = b.level.truncated_parts(j, &psi, -1)?;
        let phi_sum = 0.5 * (plus.total() + minus.total());
        let dirichlet_part = 0.5 * (plus.dirichlet + minus.dirichlet);
        let m = certificate_m(&b.level);
        let block_sum = b.weight * (phi_sum - 0.5);
        let lower_bound = b.weight * (m - 0.5);
        Ok(Certificate::Certified(CertificateData {
            j,
            p,
            phi_sum,
            block_sum,
            lower_bound,
            dirichlet_part,
            dirichlet_bound: b.level.dirichlet_part_bound(),
            holds: block_sum.abs() >= lower_bound - CERTIFICATE_TOL,
        }))
    }

    /// ∫_{−π}^{π} log f(θ) dθ by the equal-weight midpoint rule on `grid` points.
    pub fn log_integral(&self, grid: usize) -> Result<f64> {
        if grid < 16 {
            return Err(Error::InvalidArgument(format!("grid {grid} is below 16")));
        }
        let sum: f64 = midpoint_grid(grid)
            .into_par_iter()
            .map(|t| self.density_eval(&t).ln())
            .collect::<Vec<_>>()
            .iter()
            .sum();
        Ok(sum * 2.0 * PI / grid as f64)
    }

    /// ∫ f(θ) cos(hθ) dθ over (−π, π] for h = 0..=max_h, which should equal γ(h).
    pub fn fourier_coefficients_quadrature(&self, max_h: usize, opts: &AdaptiveOptions) -> QuadResult<Vec<f64>> {
        integrate_vec(
            |t, out: &mut [f64]| {
                let f = self.density_at(t);
                for (h, o) in out.iter_mut().enumerate() {
                    *o = f * (h as f64 * t).cos();
                }
            },
            max_h + 1,
            -PI,
            PI,
            opts,
        )
    }

    /// Resolves a decimal lag or one of the aliases cK, qnK, qnKcK.
    pub fn resolve_lag(&self, s: &str) -> Result<BigUint> {
        let t = s.trim();
        if let Some(rest) = t.strip_prefix("qn") {
            if let Some((a, b)) = rest.split_once('c') {
                let (ka, kb) = (parse_index(a, s)?, parse_index(b, s)?);
                if ka != kb {
                    return Err(Error::InvalidArgument(format!("alias `{s}` mixes blocks")));
                }
                return Ok(self.block(ka)?.end.clone());
            }
            let k = parse_index(rest, s)?;
            return Ok(self.block(k)?.level.q_n().clone());
        }
        if let Some(rest) = t.strip_prefix('c') {
            let k = parse_index(rest, s)?;
            return Ok(self.block(k)?.c.clone());
        }
        if t.starts_with('-') {
            return Err(Error::InvalidArgument(format!("lag {t} is negative")));
        }
        Ok(t.parse::<BigLag>()?.into_inner())
    }
}

/// M used on the right-hand side of a certificate: M_n for full
/// levels, and for mini levels the Dirichlet-part bound M_n + π²/2, since the
/// Fejér constant does not apply to their small degrees.
pub fn certificate_m(level: &HardyLevel) -> f64 {
    match level.profile() {
        Profile::Full => level.big_m(),
        Profile::Mini => level.dirichlet_part_bound(),
    }
}

fn parse_index(s: &str, whole: &str) -> Result<usize> {
    s.parse::<usize>()
        .map_err(|_| Error::InvalidArgument(format!("unknown lag alias `{whole}`")))
}

/// Σ_{r=1}^{count} φ̂_n(r) cos(rψ), with each cosine reduced exactly.
fn block_cosine_sum(level: &HardyLevel, count: u64, psi: &RationalAngle) -> f64 {
    const CHUNK: u64 = 4096;
    let chunks = count.div_ceil(CHUNK);
    let fast = match (psi.numer().to_i64(), psi.denom().to_u64()) {
        (Some(p), Some(q)) if q <= u64::MAX / 8 => Some((p, q)),
        _ => None,
    };
    let parts: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK + 1;
            let hi = ((c + 1) * CHUNK).min(count);
            let mut acc = 0.0;
            for r in lo..=hi {
                let coeff = level.phi_coeff(&BigUint::from(r));
                let cos = match fast {
                    Some((p, q)) => {
                        let two_q = 2 * q;
                        let pm = (p as i128).rem_euclid(two_q as i128) as u64;
                        cos_pi_residue(mulmod(r % two_q, pm, two_q), q)
                    }
                    None => cos_pi_frac(&(psi.numer() * BigInt::from(r)), psi.denom()),
                };
                acc += coeff * cos;
            }
            acc
        })
        .collect();
    parts.iter().sum()
}

/// Midpoints π(2i + 1 − G)/G, i = 0..G, of a uniform grid on (−π, π).
pub fn midpoint_grid(grid: usize) -> Vec<RationalAngle> {
    (0..grid)
        .map(|i| {
            RationalAngle::new(
                BigInt::from(2 * i as i64 + 1 - grid as i64),
                BigUint::from(grid),
            )
            .expect("positive denominator")
        })
        .collect()
}

/// Midpoint grid for density tables; refuses G = 0.
pub fn density_grid(grid: usize) -> Result<Vec<RationalAngle>> {
    if grid == 0 {
        return Err(Error::InvalidArgument("grid must be positive".into()));
    }
    Ok(midpoint_grid(grid))
}

/// Certificates for `samples` uniform angles on the dyadic sampling grid.
#[derive(Clone, Debug)]
pub struct DivergenceScan {
    pub k: usize,
    pub seed: u64,
    pub rows: Vec<(RationalAngle, Certificate)>,
}

impl DivergenceScan {
    pub fn in_e(&self) -> impl Iterator<Item = &CertificateData> {
        self.rows.iter().filter_map(|(_, c)| match c {
            Certificate::Certified(d) => Some(d),
            Certificate::NotInE => None,
        })
    }

    pub fn in_e_count(&self) -> usize {
        self.in_e().count()
    }

    pub fn in_e_fraction(&self) -> f64 {
        self.in_e_count() as f64 / self.rows.len() as f64
    }

    /// Fraction of in-E points satisfying the certificate; 1 when there are none.
    pub fn holds_fraction(&self) -> f64 {
        let n = self.in_e_count();
        if n == 0 {
            return 1.0;
        }
        self.in_e().filter(|d| d.holds).count() as f64 / n as f64
    }

    /// Fraction of in-E points whose Dirichlet part reaches M_n + π²/2.
    pub fn dirichlet_fraction(&self) -> f64 {
        let n = self.in_e_count();
        if n == 0 {
            return 1.0;
        }
        self.in_e()
            .filter(|d| d.dirichlet_part.abs() >= d.dirichlet_bound - CERTIFICATE_TOL)
            .count() as f64
            / n as f64
    }
}

impl BlockChain {
    pub fn divergence_scan(&self, k: usize, samples: usize, seed: u64) -> Result<DivergenceScan> {
        self.block(k)?;
        if samples == 0 {
            return Err(Error::InvalidArgument("samples must be at least 1".into()));
        }
        let rows = (0..samples as u64)
            .into_par_iter()
            .map(|i| {
                let t = sample_angle(seed, i);
                self.divergence_certificate(k, &t).map(|c| (t, c))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DivergenceScan { k, seed, rows })
    }
}

impl AutocovRecord {
    pub fn sign(&self) -> Sign {
        if self.value > 0.0 {
            Sign::Plus
        } else if self.value < 0.0 {
            Sign::Minus
        } else {
            Sign::NoSign
        }
    }
}
