//! Exact Gaussian simulation through the Toeplitz covariance, and the
//! empirical autocovariances of the simulated batch.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{fill_standard_normal, substream, NORMAL_METHOD};
use crate::spectral::BlockChain;

/// Largest order factorized with dense Cholesky.
pub const CHOLESKY_CAP: usize = 5000;

/// Largest order accepted by the Durbin–Levinson path.
pub const LEVINSON_CAP: usize = 10_000;

/// Default bound on length × count.
pub const DEFAULT_MEMORY_BUDGET: usize = 50_000_000;

/// |z| above which a comparison row is flagged.
pub const Z_FLAG: f64 = 4.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    #[default]
    Cholesky,
    Levinson,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Centering {
    #[default]
    KnownZeroMean,
    SampleMean,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub length: usize,
    pub count: usize,
    pub seed: u64,
    pub jitter: f64,
    pub method: Method,
    pub memory_budget: usize,
}

impl SimConfig {
    pub fn new(length: usize, count: usize, seed: u64) -> Self {
        SimConfig {
            length,
            count,
            seed,
            jitter: 0.0,
            method: Method::Cholesky,
            memory_budget: DEFAULT_MEMORY_BUDGET,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.length == 0 {
            return Err(Error::InvalidConfig("length must be at least 1".into()));
        }
        if self.count == 0 {
            return Err(Error::InvalidConfig("count must be at least 1".into()));
        }
        if self.jitter.is_nan() || self.jitter < 0.0 || self.jitter.is_infinite() {
            return Err(Error::InvalidConfig(format!("jitter {} must be finite and nonnegative", self.jitter)));
        }
        let cells = self.length.saturating_mul(self.count);
        if cells > self.memory_budget {
            return Err(Error::SizeLimit {
                requested: cells,
                limit: self.memory_budget,
            });
        }
        let cap = match self.method {
            Method::Cholesky => CHOLESKY_CAP,
            Method::Levinson => LEVINSON_CAP,
        };
        if self.length > cap {
            return Err(Error::SizeLimit {
                requested: self.length,
                limit: cap,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryBatch {
    pub config: SimConfig,
    /// count rows of length values.
    pub samples: Vec<Vec<f64>>,
    pub factorization_note: String,
    pub normal_method: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmpiricalAcov {
    pub max_lag: usize,
    pub centering: Centering,
    pub count: usize,
    pub values: Vec<f64>,
    pub replicate_sd: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareRow {
    pub lag: usize,
    pub theoretical: f64,
    pub empirical_mean: f64,
    pub empirical_se: f64,
    pub z: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareReport {
    pub rows: Vec<CompareRow>,
    /// Lags with |z| > 4.
    pub flags: Vec<usize>,
    pub centering: Centering,
}

/// First row (γ(0), ..., γ(n − 1)) of the covariance matrix.
pub fn toeplitz_cov(chain: &BlockChain, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("matrix order must be at least 1".into()));
    }
    Ok((0..n as u64).into_par_iter().map(|h| chain.gamma_value(h)).collect())
}

/// Lower Cholesky factor of the symmetric Toeplitz matrix with first row `row`
/// plus `jitter` on the diagonal; row i holds L[i][0..=i].
pub fn cholesky_toeplitz(row: &[f64], jitter: f64) -> Result<Vec<Vec<f64>>> {
    let n = row.len();
    let mut l: Vec<Vec<f64>> = (0..n).map(|i| vec![0.0; i + 1]).collect();
    for j in 0..n {
        let rest = &mut l[j..];
        let lj = &mut rest[0];
        let d = row[0] + jitter - dot(&lj[..j], &lj[..j]);
        if d.is_nan() || d <= 0.0 || d.is_infinite() {
            return Err(Error::NotPositiveDefinite(j + 1));
        }
        let piv = d.sqrt();
        lj[j] = piv;
        let (head, tail) = rest.split_at_mut(1);
        let lj = &head[0];
        tail.par_iter_mut().enumerate().for_each(|(off, li)| {
            let i = j + 1 + off;
            li[j] = (row[i - j] - dot(&li[..j], &lj[..j])) / piv;
        });
    }
    Ok(l)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Durbin–Levinson coefficients φ_{k,·} and one-step variances v_k, k = 0..n−1.
#[derive(Clone, Debug)]
pub struct Levinson {
    pub phi: Vec<Vec<f64>>,
    pub v: Vec<f64>,
}

pub fn levinson_durbin(row: &[f64], jitter: f64) -> Result<Levinson> {
    let n = row.len();
    let g = |h: usize| if h == 0 { row[0] + jitter } else { row[h] };
    let mut phi: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    phi.push(Vec::new());
    let v0 = g(0);
    if v0.is_nan() || v0 <= 0.0 {
        return Err(Error::NotPositiveDefinite(1));
    }
    v.push(v0);
    for k in 1..n {
        let prev = &phi[k - 1];
        let acc: f64 = (1..k).map(|j| prev[j - 1] * g(k - j)).sum();
        let kk = (g(k) - acc) / v[k - 1];
        let mut cur = Vec::with_capacity(k);
        for j in 1..k {
            cur.push(prev[j - 1] - kk * prev[k - j - 1]);
        }
        cur.push(kk);
        let vk = v[k - 1] * (1.0 - kk * kk);
        if vk.is_nan() || vk <= 0.0 || vk.is_infinite() {
            return Err(Error::NotPositiveDefinite(k + 1));
        }
        phi.push(cur);
        v.push(vk);
    }
    Ok(Levinson { phi, v })
}

enum Factor {
    Cholesky(Vec<Vec<f64>>),
    Levinson(Levinson),
}

impl Factor {
    fn build(row: &[f64], method: Method, jitter: f64) -> Result<Self> {
        Ok(match method {
            Method::Cholesky => Factor::Cholesky(cholesky_toeplitz(row, jitter)?),
            Method::Levinson => Factor::Levinson(levinson_durbin(row, jitter)?),
        })
    }

    /// L·z, where L is the lower Cholesky factor.
    fn apply(&self, z: &[f64]) -> Vec<f64> {
        match self {
            Factor::Cholesky(l) => l.iter().map(|li| dot(li, &z[..li.len()])).collect(),
            Factor::Levinson(lv) => {
                let n = z.len();
                let mut x = vec![0.0; n];
                for t in 0..n {
                    let pred: f64 = lv.phi[t].iter().enumerate().map(|(j, p)| p * x[t - 1 - j]).sum();
                    x[t] = pred + lv.v[t].sqrt() * z[t];
                }
                x
            }
        }
    }
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Cholesky => "cholesky",
        Method::Levinson => "levinson",
    }
}

pub fn simulate(chain: &BlockChain, config: &SimConfig) -> Result<TrajectoryBatch> {
    config.validate()?;
    let row = toeplitz_cov(chain, config.length)?;
    let name = method_name(config.method);
    let (factor, note) = match Factor::build(&row, config.method, 0.0) {
        Ok(f) => (f, name.to_string()),
        Err(e) if config.jitter == 0.0 => return Err(e),
        Err(_) => (
            Factor::build(&row, config.method, config.jitter)?,
            format!("{name}+jitter({:e})", config.jitter),
        ),
    };
    let samples = (0..config.count)
        .into_par_iter()
        .map(|i| {
            let mut z = vec![0.0; config.length];
            fill_standard_normal(&mut substream(config.seed, i as u64), &mut z);
            factor.apply(&z)
        })
        .collect();
    Ok(TrajectoryBatch {
        config: config.clone(),
        samples,
        factorization_note: note,
        normal_method: NORMAL_METHOD.to_string(),
    })
}

impl TrajectoryBatch {
    /// Wraps externally produced rows, e.g. for estimator checks.
    pub fn from_samples(samples: Vec<Vec<f64>>) -> Result<Self> {
        let length = samples.first().map_or(0, Vec::len);
        if samples.is_empty() || length == 0 || samples.iter().any(|s| s.len() != length) {
            return Err(Error::InvalidArgument("samples must be a nonempty rectangular matrix".into()));
        }
        Ok(TrajectoryBatch {
            config: SimConfig::new(length, samples.len(), 0),
            samples,
            factorization_note: "external".into(),
            normal_method: "external".into(),
        })
    }

    pub fn length(&self) -> usize {
        self.config.length
    }

    pub fn count(&self) -> usize {
        self.samples.len()
    }
}

/// γ̂(h) = (1/n) Σ_{t=1}^{n−h} X_t X_{t+h} for one path.
pub fn path_acov(x: &[f64], max_lag: usize, centering: Centering) -> Vec<f64> {
    let n = x.len();
    let mean = match centering {
        Centering::KnownZeroMean => 0.0,
        Centering::SampleMean => x.iter().sum::<f64>() / n as f64,
    };
    let y: Vec<f64> = x.iter().map(|v| v - mean).collect();
    (0..=max_lag)
        .map(|h| dot(&y[..n - h], &y[h..]) / n as f64)
        .collect()
}

pub fn empirical_acov(batch: &TrajectoryBatch, max_lag: usize, centering: Centering) -> Result<EmpiricalAcov> {
    if max_lag >= batch.length() {
        return Err(Error::InvalidArgument(format!(
            "max lag {max_lag} must be below the path length {}",
            batch.length()
        )));
    }
    let per: Vec<Vec<f64>> = batch
        .samples
        .par_iter()
        .map(|x| path_acov(x, max_lag, centering))
        .collect();
    let c = per.len() as f64;
    let mut values = vec![0.0; max_lag + 1];
    let mut replicate_sd = vec![0.0; max_lag + 1];
    for h in 0..=max_lag {
        let mean = per.iter().map(|r| r[h]).sum::<f64>() / c;
        values[h] = mean;
        if per.len() > 1 {
            let var = per.iter().map(|r| (r[h] - mean).powi(2)).sum::<f64>() / (c - 1.0);
            replicate_sd[h] = var.sqrt();
        }
    }
    Ok(EmpiricalAcov {
        max_lag,
        centering,
        count: per.len(),
        values,
        replicate_sd,
    })
}

impl EmpiricalAcov {
    /// Standard error of the replicate mean at lag h.
    pub fn se(&self, h: usize) -> f64 {
        self.replicate_sd[h] / (self.count as f64).sqrt()
    }
}

pub fn compare_report(chain: &BlockChain, batch: &TrajectoryBatch, max_lag: usize) -> Result<CompareReport> {
    compare_report_with(chain, batch, max_lag, Centering::KnownZeroMean)
}

pub fn compare_report_with(
    chain: &BlockChain,
    batch: &TrajectoryBatch,
    max_lag: usize,
    centering: Centering,
) -> Result<CompareReport> {
    let emp = empirical_acov(batch, max_lag, centering)?;
    let rows: Vec<CompareRow> = (0..=max_lag)
        .map(|h| {
            let theoretical = chain.gamma_value(h as u64);
            let se = emp.se(h);
            let diff = emp.values[h] - theoretical;
            let z = if se > 0.0 {
                diff / se
            } else if diff == 0.0 {
                0.0
            } else {
                diff.signum() * f64::INFINITY
            };
            CompareRow {
                lag: h,
                theoretical,
                empirical_mean: emp.values[h],
                empirical_se: se,
                z,
            }
        })
        .collect();
    let flags = rows.iter().filter(|r| r.z.is_nan() || r.z.abs() > Z_FLAG).map(|r| r.lag).collect();
    Ok(CompareReport { rows, flags, centering })
}
