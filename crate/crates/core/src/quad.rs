//! Composite Gauss–Legendre quadrature with panel doubling.

use rayon::prelude::*;
use serde::Serialize;

/// Nodes and weights of an n-point Gauss–Legendre rule on [−1, 1].
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Integral over [a, b] with the rule applied on `panels` equal sub-intervals.
    pub fn composite<F>(&self, f: &F, a: f64, b: f64, panels: usize) -> f64
    where
        F: Fn(f64) -> f64 + Sync,
    {
        let h = (b - a) / panels as f64;
        let parts: Vec<f64> = (0..panels)
            .into_par_iter()
            .map(|p| {
                let lo = a + h * p as f64;
                let mid = lo + 0.5 * h;
                self.nodes
                    .iter()
                    .zip(&self.weights)
                    .map(|(x, w)| w * f(mid + 0.5 * h * x))
                    .sum::<f64>()
                    * 0.5
                    * h
            })
            .collect();
        parts.iter().sum()
    }

    /// Vector-valued version: `f` writes its components into the output slice.
    pub fn composite_vec<F>(&self, f: &F, dim: usize, a: f64, b: f64, panels: usize) -> Vec<f64>
    where
        F: Fn(f64, &mut [f64]) + Sync,
    {
        let h = (b - a) / panels as f64;
        let parts: Vec<Vec<f64>> = (0..panels)
            .into_par_iter()
            .map(|p| {
                let lo = a + h * p as f64;
                let mid = lo + 0.5 * h;
                let mut acc = vec![0.0; dim];
                let mut buf = vec![0.0; dim];
                for (x, w) in self.nodes.iter().zip(&self.weights) {
                    f(mid + 0.5 * h * x, &mut buf);
                    for (a, v) in acc.iter_mut().zip(&buf) {
                        *a += w * v;
                    }
                }
                acc.iter_mut().for_each(|a| *a *= 0.5 * h);
                acc
            })
            .collect();
        let mut total = vec![0.0; dim];
        for part in &parts {
            for (t, v) in total.iter_mut().zip(part) {
                *t += v;
            }
        }
        total
    }
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[derive(Clone, Debug)]
pub struct AdaptiveOptions {
    pub order: usize,
    pub initial_panels: usize,
    pub max_panels: usize,
    pub rel_tol: f64,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        AdaptiveOptions {
            order: 20,
            initial_panels: 4,
            max_panels: 1 << 16,
            rel_tol: 1e-8,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct QuadResult<T> {
    pub value: T,
    pub panels: usize,
    pub converged: bool,
    pub warning: Option<String>,
}

/// Doubles the panel count until two successive estimates agree to `rel_tol`.
pub fn integrate<F>(f: F, a: f64, b: f64, opts: &AdaptiveOptions) -> QuadResult<f64>
where
    F: Fn(f64) -> f64 + Sync,
{
    let rule = GaussLegendre::new(opts.order);
    let mut panels = opts.initial_panels.max(1);
    let mut prev = rule.composite(&f, a, b, panels);
    loop {
        let next_panels = panels * 2;
        if next_panels > opts.max_panels {
            return QuadResult {
                value: prev,
                panels,
                converged: false,
                warning: Some(format!(
                    "quadrature stopped at {panels} panels without reaching relative tolerance {:e}",
                    opts.rel_tol
                )),
            };
        }
        let cur = rule.composite(&f, a, b, next_panels);
        panels = next_panels;
        if (cur - prev).abs() <= opts.rel_tol * cur.abs().max(f64::MIN_POSITIVE) {
            return QuadResult {
                value: cur,
                panels,
                converged: true,
                warning: None,
            };
        }
        prev = cur;
    }
}

/// Vector-valued `integrate`; convergence is judged on the sup norm.
pub fn integrate_vec<F>(f: F, dim: usize, a: f64, b: f64, opts: &AdaptiveOptions) -> QuadResult<Vec<f64>>
where
    F: Fn(f64, &mut [f64]) + Sync,
{
    let rule = GaussLegendre::new(opts.order);
    let mut panels = opts.initial_panels.max(1);
    let mut prev = rule.composite_vec(&f, dim, a, b, panels);
    loop {
        let next_panels = panels * 2;
        if next_panels > opts.max_panels {
            return QuadResult {
                value: prev,
                panels,
                converged: false,
                warning: Some(format!(
                    "quadrature stopped at {panels} panels without reaching relative tolerance {:e}",
                    opts.rel_tol
                )),
            };
        }
        let cur = rule.composite_vec(&f, dim, a, b, next_panels);
        panels = next_panels;
        let norm = cur.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let diff = cur
            .iter()
            .zip(&prev)
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        if diff <= opts.rel_tol * norm.max(f64::MIN_POSITIVE) {
            return QuadResult {
                value: cur,
                panels,
                converged: true,
                warning: None,
            };
        }
        prev = cur;
    }
}
