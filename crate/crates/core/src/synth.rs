//! Synthetic inliers with planted corruption.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Adversary {
    /// `±C√(k/ε)·e_i` clusters of spread `σ` on the first `k` axes.
    DirectionalMixture,
    /// Removes the most extreme samples along a random `u` and inserts them
    /// at `μ* + (0.9/√ε)·u` with Gaussian noise orthogonal to `u`.
    ReplaceRemove,
    /// Removes the same samples and inserts fresh draws scaled by 3 about `μ*`.
    NormInflation,
    /// As `ReplaceRemove`, spread round-robin over `k` orthonormal directions.
    MultiDirection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorruptionSpec {
    pub eps: f64,
    pub k: usize,
    pub magnitude: f64,
    pub sigma: f64,
    /// Per-direction fractions; uniform `ε/k` when absent.
    pub weights: Option<Vec<f64>>,
    pub adversary: Adversary,
}

impl CorruptionSpec {
    pub fn mixture(eps: f64, k: usize) -> Self {
        Self {
            eps,
            k,
            magnitude: 1.0,
            sigma: 0.2,
            weights: None,
            adversary: Adversary::DirectionalMixture,
        }
    }

    pub fn direction_fractions(&self) -> Vec<f64> {
        match &self.weights {
            Some(w) => w.clone(),
            None => vec![self.eps / self.k.max(1) as f64; self.k],
        }
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        if !(self.eps >= 0.0 && self.eps < 0.5) {
            return Err(Error::InvalidEpsilon(self.eps));
        }
        if self.k > d {
            return Err(Error::Config(format!("k = {} exceeds d = {d}", self.k)));
        }
        if self.eps > 0.0 && self.k == 0 {
            return Err(Error::Config("k must be at least 1 when eps > 0".into()));
        }
        let fr = self.direction_fractions();
        if fr.len() != self.k || fr.iter().any(|&f| f < 0.0) {
            return Err(Error::Config("need k nonnegative direction fractions".into()));
        }
        if (fr.iter().sum::<f64>() - self.eps).abs() > 1e-12 && self.k > 0 {
            return Err(Error::Config("direction fractions must sum to eps".into()));
        }
        if !(self.sigma >= 0.0 && self.magnitude.is_finite()) {
            return Err(Error::Config("sigma must be >= 0 and C finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Synthetic {
    pub data: Dataset,
    /// `true` marks an outlier; aligned with the data rows.
    pub labels: Vec<bool>,
    pub mean: DVector<f64>,
}

/// `⌈x⌉` that ignores floating noise just above an integer.
fn count(x: f64) -> usize {
    (x - 1e-9).ceil().max(0.0) as usize
}

fn gaussian_vec<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DVector<f64> {
    DVector::from_fn(d, |_, _| rng.sample(StandardNormal))
}

fn unit_vec<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DVector<f64> {
    loop {
        let v = gaussian_vec(d, rng);
        let n = v.norm();
        if n > 1e-12 {
            return v / n;
        }
    }
}

fn assemble<R: Rng + ?Sized>(
    mut rows: Vec<(DVector<f64>, bool)>,
    d: usize,
    mean: DVector<f64>,
    rng: &mut R,
) -> Result<Synthetic> {
    rows.shuffle(rng);
    let x = DMatrix::from_fn(rows.len(), d, |i, j| rows[i].0[j]);
    Ok(Synthetic {
        data: Dataset::new(x)?,
        labels: rows.iter().map(|r| r.1).collect(),
        mean,
    })
}

/// `⌈(1−ε)n⌉` draws from `N(0, Id)` plus `⌈ε_i n⌉` outliers per direction,
/// split evenly between `±C√(k/ε)·e_i` with spread `σ`. Rows are shuffled.
pub fn gen_synthetic<R: Rng + ?Sized>(
    d: usize,
    n: usize,
    spec: &CorruptionSpec,
    rng: &mut R,
) -> Result<Synthetic> {
    if d == 0 || n == 0 {
        return Err(Error::InvalidDataset("need d >= 1 and n >= 1".into()));
    }
    if spec.adversary != Adversary::DirectionalMixture {
        return Err(Error::Config(
            "gen_synthetic only builds the directional mixture".into(),
        ));
    }
    spec.validate(d)?;
    let n_in = count((1.0 - spec.eps) * n as f64);
    let mut rows: Vec<(DVector<f64>, bool)> = (0..n_in).map(|_| (gaussian_vec(d, rng), false)).collect();
    if spec.eps > 0.0 {
        let dist = spec.magnitude * (spec.k as f64 / spec.eps).sqrt();
        for (axis, frac) in spec.direction_fractions().into_iter().enumerate() {
            let c = count(frac * n as f64);
            for j in 0..c {
                let sign = if j < c.div_ceil(2) { 1.0 } else { -1.0 };
                let mut x = gaussian_vec(d, rng) * spec.sigma;
                x[axis] += sign * dist;
                rows.push((x, true));
            }
        }
    }
    assemble(rows, d, DVector::zeros(d), rng)
}

/// `n` draws from `N(μ*, Id)` with `μ*` uniform on the unit sphere, after
/// which the `⌈εn⌉` samples most extreme along a random direction are
/// replaced according to `adversary`. Row order is preserved.
pub fn gen_eps_corrupted<R: Rng + ?Sized>(
    d: usize,
    n: usize,
    eps: f64,
    adversary: Adversary,
    k: usize,
    rng: &mut R,
) -> Result<Synthetic> {
    if d == 0 || n == 0 {
        return Err(Error::InvalidDataset("need d >= 1 and n >= 1".into()));
    }
    if !(0.0..0.5).contains(&eps) {
        return Err(Error::InvalidEpsilon(eps));
    }
    if adversary == Adversary::DirectionalMixture {
        return Err(Error::Config("use gen_synthetic for the mixture model".into()));
    }
    let mu = unit_vec(d, rng);
    let mut x = DMatrix::from_fn(n, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    for mut row in x.row_iter_mut() {
        row += mu.transpose();
    }
    let mut labels = vec![false; n];
    let m = count(eps * n as f64);
    if m > 0 {
        let dirs = match adversary {
            Adversary::MultiDirection => orthonormal(d, k.clamp(1, d), rng),
            _ => vec![unit_vec(d, rng)],
        };
        let u = &dirs[0];
        let proj: Vec<f64> = x
            .row_iter()
            .map(|r| (r.transpose() - &mu).dot(u).abs())
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| proj[b].total_cmp(&proj[a]).then(a.cmp(&b)));
        let bias = 0.9 / eps.sqrt();
        for (j, &i) in order[..m].iter().enumerate() {
            let g = gaussian_vec(d, rng);
            let point = match adversary {
                Adversary::NormInflation => &mu + g * 3.0,
                _ => {
                    let v = &dirs[j % dirs.len()];
                    let orth = &g - v * v.dot(&g);
                    &mu + v * bias + orth
                }
            };
            x.set_row(i, &point.transpose());
            labels[i] = true;
        }
    }
    Ok(Synthetic {
        data: Dataset::new(x)?,
        labels,
        mean: mu,
    })
}

fn orthonormal<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> Vec<DVector<f64>> {
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(k);
    while out.len() < k {
        let mut v = gaussian_vec(d, rng);
        for u in &out {
            v -= u * u.dot(&v);
        }
        let n = v.norm();
        if n > 1e-8 {
            out.push(v / n);
        }
    }
    out
}
