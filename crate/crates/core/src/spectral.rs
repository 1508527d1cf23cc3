//! Randomized spectral-norm estimation by power iteration.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A symmetric linear operator on `R^d`, applied to blocks of column vectors.
pub trait SymOperator {
    fn dim(&self) -> usize;

    fn apply_block(&self, v: &DMatrix<f64>) -> DMatrix<f64>;

    fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        let block = DMatrix::from_column_slice(v.len(), 1, v.as_slice());
        self.apply_block(&block).column(0).into_owned()
    }
}

/// Dense symmetric matrix.
impl SymOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply_block(&self, v: &DMatrix<f64>) -> DMatrix<f64> {
        self * v
    }
}

/// Wraps a closure computing `A·v` for a single vector.
pub struct FnOperator<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&DVector<f64>) -> DVector<f64>> FnOperator<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(&DVector<f64>) -> DVector<f64>> SymOperator for FnOperator<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply_block(&self, v: &DMatrix<f64>) -> DMatrix<f64> {
        let cols: Vec<DVector<f64>> = v
            .column_iter()
            .map(|c| (self.f)(&c.into_owned()))
            .collect();
        DMatrix::from_columns(&cols)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralEstimate {
    pub value: f64,
    pub iterations_used: usize,
    pub relative_accuracy: f64,
}

/// Iteration and restart counts used by [`estimate_spectral_norm`].
pub fn power_schedule(d: usize, accuracy: f64, fail_prob: f64) -> (usize, usize) {
    let iterations = (10.0 * ((d + 1) as f64).ln() / accuracy).ceil() as usize;
    let restarts = (2.0 / fail_prob).log2().ceil().max(1.0) as usize;
    (iterations.max(1), restarts)
}

/// Estimates `‖A‖₂` (largest eigenvalue magnitude) of a symmetric operator.
///
/// Runs `⌈log₂(2/fail_prob)⌉` Gaussian restarts as one block, each for
/// `⌈10·ln(d+1)/accuracy⌉` iterations, and reports the largest `‖Av‖/‖v‖` at
/// the final iterates. That quantity never exceeds `‖A‖₂`, and unlike the
/// plain Rayleigh quotient it does not cancel when `A` has eigenvalues `±λ`.
pub fn estimate_spectral_norm<O, R>(
    op: &O,
    accuracy: f64,
    fail_prob: f64,
    rng: &mut R,
) -> Result<SpectralEstimate>
where
    O: SymOperator + ?Sized,
    R: Rng + ?Sized,
{
    if !(accuracy > 0.0 && accuracy <= 0.5) {
        return Err(Error::Config(format!("accuracy {accuracy} not in (0, 0.5]")));
    }
    if !(fail_prob > 0.0 && fail_prob < 1.0) {
        return Err(Error::Config(format!("fail_prob {fail_prob} not in (0, 1)")));
    }
    let d = op.dim();
    let (iterations, restarts) = power_schedule(d, accuracy, fail_prob);
    let mut block = DMatrix::from_fn(d, restarts, |_, _| rng.sample::<f64, _>(StandardNormal));
    normalize_columns(&mut block);

    let mut image = op.apply_block(&block);
    check_shape(&image, d, restarts)?;
    for _ in 1..iterations {
        block = image;
        if normalize_columns(&mut block) == 0 {
            // every column collapsed: the operator is zero on the sampled span
            return Ok(SpectralEstimate {
                value: 0.0,
                iterations_used: iterations,
                relative_accuracy: accuracy,
            });
        }
        image = op.apply_block(&block);
    }

    let value = block
        .column_iter()
        .zip(image.column_iter())
        .filter_map(|(v, av)| {
            let nv = v.norm();
            (nv > 0.0).then(|| av.norm() / nv)
        })
        .fold(0.0, f64::max);
    Ok(SpectralEstimate {
        value,
        iterations_used: iterations,
        relative_accuracy: accuracy,
    })
}

/// Power-method approximation of the top eigenvector of a PSD operator.
pub fn top_eigenvector<O, R>(op: &O, iterations: usize, rng: &mut R) -> Result<DVector<f64>>
where
    O: SymOperator + ?Sized,
    R: Rng + ?Sized,
{
    let d = op.dim();
    let mut v = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
    v.normalize_mut();
    for _ in 0..iterations.max(1) {
        let next = op.apply(&v);
        if next.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: next.len(),
            });
        }
        let norm = next.norm();
        if norm == 0.0 {
            return Err(Error::DegenerateCovariance);
        }
        let delta = (&next / norm - &v).norm();
        v = next / norm;
        if delta < 1e-13 {
            break;
        }
    }
    Ok(v)
}

fn check_shape(m: &DMatrix<f64>, d: usize, k: usize) -> Result<()> {
    if m.nrows() != d || m.ncols() != k {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: m.nrows(),
        });
    }
    Ok(())
}

/// Normalizes each nonzero column in place and returns how many were nonzero.
fn normalize_columns(m: &mut DMatrix<f64>) -> usize {
    let mut alive = 0;
    for mut c in m.column_iter_mut() {
        let n = c.norm();
        if n > 1e-300 {
            c /= n;
            alive += 1;
        } else {
            c.fill(0.0);
        }
    }
    alive
}
