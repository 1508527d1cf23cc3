//! Datasets and weight vectors, plus the CSV and `QUED` binary file formats.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector, RowDVector};

use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"QUED";

/// Slack allowed on the total mass of a weight vector.
pub const MASS_TOL: f64 = 1e-12;

/// `n` samples in `R^d`, stored as an `n × d` matrix. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: DMatrix<f64>,
}

impl Dataset {
    pub fn new(x: DMatrix<f64>) -> Result<Self> {
        if x.nrows() == 0 || x.ncols() == 0 {
            return Err(Error::InvalidDataset(format!(
                "need n >= 1 and d >= 1, got {}x{}",
                x.nrows(),
                x.ncols()
            )));
        }
        if let Some(pos) = x.iter().position(|v| !v.is_finite()) {
            // column-major position
            let (i, j) = (pos % x.nrows(), pos / x.nrows());
            return Err(Error::InvalidDataset(format!(
                "non-finite entry at row {i}, column {j}"
            )));
        }
        Ok(Self { x })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != d) {
            return Err(Error::InvalidDataset(format!(
                "row {i} has {} columns, expected {d}",
                r.len()
            )));
        }
        Self::new(DMatrix::from_fn(n, d, |i, j| rows[i][j]))
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn d(&self) -> usize {
        self.x.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.x
    }

    pub fn row(&self, i: usize) -> RowDVector<f64> {
        self.x.row(i).into_owned()
    }

    pub fn point(&self, i: usize) -> DVector<f64> {
        self.x.row(i).transpose()
    }

    /// Unweighted empirical mean.
    pub fn mean(&self) -> DVector<f64> {
        self.x.row_mean().transpose()
    }

    /// Dataset with `shift` subtracted from every sample.
    pub fn centered_at(&self, shift: &DVector<f64>) -> Result<Self> {
        check_dim(self.d(), shift.len())?;
        let mut x = self.x.clone();
        for mut row in x.row_iter_mut() {
            row -= shift.transpose();
        }
        Ok(Self { x })
    }

    /// Dataset restricted to the listed sample indices, in order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        Self::new(self.x.select_rows(indices))
    }

    /// Dataset with every sample multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(&self.x * c)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.x
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }

    /// Reads CSV (one sample per line). With `header`, the first line is skipped.
    pub fn read_csv<R: Read>(reader: R, header: bool) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in BufReader::new(reader).lines().enumerate() {
            let line = line?;
            if lineno == 0 && header {
                continue;
            }
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row = line
                .split(',')
                .map(|tok| {
                    tok.trim().parse::<f64>().map_err(|e| {
                        Error::Parse(format!("line {}: {tok:?}: {e}", lineno + 1))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Self::from_rows(&rows)
    }

    /// Writes CSV using the shortest round-trip decimal representation.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = BufWriter::new(writer);
        for row in self.x.row_iter() {
            let mut first = true;
            for v in row.iter() {
                if !first {
                    w.write_all(b",")?;
                }
                first = false;
                write!(w, "{v}")?;
            }
            w.write_all(b"\n")?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the binary format: magic `QUED`, u32 LE `n`, u32 LE `d`, then
    /// `n·d` f64 LE values in row-major order.
    pub fn read_binary<R: Read>(mut reader: R) -> Result<Self> {
        let mut head = [0u8; 12];
        reader.read_exact(&mut head)?;
        if &head[..4] != MAGIC {
            return Err(Error::Parse("missing QUED magic".into()));
        }
        let n = u32::from_le_bytes(head[4..8].try_into().unwrap()) as usize;
        let d = u32::from_le_bytes(head[8..12].try_into().unwrap()) as usize;
        let mut buf = Vec::new();
        reader.read_to_end(&mut buf)?;
        if buf.len() != n * d * 8 {
            return Err(Error::Parse(format!(
                "expected {} payload bytes for {n}x{d}, found {}",
                n * d * 8,
                buf.len()
            )));
        }
        let vals: Vec<f64> = buf
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Self::new(DMatrix::from_row_slice(n, d, &vals))
    }

    pub fn write_binary<W: Write>(&self, writer: W) -> Result<()> {
        let n = u32::try_from(self.n()).map_err(|_| Error::Parse("n exceeds u32".into()))?;
        let d = u32::try_from(self.d()).map_err(|_| Error::Parse("d exceeds u32".into()))?;
        let mut w = BufWriter::new(writer);
        w.write_all(MAGIC)?;
        w.write_all(&n.to_le_bytes())?;
        w.write_all(&d.to_le_bytes())?;
        for row in self.x.row_iter() {
            for v in row.iter() {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Loads by sniffing the `QUED` magic; anything else is parsed as CSV.
    pub fn load(path: impl AsRef<Path>, header: bool) -> Result<Self> {
        let bytes = fs::read(path)?;
        if bytes.starts_with(MAGIC) {
            Self::read_binary(bytes.as_slice())
        } else {
            Self::read_csv(bytes.as_slice(), header)
        }
    }

    /// Saves as binary when the extension is `bin` or `qued`, CSV otherwise.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = fs::File::create(path)?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("bin") | Some("qued") => self.write_binary(file),
            _ => self.write_csv(file),
        }
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

/// Nonnegative per-sample weights with total mass at most one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    w: Vec<f64>,
    mass: f64,
}

impl WeightVector {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = w.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidWeights(format!("entry {i} is {v}")));
        }
        let mass: f64 = w.iter().sum();
        if mass > 1.0 + MASS_TOL {
            return Err(Error::InvalidWeights(format!("total mass {mass} exceeds 1")));
        }
        Ok(Self { w, mass })
    }

    /// `(1/n)·1`.
    pub fn uniform(n: usize) -> Self {
        Self {
            w: vec![1.0 / n as f64; n],
            mass: if n == 0 { 0.0 } else { 1.0 },
        }
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.w
    }

    pub fn as_dvector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.w)
    }

    /// Membership in the simplex-like set `{w ≥ 0, Σw ≤ 1}`.
    pub fn in_simplex(&self) -> bool {
        self.w.iter().all(|&v| v >= 0.0) && self.w.iter().sum::<f64>() <= 1.0 + MASS_TOL
    }

    /// Whether every entry is at most `1/n` (up to rounding).
    pub fn is_capped(&self) -> bool {
        let cap = 1.0 / self.w.len() as f64;
        self.w.iter().all(|&v| v <= cap * (1.0 + 1e-12))
    }

    /// Elementwise `self ≤ other`.
    pub fn dominated_by(&self, other: &WeightVector) -> bool {
        self.w.len() == other.w.len() && self.w.iter().zip(&other.w).all(|(a, b)| a <= b)
    }

    pub(crate) fn ensure_mass(&self) -> Result<()> {
        if self.mass > 0.0 {
            Ok(())
        } else {
            Err(Error::ZeroMass)
        }
    }
}
