//! Matrix JSON fixtures and kernel CSV export.
//!
//! Matrices are stored as `{"n": 2, "re": [[..], [..]], "im": [[..], [..]]}`.
//! Numbers are written in shortest round-trip form, so reading a file back
//! reproduces every entry bit for bit.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use schatten_core::{ComplexMatrix, KernelG, KernelParams, SchurSymbol, C64};
use serde::{Deserialize, Serialize};

use crate::error::{io_error, LabError, LabResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Vec<Vec<f64>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix) -> LabResult<Self> {
        if !m.is_square() {
            return Err(LabError::MalformedMatrix(format!(
                "expected a square matrix, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let n = m.rows();
        let part = |f: fn(&C64) -> f64| -> Vec<Vec<f64>> {
            (0..n)
                .map(|r| (0..n).map(|c| f(&m[(r, c)])).collect())
                .collect()
        };
        Ok(Self {
            n,
            re: part(|z| z.re),
            im: part(|z| z.im),
        })
    }

    /// An empty `im` means a real matrix.
    pub fn to_matrix(&self) -> LabResult<ComplexMatrix> {
        let n = self.n;
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if n == 0 || !shape_ok(&self.re) {
            return Err(LabError::MalformedMatrix(format!("\"re\" is not {n}x{n}")));
        }
        if !self.im.is_empty() && !shape_ok(&self.im) {
            return Err(LabError::MalformedMatrix(format!("\"im\" is not {n}x{n}")));
        }
        let mut entries = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                let im = if self.im.is_empty() {
                    0.0
                } else {
                    self.im[r][c]
                };
                entries.push(C64::new(self.re[r][c], im));
            }
        }
        Ok(ComplexMatrix::from_vec(n, n, entries)?)
    }
}

pub fn write_matrix(path: &Path, m: &ComplexMatrix) -> LabResult<()> {
    let mut text = serde_json::to_string(&MatrixFile::from_matrix(m)?)?;
    text.push('\n');
    fs::write(path, text).map_err(io_error(path))
}

pub fn read_matrix(path: &Path) -> LabResult<ComplexMatrix> {
    let text = fs::read_to_string(path).map_err(io_error(path))?;
    let file: MatrixFile =
        serde_json::from_str(&text).map_err(|e| LabError::MalformedMatrix(e.to_string()))?;
    file.to_matrix()
}

pub fn read_symbol(path: &Path) -> LabResult<SchurSymbol> {
    Ok(SchurSymbol::new(read_matrix(path)?)?)
}

/// Writes `# {build params}` followed by `s,re_g,im_g,weight` rows.
pub fn write_kernel_csv(path: &Path, kernel: &KernelG) -> LabResult<()> {
    let mut file = fs::File::create(path).map_err(io_error(path))?;
    writeln!(file, "# {}", serde_json::to_string(&kernel.params)?).map_err(io_error(path))?;
    let mut writer = csv::Writer::from_writer(file);
    writer.write_record(["s", "re_g", "im_g", "weight"])?;
    for ((s, g), w) in kernel
        .s_points
        .iter()
        .zip(&kernel.values)
        .zip(&kernel.weights)
    {
        writer.write_record([
            format_float(*s),
            format_float(g.re),
            format_float(g.im),
            format_float(*w),
        ])?;
    }
    writer.flush().map_err(io_error(path))?;
    Ok(())
}

pub fn read_kernel_csv(path: &Path) -> LabResult<KernelG> {
    let file = fs::File::open(path).map_err(io_error(path))?;
    let mut reader = BufReader::new(file);
    let mut first = String::new();
    reader.read_line(&mut first).map_err(io_error(path))?;
    let header = first
        .strip_prefix("# ")
        .ok_or_else(|| LabError::MalformedKernel("missing build parameter line".into()))?;
    let params: KernelParams = serde_json::from_str(header.trim())?;

    let mut csv = csv::Reader::from_reader(reader);
    let (mut s_points, mut values, mut weights) = (Vec::new(), Vec::new(), Vec::new());
    for record in csv.records() {
        let record = record?;
        let field = |i: usize| -> LabResult<f64> {
            record
                .get(i)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| LabError::MalformedKernel(format!("bad row {record:?}")))
        };
        s_points.push(field(0)?);
        values.push(C64::new(field(1)?, field(2)?));
        weights.push(field(3)?);
    }
    Ok(KernelG {
        s_points,
        values,
        weights,
        params,
    })
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        "0.0".into()
    } else if x.is_finite() {
        ryu::Buffer::new().format_finite(x).to_owned()
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}
