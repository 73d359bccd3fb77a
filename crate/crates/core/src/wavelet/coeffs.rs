use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use super::basis::WaveletBasis;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subband {
    Scaling,
    /// 1D detail.
    Detail,
    /// 2D: high-pass along the second coordinate, low-pass along the first.
    Horizontal,
    /// 2D: high-pass along the first coordinate, low-pass along the second.
    Vertical,
    Diagonal,
}

impl Subband {
    pub fn as_str(&self) -> &'static str {
        match self {
            Subband::Scaling => "scaling",
            Subband::Detail => "detail",
            Subband::Horizontal => "horizontal",
            Subband::Vertical => "vertical",
            Subband::Diagonal => "diagonal",
        }
    }
}

impl std::str::FromStr for Subband {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "scaling" => Subband::Scaling,
            "detail" => Subband::Detail,
            "horizontal" => Subband::Horizontal,
            "vertical" => Subband::Vertical,
            "diagonal" => Subband::Diagonal,
            other => return Err(Error::parse("sub-band", other)),
        })
    }
}

/// Resolution level, location and sub-band encoded by a single index.
/// In 2D the location is row-major within the sub-band, `k0 * 2^j + k1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CoefficientIndex {
    pub level: u32,
    pub location: usize,
    pub subband: Subband,
}

/// Wavelet coefficients `w_1, .., w_L` in single-index order.
#[derive(Debug, Clone)]
pub struct CoefficientVector {
    basis: Arc<WaveletBasis>,
    values: Vec<f64>,
}

impl CoefficientVector {
    pub fn new(basis: Arc<WaveletBasis>, values: Vec<f64>) -> Result<Self> {
        if values.len() != basis.truncation() {
            return Err(Error::config(format!(
                "basis keeps {} coefficients, got {}",
                basis.truncation(),
                values.len()
            )));
        }
        Ok(CoefficientVector { basis, values })
    }

    pub fn zeros(basis: Arc<WaveletBasis>) -> Self {
        let values = vec![0.0; basis.truncation()];
        CoefficientVector { basis, values }
    }

    pub fn basis(&self) -> &Arc<WaveletBasis> {
        &self.basis
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// CSV with header `l,j,k,subband,value`; `l` is one-based.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("l,j,k,subband,value\n");
        for (l, (idx, v)) in self.basis.index_map().iter().zip(&self.values).enumerate() {
            writeln!(s, "{},{},{},{},{}", l + 1, idx.level, idx.location, idx.subband.as_str(), v)
                .unwrap();
        }
        s
    }

    /// Parses the CSV written by [`to_csv`](Self::to_csv), checking that the
    /// index columns agree with `basis`.
    pub fn from_csv(basis: Arc<WaveletBasis>, text: &str) -> Result<Self> {
        let mut values = Vec::with_capacity(basis.truncation());
        for (row, line) in text.lines().skip(1).filter(|l| !l.trim().is_empty()).enumerate() {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 5 {
                return Err(Error::parse("coefficient row", line));
            }
            let expected = basis
                .index_map()
                .get(row)
                .ok_or_else(|| Error::parse("coefficient file", "more rows than the truncation"))?;
            let parse_int = |s: &str| s.trim().parse::<usize>().map_err(|e| Error::parse("index", e.to_string()));
            let l = parse_int(fields[0])?;
            let j = parse_int(fields[1])?;
            let k = parse_int(fields[2])?;
            let subband: Subband = fields[3].trim().parse()?;
            if l != row + 1 || j != expected.level as usize || k != expected.location || subband != expected.subband {
                return Err(Error::parse("coefficient row", format!("index mismatch at {line:?}")));
            }
            values.push(
                fields[4]
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::parse("coefficient value", e.to_string()))?,
            );
        }
        CoefficientVector::new(basis, values)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}
