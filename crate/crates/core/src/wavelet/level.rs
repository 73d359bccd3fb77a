//! One level of the two-channel filter bank on a signal of length `n`.
//!
//! The raw analysis operator correlates the signal with the low- and
//! high-pass filters at even shifts, extending it periodically or by
//! half-sample symmetric reflection. Rows near the ends (all rows whose
//! Gram entries are off, plus every row reaching into the outer
//! `taps/2` samples) are replaced by an orthonormal basis of their span.
//! Within that span the new approximation rows contain the projection of
//! the supplied moment space, the images of low-degree polynomials, so the
//! new detail rows annihilate those images just like interior rows do.
//! Synthesis is the transpose.

use nalgebra::{DMatrix, SymmetricEigen};

use super::Boundary;
use crate::error::{Error, Result};

/// Rows whose Gram entries deviate from the identity by more than this
/// need replacing.
const GRAM_TOLERANCE: f64 = 1e-11;
/// Relative singular-value cut for the projected moment space.
const RANK_TOLERANCE: f64 = 1e-9;

type SparseRow = Vec<(usize, f64)>;

#[derive(Debug, Clone)]
pub(crate) struct LevelOperator {
    len: usize,
    lo: Vec<f64>,
    hi: Vec<f64>,
    offset: isize,
    boundary: Boundary,
    /// Replaced rows (indices into `[a; d]`) and their entries.
    replaced: Vec<(usize, SparseRow)>,
}

#[inline]
fn extend(t: isize, n: isize, boundary: Boundary) -> usize {
    match boundary {
        Boundary::Periodic => t.rem_euclid(n) as usize,
        Boundary::SymmetricReflection => {
            let r = t.rem_euclid(2 * n);
            (if r < n { r } else { 2 * n - 1 - r }) as usize
        }
    }
}

/// Orthonormal columns spanning the sampled monomials of degree
/// `< count` on the midpoints of `len` cells, nested by degree.
pub(crate) fn polynomial_moments(len: usize, count: usize) -> DMatrix<f64> {
    let count = count.min(len);
    let raw = DMatrix::from_fn(len, count, |i, k| ((i as f64 + 0.5) / len as f64 - 0.5).powi(k as i32));
    raw.qr().q()
}

/// `x (x^T x)^{-1/2}`: the orthonormal frame closest to the columns of `x`.
fn lowdin(x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if x.ncols() == 0 {
        return Ok(x.clone());
    }
    let eig = SymmetricEigen::new(x.transpose() * x);
    let smallest = eig.eigenvalues.min();
    if !(smallest > 1e-12 * eig.eigenvalues.max().max(1.0)) {
        return Err(Error::config("boundary rows are linearly dependent"));
    }
    let w = &eig.eigenvectors;
    let inv_sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.sqrt().recip()));
    Ok(x * (w * inv_sqrt * w.transpose()))
}

/// Left singular vectors of `x`, largest singular values first.
fn leading_directions(x: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>) {
    if x.ncols() == 0 || x.nrows() == 0 {
        return (DMatrix::zeros(x.nrows(), 0), Vec::new());
    }
    let svd = x.clone().svd(true, false);
    let u = svd.u.expect("requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let cols: Vec<_> = order.iter().map(|&k| u.column(k).into_owned()).collect();
    let values = order.iter().map(|&k| svd.singular_values[k]).collect();
    (DMatrix::from_columns(&cols), values)
}

fn sparse_dot(a: &[(usize, f64)], b: &[(usize, f64)]) -> f64 {
    let (mut i, mut j, mut s) = (0, 0, 0.0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                s += a[i].1 * b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    s
}

impl LevelOperator {
    /// `moments` has `len` rows and orthonormal columns; pass zero columns
    /// to only orthonormalise.
    pub(crate) fn new(len: usize, lo: &[f64], boundary: Boundary, moments: &DMatrix<f64>) -> Result<Self> {
        if len < 2 || !len.is_multiple_of(2) {
            return Err(Error::config(format!("level length {len} must be even and >= 2")));
        }
        if moments.nrows() != len {
            return Err(Error::config("moment space does not match the level length"));
        }
        let mut op = LevelOperator {
            len,
            lo: lo.to_vec(),
            hi: super::filters::highpass(lo),
            offset: (lo.len() / 2) as isize - 1,
            boundary,
            replaced: Vec::new(),
        };
        op.build_boundary(moments)?;
        Ok(op)
    }

    pub(crate) fn len(&self) -> usize {
        self.len
    }

    /// Number of replaced rows.
    #[cfg(test)]
    pub(crate) fn corrected_rows(&self) -> usize {
        self.replaced.len()
    }

    /// Approximation-channel image of `moments`, re-orthonormalised and
    /// capped at half the length.
    pub(crate) fn coarse_moments(&self, moments: &DMatrix<f64>) -> DMatrix<f64> {
        let half = self.len / 2;
        let count = moments.ncols().min(half);
        let mut out = vec![0.0; self.len];
        let mut image = DMatrix::zeros(half, count);
        for k in 0..count {
            let col: Vec<f64> = moments.column(k).iter().copied().collect();
            self.analyze(&col, &mut out);
            image.column_mut(k).copy_from_slice(&out[..half]);
        }
        if count == 0 {
            return image;
        }
        image.qr().q()
    }

    /// Sparse rows of the raw analysis operator.
    fn raw_rows(&self) -> Vec<SparseRow> {
        let n = self.len as isize;
        let half = self.len / 2;
        let mut rows = Vec::with_capacity(self.len);
        let mut dense = vec![0.0; self.len];
        for filter in [&self.lo, &self.hi] {
            for k in 0..half {
                let base = 2 * k as isize - self.offset;
                let mut touched = Vec::with_capacity(filter.len());
                for (i, &c) in filter.iter().enumerate() {
                    let idx = extend(base + i as isize, n, self.boundary);
                    touched.push(idx);
                    dense[idx] += c;
                }
                touched.sort_unstable();
                touched.dedup();
                let row: SparseRow = touched.iter().map(|&j| (j, dense[j])).collect();
                for &j in &touched {
                    dense[j] = 0.0;
                }
                rows.push(row);
            }
        }
        rows
    }

    fn build_boundary(&mut self, moments: &DMatrix<f64>) -> Result<()> {
        let rows = self.raw_rows();
        let n = self.len;
        let span: Vec<(usize, usize)> = rows
            .iter()
            .map(|r| (r.first().map_or(0, |e| e.0), r.last().map_or(0, |e| e.0)))
            .collect();

        let mut deviation = vec![0.0f64; n];
        for i in 0..n {
            for j in i..n {
                if span[i].1 < span[j].0 || span[j].1 < span[i].0 {
                    continue;
                }
                let target = if i == j { 1.0 } else { 0.0 };
                let dev = (sparse_dot(&rows[i], &rows[j]) - target).abs();
                deviation[i] = deviation[i].max(dev);
                deviation[j] = deviation[j].max(dev);
            }
        }
        if deviation.iter().all(|&d| d <= GRAM_TOLERANCE) {
            return Ok(());
        }
        let reach = self.lo.len() / 2;
        let mut marked: Vec<usize> = (0..n)
            .filter(|&i| deviation[i] > GRAM_TOLERANCE || span[i].0 < reach || span[i].1 + reach >= n)
            .collect();

        // independent groups of rows with overlapping supports
        marked.sort_by_key(|&i| span[i]);
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut end = 0;
        for &i in &marked {
            match groups.last_mut() {
                Some(g) if span[i].0 <= end => {
                    g.push(i);
                    end = end.max(span[i].1);
                }
                _ => {
                    groups.push(vec![i]);
                    end = span[i].1;
                }
            }
        }
        for mut group in groups {
            group.sort_unstable();
            self.rebuild(&rows, &group, moments)?;
        }
        self.replaced.sort_by_key(|r| r.0);
        Ok(())
    }

    fn rebuild(&mut self, rows: &[SparseRow], group: &[usize], moments: &DMatrix<f64>) -> Result<()> {
        let half = self.len / 2;
        let mut cols: Vec<usize> = group.iter().flat_map(|&r| rows[r].iter().map(|e| e.0)).collect();
        cols.sort_unstable();
        cols.dedup();
        let (m, g) = (cols.len(), group.len());
        let mut raw = DMatrix::zeros(m, g);
        for (k, &r) in group.iter().enumerate() {
            for &(j, v) in &rows[r] {
                raw[(cols.binary_search(&j).expect("support"), k)] = v;
            }
        }
        let frame = lowdin(&raw)?;
        let coords = frame.transpose() * &raw;
        let a_idx: Vec<usize> = (0..g).filter(|&k| group[k] < half).collect();
        let d_idx: Vec<usize> = (0..g).filter(|&k| group[k] >= half).collect();
        let na = a_idx.len();

        let p = moments.ncols().min(na);
        let local = DMatrix::from_fn(m, p, |i, k| moments[(cols[i], k)]);
        let (dirs, sv) = leading_directions(&(frame.transpose() * local));
        let cut = sv.first().copied().unwrap_or(0.0) * RANK_TOLERANCE;
        let r = sv.iter().filter(|&&s| s > cut && s > 0.0).count();
        let u = dirs.columns(0, r).into_owned();

        let a_c = coords.select_columns(&a_idx);
        let a_perp = &a_c - &u * (u.transpose() * &a_c);
        let (extra, _) = leading_directions(&a_perp);
        let mut v = DMatrix::zeros(g, na);
        v.columns_mut(0, r).copy_from(&u);
        v.columns_mut(r, na - r).copy_from(&extra.columns(0, na - r));

        let a_new = lowdin(&(&v * (v.transpose() * &a_c)))?;
        let d_c = coords.select_columns(&d_idx);
        let d_new = lowdin(&(&d_c - &v * (v.transpose() * &d_c)))?;
        let a_rows = &frame * a_new;
        let d_rows = &frame * d_new;
        for (k, &row) in a_idx.iter().map(|&k| &group[k]).enumerate() {
            self.replaced.push((row, sparse(&cols, a_rows.column(k).iter())));
        }
        for (k, &row) in d_idx.iter().map(|&k| &group[k]).enumerate() {
            self.replaced.push((row, sparse(&cols, d_rows.column(k).iter())));
        }
        Ok(())
    }

    /// `out[..n/2]` receives the approximation, `out[n/2..]` the detail.
    pub(crate) fn analyze(&self, x: &[f64], out: &mut [f64]) {
        let n = self.len;
        let half = n / 2;
        let taps = self.lo.len() as isize;
        debug_assert!(x.len() >= n && out.len() >= n);
        for k in 0..half {
            let base = 2 * k as isize - self.offset;
            let (mut a, mut d) = (0.0, 0.0);
            if base >= 0 && base + taps <= n as isize {
                let window = &x[base as usize..base as usize + taps as usize];
                for ((&v, &h), &g) in window.iter().zip(&self.lo).zip(&self.hi) {
                    a += h * v;
                    d += g * v;
                }
            } else {
                for (i, (&h, &g)) in self.lo.iter().zip(&self.hi).enumerate() {
                    let v = x[extend(base + i as isize, n as isize, self.boundary)];
                    a += h * v;
                    d += g * v;
                }
            }
            out[k] = a;
            out[half + k] = d;
        }
        for (r, row) in &self.replaced {
            out[*r] = row.iter().map(|&(j, v)| v * x[j]).sum();
        }
    }

    /// Transpose of [`analyze`](Self::analyze). `coeffs` is used as scratch
    /// and is left modified.
    pub(crate) fn synthesize(&self, coeffs: &mut [f64], out: &mut [f64]) {
        let n = self.len;
        let half = n / 2;
        let taps = self.lo.len() as isize;
        out[..n].fill(0.0);
        for (r, row) in &self.replaced {
            let c = std::mem::take(&mut coeffs[*r]);
            for &(j, v) in row {
                out[j] += v * c;
            }
        }
        for k in 0..half {
            let base = 2 * k as isize - self.offset;
            let (a, d) = (coeffs[k], coeffs[half + k]);
            if base >= 0 && base + taps <= n as isize {
                let window = &mut out[base as usize..base as usize + taps as usize];
                for ((v, &h), &g) in window.iter_mut().zip(&self.lo).zip(&self.hi) {
                    *v += h * a + g * d;
                }
            } else {
                for (i, (&h, &g)) in self.lo.iter().zip(&self.hi).enumerate() {
                    out[extend(base + i as isize, n as isize, self.boundary)] += h * a + g * d;
                }
            }
        }
    }
}

fn sparse<'a>(cols: &[usize], values: impl Iterator<Item = &'a f64>) -> SparseRow {
    cols.iter().zip(values).map(|(&j, &v)| (j, v)).collect()
}

#[cfg(test)]
mod tests {
    use super::super::filters::{HAAR, SYMMLET8};
    use super::*;

    fn matrix(op: &LevelOperator) -> Vec<Vec<f64>> {
        let n = op.len();
        (0..n)
            .map(|c| {
                let mut e = vec![0.0; n];
                e[c] = 1.0;
                let mut out = vec![0.0; n];
                op.analyze(&e, &mut out);
                out
            })
            .collect()
    }

    fn max_orthogonality_defect(op: &LevelOperator) -> f64 {
        // columns of the analysis matrix are the images of unit vectors
        let cols = matrix(op);
        let n = op.len();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = (0..n).map(|r| cols[i][r] * cols[j][r]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    #[test]
    fn every_level_is_orthogonal() {
        for boundary in [Boundary::Periodic, Boundary::SymmetricReflection] {
            for filter in [&HAAR[..], &SYMMLET8[..]] {
                for n in [2, 4, 8, 16, 32, 64] {
                    let op = LevelOperator::new(n, filter, boundary, &polynomial_moments(n, filter.len() / 2)).unwrap();
                    let defect = max_orthogonality_defect(&op);
                    assert!(defect < 1e-12, "{boundary:?} taps={} n={n}: {defect}", filter.len());
                }
            }
        }
    }

    #[test]
    fn synthesis_inverts_analysis() {
        let op = LevelOperator::new(64, &SYMMLET8, Boundary::SymmetricReflection, &polynomial_moments(64, 8)).unwrap();
        let x: Vec<f64> = (0..64).map(|i| ((i * 37 % 11) as f64 - 5.0) / 3.0).collect();
        let mut y = vec![0.0; 64];
        op.analyze(&x, &mut y);
        let mut back = vec![0.0; 64];
        op.synthesize(&mut y, &mut back);
        for (a, b) in x.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn only_boundary_rows_are_corrected() {
        let per = LevelOperator::new(1024, &SYMMLET8, Boundary::Periodic, &DMatrix::zeros(1024, 0)).unwrap();
        assert_eq!(per.corrected_rows(), 0);
        let haar = LevelOperator::new(1024, &HAAR, Boundary::SymmetricReflection, &polynomial_moments(1024, 1)).unwrap();
        assert_eq!(haar.corrected_rows(), 0);
        let sym = LevelOperator::new(1024, &SYMMLET8, Boundary::SymmetricReflection, &polynomial_moments(1024, 8)).unwrap();
        assert!(sym.corrected_rows() > 0 && sym.corrected_rows() <= 32);
    }
}
