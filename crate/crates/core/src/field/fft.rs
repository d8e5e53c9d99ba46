use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::sync::Arc;

use crate::par;

/// Unnormalised 2-D FFT on `n x n` row-major buffers.
#[derive(Clone)]
pub struct Fft2 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2").field("n", &self.n).finish()
    }
}

const ROWS_PER_TASK: usize = 16;
const TILE: usize = 32;

impl Fft2 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 {
            n,
            forward: planner.plan_fft(n, FftDirection::Forward),
            inverse: planner.plan_fft(n, FftDirection::Inverse),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// In-place forward transform, `sum_x a(x) e^{-2 pi i k.x / n}`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.forward, None, None);
    }

    /// In-place inverse transform without the `1/n^2` factor.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inverse, None, None);
    }

    /// Forward transform of a buffer whose nonzero rows all lie in `rows`.
    pub fn forward_sparse_rows(&self, data: &mut [Complex64], rows: std::ops::Range<usize>) {
        self.run(data, &self.forward, Some(rows), None);
    }

    /// Inverse transform where only the rows in `keep` of the result are
    /// needed; the other rows are left unspecified.
    pub fn inverse_partial(&self, data: &mut [Complex64], keep: std::ops::Range<usize>) {
        self.run(data, &self.inverse, None, Some(keep));
    }

    fn run(
        &self,
        data: &mut [Complex64],
        plan: &Arc<dyn Fft<f64>>,
        input_rows: Option<std::ops::Range<usize>>,
        output_rows: Option<std::ops::Range<usize>>,
    ) {
        let n = self.n;
        assert_eq!(data.len(), n * n, "buffer is not n x n");
        let mut t = vec![Complex64::default(); n * n];
        if let Some(keep) = output_rows {
            // columns first, so the last pass only touches the kept rows
            transpose(data, &mut t, n);
            rows_fft(&mut t, n, plan);
            transpose(&t, data, n);
            rows_fft(&mut data[keep.start * n..keep.end * n], n, plan);
        } else {
            let rows = input_rows.unwrap_or(0..n);
            rows_fft(&mut data[rows.start * n..rows.end * n], n, plan);
            transpose(data, &mut t, n);
            rows_fft(&mut t, n, plan);
            transpose(&t, data, n);
        }
    }
}

fn rows_fft(data: &mut [Complex64], n: usize, plan: &Arc<dyn Fft<f64>>) {
    if data.is_empty() {
        return;
    }
    par::for_each_row(data, n * ROWS_PER_TASK, |_, block| {
        let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
        plan.process_with_scratch(block, &mut scratch);
    });
}

/// `dst[j n + i] = src[i n + j]`, tiled and parallel over destination rows.
fn transpose(src: &[Complex64], dst: &mut [Complex64], n: usize) {
    let tile = TILE.min(n);
    par::for_each_row(dst, n * tile, |b, block| {
        let j0 = b * tile;
        for i0 in (0..n).step_by(tile) {
            for i in i0..i0 + tile {
                let s = &src[i * n + j0..i * n + j0 + tile];
                for (dj, &v) in s.iter().enumerate() {
                    block[dj * n + i] = v;
                }
            }
        }
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(a: &[Complex64], n: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); n * n];
        for k2 in 0..n {
            for k1 in 0..n {
                let mut s = Complex64::default();
                for j in 0..n {
                    for i in 0..n {
                        let ph = -2.0 * std::f64::consts::PI * ((k1 * i + k2 * j) as f64) / n as f64;
                        s += a[j * n + i] * Complex64::from_polar(1.0, ph);
                    }
                }
                out[k2 * n + k1] = s;
            }
        }
        out
    }

    #[test]
    fn matches_naive_dft() {
        let n = 16;
        let a: Vec<Complex64> =
            (0..n * n).map(|k| Complex64::new((k as f64 * 0.7).sin(), (k as f64 * 0.3).cos())).collect();
        let mut b = a.clone();
        Fft2::new(n).forward(&mut b);
        let r = naive_dft(&a, n);
        for (x, y) in b.iter().zip(&r) {
            assert!((x - y).norm() < 1e-11);
        }
    }

    #[test]
    fn partial_inverse_keeps_requested_rows() {
        let n = 32;
        let mut a: Vec<Complex64> = (0..n * n).map(|k| Complex64::new((k as f64).sqrt(), 0.5)).collect();
        let mut b = a.clone();
        let f = Fft2::new(n);
        f.inverse(&mut a);
        f.inverse_partial(&mut b, 8..24);
        for k in 8 * n..24 * n {
            assert!((a[k] - b[k]).norm() < 1e-9 * a[k].norm().max(1.0));
        }
    }

    #[test]
    fn sparse_rows_equals_full() {
        let n = 32;
        let mut a = vec![Complex64::default(); n * n];
        for j in 8..24 {
            for i in 0..n {
                a[j * n + i] = Complex64::new((i * j) as f64 * 0.01, 1.0);
            }
        }
        let mut b = a.clone();
        let f = Fft2::new(n);
        f.forward(&mut a);
        f.forward_sparse_rows(&mut b, 8..24);
        assert_eq!(a, b);
    }
}
