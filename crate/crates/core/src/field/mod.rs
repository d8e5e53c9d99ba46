//! Uniform square grids, sampled fields, Fourier transforms in the
//! continuous convention `Ff(xi) = (2 pi)^-1 int f(x) e^{-i x.xi} dx`,
//! convolution, norms and the binary field dump.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::par;

mod fft;
mod io;

pub use fft::Fft2;
pub use io::{read_dump, write_dump, DUMP_MAGIC};

/// Scalar types a [`GridField`] can hold.
pub trait Sample: Copy + Send + Sync + Default + PartialEq + std::fmt::Debug + 'static {
    fn norm(self) -> f64;
    fn to_complex(self) -> Complex64;
    fn scale(self, a: f64) -> Self;
    fn is_finite(self) -> bool;
}

impl Sample for f64 {
    fn norm(self) -> f64 {
        self.abs()
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    fn scale(self, a: f64) -> Self {
        self * a
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl Sample for Complex64 {
    fn norm(self) -> f64 {
        Complex64::norm(self)
    }
    fn to_complex(self) -> Complex64 {
        self
    }
    fn scale(self, a: f64) -> Self {
        self * a
    }
    fn is_finite(self) -> bool {
        Complex64::is_finite(self)
    }
}

/// `n x n` points with spacing `h`; sample `(i, j)` sits at
/// `center + ((i - n/2) h, (j - n/2) h)`, so the center is itself a sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n: usize,
    h: f64,
    center: [f64; 2],
}

impl Grid {
    pub fn new(n: usize, h: f64) -> Result<Self> {
        Self::with_center(n, h, [0.0, 0.0])
    }

    pub fn with_center(n: usize, h: f64, center: [f64; 2]) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::Grid(format!("n must be a power of two >= 16, got {n}")));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Grid(format!("spacing must be positive, got {h}")));
        }
        if !(center[0].is_finite() && center[1].is_finite()) {
            return Err(Error::Grid("center must be finite".into()));
        }
        Ok(Grid { n, h, center })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn h(&self) -> f64 {
        self.h
    }
    pub fn center(&self) -> [f64; 2] {
        self.center
    }
    /// Side length `L = n h`.
    pub fn side(&self) -> f64 {
        self.n as f64 * self.h
    }
    /// Number of samples, `n^2`.
    pub fn len(&self) -> usize {
        self.n * self.n
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    /// Cell area `h^2`.
    pub fn cell(&self) -> f64 {
        self.h * self.h
    }

    /// Offset of index `i` from the center along one axis.
    pub fn offset(&self, i: usize) -> f64 {
        (i as f64 - (self.n / 2) as f64) * self.h
    }

    /// Coordinates of flat index `k` (`x1` fastest).
    pub fn point(&self, k: usize) -> [f64; 2] {
        let (i, j) = (k % self.n, k / self.n);
        [self.center[0] + self.offset(i), self.center[1] + self.offset(j)]
    }

    /// Distance of flat index `k` from the grid center.
    pub fn radius(&self, k: usize) -> f64 {
        let (i, j) = (k % self.n, k / self.n);
        self.offset(i).hypot(self.offset(j))
    }

    /// Flat index of the center sample.
    pub fn center_index(&self) -> usize {
        (self.n / 2) * self.n + self.n / 2
    }

    /// Spacing of the dual grid, `2 pi / L`.
    pub fn dual_spacing(&self) -> f64 {
        2.0 * PI / self.side()
    }

    /// Frequency of FFT-ordered index `k` along one axis.
    pub fn freq(&self, k: usize) -> f64 {
        let s = if k < self.n / 2 { k as f64 } else { k as f64 - self.n as f64 };
        s * self.dual_spacing()
    }

    /// Same spacing and center, `factor` times as many points per side.
    pub fn padded(&self, factor: usize) -> Grid {
        Grid { n: self.n * factor, ..*self }
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self.n == other.n
            && (self.h - other.h).abs() <= 1e-12 * self.h
            && (self.center[0] - other.center[0]).abs() <= 1e-12 * self.h
            && (self.center[1] - other.center[1]).abs() <= 1e-12 * self.h
    }

    /// At least 16 points per wavelength, required wherever the resolvent is
    /// applied.
    pub fn check_wavelength_resolution(&self) -> Result<()> {
        if self.h > 2.0 * PI / 16.0 * (1.0 + 1e-12) {
            Err(Error::Resolution(format!(
                "h = {} exceeds 2 pi/16; the resolvent needs 16 points per wavelength",
                self.h
            )))
        } else {
            Ok(())
        }
    }
}

/// Samples of a function on a [`Grid`], row-major with `x1` fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField<T: Sample = Complex64> {
    grid: Grid,
    data: Vec<T>,
}

/// Real-valued field.
pub type RealField = GridField<f64>;

impl<T: Sample> GridField<T> {
    pub fn zeros(grid: Grid) -> Self {
        GridField { grid, data: vec![T::default(); grid.len()] }
    }

    pub fn from_vec(grid: Grid, data: Vec<T>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::InvalidArgument(format!("expected {} samples, got {}", grid.len(), data.len())));
        }
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite sample at index {k}")));
        }
        Ok(GridField { grid, data })
    }

    /// Samples `f(x1, x2)` at every grid point.
    pub fn from_fn<F>(grid: Grid, f: F) -> Self
    where
        F: Fn(f64, f64) -> T + Sync + Send,
    {
        let mut data = vec![T::default(); grid.len()];
        par::for_each_row(&mut data, grid.n, |j, row| {
            let y = grid.center[1] + grid.offset(j);
            for (i, v) in row.iter_mut().enumerate() {
                *v = f(grid.center[0] + grid.offset(i), y);
            }
        });
        GridField { grid, data }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn samples(&self) -> &[T] {
        &self.data
    }
    pub fn samples_mut(&mut self) -> &mut [T] {
        &mut self.data
    }
    pub fn into_samples(self) -> Vec<T> {
        self.data
    }

    pub fn map<U: Sample, F>(&self, f: F) -> GridField<U>
    where
        F: Fn(T) -> U + Sync + Send,
    {
        let n = self.grid.n;
        let mut data = vec![U::default(); self.data.len()];
        par::for_each_row(&mut data, n, |j, row| {
            let src = &self.data[j * n..(j + 1) * n];
            for (o, &s) in row.iter_mut().zip(src) {
                *o = f(s);
            }
        });
        GridField { grid: self.grid, data }
    }

    pub fn to_complex(&self) -> GridField<Complex64> {
        self.map(|v| v.to_complex())
    }

    pub fn scaled(&self, a: f64) -> Self {
        self.map(|v| v.scale(a))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.norm()))
    }

    /// Copy of the samples inside a larger grid with the same spacing and
    /// center (zero elsewhere).
    pub fn pad(&self, factor: usize) -> Self {
        let big = self.grid.padded(factor);
        let (n, nb) = (self.grid.n, big.n);
        let off = (nb - n) / 2;
        let mut data = vec![T::default(); big.len()];
        for j in 0..n {
            let dst = (j + off) * nb + off;
            data[dst..dst + n].copy_from_slice(&self.data[j * n..(j + 1) * n]);
        }
        GridField { grid: big, data }
    }

    /// Central `n x n` block of a padded field.
    pub fn crop(&self, n: usize) -> Result<Self> {
        let nb = self.grid.n;
        if n > nb || !n.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("cannot crop {nb} to {n}")));
        }
        let small = Grid::with_center(n, self.grid.h, self.grid.center)?;
        let off = (nb - n) / 2;
        let mut data = Vec::with_capacity(small.len());
        for j in 0..n {
            let src = (j + off) * nb + off;
            data.extend_from_slice(&self.data[src..src + n]);
        }
        Ok(GridField { grid: small, data })
    }

    /// Circular shift by `(si, sj)` grid steps: `out(x) = self(x - (si, sj) h)`.
    pub fn shifted(&self, si: i64, sj: i64) -> Self {
        let n = self.grid.n as i64;
        let mut data = vec![T::default(); self.data.len()];
        for j in 0..n {
            let jj = (j - sj).rem_euclid(n);
            for i in 0..n {
                let ii = (i - si).rem_euclid(n);
                data[(j * n + i) as usize] = self.data[(jj * n + ii) as usize];
            }
        }
        GridField { grid: self.grid, data }
    }

    fn check_same_grid<U: Sample>(&self, other: &GridField<U>) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

impl GridField<Complex64> {
    pub fn re(&self) -> RealField {
        self.map(|v| v.re)
    }
    pub fn im(&self) -> RealField {
        self.map(|v| v.im)
    }
    /// True when every imaginary part is at most `tol` times the largest
    /// modulus.
    pub fn is_real(&self, tol: f64) -> bool {
        let m = self.max_abs();
        self.data.iter().all(|v| v.im.abs() <= tol * m)
    }
}

/// Discrete approximation of the continuous transform on the dual grid,
/// FFT-ordered.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }
    pub fn coefficients_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }
    /// Frequency vector of flat index `k`.
    pub fn xi(&self, k: usize) -> [f64; 2] {
        let n = self.grid.n;
        [self.grid.freq(k % n), self.grid.freq(k / n)]
    }
}

/// `Ff(xi) ~ (2 pi)^-1 h^2 sum_x f(x) e^{-i x.xi}` at every dual grid point.
pub fn fft_forward<T: Sample>(f: &GridField<T>) -> Spectrum {
    let g = f.grid;
    let n = g.n;
    let mut buf: Vec<Complex64> = f.data.iter().map(|v| v.to_complex()).collect();
    Fft2::new(n).forward(&mut buf);
    let scale = g.cell() / (2.0 * PI);
    let [cx, cy] = g.center;
    par::for_each_row(&mut buf, n, |j, row| {
        let ky = g.freq(j);
        for (i, c) in row.iter_mut().enumerate() {
            let kx = g.freq(i);
            let sign = if (i + j) % 2 == 0 { scale } else { -scale };
            *c *= Complex64::from_polar(sign, -(cx * kx + cy * ky));
        }
    });
    Spectrum { grid: g, coeffs: buf }
}

/// Inverse of [`fft_forward`]: `f(x) ~ (2 pi)^-1 (2 pi / L)^2 sum_xi Ff(xi) e^{i x.xi}`.
pub fn fft_inverse(s: &Spectrum) -> GridField<Complex64> {
    let g = s.grid;
    let n = g.n;
    let mut buf = s.coeffs.clone();
    let scale = g.dual_spacing().powi(2) / (2.0 * PI);
    let [cx, cy] = g.center;
    par::for_each_row(&mut buf, n, |j, row| {
        let ky = g.freq(j);
        for (i, c) in row.iter_mut().enumerate() {
            let kx = g.freq(i);
            let sign = if (i + j) % 2 == 0 { scale } else { -scale };
            *c *= Complex64::from_polar(sign, cx * kx + cy * ky);
        }
    });
    Fft2::new(n).inverse(&mut buf);
    GridField { grid: g, data: buf }
}

/// Rearranges kernel samples so the center sample lands at index 0
/// (the 2-D `ifftshift` for even `n`).
pub fn center_to_origin<T: Sample>(k: &GridField<T>) -> Vec<T> {
    k.shifted(-((k.grid.n / 2) as i64), -((k.grid.n / 2) as i64)).data
}

/// `(k * f)(x) = int k(x - y) f(y) dy` as a circular sum on the grid.
///
/// `k` is read as a function of the offset from its grid center. The sum is
/// periodic, so callers pad (see [`GridField::pad`]) when wrap-around matters.
pub fn convolve<A: Sample, B: Sample>(f: &GridField<A>, k: &GridField<B>) -> Result<GridField<Complex64>> {
    if f.grid.n != k.grid.n || (f.grid.h - k.grid.h).abs() > 1e-12 * f.grid.h {
        return Err(Error::GridMismatch);
    }
    let n = f.grid.n;
    let fft = Fft2::new(n);
    let mut a: Vec<Complex64> = f.data.iter().map(|v| v.to_complex()).collect();
    let mut b: Vec<Complex64> = center_to_origin(k).into_iter().map(|v| v.to_complex()).collect();
    fft.forward(&mut a);
    fft.forward(&mut b);
    let scale = f.grid.cell() / (n * n) as f64;
    par::for_each_row(&mut a, n, |j, row| {
        for (i, v) in row.iter_mut().enumerate() {
            *v *= b[j * n + i] * scale;
        }
    });
    fft.inverse(&mut a);
    Ok(GridField { grid: f.grid, data: a })
}

/// `(h^2 sum |f|^p)^(1/p)`, or the max norm for `p = inf`.
pub fn lp_norm<T: Sample>(f: &GridField<T>, p: f64) -> Result<f64> {
    if p.is_infinite() && p > 0.0 {
        return Ok(f.max_abs());
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("Lp exponent must be >= 1, got {p}")));
    }
    let d = &f.data;
    let s = if p == 2.0 {
        par::sum_by_rows(d.len(), f.grid.n, |k| {
            let a = d[k].norm();
            a * a
        })
    } else {
        par::sum_by_rows(d.len(), f.grid.n, |k| d[k].norm().powf(p))
    };
    Ok((f.grid.cell() * s).powf(1.0 / p))
}

/// `h^2 sum f g` for real fields.
pub fn inner(f: &RealField, g: &RealField) -> Result<f64> {
    f.check_same_grid(g)?;
    let (a, b) = (&f.data, &g.data);
    Ok(f.grid.cell() * par::sum_by_rows(a.len(), f.grid.n, |k| a[k] * b[k]))
}

/// One grid sample inside an annulus.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnulusSample<T> {
    pub point: [f64; 2],
    pub radius: f64,
    pub value: T,
}

/// Samples with `r_in <= |x - center| <= r_out`, in storage order.
pub fn restrict_annulus<T: Sample>(f: &GridField<T>, r_in: f64, r_out: f64) -> Vec<AnnulusSample<T>> {
    let g = &f.grid;
    let mut out = Vec::new();
    if !(r_out > r_in) || r_in < 0.0 {
        return out;
    }
    for (k, &v) in f.data.iter().enumerate() {
        let r = g.radius(k);
        if r >= r_in && r <= r_out {
            out.push(AnnulusSample { point: g.point(k), radius: r, value: v });
        }
    }
    out
}
