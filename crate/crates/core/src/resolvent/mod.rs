//! The outgoing resolvent `R f = Phi * f` of `-Δ - 1`, its real part `**R**`
//! (convolution with `Re Phi = -Y0/4`), the weighted operator
//! `K v = Q^{1/p} **R**(Q^{1/p} v)`, and the kernel experiments built on the
//! split `Phi = Phi1 + Phi2`.
//!
//! Two backends are provided. [`Resolvent`] convolves with samples of `Phi`
//! on a grid padded by two, tapered smoothly to zero over the last tenth of
//! the padded radius; [`apply_resolvent_multiplier`] applies
//! `(|xi|^2 - 1 - i eps)^-1` spectrally and is extrapolated to `eps -> 0` by
//! [`apply_resolvent_extrapolated`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{self, center_to_origin, Fft2, Grid, GridField, RealField};
use crate::par;
use crate::specfun;

mod decomp;
mod endpoint;

pub use decomp::{
    dyadic_norm_scan, dyadic_piece, dyadic_weight, eta, truncated_phi1_scan, DyadicPiece, DyadicRow, DyadicScan,
    KernelDecomposition, ProbeFamily, TruncatedRow, TruncatedScan,
};
pub use endpoint::{endpoint_bump, endpoint_counterexample, EndpointRow, EndpointScan};

/// Fraction of the kernel radius over which the taper falls from 1 to 0.
pub const TAPER_WIDTH: f64 = 0.1;

/// Default limiting-absorption sequence.
pub const DEFAULT_EPS: [f64; 3] = [0.2, 0.1, 0.05];

/// Polynomial smoothstep of the given order: 1 is `3t^2 - 2t^3` (C1),
/// 2 is `6t^5 - 15t^4 + 10t^3` (C2), 3 is the C3 septic. Clamped to [0, 1].
pub fn smoothstep(order: u32, t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    match order {
        0 => t,
        1 => t * t * (3.0 - 2.0 * t),
        2 => t * t * t * (10.0 + t * (-15.0 + 6.0 * t)),
        _ => t.powi(4) * (35.0 + t * (-84.0 + t * (70.0 - 20.0 * t))),
    }
}

/// Radial taper: 1 up to `(1 - TAPER_WIDTH) r_max`, 0 from `r_max` on.
pub fn kernel_taper(r: f64, r_max: f64) -> f64 {
    let r0 = (1.0 - TAPER_WIDTH) * r_max;
    1.0 - smoothstep(2, (r - r0) / (r_max - r0))
}

/// Radial frequency profile equal to 1 on `||xi| - 1| <= inner_flat` and 0
/// beyond `outer_zero`, joined by a polynomial smoothstep.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CutoffSpec {
    pub inner_flat: f64,
    pub outer_zero: f64,
    pub order: u32,
}

impl CutoffSpec {
    pub fn new(inner_flat: f64, outer_zero: f64, order: u32) -> Result<Self> {
        if !(0.0 < inner_flat && inner_flat < outer_zero) {
            return Err(Error::InvalidArgument(format!(
                "cutoff needs 0 < inner_flat < outer_zero, got {inner_flat}, {outer_zero}"
            )));
        }
        if !(1..=3).contains(&order) {
            return Err(Error::InvalidArgument(format!("smoothstep order {order} not in 1..=3")));
        }
        Ok(CutoffSpec { inner_flat, outer_zero, order })
    }

    /// The collar defining `Phi1`: flat on 1/6, zero beyond 1/4.
    pub fn psi() -> Self {
        CutoffSpec { inner_flat: 1.0 / 6.0, outer_zero: 0.25, order: 2 }
    }

    /// The collar used for the dyadic pieces: flat on 1/2, zero beyond 3/4.
    pub fn phi() -> Self {
        CutoffSpec { inner_flat: 0.5, outer_zero: 0.75, order: 2 }
    }

    /// Band-limiting filter for the truncated-kernel probes: support inside
    /// `||xi| - 1| <= 1/2`.
    pub fn chi() -> Self {
        CutoffSpec { inner_flat: 0.25, outer_zero: 0.5, order: 2 }
    }

    pub fn eval(&self, rho: f64) -> f64 {
        let d = (rho - 1.0).abs();
        1.0 - smoothstep(self.order, (d - self.inner_flat) / (self.outer_zero - self.inner_flat))
    }
}

/// Real-linear operators acting on real samples of a fixed grid; the solvers
/// in [`crate::dualvar`] are written against this.
pub trait RealOperator: Sync {
    fn grid(&self) -> &Grid;
    /// `**R** f` for real `f` on [`RealOperator::grid`].
    fn apply_real(&self, f: &[f64]) -> Vec<f64>;
    /// Short description recorded in solver reports.
    fn describe(&self) -> String;
}

/// Samples of `Phi` (tapered at `r_max`) on `grid`, as offsets from the
/// grid center.
fn sampled_phi(grid: &Grid, r_max: f64) -> GridField<Complex64> {
    let h = grid.h();
    let origin = specfun::phi_origin_sample(h);
    let c = grid.center();
    GridField::from_fn(*grid, |x, y| {
        let r = (x - c[0]).hypot(y - c[1]);
        if r == 0.0 {
            origin
        } else if r >= r_max {
            Complex64::default()
        } else {
            // r > 0 here, so the evaluation cannot fail
            specfun::eval_phi(r).unwrap_or_default() * kernel_taper(r, r_max)
        }
    })
}

/// Spectrum of a centered kernel scaled so that
/// `conv = IDFT(DFT(f) * spectrum)` with the unnormalised transforms.
fn kernel_spectrum(k: &GridField<Complex64>, fft: &Fft2) -> Vec<Complex64> {
    let g = k.grid();
    let n = g.n();
    let mut buf = center_to_origin(k);
    fft.forward(&mut buf);
    let scale = g.cell() / (n * n) as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
    buf
}

/// Kernel backend of the outgoing resolvent on a fixed grid.
///
/// The input grid is zero-padded by two; `Phi` is sampled on the padded grid
/// out to half its side. The kernel spectrum is computed once.
#[derive(Debug)]
pub struct Resolvent {
    grid: Grid,
    padded: Grid,
    fft: Fft2,
    spectrum: Vec<Complex64>,
}

/// Output of [`Resolvent::apply`].
#[derive(Clone, Debug)]
pub struct ResolventOutput {
    pub u: GridField<Complex64>,
    /// Set when more than `1e-8` of the input mass lies outside radius `L/4`.
    pub support_warning: bool,
}

impl Resolvent {
    pub fn new(grid: Grid) -> Result<Self> {
        grid.check_wavelength_resolution()?;
        let padded = grid.padded(2);
        let fft = Fft2::new(padded.n());
        let centered = Grid::new(padded.n(), padded.h())?;
        let k = sampled_phi(&centered, 0.5 * padded.side());
        let spectrum = kernel_spectrum(&k, &fft);
        Ok(Resolvent { grid, padded, fft, spectrum })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn padded_grid(&self) -> &Grid {
        &self.padded
    }

    fn check(&self, g: &Grid) -> Result<()> {
        if self.grid.same_as(g) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    fn convolve_padded(&self, f: &[Complex64], real_kernel: bool, crop: bool) -> Vec<Complex64> {
        let n = self.grid.n();
        let nb = self.padded.n();
        let off = (nb - n) / 2;
        let mut buf = vec![Complex64::default(); nb * nb];
        for j in 0..n {
            let dst = (j + off) * nb + off;
            buf[dst..dst + n].copy_from_slice(&f[j * n..(j + 1) * n]);
        }
        self.fft.forward_sparse_rows(&mut buf, off..off + n);
        let spec = &self.spectrum;
        par::for_each_row(&mut buf, nb, |j, row| {
            let s = &spec[j * nb..(j + 1) * nb];
            if real_kernel {
                for (v, k) in row.iter_mut().zip(s) {
                    *v *= k.re;
                }
            } else {
                for (v, k) in row.iter_mut().zip(s) {
                    *v *= k;
                }
            }
        });
        if crop {
            self.fft.inverse_partial(&mut buf, off..off + n);
            let mut out = Vec::with_capacity(n * n);
            for j in 0..n {
                let src = (j + off) * nb + off;
                out.extend_from_slice(&buf[src..src + n]);
            }
            out
        } else {
            self.fft.inverse(&mut buf);
            buf
        }
    }

    /// `u = Phi * f` on the input grid.
    pub fn apply(&self, f: &GridField<Complex64>) -> Result<ResolventOutput> {
        self.check(f.grid())?;
        let support_warning = support_violation(f);
        let data = self.convolve_padded(f.samples(), false, true);
        Ok(ResolventOutput { u: GridField::from_vec(self.grid, data)?, support_warning })
    }

    /// `Phi * f` on the whole padded grid.
    pub fn apply_padded(&self, f: &GridField<Complex64>) -> Result<GridField<Complex64>> {
        self.check(f.grid())?;
        let data = self.convolve_padded(f.samples(), false, false);
        GridField::from_vec(self.padded, data)
    }

    /// `**R** f = Re(Phi) * f` for real `f`. Complex input is rejected.
    pub fn apply_re(&self, f: &GridField<Complex64>) -> Result<RealField> {
        if !f.is_real(0.0) {
            return Err(Error::InvalidArgument("the real-part operator is defined on real data".into()));
        }
        self.check(f.grid())?;
        GridField::from_vec(self.grid, self.apply_real(&f.re().into_samples()))
    }

    /// Relative spectral residual `||(-Δ - 1) u - f||_2 / ||f||_2` of
    /// `u = Phi * f`, with the Laplacian taken spectrally on the padded grid
    /// and the norm over the input grid.
    pub fn spectral_residual(&self, f: &GridField<Complex64>) -> Result<f64> {
        let u = self.apply_padded(f)?;
        let lu = helmholtz_operator(&u);
        let lu = lu.crop(self.grid.n())?;
        let diff = GridField::from_vec(self.grid, lu.samples().iter().zip(f.samples()).map(|(a, b)| a - b).collect())?;
        Ok(field::lp_norm(&diff, 2.0)? / field::lp_norm(f, 2.0)?)
    }
}

impl RealOperator for Resolvent {
    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn apply_real(&self, f: &[f64]) -> Vec<f64> {
        let c: Vec<Complex64> = f.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.convolve_padded(&c, true, true).into_iter().map(|v| v.re).collect()
    }

    fn describe(&self) -> String {
        format!("kernel, n={} h={} padded to {}", self.grid.n(), self.grid.h(), self.padded.n())
    }
}

/// Real-part resolvent on the torus of the grid: circular convolution with
/// `Re Phi` tapered to zero at half the side. Lattice shifts of the grid
/// commute with it exactly, which is what the periodic solver needs.
#[derive(Debug)]
pub struct TorusResolvent {
    grid: Grid,
    fft: Fft2,
    spectrum: Vec<f64>,
}

impl TorusResolvent {
    pub fn new(grid: Grid) -> Result<Self> {
        grid.check_wavelength_resolution()?;
        let fft = Fft2::new(grid.n());
        let centered = Grid::new(grid.n(), grid.h())?;
        let k = sampled_phi(&centered, 0.5 * grid.side());
        let spectrum = kernel_spectrum(&k, &fft).into_iter().map(|c| c.re).collect();
        Ok(TorusResolvent { grid, fft, spectrum })
    }
}

impl RealOperator for TorusResolvent {
    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn apply_real(&self, f: &[f64]) -> Vec<f64> {
        let n = self.grid.n();
        let mut buf: Vec<Complex64> = f.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.fft.forward(&mut buf);
        let spec = &self.spectrum;
        par::for_each_row(&mut buf, n, |j, row| {
            for (v, k) in row.iter_mut().zip(&spec[j * n..(j + 1) * n]) {
                *v *= *k;
            }
        });
        self.fft.inverse(&mut buf);
        buf.into_iter().map(|v| v.re).collect()
    }

    fn describe(&self) -> String {
        format!("torus kernel, n={} h={}", self.grid.n(), self.grid.h())
    }
}

fn support_violation(f: &GridField<Complex64>) -> bool {
    let g = f.grid();
    let quarter = 0.25 * g.side();
    let d = f.samples();
    let total = par::sum_by_rows(d.len(), g.n(), |k| d[k].norm());
    let outside = par::sum_by_rows(d.len(), g.n(), |k| if g.radius(k) > quarter { d[k].norm() } else { 0.0 });
    outside > 1e-8 * total
}

/// `F^-1[m(|xi|) F f]` on the grid's torus.
pub fn radial_multiplier<F>(f: &GridField<Complex64>, m: F) -> GridField<Complex64>
where
    F: Fn(f64) -> Complex64 + Sync + Send,
{
    let g = *f.grid();
    let n = g.n();
    let fft = Fft2::new(n);
    let mut buf = f.samples().to_vec();
    fft.forward(&mut buf);
    let norm = 1.0 / (n * n) as f64;
    par::for_each_row(&mut buf, n, |j, row| {
        let ky = g.freq(j);
        for (i, v) in row.iter_mut().enumerate() {
            *v *= m(g.freq(i).hypot(ky)) * norm;
        }
    });
    fft.inverse(&mut buf);
    GridField::from_vec(g, buf).expect("multiplier output has the input shape")
}

/// `(-Δ - 1) u` with the spectral Laplacian of the grid torus.
pub fn helmholtz_operator(u: &GridField<Complex64>) -> GridField<Complex64> {
    radial_multiplier(u, |rho| Complex64::new(rho * rho - 1.0, 0.0))
}

/// `u_eps = F^-1[(|xi|^2 - 1 - i eps)^-1 F f]`, computed on the grid padded by
/// two and cropped back.
pub fn apply_resolvent_multiplier(f: &GridField<Complex64>, eps: f64) -> Result<GridField<Complex64>> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    let n = f.grid().n();
    let big = f.pad(2);
    let u = radial_multiplier(&big, |rho| Complex64::new(rho * rho - 1.0, -eps).inv());
    u.crop(n)
}

/// Limiting-absorption extrapolation of [`apply_resolvent_multiplier`].
///
/// Each `u_eps` is first multiplied by `exp(-i (k_eps - 1) |x - c|)` with
/// `k_eps = sqrt(1 + i eps)`, which removes the `eps`-dependent decay and
/// phase drift of the outgoing wave; the smooth remainders are then
/// Richardson-extrapolated to `eps = 0`. The sequence must halve at each step.
pub fn apply_resolvent_extrapolated(f: &GridField<Complex64>, eps: &[f64]) -> Result<GridField<Complex64>> {
    if eps.is_empty() {
        return Err(Error::InvalidArgument("empty eps sequence".into()));
    }
    for w in eps.windows(2) {
        if ((w[0] / w[1]) - 2.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument("eps sequence must halve at each step".into()));
        }
    }
    let g = *f.grid();
    let mut table: Vec<Vec<Complex64>> = Vec::with_capacity(eps.len());
    for &e in eps {
        let u = apply_resolvent_multiplier(f, e)?;
        let dk = Complex64::new(1.0, e).sqrt() - 1.0;
        let mut w = u.into_samples();
        for (k, v) in w.iter_mut().enumerate() {
            *v *= (Complex64::new(0.0, -1.0) * dk * g.radius(k)).exp();
        }
        table.push(w);
    }
    // Neville table for an error expansion in powers of eps.
    let m = table.len();
    for level in 1..m {
        let fac = 2f64.powi(level as i32);
        for i in (level..m).rev() {
            let (lo, hi) = table.split_at_mut(i);
            let prev = &lo[i - 1];
            for (a, b) in hi[0].iter_mut().zip(prev) {
                *a = (fac * *a - *b) / (fac - 1.0);
            }
        }
    }
    GridField::from_vec(g, table.pop().unwrap_or_default())
}

/// Relative L2 difference of two fields over the inner half of the grid
/// (`|x - c| <= L/4`).
pub fn inner_half_difference(a: &GridField<Complex64>, b: &GridField<Complex64>) -> Result<f64> {
    if !a.grid().same_as(b.grid()) {
        return Err(Error::GridMismatch);
    }
    let g = a.grid();
    let q = 0.25 * g.side();
    let (x, y) = (a.samples(), b.samples());
    let num = par::sum_by_rows(x.len(), g.n(), |k| if g.radius(k) <= q { (x[k] - y[k]).norm_sqr() } else { 0.0 });
    let den = par::sum_by_rows(x.len(), g.n(), |k| if g.radius(k) <= q { x[k].norm_sqr() } else { 0.0 });
    Ok((num / den).sqrt())
}

/// `||d_r u - i u|| / ||u||` over the annulus `[r_in, r_out]`, with the
/// radial derivative from fourth-order central differences.
pub fn radiation_ratio(u: &GridField<Complex64>, r_in: f64, r_out: f64) -> Result<f64> {
    let g = u.grid();
    let n = g.n();
    let h = g.h();
    if r_out + 3.0 * h > 0.5 * g.side() {
        return Err(Error::InvalidArgument("annulus too close to the grid edge".into()));
    }
    let d = u.samples();
    let at = |i: usize, j: usize| d[j * n + i];
    let mut num = 0.0;
    let mut den = 0.0;
    for j in 2..n - 2 {
        for i in 2..n - 2 {
            let k = j * n + i;
            let r = g.radius(k);
            if r < r_in || r > r_out {
                continue;
            }
            let dx = (at(i - 2, j) - 8.0 * at(i - 1, j) + 8.0 * at(i + 1, j) - at(i + 2, j)) / (12.0 * h);
            let dy = (at(i, j - 2) - 8.0 * at(i, j - 1) + 8.0 * at(i, j + 1) - at(i, j + 2)) / (12.0 * h);
            let (ox, oy) = (g.offset(i) / r, g.offset(j) / r);
            let dr = dx * ox + dy * oy;
            num += (dr - Complex64::i() * d[k]).norm_sqr();
            den += d[k].norm_sqr();
        }
    }
    Ok((num / den).sqrt())
}

/// `K v = Q^{1/p} **R**(Q^{1/p} v)` for fixed weight samples.
#[derive(Clone, Copy)]
pub struct WeightedOperator<'a> {
    op: &'a dyn RealOperator,
    q_root: &'a [f64],
}

impl<'a> WeightedOperator<'a> {
    /// `q_root` holds `Q^{1/p}` on the operator's grid.
    pub fn new(op: &'a dyn RealOperator, q_root: &'a [f64]) -> Result<Self> {
        if q_root.len() != op.grid().len() {
            return Err(Error::GridMismatch);
        }
        Ok(WeightedOperator { op, q_root })
    }

    pub fn grid(&self) -> &Grid {
        self.op.grid()
    }

    pub fn operator(&self) -> &'a dyn RealOperator {
        self.op
    }

    pub fn q_root(&self) -> &'a [f64] {
        self.q_root
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let w: Vec<f64> = v.iter().zip(self.q_root).map(|(a, q)| a * q).collect();
        let mut out = self.op.apply_real(&w);
        for (o, q) in out.iter_mut().zip(self.q_root) {
            *o *= q;
        }
        out
    }
}

/// `Q^{1/p}` of non-negative weight samples.
pub fn weight_root(q: &RealField, p: f64) -> Result<Vec<f64>> {
    if let Some(k) = q.samples().iter().position(|&v| !(v >= 0.0)) {
        return Err(Error::InvalidArgument(format!("negative weight sample at index {k}")));
    }
    Ok(q.samples().iter().map(|&v| v.powf(1.0 / p)).collect())
}

/// `K v` for real `v`, weight `Q >= 0` and exponent `p >= 6`.
pub fn apply_k(op: &dyn RealOperator, v: &RealField, q: &RealField, p: f64) -> Result<RealField> {
    if !(p >= 6.0) {
        return Err(Error::InvalidArgument(format!("exponent must be >= 6, got {p}")));
    }
    if !v.grid().same_as(op.grid()) || !q.grid().same_as(op.grid()) {
        return Err(Error::GridMismatch);
    }
    let root = weight_root(q, p)?;
    let k = WeightedOperator::new(op, &root)?;
    GridField::from_vec(*op.grid(), k.apply(v.samples()))
}
