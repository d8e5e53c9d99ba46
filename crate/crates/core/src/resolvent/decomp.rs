use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use super::{sampled_phi, smoothstep, CutoffSpec};
use crate::error::{Error, Result};
use crate::field::{self, center_to_origin, Fft2, Grid, GridField};
use crate::fit::linear_fit;
use crate::par;

/// Sampled `Phi` split into the part `Phi1` whose spectrum lives near the unit
/// circle and the remainder `Phi2`.
#[derive(Clone, Debug)]
pub struct KernelDecomposition {
    pub phi: GridField<Complex64>,
    pub phi1: GridField<Complex64>,
    pub phi2: GridField<Complex64>,
    pub psi_spec: CutoffSpec,
}

impl KernelDecomposition {
    /// Builds the split on a grid centered at the origin with the shape of
    /// `grid`. `Phi` is tapered to zero at half the side.
    pub fn build(grid: &Grid) -> Result<Self> {
        Self::with_cutoff(grid, CutoffSpec::psi())
    }

    pub fn with_cutoff(grid: &Grid, psi_spec: CutoffSpec) -> Result<Self> {
        let g = Grid::new(grid.n(), grid.h())?;
        let collar = psi_spec.outer_zero - psi_spec.inner_flat;
        if g.dual_spacing() > collar / 2.0 {
            return Err(Error::Resolution(format!(
                "dual spacing {:.4} does not resolve a collar of width {collar:.4}",
                g.dual_spacing()
            )));
        }
        let phi = sampled_phi(&g, 0.5 * g.side());
        let phi1 = spectral_filter(&phi, |rho| psi_spec.eval(rho));
        let phi2 = GridField::from_vec(g, phi.samples().iter().zip(phi1.samples()).map(|(a, b)| a - b).collect())?;
        Ok(KernelDecomposition { phi, phi1, phi2, psi_spec })
    }

    pub fn grid(&self) -> &Grid {
        self.phi.grid()
    }
}

/// `F^-1[m(|xi|) F k]` for a kernel sampled about its grid center.
fn spectral_filter<F>(k: &GridField<Complex64>, m: F) -> GridField<Complex64>
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    let g = *k.grid();
    let n = g.n();
    let fft = Fft2::new(n);
    let mut buf = center_to_origin(k);
    fft.forward(&mut buf);
    apply_radial(&mut buf, &g, |rho| m(rho) / (n * n) as f64);
    fft.inverse(&mut buf);
    let shifted = GridField::from_vec(g, buf).expect("filter output has the input shape");
    shifted.shifted((n / 2) as i64, (n / 2) as i64)
}

fn apply_radial<F>(buf: &mut [Complex64], g: &Grid, m: F)
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    par::for_each_row(buf, g.n(), |j, row| {
        let ky = g.freq(j);
        for (i, v) in row.iter_mut().enumerate() {
            *v *= m(g.freq(i).hypot(ky));
        }
    });
}

/// Radial profile equal to 1 on `r <= 1` and 0 on `r >= 2`.
pub fn eta(r: f64) -> f64 {
    1.0 - smoothstep(2, r - 1.0)
}

/// Dyadic cutoff `phi_0 = eta`, `phi_j = eta(r/2^j) - eta(r/2^(j-1))`.
pub fn dyadic_weight(j: u32, r: f64) -> f64 {
    if j == 0 {
        eta(r)
    } else {
        let s = 2f64.powi(j as i32);
        eta(r / s) - eta(2.0 * r / s)
    }
}

/// `Q^j = (Phi1 phi_j) * phi`, the j-th dyadic piece of `Phi1` smoothed by the
/// collar filter.
#[derive(Clone, Debug)]
pub struct DyadicPiece {
    pub j: u32,
    pub field: GridField<Complex64>,
    /// Support of `phi_j`, `[2^(j-1), 2^(j+1)]`.
    pub annulus: [f64; 2],
}

fn check_dyadic(decomp: &KernelDecomposition, j: u32) -> Result<()> {
    if 2f64.powi(j as i32 + 1) >= 0.5 * decomp.grid().side() {
        return Err(Error::InvalidArgument(format!("dyadic index {j}: annulus reaches past half the grid side")));
    }
    Ok(())
}

/// Unnormalised DFT of `Q^j` (origin-shifted), i.e. `phi_hat * DFT(Phi1 phi_j)`.
fn dyadic_dft(decomp: &KernelDecomposition, j: u32, fft: &Fft2) -> Vec<Complex64> {
    let g = *decomp.grid();
    let collar = CutoffSpec::phi();
    let weighted = GridField::from_vec(
        g,
        decomp.phi1.samples().iter().enumerate().map(|(k, v)| v * dyadic_weight(j, g.radius(k))).collect(),
    )
    .expect("same shape");
    let mut buf = center_to_origin(&weighted);
    fft.forward(&mut buf);
    apply_radial(&mut buf, &g, |rho| collar.eval(rho));
    buf
}

pub fn dyadic_piece(decomp: &KernelDecomposition, j: u32) -> Result<DyadicPiece> {
    check_dyadic(decomp, j)?;
    let g = *decomp.grid();
    let n = g.n();
    let fft = Fft2::new(n);
    let mut buf = dyadic_dft(decomp, j, &fft);
    fft.inverse(&mut buf);
    let inv = 1.0 / (n * n) as f64;
    for v in buf.iter_mut() {
        *v *= inv;
    }
    let field = GridField::from_vec(g, buf)?.shifted((n / 2) as i64, (n / 2) as i64);
    let annulus = if j == 0 { [0.0, 2.0] } else { [2f64.powi(j as i32 - 1), 2f64.powi(j as i32 + 1)] };
    Ok(DyadicPiece { j, field, annulus })
}

/// Seeded family of test functions: Gaussians `exp(-lambda^2 |x - c|^2 / 2)`
/// with `lambda = 2^u`, `u` uniform in [-3, 3], modulated by `e^{i omega.x}`
/// with `|omega|` uniform in [0, 4]; centers uniform in [-2, 2]^2.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeFamily {
    pub seed: u64,
    params: Vec<ProbeParams>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct ProbeParams {
    lambda: f64,
    omega: [f64; 2],
    center: [f64; 2],
}

impl ProbeFamily {
    pub fn new(seed: u64, count: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = (0..count)
            .map(|_| {
                let lambda = 2f64.powf(rng.random_range(-3.0..3.0));
                let w: f64 = rng.random_range(0.0..4.0);
                let a: f64 = rng.random_range(0.0..2.0 * PI);
                let c = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
                ProbeParams { lambda, omega: [w * a.cos(), w * a.sin()], center: c }
            })
            .collect();
        ProbeFamily { seed, params }
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn probe(&self, i: usize, grid: &Grid) -> GridField<Complex64> {
        let p = self.params[i];
        GridField::from_fn(*grid, |x, y| {
            let (dx, dy) = (x - p.center[0], y - p.center[1]);
            let env = (-0.5 * p.lambda * p.lambda * (dx * dx + dy * dy)).exp();
            Complex64::from_polar(env, p.omega[0] * x + p.omega[1] * y)
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct DyadicRow {
    pub j: u32,
    pub sup_norm: f64,
    /// Worst `||Q^j * f||_2 / ||f||_{6/5}` over the probe family.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct DyadicScan {
    pub rows: Vec<DyadicRow>,
    /// Slope of `log2 sup_norm` against `j`.
    pub sup_slope: f64,
    /// Slope of `log2 ratio` against `j`.
    pub ratio_slope: f64,
}

/// Sup norms and probe ratios of the dyadic pieces `j` in `js`.
pub fn dyadic_norm_scan(decomp: &KernelDecomposition, js: &[u32], probes: &ProbeFamily) -> Result<DyadicScan> {
    for &j in js {
        check_dyadic(decomp, j)?;
    }
    if js.len() < 2 || probes.is_empty() {
        return Err(Error::InvalidArgument("scan needs two indices and a probe".into()));
    }
    let g = *decomp.grid();
    let n = g.n();
    let fft = Fft2::new(n);
    let inv = 1.0 / (n * n) as f64;
    let mut spectra = Vec::with_capacity(js.len());
    let mut sups = Vec::with_capacity(js.len());
    for &j in js {
        let spec = dyadic_dft(decomp, j, &fft);
        let mut buf = spec.clone();
        fft.inverse(&mut buf);
        sups.push(buf.iter().fold(0.0f64, |m, v| m.max(v.norm())) * inv);
        spectra.push(spec);
    }
    let mut ratios = vec![0.0f64; js.len()];
    let scale = g.cell() * inv;
    for i in 0..probes.len() {
        let f = probes.probe(i, &g);
        let denom = field::lp_norm(&f, 1.2)?;
        let mut fhat = center_to_origin(&f);
        // the probe is read relative to the grid center, matching the kernel
        fft.forward(&mut fhat);
        for (r, spec) in ratios.iter_mut().zip(&spectra) {
            let mut buf: Vec<Complex64> = fhat.iter().zip(spec).map(|(a, b)| a * b * scale).collect();
            fft.inverse(&mut buf);
            let s = par::sum_by_rows(buf.len(), n, |k| buf[k].norm_sqr());
            *r = r.max((g.cell() * s).sqrt() / denom);
        }
    }
    let rows: Vec<DyadicRow> = js
        .iter()
        .zip(sups.iter().zip(&ratios))
        .map(|(&j, (&sup_norm, &ratio))| DyadicRow { j, sup_norm, ratio })
        .collect();
    let x: Vec<f64> = js.iter().map(|&j| j as f64).collect();
    let ls: Vec<f64> = rows.iter().map(|r| r.sup_norm.log2()).collect();
    let lr: Vec<f64> = rows.iter().map(|r| r.ratio.log2()).collect();
    Ok(DyadicScan { sup_slope: linear_fit(&x, &ls)?.slope, ratio_slope: linear_fit(&x, &lr)?.slope, rows })
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct TruncatedRow {
    pub radius: f64,
    /// Worst `||(1_{|x| >= R} Phi1) * f||_p / ||f||_{p'}`.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct TruncatedScan {
    pub p: f64,
    /// `1/2 - 3/p`.
    pub lambda_p: f64,
    pub rows: Vec<TruncatedRow>,
    /// Slope of `log ratio` against `log R`.
    pub exponent: f64,
    /// False for `p <= 6`, where no decay is predicted and the sign of the
    /// exponent is not checked.
    pub sign_check: bool,
}

/// Worst probe ratio of the truncated kernels `1_{|x| >= R} Phi1` for each
/// `R`. Probes are band-limited by [`CutoffSpec::chi`]; convolutions run on
/// the grid padded by two.
pub fn truncated_phi1_scan(
    decomp: &KernelDecomposition,
    radii: &[f64],
    p: f64,
    probes: &ProbeFamily,
) -> Result<TruncatedScan> {
    if !(p > 1.0) {
        return Err(Error::InvalidArgument(format!("exponent must exceed 1, got {p}")));
    }
    if radii.len() < 2 || radii.iter().any(|&r| !(r > 0.0)) || probes.is_empty() {
        return Err(Error::InvalidArgument("scan needs two positive radii and a probe".into()));
    }
    let pp = p / (p - 1.0);
    let g = *decomp.grid();
    let big = g.padded(2);
    let nb = big.n();
    let fft = Fft2::new(nb);
    let inv = 1.0 / (nb * nb) as f64;
    let scale = g.cell() * inv;
    let mut spectra = Vec::with_capacity(radii.len());
    for &rc in radii {
        let k = GridField::from_vec(
            g,
            decomp
                .phi1
                .samples()
                .iter()
                .enumerate()
                .map(|(k, v)| if g.radius(k) >= rc { *v } else { Complex64::default() })
                .collect(),
        )?
        .pad(2);
        let mut buf = center_to_origin(&k);
        fft.forward(&mut buf);
        spectra.push(buf);
    }
    let chi = CutoffSpec::chi();
    let mut ratios = vec![0.0f64; radii.len()];
    for i in 0..probes.len() {
        let f = spectral_filter(&probes.probe(i, &g), |rho| chi.eval(rho)).pad(2);
        let denom = field::lp_norm(&f, pp)?;
        let mut fhat = center_to_origin(&f);
        fft.forward(&mut fhat);
        for (r, spec) in ratios.iter_mut().zip(&spectra) {
            let mut buf: Vec<Complex64> = fhat.iter().zip(spec).map(|(a, b)| a * b * scale).collect();
            fft.inverse(&mut buf);
            let s = par::sum_by_rows(buf.len(), nb, |k| buf[k].norm().powf(p));
            *r = r.max((g.cell() * s).powf(1.0 / p) / denom);
        }
    }
    let rows: Vec<TruncatedRow> =
        radii.iter().zip(&ratios).map(|(&radius, &ratio)| TruncatedRow { radius, ratio }).collect();
    let x: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let y: Vec<f64> = ratios.iter().map(|r| r.ln()).collect();
    Ok(TruncatedScan { p, lambda_p: 0.5 - 3.0 / p, exponent: linear_fit(&x, &y)?.slope, sign_check: p > 6.0, rows })
}
