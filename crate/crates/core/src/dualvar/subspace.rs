use super::{find_density_point, Coefficient};
use crate::error::{Error, Result};
use crate::field::{Grid, RealField};
use crate::fit::symmetric_eigenvalues;
use crate::specfun;

/// `m` bumps on disjoint small balls near a density point of `{Q > 0}`,
/// with their Gram matrix `G_ij = int z_i K z_j`.
#[derive(Clone, Debug)]
pub struct SubspaceConstruction {
    pub m: usize,
    pub p: f64,
    /// Ball radius actually used, after any shrinking.
    pub delta: f64,
    /// `delta / (4 sqrt m)`.
    pub sigma: f64,
    /// `sigma^m / 2`.
    pub tau: f64,
    pub x0: [f64; 2],
    pub centers: Vec<[f64; 2]>,
    pub radii: Vec<f64>,
    /// Each bump on its own fine grid centered at its ball.
    pub bumps: Vec<RealField>,
    /// `Psi*(sigma^m)`, the smallest `Re Phi` on the punctured ball.
    pub psi_star_inner: f64,
    /// `Psi_*(sigma)`, the largest `|Re Phi|` outside the ball.
    pub psi_star_outer: f64,
    /// Row-major `m x m`.
    pub gram: Vec<f64>,
    pub min_eigenvalue: f64,
    /// `(Psi* - (m-1) Psi_*) min_i (int Q^{1/p} z_i)^2`.
    pub lower_bound: f64,
}

impl SubspaceConstruction {
    pub fn psi_inequality(&self) -> bool {
        self.psi_star_inner > (self.m as f64 - 1.0) * self.psi_star_outer
    }
}

/// `inf Re Phi` over `0 < r <= t`, by a logarithmic scan.
pub fn psi_inner(t: f64) -> Result<f64> {
    let n = 2000;
    let mut best = f64::INFINITY;
    for k in 0..=n {
        let r = t * 10f64.powf(-6.0 * (1.0 - k as f64 / n as f64));
        best = best.min(specfun::eval_re_phi(r)?);
    }
    Ok(best)
}

/// `sup |Re Phi|` over `r >= t`: a logarithmic scan near `t` and a uniform
/// one out to `t + 40`, past which the envelope is below every earlier peak.
pub fn psi_outer(t: f64) -> Result<f64> {
    let mut best = 0.0f64;
    for k in 0..=1000 {
        let r = t * (1.0 + k as f64 / 1000.0);
        best = best.max(specfun::eval_re_phi(r)?.abs());
    }
    let mut r = 2.0 * t;
    while r <= t + 40.0 {
        best = best.max(specfun::eval_re_phi(r)?.abs());
        r += 1e-3;
    }
    Ok(best)
}

/// Points per side of each bump's local grid.
const BUMP_N: usize = 32;
/// Smallest admissible ball radius.
const MIN_TAU: f64 = 1e-9;

/// Picks `m` balls of radius `tau = sigma^m / 2` inside `B_delta(x0)` where
/// `Q > 0`, pairwise separated by at least `sigma`, and builds the bumps
/// `(1 - |x - x_i|^2 / tau^2)^2`. `delta` is halved until
/// `Psi*(sigma^m) > (m-1) Psi_*(sigma)`. Without `x0` the density point is
/// searched on the coefficient grid.
pub fn build_positive_subspace(
    q: &Coefficient,
    p: f64,
    m: usize,
    delta: f64,
    x0: Option<[f64; 2]>,
) -> Result<SubspaceConstruction> {
    if m == 0 || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("need m >= 1 and 0 < delta < 1, got {m}, {delta}")));
    }
    if !(p >= 6.0) {
        return Err(Error::InvalidArgument(format!("exponent must be >= 6, got {p}")));
    }
    let x0 = match x0 {
        Some(x) => x,
        None => find_density_point(q, delta)?,
    };
    let mut delta = delta;
    let (sigma, tau, psi_in, psi_out) = loop {
        let sigma = delta / (4.0 * (m as f64).sqrt());
        let tau = 0.5 * sigma.powi(m as i32);
        if tau < MIN_TAU {
            return Err(Error::Resolution(format!(
                "m = {m}: ball radius sigma^m/2 = {tau:.3e} below resolution before the Psi inequality held"
            )));
        }
        let psi_in = psi_inner(2.0 * tau)?;
        let psi_out = psi_outer(sigma)?;
        if psi_in > (m as f64 - 1.0) * psi_out {
            break (sigma, tau, psi_in, psi_out);
        }
        delta *= 0.5;
    };
    let desc = *q.descriptor();
    let thr = 1e-8 * q.samples().max_abs();
    let centers = select_centers(x0, delta, sigma, tau, m, |x| desc.eval(x) > thr)?;
    let weight = |x: [f64; 2]| desc.eval(x).powf(1.0 / p);
    let h = 2.0 * tau / (BUMP_N as f64 / 2.0);
    let mut bumps = Vec::with_capacity(m);
    let mut pts: Vec<Vec<([f64; 2], f64)>> = Vec::with_capacity(m);
    for &c in &centers {
        let g = Grid::with_center(BUMP_N, h, c)?;
        let z = RealField::from_fn(g, |x, y| {
            let s = ((x - c[0]).powi(2) + (y - c[1]).powi(2)) / (tau * tau);
            if s < 1.0 {
                (1.0 - s).powi(2)
            } else {
                0.0
            }
        });
        let list = z
            .samples()
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0.0)
            .map(|(k, &v)| {
                let x = g.point(k);
                (x, v * weight(x))
            })
            .collect();
        pts.push(list);
        bumps.push(z);
    }
    let origin = specfun::phi_origin_sample(h).re;
    let mut gram = vec![0.0; m * m];
    for i in 0..m {
        for j in i..m {
            let mut s = 0.0;
            for &(x, a) in &pts[i] {
                for &(y, b) in &pts[j] {
                    let r = (x[0] - y[0]).hypot(x[1] - y[1]);
                    let k = if r == 0.0 { origin } else { specfun::eval_re_phi(r)? };
                    s += a * k * b;
                }
            }
            let v = h.powi(4) * s;
            gram[i * m + j] = v;
            gram[j * m + i] = v;
        }
    }
    let masses: Vec<f64> = pts.iter().map(|l| h * h * l.iter().map(|t| t.1).sum::<f64>()).collect();
    let min_mass = masses.iter().cloned().fold(f64::INFINITY, f64::min);
    let ev = symmetric_eigenvalues(&gram, m);
    Ok(SubspaceConstruction {
        m,
        p,
        delta,
        sigma,
        tau,
        x0,
        radii: vec![tau; m],
        centers,
        bumps,
        psi_star_inner: psi_in,
        psi_star_outer: psi_out,
        min_eigenvalue: ev[0],
        lower_bound: (psi_in - (m as f64 - 1.0) * psi_out) * min_mass * min_mass,
        gram,
    })
}

/// Greedy choice of `m` centers in `B_{delta - tau}(x0)` where `admissible`
/// holds, nearest to `x0` first (lexicographic on ties), with gaps of at
/// least `sigma` between the balls.
fn select_centers<F>(x0: [f64; 2], delta: f64, sigma: f64, tau: f64, m: usize, admissible: F) -> Result<Vec<[f64; 2]>>
where
    F: Fn([f64; 2]) -> bool,
{
    let step = 0.25 * sigma;
    let reach = delta - tau;
    let k = (reach / step).floor() as i64;
    let mut cand: Vec<(f64, [f64; 2])> = Vec::new();
    for j in -k..=k {
        for i in -k..=k {
            let d = [i as f64 * step, j as f64 * step];
            let r = d[0].hypot(d[1]);
            let x = [x0[0] + d[0], x0[1] + d[1]];
            if r <= reach && admissible(x) {
                cand.push((r, x));
            }
        }
    }
    cand.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1[0].total_cmp(&b.1[0])).then(a.1[1].total_cmp(&b.1[1])));
    let mut out: Vec<[f64; 2]> = Vec::with_capacity(m);
    for (_, x) in cand {
        if out.iter().all(|c| (c[0] - x[0]).hypot(c[1] - x[1]) >= sigma + 2.0 * tau) {
            out.push(x);
            if out.len() == m {
                return Ok(out);
            }
        }
    }
    Err(Error::Domain(format!("only {} separated balls fit in B_delta(x0) where Q > 0", out.len())))
}
