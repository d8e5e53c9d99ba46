//! Dormand-Prince 5(4) with step-size control and the standard fourth-order
//! continuous extension.

pub(crate) const DIM: usize = 3;
pub(crate) type State = [f64; DIM];

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [0.2];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0];
const B: [f64; 6] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// One accepted step with its interpolation coefficients.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Segment {
    pub r0: f64,
    pub h: f64,
    pub rc: [State; 5],
}

impl Segment {
    pub fn eval(&self, r: f64) -> State {
        let t = (r - self.r0) / self.h;
        let t1 = 1.0 - t;
        let mut y = [0.0; DIM];
        for (i, yi) in y.iter_mut().enumerate() {
            let c = &self.rc;
            *yi = c[0][i] + t * (c[1][i] + t1 * (c[2][i] + t * (c[3][i] + t1 * c[4][i])));
        }
        y
    }

    pub fn end(&self) -> f64 {
        self.r0 + self.h
    }
}

pub(crate) struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
}

pub(crate) enum Outcome {
    Finished,
    /// A solution component exceeded the limit at this radius.
    BlowUp(f64),
    StepUnderflow(f64),
}

fn axpy(y: &State, h: f64, ks: &[State], a: &[f64]) -> State {
    let mut out = *y;
    for (k, &c) in ks.iter().zip(a) {
        for i in 0..DIM {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Integrates `y' = f(r, y)` from `r0` to `r1`, returning the accepted
/// segments in order.
pub(crate) fn integrate<F>(f: F, r0: f64, y0: State, r1: f64, tol: &Tolerances, limit: f64) -> (Vec<Segment>, Outcome)
where
    F: Fn(f64, &State) -> State,
{
    let mut segs = Vec::new();
    let mut r = r0;
    let mut y = y0;
    let mut k1 = f(r, &y);
    let mut h = (0.01f64).min(tol.max_step).min(r1 - r0);
    while r1 - r > 1e-12 * r1.abs().max(1.0) {
        if r + h > r1 {
            h = r1 - r;
        }
        let k2 = f(r + C[1] * h, &axpy(&y, h, &[k1], &A2));
        let k3 = f(r + C[2] * h, &axpy(&y, h, &[k1, k2], &A3));
        let k4 = f(r + C[3] * h, &axpy(&y, h, &[k1, k2, k3], &A4));
        let k5 = f(r + C[4] * h, &axpy(&y, h, &[k1, k2, k3, k4], &A5));
        let k6 = f(r + h, &axpy(&y, h, &[k1, k2, k3, k4, k5], &A6));
        let y1 = axpy(&y, h, &[k1, k2, k3, k4, k5, k6], &B);
        let k7 = f(r + h, &y1);
        let ks = [k1, k2, k3, k4, k5, k6, k7];
        let mut err = 0.0;
        for i in 0..DIM {
            let e: f64 = h * ks.iter().zip(&E).map(|(k, c)| c * k[i]).sum::<f64>();
            let sc = tol.atol + tol.rtol * y[i].abs().max(y1[i].abs());
            err += (e / sc).powi(2);
        }
        let err = (err / DIM as f64).sqrt();
        if err <= 1.0 {
            let mut rc = [[0.0; DIM]; 5];
            for i in 0..DIM {
                let dy = y1[i] - y[i];
                let bspl = h * k1[i] - dy;
                rc[0][i] = y[i];
                rc[1][i] = dy;
                rc[2][i] = bspl;
                rc[3][i] = dy - h * k7[i] - bspl;
                rc[4][i] = h * ks.iter().zip(&D).map(|(k, c)| c * k[i]).sum::<f64>();
            }
            segs.push(Segment { r0: r, h, rc });
            r += h;
            y = y1;
            k1 = k7;
            if y[0].abs() > limit || y[1].abs() > limit || !y[0].is_finite() {
                return (segs, Outcome::BlowUp(r));
            }
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h = (h * if err.is_finite() { fac } else { 0.2 }).min(tol.max_step);
        if h < 1e-12 * r.max(1.0) {
            return (segs, Outcome::StepUnderflow(r));
        }
    }
    (segs, Outcome::Finished)
}
