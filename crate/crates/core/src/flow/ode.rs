//! Dormand–Prince 5(4) with dense output and domain-exit detection.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// Step-size control settings.
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Control the error per unit step (`local error ≤ tol·h/T`) rather than
    /// per step, so the global error shrinks at least in proportion to `tol`.
    pub per_unit_step: bool,
    pub max_steps: usize,
    /// Relative step size below which integration is abandoned as a boundary exit.
    pub min_step: f64,
    /// Resolution of the exit time.
    pub exit_resolution: f64,
}

impl OdeOptions {
    pub fn with_tolerance(tol: f64) -> Self {
        OdeOptions {
            rtol: tol,
            atol: tol,
            per_unit_step: true,
            max_steps: 2_000_000,
            min_step: 1e-13,
            exit_resolution: 1e-10,
        }
    }
}

/// One accepted step with its continuous extension.
#[derive(Debug, Clone)]
struct Segment {
    t0: f64,
    h: f64,
    rcont: [Vec<f64>; 5],
}

impl Segment {
    fn eval(&self, t: f64) -> Vec<f64> {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let [r1, r2, r3, r4, r5] = &self.rcont;
        (0..r1.len())
            .map(|i| r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i]))))
            .collect()
    }
}

/// Dense solution on `[t0, t_end]`.
///
/// [`DenseSolution::eval`] interpolates the accepted step points with quintic
/// Hermite polynomials over three consecutive points. This keeps the
/// interpolant one order ahead of the built-in continuous extension, so its
/// derivative is as accurate as the step values themselves.
#[derive(Debug, Clone)]
pub struct DenseSolution {
    segments: Vec<Segment>,
    knots: Vec<Knot>,
    pub t0: f64,
    pub y0: Vec<f64>,
    pub t_end: f64,
    /// Time at which the state left the admissible set, if it did.
    pub exit: Option<f64>,
    pub steps: usize,
    pub rejected: usize,
}

#[derive(Debug, Clone)]
struct Knot {
    t: f64,
    y: Vec<f64>,
    f: Vec<f64>,
}

impl DenseSolution {
    pub fn eval(&self, t: f64) -> Vec<f64> {
        match self.knots.len() {
            0 | 1 => self.y0.clone(),
            2 => self.segments[0].eval(t),
            m => {
                let idx = self.knots.partition_point(|k| k.t < t).clamp(1, m - 1);
                // stencil [idx - 2, idx, idx + 1] around the interval [idx - 1, idx]
                let first = if idx >= 2 { idx - 2 } else { 0 };
                let first = first.min(m - 3);
                hermite5(&self.knots[first..first + 3], t)
            }
        }
    }

    /// Evaluation with the per-step continuous extension (order 4).
    pub fn eval_local(&self, t: f64) -> Vec<f64> {
        if self.segments.is_empty() || t <= self.t0 {
            return self.y0.clone();
        }
        let idx = self
            .segments
            .partition_point(|s| s.t0 + s.h < t)
            .min(self.segments.len() - 1);
        self.segments[idx].eval(t)
    }

    /// Accepted step times, starting at `t0`.
    pub fn step_times(&self) -> Vec<f64> {
        self.knots.iter().map(|k| k.t).collect()
    }
}

/// Hermite interpolation of values and derivatives at three points, by
/// confluent divided differences.
fn hermite5(knots: &[Knot], t: f64) -> Vec<f64> {
    let z = [knots[0].t, knots[0].t, knots[1].t, knots[1].t, knots[2].t, knots[2].t];
    let dim = knots[0].y.len();
    let mut out = vec![0.0; dim];
    for c in 0..dim {
        let mut dd = [0.0; 6];
        for (i, slot) in dd.iter_mut().enumerate() {
            *slot = knots[i / 2].y[c];
        }
        for order in 1..6 {
            for i in (order..6).rev() {
                let span = z[i] - z[i - order];
                dd[i] = if order == 1 && span == 0.0 {
                    knots[i / 2].f[c]
                } else {
                    (dd[i] - dd[i - 1]) / span
                };
            }
        }
        let mut acc = dd[5];
        for i in (0..5).rev() {
            acc = acc * (t - z[i]) + dd[i];
        }
        out[c] = acc;
    }
    out
}

fn add_scaled(y: &[f64], h: f64, ks: &[Vec<f64>], coeffs: &[f64]) -> Vec<f64> {
    let mut out = y.to_vec();
    for (k, c) in ks.iter().zip(coeffs) {
        if *c != 0.0 {
            for (o, v) in out.iter_mut().zip(k) {
                *o += h * c * v;
            }
        }
    }
    out
}

struct Step {
    y_new: Vec<f64>,
    k: Vec<Vec<f64>>,
    err: f64,
}

fn try_step<F>(rhs: &F, t: f64, y: &[f64], k1: &[f64], h: f64, opts: &OdeOptions) -> Result<Step>
where
    F: Fn(f64, &[f64]) -> Result<Vec<f64>>,
{
    let mut k = vec![k1.to_vec()];
    for s in 1..7 {
        let ys = add_scaled(y, h, &k, &A[s][..s]);
        let ks = rhs(t + C[s] * h, &ys)?;
        if ks.iter().any(|v| !v.is_finite()) {
            return Err(Error::Integrator {
                t: t + C[s] * h,
                reason: "non-finite right-hand side".into(),
            });
        }
        k.push(ks);
    }
    let y_new = add_scaled(y, h, &k[..6], &A[6]);
    let mut acc = 0.0;
    for i in 0..y.len() {
        let e: f64 = h * (0..7).map(|s| E[s] * k[s][i]).sum::<f64>();
        let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
        acc += (e / sc).powi(2);
    }
    Ok(Step {
        y_new,
        k,
        err: (acc / y.len() as f64).sqrt(),
    })
}

fn segment(t: f64, h: f64, y: &[f64], step: &Step) -> Segment {
    let n = y.len();
    let mut r2 = vec![0.0; n];
    let mut r3 = vec![0.0; n];
    let mut r4 = vec![0.0; n];
    let mut r5 = vec![0.0; n];
    for i in 0..n {
        let dy = step.y_new[i] - y[i];
        r2[i] = dy;
        r3[i] = h * step.k[0][i] - dy;
        r4[i] = dy - h * step.k[6][i] - r3[i];
        r5[i] = h * (0..7).map(|s| D[s] * step.k[s][i]).sum::<f64>();
    }
    Segment {
        t0: t,
        h,
        rcont: [y.to_vec(), r2, r3, r4, r5],
    }
}

/// Integrate `ẏ = rhs(t, y)` on `[t0, t_end]`, stopping when `inside(y)`
/// fails. The exit time is located by bisection on the dense output.
pub fn integrate<F, I>(rhs: F, inside: I, t0: f64, y0: &[f64], t_end: f64, opts: &OdeOptions) -> Result<DenseSolution>
where
    F: Fn(f64, &[f64]) -> Result<Vec<f64>>,
    I: Fn(&[f64]) -> bool,
{
    if !(t_end > t0) || !t_end.is_finite() {
        return Err(Error::InvalidParameter(format!("time span [{t0}, {t_end}] must be finite and increasing")));
    }
    let span = t_end - t0;
    let mut sol = DenseSolution {
        segments: Vec::new(),
        knots: Vec::new(),
        t0,
        y0: y0.to_vec(),
        t_end,
        exit: None,
        steps: 0,
        rejected: 0,
    };
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k1 = rhs(t, &y)?;
    sol.knots.push(Knot {
        t,
        y: y.clone(),
        f: k1.clone(),
    });
    let mut h = span * 1e-3;
    let order_exp = if opts.per_unit_step { 0.25 } else { 0.2 };
    while t < t_end {
        if sol.steps + sol.rejected >= opts.max_steps {
            return Err(Error::Integrator {
                t,
                reason: format!("exceeded {} steps", opts.max_steps),
            });
        }
        let last = t + h >= t_end;
        let h_try = if last { t_end - t } else { h };
        if h_try < opts.min_step * span {
            sol.exit = Some(t);
            sol.t_end = t;
            return Ok(sol);
        }
        let step = match try_step(&rhs, t, &y, &k1, h_try, opts) {
            Ok(s) => s,
            Err(_) => {
                sol.rejected += 1;
                h = h_try * 0.25;
                continue;
            }
        };
        let err = if opts.per_unit_step {
            step.err * span / h_try
        } else {
            step.err
        };
        if err > 1.0 || !err.is_finite() {
            sol.rejected += 1;
            let fac = if err.is_finite() { (0.9 * err.powf(-order_exp)).clamp(0.1, 0.9) } else { 0.25 };
            h = h_try * fac;
            continue;
        }
        let seg = segment(t, h_try, &y, &step);
        if !inside(&step.y_new) {
            // bisect the crossing on the continuous extension
            let (mut lo, mut hi) = (t, t + h_try);
            while hi - lo > opts.exit_resolution {
                let mid = 0.5 * (lo + hi);
                if inside(&seg.eval(mid)) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            if lo > t {
                let short = try_step(&rhs, t, &y, &k1, lo - t, opts)?;
                sol.segments.push(segment(t, lo - t, &y, &short));
                sol.knots.push(Knot {
                    t: lo,
                    y: short.y_new.clone(),
                    f: short.k[6].clone(),
                });
                sol.steps += 1;
            }
            sol.exit = Some(lo);
            sol.t_end = lo;
            return Ok(sol);
        }
        sol.segments.push(seg);
        sol.steps += 1;
        t = if last { t_end } else { t + h_try };
        sol.knots.push(Knot {
            t,
            y: step.y_new.clone(),
            f: step.k[6].clone(),
        });
        y = step.y_new;
        k1 = step.k[6].clone();
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-order_exp)).clamp(0.2, 5.0) };
        h = h_try * fac;
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_with_dense_output() {
        let opts = OdeOptions::with_tolerance(1e-10);
        let sol = integrate(|_, y| Ok(vec![y[0]]), |_| true, 0.0, &[1.0], 2.0, &opts).unwrap();
        for k in 0..=40 {
            let t = 2.0 * k as f64 / 40.0;
            let v = sol.eval(t)[0];
            assert!((v - t.exp()).abs() < 1e-9 * t.exp(), "t={t}: {v}");
        }
        assert!(sol.exit.is_none());
    }

    #[test]
    fn harmonic_oscillator_error_scales_with_tolerance() {
        let run = |tol: f64| {
            let opts = OdeOptions::with_tolerance(tol);
            let sol = integrate(|_, y| Ok(vec![y[1], -y[0]]), |_| true, 0.0, &[1.0, 0.0], 10.0, &opts).unwrap();
            (0..=100)
                .map(|k| {
                    let t = 0.1 * k as f64;
                    (sol.eval(t)[0] - t.cos()).abs()
                })
                .fold(0.0, f64::max)
        };
        let (a, b) = (run(1e-7), run(5e-8));
        assert!(a / b > 2.0, "{a:e} {b:e}");
    }

    #[test]
    fn exit_is_located() {
        // x(t) = t leaves {x < 0.7}
        let opts = OdeOptions::with_tolerance(1e-10);
        let sol = integrate(|_, _| Ok(vec![1.0]), |y| y[0] < 0.7, 0.0, &[0.0], 2.0, &opts).unwrap();
        let e = sol.exit.unwrap();
        assert!((e - 0.7).abs() < 1e-9);
        assert!((sol.eval(e)[0] - 0.7).abs() < 1e-9);
    }
}
