//! Adaptive Gauss–Kronrod (7/15) quadrature for vector-valued integrands.
//!
//! Component 0 of the integrand is the reference magnitude: component `k`
//! is converged once its error estimate is below `rtol * (|I_k| + |I_0|)`.
//! This lets derivative integrals that vanish at an optimum share the
//! tolerance of the value integral.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights at XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rtol: f64,
    pub initial_panels: usize,
    pub max_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            rtol: 1e-10,
            initial_panels: 8,
            max_panels: 4000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct QuadResult {
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub evaluations: usize,
    pub panels: usize,
}

struct Panel {
    a: f64,
    b: f64,
    value: Vec<f64>,
    error: Vec<f64>,
    abs: Vec<f64>,
}

fn gk15<F>(f: &mut F, a: f64, b: f64, dim: usize, buf: &mut [f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>)
where
    F: FnMut(f64, &mut [f64]),
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kron = vec![0.0; dim];
    let mut gauss = vec![0.0; dim];
    let mut abs = vec![0.0; dim];
    for (idx, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let points: &[f64] = if x == 0.0 { &[0.0] } else { &[-1.0, 1.0] };
        for &s in points {
            f(c + s * h * x, buf);
            for k in 0..dim {
                kron[k] += wk * buf[k];
                abs[k] += wk * buf[k].abs();
                if idx % 2 == 1 {
                    gauss[k] += WG[idx / 2] * buf[k];
                }
            }
        }
    }
    let mut err = vec![0.0; dim];
    for k in 0..dim {
        kron[k] *= h;
        gauss[k] *= h;
        abs[k] *= h.abs();
        err[k] = (kron[k] - gauss[k]).abs();
    }
    (kron, err, abs)
}

/// Integrates the `dim`-component function `f` over `[a, b]`.
pub fn integrate<F>(mut f: F, dim: usize, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult>
where
    F: FnMut(f64, &mut [f64]),
{
    if !(a.is_finite() && b.is_finite()) || b < a || dim == 0 {
        return Err(Error::Quadrature(format!("invalid interval [{a}, {b}]")));
    }
    let mut buf = vec![0.0; dim];
    let mut evaluations = 0;
    let mut panels: Vec<Panel> = Vec::with_capacity(opts.initial_panels * 4);
    let p0 = opts.initial_panels.max(1);
    let width = (b - a) / p0 as f64;
    for i in 0..p0 {
        let lo = a + i as f64 * width;
        let hi = if i + 1 == p0 { b } else { lo + width };
        let (value, error, abs) = gk15(&mut f, lo, hi, dim, &mut buf);
        evaluations += 15;
        panels.push(Panel { a: lo, b: hi, value, error, abs });
    }

    loop {
        let mut total = vec![0.0; dim];
        let mut total_err = vec![0.0; dim];
        let mut total_abs = vec![0.0; dim];
        for p in &panels {
            for k in 0..dim {
                total[k] += p.value[k];
                total_err[k] += p.error[k];
                total_abs[k] += p.abs[k];
            }
        }
        for v in total.iter().chain(total_err.iter()) {
            if !v.is_finite() {
                return Err(Error::Quadrature(format!(
                    "nonfinite integrand on [{a}, {b}] after {evaluations} evaluations"
                )));
            }
        }
        let tol: Vec<f64> = (0..dim)
            .map(|k| {
                // cancellation floor: nothing below rounding of the |f| integral is resolvable
                (opts.rtol * (total[k].abs() + total[0].abs())).max(100.0 * f64::EPSILON * total_abs[k])
            })
            .collect();
        let converged = (0..dim).all(|k| total_err[k] <= tol[k] || total_err[k] == 0.0);
        if converged {
            return Ok(QuadResult {
                values: total,
                errors: total_err,
                evaluations,
                panels: panels.len(),
            });
        }
        if panels.len() >= opts.max_panels {
            return Err(Error::Quadrature(format!(
                "{} panels, error {:?} above tolerance {:?} on [{a}, {b}]",
                panels.len(),
                total_err,
                tol
            )));
        }
        // split the panel contributing most to the worst-normalized error
        let worst = panels
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let score = (0..dim)
                    .map(|k| if tol[k] > 0.0 { p.error[k] / tol[k] } else { p.error[k] })
                    .fold(0.0, f64::max);
                (i, score)
            })
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .map(|(i, _)| i)
            .expect("at least one panel");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            return Err(Error::Quadrature(format!(
                "panel [{}, {}] cannot be subdivided further",
                p.a, p.b
            )));
        }
        for (lo, hi) in [(p.a, mid), (mid, p.b)] {
            let (value, error, abs) = gk15(&mut f, lo, hi, dim, &mut buf);
            evaluations += 15;
            panels.push(Panel { a: lo, b: hi, value, error, abs });
        }
        // keep accumulation order independent of the split history
        panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    }
}
