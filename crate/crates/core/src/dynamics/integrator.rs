//! Dormand–Prince 5(4) with FSAL and the standard 4th-order continuous
//! extension, for complex state vectors.

use num_complex::Complex64;

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Clone, Copy, Debug)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

#[derive(Clone, Copy, Debug, Default, serde::Serialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Integrates `y' = f(t, y)` from `t0` to `t1`. Only the first `controlled`
/// components enter the error norm (the rest are passive accumulators).
/// `on_sample` is called at `t0` and at every entry of `samples` inside
/// `(t0, t1]`, which must be sorted.
pub fn integrate<F, S>(
    mut f: F,
    t0: f64,
    t1: f64,
    y0: &[Complex64],
    controlled: usize,
    tol: Tolerances,
    samples: &[f64],
    mut on_sample: S,
) -> Result<StepStats>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
    S: FnMut(f64, &[Complex64]),
{
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut k: [Vec<Complex64>; 7] = std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); n]);
    let mut tmp = vec![Complex64::new(0.0, 0.0); n];
    let mut y_new = vec![Complex64::new(0.0, 0.0); n];
    let mut dense = vec![Complex64::new(0.0, 0.0); n];
    let mut stats = StepStats::default();

    let mut t = t0;
    let mut next_sample = samples.partition_point(|&s| s < t0);
    if next_sample < samples.len() && samples[next_sample] == t0 {
        on_sample(t0, &y);
        next_sample += 1;
    }

    f(t, &y, &mut k[0]);
    stats.evaluations += 1;
    let mut h = tol.h_init.min(tol.h_max).min(t1 - t0);

    macro_rules! stage {
        ($out:expr, $tc:expr, $($a:expr => $ki:expr),+) => {{
            for i in 0..n {
                tmp[i] = y[i] + h * (Complex64::new(0.0, 0.0) $(+ $a * k[$ki][i])+);
            }
            let (_, rest) = k.split_at_mut($out);
            f($tc, &tmp, &mut rest[0]);
        }};
    }

    while t < t1 {
        if stats.accepted + stats.rejected >= tol.max_steps {
            return Err(Error::Integration {
                t,
                reason: format!("step budget of {} exhausted", tol.max_steps),
            });
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        if h <= 1e-14 * t.abs().max(1.0) {
            return Err(Error::Integration {
                t,
                reason: format!("step size underflow (h = {h:e})"),
            });
        }

        stage!(1, t + C2 * h, A21 => 0);
        stage!(2, t + C3 * h, A31 => 0, A32 => 1);
        stage!(3, t + C4 * h, A41 => 0, A42 => 1, A43 => 2);
        stage!(4, t + C5 * h, A51 => 0, A52 => 1, A53 => 2, A54 => 3);
        stage!(5, t + h, A61 => 0, A62 => 1, A63 => 2, A64 => 3, A65 => 4);
        for i in 0..n {
            y_new[i] = y[i] + h * (A71 * k[0][i] + A73 * k[2][i] + A74 * k[3][i] + A75 * k[4][i] + A76 * k[5][i]);
        }
        let t_new = if last { t1 } else { t + h };
        {
            let (_, rest) = k.split_at_mut(6);
            f(t_new, &y_new, &mut rest[0]);
        }
        stats.evaluations += 6;

        let mut err = 0.0;
        for i in 0..controlled {
            let e = h * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i] + E7 * k[6][i]);
            let scale = tol.atol + tol.rtol * y[i].norm().max(y_new[i].norm());
            err += (e.norm() / scale).powi(2);
        }
        let err = (err / controlled.max(1) as f64).sqrt();
        if !err.is_finite() {
            return Err(Error::Integration {
                t,
                reason: "non-finite state".into(),
            });
        }

        if err <= 1.0 {
            while next_sample < samples.len() && samples[next_sample] <= t_new {
                let s = (samples[next_sample] - t) / h;
                for i in 0..n {
                    let ydiff = y_new[i] - y[i];
                    let bspl = h * k[0][i] - ydiff;
                    let r4 = ydiff - h * k[6][i] - bspl;
                    let r5 = h * (D1 * k[0][i] + D3 * k[2][i] + D4 * k[3][i] + D5 * k[4][i] + D6 * k[5][i] + D7 * k[6][i]);
                    dense[i] = y[i] + s * (ydiff + (1.0 - s) * (bspl + s * (r4 + (1.0 - s) * r5)));
                }
                on_sample(samples[next_sample], &dense);
                next_sample += 1;
            }
            t = t_new;
            std::mem::swap(&mut y, &mut y_new);
            k.swap(0, 6);
            stats.accepted += 1;
        } else {
            stats.rejected += 1;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h = (h * if err <= 1.0 { factor } else { factor.min(1.0) }).min(tol.h_max);
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances {
            rtol: 1e-10,
            atol: 1e-12,
            h_init: 1e-3,
            h_max: 1.0,
            max_steps: 1_000_000,
        }
    }

    #[test]
    fn exponential_decay_with_rotation() {
        let lambda = Complex64::new(-0.3, 2.0);
        let samples: Vec<f64> = (0..=20).map(|k| 0.25 * k as f64).collect();
        let mut max_err: f64 = 0.0;
        integrate(
            |_, y, dy| dy[0] = lambda * y[0],
            0.0,
            5.0,
            &[Complex64::new(1.0, 0.0)],
            1,
            tol(),
            &samples,
            |t, y| max_err = max_err.max((y[0] - (lambda * t).exp()).norm()),
        )
        .unwrap();
        assert!(max_err < 1e-8, "{max_err}");
    }

    #[test]
    fn accumulator_integrates_passively() {
        // y1' = |y0|², y0 = e^{−t}: y1(∞) = 1/2
        let mut last = Complex64::new(0.0, 0.0);
        integrate(
            |_, y, dy| {
                dy[0] = -y[0];
                dy[1] = Complex64::from(y[0].norm_sqr());
            },
            0.0,
            40.0,
            &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            1,
            tol(),
            &[40.0],
            |_, y| last = y[1],
        )
        .unwrap();
        assert!((last.re - 0.5).abs() < 1e-9);
    }

    #[test]
    fn every_sample_is_visited_once() {
        let samples: Vec<f64> = (0..=100).map(|k| 0.1 * k as f64).collect();
        let mut seen = Vec::new();
        integrate(
            |_, _, dy| dy[0] = Complex64::new(1.0, 0.0),
            0.0,
            10.0,
            &[Complex64::new(0.0, 0.0)],
            1,
            tol(),
            &samples,
            |t, y| {
                seen.push(t);
                assert!((y[0].re - t).abs() < 1e-12);
            },
        )
        .unwrap();
        assert_eq!(seen, samples);
    }

    #[test]
    fn step_budget_is_enforced() {
        let res = integrate(
            |_, y, dy| dy[0] = Complex64::new(0.0, 1e4) * y[0],
            0.0,
            100.0,
            &[Complex64::new(1.0, 0.0)],
            1,
            Tolerances { max_steps: 10, ..tol() },
            &[],
            |_, _| {},
        );
        assert!(matches!(res, Err(Error::Integration { .. })));
    }
}
