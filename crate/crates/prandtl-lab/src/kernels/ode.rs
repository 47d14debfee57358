//! Embedded Dormand-Prince RK45 with continuous (dense) output and event
//! detection. Single-step adaptivity was chosen over multistep methods
//! because blow-up detection needs frequent, cheap event localization.

use super::KernelError;

/// Tolerance and step-control settings for [`integrate_ode`].
#[derive(Debug, Clone, Copy)]
pub struct OdeSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Width (in t) to which an event crossing is localized.
    pub event_tol: f64,
}

impl OdeSpec {
    pub fn characteristics_default() -> Self {
        OdeSpec {
            rel_tol: 1e-11,
            abs_tol: 1e-12,
            max_step: 0.1,
            event_tol: 1e-12,
        }
    }

    fn validate(&self) -> Result<(), KernelError> {
        for (name, v) in [
            ("OdeSpec rel_tol", self.rel_tol),
            ("OdeSpec abs_tol", self.abs_tol),
            ("OdeSpec max_step", self.max_step),
            ("OdeSpec event_tol", self.event_tol),
        ] {
            if !(v > 0.0) {
                return Err(KernelError::Domain {
                    context: name,
                    value: v,
                });
            }
        }
        Ok(())
    }
}

/// Where an event functional first changed sign.
#[derive(Debug, Clone)]
pub struct EventHit {
    pub t: f64,
    pub state: Vec<f64>,
}

struct Step {
    t: f64,
    h: f64,
    // Dense-output coefficients: y(t + th*h) with th1 = 1 - th evaluates
    // r1 + th*(r2 + th1*(r3 + th*(r4 + th1*r5))) componentwise.
    r1: Vec<f64>,
    r2: Vec<f64>,
    r3: Vec<f64>,
    r4: Vec<f64>,
    r5: Vec<f64>,
}

/// Result of an adaptive integration: continuously sampleable trajectory,
/// final state, and the first event crossing if one was found.
pub struct Trajectory {
    steps: Vec<Step>,
    t0: f64,
    t_end: f64,
    y_end: Vec<f64>,
    event: Option<EventHit>,
}

impl Trajectory {
    pub fn t_start(&self) -> f64 {
        self.t0
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn y_end(&self) -> &[f64] {
        &self.y_end
    }

    pub fn event(&self) -> Option<&EventHit> {
        self.event.as_ref()
    }

    /// Dense-output sample; t is clamped to the integrated range.
    pub fn sample(&self, t: f64) -> Vec<f64> {
        let t = t.clamp(self.t0, self.t_end);
        if self.steps.is_empty() {
            return self.y_end.clone();
        }
        let idx = match self
            .steps
            .binary_search_by(|s| s.t.total_cmp(&t))
        {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) => i - 1,
        };
        let s = &self.steps[idx];
        let th = ((t - s.t) / s.h).clamp(0.0, 1.0);
        let th1 = 1.0 - th;
        (0..s.r1.len())
            .map(|i| {
                s.r1[i] + th * (s.r2[i] + th1 * (s.r3[i] + th * (s.r4[i] + th1 * s.r5[i])))
            })
            .collect()
    }
}

const A21: f64 = 0.2;
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

/// Integrate dy/dt = rhs(t, y) from t0 to t1. If an event functional is
/// supplied, integration stops where it first changes sign, localized to
/// `event_tol` via the dense output.
pub fn integrate_ode(
    rhs: &mut dyn FnMut(f64, &[f64], &mut [f64]),
    y0: &[f64],
    t0: f64,
    t1: f64,
    spec: &OdeSpec,
    mut event: Option<&mut dyn FnMut(f64, &[f64]) -> f64>,
) -> Result<Trajectory, KernelError> {
    spec.validate()?;
    if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(KernelError::Domain {
            context: "integrate_ode time span",
            value: t1 - t0,
        });
    }
    let n = y0.len();
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k1 = vec![0.0; n];
    rhs(t, &y, &mut k1);
    let mut buf = vec![0.0; n];

    let mut prev_event_sign = match event.as_mut() {
        Some(e) => {
            let v = e(t, &y);
            if v == 0.0 {
                0.0
            } else {
                v.signum()
            }
        }
        None => 0.0,
    };

    let mut h = spec.max_step.min((t1 - t0) / 100.0).max(1e-10);
    let mut steps = Vec::new();
    let mut k = vec![vec![0.0; n]; 7];
    k[0].copy_from_slice(&k1);

    loop {
        let span_left = t1 - t;
        if span_left <= f64::EPSILON * 2.0 * t1.abs().max(1.0) {
            break;
        }
        if h < f64::EPSILON * 4.0 * t.abs().max(1.0) {
            return Err(KernelError::StepUnderflow {
                t,
                h,
                last_state: y,
            });
        }
        h = h.min(span_left).min(spec.max_step);
        // Stage evaluations.
        for i in 0..n {
            buf[i] = y[i] + h * A21 * k[0][i];
        }
        rhs(t + 0.2 * h, &buf, &mut k1);
        k[1].copy_from_slice(&k1);
        for i in 0..n {
            buf[i] = y[i] + h * (A31 * k[0][i] + A32 * k[1][i]);
        }
        rhs(t + 0.3 * h, &buf, &mut k1);
        k[2].copy_from_slice(&k1);
        for i in 0..n {
            buf[i] = y[i] + h * (A41 * k[0][i] + A42 * k[1][i] + A43 * k[2][i]);
        }
        rhs(t + 0.8 * h, &buf, &mut k1);
        k[3].copy_from_slice(&k1);
        for i in 0..n {
            buf[i] = y[i] + h * (A51 * k[0][i] + A52 * k[1][i] + A53 * k[2][i] + A54 * k[3][i]);
        }
        rhs(t + 8.0 / 9.0 * h, &buf, &mut k1);
        k[4].copy_from_slice(&k1);
        for i in 0..n {
            buf[i] = y[i]
                + h * (A61 * k[0][i] + A62 * k[1][i] + A63 * k[2][i] + A64 * k[3][i]
                    + A65 * k[4][i]);
        }
        rhs(t + h, &buf, &mut k1);
        k[5].copy_from_slice(&k1);
        let mut ynew = vec![0.0; n];
        for i in 0..n {
            ynew[i] = y[i]
                + h * (A71 * k[0][i] + A73 * k[2][i] + A74 * k[3][i] + A75 * k[4][i]
                    + A76 * k[5][i]);
        }
        rhs(t + h, &ynew, &mut k1);
        k[6].copy_from_slice(&k1);

        // Embedded error estimate.
        let mut err = 0.0f64;
        for i in 0..n {
            let e = h
                * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i]
                    + E7 * k[6][i]);
            let sc = spec.abs_tol + spec.rel_tol * y[i].abs().max(ynew[i].abs());
            err += (e / sc) * (e / sc);
        }
        err = (err / n as f64).sqrt();
        if !err.is_finite() {
            return Err(KernelError::StepUnderflow {
                t,
                h,
                last_state: y,
            });
        }

        if err <= 1.0 {
            // Accept: store dense coefficients for [t, t+h].
            let mut r1 = Vec::with_capacity(n);
            let mut r2 = Vec::with_capacity(n);
            let mut r3 = Vec::with_capacity(n);
            let mut r4 = Vec::with_capacity(n);
            let mut r5 = Vec::with_capacity(n);
            for i in 0..n {
                let ydiff = ynew[i] - y[i];
                let bspl = h * k[0][i] - ydiff;
                r1.push(y[i]);
                r2.push(ydiff);
                r3.push(bspl);
                r4.push(ydiff - h * k[6][i] - bspl);
                r5.push(h
                    * (D1 * k[0][i] + D3 * k[2][i] + D4 * k[3][i] + D5 * k[4][i] + D6 * k[5][i]
                        + D7 * k[6][i]));
            }
            steps.push(Step {
                t,
                h,
                r1,
                r2,
                r3,
                r4,
                r5,
            });
            let t_new = t + h;

            if let Some(e) = event.as_mut() {
                let v = e(t_new, &ynew);
                let sign = if v == 0.0 { 0.0 } else { v.signum() };
                if prev_event_sign == 0.0 {
                    prev_event_sign = sign;
                } else if sign != 0.0 && sign != prev_event_sign {
                    let traj = Trajectory {
                        steps,
                        t0,
                        t_end: t_new,
                        y_end: ynew.clone(),
                        event: None,
                    };
                    let hit = localize_event(&traj, e, t, t_new, spec.event_tol);
                    let mut traj = traj;
                    traj.t_end = hit.t;
                    traj.y_end = hit.state.clone();
                    traj.event = Some(hit);
                    return Ok(traj);
                } else if sign == 0.0 {
                    // Landed exactly on a zero: treat as a crossing.
                    let hit = EventHit {
                        t: t_new,
                        state: ynew.clone(),
                    };
                    return Ok(Trajectory {
                        steps,
                        t0,
                        t_end: t_new,
                        y_end: ynew,
                        event: Some(hit),
                    });
                }
            }

            t = t_new;
            y = ynew;
            k.swap(0, 6); // FSAL
            let fac = (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
            h *= fac;
        } else {
            let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
            h *= fac;
        }
    }

    Ok(Trajectory {
        steps,
        t0,
        t_end: t,
        y_end: y,
        event: None,
    })
}

fn localize_event(
    traj: &Trajectory,
    event: &mut dyn FnMut(f64, &[f64]) -> f64,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> EventHit {
    let mut f_lo = event(lo, &traj.sample(lo));
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = event(mid, &traj.sample(mid));
        if f_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    EventHit {
        t,
        state: traj.sample(t),
    }
}
