//! Orbit propagation about a rotating body: Keplerian element conversion,
//! an adaptive Dormand-Prince 5(4) integrator, and the accumulated
//! trajectory-error metric.

use super::EvalError;
use crate::analytic::GravityField;
use nalgebra::Vector3;

/// Classical orbital elements (angles in radians).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct OrbitalElements {
    pub a_sma: f64,
    pub ecc: f64,
    pub inc: f64,
    pub argp: f64,
    pub raan: f64,
    pub mean_anomaly: f64,
}

/// Trajectory experiment definition: orbit, body spin about z, duration,
/// and the fixed comparison sampling step.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrajectoryConfig {
    pub elements: OrbitalElements,
    /// Body rotation rate about +z [deg/s].
    pub omega0_deg_s: f64,
    pub duration_s: f64,
    pub sample_step_s: f64,
}

impl TrajectoryConfig {
    /// The reference low-altitude polar orbit: 32 km semi-major axis,
    /// eccentricity 0.1, 90 degree inclination, spin 0.00073 deg/s, scaled
    /// here by the body radius ratio when used on other bodies.
    pub fn polar_reference(duration_s: f64, sample_step_s: f64) -> Self {
        Self {
            elements: OrbitalElements {
                a_sma: 32_000.0,
                ecc: 0.1,
                inc: std::f64::consts::FRAC_PI_2,
                argp: 0.0,
                raan: 0.0,
                mean_anomaly: 0.0,
            },
            omega0_deg_s: 0.00073,
            duration_s,
            sample_step_s,
        }
    }
}

/// Kepler's equation solved by Newton iteration to 1e-12.
fn eccentric_anomaly(mean: f64, ecc: f64) -> Result<f64, EvalError> {
    let mut e_anom = if ecc < 0.8 { mean } else { std::f64::consts::PI };
    for _ in 0..50 {
        let f = e_anom - ecc * e_anom.sin() - mean;
        let fp = 1.0 - ecc * e_anom.cos();
        let step = f / fp;
        e_anom -= step;
        if step.abs() < 1e-12 {
            return Ok(e_anom);
        }
    }
    Err(EvalError::KeplerNonConvergence { mean_anomaly: mean, ecc })
}

/// Standard two-body conversion from elements to an inertial state.
pub fn elements_to_state(
    el: &OrbitalElements,
    mu: f64,
) -> Result<(Vector3<f64>, Vector3<f64>), EvalError> {
    assert!(el.ecc < 1.0, "elliptic orbits only");
    let e_anom = eccentric_anomaly(el.mean_anomaly, el.ecc)?;
    let cos_e = e_anom.cos();
    let sin_e = e_anom.sin();
    let r_mag = el.a_sma * (1.0 - el.ecc * cos_e);
    // perifocal position and velocity
    let x_p = el.a_sma * (cos_e - el.ecc);
    let y_p = el.a_sma * (1.0 - el.ecc * el.ecc).sqrt() * sin_e;
    let factor = (mu * el.a_sma).sqrt() / r_mag;
    let vx_p = -factor * sin_e;
    let vy_p = factor * (1.0 - el.ecc * el.ecc).sqrt() * cos_e;

    let (so, co) = (el.argp.sin(), el.argp.cos());
    let (si, ci) = (el.inc.sin(), el.inc.cos());
    let (sr, cr) = (el.raan.sin(), el.raan.cos());
    // rotation PQW -> IJK (3-1-3)
    let row = |p: f64, q: f64| -> Vector3<f64> {
        Vector3::new(
            (cr * co - sr * so * ci) * p + (-cr * so - sr * co * ci) * q,
            (sr * co + cr * so * ci) * p + (-sr * so + cr * co * ci) * q,
            (so * si) * p + (co * si) * q,
        )
    };
    Ok((row(x_p, y_p), row(vx_p, vy_p)))
}

/// Sampled propagation output.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub positions: Vec<Vector3<f64>>,
    pub velocities: Vec<Vector3<f64>>,
    /// Wall time of the integration alone [s].
    pub wall_seconds: f64,
}

fn rot_z(v: &Vector3<f64>, angle: f64) -> Vector3<f64> {
    let (s, c) = angle.sin_cos();
    Vector3::new(c * v.x - s * v.y, s * v.x + c * v.y, v.z)
}

/// Inertial-frame acceleration of a body-fixed gravity model on a body
/// rotating about +z at `omega` [rad/s].
fn inertial_accel(
    field: &dyn GravityField,
    x_inertial: &Vector3<f64>,
    t: f64,
    omega: f64,
) -> Result<Vector3<f64>, EvalError> {
    let theta = omega * t;
    let x_body = rot_z(x_inertial, -theta);
    let a_body = field.acceleration(&x_body)?;
    Ok(rot_z(&a_body, theta))
}

// Dormand-Prince 5(4) tableau
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

const RTOL: f64 = 1e-10;
const ATOL: f64 = 1e-12;

type State = [Vector3<f64>; 2];

fn rhs(
    field: &dyn GravityField,
    t: f64,
    y: &State,
    omega: f64,
) -> Result<State, EvalError> {
    Ok([y[1], inertial_accel(field, &y[0], t, omega)?])
}

/// Integrates the orbit with the adaptive embedded 5(4) pair and samples the
/// state on the fixed comparison grid (every `sample_step_s`, plus the final
/// time). Gravity is evaluated in the rotating body frame.
pub fn propagate(
    field: &dyn GravityField,
    mu: f64,
    config: &TrajectoryConfig,
) -> Result<Trajectory, EvalError> {
    propagate_with_tol(field, mu, config, RTOL, ATOL)
}

/// [`propagate`] with explicit tolerances (the cached truth reference runs
/// tighter than the models compared against it).
pub fn propagate_with_tol(
    field: &dyn GravityField,
    mu: f64,
    config: &TrajectoryConfig,
    rtol: f64,
    atol: f64,
) -> Result<Trajectory, EvalError> {
    let (r0, v0) = elements_to_state(&config.elements, mu)?;
    let omega = config.omega0_deg_s.to_radians();

    let mut sample_times: Vec<f64> = Vec::new();
    let mut t_mark = 0.0;
    while t_mark < config.duration_s - 1e-9 {
        sample_times.push(t_mark);
        t_mark += config.sample_step_s;
    }
    sample_times.push(config.duration_s);

    let start = std::time::Instant::now();
    let mut traj = Trajectory {
        times: Vec::with_capacity(sample_times.len()),
        positions: Vec::with_capacity(sample_times.len()),
        velocities: Vec::with_capacity(sample_times.len()),
        wall_seconds: 0.0,
    };

    let mut t = 0.0;
    let mut y: State = [r0, v0];
    let mut h = config.duration_s * 1e-4;
    let mut k1 = rhs(field, t, &y, omega)?;
    let h_min = config.duration_s * 1e-14;
    // PI step control (alpha = 0.7/5, beta = 0.4/5) keeps the local error
    // uniform, which is what bounds the long-horizon energy drift
    let mut err_prev: f64 = 1.0;

    for &t_target in &sample_times {
        if t_target <= 0.0 {
            traj.times.push(0.0);
            traj.positions.push(y[0]);
            traj.velocities.push(y[1]);
            continue;
        }
        while t < t_target {
            let h_try = h.min(t_target - t);
            let mut k = [[Vector3::zeros(); 2]; 7];
            k[0] = k1;
            for stage in 0..6 {
                let mut y_stage = y;
                for (j, kj) in k.iter().enumerate().take(stage + 1) {
                    let aij = A[stage][j];
                    if aij != 0.0 {
                        y_stage[0] += kj[0] * (aij * h_try);
                        y_stage[1] += kj[1] * (aij * h_try);
                    }
                }
                k[stage + 1] = rhs(field, t + C[stage] * h_try, &y_stage, omega)?;
            }
            let mut y5 = y;
            let mut y4 = y;
            for (j, kj) in k.iter().enumerate() {
                y5[0] += kj[0] * (B5[j] * h_try);
                y5[1] += kj[1] * (B5[j] * h_try);
                y4[0] += kj[0] * (B4[j] * h_try);
                y4[1] += kj[1] * (B4[j] * h_try);
            }
            // scaled error norm over all 6 components
            let mut err_sq = 0.0;
            for part in 0..2 {
                for i in 0..3 {
                    let sc = atol + rtol * y5[part][i].abs().max(y[part][i].abs());
                    let e = (y5[part][i] - y4[part][i]) / sc;
                    err_sq += e * e;
                }
            }
            let err = (err_sq / 6.0).sqrt();

            if err <= 1.0 {
                t += h_try;
                y = y5;
                k1 = k[6]; // first-same-as-last
                let grow = if err == 0.0 {
                    5.0
                } else {
                    0.9 * err.powf(-0.14) * err_prev.powf(0.08)
                };
                h = h_try * grow.clamp(0.2, 5.0);
                err_prev = err.max(1e-4);
            } else {
                h = h_try * (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
                if h < h_min {
                    traj.wall_seconds = start.elapsed().as_secs_f64();
                    return Err(EvalError::StepUnderflow { at_time: t, partial: traj });
                }
            }
        }
        traj.times.push(t_target);
        traj.positions.push(y[0]);
        traj.velocities.push(y[1]);
    }

    traj.wall_seconds = start.elapsed().as_secs_f64();
    Ok(traj)
}

/// Accumulated position error `S = sum_j |dX(t_j)|` over the shared sample
/// grid, plus the instantaneous final-time error. Units follow the input.
pub fn accumulated_error(
    model_traj: &Trajectory,
    truth_traj: &Trajectory,
) -> Result<(f64, f64), EvalError> {
    if model_traj.times.len() != truth_traj.times.len()
        || model_traj
            .times
            .iter()
            .zip(&truth_traj.times)
            .any(|(a, b)| (a - b).abs() > 1e-9)
    {
        return Err(EvalError::TimeGridMismatch);
    }
    let mut s = 0.0;
    for (p, q) in model_traj.positions.iter().zip(&truth_traj.positions) {
        s += (p - q).norm();
    }
    let final_err = (model_traj.positions.last().unwrap()
        - truth_traj.positions.last().unwrap())
    .norm();
    Ok((s, final_err))
}
