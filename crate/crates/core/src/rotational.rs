//! Minimal Lagrangians of `Q^n` with `n - 1` equal angle functions: the
//! profile equation `alpha'' = (1 - alpha'^2) cot(n alpha)`, its first
//! integral, the profile curve in `S^2` and the rotational hypersurface of
//! `S^{n+1}` whose Gauss map realizes them.

use std::f64::consts::SQRT_2;
use std::io::{self, Write};
use std::sync::Arc;

use crate::catalog::{hyperspherical, hyperspherical_bounds, principal_curvatures, HypersurfaceChart};
use crate::error::{Error, Result};
use crate::gauss::{angle_spectrum, doubled_angle_distance};
use crate::numeric::{five_point_derivative, RealVec};
use crate::verify::{
    check_connection_identities, codazzi_residual, codazzi_tensor, connection_and_s, gauss_residual, metric_curvature,
    metric_sectional, CheckClass, GaugeChoice, PointData, ResidualReport, Tolerances,
};

/// Distance kept from `|alpha'| = 1` and `sin(n alpha) = 0`.
pub const GUARD_BAND: f64 = 1e-3;
/// Trim of the profile parameter range at both ends of a chart.
pub const THETA_TRIM: f64 = 0.05;
/// Orbit radius below which the hypersurface meets its rotation axis.
const AXIS_LIMIT: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileState {
    pub theta: f64,
    pub alpha: f64,
    pub dalpha: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    /// `|alpha'|` reached `1 - GUARD_BAND`.
    Slope,
    /// `|sin(n alpha)|` fell to `GUARD_BAND`.
    Sine,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub n: usize,
    /// Signed step in `theta`.
    pub step: f64,
    pub states: Vec<ProfileState>,
    pub stopped: Option<StopReason>,
}

fn accel(n: usize, alpha: f64, dalpha: f64) -> f64 {
    let na = n as f64 * alpha;
    (1.0 - dalpha * dalpha) * na.cos() / na.sin()
}

fn rk4(n: usize, s: ProfileState, h: f64) -> ProfileState {
    let f = |a: f64, d: f64| (d, accel(n, a, d));
    let k1 = f(s.alpha, s.dalpha);
    let k2 = f(s.alpha + 0.5 * h * k1.0, s.dalpha + 0.5 * h * k1.1);
    let k3 = f(s.alpha + 0.5 * h * k2.0, s.dalpha + 0.5 * h * k2.1);
    let k4 = f(s.alpha + h * k3.0, s.dalpha + h * k3.1);
    ProfileState {
        theta: s.theta + h,
        alpha: s.alpha + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
        dalpha: s.dalpha + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
    }
}

fn guard(n: usize, s: &ProfileState) -> Option<StopReason> {
    if !(s.dalpha.abs() < 1.0 - GUARD_BAND) {
        Some(StopReason::Slope)
    } else if !((n as f64 * s.alpha).sin().abs() > GUARD_BAND) {
        Some(StopReason::Sine)
    } else {
        None
    }
}

/// Fixed-step RK4 from `theta_span.0` to `theta_span.1`; stops before
/// entering the guard band and flags the trajectory.
pub fn integrate_alpha(
    n: usize,
    alpha0: f64,
    dalpha0: f64,
    theta_span: (f64, f64),
    steps: usize,
) -> Result<Trajectory> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "profile equation needs n >= 2, got {n}"
        )));
    }
    let (t0, t1) = theta_span;
    if steps == 0 || !t0.is_finite() || !t1.is_finite() || t0 == t1 {
        return Err(Error::InvalidParameter(format!(
            "need a non-empty finite span and at least one step, got {theta_span:?} with {steps} steps"
        )));
    }
    let start = ProfileState {
        theta: t0,
        alpha: alpha0,
        dalpha: dalpha0,
    };
    if let Some(r) = guard(n, &start) {
        return Err(Error::InvalidParameter(format!(
            "initial data alpha0={alpha0}, dalpha0={dalpha0} violates the {r:?} guard: need |dalpha0| < 1 and sin(n alpha0) != 0"
        )));
    }
    let h = (t1 - t0) / steps as f64;
    let mut states = Vec::with_capacity(steps + 1);
    states.push(start);
    let mut stopped = None;
    for _ in 0..steps {
        let next = rk4(n, *states.last().unwrap(), h);
        if let Some(r) = guard(n, &next) {
            stopped = Some(r);
            break;
        }
        states.push(next);
    }
    Ok(Trajectory {
        n,
        step: h,
        states,
        stopped,
    })
}

impl Trajectory {
    pub fn last(&self) -> ProfileState {
        *self.states.last().unwrap()
    }

    pub fn theta_range(&self) -> (f64, f64) {
        let a = self.states[0].theta;
        let b = self.last().theta;
        (a.min(b), a.max(b))
    }

    /// State at `theta` by one RK4 step from the nearest sample.
    pub fn state_at(&self, theta: f64) -> Option<ProfileState> {
        let (lo, hi) = self.theta_range();
        let slack = 0.5 * self.step.abs();
        if !(theta >= lo - slack && theta <= hi + slack) {
            return None;
        }
        let k = ((theta - self.states[0].theta) / self.step).round();
        let k = (k.max(0.0) as usize).min(self.states.len() - 1);
        let s = self.states[k];
        Some(rk4(self.n, s, theta - s.theta))
    }
}

/// `c_1` with `(1 - alpha'^2) |sin n alpha|^{2/n} = 2 c_1^2`, the value for
/// which the first integral equals one.
pub fn first_integral_constant(n: usize, s: &ProfileState) -> f64 {
    let sn = (n as f64 * s.alpha).sin().abs();
    ((1.0 - s.dalpha * s.dalpha) * sn.powf(2.0 / n as f64) / 2.0).sqrt()
}

/// `ds/dtheta = -sqrt(1 - alpha'^2) / (sqrt 2 sin n alpha)`.
pub fn ds_dtheta(n: usize, s: &ProfileState) -> f64 {
    -(1.0 - s.dalpha * s.dalpha).sqrt() / (SQRT_2 * (n as f64 * s.alpha).sin())
}

/// `(c_1 |sin n alpha|^{-1/n})^2 (2 + (d alpha/ds)^2 (sin n alpha)^{-2})`.
pub fn first_integral(n: usize, c1: f64, s: &ProfileState) -> f64 {
    let sn = (n as f64 * s.alpha).sin();
    let rho = c1 * sn.abs().powf(-1.0 / n as f64);
    let da_ds = s.dalpha / ds_dtheta(n, s);
    rho * rho * (2.0 + da_ds * da_ds / (sn * sn))
}

pub fn first_integral_residual(traj: &Trajectory, c1: f64) -> f64 {
    traj.states
        .iter()
        .map(|s| (first_integral(traj.n, c1, s) - 1.0).abs())
        .fold(0.0, f64::max)
}

/// Largest residual of
/// `alpha_ss - (n + 1) cot(n alpha) alpha_s^2 - sin(2 n alpha)` along the
/// trajectory, with `alpha_s` from the reparametrization and `alpha_ss` by
/// five-point differences of the samples.
pub fn ode_equivalence_residual(traj: &Trajectory) -> f64 {
    let n = traj.n;
    let nf = n as f64;
    let h = traj.step;
    let a_s: Vec<f64> = traj.states.iter().map(|s| s.dalpha / ds_dtheta(n, s)).collect();
    let mut worst = 0.0_f64;
    for k in 2..traj.states.len().saturating_sub(2) {
        let d = five_point_derivative([&a_s[k - 2], &a_s[k - 1], &a_s[k + 1], &a_s[k + 2]], h);
        let s = &traj.states[k];
        let a_ss = d / ds_dtheta(n, s);
        let na = nf * s.alpha;
        let res = a_ss - (nf + 1.0) * na.cos() / na.sin() * a_s[k] * a_s[k] - (2.0 * na).sin();
        worst = worst.max(res.abs());
    }
    worst
}

/// Global error of the final state at `base`, `2 base` and `4 base` steps
/// against a run with `64 base` steps.
#[derive(Clone, Debug)]
pub struct OrderTest {
    pub steps: [usize; 3],
    pub errors: [f64; 3],
    pub ratios: [f64; 2],
}

impl OrderTest {
    /// Both ratios inside `[12, 20]`, around `2^4`.
    pub fn passes(&self) -> bool {
        self.ratios.iter().all(|r| (12.0..=20.0).contains(r))
    }
}

pub fn order_test(n: usize, alpha0: f64, dalpha0: f64, span: (f64, f64), base: usize) -> Result<OrderTest> {
    let run = |steps: usize| -> Result<ProfileState> {
        let t = integrate_alpha(n, alpha0, dalpha0, span, steps)?;
        match t.stopped {
            None => Ok(t.last()),
            Some(r) => Err(Error::InvalidParameter(format!(
                "order test needs a complete trajectory; stopped by the {r:?} guard"
            ))),
        }
    };
    let reference = run(64 * base)?;
    let steps = [base, 2 * base, 4 * base];
    let mut errors = [0.0; 3];
    for (e, &s) in errors.iter_mut().zip(&steps) {
        let x = run(s)?;
        *e = (x.alpha - reference.alpha)
            .abs()
            .max((x.dalpha - reference.dalpha).abs());
    }
    Ok(OrderTest {
        steps,
        errors,
        ratios: [errors[0] / errors[1], errors[1] / errors[2]],
    })
}

/// `gamma(theta)` on `S^2`.
pub fn profile_point(s: &ProfileState) -> [f64; 3] {
    let (sa, ca) = s.alpha.sin_cos();
    let (st, ct) = s.theta.sin_cos();
    let w = (1.0 - s.dalpha * s.dalpha).sqrt();
    [-sa * w, ca * st - sa * ct * s.dalpha, -ca * ct - sa * st * s.dalpha]
}

/// `d gamma / d theta` along a solution of the profile equation.
pub fn profile_velocity(n: usize, s: &ProfileState) -> [f64; 3] {
    let (sa, ca) = s.alpha.sin_cos();
    let (st, ct) = s.theta.sin_cos();
    let d = s.dalpha;
    let w = (1.0 - d * d).sqrt();
    let dd = accel(n, s.alpha, d);
    [
        -ca * d * w + sa * d * dd / w,
        ca * ct * w * w - sa * ct * dd,
        ca * st * w * w - sa * st * dd,
    ]
}

/// Unit tangent `(alpha', -w cos theta, -w sin theta)` of the profile, `w = sqrt(1 - alpha'^2)`.
fn profile_tangent(s: &ProfileState) -> [f64; 3] {
    let w = (1.0 - s.dalpha * s.dalpha).sqrt();
    [s.dalpha, -w * s.theta.cos(), -w * s.theta.sin()]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileSample {
    pub state: ProfileState,
    pub gamma: [f64; 3],
}

#[derive(Clone, Debug)]
pub struct ProfileCurve {
    pub trajectory: Arc<Trajectory>,
    pub samples: Vec<ProfileSample>,
}

pub fn profile_curve(traj: &Trajectory) -> ProfileCurve {
    ProfileCurve {
        trajectory: Arc::new(traj.clone()),
        samples: traj
            .states
            .iter()
            .map(|s| ProfileSample {
                state: *s,
                gamma: profile_point(s),
            })
            .collect(),
    }
}

impl ProfileCurve {
    pub fn norm_defect(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| (s.gamma.iter().map(|x| x * x).sum::<f64>().sqrt() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest gap between `|d gamma/d theta|` from the formula and from
    /// five-point differences of the samples.
    pub fn speed_defect(&self) -> f64 {
        let n = self.trajectory.n;
        let h = self.trajectory.step;
        let s = &self.samples;
        let mut worst = 0.0_f64;
        for k in 2..s.len().saturating_sub(2) {
            let fd: Vec<f64> = (0..3)
                .map(|c| {
                    five_point_derivative(
                        [
                            &s[k - 2].gamma[c],
                            &s[k - 1].gamma[c],
                            &s[k + 1].gamma[c],
                            &s[k + 2].gamma[c],
                        ],
                        h,
                    )
                })
                .collect();
            let v = profile_velocity(n, &s[k].state);
            let a = fd.iter().map(|x| x * x).sum::<f64>().sqrt();
            let b = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            worst = worst.max((a - b).abs());
        }
        worst
    }

    /// Rows `theta,alpha,dalpha,gx,gy,gz`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "theta,alpha,dalpha,gx,gy,gz")?;
        for s in &self.samples {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                s.state.theta, s.state.alpha, s.state.dalpha, s.gamma[0], s.gamma[1], s.gamma[2]
            )?;
        }
        Ok(())
    }
}

/// Rotational hypersurface of `S^{n+1}` over a profile, in coordinates
/// `(theta, phi_1, .., phi_{n-1})`.
#[derive(Clone, Debug)]
pub struct RotationalChart {
    pub chart: HypersurfaceChart,
    pub trajectory: Arc<Trajectory>,
    pub c1: f64,
}

/// `x = (gamma_1 sigma(phi), gamma_2, gamma_3)` with `sigma` the unit
/// `(n-1)`-sphere; the normal is built the same way from `gamma x gamma'`.
pub fn build_rotational_chart(curve: &ProfileCurve) -> Result<RotationalChart> {
    let traj = curve.trajectory.clone();
    let n = traj.n;
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "rotational chart needs n >= 3, got {n}"
        )));
    }
    let (lo, hi) = traj.theta_range();
    if !(hi - lo > 2.0 * THETA_TRIM + 0.01) {
        return Err(Error::InvalidParameter(format!(
            "profile covers theta in [{lo}, {hi}], too short for a chart"
        )));
    }
    let box_lo = lo + THETA_TRIM;
    let box_hi = hi - THETA_TRIM;
    for s in &curve.samples {
        if s.state.theta >= box_lo && s.state.theta <= box_hi && s.gamma[0].abs() < AXIS_LIMIT {
            return Err(Error::Degenerate {
                point: vec![s.state.theta],
                sigma_min: s.gamma[0].abs(),
            });
        }
    }
    let mut bounds = vec![(box_lo, box_hi)];
    bounds.extend(hyperspherical_bounds(n - 1));

    let lift = |t: &Trajectory, p: &[f64], normal: bool| -> RealVec {
        let Some(s) = t.state_at(p[0]) else {
            return RealVec(vec![f64::NAN; p.len() + 2]);
        };
        let g = profile_point(&s);
        let v = if normal { cross(g, profile_tangent(&s)) } else { g };
        let mut out = hyperspherical(&p[1..]).scaled(v[0]).0;
        out.push(v[1]);
        out.push(v[2]);
        RealVec(out)
    };
    let (ta, tb) = (traj.clone(), traj.clone());
    let chart = HypersurfaceChart::new(
        "rotational",
        bounds,
        Arc::new(move |p: &[f64]| lift(&ta, p, false)),
        Arc::new(move |p: &[f64]| lift(&tb, p, true)),
    )?;
    let c1 = first_integral_constant(n, &traj.states[0]);
    let mut rc = RotationalChart {
        chart,
        trajectory: traj,
        c1,
    };
    // Orient so that the profile direction carries cot((n-1) alpha).
    let centre = rc.chart.center();
    let plain = rc.curvature_pattern_residual(&centre, crate::numeric::DEFAULT_STEP)?;
    let flipped = RotationalChart {
        chart: rc.chart.flipped(),
        ..rc.clone()
    };
    if flipped.curvature_pattern_residual(&centre, crate::numeric::DEFAULT_STEP)? < plain {
        rc = flipped;
    }
    Ok(rc)
}

impl RotationalChart {
    pub fn n(&self) -> usize {
        self.trajectory.n
    }

    pub fn state(&self, p: &[f64]) -> Result<ProfileState> {
        self.trajectory
            .state_at(p[0])
            .ok_or_else(|| Error::InvalidParameter(format!("theta = {} outside the profile", p[0])))
    }

    /// `rho = c_1 |sin n alpha|^{-1/n}`.
    pub fn rho(&self, s: &ProfileState) -> f64 {
        self.c1 * (self.n() as f64 * s.alpha).sin().abs().powf(-1.0 / self.n() as f64)
    }

    /// Expected principal curvatures, descending:
    /// `cot((n-1) alpha)` once and `-cot(alpha)` with multiplicity `n-1`.
    pub fn expected_curvatures(&self, s: &ProfileState) -> Vec<f64> {
        let n = self.n();
        let mut v = vec![-1.0 / s.alpha.tan(); n - 1];
        v.push(1.0 / ((n as f64 - 1.0) * s.alpha).tan());
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    pub fn curvature_pattern_residual(&self, p: &[f64], h: f64) -> Result<f64> {
        let s = self.state(p)?;
        let got = principal_curvatures(&self.chart, p, h)?.lambdas;
        Ok(got
            .iter()
            .zip(self.expected_curvatures(&s))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Angles in the canonical gauge against `(n-1) alpha` once and `-alpha`
    /// `n-1` times, mod `pi`.
    pub fn angle_pattern_residual(&self, p: &[f64], h: f64) -> Result<f64> {
        let s = self.state(p)?;
        let n = self.n();
        let j = crate::gauss::gauss_map(&self.chart, p, h)?;
        let spec = angle_spectrum(&j, crate::quadric::ProductStructureGauge::CANONICAL)?;
        let lead = (n as f64 - 1.0) * s.alpha;
        let mut dist: Vec<f64> = spec.thetas.iter().map(|t| doubled_angle_distance(*t, lead)).collect();
        dist.sort_by(f64::total_cmp);
        let mut worst = dist[0];
        for t in &spec.thetas {
            let d = doubled_angle_distance(*t, lead).min(doubled_angle_distance(*t, -s.alpha));
            worst = worst.max(d);
        }
        // Exactly one angle sits at the leading value.
        let rest = spec
            .thetas
            .iter()
            .map(|t| doubled_angle_distance(*t, -s.alpha))
            .filter(|d| *d < 1e-3)
            .count();
        if rest != n - 1 {
            return Ok(f64::INFINITY);
        }
        Ok(worst)
    }

    /// `e_1(alpha)` and `e_1(e_1(alpha))` for the unit vector `e_1` along
    /// `d/d theta` of the Gauss-map metric `g_theta theta = (1 - alpha'^2) / (2 sin^2 n alpha)`.
    pub fn e1_terms(&self, theta: f64, h: f64) -> Result<(f64, f64)> {
        let n = self.n() as f64;
        let e1a = |t: f64| -> Result<(f64, f64)> {
            let s = self.state(&[t])?;
            let inv_len = SQRT_2 * (n * s.alpha).sin().abs() / (1.0 - s.dalpha * s.dalpha).sqrt();
            Ok((s.dalpha * inv_len, inv_len))
        };
        let (v, inv_len) = e1a(theta)?;
        let mut samples = [0.0; 4];
        for (x, k) in samples.iter_mut().zip([-2.0, -1.0, 1.0, 2.0]) {
            *x = e1a(theta + k * h)?.0;
        }
        let d = five_point_derivative([&samples[0], &samples[1], &samples[2], &samples[3]], h);
        Ok((v, d * inv_len))
    }
}

/// Round metric of `S^{m}` in hyperspherical angles.
fn round_metric_diag(phi: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(phi.len());
    let mut prod = 1.0;
    for a in phi {
        out.push(prod);
        prod *= a.sin().powi(2);
    }
    out
}

/// All rotational checks at one chart point: the curvature and angle
/// patterns, the warped metric and `rho` law, the fiber curvature chain,
/// the profile equation as a Codazzi component and the generic identities.
pub fn rotational_report(rc: &RotationalChart, p: &[f64], h: f64, tol: &Tolerances) -> Result<ResidualReport> {
    let n = rc.n();
    let nf = n as f64;
    let s = rc.state(p)?;
    let d = PointData::new(&rc.chart, p, h, GaugeChoice::CANONICAL)?;
    let mut r = ResidualReport::new(rc.chart.key(), p);
    let first = |name: &str| tol.get(name, CheckClass::FirstOrder);
    let second = |name: &str| tol.get(name, CheckClass::SecondOrder);

    r.record(
        "curvature_pattern",
        rc.curvature_pattern_residual(p, h)?,
        first("curvature_pattern"),
    );
    r.record(
        "angle_pattern",
        rc.angle_pattern_residual(p, h)?,
        first("angle_pattern"),
    );

    let rho = rc.rho(&s);
    let w2 = 1.0 - s.dalpha * s.dalpha;
    let sn = (nf * s.alpha).sin();
    let g = &d.jet.metric;
    let round = round_metric_diag(&p[1..]);
    let mut warped = (g[(0, 0)] - w2 / (2.0 * sn * sn)).abs();
    for a in 1..n {
        warped = warped.max(g[(0, a)].abs());
        for b in 1..n {
            let want = if a == b { rho * rho * round[a - 1] } else { 0.0 };
            warped = warped.max((g[(a, b)] - want).abs());
        }
    }
    r.record("warped_metric", warped, second("warped_metric"));
    let rho_measured = g[(1, 1)].sqrt();
    r.record("rho_law", (rho_measured - rho).abs(), second("rho_law"));

    // Fiber curvature from the orbit planes of the induced metric.
    let mc = metric_curvature(&rc.chart, p, h)?;
    let k = metric_sectional(&d, &mc);
    let lead = (nf - 1.0) * s.alpha;
    let i1 = (0..n)
        .min_by(|&a, &b| {
            doubled_angle_distance(d.spec.thetas[a], lead).total_cmp(&doubled_angle_distance(d.spec.thetas[b], lead))
        })
        .unwrap();
    let orbit: Vec<usize> = (0..n).filter(|&a| a != i1).collect();
    let k_orbit = k[(orbit[0], orbit[1])];
    let g_tt = g[(0, 0)];
    let drho = -rho * (nf * s.alpha).cos() / sn * s.dalpha;
    let e1_rho = drho / g_tt.sqrt();
    let k_fiber = rho * rho * (k_orbit + (e1_rho / rho).powi(2));
    let e1_alpha_measured = s.dalpha / g_tt.sqrt();
    let rhs_fiber = rho * rho * (2.0 + e1_alpha_measured.powi(2) / (sn * sn));
    r.record("fiber_curvature", (k_fiber - 1.0).abs(), second("fiber_curvature"));
    r.record(
        "fiber_curvature_chain",
        (k_fiber - rhs_fiber).abs(),
        second("fiber_curvature_chain"),
    );

    // Profile equation against the Codazzi component (e_k, e_1, e_1, J e_k).
    let (e1a, e1e1a) = rc.e1_terms(p[0], h)?;
    let ode_lhs = e1e1a - (nf + 1.0) * (nf * s.alpha).cos() / sn * e1a * e1a;
    let ode_rhs = (2.0 * nf * s.alpha).sin();
    r.record(
        "profile_equation",
        (ode_lhs - ode_rhs).abs(),
        second("profile_equation"),
    );
    let cod = codazzi_tensor(&d, &mc)?;
    let kk = orbit[0];
    r.record(
        "codazzi_profile_component",
        (cod.lhs(kk, i1, i1, kk) - ode_lhs).abs(),
        second("codazzi_profile_component"),
    );
    r.record(
        "codazzi_profile_rhs",
        (cod.rhs(kk, i1, i1, kk) - ode_rhs).abs(),
        second("codazzi_profile_rhs"),
    );
    r.record("codazzi_equation", codazzi_residual(&cod), second("codazzi_equation"));
    r.record("gauss_equation", gauss_residual(&d, &mc), second("gauss_equation"));

    let conn = connection_and_s(&d)?;
    r.merge(check_connection_identities(&d, &conn, tol));
    let palmer = crate::gauss::palmer_residual(&rc.chart, p, h)?;
    r.record("palmer", palmer.residual, tol.get("palmer", CheckClass::Fixed(5)));
    Ok(r)
}

/// Checks on the trajectory and profile alone.
pub fn ode_report(traj: &Trajectory, tol: &Tolerances) -> ResidualReport {
    let mut r = ResidualReport::new("rotational", &[traj.states[0].theta]);
    let c1 = first_integral_constant(traj.n, &traj.states[0]);
    r.record(
        "first_integral",
        first_integral_residual(traj, c1),
        tol.get("first_integral", CheckClass::Fixed(6)),
    );
    r.record(
        "ode_equivalence",
        ode_equivalence_residual(traj),
        tol.get("ode_equivalence", CheckClass::Fixed(5)),
    );
    let max_slope = traj.states.iter().map(|s| s.dalpha.abs()).fold(0.0, f64::max);
    r.record("slope_below_one", (max_slope - (1.0 - GUARD_BAND)).max(0.0), 0.0);
    let curve = profile_curve(traj);
    r.record(
        "profile_on_sphere",
        curve.norm_defect(),
        tol.get("profile_on_sphere", CheckClass::Algebraic),
    );
    r.record(
        "profile_speed",
        curve.speed_defect(),
        tol.get("profile_speed", CheckClass::Fixed(5)),
    );
    r
}
