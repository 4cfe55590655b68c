//! Central finite-difference jets.
//!
//! All stencils are fourth-order accurate: first derivatives use the
//! five-point rule, pure second derivatives the five-point rule, and mixed
//! second derivatives the tensor product of two first-derivative rules.
//! The mixed stencil is symmetric in its two directions, so
//! `second[i][j] == second[j][i]` exactly.

use super::vector::Linear;
use crate::error::{Error, Result};

/// Default step in chart coordinates.
pub const DEFAULT_STEP: f64 = 1e-3;

/// Offsets and weights of the first-derivative rule (divide by `12 h`).
const D1: [(f64, f64); 4] = [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)];
/// Pure second-derivative rule (divide by `12 h^2`), centre weight -30.
const D2: [(f64, f64); 4] = [(-2.0, -1.0), (-1.0, 16.0), (1.0, 16.0), (2.0, -1.0)];

#[derive(Clone, Debug)]
pub struct Jet1<V> {
    pub value: V,
    pub first: Vec<V>,
}

#[derive(Clone, Debug)]
pub struct Jet2<V> {
    pub value: V,
    pub first: Vec<V>,
    /// `second[i][j]` is the derivative along `e_i` then `e_j`.
    pub second: Vec<Vec<V>>,
}

impl<V: Linear> Jet2<V> {
    /// Largest `|second[i][j] - second[j][i]|` in magnitude.
    pub fn mixed_asymmetry(&self) -> f64 {
        let n = self.first.len();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..i {
                let mut d = self.second[i][j].clone();
                d.add_scaled(-1.0, &self.second[j][i]);
                worst = worst.max(d.magnitude());
            }
        }
        worst
    }

    pub fn map<W: Linear>(&self, f: impl Fn(&V) -> W) -> Jet2<W> {
        Jet2 {
            value: f(&self.value),
            first: self.first.iter().map(&f).collect(),
            second: self.second.iter().map(|row| row.iter().map(&f).collect()).collect(),
        }
    }
}

fn shifted(p: &[f64], moves: &[(usize, f64)]) -> Vec<f64> {
    let mut q = p.to_vec();
    for &(i, d) in moves {
        q[i] += d;
    }
    q
}

fn eval<V: Linear, F: Fn(&[f64]) -> V>(f: &F, q: Vec<f64>) -> Result<V> {
    let v = f(&q);
    if v.all_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { point: q })
    }
}

fn check_step(h: f64) -> Result<()> {
    if h.is_finite() && h > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "finite-difference step must be positive, got {h}"
        )))
    }
}

/// Value and first derivatives along each coordinate direction.
pub fn central_diff_gradient<V, F>(f: F, p: &[f64], h: f64) -> Result<Jet1<V>>
where
    V: Linear,
    F: Fn(&[f64]) -> V,
{
    check_step(h)?;
    let value = eval(&f, p.to_vec())?;
    let mut first = Vec::with_capacity(p.len());
    for i in 0..p.len() {
        let mut d = value.zero_like();
        for &(k, w) in &D1 {
            let v = eval(&f, shifted(p, &[(i, k * h)]))?;
            d.add_scaled(w / (12.0 * h), &v);
        }
        first.push(d);
    }
    Ok(Jet1 { value, first })
}

/// Value, first and second derivatives of `f` at `p`.
pub fn central_diff_jet<V, F>(f: F, p: &[f64], h: f64) -> Result<Jet2<V>>
where
    V: Linear,
    F: Fn(&[f64]) -> V,
{
    check_step(h)?;
    let n = p.len();
    let value = eval(&f, p.to_vec())?;
    let mut first = Vec::with_capacity(n);
    let mut second = vec![vec![value.zero_like(); n]; n];

    for i in 0..n {
        let mut d1 = value.zero_like();
        let mut d2 = value.zero_like();
        d2.add_scaled(-30.0 / (12.0 * h * h), &value);
        for (&(k, w1), &(_, w2)) in D1.iter().zip(D2.iter()) {
            let v = eval(&f, shifted(p, &[(i, k * h)]))?;
            d1.add_scaled(w1 / (12.0 * h), &v);
            d2.add_scaled(w2 / (12.0 * h * h), &v);
        }
        first.push(d1);
        second[i][i] = d2;
    }

    for i in 0..n {
        for j in 0..i {
            let mut d = value.zero_like();
            for &(ki, wi) in &D1 {
                for &(kj, wj) in &D1 {
                    let v = eval(&f, shifted(p, &[(i, ki * h), (j, kj * h)]))?;
                    d.add_scaled(wi * wj / (144.0 * h * h), &v);
                }
            }
            second[j][i] = d.clone();
            second[i][j] = d;
        }
    }

    Ok(Jet2 { value, first, second })
}

/// First derivative of a sampled quantity along one coordinate, from values
/// at offsets `-2h, -h, +h, +2h` (in that order).
pub fn five_point_derivative<V: Linear>(samples: [&V; 4], h: f64) -> V {
    let mut d = samples[0].zero_like();
    for (v, &(_, w)) in samples.iter().zip(D1.iter()) {
        d.add_scaled(w / (12.0 * h), v);
    }
    d
}

/// Offsets used by [`five_point_derivative`], in units of the step.
pub const FIRST_DERIVATIVE_OFFSETS: [f64; 4] = [-2.0, -1.0, 1.0, 2.0];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::vector::RealVec;

    #[test]
    fn square_at_one() {
        let j = central_diff_jet(|x: &[f64]| x[0] * x[0], &[1.0], 1e-4).unwrap();
        assert!((j.first[0] - 2.0).abs() < 1e-7);
        assert!((j.second[0][0] - 2.0).abs() < 1e-4);
    }

    #[test]
    fn linear_map_has_vanishing_second_derivatives() {
        let f = |x: &[f64]| RealVec(vec![3.0 * x[0] - 2.0 * x[1] + 1.0, x[1] + 0.5 * x[2]]);
        let j = central_diff_jet(f, &[0.2, -0.4, 1.3], 1e-3).unwrap();
        for row in &j.second {
            for v in row {
                assert!(v.max_abs() < 1e-9);
            }
        }
        assert!((j.first[0][0] - 3.0).abs() < 1e-10);
        assert!((j.first[1][0] + 2.0).abs() < 1e-10);
    }

    #[test]
    fn trig_partials_match_closed_form() {
        let f = |x: &[f64]| x[0].sin() * x[1].cos();
        let (x, y) = (0.3_f64, 0.7_f64);
        for h in [1e-4, 1e-3] {
            let j = central_diff_jet(f, &[x, y], h).unwrap();
            assert!((j.first[0] - x.cos() * y.cos()).abs() < 1e-6);
            assert!((j.first[1] + x.sin() * y.sin()).abs() < 1e-6);
            assert!((j.second[0][0] + x.sin() * y.cos()).abs() < 1e-6);
            assert!((j.second[1][1] + x.sin() * y.cos()).abs() < 1e-6);
            assert!((j.second[0][1] + x.cos() * y.sin()).abs() < 1e-6);
            assert_eq!(j.mixed_asymmetry(), 0.0);
        }
    }

    #[test]
    fn halving_the_step_shrinks_first_derivative_error() {
        let f = |x: &[f64]| (1.3 * x[0]).exp() * x[0].sin();
        let exact = |x: f64| (1.3 * x).exp() * (1.3 * x.sin() + x.cos());
        let err = |h: f64| (central_diff_gradient(f, &[0.4], h).unwrap().first[0] - exact(0.4)).abs();
        for h in [0.1, 0.05, 0.02] {
            assert!(err(h) / err(h / 2.0) >= 3.0, "h={h}");
        }
    }

    #[test]
    fn non_finite_values_name_the_stencil_point() {
        let f = |x: &[f64]| if x[0] > 1.0005 { f64::NAN } else { x[0] };
        match central_diff_jet(f, &[1.0], 1e-3).unwrap_err() {
            Error::NonFinite { point } => assert!(point[0] > 1.0005),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn rejects_bad_step() {
        assert!(central_diff_jet(|x: &[f64]| x[0], &[0.0], 0.0).is_err());
    }
}
