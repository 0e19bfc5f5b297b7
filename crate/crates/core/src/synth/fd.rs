//! Central finite differences for black-box maps `R^n → R^m`.

use crate::error::{Error, Result};
use crate::numeric::Matrix;
use crate::tensor::DerivTensor;

/// Default step of the first-order central difference.
pub const JACOBIAN_STEP: f64 = 1e-5;
/// Default step of the second-order central differences.
pub const HESSIAN_STEP: f64 = 1e-4;

/// A smooth map evaluated at a point.
pub trait EvalFunction {
    fn eval(&self, x: &[f64]) -> Vec<f64>;
}

impl<F: Fn(&[f64]) -> Vec<f64>> EvalFunction for F {
    fn eval(&self, x: &[f64]) -> Vec<f64> {
        self(x)
    }
}

fn checked<F: EvalFunction + ?Sized>(f: &F, x: &[f64], m: Option<usize>) -> Result<Vec<f64>> {
    let y = f.eval(x);
    if let Some(m) = m {
        if y.len() != m {
            return Err(Error::Eval(format!("output length changed from {m} to {}", y.len())));
        }
    }
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::Eval(format!("output {} is not finite at {x:?}", i + 1)));
    }
    Ok(y)
}

fn check_probe(x: &[f64], step: f64) -> Result<()> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidInput(format!("step must be positive, got {step}")));
    }
    if x.is_empty() {
        return Err(Error::InvalidInput("empty evaluation point".into()));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("evaluation point is not finite".into()));
    }
    Ok(())
}

fn shifted(x: &[f64], moves: &[(usize, f64)]) -> Vec<f64> {
    let mut p = x.to_vec();
    for &(i, d) in moves {
        p[i] += d;
    }
    p
}

/// `m × n` Jacobian at `x`, `(f(x + h e_c) − f(x − h e_c)) / 2h`.
pub fn fd_jacobian<F: EvalFunction + ?Sized>(f: &F, x: &[f64], h: f64) -> Result<Matrix> {
    check_probe(x, h)?;
    let m = checked(f, x, None)?.len();
    if m == 0 {
        return Err(Error::Eval("map has no outputs".into()));
    }
    let mut columns = Vec::with_capacity(x.len());
    for c in 0..x.len() {
        let up = checked(f, &shifted(x, &[(c, h)]), Some(m))?;
        let down = checked(f, &shifted(x, &[(c, -h)]), Some(m))?;
        columns.push(up.iter().zip(&down).map(|(a, b)| (a - b) / (2.0 * h)).collect::<Vec<_>>());
    }
    Matrix::from_columns(&columns)
}

/// `m × n × n` Hessian at `x`: three-point formula on the diagonal, four-point
/// formula off it, mirrored so the result is exactly symmetric.
pub fn fd_hessian<F: EvalFunction + ?Sized>(f: &F, x: &[f64], h: f64) -> Result<DerivTensor> {
    check_probe(x, h)?;
    let centre = checked(f, x, None)?;
    let (m, n) = (centre.len(), x.len());
    if m == 0 {
        return Err(Error::Eval("map has no outputs".into()));
    }
    let mut t = DerivTensor::zeros(m, n, 2)?;
    for a in 0..n {
        let up = checked(f, &shifted(x, &[(a, h)]), Some(m))?;
        let down = checked(f, &shifted(x, &[(a, -h)]), Some(m))?;
        for r in 0..m {
            t.set(r, &[a, a], (up[r] - 2.0 * centre[r] + down[r]) / (h * h));
        }
        for b in a + 1..n {
            let pp = checked(f, &shifted(x, &[(a, h), (b, h)]), Some(m))?;
            let pm = checked(f, &shifted(x, &[(a, h), (b, -h)]), Some(m))?;
            let mp = checked(f, &shifted(x, &[(a, -h), (b, h)]), Some(m))?;
            let mm = checked(f, &shifted(x, &[(a, -h), (b, -h)]), Some(m))?;
            for r in 0..m {
                let v = (pp[r] - pm[r] - mp[r] + mm[r]) / (4.0 * h * h);
                t.set(r, &[a, b], v);
                t.set(r, &[b, a], v);
            }
        }
    }
    Ok(t)
}
