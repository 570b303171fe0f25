use num_complex::Complex64;

use crate::{Error, Result};

/// Default step: `1e-5·max(1,|z|)` for first derivatives and `1e-3·max(1,|z|)`
/// for second derivatives, where the `h⁻²` roundoff dominates much earlier.
pub fn default_step(z: Complex64, order: u8) -> f64 {
    let scale = z.norm().max(1.0);
    match order {
        1 => 1e-5 * scale,
        _ => 1e-3 * scale,
    }
}

/// Central difference of order 1 or 2 along the real direction with one
/// Richardson level, `(4 D(h/2) − D(h)) / 3`. Truncation error is O(h⁴).
pub fn central_diff<F>(f: F, z: Complex64, order: u8, h: f64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::BadStep(h));
    }
    if order != 1 && order != 2 {
        return Err(Error::InvalidArgument(format!("derivative order {order} not in {{1,2}}")));
    }
    let eval = |x: Complex64| -> Result<Complex64> {
        let v = f(x);
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(format!("{x}")))
        }
    };
    let f0 = if order == 2 { eval(z)? } else { Complex64::new(0.0, 0.0) };
    let stencil = |h: f64| -> Result<Complex64> {
        let fp = eval(z + h)?;
        let fm = eval(z - h)?;
        Ok(match order {
            1 => (fp - fm) / (2.0 * h),
            _ => (fp - 2.0 * f0 + fm) / (h * h),
        })
    };
    let coarse = stencil(h)?;
    let fine = stencil(0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

pub fn central_diff_default<F>(f: F, z: Complex64, order: u8) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    central_diff(f, z, order, default_step(z, order))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_first_derivative() {
        let d = central_diff_default(|z| z * z, Complex64::new(1.0, 0.0), 1).unwrap();
        assert!((d - 2.0).norm() < 1e-8);
    }

    #[test]
    fn reciprocal_second_derivative() {
        let d = central_diff_default(|z| 1.0 / z, Complex64::new(2.0, 0.0), 2).unwrap();
        assert!((d - 0.25).norm() < 1e-7, "{d}");
    }

    #[test]
    fn off_axis_point() {
        // d/dz e^z at 1+i
        let z = Complex64::new(1.0, 1.0);
        let d = central_diff_default(|z| z.exp(), z, 1).unwrap();
        assert!((d - z.exp()).norm() < 1e-9);
    }

    #[test]
    fn guards() {
        let f = |z: Complex64| z;
        assert_eq!(central_diff(f, Complex64::new(0.0, 0.0), 1, 0.0), Err(Error::BadStep(0.0)));
        let g = |z: Complex64| 1.0 / z;
        assert!(matches!(
            central_diff(g, Complex64::new(0.0, 0.0), 2, 0.1),
            Err(Error::NonFinite(_))
        ));
    }
}
