use num_complex::Complex64;

use crate::{Error, Result};

/// Value and first three derivatives of a chart at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub g: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
    pub d3: Complex64,
}

impl Jet {
    pub fn schwarzian(&self) -> Complex64 {
        let r = self.d2 / self.d1;
        self.d3 / self.d1 - 1.5 * r * r
    }
}

/// Analytic map `g: D → ℍ` used to transport correlators.
#[derive(Debug, Clone, PartialEq)]
pub enum ConformalChart {
    Identity,
    /// `(az + b)/(cz + d)`.
    Moebius { a: Complex64, b: Complex64, c: Complex64, d: Complex64 },
    /// `u ↦ exp(πu/h)`, taking `0 < Im u < h` onto ℍ.
    HorizontalStripToH { height: f64 },
    /// `z ↦ e^{iθ} z`.
    Rotation { angle: f64 },
    /// Applied left to right: `compose([f, g])` is `g ∘ f`.
    Composition(Vec<ConformalChart>),
}

impl ConformalChart {
    pub fn moebius(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self::Moebius { a, b, c, d }
    }

    pub fn horizontal_strip_to_h(height: f64) -> Self {
        Self::HorizontalStripToH { height }
    }

    pub fn rotation(angle: f64) -> Self {
        Self::Rotation { angle }
    }

    pub fn compose(charts: Vec<ConformalChart>) -> Self {
        Self::Composition(charts)
    }

    /// Short label for reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Identity => "identity",
            Self::Moebius { .. } => "moebius",
            Self::HorizontalStripToH { .. } => "strip",
            Self::Rotation { .. } => "rotation",
            Self::Composition(_) => "composition",
        }
    }

    pub fn jet(&self, z: Complex64) -> Jet {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        match self {
            Self::Identity => Jet { g: z, d1: one, d2: zero, d3: zero },
            Self::Moebius { a, b, c, d } => {
                let den = c * z + d;
                let det = a * d - b * c;
                Jet {
                    g: (a * z + b) / den,
                    d1: det / (den * den),
                    d2: -2.0 * c * det / (den * den * den),
                    d3: 6.0 * c * c * det / (den * den * den * den),
                }
            }
            Self::HorizontalStripToH { height } => {
                let k = std::f64::consts::PI / height;
                let e = (k * z).exp();
                Jet { g: e, d1: k * e, d2: k * k * e, d3: k * k * k * e }
            }
            Self::Rotation { angle } => {
                let r = Complex64::from_polar(1.0, *angle);
                Jet { g: r * z, d1: r, d2: zero, d3: zero }
            }
            Self::Composition(list) => {
                let mut acc = Self::Identity.jet(z);
                for f in list {
                    let o = f.jet(acc.g);
                    acc = Jet {
                        g: o.g,
                        d1: o.d1 * acc.d1,
                        d2: o.d2 * acc.d1 * acc.d1 + o.d1 * acc.d2,
                        d3: o.d3 * acc.d1 * acc.d1 * acc.d1 + 3.0 * o.d2 * acc.d1 * acc.d2 + o.d1 * acc.d3,
                    };
                }
                acc
            }
        }
    }

    /// `g(z) − g(w)` without cancellation: each factor maps the exact
    /// difference of its arguments to the exact difference of its values.
    pub fn image_difference(&self, z: Complex64, w: Complex64) -> Complex64 {
        self.step_difference(z, w, z - w).2
    }

    fn step_difference(&self, z: Complex64, w: Complex64, dz: Complex64) -> (Complex64, Complex64, Complex64) {
        match self {
            Self::Identity => (z, w, dz),
            Self::Moebius { a, b, c, d } => {
                let (pz, pw) = (c * z + d, c * w + d);
                ((a * z + b) / pz, (a * w + b) / pw, (a * d - b * c) * dz / (pz * pw))
            }
            Self::HorizontalStripToH { height } => {
                let k = std::f64::consts::PI / height;
                let (ez, ew) = ((k * z).exp(), (k * w).exp());
                (ez, ew, ew * expm1(k * dz))
            }
            Self::Rotation { angle } => {
                let r = Complex64::from_polar(1.0, *angle);
                (r * z, r * w, r * dz)
            }
            Self::Composition(list) => list.iter().fold((z, w, dz), |(z, w, dz), f| f.step_difference(z, w, dz)),
        }
    }

    /// Jet with a check that `g′(z) ≠ 0` and everything is finite.
    pub fn checked_jet(&self, z: Complex64) -> Result<Jet> {
        let j = self.jet(z);
        let finite = [j.g, j.d1, j.d2, j.d3].iter().all(|v| v.re.is_finite() && v.im.is_finite());
        if !finite {
            return Err(Error::NonFinite(format!("chart at {z}")));
        }
        if j.d1.norm() == 0.0 {
            return Err(Error::DegenerateChart(format!("{z}")));
        }
        Ok(j)
    }
}

/// `e^x − 1` accurate for small `|x|`.
fn expm1(x: Complex64) -> Complex64 {
    let (s, c) = x.im.sin_cos();
    let half = (0.5 * x.im).sin();
    Complex64::new(x.re.exp_m1() * c - 2.0 * half * half, x.re.exp() * s)
}

/// `S_g = g‴/g′ − (3/2)(g″/g′)²`.
pub fn schwarzian(chart: &ConformalChart, z: Complex64) -> Result<Complex64> {
    Ok(chart.checked_jet(z)?.schwarzian())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn moebius_is_projective() {
        let m = ConformalChart::moebius(c(2.0, 0.5), c(1.0, 0.0), c(0.3, -0.2), c(3.0, 0.0));
        for z in [c(0.1, 0.7), c(-1.0, 2.0), c(2.0, 0.3)] {
            assert!(schwarzian(&m, z).unwrap().norm() < 1e-13);
        }
    }

    #[test]
    fn exp_chart_schwarzian() {
        let s = ConformalChart::horizontal_strip_to_h(std::f64::consts::PI);
        for z in [c(0.0, 1.0), c(-0.4, 2.5), c(1.3, 0.2)] {
            assert!((schwarzian(&s, z).unwrap() - c(-0.5, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn stable_difference_agrees() {
        let ch = ConformalChart::compose(vec![
            ConformalChart::rotation(0.2),
            ConformalChart::horizontal_strip_to_h(2.0),
            ConformalChart::moebius(c(1.0, 0.0), c(2.0, 0.0), c(0.5, 0.0), c(3.0, 0.0)),
        ]);
        let (z, w) = (c(0.3, 0.4), c(-0.2, 0.9));
        let naive = ch.jet(z).g - ch.jet(w).g;
        assert!((ch.image_difference(z, w) - naive).norm() < 1e-14);
        // close points: the divided difference approaches g′; dyadic values
        // keep z + e exact
        let z = c(0.25, 0.5);
        let e = 2f64.powi(-30);
        let dd = ch.image_difference(z + e, z) / e;
        assert!((dd - ch.jet(z).d1).norm() < 1e-8 * ch.jet(z).d1.norm());
    }

    #[test]
    fn degenerate_moebius_rejected() {
        // ad - bc = 0
        let m = ConformalChart::moebius(c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0));
        assert!(m.checked_jet(c(0.0, 1.0)).is_err());
    }
}
