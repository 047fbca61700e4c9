//! Piecewise sums of complex exponentials on the real line.
//!
//! Every 1D function in the model (finite-well states, Kronig-Penney cell
//! orbitals) is, piece by piece, `sum c * exp(r * (u - anchor))`. Products,
//! moments and Fourier transforms then reduce to closed-form integrals.

use num_complex::Complex64;

#[derive(Clone, Copy, Debug)]
pub(crate) struct Term {
    pub coef: Complex64,
    pub rate: Complex64,
}

#[derive(Clone, Debug)]
pub(crate) struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub anchor: f64,
    pub terms: Vec<Term>,
}

#[derive(Clone, Debug, Default)]
pub(crate) struct PiecewiseExp {
    pub pieces: Vec<Piece>,
}

const SERIES_RADIUS: f64 = 0.5;
const SERIES_TERMS: usize = 18;

/// (e^z - 1) / z
fn phi1(z: Complex64) -> Complex64 {
    if z.norm() < SERIES_RADIUS {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut term = Complex64::new(1.0, 0.0);
        for n in 1..=SERIES_TERMS {
            sum += term;
            term *= z / (n as f64 + 1.0);
        }
        sum
    } else {
        (z.exp() - 1.0) / z
    }
}

/// Integral of x e^(z x) over [0, 1].
fn psi(z: Complex64) -> Complex64 {
    if z.norm() < SERIES_RADIUS {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut power = Complex64::new(1.0, 0.0);
        let mut factorial = 1.0;
        for n in 0..SERIES_TERMS {
            if n > 0 {
                factorial *= n as f64;
            }
            sum += power / (factorial * (n as f64 + 2.0));
            power *= z;
        }
        sum
    } else {
        (z.exp() * (z - 1.0) + 1.0) / (z * z)
    }
}

/// Integral of t^power * exp(beta t) over [t0, t1]; either end may be infinite
/// provided the integrand decays there.
fn exp_moment(beta: Complex64, t0: f64, t1: f64, power: u8) -> Complex64 {
    debug_assert!(power <= 1);
    if t1 == f64::INFINITY {
        debug_assert!(beta.re < 0.0);
        let e = (beta * t0).exp();
        return match power {
            0 => -e / beta,
            _ => e * (-t0 / beta + 1.0 / (beta * beta)),
        };
    }
    if t0 == f64::NEG_INFINITY {
        debug_assert!(beta.re > 0.0);
        let e = (beta * t1).exp();
        return match power {
            0 => e / beta,
            _ => e * (t1 / beta - 1.0 / (beta * beta)),
        };
    }
    let width = t1 - t0;
    let z = beta * width;
    // expand from whichever end keeps the exponential bounded
    if beta.re <= 0.0 {
        let e = (beta * t0).exp();
        match power {
            0 => e * width * phi1(z),
            _ => e * (t0 * width * phi1(z) + width * width * psi(z)),
        }
    } else {
        let e = (beta * t1).exp();
        match power {
            0 => e * width * phi1(-z),
            _ => e * (t1 * width * phi1(-z) - width * width * psi(-z)),
        }
    }
}

impl PiecewiseExp {
    pub fn eval(&self, u: f64) -> f64 {
        for p in &self.pieces {
            if u >= p.lo && u <= p.hi {
                return p
                    .terms
                    .iter()
                    .map(|t| t.coef * (t.rate * (u - p.anchor)).exp())
                    .sum::<Complex64>()
                    .re;
            }
        }
        0.0
    }

    pub fn derivative(&self) -> PiecewiseExp {
        PiecewiseExp {
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece {
                    terms: p
                        .terms
                        .iter()
                        .map(|t| Term {
                            coef: t.coef * t.rate,
                            rate: t.rate,
                        })
                        .collect(),
                    ..p.clone()
                })
                .collect(),
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for p in &mut self.pieces {
            for t in &mut p.terms {
                t.coef *= factor;
            }
        }
    }

    /// Integral of `self * other * u^power * exp(i q u)` over `window`.
    pub fn product_integral(
        &self,
        other: &PiecewiseExp,
        window: (f64, f64),
        power: u8,
        q: f64,
    ) -> Complex64 {
        let iq = Complex64::new(0.0, q);
        let mut total = Complex64::new(0.0, 0.0);
        for a in &self.pieces {
            for b in &other.pieces {
                let lo = a.lo.max(b.lo).max(window.0);
                let hi = a.hi.min(b.hi).min(window.1);
                if lo >= hi {
                    continue;
                }
                let s = a.anchor;
                let t0 = lo - s;
                let t1 = hi - s;
                let phase = if q == 0.0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    (iq * s).exp()
                };
                for ta in &a.terms {
                    for tb in &b.terms {
                        let mut coef = ta.coef * tb.coef;
                        if b.anchor != s {
                            coef *= (tb.rate * (s - b.anchor)).exp();
                        }
                        let beta = ta.rate + tb.rate + iq;
                        let mut piece = exp_moment(beta, t0, t1, power);
                        if power == 1 && s != 0.0 {
                            piece += s * exp_moment(beta, t0, t1, 0);
                        }
                        total += coef * phase * piece;
                    }
                }
            }
        }
        total
    }
}
