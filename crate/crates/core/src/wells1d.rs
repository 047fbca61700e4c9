//! Eigenstates of the 1D finite square well.
//!
//! The well occupies |u| < w/2 with potential 0 inside and `depth_v` outside.
//! Bound states live on the whole line. Unbound states (energy above the
//! barrier) are quantised by hard walls at u = +-box_l/2 and vanish beyond.
//! One effective mass is used inside and outside.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{require_positive, Error, Result};
use crate::expsum::{Piece, PiecewiseExp, Term};
use crate::units::HBAR2_OVER_2M0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Well1DParams {
    /// Full well width (nm).
    pub width_w: f64,
    /// Barrier height (meV).
    pub depth_v: f64,
    /// Effective mass (units of m0).
    pub mass: f64,
    /// Full width of the outer hard-wall box (nm); only unbound states see it.
    pub box_l: f64,
}

impl Well1DParams {
    /// Box defaults to ten well widths.
    pub fn new(width_w: f64, depth_v: f64, mass: f64) -> Self {
        Well1DParams {
            width_w,
            depth_v,
            mass,
            box_l: 10.0 * width_w,
        }
    }

    pub fn with_box(mut self, box_l: f64) -> Self {
        self.box_l = box_l;
        self
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("width_w", self.width_w)?;
        require_positive("depth_V", self.depth_v)?;
        require_positive("mass", self.mass)?;
        require_positive("box_L", self.box_l)?;
        if self.box_l <= self.width_w {
            return Err(Error::InvalidParameter {
                field: "box_L",
                reason: format!("must exceed width_w = {}", self.width_w),
            });
        }
        Ok(())
    }

    /// Wavevector (nm^-1) for kinetic energy `e` (meV).
    fn wavevector(&self, e: f64) -> f64 {
        (self.mass * e.max(0.0) / HBAR2_OVER_2M0).sqrt()
    }

    fn energy_of(&self, k: f64) -> f64 {
        HBAR2_OVER_2M0 * k * k / self.mass
    }

    /// Dimensionless well strength z0 = k_V w / 2.
    fn strength(&self) -> f64 {
        0.5 * self.width_w * self.wavevector(self.depth_v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StateKind {
    Bound,
    Unbound,
}

impl StateKind {
    pub fn name(self) -> &'static str {
        match self {
            StateKind::Bound => "bound",
            StateKind::Unbound => "unbound",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Well1DState {
    pub energy: f64,
    pub parity: Parity,
    pub kind: StateKind,
    /// Wavevector inside the well (nm^-1).
    pub k_in: f64,
    /// Decay constant (bound) or outside wavevector (unbound), nm^-1.
    pub k_out: f64,
    /// Normalised amplitudes: inside, outside.
    pub coeffs: [f64; 2],
    pub params: Well1DParams,
    profile: PiecewiseExp,
    slope: PiecewiseExp,
}

fn cos_terms(k: f64, amp: f64) -> Vec<Term> {
    vec![
        Term {
            coef: Complex64::new(0.5 * amp, 0.0),
            rate: Complex64::new(0.0, k),
        },
        Term {
            coef: Complex64::new(0.5 * amp, 0.0),
            rate: Complex64::new(0.0, -k),
        },
    ]
}

fn sin_terms(k: f64, amp: f64) -> Vec<Term> {
    vec![
        Term {
            coef: Complex64::new(0.0, -0.5 * amp),
            rate: Complex64::new(0.0, k),
        },
        Term {
            coef: Complex64::new(0.0, 0.5 * amp),
            rate: Complex64::new(0.0, -k),
        },
    ]
}

/// amp * sin(theta + k t) as exponentials in t.
fn shifted_sin_terms(theta: f64, k: f64, amp: f64) -> Vec<Term> {
    let plus = Complex64::from_polar(1.0, theta) / Complex64::new(0.0, 2.0);
    let minus = -Complex64::from_polar(1.0, -theta) / Complex64::new(0.0, 2.0);
    vec![
        Term {
            coef: amp * plus,
            rate: Complex64::new(0.0, k),
        },
        Term {
            coef: amp * minus,
            rate: Complex64::new(0.0, -k),
        },
    ]
}

impl Well1DState {
    fn build(
        params: Well1DParams,
        energy: f64,
        parity: Parity,
        kind: StateKind,
        k_in: f64,
        k_out: f64,
        outer_ratio: f64,
    ) -> Self {
        let half = 0.5 * params.width_w;
        let sign = parity.sign();
        let inside = match parity {
            Parity::Even => cos_terms(k_in, 1.0),
            Parity::Odd => sin_terms(k_in, 1.0),
        };
        let (left, right, outer_end) = match kind {
            StateKind::Bound => (
                vec![Term {
                    coef: Complex64::new(sign * outer_ratio, 0.0),
                    rate: Complex64::new(k_out, 0.0),
                }],
                vec![Term {
                    coef: Complex64::new(outer_ratio, 0.0),
                    rate: Complex64::new(-k_out, 0.0),
                }],
                f64::INFINITY,
            ),
            StateKind::Unbound => {
                let gap = 0.5 * (params.box_l - params.width_w);
                let theta = k_out * gap;
                let right = shifted_sin_terms(theta, -k_out, outer_ratio);
                let left = shifted_sin_terms(theta, k_out, sign * outer_ratio);
                (left, right, 0.5 * params.box_l)
            }
        };
        let mut profile = PiecewiseExp {
            pieces: vec![
                Piece {
                    lo: -outer_end,
                    hi: -half,
                    anchor: -half,
                    terms: left,
                },
                Piece {
                    lo: -half,
                    hi: half,
                    anchor: 0.0,
                    terms: inside,
                },
                Piece {
                    lo: half,
                    hi: outer_end,
                    anchor: half,
                    terms: right,
                },
            ],
        };
        let norm2 = profile
            .product_integral(&profile, (f64::NEG_INFINITY, f64::INFINITY), 0, 0.0)
            .re;
        let amp = 1.0 / norm2.sqrt();
        profile.scale(amp);
        let slope = profile.derivative();
        Well1DState {
            energy,
            parity,
            kind,
            k_in,
            k_out,
            coeffs: [amp, amp * outer_ratio],
            params,
            profile,
            slope,
        }
    }

    /// Wavefunction amplitude (nm^-1/2).
    pub fn eval(&self, x: f64) -> f64 {
        self.profile.eval(x)
    }

    /// dξ/dx (nm^-3/2).
    pub fn eval_derivative(&self, x: f64) -> f64 {
        self.slope.eval(x)
    }

    /// Integral of ξ² over the outer box.
    pub fn norm_in_box(&self) -> f64 {
        let h = 0.5 * self.params.box_l;
        self.profile.product_integral(&self.profile, (-h, h), 0, 0.0).re
    }
}

const FULL_LINE: (f64, f64) = (f64::NEG_INFINITY, f64::INFINITY);

/// ∫ ξ_a ξ_b dx over the whole line.
pub fn overlap(a: &Well1DState, b: &Well1DState) -> f64 {
    a.profile.product_integral(&b.profile, FULL_LINE, 0, 0.0).re
}

/// ∫ ξ_a ξ_b dx restricted to |x| < w/2 of `a`'s well.
pub fn overlap_inside(a: &Well1DState, b: &Well1DState) -> f64 {
    let h = 0.5 * a.params.width_w;
    a.profile.product_integral(&b.profile, (-h, h), 0, 0.0).re
}

/// ∫ ξ_a x ξ_b dx.
pub fn position(a: &Well1DState, b: &Well1DState) -> f64 {
    a.profile.product_integral(&b.profile, FULL_LINE, 1, 0.0).re
}

/// ∫ ξ_a clamp(x, −c, c) ξ_b dx: a linear potential that levels off at |x| = c.
pub fn clamped_position(a: &Well1DState, b: &Well1DState, c: f64) -> f64 {
    let inner = a.profile.product_integral(&b.profile, (-c, c), 1, 0.0).re;
    let right = a.profile.product_integral(&b.profile, (c, f64::INFINITY), 0, 0.0).re;
    let left = a.profile.product_integral(&b.profile, (f64::NEG_INFINITY, -c), 0, 0.0).re;
    inner + c * (right - left)
}

/// Kinetic matrix element (hbar²/2m) ∫ ξ_a' ξ_b' dx using `a`'s mass.
pub fn kinetic(a: &Well1DState, b: &Well1DState) -> f64 {
    HBAR2_OVER_2M0 / a.params.mass * a.slope.product_integral(&b.slope, FULL_LINE, 0, 0.0).re
}

/// ∫ ξ_a ξ_b exp(i q x) dx.
pub fn fourier_product(a: &Well1DState, b: &Well1DState, q: f64) -> Complex64 {
    a.profile.product_integral(&b.profile, FULL_LINE, 0, q)
}

/// Number of bound states: 1 + floor(sqrt(2 m V) w / (pi hbar)).
pub fn bound_state_count(params: &Well1DParams) -> usize {
    1 + (2.0 * params.strength() / PI).floor() as usize
}

/// Bisection on an interval where `f(lo) < 0 < f(hi)`, refined until the
/// bracket in energy is below 1e-10 meV or floating point stalls.
fn bisect<F: Fn(f64) -> f64, E: Fn(f64) -> f64>(f: F, energy: E, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || (energy(hi) - energy(lo)).abs() < 1e-10 {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All bound states, ascending in energy (parities alternate from even).
pub fn solve_bound(params: &Well1DParams) -> Result<Vec<Well1DState>> {
    require_positive("width_w", params.width_w)?;
    require_positive("depth_V", params.depth_v)?;
    require_positive("mass", params.mass)?;
    let z0 = params.strength();
    let half = 0.5 * params.width_w;
    let energy = |z: f64| params.energy_of(z / half);
    let mut states = Vec::new();
    let mut n = 0usize;
    loop {
        // branch n: even roots in (m pi, m pi + pi/2), odd in (m pi + pi/2, (m+1) pi)
        let lo = n as f64 * FRAC_PI_2;
        if lo >= z0 {
            break;
        }
        let hi = (lo + FRAC_PI_2).min(z0);
        let parity = if n % 2 == 0 { Parity::Even } else { Parity::Odd };
        let tail = |z: f64| (z0 * z0 - z * z).max(0.0).sqrt();
        // cos (even) or sin (odd) keeps one sign on the branch: (-1)^(n/2)
        let branch_sign = if (n / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let z = match parity {
            // z tan z = sqrt(z0² - z²), written without poles
            Parity::Even => bisect(|z| branch_sign * (z * z.sin() - tail(z) * z.cos()), energy, lo, hi),
            // -z cot z = sqrt(z0² - z²)
            Parity::Odd => bisect(|z| branch_sign * (-z * z.cos() - tail(z) * z.sin()), energy, lo, hi),
        };
        let k_in = z / half;
        let alpha = tail(z) / half;
        let ratio = match parity {
            Parity::Even => z.cos(),
            Parity::Odd => z.sin(),
        };
        states.push(Well1DState::build(
            *params,
            energy(z),
            parity,
            StateKind::Bound,
            k_in,
            alpha,
            ratio,
        ));
        n += 1;
    }
    Ok(states)
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Lowest `n_max` states above the barrier, ascending in energy.
pub fn solve_unbound(params: &Well1DParams, n_max: usize) -> Result<Vec<Well1DState>> {
    params.validate()?;
    if n_max == 0 {
        return Err(Error::InvalidParameter {
            field: "n_max",
            reason: "must be at least 1".into(),
        });
    }
    let half = 0.5 * params.width_w;
    let gap = 0.5 * (params.box_l - params.width_w);
    let kv = params.wavevector(params.depth_v);
    let inner = |kp: f64| (kp * kp + kv * kv).sqrt();
    let even = |kp: f64| {
        let k = inner(kp);
        (k * half).cos() * (kp * gap).cos() - k * (k * half).sin() * gap * sinc(kp * gap)
    };
    let odd = |kp: f64| {
        let k = inner(kp);
        (k * half).sin() * (kp * gap).cos() + k * (k * half).cos() * gap * sinc(kp * gap)
    };
    let energy = |kp: f64| params.depth_v + params.energy_of(kp);

    // consecutive same-parity roots are at least ~2 pi / box_l apart in k'
    let step = PI / (16.0 * params.box_l);
    let mut roots: Vec<(f64, Parity)> = Vec::new();
    let mut kp = 0.0;
    let mut prev = (even(0.0), odd(0.0));
    let limit = (n_max as f64 + 8.0) * 2.0 * PI / params.box_l * 4.0 + 10.0 * kv;
    while kp < limit {
        let next = kp + step;
        let cur = (even(next), odd(next));
        for (parity, a, b, f) in [
            (Parity::Even, prev.0, cur.0, &even as &dyn Fn(f64) -> f64),
            (Parity::Odd, prev.1, cur.1, &odd as &dyn Fn(f64) -> f64),
        ] {
            if a == 0.0 && kp > 0.0 {
                roots.push((kp, parity));
            } else if a * b < 0.0 {
                let root = if a < 0.0 {
                    bisect(f, energy, kp, next)
                } else {
                    bisect(|x| -f(x), energy, kp, next)
                };
                roots.push((root, parity));
            }
        }
        prev = cur;
        kp = next;
        // keep scanning slightly past n_max so the merge of parities is complete
        if roots.len() >= n_max + 2 {
            break;
        }
    }
    if roots.len() < n_max {
        return Err(Error::Bracketing {
            branch: if roots.iter().filter(|r| r.1 == Parity::Even).count()
                <= roots.iter().filter(|r| r.1 == Parity::Odd).count()
            {
                "even"
            } else {
                "odd"
            },
            lo: roots.last().map(|r| r.0).unwrap_or(0.0),
            hi: limit,
        });
    }
    roots.sort_by(|a, b| a.0.total_cmp(&b.0));
    roots.truncate(n_max);
    Ok(roots
        .into_iter()
        .map(|(kp, parity)| {
            let k = inner(kp);
            let (s, c) = (k * half).sin_cos();
            let (sp, cp) = (kp * gap).sin_cos();
            // least-squares combination of the value and slope matching conditions
            let ratio = match parity {
                Parity::Even => c * sp + (k / kp) * s * cp,
                Parity::Odd => s * sp - (k / kp) * c * cp,
            };
            Well1DState::build(*params, energy(kp), parity, StateKind::Unbound, k, kp, ratio)
        })
        .collect())
}
