//! Real-space reference densities for the Coulomb matrix elements, sampled
//! by the Monte Carlo integrator.

use std::f64::consts::PI;

use dotforge::coulombk::ground_functions;
use dotforge::units::COULOMB;
use dotforge::wells1d::Well1DState;
use dotforge::{DotGeometry, MaterialParams, Species};

use super::montecarlo::{coulomb_integral, Density, Factor};

pub const MC_SAMPLES: usize = 10_000_000;
pub const MC_SAMPLES_SMALL: usize = 3_000_000;

pub fn fine_lattice() -> MaterialParams {
    MaterialParams {
        kp_halfwidth_x: 0.02,
        ..MaterialParams::default()
    }
}

pub fn ground(dot: &DotGeometry, m: &MaterialParams, s: Species) -> [Well1DState; 3] {
    ground_functions(dot, m, s).unwrap()
}

/// Sampling window that holds all but e^-28 of a bound state's weight.
pub fn window(a: &Well1DState, b: &Well1DState) -> f64 {
    0.5 * a.params.width_w.max(b.params.width_w) + 14.0 / a.k_out.min(b.k_out)
}

/// Real closed form of an even bound state: A cos(k u) inside, B e^{-κ(|u|-w/2)}
/// outside, and its derivative.
#[derive(Clone, Copy)]
pub struct EvenBound {
    half: f64,
    k_in: f64,
    kappa: f64,
    inner: f64,
    outer: f64,
}

impl EvenBound {
    pub fn new(s: &Well1DState) -> Self {
        EvenBound {
            half: 0.5 * s.params.width_w,
            k_in: s.k_in,
            kappa: s.k_out,
            inner: s.coeffs[0],
            outer: s.coeffs[1],
        }
    }

    pub fn value(&self, u: f64) -> f64 {
        if u.abs() <= self.half {
            self.inner * (self.k_in * u).cos()
        } else {
            self.outer * (-self.kappa * (u.abs() - self.half)).exp()
        }
    }

    pub fn slope(&self, u: f64) -> f64 {
        if u.abs() <= self.half {
            -self.inner * self.k_in * (self.k_in * u).sin()
        } else {
            -u.signum() * self.kappa * self.outer * (-self.kappa * (u.abs() - self.half)).exp()
        }
    }
}

pub fn product_factor(a: &Well1DState, b: &Well1DState) -> Factor {
    let (fa, fb) = (EvenBound::new(a), EvenBound::new(b));
    let ext = window(a, b);
    Factor::new(move |u| fa.value(u) * fb.value(u), -ext, ext)
}

pub fn slope_factor(a: &Well1DState, b: &Well1DState) -> Factor {
    let (fa, fb) = (EvenBound::new(a), EvenBound::new(b));
    let ext = window(a, b);
    Factor::new(move |u| fa.slope(u) * fb.value(u) + fa.value(u) * fb.slope(u), -ext, ext)
}

pub fn s_cell(x: f64, u: f64) -> f64 {
    (PI * u / (2.0 * x)).cos() / x.sqrt()
}

pub fn p_cell(x: f64, u: f64) -> f64 {
    (PI * u / x).sin() / x.sqrt()
}

pub fn cell_factor(x: f64, p_like: bool) -> Factor {
    if p_like {
        Factor::new(move |u| p_cell(x, u).powi(2), -x, x)
    } else {
        Factor::new(move |u| s_cell(x, u).powi(2), -x, x)
    }
}

/// Full |ψ|² of a species: envelope density convolved with the cell density.
pub fn charge_density(dot: &DotGeometry, m: &MaterialParams, s: Species) -> Density {
    let g = ground(dot, m, s);
    let x = m.kp_halfwidth_x;
    let axis = |i: usize| vec![product_factor(&g[i], &g[i]), cell_factor(x, s == Species::Hole && i == 2)];
    Density {
        axes: [axis(0), axis(1), axis(2)],
    }
}

/// −∂z(φe φh): the long-wavelength limit of the transition density, per unit
/// atomic dipole.
pub fn transition_slope(dot: &DotGeometry, m: &MaterialParams) -> Density {
    let e = ground(dot, m, Species::Electron);
    let h = ground(dot, m, Species::Hole);
    Density {
        axes: [
            vec![product_factor(&e[0], &h[0])],
            vec![product_factor(&e[1], &h[1])],
            vec![slope_factor(&e[2], &h[2])],
        ],
    }
}

pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// Long-wavelength exchange plus the first lattice shell, which for a fine
/// lattice factorises into a contact term.
pub fn exchange_oracle(dot: &DotGeometry, m: &MaterialParams, seed: u64) -> (f64, f64) {
    let x = m.kp_halfwidth_x;
    let d = 32.0 * x / (9.0 * PI * PI);
    let rho = transition_slope(dot, m);
    let (mean, err) = coulomb_integral(&rho, &rho, [0.0; 3], MC_SAMPLES_SMALL, seed);
    let scale = COULOMB / m.eps_r;
    // first shell: only ±π/x along z couples s to p_z
    let g = PI / x;
    let b_sp = simpson(|u| s_cell(x, u) * p_cell(x, u) * (g * u).sin(), -x, x, 20_000);
    let e = ground(dot, m, Species::Electron);
    let h = ground(dot, m, Species::Hole);
    let contact: f64 = (0..3)
        .map(|i| {
            let ext = window(&e[i], &h[i]);
            simpson(|u| (e[i].eval(u) * h[i].eval(u)).powi(2), -ext, ext, 200_000)
        })
        .product();
    let shell = 2.0 * b_sp * b_sp * 4.0 * PI / (g * g) * contact;
    (scale * (d * d * mean + shell), scale * d * d * err)
}
