//! Coulomb matrix elements evaluated in reciprocal space.
//!
//! Each charge density is an envelope product times a lattice-periodic Bloch
//! product. In the ground-basis approximation the envelope factor is the
//! closed-form transform of the (1,1,1) finite-well product function and the
//! Bloch factor is a Kronig-Penney cell integral, so every matrix element is a
//! three-dimensional integral of `R1(K) conj(R2(K)) 4π/K² exp(-iK·R)`.

use std::f64::consts::PI;

use dotforge_cubature::{integrate, Options};
use nalgebra::Vector3;
use num_complex::Complex64;

use crate::error::{require_positive, Error, Result};
use crate::expsum::{Piece, PiecewiseExp, Term};
use crate::geometry::{DotGeometry, MaterialParams, MoleculeConfig, Species};
use crate::units::COULOMB;
use crate::wells1d::{fourier_product, overlap, solve_bound, Well1DParams, Well1DState};

/// Atomic orbitals of the Kronig-Penney cell: the two lowest states of an
/// infinite well of width 2x. Electrons are s-like on every axis, holes are
/// p-like along z.
#[derive(Clone, Debug)]
pub struct BlochModel {
    pub halfwidth_x: f64,
    s_orbital: PiecewiseExp,
    p_orbital: PiecewiseExp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlochPair {
    ElectronElectron,
    HoleHole,
    ElectronHole,
}

fn cell_orbital(x: f64, rate: f64, odd: bool) -> PiecewiseExp {
    let amp = 0.5 / x.sqrt();
    let (plus, minus) = if odd {
        (Complex64::new(0.0, -amp), Complex64::new(0.0, amp))
    } else {
        (Complex64::new(amp, 0.0), Complex64::new(amp, 0.0))
    };
    PiecewiseExp {
        pieces: vec![Piece {
            lo: -x,
            hi: x,
            anchor: 0.0,
            terms: vec![
                Term {
                    coef: plus,
                    rate: Complex64::new(0.0, rate),
                },
                Term {
                    coef: minus,
                    rate: Complex64::new(0.0, -rate),
                },
            ],
        }],
    }
}

impl BlochModel {
    pub fn new(halfwidth_x: f64) -> Result<Self> {
        require_positive("kp_halfwidth_x", halfwidth_x)?;
        Ok(BlochModel {
            halfwidth_x,
            s_orbital: cell_orbital(halfwidth_x, PI / (2.0 * halfwidth_x), false),
            p_orbital: cell_orbital(halfwidth_x, PI / halfwidth_x, true),
        })
    }

    pub fn from_material(material: &MaterialParams) -> Result<Self> {
        Self::new(material.kp_halfwidth_x)
    }

    /// ⟨s| z |p_z⟩ of the cell orbitals: 32x/(9π²) (nm).
    pub fn atomic_dipole(&self) -> f64 {
        32.0 * self.halfwidth_x / (9.0 * PI * PI)
    }

    fn cell_1d(&self, a: &PiecewiseExp, b: &PiecewiseExp, q: f64) -> Complex64 {
        let x = self.halfwidth_x;
        a.product_integral(b, (-x, x), 0, q)
    }

    /// Cell integral of U_a U_b exp(iK·r), with the cell normalised to one.
    pub fn bloch_ft(&self, pair: BlochPair, k: &Vector3<f64>) -> Complex64 {
        let s = &self.s_orbital;
        let p = &self.p_orbital;
        let lateral = self.cell_1d(s, s, k.x) * self.cell_1d(s, s, k.y);
        let along_z = match pair {
            BlochPair::ElectronElectron => self.cell_1d(s, s, k.z),
            BlochPair::HoleHole => self.cell_1d(p, p, k.z),
            BlochPair::ElectronHole => self.cell_1d(s, p, k.z),
        };
        lateral * along_z
    }

    /// Reciprocal lattice vectors of the cubic lattice with constant 2x,
    /// grouped by length; the first `n_shells` nonzero shells.
    pub fn shells(&self, n_shells: usize) -> Vec<Vector3<f64>> {
        if n_shells == 0 {
            return Vec::new();
        }
        let span = (n_shells as i32) + 1;
        let mut all: Vec<(i32, Vector3<i32>)> = Vec::new();
        for i in -span..=span {
            for j in -span..=span {
                for l in -span..=span {
                    let n2 = i * i + j * j + l * l;
                    if n2 > 0 {
                        all.push((n2, Vector3::new(i, j, l)));
                    }
                }
            }
        }
        let mut lengths: Vec<i32> = all.iter().map(|(n2, _)| *n2).collect();
        lengths.sort_unstable();
        lengths.dedup();
        let cutoff = lengths[n_shells - 1];
        let unit = PI / self.halfwidth_x;
        all.into_iter()
            .filter(|(n2, _)| *n2 <= cutoff)
            .map(|(_, n)| n.cast::<f64>() * unit)
            .collect()
    }
}

/// Ground (1,1,1) finite-well function of a species in a dot, one 1D state
/// per axis.
pub fn ground_functions(dot: &DotGeometry, material: &MaterialParams, species: Species) -> Result<[Well1DState; 3]> {
    dot.validate()?;
    material.validate()?;
    let widths = dot.widths();
    let solve = |w: f64| -> Result<Well1DState> {
        let params = Well1DParams::new(w, material.depth(species), material.mass(species));
        Ok(solve_bound(&params)?.swap_remove(0))
    };
    Ok([solve(widths[0])?, solve(widths[1])?, solve(widths[2])?])
}

/// Product of two ground functions of one dot, φ_a φ_b, handled through its
/// Fourier transform.
#[derive(Clone, Debug)]
pub struct EnvelopeProduct {
    pub first: [Well1DState; 3],
    pub second: [Well1DState; 3],
}

impl EnvelopeProduct {
    pub fn new(dot: &DotGeometry, material: &MaterialParams, a: Species, b: Species) -> Result<Self> {
        Ok(EnvelopeProduct {
            first: ground_functions(dot, material, a)?,
            second: ground_functions(dot, material, b)?,
        })
    }

    /// ∫ φ_a φ_b exp(ik·r) d³r about the dot centre.
    pub fn envelope_ft(&self, k: &Vector3<f64>) -> Complex64 {
        (0..3)
            .map(|axis| fourier_product(&self.first[axis], &self.second[axis], k[axis]))
            .product()
    }

    /// ∫ φ_a φ_b d³r.
    pub fn overlap(&self) -> f64 {
        (0..3).map(|axis| overlap(&self.first[axis], &self.second[axis])).product()
    }

    /// ∫ φ_a φ_b u² / ∫ φ_a φ_b along each axis, from the curvature of the
    /// transform at the origin.
    pub fn second_moments(&self) -> [f64; 3] {
        [0, 1, 2].map(|i| {
            let (a, b) = (&self.first[i], &self.second[i]);
            let h = 1e-3 / a.params.width_w;
            let at = |q: f64| fourier_product(a, b, q).re;
            let zero = at(0.0);
            -(at(h) + at(-h) - 2.0 * zero) / (h * h * zero)
        })
    }

    /// Widths of the two wells along each axis, whichever is larger.
    fn widths(&self) -> [f64; 3] {
        [0, 1, 2].map(|a| self.first[a].params.width_w.max(self.second[a].params.width_w))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntegralKind {
    Direct,
    Exchange,
    Forster,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spin {
    Singlet,
    Triplet,
}

impl Spin {
    pub fn sign(self) -> f64 {
        match self {
            Spin::Singlet => -1.0,
            Spin::Triplet => 1.0,
        }
    }
}

/// Integration controls shared by the reciprocal-space integrals.
#[derive(Clone, Copy, Debug)]
pub struct CoulombOptions {
    /// Relative tolerance, within [1e-6, 1e-2].
    pub tol: f64,
    /// Nonzero reciprocal lattice shells added to direct integrals.
    pub direct_shells: usize,
    /// Nonzero reciprocal lattice shells added to exchange integrals.
    pub exchange_shells: usize,
    /// Evaluation budget per integral.
    pub max_evals: usize,
}

impl Default for CoulombOptions {
    fn default() -> Self {
        CoulombOptions {
            tol: 1e-4,
            direct_shells: 0,
            exchange_shells: 1,
            max_evals: 20_000_000,
        }
    }
}

impl CoulombOptions {
    pub fn with_tol(tol: f64) -> Self {
        CoulombOptions {
            tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1e-6..=1e-2).contains(&self.tol) {
            return Err(Error::InvalidParameter {
                field: "tol",
                reason: format!("must lie in [1e-6, 1e-2], got {}", self.tol),
            });
        }
        Ok(())
    }
}

/// A quadrature result in meV.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
    pub converged: bool,
}

impl Quadrature {
    fn exact(value: f64) -> Self {
        Quadrature {
            value,
            error: 0.0,
            evals: 0,
            converged: true,
        }
    }

    fn scaled(self, factor: f64) -> Self {
        Quadrature {
            value: self.value * factor,
            error: self.error * factor.abs(),
            ..self
        }
    }

    fn plus(self, other: Quadrature) -> Self {
        Quadrature {
            value: self.value + other.value,
            error: self.error + other.error,
            evals: self.evals + other.evals,
            converged: self.converged && other.converged,
        }
    }

    /// The estimate, or a non-convergence error carrying it.
    pub fn require_converged(self, what: &'static str) -> Result<f64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::NonConvergence {
                what,
                value: self.value,
                error: self.error,
            })
        }
    }
}

/// One Coulomb matrix element in reciprocal space: two charge densities,
/// the bare kernel and, for two dots, the phase from their separation.
#[derive(Clone, Debug)]
pub struct KSpaceIntegrand {
    pub kind: IntegralKind,
    first: EnvelopeProduct,
    second: EnvelopeProduct,
    first_pair: BlochPair,
    second_pair: BlochPair,
    bloch: BlochModel,
    /// Centre of the second density relative to the first (nm).
    pub separation: Vector3<f64>,
    /// Nonzero reciprocal lattice shells included.
    pub shells: usize,
    eps_r: f64,
}

impl KSpaceIntegrand {
    /// |ψ_e|² against |ψ_h|² in one dot.
    pub fn direct(dot: &DotGeometry, material: &MaterialParams, shells: usize) -> Result<Self> {
        Ok(KSpaceIntegrand {
            kind: IntegralKind::Direct,
            first: EnvelopeProduct::new(dot, material, Species::Electron, Species::Electron)?,
            second: EnvelopeProduct::new(dot, material, Species::Hole, Species::Hole)?,
            first_pair: BlochPair::ElectronElectron,
            second_pair: BlochPair::HoleHole,
            bloch: BlochModel::from_material(material)?,
            separation: Vector3::zeros(),
            shells,
            eps_r: material.eps_r,
        })
    }

    /// ψ_e ψ_h against itself in one dot.
    pub fn exchange(dot: &DotGeometry, material: &MaterialParams, shells: usize) -> Result<Self> {
        let pair = EnvelopeProduct::new(dot, material, Species::Electron, Species::Hole)?;
        Ok(KSpaceIntegrand {
            kind: IntegralKind::Exchange,
            first: pair.clone(),
            second: pair,
            first_pair: BlochPair::ElectronHole,
            second_pair: BlochPair::ElectronHole,
            bloch: BlochModel::from_material(material)?,
            separation: Vector3::zeros(),
            shells,
            eps_r: material.eps_r,
        })
    }

    /// Transition density of dot I against that of dot II.
    pub fn forster(molecule: &MoleculeConfig) -> Result<Self> {
        molecule.validate()?;
        if molecule.field.norm() != 0.0 {
            return Err(Error::InvalidParameter {
                field: "field",
                reason: "the full Förster integral uses zero-field ground functions; \
                         use the dipole form for field-dependent couplings"
                    .into(),
            });
        }
        let m = &molecule.material;
        Ok(KSpaceIntegrand {
            kind: IntegralKind::Forster,
            first: EnvelopeProduct::new(&molecule.dot_i, m, Species::Electron, Species::Hole)?,
            second: EnvelopeProduct::new(&molecule.dot_ii, m, Species::Electron, Species::Hole)?,
            first_pair: BlochPair::ElectronHole,
            second_pair: BlochPair::ElectronHole,
            bloch: BlochModel::from_material(m)?,
            separation: molecule.separation,
            shells: 0,
            eps_r: m.eps_r,
        })
    }

    pub fn with_shells(mut self, shells: usize) -> Self {
        self.shells = shells;
        self
    }

    fn density_product(&self, k: &Vector3<f64>, kg: &Vector3<f64>) -> Complex64 {
        let envelope = self.first.envelope_ft(k) * self.second.envelope_ft(k).conj();
        let cell = self.bloch.bloch_ft(self.first_pair, kg) * self.bloch.bloch_ft(self.second_pair, kg).conj();
        envelope * cell * Complex64::from_polar(1.0, -kg.dot(&self.separation))
    }

    /// Real part of R1(K) conj(R2(K)) exp(-iK·R) without the kernel, G = 0.
    pub fn numerator(&self, k: &Vector3<f64>) -> f64 {
        self.density_product(k, k).re
    }

    /// Integrand of the G = 0 term including the 4π/K² kernel (nm²).
    pub fn eval(&self, k: &Vector3<f64>) -> f64 {
        let k2 = k.norm_squared();
        self.numerator(k) * 4.0 * PI / k2
    }

    fn prefactor(&self) -> f64 {
        COULOMB / self.eps_r / (8.0 * PI * PI * PI)
    }

    fn radial_scales(&self) -> Vector3<f64> {
        let a = self.first.widths();
        let b = self.second.widths();
        Vector3::from_fn(|i, _| 2.0 / a[i].max(b[i]))
    }

    /// Every factor is even in each component when R lies on an axis.
    fn octant_symmetric(&self) -> bool {
        self.separation.iter().filter(|c| **c != 0.0).count() <= 1
    }

    /// Smooth model of the Förster integrand near K = 0 that carries its
    /// whole long-range part, and the model's closed-form integral.
    fn far_field(&self) -> Option<(f64, f64, f64)> {
        if self.kind != IntegralKind::Forster {
            return None;
        }
        let strength = self.first.overlap() * self.second.overlap();
        let d = self.bloch.atomic_dipole();
        // match the Gaussian to the envelopes' second moments, isotropically
        let (a, b) = (self.first.second_moments(), self.second.second_moments());
        let sigma = ((0..3).map(|i| a[i] + b[i]).sum::<f64>() / 6.0).sqrt();
        let dipole = Vector3::new(0.0, 0.0, d);
        let value = strength * smeared_dipole_field(&dipole, &self.separation, sigma);
        Some((strength * d * d, sigma, value))
    }

    fn central_peak(&self, opts: &CoulombOptions) -> Quadrature {
        match self.far_field() {
            Some(model) => self.central_peak_subtracted(model, opts),
            None => self.central_peak_spherical(opts),
        }
    }

    /// Spherical coordinates about K = 0, with the radius mapped from [0, 1)
    /// per axis scale so that the 1/K² kernel cancels against the Jacobian.
    fn central_peak_spherical(&self, opts: &CoulombOptions) -> Quadrature {
        let scale = self.radial_scales();
        let jac = scale.x * scale.y * scale.z;
        let f = |p: &[f64]| -> f64 {
            let (t, theta, phi) = (p[0], p[1], p[2]);
            if t >= 1.0 {
                return 0.0;
            }
            let n = Vector3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos());
            let dn = n.component_mul(&scale);
            let k = dn * (t / (1.0 - t));
            self.numerator(&k) * 4.0 * PI * jac * theta.sin() / (dn.norm_squared() * (1.0 - t) * (1.0 - t))
        };
        let (hi, multiplicity) = if self.octant_symmetric() {
            ([1.0, 0.5 * PI, 0.5 * PI], 8.0)
        } else {
            ([1.0, PI, PI], 2.0)
        };
        let options = Options {
            rel_tol: opts.tol,
            abs_tol: 0.0,
            max_evals: opts.max_evals,
            batch: 16,
        };
        estimate(integrate(f, &[0.0; 3], &hi, &options)).scaled(self.prefactor() * multiplicity)
    }

    /// The far-field model is integrated in closed form; the remainder is
    /// regular at K = 0 and is integrated in Cartesian coordinates, where the
    /// separation phase oscillates along a single axis.
    fn central_peak_subtracted(&self, (strength, sigma, model): (f64, f64, f64), opts: &CoulombOptions) -> Quadrature {
        let scale = self.radial_scales();
        let signs = self.sign_set();
        let f = |p: &[f64]| -> f64 {
            let mut jac = 1.0;
            let k = Vector3::from_fn(|i, _| {
                let c = p[i].cos();
                jac *= scale[i] / (c * c);
                scale[i] * p[i].tan()
            });
            let k2 = k.norm_squared();
            if !k2.is_finite() || k2 == 0.0 {
                return 0.0;
            }
            let mut sum = 0.0;
            for s in &signs {
                let ks = k.component_mul(s);
                let smooth = strength * ks.z * ks.z * (-sigma * sigma * k2).exp() * ks.dot(&self.separation).cos();
                sum += self.numerator(&ks) - smooth;
            }
            sum * 4.0 * PI / k2 * jac
        };
        let multiplicity = 8.0 / signs.len() as f64;
        let pre = self.prefactor() * multiplicity;
        let analytic = model * COULOMB / self.eps_r;
        let options = Options {
            rel_tol: opts.tol,
            abs_tol: opts.tol * analytic.abs() / pre,
            max_evals: opts.max_evals,
            batch: 16,
        };
        let hi = [0.5 * PI; 3];
        estimate(integrate(f, &[0.0; 3], &hi, &options))
            .scaled(pre)
            .plus(Quadrature::exact(analytic))
    }

    /// Reflections of the positive octant needed to cover all of K-space.
    fn sign_set(&self) -> Vec<Vector3<f64>> {
        if self.octant_symmetric() {
            return vec![Vector3::new(1.0, 1.0, 1.0)];
        }
        (0..8)
            .map(|m| Vector3::from_fn(|i, _| if m >> i & 1 == 1 { -1.0 } else { 1.0 }))
            .collect()
    }

    /// Terms with K = k + G, G ≠ 0, for k in the first Brillouin zone.
    fn lattice_shells(&self, opts: &CoulombOptions) -> Quadrature {
        let shells = self.bloch.shells(self.shells);
        if shells.is_empty() {
            return Quadrature::exact(0.0);
        }
        let scale = self.radial_scales();
        let zone = PI / (2.0 * self.bloch.halfwidth_x);
        let hi: Vec<f64> = scale.iter().map(|s| (zone / s).atan()).collect();
        let signs = self.sign_set();
        let f = |p: &[f64]| -> f64 {
            let mut jac = 1.0;
            let k = Vector3::from_fn(|i, _| {
                let c = p[i].cos();
                jac *= scale[i] / (c * c);
                scale[i] * p[i].tan()
            });
            let mut sum = 0.0;
            for s in &signs {
                let ks = k.component_mul(s);
                let envelope = self.first.envelope_ft(&ks) * self.second.envelope_ft(&ks).conj();
                for g in &shells {
                    let kg = ks + g;
                    let cell = self.bloch.bloch_ft(self.first_pair, &kg)
                        * self.bloch.bloch_ft(self.second_pair, &kg).conj();
                    let phase = Complex64::from_polar(1.0, -kg.dot(&self.separation));
                    sum += (envelope * cell * phase).re * 4.0 * PI / kg.norm_squared();
                }
            }
            sum * jac
        };
        let options = Options {
            rel_tol: opts.tol,
            abs_tol: 0.0,
            max_evals: opts.max_evals,
            batch: 16,
        };
        let multiplicity = 8.0 / signs.len() as f64;
        estimate(integrate(f, &[0.0; 3], &hi, &options)).scaled(self.prefactor() * multiplicity)
    }
}

fn estimate(est: dotforge_cubature::Estimate) -> Quadrature {
    Quadrature {
        value: est.value,
        error: est.error,
        evals: est.evals,
        converged: est.converged,
    }
}

/// -(d·∇)² erf(R/2σ)/R: the field energy of two parallel point dipoles `d`
/// smeared by exp(-σ²K²), per unit charge product (nm^-1).
pub fn smeared_dipole_field(d: &Vector3<f64>, r: &Vector3<f64>, sigma: f64) -> f64 {
    let rn = r.norm();
    let u = rn / (2.0 * sigma);
    let erf = libm::erf(u);
    let gauss = (-u * u).exp() / (sigma * PI.sqrt());
    let g1 = gauss / rn - erf / (rn * rn);
    let g2 = 2.0 * erf / rn.powi(3) - gauss * (1.0 / (2.0 * sigma * sigma) + 2.0 / (rn * rn));
    let along = d.dot(r) / rn;
    -(g2 * along * along + g1 / rn * (d.norm_squared() - along * along))
}

/// Total integral in meV, with its error bound and convergence flag.
pub fn integrate_kspace(integrand: &KSpaceIntegrand, opts: &CoulombOptions) -> Result<Quadrature> {
    opts.validate()?;
    Ok(integrand.central_peak(opts).plus(integrand.lattice_shells(opts)))
}

/// Electron-hole direct Coulomb energy in one dot, as a positive magnitude.
pub fn direct_intra(dot: &DotGeometry, material: &MaterialParams, opts: &CoulombOptions) -> Result<Quadrature> {
    integrate_kspace(&KSpaceIntegrand::direct(dot, material, opts.direct_shells)?, opts)
}

/// Electron-hole exchange energy in one dot; positive for triplets.
pub fn exchange_intra(
    dot: &DotGeometry,
    material: &MaterialParams,
    spin: Spin,
    opts: &CoulombOptions,
) -> Result<Quadrature> {
    let q = integrate_kspace(&KSpaceIntegrand::exchange(dot, material, opts.exchange_shells)?, opts)?;
    Ok(q.scaled(spin.sign()))
}

/// Förster coupling between the ground excitons of the two dots.
pub fn forster_full(molecule: &MoleculeConfig, opts: &CoulombOptions) -> Result<Quadrature> {
    integrate_kspace(&KSpaceIntegrand::forster(molecule)?, opts)
}
