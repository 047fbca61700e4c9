//! Two exciton qubits: the four-level Hamiltonian over {|00⟩, |01⟩, |10⟩, |11⟩},
//! its closed-form eigensystem and the quantities used for gate design.

use std::f64::consts::PI;

use nalgebra::{Matrix4, Vector3};

use crate::basis3d::{build_basis, BasisOptions};
use crate::coulombk::{direct_intra, exchange_intra, CoulombOptions, Spin};
use crate::error::Result;
use crate::geometry::{DotGeometry, MaterialParams, MoleculeConfig, Species};
use crate::units::COULOMB;

/// Reference value of R³ c1 Δ₀ / (x² O_I O_II) for ε_r = 10 (meV).
pub const C1_SCALING: f64 = 37.1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoQubitSystem {
    /// Ground energy (meV); a global offset.
    pub omega0: f64,
    /// Exciton creation energy on dot I (meV).
    pub omega1: f64,
    /// Exciton creation energy on dot II (meV).
    pub omega2: f64,
    pub v_f: f64,
    pub v_xx: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Eigensystem {
    pub e00: f64,
    pub e01: f64,
    pub e10: f64,
    pub e11: f64,
    /// √(1 + 4(V_F/Δ₀)²); infinite for Δ₀ = 0 with V_F ≠ 0.
    pub a: f64,
    pub c1: f64,
    pub c2: f64,
    /// Eigenvectors in basis order, columns Ψ00, Ψ01, Ψ10, Ψ11.
    pub vectors: Matrix4<f64>,
}

impl Eigensystem {
    pub fn energies(&self) -> [f64; 4] {
        [self.e00, self.e01, self.e10, self.e11]
    }
}

impl TwoQubitSystem {
    pub fn new(omega1: f64, omega2: f64, v_f: f64, v_xx: f64) -> Self {
        TwoQubitSystem {
            omega0: 0.0,
            omega1,
            omega2,
            v_f,
            v_xx,
        }
    }

    pub fn delta0(&self) -> f64 {
        self.omega1 - self.omega2
    }

    pub fn hamiltonian4(&self) -> Matrix4<f64> {
        let w0 = self.omega0;
        let mut h = Matrix4::zeros();
        h[(0, 0)] = w0;
        h[(1, 1)] = w0 + self.omega2;
        h[(2, 2)] = w0 + self.omega1;
        h[(3, 3)] = w0 + self.omega1 + self.omega2 + self.v_xx;
        h[(1, 2)] = self.v_f;
        h[(2, 1)] = self.v_f;
        h
    }

    /// Closed-form eigensystem. Ψ01 and Ψ10 are the states continuously
    /// connected to |01⟩ and |10⟩:
    /// Ψ01 = c2|01⟩ − s c1|10⟩, Ψ10 = c2|10⟩ + s c1|01⟩ with s = sign(V_F Δ₀).
    /// At Δ₀ = 0 the limit taken along sign(Δ₀) = sign(V_F) is used, which
    /// gives E01 = ω₀ + ω₁ − V_F.
    pub fn eigensystem(&self) -> Eigensystem {
        let d = self.delta0();
        let v = self.v_f;
        let r = d.hypot(2.0 * v);
        let branch = if d != 0.0 {
            d.signum()
        } else if v != 0.0 {
            v.signum()
        } else {
            1.0
        };
        let mean = self.omega0 + 0.5 * (self.omega1 + self.omega2);
        let (c1, c2) = if r == 0.0 {
            (0.0, 1.0)
        } else {
            // (A−1)/2A written without cancellation
            ((2.0 * v * v / (r * (r + d.abs()))).sqrt(), ((r + d.abs()) / (2.0 * r)).sqrt())
        };
        let a = if d != 0.0 {
            r / d.abs()
        } else if v != 0.0 {
            f64::INFINITY
        } else {
            1.0
        };
        let s = if v == 0.0 { 1.0 } else { (v * branch).signum() };
        let mut vectors = Matrix4::zeros();
        vectors[(0, 0)] = 1.0;
        vectors[(1, 1)] = c2;
        vectors[(2, 1)] = -s * c1;
        vectors[(1, 2)] = s * c1;
        vectors[(2, 2)] = c2;
        vectors[(3, 3)] = 1.0;
        Eigensystem {
            e00: self.omega0,
            e01: mean - 0.5 * branch * r,
            e10: mean + 0.5 * branch * r,
            e11: self.omega0 + self.omega1 + self.omega2 + self.v_xx,
            a,
            c1,
            c2,
            vectors,
        }
    }

    /// Second-order shift V_F²/Δ₀; undefined at Δ₀ = 0.
    pub fn delta(&self) -> Option<f64> {
        let d = self.delta0();
        (d != 0.0).then(|| self.v_f * self.v_f / d)
    }

    /// Pulse energy for |10⟩ → |11⟩ to first order in V_F/Δ₀.
    pub fn eps12(&self) -> Option<f64> {
        self.delta().map(|delta| self.omega2 + self.v_xx - delta)
    }

    /// Pulse energy for |01⟩ → |11⟩ to first order in V_F/Δ₀.
    pub fn eps21(&self) -> Option<f64> {
        self.delta().map(|delta| self.omega1 + self.v_xx + delta)
    }

    /// Exact E11 − E10 and E11 − E01.
    pub fn exact_transitions(&self) -> (f64, f64) {
        let e = self.eigensystem();
        (e.e11 - e.e10, e.e11 - e.e01)
    }

    /// 1 − c1².
    pub fn gate_fidelity(&self) -> f64 {
        let c1 = self.eigensystem().c1;
        1.0 - c1 * c1
    }
}

/// 2C/ε_r (32/9π²)²: the scaling constant from the point-dipole Förster form
/// for stacked dots (meV).
pub fn scaling_constant(eps_r: f64) -> f64 {
    let k = 32.0 / (9.0 * PI * PI);
    2.0 * COULOMB / eps_r * k * k
}

/// c1 ≈ 37.1 x² O_I O_II / (R³ Δ₀), valid for V_F ≪ Δ₀ (x, R in nm, Δ₀ in meV).
pub fn c1_scaling(delta0: f64, x: f64, r: f64, o_i: f64, o_ii: f64) -> f64 {
    C1_SCALING * x * x * o_i * o_ii / (r.powi(3) * delta0)
}

/// Entanglement scheme suited to a mixing coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// Förster-driven exchange of the exciton (strong mixing).
    ForsterSwitching,
    /// Energy-selective pulses using the biexciton shift (weak mixing); the
    /// Hadamard-then-wait variant needs the same regime.
    EnergySelective,
    /// Neither regime is clean.
    Mixed,
}

impl Scheme {
    pub fn from_c1(c1: f64) -> Self {
        if c1 > 0.5 {
            Scheme::ForsterSwitching
        } else if c1 < 0.1 {
            Scheme::EnergySelective
        } else {
            Scheme::Mixed
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::ForsterSwitching => "1",
            Scheme::EnergySelective => "2",
            Scheme::Mixed => "mixed",
        }
    }
}

/// Exciton creation energy of one dot, band gap excluded.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExcitonEnergy {
    pub electron: f64,
    pub hole: f64,
    /// Direct electron-hole binding, positive.
    pub direct: f64,
    /// Singlet exchange, negative.
    pub exchange: f64,
}

impl ExcitonEnergy {
    pub fn single_particle(&self) -> f64 {
        self.electron + self.hole
    }

    pub fn total(&self) -> f64 {
        self.electron + self.hole - self.direct + self.exchange
    }
}

/// Confinement energies in `field`; Coulomb terms from the zero-field ground
/// functions when requested.
pub fn exciton_energy(
    dot: &DotGeometry,
    material: &MaterialParams,
    field: &Vector3<f64>,
    include_coulomb: bool,
    basis: BasisOptions,
    coulomb: &CoulombOptions,
) -> Result<ExcitonEnergy> {
    let electron = build_basis(dot, material, Species::Electron, basis)?.ground_state(field)?.energy;
    let hole = build_basis(dot, material, Species::Hole, basis)?.ground_state(field)?.energy;
    let (direct, exchange) = if include_coulomb {
        let j = direct_intra(dot, material, coulomb)?.require_converged("direct Coulomb")?;
        let k = exchange_intra(dot, material, Spin::Singlet, coulomb)?.require_converged("exchange")?;
        (j, k)
    } else {
        (0.0, 0.0)
    };
    Ok(ExcitonEnergy {
        electron,
        hole,
        direct,
        exchange,
    })
}

/// Δ₀ = ω₁ − ω₂ for the molecule's dots.
pub fn delta0_from_molecule(
    molecule: &MoleculeConfig,
    include_coulomb: bool,
    basis: BasisOptions,
    coulomb: &CoulombOptions,
) -> Result<f64> {
    molecule.validate()?;
    let energy = |dot: &DotGeometry| {
        exciton_energy(dot, &molecule.material, &molecule.field, include_coulomb, basis, coulomb).map(|e| e.total())
    };
    let (first, second) = rayon::join(|| energy(&molecule.dot_i), || energy(&molecule.dot_ii));
    Ok(first? - second?)
}
