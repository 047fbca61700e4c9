//! Point-dipole forms of the interdot couplings: the Förster term from the
//! envelope overlaps and the atomic dipole, and the biexciton shift from the
//! field-induced exciton dipoles.

use std::f64::consts::PI;

use nalgebra::Vector3;

use crate::basis3d::{BasisOptions, ExcitonPair};
use crate::error::{require_positive, Error, Result};
use crate::geometry::MoleculeConfig;
use crate::units::{COULOMB, PLANCK};

/// Two point dipoles (e·nm) a vector `r` (nm) apart in a medium `eps_r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointDipolePair {
    pub d1: Vector3<f64>,
    pub d2: Vector3<f64>,
    pub r: Vector3<f64>,
    pub eps_r: f64,
}

impl PointDipolePair {
    pub fn new(d1: Vector3<f64>, d2: Vector3<f64>, r: Vector3<f64>, eps_r: f64) -> Result<Self> {
        require_positive("eps_r", eps_r)?;
        let n = r.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidParameter {
                field: "R",
                reason: "separation must be nonzero and finite".into(),
            });
        }
        Ok(PointDipolePair { d1, d2, r, eps_r })
    }
}

/// (C/ε R³)(d1·d2 − 3(d1·R̂)(d2·R̂)) in meV.
pub fn dipole_dipole(pair: &PointDipolePair) -> f64 {
    let r = pair.r.norm();
    let unit = pair.r / r;
    COULOMB / (pair.eps_r * r.powi(3)) * (pair.d1.dot(&pair.d2) - 3.0 * pair.d1.dot(&unit) * pair.d2.dot(&unit))
}

/// ⟨s| r |p_z⟩ for the Kronig-Penney cell of half-width x: 32x/(9π²) along z.
pub fn atomic_dipole(x: f64) -> Result<Vector3<f64>> {
    require_positive("x", x)?;
    Ok(Vector3::new(0.0, 0.0, 32.0 * x / (9.0 * PI * PI)))
}

fn check_overlap(field: &'static str, o: f64) -> Result<()> {
    if (0.0..=1.0).contains(&o) {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            field,
            reason: format!("overlap must lie in [0, 1], got {o}"),
        })
    }
}

/// Förster coupling O_I O_II × (dipole-dipole energy of two copies of
/// `moment`), for a measured transition dipole in place of the model one.
pub fn forster_from_moment(o_i: f64, o_ii: f64, moment: Vector3<f64>, r: Vector3<f64>, eps_r: f64) -> Result<f64> {
    check_overlap("O_I", o_i)?;
    check_overlap("O_II", o_ii)?;
    Ok(o_i * o_ii * dipole_dipole(&PointDipolePair::new(moment, moment, r, eps_r)?))
}

/// Förster coupling in the point-dipole limit (meV), signed.
pub fn forster_dipole(o_i: f64, o_ii: f64, x: f64, r: Vector3<f64>, eps_r: f64) -> Result<f64> {
    forster_from_moment(o_i, o_ii, atomic_dipole(x)?, r, eps_r)
}

/// Resonant transfer time h/V_F (ps) for a coupling magnitude in meV.
pub fn transfer_time(v_f: f64) -> Result<f64> {
    require_positive("V_F", v_f)?;
    Ok(PLANCK / v_f)
}

/// Biexciton shift from the two static exciton dipoles (meV).
pub fn vxx_dipole(p_i: Vector3<f64>, p_ii: Vector3<f64>, r: Vector3<f64>, eps_r: f64) -> Result<f64> {
    Ok(dipole_dipole(&PointDipolePair::new(p_i, p_ii, r, eps_r)?))
}

/// Overlaps, dipoles and point-dipole couplings of a dot pair in its field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MoleculeCouplings {
    pub o_i: f64,
    pub o_ii: f64,
    pub p_i: Vector3<f64>,
    pub p_ii: Vector3<f64>,
    pub v_f_dipole: f64,
    pub v_xx: f64,
}

pub fn molecule_couplings(molecule: &MoleculeConfig, options: BasisOptions) -> Result<MoleculeCouplings> {
    molecule.validate()?;
    let m = &molecule.material;
    let (first, second) = rayon::join(
        || ExcitonPair::solve(&molecule.dot_i, m, &molecule.field, options),
        || ExcitonPair::solve(&molecule.dot_ii, m, &molecule.field, options),
    );
    let (first, second) = (first?, second?);
    // rounding can push a near-unit overlap a hair past 1
    let o_i = first.overlap().clamp(0.0, 1.0);
    let o_ii = second.overlap().clamp(0.0, 1.0);
    let (p_i, p_ii) = (first.dipole(), second.dipole());
    Ok(MoleculeCouplings {
        o_i,
        o_ii,
        p_i,
        p_ii,
        v_f_dipole: forster_dipole(o_i, o_ii, m.kp_halfwidth_x, molecule.separation, m.eps_r)?,
        v_xx: vxx_dipole(p_i, p_ii, molecule.separation, m.eps_r)?,
    })
}
