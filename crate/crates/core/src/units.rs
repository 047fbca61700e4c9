//! Fixed unit system: meV, nm, ps, kV/cm, e*nm.

/// Reduced Planck constant (meV*ps).
pub const HBAR: f64 = 0.658_211_956_9;

/// hbar^2 / (2 m0) (meV*nm^2).
pub const HBAR2_OVER_2M0: f64 = 38.0998;

/// e^2 / (4 pi eps0) (meV*nm).
pub const COULOMB: f64 = 1439.964;

/// Potential slope (meV/nm) felt by a unit charge in a 1 kV/cm field.
pub const SLOPE_PER_KV_CM: f64 = 0.1;

/// Planck constant h = 2 pi hbar (meV*ps).
pub const PLANCK: f64 = 2.0 * std::f64::consts::PI * HBAR;

/// e*Angstrom to e*nm.
pub fn convert_dipole(value_e_angstrom: f64) -> f64 {
    value_e_angstrom / 10.0
}

/// e*nm to e*Angstrom.
pub fn dipole_to_e_angstrom(value_e_nm: f64) -> f64 {
    value_e_nm * 10.0
}

/// Potential slope (meV/nm) for a unit charge in `field` kV/cm.
pub fn field_slope(field_kv_cm: f64) -> f64 {
    SLOPE_PER_KV_CM * field_kv_cm
}
