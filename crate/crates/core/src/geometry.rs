//! Material parameters, dot shapes and the two-dot molecule.

use nalgebra::Vector3;

use crate::error::{require_positive, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Species {
    Electron,
    Hole,
}

impl Species {
    /// Charge in units of e.
    pub fn charge(self) -> f64 {
        match self {
            Species::Electron => -1.0,
            Species::Hole => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Species::Electron => "electron",
            Species::Hole => "hole",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaterialParams {
    /// Electron effective mass (units of m0).
    pub m_e_eff: f64,
    /// Hole effective mass (units of m0).
    pub m_h_eff: f64,
    /// Electron confinement depth (meV).
    pub v_e: f64,
    /// Hole confinement depth (meV).
    pub v_h: f64,
    pub eps_r: f64,
    /// Half-width x of the atomic well in the Kronig-Penney cell (nm).
    pub kp_halfwidth_x: f64,
}

impl Default for MaterialParams {
    fn default() -> Self {
        MaterialParams {
            m_e_eff: 0.06,
            m_h_eff: 0.6,
            v_e: 500.0,
            v_h: 500.0,
            eps_r: 10.0,
            kp_halfwidth_x: 0.5,
        }
    }
}

impl MaterialParams {
    pub fn with_depth(mut self, depth: f64) -> Self {
        self.v_e = depth;
        self.v_h = depth;
        self
    }

    pub fn mass(&self, species: Species) -> f64 {
        match species {
            Species::Electron => self.m_e_eff,
            Species::Hole => self.m_h_eff,
        }
    }

    pub fn depth(&self, species: Species) -> f64 {
        match species {
            Species::Electron => self.v_e,
            Species::Hole => self.v_h,
        }
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("m_e_eff", self.m_e_eff)?;
        require_positive("m_h_eff", self.m_h_eff)?;
        require_positive("V_e", self.v_e)?;
        require_positive("V_h", self.v_h)?;
        require_positive("eps_r", self.eps_r)?;
        require_positive("kp_halfwidth_x", self.kp_halfwidth_x)
    }
}

/// Cuboid dot with a square base of side `2 * base_half` and height along z.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DotGeometry {
    pub base_half: f64,
    pub height: f64,
    pub center: Vector3<f64>,
}

impl DotGeometry {
    pub fn new(base_half: f64, height: f64) -> Self {
        DotGeometry {
            base_half,
            height,
            center: Vector3::zeros(),
        }
    }

    /// Cube: height equals the base side.
    pub fn cube(base_half: f64) -> Self {
        Self::new(base_half, 2.0 * base_half)
    }

    /// Well widths along x, y, z.
    pub fn widths(&self) -> [f64; 3] {
        [2.0 * self.base_half, 2.0 * self.base_half, self.height]
    }

    pub fn at(mut self, center: Vector3<f64>) -> Self {
        self.center = center;
        self
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("base_half", self.base_half)?;
        require_positive("height", self.height)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MoleculeConfig {
    pub dot_i: DotGeometry,
    pub dot_ii: DotGeometry,
    /// Centre-to-centre vector from dot I to dot II (nm).
    pub separation: Vector3<f64>,
    pub material: MaterialParams,
    /// Applied field (kV/cm), same in both dots.
    pub field: Vector3<f64>,
}

impl MoleculeConfig {
    /// Dots stacked along z at distance `r`, no field.
    pub fn stacked(dot_i: DotGeometry, dot_ii: DotGeometry, r: f64, material: MaterialParams) -> Self {
        MoleculeConfig {
            dot_i,
            dot_ii,
            separation: Vector3::new(0.0, 0.0, r),
            material,
            field: Vector3::zeros(),
        }
    }

    pub fn with_field(mut self, field: Vector3<f64>) -> Self {
        self.field = field;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.dot_i.validate()?;
        self.dot_ii.validate()?;
        self.material.validate()?;
        let r = self.separation.norm();
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidParameter {
                field: "R",
                reason: "separation must be nonzero".into(),
            });
        }
        let lateral = self.dot_i.base_half + self.dot_ii.base_half;
        let vertical = 0.5 * (self.dot_i.height + self.dot_ii.height);
        let s = self.separation;
        if s.x.abs() < lateral && s.y.abs() < lateral && s.z.abs() < vertical {
            return Err(Error::InvalidParameter {
                field: "R",
                reason: format!("dots overlap: separation {:?} nm is inside the joint box", (s.x, s.y, s.z)),
            });
        }
        if !self.field.iter().all(|f| f.is_finite()) {
            return Err(Error::InvalidParameter {
                field: "field",
                reason: "must be finite".into(),
            });
        }
        Ok(())
    }
}
