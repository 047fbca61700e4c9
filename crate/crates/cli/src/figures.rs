//! Data behind each figure, as tables in a fixed sweep order.

use dotforge::basis3d::{ground_energy_sweep, DotFamily, ExcitonPair};
use dotforge::coulombk::{direct_intra, exchange_intra, forster_full, EnvelopeProduct, Quadrature, Spin};
use dotforge::dipole::{forster_dipole, molecule_couplings};
use dotforge::qubits::{delta0_from_molecule, TwoQubitSystem};
use dotforge::{DotGeometry, MaterialParams, MoleculeConfig, Species};
use nalgebra::Vector3;
use rayon::prelude::*;

use crate::config::Config;
use crate::error::CliError;
use crate::output::{Cell, Table};

pub const NAMES: [&str; 10] = [
    "fig5", "fig8", "fig10", "fig12", "fig13", "fig14", "fig15", "fig16", "fig17", "fig18",
];

pub fn build(name: &str, cfg: &Config) -> Result<Table, CliError> {
    match name {
        "fig5" => single_particle(cfg),
        "fig8" => intra(cfg, Term::Direct),
        "fig10" => intra(cfg, Term::Exchange),
        "fig12" => forster_vs_separation(cfg),
        "fig13" => overlap_vs_field_sizes(cfg),
        "fig14" => forster_vs_aspect(cfg),
        "fig15" => overlap_vs_field_depths(cfg),
        "fig16" => biexciton_vs_field(cfg),
        "fig17" => splitting_vs_ratio(cfg),
        "fig18" => mixing_vs_ratio(cfg),
        other => Err(CliError::Config(format!(
            "unknown figure `{other}`; available: {}",
            NAMES.join(", ")
        ))),
    }
}

fn families(cfg: &Config) -> Result<Vec<DotFamily>, CliError> {
    match cfg.sweep_text("family") {
        None | Some("both") => Ok(vec![DotFamily::Cube, DotFamily::FlatCuboid]),
        Some("cube") => Ok(vec![DotFamily::Cube]),
        Some("cuboid") => Ok(vec![DotFamily::FlatCuboid]),
        Some(other) => Err(CliError::Config(format!(
            "[sweep] family = `{other}`; expected cube, cuboid or both"
        ))),
    }
}

fn default_sizes(family: DotFamily) -> &'static [f64] {
    match family {
        DotFamily::Cube => &[2.0, 3.0, 4.0, 6.0, 8.0, 10.0, 15.0, 20.0],
        DotFamily::FlatCuboid => &[4.0, 6.0, 8.0, 10.0, 15.0, 20.0],
    }
}

fn sizes(cfg: &Config, family: DotFamily) -> Result<Vec<f64>, CliError> {
    cfg.sweep("sizes", default_sizes(family))
}

fn basal(field: f64) -> Vector3<f64> {
    Vector3::new(field, 0.0, 0.0)
}

/// Runs jobs on the pool and keeps their order.
fn par_rows<J, F>(jobs: &[J], f: F) -> Result<Vec<Vec<Cell>>, CliError>
where
    J: Sync,
    F: Fn(&J) -> Result<Vec<Cell>, CliError> + Sync + Send,
{
    jobs.par_iter().map(f).collect()
}

fn fig5_species() -> [Species; 2] {
    [Species::Electron, Species::Hole]
}

fn single_particle(cfg: &Config) -> Result<Table, CliError> {
    let material = cfg.material()?;
    let basis = cfg.basis()?;
    let depths = cfg.sweep("depths", &[200.0, 500.0, 1000.0])?;
    let mut table = Table::new(&["family", "species", "mass", "V_meV", "a_nm", "energy_meV", "dominant_amplitude"]);
    for family in families(cfg)? {
        let sizes = sizes(cfg, family)?;
        for species in fig5_species() {
            for row in ground_energy_sweep(family, species, &material, &sizes, &depths, basis)? {
                table.push(vec![
                    family.name().into(),
                    species.name().into(),
                    material.mass(species).into(),
                    row.depth.into(),
                    row.base_half.into(),
                    row.energy.into(),
                    row.dominant_amplitude.into(),
                ]);
            }
        }
    }
    Ok(table)
}

#[derive(Clone, Copy)]
enum Term {
    Direct,
    Exchange,
}

fn flag_rows(table: &mut Table, converged: &[bool]) {
    table.flagged = converged.iter().enumerate().filter(|(_, c)| !**c).map(|(i, _)| i).collect();
}

fn intra(cfg: &Config, term: Term) -> Result<Table, CliError> {
    let material = cfg.material()?;
    let opts = cfg.coulomb()?;
    let depths = cfg.sweep("depths", &[200.0, 500.0, 1000.0])?;
    let mut jobs = Vec::new();
    for family in families(cfg)? {
        for &v in &depths {
            for a in sizes(cfg, family)? {
                jobs.push((family, v, a));
            }
        }
    }
    let results: Vec<Quadrature> = jobs
        .par_iter()
        .map(|&(family, v, a)| {
            let m = material.with_depth(v);
            match term {
                Term::Direct => direct_intra(&family.dot(a), &m, &opts),
                Term::Exchange => exchange_intra(&family.dot(a), &m, Spin::Triplet, &opts),
            }
        })
        .collect::<Result<_, _>>()?;
    let value = match term {
        Term::Direct => "J_meV",
        Term::Exchange => "K_meV",
    };
    let mut table = Table::new(&["family", "V_meV", "a_nm", value, "error_meV"]);
    for (&(family, v, a), q) in jobs.iter().zip(&results) {
        table.push(vec![family.name().into(), v.into(), a.into(), q.value.into(), q.error.into()]);
    }
    flag_rows(&mut table, &results.iter().map(|q| q.converged).collect::<Vec<_>>());
    Ok(table)
}

/// Full and point-dipole V_F of identical dots, both with ground-basis overlaps.
fn forster_pair(mol: &MoleculeConfig, cfg: &Config) -> Result<(Quadrature, f64, f64), CliError> {
    let m = &mol.material;
    let o = EnvelopeProduct::new(&mol.dot_i, m, Species::Electron, Species::Hole)?.overlap();
    let full = forster_full(mol, &cfg.coulomb()?)?;
    let dip = forster_dipole(o, o, m.kp_halfwidth_x, mol.separation, m.eps_r)?;
    Ok((full, dip, o))
}

fn forster_vs_separation(cfg: &Config) -> Result<Table, CliError> {
    let material = cfg.material()?;
    let separations = cfg.sweep("separations", &[4.0, 6.0, 8.0, 10.0, 15.0, 20.0, 30.0, 40.0])?;
    let depths = cfg.sweep("depths", &[500.0, 2000.0])?;
    let size = cfg.sweep("sizes", &[2.0])?;
    let mut jobs = Vec::new();
    for family in families(cfg)? {
        for &a in &size {
            for &v in &depths {
                for &r in &separations {
                    jobs.push((family, a, v, r));
                }
            }
        }
    }
    let results: Vec<(Quadrature, f64)> = jobs
        .par_iter()
        .map(|&(family, a, v, r)| {
            let dot = family.dot(a);
            let mol = MoleculeConfig::stacked(dot, dot, r, material.with_depth(v));
            forster_pair(&mol, cfg).map(|(q, d, _)| (q, d))
        })
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(&["R_nm", "shape", "V_meV", "VF_full_meV", "VF_dipole_meV"]);
    for (&(family, _, v, r), (q, d)) in jobs.iter().zip(&results) {
        table.push(vec![r.into(), family.name().into(), v.into(), q.value.into(), (*d).into()]);
    }
    flag_rows(&mut table, &results.iter().map(|(q, _)| q.converged).collect::<Vec<_>>());
    Ok(table)
}

fn default_fields() -> Vec<f64> {
    (0..=6).map(|i| 25.0 * i as f64).collect()
}

fn overlap_rows(cfg: &Config, jobs: Vec<(DotFamily, f64, f64, f64)>) -> Result<Vec<Vec<Cell>>, CliError> {
    let material = cfg.material()?;
    let basis = cfg.basis()?;
    par_rows(&jobs, |&(family, a, v, f)| {
        let pair = ExcitonPair::solve(&family.dot(a), &material.with_depth(v), &basal(f), basis)?;
        Ok(vec![
            family.name().into(),
            a.into(),
            v.into(),
            f.into(),
            pair.overlap().clamp(0.0, 1.0).into(),
        ])
    })
}

const OVERLAP_COLUMNS: [&str; 5] = ["family", "a_nm", "V_meV", "field_kV_cm", "O"];

fn overlap_vs_field_sizes(cfg: &Config) -> Result<Table, CliError> {
    let fields = cfg.sweep("fields", &default_fields())?;
    let v = cfg.material()?.v_e;
    let mut jobs = Vec::new();
    for family in families(cfg)? {
        let defaults: &[f64] = match family {
            DotFamily::Cube => &[2.0, 4.0, 6.0, 10.0],
            DotFamily::FlatCuboid => &[5.0, 10.0, 15.0, 20.0],
        };
        for a in cfg.sweep("sizes", defaults)? {
            for &f in &fields {
                jobs.push((family, a, v, f));
            }
        }
    }
    let mut table = Table::new(&OVERLAP_COLUMNS);
    table.rows = overlap_rows(cfg, jobs)?;
    Ok(table)
}

fn overlap_vs_field_depths(cfg: &Config) -> Result<Table, CliError> {
    let fields = cfg.sweep("fields", &default_fields())?;
    let depths = cfg.sweep("depths", &[200.0, 500.0, 1000.0, 2000.0])?;
    let mut jobs = Vec::new();
    for family in families(cfg)? {
        for a in cfg.sweep("sizes", &[10.0])? {
            for &v in &depths {
                for &f in &fields {
                    jobs.push((family, a, v, f));
                }
            }
        }
    }
    let mut table = Table::new(&OVERLAP_COLUMNS);
    table.rows = overlap_rows(cfg, jobs)?;
    Ok(table)
}

fn forster_vs_aspect(cfg: &Config) -> Result<Table, CliError> {
    let material = cfg.material()?;
    let aspects = cfg.sweep("aspects", &[1.0, 2.0, 5.0, 10.0])?;
    let separations = cfg.sweep("separations", &[4.0, 6.0, 8.0, 10.0, 15.0, 20.0])?;
    let size = cfg.sweep("sizes", &[2.0])?;
    let mut jobs = Vec::new();
    for &aspect in &aspects {
        for &a in &size {
            for &r in &separations {
                jobs.push((aspect, a, r));
            }
        }
    }
    let results: Vec<(Quadrature, f64, f64, f64)> = jobs
        .par_iter()
        .map(|&(aspect, a, r)| {
            // aspect = base side / height
            let dot = DotGeometry::new(a, 2.0 * a / aspect);
            let mol = MoleculeConfig::stacked(dot, dot, r, material);
            let (q, d, o) = forster_pair(&mol, cfg)?;
            let max = forster_dipole(1.0, 1.0, material.kp_halfwidth_x, mol.separation, material.eps_r)?;
            Ok((q, d, o, max))
        })
        .collect::<Result<_, CliError>>()?;
    let mut table = Table::new(&[
        "aspect", "a_nm", "h_nm", "R_nm", "V_meV", "O", "VF_full_meV", "VF_dipole_meV", "VF_max_meV",
    ]);
    for (&(aspect, a, r), &(q, d, o, max)) in jobs.iter().zip(&results) {
        table.push(vec![
            aspect.into(),
            a.into(),
            (2.0 * a / aspect).into(),
            r.into(),
            material.v_e.into(),
            o.into(),
            q.value.into(),
            d.into(),
            max.into(),
        ]);
    }
    flag_rows(&mut table, &results.iter().map(|r| r.0.converged).collect::<Vec<_>>());
    Ok(table)
}

fn biexciton_vs_field(cfg: &Config) -> Result<Table, CliError> {
    let base = cfg.molecule()?;
    let basis = cfg.basis()?;
    let fields = cfg.sweep("fields", &(0..=30).map(|i| 5.0 * i as f64).collect::<Vec<_>>())?;
    // the configured pair, or identical pairs of one family when sizes are given
    let mut curves: Vec<(String, DotGeometry, DotGeometry)> = Vec::new();
    if cfg.sweep_text("sizes").is_some() {
        for family in families(cfg)? {
            for a in sizes(cfg, family)? {
                curves.push((family.name().into(), family.dot(a), family.dot(a)));
            }
        }
    } else {
        curves.push(("config".into(), base.dot_i, base.dot_ii));
    }
    let mut jobs = Vec::new();
    for (i, _) in curves.iter().enumerate() {
        for &f in &fields {
            jobs.push((i, f));
        }
    }
    let mut table = Table::new(&[
        "curve", "a_nm", "h1_nm", "b_nm", "h2_nm", "R_nm", "field_kV_cm", "p_I_enm", "p_II_enm", "V_XX_meV",
    ]);
    table.rows = par_rows(&jobs, |&(i, f)| {
        let (name, d1, d2) = &curves[i];
        let mol = MoleculeConfig { dot_i: *d1, dot_ii: *d2, ..base }.with_field(basal(f));
        let c = molecule_couplings(&mol, basis)?;
        Ok(vec![
            name.as_str().into(),
            d1.base_half.into(),
            d1.height.into(),
            d2.base_half.into(),
            d2.height.into(),
            mol.separation.norm().into(),
            f.into(),
            c.p_i.x.into(),
            c.p_ii.x.into(),
            c.v_xx.into(),
        ])
    })?;
    Ok(table)
}

fn default_b(family: DotFamily) -> &'static [f64] {
    match family {
        DotFamily::Cube => &[2.0, 3.0],
        DotFamily::FlatCuboid => &[5.0, 10.0],
    }
}

fn ratio_jobs(cfg: &Config) -> Result<Vec<(DotFamily, f64, f64)>, CliError> {
    let ratios = cfg.sweep("ratios", &[1.0, 1.25, 1.5, 1.75, 2.0])?;
    let mut jobs = Vec::new();
    for family in families(cfg)? {
        for b in cfg.sweep("b_values", default_b(family))? {
            for &ratio in &ratios {
                jobs.push((family, b, ratio));
            }
        }
    }
    Ok(jobs)
}

/// Dot I of size ratio·b stacked on dot II of size b with a barrier `gap`
/// between facing surfaces.
fn ratio_pair(family: DotFamily, b: f64, ratio: f64, gap: f64, material: MaterialParams) -> MoleculeConfig {
    let (big, small) = (family.dot(ratio * b), family.dot(b));
    MoleculeConfig::stacked(big, small, 0.5 * (big.height + small.height) + gap, material)
}

fn gaps(cfg: &Config) -> Result<Vec<f64>, CliError> {
    let gaps = cfg.sweep("gaps", &[3.0])?;
    if gaps.iter().any(|&g| g < 0.0) {
        return Err(CliError::Config("[sweep] gaps must be non-negative".into()));
    }
    Ok(gaps)
}

fn splitting_vs_ratio(cfg: &Config) -> Result<Table, CliError> {
    let material = cfg.material()?;
    let basis = cfg.basis()?;
    let opts = cfg.coulomb()?;
    // the splitting holds no inter-dot term, so the gap only keeps the pair valid
    let gap = gaps(cfg)?[0];
    let jobs = ratio_jobs(cfg)?;
    let mut table = Table::new(&["family", "b_nm", "ratio", "a_nm", "Delta0_bare_meV", "Delta0_coulomb_meV"]);
    table.rows = par_rows(&jobs, |&(family, b, ratio)| {
        let mol = ratio_pair(family, b, ratio, gap, material);
        let bare = delta0_from_molecule(&mol, false, basis, &opts)?;
        let dressed = delta0_from_molecule(&mol, true, basis, &opts)?;
        Ok(vec![
            family.name().into(),
            b.into(),
            ratio.into(),
            (ratio * b).into(),
            bare.into(),
            dressed.into(),
        ])
    })?;
    Ok(table)
}

fn mixing_vs_ratio(cfg: &Config) -> Result<Table, CliError> {
    let material = cfg.material()?;
    let basis = cfg.basis()?;
    let opts = cfg.coulomb()?;
    let x = material.kp_halfwidth_x;
    let gaps = gaps(cfg)?;
    let jobs: Vec<_> = ratio_jobs(cfg)?
        .into_iter()
        .flat_map(|job| gaps.iter().map(move |&g| (job, g)))
        .collect();
    let mut table = Table::new(&[
        "family", "b_nm", "ratio", "a_nm", "R_nm", "Delta0_meV", "O_I", "O_II", "VF_dipole_meV", "c1", "c1_scaled",
    ]);
    table.rows = par_rows(&jobs, |&((family, b, ratio), gap)| {
        let mol = ratio_pair(family, b, ratio, gap, material);
        let r = mol.separation.z;
        let d0 = delta0_from_molecule(&mol, true, basis, &opts)?;
        let c = molecule_couplings(&mol, basis)?;
        let c1 = TwoQubitSystem::new(d0, 0.0, c.v_f_dipole, 0.0).eigensystem().c1;
        Ok(vec![
            family.name().into(),
            b.into(),
            ratio.into(),
            (ratio * b).into(),
            r.into(),
            d0.into(),
            c.o_i.into(),
            c.o_ii.into(),
            c.v_f_dipole.into(),
            c1.into(),
            (c1 * r.powi(3) / (x * x * c.o_i * c.o_ii)).into(),
        ])
    })?;
    Ok(table)
}
