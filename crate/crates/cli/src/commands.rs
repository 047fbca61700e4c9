use std::f64::consts::PI;

use dotforge::coulombk::forster_full;
use dotforge::dipole::{molecule_couplings, transfer_time};
use dotforge::dynamics::{self, Trajectory};
use dotforge::qubits::{exciton_energy, Scheme, TwoQubitSystem};
use dotforge::units::HBAR;
use dotforge::wells1d::{solve_bound, solve_unbound};
use serde_json::{json, Value};

use crate::config::Config;
use crate::error::CliError;
use crate::output::{fmt_sig, Cell, Table};

pub fn wells(cfg: &Config) -> Result<Table, CliError> {
    let (params, n_unbound) = cfg.well()?;
    let mut table = Table::new(&["n", "parity", "kind", "energy_meV"]);
    let bound = solve_bound(&params)?;
    let unbound = if n_unbound > 0 { solve_unbound(&params, n_unbound)? } else { Vec::new() };
    for (n, s) in bound.iter().chain(&unbound).enumerate() {
        table.push(vec![(n + 1).into(), s.parity.name().into(), s.kind.name().into(), s.energy.into()]);
    }
    Ok(table)
}

/// Rounds through the 9-digit text form so JSON matches the CSV output.
fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(fmt_sig(v).parse::<f64>().unwrap())
    } else {
        Value::Null
    }
}

fn opt(v: Option<f64>) -> Value {
    v.map_or(Value::Null, num)
}

pub struct DesignReport {
    pub json: Value,
    pub converged: bool,
}

pub fn design(cfg: &Config, full: bool) -> Result<DesignReport, CliError> {
    let mol = cfg.molecule()?;
    let basis = cfg.basis()?;
    let coulomb = cfg.coulomb()?;
    let with_coulomb = cfg.bool("design", "coulomb")?;
    let full = full || cfg.bool("design", "full_forster")?;
    let m = &mol.material;
    let couplings = molecule_couplings(&mol, basis)?;
    let (e1, e2) = rayon::join(
        || exciton_energy(&mol.dot_i, m, &mol.field, with_coulomb, basis, &coulomb),
        || exciton_energy(&mol.dot_ii, m, &mol.field, with_coulomb, basis, &coulomb),
    );
    let (e1, e2) = (e1?, e2?);
    let mut notes = Vec::new();
    let mut converged = true;
    let v_f_full = if full {
        if mol.field.norm() > 0.0 {
            notes.push("V_F_full skipped: the k-space Förster integral uses zero-field envelopes".to_string());
            None
        } else {
            let q = forster_full(&mol, &coulomb)?;
            if !q.converged {
                converged = false;
                notes.push(format!("V_F_full did not converge (error bound {})", fmt_sig(q.error)));
            }
            Some(q.value)
        }
    } else {
        None
    };
    let v_f = v_f_full.unwrap_or(couplings.v_f_dipole);
    let system = TwoQubitSystem::new(e1.total(), e2.total(), v_f, couplings.v_xx);
    let eig = system.eigensystem();
    let scheme = Scheme::from_c1(eig.c1);
    // a selective pulse stays well inside the biexciton shift
    let omega_rec = couplings.v_xx.abs() / 20.0;
    let (gate_time, omega_value) = match scheme {
        Scheme::ForsterSwitching => (Some(dynamics::quarter_period(v_f)), None),
        _ if omega_rec > 0.0 => (Some(PI * HBAR / omega_rec), Some(omega_rec)),
        _ => (None, None),
    };
    let (t12, t21) = system.exact_transitions();
    let json = json!({
        "O_I": num(couplings.o_i),
        "O_II": num(couplings.o_ii),
        "V_F_dipole": num(couplings.v_f_dipole),
        "V_F_full": opt(v_f_full),
        "V_XX": num(couplings.v_xx),
        "omega1": num(system.omega1),
        "omega2": num(system.omega2),
        "Delta0": num(system.delta0()),
        "c1": num(eig.c1),
        "c2": num(eig.c2),
        "fidelity": num(system.gate_fidelity()),
        "delta": opt(system.delta()),
        "eps12": opt(system.eps12()),
        "eps21": opt(system.eps21()),
        "eps12_exact": num(t12),
        "eps21_exact": num(t21),
        "transfer_time": opt(transfer_time(v_f.abs()).ok()),
        "Omega_recommended": opt(omega_value),
        "gate_time_estimate": opt(gate_time),
        "scheme": scheme.name(),
        "compatible_schemes": match scheme {
            Scheme::ForsterSwitching => json!([1]),
            Scheme::EnergySelective => json!([2, 3]),
            Scheme::Mixed => json!([]),
        },
        "mixed_regime": scheme == Scheme::Mixed,
        "coulomb_in_delta0": with_coulomb,
        "units": {
            "energy": "meV",
            "time": "ps",
            "dipole": "e nm",
        },
        "notes": notes,
    });
    Ok(DesignReport { json, converged })
}

pub enum DynamicsOutput {
    Trajectory(Trajectory),
    Gate(Table),
}

pub struct DynamicsRun {
    pub output: DynamicsOutput,
    pub warnings: Vec<String>,
}

pub const PROTOCOLS: [&str; 4] = ["forster-switch", "cnot", "entangler", "hadamard-wait"];

pub fn dynamics(cfg: &Config, protocol: &str) -> Result<DynamicsRun, CliError> {
    let s = "dynamics";
    let omega1 = cfg.f64(s, "omega1")?;
    let delta0 = cfg.f64(s, "delta0")?;
    let v_f = cfg.f64(s, "v_f")?;
    let v_xx = cfg.f64(s, "v_xx")?;
    let dt = cfg.f64(s, "dt")?;
    let system = TwoQubitSystem::new(omega1, omega1 - delta0, v_f, v_xx);
    match protocol {
        "forster-switch" => {
            let hold = cfg.opt_f64(s, "hold")?.unwrap_or_else(|| dynamics::quarter_period(v_f));
            let run = dynamics::forster_switch_protocol(v_f, delta0, hold, cfg.f64(s, "off_time")?, dt)?;
            Ok(DynamicsRun {
                output: DynamicsOutput::Trajectory(run.trajectory),
                warnings: run.warnings,
            })
        }
        "cnot" => {
            let control = cfg.usize(s, "control")?;
            let report = dynamics::cnot_pulse(&system, control.min(255) as u8, cfg.f64(s, "omega")?, dt)?;
            let mut table = Table::new(&["input", "P00", "P01", "P10", "P11", "phase_rad", "carrier_meV", "duration_ps"]);
            for (k, row) in report.truth.iter().enumerate() {
                let mut cells: Vec<Cell> = vec![format!("{}{}", k / 2, k % 2).into()];
                cells.extend(row.iter().map(|&p| Cell::from(p)));
                cells.push(report.phases[k].into());
                cells.push(report.carrier.into());
                cells.push(report.duration.into());
                table.push(cells);
            }
            Ok(DynamicsRun {
                output: DynamicsOutput::Gate(table),
                warnings: report.warnings,
            })
        }
        "entangler" => Ok(DynamicsRun {
            output: DynamicsOutput::Trajectory(dynamics::entangler(&system, cfg.f64(s, "omega")?, dt)?),
            warnings: Vec::new(),
        }),
        "hadamard-wait" => {
            let mut warnings = Vec::new();
            if v_f != 0.0 {
                warnings.push("V_F is nonzero: the product-state analysis assumes V_F = 0".into());
            }
            Ok(DynamicsRun {
                output: DynamicsOutput::Trajectory(dynamics::hadamard_wait_protocol(&system, cfg.f64(s, "wait")?, dt)?),
                warnings,
            })
        }
        other => Err(CliError::Config(format!(
            "unknown protocol `{other}`; available: {}",
            PROTOCOLS.join(", ")
        ))),
    }
}

pub fn trajectory_table(traj: &Trajectory) -> Table {
    let mut table = Table::new(&[
        "t_ps", "re_00", "im_00", "re_01", "im_01", "re_10", "im_10", "re_11", "im_11", "P00", "P01", "P10", "P11",
        "concurrence",
    ]);
    for (t, psi) in traj.times.iter().zip(&traj.states) {
        let mut row: Vec<Cell> = vec![(*t).into()];
        for a in psi.iter() {
            row.push(a.re.into());
            row.push(a.im.into());
        }
        row.extend(dynamics::populations(psi).iter().map(|&p| Cell::from(p)));
        row.push(dynamics::concurrence(psi).into());
        table.push(row);
    }
    table
}
