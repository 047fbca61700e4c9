//! Time evolution of the two-qubit system: free and Förster-switched
//! propagation, laser pulses in the rotating-wave approximation, and
//! entanglement tracking.
//!
//! Amplitudes are reported in a frame rotating at `frame` per exciton, i.e.
//! the lab amplitude of a state with n excitons is multiplied by
//! exp(i n frame t/ħ). Populations and concurrence are frame independent.
//! A driven segment is solved in the frame of its carrier, where the RWA
//! Hamiltonian H − ω N + drive is time independent for a flat envelope.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix4, SymmetricEigen, Vector2, Vector3, Vector4};
use num_complex::Complex64;

use crate::error::{require_positive, Error, Result};
use crate::qubits::TwoQubitSystem;
use crate::units::HBAR;

pub type StateVector4 = Vector4<Complex64>;
pub type StateVector2 = Vector2<Complex64>;

/// Largest dt·(E_max − E_min)/ħ accepted by `evolve`.
pub const MAX_PHASE_STEP: f64 = 0.1;

/// RK4 substeps are cut to this phase per step, which keeps the norm drift
/// below 1e-9 per thousand steps.
const RK4_PHASE_STEP: f64 = 0.02;

const EXCITONS: [f64; 4] = [0.0, 1.0, 1.0, 2.0];

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn basis_state(q1: u8, q2: u8) -> StateVector4 {
    let mut v = StateVector4::zeros();
    v[(2 * q1 + q2) as usize] = c(1.0);
    v
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Envelope {
    Rectangular,
    /// exp(−(t − t_mid)²/2σ²) about the segment midpoint; integrated with RK4.
    Gaussian { sigma: f64 },
}

/// A laser drive in the rotating-wave approximation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Drive {
    /// Photon energy (meV).
    pub carrier: f64,
    /// Rabi energy Ω (meV); a resonant π-pulse lasts πħ/Ω.
    pub rabi: f64,
    pub phase: f64,
    /// Relative transition dipoles for flipping qubit 1 and qubit 2.
    pub dipoles: [f64; 2],
    pub envelope: Envelope,
}

impl Drive {
    /// Rectangular drive that flips only `qubit` (1 or 2).
    pub fn on_qubit(qubit: u8, carrier: f64, rabi: f64) -> Self {
        Drive {
            carrier,
            rabi,
            phase: 0.0,
            dipoles: if qubit == 1 { [1.0, 0.0] } else { [0.0, 1.0] },
            envelope: Envelope::Rectangular,
        }
    }

    /// Coupling in the carrier frame at unit envelope.
    fn coupling(&self) -> Matrix4<Complex64> {
        let mut h = Matrix4::zeros();
        let e = Complex64::from_polar(0.5 * self.rabi, self.phase);
        // (lower, upper, qubit flipped)
        for (lo, hi, q) in [(0, 2, 0), (1, 3, 0), (0, 1, 1), (2, 3, 1)] {
            let w = self.dipoles[q];
            h[(hi, lo)] += e * w;
            h[(lo, hi)] += e.conj() * w;
        }
        h
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PulseSegment {
    pub duration: f64,
    pub system: TwoQubitSystem,
    pub drive: Option<Drive>,
}

impl PulseSegment {
    pub fn free(duration: f64, system: TwoQubitSystem) -> Self {
        PulseSegment {
            duration,
            system,
            drive: None,
        }
    }

    pub fn driven(duration: f64, system: TwoQubitSystem, drive: Drive) -> Self {
        PulseSegment {
            duration,
            system,
            drive: Some(drive),
        }
    }

    fn validate(&self) -> Result<()> {
        require_positive("duration", self.duration)?;
        if let Some(d) = &self.drive {
            if !(d.rabi.is_finite() && d.rabi >= 0.0) {
                return Err(Error::InvalidParameter {
                    field: "rabi",
                    reason: format!("must be finite and >= 0, got {}", d.rabi),
                });
            }
            if let Envelope::Gaussian { sigma } = d.envelope {
                require_positive("sigma", sigma)?;
            }
        }
        Ok(())
    }

    fn frame(&self, fallback: f64) -> f64 {
        self.drive.map_or(fallback, |d| d.carrier)
    }

    /// Static part of the generator in the segment's own frame.
    fn static_generator(&self, frame: f64) -> Matrix4<Complex64> {
        let mut h = self.system.hamiltonian4().map(c);
        for (k, n) in EXCITONS.iter().enumerate() {
            h[(k, k)] -= c(n * frame);
        }
        if let Some(d) = self.drive.filter(|d| d.envelope == Envelope::Rectangular) {
            h += d.coupling();
        }
        h
    }
}

/// exp(−i H t/ħ) for Hermitian H.
pub fn propagator(h: &Matrix4<Complex64>, t: f64) -> Matrix4<Complex64> {
    let eig = SymmetricEigen::new(*h);
    let phases = Matrix4::from_diagonal(&eig.eigenvalues.map(|e| Complex64::from_polar(1.0, -e * t / HBAR)));
    eig.eigenvectors * phases * eig.eigenvectors.adjoint()
}

fn spread(h: &Matrix4<Complex64>) -> f64 {
    let e = SymmetricEigen::new(*h).eigenvalues;
    e.max() - e.min()
}

/// diag(exp(i n shift t/ħ)), moving amplitudes to a frame `shift` faster.
fn frame_shift(shift: f64, t: f64) -> Vector4<Complex64> {
    Vector4::from_fn(|k, _| Complex64::from_polar(1.0, EXCITONS[k] * shift * t / HBAR))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub frame: f64,
    pub times: Vec<f64>,
    pub states: Vec<StateVector4>,
}

impl Trajectory {
    pub fn final_state(&self) -> StateVector4 {
        *self.states.last().expect("trajectory holds the initial state")
    }

    pub fn populations(&self) -> Vec<[f64; 4]> {
        self.states.iter().map(populations).collect()
    }

    pub fn concurrence(&self) -> Vec<f64> {
        self.states.iter().map(concurrence).collect()
    }
}

pub fn populations(state: &StateVector4) -> [f64; 4] {
    [0, 1, 2, 3].map(|k| state[k].norm_sqr())
}

/// Pure-state concurrence 2|a00 a11 − a01 a10|.
pub fn concurrence(state: &StateVector4) -> f64 {
    2.0 * (state[0] * state[3] - state[1] * state[2]).norm()
}

/// Evolve through `segments`, sampling every `dt` (ps) and at each segment
/// end. Amplitudes are reported in the frame rotating at (ω₁ + ω₂)/2 of the
/// first segment.
pub fn evolve(state: StateVector4, segments: &[PulseSegment], dt: f64) -> Result<Trajectory> {
    let frame = segments.first().map_or(0.0, |s| 0.5 * (s.system.omega1 + s.system.omega2));
    evolve_in_frame(state, segments, dt, frame)
}

pub fn evolve_in_frame(state: StateVector4, segments: &[PulseSegment], dt: f64, frame: f64) -> Result<Trajectory> {
    require_positive("dt", dt)?;
    let norm = state.norm();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter {
            field: "state",
            reason: format!("initial state must be normalised, norm = {norm}"),
        });
    }
    for seg in segments {
        seg.validate()?;
        let own = seg.frame(frame);
        let mut h = seg.static_generator(own);
        if let Some(d) = seg.drive.filter(|d| d.envelope != Envelope::Rectangular) {
            h += d.coupling();
        }
        let width = spread(&h);
        if dt * width / HBAR >= MAX_PHASE_STEP {
            return Err(Error::StepTooLarge {
                dt,
                required: MAX_PHASE_STEP * HBAR / width,
            });
        }
    }
    let mut t = 0.0;
    let mut psi = state;
    let mut out = Trajectory {
        frame,
        times: vec![0.0],
        states: vec![psi],
    };
    for seg in segments {
        let own = seg.frame(frame);
        let shift = frame - own;
        // into the segment frame
        psi.component_mul_assign(&frame_shift(-shift, t));
        let h = seg.static_generator(own);
        let steps = (seg.duration / dt).ceil().max(1.0) as usize;
        let step = seg.duration / steps as f64;
        let shaped = seg.drive.filter(|d| d.envelope != Envelope::Rectangular);
        let u = propagator(&h, step);
        let start = t;
        for i in 1..=steps {
            psi = match shaped {
                None => u * psi,
                Some(d) => rk4_step(&h, &d, seg.duration, (i - 1) as f64 * step, step, psi),
            };
            t = start + i as f64 * step;
            out.times.push(t);
            out.states.push(psi.component_mul(&frame_shift(shift, t)));
        }
        psi.component_mul_assign(&frame_shift(shift, t));
    }
    Ok(out)
}

fn envelope_at(d: &Drive, duration: f64, t: f64) -> f64 {
    match d.envelope {
        Envelope::Rectangular => 1.0,
        Envelope::Gaussian { sigma } => {
            let u = (t - 0.5 * duration) / sigma;
            (-0.5 * u * u).exp()
        }
    }
}

fn rk4_step(
    h0: &Matrix4<Complex64>,
    drive: &Drive,
    duration: f64,
    t0: f64,
    step: f64,
    psi: StateVector4,
) -> StateVector4 {
    let v = drive.coupling();
    let width = spread(&(h0 + v)).max(1e-300);
    let n = ((step * width / HBAR) / RK4_PHASE_STEP).ceil().max(1.0) as usize;
    let h = step / n as f64;
    let minus_i = Complex64::new(0.0, -1.0 / HBAR);
    let rhs = |t: f64, y: &StateVector4| (h0 + v * c(envelope_at(drive, duration, t))) * y * minus_i;
    let mut y = psi;
    for k in 0..n {
        let t = t0 + k as f64 * h;
        let k1 = rhs(t, &y);
        let k2 = rhs(t + 0.5 * h, &(y + k1 * c(0.5 * h)));
        let k3 = rhs(t + 0.5 * h, &(y + k2 * c(0.5 * h)));
        let k4 = rhs(t + h, &(y + k3 * c(h)));
        y += (k1 + k2 * c(2.0) + k3 * c(2.0) + k4) * c(h / 6.0);
    }
    y
}

/// A protocol run with any advisory messages about its regime.
#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolRun {
    pub trajectory: Trajectory,
    pub warnings: Vec<String>,
}

/// πħ/(4V_F): time for |10⟩ to reach equal weight on |01⟩ at resonance.
pub fn quarter_period(v_f: f64) -> f64 {
    PI * HBAR / (4.0 * v_f.abs())
}

/// Start in |10⟩, hold with V_F on for `hold_time`, then switch V_F off
/// and evolve freely for `off_time`.
pub fn forster_switch_protocol(v_f_on: f64, delta0: f64, hold_time: f64, off_time: f64, dt: f64) -> Result<ProtocolRun> {
    let on = TwoQubitSystem::new(delta0, 0.0, v_f_on, 0.0);
    let off = TwoQubitSystem { v_f: 0.0, ..on };
    let mut warnings = Vec::new();
    if v_f_on.abs() < 5.0 * delta0.abs() {
        warnings.push(format!(
            "V_F/Delta0 = {:.3} is below 5: the exciton transfer is incomplete",
            v_f_on.abs() / delta0.abs()
        ));
    }
    let mut segments = vec![PulseSegment::free(hold_time, on)];
    if off_time > 0.0 {
        segments.push(PulseSegment::free(off_time, off));
    }
    Ok(ProtocolRun {
        trajectory: evolve(basis_state(1, 0), &segments, dt)?,
        warnings,
    })
}

/// Populations of the four outputs for each basis input, with the phase of
/// the largest output amplitude (the gate is defined up to these phases).
#[derive(Clone, Debug, PartialEq)]
pub struct GateReport {
    pub carrier: f64,
    pub duration: f64,
    /// truth[input][output]
    pub truth: [[f64; 4]; 4],
    pub phases: [f64; 4],
    /// Population moved from control-on input to the flipped target.
    pub conditional_transfer: f64,
    /// Largest population lost from a control-off input.
    pub leakage: f64,
    pub warnings: Vec<String>,
}

/// Resonant π-pulse on the target qubit conditioned on `control` (1 or 2)
/// being excited, at the exact E11 − E10 (control 1) or E11 − E01 line.
pub fn cnot_pulse(system: &TwoQubitSystem, control: u8, omega: f64, dt: f64) -> Result<GateReport> {
    if control != 1 && control != 2 {
        return Err(Error::InvalidParameter {
            field: "control",
            reason: format!("must be 1 or 2, got {control}"),
        });
    }
    require_positive("Omega", omega)?;
    let (t12, t21) = system.exact_transitions();
    let (carrier, target) = if control == 1 { (t12, 2) } else { (t21, 1) };
    let duration = PI * HBAR / omega;
    let segment = PulseSegment::driven(duration, *system, Drive::on_qubit(target, carrier, omega));
    let mut warnings = Vec::new();
    if omega > system.v_xx.abs() / 10.0 {
        warnings.push(format!(
            "Omega = {omega} meV exceeds V_XX/10 = {} meV: the pulse is not selective",
            system.v_xx.abs() / 10.0
        ));
    }
    let mut truth = [[0.0; 4]; 4];
    let mut phases = [0.0; 4];
    for (input, row) in truth.iter_mut().enumerate() {
        let start = basis_state((input / 2) as u8, (input % 2) as u8);
        let end = evolve(start, &[segment], dt)?.final_state();
        *row = populations(&end);
        let k = (0..4).max_by(|&a, &b| row[a].total_cmp(&row[b])).unwrap();
        phases[input] = end[k].arg();
    }
    // (control on, flipped) and the two control-off inputs
    let (on, flipped, off) = if control == 1 { (2, 3, [0, 1]) } else { (1, 3, [0, 2]) };
    Ok(GateReport {
        carrier,
        duration,
        conditional_transfer: truth[on][flipped],
        leakage: off.iter().map(|&k| 1.0 - truth[k][k]).fold(0.0, f64::max),
        truth,
        phases,
        warnings,
    })
}

/// π/2 on qubit 1 at its bare line, then the conditional π-pulse on qubit 2,
/// starting from |00⟩.
pub fn entangler(system: &TwoQubitSystem, omega: f64, dt: f64) -> Result<Trajectory> {
    require_positive("Omega", omega)?;
    let e = system.eigensystem();
    let half = PulseSegment::driven(0.5 * PI * HBAR / omega, *system, Drive::on_qubit(1, e.e10 - e.e00, omega));
    let (t12, _) = system.exact_transitions();
    let full = PulseSegment::driven(PI * HBAR / omega, *system, Drive::on_qubit(2, t12, omega));
    evolve(basis_state(0, 0), &[half, full], dt)
}

/// Free evolution of the ideal product state (|00⟩+|01⟩+|10⟩+|11⟩)/2.
pub fn hadamard_wait_protocol(system: &TwoQubitSystem, wait: f64, dt: f64) -> Result<Trajectory> {
    let start = StateVector4::from_element(c(0.5));
    evolve(start, &[PulseSegment::free(wait, *system)], dt)
}

/// exp(−i angle n·σ/2) applied to a single-qubit state; `axis` need not be
/// normalised.
pub fn bloch_single(state: &StateVector2, axis: &Vector3<f64>, angle: f64) -> Result<StateVector2> {
    let n = axis.norm();
    require_positive("axis", n)?;
    let u = axis / n;
    let (s, co) = (0.5 * angle).sin_cos();
    let i = Complex64::i();
    let m = Matrix2::new(
        c(co) - i * s * u.z,
        -i * s * u.x - s * u.y,
        -i * s * u.x + s * u.y,
        c(co) + i * s * u.z,
    );
    Ok(m * state)
}

/// cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩.
pub fn bloch_state(theta: f64, phi: f64) -> StateVector2 {
    Vector2::new(c((0.5 * theta).cos()), Complex64::from_polar((0.5 * theta).sin(), phi))
}

/// (sin θ cos φ, sin θ sin φ, cos θ) of a normalised state.
pub fn bloch_vector(state: &StateVector2) -> Vector3<f64> {
    let rho01 = state[0] * state[1].conj();
    Vector3::new(
        2.0 * rho01.re,
        -2.0 * rho01.im,
        state[0].norm_sqr() - state[1].norm_sqr(),
    )
}
