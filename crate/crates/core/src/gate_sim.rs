//! Noisy single-qubit rotation of a qubit driven through a waveguide.
//!
//! The drive and the spontaneous emission share the same channel, so the Rabi
//! frequency is fixed by the photon number of the pulse: `Omega = 4 gamma n_g / theta`
//! and `tau = theta^2 / (4 gamma n_g)`. In the rotating frame the master
//! equation is
//!
//! ```text
//! d rho/dt = -i [(Omega/2) sigma_x, rho] + gamma (s- rho s+ - {s+ s-, rho}/2)
//! ```
//!
//! integrated over the square pulse with fixed-step RK4. The noise map is
//! `E = G^-1 o G~`, where `G~` is the simulated map and `G` the ideal rotation.

use std::f64::consts::PI;

use nalgebra::{Complex, Matrix2, Matrix4, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type C64 = Complex<f64>;
type Op = Matrix2<C64>;

/// Minimum number of RK4 steps over one pulse.
pub const MIN_STEPS: usize = 1000;
/// Largest accepted step count before the integration is declared divergent.
pub const MAX_STEPS: usize = 1 << 24;
/// Convergence criterion: halving the step moves `chi_diag` by less than this,
/// relative to its largest entry.
pub const CONVERGENCE_TOL: f64 = 1e-9;
/// `(omega0/gamma)/n_g` at or below which the rotating-wave drive is suspect.
pub const RWA_WARN_MARGIN: f64 = 100.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateSpec {
    /// Rotation angle about x, in `(0, 2 pi]`.
    pub theta: f64,
    /// Spontaneous emission rate.
    pub gamma: f64,
    /// Mean photon number of the pulse.
    pub n_g: f64,
    /// Qubit angular frequency; only used for the rotating-wave check.
    #[serde(default)]
    pub omega0: Option<f64>,
}

impl GateSpec {
    pub fn new(theta: f64, gamma: f64, n_g: f64) -> Result<Self> {
        let spec = GateSpec { theta, gamma, n_g, omega0: None };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_omega0(mut self, omega0: f64) -> Result<Self> {
        self.omega0 = Some(omega0);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta <= 2.0 * PI) {
            return Err(Error::InvalidArgument(format!("theta must lie in (0, 2pi], got {}", self.theta)));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidArgument(format!("gamma must be > 0, got {}", self.gamma)));
        }
        if !(self.n_g > 0.0 && self.n_g.is_finite()) {
            return Err(Error::InvalidArgument(format!("n_g must be > 0, got {}", self.n_g)));
        }
        if let Some(w) = self.omega0 {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidArgument(format!("omega0 must be > 0, got {w}")));
            }
        }
        Ok(())
    }

    /// `(omega0/gamma)/n_g`, if `omega0` is known.
    pub fn rwa_margin(&self) -> Option<f64> {
        self.omega0.map(|w| w / self.gamma / self.n_g)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseParams {
    /// Rabi frequency.
    pub omega: f64,
    /// Pulse duration.
    pub tau: f64,
}

pub fn pulse_params(spec: &GateSpec) -> PulseParams {
    let omega = 4.0 * spec.gamma * spec.n_g / spec.theta;
    let tau = spec.theta * spec.theta / (4.0 * spec.gamma * spec.n_g);
    PulseParams { omega, tau }
}

/// A qubit channel in Pauli transfer form, basis `(1, sx, sy, sz)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitChannel {
    pub ptm: [[f64; 4]; 4],
    /// `(chi_00, p_x, p_y, p_z)`.
    pub chi_diag: [f64; 4],
    pub converged: bool,
    pub rwa_margin: Option<f64>,
}

impl QubitChannel {
    pub fn from_ptm(ptm: Matrix4<f64>) -> Result<Self> {
        let chi_diag = extract_chi_diag(&ptm)?;
        Ok(QubitChannel { ptm: to_array(&ptm), chi_diag, converged: true, rwa_margin: None })
    }

    pub fn ptm_matrix(&self) -> Matrix4<f64> {
        Matrix4::from_fn(|r, c| self.ptm[r][c])
    }

    pub fn p_x(&self) -> f64 {
        self.chi_diag[1]
    }

    pub fn p_y(&self) -> f64 {
        self.chi_diag[2]
    }

    pub fn p_z(&self) -> f64 {
        self.chi_diag[3]
    }

    /// `self` applied after `first`.
    pub fn after(&self, first: &QubitChannel) -> Result<QubitChannel> {
        let mut out = QubitChannel::from_ptm(self.ptm_matrix() * first.ptm_matrix())?;
        out.converged = self.converged && first.converged;
        Ok(out)
    }

    /// Largest deviation of the first PTM row from `(1, 0, 0, 0)`.
    pub fn trace_defect(&self) -> f64 {
        let row = self.ptm[0];
        (row[0] - 1.0).abs().max(row[1].abs()).max(row[2].abs()).max(row[3].abs())
    }

    /// Smallest eigenvalue of the Choi matrix; negative means not CP.
    pub fn choi_min_eigenvalue(&self) -> f64 {
        let paulis = paulis();
        let image = |input: &Op| -> Op {
            // expand input in Paulis, map each through the PTM
            let coeffs: Vec<C64> = paulis.iter().map(|p| (p * input).trace() * 0.5).collect();
            let mut out = Op::zeros();
            for (beta, cb) in coeffs.iter().enumerate() {
                for (alpha, pa) in paulis.iter().enumerate() {
                    out += pa * (*cb * self.ptm[alpha][beta]);
                }
            }
            out
        };
        let mut choi = Matrix4::<C64>::zeros();
        for i in 0..2 {
            for j in 0..2 {
                let mut unit = Op::zeros();
                unit[(i, j)] = C64::new(1.0, 0.0);
                let block = image(&unit);
                for r in 0..2 {
                    for c in 0..2 {
                        choi[(2 * i + r, 2 * j + c)] = block[(r, c)];
                    }
                }
            }
        }
        choi.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn to_array(m: &Matrix4<f64>) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = m[(r, c)];
        }
    }
    out
}

/// Bloch vector of a qubit state; the trace is fixed at one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityState {
    pub bloch: [f64; 3],
}

impl DensityState {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let s = DensityState { bloch: [x, y, z] };
        if s.norm() > 1.0 + 1e-9 {
            return Err(Error::InvalidArgument(format!("Bloch vector norm {} exceeds 1", s.norm())));
        }
        Ok(s)
    }

    pub fn norm(&self) -> f64 {
        Vector3::from(self.bloch).norm()
    }

    /// Image under a channel. Not re-validated, so contraction can be checked.
    pub fn apply(&self, channel: &QubitChannel) -> DensityState {
        let [x, y, z] = self.bloch;
        let out = channel.ptm_matrix() * Vector4::new(1.0, x, y, z);
        DensityState { bloch: [out[1], out[2], out[3]] }
    }
}

fn paulis() -> [Op; 4] {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    [
        Op::new(l, o, o, l),
        Op::new(o, l, l, o),
        Op::new(o, -i, i, o),
        Op::new(l, o, o, -l),
    ]
}

struct Lindblad {
    hamiltonian: Op,
    lowering: Op,
    raising: Op,
    excited: Op,
    gamma: f64,
}

impl Lindblad {
    fn new(omega: f64, gamma: f64) -> Self {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        // |0> is the ground state; s- = |0><1|
        let lowering = Op::new(o, l, o, o);
        let raising = lowering.adjoint();
        Lindblad {
            hamiltonian: paulis()[1] * C64::new(omega / 2.0, 0.0),
            excited: raising * lowering,
            lowering,
            raising,
            gamma,
        }
    }

    fn rhs(&self, rho: &Op) -> Op {
        let minus_i = C64::new(0.0, -1.0);
        let unitary = (self.hamiltonian * rho - rho * self.hamiltonian) * minus_i;
        let jump = self.lowering * rho * self.raising;
        let anti = self.excited * rho + rho * self.excited;
        unitary + (jump - anti * C64::new(0.5, 0.0)) * C64::new(self.gamma, 0.0)
    }

    fn evolve(&self, mut rho: Op, duration: f64, steps: usize) -> Op {
        let h = duration / steps as f64;
        let half = C64::new(h / 2.0, 0.0);
        let full = C64::new(h, 0.0);
        let sixth = C64::new(h / 6.0, 0.0);
        let two = C64::new(2.0, 0.0);
        for _ in 0..steps {
            let k1 = self.rhs(&rho);
            let k2 = self.rhs(&(rho + k1 * half));
            let k3 = self.rhs(&(rho + k2 * half));
            let k4 = self.rhs(&(rho + k3 * full));
            rho += (k1 + k2 * two + k3 * two + k4) * sixth;
        }
        rho
    }
}

/// PTM of a rotation by `angle` about x.
pub fn x_rotation_ptm(angle: f64) -> Matrix4<f64> {
    let (s, c) = angle.sin_cos();
    Matrix4::new(
        1.0, 0.0, 0.0, 0.0,
        0.0, 1.0, 0.0, 0.0,
        0.0, 0.0, c, -s,
        0.0, 0.0, s, c,
    )
}

/// Default step count: `h <= min(tau/1000, 0.01/Omega, 0.01/gamma)`.
pub fn default_steps(spec: &GateSpec) -> usize {
    let PulseParams { omega, tau } = pulse_params(spec);
    let by_rabi = (tau * omega / 0.01).ceil();
    let by_decay = (tau * spec.gamma / 0.01).ceil();
    (MIN_STEPS as f64).max(by_rabi).max(by_decay) as usize
}

/// PTM of the simulated (noisy) gate with a fixed number of steps.
pub fn simulate_gate_ptm(spec: &GateSpec, steps: usize) -> Matrix4<f64> {
    let PulseParams { omega, tau } = pulse_params(spec);
    let dynamics = Lindblad::new(omega, spec.gamma);
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    let h = C64::new(0.5, 0.0);
    let ih = C64::new(0.0, 0.5);
    let ground = Op::new(l, o, o, o);
    let excited = Op::new(o, o, o, l);
    let plus = Op::new(h, h, h, h);
    let plus_i = Op::new(h, -ih, ih, h);

    let [r0, r1, rp, ri] = [ground, excited, plus, plus_i].map(|rho| dynamics.evolve(rho, tau, steps));
    let two = C64::new(2.0, 0.0);
    let img_identity = r0 + r1;
    let images = [img_identity, rp * two - img_identity, ri * two - img_identity, r0 - r1];

    let paulis = paulis();
    Matrix4::from_fn(|alpha, beta| ((paulis[alpha] * images[beta]).trace() * 0.5).re)
}

fn noise_from_ptm(spec: &GateSpec, noisy: Matrix4<f64>) -> Result<(Matrix4<f64>, [f64; 4])> {
    let ptm = x_rotation_ptm(-spec.theta) * noisy;
    let chi = extract_chi_diag(&ptm)?;
    Ok((ptm, chi))
}

/// Noise channel of one noisy rotation with a fixed step count. The
/// `converged` flag is left false.
pub fn noise_channel_with_steps(spec: &GateSpec, steps: usize) -> Result<QubitChannel> {
    spec.validate()?;
    let (ptm, chi_diag) = noise_from_ptm(spec, simulate_gate_ptm(spec, steps))?;
    Ok(QubitChannel { ptm: to_array(&ptm), chi_diag, converged: false, rwa_margin: spec.rwa_margin() })
}

/// Simulates the gate and returns its noise channel `G^-1 o G~`.
///
/// The step count starts at [`default_steps`] and doubles until halving the
/// step changes `chi_diag` by less than [`CONVERGENCE_TOL`].
pub fn evolve_noisy_gate(spec: &GateSpec) -> Result<QubitChannel> {
    spec.validate()?;
    if let Some(margin) = spec.rwa_margin() {
        if margin <= RWA_WARN_MARGIN {
            log::warn!("n_g = {} is not << omega0/gamma (margin {margin:.3}); rotating-wave drive is marginal", spec.n_g);
        }
    }
    let mut steps = default_steps(spec);
    let (_, mut coarse) = noise_from_ptm(spec, simulate_gate_ptm(spec, steps))?;
    loop {
        if steps * 2 > MAX_STEPS {
            return Err(Error::NonConvergent { steps });
        }
        steps *= 2;
        let (ptm, fine) = noise_from_ptm(spec, simulate_gate_ptm(spec, steps))?;
        let scale = fine.iter().fold(0f64, |m, v| m.max(v.abs()));
        let change = fine.iter().zip(&coarse).fold(0f64, |m, (a, b)| m.max((a - b).abs()));
        if change <= CONVERGENCE_TOL * scale {
            return Ok(QubitChannel { ptm: to_array(&ptm), chi_diag: fine, converged: true, rwa_margin: spec.rwa_margin() });
        }
        coarse = fine;
    }
}

/// Diagonal of the chi matrix from the PTM diagonal.
///
/// `s_a = Tr(sigma_a E(sigma_a))/2` satisfies `s_0 = sum_b chi_bb` and
/// `s_a = chi_00 + chi_aa - sum_(b != 0, a) chi_bb` for `a = 1, 2, 3`.
/// Off-diagonal chi entries do not enter these traces.
pub fn extract_chi_diag(ptm: &Matrix4<f64>) -> Result<[f64; 4]> {
    let row = ptm.row(0);
    let defect = (row[0] - 1.0).abs().max(row[1].abs()).max(row[2].abs()).max(row[3].abs());
    if defect > 1e-9 {
        return Err(Error::InvalidArgument(format!("map is not trace preserving (defect {defect:e})")));
    }
    let coefficients = Matrix4::new(
        1.0, 1.0, 1.0, 1.0,
        1.0, 1.0, -1.0, -1.0,
        1.0, -1.0, 1.0, -1.0,
        1.0, -1.0, -1.0, 1.0,
    );
    let s = ptm.diagonal();
    let chi = coefficients.lu().solve(&s).expect("coefficient matrix is invertible (M^2 = 4I)");
    Ok([chi[0], chi[1], chi[2], chi[3]])
}

/// First-order photon-number asymptotics of a pi-pulse: `(p_x, p_y, p_z)`.
pub fn asymptotic_pauli_errors(n_g: f64) -> [f64; 3] {
    let base = PI * PI / n_g;
    [base / 16.0, base / 32.0, base / 32.0]
}
