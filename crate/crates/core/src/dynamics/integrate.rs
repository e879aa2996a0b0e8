use crate::linalg::{CMatrix, CVector, ZERO};
use crate::model::{Hamiltonian, QuantumState, Representation, StateData};
use crate::{Complex64, Error, Result};

use super::noise::NoiseModel;
use super::request::{EvolutionRequest, MAX_STEPS_PER_INTERVAL};
use super::trajectory::Trajectory;

const MINUS_I: Complex64 = Complex64::new(0.0, -1.0);

/// Dispatches to the master equation when noise is present.
pub fn evolve(request: &EvolutionRequest) -> Result<Trajectory> {
    if request.noise.is_some() {
        evolve_lindblad(request)
    } else {
        evolve_unitary(request)
    }
}

struct Prepared {
    hamiltonian: Box<dyn Hamiltonian>,
    initial: QuantumState,
}

fn prepare(request: &EvolutionRequest, force_full: bool) -> Result<Prepared> {
    request.validate()?;
    let preferred = if force_full {
        Representation::Full
    } else {
        request.initial.representation()
    };
    let representation = request.source.representation(preferred);
    let initial = match representation {
        Representation::Full => request.initial.to_full(),
        Representation::Sector => request.initial.clone(),
    };
    let hamiltonian = request.source.build(representation)?;
    if hamiltonian.dim() != initial.dim() {
        return Err(Error::DimensionMismatch {
            expected: initial.dim(),
            actual: hamiltonian.dim(),
        });
    }
    Ok(Prepared { hamiltonian, initial })
}

fn step_count(interval: f64, rate: f64, factor: f64) -> Result<usize> {
    if rate <= 0.0 {
        return Ok(1);
    }
    let steps = (interval * rate / factor).ceil().max(1.0);
    if !steps.is_finite() || steps > MAX_STEPS_PER_INTERVAL {
        return Err(Error::StepUnderflow { required_steps: steps });
    }
    Ok(steps as usize)
}

/// Fixed-step RK4 integration of i dψ/dt = H(t)ψ.
///
/// Sector states stay in the sector for effective and explicit sources; the
/// lab source always runs on the full register. Mixed initial states are
/// evolved by the noiseless master equation.
pub fn evolve_unitary(request: &EvolutionRequest) -> Result<Trajectory> {
    if request.noise.is_some() {
        return Err(Error::validation("noise", "noisy requests go through evolve_lindblad"));
    }
    let Prepared { hamiltonian, initial } = prepare(request, false)?;
    let n_qubits = initial.n_qubits();
    let repr = initial.representation();
    let psi0 = match initial.data() {
        StateData::Pure(v) => v.clone(),
        StateData::Mixed(_) => return integrate_density(&*hamiltonian, &initial, None, request),
    };

    let h = &*hamiltonian;
    let d = psi0.len();
    let mut psi: Vec<Complex64> = psi0.iter().copied().collect();
    let mut k = [vec![ZERO; d], vec![ZERO; d], vec![ZERO; d], vec![ZERO; d]];
    let mut tmp = vec![ZERO; d];
    let mut states = vec![initial.clone()];

    let rate = h.rate_bound();
    for w in request.times.windows(2) {
        let steps = step_count(w[1] - w[0], rate, request.options.step_factor)?;
        let dt = (w[1] - w[0]) / steps as f64;
        for s in 0..steps {
            let t = w[0] + s as f64 * dt;
            derivative(h, t, &psi, &mut k[0]);
            axpy(&psi, 0.5 * dt, &k[0], &mut tmp);
            derivative(h, t + 0.5 * dt, &tmp, &mut k[1]);
            axpy(&psi, 0.5 * dt, &k[1], &mut tmp);
            derivative(h, t + 0.5 * dt, &tmp, &mut k[2]);
            axpy(&psi, dt, &k[2], &mut tmp);
            derivative(h, t + dt, &tmp, &mut k[3]);
            for i in 0..d {
                psi[i] += (k[0][i] + 2.0 * (k[1][i] + k[2][i]) + k[3][i]) * (dt / 6.0);
            }
        }
        states.push(QuantumState::from_parts(
            n_qubits,
            repr,
            StateData::Pure(CVector::from_column_slice(&psi)),
        ));
    }
    Ok(Trajectory::from_states(request.times.clone(), states))
}

fn derivative(h: &dyn Hamiltonian, t: f64, psi: &[Complex64], out: &mut [Complex64]) {
    h.apply(t, psi, out);
    for z in out.iter_mut() {
        *z *= MINUS_I;
    }
}

fn axpy(x: &[Complex64], a: f64, y: &[Complex64], out: &mut [Complex64]) {
    for ((o, xi), yi) in out.iter_mut().zip(x).zip(y) {
        *o = xi + yi * a;
    }
}

/// RK4 integration of the Lindblad master equation on the full register,
/// with amplitude damping (1/t1), pure dephasing (σ_z at 1/(2tφ)) and the
/// optional thermal excitation channel for every qubit.
pub fn evolve_lindblad(request: &EvolutionRequest) -> Result<Trajectory> {
    let noise = request
        .noise
        .as_ref()
        .ok_or_else(|| Error::validation("noise", "master-equation runs need a noise model"))?;
    let Prepared { hamiltonian, initial } = prepare(request, true)?;
    integrate_density(&*hamiltonian, &initial.to_mixed(), Some(noise), request)
}

/// Per-qubit dissipators in 1/ns.
struct Channels {
    down: Vec<f64>,
    up: Vec<f64>,
    dephase: Vec<f64>,
}

impl Channels {
    fn new(noise: Option<&NoiseModel>, n: usize) -> Self {
        let mut c = Self {
            down: vec![0.0; n],
            up: vec![0.0; n],
            dephase: vec![0.0; n],
        };
        if let Some(noise) = noise {
            for (k, q) in noise.qubits.iter().enumerate() {
                c.down[k] = q.relaxation_rate();
                c.up[k] = q.excitation_rate();
                c.dephase[k] = q.dephasing_rate().max(0.0);
            }
        }
        c
    }

    fn total(&self) -> f64 {
        self.down.iter().chain(&self.up).chain(&self.dephase).sum()
    }

    fn is_empty(&self) -> bool {
        self.total() == 0.0
    }

    /// Real decay coefficient multiplying ρ[s,t] in the anticommutator and
    /// dephasing parts of the dissipator.
    fn decay_table(&self, dim: usize) -> Vec<f64> {
        let n = self.down.len();
        let mut table = vec![0.0; dim * dim];
        for t in 0..dim {
            for s in 0..dim {
                let mut g = 0.0;
                for k in 0..n {
                    let es = (s >> k) & 1;
                    let et = (t >> k) & 1;
                    g += 0.5 * self.down[k] * (es + et) as f64;
                    g += 0.5 * self.up[k] * (2 - es - et) as f64;
                    if es != et {
                        g += self.dephase[k];
                    }
                }
                table[t * dim + s] = g;
            }
        }
        table
    }
}

fn integrate_density(
    h: &dyn Hamiltonian,
    initial: &QuantumState,
    noise: Option<&NoiseModel>,
    request: &EvolutionRequest,
) -> Result<Trajectory> {
    let n_qubits = initial.n_qubits();
    let repr = initial.representation();
    let channels = Channels::new(noise, n_qubits);
    if repr == Representation::Sector && !channels.is_empty() {
        return Err(Error::validation("initial", "dissipative runs need the full register"));
    }
    let d = initial.dim();
    let decay = channels.decay_table(d);
    let rho0 = initial.density_matrix();
    let mut rho: Vec<Complex64> = rho0.as_slice().to_vec();
    let size = d * d;
    let mut k = [vec![ZERO; size], vec![ZERO; size], vec![ZERO; size], vec![ZERO; size]];
    let mut tmp = vec![ZERO; size];
    let mut scratch = vec![ZERO; size];
    let mut states = vec![initial.clone()];

    let lindblad = |t: f64, rho: &[Complex64], out: &mut [Complex64], hr: &mut [Complex64]| {
        for j in 0..d {
            h.apply(t, &rho[j * d..(j + 1) * d], &mut hr[j * d..(j + 1) * d]);
        }
        // column-major: element (s, t) lives at t*d + s
        for t_ in 0..d {
            for s in 0..d {
                let a = hr[t_ * d + s];
                let b = hr[s * d + t_].conj();
                out[t_ * d + s] = MINUS_I * (a - b) - rho[t_ * d + s] * decay[t_ * d + s];
            }
        }
        for kq in 0..n_qubits {
            let m = 1usize << kq;
            let (down, up) = (channels.down[kq], channels.up[kq]);
            if down == 0.0 && up == 0.0 {
                continue;
            }
            for t_ in 0..d {
                for s in 0..d {
                    let (es, et) = (s & m != 0, t_ & m != 0);
                    if !es && !et && down != 0.0 {
                        out[t_ * d + s] += rho[(t_ | m) * d + (s | m)] * down;
                    } else if es && et && up != 0.0 {
                        out[t_ * d + s] += rho[(t_ ^ m) * d + (s ^ m)] * up;
                    }
                }
            }
        }
    };

    let rate = h.rate_bound() + channels.total();
    for w in request.times.windows(2) {
        let steps = step_count(w[1] - w[0], rate, request.options.step_factor)?;
        let dt = (w[1] - w[0]) / steps as f64;
        for s in 0..steps {
            let t = w[0] + s as f64 * dt;
            lindblad(t, &rho, &mut k[0], &mut scratch);
            axpy(&rho, 0.5 * dt, &k[0], &mut tmp);
            lindblad(t + 0.5 * dt, &tmp, &mut k[1], &mut scratch);
            axpy(&rho, 0.5 * dt, &k[1], &mut tmp);
            lindblad(t + 0.5 * dt, &tmp, &mut k[2], &mut scratch);
            axpy(&rho, dt, &k[2], &mut tmp);
            lindblad(t + dt, &tmp, &mut k[3], &mut scratch);
            for i in 0..size {
                rho[i] += (k[0][i] + 2.0 * (k[1][i] + k[2][i]) + k[3][i]) * (dt / 6.0);
            }
        }
        let m = CMatrix::from_column_slice(d, d, &rho);
        let m = (&m + m.adjoint()).scale(0.5);
        states.push(QuantumState::from_parts(n_qubits, repr, StateData::Mixed(m)));
    }
    Ok(Trajectory::from_states(request.times.clone(), states))
}
