//! Lab-frame and effective XY Hamiltonians.
//!
//! Sign conventions: `σ_z|e> = +|e>`, `σ^+ = |e><g|`. In the rotating frame
//! at the operating frequencies ω_o,j the lab Hamiltonian becomes
//!
//! ```text
//! H(t) = Σ_j ε_j sin(ν_j t + φ_j)/2 σ^z_j
//!      + Σ_j g_j [σ^+_{j−1}σ^-_j e^{i(ω_{j−1}−ω_j)t} + σ^+_{j−1}σ^+_j e^{i(ω_{j−1}+ω_j)t} + h.c.]
//! ```

use num_complex::Complex64;

use crate::linalg::{self, CMatrix, ZERO};
use crate::model::{ChainConfig, ModulationSpec, TransferSchedule};
use crate::units::{ghz_to_rad_ns, mhz_to_rad_ns};
use crate::{Error, Result};

/// A (possibly time-dependent) Hermitian generator acting on state vectors.
pub trait Hamiltonian: Sync {
    fn dim(&self) -> usize;

    /// `out = H(t) psi`. `out` is overwritten.
    fn apply(&self, t: f64, psi: &[Complex64], out: &mut [Complex64]);

    /// Upper bound (rad/ns) on both the operator norm and the fastest
    /// explicit time dependence; the integrators size their steps from it.
    fn rate_bound(&self) -> f64;

    fn is_time_independent(&self) -> bool {
        false
    }

    fn matrix(&self, t: f64) -> CMatrix {
        let d = self.dim();
        let mut m = CMatrix::zeros(d, d);
        let mut e = vec![ZERO; d];
        let mut col = vec![ZERO; d];
        for j in 0..d {
            e[j] = Complex64::new(1.0, 0.0);
            self.apply(t, &e, &mut col);
            for i in 0..d {
                m[(i, j)] = col[i];
            }
            e[j] = ZERO;
        }
        m
    }
}

/// Time-independent Hamiltonian stored densely.
#[derive(Debug, Clone)]
pub struct ConstantHamiltonian {
    matrix: CMatrix,
    rate: f64,
}

impl ConstantHamiltonian {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                actual: matrix.ncols(),
            });
        }
        let dev = linalg::hermiticity_deviation(&matrix);
        if dev > 1e-10 * linalg::max_abs(&matrix).max(1.0) {
            return Err(Error::NonHermitian { deviation: dev });
        }
        // Max absolute row sum bounds the spectral norm.
        let rate = (0..matrix.nrows())
            .map(|i| matrix.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max);
        Ok(Self { matrix, rate })
    }

    pub fn matrix_ref(&self) -> &CMatrix {
        &self.matrix
    }
}

impl Hamiltonian for ConstantHamiltonian {
    fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn apply(&self, _t: f64, psi: &[Complex64], out: &mut [Complex64]) {
        let d = self.dim();
        out.iter_mut().for_each(|z| *z = ZERO);
        for j in 0..d {
            let p = psi[j];
            if p == ZERO {
                continue;
            }
            let col = self.matrix.column(j);
            for i in 0..d {
                out[i] += col[i] * p;
            }
        }
    }

    fn rate_bound(&self) -> f64 {
        self.rate
    }

    fn is_time_independent(&self) -> bool {
        true
    }

    fn matrix(&self, _t: f64) -> CMatrix {
        self.matrix.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Frame {
    /// Rotating at each qubit's operating frequency; carriers removed.
    #[default]
    Operating,
    /// Absolute lab frame, kept for validating the rotating-frame path.
    Lab,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabOptions {
    pub frame: Frame,
    /// Keep the σ^+σ^+ / σ^-σ^- terms of the capacitive coupling.
    pub counter_rotating: bool,
}

impl Default for LabOptions {
    fn default() -> Self {
        Self {
            frame: Frame::Operating,
            counter_rotating: true,
        }
    }
}

/// Per-qubit sinusoidal drive in rad/ns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitDrive {
    pub amplitude: f64,
    pub frequency: f64,
    pub phase: f64,
}

impl From<&ModulationSpec> for QubitDrive {
    fn from(m: &ModulationSpec) -> Self {
        Self {
            amplitude: m.amplitude_rad_ns(),
            frequency: m.frequency_rad_ns(),
            phase: m.phase,
        }
    }
}

/// The parametrically modulated chain Hamiltonian, applied matrix-free.
#[derive(Debug, Clone)]
pub struct LabHamiltonian {
    operating: Vec<f64>,
    drives: Vec<Option<QubitDrive>>,
    couplings: Vec<f64>,
    options: LabOptions,
    rate: f64,
}

impl LabHamiltonian {
    /// General constructor: operating frequencies in GHz, couplings g/2π in
    /// MHz (zeros allowed), and an optional drive for every qubit.
    pub fn new(
        operating_ghz: &[f64],
        couplings_mhz: &[f64],
        drives: &[Option<ModulationSpec>],
        options: LabOptions,
    ) -> Result<Self> {
        let n = operating_ghz.len();
        if n == 0 || n > 16 {
            return Err(Error::validation("chain.qubits", format!("unsupported chain length {n}")));
        }
        if couplings_mhz.len() + 1 != n {
            return Err(Error::DimensionMismatch {
                expected: n - 1,
                actual: couplings_mhz.len(),
            });
        }
        if drives.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: drives.len(),
            });
        }
        let operating: Vec<f64> = operating_ghz.iter().map(|&f| ghz_to_rad_ns(f)).collect();
        let couplings: Vec<f64> = couplings_mhz.iter().map(|&g| mhz_to_rad_ns(g)).collect();
        let drives: Vec<Option<QubitDrive>> = drives.iter().map(|d| d.as_ref().map(QubitDrive::from)).collect();

        let mut norm = couplings.iter().map(|g| g.abs()).sum::<f64>();
        let mut fastest: f64 = 0.0;
        for (k, d) in drives.iter().enumerate() {
            let carrier = match options.frame {
                Frame::Operating => 0.0,
                Frame::Lab => operating[k].abs(),
            };
            let amp = d.map_or(0.0, |d| d.amplitude.abs());
            norm += 0.5 * (carrier + amp);
            if let Some(d) = d {
                fastest = fastest.max(d.frequency.abs());
            }
        }
        if options.frame == Frame::Operating {
            for w in operating.windows(2) {
                fastest = fastest.max((w[0] - w[1]).abs());
                if options.counter_rotating {
                    fastest = fastest.max((w[0] + w[1]).abs());
                }
            }
        }
        Ok(Self {
            operating,
            drives,
            couplings,
            options,
            rate: norm.max(fastest),
        })
    }

    pub fn from_schedule(chain: &ChainConfig, schedule: &TransferSchedule, options: LabOptions) -> Result<Self> {
        if schedule.modulations.len() + 1 != chain.len() {
            return Err(Error::DimensionMismatch {
                expected: chain.len().saturating_sub(1),
                actual: schedule.modulations.len(),
            });
        }
        let operating: Vec<f64> = chain.qubits.iter().map(|q| q.operating_freq).collect();
        let drives: Vec<Option<ModulationSpec>> = std::iter::once(None)
            .chain(schedule.modulations.iter().copied().map(Some))
            .collect();
        Self::new(&operating, &chain.static_couplings, &drives, options)
    }

    pub fn n_qubits(&self) -> usize {
        self.operating.len()
    }

    pub fn options(&self) -> LabOptions {
        self.options
    }

    /// Qubit frequency term ω_j(t) (lab) or its excursion (rotating), rad/ns.
    fn diagonal_coefficient(&self, k: usize, t: f64) -> f64 {
        let excursion = self.drives[k].map_or(0.0, |d| d.amplitude * (d.frequency * t + d.phase).sin());
        match self.options.frame {
            Frame::Operating => excursion,
            Frame::Lab => self.operating[k] + excursion,
        }
    }
}

impl Hamiltonian for LabHamiltonian {
    fn dim(&self) -> usize {
        1 << self.n_qubits()
    }

    fn apply(&self, t: f64, psi: &[Complex64], out: &mut [Complex64]) {
        let n = self.n_qubits();
        let dim = self.dim();

        let half: Vec<f64> = (0..n).map(|k| 0.5 * self.diagonal_coefficient(k, t)).collect();
        for s in 0..dim {
            let mut e = 0.0;
            for (k, h) in half.iter().enumerate() {
                e += if linalg::is_excited(s, k) { *h } else { -*h };
            }
            out[s] = psi[s] * e;
        }

        for (link, &g) in self.couplings.iter().enumerate() {
            if g == 0.0 {
                continue;
            }
            let a = link;
            let b = link + 1;
            let (exchange, pair) = match self.options.frame {
                Frame::Operating => {
                    let diff = (self.operating[a] - self.operating[b]) * t;
                    let sum = (self.operating[a] + self.operating[b]) * t;
                    (Complex64::from_polar(g, diff), Complex64::from_polar(g, sum))
                }
                Frame::Lab => (Complex64::new(g, 0.0), Complex64::new(g, 0.0)),
            };
            let ma = 1usize << a;
            let mb = 1usize << b;
            for s in 0..dim {
                let p = psi[s];
                if p == ZERO {
                    continue;
                }
                let ea = s & ma != 0;
                let eb = s & mb != 0;
                let flipped = s ^ ma ^ mb;
                match (ea, eb) {
                    // σ^+_a σ^-_b
                    (false, true) => out[flipped] += exchange * p,
                    // σ^+_b σ^-_a
                    (true, false) => out[flipped] += exchange.conj() * p,
                    // σ^+_a σ^+_b
                    (false, false) if self.options.counter_rotating => out[flipped] += pair * p,
                    // σ^-_a σ^-_b
                    (true, true) if self.options.counter_rotating => out[flipped] += pair.conj() * p,
                    _ => {}
                }
            }
        }
    }

    fn rate_bound(&self) -> f64 {
        self.rate
    }
}

/// Dense lab Hamiltonian at time `t` (ns).
pub fn build_lab_hamiltonian(
    chain: &ChainConfig,
    schedule: &TransferSchedule,
    t: f64,
    options: LabOptions,
) -> Result<CMatrix> {
    if !(t >= 0.0) {
        return Err(Error::validation("t", "time must be non-negative"));
    }
    Ok(LabHamiltonian::from_schedule(chain, schedule, options)?.matrix(t))
}

/// Default resonance tolerance |Δ_j| − ν_j, 1 kHz.
pub const DEFAULT_RESONANCE_TOLERANCE_MHZ: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveOptions {
    pub resonance_tolerance_mhz: f64,
}

impl Default for EffectiveOptions {
    fn default() -> Self {
        Self {
            resonance_tolerance_mhz: DEFAULT_RESONANCE_TOLERANCE_MHZ,
        }
    }
}

/// Effective couplings g′_j in rad/ns after checking the resonance
/// condition Δ_j = ν_j (odd j), Δ_j = −ν_j (even j).
pub fn resonant_couplings(
    chain: &ChainConfig,
    schedule: &TransferSchedule,
    options: EffectiveOptions,
) -> Result<Vec<Complex64>> {
    if schedule.modulations.len() + 1 != chain.len() {
        return Err(Error::DimensionMismatch {
            expected: chain.len().saturating_sub(1),
            actual: schedule.modulations.len(),
        });
    }
    for (i, (m, delta)) in schedule.modulations.iter().zip(chain.detunings_mhz()).enumerate() {
        let link = i + 1;
        if !(m.frequency > 0.0) {
            return Err(Error::ZeroModulationFrequency { link });
        }
        let sign = if link % 2 == 1 { 1.0 } else { -1.0 };
        let mismatch = delta - sign * m.frequency;
        if mismatch.abs() > options.resonance_tolerance_mhz {
            return Err(Error::ResonanceViolation {
                link,
                mismatch_mhz: mismatch,
            });
        }
    }
    Ok(schedule
        .compute_couplings(chain)?
        .into_iter()
        .map(|c| c * mhz_to_rad_ns(1.0))
        .collect())
}

/// Σ_j c_j σ^+_{j−1}σ^-_j + h.c. on the vacuum + single-excitation sector.
pub fn xy_sector_matrix(couplings: &[Complex64]) -> CMatrix {
    let n = couplings.len() + 1;
    let mut h = CMatrix::zeros(n + 1, n + 1);
    for (i, &c) in couplings.iter().enumerate() {
        // link j = i + 1 joins qubits i and i + 1 -> sector rows i + 1, i + 2
        h[(i + 1, i + 2)] = c;
        h[(i + 2, i + 1)] = c.conj();
    }
    h
}

/// Σ_j c_j σ^+_{j−1}σ^-_j + h.c. on the full 2^N register.
pub fn xy_full_matrix(couplings: &[Complex64]) -> CMatrix {
    let n = couplings.len() + 1;
    let dim = 1 << n;
    let mut h = CMatrix::zeros(dim, dim);
    for (a, &c) in couplings.iter().enumerate() {
        let ma = 1usize << a;
        let mb = 1usize << (a + 1);
        for s in 0..dim {
            if s & mb != 0 && s & ma == 0 {
                let t = s ^ ma ^ mb;
                h[(t, s)] = c;
                h[(s, t)] = c.conj();
            }
        }
    }
    h
}

/// Lifts a sector XY Hamiltonian (tridiagonal hopping, zero vacuum row) to
/// the full register.
pub fn sector_to_full_operator(sector: &CMatrix) -> CMatrix {
    let couplings: Vec<Complex64> = (1..sector.nrows() - 1).map(|i| sector[(i, i + 1)]).collect();
    xy_full_matrix(&couplings)
}

/// Effective XY Hamiltonian on the vacuum + single-excitation sector, rad/ns.
pub fn build_effective_hamiltonian(
    chain: &ChainConfig,
    schedule: &TransferSchedule,
    options: EffectiveOptions,
) -> Result<CMatrix> {
    Ok(xy_sector_matrix(&resonant_couplings(chain, schedule, options)?))
}
