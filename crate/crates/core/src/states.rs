//! Bell-diagonal states, their product weight functions, and dense density
//! matrices used by the oracle simulator.
//!
//! Component order everywhere is `(I, X, Y, Z)`: the unilateral Pauli error
//! that maps `phi+ = (|00> + |11>)/sqrt2` onto `phi+`, `psi+`, `psi-`, `phi-`.
//! Dense matrices use big-endian qubit order (qubit 0 is the most significant
//! bit); a two-qubit state is ordered `(A, B)` and an `n`-pair product is
//! ordered `A1 B1 A2 B2 ... An Bn`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};

const SUM_TOL: f64 = 1e-12;

/// Probability vector over the four Bell components.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellDiagonalState {
    probs: [f64; 4],
}

impl BellDiagonalState {
    pub fn new(probs: [f64; 4]) -> Result<Self> {
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0 || *p > 1.0) {
            return Err(Error::InvalidProbabilities(format!("{probs:?} has entries outside [0, 1]")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidProbabilities(format!("{probs:?} sums to {sum}")));
        }
        Ok(Self { probs })
    }

    pub fn isotropic(fidelity: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&fidelity) {
            return Err(Error::FidelityRange(fidelity));
        }
        let e = (1.0 - fidelity) / 3.0;
        Ok(Self { probs: [fidelity, e, e, e] })
    }

    pub fn perfect() -> Self {
        Self { probs: [1.0, 0.0, 0.0, 0.0] }
    }

    /// Rank-2 state `F phi+ + (1 - F) sigma`, with `sigma` the Bell state
    /// reached by the given error.
    pub fn two_component(fidelity: f64, error: Pauli) -> Result<Self> {
        if !(0.0..=1.0).contains(&fidelity) {
            return Err(Error::FidelityRange(fidelity));
        }
        if error == Pauli::I {
            return Ok(Self::perfect());
        }
        let mut probs = [0.0; 4];
        probs[0] = fidelity;
        probs[error.index()] = 1.0 - fidelity;
        Ok(Self { probs })
    }

    pub fn probs(&self) -> [f64; 4] {
        self.probs
    }

    pub fn prob(&self, p: Pauli) -> f64 {
        self.probs[p.index()]
    }

    pub fn fidelity(&self) -> f64 {
        self.probs[0]
    }

    /// Bilateral `U (x) U*` twirl: keeps the fidelity, spreads the rest evenly.
    pub fn bilateral_twirl(&self) -> Self {
        let e = (1.0 - self.probs[0]) / 3.0;
        Self { probs: [self.probs[0], e, e, e] }
    }

    /// Parses `bds:pI,pX,pY,pZ` or `iso:F`.
    pub fn parse_literal(text: &str) -> Result<Self> {
        let bad = || Error::StateLiteral(text.to_string());
        let t = text.trim();
        if let Some(v) = t.strip_prefix("iso:") {
            let f: f64 = v.trim().parse().map_err(|_| bad())?;
            return Self::isotropic(f);
        }
        if let Some(v) = t.strip_prefix("bds:") {
            let parts: Vec<f64> = v.split(',').map(|s| s.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
            let probs: [f64; 4] = parts.try_into().map_err(|_| bad())?;
            return Self::new(probs);
        }
        Err(bad())
    }

    pub fn to_literal(&self) -> String {
        let [a, b, c, d] = self.probs;
        format!("bds:{a},{b},{c},{d}")
    }

    /// Uniformly random point of the probability simplex.
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        let e: [f64; 4] = std::array::from_fn(|_| standard_exp(rng));
        let s: f64 = e.iter().sum();
        Self::normalized(e.map(|v| v / s))
    }

    /// Random state with the given fidelity and a random error split.
    pub fn random_with_fidelity<R: Rng>(fidelity: f64, rng: &mut R) -> Result<Self> {
        if !(0.0..=1.0).contains(&fidelity) {
            return Err(Error::FidelityRange(fidelity));
        }
        let e: [f64; 3] = std::array::from_fn(|_| standard_exp(rng));
        let s: f64 = e.iter().sum();
        let rest = 1.0 - fidelity;
        Ok(Self::normalized([fidelity, rest * e[0] / s, rest * e[1] / s, rest * e[2] / s]))
    }

    fn normalized(mut probs: [f64; 4]) -> Self {
        // Push the rounding residue into the largest entry so the sum is 1.
        let sum: f64 = probs.iter().sum();
        let (imax, _) = probs.iter().enumerate().fold((0, f64::MIN), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
        probs[imax] += 1.0 - sum;
        Self { probs }
    }

    pub fn to_density(&self) -> DensityMatrix {
        let mut m = DMatrix::zeros(4, 4);
        for (k, v) in bell_vectors().iter().enumerate() {
            m += v * v.adjoint() * Complex64::new(self.probs[k], 0.0);
        }
        DensityMatrix { data: m }
    }
}

impl fmt::Display for BellDiagonalState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_literal())
    }
}

impl FromStr for BellDiagonalState {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse_literal(s)
    }
}

/// Exp(1) sample by inversion.
fn standard_exp<R: Rng>(rng: &mut R) -> f64 {
    let u: f64 = rng.gen();
    -(1.0 - u).ln()
}

/// Product weight function `W(P) = prod_i probs_i[P_i]` over `n` inputs.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightTable {
    factors: Vec<[f64; 4]>,
}

impl WeightTable {
    pub fn new(inputs: &[BellDiagonalState]) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::EmptyInputs);
        }
        if inputs.len() > crate::pauli::MAX_QUBITS {
            return Err(Error::QubitCount { n: inputs.len(), min: 1, max: crate::pauli::MAX_QUBITS });
        }
        Ok(Self { factors: inputs.iter().map(|s| s.probs).collect() })
    }

    pub fn num_pairs(&self) -> usize {
        self.factors.len()
    }

    /// Weight of an error string on the `n` input pairs. Slots beyond `n`
    /// (assisting pairs) must carry the identity, otherwise the weight is 0.
    #[inline]
    pub fn weight(&self, p: &PauliString) -> f64 {
        let n = self.factors.len();
        if p.num_qubits() > n && (p.x_bits() | p.z_bits()) >> n != 0 {
            return 0.0;
        }
        self.factors.iter().enumerate().map(|(i, f)| f[p.get(i).index()]).product()
    }

    /// `sum_P W(P)` computed as the product of per-factor sums.
    pub fn total(&self) -> f64 {
        self.factors.iter().map(|f| f.iter().sum::<f64>()).product()
    }

    /// Weight table with slot `slot` marginalised out.
    pub fn marginal(&self, slot: usize) -> Result<Self> {
        if slot >= self.factors.len() || self.factors.len() < 2 {
            return Err(Error::SlotOutOfRange { slot, n: self.factors.len() });
        }
        let mut factors = self.factors.clone();
        factors.remove(slot);
        Ok(Self { factors })
    }
}

pub fn weight_table(inputs: &[BellDiagonalState]) -> Result<WeightTable> {
    WeightTable::new(inputs)
}

/// The Bell vectors `phi+`, `psi+`, `psi-`, `phi-` in `(I, X, Y, Z)` order.
pub fn bell_vectors() -> [DVector<Complex64>; 4] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let v = |a: [f64; 4]| DVector::from_iterator(4, a.iter().map(|&r| Complex64::new(r * h, 0.0)));
    [v([1.0, 0.0, 0.0, 1.0]), v([0.0, 1.0, 1.0, 0.0]), v([0.0, 1.0, -1.0, 0.0]), v([1.0, 0.0, 0.0, -1.0])]
}

/// Dense complex density matrix of dimension `2^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    data: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Wraps a matrix after checking Hermiticity, unit trace and positivity.
    pub fn new(data: DMatrix<Complex64>) -> Result<Self> {
        let dim = data.nrows();
        if dim != data.ncols() || dim == 0 || !dim.is_power_of_two() {
            return Err(Error::InvalidDensity(format!("shape {}x{}", dim, data.ncols())));
        }
        let rho = Self { data };
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn from_raw(data: DMatrix<Complex64>) -> Self {
        Self { data }
    }

    pub fn validate(&self) -> Result<()> {
        let herm = (&self.data - self.data.adjoint()).camax();
        if herm > 1e-12 {
            return Err(Error::InvalidDensity(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = self.data.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        let min = self.min_eigenvalue();
        if min < -1e-9 {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.data + self.data.adjoint()) * Complex64::new(0.5, 0.0);
        herm.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn num_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn trace(&self) -> Complex64 {
        self.data.trace()
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self { data: self.data.kronecker(&other.data) }
    }

    /// `<phi+|rho|phi+>` for a two-qubit state.
    pub fn fidelity(&self) -> Result<f64> {
        Ok(pauli_twirl_dense(self)?.fidelity())
    }

    /// Traces out every qubit not listed in `keep`; kept qubits stay in
    /// ascending order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let nq = self.num_qubits();
        if keep.iter().any(|&q| q >= nq) {
            return Err(Error::SlotOutOfRange { slot: *keep.iter().max().unwrap(), n: nq });
        }
        let mut keep: Vec<usize> = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let traced: Vec<usize> = (0..nq).filter(|q| !keep.contains(q)).collect();
        let kd = 1usize << keep.len();
        let td = 1usize << traced.len();
        let place = |sub: usize, qubits: &[usize]| {
            qubits.iter().enumerate().fold(0usize, |acc, (k, &q)| {
                let bit = (sub >> (qubits.len() - 1 - k)) & 1;
                acc | bit << (nq - 1 - q)
            })
        };
        let mut out = DMatrix::zeros(kd, kd);
        for t in 0..td {
            let toff = place(t, &traced);
            for r in 0..kd {
                let ri = place(r, &keep) | toff;
                for c in 0..kd {
                    out[(r, c)] += self.data[(ri, place(c, &keep) | toff)];
                }
            }
        }
        Ok(Self { data: out })
    }

    /// Random full-rank state `G G^dagger / tr` from a complex Ginibre matrix.
    pub fn random<R: Rng>(num_qubits: usize, rng: &mut R) -> Self {
        let d = 1usize << num_qubits;
        let g = DMatrix::from_fn(d, d, |_, _| Complex64::new(gaussian(rng), gaussian(rng)));
        let m = &g * g.adjoint();
        let tr = m.trace();
        Self { data: m / tr }
    }

    /// Random pure state `|v><v|` with `v` Haar-distributed.
    pub fn random_pure<R: Rng>(num_qubits: usize, rng: &mut R) -> (DVector<Complex64>, Self) {
        let d = 1usize << num_qubits;
        let v = DVector::from_fn(d, |_, _| Complex64::new(gaussian(rng), gaussian(rng)));
        let v = &v / Complex64::new(v.norm(), 0.0);
        let rho = &v * v.adjoint();
        (v, Self { data: rho })
    }
}

fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Bell-basis diagonal of a two-qubit state; off-diagonal terms are dropped.
pub fn pauli_twirl_dense(rho: &DensityMatrix) -> Result<BellDiagonalState> {
    if rho.dim() != 4 {
        return Err(Error::InvalidDensity(format!("expected dimension 4, got {}", rho.dim())));
    }
    let probs = bell_vectors().map(|v| (v.adjoint() * &rho.data * &v)[(0, 0)].re);
    Ok(BellDiagonalState::normalized(probs.map(|p| p.clamp(0.0, 1.0))))
}

/// Dense `(x)_i rho_i` over pairs, in `A1 B1 ... An Bn` order.
pub fn dense_product(inputs: &[BellDiagonalState]) -> Result<DensityMatrix> {
    if inputs.is_empty() {
        return Err(Error::EmptyInputs);
    }
    if inputs.len() > 5 {
        return Err(Error::QubitCount { n: inputs.len(), min: 1, max: 5 });
    }
    let mut it = inputs.iter().map(BellDiagonalState::to_density);
    let first = it.next().unwrap();
    Ok(it.fold(first, |acc, d| acc.kron(&d)))
}
