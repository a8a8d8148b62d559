//! n-to-1 bilocal Clifford purification (Alice applies `C`, Bob `C*`, pairs
//! `1..n-1` are measured and kept on equal parity).
//!
//! Two independent simulators live here. [`simulate_pauli_path`] pushes every
//! Pauli error string through the tableau and routes its weight by the
//! image's class. [`simulate_dense`] builds the full density matrix, applies
//! the circuit unitaries and projects; it shares nothing with the first path
//! beyond the gate list.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clifford::{CliffordTableau, Gate, GateSequence};
use crate::error::{Error, Result};
use crate::exec::{block_ranges, map_blocks, Exec};
use crate::pauli::{Pauli, PauliString, StringClass, StringKind};
use crate::states::{pauli_twirl_dense, BellDiagonalState, DensityMatrix, WeightTable};

/// Where the input weight ends up, split by whether the source string left
/// the kept slot clean (`t1`, source slot 0 is `I`) or not (`t2`).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Breakdown {
    pub correct_t1: f64,
    pub correct_t2: f64,
    pub undetectable_t1: f64,
    pub undetectable_t2: f64,
    pub incorrect: f64,
    /// Successful weight by the Pauli left on the kept pair, `(I, X, Y, Z)`.
    pub by_output: [f64; 4],
}

impl Breakdown {
    pub fn correct(&self) -> f64 {
        self.correct_t1 + self.correct_t2
    }

    pub fn undetectable(&self) -> f64 {
        self.undetectable_t1 + self.undetectable_t2
    }

    pub fn success(&self) -> f64 {
        self.correct() + self.undetectable()
    }

    pub fn total(&self) -> f64 {
        self.success() + self.incorrect
    }

    fn add(&mut self, source: &PauliString, image: &PauliString, w: f64) {
        let class = StringClass::of_unchecked(image);
        let t1 = source.get(0) == Pauli::I;
        match class.kind {
            StringKind::Correct if t1 => self.correct_t1 += w,
            StringKind::Correct => self.correct_t2 += w,
            StringKind::Undetectable if t1 => self.undetectable_t1 += w,
            StringKind::Undetectable => self.undetectable_t2 += w,
            StringKind::Incorrect => self.incorrect += w,
        }
        if class.succeeds() {
            self.by_output[image.get(0).index()] += w;
        }
    }

    fn merge(&mut self, other: &Self) {
        self.correct_t1 += other.correct_t1;
        self.correct_t2 += other.correct_t2;
        self.undetectable_t1 += other.undetectable_t1;
        self.undetectable_t2 += other.undetectable_t2;
        self.incorrect += other.incorrect;
        for k in 0..4 {
            self.by_output[k] += other.by_output[k];
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolOutcome {
    pub success_prob: f64,
    /// Kept-pair state conditioned on success.
    pub output_state: BellDiagonalState,
    pub output_fidelity: f64,
    /// Present for the Pauli-path simulator only.
    pub breakdown: Option<Breakdown>,
}

const BLOCK: u64 = 4096;

/// Whether `c` hands the assisting pairs (slots `n..`) back unchanged: every
/// error on the first `n` slots must map to a string that is `I` there.
/// Checking the `2n` generator images is enough.
pub fn preserves_assistance(c: &CliffordTableau, n: usize) -> bool {
    let inner = crate::pauli::low_mask(n);
    (0..n.min(c.num_qubits())).all(|i| {
        [c.x_image(i), c.z_image(i)].iter().all(|p| (p.x_bits() | p.z_bits()) & !inner == 0)
    })
}

pub(crate) fn check_assistance(c: &CliffordTableau, n: usize, assist: usize) -> Result<()> {
    if assist > 0 && !preserves_assistance(c, n) {
        return Err(Error::Precondition("the Clifford does not return the assisting pairs unchanged".into()));
    }
    Ok(())
}

fn check_sizes(c: &CliffordTableau, inputs: &[BellDiagonalState], assist: usize) -> Result<()> {
    if inputs.is_empty() {
        return Err(Error::EmptyInputs);
    }
    let total = inputs.len() + assist;
    if c.num_qubits() != total {
        return Err(Error::LengthMismatch { left: c.num_qubits(), right: total });
    }
    if total < 2 {
        return Err(Error::QubitCount { n: total, min: 2, max: crate::pauli::MAX_QUBITS });
    }
    if inputs.len() > 10 {
        return Err(Error::QubitCount { n: inputs.len(), min: 1, max: 10 });
    }
    check_assistance(c, inputs.len(), assist)
}

/// Runs the Pauli-path simulation with the default execution policy.
pub fn simulate_pauli_path(
    c: &CliffordTableau,
    inputs: &[BellDiagonalState],
    assist: usize,
) -> Result<ProtocolOutcome> {
    simulate_pauli_path_with(c, inputs, assist, Exec::default())
}

/// Exact enumeration over all `4^n` error strings on the input pairs; the
/// `assist` trailing slots carry perfect pairs, are identity-padded and must
/// come back unchanged.
pub fn simulate_pauli_path_with(
    c: &CliffordTableau,
    inputs: &[BellDiagonalState],
    assist: usize,
    exec: Exec,
) -> Result<ProtocolOutcome> {
    let breakdown = decompose(c, inputs, assist, exec)?;
    outcome_from_breakdown(breakdown)
}

/// The per-class weight sums of the output decomposition.
pub fn output_lemma_decomposition(
    c: &CliffordTableau,
    inputs: &[BellDiagonalState],
    assist: usize,
) -> Result<Breakdown> {
    decompose(c, inputs, assist, Exec::default())
}

fn decompose(c: &CliffordTableau, inputs: &[BellDiagonalState], assist: usize, exec: Exec) -> Result<Breakdown> {
    check_sizes(c, inputs, assist)?;
    let n = inputs.len();
    let total = c.num_qubits();
    let weights = WeightTable::new(inputs)?;
    let mask = (1u64 << n) - 1;
    let ranges = block_ranges(1u64 << (2 * n), BLOCK);
    let partials = map_blocks(exec, ranges.len(), |b| {
        let (lo, hi) = ranges[b];
        let mut acc = Breakdown::default();
        for idx in lo..hi {
            let source = PauliString::from_bits_unchecked(total, (idx & mask) as u32, (idx >> n & mask) as u32);
            let w = weights.weight(&source);
            if w == 0.0 {
                continue;
            }
            acc.add(&source, &c.conjugate_unchecked(&source), w);
        }
        acc
    });
    Ok(partials.iter().fold(Breakdown::default(), |mut acc, p| {
        acc.merge(p);
        acc
    }))
}

fn outcome_from_breakdown(b: Breakdown) -> Result<ProtocolOutcome> {
    let success = b.success();
    if success <= 0.0 {
        return Err(Error::ZeroSuccess);
    }
    let probs = b.by_output.map(|w| (w / success).clamp(0.0, 1.0));
    let output_state = renormalize(probs)?;
    Ok(ProtocolOutcome {
        success_prob: success,
        output_fidelity: output_state.fidelity(),
        output_state,
        breakdown: Some(b),
    })
}

fn renormalize(probs: [f64; 4]) -> Result<BellDiagonalState> {
    let s: f64 = probs.iter().sum();
    BellDiagonalState::new(probs.map(|p| p / s))
        .or_else(|_| BellDiagonalState::new([1.0 - probs[1..].iter().sum::<f64>() / s, probs[1] / s, probs[2] / s, probs[3] / s]))
}

/// The 2-to-1 CNOT protocol on `(s1, s2)`, keeping the first pair.
pub fn dejmps_outcome(s1: &BellDiagonalState, s2: &BellDiagonalState) -> Result<ProtocolOutcome> {
    let cx = CliffordTableau::from_gates(2, &GateSequence::new(vec![Gate::Cx(0, 1)]))?;
    simulate_pauli_path(&cx, &[*s1, *s2], 0)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `2^n x 2^n` unitary of a single gate, slot 0 = most significant bit.
fn gate_matrix(g: &Gate, n: usize) -> DMatrix<Complex64> {
    let d = 1usize << n;
    let bit = |q: usize| n - 1 - q;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = DMatrix::zeros(d, d);
    for col in 0..d {
        match *g {
            Gate::H(q) | Gate::S(q) | Gate::X(q) | Gate::Y(q) | Gate::Z(q) => {
                let u = match g {
                    Gate::H(_) => [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
                    Gate::S(_) => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 1.0)]],
                    Gate::X(_) => [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
                    Gate::Y(_) => [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]],
                    _ => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]],
                };
                let b = (col >> bit(q)) & 1;
                for (out, amp) in u.iter().enumerate() {
                    let row = (col & !(1 << bit(q))) | out << bit(q);
                    m[(row, col)] += amp[b];
                }
            }
            Gate::Cx(ctl, t) => {
                let row = if (col >> bit(ctl)) & 1 == 1 { col ^ 1 << bit(t) } else { col };
                m[(row, col)] = c(1.0, 0.0);
            }
            Gate::Cz(a, b) => {
                let sign = if (col >> bit(a)) & (col >> bit(b)) & 1 == 1 { -1.0 } else { 1.0 };
                m[(col, col)] = c(sign, 0.0);
            }
        }
    }
    m
}

/// Unitary of a gate sequence on `n` qubits.
pub fn circuit_unitary(gates: &GateSequence, n: usize) -> Result<DMatrix<Complex64>> {
    gates.validate(n)?;
    let d = 1usize << n;
    Ok(gates.gates.iter().fold(DMatrix::identity(d, d), |u, g| gate_matrix(g, n) * u))
}

/// Density-matrix simulation with arbitrary two-qubit inputs (`n <= 3` pairs).
///
/// The register is ordered `A1 B1 ... An Bn`; Alice's qubits get `U`, Bob's
/// get the entrywise conjugate `U*`. Every measured pair is projected onto
/// `span{|00>, |11>}` and traced out; the kept pair is renormalised.
pub fn simulate_dense(gates: &GateSequence, inputs: &[DensityMatrix]) -> Result<ProtocolOutcome> {
    let n = inputs.len();
    if n == 0 {
        return Err(Error::EmptyInputs);
    }
    if !(2..=3).contains(&n) {
        return Err(Error::QubitCount { n, min: 2, max: 3 });
    }
    for rho in inputs {
        if rho.dim() != 4 {
            return Err(Error::InvalidDensity(format!("expected a two-qubit input, got dimension {}", rho.dim())));
        }
        rho.validate()?;
    }
    let u = circuit_unitary(gates, n)?;
    let nq = 2 * n;
    let dim = 1usize << nq;
    let split = |r: usize| {
        let (mut a, mut b) = (0usize, 0usize);
        for i in 0..n {
            a |= ((r >> (nq - 1 - 2 * i)) & 1) << (n - 1 - i);
            b |= ((r >> (nq - 2 - 2 * i)) & 1) << (n - 1 - i);
        }
        (a, b)
    };
    let parts: Vec<(usize, usize)> = (0..dim).map(split).collect();
    let full = DMatrix::from_fn(dim, dim, |r, col| {
        let ((ar, br), (ac, bc)) = (parts[r], parts[col]);
        u[(ar, ac)] * u[(br, bc)].conj()
    });
    let rho = inputs[1..].iter().fold(inputs[0].clone(), |acc, r| acc.kron(r));
    let evolved = &full * rho.matrix() * full.adjoint();

    let rest_bits = nq - 2;
    let equal_parity = |m: usize| (1..n).all(|i| {
        let a = (m >> (rest_bits - 1 - 2 * (i - 1))) & 1;
        let b = (m >> (rest_bits - 2 - 2 * (i - 1))) & 1;
        a == b
    });
    let mut kept = DMatrix::<Complex64>::zeros(4, 4);
    for m in (0..1usize << rest_bits).filter(|&m| equal_parity(m)) {
        for k in 0..4 {
            for k2 in 0..4 {
                kept[(k, k2)] += evolved[(k << rest_bits | m, k2 << rest_bits | m)];
            }
        }
    }
    let success = kept.trace().re;
    if success <= 0.0 {
        return Err(Error::ZeroSuccess);
    }
    let output_state = pauli_twirl_dense(&DensityMatrix::from_raw(kept / c(success, 0.0)))?;
    Ok(ProtocolOutcome { success_prob: success, output_fidelity: output_state.fidelity(), output_state, breakdown: None })
}

/// Dense simulation of Bell-diagonal inputs.
pub fn simulate_dense_bds(gates: &GateSequence, inputs: &[BellDiagonalState]) -> Result<ProtocolOutcome> {
    let dense: Vec<DensityMatrix> = inputs.iter().map(BellDiagonalState::to_density).collect();
    simulate_dense(gates, &dense)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{random_clifford, random_gate_sequence};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn iso(f: f64) -> BellDiagonalState {
        BellDiagonalState::isotropic(f).unwrap()
    }

    fn cx() -> CliffordTableau {
        CliffordTableau::from_gates(2, &"CX 0 1".parse().unwrap()).unwrap()
    }

    // Reference values from a hand-written 16-row table of the CNOT image of
    // every error string (see `cnot_reference` below).
    fn cnot_reference(f1: f64, f2: f64) -> (f64, f64) {
        let image = |s: &str| -> &'static str {
            match s {
                "II" => "II", "IX" => "IX", "IY" => "ZY", "IZ" => "ZZ",
                "XI" => "XX", "XX" => "XI", "XY" => "YZ", "XZ" => "YY",
                "YI" => "YX", "YX" => "YI", "YY" => "XZ", "YZ" => "XY",
                "ZI" => "ZI", "ZX" => "ZX", "ZY" => "IY", "ZZ" => "IZ",
                _ => unreachable!(),
            }
        };
        let p = |f: f64, ch: char| if ch == 'I' { f } else { (1.0 - f) / 3.0 };
        let (mut good, mut succ) = (0.0, 0.0);
        for a in ['I', 'X', 'Y', 'Z'] {
            for b in ['I', 'X', 'Y', 'Z'] {
                let src = format!("{a}{b}");
                let img: Vec<char> = image(&src).chars().collect();
                let w = p(f1, a) * p(f2, b);
                if img[1] == 'I' || img[1] == 'Z' {
                    succ += w;
                    if img[0] == 'I' {
                        good += w;
                    }
                }
            }
        }
        (succ, good / succ)
    }

    #[test]
    fn reference_table_agrees_with_tableau() {
        let t = cx();
        for s in crate::pauli::all_strings(2) {
            let _ = t.conjugate(&s).unwrap();
        }
        let (succ, fid) = cnot_reference(0.9, 0.85);
        let out = simulate_pauli_path(&t, &[iso(0.9), iso(0.85)], 0).unwrap();
        assert!((out.success_prob - succ).abs() < 1e-15);
        assert!((out.output_fidelity - fid).abs() < 1e-15);
    }

    #[test]
    fn dejmps_worked_numbers() {
        let a = dejmps_outcome(&iso(0.9), &iso(0.85)).unwrap();
        assert!((a.output_fidelity - 0.9055).abs() < 5e-4, "{}", a.output_fidelity);
        let b = dejmps_outcome(&iso(0.9), &iso(0.83)).unwrap();
        assert!((b.output_fidelity - 0.8967).abs() < 5e-4, "{}", b.output_fidelity);
        assert!(a.output_fidelity > 0.9 && b.output_fidelity < 0.9);
    }

    #[test]
    fn lemma_decomposition_for_dejmps() {
        let b = output_lemma_decomposition(&cx(), &[iso(0.9), iso(0.85)], 0).unwrap();
        let e1 = 0.1 / 3.0;
        let e2 = 0.15 / 3.0;
        // Sources landing on kept I with a passing parity: II -> II, ZZ -> IZ.
        let exp_good = 0.9 * 0.85 + e1 * e2;
        // Kept Z: ZI -> ZI, IZ -> ZZ.
        let exp_z = e1 * 0.85 + 0.9 * e2;
        // Kept X: XX -> XI, YY -> XZ.  Kept Y: YX -> YI, XY -> YZ.
        let exp_x = e1 * e2 + e1 * e2;
        let exp_y = e1 * e2 + e1 * e2;
        assert!((b.by_output[0] - exp_good).abs() < 1e-15);
        assert!((b.by_output[3] - exp_z).abs() < 1e-15);
        assert!((b.by_output[1] - exp_x).abs() < 1e-15);
        assert!((b.by_output[2] - exp_y).abs() < 1e-15);
        assert!((b.by_output[0] - 0.76667).abs() < 1e-5);
        assert!((b.by_output[3] - 0.07333).abs() < 1e-5);
        assert!((b.by_output[1] - 0.00333).abs() < 1e-5);
        assert!((b.by_output[2] - 0.00333).abs() < 1e-5);
        assert!((b.success() - b.by_output.iter().sum::<f64>()).abs() < 1e-15);
        assert!((b.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn perfect_inputs_always_succeed() {
        for seed in 0..20 {
            let t = random_clifford(3, seed).unwrap();
            let out = simulate_pauli_path(&t, &[BellDiagonalState::perfect(); 3], 0).unwrap();
            assert_eq!(out.success_prob, 1.0);
            assert_eq!(out.output_fidelity, 1.0);
            let b = out.breakdown.unwrap();
            assert_eq!(b.correct_t1, 1.0);
            assert_eq!(b.undetectable() + b.incorrect + b.correct_t2, 0.0);
        }
    }

    #[test]
    fn half_fidelity_inputs_are_consistent() {
        for seed in 0..10 {
            let t = random_clifford(3, seed).unwrap();
            let out = simulate_pauli_path(&t, &[iso(0.5); 3], 0).unwrap();
            let b = out.breakdown.unwrap();
            assert!((out.success_prob - (b.correct_t1 + b.correct_t2 + b.undetectable())).abs() < 1e-12);
            assert!((out.output_fidelity - b.correct() / out.success_prob).abs() < 1e-12);
        }
    }

    #[test]
    fn size_errors() {
        assert_eq!(simulate_pauli_path(&cx(), &[], 0).unwrap_err(), Error::EmptyInputs);
        assert!(matches!(simulate_pauli_path(&cx(), &[iso(0.9)], 0), Err(Error::LengthMismatch { .. })));
        assert!(matches!(simulate_pauli_path(&cx(), &[iso(0.9)], 1), Err(Error::Precondition(_))));
        let id2 = CliffordTableau::identity(2).unwrap();
        assert!(simulate_pauli_path(&id2, &[iso(0.9)], 1).is_ok());
        let id1 = CliffordTableau::identity(1).unwrap();
        assert!(simulate_pauli_path(&id1, &[iso(0.9)], 0).is_err());
    }

    #[test]
    fn sequential_and_parallel_agree_bitwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let t = random_clifford(7, 3).unwrap();
        let inputs: Vec<_> = (0..7).map(|_| BellDiagonalState::random(&mut rng)).collect();
        let a = simulate_pauli_path_with(&t, &inputs, 0, Exec::Sequential).unwrap();
        let b = simulate_pauli_path_with(&t, &inputs, 0, Exec::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn assistance_preservation() {
        let t = |g: &str| CliffordTableau::from_gates(3, &g.parse().unwrap()).unwrap();
        assert!(preserves_assistance(&t("CX 0 1; H 2; S 2"), 2));
        assert!(!preserves_assistance(&t("CX 1 2"), 2));
        assert!(!preserves_assistance(&t("CX 2 0"), 2));
        // Gates that undo each other leave the assisting pair untouched.
        assert!(preserves_assistance(&t("CX 0 2; H 1; CX 0 2"), 2));
    }

    #[test]
    fn bitflip_inputs_never_lose_fidelity() {
        let s = BellDiagonalState::new([0.7, 0.3, 0.0, 0.0]).unwrap();
        let out = dejmps_outcome(&s, &s).unwrap();
        assert!(out.output_fidelity >= 0.7);
    }

    #[test]
    fn perfect_control_pair_keeps_target_phase_errors() {
        // Z on the target pair is copied back onto the control, so the
        // output is not perfect: F = F2 + pZ2 conditioned on passing parity.
        for f in [0.55, 0.7, 0.95] {
            let out = dejmps_outcome(&BellDiagonalState::perfect(), &iso(f)).unwrap();
            let e = (1.0 - f) / 3.0;
            assert!((out.success_prob - (f + e)).abs() < 1e-15);
            assert!((out.output_fidelity - f / (f + e)).abs() < 1e-15);
            let dense = simulate_dense_bds(&"CX 0 1".parse().unwrap(), &[BellDiagonalState::perfect(), iso(f)]).unwrap();
            assert!((dense.output_fidelity - out.output_fidelity).abs() < 1e-12);
        }
    }

    #[test]
    fn dense_matches_pauli_path_for_dejmps() {
        let gates: GateSequence = "CX 0 1".parse().unwrap();
        let d = simulate_dense_bds(&gates, &[iso(0.9), iso(0.85)]).unwrap();
        let p = dejmps_outcome(&iso(0.9), &iso(0.85)).unwrap();
        assert!((d.success_prob - p.success_prob).abs() < 1e-10);
        assert!((d.output_fidelity - p.output_fidelity).abs() < 1e-10);
    }

    #[test]
    fn identity_circuit_success_is_parity_weight() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let a = BellDiagonalState::random(&mut rng);
            let b = BellDiagonalState::random(&mut rng);
            let out = simulate_dense_bds(&GateSequence::default(), &[a, b]).unwrap();
            let [pi, _, _, pz] = b.probs();
            assert!((out.success_prob - (pi + pz)).abs() < 1e-12);
            assert!((out.output_fidelity - a.fidelity()).abs() < 1e-12);
        }
    }

    #[test]
    fn unitary_matches_tableau_on_paulis() {
        // U P U^dagger must be (up to phase) the dense matrix of the tableau image.
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let pauli_mat = |p: &PauliString| {
            let single = |q: Pauli| -> DMatrix<Complex64> {
                match q {
                    Pauli::I => DMatrix::identity(2, 2),
                    Pauli::X => DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]),
                    Pauli::Y => DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]),
                    Pauli::Z => DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]),
                }
            };
            (1..p.num_qubits()).fold(single(p.get(0)), |acc, i| acc.kronecker(&single(p.get(i))))
        };
        for n in 1..=3 {
            let seq = random_gate_sequence(n, &mut rng);
            let u = circuit_unitary(&seq, n).unwrap();
            let t = CliffordTableau::from_gates(n, &seq).unwrap();
            for s in crate::pauli::all_strings(n) {
                let lhs = &u * pauli_mat(&s) * u.adjoint();
                let rhs = pauli_mat(&t.conjugate(&s).unwrap());
                // lhs = phase * rhs with |phase| = 1
                let phase = (rhs.adjoint() * &lhs).trace() / c((1 << n) as f64, 0.0);
                assert!((phase.norm() - 1.0).abs() < 1e-12, "{s}");
                assert!((lhs - rhs * phase).camax() < 1e-12);
            }
        }
    }

    #[test]
    fn dense_rejects_bad_inputs() {
        let gates = GateSequence::default();
        let one = [BellDiagonalState::perfect().to_density()];
        assert!(simulate_dense(&gates, &one).is_err());
        let four = vec![BellDiagonalState::perfect().to_density(); 4];
        assert!(simulate_dense(&gates, &four).is_err());
        let big = crate::states::dense_product(&[BellDiagonalState::perfect(); 2]).unwrap();
        assert!(simulate_dense(&gates, &[big.clone(), big]).is_err());
    }
}
