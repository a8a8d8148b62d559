//! Choi operator of the PPT universal protocol
//!
//! `J_n = phi2^{(x)(n+1)} + (phi2_perp)^{(x)(n+1)} / 3`, with `phi2_perp = I - phi2`
//! and subsystems ordered `A1 B1 ... An Bn Ahat Bhat`. Writing
//! `phi2 = (II + XX - YY + ZZ)/4` and `phi2_perp = (3II - XX + YY - ZZ)/4`,
//! the operator is a sum of `Q (x) Q` terms only, and every quantity below
//! factorizes over slots. Dense matrices exist as an oracle for `n <= 4`.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{block_ranges, map_blocks, Exec};
use crate::pauli::{Pauli, PauliString};

/// Largest `n` for the coefficient representation.
pub const MAX_COEFF_N: usize = 8;
/// Largest `n` for dense materialization (`4^(n+1)` rows).
pub const MAX_DENSE_N: usize = 4;
/// Largest `n` swept string by string; beyond this the sum is bucketed.
pub const MAX_SWEEP_N: usize = 9;
/// Absolute tolerance for deciding equality with the separability bound.
pub const SATURATION_TOL: f64 = 1e-9;

/// Per-slot coefficients of `4 phi2` and `4 phi2_perp` in `(I, X, Y, Z)` order.
const A: [i64; 4] = [1, 1, -1, 1];
const B: [i64; 4] = [3, -1, 1, -1];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChoiOperator {
    n: usize,
}

pub fn build_choi(n: usize) -> Result<ChoiOperator> {
    if !(1..=MAX_COEFF_N).contains(&n) {
        return Err(Error::QubitCount { n, min: 1, max: MAX_COEFF_N });
    }
    Ok(ChoiOperator { n })
}

impl ChoiOperator {
    pub fn num_pairs(&self) -> usize {
        self.n
    }

    /// Slots in the coefficient string (`n + 1`).
    pub fn num_slots(&self) -> usize {
        self.n + 1
    }

    /// Unnormalized coefficient of `Q (x) Q` for a string `Q` on `n + 1` slots.
    /// Strings that are not of this diagonal form have coefficient zero.
    pub fn coefficient(&self, q: &PauliString) -> Result<f64> {
        if q.num_qubits() != self.num_slots() {
            return Err(Error::LengthMismatch { left: q.num_qubits(), right: self.num_slots() });
        }
        let (a, b) = q.paulis().iter().fold((1i64, 1i64), |(a, b), p| (a * A[p.index()], b * B[p.index()]));
        Ok((a as f64 + b as f64 / 3.0) / 4f64.powi(self.num_slots() as i32))
    }

    /// `Tr J_n = 1 + 3^n`.
    pub fn trace(&self) -> f64 {
        1.0 + 3f64.powi(self.n as i32)
    }

    /// Dense unnormalized `J_n`; real symmetric of size `4^(n+1)`.
    pub fn dense(&self) -> Result<DMatrix<f64>> {
        if self.n > MAX_DENSE_N {
            return Err(Error::QubitCount { n: self.n, min: 1, max: MAX_DENSE_N });
        }
        let h = 0.5;
        let phi = DMatrix::from_row_slice(4, 4, &[h, 0., 0., h, 0., 0., 0., 0., 0., 0., 0., 0., h, 0., 0., h]);
        let perp = DMatrix::identity(4, 4) - &phi;
        let pow = |m: &DMatrix<f64>| (0..self.n).fold(m.clone(), |acc, _| acc.kronecker(m));
        Ok(pow(&phi) + pow(&perp) / 3.0)
    }

    /// Dense `J_n / Tr J_n`.
    pub fn dense_normalized(&self) -> Result<DMatrix<f64>> {
        Ok(self.dense()? / self.trace())
    }
}

/// One eigenvalue family of the partial transpose: `k` antisymmetric slots.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PtEigenvalue {
    pub antisymmetric_slots: usize,
    pub value: f64,
    pub multiplicity: u64,
}

/// Spectrum of `J_n^{T_B}` from the projector expansion
/// `[(P_s - P_a)^{(x)(n+1)} + (P_s + 3 P_a)^{(x)(n+1)} / 3] / 2^(n+1)`.
pub fn pt_spectrum(j: &ChoiOperator) -> Vec<PtEigenvalue> {
    let slots = j.num_slots();
    (0..=slots)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            // 3^(k-1) without going through 1/3 so the k = 1 term cancels exactly.
            let pow = if k == 0 { 1.0 / 3.0 } else { 3f64.powi(k as i32 - 1) };
            PtEigenvalue {
                antisymmetric_slots: k,
                value: (sign + pow) / 2f64.powi(slots as i32),
                multiplicity: binomial(slots as u64, k as u64) * 3u64.pow((slots - k) as u32),
            }
        })
        .collect()
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Minimum eigenvalue of the partial transpose (coefficient path).
pub fn ppt_min_eigenvalue(j: &ChoiOperator) -> f64 {
    pt_spectrum(j).iter().map(|e| e.value).fold(f64::INFINITY, f64::min)
}

/// Partial transpose over every `B` qubit of a dense operator in `A1 B1 ...` order.
pub fn partial_transpose_b(m: &DMatrix<f64>, pairs: usize) -> DMatrix<f64> {
    let b_mask: usize = (0..pairs).map(|p| 1usize << (2 * (pairs - 1 - p))).sum();
    DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| {
        let r2 = (r & !b_mask) | (c & b_mask);
        let c2 = (c & !b_mask) | (r & b_mask);
        m[(r2, c2)]
    })
}

/// Sorted eigenvalues of the dense partial transpose.
pub fn ppt_spectrum_dense(j: &ChoiOperator) -> Result<Vec<f64>> {
    let pt = partial_transpose_b(&j.dense()?, j.num_slots());
    let mut ev: Vec<f64> = SymmetricEigen::new(pt).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

pub fn ppt_min_eigenvalue_dense(j: &ChoiOperator) -> Result<f64> {
    Ok(ppt_spectrum_dense(j)?[0])
}

/// Contribution class of a coefficient string.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tally {
    pub identities: usize,
    pub y_odd: bool,
    pub xz_odd: bool,
    pub count: u128,
    /// Sum of `|T_ii|` over the class.
    pub contribution: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochCorrelationSummary {
    pub n: usize,
    pub t_norm: f64,
    pub closed_form: f64,
    pub bound: f64,
    /// `t_norm - bound`.
    pub margin: f64,
    pub violated: bool,
    pub saturated: bool,
    pub tallies: Vec<Tally>,
}

/// `3 (3^n + 1) / 2^n * |T_ii|` as an exact integer.
fn scaled_entry(identities: u32, ys: u32, xzs: u32) -> u128 {
    let a: i128 = if ys.is_multiple_of(2) { 3 } else { -3 };
    let b: i128 = 3i128.pow(identities) * if xzs.is_multiple_of(2) { 1 } else { -1 };
    (a + b).unsigned_abs()
}

fn scale(n: usize) -> f64 {
    2f64.powi(n as i32) / (3.0 * (3f64.powi(n as i32) + 1.0))
}

fn check_tnorm_n(n: usize) -> Result<()> {
    // 3^(n+1) * 4^(n+1) has to fit the u128 accumulators.
    if !(1..=30).contains(&n) {
        return Err(Error::QubitCount { n, min: 1, max: 30 });
    }
    Ok(())
}

/// Classes keyed by `(#I, #Y odd, #X+#Z odd)` in a fixed order.
fn tally_index(identities: usize, y_odd: bool, xz_odd: bool) -> usize {
    identities * 4 + (y_odd as usize) * 2 + xz_odd as usize
}

fn empty_tallies(slots: usize) -> Vec<(u128, u128)> {
    vec![(0, 0); (slots + 1) * 4]
}

fn finish_tallies(n: usize, raw: Vec<(u128, u128)>) -> Vec<Tally> {
    raw.into_iter()
        .enumerate()
        .filter(|(_, (count, _))| *count > 0)
        .map(|(i, (count, sum))| Tally {
            identities: i / 4,
            y_odd: (i / 2) % 2 == 1,
            xz_odd: i % 2 == 1,
            count,
            contribution: sum as f64 * scale(n),
        })
        .collect()
}

/// `||T||_1` by summing `|T_ii|` over every non-identity string on `n + 1`
/// slots (`n <= 9`), or over multinomial buckets for larger `n`.
pub fn t_norm_bruteforce(n: usize) -> Result<BlochCorrelationSummary> {
    t_norm_bruteforce_with(n, Exec::default())
}

pub fn t_norm_bruteforce_with(n: usize, exec: Exec) -> Result<BlochCorrelationSummary> {
    check_tnorm_n(n)?;
    let slots = n + 1;
    let raw = if n <= MAX_SWEEP_N { sweep(slots, exec) } else { buckets(slots) };
    let total: u128 = raw.iter().map(|(_, s)| s).sum();
    Ok(summary(n, total as f64 * scale(n), finish_tallies(n, raw)))
}

fn sweep(slots: usize, exec: Exec) -> Vec<(u128, u128)> {
    let ranges = block_ranges(1u64 << (2 * slots), 1 << 14);
    let partials = map_blocks(exec, ranges.len(), |b| {
        let (lo, hi) = ranges[b];
        let mut acc = empty_tallies(slots);
        for idx in lo.max(1)..hi {
            let q = PauliString::from_index(slots, idx);
            let (ni, ny) = (q.count(Pauli::I), q.count(Pauli::Y));
            let nxz = q.count(Pauli::X) + q.count(Pauli::Z);
            let t = &mut acc[tally_index(ni as usize, ny % 2 == 1, nxz % 2 == 1)];
            t.0 += 1;
            t.1 += scaled_entry(ni, ny, nxz);
        }
        acc
    });
    partials.into_iter().fold(empty_tallies(slots), |mut acc, p| {
        for (a, b) in acc.iter_mut().zip(p) {
            a.0 += b.0;
            a.1 += b.1;
        }
        acc
    })
}

fn buckets(slots: usize) -> Vec<(u128, u128)> {
    let mut acc = empty_tallies(slots);
    let choose = |n: usize, k: usize| (0..k).fold(1u128, |a, i| a * (n - i) as u128 / (i + 1) as u128);
    for ni in 0..=slots {
        for ny in 0..=slots - ni {
            let nxz = slots - ni - ny;
            if ni == slots {
                continue;
            }
            let count = choose(slots, ni) * choose(slots - ni, ny) * (1u128 << nxz);
            let t = &mut acc[tally_index(ni, ny % 2 == 1, nxz % 2 == 1)];
            t.0 += count;
            t.1 += count * scaled_entry(ni as u32, ny as u32, nxz as u32);
        }
    }
    acc
}

/// Closed forms: even `n` gives `[2^(2n+1)(3^n-1) + 2^n(3^(n+1)-1)]/(3^n+1)`,
/// odd `n` gives `2^n (2^(n+1) - 1)`.
pub fn t_norm_closed_form(n: usize) -> f64 {
    let p2 = 2f64.powi(n as i32);
    let p3 = 3f64.powi(n as i32);
    if n.is_multiple_of(2) {
        (2.0 * p2 * p2 * (p3 - 1.0) + p2 * (3.0 * p3 - 1.0)) / (p3 + 1.0)
    } else {
        p2 * (2.0 * p2 - 1.0)
    }
}

/// Separability bound `2^n (2^(n+1) - 1)` on `||T||_1`.
pub fn separability_bound(n: usize) -> f64 {
    let p2 = 2f64.powi(n as i32);
    p2 * (2.0 * p2 - 1.0)
}

/// Even-`n` excess over the bound: `2^(n+2)(3^n - 2^n)/(3^n + 1)`.
pub fn even_violation_margin(n: usize) -> f64 {
    let p2 = 2f64.powi(n as i32);
    let p3 = 3f64.powi(n as i32);
    4.0 * p2 * (p3 - p2) / (p3 + 1.0)
}

fn summary(n: usize, t_norm: f64, tallies: Vec<Tally>) -> BlochCorrelationSummary {
    let bound = separability_bound(n);
    let margin = t_norm - bound;
    BlochCorrelationSummary {
        n,
        t_norm,
        closed_form: t_norm_closed_form(n),
        bound,
        margin,
        violated: margin > SATURATION_TOL,
        saturated: margin.abs() <= SATURATION_TOL,
        tallies,
    }
}

pub fn separability_verdict(n: usize) -> Result<BlochCorrelationSummary> {
    t_norm_bruteforce(n)
}

/// Expectations `Tr(rho X^x Z^z)` for every `(x, z)`, indexed `[x][z]`.
fn xz_expectations(rho: &DMatrix<f64>) -> Vec<Vec<f64>> {
    let d = rho.nrows();
    (0..d)
        .map(|x| {
            let mut v: Vec<f64> = (0..d).map(|r| rho[(r, r ^ x)]).collect();
            // Walsh-Hadamard over r turns v into sum_r (-1)^{z.r} v[r].
            let mut h = 1;
            while h < d {
                for i in (0..d).step_by(2 * h) {
                    for j in i..i + h {
                        let (a, b) = (v[j], v[j + h]);
                        v[j] = a + b;
                        v[j + h] = a - b;
                    }
                }
                h *= 2;
            }
            v
        })
        .collect()
}

/// The correlation block of normalized `J_n` in the basis
/// `lambda = 2^(-n/2) Q` for non-identity strings `Q` on each side.
pub fn dense_t_matrix(j: &ChoiOperator) -> Result<DMatrix<f64>> {
    let rho = j.dense_normalized()?;
    let slots = j.num_slots();
    let nq = 2 * slots;
    let ex = xz_expectations(&rho);
    // Interleave side bits: slot s of side `side` is qubit 2s + side, bit nq-1-(2s+side).
    let spread = |bits: u64, side: usize| -> usize {
        (0..slots).map(|s| (((bits >> s) & 1) as usize) << (nq - 1 - (2 * s + side))).sum()
    };
    let side_count = (1usize << (2 * slots)) - 1;
    let scale = 2f64.powi(j.num_pairs() as i32);
    let value = |qa: &PauliString, qb: &PauliString| {
        let x = spread(qa.x_bits() as u64, 0) | spread(qb.x_bits() as u64, 1);
        let z = spread(qa.z_bits() as u64, 0) | spread(qb.z_bits() as u64, 1);
        // Q = i^{#Y} X^x Z^z and the expectation of a Hermitian Q is real.
        let ys = qa.count(Pauli::Y) + qb.count(Pauli::Y);
        let e = ex[x][z];
        let re = match ys % 4 {
            0 => e,
            2 => -e,
            _ => 0.0,
        };
        scale * re
    };
    let strings: Vec<PauliString> = (1..=side_count as u64).map(|i| PauliString::from_index(slots, i)).collect();
    Ok(DMatrix::from_fn(side_count, side_count, |r, c| value(&strings[r], &strings[c])))
}

/// `||T||_1` as a singular-value sum of the dense correlation block.
pub fn t_norm_dense(j: &ChoiOperator) -> Result<f64> {
    Ok(dense_t_matrix(j)?.singular_values().sum())
}

/// `max |rho_A - I/2^(n+1)|` and the same for `rho_B`, entrywise.
pub fn marginal_deviation(j: &ChoiOperator) -> Result<(f64, f64)> {
    let rho = j.dense_normalized()?;
    let slots = j.num_slots();
    let side_dim = 1usize << slots;
    let target = 1.0 / side_dim as f64;
    let compose = |a: usize, b: usize| -> usize {
        (0..slots)
            .map(|s| {
                let ab = ((a >> (slots - 1 - s)) & 1) << 1 | ((b >> (slots - 1 - s)) & 1);
                ab << (2 * (slots - 1 - s))
            })
            .sum()
    };
    let mut dev = (0.0f64, 0.0f64);
    for u in 0..side_dim {
        for v in 0..side_dim {
            let (mut ma, mut mb) = (0.0, 0.0);
            for w in 0..side_dim {
                ma += rho[(compose(u, w), compose(v, w))];
                mb += rho[(compose(w, u), compose(w, v))];
            }
            let t = if u == v { target } else { 0.0 };
            dev.0 = dev.0.max((ma - t).abs());
            dev.1 = dev.1.max((mb - t).abs());
        }
    }
    Ok(dev)
}

fn check_fidelities(fidelities: &[f64]) -> Result<()> {
    if fidelities.is_empty() {
        return Err(Error::EmptyInputs);
    }
    for &f in fidelities {
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::FidelityRange(f));
        }
    }
    Ok(())
}

/// Successful output fidelity of the PPT protocol, folded pair by pair as an
/// odds product: each new input multiplies the odds `f/(1-f)` by `F/(1-F)`.
pub fn ppt_output_fidelity(fidelities: &[f64]) -> Result<f64> {
    check_fidelities(fidelities)?;
    let mut f = fidelities[0];
    for &g in &fidelities[1..] {
        let yes = f * g;
        let no = (1.0 - f) * (1.0 - g);
        if yes + no == 0.0 {
            return Err(Error::Indeterminate);
        }
        f = yes / (yes + no);
    }
    Ok(f)
}

/// `F'(F) - F_j` in the factored form
/// `F_j (1 - F_j)(prod_{i!=j} F_i - prod_{i!=j}(1 - F_i)) / (prod F + prod(1 - F))`.
/// `j` is a 0-based index.
pub fn universality_margin(fidelities: &[f64], j: usize) -> Result<f64> {
    check_fidelities(fidelities)?;
    if j >= fidelities.len() {
        return Err(Error::SlotOutOfRange { slot: j, n: fidelities.len() });
    }
    if let Some(&f) = fidelities.iter().find(|&&f| f < 0.5) {
        return Err(Error::Precondition(format!("fidelity {f} is below 1/2")));
    }
    let fj = fidelities[j];
    let (mut good, mut bad) = (1.0, 1.0);
    for (i, &f) in fidelities.iter().enumerate() {
        if i != j {
            good *= f;
            bad *= 1.0 - f;
        }
    }
    let denom = fj * good + (1.0 - fj) * bad;
    if denom == 0.0 {
        return Err(Error::Indeterminate);
    }
    Ok(fj * (1.0 - fj) * (good - bad) / denom)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub samples: usize,
    pub max_n: usize,
    pub lower: f64,
    pub seed: u64,
    /// Smallest `F' - max F` seen.
    pub min_margin: f64,
    /// Samples with `F' < max F - 1e-12`.
    pub violations: usize,
    /// Largest change from appending a `1/2` input.
    pub max_neutral_deviation: f64,
}

/// Random tuples with `n` uniform in `1..=max_n` and each fidelity uniform in `[lower, 1]`.
pub fn monotonicity_sweep(samples: usize, max_n: usize, lower: f64, seed: u64) -> Result<MonotonicityReport> {
    if max_n == 0 || !(0.0..1.0).contains(&lower) {
        return Err(Error::Precondition("need max_n >= 1 and lower in [0, 1)".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = MonotonicityReport {
        samples,
        max_n,
        lower,
        seed,
        min_margin: f64::INFINITY,
        violations: 0,
        max_neutral_deviation: 0.0,
    };
    for _ in 0..samples {
        let n = rng.gen_range(1..=max_n);
        let fs: Vec<f64> = (0..n).map(|_| rng.gen_range(lower..=1.0)).collect();
        let Ok(out) = ppt_output_fidelity(&fs) else { continue };
        let best = fs.iter().copied().fold(0.0, f64::max);
        let margin = out - best;
        report.min_margin = report.min_margin.min(margin);
        if margin < -1e-12 {
            report.violations += 1;
        }
        let mut padded = fs.clone();
        padded.push(0.5);
        if let Ok(p) = ppt_output_fidelity(&padded) {
            report.max_neutral_deviation = report.max_neutral_deviation.max((p - out).abs());
        }
    }
    Ok(report)
}

/// One row of the `choi tnorm` table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TnormRow {
    pub n: usize,
    pub brute: f64,
    pub closed: f64,
    pub bound: f64,
    pub margin: f64,
    pub violated: bool,
    pub saturated: bool,
    pub ppt_min_eig: Option<f64>,
}

pub fn tnorm_table(n_max: usize, exec: Exec) -> Result<Vec<TnormRow>> {
    (1..=n_max)
        .map(|n| {
            let s = t_norm_bruteforce_with(n, exec)?;
            Ok(TnormRow {
                n,
                brute: s.t_norm,
                closed: s.closed_form,
                bound: s.bound,
                margin: s.margin,
                violated: s.violated,
                saturated: s.saturated,
                ppt_min_eig: build_choi(n).ok().map(|j| ppt_min_eigenvalue(&j)),
            })
        })
        .collect()
}
