//! Universality conditions for biCEP protocols, witnesses for failures, and
//! exhaustive searches over `Sp(2k, 2)` for `k = n + m <= 3`.
//!
//! Searches range over Cliffords modulo Paulis and global phase. Pauli
//! corrections only flip signs of images, so they cannot change any string
//! classification and the quotient loses nothing. With `m > 0` assisting
//! pairs only Cliffords that return those pairs unchanged are protocols;
//! the rest are skipped and counted.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bicep::{check_assistance, preserves_assistance, simulate_pauli_path_with, ProtocolOutcome};
use crate::clifford::{enumerate_symplectic, CliffordTableau};
use crate::error::{Error, Result};
use crate::exec::{map_blocks, Exec};
use crate::pauli::{low_mask, Pauli, PauliString, StringClass, StringKind};
use crate::states::BellDiagonalState;

/// Allowed deviation `|F_out - F_1|` for a protocol to count as trivial.
pub const TRIVIALITY_TOL: f64 = 1e-12;

/// Fidelity used on the non-identity slots of a witness.
pub const WITNESS_FIDELITY: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// Every single-noiseless source must map to a harmless string.
    Full,
    /// Only sources of the form `I (x) P` must map to harmless strings.
    Ordered,
}

impl std::str::FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Ok(Condition::Full),
            "ordered" => Ok(Condition::Ordered),
            other => Err(Error::Precondition(format!("unknown condition '{other}' (expected full or ordered)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub source: PauliString,
    pub image: PauliString,
    pub kind: StringKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub condition: Condition,
    pub n: usize,
    pub m: usize,
    pub passed: bool,
    /// Number of source strings examined.
    pub checked_count: u64,
    pub violations: Vec<Violation>,
}

/// Source strings of a condition on `n + m` slots, in index order.
pub fn source_strings(condition: Condition, n: usize, m: usize) -> Vec<PauliString> {
    let total = n + m;
    match condition {
        Condition::Full => {
            let mask = low_mask(n) as u64;
            (0..1u64 << (2 * n))
                .map(|i| ((i & mask) as u32, (i >> n & mask) as u32))
                .filter(|&(x, z)| (x | z) != mask as u32)
                .map(|(x, z)| PauliString::from_bits_unchecked(total, x, z))
                .collect()
        }
        Condition::Ordered => {
            let k = n - 1;
            let mask = low_mask(k) as u64;
            (0..1u64 << (2 * k))
                .map(|i| PauliString::from_bits_unchecked(total, ((i & mask) as u32) << 1, ((i >> k & mask) as u32) << 1))
                .collect()
        }
    }
}

/// Closed-form source count: `4^n - 3^n` (full) or `4^(n-1)` (ordered).
pub fn expected_checked_count(condition: Condition, n: usize) -> u64 {
    match condition {
        Condition::Full => 4u64.pow(n as u32) - 3u64.pow(n as u32),
        Condition::Ordered => 4u64.pow(n as u32 - 1),
    }
}

fn check_shape(c: &CliffordTableau, n: usize, m: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::QubitCount { n, min: 2, max: crate::pauli::MAX_QUBITS });
    }
    if c.num_qubits() != n + m {
        return Err(Error::LengthMismatch { left: c.num_qubits(), right: n + m });
    }
    check_assistance(c, n, m)
}

fn run_check(condition: Condition, c: &CliffordTableau, n: usize, m: usize) -> Result<CheckReport> {
    check_shape(c, n, m)?;
    let sources = source_strings(condition, n, m);
    let violations: Vec<Violation> = sources
        .iter()
        .filter_map(|s| {
            let image = c.conjugate_unchecked(s);
            let class = StringClass::of_unchecked(&image);
            (!class.harmless()).then_some(Violation { source: *s, image, kind: class.kind })
        })
        .collect();
    Ok(CheckReport {
        condition,
        n,
        m,
        passed: violations.is_empty(),
        checked_count: sources.len() as u64,
        violations,
    })
}

/// Sufficient and necessary condition for universality on complete BDS sets.
pub fn check_universal_condition(c: &CliffordTableau, n: usize, m: usize) -> Result<CheckReport> {
    run_check(Condition::Full, c, n, m)
}

/// Necessary condition for universality when the best pair sits at slot 0.
pub fn check_ordered_condition(c: &CliffordTableau, n: usize, m: usize) -> Result<CheckReport> {
    run_check(Condition::Ordered, c, n, m)
}

pub fn check_condition(condition: Condition, c: &CliffordTableau, n: usize, m: usize) -> Result<CheckReport> {
    run_check(condition, c, n, m)
}

fn passes(c: &CliffordTableau, sources: &[PauliString]) -> bool {
    sources.iter().all(|s| StringClass::of_unchecked(&c.conjugate_unchecked(s)).harmless())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrivialityReport {
    pub trials: usize,
    pub seed: u64,
    pub max_deviation: f64,
    pub trivial: bool,
}

/// Random inputs with the best pair moved to slot 0.
fn ordered_inputs(n: usize, rng: &mut ChaCha8Rng) -> Vec<BellDiagonalState> {
    let mut inputs: Vec<BellDiagonalState> = (0..n).map(|_| BellDiagonalState::random(rng)).collect();
    let best = (0..n).fold(0, |b, i| if inputs[i].fidelity() > inputs[b].fidelity() { i } else { b });
    inputs.swap(0, best);
    inputs
}

/// Simulates `trials` random ordered inputs and reports `max |F_out - F_1|`.
pub fn triviality_probe(c: &CliffordTableau, n: usize, m: usize, trials: usize, seed: u64) -> Result<TrivialityReport> {
    if !check_ordered_condition(c, n, m)?.passed {
        return Err(Error::Precondition("the Clifford does not satisfy the ordered condition".into()));
    }
    Ok(probe_unchecked(c, n, m, trials, seed))
}

fn probe_unchecked(c: &CliffordTableau, n: usize, m: usize, trials: usize, seed: u64) -> TrivialityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_deviation: f64 = 0.0;
    for _ in 0..trials {
        let inputs = ordered_inputs(n, &mut rng);
        // Success probability is bounded below by the all-identity weight,
        // which is positive for Dirichlet samples.
        let dev = match simulate_pauli_path_with(c, &inputs, m, Exec::Sequential) {
            Ok(out) => (out.output_fidelity - inputs[0].fidelity()).abs(),
            Err(_) => f64::INFINITY,
        };
        max_deviation = max_deviation.max(dev);
    }
    TrivialityReport { trials, seed, max_deviation, trivial: max_deviation <= TRIVIALITY_TOL }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub violation: Violation,
    pub inputs: Vec<BellDiagonalState>,
    pub outcome: ProtocolOutcome,
    pub max_input_fidelity: f64,
    /// `max_input_fidelity - output_fidelity`; positive for a valid witness.
    pub drop: f64,
}

/// Inputs realizing the first full-condition violation `P -> P'`: perfect
/// pairs where `P` has `I`, and `F |phi2> + (1-F) P_i` elsewhere.
///
/// Some slot of `P` is `I`, so the best input is perfect, while the
/// undetectable image of `P` keeps the output below fidelity one.
pub fn counterexample_witness(c: &CliffordTableau, n: usize, m: usize) -> Result<Witness> {
    let report = check_universal_condition(c, n, m)?;
    let violation = report
        .violations
        .into_iter()
        .next()
        .ok_or_else(|| Error::Precondition("the Clifford satisfies the universality condition".into()))?;
    let inputs = (0..n)
        .map(|i| match violation.source.get(i) {
            Pauli::I => Ok(BellDiagonalState::perfect()),
            p => BellDiagonalState::two_component(WITNESS_FIDELITY, p),
        })
        .collect::<Result<Vec<_>>>()?;
    let outcome = simulate_pauli_path_with(c, &inputs, m, Exec::Sequential)?;
    let max_input_fidelity = inputs.iter().map(BellDiagonalState::fidelity).fold(0.0, f64::max);
    Ok(Witness { drop: max_input_fidelity - outcome.output_fidelity, violation, inputs, outcome, max_input_fidelity })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Representative {
    /// Generator images `X_0.. Z_0..` of the representative tableau.
    pub images: Vec<PauliString>,
    /// First violating source (failing candidates only).
    pub violation: Option<Violation>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub mode: Condition,
    pub n: usize,
    pub m: usize,
    pub quotient: String,
    pub total_candidates: u64,
    /// Candidates that return the assisting pairs unchanged (all of them when `m = 0`).
    pub valid_candidates: u64,
    pub full_pass_count: u64,
    pub ordered_pass_count: u64,
    /// Set in ordered mode, after probing every ordered passer.
    pub ordered_pass_all_trivial: Option<bool>,
    pub max_trivial_deviation: Option<f64>,
    pub probe_trials: usize,
    pub seed: u64,
    /// The first few passers of the chosen condition, or failing candidates
    /// with their first violation when nothing passes.
    pub representatives: Vec<Representative>,
    #[serde(skip)]
    pub elapsed: std::time::Duration,
}

impl SearchReport {
    /// Pass count for the condition selected by `mode`.
    pub fn pass_count(&self) -> u64 {
        match self.mode {
            Condition::Full => self.full_pass_count,
            Condition::Ordered => self.ordered_pass_count,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub probe_trials: usize,
    pub seed: u64,
    pub representatives: usize,
    pub exec: Exec,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { probe_trials: 100, seed: 0, representatives: 3, exec: Exec::default() }
    }
}

const SEARCH_BLOCK: usize = 4096;

#[derive(Default)]
struct BlockTally {
    valid: u64,
    full: u64,
    ordered: u64,
    passers: Vec<u64>,
    failures: Vec<u64>,
}

/// Runs the chosen check over every element of `Sp(2(n+m), 2)`.
pub fn exhaustive_no_go(n: usize, m: usize, mode: Condition, opts: SearchOptions) -> Result<SearchReport> {
    let start = std::time::Instant::now();
    let total = n + m;
    if n < 2 || !(2..=3).contains(&total) {
        return Err(Error::Precondition(format!("exhaustive search needs n >= 2 and n + m in {{2, 3}}, got n={n}, m={m}")));
    }
    let group = enumerate_symplectic(total, opts.exec)?;
    let full_src = source_strings(Condition::Full, n, m);
    let ord_src = source_strings(Condition::Ordered, n, m);
    let keys = group.keys();
    let blocks = keys.len().div_ceil(SEARCH_BLOCK);
    let reps = opts.representatives;
    let tallies = map_blocks(opts.exec, blocks, |b| {
        let mut t = BlockTally::default();
        for &key in &keys[b * SEARCH_BLOCK..((b + 1) * SEARCH_BLOCK).min(keys.len())] {
            let c = CliffordTableau::from_packed_key_unchecked(total, key);
            if m > 0 && !preserves_assistance(&c, n) {
                continue;
            }
            t.valid += 1;
            let full = passes(&c, &full_src);
            let ordered = passes(&c, &ord_src);
            t.full += full as u64;
            t.ordered += ordered as u64;
            let chosen = match mode {
                Condition::Full => full,
                Condition::Ordered => ordered,
            };
            if chosen {
                // Ordered passers are all probed, so keep every one of them.
                if mode == Condition::Ordered || t.passers.len() < reps {
                    t.passers.push(key);
                }
            } else if t.failures.len() < reps {
                t.failures.push(key);
            }
        }
        t
    });

    let mut valid_candidates = 0;
    let mut full_pass_count = 0;
    let mut ordered_pass_count = 0;
    let mut passers = Vec::new();
    let mut failures = Vec::new();
    for t in tallies {
        valid_candidates += t.valid;
        full_pass_count += t.full;
        ordered_pass_count += t.ordered;
        passers.extend(t.passers);
        if failures.len() < reps {
            failures.extend(t.failures);
        }
    }
    failures.truncate(reps);

    let (ordered_pass_all_trivial, max_trivial_deviation) = if mode == Condition::Ordered {
        let probes = map_blocks(opts.exec, passers.len(), |i| {
            let c = CliffordTableau::from_packed_key_unchecked(total, passers[i]);
            probe_unchecked(&c, n, m, opts.probe_trials, opts.seed.wrapping_add(i as u64)).max_deviation
        });
        let max = probes.iter().copied().fold(0.0, f64::max);
        (Some(max <= TRIVIALITY_TOL), Some(max))
    } else {
        (None, None)
    };

    let representatives = if passers.is_empty() {
        failures
            .iter()
            .map(|&k| {
                let c = CliffordTableau::from_packed_key_unchecked(total, k);
                let violation = run_check(mode, &c, n, m).ok().and_then(|r| r.violations.into_iter().next());
                Representative { images: c.images().to_vec(), violation }
            })
            .collect()
    } else {
        passers
            .iter()
            .take(reps)
            .map(|&k| Representative { images: CliffordTableau::from_packed_key_unchecked(total, k).images().to_vec(), violation: None })
            .collect()
    };

    Ok(SearchReport {
        mode,
        n,
        m,
        quotient: format!("Sp({}, 2): Cliffords on {total} qubits modulo Pauli operators and global phase", 2 * total),
        total_candidates: group.len() as u64,
        valid_candidates,
        full_pass_count,
        ordered_pass_count,
        ordered_pass_all_trivial,
        max_trivial_deviation,
        probe_trials: if mode == Condition::Ordered { opts.probe_trials } else { 0 },
        seed: opts.seed,
        representatives,
        elapsed: start.elapsed(),
    })
}

fn check_fidelities(fidelities: &[f64]) -> Result<()> {
    if fidelities.is_empty() {
        return Err(Error::EmptyInputs);
    }
    match fidelities.iter().find(|f| !(0.0..=1.0).contains(*f)) {
        Some(&f) => Err(Error::FidelityRange(f)),
        None => Ok(()),
    }
}

/// `prod F / (prod F + prod (1 - F))`.
pub fn fidelity_lower_bound(fidelities: &[f64]) -> Result<f64> {
    check_fidelities(fidelities)?;
    let good: f64 = fidelities.iter().product();
    let bad: f64 = fidelities.iter().map(|f| 1.0 - f).product();
    if good + bad == 0.0 {
        return Err(Error::Indeterminate);
    }
    Ok(good / (good + bad))
}
