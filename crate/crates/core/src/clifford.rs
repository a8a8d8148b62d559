//! Clifford operators modulo Pauli factors and phase, stored as the images of
//! the `2n` single-qubit generators under conjugation.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_blocks, Exec};
use crate::pauli::{Pauli, PauliString, MAX_QUBITS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    H(usize),
    S(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Cx(usize, usize),
    Cz(usize, usize),
}

impl Gate {
    fn slots(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::H(q) | Gate::S(q) | Gate::X(q) | Gate::Y(q) | Gate::Z(q) => (q, None),
            Gate::Cx(a, b) | Gate::Cz(a, b) => (a, Some(b)),
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let (a, b) = self.slots();
        for q in std::iter::once(a).chain(b) {
            if q >= n {
                return Err(Error::SlotOutOfRange { slot: q, n });
            }
        }
        if b == Some(a) {
            return Err(Error::RepeatedSlot(a));
        }
        Ok(())
    }

    /// Conjugation rule `P -> G P G^dagger` with phase dropped.
    #[inline]
    pub fn apply(&self, p: &PauliString) -> PauliString {
        let (mut x, mut z) = (p.x_bits(), p.z_bits());
        let bit = |v: u32, q: usize| (v >> q) & 1;
        match *self {
            Gate::H(q) => {
                let (xq, zq) = (bit(x, q), bit(z, q));
                x = (x & !(1 << q)) | zq << q;
                z = (z & !(1 << q)) | xq << q;
            }
            Gate::S(q) => z ^= bit(x, q) << q,
            Gate::X(_) | Gate::Y(_) | Gate::Z(_) => {}
            Gate::Cx(c, t) => {
                x ^= bit(x, c) << t;
                z ^= bit(z, t) << c;
            }
            Gate::Cz(a, b) => {
                z ^= bit(x, a) << b;
                z ^= bit(x, b) << a;
            }
        }
        PauliString::from_bits_unchecked(p.num_qubits(), x, z)
    }

    /// Inverse expressed in the same gate set.
    pub fn inverse(&self) -> Vec<Gate> {
        match *self {
            Gate::S(q) => vec![Gate::S(q); 3],
            g => vec![g],
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::H(q) => write!(f, "H {q}"),
            Gate::S(q) => write!(f, "S {q}"),
            Gate::X(q) => write!(f, "X {q}"),
            Gate::Y(q) => write!(f, "Y {q}"),
            Gate::Z(q) => write!(f, "Z {q}"),
            Gate::Cx(a, b) => write!(f, "CX {a} {b}"),
            Gate::Cz(a, b) => write!(f, "CZ {a} {b}"),
        }
    }
}

/// Gates in application order (first element acts first).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateSequence {
    pub gates: Vec<Gate>,
}

impl GateSequence {
    pub fn new(gates: Vec<Gate>) -> Self {
        Self { gates }
    }

    /// Parses one gate per line (`;` also separates gates). Blank lines and
    /// `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut gates = Vec::new();
        for (line_no, raw) in text.split(['\n', ';']).enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |reason: &str| Error::GateParse { line: line_no + 1, reason: reason.to_string() };
            let mut parts = line.split_whitespace();
            let name = parts.next().unwrap().to_ascii_uppercase();
            let args: Vec<usize> = parts
                .map(|a| a.parse::<usize>().map_err(|_| err(&format!("bad slot index {a:?}"))))
                .collect::<Result<_>>()?;
            let one = |ctor: fn(usize) -> Gate| match args.as_slice() {
                [q] => Ok(ctor(*q)),
                _ => Err(err("expected one slot")),
            };
            let two = |ctor: fn(usize, usize) -> Gate| match args.as_slice() {
                [a, b] if a != b => Ok(ctor(*a, *b)),
                [a, _] => Err(Error::RepeatedSlot(*a)),
                _ => Err(err("expected two slots")),
            };
            gates.push(match name.as_str() {
                "H" => one(Gate::H)?,
                "S" => one(Gate::S)?,
                "X" => one(Gate::X)?,
                "Y" => one(Gate::Y)?,
                "Z" => one(Gate::Z)?,
                "CX" | "CNOT" => two(Gate::Cx)?,
                "CZ" => two(Gate::Cz)?,
                other => return Err(err(&format!("unknown gate {other:?}"))),
            });
        }
        Ok(Self { gates })
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        self.gates.iter().try_for_each(|g| g.validate(n))
    }

    /// Smallest qubit count the sequence fits in.
    pub fn min_qubits(&self) -> usize {
        self.gates
            .iter()
            .map(|g| {
                let (a, b) = g.slots();
                a.max(b.unwrap_or(0)) + 1
            })
            .max()
            .unwrap_or(0)
    }

    pub fn inverse(&self) -> Self {
        Self { gates: self.gates.iter().rev().flat_map(Gate::inverse).collect() }
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }
}

impl fmt::Display for GateSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

impl FromStr for GateSequence {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// Symplectic part of an `n`-qubit Clifford. `images[i]` is the image of `X_i`
/// and `images[n + i]` the image of `Z_i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CliffordTableau {
    n: usize,
    images: Vec<PauliString>,
}

impl CliffordTableau {
    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::QubitCount { n, min: 1, max: MAX_QUBITS });
        }
        let mut images = Vec::with_capacity(2 * n);
        images.extend((0..n).map(|i| PauliString::from_bits_unchecked(n, 1 << i, 0)));
        images.extend((0..n).map(|i| PauliString::from_bits_unchecked(n, 0, 1 << i)));
        Ok(Self { n, images })
    }

    /// Builds a tableau from explicit generator images, checking the symplectic form.
    pub fn from_images(images: Vec<PauliString>) -> Result<Self> {
        if images.is_empty() || !images.len().is_multiple_of(2) {
            return Err(Error::TableauParse(format!("expected 2n images, got {}", images.len())));
        }
        let n = images.len() / 2;
        if let Some(bad) = images.iter().find(|p| p.num_qubits() != n) {
            return Err(Error::LengthMismatch { left: n, right: bad.num_qubits() });
        }
        let t = Self { n, images };
        if !t.is_symplectic() {
            return Err(Error::NotSymplectic);
        }
        Ok(t)
    }

    pub fn from_gates(n: usize, gates: &GateSequence) -> Result<Self> {
        gates.validate(n)?;
        let mut t = Self::identity(n)?;
        for g in &gates.gates {
            t.apply_gate_unchecked(g);
        }
        Ok(t)
    }

    /// Left-multiplies by a gate: the new operator is `G C`.
    pub fn apply_gate(&mut self, g: &Gate) -> Result<()> {
        g.validate(self.n)?;
        self.apply_gate_unchecked(g);
        Ok(())
    }

    #[inline]
    fn apply_gate_unchecked(&mut self, g: &Gate) {
        for img in &mut self.images {
            *img = g.apply(img);
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn images(&self) -> &[PauliString] {
        &self.images
    }

    pub fn x_image(&self, slot: usize) -> PauliString {
        self.images[slot]
    }

    pub fn z_image(&self, slot: usize) -> PauliString {
        self.images[self.n + slot]
    }

    pub fn conjugate(&self, p: &PauliString) -> Result<PauliString> {
        if p.num_qubits() != self.n {
            return Err(Error::LengthMismatch { left: self.n, right: p.num_qubits() });
        }
        Ok(self.conjugate_unchecked(p))
    }

    /// Product of the generator images selected by the bits of `p`.
    #[inline]
    pub(crate) fn conjugate_unchecked(&self, p: &PauliString) -> PauliString {
        let (mut x, mut z) = (0u32, 0u32);
        let mut bits = p.x_bits();
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            let img = &self.images[i];
            x ^= img.x_bits();
            z ^= img.z_bits();
            bits &= bits - 1;
        }
        let mut bits = p.z_bits();
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            let img = &self.images[self.n + i];
            x ^= img.x_bits();
            z ^= img.z_bits();
            bits &= bits - 1;
        }
        PauliString::from_bits_unchecked(self.n, x, z)
    }

    /// `compose(c1, c2)` acts as `c1` after `c2`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if self.n != inner.n {
            return Err(Error::LengthMismatch { left: self.n, right: inner.n });
        }
        Ok(Self { n: self.n, images: inner.images.iter().map(|p| self.conjugate_unchecked(p)).collect() })
    }

    /// Checks commutation relations of all generator-image pairs.
    pub fn is_symplectic(&self) -> bool {
        let n = self.n;
        for a in 0..2 * n {
            for b in a + 1..2 * n {
                // X_i and Z_i anticommute; every other generator pair commutes.
                let expected = !(b == a + n && a < n);
                if self.images[a].commutes_unchecked(&self.images[b]) != expected {
                    return false;
                }
            }
        }
        true
    }

    /// Tensor product with the identity on `m` extra trailing slots.
    pub fn extend_identity(&self, m: usize) -> Result<Self> {
        let total = self.n + m;
        let mut out = Self::identity(total)?;
        for i in 0..self.n {
            out.images[i] = self.images[i].pad_identity(m)?;
            out.images[total + i] = self.images[self.n + i].pad_identity(m)?;
        }
        Ok(out)
    }

    /// Packs the tableau into a `u64` (`n <= 4`): image `k` occupies bits
    /// `2n*k .. 2n*(k+1)` as its enumeration index.
    pub fn packed_key(&self) -> Option<u64> {
        if self.n > 4 {
            return None;
        }
        let width = 2 * self.n;
        Some(self.images.iter().enumerate().fold(0u64, |acc, (k, p)| acc | p.to_index() << (width * k)))
    }

    pub fn from_packed_key(n: usize, key: u64) -> Result<Self> {
        if !(1..=4).contains(&n) {
            return Err(Error::QubitCount { n, min: 1, max: 4 });
        }
        Ok(Self::from_packed_key_unchecked(n, key))
    }

    pub(crate) fn from_packed_key_unchecked(n: usize, key: u64) -> Self {
        let width = 2 * n;
        let mask = (1u64 << width) - 1;
        let images = (0..2 * n).map(|k| PauliString::from_index(n, key >> (width * k) & mask)).collect();
        Self { n, images }
    }

    /// File form: `n=<k>` followed by the `2n` images, X images first.
    pub fn to_text(&self) -> String {
        let mut s = format!("n={}\n", self.n);
        for p in &self.images {
            s.push_str(&p.to_string());
            s.push('\n');
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::TableauParse("missing header".into()))?;
        let n: usize = header
            .strip_prefix("n=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::TableauParse(format!("bad header {header:?}")))?;
        let images = lines.map(PauliString::parse).collect::<Result<Vec<_>>>()?;
        if images.len() != 2 * n {
            return Err(Error::TableauParse(format!("expected {} images, got {}", 2 * n, images.len())));
        }
        Self::from_images(images)
    }
}

impl fmt::Debug for CliffordTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.images.iter().map(|p| p.to_string()).collect();
        write!(f, "CliffordTableau(n={}, {})", self.n, names.join(","))
    }
}

/// Tableau of `|0><0| (x) I + |1><1| (x) P` with `p` laid out over the slots
/// other than `control`, in increasing slot order.
pub fn controlled_pauli(n: usize, control: usize, p: &PauliString) -> Result<CliffordTableau> {
    if control >= n {
        return Err(Error::SlotOutOfRange { slot: control, n });
    }
    if p.num_qubits() + 1 != n {
        return Err(Error::LengthMismatch { left: n - 1, right: p.num_qubits() });
    }
    let targets: Vec<usize> = (0..n).filter(|&q| q != control).collect();
    let mut embedded = vec![Pauli::I; n];
    for (k, &q) in targets.iter().enumerate() {
        embedded[q] = p.get(k);
    }
    let big_p = PauliString::from_paulis(&embedded)?;
    let z_control = PauliString::from_bits_unchecked(n, 0, 1 << control);
    let mut t = CliffordTableau::identity(n)?;
    t.images[control] = t.images[control].mul_unchecked(&big_p);
    for &q in &targets {
        for idx in [q, n + q] {
            if !t.images[idx].commutes_unchecked(&big_p) {
                t.images[idx] = t.images[idx].mul_unchecked(&z_control);
            }
        }
    }
    Ok(t)
}

fn generator_gates(n: usize) -> Vec<Gate> {
    let mut gens = Vec::new();
    for q in 0..n {
        gens.push(Gate::H(q));
        gens.push(Gate::S(q));
    }
    for a in 0..n {
        for b in 0..n {
            if a != b {
                gens.push(Gate::Cx(a, b));
            }
        }
    }
    gens
}

/// Random gate word over `{H, S, CX}` long enough to mix well on small `n`.
pub fn random_gate_sequence<R: Rng>(n: usize, rng: &mut R) -> GateSequence {
    let gens = generator_gates(n);
    // Lazy walk: every generator is an odd element, so a fixed-length walk
    // would stay in one coset.
    let mut gates = Vec::new();
    for _ in 0..60 * n + 60 {
        if rng.gen_bool(0.5) {
            gates.push(gens[rng.gen_range(0..gens.len())]);
        }
    }
    GateSequence { gates }
}

pub fn random_clifford(n: usize, seed: u64) -> Result<CliffordTableau> {
    if n == 0 || n > 10 {
        return Err(Error::QubitCount { n, min: 1, max: 10 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    CliffordTableau::from_gates(n, &random_gate_sequence(n, &mut rng))
}

/// `|Sp(2n, 2)| = 2^(n^2) * prod_{i=1..n} (4^i - 1)`.
pub fn symplectic_group_order(n: usize) -> u64 {
    (1..=n as u32).fold(1u64 << (n * n), |acc, i| acc * (4u64.pow(i) - 1))
}

/// Every element of `Sp(2n, 2)` for `n` in `{2, 3}`, sorted by packed key.
#[derive(Clone, Debug)]
pub struct SymplecticEnumeration {
    n: usize,
    keys: Vec<u64>,
}

impl SymplecticEnumeration {
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn keys(&self) -> &[u64] {
        &self.keys
    }

    pub fn get(&self, index: usize) -> CliffordTableau {
        CliffordTableau::from_packed_key_unchecked(self.n, self.keys[index])
    }

    pub fn iter(&self) -> impl Iterator<Item = CliffordTableau> + '_ {
        self.keys.iter().map(move |&k| CliffordTableau::from_packed_key_unchecked(self.n, k))
    }

    pub fn contains(&self, t: &CliffordTableau) -> bool {
        t.num_qubits() == self.n && t.packed_key().is_some_and(|k| self.keys.binary_search(&k).is_ok())
    }
}

/// Breadth-first closure of the identity under `{H_i, S_i, CX_ij}`.
///
/// Each frontier is expanded in fixed-size blocks (in parallel when `exec`
/// allows), then sorted and deduplicated against the visited set, so the
/// result is independent of scheduling.
pub fn enumerate_symplectic(n: usize, exec: Exec) -> Result<SymplecticEnumeration> {
    if !(2..=3).contains(&n) {
        return Err(Error::QubitCount { n, min: 2, max: 3 });
    }
    let gens = generator_gates(n);
    let start = CliffordTableau::identity(n)?.packed_key().unwrap();
    let mut visited: HashSet<u64> = HashSet::from([start]);
    let mut frontier = vec![start];
    const BLOCK: usize = 2048;
    while !frontier.is_empty() {
        let blocks = frontier.len().div_ceil(BLOCK);
        let expanded = map_blocks(exec, blocks, |b| {
            let chunk = &frontier[b * BLOCK..((b + 1) * BLOCK).min(frontier.len())];
            let mut out = Vec::with_capacity(chunk.len() * gens.len());
            for &key in chunk {
                let t = CliffordTableau::from_packed_key_unchecked(n, key);
                for g in &gens {
                    let mut next = t.clone();
                    next.apply_gate_unchecked(g);
                    out.push(next.packed_key().unwrap());
                }
            }
            out
        });
        let mut next: Vec<u64> = expanded.into_iter().flatten().filter(|k| !visited.contains(k)).collect();
        next.sort_unstable();
        next.dedup();
        visited.extend(next.iter().copied());
        frontier = next;
    }
    let mut keys: Vec<u64> = visited.into_iter().collect();
    keys.sort_unstable();
    Ok(SymplecticEnumeration { n, keys })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn gates(s: &str) -> GateSequence {
        s.parse().unwrap()
    }

    #[test]
    fn cnot_images() {
        let cx = CliffordTableau::from_gates(2, &gates("CX 0 1")).unwrap();
        assert_eq!(cx.conjugate(&p("XI")).unwrap(), p("XX"));
        assert_eq!(cx.conjugate(&p("IY")).unwrap(), p("ZY"));
        assert_eq!(cx.conjugate(&p("ZI")).unwrap(), p("ZI"));
        assert_eq!(cx.conjugate(&p("ZZ")).unwrap(), p("IZ"));
        assert_eq!(cx.conjugate(&p("IX")).unwrap(), p("IX"));
        assert_eq!(cx.conjugate(&p("IZ")).unwrap(), p("ZZ"));
        assert_eq!(cx.conjugate(&p("YI")).unwrap(), p("YX"));
        assert_eq!(cx.conjugate(&p("II")).unwrap(), p("II"));
        assert!(cx.conjugate(&p("III")).is_err());
    }

    #[test]
    fn empty_sequence_is_identity() {
        let t = CliffordTableau::from_gates(2, &GateSequence::default()).unwrap();
        assert_eq!(t, CliffordTableau::identity(2).unwrap());
        for s in crate::pauli::all_strings(2) {
            assert_eq!(t.conjugate(&s).unwrap(), s);
        }
    }

    #[test]
    fn single_qubit_rules() {
        let h = CliffordTableau::from_gates(1, &gates("H 0")).unwrap();
        assert_eq!(h.conjugate(&p("X")).unwrap(), p("Z"));
        assert_eq!(h.conjugate(&p("Y")).unwrap(), p("Y"));
        let s = CliffordTableau::from_gates(1, &gates("S 0")).unwrap();
        assert_eq!(s.conjugate(&p("X")).unwrap(), p("Y"));
        assert_eq!(s.conjugate(&p("Y")).unwrap(), p("X"));
        assert_eq!(s.conjugate(&p("Z")).unwrap(), p("Z"));
        let cz = CliffordTableau::from_gates(2, &gates("CZ 0 1")).unwrap();
        assert_eq!(cz.conjugate(&p("XI")).unwrap(), p("XZ"));
        assert_eq!(cz.conjugate(&p("IX")).unwrap(), p("ZX"));
        let paulis = CliffordTableau::from_gates(2, &gates("X 0; Y 1; Z 0")).unwrap();
        assert_eq!(paulis, CliffordTableau::identity(2).unwrap());
    }

    #[test]
    fn compose_examples() {
        let cx = CliffordTableau::from_gates(2, &gates("CX 0 1")).unwrap();
        let id = CliffordTableau::identity(2).unwrap();
        assert_eq!(cx.compose(&id).unwrap(), cx);
        assert_eq!(cx.compose(&cx).unwrap(), id);
        let h = CliffordTableau::from_gates(2, &gates("H 0")).unwrap();
        assert_eq!(h.compose(&h).unwrap(), id);
        assert!(cx.compose(&CliffordTableau::identity(3).unwrap()).is_err());
    }

    #[test]
    fn compose_matches_sequential_conjugation() {
        let a = random_clifford(3, 1).unwrap();
        let b = random_clifford(3, 2).unwrap();
        let ab = a.compose(&b).unwrap();
        for s in crate::pauli::all_strings(3) {
            assert_eq!(ab.conjugate(&s).unwrap(), a.conjugate(&b.conjugate(&s).unwrap()).unwrap());
        }
    }

    #[test]
    fn gate_parse_errors() {
        assert!(matches!(GateSequence::parse("Q 0"), Err(Error::GateParse { line: 1, .. })));
        assert!(matches!(GateSequence::parse("H 0\nCX 1"), Err(Error::GateParse { line: 2, .. })));
        assert_eq!(GateSequence::parse("CX 1 1"), Err(Error::RepeatedSlot(1)));
        assert!(GateSequence::parse("H x").is_err());
        assert_eq!(CliffordTableau::from_gates(2, &gates("H 2")), Err(Error::SlotOutOfRange { slot: 2, n: 2 }));
        let seq = gates("# comment\nH 0\n\ncx 0 1 ; CZ 1 2");
        assert_eq!(seq.gates, vec![Gate::H(0), Gate::Cx(0, 1), Gate::Cz(1, 2)]);
        assert_eq!(seq.min_qubits(), 3);
        assert_eq!(seq.to_string().parse::<GateSequence>().unwrap(), seq);
    }

    #[test]
    fn inverse_sequence_gives_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=5 {
            let seq = random_gate_sequence(n, &mut rng);
            let mut both = seq.clone();
            both.gates.extend(seq.inverse().gates);
            assert_eq!(CliffordTableau::from_gates(n, &both).unwrap(), CliffordTableau::identity(n).unwrap());
        }
    }

    #[test]
    fn tableau_text_round_trip() {
        let t = random_clifford(3, 11).unwrap();
        let text = t.to_text();
        assert!(text.starts_with("n=3\n"));
        assert_eq!(CliffordTableau::parse_text(&text).unwrap(), t);
        assert_eq!(CliffordTableau::parse_text("n=1\nX\nX\n"), Err(Error::NotSymplectic));
        assert!(CliffordTableau::parse_text("n=2\nXI\n").is_err());
        assert!(CliffordTableau::parse_text("m=2").is_err());
    }

    #[test]
    fn packed_key_round_trip() {
        for seed in 0..20 {
            let t = random_clifford(3, seed).unwrap();
            let key = t.packed_key().unwrap();
            assert_eq!(CliffordTableau::from_packed_key(3, key).unwrap(), t);
        }
        assert_eq!(random_clifford(5, 0).unwrap().packed_key(), None);
    }

    #[test]
    fn controlled_pauli_matches_gates() {
        let x = controlled_pauli(2, 0, &p("X")).unwrap();
        assert_eq!(x, CliffordTableau::from_gates(2, &gates("CX 0 1")).unwrap());
        let z = controlled_pauli(2, 0, &p("Z")).unwrap();
        assert_eq!(z, CliffordTableau::from_gates(2, &gates("CZ 0 1")).unwrap());
        let xz = controlled_pauli(3, 0, &p("XZ")).unwrap();
        assert_eq!(xz, CliffordTableau::from_gates(3, &gates("CX 0 1; CZ 0 2")).unwrap());
        // controlled-Y = S CX S^dagger on the target
        let y = controlled_pauli(2, 1, &p("Y")).unwrap();
        assert_eq!(y, CliffordTableau::from_gates(2, &gates("S 0; S 0; S 0; CX 1 0; S 0")).unwrap());
        assert!(controlled_pauli(3, 3, &p("XZ")).is_err());
        assert!(controlled_pauli(3, 0, &p("X")).is_err());
    }

    #[test]
    fn controlled_pauli_is_automorphism() {
        for s in crate::pauli::all_strings(3) {
            let t = controlled_pauli(4, 2, &s).unwrap();
            assert!(t.is_symplectic(), "{s}");
        }
    }

    #[test]
    fn random_is_deterministic_and_symplectic() {
        assert_eq!(random_clifford(4, 0).unwrap(), random_clifford(4, 0).unwrap());
        assert_ne!(random_clifford(4, 0).unwrap(), random_clifford(4, 1).unwrap());
        for seed in 0..1000 {
            assert!(random_clifford(4, seed).unwrap().is_symplectic());
        }
        assert!(random_clifford(11, 0).is_err());
    }

    #[test]
    fn group_orders() {
        assert_eq!(symplectic_group_order(1), 6);
        assert_eq!(symplectic_group_order(2), 720);
        assert_eq!(symplectic_group_order(3), 1_451_520);
    }

    // Independent of the BFS: count every 4x4 GF(2) matrix that preserves the
    // symplectic form by brute force over all 2^16 candidates.
    #[test]
    fn n2_brute_force_symplectic_count() {
        let mut count = 0;
        for bits in 0u32..1 << 16 {
            let images: Vec<PauliString> =
                (0..4).map(|k| PauliString::from_index(2, ((bits >> (4 * k)) & 0xF) as u64)).collect();
            let t = CliffordTableau { n: 2, images };
            if t.is_symplectic() {
                count += 1;
            }
        }
        assert_eq!(count, 720);
    }

    #[test]
    fn enumerate_n2() {
        let all = enumerate_symplectic(2, Exec::Sequential).unwrap();
        assert_eq!(all.len(), 720);
        assert!(all.iter().all(|t| t.is_symplectic()));
        let cx = CliffordTableau::from_gates(2, &gates("CX 0 1")).unwrap();
        let key = cx.packed_key().unwrap();
        assert_eq!(all.keys().iter().filter(|&&k| k == key).count(), 1);
        assert!(all.contains(&cx));
        let par = enumerate_symplectic(2, Exec::Parallel).unwrap();
        assert_eq!(all.keys(), par.keys());
        assert!(enumerate_symplectic(4, Exec::Sequential).is_err());
        assert!(enumerate_symplectic(1, Exec::Sequential).is_err());
    }

    #[test]
    fn random_clifford_covers_sp4() {
        let all = enumerate_symplectic(2, Exec::Sequential).unwrap();
        let mut hit = HashSet::new();
        for seed in 0..100_000u64 {
            let t = random_clifford(2, seed).unwrap();
            assert!(all.contains(&t));
            hit.insert(t.packed_key().unwrap());
        }
        // A uniform sampler misses any fixed class with probability
        // (1 - 1/720)^1e5 < 1e-60, so 700 leaves a wide margin for mild bias.
        assert!(hit.len() >= 700, "hit {} classes", hit.len());
    }
}
