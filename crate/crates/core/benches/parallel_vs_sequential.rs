use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use epp_nogo::bicep::simulate_pauli_path_with;
use epp_nogo::choi::t_norm_bruteforce_with;
use epp_nogo::clifford::{enumerate_symplectic, random_clifford};
use epp_nogo::universality::{exhaustive_no_go, Condition, SearchOptions};
use epp_nogo::{BellDiagonalState, Exec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn enumeration(c: &mut Criterion) {
    let mut g = c.benchmark_group("enumerate_symplectic_n3");
    g.sample_size(10);
    for (name, exec) in POLICIES {
        g.bench_function(name, |b| b.iter(|| enumerate_symplectic(black_box(3), exec).unwrap()));
    }
    g.finish();
}

fn search(c: &mut Criterion) {
    let mut g = c.benchmark_group("exhaustive_no_go");
    g.sample_size(10);
    for n in [2, 3] {
        for (name, exec) in POLICIES {
            let opts = SearchOptions { exec, ..SearchOptions::default() };
            g.bench_with_input(BenchmarkId::new(name, n), &n, |b, &n| {
                b.iter(|| exhaustive_no_go(n, 0, Condition::Full, opts).unwrap())
            });
        }
    }
    g.finish();
}

fn pauli_path(c: &mut Criterion) {
    let n = 10;
    let circuit = random_clifford(n, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let inputs: Vec<_> = (0..n).map(|_| BellDiagonalState::random(&mut rng)).collect();
    let mut g = c.benchmark_group("simulate_pauli_path_n10");
    for (name, exec) in POLICIES {
        g.bench_function(name, |b| b.iter(|| simulate_pauli_path_with(&circuit, black_box(&inputs), 0, exec).unwrap()));
    }
    g.finish();
}

fn t_norm(c: &mut Criterion) {
    let mut g = c.benchmark_group("t_norm_bruteforce_n9");
    for (name, exec) in POLICIES {
        g.bench_function(name, |b| b.iter(|| t_norm_bruteforce_with(black_box(9), exec).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, enumeration, search, pauli_path, t_norm);
criterion_main!(benches);
