use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ctcsim_bench::grandfather_circuit;
use ctcsim_core::circuit::assemble_unitary;
use ctcsim_core::dctc::{fixed_point_space, induced_channel, solve_fixed_point, Policy};
use ctcsim_core::qlin::{eig_hermitian, random_pure_state, random_unitary, DensityMatrix};

fn bench_assemble(c: &mut Criterion) {
    let circuit = grandfather_circuit();
    c.bench_function("assemble_unitary/grandfather", |b| {
        b.iter(|| assemble_unitary(black_box(&circuit)).unwrap())
    });
}

fn bench_solve(c: &mut Criterion) {
    let circuit = grandfather_circuit();
    let u = assemble_unitary(&circuit).unwrap();
    let ch = induced_channel(&u, &circuit.input).unwrap();
    c.bench_function("solve_fixed_point/grandfather/canonical", |b| {
        b.iter(|| solve_fixed_point(black_box(&ch), Policy::Canonical, 1e-10).unwrap())
    });
    c.bench_function("fixed_point_space/grandfather", |b| {
        b.iter(|| fixed_point_space(black_box(&ch)).unwrap())
    });

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let u = random_unitary(16, &mut rng);
    let rho_in = DensityMatrix::from_pure(&random_pure_state(4, &mut rng)).unwrap();
    let ch = induced_channel(&u, &rho_in).unwrap();
    c.bench_function("solve_fixed_point/random_4x4/canonical", |b| {
        b.iter(|| solve_fixed_point(black_box(&ch), Policy::Canonical, 1e-10).unwrap())
    });
}

fn bench_eig(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in [8usize, 32] {
        let u = random_unitary(n, &mut rng);
        let h = u.add(&u.dagger()).scale_re(0.5);
        c.bench_function(&format!("eig_hermitian/dim_{n}"), |b| {
            b.iter(|| eig_hermitian(black_box(&h)).unwrap())
        });
    }
}

criterion_group!(benches, bench_assemble, bench_solve, bench_eig);
criterion_main!(benches);
