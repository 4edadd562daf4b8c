//! Test-only oracles built from first-quantized wavefunctions.
#![allow(dead_code)]

use mixturemf::fock::TwoSpeciesState;
use nalgebra::DMatrix;
use num_complex::Complex64;

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn occupation(word: &[usize], m: usize) -> Vec<u32> {
    let mut o = vec![0u32; m];
    for &s in word {
        o[s] += 1;
    }
    o
}

/// Number of orderings of a word with occupations `o`.
fn orderings(o: &[u32]) -> f64 {
    let n: u32 = o.iter().sum();
    factorial(n as usize) / o.iter().map(|&k| factorial(k as usize)).product::<f64>()
}

fn digits(mut i: usize, m: usize, len: usize) -> Vec<usize> {
    let mut d = vec![0; len];
    for slot in (0..len).rev() {
        d[slot] = i % m;
        i /= m;
    }
    d
}

/// `Ψ(x_1..x_N1, y_1..y_N2)` on `M^(N1+N2)` words, first slot most significant.
pub fn first_quantized(state: &TwoSpeciesState) -> Vec<Complex64> {
    let (m, n1, n2) = (state.sites(), state.n1(), state.n2());
    let nb = state.basis_b.len();
    let total = m.pow((n1 + n2) as u32);
    (0..total)
        .map(|i| {
            let w = digits(i, m, n1 + n2);
            let (oa, ob) = (occupation(&w[..n1], m), occupation(&w[n1..], m));
            let ia = state.basis_a.index_of(&oa).unwrap();
            let ib = state.basis_b.index_of(&ob).unwrap();
            state.amplitudes[ia * nb + ib] / (orderings(&oa) * orderings(&ob)).sqrt()
        })
        .collect()
}

/// `γ^{(1,1)}` by explicit partial trace over all slots but the first of each species,
/// indexed `x * M + y`.
pub fn gamma11_partial_trace(state: &TwoSpeciesState) -> DMatrix<Complex64> {
    let (m, n1, n2) = (state.sites(), state.n1(), state.n2());
    let psi = first_quantized(state);
    let len = n1 + n2;
    let rest_len = len - 2;
    let index = |x: usize, y: usize, rest: &[usize]| {
        let mut w = Vec::with_capacity(len);
        w.push(x);
        w.extend_from_slice(&rest[..n1 - 1]);
        w.push(y);
        w.extend_from_slice(&rest[n1 - 1..]);
        w.iter().fold(0, |acc, &d| acc * m + d)
    };
    let mut g = DMatrix::zeros(m * m, m * m);
    for r in 0..m.pow(rest_len as u32) {
        let rest = digits(r, m, rest_len);
        for (x, y) in (0..m).flat_map(|x| (0..m).map(move |y| (x, y))) {
            let a = psi[index(x, y, &rest)];
            for (xp, yp) in (0..m).flat_map(|x| (0..m).map(move |y| (x, y))) {
                g[(x * m + y, xp * m + yp)] += a * psi[index(xp, yp, &rest)].conj();
            }
        }
    }
    g
}
