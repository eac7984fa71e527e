//! Dense reference constructions built straight from Kronecker products of
//! 2×2 Pauli matrices, with no use of the bit-mask phase bookkeeping.
#![allow(dead_code)]

use faer::{c64, Mat};

pub type Dense = Mat<c64>;

pub fn cz(re: f64, im: f64) -> c64 {
    c64::new(re, im)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

/// `⟨row|σ|col⟩` of a single-qubit Pauli matrix.
pub fn letter_entry(l: Letter, row: usize, col: usize) -> c64 {
    match (l, row, col) {
        (Letter::I, a, b) if a == b => cz(1.0, 0.0),
        (Letter::X, a, b) if a != b => cz(1.0, 0.0),
        (Letter::Y, 0, 1) => cz(0.0, -1.0),
        (Letter::Y, 1, 0) => cz(0.0, 1.0),
        (Letter::Z, 0, 0) => cz(1.0, 0.0),
        (Letter::Z, 1, 1) => cz(-1.0, 0.0),
        _ => cz(0.0, 0.0),
    }
}

/// `⊗_k σ_k` where qubit `k` is bit `k` of the basis index.
pub fn kron(letters: &[Letter]) -> Dense {
    let d = 1usize << letters.len();
    Mat::from_fn(d, d, |r, c| {
        let mut v = cz(1.0, 0.0);
        for (k, &l) in letters.iter().enumerate() {
            v *= letter_entry(l, (r >> k) & 1, (c >> k) & 1);
        }
        v
    })
}

/// Jordan–Wigner Majorana `χ_i` (zero-based) on `n_fermions/2` qubits.
pub fn dense_majorana(i: usize, n_fermions: usize) -> Dense {
    let nq = n_fermions / 2;
    let k = i / 2;
    let letters: Vec<Letter> = (0..nq)
        .map(|j| {
            if j < k {
                Letter::Z
            } else if j == k {
                if i % 2 == 0 {
                    Letter::X
                } else {
                    Letter::Y
                }
            } else {
                Letter::I
            }
        })
        .collect();
    kron(&letters)
}

/// `χ_{i1}⋯χ_{iq}`, times `i` when `q(q−1)/2` is odd so the product is
/// Hermitian; `q = 4` strings carry no extra factor.
pub fn dense_string(indices: &[usize], n_fermions: usize) -> Dense {
    let d = 1usize << (n_fermions / 2);
    let mut m = identity(d);
    for &i in indices {
        m = &m * &dense_majorana(i, n_fermions);
    }
    let q = indices.len();
    let ph = if (q * q.saturating_sub(1) / 2) % 2 == 1 { cz(0.0, 1.0) } else { cz(1.0, 0.0) };
    let mut out = m;
    for c in 0..d {
        for r in 0..d {
            out[(r, c)] *= ph;
        }
    }
    out
}

pub fn identity(d: usize) -> Dense {
    Mat::from_fn(d, d, |r, c| if r == c { cz(1.0, 0.0) } else { cz(0.0, 0.0) })
}

/// Dense matrix of a library Pauli string, read column by column from `apply`.
pub fn from_apply(p: &levy_syk::majorana::PauliString) -> Dense {
    let d = 1usize << p.n_qubits;
    let mut m = Mat::<c64>::zeros(d, d);
    for b in 0..d {
        let (bp, c) = p.apply(b as u64);
        m[(bp as usize, b)] += c;
    }
    m
}

pub fn max_diff(a: &Dense, b: &Dense) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut m: f64 = 0.0;
    for c in 0..a.ncols() {
        for r in 0..a.nrows() {
            m = m.max((a[(r, c)] - b[(r, c)]).norm());
        }
    }
    m
}

pub fn scale(a: &Dense, s: c64) -> Dense {
    Mat::from_fn(a.nrows(), a.ncols(), |r, c| a[(r, c)] * s)
}

pub fn add(a: &Dense, b: &Dense) -> Dense {
    Mat::from_fn(a.nrows(), a.ncols(), |r, c| a[(r, c)] + b[(r, c)])
}

pub fn sub(a: &Dense, b: &Dense) -> Dense {
    Mat::from_fn(a.nrows(), a.ncols(), |r, c| a[(r, c)] - b[(r, c)])
}

pub fn is_zero(a: &Dense, tol: f64) -> bool {
    max_diff(a, &Mat::zeros(a.nrows(), a.ncols())) <= tol
}

/// Restriction of a full-space matrix to basis states of given popcount parity.
pub fn restrict_parity(a: &Dense, parity: u32) -> Dense {
    let states: Vec<usize> = (0..a.nrows()).filter(|b| b.count_ones() % 2 == parity).collect();
    Mat::from_fn(states.len(), states.len(), |r, c| a[(states[r], states[c])])
}

/// Sorted eigenvalues straight from faer.
pub fn dense_eigenvalues(a: &Dense) -> Vec<f64> {
    a.self_adjoint_eigenvalues(faer::Side::Lower).unwrap()
}

/// Action of `χ_i` on basis state `b`, worked out letter by letter:
/// returns `(b', c)` with `χ_i|b⟩ = c|b'⟩`.
pub fn majorana_on_state(i: usize, b: usize) -> (usize, c64) {
    let k = i / 2;
    let mut c = cz(1.0, 0.0);
    for j in 0..k {
        if (b >> j) & 1 == 1 {
            c = -c;
        }
    }
    let bit = (b >> k) & 1;
    let out = b ^ (1 << k);
    if i % 2 == 1 {
        // Y|0⟩ = i|1⟩, Y|1⟩ = −i|0⟩
        c *= if bit == 0 { cz(0.0, 1.0) } else { cz(0.0, -1.0) };
    }
    (out, c)
}

/// Sum `Σ J_I Ψ_I` over all sorted `q`-tuples (lexicographic order), built by
/// applying the Majoranas of each tuple one at a time to every basis state.
pub fn dense_syk(values: &[f64], n_fermions: usize, q: usize) -> Dense {
    let d = 1usize << (n_fermions / 2);
    let mut h = Mat::<c64>::zeros(d, d);
    let ph = if (q * (q - 1) / 2) % 2 == 1 { cz(0.0, 1.0) } else { cz(1.0, 0.0) };
    let mut idx: Vec<usize> = (0..q).collect();
    let mut t = 0;
    loop {
        for b in 0..d {
            let (mut s, mut c) = (b, ph);
            for &i in idx.iter().rev() {
                let (s2, c2) = majorana_on_state(i, s);
                s = s2;
                c *= c2;
            }
            h[(s, b)] += c * values[t];
        }
        t += 1;
        // next combination
        let mut k = q;
        while k > 0 && idx[k - 1] == n_fermions - q + k - 1 {
            k -= 1;
        }
        if k == 0 {
            break;
        }
        idx[k - 1] += 1;
        for j in k..q {
            idx[j] = idx[j - 1] + 1;
        }
    }
    assert_eq!(t, values.len());
    h
}

/// Mean gap ratio over the middle third of sorted levels.
pub fn mean_r_middle_third(levels: &[f64]) -> f64 {
    let n = levels.len();
    let lo = n / 3;
    let hi = n - lo;
    let w = &levels[lo..hi];
    let r: Vec<f64> = w
        .windows(3)
        .map(|t| {
            let (a, b) = (t[1] - t[0], t[2] - t[1]);
            a.min(b) / a.max(b)
        })
        .collect();
    r.iter().sum::<f64>() / r.len() as f64
}
