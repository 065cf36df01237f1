//! Independent dense oracle: builds whole Koszul differentials from scratch
//! (no block decomposition, no shared indexing code) and ranks them by plain
//! Gaussian elimination modulo a prime.

#![allow(dead_code)]

use std::collections::HashMap;

pub const ORACLE_PRIME: u64 = 1_000_000_007;

/// All exponent vectors of `nvars` variables with total degree `deg`.
pub fn monomials(nvars: usize, deg: i64) -> Vec<Vec<u32>> {
    if deg < 0 {
        return Vec::new();
    }
    if nvars == 1 {
        return vec![vec![deg as u32]];
    }
    let mut out = Vec::new();
    for first in 0..=deg {
        for mut rest in monomials(nvars - 1, deg - first) {
            rest.insert(0, first as u32);
            out.push(rest);
        }
    }
    out
}

pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if k > n {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

pub fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Rank modulo `ORACLE_PRIME` of a dense matrix.
pub fn rank_mod(mut m: Vec<Vec<u64>>) -> usize {
    let p = ORACLE_PRIME;
    let pow = |mut a: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = r * a % p;
            }
            a = a * a % p;
            e >>= 1;
        }
        r
    };
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&r| m[r][c] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = pow(m[rank][c], p - 2);
        for r in rank + 1..m.len() {
            if m[r][c] == 0 {
                continue;
            }
            let x = m[r][c] * inv % p;
            for k in c..cols {
                m[r][k] = (m[r][k] + p - x * m[rank][k] % p) % p;
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Dimension of `^p V (x) H^0(O(b + q d))` on `P^n`.
pub fn space_dim(n: usize, d: i64, b: i64, p: i64, q: i64) -> u64 {
    let nv = binom(n as u64 + d as u64, n as u64);
    let m = b + q * d;
    if p < 0 || p as u64 > nv || m < 0 {
        return 0;
    }
    binom(nv, p as u64) * binom(m as u64 + n as u64, n as u64)
}

/// Rank of the full differential out of `^p V (x) H^0(O(b + q d))`.
pub fn dense_rank(n: usize, d: i64, b: i64, p: i64, q: i64) -> usize {
    let m = b + q * d;
    if p < 1 || m < 0 {
        return 0;
    }
    let v = monomials(n + 1, d);
    if p as usize > v.len() {
        return 0;
    }
    let src_coeffs = monomials(n + 1, m);
    let tgt_coeffs = monomials(n + 1, m + d);
    let mut tgt_index = HashMap::new();
    for s in subsets(v.len(), p as usize - 1) {
        for u in &tgt_coeffs {
            let next = tgt_index.len();
            tgt_index.insert((s.clone(), u.clone()), next);
        }
    }
    let mut rows = Vec::new();
    for s in subsets(v.len(), p as usize) {
        for u in &src_coeffs {
            let mut row = vec![0u64; tgt_index.len()];
            for j in 0..s.len() {
                let mut rest = s.clone();
                let i = rest.remove(j);
                let prod: Vec<u32> = u.iter().zip(&v[i]).map(|(a, b)| a + b).collect();
                let col = tgt_index[&(rest, prod)];
                let sign = if j % 2 == 0 { 1 } else { ORACLE_PRIME - 1 };
                row[col] = (row[col] + sign) % ORACLE_PRIME;
            }
            rows.push(row);
        }
    }
    rank_mod(rows)
}

/// `dim K_{p,q}` from whole-matrix ranks.
pub fn dense_kpq(n: usize, d: i64, b: i64, p: i64, q: i64) -> u64 {
    let mid = space_dim(n, d, b, p, q);
    if mid == 0 {
        return 0;
    }
    mid - dense_rank(n, d, b, p, q) as u64 - dense_rank(n, d, b, p + 1, q - 1) as u64
}
