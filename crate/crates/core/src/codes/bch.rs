//! Extended primitive narrow-sense BCH codes of length 128.

use super::matrix::GeneratorMatrix;
use crate::bits::Bits;
use crate::error::{invalid, Result};
use crate::gf::FieldSpec;

/// Dimensions supported by [`ebch_generator`] with their minimum distances.
pub const EBCH_PARAMS: [(usize, usize); 3] = [(22, 48), (36, 32), (64, 22)];

/// Minimum distance of the extended (128, k) BCH code.
pub fn ebch_min_distance(k: usize) -> Option<usize> {
    EBCH_PARAMS.iter().find(|(kk, _)| *kk == k).map(|&(_, d)| d)
}

/// Binary generator polynomial of the narrow-sense BCH(127, k) code, lowest
/// degree first. Cyclotomic cosets of `alpha^1, alpha^2, ...` are added until
/// the degree reaches `127 - k`.
pub fn bch127_generator_poly(k: usize) -> Result<Vec<u8>> {
    let field = FieldSpec::gf128();
    let n = field.order();
    if k == 0 || k >= n {
        return invalid(format!("BCH(127,{k}) has no meaning"));
    }
    let target = n - k;
    let mut in_roots = vec![false; n];
    let mut roots = Vec::new();
    let mut i = 1;
    while roots.len() < target && i < n {
        if !in_roots[i] {
            let mut e = i;
            loop {
                in_roots[e] = true;
                roots.push(e);
                e = (2 * e) % n;
                if e == i {
                    break;
                }
            }
        }
        i += 1;
    }
    if roots.len() != target {
        return invalid(format!("no narrow-sense BCH(127,{k}) code"));
    }
    // product of (x + alpha^e), coefficients lowest degree first
    let mut poly = vec![1u16];
    for &e in &roots {
        let root = field.alpha_pow(e);
        let mut next = vec![0u16; poly.len() + 1];
        for (j, &c) in poly.iter().enumerate() {
            next[j + 1] ^= c;
            next[j] ^= field.mul_unchecked(c, root);
        }
        poly = next;
    }
    assert!(poly.iter().all(|&c| c <= 1), "coefficients outside GF(2)");
    Ok(poly.into_iter().map(|c| c as u8).collect())
}

/// (128, k) extended BCH generator matrix: the shifts `x^i g(x)` of the
/// BCH(127, k) generator polynomial, each extended by an even-parity bit.
pub fn ebch_generator(k: usize) -> Result<GeneratorMatrix> {
    if ebch_min_distance(k).is_none() {
        return invalid(format!("eBCH(128,{k}) is not supported; use 22, 36 or 64"));
    }
    let g = bch127_generator_poly(k)?;
    let rows = (0..k)
        .map(|i| {
            let mut row = Bits::zero();
            for (j, &c) in g.iter().enumerate() {
                if c == 1 {
                    row.set(i + j);
                }
            }
            if row.count_ones() % 2 == 1 {
                row.set(127);
            }
            row
        })
        .collect();
    GeneratorMatrix::new(128, rows)
}
