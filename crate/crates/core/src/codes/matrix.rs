use std::fmt::Write as _;

use crate::bits::{Bits, MAX_LEN};
use crate::error::{invalid, Error, Result};

/// Binary `k x n` generator matrix of a linear block code. Rows are linearly
/// independent.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorMatrix {
    k: usize,
    n: usize,
    rows: Vec<Bits>,
}

impl GeneratorMatrix {
    /// Validates dimensions and full row rank.
    pub fn new(n: usize, rows: Vec<Bits>) -> Result<Self> {
        let g = Self::new_unchecked(n, rows)?;
        let rank = g.rank();
        if rank != g.k {
            return Err(Error::RankDeficient {
                expected: g.k,
                found: rank,
            });
        }
        Ok(g)
    }

    /// Checks dimensions only. Used for the intermediate systematic matrices,
    /// whose rank is guaranteed by construction.
    pub(crate) fn new_unchecked(n: usize, rows: Vec<Bits>) -> Result<Self> {
        if n == 0 || n > MAX_LEN {
            return invalid(format!("code length {n} outside 1..={MAX_LEN}"));
        }
        if rows.is_empty() || rows.len() > n || rows.len() > 128 {
            return invalid(format!("{} rows for length {n}", rows.len()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.ones().any(|j| j >= n) {
                return invalid(format!("row {i} has bits beyond length {n}"));
            }
        }
        Ok(GeneratorMatrix {
            k: rows.len(),
            n,
            rows,
        })
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != n) {
            return invalid("rows of unequal length");
        }
        Self::new(n, rows.iter().map(|r| Bits::from_bits(r)).collect())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Bits] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &Bits {
        &self.rows[i]
    }

    /// Rank over GF(2).
    pub fn rank(&self) -> usize {
        rank_of(self.rows.clone())
    }

    /// Encodes a message packed as bits `0..k` of `msg`.
    #[inline]
    pub fn encode_packed(&self, msg: u128) -> Bits {
        let mut out = Bits::zero();
        let mut m = msg;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            out.xor_assign(&self.rows[i]);
        }
        out
    }

    pub fn encode(&self, message: &[u8]) -> Result<Vec<u8>> {
        if message.len() != self.k {
            return invalid(format!(
                "message has {} bits, expected {}",
                message.len(),
                self.k
            ));
        }
        Ok(self.encode_packed(pack(message)).to_vec(self.n))
    }

    /// Column `j` packed as bits `0..k`.
    pub fn column(&self, j: usize) -> u128 {
        self.rows
            .iter()
            .enumerate()
            .fold(0u128, |acc, (i, r)| acc | ((r.get(j) as u128) << i))
    }

    /// Plain-text form: a `k n` header, then one row per line as a
    /// hexadecimal integer whose bit `j` is position `j` of the row, zero
    /// padded to `ceil(n / 4)` digits.
    pub fn to_hex_text(&self) -> String {
        let digits = self.n.div_ceil(4);
        let mut out = format!("{} {}\n", self.k, self.n);
        for row in &self.rows {
            for d in (0..digits).rev() {
                let nibble = (0..4).fold(0u8, |acc, b| {
                    let j = 4 * d + b;
                    acc | (((j < self.n && row.get(j)) as u8) << b)
                });
                write!(out, "{nibble:x}").expect("writing to a String");
            }
            out.push('\n');
        }
        out
    }

    /// Parses the [`to_hex_text`](Self::to_hex_text) format. Rows must be
    /// linearly independent.
    pub fn from_hex_text(text: &str) -> Result<Self> {
        let perr = |line: usize, column: usize, message: String| Error::Parse {
            line,
            column,
            message,
        };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| perr(1, 1, "missing `k n` header".into()))?;
        let mut fields = header.split_whitespace();
        let mut number = |name: &str| -> Result<usize> {
            let field = fields
                .next()
                .ok_or_else(|| perr(1, 1, format!("header lacks {name}")))?;
            field
                .parse::<usize>()
                .map_err(|e| perr(1, 1, format!("bad {name} `{field}`: {e}")))
        };
        let k = number("k")?;
        let n = number("n")?;
        if fields.next().is_some() {
            return Err(perr(1, 1, "trailing fields in header".into()));
        }
        if n == 0 || n > MAX_LEN || k == 0 || k > n.min(128) {
            return Err(perr(1, 1, format!("unsupported dimensions k={k} n={n}")));
        }
        let digits = n.div_ceil(4);
        let mut rows = Vec::with_capacity(k);
        for (idx, line) in lines {
            let line_no = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if rows.len() == k {
                return Err(perr(line_no, 1, format!("more than {k} rows")));
            }
            if trimmed.len() != digits {
                return Err(perr(
                    line_no,
                    1,
                    format!("row has {} digits, expected {digits}", trimmed.len()),
                ));
            }
            let mut row = Bits::zero();
            for (pos, ch) in trimmed.chars().enumerate() {
                let v = ch.to_digit(16).ok_or_else(|| {
                    perr(line_no, pos + 1, format!("`{ch}` is not a hex digit"))
                })?;
                let d = digits - 1 - pos;
                for b in 0..4 {
                    if v >> b & 1 == 1 {
                        let j = 4 * d + b;
                        if j >= n {
                            return Err(perr(
                                line_no,
                                pos + 1,
                                format!("bit {j} set beyond length {n}"),
                            ));
                        }
                        row.set(j);
                    }
                }
            }
            rows.push(row);
        }
        if rows.len() != k {
            return Err(perr(
                text.lines().count().max(1),
                1,
                format!("found {} rows, expected {k}", rows.len()),
            ));
        }
        Self::new(n, rows)
    }
}

pub(crate) fn pack(bits: &[u8]) -> u128 {
    bits.iter()
        .enumerate()
        .fold(0u128, |acc, (i, &b)| acc | (((b & 1) as u128) << i))
}

fn rank_of(mut rows: Vec<Bits>) -> usize {
    let mut rank = 0;
    while let Some(pos) = rows.iter().position(|r| !r.is_zero()) {
        let pivot_row = rows.swap_remove(pos);
        let pivot = pivot_row.first_one().expect("nonzero row");
        for r in rows.iter_mut() {
            if r.get(pivot) {
                r.xor_assign(&pivot_row);
            }
        }
        rank += 1;
    }
    rank
}

/// Reduced echelon basis of a code's row space, for membership tests.
#[derive(Clone, Debug)]
pub struct MembershipTest {
    basis: Vec<(usize, Bits)>,
}

impl MembershipTest {
    pub fn new(g: &GeneratorMatrix) -> Self {
        let mut basis: Vec<(usize, Bits)> = Vec::with_capacity(g.k());
        for row in g.rows() {
            let mut r = *row;
            for (p, b) in &basis {
                if r.get(*p) {
                    r.xor_assign(b);
                }
            }
            if let Some(p) = r.first_one() {
                for (_, b) in basis.iter_mut() {
                    if b.get(p) {
                        b.xor_assign(&r);
                    }
                }
                basis.push((p, r));
            }
        }
        MembershipTest { basis }
    }

    pub fn contains(&self, word: &Bits) -> bool {
        let mut r = *word;
        for (p, b) in &self.basis {
            if r.get(*p) {
                r.xor_assign(b);
            }
        }
        r.is_zero()
    }
}

/// Exact minimum distance by enumerating all `2^k` codewords (Gray-code
/// order, one row addition per step).
pub fn min_distance_bruteforce(g: &GeneratorMatrix) -> Result<usize> {
    if g.k() > 20 {
        return Err(Error::Refused(format!(
            "exhaustive enumeration of 2^{} codewords",
            g.k()
        )));
    }
    let mut word = Bits::zero();
    let mut best = usize::MAX;
    for step in 1u64..(1u64 << g.k()) {
        let flip = step.trailing_zeros() as usize;
        word.xor_assign(g.row(flip));
        best = best.min(word.count_ones() as usize);
    }
    Ok(best)
}
