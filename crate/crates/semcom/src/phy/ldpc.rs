//! Regular (3,6) rate-1/2 LDPC codes: seeded construction, systematic
//! encoding, and log-domain sum-product decoding.

use rand::prelude::*;
use rand_chacha::ChaCha20Rng;

use super::bits::BitBlock;
use super::PhyError;

const COL_WEIGHT: usize = 3;
const ROW_WEIGHT: usize = 6;
const MAX_CONSTRUCTION_ATTEMPTS: usize = 100;
/// Clamp on variable-to-check messages; tanh(x/2) stays strictly below 1.
const MSG_CLAMP: f64 = 25.0;

/// A constructed rate-1/2 code together with its systematic encoder.
#[derive(Debug, Clone)]
pub struct LdpcCode {
    n: usize,
    k: usize,
    construction_seed: u64,
    /// Variable indices per check, `ROW_WEIGHT` each, check-major.
    check_neighbors: Vec<u32>,
    /// Check indices per variable, `COL_WEIGHT` each, variable-major.
    var_neighbors: Vec<u32>,
    /// Columns carrying message bits, ascending.
    free_cols: Vec<usize>,
    /// Columns carrying parity bits, ascending; `pivot_cols[i]` pairs with
    /// `parity_gen[i]`.
    pivot_cols: Vec<usize>,
    /// Row `i`: bitset over the k message positions; parity bit `i` is the
    /// GF(2) dot product with the message.
    parity_gen: Vec<Vec<u64>>,
}

impl LdpcCode {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn construction_seed(&self) -> u64 {
        self.construction_seed
    }

    pub fn checks(&self) -> usize {
        self.n - self.k
    }

    /// Codeword positions holding the message, in message order.
    pub fn message_positions(&self) -> &[usize] {
        &self.free_cols
    }

    pub fn check_row(&self, check: usize) -> &[u32] {
        &self.check_neighbors[check * ROW_WEIGHT..(check + 1) * ROW_WEIGHT]
    }

    /// True when every parity check is satisfied.
    pub fn is_codeword(&self, bits: &BitBlock) -> bool {
        debug_assert_eq!(bits.len(), self.n);
        (0..self.checks()).all(|c| {
            self.check_row(c)
                .iter()
                .fold(0u8, |acc, v| acc ^ bits[*v as usize])
                == 0
        })
    }

    pub fn column_weight(&self, var: usize) -> usize {
        self.var_neighbors[var * COL_WEIGHT..(var + 1) * COL_WEIGHT].len()
    }
}

/// Builds a regular (3,6) code from seeded permutations.
///
/// `n` is rounded up to the nearest multiple of 6. The parity-check matrix
/// is two square blocks side by side, each the superposition of three
/// pairwise-disjoint permutation matrices, which keeps every column at
/// weight 3 and every row at weight 6. Construction resamples up to 100
/// times, preferring samples without length-4 cycles, and requires full
/// GF(2) rank so Gaussian elimination (with column pivoting) can produce a
/// systematic encoder.
pub fn ldpc_build(n: usize, seed: u64) -> Result<LdpcCode, PhyError> {
    let n = n.div_ceil(ROW_WEIGHT) * ROW_WEIGHT;
    let m = n / 2;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);

    let mut best: Option<(usize, Candidate)> = None;
    for _ in 0..MAX_CONSTRUCTION_ATTEMPTS {
        let rows = sample_parity_matrix(m, &mut rng);
        let cycles = count_four_cycles(&rows, n);
        if best.as_ref().is_some_and(|(c, _)| *c <= cycles) {
            continue;
        }
        if let Some(systematic) = systematic_form(&rows, m, n) {
            let candidate = Candidate { rows, systematic };
            best = Some((cycles, candidate));
            if cycles == 0 {
                break;
            }
        }
    }

    let (_, candidate) = best.ok_or(PhyError::RankDeficient {
        attempts: MAX_CONSTRUCTION_ATTEMPTS,
    })?;
    Ok(finish_code(n, m, seed, candidate))
}

struct Candidate {
    rows: Vec<Vec<u64>>,
    systematic: Systematic,
}

struct Systematic {
    free_cols: Vec<usize>,
    pivot_cols: Vec<usize>,
    parity_gen: Vec<Vec<u64>>,
}

fn finish_code(n: usize, m: usize, seed: u64, candidate: Candidate) -> LdpcCode {
    let mut check_neighbors = Vec::with_capacity(m * ROW_WEIGHT);
    let mut columns: Vec<Vec<u32>> = vec![Vec::with_capacity(COL_WEIGHT); n];
    for (check, row) in candidate.rows.iter().enumerate() {
        for col in iter_set_bits(row, n) {
            check_neighbors.push(col as u32);
            columns[col].push(check as u32);
        }
    }
    debug_assert!(columns.iter().all(|c| c.len() == COL_WEIGHT));
    let var_neighbors = columns.into_iter().flatten().collect();

    LdpcCode {
        n,
        k: n - m,
        construction_seed: seed,
        check_neighbors,
        var_neighbors,
        free_cols: candidate.systematic.free_cols,
        pivot_cols: candidate.systematic.pivot_cols,
        parity_gen: candidate.systematic.parity_gen,
    }
}

/// One m x 2m parity-check matrix sample, rows as bitsets.
fn sample_parity_matrix(m: usize, rng: &mut ChaCha20Rng) -> Vec<Vec<u64>> {
    let n = 2 * m;
    let words = n.div_ceil(64);
    let mut rows = vec![vec![0u64; words]; m];
    for block in 0..2 {
        let perms = disjoint_permutations(m, rng);
        for perm in &perms {
            for (row, col) in perm.iter().enumerate() {
                let col = block * m + col;
                rows[row][col / 64] |= 1u64 << (col % 64);
            }
        }
    }
    rows
}

/// Three permutations of `0..m` that disagree at every position.
fn disjoint_permutations(m: usize, rng: &mut ChaCha20Rng) -> [Vec<usize>; 3] {
    let mut base: Vec<usize> = (0..m).collect();
    base.shuffle(rng);
    let first = base.clone();
    let second = loop {
        base.shuffle(rng);
        if base.iter().zip(&first).all(|(a, b)| a != b) {
            break base.clone();
        }
    };
    let third = loop {
        base.shuffle(rng);
        if base
            .iter()
            .zip(first.iter().zip(&second))
            .all(|(a, (b, c))| a != b && a != c)
        {
            break base.clone();
        }
    };
    [first, second, third]
}

fn iter_set_bits<'a>(row: &'a [u64], n: usize) -> impl Iterator<Item = usize> + 'a {
    (0..n).filter(move |c| row[c / 64] >> (c % 64) & 1 == 1)
}

/// Number of column pairs shared by two rows, summed over row pairs; each
/// shared pair is one length-4 cycle in the Tanner graph.
fn count_four_cycles(rows: &[Vec<u64>], _n: usize) -> usize {
    let mut cycles = 0;
    for (i, a) in rows.iter().enumerate() {
        for b in rows.iter().skip(i + 1) {
            let overlap: u32 = a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum();
            let overlap = overlap as usize;
            if overlap >= 2 {
                cycles += overlap * (overlap - 1) / 2;
            }
        }
    }
    cycles
}

/// Row-reduces H over GF(2) with column pivoting. Returns the message
/// (free) columns, parity (pivot) columns, and the parity generator rows,
/// or `None` when the rank falls short of `m`.
fn systematic_form(h_rows: &[Vec<u64>], m: usize, n: usize) -> Option<Systematic> {
    let mut rows = h_rows.to_vec();
    let get = |rows: &[Vec<u64>], r: usize, c: usize| rows[r][c / 64] >> (c % 64) & 1 == 1;

    let mut pivot_cols = Vec::with_capacity(m);
    let mut is_pivot = vec![false; n];
    let mut rank = 0;
    for col in 0..n {
        if rank == m {
            break;
        }
        let Some(pivot_row) = (rank..m).find(|r| get(&rows, *r, col)) else {
            continue;
        };
        rows.swap(rank, pivot_row);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[col / 64] >> (col % 64) & 1 == 1 {
                for (w, p) in row.iter_mut().zip(&pivot) {
                    *w ^= p;
                }
            }
        }
        pivot_cols.push(col);
        is_pivot[col] = true;
        rank += 1;
    }
    if rank < m {
        return None;
    }

    let free_cols: Vec<usize> = (0..n).filter(|c| !is_pivot[*c]).collect();
    let k = free_cols.len();
    let gen_words = k.div_ceil(64);
    let parity_gen = rows[..m]
        .iter()
        .map(|row| {
            let mut gen_row = vec![0u64; gen_words];
            for (j, col) in free_cols.iter().enumerate() {
                if row[col / 64] >> (col % 64) & 1 == 1 {
                    gen_row[j / 64] |= 1u64 << (j % 64);
                }
            }
            gen_row
        })
        .collect();

    Some(Systematic {
        free_cols,
        pivot_cols,
        parity_gen,
    })
}

/// Systematic encoding: message bits occupy the free columns, parity bits
/// solve the checks. Every output satisfies H c = 0.
pub fn ldpc_encode(code: &LdpcCode, message: &BitBlock) -> Result<BitBlock, PhyError> {
    if message.len() != code.k {
        return Err(PhyError::LengthMismatch {
            expected: code.k,
            found: message.len(),
        });
    }

    let words = code.k.div_ceil(64);
    let mut packed = vec![0u64; words];
    for (j, bit) in message.iter().enumerate() {
        if *bit == 1 {
            packed[j / 64] |= 1u64 << (j % 64);
        }
    }

    let mut bits = vec![0u8; code.n];
    for (j, col) in code.free_cols.iter().enumerate() {
        bits[*col] = message[j];
    }
    for (i, col) in code.pivot_cols.iter().enumerate() {
        let parity: u32 = code.parity_gen[i]
            .iter()
            .zip(&packed)
            .map(|(g, u)| (g & u).count_ones())
            .sum();
        bits[*col] = (parity & 1) as u8;
    }
    let codeword = BitBlock::new(bits)?;
    debug_assert!(code.is_codeword(&codeword));
    Ok(codeword)
}

/// Outcome of belief-propagation decoding.
#[derive(Debug, Clone)]
pub struct DecodeResult {
    /// Message bits extracted from the systematic positions.
    pub message: BitBlock,
    /// True when the hard decision satisfied every check.
    pub converged: bool,
    /// Iterations actually run (0 when the channel hard decision already
    /// satisfies the checks).
    pub iterations: usize,
}

/// Log-domain sum-product decoding with a flooding schedule and early exit
/// on a zero syndrome. Non-convergence is reported, never an error.
pub fn ldpc_decode(
    code: &LdpcCode,
    llr: &[f64],
    max_iter: usize,
) -> Result<DecodeResult, PhyError> {
    if llr.len() != code.n {
        return Err(PhyError::LengthMismatch {
            expected: code.n,
            found: llr.len(),
        });
    }
    if llr.iter().any(|l| !l.is_finite()) {
        return Err(PhyError::NonFiniteLlr);
    }

    let m = code.checks();
    let n_edges = m * ROW_WEIGHT;
    // Edge e = check * ROW_WEIGHT + slot, variable code.check_neighbors[e].
    let mut edges_of_var: Vec<[u32; COL_WEIGHT]> = vec![[0; COL_WEIGHT]; code.n];
    {
        let mut fill = vec![0usize; code.n];
        for (e, v) in code.check_neighbors.iter().enumerate() {
            let v = *v as usize;
            edges_of_var[v][fill[v]] = e as u32;
            fill[v] += 1;
        }
    }

    let mut msg_v2c: Vec<f64> = code
        .check_neighbors
        .iter()
        .map(|v| llr[*v as usize])
        .collect();
    let mut msg_c2v = vec![0.0f64; n_edges];
    let mut posterior: Vec<f64> = llr.to_vec();
    let mut hard = vec![0u8; code.n];

    let hard_from = |posterior: &[f64], hard: &mut [u8]| {
        for (h, p) in hard.iter_mut().zip(posterior) {
            *h = u8::from(*p < 0.0);
        }
    };
    let syndrome_ok = |hard: &[u8]| {
        (0..m).all(|c| {
            code.check_row(c)
                .iter()
                .fold(0u8, |acc, v| acc ^ hard[*v as usize])
                == 0
        })
    };

    hard_from(&posterior, &mut hard);
    let mut converged = syndrome_ok(&hard);
    let mut iterations = 0;

    while !converged && iterations < max_iter {
        iterations += 1;

        // Check-node update: leave-one-out tanh products per check.
        for c in 0..m {
            let base = c * ROW_WEIGHT;
            let mut t = [0.0f64; ROW_WEIGHT];
            for (slot, tv) in t.iter_mut().enumerate() {
                *tv = (msg_v2c[base + slot].clamp(-MSG_CLAMP, MSG_CLAMP) / 2.0).tanh();
            }
            let mut prefix = [1.0f64; ROW_WEIGHT + 1];
            for slot in 0..ROW_WEIGHT {
                prefix[slot + 1] = prefix[slot] * t[slot];
            }
            let mut suffix = 1.0f64;
            for slot in (0..ROW_WEIGHT).rev() {
                let product = prefix[slot] * suffix;
                msg_c2v[base + slot] = 2.0 * atanh_clamped(product);
                suffix *= t[slot];
            }
        }

        // Variable-node update and posterior.
        for v in 0..code.n {
            let mut total = llr[v];
            for e in edges_of_var[v] {
                total += msg_c2v[e as usize];
            }
            posterior[v] = total;
            for e in edges_of_var[v] {
                msg_v2c[e as usize] = total - msg_c2v[e as usize];
            }
        }

        hard_from(&posterior, &mut hard);
        converged = syndrome_ok(&hard);
    }

    let message_bits: Vec<u8> = code.free_cols.iter().map(|c| hard[*c]).collect();
    Ok(DecodeResult {
        message: BitBlock::new(message_bits)?,
        converged,
        iterations,
    })
}

fn atanh_clamped(x: f64) -> f64 {
    debug_assert!(x.abs() < 1.0);
    x.atanh().clamp(-2.0 * MSG_CLAMP, 2.0 * MSG_CLAMP)
}
