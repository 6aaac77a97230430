//! Dense linear algebra over GF(2) on word-packed rows.
//!
//! Columns are numbered by `(word, bit)` in increasing order, so for a Pauli
//! row (X-block words followed by Z-block words) every X column precedes every
//! Z column.

use crate::pauli::SignedPauli;

pub type BitRow = Vec<u64>;

/// The unsigned bit row of a Pauli: X-block words, then Z-block words.
pub fn pauli_row(p: &SignedPauli) -> BitRow {
    let mut row = p.x_words().to_vec();
    row.extend_from_slice(p.z_words());
    row
}

/// Rebuilds a `+`-signed Pauli from a row produced by [`pauli_row`].
pub fn row_to_pauli(n: usize, row: &[u64]) -> SignedPauli {
    let w = crate::pauli::words_for(n);
    SignedPauli::from_words(n, row[..w].to_vec(), row[w..2 * w].to_vec(), false)
}

pub fn get(row: &[u64], col: usize) -> bool {
    (row[col / 64] >> (col % 64)) & 1 == 1
}

pub fn set(row: &mut [u64], col: usize, v: bool) {
    let mask = 1u64 << (col % 64);
    if v {
        row[col / 64] |= mask;
    } else {
        row[col / 64] &= !mask;
    }
}

pub fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

pub fn is_zero(row: &[u64]) -> bool {
    row.iter().all(|&w| w == 0)
}

/// Index of the lowest set column, if any.
pub fn leading(row: &[u64]) -> Option<usize> {
    row.iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(i, &w)| i * 64 + w.trailing_zeros() as usize)
}

/// Reduced row echelon form. Returns the non-zero rows and their pivot columns,
/// sorted by pivot.
pub fn rref(rows: &[BitRow]) -> (Vec<BitRow>, Vec<usize>) {
    let mut basis: Vec<BitRow> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for r in rows {
        let mut v = r.clone();
        for (b, &p) in basis.iter().zip(&pivots) {
            if get(&v, p) {
                xor_into(&mut v, b);
            }
        }
        if let Some(p) = leading(&v) {
            for b in basis.iter_mut() {
                if get(b, p) {
                    xor_into(b, &v);
                }
            }
            basis.push(v);
            pivots.push(p);
        }
    }
    let mut order: Vec<usize> = (0..basis.len()).collect();
    order.sort_by_key(|&i| pivots[i]);
    (order.iter().map(|&i| basis[i].clone()).collect(), order.iter().map(|&i| pivots[i]).collect())
}

pub fn rank(rows: &[BitRow]) -> usize {
    rref(rows).0.len()
}

/// Solves `coeffs · basis = target`, returning the coefficient bit vector over
/// the input rows, or `None` when `target` is outside the span.
pub fn express(basis: &[BitRow], target: &[u64]) -> Option<Vec<bool>> {
    SpanSolver::new(basis).express(target)
}

/// Basis of the intersection of two row spaces (Zassenhaus).
pub fn intersect_spaces(a: &[BitRow], b: &[BitRow]) -> Vec<BitRow> {
    let len = a.first().or(b.first()).map(|r| r.len()).unwrap_or(0);
    let mut rows = Vec::new();
    for r in a {
        let mut row = r.clone();
        row.extend_from_slice(r);
        rows.push(row);
    }
    for r in b {
        let mut row = r.clone();
        row.resize(row.len() + len, 0);
        rows.push(row);
    }
    let (reduced, pivots) = rref(&rows);
    reduced
        .into_iter()
        .zip(pivots)
        .filter(|(_, p)| *p >= len * 64)
        .map(|(r, _)| r[len..].to_vec())
        .collect()
}

/// Reusable solver for expressing vectors in the span of a fixed row list.
pub struct SpanSolver {
    rows: Vec<(BitRow, Vec<bool>)>,
    pivots: Vec<usize>,
    len: usize,
}

impl SpanSolver {
    pub fn new(basis: &[BitRow]) -> Self {
        let k = basis.len();
        let mut rows: Vec<(BitRow, Vec<bool>)> = Vec::new();
        let mut pivots: Vec<usize> = Vec::new();
        for (i, b) in basis.iter().enumerate() {
            let mut v = b.clone();
            let mut c = vec![false; k];
            c[i] = true;
            for ((r, rc), &p) in rows.iter().zip(&pivots) {
                if get(&v, p) {
                    xor_into(&mut v, r);
                    for j in 0..k {
                        c[j] ^= rc[j];
                    }
                }
            }
            if let Some(p) = leading(&v) {
                rows.push((v, c));
                pivots.push(p);
            }
        }
        SpanSolver { rows, pivots, len: k }
    }

    /// Number of independent input rows.
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Coefficients over the input rows, or `None` outside the span.
    pub fn express(&self, target: &[u64]) -> Option<Vec<bool>> {
        let mut v = target.to_vec();
        let mut c = vec![false; self.len];
        for ((r, rc), &p) in self.rows.iter().zip(&self.pivots) {
            if get(&v, p) {
                xor_into(&mut v, r);
                for j in 0..self.len {
                    c[j] ^= rc[j];
                }
            }
        }
        if is_zero(&v) {
            Some(c)
        } else {
            None
        }
    }
}

/// Some solution `d` of `rows[i] · d = rhs[i]` (dot product over GF(2)), or
/// `None` when inconsistent. Free variables are set to zero.
pub fn solve_system(rows: &[BitRow], rhs: &[bool], words: usize) -> Option<BitRow> {
    let mut reduced: Vec<(BitRow, bool, usize)> = Vec::new();
    for (r, &b) in rows.iter().zip(rhs) {
        let mut v = r.clone();
        let mut bit = b;
        for (row, rb, p) in &reduced {
            if get(&v, *p) {
                xor_into(&mut v, row);
                bit ^= rb;
            }
        }
        match leading(&v) {
            None => {
                if bit {
                    return None;
                }
            }
            Some(p) => {
                for (row, rb, _) in reduced.iter_mut() {
                    if get(row, p) {
                        xor_into(row, &v);
                        *rb ^= bit;
                    }
                }
                reduced.push((v, bit, p));
            }
        }
    }
    let mut d = vec![0u64; words];
    for (_, b, p) in &reduced {
        if *b {
            set(&mut d, *p, true);
        }
    }
    Some(d)
}

pub fn dot(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum::<u32>() % 2 == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(bits: &[usize], words: usize) -> BitRow {
        let mut r = vec![0; words];
        for &b in bits {
            set(&mut r, b, true);
        }
        r
    }

    #[test]
    fn rank_and_express() {
        let rows = vec![row(&[0, 1], 1), row(&[1, 2], 1), row(&[0, 2], 1)];
        assert_eq!(rank(&rows), 2);
        let c = express(&rows[..2], &row(&[0, 2], 1)).unwrap();
        assert_eq!(c, vec![true, true]);
        assert!(express(&rows[..2], &row(&[3], 1)).is_none());
    }

    #[test]
    fn linear_system() {
        let rows = vec![row(&[0, 1], 1), row(&[1], 1)];
        let d = solve_system(&rows, &[true, false], 1).unwrap();
        assert!(dot(&rows[0], &d) && !dot(&rows[1], &d));
        let inconsistent = vec![row(&[0], 1), row(&[0], 1)];
        assert!(solve_system(&inconsistent, &[true, false], 1).is_none());
    }

    #[test]
    fn zassenhaus_matches_enumeration() {
        let a = vec![row(&[0], 1), row(&[1], 1)];
        let b = vec![row(&[0, 1], 1), row(&[2], 1)];
        let i = intersect_spaces(&a, &b);
        assert_eq!(i.len(), 1);
        assert_eq!(i[0], row(&[0, 1], 1));
    }
}
