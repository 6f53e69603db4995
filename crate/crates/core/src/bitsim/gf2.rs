//! Incremental row reduction over GF(2) for fixed-width coefficient rows.
//!
//! Each stored row has its lowest set bit as pivot and no bits below it, so a
//! new row is reduced by repeatedly clearing its lowest bit against the row
//! owning that pivot.

#[derive(Debug, Clone)]
pub struct Eliminator {
    width: usize,
    words: usize,
    /// Row index owning each pivot column.
    pivot_row: Vec<Option<u32>>,
    rows: Vec<u64>,
    rhs: Vec<bool>,
    rank: usize,
}

impl Eliminator {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            words: width.div_ceil(64),
            pivot_row: vec![None; width],
            rows: Vec::new(),
            rhs: Vec::new(),
            rank: 0,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Inserts `row` (with right-hand side `rhs`); returns whether the rank grew.
    pub fn insert(&mut self, row: &mut [u64], mut rhs: bool) -> bool {
        debug_assert_eq!(row.len(), self.words);
        loop {
            let Some(col) = lowest_bit(row) else {
                return false;
            };
            match self.pivot_row[col] {
                Some(r) => {
                    let base = r as usize * self.words;
                    for (a, b) in row.iter_mut().zip(&self.rows[base..base + self.words]) {
                        *a ^= b;
                    }
                    rhs ^= self.rhs[r as usize];
                }
                None => {
                    self.pivot_row[col] = Some(self.rhs.len() as u32);
                    self.rows.extend_from_slice(row);
                    self.rhs.push(rhs);
                    self.rank += 1;
                    return true;
                }
            }
        }
    }

    /// Solves for the columns in `unknown` (which must all be pivots).
    /// Returns `None` if some unknown column has no pivot.
    pub fn solve(&self, unknown: &[u64]) -> Option<Vec<u64>> {
        let mut x = vec![0u64; self.words];
        let mut cols: Vec<usize> = Vec::new();
        for (wi, &w) in unknown.iter().enumerate() {
            let mut word = w;
            while word != 0 {
                cols.push(wi * 64 + word.trailing_zeros() as usize);
                word &= word - 1;
            }
        }
        for &col in cols.iter().rev() {
            let r = self.pivot_row[col]? as usize;
            let row = &self.rows[r * self.words..(r + 1) * self.words];
            let mut acc = self.rhs[r];
            for (a, b) in row.iter().zip(&x) {
                acc ^= (a & b).count_ones() & 1 == 1;
            }
            if acc {
                x[col >> 6] |= 1 << (col & 63);
            }
        }
        Some(x)
    }
}

fn lowest_bit(row: &[u64]) -> Option<usize> {
    row.iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

/// Parity of `a & b`.
#[inline]
pub fn dot(a: &[u64], b: &[u64]) -> bool {
    a.iter()
        .zip(b)
        .fold(0u32, |acc, (x, y)| acc ^ (x & y).count_ones())
        & 1
        == 1
}
