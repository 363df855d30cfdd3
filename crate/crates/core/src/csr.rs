//! Compressed sparse row adjacency with per-row weight sums.

/// Weighted adjacency in CSR form. Neighbour lists are sorted by index.
#[derive(Debug, Clone, PartialEq)]
pub struct Csr {
    pub(crate) offsets: Vec<usize>,
    pub(crate) targets: Vec<u32>,
    pub(crate) weights: Vec<f64>,
    pub(crate) row_sums: Vec<f64>,
}

impl Csr {
    pub fn empty(rows: usize) -> Self {
        Csr {
            offsets: vec![0; rows + 1],
            targets: Vec::new(),
            weights: Vec::new(),
            row_sums: vec![0.0; rows],
        }
    }

    /// Builds from `(row, col, weight)` triples. Triples must be unique per
    /// `(row, col)`; they are sorted here.
    pub fn from_triples(rows: usize, mut triples: Vec<(u32, u32, f64)>) -> Self {
        triples.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut offsets = vec![0usize; rows + 1];
        for &(r, _, _) in &triples {
            offsets[r as usize + 1] += 1;
        }
        for i in 0..rows {
            offsets[i + 1] += offsets[i];
        }
        let targets: Vec<u32> = triples.iter().map(|t| t.1).collect();
        let weights: Vec<f64> = triples.iter().map(|t| t.2).collect();
        let row_sums = (0..rows)
            .map(|r| weights[offsets[r]..offsets[r + 1]].iter().sum())
            .collect();
        Csr {
            offsets,
            targets,
            weights,
            row_sums,
        }
    }

    pub fn rows(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of stored (directed) entries.
    pub fn nnz(&self) -> usize {
        self.targets.len()
    }

    #[inline]
    pub fn neighbors(&self, row: u32) -> &[u32] {
        let r = row as usize;
        &self.targets[self.offsets[r]..self.offsets[r + 1]]
    }

    #[inline]
    pub fn weights(&self, row: u32) -> &[f64] {
        let r = row as usize;
        &self.weights[self.offsets[r]..self.offsets[r + 1]]
    }

    #[inline]
    pub fn row(&self, row: u32) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.neighbors(row)
            .iter()
            .copied()
            .zip(self.weights(row).iter().copied())
    }

    #[inline]
    pub fn degree(&self, row: u32) -> usize {
        let r = row as usize;
        self.offsets[r + 1] - self.offsets[r]
    }

    #[inline]
    pub fn row_sum(&self, row: u32) -> f64 {
        self.row_sums[row as usize]
    }

    /// Weight of `(row, col)`, or 0 when absent.
    pub fn weight(&self, row: u32, col: u32) -> f64 {
        let nb = self.neighbors(row);
        match nb.binary_search(&col) {
            Ok(i) => self.weights(row)[i],
            Err(_) => 0.0,
        }
    }

    pub fn contains(&self, row: u32, col: u32) -> bool {
        self.neighbors(row).binary_search(&col).is_ok()
    }

    /// All entries as `(row, col, weight)` in row-major order.
    pub fn triples(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        (0..self.rows() as u32).flat_map(move |r| self.row(r).map(move |(c, w)| (r, c, w)))
    }

    /// Transpose with `cols` rows in the result.
    pub fn transpose(&self, cols: usize) -> Csr {
        Csr::from_triples(cols, self.triples().map(|(r, c, w)| (c, r, w)).collect())
    }

    pub(crate) fn scaled(&self, factor: f64) -> Csr {
        let weights: Vec<f64> = self.weights.iter().map(|w| w * factor).collect();
        let row_sums = (0..self.rows())
            .map(|r| weights[self.offsets[r]..self.offsets[r + 1]].iter().sum())
            .collect();
        Csr {
            offsets: self.offsets.clone(),
            targets: self.targets.clone(),
            weights,
            row_sums,
        }
    }
}
