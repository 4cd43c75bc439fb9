use serde::{Deserialize, Serialize};

/// Sparse real vector with strictly increasing indices and an explicit
/// dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseVec {
    pub dim: usize,
    pub indices: Vec<u32>,
    pub values: Vec<f64>,
}

impl SparseVec {
    pub fn zeros(dim: usize) -> Self {
        SparseVec {
            dim,
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Builds from `(index, value)` pairs sorted by index; zero values are
    /// dropped.
    pub fn from_pairs(dim: usize, pairs: impl IntoIterator<Item = (u32, f64)>) -> Self {
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for (i, v) in pairs {
            debug_assert!((i as usize) < dim);
            debug_assert!(indices.last().is_none_or(|&last| last < i));
            if v != 0.0 {
                indices.push(i);
                values.push(v);
            }
        }
        SparseVec { dim, indices, values }
    }

    pub fn from_dense(dense: &[f64]) -> Self {
        Self::from_pairs(dense.len(), dense.iter().enumerate().map(|(i, &v)| (i as u32, v)))
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (i, v) in self.iter() {
            out[i] = v;
        }
        out
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices.iter().zip(&self.values).map(|(&i, &v)| (i as usize, v))
    }

    pub fn get(&self, index: usize) -> f64 {
        match self.indices.binary_search(&(index as u32)) {
            Ok(pos) => self.values[pos],
            Err(_) => 0.0,
        }
    }

    pub fn dot(&self, other: &SparseVec) -> f64 {
        let (mut a, mut b) = (0, 0);
        let mut sum = 0.0;
        while a < self.indices.len() && b < other.indices.len() {
            match self.indices[a].cmp(&other.indices[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    sum += self.values[a] * other.values[b];
                    a += 1;
                    b += 1;
                }
            }
        }
        sum
    }

    pub fn squared_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// `||self - other||^2`, merged exactly rather than via the norm identity.
    pub fn squared_distance(&self, other: &SparseVec) -> f64 {
        let (mut a, mut b) = (0, 0);
        let mut sum = 0.0;
        loop {
            let ia = self.indices.get(a);
            let ib = other.indices.get(b);
            let d = match (ia, ib) {
                (None, None) => break,
                (Some(_), None) => {
                    a += 1;
                    self.values[a - 1]
                }
                (None, Some(_)) => {
                    b += 1;
                    other.values[b - 1]
                }
                (Some(x), Some(y)) if x < y => {
                    a += 1;
                    self.values[a - 1]
                }
                (Some(x), Some(y)) if x > y => {
                    b += 1;
                    other.values[b - 1]
                }
                _ => {
                    a += 1;
                    b += 1;
                    self.values[a - 1] - other.values[b - 1]
                }
            };
            sum += d * d;
        }
        sum
    }

    /// Copy with `index` set to zero.
    pub fn without(&self, index: usize) -> SparseVec {
        SparseVec::from_pairs(
            self.dim,
            self.iter().filter(|&(i, _)| i != index).map(|(i, v)| (i as u32, v)),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_ops() {
        let a = SparseVec::from_dense(&[1.0, 0.0, 2.0]);
        let b = SparseVec::from_dense(&[0.0, 3.0, 4.0]);
        assert_eq!(a.nnz(), 2);
        assert_eq!(a.dot(&b), 8.0);
        assert_eq!(a.squared_distance(&b), 1.0 + 9.0 + 4.0);
        assert_eq!(a.get(2), 2.0);
        assert_eq!(a.get(1), 0.0);
        assert_eq!(a.without(2).to_dense(), vec![1.0, 0.0, 0.0]);
    }

    proptest! {
        #[test]
        fn matches_dense(a in prop::collection::vec(prop_oneof![Just(0.0), -5.0f64..5.0], 0..12),
                         b in prop::collection::vec(prop_oneof![Just(0.0), -5.0f64..5.0], 0..12)) {
            let n = a.len().min(b.len());
            let (a, b) = (&a[..n], &b[..n]);
            let (sa, sb) = (SparseVec::from_dense(a), SparseVec::from_dense(b));
            let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
            let dist: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
            prop_assert!((sa.dot(&sb) - dot).abs() < 1e-9);
            prop_assert!((sa.squared_distance(&sb) - dist).abs() < 1e-9);
            prop_assert_eq!(sa.to_dense(), a.to_vec());
        }
    }
}
