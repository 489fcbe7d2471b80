//! Finite one- or two-dimensional matrices.
//!
//! Entries are stored row-major with the last axis varying fastest. For the
//! two-dimensional patterns produced by the column encoding the first axis is
//! horizontal and the second (last) axis is vertical, read bottom to top.
//! [`Pattern::get`] takes 1-based indices, matching the matrix notation
//! `M_k` with `k` in `[1, h_1] x ... x [1, h_d]`.

use alloc::vec::Vec;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pattern<T> {
    shape: Vec<usize>,
    data: Vec<T>,
}

impl<T: Clone> Pattern<T> {
    pub fn filled(shape: &[usize], value: T) -> Self {
        let len = shape.iter().product();
        Pattern { shape: shape.to_vec(), data: alloc::vec![value; len] }
    }
}

impl<T> Pattern<T> {
    /// Builds a pattern from row-major data. Panics if the length does not
    /// match the shape.
    pub fn from_vec(shape: &[usize], data: Vec<T>) -> Self {
        assert!(!shape.is_empty() && shape.len() <= 2, "patterns are 1-D or 2-D");
        assert_eq!(shape.iter().product::<usize>(), data.len(), "shape/data length mismatch");
        Pattern { shape: shape.to_vec(), data }
    }

    pub fn line(data: Vec<T>) -> Self {
        let n = data.len();
        Self::from_vec(&[n], data)
    }

    pub fn from_fn(shape: &[usize], mut f: impl FnMut(&[usize]) -> T) -> Self {
        let data = match *shape {
            [w] => (0..w).map(|a| f(&[a])).collect(),
            [w, h] => {
                let mut v = Vec::with_capacity(w * h);
                for a in 0..w {
                    for b in 0..h {
                        v.push(f(&[a, b]));
                    }
                }
                v
            }
            _ => panic!("patterns are 1-D or 2-D"),
        };
        Pattern { shape: shape.to_vec(), data }
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    /// The order `h` of the matrix.
    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    fn offset0(&self, idx: &[usize]) -> Option<usize> {
        if idx.len() != self.shape.len() {
            return None;
        }
        let mut off = 0;
        for (&i, &n) in idx.iter().zip(&self.shape) {
            if i >= n {
                return None;
            }
            off = off * n + i;
        }
        Some(off)
    }

    /// 0-based access.
    pub fn get0(&self, idx: &[usize]) -> Option<&T> {
        self.offset0(idx).map(|o| &self.data[o])
    }

    /// 1-based access: `get(&[1])` is the first entry.
    pub fn get(&self, idx: &[usize]) -> Option<&T> {
        if idx.contains(&0) {
            return None;
        }
        let zero: Vec<usize> = idx.iter().map(|i| i - 1).collect();
        self.get0(&zero)
    }

    /// Sub-matrix starting at the 0-based corner `lo` with the given order.
    pub fn crop(&self, lo: &[usize], shape: &[usize]) -> Pattern<T>
    where
        T: Clone,
    {
        assert_eq!(lo.len(), self.dim());
        Pattern::from_fn(shape, |k| {
            let idx: Vec<usize> = k.iter().zip(lo).map(|(a, b)| a + b).collect();
            self.get0(&idx).expect("crop out of bounds").clone()
        })
    }
}
