//! Dense per-(BS, UE) storage.

use std::ops::{Index, IndexMut};

#[derive(Debug, Clone, PartialEq)]
pub struct LinkGrid<T> {
    n_bs: usize,
    n_ue: usize,
    data: Vec<T>,
}

impl<T> LinkGrid<T> {
    pub fn from_fn(n_bs: usize, n_ue: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n_bs * n_ue);
        for bs in 0..n_bs {
            for ue in 0..n_ue {
                data.push(f(bs, ue));
            }
        }
        Self { n_bs, n_ue, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let n_bs = rows.len();
        let n_ue = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == n_ue), "ragged rows");
        Self {
            n_bs,
            n_ue,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn n_bs(&self) -> usize {
        self.n_bs
    }

    pub fn n_ue(&self) -> usize {
        self.n_ue
    }

    /// All links of one BS, indexed by UE.
    pub fn row(&self, bs: usize) -> &[T] {
        &self.data[bs * self.n_ue..(bs + 1) * self.n_ue]
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> LinkGrid<U> {
        LinkGrid {
            n_bs: self.n_bs,
            n_ue: self.n_ue,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<T> Index<(usize, usize)> for LinkGrid<T> {
    type Output = T;

    fn index(&self, (bs, ue): (usize, usize)) -> &T {
        debug_assert!(bs < self.n_bs && ue < self.n_ue);
        &self.data[bs * self.n_ue + ue]
    }
}

impl<T> IndexMut<(usize, usize)> for LinkGrid<T> {
    fn index_mut(&mut self, (bs, ue): (usize, usize)) -> &mut T {
        debug_assert!(bs < self.n_bs && ue < self.n_ue);
        &mut self.data[bs * self.n_ue + ue]
    }
}
