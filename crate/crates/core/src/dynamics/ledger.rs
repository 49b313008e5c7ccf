use serde::{Deserialize, Serialize};

/// Accumulated collision local time per unordered pair, plus the increments
/// of the most recent step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalTimeLedger {
    n: usize,
    ell: Vec<f64>,
    #[serde(skip)]
    last: Vec<f64>,
}

pub(crate) fn pair_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

impl LocalTimeLedger {
    pub fn new(n: usize) -> Self {
        let m = n * n.saturating_sub(1) / 2;
        Self {
            n,
            ell: vec![0.0; m],
            last: vec![0.0; m],
        }
    }

    pub fn from_values(n: usize, ell: Vec<f64>) -> Option<Self> {
        let m = n * n.saturating_sub(1) / 2;
        (ell.len() == m).then(|| Self {
            n,
            ell,
            last: vec![0.0; m],
        })
    }

    pub fn count(&self) -> usize {
        self.n
    }

    /// `L_ij`; zero on the diagonal.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            0.0
        } else {
            self.ell[pair_index(self.n, i, j)]
        }
    }

    pub fn last_increment(&self, i: usize, j: usize) -> f64 {
        if i == j || self.last.is_empty() {
            0.0
        } else {
            self.last[pair_index(self.n, i, j)]
        }
    }

    pub fn total(&self) -> f64 {
        self.ell.iter().sum()
    }

    /// Upper-triangular values in lexicographic pair order.
    pub fn values(&self) -> &[f64] {
        &self.ell
    }

    pub(crate) fn begin_step(&mut self) {
        if self.last.len() != self.ell.len() {
            self.last = vec![0.0; self.ell.len()];
        }
        self.last.iter_mut().for_each(|x| *x = 0.0);
    }

    pub(crate) fn add(&mut self, i: usize, j: usize, dl: f64) {
        let k = pair_index(self.n, i, j);
        self.ell[k] += dl;
        self.last[k] += dl;
    }
}
