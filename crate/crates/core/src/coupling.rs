use serde::{Deserialize, Serialize};

/// Dense `rows x cols` transport plan with cached marginals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    rows: usize,
    cols: usize,
    plan: Vec<f64>,
    row_sums: Vec<f64>,
    col_sums: Vec<f64>,
}

impl Coupling {
    /// Wraps a plan, clamping round-off negatives to zero and computing
    /// the row and column sums.
    pub fn from_plan(rows: usize, cols: usize, mut plan: Vec<f64>) -> Self {
        assert_eq!(plan.len(), rows * cols, "plan size does not match shape");
        plan.iter_mut().for_each(|v| *v = v.max(0.0));
        let mut row_sums = vec![0.0; rows];
        let mut col_sums = vec![0.0; cols];
        for i in 0..rows {
            for j in 0..cols {
                let v = plan[i * cols + j];
                row_sums[i] += v;
                col_sums[j] += v;
            }
        }
        Self {
            rows,
            cols,
            plan,
            row_sums,
            col_sums,
        }
    }

    /// The empty coupling (no source rows) over `cols` targets.
    pub fn empty(cols: usize) -> Self {
        Self::from_plan(0, cols, Vec::new())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn plan(&self) -> &[f64] {
        &self.plan
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.plan[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.plan[i * self.cols + j]
    }

    pub fn row_sums(&self) -> &[f64] {
        &self.row_sums
    }

    pub fn col_sums(&self) -> &[f64] {
        &self.col_sums
    }

    pub fn total_mass(&self) -> f64 {
        self.row_sums.iter().sum()
    }
}
