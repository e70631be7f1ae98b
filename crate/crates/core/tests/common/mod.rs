//! Test-only oracles that share no code with the solvers they check.
#![allow(dead_code)]

/// Solves the square system `a x = b` by Gaussian elimination with partial
/// pivoting. Returns `None` when the matrix is (numerically) singular.
pub fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                let (top, rest) = a.split_at_mut(r);
                for (x, y) in rest[0][col..].iter_mut().zip(&top[col][col..]) {
                    *x -= f * y;
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Calls `f` with every `k`-subset of `0..n` in lexicographic order.
pub fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// `max c.x` over `{x >= 0 : A x = b}` by enumerating every basic solution.
/// `A` must have full row rank.
pub fn lp_vertex_max(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Option<f64> {
    let rows = a.len();
    let vars = c.len();
    let mut best: Option<f64> = None;
    for_each_subset(vars, rows, |basis| {
        let sq: Vec<Vec<f64>> = a
            .iter()
            .map(|row| basis.iter().map(|&j| row[j]).collect())
            .collect();
        if let Some(x) = solve_square(sq, b.to_vec()) {
            if x.iter().all(|&v| v >= -1e-10) {
                let val: f64 = basis.iter().zip(&x).map(|(&j, v)| c[j] * v).sum();
                best = Some(best.map_or(val, |b: f64| b.max(val)));
            }
        }
    });
    best
}

/// Balanced OT optimum via vertex enumeration. The last column constraint is
/// redundant and dropped.
pub fn ot_oracle(s: &[Vec<f64>], mu: &[f64], nu: &[f64]) -> f64 {
    let (m, n) = (s.len(), nu.len());
    let mut a = Vec::new();
    let mut b = Vec::new();
    for i in 0..m {
        let mut row = vec![0.0; m * n];
        (0..n).for_each(|j| row[i * n + j] = 1.0);
        a.push(row);
        b.push(mu[i]);
    }
    for j in 0..n - 1 {
        let mut row = vec![0.0; m * n];
        (0..m).for_each(|i| row[i * n + j] = 1.0);
        a.push(row);
        b.push(nu[j]);
    }
    let c: Vec<f64> = s.iter().flatten().copied().collect();
    lp_vertex_max(&a, &b, &c).expect("feasible")
}

/// Semi-relaxed POT optimum (`gamma 1 = row_mass`, `gamma^T 1 <= cap`) via
/// vertex enumeration with explicit column slacks. No slack-row reduction.
pub fn pot_oracle(s: &[Vec<f64>], row_mass: f64, cap: &[f64]) -> f64 {
    let (m, n) = (s.len(), cap.len());
    let vars = m * n + n;
    let mut a = Vec::new();
    let mut b = Vec::new();
    for i in 0..m {
        let mut row = vec![0.0; vars];
        (0..n).for_each(|j| row[i * n + j] = 1.0);
        a.push(row);
        b.push(row_mass);
    }
    for j in 0..n {
        let mut row = vec![0.0; vars];
        (0..m).for_each(|i| row[i * n + j] = 1.0);
        row[m * n + j] = 1.0;
        a.push(row);
        b.push(cap[j]);
    }
    let mut c: Vec<f64> = s.iter().flatten().copied().collect();
    c.extend(std::iter::repeat_n(0.0, n));
    lp_vertex_max(&a, &b, &c).expect("feasible")
}

/// Deterministic uniform matrix in `[lo, hi)` from a tiny LCG, so oracle
/// inputs do not depend on the crate's own generators.
pub fn lcg_matrix(seed: u64, m: usize, n: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 11) as f64) / ((1u64 << 53) as f64)
    };
    (0..m)
        .map(|_| (0..n).map(|_| lo + (hi - lo) * next()).collect())
        .collect()
}
