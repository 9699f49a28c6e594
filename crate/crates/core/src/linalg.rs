//! Dense real LU routines sized for the small event matrices this crate
//! builds: a pivoted one-shot determinant and an incrementally bordered
//! factorization for the sequential sampler.

/// Signed determinant via LU with partial pivoting. Returns 0.0 for the
/// empty matrix convention det [] = 1 caller-side; here n >= 1.
///
/// `growth_warn` is set when the growth factor exceeds 1e8.
pub fn lu_det(matrix: &[f64], n: usize, growth_warn: &mut bool) -> f64 {
    debug_assert_eq!(matrix.len(), n * n);
    if n == 0 {
        return 1.0;
    }
    let mut a = matrix.to_vec();
    let max_in = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut det = 1.0;
    for col in 0..n {
        let mut piv = col;
        let mut best = a[col * n + col].abs();
        for row in col + 1..n {
            let v = a[row * n + col].abs();
            if v > best {
                best = v;
                piv = row;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if piv != col {
            for j in 0..n {
                a.swap(col * n + j, piv * n + j);
            }
            det = -det;
        }
        let d = a[col * n + col];
        det *= d;
        for row in col + 1..n {
            let factor = a[row * n + col] / d;
            a[row * n + col] = factor;
            for j in col + 1..n {
                a[row * n + j] -= factor * a[col * n + j];
            }
        }
    }
    let max_out = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max_in > 0.0 && max_out / max_in > 1e8 {
        *growth_warn = true;
    }
    det
}

/// Growing LU factorization of a matrix defined by a caller-supplied entry
/// function, with the row permutation frozen at the last refresh. Appending
/// a row/column pair costs O(m^2); the new pivot is the Schur complement of
/// the new diagonal entry, i.e. the bordered-determinant ratio
/// det(A') / det(A).
pub struct BorderedLu {
    n: usize,
    /// Unit-lower L (strict part) and U packed in one row-major matrix.
    lu: Vec<f64>,
    /// Row permutation from the last pivoted refresh; identity on rows
    /// appended since.
    perm: Vec<usize>,
    /// log |det| and sign of the factored matrix.
    pub log_abs_det: f64,
    pub det_sign: f64,
}

impl BorderedLu {
    pub fn new() -> Self {
        BorderedLu {
            n: 0,
            lu: Vec::new(),
            perm: Vec::new(),
            log_abs_det: 0.0,
            det_sign: 1.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Schur complement of `diag` with respect to the current factorization,
    /// where `col` and `row` are the bordering column/row in *original*
    /// (unpermuted) order. Equals det(bordered) / det(current).
    pub fn schur(&self, col: &[f64], row: &[f64], diag: f64) -> f64 {
        debug_assert_eq!(col.len(), self.n);
        debug_assert_eq!(row.len(), self.n);
        let n = self.n;
        // y = L^{-1} P col
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut v = col[self.perm[i]];
            for j in 0..i {
                v -= self.lu[i * n + j] * y[j];
            }
            y[i] = v;
        }
        // w solves w U = row  (row is not permuted: appended rows sit below)
        let mut w = vec![0.0; n];
        for j in 0..n {
            let mut v = row[j];
            for i in 0..j {
                v -= w[i] * self.lu[i * n + j];
            }
            w[j] = v / self.lu[j * n + j];
        }
        let mut s = diag;
        for i in 0..n {
            s -= w[i] * y[i];
        }
        s
    }

    /// Appends the bordering row/column with diagonal `diag`, extending the
    /// factorization in place. Returns the new pivot.
    pub fn push(&mut self, col: &[f64], row: &[f64], diag: f64) -> f64 {
        let n = self.n;
        let m = n + 1;
        let mut lu = vec![0.0; m * m];
        for i in 0..n {
            for j in 0..n {
                lu[i * m + j] = self.lu[i * n + j];
            }
        }
        // New U column.
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut v = col[self.perm[i]];
            for j in 0..i {
                v -= self.lu[i * n + j] * y[j];
            }
            y[i] = v;
        }
        // New L row.
        let mut w = vec![0.0; n];
        for j in 0..n {
            let mut v = row[j];
            for i in 0..j {
                v -= w[i] * self.lu[i * n + j];
            }
            w[j] = v / self.lu[j * n + j];
        }
        let mut pivot = diag;
        for i in 0..n {
            pivot -= w[i] * y[i];
        }
        for i in 0..n {
            lu[i * m + n] = y[i];
            lu[n * m + i] = w[i];
        }
        lu[n * m + n] = pivot;
        self.lu = lu;
        self.perm.push(n);
        self.n = m;
        self.log_abs_det += pivot.abs().ln();
        if pivot < 0.0 {
            self.det_sign = -self.det_sign;
        } else if pivot == 0.0 {
            self.det_sign = 0.0;
        }
        pivot
    }

    /// Rebuilds the factorization from scratch with partial pivoting.
    /// `entry(i, j)` must return the (i, j) entry of the current matrix.
    pub fn refresh(&mut self, entry: impl Fn(usize, usize) -> f64) {
        let n = self.n;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = entry(i, j);
            }
        }
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0f64;
        let mut log_abs = 0.0f64;
        for col in 0..n {
            let mut piv = col;
            let mut best = a[col * n + col].abs();
            for row in col + 1..n {
                let v = a[row * n + col].abs();
                if v > best {
                    best = v;
                    piv = row;
                }
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                }
                perm.swap(col, piv);
                sign = -sign;
            }
            let d = a[col * n + col];
            if d == 0.0 {
                sign = 0.0;
                log_abs = f64::NEG_INFINITY;
                break;
            }
            log_abs += d.abs().ln();
            if d < 0.0 {
                sign = -sign;
            }
            for row in col + 1..n {
                let factor = a[row * n + col] / d;
                a[row * n + col] = factor;
                for j in col + 1..n {
                    a[row * n + j] -= factor * a[col * n + j];
                }
            }
        }
        self.lu = a;
        self.perm = perm;
        self.det_sign = sign;
        self.log_abs_det = log_abs;
    }

    /// Signed log-determinant recomputed independently with full pivoting,
    /// for drift audits.
    pub fn audit_log_det(entry: impl Fn(usize, usize) -> f64, n: usize) -> (f64, f64) {
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = entry(i, j);
            }
        }
        let mut warn = false;
        let det = lu_det(&a, n, &mut warn);
        (det.abs().ln(), det.signum())
    }
}

impl Default for BorderedLu {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn det3(m: &[f64; 9]) -> f64 {
        m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6])
            + m[2] * (m[3] * m[7] - m[4] * m[6])
    }

    #[test]
    fn lu_det_matches_cofactor_expansion() {
        let m = [2.0, -1.0, 0.5, 1.0, 3.0, -2.0, 0.0, 1.5, 1.0];
        let mut warn = false;
        assert!((lu_det(&m, 3, &mut warn) - det3(&m)).abs() < 1e-12);
        assert!(!warn);
    }

    #[test]
    fn bordered_push_tracks_det() {
        let a = [
            [2.0, -1.0, 0.5],
            [1.0, 3.0, -2.0],
            [0.0, 1.5, 1.0],
        ];
        let mut lu = BorderedLu::new();
        for m in 1..=3 {
            let col: Vec<f64> = (0..m - 1).map(|i| a[i][m - 1]).collect();
            let row: Vec<f64> = (0..m - 1).map(|j| a[m - 1][j]).collect();
            lu.push(&col, &row, a[m - 1][m - 1]);
        }
        let flat: Vec<f64> = a.iter().flatten().copied().collect();
        let mut warn = false;
        let expect = lu_det(&flat, 3, &mut warn);
        assert!((lu.det_sign * lu.log_abs_det.exp() - expect).abs() < 1e-12);
    }

    #[test]
    fn refresh_then_push_agrees() {
        let entry = |i: usize, j: usize| 1.0 / (1.0 + i as f64 + j as f64) + if i == j { 1.0 } else { 0.0 };
        let mut lu = BorderedLu::new();
        for m in 0..4 {
            let col: Vec<f64> = (0..m).map(|i| entry(i, m)).collect();
            let row: Vec<f64> = (0..m).map(|j| entry(m, j)).collect();
            lu.push(&col, &row, entry(m, m));
        }
        lu.refresh(entry);
        // Border one more after the pivoted refresh.
        let col: Vec<f64> = (0..4).map(|i| entry(i, 4)).collect();
        let row: Vec<f64> = (0..4).map(|j| entry(4, j)).collect();
        lu.push(&col, &row, entry(4, 4));
        let (log_det, sign) = BorderedLu::audit_log_det(entry, 5);
        assert!((lu.log_abs_det - log_det).abs() < 1e-10);
        assert_eq!(lu.det_sign, sign);
    }
}
