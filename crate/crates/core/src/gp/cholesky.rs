//! Growable lower-triangular Cholesky factor with jitter escalation.

use crate::error::GpError;

/// Jitter schedule relative to the prior variance: 0, then 1e-12 up to 1e-6.
fn jitter_schedule(scale: f64) -> impl Iterator<Item = f64> {
    std::iter::once(0.0).chain((0..7).map(move |k| scale * 1e-12 * 10f64.powi(k)))
}

/// `L` with `L L^T = A + jitter I`, stored row by row.
#[derive(Debug, Clone, Default)]
pub(crate) struct Cholesky {
    rows: Vec<Vec<f64>>,
    jitter: f64,
}

impl Cholesky {
    /// Factors `a` (full symmetric, row-major rows), escalating jitter on failure.
    pub fn factor(a: &[Vec<f64>], scale: f64) -> Result<Self, GpError> {
        let mut last = 0.0;
        for jitter in jitter_schedule(scale) {
            last = jitter;
            if let Some(rows) = try_factor(a, jitter) {
                return Ok(Self { rows, jitter });
            }
        }
        Err(GpError::Factorization { jitter: last })
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// Appends one row/column `(col, diag)` of the factored matrix. Returns
    /// `false` (leaving the factor unchanged) if the new pivot is not positive.
    pub fn push(&mut self, col: &[f64], diag: f64) -> bool {
        let l = self.solve_lower(col);
        let pivot = diag + self.jitter - l.iter().map(|v| v * v).sum::<f64>();
        if !(pivot > 0.0 && pivot.is_finite()) {
            return false;
        }
        let mut row = l;
        row.push(pivot.sqrt());
        self.rows.push(row);
        true
    }

    /// Solves `L z = b`.
    pub fn solve_lower(&self, b: &[f64]) -> Vec<f64> {
        let mut z = Vec::with_capacity(self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            let mut acc = b[i];
            for (lij, zj) in row[..i].iter().zip(&z) {
                acc -= lij * zj;
            }
            z.push(acc / row[i]);
        }
        z
    }

    /// Solves `L Z = B` for a row-major block `B` (row `i` holds all right-hand
    /// sides for equation `i`).
    pub fn solve_lower_many(&self, mut b: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
        for (i, row) in self.rows.iter().enumerate() {
            let (head, tail) = b.split_at_mut(i);
            let target = &mut tail[0];
            for (lij, src) in row[..i].iter().zip(head.iter()) {
                for (t, s) in target.iter_mut().zip(src) {
                    *t -= lij * s;
                }
            }
            let d = row[i];
            target.iter_mut().for_each(|t| *t /= d);
        }
        b
    }

    /// Solves `L^T z = b`.
    pub fn solve_upper(&self, b: &[f64]) -> Vec<f64> {
        let n = self.rows.len();
        let mut z = b.to_vec();
        for i in (0..n).rev() {
            z[i] /= self.rows[i][i];
            let zi = z[i];
            for (j, zj) in z[..i].iter_mut().enumerate() {
                *zj -= self.rows[i][j] * zi;
            }
        }
        z
    }

    /// Solves `(L L^T) z = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        self.solve_upper(&self.solve_lower(b))
    }
}

fn try_factor(a: &[Vec<f64>], jitter: f64) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(i + 1);
        for j in 0..i {
            let dot: f64 = row.iter().zip(&rows[j][..j]).map(|(x, y)| x * y).sum();
            row.push((a[i][j] - dot) / rows[j][j]);
        }
        let pivot = a[i][i] + jitter - row.iter().map(|v| v * v).sum::<f64>();
        if !(pivot > 0.0 && pivot.is_finite()) {
            return None;
        }
        row.push(pivot.sqrt());
        rows.push(row);
    }
    Some(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd() -> Vec<Vec<f64>> {
        vec![
            vec![4.0, 1.0, 0.5],
            vec![1.0, 3.0, 0.2],
            vec![0.5, 0.2, 2.0],
        ]
    }

    #[test]
    fn solve_recovers_rhs() {
        let a = spd();
        let c = Cholesky::factor(&a, 1.0).unwrap();
        assert_eq!(c.jitter(), 0.0);
        let b = [1.0, -2.0, 0.5];
        let z = c.solve(&b);
        for i in 0..3 {
            let r: f64 = (0..3).map(|j| a[i][j] * z[j]).sum();
            assert!((r - b[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn push_matches_batch() {
        let a = spd();
        let batch = Cholesky::factor(&a, 1.0).unwrap();
        let mut inc = Cholesky::factor(&[vec![4.0]], 1.0).unwrap();
        assert!(inc.push(&[1.0], 3.0));
        assert!(inc.push(&[0.5, 0.2], 2.0));
        for (r1, r2) in batch.rows.iter().zip(&inc.rows) {
            for (x, y) in r1.iter().zip(r2) {
                assert!((x - y).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn singular_matrix_gets_jitter() {
        let a = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        let c = Cholesky::factor(&a, 1.0).unwrap();
        assert!(c.jitter() > 0.0 && c.jitter() <= 1e-6);
    }

    #[test]
    fn indefinite_matrix_fails() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 1.0]];
        assert!(matches!(Cholesky::factor(&a, 1.0), Err(GpError::Factorization { .. })));
    }
}
