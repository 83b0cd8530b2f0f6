use num_complex::Complex64 as C64;

use super::matrix::{CMatrix, CVector};
use crate::error::{Error, Result};

/// Relative pivot threshold, scaled by the largest row norm.
pub const PIVOT_TOL: f64 = 1e-12;

/// LU factorization with partial pivoting, `P M = L U`.
#[derive(Clone, Debug)]
pub struct Lu {
    n: usize,
    lu: CMatrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn factor(m: &CMatrix) -> Result<Lu> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "LU needs a square matrix, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let n = m.rows();
        let scale = (0..n)
            .map(|i| m.row(i).iter().map(|x| x.norm()).sum::<f64>())
            .fold(0.0, f64::max);
        let tol = PIVOT_TOL * scale.max(f64::MIN_POSITIVE);
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax <= tol {
                return Err(Error::SingularMatrix { pivot: pmax, tol });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
            }
            let piv = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / piv;
                lu[(i, k)] = f;
                if f != C64::new(0.0, 0.0) {
                    for j in k + 1..n {
                        let t = lu[(k, j)];
                        lu[(i, j)] -= f * t;
                    }
                }
            }
        }
        Ok(Lu { n, lu, perm })
    }

    pub fn solve(&self, b: &CVector) -> CVector {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..n {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc / self.lu[(i, i)];
        }
        x.into()
    }

    /// Solves `M* y = b` with the same factorization.
    pub fn solve_adjoint(&self, b: &CVector) -> CVector {
        let n = self.n;
        // M = P^T L U, so M* = U* L* P and U* L* (P y) = b.
        let mut z: Vec<C64> = b.iter().copied().collect();
        for i in 0..n {
            let mut acc = z[i];
            for j in 0..i {
                acc -= self.lu[(j, i)].conj() * z[j];
            }
            z[i] = acc / self.lu[(i, i)].conj();
        }
        for i in (0..n).rev() {
            let mut acc = z[i];
            for j in i + 1..n {
                acc -= self.lu[(j, i)].conj() * z[j];
            }
            z[i] = acc;
        }
        let mut y = vec![C64::new(0.0, 0.0); n];
        for (k, &p) in self.perm.iter().enumerate() {
            y[p] = z[k];
        }
        y.into()
    }

    pub fn determinant(&self) -> C64 {
        let mut swaps = 0;
        let mut seen = vec![false; self.n];
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                j = self.perm[j];
                len += 1;
            }
            swaps += len - 1;
        }
        let d: C64 = (0..self.n).map(|i| self.lu[(i, i)]).product();
        if swaps % 2 == 0 {
            d
        } else {
            -d
        }
    }

    pub fn inverse(&self) -> CMatrix {
        let n = self.n;
        let mut inv = CMatrix::zeros(n, n);
        for j in 0..n {
            let col = self.solve(&CVector::basis(n, j));
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }
}

/// Solves `M x = b` by partial-pivot elimination.
pub fn solve_linear(m: &CMatrix, b: &CVector) -> Result<CVector> {
    if m.rows() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} system with right-hand side of length {}",
            m.rows(),
            m.cols(),
            b.len()
        )));
    }
    Ok(Lu::factor(m)?.solve(b))
}
