use super::matrix::{ComplexMatrix, C64, ZERO};

/// LU factorization with partial pivoting, `P M = L U`.
///
/// Pivots smaller than `pivot_floor` are replaced by it, so the factorization
/// of an (almost) singular matrix stays usable for inverse iteration.
pub struct Lu {
    lu: ComplexMatrix,
    perm: Vec<usize>,
    n: usize,
    replaced_pivots: usize,
}

impl Lu {
    pub fn factor(m: &ComplexMatrix, pivot_floor: f64) -> Lu {
        assert!(m.is_square());
        let n = m.rows();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut replaced = 0;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].norm();
            for i in k + 1..n {
                let v = lu[(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
            }
            if lu[(k, k)].norm() <= pivot_floor {
                let ph = super::matrix::phase(lu[(k, k)]);
                lu[(k, k)] = ph * pivot_floor.max(f64::MIN_POSITIVE);
                replaced += 1;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f != ZERO {
                    for j in k + 1..n {
                        let t = lu[(k, j)];
                        lu[(i, j)] -= f * t;
                    }
                }
            }
        }
        Lu {
            lu,
            perm,
            n,
            replaced_pivots: replaced,
        }
    }

    /// Number of pivots that fell below the floor.
    pub fn replaced_pivots(&self) -> usize {
        self.replaced_pivots
    }

    /// Solves `M z = b`.
    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut z: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = z[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * z[j];
            }
            z[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = z[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * z[j];
            }
            z[i] = s / self.lu[(i, i)];
        }
        z
    }

    /// Solves `M* z = b` with the same factors: `M* = U* L* P`.
    pub fn solve_adjoint(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut t = b.to_vec();
        // U* is lower triangular.
        for i in 0..n {
            let mut s = t[i];
            for j in 0..i {
                s -= self.lu[(j, i)].conj() * t[j];
            }
            t[i] = s / self.lu[(i, i)].conj();
        }
        // L* is unit upper triangular.
        for i in (0..n).rev() {
            let mut s = t[i];
            for j in i + 1..n {
                s -= self.lu[(j, i)].conj() * t[j];
            }
            t[i] = s;
        }
        let mut z = vec![ZERO; n];
        for (k, &p) in self.perm.iter().enumerate() {
            z[p] = t[k];
        }
        z
    }
}
