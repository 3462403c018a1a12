use super::{DenseMatrix, DenseVector};
use crate::error::{Error, Result};

/// Pivots with magnitude at or below this are treated as exact rank deficiency.
pub const PIVOT_THRESHOLD: f64 = 1e-12;

/// LU factorization with partial (row) pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct LuFactor {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl LuFactor {
    pub fn new(a: &DenseMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::dims("LU factorization (square)", a.rows(), a.cols()));
        }
        let n = a.rows();
        let mut lu = a.as_slice().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();

        for k in 0..n {
            let (p, max) = (k..n)
                .map(|i| (i, lu[i * n + k].abs()))
                .fold((k, -1.0), |best, c| if c.1 > best.1 { c } else { best });
            if max <= PIVOT_THRESHOLD {
                return Err(Error::SingularMatrix {
                    column: k,
                    pivot: max,
                });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[k * n + k];
            let (upper, lower) = lu.split_at_mut((k + 1) * n);
            let pivot_row = &upper[k * n + k + 1..k * n + n];
            for row in lower.chunks_exact_mut(n) {
                let factor = row[k] / pivot;
                row[k] = factor;
                if factor == 0.0 {
                    continue;
                }
                for (r, u) in row[k + 1..].iter_mut().zip(pivot_row) {
                    *r = (-factor).mul_add(*u, *r);
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &DenseVector) -> Result<DenseVector> {
        b.ensure_len(self.n, "LU solve")?;
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let s: f64 = row.iter().zip(&x[..i]).map(|(l, xj)| l * xj).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n..(i + 1) * n];
            let s: f64 = row[i + 1..].iter().zip(&x[i + 1..]).map(|(u, xj)| u * xj).sum();
            x[i] = (x[i] - s) / row[i];
        }
        Ok(DenseVector::new(x))
    }
}

/// Solves `A x = b` by LU with partial pivoting.
pub fn lu_solve(a: &DenseMatrix, b: &DenseVector) -> Result<DenseVector> {
    LuFactor::new(a)?.solve(b)
}

/// Outcome of [`conjugate_gradient`]. Non-convergence is reported, not raised.
#[derive(Debug, Clone)]
pub struct CgOutcome {
    pub x: DenseVector,
    pub iterations: usize,
    pub residual_norm: f64,
    pub converged: bool,
}

/// Conjugate gradient for a symmetric positive-definite map given as an
/// oracle. Stops once `‖A x − b‖ ≤ tol · ‖b‖`; otherwise returns the last
/// iterate with `converged = false`.
pub fn conjugate_gradient(
    apply: impl Fn(&DenseVector) -> DenseVector,
    b: &DenseVector,
    tol: f64,
    max_iter: usize,
) -> CgOutcome {
    let n = b.len();
    let mut x = DenseVector::zeros(n);
    let b_norm = b.norm();
    let target = tol * b_norm;
    if b_norm == 0.0 {
        return CgOutcome {
            x,
            iterations: 0,
            residual_norm: 0.0,
            converged: true,
        };
    }
    let mut r = b.clone();
    let mut p = r.clone();
    let mut rs = r.norm_sq();
    for it in 0..max_iter {
        let ap = apply(&p);
        let pap = p.dot(&ap);
        if pap <= 0.0 {
            return CgOutcome {
                x,
                iterations: it,
                residual_norm: rs.sqrt(),
                converged: false,
            };
        }
        let step = rs / pap;
        x.axpy(step, &p);
        r.axpy(-step, &ap);
        let rs_new = r.norm_sq();
        if rs_new.sqrt() <= target {
            return CgOutcome {
                x,
                iterations: it + 1,
                residual_norm: rs_new.sqrt(),
                converged: true,
            };
        }
        p = DenseVector::lin_comb(1.0, &r, rs_new / rs, &p);
        rs = rs_new;
    }
    CgOutcome {
        x,
        iterations: max_iter,
        residual_norm: rs.sqrt(),
        converged: false,
    }
}

/// Left pseudo-inverse `(QᵀQ)⁻¹Qᵀ` of a full-column-rank matrix.
pub fn pseudo_inverse(q: &DenseMatrix) -> Result<DenseMatrix> {
    let lu = LuFactor::new(&q.gram())?;
    let (m, n) = q.shape();
    let mut out = DenseMatrix::zeros(n, m);
    for j in 0..m {
        let col = lu.solve(&DenseVector::from(q.row(j)))?;
        for i in 0..n {
            out.set(i, j, col[i]);
        }
    }
    Ok(out)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues(a: &DenseMatrix) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::dims("symmetric eigenvalues (square)", a.rows(), a.cols()));
    }
    let n = a.rows();
    let mut m = a.clone();
    let scale = a.as_slice().iter().fold(0.0f64, |s, v| s.max(v.abs())).max(1.0);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m.get(i, j).powi(2))
            .sum();
        if off.sqrt() <= 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m.get(p, q);
                if apq.abs() < f64::MIN_POSITIVE {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let t = if tau == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m.get(k, p);
                    let akq = m.get(k, q);
                    m.set(k, p, c * akp - s * akq);
                    m.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = m.get(p, k);
                    let aqk = m.get(q, k);
                    m.set(p, k, c * apk - s * aqk);
                    m.set(q, k, s * apk + c * aqk);
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m.get(i, i)).collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}
