//! Compressed sparse row matrices and direct solvers.

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Par, Side};

use crate::error::{Error, Result};

/// Relative residual every direct solve must reach.
pub const SOLVER_TOLERANCE: f64 = 1e-10;

/// Row-compressed matrix. Explicit zeros are kept.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Duplicates are summed in insertion order, so the result does not
    /// depend on how the triplets were produced, only on their sequence.
    pub fn from_triplets(nrows: usize, ncols: usize, mut triplets: Vec<(usize, usize, f64)>) -> Result<Self> {
        if let Some(&(i, j, _)) = triplets.iter().find(|(i, j, _)| *i >= nrows || *j >= ncols) {
            return Err(Error::InvalidArgument(format!(
                "entry ({i}, {j}) outside a {nrows}x{ncols} matrix"
            )));
        }
        triplets.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last = None;
        for (i, j, v) in triplets {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(SparseMatrix {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `(column, value)` pairs of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()]
            .iter()
            .copied()
            .zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |(_, v)| v)
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols, "matvec dimension");
        (0..self.nrows)
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect()
    }

    pub fn transpose(&self) -> SparseMatrix {
        let t = self.triplets().map(|(i, j, v)| (j, i, v)).collect();
        SparseMatrix::from_triplets(self.ncols, self.nrows, t).expect("indices already validated")
    }

    /// `max |a_ij − a_ji|` relative to the largest entry.
    pub fn asymmetry(&self) -> f64 {
        if self.nrows != self.ncols {
            return f64::INFINITY;
        }
        let scale = self
            .values
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(f64::MIN_POSITIVE);
        self.triplets()
            .map(|(i, j, v)| (v - self.get(j, i)).abs())
            .fold(0.0, f64::max)
            / scale
    }

    fn to_faer(&self) -> Result<SparseColMat<usize, f64>> {
        let t: Vec<_> = self.triplets().map(|(i, j, v)| Triplet::new(i, j, v)).collect();
        SparseColMat::try_new_from_triplets(self.nrows, self.ncols, &t)
            .map_err(|e| Error::InvalidArgument(format!("sparse conversion failed: {e:?}")))
    }

    fn relative_residual(&self, x: &[f64], b: &[f64]) -> f64 {
        let ax = self.matvec(x);
        let r: f64 = ax.iter().zip(b).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let nb: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        if nb > 0.0 {
            r / nb
        } else {
            r
        }
    }
}

/// Outcome of a direct solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub method: &'static str,
    pub dimension: usize,
    pub nnz: usize,
    pub relative_residual: f64,
    pub refinement_steps: usize,
}

impl std::fmt::Display for SolveReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} n={} nnz={} residual={:.3e} refinement={}",
            self.method, self.dimension, self.nnz, self.relative_residual, self.refinement_steps
        )
    }
}

fn check_square(a: &SparseMatrix, b: &[f64]) -> Result<()> {
    if a.nrows != a.ncols {
        return Err(Error::InvalidArgument(format!("matrix is {}x{}", a.nrows, a.ncols)));
    }
    if b.len() != a.nrows {
        return Err(Error::SizeMismatch {
            expected: a.nrows,
            found: b.len(),
        });
    }
    Ok(())
}

/// Factor once, then solve with up to two steps of iterative refinement.
fn solve_with<S: Solve<f64>>(
    a: &SparseMatrix,
    b: &[f64],
    factor: &S,
    method: &'static str,
) -> Result<(Vec<f64>, SolveReport)> {
    let n = a.nrows;
    let apply = |rhs: &[f64]| -> Vec<f64> {
        let m = Mat::from_fn(n, 1, |i, _| rhs[i]);
        let x = factor.solve(&m);
        (0..n).map(|i| x[(i, 0)]).collect()
    };
    let mut x = apply(b);
    let mut residual = a.relative_residual(&x, b);
    let mut steps = 0;
    // refinement runs even when the first residual already passes: it is
    // cheap next to the factorization and keeps per-row defects at round-off
    while steps < 2 && residual.is_finite() && residual > 0.0 {
        let ax = a.matvec(&x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let dx = apply(&r);
        let candidate: Vec<f64> = x.iter().zip(&dx).map(|(x, d)| x + d).collect();
        let next = a.relative_residual(&candidate, b);
        steps += 1;
        if next < residual {
            x = candidate;
            residual = next;
        } else {
            break;
        }
    }
    if !residual.is_finite() {
        return Err(Error::SingularSystem(format!("{method}: non-finite solution")));
    }
    if residual > SOLVER_TOLERANCE {
        return Err(Error::ResidualTooLarge {
            residual,
            tolerance: SOLVER_TOLERANCE,
        });
    }
    let report = SolveReport {
        method,
        dimension: n,
        nnz: a.nnz(),
        relative_residual: residual,
        refinement_steps: steps,
    };
    log::debug!("{report}");
    Ok((x, report))
}

/// General square system by sparse LU with fill-reducing ordering.
pub fn solve_lu(a: &SparseMatrix, b: &[f64]) -> Result<(Vec<f64>, SolveReport)> {
    check_square(a, b)?;
    // sequential kernels keep results bit-reproducible
    faer::set_global_parallelism(Par::Seq);
    let lu = a
        .to_faer()?
        .sp_lu()
        .map_err(|e| Error::SingularSystem(format!("sparse LU failed: {e:?}")))?;
    solve_with(a, b, &lu, "sparse-lu")
}

/// Symmetric positive definite system by sparse Cholesky on the lower triangle.
pub fn solve_spd(a: &SparseMatrix, b: &[f64]) -> Result<(Vec<f64>, SolveReport)> {
    check_square(a, b)?;
    faer::set_global_parallelism(Par::Seq);
    let llt = a
        .to_faer()?
        .sp_cholesky(Side::Lower)
        .map_err(|e| Error::SingularSystem(format!("sparse Cholesky failed: {e:?}")))?;
    solve_with(a, b, &llt, "sparse-cholesky")
}
