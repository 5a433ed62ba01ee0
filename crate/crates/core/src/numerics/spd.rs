//! Symmetric positive (semi-)definite matrices, Cholesky with a jitter
//! schedule, and solves against the factor.
//!
//! Storage is dense row-major. The factor is computed row by row
//! (`L[i][j] = (A[i][j] - L[i][..j]·L[j][..j]) / L[j][j]`), so the inner
//! products run over contiguous row prefixes.

use crate::error::{Error, Result};

/// Dense symmetric matrix. Only the lower triangle is read by the
/// factorization; constructors mirror so both triangles agree exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix {
    order: usize,
    data: Vec<f64>,
}

impl SpdMatrix {
    pub fn zeros(order: usize) -> Self {
        Self {
            order,
            data: vec![0.0; order * order],
        }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            m.data[i * order + i] = 1.0;
        }
        m
    }

    /// Builds from a row-major buffer, copying the lower triangle onto the
    /// upper one.
    pub fn from_row_major(order: usize, mut data: Vec<f64>) -> Result<Self> {
        if data.len() != order * order {
            return Err(Error::dims(
                "SpdMatrix::from_row_major",
                order * order,
                data.len(),
            ));
        }
        for i in 0..order {
            for j in 0..i {
                data[j * order + i] = data[i * order + j];
            }
        }
        Ok(Self { order, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::dims("SpdMatrix::from_rows", n, r.len()));
            }
            data.extend_from_slice(r);
        }
        Self::from_row_major(n, data)
    }

    /// Fills entry `(i, j)` for `j <= i` with `f(i, j)` and mirrors.
    pub fn from_lower_fn(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; order * order];
        for i in 0..order {
            for j in 0..=i {
                let v = f(i, j);
                data[i * order + j] = v;
                data[j * order + i] = v;
            }
        }
        Self { order, data }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.order + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.order..(i + 1) * self.order]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn mean_diagonal(&self) -> f64 {
        if self.order == 0 {
            return 0.0;
        }
        (0..self.order).map(|i| self.get(i, i)).sum::<f64>() / self.order as f64
    }

    /// Returns `self + shift·I`.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut m = self.clone();
        if shift != 0.0 {
            for i in 0..self.order {
                m.data[i * self.order + i] += shift;
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.order {
            return Err(Error::dims("SpdMatrix::mul_vec", self.order, v.len()));
        }
        Ok((0..self.order).map(|i| dot(self.row(i), v)).collect())
    }
}

/// Increasing list of diagonal shifts tried in order until the
/// factorization succeeds.
#[derive(Debug, Clone, PartialEq)]
pub struct JitterSchedule {
    steps: Vec<f64>,
    relative: bool,
    semidefinite: bool,
}

impl JitterSchedule {
    /// The default `{0, 1e-10, 1e-8, 1e-6}`, each step scaled by the mean
    /// diagonal of the matrix being factored.
    pub fn relative_default() -> Self {
        Self::relative(vec![0.0, 1e-10, 1e-8, 1e-6])
    }

    pub fn relative(steps: Vec<f64>) -> Self {
        Self::checked(steps, true)
    }

    pub fn absolute(steps: Vec<f64>) -> Self {
        Self::checked(steps, false)
    }

    /// No jitter; exactly-zero trailing columns (a zero or rank-deficient
    /// covariance with exact zeros) are accepted and produce zero columns in
    /// the factor.
    pub fn exact() -> Self {
        Self {
            steps: vec![0.0],
            relative: false,
            semidefinite: true,
        }
    }

    fn checked(steps: Vec<f64>, relative: bool) -> Self {
        assert!(!steps.is_empty(), "jitter schedule must not be empty");
        assert!(
            steps.windows(2).all(|w| w[0] < w[1]) && steps[0] >= 0.0,
            "jitter schedule must be non-negative and strictly increasing"
        );
        Self {
            steps,
            relative,
            semidefinite: false,
        }
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    fn resolve(&self, m: &SpdMatrix) -> Vec<f64> {
        if self.relative {
            let scale = m.mean_diagonal().abs();
            self.steps.iter().map(|s| s * scale).collect()
        } else {
            self.steps.clone()
        }
    }
}

impl Default for JitterSchedule {
    fn default() -> Self {
        Self::relative_default()
    }
}

/// Lower-triangular factor `L` with `L·Lᵀ = A + jitter·I`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    order: usize,
    lower: Vec<f64>,
    jitter: f64,
}

impl Cholesky {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.lower[i * self.order + j]
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.lower[i * self.order..i * self.order + i + 1]
    }

    /// `L·z`.
    pub fn mul_lower(&self, z: &[f64]) -> Result<Vec<f64>> {
        if z.len() != self.order {
            return Err(Error::dims("Cholesky::mul_lower", self.order, z.len()));
        }
        Ok((0..self.order)
            .map(|i| dot(self.row(i), &z[..=i]))
            .collect())
    }

    /// Solves `(A + jitter·I) x = b` by forward then back substitution.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.order;
        if b.len() != n {
            return Err(Error::dims("Cholesky::solve", n, b.len()));
        }
        let mut y = b.to_vec();
        for i in 0..n {
            let r = self.row(i);
            let s = y[i] - dot(&r[..i], &y[..i]);
            y[i] = if r[i] == 0.0 { 0.0 } else { s / r[i] };
        }
        // Lᵀ x = y, column-oriented so L is still read by rows.
        for i in (0..n).rev() {
            let lii = self.get(i, i);
            y[i] = if lii == 0.0 { 0.0 } else { y[i] / lii };
            let xi = y[i];
            let r = self.row(i);
            for (yk, lik) in y[..i].iter_mut().zip(&r[..i]) {
                *yk -= lik * xi;
            }
        }
        Ok(y)
    }

    /// Reconstructs `L·Lᵀ` (test helper, O(n³)).
    pub fn reconstruct(&self) -> Vec<f64> {
        let n = self.order;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let k = i.min(j) + 1;
                out[i * n + j] = dot(&self.row(i)[..k], &self.row(j)[..k]);
            }
        }
        out
    }
}

/// Factors `m + ε·I` for the first `ε` in the schedule that yields strictly
/// positive pivots (above a rounding floor of `n·eps·max|diag|`).
pub fn cholesky_psd(m: &SpdMatrix, schedule: &JitterSchedule) -> Result<Cholesky> {
    let mut last = 0.0;
    for jitter in schedule.resolve(m) {
        last = jitter;
        if let Some(lower) = try_factor(m, jitter, schedule.semidefinite) {
            return Ok(Cholesky {
                order: m.order,
                lower,
                jitter,
            });
        }
    }
    Err(Error::NotFactorizable {
        order: m.order,
        last_jitter: last,
    })
}

fn try_factor(m: &SpdMatrix, jitter: f64, semidefinite: bool) -> Option<Vec<f64>> {
    let n = m.order;
    let max_diag = (0..n)
        .map(|i| (m.get(i, i) + jitter).abs())
        .fold(0.0, f64::max);
    let floor = n as f64 * f64::EPSILON * max_diag;
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let (ri, rj) = (i * n, j * n);
            let mut s = m.get(i, j) - dot(&l[ri..ri + j], &l[rj..rj + j]);
            if i == j {
                s += jitter;
                if !s.is_finite() {
                    return None;
                }
                if s <= floor {
                    if semidefinite && s == 0.0 {
                        l[ri + j] = 0.0;
                        continue;
                    }
                    return None;
                }
                l[ri + j] = s.sqrt();
            } else {
                let ljj = l[rj + j];
                if ljj == 0.0 {
                    if s != 0.0 {
                        return None;
                    }
                    l[ri + j] = 0.0;
                } else {
                    l[ri + j] = s / ljj;
                }
            }
        }
    }
    Some(l)
}

/// Solves `(m + ε·I) x = rhs` with `ε` from [`cholesky_psd`], followed by one
/// step of iterative refinement against `m + ε·I`. Returns `x` and `ε`.
pub fn solve_spd(m: &SpdMatrix, rhs: &[f64], schedule: &JitterSchedule) -> Result<(Vec<f64>, f64)> {
    if rhs.len() != m.order {
        return Err(Error::dims("solve_spd", m.order, rhs.len()));
    }
    let chol = cholesky_psd(m, schedule)?;
    let x = solve_refined(m, &chol, rhs)?;
    Ok((x, chol.jitter()))
}

/// Solve with an existing factor of `m + chol.jitter()·I`, then refine once.
pub fn solve_refined(m: &SpdMatrix, chol: &Cholesky, rhs: &[f64]) -> Result<Vec<f64>> {
    let mut x = chol.solve(rhs)?;
    let eps = chol.jitter();
    let residual: Vec<f64> = (0..m.order)
        .map(|i| rhs[i] - dot(m.row(i), &x) - eps * x[i])
        .collect();
    let dx = chol.solve(&residual)?;
    for (xi, d) in x.iter_mut().zip(dx) {
        *xi += d;
    }
    Ok(x)
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    // Four independent accumulators; fixed order keeps results reproducible.
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let k = c * 4;
        acc[0] += a[k] * b[k];
        acc[1] += a[k + 1] * b[k + 1];
        acc[2] += a[k + 2] * b[k + 2];
        acc[3] += a[k + 3] * b[k + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for k in chunks * 4..a.len() {
        s += a[k] * b[k];
    }
    s
}
