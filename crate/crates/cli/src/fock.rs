//! Brute-force verification backend: truncated Fock-space density matrices
//! built by operator exponentials, Uhlmann fidelity, photon moments, and
//! trace distance. Everything here is independent of the closed forms in
//! `cvfid-core` — that independence is what makes the cross-checks binding.
//!
//! All states handled by this toolkit have real wave functions and real
//! generators (displacement along x, squeezing along the axes), so density
//! matrices are real symmetric; Hermitian throughout means symmetric here.

use cvfid_core::two_mode::physical_from_energy;
use cvfid_core::{CoreError, EnergyParams2, PnesState};
use nalgebra::DMatrix;

use crate::error::{CliError, Result};

/// Trace-deficit gate: below this the matrix is renormalized, at or above it
/// construction fails loudly (never silent renormalization).
const DEFICIT_GATE: f64 = 1e-8;
/// Eigenvalue clipping floor for density-matrix square roots.
const EIG_CLIP: f64 = -1e-10;
/// Hard ceiling on single-mode cutoffs; the adaptive rule stays far below it
/// on every admissible input (⟨n⟩ ≤ 3 domains peak around 220).
const SINGLE_MODE_CAP: usize = 400;
/// Two-mode cutoff cap: 625-dimensional matrices keep runtimes desk-scale.
pub const TWO_MODE_CAP: usize = 24;

/// A truncated density matrix with its construction metadata.
#[derive(Debug, Clone)]
pub struct FockDensity {
    matrix: DMatrix<f64>,
    n_max: usize,
    modes: u8,
    trace_deficit: f64,
}

impl FockDensity {
    fn gated(mut matrix: DMatrix<f64>, n_max: usize, modes: u8) -> Result<Self> {
        let trace = matrix.trace();
        let deficit = 1.0 - trace;
        if deficit >= DEFICIT_GATE {
            return Err(CliError::Cutoff {
                n_max,
                deficit,
            });
        }
        matrix /= trace;
        Ok(FockDensity {
            matrix,
            n_max,
            modes,
            trace_deficit: deficit,
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn modes(&self) -> u8 {
        self.modes
    }

    /// `1 − Tr ρ` as built, before renormalization.
    pub fn trace_deficit(&self) -> f64 {
        self.trace_deficit
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace()
    }

    /// Embed into a larger cutoff by zero-padding (spectrum unchanged).
    pub fn pad_to(&self, n_max: usize) -> Result<FockDensity> {
        if n_max < self.n_max {
            return Err(CliError::Config(format!(
                "cannot pad from n_max {} down to {}",
                self.n_max, n_max
            )));
        }
        if n_max == self.n_max {
            return Ok(self.clone());
        }
        let per_mode = n_max + 1;
        let dim = if self.modes == 1 {
            per_mode
        } else {
            per_mode * per_mode
        };
        let mut m = DMatrix::zeros(dim, dim);
        if self.modes == 1 {
            m.view_mut((0, 0), (self.dim(), self.dim()))
                .copy_from(&self.matrix);
        } else {
            // Two-mode indices are (n_a·(old+1) + n_b); re-stride them.
            let old = self.n_max + 1;
            for na in 0..old {
                for nb in 0..old {
                    for ma in 0..old {
                        for mb in 0..old {
                            m[(na * per_mode + nb, ma * per_mode + mb)] =
                                self.matrix[(na * old + nb, ma * old + mb)];
                        }
                    }
                }
            }
        }
        Ok(FockDensity {
            matrix: m,
            n_max,
            modes: self.modes,
            trace_deficit: self.trace_deficit,
        })
    }
}

/// Annihilation operator on a `dim`-dimensional truncated Fock space.
fn annihilation(dim: usize) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = (n as f64).sqrt();
    }
    a
}

/// Thermal-state diagonal weights `n_Tⁿ/(1+n_T)^{n+1}`.
fn thermal_weights(n_t: f64, dim: usize) -> Vec<f64> {
    if n_t <= 0.0 {
        let mut w = vec![0.0; dim];
        w[0] = 1.0;
        return w;
    }
    let ratio = n_t / (1.0 + n_t);
    let mut w = Vec::with_capacity(dim);
    let mut cur = 1.0 / (1.0 + n_t);
    for _ in 0..dim {
        w.push(cur);
        cur *= ratio;
    }
    w
}

/// Adaptive single-mode cutoff for a displaced squeezed thermal state.
///
/// The trace-deficit gate alone cannot certify squeezed states: truncated
/// anti-symmetric generators exponentiate to exact orthogonal matrices, so
/// the deficit only sees the thermal tail while squeezing mass spills past
/// any cutoff invisibly. The rule therefore also bounds the number-basis
/// tail through the largest quadrature variance `u`: the asymptotic tail
/// base is `w = (2u−1)/(2u+1)` (exactly `tanh r` for squeezed vacuum and
/// `n_T/(n_T+1)` for thermal states), giving a start cutoff with tail mass
/// below 1e-12 plus a displacement allowance.
pub fn single_mode_cutoff(x: f64, r: f64, n_t: f64) -> usize {
    let n_s = r.sinh() * r.sinh();
    let nbar = x * x + n_s + n_t * (1.0 + 2.0 * n_s);
    let base = (20.0 + 15.0 * nbar).ceil() as usize;
    let u = (n_t + 0.5) * (2.0 * r.abs()).exp();
    if u > 0.5 + 1e-9 {
        let w = (2.0 * u - 1.0) / (2.0 * u + 1.0);
        let n_w = ((1e-12 * (1.0 - w)).ln() / w.ln()).ceil() as usize
            + (4.0 * x * x).ceil() as usize
            + 10;
        base.max(n_w).min(SINGLE_MODE_CAP)
    } else {
        base.min(SINGLE_MODE_CAP)
    }
}

/// Displaced squeezed thermal state `D(x)·S(r)·ν(n_T)·S(r)ᵀ·D(x)ᵀ` with
/// `S = exp(½r(a†² − a²))`, `D = exp(x(a† − a))` on the truncated space.
pub fn gaussian1_to_fock(x: f64, r: f64, n_t: f64, n_max: usize) -> Result<FockDensity> {
    if !(x.is_finite() && r.is_finite() && n_t.is_finite()) || n_t < 0.0 {
        return Err(CliError::Config(
            "state parameters must be finite with n_T ≥ 0".into(),
        ));
    }
    if n_max == 0 || n_max > SINGLE_MODE_CAP {
        return Err(CliError::Config(format!(
            "single-mode cutoff must lie in [1, {SINGLE_MODE_CAP}]"
        )));
    }
    let dim = n_max + 1;
    let a = annihilation(dim);
    let ad = a.transpose();
    let nu = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(thermal_weights(n_t, dim)));
    let squeeze = ((&ad * &ad - &a * &a) * (0.5 * r)).exp();
    let displace = ((&ad - &a) * x).exp();
    let u = displace * squeeze;
    let rho = &u * nu * u.transpose();
    FockDensity::gated(symmetrize(rho), n_max, 1)
}

/// Two-mode squeezed thermal state from energy parameters `(N, β, γ)`:
/// `S₂·(ν₁⊗ν₂)·S₂ᵀ` with `S₂ = exp(r(a†⊗a† − a⊗a))`, `sinh²r = βN/2`.
pub fn sts2_to_fock(p: &EnergyParams2, n_max: usize) -> Result<FockDensity> {
    if n_max == 0 || n_max > TWO_MODE_CAP {
        return Err(CliError::Config(format!(
            "two-mode cutoff must lie in [1, {TWO_MODE_CAP}]"
        )));
    }
    let (n_s, n_t1, n_t2) = physical_from_energy(p)?;
    let r = n_s.sqrt().asinh();
    let dim = n_max + 1;
    let w1 = thermal_weights(n_t1, dim);
    let w2 = thermal_weights(n_t2, dim);
    let mut nu = DMatrix::zeros(dim * dim, dim * dim);
    for (i, wa) in w1.iter().enumerate() {
        for (j, wb) in w2.iter().enumerate() {
            nu[(i * dim + j, i * dim + j)] = wa * wb;
        }
    }
    let s2 = two_mode_squeeze(r, dim);
    let rho = &s2 * nu * s2.transpose();
    FockDensity::gated(symmetrize(rho), n_max, 2)
}

/// `exp(r(a†⊗a† − a⊗a))` assembled sector by sector: the generator conserves
/// `n_a − n_b`, so it block-diagonalizes into skew tridiagonal blocks whose
/// exponentials cost O(n⁴) overall instead of O(n⁶) for the full matrix.
fn two_mode_squeeze(r: f64, dim: usize) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(dim * dim, dim * dim);
    let d = dim as isize;
    for k in (1 - d)..d {
        let len = (d - k.abs()) as usize;
        let index = |j: usize| -> usize {
            let (na, nb) = if k >= 0 {
                (j + k as usize, j)
            } else {
                (j, j + (-k) as usize)
            };
            na * dim + nb
        };
        let mut g = DMatrix::zeros(len, len);
        for j in 0..len.saturating_sub(1) {
            let (na, nb) = if k >= 0 {
                (j + k as usize, j)
            } else {
                (j, j + (-k) as usize)
            };
            let c = r * (((na + 1) * (nb + 1)) as f64).sqrt();
            g[(j + 1, j)] = c;
            g[(j, j + 1)] = -c;
        }
        let e = g.exp();
        for col in 0..len {
            for row in 0..len {
                s[(index(row), index(col))] = e[(row, col)];
            }
        }
    }
    s
}

/// Pure projector onto `Σ ψ_n |n,n⟩` in the doubled truncated basis.
pub fn pnes_to_fock(p: &PnesState, n_max: usize) -> Result<FockDensity> {
    if n_max == 0 || n_max > TWO_MODE_CAP {
        return Err(CliError::Config(format!(
            "two-mode cutoff must lie in [1, {TWO_MODE_CAP}]"
        )));
    }
    let dim = n_max + 1;
    let coeffs = p.coeffs();
    let kept: f64 = coeffs.iter().take(dim).map(|c| c * c).sum();
    let deficit = 1.0 - kept;
    if deficit >= DEFICIT_GATE {
        return Err(CliError::Cutoff { n_max, deficit });
    }
    let norm = kept.sqrt();
    let mut v = nalgebra::DVector::zeros(dim * dim);
    for (n, &c) in coeffs.iter().take(dim).enumerate() {
        v[n * dim + n] = c / norm;
    }
    let rho = &v * v.transpose();
    Ok(FockDensity {
        matrix: rho,
        n_max,
        modes: 2,
        trace_deficit: deficit,
    })
}

/// Smallest two-mode cutoff whose per-mode geometric tails (base
/// `w = (A−1)/(A+1)` per mode) fall below 1e-9 with a 20× safety margin,
/// or `None` when no cutoff within the cap qualifies (caller resamples).
pub fn two_mode_cutoff(a: f64, b: f64) -> Option<usize> {
    let w = ((a - 1.0) / (a + 1.0)).max((b - 1.0) / (b + 1.0));
    if w <= 0.0 {
        return Some(6);
    }
    (6..=TWO_MODE_CAP).find(|&nm| 20.0 * w.powi(nm as i32 + 1) < 1e-9)
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    let t = m.transpose();
    (m + t) * 0.5
}

/// Hermitian square root with the clipping policy: eigenvalues in
/// `[−1e-10, 0)` are clipped to zero, anything lower is a hard error
/// signaling cutoff or construction failure.
fn sqrt_psd(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (keep, compact) = compress_symmetric(m);
    let n = m.nrows();
    if keep.is_empty() {
        return Ok(DMatrix::zeros(n, n));
    }
    let (mut vals, vecs) = symmetric_eigs(compact)?;
    for v in vals.iter_mut() {
        if *v < EIG_CLIP {
            return Err(CoreError::NumericalConsistency(
                "density-matrix eigenvalue below the clipping floor",
            )
            .into());
        }
        *v = v.max(0.0).sqrt();
    }
    let mut scaled = vecs.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= vals[j];
    }
    let compact_sqrt = scaled * vecs.transpose();
    // Scatter back: rows dropped by compression carry eigenvalue 0, so the
    // square root is zero outside the kept block.
    let mut full = DMatrix::zeros(n, n);
    for (cj, &j) in keep.iter().enumerate() {
        for (ci, &i) in keep.iter().enumerate() {
            full[(i, j)] = compact_sqrt[(ci, cj)];
        }
    }
    Ok(full)
}

/// Uhlmann fidelity `(Tr √(√ρ₁ ρ₂ √ρ₁))²` evaluated as the squared nuclear
/// norm of `√ρ₁·√ρ₂`. The singular-value route never squares the product,
/// so the ~1e-10 noise left by eigenvalue clipping is not amplified back
/// through a square root of a near-singular sandwich.
pub fn uhlmann(r1: &FockDensity, r2: &FockDensity) -> Result<f64> {
    check_compatible(r1, r2)?;
    let s1 = sqrt_psd(&r1.matrix)?;
    let s2 = sqrt_psd(&r2.matrix)?;
    let k = s1 * s2;
    let f = nuclear_norm(k)?.powi(2);
    if f > 1.0 + 1e-9 {
        return Err(CoreError::NumericalConsistency(
            "oracle fidelity exceeded 1 beyond round-off allowance",
        )
        .into());
    }
    Ok(f)
}

/// Trace distance `½‖ρ₁ − ρ₂‖₁` from the spectrum of the difference.
pub fn trace_distance(r1: &FockDensity, r2: &FockDensity) -> Result<f64> {
    check_compatible(r1, r2)?;
    let diff = &r1.matrix - &r2.matrix;
    let (keep, compact) = compress_symmetric(&diff);
    if keep.is_empty() {
        return Ok(0.0);
    }
    let (vals, _) = symmetric_eigs(compact)?;
    Ok(0.5 * vals.iter().map(|v| v.abs()).sum::<f64>())
}

// ---------------------------------------------------------------------------
// Spectral routines.
//
// The stock symmetric eigensolver produces NaN on matrices with exact-zero
// rows (Householder reflection of a null column), and photon-number
// projectors are full of those. Two defenses: structurally zero rows/columns
// are compressed away first (they carry eigenvalue 0 exactly), and every
// fast-path decomposition is validated against the trace and Frobenius
// invariants with a cyclic Jacobi sweep as the unconditional fallback.
// ---------------------------------------------------------------------------

/// Indices of rows with any nonzero entry, plus the matrix restricted to
/// those rows/columns. Zero rows arise structurally (padding, projectors)
/// and are exact, so the comparison with 0.0 is the right test.
fn compress_symmetric(m: &DMatrix<f64>) -> (Vec<usize>, DMatrix<f64>) {
    let n = m.nrows();
    let keep: Vec<usize> = (0..n)
        .filter(|&i| (0..n).any(|j| m[(i, j)] != 0.0))
        .collect();
    let k = keep.len();
    let mut compact = DMatrix::zeros(k, k);
    for (cj, &j) in keep.iter().enumerate() {
        for (ci, &i) in keep.iter().enumerate() {
            compact[(ci, cj)] = m[(i, j)];
        }
    }
    (keep, compact)
}

/// Symmetric eigendecomposition with a validated fast path.
fn symmetric_eigs(m: DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let trace = m.trace();
    let frob2 = m.iter().map(|v| v * v).sum::<f64>();
    if let Some(es) = m.clone().try_symmetric_eigen(1e-13, 300) {
        let vals: Vec<f64> = es.eigenvalues.iter().copied().collect();
        let sum: f64 = vals.iter().sum();
        let sq: f64 = vals.iter().map(|v| v * v).sum();
        let ok = vals.iter().all(|v| v.is_finite())
            && (sum - trace).abs() <= 1e-9 * trace.abs().max(1.0)
            && (sq - frob2).abs() <= 1e-9 * frob2.max(1.0);
        if ok {
            return Ok((vals, es.eigenvectors));
        }
    }
    jacobi_eigen(m)
}

/// Cyclic Jacobi eigendecomposition: unconditionally convergent for
/// symmetric matrices, accurate to round-off in `‖A‖`. Slower than QR but
/// immune to the degeneracies that break it; this is the safety net.
fn jacobi_eigen(mut a: DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    let mut v = DMatrix::identity(n, n);
    if n <= 1 {
        return Ok((a.diagonal().iter().copied().collect(), v));
    }
    let frob2 = a.iter().map(|x| x * x).sum::<f64>().max(1.0);
    let stop = 1e-30 * frob2;
    let skip = stop / ((n * n) as f64);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for j in 0..n {
            for i in 0..j {
                off += a[(i, j)] * a[(i, j)];
            }
        }
        if off <= stop {
            return Ok((a.diagonal().iter().copied().collect(), v));
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq * apq <= skip {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    Err(CoreError::NumericalConsistency("Jacobi eigensolver did not converge").into())
}

/// Nuclear norm `Σ σᵢ` with a validated fast path (bidiagonal SVD checked
/// against the Frobenius invariant `Σσᵢ² = ‖K‖_F²`) and a one-sided Jacobi
/// fallback. Zero rows and columns are trimmed first.
fn nuclear_norm(k: DMatrix<f64>) -> Result<f64> {
    let rows: Vec<usize> = (0..k.nrows())
        .filter(|&i| (0..k.ncols()).any(|j| k[(i, j)] != 0.0))
        .collect();
    let cols: Vec<usize> = (0..k.ncols())
        .filter(|&j| (0..k.nrows()).any(|i| k[(i, j)] != 0.0))
        .collect();
    if rows.is_empty() || cols.is_empty() {
        return Ok(0.0);
    }
    let mut compact = DMatrix::zeros(rows.len(), cols.len());
    for (cj, &j) in cols.iter().enumerate() {
        for (ci, &i) in rows.iter().enumerate() {
            compact[(ci, cj)] = k[(i, j)];
        }
    }
    let frob2 = compact.iter().map(|v| v * v).sum::<f64>();
    if let Some(svd) = compact.clone().try_svd(false, false, 1e-13, 300) {
        let sv = &svd.singular_values;
        let sq: f64 = sv.iter().map(|v| v * v).sum();
        if sv.iter().all(|v| v.is_finite() && *v >= 0.0)
            && (sq - frob2).abs() <= 1e-9 * frob2.max(1.0)
        {
            return Ok(sv.iter().sum());
        }
    }
    one_sided_jacobi_nuclear(compact)
}

/// One-sided Jacobi SVD (column orthogonalization): the singular values are
/// the column norms once all column pairs are orthogonal. Never forms KᵀK,
/// so small singular values keep their relative accuracy.
fn one_sided_jacobi_nuclear(mut k: DMatrix<f64>) -> Result<f64> {
    let (m, n) = (k.nrows(), k.ncols());
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = 0.0;
                for i in 0..m {
                    let kp = k[(i, p)];
                    let kq = k[(i, q)];
                    app += kp * kp;
                    aqq += kq * kq;
                    apq += kp * kq;
                }
                if apq.abs() <= 1e-15 * (app * aqq).sqrt() {
                    continue;
                }
                rotated = true;
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..m {
                    let kp = k[(i, p)];
                    let kq = k[(i, q)];
                    k[(i, p)] = c * kp - s * kq;
                    k[(i, q)] = s * kp + c * kq;
                }
            }
        }
        if !rotated {
            return Ok((0..n).map(|j| k.column(j).norm()).sum());
        }
    }
    Err(CoreError::NumericalConsistency("Jacobi SVD did not converge").into())
}

fn check_compatible(r1: &FockDensity, r2: &FockDensity) -> Result<()> {
    if r1.modes != r2.modes {
        return Err(CliError::Config(
            "density matrices describe different mode counts".into(),
        ));
    }
    if r1.dim() != r2.dim() {
        return Err(CliError::Config(format!(
            "density-matrix dimension mismatch: {} vs {} (pad to a common cutoff first)",
            r1.dim(),
            r2.dim()
        )));
    }
    Ok(())
}

/// `(Σ n·ρ_nn, Σ n²·ρ_nn)` for a single-mode density matrix.
pub fn photon_moments(r: &FockDensity) -> Result<(f64, f64)> {
    if r.modes != 1 {
        return Err(CliError::Config(
            "photon moments are defined here for single-mode matrices".into(),
        ));
    }
    let mut mean = 0.0;
    let mut second = 0.0;
    for n in 0..r.dim() {
        let p = r.matrix[(n, n)];
        mean += n as f64 * p;
        second += (n * n) as f64 * p;
    }
    Ok((mean, second))
}

/// Trace out the second mode of a two-mode density matrix.
pub fn partial_trace_second(r: &FockDensity) -> Result<FockDensity> {
    if r.modes != 2 {
        return Err(CliError::Config(
            "partial trace expects a two-mode density matrix".into(),
        ));
    }
    let dim = r.n_max + 1;
    let mut reduced = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = 0.0;
            for b in 0..dim {
                acc += r.matrix[(i * dim + b, j * dim + b)];
            }
            reduced[(i, j)] = acc;
        }
    }
    Ok(FockDensity {
        matrix: reduced,
        n_max: r.n_max,
        modes: 1,
        trace_deficit: r.trace_deficit,
    })
}
