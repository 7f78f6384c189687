//! Small fixed-size matrix arithmetic for quadrature covariance matrices.
//!
//! Two and four dimensional real symmetric matrices cover every state family
//! in the crate, so the implementations are direct closed forms (cofactor
//! determinants, explicit inverses) rather than a general linear-algebra
//! dependency. A minimal complex scalar is included for the one place a
//! complex determinant is required.

use crate::math;

/// 2×2 real matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub m: [[f64; 2]; 2],
}

impl Mat2 {
    pub const fn new(m: [[f64; 2]; 2]) -> Self {
        Mat2 { m }
    }

    pub const fn diag(a: f64, b: f64) -> Self {
        Mat2::new([[a, 0.0], [0.0, b]])
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn add(&self, other: &Mat2) -> Mat2 {
        let mut r = [[0.0; 2]; 2];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = self.m[i][j] + other.m[i][j];
            }
        }
        Mat2::new(r)
    }

    /// Inverse, or `None` when the determinant vanishes.
    pub fn inverse(&self) -> Option<Mat2> {
        let d = self.det();
        if d == 0.0 {
            return None;
        }
        Some(Mat2::new([
            [self.m[1][1] / d, -self.m[0][1] / d],
            [-self.m[1][0] / d, self.m[0][0] / d],
        ]))
    }

    /// `vᵀ M v`.
    pub fn quad_form(&self, v: [f64; 2]) -> f64 {
        v[0] * (self.m[0][0] * v[0] + self.m[0][1] * v[1])
            + v[1] * (self.m[1][0] * v[0] + self.m[1][1] * v[1])
    }

    /// `Tr(M²)` for a symmetric matrix.
    pub fn trace_of_square(&self) -> f64 {
        let m = &self.m;
        m[0][0] * m[0][0] + 2.0 * m[0][1] * m[1][0] + m[1][1] * m[1][1]
    }

    /// Eigenvalues of a symmetric matrix, `(min, max)`, by the closed form.
    pub fn sym_eigenvalues(&self) -> (f64, f64) {
        let half_tr = 0.5 * self.trace();
        let half_diff = 0.5 * (self.m[0][0] - self.m[1][1]);
        let rad = math::sqrt(half_diff * half_diff + self.m[0][1] * self.m[1][0]);
        (half_tr - rad, half_tr + rad)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        math::abs(self.m[0][1] - self.m[1][0]) <= tol
    }

    /// Symmetric and positive definite (both leading minors positive).
    pub fn is_positive_definite(&self) -> bool {
        self.m[0][0] > 0.0 && self.det() > 0.0
    }
}

/// 4×4 real matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat4 {
    pub m: [[f64; 4]; 4],
}

/// Symplectic form on two modes in `(x₁, p₁, x₂, p₂)` ordering:
/// `[xᵢ, pⱼ] ↦ Ω` with blocks `[[0, 1], [-1, 0]]`.
pub const OMEGA: Mat4 = Mat4 {
    m: [
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0, 0.0],
    ],
};

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

impl Mat4 {
    pub const fn new(m: [[f64; 4]; 4]) -> Self {
        Mat4 { m }
    }

    pub const fn zero() -> Self {
        Mat4::new([[0.0; 4]; 4])
    }

    pub fn identity_scaled(s: f64) -> Self {
        let mut r = Mat4::zero();
        for i in 0..4 {
            r.m[i][i] = s;
        }
        r
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1] + self.m[2][2] + self.m[3][3]
    }

    pub fn add(&self, other: &Mat4) -> Mat4 {
        let mut r = Mat4::zero();
        for i in 0..4 {
            for j in 0..4 {
                r.m[i][j] = self.m[i][j] + other.m[i][j];
            }
        }
        r
    }

    pub fn sub(&self, other: &Mat4) -> Mat4 {
        let mut r = Mat4::zero();
        for i in 0..4 {
            for j in 0..4 {
                r.m[i][j] = self.m[i][j] - other.m[i][j];
            }
        }
        r
    }

    pub fn mul(&self, other: &Mat4) -> Mat4 {
        let mut r = Mat4::zero();
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = 0.0;
                for (k, row) in other.m.iter().enumerate() {
                    acc += self.m[i][k] * row[j];
                }
                r.m[i][j] = acc;
            }
        }
        r
    }

    /// Determinant by cofactor expansion along the first row.
    pub fn det(&self) -> f64 {
        let mut acc = 0.0;
        let mut sign = 1.0;
        for col in 0..4 {
            let minor = self.minor3(0, col);
            acc += sign * self.m[0][col] * det3(&minor);
            sign = -sign;
        }
        acc
    }

    fn minor3(&self, row: usize, col: usize) -> [[f64; 3]; 3] {
        let mut out = [[0.0; 3]; 3];
        let mut r = 0;
        for i in 0..4 {
            if i == row {
                continue;
            }
            let mut c = 0;
            for j in 0..4 {
                if j == col {
                    continue;
                }
                out[r][c] = self.m[i][j];
                c += 1;
            }
            r += 1;
        }
        out
    }

    /// Determinant of the 2×2 block whose top-left corner sits at `(r, c)`.
    pub fn block2_det(&self, r: usize, c: usize) -> f64 {
        self.m[r][c] * self.m[r + 1][c + 1] - self.m[r][c + 1] * self.m[r + 1][c]
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        for i in 0..4 {
            for j in (i + 1)..4 {
                if math::abs(self.m[i][j] - self.m[j][i]) > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Positive definiteness via the four leading principal minors.
    pub fn is_positive_definite(&self) -> bool {
        if self.m[0][0] <= 0.0 || self.block2_det(0, 0) <= 0.0 {
            return false;
        }
        let third = det3(&[
            [self.m[0][0], self.m[0][1], self.m[0][2]],
            [self.m[1][0], self.m[1][1], self.m[1][2]],
            [self.m[2][0], self.m[2][1], self.m[2][2]],
        ]);
        third > 0.0 && self.det() > 0.0
    }
}

/// Minimal complex scalar for the one complex determinant in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct C64 {
    pub re: f64,
    pub im: f64,
}

impl C64 {
    pub const fn new(re: f64, im: f64) -> Self {
        C64 { re, im }
    }

    fn mul(self, o: C64) -> C64 {
        C64::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }

    fn sub(self, o: C64) -> C64 {
        C64::new(self.re - o.re, self.im - o.im)
    }

    fn add(self, o: C64) -> C64 {
        C64::new(self.re + o.re, self.im + o.im)
    }
}

fn cdet3(m: &[[C64; 3]; 3]) -> C64 {
    let a = m[1][1].mul(m[2][2]).sub(m[1][2].mul(m[2][1]));
    let b = m[1][0].mul(m[2][2]).sub(m[1][2].mul(m[2][0]));
    let c = m[1][0].mul(m[2][1]).sub(m[1][1].mul(m[2][0]));
    m[0][0].mul(a).sub(m[0][1].mul(b)).add(m[0][2].mul(c))
}

/// Determinant of `re + i·im` for 4×4 real parts, by cofactor expansion.
pub fn complex_det4(re: &Mat4, im: &Mat4) -> C64 {
    let at = |i: usize, j: usize| C64::new(re.m[i][j], im.m[i][j]);
    let mut acc = C64::new(0.0, 0.0);
    let mut sign = 1.0;
    for col in 0..4 {
        let mut minor = [[C64::new(0.0, 0.0); 3]; 3];
        let mut r = 0;
        for i in 1..4 {
            let mut c = 0;
            for j in 0..4 {
                if j == col {
                    continue;
                }
                minor[r][c] = at(i, j);
                c += 1;
            }
            r += 1;
        }
        let term = at(0, col).mul(cdet3(&minor));
        acc = acc.add(C64::new(sign * term.re, sign * term.im));
        sign = -sign;
    }
    acc
}
