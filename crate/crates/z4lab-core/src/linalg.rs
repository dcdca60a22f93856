//! Small dense linear algebra for dimension three: just enough for Jacobians,
//! tangent frames, and analytic eigen-decompositions, with no external
//! dependency so results are bit-reproducible across platforms.

use num_complex::Complex64;

/// 3x3 real matrix in row-major layout.
pub type Mat3 = [[f64; 3]; 3];

/// Identity matrix.
pub fn identity() -> Mat3 {
    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
}

/// Matrix-vector product.
pub fn mat_vec(m: &Mat3, v: &[f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

/// Matrix-matrix product.
pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    out
}

pub fn transpose(m: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in m.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            out[j][i] = v;
        }
    }
    out
}

pub fn determinant(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub fn trace(m: &Mat3) -> f64 {
    m[0][0] + m[1][1] + m[2][2]
}

pub fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm(a: &[f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

pub fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Solves `M x = rhs` by Gaussian elimination with partial pivoting.
/// Returns `None` for a numerically singular system.
pub fn solve3(m: &Mat3, rhs: &[f64; 3]) -> Option<[f64; 3]> {
    let mut a = [[0.0f64; 4]; 3];
    for i in 0..3 {
        a[i][..3].copy_from_slice(&m[i]);
        a[i][3] = rhs[i];
    }
    for col in 0..3 {
        let pivot_row = (col..3)
            .max_by(|&r1, &r2| a[r1][col].abs().total_cmp(&a[r2][col].abs()))
            .unwrap();
        if a[pivot_row][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot_row);
        for row in (col + 1)..3 {
            let f = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    let mut x = [0.0; 3];
    for i in (0..3).rev() {
        let mut s = a[i][3];
        for (j, &xj) in x.iter().enumerate().skip(i + 1) {
            s -= a[i][j] * xj;
        }
        x[i] = s / a[i][i];
    }
    if x.iter().all(|v| v.is_finite()) {
        Some(x)
    } else {
        None
    }
}

/// QR factorization of a frame of `k <= 3` column vectors in R^3 by modified
/// Gram–Schmidt with one re-orthogonalization pass. The frame is replaced by
/// its orthonormalization; the returned array holds the diagonal entries
/// `r_ii = |component of column i orthogonal to the previous ones|`.
pub fn qr_frame(frame: &mut [[f64; 3]], k: usize) -> [f64; 3] {
    debug_assert!(k <= frame.len() && k <= 3);
    let mut diag = [0.0; 3];
    for i in 0..k {
        // Two orthogonalization passes ("twice is enough") for stability when
        // columns grow strongly aligned between renormalizations.
        for _pass in 0..2 {
            for j in 0..i {
                let qj = frame[j];
                let proj = dot(&frame[i], &qj);
                for (a, b) in frame[i].iter_mut().zip(qj.iter()) {
                    *a -= proj * b;
                }
            }
        }
        let r = norm(&frame[i]);
        diag[i] = r;
        if r > 0.0 {
            for a in frame[i].iter_mut() {
                *a /= r;
            }
        } else {
            // Degenerate column: replace with any unit vector orthogonal to
            // the previous ones so the iteration can continue.
            let mut replaced = false;
            for basis in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] {
                let mut cand = basis;
                for j in 0..i {
                    let qj = frame[j];
                    let proj = dot(&cand, &qj);
                    for (a, b) in cand.iter_mut().zip(qj.iter()) {
                        *a -= proj * b;
                    }
                }
                let n = norm(&cand);
                if n > 1e-3 {
                    for a in cand.iter_mut() {
                        *a /= n;
                    }
                    frame[i] = cand;
                    replaced = true;
                    break;
                }
            }
            debug_assert!(replaced, "could not complete degenerate frame");
        }
    }
    diag
}

/// Roots of the monic cubic `t^3 + p t^2 + q t + r`, as a triple of complex
/// numbers, each polished by a few complex Newton iterations on the original
/// polynomial. Real roots come out with exactly zero imaginary part.
pub fn cubic_roots(p: f64, q: f64, r: f64) -> [Complex64; 3] {
    // Depressed form t = s - p/3: s^3 + a s + b.
    let a = q - p * p / 3.0;
    let b = 2.0 * p * p * p / 27.0 - p * q / 3.0 + r;
    let shift = -p / 3.0;
    let disc = b * b / 4.0 + a * a * a / 27.0;

    let mut roots: [Complex64; 3];
    if disc > 0.0 {
        // One real root, one complex-conjugate pair (Cardano).
        let sq = disc.sqrt();
        let u = (-b / 2.0 + sq).cbrt();
        let v = (-b / 2.0 - sq).cbrt();
        let real = u + v + shift;
        let re_pair = -(u + v) / 2.0 + shift;
        let im_pair = (u - v) * 3f64.sqrt() / 2.0;
        roots = [
            Complex64::new(real, 0.0),
            Complex64::new(re_pair, im_pair),
            Complex64::new(re_pair, -im_pair),
        ];
    } else if a == 0.0 && b == 0.0 {
        roots = [Complex64::new(shift, 0.0); 3];
    } else {
        // Three real roots (trigonometric form).
        let m = 2.0 * (-a / 3.0).sqrt();
        let arg = (3.0 * b / (a * m)).clamp(-1.0, 1.0);
        let phi = arg.acos();
        roots = [0, 1, 2].map(|k| {
            let t = m * ((phi + 2.0 * std::f64::consts::PI * k as f64) / 3.0).cos();
            Complex64::new(t + shift, 0.0)
        });
    }

    // Newton polish on the undepresssed cubic; keeps real roots real.
    let pc = Complex64::new(p, 0.0);
    let qc = Complex64::new(q, 0.0);
    let rc = Complex64::new(r, 0.0);
    for root in roots.iter_mut() {
        for _ in 0..3 {
            let z = *root;
            let f = ((z + pc) * z + qc) * z + rc;
            let df = (3.0 * z + 2.0 * pc) * z + qc;
            if df.norm() > 0.0 {
                let step = f / df;
                if step.norm().is_finite() {
                    *root = z - step;
                }
            }
        }
        if root.im.abs() < 1e-12 * (1.0 + root.re.abs()) && disc <= 0.0 {
            *root = Complex64::new(root.re, 0.0);
        }
    }
    roots
}

/// Coefficients `(c2, c1, c0)` of the characteristic polynomial
/// `lambda^3 + c2 lambda^2 + c1 lambda + c0` of a 3x3 matrix.
pub fn char_poly(m: &Mat3) -> (f64, f64, f64) {
    let tr = trace(m);
    let minor_sum = (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        + (m[0][0] * m[2][2] - m[0][2] * m[2][0])
        + (m[0][0] * m[1][1] - m[0][1] * m[1][0]);
    (-tr, minor_sum, -determinant(m))
}

/// Eigenvalues of a 3x3 real matrix, sorted by descending real part (ties
/// broken by descending imaginary part so conjugate pairs are adjacent).
pub fn eigenvalues(m: &Mat3) -> [Complex64; 3] {
    let (c2, c1, c0) = char_poly(m);
    let mut roots = cubic_roots(c2, c1, c0);
    roots.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    roots
}

/// A real eigenvector for a real eigenvalue `lambda` of `m`, unit-normalized.
/// Uses the cross product of the two most independent rows of `m - lambda I`;
/// returns `None` if every row pair is near-parallel (eigenspace dimension
/// above one or severe ill-conditioning).
pub fn real_eigenvector(m: &Mat3, lambda: f64) -> Option<[f64; 3]> {
    let mut shifted = *m;
    for i in 0..3 {
        shifted[i][i] -= lambda;
    }
    let rows = [shifted[0], shifted[1], shifted[2]];
    let mut best: Option<[f64; 3]> = None;
    let mut best_norm = 0.0;
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let c = cross(&rows[i], &rows[j]);
        let n = norm(&c);
        if n > best_norm {
            best_norm = n;
            best = Some(c);
        }
    }
    let scale = rows.iter().map(norm).fold(0.0f64, f64::max).max(1.0);
    if best_norm <= 1e-10 * scale * scale {
        return None;
    }
    best.map(|v| {
        let n = norm(&v);
        [v[0] / n, v[1] / n, v[2] / n]
    })
}
