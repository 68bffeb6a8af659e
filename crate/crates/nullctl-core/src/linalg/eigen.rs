//! Eigensolvers: closed forms for symmetric orders 1-3, cyclic Jacobi for
//! larger symmetric matrices, and Householder reduction plus Francis
//! double-shift QR (with eigenvector backsubstitution, EISPACK lineage) for
//! the general real case.

use num_complex::Complex64;

use super::{CMatrix, LinalgError, Matrix};

const EPS: f64 = 2.220446049250313e-16;

/// Relative eigenvalue gap below which a matrix is treated as having
/// repeated eigenvalues.
pub const DISTINCT_GAP_REL: f64 = 1e-8;

/// Eigenvalues and (when available) eigenvectors of a real square matrix.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Eigenvalues sorted by real part, then imaginary part.
    pub values: Vec<Complex64>,
    /// Unit-norm eigenvector columns, present only when `distinct`.
    pub vectors: Option<CMatrix>,
    /// True when the pairwise eigenvalue gaps exceed `1e-8 * ||A||`.
    pub distinct: bool,
}

impl Spectrum {
    /// `-max Re(lambda_i)`: the decay rate of the slowest mode.
    pub fn decay_rate(&self) -> f64 {
        -self.values.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max)
    }

    /// True when every eigenvalue has a strictly negative real part.
    pub fn is_hurwitz(&self) -> bool {
        self.values.iter().all(|l| l.re < 0.0)
    }
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn sym_eigenvalues(s: &Matrix) -> Result<Vec<f64>, LinalgError> {
    if !s.is_square() {
        return Err(LinalgError::DimensionMismatch("symmetric eigensolve needs a square matrix".into()));
    }
    if !s.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    match s.rows() {
        1 => Ok(vec![s.get(0, 0)]),
        2 => Ok(sym_eig2(s)),
        3 => Ok(sym_eig3(s)),
        _ => Ok(jacobi(s, false)?.0),
    }
}

fn sym_eig2(s: &Matrix) -> Vec<f64> {
    let (a, b, c) = (s.get(0, 0), s.get(0, 1), s.get(1, 1));
    let mean = 0.5 * (a + c);
    let disc = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    vec![mean - disc, mean + disc]
}

/// Trigonometric closed form for the symmetric 3x3 characteristic cubic,
/// polished with two Newton steps per root.
fn sym_eig3(s: &Matrix) -> Vec<f64> {
    let (a, b, c) = (s.get(0, 0), s.get(1, 1), s.get(2, 2));
    let (d, e, f) = (s.get(0, 1), s.get(0, 2), s.get(1, 2));
    let p1 = d * d + e * e + f * f;
    let mut eigs = if p1 == 0.0 {
        vec![a, b, c]
    } else {
        let q = (a + b + c) / 3.0;
        let p2 = (a - q).powi(2) + (b - q).powi(2) + (c - q).powi(2) + 2.0 * p1;
        let p = (p2 / 6.0).sqrt();
        // det((S - qI)/p) / 2
        let (ba, bb, bc) = ((a - q) / p, (b - q) / p, (c - q) / p);
        let (bd, be, bf) = (d / p, e / p, f / p);
        let detb =
            ba * (bb * bc - bf * bf) - bd * (bd * bc - bf * be) + be * (bd * bf - bb * be);
        let r = (detb / 2.0).clamp(-1.0, 1.0);
        let phi = r.acos() / 3.0;
        let e1 = q + 2.0 * p * phi.cos();
        let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos();
        let e2 = 3.0 * q - e1 - e3;
        vec![e1, e2, e3]
    };

    // Characteristic polynomial chi(l) = -l^3 + tr l^2 - m2 l + det.
    let tr = a + b + c;
    let m2 = (a * b - d * d) + (a * c - e * e) + (b * c - f * f);
    let det = a * (b * c - f * f) - d * (d * c - f * e) + e * (d * f - b * e);
    for l in eigs.iter_mut() {
        for _ in 0..2 {
            let chi = -l.powi(3) + tr * l.powi(2) - m2 * *l + det;
            let dchi = -3.0 * l.powi(2) + 2.0 * tr * *l - m2;
            if dchi.abs() > 1e-8 * (1.0 + l.abs() * l.abs()) {
                let step = chi / dchi;
                if step.is_finite() {
                    *l -= step;
                }
            }
        }
    }
    eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eigs
}

/// Cyclic Jacobi for symmetric matrices: eigenvalues ascending, optional
/// orthonormal eigenvector columns.
fn jacobi(s: &Matrix, want_vectors: bool) -> Result<(Vec<f64>, Option<Matrix>), LinalgError> {
    let n = s.rows();
    let mut a = s.clone();
    let mut v = Matrix::identity(n);
    let frob: f64 = s.data().iter().map(|x| x * x).sum::<f64>().sqrt();
    let tol = EPS * frob.max(f64::MIN_POSITIVE);

    let mut converged = false;
    for _ in 0..60 {
        let off: f64 = {
            let mut acc = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    acc += a.get(i, j) * a.get(i, j);
                }
            }
            (2.0 * acc).sqrt()
        };
        if off <= tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq.abs() <= tol / (n * n) as f64 {
                    continue;
                }
                let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - sn * akq);
                    a.set(k, q, sn * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - sn * aqk);
                    a.set(q, k, sn * apk + c * aqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - sn * vkq);
                    v.set(k, q, sn * vkp + c * vkq);
                }
            }
        }
    }
    if !converged {
        // one final check: the sweeps may have just reached tolerance
        let mut acc = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                acc += a.get(i, j) * a.get(i, j);
            }
        }
        if (2.0 * acc).sqrt() > tol * 1e3 {
            return Err(LinalgError::IterationFailure);
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).partial_cmp(&a.get(j, j)).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| a.get(i, i)).collect();
    let vectors = want_vectors.then(|| {
        let mut p = Matrix::zeros(n, n);
        for (new_col, &old_col) in order.iter().enumerate() {
            for row in 0..n {
                p.set(row, new_col, v.get(row, old_col));
            }
        }
        p
    });
    Ok((values, vectors))
}

/// Full eigendecomposition of a real square matrix.
pub fn eigen(a: &Matrix) -> Result<Spectrum, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::DimensionMismatch("eigen needs a square matrix".into()));
    }
    if !a.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let n = a.rows();

    let symmetric =
        (0..n).all(|i| (0..n).all(|j| a.get(i, j) == a.get(j, i)));

    let (re, im, v) = if symmetric {
        let (values, vectors) = jacobi(a, true)?;
        (values, vec![0.0; n], vectors.unwrap())
    } else {
        let mut h = a.clone();
        let mut v = Matrix::identity(n);
        orthes(&mut h, &mut v);
        let mut d = vec![0.0; n];
        let mut e = vec![0.0; n];
        hqr2(&mut h, &mut v, &mut d, &mut e)?;
        (d, e, v)
    };

    // Assemble complex eigenpairs from the packed real representation:
    // im[j] > 0 marks a conjugate pair whose vectors are col_j +- i*col_{j+1}.
    let mut values = Vec::with_capacity(n);
    let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut j = 0;
    while j < n {
        if im[j] == 0.0 {
            values.push(Complex64::new(re[j], 0.0));
            columns.push((0..n).map(|i| Complex64::new(v.get(i, j), 0.0)).collect());
            j += 1;
        } else {
            values.push(Complex64::new(re[j], im[j].abs()));
            values.push(Complex64::new(re[j], -im[j].abs()));
            let plus: Vec<Complex64> =
                (0..n).map(|i| Complex64::new(v.get(i, j), v.get(i, j + 1))).collect();
            let minus: Vec<Complex64> = plus.iter().map(|z| z.conj()).collect();
            columns.push(plus);
            columns.push(minus);
            j += 2;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        (values[i].re, values[i].im)
            .partial_cmp(&(values[j].re, values[j].im))
            .unwrap()
    });
    let values: Vec<Complex64> = order.iter().map(|&i| values[i]).collect();
    let columns: Vec<Vec<Complex64>> = order.iter().map(|&i| columns[i].clone()).collect();

    let anorm = super::spectral_norm(a)?;
    let mut distinct = true;
    for i in 0..n {
        for j in (i + 1)..n {
            if (values[i] - values[j]).norm() <= DISTINCT_GAP_REL * anorm {
                distinct = false;
            }
        }
    }

    let vectors = if distinct {
        let mut p = CMatrix::zeros(n, n);
        for (jc, col) in columns.iter().enumerate() {
            let norm: f64 = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Err(LinalgError::IterationFailure);
            }
            for (i, z) in col.iter().enumerate() {
                p.set(i, jc, z / norm);
            }
        }
        Some(p)
    } else {
        None
    };

    Ok(Spectrum { values, vectors, distinct })
}

/// Householder reduction to upper Hessenberg form, accumulating the
/// orthogonal transform in `v`.
fn orthes(h: &mut Matrix, v: &mut Matrix) {
    let n = h.rows();
    if n <= 2 {
        return;
    }
    let low = 0usize;
    let high = n - 1;
    let mut ort = vec![0.0; n];

    for m in (low + 1)..high {
        let mut scale = 0.0;
        for i in m..=high {
            scale += h.get(i, m - 1).abs();
        }
        if scale != 0.0 {
            let mut hsum = 0.0;
            for i in (m..=high).rev() {
                ort[i] = h.get(i, m - 1) / scale;
                hsum += ort[i] * ort[i];
            }
            let mut g = hsum.sqrt();
            if ort[m] > 0.0 {
                g = -g;
            }
            hsum -= ort[m] * g;
            ort[m] -= g;

            for j in m..n {
                let mut f = 0.0;
                for i in (m..=high).rev() {
                    f += ort[i] * h.get(i, j);
                }
                f /= hsum;
                for i in m..=high {
                    let val = h.get(i, j) - f * ort[i];
                    h.set(i, j, val);
                }
            }
            for i in 0..=high {
                let mut f = 0.0;
                for j in (m..=high).rev() {
                    f += ort[j] * h.get(i, j);
                }
                f /= hsum;
                for j in m..=high {
                    let val = h.get(i, j) - f * ort[j];
                    h.set(i, j, val);
                }
            }
            ort[m] *= scale;
            h.set(m, m - 1, scale * g);
        }
    }

    for m in ((low + 1)..high).rev() {
        if h.get(m, m - 1) != 0.0 {
            for i in (m + 1)..=high {
                ort[i] = h.get(i, m - 1);
            }
            for j in m..=high {
                let mut g = 0.0;
                for i in m..=high {
                    g += ort[i] * v.get(i, j);
                }
                // double division avoids possible underflow
                g = (g / ort[m]) / h.get(m, m - 1);
                for i in m..=high {
                    let val = v.get(i, j) + g * ort[i];
                    v.set(i, j, val);
                }
            }
        }
    }
}

/// Complex scalar division `(xr + i xi) / (yr + i yi)`.
fn cdiv(xr: f64, xi: f64, yr: f64, yi: f64) -> (f64, f64) {
    if yr.abs() > yi.abs() {
        let r = yi / yr;
        let d = yr + r * yi;
        ((xr + r * xi) / d, (xi - r * xr) / d)
    } else {
        let r = yr / yi;
        let d = yi + r * yr;
        ((r * xr + xi) / d, (r * xi - xr) / d)
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix with eigenvector
/// backsubstitution and back-transformation. `h` is destroyed; eigenvalues
/// land in `(d, e)` and packed eigenvectors in `v`.
#[allow(clippy::too_many_lines)]
fn hqr2(hm: &mut Matrix, vm: &mut Matrix, d: &mut [f64], e: &mut [f64]) -> Result<(), LinalgError> {
    let nn = hm.rows() as isize;
    let cols = hm.cols();
    let h = |m: &Matrix, i: isize, j: isize| m.data()[i as usize * cols + j as usize];

    macro_rules! hset {
        ($m:expr, $i:expr, $j:expr, $v:expr) => {
            $m.set($i as usize, $j as usize, $v)
        };
    }

    let mut n = nn - 1;
    let low: isize = 0;
    let high: isize = nn - 1;
    let mut exshift = 0.0;
    let (mut p, mut q, mut r, mut s, mut z) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut t;
    let mut w;
    let mut x;
    let mut y;

    let mut norm = 0.0;
    for i in 0..nn {
        for j in (i - 1).max(0)..nn {
            norm += h(hm, i, j).abs();
        }
    }

    let mut iter = 0;
    let mut total_iter = 0;
    while n >= low {
        if total_iter > 80 * nn {
            return Err(LinalgError::IterationFailure);
        }

        let mut l = n;
        while l > low {
            s = h(hm, l - 1, l - 1).abs() + h(hm, l, l).abs();
            if s == 0.0 {
                s = norm;
            }
            if h(hm, l, l - 1).abs() < EPS * s {
                break;
            }
            l -= 1;
        }

        if l == n {
            // single root
            hset!(hm, n, n, h(hm, n, n) + exshift);
            d[n as usize] = h(hm, n, n);
            e[n as usize] = 0.0;
            n -= 1;
            iter = 0;
        } else if l == n - 1 {
            // pair of roots
            w = h(hm, n, n - 1) * h(hm, n - 1, n);
            p = (h(hm, n - 1, n - 1) - h(hm, n, n)) / 2.0;
            q = p * p + w;
            z = q.abs().sqrt();
            hset!(hm, n, n, h(hm, n, n) + exshift);
            hset!(hm, n - 1, n - 1, h(hm, n - 1, n - 1) + exshift);
            x = h(hm, n, n);

            if q >= 0.0 {
                // real pair
                z = if p >= 0.0 { p + z } else { p - z };
                d[(n - 1) as usize] = x + z;
                d[n as usize] = d[(n - 1) as usize];
                if z != 0.0 {
                    d[n as usize] = x - w / z;
                }
                e[(n - 1) as usize] = 0.0;
                e[n as usize] = 0.0;
                x = h(hm, n, n - 1);
                s = x.abs() + z.abs();
                if s != 0.0 {
                    p = x / s;
                    q = z / s;
                    r = (p * p + q * q).sqrt();
                    p /= r;
                    q /= r;

                    for j in (n - 1)..nn {
                        z = h(hm, n - 1, j);
                        hset!(hm, n - 1, j, q * z + p * h(hm, n, j));
                        hset!(hm, n, j, q * h(hm, n, j) - p * z);
                    }
                    for i in 0..=n {
                        z = h(hm, i, n - 1);
                        hset!(hm, i, n - 1, q * z + p * h(hm, i, n));
                        hset!(hm, i, n, q * h(hm, i, n) - p * z);
                    }
                    for i in low..=high {
                        z = h(vm, i, n - 1);
                        hset!(vm, i, n - 1, q * z + p * h(vm, i, n));
                        hset!(vm, i, n, q * h(vm, i, n) - p * z);
                    }
                }
            } else {
                // complex pair
                d[(n - 1) as usize] = x + p;
                d[n as usize] = x + p;
                e[(n - 1) as usize] = z;
                e[n as usize] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            // form shift
            x = h(hm, n, n);
            y = 0.0;
            w = 0.0;
            if l < n {
                y = h(hm, n - 1, n - 1);
                w = h(hm, n, n - 1) * h(hm, n - 1, n);
            }

            if iter == 10 {
                exshift += x;
                for i in low..=n {
                    hset!(hm, i, i, h(hm, i, i) - x);
                }
                s = h(hm, n, n - 1).abs() + h(hm, n - 1, n - 2).abs();
                y = 0.75 * s;
                x = y;
                w = -0.4375 * s * s;
            }
            if iter == 30 {
                s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in low..=n {
                        hset!(hm, i, i, h(hm, i, i) - s);
                    }
                    exshift += s;
                    w = 0.964;
                    y = w;
                    x = y;
                }
            }

            iter += 1;
            total_iter += 1;

            // two consecutive small sub-diagonals
            let mut m = n - 2;
            while m >= l {
                z = h(hm, m, m);
                r = x - z;
                s = y - z;
                p = (r * s - w) / h(hm, m + 1, m) + h(hm, m, m + 1);
                q = h(hm, m + 1, m + 1) - z - r - s;
                r = h(hm, m + 2, m + 1);
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if h(hm, m, m - 1).abs() * (q.abs() + r.abs())
                    < EPS
                        * (p.abs()
                            * (h(hm, m - 1, m - 1).abs() + z.abs() + h(hm, m + 1, m + 1).abs()))
                {
                    break;
                }
                m -= 1;
            }

            for i in (m + 2)..=n {
                hset!(hm, i, i - 2, 0.0);
                if i > m + 2 {
                    hset!(hm, i, i - 3, 0.0);
                }
            }

            // double QR step on rows l..n, columns m..n
            for k in m..n {
                let notlast = k != n - 1;
                if k != m {
                    p = h(hm, k, k - 1);
                    q = h(hm, k + 1, k - 1);
                    r = if notlast { h(hm, k + 2, k - 1) } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = (p * p + q * q + r * r).sqrt();
                if p < 0.0 {
                    s = -s;
                }
                if s != 0.0 {
                    if k != m {
                        hset!(hm, k, k - 1, -s * x);
                    } else if l != m {
                        hset!(hm, k, k - 1, -h(hm, k, k - 1));
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;

                    for j in k..nn {
                        p = h(hm, k, j) + q * h(hm, k + 1, j);
                        if notlast {
                            p += r * h(hm, k + 2, j);
                            hset!(hm, k + 2, j, h(hm, k + 2, j) - p * z);
                        }
                        hset!(hm, k, j, h(hm, k, j) - p * x);
                        hset!(hm, k + 1, j, h(hm, k + 1, j) - p * y);
                    }
                    for i in 0..=n.min(k + 3) {
                        p = x * h(hm, i, k) + y * h(hm, i, k + 1);
                        if notlast {
                            p += z * h(hm, i, k + 2);
                            hset!(hm, i, k + 2, h(hm, i, k + 2) - p * r);
                        }
                        hset!(hm, i, k, h(hm, i, k) - p);
                        hset!(hm, i, k + 1, h(hm, i, k + 1) - p * q);
                    }
                    for i in low..=high {
                        p = x * h(vm, i, k) + y * h(vm, i, k + 1);
                        if notlast {
                            p += z * h(vm, i, k + 2);
                            hset!(vm, i, k + 2, h(vm, i, k + 2) - p * r);
                        }
                        hset!(vm, i, k, h(vm, i, k) - p);
                        hset!(vm, i, k + 1, h(vm, i, k + 1) - p * q);
                    }
                }
            }
        }
    }

    // backsubstitution: eigenvectors of the quasi-triangular form
    if norm == 0.0 {
        return Ok(());
    }
    for n in (0..nn).rev() {
        p = d[n as usize];
        q = e[n as usize];

        if q == 0.0 {
            // real vector
            let mut l = n;
            hset!(hm, n, n, 1.0);
            for i in (0..n).rev() {
                w = h(hm, i, i) - p;
                r = 0.0;
                for j in l..=n {
                    r += h(hm, i, j) * h(hm, j, n);
                }
                if e[i as usize] < 0.0 {
                    z = w;
                    s = r;
                } else {
                    l = i;
                    if e[i as usize] == 0.0 {
                        if w != 0.0 {
                            hset!(hm, i, n, -r / w);
                        } else {
                            hset!(hm, i, n, -r / (EPS * norm));
                        }
                    } else {
                        x = h(hm, i, i + 1);
                        y = h(hm, i + 1, i);
                        q = (d[i as usize] - p) * (d[i as usize] - p)
                            + e[i as usize] * e[i as usize];
                        t = (x * s - z * r) / q;
                        hset!(hm, i, n, t);
                        if x.abs() > z.abs() {
                            hset!(hm, i + 1, n, (-r - w * t) / x);
                        } else {
                            hset!(hm, i + 1, n, (-s - y * t) / z);
                        }
                    }
                    // overflow control
                    t = h(hm, i, n).abs();
                    if (EPS * t) * t > 1.0 {
                        for j in i..=n {
                            hset!(hm, j, n, h(hm, j, n) / t);
                        }
                    }
                }
            }
        } else if q < 0.0 {
            // complex vector (stored in columns n-1, n)
            let mut l = n - 1;

            if h(hm, n, n - 1).abs() > h(hm, n - 1, n).abs() {
                hset!(hm, n - 1, n - 1, q / h(hm, n, n - 1));
                hset!(hm, n - 1, n, -(h(hm, n, n) - p) / h(hm, n, n - 1));
            } else {
                let (cr, ci) = cdiv(0.0, -h(hm, n - 1, n), h(hm, n - 1, n - 1) - p, q);
                hset!(hm, n - 1, n - 1, cr);
                hset!(hm, n - 1, n, ci);
            }
            hset!(hm, n, n - 1, 0.0);
            hset!(hm, n, n, 1.0);
            for i in (0..=(n - 2)).rev() {
                let mut ra = 0.0;
                let mut sa = 0.0;
                let mut vr;
                let vi;
                for j in l..=n {
                    ra += h(hm, i, j) * h(hm, j, n - 1);
                    sa += h(hm, i, j) * h(hm, j, n);
                }
                w = h(hm, i, i) - p;

                if e[i as usize] < 0.0 {
                    z = w;
                    r = ra;
                    s = sa;
                } else {
                    l = i;
                    if e[i as usize] == 0.0 {
                        let (cr, ci) = cdiv(-ra, -sa, w, q);
                        hset!(hm, i, n - 1, cr);
                        hset!(hm, i, n, ci);
                    } else {
                        x = h(hm, i, i + 1);
                        y = h(hm, i + 1, i);
                        vr = (d[i as usize] - p) * (d[i as usize] - p)
                            + e[i as usize] * e[i as usize]
                            - q * q;
                        vi = (d[i as usize] - p) * 2.0 * q;
                        if vr == 0.0 && vi == 0.0 {
                            vr = EPS
                                * norm
                                * (w.abs() + q.abs() + x.abs() + y.abs() + z.abs());
                        }
                        let (cr, ci) =
                            cdiv(x * r - z * ra + q * sa, x * s - z * sa - q * ra, vr, vi);
                        hset!(hm, i, n - 1, cr);
                        hset!(hm, i, n, ci);
                        if x.abs() > z.abs() + q.abs() {
                            hset!(
                                hm,
                                i + 1,
                                n - 1,
                                (-ra - w * h(hm, i, n - 1) + q * h(hm, i, n)) / x
                            );
                            hset!(
                                hm,
                                i + 1,
                                n,
                                (-sa - w * h(hm, i, n) - q * h(hm, i, n - 1)) / x
                            );
                        } else {
                            let (cr, ci) = cdiv(
                                -r - y * h(hm, i, n - 1),
                                -s - y * h(hm, i, n),
                                z,
                                q,
                            );
                            hset!(hm, i + 1, n - 1, cr);
                            hset!(hm, i + 1, n, ci);
                        }
                    }
                    // overflow control
                    t = h(hm, i, n - 1).abs().max(h(hm, i, n).abs());
                    if (EPS * t) * t > 1.0 {
                        for j in i..=n {
                            hset!(hm, j, n - 1, h(hm, j, n - 1) / t);
                            hset!(hm, j, n, h(hm, j, n) / t);
                        }
                    }
                }
            }
        }
    }

    // back-transformation to eigenvectors of the original matrix
    for j in (low..nn).rev() {
        for i in low..=high {
            z = 0.0;
            for k in low..=j.min(high) {
                z += h(vm, i, k) * h(hm, k, j);
            }
            hset!(vm, i, j, z);
        }
    }

    Ok(())
}

/// Spectral condition number `sigma_max / sigma_min` of a complex matrix,
/// via the Hermitian Gram matrix embedded as a real symmetric matrix of
/// twice the order.
pub fn complex_condition(p: &CMatrix) -> Result<f64, LinalgError> {
    if p.rows() != p.cols() {
        return Err(LinalgError::DimensionMismatch("condition number needs a square matrix".into()));
    }
    let g = p.gram();
    let c = g.rows();
    let mut embed = Matrix::zeros(2 * c, 2 * c);
    for i in 0..c {
        for j in 0..c {
            let z = g.get(i, j);
            embed.set(i, j, z.re);
            embed.set(i + c, j + c, z.re);
            embed.set(i, j + c, -z.im);
            embed.set(i + c, j, z.im);
        }
    }
    let eigs = sym_eigenvalues(&embed)?;
    let lmax = eigs.last().copied().unwrap_or(0.0).max(0.0);
    let lmin = eigs.first().copied().unwrap_or(0.0);
    if lmin <= 0.0 || lmin < lmax * 1e-30 {
        return Err(LinalgError::Singular("eigenvector matrix is numerically singular".into()));
    }
    Ok((lmax / lmin).sqrt().max(1.0))
}

/// LU factorization with partial pivoting for small square systems.
pub(crate) struct Lu {
    n: usize,
    lu: Vec<f64>,
    piv: Vec<usize>,
    sign: f64,
}

impl Lu {
    pub fn factor(a: &Matrix) -> Result<Lu, LinalgError> {
        if !a.is_square() {
            return Err(LinalgError::DimensionMismatch("LU needs a square matrix".into()));
        }
        let n = a.rows();
        let mut lu = a.data().to_vec();
        let mut piv: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let scale = a.max_abs().max(f64::MIN_POSITIVE);

        for k in 0..n {
            let mut p = k;
            for i in (k + 1)..n {
                if lu[i * n + k].abs() > lu[p * n + k].abs() {
                    p = i;
                }
            }
            if p != k {
                for j in 0..n {
                    lu.swap(p * n + j, k * n + j);
                }
                piv.swap(p, k);
                sign = -sign;
            }
            let pivot = lu[k * n + k];
            if pivot.abs() < 1e-15 * scale {
                return Err(LinalgError::Singular(format!("pivot {pivot:.3e} at step {k}")));
            }
            for i in (k + 1)..n {
                lu[i * n + k] /= pivot;
                let m = lu[i * n + k];
                for j in (k + 1)..n {
                    lu[i * n + j] -= m * lu[k * n + j];
                }
            }
        }
        Ok(Lu { n, lu, piv, sign })
    }

    pub fn det(&self) -> f64 {
        let mut d = self.sign;
        for k in 0..self.n {
            d *= self.lu[k * self.n + k];
        }
        d
    }

    pub fn solve_vec(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.piv.iter().map(|&p| b[p]).collect();
        for k in 0..n {
            for i in (k + 1)..n {
                x[i] -= self.lu[i * n + k] * x[k];
            }
        }
        for k in (0..n).rev() {
            x[k] /= self.lu[k * n + k];
            for i in 0..k {
                x[i] -= self.lu[i * n + k] * x[k];
            }
        }
        x
    }

    pub fn solve_mat(&self, b: &Matrix) -> Result<Matrix, LinalgError> {
        if b.rows() != self.n {
            return Err(LinalgError::DimensionMismatch("solve dimensions".into()));
        }
        let mut out = Matrix::zeros(self.n, b.cols());
        for j in 0..b.cols() {
            let col: Vec<f64> = (0..self.n).map(|i| b.get(i, j)).collect();
            let x = self.solve_vec(&col);
            for i in 0..self.n {
                out.set(i, j, x[i]);
            }
        }
        Ok(out)
    }
}

/// Determinant via LU; 0 for numerically singular input.
pub fn determinant(a: &Matrix) -> Result<f64, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::DimensionMismatch("determinant needs a square matrix".into()));
    }
    match Lu::factor(a) {
        Ok(lu) => Ok(lu.det()),
        Err(LinalgError::Singular(_)) => Ok(0.0),
        Err(e) => Err(e),
    }
}
