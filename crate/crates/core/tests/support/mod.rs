//! Independent reference implementations used only by tests.
#![allow(dead_code)]

use cran_core::Matrix64;

/// erfc by Maclaurin series of erf for small arguments and a Lentz
/// continued fraction in the tail; shares nothing with the library's erfc.
pub fn erfc_ref(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc_ref(-x);
    }
    if x < 1.0 {
        // erf(x) = 2/√π Σ (−1)^n x^(2n+1) / (n! (2n+1))
        let mut term = x;
        let mut sum = x;
        for n in 1..200 {
            term *= -x * x / n as f64;
            let add = term / (2 * n + 1) as f64;
            sum += add;
            if add.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        return 1.0 - 2.0 / std::f64::consts::PI.sqrt() * sum;
    }
    // erfc(x) = e^{−x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + …))))
    let tiny = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..20_000 {
        let a = k as f64 / 2.0;
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / std::f64::consts::PI.sqrt() / f
}

pub fn q_ref(x: f64) -> f64 {
    0.5 * erfc_ref(x / std::f64::consts::SQRT_2)
}

/// Plain bisection for `Q(x) = p` on the reference Q.
pub fn q_inv_ref(p: f64) -> f64 {
    let (mut lo, mut hi) = (-40.0, 40.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if q_ref(mid) > p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Blockage probability and decoding weight by enumerating every arrival
/// pattern over the `L_U − 1` waiting minislots.
pub fn blockage_by_patterns(q: f64, l_u: usize, eps_u: f64) -> (f64, f64, f64) {
    let slots = l_u - 1;
    let (mut blockage, mut weight) = (0.0, 0.0);
    for mask in 0u32..(1 << slots) {
        let n = mask.count_ones() as i32;
        let p = q.powi(n) * (1.0 - q).powi(slots as i32 - n);
        blockage += p * n as f64 / (n + 1) as f64;
        weight += p / (n + 1) as f64;
    }
    (blockage, weight, (eps_u - blockage) / weight)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending,
/// with the eigenvector matrix (columns).
pub fn jacobi_eigen(a: &Matrix64) -> (Vec<f64>, Matrix64) {
    let n = a.rows();
    let mut m = a.clone();
    let mut v = Matrix64::identity(n);
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[(p, q)].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * m[(p, q)]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&x, &y| m[(x, x)].total_cmp(&m[(y, y)]));
    let vals = idx.iter().map(|&i| m[(i, i)]).collect();
    let vecs = Matrix64::from_fn(n, n, |r, c| v[(r, idx[c])]);
    (vals, vecs)
}

/// `log₂ Π (1 + P·μᵢ)` over the generalized eigenvalues of `(HHᵀ, R)`,
/// through `R^{-1/2}` from an eigendecomposition of `R`.
pub fn kernel_by_eigenvalues(h: &Matrix64, r: &Matrix64, p: f64) -> f64 {
    let (rv, q) = jacobi_eigen(r);
    let inv_sqrt = Matrix64::from_diag(&rv.iter().map(|x| 1.0 / x.sqrt()).collect::<Vec<_>>());
    let w = &(&q * &inv_sqrt) * &q.transpose();
    let hh = h * &h.transpose();
    let s = &(&w * &hh) * &w;
    let (mu, _) = jacobi_eigen(&s.symmetrize().unwrap());
    mu.iter().map(|m| (1.0 + p * m.max(0.0)).log2()).sum()
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        got.abs()
    } else {
        ((got - want) / want).abs()
    }
}
