//! Independent reference implementations used by the integration tests.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

/// Classical backward-Euler mixed step for the stochastic Cahn-Hilliard
/// equation, with dense matrices and element integrals of the cubic evaluated in
/// closed form (Beta integrals), so nothing is shared with the library's
/// assembly or quadrature.
pub struct ClassicalEuler {
    m: usize,
    h: f64,
    tau: f64,
    eps2: f64,
    mass: DMatrix<f64>,
    stiff: DMatrix<f64>,
    mass_inv: DMatrix<f64>,
}

fn fact(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `∫_0^1 (1-s)^p s^q ds`.
fn beta(p: usize, q: usize) -> f64 {
    fact(p) * fact(q) / fact(p + q + 1)
}

fn binom(n: usize, k: usize) -> f64 {
    fact(n) / (fact(k) * fact(n - k))
}

impl ClassicalEuler {
    pub fn new(elements: usize, tau: f64, epsilon: f64) -> Self {
        let n = elements + 1;
        let h = 1.0 / elements as f64;
        let mut mass = DMatrix::zeros(n, n);
        let mut stiff = DMatrix::zeros(n, n);
        for e in 0..elements {
            let (i, j) = (e, e + 1);
            mass[(i, i)] += h / 3.0;
            mass[(j, j)] += h / 3.0;
            mass[(i, j)] += h / 6.0;
            mass[(j, i)] += h / 6.0;
            stiff[(i, i)] += 1.0 / h;
            stiff[(j, j)] += 1.0 / h;
            stiff[(i, j)] -= 1.0 / h;
            stiff[(j, i)] -= 1.0 / h;
        }
        let mass_inv = mass.clone().try_inverse().expect("mass matrix invertible");
        Self {
            m: elements,
            h,
            tau,
            eps2: epsilon * epsilon,
            mass,
            stiff,
            mass_inv,
        }
    }

    /// `F(u)_i = ∫ (u_h³ - u_h) χ_i`.
    fn load(&self, u: &DVector<f64>) -> DVector<f64> {
        let mut f = DVector::zeros(self.m + 1);
        for e in 0..self.m {
            let (a, b) = (u[e], u[e + 1]);
            // p(s) = a(1-s) + b s; p³ = Σ C(3,k) a^{3-k} b^k (1-s)^{3-k} s^k
            let mut fa = 0.0;
            let mut fb = 0.0;
            for k in 0..=3 {
                let c = binom(3, k) * a.powi(3 - k as i32) * b.powi(k as i32);
                fa += c * beta(4 - k, k);
                fb += c * beta(3 - k, k + 1);
            }
            f[e] += self.h * (fa - (2.0 * a + b) / 6.0);
            f[e + 1] += self.h * (fb - (a + 2.0 * b) / 6.0);
        }
        f
    }

    /// `J(u)_ij = ∫ (3u_h² - 1) χ_i χ_j`.
    fn load_jacobian(&self, u: &DVector<f64>) -> DMatrix<f64> {
        let n = self.m + 1;
        let mut jac = DMatrix::zeros(n, n);
        for e in 0..self.m {
            let (a, b) = (u[e], u[e + 1]);
            // ∫ p² (1-s)^{2-r} s^r for r = 0, 1, 2
            let mut q = [0.0; 3];
            for (r, qr) in q.iter_mut().enumerate() {
                for k in 0..=2 {
                    let c = binom(2, k) * a.powi(2 - k as i32) * b.powi(k as i32);
                    *qr += c * beta(4 - k - r, k + r);
                }
            }
            let (i, j) = (e, e + 1);
            jac[(i, i)] += self.h * (3.0 * q[0] - 1.0 / 3.0);
            jac[(i, j)] += self.h * (3.0 * q[1] - 1.0 / 6.0);
            jac[(j, i)] += self.h * (3.0 * q[1] - 1.0 / 6.0);
            jac[(j, j)] += self.h * (3.0 * q[2] - 1.0 / 3.0);
        }
        jac
    }

    /// One step from `prev` with scaled increment `g`, solved by Newton to
    /// machine precision on the dense mixed system
    ///
    /// ```text
    /// M Uⁿ/τ + S Wⁿ = M (Uⁿ⁻¹/τ + gⁿ)
    /// M Wⁿ - ε² S Uⁿ - F(Uⁿ) = 0
    /// ```
    ///
    /// `W` is the nodal chemical potential; its mean is free, so no
    /// multiplier is needed (`S 1 = 0`).
    pub fn step(&self, prev: &[f64], g: &[f64]) -> Vec<f64> {
        let n = self.m + 1;
        let prev = DVector::from_column_slice(prev);
        let g = DVector::from_column_slice(g);
        let rhs = &self.mass * (&prev / self.tau + &g);
        let mut u = prev.clone();
        let mut w = &self.mass_inv * (&self.stiff * &u * self.eps2 + self.load(&u));
        for _ in 0..50 {
            let r1 = &self.mass * &u / self.tau + &self.stiff * &w - &rhs;
            let r2 = &self.mass * &w - &self.stiff * &u * self.eps2 - self.load(&u);
            let mut jac = DMatrix::zeros(2 * n, 2 * n);
            jac.view_mut((0, 0), (n, n)).copy_from(&(&self.mass / self.tau));
            jac.view_mut((0, n), (n, n)).copy_from(&self.stiff);
            jac.view_mut((n, 0), (n, n))
                .copy_from(&(-(&self.stiff * self.eps2) - self.load_jacobian(&u)));
            jac.view_mut((n, n), (n, n)).copy_from(&self.mass);
            let mut r = DVector::zeros(2 * n);
            r.rows_mut(0, n).copy_from(&r1);
            r.rows_mut(n, n).copy_from(&r2);
            let d = jac.lu().solve(&(-r)).expect("nonsingular Jacobian");
            u += d.rows(0, n);
            w += d.rows(n, n);
            if d.rows(0, n).amax() <= 1e-16 * u.amax().max(1e-300) {
                break;
            }
        }
        u.as_slice().to_vec()
    }
}
