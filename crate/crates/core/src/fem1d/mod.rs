//! Continuous piecewise-linear finite elements on the uniform mesh of
//! `(0, 1)` with natural (Neumann) boundary conditions.
//!
//! All vectors live in the full nodal space of dimension `M + 1`; the
//! mean-zero subspace is handled by [`project_mean_zero`] rather than by
//! eliminating a basis function, which keeps every operator tridiagonal.

mod quadrature;

use std::f64::consts::{PI, SQRT_2};

pub use self::quadrature::GaussRule;
pub use crate::linalg::SymTridiagonal;
use crate::error::{Error, Result};
use crate::linalg::dot;

/// Uniform partition of `[0, 1]` into `M` elements of width `h = 1/M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformMesh1D {
    num_elements: usize,
    h: f64,
}

impl UniformMesh1D {
    pub fn new(num_elements: usize) -> Result<Self> {
        if num_elements == 0 {
            return Err(Error::InvalidArgument("mesh needs at least one element".into()));
        }
        Ok(Self {
            num_elements,
            h: 1.0 / num_elements as f64,
        })
    }

    pub fn num_elements(&self) -> usize {
        self.num_elements
    }

    pub fn num_nodes(&self) -> usize {
        self.num_elements + 1
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Node `x_i = i h`. Computed as `i / M` so that the last node is exactly 1.
    pub fn node(&self, i: usize) -> f64 {
        i as f64 / self.num_elements as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.num_nodes()).map(move |i| self.node(i))
    }

    fn require_assemblable(&self) -> Result<()> {
        if self.num_elements < 2 {
            return Err(Error::InvalidArgument(format!(
                "assembly needs M >= 2, got M = {}",
                self.num_elements
            )));
        }
        Ok(())
    }
}

/// A P1 finite-element function, stored by its nodal values.
#[derive(Debug, Clone, PartialEq)]
pub struct FeFunction {
    mesh: UniformMesh1D,
    coeffs: Vec<f64>,
}

impl FeFunction {
    pub fn new(mesh: UniformMesh1D, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != mesh.num_nodes() {
            return Err(Error::DimensionMismatch {
                expected: mesh.num_nodes(),
                found: coeffs.len(),
            });
        }
        Ok(Self { mesh, coeffs })
    }

    pub fn zeros(mesh: UniformMesh1D) -> Self {
        Self {
            mesh,
            coeffs: vec![0.0; mesh.num_nodes()],
        }
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate<F: Fn(f64) -> f64>(mesh: UniformMesh1D, f: F) -> Self {
        Self {
            mesh,
            coeffs: mesh.nodes().map(f).collect(),
        }
    }

    pub fn mesh(&self) -> &UniformMesh1D {
        &self.mesh
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Point evaluation by linear interpolation between nodes.
    pub fn eval(&self, x: f64) -> f64 {
        let m = self.mesh.num_elements();
        let s = (x.clamp(0.0, 1.0) * m as f64).min(m as f64);
        let e = (s.floor() as usize).min(m - 1);
        let t = s - e as f64;
        (1.0 - t) * self.coeffs[e] + t * self.coeffs[e + 1]
    }
}

/// Gram matrix of the hat functions.
pub fn assemble_mass(mesh: &UniformMesh1D) -> Result<SymTridiagonal> {
    mesh.require_assemblable()?;
    let h = mesh.h();
    let n = mesh.num_nodes();
    let mut diag = vec![2.0 * h / 3.0; n];
    diag[0] = h / 3.0;
    diag[n - 1] = h / 3.0;
    SymTridiagonal::new(diag, vec![h / 6.0; n - 1])
}

/// Neumann stiffness matrix `(∇χ_i, ∇χ_j)`.
pub fn assemble_stiffness(mesh: &UniformMesh1D) -> Result<SymTridiagonal> {
    mesh.require_assemblable()?;
    let inv_h = mesh.num_elements() as f64;
    let n = mesh.num_nodes();
    let mut diag = vec![2.0 * inv_h; n];
    diag[0] = inv_h;
    diag[n - 1] = inv_h;
    SymTridiagonal::new(diag, vec![-inv_h; n - 1])
}

/// Load vector `(e_j, χ_i)` for `e_j(x) = √2 cos(jπx)`, from closed-form
/// antiderivatives. Uses `1 - cos(kh) = 2 sin²(kh/2)` to avoid cancellation.
pub fn cosine_load(mesh: &UniformMesh1D, j: usize) -> Result<Vec<f64>> {
    if j == 0 {
        return Err(Error::InvalidArgument("cosine mode index must be >= 1".into()));
    }
    let h = mesh.h();
    let k = j as f64 * PI;
    let s = (0.5 * k * h).sin();
    // (1 - cos kh) / (k² h)
    let base = 2.0 * s * s / (k * k * h);
    let n = mesh.num_nodes();
    let mut b = vec![0.0; n];
    for (i, bi) in b.iter_mut().enumerate() {
        let c = cos_mode(j, i, mesh.num_elements());
        let factor = if i == 0 || i == n - 1 { 1.0 } else { 2.0 };
        *bi = SQRT_2 * factor * c * base;
    }
    Ok(b)
}

/// `cos(jπ i / M)` with the argument reduced exactly in integer arithmetic.
pub(crate) fn cos_mode(j: usize, i: usize, m: usize) -> f64 {
    let period = 2 * m;
    let r = (j as u128 * i as u128 % period as u128) as f64;
    (PI * r / m as f64).cos()
}

/// `L²` projection `P_h e_j` of the `j`-th Neumann eigenfunction.
pub fn l2_project_cosine(mesh: &UniformMesh1D, j: usize) -> Result<FeFunction> {
    let mass = assemble_mass(mesh)?;
    let b = cosine_load(mesh, j)?;
    FeFunction::new(*mesh, mass.solve(&b)?)
}

/// Double-well derivative `φ(u) = u³ - u`.
#[inline]
pub fn phi(u: f64) -> f64 {
    u * u * u - u
}

#[inline]
pub fn phi_prime(u: f64) -> f64 {
    3.0 * u * u - 1.0
}

/// `F(u)_i = ∫ φ(u_h) χ_i dx` by 3-point Gauss per element.
pub fn nonlinear_load(u: &FeFunction) -> Vec<f64> {
    nonlinear_load_nodal(u.mesh(), u.coeffs())
}

pub(crate) fn nonlinear_load_nodal(mesh: &UniformMesh1D, u: &[f64]) -> Vec<f64> {
    let rule = GaussRule::legendre(3).expect("3-point rule");
    let h = mesh.h();
    let mut f = vec![0.0; u.len()];
    for e in 0..mesh.num_elements() {
        let (ua, ub) = (u[e], u[e + 1]);
        let (mut fa, mut fb) = (0.0, 0.0);
        for (s, w) in rule.unit_interval() {
            let val = phi((1.0 - s) * ua + s * ub) * w;
            fa += val * (1.0 - s);
            fb += val * s;
        }
        f[e] += h * fa;
        f[e + 1] += h * fb;
    }
    f
}

/// `J(u)_ij = ∫ φ'(u_h) χ_i χ_j dx` with the same quadrature as
/// [`nonlinear_load`], so it is the exact derivative of the discrete load.
pub fn nonlinear_jacobian(u: &FeFunction) -> SymTridiagonal {
    nonlinear_jacobian_nodal(u.mesh(), u.coeffs())
}

pub(crate) fn nonlinear_jacobian_nodal(mesh: &UniformMesh1D, u: &[f64]) -> SymTridiagonal {
    let rule = GaussRule::legendre(3).expect("3-point rule");
    let h = mesh.h();
    let mut jac = SymTridiagonal::zeros(u.len());
    for e in 0..mesh.num_elements() {
        let (ua, ub) = (u[e], u[e + 1]);
        let (mut aa, mut ab, mut bb) = (0.0, 0.0, 0.0);
        for (s, w) in rule.unit_interval() {
            let d = phi_prime((1.0 - s) * ua + s * ub) * w;
            aa += d * (1.0 - s) * (1.0 - s);
            ab += d * (1.0 - s) * s;
            bb += d * s * s;
        }
        jac.diag_mut()[e] += h * aa;
        jac.diag_mut()[e + 1] += h * bb;
        jac.offdiag_mut()[e] += h * ab;
    }
    jac
}

/// `∫ χ_i dx`, i.e. the row sums of the mass matrix.
pub fn node_weights(mesh: &UniformMesh1D) -> Vec<f64> {
    let h = mesh.h();
    let n = mesh.num_nodes();
    let mut w = vec![h; n];
    w[0] = 0.5 * h;
    w[n - 1] = 0.5 * h;
    w
}

/// `(v, 1) = ∫ v dx`, exact for P1 functions.
pub fn integral(v: &FeFunction) -> f64 {
    dot(&node_weights(v.mesh()), v.coeffs())
}

/// `P v = v - |D|^{-1} (v, 1)`; `|D| = 1`.
pub fn project_mean_zero(v: &FeFunction) -> FeFunction {
    let mean = integral(v);
    FeFunction {
        mesh: *v.mesh(),
        coeffs: v.coeffs().iter().map(|c| c - mean).collect(),
    }
}

/// `√(vᵀ M v)`.
pub fn l2_norm(v: &FeFunction) -> f64 {
    let mass = assemble_mass(v.mesh()).expect("mesh too coarse for a norm");
    mass.quad_form(v.coeffs()).max(0.0).sqrt()
}

/// `√(vᵀ S v) = ‖∇v‖`.
pub fn h1_seminorm(v: &FeFunction) -> f64 {
    let stiff = assemble_stiffness(v.mesh()).expect("mesh too coarse for a norm");
    stiff.quad_form(v.coeffs()).max(0.0).sqrt()
}

/// Assembled operators for one mesh, shared read-only by the solver and
/// the noise projection.
#[derive(Debug, Clone)]
pub struct FeSpace {
    mesh: UniformMesh1D,
    mass: SymTridiagonal,
    stiffness: SymTridiagonal,
    weights: Vec<f64>,
}

impl FeSpace {
    pub fn new(mesh: UniformMesh1D) -> Result<Self> {
        Ok(Self {
            mass: assemble_mass(&mesh)?,
            stiffness: assemble_stiffness(&mesh)?,
            weights: node_weights(&mesh),
            mesh,
        })
    }

    pub fn mesh(&self) -> &UniformMesh1D {
        &self.mesh
    }

    pub fn dim(&self) -> usize {
        self.mesh.num_nodes()
    }

    pub fn mass(&self) -> &SymTridiagonal {
        &self.mass
    }

    pub fn stiffness(&self) -> &SymTridiagonal {
        &self.stiffness
    }

    /// `M 1`.
    pub fn node_weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integral(&self, v: &[f64]) -> f64 {
        dot(&self.weights, v)
    }

    pub fn l2_norm(&self, v: &[f64]) -> f64 {
        self.mass.quad_form(v).max(0.0).sqrt()
    }

    pub fn l2_project_cosine(&self, j: usize) -> Result<Vec<f64>> {
        self.mass.solve(&cosine_load(&self.mesh, j)?)
    }

    /// `‖A_h v‖` for mean-zero `v`: `A_h v = M⁻¹ S v`.
    pub fn discrete_laplacian_norm(&self, v: &[f64]) -> Result<f64> {
        let sv = self.stiffness.matvec(v);
        let w = self.mass.solve(&sv)?;
        Ok(dot(&sv, &w).max(0.0).sqrt())
    }

    /// Eigenvalue of `M⁻¹ S` belonging to the discrete cosine
    /// `v_i = cos(kπ x_i)`. On a uniform mesh these nodal cosines are exact
    /// eigenvectors of the Neumann pencil `(S, M)`.
    pub fn discrete_eigenvalue(&self, k: usize) -> f64 {
        let h = self.mesh.h();
        let theta = k as f64 * PI * h;
        let s = (0.5 * theta).sin();
        // (6/h²)(1 - cos θ)/(2 + cos θ)
        6.0 / (h * h) * 2.0 * s * s / (2.0 + theta.cos())
    }

    pub fn discrete_eigenvector(&self, k: usize) -> Vec<f64> {
        let m = self.mesh.num_elements();
        (0..self.dim()).map(|i| cos_mode(k, i, m)).collect()
    }
}
