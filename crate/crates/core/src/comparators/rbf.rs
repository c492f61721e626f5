//! Kansa collocation with Gaussian radial functions `φ(r) = exp(-ε²r²)`.
//!
//! For uniform centers `x_j = lo + j·h` the Gaussians factor as
//! `φ_j(x) = exp(-ε²x_j²) · exp(-ε²x² + 2ε²·lo·x) · z(x)^j` with
//! `z = exp(2ε²h·x)`, so their span is `w(x)·P_{N-1}(z)`. The stable basis
//! spans the same space using Chebyshev polynomials in an affine image of `z`,
//! which avoids the near-linear dependence of the raw Gaussians for small ε.
//! The direct basis uses the Gaussians themselves.

use nalgebra::{DMatrix, DVector};

use super::{
    check_finite, l1_history, l1_prefactor, l1_weights, series_boundary, ComparatorError,
    Linearization,
};
use crate::expr::Expr;
use crate::solvers::FpdeProblem;

/// Collocation matrices with a larger 1-norm condition number are rejected.
pub const ILL_CONDITIONED_LIMIT: f64 = 1e14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RbfBasis {
    /// Translates of the Gaussian.
    Direct,
    /// Same function space, Chebyshev-in-`z` parametrization.
    #[default]
    Stable,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RbfConfig {
    pub n: usize,
    pub eps: f64,
    pub nt: usize,
    pub t_final: f64,
    pub basis: RbfBasis,
}

impl RbfConfig {
    pub fn new(n: usize, eps: f64, nt: usize, t_final: f64) -> Self {
        RbfConfig {
            n,
            eps,
            nt,
            t_final,
            basis: RbfBasis::default(),
        }
    }
}

#[derive(Debug, Clone)]
struct Basis {
    kind: RbfBasis,
    centers: Vec<f64>,
    eps: f64,
    lo: f64,
    hi: f64,
}

impl Basis {
    fn uniform(kind: RbfBasis, lo: f64, hi: f64, n: usize, eps: f64) -> Self {
        let h = (hi - lo) / (n - 1) as f64;
        Basis {
            kind,
            centers: (0..n).map(|j| lo + j as f64 * h).collect(),
            eps,
            lo,
            hi,
        }
    }

    /// `[ψ_j(x), ψ_j'(x), ψ_j''(x)]` for every basis function.
    fn eval(&self, x: f64) -> [Vec<f64>; 3] {
        match self.kind {
            RbfBasis::Direct => self.eval_direct(x),
            RbfBasis::Stable => self.eval_stable(x),
        }
    }

    fn eval_direct(&self, x: f64) -> [Vec<f64>; 3] {
        let e2 = self.eps * self.eps;
        let n = self.centers.len();
        let (mut v, mut d1, mut d2) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        for (j, &c) in self.centers.iter().enumerate() {
            let r = x - c;
            let phi = (-e2 * r * r).exp();
            v[j] = phi;
            d1[j] = -2.0 * e2 * r * phi;
            d2[j] = (4.0 * e2 * e2 * r * r - 2.0 * e2) * phi;
        }
        [v, d1, d2]
    }

    fn eval_stable(&self, x: f64) -> [Vec<f64>; 3] {
        let n = self.centers.len();
        let e2 = self.eps * self.eps;
        let h = (self.hi - self.lo) / (n - 1) as f64;
        let k = 2.0 * e2 * h;
        // weight w = exp(-ε²x² + 2ε²·lo·x), scaled by a constant to keep it near 1
        let w = (-e2 * (x - self.lo) * (x - self.lo)).exp();
        let p = -2.0 * e2 * (x - self.lo);
        let dp = -2.0 * e2;
        // s maps z(x) affinely onto [-1, 1]
        let span = (k * (self.hi - self.lo)).exp_m1();
        let s = 2.0 * (k * (x - self.lo)).exp_m1() / span - 1.0;
        let ds = 2.0 * k * (k * (x - self.lo)).exp() / span;
        let dds = k * ds;
        let (mut t, mut dt, mut ddt) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        t[0] = 1.0;
        if n > 1 {
            t[1] = s;
            dt[1] = 1.0;
        }
        for j in 1..n.saturating_sub(1) {
            t[j + 1] = 2.0 * s * t[j] - t[j - 1];
            dt[j + 1] = 2.0 * t[j] + 2.0 * s * dt[j] - dt[j - 1];
            ddt[j + 1] = 4.0 * dt[j] + 2.0 * s * ddt[j] - ddt[j - 1];
        }
        let (mut v, mut d1, mut d2) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        for j in 0..n {
            v[j] = w * t[j];
            d1[j] = w * (p * t[j] + dt[j] * ds);
            d2[j] =
                w * ((p * p + dp) * t[j] + 2.0 * p * dt[j] * ds + ddt[j] * ds * ds + dt[j] * dds);
        }
        [v, d1, d2]
    }

    /// Rows `ψ(x_i)`, `ψ'(x_i)`, `ψ''(x_i)` at the centers.
    fn collocation(&self) -> [DMatrix<f64>; 3] {
        let n = self.centers.len();
        let mut out = [
            DMatrix::zeros(n, n),
            DMatrix::zeros(n, n),
            DMatrix::zeros(n, n),
        ];
        for (i, &x) in self.centers.iter().enumerate() {
            let rows = self.eval(x);
            for (m, row) in out.iter_mut().zip(rows.iter()) {
                for (j, &v) in row.iter().enumerate() {
                    m[(i, j)] = v;
                }
            }
        }
        out
    }
}

fn one_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Solves `a λ = b` after checking the 1-norm condition number.
fn guarded_solve(
    a: DMatrix<f64>,
    b: &DVector<f64>,
    eps: f64,
) -> Result<DVector<f64>, ComparatorError> {
    let norm = one_norm(&a);
    let lu = a.lu();
    let ill = |condition: f64| ComparatorError::IllConditioned {
        condition,
        limit: ILL_CONDITIONED_LIMIT,
        eps,
        suggestion: "increase ε or use fewer centers".to_string(),
    };
    let inv = lu.try_inverse().ok_or_else(|| ill(f64::INFINITY))?;
    let condition = norm * one_norm(&inv);
    if !(condition <= ILL_CONDITIONED_LIMIT) {
        return Err(ill(condition));
    }
    lu.solve(b).ok_or_else(|| ill(f64::INFINITY))
}

/// Expansion coefficients at each time level.
#[derive(Debug, Clone)]
pub struct RbfSolution {
    pub centers: Vec<f64>,
    pub eps: f64,
    pub basis: RbfBasis,
    pub alpha: f64,
    pub times: Vec<f64>,
    pub lambdas: Vec<Vec<f64>>,
    domain: (f64, f64),
}

impl RbfSolution {
    fn basis(&self) -> Basis {
        Basis::uniform(
            self.basis,
            self.domain.0,
            self.domain.1,
            self.centers.len(),
            self.eps,
        )
    }

    fn level_value(&self, psi: &[f64], level: usize) -> f64 {
        psi.iter()
            .zip(&self.lambdas[level])
            .map(|(p, l)| p * l)
            .sum()
    }

    /// Expansion value at `x`, linear in time between stored levels.
    pub fn evaluate(&self, x: f64, t: f64) -> Result<f64, ComparatorError> {
        let (lo, hi) = self.domain;
        let tol = 1e-12 * (hi - lo);
        if !(x >= lo - tol && x <= hi + tol) {
            return Err(ComparatorError::OutOfRange { x, t });
        }
        let psi = &self.basis().eval(x)[0];
        if self.times.len() == 1 {
            return if t == self.times[0] {
                Ok(self.level_value(psi, 0))
            } else {
                Err(ComparatorError::OutOfRange { x, t })
            };
        }
        let (j, f) =
            super::fdm::locate(&self.times, t).ok_or(ComparatorError::OutOfRange { x, t })?;
        let a = self.level_value(psi, j);
        if f == 0.0 {
            return Ok(a);
        }
        Ok(a * (1.0 - f) + self.level_value(psi, j + 1) * f)
    }
}

fn check_config(cfg: &RbfConfig) -> Result<(), ComparatorError> {
    if cfg.n < 5 {
        return Err(ComparatorError::Config(format!(
            "need at least 5 centers, got {}",
            cfg.n
        )));
    }
    if !(cfg.eps > 0.0) {
        return Err(ComparatorError::Config(format!(
            "shape parameter {} must be positive",
            cfg.eps
        )));
    }
    Ok(())
}

/// Interpolates `f` at `n` uniform centers on `domain`.
pub fn rbf_interpolate(
    f: &Expr,
    domain: (f64, f64),
    n: usize,
    eps: f64,
    basis: RbfBasis,
) -> Result<RbfSolution, ComparatorError> {
    check_config(&RbfConfig {
        n,
        eps,
        nt: 0,
        t_final: 0.0,
        basis,
    })?;
    let b = Basis::uniform(basis, domain.0, domain.1, n, eps);
    let [psi, _, _] = b.collocation();
    let values = b
        .centers
        .iter()
        .map(|&x| f.evaluate(x))
        .collect::<Result<Vec<_>, _>>()?;
    let lambda = guarded_solve(psi, &DVector::from_vec(values), eps)?;
    Ok(RbfSolution {
        centers: b.centers,
        eps,
        basis,
        alpha: 1.0,
        times: vec![0.0],
        lambdas: vec![lambda.as_slice().to_vec()],
        domain,
    })
}

/// Kansa collocation with `n` uniform centers, L1 stepping in time and
/// Dirichlet data from the HPSTM partial sum.
pub fn rbf_collocation_solve(
    problem: &FpdeProblem,
    n: usize,
    eps: f64,
    nt: usize,
    t_final: f64,
) -> Result<RbfSolution, ComparatorError> {
    let boundary = series_boundary(problem)?;
    rbf_collocation_solve_with_boundary(problem, &RbfConfig::new(n, eps, nt, t_final), &boundary)
}

pub fn rbf_collocation_solve_with_boundary(
    problem: &FpdeProblem,
    cfg: &RbfConfig,
    boundary: &dyn Fn(f64, f64) -> Result<f64, ComparatorError>,
) -> Result<RbfSolution, ComparatorError> {
    problem.validate()?;
    check_config(cfg)?;
    if cfg.nt < 1 || !(cfg.t_final > 0.0) {
        return Err(ComparatorError::Config(
            "need at least one step and a positive final time".into(),
        ));
    }
    let mut sol = rbf_interpolate(&problem.ic, problem.domain, cfg.n, cfg.eps, cfg.basis)?;
    sol.alpha = problem.alpha;
    let basis = sol.basis();
    let [psi, psi1, psi2] = basis.collocation();
    let x = &basis.centers;
    let n = cfg.n;
    let dt = cfg.t_final / cfg.nt as f64;
    let sign = problem.form.sign();
    let weights = l1_weights(problem.alpha, cfg.nt + 1);
    let c = l1_prefactor(problem.alpha, dt);
    let lin = Linearization::new(problem, x)?;

    let mut lambda = DVector::from_vec(sol.lambdas[0].clone());
    // history[i] holds u(x_i, t_0..t_k)
    let u0 = &psi * &lambda;
    let mut history: Vec<Vec<f64>> = u0.iter().map(|&v| vec![v]).collect();
    for step in 1..=cfg.nt {
        let tn = step as f64 * dt;
        let lagged = [&psi * &lambda, &psi1 * &lambda, &psi2 * &lambda];
        let mut a = DMatrix::zeros(n, n);
        let mut rhs = DVector::zeros(n);
        for i in 1..n - 1 {
            let coef = lin.implicit(i, [lagged[0][i], lagged[1][i], lagged[2][i]]);
            for j in 0..n {
                a[(i, j)] = c * psi[(i, j)]
                    - sign
                        * (coef[0] * psi[(i, j)] + coef[1] * psi1[(i, j)] + coef[2] * psi2[(i, j)]);
            }
            rhs[i] = c * lagged[0][i] - c * l1_history(&weights, &history[i])
                + problem.source_value(x[i], tn)?;
        }
        for i in [0, n - 1] {
            for j in 0..n {
                a[(i, j)] = psi[(i, j)];
            }
            rhs[i] = boundary(x[i], tn)?;
        }
        lambda = guarded_solve(a, &rhs, cfg.eps)?;
        let u = &psi * &lambda;
        check_finite(u.as_slice(), tn)?;
        for (h, &v) in history.iter_mut().zip(u.iter()) {
            h.push(v);
        }
        sol.times.push(tn);
        sol.lambdas.push(lambda.as_slice().to_vec());
    }
    Ok(sol)
}
