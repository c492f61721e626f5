use std::io::Write;

use super::{
    check_finite, l1_history, l1_prefactor, l1_weights, series_boundary, ComparatorError,
    Linearization,
};
use crate::solvers::FpdeProblem;

/// Values on a uniform space-time grid; `values[i][j]` is `u(x_i, t_j)`.
#[derive(Debug, Clone)]
pub struct GridSolution {
    pub x: Vec<f64>,
    pub t: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub alpha: f64,
    pub scheme: String,
}

impl GridSolution {
    /// Bilinear interpolation inside the grid.
    pub fn evaluate(&self, x: f64, t: f64) -> Result<f64, ComparatorError> {
        let (i, fx) = locate(&self.x, x).ok_or(ComparatorError::OutOfRange { x, t })?;
        let (j, ft) = locate(&self.t, t).ok_or(ComparatorError::OutOfRange { x, t })?;
        let v = |a: usize, b: usize| self.values[a][b];
        let lower = v(i, j) * (1.0 - fx) + v(i + 1, j) * fx;
        let upper = v(i, j + 1) * (1.0 - fx) + v(i + 1, j + 1) * fx;
        Ok(lower * (1.0 - ft) + upper * ft)
    }

    /// `x,t,u` rows, time-major.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "t", "u"])?;
        for (j, t) in self.t.iter().enumerate() {
            for (i, x) in self.x.iter().enumerate() {
                w.write_record([x.to_string(), t.to_string(), self.values[i][j].to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Cell index and fractional offset of `v` in a uniform sorted grid.
pub(crate) fn locate(grid: &[f64], v: f64) -> Option<(usize, f64)> {
    let lo = grid[0];
    let hi = *grid.last()?;
    let tol = 1e-12 * (hi - lo).abs().max(1.0);
    if !(v >= lo - tol && v <= hi + tol) {
        return None;
    }
    let n = grid.len() - 1;
    let step = (hi - lo) / n as f64;
    let i = (((v - lo) / step).floor() as usize).min(n - 1);
    let f = ((v - grid[i]) / step).clamp(0.0, 1.0);
    Some((i, f))
}

/// Solves tridiagonal `lower[i] u[i-1] + diag[i] u[i] + upper[i] u[i+1] = rhs[i]`.
fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut beta = diag[0];
    rhs[0] /= beta;
    for i in 1..n {
        c[i - 1] = upper[i - 1] / beta;
        beta = diag[i] - lower[i] * c[i - 1];
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
}

/// L1 finite differences with Dirichlet data from the HPSTM partial sum.
pub fn fdm_l1_solve(
    problem: &FpdeProblem,
    nx: usize,
    nt: usize,
    t_final: f64,
) -> Result<GridSolution, ComparatorError> {
    let boundary = series_boundary(problem)?;
    fdm_l1_solve_with_boundary(problem, nx, nt, t_final, &boundary)
}

/// L1 scheme in time, central differences in space, `nx` intervals and `nt`
/// steps. Each step solves one tridiagonal system for the semi-implicit
/// linearization of `R + N`.
pub fn fdm_l1_solve_with_boundary(
    problem: &FpdeProblem,
    nx: usize,
    nt: usize,
    t_final: f64,
    boundary: &dyn Fn(f64, f64) -> Result<f64, ComparatorError>,
) -> Result<GridSolution, ComparatorError> {
    problem.validate()?;
    if nx < 8 || nt < 8 {
        return Err(ComparatorError::Config(format!(
            "grid {nx}×{nt} is too coarse; need at least 8 in each direction"
        )));
    }
    if !(t_final > 0.0) {
        return Err(ComparatorError::Config(format!(
            "final time {t_final} must be positive"
        )));
    }
    let (lo, hi) = problem.domain;
    let h = (hi - lo) / nx as f64;
    let dt = t_final / nt as f64;
    let x: Vec<f64> = (0..=nx).map(|i| lo + i as f64 * h).collect();
    let t: Vec<f64> = (0..=nt).map(|j| j as f64 * dt).collect();
    let alpha = problem.alpha;
    let sign = problem.form.sign();
    let weights = l1_weights(alpha, nt + 1);
    let c = l1_prefactor(alpha, dt);
    let lin = Linearization::new(problem, &x)?;

    // history[i] holds u(x_i, t_0..t_k)
    let mut history: Vec<Vec<f64>> = x
        .iter()
        .map(|&xi| Ok(vec![problem.ic.evaluate(xi)?]))
        .collect::<Result<_, ComparatorError>>()?;

    let m = nx + 1;
    let (mut lower, mut diag, mut upper, mut rhs) =
        (vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m]);
    for step in 1..=nt {
        let tn = t[step];
        let prev: Vec<f64> = history.iter().map(|h| *h.last().unwrap()).collect();
        for i in 1..nx {
            let lagged = [
                prev[i],
                (prev[i + 1] - prev[i - 1]) / (2.0 * h),
                (prev[i + 1] - 2.0 * prev[i] + prev[i - 1]) / (h * h),
            ];
            let a = lin.implicit(i, lagged);
            lower[i] = -sign * (-a[1] / (2.0 * h) + a[2] / (h * h));
            diag[i] = c - sign * (a[0] - 2.0 * a[2] / (h * h));
            upper[i] = -sign * (a[1] / (2.0 * h) + a[2] / (h * h));
            if diag[i].abs() < lower[i].abs() + upper[i].abs() {
                return Err(ComparatorError::Stability { step, x: x[i] });
            }
            rhs[i] = c * prev[i] - c * l1_history(&weights, &history[i])
                + problem.source_value(x[i], tn)?;
        }
        for i in [0, nx] {
            lower[i] = 0.0;
            upper[i] = 0.0;
            diag[i] = 1.0;
            rhs[i] = boundary(x[i], tn)?;
        }
        thomas(&lower, &diag, &upper, &mut rhs);
        check_finite(&rhs, tn)?;
        for (h, &v) in history.iter_mut().zip(rhs.iter()) {
            h.push(v);
        }
    }
    Ok(GridSolution {
        x,
        t,
        values: history,
        alpha,
        scheme: format!("L1 time, central space, {nx}x{nt}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Expr};
    use crate::solvers::{Form, LinearTerm, Monomial};

    #[test]
    fn tridiagonal_solve() {
        // [2 1 0; 1 2 1; 0 1 2] u = [4, 8, 8] has solution [1, 2, 3]
        let mut rhs = [4.0, 8.0, 8.0];
        thomas(
            &[0.0, 1.0, 1.0],
            &[2.0, 2.0, 2.0],
            &[1.0, 1.0, 0.0],
            &mut rhs,
        );
        for (got, want) in rhs.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn grid_location() {
        let g: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        assert_eq!(locate(&g, 0.0), Some((0, 0.0)));
        let (i, f) = locate(&g, 0.55).unwrap();
        assert_eq!(i, 5);
        assert!((f - 0.5).abs() < 1e-12);
        assert_eq!(locate(&g, 1.0).unwrap().0, 9);
        assert!(locate(&g, 1.1).is_none());
    }

    fn diffusion(alpha: f64) -> FpdeProblem {
        FpdeProblem {
            name: "diffusion".into(),
            alpha,
            ic: parse("exp(x)").unwrap(),
            linear_op: vec![LinearTerm {
                order: 2,
                coeff: Expr::one(),
            }],
            nonlinear_op: vec![],
            source: vec![],
            domain: (0.0, 1.0),
            form: Form::Rhs,
        }
    }

    #[test]
    fn heat_equation_against_exact_solution() {
        // u = exp(x + t) solves u_t = u_xx
        let exact = |x: f64, t: f64| Ok((x + t).exp());
        let g = fdm_l1_solve_with_boundary(&diffusion(1.0), 40, 200, 0.5, &exact).unwrap();
        let got = g.evaluate(0.5, 0.5).unwrap();
        assert!((got - 1f64.exp()).abs() < 5e-3, "{got}");
        assert_eq!(g.values[7][0], g.x[7].exp());
    }

    #[test]
    fn rejects_bad_configuration() {
        let p = diffusion(1.0);
        let exact = |x: f64, t: f64| Ok((x + t).exp());
        assert!(matches!(
            fdm_l1_solve_with_boundary(&p, 4, 100, 1.0, &exact),
            Err(ComparatorError::Config(_))
        ));
        assert!(fdm_l1_solve_with_boundary(&p, 10, 10, 0.0, &exact).is_err());
    }

    #[test]
    fn loss_of_dominance_is_reported() {
        // backward diffusion u_t = -u_xx with a fine mesh
        let mut p = diffusion(1.0);
        p.linear_op[0].coeff = Expr::constant(-1.0);
        let exact = |x: f64, t: f64| Ok((x - t).exp());
        assert!(matches!(
            fdm_l1_solve_with_boundary(&p, 50, 10, 1.0, &exact),
            Err(ComparatorError::Stability { step: 1, .. })
        ));
    }

    #[test]
    fn blow_up_is_reported() {
        // u_t = u^2 with u(0) = 10 blows up at t = 0.1
        let p = FpdeProblem {
            name: "blowup".into(),
            alpha: 1.0,
            ic: Expr::constant(10.0),
            linear_op: vec![],
            nonlinear_op: vec![Monomial::parse("u^2", Expr::one()).unwrap()],
            source: vec![],
            domain: (0.0, 1.0),
            form: Form::Rhs,
        };
        let bc = |_x: f64, t: f64| Ok(10.0 / (1.0 - 10.0 * t));
        let err = fdm_l1_solve_with_boundary(&p, 10, 100, 1.0, &bc).unwrap_err();
        assert!(
            matches!(
                err,
                ComparatorError::Divergence { .. } | ComparatorError::Stability { .. }
            ),
            "{err:?}"
        );
    }

    #[test]
    fn csv_rows() {
        let exact = |x: f64, t: f64| Ok((x + t).exp());
        let g = fdm_l1_solve_with_boundary(&diffusion(0.8), 8, 8, 1.0, &exact).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 9 * 9);
        assert!(text.starts_with("x,t,u\n0,0,1\n"));
    }
}
