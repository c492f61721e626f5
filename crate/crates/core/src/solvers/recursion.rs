use super::homotopy::{adomian_with, he_with};
use super::{FpdeProblem, SolverError};
use crate::expr::{Differentiator, Expr};
use crate::fracseries::{
    frac_integral, sumudu_forward, sumudu_inverse, sumudu_scale, AlphaExponent, TimePowerSeries,
};

pub const DEFAULT_TERMS: usize = 5;
/// Time at which the default convergence diagnostic is taken.
pub const DIAGNOSTIC_T_PROBE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Hpstm,
    Adm,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Hpstm => "HPSTM",
            Method::Adm => "ADM",
        }
    }
}

/// Successive term norms grew somewhere on the diagnostic window.
#[derive(Debug, Clone, PartialEq)]
pub struct NonConvergenceWarning {
    pub t_probe: f64,
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
}

impl std::fmt::Display for NonConvergenceWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "term ratio {:.3} exceeds 1 at t = {}; the truncated series may be unreliable",
            self.max_ratio, self.t_probe
        )
    }
}

#[derive(Debug, Clone)]
pub struct SeriesSolution {
    pub problem_name: String,
    pub method: Method,
    pub alpha: f64,
    pub n_terms: usize,
    pub domain: (f64, f64),
    pub terms: Vec<TimePowerSeries>,
    pub partial_sum: TimePowerSeries,
    pub warning: Option<NonConvergenceWarning>,
}

impl SeriesSolution {
    fn new(problem: &FpdeProblem, method: Method, terms: Vec<TimePowerSeries>) -> Self {
        let mut partial = TimePowerSeries::zero(problem.alpha).with_domain(problem.sample_domain());
        for t in &terms {
            partial = partial.add_unpruned(t).expect("terms share alpha");
        }
        partial.prune();
        let mut sol = SeriesSolution {
            problem_name: problem.name.clone(),
            method,
            alpha: problem.alpha,
            n_terms: terms.len() - 1,
            domain: problem.domain,
            terms,
            partial_sum: partial,
            warning: None,
        };
        let samples = problem.sample_domain().samples();
        if let Ok(ratios) = convergence_ratios(&sol, DIAGNOSTIC_T_PROBE, &samples) {
            let max_ratio = ratios.iter().cloned().fold(0.0, f64::max);
            if max_ratio > 1.0 {
                sol.warning = Some(NonConvergenceWarning {
                    t_probe: DIAGNOSTIC_T_PROBE,
                    ratios,
                    max_ratio,
                });
            }
        }
        sol
    }

    pub fn evaluate(&self, x: f64, t: f64) -> Result<f64, SolverError> {
        Ok(self.partial_sum.evaluate(x, t)?)
    }

    /// Coefficient of `t^{kα}` in term `u_k`, when that is the only exponent
    /// present (the source-free case).
    pub fn lattice_coefficient(&self, k: usize) -> Option<&Expr> {
        self.terms
            .get(k)?
            .coefficient(AlphaExponent::alpha_power(k as u32))
    }
}

/// `u_0 = g + J^α f`.
fn initial_term(problem: &FpdeProblem) -> Result<TimePowerSeries, SolverError> {
    let alpha = problem.alpha;
    let domain = problem.sample_domain();
    let ic = TimePowerSeries::constant(alpha, problem.ic.clone()).with_domain(domain);
    if problem.source.is_empty() {
        return Ok(ic);
    }
    let f = TimePowerSeries::from_terms(
        alpha,
        domain,
        problem
            .source
            .iter()
            .map(|s| (AlphaExponent::integer(s.t_power as i64), s.coeff.clone())),
    );
    let jf = frac_integral(&f, alpha)?;
    Ok(crate::fracseries::series_add(&ic, &jf)?)
}

/// `R u_k + N_k`, where `N_k` is the k-th He or Adomian polynomial.
fn step_input(
    problem: &FpdeProblem,
    terms: &[TimePowerSeries],
    k: usize,
    method: Method,
    d: &mut Differentiator,
) -> Result<TimePowerSeries, SolverError> {
    let uk = &terms[k];
    let mut acc = TimePowerSeries::zero(problem.alpha).with_domain(problem.sample_domain());
    for lin in &problem.linear_op {
        let c = lin.coeff.clone();
        let part = uk.diff_x_with(d, lin.order).map_coefficients(|e| {
            if c.as_constant() == Some(1.0) {
                e.clone()
            } else {
                &c * e
            }
        });
        acc = acc.add_unpruned(&part)?;
    }
    if !problem.nonlinear_op.is_empty() {
        let nk = match method {
            Method::Hpstm => he_with(problem, terms, k, d)?,
            Method::Adm => adomian_with(problem, terms, k, d)?,
        };
        acc = acc.add_unpruned(&nk)?;
    }
    Ok(acc)
}

fn solve(problem: &FpdeProblem, n: usize, method: Method) -> Result<SeriesSolution, SolverError> {
    problem.validate()?;
    if n < 1 {
        return Err(SolverError::InvalidTermCount);
    }
    let alpha = problem.alpha;
    let sign = problem.form.sign();
    let mut d = Differentiator::new();
    let mut terms = vec![initial_term(problem)?];
    for k in 0..n {
        let input = step_input(problem, &terms, k, method, &mut d)?;
        let next = match method {
            // S⁻¹{u^α S[·]}
            Method::Hpstm => {
                let img = sumudu_scale(&sumudu_forward(&input)?, alpha)?;
                sumudu_inverse(&img)?
            }
            Method::Adm => frac_integral(&input, alpha)?,
        };
        terms.push(if sign == 1.0 { next } else { next.scale(sign) });
    }
    Ok(SeriesSolution::new(problem, method, terms))
}

/// Terms `u_0..u_n` of the homotopy perturbation Sumudu recursion.
pub fn hpstm_solve(problem: &FpdeProblem, n: usize) -> Result<SeriesSolution, SolverError> {
    solve(problem, n, Method::Hpstm)
}

/// Terms `u_0..u_n` of the Adomian decomposition recursion.
pub fn adm_solve(problem: &FpdeProblem, n: usize) -> Result<SeriesSolution, SolverError> {
    solve(problem, n, Method::Adm)
}

/// Ratios `‖u_{k+1}‖ / ‖u_k‖` of sup norms over `x_samples` at `t_probe`,
/// taken over consecutive nonzero terms. A finite series stops at its last
/// nonzero term.
pub fn convergence_ratios(
    sol: &SeriesSolution,
    t_probe: f64,
    x_samples: &[f64],
) -> Result<Vec<f64>, SolverError> {
    let mut norms = Vec::new();
    for term in &sol.terms {
        if term.is_empty() {
            break;
        }
        let mut norm: f64 = 0.0;
        for &x in x_samples {
            norm = norm.max(term.evaluate(x, t_probe)?.abs());
        }
        if norm == 0.0 {
            break;
        }
        norms.push(norm);
    }
    Ok(norms.windows(2).map(|w| w[1] / w[0]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::solvers::{Form, LinearTerm, Monomial, SourceTerm};
    use crate::special::gamma;

    fn porous(alpha: f64) -> FpdeProblem {
        FpdeProblem {
            name: "porous".into(),
            alpha,
            ic: Expr::x(),
            linear_op: vec![],
            nonlinear_op: vec![
                Monomial::parse("ux^2", Expr::one()).unwrap(),
                Monomial::parse("u*uxx", Expr::one()).unwrap(),
            ],
            source: vec![],
            domain: (0.0, 2.0),
            form: Form::Rhs,
        }
    }

    #[test]
    fn porous_terms() {
        for alpha in [1.0, 0.9, 0.5] {
            let sol = hpstm_solve(&porous(alpha), 5).unwrap();
            assert_eq!(sol.terms.len(), 6);
            assert_eq!(sol.terms[0].terms()[0].coeff.evaluate(1.3).unwrap(), 1.3);
            let c1 = sol.lattice_coefficient(1).unwrap().evaluate(0.4).unwrap();
            assert!((c1 - 1.0 / gamma(alpha + 1.0).unwrap()).abs() < 1e-15);
            assert!(sol.terms[2..].iter().all(|t| t.is_empty()));
            assert!(sol.warning.is_none());
        }
    }

    #[test]
    fn classical_limit_is_exact() {
        let sol = adm_solve(&porous(1.0), 3).unwrap();
        for x in [0.0, 0.7, 1.9] {
            for t in [0.0, 0.3, 1.0] {
                assert!((sol.evaluate(x, t).unwrap() - (x + t)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn left_form_flips_sign() {
        let mut p = porous(1.0);
        p.form = Form::Lhs;
        let sol = hpstm_solve(&p, 2).unwrap();
        assert_eq!(sol.evaluate(1.0, 0.5).unwrap(), 0.5);
    }

    #[test]
    fn source_enters_initial_term() {
        // D^α u = f with f = 1: u = J^α 1 = t^α/Γ(α+1)
        let p = FpdeProblem {
            name: "source".into(),
            alpha: 0.5,
            ic: Expr::zero(),
            linear_op: vec![LinearTerm {
                order: 2,
                coeff: Expr::one(),
            }],
            nonlinear_op: vec![],
            source: vec![SourceTerm {
                t_power: 0,
                coeff: Expr::one(),
            }],
            domain: (0.0, 1.0),
            form: Form::Rhs,
        };
        let sol = hpstm_solve(&p, 2).unwrap();
        let want = 0.25f64.sqrt() / gamma(1.5).unwrap();
        assert!((sol.evaluate(0.5, 0.25).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn heat_first_terms_match_closed_forms() {
        let p = FpdeProblem {
            name: "heat".into(),
            alpha: 0.8,
            ic: parse("(1+2*x)/(x^2+x+1)").unwrap(),
            linear_op: vec![LinearTerm {
                order: 2,
                coeff: Expr::one(),
            }],
            nonlinear_op: vec![Monomial::parse("u^3", Expr::constant(-2.0)).unwrap()],
            source: vec![],
            domain: (-4.0, 6.0),
            form: Form::Rhs,
        };
        let sol = hpstm_solve(&p, 3).unwrap();
        let g1 = gamma(1.8).unwrap();
        let c1 = sol.lattice_coefficient(1).unwrap().evaluate(1.0).unwrap();
        assert!((c1 * g1 + 2.0).abs() < 1e-12);
        let ratios =
            convergence_ratios(&sol, 0.05, &crate::expr::sample_points(0.0, 2.0, 20)).unwrap();
        assert_eq!(ratios.len(), 3);
        assert!(ratios.iter().all(|r| *r < 1.0));
        let ratios =
            convergence_ratios(&sol, 10.0, &crate::expr::sample_points(0.0, 2.0, 20)).unwrap();
        assert!(ratios.iter().any(|r| *r > 1.0));
        assert!(sol.warning.is_some());
    }

    #[test]
    fn porous_ratios_stop_at_last_nonzero_term() {
        let sol = hpstm_solve(&porous(0.7), 4).unwrap();
        let ratios = convergence_ratios(
            &sol,
            0.5,
            &crate::expr::sample_points(sol.domain.0, sol.domain.1, 20),
        )
        .unwrap();
        assert_eq!(ratios.len(), 1);
    }

    #[test]
    fn invalid_inputs() {
        assert_eq!(
            hpstm_solve(&porous(1.0), 0).unwrap_err(),
            SolverError::InvalidTermCount
        );
        assert!(adm_solve(&porous(1.2), 3).is_err());
    }
}
