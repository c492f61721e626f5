//! Closed-form classical (α = 1) solutions of the bundled examples.

/// `u(x, t)` at α = 1, when known.
pub fn classical_solution(problem_name: &str) -> Option<fn(f64, f64) -> f64> {
    match problem_name {
        "example1" => Some(|x, t| x + t),
        // travelling wave of u_t = u_xx - 2u^3
        "example2" => Some(|x, t| (1.0 + 2.0 * x) / (x * x + x + 1.0 + 6.0 * t)),
        // travelling wave of u_t = u_xx + 6u(1 - u)
        "example3" => Some(|x, t| {
            let d = 1.0 + (x - 5.0 * t).exp();
            1.0 / (d * d)
        }),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `u_t - u_xx - n(u)` by central differences.
    fn pde_defect(u: fn(f64, f64) -> f64, n: fn(f64) -> f64, x: f64, t: f64) -> f64 {
        let h = 1e-4;
        let ut = (u(x, t + h) - u(x, t - h)) / (2.0 * h);
        let uxx = (u(x + h, t) - 2.0 * u(x, t) + u(x - h, t)) / (h * h);
        ut - uxx - n(u(x, t))
    }

    #[test]
    fn travelling_waves_solve_their_equations() {
        let heat = classical_solution("example2").unwrap();
        let fisher = classical_solution("example3").unwrap();
        for (x, t) in [(1.0, 0.2), (-0.5, 0.05), (2.5, 0.7)] {
            assert!(pde_defect(heat, |u| -2.0 * u * u * u, x, t).abs() < 1e-5);
            assert!(pde_defect(fisher, |u| 6.0 * u * (1.0 - u), x, t).abs() < 1e-5);
        }
        assert_eq!(heat(1.0, 0.0), 1.0);
        assert_eq!(fisher(0.0, 0.0), 0.25);
        assert!(classical_solution("other").is_none());
    }
}
