//! Name-based lookup of benchmark problems.

use qbnb::functions::{
    dixon_szego, random_rastrigin_like, rastrigin_standard, shifted_quadratic, DixonSzego,
    TestProblem,
};

use crate::BenchError;

/// Names accepted by [`resolve`], for help text.
pub const NAMES: &[&str] = &[
    "rastrigin",
    "random-rastrigin",
    "random-rastrigin-constrained",
    "quadratic",
    "branin",
    "camelback",
    "goldstein-price",
    "shubert",
    "hartman3",
    "shekel5",
    "shekel7",
    "shekel10",
    "hartman6",
];

/// Resolves a function name. `dim` applies to `rastrigin` only (default 2);
/// `seed` to the random families (default 1).
pub fn resolve(name: &str, dim: Option<usize>, seed: Option<u64>) -> Result<TestProblem, BenchError> {
    let seed = seed.unwrap_or(1);
    let fixed_dim = |t: TestProblem| -> Result<TestProblem, BenchError> {
        match dim {
            Some(d) if d != t.problem.dim() => Err(BenchError::Config(format!(
                "{name} has dimension {}, not {d}",
                t.problem.dim()
            ))),
            _ => Ok(t),
        }
    };
    match name {
        "rastrigin" => {
            let d = dim.unwrap_or(2);
            if d == 0 {
                return Err(BenchError::Config("dimension must be at least 1".into()));
            }
            Ok(rastrigin_standard(d))
        }
        "random-rastrigin" => fixed_dim(random_rastrigin_like(seed, 1.0)),
        "random-rastrigin-constrained" => fixed_dim(random_rastrigin_like(seed, -1.0)),
        "quadratic" => fixed_dim(shifted_quadratic()),
        other => match other.parse::<DixonSzego>() {
            Ok(f) => fixed_dim(dixon_szego(f)),
            Err(_) => Err(BenchError::Config(format!(
                "unknown function '{other}'; expected one of {}",
                NAMES.join(", ")
            ))),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_resolves() {
        for n in NAMES {
            let t = resolve(n, None, None).unwrap();
            assert!(t.problem.dim() >= 1);
        }
        assert_eq!(resolve("rastrigin", Some(5), None).unwrap().problem.dim(), 5);
        assert_eq!(resolve("hartman6", Some(6), None).unwrap().problem.dim(), 6);
    }

    #[test]
    fn bad_names_and_dims() {
        assert_eq!(resolve("nope", None, None).unwrap_err().exit_code(), 2);
        assert!(resolve("branin", Some(3), None).is_err());
        assert!(resolve("rastrigin", Some(0), None).is_err());
    }

    #[test]
    fn seeds_select_problems() {
        let a = resolve("random-rastrigin", None, Some(2)).unwrap().problem;
        let b = resolve("random-rastrigin", None, Some(3)).unwrap().problem;
        let x = [0.3, 1.7, 2.2];
        assert_ne!(a.eval(&x), b.eval(&x));
        assert!(!resolve("random-rastrigin-constrained", None, Some(2))
            .unwrap()
            .problem
            .is_unconstrained());
    }
}
