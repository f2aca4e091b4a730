use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use super::{problem_from_expr, ConstantSource, TestProblem};
use crate::expr::Expr;
use crate::geometry::Domain;
use crate::problem::KnownMinimum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DixonSzego {
    Branin,
    Camelback,
    GoldsteinPrice,
    Shubert,
    Hartman3,
    Shekel5,
    Shekel7,
    Shekel10,
    Hartman6,
}

impl DixonSzego {
    pub const ALL: [DixonSzego; 9] = [
        DixonSzego::Branin,
        DixonSzego::Camelback,
        DixonSzego::GoldsteinPrice,
        DixonSzego::Shubert,
        DixonSzego::Hartman3,
        DixonSzego::Shekel5,
        DixonSzego::Shekel7,
        DixonSzego::Shekel10,
        DixonSzego::Hartman6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DixonSzego::Branin => "branin",
            DixonSzego::Camelback => "camelback",
            DixonSzego::GoldsteinPrice => "goldstein-price",
            DixonSzego::Shubert => "shubert",
            DixonSzego::Hartman3 => "hartman3",
            DixonSzego::Shekel5 => "shekel5",
            DixonSzego::Shekel7 => "shekel7",
            DixonSzego::Shekel10 => "shekel10",
            DixonSzego::Hartman6 => "hartman6",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            DixonSzego::Branin
            | DixonSzego::Camelback
            | DixonSzego::GoldsteinPrice
            | DixonSzego::Shubert => 2,
            DixonSzego::Hartman3 => 3,
            DixonSzego::Shekel5 | DixonSzego::Shekel7 | DixonSzego::Shekel10 => 4,
            DixonSzego::Hartman6 => 6,
        }
    }

    pub fn domain(self) -> Domain {
        let pairs: Vec<(f64, f64)> = match self {
            DixonSzego::Branin => vec![(-5.0, 10.0), (0.0, 15.0)],
            DixonSzego::Camelback => vec![(-3.0, 3.0), (-2.0, 2.0)],
            DixonSzego::GoldsteinPrice => vec![(-2.0, 2.0); 2],
            DixonSzego::Shubert => vec![(-10.0, 10.0); 2],
            DixonSzego::Hartman3 => vec![(0.0, 1.0); 3],
            DixonSzego::Shekel5 | DixonSzego::Shekel7 | DixonSzego::Shekel10 => {
                vec![(0.0, 10.0); 4]
            }
            DixonSzego::Hartman6 => vec![(0.0, 1.0); 6],
        };
        Domain::from_pairs(&pairs).expect("valid domain")
    }

    /// Global minimum value for the coefficient tables in this module.
    /// Hartman3 differs from the frequently quoted `-3.86278214782076`, which
    /// belongs to the variant with `p[3][0] = 0.03815`; both round to
    /// `-3.86278`. Tests re-derive every value with a grid search and polish.
    pub fn literature_minimum(self) -> f64 {
        match self {
            DixonSzego::Branin => 0.397_887_357_729_739,
            DixonSzego::Camelback => -1.031_628_453_489_877,
            DixonSzego::GoldsteinPrice => 3.0,
            DixonSzego::Shubert => -186.730_908_831_024,
            DixonSzego::Hartman3 => -3.862_779_787_332_662,
            DixonSzego::Shekel5 => -10.153_199_679_058_2,
            DixonSzego::Shekel7 => -10.402_940_566_818_7,
            DixonSzego::Shekel10 => -10.536_409_816_692,
            DixonSzego::Hartman6 => -3.322_368_011_415_51,
        }
    }

    pub fn expr(self) -> Expr {
        let x = |i: usize| Expr::var(i);
        match self {
            DixonSzego::Branin => {
                let b = 5.1 / (4.0 * PI * PI);
                let c = 5.0 / PI;
                let t = 1.0 / (8.0 * PI);
                (x(1) - b * x(0).powi(2) + c * x(0) - 6.0).powi(2)
                    + 10.0 * (1.0 - t) * x(0).cos()
                    + 10.0
            }
            DixonSzego::Camelback => {
                (4.0 - 2.1 * x(0).powi(2) + x(0).powi(4) / 3.0) * x(0).powi(2)
                    + x(0) * x(1)
                    + (-4.0 + 4.0 * x(1).powi(2)) * x(1).powi(2)
            }
            DixonSzego::GoldsteinPrice => {
                let (a, b) = (x(0), x(1));
                let p1 = 19.0 - 14.0 * a.clone() + 3.0 * a.powi(2) - 14.0 * b.clone()
                    + 6.0 * a.clone() * b.clone()
                    + 3.0 * b.powi(2);
                let p2 = 18.0 - 32.0 * a.clone() + 12.0 * a.powi(2) + 48.0 * b.clone()
                    - 36.0 * a.clone() * b.clone()
                    + 27.0 * b.powi(2);
                (1.0 + (a.clone() + b.clone() + 1.0).powi(2) * p1)
                    * (30.0 + (2.0 * a - 3.0 * b).powi(2) * p2)
            }
            DixonSzego::Shubert => (0..2)
                .map(|k| {
                    (1..=5)
                        .map(|i| {
                            let i = i as f64;
                            i * ((i + 1.0) * x(k) + i).cos()
                        })
                        .fold(Expr::constant(0.0), |s, t| s + t)
                })
                .fold(Expr::constant(1.0), |p, t| p * t),
            DixonSzego::Hartman3 => hartman(&HARTMAN3_A, &HARTMAN3_P),
            DixonSzego::Hartman6 => hartman(&HARTMAN6_A, &HARTMAN6_P),
            DixonSzego::Shekel5 => shekel(5),
            DixonSzego::Shekel7 => shekel(7),
            DixonSzego::Shekel10 => shekel(10),
        }
    }
}

impl fmt::Display for DixonSzego {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DixonSzego {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        DixonSzego::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown Dixon-Szego function '{s}'"))
    }
}

const HARTMAN_C: [f64; 4] = [1.0, 1.2, 3.0, 3.2];

const HARTMAN3_A: [[f64; 3]; 4] = [
    [3.0, 10.0, 30.0],
    [0.1, 10.0, 35.0],
    [3.0, 10.0, 30.0],
    [0.1, 10.0, 35.0],
];

const HARTMAN3_P: [[f64; 3]; 4] = [
    [0.3689, 0.1170, 0.2673],
    [0.4699, 0.4387, 0.7470],
    [0.1091, 0.8732, 0.5547],
    [0.0381, 0.5743, 0.8828],
];

const HARTMAN6_A: [[f64; 6]; 4] = [
    [10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
    [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
    [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
    [17.0, 8.0, 0.05, 10.0, 0.1, 14.0],
];

const HARTMAN6_P: [[f64; 6]; 4] = [
    [0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886],
    [0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991],
    [0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650],
    [0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381],
];

fn hartman<const D: usize>(a: &[[f64; D]; 4], p: &[[f64; D]; 4]) -> Expr {
    (0..4)
        .map(|i| {
            let inner = (0..D)
                .map(|j| a[i][j] * (Expr::var(j) - p[i][j]).powi(2))
                .fold(Expr::constant(0.0), |s, t| s + t);
            HARTMAN_C[i] * (-inner).exp()
        })
        .fold(Expr::constant(0.0), |s, t| s - t)
}

const SHEKEL_BETA: [f64; 10] = [0.1, 0.2, 0.2, 0.4, 0.4, 0.6, 0.3, 0.7, 0.5, 0.5];

const SHEKEL_C: [[f64; 4]; 10] = [
    [4.0, 4.0, 4.0, 4.0],
    [1.0, 1.0, 1.0, 1.0],
    [8.0, 8.0, 8.0, 8.0],
    [6.0, 6.0, 6.0, 6.0],
    [3.0, 7.0, 3.0, 7.0],
    [2.0, 9.0, 2.0, 9.0],
    [5.0, 5.0, 3.0, 3.0],
    [8.0, 1.0, 8.0, 1.0],
    [6.0, 2.0, 6.0, 2.0],
    [7.0, 3.6, 7.0, 3.6],
];

fn shekel(m: usize) -> Expr {
    (0..m)
        .map(|i| {
            let dist = (0..4)
                .map(|j| (Expr::var(j) - SHEKEL_C[i][j]).powi(2))
                .fold(Expr::constant(0.0), |s, t| s + t);
            1.0 / (dist + SHEKEL_BETA[i])
        })
        .fold(Expr::constant(0.0), |s, t| s - t)
}

/// A Dixon-Szego function with oracles compiled from its expression and
/// `L1..L3` from interval bounds over the domain.
pub fn dixon_szego(f: DixonSzego) -> TestProblem {
    let e = f.expr();
    let problem = problem_from_expr(f.name(), &e, f.domain())
        .expect("catalog functions are defined on their whole domain")
        .with_unconstrained(true)
        .with_known_minimum(KnownMinimum {
            value: f.literature_minimum(),
            location: None,
            source: "tabulated value, checked by grid search and local polish".into(),
        });
    TestProblem {
        problem,
        constants: ConstantSource::Interval,
        expr: Some(e),
        citation: "Dixon and Szego (1978) test set",
    }
}
