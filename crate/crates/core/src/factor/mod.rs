//! Factor-revealing programs encoded as data: feasibility, objectives,
//! replay of the closed-form certificates and certified grid minimization.

mod certificate;
pub mod expr;
mod grid;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use certificate::{verify_certificate, CertificateReport, CertificateStep};
use expr::{Affine, Expr, Interval, NV};
pub use grid::{grid_min, GridReport};

pub const A: usize = 0;
pub const B: usize = 1;
pub const C: usize = 2;
pub const D: usize = 3;
pub const ALPHA: usize = 4;
pub const BETA0: usize = 5;
pub const BETA1: usize = 6;

const SLOT_NAMES: [&str; NV] = ["a", "b", "c", "d", "alpha", "beta0", "beta1"];

/// An assignment to the program variables. Unused fields are ignored.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    #[serde(default)]
    pub d: f64,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default)]
    pub beta0: f64,
    #[serde(default)]
    pub beta1: f64,
}

impl Point {
    pub fn to_array(&self) -> [f64; NV] {
        [self.a, self.b, self.c, self.d, self.alpha, self.beta0, self.beta1]
    }

    pub fn from_array(x: [f64; NV]) -> Self {
        Self {
            a: x[A],
            b: x[B],
            c: x[C],
            d: x[D],
            alpha: x[ALPHA],
            beta0: x[BETA0],
            beta1: x[BETA1],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProgramId {
    #[serde(rename = "SYM-A")]
    SymA,
    #[serde(rename = "SYM-B")]
    SymB,
    #[serde(rename = "FPT-A")]
    FptA,
    #[serde(rename = "FPT-B")]
    FptB,
    #[serde(rename = "FPTPLUS-A")]
    FptPlusA,
    #[serde(rename = "FPTPLUS-B")]
    FptPlusB,
}

impl ProgramId {
    pub const ALL: [ProgramId; 6] = [
        ProgramId::SymA,
        ProgramId::SymB,
        ProgramId::FptA,
        ProgramId::FptB,
        ProgramId::FptPlusA,
        ProgramId::FptPlusB,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProgramId::SymA => "SYM-A",
            ProgramId::SymB => "SYM-B",
            ProgramId::FptA => "FPT-A",
            ProgramId::FptB => "FPT-B",
            ProgramId::FptPlusA => "FPTPLUS-A",
            ProgramId::FptPlusB => "FPTPLUS-B",
        }
    }
}

impl fmt::Display for ProgramId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProgramId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProgramId::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Param(format!("unknown program `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ObjectiveKind {
    /// `max{b, a+b, d+c, (2−1/e)(1−a−b−d)−d−a}`
    R,
    /// `max{b, a+b, β₁+c, α+c}`
    RFpt,
}

/// `expr ≤ 0`.
#[derive(Clone, Debug)]
pub struct Constraint {
    pub name: &'static str,
    pub expr: Expr,
}

/// A program: variables with box bounds, constraints `g ≤ 0` and a
/// max-of-affine objective to be minimized.
#[derive(Clone, Debug)]
pub struct ProgramSpec {
    pub id: ProgramId,
    /// Slots in use; the others are pinned to 0.
    pub vars: Vec<usize>,
    pub bounds: [Interval; NV],
    pub constraints: Vec<Constraint>,
    pub objective_kind: ObjectiveKind,
    pub objective: Vec<(&'static str, Affine)>,
}

fn lin(c0: f64, terms: &[(usize, f64)]) -> Expr {
    Expr::affine(Affine::of(c0, terms))
}

fn con(name: &'static str, expr: Expr) -> Constraint {
    Constraint { name, expr }
}

impl ProgramSpec {
    pub fn new(id: ProgramId) -> Self {
        use ProgramId::*;
        let vars: Vec<usize> = match id {
            SymA | SymB => vec![A, B, C, D],
            FptA | FptB => vec![A, B, C, D, ALPHA, BETA0, BETA1],
            FptPlusA | FptPlusB => vec![A, B, C, ALPHA],
        };
        let mut bounds = [Interval::point(0.0); NV];
        for &v in &vars {
            bounds[v] = match v {
                A => Interval::new(-0.9, 0.9),
                B | C | D => Interval::new(0.0, 0.9),
                _ => Interval::new(0.0, 1.0),
            };
        }

        let mut constraints = vec![
            con("a-c <= 0", lin(0.0, &[(A, 1.0), (C, -1.0)])),
            con("c-a-b <= 0", lin(0.0, &[(C, 1.0), (A, -1.0), (B, -1.0)])),
            con("1-a-2b <= 0", lin(1.0, &[(A, -1.0), (B, -2.0)])),
            con("a+b-0.9 <= 0", lin(-0.9, &[(A, 1.0), (B, 1.0)])),
        ];
        if vars.contains(&D) {
            constraints.push(con("c+d-0.9 <= 0", lin(-0.9, &[(C, 1.0), (D, 1.0)])));
        }
        match id {
            SymA | FptA | FptPlusA => {
                let u = Affine::of(1.0, &[(C, -1.0), (B, -1.0)]);
                let v = Affine::of(1.0, &[(A, -1.0), (B, -1.0)]);
                let w = Affine::of(1.0, &[(A, -1.0), (B, -2.0)]);
                constraints.push(con("b+c-1 <= 0", lin(-1.0, &[(B, 1.0), (C, 1.0)])));
                constraints.push(con(
                    "(1-c-b)^2+4(1-a-b)(1-a-2b) <= 0",
                    Expr::product(1.0, u, u).plus(Expr::product(4.0, v, w)),
                ));
            }
            SymB | FptB | FptPlusB => {
                // the second half of this branch, 1-a-2b <= 0, is already in the base
                constraints.push(con("1-c-b <= 0", lin(1.0, &[(C, -1.0), (B, -1.0)])));
            }
        }
        match id {
            FptA | FptB => {
                constraints.push(con("beta0-2alpha <= 0", lin(0.0, &[(BETA0, 1.0), (ALPHA, -2.0)])));
                constraints.push(con(
                    "1-beta0-beta1-c <= 0",
                    lin(1.0, &[(BETA0, -1.0), (BETA1, -1.0), (C, -1.0)]),
                ));
            }
            FptPlusA | FptPlusB => {
                constraints.push(con("1-c-2alpha <= 0", lin(1.0, &[(C, -1.0), (ALPHA, -2.0)])));
            }
            SymA | SymB => {}
        }

        let (objective_kind, objective) = match id {
            SymA | SymB => {
                let k = 2.0 - (-1.0f64).exp();
                (
                    ObjectiveKind::R,
                    vec![
                        ("b", Affine::of(0.0, &[(B, 1.0)])),
                        ("a+b", Affine::of(0.0, &[(A, 1.0), (B, 1.0)])),
                        ("d+c", Affine::of(0.0, &[(D, 1.0), (C, 1.0)])),
                        (
                            "(2-1/e)(1-a-b-d)-d-a",
                            Affine::of(k, &[(A, -k - 1.0), (B, -k), (D, -k - 1.0)]),
                        ),
                    ],
                )
            }
            _ => (
                ObjectiveKind::RFpt,
                vec![
                    ("b", Affine::of(0.0, &[(B, 1.0)])),
                    ("a+b", Affine::of(0.0, &[(A, 1.0), (B, 1.0)])),
                    ("beta1+c", Affine::of(0.0, &[(BETA1, 1.0), (C, 1.0)])),
                    ("alpha+c", Affine::of(0.0, &[(ALPHA, 1.0), (C, 1.0)])),
                ],
            ),
        };

        Self {
            id,
            vars,
            bounds,
            constraints,
            objective_kind,
            objective,
        }
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn constraint(&self, name: &str) -> Option<&Constraint> {
        self.constraints.iter().find(|c| c.name == name)
    }

    pub fn objective_at(&self, x: &[f64; NV]) -> f64 {
        self.objective
            .iter()
            .map(|(_, t)| t.eval(x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Zeroes the slots this program does not use.
    pub fn project(&self, p: &Point) -> [f64; NV] {
        let full = p.to_array();
        let mut x = [0.0; NV];
        for &v in &self.vars {
            x[v] = full[v];
        }
        x
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub constraint: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Feasibility {
    pub feasible: bool,
    pub violated: Vec<Violation>,
}

/// Checks every constraint with slack `tau` (`g ≤ tau`), plus the box.
pub fn feasible(program: ProgramId, point: &Point, tau: f64) -> Feasibility {
    let spec = ProgramSpec::new(program);
    let x = spec.project(point);
    let mut violated = Vec::new();
    for &v in &spec.vars {
        let iv = spec.bounds[v];
        if !x[v].is_finite() || x[v] < iv.lo - tau || x[v] > iv.hi + tau {
            violated.push(Violation {
                constraint: format!("{} in [{}, {}]", SLOT_NAMES[v], iv.lo, iv.hi),
                value: x[v],
            });
        }
    }
    for c in &spec.constraints {
        let g = c.expr.eval(&x);
        if !(g <= tau) {
            violated.push(Violation {
                constraint: c.name.to_string(),
                value: g,
            });
        }
    }
    Feasibility {
        feasible: violated.is_empty(),
        violated,
    }
}

/// The program's objective at `point`.
pub fn objective(program: ProgramId, point: &Point) -> f64 {
    let spec = ProgramSpec::new(program);
    spec.objective_at(&spec.project(point))
}

/// The known feasible point for each program.
pub fn reference_point(program: ProgramId) -> Point {
    let e = std::f64::consts::E;
    let r = 2.0 * (6.0 - 2f64.sqrt()) / 17.0;
    let fptplus_a = Point {
        a: 0.0,
        b: r,
        c: -1.0 + 2.0 * r,
        alpha: 1.0 - r,
        ..Point::default()
    };
    let fptplus_b = Point {
        a: -1.0 / 3.0,
        b: 2.0 / 3.0,
        c: 1.0 / 3.0,
        alpha: 1.0 / 3.0,
        ..Point::default()
    };
    match program {
        ProgramId::FptPlusA => fptplus_a,
        ProgramId::FptPlusB => fptplus_b,
        ProgramId::FptA => Point {
            beta0: 1.0 - fptplus_a.c,
            ..fptplus_a
        },
        ProgramId::FptB => Point {
            beta0: 2.0 / 3.0,
            ..fptplus_b
        },
        ProgramId::SymA => Point {
            a: 1e-8,
            b: 0.5034476995316219,
            c: 0.3795235846990063,
            d: 0.12392128506019447,
            ..Point::default()
        },
        ProgramId::SymB => {
            let den = 3.0 * (3.0 * e - 1.0);
            Point {
                a: 0.0,
                b: (5.0 * e - 2.0) / den,
                c: (4.0 * e - 1.0) / den,
                d: (e - 1.0) / den,
                ..Point::default()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_points_are_feasible() {
        for p in ProgramId::ALL {
            let f = feasible(p, &reference_point(p), 1e-9);
            assert!(f.feasible, "{p}: {:?}", f.violated);
        }
    }

    #[test]
    fn fptplus_a_objective_is_the_quadratic_root() {
        let want = 2.0 * (6.0 - 2f64.sqrt()) / 17.0;
        let v = objective(ProgramId::FptPlusA, &reference_point(ProgramId::FptPlusA));
        assert!((v - want).abs() <= 1e-12);
        assert!((v - 0.5395042868).abs() < 1e-9);
    }

    #[test]
    fn fptplus_b_objective() {
        let v = objective(ProgramId::FptB, &reference_point(ProgramId::FptPlusB));
        assert!((v - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn sym_b_point_is_balanced() {
        let spec = ProgramSpec::new(ProgramId::SymB);
        let x = spec.project(&reference_point(ProgramId::SymB));
        let terms: Vec<f64> = spec.objective.iter().map(|(_, t)| t.eval(&x)).collect();
        let r = objective(ProgramId::SymB, &reference_point(ProgramId::SymB));
        assert!((r - 0.540028).abs() < 1e-5);
        for t in terms {
            assert!((t - r).abs() < 1e-4);
        }
    }

    #[test]
    fn sym_b_rejects_small_b_plus_c() {
        let p = Point {
            a: 0.1,
            b: 0.5,
            c: 0.3,
            d: 0.1,
            ..Point::default()
        };
        let f = feasible(ProgramId::SymB, &p, 0.0);
        assert!(!f.feasible);
        assert!(f.violated.iter().any(|v| v.constraint == "1-c-b <= 0"));
    }

    #[test]
    fn box_violations_are_reported() {
        let p = Point {
            b: 0.95,
            ..reference_point(ProgramId::FptPlusB)
        };
        let f = feasible(ProgramId::FptPlusB, &p, 0.0);
        assert!(f.violated.iter().any(|v| v.constraint.starts_with("b in")));
    }

    #[test]
    fn program_ids_round_trip() {
        for p in ProgramId::ALL {
            assert_eq!(p.name().parse::<ProgramId>().unwrap(), p);
            assert_eq!(serde_json::to_string(&p).unwrap(), format!("\"{}\"", p.name()));
        }
        assert!("SYM-C".parse::<ProgramId>().is_err());
    }

    #[test]
    fn shapes() {
        assert_eq!(ProgramSpec::new(ProgramId::FptA).dim(), 7);
        assert_eq!(ProgramSpec::new(ProgramId::FptPlusB).dim(), 4);
        assert!(ProgramSpec::new(ProgramId::FptPlusA).constraint("c+d-0.9 <= 0").is_none());
        assert!(ProgramSpec::new(ProgramId::SymA).constraint("c+d-0.9 <= 0").is_some());
    }
}
