use std::collections::BTreeMap;

use serde::Serialize;

/// The inequality a scan probes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Claim {
    /// `‖X‖_q/‖X‖_p` over log-concave `X` is maximised inside the Γ^s family.
    FamilyNormRatio,
    /// `E[|X|^q sgn X]/‖X‖_p` is maximised by Γ.
    FamilySignedRatio,
    /// `E φ(X)` over isotropic log-concave `X` is maximised inside the family.
    FamilyPhi,
    /// α(K) ≤ α(Δ_n).
    BodyNormRatio,
    /// α*(K) ≤ α*(Δ_n).
    BodySignedRatio,
}

/// What the scan parameter means.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parameter {
    /// Mixture weight `s ∈ [0, 1]`.
    S,
    /// Polar angle of a direction in the plane.
    Angle,
    /// Index into a list of directions.
    DirectionIndex,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanPoint {
    pub param: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<Vec<f64>>,
    pub value: f64,
    /// Absolute error estimate of `value`.
    pub error: f64,
    /// A second objective recorded alongside the first (see the report's
    /// `secondary` label).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub secondary: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Best {
    /// Grid index, when the optimum is a grid point.
    pub index: Option<usize>,
    pub param: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<Vec<f64>>,
    pub value: f64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Refinement {
    pub best: Best,
    /// Final bracket width (angle, `s`, or pattern-search step).
    pub width: f64,
    pub converged: bool,
    pub evaluations: usize,
    /// Largest change of the objective across the final bracket.
    pub bracket_variation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Method {
    pub mode: &'static str,
    pub grid: usize,
    pub rel_tol: f64,
    pub refine_tol: Option<f64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// A grid of objective values with its argmax and metadata.
///
/// `grid_best` is the largest recorded grid value; values within a relative
/// `1e−12` of it count as ties and go to the first grid point (lowest `s`)
/// or, for direction grids, the lexicographically smallest direction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanReport {
    pub claim: Claim,
    pub objective: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub secondary: Option<String>,
    pub parameter: Parameter,
    pub points: Vec<ScanPoint>,
    pub grid_best: Best,
    pub refined: Option<Refinement>,
    pub method: Method,
    pub summary: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
}

impl ScanReport {
    /// The refined optimum when refinement improved on the grid, else the
    /// grid optimum.
    pub fn best(&self) -> &Best {
        match &self.refined {
            Some(r) if r.best.value > self.grid_best.value => &r.best,
            _ => &self.grid_best,
        }
    }

    /// Error estimate of `best().value`, including the refinement bracket.
    pub fn best_error(&self) -> f64 {
        match &self.refined {
            Some(r) if r.best.value > self.grid_best.value => r.best.error + r.bracket_variation,
            _ => self.grid_best.error,
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub(crate) fn push_check(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail,
        });
    }
}

const TIE_TOL: f64 = 1e-12;

fn lex_less(a: &Option<Vec<f64>>, b: &Option<Vec<f64>>) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => {
            for (x, y) in a.iter().zip(b) {
                if x != y {
                    return x < y;
                }
            }
            false
        }
        _ => false,
    }
}

/// Index of the grid maximum under the tie rule described on [`ScanReport`].
pub(crate) fn grid_argmax(points: &[ScanPoint]) -> usize {
    let max = points.iter().map(|p| p.value).fold(f64::NEG_INFINITY, f64::max);
    let tol = TIE_TOL * max.abs();
    let mut best: Option<usize> = None;
    for (i, p) in points.iter().enumerate() {
        if p.value < max - tol {
            continue;
        }
        best = match best {
            Some(j) if !lex_less(&p.direction, &points[j].direction) => Some(j),
            _ => Some(i),
        };
    }
    best.expect("scan has at least one point")
}

pub(crate) fn best_of(points: &[ScanPoint]) -> Best {
    let i = grid_argmax(points);
    let p = &points[i];
    Best {
        index: Some(i),
        param: p.param,
        direction: p.direction.clone(),
        value: p.value,
        error: p.error,
    }
}
