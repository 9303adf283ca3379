//! Equilibria of the replicator system and their local stability.
//!
//! Two Jacobians are available. Paper mode uses the closed-form matrices:
//! the diagonal no-feedback Jacobian, and with feedback the lower-triangular
//! matrix in its original closed form, kept as is even where it disagrees
//! with the derivative of the integrated field. Numeric mode differentiates
//! [`crate::dynamics::rhs`] by finite differences and is the reference for
//! anything that is actually integrated.

use serde::{Deserialize, Serialize};

use crate::dynamics::{advantages, rhs};
use crate::error::{Error, Result};
use crate::nev_model::{battery_insurance, delta_manufacturer, retained_expectation};
use crate::params::ModelParams;
use crate::state::GameState;

/// Eigenvalue real parts within this distance of zero are not classified.
pub const HYPERBOLIC_THRESHOLD: f64 = 1e-9;
/// Finite-difference step of [`jacobian_numeric`].
pub const FD_STEP: f64 = 1e-6;

pub type Matrix2 = [[f64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    #[serde(rename = "ESS")]
    Ess,
    #[serde(rename = "saddle")]
    Saddle,
    #[serde(rename = "unstable")]
    Unstable,
    #[serde(rename = "non-hyperbolic")]
    NonHyperbolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Paper,
    Numeric,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Mode::Paper),
            "numeric" => Ok(Mode::Numeric),
            other => Err(Error::Spec(format!("unknown mode `{other}` (expected paper or numeric)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub point: Point,
    pub jacobian: Matrix2,
    pub det: f64,
    pub trace: f64,
    pub eigenvalues: [Complex; 2],
    pub classification: Classification,
    pub mode: Mode,
    pub in_domain: bool,
}

pub fn det(j: &Matrix2) -> f64 {
    j[0][0] * j[1][1] - j[0][1] * j[1][0]
}

pub fn trace(j: &Matrix2) -> f64 {
    j[0][0] + j[1][1]
}

/// Roots of `l^2 - tr l + det`, larger real part first.
pub fn eigenvalues(j: &Matrix2) -> [Complex; 2] {
    let (tr, dt) = (trace(j), det(j));
    // discriminant written so that triangular matrices give exact roots
    let half_gap = 0.5 * (j[0][0] - j[1][1]);
    let disc = half_gap * half_gap + j[0][1] * j[1][0];
    let mid = 0.5 * tr;
    if disc >= 0.0 {
        let s = disc.sqrt();
        let (a, b) = (mid + s, mid - s);
        // recompute the smaller root from the product when cancellation bites
        let b = if a != 0.0 && b.abs() < 1e-8 * a.abs() { dt / a } else { b };
        [Complex { re: a, im: 0.0 }, Complex { re: b, im: 0.0 }]
    } else {
        let s = (-disc).sqrt();
        [Complex { re: mid, im: s }, Complex { re: mid, im: -s }]
    }
}

pub fn classify_eigenvalues(ev: &[Complex; 2]) -> Classification {
    let (a, b) = (ev[0].re, ev[1].re);
    if a.abs() <= HYPERBOLIC_THRESHOLD || b.abs() <= HYPERBOLIC_THRESHOLD {
        Classification::NonHyperbolic
    } else if a < 0.0 && b < 0.0 {
        Classification::Ess
    } else if a > 0.0 && b > 0.0 {
        Classification::Unstable
    } else {
        Classification::Saddle
    }
}

pub fn jacobian_paper_no_feedback(p: &ModelParams, point: Point) -> Matrix2 {
    let (dx, dy) = (delta_manufacturer(p), crate::nev_model::delta_consumer_no_feedback(p));
    [[(1.0 - 2.0 * point.x) * dx, 0.0], [0.0, (1.0 - 2.0 * point.y) * dy]]
}

/// Closed-form feedback Jacobian, entry for entry.
///
/// ```text
/// [ W3  0  ]   W3 = (1-2x) dX
/// [ W4  W5 ]   W4 = 2 (1-2y) S
///              W5 = (1-2y) { 2x S [P1+e1+n1-c1+R(y)-A] - (P2+e2+n2-c2-p) - S } + y(1-y) R'(y)
/// ```
/// with `S = (epsilon - delta epsilon) sum(I)`, `R(y) = r (1 - y)`, `R' = -r`.
pub fn jacobian_paper_feedback(p: &ModelParams, point: Point) -> Matrix2 {
    let (x, y) = (point.x, point.y);
    let c = &p.consumer;
    let s = retained_expectation(p);
    let nev = c.nev_price + c.nev_range + c.nev_infrastructure - c.nev_refuel + battery_insurance(c.insurance, y)
        - c.purchase_tax;
    let tfv = c.tfv_price + c.tfv_range + c.tfv_infrastructure - c.tfv_refuel - c.energy_price;
    let w3 = (1.0 - 2.0 * x) * delta_manufacturer(p);
    let w4 = 2.0 * (1.0 - 2.0 * y) * s;
    let w5 = (1.0 - 2.0 * y) * (2.0 * x * s * nev - tfv - s) + y * (1.0 - y) * (-c.insurance);
    [[w3, 0.0], [w4, w5]]
}

/// Central differences of the integrated field, one-sided within
/// [`FD_STEP`] of the unit-square boundary.
pub fn jacobian_numeric(p: &ModelParams, point: Point) -> Result<Matrix2> {
    let h = FD_STEP;
    let f = |x: f64, y: f64| rhs(p, &GameState::new(x, y, 0.0));
    let column = |along_x: bool| -> (f64, f64) {
        let v = if along_x { point.x } else { point.y };
        let (lo, hi) = if v < h && v >= 0.0 {
            (v, v + h)
        } else if v > 1.0 - h && v <= 1.0 {
            (v - h, v)
        } else {
            (v - h, v + h)
        };
        let (a, b) = if along_x { (f(lo, point.y), f(hi, point.y)) } else { (f(point.x, lo), f(point.x, hi)) };
        ((b.0 - a.0) / (hi - lo), (b.1 - a.1) / (hi - lo))
    };
    let (dfx_dx, dfy_dx) = column(true);
    let (dfx_dy, dfy_dy) = column(false);
    let j = [[dfx_dx, dfx_dy], [dfy_dx, dfy_dy]];
    if j.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("field near ({}, {})", point.x, point.y)));
    }
    Ok(j)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Equilibria {
    /// Corners first, then edge points, then interior candidates.
    pub points: Vec<(Point, bool)>,
    pub diagnostics: Vec<String>,
}

const DEDUP: f64 = 1e-8;

fn seeds() -> impl Iterator<Item = (f64, f64)> {
    (0..5).flat_map(|i| (0..5).map(move |j| (0.1 + 0.2 * i as f64, 0.1 + 0.2 * j as f64)))
}

/// Damped Newton on `g(x, y) = 0` with a finite-difference Jacobian.
fn newton(g: impl Fn(f64, f64) -> (f64, f64), mut x: f64, mut y: f64) -> Option<(f64, f64)> {
    let norm = |v: (f64, f64)| v.0.abs().max(v.1.abs());
    let mut r = g(x, y);
    for _ in 0..100 {
        if norm(r) < 1e-13 {
            return Some((x, y));
        }
        let h = 1e-7;
        let (gx, gy) = (g(x + h, y), g(x, y + h));
        let j = [[(gx.0 - r.0) / h, (gy.0 - r.0) / h], [(gx.1 - r.1) / h, (gy.1 - r.1) / h]];
        let d = det(&j);
        if d.abs() < 1e-14 {
            return None;
        }
        let sx = (j[1][1] * r.0 - j[0][1] * r.1) / d;
        let sy = (j[0][0] * r.1 - j[1][0] * r.0) / d;
        let mut lambda = 1.0;
        loop {
            let (nx, ny) = (x - lambda * sx, y - lambda * sy);
            let nr = g(nx, ny);
            if norm(nr) < norm(r) || lambda < 1e-6 {
                (x, y, r) = (nx, ny, nr);
                break;
            }
            lambda *= 0.5;
        }
        if !(x.is_finite() && y.is_finite()) {
            return None;
        }
    }
    (norm(r) < 1e-10).then_some((x, y))
}

fn push_unique(points: &mut Vec<(Point, bool)>, p: Point, in_domain: bool) {
    if !points.iter().any(|(q, _)| (q.x - p.x).abs() < DEDUP && (q.y - p.y).abs() < DEDUP) {
        points.push((p, in_domain));
    }
}

/// The four corners, plus with feedback every isolated equilibrium on the
/// edges `x = 0`, `x = 1` and in the interior.
///
/// Interior roots solve both payoff differences jointly. Roots outside the
/// open unit square are kept with `in_domain = false`.
pub fn enumerate_equilibria(p: &ModelParams) -> Equilibria {
    let mut points = Vec::new();
    let mut diagnostics = Vec::new();
    for (x, y) in [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)] {
        points.push((Point { x, y }, true));
    }
    if !p.feedback {
        return Equilibria { points, diagnostics };
    }

    // edges x = 0 and x = 1: dy/dt = 0 with y strictly inside
    for x in [0.0, 1.0] {
        let dy = |y: f64| advantages(p, &GameState::new(x, y, 0.0)).1;
        let (a, b) = (dy(0.0), dy(1.0));
        if a * b < 0.0 {
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if (dy(mid) < 0.0) == (a < 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            push_unique(&mut points, Point { x, y: 0.5 * (lo + hi) }, true);
        } else if a == 0.0 && b == 0.0 {
            diagnostics.push(format!("edge x = {x} is a continuum of equilibria"));
        }
    }

    let g = |x: f64, y: f64| advantages(p, &GameState::new(x, y, 0.0));
    let coupled = p.coupling_lambda * p.esdg.delta * p.consumer.info_total() != 0.0;
    if !coupled {
        if delta_manufacturer(p) == 0.0 {
            diagnostics.push("manufacturer difference vanishes identically: the zero set of the consumer difference is a continuum of equilibria".into());
        }
        return Equilibria { points, diagnostics };
    }

    let mut found = 0;
    for (sx, sy) in seeds() {
        if let Some((x, y)) = newton(g, sx, sy) {
            found += 1;
            let inside = x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0;
            push_unique(&mut points, Point { x, y }, inside);
        }
    }
    if found == 0 {
        diagnostics.push("Newton iteration did not converge from any interior seed".into());
    }
    Equilibria { points, diagnostics }
}

pub fn report(p: &ModelParams, point: Point, in_domain: bool, mode: Mode) -> Result<EquilibriumReport> {
    let jacobian = match mode {
        Mode::Paper if p.feedback => jacobian_paper_feedback(p, point),
        Mode::Paper => jacobian_paper_no_feedback(p, point),
        Mode::Numeric => jacobian_numeric(p, point)?,
    };
    let eigenvalues = eigenvalues(&jacobian);
    Ok(EquilibriumReport {
        point,
        det: det(&jacobian),
        trace: trace(&jacobian),
        classification: classify_eigenvalues(&eigenvalues),
        jacobian,
        eigenvalues,
        mode,
        in_domain,
    })
}

/// One report per equilibrium, in [`enumerate_equilibria`] order.
pub fn classify(p: &ModelParams, mode: Mode) -> Result<Vec<EquilibriumReport>> {
    enumerate_equilibria(p)
        .points
        .into_iter()
        .map(|(pt, inside)| report(p, pt, inside, mode))
        .collect()
}
