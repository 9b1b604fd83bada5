//! Maximization over the stationary exit probability `alpha` in `[0, 1]`.
//!
//! Polynomials are handled by calculus: the candidates are both endpoints
//! and every root of the derivative inside `(0, 1)`. Derivatives of degree
//! at most two are solved in closed form; higher degrees are isolated by
//! bisection on sign changes over a fixed partition. Arbitrary objectives go
//! through [`numeric_maximize`], a grid-seeded golden-section search.
//!
//! Ties resolve to the smallest `alpha`.

use std::fmt;

use crate::classical::{stationary_payoff_polynomial, PayoffPolynomial};
use crate::error::{Error, Result};
use crate::model::DriveProblem;

const ROOT_SEGMENTS: usize = 1000;
const GRID_POINTS: usize = 1001;
/// Candidates within this (relative) distance of the best value count as ties.
const TIE_TOLERANCE: f64 = 1e-12;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Numeric,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ClosedForm => "closed_form",
            Method::Numeric => "numeric",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizationResult {
    pub alpha_star: f64,
    pub payoff_star: f64,
    pub method: Method,
}

/// Picks the best `(alpha, value)` pair, preferring the smallest `alpha`
/// among near-ties.
fn best_candidate(candidates: impl IntoIterator<Item = (f64, f64)>) -> (f64, f64) {
    let mut all: Vec<(f64, f64)> = candidates.into_iter().collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    let top = all.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
    let slack = TIE_TOLERANCE * top.abs().max(1.0);
    *all.iter().find(|c| c.1 >= top - slack).expect("at least one candidate")
}

/// Real roots of `c0 + c1 x + c2 x^2` (trailing zero coefficients allowed).
fn quadratic_roots(c0: f64, c1: f64, c2: f64) -> Vec<f64> {
    if c2 == 0.0 {
        if c1 == 0.0 {
            return Vec::new();
        }
        return vec![-c0 / c1];
    }
    let disc = c1 * c1 - 4.0 * c2 * c0;
    if disc < 0.0 {
        return Vec::new();
    }
    // Avoids cancellation between -c1 and sqrt(disc).
    let sign = if c1 >= 0.0 { 1.0 } else { -1.0 };
    let q = -0.5 * (c1 + sign * disc.sqrt());
    let mut roots = vec![q / c2];
    if q != 0.0 {
        roots.push(c0 / q);
    }
    roots
}

fn bisect_root(p: &PayoffPolynomial, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = p.eval(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = p.eval(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Roots of `p` inside `(0, 1)` found by bisection on sign changes over
/// a 1000-segment partition.
fn isolated_roots(p: &PayoffPolynomial) -> Vec<f64> {
    let mut roots = Vec::new();
    let xs: Vec<f64> = (0..=ROOT_SEGMENTS).map(|i| i as f64 / ROOT_SEGMENTS as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| p.eval(x)).collect();
    for i in 0..ROOT_SEGMENTS {
        if ys[i] == 0.0 {
            roots.push(xs[i]);
        } else if ys[i + 1] != 0.0 && (ys[i] < 0.0) != (ys[i + 1] < 0.0) {
            roots.push(bisect_root(p, xs[i], xs[i + 1]));
        }
    }
    roots
}

/// Global maximum of a polynomial over `[0, 1]`.
pub fn maximize_polynomial(poly: &PayoffPolynomial) -> OptimizationResult {
    let degree = poly.degree();
    let derivative = poly.derivative();
    let (roots, method) = if degree <= 3 {
        let c = |j: usize| derivative.coeffs().get(j).copied().unwrap_or(0.0);
        let roots = if degree == 0 { Vec::new() } else { quadratic_roots(c(0), c(1), c(2)) };
        (roots, Method::ClosedForm)
    } else {
        (isolated_roots(&derivative), Method::Numeric)
    };

    let candidates = [0.0, 1.0]
        .into_iter()
        .chain(roots.into_iter().filter(|r| r.is_finite() && *r > 0.0 && *r < 1.0))
        .map(|a| (a, poly.eval(a)));
    let (alpha_star, payoff_star) = best_candidate(candidates);
    OptimizationResult { alpha_star, payoff_star, method }
}

/// Best stationary strategy for a highway problem.
pub fn optimize_stationary(problem: &DriveProblem) -> OptimizationResult {
    maximize_polynomial(&stationary_payoff_polynomial(problem))
}

/// Maximizes an arbitrary objective on `[0, 1]`.
///
/// A 1001-point grid picks the starting bracket so multimodal objectives do
/// not trap the search in a local maximum. Golden-section search narrows
/// the bracket to `tolerance`, then one parabolic step through nearby points
/// polishes the estimate past the `sqrt(eps)` limit of comparison-only
/// search. The grid maximum is kept if nothing beats it.
pub fn numeric_maximize<F>(f: F, tolerance: f64) -> Result<OptimizationResult>
where
    F: Fn(f64) -> f64,
{
    if !(tolerance > 0.0) {
        return Err(Error::InvalidTolerance(tolerance));
    }
    let eval = |x: f64| -> Result<f64> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Objective { alpha: x, value: v })
        }
    };

    let step = 1.0 / (GRID_POINTS - 1) as f64;
    let grid = (0..GRID_POINTS)
        .map(|i| {
            let x = i as f64 * step;
            eval(x).map(|v| (x, v))
        })
        .collect::<Result<Vec<_>>>()?;
    let (grid_alpha, grid_value) = best_candidate(grid.iter().copied());

    let mut lo = (grid_alpha - step).max(0.0);
    let mut hi = (grid_alpha + step).min(1.0);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    while hi - lo > tolerance {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = eval(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = eval(x2)?;
        }
        if hi - lo <= f64::EPSILON {
            break;
        }
    }
    let golden = if f1 >= f2 { (x1, f1) } else { (x2, f2) };

    // Preference order on exact ties: polished vertex, grid point, golden point.
    let polished = parabolic_step(&eval, golden.0, step * 0.1)?;
    let (alpha_star, payoff_star) = polished
        .into_iter()
        .chain([(grid_alpha, grid_value), golden])
        .reduce(|best, c| if c.1 > best.1 { c } else { best })
        .expect("grid is never empty");
    Ok(OptimizationResult { alpha_star, payoff_star, method: Method::Numeric })
}

/// Vertex of the parabola through `x - h`, `x`, `x + h`, if it is a
/// maximum inside `[0, 1]` and within `h` of `x`.
fn parabolic_step<E>(eval: &E, x: f64, h: f64) -> Result<Option<(f64, f64)>>
where
    E: Fn(f64) -> Result<f64>,
{
    let x = x.clamp(h, 1.0 - h);
    let (fl, fm, fr) = (eval(x - h)?, eval(x)?, eval(x + h)?);
    let curvature = fl - 2.0 * fm + fr;
    if !(curvature < 0.0) {
        return Ok(None);
    }
    let offset = 0.5 * h * (fl - fr) / curvature;
    if !offset.is_finite() || offset.abs() > h {
        return Ok(None);
    }
    let vertex = (x + offset).clamp(0.0, 1.0);
    Ok(Some((vertex, eval(vertex)?)))
}
