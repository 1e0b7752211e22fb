//! Limited-memory BFGS with a strong-Wolfe line search.

use std::collections::VecDeque;

const C1: f64 = 1e-4;
const C2: f64 = 0.9;
const MAX_BRACKET_STEPS: usize = 20;
const MAX_ZOOM_STEPS: usize = 30;

#[derive(Debug, Clone, Copy)]
pub struct LbfgsParams {
    pub memory: usize,
    pub max_iterations: usize,
    /// Stop when `|f_prev - f| / max(|f|, 1e-10)` drops below this.
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    MaxIterations,
    Converged,
    /// The gradient vanished.
    Stationary,
    /// No step along the search direction decreased the objective.
    LineSearchStalled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Iterate {
    pub objective: f64,
    pub gradient_norm: f64,
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub initial: Iterate,
    pub history: Vec<Iterate>,
    pub stop: StopReason,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NonFiniteObjective;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

struct Point {
    alpha: f64,
    x: Vec<f64>,
    f: f64,
    g: Vec<f64>,
    dphi: f64,
}

/// Minimizes `eval`, which returns the objective and its gradient.
///
/// Every accepted step satisfies the sufficient-decrease condition, so the
/// recorded objectives never increase.
pub fn minimize<F>(
    mut eval: F,
    x0: Vec<f64>,
    params: LbfgsParams,
) -> Result<Minimum, NonFiniteObjective>
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let mut x = x0;
    let (mut f, mut g) = eval(&x);
    if !f.is_finite() {
        return Err(NonFiniteObjective);
    }
    let initial = Iterate {
        objective: f,
        gradient_norm: norm(&g),
    };
    let mut history = Vec::new();
    let mut memory: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(params.memory);

    if params.max_iterations == 0 {
        return Ok(Minimum {
            x,
            initial,
            history,
            stop: StopReason::MaxIterations,
        });
    }

    let mut stop = StopReason::MaxIterations;
    for _ in 0..params.max_iterations {
        let gnorm = norm(&g);
        if gnorm <= 1e-12 * norm(&x).max(1.0) {
            stop = StopReason::Stationary;
            break;
        }

        let mut d = direction(&g, &memory);
        let mut alpha0 = if memory.is_empty() { 1.0 / gnorm } else { 1.0 };
        if dot(&g, &d) >= 0.0 {
            memory.clear();
            d = g.iter().map(|v| -v).collect();
            alpha0 = 1.0 / gnorm;
        }

        let Some(next) = line_search(&mut eval, &x, f, &g, &d, alpha0)? else {
            stop = StopReason::LineSearchStalled;
            break;
        };

        let s: Vec<f64> = next.x.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = next.g.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-10 * norm(&s) * norm(&y) && sy > 0.0 {
            if memory.len() == params.memory {
                memory.pop_front();
            }
            if params.memory > 0 {
                memory.push_back((s, y, 1.0 / sy));
            }
        }

        let previous = f;
        x = next.x;
        f = next.f;
        g = next.g;
        history.push(Iterate {
            objective: f,
            gradient_norm: norm(&g),
        });

        if (previous - f).abs() / f.abs().max(1e-10) < params.tolerance {
            stop = StopReason::Converged;
            break;
        }
    }

    Ok(Minimum {
        x,
        initial,
        history,
        stop,
    })
}

/// Two-loop recursion: `-H g` with the stored curvature pairs.
fn direction(g: &[f64], memory: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q: Vec<f64> = g.iter().map(|v| -v).collect();
    let mut alphas = Vec::with_capacity(memory.len());
    for (s, y, rho) in memory.iter().rev() {
        let a = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    if let Some((s, y, _)) = memory.back() {
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|v| *v *= gamma);
    }
    for ((s, y, rho), a) in memory.iter().zip(alphas.into_iter().rev()) {
        let b = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += (a - b) * si;
        }
    }
    q
}

/// Minimizer of the cubic interpolating two points with derivatives,
/// safeguarded into the interior of the bracket.
fn interpolate(lo: (f64, f64, f64), hi: (f64, f64, f64)) -> f64 {
    let (a, fa, da) = lo;
    let (b, fb, db) = hi;
    let (left, right) = if a < b { (a, b) } else { (b, a) };
    let width = right - left;
    let fallback = 0.5 * (a + b);
    if !(fa.is_finite() && fb.is_finite() && da.is_finite() && db.is_finite()) {
        return fallback;
    }
    let d1 = da + db - 3.0 * (fa - fb) / (a - b);
    let disc = d1 * d1 - da * db;
    if disc < 0.0 {
        return fallback;
    }
    let d2 = (b - a).signum() * disc.sqrt();
    let t = b - (b - a) * (db + d2 - d1) / (db - da + 2.0 * d2);
    if !t.is_finite() || t < left + 0.1 * width || t > right - 0.1 * width {
        fallback
    } else {
        t
    }
}

fn line_search<F>(
    eval: &mut F,
    x: &[f64],
    f0: f64,
    g0: &[f64],
    d: &[f64],
    alpha0: f64,
) -> Result<Option<Point>, NonFiniteObjective>
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let dphi0 = dot(g0, d);
    let mut saw_non_finite = false;
    let mut probe = |alpha: f64, saw_non_finite: &mut bool| -> Point {
        let xa: Vec<f64> = x.iter().zip(d).map(|(xi, di)| xi + alpha * di).collect();
        let (f, g) = eval(&xa);
        if !f.is_finite() {
            *saw_non_finite = true;
        }
        let dphi = dot(&g, d);
        Point {
            alpha,
            x: xa,
            f,
            g,
            dphi,
        }
    };
    let armijo = |p: &Point| p.f.is_finite() && p.f <= f0 + C1 * p.alpha * dphi0;
    let curvature = |p: &Point| p.dphi.abs() <= -C2 * dphi0;

    let mut prev: Option<Point> = None;
    let mut alpha = alpha0;
    let mut bracket = None;
    for i in 0..MAX_BRACKET_STEPS {
        let p = probe(alpha, &mut saw_non_finite);
        let prev_f = prev.as_ref().map_or(f0, |q| q.f);
        if !armijo(&p) || (i > 0 && p.f >= prev_f) {
            bracket = Some((prev.take(), Some(p)));
            break;
        }
        if curvature(&p) {
            return Ok(Some(p));
        }
        if p.dphi >= 0.0 {
            bracket = Some((Some(p), prev.take()));
            break;
        }
        alpha *= 2.0;
        prev = Some(p);
    }

    let (mut lo, hi) = match bracket {
        Some(b) => b,
        // the step kept growing while decreasing; accept the last one
        None => return Ok(prev),
    };
    // `None` stands for alpha = 0, the starting point
    let point_of = |p: &Option<Point>| match p {
        Some(p) => (p.alpha, p.f, p.dphi),
        None => (0.0, f0, dphi0),
    };
    let mut hi = hi;
    for _ in 0..MAX_ZOOM_STEPS {
        let alpha = interpolate(point_of(&lo), point_of(&hi));
        let lo_f = point_of(&lo).1;
        let p = probe(alpha, &mut saw_non_finite);
        if !armijo(&p) || p.f >= lo_f {
            hi = Some(p);
        } else {
            if curvature(&p) {
                return Ok(Some(p));
            }
            let (lo_alpha, _, _) = point_of(&lo);
            if p.dphi * (point_of(&hi).0 - lo_alpha) >= 0.0 {
                hi = lo;
            }
            lo = Some(p);
        }
        if (point_of(&hi).0 - point_of(&lo).0).abs() <= f64::EPSILON * point_of(&lo).0.abs() {
            break;
        }
    }

    match lo {
        // sufficient decrease without curvature; still a descent step
        Some(p) => Ok(Some(p)),
        None if saw_non_finite => Err(NonFiniteObjective),
        None => Ok(None),
    }
}
