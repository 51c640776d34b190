//! Adaptive Simpson quadrature in one and two dimensions.
//!
//! Each panel is compared against its two halves; the difference drives both
//! the acceptance test and a Richardson correction of the accepted value.
//! Two-dimensional integrals over rectangles are nested: the outer rule
//! integrates an inner adaptive integral run at a tighter tolerance.

use core::cell::Cell;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum QuadError {
    #[error("relative tolerance {0} must be positive and finite")]
    InvalidTolerance(f64),
    #[error("no convergence within {max_depth} bisections (estimate {estimate})")]
    NonConvergence { max_depth: u32, estimate: f64 },
    #[error("integrand returned a non-finite value at {at}")]
    NonFinite { at: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    /// Target error relative to the magnitude of the integral.
    pub rel_tol: f64,
    /// Bisection depth at which a panel that still fails the test is an error.
    pub max_depth: u32,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            max_depth: 40,
        }
    }
}

impl QuadOptions {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

// Panels shallower than this are always split, so a lucky match on the first
// coarse panels cannot end the refinement.
const MIN_DEPTH: u32 = 1;
const SEED_PANELS: usize = 16;

#[derive(Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    f_lo: f64,
    f_mid: f64,
    f_hi: f64,
    whole: f64,
}

fn simpson(lo: f64, hi: f64, f_lo: f64, f_mid: f64, f_hi: f64) -> f64 {
    (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi)
}

fn eval<F: FnMut(f64) -> f64>(f: &mut F, x: f64) -> Result<f64, QuadError> {
    let y = f(x);
    if y.is_finite() {
        Ok(y)
    } else {
        Err(QuadError::NonFinite { at: x })
    }
}

fn refine<F: FnMut(f64) -> f64>(
    f: &mut F,
    p: Panel,
    tol: f64,
    depth: u32,
    opts: &QuadOptions,
) -> Result<f64, QuadError> {
    let mid = 0.5 * (p.lo + p.hi);
    let f_lm = eval(f, 0.5 * (p.lo + mid))?;
    let f_rm = eval(f, 0.5 * (mid + p.hi))?;
    let left = simpson(p.lo, mid, p.f_lo, f_lm, p.f_mid);
    let right = simpson(mid, p.hi, p.f_mid, f_rm, p.f_hi);
    let delta = left + right - p.whole;

    if depth >= MIN_DEPTH && delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth >= opts.max_depth {
        return Err(QuadError::NonConvergence {
            max_depth: opts.max_depth,
            estimate: left + right,
        });
    }
    let l = refine(
        f,
        Panel {
            lo: p.lo,
            hi: mid,
            f_lo: p.f_lo,
            f_mid: f_lm,
            f_hi: p.f_mid,
            whole: left,
        },
        0.5 * tol,
        depth + 1,
        opts,
    )?;
    let r = refine(
        f,
        Panel {
            lo: mid,
            hi: p.hi,
            f_lo: p.f_mid,
            f_mid: f_rm,
            f_hi: p.f_hi,
            whole: right,
        },
        0.5 * tol,
        depth + 1,
        opts,
    )?;
    Ok(l + r)
}

/// Integrates `f` over `[lo, hi]` to the relative tolerance in `opts`.
///
/// The absolute target is derived from a 16-panel composite Simpson estimate;
/// an integral that is exactly zero on that grid falls back to `rel_tol` as an
/// absolute tolerance.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    opts: &QuadOptions,
) -> Result<f64, QuadError> {
    if !(opts.rel_tol > 0.0 && opts.rel_tol.is_finite()) {
        return Err(QuadError::InvalidTolerance(opts.rel_tol));
    }
    if lo == hi {
        return Ok(0.0);
    }

    let h = (hi - lo) / SEED_PANELS as f64;
    let mut nodes = [0.0; 2 * SEED_PANELS + 1];
    for (k, node) in nodes.iter_mut().enumerate() {
        let x = if k == 2 * SEED_PANELS {
            hi
        } else {
            lo + 0.5 * h * k as f64
        };
        *node = eval(&mut f, x)?;
    }
    let panels = (0..SEED_PANELS).map(|k| {
        let a = lo + h * k as f64;
        let b = if k + 1 == SEED_PANELS {
            hi
        } else {
            lo + h * (k + 1) as f64
        };
        let (fa, fm, fb) = (nodes[2 * k], nodes[2 * k + 1], nodes[2 * k + 2]);
        Panel {
            lo: a,
            hi: b,
            f_lo: fa,
            f_mid: fm,
            f_hi: fb,
            whole: simpson(a, b, fa, fm, fb),
        }
    });

    let coarse: f64 = panels.clone().map(|p| p.whole).sum();
    let scale = if coarse == 0.0 { 1.0 } else { coarse.abs() };
    let tol = opts.rel_tol * scale / SEED_PANELS as f64;

    let mut total = 0.0;
    for p in panels {
        total += refine(&mut f, p, tol, 0, opts)?;
    }
    Ok(total)
}

/// Integrates `f(x, y)` over `[x_lo, x_hi] × [y_lo, y_hi]`.
pub fn integrate_2d<F: Fn(f64, f64) -> f64>(
    f: F,
    (x_lo, x_hi): (f64, f64),
    (y_lo, y_hi): (f64, f64),
    opts: &QuadOptions,
) -> Result<f64, QuadError> {
    let inner_opts = QuadOptions {
        rel_tol: opts.rel_tol * 0.1,
        ..*opts
    };
    let inner_err = Cell::new(None);
    let outer = integrate(
        |x| match integrate(|y| f(x, y), y_lo, y_hi, &inner_opts) {
            Ok(v) => v,
            Err(e) => {
                if inner_err.get().is_none() {
                    inner_err.set(Some(e));
                }
                0.0
            }
        },
        x_lo,
        x_hi,
        opts,
    );
    match inner_err.get() {
        Some(e) => Err(e),
        None => outer,
    }
}
