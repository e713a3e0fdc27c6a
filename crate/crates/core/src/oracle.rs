//! Ground-truth solvers the agent is judged against.
//!
//! Two independent answers to "what is the least-time path":
//!
//! * [`brute_force_optimum`] scans every integer state exhaustively, so it
//!   is exact on the grid but limited to small state spaces.
//! * [`fermat_continuous`] minimizes the optical time over real-valued
//!   crossing heights. The time is strictly convex in the heights, so
//!   coordinate descent converges to the unique constrained minimum, where
//!   Snell's law `n_i sin(theta_i) = n_(i+1) sin(theta_(i+1))` holds at
//!   every interior interface.
//!
//! [`snell_residual`] measures how far a real-valued path is from
//! stationarity and doubles as the convergence certificate for the
//! continuous solver.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::medium::{InterfaceState, LayeredMedium};

/// Largest state count [`brute_force_optimum`] will scan.
pub const EXHAUSTIVE_SCAN_CAP: u64 = 10_000_000;

/// Convergence tolerance on per-sweep time improvement used by default.
pub const DEFAULT_FERMAT_TOL: f64 = 1e-10;

/// Stationarity target: sweeps continue until the largest Snell mismatch
/// (measured at interior coordinates) falls below this.
const STATIONARITY_TOL: f64 = 1e-10;

/// Coordinate-descent sweep cap; convexity makes hitting it pathological.
const MAX_SWEEPS: u32 = 10_000;

/// Width at which the golden-section stage hands over to the sign bisection.
const GOLDEN_TOL: f64 = 1e-6;

/// The least-time integer state and its optical time.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteOptimum {
    pub state: InterfaceState,
    pub time: f64,
}

/// The least-time real-valued crossing heights, their optical time, and the
/// largest Snell mismatch across interfaces.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousOptimum {
    pub ys: Vec<f64>,
    pub time: f64,
    pub snell_residual: f64,
}

impl ContinuousOptimum {
    /// Nearest integer state, for comparison with the discrete solvers.
    pub fn rounded_state(&self) -> InterfaceState {
        InterfaceState::new(self.ys.iter().map(|&y| libm::round(y) as i32).collect())
    }
}

/// Scans every integer state and returns the least-time one.
///
/// Ties are broken toward the lexicographically smallest state. Refuses to
/// scan more than [`EXHAUSTIVE_SCAN_CAP`] states.
pub fn brute_force_optimum(medium: &LayeredMedium) -> Result<DiscreteOptimum> {
    brute_force_optimum_capped(medium, EXHAUSTIVE_SCAN_CAP)
}

/// [`brute_force_optimum`] with an explicit state-count cap.
pub fn brute_force_optimum_capped(medium: &LayeredMedium, cap: u64) -> Result<DiscreteOptimum> {
    let interfaces = medium.num_interfaces();
    let per_coordinate = medium.height() as u128 + 1;
    let states = per_coordinate
        .checked_pow(interfaces as u32)
        .filter(|&states| states <= cap as u128)
        .ok_or(Error::StateSpaceTooLarge {
            states: per_coordinate.saturating_pow(interfaces as u32),
            cap,
        })?;
    debug_assert!(states > 0);

    let height = medium.height() as i32;
    let mut ys = vec![0i32; interfaces];
    let mut scratch = vec![0.0f64; interfaces];
    let mut best_ys = ys.clone();
    let mut best_time = f64::INFINITY;
    loop {
        for (dst, &y) in scratch.iter_mut().zip(&ys) {
            *dst = y as f64;
        }
        let time = medium.path_time_continuous(&scratch);
        // Strict improvement keeps the first minimizer, and ascending
        // lexicographic enumeration makes that the smallest one.
        if time < best_time {
            best_time = time;
            best_ys.copy_from_slice(&ys);
        }
        if !advance(&mut ys, height) {
            break;
        }
    }
    Ok(DiscreteOptimum {
        state: InterfaceState::new(best_ys),
        time: best_time,
    })
}

/// Advances an odometer over `[0, height]^K` in ascending lexicographic
/// order (last coordinate fastest); false once every state has been seen.
fn advance(ys: &mut [i32], height: i32) -> bool {
    for position in (0..ys.len()).rev() {
        if ys[position] < height {
            ys[position] += 1;
            for later in &mut ys[position + 1..] {
                *later = 0;
            }
            return true;
        }
    }
    false
}

/// Minimizes the optical time over real-valued crossing heights in
/// `[0, height]^K` by cyclic coordinate descent.
///
/// Each coordinate is minimized by a golden-section line search, then
/// polished by bisecting the sign change of the one-dimensional derivative
/// (the Snell mismatch at that interface): the golden-section stage alone
/// bottoms out where float noise flattens the time, around 1e-6 in the
/// coordinate, which is not enough for a residual below 1e-9. Sweeps stop
/// once the time improvement drops below `tol` and every coordinate is
/// stationary (zero mismatch in the interior, or pushed against a boundary
/// it cannot improve past).
pub fn fermat_continuous(medium: &LayeredMedium, tol: f64) -> Result<ContinuousOptimum> {
    let interfaces = medium.num_interfaces();
    let height = medium.height() as f64;
    let span = (medium.num_slabs() as u64 * medium.slab_width() as u64) as f64;
    let (start_y, end_y) = (medium.start().1 as f64, medium.end().1 as f64);
    // Deterministic start: the straight chord between the endpoints.
    let mut ys: Vec<f64> = (0..interfaces)
        .map(|i| start_y + (end_y - start_y) * medium.interface_x(i) as f64 / span)
        .collect();
    let mut time = medium.path_time_continuous(&ys);
    for _ in 0..MAX_SWEEPS {
        for j in 0..interfaces {
            minimize_coordinate(medium, &mut ys, j, height);
        }
        let swept = medium.path_time_continuous(&ys);
        let improvement = time - swept;
        time = swept;
        if improvement < tol && stationarity_gap(medium, &ys) < STATIONARITY_TOL {
            return Ok(ContinuousOptimum {
                snell_residual: snell_residual(medium, &ys),
                ys,
                time,
            });
        }
    }
    Err(Error::NoConvergence {
        snell_residual: snell_residual(medium, &ys),
        ys,
        time,
    })
}

/// Largest Snell mismatch `|n_i sin(theta_i) - n_(i+1) sin(theta_(i+1))|`
/// across the interfaces of the path described by `ys`; zero exactly at a
/// stationary (Fermat) path. Sines are signed by the rise direction.
///
/// # Panics
///
/// Panics if `ys.len()` differs from the number of interfaces.
pub fn snell_residual(medium: &LayeredMedium, ys: &[f64]) -> f64 {
    assert_eq!(
        ys.len(),
        medium.num_interfaces(),
        "one crossing height per interface"
    );
    (0..ys.len())
        .map(|j| snell_mismatch(medium, ys, j).abs())
        .fold(0.0, f64::max)
}

/// `n_j sin(theta_j) - n_(j+1) sin(theta_(j+1))` at interface `j`, which is
/// also the partial derivative of the optical time with respect to `ys[j]`.
fn snell_mismatch(medium: &LayeredMedium, ys: &[f64], j: usize) -> f64 {
    let w = medium.slab_width() as f64;
    let n = medium.indices();
    let y_prev = if j == 0 {
        medium.start().1 as f64
    } else {
        ys[j - 1]
    };
    let y_next = if j + 1 == ys.len() {
        medium.end().1 as f64
    } else {
        ys[j + 1]
    };
    let rise_in = ys[j] - y_prev;
    let rise_out = y_next - ys[j];
    n[j] * rise_in / libm::hypot(w, rise_in) - n[j + 1] * rise_out / libm::hypot(w, rise_out)
}

/// How far the iterate is from the constrained stationarity conditions:
/// interior coordinates need zero mismatch, boundary coordinates only need
/// the derivative pointing out of the box.
fn stationarity_gap(medium: &LayeredMedium, ys: &[f64]) -> f64 {
    let height = medium.height() as f64;
    (0..ys.len())
        .map(|j| {
            let g = snell_mismatch(medium, ys, j);
            if ys[j] <= 0.0 {
                (-g).max(0.0)
            } else if ys[j] >= height {
                g.max(0.0)
            } else {
                g.abs()
            }
        })
        .fold(0.0, f64::max)
}

/// Exact line minimization of the time along coordinate `j` over
/// `[0, height]`, writing the minimizer into `ys[j]`.
fn minimize_coordinate(medium: &LayeredMedium, ys: &mut [f64], j: usize, height: f64) {
    // Derivative-free stage: golden-section down to a narrow bracket.
    let mut lo = 0.0f64;
    let mut hi = height;
    const INV_PHI: f64 = 0.618_033_988_749_894_8; // (sqrt(5) - 1) / 2
    let evaluate = |y: f64, ys: &mut [f64]| {
        ys[j] = y;
        medium.path_time_continuous(ys)
    };
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = evaluate(c, ys);
    let mut fd = evaluate(d, ys);
    while hi - lo > GOLDEN_TOL {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = evaluate(c, ys);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = evaluate(d, ys);
        }
    }
    let coarse = 0.5 * (lo + hi);

    // Stationarity polish: the 1-d derivative is the Snell mismatch at this
    // interface and increases strictly in ys[j] (convexity), so bisect its
    // sign change to machine precision. Pad the golden bracket well past the
    // float-noise basin; fall back to the full interval if the minimizer
    // moved further than that.
    let pad = 1e-3 * (1.0 + height);
    let mut lo = (coarse - pad).max(0.0);
    let mut hi = (coarse + pad).min(height);
    let slope_at = |y: f64, ys: &mut [f64]| {
        ys[j] = y;
        snell_mismatch(medium, ys, j)
    };
    if slope_at(lo, ys) >= 0.0 {
        lo = 0.0;
        if slope_at(lo, ys) >= 0.0 {
            ys[j] = 0.0;
            return;
        }
    }
    if slope_at(hi, ys) <= 0.0 {
        hi = height;
        if slope_at(hi, ys) <= 0.0 {
            ys[j] = height;
            return;
        }
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            ys[j] = mid;
            return;
        }
        if slope_at(mid, ys) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}
