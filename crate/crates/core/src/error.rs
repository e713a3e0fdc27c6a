use core::fmt;

use alloc::vec::Vec;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Which path endpoint an error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Start,
    End,
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Start => write!(f, "start"),
            Endpoint::End => write!(f, "end"),
        }
    }
}

/// Errors produced by geometry construction, training configuration, and the
/// oracle solvers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A medium needs at least two slabs so that one interface exists.
    TooFewSlabs { count: usize },
    /// Refractive indices must be finite and strictly positive.
    NonPositiveIndex { position: usize, value: f64 },
    /// Slab width must be a positive number of grid units.
    ZeroSlabWidth,
    /// Grid height must be a positive number of grid units.
    ZeroHeight,
    /// Endpoints are pinned to the outer slab boundaries.
    EndpointOffBoundary {
        which: Endpoint,
        expected_x: i64,
        actual_x: i64,
    },
    /// Endpoint y-coordinate outside [0, height].
    EndpointOutOfRange {
        which: Endpoint,
        y: i64,
        height: u32,
    },
    /// State has the wrong number of interface coordinates for the medium.
    StateLengthMismatch { expected: usize, actual: usize },
    /// A state coordinate lies outside [0, height].
    CoordinateOutOfRange {
        position: usize,
        value: i64,
        height: u32,
    },
    /// An action names an interface the medium does not have.
    InterfaceOutOfRange { index: usize, count: usize },
    /// Reward scale factors must be finite and strictly positive.
    NonPositiveScale { value: f64 },
    /// A hyperparameter failed validation; `field` names it.
    InvalidHyperparameter { field: &'static str, value: f64 },
    /// The exhaustive scan refuses state spaces larger than its cap.
    StateSpaceTooLarge { states: u128, cap: u64 },
    /// The continuous minimizer hit its sweep cap; carries the best iterate.
    NoConvergence {
        ys: Vec<f64>,
        time: f64,
        snell_residual: f64,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::TooFewSlabs { count } => {
                write!(f, "need at least 2 slabs, got {count}")
            }
            Error::NonPositiveIndex { position, value } => {
                write!(
                    f,
                    "refractive index at position {position} must be finite and > 0, got {value}"
                )
            }
            Error::ZeroSlabWidth => write!(f, "slab width must be positive"),
            Error::ZeroHeight => write!(f, "grid height must be positive"),
            Error::EndpointOffBoundary {
                which,
                expected_x,
                actual_x,
            } => write!(
                f,
                "{which} point must sit on the outer boundary x = {expected_x}, got x = {actual_x}"
            ),
            Error::EndpointOutOfRange { which, y, height } => {
                write!(f, "{which} point y = {y} outside [0, {height}]")
            }
            Error::StateLengthMismatch { expected, actual } => {
                write!(
                    f,
                    "state has {actual} coordinates but the medium has {expected} interfaces"
                )
            }
            Error::CoordinateOutOfRange {
                position,
                value,
                height,
            } => write!(
                f,
                "state coordinate {position} is {value}, outside [0, {height}]"
            ),
            Error::InterfaceOutOfRange { index, count } => {
                write!(f, "action targets interface {index} but only {count} exist")
            }
            Error::NonPositiveScale { value } => {
                write!(f, "reward scale must be finite and > 0, got {value}")
            }
            Error::InvalidHyperparameter { field, value } => {
                write!(f, "{field} = {value} is out of range")
            }
            Error::StateSpaceTooLarge { states, cap } => {
                write!(
                    f,
                    "state space has {states} states, above the exhaustive-scan cap of {cap}"
                )
            }
            Error::NoConvergence {
                time,
                snell_residual,
                ..
            } => write!(
                f,
                "continuous minimizer did not converge (best T = {time}, residual = {snell_residual})"
            ),
        }
    }
}

impl core::error::Error for Error {}
