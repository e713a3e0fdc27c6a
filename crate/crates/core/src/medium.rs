//! Layered media and the discrete light paths that cross them.
//!
//! A medium is a horizontal stack of `M` vertical slabs of equal width `W`,
//! each with its own refractive index. Light travels from a fixed point on
//! the left outer boundary to a fixed point on the right outer boundary,
//! crossing each of the `M - 1` internal interfaces exactly once. A path is
//! therefore described by the integer heights at which it crosses the
//! interfaces, and the optical time is the index-weighted sum of the
//! straight segment lengths between consecutive crossings (with c = 1).

use core::fmt;
use core::str::FromStr;

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Endpoint, Error, Result};

/// Integer heights at which a path crosses the internal interfaces, ordered
/// left to right. This is the state the agent learns over.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InterfaceState(Vec<i32>);

impl InterfaceState {
    pub fn new(ys: Vec<i32>) -> Self {
        InterfaceState(ys)
    }

    pub fn ys(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for InterfaceState {
    /// Renders as `(y1, y2, ...)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, y) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{y}")?;
        }
        write!(f, ")")
    }
}

/// Vertical direction of a single-step move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    /// Signed grid step: up is +1, down is -1.
    pub fn delta(self) -> i32 {
        match self {
            Direction::Up => 1,
            Direction::Down => -1,
        }
    }
}

/// Move one interface crossing up or down by one grid unit.
///
/// Actions are numbered `2 * interface + {0 up, 1 down}`, so a medium with
/// `K` interfaces has actions `0 .. 2K` and the order reads
/// `y1+, y1-, y2+, y2-, ...`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MoveAction {
    pub interface: usize,
    pub direction: Direction,
}

impl MoveAction {
    pub fn from_index(index: usize) -> Self {
        MoveAction {
            interface: index / 2,
            direction: if index.is_multiple_of(2) {
                Direction::Up
            } else {
                Direction::Down
            },
        }
    }

    pub fn index(self) -> usize {
        2 * self.interface
            + match self.direction {
                Direction::Up => 0,
                Direction::Down => 1,
            }
    }
}

impl fmt::Display for MoveAction {
    /// Renders as `y<k>+` or `y<k>-` with 1-based interface numbering.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.direction {
            Direction::Up => '+',
            Direction::Down => '-',
        };
        write!(f, "y{}{}", self.interface + 1, sign)
    }
}

impl FromStr for MoveAction {
    type Err = String;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        let err = || alloc::format!("malformed action {s:?}, expected e.g. \"y1+\"");
        let body = s.strip_prefix('y').ok_or_else(err)?;
        let (num, sign) = body.split_at(body.len().saturating_sub(1));
        let interface: usize = num.parse::<usize>().map_err(|_| err())?;
        if interface == 0 {
            return Err(err());
        }
        let direction = match sign {
            "+" => Direction::Up,
            "-" => Direction::Down,
            _ => return Err(err()),
        };
        Ok(MoveAction {
            interface: interface - 1,
            direction,
        })
    }
}

/// A stack of equal-width vertical slabs with fixed entry and exit points.
///
/// Geometry lives on an integer grid: slab `i` spans `x` in
/// `[i * W, (i + 1) * W]`, interface `i` is the vertical line
/// `x = (i + 1) * W`, and crossing heights range over `0 ..= height`.
#[derive(Debug, Clone, PartialEq)]
pub struct LayeredMedium {
    indices: Vec<f64>,
    slab_width: u32,
    height: u32,
    start: (i32, i32),
    end: (i32, i32),
}

impl LayeredMedium {
    /// Validates and builds a medium.
    ///
    /// `start` must sit on the left outer boundary (`x = 0`) and `end` on the
    /// right outer boundary (`x = M * W`); both y-coordinates must lie in
    /// `[0, height]`. Indices must be finite and positive, and at least two
    /// slabs are required so that the path has something to learn.
    pub fn new(
        indices: Vec<f64>,
        slab_width: u32,
        height: u32,
        start: (i32, i32),
        end: (i32, i32),
    ) -> Result<Self> {
        if indices.len() < 2 {
            return Err(Error::TooFewSlabs {
                count: indices.len(),
            });
        }
        for (position, &value) in indices.iter().enumerate() {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::NonPositiveIndex { position, value });
            }
        }
        if slab_width == 0 {
            return Err(Error::ZeroSlabWidth);
        }
        if height == 0 {
            return Err(Error::ZeroHeight);
        }
        let right = indices.len() as i64 * slab_width as i64;
        for (which, point, expected_x) in [
            (Endpoint::Start, start, 0i64),
            (Endpoint::End, end, right),
        ] {
            if point.0 as i64 != expected_x {
                return Err(Error::EndpointOffBoundary {
                    which,
                    expected_x,
                    actual_x: point.0 as i64,
                });
            }
            if point.1 < 0 || point.1 as i64 > height as i64 {
                return Err(Error::EndpointOutOfRange {
                    which,
                    y: point.1 as i64,
                    height,
                });
            }
        }
        Ok(LayeredMedium {
            indices,
            slab_width,
            height,
            start,
            end,
        })
    }

    pub fn indices(&self) -> &[f64] {
        &self.indices
    }

    pub fn num_slabs(&self) -> usize {
        self.indices.len()
    }

    /// Number of internal interfaces, `M - 1`.
    pub fn num_interfaces(&self) -> usize {
        self.indices.len() - 1
    }

    /// Two actions (up, down) per interface.
    pub fn num_actions(&self) -> usize {
        2 * self.num_interfaces()
    }

    pub fn slab_width(&self) -> u32 {
        self.slab_width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn start(&self) -> (i32, i32) {
        self.start
    }

    pub fn end(&self) -> (i32, i32) {
        self.end
    }

    /// x-coordinate of interface `i` (the right edge of slab `i`).
    pub fn interface_x(&self, i: usize) -> i64 {
        (i as i64 + 1) * self.slab_width as i64
    }

    /// Checks that a state has one in-range coordinate per interface.
    pub fn validate_state(&self, state: &InterfaceState) -> Result<()> {
        if state.len() != self.num_interfaces() {
            return Err(Error::StateLengthMismatch {
                expected: self.num_interfaces(),
                actual: state.len(),
            });
        }
        for (position, &value) in state.ys().iter().enumerate() {
            if value < 0 || value as i64 > self.height as i64 {
                return Err(Error::CoordinateOutOfRange {
                    position,
                    value: value as i64,
                    height: self.height,
                });
            }
        }
        Ok(())
    }

    /// The polyline a state describes: entry point, one crossing per
    /// interface, exit point.
    pub fn crossings(&self, state: &InterfaceState) -> Result<Vec<(f64, f64)>> {
        self.validate_state(state)?;
        let mut points = Vec::with_capacity(state.len() + 2);
        points.push((self.start.0 as f64, self.start.1 as f64));
        for (i, &y) in state.ys().iter().enumerate() {
            points.push((self.interface_x(i) as f64, y as f64));
        }
        points.push((self.end.0 as f64, self.end.1 as f64));
        Ok(points)
    }

    /// Euclidean length of each straight segment along the path, one per slab.
    pub fn segment_lengths(&self, state: &InterfaceState) -> Result<Vec<f64>> {
        self.validate_state(state)?;
        let mut lengths = Vec::with_capacity(self.num_slabs());
        let w = self.slab_width as f64;
        let mut prev_y = self.start.1 as f64;
        for slab in 0..self.num_slabs() {
            let next_y = if slab < self.num_interfaces() {
                state.ys()[slab] as f64
            } else {
                self.end.1 as f64
            };
            lengths.push(libm::hypot(w, next_y - prev_y));
            prev_y = next_y;
        }
        Ok(lengths)
    }

    /// Optical time of a path: sum of `n_i * l_i` over the slabs, with the
    /// speed of light in vacuum set to 1.
    pub fn path_time(&self, state: &InterfaceState) -> Result<f64> {
        let lengths = self.segment_lengths(state)?;
        Ok(lengths
            .iter()
            .zip(&self.indices)
            .map(|(l, n)| l * n)
            .sum())
    }

    /// Optical time with real-valued crossing heights.
    ///
    /// The discrete `path_time` restricted to the integer grid; the oracle
    /// minimizes this over the continuous box `[0, height]^K`.
    ///
    /// # Panics
    ///
    /// Panics if `ys.len()` differs from the number of interfaces.
    pub fn path_time_continuous(&self, ys: &[f64]) -> f64 {
        assert_eq!(
            ys.len(),
            self.num_interfaces(),
            "one crossing height per interface"
        );
        let w = self.slab_width as f64;
        let mut time = 0.0;
        let mut prev_y = self.start.1 as f64;
        for (slab, n) in self.indices.iter().enumerate() {
            let next_y = ys.get(slab).copied().unwrap_or(self.end.1 as f64);
            time += n * libm::hypot(w, next_y - prev_y);
            prev_y = next_y;
        }
        time
    }

    /// Applies a single-step move, clamping at the grid boundary.
    ///
    /// A move that would leave `[0, height]` returns the state unchanged;
    /// the boundary rows are sticky rather than forbidden.
    pub fn apply_action(&self, state: &InterfaceState, action: MoveAction) -> Result<InterfaceState> {
        self.validate_state(state)?;
        if action.interface >= self.num_interfaces() {
            return Err(Error::InterfaceOutOfRange {
                index: action.interface,
                count: self.num_interfaces(),
            });
        }
        let mut ys = state.ys().to_vec();
        let moved = ys[action.interface] + action.direction.delta();
        if moved >= 0 && moved as i64 <= self.height as i64 {
            ys[action.interface] = moved;
        }
        Ok(InterfaceState::new(ys))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    /// The three-slab medium used throughout: n = (1, 1.3, 1.6), 50-wide
    /// slabs, height 50, entry (0, 0), exit (150, 50).
    pub(crate) fn three_slab() -> LayeredMedium {
        LayeredMedium::new(vec![1.0, 1.3, 1.6], 50, 50, (0, 0), (150, 50)).unwrap()
    }

    #[test]
    fn straight_segments_have_plain_lengths() {
        let medium = three_slab();
        let lengths = medium.segment_lengths(&InterfaceState::new(vec![0, 0])).unwrap();
        assert_eq!(lengths.len(), 3);
        assert!((lengths[0] - 50.0).abs() < 1e-12);
        assert!((lengths[1] - 50.0).abs() < 1e-12);
        // Last segment rises 50 over 50: 50 * sqrt(2).
        assert!((lengths[2] - 70.71067811865476).abs() < 1e-12);
    }

    #[test]
    fn segment_lengths_at_the_optimum() {
        let medium = three_slab();
        let lengths = medium.segment_lengths(&InterfaceState::new(vec![21, 37])).unwrap();
        assert!((lengths[0] - 54.230987451824994).abs() < 1e-12);
        assert!((lengths[1] - 52.49761899362675).abs() < 1e-12);
        assert!((lengths[2] - 51.66236541235796).abs() < 1e-12);
    }

    #[test]
    fn path_time_weights_lengths_by_index() {
        let medium = three_slab();
        let t = medium.path_time(&InterfaceState::new(vec![0, 0])).unwrap();
        // 50 * 1 + 50 * 1.3 + 50 * sqrt(2) * 1.6
        assert!((t - 228.1370849898476).abs() < 1e-12);
        let t_opt = medium.path_time(&InterfaceState::new(vec![21, 37])).unwrap();
        assert!((t_opt - 205.1376768033125).abs() < 1e-12);
    }

    #[test]
    fn continuous_time_matches_discrete_on_grid_points() {
        let medium = three_slab();
        for ys in [[0, 0], [21, 37], [50, 50], [13, 44]] {
            let discrete = medium
                .path_time(&InterfaceState::new(ys.to_vec()))
                .unwrap();
            let continuous = medium.path_time_continuous(&[ys[0] as f64, ys[1] as f64]);
            assert!((discrete - continuous).abs() < 1e-12);
        }
    }

    #[test]
    fn apply_action_moves_one_coordinate() {
        let medium = three_slab();
        let s = InterfaceState::new(vec![10, 20]);
        let up = medium
            .apply_action(&s, MoveAction::from_index(0))
            .unwrap();
        assert_eq!(up.ys(), &[11, 20]);
        let down = medium
            .apply_action(&s, MoveAction::from_index(3))
            .unwrap();
        assert_eq!(down.ys(), &[10, 19]);
    }

    #[test]
    fn apply_action_clamps_at_boundaries() {
        let medium = three_slab();
        let floor = InterfaceState::new(vec![0, 20]);
        let clamped = medium
            .apply_action(&floor, MoveAction::from_index(1))
            .unwrap();
        assert_eq!(clamped, floor);
        let ceiling = InterfaceState::new(vec![10, 50]);
        let clamped = medium
            .apply_action(&ceiling, MoveAction::from_index(2))
            .unwrap();
        assert_eq!(clamped, ceiling);
    }

    #[test]
    fn action_indexing_round_trips() {
        for index in 0..6 {
            assert_eq!(MoveAction::from_index(index).index(), index);
        }
        assert_eq!(MoveAction::from_index(0).interface, 0);
        assert_eq!(MoveAction::from_index(0).direction, Direction::Up);
        assert_eq!(MoveAction::from_index(3).interface, 1);
        assert_eq!(MoveAction::from_index(3).direction, Direction::Down);
    }

    #[test]
    fn action_display_round_trips() {
        for index in 0..8 {
            let action = MoveAction::from_index(index);
            let text = alloc::format!("{action}");
            assert_eq!(text.parse::<MoveAction>().unwrap(), action);
        }
        assert_eq!(alloc::format!("{}", MoveAction::from_index(0)), "y1+");
        assert_eq!(alloc::format!("{}", MoveAction::from_index(3)), "y2-");
        assert!("z1+".parse::<MoveAction>().is_err());
        assert!("y0+".parse::<MoveAction>().is_err());
        assert!("y1*".parse::<MoveAction>().is_err());
        assert!("y+".parse::<MoveAction>().is_err());
    }

    #[test]
    fn construction_rejects_bad_geometry() {
        assert!(matches!(
            LayeredMedium::new(vec![1.0], 50, 50, (0, 0), (50, 50)),
            Err(Error::TooFewSlabs { count: 1 })
        ));
        assert!(matches!(
            LayeredMedium::new(vec![1.0, -1.0], 50, 50, (0, 0), (100, 50)),
            Err(Error::NonPositiveIndex { position: 1, .. })
        ));
        assert!(matches!(
            LayeredMedium::new(vec![1.0, f64::NAN], 50, 50, (0, 0), (100, 50)),
            Err(Error::NonPositiveIndex { position: 1, .. })
        ));
        assert!(matches!(
            LayeredMedium::new(vec![1.0, 1.5], 0, 50, (0, 0), (0, 50)),
            Err(Error::ZeroSlabWidth)
        ));
        assert!(matches!(
            LayeredMedium::new(vec![1.0, 1.5], 50, 0, (0, 0), (100, 0)),
            Err(Error::ZeroHeight)
        ));
        assert!(matches!(
            LayeredMedium::new(vec![1.0, 1.5], 50, 50, (1, 0), (100, 50)),
            Err(Error::EndpointOffBoundary {
                which: Endpoint::Start,
                ..
            })
        ));
        assert!(matches!(
            LayeredMedium::new(vec![1.0, 1.5], 50, 50, (0, 0), (90, 50)),
            Err(Error::EndpointOffBoundary {
                which: Endpoint::End,
                ..
            })
        ));
        assert!(matches!(
            LayeredMedium::new(vec![1.0, 1.5], 50, 50, (0, 51), (100, 50)),
            Err(Error::EndpointOutOfRange {
                which: Endpoint::Start,
                ..
            })
        ));
    }

    #[test]
    fn state_validation_names_the_offender() {
        let medium = three_slab();
        assert!(matches!(
            medium.validate_state(&InterfaceState::new(vec![1, 2, 3])),
            Err(Error::StateLengthMismatch {
                expected: 2,
                actual: 3
            })
        ));
        assert!(matches!(
            medium.validate_state(&InterfaceState::new(vec![1, 51])),
            Err(Error::CoordinateOutOfRange {
                position: 1,
                value: 51,
                ..
            })
        ));
        assert!(matches!(
            medium.validate_state(&InterfaceState::new(vec![-1, 0])),
            Err(Error::CoordinateOutOfRange {
                position: 0,
                value: -1,
                ..
            })
        ));
    }

    #[test]
    fn crossings_include_both_endpoints() {
        let medium = three_slab();
        let points = medium
            .crossings(&InterfaceState::new(vec![21, 37]))
            .unwrap();
        assert_eq!(
            points,
            vec![(0.0, 0.0), (50.0, 21.0), (100.0, 37.0), (150.0, 50.0)]
        );
    }

    #[test]
    fn state_display_is_a_tuple() {
        let s = InterfaceState::new(vec![21, 37]);
        assert_eq!(alloc::format!("{s}"), "(21, 37)");
    }
}
