//! Domain types shared by every engine: state vectors, per-rank grids,
//! pyramid/bridge panels, the rank topology, and the stencil-kernel contract.
//!
//! Conventions fixed here and relied on everywhere else:
//! - Points are stored row-major: index `(y * width + x) * arity`.
//! - `x` grows eastward, `y` grows southward. North is `(cx, cy - 1)`.
//! - Ranks are linearized row-major as `cy * px + cx`.
//! - Sub-steps are counted from 0; all values are IEEE-754 binary64.

use thiserror::Error;

/// Per-grid-point values at one sub-step. Length must equal the kernel's
/// declared arity for the sub-step the vector lives at.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(pub Vec<f64>);

impl StateVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<f64>> for StateVector {
    fn from(values: Vec<f64>) -> Self {
        StateVector(values)
    }
}

/// Cardinal direction of a panel: which side of its producing component it
/// lies on, and equally the direction from producer toward the component
/// that consumes it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    North,
    South,
    West,
    East,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::North,
        Direction::South,
        Direction::West,
        Direction::East,
    ];

    pub fn opposite(self) -> Direction {
        match self {
            Direction::North => Direction::South,
            Direction::South => Direction::North,
            Direction::West => Direction::East,
            Direction::East => Direction::West,
        }
    }

    pub fn code(self) -> u8 {
        match self {
            Direction::North => 0,
            Direction::South => 1,
            Direction::West => 2,
            Direction::East => 3,
        }
    }

    pub fn from_code(code: u8) -> Option<Direction> {
        match code {
            0 => Some(Direction::North),
            1 => Some(Direction::South),
            2 => Some(Direction::West),
            3 => Some(Direction::East),
            _ => None,
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Direction::North => "north",
            Direction::South => "south",
            Direction::West => "west",
            Direction::East => "east",
        };
        f.write_str(s)
    }
}

/// One of the 8 compass neighbors on the doubly-periodic rank grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Compass {
    N,
    NE,
    E,
    SE,
    S,
    SW,
    W,
    NW,
}

impl Compass {
    pub const ALL: [Compass; 8] = [
        Compass::N,
        Compass::NE,
        Compass::E,
        Compass::SE,
        Compass::S,
        Compass::SW,
        Compass::W,
        Compass::NW,
    ];

    /// Offset in rank coordinates, before periodic wrap.
    pub fn offset(self) -> (i64, i64) {
        match self {
            Compass::N => (0, -1),
            Compass::NE => (1, -1),
            Compass::E => (1, 0),
            Compass::SE => (1, 1),
            Compass::S => (0, 1),
            Compass::SW => (-1, 1),
            Compass::W => (-1, 0),
            Compass::NW => (-1, -1),
        }
    }
}

impl From<Direction> for Compass {
    fn from(d: Direction) -> Compass {
        match d {
            Direction::North => Compass::N,
            Direction::South => Compass::S,
            Direction::West => Compass::W,
            Direction::East => Compass::E,
        }
    }
}

/// Whether a panel belongs to a pyramid (levels shrink upward) or is a
/// bridge output (levels widen upward, "flipped in the time axis").
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Upward,
    Downward,
}

impl Orientation {
    pub fn code(self) -> u8 {
        match self {
            Orientation::Upward => 0,
            Orientation::Downward => 1,
        }
    }

    pub fn from_code(code: u8) -> Option<Orientation> {
        match code {
            0 => Some(Orientation::Upward),
            1 => Some(Orientation::Downward),
            _ => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum GridError {
    #[error("validation: {field}: {detail}")]
    Validation {
        field: &'static str,
        detail: String,
    },
    #[error("kernel contract: {0}")]
    Contract(String),
}

fn require_side(n: usize) -> Result<(), GridError> {
    if n < 4 {
        return Err(GridError::Validation {
            field: "n",
            detail: format!("subdomain side must be >= 4, got {n}"),
        });
    }
    if n % 2 != 0 {
        return Err(GridError::Validation {
            field: "n",
            detail: format!("subdomain side must be even, got {n}"),
        });
    }
    Ok(())
}

/// Rank coordinates on the process grid.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RankCoord {
    pub cx: u32,
    pub cy: u32,
}

impl RankCoord {
    pub fn new(cx: u32, cy: u32) -> RankCoord {
        RankCoord { cx, cy }
    }
}

impl std::fmt::Display for RankCoord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.cx, self.cy)
    }
}

/// The doubly-periodic px-by-py rank grid; every rank owns an n-by-n square
/// subdomain, so the global grid is (px*n)-by-(py*n).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Topology {
    px: u32,
    py: u32,
    n: usize,
}

impl Topology {
    pub fn new(px: u32, py: u32, n: usize) -> Result<Topology, GridError> {
        if px == 0 {
            return Err(GridError::Validation {
                field: "px",
                detail: "rank grid width must be >= 1".into(),
            });
        }
        if py == 0 {
            return Err(GridError::Validation {
                field: "py",
                detail: "rank grid height must be >= 1".into(),
            });
        }
        require_side(n)?;
        Ok(Topology { px, py, n })
    }

    pub fn px(&self) -> u32 {
        self.px
    }

    pub fn py(&self) -> u32 {
        self.py
    }

    /// Per-rank subdomain side length in grid points.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank_count(&self) -> usize {
        (self.px * self.py) as usize
    }

    pub fn global_width(&self) -> usize {
        self.px as usize * self.n
    }

    pub fn global_height(&self) -> usize {
        self.py as usize * self.n
    }

    pub fn contains(&self, r: RankCoord) -> bool {
        r.cx < self.px && r.cy < self.py
    }

    /// Row-major rank linearization.
    pub fn rank_index(&self, r: RankCoord) -> usize {
        (r.cy * self.px + r.cx) as usize
    }

    pub fn rank_at(&self, index: usize) -> RankCoord {
        RankCoord::new(index as u32 % self.px, index as u32 / self.px)
    }

    pub fn ranks(&self) -> impl Iterator<Item = RankCoord> + '_ {
        (0..self.rank_count()).map(|i| self.rank_at(i))
    }

    /// Periodic-wrap neighbor lookup; total on valid ranks.
    pub fn neighbor(&self, rank: RankCoord, dir: Compass) -> RankCoord {
        debug_assert!(self.contains(rank));
        let (dx, dy) = dir.offset();
        let cx = (rank.cx as i64 + dx).rem_euclid(self.px as i64) as u32;
        let cy = (rank.cy as i64 + dy).rem_euclid(self.py as i64) as u32;
        RankCoord::new(cx, cy)
    }
}

/// One rank's square subdomain at a single sub-step.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    n: usize,
    step: u64,
    arity: usize,
    data: Vec<f64>,
}

impl Grid {
    pub fn new(n: usize, step: u64, arity: usize, data: Vec<f64>) -> Result<Grid, GridError> {
        require_side(n)?;
        if arity == 0 {
            return Err(GridError::Validation {
                field: "arity",
                detail: "state arity must be >= 1".into(),
            });
        }
        if data.len() != n * n * arity {
            return Err(GridError::Validation {
                field: "data",
                detail: format!("expected {} values, got {}", n * n * arity, data.len()),
            });
        }
        Ok(Grid {
            n,
            step,
            arity,
            data,
        })
    }

    pub fn zeroed(n: usize, step: u64, arity: usize) -> Result<Grid, GridError> {
        Grid::new(n, step, arity, vec![0.0; n * n * arity])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn value(&self, x: usize, y: usize) -> &[f64] {
        let i = (y * self.n + x) * self.arity;
        &self.data[i..i + self.arity]
    }

    pub fn value_mut(&mut self, x: usize, y: usize) -> &mut [f64] {
        let i = (y * self.n + x) * self.arity;
        &mut self.data[i..i + self.arity]
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }
}

/// Per-level value counts of a panel and their sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PanelShape {
    pub per_level: Vec<usize>,
    pub total: usize,
}

/// Number of state vectors on each level of a panel.
///
/// Upward panels shrink with the pyramid cross-section: level k holds
/// `2*(n - 2k)` vectors. Downward (bridge-output) panels widen instead:
/// level k holds `2*(2k + 2)`. Both sum to `n^2/2 + n`.
pub fn panel_shape(n: usize, orientation: Orientation) -> Result<PanelShape, GridError> {
    require_side(n)?;
    let levels = n / 2;
    let per_level: Vec<usize> = (0..levels)
        .map(|k| match orientation {
            Orientation::Upward => 2 * (n - 2 * k),
            Orientation::Downward => 2 * (2 * k + 2),
        })
        .collect();
    let total = per_level.iter().sum();
    Ok(PanelShape { per_level, total })
}

/// One level's worth of panel values, stored flat in the slab's canonical
/// scan order (row-major over the slab rectangle).
#[derive(Debug, Clone, PartialEq)]
pub struct Slab {
    arity: usize,
    values: Vec<f64>,
}

impl Slab {
    pub fn new(arity: usize, values: Vec<f64>) -> Slab {
        debug_assert!(arity > 0 && values.len() % arity == 0);
        Slab { arity, values }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Number of state vectors in the slab.
    pub fn len(&self) -> usize {
        self.values.len() / self.arity
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        &self.values[i * self.arity..(i + 1) * self.arity]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// One triangular side of a pyramid or bridge: per-level value slabs plus
/// direction and orientation metadata. The unit of inter-rank communication.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub direction: Direction,
    pub orientation: Orientation,
    pub n: usize,
    pub start_step: u64,
    levels: Vec<Slab>,
}

impl Panel {
    /// Assemble a panel from per-level slabs, checking the level counts
    /// against [`panel_shape`].
    pub fn from_levels(
        direction: Direction,
        orientation: Orientation,
        n: usize,
        start_step: u64,
        levels: Vec<Slab>,
    ) -> Result<Panel, GridError> {
        let shape = panel_shape(n, orientation)?;
        if levels.len() != shape.per_level.len() {
            return Err(GridError::Validation {
                field: "levels",
                detail: format!(
                    "expected {} levels, got {}",
                    shape.per_level.len(),
                    levels.len()
                ),
            });
        }
        for (k, (slab, want)) in levels.iter().zip(&shape.per_level).enumerate() {
            if slab.len() != *want {
                return Err(GridError::Validation {
                    field: "levels",
                    detail: format!("level {k}: expected {want} vectors, got {}", slab.len()),
                });
            }
        }
        Ok(Panel {
            direction,
            orientation,
            n,
            start_step,
            levels,
        })
    }

    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, k: usize) -> &Slab {
        &self.levels[k]
    }

    pub fn levels(&self) -> &[Slab] {
        &self.levels
    }

    /// Sub-step index the level-k slab lives at.
    pub fn step_of_level(&self, k: usize) -> u64 {
        self.start_step + k as u64
    }

    pub fn total_vectors(&self) -> usize {
        self.levels.iter().map(Slab::len).sum()
    }
}

/// The fully assembled global field, used by the serial reference and as the
/// gather target. `shift` records the cyclic offset of rank-owned data
/// relative to original global coordinates: mid-cycle it is (n/2, n/2),
/// at full-cycle boundaries (0, 0).
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalField {
    width: usize,
    height: usize,
    step: u64,
    arity: usize,
    shift: (usize, usize),
    data: Vec<f64>,
}

impl GlobalField {
    pub fn new(
        width: usize,
        height: usize,
        step: u64,
        arity: usize,
        shift: (usize, usize),
        data: Vec<f64>,
    ) -> Result<GlobalField, GridError> {
        if width == 0 || height == 0 {
            return Err(GridError::Validation {
                field: "dimensions",
                detail: "field dimensions must be positive".into(),
            });
        }
        if data.len() != width * height * arity {
            return Err(GridError::Validation {
                field: "data",
                detail: format!(
                    "expected {} values, got {}",
                    width * height * arity,
                    data.len()
                ),
            });
        }
        Ok(GlobalField {
            width,
            height,
            step,
            arity,
            shift,
            data,
        })
    }

    pub fn zeroed(width: usize, height: usize, step: u64, arity: usize) -> GlobalField {
        GlobalField {
            width,
            height,
            step,
            arity,
            shift: (0, 0),
            data: vec![0.0; width * height * arity],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn set_step(&mut self, step: u64) {
        self.step = step;
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn shift(&self) -> (usize, usize) {
        self.shift
    }

    pub fn set_shift(&mut self, shift: (usize, usize)) {
        self.shift = shift;
    }

    pub fn value(&self, x: usize, y: usize) -> &[f64] {
        let i = (y * self.width + x) * self.arity;
        &self.data[i..i + self.arity]
    }

    pub fn value_mut(&mut self, x: usize, y: usize) -> &mut [f64] {
        let i = (y * self.width + x) * self.arity;
        &mut self.data[i..i + self.arity]
    }

    /// Value at periodically wrapped coordinates.
    pub fn value_wrapped(&self, x: i64, y: i64) -> &[f64] {
        let x = x.rem_euclid(self.width as i64) as usize;
        let y = y.rem_euclid(self.height as i64) as usize;
        self.value(x, y)
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }
}

/// The 3-by-3 neighborhood handed to a kernel: center plus 8 neighbors, all
/// at the same sub-step. Offsets are (dx, dy) with dy = -1 to the north.
pub struct Neighborhood<'a> {
    cells: [&'a [f64]; 9],
}

impl<'a> Neighborhood<'a> {
    /// Cells in row-major (dy, dx) order: NW, N, NE, W, C, E, SW, S, SE.
    pub fn from_cells(cells: [&'a [f64]; 9]) -> Neighborhood<'a> {
        Neighborhood { cells }
    }

    #[inline]
    pub fn at(&self, dx: i32, dy: i32) -> &'a [f64] {
        debug_assert!((-1..=1).contains(&dx) && (-1..=1).contains(&dy));
        self.cells[((dy + 1) * 3 + (dx + 1)) as usize]
    }

    #[inline]
    pub fn center(&self) -> &'a [f64] {
        self.cells[4]
    }

    #[inline]
    pub fn north(&self) -> &'a [f64] {
        self.cells[1]
    }

    #[inline]
    pub fn south(&self) -> &'a [f64] {
        self.cells[7]
    }

    #[inline]
    pub fn west(&self) -> &'a [f64] {
        self.cells[3]
    }

    #[inline]
    pub fn east(&self) -> &'a [f64] {
        self.cells[5]
    }
}

/// Error a kernel may raise for inputs that violate its own contract.
#[derive(Debug, Error)]
pub enum KernelError {
    #[error("state arity mismatch: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("non-physical state: {0}")]
    NonPhysical(String),
}

/// The kernel contract: a pure function from the global sub-step index and a
/// 3-by-3 neighborhood to the next state vector. Identical inputs must yield
/// bit-identical outputs; only the given neighborhood may be read. Stencils
/// wider than 3-by-3 and multi-stage integrators are expressed as chains of
/// sub-steps with a per-sub-step arity schedule.
pub trait Stencil: Sync {
    fn name(&self) -> &str;

    /// State vector length at sub-step `step`.
    fn arity(&self, step: u64) -> usize;

    /// Number of sub-steps forming one physical time step.
    fn period(&self) -> u64 {
        1
    }

    /// Compute the state at `step + 1` for the neighborhood's center point.
    /// `out` has length `arity(step + 1)`.
    fn apply(&self, step: u64, nbhd: &Neighborhood<'_>, out: &mut [f64])
        -> Result<(), KernelError>;
}

impl<T: Stencil + ?Sized> Stencil for &T {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn arity(&self, step: u64) -> usize {
        (**self).arity(step)
    }

    fn period(&self) -> u64 {
        (**self).period()
    }

    fn apply(
        &self,
        step: u64,
        nbhd: &Neighborhood<'_>,
        out: &mut [f64],
    ) -> Result<(), KernelError> {
        (**self).apply(step, nbhd, out)
    }
}

/// Build one rank's grid at sub-step 0 by evaluating `init_fn` at global
/// point indices. Every returned vector must have length `arity`.
pub fn init_grid(
    topo: &Topology,
    rank: RankCoord,
    arity: usize,
    init_fn: &dyn Fn(u64, u64) -> StateVector,
) -> Result<Grid, GridError> {
    if !topo.contains(rank) {
        return Err(GridError::Validation {
            field: "rank",
            detail: format!("rank {rank} outside {}x{} topology", topo.px(), topo.py()),
        });
    }
    let n = topo.n();
    let mut data = Vec::with_capacity(n * n * arity);
    for ly in 0..n {
        for lx in 0..n {
            let gx = rank.cx as u64 * n as u64 + lx as u64;
            let gy = rank.cy as u64 * n as u64 + ly as u64;
            let v = init_fn(gx, gy);
            if v.len() != arity {
                return Err(GridError::Contract(format!(
                    "init function returned arity {} at point ({gx},{gy}), kernel expects {arity}",
                    v.len()
                )));
            }
            data.extend_from_slice(&v.0);
        }
    }
    Grid::new(n, 0, arity, data)
}

/// Build the full global field at sub-step 0 from the same init function.
pub fn init_global(
    topo: &Topology,
    arity: usize,
    init_fn: &dyn Fn(u64, u64) -> StateVector,
) -> Result<GlobalField, GridError> {
    let (w, h) = (topo.global_width(), topo.global_height());
    let mut data = Vec::with_capacity(w * h * arity);
    for gy in 0..h {
        for gx in 0..w {
            let v = init_fn(gx as u64, gy as u64);
            if v.len() != arity {
                return Err(GridError::Contract(format!(
                    "init function returned arity {} at point ({gx},{gy}), kernel expects {arity}",
                    v.len()
                )));
            }
            data.extend_from_slice(&v.0);
        }
    }
    GlobalField::new(w, h, 0, arity, (0, 0), data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn topology_validation_names_offending_field() {
        let err = Topology::new(2, 2, 7).unwrap_err();
        assert!(err.to_string().contains("n"), "{err}");
        let err = Topology::new(2, 2, 2).unwrap_err();
        assert!(err.to_string().contains("n"), "{err}");
        let err = Topology::new(0, 2, 8).unwrap_err();
        assert!(err.to_string().contains("px"), "{err}");
    }

    #[test]
    fn topology_2x2_n8() {
        let t = Topology::new(2, 2, 8).unwrap();
        assert_eq!(t.rank_count(), 4);
        assert_eq!(t.global_width(), 16);
        assert_eq!(t.global_height(), 16);
    }

    #[test]
    fn topology_1x1_all_neighbors_self() {
        let t = Topology::new(1, 1, 8).unwrap();
        let r = RankCoord::new(0, 0);
        for dir in Compass::ALL {
            assert_eq!(t.neighbor(r, dir), r);
        }
    }

    #[test]
    fn topology_3x3_center_has_8_distinct_neighbors() {
        let t = Topology::new(3, 3, 4).unwrap();
        assert_eq!(t.rank_count(), 9);
        let r = RankCoord::new(1, 1);
        let mut seen = std::collections::HashSet::new();
        for dir in Compass::ALL {
            seen.insert(t.neighbor(r, dir));
        }
        assert_eq!(seen.len(), 8);
        assert!(!seen.contains(&r));
    }

    #[test]
    fn neighbor_wraps_periodically() {
        let t = Topology::new(2, 2, 8).unwrap();
        assert_eq!(
            t.neighbor(RankCoord::new(0, 0), Compass::N),
            RankCoord::new(0, 1)
        );
        assert_eq!(
            t.neighbor(RankCoord::new(0, 0), Compass::W),
            RankCoord::new(1, 0)
        );
        let t = Topology::new(3, 3, 4).unwrap();
        assert_eq!(
            t.neighbor(RankCoord::new(1, 1), Compass::E),
            RankCoord::new(2, 1)
        );
    }

    #[test]
    fn neighbor_involution_per_axis() {
        for (px, py) in [(1u32, 1u32), (1, 3), (2, 2), (3, 2), (4, 4)] {
            let t = Topology::new(px, py, 8).unwrap();
            for r in t.ranks() {
                assert_eq!(t.neighbor(t.neighbor(r, Compass::E), Compass::W), r);
                assert_eq!(t.neighbor(t.neighbor(r, Compass::S), Compass::N), r);
                assert_eq!(t.neighbor(t.neighbor(r, Compass::NE), Compass::SW), r);
                assert_eq!(t.neighbor(t.neighbor(r, Compass::NW), Compass::SE), r);
            }
        }
    }

    #[test]
    fn panel_shape_n8() {
        let up = panel_shape(8, Orientation::Upward).unwrap();
        assert_eq!(up.per_level, vec![16, 12, 8, 4]);
        assert_eq!(up.total, 40);
        let down = panel_shape(8, Orientation::Downward).unwrap();
        assert_eq!(down.per_level, vec![4, 8, 12, 16]);
        assert_eq!(down.total, 40);
    }

    #[test]
    fn panel_shape_n4_upward() {
        let up = panel_shape(4, Orientation::Upward).unwrap();
        assert_eq!(up.per_level, vec![8, 4]);
        assert_eq!(up.total, 12);
    }

    #[test]
    fn panel_shape_total_formula() {
        for n in (4..=128).step_by(2) {
            for orientation in [Orientation::Upward, Orientation::Downward] {
                let s = panel_shape(n, orientation).unwrap();
                assert_eq!(s.total, n * n / 2 + n, "n={n}");
            }
        }
    }

    #[test]
    fn panel_shape_rejects_odd_n() {
        assert!(panel_shape(7, Orientation::Upward).is_err());
    }

    #[test]
    fn init_grid_constant() {
        let topo = Topology::new(2, 2, 8).unwrap();
        let g = init_grid(&topo, RankCoord::new(0, 0), 1, &|_, _| {
            StateVector(vec![1.0])
        })
        .unwrap();
        assert_eq!(g.step(), 0);
        for y in 0..8 {
            for x in 0..8 {
                assert_eq!(g.value(x, y), &[1.0]);
            }
        }
    }

    #[test]
    fn init_grid_global_indices() {
        let topo = Topology::new(2, 2, 8).unwrap();
        let g = init_grid(&topo, RankCoord::new(1, 0), 2, &|i, j| {
            StateVector(vec![i as f64, j as f64])
        })
        .unwrap();
        assert_eq!(g.value(0, 0), &[8.0, 0.0]);
        assert_eq!(g.value(7, 7), &[15.0, 7.0]);
    }

    #[test]
    fn init_grid_rejects_wrong_arity() {
        let topo = Topology::new(1, 1, 4).unwrap();
        let err = init_grid(&topo, RankCoord::new(0, 0), 2, &|_, _| {
            StateVector(vec![1.0])
        })
        .unwrap_err();
        assert!(matches!(err, GridError::Contract(_)));
    }
}
