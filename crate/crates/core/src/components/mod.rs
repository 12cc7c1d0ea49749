//! The four space-time building blocks: upward pyramid, longitudinal bridge,
//! latitudinal bridge, and downward pyramid.
//!
//! Each is a pure function from an input grid or panels to output panels or
//! a grid. A component works in two (n+2)-by-(n+2) scratch arrays with a
//! one-cell apron; slabs are extracted before each level's stencil
//! applications, and swapping the arrays is the level advance. Stencil
//! operations are selected by global sub-step index (`start_step + level`),
//! so multi-stage kernels stay phase-correct across components.
//!
//! Every value any component produces is bitwise identical to what the
//! serial reference computes at the same point and sub-step; the tests in
//! this module and the engine equivalence suite enforce that property.

pub mod geometry;

use crate::grid::{
    Direction, Grid, Neighborhood, Orientation, Panel, Slab, Stencil,
};
use geometry::{
    bridge_compute_rect, bridge_extract_rect, bridge_wall_rect, downward_compute_rect,
    downward_slab_rect, upward_slab_rect, BridgeAxis, Rect,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ComponentError {
    #[error("component contract: {0}")]
    Contract(String),
    #[error("numeric error at sub-step {step}, point ({x},{y}): {detail}")]
    Numeric {
        step: u64,
        x: i64,
        y: i64,
        detail: String,
    },
}

/// Working array with a one-cell apron: coordinates -1..=n map onto an
/// (n+2)-by-(n+2) cell grid.
pub(crate) struct Scratch {
    n: usize,
    arity: usize,
    data: Vec<f64>,
}

impl Scratch {
    pub(crate) fn new(n: usize, arity: usize) -> Scratch {
        Scratch {
            n,
            arity,
            data: vec![0.0; (n + 2) * (n + 2) * arity],
        }
    }

    pub(crate) fn from_grid(grid: &Grid) -> Scratch {
        let mut s = Scratch::new(grid.n(), grid.arity());
        for y in 0..grid.n() {
            for x in 0..grid.n() {
                s.cell_mut(x as i64, y as i64)
                    .copy_from_slice(grid.value(x, y));
            }
        }
        s
    }

    pub(crate) fn to_grid(&self, step: u64) -> Result<Grid, crate::grid::GridError> {
        let n = self.n;
        let mut data = Vec::with_capacity(n * n * self.arity);
        for y in 0..n {
            for x in 0..n {
                data.extend_from_slice(self.cell(x as i64, y as i64));
            }
        }
        Grid::new(n, step, self.arity, data)
    }

    #[inline]
    fn idx(&self, x: i64, y: i64) -> usize {
        debug_assert!(x >= -1 && x <= self.n as i64 && y >= -1 && y <= self.n as i64);
        (((y + 1) as usize) * (self.n + 2) + (x + 1) as usize) * self.arity
    }

    #[inline]
    pub(crate) fn cell(&self, x: i64, y: i64) -> &[f64] {
        let i = self.idx(x, y);
        &self.data[i..i + self.arity]
    }

    #[inline]
    pub(crate) fn cell_mut(&mut self, x: i64, y: i64) -> &mut [f64] {
        let i = self.idx(x, y);
        &mut self.data[i..i + self.arity]
    }

    #[inline]
    pub(crate) fn neighborhood(&self, x: i64, y: i64) -> Neighborhood<'_> {
        Neighborhood::from_cells([
            self.cell(x - 1, y - 1),
            self.cell(x, y - 1),
            self.cell(x + 1, y - 1),
            self.cell(x - 1, y),
            self.cell(x, y),
            self.cell(x + 1, y),
            self.cell(x - 1, y + 1),
            self.cell(x, y + 1),
            self.cell(x + 1, y + 1),
        ])
    }

    fn extract(&self, rect: Rect) -> Slab {
        let mut values = Vec::with_capacity(rect.area() * self.arity);
        for (x, y) in rect.points() {
            values.extend_from_slice(self.cell(x, y));
        }
        Slab::new(self.arity, values)
    }

    fn place(&mut self, rect: Rect, slab: &Slab) -> Result<(), ComponentError> {
        if slab.arity() != self.arity {
            return Err(ComponentError::Contract(format!(
                "slab arity {} does not match working arity {}",
                slab.arity(),
                self.arity
            )));
        }
        if slab.len() != rect.area() {
            return Err(ComponentError::Contract(format!(
                "slab holds {} vectors, rectangle needs {}",
                slab.len(),
                rect.area()
            )));
        }
        for (i, (x, y)) in rect.points().enumerate() {
            self.cell_mut(x, y).copy_from_slice(slab.vector(i));
        }
        Ok(())
    }
}

/// Advance one interior rectangle by one sub-step, checking outputs for
/// finiteness so kernel blowups carry a location.
pub(crate) fn advance(
    prog: &dyn Stencil,
    step: u64,
    src: &Scratch,
    dst: &mut Scratch,
    rect: Rect,
) -> Result<(), ComponentError> {
    for (x, y) in rect.points() {
        let nbhd = src.neighborhood(x, y);
        let out = dst.cell_mut(x, y);
        prog.apply(step, &nbhd, out)
            .map_err(|e| ComponentError::Numeric {
                step,
                x,
                y,
                detail: e.to_string(),
            })?;
        if let Some(bad) = out.iter().find(|v| !v.is_finite()) {
            return Err(ComponentError::Numeric {
                step,
                x,
                y,
                detail: format!("kernel produced non-finite value {bad}"),
            });
        }
    }
    Ok(())
}

fn check_panel(
    panel: &Panel,
    direction: Direction,
    orientation: Orientation,
    n: usize,
    start_step: u64,
) -> Result<(), ComponentError> {
    if panel.orientation != orientation {
        return Err(ComponentError::Contract(format!(
            "expected {orientation:?} panel, got {:?}",
            panel.orientation
        )));
    }
    if panel.direction != direction {
        return Err(ComponentError::Contract(format!(
            "expected {direction} panel, got {}",
            panel.direction
        )));
    }
    if panel.n != n {
        return Err(ComponentError::Contract(format!(
            "panel side {} does not match {n}",
            panel.n
        )));
    }
    if panel.start_step != start_step {
        return Err(ComponentError::Contract(format!(
            "panel start sub-step {} does not match {start_step}",
            panel.start_step
        )));
    }
    Ok(())
}

/// The four triangular sides of one upward pyramid.
#[derive(Debug, Clone)]
pub struct UpwardPanels {
    pub north: Panel,
    pub south: Panel,
    pub west: Panel,
    pub east: Panel,
}

/// Build the upward pyramid over an n-by-n base grid.
///
/// Level k of the pyramid is the (n-2k)-square cross-section at sub-step
/// `base.step() + k`; each of the four output panels collects the two
/// outermost point layers on its side of every cross-section. Interior
/// stencil applications happen for k = 0..n/2-2; the last level is
/// extraction only.
pub fn upward_pyramid(prog: &dyn Stencil, base: &Grid) -> Result<UpwardPanels, ComponentError> {
    let n = base.n();
    let t0 = base.step();
    if base.arity() != prog.arity(t0) {
        return Err(ComponentError::Contract(format!(
            "base arity {} does not match kernel arity {} at sub-step {t0}",
            base.arity(),
            prog.arity(t0)
        )));
    }
    let levels = n / 2;
    let mut slabs: [Vec<Slab>; 4] = [vec![], vec![], vec![], vec![]];
    let mut d = Scratch::from_grid(base);
    for k in 0..levels {
        let step = t0 + k as u64;
        for (i, dir) in Direction::ALL.into_iter().enumerate() {
            slabs[i].push(d.extract(upward_slab_rect(dir, n, k)));
        }
        if k + 1 < levels {
            let mut u = Scratch::new(n, prog.arity(step + 1));
            let span = n - 2 * (k + 1);
            let interior = Rect::new((k + 1) as i64, (k + 1) as i64, span, span);
            advance(prog, step, &d, &mut u, interior)?;
            d = u;
        }
    }
    let [north, south, west, east] = slabs;
    let build = |dir, levels| {
        Panel::from_levels(dir, Orientation::Upward, n, t0, levels)
            .map_err(|e| ComponentError::Contract(e.to_string()))
    };
    Ok(UpwardPanels {
        north: build(Direction::North, north)?,
        south: build(Direction::South, south)?,
        west: build(Direction::West, west)?,
        east: build(Direction::East, east)?,
    })
}

fn bridge(
    prog: &dyn Stencil,
    axis: BridgeAxis,
    wall_a: &Panel,
    wall_b: &Panel,
) -> Result<(Panel, Panel), ComponentError> {
    let n = wall_a.n;
    let t0 = wall_a.start_step;
    // wall_a sits on the low-coordinate side of the valley along the bridged
    // axis; its direction points back across the valley toward its producer's
    // consumer, i.e. a South panel walls the north side.
    let (dir_a, dir_b, out_dirs) = match axis {
        BridgeAxis::Longitudinal => (
            Direction::South,
            Direction::North,
            (Direction::West, Direction::East),
        ),
        BridgeAxis::Latitudinal => (
            Direction::East,
            Direction::West,
            (Direction::North, Direction::South),
        ),
    };
    check_panel(wall_a, dir_a, Orientation::Upward, n, t0)?;
    check_panel(wall_b, dir_b, Orientation::Upward, n, t0)?;
    let levels = n / 2;
    let mut out_a_levels = Vec::with_capacity(levels);
    let mut out_b_levels = Vec::with_capacity(levels);
    let mut d = Scratch::new(n, prog.arity(t0));
    for k in 0..levels {
        let step = t0 + k as u64;
        d.place(bridge_wall_rect(dir_a, n, k), wall_a.level(k))?;
        d.place(bridge_wall_rect(dir_b, n, k), wall_b.level(k))?;
        out_a_levels.push(d.extract(bridge_extract_rect(out_dirs.0, n, k)));
        out_b_levels.push(d.extract(bridge_extract_rect(out_dirs.1, n, k)));
        if k + 1 < levels {
            let mut u = Scratch::new(n, prog.arity(step + 1));
            advance(prog, step, &d, &mut u, bridge_compute_rect(axis, n, k))?;
            d = u;
        }
    }
    let build = |dir, levels| {
        Panel::from_levels(dir, Orientation::Downward, n, t0, levels)
            .map_err(|e| ComponentError::Contract(e.to_string()))
    };
    Ok((
        build(out_dirs.0, out_a_levels)?,
        build(out_dirs.1, out_b_levels)?,
    ))
}

/// Fill the valley between two vertically adjacent pyramids.
///
/// `wall_north` is the South panel of the pyramid north of the valley,
/// `wall_south` the North panel of the southern pyramid. Returns the
/// bridge's (West, East) output panels.
pub fn longitudinal_bridge(
    prog: &dyn Stencil,
    wall_north: &Panel,
    wall_south: &Panel,
) -> Result<(Panel, Panel), ComponentError> {
    bridge(prog, BridgeAxis::Longitudinal, wall_north, wall_south)
}

/// Fill the valley between two horizontally adjacent pyramids.
///
/// `wall_west` is the East panel of the pyramid west of the valley,
/// `wall_east` the West panel of the eastern pyramid. Returns the bridge's
/// (North, South) output panels.
pub fn latitudinal_bridge(
    prog: &dyn Stencil,
    wall_west: &Panel,
    wall_east: &Panel,
) -> Result<(Panel, Panel), ComponentError> {
    bridge(prog, BridgeAxis::Latitudinal, wall_west, wall_east)
}

/// Fill the hole between four bridge panels, producing the n-by-n grid
/// n/2 sub-steps above the panels' start.
///
/// `wall_north` is the South panel of the latitudinal bridge north of the
/// hole, `wall_south` the North panel of the southern one, `wall_west` the
/// East panel of the longitudinal bridge to the west, `wall_east` the West
/// panel of the eastern one.
pub fn downward_pyramid(
    prog: &dyn Stencil,
    wall_north: &Panel,
    wall_south: &Panel,
    wall_west: &Panel,
    wall_east: &Panel,
) -> Result<Grid, ComponentError> {
    let n = wall_north.n;
    let t0 = wall_north.start_step;
    check_panel(wall_north, Direction::South, Orientation::Downward, n, t0)?;
    check_panel(wall_south, Direction::North, Orientation::Downward, n, t0)?;
    check_panel(wall_west, Direction::East, Orientation::Downward, n, t0)?;
    check_panel(wall_east, Direction::West, Orientation::Downward, n, t0)?;
    let levels = n / 2;
    let mut d = Scratch::new(n, prog.arity(t0));
    for k in 0..levels {
        let step = t0 + k as u64;
        d.place(downward_slab_rect(Direction::South, n, k), wall_north.level(k))?;
        d.place(downward_slab_rect(Direction::North, n, k), wall_south.level(k))?;
        d.place(downward_slab_rect(Direction::East, n, k), wall_west.level(k))?;
        d.place(downward_slab_rect(Direction::West, n, k), wall_east.level(k))?;
        let mut u = Scratch::new(n, prog.arity(step + 1));
        advance(prog, step, &d, &mut u, downward_compute_rect(n, k))?;
        d = u;
    }
    let out_step = t0 + levels as u64;
    d.to_grid(out_step)
        .map_err(|e| ComponentError::Contract(e.to_string()))
}
