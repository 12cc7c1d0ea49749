//! Per-level slab rectangles for the four space-time components.
//!
//! Every slab a component extracts or consumes is an axis-aligned 2-wide
//! rectangle. The tables below are the single source of truth for those
//! rectangles; extraction, placement, the wire codec's scan order, and the
//! oracle tests all derive from them. Coordinates are 0-based in the owning
//! component's frame; the downward pyramid's last level legitimately reaches
//! the one-cell apron at -1 and n.
//!
//! Upward panels (pyramid frame, level k = 0..n/2-1, slab = 2*(n-2k) points):
//!
//! | direction | x range            | y range            |
//! |-----------|--------------------|--------------------|
//! | North     | `[k, n-1-k]`       | `{k, k+1}`         |
//! | South     | `[k, n-1-k]`       | `{n-2-k, n-1-k}`   |
//! | West      | `{k, k+1}`         | `[k, n-1-k]`       |
//! | East      | `{n-2-k, n-1-k}`   | `[k, n-1-k]`       |
//!
//! Adjacent upward slabs share their 2x2 corner blocks.
//!
//! Downward panels (frame of the downward pyramid that consumes them, level
//! k = 0..n/2-1, slab = 2*(2k+2) points). The four walls pinwheel around the
//! level's frame so each corner block is owned by exactly one wall, which
//! makes the four slabs tile the frame exactly:
//!
//! | direction | consumed as | x range              | y range              |
//! |-----------|-------------|----------------------|----------------------|
//! | South     | north wall  | `[n/2-k, n/2+k+1]`   | `{n/2-k-2, n/2-k-1}` |
//! | North     | south wall  | `[n/2-k-2, n/2+k-1]` | `{n/2+k, n/2+k+1}`   |
//! | East      | west wall   | `{n/2-k-2, n/2-k-1}` | `[n/2-k-2, n/2+k-1]` |
//! | West      | east wall   | `{n/2+k, n/2+k+1}`   | `[n/2-k, n/2+k+1]`   |
//!
//! A panel's direction names the side of its producer it lies on, which is
//! also the direction from producer toward consumer; the consumer therefore
//! uses it as the wall on its opposite side.
//!
//! Bridge frames put the valley mid-line at n/2 along the bridged axis:
//! a longitudinal bridge at level k holds the computed valley rows
//! `y in [n/2-k, n/2+k-1]` plus the two 2-row wall strips placed from the
//! input panels, and computes rows `[n/2-1-k, n/2+k]` of level k+1. Output
//! slabs are extracted before the level's stencil applications, at the level
//! they are indexed by.

use crate::grid::{Direction, Orientation, PanelShape};

/// Inclusive-corner rectangle in component-frame coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub x0: i64,
    pub y0: i64,
    pub w: usize,
    pub h: usize,
}

impl Rect {
    pub fn new(x0: i64, y0: i64, w: usize, h: usize) -> Rect {
        Rect { x0, y0, w, h }
    }

    pub fn area(&self) -> usize {
        self.w * self.h
    }

    pub fn contains(&self, x: i64, y: i64) -> bool {
        x >= self.x0 && x < self.x0 + self.w as i64 && y >= self.y0 && y < self.y0 + self.h as i64
    }

    /// Points in canonical scan order: row-major, y outer.
    pub fn points(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        let (x0, y0, w, h) = (self.x0, self.y0, self.w as i64, self.h as i64);
        (y0..y0 + h).flat_map(move |y| (x0..x0 + w).map(move |x| (x, y)))
    }

    fn shifted(self, dx: i64, dy: i64) -> Rect {
        Rect {
            x0: self.x0 + dx,
            y0: self.y0 + dy,
            ..self
        }
    }
}

/// Rectangle of an upward panel's level-k slab in the pyramid frame.
pub fn upward_slab_rect(dir: Direction, n: usize, k: usize) -> Rect {
    let (n, k) = (n as i64, k as i64);
    let span = (n - 2 * k) as usize;
    match dir {
        Direction::North => Rect::new(k, k, span, 2),
        Direction::South => Rect::new(k, n - 2 - k, span, 2),
        Direction::West => Rect::new(k, k, 2, span),
        Direction::East => Rect::new(n - 2 - k, k, 2, span),
    }
}

/// Rectangle of a downward panel's level-k slab in the frame of the
/// downward pyramid that consumes it.
pub fn downward_slab_rect(dir: Direction, n: usize, k: usize) -> Rect {
    let (h, k) = ((n / 2) as i64, k as i64);
    let span = (2 * k + 2) as usize;
    match dir {
        // north wall, eastern window
        Direction::South => Rect::new(h - k, h - k - 2, span, 2),
        // south wall, western window
        Direction::North => Rect::new(h - k - 2, h + k, span, 2),
        // west wall, northern window
        Direction::East => Rect::new(h - k - 2, h - k - 2, 2, span),
        // east wall, southern window
        Direction::West => Rect::new(h + k, h - k, 2, span),
    }
}

/// Where a bridge extracts its own level-k output slab, in the bridge frame.
/// This is [`downward_slab_rect`] translated by n/2 from consumer frame back
/// to producer frame along the bridged axis.
pub fn bridge_extract_rect(dir: Direction, n: usize, k: usize) -> Rect {
    let h = (n / 2) as i64;
    let r = downward_slab_rect(dir, n, k);
    match dir {
        Direction::West => r.shifted(-h, 0),
        Direction::East => r.shifted(h, 0),
        Direction::North => r.shifted(0, -h),
        Direction::South => r.shifted(0, h),
    }
}

/// Where an upward panel's level-k slab lands in a bridge frame. `dir` is
/// the slab's own direction: a South panel comes from the pyramid north of
/// the valley and lands on the valley's northern side, and so on.
pub fn bridge_wall_rect(dir: Direction, n: usize, k: usize) -> Rect {
    let h = (n / 2) as i64;
    let r = upward_slab_rect(dir, n, k);
    match dir {
        Direction::South => r.shifted(0, -h),
        Direction::North => r.shifted(0, h),
        Direction::East => r.shifted(-h, 0),
        Direction::West => r.shifted(h, 0),
    }
}

/// Axis a bridge runs along: longitudinal bridges span a north-south valley,
/// latitudinal bridges a west-east one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BridgeAxis {
    Longitudinal,
    Latitudinal,
}

/// Interior points a bridge computes when advancing from level k to k+1.
pub fn bridge_compute_rect(axis: BridgeAxis, n: usize, k: usize) -> Rect {
    let (n_i, h, k_i) = (n as i64, (n / 2) as i64, k as i64);
    let along = (n_i - 2 - 2 * k_i).max(0) as usize;
    let across = (2 * k_i + 2) as usize;
    match axis {
        BridgeAxis::Longitudinal => Rect::new(k_i + 1, h - 1 - k_i, along, across),
        BridgeAxis::Latitudinal => Rect::new(h - 1 - k_i, k_i + 1, across, along),
    }
}

/// Interior points the downward pyramid computes when advancing from level k
/// to k+1: the square hole left between the four walls.
pub fn downward_compute_rect(n: usize, k: usize) -> Rect {
    let (h, k_i) = ((n / 2) as i64, k as i64);
    let span = (2 * k_i + 2) as usize;
    Rect::new(h - 1 - k_i, h - 1 - k_i, span, span)
}

/// Check a list of per-level slab lengths against the canonical shape.
pub fn matches_shape(shape: &PanelShape, orientation: Orientation, n: usize) -> bool {
    crate::grid::panel_shape(n, orientation)
        .map(|s| s == *shape)
        .unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::panel_shape;
    use std::collections::HashSet;

    #[test]
    fn upward_rects_match_panel_shape() {
        for n in [4usize, 8, 12, 16] {
            let shape = panel_shape(n, Orientation::Upward).unwrap();
            for dir in Direction::ALL {
                for k in 0..n / 2 {
                    assert_eq!(
                        upward_slab_rect(dir, n, k).area(),
                        shape.per_level[k],
                        "n={n} dir={dir:?} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn downward_rects_match_panel_shape() {
        for n in [4usize, 8, 12, 16] {
            let shape = panel_shape(n, Orientation::Downward).unwrap();
            for dir in Direction::ALL {
                for k in 0..n / 2 {
                    assert_eq!(
                        downward_slab_rect(dir, n, k).area(),
                        shape.per_level[k],
                        "n={n} dir={dir:?} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn upward_last_level_is_shared_2x2() {
        let n = 8;
        let k = n / 2 - 1;
        let rects: Vec<Rect> = Direction::ALL
            .iter()
            .map(|&d| upward_slab_rect(d, n, k))
            .collect();
        for r in &rects {
            assert_eq!(r.area(), 4);
            assert_eq!((r.x0, r.y0, r.w, r.h), (3, 3, 2, 2));
        }
    }

    /// The four downward walls at level k must exactly tile the 2-cell frame
    /// around the level's hole: disjoint, and covering frame = (2k+4)^2 minus
    /// the (2k)^2 hole.
    #[test]
    fn downward_walls_pinwheel_tile_the_frame() {
        for n in [4usize, 8, 16] {
            let h = (n / 2) as i64;
            for k in 0..n / 2 {
                let ki = k as i64;
                let mut covered = HashSet::new();
                for dir in Direction::ALL {
                    for (x, y) in downward_slab_rect(dir, n, k).points() {
                        assert!(covered.insert((x, y)), "overlap at ({x},{y}) n={n} k={k}");
                    }
                }
                let outer = Rect::new(h - ki - 2, h - ki - 2, 2 * k + 4, 2 * k + 4);
                let hole = Rect::new(h - ki, h - ki, 2 * k, 2 * k);
                for (x, y) in outer.points() {
                    let in_hole = hole.w > 0 && hole.contains(x, y);
                    assert_eq!(
                        covered.contains(&(x, y)),
                        !in_hole,
                        "coverage mismatch at ({x},{y}) n={n} k={k}"
                    );
                }
                assert_eq!(covered.len(), outer.area() - hole.area());
            }
        }
    }

    #[test]
    fn downward_walls_stay_within_apron() {
        for n in [4usize, 8, 16] {
            for dir in Direction::ALL {
                for k in 0..n / 2 {
                    let r = downward_slab_rect(dir, n, k);
                    for (x, y) in r.points() {
                        assert!(x >= -1 && x <= n as i64, "x={x} n={n} k={k}");
                        assert!(y >= -1 && y <= n as i64, "y={y} n={n} k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn bridge_extract_windows_fit_available_band() {
        // At level k a longitudinal bridge has rows [n/2-2-k, n/2+k+1]
        // available for columns [k, n-1-k]; both output windows must fit.
        for n in [4usize, 8, 16] {
            let h = (n / 2) as i64;
            for k in 0..n / 2 {
                let ki = k as i64;
                for dir in [Direction::West, Direction::East] {
                    let r = bridge_extract_rect(dir, n, k);
                    assert!(r.y0 >= h - 2 - ki, "dir={dir:?} n={n} k={k}");
                    assert!(r.y0 + r.h as i64 - 1 <= h + ki + 1, "dir={dir:?} n={n} k={k}");
                    assert!(r.x0 >= ki && r.x0 + r.w as i64 - 1 <= n as i64 - 1 - ki);
                }
                for dir in [Direction::North, Direction::South] {
                    let r = bridge_extract_rect(dir, n, k);
                    assert!(r.x0 >= h - 2 - ki, "dir={dir:?} n={n} k={k}");
                    assert!(r.x0 + r.w as i64 - 1 <= h + ki + 1, "dir={dir:?} n={n} k={k}");
                    assert!(r.y0 >= ki && r.y0 + r.h as i64 - 1 <= n as i64 - 1 - ki);
                }
            }
        }
    }

    #[test]
    fn compute_rects_sizes() {
        // Pyramid-style shrink handled in the component itself; check the
        // valley and hole growth here.
        let n = 8;
        assert_eq!(bridge_compute_rect(BridgeAxis::Longitudinal, n, 0).area(), 12);
        assert_eq!(bridge_compute_rect(BridgeAxis::Longitudinal, n, 3).area(), 0);
        assert_eq!(downward_compute_rect(n, 0).area(), 4);
        assert_eq!(downward_compute_rect(n, 3).area(), 64);
    }
}
