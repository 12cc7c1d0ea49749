//! Demonstration of decomposing a 5-wide stencil into two 3-by-3 sub-steps.
//!
//! The target update is
//! `u' = u[i-2,j] + u[i+2,j] + u[i,j-2] + u[i,j+2] - 4*u[i,j]`,
//! which reads two levels of neighbors. The even sub-step "pushes" each
//! point's value and its four edge-neighbor values as a 5-vector; the odd
//! sub-step then reads its immediate neighbors' pushed components, which
//! contain exactly the neighbors-of-neighbors it needs.

use crate::grid::{KernelError, Neighborhood, Stencil};

/// Pushed component layout at odd sub-steps.
const CENTER: usize = 0;
const FROM_WEST: usize = 1;
const FROM_EAST: usize = 2;
const FROM_NORTH: usize = 3;
const FROM_SOUTH: usize = 4;

pub struct WideStencilDemo;

impl Stencil for WideStencilDemo {
    fn name(&self) -> &str {
        "wide-stencil"
    }

    fn arity(&self, step: u64) -> usize {
        if step % 2 == 0 {
            1
        } else {
            5
        }
    }

    fn period(&self) -> u64 {
        2
    }

    fn apply(
        &self,
        step: u64,
        nbhd: &Neighborhood<'_>,
        out: &mut [f64],
    ) -> Result<(), KernelError> {
        if step % 2 == 0 {
            // Push: gather own and edge-neighbor scalars into the 5-vector.
            out[CENTER] = nbhd.center()[0];
            out[FROM_WEST] = nbhd.west()[0];
            out[FROM_EAST] = nbhd.east()[0];
            out[FROM_NORTH] = nbhd.north()[0];
            out[FROM_SOUTH] = nbhd.south()[0];
        } else {
            // Combine: the west neighbor's FROM_WEST component is u[i-2,j],
            // and so on around the compass.
            out[0] = nbhd.west()[FROM_WEST]
                + nbhd.east()[FROM_EAST]
                + nbhd.north()[FROM_NORTH]
                + nbhd.south()[FROM_SOUTH]
                - 4.0 * nbhd.center()[CENTER];
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engines::serial_reference;
    use crate::grid::GlobalField;

    fn delta_field(n: usize) -> GlobalField {
        let mut f = GlobalField::zeroed(n, n, 0, 1);
        f.value_mut(0, 0)[0] = 1.0;
        f
    }

    /// Direct evaluation of the 5-wide stencil on a periodic field; the
    /// independent oracle for the two-sub-step composition.
    fn direct_wide_stencil(f: &GlobalField) -> GlobalField {
        let (w, h) = (f.width(), f.height());
        let mut out = GlobalField::zeroed(w, h, f.step() + 2, 1);
        for y in 0..h as i64 {
            for x in 0..w as i64 {
                out.value_mut(x as usize, y as usize)[0] = f.value_wrapped(x - 2, y)[0]
                    + f.value_wrapped(x + 2, y)[0]
                    + f.value_wrapped(x, y - 2)[0]
                    + f.value_wrapped(x, y + 2)[0]
                    - 4.0 * f.value_wrapped(x, y)[0];
            }
        }
        out
    }

    #[test]
    fn delta_two_substeps() {
        let out = serial_reference(&WideStencilDemo, delta_field(8), 2).unwrap();
        for y in 0..8i64 {
            for x in 0..8i64 {
                let expect = if (x, y) == (0, 0) {
                    -4.0
                } else if [(2, 0), (6, 0), (0, 2), (0, 6)].contains(&(x, y)) {
                    1.0
                } else {
                    0.0
                };
                assert_eq!(out.value(x as usize, y as usize)[0], expect, "({x},{y})");
            }
        }
    }

    #[test]
    fn composition_matches_direct_stencil() {
        for seed in [1u64, 7, 42] {
            let init = crate::kernels::seeded_scalar_init(1, seed);
            let topo = crate::grid::Topology::new(1, 1, 8).unwrap();
            let f = crate::grid::init_global(&topo, 1, &init).unwrap();
            let direct = direct_wide_stencil(&f);
            let composed = serial_reference(&WideStencilDemo, f, 2).unwrap();
            assert_eq!(composed.values(), direct.values(), "seed {seed}");
        }
    }

    #[test]
    fn constant_field_maps_to_zero() {
        let topo = crate::grid::Topology::new(1, 1, 8).unwrap();
        let f =
            crate::grid::init_global(&topo, 1, &|_, _| crate::grid::StateVector(vec![3.5]))
                .unwrap();
        let out = serial_reference(&WideStencilDemo, f, 2).unwrap();
        assert!(out.values().iter().all(|&v| v == 0.0));
    }
}
