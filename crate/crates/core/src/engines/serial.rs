//! Single-threaded reference integrator: applies the kernel pointwise over
//! the full periodic global field in fixed row-major order. Every other
//! engine is verified bitwise against it.

use super::EngineError;
use crate::grid::{GlobalField, Neighborhood, Stencil};

fn advance_once(prog: &dyn Stencil, field: &GlobalField) -> Result<GlobalField, EngineError> {
    let step = field.step();
    let (w, h) = (field.width(), field.height());
    let arity_next = prog.arity(step + 1);
    let mut next = GlobalField::zeroed(w, h, step + 1, arity_next);
    next.set_shift(field.shift());
    for y in 0..h {
        for x in 0..w {
            let (xi, yi) = (x as i64, y as i64);
            let nbhd = Neighborhood::from_cells([
                field.value_wrapped(xi - 1, yi - 1),
                field.value_wrapped(xi, yi - 1),
                field.value_wrapped(xi + 1, yi - 1),
                field.value_wrapped(xi - 1, yi),
                field.value_wrapped(xi, yi),
                field.value_wrapped(xi + 1, yi),
                field.value_wrapped(xi - 1, yi + 1),
                field.value_wrapped(xi, yi + 1),
                field.value_wrapped(xi + 1, yi + 1),
            ]);
            let out = next.value_mut(x, y);
            prog.apply(step, &nbhd, out)
                .map_err(|e| EngineError::Numeric {
                    step,
                    x: x as u64,
                    y: y as u64,
                    detail: e.to_string(),
                })?;
            if let Some(bad) = out.iter().find(|v| !v.is_finite()) {
                return Err(EngineError::Numeric {
                    step,
                    x: x as u64,
                    y: y as u64,
                    detail: format!("kernel produced non-finite value {bad}"),
                });
            }
        }
    }
    Ok(next)
}

/// Advance `substeps` sub-steps and return the final field.
pub fn serial_reference(
    prog: &dyn Stencil,
    field: GlobalField,
    substeps: u64,
) -> Result<GlobalField, EngineError> {
    check_arity(prog, &field)?;
    let mut field = field;
    for _ in 0..substeps {
        field = advance_once(prog, &field)?;
    }
    Ok(field)
}

/// Space-time recording mode: returns every intermediate field including the
/// initial one, `substeps + 1` fields in total. The per-sub-step footprint
/// oracle for the swept components.
pub fn serial_trace(
    prog: &dyn Stencil,
    field: GlobalField,
    substeps: u64,
) -> Result<Vec<GlobalField>, EngineError> {
    check_arity(prog, &field)?;
    let mut trace = Vec::with_capacity(substeps as usize + 1);
    trace.push(field);
    for _ in 0..substeps {
        let next = advance_once(prog, trace.last().unwrap())?;
        trace.push(next);
    }
    Ok(trace)
}

fn check_arity(prog: &dyn Stencil, field: &GlobalField) -> Result<(), EngineError> {
    let want = prog.arity(field.step());
    if field.arity() != want {
        return Err(crate::grid::GridError::Contract(format!(
            "field arity {} does not match kernel arity {want} at sub-step {}",
            field.arity(),
            field.step()
        ))
        .into());
    }
    Ok(())
}
