//! Shared helpers for unit tests: deterministic surface sampling without
//! pulling in the harness RNG machinery.

use crate::forms::CubicForm;
use crate::gf::Field;
use crate::surface::SurfaceModel;

pub(crate) fn gf(p: u64, k: usize) -> Field {
    Field::new(p, k, None).unwrap()
}

pub(crate) fn form_from_indices(f: &Field, idx: &[(usize, u32)]) -> CubicForm {
    let mut c = [f.zero(); 20];
    for &(i, v) in idx {
        c[i] = f.element(v);
    }
    CubicForm::new(c).unwrap()
}

/// Sum of the four cubed coordinates.
pub(crate) fn fermat(f: &Field) -> CubicForm {
    form_from_indices(f, &[(0, 1), (10, 1), (16, 1), (19, 1)])
}

/// Splitmix-style coefficient stream; good enough for test sampling and
/// fully deterministic.
pub(crate) fn lcg_form(f: &Field, seed: u64) -> CubicForm {
    let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1);
    loop {
        let mut c = [f.zero(); 20];
        for slot in c.iter_mut() {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            *slot = f.element(((state >> 33) % f.order() as u64) as u32);
        }
        if let Ok(form) = CubicForm::new(c) {
            return form;
        }
    }
}

/// First seeded smooth surface at or after `start_seed` with at least
/// `min_lines` rational lines.
pub(crate) fn sample_surface(f: &Field, start_seed: u64, min_lines: usize) -> SurfaceModel {
    for seed in start_seed.. {
        let form = lcg_form(f, seed);
        if let Ok(model) = SurfaceModel::build(f, form) {
            if model.klines().len() >= min_lines {
                return model;
            }
        }
    }
    unreachable!()
}
