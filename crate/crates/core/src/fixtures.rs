//! Small discrete groups with known structure, used by tests, the acceptance
//! suite, and the bundled configs.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector};

use crate::groupgen::GroupSpec;
use crate::isomcore::{plane_rotation, unit, Isometry};

/// `Z^n` acting on `R^n` by the standard unit translations.
pub fn z_lattice(n: usize) -> GroupSpec {
    scaled_lattice(n, 1.0)
}

/// `(cZ)^n` acting on `R^n`.
pub fn scaled_lattice(n: usize, c: f64) -> GroupSpec {
    GroupSpec::new((0..n).map(|i| Isometry::translation(unit(n, i) * c)).collect())
        .expect("non-empty generators")
}

/// `Z^k` translating along the first `k` axes of `R^n`.
pub fn lattice_in(n: usize, k: usize) -> GroupSpec {
    GroupSpec::new((0..k).map(|i| Isometry::translation(unit(n, i))).collect())
        .expect("k >= 1")
}

/// Cyclic group generated by a screw motion of `R^3`: rotation by `angle`
/// about the z-axis followed by the unit translation along it.
pub fn screw_r3(angle: f64) -> GroupSpec {
    let g = Isometry::new(plane_rotation(3, 0, 1, angle), unit(3, 2)).expect("rotation");
    GroupSpec::new(vec![g]).expect("one generator")
}

/// Screw motion of `R^4`: rotation by `angle` in the `e1 e2`-plane with unit
/// translation along `e4`. The `e3` direction is fixed.
pub fn screw_r4(angle: f64) -> GroupSpec {
    let g = Isometry::new(plane_rotation(4, 0, 1, angle), unit(4, 3)).expect("rotation");
    GroupSpec::new(vec![g]).expect("one generator")
}

/// Glide reflection of `R^2`: reflect across the x-axis, translate by `e1`.
pub fn glide_r2() -> GroupSpec {
    GroupSpec::new(vec![glide_element()]).expect("one generator")
}

pub fn glide_element() -> Isometry {
    let refl = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
    Isometry::new(refl, DVector::from_column_slice(&[1.0, 0.0])).expect("reflection")
}

/// Wallpaper group p4: the unit square lattice together with the quarter turn
/// about the origin.
pub fn wallpaper_p4() -> GroupSpec {
    GroupSpec::new(vec![
        Isometry::translation(unit(2, 0)),
        Isometry::translation(unit(2, 1)),
        Isometry::linear(plane_rotation(2, 0, 1, FRAC_PI_2)).expect("rotation"),
    ])
    .expect("generators")
}

/// The translations `k e3` of `R^3`.
pub fn z_axis_translations() -> GroupSpec {
    GroupSpec::new(vec![Isometry::translation(unit(3, 2))]).expect("one generator")
}

/// Finite cyclic group of rotations of `R^2` of the given order.
pub fn cyclic_rotations(order: usize) -> GroupSpec {
    let angle = std::f64::consts::TAU / order as f64;
    GroupSpec::new(vec![Isometry::linear(plane_rotation(2, 0, 1, angle)).expect("rotation")])
        .expect("one generator")
}
