//! Fixtures shared by the benchmarks.

use kontact::double::DoubleKContact;
use kontact::suite::{regular_points, Manifold};
use kontact::SpherePoint;

/// The shipped pair on `manifold` and `count` regular points (|f| ≤ 0.9).
pub fn fixture(manifold: Manifold, count: usize) -> (DoubleKContact, Vec<SpherePoint>) {
    let d = manifold.pair().expect("shipped pairs build");
    let pts = regular_points(&d, count, 7, 0.9).expect("regular points");
    (d, pts)
}
