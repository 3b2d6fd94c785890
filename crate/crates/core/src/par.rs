use rayon::prelude::*;

use crate::sphere::SpherePoint;

/// Order-preserving parallel map over points; `i` is the point index.
pub fn par_map<T, F>(points: &[SpherePoint], f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &SpherePoint) -> T + Sync + Send,
{
    points.par_iter().enumerate().map(|(i, p)| f(i, p)).collect()
}
