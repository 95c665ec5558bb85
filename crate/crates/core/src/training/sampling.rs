use rand::Rng;

use super::Domain;
use crate::energies::PointSet;
use crate::error::{ensure, Result};

/// Uniform draw from the open interval `(0, 1)`.
fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

fn interior_point<R: Rng + ?Sized>(domain: Domain, rng: &mut R, out: &mut Vec<f64>) {
    match domain {
        Domain::Interval => out.push(open_unit(rng)),
        Domain::UnitSquare => {
            out.push(open_unit(rng));
            out.push(open_unit(rng));
        }
        Domain::LShape => loop {
            let x = [open_unit(rng), open_unit(rng)];
            if domain.contains(&x) {
                out.extend_from_slice(&x);
                break;
            }
        },
    }
}

/// Point at arc length `s ∈ [0, |∂Ω|)` along the boundary (2-D domains).
fn boundary_at(domain: Domain, s: f64) -> [f64; 2] {
    match domain {
        Domain::UnitSquare => match s {
            s if s < 1.0 => [s, 0.0],
            s if s < 2.0 => [1.0, s - 1.0],
            s if s < 3.0 => [3.0 - s, 1.0],
            s => [0.0, 4.0 - s],
        },
        // counter-clockwise from the origin: bottom (1), right (1/2),
        // re-entrant horizontal (1/2), re-entrant vertical (1/2), top (1/2),
        // left (1)
        Domain::LShape => match s {
            s if s < 1.0 => [s, 0.0],
            s if s < 1.5 => [1.0, s - 1.0],
            s if s < 2.0 => [1.0 - (s - 1.5), 0.5],
            s if s < 2.5 => [0.5, 0.5 + (s - 2.0)],
            s if s < 3.0 => [0.5 - (s - 2.5), 1.0],
            s => [0.0, 1.0 - (s - 3.0)],
        },
        Domain::Interval => unreachable!("interval boundary is enumerated"),
    }
}

/// `n` i.i.d. uniform points in `Ω` with Monte-Carlo weights `|Ω| / n`.
/// The L-shape is sampled by rejection from the unit square.
pub fn sample_interior<R: Rng + ?Sized>(domain: Domain, n: usize, rng: &mut R) -> Result<PointSet> {
    ensure!(n >= 1, "need at least one interior point");
    let mut points = Vec::with_capacity(n * domain.spatial_dim());
    for _ in 0..n {
        interior_point(domain, rng, &mut points);
    }
    PointSet::new(domain.spatial_dim(), points, vec![domain.measure() / n as f64; n])
}

/// `n` uniform points on `∂Ω` with weights `|∂Ω| / n`.
///
/// The interval boundary is zero-dimensional, so it is enumerated rather
/// than sampled: the two endpoints with unit weight each, whatever `n`.
pub fn sample_boundary<R: Rng + ?Sized>(domain: Domain, n: usize, rng: &mut R) -> Result<PointSet> {
    ensure!(n >= 1, "need at least one boundary point");
    if domain == Domain::Interval {
        return PointSet::new(1, vec![0.0, 1.0], vec![1.0, 1.0]);
    }
    let perimeter = domain.boundary_measure();
    let mut points = Vec::with_capacity(2 * n);
    for _ in 0..n {
        let s = rng.random::<f64>() * perimeter;
        points.extend_from_slice(&boundary_at(domain, s));
    }
    PointSet::new(2, points, vec![perimeter / n as f64; n])
}

/// `n` uniform points in `Ω × (0, T]` with weights `|Ω| T / n`; time is the
/// last coordinate.
pub fn sample_space_time_interior<R: Rng + ?Sized>(
    domain: Domain,
    horizon: f64,
    n: usize,
    rng: &mut R,
) -> Result<PointSet> {
    ensure!(n >= 1, "need at least one space-time point");
    let d = domain.spatial_dim();
    let mut points = Vec::with_capacity(n * (d + 1));
    for _ in 0..n {
        interior_point(domain, rng, &mut points);
        points.push(horizon * open_unit(rng));
    }
    PointSet::new(d + 1, points, vec![domain.measure() * horizon / n as f64; n])
}

/// `n` uniform points on `∂Ω × (0, T]` with weights `|∂Ω| T / n`.
pub fn sample_space_time_boundary<R: Rng + ?Sized>(
    domain: Domain,
    horizon: f64,
    n: usize,
    rng: &mut R,
) -> Result<PointSet> {
    ensure!(n >= 1, "need at least one boundary point");
    let d = domain.spatial_dim();
    let mut points = Vec::with_capacity(n * (d + 1));
    for i in 0..n {
        if domain == Domain::Interval {
            points.push((i % 2) as f64);
        } else {
            let s = rng.random::<f64>() * domain.boundary_measure();
            points.extend_from_slice(&boundary_at(domain, s));
        }
        points.push(horizon * open_unit(rng));
    }
    PointSet::new(d + 1, points, vec![domain.boundary_measure() * horizon / n as f64; n])
}
