// Copyright 2026 The Shy Coupling Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! Coupled reflected Brownian motions in planar domains.
//!
//! Each particle follows the projected Euler scheme: add the driving
//! increment, and if the candidate leaves the closure, project it back. The
//! projection distance is the boundary local-time increment.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use thiserror::Error;

use crate::convex_geometry::{ConvexDomain, GeometryError, Point2, Shape};
use crate::graph_diffusion::steps_for;
use crate::rng::gaussian;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReflectedError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("start point {0} lies outside the domain")]
    OutsideDomain(String),
    #[error("rotation coupling needs an annulus")]
    RotationNeedsAnnulus,
    #[error("growth driver needs distinct driver positions")]
    CoincidentDrivers,
    #[error("invalid step parameters: {0}")]
    InvalidStep(String),
    #[error("projection did not settle inside the domain")]
    ProjectionFailed,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DriverKind {
    /// Same increment for both particles.
    Synchronous,
    /// `Y` uses the increment reflected across the perpendicular bisector of
    /// `X - Y`, until the particles meet; synchronous afterwards.
    Mirror,
    Independent,
    /// `Y` copies the increment along `W - B` and reverses it across.
    GrowthEx42,
    /// `Y` is the rotation of `X` by the angle about the domain center.
    Rotation(f64),
}

impl fmt::Display for DriverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DriverKind::Synchronous => f.write_str("synchronous"),
            DriverKind::Mirror => f.write_str("mirror"),
            DriverKind::Independent => f.write_str("independent"),
            DriverKind::GrowthEx42 => f.write_str("growth_ex42"),
            DriverKind::Rotation(theta) => write!(f, "rotation({theta})"),
        }
    }
}

/// Pair positions, boundary local times and the free driving pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairState {
    pub t: f64,
    pub x: Point2,
    pub y: Point2,
    pub lx: f64,
    pub ly: f64,
    /// `x0 + B_t`.
    pub b: Point2,
    /// `y0 + W_t`.
    pub w: Point2,
    /// Mirror driver has switched to synchronous.
    pub coupled: bool,
}

impl PairState {
    pub fn new(x0: Point2, y0: Point2) -> Self {
        Self { t: 0.0, x: x0, y: y0, lx: 0.0, ly: 0.0, b: x0, w: y0, coupled: false }
    }

    pub fn distance(&self) -> f64 {
        self.x.distance(self.y)
    }
}

fn gaussian2<R: Rng + ?Sized>(rng: &mut R, sd: f64) -> Point2 {
    let x = gaussian(rng, sd);
    let y = gaussian(rng, sd);
    Point2::new(x, y)
}

/// Increments `(dB_x, dB_y)` for one step given the base increment `db`;
/// the independent driver draws its second increment at standard deviation
/// `sd`.
pub fn driver_increments<R: Rng + ?Sized>(
    kind: DriverKind,
    state: &PairState,
    db: Point2,
    sd: f64,
    rng: &mut R,
) -> Result<(Point2, Point2), ReflectedError> {
    match kind {
        DriverKind::Synchronous => Ok((db, db)),
        DriverKind::Independent => Ok((db, gaussian2(rng, sd))),
        DriverKind::Mirror => {
            let diff = state.x - state.y;
            let len = diff.norm();
            if state.coupled || len == 0.0 {
                return Ok((db, db));
            }
            let e = diff * (1.0 / len);
            Ok((db, db - e * (2.0 * e.dot(db))))
        }
        DriverKind::GrowthEx42 => {
            let sep = state.w - state.b;
            let len = sep.norm();
            if len == 0.0 {
                return Err(ReflectedError::CoincidentDrivers);
            }
            let e = sep * (1.0 / len);
            let ep = e.perp();
            Ok((db, e * e.dot(db) - ep * ep.dot(db)))
        }
        DriverKind::Rotation(theta) => Ok((db, db.rotate(theta))),
    }
}

const MAX_PROJECTIONS: usize = 8;
const MAX_HALVINGS: usize = 32;

/// Nudges a projected point inward until it passes the closure test.
fn settle(d: &ConvexDomain, mut q: Point2, normal: Point2) -> Option<Point2> {
    let scale = 1.0 + q.norm() + d.diameter();
    let mut eps = f64::EPSILON * scale;
    for _ in 0..64 {
        if d.contains(q) {
            return Some(q);
        }
        q += normal * eps;
        eps *= 2.0;
    }
    None
}

/// Projected Euler step: `(p + dB, 0)` inside, otherwise the projection and
/// the push distance.
pub fn step_skorokhod(d: &ConvexDomain, p: Point2, db: Point2) -> Result<(Point2, f64), ReflectedError> {
    let mut inc = db;
    'halve: for _ in 0..MAX_HALVINGS {
        let mut cand = p + inc;
        let mut pushed = 0.0;
        for _ in 0..MAX_PROJECTIONS {
            if d.contains(cand) {
                return Ok((cand, pushed));
            }
            let contact = match d.project_with_normal(cand) {
                Ok(c) => c,
                Err(GeometryError::AnnulusCenter) => {
                    inc = inc * 0.5;
                    continue 'halve;
                }
                Err(e) => return Err(e.into()),
            };
            pushed += contact.push;
            match settle(d, contact.point, contact.normal) {
                Some(q) => return Ok((q, pushed)),
                None => cand = contact.point,
            }
        }
        inc = inc * 0.5;
    }
    Err(ReflectedError::ProjectionFailed)
}

/// One step of the coupled pair, as seen by observers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairStep {
    pub t: f64,
    pub x: Point2,
    pub y: Point2,
    pub dist: f64,
    pub lx: f64,
    pub ly: f64,
    pub dlx: f64,
    pub dly: f64,
    pub dbx: Point2,
    pub dby: Point2,
    /// Separation of the free driving pair, `|W - B|`.
    pub driver_sep: f64,
}

/// Per-step callback for streaming simulations.
pub trait PairObserver {
    fn observe(&mut self, step: &PairStep);
}

impl<F: FnMut(&PairStep)> PairObserver for F {
    fn observe(&mut self, step: &PairStep) {
        self(step)
    }
}

/// Discretized coupled trajectory, step 0 being the start.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PairPath {
    pub t: Vec<f64>,
    pub x: Vec<Point2>,
    pub y: Vec<Point2>,
    pub dist: Vec<f64>,
    pub lx: Vec<f64>,
    pub ly: Vec<f64>,
    /// Driver increments of step `i` (length one less than the positions).
    pub dbx: Vec<Point2>,
    pub dby: Vec<Point2>,
    pub driver_sep: Vec<f64>,
}

impl PairPath {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    fn push_state(&mut self, s: &PairState) {
        self.t.push(s.t);
        self.x.push(s.x);
        self.y.push(s.y);
        self.dist.push(s.distance());
        self.lx.push(s.lx);
        self.ly.push(s.ly);
        self.driver_sep.push(s.w.distance(s.b));
    }

    /// Rows `t, x1, x2, y1, y2, dist, lx, ly`.
    pub fn rows(&self) -> impl Iterator<Item = [f64; 8]> + '_ {
        (0..self.len()).map(move |i| {
            [self.t[i], self.x[i].x, self.x[i].y, self.y[i].x, self.y[i].y, self.dist[i], self.lx[i], self.ly[i]]
        })
    }
}

pub const CSV_HEADER: &str = "t,x1,x2,y1,y2,dist,lx,ly";

/// Validates the pairing of domain, driver and start points.
pub fn check_pair(d: &ConvexDomain, kind: DriverKind, x0: Point2, y0: Point2) -> Result<(), ReflectedError> {
    for p in [x0, y0] {
        if !d.contains(p) {
            return Err(ReflectedError::OutsideDomain(format!("({}, {})", p.x, p.y)));
        }
    }
    match kind {
        DriverKind::Rotation(_) if !matches!(d.shape(), Shape::Annulus { .. }) => Err(ReflectedError::RotationNeedsAnnulus),
        DriverKind::GrowthEx42 if x0 == y0 => Err(ReflectedError::CoincidentDrivers),
        _ => Ok(()),
    }
}

/// Advances the pair by one step of size `dt`.
pub fn step_pair<R: Rng + ?Sized>(
    d: &ConvexDomain,
    kind: DriverKind,
    s: &mut PairState,
    dt: f64,
    rng: &mut R,
) -> Result<PairStep, ReflectedError> {
    let sd = dt.sqrt();
    let db = gaussian2(rng, sd);
    let (dbx, dby) = driver_increments(kind, s, db, sd, rng)?;
    s.b += dbx;
    s.w += dby;
    let (x, dlx) = step_skorokhod(d, s.x, dbx)?;
    let (y, dly) = match kind {
        DriverKind::Rotation(theta) => {
            let c = d.center();
            let y = x.rotate_about(c, theta);
            let y = if d.contains(y) {
                y
            } else {
                let contact = d.project_with_normal(y)?;
                settle(d, y, contact.normal).ok_or(ReflectedError::ProjectionFailed)?
            };
            (y, dlx)
        }
        _ => step_skorokhod(d, s.y, dby)?,
    };
    if kind == DriverKind::Mirror && !s.coupled {
        // Coupled once the particles meet or pass each other along the
        // reflection axis.
        let before = s.x - s.y;
        if (x - y).dot(before) <= 0.0 {
            s.coupled = true;
        }
    }
    s.x = x;
    s.y = y;
    s.lx += dlx;
    s.ly += dly;
    s.t += dt;
    Ok(PairStep {
        t: s.t,
        x,
        y,
        dist: x.distance(y),
        lx: s.lx,
        ly: s.ly,
        dlx,
        dly,
        dbx,
        dby,
        driver_sep: s.w.distance(s.b),
    })
}

fn check_step(dt: f64, t_max: f64) -> Result<(), ReflectedError> {
    if !(dt > 0.0 && dt.is_finite() && t_max > 0.0 && t_max.is_finite()) {
        return Err(ReflectedError::InvalidStep(format!("dt = {dt}, horizon = {t_max}")));
    }
    Ok(())
}

/// Initial state; for the rotation driver `y0` is replaced by the image of `x0`.
pub fn initial_state(d: &ConvexDomain, kind: DriverKind, x0: Point2, y0: Point2) -> Result<PairState, ReflectedError> {
    let y0 = match kind {
        DriverKind::Rotation(theta) => x0.rotate_about(d.center(), theta),
        _ => y0,
    };
    check_pair(d, kind, x0, y0)?;
    Ok(PairState::new(x0, y0))
}

/// Streams every step to `observer` without storing the path; returns the
/// final state.
pub fn simulate_pair_observed<R: Rng + ?Sized, O: PairObserver + ?Sized>(
    d: &ConvexDomain,
    kind: DriverKind,
    x0: Point2,
    y0: Point2,
    dt: f64,
    t_max: f64,
    rng: &mut R,
    observer: &mut O,
) -> Result<PairState, ReflectedError> {
    check_step(dt, t_max)?;
    let mut s = initial_state(d, kind, x0, y0)?;
    for _ in 0..steps_for(t_max, dt) {
        let step = step_pair(d, kind, &mut s, dt, rng)?;
        observer.observe(&step);
    }
    Ok(s)
}

/// Full trajectory of the coupled pair.
pub fn simulate_pair<R: Rng + ?Sized>(
    d: &ConvexDomain,
    kind: DriverKind,
    x0: Point2,
    y0: Point2,
    dt: f64,
    t_max: f64,
    rng: &mut R,
) -> Result<PairPath, ReflectedError> {
    check_step(dt, t_max)?;
    let mut s = initial_state(d, kind, x0, y0)?;
    let n = steps_for(t_max, dt);
    let mut path = PairPath::default();
    path.push_state(&s);
    path.dbx.reserve(n);
    path.dby.reserve(n);
    for _ in 0..n {
        let step = step_pair(d, kind, &mut s, dt, rng)?;
        path.push_state(&s);
        path.dbx.push(step.dbx);
        path.dby.push(step.dby);
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::path_stream;
    use core::f64::consts::PI;

    extern crate std;

    #[test]
    fn skorokhod_interior_and_push() {
        let d = ConvexDomain::unit_disc();
        let (q, dl) = step_skorokhod(&d, Point2::new(0.1, 0.2), Point2::new(0.01, -0.02)).unwrap();
        assert_eq!(q, Point2::new(0.1, 0.2) + Point2::new(0.01, -0.02));
        assert_eq!(dl, 0.0);
        let (q, dl) = step_skorokhod(&d, Point2::new(1.0, 0.0), Point2::new(0.1, 0.0)).unwrap();
        assert!(q.distance(Point2::new(1.0, 0.0)) < 1e-12);
        assert!(d.contains(q));
        assert!((dl - 0.1).abs() < 1e-12);
    }

    #[test]
    fn annulus_center_halves_step() {
        let d = ConvexDomain::annulus(Point2::ZERO, 1.0, 2.0).unwrap();
        let (q, dl) = step_skorokhod(&d, Point2::new(1.0, 0.0), Point2::new(-1.0, 0.0)).unwrap();
        assert!(d.contains(q));
        assert!(dl >= 0.0);
    }

    #[test]
    fn growth_driver_directions() {
        let mut rng = path_stream(31, 0);
        let s = PairState::new(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0));
        let (_, dy) = driver_increments(DriverKind::GrowthEx42, &s, Point2::new(0.3, 0.0), 0.1, &mut rng).unwrap();
        assert_eq!(dy, Point2::new(0.3, 0.0));
        let (_, dy) = driver_increments(DriverKind::GrowthEx42, &s, Point2::new(0.0, 0.3), 0.1, &mut rng).unwrap();
        assert_eq!(dy, Point2::new(0.0, -0.3));
        let same = PairState::new(Point2::ZERO, Point2::ZERO);
        assert_eq!(
            driver_increments(DriverKind::GrowthEx42, &same, Point2::new(0.0, 0.3), 0.1, &mut rng),
            Err(ReflectedError::CoincidentDrivers)
        );
    }

    #[test]
    fn growth_driver_is_orthogonal_reflection() {
        // |dB_y| = |dB|, while the difference increment is 2 (e_perp . dB) e_perp.
        let mut rng = path_stream(32, 0);
        let s = PairState::new(Point2::new(0.2, -0.1), Point2::new(-0.4, 0.7));
        for _ in 0..1000 {
            let db = gaussian2(&mut rng, 0.1);
            let (dx, dy) = driver_increments(DriverKind::GrowthEx42, &s, db, 0.1, &mut rng).unwrap();
            assert!((dy.norm2() - dx.norm2()).abs() < 1e-15);
            let e = (s.w - s.b) * (1.0 / (s.w - s.b).norm());
            let ep = e.perp();
            assert!(((dy - dx).norm2() - 4.0 * ep.dot(db).powi(2)).abs() < 1e-14);
        }
    }

    #[test]
    fn mirror_driver_reflects() {
        let mut rng = path_stream(33, 0);
        let s = PairState::new(Point2::new(-0.5, 0.0), Point2::new(0.5, 0.0));
        let (dx, dy) = driver_increments(DriverKind::Mirror, &s, Point2::new(0.1, 0.2), 0.1, &mut rng).unwrap();
        assert_eq!(dx, Point2::new(0.1, 0.2));
        assert!(dy.distance(Point2::new(-0.1, 0.2)) < 1e-15);
    }

    #[test]
    fn positions_stay_in_closure_and_local_time_only_on_push() {
        let d = ConvexDomain::ellipse(Point2::ZERO, 2.0, 1.0).unwrap();
        let mut rng = path_stream(34, 0);
        for kind in [DriverKind::Synchronous, DriverKind::Mirror, DriverKind::Independent] {
            let path = simulate_pair(&d, kind, Point2::new(1.5, 0.0), Point2::new(-1.5, 0.5), 1e-3, 20.0, &mut rng).unwrap();
            for i in 0..path.len() {
                assert!(d.contains(path.x[i]) && d.contains(path.y[i]));
            }
            for i in 1..path.len() {
                assert!(path.lx[i] >= path.lx[i - 1]);
                if path.lx[i] > path.lx[i - 1] {
                    assert!(!d.contains(path.x[i - 1] + path.dbx[i - 1]));
                } else {
                    assert_eq!(path.x[i], path.x[i - 1] + path.dbx[i - 1]);
                }
            }
        }
    }

    #[test]
    fn rotation_is_exact_chord() {
        let d = ConvexDomain::annulus(Point2::ZERO, 1.0, 2.0).unwrap();
        let theta = PI / 2.0;
        let mut rng = path_stream(35, 0);
        let path = simulate_pair(&d, DriverKind::Rotation(theta), Point2::new(1.5, 0.0), Point2::ZERO, 1e-3, 10.0, &mut rng)
            .unwrap();
        for i in 0..path.len() {
            let chord = 2.0 * path.x[i].norm() * (theta / 2.0).sin();
            assert!((path.dist[i] - chord).abs() < 1e-9);
            assert!(path.dist[i] >= 2.0 * (theta / 2.0).sin() - 1e-9);
        }
        assert_eq!(
            check_pair(&ConvexDomain::unit_disc(), DriverKind::Rotation(1.0), Point2::ZERO, Point2::ZERO),
            Err(ReflectedError::RotationNeedsAnnulus)
        );
    }

    #[test]
    fn synchronous_distance_nonincreasing_in_disc() {
        let d = ConvexDomain::unit_disc();
        let mut rng = path_stream(36, 0);
        let path = simulate_pair(&d, DriverKind::Synchronous, Point2::new(0.5, 0.0), Point2::new(-0.5, 0.0), 1e-3, 10.0, &mut rng)
            .unwrap();
        for i in 1..path.len() {
            assert!(path.dist[i] <= path.dist[i - 1] + 1e-12);
        }
    }

    #[test]
    fn csv_rows() {
        let d = ConvexDomain::unit_disc();
        let mut rng = path_stream(37, 0);
        let path = simulate_pair(&d, DriverKind::Independent, Point2::ZERO, Point2::new(0.5, 0.0), 1e-2, 0.1, &mut rng).unwrap();
        assert_eq!(path.len(), 11);
        assert_eq!(path.rows().count(), 11);
        assert_eq!(CSV_HEADER.split(',').count(), 8);
        assert!(simulate_pair(&d, DriverKind::Independent, Point2::new(2.0, 0.0), Point2::ZERO, 1e-2, 0.1, &mut rng).is_err());
    }
}
