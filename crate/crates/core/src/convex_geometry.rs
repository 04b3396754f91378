// Copyright 2026 The Shy Coupling Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! Planar domains for reflected motion: discs, ellipses and annuli.
//!
//! Discs and ellipses are strictly convex. The annulus is not convex; it is
//! admitted for rotation couplings, and every convexity-dependent query
//! rejects it with [`GeometryError::NonConvex`].

use alloc::format;
use alloc::string::String;
use core::f64::consts::PI;
use core::ops::{Add, AddAssign, Mul, Neg, Sub};

use thiserror::Error;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ZERO: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Counter-clockwise quarter turn.
    pub fn perp(self) -> Point2 {
        Point2::new(-self.y, self.x)
    }

    pub fn rotate(self, theta: f64) -> Point2 {
        let (s, c) = theta.sin_cos();
        Point2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn rotate_about(self, center: Point2, theta: f64) -> Point2 {
        center + (self - center).rotate(theta)
    }

    pub fn distance(self, o: Point2) -> f64 {
        (self - o).norm()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Point2 {
    fn add_assign(&mut self, o: Point2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }
}

impl Mul<Point2> for f64 {
    type Output = Point2;
    fn mul(self, p: Point2) -> Point2 {
        p * self
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("invalid shape parameters: {0}")]
    InvalidShape(String),
    #[error("projection is undefined at the annulus center")]
    AnnulusCenter,
    #[error("operation requires a convex domain")]
    NonConvex,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Shape {
    Disc { center: Point2, radius: f64 },
    /// Axis-aligned, semi-axes `a ≥ b > 0` along x and y.
    Ellipse { center: Point2, a: f64, b: f64 },
    Annulus { center: Point2, r_in: f64, r_out: f64 },
}

/// Nearest boundary point of a query, the inward unit normal there, and the
/// distance the query lies outside the closure (0 for points inside).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryContact {
    pub point: Point2,
    pub normal: Point2,
    pub push: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvexDomain {
    shape: Shape,
}

const NEWTON_TOL: f64 = 1e-12;
const NEWTON_MAX_ITER: usize = 100;

impl ConvexDomain {
    pub fn disc(center: Point2, radius: f64) -> Result<Self, GeometryError> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(GeometryError::InvalidShape(format!("disc radius {radius}")));
        }
        Ok(Self { shape: Shape::Disc { center, radius } })
    }

    pub fn unit_disc() -> Self {
        Self { shape: Shape::Disc { center: Point2::ZERO, radius: 1.0 } }
    }

    pub fn ellipse(center: Point2, a: f64, b: f64) -> Result<Self, GeometryError> {
        if !(a.is_finite() && b > 0.0 && a >= b) {
            return Err(GeometryError::InvalidShape(format!("ellipse semi-axes a={a}, b={b}")));
        }
        Ok(Self { shape: Shape::Ellipse { center, a, b } })
    }

    pub fn annulus(center: Point2, r_in: f64, r_out: f64) -> Result<Self, GeometryError> {
        if !(r_out.is_finite() && r_in > 0.0 && r_out > r_in) {
            return Err(GeometryError::InvalidShape(format!("annulus radii {r_in}, {r_out}")));
        }
        Ok(Self { shape: Shape::Annulus { center, r_in, r_out } })
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn center(&self) -> Point2 {
        match self.shape {
            Shape::Disc { center, .. } | Shape::Ellipse { center, .. } | Shape::Annulus { center, .. } => center,
        }
    }

    pub fn is_convex(&self) -> bool {
        !matches!(self.shape, Shape::Annulus { .. })
    }

    pub fn diameter(&self) -> f64 {
        match self.shape {
            Shape::Disc { radius, .. } => 2.0 * radius,
            Shape::Ellipse { a, .. } => 2.0 * a,
            Shape::Annulus { r_out, .. } => 2.0 * r_out,
        }
    }

    pub fn area(&self) -> f64 {
        match self.shape {
            Shape::Disc { radius, .. } => PI * radius * radius,
            Shape::Ellipse { a, b, .. } => PI * a * b,
            Shape::Annulus { r_in, r_out, .. } => PI * (r_out * r_out - r_in * r_in),
        }
    }

    /// Boundary length; Ramanujan's second approximation for ellipses.
    pub fn perimeter(&self) -> f64 {
        match self.shape {
            Shape::Disc { radius, .. } => 2.0 * PI * radius,
            Shape::Ellipse { a, b, .. } => {
                let h = ((a - b) / (a + b)).powi(2);
                PI * (a + b) * (1.0 + 3.0 * h / (10.0 + (4.0 - 3.0 * h).sqrt()))
            }
            Shape::Annulus { r_in, r_out, .. } => 2.0 * PI * (r_in + r_out),
        }
    }

    /// Implicit boundary function, negative inside and zero on the boundary.
    pub fn implicit(&self, p: Point2) -> f64 {
        match self.shape {
            Shape::Disc { center, radius } => (p - center).norm2() - radius * radius,
            Shape::Ellipse { center, a, b } => {
                let q = p - center;
                (q.x / a).powi(2) + (q.y / b).powi(2) - 1.0
            }
            Shape::Annulus { center, r_in, r_out } => {
                let rho = (p - center).norm();
                (rho - r_out).max(r_in - rho)
            }
        }
    }

    /// Membership in the closure.
    pub fn contains(&self, p: Point2) -> bool {
        match self.shape {
            Shape::Disc { center, radius } => (p - center).norm2() <= radius * radius,
            Shape::Ellipse { .. } => self.implicit(p) <= 0.0,
            Shape::Annulus { center, r_in, r_out } => {
                let rho2 = (p - center).norm2();
                rho2 >= r_in * r_in && rho2 <= r_out * r_out
            }
        }
    }

    /// Boundary point at parameter `s ∈ [0, 1)`, counter-clockwise. For the
    /// annulus this walks the outer circle.
    pub fn boundary_point(&self, s: f64) -> Point2 {
        let (sn, cs) = (2.0 * PI * s).sin_cos();
        match self.shape {
            Shape::Disc { center, radius } => center + Point2::new(cs, sn) * radius,
            Shape::Ellipse { center, a, b } => center + Point2::new(a * cs, b * sn),
            Shape::Annulus { center, r_out, .. } => center + Point2::new(cs, sn) * r_out,
        }
    }

    /// Inward unit normal at a boundary point.
    pub fn inward_normal(&self, q: Point2) -> Point2 {
        match self.shape {
            Shape::Disc { center, .. } => unit(center - q),
            Shape::Ellipse { center, a, b } => {
                let r = q - center;
                unit(Point2::new(-r.x / (a * a), -r.y / (b * b)))
            }
            Shape::Annulus { center, r_in, r_out } => {
                let r = q - center;
                if r.norm() < 0.5 * (r_in + r_out) {
                    unit(r)
                } else {
                    unit(-r)
                }
            }
        }
    }

    /// Nearest boundary point with its inward normal, and the push distance
    /// `|p - point|` when `p` lies outside the closure.
    pub fn project_with_normal(&self, p: Point2) -> Result<BoundaryContact, GeometryError> {
        match self.shape {
            Shape::Disc { center, radius } => {
                let r = p - center;
                let rho = r.norm();
                let dir = if rho > 0.0 { r * (1.0 / rho) } else { Point2::new(1.0, 0.0) };
                let point = center + dir * radius;
                Ok(BoundaryContact { point, normal: -dir, push: (rho - radius).max(0.0) })
            }
            Shape::Ellipse { center, a, b } => {
                let point = center + nearest_on_ellipse(p - center, a, b);
                let push = if self.contains(p) { 0.0 } else { p.distance(point) };
                Ok(BoundaryContact { point, normal: self.inward_normal(point), push })
            }
            Shape::Annulus { center, r_in, r_out } => {
                let r = p - center;
                let rho = r.norm();
                if rho == 0.0 {
                    return Err(GeometryError::AnnulusCenter);
                }
                let dir = r * (1.0 / rho);
                if rho >= 0.5 * (r_in + r_out) {
                    Ok(BoundaryContact { point: center + dir * r_out, normal: -dir, push: (rho - r_out).max(0.0) })
                } else {
                    Ok(BoundaryContact { point: center + dir * r_in, normal: dir, push: (r_in - rho).max(0.0) })
                }
            }
        }
    }

    /// Estimate of the largest `a` with `(y - x)·n(x) ≥ a |x - y|` for all
    /// boundary `x` and closure `y` with `|x - y| ≥ eps`, from `n_samples`
    /// evenly spaced boundary points.
    pub fn strict_convexity_margin(&self, eps: f64, n_samples: usize) -> Result<f64, GeometryError> {
        if !self.is_convex() {
            return Err(GeometryError::NonConvex);
        }
        if !(eps > 0.0) || n_samples < 3 {
            return Err(GeometryError::InvalidArgument(format!("eps={eps}, n_samples={n_samples}")));
        }
        if eps > self.diameter() {
            return Err(GeometryError::InvalidArgument(format!("eps {eps} exceeds the diameter")));
        }
        // For convex shapes the minimizing y lies on the boundary.
        let pts: alloc::vec::Vec<Point2> =
            (0..n_samples).map(|i| self.boundary_point(i as f64 / n_samples as f64)).collect();
        let mut best = f64::INFINITY;
        for &x in &pts {
            let n = self.inward_normal(x);
            for &y in &pts {
                let d = y - x;
                let len = d.norm();
                if len >= eps {
                    best = best.min(d.dot(n) / len);
                }
            }
        }
        Ok(best)
    }
}

fn unit(p: Point2) -> Point2 {
    p * (1.0 / p.norm())
}

/// Nearest point of the centered ellipse `(x/a)² + (y/b)² = 1` to `p`.
fn nearest_on_ellipse(p: Point2, a: f64, b: f64) -> Point2 {
    let (px, py) = (p.x.abs(), p.y.abs());
    let (sx, sy) = (p.x.signum(), p.y.signum());
    let g = (px / a).powi(2) + (py / b).powi(2) - 1.0;
    if g == 0.0 {
        return p;
    }
    let q = if py == 0.0 && g < 0.0 {
        // Inside, on the major axis: the nearest point leaves the axis once
        // the evolute is crossed.
        let c = a * a - b * b;
        if px < c / a {
            let x = a * a * px / c;
            Point2::new(x, b * (1.0 - (x / a).powi(2)).max(0.0).sqrt())
        } else {
            Point2::new(a, 0.0)
        }
    } else {
        let t = solve_lagrange(px, py, a, b, g > 0.0);
        Point2::new(a * a * px / (a * a + t), b * b * py / (b * b + t))
    };
    Point2::new(sx * q.x, sy * q.y)
}

/// Root of `(a x/(a²+t))² + (b y/(b²+t))² = 1` by Newton's method kept
/// inside a bisection bracket.
fn solve_lagrange(x: f64, y: f64, a: f64, b: f64, outside: bool) -> f64 {
    let f = |t: f64| (a * x / (a * a + t)).powi(2) + (b * y / (b * b + t)).powi(2) - 1.0;
    let df = |t: f64| {
        -2.0 * ((a * x).powi(2) / (a * a + t).powi(3) + (b * y).powi(2) / (b * b + t).powi(3))
    };
    let (mut lo, mut hi) = if outside {
        (0.0, a * (x.hypot(y)) + a * a)
    } else {
        (-b * b, 0.0)
    };
    let mut t = if outside { b * y.max(x) } else { 0.5 * lo };
    if !(t > lo && t < hi) {
        t = 0.5 * (lo + hi);
    }
    for _ in 0..NEWTON_MAX_ITER {
        let v = f(t);
        if v > 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let mut next = t - v / df(t);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - t).abs() <= NEWTON_TOL * (1.0 + t.abs()) {
            return next;
        }
        t = next;
    }
    t
}
