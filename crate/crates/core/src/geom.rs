//! Hyperbolic geometry in the Poincare disk.
//!
//! Isometries are stored as normalized matrices `[[a, b], [conj b, conj a]]`
//! with `|a|^2 - |b|^2 = 1`, acting by `z -> (a z + b) / (conj(b) z + conj(a))`.

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Direction in which boundary arcs are traversed from `left` to `right`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    Clockwise,
    CounterClockwise,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Clockwise => -1.0,
            Orientation::CounterClockwise => 1.0,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Orientation::Clockwise => Orientation::CounterClockwise,
            Orientation::CounterClockwise => Orientation::Clockwise,
        }
    }
}

/// Global boundary orientation under which lexicographic order of codes and
/// boundary order agree. Checked against the kneading calibration in `coding`.
pub const ORIENT: Orientation = Orientation::Clockwise;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskPoint {
    pub re: f64,
    pub im: f64,
}

impl DiskPoint {
    pub const ORIGIN: DiskPoint = DiskPoint { re: 0.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Result<Self> {
        if re * re + im * im < 1.0 - Tolerances::DEFAULT.boundary {
            Ok(DiskPoint { re, im })
        } else {
            Err(Error::OutsideDisk(re, im))
        }
    }

    /// Builds a point without the interior check. Used for far-away vertices
    /// whose disk coordinates have lost their radial precision.
    pub fn from_complex(z: C64) -> Self {
        DiskPoint { re: z.re, im: z.im }
    }

    pub fn to_complex(self) -> C64 {
        C64::new(self.re, self.im)
    }

    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn arg(self) -> f64 {
        self.im.atan2(self.re)
    }

    /// Hyperbolic distance (curvature -1).
    pub fn dist(self, other: DiskPoint) -> f64 {
        let z = self.to_complex();
        let w = other.to_complex();
        let num = (z - w).norm();
        let den = (C64::new(1.0, 0.0) - w.conj() * z).norm();
        2.0 * (num / den).min(1.0 - 1e-16).atanh()
    }

    pub fn euclid_dist(self, other: DiskPoint) -> f64 {
        (self.to_complex() - other.to_complex()).norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub theta: f64,
}

impl BoundaryPoint {
    pub fn new(theta: f64) -> Self {
        BoundaryPoint {
            theta: normalize_angle(theta),
        }
    }

    pub fn from_complex(z: C64) -> Self {
        BoundaryPoint::new(z.im.atan2(z.re))
    }

    pub fn to_complex(self) -> C64 {
        C64::from_polar(1.0, self.theta)
    }

    /// Unsigned angular distance in `[0, pi]`.
    pub fn angular_dist(self, other: BoundaryPoint) -> f64 {
        let d = normalize_angle(self.theta - other.theta);
        d.min(TAU - d)
    }

    pub fn rotated(self, angle: f64) -> Self {
        BoundaryPoint::new(self.theta + angle)
    }
}

pub fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Oriented angular offset from `from` to `to`, in `[0, 2pi)`.
pub fn oriented_offset(from: BoundaryPoint, to: BoundaryPoint, orient: Orientation) -> f64 {
    normalize_angle(orient.sign() * (to.theta - from.theta))
}

/// Orientation-preserving isometry of the disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Isometry {
    pub a: C64,
    pub b: C64,
}

impl Isometry {
    pub const IDENTITY: Isometry = Isometry {
        a: C64 { re: 1.0, im: 0.0 },
        b: C64 { re: 0.0, im: 0.0 },
    };

    /// Normalizes `(a, b)` so that `|a|^2 - |b|^2 = 1`.
    pub fn new(a: C64, b: C64) -> Self {
        let det = a.norm_sqr() - b.norm_sqr();
        debug_assert!(det > 0.0, "not a disk isometry: det = {det}");
        let s = 1.0 / det.sqrt();
        Isometry { a: a * s, b: b * s }
    }

    /// The hyperbolic translation along the diameter through `c` sending 0 to `c`.
    pub fn translation_to(c: DiskPoint) -> Self {
        Isometry::new(C64::new(1.0, 0.0), c.to_complex())
    }

    /// Rotation about the origin by `angle` radians, counterclockwise.
    pub fn rotation_origin(angle: f64) -> Self {
        Isometry {
            a: C64::from_polar(1.0, angle / 2.0),
            b: C64::new(0.0, 0.0),
        }
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        let a = self.a * other.a + self.b * other.b.conj();
        let b = self.a * other.b + self.b * other.a.conj();
        // For large entries `|a|^2 - |b|^2` cancels catastrophically; the
        // product of unit matrices is then left as computed.
        if a.norm_sqr() > 1e12 {
            return Isometry { a, b };
        }
        Isometry::new(a, b)
    }

    pub fn inverse(&self) -> Isometry {
        Isometry {
            a: self.a.conj(),
            b: -self.b,
        }
    }

    pub fn pow(&self, n: i64) -> Isometry {
        let base = if n < 0 { self.inverse() } else { *self };
        let mut out = Isometry::IDENTITY;
        for _ in 0..n.unsigned_abs() {
            out = out.compose(&base);
        }
        out
    }

    pub fn apply(&self, z: C64) -> C64 {
        (self.a * z + self.b) / (self.b.conj() * z + self.a.conj())
    }

    pub fn trace(&self) -> f64 {
        2.0 * self.a.re
    }

    pub fn det(&self) -> f64 {
        self.a.norm_sqr() - self.b.norm_sqr()
    }

    /// Image of the origin.
    pub fn origin_image(&self) -> DiskPoint {
        DiskPoint::from_complex(self.b / self.a.conj())
    }

    /// Distance between the two matrices modulo sign, relative to their size.
    pub fn matrix_dist(&self, other: &Isometry) -> f64 {
        let scale = self.a.norm().max(other.a.norm());
        let plus = (self.a - other.a).norm() + (self.b - other.b).norm();
        let minus = (self.a + other.a).norm() + (self.b + other.b).norm();
        plus.min(minus) / scale
    }

    pub fn approx_eq(&self, other: &Isometry, tol: f64) -> bool {
        self.matrix_dist(other) < tol
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.approx_eq(&Isometry::IDENTITY, tol)
    }

    /// Hyperbolic distance from `x` to its image, evaluated stably from the
    /// matrix of `self` conjugated to move `x` to the origin.
    pub fn displacement_at(&self, x: DiskPoint) -> f64 {
        let t = Isometry::translation_to(x);
        let h = t.inverse().compose(self).compose(&t);
        // cosh d = 2|a|^2 - 1
        (2.0 * h.a.norm_sqr() - 1.0).max(1.0).acosh()
    }
}

impl fmt::Display for Isometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[a = {:.6}{:+.6}i, b = {:.6}{:+.6}i]",
            self.a.re, self.a.im, self.b.re, self.b.im
        )
    }
}

/// Anything an isometry can move.
pub trait Transform: Sized {
    fn transformed(&self, g: &Isometry) -> Self;
}

impl Transform for DiskPoint {
    fn transformed(&self, g: &Isometry) -> Self {
        DiskPoint::from_complex(g.apply(self.to_complex()))
    }
}

impl Transform for BoundaryPoint {
    fn transformed(&self, g: &Isometry) -> Self {
        BoundaryPoint::from_complex(g.apply(self.to_complex()))
    }
}

impl Transform for BoundaryArc {
    fn transformed(&self, g: &Isometry) -> Self {
        BoundaryArc {
            left: self.left.transformed(g),
            right: self.right.transformed(g),
        }
    }
}

pub fn transform<T: Transform>(g: &Isometry, x: &T) -> T {
    x.transformed(g)
}

/// Elliptic isometry fixing `center`, rotating by `2 pi k / n` counterclockwise.
pub fn rotation_about(center: DiskPoint, k: i64, n: u32) -> Isometry {
    let angle = TAU * (k as f64) / (n as f64);
    let t = Isometry::translation_to(center);
    t.compose(&Isometry::rotation_origin(angle)).compose(&t.inverse())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum IsometryClass {
    Identity,
    Elliptic {
        center: DiskPoint,
    },
    Parabolic {
        fixed: BoundaryPoint,
    },
    Hyperbolic {
        attracting: BoundaryPoint,
        repelling: BoundaryPoint,
    },
}

impl IsometryClass {
    pub fn tag(&self) -> &'static str {
        match self {
            IsometryClass::Identity => "identity",
            IsometryClass::Elliptic { .. } => "elliptic",
            IsometryClass::Parabolic { .. } => "parabolic",
            IsometryClass::Hyperbolic { .. } => "hyperbolic",
        }
    }
}

pub fn classify(g: &Isometry) -> IsometryClass {
    classify_with(g, &Tolerances::DEFAULT)
}

pub fn classify_with(g: &Isometry, tol: &Tolerances) -> IsometryClass {
    if g.is_identity(tol.identity) {
        return IsometryClass::Identity;
    }
    let tr = g.trace().abs();
    let c = g.b.conj();
    // Rotation about the origin: b vanishes.
    if c.norm() < 1e-14 {
        return IsometryClass::Elliptic {
            center: DiskPoint::ORIGIN,
        };
    }
    let re = g.a.re;
    let im_part = C64::new(0.0, g.a.im);
    if tr < 2.0 - tol.trace {
        let s = C64::new(0.0, (1.0 - re * re).sqrt());
        let z1 = (im_part + s) / c;
        let z2 = (im_part - s) / c;
        let z = if z1.norm() < z2.norm() { z1 } else { z2 };
        IsometryClass::Elliptic {
            center: DiskPoint::from_complex(z),
        }
    } else if tr > 2.0 + tol.trace {
        let s = C64::new((re * re - 1.0).sqrt(), 0.0);
        let z1 = (im_part + s) / c;
        let z2 = (im_part - s) / c;
        let d = g.a.conj();
        let (att, rep) = if (c * z1 + d).norm() > (c * z2 + d).norm() {
            (z1, z2)
        } else {
            (z2, z1)
        };
        IsometryClass::Hyperbolic {
            attracting: BoundaryPoint::from_complex(att),
            repelling: BoundaryPoint::from_complex(rep),
        }
    } else {
        IsometryClass::Parabolic {
            fixed: BoundaryPoint::from_complex(im_part / c),
        }
    }
}

/// Semi-open arc of the boundary circle: contains `left`, excludes `right`,
/// traversed in the global orientation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryArc {
    pub left: BoundaryPoint,
    pub right: BoundaryPoint,
}

impl BoundaryArc {
    pub fn new(left: BoundaryPoint, right: BoundaryPoint) -> Result<Self> {
        if left.angular_dist(right) == 0.0 {
            return Err(Error::InvalidParameter("arc endpoints coincide".into()));
        }
        Ok(BoundaryArc { left, right })
    }

    pub fn complement(&self) -> BoundaryArc {
        BoundaryArc {
            left: self.right,
            right: self.left,
        }
    }

    pub fn length(&self, orient: Orientation) -> f64 {
        oriented_offset(self.left, self.right, orient)
    }

    /// Oriented offset of `x` from the left endpoint.
    pub fn position(&self, x: BoundaryPoint, orient: Orientation) -> f64 {
        oriented_offset(self.left, x, orient)
    }

    pub fn contains_oriented(&self, x: BoundaryPoint, orient: Orientation, snap: f64) -> bool {
        if x.angular_dist(self.left) < snap {
            return true;
        }
        if x.angular_dist(self.right) < snap {
            return false;
        }
        self.position(x, orient) < self.length(orient)
    }

    /// Whether `other` lies inside `self` up to `tol` at the endpoints.
    pub fn contains_arc(&self, other: &BoundaryArc, orient: Orientation, tol: f64) -> bool {
        let len = self.length(orient);
        let mut start = self.position(other.left, orient);
        if start > TAU - tol {
            start -= TAU;
        }
        start >= -tol && start + other.length(orient) <= len + tol
    }

    pub fn midpoint(&self, orient: Orientation) -> BoundaryPoint {
        self.left
            .rotated(orient.sign() * self.length(orient) / 2.0)
    }
}

/// Semi-open membership in the global orientation with default snapping.
pub fn arc_contains(arc: &BoundaryArc, x: BoundaryPoint) -> bool {
    arc.contains_oriented(x, ORIENT, Tolerances::DEFAULT.snap)
}

/// Third vertex of the base triangle, ideal when `r` is infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ThirdVertex {
    Finite(DiskPoint),
    Ideal(BoundaryPoint),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triangle {
    pub a0: DiskPoint,
    pub b0: DiskPoint,
    pub c0: ThirdVertex,
    /// Hyperbolic length of the side A0 B0.
    pub side_ab: f64,
}

/// Exact hyperbolicity test `1/p + 1/q + 1/r < 1` in integers.
pub fn is_hyperbolic(p: u32, q: u32, r: Option<u32>) -> bool {
    let (p, q) = (p as u64, q as u64);
    match r {
        Some(r) => {
            let r = r as u64;
            q * r + p * r + p * q < p * q * r
        }
        None => p + q < p * q,
    }
}

pub fn order_label(r: Option<u32>) -> String {
    r.map_or_else(|| "inf".to_string(), |r| r.to_string())
}

/// Base triangle with angles `pi/p`, `pi/q`, `pi/r`: `A0` at the origin,
/// `B0` on the positive real axis and `C0` in the upper half.
pub fn make_triangle(p: u32, q: u32, r: Option<u32>) -> Result<Triangle> {
    if p < 2 || q < 2 || r.is_some_and(|r| r < 2) {
        return Err(Error::InvalidParameter(format!(
            "orders must be >= 2, got ({p}, {q}, {})",
            order_label(r)
        )));
    }
    if !is_hyperbolic(p, q, r) {
        return Err(Error::NonHyperbolic {
            p,
            q,
            r: order_label(r),
        });
    }
    let alpha = PI / p as f64;
    let beta = PI / q as f64;
    let cos_gamma = match r {
        Some(r) => (PI / r as f64).cos(),
        None => 1.0,
    };
    let cosh_ab = (alpha.cos() * beta.cos() + cos_gamma) / (alpha.sin() * beta.sin());
    let side_ab = cosh_ab.acosh();
    let b0 = DiskPoint {
        re: (side_ab / 2.0).tanh(),
        im: 0.0,
    };
    let c0 = match r {
        None => ThirdVertex::Ideal(BoundaryPoint::new(alpha)),
        Some(r) => {
            let gamma = PI / r as f64;
            let cosh_ac = (alpha.cos() * gamma.cos() + beta.cos()) / (alpha.sin() * gamma.sin());
            let rad = (cosh_ac.acosh() / 2.0).tanh();
            ThirdVertex::Finite(DiskPoint::from_complex(C64::from_polar(rad, alpha)))
        }
    };
    Ok(Triangle {
        a0: DiskPoint::ORIGIN,
        b0,
        c0,
        side_ab,
    })
}

/// Direction (as a boundary point seen from `vertex`) of the geodesic toward `z`.
pub fn visual_direction(vertex: DiskPoint, z: C64) -> BoundaryPoint {
    let t = Isometry::translation_to(vertex).inverse();
    BoundaryPoint::from_complex(t.apply(z))
}

/// Unsigned angle at `vertex` between the geodesics toward `x` and `y`.
pub fn angle_at(vertex: DiskPoint, x: C64, y: C64) -> f64 {
    visual_direction(vertex, x).angular_dist(visual_direction(vertex, y))
}

impl Triangle {
    pub fn c0_complex(&self) -> C64 {
        match self.c0 {
            ThirdVertex::Finite(c) => c.to_complex(),
            ThirdVertex::Ideal(c) => c.to_complex(),
        }
    }

    /// Interior angles at A0, B0, C0.
    pub fn interior_angles(&self) -> (f64, f64, f64) {
        let a = self.a0.to_complex();
        let b = self.b0.to_complex();
        let c = self.c0_complex();
        let at_a = angle_at(self.a0, b, c);
        let at_b = angle_at(self.b0, a, c);
        let at_c = match self.c0 {
            ThirdVertex::Finite(cp) => angle_at(cp, a, b),
            ThirdVertex::Ideal(_) => 0.0,
        };
        (at_a, at_b, at_c)
    }
}
