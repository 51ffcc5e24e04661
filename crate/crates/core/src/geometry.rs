//! Oriented 3D boxes and IoU engines.
//!
//! Boxes are parameterized as `(x, y, z, l, w, h, yaw)`: center in meters, full
//! extents along the box's local axes, and a rotation about the vertical axis.
//! Pitch and roll are not modeled.
//!
//! Three IoU routes are provided. [`iou_aligned_same_size`] and
//! [`iou_centered_axis_aligned`] are closed forms for the two decoupled cases the
//! stability metric relies on. [`iou_rotated`] is the general engine (BEV polygon
//! clipping times vertical overlap) and [`iou_oracle`] is a Monte-Carlo estimate
//! used to check it.

use std::f64::consts::{PI, TAU};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// BEV polygon areas below this are treated as empty.
pub const AREA_EPSILON: f64 = 1e-12;

/// An oriented 3D bounding box.
///
/// Serialized as the array `[x, y, z, l, w, h, yaw]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 7]", into = "[f64; 7]")]
pub struct Box3D {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub l: f64,
    pub w: f64,
    pub h: f64,
    /// Radians, counter-clockwise about +z. Stored unnormalized.
    pub yaw: f64,
}

impl From<[f64; 7]> for Box3D {
    fn from(v: [f64; 7]) -> Self {
        Box3D::new(v[0], v[1], v[2], v[3], v[4], v[5], v[6])
    }
}

impl From<Box3D> for [f64; 7] {
    fn from(b: Box3D) -> Self {
        b.to_array()
    }
}

impl Box3D {
    #[allow(clippy::too_many_arguments)]
    pub const fn new(x: f64, y: f64, z: f64, l: f64, w: f64, h: f64, yaw: f64) -> Self {
        Box3D {
            x,
            y,
            z,
            l,
            w,
            h,
            yaw,
        }
    }

    /// Origin-centered, zero-yaw box with the given extents.
    pub const fn centered(l: f64, w: f64, h: f64) -> Self {
        Box3D::new(0.0, 0.0, 0.0, l, w, h, 0.0)
    }

    pub fn to_array(&self) -> [f64; 7] {
        [self.x, self.y, self.z, self.l, self.w, self.h, self.yaw]
    }

    pub fn center(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn extents(&self) -> [f64; 3] {
        [self.l, self.w, self.h]
    }

    pub fn volume(&self) -> f64 {
        self.l * self.w * self.h
    }

    /// Checks that every field is finite and every extent is positive.
    pub fn validate(&self) -> Result<()> {
        const NAMES: [&str; 7] = ["x", "y", "z", "l", "w", "h", "yaw"];
        for (name, v) in NAMES.iter().zip(self.to_array()) {
            if !v.is_finite() {
                return Err(Error::InvalidBox(format!("{name} is not finite ({v})")));
            }
        }
        for (name, v) in [("l", self.l), ("w", self.w), ("h", self.h)] {
            if v <= 0.0 {
                return Err(Error::InvalidBox(format!("{name} must be positive ({v})")));
            }
        }
        Ok(())
    }

    /// Whether `p` lies inside the box (boundary inclusive).
    pub fn contains(&self, p: [f64; 3]) -> bool {
        if (p[2] - self.z).abs() > 0.5 * self.h {
            return false;
        }
        let (s, c) = self.yaw.sin_cos();
        let dx = p[0] - self.x;
        let dy = p[1] - self.y;
        let u = c * dx + s * dy;
        let v = -s * dx + c * dy;
        u.abs() <= 0.5 * self.l && v.abs() <= 0.5 * self.w
    }

    /// BEV corners in counter-clockwise order.
    pub fn bev_corners(&self) -> [[f64; 2]; 4] {
        let (s, c) = self.yaw.sin_cos();
        let hl = 0.5 * self.l;
        let hw = 0.5 * self.w;
        [(hl, -hw), (hl, hw), (-hl, hw), (-hl, -hw)].map(|(u, v)| {
            [self.x + c * u - s * v, self.y + s * u + c * v]
        })
    }

    /// Axis-aligned bounds as `(min, max)` corners.
    pub fn aabb(&self) -> ([f64; 3], [f64; 3]) {
        let (s, c) = self.yaw.sin_cos();
        let ex = 0.5 * (c.abs() * self.l + s.abs() * self.w);
        let ey = 0.5 * (s.abs() * self.l + c.abs() * self.w);
        let ez = 0.5 * self.h;
        (
            [self.x - ex, self.y - ey, self.z - ez],
            [self.x + ex, self.y + ey, self.z + ez],
        )
    }

    /// Distance from the sensor origin to the box center.
    pub fn range(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Maps `b` through the transformation that carries `from` onto `to`.
///
/// The offset of `b` from `from` is rotated by `to.yaw - from.yaw` in the
/// horizontal plane and re-anchored at `to`; extents are rescaled by the ratio
/// `to / from` per axis; yaw is shifted by the same angle. A box expressed
/// relative to `from` keeps the same relative discrepancy with respect to `to`.
pub fn transform_box(b: &Box3D, from: &Box3D, to: &Box3D) -> Result<Box3D> {
    b.validate()?;
    from.validate()?;
    to.validate()?;
    Ok(transform_unchecked(b, from, to))
}

pub(crate) fn transform_unchecked(b: &Box3D, from: &Box3D, to: &Box3D) -> Box3D {
    let delta = to.yaw - from.yaw;
    let (s, c) = delta.sin_cos();
    let dx = b.x - from.x;
    let dy = b.y - from.y;
    let dz = b.z - from.z;
    Box3D {
        x: c * dx - s * dy + to.x,
        y: s * dx + c * dy + to.y,
        z: dz + to.z,
        // Ratio first so that b == from maps onto the target extents exactly.
        l: to.l * (b.l / from.l),
        w: to.w * (b.w / from.w),
        h: to.h * (b.h / from.h),
        yaw: b.yaw + delta,
    }
}

/// IoU of two equally sized, equally oriented boxes whose centers differ by
/// `offset`, expressed in the boxes' own axes.
pub fn iou_aligned_same_size(offset: [f64; 3], extents: [f64; 3]) -> f64 {
    let mut inter = 1.0;
    for (d, e) in offset.iter().zip(extents.iter()) {
        let overlap = e - d.abs();
        if overlap <= 0.0 {
            return 0.0;
        }
        inter *= overlap;
    }
    let vol = extents[0] * extents[1] * extents[2];
    inter / (2.0 * vol - inter)
}

/// IoU of two origin-centered, zero-yaw boxes with extents `e1` and `e2`.
pub fn iou_centered_axis_aligned(e1: [f64; 3], e2: [f64; 3]) -> f64 {
    let inter = e1[0].min(e2[0]) * e1[1].min(e2[1]) * e1[2].min(e2[2]);
    let v1 = e1[0] * e1[1] * e1[2];
    let v2 = e2[0] * e2[1] * e2[2];
    inter / (v1 + v2 - inter)
}

/// Volumetric IoU of two yaw-rotated boxes: BEV intersection area by convex
/// clipping, times the vertical overlap.
pub fn iou_rotated(a: &Box3D, b: &Box3D) -> f64 {
    if a == b {
        return 1.0;
    }
    let inter = intersection_volume(a, b);
    if inter <= 0.0 {
        return 0.0;
    }
    let union = a.volume() + b.volume() - inter;
    (inter / union).clamp(0.0, 1.0)
}

/// Intersection volume of two yaw-rotated boxes.
pub fn intersection_volume(a: &Box3D, b: &Box3D) -> f64 {
    let top = (a.z + 0.5 * a.h).min(b.z + 0.5 * b.h);
    let bottom = (a.z - 0.5 * a.h).max(b.z - 0.5 * b.h);
    let dz = top - bottom;
    if dz <= 0.0 {
        return 0.0;
    }
    // Circumscribed-circle rejection.
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    let reach = 0.5 * (a.l.hypot(a.w) + b.l.hypot(b.w));
    if dx * dx + dy * dy > reach * reach {
        return 0.0;
    }
    let area = bev_intersection_area(&a.bev_corners(), &b.bev_corners());
    if area < AREA_EPSILON {
        return 0.0;
    }
    area * dz
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Intersection area of two convex counter-clockwise quads (Sutherland-Hodgman).
fn bev_intersection_area(subject: &[[f64; 2]; 4], clip: &[[f64; 2]; 4]) -> f64 {
    // Clipping a quad against four half-planes yields at most 8 vertices.
    let mut poly: Vec<[f64; 2]> = Vec::with_capacity(12);
    let mut next: Vec<[f64; 2]> = Vec::with_capacity(12);
    poly.extend_from_slice(subject);

    for i in 0..4 {
        let a = clip[i];
        let b = clip[(i + 1) % 4];
        next.clear();
        let n = poly.len();
        for j in 0..n {
            let s = poly[(j + n - 1) % n];
            let e = poly[j];
            let ds = cross(a, b, s);
            let de = cross(a, b, e);
            if de >= 0.0 {
                if ds < 0.0 {
                    next.push(lerp(s, e, ds / (ds - de)));
                }
                next.push(e);
            } else if ds >= 0.0 {
                next.push(lerp(s, e, ds / (ds - de)));
            }
        }
        std::mem::swap(&mut poly, &mut next);
        if poly.len() < 3 {
            return 0.0;
        }
    }
    shoelace(&poly).abs()
}

fn lerp(s: [f64; 2], e: [f64; 2], t: f64) -> [f64; 2] {
    [s[0] + t * (e[0] - s[0]), s[1] + t * (e[1] - s[1])]
}

fn shoelace(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    let twice: f64 = (0..n)
        .map(|i| {
            let p = poly[i];
            let q = poly[(i + 1) % n];
            p[0] * q[1] - q[0] * p[1]
        })
        .sum();
    0.5 * twice
}

const ORACLE_BATCH: u64 = 16_384;

/// Monte-Carlo IoU estimate.
///
/// Points are drawn uniformly from the axis-aligned hull of both boxes and
/// classified with [`Box3D::contains`]. Each batch owns a ChaCha stream keyed by
/// its index, so the estimate depends only on `(samples, seed)` and not on how
/// rayon schedules the batches.
pub fn iou_oracle(a: &Box3D, b: &Box3D, samples: u64, seed: u64) -> f64 {
    let (amin, amax) = a.aabb();
    let (bmin, bmax) = b.aabb();
    let lo: [f64; 3] = std::array::from_fn(|k| amin[k].min(bmin[k]));
    let hi: [f64; 3] = std::array::from_fn(|k| amax[k].max(bmax[k]));

    let batches = samples.div_ceil(ORACLE_BATCH);
    let (in_a, in_b, in_both) = (0..batches)
        .into_par_iter()
        .map(|batch| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(batch);
            let count = ORACLE_BATCH.min(samples - batch * ORACLE_BATCH);
            let mut tally = (0u64, 0u64, 0u64);
            for _ in 0..count {
                let p: [f64; 3] = std::array::from_fn(|k| rng.random_range(lo[k]..=hi[k]));
                let ia = a.contains(p);
                let ib = b.contains(p);
                tally.0 += ia as u64;
                tally.1 += ib as u64;
                tally.2 += (ia && ib) as u64;
            }
            tally
        })
        .reduce(|| (0, 0, 0), |x, y| (x.0 + y.0, x.1 + y.1, x.2 + y.2));

    let union = in_a + in_b - in_both;
    if union == 0 {
        return 0.0;
    }
    in_both as f64 / union as f64
}
