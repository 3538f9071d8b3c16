//! Polar search grids over the unit disc and the deterministic argmax engine
//! shared by every selector.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt::Debug;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hardy::C64;

/// A point of the disc in polar form. The angle is kept in `[0, 2π)` and is
/// zero at the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscPoint {
    pub radius: f64,
    pub angle: f64,
}

impl DiscPoint {
    pub fn new(radius: f64, angle: f64) -> Self {
        if radius == 0.0 {
            return DiscPoint { radius, angle: 0.0 };
        }
        let angle = angle.rem_euclid(2.0 * PI);
        // rem_euclid can return exactly 2π for tiny negative inputs
        let angle = if angle >= 2.0 * PI { 0.0 } else { angle };
        DiscPoint { radius, angle }
    }

    pub fn center() -> Self {
        DiscPoint { radius: 0.0, angle: 0.0 }
    }

    pub fn z(&self) -> C64 {
        if self.radius == 0.0 {
            return C64::new(0.0, 0.0);
        }
        C64::from_polar(self.radius, self.angle)
    }
}

/// Lexicographic order on (radius, angle); smaller wins ties.
pub fn tie_cmp(a: &DiscPoint, b: &DiscPoint) -> Ordering {
    a.radius.total_cmp(&b.radius).then(a.angle.total_cmp(&b.angle))
}

/// Polar grid: the centre plus `radial_count` Chebyshev-spaced radii in
/// `(0, max_radius]` times `angular_count` equispaced angles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub radial_count: usize,
    pub angular_count: usize,
    pub refine_levels: u32,
    pub max_radius: f64,
}

impl GridSpec {
    pub fn new(radial_count: usize, angular_count: usize, refine_levels: u32, max_radius: f64) -> Result<Self> {
        let g = GridSpec { radial_count, angular_count, refine_levels, max_radius };
        g.validate()?;
        Ok(g)
    }

    pub fn default_1d() -> Self {
        GridSpec { radial_count: 48, angular_count: 96, refine_levels: 2, max_radius: 0.995 }
    }

    pub fn default_2d() -> Self {
        GridSpec { radial_count: 24, angular_count: 48, refine_levels: 2, max_radius: 0.995 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.radial_count == 0 || self.angular_count == 0 {
            return Err(Error::Config(format!(
                "empty grid: {} radii × {} angles",
                self.radial_count, self.angular_count
            )));
        }
        if !(self.max_radius > 0.0 && self.max_radius < 1.0) {
            return Err(Error::Config(format!("max_radius {} outside (0,1)", self.max_radius)));
        }
        Ok(())
    }

    /// Chebyshev radii `r_i = (ρ/2)(1 − cos(πi/R))`, `i = 1..R`.
    pub fn radii(&self) -> Vec<f64> {
        let r = self.radial_count;
        (1..=r)
            .map(|i| {
                if i == r {
                    self.max_radius
                } else {
                    0.5 * self.max_radius * (1.0 - (PI * i as f64 / r as f64).cos())
                }
            })
            .collect()
    }

    pub fn angles(&self) -> Vec<f64> {
        let a = self.angular_count;
        (0..a).map(|j| 2.0 * PI * j as f64 / a as f64).collect()
    }

    pub fn angular_step(&self) -> f64 {
        2.0 * PI / self.angular_count as f64
    }

    /// Coarse points in generation order: the centre first, then ring by ring.
    pub fn coarse_points(&self) -> Vec<DiscPoint> {
        let angles = self.angles();
        let mut pts = Vec::with_capacity(1 + self.radial_count * self.angular_count);
        pts.push(DiscPoint::center());
        for r in self.radii() {
            for &t in &angles {
                pts.push(DiscPoint::new(r, t));
            }
        }
        pts
    }

    /// Width of the coarse radial cell containing `r`.
    pub fn radial_cell(&self, r: f64) -> f64 {
        let mut prev = 0.0;
        let radii = self.radii();
        for (i, &ri) in radii.iter().enumerate() {
            if r <= ri {
                let below = ri - prev;
                let above = radii.get(i + 1).map(|&n| n - ri).unwrap_or(below);
                return if r == ri { below.max(above) } else { below };
            }
            prev = ri;
        }
        radii.last().map(|&l| l - prev).unwrap_or(self.max_radius)
    }

    /// Local patch at refinement level `level ≥ 1` around `center`, with cell
    /// sizes taken from the coarse winner `anchor`. The patch always contains
    /// `center` itself.
    pub fn refine_patch(&self, center: &DiscPoint, level: u32, anchor: &DiscPoint) -> Vec<DiscPoint> {
        let scale = 0.5f64.powi(level as i32);
        let dr = self.radial_cell(anchor.radius) * scale;
        let dt = self.angular_step() * scale;
        let mut out = Vec::with_capacity(9);
        if center.radius == 0.0 {
            out.push(*center);
            for t in self.angles() {
                out.push(DiscPoint::new(dr, t));
            }
            return out;
        }
        for i in -1i32..=1 {
            let r = center.radius + i as f64 * dr;
            if r < 0.0 || r > self.max_radius {
                continue;
            }
            if r == 0.0 {
                out.push(DiscPoint::center());
                continue;
            }
            for j in -1i32..=1 {
                out.push(DiscPoint::new(r, center.angle + j as f64 * dt));
            }
        }
        out
    }
}

/// Candidate sets produced by a search: a coarse block plus local refinements.
pub trait SearchSpace {
    type Point: Copy + Debug;
    type Block;

    fn coarse(&self) -> Self::Block;
    fn levels(&self) -> u32;
    fn refine(&self, center: &Self::Point, level: u32, anchor: &Self::Point) -> Self::Block;
    fn block_len(block: &Self::Block) -> usize;
    fn block_point(block: &Self::Block, i: usize) -> Self::Point;
    fn tie_cmp(a: &Self::Point, b: &Self::Point) -> Ordering;
}

impl SearchSpace for GridSpec {
    type Point = DiscPoint;
    type Block = Vec<DiscPoint>;

    fn coarse(&self) -> Vec<DiscPoint> {
        self.coarse_points()
    }

    fn levels(&self) -> u32 {
        self.refine_levels
    }

    fn refine(&self, center: &DiscPoint, level: u32, anchor: &DiscPoint) -> Vec<DiscPoint> {
        self.refine_patch(center, level, anchor)
    }

    fn block_len(block: &Vec<DiscPoint>) -> usize {
        block.len()
    }

    fn block_point(block: &Vec<DiscPoint>, i: usize) -> DiscPoint {
        block[i]
    }

    fn tie_cmp(a: &DiscPoint, b: &DiscPoint) -> Ordering {
        tie_cmp(a, b)
    }
}

/// Product of two disc grids, searched jointly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairGrid {
    pub left: GridSpec,
    pub right: GridSpec,
}

impl PairGrid {
    pub fn square(grid: GridSpec) -> Self {
        PairGrid { left: grid, right: grid }
    }

    pub fn validate(&self) -> Result<()> {
        self.left.validate()?;
        self.right.validate()
    }
}

/// Cartesian product block, flattened left-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PairBlock {
    pub left: Vec<DiscPoint>,
    pub right: Vec<DiscPoint>,
}

impl SearchSpace for PairGrid {
    type Point = (DiscPoint, DiscPoint);
    type Block = PairBlock;

    fn coarse(&self) -> PairBlock {
        PairBlock { left: self.left.coarse_points(), right: self.right.coarse_points() }
    }

    fn levels(&self) -> u32 {
        self.left.refine_levels.max(self.right.refine_levels)
    }

    fn refine(&self, center: &Self::Point, level: u32, anchor: &Self::Point) -> PairBlock {
        let side = |g: &GridSpec, c: &DiscPoint, a: &DiscPoint| {
            if level <= g.refine_levels {
                g.refine_patch(c, level, a)
            } else {
                vec![*c]
            }
        };
        PairBlock {
            left: side(&self.left, &center.0, &anchor.0),
            right: side(&self.right, &center.1, &anchor.1),
        }
    }

    fn block_len(block: &PairBlock) -> usize {
        block.left.len() * block.right.len()
    }

    fn block_point(block: &PairBlock, i: usize) -> Self::Point {
        let nr = block.right.len();
        (block.left[i / nr], block.right[i % nr])
    }

    fn tie_cmp(a: &Self::Point, b: &Self::Point) -> Ordering {
        tie_cmp(&a.0, &b.0).then(tie_cmp(&a.1, &b.1))
    }
}

/// Winner of a grid search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Argmax<P> {
    pub point: P,
    pub value: f64,
}

/// Strict improvement under the deterministic tie-break. NaN never wins.
pub fn improves<S: SearchSpace>(value: f64, point: &S::Point, best: Option<&Argmax<S::Point>>) -> bool {
    if value.is_nan() {
        return false;
    }
    match best {
        None => true,
        Some(b) => value > b.value || (value == b.value && S::tie_cmp(point, &b.point) == Ordering::Less),
    }
}

fn scan<S: SearchSpace>(block: &S::Block, values: &[f64], mut best: Option<Argmax<S::Point>>) -> Option<Argmax<S::Point>> {
    for (i, &v) in values.iter().enumerate() {
        let p = S::block_point(block, i);
        if improves::<S>(v, &p, best.as_ref()) {
            best = Some(Argmax { point: p, value: v });
        }
    }
    best
}

/// Coarse evaluation followed by `levels()` local refinements around the
/// running winner. `objective` maps a block to one value per block point in
/// block order.
pub fn search_argmax<S, F>(space: &S, mut objective: F) -> Result<Argmax<S::Point>>
where
    S: SearchSpace,
    F: FnMut(&S::Block) -> Result<Vec<f64>>,
{
    let coarse = space.coarse();
    let n = S::block_len(&coarse);
    if n == 0 {
        return Err(Error::Config("empty search grid".into()));
    }
    let vals = objective(&coarse)?;
    if vals.len() != n {
        return Err(Error::Dimension(format!("objective returned {} values for {n} points", vals.len())));
    }
    let mut best = scan::<S>(&coarse, &vals, None)
        .ok_or_else(|| Error::Degenerate("objective is NaN on every grid point".into()))?;
    let anchor = best.point;
    for level in 1..=space.levels() {
        let block = space.refine(&best.point, level, &anchor);
        let vals = objective(&block)?;
        if vals.len() != S::block_len(&block) {
            return Err(Error::Dimension("objective length mismatch on refinement block".into()));
        }
        best = scan::<S>(&block, &vals, Some(best)).expect("previous winner retained");
    }
    Ok(best)
}

/// Pointwise objective over a disc grid, evaluated in parallel and reduced
/// in grid order.
pub fn grid_argmax<F>(objective: F, grid: &GridSpec) -> Result<Argmax<DiscPoint>>
where
    F: Fn(C64) -> f64 + Sync,
{
    grid.validate()?;
    search_argmax(grid, |block: &Vec<DiscPoint>| Ok(block.par_iter().map(|p| objective(p.z())).collect()))
}
