//! Seeded test signals in `H²(A, M)`: finite kernel sums `Σ c_j e_{a_j}` with
//! `Σ|c_j| = M` and parameters drawn from the coarse search grid.
//!
//! The generator is ChaCha8 seeded from a `u64`, so a seed names the same
//! signal on every platform.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{DiscPoint, GridSpec};
use crate::hardy::{grid_size_for, FourierCoeffs1D, FourierCoeffs2D, Support, C64};
use crate::szego::szego_coeffs;

/// Largest modulus a synthetic parameter may take.
pub const SYNTH_MAX_RADIUS: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SynthSpec {
    pub order: usize,
    pub atoms: usize,
    pub mass: f64,
    pub seed: u64,
}

impl SynthSpec {
    fn validate(&self) -> Result<()> {
        if self.atoms == 0 {
            return Err(Error::Config("at least one atom".into()));
        }
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(Error::Config(format!("mass {} must be positive", self.mass)));
        }
        Ok(())
    }
}

/// Coarse points usable as synthetic parameters: off the real axis and
/// inside the synthetic radius.
fn candidates(grid: &GridSpec) -> Vec<DiscPoint> {
    grid.coarse_points()
        .into_iter()
        .filter(|p| p.radius > 0.0 && p.radius <= SYNTH_MAX_RADIUS && p.z().im.abs() > 1e-12)
        .collect()
}

fn masses(rng: &mut ChaCha8Rng, n: usize, total: f64) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| 0.2 + rng.random::<f64>()).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| total * x / s).collect()
}

fn phase(rng: &mut ChaCha8Rng) -> C64 {
    C64::from_polar(1.0, 2.0 * std::f64::consts::PI * rng.random::<f64>())
}

/// A synthetic 1-D Hardy signal, its support and real boundary samples.
#[derive(Clone, Debug, PartialEq)]
pub struct Synth1D {
    pub signal: FourierCoeffs1D,
    /// `(a_j, c_j)` with `Σ|c_j| = M`.
    pub support: Vec<(DiscPoint, C64)>,
    /// Real signal `2Re f − f(0)` whose analytic part is `f`.
    pub samples: Vec<f64>,
}

/// Atoms come in conjugate pairs `(a, c), (ā, c̄)` so that `f(0)` is real
/// and the real samples carry `f` exactly. An odd count ends with a lone atom
/// whose coefficient is chosen real-at-the-origin.
pub fn synth_1d(spec: &SynthSpec, grid: &GridSpec) -> Result<Synth1D> {
    spec.validate()?;
    grid.validate()?;
    let pool = candidates(grid);
    if pool.is_empty() {
        return Err(Error::Config("grid has no admissible synthetic parameters".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let w = masses(&mut rng, spec.atoms.div_ceil(2), spec.mass);
    let mut support = Vec::with_capacity(spec.atoms);
    for (i, &m) in w.iter().enumerate() {
        let p = pool[rng.random_range(0..pool.len())];
        let c = phase(&mut rng);
        if 2 * i + 1 < spec.atoms {
            let q = DiscPoint::new(p.radius, -p.angle);
            support.push((p, c * (m / 2.0)));
            support.push((q, c.conj() * (m / 2.0)));
        } else {
            // lone atom: take a real coefficient so f(0) stays real
            let sign = if c.re < 0.0 { -1.0 } else { 1.0 };
            support.push((p, C64::new(sign * m, 0.0)));
        }
    }
    let mut signal = FourierCoeffs1D::zeros(spec.order, Support::Hardy);
    for (p, c) in &support {
        signal.axpy(*c, &szego_coeffs(p.z(), spec.order)?)?;
    }
    let c0 = signal.get(0);
    if c0.im.abs() > 1e-12 * spec.mass {
        return Err(Error::Invariant(format!("synthetic mean {c0} is not real")));
    }
    let p = grid_size_for(spec.order);
    let samples = signal.to_samples(p)?.iter().map(|z| 2.0 * z.re - c0.re).collect();
    Ok(Synth1D { signal, support, samples })
}

/// A synthetic tensor-atom image and its support.
#[derive(Clone, Debug, PartialEq)]
pub struct Synth2D {
    pub signal: FourierCoeffs2D,
    pub support: Vec<((DiscPoint, DiscPoint), C64)>,
    /// `2Re f` on the `P×P` torus grid mapped affinely onto `0..=255`.
    pub pixels: Array2<u8>,
}

pub fn synth_2d(spec: &SynthSpec, grid: &GridSpec) -> Result<Synth2D> {
    spec.validate()?;
    grid.validate()?;
    let pool: Vec<DiscPoint> =
        grid.coarse_points().into_iter().filter(|p| p.radius <= SYNTH_MAX_RADIUS).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let w = masses(&mut rng, spec.atoms, spec.mass);
    let mut support = Vec::with_capacity(spec.atoms);
    let mut signal = FourierCoeffs2D::zeros(spec.order, Support::Hardy);
    for m in w {
        let a = pool[rng.random_range(0..pool.len())];
        let b = pool[rng.random_range(0..pool.len())];
        let c = phase(&mut rng) * m;
        let t = FourierCoeffs2D::tensor(&szego_coeffs(a.z(), spec.order)?, &szego_coeffs(b.z(), spec.order)?)?;
        signal.array_mut().scaled_add(c, t.array());
        support.push(((a, b), c));
    }
    let p = grid_size_for(spec.order);
    let u = signal.to_samples(p)?.mapv(|z| 2.0 * z.re);
    let peak = u.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    let pixels = u.mapv(|x| (127.5 + 127.5 * x / peak).round().clamp(0.0, 255.0) as u8);
    Ok(Synth2D { signal, support, pixels })
}
