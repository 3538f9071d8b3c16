//! Boundary signals as truncated Fourier series on the circle and the torus.
//!
//! Coefficients are the canonical representation. Samples on the uniform
//! grid `t_j = 2πj/P` are derived views obtained through the FFT.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::{s, Array2, ArrayView2};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Relative tolerance for Hermitian symmetry checks on real-valued input.
pub const HERMITIAN_TOL: f64 = 1e-9;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn fft_plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(len)
        } else {
            p.plan_fft_forward(len)
        }
    })
}

/// Smallest power of two that is at least `2N+2`.
pub fn grid_size_for(order: usize) -> usize {
    (2 * order + 2).next_power_of_two()
}

/// Boundary nodes `e^{2πij/P}`.
pub fn nodes(p: usize) -> Vec<C64> {
    (0..p)
        .map(|j| C64::from_polar(1.0, 2.0 * PI * j as f64 / p as f64))
        .collect()
}

#[inline]
pub(crate) fn horner(coeffs: &[C64], z: C64) -> C64 {
    coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

#[inline]
fn bin(k: isize, p: usize) -> usize {
    k.rem_euclid(p as isize) as usize
}

/// Which frequencies an array stores.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Support {
    /// `k = −N..N`
    Full,
    /// `k = 0..N`, the Hardy space part.
    Hardy,
}

/// Truncated Fourier coefficients of a function on the circle.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierCoeffs1D {
    order: usize,
    support: Support,
    data: Vec<C64>,
}

impl FourierCoeffs1D {
    pub fn zeros(order: usize, support: Support) -> Self {
        let len = match support {
            Support::Full => 2 * order + 1,
            Support::Hardy => order + 1,
        };
        FourierCoeffs1D { order, support, data: vec![C64::new(0.0, 0.0); len] }
    }

    /// Hardy coefficients `c_0..c_N`.
    pub fn hardy(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Dimension("empty coefficient vector".into()));
        }
        Ok(FourierCoeffs1D { order: coeffs.len() - 1, support: Support::Hardy, data: coeffs })
    }

    /// Full-range coefficients `c_{−N}..c_N`; the length must be odd.
    pub fn full(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() % 2 == 0 {
            return Err(Error::Dimension(format!(
                "full coefficient vector needs odd length, got {}",
                coeffs.len()
            )));
        }
        Ok(FourierCoeffs1D { order: coeffs.len() / 2, support: Support::Full, data: coeffs })
    }

    /// `z^k` as a Hardy signal of the given order.
    pub fn monomial(k: usize, order: usize) -> Result<Self> {
        if k > order {
            return Err(Error::Dimension(format!("monomial degree {k} exceeds order {order}")));
        }
        let mut f = Self::zeros(order, Support::Hardy);
        f.data[k] = C64::new(1.0, 0.0);
        Ok(f)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn is_hardy(&self) -> bool {
        self.support == Support::Hardy
    }

    /// Raw storage; index `k` for Hardy, `k+N` for full support.
    pub fn coeffs(&self) -> &[C64] {
        &self.data
    }

    pub fn coeffs_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    /// Coefficients `c_0..c_N` regardless of support.
    pub fn nonneg(&self) -> &[C64] {
        match self.support {
            Support::Hardy => &self.data,
            Support::Full => &self.data[self.order..],
        }
    }

    pub fn nonneg_mut(&mut self) -> &mut [C64] {
        match self.support {
            Support::Hardy => &mut self.data,
            Support::Full => &mut self.data[self.order..],
        }
    }

    /// Coefficient at frequency `k`, zero outside the stored range.
    pub fn get(&self, k: isize) -> C64 {
        let n = self.order as isize;
        match self.support {
            Support::Hardy if (0..=n).contains(&k) => self.data[k as usize],
            Support::Full if (-n..=n).contains(&k) => self.data[(k + n) as usize],
            _ => C64::new(0.0, 0.0),
        }
    }

    /// Panics when `k` lies outside the stored range.
    pub fn set(&mut self, k: isize, v: C64) {
        let n = self.order as isize;
        let idx = match self.support {
            Support::Hardy => k,
            Support::Full => k + n,
        };
        assert!(
            idx >= 0 && (idx as usize) < self.data.len(),
            "frequency {k} outside stored range"
        );
        self.data[idx as usize] = v;
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.energy().sqrt()
    }

    /// Projection onto `k ≥ 0` without any symmetry check.
    pub fn to_hardy(&self) -> FourierCoeffs1D {
        FourierCoeffs1D { order: self.order, support: Support::Hardy, data: self.nonneg().to_vec() }
    }

    pub fn scale(&mut self, alpha: C64) {
        for c in &mut self.data {
            *c *= alpha;
        }
    }

    /// `self += alpha·other`.
    pub fn axpy(&mut self, alpha: C64, other: &FourierCoeffs1D) -> Result<()> {
        check_order(self.order, other.order)?;
        if self.support == other.support {
            for (a, b) in self.data.iter_mut().zip(&other.data) {
                *a += alpha * b;
            }
        } else if self.support == Support::Full {
            for (a, b) in self.nonneg_mut().iter_mut().zip(&other.data) {
                *a += alpha * b;
            }
        } else {
            return Err(Error::Dimension("cannot add a full-range signal into a Hardy one".into()));
        }
        Ok(())
    }

    /// Value of the holomorphic extension at `z` (Horner on `c_0..c_N`).
    pub fn eval_interior(&self, z: C64) -> C64 {
        horner(self.nonneg(), z)
    }

    /// Coefficients from `P` uniform samples. Needs `P ≥ 2N+1` for full support
    /// and `P ≥ N+1` for Hardy support.
    pub fn from_samples(samples: &[C64], order: usize, support: Support) -> Result<Self> {
        let p = samples.len();
        let need = match support {
            Support::Full => 2 * order + 1,
            Support::Hardy => order + 1,
        };
        if p < need {
            return Err(Error::Dimension(format!(
                "{p} samples cannot resolve order {order}; need at least {need}"
            )));
        }
        let mut buf = samples.to_vec();
        fft_plan(p, false).process(&mut buf);
        let scale = 1.0 / p as f64;
        let mut out = Self::zeros(order, support);
        let n = order as isize;
        let lo = if support == Support::Full { -n } else { 0 };
        for k in lo..=n {
            out.set(k, buf[bin(k, p)] * scale);
        }
        Ok(out)
    }

    /// Samples on `P` uniform boundary nodes.
    pub fn to_samples(&self, p: usize) -> Result<Vec<C64>> {
        let need = match self.support {
            Support::Full => 2 * self.order + 1,
            Support::Hardy => self.order + 1,
        };
        if p < need {
            return Err(Error::Dimension(format!(
                "grid of {p} points aliases order {}; need at least {need}",
                self.order
            )));
        }
        let mut buf = vec![C64::new(0.0, 0.0); p];
        let n = self.order as isize;
        let lo = if self.support == Support::Full { -n } else { 0 };
        for k in lo..=n {
            buf[bin(k, p)] += self.get(k);
        }
        fft_plan(p, true).process(&mut buf);
        Ok(buf)
    }
}

fn check_order(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Dimension(format!("truncation orders differ: {a} vs {b}")));
    }
    Ok(())
}

/// `Σ_k c_k(f)·conj(c_k(g))`.
pub fn inner_product_1d(f: &FourierCoeffs1D, g: &FourierCoeffs1D) -> Result<C64> {
    check_order(f.order, g.order)?;
    if f.support == g.support {
        return Ok(dot(&f.data, &g.data));
    }
    Ok(dot(f.nonneg(), g.nonneg()))
}

/// `Σ x_k·conj(y_k)`.
#[inline]
pub fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).fold(C64::new(0.0, 0.0), |acc, (a, b)| acc + a * b.conj())
}

/// Fourier multiplier `−i·sgn(k)`.
pub fn hilbert_transform(f: &FourierCoeffs1D) -> FourierCoeffs1D {
    let mut out = f.clone();
    let n = f.order as isize;
    let lo = if f.support == Support::Full { -n } else { 0 };
    for k in lo..=n {
        let m = match k.signum() {
            1 => C64::new(0.0, -1.0),
            -1 => C64::new(0.0, 1.0),
            _ => C64::new(0.0, 0.0),
        };
        out.set(k, f.get(k) * m);
    }
    out
}

fn hermitian_defect_1d(f: &FourierCoeffs1D) -> (f64, f64) {
    let n = f.order as isize;
    let mut defect: f64 = f.get(0).im.abs();
    let mut scale: f64 = 1.0;
    for k in 1..=n {
        defect = defect.max((f.get(-k) - f.get(k).conj()).norm());
        scale = scale.max(f.get(k).norm()).max(f.get(-k).norm());
    }
    (defect, scale)
}

/// `f⁺`: the `k ≥ 0` coefficients of a real signal, so that `f = 2Re f⁺ − c_0`.
pub fn analytic_part(f: &FourierCoeffs1D) -> Result<FourierCoeffs1D> {
    let (defect, scale) = hermitian_defect_1d(f);
    if defect > HERMITIAN_TOL * scale {
        return Err(Error::Domain(format!(
            "signal is not real: Hermitian symmetry defect {defect:e}"
        )));
    }
    Ok(f.to_hardy())
}

/// Truncated Fourier coefficients of a function on the torus, indexed `(k, l)`
/// with `k` the frequency in the first variable.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierCoeffs2D {
    order: usize,
    support: Support,
    data: Array2<C64>,
}

impl FourierCoeffs2D {
    pub fn zeros(order: usize, support: Support) -> Self {
        let len = match support {
            Support::Full => 2 * order + 1,
            Support::Hardy => order + 1,
        };
        FourierCoeffs2D { order, support, data: Array2::zeros((len, len)) }
    }

    /// Hardy coefficients `c_{kl}`, `0 ≤ k,l ≤ N`.
    pub fn hardy(data: Array2<C64>) -> Result<Self> {
        let (r, c) = data.dim();
        if r != c || r == 0 {
            return Err(Error::Dimension(format!("Hardy array must be square and non-empty, got {r}×{c}")));
        }
        Ok(FourierCoeffs2D { order: r - 1, support: Support::Hardy, data })
    }

    /// Full-range coefficients stored at `[k+N, l+N]`.
    pub fn full(data: Array2<C64>) -> Result<Self> {
        let (r, c) = data.dim();
        if r != c || r % 2 == 0 {
            return Err(Error::Dimension(format!("full array must be square of odd side, got {r}×{c}")));
        }
        Ok(FourierCoeffs2D { order: r / 2, support: Support::Full, data })
    }

    /// Outer product `x ⊗ y` of two Hardy signals of equal order.
    pub fn tensor(x: &FourierCoeffs1D, y: &FourierCoeffs1D) -> Result<Self> {
        check_order(x.order, y.order)?;
        let (xa, ya) = (x.nonneg(), y.nonneg());
        let data = Array2::from_shape_fn((xa.len(), ya.len()), |(k, l)| xa[k] * ya[l]);
        Ok(FourierCoeffs2D { order: x.order, support: Support::Hardy, data })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn is_hardy(&self) -> bool {
        self.support == Support::Hardy
    }

    pub fn array(&self) -> &Array2<C64> {
        &self.data
    }

    pub fn array_mut(&mut self) -> &mut Array2<C64> {
        &mut self.data
    }

    /// The `k, l ≥ 0` block.
    pub fn nonneg(&self) -> ArrayView2<'_, C64> {
        match self.support {
            Support::Hardy => self.data.view(),
            Support::Full => self.data.slice(s![self.order.., self.order..]),
        }
    }

    pub fn get(&self, k: isize, l: isize) -> C64 {
        let n = self.order as isize;
        let range = match self.support {
            Support::Hardy => 0..=n,
            Support::Full => -n..=n,
        };
        if !range.contains(&k) || !range.contains(&l) {
            return C64::new(0.0, 0.0);
        }
        let off = if self.support == Support::Full { n } else { 0 };
        self.data[[(k + off) as usize, (l + off) as usize]]
    }

    /// Panics when `(k, l)` lies outside the stored range.
    pub fn set(&mut self, k: isize, l: isize, v: C64) {
        let off = if self.support == Support::Full { self.order as isize } else { 0 };
        let (i, j) = (k + off, l + off);
        let len = self.data.nrows() as isize;
        assert!(
            (0..len).contains(&i) && (0..len).contains(&j),
            "frequency ({k},{l}) outside stored range"
        );
        self.data[[i as usize, j as usize]] = v;
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.energy().sqrt()
    }

    pub fn to_hardy(&self) -> FourierCoeffs2D {
        FourierCoeffs2D { order: self.order, support: Support::Hardy, data: self.nonneg().to_owned() }
    }

    /// Value of the holomorphic extension at `(z, w)`.
    pub fn eval_interior(&self, z: C64, w: C64) -> C64 {
        let v = self.nonneg();
        let mut acc = C64::new(0.0, 0.0);
        for k in (0..v.nrows()).rev() {
            let row = v.row(k);
            let inner = row.iter().rev().fold(C64::new(0.0, 0.0), |a, &c| a * w + c);
            acc = acc * z + inner;
        }
        acc
    }

    /// Coefficients from a `P×P` sample matrix indexed `[j_t, j_s]`.
    pub fn from_samples(samples: &Array2<C64>, order: usize, support: Support) -> Result<Self> {
        let (p, q) = samples.dim();
        if p != q {
            return Err(Error::Dimension(format!("sample grid must be square, got {p}×{q}")));
        }
        let need = match support {
            Support::Full => 2 * order + 1,
            Support::Hardy => order + 1,
        };
        if p < need {
            return Err(Error::Dimension(format!(
                "{p}×{p} samples cannot resolve order {order}; need at least {need} per axis"
            )));
        }
        let mut buf: Vec<C64> = samples.iter().copied().collect();
        fft2(&mut buf, p, false);
        let scale = 1.0 / (p * p) as f64;
        let mut out = Self::zeros(order, support);
        let n = order as isize;
        let lo = if support == Support::Full { -n } else { 0 };
        for k in lo..=n {
            for l in lo..=n {
                out.set(k, l, buf[bin(k, p) * p + bin(l, p)] * scale);
            }
        }
        Ok(out)
    }

    /// Samples on the `P×P` uniform torus grid.
    pub fn to_samples(&self, p: usize) -> Result<Array2<C64>> {
        let need = match self.support {
            Support::Full => 2 * self.order + 1,
            Support::Hardy => self.order + 1,
        };
        if p < need {
            return Err(Error::Dimension(format!(
                "grid of {p} points per axis aliases order {}; need at least {need}",
                self.order
            )));
        }
        let mut buf = vec![C64::new(0.0, 0.0); p * p];
        let n = self.order as isize;
        let lo = if self.support == Support::Full { -n } else { 0 };
        for k in lo..=n {
            for l in lo..=n {
                buf[bin(k, p) * p + bin(l, p)] += self.get(k, l);
            }
        }
        fft2(&mut buf, p, true);
        Ok(Array2::from_shape_vec((p, p), buf).expect("square buffer"))
    }
}

/// In-place unnormalized 2-D FFT of a row-major `p×p` buffer.
fn fft2(buf: &mut [C64], p: usize, inverse: bool) {
    let plan = fft_plan(p, inverse);
    plan.process(buf);
    let mut t = vec![C64::new(0.0, 0.0); p * p];
    for i in 0..p {
        for j in 0..p {
            t[j * p + i] = buf[i * p + j];
        }
    }
    plan.process(&mut t);
    for i in 0..p {
        for j in 0..p {
            buf[i * p + j] = t[j * p + i];
        }
    }
}

/// `Σ c_{kl}(f)·conj(c_{kl}(g))`.
pub fn inner_product_2d(f: &FourierCoeffs2D, g: &FourierCoeffs2D) -> Result<C64> {
    check_order(f.order, g.order)?;
    let (a, b) = if f.support == g.support {
        (f.data.view(), g.data.view())
    } else {
        (f.nonneg(), g.nonneg())
    };
    Ok(a.iter().zip(b.iter()).fold(C64::new(0.0, 0.0), |acc, (x, y)| acc + x * y.conj()))
}

/// Uniform boundary samples on the circle or the torus.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundaryGrid {
    Line(Vec<C64>),
    /// Indexed `[j_t, j_s]`.
    Torus(Array2<C64>),
}

impl BoundaryGrid {
    /// Points per axis.
    pub fn size(&self) -> usize {
        match self {
            BoundaryGrid::Line(v) => v.len(),
            BoundaryGrid::Torus(a) => a.nrows(),
        }
    }

    pub fn as_line(&self) -> Option<&[C64]> {
        match self {
            BoundaryGrid::Line(v) => Some(v),
            BoundaryGrid::Torus(_) => None,
        }
    }

    pub fn as_torus(&self) -> Option<&Array2<C64>> {
        match self {
            BoundaryGrid::Line(_) => None,
            BoundaryGrid::Torus(a) => Some(a),
        }
    }
}

/// Quadrant projections of a real signal on the torus together with its
/// marginal means. Axis coefficients belong to every adjacent quadrant.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadrantParts {
    pub fpp: FourierCoeffs2D,
    pub fpm: FourierCoeffs2D,
    pub fmp: FourierCoeffs2D,
    pub fmm: FourierCoeffs2D,
    /// Mean over `s`: frequencies `c_{k,0}`.
    pub f_marginal: FourierCoeffs1D,
    /// Mean over `t`: frequencies `c_{0,l}`.
    pub g_marginal: FourierCoeffs1D,
    pub c00: C64,
}

impl QuadrantParts {
    /// The `(+,+)` part as a Hardy signal.
    pub fn hardy_pp(&self) -> FourierCoeffs2D {
        self.fpp.to_hardy()
    }

    /// `f(·,−·)` restricted to `(+,+)`: entry `(k, l)` holds `c_{k,−l}`.
    pub fn hardy_pm(&self) -> FourierCoeffs2D {
        let n = self.fpm.order as isize;
        let mut out = FourierCoeffs2D::zeros(self.fpm.order, Support::Hardy);
        for k in 0..=n {
            for l in 0..=n {
                out.set(k, l, self.fpm.get(k, -l));
            }
        }
        out
    }
}

/// Splits a real signal into quadrant parts.
pub fn quadrant_split(f: &FourierCoeffs2D) -> Result<QuadrantParts> {
    let n = f.order as isize;
    let mut defect: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for k in -n..=n {
        for l in -n..=n {
            let c = f.get(k, l);
            scale = scale.max(c.norm());
            defect = defect.max((f.get(-k, -l) - c.conj()).norm());
        }
    }
    if defect > HERMITIAN_TOL * scale {
        return Err(Error::Domain(format!(
            "signal is not real: Hermitian symmetry defect {defect:e}"
        )));
    }
    let quadrant = |ks: isize, ls: isize| {
        let mut q = FourierCoeffs2D::zeros(f.order, Support::Full);
        for k in 0..=n {
            for l in 0..=n {
                q.set(ks * k, ls * l, f.get(ks * k, ls * l));
            }
        }
        q
    };
    let mut fm = FourierCoeffs1D::zeros(f.order, Support::Full);
    let mut gm = FourierCoeffs1D::zeros(f.order, Support::Full);
    for k in -n..=n {
        fm.set(k, f.get(k, 0));
        gm.set(k, f.get(0, k));
    }
    Ok(QuadrantParts {
        fpp: quadrant(1, 1),
        fpm: quadrant(1, -1),
        fmp: quadrant(-1, 1),
        fmm: quadrant(-1, -1),
        f_marginal: fm,
        g_marginal: gm,
        c00: f.get(0, 0),
    })
}

/// Real signal from its `(+,+)` and `(+,−)` parts and the marginal corrections,
/// sampled on a `P×P` grid.
pub fn real_reconstruct_2d(parts: &QuadrantParts, p: usize) -> Result<BoundaryGrid> {
    let pp = parts.hardy_pp().to_samples(p)?;
    let pm = parts.hardy_pm().to_samples(p)?;
    let fplus = parts.f_marginal.to_hardy().to_samples(p)?;
    let gplus = parts.g_marginal.to_hardy().to_samples(p)?;
    let out = Array2::from_shape_fn((p, p), |(j, i)| {
        let reflected = pm[[j, (p - i) % p]];
        let v = 2.0 * pp[[j, i]].re + 2.0 * reflected.re - 2.0 * fplus[j].re - 2.0 * gplus[i].re
            + parts.c00.re;
        C64::new(v, 0.0)
    });
    Ok(BoundaryGrid::Torus(out))
}
