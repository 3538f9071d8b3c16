//! Szegő kernels, their higher-order ladders and tensor products.

use log::warn;

use crate::error::{Error, Result};
use crate::hardy::{FourierCoeffs1D, FourierCoeffs2D, C64};

/// Norm deficit above which a truncated atom triggers a warning.
pub const DEFICIT_WARN: f64 = 1e-8;

/// Disc parameter `a` with multiplicity `m ≥ 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AtomSpec {
    pub a: C64,
    pub m: u32,
}

impl AtomSpec {
    pub fn new(a: C64, m: u32) -> Result<Self> {
        check_param(a)?;
        if m == 0 {
            return Err(Error::Domain("multiplicity must be at least 1".into()));
        }
        Ok(AtomSpec { a, m })
    }

    pub fn simple(a: C64) -> Result<Self> {
        Self::new(a, 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TensorAtomSpec {
    pub left: AtomSpec,
    pub right: AtomSpec,
}

impl TensorAtomSpec {
    pub fn new(left: AtomSpec, right: AtomSpec) -> Self {
        TensorAtomSpec { left, right }
    }
}

/// Constant making an atom unit-norm.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct NormalizationValue(f64);

impl NormalizationValue {
    pub fn value(&self) -> f64 {
        self.0
    }
}

pub(crate) fn check_param(a: C64) -> Result<()> {
    if !(a.norm() < 1.0) {
        return Err(Error::Domain(format!("parameter {a} is not inside the unit disc")));
    }
    Ok(())
}

/// `e_a = √(1−|a|²)/(1−āz)`: coefficients `√(1−|a|²)·ā^k`, `k = 0..N`.
pub fn szego_coeffs(a: C64, order: usize) -> Result<FourierCoeffs1D> {
    check_param(a)?;
    let s = (1.0 - a.norm_sqr()).sqrt();
    let ac = a.conj();
    let mut v = Vec::with_capacity(order + 1);
    let mut p = C64::new(s, 0.0);
    for _ in 0..=order {
        v.push(p);
        p *= ac;
    }
    FourierCoeffs1D::hardy(v)
}

/// `1/(1−āz)^m`, or `z^{m−1}` when `a = 0`. Unnormalized.
pub fn higher_order_coeffs(spec: &AtomSpec, order: usize) -> Result<FourierCoeffs1D> {
    check_param(spec.a)?;
    let m = spec.m as usize;
    let mut v = vec![C64::new(0.0, 0.0); order + 1];
    if spec.a == C64::new(0.0, 0.0) {
        if m - 1 <= order {
            v[m - 1] = C64::new(1.0, 0.0);
        }
        return FourierCoeffs1D::hardy(v);
    }
    // C(k+m−1, m−1)·ā^k built by the ratio (k+m−1)/k
    let ac = spec.a.conj();
    let mut p = C64::new(1.0, 0.0);
    for (k, slot) in v.iter_mut().enumerate() {
        if k > 0 {
            p *= ac * ((k + m - 1) as f64 / k as f64);
        }
        *slot = p;
    }
    FourierCoeffs1D::hardy(v)
}

fn binomial(n: u64, k: u64) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// Squared norm of `1/(1−āz)^m` in closed form:
/// `Σ_j C(m−1,j)² x^j / (1−x)^{2m−1}` with `x = |a|²`.
pub fn higher_order_norm_sqr(spec: &AtomSpec) -> f64 {
    if spec.a == C64::new(0.0, 0.0) {
        return 1.0;
    }
    let x = spec.a.norm_sqr();
    let m = spec.m as u64;
    let mut num = 0.0;
    let mut xp = 1.0;
    for j in 0..m {
        let b = binomial(m - 1, j);
        num += b * b * xp;
        xp *= x;
    }
    num / (1.0 - x).powi(2 * spec.m as i32 - 1)
}

/// `N(a, m)`: reciprocal norm of the unnormalized atom.
pub fn normalization(spec: &AtomSpec) -> NormalizationValue {
    NormalizationValue(1.0 / higher_order_norm_sqr(spec).sqrt())
}

/// Unit-norm atom `N(a,m)·(1−āz)^{−m}` truncated at `N`. Warns when the
/// truncation loses more than [`DEFICIT_WARN`] of the energy.
pub fn normalized_atom_coeffs(spec: &AtomSpec, order: usize) -> Result<FourierCoeffs1D> {
    let mut f = higher_order_coeffs(spec, order)?;
    f.scale(C64::new(normalization(spec).value(), 0.0));
    let deficit = 1.0 - f.energy();
    if deficit > DEFICIT_WARN {
        warn!(
            "atom at a = {} (m = {}) loses {deficit:.3e} of its energy at order {order}",
            spec.a, spec.m
        );
    }
    Ok(f)
}

/// Energy of the unit-norm atom that falls beyond order `N`.
pub fn truncation_deficit(spec: &AtomSpec, order: usize) -> Result<f64> {
    let mut f = higher_order_coeffs(spec, order)?;
    f.scale(C64::new(normalization(spec).value(), 0.0));
    Ok((1.0 - f.energy()).max(0.0))
}

/// Outer product of the two normalized factors.
pub fn tensor_atom_coeffs(spec: &TensorAtomSpec, order: usize) -> Result<FourierCoeffs2D> {
    let x = normalized_atom_coeffs(&spec.left, order)?;
    let y = normalized_atom_coeffs(&spec.right, order)?;
    FourierCoeffs2D::tensor(&x, &y)
}

/// `√(1 − |a|^{2(N+1)})`: norm of the order-`N` truncation of `e_a`.
pub fn truncated_szego_norm(a: C64, order: usize) -> f64 {
    (1.0 - a.norm_sqr().powi(order as i32 + 1)).max(0.0).sqrt()
}
