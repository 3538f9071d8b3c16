//! Takenaka-Malmquist systems, the generalized backward shift and 1-D core AFD.

use log::warn;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{grid_argmax, GridSpec};
use crate::hardy::{dot, fft_plan, grid_size_for, horner, nodes, FourierCoeffs1D, Support, C64};
use crate::szego::{check_param, DEFICIT_WARN};

/// Relative energy threshold below which decompositions stop.
pub const DEFAULT_THRESHOLD: f64 = 1e-12;

/// Discarded energy tolerated by the backward shift, relative to `‖f‖²`.
pub const SHIFT_LEAK_TOL: f64 = 1e-8;

/// Ordered disc parameters; repetitions carry multiplicity.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TMParamSequence {
    params: Vec<C64>,
}

impl TMParamSequence {
    pub fn new(params: Vec<C64>) -> Result<Self> {
        for &a in &params {
            check_param(a)?;
        }
        Ok(TMParamSequence { params })
    }

    pub fn params(&self) -> &[C64] {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn push(&mut self, a: C64) -> Result<()> {
        check_param(a)?;
        self.params.push(a);
        Ok(())
    }

    /// `m_k`: the number of entries among `a_1..a_k` equal to `a_k`.
    pub fn multiplicities(&self) -> Vec<u32> {
        (0..self.params.len())
            .map(|k| self.params[..=k].iter().filter(|&&a| a == self.params[k]).count() as u32)
            .collect()
    }
}

#[inline]
fn mobius(a: C64, z: C64) -> C64 {
    (z - a) / (C64::new(1.0, 0.0) - a.conj() * z)
}

#[inline]
fn szego_at(a: C64, z: C64) -> C64 {
    C64::new((1.0 - a.norm_sqr()).sqrt(), 0.0) / (C64::new(1.0, 0.0) - a.conj() * z)
}

/// Blaschke product `Π (z−a_l)/(1−ā_l z)` on `P` boundary nodes.
pub fn blaschke_eval(params: &TMParamSequence, p: usize) -> Vec<C64> {
    nodes(p)
        .into_iter()
        .map(|z| params.params.iter().fold(C64::new(1.0, 0.0), |acc, &a| acc * mobius(a, z)))
        .collect()
}

/// Boundary grid size that keeps aliasing of kernels with `|a| ≤ max_abs`
/// below roundoff at truncation order `N`.
pub fn work_size(order: usize, max_abs: f64) -> usize {
    let base = grid_size_for(order);
    if max_abs <= 0.0 {
        return base;
    }
    let tail = (1e-18f64).ln() / max_abs.ln();
    let need = order as f64 + tail.max(0.0);
    let mut p = base;
    while (p as f64) < need && p < (1 << 22) {
        p *= 2;
    }
    p
}

/// Incremental construction of `B_k = e_{a_k}·Π_{l<k} φ_{a_l}` on a boundary
/// grid, one parameter at a time.
#[derive(Clone, Debug)]
pub struct TmBuilder {
    order: usize,
    p: usize,
    nodes: Vec<C64>,
    prefix: Vec<C64>,
    params: Vec<C64>,
}

impl TmBuilder {
    pub fn new(order: usize, max_abs: f64) -> Self {
        let p = work_size(order, max_abs);
        TmBuilder { order, p, nodes: nodes(p), prefix: vec![C64::new(1.0, 0.0); p], params: Vec::new() }
    }

    pub fn params(&self) -> &[C64] {
        &self.params
    }

    /// Appends `a` and returns the coefficients of the new `B_n` with its
    /// truncation deficit `1 − ‖P_N B_n‖²`.
    pub fn push(&mut self, a: C64) -> Result<(FourierCoeffs1D, f64)> {
        check_param(a)?;
        if work_size(self.order, a.norm()) > self.p {
            let params = std::mem::take(&mut self.params);
            *self = TmBuilder::new(self.order, a.norm());
            for b in params {
                self.push(b)?;
            }
        }
        let mut buf: Vec<C64> = self
            .nodes
            .iter()
            .zip(&self.prefix)
            .map(|(&z, &b)| szego_at(a, z) * b)
            .collect();
        fft_plan(self.p, false).process(&mut buf);
        let scale = 1.0 / self.p as f64;
        let coeffs: Vec<C64> = buf[..=self.order].iter().map(|c| c * scale).collect();
        let f = FourierCoeffs1D::hardy(coeffs)?;
        let deficit = 1.0 - f.energy();
        if deficit > DEFICIT_WARN {
            warn!("TM function {} at a = {a} loses {deficit:.3e} of its energy at order {}", self.params.len() + 1, self.order);
        }
        for (b, &z) in self.prefix.iter_mut().zip(&self.nodes) {
            *b *= mobius(a, z);
        }
        self.params.push(a);
        Ok((f, deficit))
    }
}

/// Truncated TM system `B_1..B_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct TMBasis {
    pub params: TMParamSequence,
    pub bfuncs: Vec<FourierCoeffs1D>,
    /// `1 − ‖P_N B_k‖²` per function.
    pub deficits: Vec<f64>,
}

impl TMBasis {
    pub fn len(&self) -> usize {
        self.bfuncs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bfuncs.is_empty()
    }

    pub fn gram(&self) -> Vec<Vec<C64>> {
        self.bfuncs
            .iter()
            .map(|x| self.bfuncs.iter().map(|y| dot(x.coeffs(), y.coeffs())).collect())
            .collect()
    }

    pub fn max_gram_deviation(&self) -> f64 {
        let g = self.gram();
        let mut worst: f64 = 0.0;
        for (i, row) in g.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((v - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

pub fn tm_basis(params: &TMParamSequence, order: usize) -> Result<TMBasis> {
    let max_abs = params.params.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let mut b = TmBuilder::new(order, max_abs);
    let mut bfuncs = Vec::with_capacity(params.len());
    let mut deficits = Vec::with_capacity(params.len());
    for &a in &params.params {
        let (f, d) = b.push(a)?;
        bfuncs.push(f);
        deficits.push(d);
    }
    Ok(TMBasis { params: params.clone(), bfuncs, deficits })
}

/// Precomputed boundary data for the backward shift through `a` at a fixed order.
#[derive(Clone, Debug)]
pub struct ShiftKernel {
    a: C64,
    order: usize,
    p: usize,
    kernel: Vec<C64>,
    factor: Vec<C64>,
}

impl ShiftKernel {
    pub fn new(a: C64, order: usize) -> Result<Self> {
        check_param(a)?;
        let p = grid_size_for(order);
        let zs = nodes(p);
        let kernel = zs.iter().map(|&z| szego_at(a, z)).collect();
        let factor = zs.iter().map(|&z| (C64::new(1.0, 0.0) - a.conj() * z) / (z - a)).collect();
        Ok(ShiftKernel { a, order, p, kernel, factor })
    }

    pub fn param(&self) -> C64 {
        self.a
    }

    /// `⟨f, e_a⟩ = √(1−|a|²)·f(a)`.
    pub fn coefficient(&self, coeffs: &[C64]) -> C64 {
        horner(coeffs, self.a) * (1.0 - self.a.norm_sqr()).sqrt()
    }

    /// Shifts `c_0..c_N` in place; returns `⟨f, e_a⟩` and the discarded energy.
    pub fn apply(&self, coeffs: &mut [C64]) -> Result<(C64, f64)> {
        if coeffs.len() != self.order + 1 {
            return Err(Error::Dimension(format!(
                "shift kernel built for order {}, got {} coefficients",
                self.order,
                coeffs.len()
            )));
        }
        let c = self.coefficient(coeffs);
        let mut buf = vec![C64::new(0.0, 0.0); self.p];
        buf[..coeffs.len()].copy_from_slice(coeffs);
        fft_plan(self.p, true).process(&mut buf);
        for ((v, &e), &m) in buf.iter_mut().zip(&self.kernel).zip(&self.factor) {
            *v = (*v - c * e) * m;
        }
        fft_plan(self.p, false).process(&mut buf);
        let scale = 1.0 / self.p as f64;
        for (dst, src) in coeffs.iter_mut().zip(&buf) {
            *dst = src * scale;
        }
        let leak: f64 = buf[self.order + 1..].iter().map(|v| (v * scale).norm_sqr()).sum();
        Ok((c, leak))
    }
}

/// `(f − ⟨f,e_a⟩e_a)·(1−āz)/(z−a)`, computed by division on the boundary.
pub fn backward_shift(f: &FourierCoeffs1D, a: C64) -> Result<FourierCoeffs1D> {
    if !f.is_hardy() {
        return Err(Error::Domain("backward shift needs a Hardy signal".into()));
    }
    let k = ShiftKernel::new(a, f.order())?;
    let mut out = f.clone();
    let (_, leak) = k.apply(out.coeffs_mut())?;
    check_leak(leak, f.energy())?;
    Ok(out)
}

pub(crate) fn check_leak(leak: f64, energy: f64) -> Result<()> {
    if leak > SHIFT_LEAK_TOL * energy.max(f64::MIN_POSITIVE) {
        return Err(Error::Truncation(format!(
            "backward shift discarded {leak:.3e} of energy {energy:.3e}"
        )));
    }
    Ok(())
}

/// Grid maximizer of `(1−|a|²)|f(a)|²`, equal to `|⟨f, e_a⟩|²`.
pub fn msp_1d(f: &FourierCoeffs1D, grid: &GridSpec) -> Result<(C64, f64)> {
    if f.energy() == 0.0 {
        return Err(Error::Degenerate("maximal selection on a zero signal".into()));
    }
    let c = f.nonneg();
    let best = grid_argmax(|a| (1.0 - a.norm_sqr()) * horner(c, a).norm_sqr(), grid)?;
    Ok((best.point.z(), best.value))
}

/// One selected parameter of a 1-D AFD run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AfdAtom {
    pub param: C64,
    pub multiplicity: u32,
    /// `⟨f_k, e_{a_k}⟩ = ⟨f, B_k⟩`.
    pub coefficient: C64,
    /// `‖f_{k+1}‖²`, computed from the remainder coefficients.
    pub residual_energy: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AFDRecord {
    pub order: usize,
    pub initial_energy: f64,
    pub atoms: Vec<AfdAtom>,
}

impl AFDRecord {
    pub fn params(&self) -> TMParamSequence {
        TMParamSequence { params: self.atoms.iter().map(|a| a.param).collect() }
    }

    /// `|E_{k−1} − |c_k|² − E_k|` for every step.
    pub fn ledger_discrepancies(&self) -> Vec<f64> {
        let mut prev = self.initial_energy;
        self.atoms
            .iter()
            .map(|a| {
                let d = (prev - a.coefficient.norm_sqr() - a.residual_energy).abs();
                prev = a.residual_energy;
                d
            })
            .collect()
    }

    pub fn final_residual(&self) -> f64 {
        self.atoms.last().map(|a| a.residual_energy).unwrap_or(self.initial_energy)
    }
}

/// Stopping rule: at most `n_terms` steps, or earlier once the residual energy
/// falls to `threshold·‖f‖²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StopRule {
    pub n_terms: usize,
    pub threshold: f64,
}

impl StopRule {
    pub fn terms(n_terms: usize) -> Self {
        StopRule { n_terms, threshold: DEFAULT_THRESHOLD }
    }
}

/// Running core AFD: the reduced remainder `f_k` and the chosen parameters.
#[derive(Clone, Debug)]
pub struct CoreAfd {
    remainder: FourierCoeffs1D,
    params: TMParamSequence,
    initial_energy: f64,
}

impl CoreAfd {
    pub fn new(f: &FourierCoeffs1D) -> Result<Self> {
        if !f.is_hardy() {
            return Err(Error::Domain("AFD needs a Hardy signal".into()));
        }
        let e = f.energy();
        if e == 0.0 {
            return Err(Error::Degenerate("AFD of a zero signal".into()));
        }
        Ok(CoreAfd { remainder: f.clone(), params: TMParamSequence::default(), initial_energy: e })
    }

    pub fn remainder(&self) -> &FourierCoeffs1D {
        &self.remainder
    }

    pub fn params(&self) -> &TMParamSequence {
        &self.params
    }

    pub fn initial_energy(&self) -> f64 {
        self.initial_energy
    }

    /// Selects the next parameter on `grid` and shifts the remainder through it.
    pub fn step(&mut self, grid: &GridSpec) -> Result<AfdAtom> {
        let (a, _) = msp_1d(&self.remainder, grid)?;
        self.step_at(a)
    }

    /// Shifts through a prescribed parameter.
    pub fn step_at(&mut self, a: C64) -> Result<AfdAtom> {
        let before = self.remainder.energy();
        let k = ShiftKernel::new(a, self.remainder.order())?;
        let (c, leak) = k.apply(self.remainder.coeffs_mut())?;
        check_leak(leak, before)?;
        self.params.push(a)?;
        let m = *self.params.multiplicities().last().expect("just pushed");
        Ok(AfdAtom { param: a, multiplicity: m, coefficient: c, residual_energy: self.remainder.energy() })
    }
}

pub fn afd_decompose_1d(f: &FourierCoeffs1D, n_terms: usize, grid: &GridSpec) -> Result<AFDRecord> {
    afd_decompose_1d_with(f, grid, StopRule::terms(n_terms))
}

pub fn afd_decompose_1d_with(f: &FourierCoeffs1D, grid: &GridSpec, stop: StopRule) -> Result<AFDRecord> {
    if stop.n_terms == 0 {
        return Err(Error::Config("n_terms must be at least 1".into()));
    }
    let mut run = CoreAfd::new(f)?;
    let mut atoms = Vec::new();
    while atoms.len() < stop.n_terms && run.remainder.energy() > stop.threshold * run.initial_energy {
        atoms.push(run.step(grid)?);
    }
    Ok(AFDRecord { order: f.order(), initial_energy: run.initial_energy, atoms })
}

/// `Σ_k ⟨f,B_k⟩ B_k` over the recorded parameters.
pub fn reconstruct_1d(record: &AFDRecord, order: usize) -> Result<FourierCoeffs1D> {
    let basis = tm_basis(&record.params(), order)?;
    let mut out = FourierCoeffs1D::zeros(order, Support::Hardy);
    for (b, atom) in basis.bfuncs.iter().zip(&record.atoms) {
        out.axpy(atom.coefficient, b)?;
    }
    Ok(out)
}

/// `Σ (1 − |a_k|)`.
pub fn hyperbolic_diagnostic(params: &TMParamSequence) -> f64 {
    params.params.iter().map(|a| 1.0 - a.norm()).sum()
}

/// One row of a rate check `‖g_k‖ ≤ bound_k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateRow {
    pub step: usize,
    pub residual_norm: f64,
    pub bound: f64,
    pub slack: f64,
}

/// `‖g_k‖` against `M/√k` for `k = 1..n+1`.
pub fn afd_rate_rows(record: &AFDRecord, mass: f64) -> Vec<RateRow> {
    let energies = std::iter::once(record.initial_energy).chain(record.atoms.iter().map(|a| a.residual_energy));
    energies
        .enumerate()
        .map(|(i, e)| {
            let k = i + 1;
            let norm = e.max(0.0).sqrt();
            let bound = mass / (k as f64).sqrt();
            RateRow { step: k, residual_norm: norm, bound, slack: bound - norm }
        })
        .collect()
}

/// Coefficients of `f·Π φ_{a_l}` truncated at the order of `f`.
pub fn times_blaschke(f: &FourierCoeffs1D, params: &TMParamSequence) -> Result<FourierCoeffs1D> {
    let order = f.order();
    let extra = params.len();
    let max_abs = params.params.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let p = work_size(order + extra, max_abs);
    let fs = f.to_samples(p)?;
    let bs = blaschke_eval(params, p);
    let prod: Vec<C64> = fs.par_iter().zip(bs.par_iter()).map(|(a, b)| a * b).collect();
    FourierCoeffs1D::from_samples(&prod, order, Support::Hardy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy::inner_product_1d;
    use crate::szego::szego_coeffs;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn blaschke_examples() {
        let p = 64;
        let empty = blaschke_eval(&TMParamSequence::default(), p);
        assert!(empty.iter().all(|&v| v == c(1.0, 0.0)));
        let zs = nodes(p);
        let b = blaschke_eval(&TMParamSequence::new(vec![c(0.0, 0.0)]).unwrap(), p);
        assert!(b.iter().zip(&zs).all(|(x, z)| (x - z).norm() < 1e-15));
        let b = blaschke_eval(&TMParamSequence::new(vec![c(0.5, 0.0), c(0.5, 0.0)]).unwrap(), p);
        assert!(b.iter().all(|v| (v.norm() - 1.0).abs() < 1e-13));
    }

    #[test]
    fn zero_params_give_monomials() {
        let basis = tm_basis(&TMParamSequence::new(vec![c(0.0, 0.0); 5]).unwrap(), 8).unwrap();
        for (k, b) in basis.bfuncs.iter().enumerate() {
            for j in 0..=8isize {
                let target = if j == k as isize { 1.0 } else { 0.0 };
                assert!((b.get(j) - c(target, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn first_function_is_szego_kernel() {
        let basis = tm_basis(&TMParamSequence::new(vec![c(0.5, 0.0)]).unwrap(), 64).unwrap();
        let e = szego_coeffs(c(0.5, 0.0), 64).unwrap();
        for (x, y) in basis.bfuncs[0].coeffs().iter().zip(e.coeffs()) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn tm_gram_is_identity() {
        let params = vec![c(0.5, 0.0), c(0.3, 0.0), c(0.5, 0.2), c(0.0, 0.0), c(0.0, 0.8)];
        let basis = tm_basis(&TMParamSequence::new(params).unwrap(), 512).unwrap();
        assert!(basis.max_gram_deviation() < 1e-8);
    }

    #[test]
    fn multiplicities_count_repeats() {
        let s = TMParamSequence::new(vec![c(0.5, 0.0), c(0.1, 0.0), c(0.5, 0.0), c(0.5, 0.0)]).unwrap();
        assert_eq!(s.multiplicities(), vec![1, 1, 2, 3]);
    }

    #[test]
    fn shift_examples() {
        let z2 = FourierCoeffs1D::monomial(2, 6).unwrap();
        let s = backward_shift(&z2, c(0.0, 0.0)).unwrap();
        let z = FourierCoeffs1D::monomial(1, 6).unwrap();
        for (x, y) in s.coeffs().iter().zip(z.coeffs()) {
            assert!((x - y).norm() < 1e-14);
        }
        let e = szego_coeffs(c(0.3, -0.6), 200).unwrap();
        assert!(backward_shift(&e, c(0.3, -0.6)).unwrap().energy() < 1e-20);
        let s = backward_shift(&z, c(0.5, 0.0)).unwrap();
        assert!((s.energy() - 0.8125).abs() < 1e-14);
    }

    #[test]
    fn shift_matches_synthetic_division() {
        // top-down division of f(z)(1−āz) − c√(1−|a|²) by (z−a)
        let f = FourierCoeffs1D::hardy((0..12).map(|k| c((k as f64 * 0.7).sin(), (k as f64).cos() / 3.0)).collect()).unwrap();
        let a = c(-0.35, 0.6);
        let n = f.order();
        let s = (1.0 - a.norm_sqr()).sqrt();
        let cst = f.eval_interior(a) * s;
        let mut p = vec![c(0.0, 0.0); n + 2];
        for k in 0..=n {
            p[k] += f.get(k as isize);
            p[k + 1] -= a.conj() * f.get(k as isize);
        }
        p[0] -= cst * s;
        let mut q = vec![c(0.0, 0.0); n + 1];
        q[n] = p[n + 1];
        for k in (1..=n).rev() {
            q[k - 1] = p[k] + a * q[k];
        }
        let shifted = backward_shift(&f, a).unwrap();
        for (x, y) in shifted.coeffs().iter().zip(&q) {
            assert!((x - y).norm() < 1e-13);
        }
    }

    #[test]
    fn shift_rejects_full_support() {
        let f = FourierCoeffs1D::zeros(4, Support::Full);
        assert!(backward_shift(&f, c(0.1, 0.0)).is_err());
    }

    #[test]
    fn msp_examples() {
        let g = GridSpec::default_1d();
        let pts = g.coarse_points();
        let half = pts.iter().min_by(|x, y| (x.z() - c(0.5, 0.0)).norm().total_cmp(&(y.z() - c(0.5, 0.0)).norm())).unwrap().z();
        let e = szego_coeffs(half, 512).unwrap();
        let (a, v) = msp_1d(&e, &g).unwrap();
        assert!((a - half).norm() < 1e-15);
        assert!((v - 1.0).abs() < 1e-12);

        let z = FourierCoeffs1D::monomial(1, 16).unwrap();
        let (a, v) = msp_1d(&z, &g).unwrap();
        assert!((a.norm() - 0.5f64.sqrt()).abs() < 1e-2);
        // grid-limited: the peak is quadratic in the radial offset
        assert!((v - 0.25).abs() < 1e-4 && v <= 0.25 + 1e-15);

        let one = FourierCoeffs1D::monomial(0, 16).unwrap();
        let (a, v) = msp_1d(&one, &g).unwrap();
        assert_eq!(a, c(0.0, 0.0));
        assert_eq!(v, 1.0);

        assert!(matches!(msp_1d(&FourierCoeffs1D::zeros(4, Support::Hardy), &g), Err(Error::Degenerate(_))));
    }

    #[test]
    fn single_atom_in_one_step() {
        let g = GridSpec::default_1d();
        let a = g.coarse_points()[20 * 96 + 3].z();
        let e = szego_coeffs(a, 256).unwrap();
        let rec = afd_decompose_1d(&e, 5, &g).unwrap();
        assert_eq!(rec.atoms.len(), 1);
        assert!(rec.final_residual() < 1e-12);
        let back = reconstruct_1d(&rec, 256).unwrap();
        let mut d = back.clone();
        d.axpy(c(-1.0, 0.0), &e).unwrap();
        assert!(d.norm() < 1e-7);
    }

    #[test]
    fn coefficients_agree_with_tm_projections() {
        let f = FourierCoeffs1D::hardy((0..=32).map(|k| c(1.0 / (k as f64 + 1.0), (k as f64).sin() * 0.1)).collect()).unwrap();
        let g = GridSpec { radial_count: 16, angular_count: 32, refine_levels: 2, max_radius: 0.9 };
        let rec = afd_decompose_1d(&f, 6, &g).unwrap();
        let basis = tm_basis(&rec.params(), 32).unwrap();
        for (b, atom) in basis.bfuncs.iter().zip(&rec.atoms) {
            let direct = inner_product_1d(&f, b).unwrap();
            assert!((direct - atom.coefficient).norm() < 1e-8);
        }
        assert!(rec.ledger_discrepancies().iter().all(|&d| d < 1e-10));
    }

    #[test]
    fn orthogonal_remainder_is_blaschke_times_reduced() {
        let f = FourierCoeffs1D::hardy((0..=24).map(|k| c((k as f64).cos(), 0.2)).collect()).unwrap();
        let g = GridSpec { radial_count: 12, angular_count: 24, refine_levels: 1, max_radius: 0.9 };
        let mut run = CoreAfd::new(&f).unwrap();
        let mut rec = AFDRecord { order: 24, initial_energy: f.energy(), atoms: vec![] };
        for _ in 0..4 {
            rec.atoms.push(run.step(&g).unwrap());
            let approx = reconstruct_1d(&rec, 24).unwrap();
            let mut gk = f.clone();
            gk.axpy(c(-1.0, 0.0), &approx).unwrap();
            let fb = times_blaschke(run.remainder(), run.params()).unwrap();
            let mut d = gk.clone();
            d.axpy(c(-1.0, 0.0), &fb).unwrap();
            assert!(d.norm() < 1e-7);
        }
    }

    #[test]
    fn hyperbolic_examples() {
        assert_eq!(hyperbolic_diagnostic(&TMParamSequence::new(vec![c(0.0, 0.0); 5]).unwrap()), 5.0);
        let s = TMParamSequence::new(vec![c(0.9, 0.0), c(0.99, 0.0), c(0.999, 0.0)]).unwrap();
        assert!((hyperbolic_diagnostic(&s) - 0.111).abs() < 1e-12);
        assert_eq!(hyperbolic_diagnostic(&TMParamSequence::default()), 0.0);
    }
}
