//! Pre-orthogonal greedy algorithm over parameterized dictionaries, with its
//! weak variant, complete-dictionary escalation and the plain orthogonal
//! greedy baseline.
//!
//! Vectors are flat coefficient arrays in a fixed finite space (`V_N` in one
//! variable, `V_N ⊗ V_N` flattened row-major in two). Dictionary atoms are
//! unit vectors of that space: Szegő ladders truncated at `N` and
//! renormalized.

use std::cmp::Ordering;
use std::fmt::Debug;

use ndarray::Array2;

use crate::afd2d::tensor_kernel_block;
use crate::error::{Error, Result};
use crate::grid::{DiscPoint, GridSpec, PairBlock, PairGrid, SearchSpace};
use crate::hardy::{dot, horner, C64};
use crate::szego::{higher_order_coeffs, truncated_szego_norm, AtomSpec};
use crate::tm::{RateRow, StopRule};

/// Below this projection residual a candidate counts as inside the frame span.
pub const EPS_SPAN: f64 = 1e-8;

/// Deepest escalation tried before a candidate is dropped.
pub const MAX_ESCALATION: usize = 16;

/// Orthogonality drift that triggers a third Gram-Schmidt pass.
const REORTH_TOL: f64 = 1e-9;

/// `r²` below which the cached `1 − Σ|⟨a,B_k⟩|²` is replaced by an explicit projection.
const EXPLICIT_R2: f64 = 1e-6;

fn norm(x: &[C64]) -> f64 {
    x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(y: &mut [C64], alpha: C64, x: &[C64]) {
    for (a, b) in y.iter_mut().zip(x) {
        *a += alpha * b;
    }
}

/// Weak selection factor `ρ ∈ (0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeakParam(f64);

impl WeakParam {
    pub fn new(rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(Error::Config(format!("rho = {rho} outside (0, 1]")));
        }
        Ok(WeakParam(rho))
    }

    pub fn strict() -> Self {
        WeakParam(1.0)
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Orthonormal system `B_1..B_n` with the atoms it was built from.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthoFrame<S> {
    dim: usize,
    basis: Vec<Vec<C64>>,
    sources: Vec<S>,
}

impl<S: Clone> OrthoFrame<S> {
    pub fn new(dim: usize) -> Self {
        OrthoFrame { dim, basis: Vec::new(), sources: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vec<C64>] {
        &self.basis
    }

    pub fn sources(&self) -> &[S] {
        &self.sources
    }

    fn check_dim(&self, x: &[C64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::Dimension(format!("vector of length {} in a frame of dimension {}", x.len(), self.dim)));
        }
        Ok(())
    }

    /// `Q(x) = x − Σ⟨x,B_k⟩B_k` by classical Gram-Schmidt run twice, and its norm.
    pub fn project_residual(&self, x: &[C64]) -> Result<(Vec<C64>, f64)> {
        self.check_dim(x)?;
        let mut res = x.to_vec();
        for _ in 0..2 {
            let coeffs: Vec<C64> = self.basis.iter().map(|b| dot(&res, b)).collect();
            for (c, b) in coeffs.iter().zip(&self.basis) {
                axpy(&mut res, -c, b);
            }
        }
        let r = norm(&res);
        Ok((res, r))
    }

    /// Appends the normalized residual of `atom`; returns the new `B_n` and `r`.
    pub fn extend(&mut self, atom: &[C64], source: S) -> Result<(Vec<C64>, f64)> {
        let (mut res, r) = self.project_residual(atom)?;
        if r < EPS_SPAN {
            return Err(Error::SpanDegenerate { r });
        }
        for v in &mut res {
            *v /= r;
        }
        let drift = self.basis.iter().map(|b| dot(&res, b).norm()).fold(0.0, f64::max);
        if drift > REORTH_TOL {
            let coeffs: Vec<C64> = self.basis.iter().map(|b| dot(&res, b)).collect();
            for (c, b) in coeffs.iter().zip(&self.basis) {
                axpy(&mut res, -c, b);
            }
            let n = norm(&res);
            for v in &mut res {
                *v /= n;
            }
        }
        self.basis.push(res.clone());
        self.sources.push(source);
        Ok((res, r))
    }

    pub fn max_gram_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, x) in self.basis.iter().enumerate() {
            for (j, y) in self.basis.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot(x, y) - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

/// Pre-orthogonal gain of one candidate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gain {
    /// `r_n(a) = ‖Q_{n−1} a‖`.
    pub r: f64,
    /// `|⟨g_n, a⟩| / r`.
    pub gain: f64,
    /// `⟨g_n, a⟩`.
    pub correlation: C64,
}

/// `|⟨g, B^a⟩| = |⟨g, a⟩| / r`; fails with a span-degeneracy signal when `r < ε_span`.
pub fn candidate_gain<S: Clone>(g: &[C64], atom: &[C64], frame: &OrthoFrame<S>) -> Result<Gain> {
    frame.check_dim(g)?;
    let (_, r) = frame.project_residual(atom)?;
    if r < EPS_SPAN {
        return Err(Error::SpanDegenerate { r });
    }
    let correlation = dot(g, atom);
    Ok(Gain { r, gain: correlation.norm() / r, correlation })
}

/// Human-readable identity of an atom for records.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AtomLabel {
    pub a: C64,
    pub m: u32,
    /// Second factor for tensor atoms.
    pub b: Option<(C64, u32)>,
}

/// A parameterized dictionary of unit vectors with a search grid and an
/// escalation rule for repeated parameters.
pub trait Dictionary: SearchSpace + Sync {
    type Order: Copy + Debug + PartialEq;

    fn dim(&self) -> usize;
    fn base_order(&self) -> Self::Order;
    /// Orders tried, in preference order, when `order` lies in the frame span.
    fn next_orders(&self, order: Self::Order) -> Vec<Self::Order>;
    fn atom(&self, p: &Self::Point, order: Self::Order) -> Result<Vec<C64>>;
    /// `⟨v, atom(p, base)⟩` for every point of the block, in block order.
    fn correlate(&self, v: &[C64], block: &Self::Block) -> Vec<C64>;
    fn label(&self, p: &Self::Point, order: Self::Order) -> AtomLabel;
    fn atom_for_label(&self, label: &AtomLabel) -> Result<Vec<C64>>;
}

/// `P_N E / ‖P_N E‖` for the order-`m` Szegő ladder element at `a`.
pub fn unit_ladder_atom(a: C64, m: u32, order: usize) -> Result<Vec<C64>> {
    let f = higher_order_coeffs(&AtomSpec::new(a, m)?, order)?;
    let n = f.norm();
    if n == 0.0 {
        return Err(Error::Domain(format!("order {m} exceeds the truncation {order} at a = 0")));
    }
    Ok(f.coeffs().iter().map(|c| c / n).collect())
}

fn kernel_scale(a: C64, order: usize) -> f64 {
    (1.0 - a.norm_sqr()).sqrt() / truncated_szego_norm(a, order)
}

/// The complete Szegő dictionary on the disc, truncated at order `N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SzegoDictionary {
    pub order: usize,
    pub grid: GridSpec,
}

impl SearchSpace for SzegoDictionary {
    type Point = DiscPoint;
    type Block = Vec<DiscPoint>;

    fn coarse(&self) -> Vec<DiscPoint> {
        self.grid.coarse()
    }

    fn levels(&self) -> u32 {
        self.grid.refine_levels
    }

    fn refine(&self, center: &DiscPoint, level: u32, anchor: &DiscPoint) -> Vec<DiscPoint> {
        self.grid.refine(center, level, anchor)
    }

    fn block_len(block: &Vec<DiscPoint>) -> usize {
        block.len()
    }

    fn block_point(block: &Vec<DiscPoint>, i: usize) -> DiscPoint {
        block[i]
    }

    fn tie_cmp(a: &DiscPoint, b: &DiscPoint) -> Ordering {
        crate::grid::tie_cmp(a, b)
    }
}

impl Dictionary for SzegoDictionary {
    type Order = u32;

    fn dim(&self) -> usize {
        self.order + 1
    }

    fn base_order(&self) -> u32 {
        1
    }

    fn next_orders(&self, m: u32) -> Vec<u32> {
        vec![m + 1]
    }

    fn atom(&self, p: &DiscPoint, m: u32) -> Result<Vec<C64>> {
        unit_ladder_atom(p.z(), m, self.order)
    }

    fn correlate(&self, v: &[C64], block: &Vec<DiscPoint>) -> Vec<C64> {
        block
            .iter()
            .map(|p| {
                let a = p.z();
                horner(v, a) * kernel_scale(a, self.order)
            })
            .collect()
    }

    fn label(&self, p: &DiscPoint, m: u32) -> AtomLabel {
        AtomLabel { a: p.z(), m, b: None }
    }

    fn atom_for_label(&self, label: &AtomLabel) -> Result<Vec<C64>> {
        unit_ladder_atom(label.a, label.m, self.order)
    }
}

/// The complete product-Szegő dictionary on the torus, truncated at order `N`
/// per variable. Vectors are `(N+1)²` long, row-major in `(k, l)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductSzegoDictionary {
    pub order: usize,
    pub grid: PairGrid,
}

impl SearchSpace for ProductSzegoDictionary {
    type Point = (DiscPoint, DiscPoint);
    type Block = PairBlock;

    fn coarse(&self) -> PairBlock {
        self.grid.coarse()
    }

    fn levels(&self) -> u32 {
        self.grid.levels()
    }

    fn refine(&self, center: &Self::Point, level: u32, anchor: &Self::Point) -> PairBlock {
        self.grid.refine(center, level, anchor)
    }

    fn block_len(block: &PairBlock) -> usize {
        PairGrid::block_len(block)
    }

    fn block_point(block: &PairBlock, i: usize) -> Self::Point {
        PairGrid::block_point(block, i)
    }

    fn tie_cmp(a: &Self::Point, b: &Self::Point) -> Ordering {
        PairGrid::tie_cmp(a, b)
    }
}

fn outer(x: &[C64], y: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(x.len() * y.len());
    for a in x {
        for b in y {
            out.push(a * b);
        }
    }
    out
}

impl Dictionary for ProductSzegoDictionary {
    type Order = (u32, u32);

    fn dim(&self) -> usize {
        (self.order + 1) * (self.order + 1)
    }

    fn base_order(&self) -> (u32, u32) {
        (1, 1)
    }

    fn next_orders(&self, (k, l): (u32, u32)) -> Vec<(u32, u32)> {
        vec![(k + 1, l), (k, l + 1)]
    }

    fn atom(&self, p: &Self::Point, (k, l): (u32, u32)) -> Result<Vec<C64>> {
        let x = unit_ladder_atom(p.0.z(), k, self.order)?;
        let y = unit_ladder_atom(p.1.z(), l, self.order)?;
        Ok(outer(&x, &y))
    }

    fn correlate(&self, v: &[C64], block: &PairBlock) -> Vec<C64> {
        let n = self.order + 1;
        let g = Array2::from_shape_vec((n, n), v.to_vec()).expect("vector matches dictionary dimension");
        let left: Vec<C64> = block.left.iter().map(|p| p.z()).collect();
        let right: Vec<C64> = block.right.iter().map(|p| p.z()).collect();
        tensor_kernel_block(&g, self.order, &left, &right).into_iter().collect()
    }

    fn label(&self, p: &Self::Point, (k, l): (u32, u32)) -> AtomLabel {
        AtomLabel { a: p.0.z(), m: k, b: Some((p.1.z(), l)) }
    }

    fn atom_for_label(&self, label: &AtomLabel) -> Result<Vec<C64>> {
        let (b, l) = label
            .b
            .ok_or_else(|| Error::Dimension("tensor dictionary needs a two-factor label".into()))?;
        let x = unit_ladder_atom(label.a, label.m, self.order)?;
        let y = unit_ladder_atom(b, l, self.order)?;
        Ok(outer(&x, &y))
    }
}

/// Frame entries remember the grid point and order they came from.
pub type FrameSource<D> = (<D as SearchSpace>::Point, <D as Dictionary>::Order);

/// Result of one pre-orthogonal selection.
#[derive(Clone, Debug, PartialEq)]
pub struct SelectionOutcome<P, O> {
    pub point: P,
    pub order: O,
    pub r: f64,
    pub gain: f64,
    pub correlation: C64,
    /// Largest gain seen over the evaluated grid.
    pub sup_gain: f64,
}

#[derive(Clone, Copy, Debug)]
struct Cand<P, O> {
    point: P,
    order: O,
    r: f64,
    gain: f64,
}

fn beats<D: Dictionary>(x: &Cand<D::Point, D::Order>, y: &Cand<D::Point, D::Order>) -> bool {
    x.gain > y.gain
        || (x.gain == y.gain && (x.r < y.r || (x.r == y.r && D::tie_cmp(&x.point, &y.point) == Ordering::Less)))
}

fn weak_beats<D: Dictionary>(x: &Cand<D::Point, D::Order>, y: &Cand<D::Point, D::Order>) -> bool {
    x.r < y.r
        || (x.r == y.r && (x.gain > y.gain || (x.gain == y.gain && D::tie_cmp(&x.point, &y.point) == Ordering::Less)))
}

/// Best admissible order at a parameter whose base atom is in the frame span.
fn escalate<D: Dictionary>(
    g: &[C64],
    frame: &OrthoFrame<FrameSource<D>>,
    dict: &D,
    p: &D::Point,
) -> Result<Option<Cand<D::Point, D::Order>>> {
    let mut level = dict.next_orders(dict.base_order());
    for _ in 0..MAX_ESCALATION {
        let mut best: Option<Cand<D::Point, D::Order>> = None;
        for &o in &level {
            let atom = match dict.atom(p, o) {
                Ok(a) => a,
                Err(Error::Domain(_)) => continue,
                Err(e) => return Err(e),
            };
            let (_, r) = frame.project_residual(&atom)?;
            if r < EPS_SPAN {
                continue;
            }
            let gain = dot(g, &atom).norm() / r;
            if best.as_ref().map(|b| gain > b.gain).unwrap_or(true) {
                best = Some(Cand { point: *p, order: o, r, gain });
            }
        }
        if best.is_some() {
            return Ok(best);
        }
        let mut next = Vec::new();
        for &o in &level {
            for n in dict.next_orders(o) {
                if !next.contains(&n) {
                    next.push(n);
                }
            }
        }
        level = next;
    }
    Ok(None)
}

/// Running `Σ_k |⟨atom_p, B_k⟩|²` over the coarse block.
#[derive(Clone, Debug)]
pub struct CoarseCache<B> {
    block: B,
    captured: Vec<f64>,
}

impl<B> CoarseCache<B> {
    pub fn new<D: Dictionary<Block = B>>(dict: &D) -> Self {
        let block = dict.coarse();
        let n = D::block_len(&block);
        CoarseCache { block, captured: vec![0.0; n] }
    }

    pub fn add<D: Dictionary<Block = B>>(&mut self, dict: &D, b: &[C64]) {
        for (s, c) in self.captured.iter_mut().zip(dict.correlate(b, &self.block)) {
            *s += c.norm_sqr();
        }
    }

    /// Largest `r` over the coarse block.
    pub fn max_r(&self) -> f64 {
        self.captured.iter().map(|s| (1.0 - s).max(0.0).sqrt()).fold(0.0, f64::max)
    }
}

fn evaluate<D: Dictionary>(
    g: &[C64],
    frame: &OrthoFrame<FrameSource<D>>,
    dict: &D,
    block: &D::Block,
    captured: Option<&[f64]>,
) -> Result<Vec<Option<Cand<D::Point, D::Order>>>> {
    let n = D::block_len(block);
    let corr = dict.correlate(g, block);
    let own;
    let captured = match captured {
        Some(c) => c,
        None => {
            let mut s = vec![0.0; n];
            for b in frame.basis() {
                for (x, c) in s.iter_mut().zip(dict.correlate(b, block)) {
                    *x += c.norm_sqr();
                }
            }
            own = s;
            &own
        }
    };
    let base = dict.base_order();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let p = D::block_point(block, i);
        let r2 = 1.0 - captured[i];
        if r2 > EXPLICIT_R2 {
            let r = r2.sqrt();
            out.push(Some(Cand { point: p, order: base, r, gain: corr[i].norm() / r }));
            continue;
        }
        let atom = dict.atom(&p, base)?;
        let (_, r) = frame.project_residual(&atom)?;
        if r >= EPS_SPAN {
            out.push(Some(Cand { point: p, order: base, r, gain: dot(g, &atom).norm() / r }));
        } else {
            out.push(escalate(g, frame, dict, &p)?);
        }
    }
    Ok(out)
}

/// Pre-orthogonal ρ-maximal selection over the dictionary grid. With
/// `ρ = 1` the grid maximizer of the gain is returned, ties going to the
/// smallest `r`; with `ρ < 1` the admissible candidate of smallest `r`.
pub fn poga_select<D: Dictionary>(
    g: &[C64],
    frame: &OrthoFrame<FrameSource<D>>,
    dict: &D,
    weak: WeakParam,
) -> Result<SelectionOutcome<D::Point, D::Order>> {
    select_impl(g, frame, dict, weak, None)
}

fn select_impl<D: Dictionary>(
    g: &[C64],
    frame: &OrthoFrame<FrameSource<D>>,
    dict: &D,
    weak: WeakParam,
    cache: Option<&CoarseCache<D::Block>>,
) -> Result<SelectionOutcome<D::Point, D::Order>> {
    frame.check_dim(g)?;
    if norm(g) == 0.0 {
        return Err(Error::Degenerate("selection on a zero remainder".into()));
    }
    let rho = weak.value();
    let coarse_owned;
    let coarse = match cache {
        Some(c) => &c.block,
        None => {
            coarse_owned = dict.coarse();
            &coarse_owned
        }
    };
    if D::block_len(coarse) == 0 {
        return Err(Error::Config("empty search grid".into()));
    }
    let cands = evaluate(g, frame, dict, coarse, cache.map(|c| c.captured.as_slice()))?;
    let mut best: Option<Cand<D::Point, D::Order>> = None;
    for c in cands.iter().flatten() {
        if best.as_ref().map(|b| beats::<D>(c, b)).unwrap_or(true) {
            best = Some(*c);
        }
    }
    let mut best = best.ok_or(Error::SpanDegenerate { r: 0.0 })?;
    let mut pool: Vec<Cand<D::Point, D::Order>> = Vec::new();
    if rho < 1.0 {
        pool.extend(cands.iter().flatten().filter(|c| c.gain >= rho * best.gain));
    }
    let anchor = best.point;
    for level in 1..=dict.levels() {
        let block = dict.refine(&best.point, level, &anchor);
        for c in evaluate(g, frame, dict, &block, None)?.into_iter().flatten() {
            if rho < 1.0 {
                pool.push(c);
            }
            if beats::<D>(&c, &best) {
                best = c;
            }
        }
    }
    let sup = best.gain;
    let chosen = if rho < 1.0 {
        let mut pick = best;
        for c in pool.iter().filter(|c| c.gain >= rho * sup) {
            if weak_beats::<D>(c, &pick) {
                pick = *c;
            }
        }
        pick
    } else {
        best
    };
    let atom = dict.atom(&chosen.point, chosen.order)?;
    let gain = candidate_gain(g, &atom, frame)?;
    Ok(SelectionOutcome {
        point: chosen.point,
        order: chosen.order,
        r: gain.r,
        gain: gain.gain,
        correlation: gain.correlation,
        sup_gain: sup,
    })
}

/// Plain orthogonal-greedy pick: the grid maximizer of `|⟨g, a⟩|`.
pub fn oga_select<D: Dictionary>(g: &[C64], dict: &D) -> Result<(D::Point, f64)> {
    if g.len() != dict.dim() {
        return Err(Error::Dimension(format!("vector of length {} for dictionary dimension {}", g.len(), dict.dim())));
    }
    if norm(g) == 0.0 {
        return Err(Error::Degenerate("selection on a zero remainder".into()));
    }
    let best = crate::grid::search_argmax(dict, |b: &D::Block| Ok(dict.correlate(g, b).iter().map(|c| c.norm()).collect()))?;
    Ok((best.point, best.value))
}

/// One P-OGA step.
#[derive(Clone, Debug, PartialEq)]
pub struct PogaStep<P, O> {
    pub point: P,
    pub order: O,
    pub label: AtomLabel,
    /// `⟨f, B_n⟩`.
    pub coefficient: C64,
    /// `‖g_{n+1}‖²`.
    pub residual_energy: f64,
    pub r: f64,
    pub gain: f64,
    pub sup_gain: f64,
    /// Supremal `r_n` over the synthesis support, or over the coarse grid.
    pub r_sup: f64,
    /// `R_n`: running maximum of `r_sup`.
    pub big_r: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PogaRecord<P, O> {
    pub dim: usize,
    pub initial_energy: f64,
    pub rho: f64,
    pub steps: Vec<PogaStep<P, O>>,
}

impl<P, O> PogaRecord<P, O> {
    pub fn ledger_discrepancies(&self) -> Vec<f64> {
        let mut prev = self.initial_energy;
        self.steps
            .iter()
            .map(|s| {
                let d = (prev - s.coefficient.norm_sqr() - s.residual_energy).abs();
                prev = s.residual_energy;
                d
            })
            .collect()
    }

    pub fn final_residual(&self) -> f64 {
        self.steps.last().map(|s| s.residual_energy).unwrap_or(self.initial_energy)
    }

    pub fn labels(&self) -> Vec<AtomLabel> {
        self.steps.iter().map(|s| s.label).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PogaOptions {
    pub stop: StopRule,
    pub weak: WeakParam,
    /// Unit atoms of a known synthesis, used for `R_m`.
    pub support: Option<Vec<Vec<C64>>>,
}

impl PogaOptions {
    pub fn terms(n_terms: usize) -> Self {
        PogaOptions { stop: StopRule::terms(n_terms), weak: WeakParam::strict(), support: None }
    }
}

/// Running decomposition: the frame and the orthogonal standard remainder.
pub struct Poga<'d, D: Dictionary> {
    dict: &'d D,
    frame: OrthoFrame<FrameSource<D>>,
    remainder: Vec<C64>,
    cache: CoarseCache<D::Block>,
    big_r: f64,
}

impl<'d, D: Dictionary> Poga<'d, D> {
    pub fn new(f: &[C64], dict: &'d D) -> Result<Self> {
        if f.len() != dict.dim() {
            return Err(Error::Dimension(format!("signal of length {} for dictionary dimension {}", f.len(), dict.dim())));
        }
        Ok(Poga { dict, frame: OrthoFrame::new(dict.dim()), remainder: f.to_vec(), cache: CoarseCache::new(dict), big_r: 0.0 })
    }

    pub fn frame(&self) -> &OrthoFrame<FrameSource<D>> {
        &self.frame
    }

    pub fn remainder(&self) -> &[C64] {
        &self.remainder
    }

    pub fn select(&self, weak: WeakParam) -> Result<SelectionOutcome<D::Point, D::Order>> {
        select_impl(&self.remainder, &self.frame, self.dict, weak, Some(&self.cache))
    }

    pub fn step(&mut self, weak: WeakParam, support: Option<&[Vec<C64>]>) -> Result<PogaStep<D::Point, D::Order>> {
        let r_sup = match support {
            Some(atoms) => {
                let mut m: f64 = 0.0;
                for a in atoms {
                    m = m.max(self.frame.project_residual(a)?.1);
                }
                m
            }
            None => self.cache.max_r(),
        };
        self.big_r = self.big_r.max(r_sup);
        let sel = self.select(weak)?;
        let atom = self.dict.atom(&sel.point, sel.order)?;
        let (b, r) = self.frame.extend(&atom, (sel.point, sel.order))?;
        let coefficient = dot(&self.remainder, &b);
        axpy(&mut self.remainder, -coefficient, &b);
        self.cache.add(self.dict, &b);
        Ok(PogaStep {
            point: sel.point,
            order: sel.order,
            label: self.dict.label(&sel.point, sel.order),
            coefficient,
            residual_energy: norm(&self.remainder).powi(2),
            r,
            gain: sel.gain,
            sup_gain: sel.sup_gain,
            r_sup,
            big_r: self.big_r,
        })
    }
}

pub fn poga_decompose<D: Dictionary>(f: &[C64], dict: &D, opts: &PogaOptions) -> Result<PogaRecord<D::Point, D::Order>> {
    if opts.stop.n_terms == 0 {
        return Err(Error::Config("n_terms must be at least 1".into()));
    }
    let e0 = norm(f).powi(2);
    if e0 == 0.0 {
        return Err(Error::Degenerate("decomposition of a zero signal".into()));
    }
    let mut run = Poga::new(f, dict)?;
    let mut steps = Vec::new();
    while steps.len() < opts.stop.n_terms && norm(&run.remainder).powi(2) > opts.stop.threshold * e0 {
        steps.push(run.step(opts.weak, opts.support.as_deref())?);
    }
    Ok(PogaRecord { dim: dict.dim(), initial_energy: e0, rho: opts.weak.value(), steps })
}

/// Rebuilds the frame from recorded labels and returns `⟨f, B_k⟩` per step.
pub fn replay_coefficients<D: Dictionary>(f: &[C64], dict: &D, labels: &[AtomLabel]) -> Result<Vec<C64>> {
    let mut frame: OrthoFrame<AtomLabel> = OrthoFrame::new(dict.dim());
    let mut out = Vec::with_capacity(labels.len());
    for l in labels {
        let atom = dict.atom_for_label(l)?;
        let (b, _) = frame.extend(&atom, *l)?;
        out.push(dot(f, &b));
    }
    Ok(out)
}

/// `Σ c_k B_k` with the frame rebuilt from labels.
pub fn reconstruct_from_labels<D: Dictionary>(dict: &D, labels: &[AtomLabel], coeffs: &[C64]) -> Result<Vec<C64>> {
    let mut frame: OrthoFrame<AtomLabel> = OrthoFrame::new(dict.dim());
    let mut out = vec![C64::new(0.0, 0.0); dict.dim()];
    for (l, &c) in labels.iter().zip(coeffs) {
        let atom = dict.atom_for_label(l)?;
        let (b, _) = frame.extend(&atom, *l)?;
        axpy(&mut out, c, &b);
    }
    Ok(out)
}

/// Rate table with the recurrence checks on `d_m = ‖g_m‖²`.
#[derive(Clone, Debug, PartialEq)]
pub struct RateReport {
    pub rows: Vec<RateRow>,
    /// Steps where `d_{m+1} ≤ d_m(1 − d_m/A)` failed.
    pub recurrence_failures: Vec<usize>,
    /// Steps where `d_m ≤ A/m` failed.
    pub conclusion_failures: Vec<usize>,
}

impl RateReport {
    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| r.slack < 0.0).count() + self.recurrence_failures.len() + self.conclusion_failures.len()
    }
}

/// `‖g_m‖` against `R_m·M/(ρ√m)` for `m = 1..n+1`, with `A = (R_m·M/ρ)²`.
pub fn rate_report<P, O>(record: &PogaRecord<P, O>, mass: f64, rho: f64) -> RateReport {
    // roundoff allowance on squared quantities
    let tol = 1e-12 * record.initial_energy.max(mass * mass);
    let energies: Vec<f64> = std::iter::once(record.initial_energy)
        .chain(record.steps.iter().map(|s| s.residual_energy))
        .map(|e| e.max(0.0))
        .collect();
    let big_r = |m: usize| -> f64 {
        if record.steps.is_empty() {
            return 1.0;
        }
        record.steps[(m - 1).min(record.steps.len() - 1)].big_r
    };
    let mut rows = Vec::with_capacity(energies.len());
    let mut recurrence_failures = Vec::new();
    let mut conclusion_failures = Vec::new();
    for (i, &d) in energies.iter().enumerate() {
        let m = i + 1;
        let scale = big_r(m) * mass / rho;
        let a = scale * scale;
        let norm = d.sqrt();
        let bound = scale / (m as f64).sqrt();
        let slack = if norm <= bound + tol.sqrt() { (bound - norm).max(0.0) } else { bound - norm };
        rows.push(RateRow { step: m, residual_norm: norm, bound, slack });
        if d > a / m as f64 + tol {
            conclusion_failures.push(m);
        }
        if let Some(&next) = energies.get(i + 1) {
            if next > d * (1.0 - d / a) + tol {
                recurrence_failures.push(m);
            }
        }
    }
    RateReport { rows, recurrence_failures, conclusion_failures }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::szego::szego_coeffs;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn e(a: C64, n: usize) -> Vec<C64> {
        szego_coeffs(a, n).unwrap().coeffs().to_vec()
    }

    #[test]
    fn projection_examples() {
        let n = 200;
        let frame: OrthoFrame<()> = OrthoFrame::new(n + 1);
        let x = e(c(0.3, 0.0), n);
        let (res, r) = frame.project_residual(&x).unwrap();
        assert_eq!(res, x);
        assert!((r - 1.0).abs() < 1e-14);

        let mut frame: OrthoFrame<()> = OrthoFrame::new(n + 1);
        let (b1, _) = frame.extend(&e(c(0.5, 0.0), n), ()).unwrap();
        let (_, r0) = frame.project_residual(&b1).unwrap();
        assert!(r0 < 1e-15);
        let (res, r) = frame.project_residual(&x).unwrap();
        let k = 0.75f64.sqrt() * 0.91f64.sqrt() / 0.85;
        assert!((r * r - (1.0 - k * k)).abs() < 1e-12);
        assert!((r * r - 0.0554).abs() < 1e-4);
        assert!(dot(&res, &b1).norm() < 1e-15);
    }

    #[test]
    fn gain_examples() {
        let n = 200;
        let g = e(c(0.7, 0.0), n);
        let frame: OrthoFrame<()> = OrthoFrame::new(n + 1);
        let atom = e(c(0.3, 0.0), n);
        let gain = candidate_gain(&g, &atom, &frame).unwrap();
        assert!((gain.gain - dot(&g, &atom).norm()).abs() < 1e-15);

        let mut frame: OrthoFrame<()> = OrthoFrame::new(n + 1);
        let (b1, _) = frame.extend(&e(c(0.5, 0.0), n), ()).unwrap();
        assert!(matches!(candidate_gain(&g, &b1, &frame), Err(Error::SpanDegenerate { .. })));

        // g_2 = Q(e_0.7); explicit Gram-Schmidt of e_0.3 then inner product
        let mut g2 = g.clone();
        let p = dot(&g2, &b1);
        axpy(&mut g2, -p, &b1);
        let gain = candidate_gain(&g2, &atom, &frame).unwrap();
        let mut q = atom.clone();
        let p = dot(&q, &b1);
        axpy(&mut q, -p, &b1);
        let nq = norm(&q);
        let direct = dot(&g2, &q).norm() / nq;
        assert!((gain.gain - direct).abs() < 1e-12);
        assert!((gain.gain * gain.r - dot(&g2, &atom).norm()).abs() < 1e-12);
        assert!(gain.gain >= dot(&g2, &atom).norm());
    }

    fn grid() -> GridSpec {
        GridSpec { radial_count: 12, angular_count: 24, refine_levels: 0, max_radius: 0.9 }
    }

    #[test]
    fn select_single_kernel() {
        let dict = SzegoDictionary { order: 128, grid: grid() };
        let pts = dict.grid.coarse_points();
        let p = pts[4 * 24 + 7];
        let g = dict.atom(&p, 1).unwrap();
        let frame = OrthoFrame::new(dict.dim());
        let s = poga_select(&g, &frame, &dict, WeakParam::strict()).unwrap();
        assert_eq!(s.point, p);
        assert_eq!(s.order, 1);
        assert!((s.gain - 1.0).abs() < 1e-12);
        let (q, v) = oga_select(&g, &dict).unwrap();
        assert_eq!(q, p);
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn repeated_parameter_escalates() {
        let dict = SzegoDictionary { order: 128, grid: grid() };
        let pts = dict.grid.coarse_points();
        let p = pts[5 * 24 + 3];
        let mut f = dict.atom(&p, 1).unwrap();
        axpy(&mut f, c(0.0, 0.05), &dict.atom(&p, 2).unwrap());
        let rec = poga_decompose(&f, &dict, &PogaOptions::terms(2)).unwrap();
        assert_eq!(rec.steps[0].point, p);
        assert_eq!(rec.steps[1].point, p);
        assert_eq!(rec.steps[0].order, 1);
        assert_eq!(rec.steps[1].order, 2);
        assert!(rec.final_residual() < 1e-20);

        // brute force over the escalated dictionary at step 2
        let mut frame: OrthoFrame<(DiscPoint, u32)> = OrthoFrame::new(dict.dim());
        let (b1, _) = frame.extend(&dict.atom(&p, 1).unwrap(), (p, 1)).unwrap();
        let mut g = f.clone();
        let cf = dot(&g, &b1);
        axpy(&mut g, -cf, &b1);
        let mut sup: f64 = 0.0;
        for q in &pts {
            for m in 1..=3 {
                if let Ok(gn) = candidate_gain(&g, &dict.atom(q, m).unwrap(), &frame) {
                    sup = sup.max(gn.gain);
                }
            }
        }
        assert!((rec.steps[1].gain - sup).abs() < 1e-9);
    }

    #[test]
    fn weak_selection_respects_rho() {
        let dict = SzegoDictionary { order: 64, grid: GridSpec { refine_levels: 1, ..grid() } };
        let f: Vec<C64> = (0..=64).map(|k| c(1.0 / (1.0 + k as f64), (k as f64 * 0.3).cos() * 0.2)).collect();
        let frame = OrthoFrame::new(dict.dim());
        let strict = poga_select(&f, &frame, &dict, WeakParam::strict()).unwrap();
        let weak = poga_select(&f, &frame, &dict, WeakParam::new(0.5).unwrap()).unwrap();
        assert!(weak.gain >= 0.5 * strict.gain - 1e-12);
        assert!(WeakParam::new(0.0).is_err());
        assert!(WeakParam::new(1.5).is_err());
    }

    #[test]
    fn frame_stays_orthonormal_on_clustered_atoms() {
        let n = 128;
        let mut frame: OrthoFrame<()> = OrthoFrame::new(n + 1);
        for j in 0..12 {
            let a = C64::from_polar(0.6 + 0.001 * j as f64, 0.001 * j as f64);
            let _ = frame.extend(&unit_ladder_atom(a, 1, n).unwrap(), ());
        }
        assert!(frame.max_gram_deviation() < 1e-9);
    }

    #[test]
    fn product_dictionary_matches_explicit_atoms() {
        let g = GridSpec { radial_count: 3, angular_count: 6, refine_levels: 0, max_radius: 0.8 };
        let dict = ProductSzegoDictionary { order: 20, grid: PairGrid::square(g) };
        let v: Vec<C64> = (0..dict.dim()).map(|i| c((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos())).collect();
        let block = dict.coarse();
        let fast = dict.correlate(&v, &block);
        for i in (0..PairGrid::block_len(&block)).step_by(17) {
            let p = PairGrid::block_point(&block, i);
            let atom = dict.atom(&p, (1, 1)).unwrap();
            assert!((fast[i] - dot(&v, &atom)).norm() < 1e-12);
            assert!((norm(&atom) - 1.0).abs() < 1e-14);
        }
        assert_eq!(dict.next_orders((1, 2)), vec![(2, 2), (1, 3)]);
    }

    #[test]
    fn orthogonal_atoms_give_unit_rate_constant() {
        // monomial atoms at a = 0 with increasing order are mutually orthogonal
        let dict = SzegoDictionary { order: 16, grid: grid() };
        let mut f = vec![c(0.0, 0.0); 17];
        f[0] = c(0.5, 0.0);
        let rec = poga_decompose(&f, &dict, &PogaOptions::terms(1)).unwrap();
        assert_eq!(rec.steps[0].big_r, 1.0);
        let rep = rate_report(&rec, 0.5, 1.0);
        assert_eq!(rep.violations(), 0);
        assert!((rep.rows[0].bound - 0.5).abs() < 1e-15);
    }
}
