//! Two-dimensional AFD on the torus: product-TM decomposition with joint
//! selection of `(a_n, b_n)`, and the pure greedy algorithm over tensor
//! Szegő atoms.

use ndarray::{Array1, Array2, Axis};

use crate::error::{Error, Result};
use crate::grid::{search_argmax, DiscPoint, GridSpec, PairBlock, PairGrid};
use crate::hardy::{FourierCoeffs1D, FourierCoeffs2D, Support, C64};
use crate::szego::{check_param, truncated_szego_norm, AtomSpec, TensorAtomSpec};
use crate::tm::{check_leak, tm_basis, ShiftKernel, StopRule, TMBasis, TMParamSequence, TmBuilder};

/// Relative spread below which the objective counts as flat in one variable.
const FLAT_TOL: f64 = 1e-12;

/// Ordered parameter pairs `(a_k, b_k)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PairSequence {
    pairs: Vec<(C64, C64)>,
}

impl PairSequence {
    pub fn new(pairs: Vec<(C64, C64)>) -> Result<Self> {
        for &(a, b) in &pairs {
            check_param(a)?;
            check_param(b)?;
        }
        Ok(PairSequence { pairs })
    }

    pub fn pairs(&self) -> &[(C64, C64)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn push(&mut self, a: C64, b: C64) -> Result<()> {
        check_param(a)?;
        check_param(b)?;
        self.pairs.push((a, b));
        Ok(())
    }

    pub fn left(&self) -> TMParamSequence {
        TMParamSequence::new(self.pairs.iter().map(|p| p.0).collect()).expect("validated on insert")
    }

    pub fn right(&self) -> TMParamSequence {
        TMParamSequence::new(self.pairs.iter().map(|p| p.1).collect()).expect("validated on insert")
    }
}

fn require_hardy(f: &FourierCoeffs2D) -> Result<()> {
    if !f.is_hardy() {
        return Err(Error::Domain("expected a Hardy signal on the torus".into()));
    }
    Ok(())
}

/// `⟨f, B_k ⊗ B_l⟩ = Σ c_{pq}·conj(β_p)·conj(γ_q)`.
pub fn product_coeff(f: &FourierCoeffs2D, bk: &FourierCoeffs1D, bl: &FourierCoeffs1D) -> Result<C64> {
    if f.order() != bk.order() || f.order() != bl.order() {
        return Err(Error::Dimension(format!(
            "orders differ: signal {}, factors {} and {}",
            f.order(),
            bk.order(),
            bl.order()
        )));
    }
    let v = f.nonneg();
    let (x, y) = (bk.nonneg(), bl.nonneg());
    let mut acc = C64::new(0.0, 0.0);
    for (p, row) in v.outer_iter().enumerate() {
        let inner = row.iter().zip(y).fold(C64::new(0.0, 0.0), |s, (c, g)| s + c * g.conj());
        acc += inner * x[p].conj();
    }
    Ok(acc)
}

/// Tensor TM frame with all cross coefficients `⟨f, B^a_k ⊗ B^b_l⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductTMFrame {
    pub left: TMBasis,
    pub right: TMBasis,
    /// Entry `[k−1, l−1]`.
    pub coeffs: Array2<C64>,
}

impl ProductTMFrame {
    pub fn new(f: &FourierCoeffs2D, pairs: &PairSequence, order: usize) -> Result<Self> {
        require_hardy(f)?;
        let left = tm_basis(&pairs.left(), order)?;
        let right = tm_basis(&pairs.right(), order)?;
        let n = pairs.len();
        let mut coeffs = Array2::zeros((n, n));
        for k in 0..n {
            for l in 0..n {
                coeffs[[k, l]] = product_coeff(f, &left.bfuncs[k], &right.bfuncs[l])?;
            }
        }
        Ok(ProductTMFrame { left, right, coeffs })
    }

    /// Largest deviation of the tensor Gram matrix from the identity.
    pub fn max_gram_deviation(&self) -> f64 {
        let (ga, gb) = (self.left.gram(), self.right.gram());
        let mut worst: f64 = 0.0;
        for (i, ri) in ga.iter().enumerate() {
            for (j, x) in ri.iter().enumerate() {
                for (k, rk) in gb.iter().enumerate() {
                    for (l, y) in rk.iter().enumerate() {
                        let target = if i == j && k == l { 1.0 } else { 0.0 };
                        worst = worst.max((x * y - C64::new(target, 0.0)).norm());
                    }
                }
            }
        }
        worst
    }

    /// Entries of `D_n` (1-based `n`): `(n, l)` for `l < n`, `(k, n)` for `k < n`, then `(n, n)`.
    pub fn block(&self, n: usize) -> Vec<(usize, usize, C64)> {
        block_indices(n).into_iter().map(|(k, l)| (k, l, self.coeffs[[k - 1, l - 1]])).collect()
    }

    /// `S_n f` truncated at the frame order.
    pub fn partial_sum(&self, n: usize) -> Result<FourierCoeffs2D> {
        let order = self.left.bfuncs.first().map(|b| b.order()).unwrap_or(0);
        let mut out = FourierCoeffs2D::zeros(order, Support::Hardy);
        for k in 0..n {
            for l in 0..n {
                let t = FourierCoeffs2D::tensor(&self.left.bfuncs[k], &self.right.bfuncs[l])?;
                out.array_mut().scaled_add(self.coeffs[[k, l]], t.array());
            }
        }
        Ok(out)
    }
}

/// The `2n−1` index pairs of `D_n`, 1-based.
pub fn block_indices(n: usize) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = (1..n).map(|l| (n, l)).collect();
    out.extend((1..n).map(|k| (k, n)));
    out.push((n, n));
    out
}

/// `‖D_n‖²` for the candidate `(a, b)` after `history`, from freshly built TM bases.
pub fn dn_energy(f: &FourierCoeffs2D, history: &PairSequence, candidate: (C64, C64), order: usize) -> Result<f64> {
    require_hardy(f)?;
    let mut ext = history.clone();
    ext.push(candidate.0, candidate.1)?;
    let left = tm_basis(&ext.left(), order)?;
    let right = tm_basis(&ext.right(), order)?;
    let n = ext.len();
    let mut e = 0.0;
    for (k, l) in block_indices(n) {
        e += product_coeff(f, &left.bfuncs[k - 1], &right.bfuncs[l - 1])?.norm_sqr();
    }
    Ok(e)
}

/// Rows `[i, p] = z_i^p`.
pub(crate) fn powers(points: &[C64], order: usize) -> Array2<C64> {
    let mut w = Array2::zeros((points.len(), order + 1));
    for (i, &z) in points.iter().enumerate() {
        let mut p = C64::new(1.0, 0.0);
        for k in 0..=order {
            w[[i, k]] = p;
            p *= z;
        }
    }
    w
}

fn zs(points: &[DiscPoint]) -> Vec<C64> {
    points.iter().map(|p| p.z()).collect()
}

fn weight(z: C64) -> f64 {
    1.0 - z.norm_sqr()
}

/// Shifts every column (`axis = 0`, the first variable) or every row
/// (`axis = 1`) through the kernel's parameter. Returns the discarded energy.
fn shift_lanes(x: &mut Array2<C64>, kernel: &ShiftKernel, axis: usize) -> Result<f64> {
    let mut leak = 0.0;
    let mut buf = Vec::with_capacity(x.nrows());
    for mut lane in x.lanes_mut(Axis(axis)) {
        buf.clear();
        buf.extend(lane.iter().copied());
        let (_, l) = kernel.apply(&mut buf)?;
        leak += l;
        for (dst, &src) in lane.iter_mut().zip(&buf) {
            *dst = src;
        }
    }
    Ok(leak)
}

/// One step of product-TM AFD.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductTmStep {
    pub a: C64,
    pub b: C64,
    /// `(k, l, ⟨f, B^a_k ⊗ B^b_l⟩)`, 1-based, in [`block_indices`] order.
    pub block: Vec<(usize, usize, C64)>,
    pub block_energy: f64,
    /// `‖f‖² − Σ_{j≤n} ‖D_j‖²`.
    pub residual_energy: f64,
    /// Objective did not depend on `a` (resp. `b`) at the winner.
    pub flat_left: bool,
    pub flat_right: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProductTmRecord {
    pub order: usize,
    pub initial_energy: f64,
    pub steps: Vec<ProductTmStep>,
}

impl ProductTmRecord {
    pub fn pairs(&self) -> PairSequence {
        PairSequence { pairs: self.steps.iter().map(|s| (s.a, s.b)).collect() }
    }

    pub fn final_residual(&self) -> f64 {
        self.steps.last().map(|s| s.residual_energy).unwrap_or(self.initial_energy)
    }

    /// `S_n f` from the stored blocks and freshly built TM bases.
    pub fn reconstruct(&self) -> Result<FourierCoeffs2D> {
        let pairs = self.pairs();
        let left = tm_basis(&pairs.left(), self.order)?;
        let right = tm_basis(&pairs.right(), self.order)?;
        let mut out = FourierCoeffs2D::zeros(self.order, Support::Hardy);
        for s in &self.steps {
            for &(k, l, c) in &s.block {
                let t = FourierCoeffs2D::tensor(&left.bfuncs[k - 1], &right.bfuncs[l - 1])?;
                out.array_mut().scaled_add(c, t.array());
            }
        }
        Ok(out)
    }
}

/// Incremental product-TM state. Holds the remainder reduced by the
/// backward shifts in `z` only, in `w` only, and in both, so that every
/// candidate's `‖D_n‖²` is a handful of power-series evaluations.
#[derive(Clone, Debug)]
pub struct ProductTm {
    order: usize,
    initial_energy: f64,
    residual_energy: f64,
    pairs: PairSequence,
    z_red: Array2<C64>,
    w_red: Array2<C64>,
    full_red: Array2<C64>,
    left: Vec<FourierCoeffs1D>,
    right: Vec<FourierCoeffs1D>,
    left_builder: TmBuilder,
    right_builder: TmBuilder,
}

/// Objective decomposition for a block of candidates.
struct Pieces {
    alpha: Vec<f64>,
    beta: Vec<f64>,
    gamma: Array2<f64>,
}

impl ProductTm {
    pub fn new(f: &FourierCoeffs2D, max_abs: f64) -> Result<Self> {
        require_hardy(f)?;
        let e = f.energy();
        if e == 0.0 {
            return Err(Error::Degenerate("product-TM AFD of a zero signal".into()));
        }
        let order = f.order();
        let data = f.array().clone();
        Ok(ProductTm {
            order,
            initial_energy: e,
            residual_energy: e,
            pairs: PairSequence::default(),
            z_red: data.clone(),
            w_red: data.clone(),
            full_red: data,
            left: Vec::new(),
            right: Vec::new(),
            left_builder: TmBuilder::new(order, max_abs),
            right_builder: TmBuilder::new(order, max_abs),
        })
    }

    /// Replays a history of pairs.
    pub fn with_history(f: &FourierCoeffs2D, history: &PairSequence, max_abs: f64) -> Result<Self> {
        let mut s = Self::new(f, max_abs)?;
        for &(a, b) in history.pairs() {
            s.advance(a, b)?;
        }
        Ok(s)
    }

    pub fn pairs(&self) -> &PairSequence {
        &self.pairs
    }

    pub fn residual_energy(&self) -> f64 {
        self.residual_energy
    }

    pub fn initial_energy(&self) -> f64 {
        self.initial_energy
    }

    /// `u_l = ⟨z_red, B^b_l⟩_w` as columns `[p, l]`.
    fn u_matrix(&self) -> Array2<C64> {
        let n = self.right.len();
        let mut bb = Array2::zeros((self.order + 1, n));
        for (l, b) in self.right.iter().enumerate() {
            for (q, c) in b.nonneg().iter().enumerate() {
                bb[[q, l]] = c.conj();
            }
        }
        self.z_red.dot(&bb)
    }

    /// `v_k = ⟨w_red, B^a_k⟩_z` as columns `[q, k]`.
    fn v_matrix(&self) -> Array2<C64> {
        let n = self.left.len();
        let mut ba = Array2::zeros((self.order + 1, n));
        for (k, b) in self.left.iter().enumerate() {
            for (p, c) in b.nonneg().iter().enumerate() {
                ba[[p, k]] = c.conj();
            }
        }
        self.w_red.t().dot(&ba)
    }

    fn pieces(&self, left: &[C64], right: &[C64]) -> Pieces {
        let wa = powers(left, self.order);
        let wb = powers(right, self.order);
        let side = |w: &Array2<C64>, m: Array2<C64>, pts: &[C64]| -> Vec<f64> {
            if m.ncols() == 0 {
                return vec![0.0; pts.len()];
            }
            let vals = w.dot(&m);
            vals.outer_iter()
                .zip(pts)
                .map(|(row, &z)| weight(z) * row.iter().map(|v| v.norm_sqr()).sum::<f64>())
                .collect()
        };
        let alpha = side(&wa, self.u_matrix(), left);
        let beta = side(&wb, self.v_matrix(), right);
        let t = self.full_red.dot(&wb.t());
        let g = wa.dot(&t);
        let wl: Array1<f64> = left.iter().map(|&z| weight(z)).collect();
        let wr: Array1<f64> = right.iter().map(|&z| weight(z)).collect();
        let gamma = Array2::from_shape_fn(g.dim(), |(i, j)| wl[i] * wr[j] * g[[i, j]].norm_sqr());
        Pieces { alpha, beta, gamma }
    }

    /// `‖D_n‖²` for every pair in the block, left-major.
    pub fn objective_block(&self, block: &PairBlock) -> Vec<f64> {
        let p = self.pieces(&zs(&block.left), &zs(&block.right));
        let mut out = Vec::with_capacity(block.left.len() * block.right.len());
        for i in 0..block.left.len() {
            for j in 0..block.right.len() {
                out.push(p.alpha[i] + p.beta[j] + p.gamma[[i, j]]);
            }
        }
        out
    }

    /// `‖D_n‖²` at one candidate.
    pub fn objective(&self, a: C64, b: C64) -> f64 {
        let p = self.pieces(&[a], &[b]);
        p.alpha[0] + p.beta[0] + p.gamma[[0, 0]]
    }

    /// Grid maximizer of `‖D_n‖²` with flatness diagnostics.
    pub fn select(&self, grid: &PairGrid) -> Result<((C64, C64), f64, bool, bool)> {
        grid.validate()?;
        if self.residual_energy <= 0.0 {
            return Err(Error::Degenerate("product-TM selection on a zero remainder".into()));
        }
        let best = search_argmax(grid, |b: &PairBlock| Ok(self.objective_block(b)))?;
        let (pa, pb) = best.point;
        let flat = |vals: Vec<f64>| {
            let (lo, hi) = vals.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
            hi > 0.0 && hi - lo <= FLAT_TOL * hi
        };
        let flat_left = flat(self.objective_block(&PairBlock { left: grid.left.coarse_points(), right: vec![pb] }));
        let flat_right = flat(self.objective_block(&PairBlock { left: vec![pa], right: grid.right.coarse_points() }));
        Ok(((pa.z(), pb.z()), best.value, flat_left, flat_right))
    }

    /// Commits `(a, b)`: records `D_n` and reduces the remainders.
    pub fn advance(&mut self, a: C64, b: C64) -> Result<ProductTmStep> {
        self.advance_flagged(a, b, false, false)
    }

    fn advance_flagged(&mut self, a: C64, b: C64, flat_left: bool, flat_right: bool) -> Result<ProductTmStep> {
        let n = self.pairs.len() + 1;
        let sa = (1.0 - a.norm_sqr()).sqrt();
        let sb = (1.0 - b.norm_sqr()).sqrt();
        let u = self.u_matrix();
        let v = self.v_matrix();
        let wa = powers(&[a], self.order);
        let wb = powers(&[b], self.order);
        let mut block = Vec::with_capacity(2 * n - 1);
        if n > 1 {
            let ua = wa.dot(&u);
            for l in 1..n {
                block.push((n, l, ua[[0, l - 1]] * sa));
            }
            let vb = wb.dot(&v);
            for k in 1..n {
                block.push((k, n, vb[[0, k - 1]] * sb));
            }
        }
        let fr = wa.dot(&self.full_red.dot(&wb.t()))[[0, 0]];
        block.push((n, n, fr * sa * sb));
        let block_energy: f64 = block.iter().map(|e| e.2.norm_sqr()).sum();

        let ka = ShiftKernel::new(a, self.order)?;
        let kb = ShiftKernel::new(b, self.order)?;
        let ez = self.z_red.iter().map(|c| c.norm_sqr()).sum::<f64>();
        check_leak(shift_lanes(&mut self.z_red, &ka, 0)?, ez)?;
        let ew = self.w_red.iter().map(|c| c.norm_sqr()).sum::<f64>();
        check_leak(shift_lanes(&mut self.w_red, &kb, 1)?, ew)?;
        let ef = self.full_red.iter().map(|c| c.norm_sqr()).sum::<f64>();
        let leak = shift_lanes(&mut self.full_red, &ka, 0)? + shift_lanes(&mut self.full_red, &kb, 1)?;
        check_leak(leak, ef)?;

        self.left.push(self.left_builder.push(a)?.0);
        self.right.push(self.right_builder.push(b)?.0);
        self.pairs.push(a, b)?;
        self.residual_energy -= block_energy;
        Ok(ProductTmStep {
            a,
            b,
            block,
            block_energy,
            residual_energy: self.residual_energy,
            flat_left,
            flat_right,
        })
    }

    /// Selects on the grid and commits.
    pub fn step(&mut self, grid: &PairGrid) -> Result<ProductTmStep> {
        let ((a, b), _, fl, fr) = self.select(grid)?;
        self.advance_flagged(a, b, fl, fr)
    }
}

/// Grid maximizer of `‖D_n‖²` after `history`.
pub fn msp_product_tm(f: &FourierCoeffs2D, history: &PairSequence, grid: &GridSpec) -> Result<(C64, C64)> {
    let max_abs = history
        .pairs()
        .iter()
        .flat_map(|&(a, b)| [a.norm(), b.norm()])
        .fold(grid.max_radius, f64::max);
    let state = ProductTm::with_history(f, history, max_abs)?;
    let (p, _, _, _) = state.select(&PairGrid::square(*grid))?;
    Ok(p)
}

pub fn afd2d_tm_decompose(f: &FourierCoeffs2D, n_terms: usize, grid: &GridSpec) -> Result<ProductTmRecord> {
    afd2d_tm_decompose_with(f, &PairGrid::square(*grid), StopRule::terms(n_terms))
}

pub fn afd2d_tm_decompose_with(f: &FourierCoeffs2D, grid: &PairGrid, stop: StopRule) -> Result<ProductTmRecord> {
    if stop.n_terms == 0 {
        return Err(Error::Config("n_terms must be at least 1".into()));
    }
    let mut state = ProductTm::new(f, grid.left.max_radius.max(grid.right.max_radius))?;
    let mut steps = Vec::new();
    while steps.len() < stop.n_terms && state.residual_energy > stop.threshold * state.initial_energy {
        steps.push(state.step(grid)?);
    }
    Ok(ProductTmRecord { order: f.order(), initial_energy: state.initial_energy, steps })
}

/// `‖f − S_n f‖²` computed directly: the truncated part from the
/// coefficient arrays plus the energy of `S_n f` beyond the truncation.
pub fn product_tm_residual_direct(f: &FourierCoeffs2D, record: &ProductTmRecord) -> Result<f64> {
    let s = record.reconstruct()?;
    let mut d = f.to_hardy();
    d.array_mut().scaled_add(C64::new(-1.0, 0.0), s.array());
    let captured: f64 = record.steps.iter().map(|s| s.block_energy).sum();
    Ok(d.energy() + (captured - s.energy()))
}

/// Renormalized truncated tensor kernel `ê_a ⊗ ê_b`, the atom used by PGA.
pub fn pga_atom(a: C64, b: C64, order: usize) -> Result<FourierCoeffs2D> {
    let ea = unit_szego(a, order)?;
    let eb = unit_szego(b, order)?;
    FourierCoeffs2D::tensor(&ea, &eb)
}

/// `P_N e_a / ‖P_N e_a‖`.
pub fn unit_szego(a: C64, order: usize) -> Result<FourierCoeffs1D> {
    let mut e = crate::szego::szego_coeffs(a, order)?;
    e.scale(C64::new(1.0 / truncated_szego_norm(a, order), 0.0));
    Ok(e)
}

/// `⟨g, ê_a ⊗ ê_b⟩` for every pair of the block, left-major.
pub(crate) fn tensor_kernel_block(g: &Array2<C64>, order: usize, left: &[C64], right: &[C64]) -> Array2<C64> {
    let wa = powers(left, order);
    let wb = powers(right, order);
    let vals = wa.dot(&g.dot(&wb.t()));
    let sl: Vec<f64> = left.iter().map(|&a| weight(a).sqrt() / truncated_szego_norm(a, order)).collect();
    let sr: Vec<f64> = right.iter().map(|&b| weight(b).sqrt() / truncated_szego_norm(b, order)).collect();
    Array2::from_shape_fn(vals.dim(), |(i, j)| vals[[i, j]] * (sl[i] * sr[j]))
}

/// One PGA atom with its coefficient `⟨g̃_k, ê_a ⊗ ê_b⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PgaAtom {
    pub spec: TensorAtomSpec,
    pub coefficient: C64,
    pub residual_energy: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PGARecord {
    pub order: usize,
    pub initial_energy: f64,
    pub atoms: Vec<PgaAtom>,
}

impl PGARecord {
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

    pub fn reconstruct(&self) -> Result<FourierCoeffs2D> {
        let mut out = FourierCoeffs2D::zeros(self.order, Support::Hardy);
        for at in &self.atoms {
            let t = pga_atom(at.spec.left.a, at.spec.right.a, self.order)?;
            out.array_mut().scaled_add(at.coefficient, t.array());
        }
        Ok(out)
    }
}

/// Grid maximizer of `|⟨g̃, ê_a ⊗ ê_b⟩|` and the coefficient there.
pub fn pga_step(g: &FourierCoeffs2D, grid: &GridSpec) -> Result<(TensorAtomSpec, C64)> {
    pga_step_pair(g, &PairGrid::square(*grid))
}

pub fn pga_step_pair(g: &FourierCoeffs2D, grid: &PairGrid) -> Result<(TensorAtomSpec, C64)> {
    require_hardy(g)?;
    grid.validate()?;
    if g.energy() == 0.0 {
        return Err(Error::Degenerate("greedy selection on a zero remainder".into()));
    }
    let order = g.order();
    let best = search_argmax(grid, |b: &PairBlock| {
        let v = tensor_kernel_block(g.array(), order, &zs(&b.left), &zs(&b.right));
        Ok(v.iter().map(|c| c.norm()).collect())
    })?;
    let (a, b) = (best.point.0.z(), best.point.1.z());
    let atom = pga_atom(a, b, order)?;
    let c = crate::hardy::inner_product_2d(g, &atom)?;
    Ok((TensorAtomSpec::new(AtomSpec::simple(a)?, AtomSpec::simple(b)?), c))
}

pub fn pga_decompose(f: &FourierCoeffs2D, n_terms: usize, grid: &GridSpec) -> Result<PGARecord> {
    pga_decompose_with(f, &PairGrid::square(*grid), StopRule::terms(n_terms))
}

pub fn pga_decompose_with(f: &FourierCoeffs2D, grid: &PairGrid, stop: StopRule) -> Result<PGARecord> {
    require_hardy(f)?;
    if stop.n_terms == 0 {
        return Err(Error::Config("n_terms must be at least 1".into()));
    }
    let e0 = f.energy();
    if e0 == 0.0 {
        return Err(Error::Degenerate("greedy decomposition of a zero signal".into()));
    }
    let mut g = f.clone();
    let mut atoms = Vec::new();
    while atoms.len() < stop.n_terms && g.energy() > stop.threshold * e0 {
        let (spec, c) = pga_step_pair(&g, grid)?;
        let atom = pga_atom(spec.left.a, spec.right.a, f.order())?;
        g.array_mut().scaled_add(-c, atom.array());
        atoms.push(PgaAtom { spec, coefficient: c, residual_energy: g.energy() });
    }
    Ok(PGARecord { order: f.order(), initial_energy: e0, atoms })
}
