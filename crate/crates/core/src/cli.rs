//! The `afd` command-line tool.
//!
//! Exit status: 0 on success, 1 when a stored or recomputed quantity breaks
//! an invariant, 2 on usage, ingestion or parse errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ndarray::Array2;

use crate::afd2d::{
    afd2d_tm_decompose_with, pga_atom, pga_decompose_with, PGARecord, PgaAtom, ProductTMFrame, ProductTmRecord,
    ProductTmStep,
};
use crate::error::{Error, Result};
use crate::grid::{GridSpec, PairGrid};
use crate::hardy::{inner_product_2d, FourierCoeffs1D, FourierCoeffs2D, C64};
use crate::io::{self, RecordFile};
use crate::poga::{
    poga_decompose, reconstruct_from_labels, replay_coefficients, PogaOptions, ProductSzegoDictionary,
    SzegoDictionary, WeakParam,
};
use crate::szego::{AtomSpec, TensorAtomSpec};
use crate::synth::{synth_1d, synth_2d, SynthSpec};
use crate::tm::{afd_decompose_1d_with, reconstruct_1d, AFDRecord, AfdAtom, CoreAfd, StopRule, DEFAULT_THRESHOLD};

/// Relative tolerance for ledger and replay checks.
pub const VERIFY_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    Afd1d,
    #[value(name = "afd2d-tm")]
    Afd2dTm,
    Pga2d,
    Poga1d,
    Poga2d,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Afd1d => "afd1d",
            Algorithm::Afd2dTm => "afd2d-tm",
            Algorithm::Pga2d => "pga2d",
            Algorithm::Poga1d => "poga1d",
            Algorithm::Poga2d => "poga2d",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        <Self as ValueEnum>::from_str(s, false).map_err(|_| Error::Config(format!("unknown algorithm {s:?}")))
    }

    pub fn is_2d(self) -> bool {
        matches!(self, Algorithm::Afd2dTm | Algorithm::Pga2d | Algorithm::Poga2d)
    }

    pub fn default_order(self) -> usize {
        if self.is_2d() {
            64
        } else {
            256
        }
    }

    pub fn default_grid(self) -> GridSpec {
        if self.is_2d() {
            GridSpec::default_2d()
        } else {
            GridSpec::default_1d()
        }
    }
}

/// Everything a run depends on; echoed into the record as `meta` lines.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub n_terms: usize,
    pub order: usize,
    pub grid: GridSpec,
    pub rho: f64,
    pub threshold: f64,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub seed: u64,
}

impl RunConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        RunConfig {
            algorithm,
            n_terms: 10,
            order: algorithm.default_order(),
            grid: algorithm.default_grid(),
            rho: 1.0,
            threshold: DEFAULT_THRESHOLD,
            input: None,
            output: None,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        WeakParam::new(self.rho)?;
        if self.order < 8 {
            return Err(Error::Config(format!("order {} below the minimum 8", self.order)));
        }
        if self.n_terms == 0 {
            return Err(Error::Config("terms must be at least 1".into()));
        }
        if !(self.threshold >= 0.0) {
            return Err(Error::Config(format!("threshold {} must be non-negative", self.threshold)));
        }
        if self.rho != 1.0 && !matches!(self.algorithm, Algorithm::Poga1d | Algorithm::Poga2d) {
            return Err(Error::Config("rho applies only to poga1d and poga2d".into()));
        }
        self.grid.validate()
    }

    pub fn stop(&self) -> StopRule {
        StopRule { n_terms: self.n_terms, threshold: self.threshold }
    }

    pub fn meta(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("algorithm".to_string(), self.algorithm.name().to_string()),
            ("version".into(), env!("CARGO_PKG_VERSION").into()),
            ("terms".into(), self.n_terms.to_string()),
            ("order".into(), self.order.to_string()),
            ("grid-radial".into(), self.grid.radial_count.to_string()),
            ("grid-angular".into(), self.grid.angular_count.to_string()),
            ("refine".into(), self.grid.refine_levels.to_string()),
            ("max-radius".into(), format!("{:e}", self.grid.max_radius)),
            ("rho".into(), format!("{:e}", self.rho)),
            ("threshold".into(), format!("{:e}", self.threshold)),
            ("seed".into(), self.seed.to_string()),
        ];
        if let Some(p) = &self.input {
            out.push(("input".into(), p.display().to_string()));
        }
        out
    }

    pub fn from_record(rec: &RecordFile) -> Result<Self> {
        fn get<T: std::str::FromStr>(rec: &RecordFile, key: &str) -> Result<T> {
            let v = rec.meta(key).ok_or_else(|| Error::Config(format!("record lacks meta {key}")))?;
            v.parse().map_err(|_| Error::Config(format!("bad meta {key} {v:?}")))
        }
        let algorithm = Algorithm::parse(rec.meta("algorithm").unwrap_or(""))?;
        let cfg = RunConfig {
            algorithm,
            n_terms: get(rec, "terms")?,
            order: get(rec, "order")?,
            grid: GridSpec {
                radial_count: get(rec, "grid-radial")?,
                angular_count: get(rec, "grid-angular")?,
                refine_levels: get(rec, "refine")?,
                max_radius: get(rec, "max-radius")?,
            },
            rho: get(rec, "rho")?,
            threshold: get(rec, "threshold")?,
            input: rec.meta("input").map(PathBuf::from),
            output: None,
            seed: get(rec, "seed")?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn weak(&self) -> Result<WeakParam> {
        WeakParam::new(self.rho)
    }

    fn dict_1d(&self) -> SzegoDictionary {
        SzegoDictionary { order: self.order, grid: self.grid }
    }

    fn dict_2d(&self) -> ProductSzegoDictionary {
        ProductSzegoDictionary { order: self.order, grid: PairGrid::square(self.grid) }
    }
}

#[derive(Parser, Debug)]
#[command(name = "afd", version, about = "Adaptive Fourier decomposition on the disc and the torus")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decompose a CSV signal (1-D) or a PGM image (2-D) and write a record.
    Decompose(RunArgs),
    /// Rebuild the approximation from a record and write its coefficients.
    Reconstruct {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Re-check ledgers, replayed coefficients and rate bounds of a record.
    Verify {
        #[arg(long)]
        input: PathBuf,
    },
    /// Write a seeded test signal.
    Synth(SynthArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long, value_enum)]
    algorithm: Algorithm,
    #[arg(long, default_value_t = 10)]
    terms: usize,
    /// Truncation order; 256 in 1-D and 64 in 2-D by default.
    #[arg(long)]
    order: Option<usize>,
    #[arg(long)]
    grid_radial: Option<usize>,
    #[arg(long)]
    grid_angular: Option<usize>,
    #[arg(long)]
    refine: Option<u32>,
    #[arg(long)]
    max_radius: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, default_value_t = 10)]
    atoms: usize,
    #[arg(long, default_value_t = 2.0)]
    mass: f64,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::new(self.algorithm);
        cfg.n_terms = self.terms;
        cfg.order = self.order.unwrap_or(cfg.order);
        cfg.grid.radial_count = self.grid_radial.unwrap_or(cfg.grid.radial_count);
        cfg.grid.angular_count = self.grid_angular.unwrap_or(cfg.grid.angular_count);
        cfg.grid.refine_levels = self.refine.unwrap_or(cfg.grid.refine_levels);
        cfg.grid.max_radius = self.max_radius.unwrap_or(cfg.grid.max_radius);
        cfg.rho = self.rho;
        cfg.threshold = self.threshold;
        cfg.input = self.input.clone();
        cfg.output = self.output.clone();
        cfg.seed = self.seed;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Runs the tool on `argv` (program name first) and returns the exit status.
pub fn run<I: IntoIterator<Item = OsString>>(argv: I) -> i32 {
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let out = match cli.cmd {
        Command::Decompose(args) => args.config().and_then(|cfg| decompose(&cfg)),
        Command::Reconstruct { input, output } => reconstruct(&input, output.as_deref()),
        Command::Verify { input } => verify(&input),
        Command::Synth(args) => synth(&args),
    };
    match out {
        Ok(report) => {
            print!("{}", report.text);
            for v in &report.violations {
                eprintln!("violation: {v}");
            }
            if report.violations.is_empty() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("afd: {e}");
            exit_code(&e)
        }
    }
}

/// Exit status for an error that stopped a command.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SpanDegenerate { .. } | Error::Truncation(_) | Error::Invariant(_) => 1,
        _ => 2,
    }
}

/// Standard output of a command and any invariant violations it found.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub text: String,
    pub violations: Vec<String>,
}

fn required<'a>(p: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    p.as_deref().ok_or_else(|| Error::Config(format!("--{flag} is required")))
}

/// The Hardy signal a configuration runs on, as a flat vector for P-OGA
/// together with its structured form.
pub enum Signal {
    OneD(FourierCoeffs1D),
    TwoD(FourierCoeffs2D),
}

impl Signal {
    pub fn flat(&self) -> Vec<C64> {
        match self {
            Signal::OneD(f) => f.coeffs().to_vec(),
            Signal::TwoD(f) => f.nonneg().iter().copied().collect(),
        }
    }

    pub fn energy(&self) -> f64 {
        match self {
            Signal::OneD(f) => f.energy(),
            Signal::TwoD(f) => f.energy(),
        }
    }
}

pub fn load_signal(cfg: &RunConfig, path: &Path) -> Result<Signal> {
    if cfg.algorithm.is_2d() {
        let (_, parts) = io::load_image_2d(path, cfg.order)?;
        Ok(Signal::TwoD(parts.hardy_pp()))
    } else {
        Ok(Signal::OneD(io::load_signal_1d(path, cfg.order)?))
    }
}

fn as_1d(s: &Signal) -> Result<&FourierCoeffs1D> {
    match s {
        Signal::OneD(f) => Ok(f),
        Signal::TwoD(_) => Err(Error::Dimension("one-variable algorithm on an image".into())),
    }
}

fn as_2d(s: &Signal) -> Result<&FourierCoeffs2D> {
    match s {
        Signal::TwoD(f) => Ok(f),
        Signal::OneD(_) => Err(Error::Dimension("two-variable algorithm on a 1-D signal".into())),
    }
}

/// Runs the configured algorithm on `signal`.
pub fn run_decomposition(cfg: &RunConfig, signal: &Signal) -> Result<RecordFile> {
    let mut rec = match cfg.algorithm {
        Algorithm::Afd1d => RecordFile::from_afd(&afd_decompose_1d_with(as_1d(signal)?, &cfg.grid, cfg.stop())?),
        Algorithm::Afd2dTm => RecordFile::from_product_tm(&afd2d_tm_decompose_with(
            as_2d(signal)?,
            &PairGrid::square(cfg.grid),
            cfg.stop(),
        )?),
        Algorithm::Pga2d => {
            RecordFile::from_pga(&pga_decompose_with(as_2d(signal)?, &PairGrid::square(cfg.grid), cfg.stop())?)
        }
        Algorithm::Poga1d => {
            let opts = PogaOptions { stop: cfg.stop(), weak: cfg.weak()?, support: None };
            RecordFile::from_poga(&poga_decompose(&as_1d(signal)?.coeffs().to_vec(), &cfg.dict_1d(), &opts)?)
        }
        Algorithm::Poga2d => {
            as_2d(signal)?;
            let opts = PogaOptions { stop: cfg.stop(), weak: cfg.weak()?, support: None };
            RecordFile::from_poga(&poga_decompose(&signal.flat(), &cfg.dict_2d(), &opts)?)
        }
    };
    rec.meta = cfg.meta();
    Ok(rec)
}

fn residual_table(rec: &RecordFile) -> String {
    let mut out = String::from("step,residual_energy,relative\n");
    let _ = writeln!(out, "0,{:.6e},{:.6e}", rec.initial_energy, 1.0);
    for (i, s) in rec.steps.iter().enumerate() {
        let _ = writeln!(out, "{},{:.6e},{:.6e}", i + 1, s.residual_energy, s.residual_energy / rec.initial_energy);
    }
    out
}

fn ledger_violations(rec: &RecordFile) -> Vec<String> {
    let tol = VERIFY_TOL * rec.initial_energy;
    let mut out: Vec<String> = rec
        .ledger_discrepancies()
        .iter()
        .enumerate()
        .filter(|(_, &d)| !(d <= tol))
        .map(|(i, d)| format!("energy ledger off by {d:e} at step {}", i + 1))
        .collect();
    let mut prev = rec.initial_energy;
    for (i, s) in rec.steps.iter().enumerate() {
        if s.residual_energy > prev + tol {
            out.push(format!("residual energy increases at step {}", i + 1));
        }
        prev = s.residual_energy;
    }
    out
}

fn decompose(cfg: &RunConfig) -> Result<Report> {
    let input = required(&cfg.input, "input")?;
    let mut cfg = cfg.clone();
    io::read_file(input)?;
    cfg.input = Some(fs::canonicalize(input)?);
    let signal = load_signal(&cfg, input)?;
    let mut rec = run_decomposition(&cfg, &signal)?;
    if !cfg.algorithm.is_2d() {
        let text = io::read_text(input)?;
        if let Some((_, m)) = io::csv_header(&text).into_iter().find(|(k, _)| k == "mass") {
            rec.set_meta("mass", m);
        }
    }
    if let Some(out) = &cfg.output {
        io::save_record(&rec, out)?;
    }
    Ok(Report { text: residual_table(&rec), violations: ledger_violations(&rec) })
}

fn afd_record(rec: &RecordFile, order: usize) -> AFDRecord {
    AFDRecord {
        order,
        initial_energy: rec.initial_energy,
        atoms: rec
            .steps
            .iter()
            .map(|s| AfdAtom {
                param: s.a,
                multiplicity: s.m,
                coefficient: s.coefficient.unwrap_or_default(),
                residual_energy: s.residual_energy,
            })
            .collect(),
    }
}

fn second(s: &io::StepEntry) -> Result<(C64, u32)> {
    s.b.ok_or_else(|| Error::Config("two-variable step without a second parameter".into()))
}

fn pga_record(rec: &RecordFile, order: usize) -> Result<PGARecord> {
    let mut atoms = Vec::with_capacity(rec.steps.len());
    for s in &rec.steps {
        let (b, l) = second(s)?;
        atoms.push(PgaAtom {
            spec: TensorAtomSpec::new(AtomSpec::new(s.a, s.m)?, AtomSpec::new(b, l)?),
            coefficient: s.coefficient.unwrap_or_default(),
            residual_energy: s.residual_energy,
        });
    }
    Ok(PGARecord { order, initial_energy: rec.initial_energy, atoms })
}

fn product_tm_record(rec: &RecordFile, order: usize) -> Result<ProductTmRecord> {
    let mut steps = Vec::with_capacity(rec.steps.len());
    for (i, s) in rec.steps.iter().enumerate() {
        let block: Vec<(usize, usize, C64)> =
            rec.blocks.iter().filter(|b| b.step == i + 1).map(|b| (b.k, b.l, b.value)).collect();
        if block.iter().any(|&(k, l, _)| k == 0 || l == 0 || k > i + 1 || l > i + 1) {
            return Err(Error::Config(format!("block index out of range at step {}", i + 1)));
        }
        steps.push(ProductTmStep {
            a: s.a,
            b: second(s)?.0,
            block_energy: block.iter().map(|b| b.2.norm_sqr()).sum(),
            block,
            residual_energy: s.residual_energy,
            flat_left: false,
            flat_right: false,
        });
    }
    Ok(ProductTmRecord { order, initial_energy: rec.initial_energy, steps })
}

/// The approximation a record describes, rebuilt from its atoms and coefficients.
pub fn approximation(cfg: &RunConfig, rec: &RecordFile) -> Result<Signal> {
    let coeffs: Vec<C64> = rec.steps.iter().map(|s| s.coefficient.unwrap_or_default()).collect();
    Ok(match cfg.algorithm {
        Algorithm::Afd1d => Signal::OneD(reconstruct_1d(&afd_record(rec, cfg.order), cfg.order)?),
        Algorithm::Poga1d => {
            Signal::OneD(FourierCoeffs1D::hardy(reconstruct_from_labels(&cfg.dict_1d(), &rec.labels(), &coeffs)?)?)
        }
        Algorithm::Pga2d => Signal::TwoD(pga_record(rec, cfg.order)?.reconstruct()?),
        Algorithm::Afd2dTm => Signal::TwoD(product_tm_record(rec, cfg.order)?.reconstruct()?),
        Algorithm::Poga2d => {
            let v = reconstruct_from_labels(&cfg.dict_2d(), &rec.labels(), &coeffs)?;
            let n = cfg.order + 1;
            Signal::TwoD(FourierCoeffs2D::hardy(Array2::from_shape_vec((n, n), v).expect("dictionary dimension"))?)
        }
    })
}

fn difference_energy(x: &Signal, y: &Signal) -> Result<f64> {
    let (a, b) = (x.flat(), y.flat());
    if a.len() != b.len() {
        return Err(Error::Dimension("signal and record orders differ".into()));
    }
    Ok(a.iter().zip(&b).map(|(p, q)| (p - q).norm_sqr()).sum())
}

fn reconstruct(input: &Path, output: Option<&Path>) -> Result<Report> {
    let rec = io::load_record(input)?;
    let cfg = RunConfig::from_record(&rec)?;
    let approx = approximation(&cfg, &rec)?;
    let mut table = String::from("# reconstructed Hardy coefficients\n");
    match &approx {
        Signal::OneD(f) => {
            table.push_str("k,re,im\n");
            for (k, c) in f.coeffs().iter().enumerate() {
                let _ = writeln!(table, "{k},{:.16e},{:.16e}", c.re, c.im);
            }
        }
        Signal::TwoD(f) => {
            table.push_str("k,l,re,im\n");
            for ((k, l), c) in f.nonneg().indexed_iter() {
                let _ = writeln!(table, "{k},{l},{:.16e},{:.16e}", c.re, c.im);
            }
        }
    }
    let mut report = Report::default();
    if let Some(path) = cfg.input.as_deref().filter(|p| p.exists()) {
        let f = load_signal(&cfg, path)?;
        let gap = difference_energy(&f, &approx)?;
        let stored = rec.steps.last().map(|s| s.residual_energy).unwrap_or(rec.initial_energy);
        let _ = writeln!(report.text, "residual energy {gap:.6e} (stored {stored:.6e})");
        if !((gap - stored).abs() <= VERIFY_TOL * rec.initial_energy) {
            report.violations.push(format!("reconstruction residual {gap:e} differs from stored {stored:e}"));
        }
    }
    match output {
        Some(p) => fs::write(p, table)?,
        None => report.text.insert_str(0, &table),
    }
    Ok(report)
}

/// Coefficients and residual energies recomputed from the stored atoms.
pub fn replay(cfg: &RunConfig, rec: &RecordFile, signal: &Signal) -> Result<(Vec<Vec<C64>>, Vec<f64>)> {
    let e0 = signal.energy();
    let mut coeffs = Vec::with_capacity(rec.steps.len());
    let mut residuals = Vec::with_capacity(rec.steps.len());
    match cfg.algorithm {
        Algorithm::Afd1d => {
            let mut run = CoreAfd::new(as_1d(signal)?)?;
            for s in &rec.steps {
                let at = run.step_at(s.a)?;
                coeffs.push(vec![at.coefficient]);
                residuals.push(at.residual_energy);
            }
        }
        Algorithm::Poga1d | Algorithm::Poga2d => {
            let f = signal.flat();
            let c = if cfg.algorithm == Algorithm::Poga1d {
                replay_coefficients(&f, &cfg.dict_1d(), &rec.labels())?
            } else {
                replay_coefficients(&f, &cfg.dict_2d(), &rec.labels())?
            };
            let mut e = e0;
            for x in c {
                e -= x.norm_sqr();
                coeffs.push(vec![x]);
                residuals.push(e);
            }
        }
        Algorithm::Pga2d => {
            let mut g = as_2d(signal)?.clone();
            for s in &rec.steps {
                let (b, _) = second(s)?;
                let atom = pga_atom(s.a, b, cfg.order)?;
                let c = inner_product_2d(&g, &atom)?;
                g.array_mut().scaled_add(-c, atom.array());
                coeffs.push(vec![c]);
                residuals.push(g.energy());
            }
        }
        Algorithm::Afd2dTm => {
            let pr = product_tm_record(rec, cfg.order)?;
            let frame = ProductTMFrame::new(as_2d(signal)?, &pr.pairs(), cfg.order)?;
            let mut e = e0;
            for n in 1..=rec.steps.len() {
                let block: Vec<C64> = frame.block(n).into_iter().map(|x| x.2).collect();
                e -= block.iter().map(|c| c.norm_sqr()).sum::<f64>();
                coeffs.push(block);
                residuals.push(e);
            }
        }
    }
    Ok((coeffs, residuals))
}

fn stored_coefficients(rec: &RecordFile) -> Vec<Vec<C64>> {
    rec.steps
        .iter()
        .enumerate()
        .map(|(i, s)| match s.coefficient {
            Some(c) => vec![c],
            None => rec.blocks.iter().filter(|b| b.step == i + 1).map(|b| b.value).collect(),
        })
        .collect()
}

fn rate_violations(cfg: &RunConfig, rec: &RecordFile, mass: f64) -> Vec<String> {
    let mut out = Vec::new();
    let energies: Vec<f64> =
        std::iter::once(rec.initial_energy).chain(rec.steps.iter().map(|s| s.residual_energy)).collect();
    for (i, &d) in energies.iter().enumerate() {
        let m = i + 1;
        let big_r = rec.steps.get(i.min(rec.steps.len().saturating_sub(1))).and_then(|s| s.big_r).unwrap_or(1.0);
        let bound = big_r * mass / (cfg.rho * (m as f64).sqrt());
        let norm = d.max(0.0).sqrt();
        if norm > bound * (1.0 + VERIFY_TOL) {
            out.push(format!("rate bound broken at m = {m}: {norm:e} > {bound:e}"));
        }
    }
    out
}

fn verify(input: &Path) -> Result<Report> {
    let rec = io::load_record(input)?;
    let cfg = RunConfig::from_record(&rec)?;
    let mut report = Report { violations: ledger_violations(&rec), ..Default::default() };
    let _ = writeln!(report.text, "record: {} steps, algorithm {}", rec.steps.len(), cfg.algorithm.name());
    let tol = VERIFY_TOL * rec.initial_energy;
    match cfg.input.as_deref().filter(|p| p.exists()) {
        Some(path) => {
            let signal = load_signal(&cfg, path)?;
            if !((signal.energy() - rec.initial_energy).abs() <= tol) {
                report.violations.push(format!(
                    "initial energy {:e} differs from the signal's {:e}",
                    rec.initial_energy,
                    signal.energy()
                ));
            }
            let (coeffs, residuals) = replay(&cfg, &rec, &signal)?;
            let stored_all = stored_coefficients(&rec);
            for (i, ((c, r), s)) in coeffs.iter().zip(&residuals).zip(&rec.steps).enumerate() {
                if !((r - s.residual_energy).abs() <= tol) {
                    report.violations.push(format!(
                        "step {}: replayed residual {r:e}, stored {:e}",
                        i + 1,
                        s.residual_energy
                    ));
                }
                let stored = &stored_all[i];
                let gap: f64 = if stored.len() == c.len() {
                    c.iter().zip(stored).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>()
                } else {
                    f64::INFINITY
                };
                if !(gap <= tol) {
                    report.violations.push(format!("step {}: stored coefficients differ from replay", i + 1));
                }
            }
            let _ = writeln!(report.text, "replayed {} steps against {}", residuals.len(), path.display());
        }
        None => {
            let _ = writeln!(report.text, "input signal unavailable; checked the ledger only");
        }
    }
    if let Some(m) = rec.meta("mass") {
        let mass: f64 = m.parse().map_err(|_| Error::Config(format!("bad meta mass {m:?}")))?;
        if !cfg.algorithm.is_2d() {
            report.violations.extend(rate_violations(&cfg, &rec, mass));
            let _ = writeln!(report.text, "rate bound checked with M = {mass}");
        }
    }
    let _ = writeln!(report.text, "{}", if report.violations.is_empty() { "ok" } else { "FAILED" });
    Ok(report)
}

fn synth(args: &SynthArgs) -> Result<Report> {
    let cfg = args.run.config()?;
    let out = required(&cfg.output, "output")?;
    let spec = SynthSpec { order: cfg.order, atoms: args.atoms, mass: args.mass, seed: cfg.seed };
    let mut text = String::new();
    if cfg.algorithm.is_2d() {
        let s = synth_2d(&spec, &cfg.grid)?;
        io::write_pgm(out, &s.pixels)?;
        let _ = writeln!(text, "wrote {}×{} image with {} tensor atoms", s.pixels.ncols(), s.pixels.nrows(), s.support.len());
    } else {
        let s = synth_1d(&spec, &cfg.grid)?;
        let header = vec![
            ("synth".to_string(), "1".to_string()),
            ("seed".into(), cfg.seed.to_string()),
            ("atoms".into(), args.atoms.to_string()),
            ("mass".into(), format!("{:e}", args.mass)),
            ("order".into(), cfg.order.to_string()),
        ];
        io::write_signal_csv(out, &header, &s.samples)?;
        let _ = writeln!(text, "wrote {} samples with {} atoms", s.samples.len(), s.support.len());
    }
    Ok(Report { text, violations: Vec::new() })
}
