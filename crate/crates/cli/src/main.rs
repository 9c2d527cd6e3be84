//! `oplip`: seeded sweeps and self-checks for the operator-Lipschitz library.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use oplip::experiments::{
    commutator_ratio, contraction_sweep, contraction_table, deleeuw_family, deleeuw_spread, deleeuw_sweep, difference_ratio,
    doi_ratio, lp_ratio, normal_ratio, run_identity_suite, transference_sweep, transference_table, write_records,
    DeLeeuwConfig, ExperimentConfig, IntegerMap, OutputFormat, RatioRecord, SuiteOptions, Table, TransferenceConfig,
    CONJUGATION_TOL, SYMBOL_TOL,
};
use oplip::functions::BuiltinFn;
use oplip::spectral::SpectrumLaw;
use oplip::torus::{periodization_probe, read_signal, write_signal, TrigPolynomial};
use oplip::{Signal, C64};

#[derive(Parser, Debug)]
#[command(name = "oplip", version, about = "Weak-type operator-Lipschitz experiments on finite matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// ||[f(A), B]||_{1,inf} against L max_k ||[A_k, B]||_1.
    RatioCommutator(RatioArgs),
    /// ||f(X) - f(Y)||_{1,inf} against L max_k ||X_k - Y_k||_1.
    RatioDifference(RatioArgs),
    /// ||T_{f_k}(V)||_{1,inf} against L ||V||_1, per coordinate k.
    RatioDoi(RatioArgs),
    /// ||T_{f_k}(V)||_p / ||V||_p.
    RatioLp {
        #[command(flatten)]
        args: RatioArgs,
        /// Schatten exponents, each in (1, inf).
        #[arg(long, value_delimiter = ',', default_value = "1.5,2,4")]
        p: Vec<f64>,
    },
    /// Difference ratio for normal matrices X = X_1 + i X_2 (d = 2).
    RatioNormal(RatioArgs),
    /// Residual of S(I(V)) = I(T_{h_k}(V)) on integer-spectrum tuples.
    TransferenceCheck {
        #[command(flatten)]
        args: RatioArgs,
        /// Grid points per torus axis.
        #[arg(long, default_value_t = 64)]
        grid: usize,
        /// Eigenvalues are drawn from -radius..=radius.
        #[arg(long, default_value_t = 5)]
        radius: i64,
        /// h(i) = floor((s/2) f(i/s)); 0 uses h(i) = floor(f(i)).
        #[arg(long, default_value_t = 2)]
        scale: usize,
    },
    /// Weak-L1/L1 ratio of the lattice multiplier over a fixed signal family.
    DeleeuwSweep {
        #[command(flatten)]
        out: OutputArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        d: usize,
        /// Symbol coordinate, one-based.
        #[arg(long, default_value_t = 1)]
        k0: usize,
        #[arg(long, value_delimiter = ',', default_value = "32,64,128")]
        grids: Vec<usize>,
        #[arg(long, default_value_t = 2)]
        fiber: usize,
        #[arg(long, default_value_t = 10)]
        family: usize,
        /// Also write every sampled family member into this directory.
        #[arg(long)]
        save_dir: Option<PathBuf>,
        /// Extension of saved signals: json or bin.
        #[arg(long, default_value = "bin")]
        signal_ext: String,
    },
    /// Gaussian-weighted periodization probe of a scalar trigonometric polynomial.
    Periodization {
        #[command(flatten)]
        out: OutputArgs,
        /// Frequency of the character e_k, one entry per axis.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1")]
        freq: Vec<i64>,
        /// Read the polynomial from a scalar signal file instead (.json or binary).
        #[arg(long, conflicts_with = "freq")]
        input: Option<PathBuf>,
        /// Gaussian width(s).
        #[arg(long, value_delimiter = ',', default_value = "32")]
        l: Vec<f64>,
        /// Truncation radius as a multiple of l.
        #[arg(long, default_value_t = 8.0)]
        radius_factor: f64,
        /// Quadrature step; defaults to 2 pi / 64.
        #[arg(long)]
        h: Option<f64>,
    },
    /// Exhaustive contraction and symbol-agreement checks of rounded contractions.
    ContractionTest {
        #[command(flatten)]
        out: OutputArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        d: usize,
        /// Box radius.
        #[arg(long, default_value_t = 30)]
        r: i64,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6,7,8")]
        scales: Vec<usize>,
        /// A single function; all built-in contractions when omitted.
        #[arg(long)]
        f: Option<BuiltinFn>,
    },
    /// Runs every exact identity; exits nonzero if any check fails.
    IdentitySuite {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Multiplies every tolerance (test hook; values <= 0 force failure).
        #[arg(long, default_value_t = 1.0, hide = true, allow_hyphen_values = true)]
        tolerance_scale: f64,
    },
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// json (JSON lines) or csv; inferred from the --out extension by default.
    #[arg(long)]
    format: Option<OutputFormat>,
}

#[derive(Args, Debug, Clone)]
struct RatioArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Matrix size.
    #[arg(long, default_value_t = 6)]
    n: usize,
    /// Number of commuting matrices.
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// id, abs, euclid-norm, max-abs, coordinate:k, crease, poly:c0,c1,..., const:c.
    #[arg(long, default_value = "id")]
    f: BuiltinFn,
    /// Lipschitz bound L; the exact constant of f by default.
    #[arg(long)]
    lipschitz: Option<f64>,
    /// Eigenvalue law: uniform, integer:m, grid:v1,v2,...
    #[arg(long, default_value = "uniform")]
    law: SpectrumLaw,
    #[command(flatten)]
    out: OutputArgs,
}

impl OutputArgs {
    fn format(&self) -> OutputFormat {
        self.format.unwrap_or_else(|| match self.out.as_deref().and_then(Path::extension).and_then(|e| e.to_str()) {
            Some("csv") => OutputFormat::Csv,
            _ => OutputFormat::JsonLines,
        })
    }

    fn sink(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
            None => Box::new(std::io::stdout().lock()),
        })
    }

    fn emit_records(&self, records: &[RatioRecord]) -> Result<()> {
        write_records(records, self.format(), self.sink()?)?;
        Ok(())
    }

    fn emit_table(&self, table: &Table) -> Result<()> {
        table.write(self.format(), self.sink()?)?;
        Ok(())
    }
}

impl RatioArgs {
    fn config(&self, default_d: usize) -> Result<ExperimentConfig> {
        let d = self.d.unwrap_or(default_d);
        let mut cfg = match self.lipschitz {
            Some(l) => ExperimentConfig::with_bound(self.seed, self.n, d, self.trials, self.f.clone(), l)?,
            None => ExperimentConfig::new(self.seed, self.n, d, self.trials, self.f.clone())?,
        };
        cfg.law = self.law.clone();
        cfg.output_path = self.out.out.clone();
        cfg.output_format = self.out.format();
        cfg.validate()?;
        if let (Some(l), Some(exact)) = (self.lipschitz, self.f.lipschitz(d)) {
            if l < exact {
                eprintln!("warning: --lipschitz {l} is below the exact constant {exact} of {}", self.f);
            }
        }
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn status(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::RatioCommutator(a) => a.out.emit_records(&commutator_ratio(&a.config(1)?)?)?,
        Command::RatioDifference(a) => a.out.emit_records(&difference_ratio(&a.config(1)?)?)?,
        Command::RatioDoi(a) => a.out.emit_records(&doi_ratio(&a.config(1)?)?)?,
        Command::RatioLp { args, p } => args.out.emit_records(&lp_ratio(&args.config(1)?, &p)?)?,
        Command::RatioNormal(a) => {
            if a.d.is_some_and(|d| d != 2) {
                bail!("ratio-normal works with commuting pairs; --d must be 2");
            }
            a.out.emit_records(&normal_ratio(&a.config(2)?)?)?
        }
        Command::TransferenceCheck { args, grid, radius, scale } => {
            let d = args.d.unwrap_or(1);
            args.f.validate(d)?;
            if !args.f.lipschitz(d).is_some_and(|l| l <= 1.0) {
                bail!("{} is not a contraction in dimension {d}", args.f);
            }
            let cfg = TransferenceConfig {
                seed: args.seed,
                n: args.n,
                d,
                trials: args.trials,
                f: args.f.clone(),
                map: if scale == 0 { IntegerMap::Floor } else { IntegerMap::Rounded(scale) },
                grid,
                radius,
            };
            let rows = transference_sweep(&cfg)?;
            args.out.emit_table(&transference_table(&cfg, &rows))?;
            return Ok(status(rows.iter().all(|r| r.residual <= CONJUGATION_TOL)));
        }
        Command::DeleeuwSweep { out, seed, d, k0, grids, fiber, family, save_dir, signal_ext } => {
            if k0 == 0 || k0 > d {
                bail!("--k0 must lie in 1..={d}");
            }
            let cfg = DeLeeuwConfig { seed, d, k0: k0 - 1, grids, fiber_dim: fiber, family_size: family, max_freq: 4 };
            if let Some(dir) = save_dir {
                save_family(&cfg, &dir, &signal_ext)?;
            }
            let records = deleeuw_sweep(&cfg)?;
            out.emit_records(&records)?;
            eprintln!("largest spread over N: {}", deleeuw_spread(&records));
        }
        Command::Periodization { out, freq, input, l, radius_factor, h } => {
            let poly = match input {
                Some(path) => polynomial_from_signal(&read_signal(&path)?)?,
                None => TrigPolynomial::new(freq.len(), vec![(freq.clone(), C64::new(1.0, 0.0))])?,
            };
            let step = h.unwrap_or(std::f64::consts::TAU / 64.0);
            let mut t = Table::new(&["kind", "dim", "l", "radius", "step", "ratio", "integral", "torus_l1", "gaussian_mass"]);
            for &li in &l {
                let rep = periodization_probe(&poly, li, radius_factor * li, step)?;
                t.push(vec![
                    "periodization".into(),
                    poly.dim().into(),
                    li.into(),
                    (radius_factor * li).into(),
                    rep.step.into(),
                    rep.ratio.into(),
                    rep.integral.into(),
                    rep.torus_l1.into(),
                    rep.gaussian_mass.into(),
                ]);
            }
            out.emit_table(&t)?;
        }
        Command::ContractionTest { out, seed, d, r, scales, f } => {
            let fns = match f {
                Some(f) => vec![f],
                None => BuiltinFn::contractions(d),
            };
            let rows = contraction_sweep(&fns, d, r, &scales, seed)?;
            out.emit_table(&contraction_table(d, r, &rows))?;
            let ok = rows.iter().all(|row| row.violations == 0 && row.symbol_deviation.is_none_or(|x| x <= SYMBOL_TOL));
            return Ok(status(ok));
        }
        Command::IdentitySuite { seed, out, tolerance_scale } => {
            let report = run_identity_suite(SuiteOptions { seed, tolerance_scale });
            let text = report.render();
            match out {
                Some(p) => std::fs::write(&p, &text).with_context(|| format!("writing {}", p.display()))?,
                None => print!("{text}"),
            }
            for c in report.checks.iter().filter(|c| !c.passed) {
                eprintln!("FAILED {}: residual {:e} > tolerance {:e}", c.name, c.residual, c.tolerance);
            }
            return Ok(status(report.passed()));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn save_family(cfg: &DeLeeuwConfig, dir: &Path, ext: &str) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (j, terms) in deleeuw_family(cfg).iter().enumerate() {
        for &grid in &cfg.grids {
            let w = Signal::from_terms(cfg.d + 1, grid, cfg.fiber_dim, terms)?;
            write_signal(&w, &dir.join(format!("signal-{j}-N{grid}.{ext}")))?;
        }
    }
    Ok(())
}

/// Nonzero DFT coefficients of a scalar signal as a trigonometric polynomial.
fn polynomial_from_signal(w: &Signal) -> Result<TrigPolynomial<f64>> {
    if w.fiber_dim() != 1 {
        bail!("the periodization probe needs a scalar signal (fiber dimension 1)");
    }
    let coeffs = w.dft();
    let cutoff = 1e-12 * coeffs.samples().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let terms = (0..coeffs.num_points())
        .filter(|&p| coeffs.samples()[p].norm() > cutoff)
        .map(|p| (coeffs.frequency_of_point(p), coeffs.samples()[p]))
        .collect();
    Ok(TrigPolynomial::new(w.torus_dim(), terms)?)
}
