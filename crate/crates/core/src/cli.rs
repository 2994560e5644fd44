//! The `ngon` command line.
//!
//! Exit codes: 0 success, 1 a check was refuted or failed, 2 usage error,
//! 3 numeric failure.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::chain::{connect_to_annulus, default_radius, verify_chain, ChainConfig, ChainError};
use crate::coeffsets::{omega_polar, omega_set, CoeffSet};
use crate::join::{join_sequence, verify_join, JoinError};
use crate::locus::{
    attractor_points, membership, render_locus, Lambda, LocusError, Region, SearchParams,
    DEFAULT_BUDGET, DEFAULT_DEPTH, DEFAULT_QUANTIZE_AFTER, DEFAULT_QUANTIZE_BITS,
    DEFAULT_RENDER_BUDGET,
};
use crate::polyseries::{
    enumerate_zero_set_par, roots_certified, write_roots_csv, GPoly, PolyError,
    DEFAULT_ENUM_BUDGET, DEFAULT_ROOT_TOL,
};
use crate::star::{check_star, lemma_sweep};

/// Version of every JSON document the CLI emits.
pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ngon", version, about = "Coefficient sets, zero sets and connectedness loci of fractal n-gons")]
pub struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, env = "NGON_THREADS")]
    pub threads: Option<usize>,
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build Ω_n by definition and from its polar form, and compare.
    Omega {
        #[arg(long)]
        n: u32,
    },
    /// Decide the chain condition and print chains or a refutation.
    CheckStar(CheckStarArgs),
    /// Exact sweep of the sine-ratio identities behind the ladders.
    Lemmas {
        #[arg(long, default_value_t = 101)]
        max_odd: u32,
        #[arg(long, default_value_t = 100)]
        max_even: u32,
        /// Largest accepted floating residual.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Certified roots of one polynomial.
    Roots(RootsArgs),
    /// Enumerate Q^G_N and write every root as CSV.
    Zeroset {
        #[arg(long)]
        n: u32,
        /// Series length N.
        #[arg(long)]
        len: usize,
        #[arg(long, default_value_t = DEFAULT_ENUM_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = DEFAULT_ROOT_TOL)]
        tol: f64,
        /// CSV destination (stdout when absent).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Join two members of Q^{Ω_n}_N and verify the sequence.
    Join {
        #[arg(long)]
        n: u32,
        /// Coefficient indices a_1,…,a_{N-1} of the start.
        #[arg(long, value_delimiter = ',', required = true)]
        from: Vec<usize>,
        /// Coefficient indices of the end.
        #[arg(long, value_delimiter = ',', required = true)]
        to: Vec<usize>,
    },
    /// Connect a root of a member of Q^{Ω_n}_N to the annulus by an ε-chain.
    Chain(ChainArgs),
    /// Decide membership of one parameter in M_n.
    Member {
        #[arg(long)]
        n: u32,
        /// `re`, `re,im` or `re+imi`; decimal or p/q parts are read exactly.
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        /// Search with floating balls instead of exact rationals.
        #[arg(long)]
        float: bool,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Rasterize M_n.
    Render {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 256)]
        width: usize,
        #[arg(long, default_value_t = 256)]
        height: usize,
        /// `re_min,re_max,im_min,im_max`.
        #[arg(long, value_delimiter = ',', num_args = 4, allow_hyphen_values = true)]
        region: Option<Vec<f64>>,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
        /// Per-pixel state budget.
        #[arg(long, default_value_t = DEFAULT_RENDER_BUDGET)]
        budget: usize,
        #[arg(long, default_value_t = DEFAULT_QUANTIZE_BITS)]
        quantize_bits: u32,
        /// Image path; `.png` selects PNG, anything else binary PPM.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Chaos-game sample of the attractor, as CSV.
    Attractor {
        #[arg(long)]
        n: u32,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, default_value_t = 10_000)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct CheckStarArgs {
    #[arg(long, conflicts_with = "set", required_unless_present = "set")]
    pub n: Option<u32>,
    /// Integer coefficient set, e.g. `0,1,10`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub set: Option<Vec<i64>>,
}

#[derive(Debug, Args)]
pub struct RootsArgs {
    #[arg(long, requires = "indices", conflicts_with = "coeffs")]
    pub n: Option<u32>,
    /// Indices of a_1,…,a_{N-1} in Ω_n.
    #[arg(long, value_delimiter = ',')]
    pub indices: Option<Vec<usize>>,
    /// Complex coefficients c_0,…,c_d, each `re` or `re+imi`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required_unless_present = "n")]
    pub coeffs: Option<Vec<String>>,
    #[arg(long, default_value_t = DEFAULT_ROOT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    #[arg(long)]
    pub n: u32,
    /// Indices of a_1,…,a_{N-1} in Ω_n.
    #[arg(long, value_delimiter = ',', required = true)]
    pub indices: Vec<usize>,
    /// Position of the starting root in the sorted root list (default: first with |s| <= R).
    #[arg(long)]
    pub root: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    /// Inner radius R (default 1/√n + 0.01).
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_ROOT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = 256)]
    pub samples: usize,
    #[arg(long, default_value_t = 160)]
    pub len_cap: usize,
    #[arg(long, default_value_t = 2_000_000)]
    pub max_hops: usize,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long, default_value_t = DEFAULT_DEPTH)]
    pub depth: usize,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: usize,
    #[arg(long, default_value_t = DEFAULT_QUANTIZE_BITS)]
    pub quantize_bits: u32,
    #[arg(long, default_value_t = DEFAULT_QUANTIZE_AFTER)]
    pub quantize_after: usize,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Failed(String),
    Numeric(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Failed(_) => EXIT_FAILED,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Failed(m) | CliError::Numeric(m) => m,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failed(format!("i/o error: {e}"))
    }
}

impl From<PolyError> for CliError {
    fn from(e: PolyError) -> Self {
        match e {
            PolyError::NumericFailure { .. } => CliError::Numeric(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<LocusError> for CliError {
    fn from(e: LocusError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<JoinError> for CliError {
    fn from(e: JoinError) -> Self {
        match e {
            JoinError::NotAMember { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Failed(e.to_string()),
        }
    }
}

impl From<ChainError> for CliError {
    fn from(e: ChainError) -> Self {
        match e {
            ChainError::InvalidParameters(_) => CliError::Usage(e.to_string()),
            ChainError::CannotRun => CliError::Failed(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

fn omega(n: u32) -> Result<CoeffSet, CliError> {
    omega_set(n).map_err(|e| CliError::Usage(e.to_string()))
}

fn emit_json(out: &mut dyn Write, mut doc: Value) -> Result<(), CliError> {
    doc["schema_version"] = SCHEMA_VERSION.into();
    writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json serializes"))?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Failed(format!("cannot create {}: {e}", path.display())))
}

fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    s.parse::<Lambda>()
        .map(|l| l.to_complex())
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn cmd_omega(n: u32, json_out: bool, out: &mut dyn Write) -> Result<(), CliError> {
    let g = omega(n)?;
    let polar = omega_polar(n).map_err(|e| CliError::Usage(e.to_string()))?;
    let equal = g.ring_equal(&polar);
    let expected = if n % 2 == 1 { n * n - n + 1 } else { n * n / 2 + 1 } as usize;
    if json_out {
        let mut doc = g.to_json();
        doc["size"] = g.len().into();
        doc["expected_size"] = expected.into();
        doc["polar_equal"] = equal.into();
        emit_json(out, doc)?;
    } else {
        writeln!(out, "Omega_{n}: {} elements in conductor {}", g.len(), g.conductor())?;
        writeln!(out, "polar form equal: {equal}")?;
        writeln!(out, "growth bound L = {}", g.growth_bound())?;
        for (x, z) in g.elements().iter().zip(g.approx()) {
            writeln!(out, "  {x}  ~ {:.12} {:+.12}i", z.re, z.im)?;
        }
    }
    if equal && g.len() == expected {
        Ok(())
    } else {
        Err(CliError::Failed("polar form disagrees with the definition".into()))
    }
}

fn cmd_check_star(args: &CheckStarArgs, json_out: bool, out: &mut dyn Write) -> Result<(), CliError> {
    let g = match (&args.n, &args.set) {
        (Some(n), _) => omega(*n)?,
        (None, Some(set)) => CoeffSet::from_integers(set).map_err(|e| CliError::Usage(e.to_string()))?,
        (None, None) => return Err(CliError::Usage("give --n or --set".into())),
    };
    let cert = check_star(&g);
    if json_out {
        let mut doc = cert.to_json(&g);
        doc["n"] = json!(g.order());
        emit_json(out, doc)?;
    } else {
        writeln!(
            out,
            "{} elements, {} admissible steps: {}",
            g.len(),
            cert.steps().len(),
            if cert.is_satisfied() { "satisfied" } else { "refuted" }
        )?;
        if let crate::star::Verdict::Refuted(r) = cert.verdict() {
            writeln!(out, "refutation: {r:?}")?;
        }
    }
    if cert.is_satisfied() {
        Ok(())
    } else {
        Err(CliError::Failed("chain condition refuted".into()))
    }
}

fn cmd_lemmas(max_odd: u32, max_even: u32, tol: f64, json_out: bool, out: &mut dyn Write) -> Result<(), CliError> {
    let sweep = lemma_sweep(max_odd, max_even);
    let ok = sweep.failures.is_empty() && sweep.max_float_residual <= tol;
    if json_out {
        emit_json(
            out,
            json!({
                "max_odd": max_odd,
                "max_even": max_even,
                "checked": sweep.checked,
                "failures": sweep.failures,
                "max_float_residual": sweep.max_float_residual,
                "passed": ok,
            }),
        )?;
    } else {
        writeln!(
            out,
            "checked {} identities, {} exact failures, max float residual {:e}",
            sweep.checked,
            sweep.failures.len(),
            sweep.max_float_residual
        )?;
    }
    if ok {
        Ok(())
    } else {
        Err(CliError::Failed("identity sweep failed".into()))
    }
}

fn cmd_roots(args: &RootsArgs, json_out: bool, out: &mut dyn Write) -> Result<(), CliError> {
    let coeffs: Vec<Complex64> = match (&args.n, &args.indices, &args.coeffs) {
        (Some(n), Some(idx), _) => GPoly::from_indices(&omega(*n)?, idx)?.trimmed_approx(),
        (_, _, Some(c)) => c.iter().map(|s| parse_complex(s)).collect::<Result<_, _>>()?,
        _ => return Err(CliError::Usage("give --n with --indices, or --coeffs".into())),
    };
    let roots = roots_certified(&coeffs, args.tol)?;
    if json_out {
        let list: Vec<Value> = roots
            .roots
            .iter()
            .zip(&roots.residuals)
            .zip(&roots.clustered)
            .map(|((z, r), c)| json!({"re": z.re, "im": z.im, "residual": r, "clustered": c}))
            .collect();
        emit_json(
            out,
            json!({"degree": coeffs.len().saturating_sub(1), "tol": args.tol, "roots": list}),
        )?;
    } else {
        for (z, r) in roots.roots.iter().zip(&roots.residuals) {
            writeln!(out, "{:.15} {:+.15}i  residual {r:.2e}", z.re, z.im)?;
        }
    }
    Ok(())
}

fn cmd_zeroset(
    n: u32,
    len: usize,
    budget: u64,
    tol: f64,
    output: Option<&Path>,
    json_out: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let g = omega(n)?;
    let entries = enumerate_zero_set_par(&g, len, budget, tol)?;
    let polys = entries.len();
    let roots: usize = entries.iter().map(|e| e.roots.len()).sum();
    let csv_err = |e: csv::Error| CliError::Failed(format!("csv error: {e}"));
    match output {
        Some(path) => write_roots_csv(create(path)?, entries).map_err(csv_err)?,
        None if !json_out => write_roots_csv(&mut *out, entries).map_err(csv_err)?,
        None => {}
    }
    if json_out {
        emit_json(
            out,
            json!({
                "n": n, "N": len, "polynomials": polys, "roots": roots,
                "output": output.map(|p| p.display().to_string()),
            }),
        )?;
    }
    Ok(())
}

fn cmd_join(n: u32, from: &[usize], to: &[usize], json_out: bool, out: &mut dyn Write) -> Result<(), CliError> {
    let g = omega(n)?;
    if from.len() != to.len() {
        return Err(CliError::Usage("--from and --to must have the same length".into()));
    }
    let a = GPoly::from_indices(&g, from)?;
    let b = GPoly::from_indices(&g, to)?;
    let cert = check_star(&g);
    let seq = join_sequence(&a, &b, &g, &cert)?;
    let report = verify_join(&seq, &g, a.len());
    if json_out {
        let mut doc = seq.to_json();
        doc["n"] = n.into();
        doc["verification"] = serde_json::to_value(report).expect("report serializes");
        emit_json(out, doc)?;
    } else {
        writeln!(out, "{} hops; verification {:?}", seq.hop_count(), report)?;
    }
    if report.all() {
        Ok(())
    } else {
        Err(CliError::Failed("join sequence failed verification".into()))
    }
}

fn cmd_chain(args: &ChainArgs, json_out: bool, out: &mut dyn Write) -> Result<(), CliError> {
    let g = omega(args.n)?;
    let a = GPoly::from_indices(&g, &args.indices)?;
    let radius = args.radius.unwrap_or_else(|| default_radius(args.n));
    let roots = roots_certified(&a.trimmed_approx(), args.tol)?.roots;
    let s = match args.root {
        Some(i) => *roots
            .get(i)
            .ok_or_else(|| CliError::Usage(format!("polynomial has {} roots", roots.len())))?,
        None => roots
            .iter()
            .copied()
            .find(|z| z.norm() <= radius)
            .or_else(|| roots.iter().copied().find(|z| z.norm() < 1.0))
            .ok_or_else(|| CliError::Usage("polynomial has no root inside the unit disc".into()))?,
    };
    let config = ChainConfig {
        eps: args.eps,
        radius,
        tol: args.tol,
        samples: args.samples,
        len_cap: args.len_cap,
        max_hops: args.max_hops,
    };
    let cert = check_star(&g);
    let chain = connect_to_annulus(&a, s, &g, &cert, &config)?;
    let report = verify_chain(&chain, args.eps);
    if json_out {
        let mut doc = chain.to_json();
        doc["verification"] = serde_json::to_value(report).expect("report serializes");
        emit_json(out, doc)?;
    } else {
        for p in &chain.points {
            writeln!(
                out,
                "{:.12} {:+.12}i  |z|={:.6}  p_{}  residual {:.1e}{}",
                p.z.re,
                p.z.im,
                p.z.norm(),
                p.poly_index,
                p.residual,
                if p.certified { "" } else { "  (nearest root)" }
            )?;
        }
        writeln!(out, "{} points, N = {}, verification {:?}", chain.points.len(), chain.len, report)?;
    }
    if report.all() {
        Ok(())
    } else {
        Err(CliError::Failed("chain failed verification".into()))
    }
}

fn search_params(s: &SearchArgs) -> SearchParams {
    SearchParams {
        depth: s.depth,
        budget: s.budget,
        quantize_bits: s.quantize_bits,
        quantize_after: s.quantize_after,
    }
}

fn cmd_member(
    n: u32,
    lambda: &str,
    float: bool,
    search: &SearchArgs,
    json_out: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let g = omega(n)?;
    let mut l: Lambda = lambda.parse()?;
    if float {
        l = Lambda::Float(l.to_complex());
    }
    let verdict = membership(&l, &g, &search_params(search))?;
    if json_out {
        let mut doc = serde_json::to_value(verdict).expect("verdict serializes");
        doc["n"] = n.into();
        doc["lambda"] = json!([l.to_complex().re, l.to_complex().im]);
        emit_json(out, doc)?;
    } else {
        writeln!(out, "{verdict:?}")?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_render(
    n: u32,
    width: usize,
    height: usize,
    region: Option<&[f64]>,
    params: SearchParams,
    output: Option<&Path>,
    json_out: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let region = match region {
        Some(&[a, b, c, d]) if a < b && c < d => Region {
            re_min: a,
            re_max: b,
            im_min: c,
            im_max: d,
        },
        Some(_) => return Err(CliError::Usage("--region needs re_min<re_max, im_min<im_max".into())),
        None => Region::default(),
    };
    omega(n)?;
    let raster = render_locus(n, region, width, height, &params)?;
    let path = output
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from(format!("locus_n{n}.ppm")));
    let mut file = create(&path)?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("png")) {
        raster
            .write_png(&mut file)
            .map_err(|e| CliError::Failed(format!("png error: {e}")))?;
    } else {
        raster.write_ppm(&mut file)?;
    }
    file.flush()?;
    let [outs, unknown, ins] = raster.counts();
    if json_out {
        emit_json(
            out,
            json!({
                "n": n, "width": width, "height": height, "region": region,
                "depth": params.depth, "budget": params.budget,
                "counts": {"in": ins, "unknown": unknown, "out": outs},
                "output": path.display().to_string(),
            }),
        )?;
    } else {
        writeln!(out, "wrote {} (in {ins}, unknown {unknown}, out {outs})", path.display())?;
    }
    Ok(())
}

fn cmd_attractor(
    n: u32,
    lambda: &str,
    count: usize,
    seed: u64,
    output: Option<&Path>,
    json_out: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let l = parse_complex(lambda)?;
    let cloud = attractor_points(n, l, count, seed)?;
    let csv_err = |e: csv::Error| CliError::Failed(format!("csv error: {e}"));
    match output {
        Some(path) => cloud.write_csv(create(path)?).map_err(csv_err)?,
        None if !json_out => cloud.write_csv(&mut *out).map_err(csv_err)?,
        None => {}
    }
    if json_out {
        emit_json(
            out,
            json!({
                "n": n, "lambda": [l.re, l.im], "seed": seed, "count": count,
                "iterations": cloud.iterations,
                "output": output.map(|p| p.display().to_string()),
            }),
        )?;
    }
    Ok(())
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let j = cli.json;
    match &cli.command {
        Command::Omega { n } => cmd_omega(*n, j, out),
        Command::CheckStar(args) => cmd_check_star(args, j, out),
        Command::Lemmas { max_odd, max_even, tol } => cmd_lemmas(*max_odd, *max_even, *tol, j, out),
        Command::Roots(args) => cmd_roots(args, j, out),
        Command::Zeroset { n, len, budget, tol, output } => {
            cmd_zeroset(*n, *len, *budget, *tol, output.as_deref(), j, out)
        }
        Command::Join { n, from, to } => cmd_join(*n, from, to, j, out),
        Command::Chain(args) => cmd_chain(args, j, out),
        Command::Member { n, lambda, float, search } => cmd_member(*n, lambda, *float, search, j, out),
        Command::Render { n, width, height, region, depth, budget, quantize_bits, output } => {
            let params = SearchParams {
                depth: *depth,
                budget: *budget,
                quantize_bits: *quantize_bits,
                ..SearchParams::render()
            };
            cmd_render(*n, *width, *height, region.as_deref(), params, output.as_deref(), j, out)
        }
        Command::Attractor { n, lambda, count, seed, output } => {
            cmd_attractor(*n, lambda, *count, *seed, output.as_deref(), j, out)
        }
    }
}

/// Runs the CLI on `argv` (program name first), writing to the given streams.
pub fn cli_run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    if cli.threads == Some(0) {
        let _ = writeln!(err, "error: --threads must be positive");
        return EXIT_USAGE;
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        builder = builder.num_threads(t);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start worker pool: {e}");
            return EXIT_FAILED;
        }
    };
    let mut buf: Vec<u8> = Vec::new();
    let result = pool.install(|| dispatch(&cli, &mut buf));
    let _ = out.write_all(&buf).and_then(|()| out.flush());
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.code()
        }
    }
}

/// Runs the CLI on `argv` against the process's stdout and stderr.
pub fn cli_run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let mut err = std::io::stderr();
    cli_run_with(argv, &mut out, &mut err)
}
