//! `lucaslcm` command-line front end.
//!
//! [`run`] parses arguments, executes one subcommand and writes text, JSON or
//! CSV. Exit status: 0 when every check passes, 1 when at least one
//! verification or bound fails, 2 on invalid input.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use lucaslcm_core::bounds::asymptotics::{akiyama_series, ratio_csv, ratio_t7, theorem4_scan, RatioPoint};
use lucaslcm_core::bounds::{
    bound_fibo, bound_grid, bound_t2, bound_t3, bound_t6, bousla_farhi_series, check_bousla_farhi, BoundReport, Theorem,
};
use lucaslcm_core::combinatorics::{lcm_binomial, u_binomial};
use lucaslcm_core::lab::grid::{run_grid, Check, GridConfig};
use lucaslcm_core::lab::{explore_equality, lcm_range, theorem1_certificate};
use lucaslcm_core::numerics::interval::Precision;
use lucaslcm_core::numerics::rational_to_string;
use lucaslcm_core::recurrences::term;
use lucaslcm_core::report::{Report, ResultEntry, Verdict};
use lucaslcm_core::{Error, RecurrenceParams};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Parser, Debug, Serialize)]
#[command(name = "lucaslcm", version, about = "Exact lcm of binary linear recurrence sequences")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Emit the JSON report (same as `--format json`)
    #[arg(long, global = true)]
    #[serde(skip)]
    pub json: bool,

    /// Emit CSV (ratio series only; same as `--format csv`)
    #[arg(long, global = true)]
    #[serde(skip)]
    pub csv: bool,

    #[arg(long, global = true, value_enum)]
    #[serde(skip)]
    pub format: Option<Format>,

    /// Worker threads for grid runs; output does not depend on it
    #[arg(long, global = true)]
    #[serde(skip)]
    pub jobs: Option<usize>,

    /// Starting interval precision in fractional bits
    #[arg(long, global = true)]
    #[serde(skip)]
    pub prec: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// `R_{n+2} = P R_{n+1} − Q R_n`; omitting R0/R1 gives the Lucas sequence `U(P, Q)`.
#[derive(Args, Debug, Clone, Serialize)]
pub struct SeqArgs {
    #[arg(long = "P", allow_hyphen_values = true)]
    #[serde(rename = "P")]
    pub p: i64,
    #[arg(long = "Q", allow_hyphen_values = true)]
    #[serde(rename = "Q")]
    pub q: i64,
    #[arg(long = "R0", default_value_t = 0, allow_hyphen_values = true)]
    #[serde(rename = "R0")]
    pub r0: i64,
    #[arg(long = "R1", default_value_t = 1, allow_hyphen_values = true)]
    #[serde(rename = "R1")]
    pub r1: i64,
}

impl SeqArgs {
    fn params(&self) -> Result<RecurrenceParams, Error> {
        RecurrenceParams::validate(self.p, self.q, self.r0, self.r1)
    }
}

/// Lucas sequence `U(P, Q)`.
#[derive(Args, Debug, Clone, Serialize)]
pub struct LucasArgs {
    #[arg(long = "P", allow_hyphen_values = true)]
    #[serde(rename = "P")]
    pub p: i64,
    #[arg(long = "Q", allow_hyphen_values = true)]
    #[serde(rename = "Q")]
    pub q: i64,
}

impl LucasArgs {
    fn params(&self) -> Result<RecurrenceParams, Error> {
        RecurrenceParams::lucas(self.p, self.q)
    }
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Print R_n
    Term {
        #[command(flatten)]
        #[serde(flatten)]
        seq: SeqArgs,
        #[arg(long)]
        n: u64,
    },
    /// lcm(R_from, …, R_to)
    Lcm {
        #[command(flatten)]
        #[serde(flatten)]
        seq: SeqArgs,
        #[arg(long, default_value_t = 1)]
        from: u64,
        #[arg(long)]
        to: u64,
    },
    /// U-binomial coefficient binom(n, k)_U
    Ubinom {
        #[command(flatten)]
        #[serde(flatten)]
        seq: LucasArgs,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u64,
    },
    /// lcm-binomial lcm(U_n..U_{n−k+1}) / lcm(U_1..U_k)
    Lcmbinom {
        #[command(flatten)]
        #[serde(flatten)]
        seq: LucasArgs,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u64,
    },
    /// Divisor certificate for lcm(R_k, …, R_n)
    Cert {
        #[command(flatten)]
        #[serde(flatten)]
        seq: SeqArgs,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        n: u64,
    },
    /// Run identity and certificate checks over a parameter grid
    Verify {
        #[arg(value_enum)]
        target: VerifyTarget,
        /// `default` or a path to a JSON grid config
        #[arg(long, default_value = "default")]
        grid: String,
        /// Seed for randomized windows (overrides the grid config)
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Certify an effective lower bound (or run its hypothesis grid)
    Bound(BoundArgs),
    /// Ratio series for the asymptotic estimates
    Ratio {
        #[arg(value_enum)]
        target: RatioTarget,
        #[command(flatten)]
        #[serde(flatten)]
        seq: SeqArgs,
        /// Window length parameter for t7
        #[arg(long, default_value_t = 1)]
        m: u64,
        /// One or more n, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u64>,
    },
    /// List (n, k) with lcm-binomial equal to U-binomial
    Explore {
        #[command(flatten)]
        #[serde(flatten)]
        seq: LucasArgs,
        #[arg(long = "n-max")]
        n_max: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyTarget {
    Co,
    Co2,
    Tri,
    Derrr,
    Dif,
    Pf,
    Gcd,
    E15,
    Cert,
    All,
}

impl VerifyTarget {
    fn checks(self) -> Vec<Check> {
        match self {
            VerifyTarget::All => Check::ALL.to_vec(),
            VerifyTarget::Co => vec![Check::Co],
            VerifyTarget::Co2 => vec![Check::Co2],
            VerifyTarget::Tri => vec![Check::Tri],
            VerifyTarget::Derrr => vec![Check::Derrr],
            VerifyTarget::Dif => vec![Check::Dif],
            VerifyTarget::Pf => vec![Check::Pf],
            VerifyTarget::Gcd => vec![Check::Gcd],
            VerifyTarget::E15 => vec![Check::E15],
            VerifyTarget::Cert => vec![Check::Cert],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundTarget {
    T2,
    T6,
    T3,
    Bf,
    Fibo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RatioTarget {
    T7,
    Akiyama,
    T4,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BoundArgs {
    #[arg(value_enum)]
    pub target: BoundTarget,
    #[arg(long = "P", allow_hyphen_values = true)]
    #[serde(rename = "P", skip_serializing_if = "Option::is_none")]
    pub p: Option<i64>,
    #[arg(long = "Q", allow_hyphen_values = true)]
    #[serde(rename = "Q", skip_serializing_if = "Option::is_none")]
    pub big_q: Option<i64>,
    #[arg(long = "R0", allow_hyphen_values = true)]
    #[serde(rename = "R0", skip_serializing_if = "Option::is_none")]
    pub r0: Option<i64>,
    #[arg(long = "R1", allow_hyphen_values = true)]
    #[serde(rename = "R1", skip_serializing_if = "Option::is_none")]
    pub r1: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u0: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<i64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    /// Window end; with `--grid` (or for `bf`) the largest n swept
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    /// Sweep the hypothesis grid instead of a single instance
    #[arg(long)]
    pub grid: bool,
    /// Largest absolute parameter value in the grid
    #[arg(long, default_value_t = 6)]
    pub limit: i64,
}

/// Anything that makes a run invalid (exit 2).
#[derive(Debug)]
enum Invalid {
    Usage(String),
    Core(Error),
}

impl From<Error> for Invalid {
    fn from(e: Error) -> Self {
        Invalid::Core(e)
    }
}

impl std::fmt::Display for Invalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Invalid::Usage(m) => f.write_str(m),
            Invalid::Core(e) => write!(f, "{e}"),
        }
    }
}

fn usage(msg: impl Into<String>) -> Invalid {
    Invalid::Usage(msg.into())
}

fn need<T: Copy>(v: Option<T>, name: &str) -> Result<T, Invalid> {
    v.ok_or_else(|| usage(format!("missing required argument --{name}")))
}

/// Report plus its text rendering and, for series, CSV.
struct Outcome {
    report: Report,
    text: String,
    csv: Option<String>,
}

impl Outcome {
    fn new(config: Value) -> Self {
        Outcome { report: Report::new(config), text: String::new(), csv: None }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    fn entry(&mut self, tag: &str, check: &str, verdict: Verdict, params: Value, detail: Value) {
        let entry = ResultEntry { tag: tag.to_string(), check: check.to_string(), verdict, params, detail };
        self.report.push(entry, 0);
    }
}

fn params_json(p: &RecurrenceParams) -> Value {
    serde_json::to_value(p).expect("params serialize")
}

fn precision_for(cli: &Cli) -> Result<Precision, Invalid> {
    let base = Precision::from_env();
    match cli.prec {
        None => Ok(base),
        Some(bits) if (16..=1 << 16).contains(&bits) => Ok(Precision { start: bits, cap: base.cap.max(bits) }),
        Some(bits) => Err(usage(format!("--prec must be between 16 and 65536, got {bits}"))),
    }
}

fn format_for(cli: &Cli) -> Result<Format, Invalid> {
    let flags = [(cli.json, Format::Json), (cli.csv, Format::Csv)];
    let mut chosen: Vec<Format> = flags.iter().filter(|(on, _)| *on).map(|(_, f)| *f).collect();
    chosen.extend(cli.format);
    chosen.dedup();
    match chosen.as_slice() {
        [] => Ok(Format::Text),
        [f] => Ok(*f),
        _ => Err(usage("conflicting output formats")),
    }
}

fn load_grid(source: &str, seed: Option<u64>) -> Result<GridConfig, Invalid> {
    let mut cfg = if source == "default" {
        GridConfig::default()
    } else {
        let raw =
            std::fs::read_to_string(source).map_err(|e| usage(format!("cannot read grid config {source}: {e}")))?;
        serde_json::from_str(&raw).map_err(|e| usage(format!("bad grid config {source}: {e}")))?
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: &Cli, precision: Precision) -> Result<Outcome, Invalid> {
    let config = json!({ "run": &cli.command, "precision": precision });
    let mut out = Outcome::new(config);
    match &cli.command {
        Command::Term { seq, n } => {
            let p = seq.params()?;
            let v = term(&p, *n);
            out.line(v.to_string());
            out.entry("R_n", "term", Verdict::Pass, params_json(&p), json!({ "n": n, "value": v.to_string() }));
        }
        Command::Lcm { seq, from, to } => {
            let p = seq.params()?;
            let v = lcm_range(&p, *from, *to)?;
            out.line(v.to_string());
            let detail = json!({ "from": from, "to": to, "lcm": v.to_string() });
            out.entry("L_{k,n}", "lcm", Verdict::Pass, params_json(&p), detail);
        }
        Command::Ubinom { seq, n, k } => {
            let p = seq.params()?;
            let b = u_binomial(&p, *n, *k)?;
            let v = rational_to_string(&b.value);
            out.line(&v);
            out.entry("U-binomial", "ubinom", Verdict::Pass, params_json(&p), json!({ "n": n, "k": k, "value": v }));
        }
        Command::Lcmbinom { seq, n, k } => {
            let p = seq.params()?;
            let v = lcm_binomial(&p, *n, *k)?;
            out.line(v.to_string());
            let detail = json!({ "n": n, "k": k, "value": v.to_string() });
            out.entry("lcm-binomial", "lcmbinom", Verdict::Pass, params_json(&p), detail);
        }
        Command::Cert { seq, k, n } => {
            let p = seq.params()?;
            let c = theorem1_certificate(&p, *k, *n)?;
            let ok = c.is_valid();
            out.line(format!(
                "L_{{{k},{n}}} = {}  divisor = {}  quotient = {}  {}",
                c.lcm_value,
                rational_to_string(&c.divisor),
                rational_to_string(&c.quotient),
                if ok { "VALID" } else { "INVALID" }
            ));
            let detail = serde_json::to_value(&c).expect("certificate serializes");
            out.entry("Theorem 1", "cert", Verdict::from_bool(ok), params_json(&p), detail);
        }
        Command::Verify { target, grid, seed } => {
            let cfg = load_grid(grid, *seed)?;
            let checks = target.checks();
            let mut report = run_grid(&checks, &cfg)?;
            report.config = json!({ "run": &cli.command, "grid": cfg, "checks": checks });
            out.text = verify_text(&report, &checks);
            out.report = report;
        }
        Command::Bound(args) => bound(args, precision, &mut out)?,
        Command::Ratio { target, seq, m, n } => ratio(*target, seq, *m, n, precision, &mut out)?,
        Command::Explore { seq, n_max } => {
            let p = seq.params()?;
            let pairs = explore_equality(&p, *n_max)?;
            for (n, k) in &pairs {
                out.line(format!("{n} {k}"));
            }
            out.entry(
                "Open question 1",
                "explore",
                Verdict::Info,
                params_json(&p),
                json!({ "n_max": n_max, "pairs": pairs }),
            );
        }
    }
    Ok(out)
}

fn verify_text(report: &Report, checks: &[Check]) -> String {
    let mut s = String::new();
    for check in checks {
        let name = check.name();
        let (mut pass, mut fail, mut skipped) = (0, 0, 0);
        for e in report.results.iter().filter(|e| e.check == name) {
            match e.verdict {
                Verdict::Pass => pass += 1,
                Verdict::Fail => fail += 1,
                _ => skipped += 1,
            }
        }
        s.push_str(&format!("{name:<6} pass {pass:>6}  fail {fail:>4}  skipped {skipped:>4}\n"));
    }
    for e in report.results.iter().filter(|e| e.verdict == Verdict::Fail) {
        s.push_str(&format!("FAIL {} {} {}\n", e.check, e.params, e.detail));
    }
    let sm = &report.summary;
    s.push_str(&format!(
        "summary: pass {}  fail {}  skipped_zero_windows {}\n",
        sm.pass, sm.fail, sm.skipped_zero_windows
    ));
    s
}

fn bound_line(r: &BoundReport) -> String {
    let mut s = format!(
        "{} {} m={} n={} lcm={} log_lcm {:.6} log_bound {:.6} slack {:.6}",
        r.tag, r.params, r.m, r.n, r.lcm, r.log_lcm, r.log_bound, r.slack
    );
    if let Some(u) = &r.upper {
        s.push_str(&format!(" upper_slack {:.6}", u.slack));
    }
    s.push_str(if r.pass { " PASS" } else { " FAIL" });
    s
}

fn push_bound(out: &mut Outcome, r: &BoundReport, check: &str) {
    let detail = serde_json::to_value(r).expect("bound report serializes");
    out.entry(&r.tag, check, Verdict::from_bool(r.pass), r.params.clone(), detail);
}

fn bound(args: &BoundArgs, precision: Precision, out: &mut Outcome) -> Result<(), Invalid> {
    let check = format!("bound_{}", serde_json::to_value(args.target).expect("enum").as_str().unwrap_or(""));
    let reports: Vec<BoundReport> = if args.grid {
        let n_max = args.n.unwrap_or(30);
        match args.target {
            BoundTarget::T2 => bound_grid(Theorem::T2, args.limit, n_max, precision)?,
            BoundTarget::T6 => bound_grid(Theorem::T6, args.limit, n_max, precision)?,
            BoundTarget::T3 => bound_grid(Theorem::T3, args.limit, n_max, precision)?,
            BoundTarget::Fibo => bound_grid(Theorem::Fibo, args.limit, n_max, precision)?,
            BoundTarget::Bf => bousla_farhi_series(args.n.unwrap_or(200), precision)?,
        }
    } else {
        let n = need(args.n, "n")?;
        let r = match args.target {
            BoundTarget::Bf => check_bousla_farhi(n, precision)?,
            BoundTarget::T2 => bound_t2(
                need(args.p, "P")?,
                need(args.big_q, "Q")?,
                need(args.c, "c")?,
                need(args.d, "d")?,
                need(args.m, "m")?,
                n,
                precision,
            )?,
            BoundTarget::T6 => {
                let p = RecurrenceParams::validate(
                    need(args.p, "P")?,
                    need(args.big_q, "Q")?,
                    need(args.r0, "R0")?,
                    need(args.r1, "R1")?,
                )?;
                bound_t6(&p, need(args.m, "m")?, n, precision)?
            }
            BoundTarget::Fibo => bound_fibo(need(args.c, "c")?, need(args.d, "d")?, need(args.m, "m")?, n, precision)?,
            BoundTarget::T3 => bound_t3(
                need(args.q, "q")?,
                need(args.u0, "u0")?,
                need(args.r, "r")?,
                need(args.m, "m")?,
                n,
                precision,
            )?,
        };
        vec![r]
    };
    if args.grid {
        let failed: Vec<&BoundReport> = reports.iter().filter(|r| !r.pass).collect();
        for r in &failed {
            out.line(bound_line(r));
        }
        out.line(format!("{check}: {} instances, {} failed", reports.len(), failed.len()));
    } else {
        out.line(bound_line(&reports[0]));
    }
    for r in &reports {
        push_bound(out, r, &check);
    }
    Ok(())
}

fn ratio_line(label: &str, p: &RatioPoint) -> String {
    format!("n={} {label} {:.9}", p.n, p.ratio)
}

fn push_ratio(out: &mut Outcome, tag: &str, check: &str, params: &Value, p: &RatioPoint) {
    let detail = serde_json::to_value(p).expect("ratio serializes");
    out.entry(tag, check, Verdict::Info, params.clone(), detail);
}

fn ratio(
    target: RatioTarget,
    seq: &SeqArgs,
    m: u64,
    ns: &[u64],
    precision: Precision,
    out: &mut Outcome,
) -> Result<(), Invalid> {
    let p = seq.params()?;
    let pj = params_json(&p);
    match target {
        RatioTarget::T4 => {
            let pts = theorem4_scan(&p, ns, precision)?;
            for pt in &pts {
                out.line(ratio_line("ratio", pt));
                push_ratio(out, "Theorem T4", "ratio_t4", &pj, pt);
            }
            out.csv = Some(ratio_csv(&pts));
        }
        RatioTarget::T7 => {
            let mut first = Vec::new();
            let mut second = Vec::new();
            for &n in ns {
                let (a, b) = ratio_t7(&p, m, n, precision)?;
                out.line(format!("{}  {}", ratio_line("lcm/product", &a), ratio_line("lcm/(n(m+1)log|α|)", &b)));
                push_ratio(out, "Theorem T7 (T71)", "ratio_t7_product", &pj, &a);
                push_ratio(out, "Theorem T7 (T72)", "ratio_t7_alpha", &pj, &b);
                first.push(a);
                second.push(b);
            }
            out.csv = Some(ratio_csv(&second));
        }
        RatioTarget::Akiyama => {
            let (pts, est) = akiyama_series(&p, ns, precision)?;
            out.line(format!("kappa {:.9}", est.kappa));
            out.line(format!("predicted_limit {:.9}", est.predicted_limit));
            let detail = serde_json::to_value(&est).expect("estimate serializes");
            out.entry("Eq. (4)", "akiyama_estimate", Verdict::Info, pj.clone(), detail);
            for pt in &pts {
                out.line(ratio_line("log|product|/log lcm", pt));
                push_ratio(out, "Eq. (4)", "ratio_akiyama", &pj, pt);
            }
            out.csv = Some(ratio_csv(&pts));
        }
    }
    Ok(())
}

fn run_parsed(cli: &Cli, out: &mut dyn Write) -> Result<i32, Invalid> {
    let format = format_for(cli)?;
    let precision = precision_for(cli)?;
    if format == Format::Csv && !matches!(cli.command, Command::Ratio { .. }) {
        return Err(usage("CSV output is only available for ratio series"));
    }
    let outcome = match cli.jobs {
        Some(0) => return Err(usage("--jobs must be at least 1")),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| usage(format!("cannot start {j} workers: {e}")))?
            .install(|| execute(cli, precision))?,
        None => execute(cli, precision)?,
    };
    let body = match format {
        Format::Text => outcome.text,
        Format::Json => outcome.report.to_json(),
        Format::Csv => outcome.csv.unwrap_or_default(),
    };
    out.write_all(body.as_bytes()).map_err(|e| usage(format!("write failed: {e}")))?;
    Ok(if outcome.report.all_pass() { EXIT_PASS } else { EXIT_FAIL })
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit status. Diagnostics go to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(rendered.as_bytes());
                return EXIT_INVALID;
            }
            let _ = out.write_all(rendered.as_bytes());
            return EXIT_PASS;
        }
    };
    match run_parsed(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INVALID
        }
    }
}
