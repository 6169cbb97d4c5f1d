//! Command-line front end. Every subcommand builds a JSON document and an
//! equivalent table, rendered as JSON, CSV or aligned text.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cover::{self, Probe};
use crate::envelope::Amount;
use crate::error::{Error, Result};
use crate::game::{self, ArrangerStrategy, PlayerStrategy};
use crate::posterior::{self, ContinuousReport, DiscreteReport};
use crate::prior::{self, BroomePrior, DiscretePrior, Prior, PriorSpec};
use crate::rational;
use crate::simulate::{self, RunOptions, Schema, SimulationReport, TRIAL_LOG_CAP};
use crate::stats::SummaryStats;

#[derive(Debug, Parser)]
#[command(name = "envelopes", version, about = "Exact posteriors and seeded simulations for the two-envelope problem")]
pub struct Cli {
    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for simulations. Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Properness, mass and an uneven-split witness for a prior.
    Prior {
        /// Built-in name (broome, exponential) or path to a JSON definition.
        #[arg(long)]
        prior: String,
        /// Support points to list for infinite priors.
        #[arg(long, default_value_t = 8)]
        terms: u64,
    },
    /// Posterior split, conditional expectation and decisions given `A = a`.
    Posterior {
        #[arg(long)]
        prior: String,
        #[arg(long)]
        a: String,
    },
    /// Monte Carlo over an envelope-filling schema.
    Simulate {
        #[arg(long, value_enum)]
        schema: SchemaKind,
        #[arg(long)]
        x: Option<Amount>,
        #[arg(long)]
        prior: Option<String>,
        #[arg(long)]
        a: Option<Amount>,
        #[arg(long)]
        n: u64,
        /// Per-trial log (trial,a,b,gain), at most 100000 rows.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Win rate of the random-threshold switching strategy.
    Cover {
        /// CSV file with columns a,b.
        #[arg(long)]
        pairs: Option<PathBuf>,
        /// A single pair written `a,b`; may be repeated.
        #[arg(long = "pair", value_parser = parse_pair)]
        pair: Vec<(f64, f64)>,
        #[arg(long)]
        n: u64,
        /// Rate of the exponential threshold.
        #[arg(long, default_value_t = 1.0)]
        rate: f64,
    },
    /// Exact arranger-versus-player payoffs.
    Game {
        #[arg(long)]
        arranger: PathBuf,
        #[arg(long, required_unless_present = "cover")]
        player: Option<PathBuf>,
        /// Evaluate the threshold strategy and search for a pair that defeats it.
        #[arg(long)]
        cover: bool,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        #[arg(long, default_value_t = 1.0)]
        rate: f64,
    },
    /// Posterior quantities under the Broome prior at `a = 2^n`.
    BroomeTable {
        #[arg(long, default_value_t = 10)]
        n_max: u32,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SchemaKind {
    Fixed,
    Conditional,
    Prior,
    Alibaba,
}

fn parse_pair(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected a,b but got {s:?}"))?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok((num(a)?, num(b)?))
}

/// Result of one subcommand in both shapes.
pub struct Output {
    pub json: Value,
    pub table: Table,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Table {
    /// Lines printed above the table in text form, such as the seed.
    pub preamble: Vec<String>,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(headers: &[&str]) -> Self {
        Table {
            preamble: Vec::new(),
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push<I: IntoIterator<Item = String>>(&mut self, row: I) {
        self.rows.push(row.into_iter().collect());
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.len()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, &w)| format!("{c:>w$}"))
                .collect();
            padded.join("  ").trim_end().to_string()
        };
        let mut out = String::new();
        for p in &self.preamble {
            out.push_str(p);
            out.push('\n');
        }
        out.push_str(&line(&self.headers));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&line(row));
            out.push('\n');
        }
        out
    }
}

impl Output {
    pub fn render(&self, format: Format) -> Result<String> {
        Ok(match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json)?;
                s.push('\n');
                s
            }
            Format::Csv => self.table.to_csv()?,
            Format::Table => self.table.to_text(),
        })
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn stat_row(name: &str, s: &SummaryStats) -> Vec<String> {
    vec![
        name.to_string(),
        s.exact_mean
            .as_ref()
            .map(rational::render)
            .unwrap_or_default(),
        rational::format_sig(s.mean),
        rational::format_sig(s.ci95_halfwidth),
        rational::format_sig(s.sample_variance),
    ]
}

fn cmd_prior(name: &str, terms: u64) -> Result<Output> {
    match PriorSpec::resolve(name)?.build()? {
        Prior::Discrete(p) => {
            let prop = prior::check_proper(&p)?;
            let witness = prior::find_half_half_violation(&p).ok();
            let mut table = Table::new(&["x", "p", "p_decimal"]);
            let support = p.support(terms);
            for x in &support {
                let m = p.mass(x);
                table.push([x.to_string(), rational::render(&m), rational::decimal(&m)]);
            }
            table.preamble.push(format!(
                "prior {}: proper={}, total mass {}",
                p.label(),
                prop.proper,
                rational::render(&prop.total_mass)
            ));
            let json = json!({
                "prior": p.label(),
                "proper": prop.proper,
                "total_mass": rational::render(&prop.total_mass),
                "infinite_support": p.has_infinite_support(),
                "mean": p.mean().map(|m| rational::render(&m)),
                "half_half_witness": witness.map(|w| json!({
                    "a": w.a,
                    "p_up": rational::render(&w.split.p_up),
                    "p_down": rational::render(&w.split.p_down),
                })),
                "support": support.iter().map(|x| json!({
                    "x": x,
                    "p": rational::render(&p.mass(x)),
                })).collect::<Vec<_>>(),
            });
            Ok(Output { json, table })
        }
        Prior::Continuous(p) => {
            let mass = p.normalization();
            let ok = p.check_normalized().is_ok();
            let mut table = Table::new(&["prior", "normalization", "normalized"]);
            table.push([p.label().to_string(), rational::format_sig(mass), ok.to_string()]);
            let json = json!({ "prior": p.label(), "normalization": mass, "normalized": ok });
            Ok(Output { json, table })
        }
    }
}

fn cmd_posterior(name: &str, a: &str) -> Result<Output> {
    let mut table = Table::new(&["prior", "a", "p_up", "p_down", "E[B|A=a]", "by_expectation", "by_probability"]);
    match PriorSpec::resolve(name)?.build()? {
        Prior::Discrete(p) => {
            let a: Amount = a.parse()?;
            let r = DiscreteReport::compute(&p, &a)?;
            table.push([
                r.prior.clone(),
                r.a.to_string(),
                rational::render(&r.p_up),
                rational::render(&r.p_down),
                format!("{} ({})", r.conditional_expectation, r.conditional_expectation_decimal),
                r.decide_expectation.to_string(),
                r.decide_probability_of_larger.to_string(),
            ]);
            Ok(Output { json: to_json(&r)?, table })
        }
        Prior::Continuous(p) => {
            let a = rational::to_f64(&rational::parse(a)?);
            let r = ContinuousReport::compute(&p, a)?;
            table.push([
                r.prior.clone(),
                rational::format_sig(r.a),
                rational::format_sig(r.p_up),
                rational::format_sig(r.p_down),
                rational::format_sig(r.conditional_expectation),
                r.decide_expectation.to_string(),
                r.decide_probability_of_larger.to_string(),
            ]);
            Ok(Output { json: to_json(&r)?, table })
        }
    }
}

fn required<T: Clone>(v: &Option<T>, flag: &str, schema: &str) -> Result<T> {
    v.clone()
        .ok_or_else(|| Error::Parse(format!("--schema {schema} requires --{flag}")))
}

fn write_trial_log(path: &Path, report: &SimulationReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for t in &report.trials {
        w.serialize(t)?;
    }
    if report.trials.is_empty() {
        w.write_record(["trial", "a", "b", "gain"])?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_simulate(
    kind: SchemaKind,
    x: &Option<Amount>,
    prior_name: &Option<String>,
    a: &Option<Amount>,
    n: u64,
    csv_path: &Option<PathBuf>,
    seed: u64,
) -> Result<Output> {
    let schema = match kind {
        SchemaKind::Fixed => Schema::FixedPair { x: required(x, "x", "fixed")? },
        SchemaKind::Conditional => Schema::ConditionalFill { x: required(x, "x", "conditional")? },
        SchemaKind::Alibaba => Schema::AliBaba { x: required(x, "x", "alibaba")? },
        SchemaKind::Prior => {
            let name = required(prior_name, "prior", "prior")?;
            let prior = match PriorSpec::resolve(&name)?.build()? {
                Prior::Discrete(p) => p,
                Prior::Continuous(p) => {
                    return Err(Error::InvalidPrior(format!(
                        "{} is continuous; exact conditioning needs a discrete prior",
                        p.label()
                    )))
                }
            };
            Schema::PriorConditioned {
                prior,
                a: required(a, "a", "prior")?,
            }
        }
    };
    let opts = RunOptions {
        threads: None,
        trial_log: if csv_path.is_some() { TRIAL_LOG_CAP } else { 0 },
    };
    let report = simulate::run(&schema, n, seed, &opts)?;
    if let Some(path) = csv_path {
        write_trial_log(path, &report)?;
    }
    let mut json = to_json(&report)?;
    let mut table = Table::new(&["statistic", "exact_mean", "mean", "ci95", "variance"]);
    table.preamble.push(format!(
        "schema {} seed {} n {} attempts {}",
        report.schema, report.seed, report.n, report.attempts
    ));
    table.push(stat_row("a", &report.a));
    table.push(stat_row("b", &report.b));
    table.push(stat_row("gain", &report.gain));
    table.push(stat_row("total", &report.total));
    if kind == SchemaKind::Alibaba {
        let ratio = report
            .outcomes
            .tally(|ali, baba| ali.as_rational() / baba.as_rational())
            .summarize(&report.schema, seed);
        table.push(stat_row("ali_over_baba", &ratio));
        json["ali_over_baba"] = to_json(&ratio)?;
    }
    Ok(Output { json, table })
}

fn read_pairs(path: &Path) -> Result<Vec<(f64, f64)>> {
    #[derive(serde::Deserialize)]
    struct Row {
        a: f64,
        b: f64,
    }
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    r.deserialize::<Row>()
        .map(|row| row.map(|r| (r.a, r.b)).map_err(Error::from))
        .collect()
}

fn cmd_cover(pairs_path: &Option<PathBuf>, extra: &[(f64, f64)], n: u64, rate: f64, seed: u64) -> Result<Output> {
    let mut pairs = match pairs_path {
        Some(p) => read_pairs(p)?,
        None => Vec::new(),
    };
    pairs.extend_from_slice(extra);
    if pairs.is_empty() {
        return Err(Error::Parse("no pairs given; use --pairs or --pair".into()));
    }
    let probe = Probe::exponential(rate)?;
    let estimates = cover::estimate_win_rate(&pairs, &probe, n, seed)?;
    let mut table = Table::new(&["a", "b", "exact_p", "empirical_p", "ci95", "bits_mean", "seed"]);
    table.preamble.push(format!("probe {} seed {seed} n {n}", probe.label()));
    let mut rows = Vec::new();
    for e in &estimates {
        let bits = e.bits_mean.map(rational::format_sig).unwrap_or_default();
        table.push([
            rational::format_sig(e.a),
            rational::format_sig(e.b),
            rational::format_sig(e.exact_p),
            rational::format_sig(e.win.mean),
            rational::format_sig(e.win.ci95_halfwidth),
            bits,
            seed.to_string(),
        ]);
        rows.push(json!({
            "a": e.a,
            "b": e.b,
            "exact_p": e.exact_p,
            "empirical_p": e.win.mean,
            "ci95": e.win.ci95_halfwidth,
            "bits_mean": e.bits_mean,
            "strata": {
                "below_both": e.strata[0].mean,
                "between": e.strata[1].mean,
                "above_both": e.strata[2].mean,
            },
            "strata_n": [e.strata[0].n, e.strata[1].n, e.strata[2].n],
        }));
    }
    let json = json!({ "probe": probe.label(), "seed": seed, "n_per_pair": n, "pairs": rows });
    Ok(Output { json, table })
}

fn cmd_game(
    arranger_path: &Path,
    player_path: &Option<PathBuf>,
    cover_mode: bool,
    epsilon: f64,
    rate: f64,
) -> Result<Output> {
    let arranger = ArrangerStrategy::from_json(&read(arranger_path)?)?;
    if cover_mode {
        let probe = Probe::exponential(rate)?;
        let value = game::cover_vs_arranger(&arranger, &probe)?;
        let adv = game::shift_adversary_report(&probe, epsilon)?;
        let mut table = Table::new(&["probe", "win_value", "epsilon", "k", "adversary_win_value", "advantage"]);
        table.push([
            adv.probe.clone(),
            rational::format_sig(value),
            rational::format_sig(epsilon),
            adv.pair.0.to_string(),
            rational::format_sig(adv.win_value),
            rational::format_sig(adv.advantage),
        ]);
        let json = json!({ "win_value": value, "adversary": to_json(&adv)? });
        return Ok(Output { json, table });
    }
    let path = player_path
        .as_ref()
        .ok_or_else(|| Error::Parse("--player is required without --cover".into()))?;
    let player = PlayerStrategy::from_json(&read(path)?)?;
    let v: BigRational = game::exact_win_value(&arranger, &player);
    let mut table = Table::new(&["win_value", "win_value_decimal"]);
    table.push([rational::render(&v), rational::decimal(&v)]);
    let json = json!({ "win_value": rational::render(&v), "win_value_decimal": rational::decimal(&v) });
    Ok(Output { json, table })
}

/// One line of the Broome table at `a = 2^n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BroomeRow {
    pub n: u32,
    pub a: Amount,
    #[serde(with = "rational::serde_str")]
    pub p_n: BigRational,
    #[serde(with = "rational::serde_str")]
    pub p_up: BigRational,
    #[serde(with = "rational::serde_str")]
    pub p_down: BigRational,
    pub conditional_expectation: Amount,
    pub conditional_expectation_decimal: String,
    #[serde(with = "rational::serde_str")]
    pub expectation_over_a: BigRational,
    pub decide_expectation: posterior::Decision,
    pub decide_probability_of_larger: posterior::Decision,
}

pub fn broome_table(n_max: u32) -> Result<Vec<BroomeRow>> {
    let prior = DiscretePrior::broome();
    (0..=n_max)
        .map(|n| {
            let a = Amount::new(rational::pow2(n))?;
            let r = DiscreteReport::compute(&prior, &a)?;
            Ok(BroomeRow {
                n,
                p_n: BroomePrior.pmf(n),
                expectation_over_a: r.conditional_expectation.as_rational() / a.as_rational(),
                a,
                p_up: r.p_up,
                p_down: r.p_down,
                conditional_expectation: r.conditional_expectation,
                conditional_expectation_decimal: r.conditional_expectation_decimal,
                decide_expectation: r.decide_expectation,
                decide_probability_of_larger: r.decide_probability_of_larger,
            })
        })
        .collect()
}

fn cmd_broome_table(n_max: u32) -> Result<Output> {
    let rows = broome_table(n_max)?;
    let mut table = Table::new(&[
        "n",
        "a",
        "p(n)",
        "p_up",
        "p_down",
        "E[B|A=a]",
        "E_decimal",
        "E/a",
        "by_expectation",
        "by_probability",
    ]);
    for r in &rows {
        table.push([
            r.n.to_string(),
            r.a.to_string(),
            rational::render(&r.p_n),
            rational::render(&r.p_up),
            rational::render(&r.p_down),
            r.conditional_expectation.to_string(),
            r.conditional_expectation_decimal.clone(),
            rational::render(&r.expectation_over_a),
            r.decide_expectation.to_string(),
            r.decide_probability_of_larger.to_string(),
        ]);
    }
    Ok(Output { json: json!({ "rows": to_json(&rows)? }), table })
}

/// Execute a parsed command line.
pub fn execute(cli: &Cli) -> Result<Output> {
    let work = || match &cli.command {
        Command::Prior { prior, terms } => cmd_prior(prior, *terms),
        Command::Posterior { prior, a } => cmd_posterior(prior, a),
        Command::Simulate { schema, x, prior, a, n, csv } => {
            cmd_simulate(*schema, x, prior, a, *n, csv, cli.seed)
        }
        Command::Cover { pairs, pair, n, rate } => cmd_cover(pairs, pair, *n, *rate, cli.seed),
        Command::Game {
            arranger,
            player,
            cover,
            epsilon,
            rate,
        } => cmd_game(arranger, player, *cover, *epsilon, *rate),
        Command::BroomeTable { n_max } => cmd_broome_table(*n_max),
    };
    match cli.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| Error::Io(e.to_string()))?
            .install(work),
        None => work(),
    }
}

fn error_line(kind: &str, message: &str) -> String {
    json!({ "error": kind, "message": message }).to_string()
}

/// Parse `argv`, run, and write to the given streams. Returns the exit code:
/// 0 on success, 2 on a usage error, 1 on any other failure.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = write!(stdout, "{e}");
                return if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand { 2 } else { 0 };
            }
            let message = e.render().to_string();
            let first = message.lines().next().unwrap_or("").trim_start_matches("error: ");
            let _ = writeln!(stderr, "{}", error_line("Usage", first));
            return 2;
        }
    };
    let result = execute(&cli).and_then(|out| {
        let text = out.render(cli.format)?;
        match &cli.out {
            Some(path) => fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
            None => stdout.write_all(text.as_bytes()).map_err(Error::from),
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "{}", error_line(e.kind(), &e.to_string()));
            1
        }
    }
}

/// Entry point for the binary: real arguments and standard streams.
pub fn dispatch() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("envelopes").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn posterior_broome_at_two() {
        let (code, out, _) = call(&["posterior", "--prior", "broome", "--a", "2"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["p_up"], "2/5");
        assert_eq!(v["p_down"], "3/5");
        assert_eq!(v["conditional_expectation"], "11/5");
        assert_eq!(v["decide_expectation"], "Switch");
    }

    #[test]
    fn broome_table_rows() {
        let rows = broome_table(4).unwrap();
        assert_eq!(rows[0].conditional_expectation, Amount::from(2));
        assert_eq!(rows[0].decide_expectation, posterior::Decision::Switch);
        let r1 = &rows[1];
        assert_eq!((rational::render(&r1.p_up), rational::render(&r1.p_down)), ("2/5".into(), "3/5".into()));
        assert_eq!(r1.decide_expectation, posterior::Decision::Switch);
        assert_eq!(r1.decide_probability_of_larger, posterior::Decision::Keep);
        for r in &rows[1..] {
            assert_eq!(rational::render(&r.expectation_over_a), "11/10");
        }
    }

    #[test]
    fn usage_errors_exit_two() {
        let (code, _, err) = call(&["posterior", "--bogus"]);
        assert_eq!(code, 2);
        let v: Value = serde_json::from_str(err.trim()).unwrap();
        assert_eq!(v["error"], "Usage");
        assert_eq!(err.trim().lines().count(), 1);
    }

    #[test]
    fn domain_errors_exit_one() {
        let (code, _, err) = call(&["posterior", "--prior", "broome", "--a", "3"]);
        assert_eq!(code, 1);
        let v: Value = serde_json::from_str(err.trim()).unwrap();
        assert_eq!(v["error"], "UnattainableObservation");
    }

    #[test]
    fn table_and_csv_formats() {
        let (_, csv, _) = call(&["broome-table", "--n-max", "2", "--format", "csv"]);
        assert!(csv.starts_with("n,a,p(n),p_up,p_down"));
        assert_eq!(csv.lines().count(), 4);
        let (_, text, _) = call(&["broome-table", "--n-max", "2", "--format", "table"]);
        assert!(text.contains("11/10"));
    }

    #[test]
    fn simulate_echoes_seed() {
        let (code, out, _) = call(&["simulate", "--schema", "conditional", "--x", "20", "--n", "1000", "--seed", "7"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["seed"], 7);
        assert_eq!(v["n"], 1000);
    }
}
