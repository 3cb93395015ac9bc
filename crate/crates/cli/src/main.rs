use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};
use wronski::combinatorics::{build_table, enumerate_ballot, BallotSequence, TableOptions};
use wronski::control::{
    pole_poly_factored, pole_poly_leverrier, pole_poly_state, realize, CoprimeFactors, GainMatrix, LinearSystem,
};
use wronski::degree_lab::{
    apply_f, degree_signed_sum, jacobi_delta, preimage_solve, random_targets, recover_sigma, sharpness_check,
    sign_law_factors, squaring_schedule, BKVector, PreimageOptions, PreimageReport, ThornSpacing,
};
use wronski::polynomials::{wronskian, RationalPoly};
use wronski::rational::{format_rational, parse_rational, Rational};

#[derive(Parser)]
#[command(name = "wronski", version, about = "Degree of the real Wronski map: tables, preimages and pole placement")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Spacing {
    Geometric,
    Nested,
}

impl From<Spacing> for ThornSpacing {
    fn from(s: Spacing) -> Self {
        match s {
            Spacing::Geometric => ThornSpacing::Geometric,
            Spacing::Nested => ThornSpacing::Nested,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// d(m,p) and I(m,p) for all m <= m-max, p <= p-max, checked against the published tables.
    Tables {
        #[arg(long, default_value_t = 5)]
        m_max: usize,
        #[arg(long, default_value_t = 3)]
        p_max: usize,
    },
    /// Signed real preimage counts over random targets.
    VerifyDegree {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 5)]
        trials: usize,
    },
    /// Wronskian of polynomials read from JSON files (or a JSON array on stdin).
    Wronskian { files: Vec<PathBuf> },
    /// Real preimages of a target polynomial (JSON file or stdin).
    Preimages {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        target: Option<PathBuf>,
    },
    /// Real preimages of a thorn-shaped target.
    Sharpness {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        p: usize,
        #[arg(long, default_value = "1/10")]
        delta: String,
        #[arg(long, value_enum, default_value_t = Spacing::Nested)]
        spacing: Spacing,
    },
    /// Closed-loop pole polynomial of `u = Ky`.
    Pole {
        /// `{"A": .., "B": .., "C": ..}`.
        #[arg(long)]
        system: Option<PathBuf>,
        /// `{"D": [[poly]], "N": [[poly]]}`.
        #[arg(long)]
        factors: Option<PathBuf>,
        /// Gain matrix `K` (m x p).
        #[arg(long)]
        gain: PathBuf,
    },
    /// Walk from the base cell along ballot sequences with the squaring schedule.
    SeedChain {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        p: usize,
        /// Comma separated, e.g. `1,2,1,2`; all ballot sequences when omitted.
        #[arg(long)]
        sigma: Option<String>,
    },
}

struct Outcome {
    text: String,
    json: Value,
    ok: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let body = match cli.format {
                Format::Text => out.text,
                Format::Json => serde_json::to_string_pretty(&out.json).expect("serializable") + "\n",
            };
            let written = match &cli.output {
                Some(path) => fs::write(path, body).with_context(|| format!("writing {}", path.display())),
                None => {
                    print!("{body}");
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e:#}");
                return ExitCode::FAILURE;
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Tables { m_max, p_max } => cmd_tables(*m_max, *p_max),
        Command::VerifyDegree { m, p, trials } => cmd_verify_degree(*m, *p, *trials, cli.seed),
        Command::Wronskian { files } => cmd_wronskian(files),
        Command::Preimages { m, p, target } => cmd_preimages(*m, *p, target.as_deref(), cli.seed),
        Command::Sharpness { m, p, delta, spacing } => cmd_sharpness(*m, *p, delta, (*spacing).into(), cli.seed),
        Command::Pole { system, factors, gain } => cmd_pole(system.as_deref(), factors.as_deref(), gain),
        Command::SeedChain { m, p, sigma } => cmd_seed_chain(*m, *p, sigma.as_deref()),
    }
}

fn read_input(path: Option<&Path>) -> Result<String> {
    match path {
        Some(p) if p != Path::new("-") => fs::read_to_string(p).with_context(|| format!("reading {}", p.display())),
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).context("reading stdin")?;
            Ok(s)
        }
    }
}

fn parse_json<T: DeserializeOwned>(path: Option<&Path>) -> Result<T> {
    let raw = read_input(path)?;
    let name = path.map_or("stdin".to_string(), |p| p.display().to_string());
    serde_json::from_str(&raw).with_context(|| format!("parsing {name}"))
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn supported(m: usize, p: usize) -> Result<()> {
    if !matches!((m, p), (2, 2) | (3, 2) | (2, 3)) {
        bail!("(m, p) = ({m}, {p}) is not supported; use (2,2), (3,2) or (2,3)");
    }
    Ok(())
}

fn cmd_tables(m_max: usize, p_max: usize) -> Result<Outcome> {
    let table = build_table(m_max, p_max, &TableOptions::default())?;
    let ok = table.is_consistent();
    let mut text = table.to_text();
    for miss in table.mismatches() {
        text.push_str(&format!("mismatch: {miss}\n"));
    }
    text.push_str(&format!("{}\n", pass(ok)));
    Ok(Outcome { text, json: json!({ "table": table, "pass": ok }), ok })
}

fn report_lines(r: &PreimageReport) -> String {
    let mut s = String::new();
    for (j, sol) in r.solutions.iter().enumerate() {
        let k: Vec<String> = sol.kcoef.flatten().iter().map(|x| format!("{:.6e}", wronski::rational::to_f64(x))).collect();
        s.push_str(&format!("  #{} sign {:+} K = [{}]\n", j + 1, sol.sign, k.join(", ")));
    }
    s
}

fn cmd_verify_degree(m: usize, p: usize, trials: usize, seed: u64) -> Result<Outcome> {
    supported(m, p)?;
    let targets = random_targets(m, p, trials, seed);
    let opts = PreimageOptions { seed, ..PreimageOptions::default() };
    let rep = degree_signed_sum(m, p, &targets, &opts)?;
    let ok = rep.passed();
    let mut text = format!("verify-degree m={m} p={p} trials={trials} seed={seed}\n");
    for (t, r) in rep.reports.iter().enumerate() {
        let signs: Vec<String> = r.solutions.iter().map(|s| format!("{:+}", s.sign)).collect();
        text.push_str(&format!(
            "target {}: {}  real preimages {}  signs [{}]  signed sum {}\n",
            t + 1,
            r.target,
            r.count(),
            signs.join(" "),
            r.signed_sum
        ));
    }
    match rep.value {
        Some(v) => text.push_str(&format!("signed sum {v}, |sum| expected {}\n", rep.expected_magnitude)),
        None => text.push_str("signed sums differ between targets\n"),
    }
    text.push_str(&format!("{}\n", pass(ok)));
    Ok(Outcome { text, json: json!({ "report": rep, "pass": ok }), ok })
}

fn cmd_wronskian(files: &[PathBuf]) -> Result<Outcome> {
    let polys: Vec<RationalPoly> = if files.is_empty() {
        parse_json(None)?
    } else {
        files.iter().map(|f| parse_json(Some(f))).collect::<Result<_>>()?
    };
    if polys.is_empty() {
        bail!("no polynomials given");
    }
    let w = wronskian(&polys)?;
    Ok(Outcome { text: format!("{w}\n"), json: serde_json::to_value(&w)?, ok: true })
}

fn cmd_preimages(m: usize, p: usize, target: Option<&Path>, seed: u64) -> Result<Outcome> {
    supported(m, p)?;
    let w: RationalPoly = parse_json(target)?;
    let opts = PreimageOptions { seed, ..PreimageOptions::default() };
    let r = preimage_solve(m, p, &w, &opts)?;
    let mut text = format!("target {}\nreal preimages {} (d = {})  signed sum {}\n", r.target, r.count(), r.budget, r.signed_sum);
    if let Some(e) = r.exact_count {
        text.push_str(&format!("elimination count {e}\n"));
    }
    text.push_str(&report_lines(&r));
    Ok(Outcome { text, json: serde_json::to_value(&r)?, ok: true })
}

fn cmd_sharpness(m: usize, p: usize, delta: &str, spacing: ThornSpacing, seed: u64) -> Result<Outcome> {
    supported(m, p)?;
    let delta = parse_rational(delta).map_err(|e| anyhow::anyhow!("bad delta {:?}", e.0))?;
    let opts = PreimageOptions { seed, ..PreimageOptions::default() };
    let rep = sharpness_check(m, p, &delta, spacing, &opts)?;
    let ok = rep.passed();
    let mut text = format!(
        "thorn delta={} spacing={:?}\nreal preimages {} (d = {})  rankings bijective {}\n",
        rep.delta,
        spacing,
        rep.report.count(),
        rep.report.budget,
        rep.bijective
    );
    for (line, rank) in report_lines(&rep.report).lines().zip(&rep.rankings) {
        text.push_str(&format!("{line}  ranking {}\n", rank.as_deref().unwrap_or("none")));
    }
    text.push_str(&format!("{}\n", pass(ok)));
    Ok(Outcome { text, json: json!({ "report": rep, "pass": ok }), ok })
}

fn cmd_pole(system: Option<&Path>, factors: Option<&Path>, gain: &Path) -> Result<Outcome> {
    let k: GainMatrix = parse_json(Some(gain))?;
    let factors: Option<CoprimeFactors> = factors.map(|f| parse_json(Some(f))).transpose()?;
    let sys: LinearSystem = match (system, &factors) {
        (Some(s), _) => parse_json(Some(s))?,
        (None, Some(f)) => realize(f)?,
        (None, None) => bail!("give --system or --factors"),
    };
    let psi = pole_poly_state(&sys, &k)?;
    let (method, other) = match &factors {
        Some(f) => ("det(D - NK)", pole_poly_factored(f, &k)?),
        None => ("Faddeev-LeVerrier", pole_poly_leverrier(&sys, &k)?),
    };
    let agree = psi == other;
    let text = format!("psi_K = {psi}\nsecond method ({method}) agrees: {agree}\n{}\n", pass(agree));
    let json = json!({ "psi": psi, "second_method": method, "second": other, "agree": agree });
    Ok(Outcome { text, json, ok: agree })
}

fn parse_sigma(s: &str, m: usize, p: usize) -> Result<BallotSequence> {
    let entries = s
        .split(',')
        .map(|t| t.trim().parse::<u8>().with_context(|| format!("bad entry {t:?}")))
        .collect::<Result<Vec<_>>>()?;
    Ok(BallotSequence::new(entries, m, p)?)
}

fn rationals(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

fn cmd_seed_chain(m: usize, p: usize, sigma: Option<&str>) -> Result<Outcome> {
    let sigmas: Vec<BallotSequence> = match sigma {
        Some(s) => vec![parse_sigma(s, m, p)?],
        None => enumerate_ballot(m, p).collect(),
    };
    let schedule = squaring_schedule(m * p);
    let mut text = format!("squaring schedule a_1 = 1/8, a_(j+1) = a_j^2/16, m={m} p={p}\n");
    let mut items = Vec::new();
    let mut ok = true;
    for s in &sigmas {
        let mut q = BKVector::base(m, p, schedule[0].clone());
        let mut signs = vec![jacobi_delta(&q)?.det_sign];
        for (step, &i) in s.entries().iter().enumerate().skip(1) {
            q = apply_f(&q, i as usize, &schedule[step]).with_context(|| format!("sigma {s}, step {}", step + 1))?;
            signs.push(jacobi_delta(&q)?.det_sign);
        }
        let ratios: Vec<i32> = signs.windows(2).map(|w| w[0] * w[1]).collect();
        let law = ratios == sign_law_factors(s);
        let recovered = recover_sigma(&q);
        let rec_ok = recovered.as_ref() == Some(s);
        ok &= law && rec_ok;
        text.push_str(&format!(
            "sigma {s}: signs {:?}  sign law {}  recovered {}  {}\n",
            signs,
            law,
            recovered.as_ref().map_or("none".to_string(), ToString::to_string),
            pass(law && rec_ok)
        ));
        let rows: Vec<Vec<String>> = q.rows().iter().map(|r| rationals(r)).collect();
        items.push(json!({
            "sigma": s.to_string(),
            "coefficients": rows,
            "det_signs": signs,
            "sign_law": law,
            "recovered": recovered.map(|r| r.to_string()),
        }));
    }
    text.push_str(&format!("{}\n", pass(ok)));
    Ok(Outcome { text, json: json!({ "schedule": rationals(&schedule), "chains": items, "pass": ok }), ok })
}
