use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pst_core::cayley::Variant;
use pst_core::error::Error;
use pst_core::grp::Family;
use pst_core::pipeline::{
    run_cayley, run_orbital, Run, RunOptions, DEFAULT_ENUMERATION_BOUND, DEFAULT_SIM_BOUND,
};
use pst_core::report::{edge_list, write_file, SpectrumSection, EXIT_CERTIFICATE, EXIT_USAGE};

#[derive(Parser, Debug)]
#[command(
    name = "pst",
    version,
    about = "Perfect state transfer certificates for Cayley and orbital graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certify a Cayley graph on GL(2,q), GU(2,q) or SL(2,q).
    Verify {
        /// gl, gu or sl
        #[arg(long)]
        family: Family,
        #[command(flatten)]
        common: Common,
        /// standard, or t-alt for the q=3 set of non-central elements of order 2, 3, 4 or 6
        #[arg(long, default_value = "standard")]
        variant: Variant,
    },
    /// Certify the orbital graph on GL(2,q²)/GL(2,q), q ≡ 3 (mod 4).
    Orbital {
        #[command(flatten)]
        common: Common,
    },
    /// Write one artifact of a run to the output directory.
    Export {
        /// gl, gu, sl or orbital
        target: String,
        #[command(flatten)]
        common: Common,
        /// standard, or t-alt for the q=3 set of non-central elements of order 2, 3, 4 or 6
        #[arg(long, default_value = "standard")]
        variant: Variant,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Field order, an odd prime power.
    #[arg(long)]
    q: u32,
    /// Largest group order enumerated explicitly.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_BOUND)]
    brute_force_bound: u64,
    /// Largest vertex count simulated.
    #[arg(long, default_value_t = DEFAULT_SIM_BOUND)]
    sim_bound: usize,
    /// Directory for report.json, spectrum.csv and graph.edges.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Output on stdout (text by default) or the exported artifact (json by default).
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
    Edges,
}

impl Common {
    fn options(&self) -> RunOptions {
        RunOptions {
            enumeration_bound: self.brute_force_bound,
            sim_bound: self.sim_bound,
            full_pairs_bound: DEFAULT_SIM_BOUND,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_code(&e) as u8)
        }
    }
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::NonIntegralEigenvalue { .. } | Error::NonIntegral { .. } => EXIT_CERTIFICATE,
        _ => EXIT_USAGE,
    }
}

fn execute(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Verify {
            family,
            common,
            variant,
        } => {
            let run = run_cayley(family, common.q, variant, &common.options())?;
            emit(&run, &common, Format::Text)
        }
        Command::Orbital { common } => {
            let run = run_orbital(common.q, &common.options())?;
            emit(&run, &common, Format::Text)
        }
        Command::Export {
            target,
            common,
            variant,
        } => {
            let run = match target.as_str() {
                "orbital" => run_orbital(common.q, &common.options())?,
                other => {
                    let family: Family = other.parse().map_err(|_| {
                        Error::Unsupported(format!("unknown export target {other:?}"))
                    })?;
                    run_cayley(family, common.q, variant, &common.options())?
                }
            };
            let format = common.format.unwrap_or(Format::Json);
            if format == Format::Text {
                return Err(Error::Unsupported(
                    "export formats are edges, csv and json".into(),
                ));
            }
            let dir = common.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
            std::fs::create_dir_all(&dir)?;
            let (name, body) = artifact(&run, format)?;
            write_file(&dir.join(name), &body)?;
            Ok(run.report.exit_code())
        }
    }
}

fn artifact(run: &Run, format: Format) -> Result<(&'static str, String), Error> {
    Ok(match format {
        Format::Json => ("report.json", run.report.to_json()?),
        Format::Csv => ("spectrum.csv", run.report.spectrum_csv()?),
        Format::Edges => {
            let g = run.graph.as_ref().ok_or_else(|| {
                Error::Unsupported(
                    "graph was not built explicitly; raise --brute-force-bound".into(),
                )
            })?;
            ("graph.edges", edge_list(g))
        }
        Format::Text => ("summary.txt", summary(run)),
    })
}

fn emit(run: &Run, common: &Common, default: Format) -> Result<i32, Error> {
    if let Some(dir) = &common.out_dir {
        std::fs::create_dir_all(dir)?;
        for f in [Format::Json, Format::Csv, Format::Edges] {
            if f == Format::Edges && run.graph.is_none() {
                continue;
            }
            let (name, body) = artifact(run, f)?;
            write_file(&dir.join(name), &body)?;
        }
    }
    let (_, body) = artifact(run, common.format.unwrap_or(default))?;
    print!("{body}");
    Ok(run.report.exit_code())
}

fn summary(run: &Run) -> String {
    let r = &run.report;
    let c = &r.certificate;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{}: {} vertices, valency {}",
        c.graph, c.vertices, c.valency
    );
    let mut distinct: Vec<(i64, u64)> = Vec::new();
    let rows: Vec<(i64, u64)> = match &r.spectrum {
        SpectrumSection::Cayley(t) => t.rows.iter().map(|x| (x.theta, x.multiplicity)).collect(),
        SpectrumSection::Orbital(o) => o.rows.iter().map(|x| (x.theta, x.multiplicity)).collect(),
    };
    for (t, m) in rows {
        match distinct.iter_mut().find(|(u, _)| *u == t) {
            Some(e) => e.1 += m,
            None => distinct.push((t, m)),
        }
    }
    distinct.sort_unstable_by_key(|x| std::cmp::Reverse(x.0));
    let spec: Vec<String> = distinct.iter().map(|(t, m)| format!("{t}^{m}")).collect();
    let _ = writeln!(s, "spectrum: {}", spec.join(" "));
    if let Some(o) = &r.orbital {
        let _ = writeln!(
            s,
            "d-part eigenvalues divisible by 4: {}",
            o.d_part_divisible_by_four
        );
    }
    let _ = writeln!(
        s,
        "certificate: {} (integral {}, a = {}, mod-4 {}, parity {}, g = {}, tau = pi/{} = {:.12}, connected {})",
        if c.valid { "valid" } else { "INVALID" },
        c.integral,
        c.a,
        c.mod4_condition,
        c.parity_condition,
        c.g,
        c.g,
        c.tau,
        c.connected
    );
    let _ = writeln!(s, "transfer: {}", c.transfer_rule);
    match (&r.simulation, c.fidelity_deviation) {
        (Some(sim), Some(dev)) => {
            let _ = writeln!(
                s,
                "simulation: max |1 - fidelity| = {dev:.3e} over {} pairs at tau and 3 tau",
                sim.pairs
            );
        }
        _ => {
            let _ = writeln!(s, "simulation: not run (character sums only)");
        }
    }
    let passed = r.cross_checks.iter().filter(|x| x.passed).count();
    let _ = writeln!(s, "cross-checks: {passed}/{} passed", r.cross_checks.len());
    for x in r.cross_checks.iter().filter(|x| !x.passed) {
        let _ = writeln!(s, "  FAILED {}: {}", x.name, x.detail);
    }
    for e in &r.errata {
        let _ = writeln!(s, "erratum: {e}");
    }
    for n in &r.notes {
        let _ = writeln!(s, "note: {n}");
    }
    s
}
