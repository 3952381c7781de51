use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use markov_iso::bounds::{
    check_cheeger, check_chung, check_main_theorem, check_morris_peres, check_sweep_guarantee,
    gadget_c_supremum, gadget_log_chain, verify_suite, BoundReport, BoundSuite, BOUND_TOL,
};
use markov_iso::families::{
    cycle_graph, dumbbell_graph, ht_counterexample_graph, hypercube_graph, random_directed_graph,
    random_reversible_graph, scaling_scan,
};
use markov_iso::io::{
    emit_report, load_chain, render_bounds, write_output, write_scan_csv, AnalysisReport, ChainSummary,
    InputFormat, Provenance, ReportFormat, SpectralSummary, SweepReport,
};
use markov_iso::isoperimetry::{exact_cap, phi_p_exact, sweep_cut, sweep_levels};
use markov_iso::spectral::{lambda2_directed, lambda2_reversible};
use markov_iso::{MarkovChain, Result};

#[derive(Parser)]
#[command(name = "markov-iso", version, about = "Isoperimetric constants and spectral gaps of Markov chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Exact,
    Sweep,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Cycle,
    Hypercube,
    Dumbbell,
    HtCounterexample,
    Random,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScanFamily {
    HtCounterexample,
}

#[derive(Subcommand)]
enum Command {
    /// Spectral gap, cuts and bounds of one chain.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "edge-tsv")]
        format: InputFormat,
        #[arg(long, value_delimiter = ',', default_value = "0.5,1")]
        p: Vec<f64>,
        #[arg(long, value_enum, default_value = "both")]
        method: Method,
        /// Also compute Chung's directed Laplacian on reversible inputs.
        #[arg(long)]
        directed_spectral: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        report_format: ReportFormat,
    },
    /// Write a graph family as an edge-tsv file.
    Generate {
        #[arg(long, value_enum)]
        family: Family,
        /// Vertex count; dimension for `hypercube`, clique size for `dumbbell`.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directed edges for the `random` family.
        #[arg(long)]
        directed: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep-cut level sets of the truncated second eigenvector.
    Sweep {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "edge-tsv")]
        format: InputFormat,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        directed_spectral: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check every applicable bound; exit 1 if any fails.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "edge-tsv")]
        format: InputFormat,
        #[arg(long, value_enum, default_value = "all")]
        suite: BoundSuite,
    },
    /// Scaling table of the cubic-decay circulant family.
    Scan {
        #[arg(long, value_enum, default_value = "ht-counterexample")]
        family: ScanFamily,
        #[arg(long, value_delimiter = ',', default_value = "64,128,256,512,1024")]
        n_list: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Numerical estimates for the two sequence gadgets.
    Gadgets {
        #[arg(long, value_delimiter = ',', default_value = "0.51,0.6,0.75,1")]
        p: Vec<f64>,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_value = "0.01,0.25,0.9")]
        b0: Vec<f64>,
        #[arg(long, default_value_t = 1_000_000)]
        m_max: u64,
    },
}

fn source_of(path: &Path) -> String {
    path.display().to_string()
}

fn analyze(
    input: &Path,
    format: InputFormat,
    ps: &[f64],
    method: Method,
    directed_spectral: bool,
) -> Result<AnalysisReport> {
    let c = load_chain(input, format)?;
    let reversible = c.is_reversible_default();
    let rev_cert = reversible.then(|| lambda2_reversible(&c)).transpose()?;
    let dir_cert = (directed_spectral || !reversible)
        .then(|| lambda2_directed(&c))
        .transpose()?;
    let sweep_cert = dir_cert.as_ref().or(rev_cert.as_ref()).expect("one certificate");
    let mut cuts = Vec::new();
    let mut bounds = Vec::new();
    for &p in ps {
        if method != Method::Sweep {
            cuts.push(phi_p_exact(&c, p)?);
        }
        if method != Method::Exact {
            cuts.push(sweep_cut(&c, p, sweep_cert)?);
            if p > 0.5 {
                bounds.push(check_sweep_guarantee(&c, p, sweep_cert)?);
            }
        }
        if p > 0.5 && p <= 1.0 {
            if reversible {
                bounds.push(check_main_theorem(&c, p, false)?);
            }
            if dir_cert.is_some() {
                bounds.push(check_main_theorem(&c, p, true)?);
            }
        }
    }
    if reversible {
        bounds.extend(check_cheeger(&c)?);
    }
    if dir_cert.is_some() {
        bounds.extend(check_chung(&c)?);
    }
    if c.n() <= exact_cap() {
        bounds.push(check_morris_peres(&c, !reversible)?);
    }
    Ok(AnalysisReport {
        chain: ChainSummary::of(&c),
        spectral: rev_cert.iter().chain(dir_cert.iter()).map(SpectralSummary::from).collect(),
        cuts,
        bounds,
        provenance: Provenance::new(source_of(input), None),
    })
}

fn generate(family: Family, n: usize, density: f64, seed: u64, directed: bool) -> Result<String> {
    let g = match family {
        Family::Cycle => cycle_graph(n)?,
        Family::Hypercube => hypercube_graph(n)?,
        Family::Dumbbell => dumbbell_graph(n)?,
        Family::HtCounterexample => ht_counterexample_graph(n)?,
        Family::Random if directed => random_directed_graph(n, density, seed)?,
        Family::Random => random_reversible_graph(n, density, seed)?,
    };
    // reject families that would not load back as a chain
    if g.is_directed() {
        MarkovChain::from_directed(&g)?;
    } else {
        MarkovChain::from_undirected(&g)?;
    }
    Ok(markov_iso::io::graph_to_tsv(&g))
}

fn sweep(input: &Path, format: InputFormat, p: f64, directed_spectral: bool) -> Result<SweepReport> {
    let c = load_chain(input, format)?;
    let cert = if directed_spectral || !c.is_reversible_default() {
        lambda2_directed(&c)?
    } else {
        lambda2_reversible(&c)?
    };
    let levels = sweep_levels(&c, p, &cert)?;
    let best = sweep_cut(&c, p, &cert)?;
    let guarantee = (p > 0.5 && p <= 1.0)
        .then(|| check_sweep_guarantee(&c, p, &cert))
        .transpose()?;
    Ok(SweepReport {
        p,
        spectral: SpectralSummary::from(&cert),
        levels,
        best,
        guarantee,
        provenance: Provenance::new(source_of(input), None),
    })
}

fn gadgets(ps: &[f64], trials: usize, seed: u64, b0s: &[f64], m_max: u64) -> Result<String> {
    let mut reports = Vec::new();
    for &p in ps {
        let sup = gadget_c_supremum(p, trials, seed)?;
        reports.push(BoundReport::new(format!("c-supremum(p={p})"), sup, 1.0 / (2.0 * p - 1.0), BOUND_TOL));
    }
    let mut out = format!("sequence sum supremum over {trials} trials (seed {seed})\n");
    out.push_str(&render_bounds(&reports));
    out.push_str("\nlog chain\n");
    let mut rows = vec![["b0", "m", "value", "limit", "gap"].map(String::from).to_vec()];
    for &b0 in b0s {
        if !(b0 > 0.0 && b0 < 1.0) {
            return Err(markov_iso::Error::InvalidParameter(format!("b0 {b0} outside (0, 1)")));
        }
        let limit = 0.5 * (1.0 / b0).ln();
        let mut m = 1u64;
        loop {
            let v = gadget_log_chain(b0, m);
            rows.push(vec![
                b0.to_string(),
                m.to_string(),
                format!("{v:.16e}"),
                format!("{limit:.16e}"),
                format!("{:.16e}", limit - v),
            ]);
            if m >= m_max {
                break;
            }
            m = (m * 10).min(m_max);
        }
    }
    let widths: Vec<usize> = (0..5).map(|i| rows.iter().map(|r| r[i].len()).max().unwrap()).collect();
    for r in rows {
        let cells: Vec<String> = r.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
        out.push_str(&format!("  {}\n", cells.join("  ").trim_end()));
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Analyze {
            input,
            format,
            p,
            method,
            directed_spectral,
            out,
            report_format,
        } => {
            let report = analyze(&input, format, &p, method, directed_spectral)?;
            emit_report(&report, out.as_deref(), report_format)?;
        }
        Command::Generate {
            family,
            n,
            density,
            seed,
            directed,
            out,
        } => write_output(out.as_deref(), &generate(family, n, density, seed, directed)?)?,
        Command::Sweep {
            input,
            format,
            p,
            directed_spectral,
            out,
        } => {
            let report = sweep(&input, format, p, directed_spectral)?;
            let mut json = serde_json::to_string_pretty(&report)?;
            json.push('\n');
            write_output(out.as_deref(), &json)?;
        }
        Command::Verify { input, format, suite } => {
            let c = load_chain(&input, format)?;
            let reports = verify_suite(&c, suite)?;
            print!("{}", render_bounds(&reports));
            let failed = reports.iter().filter(|r| !r.holds).count();
            println!("{} of {} bounds hold", reports.len() - failed, reports.len());
            if failed > 0 {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Scan { family, n_list, out } => {
            let ScanFamily::HtCounterexample = family;
            write_scan_csv(&scaling_scan(&n_list)?, out.as_deref())?;
        }
        Command::Gadgets {
            p,
            trials,
            seed,
            b0,
            m_max,
        } => print!("{}", gadgets(&p, trials, seed, &b0, m_max)?),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
