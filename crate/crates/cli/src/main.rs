//! `hardyweak`: deterministic command-line reports on weak values in the
//! Hardy pair.
//!
//! Every subcommand computes its numbers from the library and prints them
//! in one of three formats. Output is byte-identical across identical
//! invocations: floats use a fixed 17-significant-digit encoding, JSON keys
//! are sorted, and nothing depends on wall-clock time unless `--timestamp`
//! is passed. JSON reports validate against `schema/report.schema.json`,
//! shipped in this crate's root.
//!
//! Exit codes: 0 on success, 2 on usage errors (bad flags, malformed
//! `--g-list`), 3 on domain errors (an orthogonal pre/post pair, which has
//! no weak values to report).

mod commands;
mod report;

use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};

use commands::{ConventionArg, ModeArg, ObservableArg, PairArg, Rendered};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Format {
    /// Report envelope with sorted keys and fixed float formatting.
    Json,
    /// Tab-separated table with a header row.
    Tsv,
    /// Prose and aligned tables.
    Text,
}

#[derive(Parser)]
#[command(
    name = "hardyweak",
    version,
    about = "Weak values in the Hardy pair: analytic tables, preparation comparison, and finite-strength pointer simulations",
    long_about = "Weak values in the Hardy pair: analytic tables, preparation comparison, and \
                  finite-strength pointer simulations.\n\nOutput is deterministic: identical \
                  invocations produce byte-identical stdout unless --timestamp is given. JSON \
                  reports validate against schema/report.schema.json in the crate root."
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Stamp the report with the current unix time (json and text only;
    /// breaks byte-level reproducibility on purpose).
    #[arg(long, global = true)]
    timestamp: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic weak-value table: four joint arm projectors plus marginals.
    Table {
        /// Which polarization letter encodes the overlapping (inner) arm.
        #[arg(long, value_enum, default_value_t = ConventionArg::VInner)]
        convention: ConventionArg,
    },
    /// State preparation: the which-path-flawed route, the Schmidt-form
    /// route, or both side by side.
    Prep {
        #[arg(long, value_enum, default_value_t = ModeArg::Compare)]
        mode: ModeArg,
    },
    /// Finite-strength Gaussian-pointer estimate of one observable's weak
    /// value, with extrapolation to zero coupling.
    Pointer {
        /// Observable: a polarization projector per photon, or the weighted
        /// polarization observable a1/a2 built from --gamma and --epsilon.
        #[arg(long, value_enum, default_value_t = ObservableArg::Pv1)]
        observable: ObservableArg,
        /// Weight on |V⟩⟨V| for a1/a2.
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        gamma: f64,
        /// Weight on |H⟩⟨H| for a1/a2.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        epsilon: f64,
        /// Pointer spread σ.
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        sigma: f64,
        /// Comma-separated couplings, positive and strictly decreasing, at
        /// least three.
        #[arg(long = "g-list", default_value = "0.2,0.1,0.05,0.025")]
        g_list: String,
    },
    /// Joint weak value of a polarization pair recovered from the
    /// two-pointer position correlator.
    Joint {
        #[arg(long, value_enum, default_value_t = PairArg::Vv)]
        pair: PairArg,
        /// Pointer spread σ (both pointers).
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        sigma: f64,
        /// Comma-separated couplings, positive and strictly decreasing, at
        /// least three.
        #[arg(long = "g-list", default_value = "0.2,0.1,0.05,0.025")]
        g_list: String,
    },
    /// Strong (collapsing) arm detection contrasted with the weak table.
    Strong,
    /// The vector observable built from the four joint projectors, shown to
    /// factor into single-photon readouts.
    A12 {
        /// Weight on |V⟩⟨V|.
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        gamma: f64,
        /// Weight on |H⟩⟨H|.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        epsilon: f64,
    },
    /// The interaction-free-measurement story with every number computed.
    Narrative {
        #[arg(long, value_enum, default_value_t = ConventionArg::VInner)]
        convention: ConventionArg,
    },
}

#[derive(Debug)]
enum CliError {
    /// Bad flag values; exits 2 like clap's own parse failures.
    Usage(String),
    /// The computation itself refused; exits 3.
    Domain(String),
}

impl CliError {
    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Domain(m) => m,
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 3,
        }
    }
}

impl From<hardyweak::Error> for CliError {
    fn from(e: hardyweak::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

fn parse_g_list(raw: &str) -> Result<Vec<f64>, CliError> {
    let mut values = Vec::new();
    for item in raw.split(',') {
        let item = item.trim();
        if item.is_empty() {
            return Err(CliError::Usage(
                "--g-list needs a comma-separated list of couplings".into(),
            ));
        }
        let g: f64 = item.parse().map_err(|_| {
            CliError::Usage(format!("--g-list entry {item:?} is not a number"))
        })?;
        values.push(g);
    }
    if values.len() < 3 {
        return Err(CliError::Usage(
            "--g-list needs at least three couplings for the order fit and extrapolation".into(),
        ));
    }
    if values.iter().any(|g| !g.is_finite() || *g <= 0.0) {
        return Err(CliError::Usage(
            "--g-list couplings must be positive and finite".into(),
        ));
    }
    if values.windows(2).any(|w| w[1] >= w[0]) {
        return Err(CliError::Usage(
            "--g-list couplings must be strictly decreasing".into(),
        ));
    }
    Ok(values)
}

fn check_sigma(sigma: f64) -> Result<f64, CliError> {
    if sigma.is_finite() && sigma > 0.0 {
        Ok(sigma)
    } else {
        Err(CliError::Usage("--sigma must be positive and finite".into()))
    }
}

fn check_finite(name: &str, value: f64) -> Result<f64, CliError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(CliError::Usage(format!("--{name} must be finite")))
    }
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn run(cli: &Cli) -> Result<String, CliError> {
    let rendered: Rendered = match &cli.command {
        Command::Table { convention } => commands::table(*convention)?,
        Command::Prep { mode } => commands::prep(*mode)?,
        Command::Pointer {
            observable,
            gamma,
            epsilon,
            sigma,
            g_list,
        } => {
            let gamma = check_finite("gamma", *gamma)?;
            let epsilon = check_finite("epsilon", *epsilon)?;
            let sigma = check_sigma(*sigma)?;
            let schedule = parse_g_list(g_list)?;
            commands::pointer(*observable, gamma, epsilon, sigma, &schedule)?
        }
        Command::Joint {
            pair,
            sigma,
            g_list,
        } => {
            let sigma = check_sigma(*sigma)?;
            let schedule = parse_g_list(g_list)?;
            commands::joint(*pair, sigma, &schedule)?
        }
        Command::Strong => commands::strong()?,
        Command::A12 { gamma, epsilon } => {
            let gamma = check_finite("gamma", *gamma)?;
            let epsilon = check_finite("epsilon", *epsilon)?;
            commands::a12(gamma, epsilon)?
        }
        Command::Narrative { convention } => commands::narrative(*convention)?,
    };

    let timestamp = cli.timestamp.then(unix_now);
    Ok(match cli.format {
        Format::Json => {
            let mut report = rendered.report;
            report.timestamp = timestamp;
            report.to_json()
        }
        Format::Tsv => rendered.tsv,
        Format::Text => match timestamp {
            None => rendered.text,
            Some(t) => format!("{}timestamp {t}\n", rendered.text),
        },
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(stdout) => {
            print!("{stdout}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
