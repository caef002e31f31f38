/*!
genfun
======

Command-line front end for generalized-function algebras built from weighted
sequence spaces.

# Usage

```bash
$ genfun norm --seq '{"gamma": 2}' --scale '{"kind": "log"}'
$ genfun classify --seq seq.json --scale scale.json --format text
$ genfun assoc --flavor weak --s 0.5 --demo delta-pairing
$ genfun demo-delta2 --csv traces/
$ genfun temperate-check --spec '{"phi": "exp"}'
$ genfun aclassify --seq '{"gamma": 3}' --scale-kind polynomial
$ genfun convert-scale --asym polynomial --m 2
```

Any JSON argument is either inline JSON or a path to a file.

Exit codes: 0 holds or classified, 1 fails, 2 usage error or malformed
input, 3 inconclusive.
*/

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};
use genfun::commands::{self, AssocArgs, Settings};
use genfun::format::load_json;
use genfun::Report;

#[derive(Parser)]
#[command(name = "genfun", version, about = "Ultranorms, generalized numbers and generalized functions on the circle")]
struct Cli {
    /// Ladder n = 2^1 .. 2^E for numeric checks.
    #[arg(long, global = true, default_value_t = 20, value_parser = clap::value_parser!(u32).range(4..=60))]
    ladder_max_exp: u32,
    /// Window agreement tolerance of the limsup estimator (log space).
    #[arg(long, global = true, default_value_t = 0.05)]
    tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write traces as CSV files into this directory.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleKindArg {
    Polynomial,
    ExpIter,
    InfraExp,
}

impl ScaleKindArg {
    fn name(self) -> &'static str {
        match self {
            ScaleKindArg::Polynomial => "polynomial",
            ScaleKindArg::ExpIter => "exp-iter",
            ScaleKindArg::InfraExp => "infra-exp",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Flavor {
    Plain,
    S,
    Strong,
    StrongS,
    Weak,
    StrongWeak,
}

impl Flavor {
    fn name(self) -> &'static str {
        match self {
            Flavor::Plain => "plain",
            Flavor::S => "s",
            Flavor::Strong => "strong",
            Flavor::StrongS => "strong-s",
            Flavor::Weak => "weak",
            Flavor::StrongWeak => "strong-weak",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Exact and estimated ultranorm of a sequence.
    Norm {
        #[arg(long)]
        seq: String,
        #[arg(long, default_value = r#"{"kind":"log"}"#)]
        scale: String,
    },
    /// Moderate / negligible classification.
    Classify {
        #[arg(long)]
        seq: String,
        #[arg(long, default_value = r#"{"kind":"log"}"#)]
        scale: String,
    },
    /// Association of two generalized numbers or functions.
    Assoc {
        #[arg(long, value_enum)]
        flavor: Flavor,
        #[arg(long, allow_hyphen_values = true)]
        s: Option<f64>,
        #[arg(long)]
        lhs: Option<String>,
        #[arg(long)]
        rhs: Option<String>,
        #[arg(long)]
        scale: Option<String>,
        /// `default` or a JSON list of coefficient families.
        #[arg(long)]
        testset: Option<String>,
        #[arg(long, value_parser = ["delta-pairing"])]
        demo: Option<String>,
    },
    /// Fourier label and embedding norms of a coefficient family.
    Embed {
        #[arg(long)]
        coeffs: String,
        #[arg(long, default_value = r#"{"kind":"log"}"#)]
        scale: String,
    },
    /// The embedded delta and its square, with traces.
    #[command(name = "demo-delta2")]
    DemoDelta2 {
        #[arg(long)]
        scale: Option<String>,
    },
    /// Is a map temperate, so that it extends to the algebra?
    TemperateCheck {
        #[arg(long)]
        spec: String,
        #[arg(long, default_value = "colombeau", value_parser = ["colombeau", "power-rows", "egorov", "log"])]
        family: String,
    },
    /// Classification against an asymptotic scale.
    Aclassify {
        #[arg(long)]
        seq: String,
        #[arg(long, value_enum)]
        scale_kind: ScaleKindArg,
    },
    /// The weight scale r_n = 1/|log a_m(n)| of an asymptotic scale.
    ConvertScale {
        #[arg(long, value_enum)]
        asym: ScaleKindArg,
        #[arg(long, allow_hyphen_values = true)]
        m: Option<i64>,
        #[arg(long)]
        sigma: Option<f64>,
    },
}

fn run(cli: &Cli) -> Result<Report> {
    let st = Settings { ladder_max_exp: cli.ladder_max_exp, tol: cli.tol };
    let opt = |a: &Option<String>| a.as_deref().map(load_json).transpose();
    match &cli.command {
        Command::Norm { seq, scale } => commands::norm(&load_json(seq)?, &load_json(scale)?, &st),
        Command::Classify { seq, scale } => commands::classify(&load_json(seq)?, &load_json(scale)?, &st),
        Command::Assoc { flavor, s, lhs, rhs, scale, testset, demo } => {
            let testset = match testset.as_deref() {
                Some("default") => Some(serde_json::Value::from("default")),
                other => other.map(load_json).transpose()?,
            };
            let args = AssocArgs {
                flavor: flavor.name().into(),
                s: *s,
                lhs: opt(lhs)?,
                rhs: opt(rhs)?,
                scale: opt(scale)?,
                testset,
                demo: demo.clone(),
            };
            commands::assoc(&args, &st)
        }
        Command::Embed { coeffs, scale } => commands::embed(&load_json(coeffs)?, &load_json(scale)?, &st),
        Command::DemoDelta2 { scale } => commands::demo_delta2(opt(scale)?.as_ref(), &st),
        Command::TemperateCheck { spec, family } => commands::temperate_check(&load_json(spec)?, family, &st),
        Command::Aclassify { seq, scale_kind } => commands::aclassify(&load_json(seq)?, scale_kind.name(), &st),
        Command::ConvertScale { asym, m, sigma } => commands::convert_scale(asym.name(), *m, *sigma, &st),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if let Some(dir) = &cli.csv {
        if let Err(e) = report.write_traces(dir) {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    }
    let out = match cli.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    print!("{out}");
    ExitCode::from(report.outcome.exit_code() as u8)
}
