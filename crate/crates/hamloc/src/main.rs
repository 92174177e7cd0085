//! The `hamloc` binary: exact verification and unimodality certificates
//! for Hamiltonian circle-action fixed point data.

use std::io::{ErrorKind, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hamloc::cli::{
    cmd_betti, cmd_certify, cmd_find_class, cmd_gen, cmd_integrate, cmd_validate, CliError,
    Format, GenRecipe, RunReport,
};
use hamloc::exactalg::Rational;
use hamloc::generators::Mutation;

#[derive(Parser)]
#[command(
    name = "hamloc",
    version,
    about = "Exact localization checks and unimodality certificates for fixed point data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FormatArg {
    /// Output format.
    #[arg(long, value_parser = ["text", "json"], default_value = "text")]
    format: String,
}

impl FormatArg {
    fn get(&self) -> Format {
        match self.format.as_str() {
            "json" => Format::Json,
            _ => Format::Text,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run every validator the input supports.
    Validate {
        /// Dataset JSON file.
        data: PathBuf,
        /// Cohomology model JSON file to validate against the dataset.
        #[arg(long)]
        model: Option<PathBuf>,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Run the unimodality procedure and emit the certificate.
    Certify {
        /// Dataset JSON file.
        data: PathBuf,
        /// Cohomology model JSON file.
        #[arg(long)]
        model: PathBuf,
        /// Rank-check the restriction maps at every admissible degree.
        #[arg(long)]
        mechanism: bool,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Print the Betti profile.
    Betti {
        /// Dataset JSON file.
        data: PathBuf,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Integrate a class file against a dataset.
    Integrate {
        /// Dataset JSON file.
        data: PathBuf,
        /// Class JSON file.
        #[arg(long = "class")]
        class: PathBuf,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Find a model-basis class of the given degree vanishing on points.
    #[command(name = "find-class")]
    FindClass {
        /// Dataset JSON file.
        data: PathBuf,
        /// Cohomology model JSON file.
        #[arg(long)]
        model: PathBuf,
        /// Cohomological degree 2k of the class.
        #[arg(long)]
        degree: usize,
        /// Fixed point id the class must vanish on; repeatable.
        #[arg(long = "vanish")]
        vanish: Vec<String>,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Generate datasets and models.
    Gen {
        #[command(subcommand)]
        recipe: GenCommand,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    /// Weighted circle action on projective space.
    Cpn {
        /// Comma-separated distinct integer weights, e.g. 0,1,2.
        #[arg(long, value_delimiter = ',', required = true)]
        weights: Vec<i64>,
        /// Also write the cohomology model file.
        #[arg(long)]
        with_model: bool,
        /// Output base name; files are BASE.json and BASE.model.json.
        #[arg(long)]
        out: Option<String>,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Product of two generated datasets.
    Product {
        #[arg(long)]
        left_data: String,
        #[arg(long)]
        left_model: String,
        #[arg(long)]
        right_data: String,
        #[arg(long)]
        right_model: String,
        /// Positive rational scale for the right factor's moment values.
        #[arg(long, default_value = "1")]
        scale: String,
        /// Also write the cohomology model file.
        #[arg(long)]
        with_model: bool,
        /// Output base name.
        #[arg(long)]
        out: Option<String>,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Copy a dataset with one weight or moment value altered.
    Corrupt {
        #[arg(long)]
        data: String,
        /// Weight mutation as id:slot:value, e.g. e0:1:3.
        #[arg(long, conflicts_with_all = ["moment", "identity"])]
        weight: Option<String>,
        /// Moment mutation as id:value, e.g. e1:5/2.
        #[arg(long, conflicts_with = "identity")]
        moment: Option<String>,
        /// Apply no change (the trivial control).
        #[arg(long)]
        identity: bool,
        /// Output base name.
        #[arg(long)]
        out: Option<String>,
        #[command(flatten)]
        format: FormatArg,
    },
}

fn parse_weight_mutation(spec: &str) -> Result<Mutation, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || CliError::Input(format!("--weight expects id:slot:value, got {spec}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let slot = parts[1].parse().map_err(|_| bad())?;
    let value = parts[2].parse().map_err(|_| bad())?;
    Ok(Mutation::Weight { id: parts[0].to_string(), slot, value })
}

fn parse_moment_mutation(spec: &str) -> Result<Mutation, CliError> {
    let bad = || CliError::Input(format!("--moment expects id:value, got {spec}"));
    let (id, value) = spec.split_once(':').ok_or_else(bad)?;
    let value: Rational = value.parse().map_err(|_| bad())?;
    Ok(Mutation::Moment { id: id.to_string(), value })
}

fn run(command: Command) -> Result<(RunReport, Format), CliError> {
    match command {
        Command::Validate { data, model, format } => {
            Ok((cmd_validate(&data, model.as_deref())?, format.get()))
        }
        Command::Certify { data, model, mechanism, format } => {
            Ok((cmd_certify(&data, &model, mechanism)?, format.get()))
        }
        Command::Betti { data, format } => Ok((cmd_betti(&data)?, format.get())),
        Command::Integrate { data, class, format } => {
            Ok((cmd_integrate(&data, &class)?, format.get()))
        }
        Command::FindClass { data, model, degree, vanish, format } => {
            Ok((cmd_find_class(&data, &model, degree, &vanish)?, format.get()))
        }
        Command::Gen { recipe } => {
            let (recipe, format) = match recipe {
                GenCommand::Cpn { weights, with_model, out, format } => {
                    (GenRecipe::Cpn { weights, with_model, out }, format.get())
                }
                GenCommand::Product {
                    left_data,
                    left_model,
                    right_data,
                    right_model,
                    scale,
                    with_model,
                    out,
                    format,
                } => {
                    let scale: Rational = scale
                        .parse()
                        .map_err(|_| CliError::Input(format!("--scale expects a rational, got {scale}")))?;
                    (
                        GenRecipe::Product {
                            left_data,
                            left_model,
                            right_data,
                            right_model,
                            scale,
                            with_model,
                            out,
                        },
                        format.get(),
                    )
                }
                GenCommand::Corrupt { data, weight, moment, identity, out, format } => {
                    let mutation = match (&weight, &moment, identity) {
                        (Some(spec), None, false) => parse_weight_mutation(spec)?,
                        (None, Some(spec), false) => parse_moment_mutation(spec)?,
                        (None, None, true) => Mutation::Identity,
                        _ => {
                            return Err(CliError::Input(
                                "corrupt needs exactly one of --weight, --moment, --identity"
                                    .to_string(),
                            ))
                        }
                    };
                    (GenRecipe::Corrupt { data, mutation, out }, format.get())
                }
            };
            Ok((cmd_gen(&recipe)?, format))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok((report, format)) => {
            let stdout = std::io::stdout();
            if let Err(e) = writeln!(stdout.lock(), "{}", report.rendered(format)) {
                if e.kind() != ErrorKind::BrokenPipe {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            }
            ExitCode::from(u8::try_from(report.exit_code).unwrap_or(1))
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
