use clap::{Args, Parser, Subcommand};

use foamcalc::cli::{self, Command as CliCommand, DiagramInput, OutputFormat, RunConfig};

/// Exact calculator for the universal sl(2) link cohomology built from
/// webs and dotted foams.
#[derive(Parser)]
#[command(name = "foamcalc", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct InputArgs {
    /// PD code, e.g. "X+(1,2,3,4) X+(4,3,2,1)" or "U1"
    #[arg(long)]
    pd: Option<String>,
    /// Braid word, e.g. "s1 s2^-1 s1"
    #[arg(long)]
    braid: Option<String>,
    /// Strand count for --braid
    #[arg(long)]
    strands: Option<usize>,
}

#[derive(Args, Debug, Default)]
struct CommonArgs {
    /// Output format
    #[arg(long, default_value = "text", value_parser = ["text", "json"])]
    format: String,
    /// Seed for randomized stress commands (reserved; accepted for
    /// reproducible scripting)
    #[arg(long)]
    seed: Option<u64>,
    /// Worker thread count (overrides FOAMCALC_THREADS)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args, Debug)]
struct ParamArgs {
    /// Exact value of a, e.g. "0", "1", "-1/4", "2i", "1+2i"
    #[arg(long)]
    a: Option<String>,
    /// Exact value of h
    #[arg(long, name = "h")]
    h: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Bigraded (a = h = 0) or filtered homology at an exact specialization
    Homology {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Graded Euler characteristic of the cube complex
    Euler {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Quantum sl(2) polynomial by the state-sum oracle
    Skein {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Invariant of a closed surface in four-space
    Surface {
        /// Genus of the surface
        #[arg(long)]
        genus: u32,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Canonical-coloring predictions at a distinct-root specialization
    Colorings {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Evaluation of the closed dotted surface of a given genus
    FoamEval {
        /// Genus of the closed surface
        #[arg(long)]
        genus: u32,
        /// Number of dots on it
        #[arg(long, default_value_t = 0)]
        dots: u32,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Compare homology tables of two diagrams at one specialization
    InvarianceCheck {
        #[command(flatten)]
        input: InputArgs,
        /// PD code of the second diagram
        #[arg(long)]
        pd2: Option<String>,
        /// Braid word of the second diagram
        #[arg(long)]
        braid2: Option<String>,
        /// Strand count for --braid2
        #[arg(long)]
        strands2: Option<usize>,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn to_input(args: InputArgs) -> DiagramInput {
    DiagramInput {
        pd: args.pd,
        braid: args.braid,
        strands: args.strands,
    }
}

fn to_config(cli: Cli) -> RunConfig {
    let mut cfg = RunConfig {
        command: CliCommand::Euler,
        input: DiagramInput::default(),
        input2: DiagramInput::default(),
        a: None,
        h: None,
        genus: None,
        dots: 0,
        format: OutputFormat::Text,
        seed: None,
        threads: None,
    };
    let common = match cli.command {
        Command::Homology {
            input,
            params,
            common,
        } => {
            cfg.command = CliCommand::Homology;
            cfg.input = to_input(input);
            cfg.a = params.a;
            cfg.h = params.h;
            common
        }
        Command::Euler { input, common } => {
            cfg.command = CliCommand::Euler;
            cfg.input = to_input(input);
            common
        }
        Command::Skein { input, common } => {
            cfg.command = CliCommand::Skein;
            cfg.input = to_input(input);
            common
        }
        Command::Surface { genus, common } => {
            cfg.command = CliCommand::Surface;
            cfg.genus = Some(genus);
            common
        }
        Command::Colorings {
            input,
            params,
            common,
        } => {
            cfg.command = CliCommand::Colorings;
            cfg.input = to_input(input);
            cfg.a = params.a;
            cfg.h = params.h;
            common
        }
        Command::FoamEval {
            genus,
            dots,
            common,
        } => {
            cfg.command = CliCommand::FoamEval;
            cfg.genus = Some(genus);
            cfg.dots = dots;
            common
        }
        Command::InvarianceCheck {
            input,
            pd2,
            braid2,
            strands2,
            params,
            common,
        } => {
            cfg.command = CliCommand::InvarianceCheck;
            cfg.input = to_input(input);
            cfg.input2 = DiagramInput {
                pd: pd2,
                braid: braid2,
                strands: strands2,
            };
            cfg.a = params.a;
            cfg.h = params.h;
            common
        }
    };
    cfg.format = if common.format == "json" {
        OutputFormat::Json
    } else {
        OutputFormat::Text
    };
    cfg.seed = common.seed;
    cfg.threads = common.threads;
    cfg
}

fn main() {
    let cli = Cli::parse();
    let cfg = to_config(cli);
    match cli::run_with_threads(&cfg) {
        Ok(out) => println!("{out}"),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
