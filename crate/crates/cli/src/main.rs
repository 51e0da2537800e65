use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use trackbench_cli::service::ServiceState;
use trackbench_cli::{cmd_benchmark, cmd_process_track, cmd_simulate, cmd_suggest_baseline, CliError};

#[derive(Parser)]
#[command(name = "trackbench", version, about = "Score driven trajectories filmed by an overhead camera")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract the reference path from a twin track image.
    ProcessTrack {
        image: PathBuf,
        /// Output JSON path; prints to stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 128)]
        threshold: u8,
        /// The track is darker than the background.
        #[arg(long)]
        dark: bool,
        #[arg(long, default_value_t = 512)]
        resample_count: usize,
    },
    /// Run a full trial from a benchmark config.
    Benchmark {
        #[arg(short, long)]
        config: PathBuf,
    },
    /// Write a synthetic fixture directory from a scenario file.
    Simulate {
        #[arg(short, long)]
        config: PathBuf,
        /// Fixture directory; overrides `output_dir` in the scenario.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Serve the keypoint calibration API.
    Calibrate {
        #[arg(long, required = true)]
        serve: bool,
        #[arg(long, default_value_t = IpAddr::V4(Ipv4Addr::LOCALHOST))]
        host: IpAddr,
        #[arg(long, default_value_t = 8765)]
        port: u16,
        /// Camera frame to open at startup (needs --twin).
        #[arg(long, requires = "twin")]
        camera: Option<PathBuf>,
        /// Twin image to open at startup (needs --camera).
        #[arg(long, requires = "camera")]
        twin: Option<PathBuf>,
    },
    /// Print a suggested baseline for a reference path file.
    SuggestBaseline { path: PathBuf },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::ProcessTrack {
            image,
            output,
            threshold,
            dark,
            resample_count,
        } => {
            println!("{}", cmd_process_track(&image, output.as_deref(), threshold, !dark, resample_count)?);
        }
        Command::Benchmark { config } => println!("{}", cmd_benchmark(&config)?),
        Command::Simulate { config, output } => println!("{}", cmd_simulate(&config, output.as_deref())?),
        Command::SuggestBaseline { path } => println!("{}", cmd_suggest_baseline(&path)?),
        Command::Calibrate {
            serve: _,
            host,
            port,
            camera,
            twin,
        } => {
            let state = ServiceState::new();
            if let (Some(camera), Some(twin)) = (camera, twin) {
                state.start(&camera, &twin).map_err(|e| CliError::data(e.to_string()))?;
            }
            let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::data(e.to_string()))?;
            runtime
                .block_on(trackbench_cli::service::serve(SocketAddr::new(host, port), state))
                .map_err(|e| CliError::data(e.to_string()))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
