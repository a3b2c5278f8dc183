//! `foakit`: first-order ambisonics tools for scripted pipelines.
//!
//! Exit status: 0 on success, 1 on usage errors, 2 on malformed or
//! unreadable data.

mod audio;
mod codes;
mod curate;
mod eval;
mod info;
mod manifest;
mod output;
mod parse;
mod saliency;

use clap::{Parser, Subcommand};

const AFTER_HELP: &str = "\
Conventions: channels are W, X, Y, Z with W = s/√2. Directions are
AZIMUTH,ELEVATION in radians (pass --degrees for degrees); azimuth runs
counter-clockwise from +x (front) toward +y (left), elevation up from the
horizon. JSON outputs carry a schema_version field.";

#[derive(Parser, Debug)]
#[command(name = "foakit", version, about = "First-order ambisonics toolkit", after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Pan a mono WAV to a 4-channel FOA WAV.
    Encode(audio::EncodeArgs),
    /// Beam a 4-channel FOA WAV to mono toward a direction.
    Decode(audio::DecodeArgs),
    /// Rotate the sound field of a 4-channel FOA WAV.
    Rotate(audio::RotateArgs),
    /// Directional energy map of a FOA WAV on a sphere grid.
    EnergyMap(audio::EnergyMapArgs),
    /// CC and AUC between generated and ground-truth FOA at three time granularities.
    EvalSpatial(eval::EvalSpatialArgs),
    /// FAD, channel-averaged FAD or KLD over pre-extracted feature tensors.
    ///
    /// Decode both FOA clips toward the ground-truth direction with `decode`,
    /// extract embeddings or class probabilities with an external model, save
    /// them as tensors and evaluate them here.
    EvalSemantic(eval::EvalSemanticArgs),
    /// Patchwise visual energy maps from patch embeddings.
    PatchEnergy(saliency::PatchEnergyArgs),
    /// Reorganize RVQ code files between raw and pattern layouts.
    Pattern(codes::PatternArgs),
    /// Run the guided step-by-step generation harness.
    Generate(codes::GenerateArgs),
    /// Filter raw FOA recordings into 5 s training clips.
    Curate(curate::CurateArgs),
    /// Describe a WAV, tensor, code or table-predictor file.
    Info(info::InfoArgs),
}

fn run(cli: Cli) -> output::CliResult {
    match cli.command {
        Command::Encode(a) => audio::encode(a),
        Command::Decode(a) => audio::decode(a),
        Command::Rotate(a) => audio::rotate(a),
        Command::EnergyMap(a) => audio::energy_map(a),
        Command::EvalSpatial(a) => eval::eval_spatial(a),
        Command::EvalSemantic(a) => eval::eval_semantic(a),
        Command::PatchEnergy(a) => saliency::patch_energy(a),
        Command::Pattern(a) => codes::pattern(a),
        Command::Generate(a) => codes::generate(a),
        Command::Curate(a) => curate::curate(a),
        Command::Info(a) => info::info(a),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            std::process::exit(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Err(f) = run(cli) {
        eprintln!("error: {f}");
        std::process::exit(f.exit_code());
    }
}
