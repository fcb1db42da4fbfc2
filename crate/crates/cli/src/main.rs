//! `acbm` command-line tool: match a rectified pair, evaluate against ground truth, generate
//! synthetic pairs and run the Monte Carlo false-alarm check.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use acbm::imgio::{self, DisparityGrid};
use acbm::patch_model::{compute_patch_basis, load_basis, save_basis};
use acbm::validation::{
    evaluate_grid, gen_noise_pair, gen_translated_pair, monte_carlo_false_alarms, GroundTruth, GtDecoding,
    StripeBand,
};
use acbm::{densify_median, AcbmError, AcbmParams, BackgroundModel, MatchMode, StereoMatcher};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "acbm", version, about = "A contrario block matching for rectified stereo pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Match a rectified pair and write the disparity map.
    Match(MatchArgs),
    /// Compare a disparity map with ground truth.
    Eval(EvalArgs),
    /// Learn a PCA block basis from an image and save it.
    SaveBasis(SaveBasisArgs),
    /// Write a pair of independent Gaussian noise images.
    SynthNoise(SynthNoiseArgs),
    /// Write a textured pair related by a horizontal translation.
    SynthShift(SynthShiftArgs),
    /// Count false alarms against random background blocks.
    McNfa(McArgs),
}

#[derive(Args, Debug, Clone, Copy)]
struct ModelArgs {
    /// Block side (odd).
    #[arg(long = "block", default_value_t = 9)]
    block_side: usize,
    /// Number of compared principal components.
    #[arg(long, default_value_t = 9)]
    components: usize,
    /// Number of probability levels.
    #[arg(long, default_value_t = 5)]
    quanta: usize,
    /// Largest accepted number of false alarms.
    #[arg(long, default_value_t = 1.0)]
    epsilon: f64,
}

impl ModelArgs {
    fn params(self, range: usize) -> AcbmParams {
        AcbmParams {
            block_side: self.block_side,
            components: self.components,
            quanta: self.quanta,
            range,
            epsilon: self.epsilon,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum ModeArg {
    /// Number of false alarms and self-similarity.
    Combined,
    /// Number of false alarms only.
    Acbm,
    /// Smallest SSD with the self-similarity test only.
    Ss,
}

#[derive(Args, Debug)]
struct MatchArgs {
    /// Reference image (PGM or PFM).
    left: PathBuf,
    /// Secondary image.
    right: PathBuf,
    /// Search range: disparities from -R to R.
    #[arg(long)]
    range: usize,
    #[command(flatten)]
    model: ModelArgs,
    /// Fill rejected pixels from their accepted neighbours.
    #[arg(long)]
    densify: bool,
    /// Precomputed block basis (see `save-basis`); learned from RIGHT otherwise.
    #[arg(long)]
    basis: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "combined")]
    mode: ModeArg,
    /// Disparity text output.
    #[arg(long, default_value = "disparity.tsv")]
    out: PathBuf,
    /// 8-bit PGM rendering of the map (rejected pixels are 255).
    #[arg(long)]
    viz: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Disparity text file.
    disp: PathBuf,
    /// Ground truth: PGM/PFM image or disparity text.
    gt: PathBuf,
    /// Valid-pixel mask; zero marks occluded or unknown pixels.
    #[arg(long)]
    mask: Option<PathBuf>,
    /// Ground truth image values per disparity unit.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Value subtracted from ground truth samples before scaling.
    #[arg(long, default_value_t = 0.0)]
    offset: f64,
    /// Flip the sign of decoded ground truth (left-view data stores x - x').
    #[arg(long)]
    negate: bool,
}

#[derive(Args, Debug)]
struct SaveBasisArgs {
    image: PathBuf,
    #[arg(long = "block", default_value_t = 9)]
    block_side: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct PairOut {
    #[arg(long)]
    out_left: PathBuf,
    #[arg(long)]
    out_right: PathBuf,
}

#[derive(Args, Debug)]
struct SynthNoiseArgs {
    #[arg(long, default_value_t = 256)]
    width: usize,
    #[arg(long, default_value_t = 256)]
    height: usize,
    #[arg(long, default_value_t = 20.0)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: PairOut,
}

#[derive(Args, Debug)]
struct SynthShiftArgs {
    #[arg(long, default_value_t = 256)]
    width: usize,
    #[arg(long, default_value_t = 256)]
    height: usize,
    #[arg(long, default_value_t = 2, allow_hyphen_values = true)]
    shift: i32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Rows `START:END` replaced by vertical stripes.
    #[arg(long, value_parser = parse_rows)]
    stripes: Option<(usize, usize)>,
    #[arg(long, default_value_t = 4)]
    period: usize,
    /// Ground truth disparity text.
    #[arg(long)]
    gt: Option<PathBuf>,
    #[command(flatten)]
    out: PairOut,
}

#[derive(Args, Debug)]
struct McArgs {
    /// Image used both as reference and as background model.
    image: PathBuf,
    #[arg(long)]
    range: usize,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    model: ModelArgs,
}

fn parse_rows(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(':').ok_or("expected START:END")?;
    let a = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b = b.trim().parse().map_err(|e| format!("{e}"))?;
    Ok((a, b))
}

fn exit_code(err: &AcbmError) -> u8 {
    match err {
        AcbmError::InvalidParameter(_) => 1,
        AcbmError::EigenNoConvergence { .. } | AcbmError::Overflow(_) => 3,
        _ => 2,
    }
}

fn run_match(args: MatchArgs) -> acbm::Result<()> {
    let left = imgio::load_gray(&args.left)?;
    let right = imgio::load_gray(&args.right)?;
    let params = args.model.params(args.range);
    params.validate()?;
    let matcher = match &args.basis {
        Some(path) => {
            let model = BackgroundModel::with_basis(&right, load_basis(path)?)?;
            StereoMatcher::with_model(&left, &right, model, params)?
        }
        None => StereoMatcher::new(&left, &right, params)?,
    };
    let mode = match args.mode {
        ModeArg::Combined => MatchMode::Combined,
        ModeArg::Acbm => MatchMode::AcbmOnly,
        ModeArg::Ss => MatchMode::SsOnly,
    };
    let mut map = matcher.with_mode(mode).run();
    if args.densify {
        map = densify_median(&map);
    }
    imgio::save_disparity(&map, &args.out, args.viz.as_deref())?;
    eprintln!(
        "{} of {} pixels accepted ({:.2}%)",
        map.accepted_count(),
        map.width() * map.height(),
        map.density_percent()
    );
    Ok(())
}

fn load_grid_or_image(path: &Path) -> acbm::Result<Result<DisparityGrid, acbm::GrayImage>> {
    match imgio::load_gray(path) {
        Ok(img) => Ok(Err(img)),
        Err(AcbmError::UnsupportedFormat { .. }) => imgio::load_disparity_text(path).map(Ok),
        Err(e) => Err(e),
    }
}

fn run_eval(args: EvalArgs) -> acbm::Result<()> {
    let disp = imgio::load_disparity_text(&args.disp)?;
    let mask = args.mask.as_ref().map(imgio::load_gray).transpose()?;
    let gt = match load_grid_or_image(&args.gt)? {
        Ok(grid) => GroundTruth::from_grid(&grid, mask.as_ref())?,
        Err(img) => {
            let decoding = GtDecoding { scale: args.scale, offset: args.offset, negate: args.negate };
            GroundTruth::from_image(&img, mask.as_ref(), decoding)?
        }
    };
    let report = evaluate_grid(&disp, &gt)?;
    println!("{}", report.record());
    println!("{}", report.human());
    Ok(())
}

fn run_save_basis(args: SaveBasisArgs) -> acbm::Result<()> {
    let image = imgio::load_gray(&args.image)?;
    save_basis(&compute_patch_basis(&image, args.block_side)?, &args.out)
}

fn run_synth_noise(args: SynthNoiseArgs) -> acbm::Result<()> {
    let (l, r) = gen_noise_pair(args.width, args.height, args.sigma, args.seed)?;
    imgio::save_gray(&l, &args.out.out_left)?;
    imgio::save_gray(&r, &args.out.out_right)
}

fn run_synth_shift(args: SynthShiftArgs) -> acbm::Result<()> {
    let band = args.stripes.map(|(a, b)| StripeBand { rows: a..b, period: args.period });
    let pair = gen_translated_pair(args.width, args.height, args.seed, args.shift, band.as_ref())?;
    imgio::save_gray(&pair.reference, &args.out.out_left)?;
    imgio::save_gray(&pair.secondary, &args.out.out_right)?;
    if let Some(path) = &args.gt {
        let truth = &pair.truth;
        let mut text = String::new();
        for y in 0..truth.height() {
            let row: Vec<String> = (0..truth.width())
                .map(|x| {
                    if truth.is_valid(x, y) {
                        format!("{}", truth.disparity(x, y))
                    } else {
                        "NaN".to_string()
                    }
                })
                .collect();
            text.push_str(&row.join("\t"));
            text.push('\n');
        }
        std::fs::write(path, text).map_err(|source| AcbmError::WriteFailure { path: path.clone(), source })?;
    }
    Ok(())
}

fn run_mc(args: McArgs) -> acbm::Result<()> {
    let image = imgio::load_gray(&args.image)?;
    let params = args.model.params(args.range);
    let model = BackgroundModel::learn(&image, params.block_side)?;
    let report = monte_carlo_false_alarms(&model, &image, &params, args.trials, args.seed)?;
    println!("mean\t{}\tstd_error\t{}\ttrials\t{}", report.mean(), report.std_error(), report.counts.len());
    let counts: Vec<String> = report.counts.iter().map(u64::to_string).collect();
    println!("counts\t{}", counts.join("\t"));
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Match(a) => run_match(a),
        Command::Eval(a) => run_eval(a),
        Command::SaveBasis(a) => run_save_basis(a),
        Command::SynthNoise(a) => run_synth_noise(a),
        Command::SynthShift(a) => run_synth_shift(a),
        Command::McNfa(a) => run_mc(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("acbm: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
