use std::fs;
use std::io::{self, Write};
use std::path::Path;

use rayon::prelude::*;
use tdacp::format::{self, TRACE_HEADER};
use tdacp::synth::{self, GridStream};
use tdacp::{
    build_lower_star, build_rips, calibrate_threshold, compute_persistence, Detector,
    DetectorConfig, Dimensions, EmpiricalDistribution, HistogramModel, PersistenceDiagram,
    ReductionOptions, RipsConfig,
};

use crate::input::{list_frames, parse_csv_points, parse_pgm, write_pgm16};
use crate::{
    CliError, DetectArgs, DiagramArgs, DimsArg, InputFormat, Mode, Scenario, SigmaArg,
    SimulateArgs, TrainArgs,
};

type CliResult<T> = Result<T, CliError>;

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

fn emit(output: Option<&Path>, text: &str) -> CliResult<()> {
    let res = match output {
        Some(p) => fs::write(p, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    };
    res.map_err(|e| CliError::data(format!("write failed: {e}")))
}

fn thread_pool() -> CliResult<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("TDACP_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("TDACP_THREADS={v} is not a thread count")))?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| CliError::data(format!("thread pool: {e}")))
}

enum EpsMax {
    Fixed(f64),
    Diameter,
}

fn one_frame(
    path: &Path,
    args: &DiagramArgs,
    mode: Mode,
    eps: Option<&EpsMax>,
    opts: &ReductionOptions,
) -> Result<PersistenceDiagram, String> {
    let complex = match args.format {
        InputFormat::CsvPoints => {
            let text = fs::read_to_string(path).map_err(|e| e.to_string())?;
            let cloud = parse_csv_points(&text)?;
            let eps_max = match eps {
                Some(EpsMax::Fixed(x)) => *x,
                // a zero diameter still needs a positive scale
                Some(EpsMax::Diameter) => cloud.diameter().max(f64::MIN_POSITIVE),
                None => return Err("--eps-max is required for rips".into()),
            };
            let cfg = RipsConfig::new(eps_max, args.max_dim).map_err(|e| e.to_string())?;
            build_rips(&cloud, &cfg)
        }
        InputFormat::PgmGrid => {
            let bytes = fs::read(path).map_err(|e| e.to_string())?;
            let grid = parse_pgm(&bytes)?;
            if mode == Mode::Rips {
                return Err("rips mode needs csv-points input".into());
            }
            build_lower_star(&grid)
        }
    }
    .map_err(|e| e.to_string())?;
    compute_persistence(&complex, opts).map_err(|e| e.to_string())
}

pub fn diagram(args: &DiagramArgs) -> CliResult<()> {
    let (ext, default_mode) = match args.format {
        InputFormat::CsvPoints => ("csv", Mode::Rips),
        InputFormat::PgmGrid => ("pgm", Mode::LowerStar),
    };
    let mode = args.mode.unwrap_or(default_mode);
    if mode == Mode::LowerStar && args.format == InputFormat::CsvPoints {
        return Err(CliError::usage("lower-star mode needs pgm-grid input"));
    }
    let eps = match args.eps_max.as_deref() {
        None => None,
        Some("auto") => Some(EpsMax::Diameter),
        Some(s) => match s.parse::<f64>() {
            Ok(x) if x > 0.0 && x.is_finite() => Some(EpsMax::Fixed(x)),
            _ => {
                return Err(CliError::usage(format!(
                    "--eps-max expects a positive number or `auto`, got {s}"
                )))
            }
        },
    };
    if mode == Mode::Rips && eps.is_none() {
        return Err(CliError::usage("--eps-max is required for rips"));
    }
    let opts = ReductionOptions {
        dims: match args.dims {
            DimsArg::Zero => Dimensions::H0,
            DimsArg::One => Dimensions::H1,
            DimsArg::Both => Dimensions::Both,
        },
        drop_zero_persistence: !args.keep_zero,
    };

    let frames = list_frames(&args.input, ext)?;
    let records: Vec<Result<String, String>> = thread_pool()?.install(|| {
        frames
            .par_iter()
            .enumerate()
            .map(|(t, path)| {
                let mut d = one_frame(path, args, mode, eps.as_ref(), &opts)?;
                d.frame_index = t;
                Ok(format::write_diagram(&d))
            })
            .collect()
    });

    let mut out = String::new();
    for (t, rec) in records.into_iter().enumerate() {
        let line = rec.map_err(|e| {
            CliError::data(format!("frame {t} ({}): {e}", frames[t].display()))
        })?;
        out.push_str(&line);
        out.push('\n');
    }
    emit(args.output.as_deref(), &out)
}

fn read_diagrams(path: &Path) -> CliResult<Vec<PersistenceDiagram>> {
    let diagrams = format::parse_diagrams(&read_text(path)?)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    if diagrams.is_empty() {
        return Err(CliError::data(format!("{}: no diagram records", path.display())));
    }
    Ok(diagrams)
}

pub fn train(args: &TrainArgs) -> CliResult<()> {
    let diagrams = read_diagrams(&args.diagrams)?;
    if args.train_prefix == 0 || args.train_prefix > diagrams.len() {
        return Err(CliError::data(format!(
            "training prefix {} needs between 1 and {} records",
            args.train_prefix,
            diagrams.len()
        )));
    }
    let prefix = &diagrams[..args.train_prefix];
    if let Some(d) = prefix.iter().find(|d| !d.has_dim(args.dim)) {
        return Err(CliError::data(format!(
            "record t={} has no dimension {} diagram",
            d.frame_index, args.dim
        )));
    }
    let mut model = HistogramModel::train(prefix, args.bins, args.dim, args.include_infinite)?;
    if args.sigma == SigmaArg::Invvar {
        let dists: Vec<EmpiricalDistribution> = prefix.iter().map(|d| model.bin(d)).collect();
        model = model.with_inverse_variance_sigma(&dists)?;
    }
    emit(args.output.as_deref(), &format::write_model(&model))
}

fn parse_lookback(s: Option<&str>, w: usize) -> CliResult<Option<usize>> {
    match s {
        None => Ok(Some(8 * w)),
        Some(v) if v.eq_ignore_ascii_case("inf") => Ok(None),
        Some(v) => v
            .parse()
            .map(Some)
            .map_err(|_| CliError::usage(format!("--lookback expects a frame count or `inf`, got {v}"))),
    }
}

pub fn detect(args: &DetectArgs) -> CliResult<()> {
    let diagrams = read_diagrams(&args.diagrams)?;
    let models = args
        .model
        .iter()
        .map(|p| {
            format::parse_model(&read_text(p)?)
                .map_err(|e| CliError::data(format!("{}: {e}", p.display())))
        })
        .collect::<CliResult<Vec<_>>>()?;
    for model in &models {
        if let Some(d) = diagrams.iter().find(|d| !d.has_dim(model.trained_dim())) {
            return Err(CliError::mismatch(format!(
                "model is trained on dimension {} but record t={} has no such diagram",
                model.trained_dim(),
                d.frame_index
            )));
        }
    }
    let stream: Vec<EmpiricalDistribution> = diagrams
        .iter()
        .map(|d| {
            let parts: Vec<_> = models.iter().map(|m| m.bin(d)).collect();
            if parts.len() == 1 {
                parts.into_iter().next().unwrap()
            } else {
                EmpiricalDistribution::concat(&parts)
            }
        })
        .collect();
    let sigma: Vec<f64> = models.iter().flat_map(|m| m.sigma().iter().copied()).collect();

    let mut cfg = DetectorConfig::new(args.window, sigma);
    cfg.lookback = parse_lookback(args.lookback.as_deref(), args.window)?;
    cfg.pool_raw_mass = args.pool_raw_mass;
    cfg.validate()?;

    cfg.threshold = match (args.threshold, args.calibrate) {
        (Some(b), _) => b,
        (None, Some(alpha)) => {
            let n = args.calib_prefix.unwrap_or(models[0].training_frames());
            if n < 4 * args.window || n > stream.len() {
                return Err(CliError::data(format!(
                    "calibration prefix of {n} frames must lie between 4w = {} and the {} available",
                    4 * args.window,
                    stream.len()
                )));
            }
            let horizon = args.horizon.unwrap_or(stream.len());
            let b = calibrate_threshold(&stream[..n], &cfg, alpha, horizon, args.replicates, args.seed)?;
            eprintln!("threshold={}", format::fmt_real(b));
            if b <= 0.0 {
                eprintln!("note: calibrated threshold is not positive; using the smallest positive value");
                f64::MIN_POSITIVE
            } else {
                b
            }
        }
        (None, None) => unreachable!("clap requires one of --threshold or --calibrate"),
    };

    let mut det = Detector::new(cfg)?;
    let mut trace = String::from(TRACE_HEADER);
    trace.push('\n');
    let mut k_at_alarm = None;
    for dist in stream {
        let o = det.step(dist)?;
        if o.alarm && k_at_alarm.is_none() {
            k_at_alarm = o.k_hat;
        }
        trace.push_str(&format::trace_row(&o));
        trace.push('\n');
    }
    emit(args.output.as_deref(), &trace)?;
    match (det.alarmed_at(), k_at_alarm) {
        (Some(t), Some(k)) => eprintln!("alarmed_at={t} k_hat={k}"),
        _ => eprintln!("alarmed_at=none"),
    }
    Ok(())
}

fn create_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::data(format!("{}: {e}", dir.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

/// Per-frame seed for scenarios that draw each frame independently.
fn frame_seed(seed: u64, t: usize) -> u64 {
    seed ^ (t as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

pub fn simulate(args: &SimulateArgs) -> CliResult<()> {
    match args.scenario {
        Scenario::GridStream {
            rows,
            cols,
            frames,
            change_at,
            pre_amp,
            post_amp,
            noise_sd,
            seed,
            ref out,
        } => {
            let stream = GridStream {
                pre_amp,
                post_amp,
                noise_sd,
                seed,
                ..GridStream::new(rows, cols, frames, change_at)
            }
            .generate()?;
            // one global scale so intensities stay comparable across frames
            let (lo, hi) = stream
                .iter()
                .flat_map(|g| g.values().iter().copied())
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
            let span = hi - lo;
            create_dir(out)?;
            for (t, grid) in stream.iter().enumerate() {
                let pixels: Vec<u16> = grid
                    .values()
                    .iter()
                    .map(|&v| if span > 0.0 { ((v - lo) / span * 65535.0).round() as u16 } else { 0 })
                    .collect();
                write_file(
                    &out.join(format!("frame_{:04}.pgm", t + 1)),
                    &write_pgm16(rows, cols, &pixels),
                )?;
            }
            eprintln!("wrote {frames} frames to {}, change_at={change_at}", out.display());
        }
        Scenario::Circles {
            points,
            frames,
            change_at,
            radius,
            noise_sd,
            seed,
            ref out,
        } => {
            if change_at < 2 || change_at > frames {
                return Err(CliError::usage(format!(
                    "change_at must lie in 2..={frames}, got {change_at}"
                )));
            }
            let one = [[0.0, 0.0]];
            let two = [[-1.5 * radius, 0.0], [1.5 * radius, 0.0]];
            create_dir(out)?;
            for t in 0..frames {
                let centers: &[[f64; 2]] = if t + 1 < change_at { &one } else { &two };
                let cloud = synth::sample_circles(points, centers, radius, noise_sd, frame_seed(seed, t))?;
                let mut text = String::new();
                for p in cloud.points() {
                    let row: Vec<String> = p.iter().map(|x| x.to_string()).collect();
                    text.push_str(&row.join(","));
                    text.push('\n');
                }
                write_file(&out.join(format!("frame_{:04}.csv", t + 1)), text.as_bytes())?;
            }
            eprintln!("wrote {frames} frames to {}, change_at={change_at}", out.display());
        }
    }
    Ok(())
}
