//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export returns a flat `Vec<f64>` so the page can read it as a
//! `Float64Array`. Diagrams are packed as `(dim, birth, persistence)`
//! triples; essential classes get persistence `+inf`.

use tdacp::synth::{self, GridStream};
use tdacp::{
    build_lower_star, build_rips, compute_persistence, Detector, DetectorConfig,
    HistogramModel, PersistenceDiagram, ReductionOptions, RipsConfig, ScalarGrid,
};
use wasm_bindgen::prelude::*;

fn pack(d: &PersistenceDiagram) -> Vec<f64> {
    let mut out = Vec::new();
    for p in &d.pairs {
        out.extend([p.dim as f64, p.birth, p.persistence]);
    }
    for dim in 0..2 {
        for &b in d.infinite(dim) {
            out.extend([dim as f64, b, f64::INFINITY]);
        }
    }
    out
}

fn grid_stream(rows: usize, cols: usize, frames: usize, change_at: usize, seed: u64) -> tdacp::Result<Vec<ScalarGrid>> {
    GridStream {
        seed,
        ..GridStream::new(rows, cols, frames, change_at)
    }
    .generate()
}

fn js(e: tdacp::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Pixel values of frame `t` of the synthetic bump stream, row-major.
#[wasm_bindgen]
pub fn stream_frame(rows: usize, cols: usize, frames: usize, change_at: usize, seed: u64, t: usize) -> Result<Vec<f64>, JsError> {
    frame_values(rows, cols, frames, change_at, seed, t).map_err(js)
}

fn frame_values(rows: usize, cols: usize, frames: usize, change_at: usize, seed: u64, t: usize) -> tdacp::Result<Vec<f64>> {
    let stream = grid_stream(rows, cols, frames, change_at, seed)?;
    let frame = stream
        .get(t)
        .ok_or_else(|| tdacp::Error::InvalidParameter(format!("frame {t} out of range")))?;
    Ok(frame.values().to_vec())
}

/// Lower-star diagram (dimensions 0 and 1) of a row-major image.
#[wasm_bindgen]
pub fn grid_diagram(values: Vec<f64>, rows: usize, cols: usize) -> Result<Vec<f64>, JsError> {
    grid_pairs(values, rows, cols).map_err(js)
}

fn grid_pairs(values: Vec<f64>, rows: usize, cols: usize) -> tdacp::Result<Vec<f64>> {
    let complex = build_lower_star(&ScalarGrid::new(rows, cols, values)?)?;
    Ok(pack(&compute_persistence(&complex, &ReductionOptions::default())?))
}

/// Noisy circle sample followed by its Rips diagram: `2n` coordinates, then
/// the packed diagram.
#[wasm_bindgen]
pub fn circle_diagram(n: usize, noise_sd: f64, eps_max: f64, seed: u64) -> Result<Vec<f64>, JsError> {
    circle_pairs(n, noise_sd, eps_max, seed).map_err(js)
}

fn circle_pairs(n: usize, noise_sd: f64, eps_max: f64, seed: u64) -> tdacp::Result<Vec<f64>> {
    let cloud = synth::sample_circles(n, &[[0.0, 0.0]], 1.0, noise_sd, seed)?;
    let complex = build_rips(&cloud, &RipsConfig::new(eps_max, 2)?)?;
    let d = compute_persistence(&complex, &ReductionOptions::default())?;
    let mut out: Vec<f64> = cloud.points().flatten().copied().collect();
    out.extend(pack(&d));
    Ok(out)
}

/// Scan statistic `chi_max` for every frame of a bump stream whose amplitude
/// doubles at `change_at` (`NaN` before the first candidate). Breakpoints
/// use ten bins trained on the first frame's dimension-0 diagram.
#[wasm_bindgen]
pub fn detection_trace(rows: usize, cols: usize, frames: usize, change_at: usize, window: usize, seed: u64) -> Result<Vec<f64>, JsError> {
    chi_trace(rows, cols, frames, change_at, window, seed).map_err(js)
}

fn chi_trace(rows: usize, cols: usize, frames: usize, change_at: usize, window: usize, seed: u64) -> tdacp::Result<Vec<f64>> {
    let diagrams = grid_stream(rows, cols, frames, change_at, seed)?
        .iter()
        .map(|g| tdacp::h0_union_find(&build_lower_star(g)?, true))
        .collect::<tdacp::Result<Vec<_>>>()?;
    let model = HistogramModel::train(&diagrams[..1], 10, 0, false)?;
    let dists: Vec<_> = diagrams.iter().map(|d| model.bin(d)).collect();
    let cfg = DetectorConfig::new(window, model.sigma().to_vec());
    let outcomes = Detector::run(cfg, &dists)?;
    Ok(outcomes.iter().map(|o| o.chi_max.unwrap_or(f64::NAN)).collect())
}
