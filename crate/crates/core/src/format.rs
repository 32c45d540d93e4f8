//! Text formats: diagram records, model files and detector traces.
//!
//! All reals are written in scientific notation with 17 significant digits,
//! which round-trips every `f64` exactly.
//!
//! Diagram file: one JSON object per line,
//!
//! ```text
//! {"t": 0, "dim0": {"finite": [[birth, persistence], ...], "infinite": [birth, ...]}, "dim1": {...}, "max_value": x}
//! ```
//!
//! where a `dimN` key is present only if that dimension was computed.
//!
//! Model file: a JSON object with keys `version`, `M`, `breakpoints`,
//! `sigma`, `trained_dim`, `training_frames` and optionally
//! `include_infinite`.

use std::fmt::Write as _;

use serde::Deserialize;

use crate::detect::StepOutcome;
use crate::error::{Error, Result};
use crate::summarize::HistogramModel;
use crate::types::{PersistenceDiagram, PersistencePair};

pub const MODEL_VERSION: u32 = 1;
pub const TRACE_HEADER: &str = "t,chi_max,k_hat,alarm,alarmed_at";

/// Scientific notation with 17 significant digits.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_reals(out: &mut String, xs: impl Iterator<Item = f64>) {
    out.push('[');
    for (i, x) in xs.enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&fmt_real(x));
    }
    out.push(']');
}

/// One diagram as a single line (no trailing newline).
pub fn write_diagram(d: &PersistenceDiagram) -> String {
    let mut out = String::new();
    let _ = write!(out, "{{\"t\": {}", d.frame_index);
    for dim in 0..2 {
        if !d.has_dim(dim) {
            continue;
        }
        let _ = write!(out, ", \"dim{dim}\": {{\"finite\": [");
        for (i, p) in d.finite(dim).enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "[{}, {}]", fmt_real(p.birth), fmt_real(p.persistence));
        }
        out.push_str("], \"infinite\": ");
        write_reals(&mut out, d.infinite(dim).iter().copied());
        out.push('}');
    }
    let _ = write!(out, ", \"max_value\": {}}}", fmt_real(d.max_value));
    out
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DimRecord {
    finite: Vec<[f64; 2]>,
    infinite: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DiagramRecord {
    t: usize,
    dim0: Option<DimRecord>,
    dim1: Option<DimRecord>,
    max_value: Option<f64>,
}

pub fn parse_diagram(line: &str) -> Result<PersistenceDiagram> {
    let rec: DiagramRecord =
        serde_json::from_str(line).map_err(|e| Error::Parse(e.to_string()))?;
    let mut d = PersistenceDiagram {
        frame_index: rec.t,
        ..Default::default()
    };
    for (dim, part) in [rec.dim0, rec.dim1].into_iter().enumerate() {
        let Some(part) = part else { continue };
        d.computed[dim] = true;
        d.pairs.extend(part.finite.iter().map(|&[birth, persistence]| PersistencePair {
            dim: dim as u8,
            birth,
            persistence,
        }));
        d.infinite_births[dim] = part.infinite;
    }
    d.max_value = rec.max_value.unwrap_or_else(|| {
        d.pairs
            .iter()
            .map(PersistencePair::death)
            .chain(d.infinite_births.iter().flatten().copied())
            .fold(0.0, f64::max)
    });
    Ok(d)
}

/// Parses a whole diagram file; blank lines are skipped. Errors carry the
/// 1-based line number.
pub fn parse_diagrams(text: &str) -> Result<Vec<PersistenceDiagram>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_diagram(l).map_err(|e| Error::Parse(format!("line {}: {e}", i + 1))))
        .collect()
}

pub fn write_model(m: &HistogramModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{{");
    let _ = writeln!(out, "  \"version\": {MODEL_VERSION},");
    let _ = writeln!(out, "  \"M\": {},", m.bins());
    out.push_str("  \"breakpoints\": ");
    write_reals(&mut out, m.breakpoints().iter().copied());
    out.push_str(",\n  \"sigma\": ");
    write_reals(&mut out, m.sigma().iter().copied());
    let _ = writeln!(out, ",");
    let _ = writeln!(out, "  \"trained_dim\": {},", m.trained_dim());
    let _ = writeln!(out, "  \"training_frames\": {},", m.training_frames());
    let _ = writeln!(out, "  \"include_infinite\": {}", m.include_infinite());
    out.push_str("}\n");
    out
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelRecord {
    version: u32,
    #[serde(rename = "M")]
    bins: usize,
    breakpoints: Vec<f64>,
    sigma: Vec<f64>,
    trained_dim: usize,
    training_frames: usize,
    #[serde(default)]
    include_infinite: bool,
}

pub fn parse_model(text: &str) -> Result<HistogramModel> {
    let rec: ModelRecord = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if rec.version != MODEL_VERSION {
        return Err(Error::Parse(format!("unsupported model version {}", rec.version)));
    }
    if rec.sigma.len() != rec.bins {
        return Err(Error::DimensionMismatch {
            expected: rec.bins,
            got: rec.sigma.len(),
        });
    }
    HistogramModel::from_parts(
        rec.breakpoints,
        rec.sigma,
        rec.trained_dim,
        rec.training_frames,
        rec.include_infinite,
    )
}

/// One trace row. Missing values are left empty.
pub fn trace_row(o: &StepOutcome) -> String {
    let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
    format!(
        "{},{},{},{},{}",
        o.t,
        o.chi_max.map(fmt_real).unwrap_or_default(),
        opt(o.k_hat),
        u8::from(o.alarm),
        opt(o.alarmed_at)
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_real(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_real(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_real(-2.5e-300), "-2.5000000000000000e-300");
    }

    #[test]
    fn diagram_line_layout() {
        let d = PersistenceDiagram {
            frame_index: 2,
            pairs: vec![PersistencePair {
                dim: 0,
                birth: 1.0,
                persistence: 2.0,
            }],
            infinite_births: [vec![0.0], vec![]],
            computed: [true, false],
            max_value: 3.0,
        };
        assert_eq!(
            write_diagram(&d),
            "{\"t\": 2, \"dim0\": {\"finite\": [[1.0000000000000000e0, 2.0000000000000000e0]], \
             \"infinite\": [0.0000000000000000e0]}, \"max_value\": 3.0000000000000000e0}"
        );
        assert_eq!(parse_diagram(&write_diagram(&d)).unwrap(), d);
    }

    #[test]
    fn malformed_lines_report_position() {
        let err = parse_diagrams("{\"t\": 0, \"dim0\": {\"finite\": [], \"infinite\": []}}\n\nnot json\n")
            .unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn model_rejects_bad_shapes() {
        let text = "{\"version\": 1, \"M\": 3, \"breakpoints\": [1.0], \"sigma\": [1, 1, 1], \
                    \"trained_dim\": 0, \"training_frames\": 1}";
        assert!(parse_model(text).is_err());
        let text = "{\"version\": 2, \"M\": 2, \"breakpoints\": [1.0], \"sigma\": [1, 1], \
                    \"trained_dim\": 0, \"training_frames\": 1}";
        assert!(parse_model(text).is_err());
        let text = "{\"version\": 1, \"M\": 2, \"breakpoints\": [1.0], \"sigma\": [1, 1], \
                    \"trained_dim\": 0, \"training_frames\": 1}";
        assert_eq!(parse_model(text).unwrap().bins(), 2);
    }

    #[test]
    fn trace_rows() {
        let o = StepOutcome {
            t: 3,
            chi_max: None,
            k_hat: None,
            alarm: false,
            alarmed_at: None,
        };
        assert_eq!(trace_row(&o), "3,,,0,");
        let o = StepOutcome {
            t: 9,
            chi_max: Some(0.5),
            k_hat: Some(4),
            alarm: true,
            alarmed_at: Some(9),
        };
        assert_eq!(trace_row(&o), "9,5.0000000000000000e-1,4,1,9");
    }

    proptest! {
        #[test]
        fn model_round_trip_is_bit_exact(
            start in -1e6f64..1e6,
            gaps in prop::collection::vec(1e-12f64..1e3, 1..12),
            sigma_seed in prop::collection::vec(0.0f64..1e9, 13),
            dim in 0usize..2,
            frames in 1usize..1000,
        ) {
            let mut b = start;
            let breakpoints: Vec<f64> = gaps.iter().map(|g| { b += g; b }).collect();
            let sigma = sigma_seed[..breakpoints.len() + 1].to_vec();
            prop_assume!(breakpoints.windows(2).all(|w| w[0] < w[1]));
            let m = HistogramModel::from_parts(breakpoints, sigma, dim, frames, false).unwrap();
            let back = parse_model(&write_model(&m)).unwrap();
            prop_assert_eq!(
                back.breakpoints().iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
                m.breakpoints().iter().map(|x| x.to_bits()).collect::<Vec<_>>()
            );
            prop_assert_eq!(back, m);
        }

        #[test]
        fn diagram_round_trip_is_bit_exact(
            points in prop::collection::vec((any::<f64>(), any::<f64>(), 0u8..2), 0..20),
            inf in prop::collection::vec(-1e300f64..1e300, 0..4),
        ) {
            let pairs: Vec<_> = points
                .iter()
                .filter(|(b, p, _)| b.is_finite() && p.is_finite())
                .map(|&(birth, persistence, dim)| PersistencePair { dim, birth, persistence })
                .collect();
            let d = PersistenceDiagram {
                frame_index: 7,
                pairs,
                infinite_births: [inf.clone(), inf],
                computed: [true, true],
                max_value: 1.5,
            };
            let back = parse_diagram(&write_diagram(&d)).unwrap();
            let bits = |d: &PersistenceDiagram| {
                d.pairs.iter().map(|p| (p.dim, p.birth.to_bits(), p.persistence.to_bits())).collect::<Vec<_>>()
            };
            let mut a = bits(&d);
            let mut b = bits(&back);
            a.sort_unstable();
            b.sort_unstable();
            prop_assert_eq!(a, b);
            prop_assert_eq!(back.infinite_births, d.infinite_births);
        }
    }
}
