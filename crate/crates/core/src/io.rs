//! Poling files, metadata sidecars and CSV tables.
//!
//! Poling positions and widths are written in metres with 12 significant
//! digits; other tables use Rust's shortest round-trip scientific notation.
//! Lines starting with `#` are comments and carry provenance.

use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algorithms::{DesignReport, TraceRow};
use crate::error::{Error, Result};
use crate::grating::{Domain, Grating, Orientation, PositionSum};
use crate::spectrum::{JointSpectrum, SchmidtResult, SweepRow};

pub const BOUNDARIES_HEADER: &str = "z_start_m,z_end_m,sign";
pub const WIDTHS_HEADER: &str = "width_m,sign";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolingFormat {
    CsvBoundaries,
    CsvWidths,
}

impl PolingFormat {
    pub fn id(self) -> &'static str {
        match self {
            PolingFormat::CsvBoundaries => "csv-boundaries",
            PolingFormat::CsvWidths => "csv-widths",
        }
    }

    fn header(self) -> &'static str {
        match self {
            PolingFormat::CsvBoundaries => BOUNDARIES_HEADER,
            PolingFormat::CsvWidths => WIDTHS_HEADER,
        }
    }
}

impl FromStr for PolingFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv-boundaries" => Ok(PolingFormat::CsvBoundaries),
            "csv-widths" => Ok(PolingFormat::CsvWidths),
            other => Err(Error::invalid("format", format!("unknown poling format `{other}`"))),
        }
    }
}

/// `# ` prefixed copy of every line of `text`.
pub fn comment_block(text: &str) -> String {
    let mut out = String::new();
    for line in text.lines() {
        if line.is_empty() {
            out.push_str("#\n");
        } else {
            let _ = writeln!(out, "# {line}");
        }
    }
    out
}

fn sign_str(o: Orientation) -> &'static str {
    match o {
        Orientation::Up => "1",
        Orientation::Down => "-1",
    }
}

/// Serializes a grating. `provenance` is emitted as a comment block first.
pub fn write_poling(grating: &Grating, format: PolingFormat, provenance: &str) -> String {
    let mut out = comment_block(provenance);
    out.push_str(format.header());
    out.push('\n');
    match format {
        PolingFormat::CsvWidths => {
            for d in grating.domains() {
                let _ = writeln!(out, "{:.11e},{}", d.width, sign_str(d.orientation));
            }
        }
        PolingFormat::CsvBoundaries => {
            let z = grating.boundaries();
            for (j, d) in grating.domains().iter().enumerate() {
                let _ = writeln!(out, "{:.11e},{:.11e},{}", z[j], z[j + 1], sign_str(d.orientation));
            }
        }
    }
    out
}

/// Width that moves the grating's position sum from `z_start` to `z_end`,
/// exactly when some float width can (almost always), else to the nearest
/// reachable position.
fn exact_width(pos: PositionSum, z_start: f64, z_end: f64) -> f64 {
    let mut w = z_end - z_start;
    for _ in 0..64 {
        let s = { pos }.add(w);
        if s == z_end {
            break;
        }
        w = if s < z_end { w.next_up() } else { w.next_down() };
    }
    w
}

/// Parses either poling format; the format is detected from the column
/// header.
pub fn read_poling(text: &str) -> Result<(Grating, PolingFormat)> {
    let mut format = None;
    let mut domains = Vec::new();
    let mut cursor = 0.0;
    let mut pos = PositionSum::default();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some(fmt) = format else {
            format = Some(match line {
                BOUNDARIES_HEADER => PolingFormat::CsvBoundaries,
                WIDTHS_HEADER => PolingFormat::CsvWidths,
                other => {
                    return Err(Error::PolingFormat {
                        line: line_no,
                        reason: format!("unrecognised header `{other}`"),
                    })
                }
            });
            continue;
        };
        let bad = |reason: String| Error::PolingFormat { line: line_no, reason };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let expected = if fmt == PolingFormat::CsvBoundaries { 3 } else { 2 };
        if fields.len() != expected {
            return Err(bad(format!("expected {expected} columns, found {}", fields.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("`{s}`: {e}")));
        let sign = fields[expected - 1]
            .parse::<i32>()
            .ok()
            .and_then(Orientation::from_sign)
            .ok_or_else(|| bad(format!("sign must be 1 or -1, got `{}`", fields[expected - 1])))?;
        let width = match fmt {
            PolingFormat::CsvWidths => num(fields[0])?,
            PolingFormat::CsvBoundaries => {
                let (a, b) = (num(fields[0])?, num(fields[1])?);
                if a != cursor {
                    return Err(bad(format!("domain starts at {a:e}, previous ended at {cursor:e}")));
                }
                if !(b > a) {
                    return Err(bad("domain end must exceed its start".into()));
                }
                cursor = b;
                exact_width(pos, a, b)
            }
        };
        if !(width > 0.0 && width.is_finite()) {
            return Err(bad(format!("width must be positive, got {width:e}")));
        }
        pos.add(width);
        domains.push(Domain::new(width, sign));
    }
    let format = format.ok_or(Error::PolingFormat {
        line: 0,
        reason: "no column header found".into(),
    })?;
    Ok((Grating::new(domains)?, format))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// JSON sidecar written next to a poling file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolingMetadata {
    pub tool: String,
    pub version: String,
    pub format: PolingFormat,
    /// sha256 of the poling file bytes.
    pub content_sha256: String,
    pub domains: usize,
    pub length_m: f64,
    pub algorithm: String,
    pub coherence_length_m: Option<f64>,
    pub domain_width_m: f64,
    pub iterations: u64,
    pub energy: Option<f64>,
    pub seed_energy: Option<f64>,
    pub ties: usize,
    /// Resolved run configuration.
    pub config: serde_json::Value,
}

impl PolingMetadata {
    /// Metadata for a grating of unknown origin; `source` names it.
    pub fn new(
        tool: &str,
        version: &str,
        format: PolingFormat,
        poling_csv: &str,
        grating: &Grating,
        source: &str,
        config: serde_json::Value,
    ) -> Self {
        let lc = config["design"]["coherence_length_m"].as_f64();
        Self {
            tool: tool.into(),
            version: version.into(),
            format,
            content_sha256: sha256_hex(poling_csv.as_bytes()),
            domains: grating.len(),
            length_m: grating.length(),
            algorithm: source.into(),
            coherence_length_m: lc,
            domain_width_m: grating.domains().first().map_or(0.0, |d| d.width),
            iterations: 0,
            energy: None,
            seed_energy: None,
            ties: 0,
            config,
        }
    }

    pub fn from_report(
        tool: &str,
        version: &str,
        format: PolingFormat,
        poling_csv: &str,
        report: &DesignReport,
        config: serde_json::Value,
    ) -> Self {
        Self {
            algorithm: report.algorithm.id().into(),
            coherence_length_m: Some(report.coherence_length),
            domain_width_m: report.domain_width,
            iterations: report.iterations,
            energy: report.energy,
            seed_energy: report.seed_energy,
            ties: report.ties.len(),
            ..Self::new(tool, version, format, poling_csv, &report.grating, "", config)
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("metadata is plain data");
        s.push('\n');
        s
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

/// `|f|` on the grid: first row is `omega_s\omega_i` followed by the idler
/// axis, each later row is a signal frequency followed by its magnitudes.
pub fn jsa_csv(js: &JointSpectrum, provenance: &str) -> String {
    let mut out = comment_block(provenance);
    out.push_str("omega_s\\omega_i");
    for wi in &js.idler {
        let _ = write!(out, ",{wi:e}");
    }
    out.push('\n');
    let n_i = js.idler.len();
    for (r, ws) in js.signal.iter().enumerate() {
        let _ = write!(out, "{ws:e}");
        for v in &js.values[r * n_i..(r + 1) * n_i] {
            let _ = write!(out, ",{:e}", v.norm());
        }
        out.push('\n');
    }
    out
}

pub fn schmidt_csv(s: &SchmidtResult, provenance: &str) -> String {
    let mut out = comment_block(provenance);
    let _ = writeln!(out, "# purity: {:e}\n# schmidt_number: {:e}", s.purity, s.schmidt_number);
    out.push_str("mode,coefficient\n");
    for (k, b) in s.coefficients.iter().enumerate() {
        let _ = writeln!(out, "{k},{b:e}");
    }
    out
}

pub fn sweep_csv(rows: &[SweepRow], provenance: &str) -> String {
    let mut out = comment_block(provenance);
    out.push_str("length_lc,length_m,domains,purity,bandwidth_rad_s,energy,status\n");
    for r in rows {
        let status = r.status.replace([',', '\n'], ";");
        let _ = writeln!(
            out,
            "{},{:e},{},{},{},{},{}",
            r.length_lc,
            r.length_m,
            r.domains,
            opt(r.purity),
            opt(r.bandwidth),
            opt(r.energy),
            status
        );
    }
    out
}

pub fn trace_csv(rows: &[TraceRow], provenance: &str) -> String {
    let mut out = comment_block(provenance);
    out.push_str("iteration,temperature,energy,accepted\n");
    for r in rows {
        let _ = writeln!(out, "{},{:e},{:e},{}", r.iteration, r.temperature, r.energy, u8::from(r.accepted));
    }
    out
}

/// Field amplitude at every domain boundary next to the target.
pub fn amplitude_csv(z: &[f64], amplitude: &[Complex64], target: &[Complex64], provenance: &str) -> String {
    let mut out = comment_block(provenance);
    out.push_str("boundary,z_m,re_a_m,im_a_m,re_target_m,im_target_m\n");
    for (j, ((z, a), t)) in z.iter().zip(amplitude).zip(target).enumerate() {
        let _ = writeln!(out, "{j},{z:e},{:e},{:e},{:e},{:e}", a.re, a.im, t.re, t.im);
    }
    out
}

pub fn pmf_csv(dk: &[f64], values: &[Complex64], provenance: &str) -> String {
    let mut out = comment_block(provenance);
    out.push_str("dk_rad_m,re_phi_m,im_phi_m,abs_phi_m\n");
    for (k, v) in dk.iter().zip(values) {
        let _ = writeln!(out, "{k:e},{:e},{:e},{:e}", v.re, v.im, v.norm());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn random_grating(seed: u64, n: usize) -> Grating {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let domains = (0..n)
            .map(|_| {
                let o = if rng.gen_bool(0.5) { Orientation::Up } else { Orientation::Down };
                Domain::new(rng.gen_range(1e-7..5e-5), o)
            })
            .collect();
        Grating::new(domains).unwrap()
    }

    #[test]
    fn round_trip_is_byte_identical() {
        for format in [PolingFormat::CsvWidths, PolingFormat::CsvBoundaries] {
            for seed in 0..5 {
                let g = random_grating(seed, 500);
                let a = write_poling(&g, format, "run: test\nseed: 1");
                let (back, detected) = read_poling(&a).unwrap();
                assert_eq!(detected, format);
                assert_eq!(back.orientations(), g.orientations());
                let b = write_poling(&back, format, "run: test\nseed: 1");
                assert_eq!(a, b);
            }
        }
    }

    proptest! {
        #[test]
        fn boundaries_survive_round_trip(widths in prop::collection::vec(1e-9f64..1e-3, 1..60)) {
            let g = Grating::new(widths.iter().map(|&w| Domain::new(w, Orientation::Up)).collect()).unwrap();
            for format in [PolingFormat::CsvBoundaries, PolingFormat::CsvWidths] {
                let text = write_poling(&g, format, "");
                let (back, _) = read_poling(&text).unwrap();
                prop_assert_eq!(write_poling(&back, format, ""), text);
                for (a, b) in back.boundaries().iter().zip(g.boundaries()) {
                    prop_assert!((a - b).abs() <= 1e-11 * g.length());
                }
            }
        }
    }

    #[test]
    fn widths_keep_twelve_digits() {
        let g = random_grating(9, 200);
        let (back, _) = read_poling(&write_poling(&g, PolingFormat::CsvWidths, "")).unwrap();
        assert_eq!(back.orientations(), g.orientations());
        for (a, b) in back.domains().iter().zip(g.domains()) {
            assert!((a.width - b.width).abs() <= 5e-12 * b.width);
        }
    }

    #[test]
    fn large_export_is_fast() {
        let g = random_grating(3, 10_000);
        let t = std::time::Instant::now();
        let text = write_poling(&g, PolingFormat::CsvBoundaries, "x");
        assert!(t.elapsed().as_secs_f64() < 1.0);
        assert_eq!(text.lines().count(), 10_002);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = "# c\nwidth_m,sign\n1e-6,1\n2e-6,0\n";
        match read_poling(bad) {
            Err(Error::PolingFormat { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        assert!(read_poling("a,b\n1,1\n").is_err());
        assert!(read_poling("# only comments\n").is_err());
        assert!(read_poling("width_m,sign\n-1e-6,1\n").is_err());
        let gap = "z_start_m,z_end_m,sign\n0e0,1e-6,1\n2e-6,3e-6,-1\n";
        assert!(read_poling(gap).is_err());
    }

    #[test]
    fn comment_block_prefixes_lines() {
        assert_eq!(comment_block("a = 1\n\nb"), "# a = 1\n#\n# b\n");
    }

    #[test]
    fn hash_is_stable() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
