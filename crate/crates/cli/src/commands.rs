use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};

use qpm_core::algorithms::{
    anneal_widths, design as run_design, design_domain_by_domain, target_pmf_grid, Algorithm, DesignReport, TraceRow,
};
use qpm_core::grating::{Grating, PmfGrid};
use qpm_core::io::{
    amplitude_csv, jsa_csv, pmf_csv, read_poling, schmidt_csv, sha256_hex, sweep_csv, trace_csv, write_poling,
    PolingMetadata,
};
use qpm_core::spectrum::{evaluate_purity, purity_vs_length};

use crate::config::{config_error, RunConfig};
use crate::{PartialFailure, TOOL, VERSION};

/// Comment header shared by every CSV artifact.
fn provenance(cfg: &RunConfig, command: &str, extra: &[(&str, String)]) -> String {
    let mut s = format!("tool: {TOOL} {VERSION}\ncommand: {command}\n");
    for (k, v) in extra {
        s.push_str(&format!("{k}: {v}\n"));
    }
    s.push_str("config:\n");
    s.push_str(&cfg.to_toml());
    s
}

fn write(cfg: &RunConfig, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(&cfg.out_dir).with_context(|| format!("creating {}", cfg.out_dir.display()))?;
    let path = cfg.out_dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

fn design_with_trace(cfg: &RunConfig) -> Result<(DesignReport, Vec<TraceRow>)> {
    let d = &cfg.resolved.design;
    let params = cfg.params();
    if d.algorithm == Algorithm::Annealed {
        let target = params.target(d.domains)?;
        let seed = design_domain_by_domain(&target, d.domains, params.lc)?;
        let grid = target_pmf_grid(&target, params.lc, &params.anneal)?;
        let out = anneal_widths(&seed.grating, &grid, &params.anneal)?;
        Ok((out.report, out.trace))
    } else {
        Ok((run_design(d.algorithm, d.domains, &params)?, Vec::new()))
    }
}

fn load_poling(path: &Path) -> Result<(Grating, String)> {
    let text = fs::read_to_string(path)
        .map_err(|e| config_error("poling", format!("cannot read {}: {e}", path.display())))?;
    let (grating, _) = read_poling(&text)?;
    Ok((grating, sha256_hex(text.as_bytes())))
}

fn write_poling_pair(cfg: &RunConfig, csv: &str, meta: PolingMetadata) -> Result<()> {
    write(cfg, "poling.csv", csv)?;
    write(cfg, "poling.json", &meta.to_json())
}

pub fn design(cfg: &RunConfig) -> Result<()> {
    let (report, trace) = design_with_trace(cfg)?;
    let d = &cfg.resolved.design;
    let format = cfg.resolved.output.format;
    let prov = provenance(cfg, "design", &[]);

    let csv = write_poling(&report.grating, format, &prov);
    let meta = PolingMetadata::from_report(TOOL, VERSION, format, &csv, &report, cfg.to_json());
    write_poling_pair(cfg, &csv, meta)?;

    // amplitude at the design mismatch pi/lc, next to the Gaussian target
    let lc = d.coherence_length_m;
    let dk = PI / lc;
    let target = cfg.params().target(d.domains)?;
    let z = report.grating.boundaries();
    let amplitude = report.grating.amplitude_trace(dk);
    let goal = z
        .iter()
        .map(|&zj| target.eval(zj.min(target.length())))
        .collect::<qpm_core::Result<Vec<_>>>()?;
    write(cfg, "amplitude.csv", &amplitude_csv(&z, &amplitude, &goal, &prov))?;

    let merged = report.grating.merged();
    let axis = PmfGrid::axis(dk, 8.0 * PI / merged.length(), 513);
    let values = merged.pmf_many(&axis);
    write(cfg, "pmf.csv", &pmf_csv(&axis, &values, &prov))?;

    if cfg.resolved.output.trace && !trace.is_empty() {
        write(cfg, "anneal_trace.csv", &trace_csv(&trace, &prov))?;
    }

    let mut line = format!(
        "algorithm={} domains={} length_m={:e} coherence_length_m={:e}",
        report.algorithm,
        report.grating.len(),
        report.grating.length(),
        report.coherence_length
    );
    if let (Some(e), Some(e0)) = (report.energy, report.seed_energy) {
        line.push_str(&format!(" energy={e:e} seed_energy={e0:e} iterations={}", report.iterations));
    }
    println!("{line}");
    Ok(())
}

pub fn purity(cfg: &RunConfig, poling: Option<&Path>) -> Result<()> {
    let (grating, source) = match poling {
        Some(p) => {
            let (g, hash) = load_poling(p)?;
            (g, format!("poling file sha256 {hash}"))
        }
        None => (design_with_trace(cfg)?.0.grating, format!("designed ({})", cfg.resolved.design.algorithm)),
    };
    let report = evaluate_purity(
        &grating.merged(),
        &cfg.model,
        &cfg.resolved.process,
        &cfg.resolved.spectrum,
    )?;
    let prov = provenance(
        cfg,
        "purity",
        &[
            ("grating", source),
            ("pump_bandwidth_rad_s", format!("{:e}", report.bandwidth)),
            ("pmf_width_rad_s", format!("{:e}", report.pmf_width)),
        ],
    );
    write(cfg, "jsa.csv", &jsa_csv(&report.jsa, &prov))?;
    write(cfg, "schmidt.csv", &schmidt_csv(&report.schmidt, &prov))?;
    println!("purity={} bandwidth_rad_s={}", report.purity, report.bandwidth);
    Ok(())
}

pub fn sweep(cfg: &RunConfig) -> Result<()> {
    let r = &cfg.resolved;
    let rows = purity_vs_length(
        r.design.algorithm,
        &r.sweep.lengths_lc,
        &cfg.params(),
        &cfg.model,
        &r.process,
        &r.spectrum,
    )?;
    write(cfg, "sweep.csv", &sweep_csv(&rows, &provenance(cfg, "sweep", &[])))?;
    for row in &rows {
        match row.purity {
            Some(p) => println!(
                "length_lc={} purity={} bandwidth_rad_s={}",
                row.length_lc,
                p,
                row.bandwidth.unwrap_or(f64::NAN)
            ),
            None => println!("length_lc={} status=failed", row.length_lc),
        }
    }
    let failed: Vec<String> = rows
        .iter()
        .filter(|r| r.purity.is_none())
        .map(|r| format!("{} lc: {}", r.length_lc, r.status))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(PartialFailure(format!("{} sweep rows failed ({})", failed.len(), failed.join("; "))).into())
    }
}

pub fn export(cfg: &mut RunConfig, poling: Option<&Path>, format: Option<&str>) -> Result<()> {
    if let Some(f) = format {
        cfg.resolved.output.format = f
            .parse()
            .map_err(|_| config_error("format", format!("unknown poling format `{f}` (csv-boundaries, csv-widths)")))?;
    }
    let cfg = &*cfg;
    let format = cfg.resolved.output.format;
    let (csv, meta) = match poling {
        Some(p) => {
            let (g, hash) = load_poling(p)?;
            let prov = provenance(cfg, "export", &[("source_sha256", hash)]);
            let csv = write_poling(&g, format, &prov);
            let meta = PolingMetadata::new(TOOL, VERSION, format, &csv, &g, "imported", cfg.to_json());
            (csv, meta)
        }
        None => {
            let (report, _) = design_with_trace(cfg)?;
            let csv = write_poling(&report.grating, format, &provenance(cfg, "export", &[]));
            let meta = PolingMetadata::from_report(TOOL, VERSION, format, &csv, &report, cfg.to_json());
            (csv, meta)
        }
    };
    println!("format={} domains={} sha256={}", format.id(), meta.domains, meta.content_sha256);
    write_poling_pair(cfg, &csv, meta)
}

pub fn gvm_report(cfg: &RunConfig) -> Result<()> {
    let spec = &cfg.resolved.process;
    let g = cfg.model.gvm_report(spec)?;
    let dk0 = cfg.model.delta_k0(spec)?;
    let lc = cfg.resolved.design.coherence_length_m;
    let doc = serde_json::json!({
        "tool": TOOL,
        "version": VERSION,
        "k1_pump_s_per_m": g.k1_pump,
        "k1_signal_s_per_m": g.k1_signal,
        "k1_idler_s_per_m": g.k1_idler,
        "residual_s_per_m": g.residual,
        "theta_deg": g.theta_deg(),
        "delta_k0_rad_per_m": dk0,
        "coherence_length_m": lc,
        "config": cfg.to_json(),
    });
    write(cfg, "gvm.json", &(serde_json::to_string_pretty(&doc)? + "\n"))?;
    println!(
        "k1_pump_s_per_m={:e} k1_signal_s_per_m={:e} k1_idler_s_per_m={:e} residual_s_per_m={:e} theta_deg={} delta_k0_rad_per_m={:e} coherence_length_m={:e}",
        g.k1_pump,
        g.k1_signal,
        g.k1_idler,
        g.residual,
        g.theta_deg(),
        dk0,
        lc
    );
    Ok(())
}
