//! Deterministic amplitude-tracking designers.

use std::f64::consts::PI;
#[cfg(test)]
use std::f64::consts::SQRT_2;

use num_complex::Complex64;

use super::{Algorithm, DesignReport};
use crate::error::{Error, Result};
use crate::grating::{step_prefactor, Grating, Orientation};
use crate::target::TargetAmplitude;

fn check_lc(lc: f64) -> Result<()> {
    if lc > 0.0 && lc.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("coherence_length", format!("must be positive, got {lc}")))
    }
}

fn real_target(target: &TargetAmplitude, z: f64) -> Result<f64> {
    Ok(target.eval(z)?.re)
}

fn require_real(target: &TargetAmplitude, method: &str) -> Result<()> {
    if target.is_real() {
        Ok(())
    } else {
        Err(Error::invalid(
            "target",
            format!("{method} tracks the real part only; target family {} is complex", target.family()),
        ))
    }
}

/// Two-domain blocks of width `lc`: UP-UP leaves the amplitude unchanged,
/// UP-DOWN raises it by `4 lc / pi`, DOWN-UP lowers it by the same. Each
/// block picks the option closest to the target at the block end; ties go
/// to the earlier option in that order.
pub fn design_tambasco_blocks(target: &TargetAmplitude, n_blocks: usize, lc: f64) -> Result<DesignReport> {
    check_lc(lc)?;
    require_real(target, "the block method")?;
    if n_blocks == 0 {
        return Err(Error::invalid("blocks", "need at least one block"));
    }
    use Orientation::*;
    let step = 4.0 * lc / PI;
    let options = [([Up, Up], 0.0), ([Up, Down], step), ([Down, Up], -step)];

    let mut amplitude = 0.0;
    let mut orientations = Vec::with_capacity(2 * n_blocks);
    let mut residuals = Vec::with_capacity(n_blocks);
    let mut ties = Vec::new();
    for m in 1..=n_blocks {
        let goal = real_target(target, (2 * m) as f64 * lc)?;
        let errors: Vec<f64> = options.iter().map(|(_, d)| (goal - (amplitude + d)).abs()).collect();
        let mut best = 0;
        for k in 1..options.len() {
            if errors[k] < errors[best] {
                best = k;
            }
        }
        if errors.iter().enumerate().any(|(k, e)| k != best && *e == errors[best]) {
            ties.push(m - 1);
        }
        orientations.extend_from_slice(&options[best].0);
        amplitude += options[best].1;
        residuals.push(goal - amplitude);
    }
    let mut report = DesignReport::deterministic(
        Grating::uniform(lc, &orientations)?,
        Algorithm::TambascoBlocks,
        lc,
        lc,
    );
    report.residuals = residuals;
    report.ties = ties;
    Ok(report)
}

/// Domain-by-domain tracking with width `lc`. The first domain is UP; each
/// later domain is set by the sign of `e = A_target(z + w) - A(z)` and by
/// whether the amplitude rose over the previous domain:
///
/// | e      | previous domain | action |
/// |--------|-----------------|--------|
/// | `>= 0` | rising          | flip   |
/// | `>= 0` | falling         | keep   |
/// | `< 0`  | rising          | keep   |
/// | `< 0`  | falling         | flip   |
pub fn design_domain_by_domain(target: &TargetAmplitude, n: usize, lc: f64) -> Result<DesignReport> {
    check_lc(lc)?;
    require_real(target, "the domain-by-domain method")?;
    if n < 2 {
        return Err(Error::invalid("domains", "domain-by-domain needs at least two domains"));
    }
    let delta = 2.0 * lc / PI;
    // Domain n (1-based) adds s_n (-1)^(n+1) 2 lc / pi to Re A.
    let contribution = |idx: usize, o: Orientation| -> f64 {
        let parity = if idx % 2 == 1 { 1.0 } else { -1.0 };
        o.sign() * parity * delta
    };

    let mut orientations = vec![Orientation::Up];
    let mut previous = 0.0;
    let mut amplitude = contribution(1, Orientation::Up);
    let mut residuals = vec![real_target(target, lc)? - amplitude];
    for idx in 2..=n {
        let z = (idx - 1) as f64 * lc;
        let error = real_target(target, z + lc)? - amplitude;
        let rising = amplitude >= previous;
        let last = *orientations.last().unwrap();
        let next = match (error >= 0.0, rising) {
            (true, true) | (false, false) => last.flipped(),
            (true, false) | (false, true) => last,
        };
        orientations.push(next);
        previous = amplitude;
        amplitude += contribution(idx, next);
        residuals.push(real_target(target, z + lc)? - amplitude);
    }
    let mut report = DesignReport::deterministic(
        Grating::uniform(lc, &orientations)?,
        Algorithm::DomainByDomain,
        lc,
        lc,
    );
    report.residuals = residuals;
    Ok(report)
}

/// Greedy design with `n` domains of width `w <= lc`. At step `m` both UP
/// and DOWN are tried and the one with smaller `|A_target(m w) - A_m|`
/// kept, using the running-sum amplitude at `dk = pi / lc`. Equal costs
/// repeat the previous orientation; a tie on the first domain gives UP.
pub fn design_sub_coherence(target: &TargetAmplitude, w: f64, n: usize, lc: f64) -> Result<DesignReport> {
    check_lc(lc)?;
    if !(w > 0.0 && w.is_finite()) {
        return Err(Error::invalid("domain_width", format!("must be positive, got {w}")));
    }
    if w > lc * (1.0 + 1e-12) {
        return Err(Error::invalid(
            "domain_width",
            "w > lc is not supported by the sub-coherence method; use domain-by-domain",
        ));
    }
    if n == 0 {
        return Err(Error::invalid("domains", "need at least one domain"));
    }
    let kappa = PI / lc;
    let prefactor = step_prefactor(w, lc);
    let length = target.length();

    let mut running = Complex64::new(0.0, 0.0);
    let mut orientations: Vec<Orientation> = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    let mut ties = Vec::new();
    for m in 1..=n {
        let phase = Complex64::from_polar(1.0, kappa * m as f64 * w);
        let goal = target.eval((m as f64 * w).min(length))?;
        let e_up = (goal - prefactor * (running + phase)).norm();
        let e_down = (goal - prefactor * (running - phase)).norm();
        let choice = if e_up < e_down {
            Orientation::Up
        } else if e_down < e_up {
            Orientation::Down
        } else {
            ties.push(m - 1);
            orientations.last().copied().unwrap_or(Orientation::Up)
        };
        running += choice.sign() * phase;
        residuals.push(e_up.min(e_down));
        orientations.push(choice);
    }
    let mut report = DesignReport::deterministic(
        Grating::uniform(w, &orientations)?,
        Algorithm::SubCoherence,
        lc,
        w,
    );
    report.residuals = residuals;
    report.ties = ties;
    Ok(report)
}
