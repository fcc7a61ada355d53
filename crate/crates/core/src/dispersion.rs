//! Material dispersion, phase mismatch and group-velocity diagnostics for a
//! three-wave down-conversion process.
//!
//! Two models are provided: a tabulated KTP Sellmeier model with thermal
//! correction, loaded from a versioned data file, and an affine synthetic
//! model whose mismatch is exactly linear in the signal and idler
//! frequencies. Every algorithmic test can run on the synthetic model.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Bundled KTP coefficient table.
pub const KTP_TABLE: &str = include_str!("../data/ktp.toml");

pub fn omega_from_wavelength(lambda_m: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / lambda_m
}

pub fn wavelength_from_omega(omega: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / omega
}

/// Crystal polarization axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn label(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            other => Err(Error::invalid("axis", format!("unknown axis `{other}`"))),
        }
    }
}

/// Role of a field in the down-conversion process.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Pump,
    Signal,
    Idler,
}

/// A field together with its polarization axis. The Sellmeier model looks
/// up the axis; the synthetic model looks up the field role.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Beam {
    pub field: Field,
    pub axis: Axis,
}

/// Sellmeier and thermo-optic coefficients for one polarization axis.
///
/// `n^2 = a + sum_j b_j / (1 - c_j / lambda^2) - d lambda^2`, lambda in um,
/// plus `n1 (T - T0) + n2 (T - T0)^2` with `n_k = sum_m coeff_m / lambda^m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisCoefficients {
    pub a: f64,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub d: f64,
    #[serde(default)]
    pub n1: Vec<f64>,
    #[serde(default)]
    pub n2: Vec<f64>,
}

impl AxisCoefficients {
    fn index(&self, lambda_um: f64, delta_t: f64) -> f64 {
        let l2 = lambda_um * lambda_um;
        let poles: f64 = self
            .b
            .iter()
            .zip(&self.c)
            .map(|(b, c)| b / (1.0 - c / l2))
            .sum();
        let n0 = (self.a + poles - self.d * l2).sqrt();
        let poly = |coeffs: &[f64]| -> f64 {
            coeffs
                .iter()
                .enumerate()
                .map(|(m, a)| a / lambda_um.powi(m as i32))
                .sum()
        };
        n0 + poly(&self.n1) * delta_t + poly(&self.n2) * delta_t * delta_t
    }
}

/// Contents of a dispersion data file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SellmeierTable {
    pub model: String,
    pub version: u32,
    pub citation: String,
    pub reference_temperature_c: f64,
    pub validity_nm: [f64; 2],
    pub axes: BTreeMap<Axis, AxisCoefficients>,
}

impl SellmeierTable {
    pub fn parse(text: &str) -> Result<Self> {
        let table: SellmeierTable =
            toml::from_str(text).map_err(|e| Error::DispersionData(e.to_string()))?;
        if table.model != "ktp-sellmeier" {
            return Err(Error::DispersionData(format!(
                "unsupported model id `{}`",
                table.model
            )));
        }
        let [lo, hi] = table.validity_nm;
        if !(lo > 0.0 && hi > lo) {
            return Err(Error::DispersionData(format!(
                "bad validity window [{lo}, {hi}] nm"
            )));
        }
        for (axis, coeffs) in &table.axes {
            if coeffs.b.len() != coeffs.c.len() {
                return Err(Error::DispersionData(format!(
                    "axis {axis}: b and c must have equal length"
                )));
            }
        }
        Ok(table)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn ktp() -> Self {
        Self::parse(KTP_TABLE).expect("bundled KTP table is valid")
    }

    pub fn refractive_index(&self, axis: Axis, lambda_m: f64, temperature_c: f64) -> Result<f64> {
        let coeffs = self
            .axes
            .get(&axis)
            .ok_or_else(|| Error::MissingAxis(axis.to_string()))?;
        let nm = lambda_m * 1e9;
        let [lo, hi] = self.validity_nm;
        if !(nm >= lo && nm <= hi) {
            return Err(Error::OutOfWindow {
                wavelength_nm: nm,
                min_nm: lo,
                max_nm: hi,
            });
        }
        Ok(coeffs.index(nm * 1e-3, temperature_c - self.reference_temperature_c))
    }
}

/// One field of the affine model: `k(w) = k_ref + tau (w - omega_ref)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearBranch {
    pub k_ref: f64,
    pub tau: f64,
    pub omega_ref: f64,
}

impl LinearBranch {
    fn eval(&self, omega: f64) -> f64 {
        self.k_ref + self.tau * (omega - self.omega_ref)
    }
}

/// Affine dispersion used for algorithm tests.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    /// Mismatch at the signal and idler reference frequencies.
    pub k0: f64,
    pub pump: LinearBranch,
    pub signal: LinearBranch,
    pub idler: LinearBranch,
    pub validity_nm: [f64; 2],
}

impl LinearModel {
    /// Builds a model with mismatch `k0` at `(omega_s0, omega_i0)` and the
    /// given inverse group velocities. Pump reference is `omega_s0 + omega_i0`.
    pub fn new(k0: f64, tau: [f64; 3], omega_s0: f64, omega_i0: f64) -> Self {
        let [tau_p, tau_s, tau_i] = tau;
        // Reference wavenumbers are arbitrary positive offsets; only the
        // mismatch k0 is physical for the tests that use this model.
        let k_s = omega_s0 / SPEED_OF_LIGHT;
        let k_i = omega_i0 / SPEED_OF_LIGHT;
        Self {
            k0,
            pump: LinearBranch {
                k_ref: k0 + k_s + k_i,
                tau: tau_p,
                omega_ref: omega_s0 + omega_i0,
            },
            signal: LinearBranch {
                k_ref: k_s,
                tau: tau_s,
                omega_ref: omega_s0,
            },
            idler: LinearBranch {
                k_ref: k_i,
                tau: tau_i,
                omega_ref: omega_i0,
            },
            validity_nm: [1.0, 1.0e6],
        }
    }

    fn branch(&self, field: Field) -> &LinearBranch {
        match field {
            Field::Pump => &self.pump,
            Field::Signal => &self.signal,
            Field::Idler => &self.idler,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum DispersionModel {
    KtpSellmeier {
        table: SellmeierTable,
        temperature_c: f64,
    },
    LinearSynthetic(LinearModel),
}

impl DispersionModel {
    /// KTP at the default 25 C.
    pub fn ktp() -> Self {
        Self::ktp_at(25.0)
    }

    pub fn ktp_at(temperature_c: f64) -> Self {
        DispersionModel::KtpSellmeier {
            table: SellmeierTable::ktp(),
            temperature_c,
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            DispersionModel::KtpSellmeier { .. } => "ktp-sellmeier",
            DispersionModel::LinearSynthetic(_) => "linear-synthetic",
        }
    }

    pub fn validity_nm(&self) -> [f64; 2] {
        match self {
            DispersionModel::KtpSellmeier { table, .. } => table.validity_nm,
            DispersionModel::LinearSynthetic(m) => m.validity_nm,
        }
    }

    fn check_window(&self, omega: f64) -> Result<()> {
        let nm = wavelength_from_omega(omega) * 1e9;
        let [lo, hi] = self.validity_nm();
        if omega.is_finite() && omega > 0.0 && nm >= lo && nm <= hi {
            Ok(())
        } else {
            Err(Error::OutOfWindow {
                wavelength_nm: nm,
                min_nm: lo,
                max_nm: hi,
            })
        }
    }

    /// Wavenumber in rad/m.
    pub fn wavenumber(&self, beam: Beam, omega: f64) -> Result<f64> {
        self.check_window(omega)?;
        match self {
            DispersionModel::KtpSellmeier {
                table,
                temperature_c,
            } => {
                let n = table.refractive_index(beam.axis, wavelength_from_omega(omega), *temperature_c)?;
                Ok(n * omega / SPEED_OF_LIGHT)
            }
            DispersionModel::LinearSynthetic(m) => Ok(m.branch(beam.field).eval(omega)),
        }
    }

    /// `k_p(w_s + w_i) - k_s(w_s) - k_i(w_i)`.
    pub fn delta_k(&self, spec: &ProcessSpec, omega_s: f64, omega_i: f64) -> Result<f64> {
        if let DispersionModel::LinearSynthetic(m) = self {
            self.check_window(omega_s)?;
            self.check_window(omega_i)?;
            self.check_window(omega_s + omega_i)?;
            // Grouped so that the affine identity holds to rounding.
            return Ok(m.k0
                + (m.pump.tau - m.signal.tau) * (omega_s - m.signal.omega_ref)
                + (m.pump.tau - m.idler.tau) * (omega_i - m.idler.omega_ref)
                + m.pump.tau * (m.signal.omega_ref + m.idler.omega_ref - m.pump.omega_ref));
        }
        let kp = self.wavenumber(spec.beam(Field::Pump), omega_s + omega_i)?;
        let ks = self.wavenumber(spec.beam(Field::Signal), omega_s)?;
        let ki = self.wavenumber(spec.beam(Field::Idler), omega_i)?;
        Ok(kp - ks - ki)
    }

    /// Mismatch at the central signal and idler frequencies.
    pub fn delta_k0(&self, spec: &ProcessSpec) -> Result<f64> {
        self.delta_k(spec, spec.omega_signal(), spec.omega_idler())
    }

    /// `pi / |dk0|`. The sign of the mismatch only conjugates the phase
    /// matching function of a real nonlinearity profile, so negative
    /// mismatches are accepted; an exactly phase-matched process is not.
    pub fn coherence_length(&self, spec: &ProcessSpec) -> Result<f64> {
        let dk0 = self.delta_k0(spec)?;
        if !(dk0.is_finite() && dk0 != 0.0) {
            return Err(Error::PhaseMatched(dk0));
        }
        Ok(PI / dk0.abs())
    }

    /// `dk/dw` in s/m. Central difference with step `1e-6 w` for the
    /// Sellmeier model; exact slope for the affine model.
    pub fn inverse_group_velocity(&self, beam: Beam, omega: f64) -> Result<f64> {
        self.inverse_group_velocity_with_step(beam, omega, 1e-6)
    }

    pub fn inverse_group_velocity_with_step(&self, beam: Beam, omega: f64, rel_step: f64) -> Result<f64> {
        match self {
            DispersionModel::LinearSynthetic(m) => {
                self.check_window(omega)?;
                Ok(m.branch(beam.field).tau)
            }
            DispersionModel::KtpSellmeier { .. } => {
                let h = rel_step * omega;
                let up = self.wavenumber(beam, omega + h)?;
                let down = self.wavenumber(beam, omega - h)?;
                Ok((up - down) / (2.0 * h))
            }
        }
    }

    pub fn gvm_report(&self, spec: &ProcessSpec) -> Result<GvmReport> {
        let kp = self.inverse_group_velocity(spec.beam(Field::Pump), spec.omega_pump())?;
        let ks = self.inverse_group_velocity(spec.beam(Field::Signal), spec.omega_signal())?;
        let ki = self.inverse_group_velocity(spec.beam(Field::Idler), spec.omega_idler())?;
        let theta = (-(kp - ks) / (kp - ki)).atan();
        Ok(GvmReport {
            k1_pump: kp,
            k1_signal: ks,
            k1_idler: ki,
            residual: kp - 0.5 * (ks + ki),
            theta_rad: theta,
        })
    }
}

/// Inverse group velocities at the central frequencies and the orientation
/// of the phase-matching ridge in the (w_s, w_i) plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GvmReport {
    pub k1_pump: f64,
    pub k1_signal: f64,
    pub k1_idler: f64,
    /// `k'_p - (k'_s + k'_i) / 2`
    pub residual: f64,
    pub theta_rad: f64,
}

impl GvmReport {
    pub fn theta_deg(&self) -> f64 {
        self.theta_rad.to_degrees()
    }
}

/// Central wavelengths and polarization assignment of a process.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProcessSpec {
    pub pump_wavelength: f64,
    pub signal_wavelength: f64,
    pub idler_wavelength: f64,
    pub pump_axis: Axis,
    pub signal_axis: Axis,
    pub idler_axis: Axis,
}

impl ProcessSpec {
    pub fn new(
        wavelengths: [f64; 3],
        axes: [Axis; 3],
    ) -> Result<Self> {
        let [lp, ls, li] = wavelengths;
        if !(lp > 0.0 && ls > 0.0 && li > 0.0) {
            return Err(Error::invalid("wavelength", "wavelengths must be positive"));
        }
        let lhs = 1.0 / lp;
        let rhs = 1.0 / ls + 1.0 / li;
        if ((lhs - rhs) / lhs).abs() > 1e-9 {
            return Err(Error::invalid(
                "wavelength",
                format!("energy not conserved: 1/{lp} != 1/{ls} + 1/{li}"),
            ));
        }
        Ok(Self {
            pump_wavelength: lp,
            signal_wavelength: ls,
            idler_wavelength: li,
            pump_axis: axes[0],
            signal_axis: axes[1],
            idler_axis: axes[2],
        })
    }

    /// Degenerate type-II 791 nm -> 1582 nm + 1582 nm in KTP: pump and signal
    /// on y, idler on z.
    pub fn ktp_type2_791() -> Self {
        Self::new([791e-9, 1582e-9, 1582e-9], [Axis::Y, Axis::Y, Axis::Z])
            .expect("valid preset")
    }

    pub fn beam(&self, field: Field) -> Beam {
        let axis = match field {
            Field::Pump => self.pump_axis,
            Field::Signal => self.signal_axis,
            Field::Idler => self.idler_axis,
        };
        Beam { field, axis }
    }

    pub fn omega_pump(&self) -> f64 {
        self.omega_signal() + self.omega_idler()
    }

    pub fn omega_signal(&self) -> f64 {
        omega_from_wavelength(self.signal_wavelength)
    }

    pub fn omega_idler(&self) -> f64 {
        omega_from_wavelength(self.idler_wavelength)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ktp_n_y(lambda_um: f64) -> f64 {
        // König & Wong, evaluated independently of the table parser.
        let l2 = lambda_um * lambda_um;
        (2.09930 + 0.922683 / (1.0 - 0.0467695 / l2) - 0.0138408 * l2).sqrt()
    }

    fn ktp_n_z(lambda_um: f64) -> f64 {
        let l2 = lambda_um * lambda_um;
        (2.12725 + 1.18431 / (1.0 - 5.14852e-2 / l2) + 0.6603 / (1.0 - 100.00507 / l2)
            - 9.68956e-3 * l2)
            .sqrt()
    }

    fn synthetic() -> (DispersionModel, ProcessSpec) {
        let spec = ProcessSpec::new([800e-9, 1600e-9, 1600e-9], [Axis::Y, Axis::Y, Axis::Z]).unwrap();
        let m = LinearModel::new(
            PI / 23e-6,
            [6.0e-9, 5.9e-9, 6.2e-9],
            spec.omega_signal(),
            spec.omega_idler(),
        );
        (DispersionModel::LinearSynthetic(m), spec)
    }

    #[test]
    fn linear_wavenumber_at_reference() {
        let (model, spec) = synthetic();
        let DispersionModel::LinearSynthetic(m) = &model else { unreachable!() };
        let mut m = m.clone();
        m.signal.tau = 0.0;
        let model = DispersionModel::LinearSynthetic(m.clone());
        let k = model.wavenumber(spec.beam(Field::Signal), m.signal.omega_ref).unwrap();
        assert_eq!(k, m.signal.k_ref);
    }

    #[test]
    fn linear_delta_k_at_reference_is_k0() {
        let (model, spec) = synthetic();
        let dk = model.delta_k(&spec, spec.omega_signal(), spec.omega_idler()).unwrap();
        assert_eq!(dk, PI / 23e-6);
    }

    #[test]
    fn linear_coherence_length() {
        let (model, spec) = synthetic();
        let lc = model.coherence_length(&spec).unwrap();
        assert!((lc - 23e-6).abs() < 1e-18);
    }

    #[test]
    fn zero_mismatch_is_rejected() {
        let (_, spec) = synthetic();
        let m = LinearModel::new(0.0, [6.0e-9, 5.9e-9, 6.2e-9], spec.omega_signal(), spec.omega_idler());
        let err = DispersionModel::LinearSynthetic(m).coherence_length(&spec).unwrap_err();
        assert!(matches!(err, Error::PhaseMatched(_)));
        assert!(err.to_string().contains("poling undefined"));
    }

    #[test]
    fn linear_group_velocity_is_exact() {
        let (model, spec) = synthetic();
        let tau = model
            .inverse_group_velocity(spec.beam(Field::Signal), spec.omega_signal() * 1.01)
            .unwrap();
        assert_eq!(tau, 5.9e-9);
    }

    #[test]
    fn gvm_symmetric_and_asymmetric_limits() {
        let (_, spec) = synthetic();
        let (ts, ti) = (5.9e-9, 6.2e-9);
        let sym = LinearModel::new(1e5, [(ts + ti) / 2.0, ts, ti], spec.omega_signal(), spec.omega_idler());
        let r = DispersionModel::LinearSynthetic(sym).gvm_report(&spec).unwrap();
        assert_eq!(r.residual, 0.0);
        assert!((r.theta_deg() - 45.0).abs() < 1e-12);

        let asym = LinearModel::new(1e5, [ts, ts, ti], spec.omega_signal(), spec.omega_idler());
        let r = DispersionModel::LinearSynthetic(asym).gvm_report(&spec).unwrap();
        assert_eq!(r.theta_deg(), 0.0);
    }

    #[test]
    fn ktp_index_matches_hand_evaluation() {
        let table = SellmeierTable::ktp();
        for &l in &[0.791, 1.2, 1.582, 2.0] {
            let ny = table.refractive_index(Axis::Y, l * 1e-6, 25.0).unwrap();
            let nz = table.refractive_index(Axis::Z, l * 1e-6, 25.0).unwrap();
            assert!((ny - ktp_n_y(l)).abs() < 1e-14, "{l}");
            assert!((nz - ktp_n_z(l)).abs() < 1e-14, "{l}");
        }
    }

    #[test]
    fn ktp_wavenumber_at_791_nm() {
        let model = DispersionModel::ktp();
        let spec = ProcessSpec::ktp_type2_791();
        let w = omega_from_wavelength(791e-9);
        let k = model
            .wavenumber(Beam { field: Field::Pump, axis: Axis::Z }, w)
            .unwrap();
        let expected = ktp_n_z(0.791) * w / SPEED_OF_LIGHT;
        assert!(((k - expected) / expected).abs() < 1e-13);
        // n_z(0.791 um) = 1.845949965..., frozen from the scalar oracle above.
        assert!((ktp_n_z(0.791) - 1.845_949_965).abs() < 1e-9);
        assert!(spec.pump_axis == Axis::Y);
    }

    #[test]
    fn ktp_delta_k_at_degeneracy() {
        let model = DispersionModel::ktp();
        let spec = ProcessSpec::ktp_type2_791();
        let dk = model.delta_k0(&spec).unwrap();
        let c = SPEED_OF_LIGHT;
        let wp = omega_from_wavelength(791e-9);
        let ws = omega_from_wavelength(1582e-9);
        let hand = ktp_n_y(0.791) * wp / c - ktp_n_y(1.582) * ws / c - ktp_n_z(1.582) * ws / c;
        assert!(((dk - hand) / hand).abs() < 1e-9);
        // pump y / signal y / idler z leaves k_p below k_s + k_i
        assert!(dk < 0.0);
        let lc = model.coherence_length(&spec).unwrap();
        assert!(lc > 10e-6 && lc < 100e-6, "lc = {lc}");
        assert!((lc * dk.abs() - PI).abs() < 1e-14);
    }

    #[test]
    fn type2_swap_changes_mismatch() {
        let model = DispersionModel::ktp();
        let spec = ProcessSpec::ktp_type2_791();
        let ws = spec.omega_signal() * 1.01;
        let wi = spec.omega_idler() * 0.99;
        let a = model.delta_k(&spec, ws, wi).unwrap();
        let b = model.delta_k(&spec, wi, ws).unwrap();
        assert!((a - b).abs() > 1.0);
    }

    #[test]
    fn out_of_window_is_an_error() {
        let model = DispersionModel::ktp();
        let err = model
            .wavenumber(Beam { field: Field::Pump, axis: Axis::Y }, omega_from_wavelength(10e-6))
            .unwrap_err();
        assert!(matches!(err, Error::OutOfWindow { .. }));
        assert!(err.to_string().contains("[430, 3540]"));
    }

    #[test]
    fn ktp_group_velocity_step_insensitive() {
        let model = DispersionModel::ktp();
        let spec = ProcessSpec::ktp_type2_791();
        for field in [Field::Pump, Field::Signal, Field::Idler] {
            let w = match field {
                Field::Pump => spec.omega_pump(),
                Field::Signal => spec.omega_signal(),
                Field::Idler => spec.omega_idler(),
            };
            let a = model.inverse_group_velocity_with_step(spec.beam(field), w, 1e-6).unwrap();
            let b = model.inverse_group_velocity_with_step(spec.beam(field), w, 5e-7).unwrap();
            assert!(((a - b) / a).abs() < 1e-6);
            // Richardson-consistent with a coarser pair
            let c = model.inverse_group_velocity_with_step(spec.beam(field), w, 1e-4).unwrap();
            let d = model.inverse_group_velocity_with_step(spec.beam(field), w, 5e-5).unwrap();
            let extrap = (4.0 * d - c) / 3.0;
            assert!(((extrap - a) / a).abs() < 1e-7);
        }
    }

    #[test]
    fn ktp_is_near_symmetric_gvm() {
        let model = DispersionModel::ktp();
        let spec = ProcessSpec::ktp_type2_791();
        let r = model.gvm_report(&spec).unwrap();
        assert!(r.residual.abs() < 0.01 * (r.k1_signal - r.k1_idler).abs());
        assert!((r.theta_deg() - 45.0).abs() < 1.0);
    }

    #[test]
    fn ktp_wavenumber_monotone() {
        let model = DispersionModel::ktp();
        for axis in [Axis::Y, Axis::Z] {
            let beam = Beam { field: Field::Signal, axis };
            let lo = omega_from_wavelength(3500e-9);
            let hi = omega_from_wavelength(440e-9);
            let ks: Vec<f64> = (0..100)
                .map(|j| lo + (hi - lo) * j as f64 / 99.0)
                .map(|w| model.wavenumber(beam, w).unwrap())
                .collect();
            assert!(ks.windows(2).all(|p| p[1] > p[0] && p[0] > 0.0));
        }
    }

    #[test]
    fn energy_conservation_enforced() {
        assert!(ProcessSpec::new([791e-9, 1582e-9, 1500e-9], [Axis::Y; 3]).is_err());
    }

    #[test]
    fn temperature_correction_vanishes_at_reference() {
        let t = SellmeierTable::ktp();
        let a = t.refractive_index(Axis::Y, 1.582e-6, 25.0).unwrap();
        let b = t.refractive_index(Axis::Y, 1.582e-6, 45.0).unwrap();
        assert!((a - ktp_n_y(1.582)).abs() < 1e-15);
        assert!(b > a);
    }
}
