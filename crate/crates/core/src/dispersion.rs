//! Effective-index and group-index models, resonance-comb construction, and
//! enumeration of quasi-phase-matched resonance triples.

use std::path::Path;

use crate::constants::{omega_from_wavelength, wavelength_from_omega, C};
use crate::error::{Error, Result};
use crate::numerics::{brent, golden_min, Pchip, Tolerance};
use crate::resonator::RingGeometry;
use crate::Sign;

/// Guided-mode family of the ring cross-section.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModeFamily {
    Te0,
    Tm0,
}

impl ModeFamily {
    pub fn label(self) -> &'static str {
        match self {
            ModeFamily::Te0 => "TE0",
            ModeFamily::Tm0 => "TM0",
        }
    }
}

impl std::str::FromStr for ModeFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "te0" | "te" => Ok(ModeFamily::Te0),
            "tm0" | "tm" => Ok(ModeFamily::Tm0),
            other => Err(Error::Domain(format!("unknown mode family {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
enum Repr {
    /// Monotone cubic interpolation of (vacuum wavelength, n_eff) samples.
    Sampled(Pchip),
    /// Polynomial in (ω - ω_ref): `n(ω) = Σ c_j (ω - ω_ref)^j`.
    Polynomial { omega_ref: f64, coeffs: Vec<f64> },
}

/// Effective-index value with an out-of-band flag (set when the model was
/// evaluated by linear extrapolation).
#[derive(Debug, Clone, Copy)]
pub struct NeffSample {
    pub n_eff: f64,
    pub extrapolated: bool,
}

/// Effective-index model for one mode family, valid on a wavelength band.
#[derive(Debug, Clone)]
pub struct DispersionModel {
    pub family: ModeFamily,
    repr: Repr,
    /// Validity band in angular frequency, `omega_band.0 < omega_band.1`.
    omega_band: (f64, f64),
    /// Allow linear extrapolation outside the band instead of erroring.
    extrapolate: bool,
}

impl DispersionModel {
    /// Build from sampled (λ, n_eff) pairs; λ ascending, in metres.
    pub fn from_samples(family: ModeFamily, lambda: Vec<f64>, n_eff: Vec<f64>) -> Result<Self> {
        if lambda.iter().any(|&l| !(l > 0.0)) {
            return Err(Error::Domain("wavelength samples must be positive".into()));
        }
        let band = (
            omega_from_wavelength(*lambda.last().ok_or_else(|| {
                Error::Domain("empty dispersion sample set".into())
            })?),
            omega_from_wavelength(lambda[0]),
        );
        let model = Self {
            family,
            repr: Repr::Sampled(Pchip::new(lambda, n_eff)?),
            omega_band: band,
            extrapolate: false,
        };
        model.validate_band()?;
        Ok(model)
    }

    /// Build from polynomial coefficients in `(ω - ω_ref)`; the band is given
    /// in angular frequency.
    pub fn from_polynomial(
        family: ModeFamily,
        omega_ref: f64,
        coeffs: Vec<f64>,
        omega_band: (f64, f64),
    ) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Domain("polynomial needs at least one coefficient".into()));
        }
        if !(omega_band.0 > 0.0) || !(omega_band.1 > omega_band.0) {
            return Err(Error::Domain(format!(
                "invalid frequency band ({}, {})",
                omega_band.0, omega_band.1
            )));
        }
        let model =
            Self { family, repr: Repr::Polynomial { omega_ref, coeffs }, omega_band, extrapolate: false };
        model.validate_band()?;
        Ok(model)
    }

    /// Read a dispersion CSV with mandatory header `lambda_nm, n_eff`.
    pub fn from_csv(family: ModeFamily, path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let display = path.display().to_string();
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| match e.kind() {
                csv::ErrorKind::Io(_) => Error::Io {
                    path: display.clone(),
                    source: std::io::Error::other(e.to_string()),
                },
                _ => Error::Malformed { path: display.clone(), msg: e.to_string() },
            })?;

        let headers = reader
            .headers()
            .map_err(|e| Error::Malformed { path: display.clone(), msg: e.to_string() })?
            .clone();
        let want = ["lambda_nm", "n_eff"];
        let idx: Vec<usize> = want
            .iter()
            .map(|name| {
                headers.iter().position(|h| h == *name).ok_or_else(|| Error::Malformed {
                    path: display.clone(),
                    msg: format!("missing column {name:?} (found {:?})", headers),
                })
            })
            .collect::<Result<_>>()?;

        let mut lambda = Vec::new();
        let mut n_eff = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record =
                record.map_err(|e| Error::Malformed { path: display.clone(), msg: e.to_string() })?;
            let get = |col: usize| -> Result<f64> {
                record
                    .get(idx[col])
                    .ok_or_else(|| Error::Malformed {
                        path: display.clone(),
                        msg: format!("row {} too short", line + 2),
                    })?
                    .parse::<f64>()
                    .map_err(|e| Error::Malformed {
                        path: display.clone(),
                        msg: format!("row {}: {e}", line + 2),
                    })
            };
            lambda.push(get(0)? * 1e-9);
            n_eff.push(get(1)?);
        }
        Self::from_samples(family, lambda, n_eff)
    }

    pub fn with_extrapolation(mut self, allow: bool) -> Self {
        self.extrapolate = allow;
        self
    }

    /// Validity band as angular frequencies `(ω_lo, ω_hi)`.
    pub fn omega_band(&self) -> (f64, f64) {
        self.omega_band
    }

    fn in_band(&self, omega: f64) -> bool {
        omega >= self.omega_band.0 && omega <= self.omega_band.1
    }

    /// Guided modes in a dielectric: n_eff > 1 and n_g > 0 across the band.
    fn validate_band(&self) -> Result<()> {
        for i in 0..=64 {
            let omega =
                self.omega_band.0 + (self.omega_band.1 - self.omega_band.0) * i as f64 / 64.0;
            let n = self.eval(omega)?.n_eff;
            if !(n > 1.0) {
                return Err(Error::Domain(format!(
                    "{} effective index {n:.4} ≤ 1 at λ = {:.1} nm",
                    self.family.label(),
                    wavelength_from_omega(omega) * 1e9
                )));
            }
            let ng = self.n_group(omega)?;
            if !(ng > 0.0) {
                return Err(Error::Domain(format!(
                    "{} group index {ng:.4} ≤ 0 at λ = {:.1} nm",
                    self.family.label(),
                    wavelength_from_omega(omega) * 1e9
                )));
            }
        }
        Ok(())
    }

    /// Effective index at `ω`, flagging extrapolation.
    pub fn eval(&self, omega: f64) -> Result<NeffSample> {
        let extrapolated = !self.in_band(omega);
        if extrapolated && !self.extrapolate {
            return Err(Error::Range(format!(
                "λ = {:.2} nm outside {} validity band [{:.2}, {:.2}] nm",
                wavelength_from_omega(omega) * 1e9,
                self.family.label(),
                wavelength_from_omega(self.omega_band.1) * 1e9,
                wavelength_from_omega(self.omega_band.0) * 1e9,
            )));
        }
        let n_eff = match &self.repr {
            Repr::Sampled(p) => {
                // Pchip continues linearly outside its nodes, which is
                // exactly the documented extrapolation behaviour.
                p.value(wavelength_from_omega(omega))
            }
            Repr::Polynomial { omega_ref, coeffs } => {
                let x = omega - omega_ref;
                coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
            }
        };
        Ok(NeffSample { n_eff, extrapolated })
    }

    pub fn n_eff(&self, omega: f64) -> Result<f64> {
        Ok(self.eval(omega)?.n_eff)
    }

    /// Group index `n_g = n + ω·dn/dω`, computed from the same representation
    /// (for sampled data, via `n_g = n - λ·dn/dλ`).
    pub fn n_group(&self, omega: f64) -> Result<f64> {
        if !self.in_band(omega) && !self.extrapolate {
            return Err(Error::Range(format!(
                "λ = {:.2} nm outside {} validity band",
                wavelength_from_omega(omega) * 1e9,
                self.family.label()
            )));
        }
        match &self.repr {
            Repr::Sampled(p) => {
                let lambda = wavelength_from_omega(omega);
                let (n, dn_dlambda) = p.eval(lambda);
                Ok(n - lambda * dn_dlambda)
            }
            Repr::Polynomial { omega_ref, coeffs } => {
                let x = omega - omega_ref;
                let n = coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c);
                let dn = coeffs
                    .iter()
                    .enumerate()
                    .skip(1)
                    .rev()
                    .fold(0.0, |acc, (j, c)| acc * x + j as f64 * c);
                Ok(n + omega * dn)
            }
        }
    }

    /// Group velocity `c/n_g`, m/s.
    pub fn group_velocity(&self, omega: f64) -> Result<f64> {
        Ok(C / self.n_group(omega)?)
    }
}

/// One line of a resonance comb.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombLine {
    pub m: u32,
    pub omega: f64,
}

impl CombLine {
    pub fn wavelength(&self) -> f64 {
        wavelength_from_omega(self.omega)
    }
}

/// Round-trip phase in units of modes: `g(ω) = ω·n_eff(ω)·R/c`.
fn mode_phase(geom: &RingGeometry, model: &DispersionModel, omega: f64) -> Result<f64> {
    Ok(omega * model.n_eff(omega)? * geom.radius / C)
}

/// Solve `ω·n_eff(ω)·R/c = m` for every integer `m` with a root in `band`.
/// Requires the phase to increase strictly on the band; the returned list is
/// sorted by `m` and each root satisfies `|g(ω_m) - m| < 1e-9`.
pub fn find_resonances(
    geom: &RingGeometry,
    model: &DispersionModel,
    band: (f64, f64),
) -> Result<Vec<CombLine>> {
    let (lo, hi) = band;
    if !(lo > 0.0) || !(hi > lo) {
        return Err(Error::Domain(format!("invalid search band ({lo}, {hi})")));
    }
    let (mb_lo, mb_hi) = model.omega_band();
    if lo < mb_lo || hi > mb_hi {
        return Err(Error::Range(format!(
            "search band [{:.2}, {:.2}] nm exceeds model validity [{:.2}, {:.2}] nm",
            wavelength_from_omega(hi) * 1e9,
            wavelength_from_omega(lo) * 1e9,
            wavelength_from_omega(mb_hi) * 1e9,
            wavelength_from_omega(mb_lo) * 1e9,
        )));
    }

    // Monotonicity scan; also serves as a bracket table for the roots.
    const SCAN: usize = 512;
    let mut phases = Vec::with_capacity(SCAN + 1);
    for i in 0..=SCAN {
        let omega = lo + (hi - lo) * i as f64 / SCAN as f64;
        phases.push((omega, mode_phase(geom, model, omega)?));
    }
    for w in phases.windows(2) {
        if w[1].1 <= w[0].1 {
            return Err(Error::AmbiguousComb(format!(
                "ω·n_eff(ω) not strictly increasing near λ = {:.2} nm",
                wavelength_from_omega(w[0].0) * 1e9
            )));
        }
    }

    let g_lo = phases[0].1;
    let g_hi = phases[SCAN].1;
    let m_lo = g_lo.ceil() as i64;
    let m_hi = g_hi.floor() as i64;
    let mut comb = Vec::new();
    let tol = Tolerance { abs: 1e-300, rel: 1e-13, max_iter: 200 };
    for m in m_lo..=m_hi {
        if m <= 0 {
            continue;
        }
        let target = m as f64;
        // Bracket from the scan table, then polish.
        let seg = phases.windows(2).find(|w| w[0].1 <= target && target <= w[1].1);
        let Some(seg) = seg else { continue };
        let omega = brent(
            |w| mode_phase(geom, model, w).expect("band-checked") - target,
            seg[0].0,
            seg[1].0,
            &tol,
        )?;
        debug_assert!((mode_phase(geom, model, omega).unwrap() - target).abs() < 1e-9);
        comb.push(CombLine { m: m as u32, omega });
    }
    Ok(comb)
}

/// Which quasi-phase-matching branch, if any, the mode numbers satisfy:
/// `+` when `m_P - m_S - m_I + 2 = 0`, `-` when `m_P - m_S - m_I - 2 = 0`.
pub fn qpm_check(m_p: u32, m_s: u32, m_i: u32) -> Option<Sign> {
    match m_p as i64 - m_s as i64 - m_i as i64 {
        -2 => Some(Sign::Plus),
        2 => Some(Sign::Minus),
        _ => None,
    }
}

/// A quasi-phase-matched resonance triple drawn from combs, with its
/// frequency-bin mismatch at a given pump frequency.
#[derive(Debug, Clone, Copy)]
pub struct QpmTriple {
    pub pump: CombLine,
    pub signal: CombLine,
    pub idler: CombLine,
    pub sign: Sign,
    /// `Δω = ω₀ - ω_S - ω_I`, rad/s.
    pub delta_omega: f64,
}

/// All `(m_S, m_I)` pairs from the combs that satisfy a QPM condition with
/// the given pump line, `ω_S ≥ ω_I`, sorted by ascending `|Δω|`.
pub fn enumerate_qpm_triples(
    pump: CombLine,
    comb_signal: &[CombLine],
    comb_idler: &[CombLine],
    omega0: f64,
) -> Vec<QpmTriple> {
    let mut triples = Vec::new();
    for s in comb_signal {
        for i in comb_idler {
            if s.omega < i.omega {
                continue;
            }
            if let Some(sign) = qpm_check(pump.m, s.m, i.m) {
                triples.push(QpmTriple {
                    pump,
                    signal: *s,
                    idler: *i,
                    sign,
                    delta_omega: omega0 - s.omega - i.omega,
                });
            }
        }
    }
    triples.sort_by(|a, b| {
        a.delta_omega
            .abs()
            .total_cmp(&b.delta_omega.abs())
            .then(a.signal.m.cmp(&b.signal.m))
    });
    triples
}

/// Pump frequency minimizing
/// `G(ω₀) = [(ω₀-ω_P)² + Γ̄_P²]·[(ω₀-ω_S-ω_I)² + (Γ̄_S+Γ̄_I)²]`
/// between the pump resonance and the bin-matching frequency.
pub fn optimize_pump_detuning(
    triple: &QpmTriple,
    gamma_pump: f64,
    gamma_signal: f64,
    gamma_idler: f64,
) -> f64 {
    let omega_p = triple.pump.omega;
    let omega_si = triple.signal.omega + triple.idler.omega;
    let a2 = gamma_pump * gamma_pump;
    let b2 = (gamma_signal + gamma_idler) * (gamma_signal + gamma_idler);
    let g = |w: f64| {
        let d = w - omega_p;
        let q = w - omega_si;
        (d * d + a2) * (q * q + b2)
    };
    if omega_p == omega_si {
        return omega_p;
    }
    let (lo, hi) = if omega_p < omega_si { (omega_p, omega_si) } else { (omega_si, omega_p) };

    // dG has opposite signs at the endpoints, so a stationary point exists
    // strictly inside; fall back to golden-section if the bracket fails.
    let dg = |w: f64| {
        let d = w - omega_p;
        let q = w - omega_si;
        2.0 * d * (q * q + b2) + 2.0 * q * (d * d + a2)
    };
    let tol = Tolerance { abs: 1e-6, rel: 1e-14, max_iter: 300 };
    let mut best = golden_min(g, lo, hi, &tol);
    if let Ok(root) = brent(dg, lo, hi, &tol) {
        if g(root) < g(best) {
            best = root;
        }
    }
    for cand in [omega_p, omega_si] {
        if g(cand) < g(best) {
            best = cand;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::TWO_PI;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn constant_model(n: f64) -> DispersionModel {
        DispersionModel::from_polynomial(
            ModeFamily::Te0,
            omega_from_wavelength(1550e-9),
            vec![n],
            (omega_from_wavelength(2000e-9), omega_from_wavelength(900e-9)),
        )
        .unwrap()
    }

    #[test]
    fn sampled_model_exact_at_nodes() {
        let lambda: Vec<f64> = (0..21).map(|i| (1500.0 + 5.0 * i as f64) * 1e-9).collect();
        let n: Vec<f64> = lambda.iter().map(|l| 2.3 - 0.2 * (l * 1e9 - 1500.0) / 100.0).collect();
        let model = DispersionModel::from_samples(ModeFamily::Te0, lambda.clone(), n.clone()).unwrap();
        let idx = 10; // 1550 nm
        assert_relative_eq!(
            model.n_eff(omega_from_wavelength(lambda[idx])).unwrap(),
            n[idx],
            max_relative = 1e-14
        );
    }

    #[test]
    fn constant_index_has_equal_group_index() {
        let model = constant_model(3.0);
        for lam in [1000e-9, 1550e-9, 1900e-9] {
            let w = omega_from_wavelength(lam);
            assert_relative_eq!(model.n_group(w).unwrap(), 3.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn linear_lambda_model_group_index_is_intercept() {
        // n(λ) = a + bλ has n_g = n - λ dn/dλ = a; check against a centered
        // finite difference of ω·n_eff(ω).
        let a = 2.4;
        let b = -0.08e9; // per metre of wavelength: -0.08 per µm
        let lambda: Vec<f64> = (0..201).map(|i| (1500.0 + 0.5 * i as f64) * 1e-9).collect();
        let n: Vec<f64> = lambda.iter().map(|l| a + b * l).collect();
        let model = DispersionModel::from_samples(ModeFamily::Te0, lambda, n).unwrap();
        let w0 = omega_from_wavelength(1550e-9);
        assert_relative_eq!(model.n_group(w0).unwrap(), a, max_relative = 1e-9);

        let h = 1e-6 * w0;
        let f = |w: f64| w * model.n_eff(w).unwrap();
        let fd = (f(w0 + h) - f(w0 - h)) / (2.0 * h);
        assert_relative_eq!(model.n_group(w0).unwrap(), fd, max_relative = 1e-6);
    }

    #[test]
    fn out_of_band_errors_unless_extrapolating() {
        let model = constant_model(3.0);
        let w = omega_from_wavelength(800e-9);
        assert!(model.n_eff(w).is_err());
        let model = model.with_extrapolation(true);
        let s = model.eval(w).unwrap();
        assert!(s.extrapolated);
        assert_relative_eq!(s.n_eff, 3.0, max_relative = 1e-12);
    }

    #[test]
    fn constant_index_comb_closed_form() {
        // m = 474 at λ = 2πRn/m for constant n.
        let geom = RingGeometry::new(30e-6, 1e-6, 1e-7, "test").unwrap();
        let model = constant_model(3.0);
        let lambda_474 = TWO_PI * geom.radius * 3.0 / 474.0;
        let band = (omega_from_wavelength(1196e-9), omega_from_wavelength(1190e-9));
        let comb = find_resonances(&geom, &model, band).unwrap();
        let line = comb.iter().find(|l| l.m == 474).expect("m=474 in band");
        assert_relative_eq!(line.wavelength(), lambda_474, max_relative = 1e-12);
        assert_relative_eq!(lambda_474 * 1e9, 1193.01, max_relative = 1e-4);

        // Every returned root satisfies the comb equation to 1e-9 modes.
        for l in &comb {
            let g = l.omega * 3.0 * geom.radius / C;
            assert!((g - l.m as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn empty_band_gives_empty_comb() {
        let geom = RingGeometry::new(30e-6, 1e-6, 1e-7, "test").unwrap();
        let model = constant_model(3.0);
        // Narrow band between two consecutive resonances of the comb.
        let m = 474.5;
        let lambda = TWO_PI * geom.radius * 3.0 / m;
        let w = omega_from_wavelength(lambda);
        let comb = find_resonances(&geom, &model, (w * 0.9999, w * 1.0001)).unwrap();
        assert!(comb.is_empty());
    }

    #[test]
    fn qpm_branches() {
        assert_eq!(qpm_check(609, 315, 292), Some(Sign::Minus));
        assert_eq!(qpm_check(610, 318, 294), Some(Sign::Plus));
        assert_eq!(qpm_check(610, 309, 301), None); // ordinary phase matching
        assert_eq!(qpm_check(474, 244, 232), Some(Sign::Plus));
    }

    proptest! {
        #[test]
        fn qpm_symmetric_in_signal_idler(mp in 1u32..2000, ms in 1u32..1000, mi in 1u32..1000) {
            prop_assert_eq!(qpm_check(mp, ms, mi), qpm_check(mp, mi, ms));
        }
    }

    #[test]
    fn enumerate_sorts_by_bin_mismatch() {
        let pump = CombLine { m: 474, omega: 2.0 };
        let mk = |m: u32, omega: f64| CombLine { m, omega };
        let signal = vec![mk(244, 1.2), mk(245, 1.25)];
        let idler = vec![mk(232, 0.8), mk(231, 0.76)];
        let triples = enumerate_qpm_triples(pump, &signal, &idler, 2.0);
        // (244, 232): Δω = 0; (245, 231): Δω = -0.01; (244+245 with others fail QPM).
        assert_eq!(triples.len(), 2);
        assert_eq!((triples[0].signal.m, triples[0].idler.m), (244, 232));
        assert!(triples[0].delta_omega.abs() <= triples[1].delta_omega.abs());
        assert!(triples.iter().all(|t| qpm_check(t.pump.m, t.signal.m, t.idler.m) == Some(t.sign)));

        let empty = enumerate_qpm_triples(pump, &[], &idler, 2.0);
        assert!(empty.is_empty());
    }

    #[test]
    fn detuning_optimum_limits() {
        let mk = |m: u32, omega: f64| CombLine { m, omega };
        // Exact bin matching: optimum at the common frequency.
        let t = QpmTriple {
            pump: mk(474, 2.0e15),
            signal: mk(244, 1.2e15),
            idler: mk(232, 0.8e15),
            sign: Sign::Plus,
            delta_omega: 0.0,
        };
        assert_relative_eq!(optimize_pump_detuning(&t, 1e10, 1e9, 1e9), 2.0e15);

        // Very broad pump factor: optimum collapses onto ω_S + ω_I.
        let t2 = QpmTriple { pump: mk(474, 2.0e15 + 5.0e8), ..t };
        let best = optimize_pump_detuning(&t2, 1e13, 1e6, 1e6);
        assert_relative_eq!(best, 2.0e15, epsilon = 5e5);
    }

    #[test]
    fn detuning_optimum_matches_dense_scan() {
        let mk = |m: u32, omega: f64| CombLine { m, omega };
        let t = QpmTriple {
            pump: mk(474, 2.0e15 + 3.7e9),
            signal: mk(244, 1.2e15),
            idler: mk(232, 0.8e15),
            sign: Sign::Plus,
            delta_omega: 3.7e9,
        };
        let (gp, gs, gi) = (2.4e10, 1.2e9, 1.15e9);
        let best = optimize_pump_detuning(&t, gp, gs, gi);

        let a2 = gp * gp;
        let b2 = (gs + gi) * (gs + gi);
        let g = |w: f64| {
            let d = w - t.pump.omega;
            let q = w - t.signal.omega - t.idler.omega;
            (d * d + a2) * (q * q + b2)
        };
        let lo = 2.0e15;
        let hi = t.pump.omega;
        let mut scan_min = f64::INFINITY;
        for i in 0..=1_000_000u32 {
            let w = lo + (hi - lo) * i as f64 / 1e6;
            scan_min = scan_min.min(g(w));
        }
        assert!(g(best) <= scan_min * (1.0 + 1e-8));
        assert!(g(best) <= g(t.pump.omega).min(g(t.signal.omega + t.idler.omega)));
    }
}
