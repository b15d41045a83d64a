//! Extremal channel families (binary symmetric, binary erasure, pure state),
//! the conjectured check-node bounds for `H̃↓_α` and bound curves
//! `h ↦ H(W⊞W) − H(W)` along each family.

use std::f64::consts::{FRAC_PI_4, LN_2};
use std::fmt;
use std::fs::File;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classical::{combine_check, EntropyKind, JointDistribution};
use crate::error::{Error, Result};
use crate::numerics::{
    binary_renyi_unchecked, clamp_binary_entropy, inverse_binary_renyi, star, Alpha,
};
use crate::quantum::{check_entropy, CQChannel, QEntropyKind};

/// Largest allowed `|H(W) − target|` after parameter inversion.
pub const INVERSION_TOL: f64 = 1e-10;

/// Mismatch between the two branches of [`conjecture1_bound`] on the seam
/// `h₁ + h₂ = ln 2` that is accepted as rounding.
pub const SEAM_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelFamily {
    /// Binary symmetric channel, parameter = flip probability in `[0, 1/2]`.
    Bsc,
    /// Binary erasure channel, parameter = erasure probability in `[0, 1]`.
    Bec,
    /// Pure-state channel, parameter = overlap `f` in `[0, 1]`.
    Psc,
}

impl ChannelFamily {
    pub const ALL: [ChannelFamily; 3] =
        [ChannelFamily::Bsc, ChannelFamily::Bec, ChannelFamily::Psc];

    pub fn tag(self) -> &'static str {
        match self {
            ChannelFamily::Bsc => "bsc",
            ChannelFamily::Bec => "bec",
            ChannelFamily::Psc => "psc",
        }
    }

    /// Parameter interval on which the entropy rises from 0 to `ln 2`.
    pub fn parameter_range(self) -> (f64, f64) {
        match self {
            ChannelFamily::Bsc => (0.0, 0.5),
            ChannelFamily::Bec | ChannelFamily::Psc => (0.0, 1.0),
        }
    }

    pub fn channel(self, parameter: f64) -> Result<CQChannel> {
        match self {
            ChannelFamily::Bsc => CQChannel::bsc(parameter),
            ChannelFamily::Bec => CQChannel::bec(parameter),
            ChannelFamily::Psc => CQChannel::psc(parameter),
        }
    }

    /// Classical form of the channel; pure-state channels have none.
    pub fn joint(self, parameter: f64) -> Result<JointDistribution> {
        match self {
            ChannelFamily::Bsc => JointDistribution::bsc(parameter),
            ChannelFamily::Bec => JointDistribution::bec(parameter),
            ChannelFamily::Psc => Err(Error::Domain(
                "pure-state channels have no classical entropy".into(),
            )),
        }
    }
}

impl fmt::Display for ChannelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ChannelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bsc" => Ok(ChannelFamily::Bsc),
            "bec" => Ok(ChannelFamily::Bec),
            "psc" => Ok(ChannelFamily::Psc),
            other => Err(Error::Parse(format!("unknown channel family `{other}`"))),
        }
    }
}

/// Either a classical or a quantum conditional entropy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AnyEntropyKind {
    Classical(EntropyKind),
    Quantum(QEntropyKind),
}

impl AnyEntropyKind {
    pub fn tag(self) -> &'static str {
        match self {
            AnyEntropyKind::Classical(k) => k.tag(),
            AnyEntropyKind::Quantum(k) => k.tag(),
        }
    }

    /// `H(X|B)` of a family member.
    pub fn single(self, family: ChannelFamily, parameter: f64, alpha: Alpha) -> Result<f64> {
        match self {
            AnyEntropyKind::Classical(k) => Ok(k.evaluate(&family.joint(parameter)?, alpha)),
            AnyEntropyKind::Quantum(k) => family.channel(parameter)?.entropy(k, alpha),
        }
    }

    /// Check-node entropy `H(X₁ + X₂ | B₁B₂)` of two copies of a family member.
    pub fn check_pair(self, family: ChannelFamily, parameter: f64, alpha: Alpha) -> Result<f64> {
        match self {
            AnyEntropyKind::Classical(k) => {
                let p = family.joint(parameter)?;
                Ok(k.evaluate(&combine_check(&p, &p)?, alpha))
            }
            AnyEntropyKind::Quantum(k) => {
                let w = family.channel(parameter)?;
                check_entropy(&w, &w, k, alpha)
            }
        }
    }
}

impl From<EntropyKind> for AnyEntropyKind {
    fn from(k: EntropyKind) -> Self {
        AnyEntropyKind::Classical(k)
    }
}

impl From<QEntropyKind> for AnyEntropyKind {
    fn from(k: QEntropyKind) -> Self {
        AnyEntropyKind::Quantum(k)
    }
}

impl fmt::Display for AnyEntropyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for AnyEntropyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hayashi" => Ok(EntropyKind::Hayashi.into()),
            "arimoto" => Ok(EntropyKind::Arimoto.into()),
            other => other
                .parse::<QEntropyKind>()
                .map(Into::into)
                .map_err(|_| Error::Parse(format!("unknown entropy kind `{other}`"))),
        }
    }
}

/// Coordinate used for bisection: the flip or erasure probability, and for
/// pure-state channels the angle `θ = acos(f)/2`, which resolves overlaps
/// close to 1. Returns `(start, end)` with `H = 0` at `start`.
fn coordinate_range(family: ChannelFamily) -> (f64, f64) {
    match family {
        ChannelFamily::Psc => (FRAC_PI_4, 0.0),
        other => other.parameter_range(),
    }
}

fn coordinate_to_parameter(family: ChannelFamily, t: f64) -> f64 {
    match family {
        ChannelFamily::Psc => (2.0 * t).cos(),
        _ => t,
    }
}

fn member(family: ChannelFamily, t: f64) -> Result<CQChannel> {
    match family {
        ChannelFamily::Psc => CQChannel::psc_from_angle(t),
        other => other.channel(t),
    }
}

fn coordinate_entropy(
    family: ChannelFamily,
    t: f64,
    kind: AnyEntropyKind,
    alpha: Alpha,
) -> Result<f64> {
    match kind {
        AnyEntropyKind::Quantum(k) => member(family, t)?.entropy(k, alpha),
        classical => classical.single(family, coordinate_to_parameter(family, t), alpha),
    }
}

fn coordinate_check_pair(
    family: ChannelFamily,
    t: f64,
    kind: AnyEntropyKind,
    alpha: Alpha,
) -> Result<f64> {
    match kind {
        AnyEntropyKind::Quantum(k) => {
            let w = member(family, t)?;
            check_entropy(&w, &w, k, alpha)
        }
        classical => classical.check_pair(family, coordinate_to_parameter(family, t), alpha),
    }
}

fn solve_coordinate(
    family: ChannelFamily,
    target_h: f64,
    kind: AnyEntropyKind,
    alpha: Alpha,
) -> Result<f64> {
    if !(0.0..=LN_2).contains(&target_h) {
        return Err(Error::Domain(format!(
            "target entropy {target_h} outside [0, ln 2]"
        )));
    }
    // `zero` is the end with entropy 0, `full` the end with entropy ln 2
    let (mut zero, mut full) = coordinate_range(family);
    let h = |t: f64| coordinate_entropy(family, t, kind, alpha);
    if (h(zero)? - target_h).abs() <= INVERSION_TOL {
        return Ok(zero);
    }
    if (h(full)? - target_h).abs() <= INVERSION_TOL {
        return Ok(full);
    }
    for _ in 0..1100 {
        let mid = 0.5 * (zero + full);
        if mid == zero || mid == full {
            break;
        }
        if h(mid)? < target_h {
            zero = mid;
        } else {
            full = mid;
        }
    }
    let (dz, df) = ((h(zero)? - target_h).abs(), (h(full)? - target_h).abs());
    let (best, gap) = if dz <= df { (zero, dz) } else { (full, df) };
    if !(gap <= INVERSION_TOL) {
        return Err(Error::Construction(format!(
            "{family} inversion for {kind} at alpha={alpha} missed target {target_h} by {gap:e}"
        )));
    }
    Ok(best)
}

/// Family parameter whose channel has entropy `target_h`, by bisection.
pub fn parameter_for_entropy(
    family: ChannelFamily,
    target_h: f64,
    kind: AnyEntropyKind,
    alpha: Alpha,
) -> Result<f64> {
    Ok(coordinate_to_parameter(
        family,
        solve_coordinate(family, target_h, kind, alpha)?,
    ))
}

/// Member of `family` whose `H(X|B)` equals `target_h` within [`INVERSION_TOL`].
pub fn channel_for_entropy(
    family: ChannelFamily,
    target_h: f64,
    kind: AnyEntropyKind,
    alpha: Alpha,
) -> Result<CQChannel> {
    member(family, solve_coordinate(family, target_h, kind, alpha)?)
}

/// `H(W⊞W) − H(W)` for the member `W` of `family` with `H(W) = h`.
pub fn family_delta(
    family: ChannelFamily,
    h: f64,
    kind: AnyEntropyKind,
    alpha: Alpha,
) -> Result<f64> {
    let t = solve_coordinate(family, h, kind, alpha)?;
    Ok(coordinate_check_pair(family, t, kind, alpha)? - h)
}

fn bsc_branch(h1: f64, h2: f64, alpha: Alpha) -> f64 {
    let p1 = inverse_binary_renyi(h1, alpha).expect("clamped entropy");
    let p2 = inverse_binary_renyi(h2, alpha).expect("clamped entropy");
    binary_renyi_unchecked(star(p1, p2), alpha)
}

fn conjecture1_branches(h1: f64, h2: f64, alpha: Alpha) -> (f64, f64) {
    let lower = bsc_branch(h1, h2, alpha);
    let upper = h1 + h2 - LN_2 + bsc_branch((LN_2 - h1).max(0.0), (LN_2 - h2).max(0.0), alpha);
    (lower, upper)
}

/// Conjectured BSC/PSC bound on `H̃↓_α(X₁ + X₂ | B₁B₂)`:
/// `h_α(h_α^{-1}(h₁) ⋆ h_α^{-1}(h₂))` for `h₁ + h₂ ≤ ln 2` and
/// `h₁ + h₂ − ln 2 + h_α(h_α^{-1}(ln 2 − h₁) ⋆ h_α^{-1}(ln 2 − h₂))` above.
///
/// Inputs are clamped to `[0, ln 2]`.
pub fn conjecture1_bound(h1: f64, h2: f64, alpha: Alpha) -> f64 {
    let h1 = h1.clamp(0.0, LN_2);
    let h2 = h2.clamp(0.0, LN_2);
    let (lower, upper) = conjecture1_branches(h1, h2, alpha);
    if h1 + h2 == LN_2 {
        debug_assert!(
            (lower - upper).abs() <= SEAM_TOL,
            "branches disagree on the seam"
        );
    }
    if h1 + h2 <= LN_2 {
        lower
    } else {
        upper
    }
}

/// Conjectured erasure bound on `H̃↓_α(X₁ + X₂ | B₁B₂)`; the same expression
/// as the classical Hayashi erasure formula.
pub fn conjecture2_bound(h1: f64, h2: f64, alpha: Alpha) -> Result<f64> {
    crate::classical::bec_bound_hayashi(h1, h2, alpha)
}

/// Difference of the two branches of [`conjecture1_bound`] at a point, for
/// continuity checks on the seam.
pub fn conjecture1_seam_gap(h1: f64, alpha: Alpha) -> Result<f64> {
    let h1 = clamp_binary_entropy(h1)?;
    let (lower, upper) = conjecture1_branches(h1, LN_2 - h1, alpha);
    Ok(lower - upper)
}

/// Points `(H(W), H(W⊞W) − H(W))` along one family, on a grid uniform in `H(W)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundCurve {
    pub alpha: Alpha,
    pub entropy_kind: AnyEntropyKind,
    pub family: ChannelFamily,
    pub points: Vec<(f64, f64)>,
}

pub fn curve_family(
    family: ChannelFamily,
    kind: AnyEntropyKind,
    alpha: Alpha,
    grid_size: usize,
) -> Result<BoundCurve> {
    if grid_size < 2 {
        return Err(Error::Domain(format!("grid size {grid_size} below 2")));
    }
    let step = LN_2 / (grid_size - 1) as f64;
    let points = (0..grid_size)
        .into_par_iter()
        .map(|i| {
            let h = if i + 1 == grid_size {
                LN_2
            } else {
                i as f64 * step
            };
            Ok((h, family_delta(family, h, kind, alpha)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundCurve {
        alpha,
        entropy_kind: kind,
        family,
        points,
    })
}

pub const CURVE_CSV_HEADER: [&str; 5] = ["h_in", "delta_h", "family", "alpha", "entropy_kind"];

/// Formats a float with 17 significant digits.
pub(crate) fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_curves<W: Write>(out: W, curves: &[BoundCurve]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CURVE_CSV_HEADER)?;
    for c in curves {
        for &(h, d) in &c.points {
            w.write_record([
                fmt_float(h),
                fmt_float(d),
                c.family.tag().to_string(),
                fmt_float(c.alpha.value()),
                c.entropy_kind.tag().to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

pub fn write_curves_csv(path: &Path, curves: &[BoundCurve]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_curves(file, curves)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{bec_bound_hayashi, bsc_bound_hayashi};
    use crate::quantum::prop8_alpha2_formula;

    fn a(v: f64) -> Alpha {
        Alpha::new(v).unwrap()
    }

    const TILDE: AnyEntropyKind = AnyEntropyKind::Quantum(QEntropyKind::TildeDown);

    #[test]
    fn inversion_examples() {
        let p = parameter_for_entropy(ChannelFamily::Bsc, 0.0, TILDE, a(2.0)).unwrap();
        assert_eq!(p, 0.0);
        let p = parameter_for_entropy(ChannelFamily::Bsc, LN_2, TILDE, a(2.0)).unwrap();
        assert_eq!(p, 0.5);
        let p = parameter_for_entropy(ChannelFamily::Bec, -(0.75f64.ln()), TILDE, a(2.0)).unwrap();
        assert!((p - 0.5).abs() < 1e-9);
        assert!(matches!(
            channel_for_entropy(ChannelFamily::Bsc, 0.8, TILDE, a(2.0)),
            Err(Error::Domain(_))
        ));
        assert!(channel_for_entropy(ChannelFamily::Bec, -0.1, TILDE, a(2.0)).is_err());
    }

    #[test]
    fn inversion_hits_target_for_every_kind() {
        let kinds = ["hayashi", "arimoto", "tilde_down", "bar_up", "bar_down"];
        for tag in kinds {
            let kind: AnyEntropyKind = tag.parse().unwrap();
            for fam in ChannelFamily::ALL {
                if fam == ChannelFamily::Psc && matches!(kind, AnyEntropyKind::Classical(_)) {
                    assert!(parameter_for_entropy(fam, 0.3, kind, a(1.5)).is_err());
                    continue;
                }
                for &al in &[0.3, 1.0, 1.5, 5.0] {
                    if fam == ChannelFamily::Psc && tag == "bar_down" && al > 2.0 {
                        continue;
                    }
                    for &h in &[0.01, 0.1, 0.4, 0.68] {
                        let t = solve_coordinate(fam, h, kind, a(al)).unwrap();
                        let got = coordinate_entropy(fam, t, kind, a(al)).unwrap();
                        assert!(
                            (got - h).abs() <= INVERSION_TOL,
                            "{fam} {tag} {al} {h}: {got}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn pure_states_reach_close_to_ln2() {
        // ρ_B = diag(cos²θ, sin²θ) is exact, so its tiny eigenvalue survives
        for &h in &[0.69, 0.692] {
            let t = solve_coordinate(ChannelFamily::Psc, h, TILDE, a(5.0)).unwrap();
            let exact = LN_2 + 5.0 / -4.0 * (t.cos().powf(0.4) + t.sin().powf(0.4)).ln();
            assert!((exact - h).abs() < 1e-10, "{h}: {exact}");
        }
    }

    #[test]
    fn tiny_targets_on_classical_outputs() {
        let p = parameter_for_entropy(ChannelFamily::Bsc, 1e-6, TILDE, a(0.3)).unwrap();
        let q = inverse_binary_renyi(1e-6, a(0.3)).unwrap();
        assert!((p - q).abs() <= 1e-6 * q, "{p} {q}");
    }

    #[test]
    fn petz_down_is_not_monotone_on_pure_states_beyond_two() {
        // (1/(1−α)) ln(2^{1−α}(c^{2(2−α)} + s^{2(2−α)})) dips below zero
        let kind: AnyEntropyKind = QEntropyKind::BarDown.into();
        let h = coordinate_entropy(ChannelFamily::Psc, 0.1, kind, a(5.0)).unwrap();
        assert!(h < 0.0);
        assert!(parameter_for_entropy(ChannelFamily::Psc, 0.01, kind, a(5.0)).is_err());
    }

    #[test]
    fn psc_inversion_close_to_ln2() {
        let t = solve_coordinate(ChannelFamily::Psc, 0.686, TILDE, a(5.0)).unwrap();
        // closed form for pure states: ln 2 + α/(1−α) ln(cos^{2/α}θ + sin^{2/α}θ)
        let exact = LN_2 + 5.0 / -4.0 * (t.cos().powf(0.4) + t.sin().powf(0.4)).ln();
        assert!((exact - 0.686).abs() < 1e-10);
    }

    #[test]
    fn conjecture1_examples() {
        for &al in &[0.5, 2.0, 5.0] {
            for &h in &[0.0, 0.2, LN_2] {
                assert!((conjecture1_bound(0.0, h, a(al)) - h).abs() < 1e-12);
            }
        }
        let h = 0.198_450_938_723_838_3;
        let v = conjecture1_bound(h, h, a(2.0));
        assert!((v - 0.349_841).abs() < 1e-6);
        assert!((v - prop8_alpha2_formula(h, h).unwrap()).abs() < 1e-12);
        assert!((v - bsc_bound_hayashi(h, h, a(2.0)).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn conjecture1_seam_continuity() {
        for &al in &[0.3, 0.5, 1.0, 1.7, 2.0, 3.0, 5.0] {
            for i in 0..=20 {
                let h1 = LN_2 * i as f64 / 20.0;
                let gap = conjecture1_seam_gap(h1, a(al)).unwrap();
                assert!(gap.abs() <= SEAM_TOL, "alpha {al}, h1 {h1}: {gap:e}");
            }
        }
    }

    #[test]
    fn conjecture1_symmetry() {
        for &al in &[0.5, 1.2, 2.0, 3.0, 5.0] {
            for &(h1, h2) in &[(0.1, 0.2), (0.05, 0.6), (0.4, 0.5), (0.3, 0.39)] {
                let lhs = conjecture1_bound(h1, h2, a(al)) - 0.5 * (h1 + h2);
                let (g1, g2) = (LN_2 - h1, LN_2 - h2);
                let rhs = conjecture1_bound(g1, g2, a(al)) - 0.5 * (g1 + g2);
                assert!((lhs - rhs).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn conjecture2_examples() {
        assert!((conjecture2_bound(0.0, 0.3, a(2.0)).unwrap() - 0.3).abs() < 1e-12);
        assert!((conjecture2_bound(LN_2, LN_2, a(2.0)).unwrap() - LN_2).abs() < 1e-12);
        let h = -(0.75f64.ln());
        let v = conjecture2_bound(h, h, a(2.0)).unwrap();
        assert!((v + 0.625f64.ln()).abs() < 1e-12);
        let w = CQChannel::bec(0.5).unwrap();
        let exact = check_entropy(&w, &w, QEntropyKind::TildeDown, a(2.0)).unwrap();
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn curve_endpoints_and_bsc_point() {
        for fam in ChannelFamily::ALL {
            for kind in QEntropyKind::ALL {
                let c = curve_family(fam, kind.into(), a(1.7), 5).unwrap();
                let (h0, d0) = c.points[0];
                let (h1, d1) = *c.points.last().unwrap();
                assert_eq!((h0, h1), (0.0, LN_2));
                assert!(
                    d0.abs() < 1e-10 && d1.abs() < 1e-10,
                    "{fam} {kind}: {d0} {d1}"
                );
            }
        }
        let h = 0.198_450_938_723_838_3;
        let p = parameter_for_entropy(ChannelFamily::Bsc, h, TILDE, a(2.0)).unwrap();
        let d = TILDE.check_pair(ChannelFamily::Bsc, p, a(2.0)).unwrap() - h;
        assert!((d - 0.151_390).abs() < 1e-6);
    }

    #[test]
    fn classical_curves_follow_closed_forms() {
        let kind = AnyEntropyKind::Classical(EntropyKind::Hayashi);
        for &al in &[0.5, 2.0, 4.0] {
            let bsc = curve_family(ChannelFamily::Bsc, kind, a(al), 9).unwrap();
            let bec = curve_family(ChannelFamily::Bec, kind, a(al), 9).unwrap();
            for (&(h, d), &(_, e)) in bsc.points.iter().zip(&bec.points) {
                assert!((d + h - bsc_bound_hayashi(h, h, a(al)).unwrap()).abs() < 1e-9);
                assert!((e + h - bec_bound_hayashi(h, h, a(al)).unwrap()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn csv_layout() {
        let c = curve_family(ChannelFamily::Bec, TILDE, a(2.0), 3).unwrap();
        let mut buf = Vec::new();
        write_curves(&mut buf, &[c]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "h_in,delta_h,family,alpha,entropy_kind");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].ends_with(",bec,2.0000000000000000e0,tilde_down"));
        assert!(curve_family(ChannelFamily::Bec, TILDE, a(2.0), 1).is_err());
    }
}
