//! The tangential correspondence `P -> T_P . C - 2P` and the curve `X_C` of
//! pairs `(P, Q)` with `Q` in `T(P)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElement};
use crate::forms::{BinaryForm, TernaryForm};
use crate::quartic::{PlaneQuartic, ProjLine, ProjPoint};
use crate::special;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangentialImage {
    pub point: ProjPoint,
    pub tangent: ProjLine,
    /// `c2 s^2 + c3 s t + c4 t^2` in the tangent's basis `(P, R)`.
    pub residual: BinaryForm,
    /// Distinct points of the support defined over the point's field.
    pub rational: Vec<ProjPoint>,
    /// `T(P) = 2Q` for a single point `Q`.
    pub double: bool,
}

pub fn tangential_image(c: &PlaneQuartic, p: &ProjPoint) -> Result<TangentialImage> {
    let (tangent, residual) = c.tangent_residual(p)?;
    let pat = residual.roots_with_multiplicity()?;
    let rational = pat.roots.iter().map(|&(r, _)| tangent.point_at(r)).collect();
    let double = pat.roots.iter().any(|r| r.1 == 2) || pat.residual.iter().any(|r| r.1 == 2);
    Ok(TangentialImage { point: p.clone(), tangent, residual, rational, double })
}

/// Number of distinct roots in `P^1(K)` of a nonzero binary quadratic form.
pub fn quadratic_root_count(k: &FieldCtx, c2: FieldElement, c3: FieldElement, c4: FieldElement) -> usize {
    if k.characteristic() == 2 {
        if c3.is_zero() {
            return 1;
        }
        if c2.is_zero() || c4.is_zero() {
            return 2;
        }
        // c2 x^2 + c3 x + c4 with x = (c3 / c2) y gives y^2 + y + c2 c4 / c3^2
        let w = k.div(k.mul(c2, c4), k.square(c3)).expect("nonzero");
        return if k.absolute_trace(w) == 0 { 2 } else { 0 };
    }
    let disc = k.sub(k.square(c3), k.mul_int(k.mul(c2, c4), 4));
    if disc.is_zero() {
        1
    } else if k.is_square(disc) {
        2
    } else {
        0
    }
}

/// `#X_C(F_{q^m})`: the sum over `P` in `C(F_{q^m})` of the number of
/// distinct rational points in the support of `T(P)`.
pub fn count_xc_points(c: &PlaneQuartic, m: usize, budget: u128) -> Result<u128> {
    let k = FieldCtx::extension_of_degree(c.ctx(), m)?;
    count_xc_points_over(c, &k, budget)
}

pub fn count_xc_points_over(c: &PlaneQuartic, k: &FieldCtx, budget: u128) -> Result<u128> {
    let mut total = 0u128;
    let mut err = None;
    c.for_each_point(k, budget, |p| {
        if err.is_some() {
            return;
        }
        match c.tangent_residual(&p) {
            Ok((_, h)) => {
                let cf = h.coeffs();
                total += quadratic_root_count(k, cf[0], cf[1], cf[2]) as u128;
            }
            Err(e) => err = Some(e),
        }
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(total),
    }
}

/// Largest base-field size for which the Frobenius test is attempted.
pub const FROBENIUS_TEST_LIMIT: u128 = 1 << 10;

/// `x^q F_x + y^q F_y + z^q F_z` is divisible by `F`.
pub fn is_frobenius_nonclassical(c: &PlaneQuartic) -> Result<bool> {
    let k = c.ctx();
    let q = k.order();
    if q > FROBENIUS_TEST_LIMIT {
        return Err(Error::FieldTooLarge(format!("Frobenius test limited to q <= {FROBENIUS_TEST_LIMIT}")));
    }
    let q = q as u32;
    let [fx, fy, fz] = c.gradient();
    let mono = |e: [u32; 3]| TernaryForm::monomial(k, k.one(), e);
    let g = mono([q, 0, 0]).mul(fx).add(&mono([0, q, 0]).mul(fy)).add(&mono([0, 0, q]).mul(fz));
    if g.is_zero() {
        return Ok(true);
    }
    Ok(g.divide(c.form()).is_some())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenusConstants {
    pub valence: i64,
    pub deg_pi1: i64,
    pub deg_pi2: i64,
    pub a: i64,
    pub b: i64,
    /// `a b - 15`.
    pub arithmetic_genus: i64,
    /// From Riemann-Hurwitz for the double cover `X_C -> C`.
    pub hurwitz_genus: i64,
}

/// Constants for a plane quartic (`d = 4`, genus 3, 28 bitangents).
pub fn genus_constants() -> GenusConstants {
    let d: i64 = 4;
    let g_c = (d - 1) * (d - 2) / 2;
    let valence = 2;
    let deg_pi1 = d - 2;
    // class of the curve minus the tangent at the base point, counted twice
    let deg_pi2 = d * (d - 1) - 2;
    let a = deg_pi2 + valence;
    let b = deg_pi1 + valence;
    let arithmetic_genus = a * b - 15;
    let bitangents = 28;
    let ramification = 2 * bitangents;
    // 2 g - 2 = deg_pi1 (2 g_C - 2) + ramification
    let hurwitz_genus = (deg_pi1 * (2 * g_c - 2) + ramification + 2) / 2;
    GenusConstants { valence, deg_pi1, deg_pi2, a, b, arithmetic_genus, hurwitz_genus }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum XcVerdict {
    Irreducible,
    Reducible,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CensusRow {
    pub m: usize,
    pub count: u128,
    /// `66 q^(m/2) - |N - (q^m + 1)|`.
    pub irr_margin: f64,
    /// `12 q^(m/2) + slack - |N - 2 (q^m + 1)|`.
    pub red_margin: f64,
    pub verdict: XcVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrespondenceCensus {
    pub rows: Vec<CensusRow>,
    pub verdict: XcVerdict,
    pub reason: String,
}

/// Points two genus-3 components may share, counted once in a set count.
pub const CROSSING_SLACK: f64 = 28.0;

pub fn census_row(q: u128, m: usize, count: u128) -> CensusRow {
    let qm = (q as f64).powi(m as i32);
    let root = qm.sqrt();
    let n = count as f64;
    let pi = genus_constants().arithmetic_genus as f64;
    let irr_margin = 2.0 * pi * root - (n - (qm + 1.0)).abs();
    let red_margin = 12.0 * root + CROSSING_SLACK - (n - 2.0 * (qm + 1.0)).abs();
    let verdict = match (irr_margin >= 0.0, red_margin >= 0.0) {
        (true, false) => XcVerdict::Irreducible,
        (false, true) => XcVerdict::Reducible,
        _ => XcVerdict::Inconclusive,
    };
    CensusRow { m, count, irr_margin, red_margin, verdict }
}

/// Smallest `m` at which the two windows are disjoint.
pub fn separating_degree(q: u128) -> usize {
    let pi = genus_constants().arithmetic_genus as f64;
    (1..)
        .find(|&m| {
            let qm = (q as f64).powi(m);
            qm + 1.0 - (2.0 * pi + 12.0) * qm.sqrt() - CROSSING_SLACK > 0.0
        })
        .unwrap() as usize
}

/// Irreducibility of `X_C`. In odd characteristic it follows from the
/// existence of a bitangency point that is not a hyperflex (or, for the
/// characteristic-3 Fermat class, from a direct argument). In characteristic
/// 2 two consecutive counts are placed in the Weil windows.
pub fn xc_irreducibility_verdict(c: &PlaneQuartic, budget: u128) -> Result<CorrespondenceCensus> {
    let k = c.ctx();
    if k.characteristic() != 2 {
        let fermat_class = k.characteristic() == 3 && special::char3_flex_conic(c).map(|h| h.degenerate).unwrap_or(false);
        let reason = if fermat_class { "char-3 Fermat class" } else { "non-hyperflex bitangency point" };
        return Ok(CorrespondenceCensus { rows: Vec::new(), verdict: XcVerdict::Irreducible, reason: reason.into() });
    }
    let q = k.order();
    let m0 = separating_degree(q);
    let mut rows = Vec::new();
    for m in [m0, m0 + 1] {
        let n = count_xc_points(c, m, budget)?;
        rows.push(census_row(q, m, n));
    }
    let verdict = if rows.iter().all(|r| r.verdict == rows[0].verdict) { rows[0].verdict } else { XcVerdict::Inconclusive };
    Ok(CorrespondenceCensus { rows, verdict, reason: "Weil window separation".into() })
}

/// `66 q^(m/2) - |#X_C(F_{q^m}) - (q^m + 1)|`.
pub fn aubry_margin(q: u128, m: usize, count: u128) -> f64 {
    census_row(q, m, count).irr_margin
}
