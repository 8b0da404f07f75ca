//! Seeded experiments over many curves.
//!
//! Sample `i` of a run with master seed `s` uses the curve
//! `PlaneQuartic::random_smooth(field, sample_seed(s, i))`, so rows do not
//! depend on scheduling.

use std::collections::HashMap;
use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::field::FieldCtx;
use crate::forms::{coefficient_text, monomial_count, TernaryForm};
use crate::incidence::{find_split_line, find_split_tangent, pencil_report};
use crate::quartic::{fixtures, serre_weil_floor, Pgl3, PlaneQuartic};
use crate::special::{flexes_rational, is_galois_point, Galois};
use crate::tangential::{xc_irreducibility_verdict, XcVerdict};

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub field: FieldCtx,
    pub samples: usize,
    pub seed: u64,
    pub budget: u128,
}

/// splitmix64 step.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn sample_seed(master: u64, index: usize) -> u64 {
    mix(mix(master) ^ index as u64)
}

pub fn sample_curve(cfg: &ExperimentConfig, index: usize) -> PlaneQuartic {
    PlaneQuartic::random_smooth(&cfg.field, sample_seed(cfg.seed, index))
}

/// `sum_{k=1}^m (-1)^(k+1) / k!`, the probability that a random permutation
/// of `m` letters has a fixed point.
pub fn fixed_point_probability(m: u32) -> BigRational {
    let mut sum = BigRational::zero();
    let mut fact = BigInt::one();
    for k in 1..=m {
        fact *= BigInt::from(k);
        let term = BigRational::new(BigInt::one(), fact.clone());
        if k % 2 == 1 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum
}

/// `e` to 30 decimal places.
pub fn e_approx() -> BigRational {
    let digits: BigInt = "2718281828459045235360287471352".parse().unwrap();
    BigRational::new(digits, BigInt::from(10u32).pow(30))
}

/// Decimal expansion truncated to `places` digits.
pub fn decimal(r: &BigRational, places: u32) -> String {
    let scale = BigInt::from(10u32).pow(places);
    let neg = r.is_negative();
    let a = r.abs();
    let v = (a.numer() * &scale) / a.denom();
    let s = v.to_string();
    let s = format!("{:0>width$}", s, width = places as usize + 1);
    let (int, frac) = s.split_at(s.len() - places as usize);
    format!("{}{}.{}", if neg { "-" } else { "" }, int, frac)
}

pub fn to_f64(r: &BigRational) -> f64 {
    decimal(r, 17).parse().unwrap()
}

/// Coefficient encodings, accepted back by `coeffs:` curve sources.
fn curve_text(c: &PlaneQuartic) -> String {
    coefficient_text(c.form())
}

#[derive(Clone, Debug, Serialize)]
pub struct SplitLineRow {
    pub index: usize,
    pub seed: u64,
    pub curve: String,
    pub points: usize,
    pub floor: i128,
    pub split_line: String,
    pub violation: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Sweep<R> {
    pub rows: Vec<R>,
    pub violations: usize,
}

/// Every sampled curve is searched for a line meeting it in rational points
/// only; a curve without one, or with fewer points than the lower Weil
/// bound, is a violation.
pub fn split_line_sweep(cfg: &ExperimentConfig) -> Result<Sweep<SplitLineRow>> {
    let rows = (0..cfg.samples)
        .into_par_iter()
        .map(|i| -> Result<SplitLineRow> {
            let c = sample_curve(cfg, i);
            let points = c.count_points(c.ctx(), cfg.budget)?;
            let floor = serre_weil_floor(c.ctx().order());
            let line = find_split_line(&c)?;
            let violation = line.is_none() || (points as i128) < floor;
            Ok(SplitLineRow {
                index: i,
                seed: sample_seed(cfg.seed, i),
                curve: curve_text(&c),
                points,
                floor,
                split_line: line.map(|d| d.line.to_string()).unwrap_or_default(),
                violation,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let violations = rows.iter().filter(|r| r.violation).count();
    Ok(Sweep { rows, violations })
}

#[derive(Clone, Debug, Serialize)]
pub struct SplitTangentRow {
    pub index: usize,
    pub seed: u64,
    pub curve: String,
    pub points: usize,
    pub tangency_point: String,
    pub tangent: String,
    pub violation: bool,
}

/// Every sampled curve is searched for a tangent meeting it in rational
/// points only.
pub fn split_tangent_sweep(cfg: &ExperimentConfig) -> Result<Sweep<SplitTangentRow>> {
    let rows = (0..cfg.samples)
        .into_par_iter()
        .map(|i| -> Result<SplitTangentRow> {
            let c = sample_curve(cfg, i);
            let points = c.count_points(c.ctx(), cfg.budget)?;
            let found = find_split_tangent(&c, cfg.budget)?;
            Ok(SplitTangentRow {
                index: i,
                seed: sample_seed(cfg.seed, i),
                curve: curve_text(&c),
                points,
                tangency_point: found.as_ref().map(|s| s.point.to_string()).unwrap_or_default(),
                tangent: found.as_ref().map(|s| s.divisor.line.to_string()).unwrap_or_default(),
                violation: found.is_none(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let violations = rows.iter().filter(|r| r.violation).count();
    Ok(Sweep { rows, violations })
}

#[derive(Clone, Debug, Serialize)]
pub struct ChebotarevRow {
    pub index: usize,
    pub seed: u64,
    pub curve: String,
    pub point: String,
    pub galois: String,
    pub n: usize,
    pub d: usize,
    pub lower: f64,
    pub upper: f64,
    pub within: bool,
    pub split_tangent: bool,
    pub flagged: bool,
}

/// For each sample, a rational point drawn uniformly among the non-Galois
/// points and the count of completely split fibers through it.
pub fn chebotarev_survey(cfg: &ExperimentConfig) -> Result<Sweep<ChebotarevRow>> {
    let rows = (0..cfg.samples)
        .into_par_iter()
        .map(|i| -> Result<Option<ChebotarevRow>> {
            let seed = sample_seed(cfg.seed, i);
            let c = PlaneQuartic::random_smooth(&cfg.field, seed);
            let mut pts = c.points_over(c.ctx(), cfg.budget)?;
            let mut rng = ChaCha8Rng::seed_from_u64(mix(seed));
            while !pts.is_empty() {
                let p = pts.swap_remove(rng.gen_range(0..pts.len()));
                let g = is_galois_point(&c, &p, 2)?;
                if g.verdict == Galois::Galois {
                    continue;
                }
                let r = pencil_report(&c, &p)?;
                return Ok(Some(ChebotarevRow {
                    index: i,
                    seed,
                    curve: curve_text(&c),
                    point: p.to_string(),
                    galois: g.verdict.as_str().into(),
                    n: r.n,
                    d: r.d,
                    lower: r.lower,
                    upper: r.upper,
                    within: r.within,
                    split_tangent: r.split_tangent,
                    flagged: r.flagged,
                }));
            }
            Ok(None)
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<ChebotarevRow> = rows.into_iter().flatten().collect();
    let violations = rows.iter().filter(|r| !r.within || r.d > 10).count();
    Ok(Sweep { rows, violations })
}

#[derive(Clone, Debug, Serialize)]
pub struct FlexRow {
    pub index: usize,
    pub seed: u64,
    pub rational_flexes: usize,
    pub has_flex: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlexSurvey {
    pub rows: Vec<FlexRow>,
    pub estimate: Option<f64>,
    /// 95% Wilson interval.
    pub interval: Option<(f64, f64)>,
    pub reference_name: String,
    pub reference: f64,
}

pub fn wilson_interval(hits: usize, n: usize) -> (f64, f64) {
    let z = 1.959_963_984_540_054_f64;
    let nf = n as f64;
    let p = hits as f64 / nf;
    let denom = 1.0 + z * z / nf;
    let centre = (p + z * z / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z * z / (4.0 * nf * nf)).sqrt() / denom;
    (centre - half, centre + half)
}

/// Fraction of sampled curves with a rational flex, compared with the
/// fixed-point probability for 8 letters in characteristic 3 and 24
/// otherwise.
pub fn flex_probability_survey(cfg: &ExperimentConfig) -> Result<FlexSurvey> {
    let rows = (0..cfg.samples)
        .into_par_iter()
        .map(|i| -> Result<FlexRow> {
            let c = sample_curve(cfg, i);
            let n = flexes_rational(&c, 1, cfg.budget)?.len();
            Ok(FlexRow { index: i, seed: sample_seed(cfg.seed, i), rational_flexes: n, has_flex: n > 0 })
        })
        .collect::<Result<Vec<_>>>()?;
    let m = if cfg.field.characteristic() == 3 { 8 } else { 24 };
    let hits = rows.iter().filter(|r| r.has_flex).count();
    let (estimate, interval) = if rows.is_empty() {
        (None, None)
    } else {
        (Some(hits as f64 / rows.len() as f64), Some(wilson_interval(hits, rows.len())))
    };
    Ok(FlexSurvey {
        rows,
        estimate,
        interval,
        reference_name: format!("p{m}"),
        reference: to_f64(&fixed_point_probability(m)),
    })
}

/// All 168 elements of `GL_3(F_2) = PGL_3(F_2)`.
pub fn pgl3_f2() -> Vec<Pgl3> {
    let k = FieldCtx::prime(2).unwrap();
    (0u32..512)
        .filter_map(|bits| {
            let m = [0, 1, 2].map(|r| [0, 1, 2].map(|c| ((bits >> (3 * r + c)) & 1) as i64));
            Pgl3::from_ints(&k, m).ok()
        })
        .collect()
}

fn form_bits(f: &TernaryForm) -> u16 {
    f.coeffs().iter().enumerate().fold(0, |acc, (i, c)| acc | (u16::from(!c.is_zero()) << i))
}

fn form_from_bits(k: &FieldCtx, bits: u16) -> TernaryForm {
    TernaryForm::new(k, 4, (0..monomial_count(4)).map(|i| k.from_u64(((bits >> i) & 1) as u64)).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct CensusClass {
    /// Smallest coefficient bitmask in the orbit.
    pub key: u16,
    pub representative: String,
    pub orbit_size: usize,
    pub verdict: XcVerdict,
    pub counts: Vec<(usize, u128)>,
    pub frobenius_nonclassical: bool,
    pub klein_twist: Option<u8>,
}

#[derive(Clone, Debug, Serialize)]
pub struct F2Census {
    pub forms: usize,
    pub orbits: usize,
    pub smooth_forms: usize,
    pub smooth_pointless_forms: usize,
    pub classes: Vec<CensusClass>,
    /// Keys of classes with a reducible verdict.
    pub reducible: Vec<u16>,
    pub klein_keys: [u16; 2],
    /// The reducible classes are exactly the two Klein-twist classes.
    pub matches_klein: bool,
}

/// Smooth quartics over `F_2` without rational points, up to `PGL_3(F_2)`,
/// with the reducibility verdict for `X_C`.
pub fn f2_census(budget: u128) -> Result<F2Census> {
    let k = FieldCtx::prime(2)?;
    let group = pgl3_f2();
    let n = 1usize << monomial_count(4);
    let mut key_of: Vec<u16> = vec![0; n];
    let mut seen = vec![false; n];
    let mut orbits: Vec<(u16, usize)> = Vec::new();
    for bits in 1..n as u32 {
        if seen[bits as usize] {
            continue;
        }
        let f = form_from_bits(&k, bits as u16);
        let mut members: Vec<u16> = group.iter().map(|g| form_bits(&f.substitute_linear(g.matrix()))).collect();
        members.sort_unstable();
        members.dedup();
        for &m in &members {
            seen[m as usize] = true;
            key_of[m as usize] = bits as u16;
        }
        orbits.push((bits as u16, members.len()));
    }
    let klein_keys = [
        key_of[form_bits(fixtures::klein_twist_1().form()) as usize],
        key_of[form_bits(fixtures::klein_twist_2().form()) as usize],
    ];
    let mut classes = Vec::new();
    let mut smooth_forms = 0;
    let mut smooth_pointless_forms = 0;
    let mut pointless_smooth: Vec<(u16, usize, PlaneQuartic)> = Vec::new();
    for &(key, size) in &orbits {
        let c = PlaneQuartic::new(form_from_bits(&k, key))?;
        if !c.is_smooth() {
            continue;
        }
        smooth_forms += size;
        if c.count_points(&k, budget)? == 0 {
            smooth_pointless_forms += size;
            pointless_smooth.push((key, size, c));
        }
    }
    let verdicts = pointless_smooth
        .par_iter()
        .map(|(_, _, c)| -> Result<_> {
            Ok((xc_irreducibility_verdict(c, budget)?, crate::tangential::is_frobenius_nonclassical(c)?))
        })
        .collect::<Result<Vec<_>>>()?;
    for ((key, size, c), (census, fnc)) in pointless_smooth.into_iter().zip(verdicts) {
        classes.push(CensusClass {
            key,
            representative: crate::forms::serialize_ternary(c.form()),
            orbit_size: size,
            verdict: census.verdict,
            counts: census.rows.iter().map(|r| (r.m, r.count)).collect(),
            frobenius_nonclassical: fnc,
            klein_twist: klein_keys.iter().position(|&kk| kk == key).map(|i| i as u8 + 1),
        });
    }
    let reducible: Vec<u16> = classes.iter().filter(|c| c.verdict == XcVerdict::Reducible).map(|c| c.key).collect();
    let mut want = klein_keys.to_vec();
    want.sort_unstable();
    let mut got = reducible.clone();
    got.sort_unstable();
    let inconclusive = classes.iter().any(|c| c.verdict == XcVerdict::Inconclusive);
    Ok(F2Census {
        forms: n - 1,
        orbits: orbits.len(),
        smooth_forms,
        smooth_pointless_forms,
        classes,
        reducible,
        klein_keys,
        matches_klein: got == want && !inconclusive,
    })
}

/// Orbit key of a form over `F_2` under `PGL_3(F_2)`.
pub fn f2_orbit_key(f: &TernaryForm) -> u16 {
    pgl3_f2().iter().map(|g| form_bits(&f.substitute_linear(g.matrix()))).min().unwrap()
}

/// Writes rows as CSV with a header.
pub fn write_csv<T: Serialize, W: Write>(rows: &[T], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(std::io::Error::other)?;
    }
    w.flush()
}

/// Counts of case labels over all lines, for frequency reports.
pub fn case_frequencies(c: &PlaneQuartic) -> Result<HashMap<u8, usize>> {
    let mut out = HashMap::new();
    for l in crate::quartic::lines(c.ctx()) {
        let d = crate::incidence::intersection_divisor(c, &l)?;
        *out.entry(d.case).or_insert(0) += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p8_exact() {
        let p8 = fixed_point_probability(8);
        assert_eq!(p8, BigRational::new(25487.into(), 40320.into()));
        assert_eq!(fixed_point_probability(1), BigRational::one());
        assert_eq!(decimal(&p8, 7), "0.6321180");
    }

    #[test]
    fn p24_close_to_limit() {
        let p24 = fixed_point_probability(24);
        let p8 = fixed_point_probability(8);
        let eps5 = BigRational::new(1.into(), 100000.into());
        assert!((&p24 - &p8).abs() <= eps5);
        let limit = BigRational::one() - e_approx().recip();
        let eps20 = BigRational::new(1.into(), BigInt::from(10).pow(20));
        assert!((&p24 - &limit).abs() < eps20);
    }

    #[test]
    fn group_has_168_elements() {
        assert_eq!(pgl3_f2().len(), 168);
    }

    #[test]
    fn klein_twists_are_not_equivalent() {
        let a = f2_orbit_key(fixtures::klein_twist_1().form());
        let b = f2_orbit_key(fixtures::klein_twist_2().form());
        assert_ne!(a, b);
    }

    #[test]
    fn seeds_differ_per_index() {
        assert_ne!(sample_seed(0, 0), sample_seed(0, 1));
        assert_eq!(sample_seed(7, 3), sample_seed(7, 3));
    }

    #[test]
    fn empty_flex_survey() {
        let cfg = ExperimentConfig { field: FieldCtx::prime(5).unwrap(), samples: 0, seed: 0, budget: 1 << 20 };
        let s = flex_probability_survey(&cfg).unwrap();
        assert!(s.estimate.is_none());
    }

    #[test]
    fn wilson_contains_estimate() {
        let (lo, hi) = wilson_interval(63, 100);
        assert!(lo < 0.63 && 0.63 < hi);
    }
}
