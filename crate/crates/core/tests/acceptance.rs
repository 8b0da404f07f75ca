//! End-to-end checks at full scale. Prints one line per criterion and exits
//! non-zero when any fails.

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use quartic_core::forms::TernaryForm;
use quartic_core::incidence::intersection_divisor;
use quartic_core::lab::{self, ExperimentConfig};
use quartic_core::quartic::{fixtures, serre_weil_floor, PlaneQuartic, ProjLine, ProjPoint, DEFAULT_BUDGET};
use quartic_core::special::{
    bitangents, char3_flex_conic, char3_identity, flexes_rational, geometric_flexes, hessian_flexes,
};
use quartic_core::tangential::{aubry_margin, count_xc_points, genus_constants};
use quartic_core::FieldCtx;

const BUDGET: u128 = DEFAULT_BUDGET;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn field(p: u64, n: u32) -> FieldCtx {
    FieldCtx::new(p, n, None).expect("field")
}

fn cfg(k: &FieldCtx, samples: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig { field: k.clone(), samples, seed, budget: BUDGET }
}

fn char3_conic_identity() -> Outcome {
    let mut flexes_checked = 0;
    for (k, n, seed) in [(field(3, 3), 200, 11u64), (field(3, 1), 50, 12)] {
        let run = cfg(&k, n, seed);
        for i in 0..n {
            let c = lab::sample_curve(&run, i);
            let id = char3_identity(c.form()).map_err(err)?;
            let h_tilde = id.h_tilde.clone().ok_or_else(|| format!("sample {i}: not divisible by z^2"))?;
            ensure(id.support_ok, || format!("sample {i}: support of h~ {:?}", h_tilde.terms().collect::<Vec<_>>()))?;
            // Recombine both sides.
            let f = c.form();
            let mut cubic = TernaryForm::zero(&k, 3);
            cubic.set_coeff([3, 0, 0], id.a);
            cubic.set_coeff([0, 3, 0], id.b);
            cubic.set_coeff([0, 0, 3], id.c);
            let z = TernaryForm::monomial(&k, k.one(), [0, 0, 1]);
            let lhs = id.two_hbar.sub(&f.mul(f).scale(f.coeff([2, 2, 0]))).sub(&f.mul(&cubic).mul(&z));
            ensure(lhs == h_tilde.mul(&z).mul(&z), || format!("sample {i}: identity fails"))?;
            let conic = char3_flex_conic(&c).map_err(err)?;
            for e in 1..=2 {
                let ext = FieldCtx::extension_of_degree(&k, e).map_err(err)?;
                let h = conic.h.lift(&ext);
                for fl in flexes_rational(&c, e, BUDGET).map_err(err)? {
                    flexes_checked += 1;
                    ensure(h.eval(fl.point.coords(), &ext).is_zero(), || {
                        format!("sample {i}: flex {} off the conic", fl.point)
                    })?;
                }
            }
        }
    }
    Ok(format!("250 curves, {flexes_checked} flexes on the conic"))
}

fn fermat_degeneracy() -> Outcome {
    let k3 = field(3, 1);
    let c = fixtures::fermat(&k3);
    let conic = char3_flex_conic(&c).map_err(err)?;
    ensure(conic.degenerate && conic.h.is_zero(), || "h_C is not zero".into())?;
    let k9 = field(3, 2);
    let pts = c.points_over(&k9, BUDGET).map_err(err)?;
    for p in &pts {
        let m = c.contact_order(p).map_err(err)?;
        ensure(m >= 3, || format!("{p} has contact {m}"))?;
    }
    let p = ProjPoint::from_ints(&k3, [1, 1, 1]).map_err(err)?;
    let d = intersection_divisor(&c, &c.tangent_line(&p).map_err(err)?).map_err(err)?;
    ensure(d.rational == vec![(p.clone(), 4)] && d.case == 5, || format!("divisor at (1:1:1): {:?}", d.rational))?;
    Ok(format!("{} points over F_9 all flexes; (1:1:1) is a hyperflex", pts.len()))
}

fn orbit_fixtures() -> Outcome {
    let count = |c: &PlaneQuartic, e: usize| flexes_rational(c, e, BUDGET).map(|v| v.len()).map_err(err);
    let (o8, o7, o6) = (fixtures::char3_orbit8(), fixtures::char3_orbit7(), fixtures::char3_orbit6());
    let base = [count(&o8, 1)?, count(&o7, 1)?, count(&o6, 1)?];
    ensure(base == [0, 1, 6], || format!("rational flex counts {base:?}"))?;
    let by_degree = (1..=8).map(|m| count(&o8, m)).collect::<Result<Vec<_>, _>>()?;
    ensure(by_degree == [0, 0, 0, 0, 0, 0, 0, 8], || format!("orbit8 over F_3^m: {by_degree:?}"))?;
    Ok(format!("counts {base:?}; orbit8 over F_3^m, m=1..8: {by_degree:?}"))
}

fn char2_bitangents() -> Outcome {
    let mut checked = 0;
    let expected = [1usize, 2, 4, 7];
    for k in [field(2, 1), field(2, 2)] {
        let seven: Vec<ProjLine> = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1], [1, 1, 0], [0, 1, 1], [1, 0, 1]]
            .into_iter()
            .map(|l| ProjLine::from_ints(&k, l).unwrap())
            .collect();
        for fam in 1..=4u8 {
            let members = fixtures::char2_family_members(&k, fam).map_err(err)?;
            ensure(!members.is_empty(), || format!("no members of family {fam} over {}", k.descriptor()))?;
            for (q, c) in members {
                let b = bitangents(&c, 1, BUDGET).map_err(err)?;
                let want = expected[fam as usize - 1];
                let tag = || format!("family {fam} over {} with Q = {:?}", k.descriptor(), q.map(|v| k.encoding(v)));
                ensure(b.len() == want, || format!("{}: {} bitangents", tag(), b.len()))?;
                if fam == 1 {
                    ensure(b[0].hyperflex == q[4].is_zero(), || format!("{}: hyperflex mismatch", tag()))?;
                }
                if fam == 4 {
                    let mut got: Vec<&ProjLine> = b.iter().map(|r| &r.line).collect();
                    let mut want: Vec<&ProjLine> = seven.iter().collect();
                    got.sort();
                    want.sort();
                    ensure(got == want, || format!("{}: lines {:?}", tag(), got))?;
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} normal forms over F_2 and F_4"))
}

fn split_lines() -> Outcome {
    let s = lab::split_line_sweep(&cfg(&field(127, 1), 300, 1)).map_err(err)?;
    let floor = serre_weil_floor(127);
    ensure(floor == 62, || format!("floor {floor}"))?;
    let min = s.rows.iter().map(|r| r.points).min().unwrap_or(0);
    let no_line = s.rows.iter().filter(|r| r.split_line.is_empty()).count();
    ensure(s.violations == 0 && no_line == 0 && min >= 62, || {
        format!("{} violations, {no_line} without split line, min points {min}", s.violations)
    })?;
    Ok(format!("300 curves, 0 violations, min #C(F_127) = {min}"))
}

fn f2_census() -> Outcome {
    for c in [fixtures::klein_twist_1(), fixtures::klein_twist_2()] {
        ensure(c.is_smooth(), || "listed curve singular".into())?;
        ensure(c.count_points(c.ctx(), BUDGET).map_err(err)? == 0, || "listed curve has points".into())?;
    }
    let c = lab::f2_census(BUDGET).map_err(err)?;
    ensure(c.matches_klein, || format!("reducible {:?} vs klein {:?}", c.reducible, c.klein_keys))?;
    Ok(format!(
        "{} smooth pointless forms in {} classes; reducible = the two listed classes",
        c.smooth_pointless_forms,
        c.classes.len()
    ))
}

fn chebotarev() -> Outcome {
    let s = lab::chebotarev_survey(&cfg(&field(127, 1), 100, 3)).map_err(err)?;
    ensure(s.rows.len() == 100, || format!("{} rows", s.rows.len()))?;
    for r in &s.rows {
        ensure(r.galois != "galois", || format!("sample {}: galois point drawn", r.index))?;
        ensure(r.d <= 10, || format!("sample {}: |D| = {}", r.index, r.d))?;
        let n = r.n as f64;
        ensure(r.lower <= n && n <= r.upper, || format!("sample {}: N = {} outside [{}, {}]", r.index, r.n, r.lower, r.upper))?;
    }
    let (lo, hi) = (s.rows.iter().map(|r| r.n).min().unwrap(), s.rows.iter().map(|r| r.n).max().unwrap());
    Ok(format!("100 pencils, N in [{lo}, {hi}], 0 violations"))
}

fn aubry() -> Outcome {
    let mut report = Vec::new();
    for (k, n, seed) in [(field(127, 1), 100, 4u64), (field(2, 3), 50, 5)] {
        let run = cfg(&k, n, seed);
        let mut worst = f64::INFINITY;
        for i in 0..n {
            let c = lab::sample_curve(&run, i);
            let count = count_xc_points(&c, 1, BUDGET).map_err(err)?;
            let margin = aubry_margin(k.order(), 1, count);
            ensure(margin >= 0.0, || format!("q = {}: sample {i} count {count}", k.order()))?;
            worst = worst.min(margin);
        }
        report.push(format!("q={} min margin {worst:.1}", k.order()));
    }
    Ok(report.join(", "))
}

fn split_tangents() -> Outcome {
    let s = lab::split_tangent_sweep(&cfg(&field(4357, 1), 20, 6)).map_err(err)?;
    ensure(s.violations == 0, || format!("{} violations", s.violations))?;
    Ok("20 curves over F_4357, each with a split tangent".into())
}

fn genus() -> Outcome {
    let g = genus_constants();
    ensure((g.valence, g.deg_pi1, g.deg_pi2, g.a, g.b) == (2, 2, 10, 12, 4), || format!("{g:?}"))?;
    ensure(g.arithmetic_genus == 33 && g.hurwitz_genus == 33, || format!("{g:?}"))?;
    ensure(2 * g.hurwitz_genus - 2 == 2 * (2 * 3 - 2) + 56, || "Riemann-Hurwitz".into())?;
    Ok("ab - 15 = 33 and Riemann-Hurwitz gives 33".into())
}

fn derangements() -> Outcome {
    let p8 = lab::fixed_point_probability(8);
    ensure(p8 == BigRational::new(25487.into(), 40320.into()), || format!("p8 = {p8}"))?;
    let p24 = lab::fixed_point_probability(24);
    let d = (&p24 - &p8).abs();
    ensure(d <= BigRational::new(1.into(), 100_000.into()), || format!("|p24 - p8| = {d}"))?;
    let limit = BigRational::one() - lab::e_approx().recip();
    let gap = (&p24 - &limit).abs();
    ensure(gap < BigRational::new(1.into(), BigInt::from(10).pow(20)), || format!("|p24 - (1-1/e)| = {gap}"))?;
    Ok(format!("p8 = 25487/40320, p24 = {}", lab::decimal(&p24, 25)))
}

fn flex_probability() -> Outcome {
    let mut parts = Vec::new();
    for (k, n, band) in [(field(1009, 1), 1000, (0.58, 0.68)), (field(3, 4), 2000, (0.55, 0.70))] {
        let s = lab::flex_probability_survey(&cfg(&k, n, 8)).map_err(err)?;
        let est = s.estimate.unwrap();
        ensure(band.0 <= est && est <= band.1, || format!("q = {}: estimate {est:.4} outside {band:?}", k.order()))?;
        parts.push(format!("q={} {est:.4} vs {} = {:.4}", k.order(), s.reference_name, s.reference));
    }
    Ok(parts.join(", "))
}

fn weight_sums() -> Outcome {
    let run = cfg(&field(7, 1), 50, 9);
    for i in 0..50 {
        let c = lab::sample_curve(&run, i);
        let g = geometric_flexes(&c, BUDGET).map_err(err)?;
        ensure(g.weight_sum == Some(24), || format!("F_7 sample {i}: weight sum {:?}", g.weight_sum))?;
    }
    let k27 = field(3, 3);
    let run = cfg(&k27, 0, 10);
    let (mut found, mut skipped, mut i) = (0, 0, 0);
    let mut short = Vec::new();
    while found < 50 {
        let c = lab::sample_curve(&run, i);
        i += 1;
        let g = geometric_flexes(&c, BUDGET).map_err(err)?;
        if g.records.iter().any(|r| r.contact == 4) {
            skipped += 1;
            continue;
        }
        if g.count != 8 {
            // Flexes where the flex conic touches the curve absorb two of the
            // eight intersections.
            let h = char3_flex_conic(&c).map_err(err)?.h;
            let touching: Vec<String> =
                g.records.iter().filter(|r| conic_tangent(&h, &c, &r.point)).map(|r| r.point.to_string()).collect();
            short.push(format!("sample {} has {} flexes, conic tangent at {:?}", i - 1, g.count, touching));
        }
        found += 1;
    }
    ensure(short.is_empty(), || format!("F_7 sums are 24; F_27: {}", short.join("; ")))?;
    Ok(format!("50 curves over F_7 sum to 24; 50 over F_27 have 8 flexes ({skipped} with hyperflexes skipped)"))
}

fn conic_tangent(h: &TernaryForm, c: &PlaneQuartic, p: &ProjPoint) -> bool {
    let k = p.ctx();
    let gh = h.lift(k).gradient().map(|d| d.eval(p.coords(), k));
    let gf = c.gradient_at(p);
    (0..3).all(|i| {
        let (j, l) = ((i + 1) % 3, (i + 2) % 3);
        k.mul(gh[j], gf[l]) == k.mul(gh[l], gf[j])
    })
}

/// Flexes from the Hessian or the conic, against contact orders of all
/// points over small extensions.
fn flex_methods() -> Outcome {
    let mut curves = 0;
    for (k, n, seed, exts) in [(field(7, 1), 20, 13u64, 3usize), (field(11, 1), 20, 14, 2), (field(3, 3), 20, 15, 2), (field(3, 1), 20, 16, 4)] {
        let run = cfg(&k, n, seed);
        for i in 0..n {
            let c = lab::sample_curve(&run, i);
            let g = geometric_flexes(&c, BUDGET).map_err(err)?;
            for e in 1..=exts {
                let brute = flexes_rational(&c, e, BUDGET).map_err(err)?.len();
                let method: usize = g.records.iter().filter(|r| e % r.degree == 0).map(|r| r.degree).sum();
                ensure(brute == method, || {
                    format!("{} sample {i} over degree {e}: {} finds {method}, contact finds {brute}", k.descriptor(), g.method)
                })?;
            }
            if k.characteristic() > 3 {
                let (_, pts) = hessian_flexes(&c, BUDGET).map_err(err)?;
                let brute = flexes_rational(&c, 1, BUDGET).map_err(err)?.len();
                ensure(pts.len() == brute, || format!("{} sample {i}: rational Hessian points", k.descriptor()))?;
            }
            curves += 1;
        }
    }
    let once = serde_json::to_string(&lab::chebotarev_survey(&cfg(&field(31, 1), 20, 17)).map_err(err)?.rows).unwrap();
    let twice = serde_json::to_string(&lab::chebotarev_survey(&cfg(&field(31, 1), 20, 17)).map_err(err)?.rows).unwrap();
    ensure(once == twice, || "repeated survey differs".into())?;
    let f1 = serde_json::to_string(&lab::flex_probability_survey(&cfg(&field(13, 1), 30, 18)).map_err(err)?).unwrap();
    let f2 = serde_json::to_string(&lab::flex_probability_survey(&cfg(&field(13, 1), 30, 18)).map_err(err)?).unwrap();
    ensure(f1 == f2, || "repeated flex survey differs".into())?;
    Ok(format!("{curves} curves agree; repeated runs identical"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 14] = [
        ("char-3 conic identity", char3_conic_identity),
        ("Fermat char-3 degeneracy", fermat_degeneracy),
        ("char-3 orbit fixtures", orbit_fixtures),
        ("char-2 bitangent counts", char2_bitangents),
        ("split lines over F_127", split_lines),
        ("F_2 census", f2_census),
        ("split fiber windows", chebotarev),
        ("X_C point bound", aubry),
        ("split tangents over F_4357", split_tangents),
        ("genus of X_C", genus),
        ("fixed-point probabilities", derangements),
        ("flex probability", flex_probability),
        ("flex weight sums", weight_sums),
        ("flex method agreement", flex_methods),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = f();
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
