//! Lines meeting a quartic: intersection divisors, split lines and tangents,
//! and the pencil of lines through a rational point.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElement};
use crate::forms::{BinaryForm, P1Point};
use crate::quartic::{lines, PlaneQuartic, ProjLine, ProjPoint};

/// The divisor `l . C` of degree 4.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionDivisor {
    pub line: ProjLine,
    pub rational: Vec<(ProjPoint, usize)>,
    /// `(degree, multiplicity)` of irreducible factors without rational roots.
    pub residual: Vec<(usize, usize)>,
    /// 1: four distinct points, 2: tangent, 3: flex, 4: bitangent, 5: hyperflex.
    pub case: u8,
    pub split: bool,
}

impl IntersectionDivisor {
    /// Multiplicities of the geometric points, descending.
    pub fn geometric_multiplicities(&self) -> Vec<usize> {
        let mut m: Vec<usize> = self.rational.iter().map(|(_, m)| *m).collect();
        for &(d, k) in &self.residual {
            m.extend(std::iter::repeat(k).take(d));
        }
        m.sort_unstable_by(|a, b| b.cmp(a));
        m
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "line": self.line.to_string(),
            "case": self.case,
            "rational": self.rational.iter().map(|(p, m)| serde_json::json!([p.to_string(), m])).collect::<Vec<_>>(),
            "residual": self.residual,
            "split": self.split,
        })
    }
}

/// Case label from the multiset of geometric multiplicities.
pub fn case_label(mults: &[usize]) -> u8 {
    match mults {
        [1, 1, 1, 1] => 1,
        [2, 1, 1] => 2,
        [3, 1] => 3,
        [2, 2] => 4,
        [4] => 5,
        _ => panic!("multiplicities {mults:?} do not sum to 4"),
    }
}

pub fn intersection_divisor(c: &PlaneQuartic, l: &ProjLine) -> Result<IntersectionDivisor> {
    let g = c.restrict(l)?;
    divisor_from_restriction(l, &g)
}

fn divisor_from_restriction(l: &ProjLine, g: &BinaryForm) -> Result<IntersectionDivisor> {
    let pat = g.roots_with_multiplicity()?;
    let rational: Vec<(ProjPoint, usize)> = pat.roots.iter().map(|&(r, m)| (l.point_at(r), m)).collect();
    let mut d = IntersectionDivisor { line: l.clone(), rational, residual: pat.residual, case: 0, split: false };
    d.rational.sort();
    d.case = case_label(&d.geometric_multiplicities());
    d.split = d.residual.is_empty();
    Ok(d)
}

/// Whether a binary form splits into linear factors over its field.
fn splits(g: &BinaryForm) -> bool {
    let f = g.dehomogenize();
    if f.is_constant() {
        return true;
    }
    let sqf = f.squarefree_part();
    sqf.count_roots() == sqf.degree().unwrap()
}

/// First line, in [`lines`] order, meeting `C` only in rational points.
pub fn find_split_line(c: &PlaneQuartic) -> Result<Option<IntersectionDivisor>> {
    for l in lines(c.ctx()) {
        let g = c.restrict(&l)?;
        if splits(&g) {
            return Ok(Some(divisor_from_restriction(&l, &g)?));
        }
    }
    Ok(None)
}

/// All split lines, in [`lines`] order.
pub fn split_lines(c: &PlaneQuartic) -> Result<Vec<IntersectionDivisor>> {
    let mut out = Vec::new();
    for l in lines(c.ctx()) {
        let g = c.restrict(&l)?;
        if splits(&g) {
            out.push(divisor_from_restriction(&l, &g)?);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitTangent {
    pub point: ProjPoint,
    pub divisor: IntersectionDivisor,
}

/// First rational point whose tangent meets `C` only in rational points.
pub fn find_split_tangent(c: &PlaneQuartic, budget: u128) -> Result<Option<SplitTangent>> {
    for p in c.points_over(c.ctx(), budget)? {
        let l = c.tangent_line(&p)?;
        let g = c.restrict(&l)?;
        if splits(&g) {
            return Ok(Some(SplitTangent { divisor: divisor_from_restriction(&l, &g)?, point: p }));
        }
    }
    Ok(None)
}

/// The pencil of lines through `P` written as `s P + t (u A + v B)`, with the
/// residual cubic `c1 s^3 + c2 s^2 t + c3 s t^2 + c4 t^3`, where `c_i` is a
/// binary form of degree `i` in `(u, v)`.
#[derive(Clone, Debug)]
pub struct Pencil {
    pub point: ProjPoint,
    pub a: [FieldElement; 3],
    pub b: [FieldElement; 3],
    pub c: [BinaryForm; 4],
}

impl Pencil {
    pub fn new(curve: &PlaneQuartic, p: &ProjPoint) -> Result<Pencil> {
        let k = curve.ctx();
        if p.ctx() != k {
            return Err(Error::Invalid("pencil base point must be rational".into()));
        }
        if !curve.contains(p) {
            return Err(Error::NotOnCurve);
        }
        let pc = *p.coords();
        let lead = (0..3).rev().find(|&i| !pc[i].is_zero()).expect("point");
        let others: Vec<usize> = (0..3).filter(|&i| i != lead).collect();
        let unit = |i: usize| {
            let mut e = [k.zero(); 3];
            e[i] = k.one();
            e
        };
        let (a, b) = (unit(others[0]), unit(others[1]));
        let m = [[pc[0], a[0], b[0]], [pc[1], a[1], b[1]], [pc[2], a[2], b[2]]];
        let g = curve.form().substitute_linear(&m);
        let c = [1u32, 2, 3, 4].map(|i| {
            BinaryForm::new(k, (0..=i).map(|j| g.coeff([4 - i, i - j, j])).collect())
        });
        Ok(Pencil { point: p.clone(), a, b, c })
    }

    /// Direction point `u A + v B` of a parameter.
    pub fn direction(&self, t: P1Point) -> [FieldElement; 3] {
        let k = self.point.ctx();
        let (u, v) = match t {
            P1Point::Finite(x) => (x, k.one()),
            P1Point::Infinity => (k.one(), k.zero()),
        };
        [0, 1, 2].map(|i| k.add(k.mul(u, self.a[i]), k.mul(v, self.b[i])))
    }

    pub fn line(&self, t: P1Point) -> ProjLine {
        let k = self.point.ctx();
        let d = ProjPoint::new(k, self.direction(t)).expect("direction");
        ProjLine::through(&self.point, &d).expect("distinct points")
    }

    /// Residual cubic of the fiber over `t`, in the basis `(P, direction)`.
    pub fn residual_cubic(&self, t: P1Point) -> BinaryForm {
        let k = self.point.ctx();
        BinaryForm::new(k, self.c.iter().map(|ci| ci.eval_point(t)).collect())
    }

    /// Discriminant of the residual cubic as a binary form of degree 10.
    pub fn discriminant(&self) -> BinaryForm {
        let k = self.point.ctx().clone();
        let [a, b, c, d] = &self.c;
        let sc = |f: &BinaryForm, n: i64| f.scale(k.from_int(n));
        let t1 = b.mul(b).mul(c).mul(c);
        let t2 = sc(&a.mul(c).mul(c).mul(c), -4);
        let t3 = sc(&b.mul(b).mul(b).mul(d), -4);
        let t4 = sc(&a.mul(a).mul(d).mul(d), -27);
        let t5 = sc(&a.mul(b).mul(c).mul(d), 18);
        t1.add(&t2).add(&t3).add(&t4).add(&t5)
    }

    /// Parameters in `P^1` order: `(a:1)` for `a` in the field, then `(1:0)`.
    pub fn parameters(&self) -> impl Iterator<Item = P1Point> + '_ {
        self.point.ctx().elements().map(P1Point::Finite).chain(std::iter::once(P1Point::Infinity))
    }

    /// Parameter of the tangent line at the base point (where `c1` vanishes).
    pub fn tangent_parameter(&self) -> P1Point {
        let k = self.point.ctx();
        let c1 = self.c[0].coeffs();
        if c1[0].is_zero() {
            P1Point::Infinity
        } else {
            P1Point::Finite(k.neg(k.div(c1[1], c1[0]).expect("nonzero")))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiberType {
    /// Distinct rational residual points.
    pub rational: usize,
    /// Largest multiplicity among residual points (geometric).
    pub max_mult: usize,
    /// Whether `P` occurs in the full divisor with multiplicity at least 2.
    pub tangent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PencilReport {
    pub point: String,
    pub q: u128,
    pub fibers: Vec<FiberType>,
    /// Unramified fibers with three distinct rational points.
    pub n: usize,
    /// Degree of the branch locus, or 10 when not resolved.
    pub d: usize,
    pub lower: f64,
    pub upper: f64,
    pub within: bool,
    /// The tangent fiber is ramified and all its points are rational.
    pub split_tangent: bool,
    /// `N = 0`; left for inspection.
    pub flagged: bool,
}

/// Degree of the branch locus of the projection from `P` read off the
/// discriminant: the sum of the degrees of its distinct irreducible factors
/// when all have degree at most 3, else the cap 10.
pub fn branch_degree(disc: &BinaryForm) -> Result<usize> {
    if disc.is_zero() {
        return Ok(10);
    }
    let g = disc.dehomogenize();
    let mut total = usize::from(disc.infinity_multiplicity() > 0);
    if !g.is_constant() {
        for (f, _) in g.factor()? {
            let d = f.degree().unwrap();
            if d > 3 {
                return Ok(10);
            }
            total += d;
        }
    }
    Ok(total.min(10))
}

/// `[(q+1)/6 - sqrt q - D, (q+1)/3 + 2 sqrt q + D]`.
pub fn chebotarev_window(q: u128, d: usize) -> (f64, f64) {
    let qf = q as f64;
    let s = qf.sqrt();
    ((qf + 1.0) / 6.0 - s - d as f64, (qf + 1.0) / 3.0 + 2.0 * s + d as f64)
}

pub fn pencil_report(c: &PlaneQuartic, p: &ProjPoint) -> Result<PencilReport> {
    let pencil = Pencil::new(c, p)?;
    let tan = pencil.tangent_parameter();
    let mut fibers = Vec::new();
    let mut n = 0;
    let mut split_tangent = false;
    for t in pencil.parameters() {
        let cubic = pencil.residual_cubic(t);
        if cubic.is_zero() {
            return Err(Error::LineInCurve);
        }
        let pat = cubic.roots_with_multiplicity()?;
        let max_mult = pat.roots.iter().map(|r| r.1).chain(pat.residual.iter().map(|r| r.1)).max().unwrap_or(0);
        let tangent = t == tan;
        let rational = pat.roots.len();
        if rational == 3 && max_mult == 1 && !tangent {
            n += 1;
        }
        if tangent && pat.residual.is_empty() {
            split_tangent = true;
        }
        fibers.push(FiberType { rational, max_mult, tangent });
    }
    let d = branch_degree(&pencil.discriminant())?;
    let q = c.ctx().order();
    let (lower, upper) = chebotarev_window(q, d);
    let nf = n as f64;
    Ok(PencilReport {
        point: p.to_string(),
        q,
        fibers,
        n,
        d,
        lower,
        upper,
        within: nf >= lower && nf <= upper,
        split_tangent,
        flagged: n == 0,
    })
}

/// Whether `T_P . C - 2P` consists of rational points.
pub fn tangent_split(c: &PlaneQuartic, p: &ProjPoint) -> Result<bool> {
    let (_, h) = c.tangent_residual(p)?;
    Ok(splits(&h))
}

/// Number of lines of `P^2` over `k`.
pub fn line_count(k: &FieldCtx) -> u128 {
    let q = k.order();
    q * q + q + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quartic::fixtures;

    #[test]
    fn line_counts() {
        for (p, n) in [(2u64, 7usize), (3, 13)] {
            let k = FieldCtx::prime(p).unwrap();
            assert_eq!(lines(&k).count(), n);
        }
        assert_eq!(line_count(&FieldCtx::prime(127).unwrap()), 16257);
    }

    #[test]
    fn fermat_line_cases() {
        let k5 = FieldCtx::prime(5).unwrap();
        let c = fixtures::fermat(&k5);
        let d = intersection_divisor(&c, &ProjLine::from_ints(&k5, [1, 0, 0]).unwrap()).unwrap();
        assert_eq!(d.case, 1);
        assert!(d.rational.is_empty());
        assert_eq!(d.residual, vec![(2, 1), (2, 1)]);

        let k3 = FieldCtx::prime(3).unwrap();
        let c3 = fixtures::fermat(&k3);
        let d = intersection_divisor(&c3, &ProjLine::from_ints(&k3, [1, 1, 1]).unwrap()).unwrap();
        assert_eq!(d.case, 5);
        assert!(d.split);
        assert_eq!(d.rational, vec![(ProjPoint::from_ints(&k3, [1, 1, 1]).unwrap(), 4)]);
    }

    #[test]
    fn hyperflex_on_twisted_fermat() {
        let k = FieldCtx::prime(5).unwrap();
        let c = PlaneQuartic::parse("x^4+y^4+4*z^4", &k).unwrap();
        let d = intersection_divisor(&c, &ProjLine::from_ints(&k, [4, 0, 1]).unwrap()).unwrap();
        assert_eq!(d.case, 5);
        let st = find_split_tangent(&c, 1 << 20).unwrap().unwrap();
        assert_eq!(st.divisor.case, 5);
        assert_eq!(st.divisor.rational, vec![(st.point.clone(), 4)]);
    }

    #[test]
    fn pointless_curves_have_no_split_lines() {
        assert!(find_split_line(&fixtures::klein_twist_1()).unwrap().is_none());
        assert!(find_split_tangent(&fixtures::klein_twist_1(), 1 << 20).unwrap().is_none());
        let k5 = FieldCtx::prime(5).unwrap();
        assert!(find_split_line(&fixtures::fermat(&k5)).unwrap().is_none());
    }

    #[test]
    fn serre_weil_thresholds() {
        let q = 127f64;
        assert!((q + 1.0) / 6.0 > q.sqrt() + 10.0);
        let q = 125f64;
        assert!((q + 1.0) / 6.0 < q.sqrt() + 10.0);
    }

    #[test]
    fn pencil_fibers_match_direct_restriction() {
        let k = FieldCtx::prime(7).unwrap();
        let c = PlaneQuartic::random_smooth(&k, 3);
        let pts = c.rational_points(1, 1 << 20).unwrap();
        let p = &pts[0];
        let pencil = Pencil::new(&c, p).unwrap();
        let mut tangents = 0;
        for t in pencil.parameters() {
            let l = pencil.line(t);
            let full = intersection_divisor(&c, &l).unwrap();
            let mult_p = full.rational.iter().find(|(x, _)| x == p).unwrap().1;
            let cubic = pencil.residual_cubic(t).roots_with_multiplicity().unwrap();
            let rat: usize = cubic.roots.iter().map(|r| r.1).sum();
            let full_rat: usize = full.rational.iter().map(|r| r.1).sum();
            assert_eq!(rat + 1, full_rat);
            if mult_p >= 2 {
                tangents += 1;
                assert_eq!(t, pencil.tangent_parameter());
            }
        }
        assert_eq!(tangents, 1);
        let r = pencil_report(&c, p).unwrap();
        assert_eq!(r.fibers.len(), 8);
        assert!(r.d <= 10);
    }

    #[test]
    fn discriminant_vanishes_exactly_on_ramified_fibers() {
        let k = FieldCtx::prime(11).unwrap();
        let c = PlaneQuartic::random_smooth(&k, 9);
        let p = c.rational_points(1, 1 << 20).unwrap().remove(0);
        let pencil = Pencil::new(&c, &p).unwrap();
        let disc = pencil.discriminant();
        assert_eq!(disc.degree(), 10);
        for t in pencil.parameters() {
            let cubic = pencil.residual_cubic(t);
            let ramified = !cubic.squarefree_decomposition().unwrap().factors.iter().all(|f| f.1 == 1)
                || cubic.infinity_multiplicity() > 1;
            assert_eq!(disc.eval_point(t).is_zero(), ramified);
        }
    }
}
