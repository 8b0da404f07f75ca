//! Flexes, bitangents, the characteristic-3 flex conic and Galois points.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::FieldCtx;
use crate::forms::{TernaryForm, Var};
use crate::incidence::Pencil;
use crate::quartic::{adjoin_root, fixtures, lines, solve, Pgl3, PlaneQuartic, ProjLine, ProjPoint, Solutions};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlexRecord {
    /// A representative over the field it generates.
    pub point: ProjPoint,
    /// Degree of that field over the curve's field.
    pub degree: usize,
    pub tangent: ProjLine,
    pub contact: usize,
    pub weight: Option<usize>,
}

impl FlexRecord {
    fn new(c: &PlaneQuartic, point: ProjPoint, degree: usize) -> Result<FlexRecord> {
        let tangent = c.tangent_line(&point)?;
        let contact = c.restrict(&tangent)?.infinity_multiplicity();
        let p = c.ctx().characteristic();
        let weight = match (p, contact) {
            (p, m) if p > 3 => Some(m - 2),
            (3, 3) => Some(3),
            _ => None,
        };
        Ok(FlexRecord { point, degree, tangent, contact, weight })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "point": self.point.to_string(),
            "field": self.point.ctx().descriptor(),
            "degree": self.degree,
            "contact": self.contact,
            "weight": self.weight,
            "tangent": self.tangent.to_string(),
        })
    }
}

/// Flexes among the points over the degree-`k` extension, by contact order.
pub fn flexes_rational(c: &PlaneQuartic, k: usize, budget: u128) -> Result<Vec<FlexRecord>> {
    let field = FieldCtx::extension_of_degree(c.ctx(), k)?;
    let mut out = Vec::new();
    for p in c.points_over(&field, budget)? {
        if c.contact_order(&p)? >= 3 {
            out.push(FlexRecord::new(c, p, k)?);
        }
    }
    Ok(out)
}

/// The Hessian and the rational points of `C` on it. Needs `p >= 5`.
pub fn hessian_flexes(c: &PlaneQuartic, budget: u128) -> Result<(TernaryForm, Vec<ProjPoint>)> {
    if c.ctx().characteristic() <= 3 {
        return Err(Error::HessianDegenerate);
    }
    let h = c.form().hessian()?;
    let k = c.ctx();
    let pts = c
        .points_over(k, budget)?
        .into_iter()
        .filter(|p| h.eval(p.coords(), k).is_zero())
        .collect();
    Ok((h, pts))
}

/// The characteristic-3 identity
/// `2 hbar - a20 f^2 - f (a x^3 + b y^3 + c z^3) z = htilde z^2`,
/// with `2 hbar = 2 f1 f2 f12 - f1^2 f22 - f2^2 f11` built from the `x` and
/// `y` partials.
///
/// Coefficients `a_ij` multiply `x^i z^j y^(4-i-j)`, so `a_ij` sits in the
/// slot of exponent `[i, 4-i-j, j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Char3Identity {
    pub two_hbar: TernaryForm,
    pub a: crate::FieldElement,
    pub b: crate::FieldElement,
    pub c: crate::FieldElement,
    /// `None` when the left side is not divisible by `z^2`.
    pub h_tilde: Option<TernaryForm>,
    /// `h_tilde` is supported on `x^6, y^6, z^6, x^3y^3, x^3z^3, y^3z^3`.
    pub support_ok: bool,
}

impl Char3Identity {
    pub fn holds(&self) -> bool {
        self.h_tilde.is_some() && self.support_ok
    }
}

pub fn coefficient_aij(f: &TernaryForm, i: u32, j: u32) -> crate::FieldElement {
    f.coeff([i, 4 - i - j, j])
}

pub fn char3_identity(f: &TernaryForm) -> Result<Char3Identity> {
    let k = f.ctx();
    if k.characteristic() != 3 {
        return Err(Error::WrongCharacteristic("the flex conic needs characteristic 3".into()));
    }
    if f.degree() != 4 {
        return Err(Error::Invalid("expected a quartic".into()));
    }
    let a_ = |i, j| coefficient_aij(f, i, j);
    let f1 = f.partial(Var::X);
    let f2 = f.partial(Var::Y);
    let f11 = f1.partial(Var::X);
    let f12 = f1.partial(Var::Y);
    let f22 = f2.partial(Var::Y);
    let two = k.from_u64(2);
    let two_hbar = f1.mul(&f2).mul(&f12).scale(two).sub(&f1.mul(&f1).mul(&f22)).sub(&f2.mul(&f2).mul(&f11));
    let m = |x, y| k.mul(x, y);
    let a = k.sub(k.add(m(a_(4, 0), a_(1, 1)), m(a_(2, 1), a_(3, 0))), k.mul(two, m(a_(2, 0), a_(3, 1))));
    let b = k.sub(k.add(m(a_(1, 0), a_(1, 1)), m(a_(0, 0), a_(2, 1))), k.mul(two, m(a_(2, 0), a_(0, 1))));
    let c = [
        k.mul(two, m(a_(1, 2), a_(1, 2))),
        m(a_(1, 3), a_(1, 1)),
        m(a_(2, 0), a_(0, 4)),
        m(a_(0, 3), a_(2, 1)),
        m(a_(0, 2), a_(2, 2)),
    ]
    .into_iter()
    .fold(k.zero(), |s, t| k.add(s, t));
    let mut cubic = TernaryForm::zero(k, 3);
    cubic.set_coeff([3, 0, 0], a);
    cubic.set_coeff([0, 3, 0], b);
    cubic.set_coeff([0, 0, 3], c);
    let z = TernaryForm::monomial(k, k.one(), [0, 0, 1]);
    let lhs = two_hbar.sub(&f.mul(f).scale(a_(2, 0))).sub(&f.mul(&cubic).mul(&z));
    let z2 = TernaryForm::monomial(k, k.one(), [0, 0, 2]);
    let h_tilde = lhs.divide(&z2);
    let allowed = [[6, 0, 0], [0, 6, 0], [0, 0, 6], [3, 3, 0], [3, 0, 3], [0, 3, 3]];
    let support_ok = h_tilde.as_ref().is_some_and(|h| h.terms().all(|(e, _)| allowed.contains(&e)));
    Ok(Char3Identity { two_hbar, a, b, c, h_tilde, support_ok })
}

/// `h` with `h^3 = htilde`, taking cube roots of the coefficients.
pub fn cube_root_conic(h_tilde: &TernaryForm) -> Result<TernaryForm> {
    let k = h_tilde.ctx();
    let mut h = TernaryForm::zero(k, 2);
    for (e, c) in h_tilde.terms() {
        if e.iter().any(|v| v % 3 != 0) {
            return Err(Error::Invalid("not a cube".into()));
        }
        h.set_coeff([e[0] / 3, e[1] / 3, e[2] / 3], k.pth_root(c));
    }
    Ok(h)
}

#[derive(Clone, Debug)]
pub struct Char3FlexConic {
    /// Coordinate change used; the identity holds for `C` moved by it.
    pub change: Pgl3,
    pub identity: Char3Identity,
    /// The conic in the coordinates of the moved curve.
    pub h_moved: TernaryForm,
    /// The conic pulled back to the input coordinates.
    pub h: TernaryForm,
    pub degenerate: bool,
    /// Number of coordinate changes tried.
    pub attempts: usize,
}

/// Closed points of `C` on `z = 0`.
fn points_at_infinity(c: &PlaneQuartic) -> Result<Vec<ProjPoint>> {
    let k = c.ctx();
    let mut out = Vec::new();
    let g = c.form().at_infinity().dehomogenize();
    if g.is_zero() {
        return Err(Error::LineInCurve);
    }
    if !g.is_constant() {
        for (phi, _) in g.factor()? {
            let (kk, x0) = adjoin_root(&phi)?;
            out.push(ProjPoint::new(&kk, [x0, kk.one(), kk.zero()])?);
        }
    }
    if c.form().coeff([4, 0, 0]).is_zero() {
        out.push(ProjPoint::from_ints(k, [1, 0, 0])?);
    }
    Ok(out)
}

const CONIC_RETRIES: usize = 64;

/// Flex conic of a characteristic-3 quartic. Coordinates are changed by
/// seeded random projectivities until `(0:1:0)` is off the curve and no flex
/// lies on `z = 0`; the conic is then pulled back.
pub fn char3_flex_conic(c: &PlaneQuartic) -> Result<Char3FlexConic> {
    let k = c.ctx();
    if k.characteristic() != 3 {
        return Err(Error::WrongCharacteristic("the flex conic needs characteristic 3".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(k.seed() ^ 0x3f1e_c0de);
    for attempt in 0..=CONIC_RETRIES {
        let m = if attempt == 0 { Pgl3::identity(k) } else { Pgl3::random(k, &mut rng) };
        let moved = c.transform(&m);
        let identity = char3_identity(moved.form())?;
        let h_tilde = match &identity.h_tilde {
            Some(h) if identity.support_ok => h.clone(),
            _ => return Err(Error::Invalid("flex identity failed".into())),
        };
        let h_moved = cube_root_conic(&h_tilde)?;
        let pullback = |h: &TernaryForm| h.substitute_linear(m.matrix());
        if h_moved.is_zero() {
            return Ok(Char3FlexConic {
                h: pullback(&h_moved),
                change: m,
                identity,
                h_moved,
                degenerate: true,
                attempts: attempt + 1,
            });
        }
        if coefficient_aij(moved.form(), 0, 0).is_zero() {
            continue;
        }
        let mut flex_at_infinity = false;
        for p in points_at_infinity(&moved)? {
            if moved.contact_order(&p)? >= 3 {
                flex_at_infinity = true;
                break;
            }
        }
        if flex_at_infinity {
            continue;
        }
        return Ok(Char3FlexConic {
            h: pullback(&h_moved),
            change: m,
            identity,
            h_moved,
            degenerate: false,
            attempts: attempt + 1,
        });
    }
    Err(Error::NoCoordinateChange(CONIC_RETRIES))
}

/// Geometric flexes, one record per Galois orbit.
#[derive(Clone, Debug)]
pub struct GeometricFlexes {
    pub records: Vec<FlexRecord>,
    /// Sum of `degree * weight` when every weight is known.
    pub weight_sum: Option<usize>,
    /// Number of geometric flexes (conjugates counted).
    pub count: usize,
    pub method: &'static str,
}

pub fn geometric_flexes(c: &PlaneQuartic, budget: u128) -> Result<GeometricFlexes> {
    let k = c.ctx();
    let p = k.characteristic();
    let closed: Vec<(ProjPoint, usize)> = match p {
        2 => {
            let mut out: Vec<(ProjPoint, usize)> = Vec::new();
            for d in 1..=4usize {
                for r in flexes_rational(c, d, budget)? {
                    if !out.iter().any(|(q, _)| same_orbit(q, &r.point, k)) {
                        let deg = min_degree(&r.point, k);
                        out.push((r.point, deg));
                    }
                }
            }
            let records = out
                .into_iter()
                .map(|(pt, d)| FlexRecord::new(c, pt, d))
                .collect::<Result<Vec<_>>>()?;
            let count = records.iter().map(|r| r.degree).sum();
            return Ok(GeometricFlexes { records, weight_sum: None, count, method: "contact" });
        }
        3 => {
            let conic = char3_flex_conic(c)?;
            if conic.degenerate {
                return Err(Error::InfinitelyManyFlexes);
            }
            let moved = c.transform(&conic.change);
            let inv = conic.change.inverse();
            match solve(&[moved.form().clone(), conic.h_moved.clone()])? {
                Solutions::Finite(pts) => pts.into_iter().map(|cp| (inv.apply_point(&cp.point), cp.degree)).collect(),
                Solutions::Infinite(_) => return Err(Error::InfinitelyManyFlexes),
            }
        }
        _ => {
            let h = c.form().hessian()?;
            match solve(&[c.form().clone(), h])? {
                Solutions::Finite(pts) => pts.into_iter().map(|cp| (cp.point, cp.degree)).collect(),
                Solutions::Infinite(_) => return Err(Error::InfinitelyManyFlexes),
            }
        }
    };
    let mut records = Vec::new();
    for (pt, d) in closed {
        let r = FlexRecord::new(c, pt, d)?;
        if r.contact < 3 {
            return Err(Error::Invalid(format!("flex candidate {} has contact {}", r.point, r.contact)));
        }
        records.push(r);
    }
    records.sort_by(|a, b| (a.degree, &a.point).cmp(&(b.degree, &b.point)));
    let count = records.iter().map(|r| r.degree).sum();
    let weight_sum = records.iter().map(|r| r.weight.map(|w| w * r.degree)).sum::<Option<usize>>();
    Ok(GeometricFlexes { records, weight_sum, count, method: if p == 3 { "conic" } else { "hessian" } })
}

/// Degree over `base` of the field generated by the coordinates of `p`.
pub fn min_degree(p: &ProjPoint, base: &FieldCtx) -> usize {
    let q = base.order();
    let n = (p.ctx().degree() / base.degree()) as usize;
    (1..=n)
        .filter(|d| n % d == 0)
        .find(|&d| &p.frobenius(q.pow(d as u32)) == p)
        .unwrap_or(n)
}

fn same_orbit(a: &ProjPoint, b: &ProjPoint, base: &FieldCtx) -> bool {
    if a.ctx() == b.ctx() {
        let q = base.order();
        let n = (a.ctx().degree() / base.degree()) as usize;
        let mut x = a.clone();
        for _ in 0..n {
            if &x == b {
                return true;
            }
            x = x.frobenius(q);
        }
        return false;
    }
    // Different containing fields: compare inside the larger one when nested.
    if b.ctx().contains_field(a.ctx()) {
        return same_orbit(&a.lift(b.ctx()), b, base);
    }
    if a.ctx().contains_field(b.ctx()) {
        return same_orbit(a, &b.lift(a.ctx()), base);
    }
    false
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitangentRecord {
    pub line: ProjLine,
    /// Degree of the line's field of definition over the curve's field.
    pub degree: usize,
    /// Tangency points defined over the line's field.
    pub tangency: Vec<ProjPoint>,
    /// The tangency divisor is `4P`.
    pub hyperflex: bool,
}

impl BitangentRecord {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "line": self.line.to_string(),
            "field": self.line.ctx().descriptor(),
            "degree": self.degree,
            "tangency_points": self.tangency.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "hyperflex": self.hyperflex,
        })
    }
}

fn line_min_degree(l: &ProjLine, base: &FieldCtx, n: usize) -> usize {
    let k = l.ctx();
    let q = base.order();
    (1..=n)
        .filter(|d| n % d == 0)
        .find(|&d| {
            let e = q.pow(d as u32);
            l.coeffs().iter().all(|&c| k.pow(c, e) == c)
        })
        .unwrap_or(n)
}

/// Bitangent lines defined over extensions of degree at most `k_max`,
/// each reported once over the extension where it is first defined.
pub fn bitangents(c: &PlaneQuartic, k_max: usize, budget: u128) -> Result<Vec<BitangentRecord>> {
    let base = c.ctx();
    let mut out = Vec::new();
    for kdeg in 1..=k_max {
        let field = FieldCtx::extension_of_degree(base, kdeg)?;
        let q = field.order();
        if q.checked_mul(q).is_none_or(|qq| qq > budget) {
            return Err(Error::BudgetExceeded);
        }
        for l in lines(&field) {
            if line_min_degree(&l, base, kdeg) != kdeg {
                continue;
            }
            let g = c.restrict(&l)?;
            if !g.is_perfect_square() {
                continue;
            }
            let pat = g.roots_with_multiplicity()?;
            let tangency: Vec<ProjPoint> = pat.roots.iter().map(|&(r, _)| l.point_at(r)).collect();
            let hyperflex = pat.roots.iter().any(|r| r.1 == 4) || pat.residual.iter().any(|r| r.0 == 1 && r.1 == 4);
            out.push(BitangentRecord { line: l, degree: kdeg, tangency, hyperflex });
        }
    }
    Ok(out)
}

/// 2-rank of the Jacobian from the number of bitangents in characteristic 2.
pub fn two_rank(bitangent_count: usize) -> Option<u8> {
    match bitangent_count {
        7 => Some(3),
        4 => Some(2),
        2 => Some(1),
        1 => Some(0),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitangencyClassification {
    /// `None` when no bitangent was found within the search range.
    pub has_non_hyperflex_bitangency_point: Option<bool>,
    pub exceptional_family: Option<&'static str>,
}

/// Recognizes `Q^2 + (family product)` in characteristic 2 and returns the
/// family and `Q` as `[a, b, c, d, e, f]`.
pub fn match_char2_normal_form(c: &PlaneQuartic) -> Option<(u8, [crate::FieldElement; 6])> {
    let k = c.ctx();
    if k.characteristic() != 2 {
        return None;
    }
    let squares = [[4, 0, 0], [0, 4, 0], [0, 0, 4], [2, 2, 0], [0, 2, 2], [2, 0, 2]];
    for fam in 1..=4u8 {
        let rest = c.form().sub(&fixtures::char2_family_product(k, fam).ok()?);
        if rest.terms().all(|(e, _)| squares.contains(&e)) {
            let q = squares.map(|e| k.pth_root(rest.coeff(e)));
            if fixtures::char2_admissible(k, fam, &q) {
                return Some((fam, q));
            }
        }
    }
    None
}

pub fn bitangency_classification(c: &PlaneQuartic, k_max: usize, budget: u128) -> Result<BitangencyClassification> {
    let k = c.ctx();
    if k.characteristic() == 3 {
        if let Ok(conic) = char3_flex_conic(c) {
            if conic.degenerate {
                return Ok(BitangencyClassification {
                    has_non_hyperflex_bitangency_point: Some(false),
                    exceptional_family: Some("char-3 Fermat"),
                });
            }
        }
    }
    if let Some((fam, q)) = match_char2_normal_form(c) {
        let [_, _, _, d, e, f] = q;
        let tag = match fam {
            1 if e.is_zero() => Some("supersingular family S"),
            2 if e.is_zero() && f.is_zero() => Some("2-rank one family"),
            3 if d.is_zero() && e.is_zero() && f.is_zero() => Some("2-rank two family"),
            _ => None,
        };
        if tag.is_some() {
            return Ok(BitangencyClassification { has_non_hyperflex_bitangency_point: Some(false), exceptional_family: tag });
        }
    }
    let bts = bitangents(c, k_max, budget)?;
    let verdict = if bts.iter().any(|b| !b.hyperflex) {
        Some(true)
    } else if bts.is_empty() {
        None
    } else if k.characteristic() == 2 {
        // In characteristic 2 every bitangent is found over small extensions.
        Some(false)
    } else {
        None
    };
    Ok(BitangencyClassification { has_non_hyperflex_bitangency_point: verdict, exceptional_family: None })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Galois {
    Galois,
    NotGalois,
    Undetermined,
}

impl Galois {
    pub fn as_str(&self) -> &'static str {
        match self {
            Galois::Galois => "galois",
            Galois::NotGalois => "not_galois",
            Galois::Undetermined => "undetermined",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisVerdict {
    pub point: ProjPoint,
    pub verdict: Galois,
    pub evidence: String,
    pub depth: usize,
}

/// Whether projection from `P` is a Galois cover: in odd characteristic, iff
/// the discriminant of the fiber cubic is a square up to a constant. In
/// characteristic 2, fibers over small extensions are searched for a
/// `1 + 2` splitting, which rules it out.
pub fn is_galois_point(c: &PlaneQuartic, p: &ProjPoint, depth: usize) -> Result<GaloisVerdict> {
    let k = c.ctx();
    if !c.contains(p) {
        return Err(Error::NotOnCurve);
    }
    if k.characteristic() != 2 {
        let pencil = Pencil::new(c, p)?;
        let disc = pencil.discriminant();
        if disc.is_zero() {
            return Ok(GaloisVerdict {
                point: p.clone(),
                verdict: Galois::Undetermined,
                evidence: "fiber cubic inseparable".into(),
                depth: 0,
            });
        }
        let sqf = disc.squarefree_decomposition()?;
        let odd: Vec<usize> = sqf.factors.iter().filter(|f| f.1 % 2 == 1).map(|f| f.0.degree()).collect();
        let verdict = if odd.is_empty() { Galois::Galois } else { Galois::NotGalois };
        let evidence = format!(
            "discriminant multiplicities {:?}",
            sqf.factors.iter().map(|f| (f.0.degree(), f.1)).collect::<Vec<_>>()
        );
        return Ok(GaloisVerdict { point: p.clone(), verdict, evidence, depth: 0 });
    }
    for d in 1..=depth {
        let field = FieldCtx::extension_of_degree(k, d)?;
        let lifted = PlaneQuartic::new(c.form().lift(&field))?;
        let pencil = Pencil::new(&lifted, &p.lift(&field))?;
        for t in pencil.parameters() {
            let cubic = pencil.residual_cubic(t);
            let pat = cubic.roots_with_multiplicity()?;
            if pat.roots.len() == 1 && pat.roots[0].1 == 1 && pat.residual == vec![(2, 1)] {
                return Ok(GaloisVerdict {
                    point: p.clone(),
                    verdict: Galois::NotGalois,
                    evidence: format!("fiber over {t:?} in {} splits as 1 + 2", field.descriptor()),
                    depth: d,
                });
            }
        }
    }
    Ok(GaloisVerdict { point: p.clone(), verdict: Galois::Undetermined, evidence: "no witness".into(), depth })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quartic::DEFAULT_BUDGET;

    #[test]
    fn orbit_fixture_rational_flexes() {
        assert_eq!(flexes_rational(&fixtures::char3_orbit8(), 1, DEFAULT_BUDGET).unwrap().len(), 0);
        assert_eq!(flexes_rational(&fixtures::char3_orbit7(), 1, DEFAULT_BUDGET).unwrap().len(), 1);
        assert_eq!(flexes_rational(&fixtures::char3_orbit6(), 1, DEFAULT_BUDGET).unwrap().len(), 6);
    }

    #[test]
    fn fermat_char3_conic_degenerate() {
        let k = FieldCtx::prime(3).unwrap();
        let conic = char3_flex_conic(&fixtures::fermat(&k)).unwrap();
        assert!(conic.degenerate);
        assert!(conic.h.is_zero());
    }

    #[test]
    fn orbit8_has_eight_conjugate_flexes() {
        let g = geometric_flexes(&fixtures::char3_orbit8(), DEFAULT_BUDGET).unwrap();
        assert_eq!(g.count, 8);
        assert_eq!(g.records.len(), 1);
        assert_eq!(g.records[0].degree, 8);
    }

    #[test]
    fn hessian_guarded_in_small_characteristic() {
        let k = FieldCtx::prime(3).unwrap();
        assert_eq!(hessian_flexes(&fixtures::fermat(&k), DEFAULT_BUDGET).unwrap_err(), Error::HessianDegenerate);
    }

    #[test]
    fn weight_sum_on_f7() {
        let k = FieldCtx::prime(7).unwrap();
        let c = PlaneQuartic::random_smooth(&k, 1);
        let g = geometric_flexes(&c, DEFAULT_BUDGET).unwrap();
        assert_eq!(g.weight_sum, Some(24));
    }

    #[test]
    fn two_rank_map() {
        assert_eq!(two_rank(7), Some(3));
        assert_eq!(two_rank(1), Some(0));
        assert_eq!(two_rank(3), None);
    }

    #[test]
    fn galois_point_rejects_points_off_curve() {
        let k = FieldCtx::prime(5).unwrap();
        let c = PlaneQuartic::random_smooth(&k, 2);
        let off = crate::quartic::points_of_plane(&k).find(|p| !c.contains(p)).unwrap();
        assert_eq!(is_galois_point(&c, &off, 1).unwrap_err(), Error::NotOnCurve);
    }
}
