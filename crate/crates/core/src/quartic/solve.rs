//! Common zeros of ternary forms over the algebraic closure.
//!
//! Affine zeros (`z = 1`) are found by eliminating `y` with resultants,
//! factoring the eliminant, and solving for `y` over the extension cut out by
//! each factor. Zeros on `z = 0` come from the binary restrictions. Each
//! Galois orbit is returned once, with coordinates in the field it generates.

use crate::error::Result;
use crate::field::{FieldCtx, FieldElement};
use crate::forms::{BiPoly, TernaryForm, UniPoly};
use crate::quartic::ProjPoint;

/// One Galois orbit of points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedPoint {
    /// A representative, over the field its coordinates generate.
    pub point: ProjPoint,
    /// Number of conjugates, i.e. the degree of that field over the base.
    pub degree: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solutions {
    Finite(Vec<ClosedPoint>),
    /// The forms share a curve component; one point on it is given.
    Infinite(ClosedPoint),
}

/// `base` extended by a root of the irreducible `f`, and that root.
pub fn adjoin_root(f: &UniPoly) -> Result<(FieldCtx, FieldElement)> {
    let base = f.ctx();
    if f.degree() == Some(1) {
        let r = base.neg(base.div(f.coeff(0), f.coeff(1))?);
        return Ok((base.clone(), r));
    }
    let k = FieldCtx::extension_unchecked(base, &f.monic())?;
    let g = k.generator();
    Ok((k, g))
}

fn degree_over(k: &FieldCtx, base: &FieldCtx) -> usize {
    (k.degree() / base.degree()) as usize
}

/// Eliminant in `x` of a system whose members have no common factor.
fn eliminant(mut fs: Vec<BiPoly>) -> UniPoly {
    fs.retain(|f| !f.is_zero());
    let ctx = fs[0].ctx().clone();
    if let Some(u) = fs.iter().find(|f| f.deg_y() == 0) {
        return u.lc();
    }
    if fs.len() < 2 {
        return UniPoly::zero(&ctx);
    }
    fs.sort_by_key(|f| (f.deg_y(), f.total_degree()));
    let h = fs[0].gcd(&fs[1]);
    if h.total_degree() == 0 {
        return fs[0].resultant(&fs[1]);
    }
    let a = fs[0].exact_div(&h).expect("gcd divides");
    let b = fs[1].exact_div(&h).expect("gcd divides");
    let e2 = eliminant(vec![a, b]);
    let mut rest = vec![h];
    rest.extend(fs.drain(2..));
    let e1 = eliminant(rest);
    e1.mul(&e2)
}

fn point_on(g: &BiPoly) -> Result<ClosedPoint> {
    let base = g.ctx().clone();
    let point = |k: &FieldCtx, x: FieldElement, y: FieldElement| {
        ProjPoint::new(k, [x, y, k.one()]).expect("affine point")
    };
    if g.deg_y() == 0 {
        let (f, _) = g.lc().factor()?.into_iter().next().expect("nonconstant");
        let (k, x0) = adjoin_root(&f)?;
        return Ok(ClosedPoint { degree: degree_over(&k, &base), point: point(&k, x0, k.zero()) });
    }
    let lc = g.lc();
    let x0 = base.elements().find(|&x| !lc.eval(x).is_zero());
    let (k0, x0) = match x0 {
        Some(x) => (base.clone(), x),
        None => {
            let k = FieldCtx::extension_of_degree(&base, 2)?;
            let x = k.elements().find(|&x| !lc.lift(&k).eval(x).is_zero()).expect("nonzero poly");
            (k, x)
        }
    };
    let gy = g.eval_x(x0, &k0);
    let (f, _) = gy.factor()?.into_iter().next().expect("positive degree");
    let (k, y0) = adjoin_root(&f)?;
    Ok(ClosedPoint { degree: degree_over(&k, &base), point: point(&k, k.lift(x0), y0) })
}

/// Common zeros of `forms` in `P^2` over the algebraic closure.
pub fn solve(forms: &[TernaryForm]) -> Result<Solutions> {
    let base = forms[0].ctx().clone();
    let nonzero: Vec<&TernaryForm> = forms.iter().filter(|f| !f.is_zero()).collect();
    if nonzero.is_empty() {
        let p = ProjPoint::from_ints(&base, [0, 0, 1])?;
        return Ok(Solutions::Infinite(ClosedPoint { point: p, degree: 1 }));
    }
    let mut out = Vec::new();

    // z = 0
    let at_inf: Vec<UniPoly> = nonzero
        .iter()
        .map(|f| f.at_infinity().dehomogenize())
        .collect();
    if at_inf.iter().all(|u| u.is_zero()) {
        let p = ProjPoint::from_ints(&base, [1, 0, 0])?;
        return Ok(Solutions::Infinite(ClosedPoint { point: p, degree: 1 }));
    }
    let g_inf = at_inf.iter().fold(UniPoly::zero(&base), |acc, u| acc.gcd(u));
    if !g_inf.is_constant() {
        for (f, _) in g_inf.factor()? {
            let (k, x0) = adjoin_root(&f)?;
            out.push(ClosedPoint {
                degree: degree_over(&k, &base),
                point: ProjPoint::new(&k, [x0, k.one(), k.zero()])?,
            });
        }
    }
    if nonzero.iter().all(|f| f.coeff([f.degree(), 0, 0]).is_zero()) {
        out.push(ClosedPoint { point: ProjPoint::from_ints(&base, [1, 0, 0])?, degree: 1 });
    }

    // z = 1
    let affine: Vec<BiPoly> = nonzero.iter().map(|f| f.dehomogenize_z()).collect();
    let common = affine.iter().fold(BiPoly::zero(&base), |acc, f| acc.gcd(f));
    if common.total_degree() > 0 {
        return Ok(Solutions::Infinite(point_on(&common)?));
    }
    let elim = eliminant(affine.clone());
    if elim.is_zero() {
        return Err(crate::error::Error::Invalid("elimination failed".into()));
    }
    if !elim.is_constant() {
        for (phi, _) in elim.factor()? {
            let (k, x0) = adjoin_root(&phi)?;
            let g = affine.iter().fold(UniPoly::zero(&k), |acc, f| acc.gcd(&f.eval_x(x0, &k)));
            if g.is_constant() {
                continue;
            }
            for (psi, _) in g.factor()? {
                let (k2, y0) = adjoin_root(&psi)?;
                out.push(ClosedPoint {
                    degree: degree_over(&k2, &base),
                    point: ProjPoint::new(&k2, [k2.lift(x0), y0, k2.one()])?,
                });
            }
        }
    }
    Ok(Solutions::Finite(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::parse_ternary;

    #[test]
    fn two_conics_meet_in_four_points() {
        let k = FieldCtx::prime(7).unwrap();
        let a = parse_ternary("x^2 + y^2 - z^2", &k).unwrap();
        let b = parse_ternary("x^2 - 2*y^2 + 3*x*z", &k).unwrap();
        match solve(&[a.clone(), b.clone()]).unwrap() {
            Solutions::Finite(pts) => {
                assert_eq!(pts.iter().map(|p| p.degree).sum::<usize>(), 4);
                for cp in pts {
                    let kk = cp.point.ctx().clone();
                    assert!(a.eval(cp.point.coords(), &kk).is_zero());
                    assert!(b.eval(cp.point.coords(), &kk).is_zero());
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn common_component_is_infinite() {
        let k = FieldCtx::prime(5).unwrap();
        let a = parse_ternary("x^2 + y*z", &k).unwrap().mul(&parse_ternary("x + y", &k).unwrap());
        let b = parse_ternary("x^2 + y*z", &k).unwrap().mul(&parse_ternary("y + 2*z", &k).unwrap());
        assert!(matches!(solve(&[a, b]).unwrap(), Solutions::Infinite(_)));
    }
}
