//! Points, lines and projective coordinate changes of `P^2`.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElement};
use crate::forms::P1Point;

/// A point of `P^2` with last nonzero coordinate equal to 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ProjPoint {
    ctx: FieldCtx,
    c: [FieldElement; 3],
}

fn normalize(ctx: &FieldCtx, c: [FieldElement; 3]) -> Result<[FieldElement; 3]> {
    let last = (0..3).rev().find(|&i| !c[i].is_zero()).ok_or_else(|| {
        Error::Invalid("the zero vector is not a projective point".into())
    })?;
    let inv = ctx.inv(c[last])?;
    Ok([ctx.mul(c[0], inv), ctx.mul(c[1], inv), ctx.mul(c[2], inv)])
}

impl ProjPoint {
    pub fn new(ctx: &FieldCtx, c: [FieldElement; 3]) -> Result<ProjPoint> {
        let c = [ctx.lift(c[0]), ctx.lift(c[1]), ctx.lift(c[2])];
        Ok(ProjPoint { ctx: ctx.clone(), c: normalize(ctx, c)? })
    }

    pub fn from_ints(ctx: &FieldCtx, c: [i64; 3]) -> Result<ProjPoint> {
        ProjPoint::new(ctx, [ctx.from_int(c[0]), ctx.from_int(c[1]), ctx.from_int(c[2])])
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn coords(&self) -> &[FieldElement; 3] {
        &self.c
    }

    /// The same point with coordinates in an extension field.
    pub fn lift(&self, k: &FieldCtx) -> ProjPoint {
        ProjPoint { ctx: k.clone(), c: [k.lift(self.c[0]), k.lift(self.c[1]), k.lift(self.c[2])] }
    }

    /// 0 for `(x:y:1)`, 1 for `(x:1:0)`, 2 for `(1:0:0)`.
    fn chart(&self) -> u8 {
        if !self.c[2].is_zero() {
            0
        } else if !self.c[1].is_zero() {
            1
        } else {
            2
        }
    }

    pub fn encodings(&self) -> [u128; 3] {
        [self.ctx.encoding(self.c[0]), self.ctx.encoding(self.c[1]), self.ctx.encoding(self.c[2])]
    }

    /// Image under the Frobenius `x -> x^(p^e)` applied `times` times with
    /// `p^e = q`, the order of `base`.
    pub fn frobenius(&self, q: u128) -> ProjPoint {
        let k = &self.ctx;
        ProjPoint { ctx: k.clone(), c: [k.pow(self.c[0], q), k.pow(self.c[1], q), k.pow(self.c[2], q)] }
    }
}

impl Ord for ProjPoint {
    fn cmp(&self, o: &Self) -> Ordering {
        (self.chart(), self.c[0], self.c[1]).cmp(&(o.chart(), o.c[0], o.c[1]))
    }
}

impl PartialOrd for ProjPoint {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Debug for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = self.encodings();
        write!(f, "({}:{}:{})", e[0], e[1], e[2])
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A line `a x + b y + c z = 0` with a parametrization `s P + t Q`.
#[derive(Clone)]
pub struct ProjLine {
    ctx: FieldCtx,
    c: [FieldElement; 3],
    basis: [[FieldElement; 3]; 2],
}

impl PartialEq for ProjLine {
    fn eq(&self, o: &Self) -> bool {
        self.c == o.c
    }
}
impl Eq for ProjLine {}

impl std::hash::Hash for ProjLine {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        self.c.hash(h);
    }
}

impl fmt::Debug for ProjLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = self.encodings();
        write!(f, "[{}:{}:{}]", e[0], e[1], e[2])
    }
}

impl fmt::Display for ProjLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Ord for ProjLine {
    fn cmp(&self, o: &Self) -> Ordering {
        self.encodings().cmp(&o.encodings())
    }
}

impl PartialOrd for ProjLine {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl ProjLine {
    /// Line with the canonical parametrization.
    pub fn new(ctx: &FieldCtx, c: [FieldElement; 3]) -> Result<ProjLine> {
        let c = [ctx.lift(c[0]), ctx.lift(c[1]), ctx.lift(c[2])];
        let c = normalize(ctx, c)?;
        let (o, z) = (ctx.one(), ctx.zero());
        let basis = if !c[2].is_zero() {
            [[o, z, ctx.neg(c[0])], [z, o, ctx.neg(c[1])]]
        } else if !c[1].is_zero() {
            [[o, ctx.neg(c[0]), z], [z, z, o]]
        } else {
            [[z, o, z], [z, z, o]]
        };
        Ok(ProjLine { ctx: ctx.clone(), c, basis })
    }

    pub fn from_ints(ctx: &FieldCtx, c: [i64; 3]) -> Result<ProjLine> {
        ProjLine::new(ctx, [ctx.from_int(c[0]), ctx.from_int(c[1]), ctx.from_int(c[2])])
    }

    /// Line through two distinct points, parametrized by them.
    pub fn through(p: &ProjPoint, q: &ProjPoint) -> Result<ProjLine> {
        let k = p.ctx();
        let (a, b) = (p.coords(), q.coords());
        let c = [
            k.sub(k.mul(a[1], b[2]), k.mul(a[2], b[1])),
            k.sub(k.mul(a[2], b[0]), k.mul(a[0], b[2])),
            k.sub(k.mul(a[0], b[1]), k.mul(a[1], b[0])),
        ];
        let mut l = ProjLine::new(k, c).map_err(|_| Error::Invalid("points coincide".into()))?;
        l.basis = [*a, *b];
        Ok(l)
    }

    /// Same line parametrized as `s P + t R` with `R` another point on it.
    pub fn with_base_point(&self, p: &ProjPoint) -> Result<ProjLine> {
        if !self.contains(p) {
            return Err(Error::Invalid("point not on line".into()));
        }
        let k = &self.ctx;
        let r = self
            .basis
            .iter()
            .find(|b| ProjPoint::new(k, **b).map(|bp| &bp != p).unwrap_or(false))
            .copied()
            .expect("two distinct basis points");
        let mut l = self.clone();
        l.basis = [*p.coords(), r];
        Ok(l)
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[FieldElement; 3] {
        &self.c
    }

    pub fn basis(&self) -> &[[FieldElement; 3]; 2] {
        &self.basis
    }

    pub fn encodings(&self) -> [u128; 3] {
        [self.ctx.encoding(self.c[0]), self.ctx.encoding(self.c[1]), self.ctx.encoding(self.c[2])]
    }

    pub fn contains(&self, p: &ProjPoint) -> bool {
        let k = &self.ctx;
        let a = p.coords();
        let v = k.add(k.add(k.mul(self.c[0], k.lift(a[0])), k.mul(self.c[1], k.lift(a[1]))), k.mul(self.c[2], k.lift(a[2])));
        v.is_zero()
    }

    pub fn point_at(&self, t: P1Point) -> ProjPoint {
        let k = &self.ctx;
        let [p, q] = self.basis;
        let c = match t {
            P1Point::Infinity => p,
            P1Point::Finite(s) => [
                k.add(k.mul(s, p[0]), q[0]),
                k.add(k.mul(s, p[1]), q[1]),
                k.add(k.mul(s, p[2]), q[2]),
            ],
        };
        ProjPoint::new(k, c).expect("independent basis")
    }

    /// Parameter of a point on the line; inverse of [`ProjLine::point_at`].
    pub fn param_of(&self, pt: &ProjPoint) -> Option<P1Point> {
        if !self.contains(pt) {
            return None;
        }
        let k = &self.ctx;
        let [p, q] = self.basis;
        let a = pt.coords();
        // a = s p + t q up to scale; pick a 2x2 minor that is invertible
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let det = k.sub(k.mul(p[i], q[j]), k.mul(p[j], q[i]));
            if det.is_zero() {
                continue;
            }
            let s = k.sub(k.mul(a[i], q[j]), k.mul(a[j], q[i]));
            let t = k.sub(k.mul(p[i], a[j]), k.mul(p[j], a[i]));
            return Some(if t.is_zero() {
                P1Point::Infinity
            } else {
                P1Point::Finite(k.div(s, t).expect("nonzero"))
            });
        }
        None
    }

    pub fn lift(&self, k: &FieldCtx) -> ProjLine {
        let l3 = |v: [FieldElement; 3]| [k.lift(v[0]), k.lift(v[1]), k.lift(v[2])];
        ProjLine { ctx: k.clone(), c: l3(self.c), basis: [l3(self.basis[0]), l3(self.basis[1])] }
    }
}

/// All `q^2 + q + 1` lines over `ctx`, in ascending order of
/// `(a, b, c)` encodings.
pub fn lines(ctx: &FieldCtx) -> impl Iterator<Item = ProjLine> + '_ {
    let (o, z) = (ctx.one(), ctx.zero());
    ctx.elements().flat_map(move |a| {
        ctx.elements().flat_map(move |b| {
            let mut v = Vec::with_capacity(2);
            if a == o && b == z {
                v.push(ProjLine::new(ctx, [o, z, z]).unwrap());
            }
            if b == o {
                v.push(ProjLine::new(ctx, [a, o, z]).unwrap());
            }
            v.push(ProjLine::new(ctx, [a, b, o]).unwrap());
            v
        })
    })
}

/// All `q^2 + q + 1` points over `ctx` in [`ProjPoint`] order.
pub fn points_of_plane(ctx: &FieldCtx) -> impl Iterator<Item = ProjPoint> + '_ {
    let (o, z) = (ctx.one(), ctx.zero());
    let affine = ctx
        .elements()
        .flat_map(move |x| ctx.elements().map(move |y| ProjPoint { ctx: ctx.clone(), c: [x, y, o] }));
    let inf = ctx.elements().map(move |x| ProjPoint { ctx: ctx.clone(), c: [x, o, z] });
    affine.chain(inf).chain(std::iter::once(ProjPoint { ctx: ctx.clone(), c: [o, z, z] }))
}

/// An invertible `3x3` matrix acting on points by `P -> M P`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pgl3 {
    ctx: FieldCtx,
    m: [[FieldElement; 3]; 3],
    inv: [[FieldElement; 3]; 3],
}

fn det3(k: &FieldCtx, m: &[[FieldElement; 3]; 3]) -> FieldElement {
    let t = |a: usize, b: usize, c: usize| k.mul(m[0][a], k.sub(k.mul(m[1][b], m[2][c]), k.mul(m[1][c], m[2][b])));
    k.add(k.sub(t(0, 1, 2), t(1, 0, 2)), t(2, 0, 1))
}

impl Pgl3 {
    pub fn new(ctx: &FieldCtx, m: [[FieldElement; 3]; 3]) -> Result<Pgl3> {
        let k = ctx;
        let d = det3(k, &m);
        if d.is_zero() {
            return Err(Error::SingularMatrix);
        }
        let di = k.inv(d)?;
        let mut inv = [[k.zero(); 3]; 3];
        for (i, row) in inv.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                // cofactor C_ji
                let (r0, r1) = ([0, 1, 2].iter().copied().filter(|&r| r != j).collect::<Vec<_>>(), [0, 1, 2].iter().copied().filter(|&c| c != i).collect::<Vec<_>>());
                let minor = k.sub(k.mul(m[r0[0]][r1[0]], m[r0[1]][r1[1]]), k.mul(m[r0[0]][r1[1]], m[r0[1]][r1[0]]));
                let c = if (i + j) % 2 == 0 { minor } else { k.neg(minor) };
                *v = k.mul(c, di);
            }
        }
        Ok(Pgl3 { ctx: ctx.clone(), m, inv })
    }

    pub fn from_ints(ctx: &FieldCtx, m: [[i64; 3]; 3]) -> Result<Pgl3> {
        Pgl3::new(ctx, m.map(|r| r.map(|v| ctx.from_int(v))))
    }

    pub fn identity(ctx: &FieldCtx) -> Pgl3 {
        Pgl3::from_ints(ctx, [[1, 0, 0], [0, 1, 0], [0, 0, 1]]).unwrap()
    }

    pub fn random<R: rand::Rng + ?Sized>(ctx: &FieldCtx, rng: &mut R) -> Pgl3 {
        loop {
            let m = [[(); 3]; 3].map(|r| r.map(|_| ctx.random(rng)));
            if let Ok(g) = Pgl3::new(ctx, m) {
                return g;
            }
        }
    }

    pub fn matrix(&self) -> &[[FieldElement; 3]; 3] {
        &self.m
    }

    pub fn inverse_matrix(&self) -> &[[FieldElement; 3]; 3] {
        &self.inv
    }

    pub fn inverse(&self) -> Pgl3 {
        Pgl3 { ctx: self.ctx.clone(), m: self.inv, inv: self.m }
    }

    pub fn compose(&self, o: &Pgl3) -> Pgl3 {
        let k = &self.ctx;
        let mm = |a: &[[FieldElement; 3]; 3], b: &[[FieldElement; 3]; 3]| {
            let mut r = [[k.zero(); 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    for l in 0..3 {
                        r[i][j] = k.add(r[i][j], k.mul(a[i][l], b[l][j]));
                    }
                }
            }
            r
        };
        Pgl3 { ctx: k.clone(), m: mm(&self.m, &o.m), inv: mm(&o.inv, &self.inv) }
    }

    pub fn apply_point(&self, p: &ProjPoint) -> ProjPoint {
        let k = p.ctx();
        let a = p.coords();
        let mut c = [k.zero(); 3];
        for (i, ci) in c.iter_mut().enumerate() {
            for (j, aj) in a.iter().enumerate() {
                *ci = k.add(*ci, k.mul(k.lift(self.m[i][j]), *aj));
            }
        }
        ProjPoint::new(k, c).expect("invertible")
    }

    /// Image of a line: the row vector `l M^-1`.
    pub fn apply_line(&self, l: &ProjLine) -> ProjLine {
        let k = l.ctx();
        let a = l.coeffs();
        let mut c = [k.zero(); 3];
        for (j, cj) in c.iter_mut().enumerate() {
            for (i, ai) in a.iter().enumerate() {
                *cj = k.add(*cj, k.mul(*ai, k.lift(self.inv[i][j])));
            }
        }
        ProjLine::new(k, c).expect("invertible")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_counts() {
        for (p, n) in [(2u64, 7usize), (3, 13), (5, 31)] {
            let k = FieldCtx::prime(p).unwrap();
            let v: Vec<ProjLine> = lines(&k).collect();
            assert_eq!(v.len(), n);
            let mut s = v.clone();
            s.sort();
            assert_eq!(s, v);
            s.dedup();
            assert_eq!(s.len(), n);
            assert_eq!(points_of_plane(&k).count(), n);
        }
    }

    #[test]
    fn basis_points_lie_on_line() {
        let k = FieldCtx::prime(5).unwrap();
        for l in lines(&k) {
            for b in l.basis() {
                assert!(l.contains(&ProjPoint::new(&k, *b).unwrap()));
            }
            for t in k.elements().map(P1Point::Finite).chain([P1Point::Infinity]) {
                let pt = l.point_at(t);
                assert_eq!(l.param_of(&pt), Some(t));
            }
        }
    }

    #[test]
    fn pgl_inverse_and_incidence() {
        let k = FieldCtx::prime(7).unwrap();
        let g = Pgl3::from_ints(&k, [[1, 2, 0], [0, 1, 3], [4, 0, 1]]).unwrap();
        let id = g.compose(&g.inverse());
        assert_eq!(id.matrix(), Pgl3::identity(&k).matrix());
        let p = ProjPoint::from_ints(&k, [1, 2, 3]).unwrap();
        let q = ProjPoint::from_ints(&k, [0, 1, 5]).unwrap();
        let l = ProjLine::through(&p, &q).unwrap();
        let gl = g.apply_line(&l);
        assert!(gl.contains(&g.apply_point(&p)));
        assert!(gl.contains(&g.apply_point(&q)));
        assert!(Pgl3::from_ints(&k, [[1, 2, 3], [2, 4, 6], [0, 0, 1]]).is_err());
    }
}
