//! Short Weierstrass curves over prime fields: the group law over any ring,
//! division polynomials, multiplication maps, torsion points and an
//! exhaustive point count.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{PrimeField, QuotientRing, Ring};
use crate::poly::{self, Poly, PolyRing};

/// Largest p accepted by [`brute_count`].
pub const ORACLE_LIMIT: u64 = 10_000_000;

/// `y^2 = x^3 + a x + b` over F_p with p > 3 and nonzero discriminant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Curve {
    pub p: u64,
    pub a: u64,
    pub b: u64,
}

impl Curve {
    pub fn new(p: u64, a: i64, b: i64) -> Result<Self> {
        let field = PrimeField::new(p)?;
        if p <= 3 {
            return Err(Error::PrecondViolated("curves require p > 3".into()));
        }
        let (a, b) = (field.from_int(a), field.from_int(b));
        let curve = Curve {
            p,
            a,
            b,
        };
        if curve.discriminant() == 0 {
            return Err(Error::SingularCurve);
        }
        Ok(curve)
    }

    pub fn field(&self) -> PrimeField {
        PrimeField::new_unchecked(self.p)
    }

    /// `4a^3 + 27b^2`.
    pub fn discriminant(&self) -> u64 {
        let f = self.field();
        let a3 = f.pow(&self.a, 3);
        f.add(&f.mul(&4, &a3), &f.mul(&27, &f.square(&self.b)))
    }

    pub fn j_invariant(&self) -> u64 {
        let f = self.field();
        let num = f.mul(&1728, &f.mul(&4, &f.pow(&self.a, 3)));
        f.div(&num, &self.discriminant())
            .expect("nonsingular curve has invertible discriminant")
    }

    /// The right-hand side `x^3 + a x + b`.
    pub fn rhs_poly(&self) -> Poly<u64> {
        Poly::new(vec![self.b, self.a, 0, 1], &self.field())
    }

    /// The right-hand side evaluated in any ring over F_p.
    pub fn rhs<R: Ring>(&self, ring: &R, x: &R::Elem) -> R::Elem {
        let x3 = ring.mul(&ring.square(x), x);
        let ax = ring.mul(&ring.from_u64(self.a), x);
        ring.add(&ring.add(&x3, &ax), &ring.from_u64(self.b))
    }

    pub fn contains<R: Ring>(&self, ring: &R, pt: &CurvePoint<R::Elem>) -> bool {
        match pt {
            CurvePoint::Infinity => true,
            CurvePoint::Affine { x, y } => ring.square(y) == self.rhs(ring, x),
        }
    }

    /// A uniformly chosen affine F_p-point.
    pub fn random_point<G: Rng + ?Sized>(&self, rng: &mut G) -> CurvePoint<u64> {
        let f = self.field();
        loop {
            let x = f.random(rng);
            let r = self.rhs(&f, &x);
            if let Ok(y) = poly::qth_root(&f, &r, 2) {
                let y = if rng.gen::<bool>() { f.neg(&y) } else { y };
                return CurvePoint::Affine { x, y };
            }
        }
    }
}

/// The point at infinity or an affine point with coordinates in some ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CurvePoint<E> {
    Infinity,
    Affine { x: E, y: E },
}

impl<E> CurvePoint<E> {
    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity)
    }

    pub fn x(&self) -> Option<&E> {
        match self {
            CurvePoint::Infinity => None,
            CurvePoint::Affine { x, .. } => Some(x),
        }
    }
}

pub fn point_neg<R: Ring>(ring: &R, pt: &CurvePoint<R::Elem>) -> CurvePoint<R::Elem> {
    match pt {
        CurvePoint::Infinity => CurvePoint::Infinity,
        CurvePoint::Affine { x, y } => CurvePoint::Affine {
            x: x.clone(),
            y: ring.neg(y),
        },
    }
}

/// Chord-and-tangent addition. Inversion failures in non-field coordinate
/// rings are returned as errors.
pub fn point_add<R: Ring>(
    curve: &Curve,
    ring: &R,
    p: &CurvePoint<R::Elem>,
    q: &CurvePoint<R::Elem>,
) -> Result<CurvePoint<R::Elem>> {
    let (x1, y1, x2, y2) = match (p, q) {
        (CurvePoint::Infinity, _) => return Ok(q.clone()),
        (_, CurvePoint::Infinity) => return Ok(p.clone()),
        (CurvePoint::Affine { x: x1, y: y1 }, CurvePoint::Affine { x: x2, y: y2 }) => {
            (x1, y1, x2, y2)
        }
    };
    let lambda = if x1 == x2 {
        if ring.is_zero(&ring.add(y1, y2)) {
            return Ok(CurvePoint::Infinity);
        }
        if y1 != y2 {
            // equal abscissae with unrelated ordinates only occur off fields
            return Err(Error::NotInvertible { factor_degree: None });
        }
        let num = ring.add(&ring.mul_int(&ring.square(x1), 3), &ring.from_u64(curve.a));
        ring.div(&num, &ring.mul_int(y1, 2))?
    } else {
        ring.div(&ring.sub(y2, y1), &ring.sub(x2, x1))?
    };
    let x3 = ring.sub(&ring.sub(&ring.square(&lambda), x1), x2);
    let y3 = ring.sub(&ring.mul(&lambda, &ring.sub(x1, &x3)), y1);
    Ok(CurvePoint::Affine { x: x3, y: y3 })
}

/// `k P` by double-and-add; negative `k` negates.
pub fn scalar_mul<R: Ring>(
    curve: &Curve,
    ring: &R,
    k: i64,
    pt: &CurvePoint<R::Elem>,
) -> Result<CurvePoint<R::Elem>> {
    let mut base = if k < 0 { point_neg(ring, pt) } else { pt.clone() };
    let mut n = k.unsigned_abs();
    let mut acc = CurvePoint::Infinity;
    while n > 0 {
        if n & 1 == 1 {
            acc = point_add(curve, ring, &acc, &base)?;
        }
        n >>= 1;
        if n > 0 {
            base = point_add(curve, ring, &base, &base)?;
        }
    }
    Ok(acc)
}

/// Division polynomials with the factor `y` removed from even indices, so
/// that every stored polynomial lies in F_p[X]. `psi(2)` is the constant 2.
#[derive(Clone, Debug)]
pub struct DivPolyCache {
    curve: Curve,
    px: PolyRing<PrimeField>,
    polys: Vec<Poly<u64>>,
}

impl DivPolyCache {
    pub fn new(curve: &Curve) -> Self {
        let px = PolyRing::new(curve.field());
        let f = curve.field();
        let psi3 = px.from_coeffs(vec![
            f.neg(&f.square(&curve.a)),
            f.mul(&12, &curve.b),
            f.mul(&6, &curve.a),
            0,
            3,
        ]);
        let a2 = f.square(&curve.a);
        let psi4 = px.scale(
            &px.from_coeffs(vec![
                f.neg(&f.add(&f.mul(&8, &f.square(&curve.b)), &f.mul(&a2, &curve.a))),
                f.neg(&f.mul(&4, &f.mul(&curve.a, &curve.b))),
                f.neg(&f.mul(&5, &a2)),
                f.mul(&20, &curve.b),
                f.mul(&5, &curve.a),
                0,
                1,
            ]),
            &4,
        );
        DivPolyCache {
            curve: *curve,
            polys: vec![px.zero(), px.one(), px.constant(2), psi3, psi4],
            px,
        }
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    /// Extends the cache through index `n`.
    pub fn ensure(&mut self, n: usize) {
        let px = self.px.clone();
        let f = self.curve.rhs_poly();
        let f2 = px.square(&f);
        let half = self.curve.field().inv(&2).expect("odd characteristic");
        while self.polys.len() <= n {
            let k = self.polys.len();
            let m = k / 2;
            let s = &self.polys;
            let next = if k % 2 == 1 {
                let t1 = px.mul(&s[m + 2], &px.mul(&px.square(&s[m]), &s[m]));
                let t2 = px.mul(&s[m - 1], &px.mul(&px.square(&s[m + 1]), &s[m + 1]));
                if m % 2 == 0 {
                    px.sub(&px.mul(&t1, &f2), &t2)
                } else {
                    px.sub(&t1, &px.mul(&t2, &f2))
                }
            } else {
                let br = px.sub(
                    &px.mul(&s[m + 2], &px.square(&s[m - 1])),
                    &px.mul(&s[m - 2], &px.square(&s[m + 1])),
                );
                px.scale(&px.mul(&s[m], &br), &half)
            };
            self.polys.push(next);
        }
    }

    /// The stored polynomial for index `k`, extending the cache as needed.
    pub fn division_poly(&mut self, k: usize) -> Poly<u64> {
        self.ensure(k);
        self.polys[k].clone()
    }

    /// Read-only access; the index must already be cached.
    pub fn get(&self, k: usize) -> Option<&Poly<u64>> {
        self.polys.get(k)
    }

    /// `(G_k, H_k)` reduced modulo a monic polynomial.
    pub fn mult_maps(&self, k: i64, modulus: &Poly<u64>) -> Result<(Poly<u64>, Poly<u64>)> {
        let ring = QuotientRing::with_field_flag(self.curve.field(), modulus.clone(), false)?;
        let x = ring.gen();
        let vals = DivisionValues::new(&self.curve, &ring, &x, k.unsigned_abs() as usize + 2);
        Ok((vals.g(k)?, vals.h(k)?))
    }
}

/// Values of the stripped division polynomials at a fixed element `x` of a
/// ring over F_p, with the derived multiplication maps.
#[derive(Clone, Debug)]
pub struct DivisionValues<R: Ring> {
    ring: R,
    x: R::Elem,
    fx: R::Elem,
    vals: Vec<R::Elem>,
}

impl<R: Ring> DivisionValues<R> {
    /// Computes `psi_k(x)` for `0 <= k <= n` (at least through index 4).
    pub fn new(curve: &Curve, ring: &R, x: &R::Elem, n: usize) -> Self {
        let r = ring;
        let c = |v: u64| r.from_u64(v);
        let (a, b) = (c(curve.a), c(curve.b));
        let x2 = r.square(x);
        let x3 = r.mul(&x2, x);
        let x4 = r.square(&x2);
        let x6 = r.mul(&x4, &x2);
        let a2 = r.square(&a);
        let fx = curve.rhs(r, x);
        let psi3 = r.sum(&[
            r.mul_int(&x4, 3),
            r.mul_int(&r.mul(&a, &x2), 6),
            r.mul_int(&r.mul(&b, x), 12),
            r.neg(&a2),
        ]);
        let psi4 = r.mul_int(
            &r.sum(&[
                x6,
                r.mul_int(&r.mul(&a, &x4), 5),
                r.mul_int(&r.mul(&b, &x3), 20),
                r.mul_int(&r.mul(&a2, &x2), -5),
                r.mul_int(&r.mul(&r.mul(&a, &b), x), -4),
                r.mul_int(&r.square(&b), -8),
                r.neg(&r.mul(&a2, &a)),
            ]),
            4,
        );
        let mut dv = DivisionValues {
            ring: r.clone(),
            x: x.clone(),
            fx,
            vals: vec![r.zero(), r.one(), c(2), psi3, psi4],
        };
        dv.extend_to(n);
        dv
    }

    pub fn extend_to(&mut self, n: usize) {
        let r = &self.ring;
        let f2 = r.square(&self.fx);
        let half = r.inv(&r.from_u64(2)).expect("odd characteristic");
        while self.vals.len() <= n {
            let k = self.vals.len();
            let m = k / 2;
            let s = &self.vals;
            let cube = |v: &R::Elem| r.mul(&r.square(v), v);
            let next = if k % 2 == 1 {
                let t1 = r.mul(&s[m + 2], &cube(&s[m]));
                let t2 = r.mul(&s[m - 1], &cube(&s[m + 1]));
                if m % 2 == 0 {
                    r.sub(&r.mul(&t1, &f2), &t2)
                } else {
                    r.sub(&t1, &r.mul(&t2, &f2))
                }
            } else {
                let br = r.sub(
                    &r.mul(&s[m + 2], &r.square(&s[m - 1])),
                    &r.mul(&s[m - 2], &r.square(&s[m + 1])),
                );
                r.mul(&r.mul(&s[m], &br), &half)
            };
            self.vals.push(next);
        }
    }

    pub fn fx(&self) -> &R::Elem {
        &self.fx
    }

    /// `psi_k(x)` with `psi_{-k} = -psi_k`.
    pub fn psi(&self, k: i64) -> R::Elem {
        let v = &self.vals[k.unsigned_abs() as usize];
        if k < 0 {
            self.ring.neg(v)
        } else {
            v.clone()
        }
    }

    fn invert(&self, d: &R::Elem) -> Result<R::Elem> {
        self.ring.inv(d).map_err(|e| match e {
            Error::NotInvertible { factor_degree } => Error::DenominatorNotInvertible { factor_degree },
            other => other,
        })
    }

    /// The abscissa of `kP` for `P = (x, y)`, `k != 0`.
    pub fn g(&self, k: i64) -> Result<R::Elem> {
        let r = &self.ring;
        let num = r.mul(&self.psi(k - 1), &self.psi(k + 1));
        let den = r.square(&self.psi(k));
        let quotient = if k % 2 != 0 {
            r.mul(&r.mul(&num, &self.fx), &self.invert(&den)?)
        } else {
            r.mul(&num, &self.invert(&r.mul(&den, &self.fx))?)
        };
        Ok(r.sub(&self.x, &quotient))
    }

    /// `H_k(x)` with `(kP)_y = y H_k(x)`, `k != 0`.
    pub fn h(&self, k: i64) -> Result<R::Elem> {
        let r = &self.ring;
        let br = r.sub(
            &r.mul(&self.psi(k + 2), &r.square(&self.psi(k - 1))),
            &r.mul(&self.psi(k - 2), &r.square(&self.psi(k + 1))),
        );
        let pk = self.psi(k);
        let mut den = r.mul_int(&r.mul(&r.square(&pk), &pk), 4);
        if k % 2 == 0 {
            den = r.mul(&den, &r.square(&self.fx));
        }
        Ok(r.mul(&br, &self.invert(&den)?))
    }
}

/// An ℓ-torsion point with coordinates in `L2 = L[y]/(.)`, `L = F_p[x]/(h)`.
#[derive(Clone, Debug)]
pub struct TorsionPoint {
    /// Irreducible factor of the division polynomial defining the abscissa.
    pub h: Poly<u64>,
    /// The residue field of `h`.
    pub field_x: QuotientRing<PrimeField>,
    /// `field_x` adjoined a square root of `f(x0)` (trivially if one exists).
    pub field_xy: QuotientRing<QuotientRing<PrimeField>>,
    pub point: CurvePoint<Poly<Poly<u64>>>,
}

/// A point of exact order `ell` from the canonically least-degree factor of
/// the division polynomial.
pub fn torsion_point(curve: &Curve, ell: u64) -> Result<TorsionPoint> {
    let mut cache = DivPolyCache::new(curve);
    let psi = cache.division_poly(ell as usize);
    let px = PolyRing::new(curve.field());
    let psi = px.monic(&psi)?;
    let (_, factors) = poly::least_degree_factors(&px, &psi)?;
    torsion_point_on_factor(curve, ell, &factors[0])
}

/// The torsion point whose abscissa is a root of the given factor.
pub fn torsion_point_on_factor(curve: &Curve, ell: u64, h: &Poly<u64>) -> Result<TorsionPoint> {
    let field_x = QuotientRing::with_field_flag(curve.field(), h.clone(), true)?;
    let x0 = field_x.gen();
    let fx0 = curve.rhs(&field_x, &x0);
    let lx = PolyRing::new(field_x.clone());
    let (modulus, y0) = match poly::qth_root(&field_x, &fx0, 2) {
        Ok(s) => (lx.linear(&s), lx.constant(s)),
        Err(Error::NoRoot(_)) => (
            lx.from_coeffs(vec![field_x.neg(&fx0), field_x.zero(), field_x.one()]),
            lx.x(),
        ),
        Err(e) => return Err(e),
    };
    let field_xy = QuotientRing::with_field_flag(field_x.clone(), modulus, true)?;
    let y0 = field_xy.reduce(&y0);
    let point = CurvePoint::Affine {
        x: field_xy.embed(&x0),
        y: y0,
    };
    debug_assert!(curve.contains(&field_xy, &point));
    debug_assert!(scalar_mul(curve, &field_xy, ell as i64, &point)?.is_infinity());
    Ok(TorsionPoint {
        h: h.clone(),
        field_x,
        field_xy,
        point,
    })
}

/// Exhaustive count `#E(F_p)` including the point at infinity.
pub fn brute_count(curve: &Curve) -> Result<u64> {
    if curve.p > ORACLE_LIMIT {
        return Err(Error::OracleBudgetExceeded {
            p: curve.p,
            limit: ORACLE_LIMIT,
        });
    }
    let f = curve.field();
    let mut count = 1u64;
    for x in 0..curve.p {
        count += (1 + f.legendre(curve.rhs(&f, &x))) as u64;
    }
    Ok(count)
}

/// `p + 1 - #E(F_p)` from the exhaustive count.
pub fn brute_trace(curve: &Curve) -> Result<i64> {
    Ok(curve.p as i64 + 1 - brute_count(curve)? as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c5() -> Curve {
        Curve::new(5, 1, 1).unwrap()
    }

    #[test]
    fn rejects_singular_and_tiny() {
        assert!(matches!(Curve::new(5, 0, 0), Err(Error::SingularCurve)));
        assert!(Curve::new(3, 1, 1).is_err());
    }

    #[test]
    fn addition_examples() {
        let c = c5();
        let f = c.field();
        let p = CurvePoint::Affine { x: 0, y: 1 };
        assert_eq!(point_add(&c, &f, &p, &CurvePoint::Infinity).unwrap(), p);
        assert_eq!(point_add(&c, &f, &p, &p).unwrap(), CurvePoint::Affine { x: 4, y: 2 });
        assert!(point_add(&c, &f, &p, &point_neg(&f, &p)).unwrap().is_infinity());
        assert!(scalar_mul(&c, &f, 0, &p).unwrap().is_infinity());
        assert_eq!(scalar_mul(&c, &f, 2, &p).unwrap(), CurvePoint::Affine { x: 4, y: 2 });
        assert!(scalar_mul(&c, &f, 9, &p).unwrap().is_infinity());
        assert_eq!(scalar_mul(&c, &f, 3, &p).unwrap(), CurvePoint::Affine { x: 2, y: 1 });
    }

    #[test]
    fn brute_counts() {
        assert_eq!(brute_count(&c5()).unwrap(), 9);
        assert!(matches!(Curve::new(7, 2, 2), Err(Error::SingularCurve)));
        assert_eq!(brute_count(&Curve::new(7, 3, 2).unwrap()).unwrap(), 9);
        let big = Curve::new(10_000_019, 1, 1).unwrap();
        assert!(matches!(brute_count(&big), Err(Error::OracleBudgetExceeded { .. })));
    }

    #[test]
    fn division_polynomial_examples() {
        let mut cache = DivPolyCache::new(&c5());
        assert_eq!(cache.division_poly(1), Poly::new(vec![1], &c5().field()));
        assert_eq!(cache.division_poly(2), Poly::new(vec![2], &c5().field()));
        assert_eq!(cache.division_poly(3), Poly::new(vec![4, 2, 1, 0, 3], &c5().field()));
        let mut cache = DivPolyCache::new(&Curve::new(11, 1, 1).unwrap());
        assert_eq!(cache.division_poly(5).degree(), Some(12));
        assert_eq!(cache.division_poly(7).degree(), Some(24));
        // even index: psi_6 / y has degree (36 - 4) / 2 = 16
        assert_eq!(cache.division_poly(6).degree(), Some(16));
    }

    #[test]
    fn recurrence_matches_values() {
        let c = Curve::new(101, 7, 13).unwrap();
        let mut cache = DivPolyCache::new(&c);
        let f = c.field();
        let px = PolyRing::new(f);
        for x in [0u64, 5, 77] {
            let dv = DivisionValues::new(&c, &f, &x, 12);
            for k in 0..=12 {
                assert_eq!(px.eval(&cache.division_poly(k), &x), dv.psi(k as i64));
            }
        }
    }

    #[test]
    fn multiplication_maps_match_scalar_mul() {
        let c = Curve::new(1009, 3, 17).unwrap();
        let f = c.field();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let pt = c.random_point(&mut rng);
            let CurvePoint::Affine { x, y } = pt.clone() else { unreachable!() };
            let dv = DivisionValues::new(&c, &f, &x, 20);
            for k in 1..=15i64 {
                let kp = scalar_mul(&c, &f, k, &pt).unwrap();
                match kp {
                    CurvePoint::Infinity => assert!(dv.g(k).is_err()),
                    CurvePoint::Affine { x: kx, y: ky } => {
                        assert_eq!(dv.g(k).unwrap(), kx);
                        assert_eq!(f.mul(&y, &dv.h(k).unwrap()), ky);
                    }
                }
            }
        }
    }

    #[test]
    fn mult_maps_in_quotient() {
        let c = Curve::new(13, 2, 5).unwrap();
        let cache = DivPolyCache::new(&c);
        let px = PolyRing::new(c.field());
        let m = px.from_ints(&[2, 0, 0, 1]);
        let (g1, h1) = cache.mult_maps(1, &m).unwrap();
        assert_eq!(g1, px.x());
        assert_eq!(h1, px.one());
        let mut cache = cache;
        let psi5 = px.monic(&cache.division_poly(5)).unwrap();
        let factor = poly::least_degree_factors(&px, &psi5).unwrap().1.remove(0);
        assert!(matches!(
            cache.mult_maps(5, &factor),
            Err(Error::DenominatorNotInvertible { .. })
        ));
    }

    #[test]
    fn torsion_points_have_exact_order() {
        for (p, a, b, ell) in [(5u64, 1i64, 1i64, 3u64), (7, 3, 2, 5), (101, 1, 3, 7)] {
            let c = Curve::new(p, a, b).unwrap();
            let t = torsion_point(&c, ell).unwrap();
            assert!(!t.point.is_infinity());
            assert!(c.contains(&t.field_xy, &t.point));
            assert!(scalar_mul(&c, &t.field_xy, ell as i64, &t.point).unwrap().is_infinity());
            assert_eq!(scalar_mul(&c, &t.field_xy, 1, &t.point).unwrap(), t.point);
        }
    }

    #[test]
    fn full_torsion_count() {
        // the roots of psi_ell over the algebraic closure give ell^2 - 1 points
        for (p, ell) in [(7u64, 3u64), (11, 5)] {
            let c = Curve::new(p, 1, 3).unwrap();
            let mut cache = DivPolyCache::new(&c);
            let px = PolyRing::new(c.field());
            let psi = px.monic(&cache.division_poly(ell as usize)).unwrap();
            assert!(poly::is_squarefree(&px, &psi).unwrap());
            assert_eq!(2 * psi.degree().unwrap() as u64, ell * ell - 1);
        }
    }

    #[test]
    fn group_laws_over_extension() {
        let c = Curve::new(13, 1, 6).unwrap();
        let t = torsion_point(&c, 5).unwrap();
        let r = &t.field_xy;
        let p = &t.point;
        let q = scalar_mul(&c, r, 2, p).unwrap();
        let s = scalar_mul(&c, r, 3, p).unwrap();
        let pq = point_add(&c, r, p, &q).unwrap();
        assert_eq!(pq, point_add(&c, r, &q, p).unwrap());
        assert_eq!(
            point_add(&c, r, &pq, &s).unwrap(),
            point_add(&c, r, p, &point_add(&c, r, &q, &s).unwrap()).unwrap()
        );
    }

    proptest::proptest! {
        #[test]
        fn hasse_bound(p in proptest::sample::select(vec![5u64, 7, 11, 13, 101, 997, 1999]), a in 0i64..2000, b in 0i64..2000) {
            if let Ok(c) = Curve::new(p, a, b) {
                let t = brute_trace(&c).unwrap();
                proptest::prop_assert!((t * t) as u64 <= 4 * p);
            }
        }

        #[test]
        fn scalar_mul_is_additive(m in -30i64..30, n in -30i64..30, seed in 0u64..1000) {
            let c = Curve::new(1009, 5, 7).unwrap();
            let f = c.field();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pt = c.random_point(&mut rng);
            let lhs = scalar_mul(&c, &f, m + n, &pt).unwrap();
            let rhs = point_add(&c, &f, &scalar_mul(&c, &f, m, &pt).unwrap(), &scalar_mul(&c, &f, n, &pt).unwrap()).unwrap();
            proptest::prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn psi_vanishes_exactly_on_torsion(seed in 0u64..500, k in proptest::sample::select(vec![3i64, 5, 7, 9])) {
            let c = Curve::new(211, 4, 9).unwrap();
            let f = c.field();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pt = c.random_point(&mut rng);
            let x = *pt.x().unwrap();
            let dv = DivisionValues::new(&c, &f, &x, k as usize);
            let killed = scalar_mul(&c, &f, k, &pt).unwrap().is_infinity();
            proptest::prop_assert_eq!(f.is_zero(&dv.psi(k)), killed);
        }
    }
}
