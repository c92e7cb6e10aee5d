//! Exact arithmetic in prime fields and in polynomial quotient rings over them.
//!
//! Every ring is a value implementing [`Ring`]; elements are plain data
//! (`u64` for F_p, [`Poly`] for quotients) interpreted relative to the ring
//! value passed alongside. Quotient rings nest, so towers such as
//! `F_p -> F_p[z]/(m) -> (F_p[z]/(m))[T]/(E(T))` are ordinary types.

use std::fmt::Debug;
use std::hash::Hash;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::metrics;
use crate::poly::{Poly, PolyRing};

/// A commutative ring with identity and canonically represented elements.
///
/// Element equality is value equality; `Ord` on elements is the canonical
/// order used wherever a deterministic choice is needed (least root, least
/// factor).
pub trait Ring: Clone + Debug {
    type Elem: Clone + Debug + PartialEq + Eq + Ord + Hash;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_int(&self, n: i64) -> Self::Elem;
    fn from_u64(&self, n: u64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem>;
    fn characteristic(&self) -> u64;
    fn cardinality(&self) -> BigUint;
    fn is_field(&self) -> bool;
    /// Dimension over the prime field.
    fn degree_over_prime(&self) -> usize;
    fn random<G: Rng + ?Sized>(&self, rng: &mut G) -> Self::Elem;

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn square(&self, a: &Self::Elem) -> Self::Elem {
        self.mul(a, a)
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    fn mul_int(&self, a: &Self::Elem, n: i64) -> Self::Elem {
        self.mul(a, &self.from_int(n))
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut result = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(&result, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.square(&base);
            }
        }
        result
    }

    fn pow_big(&self, a: &Self::Elem, e: &BigUint) -> Self::Elem {
        let mut result = self.one();
        for i in (0..e.bits()).rev() {
            result = self.square(&result);
            if e.bit(i) {
                result = self.mul(&result, a);
            }
        }
        result
    }

    fn sum<'a, I>(&self, items: I) -> Self::Elem
    where
        I: IntoIterator<Item = &'a Self::Elem>,
        Self::Elem: 'a,
    {
        items
            .into_iter()
            .fold(self.zero(), |acc, x| self.add(&acc, x))
    }
}

/// Deterministic-primality check by trial division; p is at most 62 bits
/// but in practice small.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// The field F_p for an odd prime p below 2^62.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 || p >= 1 << 62 || !is_prime(p) {
            return Err(Error::PrecondViolated(format!(
                "{p} is not an odd prime below 2^62"
            )));
        }
        Ok(PrimeField { p })
    }

    /// Skips the primality check; for values already validated.
    pub(crate) fn new_unchecked(p: u64) -> Self {
        PrimeField { p }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Canonical representative of an arbitrary integer.
    pub fn reduce(&self, n: i128) -> u64 {
        n.rem_euclid(self.p as i128) as u64
    }

    /// Legendre symbol of `a` as -1, 0 or 1.
    pub fn legendre(&self, a: u64) -> i32 {
        let a = a % self.p;
        if a == 0 {
            return 0;
        }
        if self.pow(&a, (self.p - 1) / 2) == 1 {
            1
        } else {
            -1
        }
    }

    /// Signed representative in (-p/2, p/2].
    pub fn signed(&self, a: u64) -> i64 {
        if a > self.p / 2 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }
}

impl Ring for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1
    }

    fn from_int(&self, n: i64) -> u64 {
        self.reduce(n as i128)
    }

    fn from_u64(&self, n: u64) -> u64 {
        n % self.p
    }

    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        metrics::count_fp_mul();
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }

    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }

    fn inv(&self, a: &u64) -> Result<u64> {
        let (mut r0, mut r1) = (self.p as i128, (*a % self.p) as i128);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        if r0 != 1 {
            return Err(Error::NotInvertible {
                factor_degree: Some(0),
            });
        }
        Ok(self.reduce(s0))
    }

    fn characteristic(&self) -> u64 {
        self.p
    }

    fn cardinality(&self) -> BigUint {
        BigUint::from(self.p)
    }

    fn is_field(&self) -> bool {
        true
    }

    fn degree_over_prime(&self) -> usize {
        1
    }

    fn random<G: Rng + ?Sized>(&self, rng: &mut G) -> u64 {
        rng.gen_range(0..self.p)
    }
}

/// Failure to invert in a quotient ring, carrying the common factor found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotInvertible<E> {
    /// Monic gcd of the element's lift and the modulus; `None` when the
    /// base ring itself refused an inversion.
    pub factor: Option<Poly<E>>,
}

impl<E> From<NotInvertible<E>> for Error {
    fn from(e: NotInvertible<E>) -> Self {
        Error::NotInvertible {
            factor_degree: e.factor.map(|f| f.degree().unwrap_or(0)),
        }
    }
}

#[derive(Debug)]
struct QuotientInner<R: Ring> {
    polys: PolyRing<R>,
    modulus: Poly<R::Elem>,
    is_field: bool,
}

/// `base[X]/(modulus)` for a monic modulus of positive degree.
///
/// Elements are [`Poly`] values of degree below the modulus degree. The ring
/// is a field exactly when the modulus is irreducible over a base field; that
/// fact is recorded as a flag, computed on demand by [`QuotientRing::new`] or
/// asserted by the caller through [`QuotientRing::with_field_flag`].
#[derive(Clone, Debug)]
pub struct QuotientRing<R: Ring> {
    inner: Arc<QuotientInner<R>>,
}

impl<R: Ring> QuotientRing<R> {
    /// Builds the quotient and decides irreducibility of the modulus.
    pub fn new(base: R, modulus: Poly<R::Elem>) -> Result<Self> {
        let probe = Self::with_field_flag(base.clone(), modulus.clone(), false)?;
        let is_field = base.is_field()
            && crate::poly::is_irreducible(&PolyRing::new(base.clone()), &modulus)?;
        drop(probe);
        Self::with_field_flag(base, modulus, is_field)
    }

    /// Builds the quotient trusting the caller's irreducibility flag.
    pub fn with_field_flag(base: R, modulus: Poly<R::Elem>, is_field: bool) -> Result<Self> {
        let deg = match modulus.degree() {
            Some(d) if d >= 1 => d,
            _ => {
                return Err(Error::PrecondViolated(
                    "quotient modulus must have positive degree".into(),
                ))
            }
        };
        if !base.is_one(&modulus.coeffs()[deg]) {
            return Err(Error::PrecondViolated("quotient modulus must be monic".into()));
        }
        Ok(QuotientRing {
            inner: Arc::new(QuotientInner {
                polys: PolyRing::new(base),
                modulus,
                is_field,
            }),
        })
    }

    pub fn base(&self) -> &R {
        &self.inner.polys.base
    }

    pub fn polys(&self) -> &PolyRing<R> {
        &self.inner.polys
    }

    pub fn modulus(&self) -> &Poly<R::Elem> {
        &self.inner.modulus
    }

    pub fn degree(&self) -> usize {
        self.inner.modulus.coeffs().len() - 1
    }

    /// The class of the indeterminate.
    pub fn gen(&self) -> Poly<R::Elem> {
        self.reduce(&self.polys().x())
    }

    /// Reduces an arbitrary polynomial into canonical form.
    pub fn reduce(&self, a: &Poly<R::Elem>) -> Poly<R::Elem> {
        if a.coeffs().len() <= self.degree() {
            return a.clone();
        }
        self.polys().rem_monic(a, self.modulus())
    }

    /// Constant embedding of the base ring.
    pub fn embed(&self, b: &R::Elem) -> Poly<R::Elem> {
        self.polys().constant(b.clone())
    }

    /// The element as a base-ring scalar, if it is one.
    pub fn as_base(&self, a: &Poly<R::Elem>) -> Option<R::Elem> {
        match a.degree() {
            None => Some(self.base().zero()),
            Some(0) => Some(a.coeffs()[0].clone()),
            _ => None,
        }
    }

    /// Coordinates with respect to the power basis, padded to full length.
    pub fn coords(&self, a: &Poly<R::Elem>) -> Vec<R::Elem> {
        let mut v = a.coeffs().to_vec();
        v.resize(self.degree(), self.base().zero());
        v
    }

    pub fn from_coords(&self, coords: Vec<R::Elem>) -> Poly<R::Elem> {
        self.reduce(&Poly::new(coords, self.base()))
    }

    /// Inverse via the extended Euclidean algorithm, or the common factor
    /// with the modulus when the element is a zero divisor.
    pub fn invert(&self, a: &Poly<R::Elem>) -> std::result::Result<Poly<R::Elem>, NotInvertible<R::Elem>> {
        let px = self.polys();
        let (g, s, _) = px
            .xgcd(a, self.modulus())
            .map_err(|_| NotInvertible { factor: None })?;
        if g.degree() == Some(0) {
            let c = px
                .base
                .inv(&g.coeffs()[0])
                .map_err(|_| NotInvertible { factor: None })?;
            Ok(self.reduce(&px.scale(&s, &c)))
        } else {
            Err(NotInvertible { factor: Some(g) })
        }
    }

    /// Evaluates a polynomial over the base ring at an element of this ring.
    pub fn eval_base_poly(&self, g: &Poly<R::Elem>, at: &Poly<R::Elem>) -> Poly<R::Elem> {
        let mut acc = self.zero();
        for c in g.coeffs().iter().rev() {
            acc = self.mul(&acc, at);
            acc = self.add(&acc, &self.embed(c));
        }
        acc
    }

    /// Extends scalars along `ext`, a quotient ring over this ring's base:
    /// `base[X]/(m)` becomes `ext[X]/(m)`.
    pub fn base_extend(&self, ext: &QuotientRing<R>) -> QuotientRing<QuotientRing<R>> {
        let modulus = self.lift_poly(ext, self.modulus());
        QuotientRing::with_field_flag(ext.clone(), modulus, false)
            .expect("lifted modulus stays monic of the same degree")
    }

    /// Maps a polynomial over the base ring coefficientwise into `ext`.
    pub fn lift_poly(
        &self,
        ext: &QuotientRing<R>,
        a: &Poly<R::Elem>,
    ) -> Poly<Poly<R::Elem>> {
        Poly::new(
            a.coeffs().iter().map(|c| ext.embed(c)).collect(),
            ext,
        )
    }
}

impl<R: Ring> Ring for QuotientRing<R> {
    type Elem = Poly<R::Elem>;

    fn zero(&self) -> Self::Elem {
        Poly::zero()
    }

    fn one(&self) -> Self::Elem {
        self.polys().one()
    }

    fn from_int(&self, n: i64) -> Self::Elem {
        self.embed(&self.base().from_int(n))
    }

    fn from_u64(&self, n: u64) -> Self::Elem {
        self.embed(&self.base().from_u64(n))
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.polys().add(a, b)
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.polys().sub(a, b)
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        self.polys().neg(a)
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.reduce(&self.polys().mul(a, b))
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.is_zero()
    }

    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem> {
        self.invert(a).map_err(Error::from)
    }

    fn characteristic(&self) -> u64 {
        self.base().characteristic()
    }

    fn cardinality(&self) -> BigUint {
        let mut c = BigUint::one();
        let b = self.base().cardinality();
        for _ in 0..self.degree() {
            c *= &b;
        }
        c
    }

    fn is_field(&self) -> bool {
        self.inner.is_field
    }

    fn degree_over_prime(&self) -> usize {
        self.degree() * self.base().degree_over_prime()
    }

    fn random<G: Rng + ?Sized>(&self, rng: &mut G) -> Self::Elem {
        let coeffs = (0..self.degree()).map(|_| self.base().random(rng)).collect();
        Poly::new(coeffs, self.base())
    }
}

/// The action of the p-power Frobenius on `F_p[x]/(m)`, stored as the images
/// of the power basis: `x^(j p) mod m` for `j < deg m`.
#[derive(Clone, Debug)]
pub struct FrobeniusTable {
    ring: QuotientRing<PrimeField>,
    basis_images: Vec<Poly<u64>>,
}

impl FrobeniusTable {
    /// One exponentiation `x^p mod m`, then the powers of the result.
    pub fn new(ring: &QuotientRing<PrimeField>) -> Self {
        let p = ring.characteristic();
        let deg = ring.degree();
        let phi_x = if deg == 1 {
            // F_p itself: the generator is a scalar and is fixed.
            ring.gen()
        } else {
            ring.pow(&ring.gen(), p)
        };
        let mut basis_images = Vec::with_capacity(deg);
        let mut cur = ring.one();
        for _ in 0..deg {
            basis_images.push(cur.clone());
            cur = ring.mul(&cur, &phi_x);
        }
        FrobeniusTable {
            ring: ring.clone(),
            basis_images,
        }
    }

    pub fn ring(&self) -> &QuotientRing<PrimeField> {
        &self.ring
    }

    /// The stored image of the generator, `x^p mod m`.
    pub fn image_of_generator(&self) -> Poly<u64> {
        if self.ring.degree() == 1 {
            self.ring.gen()
        } else {
            self.basis_images[1].clone()
        }
    }

    /// `a^p`, computed as a linear combination of the stored basis images.
    pub fn apply(&self, a: &Poly<u64>) -> Poly<u64> {
        let fp = self.ring.base();
        let deg = self.ring.degree();
        let mut out = vec![0u64; deg];
        for (c, img) in a.coeffs().iter().zip(&self.basis_images) {
            if *c == 0 {
                continue;
            }
            for (o, v) in out.iter_mut().zip(img.coeffs()) {
                *o = fp.add(o, &fp.mul(c, v));
            }
        }
        Poly::new(out, fp)
    }

    /// `a^(p^k)`.
    pub fn apply_times(&self, a: &Poly<u64>, k: usize) -> Poly<u64> {
        (0..k).fold(a.clone(), |acc, _| self.apply(&acc))
    }
}

/// Least `m >= 1` with `a^(p^m) = a`, i.e. the degree of the subfield
/// generated by `a`.
pub fn frobenius_orbit_len(table: &FrobeniusTable, a: &Poly<u64>) -> usize {
    let mut cur = table.apply(a);
    let mut m = 1;
    while cur != *a {
        cur = table.apply(&cur);
        m += 1;
    }
    m
}

/// Fermat check `a^(|R|) = a` used in tests for field-valued rings.
pub fn satisfies_fermat<R: Ring>(ring: &R, a: &R::Elem) -> bool {
    let q = ring.cardinality();
    ring.pow_big(a, &q) == *a
}

/// `|R| - 1`, the order of the unit group of a finite field.
pub fn unit_group_order<R: Ring>(ring: &R) -> BigUint {
    let q = ring.cardinality();
    if q.is_zero() {
        q
    } else {
        q - 1u32
    }
}
