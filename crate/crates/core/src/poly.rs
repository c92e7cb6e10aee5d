//! Univariate polynomials over any [`Ring`], plus the finite-field algorithms
//! built on them: factorization, cyclotomic minimal polynomials, q-th roots
//! and the structured resolvent solve.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::arith;
use crate::error::{Error, Result};
use crate::fields::Ring;
use crate::metrics;

const KARATSUBA_THRESHOLD: usize = 32;

/// A polynomial stored as its coefficient sequence, constant term first,
/// without trailing zeros. The zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Poly<E> {
    coeffs: Vec<E>,
}

impl<E> Poly<E> {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    /// Builds a polynomial, dropping trailing zeros.
    pub fn new<R: Ring<Elem = E>>(mut coeffs: Vec<E>, ring: &R) -> Self {
        while coeffs.last().is_some_and(|c| ring.is_zero(c)) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[E] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<E> {
        self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<&E> {
        self.coeffs.last()
    }

    pub fn coeff(&self, i: usize) -> Option<&E> {
        self.coeffs.get(i)
    }
}

/// Polynomial arithmetic over a fixed coefficient ring.
#[derive(Clone, Debug)]
pub struct PolyRing<R: Ring> {
    pub base: R,
}

type P<R> = Poly<<R as Ring>::Elem>;

impl<R: Ring> PolyRing<R> {
    pub fn new(base: R) -> Self {
        PolyRing { base }
    }

    pub fn from_coeffs(&self, coeffs: Vec<R::Elem>) -> P<R> {
        Poly::new(coeffs, &self.base)
    }

    /// Polynomial with integer coefficients, constant term first.
    pub fn from_ints(&self, coeffs: &[i64]) -> P<R> {
        self.from_coeffs(coeffs.iter().map(|&c| self.base.from_int(c)).collect())
    }

    pub fn zero(&self) -> P<R> {
        Poly::zero()
    }

    pub fn one(&self) -> P<R> {
        self.constant(self.base.one())
    }

    pub fn x(&self) -> P<R> {
        self.monomial(self.base.one(), 1)
    }

    pub fn constant(&self, c: R::Elem) -> P<R> {
        self.from_coeffs(vec![c])
    }

    pub fn monomial(&self, c: R::Elem, k: usize) -> P<R> {
        let mut v = vec![self.base.zero(); k];
        v.push(c);
        self.from_coeffs(v)
    }

    /// `X - c`.
    pub fn linear(&self, c: &R::Elem) -> P<R> {
        self.from_coeffs(vec![self.base.neg(c), self.base.one()])
    }

    pub fn add(&self, a: &P<R>, b: &P<R>) -> P<R> {
        let (long, short) = if a.coeffs.len() >= b.coeffs.len() {
            (a, b)
        } else {
            (b, a)
        };
        let mut v = long.coeffs.clone();
        for (x, y) in v.iter_mut().zip(&short.coeffs) {
            *x = self.base.add(x, y);
        }
        self.from_coeffs(v)
    }

    pub fn sub(&self, a: &P<R>, b: &P<R>) -> P<R> {
        let n = a.coeffs.len().max(b.coeffs.len());
        let z = self.base.zero();
        let v = (0..n)
            .map(|i| {
                self.base
                    .sub(a.coeffs.get(i).unwrap_or(&z), b.coeffs.get(i).unwrap_or(&z))
            })
            .collect();
        self.from_coeffs(v)
    }

    pub fn neg(&self, a: &P<R>) -> P<R> {
        Poly {
            coeffs: a.coeffs.iter().map(|c| self.base.neg(c)).collect(),
        }
    }

    pub fn scale(&self, a: &P<R>, c: &R::Elem) -> P<R> {
        self.from_coeffs(a.coeffs.iter().map(|x| self.base.mul(x, c)).collect())
    }

    /// `a * X^k`.
    pub fn shift(&self, a: &P<R>, k: usize) -> P<R> {
        if a.is_zero() {
            return a.clone();
        }
        let mut v = vec![self.base.zero(); k];
        v.extend(a.coeffs.iter().cloned());
        Poly { coeffs: v }
    }

    pub fn mul(&self, a: &P<R>, b: &P<R>) -> P<R> {
        if a.is_zero() || b.is_zero() {
            return Poly::zero();
        }
        let v = if a.coeffs.len().min(b.coeffs.len()) < KARATSUBA_THRESHOLD {
            self.schoolbook(&a.coeffs, &b.coeffs)
        } else {
            let n = a.coeffs.len().max(b.coeffs.len());
            let mut x = a.coeffs.clone();
            let mut y = b.coeffs.clone();
            x.resize(n, self.base.zero());
            y.resize(n, self.base.zero());
            let mut out = self.karatsuba(&x, &y);
            out.truncate(a.coeffs.len() + b.coeffs.len() - 1);
            out
        };
        self.from_coeffs(v)
    }

    pub fn square(&self, a: &P<R>) -> P<R> {
        self.mul(a, a)
    }

    fn schoolbook(&self, a: &[R::Elem], b: &[R::Elem]) -> Vec<R::Elem> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![self.base.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if self.base.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if self.base.is_zero(y) {
                    continue;
                }
                let t = self.base.mul(x, y);
                out[i + j] = self.base.add(&out[i + j], &t);
            }
        }
        out
    }

    /// Product of two equal-length coefficient slices, length `2n - 1`.
    fn karatsuba(&self, a: &[R::Elem], b: &[R::Elem]) -> Vec<R::Elem> {
        let n = a.len();
        if n < KARATSUBA_THRESHOLD {
            return self.schoolbook(a, b);
        }
        let m = n / 2;
        let (a0, a1) = a.split_at(m);
        let (b0, b1) = b.split_at(m);
        let z0 = self.karatsuba(a0, b0);
        let z2 = self.karatsuba(a1, b1);
        let hi = n - m;
        let sum = |lo: &[R::Elem], up: &[R::Elem]| -> Vec<R::Elem> {
            (0..hi)
                .map(|i| match lo.get(i) {
                    Some(l) => self.base.add(l, &up[i]),
                    None => up[i].clone(),
                })
                .collect()
        };
        let mut z1 = self.karatsuba(&sum(a0, a1), &sum(b0, b1));
        for (i, v) in z0.iter().enumerate() {
            z1[i] = self.base.sub(&z1[i], v);
        }
        for (i, v) in z2.iter().enumerate() {
            z1[i] = self.base.sub(&z1[i], v);
        }
        let mut out = vec![self.base.zero(); 2 * n - 1];
        for (i, v) in z0.into_iter().enumerate() {
            out[i] = self.base.add(&out[i], &v);
        }
        for (i, v) in z1.into_iter().enumerate() {
            if i + m < out.len() {
                out[i + m] = self.base.add(&out[i + m], &v);
            }
        }
        for (i, v) in z2.into_iter().enumerate() {
            out[i + 2 * m] = self.base.add(&out[i + 2 * m], &v);
        }
        out
    }

    /// Remainder modulo a monic polynomial; no inversions needed.
    pub fn rem_monic(&self, a: &P<R>, f: &P<R>) -> P<R> {
        let d = f.coeffs.len() - 1;
        if a.coeffs.len() <= d {
            return a.clone();
        }
        let mut r = a.coeffs.clone();
        for i in (d..r.len()).rev() {
            if self.base.is_zero(&r[i]) {
                continue;
            }
            let c = r[i].clone();
            for (j, fj) in f.coeffs[..d].iter().enumerate() {
                if self.base.is_zero(fj) {
                    continue;
                }
                let t = self.base.mul(&c, fj);
                r[i - d + j] = self.base.sub(&r[i - d + j], &t);
            }
            r[i] = self.base.zero();
        }
        r.truncate(d);
        self.from_coeffs(r)
    }

    /// Quotient and remainder; the divisor's leading coefficient must be a unit.
    pub fn divrem(&self, a: &P<R>, b: &P<R>) -> Result<(P<R>, P<R>)> {
        let db = b
            .degree()
            .ok_or_else(|| Error::PrecondViolated("division by the zero polynomial".into()))?;
        let lead_inv = self.base.inv(&b.coeffs[db])?;
        if a.coeffs.len() <= db {
            return Ok((Poly::zero(), a.clone()));
        }
        let mut r = a.coeffs.clone();
        let mut q = vec![self.base.zero(); a.coeffs.len() - db];
        for i in (db..r.len()).rev() {
            if self.base.is_zero(&r[i]) {
                continue;
            }
            let c = self.base.mul(&r[i], &lead_inv);
            for (j, bj) in b.coeffs[..db].iter().enumerate() {
                let t = self.base.mul(&c, bj);
                r[i - db + j] = self.base.sub(&r[i - db + j], &t);
            }
            r[i] = self.base.zero();
            q[i - db] = c;
        }
        r.truncate(db);
        Ok((self.from_coeffs(q), self.from_coeffs(r)))
    }

    pub fn rem(&self, a: &P<R>, b: &P<R>) -> Result<P<R>> {
        Ok(self.divrem(a, b)?.1)
    }

    /// Exact quotient; errors if the division leaves a remainder.
    pub fn div_exact(&self, a: &P<R>, b: &P<R>) -> Result<P<R>> {
        let (q, r) = self.divrem(a, b)?;
        if !r.is_zero() {
            return Err(Error::PrecondViolated("inexact polynomial division".into()));
        }
        Ok(q)
    }

    pub fn monic(&self, a: &P<R>) -> Result<P<R>> {
        match a.leading() {
            None => Ok(Poly::zero()),
            Some(l) => {
                let inv = self.base.inv(l)?;
                Ok(self.scale(a, &inv))
            }
        }
    }

    pub fn is_monic(&self, a: &P<R>) -> bool {
        a.leading().is_some_and(|l| self.base.is_one(l))
    }

    /// Monic gcd; `gcd(f, 0) = monic(f)`.
    pub fn gcd(&self, a: &P<R>, b: &P<R>) -> Result<P<R>> {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let r = self.rem(&x, &y)?;
            x = y;
            y = r;
        }
        self.monic(&x)
    }

    /// `(g, s, t)` with `s a + t b = g` and `g` the monic gcd.
    pub fn xgcd(&self, a: &P<R>, b: &P<R>) -> Result<(P<R>, P<R>, P<R>)> {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (self.one(), self.zero());
        let (mut t0, mut t1) = (self.zero(), self.one());
        while !r1.is_zero() {
            let (q, r) = self.divrem(&r0, &r1)?;
            let s = self.sub(&s0, &self.mul(&q, &s1));
            let t = self.sub(&t0, &self.mul(&q, &t1));
            (r0, r1) = (r1, r);
            (s0, s1) = (s1, s);
            (t0, t1) = (t1, t);
        }
        match r0.leading() {
            None => Ok((r0, s0, t0)),
            Some(l) => {
                let inv = self.base.inv(l)?;
                Ok((self.scale(&r0, &inv), self.scale(&s0, &inv), self.scale(&t0, &inv)))
            }
        }
    }

    pub fn derivative(&self, a: &P<R>) -> P<R> {
        self.from_coeffs(
            a.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| self.base.mul(c, &self.base.from_u64(i as u64)))
                .collect(),
        )
    }

    pub fn eval(&self, a: &P<R>, x: &R::Elem) -> R::Elem {
        a.coeffs.iter().rev().fold(self.base.zero(), |acc, c| {
            self.base.add(&self.base.mul(&acc, x), c)
        })
    }

    /// `g(h)` without reduction.
    pub fn compose(&self, g: &P<R>, h: &P<R>) -> P<R> {
        g.coeffs.iter().rev().fold(self.zero(), |acc, c| {
            self.add(&self.mul(&acc, h), &self.constant(c.clone()))
        })
    }

    pub fn mulmod(&self, a: &P<R>, b: &P<R>, f: &P<R>) -> P<R> {
        self.rem_monic(&self.mul(a, b), f)
    }

    /// `g(h) mod f` for monic `f`, by baby-step giant-step composition.
    pub fn modcomp(&self, g: &P<R>, h: &P<R>, f: &P<R>) -> P<R> {
        metrics::count_composition();
        let h = self.rem_monic(h, f);
        let Some(dg) = g.degree() else {
            return Poly::zero();
        };
        let m = ((dg + 1) as f64).sqrt().ceil() as usize;
        let mut pows = Vec::with_capacity(m + 1);
        pows.push(self.rem_monic(&self.one(), f));
        for i in 1..=m {
            pows.push(self.mulmod(&pows[i - 1], &h, f));
        }
        let giant = pows[m].clone();
        let width = f.coeffs.len() - 1;
        let mut acc = Poly::zero();
        for chunk in g.coeffs.chunks(m).rev() {
            let mut block = vec![self.base.zero(); width.max(1)];
            for (c, pw) in chunk.iter().zip(&pows) {
                if self.base.is_zero(c) {
                    continue;
                }
                for (b, v) in block.iter_mut().zip(&pw.coeffs) {
                    *b = self.base.add(b, &self.base.mul(c, v));
                }
            }
            acc = self.add(&self.mulmod(&acc, &giant, f), &self.from_coeffs(block));
        }
        acc
    }

    pub fn powmod(&self, h: &P<R>, mut e: u64, f: &P<R>) -> P<R> {
        let mut result = self.rem_monic(&self.one(), f);
        let mut base = self.rem_monic(h, f);
        while e > 0 {
            if e & 1 == 1 {
                result = self.mulmod(&result, &base, f);
            }
            e >>= 1;
            if e > 0 {
                base = self.mulmod(&base, &base, f);
            }
        }
        result
    }

    pub fn powmod_big(&self, h: &P<R>, e: &BigUint, f: &P<R>) -> P<R> {
        let base = self.rem_monic(h, f);
        let mut result = self.rem_monic(&self.one(), f);
        for i in (0..e.bits()).rev() {
            result = self.mulmod(&result, &result, f);
            if e.bit(i) {
                result = self.mulmod(&result, &base, f);
            }
        }
        result
    }

    /// Product of `X - r` over the given roots.
    pub fn from_roots(&self, roots: &[R::Elem]) -> P<R> {
        roots
            .iter()
            .fold(self.one(), |acc, r| self.mul(&acc, &self.linear(r)))
    }

    /// Canonical order on monic factors: degree first, then the negated
    /// coefficient sequence, so that linear factors sort by their root.
    pub fn factor_cmp(&self, a: &P<R>, b: &P<R>) -> Ordering {
        a.degree().cmp(&b.degree()).then_with(|| {
            let na: Vec<_> = a.coeffs.iter().map(|c| self.base.neg(c)).collect();
            let nb: Vec<_> = b.coeffs.iter().map(|c| self.base.neg(c)).collect();
            na.cmp(&nb)
        })
    }
}

/// `X^q mod f` for the base field cardinality `q`.
pub fn frobenius_x<R: Ring>(px: &PolyRing<R>, f: &P<R>) -> P<R> {
    px.powmod_big(&px.x(), &px.base.cardinality(), f)
}

pub fn is_squarefree<R: Ring>(px: &PolyRing<R>, f: &P<R>) -> Result<bool> {
    match f.degree() {
        None => Ok(false),
        Some(0) => Ok(true),
        Some(_) => Ok(px.gcd(f, &px.derivative(f))?.degree() == Some(0)),
    }
}

/// Rabin's irreducibility test over a finite field.
pub fn is_irreducible<R: Ring>(px: &PolyRing<R>, f: &P<R>) -> Result<bool> {
    let n = match f.degree() {
        None | Some(0) => return Ok(false),
        Some(1) => return Ok(true),
        Some(n) => n,
    };
    let f = px.monic(f)?;
    let xq = frobenius_x(px, &f);
    let mut iterates = vec![px.rem_monic(&px.x(), &f), xq.clone()];
    for i in 2..=n {
        let next = px.modcomp(&iterates[i - 1], &xq, &f);
        iterates.push(next);
    }
    if iterates[n] != px.rem_monic(&px.x(), &f) {
        return Ok(false);
    }
    for r in arith::prime_factors(n as u64) {
        let k = n / r as usize;
        let g = px.gcd(&px.sub(&iterates[k], &px.x()), &f)?;
        if g.degree() != Some(0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Distinct-degree factorization of a monic squarefree polynomial:
/// `(d, product of all irreducible factors of degree d)`.
pub fn distinct_degree<R: Ring>(px: &PolyRing<R>, f: &P<R>) -> Result<Vec<(usize, P<R>)>> {
    let mut rest = px.monic(f)?;
    let mut out = Vec::new();
    if rest.degree().unwrap_or(0) == 0 {
        return Ok(out);
    }
    let xq = frobenius_x(px, &rest);
    let mut h = xq.clone();
    let mut d = 1;
    while rest.degree().unwrap_or(0) >= 2 * d {
        let g = px.gcd(&px.sub(&h, &px.x()), &rest)?;
        if g.degree().unwrap_or(0) > 0 {
            rest = px.div_exact(&rest, &g)?;
            out.push((d, g));
            h = px.rem_monic(&h, &rest);
        }
        if rest.degree().unwrap_or(0) < 2 * (d + 1) {
            break;
        }
        h = px.modcomp(&h, &px.rem_monic(&xq, &rest), &rest);
        d += 1;
    }
    if let Some(dr) = rest.degree().filter(|&dr| dr > 0) {
        out.push((dr, rest));
    }
    Ok(out)
}

/// Splits a monic squarefree product of degree-`d` irreducibles.
pub fn equal_degree<R: Ring>(px: &PolyRing<R>, f: &P<R>, d: usize) -> Result<Vec<P<R>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0edf);
    let q = px.base.cardinality();
    let exp = (q.pow(d as u32) - BigUint::one()) >> 1;
    let mut pending = vec![px.monic(f)?];
    let mut done = Vec::new();
    while let Some(g) = pending.pop() {
        let n = g.degree().unwrap_or(0);
        if n <= d {
            if n > 0 {
                done.push(g);
            }
            continue;
        }
        loop {
            let a = px.from_coeffs((0..n).map(|_| px.base.random(&mut rng)).collect());
            if a.degree().unwrap_or(0) == 0 {
                continue;
            }
            let mut s = px.gcd(&a, &g)?;
            if s.degree().unwrap_or(0) == 0 {
                let b = px.sub(&px.powmod_big(&a, &exp, &g), &px.one());
                s = px.gcd(&b, &g)?;
            }
            let ds = s.degree().unwrap_or(0);
            if ds > 0 && ds < n {
                let other = px.div_exact(&g, &s)?;
                pending.push(s);
                pending.push(other);
                break;
            }
        }
    }
    done.sort_by(|a, b| px.factor_cmp(a, b));
    Ok(done)
}

/// Monic irreducible factors of a squarefree polynomial in canonical order.
pub fn factor_squarefree<R: Ring>(px: &PolyRing<R>, f: &P<R>) -> Result<Vec<P<R>>> {
    if !is_squarefree(px, f)? {
        return Err(Error::NotSquarefree);
    }
    let mut out = Vec::new();
    for (d, g) in distinct_degree(px, f)? {
        out.extend(equal_degree(px, &g, d)?);
    }
    out.sort_by(|a, b| px.factor_cmp(a, b));
    Ok(out)
}

/// Irreducible-factor degrees with multiplicities, ascending by degree.
pub fn factor_degree_pattern<R: Ring>(px: &PolyRing<R>, f: &P<R>) -> Result<Vec<(usize, usize)>> {
    if !is_squarefree(px, f)? {
        return Err(Error::NotSquarefree);
    }
    Ok(distinct_degree(px, f)?
        .into_iter()
        .map(|(d, g)| (d, g.degree().unwrap_or(0) / d))
        .collect())
}

/// The least-degree irreducible factors of a squarefree polynomial, in
/// canonical order, together with their degree.
pub fn least_degree_factors<R: Ring>(px: &PolyRing<R>, f: &P<R>) -> Result<(usize, Vec<P<R>>)> {
    if !is_squarefree(px, f)? {
        return Err(Error::NotSquarefree);
    }
    let (d, g) = distinct_degree(px, f)?
        .into_iter()
        .next()
        .ok_or_else(|| Error::PrecondViolated("constant polynomial has no factors".into()))?;
    Ok((d, equal_degree(px, &g, d)?))
}

/// Distinct roots in the base field, ascending.
pub fn roots<R: Ring>(px: &PolyRing<R>, f: &P<R>) -> Result<Vec<R::Elem>> {
    if f.degree().unwrap_or(0) == 0 {
        return Ok(Vec::new());
    }
    let f = px.monic(f)?;
    let g = px.gcd(&px.sub(&frobenius_x(px, &f), &px.x()), &f)?;
    if g.degree().unwrap_or(0) == 0 {
        return Ok(Vec::new());
    }
    let mut out: Vec<R::Elem> = equal_degree(px, &g, 1)?
        .into_iter()
        .map(|h| px.base.neg(&h.coeffs()[0]))
        .collect();
    out.sort();
    Ok(out)
}

/// Integer coefficients of the n-th cyclotomic polynomial.
pub fn cyclotomic_int(n: u64) -> Vec<i64> {
    // X^n - 1 divided by the cyclotomic polynomials of the proper divisors
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in arith::divisors(n) {
        if d == n {
            continue;
        }
        let den = cyclotomic_int(d);
        let dd = den.len() - 1;
        let mut q = vec![0i64; num.len() - dd];
        for i in (dd..num.len()).rev() {
            let c = num[i];
            q[i - dd] = c;
            for (j, &b) in den.iter().enumerate() {
                num[i - dd + j] -= c * b;
            }
        }
        num = q;
    }
    num
}

/// Minimal polynomial of the canonical primitive n-th root of unity: the
/// first irreducible factor of the n-th cyclotomic polynomial in canonical
/// factor order.
pub fn cyclotomic_minpoly<R: Ring>(px: &PolyRing<R>, n: u64) -> Result<P<R>> {
    let p = px.base.characteristic();
    if n == 0 || n % p == 0 {
        return Err(Error::BadOrder(n));
    }
    let phi = px.from_ints(&cyclotomic_int(n));
    Ok(factor_squarefree(px, &phi)?.swap_remove(0))
}

/// Whether `z` has multiplicative order exactly `n`.
pub fn has_exact_order<R: Ring>(ring: &R, z: &R::Elem, n: u64) -> bool {
    ring.is_one(&ring.pow(z, n))
        && arith::prime_factors(n)
            .into_iter()
            .all(|q| !ring.is_one(&ring.pow(z, n / q)))
}

/// All solutions of `x^n = 1` in a finite field, ascending.
pub fn roots_of_unity<R: Ring>(ring: &R, n: u64) -> Vec<R::Elem> {
    let order = ring.cardinality() - 1u32;
    let d = num_integer::Integer::gcd(&order, &BigUint::from(n));
    let d64 = u64::try_from(&d).expect("gcd bounded by n");
    let cofactor = &order / &d;
    let mut rng = ChaCha8Rng::seed_from_u64(0x0f00);
    let w = loop {
        let h = ring.random(&mut rng);
        if ring.is_zero(&h) {
            continue;
        }
        let w = ring.pow_big(&h, &cofactor);
        if has_exact_order(ring, &w, d64) {
            break w;
        }
    };
    let mut out = Vec::with_capacity(d64 as usize);
    let mut cur = ring.one();
    for _ in 0..d64 {
        out.push(cur.clone());
        cur = ring.mul(&cur, &w);
    }
    out.sort();
    out
}

/// One r-th root for a prime r, by the Adleman-Manders-Miller method.
fn prime_root<R: Ring>(ring: &R, a: &R::Elem, r: u64) -> Result<R::Elem> {
    if ring.is_zero(a) {
        return Ok(a.clone());
    }
    let order = ring.cardinality() - 1u32;
    let rb = BigUint::from(r);
    if !(&order % &rb).is_zero() {
        // r-th powering is a bijection; invert the exponent
        let inv = mod_inverse_big(&rb, &order);
        return Ok(ring.pow_big(a, &inv));
    }
    if !ring.is_one(&ring.pow_big(a, &(&order / &rb))) {
        return Err(Error::NoRoot(r));
    }
    let mut s = 0u32;
    let mut m = order.clone();
    while (&m % &rb).is_zero() {
        m /= &rb;
        s += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x0a33);
    let gen = loop {
        let z = ring.random(&mut rng);
        if !ring.is_zero(&z) && !ring.is_one(&ring.pow_big(&z, &(&order / &rb))) {
            break ring.pow_big(&z, &m);
        }
    };
    // x^r = a * w with w in the r-Sylow subgroup
    let e = mod_inverse_big(&rb, &m);
    let x = ring.pow_big(a, &e);
    let w = ring.div(&ring.pow(&x, r), a)?;
    let target = ring.inv(&w)?;
    let dlog = sylow_log(ring, &gen, &target, r, s)?;
    if dlog % r as u128 != 0 {
        return Err(Error::NoRoot(r));
    }
    let y = ring.pow_big(&gen, &BigUint::from(dlog / r as u128));
    Ok(ring.mul(&x, &y))
}

/// Discrete log of `target` to base `gen` of order `r^s`, Pohlig-Hellman.
fn sylow_log<R: Ring>(ring: &R, gen: &R::Elem, target: &R::Elem, r: u64, s: u32) -> Result<u128> {
    let rs = (r as u128).pow(s);
    let gamma = ring.pow_big(gen, &BigUint::from(rs / r as u128));
    let gen_inv = ring.inv(gen)?;
    let mut d: u128 = 0;
    let mut rk: u128 = 1;
    for k in 0..s {
        let partial = ring.mul(target, &ring.pow_big(&gen_inv, &BigUint::from(d)));
        let h = ring.pow_big(&partial, &BigUint::from(rs / (r as u128).pow(k + 1)));
        let mut cur = ring.one();
        let mut digit = None;
        for j in 0..r {
            if cur == h {
                digit = Some(j);
                break;
            }
            cur = ring.mul(&cur, &gamma);
        }
        let digit = digit.ok_or(Error::NoRoot(r))?;
        d += digit as u128 * rk;
        rk *= r as u128;
    }
    Ok(d)
}

fn mod_inverse_big(a: &BigUint, m: &BigUint) -> BigUint {
    use num_bigint::BigInt;
    use num_integer::Integer;
    let ai = BigInt::from(a.clone());
    let mi = BigInt::from(m.clone());
    let g = ai.extended_gcd(&mi);
    let x = g.x.mod_floor(&mi);
    x.to_biguint().expect("nonnegative after reduction")
}

/// All q-th roots of `a` in a finite field, ascending. `q` must be prime to
/// the characteristic.
pub fn qth_roots<R: Ring>(ring: &R, a: &R::Elem, q: u64) -> Result<Vec<R::Elem>> {
    metrics::count_root_extraction();
    if q == 0 || q % ring.characteristic() == 0 {
        return Err(Error::BadOrder(q));
    }
    if ring.is_zero(a) {
        return Ok(vec![a.clone()]);
    }
    let mut x = a.clone();
    for (r, e) in arith::factorize(q) {
        for _ in 0..e {
            x = prime_root(ring, &x, r)?;
        }
    }
    debug_assert!(ring.pow(&x, q) == *a);
    let mut out: Vec<R::Elem> = roots_of_unity(ring, q)
        .iter()
        .map(|w| ring.mul(&x, w))
        .collect();
    out.sort();
    Ok(out)
}

/// The canonical q-th root: least in the element order.
pub fn qth_root<R: Ring>(ring: &R, a: &R::Elem, q: u64) -> Result<R::Elem> {
    Ok(qth_roots(ring, a, q)?.swap_remove(0))
}

/// The matrix `(rho^(-j i))` for `i, j = 1..n`, row index `j`.
pub fn resolvent_matrix<R: Ring>(ring: &R, rho: &R::Elem, n: usize) -> Result<Vec<Vec<R::Elem>>> {
    let rho_inv = ring.inv(rho)?;
    Ok((1..=n)
        .map(|j| (1..=n).map(|i| ring.pow(&rho_inv, (i * j) as u64)).collect())
        .collect())
}

/// Solves `sum_i b_i rho^(-j i) = beta_j` for `j = 1..n` via the inverse
/// transform `b_i = n^-1 sum_j rho^(i j) beta_j`, checking the residual.
pub fn resolvent_system_solve<R: Ring>(
    ring: &R,
    rho: &R::Elem,
    beta: &[R::Elem],
) -> Result<Vec<R::Elem>> {
    let n = beta.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if !has_exact_order(ring, rho, n as u64) {
        return Err(Error::SingularSystem);
    }
    let n_inv = ring
        .inv(&ring.from_u64(n as u64))
        .map_err(|_| Error::SingularSystem)?;
    let powers: Vec<R::Elem> = {
        let mut v = Vec::with_capacity(n);
        let mut cur = ring.one();
        for _ in 0..n {
            v.push(cur.clone());
            cur = ring.mul(&cur, rho);
        }
        v
    };
    let b: Vec<R::Elem> = (1..=n)
        .map(|i| {
            let s = (1..=n).fold(ring.zero(), |acc, j| {
                ring.add(&acc, &ring.mul(&powers[(i * j) % n], &beta[j - 1]))
            });
            ring.mul(&s, &n_inv)
        })
        .collect();
    for j in 1..=n {
        let lhs = (1..=n).fold(ring.zero(), |acc, i| {
            ring.add(&acc, &ring.mul(&b[i - 1], &powers[(n - (i * j) % n) % n]))
        });
        if lhs != beta[j - 1] {
            return Err(Error::SingularSystem);
        }
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{PrimeField, QuotientRing};
    use crate::linalg;
    use proptest::prelude::*;

    fn fp(p: u64) -> PolyRing<PrimeField> {
        PolyRing::new(PrimeField::new(p).unwrap())
    }

    #[test]
    fn modcomp_examples() {
        let px = fp(7);
        let g = px.from_ints(&[0, 0, 1]);
        let h = px.from_ints(&[2, 1]);
        let f = px.from_ints(&[0, 0, 0, 1]);
        assert_eq!(px.modcomp(&g, &h, &f), px.from_ints(&[4, 4, 1]));
        assert_eq!(px.modcomp(&px.x(), &px.from_ints(&[1, 2, 3, 4, 5]), &f), px.from_ints(&[1, 2, 3]));
    }

    #[test]
    fn powmod_examples() {
        let px = fp(3);
        let f = px.from_ints(&[1, 0, 1]);
        assert_eq!(px.powmod(&px.x(), 3, &f), px.from_ints(&[0, 2]));
        let h = px.from_ints(&[1, 2, 2, 1]);
        assert_eq!(px.powmod(&h, 1, &f), px.rem_monic(&h, &f));
    }

    #[test]
    fn gcd_examples() {
        let px = fp(5);
        assert_eq!(
            px.gcd(&px.from_ints(&[-1, 0, 1]), &px.from_ints(&[-1, 1])).unwrap(),
            px.from_ints(&[-1, 1])
        );
        let f = px.from_ints(&[3, 0, 2]);
        assert_eq!(px.gcd(&f, &px.zero()).unwrap(), px.monic(&f).unwrap());
        let p3 = fp(3);
        assert_eq!(
            p3.gcd(&p3.from_ints(&[0, -1, 0, 1]), &p3.from_ints(&[1, 0, 1])).unwrap(),
            p3.one()
        );
    }

    #[test]
    fn xgcd_bezout() {
        let px = fp(11);
        let a = px.from_ints(&[3, 1, 4, 1, 5]);
        let b = px.from_ints(&[9, 2, 6]);
        let (g, s, t) = px.xgcd(&a, &b).unwrap();
        assert_eq!(px.add(&px.mul(&s, &a), &px.mul(&t, &b)), g);
        assert_eq!(g, px.gcd(&a, &b).unwrap());
    }

    #[test]
    fn degree_patterns() {
        let p3 = fp(3);
        assert_eq!(factor_degree_pattern(&p3, &p3.from_ints(&[1, 0, 1])).unwrap(), vec![(2, 1)]);
        let p5 = fp(5);
        assert_eq!(factor_degree_pattern(&p5, &p5.from_ints(&[-1, 0, 1])).unwrap(), vec![(1, 2)]);
        assert!(matches!(
            factor_degree_pattern(&p5, &p5.from_ints(&[1, 2, 1])),
            Err(Error::NotSquarefree)
        ));
    }

    #[test]
    fn factorization_recovers_product() {
        let px = fp(13);
        let factors = vec![
            px.from_ints(&[2, 1]),
            px.from_ints(&[2, 0, 1]),
            px.from_ints(&[2, 0, 0, 1]),
            px.from_ints(&[5, 1]),
        ];
        for f in &factors {
            assert!(is_irreducible(&px, f).unwrap());
        }
        let prod = factors.iter().fold(px.one(), |acc, f| px.mul(&acc, f));
        let mut expected = factors.clone();
        expected.sort_by(|a, b| px.factor_cmp(a, b));
        assert_eq!(factor_squarefree(&px, &prod).unwrap(), expected);
        assert_eq!(
            factor_degree_pattern(&px, &prod).unwrap(),
            vec![(1, 2), (2, 1), (3, 1)]
        );
        assert!(!is_irreducible(&px, &prod).unwrap());
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_int(1), vec![-1, 1]);
        assert_eq!(cyclotomic_int(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_int(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic_int(5), vec![1, 1, 1, 1, 1]);

        let p7 = fp(7);
        assert_eq!(cyclotomic_minpoly(&p7, 3).unwrap(), p7.from_ints(&[-2, 1]));
        assert_eq!(cyclotomic_minpoly(&p7, 2).unwrap(), p7.from_ints(&[1, 1]));
        assert!(matches!(cyclotomic_minpoly(&p7, 14), Err(Error::BadOrder(14))));
        let p19 = fp(19);
        assert_eq!(cyclotomic_minpoly(&p19, 5).unwrap().degree(), Some(2));
    }

    #[test]
    fn qth_root_examples() {
        let f7 = PrimeField::new(7).unwrap();
        assert_eq!(qth_root(&f7, &4, 2).unwrap(), 2);
        assert_eq!(qth_root(&f7, &1, 2).unwrap(), 1);
        assert_eq!(qth_root(&f7, &1, 3).unwrap(), 1);
        assert!(matches!(qth_root(&f7, &6, 2), Err(Error::NoRoot(2))));
        assert_eq!(qth_roots(&f7, &1, 3).unwrap(), vec![1, 2, 4]);
        // cube roots in F_13 (3 | 12) and 4th roots (prime power)
        let f13 = PrimeField::new(13).unwrap();
        for a in 1..13u64 {
            for q in [2u64, 3, 4, 6] {
                match qth_roots(&f13, &a, q) {
                    Ok(rs) => {
                        assert!(!rs.is_empty());
                        for r in rs {
                            assert_eq!(f13.pow(&r, q), a);
                        }
                    }
                    Err(Error::NoRoot(_)) => {
                        assert!((1..13).all(|x| f13.pow(&x, q) != a));
                    }
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }

    #[test]
    fn qth_root_in_extension_field() {
        let f7 = PrimeField::new(7).unwrap();
        let px = PolyRing::new(f7);
        let ring = QuotientRing::new(f7, px.from_ints(&[-3, 0, 1])).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a = ring.random(&mut rng);
            for q in [2u64, 3, 4] {
                let aq = ring.pow(&a, q);
                let r = qth_root(&ring, &aq, q).unwrap();
                assert_eq!(ring.pow(&r, q), aq);
                assert!(qth_roots(&ring, &aq, q).unwrap().contains(&a));
            }
        }
    }

    #[test]
    fn resolvent_solve_small() {
        let f5 = PrimeField::new(5).unwrap();
        let rho = f5.from_int(-1);
        let (b1, b2) = (3u64, 4u64);
        let sol = resolvent_system_solve(&f5, &rho, &[b1, b2]).unwrap();
        let half = f5.inv(&2).unwrap();
        assert_eq!(sol[0], f5.mul(&f5.sub(&b2, &b1), &half));
        assert_eq!(sol[1], f5.mul(&f5.add(&b2, &b1), &half));
        assert_eq!(resolvent_system_solve(&f5, &rho, &[0, 0]).unwrap(), vec![0, 0]);
        assert!(matches!(
            resolvent_system_solve(&f5, &1, &[1, 2]),
            Err(Error::SingularSystem)
        ));
    }

    #[test]
    fn resolvent_determinant_n3() {
        let f7 = PrimeField::new(7).unwrap();
        let m = resolvent_matrix(&f7, &2, 3).unwrap();
        let det = linalg::determinant(&f7, &m).unwrap();
        assert_eq!(f7.square(&det), 1);
    }

    #[test]
    fn karatsuba_matches_schoolbook() {
        let px = fp(101);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (la, lb) in [(40, 40), (33, 70), (100, 64)] {
            let a = px.from_coeffs((0..la).map(|_| px.base.random(&mut rng)).collect());
            let b = px.from_coeffs((0..lb).map(|_| px.base.random(&mut rng)).collect());
            let slow = px.from_coeffs(px.schoolbook(a.coeffs(), b.coeffs()));
            assert_eq!(px.mul(&a, &b), slow);
        }
    }

    fn arb_poly(max_len: usize) -> impl Strategy<Value = Vec<u64>> {
        prop::collection::vec(0u64..101, 0..max_len)
    }

    proptest! {
        #[test]
        fn modcomp_matches_naive(g in arb_poly(7), h in arb_poly(7), f in prop::collection::vec(0u64..101, 6)) {
            let px = fp(101);
            let g = px.from_coeffs(g);
            let h = px.from_coeffs(h);
            let mut fc = f;
            fc.push(1);
            let f = px.from_coeffs(fc);
            let naive = px.rem_monic(&px.compose(&g, &h), &f);
            prop_assert_eq!(px.modcomp(&g, &h, &f), naive);
        }

        #[test]
        fn divrem_reconstructs(a in arb_poly(12), b in arb_poly(6)) {
            let px = fp(101);
            let a = px.from_coeffs(a);
            let b = px.from_coeffs(b);
            prop_assume!(!b.is_zero());
            let (q, r) = px.divrem(&a, &b).unwrap();
            prop_assert_eq!(px.add(&px.mul(&q, &b), &r), a);
            prop_assert!(r.degree().map_or(true, |d| d < b.degree().unwrap()));
        }

        #[test]
        fn powmod_matches_frobenius_composition(h in arb_poly(5), f in prop::collection::vec(0u64..13, 5)) {
            let px = fp(13);
            let mut fc = f;
            fc.push(1);
            let f = px.from_coeffs(fc);
            let h = px.from_coeffs(h);
            // h^p = h(X^p) over F_p
            let xp = px.powmod(&px.x(), 13, &f);
            prop_assert_eq!(px.powmod(&h, 13, &f), px.modcomp(&h, &xp, &f));
        }

        #[test]
        fn qth_root_of_power(a in 1u64..103, q in prop::sample::select(vec![2u64, 3, 17])) {
            let f = PrimeField::new(103).unwrap();
            let aq = f.pow(&a, q);
            let r = qth_root(&f, &aq, q).unwrap();
            prop_assert_eq!(f.pow(&r, q), aq);
        }

        #[test]
        fn resolvent_solve_residual(beta in prop::collection::vec(0u64..31, 5)) {
            let f = PrimeField::new(31).unwrap();
            // 2 has order 5 modulo 31
            let b = resolvent_system_solve(&f, &2, &beta).unwrap();
            for j in 1..=5usize {
                let lhs = (1..=5usize).fold(0, |acc, i| {
                    f.add(&acc, &f.mul(&b[i - 1], &f.pow(&f.inv(&2).unwrap(), (i * j) as u64)))
                });
                prop_assert_eq!(lhs, beta[j - 1]);
            }
        }
    }
}
