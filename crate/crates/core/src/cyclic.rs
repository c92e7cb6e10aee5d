//! Polynomially cyclic algebras `A[X]/(f)` with a cyclicity polynomial `C`,
//! the automorphism `nu: X -> C(X)`, partial traces, characters of `<nu>`
//! and Lagrange resolvents in scalar extensions `A[rho][X]/(f)`.

use num_integer::Integer;
use rand::Rng;

use crate::arith;
use crate::error::{Error, Result};
use crate::fields::{QuotientRing, Ring};
use crate::linalg;
use crate::poly::{self, Poly, PolyRing};

type El<R> = Poly<<R as Ring>::Elem>;
type ExtEl<R> = Poly<Poly<<R as Ring>::Elem>>;

/// `C^(k) mod f`, the k-fold composition, by binary powering.
pub fn composition_power<R: Ring>(px: &PolyRing<R>, c: &El<R>, k: usize, f: &El<R>) -> El<R> {
    let mut result = px.rem_monic(&px.x(), f);
    let mut base = px.rem_monic(c, f);
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            result = px.modcomp(&result, &base, f);
        }
        k >>= 1;
        if k > 0 {
            base = px.modcomp(&base, &base, f);
        }
    }
    result
}

/// Whether `C` is a cyclicity polynomial for the monic squarefree `f`:
/// `f(C) = 0 mod f`, `C^(n) = X mod f`, and `gcd(C^(m) - X, f) = 1` for the
/// maximal proper divisors `m` of `n = deg f`.
pub fn verify_cyclic<R: Ring>(px: &PolyRing<R>, f: &El<R>, c: &El<R>) -> Result<bool> {
    let n = match f.degree() {
        Some(n) if n >= 1 => n,
        _ => return Ok(false),
    };
    if !px.is_monic(f) {
        return Ok(false);
    }
    if !px.modcomp(f, c, f).is_zero() {
        return Ok(false);
    }
    let x = px.rem_monic(&px.x(), f);
    if composition_power(px, c, n, f) != x {
        return Ok(false);
    }
    for r in arith::prime_factors(n as u64) {
        let m = n / r as usize;
        let cm = composition_power(px, c, m, f);
        if px.gcd(&px.sub(&cm, &x), f)?.degree() != Some(0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `A[X]/(f)` together with the automorphism `nu` induced by `C`.
#[derive(Clone, Debug)]
pub struct CyclicAlgebra<R: Ring> {
    ring: QuotientRing<R>,
    c: El<R>,
    n: usize,
    nu_powers: Vec<El<R>>,
}

impl<R: Ring> CyclicAlgebra<R> {
    /// Checks cyclicity and precomputes `C^(k)` for `0 <= k < n`.
    pub fn new(base: R, f: El<R>, c: El<R>) -> Result<Self> {
        let px = PolyRing::new(base.clone());
        if !poly::is_squarefree(&px, &f)? {
            return Err(Error::NotSquarefree);
        }
        if !verify_cyclic(&px, &f, &c)? {
            return Err(Error::PrecondViolated("polynomial is not cyclic for the given C".into()));
        }
        Ok(Self::new_unchecked(base, f, c))
    }

    /// As [`CyclicAlgebra::new`] without the cyclicity check.
    pub fn new_unchecked(base: R, f: El<R>, c: El<R>) -> Self {
        let ring = QuotientRing::with_field_flag(base, f, false).expect("monic modulus");
        let px = ring.polys().clone();
        let n = ring.degree();
        let c = ring.reduce(&c);
        let mut nu_powers = vec![ring.gen()];
        for k in 1..n {
            let next = px.modcomp(&nu_powers[k - 1], &c, ring.modulus());
            nu_powers.push(next);
        }
        CyclicAlgebra {
            ring,
            c,
            n,
            nu_powers,
        }
    }

    pub fn ring(&self) -> &QuotientRing<R> {
        &self.ring
    }

    pub fn base(&self) -> &R {
        self.ring.base()
    }

    pub fn modulus(&self) -> &El<R> {
        self.ring.modulus()
    }

    pub fn cyclicity_poly(&self) -> &El<R> {
        &self.c
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The class of `X`.
    pub fn theta(&self) -> El<R> {
        self.ring.gen()
    }

    /// `C^(k mod n)`.
    pub fn nu_power(&self, k: usize) -> &El<R> {
        &self.nu_powers[k % self.n]
    }

    /// `nu^k(a) = a(C^(k)(X))`.
    pub fn apply_nu(&self, a: &El<R>, k: usize) -> El<R> {
        let k = k % self.n;
        if k == 0 {
            return a.clone();
        }
        self.ring
            .polys()
            .modcomp(a, &self.nu_powers[k], self.ring.modulus())
    }

    /// `sum_{j=1}^{n/q} nu^(j q)(a)` by doubling.
    pub fn partial_trace(&self, a: &El<R>, q: usize) -> Result<El<R>> {
        if q == 0 || self.n % q != 0 {
            return Err(Error::PrecondViolated(format!("{q} does not divide {}", self.n)));
        }
        let m = self.n / q;
        let mut acc = self.apply_nu(a, q);
        let mut count = 1usize;
        for bit in (0..usize::BITS - m.leading_zeros() - 1).rev() {
            acc = self.ring.add(&acc, &self.apply_nu(&acc, count * q));
            count *= 2;
            if (m >> bit) & 1 == 1 {
                acc = self.ring.add(&self.apply_nu(a, q), &self.apply_nu(&acc, q));
                count += 1;
            }
        }
        debug_assert_eq!(count, m);
        Ok(acc)
    }

    /// The same sum term by term.
    pub fn partial_trace_naive(&self, a: &El<R>, q: usize) -> El<R> {
        let mut acc = self.ring.zero();
        for j in 1..=self.n / q {
            acc = self.ring.add(&acc, &self.apply_nu(a, j * q));
        }
        acc
    }

    /// Whether `a` is fixed by `nu^k`.
    pub fn is_fixed(&self, a: &El<R>, k: usize) -> bool {
        self.apply_nu(a, k) == *a
    }

    /// Dimension over `A` of the subalgebra fixed by `nu^q`.
    pub fn fixed_dimension(&self, q: usize) -> Result<usize> {
        let n = self.n;
        let base = self.base();
        let mut rows = vec![vec![base.zero(); n]; n];
        for j in 0..n {
            let e = self.ring.polys().monomial(base.one(), j);
            let img = self.ring.sub(&self.apply_nu(&e, q), &e);
            for (i, c) in self.ring.coords(&img).into_iter().enumerate() {
                rows[i][j] = c;
            }
        }
        Ok(n - linalg::rank(base, &rows)?)
    }

    /// The exponent `s` with `X^|A| = C^(s)(X) mod f`, if any.
    pub fn frobenius_exponent(&self) -> Option<usize> {
        let xq = poly::frobenius_x(self.ring.polys(), self.ring.modulus());
        (0..self.n).find(|&s| self.nu_powers[s] == xq)
    }

    /// `M1 = prod_{i=1}^{q2} (X - nu^(q1 i)(theta^(q1 q2)))` and
    /// `M2 = prod_{i=1}^{q2} (X - nu^(q1 i)(theta^(q2)))`, with coefficients
    /// checked to be fixed by `nu^q1`.
    pub fn subalgebra_minpolys(&self, q1: usize, q2: usize) -> Result<(ExtEl<R>, ExtEl<R>)> {
        self.check_pair(q1, q2)?;
        let theta = self.theta();
        let t12 = self.partial_trace(&theta, q1 * q2)?;
        let t2 = self.partial_trace(&theta, q2)?;
        let bx = PolyRing::new(self.ring.clone());
        let build = |t: &El<R>| -> Result<ExtEl<R>> {
            let roots: Vec<El<R>> = (1..=q2).map(|i| self.apply_nu(t, q1 * i)).collect();
            let m = bx.from_roots(&roots);
            if m.coeffs().iter().any(|c| !self.is_fixed(c, q1)) {
                return Err(Error::CoefficientNotInvariant);
            }
            Ok(m)
        };
        Ok((build(&t12)?, build(&t2)?))
    }

    fn check_pair(&self, q1: usize, q2: usize) -> Result<()> {
        if q1 == 0 || q2 == 0 || self.n % (q1 * q2) != 0 || q1.gcd(&q2) != 1 {
            return Err(Error::PrecondViolated(format!(
                "({q1}, {q2}) must be coprime with product dividing {}",
                self.n
            )));
        }
        Ok(())
    }

    /// `W` with `deg W < q2` and `W(theta^(q2)) = theta^(q1 q2)`, coefficients
    /// in the `nu^q1`-fixed subalgebra. Returned as the coordinate matrix
    /// `w[k][m]` over `A` with `W = sum_k (sum_m w[k][m] (theta^(q1))^m) X^k`.
    pub fn connecting_poly(&self, q1: usize, q2: usize) -> Result<ConnectingPoly<R>> {
        self.check_pair(q1, q2)?;
        let theta = self.theta();
        let t1 = self.partial_trace(&theta, q1)?;
        let t2 = self.partial_trace(&theta, q2)?;
        let t12 = self.partial_trace(&theta, q1 * q2)?;
        let r = &self.ring;
        let pow_list = |t: &El<R>, k: usize| -> Vec<El<R>> {
            let mut out = Vec::with_capacity(k);
            let mut cur = r.one();
            for _ in 0..k {
                out.push(cur.clone());
                cur = r.mul(&cur, t);
            }
            out
        };
        let p1 = pow_list(&t1, q1);
        let p2 = pow_list(&t2, q2);
        let mut columns = Vec::with_capacity(q1 * q2);
        for a in &p2 {
            for b in &p1 {
                columns.push(r.coords(&r.mul(a, b)));
            }
        }
        let n = self.n;
        let rows: Vec<Vec<R::Elem>> = (0..n)
            .map(|i| columns.iter().map(|col| col[i].clone()).collect())
            .collect();
        let rhs = r.coords(&t12);
        let sol = match linalg::solve(self.base(), &rows, &rhs) {
            Ok(Some(s)) => s,
            Ok(None) | Err(Error::SingularSystem) => return Err(Error::BasisDegenerate),
            Err(e) => return Err(e),
        };
        let w: Vec<Vec<R::Elem>> = sol.chunks(q1).map(|c| c.to_vec()).collect();
        let coeffs: Vec<El<R>> = w
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&p1)
                    .fold(r.zero(), |acc, (c, pw)| r.add(&acc, &r.mul(&r.embed(c), pw)))
            })
            .collect();
        let poly = Poly::new(coeffs, r);
        if poly.coeffs().iter().any(|c| !self.is_fixed(c, q1)) {
            return Err(Error::CoefficientNotInvariant);
        }
        Ok(ConnectingPoly { w, poly })
    }

    /// Adjoins a primitive `order`-th root of unity to the scalars.
    pub fn extend(&self, order: u64) -> Result<ScalarExtension<R>> {
        let px = PolyRing::new(self.base().clone());
        let k = poly::cyclotomic_minpoly(&px, order)?;
        let scalars = QuotientRing::with_field_flag(self.base().clone(), k, true)?;
        let rho = scalars.gen();
        let ring = self.ring.base_extend(&scalars);
        let nu_powers = self
            .nu_powers
            .iter()
            .map(|c| self.ring.lift_poly(&scalars, c))
            .collect();
        Ok(ScalarExtension {
            order,
            scalars,
            rho,
            ring,
            nu_powers,
        })
    }
}

/// The connecting polynomial `W` of a coprime pair.
#[derive(Clone, Debug)]
pub struct ConnectingPoly<R: Ring> {
    /// Coordinates of the coefficients in the basis of powers of `theta^(q1)`.
    pub w: Vec<Vec<R::Elem>>,
    /// `W` as a polynomial over the algebra.
    pub poly: ExtEl<R>,
}

/// `A[rho][X]/(f)` for a primitive root of unity `rho` of a given order.
#[derive(Clone, Debug)]
pub struct ScalarExtension<R: Ring> {
    pub order: u64,
    /// `A[T]/(K(T))` with `K` the canonical cyclotomic factor.
    pub scalars: QuotientRing<R>,
    pub rho: El<R>,
    pub ring: QuotientRing<QuotientRing<R>>,
    nu_powers: Vec<ExtEl<R>>,
}

impl<R: Ring> ScalarExtension<R> {
    /// Image of an algebra element.
    pub fn lift(&self, a: &El<R>) -> ExtEl<R> {
        Poly::new(
            a.coeffs().iter().map(|c| self.scalars.embed(c)).collect(),
            &self.scalars,
        )
    }

    /// A scalar as a constant element.
    pub fn scalar(&self, c: &El<R>) -> ExtEl<R> {
        self.ring.embed(c)
    }

    /// The scalar if the element is constant in `X`.
    pub fn as_scalar(&self, a: &ExtEl<R>) -> Option<El<R>> {
        self.ring.as_base(a)
    }

    pub fn rho_pow(&self, j: u64) -> El<R> {
        self.scalars.pow(&self.rho, j % self.order)
    }

    pub fn apply_nu(&self, a: &ExtEl<R>, k: usize) -> ExtEl<R> {
        let n = self.nu_powers.len();
        let k = k % n;
        if k == 0 {
            return a.clone();
        }
        self.ring
            .polys()
            .modcomp(a, &self.nu_powers[k], self.ring.modulus())
    }

    /// Applies `x -> x^|A|` to the scalars only, fixing `X`.
    pub fn frobenius_on_scalars(&self, a: &ExtEl<R>) -> ExtEl<R> {
        let q = self.ring.base().base().cardinality();
        Poly::new(
            a.coeffs()
                .iter()
                .map(|c| self.scalars.pow_big(c, &q))
                .collect(),
            &self.scalars,
        )
    }
}

/// A character of `<nu>` sending `nu` to `rho^exponent` for a primitive
/// `modulus`-th root of unity `rho`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Character {
    pub exponent: u64,
    pub modulus: u64,
}

impl Character {
    pub fn new(exponent: u64, modulus: u64) -> Self {
        Character {
            exponent: exponent % modulus,
            modulus,
        }
    }

    pub fn order(&self) -> u64 {
        self.modulus / self.exponent.gcd(&self.modulus)
    }

    pub fn mul(&self, other: &Character) -> Character {
        debug_assert_eq!(self.modulus, other.modulus);
        Character::new(self.exponent + other.exponent, self.modulus)
    }

    pub fn pow(&self, k: u64) -> Character {
        Character::new(
            ((self.exponent as u128 * k as u128) % self.modulus as u128) as u64,
            self.modulus,
        )
    }

    pub fn value<R: Ring>(&self, ext: &ScalarExtension<R>) -> El<R> {
        debug_assert_eq!(self.modulus, ext.order);
        ext.rho_pow(self.exponent)
    }
}

/// `(chi, a) = sum_{i=1}^{n} chi(nu)^i nu^i(a)`, computed through the
/// partial trace of the character's order.
pub fn lagrange_resolvent<R: Ring>(
    alg: &CyclicAlgebra<R>,
    ext: &ScalarExtension<R>,
    chi: &Character,
    a: &El<R>,
) -> Result<ExtEl<R>> {
    let q = chi.order() as usize;
    if alg.n() % q != 0 {
        return Err(Error::PrecondViolated("character order must divide n".into()));
    }
    let t = ext.lift(&alg.partial_trace(a, q)?);
    let z = chi.value(ext);
    let mut acc = ext.ring.zero();
    let mut zi = ext.scalars.one();
    for i in 1..=q {
        zi = ext.scalars.mul(&zi, &z);
        let term = ext.ring.mul(&ext.scalar(&zi), &ext.apply_nu(&t, i));
        acc = ext.ring.add(&acc, &term);
    }
    Ok(acc)
}

/// The defining sum term by term.
pub fn lagrange_resolvent_naive<R: Ring>(
    alg: &CyclicAlgebra<R>,
    ext: &ScalarExtension<R>,
    chi: &Character,
    a: &El<R>,
) -> ExtEl<R> {
    let z = chi.value(ext);
    let la = ext.lift(a);
    let mut acc = ext.ring.zero();
    let mut zi = ext.scalars.one();
    for i in 1..=alg.n() {
        zi = ext.scalars.mul(&zi, &z);
        acc = ext
            .ring
            .add(&acc, &ext.ring.mul(&ext.scalar(&zi), &ext.apply_nu(&la, i)));
    }
    acc
}

/// A random monic irreducible polynomial of the given degree.
pub fn random_irreducible<R: Ring, G: Rng + ?Sized>(
    px: &PolyRing<R>,
    degree: usize,
    rng: &mut G,
) -> Result<El<R>> {
    loop {
        let mut coeffs: Vec<R::Elem> = (0..degree).map(|_| px.base.random(rng)).collect();
        coeffs.push(px.base.one());
        let f = px.from_coeffs(coeffs);
        if poly::is_irreducible(px, &f)? {
            return Ok(f);
        }
    }
}

/// A random cyclic algebra of dimension `k d` whose modulus splits into `k`
/// irreducible factors of degree `d` over `base`. The roots are ordered
/// `x_0, ..., x_{k-1}, x_0^Q, ..., x_{k-1}^Q, ...` for `Q = |base|`, and `C`
/// interpolates the shift along this cycle.
pub fn random_cyclic_algebra<R: Ring, G: Rng + ?Sized>(
    base: &R,
    k: usize,
    d: usize,
    rng: &mut G,
) -> Result<CyclicAlgebra<R>> {
    let px = PolyRing::new(base.clone());
    let ext = QuotientRing::with_field_flag(base.clone(), random_irreducible(&px, d, rng)?, true)?;
    let q = base.cardinality();
    let n = k * d;
    let conjugates = |x: &El<R>| -> Vec<El<R>> {
        let mut out = vec![x.clone()];
        for _ in 1..d {
            let next = ext.pow_big(out.last().unwrap(), &q);
            out.push(next);
        }
        out
    };
    let mut orbits: Vec<Vec<El<R>>> = Vec::new();
    while orbits.len() < k {
        let x = ext.random(rng);
        let orbit = conjugates(&x);
        let distinct = {
            let mut s = orbit.clone();
            s.sort();
            s.dedup();
            s.len() == d
        };
        if distinct && orbits.iter().all(|o| !o.contains(&x)) {
            orbits.push(orbit);
        }
    }
    let roots: Vec<El<R>> = (0..n).map(|i| orbits[i % k][i / k].clone()).collect();
    let images: Vec<El<R>> = (0..n).map(|i| roots[(i + 1) % n].clone()).collect();
    let ex = PolyRing::new(ext.clone());
    let f_ext = ex.from_roots(&roots);
    let c_ext = lagrange_interpolate(&ex, &roots, &images)?;
    let down = |p: &Poly<El<R>>| -> Result<El<R>> {
        let coeffs = p
            .coeffs()
            .iter()
            .map(|c| {
                ext.as_base(c)
                    .ok_or_else(|| Error::PrecondViolated("coefficient outside the base".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(px.from_coeffs(coeffs))
    };
    CyclicAlgebra::new(base.clone(), down(&f_ext)?, down(&c_ext)?)
}

/// The polynomial of degree below `xs.len()` through the given points.
pub fn lagrange_interpolate<R: Ring>(
    px: &PolyRing<R>,
    xs: &[R::Elem],
    ys: &[R::Elem],
) -> Result<El<R>> {
    let r = &px.base;
    let mut acc = px.zero();
    for (i, (xi, yi)) in xs.iter().zip(ys).enumerate() {
        let mut num = px.one();
        let mut den = r.one();
        for (j, xj) in xs.iter().enumerate() {
            if i != j {
                num = px.mul(&num, &px.linear(xj));
                den = r.mul(&den, &r.sub(xi, xj));
            }
        }
        let coef = r.div(yi, &den)?;
        acc = px.add(&acc, &px.scale(&num, &coef));
    }
    Ok(acc)
}
