//! The elliptic Gauss sum method for Atkin primes: the cyclotomic algebra
//! `C = A[U]/(K)`, Gauss sums on both sides, the isomorphism
//! `alpha: B -> C` commuting with `nu` and `sigma`, and the root-free trace
//! equation evaluated in `C`.

use std::cell::RefCell;
use std::collections::HashMap;

use serde::Serialize;

use crate::arith;
use crate::curve::{Curve, DivisionValues};
use crate::cyclic::{lagrange_resolvent, Character, CyclicAlgebra, ScalarExtension};
use crate::error::{Error, Result};
use crate::fields::{QuotientRing, Ring};
use crate::linalg;
use crate::poly::{self, Poly, PolyRing};
use crate::ray::{AElem, APoly, BaseField, RayData};

/// Elements of `C`, polynomials in `U` of degree below `(l - 1) / 2`.
pub type CElem = Poly<AElem>;
/// Elements of `A[rho]`.
pub type SElem = Poly<AElem>;
/// Elements of `B` or `C` with scalars extended to `A[rho]`.
pub type ExtElem = Poly<Poly<AElem>>;

/// `C = A[U]/(K)` with `K = prod_{b square mod l} (U - zeta^b)` and
/// `sigma: zeta -> zeta^(c^2)`.
#[derive(Clone, Debug)]
pub struct CyclotomicAlgebra {
    pub ell: u64,
    pub n: usize,
    pub c: u64,
    pub sigma_exponent: u64,
    /// The period `sum_{b square} zeta^b`.
    pub eta: AElem,
    pub algebra: CyclicAlgebra<BaseField>,
    zeta_powers: Vec<CElem>,
}

impl CyclotomicAlgebra {
    pub fn base(&self) -> &BaseField {
        self.algebra.base()
    }

    pub fn ring(&self) -> &QuotientRing<BaseField> {
        self.algebra.ring()
    }

    pub fn k_poly(&self) -> &APoly {
        self.algebra.modulus()
    }

    pub fn zeta(&self) -> CElem {
        self.algebra.theta()
    }

    /// `zeta^e` reduced modulo `K`.
    pub fn zeta_power(&self, e: u64) -> &CElem {
        &self.zeta_powers[(e % self.ell) as usize]
    }

    /// `c^(2i) mod l`, the exponent of `sigma^i(zeta)`.
    pub fn exponent(&self, i: usize) -> u64 {
        arith::mod_pow(self.sigma_exponent, i as u64, self.ell)
    }

    /// `sigma^i(zeta)` for `i = 1..=n`.
    pub fn conjugates(&self) -> Vec<CElem> {
        (1..=self.n).map(|i| self.zeta_power(self.exponent(i)).clone()).collect()
    }

    pub fn sigma(&self, a: &CElem, k: usize) -> CElem {
        self.algebra.apply_nu(a, k)
    }

    /// Whether the conjugates of `zeta` are linearly independent over `A`.
    pub fn has_normal_basis(&self) -> Result<bool> {
        let ring = self.ring();
        let cols: Vec<Vec<AElem>> = self.conjugates().iter().map(|z| ring.coords(z)).collect();
        let rows: Vec<Vec<AElem>> = (0..self.n)
            .map(|i| cols.iter().map(|c| c[i].clone()).collect())
            .collect();
        Ok(linalg::rank(self.base(), &rows)? == self.n)
    }

    /// `sum_e v_e zeta^e` for exponent-indexed terms.
    pub fn from_terms(&self, terms: &[(u64, AElem)]) -> CElem {
        let ring = self.ring();
        terms.iter().fold(ring.zero(), |acc, (e, v)| {
            ring.add(&acc, &ring.mul(&ring.embed(v), self.zeta_power(*e)))
        })
    }

    /// Coordinates of an element in the basis `sigma^i(zeta)`, `i = 1..=n`.
    pub fn normal_coords(&self, a: &CElem) -> Result<Vec<AElem>> {
        let ring = self.ring();
        let cols: Vec<Vec<AElem>> = self.conjugates().iter().map(|z| ring.coords(z)).collect();
        let rows: Vec<Vec<AElem>> = (0..self.n)
            .map(|i| cols.iter().map(|c| c[i].clone()).collect())
            .collect();
        match linalg::solve(self.base(), &rows, &ring.coords(a)) {
            Ok(Some(x)) => Ok(x),
            Ok(None) | Err(Error::SingularSystem) => Err(Error::NormalBasisFailure),
            Err(e) => Err(e),
        }
    }
}

/// Builds `C` over `A` for the prime `l`, with the period `eta` taken as the
/// least root in `A` of `s^2 + s + (1 - l*)/4`, `l* = (-1)^((l-1)/2) l`.
pub fn build_cyclotomic(a: &BaseField, ell: u64) -> Result<CyclotomicAlgebra> {
    if ell < 5 || !crate::fields::is_prime(ell) {
        return Err(Error::PrecondViolated(format!("l = {ell} must be a prime >= 5")));
    }
    let p = a.characteristic();
    if p == ell {
        return Err(Error::PrecondViolated("l must differ from the characteristic".into()));
    }
    let q_mod = arith::mod_pow(p % ell, a.degree() as u64, ell);
    if arith::legendre(q_mod as i64, ell) != 1 {
        return Err(Error::PrecondViolated(format!(
            "|A| = {q_mod} mod {ell} is not a square"
        )));
    }
    let n = (ell as usize - 1) / 2;
    let ax = PolyRing::new(a.clone());
    let ell_star: i64 = if n % 2 == 0 { ell as i64 } else { -(ell as i64) };
    let period_poly = ax.from_ints(&[(1 - ell_star) / 4, 1, 1]);
    let eta = poly::roots(&ax, &period_poly)?
        .into_iter()
        .next()
        .ok_or_else(|| Error::PrecondViolated("period polynomial has no root in A".into()))?;
    let phi = ax.from_ints(&vec![1i64; ell as usize]);
    let squares: Vec<u64> = (1..ell).filter(|b| arith::legendre(*b as i64, ell) == 1).collect();
    let mut sum_coeffs = vec![a.zero(); ell as usize];
    for b in &squares {
        sum_coeffs[*b as usize] = a.one();
    }
    let period_sum = ax.sub(&ax.from_coeffs(sum_coeffs), &ax.constant(eta.clone()));
    let k = ax.gcd(&phi, &period_sum)?;
    if k.degree() != Some(n) {
        return Err(Error::PrecondViolated(format!(
            "cyclotomic factor has degree {:?}, expected {n}",
            k.degree()
        )));
    }
    let c = arith::least_primitive_root(ell);
    let sigma_exponent = c * c % ell;
    let ring = QuotientRing::with_field_flag(a.clone(), k.clone(), false)?;
    let u = ring.gen();
    let zeta_powers: Vec<CElem> = (0..ell).map(|e| ring.pow(&u, e)).collect();
    let cpoly = zeta_powers[sigma_exponent as usize].clone();
    let algebra = CyclicAlgebra::new(a.clone(), k, cpoly)?;
    Ok(CyclotomicAlgebra {
        ell,
        n,
        c,
        sigma_exponent,
        eta,
        algebra,
        zeta_powers,
    })
}

/// Whether `E_P` and `K` have the same factor degree pattern over `A`.
pub fn check_isomorphic_shape(ray: &RayData, cyc: &CyclotomicAlgebra) -> bool {
    let ax = PolyRing::new(ray.a_field.clone());
    match (
        poly::factor_degree_pattern(&ax, &ray.e_p),
        poly::factor_degree_pattern(&ax, cyc.k_poly()),
    ) {
        (Ok(x), Ok(y)) => x == y,
        _ => false,
    }
}

/// Gauss sums for the character `chi_q` of maximal prime-power order `q`,
/// with `beta_q` a chosen q-th root of `tau_e^q / tau^q`.
#[derive(Clone, Debug)]
pub struct GaussSumPair {
    pub q: u64,
    pub tau_e: ExtElem,
    pub tau: ExtElem,
    pub beta_q_power: SElem,
    pub beta_q: SElem,
    pub root: RootChoice,
}

/// The position of the chosen q-th root among all roots in ascending order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RootChoice {
    pub q: u64,
    pub index: usize,
    pub count: usize,
}

/// `alpha(theta) = sum_{i=1}^{n} b_i sigma^i(zeta)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoCoefficients {
    pub b: Vec<AElem>,
    pub alpha_theta: CElem,
    pub root_choices: Vec<RootChoice>,
}

/// The unordered pair `{t, l - t}` of trace residues.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TracePair {
    pub t: u64,
    pub ell: u64,
}

impl TracePair {
    pub fn values(&self) -> Vec<u64> {
        let mut v = vec![self.t % self.ell, (self.ell - self.t % self.ell) % self.ell];
        v.sort();
        v.dedup();
        v
    }
}

/// Both algebras with scalars extended by a primitive `n`-th root of unity,
/// plus resolvent caches.
#[derive(Debug)]
pub struct GaussSetup {
    pub ray: RayData,
    pub cyc: CyclotomicAlgebra,
    pub ext_b: ScalarExtension<BaseField>,
    pub ext_c: ScalarExtension<BaseField>,
    /// Maximal prime powers dividing `n`, ascending.
    pub prime_powers: Vec<u64>,
    cache_b: RefCell<HashMap<u64, ExtElem>>,
    cache_c: RefCell<HashMap<u64, ExtElem>>,
}

impl GaussSetup {
    pub fn new(ray: RayData, cyc: CyclotomicAlgebra) -> Result<Self> {
        let n = ray.n as u64;
        let p = ray.a_field.characteristic();
        if n < 2 || cyc.n != ray.n {
            return Err(Error::MethodInapplicable(format!(
                "the Gauss sum method needs (l - 1)/2 >= 2, got {n}"
            )));
        }
        if n % p == 0 {
            return Err(Error::MethodInapplicable(format!(
                "p = {p} divides (l - 1)/2 = {n}"
            )));
        }
        let ext_b = ray.algebra.extend(n)?;
        let ext_c = cyc.algebra.extend(n)?;
        debug_assert_eq!(ext_b.scalars.modulus(), ext_c.scalars.modulus());
        let prime_powers = arith::factorize(n)
            .into_iter()
            .map(|(q, e)| q.pow(e))
            .collect();
        Ok(GaussSetup {
            ray,
            cyc,
            ext_b,
            ext_c,
            prime_powers,
            cache_b: RefCell::new(HashMap::new()),
            cache_c: RefCell::new(HashMap::new()),
        })
    }

    pub fn n(&self) -> u64 {
        self.ray.n as u64
    }

    /// The scalar field `A[rho]`.
    pub fn scalars(&self) -> &QuotientRing<BaseField> {
        &self.ext_b.scalars
    }

    /// `(chi, theta)` in `B` for `chi(nu) = rho^e`.
    pub fn elliptic_resolvent(&self, e: u64) -> Result<ExtElem> {
        let e = e % self.n();
        if let Some(v) = self.cache_b.borrow().get(&e) {
            return Ok(v.clone());
        }
        let alg = &self.ray.algebra;
        let v = lagrange_resolvent(alg, &self.ext_b, &Character::new(e, self.n()), &alg.theta())?;
        self.cache_b.borrow_mut().insert(e, v.clone());
        Ok(v)
    }

    /// `(chi, zeta)` in `C` for `chi(sigma) = rho^e`.
    pub fn cyclotomic_resolvent(&self, e: u64) -> Result<ExtElem> {
        let e = e % self.n();
        if let Some(v) = self.cache_c.borrow().get(&e) {
            return Ok(v.clone());
        }
        let alg = &self.cyc.algebra;
        let v = lagrange_resolvent(alg, &self.ext_c, &Character::new(e, self.n()), &alg.theta())?;
        self.cache_c.borrow_mut().insert(e, v.clone());
        Ok(v)
    }

    fn descend(ext: &ScalarExtension<BaseField>, a: &ExtElem) -> Result<SElem> {
        ext.as_scalar(a)
            .ok_or_else(|| Error::PrecondViolated("resolvent power did not descend to the scalars".into()))
    }

    fn check_prime_power(&self, q: u64) -> Result<()> {
        if !self.prime_powers.contains(&q) {
            return Err(Error::PrecondViolated(format!(
                "{q} is not a maximal prime power dividing {}",
                self.n()
            )));
        }
        Ok(())
    }

    /// Gauss sums for `chi_q(nu) = rho^(n/q)` with the canonical root.
    pub fn gauss_sums(&self, q: u64) -> Result<GaussSumPair> {
        self.gauss_sums_with_root(q, 0)
    }

    /// As [`GaussSetup::gauss_sums`] with the root at a given position.
    pub fn gauss_sums_with_root(&self, q: u64, index: usize) -> Result<GaussSumPair> {
        self.check_prime_power(q)?;
        let e = self.n() / q;
        let tau_e = self.elliptic_resolvent(e)?;
        let tau = self.cyclotomic_resolvent(e)?;
        let te_q = Self::descend(&self.ext_b, &self.ext_b.ring.pow(&tau_e, q))?;
        let t_q = Self::descend(&self.ext_c, &self.ext_c.ring.pow(&tau, q))?;
        let s = self.scalars();
        let inv = s.inv(&t_q).map_err(|_| Error::ResolventNotInvertible)?;
        let beta_q_power = s.mul(&te_q, &inv);
        let roots = poly::qth_roots(s, &beta_q_power, q)?;
        let count = roots.len();
        let beta_q = roots
            .get(index)
            .cloned()
            .ok_or_else(|| Error::PrecondViolated(format!("root index {index} out of range")))?;
        Ok(GaussSumPair {
            q,
            tau_e,
            tau,
            beta_q_power,
            beta_q,
            root: RootChoice { q, index, count },
        })
    }

    /// `beta(1) = Tr(theta) / Tr(zeta)`.
    pub fn beta_trivial(&self) -> Result<SElem> {
        let tb = Self::descend(&self.ext_b, &self.elliptic_resolvent(0)?)?;
        let tc = Self::descend(&self.ext_c, &self.cyclotomic_resolvent(0)?)?;
        let s = self.scalars();
        let inv = s.inv(&tc).map_err(|_| Error::NormalBasisFailure)?;
        Ok(s.mul(&tb, &inv))
    }

    /// `beta(psi1 psi2) = beta(psi1) beta(psi2) z / z_e` with
    /// `z = tau(psi1) tau(psi2) / tau(psi1 psi2)` on each side.
    pub fn combine(&self, e1: u64, beta1: &SElem, e2: u64, beta2: &SElem) -> Result<SElem> {
        let e12 = (e1 + e2) % self.n();
        let quotient = |ext: &ScalarExtension<BaseField>, r1: ExtElem, r2: ExtElem, r12: ExtElem| {
            let inv = ext.ring.inv(&r12).map_err(|_| Error::ResolventNotInvertible)?;
            Self::descend(ext, &ext.ring.mul(&ext.ring.mul(&r1, &r2), &inv))
        };
        let z_e = quotient(
            &self.ext_b,
            self.elliptic_resolvent(e1)?,
            self.elliptic_resolvent(e2)?,
            self.elliptic_resolvent(e12)?,
        )?;
        let z = quotient(
            &self.ext_c,
            self.cyclotomic_resolvent(e1)?,
            self.cyclotomic_resolvent(e2)?,
            self.cyclotomic_resolvent(e12)?,
        )?;
        let s = self.scalars();
        let z_e_inv = s.inv(&z_e).map_err(|_| Error::ResolventNotInvertible)?;
        Ok(s.mul(&s.mul(&s.mul(beta1, beta2), &z), &z_e_inv))
    }

    /// `beta(chi_q^i)` for `i = 1..=q`; the last entry is `beta(1)`.
    pub fn beta_powers(&self, pair: &GaussSumPair) -> Result<Vec<SElem>> {
        let q = pair.q;
        let e = self.n() / q;
        let mut out = vec![pair.beta_q.clone()];
        for i in 1..q - 1 {
            let next = self.combine(i * e, &out[i as usize - 1], e, &pair.beta_q)?;
            out.push(next);
        }
        out.push(self.beta_trivial()?);
        Ok(out)
    }

    /// `beta(chi^k)` for `k = 1..=n` with `chi(nu) = rho`, assembled from the
    /// prime-power sequences `per_q[i]` belonging to `prime_powers[i]`.
    pub fn beta_composite(&self, per_q: &[Vec<SElem>]) -> Result<Vec<SElem>> {
        let n = self.n();
        let trivial = self.beta_trivial()?;
        let mut out = Vec::with_capacity(n as usize);
        for k in 1..=n {
            let mut acc: Option<(u64, SElem)> = None;
            for (qi, &q) in self.prime_powers.iter().enumerate() {
                let cof = n / q;
                let inv = arith::mod_inv((cof % q) as i64, q).expect("coprime cofactor");
                let kq = (k % q) * inv % q;
                if kq == 0 {
                    continue;
                }
                let e = kq * cof % n;
                let beta = &per_q[qi][kq as usize - 1];
                acc = Some(match acc {
                    None => (e, beta.clone()),
                    Some((e0, b0)) => ((e0 + e) % n, self.combine(e0, &b0, e, beta)?),
                });
            }
            out.push(match acc {
                None => trivial.clone(),
                Some((e, b)) => {
                    debug_assert_eq!(e, k % n);
                    b
                }
            });
        }
        Ok(out)
    }

    fn per_q_betas(&self, roots: &[usize]) -> Result<(Vec<Vec<SElem>>, Vec<RootChoice>)> {
        let mut per_q = Vec::new();
        let mut choices = Vec::new();
        for (i, &q) in self.prime_powers.iter().enumerate() {
            let pair = self.gauss_sums_with_root(q, roots.get(i).copied().unwrap_or(0))?;
            choices.push(pair.root);
            per_q.push(self.beta_powers(&pair)?);
        }
        Ok((per_q, choices))
    }

    fn project(&self, v: Vec<SElem>) -> Result<Vec<AElem>> {
        v.iter()
            .map(|x| self.scalars().as_base(x).ok_or(Error::CoefficientNotInvariant))
            .collect()
    }

    fn require_normal_basis(&self) -> Result<()> {
        if !self.cyc.has_normal_basis()? {
            return Err(Error::NormalBasisFailure);
        }
        Ok(())
    }

    fn finish(&self, b: Vec<AElem>, root_choices: Vec<RootChoice>) -> Result<IsoCoefficients> {
        let terms: Vec<(u64, AElem)> = b
            .iter()
            .enumerate()
            .map(|(i, bi)| (self.cyc.exponent(i + 1), bi.clone()))
            .collect();
        let iso = IsoCoefficients {
            alpha_theta: self.cyc.from_terms(&terms),
            b,
            root_choices,
        };
        if !self.verify_iso(&iso) {
            return Err(Error::IsoCheckFailed);
        }
        Ok(iso)
    }

    /// Solves `M b = beta` over `A[rho_n]` with canonical roots.
    pub fn solve_iso_direct(&self) -> Result<IsoCoefficients> {
        self.solve_iso_direct_with_roots(&[])
    }

    /// As [`GaussSetup::solve_iso_direct`] with root positions per prime power.
    pub fn solve_iso_direct_with_roots(&self, roots: &[usize]) -> Result<IsoCoefficients> {
        self.require_normal_basis()?;
        let (per_q, choices) = self.per_q_betas(roots)?;
        let betas = self.beta_composite(&per_q)?;
        self.iso_from_betas(&betas, choices)
    }

    /// The isomorphism determined by `beta(chi^k)`, `k = 1..=n`.
    pub fn iso_from_betas(&self, betas: &[SElem], choices: Vec<RootChoice>) -> Result<IsoCoefficients> {
        let b = match poly::resolvent_system_solve(self.scalars(), &self.ext_b.rho, betas) {
            Ok(b) => b,
            Err(Error::SingularSystem) => return Err(Error::NormalBasisFailure),
            Err(e) => return Err(e),
        };
        let b = self.project(b)?;
        self.finish(b, choices)
    }

    /// Restricted isomorphisms on the fixed algebras of `nu^q`, combined
    /// through the connecting polynomials.
    pub fn solve_iso_inductive(&self) -> Result<IsoCoefficients> {
        self.solve_iso_inductive_with_roots(&[])
    }

    pub fn solve_iso_inductive_with_roots(&self, roots: &[usize]) -> Result<IsoCoefficients> {
        self.require_normal_basis()?;
        let (per_q, choices) = self.per_q_betas(roots)?;
        let n = self.n();
        let cring = self.cyc.ring();
        let zeta = self.cyc.zeta();
        let mut restricted = Vec::new();
        for (qi, &q) in self.prime_powers.iter().enumerate() {
            let rho_q = self.ext_b.rho_pow(n / q);
            let a = match poly::resolvent_system_solve(self.scalars(), &rho_q, &per_q[qi]) {
                Ok(a) => a,
                Err(Error::SingularSystem) => return Err(Error::NormalBasisFailure),
                Err(e) => return Err(e),
            };
            let a = self.project(a)?;
            let zq = self.cyc.algebra.partial_trace(&zeta, q as usize)?;
            let value = a.iter().enumerate().fold(cring.zero(), |acc, (i, ai)| {
                let conj = self.cyc.sigma(&zq, i + 1);
                cring.add(&acc, &cring.mul(&cring.embed(ai), &conj))
            });
            restricted.push((q, value));
        }
        let mut iter = restricted.into_iter();
        let (mut cur_q, mut cur_val) = iter.next().expect("n >= 2 has a prime power factor");
        for (q, val) in iter {
            let w = self.ray.algebra.connecting_poly(cur_q as usize, q as usize)?;
            let pow_list = |x: &CElem, k: usize| -> Vec<CElem> {
                let mut out = Vec::with_capacity(k);
                let mut c = cring.one();
                for _ in 0..k {
                    out.push(c.clone());
                    c = cring.mul(&c, x);
                }
                out
            };
            let p1 = pow_list(&cur_val, cur_q as usize);
            let p2 = pow_list(&val, q as usize);
            let mut acc = cring.zero();
            for (k, row) in w.w.iter().enumerate() {
                let coeff = row.iter().zip(&p1).fold(cring.zero(), |s, (c, pw)| {
                    cring.add(&s, &cring.mul(&cring.embed(c), pw))
                });
                acc = cring.add(&acc, &cring.mul(&coeff, &p2[k]));
            }
            cur_q *= q;
            cur_val = acc;
        }
        debug_assert_eq!(cur_q, n);
        let b = self.cyc.normal_coords(&cur_val)?;
        self.finish(b, choices)
    }

    /// `E_P(alpha(theta)) = 0` and `G_c(alpha(theta)) = sigma(alpha(theta))`.
    pub fn verify_iso(&self, iso: &IsoCoefficients) -> bool {
        let c = self.cyc.ring();
        let x = &iso.alpha_theta;
        c.is_zero(&c.eval_base_poly(&self.ray.e_p, x))
            && c.eval_base_poly(&self.ray.g_c, x) == self.cyc.sigma(x, 1)
    }

    /// `sigma^k o alpha`.
    pub fn twist(&self, iso: &IsoCoefficients, k: usize) -> IsoCoefficients {
        let n = self.ray.n;
        let b = (0..n).map(|i| iso.b[(i + n - k % n) % n].clone()).collect();
        IsoCoefficients {
            b,
            alpha_theta: self.cyc.sigma(&iso.alpha_theta, k),
            root_choices: iso.root_choices.clone(),
        }
    }

    /// The `k` with `other = sigma^k o iso`, if any.
    pub fn twist_between(&self, iso: &IsoCoefficients, other: &IsoCoefficients) -> Option<usize> {
        (0..self.ray.n).find(|&k| self.cyc.sigma(&iso.alpha_theta, k) == other.alpha_theta)
    }

    /// `alpha(g(theta)) = g(alpha(theta))`.
    pub fn iso_apply(&self, iso: &IsoCoefficients, g: &APoly) -> CElem {
        let g = self.ray.algebra.ring().reduce(g);
        self.cyc.ring().eval_base_poly(&g, &iso.alpha_theta)
    }

    /// `alpha(theta)^(p^k)` as exponent-indexed terms: exponents multiplied
    /// by `p^k` and coefficients raised to `p^k`.
    pub fn frobenius_terms(&self, iso: &IsoCoefficients, k: usize) -> Vec<(u64, AElem)> {
        let ell = self.cyc.ell;
        let pk = arith::mod_pow(self.ray.a_field.characteristic() % ell, k as u64, ell);
        iso.b
            .iter()
            .enumerate()
            .map(|(i, bi)| {
                let e = self.cyc.exponent(i + 1) * pk % ell;
                (e, self.ray.frobenius.apply_times(bi, k))
            })
            .collect()
    }

    /// `alpha(phi_p^k(theta))` in `C`.
    pub fn frobenius_image(&self, iso: &IsoCoefficients, k: usize) -> CElem {
        self.cyc.from_terms(&self.frobenius_terms(iso, k))
    }

    /// The root-free characteristic equation at `alpha(theta)`; fails with
    /// `DegenerateFrobenius` when `phi^2(theta) - G_p(theta)` is not a unit.
    pub fn trace_equation(&self, curve: &Curve, iso: &IsoCoefficients) -> Result<TraceEquation> {
        let c = self.cyc.ring().clone();
        let ell = self.cyc.ell;
        let n = self.ray.n;
        let x = &iso.alpha_theta;
        let fx = curve.rhs(&c, x);
        let phi1 = self.frobenius_image(iso, 1);
        let phi2 = self.frobenius_image(iso, 2);
        let k = curve.p % ell;
        let dv = DivisionValues::new(curve, &c, x, k as usize + 2);
        let gp = dv.g(k as i64)?;
        let hp = dv.h(k as i64)?;
        let a = c.sub(&phi2, &gp);
        if c.is_zero(&a) || c.inv(&a).is_err() {
            return Err(Error::DegenerateFrobenius);
        }
        let s = c.add(&phi2, &gp);
        let a2 = c.square(&a);
        let f2 = curve.rhs(&c, &phi2);
        let fhp2 = c.mul(&fx, &c.square(&hp));
        let rhs = c.mul_int(&c.mul(&f2, &fhp2), 4);
        let dvt = DivisionValues::new(curve, &c, &phi1, n + 2);
        Ok(TraceEquation {
            ell,
            s,
            a2,
            f2,
            fhp2,
            rhs,
            dvt,
            ring: c,
        })
    }

    /// Tests the equation for `t = 0..=n` and returns the unique solution
    /// pair.
    pub fn determine_trace(&self, curve: &Curve, iso: &IsoCoefficients) -> Result<TraceOutcome> {
        let eq = self.trace_equation(curve, iso)?;
        let n = self.ray.n as u64;
        let mut accepted = Vec::new();
        for t in 0..=n {
            if eq.holds(t)? {
                accepted.push(t);
            }
        }
        match accepted.as_slice() {
            [t] => Ok(TraceOutcome {
                pair: TracePair { t: *t, ell: eq.ell },
                tested: n as usize + 1,
            }),
            [] => Err(Error::NoCandidate),
            _ => Err(Error::Ambiguous {
                survivors: accepted.iter().map(|&t| t as i64).collect(),
            }),
        }
    }
}

/// `B(t)^2 = 4 f(theta)^(p^2+1) H_p(theta)^2` with
/// `B(t) = (G_t(phi(theta)) + S) A^2 - phi^2(f(theta)) - f(theta) H_p^2`,
/// `A = phi^2(theta) - G_p(theta)`, `S = phi^2(theta) + G_p(theta)`, all in `C`.
#[derive(Clone, Debug)]
pub struct TraceEquation {
    pub ell: u64,
    ring: QuotientRing<BaseField>,
    s: CElem,
    a2: CElem,
    f2: CElem,
    fhp2: CElem,
    rhs: CElem,
    dvt: DivisionValues<QuotientRing<BaseField>>,
}

impl TraceEquation {
    /// Whether `t mod l` satisfies the equation. For `t = 0` the left side
    /// would be the point at infinity, which needs `A = 0`.
    pub fn holds(&self, t: u64) -> Result<bool> {
        let t = t % self.ell;
        if t == 0 {
            return Ok(false);
        }
        let t = t.min(self.ell - t) as i64;
        let c = &self.ring;
        let gt = self.dvt.g(t)?;
        let bt = c.sub(&c.sub(&c.mul(&c.add(&gt, &self.s), &self.a2), &self.f2), &self.fhp2);
        Ok(c.square(&bt) == self.rhs)
    }
}

/// The accepted pair and the number of candidates tested.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TraceOutcome {
    pub pair: TracePair,
    pub tested: usize,
}

/// Runs the full method on a ray: builds `C`, solves `alpha` directly and
/// determines `{t, l - t}`.
pub fn gauss_trace(curve: &Curve, ray: &RayData) -> Result<(TraceOutcome, IsoCoefficients)> {
    let cyc = build_cyclotomic(&ray.a_field, ray.ell)?;
    if !check_isomorphic_shape(ray, &cyc) {
        return Err(Error::PrecondViolated("ray and cyclotomic algebras differ in shape".into()));
    }
    let setup = GaussSetup::new(ray.clone(), cyc)?;
    let iso = setup.solve_iso_direct()?;
    let outcome = setup.determine_trace(curve, &iso)?;
    Ok((outcome, iso))
}
