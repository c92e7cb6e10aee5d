//! Ray polynomials `E_P = prod_{a=1}^{(l-1)/2} (X - (aP)_x)` of an l-torsion
//! point, their field of definition `F_{p^r}`, the cyclicity polynomial
//! `G_c`, and classical modular polynomials for cross-checking `r`.

use std::collections::BTreeMap;
use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::arith;
use crate::curve::{Curve, DivPolyCache, DivisionValues};
use crate::cyclic::CyclicAlgebra;
use crate::error::{Error, Result};
use crate::fields::{frobenius_orbit_len, FrobeniusTable, PrimeField, QuotientRing, Ring};
use crate::linalg;
use crate::poly::{self, Poly, PolyRing};

/// The field `A = F_p[z]/(m(z))` of definition of a ray polynomial.
pub type BaseField = QuotientRing<PrimeField>;
/// Elements of `A`.
pub type AElem = Poly<u64>;
/// Polynomials over `A`, and elements of `A`-algebras.
pub type APoly = Poly<AElem>;

/// A ray polynomial with its cyclic algebra `B = A[T]/(E_P)`.
#[derive(Clone, Debug)]
pub struct RayData {
    pub ell: u64,
    /// `(l - 1) / 2`, the degree of `E_P`.
    pub n: usize,
    /// Least primitive root modulo `l`.
    pub c: u64,
    /// Degree of the field of definition over F_p.
    pub r: usize,
    /// The irreducible factor of the division polynomial holding `P_x`.
    pub torsion_factor: Poly<u64>,
    pub a_field: BaseField,
    pub frobenius: FrobeniusTable,
    pub e_p: APoly,
    pub g_c: APoly,
    pub algebra: CyclicAlgebra<BaseField>,
}

impl RayData {
    /// `p^r mod l`.
    pub fn field_size_mod_ell(&self) -> u64 {
        arith::mod_pow(self.a_field.characteristic(), self.r as u64, self.ell)
    }
}

fn check_ell(curve: &Curve, ell: u64) -> Result<()> {
    if ell < 5 || !crate::fields::is_prime(ell) || ell == curve.p {
        return Err(Error::PrecondViolated(format!(
            "ray construction needs a prime l >= 5 different from p, got {ell}"
        )));
    }
    Ok(())
}

/// The abscissae `(aP)_x` for `a = 1..=n` with `P_x` the class of `x` in
/// `F_p[x]/(h)`.
fn ray_abscissae(curve: &Curve, field_x: &BaseField, n: usize) -> Result<Vec<AElem>> {
    let x0 = field_x.gen();
    let dv = DivisionValues::new(curve, field_x, &x0, n + 2);
    (1..=n as i64).map(|a| dv.g(a)).collect()
}

/// The ray polynomial over `F_p[x]/(h)` before descent.
pub fn ray_poly_over_torsion_field(
    curve: &Curve,
    ell: u64,
    h: &Poly<u64>,
) -> Result<(BaseField, APoly)> {
    let field_x = QuotientRing::with_field_flag(curve.field(), h.clone(), true)?;
    let n = (ell as usize - 1) / 2;
    let xs = ray_abscissae(curve, &field_x, n)?;
    let lx = PolyRing::new(field_x.clone());
    Ok((field_x, lx.from_roots(&xs)))
}

/// Whether the ray through a root of `h` is defined over F_p.
pub fn ray_is_rational(curve: &Curve, ell: u64, h: &Poly<u64>) -> Result<bool> {
    let (field_x, e) = ray_poly_over_torsion_field(curve, ell, h)?;
    Ok(e.coeffs().iter().all(|c| field_x.as_base(c).is_some()))
}

/// Builds the ray of the canonical least-degree torsion factor.
pub fn build_ray(curve: &Curve, ell: u64) -> Result<RayData> {
    check_ell(curve, ell)?;
    let mut cache = DivPolyCache::new(curve);
    let px = PolyRing::new(curve.field());
    let psi = px.monic(&cache.division_poly(ell as usize))?;
    let (_, factors) = poly::least_degree_factors(&px, &psi)?;
    build_ray_on_factor(curve, ell, &factors[0])
}

/// Builds the ray through a root of the given irreducible factor of the
/// division polynomial.
pub fn build_ray_on_factor(curve: &Curve, ell: u64, h: &Poly<u64>) -> Result<RayData> {
    check_ell(curve, ell)?;
    let n = (ell as usize - 1) / 2;
    let (field_x, e_l) = ray_poly_over_torsion_field(curve, ell, h)?;
    let table = FrobeniusTable::new(&field_x);
    let r = e_l
        .coeffs()
        .iter()
        .map(|c| frobenius_orbit_len(&table, c))
        .fold(1usize, |acc, m| acc.lcm(&m));
    let (a_field, embedding) = subfield(&field_x, &table, r)?;
    let coeffs = e_l
        .coeffs()
        .iter()
        .map(|c| express_in_subfield(&field_x, &embedding, c))
        .collect::<Result<Vec<_>>>()?;
    let e_p = Poly::new(coeffs, &a_field);
    let ax = PolyRing::new(a_field.clone());
    if !poly::is_squarefree(&ax, &e_p)? {
        return Err(Error::DegenerateRay("ray polynomial has repeated roots".into()));
    }
    let c = arith::least_primitive_root(ell);
    let b_ring = QuotientRing::with_field_flag(a_field.clone(), e_p.clone(), false)?;
    let theta = b_ring.gen();
    let dv = DivisionValues::new(curve, &b_ring, &theta, c as usize + 2);
    let g_c = dv.g(c as i64)?;
    let algebra = match CyclicAlgebra::new(a_field.clone(), e_p.clone(), g_c.clone()) {
        Ok(alg) => alg,
        Err(Error::NotSquarefree) => {
            return Err(Error::DegenerateRay("ray polynomial has repeated roots".into()))
        }
        Err(Error::PrecondViolated(msg)) => return Err(Error::DegenerateRay(msg)),
        Err(e) => return Err(e),
    };
    let frobenius = FrobeniusTable::new(&a_field);
    debug_assert_eq!(e_p.degree(), Some(n));
    Ok(RayData {
        ell,
        n,
        c,
        r,
        torsion_factor: h.clone(),
        a_field,
        frobenius,
        e_p,
        g_c,
        algebra,
    })
}

/// The subfield of order `p^r` inside `field`, presented as `F_p[z]/(m)`,
/// with the powers `gamma^j` (`j < r`) of the image of `z`.
fn subfield(
    field: &BaseField,
    table: &FrobeniusTable,
    r: usize,
) -> Result<(BaseField, Vec<AElem>)> {
    let fp = *field.base();
    let px = PolyRing::new(fp);
    let big = field.degree();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5f1e1d);
    let gamma = loop {
        let u = field.random(&mut rng);
        // relative trace down to F_{p^r}
        let mut t = field.zero();
        let mut cur = u;
        for _ in 0..big / r {
            t = field.add(&t, &cur);
            cur = table.apply_times(&cur, r);
        }
        if frobenius_orbit_len(table, &t) == r {
            break t;
        }
    };
    let lx = PolyRing::new(field.clone());
    let conjugates: Vec<AElem> = (0..r).map(|i| table.apply_times(&gamma, i)).collect();
    let m_l = lx.from_roots(&conjugates);
    let m = px.from_coeffs(
        m_l.coeffs()
            .iter()
            .map(|c| field.as_base(c).expect("minimal polynomial over F_p"))
            .collect(),
    );
    let a_field = QuotientRing::with_field_flag(fp, m, true)?;
    let mut powers = Vec::with_capacity(r);
    let mut cur = field.one();
    for _ in 0..r {
        powers.push(cur.clone());
        cur = field.mul(&cur, &gamma);
    }
    Ok((a_field, powers))
}

fn express_in_subfield(field: &BaseField, powers: &[AElem], c: &AElem) -> Result<AElem> {
    let fp = *field.base();
    let cols: Vec<Vec<u64>> = powers.iter().map(|p| field.coords(p)).collect();
    let rows: Vec<Vec<u64>> = (0..field.degree())
        .map(|i| cols.iter().map(|col| col[i]).collect())
        .collect();
    let sol = linalg::solve(&fp, &rows, &field.coords(c))?
        .ok_or_else(|| Error::DegenerateRay("coefficient outside the field of definition".into()))?;
    Ok(Poly::new(sol, &fp))
}

/// Field-of-definition degree of the constructed ray, cross-checked against
/// the factor degrees of `Phi_l(X, j)` when a table entry exists and
/// `j` is neither 0 nor 1728.
pub fn determine_r(curve: &Curve, ray: &RayData, table: Option<&ModularPolyTable>) -> Result<usize> {
    let Some(phi) = table.and_then(|t| t.get(ray.ell)) else {
        return Ok(ray.r);
    };
    let j = curve.j_invariant();
    if j == 0 || j == 1728 % curve.p {
        return Ok(ray.r);
    }
    let degrees = phi.factor_degrees_at(curve, j)?;
    if !degrees.contains(&ray.r) {
        return Err(Error::Mismatch {
            ray: ray.r,
            modular: degrees,
        });
    }
    Ok(ray.r)
}

/// A classical modular polynomial `Phi_l(X, J)` with integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModularPoly {
    pub ell: u64,
    /// `(i, j, c)` for the monomial `c X^i J^j`.
    pub terms: Vec<(usize, usize, BigInt)>,
}

impl ModularPoly {
    pub fn degree_x(&self) -> usize {
        self.terms.iter().map(|t| t.0).max().unwrap_or(0)
    }

    pub fn degree_j(&self) -> usize {
        self.terms.iter().map(|t| t.1).max().unwrap_or(0)
    }

    pub fn is_symmetric(&self) -> bool {
        let map: BTreeMap<(usize, usize), &BigInt> =
            self.terms.iter().map(|(i, j, c)| ((*i, *j), c)).collect();
        map.iter().all(|((i, j), c)| map.get(&(*j, *i)) == Some(c))
    }

    /// `Phi_l(X, j)` over F_p.
    pub fn specialize(&self, field: &PrimeField, j: u64) -> Poly<u64> {
        let p = BigInt::from(field.modulus());
        let mut coeffs = vec![0u64; self.degree_x() + 1];
        for (i, e, c) in &self.terms {
            let cm = c.mod_floor(&p);
            let cm = u64::try_from(&cm).expect("reduced below p");
            let term = field.mul(&cm, &field.pow(&j, *e as u64));
            coeffs[*i] = field.add(&coeffs[*i], &term);
        }
        Poly::new(coeffs, field)
    }

    /// Degrees of the distinct irreducible factors of `Phi_l(X, j)` over F_p.
    pub fn factor_degrees_at(&self, curve: &Curve, j: u64) -> Result<Vec<usize>> {
        let field = curve.field();
        let px = PolyRing::new(field);
        let f = self.specialize(&field, j);
        let sqfree = px.div_exact(&f, &px.gcd(&f, &px.derivative(&f))?)?;
        let sqfree = px.monic(&sqfree)?;
        let mut degrees: Vec<usize> = poly::factor_degree_pattern(&px, &sqfree)?
            .into_iter()
            .map(|(d, _)| d)
            .collect();
        degrees.dedup();
        Ok(degrees)
    }
}

/// Modular polynomials keyed by `l`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ModularPolyTable {
    polys: BTreeMap<u64, ModularPoly>,
}

/// Environment variable naming an alternative data file.
pub const MODPOLY_ENV: &str = "SCHOOF_MODPOLY_PATH";

const BUNDLED: &str = include_str!("../data/modular_polynomials.txt");

impl ModularPolyTable {
    /// Parses the line format `ell <l>` followed by `i j c` monomial lines;
    /// `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut polys = BTreeMap::new();
        let mut current: Option<ModularPoly> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let err = |msg: &str| Error::Parse {
                line: line_no,
                msg: msg.to_string(),
            };
            if fields[0] == "ell" {
                if fields.len() != 2 {
                    return Err(err("expected `ell <l>`"));
                }
                let ell: u64 = fields[1].parse().map_err(|_| err("bad value of l"))?;
                if let Some(done) = current.take() {
                    polys.insert(done.ell, done);
                }
                current = Some(ModularPoly {
                    ell,
                    terms: Vec::new(),
                });
                continue;
            }
            if fields.len() != 3 {
                return Err(err("expected `i j c`"));
            }
            let cur = current
                .as_mut()
                .ok_or_else(|| err("monomial before any `ell` header"))?;
            let i: usize = fields[0].parse().map_err(|_| err("bad exponent of X"))?;
            let j: usize = fields[1].parse().map_err(|_| err("bad exponent of J"))?;
            let c: BigInt = fields[2].parse().map_err(|_| err("bad coefficient"))?;
            cur.terms.push((i, j, c));
        }
        if let Some(done) = current.take() {
            polys.insert(done.ell, done);
        }
        Ok(ModularPolyTable { polys })
    }

    /// The table shipped with the crate.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED).expect("bundled modular polynomial data is well formed")
    }

    /// The file named by `SCHOOF_MODPOLY_PATH`, else the bundled table.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os(MODPOLY_ENV) {
            Some(path) => load_modular_polys(Path::new(&path)),
            None => Ok(Self::bundled()),
        }
    }

    pub fn get(&self, ell: u64) -> Option<&ModularPoly> {
        self.polys.get(&ell)
    }

    pub fn ells(&self) -> Vec<u64> {
        self.polys.keys().copied().collect()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }
}

pub fn load_modular_polys(path: &Path) -> Result<ModularPolyTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(e.to_string()))?;
    ModularPolyTable::parse(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve;
    use crate::cyclic::verify_cyclic;

    #[test]
    fn bundled_table_shapes() {
        let t = ModularPolyTable::bundled();
        assert_eq!(t.ells(), vec![3, 5, 7, 11, 13]);
        for ell in t.ells() {
            let phi = t.get(ell).unwrap();
            assert_eq!(phi.degree_x(), ell as usize + 1);
            assert_eq!(phi.degree_j(), ell as usize + 1);
            assert!(phi.is_symmetric());
        }
        let phi3 = t.get(3).unwrap();
        let c = phi3
            .terms
            .iter()
            .find(|(i, j, _)| (*i, *j) == (3, 1))
            .map(|t| t.2.clone());
        assert_eq!(c, Some(BigInt::from(-1069956)));
    }

    #[test]
    fn parse_edge_cases() {
        assert!(ModularPolyTable::parse("").unwrap().is_empty());
        assert!(ModularPolyTable::parse("# only a comment\n").unwrap().is_empty());
        match ModularPolyTable::parse("ell 3\n0 1 12\n1 x 4\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        match ModularPolyTable::parse("0 0 1\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ray_structure() {
        for (p, a, b, ell) in [(5u64, 1i64, 1i64, 7u64), (101, 1, 3, 5), (103, 2, 7, 7), (61, 5, 9, 11)] {
            let c = Curve::new(p, a, b).unwrap();
            let ray = build_ray(&c, ell).unwrap();
            assert_eq!(ray.e_p.degree(), Some((ell as usize - 1) / 2));
            let ax = PolyRing::new(ray.a_field.clone());
            assert!(verify_cyclic(&ax, &ray.e_p, &ray.g_c).unwrap());
            assert!(ray.r as u64 <= ell + 1);
            // G_c permutes the roots with full period
            let alg = &ray.algebra;
            let theta = alg.theta();
            assert_eq!(alg.apply_nu(&theta, ray.n), theta);
            for k in 1..ray.n {
                assert_ne!(alg.apply_nu(&theta, k), theta);
            }
            // all factors over A have one degree
            let pattern = poly::factor_degree_pattern(&ax, &ray.e_p).unwrap();
            assert_eq!(pattern.len(), 1);
            let table = ModularPolyTable::bundled();
            assert_eq!(determine_r(&c, &ray, Some(&table)).unwrap(), ray.r);
        }
    }

    #[test]
    fn atkin_example_has_r_above_one() {
        let c = Curve::new(5, 1, 1).unwrap();
        let ray = build_ray(&c, 7).unwrap();
        assert!(ray.r > 1);
    }

    #[test]
    fn ray_depends_only_on_the_line() {
        let c = Curve::new(101, 1, 3).unwrap();
        let ell = 7u64;
        let base = build_ray(&c, ell).unwrap();
        // the abscissa of aP satisfies a factor of the same degree; rebuild from it
        let field_x = QuotientRing::with_field_flag(c.field(), base.torsion_factor.clone(), true).unwrap();
        let xs = ray_abscissae(&c, &field_x, base.n).unwrap();
        let px = PolyRing::new(c.field());
        for xa in xs.iter().skip(1) {
            // minimal polynomial of (aP)_x over F_p
            let table = FrobeniusTable::new(&field_x);
            let k = frobenius_orbit_len(&table, xa);
            let lx = PolyRing::new(field_x.clone());
            let conj: Vec<_> = (0..k).map(|i| table.apply_times(xa, i)).collect();
            let m = lx.from_roots(&conj);
            let h = px.from_coeffs(m.coeffs().iter().map(|c| field_x.as_base(c).unwrap()).collect());
            let other = build_ray_on_factor(&c, ell, &h).unwrap();
            assert_eq!(other.r, base.r);
            // same polynomial over F_p[x]/(h) up to the chosen subfield presentation:
            // compare the sets of roots through the torsion fields
            let (_, e1) = ray_poly_over_torsion_field(&c, ell, &base.torsion_factor).unwrap();
            let lx1 = PolyRing::new(field_x.clone());
            for root in &xs {
                assert!(field_x.is_zero(&lx1.eval(&e1, root)));
            }
        }
    }

    #[test]
    fn elkies_ray_is_rational() {
        // find an Elkies instance at l = 5 by exhaustive trace
        let mut found = false;
        for b in 1..40i64 {
            let Ok(c) = Curve::new(101, 3, b) else { continue };
            let t = curve::brute_trace(&c).unwrap();
            if arith::legendre(t * t - 4 * 101, 5) != 1 {
                continue;
            }
            let mut cache = DivPolyCache::new(&c);
            let px = PolyRing::new(c.field());
            let psi = px.monic(&cache.division_poly(5)).unwrap();
            let factors = poly::factor_squarefree(&px, &psi).unwrap();
            let rational = factors
                .iter()
                .filter(|h| h.degree().unwrap() <= 2)
                .any(|h| ray_is_rational(&c, 5, h).unwrap());
            assert!(rational);
            let h = factors
                .iter()
                .find(|h| h.degree().unwrap() <= 2 && ray_is_rational(&c, 5, h).unwrap())
                .unwrap();
            let ray = build_ray_on_factor(&c, 5, h).unwrap();
            assert_eq!(ray.r, 1);
            found = true;
            break;
        }
        assert!(found);
    }

    #[test]
    fn rejects_small_ell() {
        let c = Curve::new(5, 1, 1).unwrap();
        assert!(build_ray(&c, 3).is_err());
        assert!(build_ray(&c, 5).is_err());
    }
}
