//! Per-prime trace computation with method selection and fallbacks, CRT
//! assembly with random-point sign resolution, and the top-level count.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::atkin_gauss::{self, RootChoice};
use crate::curve::{self, point_add, scalar_mul, Curve, CurvePoint, DivPolyCache, DivisionValues};
use crate::error::{Error, Result};
use crate::fields::{PrimeField, QuotientRing, Ring};
use crate::metrics::{self, Counters};
use crate::poly::{self, Poly, PolyRing};
use crate::ray::{self, ModularPolyTable, RayData};

/// Largest prime used by the schedule.
pub const MAX_ELL: u64 = 31;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimeKind {
    Elkies,
    Atkin,
    Special,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidueKind {
    Exact,
    PmPair,
    CandidateSet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Gauss,
    Elkies,
    AtkinClassical,
    Baseline,
}

/// Method selection for Atkin primes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodChoice {
    /// Gauss sums, then classical candidates, then baseline.
    #[default]
    Auto,
    /// Gauss sums without fallback.
    Gauss,
    /// Classical candidate sets.
    Classical,
    /// Baseline Schoof for every prime.
    Baseline,
}

/// The residue information obtained for one prime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceResidue {
    pub ell: u64,
    pub kind: ResidueKind,
    /// Admissible residues of `t` modulo `ell`, ascending.
    pub values: Vec<u64>,
    pub method: Method,
    pub classification: PrimeKind,
    pub r: Option<usize>,
    /// `(degree, count)` of the irreducible factors of the division polynomial.
    pub degree_pattern: Vec<(usize, usize)>,
    pub root_choices: Vec<RootChoiceRecord>,
    pub note: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootChoiceRecord {
    pub q: u64,
    pub index: usize,
    pub count: usize,
}

impl From<RootChoice> for RootChoiceRecord {
    fn from(r: RootChoice) -> Self {
        RootChoiceRecord {
            q: r.q,
            index: r.index,
            count: r.count,
        }
    }
}

impl TraceResidue {
    fn new(ell: u64, kind: ResidueKind, mut values: Vec<u64>, method: Method, class: &Classification) -> Self {
        values.sort();
        values.dedup();
        TraceResidue {
            ell,
            kind,
            values,
            method,
            classification: class.kind,
            r: class.ray.as_ref().map(|r| r.r),
            degree_pattern: class.degree_pattern.clone(),
            root_choices: Vec::new(),
            note: None,
        }
    }

    pub fn contains(&self, t: i64) -> bool {
        self.values.contains(&(t.rem_euclid(self.ell as i64) as u64))
    }
}

/// Structural classification of a prime with the ray used to obtain it.
#[derive(Clone, Debug)]
pub struct Classification {
    pub ell: u64,
    pub kind: PrimeKind,
    pub degree_pattern: Vec<(usize, usize)>,
    pub ray: Option<RayData>,
}

/// Elkies if some torsion factor of degree dividing `(l-1)/2` spans a ray
/// defined over F_p, Atkin otherwise; `l = 3` is special.
pub fn classify(curve: &Curve, ell: u64, table: Option<&ModularPolyTable>) -> Result<Classification> {
    if ell == curve.p || ell < 3 || !crate::fields::is_prime(ell) {
        return Err(Error::PrecondViolated(format!("l = {ell} must be an odd prime other than p")));
    }
    let px = PolyRing::new(curve.field());
    let mut cache = DivPolyCache::new(curve);
    let psi = px.monic(&cache.division_poly(ell as usize))?;
    let parts = poly::distinct_degree(&px, &psi)?;
    let degree_pattern: Vec<(usize, usize)> = parts
        .iter()
        .map(|(d, g)| (*d, g.degree().unwrap_or(0) / d))
        .collect();
    if ell == 3 {
        return Ok(Classification {
            ell,
            kind: PrimeKind::Special,
            degree_pattern,
            ray: None,
        });
    }
    let n = (ell as usize - 1) / 2;
    for (d, part) in &parts {
        if n % d != 0 {
            continue;
        }
        let mut factors = poly::equal_degree(&px, part, *d)?;
        factors.sort_by(|a, b| px.factor_cmp(a, b));
        for h in factors {
            if ray::ray_is_rational(curve, ell, &h)? {
                let ray = ray::build_ray_on_factor(curve, ell, &h)?;
                ray::determine_r(curve, &ray, table)?;
                return Ok(Classification {
                    ell,
                    kind: PrimeKind::Elkies,
                    degree_pattern,
                    ray: Some(ray),
                });
            }
        }
    }
    let ray = ray::build_ray(curve, ell)?;
    ray::determine_r(curve, &ray, table)?;
    Ok(Classification {
        ell,
        kind: PrimeKind::Atkin,
        degree_pattern,
        ray: Some(ray),
    })
}

/// The eigenvalue `lambda` with `phi(P) = lambda P` on a rational ray and
/// `t = lambda + p / lambda mod l`.
pub fn elkies_trace(curve: &Curve, ray: &RayData) -> Result<(u64, u64)> {
    if ray.r != 1 {
        return Err(Error::PrecondViolated("Elkies route needs a rational ray".into()));
    }
    let ell = ray.ell;
    let b = ray.algebra.ring();
    let theta = b.gen();
    let p = curve.p;
    let theta_p = b.pow(&theta, p);
    let fx = curve.rhs(b, &theta);
    let y_ratio = b.pow(&fx, (p - 1) / 2);
    let dv = DivisionValues::new(curve, b, &theta, ray.n + 2);
    for lambda in 1..=ray.n as i64 {
        if dv.g(lambda)? != theta_p {
            continue;
        }
        let h = dv.h(lambda)?;
        let lam = if h == y_ratio {
            lambda as u64
        } else if h == b.neg(&y_ratio) {
            ell - lambda as u64
        } else {
            continue;
        };
        let inv = arith::mod_inv(lam as i64, ell).expect("nonzero eigenvalue");
        let t = (lam + (p % ell) * inv) % ell;
        return Ok((lam, t));
    }
    Err(Error::NoEigenvalue)
}

/// All `t` with `t^2 = p (z + 2 + 1/z) mod l` for primitive `r`-th roots
/// `z` of unity in F_{l^2}.
pub fn atkin_classical(curve: &Curve, ell: u64, r: usize) -> Result<Vec<u64>> {
    if r < 2 {
        return Err(Error::PrecondViolated("classical Atkin candidates need r > 1".into()));
    }
    let fl = PrimeField::new(ell)?;
    let g = (2..ell).find(|&g| fl.legendre(g) == -1).expect("non-residue exists");
    let fx = PolyRing::new(fl);
    let quad = QuotientRing::with_field_flag(fl, fx.from_coeffs(vec![fl.neg(&g), 0, 1]), true)?;
    let mut out = Vec::new();
    for z in poly::roots_of_unity(&quad, r as u64) {
        if !poly::has_exact_order(&quad, &z, r as u64) {
            continue;
        }
        let s = quad.add(&z, &quad.inv(&z)?);
        let s = quad
            .as_base(&s)
            .ok_or_else(|| Error::PrecondViolated("z + 1/z outside F_l".into()))?;
        let val = fl.mul(&(curve.p % ell), &fl.add(&s, &2));
        out.extend((0..ell).filter(|t| fl.mul(t, t) == val));
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// `t mod l` from `phi^2(P) + pP = t phi(P)` at one point of order `l`
/// over the residue field of a torsion factor.
pub fn baseline_schoof(curve: &Curve, ell: u64) -> Result<u64> {
    let tp = curve::torsion_point(curve, ell)?;
    let ring = &tp.field_xy;
    let (x, y) = match &tp.point {
        CurvePoint::Affine { x, y } => (x.clone(), y.clone()),
        CurvePoint::Infinity => unreachable!("torsion point is affine"),
    };
    let p = curve.p;
    let frob = |pt: &(Poly<Poly<u64>>, Poly<Poly<u64>>)| (ring.pow(&pt.0, p), ring.pow(&pt.1, p));
    let phi1 = frob(&(x, y));
    let phi2 = frob(&phi1);
    let phi1 = CurvePoint::Affine { x: phi1.0, y: phi1.1 };
    let phi2 = CurvePoint::Affine { x: phi2.0, y: phi2.1 };
    let pp = scalar_mul(curve, ring, (p % ell) as i64, &tp.point)?;
    let lhs = point_add(curve, ring, &phi2, &pp)?;
    let mut acc = CurvePoint::Infinity;
    for t in 0..ell {
        if acc == lhs {
            return Ok(t);
        }
        acc = point_add(curve, ring, &acc, &phi1)?;
    }
    Err(Error::NoCandidate)
}

fn baseline_residue(curve: &Curve, class: &Classification, note: Option<String>) -> Result<TraceResidue> {
    let t = baseline_schoof(curve, class.ell)?;
    let mut res = TraceResidue::new(class.ell, ResidueKind::Exact, vec![t], Method::Baseline, class);
    res.note = note;
    Ok(res)
}

fn classical_residue(curve: &Curve, class: &Classification, note: Option<String>) -> Result<TraceResidue> {
    let ray = class.ray.as_ref().expect("Atkin classification carries a ray");
    let values = atkin_classical(curve, class.ell, ray.r)?;
    let kind = if values.len() <= 2 {
        ResidueKind::PmPair
    } else {
        ResidueKind::CandidateSet
    };
    let mut res = TraceResidue::new(class.ell, kind, values, Method::AtkinClassical, class);
    res.note = note;
    Ok(res)
}

fn gauss_residue(curve: &Curve, class: &Classification) -> Result<TraceResidue> {
    let ray = class.ray.as_ref().expect("Atkin classification carries a ray");
    let (outcome, iso) = atkin_gauss::gauss_trace(curve, ray)?;
    let mut res = TraceResidue::new(class.ell, ResidueKind::PmPair, outcome.pair.values(), Method::Gauss, class);
    res.root_choices = iso.root_choices.into_iter().map(Into::into).collect();
    Ok(res)
}

/// Computes the residue information for one prime under a method choice.
pub fn trace_residue(
    curve: &Curve,
    ell: u64,
    choice: MethodChoice,
    table: Option<&ModularPolyTable>,
) -> Result<TraceResidue> {
    let class = classify(curve, ell, table)?;
    trace_residue_for(curve, &class, choice)
}

/// As [`trace_residue`] for an existing classification.
pub fn trace_residue_for(curve: &Curve, class: &Classification, choice: MethodChoice) -> Result<TraceResidue> {
    let mut res = residue_inner(curve, class, choice)?;
    let j = curve.j_invariant();
    if class.kind != PrimeKind::Special && (j == 0 || j == 1728 % curve.p) {
        let skip = format!("modular polynomial check of r skipped for j = {j}");
        res.note = Some(match res.note.take() {
            Some(n) => format!("{n}; {skip}"),
            None => skip,
        });
    }
    Ok(res)
}

fn residue_inner(curve: &Curve, class: &Classification, choice: MethodChoice) -> Result<TraceResidue> {
    match (class.kind, choice) {
        (PrimeKind::Special, _) => baseline_residue(curve, class, Some("l = 3 uses the baseline method".into())),
        (_, MethodChoice::Baseline) => baseline_residue(curve, class, None),
        (PrimeKind::Elkies, _) => {
            let ray = class.ray.as_ref().expect("Elkies classification carries a ray");
            match elkies_trace(curve, ray) {
                Ok((lambda, t)) => {
                    let mut res = TraceResidue::new(class.ell, ResidueKind::Exact, vec![t], Method::Elkies, class);
                    res.note = Some(format!("eigenvalue {lambda}"));
                    Ok(res)
                }
                Err(e) if choice == MethodChoice::Auto && e.is_fallback_signal() => {
                    baseline_residue(curve, class, Some(format!("Elkies route failed: {e}")))
                }
                Err(e) => Err(e),
            }
        }
        (PrimeKind::Atkin, MethodChoice::Classical) => classical_residue(curve, class, None),
        (PrimeKind::Atkin, MethodChoice::Gauss) => match gauss_residue(curve, class) {
            Err(Error::DegenerateFrobenius) => classical_residue(
                curve,
                class,
                Some("Frobenius squared is scalar on the ray; classical candidates used".into()),
            ),
            other => other,
        },
        (PrimeKind::Atkin, MethodChoice::Auto) => match gauss_residue(curve, class) {
            Err(e) if e.is_fallback_signal() || matches!(e, Error::MethodInapplicable(_)) => {
                classical_residue(curve, class, Some(format!("Gauss sum route not used: {e}")))
            }
            other => other,
        },
    }
}

/// Result of combining residues.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assembly {
    pub t: i64,
    /// Values in the Hasse interval consistent with every residue.
    pub hasse_candidates: Vec<i64>,
    pub points_tested: usize,
}

/// Values in `[-2 sqrt(p), 2 sqrt(p)]` consistent with all residues.
pub fn hasse_candidates(residues: &[TraceResidue], p: u64) -> Vec<i64> {
    let bound = arith::isqrt(4 * p) as i64;
    let mut out: Vec<i64> = (-bound..=bound)
        .filter(|t| residues.iter().all(|r| r.contains(*t)))
        .collect();
    out.sort();
    out
}

/// Keeps the candidates `t` with `(p + 1 - t) Q = O` for every given point.
pub fn filter_by_points(curve: &Curve, candidates: &[i64], points: &[CurvePoint<u64>]) -> Result<Vec<i64>> {
    let f = curve.field();
    let mut out = Vec::new();
    'cand: for &t in candidates {
        let order = curve.p as i64 + 1 - t;
        for q in points {
            if !scalar_mul(curve, &f, order, q)?.is_infinity() {
                continue 'cand;
            }
        }
        out.push(t);
    }
    Ok(out)
}

/// Enumerates consistent values in the Hasse interval and separates them by
/// random-point order checks.
pub fn crt_assemble(
    residues: &[TraceResidue],
    curve: &Curve,
    rng: &mut ChaCha8Rng,
    points: usize,
) -> Result<Assembly> {
    if residues.is_empty() {
        return Err(Error::PrecondViolated("no residues to assemble".into()));
    }
    let candidates = hasse_candidates(residues, curve.p);
    let mut survivors = candidates.clone();
    let mut tested = 0usize;
    let max_points = points.max(1) * 5;
    while survivors.len() > 1 && tested < max_points {
        let batch: Vec<_> = (0..points.max(1)).map(|_| curve.random_point(rng)).collect();
        tested += batch.len();
        survivors = filter_by_points(curve, &survivors, &batch)?;
    }
    match survivors.as_slice() {
        [t] => Ok(Assembly {
            t: *t,
            hasse_candidates: candidates,
            points_tested: tested,
        }),
        [] => Err(Error::NoCandidate),
        _ => Err(Error::Ambiguous { survivors }),
    }
}

/// Options for [`count_points`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CountConfig {
    pub method: MethodChoice,
    /// Primes to use first; the default schedule continues after them if
    /// they do not determine `t`.
    pub ell_set: Option<Vec<u64>>,
    pub verify_oracle: bool,
    pub seed: u64,
    pub sign_points: usize,
    /// Cross-check field-of-definition degrees against modular polynomials.
    pub check_modular: bool,
}

impl Default for CountConfig {
    fn default() -> Self {
        CountConfig {
            method: MethodChoice::Auto,
            ell_set: None,
            verify_oracle: false,
            seed: 0,
            sign_points: 5,
            check_modular: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountResult {
    pub curve: Curve,
    pub t: i64,
    pub count: u64,
    pub residues: Vec<TraceResidue>,
    pub hasse_candidates: Vec<i64>,
    pub points_tested: usize,
    pub oracle_checked: bool,
    pub counters: Counters,
    pub elapsed_ms: f64,
}

/// Odd primes up to [`MAX_ELL`] other than `p`, ascending.
pub fn default_schedule(p: u64) -> Vec<u64> {
    arith::odd_primes_up_to(MAX_ELL).into_iter().filter(|&l| l != p).collect()
}

/// Whether the Legendre symbol of `t^2 - 4p` agrees with the structural
/// classification.
pub fn discriminant_consistent(kind: PrimeKind, t: i64, p: u64, ell: u64) -> bool {
    let leg = arith::legendre(t * t - 4 * p as i64, ell);
    match kind {
        PrimeKind::Elkies => leg >= 0,
        PrimeKind::Atkin => leg == -1,
        PrimeKind::Special => true,
    }
}

/// `#E(F_p)` from residues modulo small primes.
pub fn count_points(curve: &Curve, config: &CountConfig) -> Result<CountResult> {
    let start = Instant::now();
    let (result, counters) = metrics::measure(|| match count_inner(curve, config) {
        // The modular polynomial check assumes an ordinary curve.
        Err(e @ Error::Mismatch { .. }) => {
            let unchecked = CountConfig {
                check_modular: false,
                ..config.clone()
            };
            match count_inner(curve, &unchecked) {
                Err(Error::SupersingularCurve) => Err(Error::SupersingularCurve),
                _ => Err(e),
            }
        }
        other => other,
    });
    let (t, residues, assembly) = result?;
    let count = (curve.p as i64 + 1 - t) as u64;
    let mut oracle_checked = false;
    if config.verify_oracle {
        let expected = curve::brute_count(curve)?;
        if expected != count {
            return Err(Error::OracleMismatch { expected, got: count });
        }
        oracle_checked = true;
    }
    Ok(CountResult {
        curve: *curve,
        t,
        count,
        residues,
        hasse_candidates: assembly.hasse_candidates,
        points_tested: assembly.points_tested,
        oracle_checked,
        counters,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

fn count_inner(curve: &Curve, config: &CountConfig) -> Result<(i64, Vec<TraceResidue>, Assembly)> {
    let table = if config.check_modular {
        Some(ModularPolyTable::from_env()?)
    } else {
        None
    };
    let mut schedule: Vec<u64> = config
        .ell_set
        .clone()
        .unwrap_or_default()
        .into_iter()
        .filter(|&l| l != curve.p)
        .collect();
    for l in default_schedule(curve.p) {
        if !schedule.contains(&l) {
            schedule.push(l);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut residues: Vec<TraceResidue> = Vec::new();
    let mut modulus: u128 = 1;
    let target = 16 * curve.p as u128;
    let mut next = schedule.into_iter();
    let mut force_next = false;
    loop {
        while force_next || modulus * modulus <= target {
            let Some(ell) = next.next() else {
                return Err(Error::Ambiguous {
                    survivors: hasse_candidates(&residues, curve.p),
                });
            };
            residues.push(trace_residue(curve, ell, config.method, table.as_ref())?);
            modulus *= ell as u128;
            force_next = false;
        }
        match crt_assemble(&residues, curve, &mut rng, config.sign_points) {
            Ok(assembly) => {
                let t = assembly.t;
                if t == 0 {
                    return Err(Error::SupersingularCurve);
                }
                for r in &residues {
                    if !discriminant_consistent(r.classification, t, curve.p, r.ell) {
                        return Err(Error::ClassificationMismatch { ell: r.ell });
                    }
                }
                return Ok((t, residues, assembly));
            }
            // one more prime narrows the candidates
            Err(Error::Ambiguous { .. }) => force_next = true,
            Err(e) => return Err(e),
        }
    }
}
