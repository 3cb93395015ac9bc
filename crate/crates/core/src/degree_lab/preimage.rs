//! Real preimages of the Wronski map, signed counts and sharpness.

use super::newton::{flat_to_point, newton_f64, polish, NewtonOptions, Polished, WronskiF64};
use super::walk::{big_cell_to_bk, bk_to_big_cell, recover_sigma, thorn_walk, ThornSpacing, ThornTarget};
use super::DegreeLabError;
use crate::combinatorics::{enumerate_ballot, schubert_degree, signed_sum_dp, BallotSequence, DEFAULT_STATE_CAP};
use crate::grassmann::{big_cell_polys, BigCellPoint};
use crate::linalg::QMatrix;
use crate::polynomials::{real_roots, wronskian, RationalPoly, RealInterval};
use crate::rational::{frac, int, pow2, to_f64, Rational};
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone)]
pub struct PreimageOptions {
    pub seed: u64,
    /// Random starts per unit of `d(m, p)`.
    pub starts_per_degree: usize,
    pub newton: NewtonOptions,
    pub dedupe_tol: f64,
    pub polish_bits: u64,
    /// Thorn shape of the target, if known; adds one walk seed per ballot
    /// sequence.
    pub thorn: Option<ThornTarget>,
    /// For `(2, 2)`, compare against exact elimination.
    pub exact_check: bool,
}

impl Default for PreimageOptions {
    fn default() -> Self {
        PreimageOptions {
            seed: 0,
            starts_per_degree: 200,
            newton: NewtonOptions::default(),
            dedupe_tol: 1e-8,
            polish_bits: 256,
            thorn: None,
            exact_check: true,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PreimageSolution {
    #[serde(serialize_with = "kcoef_f64")]
    pub kcoef: BigCellPoint,
    pub sign: i32,
    pub residual: f64,
}

fn kcoef_f64<S: serde::Serializer>(b: &BigCellPoint, s: S) -> Result<S::Ok, S::Error> {
    let rows: Vec<Vec<f64>> = b.kcoef.to_rows().iter().map(|r| r.iter().map(to_f64).collect()).collect();
    rows.serialize(s)
}

#[derive(Debug, Clone, Serialize)]
pub struct PreimageReport {
    pub m: usize,
    pub p: usize,
    pub target: RationalPoly,
    pub solutions: Vec<PreimageSolution>,
    pub signed_sum: i64,
    pub budget: u64,
    pub seed: u64,
    /// Real solution count from exact elimination, when available.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_count: Option<usize>,
}

impl PreimageReport {
    pub fn count(&self) -> usize {
        self.solutions.len()
    }
}

/// Real preimages for `(m, p) = (2, 2)` by elimination.
///
/// With `f_1 = z^3 - a z - b`, `f_2 = z^2 - c z - d` the monic Wronskian is
/// `z^4 - 2c z^3 + (a - 3d) z^2 + 2b z + (ad - bc)`, so `b` and `c` are read
/// off directly and `d` solves `3d^2 + w_2 d - (w_0 + bc) = 0`.
pub fn exact_preimages_22(w: &RationalPoly, bits: u64) -> Result<Vec<BigCellPoint>, DegreeLabError> {
    if w.degree() != Some(4) {
        return Err(DegreeLabError::TargetDegree { expected: 4, got: w.degree() });
    }
    let w = w.monic();
    let (w0, w1, w2, w3) = (w.coeff(0), w.coeff(1), w.coeff(2), w.coeff(3));
    let b = &w1 / int(2);
    let c = -&w3 / int(2);
    let quad = RationalPoly::from_coeffs(vec![-(&w0 + &b * &c), w2.clone(), int(3)]);
    let mut roots = real_roots(&quad, &RealInterval::all()).expect("nonzero");
    if roots.iter().any(|r| r.multiplicity() > 1) {
        return Err(DegreeLabError::NonGeneric("double preimage".into()));
    }
    roots.refine_all(&pow2(-(bits as i64)));
    Ok(roots
        .iter()
        .map(|r| {
            let d = r.midpoint();
            let a = &w2 + int(3) * &d;
            BigCellPoint::from_flat(2, 2, &[a, b.clone(), c.clone(), d])
        })
        .collect())
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn dedupe_f64(mut xs: Vec<Vec<f64>>, tol: f64) -> Vec<Vec<f64>> {
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let mut out: Vec<Vec<f64>> = Vec::new();
    for x in xs {
        if !out.iter().any(|y| dist(&x, y) < tol) {
            out.push(x);
        }
    }
    out
}

fn same_point(a: &BigCellPoint, b: &BigCellPoint) -> bool {
    let (fa, fb) = (a.flatten(), b.flatten());
    let scale = fa.iter().chain(&fb).fold(Rational::from_integer(1.into()), |s, v| s.max(v.abs()));
    let tol = scale * pow2(-120);
    fa.iter().zip(&fb).all(|(x, y)| (x - y).abs() <= tol)
}

/// Finds the real points `K` of the big cell with `W(f_K)` proportional to `w`.
pub fn preimage_solve(m: usize, p: usize, w: &RationalPoly, opts: &PreimageOptions) -> Result<PreimageReport, DegreeLabError> {
    let n = m * p;
    if w.degree() != Some(n) {
        return Err(DegreeLabError::TargetDegree { expected: n, got: w.degree() });
    }
    let w_monic = w.monic();
    let target: Vec<f64> = w_monic.to_f64_coeffs();
    let budget = schubert_degree(m, p).to_u64().expect("small degree");

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let starts: Vec<Vec<f64>> =
        (0..opts.starts_per_degree * budget as usize).map(|_| (0..n).map(|_| rng.gen_range(-3.0..=3.0)).collect()).collect();
    let sys = WronskiF64::new(m, p);
    let found: Vec<Vec<f64>> =
        starts.par_iter().filter_map(|s| newton_f64(&sys, &target, s, &opts.newton)).collect();
    let found = dedupe_f64(found, opts.dedupe_tol);

    let mut candidates: Vec<BigCellPoint> = found.iter().map(|x| flat_to_point(m, p, x)).collect();
    if let Some(thorn) = &opts.thorn {
        for sigma in enumerate_ballot(m, p) {
            if let Ok(q) = thorn_walk(&sigma, thorn) {
                candidates.push(bk_to_big_cell(&q));
            }
        }
    }
    let polished: Vec<Option<Polished>> =
        candidates.par_iter().map(|c| polish(c, &w_monic, opts.polish_bits)).collect();
    let mut solutions: Vec<Polished> = Vec::new();
    for s in polished.into_iter().flatten() {
        if !solutions.iter().any(|t| same_point(&t.point, &s.point)) {
            solutions.push(s);
        }
    }
    solutions.sort_by(|a, b| {
        let fa: Vec<f64> = a.point.flatten().iter().map(to_f64).collect();
        let fb: Vec<f64> = b.point.flatten().iter().map(to_f64).collect();
        fa.partial_cmp(&fb).expect("finite")
    });
    if solutions.len() as u64 > budget {
        return Err(DegreeLabError::CountExceeded { found: solutions.len(), budget });
    }

    let exact_count = if (m, p) == (2, 2) && opts.exact_check {
        let exact = exact_preimages_22(w, opts.polish_bits)?;
        let tol = 1e-6;
        for e in &exact {
            let ef: Vec<f64> = e.flatten().iter().map(to_f64).collect();
            let hit = solutions.iter().any(|s| {
                let sf: Vec<f64> = s.point.flatten().iter().map(to_f64).collect();
                dist(&ef, &sf) < tol * (1.0 + ef.iter().fold(0.0f64, |a, b| a.max(b.abs())))
            });
            if !hit {
                return Err(DegreeLabError::MissedPreimage(format!("elimination solution {ef:?} not found")));
            }
        }
        Some(exact.len())
    } else {
        None
    };

    let signed_sum = solutions.iter().map(|s| s.sign as i64).sum();
    Ok(PreimageReport {
        m,
        p,
        target: w_monic,
        solutions: solutions
            .into_iter()
            .map(|s| PreimageSolution { kcoef: s.point, sign: s.sign, residual: s.residual })
            .collect(),
        signed_sum,
        budget,
        seed: opts.seed,
        exact_count,
    })
}

/// Targets `W(f_K)` for random `K` with entries in `{-2, -15/8, ..., 2}`.
pub fn random_targets(m: usize, p: usize, count: usize, seed: u64) -> Vec<RationalPoly> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let flat: Vec<Rational> = (0..m * p).map(|_| frac(rng.gen_range(-16..=16), 8)).collect();
            wronskian(&big_cell_polys(&BigCellPoint::from_flat(m, p, &flat))).expect("p >= 1").monic()
        })
        .collect()
}

/// Random monic targets with all `mp` roots real, simple and in `(-2, 2)`.
pub fn random_real_rooted_targets(m: usize, p: usize, count: usize, seed: u64) -> Vec<RationalPoly> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut roots: Vec<i64> = Vec::new();
            while roots.len() < m * p {
                let r = rng.gen_range(-63..=63);
                if !roots.contains(&r) {
                    roots.push(r);
                }
            }
            let roots: Vec<Rational> = roots.into_iter().map(|r| frac(r, 32)).collect();
            RationalPoly::from_roots(&roots)
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct DegreeSumReport {
    pub m: usize,
    pub p: usize,
    pub reports: Vec<PreimageReport>,
    /// Common signed sum, when all targets agree.
    pub value: Option<i64>,
    /// `I(m, p)`.
    pub expected_magnitude: u64,
}

impl DegreeSumReport {
    pub fn passed(&self) -> bool {
        self.value.is_some_and(|v| v.unsigned_abs() == self.expected_magnitude)
    }
}

/// Signed preimage sums over several targets; the target at index `t` is
/// solved with seed `opts.seed + t`.
pub fn degree_signed_sum(
    m: usize,
    p: usize,
    targets: &[RationalPoly],
    opts: &PreimageOptions,
) -> Result<DegreeSumReport, DegreeLabError> {
    let mut reports = Vec::with_capacity(targets.len());
    for (t, w) in targets.iter().enumerate() {
        let o = PreimageOptions { seed: opts.seed.wrapping_add(t as u64), ..opts.clone() };
        reports.push(preimage_solve(m, p, w, &o)?);
    }
    let sums: Vec<i64> = reports.iter().map(|r| r.signed_sum).collect();
    let value = (!sums.is_empty() && sums.iter().all(|&s| s == sums[0])).then(|| sums[0]);
    let expected_magnitude = signed_sum_dp(m, p, DEFAULT_STATE_CAP)
        .map_err(DegreeLabError::Combinatorics)?
        .magnitude
        .to_u64()
        .expect("small");
    Ok(DegreeSumReport { m, p, reports, value, expected_magnitude })
}

#[derive(Debug, Clone, Serialize)]
pub struct SharpnessReport {
    pub delta: String,
    pub spacing: ThornSpacing,
    pub report: PreimageReport,
    /// Ballot sequence read off each preimage's coefficient order.
    pub rankings: Vec<Option<String>>,
    /// Rankings are pairwise distinct and cover every ballot sequence.
    pub bijective: bool,
}

impl SharpnessReport {
    pub fn passed(&self) -> bool {
        self.report.count() as u64 == self.report.budget && self.bijective
    }
}

/// Ranks the coefficients of a preimage in the chart `b(0, ..., p-1)`.
pub fn preimage_ranking(b: &BigCellPoint) -> Option<BallotSequence> {
    recover_sigma(&big_cell_to_bk(b)?)
}

/// Solves a thorn target and checks that it has `d(m, p)` real preimages
/// whose coefficient rankings are all the ballot sequences. Rankings are
/// only expected to separate on nested thorns.
pub fn sharpness_check(
    m: usize,
    p: usize,
    delta: &Rational,
    spacing: ThornSpacing,
    opts: &PreimageOptions,
) -> Result<SharpnessReport, DegreeLabError> {
    let thorn = ThornTarget { spacing, ..ThornTarget::new(delta.clone(), m * p)? };
    let w = thorn.polynomial();
    let o = PreimageOptions { thorn: Some(thorn), ..opts.clone() };
    let report = preimage_solve(m, p, &w, &o)?;
    let ranks: Vec<Option<BallotSequence>> = report.solutions.iter().map(|s| preimage_ranking(&s.kcoef)).collect();
    let all: Vec<BallotSequence> = enumerate_ballot(m, p).collect();
    let mut seen: Vec<&BallotSequence> = ranks.iter().flatten().collect();
    seen.sort_by(|a, b| a.entries().cmp(b.entries()));
    seen.dedup();
    let bijective = ranks.iter().all(Option::is_some) && seen.len() == all.len() && ranks.len() == all.len();
    Ok(SharpnessReport {
        delta: crate::rational::format_rational(delta),
        spacing,
        report,
        rankings: ranks.iter().map(|r| r.as_ref().map(ToString::to_string)).collect(),
        bijective,
    })
}

/// Exact Jacobian of the big-cell map at a rational point.
pub fn big_cell_jacobian(b: &BigCellPoint) -> QMatrix {
    super::newton::coefficient_jacobian(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> PreimageOptions {
        PreimageOptions { starts_per_degree: 40, ..Default::default() }
    }

    #[test]
    fn exact_oracle_round_trip() {
        let k = BigCellPoint::from_flat(2, 2, &[frac(1, 2), int(-1), frac(3, 2), int(1)]);
        let w = wronskian(&big_cell_polys(&k)).unwrap();
        let sols = exact_preimages_22(&w, 200).unwrap();
        assert!(sols.iter().any(|s| same_point(s, &k)));
    }

    #[test]
    fn planted_22_solution_found() {
        let w = random_targets(2, 2, 1, 3).pop().unwrap();
        let r = preimage_solve(2, 2, &w, &quick()).unwrap();
        assert!(r.count() >= 1);
        assert_eq!(r.exact_count, Some(r.count()));
        assert_eq!(r.signed_sum, 0);
    }

    #[test]
    fn degree_below_mp_rejected() {
        let w = RationalPoly::from_i64(&[1, 0, 1]);
        assert!(matches!(preimage_solve(2, 2, &w, &quick()), Err(DegreeLabError::TargetDegree { .. })));
    }
}
