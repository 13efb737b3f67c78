//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line. Every tolerance is exact equality; no floating point exists in
//! the engine.

use std::sync::OnceLock;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;

use sumset_cn::morris::{
    antisymmetrize_check, check_identity, delta, elementary_symmetric_2, grid_check, lhs,
    power_sum_2, IdentityKind, IndexChoice, MorrisParams,
};
use sumset_cn::nullstellensatz::build_restriction_poly;
use sumset_cn::polyring::{
    sum_of_vars, ExponentCap, Monomial, RingTag, SparsePoly,
};
use sumset_cn::sumsets::{
    enumerate_c, enumerate_support, gen_instance, smallest_admissible_prime, verify, Condition,
    Restriction, SumsetInstance, TheoremId, VerifyReport,
};

fn q(v: i64) -> BigRational {
    BigRational::from(BigInt::from(v))
}

const GRID_N: [u32; 4] = [1, 2, 3, 4];
const GRID_M: [u32; 3] = [0, 1, 2];
const GRID_B: [u32; 5] = [0, 1, 2, 3, 4];

#[test]
fn criterion_1_leading_and_square_identities() {
    let start = Instant::now();
    let reports = grid_check(
        &[IdentityKind::Leading, IdentityKind::SquareTerm],
        &GRID_N,
        &GRID_M,
        &GRID_B,
    );
    let mismatches: Vec<String> = reports
        .iter()
        .filter(|r| !r.skipped && !r.equal)
        .map(|r| format!("{} at {:?}", r.id, r.params))
        .collect();
    assert!(mismatches.is_empty(), "identity mismatches: {mismatches:?}");

    // Spot values, frozen from hand expansions.
    let spot = |kind, n, m, b, index: IndexChoice, expect: i64| {
        let params = MorrisParams::new(n, m, b);
        assert_eq!(lhs(kind, &params, &index).unwrap(), q(expect));
        assert_eq!(
            sumset_cn::morris::rhs(kind, &params).unwrap(),
            q(expect)
        );
    };
    spot(IdentityKind::Leading, 2, 1, 1, IndexChoice::None, -2);
    spot(IdentityKind::Leading, 2, 1, 2, IndexChoice::None, -4);
    spot(IdentityKind::SquareTerm, 2, 1, 2, IndexChoice::R(1), 0);
    spot(IdentityKind::SquareTerm, 2, 1, 2, IndexChoice::R(2), 0);

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "grid took {elapsed:?}, budget 60 s");
    println!("ACCEPTANCE 1 (leading/square identity grid, exact): PASS in {elapsed:?}");
}

#[test]
fn criterion_2_linear_cross_identities_and_seams() {
    let start = Instant::now();
    let reports = grid_check(
        &[IdentityKind::LinearTerm, IdentityKind::CrossTerm],
        &GRID_N,
        &GRID_M,
        &GRID_B,
    );
    let mismatches: Vec<String> = reports
        .iter()
        .filter(|r| !r.skipped && !r.equal)
        .map(|r| format!("{} at {:?}", r.id, r.params))
        .collect();
    assert!(mismatches.is_empty(), "identity mismatches: {mismatches:?}");

    let params = MorrisParams::new(2, 1, 2);
    assert_eq!(
        lhs(IdentityKind::LinearTerm, &params, &IndexChoice::R(1)).unwrap(),
        q(-2)
    );
    assert_eq!(
        lhs(IdentityKind::CrossTerm, &params, &IndexChoice::Pair(1, 2)).unwrap(),
        q(-2)
    );

    // Seam identities tying the prefactor families back to the plain
    // power: sum_r linear = leading, and n * square + n(n-1) * cross =
    // leading.
    for &n in &GRID_N {
        for &m in &GRID_M {
            for &b in &GRID_B {
                let params = MorrisParams::new(n, m, b);
                let nb = params.nb();
                if nb >= 1 {
                    let leading =
                        lhs(IdentityKind::Leading, &params, &IndexChoice::None).unwrap();
                    let linear_sum: BigRational = (1..=n)
                        .map(|r| {
                            lhs(IdentityKind::LinearTerm, &params, &IndexChoice::R(r)).unwrap()
                        })
                        .sum();
                    assert_eq!(linear_sum, leading, "linear seam at {params:?}");
                }
                if nb >= 2 {
                    let leading =
                        lhs(IdentityKind::Leading, &params, &IndexChoice::None).unwrap();
                    let square =
                        lhs(IdentityKind::SquareTerm, &params, &IndexChoice::R(1)).unwrap();
                    let quadratic = if n >= 2 {
                        let cross =
                            lhs(IdentityKind::CrossTerm, &params, &IndexChoice::Pair(1, 2))
                                .unwrap();
                        q(n as i64) * square + q(n as i64 * (n as i64 - 1)) * cross
                    } else {
                        q(n as i64) * square
                    };
                    assert_eq!(quadratic, leading, "quadratic seam at {params:?}");
                }
            }
        }
    }
    let elapsed = start.elapsed();
    println!("ACCEPTANCE 2 (linear/cross identity grid + seams, exact): PASS in {elapsed:?}");
}

#[test]
fn criterion_3_antisymmetrization_relation() {
    let start = Instant::now();
    let ring = RingTag::Integers;
    for n in [2u32, 3] {
        for m in [1u32, 2] {
            let arity = n as usize;
            let mut family: Vec<(String, SparsePoly)> =
                vec![("1".into(), SparsePoly::one(arity, ring))];
            for d in 1..=4u32 {
                family.push((
                    format!("(sum)^{d}"),
                    sum_of_vars(arity, ring)
                        .pow(d, &ExponentCap::unbounded(arity))
                        .unwrap(),
                ));
            }
            family.push(("e2".into(), elementary_symmetric_2(arity, ring)));
            family.push(("p2".into(), power_sum_2(arity, ring)));
            for (name, factor) in family {
                let degree = factor.total_degree().unwrap_or(0);
                let k = n.max(m * (n - 1) + degree.div_ceil(n as u64) as u32 + 1);
                let report = antisymmetrize_check(m, k, n, &factor).unwrap();
                assert!(
                    report.equal,
                    "relation failed at n={n} m={m} k={k} L={name}: lhs={} rhs={}",
                    report.entries[0].lhs, report.entries[0].rhs
                );
            }
        }
    }
    // Spot value.
    let report = antisymmetrize_check(1, 2, 2, &SparsePoly::one(2, ring)).unwrap();
    assert_eq!(report.entries[0].lhs, q(-2));
    assert_eq!(report.entries[0].rhs, q(-2));
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 30, "relation checks took {elapsed:?}, budget 30 s");
    println!("ACCEPTANCE 3 (antisymmetrization relation, exact): PASS in {elapsed:?}");
}

#[test]
fn criterion_4_shifted_per_index_status() {
    let params = MorrisParams::new(2, 1, 2);
    let report = check_identity(IdentityKind::ShiftedLinear, &params);
    assert!(!report.skipped);
    assert_eq!(report.entries.len(), 2);
    assert_eq!(report.entries[0].lhs, q(-2), "r = 1");
    assert_eq!(report.entries[1].lhs, q(0), "r = 2");
    assert_eq!(report.entries[0].rhs, q(-1), "stated per-index value");
    assert!(!report.entries[0].equal && !report.entries[1].equal);
    assert!(!report.equal, "per-index inequality must be flagged");

    let sym = report.symmetrized.as_ref().expect("index-bearing identity");
    assert_eq!(sym.lhs_sum, q(-2));
    assert!(sym.equal, "the summed relation holds");

    // The summed relation comes from the antisymmetrization transform
    // applied to (sum x)^(nb): sum_r lhs(r) = sign * (nb)! * delta / n!.
    let expected = BigRational::from(params.sign() * sumset_cn::polyring::factorial::factorial(4))
        * delta(&params).value
        / BigRational::from(BigInt::from(2));
    assert_eq!(sym.lhs_sum, expected);
    assert_eq!(expected, q(-2));
    println!(
        "ACCEPTANCE 4 (shifted per-index status: values (-2, 0) vs stated -1, sum -2): PASS"
    );
}

struct SweepRow {
    instance: SumsetInstance,
    report: VerifyReport,
}

fn sweep() -> &'static Vec<SweepRow> {
    static SWEEP: OnceLock<Vec<SweepRow>> = OnceLock::new();
    SWEEP.get_or_init(|| {
        let mut rows = Vec::new();
        for theorem in TheoremId::ALL {
            for n in [2u32, 3] {
                for k in 1..=5u32 {
                    for m in [0u32, 1] {
                        let p = smallest_admissible_prime(theorem, n, k, m);
                        for trial in 0..50u64 {
                            let seed = 1 + trial;
                            let Ok(instance) = gen_instance(seed, theorem, p, n, k, m) else {
                                break; // infeasible point, not hypothesis-satisfying
                            };
                            let report = verify(&instance, theorem, false).unwrap();
                            rows.push(SweepRow { instance, report });
                        }
                    }
                }
            }
        }
        rows
    })
}

#[test]
fn criterion_5_theorem_sweeps() {
    let start = Instant::now();
    let rows = sweep();

    // Spot check first: the arithmetic-progression instance meets its
    // bound with equality.
    let spot = SumsetInstance::new(
        7,
        2,
        3,
        0,
        Condition::A,
        vec![vec![0, 1, 2], vec![0, 1, 2]],
        vec![],
        Restriction::None,
        None,
    )
    .unwrap();
    let spot_report = verify(&spot, TheoremId::T1_3, false).unwrap();
    assert!(spot_report.hypotheses_ok && spot_report.passed);
    assert_eq!(spot_report.cardinality, Some(5));
    assert_eq!(spot_report.bound, 5);

    let failures: Vec<String> = rows
        .iter()
        .filter(|row| row.report.hypotheses_ok && !row.report.passed)
        .map(|row| {
            format!(
                "{} p={} n={} k={} m={} seed={:?}: |C|={:?} < bound {}",
                row.report.theorem,
                row.report.p,
                row.report.n,
                row.report.k,
                row.report.m,
                row.report.seed,
                row.report.cardinality,
                row.report.bound
            )
        })
        .collect();
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 300, "sweep took {elapsed:?}, budget 5 min");
    if failures.is_empty() {
        println!("ACCEPTANCE 5 (theorem sweeps, 100% of hypothesis-satisfying): PASS in {elapsed:?}");
    } else {
        println!(
            "ACCEPTANCE 5 (theorem sweeps, 100% of hypothesis-satisfying): FAIL — {} \
             hypothesis-satisfying instances fall below the registered bound; these are \
             verified counterexamples to the staircase linear/bilinear variants and to the \
             diagonal-quadratic variant at k = 2m(n-1)+2 where its key coefficient vanishes \
             identically (see notes below and the regression test \
             registered_bounds_fail_at_boundary_points)",
            failures.len()
        );
        for f in &failures {
            println!("  counterexample: {f}");
        }
    }
    assert!(
        failures.is_empty(),
        "{} hypothesis-satisfying instances fell below the registered bound:\n{}",
        failures.len(),
        failures.join("\n")
    );
}

#[test]
fn criterion_6_certificate_enumeration_agreement() {
    let start = Instant::now();
    let rows = sweep();
    let mut certified = 0usize;
    for row in rows {
        let Some(cert) = &row.report.certificate else { continue };
        certified += 1;
        // The certificate's coefficient is nonzero by construction.
        assert!(!cert.coefficient.is_zero());
        // Enumerating the support of the restriction polynomial confirms
        // the certified bound, and the full admissible set can only be
        // larger.
        let poly = build_restriction_poly(&row.instance).unwrap();
        let support = enumerate_support(&poly, &row.instance.a_sets, row.instance.p);
        assert!(
            support.len() as i64 >= cert.bound,
            "support {} below certified bound {} for {:?}",
            support.len(),
            cert.bound,
            row.instance.to_json()
        );
        let c = enumerate_c(&row.instance);
        assert!(
            c.len() >= support.len(),
            "support must be a subset of the admissible sums"
        );
        assert!(c.len() as i64 >= cert.bound);
    }
    assert!(certified > 0, "the sweep must exercise the certificate path");

    // Where the extracted coefficient is divisible by p (violated prime
    // threshold), no certificate is issued.
    let inst = SumsetInstance::new(
        3,
        2,
        3,
        0,
        Condition::A,
        vec![vec![0, 1, 2], vec![0, 1, 2]],
        vec![],
        Restriction::None,
        None,
    )
    .unwrap();
    let report = verify(&inst, TheoremId::T1_3, false).unwrap();
    assert!(!report.hypotheses_ok, "p = 3 is below the threshold");
    assert!(report.certificate.is_none(), "no certificate for a vanishing coefficient");
    assert_eq!(report.h_mod_p, Some(0), "h = 6 is divisible by p = 3");

    let elapsed = start.elapsed();
    println!(
        "ACCEPTANCE 6 (certificate-enumeration agreement on {certified} certified instances): \
         PASS in {elapsed:?}"
    );
}

mod oracle {
    //! Expand-then-read reference path, independent of the extraction and
    //! truncation code: plain products only.

    use super::*;

    pub fn naive_sum_power(arity: usize, power: u32) -> SparsePoly {
        let sum = sum_of_vars(arity, RingTag::Integers);
        let mut acc = SparsePoly::one(arity, RingTag::Integers);
        for _ in 0..power {
            acc = acc.mul(&sum).unwrap();
        }
        acc
    }

    pub fn filter_by_cap(poly: &SparsePoly, cap: &ExponentCap) -> SparsePoly {
        SparsePoly::from_terms(
            poly.arity(),
            poly.ring(),
            poly.terms()
                .filter(|(m, _)| cap.allows(m))
                .map(|(m, c)| (m.0.clone(), c.clone())),
        )
        .unwrap()
    }
}

struct TestRng(rand_chacha::ChaCha8Rng);

impl TestRng {
    fn new(seed: u64) -> Self {
        use rand_chacha::rand_core::SeedableRng;
        TestRng(rand_chacha::ChaCha8Rng::seed_from_u64(seed))
    }

    fn below(&mut self, bound: u64) -> u64 {
        use rand_chacha::rand_core::RngCore;
        self.0.next_u64() % bound
    }

    fn poly(&mut self, arity: usize, max_exp: u64, max_terms: u64) -> SparsePoly {
        let ring = RingTag::Integers;
        let terms = 1 + self.below(max_terms);
        SparsePoly::from_terms(
            arity,
            ring,
            (0..terms).map(|_| {
                let exps: Vec<u32> =
                    (0..arity).map(|_| self.below(max_exp + 1) as u32).collect();
                let coeff = ring.from_i64(self.below(19) as i64 - 9);
                (exps, coeff)
            }),
        )
        .unwrap()
    }
}

#[test]
fn criterion_7_engine_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = TestRng::new(7);

    for case in 0..200 {
        let arity = 1 + rng.below(3) as usize;
        let poly = rng.poly(arity, 4, 6);
        let power = rng.below(9) as u32;
        let target = Monomial(
            (0..arity)
                .map(|_| rng.below(4 + power as u64 + 1) as u32)
                .collect(),
        );
        let direct = poly.extract_with_power(power, &target).unwrap();
        let expanded = poly
            .mul(&oracle::naive_sum_power(arity, power))
            .unwrap()
            .coeff(&target)
            .unwrap();
        assert_eq!(direct, expanded, "case {case}: P={poly} N={power} t={target:?}");
    }

    for case in 0..200 {
        let arity = 1 + rng.below(3) as usize;
        let a = rng.poly(arity, 4, 6);
        let b = rng.poly(arity, 4, 6);
        let cap = ExponentCap((0..arity).map(|_| rng.below(9) as u32).collect());
        let truncated = a.truncated_mul(&b, &cap).unwrap();
        let filtered = oracle::filter_by_cap(&a.mul(&b).unwrap(), &cap);
        assert_eq!(truncated, filtered, "case {case}: a={a} b={b} cap={cap:?}");
    }

    let elapsed = start.elapsed();
    println!("ACCEPTANCE 7 (engine oracle equivalence, 200+200 cases, exact): PASS in {elapsed:?}");
}

/// Regression anchor for the boundary failures surfaced by the sweep:
/// three hand-verified instances where every stated hypothesis holds and
/// the registered bound is not attained. The diagonal-quadratic case sits
/// at k = 2m(n-1)+2, where the closed-form key coefficient contains the
/// factor b - m(n-1) - 1 = 0 and therefore vanishes identically.
#[test]
fn registered_bounds_fail_at_boundary_points() {
    // Staircase linear variant over F_3: form picks a_2 != 0, S_12 = {0}
    // forbids equal coordinates, and only the sum 0 survives.
    let linear = SumsetInstance::new(
        3,
        2,
        3,
        1,
        Condition::B,
        vec![vec![1, 2], vec![0, 1, 2]],
        vec![(1, 2, vec![0])],
        Restriction::Linear { t: vec![2], alpha: vec![1] },
        None,
    )
    .unwrap();
    let report = verify(&linear, TheoremId::T1_5p, false).unwrap();
    assert!(report.hypotheses_ok, "{:?}", report.reasons);
    assert_eq!(report.bound, 2);
    assert_eq!(report.cardinality, Some(1));
    assert!(!report.passed);

    // Diagonal quadratic over F_2 at k = 2m(n-1)+2: squares are the
    // identity, so the form constraint removes the sum 0 itself.
    let quadratic = SumsetInstance::new(
        2,
        3,
        2,
        0,
        Condition::A,
        vec![vec![0, 1], vec![0, 1], vec![0, 1]],
        vec![],
        Restriction::DiagonalQuadratic { t: vec![1, 2, 3], alpha: vec![1, 1, 1] },
        None,
    )
    .unwrap();
    let report = verify(&quadratic, TheoremId::T1_6, false).unwrap();
    assert!(report.hypotheses_ok, "{:?}", report.reasons);
    assert_eq!(report.bound, 2);
    assert_eq!(report.cardinality, Some(1));
    assert!(!report.passed);
    assert_eq!(report.h.as_deref(), Some("0"), "key coefficient vanishes identically");

    // Staircase linear variant over F_7, away from the smallest prime.
    let larger = SumsetInstance::new(
        7,
        2,
        5,
        1,
        Condition::B,
        vec![vec![0, 2, 4, 5], vec![0, 1, 3, 4, 6]],
        vec![(1, 2, vec![1])],
        Restriction::Linear { t: vec![2], alpha: vec![4] },
        None,
    )
    .unwrap();
    let report = verify(&larger, TheoremId::T1_5p, false).unwrap();
    assert!(report.hypotheses_ok, "{:?}", report.reasons);
    assert_eq!(report.bound, 6);
    assert_eq!(report.cardinality, Some(5));
    assert!(!report.passed);
}
