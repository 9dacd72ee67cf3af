//! End-to-end acceptance suite: nine numbered criteria, each printing one
//! pass/fail line.  Every numerical target is checked against values
//! produced by an independent route (series vs. special functions, descent
//! criteria vs. local search, quaternionic sums vs. Dirichlet series).

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;

use twist49::arith::{classify_prime, is_prime, kronecker};
use twist49::classgroup::h8_for_7p;
use twist49::descent::{selmer2_report, selmer_by_oracle, selmer_phi, selmer_phihat, Dim2, SelmerKind};
use twist49::heegner::{heegner_trace, is_torsion_numeric, Parametrization, RingCharacter};
use twist49::lseries::{ap, Evaluator};
use twist49::periods::{gamma_product_omega, lattice_invariants, e1star_addition_check};
use twist49::quartic_is_one;
use twist49::tamagawa::bsd_predicted_ord2;
use twist49::waldspurger::{verify_waldspurger, y_d, GrossSetup};
use twist49::factor_twist;

fn evaluator() -> &'static Evaluator {
    static EV: OnceLock<Evaluator> = OnceLock::new();
    EV.get_or_init(Evaluator::new)
}

fn criterion(n: u32, desc: &str, limit_s: f64, body: impl FnOnce() + std::panic::UnwindSafe) {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(body));
    let elapsed = start.elapsed().as_secs_f64();
    let verdict = if outcome.is_ok() && elapsed < limit_s {
        "PASS"
    } else {
        "FAIL"
    };
    println!("criterion {n}: {verdict} ({elapsed:.2} s) {desc}");
    if let Err(payload) = outcome {
        std::panic::resume_unwind(payload);
    }
    assert!(
        elapsed < limit_s,
        "criterion {n} exceeded its runtime budget: {elapsed:.2} s >= {limit_s} s"
    );
}

/// The sample q primes of the rank-zero sweeps.
const SAMPLE_Q: [i64; 6] = [5, 13, 17, 41, 61, 97];

/// Products of up to three distinct sample primes, bounded by 5000.
fn sample_products() -> Vec<(i64, i32)> {
    let mut out = Vec::new();
    for (i, &q1) in SAMPLE_Q.iter().enumerate() {
        out.push((q1, 1));
        for (j, &q2) in SAMPLE_Q.iter().enumerate().skip(i + 1) {
            if q1 * q2 <= 5000 {
                out.push((q1 * q2, 2));
            }
            for &q3 in SAMPLE_Q.iter().skip(j + 1) {
                if q1 * q2 * q3 <= 5000 {
                    out.push((q1 * q2 * q3, 3));
                }
            }
        }
    }
    out
}

#[test]
fn criterion_1_base_value_and_period() {
    criterion(1, "L(A,1)/Omega = 1/2 and AGM period = Gamma product", 1.0, || {
        let record = evaluator().l_central(1).expect("base L-value");
        let lalg = record.lalg.expect("snapped rational");
        assert_eq!((lalg.num, lalg.den), (1, 2));
        let residual = (record.l_numeric / record.omega - 0.5).abs();
        assert!(residual < 1e-9, "residual {residual:.3e}");
        let lat = lattice_invariants(1).expect("base lattice");
        let gap = (lat.omega1 - gamma_product_omega()).abs();
        assert!(gap < 1e-12, "period mismatch {gap:.3e}");
    });
}

#[test]
fn criterion_2_theorem_ii_sweep() {
    criterion(2, "ord2 Lalg(A^(R)) = r - 1 for all sample products R <= 5000", 120.0, || {
        for (r_label, r) in sample_products() {
            let (_, ord2) = evaluator().lalg_ord2(r_label).expect("central value resolves");
            assert_eq!(
                ord2,
                Some(r - 1),
                "R = {r_label} (r = {r}) has ord2 {ord2:?}"
            );
        }
    });
}

#[test]
fn criterion_3_s0_four_way_equivalence() {
    criterion(3, "quartic symbol = h8 = Selmer dimension = L-value valuation", 300.0, || {
        for p in (5..3000i64).filter(|&p| is_prime(p as u64)) {
            if p % 4 != 1 || kronecker(p, 7) != 1 {
                continue;
            }
            let quartic = quartic_is_one(-7, p as u64).expect("p is prime");
            let cert = h8_for_7p(p as u64).expect("both 8-rank routes agree");
            let report = selmer2_report(&factor_twist(p).expect("prime label"));
            let dim = match report.dim2 {
                Dim2::Exact(k) => k,
                other => panic!("parity does not pin dim at p = {p}: {other:?}"),
            };
            let (lalg, ord2) = evaluator().lalg_ord2(p).expect("central value resolves");
            let ge3 = lalg.is_zero() || ord2 >= Some(3);
            assert_eq!(quartic, cert.value == 1, "h8 splits from quartic at {p}");
            assert_eq!(quartic, dim == 2, "Selmer dim {dim} at {p}");
            assert_eq!(quartic, ge3, "ord2 {ord2:?} at {p}");
            assert!(quartic || ord2 == Some(1), "ord2 {ord2:?} at {p}");
            assert_ne!(ord2, Some(2), "forbidden valuation 2 at {p}");
        }
    });
}

#[test]
fn criterion_4_descent_oracle_equivalence() {
    criterion(4, "divisor criteria = local solubility for |M| <= 300, all classes", 600.0, || {
        for m in -300..=300i64 {
            let ft = match factor_twist(m) {
                Ok(ft) => ft,
                Err(_) => continue,
            };
            for kind in [SelmerKind::Phi, SelmerKind::Phihat] {
                let criteria = match kind {
                    SelmerKind::Phi => selmer_phi(&ft),
                    SelmerKind::Phihat => selmer_phihat(&ft),
                };
                let oracle = selmer_by_oracle(kind, &ft).expect("oracle resolves");
                assert_eq!(
                    criteria.members, oracle.members,
                    "{kind:?} discrepancy at M = {m}"
                );
            }
        }
    });
}

#[test]
fn criterion_5_theorem_bw_lower_bounds() {
    criterion(5, "ord2 >= 4 on (q,p) instances and >= 3 on single p instances", 180.0, || {
        let mut pairs = Vec::new();
        let mut p4 = Vec::new();
        for p in (5..5000i64).filter(|&p| is_prime(p as u64)) {
            let cls = classify_prime(p as u64).expect("prime");
            if cls.eligible_p4 {
                p4.push(p);
            }
        }
        for &p in &p4 {
            for q in (5..=5000 / p).filter(|&q| is_prime(q as u64)) {
                let cls = classify_prime(q as u64).expect("prime");
                if cls.eligible_q && kronecker(q, p) == 1 {
                    pairs.push((q, p));
                }
            }
        }
        assert!(pairs.len() >= 3, "only {} pair instances", pairs.len());
        assert!(pairs.contains(&(13, 53)), "pairs {pairs:?}");
        for &(q, p) in &pairs {
            let record = evaluator().l_central(q * p).expect("central value resolves");
            assert!(
                record.ord2_at_least(4),
                "(q,p) = ({q},{p}): ord2 {:?}",
                record.ord2
            );
        }
        for &p in &p4 {
            let record = evaluator().l_central(p).expect("central value resolves");
            assert!(record.ord2_at_least(3), "p = {p}: ord2 {:?}", record.ord2);
        }
    });
}

#[test]
fn criterion_6_waldspurger_end_to_end() {
    criterion(6, "quaternionic |y_d|^2 matches the Dirichlet-series product", 120.0, || {
        for n in [5i64, 13, 17, 29, 53, 65] {
            let setup = GrossSetup::new(n).expect("oriented setup");
            let mut divisors: Vec<i64> = (1..=n).filter(|d| n % d == 0).collect();
            divisors.sort_unstable();
            for &d in &divisors {
                let report = verify_waldspurger(&setup, d, evaluator()).expect("identity resolves");
                let rel = (report.lhs - report.rhs).abs() / report.lhs.max(1.0);
                assert!(
                    report.pass && rel < 1e-6,
                    "n = {n}, d = {d}: {} vs {}",
                    report.lhs,
                    report.rhs
                );
            }
            if n == 5 {
                assert_eq!(y_d(&setup, 1).expect("y_1"), 0, "y_1 at n = 5");
            }
            if n == 53 || n == 65 {
                for &d in &divisors {
                    assert_eq!(
                        y_d(&setup, d).expect("y_d"),
                        y_d(&setup, n / d).expect("y_(n/d)"),
                        "symmetry at n = {n}, d = {d}"
                    );
                }
            }
        }
    });
}

#[test]
fn criterion_7_heegner_instances() {
    criterion(7, "Heegner traces, Kolyvagin vanishing and derivative nonvanishing", 300.0, || {
        let param = Parametrization::new().expect("parametrization");
        let base = heegner_trace(&param, 19, 1, 1, RingCharacter::Trivial).expect("base trace");
        assert!(!base.torsion_flag, "base point is torsion");
        let shifted = base.z.conj() + base.z - param.torsion_t();
        assert!(
            is_torsion_numeric(shifted, &param.lat) && param.lat.reduce(shifted).0.norm() < 1e-7,
            "conj(y) + y != T"
        );
        let twisted = heegner_trace(&param, 19, 13, 1, RingCharacter::ChiR).expect("chi_R trace");
        assert!(!twisted.torsion_flag && twisted.minus_eigen_flag);
        assert_eq!(twisted.orbit_size, 14);
        // a_13 = 0, so the full conductor-13 trace collapses to torsion.
        assert_eq!(ap(13), 0);
        let full = heegner_trace(&param, 19, 13, 1, RingCharacter::Trivial).expect("full trace");
        assert!(full.torsion_flag, "Kolyvagin trace did not vanish");
        for m in [-19i64, -247] {
            let record = evaluator().l_derivative(m).expect("derivative resolves");
            let lp = record.l_prime_numeric.expect("derivative value");
            assert!(
                lp.abs() > 1e3 * record.error_bound,
                "L'({m}) = {lp} under 1000x bound {:.3e}",
                record.error_bound
            );
        }
    });
}

#[test]
fn criterion_8_function_theoretic_identities() {
    criterion(8, "Legendre relation, E1* periodicity/oddness, E1* addition samples", 30.0, || {
        let lat = lattice_invariants(1).expect("base lattice");
        let w1 = Complex64::new(lat.omega1, 0.0);
        let legendre = lat.eta1 * lat.omega2 - lat.eta2 * w1;
        let target = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
        assert!(
            (legendre - target).norm().min((legendre + target).norm()) < 1e-10,
            "Legendre defect {legendre}"
        );
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x3149);
        let sample = |rng: &mut rand_chacha::ChaCha8Rng| loop {
            let a: f64 = rng.gen_range(-1.5..1.5);
            let b: f64 = rng.gen_range(-1.5..1.5);
            let z = a * lat.omega1 + b * lat.omega2;
            if !lat.is_lattice_point(z, 1e-2 * lat.omega1)
                && !lat.is_lattice_point(2.0 * z, 1e-2 * lat.omega1)
            {
                return z;
            }
        };
        for _ in 0..500 {
            let z = sample(&mut rng);
            let e = lat.e1star(z).expect("e1star");
            for w in [w1, lat.omega2] {
                let shift = lat.e1star(z + w).expect("e1star");
                assert!((shift - e).norm() < 1e-10, "periodicity defect at {z}");
            }
            let odd = lat.e1star(-z).expect("e1star");
            assert!((odd + e).norm() < 1e-10, "oddness defect at {z}");
        }
        let mut checked = 0;
        while checked < 500 {
            let z1 = sample(&mut rng);
            let z2 = sample(&mut rng);
            match e1star_addition_check(z1, z2, &lat) {
                Ok(residual) => {
                    assert!(residual < 1e-10, "E1* addition residual {residual:.3e}");
                    checked += 1;
                }
                Err(_) => continue, // degenerate draw, resample
            }
        }
    });
}

#[test]
fn criterion_9_bsd_consistency() {
    criterion(9, "measured ord2 matches the Tamagawa prediction; M = 53 excess is 2", 120.0, || {
        for (r_label, _) in sample_products() {
            let ft = factor_twist(r_label).expect("sample product");
            let predicted = bsd_predicted_ord2(&ft, 0).expect("rank-0 regime");
            let (_, ord2) = evaluator().lalg_ord2(r_label).expect("central value resolves");
            assert_eq!(
                ord2,
                Some(predicted as i32),
                "R = {r_label}: prediction {predicted}"
            );
        }
        // At M = 53 the central value vanishes, so the measured valuation is
        // +infinity and respects the proven lower bound 3; that bound sits
        // exactly 2 above the Sha-trivial prediction, an even gap.
        let ft = factor_twist(53).expect("53");
        let predicted = bsd_predicted_ord2(&ft, 0).expect("rank-0 regime");
        assert_eq!(predicted, 1);
        let record = evaluator().l_central(53).expect("central value resolves");
        assert!(record.lalg.expect("snap").is_zero(), "L(A^(53),1) != 0");
        assert!(record.ord2_at_least(3));
        let excess = 3 - predicted;
        assert_eq!(excess, 2);
        assert_eq!(excess % 2, 0);
    });
}
