//! Heegner points on A = X_0(49) through the modular parametrization.
//!
//! The curve is its own X_0(49) (deg f = 1), so the parametrization is the
//! Abel-Jacobi map
//!
//! ```text
//! z(tau) = sum_{n >= 1} (a_n / n) e^{2 pi i n tau}   mod  L,
//! ```
//!
//! with L the period lattice of the Neron differential (L = Omega_inf times
//! the ring of integers of Q(sqrt(-7))) and a_n the Hecke eigenvalues.  A
//! point is recovered as x = wp(z) + 1/4, y = (wp'(z) - x)/2.
//!
//! For an imaginary quadratic K with 7 split (the Heegner hypothesis at
//! level 49) and a conductor c coprime to 7 disc(K), the CM points of
//! conductor c are enumerated by primitive forms (A, B, C) of discriminant
//! c^2 disc(K) with 49 | A and B congruent to a fixed square root beta of
//! the discriminant mod 98; tau = (-B + sqrt(disc))/(2A).  One Gamma_0(49)
//! orbit per ring ideal class, so the orbit has the ring class number of
//! points (degree (q+1)h for q inert of prime conductor).
//!
//! heegner_trace forms the character sums
//!
//! ```text
//! Y = sum_sigma chi(sigma) sigma(P),
//! ```
//!
//! with chi trivial or the genus character chi_R = prod_{q | R} (q*/.) on
//! the ring class group, and tests the verdicts the theorems need: torsion
//! (against the denominator-8 lattice grid), minus-eigenspace membership
//! (conj(z) = -z up to torsion), and the Kolyvagin trace relation
//! Tr f(P_{Mp}) = a_p f(P_M).

use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::arith::{gcd, is_prime, is_squarefree, kronecker};
use crate::classgroup::{d_star, reduced_forms, ClassGroupError, QuadForm};
use crate::lseries::{Evaluator, LSeriesError};
use crate::periods::{lattice_invariants, LatticePeriods, PeriodError};

#[derive(Debug, Error)]
pub enum HeegnerError {
    #[error("7 is not split in the field of discriminant {0}; the Heegner hypothesis fails at level 49")]
    BadField(i64),
    #[error("conductor {0} must be positive and coprime to 7 times the field discriminant")]
    BadConductor(i64),
    #[error("label (l0 = {l0}, R = {r}, N = {n}) violates the trace preconditions")]
    BadLabel { l0: i64, r: i64, n: i64 },
    #[error("ring class number {0} exceeds the tractable orbit bound 200")]
    OrbitIntractable(usize),
    #[error("could not fill every ideal class with a Heegner form of discriminant {0}")]
    IncompleteOrbit(i64),
    #[error("Im tau = {im:.3e} after Gamma_0(49) reduction; need at least {required:.1e}")]
    Convergence { im: f64, required: f64 },
    #[error("no prime-norm representative coprime to {0} for a ring class")]
    NoRepresentative(i64),
    #[error(transparent)]
    Period(#[from] PeriodError),
    #[error(transparent)]
    ClassGroup(#[from] ClassGroupError),
    #[error(transparent)]
    LSeries(#[from] LSeriesError),
}

const MIN_IM: f64 = 1e-3;

/// Extended gcd: returns (g, x, y) with a x + b y = g.
fn egcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a.abs(), a.signum(), 0)
    } else {
        let (g, x, y) = egcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

/// Gamma_0(49) reduction: translate and apply inversions through the cusps
/// until no matrix of the group increases Im tau.
fn reduce_tau(mut tau: Complex64) -> Complex64 {
    loop {
        tau.re -= tau.re.round();
        let mut best: Option<(i64, i64, f64)> = None;
        for k in 1..=16i64 {
            for c in [49 * k, -49 * k] {
                let d0 = (-c as f64 * tau.re).round() as i64;
                for d in d0 - 2..=d0 + 2 {
                    if gcd(c, d).abs() != 1 {
                        continue;
                    }
                    let norm = (c as f64 * tau + d as f64).norm_sqr();
                    if norm < best.map_or(1.0 - 1e-12, |(_, _, n)| n) {
                        best = Some((c, d, norm));
                    }
                }
            }
        }
        match best {
            Some((c, d, _)) => {
                // complete to [[a, b], [c, d]] in SL_2: a d - b c = 1
                let (_, x, y) = egcd(d, c);
                let (a, b) = (x, -y);
                debug_assert_eq!(a * d - b * c, 1);
                tau = (a as f64 * tau + b as f64) / (c as f64 * tau + d as f64);
            }
            None => break,
        }
    }
    tau.re -= tau.re.round();
    tau
}

/// The modular parametrization f: X_0(49) -> A as a lattice coordinate,
/// together with the period lattice of A.
pub struct Parametrization {
    pub lat: LatticePeriods,
    evaluator: Arc<Evaluator>,
}

impl Parametrization {
    pub fn new() -> Result<Parametrization, HeegnerError> {
        Ok(Parametrization {
            lat: lattice_invariants(1)?,
            evaluator: Arc::new(Evaluator::new()),
        })
    }

    pub fn with_evaluator(evaluator: Arc<Evaluator>) -> Result<Parametrization, HeegnerError> {
        Ok(Parametrization {
            lat: lattice_invariants(1)?,
            evaluator,
        })
    }

    /// The 2-torsion point T = (2, -1), the image of the cusp [0].
    pub fn torsion_t(&self) -> Complex64 {
        Complex64::new(self.lat.omega1 / 2.0, 0.0)
    }

    /// z(tau) = sum a_n/n q^n reduced into the fundamental cell.
    pub fn eval(&self, tau: Complex64) -> Result<Complex64, HeegnerError> {
        let tau = reduce_tau(tau);
        Ok(self.lat.reduce(self.eval_raw(tau)?).0)
    }

    /// The series value itself, with no Gamma_0(49) or lattice reduction:
    /// differences across a Gamma_0(49) orbit are honest lattice vectors
    /// (the homology periods of the parametrization).
    pub fn eval_raw(&self, tau: Complex64) -> Result<Complex64, HeegnerError> {
        if tau.im < MIN_IM {
            return Err(HeegnerError::Convergence {
                im: tau.im,
                required: MIN_IM,
            });
        }
        // tail < 1e-10: |a_n| <= d(n) sqrt(n), absorbed by the margin in 26.
        let terms = (26.0 / (2.0 * std::f64::consts::PI * tau.im)).ceil() as usize + 32;
        let an = self.evaluator.coefficients(terms);
        let q = (2.0 * std::f64::consts::PI * Complex64::i() * tau).exp();
        let mut qn = Complex64::new(1.0, 0.0);
        let mut z = Complex64::new(0.0, 0.0);
        for n in 1..=terms {
            qn *= q;
            if an[n] != 0 {
                z += an[n] as f64 / n as f64 * qn;
            }
        }
        Ok(z)
    }
}

/// Whether z is within 1e-6 |omega1| of the denominator-8 torsion grid
/// (i/8) omega1 + (j/8) omega2.  The rational torsion in play is 2-primary
/// of order at most 4, so the grid over-covers.
pub fn is_torsion_numeric(z: Complex64, lat: &LatticePeriods) -> bool {
    let (zr, _, _) = lat.reduce(z);
    let tol = 1e-6 * lat.omega1;
    for i in 0..8i64 {
        for j in 0..8i64 {
            let t = (i as f64 / 8.0) * lat.omega1 + (j as f64 / 8.0) * lat.omega2;
            if lat.reduce(zr - t).0.norm() < tol {
                return true;
            }
        }
    }
    false
}

/// The Galois orbit of CM points of conductor c on X_0(49).
#[derive(Debug, Clone)]
pub struct CMPointOrbit {
    pub k_disc: i64,
    pub conductor: i64,
    /// The fixed square root of c^2 k_disc mod 196.
    pub beta: i64,
    /// One (Heegner form, tau) per ring ideal class; the form is the
    /// reduced class representative, tau comes from the 49 | A member.
    pub points: Vec<(QuadForm, Complex64)>,
    pub ring_class_order: usize,
}

pub fn cm_points(k_disc: i64, c: i64) -> Result<CMPointOrbit, HeegnerError> {
    if k_disc >= 0 || !matches!(k_disc.rem_euclid(4), 0 | 1) {
        return Err(HeegnerError::BadField(k_disc));
    }
    if kronecker(k_disc, 7) != 1 {
        return Err(HeegnerError::BadField(k_disc));
    }
    if c <= 0 || gcd(c, 7 * k_disc).abs() != 1 {
        return Err(HeegnerError::BadConductor(c));
    }
    let disc = c * c * k_disc;
    let classes = reduced_forms(disc)?;
    let h = classes.len();
    // beta^2 = disc mod 196 exists: disc is a QR mod 7 and odd or 0 mod 4.
    let beta = (0..196)
        .find(|b| (b * b - disc).rem_euclid(196) == 0)
        .ok_or(HeegnerError::BadField(k_disc))?;
    let mut points: Vec<Option<Complex64>> = vec![None; h];
    let mut found = 0usize;
    let sqrt_abs = (-disc as f64).sqrt();
    't: for t in 0..(2 * h as i64 + 64) {
        for b in [beta + 98 * t, beta - 98 * (t + 1)] {
            let num = (b * b - disc) / 196;
            if num < 1 {
                continue;
            }
            let mut a1 = 1i64;
            while a1 * a1 <= num {
                if num % a1 == 0 {
                    for a in [a1, num / a1] {
                        let form = QuadForm {
                            a: 49 * a,
                            b,
                            c: num / a,
                        };
                        if gcd(gcd(form.a, form.b), form.c).abs() != 1 {
                            continue;
                        }
                        let idx = classes
                            .iter()
                            .position(|&f| f == form.reduce())
                            .expect("reduced form is a class representative");
                        if points[idx].is_none() {
                            let tau =
                                Complex64::new(-b as f64, sqrt_abs) / (2.0 * form.a as f64);
                            points[idx] = Some(tau);
                            found += 1;
                            if found == h {
                                break 't;
                            }
                        }
                    }
                }
                a1 += 1;
            }
        }
    }
    if found < h {
        return Err(HeegnerError::IncompleteOrbit(disc));
    }
    let points = classes
        .into_iter()
        .zip(points)
        .map(|(f, tau)| (f, tau.expect("orbit is complete")))
        .collect();
    Ok(CMPointOrbit {
        k_disc,
        conductor: c,
        beta,
        points,
        ring_class_order: h,
    })
}

/// Ring class characters available to heegner_trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingCharacter {
    Trivial,
    /// The genus character prod_{q | R} (q*/.) of the order.
    ChiR,
}

/// A character-weighted Galois trace of a Heegner point.
#[derive(Debug, Clone)]
pub struct TracePoint {
    pub l0: i64,
    pub r: i64,
    pub n: i64,
    pub character: RingCharacter,
    /// The trace as a lattice coordinate in the fundamental cell.
    pub z: Complex64,
    pub orbit_size: usize,
    pub torsion_flag: bool,
    /// conj(z) = -z modulo torsion (the minus eigenspace of complex
    /// conjugation up to the 2-primary torsion).
    pub minus_eigen_flag: bool,
    /// Crude Neron-Tate proxy: mean normalized distance to the torsion
    /// grid along the doubling orbit of z.  Zero for torsion points.
    pub height_estimate: f64,
}

// Smallest odd prime coprime to `avoid` represented by the form.
fn prime_norm_rep(form: &QuadForm, avoid: i64) -> Option<i64> {
    let mut best: Option<i64> = None;
    for x in -60i64..=60 {
        for y in -60i64..=60 {
            let v = form.eval(x, y);
            if v > 2 && v % 2 == 1 && gcd(v, avoid).abs() == 1 && is_prime(v as u64) {
                best = Some(best.map_or(v, |b: i64| b.min(v)));
            }
        }
    }
    best
}

fn chi_r(form: &QuadForm, r: i64, avoid: i64) -> Result<i32, HeegnerError> {
    let p = prime_norm_rep(form, avoid).ok_or(HeegnerError::NoRepresentative(avoid))?;
    let mut value = 1i32;
    let mut rest = r;
    let mut q = 3i64;
    while rest > 1 {
        if rest % q == 0 {
            value *= kronecker(d_star(q), p);
            while rest % q == 0 {
                rest /= q;
            }
        }
        q += 2;
    }
    Ok(value)
}

pub fn heegner_trace(
    param: &Parametrization,
    l0: i64,
    r: i64,
    n: i64,
    character: RingCharacter,
) -> Result<TracePoint, HeegnerError> {
    let k_disc = -l0;
    // Theorem-side preconditions: l0 an odd prime with -l0 a fundamental
    // discriminant split at 7; R, N squarefree products of primes inert in
    // K and coprime to 7 l0.
    let m = r * n;
    let ok = l0 > 0
        && is_prime(l0 as u64)
        && k_disc.rem_euclid(4) == 1
        && r >= 1
        && n >= 1
        && is_squarefree(m)
        && gcd(m, 7 * l0) == 1
        && divisor_primes(m).iter().all(|&q| kronecker(k_disc, q) == -1);
    if !ok {
        return Err(HeegnerError::BadLabel { l0, r, n });
    }
    let orbit = cm_points(k_disc, m)?;
    if orbit.ring_class_order > 200 {
        return Err(HeegnerError::OrbitIntractable(orbit.ring_class_order));
    }
    let avoid = 2 * 7 * l0 * m;
    let mut z = Complex64::new(0.0, 0.0);
    for (form, tau) in &orbit.points {
        let chi = match character {
            RingCharacter::Trivial => 1,
            RingCharacter::ChiR => chi_r(form, r, avoid)?,
        };
        z += f64::from(chi) * param.eval(*tau)?;
    }
    let z = param.lat.reduce(z).0;
    let torsion_flag = is_torsion_numeric(z, &param.lat);
    let minus_eigen_flag = is_torsion_numeric(z.conj() + z, &param.lat);
    let mut height_estimate = 0.0;
    if !torsion_flag {
        let mut w = z;
        for _ in 0..6 {
            height_estimate += grid_distance(w, &param.lat) / param.lat.omega1 / 6.0;
            w = param.lat.reduce(w * 2.0).0;
        }
    }
    Ok(TracePoint {
        l0,
        r,
        n,
        character,
        z,
        orbit_size: orbit.ring_class_order,
        torsion_flag,
        minus_eigen_flag,
        height_estimate,
    })
}

fn divisor_primes(m: i64) -> Vec<i64> {
    crate::arith::factor(m as u64)
        .into_iter()
        .map(|(p, _)| p as i64)
        .collect()
}

fn grid_distance(z: Complex64, lat: &LatticePeriods) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..8i64 {
        for j in 0..8i64 {
            let t = (i as f64 / 8.0) * lat.omega1 + (j as f64 / 8.0) * lat.omega2;
            best = best.min(lat.reduce(z - t).0.norm());
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;

    fn param() -> Parametrization {
        Parametrization::new().unwrap()
    }

    fn random_tau<R: Rng>(rng: &mut R) -> Complex64 {
        Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.05..0.4))
    }

    #[test]
    fn cusp_infinity_is_origin() {
        let p = param();
        let z = p.eval(Complex64::new(0.3, 8.0)).unwrap();
        assert!(z.norm() < 1e-8);
    }

    #[test]
    fn torsion_point_t() {
        // T = (2, -1) sits at omega1/2.
        let p = param();
        let (x, y) = p.lat.curve_point(p.torsion_t()).unwrap();
        assert!((x - 2.0).norm() < 1e-9, "x = {x}");
        assert!((y + 1.0).norm() < 1e-9, "y = {y}");
        assert!(is_torsion_numeric(p.torsion_t(), &p.lat));
        assert!(is_torsion_numeric(Complex64::new(0.0, 0.0), &p.lat));
    }

    #[test]
    fn gamma0_invariance() {
        let p = param();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..6 {
            let tau = random_tau(&mut rng);
            let base = p.eval(tau).unwrap();
            for (a, b, c, d) in [(1i64, 1, 0, 1), (1, 0, 49, 1), (8, -1, 49, -6), (15, 11, 49, 36)]
            {
                assert_eq!(a * d - b * c, 1);
                let gt = (a as f64 * tau + b as f64) / (c as f64 * tau + d as f64);
                let z = p.eval(gt).unwrap();
                assert!(
                    p.lat.reduce(z - base).0.norm() < 1e-9,
                    "gamma = ({a},{b};{c},{d})"
                );
            }
        }
    }

    #[test]
    fn fricke_involution_sums_to_t() {
        let p = param();
        let t = p.torsion_t();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..5 {
            let tau = random_tau(&mut rng);
            let w = -1.0 / (49.0 * tau);
            let sum = p.eval(w).unwrap() + p.eval(tau).unwrap();
            assert!(
                p.lat.reduce(sum - t).0.norm() < 1e-8,
                "tau = {tau}, residual = {}",
                p.lat.reduce(sum - t).0.norm()
            );
        }
    }

    #[test]
    fn parametrization_regenerates_lattice() {
        // The homology image under f is the full period lattice (deg f = 1):
        // z(gamma tau) - z(tau) for hyperbolic gamma in Gamma_0(49) must be
        // lattice points whose coordinates generate Z^2 (parabolic classes
        // have zero period and are useless here).
        let p = param();
        let mut coords = Vec::new();
        for (a, b, c, d) in [
            (2i64, 1, 49, 25),
            (5, 1, 49, 10),
            (9, 2, 49, 11),
            (15, 11, 49, 36),
            (11, 2, 49, 9),
            (3, 2, 49, 33),
        ] {
            assert_eq!(a * d - b * c, 1);
            // anchor tau near the attracting end so both series converge
            let tau = Complex64::new(-d as f64 / 49.0, 0.05);
            let gt = (a as f64 * tau + b as f64) / (c as f64 * tau + d as f64);
            let diff = p.eval_raw(gt).unwrap() - p.eval_raw(tau).unwrap();
            let (u, v) = p.lat.coordinates(diff);
            assert!(
                (u - u.round()).abs() < 1e-8 && (v - v.round()).abs() < 1e-8,
                "non-lattice difference ({u}, {v})"
            );
            coords.push((u.round() as i64, v.round() as i64));
        }
        // some pair of differences has determinant +-1
        let full = coords
            .iter()
            .flat_map(|&p1| coords.iter().map(move |&p2| p1.0 * p2.1 - p1.1 * p2.0))
            .any(|det| det.abs() == 1);
        assert!(full, "coordinates {coords:?} do not generate the lattice");
    }

    #[test]
    fn cm_orbit_examples() {
        let orbit = cm_points(-19, 1).unwrap();
        assert_eq!(orbit.ring_class_order, 1);
        let orbit13 = cm_points(-19, 13).unwrap();
        assert_eq!(orbit13.ring_class_order, 14, "(13 + 1) h(-19)");
        for (form, tau) in &orbit13.points {
            assert!(tau.im > 0.0);
            assert_eq!(form.disc(), -19 * 169);
        }
        assert!(matches!(cm_points(-11, 1), Err(HeegnerError::BadField(-11))));
        assert!(matches!(
            cm_points(-19, 7),
            Err(HeegnerError::BadConductor(7))
        ));
    }

    #[test]
    fn base_heegner_point() {
        // l0 = 19: y_K is of infinite order and conj(y) + y = h f([0]) = T.
        let p = param();
        let y = heegner_trace(&p, 19, 1, 1, RingCharacter::Trivial).unwrap();
        assert_eq!(y.orbit_size, 1);
        assert!(!y.torsion_flag);
        assert!(y.minus_eigen_flag);
        let sum = y.z.conj() + y.z;
        assert!(p.lat.reduce(sum - p.torsion_t()).0.norm() < 1e-7);
        assert!(y.height_estimate > 0.0);
    }

    #[test]
    fn character_trace_is_minus_eigen() {
        // r = 1 instance of the derived-point theorem: Y_{13,1} with the
        // genus character is non-torsion in the minus eigenspace.
        let p = param();
        let y = heegner_trace(&p, 19, 13, 1, RingCharacter::ChiR).unwrap();
        assert_eq!(y.orbit_size, 14);
        assert!(!y.torsion_flag);
        assert!(y.minus_eigen_flag);
    }

    #[test]
    fn kolyvagin_trace_vanishes() {
        // Tr_{H_13/H_1} f(P_13) = a_13 f(P_1) = O since a_13 = 0.
        assert_eq!(crate::lseries::ap(13), 0);
        let p = param();
        let y = heegner_trace(&p, 19, 13, 1, RingCharacter::Trivial).unwrap();
        assert!(
            p.lat.reduce(y.z).0.norm() < 1e-6 || y.torsion_flag,
            "z = {}",
            y.z
        );
        assert!(p.lat.is_lattice_point(y.z, 1e-6 * p.lat.omega1));
    }

    #[test]
    fn bad_labels_rejected() {
        let p = param();
        // 11 is not split at 7; 5 = 1 mod 4 is the wrong residue for -l0;
        // conductor sharing a factor with l0 is rejected.
        assert!(heegner_trace(&p, 11, 1, 1, RingCharacter::Trivial).is_err());
        assert!(heegner_trace(&p, 5, 1, 1, RingCharacter::Trivial).is_err());
        assert!(heegner_trace(&p, 19, 19, 1, RingCharacter::Trivial).is_err());
        // 17 splits in Q(sqrt(-19)): not an admissible conductor prime.
        assert!(heegner_trace(&p, 19, 17, 1, RingCharacter::Trivial).is_err());
    }

    #[test]
    fn gross_zagier_coherence() {
        // Non-torsion traces must be matched by a nonvanishing derivative
        // of the corresponding root-number -1 twist.
        let p = param();
        let ev = Evaluator::new();
        let y = heegner_trace(&p, 19, 1, 1, RingCharacter::Trivial).unwrap();
        assert!(!y.torsion_flag);
        let rec = ev.l_derivative(-19).unwrap();
        assert!(rec.l_prime_numeric.unwrap().abs() > 1e-3);
        let yr = heegner_trace(&p, 19, 13, 1, RingCharacter::ChiR).unwrap();
        assert!(!yr.torsion_flag);
        let rec = ev.l_derivative(-19 * 13).unwrap();
        assert!(rec.l_prime_numeric.unwrap().abs() > 1e-3);
    }
}
