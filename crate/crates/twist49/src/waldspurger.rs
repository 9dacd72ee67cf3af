//! Gross points and the explicit Waldspurger formula.
//!
//! For n positive, squarefree, n = 1 mod 4 and coprime to 7, the field
//! K = Q(sqrt(-7n)) has discriminant -7n and embeds into the definite
//! quaternion algebra B = (-1, -7) with O_K landing in the maximal order:
//! the trace-zero element xi = iota(sqrt(-7n)) has Nrd(xi) = 7n and
//! (1 + xi)/2 integral.  Each ideal class, represented by a prime ideal
//! (p, m + sqrt(-7n)) of odd prime norm p coprime to 14n, determines a
//! norm-p divisor t of m + xi (unique up to units by class number one);
//! reducing t modulo the two-sided ideal (j) and taking the discrete
//! logarithm in F_49^x / F_7^x modulo the unit image gives a well defined
//! class
//!
//! ```text
//! lambda(cls)  in  Lambda = Z/4.
//! ```
//!
//! This map is NOT a homomorphism of the class group: its parity is forced
//! to be the genus character chi_0(cls) = kronecker(p, 7), which is odd on
//! ambiguous classes of non-residue norm (already at n = 5).  What does
//! hold, and is tested here, is the reflection law: translation by the
//! ramified class [p_7] (the prime above 7) acts on labels by
//! lambda(c [p_7]) = -lambda(c) + o for a constant o, and the primitive
//! Gross-Prasad test vector f is an eigenvector of this translation with
//! eigenvalue chi_7(pi) = kronecker(d*, 7), d* = (-1)^((d-1)/2) d.
//!
//! Two conventions remain open after the reflection law: a global parity
//! shift b in {0,1} on the labels, and the orientation of the embedding
//! itself (chi_0(g) = +1 in the source construction).  The shift is
//! filtered by the eigenvector relations; a wrongly oriented embedding can
//! still satisfy them (the labels move non-uniformly under conjugation of
//! the embedding, not by a relabelling), so the surviving candidates are
//! further required to satisfy the proved symmetries of the y_d: the
//! substitution t -> t pi in the defining sum gives y_d = y_{n/d} when n is
//! a QR mod 7, and forces y_d = 0 for divisors whose genus character is
//! trivial on [p_7] otherwise.  If no (shift, embedding) candidate
//! survives, the setup is rebuilt from the conjugated embedding
//! t xi t^{-1}; residual ambiguity or exhaustion is fatal.
//!
//! With the orientation fixed, for each positive divisor d of n,
//!
//! ```text
//! y_d = sum over classes of f(lambda(cls) + b) chi^(d)(cls),
//! ```
//!
//! with chi^(d)(cls) = kronecker(d*, p) on a class of norm p, and the
//! explicit Waldspurger formula states
//!
//! ```text
//! |y_d|^2 = 2^(2+delta) L^alg(A^(d*), 1) L^alg(A^(-7n/d*), 1),
//! ```
//!
//! the twist pair cut out by the genus decomposition -7n = d* (-7n/d*)
//! into fundamental discriminants (so d* = d when d = 1 mod 4; for
//! d = 3 mod 4 both twists have root number -1 and y_d = 0), with
//! delta = 0 iff n is a QR mod 7 (K_7 = Q_7(sqrt(-7))), where y_d is formed
//! with the test vector matched to chi^(d).  The descent arguments instead
//! fix the single vector matched to chi^(n) for all d; that is the
//! convention of the y_d operation here, giving y_1 = 0 for n = 5.

use std::collections::HashMap;

use thiserror::Error;

use crate::arith::{is_prime, is_squarefree, kronecker};
use crate::classgroup::{compose, d_star, reduced_forms, ClassGroupError, QuadForm};
use crate::lseries::{root_number, Evaluator, LSeriesError, Rational};
use crate::quaternion::{lambda_of, norm_elements, LambdaClass, OrderElement, QuaternionError};

#[derive(Debug, Error)]
pub enum WaldspurgerError {
    #[error("n = {0} must be positive, squarefree, 1 mod 4 and coprime to 7")]
    BadN(i64),
    #[error("short-vector search exhausted without an embedding for n = {0}")]
    EmbeddingExhausted(i64),
    #[error("no split prime representative found for form ({0}, {1}, {2})")]
    NoRepresentative(i64, i64, i64),
    #[error("no norm-{p} divisor of m + xi with m = {m}: contradicts class number one")]
    NoDivisor { p: i64, m: i64 },
    #[error("norm-{0} divisors give inconsistent Lambda classes")]
    InconsistentDivisors(i64),
    #[error("d = {0} is not a positive divisor of n = {1}")]
    BadDivisor(i64, i64),
    #[error("ramified-translation eigenvector relations hold for neither orientation (n = {0})")]
    OrientationUndetermined(i64),
    #[error(transparent)]
    ClassGroup(#[from] ClassGroupError),
    #[error(transparent)]
    Quaternion(#[from] QuaternionError),
    #[error(transparent)]
    LSeries(#[from] LSeriesError),
}

/// Trace-zero xi in O_B with Nrd(xi) = 7n and (1 + xi)/2 integral, by
/// deterministic short-vector search (increasing sup-norm, lexicographic
/// coordinates within each shell).
///
/// Integrality of (1 + xi)/2 forces basis coordinates (a, b, c, d) with a
/// odd and b, c, d even, and Trd = 0 forces d = -2a.
pub fn find_embedding(n: i64) -> Result<OrderElement, WaldspurgerError> {
    if n < 1 || n % 4 != 1 || n % 7 == 0 || !is_squarefree(n) {
        return Err(WaldspurgerError::BadN(n));
    }
    // Nrd >= 7 d^2 / 4 = 7 a^2, so the search is bounded.
    let bound = 8 * ((n as f64).sqrt() as i64 + 2);
    for s in 0..=bound {
        let mut a = -s;
        while a <= s {
            if a % 2 == 0 {
                a += 1;
                continue;
            }
            let d = -2 * a;
            if d.abs() > s {
                a += 1;
                continue;
            }
            let mut b = -s;
            while b <= s {
                if b % 2 != 0 {
                    b += 1;
                    continue;
                }
                let mut c = -s;
                while c <= s {
                    if c % 2 != 0 {
                        c += 1;
                        continue;
                    }
                    let xi = OrderElement::new(a, b, c, d);
                    if xi.sup_norm() == s && xi.nrd() == 7 * n {
                        debug_assert_eq!(xi.trd(), 0);
                        debug_assert_eq!(xi.mul(&xi), OrderElement::scalar(-7 * n));
                        return Ok(xi);
                    }
                    c += 1;
                }
                b += 1;
            }
            a += 1;
        }
    }
    Err(WaldspurgerError::EmbeddingExhausted(n))
}

/// One ideal class of K = Q(sqrt(-7n)): its reduced form, a prime
/// representative (p, m + sqrt(-7n)) and the assigned Lambda class (before
/// the orientation shift).
#[derive(Debug, Clone, Copy)]
pub struct ClassRep {
    pub form: QuadForm,
    pub p: i64,
    pub m: i64,
    pub lambda: LambdaClass,
}

/// The Gross-point setup for K = Q(sqrt(-7n)).
#[derive(Debug, Clone)]
pub struct GrossSetup {
    pub n: i64,
    pub xi: OrderElement,
    /// 0 iff K_7 = Q_7(sqrt(-7)), i.e. n is a QR mod 7.
    pub delta: u8,
    /// Orientation shift in {0, 1}, fixed by the eigenvector anchor.
    pub shift: u8,
    /// Reduced form of the ramified prime above 7.
    pub p7_form: QuadForm,
    pub reps: Vec<ClassRep>,
}

// Ascending odd primes represented by the form, coprime to 7n.
fn represented_primes(form: &QuadForm, n: i64) -> Vec<i64> {
    let mut found = std::collections::BTreeSet::new();
    for x in -60i64..=60 {
        for y in -60i64..=60 {
            let v = form.eval(x, y);
            if v > 2 && v % 2 != 0 && v % 7 != 0 && n % v != 0 && is_prime(v as u64) {
                found.insert(v);
            }
        }
    }
    found.into_iter().collect()
}

// The reduced form attached to the ideal (p, (b + sqrt(D))/2), b odd,
// b^2 = D mod 4p: (p, b, (b^2 - D)/(4p)).
fn form_of_prime_ideal(p: i64, b: i64, disc: i64) -> QuadForm {
    debug_assert_eq!((b * b - disc).rem_euclid(4 * p), 0);
    QuadForm {
        a: p,
        b,
        c: (b * b - disc) / (4 * p),
    }
    .reduce()
}

/// The norm-p divisor of m + xi, reduced to its Lambda class.  All
/// divisors agree modulo units, which act trivially on Lambda.
pub fn class_to_lambda(
    xi: &OrderElement,
    p: i64,
    m: i64,
) -> Result<LambdaClass, WaldspurgerError> {
    let mxi = OrderElement::scalar(m).add(xi);
    debug_assert_eq!(mxi.nrd() % p, 0);
    let mut found: Option<LambdaClass> = None;
    for t in norm_elements(p) {
        let prod = mxi.mul(&t.conj());
        if prod.div_exact(p).is_some() {
            let cls = lambda_of(&t)?;
            match found {
                None => found = Some(cls),
                Some(prev) if prev != cls => {
                    return Err(WaldspurgerError::InconsistentDivisors(p));
                }
                _ => {}
            }
        }
    }
    found.ok_or(WaldspurgerError::NoDivisor { p, m })
}

const F0: [i64; 4] = [1, 0, -1, 0];
const F1: [i64; 4] = [0, 1, 0, -1];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestVectorKind {
    F0,
    F1,
    F0MinusF1,
    F0PlusF1,
}

/// A test vector as a function Lambda -> {-1, 0, 1}, indexed by label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TestVector {
    pub kind: TestVectorKind,
    pub values: [i64; 4],
    pub pairing_norm: i64,
}

impl TestVector {
    pub fn of_kind(kind: TestVectorKind) -> TestVector {
        let values = match kind {
            TestVectorKind::F0 => F0,
            TestVectorKind::F1 => F1,
            TestVectorKind::F0MinusF1 => {
                [F0[0] - F1[0], F0[1] - F1[1], F0[2] - F1[2], F0[3] - F1[3]]
            }
            TestVectorKind::F0PlusF1 => {
                [F0[0] + F1[0], F0[1] + F1[1], F0[2] + F1[2], F0[3] + F1[3]]
            }
        };
        TestVector {
            kind,
            values,
            pairing_norm: values.iter().map(|v| v * v).sum(),
        }
    }

    pub fn negate(&self) -> TestVector {
        let mut values = self.values;
        for v in &mut values {
            *v = -*v;
        }
        TestVector { values, ..*self }
    }
}

// Test vector table: (delta, chi_7(pi)) -> vector.
fn vector_for(delta: u8, chi7: i32) -> TestVector {
    let kind = match (delta, chi7) {
        (0, 1) => TestVectorKind::F0,
        (0, _) => TestVectorKind::F1,
        (1, 1) => TestVectorKind::F0MinusF1,
        _ => TestVectorKind::F0PlusF1,
    };
    TestVector::of_kind(kind)
}

impl GrossSetup {
    pub fn new(n: i64) -> Result<GrossSetup, WaldspurgerError> {
        let xi = find_embedding(n)?;
        GrossSetup::oriented(n, xi)
    }

    /// Build the setup from `xi`, switching to the conjugated embedding
    /// t xi t^{-1} when `xi` itself admits no orientation.  Conjugation
    /// moves the class labels non-uniformly, so the switch genuinely
    /// repairs a wrongly oriented embedding rather than relabelling it.
    pub fn oriented(n: i64, xi: OrderElement) -> Result<GrossSetup, WaldspurgerError> {
        match GrossSetup::with_embedding(n, xi, 0) {
            Err(WaldspurgerError::OrientationUndetermined(_)) => {
                let xi2 = conjugated_embedding(&xi, n)?;
                GrossSetup::with_embedding(n, xi2, 0)
            }
            other => other,
        }
    }

    /// Build the setup with an explicit embedding; `skip` shifts every class
    /// to its next-smallest prime representative (alternate-representative
    /// reruns for the well-definedness check).
    pub fn with_embedding(
        n: i64,
        xi: OrderElement,
        skip: usize,
    ) -> Result<GrossSetup, WaldspurgerError> {
        if n < 1 || n % 4 != 1 || n % 7 == 0 || !is_squarefree(n) {
            return Err(WaldspurgerError::BadN(n));
        }
        let disc = -7 * n;
        let delta = if kronecker(n, 7) == 1 { 0 } else { 1 };
        let mut reps = Vec::new();
        for form in reduced_forms(disc)? {
            let mut taken = 0usize;
            let mut chosen = None;
            'prime: for p in represented_primes(&form, n) {
                // odd root of m^2 = -7n mod 4p whose ideal class matches
                let mut roots = Vec::new();
                for r in 0..p {
                    if (r * r + 7 * n) % p == 0 {
                        roots.push(r);
                    }
                }
                for r in roots {
                    let b = if r % 2 == 1 { r } else { r + p };
                    if form_of_prime_ideal(p, b, disc) != form {
                        continue;
                    }
                    let mut m = b;
                    if (m * m + 7 * n) % (p * p) == 0 {
                        m += p;
                    }
                    if taken < skip {
                        taken += 1;
                        continue 'prime;
                    }
                    let lambda = class_to_lambda(&xi, p, m)?;
                    chosen = Some(ClassRep { form, p, m, lambda });
                    break 'prime;
                }
            }
            reps.push(chosen.ok_or(WaldspurgerError::NoRepresentative(form.a, form.b, form.c))?);
        }
        // The ramified prime above 7: p_7 = (7, sqrt(-7n)), form (7, 7, (7+n)/4).
        let p7_form = QuadForm {
            a: 7,
            b: 7,
            c: (7 + n) / 4,
        }
        .reduce();
        let mut chosen: Option<GrossSetup> = None;
        for shift in 0u8..2 {
            if !anchor_holds(delta, &reps, p7_form, shift) {
                continue;
            }
            let candidate = GrossSetup {
                n,
                xi,
                delta,
                shift,
                p7_form,
                reps: reps.clone(),
            };
            if !candidate.symmetry_holds()? {
                continue;
            }
            if chosen.is_some() {
                return Err(WaldspurgerError::OrientationUndetermined(n));
            }
            chosen = Some(candidate);
        }
        chosen.ok_or(WaldspurgerError::OrientationUndetermined(n))
    }

    /// The proved symmetries of the y_d that pin the orientation beyond the
    /// eigenvector anchor.  For split setups (delta = 0) the substitution
    /// t -> t pi in the defining sum gives y_d = y_{n/d}; for inert setups
    /// (delta = 1) the same substitution forces y_d = 0 for every divisor
    /// whose genus character is trivial on the ramified class.
    fn symmetry_holds(&self) -> Result<bool, WaldspurgerError> {
        let p7_rep = self
            .reps
            .iter()
            .find(|r| r.form == self.p7_form)
            .ok_or(WaldspurgerError::OrientationUndetermined(self.n))?
            .clone();
        let mut d = 1;
        while d <= self.n {
            if self.n % d == 0 {
                if self.delta == 0 {
                    if y_d(self, d)? != y_d(self, self.n / d)? {
                        return Ok(false);
                    }
                } else if self.genus_character(d, &p7_rep) == 1 && y_d(self, d)? != 0 {
                    return Ok(false);
                }
            }
            d += 1;
        }
        Ok(true)
    }

    pub fn class_number(&self) -> usize {
        self.reps.len()
    }

    /// chi^(d) on a class: kronecker(d*, p) on the norm-p representative.
    pub fn genus_character(&self, d: i64, rep: &ClassRep) -> i32 {
        if d == 1 {
            1
        } else {
            kronecker(d_star(d), rep.p)
        }
    }

    fn value(&self, f: &TestVector, rep: &ClassRep) -> i64 {
        f.values[usize::from((rep.lambda.label + self.shift) % 4)]
    }
}

// Orientation anchor.  Translation by the ramified class [p_7] must act on
// the test vectors as a chi_7(pi)-eigenvector: for every class c,
// f(lambda(c [p_7]) + b) = chi_7(pi) f(lambda(c) + b), with chi_7(pi) = +1
// for the (delta, +1) row and -1 for the (delta, -1) row.
fn anchor_holds(delta: u8, reps: &[ClassRep], p7_form: QuadForm, b: u8) -> bool {
    let lookup: HashMap<QuadForm, u8> = reps.iter().map(|r| (r.form, r.lambda.label)).collect();
    let plus = vector_for(delta, 1);
    let minus = vector_for(delta, -1);
    for rep in reps {
        let translated = compose(rep.form, p7_form).reduce();
        let lam_t = lookup[&translated];
        let at = |f: &TestVector, label: u8| f.values[usize::from((label + b) % 4)];
        if at(&plus, lam_t) != at(&plus, rep.lambda.label)
            || at(&minus, lam_t) != -at(&minus, rep.lambda.label)
        {
            return false;
        }
    }
    true
}

/// The primitive test vector for (A, chi^(d)), chosen from the K_7 type and
/// chi^(d)_7(pi) = kronecker(d*, 7).
pub fn select_test_vector(setup: &GrossSetup, d: i64) -> Result<TestVector, WaldspurgerError> {
    if d < 1 || setup.n % d != 0 {
        return Err(WaldspurgerError::BadDivisor(d, setup.n));
    }
    let chi7 = if d == 1 { 1 } else { kronecker(d_star(d), 7) };
    Ok(vector_for(setup.delta, chi7))
}

/// y_d with an explicit test vector.
pub fn y_d_with(setup: &GrossSetup, d: i64, f: &TestVector) -> Result<i64, WaldspurgerError> {
    if d < 1 || setup.n % d != 0 {
        return Err(WaldspurgerError::BadDivisor(d, setup.n));
    }
    let mut sum = 0i64;
    for rep in &setup.reps {
        sum += setup.value(f, rep) * i64::from(setup.genus_character(d, rep));
    }
    Ok(sum)
}

/// y_d with the single test vector matched to chi^(n), the convention of
/// the descent arguments (so y_1 = 0 for n = 5).
pub fn y_d(setup: &GrossSetup, d: i64) -> Result<i64, WaldspurgerError> {
    let f = select_test_vector(setup, setup.n)?;
    y_d_with(setup, d, &f)
}

/// One verified instance of the explicit Waldspurger identity.
#[derive(Debug, Clone)]
pub struct WaldspurgerReport {
    pub n: i64,
    pub d: i64,
    pub y: i64,
    pub delta: u8,
    pub lalg_d: Rational,
    pub lalg_complement: Rational,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// |y_d|^2 = 2^(2+delta) L^alg(A^(d*), 1) L^alg(A^(-7n/d*), 1), with y_d
/// formed with the test vector matched to chi^(d) and the right side from
/// the Dirichlet-series path.  For d = 3 mod 4 the decomposition labels
/// d* = -d and 7n/d both carry root number -1, so the right side is zero
/// and the identity asserts y_d = 0.
pub fn verify_waldspurger(
    setup: &GrossSetup,
    d: i64,
    evaluator: &Evaluator,
) -> Result<WaldspurgerReport, WaldspurgerError> {
    let f = select_test_vector(setup, d)?;
    let y = y_d_with(setup, d, &f)?;
    let label = if d == 1 { 1 } else { d_star(d) };
    let (lalg_d, lalg_complement) = if root_number(label) == 1 {
        (
            evaluator.lalg_ord2(label)?.0,
            evaluator.lalg_ord2(-7 * setup.n / label)?.0,
        )
    } else {
        (Rational::new(0, 1), Rational::new(0, 1))
    };
    let lhs = (y * y) as f64;
    let rhs =
        f64::powi(2.0, 2 + i32::from(setup.delta)) * lalg_d.as_f64() * lalg_complement.as_f64();
    let pass = (lhs - rhs).abs() < 1e-6 * lhs.max(1.0);
    Ok(WaldspurgerReport {
        n: setup.n,
        d,
        y,
        delta: setup.delta,
        lalg_d,
        lalg_complement,
        lhs,
        rhs,
        pass,
    })
}

/// The conjugated embedding t xi t^{-1} built from a norm-p divisor of
/// m + xi, following the orientation-switching construction: with
/// m + xi = u t one has t xi t^{-1} = tu - m in O_B.
pub fn conjugated_embedding(xi: &OrderElement, n: i64) -> Result<OrderElement, WaldspurgerError> {
    // smallest odd prime with both n and -7 non-residues
    let mut p = 3i64;
    loop {
        if is_prime(p as u64) && kronecker(n, p) == -1 && kronecker(-7, p) == -1 {
            break;
        }
        p += 2;
    }
    let m = (0..p)
        .find(|m| (m * m + 7 * n) % p == 0)
        .expect("-7n is a QR mod p by construction");
    let mxi = OrderElement::scalar(m).add(xi);
    for t in norm_elements(p) {
        if let Some(u) = mxi.mul(&t.conj()).div_exact(p) {
            let xi2 = t.mul(&u).sub(&OrderElement::scalar(m));
            debug_assert_eq!(xi2.trd(), 0);
            debug_assert_eq!(xi2.nrd(), 7 * n);
            return Ok(xi2);
        }
    }
    Err(WaldspurgerError::NoDivisor { p, m })
}
