//! Exact integer arithmetic: Kronecker symbols, quartic residue tests,
//! deterministic primality, factorization of squarefree twist labels, and
//! classification of primes relative to F = Q(sqrt(-7)).
//!
//! A squarefree twist label M coprime to 7 decomposes as
//!
//! ```text
//!     M = epsilon * 2^delta * R * N
//! ```
//!
//! where R is the product of the odd prime factors inert in F and N the
//! product of those split in F.  R and N split further as R = R+ * R- and
//! N = N+ * N- by residue mod 4.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ArithError {
    #[error("input {0} is not squarefree")]
    NotSquarefree(i64),
    #[error("input {0} is divisible by 7")]
    DivisibleBySeven(i64),
    #[error("input is zero")]
    Zero,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("quartic symbol undefined: {a} is not a quadratic residue mod {p}")]
    NotQuadraticResidue { a: i64, p: u64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// Full Kronecker symbol (a/n), defined for all a and nonzero n.
pub fn kronecker(a: i64, n: i64) -> i32 {
    assert!(n != 0, "kronecker: n must be nonzero");
    let mut a = a;
    let mut n = n;
    let mut result: i32 = 1;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    // Pull out the even part of n; (a/2) is 0 for even a, else chi_8(a).
    let mut e = 0;
    while n % 2 == 0 {
        n /= 2;
        e += 1;
    }
    if e > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if e % 2 == 1 {
            let r = a.rem_euclid(8);
            if r == 3 || r == 5 {
                result = -result;
            }
        }
    }
    // Now n is odd and positive: Jacobi symbol by quadratic reciprocity.
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin.  The fixed base set decides primality
/// correctly for all inputs below 3.3 * 10^24, far beyond desk scale.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: u64) -> u64 {
    // Brent's cycle-finding variant; n must be odd composite.
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd_u64(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd(a: i64, b: i64) -> i64 {
    gcd_u64(a.unsigned_abs(), b.unsigned_abs()) as i64
}

/// Prime factorization of n <= 2^63: trial division with a Pollard rho
/// fallback.  Returns (prime, exponent) pairs in ascending order.
pub fn factor(n: u64) -> Vec<(u64, u32)> {
    let mut n = n;
    let mut out: Vec<(u64, u32)> = Vec::new();
    let push = |p: u64, out: &mut Vec<(u64, u32)>| {
        if let Some(last) = out.iter_mut().find(|(q, _)| *q == p) {
            last.1 += 1;
        } else {
            out.push((p, 1));
        }
    };
    for p in [2u64, 3, 5] {
        while n % p == 0 {
            push(p, &mut out);
            n /= p;
        }
    }
    let mut d = 7u64;
    let mut wheel = [4u64, 2, 4, 2, 4, 6, 2, 6].iter().cycle();
    while d <= 100_000 && d * d <= n {
        while n % d == 0 {
            push(d, &mut out);
            n /= d;
        }
        d += wheel.next().unwrap();
    }
    // Whatever survives trial division is prime or split by rho.
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime(m) {
            push(m, &mut out);
        } else {
            let d = pollard_rho(m);
            stack.push(d);
            stack.push(m / d);
        }
    }
    out.sort_unstable();
    out
}

pub fn is_squarefree(n: i64) -> bool {
    n != 0 && factor(n.unsigned_abs()).iter().all(|&(_, e)| e == 1)
}

/// Decides (a/p)_4 = 1, i.e. whether a is a fourth power residue mod p.
/// Only defined when p = 1 mod 4 and a is a quadratic residue mod p; in
/// that regime a^((p-1)/4) is +-1 mod p.
pub fn quartic_is_one(a: i64, p: u64) -> Result<bool, ArithError> {
    if !is_prime(p) {
        return Err(ArithError::NotPrime(p));
    }
    if p % 4 != 1 {
        return Err(ArithError::Precondition(format!("p = {p} is not 1 mod 4")));
    }
    let ar = a.rem_euclid(p as i64) as u64;
    if ar == 0 || kronecker(a, p as i64) != 1 {
        return Err(ArithError::NotQuadraticResidue { a, p });
    }
    let v = powmod(ar, (p - 1) / 4, p);
    debug_assert!(v == 1 || v == p - 1);
    Ok(v == 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeClassification {
    pub p: u64,
    pub splitting: Splitting,
    pub mod4: u64,
    /// p = 1 mod 4 and inert in F (the "q" primes of the rank-zero theorems).
    pub eligible_q: bool,
    /// p splits completely in Q(i, (-7)^(1/4)) (the "p" primes).
    pub eligible_p4: bool,
}

/// Splitting in F and complete splitting in Q(i, (-7)^(1/4)).  A prime p
/// splits completely in the latter field iff p = 1 mod 4, (-7/p) = 1 and
/// (-7/p)_4 = 1.
pub fn classify_prime(p: u64) -> Result<PrimeClassification, ArithError> {
    if !is_prime(p) {
        return Err(ArithError::NotPrime(p));
    }
    let splitting = match kronecker(-7, p as i64) {
        0 => Splitting::Ramified,
        1 => Splitting::Split,
        _ => Splitting::Inert,
    };
    let mod4 = p % 4;
    let eligible_q = mod4 == 1 && splitting == Splitting::Inert;
    let eligible_p4 = mod4 == 1
        && splitting == Splitting::Split
        && quartic_is_one(-7, p).unwrap_or(false);
    Ok(PrimeClassification {
        p,
        splitting,
        mod4,
        eligible_q,
        eligible_p4,
    })
}

/// A squarefree twist label M, coprime to 7, in its canonical decomposition
/// M = epsilon * 2^delta * R * N.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredTwist {
    pub m: i64,
    pub epsilon: i64,
    pub delta: u32,
    pub r: i64,
    pub n: i64,
    pub r_plus: i64,
    pub r_minus: i64,
    pub n_plus: i64,
    pub n_minus: i64,
    /// Number of prime factors of R-.
    pub r_minus_count: u32,
    /// Number of prime factors of N-.
    pub k_minus_count: u32,
    /// Odd prime factors with their classification, ascending.
    pub odd_primes: Vec<PrimeClassification>,
}

impl FactoredTwist {
    /// Number of prime factors of R.
    pub fn r_count(&self) -> u32 {
        self.odd_primes
            .iter()
            .filter(|c| c.splitting == Splitting::Inert)
            .count() as u32
    }

    /// Number of prime factors of N.
    pub fn k_count(&self) -> u32 {
        self.odd_primes
            .iter()
            .filter(|c| c.splitting == Splitting::Split)
            .count() as u32
    }

    /// The primes dividing 14M (support of the descent classes).
    pub fn descent_support(&self) -> Vec<i64> {
        let mut t = vec![2, 7];
        t.extend(self.odd_primes.iter().map(|c| c.p as i64));
        t.sort_unstable();
        t
    }
}

pub fn factor_twist(m: i64) -> Result<FactoredTwist, ArithError> {
    if m == 0 {
        return Err(ArithError::Zero);
    }
    if m % 7 == 0 {
        return Err(ArithError::DivisibleBySeven(m));
    }
    let fac = factor(m.unsigned_abs());
    if fac.iter().any(|&(_, e)| e > 1) {
        return Err(ArithError::NotSquarefree(m));
    }
    let epsilon = m.signum();
    let delta = if m % 2 == 0 { 1 } else { 0 };
    let mut r = 1i64;
    let mut n = 1i64;
    let (mut r_plus, mut r_minus, mut n_plus, mut n_minus) = (1i64, 1i64, 1i64, 1i64);
    let mut r_minus_count = 0;
    let mut k_minus_count = 0;
    let mut odd_primes = Vec::new();
    for &(p, _) in fac.iter().filter(|&&(p, _)| p != 2) {
        let cls = classify_prime(p)?;
        match cls.splitting {
            Splitting::Inert => {
                r *= p as i64;
                if cls.mod4 == 1 {
                    r_plus *= p as i64;
                } else {
                    r_minus *= p as i64;
                    r_minus_count += 1;
                }
            }
            Splitting::Split => {
                n *= p as i64;
                if cls.mod4 == 1 {
                    n_plus *= p as i64;
                } else {
                    n_minus *= p as i64;
                    k_minus_count += 1;
                }
            }
            Splitting::Ramified => unreachable!("7 | M was rejected above"),
        }
        odd_primes.push(cls);
    }
    Ok(FactoredTwist {
        m,
        epsilon,
        delta,
        r,
        n,
        r_plus,
        r_minus,
        n_plus,
        n_minus,
        r_minus_count,
        k_minus_count,
        odd_primes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronecker_basics() {
        assert_eq!(kronecker(1, 12), 1);
        assert_eq!(kronecker(-7, 5), -1);
        assert_eq!(kronecker(-7, 7), 0);
        assert_eq!(kronecker(-7, 2), 1); // -7 = 1 mod 8
    }

    #[test]
    fn kronecker_matches_euler_criterion_for_odd_primes() {
        for p in (3..200u64).filter(|&p| is_prime(p)) {
            for a in -50i64..50 {
                let sym = kronecker(a, p as i64);
                let ar = a.rem_euclid(p as i64) as u64;
                let expected = if ar == 0 {
                    0
                } else if powmod(ar, (p - 1) / 2, p) == 1 {
                    1
                } else {
                    -1
                };
                assert_eq!(sym, expected, "({a}/{p})");
            }
        }
    }

    #[test]
    fn kronecker_at_two_is_chi8() {
        // (a/2) for odd a depends only on a mod 8: +1 for 1,7; -1 for 3,5.
        for a in (-100i64..100).filter(|a| a % 2 != 0) {
            let r = a.rem_euclid(8);
            let expected = if r == 1 || r == 7 { 1 } else { -1 };
            assert_eq!(kronecker(a, 2), expected);
        }
        assert_eq!(kronecker(4, 2), 0);
    }

    #[test]
    fn kronecker_multiplicative_in_numerator() {
        for n in (1..300i64).filter(|n| n % 2 == 1) {
            for a in -20i64..20 {
                for b in -20i64..20 {
                    assert_eq!(kronecker(a * b, n), kronecker(a, n) * kronecker(b, n));
                }
            }
        }
    }

    #[test]
    fn quadratic_reciprocity_spot_check() {
        let primes: Vec<u64> = (3..200).filter(|&p| is_prime(p)).collect();
        for &p in &primes {
            for &q in &primes {
                if p == q {
                    continue;
                }
                let sign = if p % 4 == 3 && q % 4 == 3 { -1 } else { 1 };
                assert_eq!(
                    kronecker(p as i64, q as i64) * kronecker(q as i64, p as i64),
                    sign
                );
            }
        }
    }

    #[test]
    fn primality_against_sieve() {
        let mut sieve = vec![true; 10_000];
        sieve[0] = false;
        sieve[1] = false;
        for i in 2..10_000usize {
            if sieve[i] {
                for j in (i * i..10_000).step_by(i) {
                    sieve[j] = false;
                }
            }
        }
        for n in 0..10_000u64 {
            assert_eq!(is_prime(n), sieve[n as usize], "n = {n}");
        }
        assert!(is_prime(2_147_483_647)); // 2^31 - 1
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
    }

    #[test]
    fn factor_roundtrip() {
        for n in 1..5000u64 {
            let f = factor(n);
            let prod: u64 = f.iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(prod, n);
            assert!(f.iter().all(|&(p, _)| is_prime(p)));
        }
        assert_eq!(factor(1_000_003 * 1_000_033), vec![(1_000_003, 1), (1_000_033, 1)]);
    }

    #[test]
    fn quartic_symbol_examples() {
        assert_eq!(quartic_is_one(16, 13), Ok(true));
        assert_eq!(quartic_is_one(-7, 29), Ok(false)); // 22^7 = -1 mod 29
        assert_eq!(quartic_is_one(-7, 53), Ok(true)); // (-7)^13 = 1 mod 53
        assert!(matches!(
            quartic_is_one(-7, 13),
            Err(ArithError::NotQuadraticResidue { .. })
        ));
    }

    #[test]
    fn classify_prime_examples() {
        assert_eq!(classify_prime(7).unwrap().splitting, Splitting::Ramified);
        let c5 = classify_prime(5).unwrap();
        assert_eq!(c5.splitting, Splitting::Inert);
        assert!(c5.eligible_q);
        let c53 = classify_prime(53).unwrap();
        assert_eq!(c53.splitting, Splitting::Split);
        assert!(c53.eligible_p4);
        let c29 = classify_prime(29).unwrap();
        assert_eq!(c29.splitting, Splitting::Split);
        assert!(!c29.eligible_p4);
    }

    #[test]
    fn eligible_q_below_100() {
        let got: Vec<u64> = (2..100)
            .filter(|&p| is_prime(p))
            .filter(|&p| classify_prime(p).unwrap().eligible_q)
            .collect();
        // Brute residue tables: p = 1 mod 4 with p mod 7 a non-residue.
        assert_eq!(got, vec![5, 13, 17, 41, 61, 73, 89, 97]);
    }

    #[test]
    fn factor_twist_examples() {
        let t = factor_twist(65).unwrap();
        assert_eq!((t.epsilon, t.delta, t.r, t.n), (1, 0, 65, 1));
        assert_eq!(t.r_plus, 65);
        let t = factor_twist(-19).unwrap();
        assert_eq!((t.epsilon, t.r, t.r_minus), (-1, 19, 19));
        assert_eq!(t.r_minus_count, 1);
        assert_eq!(factor_twist(12), Err(ArithError::NotSquarefree(12)));
        assert_eq!(factor_twist(14), Err(ArithError::DivisibleBySeven(14)));
        let t = factor_twist(-106).unwrap(); // -2 * 53
        assert_eq!((t.delta, t.n_plus), (1, 53));
    }
}
