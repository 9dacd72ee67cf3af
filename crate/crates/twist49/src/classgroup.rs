//! Class groups of imaginary quadratic orders via binary quadratic forms.
//!
//! Forms ax^2 + bxy + cy^2 of negative discriminant D = b^2 - 4ac are
//! enumerated in reduced representatives, composed by Dirichlet composition
//! of concordant forms, and the abelian group structure is recovered from
//! element orders.  On top of this sit the genus-theory 2-rank, the Redei
//! matrix 4-rank, the quartic-symbol 8-rank criterion for discriminants
//! -7p together with its independent torsor search z^2 = p x^2 + 7 y^2,
//! and genus characters.

use crate::arith::{factor, gcd, is_prime, kronecker, quartic_is_one, ArithError};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClassGroupError {
    #[error("discriminant {0} is not negative")]
    NotNegative(i64),
    #[error("discriminant {0} is not 0 or 1 mod 4")]
    BadResidue(i64),
    #[error("discriminant {0} is not fundamental")]
    NotFundamental(i64),
    #[error("prime {0} ineligible: need p = 1 mod 4 and (p/7) = 1")]
    IneligiblePrime(u64),
    #[error("8-rank routes disagree at p = {0}: quartic criterion {1}, triple search {2}")]
    EightRankMismatch(u64, u8, u8),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("no represented value coprime to the modulus found for form ({0},{1},{2})")]
    NoCoprimeValue(i64, i64, i64),
}

/// A primitive positive definite binary quadratic form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn eval(&self, x: i64, y: i64) -> i64 {
        self.a * x * x + self.b * x * y + self.c * y * y
    }

    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        b.abs() <= a && a <= c && (b >= 0 || (b.abs() < a && a < c))
    }

    /// Gauss reduction of a positive definite form.  Intermediate forms
    /// produced by composition can have large coefficients, so the loop
    /// runs in 128-bit arithmetic.
    pub fn reduce(self) -> QuadForm {
        let (mut a, mut b, mut c) = (self.a as i128, self.b as i128, self.c as i128);
        let d = b * b - 4 * a * c;
        loop {
            // Normalize: -a < b <= a.
            if b > a || b <= -a {
                let a2 = 2 * a;
                b = b.rem_euclid(a2);
                if b > a {
                    b -= a2;
                }
                c = (b * b - d) / (4 * a);
            }
            if a > c {
                (a, b, c) = (c, -b, a);
                continue;
            }
            if (a == c || b == -a) && b < 0 {
                b = -b;
            }
            return QuadForm {
                a: a as i64,
                b: b as i64,
                c: c as i64,
            };
        }
    }

    pub fn inverse(&self) -> QuadForm {
        QuadForm {
            a: self.a,
            b: -self.b,
            c: self.c,
        }
        .reduce()
    }

    /// Apply the unimodular substitution (x,y) -> (px + qy, rx + sy).
    fn transform(&self, p: i64, q: i64, r: i64, s: i64) -> QuadForm {
        debug_assert_eq!(p * s - q * r, 1);
        let a = self.eval(p, r);
        let c = self.eval(q, s);
        let b = 2 * (self.a * p * q + self.c * r * s) + self.b * (p * s + q * r);
        QuadForm { a, b, c }
    }

    /// An equivalent form whose leading coefficient is coprime to m.
    fn with_leading_coprime_to(&self, m: i64) -> Result<QuadForm, ClassGroupError> {
        for bound in 1..=16i64 {
            for x in -bound..=bound {
                for y in -bound..=bound {
                    if x.abs().max(y.abs()) != bound && bound > 1 {
                        continue;
                    }
                    if gcd(x, y) != 1 {
                        continue;
                    }
                    let v = self.eval(x, y);
                    if v > 0 && gcd(v, m) == 1 {
                        // Extend (x,y) to a unimodular matrix.
                        let (u, w) = bezout(x, y);
                        return Ok(self.transform(x, -w, y, u));
                    }
                }
            }
        }
        Err(ClassGroupError::NoCoprimeValue(self.a, self.b, self.c))
    }
}

/// Returns (u, v) with x*u + y*v = gcd(x, y).
fn bezout(x: i64, y: i64) -> (i64, i64) {
    if y == 0 {
        return (x.signum(), 0);
    }
    let (u, v) = bezout(y, x % y);
    (v, u - (x / y) * v)
}

/// Dirichlet composition of two forms of the same discriminant.
pub fn compose(f: QuadForm, g: QuadForm) -> QuadForm {
    debug_assert_eq!(f.disc(), g.disc());
    let d = f.disc();
    // Make the leading coefficients coprime, then make the middle
    // coefficients agree (concordant forms).
    let g = g
        .with_leading_coprime_to(f.a)
        .expect("primitive form represents values coprime to any modulus");
    let (a1, b1) = (f.a, f.b);
    let (a2, b2) = (g.a, g.b);
    // Solve b = b1 mod 2a1, b = b2 mod 2a2 (solvable: b1 = b2 mod 2).
    let m1 = 2 * a1;
    let m2 = 2 * a2;
    let g12 = gcd(m1, m2); // = 2 since gcd(a1,a2) = 1
    debug_assert_eq!((b2 - b1) % g12, 0);
    let (u, _) = bezout(m1 / g12, m2 / g12);
    let lcm = m1 / g12 * m2;
    let b = {
        let k = ((b2 - b1) / g12) as i128 * u as i128 % (m2 / g12) as i128;
        let b = b1 as i128 + (m1 as i128) * k;
        b.rem_euclid(lcm as i128) as i64
    };
    let a3 = a1 * a2;
    let num = b as i128 * b as i128 - d as i128;
    debug_assert_eq!(num.rem_euclid(4 * a3 as i128), 0);
    let c3 = (num / (4 * a3 as i128)) as i64;
    QuadForm { a: a3, b, c: c3 }.reduce()
}

pub fn principal_form(d: i64) -> QuadForm {
    if d.rem_euclid(4) == 0 {
        QuadForm {
            a: 1,
            b: 0,
            c: -d / 4,
        }
    } else {
        QuadForm {
            a: 1,
            b: 1,
            c: (1 - d) / 4,
        }
    }
}

/// All reduced primitive forms of discriminant d < 0.
pub fn reduced_forms(d: i64) -> Result<Vec<QuadForm>, ClassGroupError> {
    if d >= 0 {
        return Err(ClassGroupError::NotNegative(d));
    }
    let r = d.rem_euclid(4);
    if r != 0 && r != 1 {
        return Err(ClassGroupError::BadResidue(d));
    }
    let mut out = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= -d {
        for b in -a + 1..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a {
                continue;
            }
            if a == c && b < 0 {
                continue;
            }
            if gcd(gcd(a, b), c) != 1 {
                continue;
            }
            out.push(QuadForm { a, b, c });
        }
        a += 1;
    }
    out.sort_unstable();
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct ClassGroupData {
    pub disc: i64,
    pub h: usize,
    pub elements: Vec<QuadForm>,
    /// Invariant factors d_1 | d_2 | ... with product h (trivial group: empty).
    pub cycle_structure: Vec<u64>,
    /// Partition of the 2-Sylow subgroup into cyclic factors 2^e, descending.
    pub two_sylow: Vec<u32>,
    /// dim A/2A, dim 2A/4A, dim 4A/8A.
    pub h2: u32,
    pub h4: u32,
    pub h8: u32,
}

impl ClassGroupData {
    pub fn order_of(&self, f: QuadForm) -> u64 {
        let one = principal_form(self.disc).reduce();
        let mut acc = f;
        let mut n = 1;
        while acc != one {
            acc = compose(acc, f);
            n += 1;
        }
        n
    }

    pub fn has_order_four(&self) -> bool {
        self.h4 > 0
    }
}

pub fn class_group(d: i64) -> Result<ClassGroupData, ClassGroupError> {
    let elements = reduced_forms(d)?;
    let h = elements.len();
    let one = principal_form(d).reduce();
    debug_assert!(elements.contains(&one));
    let orders: Vec<u64> = elements
        .iter()
        .map(|&f| {
            let mut acc = f;
            let mut n = 1u64;
            while acc != one {
                acc = compose(acc, f);
                n += 1;
            }
            n
        })
        .collect();
    // Per-prime partitions from the counts of elements of order dividing p^k.
    let hfac = factor(h as u64);
    let mut partitions: Vec<(u64, Vec<u32>)> = Vec::new();
    for &(p, _) in &hfac {
        // Counting elements of order dividing p^k determines the p-Sylow
        // partition: #(G[p^k])/#(G[p^(k-1)]) = p^(number of factors >= p^k).
        let mut part: Vec<u32> = Vec::new();
        let mut prev = 1u64;
        let mut k = 1u32;
        loop {
            let pk = p.pow(k);
            let cnt = orders.iter().filter(|&&o| pk % o == 0).count() as u64;
            if cnt == prev {
                break;
            }
            let mk = ilog(p, cnt / prev) as usize;
            while part.len() < mk {
                part.push(0);
            }
            for e in part.iter_mut().take(mk) {
                *e = k;
            }
            prev = cnt;
            k += 1;
        }
        partitions.push((p, part));
    }
    // Merge per-prime partitions into invariant factors (largest first).
    let max_len = partitions.iter().map(|(_, v)| v.len()).max().unwrap_or(0);
    let mut invariant: Vec<u64> = Vec::new();
    for idx in 0..max_len {
        let mut d_i = 1u64;
        for (p, part) in &partitions {
            if let Some(&e) = part.get(idx) {
                d_i *= p.pow(e);
            }
        }
        invariant.push(d_i);
    }
    invariant.reverse(); // ascending, d_1 | d_2 | ...
    let two_sylow: Vec<u32> = partitions
        .iter()
        .find(|(p, _)| *p == 2)
        .map(|(_, v)| v.clone())
        .unwrap_or_default();
    let h2 = two_sylow.len() as u32;
    let h4 = two_sylow.iter().filter(|&&e| e >= 2).count() as u32;
    let h8 = two_sylow.iter().filter(|&&e| e >= 3).count() as u32;
    Ok(ClassGroupData {
        disc: d,
        h,
        elements,
        cycle_structure: invariant,
        two_sylow,
        h2,
        h4,
        h8,
    })
}

fn ilog(p: u64, mut n: u64) -> u32 {
    let mut e = 0;
    while n > 1 {
        debug_assert_eq!(n % p, 0);
        n /= p;
        e += 1;
    }
    e
}

pub fn is_fundamental(d: i64) -> bool {
    if d >= 0 {
        return false;
    }
    let r = d.rem_euclid(4);
    if r == 1 {
        crate::arith::is_squarefree(d)
    } else if r == 0 {
        let m = d / 4;
        let mr = m.rem_euclid(4);
        (mr == 2 || mr == 3) && crate::arith::is_squarefree(m)
    } else {
        false
    }
}

#[derive(Debug, Clone)]
pub struct RedeiMatrix {
    /// Prime discriminant labels p_i* with their underlying primes.
    pub labels: Vec<(i64, u64)>,
    /// Row-major matrix over F2.
    pub entries: Vec<Vec<u8>>,
}

impl RedeiMatrix {
    pub fn rank(&self) -> u32 {
        let mut m: Vec<Vec<u8>> = self.entries.clone();
        let t = m.len();
        let mut rank = 0;
        let mut row = 0;
        for col in 0..t {
            if let Some(piv) = (row..t).find(|&i| m[i][col] == 1) {
                m.swap(row, piv);
                for i in 0..t {
                    if i != row && m[i][col] == 1 {
                        for j in 0..t {
                            m[i][j] ^= m[row][j];
                        }
                    }
                }
                rank += 1;
                row += 1;
            }
        }
        rank
    }
}

/// Prime discriminant factorization of a fundamental discriminant:
/// D = prod p_i* with p* = (-1)^((p-1)/2) p for odd p, and at most one
/// even factor from {-4, 8, -8}.
pub fn prime_discriminants(d: i64) -> Vec<(i64, u64)> {
    let mut labels = Vec::new();
    let mut cofactor = d;
    for &(p, _) in factor(d.unsigned_abs()).iter().filter(|&&(p, _)| p != 2) {
        let ps = if p % 4 == 1 { p as i64 } else { -(p as i64) };
        labels.push((ps, p));
        cofactor /= ps;
    }
    if cofactor != 1 {
        debug_assert!([-4, 8, -8].contains(&cofactor));
        labels.push((cofactor, 2));
    }
    labels.sort_unstable_by_key(|&(_, p)| p);
    labels
}

/// The Redei matrix and the derived 2- and 4-ranks of the class group of a
/// fundamental discriminant: h2 = t - 1 and h4 = t - 1 - rank(R).
pub fn redei_ranks(d: i64) -> Result<(u32, u32, RedeiMatrix), ClassGroupError> {
    if !is_fundamental(d) {
        return Err(ClassGroupError::NotFundamental(d));
    }
    let labels = prime_discriminants(d);
    let t = labels.len();
    let mut entries = vec![vec![0u8; t]; t];
    for i in 0..t {
        for j in 0..t {
            if i == j {
                continue;
            }
            let (pi_star, _) = labels[i];
            let (_, pj) = labels[j];
            entries[i][j] = if kronecker(pi_star, pj as i64) == 1 { 0 } else { 1 };
        }
    }
    // Diagonal entry a_jj encodes ((D/D_j*)/p_j), which is the parity of
    // the off-diagonal entries in column j.
    for j in 0..t {
        entries[j][j] = (0..t).filter(|&i| i != j).map(|i| entries[i][j]).sum::<u8>() % 2;
    }
    let m = RedeiMatrix { labels, entries };
    let h2 = t as u32 - 1;
    let h4 = h2 - m.rank();
    Ok((h2, h4, m))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EightRankWitness {
    /// (-7/p)_4 evaluated by modular exponentiation.
    Quartic { symbol_is_one: bool },
    /// A primitive triple z^2 = p x^2 + 7 y^2 with gcd(z, 7p) = 1, z odd
    /// and (z/7) = 1, certifying 8-rank 1.
    Triple { x: i64, y: i64, z: i64 },
    /// Bounded search exhausted: no qualifying triple below the bound.
    SearchExhausted { bound: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EightRankCertificate {
    pub p: u64,
    pub value: u8,
    pub witness: EightRankWitness,
}

/// Search for a primitive solution of z^2 = p x^2 + 7 y^2 with z odd,
/// coprime to 7p and a quadratic residue mod 7.  When z comes out even the
/// solution is rewritten through the identity
/// p(3x)^2 = (4z + 7y)^2 - 7(z + 4y)^2, which produces an odd z.
fn eight_rank_triple_search(p: u64, bound: i64) -> Option<(i64, i64, i64)> {
    let pi = p as i64;
    for x in 1..=bound {
        for y in 1..=bound {
            if gcd(x, y) != 1 {
                continue;
            }
            let rhs = pi * x * x + 7 * y * y;
            let z = (rhs as f64).sqrt() as i64;
            for z in [z - 1, z, z + 1] {
                if z <= 0 || z * z != rhs {
                    continue;
                }
                let (mut x, mut y, mut z) = (x, y, z);
                if z % 2 == 0 {
                    let (z2, y2, x2) = (4 * z + 7 * y, z + 4 * y, 3 * x);
                    x = x2;
                    y = y2;
                    z = z2;
                    debug_assert_eq!(z * z, pi * x * x + 7 * y * y);
                }
                if gcd(z, 7 * pi) == 1 && kronecker(z, 7) == 1 {
                    return Some((x, y, z));
                }
            }
        }
    }
    None
}

/// The 8-rank h8(-7p) for p = 1 mod 4 with (p/7) = 1, by the quartic
/// criterion (authoritative) cross-checked by the bounded torsor search.
/// Disagreement between the two routes is a fatal error.
pub fn h8_for_7p(p: u64) -> Result<EightRankCertificate, ClassGroupError> {
    if !is_prime(p) {
        return Err(ClassGroupError::Arith(ArithError::NotPrime(p)));
    }
    if p % 4 != 1 || kronecker(p as i64, 7) != 1 {
        return Err(ClassGroupError::IneligiblePrime(p));
    }
    let criterion = quartic_is_one(-7, p)?;
    let base_bound = 4 * (p as f64).sqrt().ceil() as i64;
    let search = eight_rank_triple_search(p, base_bound)
        .or_else(|| eight_rank_triple_search(p, 4 * base_bound));
    let search_value = if search.is_some() { 1 } else { 0 };
    let value = if criterion { 1 } else { 0 };
    if value != search_value {
        return Err(ClassGroupError::EightRankMismatch(p, value, search_value));
    }
    let witness = match search {
        Some((x, y, z)) => EightRankWitness::Triple { x, y, z },
        None => EightRankWitness::SearchExhausted {
            bound: 4 * base_bound,
        },
    };
    Ok(EightRankCertificate { p, value, witness })
}

pub fn has_order_four(d: i64) -> Result<bool, ClassGroupError> {
    Ok(class_group(d)?.has_order_four())
}

/// d* = (-1)^((d-1)/2) d for odd positive d.
pub fn d_star(d: i64) -> i64 {
    debug_assert!(d > 0 && d % 2 == 1);
    if d % 4 == 1 {
        d
    } else {
        -d
    }
}

/// Genus character chi^(d) on a class represented by a form of norm q
/// (prime or 1): kronecker(d*, q) when gcd(d, q) = 1, else the
/// complementary-divisor symbol kronecker(D/d*, q).
pub fn genus_character_on_norm(disc: i64, d: i64, q: i64) -> i32 {
    let ds = d_star(d);
    if gcd(d, q) == 1 {
        kronecker(ds, q)
    } else {
        debug_assert_eq!(disc % ds, 0);
        kronecker(disc / ds, q)
    }
}

/// Genus character chi^(d) on a form class, via any represented value
/// coprime to 2|D|.
pub fn genus_character_on_form(disc: i64, d: i64, f: QuadForm) -> Result<i32, ClassGroupError> {
    let ds = d_star(d);
    debug_assert_eq!(disc % ds, 0);
    for bound in 0..=12i64 {
        for x in -bound..=bound {
            for y in -bound..=bound {
                if x.abs().max(y.abs()) != bound {
                    continue;
                }
                let v = f.eval(x, y);
                if v > 0 && gcd(v, 2 * disc.abs()) == 1 {
                    return Ok(kronecker(ds, v));
                }
            }
        }
    }
    Err(ClassGroupError::NoCoprimeValue(f.a, f.b, f.c))
}
