//! Period lattices and Weierstrass functions for A = X0(49) and its
//! positive twists.
//!
//! The twist A^(M) has c4 = 105 M^2, c6 = 1323 M^3, so the cubic
//! 4x^3 - g2 x - g3 (g2 = c4/12, g3 = c6/216) has negative discriminant
//! and a single real root.  The real period comes from the classical
//! arithmetic-geometric-mean evaluation of the complete elliptic
//! integral; the second period is pinned by complex multiplication:
//! the lattice is omega1 (Z + Z tau) with tau = (1 + sqrt(-7))/2.
//!
//! Quasi-periods eta1, eta2 come from the q-series of E2 and of the
//! Weierstrass zeta function (two independent routes, reconciled by the
//! Legendre relation).  On top of these sit s2 and the area constant A
//! solved from the linear system eta_k = s2 omega_k + conj(omega_k)/A,
//! and the non-holomorphic Eisenstein function
//!
//! ```text
//!     E1*(z) = zeta(z) - z s2 - conj(z)/A,
//! ```
//! which is genuinely periodic and odd.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PeriodError {
    #[error("lattice label M = {0} is not a positive squarefree integer prime to 7")]
    BadLabel(i64),
    #[error("argument lies on the lattice (pole)")]
    Pole,
    #[error("degenerate pair: z1 = +-z2 mod the lattice")]
    Degenerate,
}

const TERMS: usize = 48;

/// Real arithmetic-geometric mean of positive a, b.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    assert!(a > 0.0 && b > 0.0);
    for _ in 0..64 {
        let (a1, b1) = ((a + b) / 2.0, (a * b).sqrt());
        if (a1 - b1).abs() <= 4.0 * f64::EPSILON * a1 {
            return (a1 + b1) / 2.0;
        }
        a = a1;
        b = b1;
    }
    (a + b) / 2.0
}

/// Gamma function for x > 0 (Lanczos, g = 7, nine coefficients; relative
/// error well below 1e-13 on (0,1]).
pub fn gamma(x: f64) -> f64 {
    const C: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    assert!(x > 0.0);
    let mut a = C[0];
    for (i, &c) in C.iter().enumerate().skip(1) {
        a += c / (x - 1.0 + i as f64);
    }
    let t = x + 6.5;
    (2.0 * std::f64::consts::PI).sqrt() * t.powf(x - 0.5) * (-t).exp() * a
}

/// Omega_infinity of A as the Gamma-product
/// Gamma(1/7) Gamma(2/7) Gamma(4/7) / (2 pi sqrt(7)).
pub fn gamma_product_omega() -> f64 {
    gamma(1.0 / 7.0) * gamma(2.0 / 7.0) * gamma(4.0 / 7.0)
        / (2.0 * std::f64::consts::PI * 7f64.sqrt())
}

#[derive(Debug, Clone)]
pub struct LatticePeriods {
    pub m: i64,
    /// Real period (generator of the lattice's intersection with R).
    pub omega1: f64,
    pub omega2: Complex64,
    pub eta1: Complex64,
    pub eta2: Complex64,
    pub s2: Complex64,
    /// 1/A where A is the area constant of the lattice.
    pub inv_area_a: Complex64,
    /// Lattice covolume.
    pub covolume: f64,
    /// q = exp(i pi tau) with tau = omega2/omega1.
    q: Complex64,
}

/// Periods of A^(M) for positive squarefree M prime to 7.
pub fn lattice_invariants(m: i64) -> Result<LatticePeriods, PeriodError> {
    if m <= 0 || m % 7 == 0 || !crate::arith::is_squarefree(m) {
        return Err(PeriodError::BadLabel(m));
    }
    let mf = m as f64;
    let g2 = 105.0 * mf * mf / 12.0;
    let g3 = 1323.0 * mf * mf * mf / 216.0;
    // The single real root of 4x^3 - g2 x - g3, by bisection + Newton.
    let f = |x: f64| ((4.0 * x * x - g2) * x) - g3;
    let mut hi = 1.0f64.max(g2.abs()).max(g3.abs());
    let mut lo = -hi;
    for _ in 0..200 {
        let mid = (lo + hi) / 2.0;
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut e1 = (lo + hi) / 2.0;
    for _ in 0..4 {
        e1 -= f(e1) / (12.0 * e1 * e1 - g2);
    }
    // 4x^3 - g2 x - g3 = 4 (x - e1)(x^2 + e1 x + c) with a complex pair.
    let c = e1 * e1 - g2 / 4.0;
    let dist = (2.0 * e1 * e1 + c).sqrt(); // |e1 - e2|
    let cosm = 1.5 * e1 / dist;
    let omega1 = std::f64::consts::PI / (agm(1.0, ((1.0 + cosm) / 2.0).sqrt()) * dist.sqrt());

    let tau = Complex64::new(0.5, 7f64.sqrt() / 2.0);
    let omega2 = tau * omega1;
    let q = (Complex64::i() * std::f64::consts::PI * tau).exp();

    // eta1 from the E2-type series.
    let pi = std::f64::consts::PI;
    let mut sum = Complex64::new(0.0, 0.0);
    let q2 = q * q;
    let mut q2n = Complex64::new(1.0, 0.0);
    for n in 1..=TERMS {
        q2n *= q2;
        sum += n as f64 * q2n / (1.0 - q2n);
    }
    let eta1 = (pi * pi / omega1) * (Complex64::new(1.0 / 3.0, 0.0) - 8.0 * sum);

    let covolume = omega1 * omega1 * 7f64.sqrt() / 2.0;

    let mut lat = LatticePeriods {
        m,
        omega1,
        omega2,
        eta1,
        eta2: Complex64::new(0.0, 0.0),
        s2: Complex64::new(0.0, 0.0),
        inv_area_a: Complex64::new(0.0, 0.0),
        covolume,
        q,
    };
    // eta2 by the independent zeta-series route: eta2 = 2 zeta(omega2/2).
    lat.eta2 = 2.0 * lat.zeta_raw(omega2 / 2.0);
    // Solve eta_k = s2 omega_k + conj(omega_k)/A for (s2, 1/A).
    let w1 = Complex64::new(omega1, 0.0);
    let det = w1 * omega2.conj() - omega2 * w1.conj();
    lat.s2 = (lat.eta1 * omega2.conj() - lat.eta2 * w1.conj()) / det;
    lat.inv_area_a = (w1 * lat.eta2 - omega2 * lat.eta1) / det;
    Ok(lat)
}

impl LatticePeriods {
    /// Write z = a omega1 + b omega2 with real a, b.
    pub fn coordinates(&self, z: Complex64) -> (f64, f64) {
        let b = z.im / self.omega2.im;
        let a = (z.re - b * self.omega2.re) / self.omega1;
        (a, b)
    }

    /// Reduce z into the fundamental cell; returns (z_reduced, m, n) with
    /// z = z_reduced + m omega1 + n omega2.
    pub fn reduce(&self, z: Complex64) -> (Complex64, i64, i64) {
        let (a, b) = self.coordinates(z);
        let m = a.round();
        let n = b.round();
        let zr = z - m * self.omega1 - n * self.omega2;
        (zr, m as i64, n as i64)
    }

    pub fn is_lattice_point(&self, z: Complex64, tol: f64) -> bool {
        let (zr, _, _) = self.reduce(z);
        zr.norm() < tol
    }

    fn pole_guard(&self, z: Complex64) -> Result<Complex64, PeriodError> {
        let (zr, _, _) = self.reduce(z);
        if zr.norm() < 1e-9 * self.omega1 {
            Err(PeriodError::Pole)
        } else {
            Ok(zr)
        }
    }

    /// Weierstrass zeta without argument reduction (caller keeps z inside
    /// the convergence strip |Im(z/omega1)| < Im tau).
    fn zeta_raw(&self, z: Complex64) -> Complex64 {
        let pi = std::f64::consts::PI;
        let u = pi * z / self.omega1;
        let q2 = self.q * self.q;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut q2n = Complex64::new(1.0, 0.0);
        for n in 1..=TERMS {
            q2n *= q2;
            sum += q2n / (1.0 - q2n) * (2.0 * n as f64 * u).sin();
        }
        self.eta1 * z / self.omega1 + (pi / self.omega1) * (u.cos() / u.sin() + 4.0 * sum)
    }

    pub fn zeta(&self, z: Complex64) -> Result<Complex64, PeriodError> {
        self.pole_guard(z)?;
        let (zr, m, n) = self.reduce(z);
        Ok(self.zeta_raw(zr) + m as f64 * self.eta1 + n as f64 * self.eta2)
    }

    pub fn wp(&self, z: Complex64) -> Result<Complex64, PeriodError> {
        let zr = self.pole_guard(z)?;
        let pi = std::f64::consts::PI;
        let u = pi * zr / self.omega1;
        let q2 = self.q * self.q;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut q2n = Complex64::new(1.0, 0.0);
        for n in 1..=TERMS {
            q2n *= q2;
            sum += n as f64 * q2n / (1.0 - q2n) * (2.0 * n as f64 * u).cos();
        }
        let s = u.sin();
        Ok(-self.eta1 / self.omega1
            + (pi / self.omega1) * (pi / self.omega1) * (1.0 / (s * s) - 8.0 * sum))
    }

    pub fn wp_prime(&self, z: Complex64) -> Result<Complex64, PeriodError> {
        let zr = self.pole_guard(z)?;
        let pi = std::f64::consts::PI;
        let u = pi * zr / self.omega1;
        let q2 = self.q * self.q;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut q2n = Complex64::new(1.0, 0.0);
        for n in 1..=TERMS {
            q2n *= q2;
            sum += (n * n) as f64 * q2n / (1.0 - q2n) * (2.0 * n as f64 * u).sin();
        }
        let s = u.sin();
        let k = pi / self.omega1;
        Ok(k * k * k * (-2.0 * u.cos() / (s * s * s) + 16.0 * sum))
    }

    /// E1*(z) = zeta(z) - z s2 - conj(z)/A.
    pub fn e1star(&self, z: Complex64) -> Result<Complex64, PeriodError> {
        Ok(self.zeta(z)? - z * self.s2 - z.conj() * self.inv_area_a)
    }

    /// Curve coordinates of the class of z: x = wp + 1/4, y = (wp' - x)/2.
    pub fn curve_point(&self, z: Complex64) -> Result<(Complex64, Complex64), PeriodError> {
        let x = self.wp(z)? + 0.25;
        let y = (self.wp_prime(z)? - x) / 2.0;
        Ok((x, y))
    }
}

/// Residual of the addition identity
/// E1*(z1+z2) + E1*(z1-z2) - 2 E1*(z1) - wp'(z1)/(wp(z1) - wp(z2)).
pub fn e1star_addition_check(
    z1: Complex64,
    z2: Complex64,
    lat: &LatticePeriods,
) -> Result<f64, PeriodError> {
    if lat.is_lattice_point(z1 - z2, 1e-9 * lat.omega1)
        || lat.is_lattice_point(z1 + z2, 1e-9 * lat.omega1)
    {
        return Err(PeriodError::Degenerate);
    }
    let lhs = lat.e1star(z1 + z2)? + lat.e1star(z1 - z2)?;
    let rhs = 2.0 * lat.e1star(z1)? + lat.wp_prime(z1)? / (lat.wp(z1)? - lat.wp(z2)?);
    Ok((lhs - rhs).norm())
}
