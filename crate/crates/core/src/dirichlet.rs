//! Dirichlet characters stored as value tables modulo `q`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::arith::{factor, gcd, is_prime, kronecker, mod_pow};
use crate::error::{Error, Result};

type C = Complex64;

/// How a character was built; this is what configs and JSON records carry.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CharSpec {
    /// The trivial character mod `q`.
    Principal(u64),
    /// The Kronecker symbol `(d / .)` for a fundamental discriminant `d`.
    Kronecker(i64),
    /// `g^j -> exp(2 pi i j k / (p - 1))` for the least primitive root `g` mod an odd prime `p`.
    Prime { p: u64, k: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletCharacter {
    pub modulus: u64,
    pub values: Vec<C>,
}

impl DirichletCharacter {
    pub fn principal(q: u64) -> Self {
        let values = (0..q).map(|a| if gcd(a as i64, q as i64) == 1 { C::new(1.0, 0.0) } else { C::new(0.0, 0.0) }).collect();
        Self { modulus: q, values }
    }

    pub fn kronecker(d: i64) -> Self {
        let q = d.unsigned_abs();
        let values = (0..q).map(|a| C::new(if a == 0 { if q == 1 { 1.0 } else { 0.0 } } else { kronecker(d, a) as f64 }, 0.0)).collect();
        Self { modulus: q, values }
    }

    pub fn prime(p: u64, k: u64) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::Invalid(format!("prime character needs an odd prime modulus, got {p}")));
        }
        let g = primitive_root(p);
        let mut values = vec![C::new(0.0, 0.0); p as usize];
        let mut x = 1u64;
        for j in 0..p - 1 {
            let e = (j * k) % (p - 1);
            values[x as usize] = unit(e, p - 1);
            x = x * g % p;
        }
        Ok(Self { modulus: p, values })
    }

    pub fn from_spec(spec: &CharSpec) -> Result<Self> {
        match *spec {
            CharSpec::Principal(q) if q >= 1 => Ok(Self::principal(q)),
            CharSpec::Principal(_) => Err(Error::Invalid("modulus must be >= 1".into())),
            CharSpec::Kronecker(d) => {
                if d == 1 {
                    Ok(Self::principal(1))
                } else if crate::arith::is_fundamental_negative(d) || is_fundamental_positive(d) {
                    Ok(Self::kronecker(d))
                } else {
                    Err(Error::Invalid(format!("{d} is not a fundamental discriminant")))
                }
            }
            CharSpec::Prime { p, k } => Self::prime(p, k),
        }
    }

    pub fn eval(&self, n: u64) -> C {
        self.values[(n % self.modulus) as usize]
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().enumerate().all(|(a, v)| gcd(a as i64, self.modulus as i64) != 1 || (v - 1.0).norm() < 1e-12)
    }

    /// `0` for even characters, `1` for odd ones.
    pub fn parity(&self) -> u8 {
        if self.modulus <= 2 {
            return 0;
        }
        if (self.eval(self.modulus - 1) + 1.0).norm() < 1e-9 {
            1
        } else {
            0
        }
    }

    pub fn conj(&self) -> Self {
        Self { modulus: self.modulus, values: self.values.iter().map(|v| v.conj()).collect() }
    }

    /// Product character modulo `lcm` of the moduli.
    pub fn mul(&self, other: &Self) -> Self {
        let g = gcd(self.modulus as i64, other.modulus as i64) as u64;
        let q = self.modulus / g * other.modulus;
        let values = (0..q).map(|a| self.eval(a) * other.eval(a)).collect();
        Self { modulus: q, values }
    }

    pub fn pow(&self, k: u32) -> Self {
        Self { modulus: self.modulus, values: self.values.iter().map(|v| v.powu(k)).collect() }
    }

    /// Smallest `f | q` such that the character factors through `(Z/f)^*`.
    pub fn conductor(&self) -> u64 {
        let q = self.modulus;
        let mut divisors: Vec<u64> = (1..=q).filter(|f| q.is_multiple_of(*f)).collect();
        divisors.sort_unstable();
        for f in divisors {
            let ok = (1..q).filter(|&a| gcd(a as i64, q as i64) == 1).all(|a| {
                (1..q)
                    .filter(|&b| b % f == a % f && gcd(b as i64, q as i64) == 1)
                    .all(|b| (self.eval(a) - self.eval(b)).norm() < 1e-9)
            });
            if ok {
                return f;
            }
        }
        q
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus
    }

    pub fn gauss_sum(&self) -> C {
        let q = self.modulus as f64;
        (1..self.modulus).map(|a| self.eval(a) * C::from_polar(1.0, 2.0 * PI * a as f64 / q)).sum()
    }
}

fn unit(e: u64, m: u64) -> C {
    if e == 0 {
        return C::new(1.0, 0.0);
    }
    if 2 * e == m {
        return C::new(-1.0, 0.0);
    }
    if 4 * e == m {
        return C::new(0.0, 1.0);
    }
    if 4 * e == 3 * m {
        return C::new(0.0, -1.0);
    }
    C::from_polar(1.0, 2.0 * PI * e as f64 / m as f64)
}

fn is_fundamental_positive(d: i64) -> bool {
    if d <= 1 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => crate::arith::is_squarefree(d as u64),
        0 => {
            let q = d / 4;
            (q % 4 == 2 || q % 4 == 3) && crate::arith::is_squarefree(q as u64)
        }
        _ => false,
    }
}

fn primitive_root(p: u64) -> u64 {
    let fs = factor(p - 1);
    (2..p).find(|&g| fs.iter().all(|&(q, _)| mod_pow(g, (p - 1) / q, p) != 1)).expect("primitive root exists")
}
