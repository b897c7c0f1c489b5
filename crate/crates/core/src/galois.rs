//! Table-driven arithmetic over GF(p^w).
//!
//! An element is stored as the integer `sum c_i p^i` of its residue polynomial
//! coefficients, so for characteristic 2 the encoding is the usual bit vector and
//! addition is XOR. Exp/log tables over a generator of the multiplicative group are
//! built once at construction; every operation afterwards is a read-only lookup, so a
//! [`Field`] can be shared freely between threads.

use crate::error::{Error, Result};

/// A field element in coefficient-vector encoding, `0 <= value < q`.
pub type Elem = u16;

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 16;

/// GF(p^w) arithmetic context.
#[derive(Debug, Clone)]
pub struct Field {
    p: u32,
    w: u32,
    q: u32,
    modulus: Vec<u32>,
    generator: Elem,
    /// `exp[i] = g^i` for `i < 2(q-1)`.
    exp: Vec<Elem>,
    /// `log[a]` for nonzero `a`; `log[0]` is unused.
    log: Vec<u32>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.w == other.w && self.modulus == other.modulus
    }
}

impl Eq for Field {}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Remainder of `a` modulo monic `b` over GF(p); coefficients low to high.
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        if lead != 0 {
            for (i, &bc) in b.iter().enumerate() {
                let v = &mut r[shift + i];
                *v = (*v + p - (lead * bc) % p) % p;
            }
        }
        r.pop();
    }
    while r.last() == Some(&0) {
        r.pop();
    }
    r
}

impl Field {
    /// Builds GF(p^w) from a monic, irreducible modulus of degree `w`
    /// (coefficients little-endian, `modulus.len() == w + 1`).
    pub fn new(p: u32, w: u32, modulus: &[u32]) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if w == 0 {
            return Err(Error::InvalidModulus(
                "extension degree must be positive".into(),
            ));
        }
        let q = (p as u64).checked_pow(w).unwrap_or(u64::MAX);
        if q > MAX_ORDER {
            return Err(Error::FieldTooLarge(q));
        }
        if modulus.len() != w as usize + 1 {
            return Err(Error::InvalidModulus(format!(
                "expected {} coefficients, got {}",
                w + 1,
                modulus.len()
            )));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidModulus(
                "coefficient not reduced mod p".into(),
            ));
        }
        if modulus[w as usize] != 1 {
            return Err(Error::InvalidModulus("modulus is not monic".into()));
        }
        if let Some(factor) = find_factor(modulus, p) {
            return Err(Error::ReducibleModulus { factor });
        }

        let q = q as u32;
        let mut field = Field {
            p,
            w,
            q,
            modulus: modulus.to_vec(),
            generator: 0,
            exp: Vec::new(),
            log: Vec::new(),
        };
        field.build_tables();
        Ok(field)
    }

    /// GF(2^w) with a conventional primitive modulus, for `2 <= w <= 8`.
    pub fn binary(w: u32) -> Result<Self> {
        let bits: u32 = match w {
            2 => 0b111,
            3 => 0b1011,
            4 => 0b1_0011,
            5 => 0b10_0101,
            6 => 0b100_0011,
            7 => 0b1000_1001,
            8 => 0b1_0001_1101,
            _ => {
                return Err(Error::InvalidParams(format!(
                    "no default modulus for GF(2^{w})"
                )))
            }
        };
        let coeffs: Vec<u32> = (0..=w).map(|i| (bits >> i) & 1).collect();
        Self::new(2, w, &coeffs)
    }

    fn build_tables(&mut self) {
        let order = self.q - 1;
        let mut generator = None;
        for cand in 1..self.q {
            // Order of cand equals q-1 iff its powers first return to 1 at step q-1.
            let mut acc: Elem = cand as Elem;
            let mut k = 1;
            while acc != 1 {
                acc = self.mul_slow(acc, cand as Elem);
                k += 1;
            }
            if k == order {
                generator = Some(cand as Elem);
                break;
            }
        }
        let g = generator.expect("multiplicative group of a field is cyclic");
        let mut exp = vec![0 as Elem; 2 * order as usize];
        let mut log = vec![0u32; self.q as usize];
        let mut acc: Elem = 1;
        for i in 0..order {
            exp[i as usize] = acc;
            exp[(i + order) as usize] = acc;
            log[acc as usize] = i;
            acc = self.mul_slow(acc, g);
        }
        self.generator = g;
        self.exp = exp;
        self.log = log;
    }

    fn digits(&self, mut a: u32) -> Vec<u32> {
        let mut d = Vec::with_capacity(self.w as usize);
        for _ in 0..self.w {
            d.push(a % self.p);
            a /= self.p;
        }
        d
    }

    fn pack_digits(&self, d: &[u32]) -> Elem {
        d.iter().rev().fold(0u32, |acc, &c| acc * self.p + c) as Elem
    }

    /// Schoolbook multiplication modulo the field polynomial; used to seed the tables.
    fn mul_slow(&self, a: Elem, b: Elem) -> Elem {
        let da = self.digits(a as u32);
        let db = self.digits(b as u32);
        let mut prod = vec![0u32; da.len() + db.len()];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        let mut r = poly_rem(&prod, &self.modulus, self.p);
        r.resize(self.w as usize, 0);
        self.pack_digits(&r)
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.w
    }

    /// Field order `q = p^w`.
    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// The generator of the multiplicative group used for the tables.
    pub fn generator(&self) -> Elem {
        self.generator
    }

    /// Whether `a` is a valid element encoding.
    pub fn contains(&self, a: u32) -> bool {
        a < self.q
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.p == 2 {
            a ^ b
        } else {
            self.digitwise(a, b, |x, y| x + y)
        }
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        if self.p == 2 {
            a ^ b
        } else {
            let p = self.p;
            self.digitwise(a, b, move |x, y| x + p - y)
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.sub(0, a)
    }

    fn digitwise(&self, a: Elem, b: Elem, f: impl Fn(u32, u32) -> u32) -> Elem {
        let (mut a, mut b) = (a as u32, b as u32);
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.w {
            out += (f(a % self.p, b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out as Elem
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
        }
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        let order = self.q - 1;
        Ok(self.exp[((order - self.log[a as usize]) % order) as usize])
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e`; negative exponents go through the inverse.
    pub fn pow(&self, a: Elem, e: i64) -> Result<Elem> {
        if a == 0 {
            return match e {
                0 => Ok(1),
                e if e > 0 => Ok(0),
                _ => Err(Error::DivisionByZero),
            };
        }
        let order = (self.q - 1) as i64;
        let l = (self.log[a as usize] as i64 * e.rem_euclid(order)).rem_euclid(order);
        Ok(self.exp[l as usize])
    }

    /// `g^e` for the table generator `g`.
    pub fn exp(&self, e: i64) -> Elem {
        self.exp[e.rem_euclid((self.q - 1) as i64) as usize]
    }

    /// Discrete log base the table generator; `None` for zero.
    pub fn log(&self, a: Elem) -> Option<u32> {
        (a != 0).then(|| self.log[a as usize])
    }

    /// Multiplicative order of a nonzero element.
    pub fn element_order(&self, a: Elem) -> Option<u32> {
        let l = self.log(a)?;
        let order = self.q - 1;
        Some(order / gcd(order, l))
    }

    /// An element of multiplicative order exactly `n`, namely `g^((q-1)/n)`.
    pub fn element_of_order(&self, n: u32) -> Result<Elem> {
        let order = self.q - 1;
        if n == 0 || !order.is_multiple_of(n) {
            return Err(Error::InvalidParams(format!(
                "{n} does not divide q-1 = {order}"
            )));
        }
        Ok(self.exp[(order / n) as usize])
    }

    /// The integer `m` reduced into the prime subfield.
    pub fn from_int(&self, m: u64) -> Elem {
        (m % self.p as u64) as Elem
    }
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
fn find_factor(modulus: &[u32], p: u32) -> Option<Vec<u32>> {
    let deg = modulus.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for idx in 0..count {
            let mut cand = Vec::with_capacity(d + 1);
            let mut x = idx;
            for _ in 0..d {
                cand.push((x % p as u64) as u32);
                x /= p as u64;
            }
            cand.push(1);
            if poly_rem(modulus, &cand, p).is_empty() {
                return Some(cand);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf8() -> Field {
        Field::new(2, 3, &[1, 1, 0, 1]).unwrap()
    }

    #[test]
    fn rejects_reducible_modulus() {
        // x^3 + 1 = (x + 1)(x^2 + x + 1)
        match Field::new(2, 3, &[1, 0, 0, 1]) {
            Err(Error::ReducibleModulus { factor }) => assert_eq!(factor, vec![1, 1]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            Field::new(4, 2, &[1, 1, 1]),
            Err(Error::NotPrime(4))
        ));
        assert!(matches!(
            Field::new(2, 3, &[1, 1, 0, 0]),
            Err(Error::InvalidModulus(_))
        ));
        assert!(matches!(
            Field::new(2, 17, &[1; 18]),
            Err(Error::FieldTooLarge(_))
        ));
    }

    #[test]
    fn irreducibility_matches_root_oracle() {
        // Degree 2 and 3 polynomials are irreducible iff they have no root in GF(p).
        for p in [2u32, 3, 5] {
            for w in [2u32, 3] {
                let count = p.pow(w);
                for idx in 0..count {
                    let mut m: Vec<u32> = (0..w).map(|i| (idx / p.pow(i)) % p).collect();
                    m.push(1);
                    let has_root =
                        (0..p).any(|x| m.iter().rev().fold(0u32, |acc, &c| (acc * x + c) % p) == 0);
                    assert_eq!(find_factor(&m, p).is_some(), has_root, "p={p} m={m:?}");
                }
            }
        }
    }

    #[test]
    fn gf8_alpha_cubed() {
        let f = gf8();
        // x * x^2 = x^3 = x + 1
        assert_eq!(f.mul(0b010, 0b100), 0b011);
        assert_eq!(f.mul_slow(0b010, 0b100), 0b011);
    }

    #[test]
    fn group_axioms_exhaustive() {
        for f in [
            gf8(),
            Field::binary(4).unwrap(),
            Field::new(3, 2, &[2, 2, 1]).unwrap(),
        ] {
            let q = f.order() as Elem;
            for a in 1..q {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                assert_eq!(f.pow(a, (q - 1) as i64).unwrap(), 1);
                assert_eq!(f.pow(a, -1).unwrap(), f.inv(a).unwrap());
                assert_eq!(f.add(a, f.neg(a)), 0);
                for b in 0..q {
                    assert_eq!(f.mul(a, b), f.mul_slow(a, b));
                    assert_eq!(f.sub(f.add(a, b), b), a);
                }
            }
        }
    }

    #[test]
    fn tables_are_inverse() {
        let f = Field::binary(8).unwrap();
        for a in 1..256u16 {
            assert_eq!(f.exp(f.log(a).unwrap() as i64), a);
        }
        for i in 0..255 {
            assert_eq!(f.log(f.exp(i)).unwrap() as i64, i);
        }
    }

    #[test]
    fn char2_self_inverse_addition() {
        let f = Field::binary(5).unwrap();
        for a in 0..32 {
            assert_eq!(f.add(a, a), 0);
        }
    }

    #[test]
    fn inv_zero_is_error() {
        assert!(matches!(gf8().inv(0), Err(Error::DivisionByZero)));
        assert!(matches!(gf8().pow(0, -2), Err(Error::DivisionByZero)));
    }

    #[test]
    fn element_of_order_by_direct_powering() {
        let f16 = Field::binary(4).unwrap();
        let a = f16.element_of_order(5).unwrap();
        assert_eq!(a, f16.pow(f16.generator(), 3).unwrap());
        let mut seen = std::collections::HashSet::new();
        let mut x = 1;
        for _ in 0..5 {
            assert!(seen.insert(x));
            x = f16.mul(x, a);
        }
        assert_eq!(x, 1);
        assert!(f16.element_of_order(7).is_err());

        let f8 = gf8();
        let a = f8.element_of_order(7).unwrap();
        assert_eq!(f8.element_order(a), Some(7));
    }
}
