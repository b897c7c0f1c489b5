//! Reed-Solomon codes given by cyclic intervals of root powers.
//!
//! All codes of length `n` share a [`Domain`]: a field, an element `alpha` of order
//! `n`, and the evaluation points `alpha^0, ..., alpha^(n-1)`. With these points the
//! root form `c(alpha^-i) = 0 for i in roots` and the evaluation form
//! `c_j = sum_l U_l alpha^(j(a+l))` describe the same code, and the scaled
//! evaluation `n^-1 c(alpha^-i)` (the spectrum) returns the information symbol
//! sitting on power `i`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::galois::{Elem, Field};
use crate::linalg::{Matrix, Solution};

/// The set `{a, a+1, ..., a+len-1}` of residues modulo `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CyclicInterval {
    start: usize,
    len: usize,
    modulus: usize,
}

impl CyclicInterval {
    /// `[a:b]_n`: start `a mod n`, length `((b - a) mod n) + 1`.
    pub fn new(a: i64, b: i64, n: usize) -> Self {
        assert!(n >= 1, "modulus must be positive");
        let m = n as i64;
        CyclicInterval {
            start: a.rem_euclid(m) as usize,
            len: (b - a).rem_euclid(m) as usize + 1,
            modulus: n,
        }
    }

    /// Interval of `len` residues starting at `a mod n`; `len` may be `0` or `n`.
    pub fn with_len(a: i64, len: usize, n: usize) -> Self {
        assert!(
            n >= 1 && len <= n,
            "interval length {len} exceeds modulus {n}"
        );
        CyclicInterval {
            start: a.rem_euclid(n as i64) as usize,
            len,
            modulus: n,
        }
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).map(move |l| (self.start + l) % self.modulus)
    }

    /// Offset of residue `i` inside the interval.
    pub fn position(&self, i: i64) -> Option<usize> {
        let off = (i - self.start as i64).rem_euclid(self.modulus as i64) as usize;
        (off < self.len).then_some(off)
    }

    pub fn contains(&self, i: i64) -> bool {
        self.position(i).is_some()
    }

    pub fn complement(&self) -> CyclicInterval {
        CyclicInterval {
            start: (self.start + self.len) % self.modulus,
            len: self.modulus - self.len,
            modulus: self.modulus,
        }
    }

    /// Whether every member of `other` is a member of `self`.
    pub fn contains_interval(&self, other: &CyclicInterval) -> bool {
        other.members().all(|i| self.contains(i as i64))
    }
}

impl std::fmt::Display for CyclicInterval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.len == 0 {
            write!(f, "[]_{}", self.modulus)
        } else {
            write!(
                f,
                "[{}:{}]_{}",
                self.start,
                (self.start + self.len - 1) % self.modulus,
                self.modulus
            )
        }
    }
}

/// A field with an element `alpha` of order `n`; shared by all length-`n` codes.
#[derive(Debug, Clone)]
pub struct Domain {
    field: Arc<Field>,
    n: usize,
    alpha: Elem,
    powers: Vec<Elem>,
    n_inv: Elem,
}

impl Domain {
    /// Uses `g^((q-1)/n)` as `alpha`.
    pub fn new(field: Arc<Field>, n: usize) -> Result<Self> {
        let alpha = field.element_of_order(n as u32)?;
        Self::with_alpha(field, n, alpha)
    }

    pub fn with_alpha(field: Arc<Field>, n: usize, alpha: Elem) -> Result<Self> {
        if field.element_order(alpha) != Some(n as u32) {
            return Err(Error::InvalidParams(format!(
                "alpha = {alpha} does not have order {n}"
            )));
        }
        let n_mod_p = field.from_int(n as u64);
        if n_mod_p == 0 {
            return Err(Error::InvalidParams(format!(
                "n = {n} is divisible by the characteristic"
            )));
        }
        let n_inv = field.inv(n_mod_p)?;
        let mut powers = Vec::with_capacity(n);
        let mut x = 1;
        for _ in 0..n {
            powers.push(x);
            x = field.mul(x, alpha);
        }
        Ok(Domain {
            field,
            n,
            alpha,
            powers,
            n_inv,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn field_arc(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> Elem {
        self.alpha
    }

    /// `alpha^e` for any integer `e`.
    #[inline]
    pub fn alpha_pow(&self, e: i64) -> Elem {
        self.powers[e.rem_euclid(self.n as i64) as usize]
    }

    /// `n^-1 c(alpha^-i)` where `c(x) = sum_j word[j] x^j`.
    pub fn spectrum(&self, word: &[Elem], i: i64) -> Elem {
        let f = &*self.field;
        let n = self.n as i64;
        let step = (-i).rem_euclid(n) as usize;
        let mut e = 0usize;
        let mut acc = 0;
        for &c in word {
            if c != 0 {
                acc = f.add(acc, f.mul(c, self.powers[e]));
            }
            e += step;
            if e >= self.n {
                e -= self.n;
            }
        }
        f.mul(acc, self.n_inv)
    }

    /// The spectrum at every power `0..n`.
    pub fn spectrum_all(&self, word: &[Elem]) -> Vec<Elem> {
        (0..self.n as i64).map(|i| self.spectrum(word, i)).collect()
    }

    /// Inverse of [`Domain::spectrum_all`]: `c_j = sum_i S_i alpha^(ij)`.
    pub fn word_from_spectrum(&self, spectrum: &[Elem]) -> Vec<Elem> {
        assert_eq!(spectrum.len(), self.n);
        let f = &*self.field;
        (0..self.n)
            .map(|j| {
                spectrum.iter().enumerate().fold(0, |acc, (i, &s)| {
                    f.add(acc, f.mul(s, self.powers[(i * j) % self.n]))
                })
            })
            .collect()
    }

    /// Adds `coef * (alpha^(j*power))_j` to `word`.
    pub fn add_monomial(&self, word: &mut [Elem], power: usize, coef: Elem) {
        if coef == 0 {
            return;
        }
        let f = &*self.field;
        let mut e = 0usize;
        for c in word.iter_mut() {
            *c = f.add(*c, f.mul(coef, self.powers[e]));
            e = (e + power) % self.n;
        }
    }
}

/// `RS([roots])`, equivalently `RS-bar([support])` with `support = complement(roots)`.
#[derive(Debug, Clone)]
pub struct RsCode {
    domain: Arc<Domain>,
    roots: CyclicInterval,
}

impl RsCode {
    pub fn from_roots(domain: Arc<Domain>, roots: CyclicInterval) -> Self {
        assert_eq!(roots.modulus(), domain.n(), "interval modulus must equal n");
        RsCode { domain, roots }
    }

    /// The complement notation: the code whose spectrum lives on `support`.
    pub fn from_support(domain: Arc<Domain>, support: CyclicInterval) -> Self {
        Self::from_roots(domain, support.complement())
    }

    pub fn domain(&self) -> &Arc<Domain> {
        &self.domain
    }

    pub fn roots(&self) -> CyclicInterval {
        self.roots
    }

    pub fn support(&self) -> CyclicInterval {
        self.roots.complement()
    }

    pub fn length(&self) -> usize {
        self.domain.n()
    }

    pub fn dimension(&self) -> usize {
        self.domain.n() - self.roots.len()
    }

    pub fn redundancy(&self) -> usize {
        self.roots.len()
    }

    pub fn min_distance(&self) -> usize {
        self.redundancy() + 1
    }

    /// `prod_{i in roots} (x - alpha^-i)`, coefficients low to high.
    pub fn generator_polynomial(&self) -> Vec<Elem> {
        let f = self.domain.field();
        let mut g = vec![1 as Elem];
        for i in self.roots.members() {
            let root = self.domain.alpha_pow(-(i as i64));
            let mut next = vec![0; g.len() + 1];
            for (d, &c) in g.iter().enumerate() {
                next[d + 1] = f.add(next[d + 1], c);
                next[d] = f.sub(next[d], f.mul(c, root));
            }
            g = next;
        }
        g
    }

    /// `l x n` matrix with entry `(l, j) = alpha^(j(a+l))`, `a` the support start.
    pub fn generator_matrix(&self) -> Matrix {
        eval_generator_matrix(&self.domain, self.support())
    }

    /// Evaluates `x^a U(x)` at the domain points.
    pub fn encode(&self, info: &[Elem]) -> Result<Vec<Elem>> {
        let support = self.support();
        if info.len() != support.len() {
            return Err(Error::LengthMismatch {
                expected: support.len(),
                actual: info.len(),
            });
        }
        let mut word = vec![0; self.domain.n()];
        for (l, &u) in info.iter().enumerate() {
            self.domain
                .add_monomial(&mut word, (support.start() + l) % self.domain.n(), u);
        }
        Ok(word)
    }

    /// Reverse map `U_l = n^-1 c(alpha^-(a+l))`.
    pub fn info_from_word(&self, word: &[Elem]) -> Vec<Elem> {
        self.support()
            .members()
            .map(|i| self.domain.spectrum(word, i as i64))
            .collect()
    }

    pub fn is_codeword(&self, word: &[Elem]) -> bool {
        word.len() == self.domain.n()
            && self
                .roots
                .members()
                .all(|i| self.domain.spectrum(word, i as i64) == 0)
    }

    /// Erasure decoding; returns the information symbols of the unique consistent codeword.
    ///
    /// Solves for the spectral coefficients from the first `l` surviving positions and
    /// re-encodes to check every other surviving position.
    pub fn decode_erasures_info(&self, word: &[Elem], erased: &[bool]) -> Result<Vec<Elem>> {
        let n = self.domain.n();
        if word.len() != n || erased.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: word.len().min(erased.len()),
            });
        }
        let e = erased.iter().filter(|&&x| x).count();
        if e > self.redundancy() {
            return Err(Error::CapabilityExceeded {
                erasures: e,
                capability: self.redundancy(),
            });
        }
        let dim = self.dimension();
        let support = self.support();
        let known: Vec<usize> = (0..n).filter(|&j| !erased[j]).take(dim).collect();
        let mut a = Matrix::zeros(dim, dim);
        for (r, &j) in known.iter().enumerate() {
            for l in 0..dim {
                a.set(
                    r,
                    l,
                    self.domain.alpha_pow((j * (support.start() + l)) as i64),
                );
            }
        }
        let rhs: Vec<Elem> = known.iter().map(|&j| word[j]).collect();
        let info = match a.solve(self.domain.field(), &rhs) {
            Solution::Unique(x) => x,
            _ => unreachable!("scaled Vandermonde on distinct points is invertible"),
        };
        let recon = self.encode(&info)?;
        if (0..n).any(|j| !erased[j] && recon[j] != word[j]) {
            return Err(Error::DecodeFailure);
        }
        Ok(info)
    }

    /// Erasure decoding; returns the full corrected word.
    pub fn decode_erasures(&self, word: &[Elem], erased: &[bool]) -> Result<Vec<Elem>> {
        let info = self.decode_erasures_info(word, erased)?;
        self.encode(&info)
    }
}

/// Evaluation-form generator matrix of `RS-bar(support)`.
pub fn eval_generator_matrix(domain: &Domain, support: CyclicInterval) -> Matrix {
    let n = domain.n();
    let mut m = Matrix::zeros(support.len(), n);
    for (l, power) in support.members().enumerate() {
        for j in 0..n {
            m.set(l, j, domain.alpha_pow((j * power) as i64));
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::weight;

    fn domain(w: u32, n: usize) -> Arc<Domain> {
        Arc::new(Domain::new(Arc::new(Field::binary(w).unwrap()), n).unwrap())
    }

    #[test]
    fn interval_wraps() {
        let i = CyclicInterval::new(5, 9, 7);
        assert_eq!(i.members().collect::<Vec<_>>(), vec![5, 6, 0, 1, 2]);
        assert_eq!(i, CyclicInterval::new(5, 2, 7));
        assert_eq!(i.complement().members().collect::<Vec<_>>(), vec![3, 4]);
        assert_eq!(CyclicInterval::new(0, 9, 10).len(), 10);
        assert_eq!(
            CyclicInterval::new(3, 3, 10).members().collect::<Vec<_>>(),
            vec![3]
        );
        assert_eq!(i.to_string(), "[5:2]_7");
    }

    #[test]
    fn generator_polynomials() {
        let d = domain(3, 7);
        let f = d.field();
        let g = RsCode::from_roots(d.clone(), CyclicInterval::new(0, 0, 7)).generator_polynomial();
        assert_eq!(g, vec![f.neg(1), 1]);
        let g = RsCode::from_roots(d.clone(), CyclicInterval::new(0, 1, 7)).generator_polynomial();
        let a_inv = d.alpha_pow(-1);
        // (x - 1)(x - a^-1) = x^2 - (1 + a^-1) x + a^-1
        assert_eq!(g, vec![a_inv, f.neg(f.add(1, a_inv)), 1]);
    }

    #[test]
    fn generator_polynomial_weight_and_membership() {
        for (w, n) in [(3, 7), (4, 15), (4, 5), (5, 31)] {
            let d = domain(w, n);
            for s in 0..n {
                for r in 1..n {
                    let code =
                        RsCode::from_roots(d.clone(), CyclicInterval::with_len(s as i64, r, n));
                    let mut g = code.generator_polynomial();
                    assert_eq!(weight(&g), r + 1, "n={n} s={s} r={r}");
                    g.resize(n, 0);
                    assert!(code.is_codeword(&g));
                }
            }
        }
    }

    #[test]
    fn evaluation_matrix_shapes() {
        let d = domain(3, 7);
        let f = d.field();
        let full = eval_generator_matrix(&d, CyclicInterval::with_len(0, 7, 7));
        assert_eq!(full.rank(f), 7);
        let ones = eval_generator_matrix(&d, CyclicInterval::with_len(0, 1, 7));
        assert!(ones.row(0).iter().all(|&x| x == 1));

        let code = RsCode::from_support(d.clone(), CyclicInterval::with_len(2, 2, 7));
        let g = code.generator_matrix();
        for l in 0..2 {
            for i in [4, 5, 6, 0, 1] {
                // direct polynomial evaluation at alpha^-i
                let x = d.alpha_pow(-i);
                let val = g
                    .row(l)
                    .iter()
                    .rev()
                    .fold(0, |acc, &c| f.add(f.mul(acc, x), c));
                assert_eq!(val, 0);
            }
        }
    }

    #[test]
    fn spectrum_orthogonality() {
        let d = domain(4, 15);
        let support = CyclicInterval::with_len(3, 5, 15);
        let g = eval_generator_matrix(&d, support);
        for l in 0..5 {
            for i in 0..15i64 {
                let expected = if i == 3 + l as i64 { 1 } else { 0 };
                assert_eq!(d.spectrum(g.row(l), i), expected);
            }
        }
        assert_eq!(d.spectrum(&[0; 15], 4), 0);
        let word = g.row(2).to_vec();
        assert_eq!(d.word_from_spectrum(&d.spectrum_all(&word)), word);
    }

    #[test]
    fn erasure_decode_exhaustive_n7() {
        let d = domain(3, 7);
        let code = RsCode::from_support(d.clone(), CyclicInterval::with_len(0, 3, 7));
        let info = vec![3, 0, 6];
        let word = code.encode(&info).unwrap();
        assert_eq!(code.decode_erasures(&word, &[false; 7]).unwrap(), word);
        for mask in 0u32..128 {
            if mask.count_ones() != 4 {
                continue;
            }
            let erased: Vec<bool> = (0..7).map(|j| mask >> j & 1 == 1).collect();
            let mut rx = word.clone();
            for j in 0..7 {
                if erased[j] {
                    rx[j] = 5;
                }
            }
            assert_eq!(code.decode_erasures(&rx, &erased).unwrap(), word);
            assert_eq!(code.decode_erasures_info(&rx, &erased).unwrap(), info);
        }
        let erased = [true, true, true, true, true, false, false];
        assert!(matches!(
            code.decode_erasures(&word, &erased),
            Err(Error::CapabilityExceeded {
                erasures: 5,
                capability: 4
            })
        ));
    }

    #[test]
    fn erasure_decode_detects_inconsistency() {
        let d = domain(3, 7);
        let code = RsCode::from_support(d, CyclicInterval::with_len(0, 3, 7));
        let mut word = code.encode(&[1, 2, 3]).unwrap();
        word[6] ^= 1;
        let mut erased = [false; 7];
        erased[0] = true;
        assert!(matches!(
            code.decode_erasures(&word, &erased),
            Err(Error::DecodeFailure)
        ));
    }

    #[test]
    fn rejects_wrong_alpha_order() {
        let f = Arc::new(Field::binary(4).unwrap());
        let a = f.element_of_order(5).unwrap();
        assert!(Domain::with_alpha(f.clone(), 15, a).is_err());
        assert!(Domain::with_alpha(f, 5, a).is_ok());
    }
}
