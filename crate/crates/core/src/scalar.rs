//! Exact coefficient fields: Gaussian rationals and cyclotomic numbers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt::Debug;

/// Field operations needed by the series engine.
pub trait Scalar: Clone + PartialEq + Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Option<Self>;
    fn from_rat(r: BigRational) -> Self;
    /// Canonical text form used by the series serializer.
    fn to_text(&self) -> String;
    fn parse_text(s: &str) -> Option<Self>;

    fn from_i64(v: i64) -> Self {
        Self::from_rat(BigRational::from_integer(BigInt::from(v)))
    }
    fn scale_rat(&self, r: &BigRational) -> Self {
        self.mul(&Self::from_rat(r.clone()))
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn rat_text(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn parse_rat(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

/// a + b i with a, b rational.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }
    pub fn i() -> Self {
        GaussRat { re: BigRational::zero(), im: BigRational::one() }
    }
    pub fn real(&self) -> Option<&BigRational> {
        if self.im.is_zero() {
            Some(&self.re)
        } else {
            None
        }
    }
}

impl Scalar for GaussRat {
    fn zero() -> Self {
        GaussRat { re: BigRational::zero(), im: BigRational::zero() }
    }
    fn one() -> Self {
        GaussRat { re: BigRational::one(), im: BigRational::zero() }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        GaussRat { re: &self.re + &o.re, im: &self.im + &o.im }
    }
    fn sub(&self, o: &Self) -> Self {
        GaussRat { re: &self.re - &o.re, im: &self.im - &o.im }
    }
    fn mul(&self, o: &Self) -> Self {
        if self.im.is_zero() && o.im.is_zero() {
            return GaussRat { re: &self.re * &o.re, im: BigRational::zero() };
        }
        GaussRat {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
    fn neg(&self) -> Self {
        GaussRat { re: -&self.re, im: -&self.im }
    }
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = &self.re * &self.re + &self.im * &self.im;
        Some(GaussRat { re: &self.re / &n, im: -&self.im / &n })
    }
    fn from_rat(r: BigRational) -> Self {
        GaussRat { re: r, im: BigRational::zero() }
    }
    fn to_text(&self) -> String {
        if self.im.is_zero() {
            rat_text(&self.re)
        } else {
            let sign = if self.im.is_negative() { "-" } else { "+" };
            format!("{}{}{} i", rat_text(&self.re), sign, rat_text(&self.im.abs()))
        }
    }
    fn parse_text(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some(body) = s.strip_suffix(" i").or_else(|| s.strip_suffix('i')) {
            // split at the sign that starts the imaginary part (never position 0)
            let idx = body
                .char_indices()
                .skip(1)
                .filter(|(_, c)| *c == '+' || *c == '-')
                .map(|(i, _)| i)
                .last()?;
            let re = parse_rat(&body[..idx])?;
            let im_txt = &body[idx..];
            let im = if let Some(rest) = im_txt.strip_prefix('+') {
                parse_rat(rest)?
            } else {
                -parse_rat(&im_txt[1..])?
            };
            Some(GaussRat { re, im })
        } else {
            Some(GaussRat::from_rat(parse_rat(s)?))
        }
    }
}

// ---------------------------------------------------------------------------
// dense rational polynomials, used for cyclotomic fields

type RPoly = Vec<BigRational>;

fn ptrim(mut p: RPoly) -> RPoly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn pmul(a: &RPoly, b: &RPoly) -> RPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    ptrim(out)
}

fn psub(a: &RPoly, b: &RPoly) -> RPoly {
    let n = a.len().max(b.len());
    let mut out = vec![BigRational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    ptrim(out)
}

/// (quotient, remainder)
fn pdivrem(a: &RPoly, b: &RPoly) -> (RPoly, RPoly) {
    let b = ptrim(b.clone());
    let mut r = ptrim(a.clone());
    if r.len() < b.len() {
        return (vec![], r);
    }
    let lead = b.last().expect("division by zero polynomial").clone();
    let mut q = vec![BigRational::zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let c = r.last().unwrap() / &lead;
        for (i, y) in b.iter().enumerate() {
            r[shift + i] -= &c * y;
        }
        q[shift] = c;
        r = ptrim(r);
    }
    (ptrim(q), r)
}

fn cyclotomic_poly_uncached(n: u32) -> RPoly {
    // x^n - 1 divided by Phi_d for proper divisors d
    let mut p = vec![BigRational::zero(); n as usize + 1];
    p[0] = -BigRational::one();
    p[n as usize] = BigRational::one();
    for d in 1..n {
        if n.is_multiple_of(d) {
            p = pdivrem(&p, &cyclotomic_poly(d)).0;
        }
    }
    p
}

thread_local! {
    static PHI: RefCell<HashMap<u32, RPoly>> = RefCell::new(HashMap::new());
}

/// The n-th cyclotomic polynomial, lowest degree first.
pub fn cyclotomic_poly(n: u32) -> RPoly {
    if let Some(p) = PHI.with(|m| m.borrow().get(&n).cloned()) {
        return p;
    }
    let p = cyclotomic_poly_uncached(n);
    PHI.with(|m| m.borrow_mut().insert(n, p.clone()));
    p
}

/// Element of Q(ζ_n), stored as a polynomial in ζ reduced modulo Φ_n.
/// Rationals are stored with n = 1 and mix freely with any n.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Cyclotomic {
    n: u32,
    c: RPoly,
}

impl Cyclotomic {
    /// ζ_n^k
    pub fn root_power(n: u32, k: i64) -> Self {
        assert!(n >= 1);
        let e = k.rem_euclid(n as i64) as usize;
        let mut c = vec![BigRational::zero(); e + 1];
        c[e] = BigRational::one();
        Self::reduce(n, c)
    }

    fn reduce(n: u32, c: RPoly) -> Self {
        if n == 1 {
            // ζ_1 = 1
            let s = c.iter().fold(BigRational::zero(), |acc, x| acc + x);
            return Self::rational(s);
        }
        let r = pdivrem(&c, &cyclotomic_poly(n)).1;
        Cyclotomic { n, c: r }.normalize()
    }

    fn rational(r: BigRational) -> Self {
        Cyclotomic { n: 1, c: ptrim(vec![r]) }
    }

    fn normalize(self) -> Self {
        let c = ptrim(self.c);
        if c.len() <= 1 {
            Cyclotomic { n: 1, c }
        } else {
            Cyclotomic { n: self.n, c }
        }
    }

    pub fn order(&self) -> u32 {
        self.n
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.c
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        match self.c.len() {
            0 => Some(BigRational::zero()),
            1 => Some(self.c[0].clone()),
            _ => None,
        }
    }

    /// Exact conversion when the value lies in Q(i).
    pub fn to_gauss(&self) -> Option<GaussRat> {
        if let Some(r) = self.to_rational() {
            return Some(GaussRat::from_rat(r));
        }
        if self.n == 4 && self.c.len() == 2 {
            return Some(GaussRat::new(self.c[0].clone(), self.c[1].clone()));
        }
        None
    }

    fn common(&self, o: &Self) -> u32 {
        match (self.n, o.n) {
            (1, m) | (m, 1) => m,
            (a, b) if a == b => a,
            (a, b) => panic!("cyclotomic fields of different order mixed: {a} vs {b}"),
        }
    }
}

impl Scalar for Cyclotomic {
    fn zero() -> Self {
        Cyclotomic { n: 1, c: vec![] }
    }
    fn one() -> Self {
        Self::rational(BigRational::one())
    }
    fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        let n = self.common(o);
        let mut c = self.c.clone();
        if c.len() < o.c.len() {
            c.resize(o.c.len(), BigRational::zero());
        }
        for (i, y) in o.c.iter().enumerate() {
            c[i] += y;
        }
        Cyclotomic { n, c }.normalize()
    }
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    fn mul(&self, o: &Self) -> Self {
        let n = self.common(o);
        if self.c.len() <= 1 || o.c.len() <= 1 {
            return Cyclotomic { n, c: pmul(&self.c, &o.c) }.normalize();
        }
        Self::reduce(n, pmul(&self.c, &o.c))
    }
    fn neg(&self) -> Self {
        Cyclotomic { n: self.n, c: self.c.iter().map(|x| -x).collect() }
    }
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if let Some(r) = self.to_rational() {
            return Some(Self::rational(r.recip()));
        }
        // extended Euclid: s*a + t*phi = g (constant)
        let phi = cyclotomic_poly(self.n);
        let (mut r0, mut r1) = (phi, self.c.clone());
        let (mut s0, mut s1): (RPoly, RPoly) = (vec![], vec![BigRational::one()]);
        while r1.len() > 1 {
            let (q, r) = pdivrem(&r0, &r1);
            let s = psub(&s0, &pmul(&q, &s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        let g = r1.first()?.clone();
        let s: RPoly = s1.iter().map(|x| x / &g).collect();
        Some(Self::reduce(self.n, s))
    }
    fn from_rat(r: BigRational) -> Self {
        Self::rational(r)
    }
    fn to_text(&self) -> String {
        match self.to_rational() {
            Some(r) => rat_text(&r),
            None => {
                let parts: Vec<String> = self.c.iter().map(rat_text).collect();
                format!("cyc{}[{}]", self.n, parts.join(","))
            }
        }
    }
    fn parse_text(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("cyc") {
            let (n, body) = rest.split_once('[')?;
            let n: u32 = n.parse().ok()?;
            let body = body.strip_suffix(']')?;
            let c: Option<RPoly> = body.split(',').map(parse_rat).collect();
            Some(Self::reduce(n, c?))
        } else {
            Some(Self::rational(parse_rat(s)?))
        }
    }
}
