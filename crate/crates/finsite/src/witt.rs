//! Truncated p-typical Witt vectors. Structure polynomials are derived once
//! per (p, n) by exact ghost-component solving over the integers (the
//! integrality of every division is asserted, never assumed), then cached.
//! Coefficient rings are exact: arbitrary-precision integers or integers
//! mod m. No floating point.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use once_cell::sync::Lazy;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WittError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("length must be at least 1")]
    ZeroLength,
    #[error("operand mismatch: {0}")]
    OperandMismatch(String),
    #[error("non-integral coefficient while solving ghost equations at stage {stage}")]
    NonIntegral { stage: usize },
    #[error("carrier of size {needed} exceeds the bound {bound}")]
    BoundExceeded { needed: usize, bound: usize },
    #[error("ring axiom violated: {0}")]
    RingAxiom(String),
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// ---------------------------------------------------------------------------
// Exact multivariate integer polynomials.
// ---------------------------------------------------------------------------

/// Sparse polynomial with integer coefficients in a fixed number of
/// variables; monomials are exponent vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPoly {
    pub arity: usize,
    pub terms: BTreeMap<Vec<u32>, BigInt>,
}

impl IntPoly {
    pub fn zero(arity: usize) -> Self {
        IntPoly {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(arity: usize, c: impl Into<BigInt>) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![0; arity], c);
        }
        IntPoly { arity, terms }
    }

    pub fn var(arity: usize, i: usize) -> Self {
        assert!(i < arity);
        let mut mono = vec![0u32; arity];
        mono[i] = 1;
        IntPoly {
            arity,
            terms: BTreeMap::from([(mono, BigInt::one())]),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn insert(&mut self, mono: Vec<u32>, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(mono).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            // re-fetch key to drop; entry api forbids removal mid-borrow
            let key: Vec<Vec<u32>> = self
                .terms
                .iter()
                .filter(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone())
                .collect();
            for k in key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        assert_eq!(self.arity, other.arity);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        assert_eq!(self.arity, other.arity);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), -c.clone());
        }
        out
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        assert_eq!(self.arity, other.arity);
        let mut out = IntPoly::zero(self.arity);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let mono: Vec<u32> = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                out.insert(mono, c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigInt) -> IntPoly {
        if c.is_zero() {
            return IntPoly::zero(self.arity);
        }
        IntPoly {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.clone(), v * c))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> IntPoly {
        let mut result = IntPoly::constant(self.arity, 1);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Exact division by an integer; fails if any coefficient is not
    /// divisible.
    pub fn div_exact(&self, d: &BigInt) -> Option<IntPoly> {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let (q, r) = c.div_rem(d);
            if !r.is_zero() {
                return None;
            }
            terms.insert(m.clone(), q);
        }
        Some(IntPoly {
            arity: self.arity,
            terms,
        })
    }

    pub fn eval_big(&self, args: &[BigInt]) -> BigInt {
        assert_eq!(args.len(), self.arity);
        let mut powers: BTreeMap<(usize, u32), BigInt> = BTreeMap::new();
        let mut total = BigInt::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let p = powers
                    .entry((i, e))
                    .or_insert_with(|| args[i].pow(e))
                    .clone();
                term *= p;
            }
            total += term;
        }
        total
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.iter().sum())
            .max()
            .unwrap_or(0)
    }

    pub fn to_string_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (m, c) in self.terms.iter().rev() {
            let mut factors = Vec::new();
            if !c.is_one() || m.iter().all(|&e| e == 0) {
                factors.push(c.to_string());
            }
            for (i, &e) in m.iter().enumerate() {
                if e == 1 {
                    factors.push(names[i].clone());
                } else if e > 1 {
                    factors.push(format!("{}^{}", names[i], e));
                }
            }
            parts.push(factors.join("*"));
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}

// ---------------------------------------------------------------------------
// Witt polynomials and derived structure polynomials.
// ---------------------------------------------------------------------------

/// w_k = Σ_{i ≤ k} p^i · x_i^{p^(k−i)}, for k = 0..n-1, in n variables.
pub fn witt_polynomials(p: u64, n: usize) -> Result<Vec<IntPoly>, WittError> {
    if !is_prime(p) {
        return Err(WittError::NotPrime(p));
    }
    if n == 0 {
        return Err(WittError::ZeroLength);
    }
    Ok((0..n).map(|k| witt_polynomial_offset(p, n, k, 0)).collect())
}

/// w_k in `arity` variables, reading x_i at position offset + i.
fn witt_polynomial_offset(p: u64, arity: usize, k: usize, offset: usize) -> IntPoly {
    let mut out = IntPoly::zero(arity);
    let pb = BigInt::from(p);
    for i in 0..=k {
        let coeff = pb.pow(i as u32);
        let exponent = (p as u128).pow((k - i) as u32);
        let term = IntPoly::var(arity, offset + i)
            .pow(u32::try_from(exponent).expect("exponent fits"))
            .scale(&coeff);
        out = out.add(&term);
    }
    out
}

/// Addition and multiplication polynomials for length-n Witt vectors: the
/// unique integral solutions of the ghost compatibility identities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructurePolynomials {
    pub p: u64,
    pub n: usize,
    /// in 2n variables: x_0..x_{n-1}, y_0..y_{n-1}
    pub add_polys: Vec<IntPoly>,
    pub mul_polys: Vec<IntPoly>,
}

static STRUCTURE_CACHE: Lazy<Mutex<BTreeMap<(u64, usize), Arc<StructurePolynomials>>>> =
    Lazy::new(|| Mutex::new(BTreeMap::new()));

static FROBENIUS_CACHE: Lazy<Mutex<BTreeMap<(u64, usize), Arc<Vec<IntPoly>>>>> =
    Lazy::new(|| Mutex::new(BTreeMap::new()));

/// Solves the ghost equations degree by degree; every division by p^k must
/// be exact, which is the integrality assertion.
pub fn derive_structure_polynomials(
    p: u64,
    n: usize,
) -> Result<Arc<StructurePolynomials>, WittError> {
    if !is_prime(p) {
        return Err(WittError::NotPrime(p));
    }
    if n == 0 {
        return Err(WittError::ZeroLength);
    }
    if let Some(hit) = STRUCTURE_CACHE.lock().unwrap().get(&(p, n)) {
        return Ok(hit.clone());
    }
    let arity = 2 * n;
    let pb = BigInt::from(p);
    let mut add_polys: Vec<IntPoly> = Vec::new();
    let mut mul_polys: Vec<IntPoly> = Vec::new();
    for k in 0..n {
        let wx = witt_polynomial_offset(p, arity, k, 0);
        let wy = witt_polynomial_offset(p, arity, k, n);
        let mut add_num = wx.add(&wy);
        let mut mul_num = wx.mul(&wy);
        for i in 0..k {
            let scale = pb.pow(i as u32);
            let e = u32::try_from((p as u128).pow((k - i) as u32)).expect("exponent fits");
            add_num = add_num.sub(&add_polys[i].pow(e).scale(&scale));
            mul_num = mul_num.sub(&mul_polys[i].pow(e).scale(&scale));
        }
        let divisor = pb.pow(k as u32);
        let s = add_num
            .div_exact(&divisor)
            .ok_or(WittError::NonIntegral { stage: k })?;
        let m = mul_num
            .div_exact(&divisor)
            .ok_or(WittError::NonIntegral { stage: k })?;
        add_polys.push(s);
        mul_polys.push(m);
    }
    // ghost compatibility as polynomial identities:
    // w_k(S_0..S_k) = w_k(x) + w_k(y) and w_k(M_0..M_k) = w_k(x)·w_k(y).
    for k in 0..n {
        let wx = witt_polynomial_offset(p, arity, k, 0);
        let wy = witt_polynomial_offset(p, arity, k, n);
        let mut add_ghost = IntPoly::zero(arity);
        let mut mul_ghost = IntPoly::zero(arity);
        for i in 0..=k {
            let scale = pb.pow(i as u32);
            let e = u32::try_from((p as u128).pow((k - i) as u32)).expect("fits");
            add_ghost = add_ghost.add(&add_polys[i].pow(e).scale(&scale));
            mul_ghost = mul_ghost.add(&mul_polys[i].pow(e).scale(&scale));
        }
        if add_ghost != wx.add(&wy) || mul_ghost != wx.mul(&wy) {
            return Err(WittError::NonIntegral { stage: k });
        }
    }
    let out = Arc::new(StructurePolynomials {
        p,
        n,
        add_polys,
        mul_polys,
    });
    STRUCTURE_CACHE
        .lock()
        .unwrap()
        .insert((p, n), out.clone());
    Ok(out)
}

/// Frobenius coordinate polynomials F_0..F_{n-2} for vectors of length n,
/// characterized by the ghost shift w_k(F(a)) = w_{k+1}(a).
pub fn derive_frobenius_polynomials(p: u64, n: usize) -> Result<Arc<Vec<IntPoly>>, WittError> {
    if !is_prime(p) {
        return Err(WittError::NotPrime(p));
    }
    if n < 2 {
        return Err(WittError::ZeroLength);
    }
    if let Some(hit) = FROBENIUS_CACHE.lock().unwrap().get(&(p, n)) {
        return Ok(hit.clone());
    }
    let arity = n;
    let pb = BigInt::from(p);
    let mut polys: Vec<IntPoly> = Vec::new();
    for k in 0..n - 1 {
        let mut num = witt_polynomial_offset(p, arity, k + 1, 0);
        for i in 0..k {
            let scale = pb.pow(i as u32);
            let e = u32::try_from((p as u128).pow((k - i) as u32)).expect("fits");
            num = num.sub(&polys[i].pow(e).scale(&scale));
        }
        let divisor = pb.pow(k as u32);
        let f = num
            .div_exact(&divisor)
            .ok_or(WittError::NonIntegral { stage: k })?;
        polys.push(f);
    }
    let out = Arc::new(polys);
    FROBENIUS_CACHE.lock().unwrap().insert((p, n), out.clone());
    Ok(out)
}

// ---------------------------------------------------------------------------
// Witt vectors over exact coefficient rings.
// ---------------------------------------------------------------------------

/// An exact coefficient ring: the integers or the integers mod m.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoeffRing {
    Integers,
    Mod(u64),
}

impl CoeffRing {
    fn normalize(&self, v: BigInt) -> BigInt {
        match self {
            CoeffRing::Integers => v,
            CoeffRing::Mod(m) => {
                let m = BigInt::from(*m);
                ((v % &m) + &m) % &m
            }
        }
    }
}

/// A length-n p-typical Witt vector with coordinates in a declared ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittVector {
    pub p: u64,
    pub coords: Vec<BigInt>,
    pub ring: CoeffRing,
}

impl WittVector {
    pub fn new(p: u64, ring: CoeffRing, coords: Vec<BigInt>) -> Result<Self, WittError> {
        if !is_prime(p) {
            return Err(WittError::NotPrime(p));
        }
        if coords.is_empty() {
            return Err(WittError::ZeroLength);
        }
        let coords = coords.into_iter().map(|c| ring.normalize(c)).collect();
        Ok(WittVector { p, coords, ring })
    }

    pub fn from_ints(p: u64, ring: CoeffRing, coords: &[i64]) -> Result<Self, WittError> {
        WittVector::new(p, ring, coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn zero(p: u64, ring: CoeffRing, n: usize) -> Result<Self, WittError> {
        WittVector::new(p, ring, vec![BigInt::zero(); n])
    }

    fn check_match(&self, other: &WittVector) -> Result<(), WittError> {
        if self.p != other.p || self.len() != other.len() || self.ring != other.ring {
            return Err(WittError::OperandMismatch(format!(
                "(p={}, n={}) vs (p={}, n={})",
                self.p,
                self.len(),
                other.p,
                other.len()
            )));
        }
        Ok(())
    }
}

fn eval_in_ring(poly: &IntPoly, args: &[BigInt], ring: &CoeffRing) -> BigInt {
    ring.normalize(poly.eval_big(args))
}

/// Coordinatewise evaluation of the addition polynomials.
pub fn witt_add(a: &WittVector, b: &WittVector) -> Result<WittVector, WittError> {
    a.check_match(b)?;
    let sp = derive_structure_polynomials(a.p, a.len())?;
    let args: Vec<BigInt> = a.coords.iter().chain(&b.coords).cloned().collect();
    let coords = sp
        .add_polys
        .iter()
        .map(|s| eval_in_ring(s, &args, &a.ring))
        .collect();
    WittVector::new(a.p, a.ring.clone(), coords)
}

/// Coordinatewise evaluation of the multiplication polynomials.
pub fn witt_mul(a: &WittVector, b: &WittVector) -> Result<WittVector, WittError> {
    a.check_match(b)?;
    let sp = derive_structure_polynomials(a.p, a.len())?;
    let args: Vec<BigInt> = a.coords.iter().chain(&b.coords).cloned().collect();
    let coords = sp
        .mul_polys
        .iter()
        .map(|m| eval_in_ring(m, &args, &a.ring))
        .collect();
    WittVector::new(a.p, a.ring.clone(), coords)
}

pub fn witt_neg(a: &WittVector) -> Result<WittVector, WittError> {
    // For odd p negation is coordinatewise; for p = 2 multiply by the
    // vector of −1s, which represents −1. Both are polynomial identities
    // verified over the integers, hence valid over every coefficient ring.
    if a.p != 2 {
        let coords = a.coords.iter().map(|c| a.ring.normalize(-c)).collect();
        return WittVector::new(a.p, a.ring.clone(), coords);
    }
    let minus_one = WittVector::new(
        a.p,
        a.ring.clone(),
        vec![BigInt::from(-1); a.len()],
    )?;
    witt_mul(a, &minus_one)
}

/// Ghost components: the k-th Witt polynomial evaluated at the coordinates.
pub fn ghost(a: &WittVector) -> Result<Vec<BigInt>, WittError> {
    let ws = witt_polynomials(a.p, a.len())?;
    Ok(ws
        .iter()
        .map(|w| eval_in_ring(w, &a.coords, &a.ring))
        .collect())
}

/// Solves coordinates back from ghost components over a p-torsion-free
/// ring; returns None if the ghosts are not realizable over the integers.
pub fn ghost_inverse(p: u64, ghosts: &[BigInt]) -> Option<Vec<BigInt>> {
    let pb = BigInt::from(p);
    let mut coords: Vec<BigInt> = Vec::new();
    for (k, g) in ghosts.iter().enumerate() {
        let mut acc = g.clone();
        for (i, c) in coords.iter().enumerate() {
            let e = u32::try_from((p as u128).pow((k - i) as u32)).ok()?;
            acc -= pb.pow(i as u32) * c.pow(e);
        }
        let (q, r) = acc.div_rem(&pb.pow(k as u32));
        if !r.is_zero() {
            return None;
        }
        coords.push(q);
    }
    Some(coords)
}

/// Teichmüller lift (x, 0, …, 0).
pub fn teichmuller(p: u64, ring: CoeffRing, n: usize, x: BigInt) -> Result<WittVector, WittError> {
    let mut coords = vec![BigInt::zero(); n];
    coords[0] = x;
    WittVector::new(p, ring, coords)
}

/// Verschiebung: shift coordinates right, extending the length by one.
pub fn verschiebung(a: &WittVector) -> Result<WittVector, WittError> {
    let mut coords = vec![BigInt::zero()];
    coords.extend(a.coords.iter().cloned());
    WittVector::new(a.p, a.ring.clone(), coords)
}

/// Frobenius: drops the length by one; characterized by ghost shift.
pub fn frobenius(a: &WittVector) -> Result<WittVector, WittError> {
    if a.len() < 2 {
        return Err(WittError::ZeroLength);
    }
    let polys = derive_frobenius_polynomials(a.p, a.len())?;
    let coords = polys
        .iter()
        .map(|f| eval_in_ring(f, &a.coords, &a.ring))
        .collect();
    WittVector::new(a.p, a.ring.clone(), coords)
}

/// n·a by repeated addition.
pub fn witt_scalar(k: u64, a: &WittVector) -> Result<WittVector, WittError> {
    let mut acc = WittVector::zero(a.p, a.ring.clone(), a.len())?;
    for _ in 0..k {
        acc = witt_add(&acc, a)?;
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Finite rings by tables and the affine Greenberg construction.
// ---------------------------------------------------------------------------

/// A finite commutative ring presented by addition and multiplication
/// tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteRing {
    pub name: String,
    pub size: usize,
    pub add: Vec<Vec<usize>>,
    pub mul: Vec<Vec<usize>>,
    pub zero: usize,
    pub one: usize,
}

impl FiniteRing {
    /// Z/m with elements 0..m-1.
    pub fn zmod(m: usize) -> FiniteRing {
        let add = (0..m).map(|i| (0..m).map(|j| (i + j) % m).collect()).collect();
        let mul = (0..m).map(|i| (0..m).map(|j| (i * j) % m).collect()).collect();
        FiniteRing {
            name: format!("Z/{m}"),
            size: m,
            add,
            mul,
            zero: 0,
            one: 1 % m,
        }
    }

    pub fn neg(&self, a: usize) -> usize {
        (0..self.size)
            .find(|&b| self.add[a][b] == self.zero)
            .expect("additive inverse exists")
    }

    /// Every commutative-ring axiom, exhaustively.
    pub fn validate(&self) -> Result<(), WittError> {
        let n = self.size;
        let chk = |cond: bool, what: &str| -> Result<(), WittError> {
            if cond {
                Ok(())
            } else {
                Err(WittError::RingAxiom(format!("{what} in {}", self.name)))
            }
        };
        chk(self.add.len() == n && self.mul.len() == n, "table shape")?;
        for a in 0..n {
            chk(self.add[a].len() == n && self.mul[a].len() == n, "table shape")?;
            chk(self.add[a][self.zero] == a, "additive identity")?;
            chk(self.mul[a][self.one] == a, "multiplicative identity")?;
            chk(
                (0..n).any(|b| self.add[a][b] == self.zero),
                "additive inverse",
            )?;
        }
        for a in 0..n {
            for b in 0..n {
                chk(self.add[a][b] == self.add[b][a], "commutativity of +")?;
                chk(self.mul[a][b] == self.mul[b][a], "commutativity of ·")?;
                for c in 0..n {
                    chk(
                        self.add[self.add[a][b]][c] == self.add[a][self.add[b][c]],
                        "associativity of +",
                    )?;
                    chk(
                        self.mul[self.mul[a][b]][c] == self.mul[a][self.mul[b][c]],
                        "associativity of ·",
                    )?;
                    chk(
                        self.mul[a][self.add[b][c]] == self.add[self.mul[a][b]][self.mul[a][c]],
                        "distributivity",
                    )?;
                }
            }
        }
        Ok(())
    }

    /// Image of an integer under the unique map Z → R.
    pub fn from_int(&self, k: &BigInt) -> usize {
        // additive order of 1 divides size; reduce exactly
        let m = BigInt::from(self.additive_order_of_one());
        let r = ((k % &m) + &m) % &m;
        let mut acc = self.zero;
        let mut count = r;
        while count > BigInt::zero() {
            acc = self.add[acc][self.one];
            count -= 1;
        }
        acc
    }

    fn additive_order_of_one(&self) -> usize {
        let mut acc = self.one;
        let mut k = 1;
        while acc != self.zero {
            acc = self.add[acc][self.one];
            k += 1;
        }
        k
    }

    pub fn pow(&self, a: usize, e: u32) -> usize {
        let mut out = self.one;
        for _ in 0..e {
            out = self.mul[out][a];
        }
        out
    }

    /// Evaluates an integer polynomial at ring elements.
    pub fn eval_poly(&self, poly: &IntPoly, args: &[usize]) -> usize {
        let mut total = self.zero;
        for (mono, coeff) in &poly.terms {
            let mut term = self.from_int(coeff);
            for (i, &e) in mono.iter().enumerate() {
                if e > 0 {
                    // exponents can exceed u32 range only for huge p^k; the
                    // affine construction keeps n small so this cast holds
                    term = self.mul[term][self.pow(args[i], e)];
                }
            }
            total = self.add[total][term];
        }
        total
    }
}

pub fn is_ring_hom(a: &FiniteRing, b: &FiniteRing, map: &[usize]) -> bool {
    map.len() == a.size
        && map[a.zero] == b.zero
        && map[a.one] == b.one
        && (0..a.size).all(|x| {
            (0..a.size).all(|y| {
                map[a.add[x][y]] == b.add[map[x]][map[y]]
                    && map[a.mul[x][y]] == b.mul[map[x]][map[y]]
            })
        })
}

/// Brute-force ring isomorphism search.
pub fn find_ring_iso(a: &FiniteRing, b: &FiniteRing) -> Option<Vec<usize>> {
    if a.size != b.size {
        return None;
    }
    fn rec(a: &FiniteRing, b: &FiniteRing, map: &mut Vec<usize>, used: &mut Vec<bool>, k: usize) -> bool {
        if k == a.size {
            return is_ring_hom(a, b, map);
        }
        if map[k] != usize::MAX {
            return rec(a, b, map, used, k + 1);
        }
        for v in 0..b.size {
            if used[v] {
                continue;
            }
            map[k] = v;
            used[v] = true;
            if rec(a, b, map, used, k + 1) {
                return true;
            }
            map[k] = usize::MAX;
            used[v] = false;
        }
        false
    }
    let mut map = vec![usize::MAX; a.size];
    let mut used = vec![false; b.size];
    map[a.zero] = b.zero;
    used[b.zero] = true;
    if a.one != a.zero {
        if used[b.one] {
            return None;
        }
        map[a.one] = b.one;
        used[b.one] = true;
    }
    if rec(a, b, &mut map, &mut used, 0) {
        Some(map)
    } else {
        None
    }
}

/// The ring W_n(A) of length-n Witt vectors over a finite ring, with its
/// carrier indexed by coordinate tuples and operations given by the
/// structure polynomials reduced into A.
#[derive(Clone, Debug)]
pub struct GreenbergRing {
    pub ring: FiniteRing,
    /// carrier index -> coordinate tuple over A
    pub tuples: Vec<Vec<usize>>,
    /// size of the base ring A
    pub base_size: usize,
}

pub fn greenberg_affine(
    p: u64,
    n: usize,
    a: &FiniteRing,
    max_carrier: usize,
) -> Result<GreenbergRing, WittError> {
    a.validate()?;
    let needed = a.size.checked_pow(n as u32).ok_or(WittError::BoundExceeded {
        needed: usize::MAX,
        bound: max_carrier,
    })?;
    if needed > max_carrier {
        return Err(WittError::BoundExceeded {
            needed,
            bound: max_carrier,
        });
    }
    let sp = derive_structure_polynomials(p, n)?;
    // enumerate tuples in lexicographic order
    let mut tuples: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for t in &tuples {
            for v in 0..a.size {
                let mut t2 = t.clone();
                t2.push(v);
                next.push(t2);
            }
        }
        tuples = next;
    }
    let index_of = |t: &[usize]| -> usize {
        t.iter().fold(0, |acc, &v| acc * a.size + v)
    };
    let eval_op = |polys: &[IntPoly], x: &[usize], y: &[usize]| -> Vec<usize> {
        let args: Vec<usize> = x.iter().chain(y).copied().collect();
        polys.iter().map(|poly| a.eval_poly(poly, &args)).collect()
    };
    let mut add = vec![vec![0usize; needed]; needed];
    let mut mul = vec![vec![0usize; needed]; needed];
    for (i, x) in tuples.iter().enumerate() {
        for (j, y) in tuples.iter().enumerate() {
            add[i][j] = index_of(&eval_op(&sp.add_polys, x, y));
            mul[i][j] = index_of(&eval_op(&sp.mul_polys, x, y));
        }
    }
    let zero = index_of(&vec![a.zero; n]);
    let mut one_t = vec![a.zero; n];
    one_t[0] = a.one;
    let one = index_of(&one_t);
    let ring = FiniteRing {
        name: format!("W_{n}({})", a.name),
        size: needed,
        add,
        mul,
        zero,
        one,
    };
    ring.validate()?;
    Ok(GreenbergRing {
        ring,
        tuples,
        base_size: a.size,
    })
}

/// Coordinatewise extension of a ring homomorphism A → B to W_n(A) → W_n(B).
pub fn greenberg_map(wa: &GreenbergRing, wb: &GreenbergRing, hom: &[usize]) -> Vec<usize> {
    wa.tuples
        .iter()
        .map(|t| {
            t.iter()
                .fold(0usize, |acc, &v| acc * wb.base_size + hom[v])
        })
        .collect()
}

/// Symbolic verification that the displayed two-component rule
/// (a,x)(b,y) = (ab, ay + bx + xy) is a commutative, associative, unital
/// multiplication distributing over componentwise addition.
pub fn check_paper_ring_rule() -> bool {
    // variables: a=0, x=1, b=2, y=3, c=4, z=5
    let arity = 6;
    let v = |i: usize| IntPoly::var(arity, i);
    let rule = |a: &IntPoly, x: &IntPoly, b: &IntPoly, y: &IntPoly| -> (IntPoly, IntPoly) {
        (
            a.mul(b),
            a.mul(y).add(&b.mul(x)).add(&x.mul(y)),
        )
    };
    let (a, x, b, y, c, z) = (v(0), v(1), v(2), v(3), v(4), v(5));
    // commutativity
    let (p1, q1) = rule(&a, &x, &b, &y);
    let (p2, q2) = rule(&b, &y, &a, &x);
    if p1 != p2 || q1 != q2 {
        return false;
    }
    // unit (1, 0)
    let one = IntPoly::constant(arity, 1);
    let zero = IntPoly::zero(arity);
    let (pu, qu) = rule(&a, &x, &one, &zero);
    if pu != a || qu != x {
        return false;
    }
    // associativity
    let (ab, ab2) = rule(&a, &x, &b, &y);
    let (l1, l2) = rule(&ab, &ab2, &c, &z);
    let (bc, bc2) = rule(&b, &y, &c, &z);
    let (r1, r2) = rule(&a, &x, &bc, &bc2);
    if l1 != r1 || l2 != r2 {
        return false;
    }
    // distributivity over componentwise addition
    let (d1, d2) = rule(&a, &x, &b.add(&c), &y.add(&z));
    let (e1, e2) = rule(&a, &x, &b, &y);
    let (f1, f2) = rule(&a, &x, &c, &z);
    d1 == e1.add(&f1) && d2 == e2.add(&f2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn witt_polynomials_small_cases() {
        let w = witt_polynomials(2, 2).unwrap();
        // w_0 = x_0
        assert_eq!(w[0], IntPoly::var(2, 0));
        // w_1 = x_0² + 2x_1
        let expected = IntPoly::var(2, 0)
            .pow(2)
            .add(&IntPoly::var(2, 1).scale(&big(2)));
        assert_eq!(w[1], expected);
        let w3 = witt_polynomials(3, 2).unwrap();
        let expected3 = IntPoly::var(2, 0)
            .pow(3)
            .add(&IntPoly::var(2, 1).scale(&big(3)));
        assert_eq!(w3[1], expected3);
    }

    #[test]
    fn non_prime_is_rejected() {
        assert_eq!(witt_polynomials(4, 2).unwrap_err(), WittError::NotPrime(4));
        assert!(derive_structure_polynomials(6, 2).is_err());
    }

    #[test]
    fn first_addition_polynomials() {
        let sp = derive_structure_polynomials(2, 2).unwrap();
        // S_0 = x_0 + y_0
        let arity = 4;
        let x0 = IntPoly::var(arity, 0);
        let x1 = IntPoly::var(arity, 1);
        let y0 = IntPoly::var(arity, 2);
        let y1 = IntPoly::var(arity, 3);
        assert_eq!(sp.add_polys[0], x0.add(&y0));
        // S_1 = x_1 + y_1 − x_0 y_0
        let s1 = x1.add(&y1).sub(&x0.mul(&y0));
        assert_eq!(sp.add_polys[1], s1);
        // M_0 = x_0 y_0
        assert_eq!(sp.mul_polys[0], x0.mul(&y0));
    }

    #[test]
    fn mul_polynomial_ghost_identity_p3() {
        // w_1(M_0, M_1) = w_1(x)·w_1(y) symbolically
        let sp = derive_structure_polynomials(3, 2).unwrap();
        let arity = 4;
        let wx = witt_polynomial_offset(3, arity, 1, 0);
        let wy = witt_polynomial_offset(3, arity, 1, 2);
        let lhs = sp.mul_polys[0]
            .pow(3)
            .add(&sp.mul_polys[1].scale(&big(3)));
        assert_eq!(lhs, wx.mul(&wy));
    }

    #[test]
    fn one_plus_one_is_two_minus_one() {
        // ghost oracle: ghosts (1,1)+(1,1) = (2,2) solve back to (2,−1)
        let one = WittVector::from_ints(2, CoeffRing::Integers, &[1, 0]).unwrap();
        let two = witt_add(&one, &one).unwrap();
        assert_eq!(two.coords, vec![big(2), big(-1)]);
        let ghosts: Vec<BigInt> = ghost(&one)
            .unwrap()
            .iter()
            .map(|g| g * 2)
            .collect();
        assert_eq!(ghost_inverse(2, &ghosts).unwrap(), two.coords);
    }

    #[test]
    fn additive_identity() {
        let a = WittVector::from_ints(3, CoeffRing::Integers, &[4, -2, 7]).unwrap();
        let z = WittVector::zero(3, CoeffRing::Integers, 3).unwrap();
        assert_eq!(witt_add(&a, &z).unwrap(), a);
    }

    #[test]
    fn teichmuller_is_multiplicative_and_unit() {
        let t = |x: i64| teichmuller(2, CoeffRing::Integers, 3, big(x)).unwrap();
        let prod = witt_mul(&t(3), &t(5)).unwrap();
        assert_eq!(prod, t(15));
        let a = WittVector::from_ints(2, CoeffRing::Integers, &[3, 1, -2]).unwrap();
        assert_eq!(witt_mul(&a, &t(1)).unwrap(), a);
    }

    #[test]
    fn ghost_values() {
        let a = WittVector::from_ints(2, CoeffRing::Integers, &[1, 0]).unwrap();
        assert_eq!(ghost(&a).unwrap(), vec![big(1), big(1)]);
        let b = WittVector::from_ints(2, CoeffRing::Integers, &[0, 1]).unwrap();
        assert_eq!(ghost(&b).unwrap(), vec![big(0), big(2)]);
        let z = WittVector::zero(2, CoeffRing::Integers, 3).unwrap();
        assert_eq!(ghost(&z).unwrap(), vec![big(0); 3]);
    }

    #[test]
    fn verschiebung_shifts() {
        let t = teichmuller(2, CoeffRing::Integers, 2, big(1)).unwrap();
        let v = verschiebung(&t).unwrap();
        assert_eq!(v.coords, vec![big(0), big(1), big(0)]);
    }

    #[test]
    fn frobenius_after_verschiebung_is_p() {
        for p in [2u64, 3] {
            for coords in [[1i64, 2, 3], [-4, 0, 5], [7, -1, 2]] {
                let a = WittVector::from_ints(p, CoeffRing::Integers, &coords).unwrap();
                let fv = frobenius(&verschiebung(&a).unwrap()).unwrap();
                let pa = witt_scalar(p, &a).unwrap();
                assert_eq!(fv, pa, "F∘V = {p} at {coords:?}");
            }
        }
    }

    #[test]
    fn frobenius_ghost_shift() {
        let a = WittVector::from_ints(3, CoeffRing::Integers, &[2, -1, 4]).unwrap();
        let fa = frobenius(&a).unwrap();
        let ga = ghost(&a).unwrap();
        let gfa = ghost(&fa).unwrap();
        assert_eq!(gfa.as_slice(), &ga[1..]);
    }

    #[test]
    fn projection_formula() {
        // V(a)·b = V(a·F(b))
        for p in [2u64, 3] {
            let a = WittVector::from_ints(p, CoeffRing::Integers, &[2, 1]).unwrap();
            let b = WittVector::from_ints(p, CoeffRing::Integers, &[3, -1, 2]).unwrap();
            let lhs = witt_mul(&verschiebung(&a).unwrap(), &b).unwrap();
            let rhs = verschiebung(&witt_mul(&a, &frobenius(&b).unwrap()).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn w2_of_f2_has_characteristic_four() {
        let f2 = FiniteRing::zmod(2);
        let w = greenberg_affine(2, 2, &f2, 64).unwrap();
        let one = w.ring.one;
        let two = w.ring.add[one][one];
        assert_ne!(two, w.ring.zero);
        assert_eq!(w.tuples[two], vec![0, 1]);
        let four = w.ring.add[two][two];
        assert_eq!(four, w.ring.zero);
        assert!(find_ring_iso(&w.ring, &FiniteRing::zmod(4)).is_some());
    }

    #[test]
    fn w2_of_f3_carries_on_three() {
        let f3 = FiniteRing::zmod(3);
        let w = greenberg_affine(3, 2, &f3, 81).unwrap();
        let one = w.ring.one;
        let three = w.ring.add[w.ring.add[one][one]][one];
        assert_ne!(three, w.ring.zero);
        assert_eq!(w.tuples[three][0], 0);
        assert_ne!(w.tuples[three][1], 0);
    }

    #[test]
    fn w1_recovers_the_ring() {
        for m in [2usize, 3, 4] {
            let a = FiniteRing::zmod(m);
            let w = greenberg_affine(if m == 3 { 3 } else { 2 }, 1, &a, 16).unwrap();
            assert!(find_ring_iso(&w.ring, &a).is_some());
        }
    }

    #[test]
    fn carrier_bound_is_enforced() {
        let f2 = FiniteRing::zmod(2);
        assert!(matches!(
            greenberg_affine(2, 4, &f2, 8),
            Err(WittError::BoundExceeded { needed: 16, bound: 8 })
        ));
    }

    #[test]
    fn paper_ring_rule_is_consistent() {
        assert!(check_paper_ring_rule());
    }

    #[test]
    fn greenberg_is_functorial_on_the_mod_two_quotient() {
        let z4 = FiniteRing::zmod(4);
        let f2 = FiniteRing::zmod(2);
        let hom: Vec<usize> = (0..4).map(|k| k % 2).collect();
        assert!(is_ring_hom(&z4, &f2, &hom));
        for n in 1..=2 {
            let wa = greenberg_affine(2, n, &z4, 64).unwrap();
            let wb = greenberg_affine(2, n, &f2, 64).unwrap();
            let wmap = greenberg_map(&wa, &wb, &hom);
            assert!(is_ring_hom(&wa.ring, &wb.ring, &wmap));
        }
    }
}
