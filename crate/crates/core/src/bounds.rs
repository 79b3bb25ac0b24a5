//! Symbolic color-count bounds and their certified evaluation.
//!
//! A [`BoundFn`] maps a clique number to an upper bound on colors. Most
//! variants evaluate to exact rationals; `SupermultStar` involves
//! x^(log2 x), which is irrational off powers of two, so evaluation
//! returns a directed-rounding [`Interval`] instead. Certificate checks
//! ([`check_value`]) compare a color count against such an interval and
//! refine precision until the comparison is conclusive or a cap is hit.

use std::fmt;

use num::bigint::BigInt;
use num::{BigUint, One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Rational;

/// Working precision (target fractional bits) when none is requested.
pub const DEFAULT_PRECISION_BITS: u32 = 64;
/// Refinement stops doubling here and reports inconclusive instead.
pub const MAX_PRECISION_BITS: u32 = 4096;
/// Largest admissible evaluation point; exponential variants would
/// otherwise build numbers with billions of digits from one bad input.
pub const MAX_EVAL_POINT: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundError {
    #[error("table has values for 0..={max}, no entry at {n}")]
    OutOfTable { n: u64, max: u64 },
    #[error("evaluation point {n} exceeds the supported maximum {MAX_EVAL_POINT}")]
    PointTooLarge { n: u64 },
    #[error("bound expression, byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid bound: {0}")]
    Invalid(&'static str),
}

/// Closed interval of rationals known to contain a real value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn point(v: Rational) -> Self {
        Interval { lo: v.clone(), hi: v }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// Both factors must be non-negative, which every bound variant
    /// guarantees; checked here because soundness depends on it.
    fn mul(&self, other: &Interval) -> Interval {
        assert!(!self.lo.is_negative() && !other.lo.is_negative());
        Interval::new(&self.lo * &other.lo, &self.hi * &other.hi)
    }

    fn add_rational(&self, r: &Rational) -> Interval {
        Interval::new(&self.lo + r, &self.hi + r)
    }

    fn pow(&self, e: usize) -> Interval {
        assert!(!self.lo.is_negative());
        Interval::new(num::pow(self.lo.clone(), e), num::pow(self.hi.clone(), e))
    }

    /// Intersection with another enclosure of the same value. Panics if
    /// the intervals are disjoint, which would mean one of them lied.
    pub fn intersect(&self, other: &Interval) -> Interval {
        let lo = if self.lo >= other.lo { self.lo.clone() } else { other.lo.clone() };
        let hi = if self.hi <= other.hi { self.hi.clone() } else { other.hi.clone() };
        assert!(lo <= hi, "disjoint refinement intervals");
        Interval { lo, hi }
    }
}

/// Outcome of comparing a color count against an evaluated bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "pass")]
    Pass,
    #[serde(rename = "fail")]
    Fail,
    #[serde(rename = "inconclusive-precision")]
    InconclusivePrecision,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::InconclusivePrecision => "inconclusive-precision",
        })
    }
}

/// A monotone bound on colors as a function of the clique number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundFn {
    /// Non-negative constant.
    Constant(Rational),
    /// Coefficients low degree first, non-negative integers, no trailing zeros.
    Polynomial(Vec<BigUint>),
    /// 2^(c*(x-1)); value 1/2^c at x = 0.
    Exponential { c: u32 },
    /// Explicit non-decreasing values at 0..=N; refuses points beyond N.
    Tabulated(Vec<Rational>),
    /// k maps to inner(k)^k, with 1 at k = 0.
    StarPower(Box<BoundFn>),
    /// x^(3A+11).
    PolyStar { a: u32 },
    /// x maps to inner(x) * x^(log2 x), with 0 at x = 0.
    SupermultStar(Box<BoundFn>),
    /// 2^((c+1)*x).
    ExpStar { c: u32 },
    /// n maps to inner(n) + 2k^2 - 1.
    KGlueShift { inner: Box<BoundFn>, k: u32 },
}

/// inner(k)^k with the empty-graph convention g(0) = 1.
pub fn star_bound(inner: BoundFn) -> BoundFn {
    BoundFn::StarPower(Box::new(inner))
}

/// x^(3A+11).
pub fn poly_star_bound(a: u32) -> BoundFn {
    assert!(a >= 1);
    BoundFn::PolyStar { a }
}

/// Block budget paired with [`poly_star_bound`]: B = 2A+11. The exponent
/// splits as 3A+11 = (A) + (2A+11) across child colors and block count,
/// and the synthesis ledger checks per-block usage against this.
pub fn poly_star_block_exponent(a: u32) -> u32 {
    2 * a + 11
}

/// inner(x) * x^(log2 x); callers are expected to have verified
/// supermultiplicativity of `inner` on their range of interest.
pub fn supermult_star_bound(inner: BoundFn) -> BoundFn {
    BoundFn::SupermultStar(Box::new(inner))
}

/// 2^((c+1)x).
pub fn exp_star_bound(c: u32) -> BoundFn {
    assert!(c >= 1);
    BoundFn::ExpStar { c }
}

/// inner(n) + 2k^2 - 1.
pub fn kglue_bound(inner: BoundFn, k: u32) -> BoundFn {
    assert!(k >= 1);
    BoundFn::KGlueShift { inner: Box::new(inner), k }
}

impl BoundFn {
    /// Single term x^a.
    pub fn power(a: u32) -> BoundFn {
        let mut coeffs = vec![BigUint::zero(); a as usize + 1];
        coeffs[a as usize] = BigUint::one();
        BoundFn::Polynomial(coeffs)
    }

    /// The identity bound x.
    pub fn identity() -> BoundFn {
        BoundFn::power(1)
    }

    pub fn constant_u64(c: u64) -> BoundFn {
        BoundFn::Constant(Rational::from(BigInt::from(c)))
    }

    /// Structural well-formedness: non-negative constants, non-trivial
    /// polynomials, non-decreasing tables. Parsed expressions are always
    /// valid; directly constructed values go through this at API edges.
    pub fn validate(&self) -> Result<(), BoundError> {
        match self {
            BoundFn::Constant(c) => {
                if c.is_negative() {
                    return Err(BoundError::Invalid("constant bound is negative"));
                }
            }
            BoundFn::Polynomial(coeffs) => {
                if coeffs.is_empty() {
                    return Err(BoundError::Invalid("polynomial has no coefficients"));
                }
                if coeffs.len() > 1 && coeffs.last().unwrap().is_zero() {
                    return Err(BoundError::Invalid("polynomial has trailing zero coefficients"));
                }
            }
            BoundFn::Exponential { .. } | BoundFn::PolyStar { .. } | BoundFn::ExpStar { .. } => {}
            BoundFn::Tabulated(values) => {
                if values.is_empty() {
                    return Err(BoundError::Invalid("empty table"));
                }
                if values[0].is_negative() {
                    return Err(BoundError::Invalid("table starts below zero"));
                }
                if values.windows(2).any(|w| w[0] > w[1]) {
                    return Err(BoundError::Invalid("table values decrease"));
                }
            }
            BoundFn::StarPower(inner) | BoundFn::SupermultStar(inner) => inner.validate()?,
            BoundFn::KGlueShift { inner, k } => {
                if *k == 0 {
                    return Err(BoundError::Invalid("gluing width k must be positive"));
                }
                inner.validate()?;
            }
        }
        Ok(())
    }

    /// Evaluate at `n` with the default working precision.
    pub fn eval(&self, n: u64) -> Result<Interval, BoundError> {
        self.eval_bits(n, DEFAULT_PRECISION_BITS)
    }

    /// Evaluate at `n`; `bits` steers the enclosure width of the one
    /// non-exact variant. Exact variants return point intervals.
    pub fn eval_bits(&self, n: u64, bits: u32) -> Result<Interval, BoundError> {
        if n > MAX_EVAL_POINT {
            return Err(BoundError::PointTooLarge { n });
        }
        Ok(match self {
            BoundFn::Constant(c) => Interval::point(c.clone()),
            BoundFn::Polynomial(coeffs) => {
                let x = BigUint::from(n);
                let mut acc = BigUint::zero();
                for c in coeffs.iter().rev() {
                    acc = acc * &x + c;
                }
                Interval::point(Rational::from(BigInt::from(acc)))
            }
            BoundFn::Exponential { c } => Interval::point(two_pow_signed(
                i64::try_from(u64::from(*c) * n).expect("exponent fits") - i64::from(*c),
            )),
            BoundFn::Tabulated(values) => match values.get(usize::try_from(n).unwrap()) {
                Some(v) => Interval::point(v.clone()),
                None => {
                    return Err(BoundError::OutOfTable { n, max: values.len() as u64 - 1 })
                }
            },
            BoundFn::StarPower(inner) => {
                if n == 0 {
                    Interval::point(Rational::one())
                } else {
                    inner.eval_bits(n, bits)?.pow(n as usize)
                }
            }
            BoundFn::PolyStar { a } => {
                let e = 3 * u64::from(*a) + 11;
                Interval::point(Rational::from(BigInt::from(num::pow(
                    BigUint::from(n),
                    e as usize,
                ))))
            }
            BoundFn::SupermultStar(inner) => {
                if n == 0 {
                    Interval::point(Rational::zero())
                } else {
                    inner.eval_bits(n, bits)?.mul(&pow_log2(n, bits))
                }
            }
            BoundFn::ExpStar { c } => {
                let e = (u64::from(*c) + 1) * n;
                Interval::point(Rational::from(BigInt::from(
                    BigUint::one() << usize::try_from(e).expect("exponent fits"),
                )))
            }
            BoundFn::KGlueShift { inner, k } => {
                let shift = Rational::from(BigInt::from(2 * u64::from(*k) * u64::from(*k) - 1));
                inner.eval_bits(n, bits)?.add_rational(&shift)
            }
        })
    }

    /// Whether evaluation can return a non-point interval.
    pub fn has_interval_variant(&self) -> bool {
        match self {
            BoundFn::SupermultStar(_) => true,
            BoundFn::StarPower(inner) | BoundFn::KGlueShift { inner, .. } => {
                inner.has_interval_variant()
            }
            _ => false,
        }
    }

    /// Symbolic f^e where the result stays in the representation:
    /// constants, polynomials, base-2 exponentials and tables are closed
    /// under powering; the star forms are not, and return None.
    pub fn pow_symbolic(&self, e: u32) -> Option<BoundFn> {
        if e == 0 {
            return Some(BoundFn::constant_u64(1));
        }
        match self {
            BoundFn::Constant(c) => Some(BoundFn::Constant(num::pow(c.clone(), e as usize))),
            BoundFn::Polynomial(coeffs) => {
                let mut acc = vec![BigUint::one()];
                for _ in 0..e {
                    acc = poly_mul(&acc, coeffs);
                }
                Some(BoundFn::Polynomial(acc))
            }
            BoundFn::Exponential { c } => Some(BoundFn::Exponential { c: c * e }),
            BoundFn::Tabulated(values) => Some(BoundFn::Tabulated(
                values.iter().map(|v| num::pow(v.clone(), e as usize)).collect(),
            )),
            _ => None,
        }
    }
}

fn poly_mul(a: &[BigUint], b: &[BigUint]) -> Vec<BigUint> {
    let mut out = vec![BigUint::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    while out.len() > 1 && out.last().unwrap().is_zero() {
        out.pop();
    }
    out
}

/// 2^e for possibly negative e, as an exact rational.
fn two_pow_signed(e: i64) -> Rational {
    if e >= 0 {
        Rational::from(BigInt::from(BigUint::one() << e as usize))
    } else {
        Rational::new(BigInt::one(), BigInt::from(BigUint::one() << (-e) as usize))
    }
}

/// f(m)·f(n) <= f(mn) for all 1 <= m, n <= N with mn <= N, decided
/// soundly: interval variants compare hi·hi against lo, so `true` is
/// only returned when the inequality certainly holds everywhere.
pub fn check_supermultiplicative(f: &BoundFn, n_max: u64) -> Result<bool, BoundError> {
    for m in 1..=n_max {
        for n in m..=n_max {
            if m * n > n_max {
                break;
            }
            let fm = f.eval(m)?;
            let fn_ = f.eval(n)?;
            let fmn = f.eval(m * n)?;
            if fm.hi() * fn_.hi() > *fmn.lo() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Conclusively non-decreasing on 0..=n_max, comparing hi of each point
/// against lo of the next so that interval noise cannot fake the answer.
pub fn is_non_decreasing_on(f: &BoundFn, n_max: u64) -> Result<bool, BoundError> {
    let mut prev = f.eval(0)?;
    for n in 1..=n_max {
        let cur = f.eval(n)?;
        if prev.hi() > cur.lo() {
            return Ok(false);
        }
        prev = cur;
    }
    Ok(true)
}

/// Compare a color count against bound(omega), refining precision by
/// doubling until conclusive or `max_bits` is reached. Verdicts cannot
/// flip across precisions: every enclosure contains the true value, and
/// refinements are intersected with their predecessors.
pub fn check_value(
    bound: &BoundFn,
    omega: u64,
    colors: u64,
    max_bits: u32,
) -> Result<Verdict, BoundError> {
    let colors = Rational::from(BigInt::from(colors));
    let mut bits = DEFAULT_PRECISION_BITS.min(max_bits.max(1));
    let mut window = bound.eval_bits(omega, bits)?;
    loop {
        if colors <= *window.lo() {
            return Ok(Verdict::Pass);
        }
        if colors > *window.hi() {
            return Ok(Verdict::Fail);
        }
        if window.is_point() || bits >= max_bits {
            return Ok(Verdict::InconclusivePrecision);
        }
        bits = (bits * 2).min(max_bits);
        window = window.intersect(&bound.eval_bits(omega, bits)?);
    }
}

/// Exact floor of bound(n), refining precision until the enclosure pins
/// down a single integer. `None` means `max_bits` was reached while the
/// window still straddled an integer boundary. Values below zero floor
/// to zero.
pub fn floor_eval(
    bound: &BoundFn,
    n: u64,
    max_bits: u32,
) -> Result<Option<BigUint>, BoundError> {
    let mut bits = DEFAULT_PRECISION_BITS.min(max_bits.max(1));
    let mut window = bound.eval_bits(n, bits)?;
    loop {
        let lo = window.lo().floor();
        if lo == window.hi().floor() || window.is_point() {
            return Ok(Some(lo.to_integer().to_biguint().unwrap_or_default()));
        }
        if bits >= max_bits {
            return Ok(None);
        }
        bits = (bits * 2).min(max_bits);
        window = window.intersect(&bound.eval_bits(n, bits)?);
    }
}

// ---------------------------------------------------------------------------
// x^(log2 x) with directed rounding.

/// Enclosure of x^(log2 x) = 2^((log2 x)^2) for x >= 1. Exact (point)
/// at powers of two; elsewhere a dyadic interval whose relative width
/// shrinks as roughly 2^-bits.
fn pow_log2(x: u64, bits: u32) -> Interval {
    assert!(x >= 1);
    if x.is_power_of_two() {
        let t = x.trailing_zeros() as usize;
        return Interval::point(Rational::from(BigInt::from(BigUint::one() << (t * t))));
    }
    // Stage 1: binary digits of log2 x by repeated squaring of the
    // mantissa, tracked as a scaled-integer interval so truncation stays
    // on the safe side. After k conclusive steps the true log lies in
    // [acc, acc+1] / 2^k.
    let p = bits + 16;
    let f = 2 * p + 64;
    let t = 63 - x.leading_zeros();
    let mut lo = BigUint::from(x) << (f - t) as usize;
    let mut hi = lo.clone();
    let mut acc = BigUint::from(t);
    let mut steps = 0u32;
    let two_scaled = BigUint::one() << (f + 1) as usize;
    let round_up = (BigUint::one() << f as usize) - 1u32;
    for _ in 0..p {
        lo = (&lo * &lo) >> f as usize;
        hi = ((&hi * &hi) + &round_up) >> f as usize;
        acc <<= 1;
        if lo >= two_scaled {
            acc += 1u32;
            lo >>= 1;
            hi = (hi + 1u32) >> 1;
        } else if hi >= two_scaled {
            // The enclosure straddles 2: stop with the digits that are
            // certain. Only reachable when x is almost exactly a dyadic
            // power, which integer inputs never are in practice.
            break;
        }
        steps += 1;
    }
    // Stage 2: square the log enclosure. L in [acc, acc+1]/2^steps, so
    // L^2 in [acc^2, (acc+1)^2] / 2^(2*steps).
    let q = 2 * steps;
    let e_lo = &acc * &acc;
    let e_hi = (&acc + 1u32) * (&acc + 1u32);
    // Stage 3: 2^E per endpoint, rounding outward.
    let g = bits + 64;
    let chain = sqrt2_chain(q, g);
    Interval::new(two_pow_dyadic(&e_lo, q, g, &chain, false), two_pow_dyadic(&e_hi, q, g, &chain, true))
}

/// Scaled enclosures of 2^(1/2^j) for j = 1..=depth: chain[j-1] holds
/// (floor, ceil) approximations at scale 2^g, built by repeated integer
/// square roots of the previous element.
fn sqrt2_chain(depth: u32, g: u32) -> Vec<(BigUint, BigUint)> {
    let mut down = BigUint::from(2u32) << g as usize;
    let mut up = down.clone();
    let mut chain = Vec::with_capacity(depth as usize);
    for _ in 0..depth {
        down = (down << g as usize).sqrt();
        up = isqrt_ceil(&(up << g as usize));
        chain.push((down.clone(), up.clone()));
    }
    chain
}

fn isqrt_ceil(v: &BigUint) -> BigUint {
    if v.is_zero() {
        return BigUint::zero();
    }
    let r = v.sqrt();
    if &(&r * &r) == v {
        r
    } else {
        r + 1u32
    }
}

/// 2^(e / 2^q) at scale 1, rounded down or up, where e >= 0 is a scaled
/// dyadic exponent. Splits into integer shift and fractional bits; each
/// fractional bit contributes one factor from the sqrt chain.
fn two_pow_dyadic(e: &BigUint, q: u32, g: u32, chain: &[(BigUint, BigUint)], up: bool) -> Rational {
    let int_part: BigUint = e >> q as usize;
    let frac = e - (&int_part << q as usize);
    let mut p = BigUint::one() << g as usize;
    let round_up = (BigUint::one() << g as usize) - 1u32;
    for j in 1..=q {
        if frac.bit((q - j) as u64) {
            let (d, u) = &chain[j as usize - 1];
            p = if up { ((p * u) + &round_up) >> g as usize } else { (p * d) >> g as usize };
        }
    }
    let int_shift = u32::try_from(&int_part).expect("exponent integer part fits");
    Rational::new(
        BigInt::from(p << int_shift as usize),
        BigInt::from(BigUint::one() << g as usize),
    )
}

// ---------------------------------------------------------------------------
// Expression grammar.

impl fmt::Display for BoundFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundFn::Constant(c) => write!(f, "const {c}"),
            BoundFn::Polynomial(coeffs) => {
                let single = coeffs.len() > 1
                    && coeffs.last().unwrap().is_one()
                    && coeffs[..coeffs.len() - 1].iter().all(|c| c.is_zero());
                if single {
                    match coeffs.len() - 1 {
                        1 => write!(f, "x"),
                        a => write!(f, "x^{a}"),
                    }
                } else {
                    write!(f, "poly(")?;
                    for (i, c) in coeffs.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{c}")?;
                    }
                    write!(f, ")")
                }
            }
            BoundFn::Exponential { c } => write!(f, "2^({c}*(x-1))"),
            BoundFn::Tabulated(values) => {
                write!(f, "tab(")?;
                for (i, v) in values.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, ")")
            }
            BoundFn::StarPower(inner) => write!(f, "star({inner})"),
            BoundFn::PolyStar { a } => write!(f, "polystar({a})"),
            BoundFn::SupermultStar(inner) => write!(f, "supermultstar({inner})"),
            BoundFn::ExpStar { c } => write!(f, "expstar({c})"),
            BoundFn::KGlueShift { inner, k } => write!(f, "kglue({inner}, {k})"),
        }
    }
}

/// Parse the bound mini-grammar: `x`, `x^A`, `poly(c0,c1,...)`,
/// `2^(c*(x-1))`, `const r`, `tab(r0,r1,...)`, `star(f)`, `polystar(A)`,
/// `supermultstar(f)`, `expstar(c)`, `kglue(f, k)`. Display output
/// parses back to the identical value.
pub fn parse_bound(s: &str) -> Result<BoundFn, BoundError> {
    let mut p = Parser { s: s.as_bytes(), i: 0 };
    let f = p.expr()?;
    p.skip_ws();
    if p.i != p.s.len() {
        return Err(p.err("trailing input"));
    }
    f.validate()?;
    Ok(f)
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> BoundError {
        BoundError::Parse { pos: self.i, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.s.get(self.i).is_some_and(|b| b.is_ascii_whitespace()) {
            self.i += 1;
        }
    }

    fn eat(&mut self, b: u8) -> Result<(), BoundError> {
        self.skip_ws();
        if self.s.get(self.i) == Some(&b) {
            self.i += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", b as char)))
        }
    }

    fn word(&mut self) -> &'a str {
        self.skip_ws();
        let start = self.i;
        while self.s.get(self.i).is_some_and(|b| b.is_ascii_alphabetic()) {
            self.i += 1;
        }
        std::str::from_utf8(&self.s[start..self.i]).unwrap()
    }

    fn natural(&mut self) -> Result<u64, BoundError> {
        self.skip_ws();
        let start = self.i;
        while self.s.get(self.i).is_some_and(|b| b.is_ascii_digit()) {
            self.i += 1;
        }
        if start == self.i {
            return Err(self.err("expected a number"));
        }
        std::str::from_utf8(&self.s[start..self.i])
            .unwrap()
            .parse()
            .map_err(|_| self.err("number too large"))
    }

    fn rational(&mut self) -> Result<Rational, BoundError> {
        let num = self.natural()?;
        self.skip_ws();
        if self.s.get(self.i) == Some(&b'/') {
            self.i += 1;
            let den = self.natural()?;
            if den == 0 {
                return Err(self.err("zero denominator"));
            }
            Ok(Rational::new(BigInt::from(num), BigInt::from(den)))
        } else {
            Ok(Rational::from(BigInt::from(num)))
        }
    }

    fn expr(&mut self) -> Result<BoundFn, BoundError> {
        self.skip_ws();
        match self.s.get(self.i) {
            Some(b'2') => self.exponential(),
            Some(b'x') => {
                self.i += 1;
                self.skip_ws();
                if self.s.get(self.i) == Some(&b'^') {
                    self.i += 1;
                    let a = self.natural()?;
                    if a == 0 || a > u32::MAX as u64 {
                        return Err(self.err("exponent out of range"));
                    }
                    Ok(BoundFn::power(a as u32))
                } else {
                    Ok(BoundFn::identity())
                }
            }
            _ => {
                let w = self.word().to_string();
                match w.as_str() {
                    "const" => Ok(BoundFn::Constant(self.rational()?)),
                    "poly" => {
                        let mut coeffs = Vec::new();
                        self.eat(b'(')?;
                        loop {
                            coeffs.push(BigUint::from(self.natural()?));
                            self.skip_ws();
                            if self.s.get(self.i) == Some(&b',') {
                                self.i += 1;
                            } else {
                                break;
                            }
                        }
                        self.eat(b')')?;
                        while coeffs.len() > 1 && coeffs.last().unwrap().is_zero() {
                            coeffs.pop();
                        }
                        Ok(BoundFn::Polynomial(coeffs))
                    }
                    "tab" => {
                        let mut values = Vec::new();
                        self.eat(b'(')?;
                        loop {
                            values.push(self.rational()?);
                            self.skip_ws();
                            if self.s.get(self.i) == Some(&b',') {
                                self.i += 1;
                            } else {
                                break;
                            }
                        }
                        self.eat(b')')?;
                        Ok(BoundFn::Tabulated(values))
                    }
                    "star" => {
                        self.eat(b'(')?;
                        let inner = self.expr()?;
                        self.eat(b')')?;
                        Ok(star_bound(inner))
                    }
                    "polystar" => {
                        self.eat(b'(')?;
                        let a = self.natural()?;
                        self.eat(b')')?;
                        if a == 0 || a > 1000 {
                            return Err(self.err("polystar degree out of range"));
                        }
                        Ok(poly_star_bound(a as u32))
                    }
                    "supermultstar" => {
                        self.eat(b'(')?;
                        let inner = self.expr()?;
                        self.eat(b')')?;
                        Ok(supermult_star_bound(inner))
                    }
                    "expstar" => {
                        self.eat(b'(')?;
                        let c = self.natural()?;
                        self.eat(b')')?;
                        if c == 0 || c > 1000 {
                            return Err(self.err("expstar rate out of range"));
                        }
                        Ok(exp_star_bound(c as u32))
                    }
                    "kglue" => {
                        self.eat(b'(')?;
                        let inner = self.expr()?;
                        self.eat(b',')?;
                        let k = self.natural()?;
                        self.eat(b')')?;
                        if k == 0 || k > 1_000_000 {
                            return Err(self.err("gluing width out of range"));
                        }
                        Ok(kglue_bound(inner, k as u32))
                    }
                    "" => Err(self.err("expected a bound expression")),
                    other => Err(self.err(&format!("unknown form '{other}'"))),
                }
            }
        }
    }

    fn exponential(&mut self) -> Result<BoundFn, BoundError> {
        self.eat(b'2')?;
        self.eat(b'^')?;
        self.eat(b'(')?;
        let c = self.natural()?;
        if c == 0 || c > 1000 {
            return Err(self.err("rate out of range"));
        }
        self.eat(b'*')?;
        self.eat(b'(')?;
        self.eat(b'x')?;
        self.eat(b'-')?;
        self.eat(b'1')?;
        self.eat(b')')?;
        self.eat(b')')?;
        Ok(BoundFn::Exponential { c: c as u32 })
    }
}
