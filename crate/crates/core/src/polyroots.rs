// SPDX-License-Identifier: Apache-2.0

//! Real-coefficient univariate polynomials and real-root location.
//!
//! Root counting uses Sturm sequences: for a square-free `p` the number of
//! distinct real roots in `(a, b]` is `σ(a) − σ(b)`, where `σ(x)` counts sign
//! changes (zeros skipped) along `p, p′, −rem(p, p′), …`. Isolation bisects
//! an interval until every piece holds one root, and refinement bisects on
//! the sign of `p`.
//!
//! All of this runs in double precision. Callers with badly scaled
//! coefficients should rescale the variable first (see
//! [`Polynomial::scale_variable`]); [`count_roots`] and [`isolate_roots`]
//! do so automatically, mapping the interval onto `[-1, 1]`.

use std::fmt;

use crate::error::{Error, Result};

/// Relative threshold below which remainder coefficients are dropped.
pub const PRUNE_RELATIVE: f64 = 1e-12;

/// Dense polynomial with coefficients in ascending degree. The zero
/// polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[f64]) -> Self {
        roots.iter().fold(Polynomial::new(vec![1.0]), |acc, &r| acc.mul(&Polynomial::new(vec![-r, 1.0])))
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Value at `x` by compensated Horner evaluation, which is as accurate
    /// as Horner's rule in twice the working precision.
    pub fn eval(&self, x: f64) -> f64 {
        let Some((&lead, rest)) = self.coeffs.split_last() else {
            return 0.0;
        };
        let mut s = lead;
        let mut c = 0.0f64;
        for &a in rest.iter().rev() {
            let p = s * x;
            let p_err = s.mul_add(x, -p);
            let t = p + a;
            let z = t - p;
            let t_err = (p - (t - z)) + (a - z);
            c = c.mul_add(x, p_err + t_err);
            s = t;
        }
        s + c
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &Polynomial, k: usize| p.coeffs.get(k).copied().unwrap_or(0.0);
        Polynomial::new((0..n).map(|k| get(self, k) + get(other, k)).collect())
    }

    pub fn scaled(&self, factor: f64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    /// `p(s·x)`: coefficient `k` is multiplied by `s^k`.
    pub fn scale_variable(&self, s: f64) -> Polynomial {
        let mut pow = 1.0;
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let v = c * pow;
                pow *= s;
                v
            })
            .collect();
        Polynomial::new(coeffs)
    }

    /// Positive rescaling to unit max-norm; signs everywhere are preserved.
    pub fn normalized(&self) -> Polynomial {
        let m = self.max_abs();
        if m == 0.0 {
            Polynomial::zero()
        } else {
            self.scaled(1.0 / m)
        }
    }

    /// Long division `self = q·b + r` with `deg r < deg b`. Remainder
    /// coefficients below `PRUNE_RELATIVE · ‖self‖∞` are set to zero.
    pub fn div_rem(&self, b: &Polynomial) -> Result<(Polynomial, Polynomial)> {
        let db = b.degree().ok_or(Error::DivisionByZeroPolynomial)?;
        let Some(da) = self.degree() else {
            return Ok((Polynomial::zero(), Polynomial::zero()));
        };
        if da < db {
            return Ok((Polynomial::zero(), self.clone()));
        }
        let lead = b.leading();
        let mut r = self.coeffs.clone();
        let mut q = vec![0.0; da - db + 1];
        for k in (0..=da - db).rev() {
            let f = r[k + db] / lead;
            q[k] = f;
            r[k + db] = 0.0;
            for j in 0..db {
                r[k + j] -= f * b.coeffs[j];
            }
        }
        r.truncate(db);
        let floor = PRUNE_RELATIVE * self.max_abs();
        for c in r.iter_mut() {
            if c.abs() <= floor {
                *c = 0.0;
            }
        }
        Ok((Polynomial::new(q), Polynomial::new(r)))
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if *c == 0.0 {
                continue;
            }
            if !first {
                write!(f, " {} ", if *c < 0.0 { '-' } else { '+' })?;
            } else if *c < 0.0 {
                write!(f, "-")?;
            }
            first = false;
            match k {
                0 => write!(f, "{}", c.abs())?,
                1 => write!(f, "{}x", c.abs())?,
                _ => write!(f, "{}x^{k}", c.abs())?,
            }
        }
        Ok(())
    }
}

pub fn eval(p: &Polynomial, x: f64) -> f64 {
    p.eval(x)
}

pub fn derivative(p: &Polynomial) -> Polynomial {
    p.derivative()
}

/// Remainder of `a` divided by `b`.
pub fn rem(a: &Polynomial, b: &Polynomial) -> Result<Polynomial> {
    Ok(a.div_rem(b)?.1)
}

/// Sturm sequence of the square-free part of a polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct SturmChain {
    sequence: Vec<Polynomial>,
    gcd: Option<Polynomial>,
}

impl SturmChain {
    /// Builds `p, p′, −rem(p, p′), …` without any square-free reduction. The
    /// last element is `gcd(p, p′)` up to a constant.
    pub fn raw(p: &Polynomial) -> SturmChain {
        let mut sequence = vec![p.normalized()];
        let d = p.derivative().normalized();
        if !d.is_zero() {
            sequence.push(d);
        }
        while sequence.len() >= 2 {
            let n = sequence.len();
            let r = rem(&sequence[n - 2], &sequence[n - 1]).expect("chain elements are nonzero");
            if r.is_zero() {
                break;
            }
            sequence.push(r.scaled(-1.0).normalized());
        }
        SturmChain { sequence, gcd: None }
    }

    pub fn sequence(&self) -> &[Polynomial] {
        &self.sequence
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    /// The nonconstant `gcd(p, p′)` divided out while building the chain,
    /// if `p` had repeated roots.
    pub fn gcd(&self) -> Option<&Polynomial> {
        self.gcd.as_ref()
    }

    /// True when the input had repeated roots and the chain was rebuilt on
    /// its square-free part.
    pub fn had_repeated_roots(&self) -> bool {
        self.gcd.is_some()
    }

    /// The polynomial the chain was built for (square-free, unit max-norm).
    pub fn base(&self) -> &Polynomial {
        &self.sequence[0]
    }

    /// Number of sign changes along the chain at `x`, zeros skipped.
    pub fn sign_changes(&self, x: f64) -> usize {
        let mut changes = 0;
        let mut last = 0.0f64;
        for p in &self.sequence {
            let v = p.eval(x);
            if v == 0.0 {
                continue;
            }
            if last != 0.0 && (v > 0.0) != (last > 0.0) {
                changes += 1;
            }
            last = v;
        }
        changes
    }
}

/// Sturm chain of `p`. If the raw chain ends in a nonconstant gcd (repeated
/// roots), `p` is divided by it and the chain rebuilt on the quotient.
pub fn sturm_chain(p: &Polynomial) -> SturmChain {
    let raw = SturmChain::raw(p);
    let last = raw.sequence.last().expect("chain is never empty");
    if last.degree().unwrap_or(0) == 0 {
        return raw;
    }
    let gcd = last.clone();
    let (square_free, _) = raw.sequence[0].div_rem(&gcd).expect("gcd is nonzero");
    let mut chain = SturmChain::raw(&square_free);
    chain.gcd = Some(gcd);
    chain
}

/// Free-function form of [`SturmChain::sign_changes`].
pub fn sign_changes(chain: &SturmChain, x: f64) -> usize {
    chain.sign_changes(x)
}

/// Chain built on `p(s·v)` with `s = max(|lo|, |hi|)`, so all evaluations
/// happen at `|v| ≤ 1`.
struct ScaledChain {
    chain: SturmChain,
    scale: f64,
}

impl ScaledChain {
    fn new(p: &Polynomial, lo: f64, hi: f64) -> Self {
        let scale = lo.abs().max(hi.abs());
        let scale = if scale > 0.0 && scale.is_finite() { scale } else { 1.0 };
        ScaledChain { chain: sturm_chain(&p.scale_variable(scale)), scale }
    }

    fn sigma(&self, x: f64) -> usize {
        self.chain.sign_changes(x / self.scale)
    }

    fn is_root(&self, x: f64) -> bool {
        self.chain.base().eval(x / self.scale) == 0.0
    }

    fn count(&self, lo: f64, hi: f64) -> usize {
        let lo = if self.is_root(lo) { lo + 1e-12 * (hi - lo) } else { lo };
        self.sigma(lo).saturating_sub(self.sigma(hi))
    }
}

/// Number of distinct real roots of `p` in `(lo, hi]`.
pub fn count_roots(p: &Polynomial, lo: f64, hi: f64) -> usize {
    assert!(lo < hi, "count_roots needs lo < hi");
    if p.degree().unwrap_or(0) == 0 {
        return 0;
    }
    ScaledChain::new(p, lo, hi).count(lo, hi)
}

/// Sign alternations between consecutive nonzero coefficients: an upper
/// bound on the number of positive roots with the same parity.
pub fn descartes_positive_bound(p: &Polynomial) -> usize {
    let signs: Vec<bool> = p.coeffs.iter().filter(|c| **c != 0.0).map(|c| *c > 0.0).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Half-open interval `(lo, hi]` holding exactly one distinct real root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootBracket {
    pub lo: f64,
    pub hi: f64,
}

/// Maximum bisection depth of [`isolate_roots`].
pub const MAX_ISOLATION_DEPTH: usize = 200;

/// Splits `(lo, hi]` into disjoint brackets, one per distinct real root,
/// sorted by position.
pub fn isolate_roots(p: &Polynomial, lo: f64, hi: f64) -> Result<Vec<RootBracket>> {
    assert!(lo < hi, "isolate_roots needs lo < hi");
    if p.degree().unwrap_or(0) == 0 {
        return Ok(Vec::new());
    }
    let chain = ScaledChain::new(p, lo, hi);
    let lo = if chain.is_root(lo) { lo + 1e-12 * (hi - lo) } else { lo };
    let mut out = Vec::new();
    let mut stack = vec![(lo, hi, chain.sigma(lo), chain.sigma(hi), 0usize)];
    while let Some((a, b, sa, sb, depth)) = stack.pop() {
        match sa.saturating_sub(sb) {
            0 => {}
            1 => out.push(RootBracket { lo: a, hi: b }),
            _ => {
                if depth >= MAX_ISOLATION_DEPTH {
                    return Err(Error::MaxDepth(MAX_ISOLATION_DEPTH));
                }
                let mid = 0.5 * (a + b);
                let sm = chain.sigma(mid);
                stack.push((a, mid, sa, sm, depth + 1));
                stack.push((mid, b, sm, sb, depth + 1));
            }
        }
    }
    out.sort_by(|x, y| x.lo.total_cmp(&y.lo));
    Ok(out)
}

/// Refines the root in `bracket` by bisection until the bracket is no wider
/// than `eps`, returning the final midpoint (or an exact root as soon as one
/// is hit). `p` must change sign across the bracket.
pub fn bisect_root(p: &Polynomial, bracket: RootBracket, eps: f64) -> Result<f64> {
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let fa = p.eval(a);
    let fb = p.eval(b);
    if fb == 0.0 {
        return Ok(b);
    }
    // `lo` is excluded from the bracket; a zero there belongs to a
    // neighbouring root, and just right of it `p` has the sign opposite
    // to `p(hi)`.
    let mut a_positive = if fa == 0.0 { fb < 0.0 } else { fa > 0.0 };
    if a_positive == (fb > 0.0) {
        return Err(Error::NoSignChange { lo: a, hi: b });
    }
    while (b - a).abs() > eps {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = p.eval(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if (fm > 0.0) == a_positive {
            a = m;
            a_positive = fm > 0.0;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}
