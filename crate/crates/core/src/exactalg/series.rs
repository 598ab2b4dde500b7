use super::rational::{self, Rational};
use super::{AlgError, Algebra};

/// Power series in a bookkeeping variable `t`, truncated above `t^t_cap`.
/// Always stores exactly `t_cap + 1` coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct TSeries<C> {
    coeffs: Vec<C>,
    t_cap: usize,
}

impl<C: Algebra> TSeries<C> {
    /// `coeffs` must be non-empty; missing coefficients are zero, extra ones dropped.
    pub fn new(mut coeffs: Vec<C>, t_cap: usize) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least its constant coefficient");
        let z = coeffs[0].zero_like();
        coeffs.truncate(t_cap + 1);
        coeffs.resize(t_cap + 1, z);
        TSeries { coeffs, t_cap }
    }

    pub fn constant(c: C, t_cap: usize) -> Self {
        Self::new(vec![c], t_cap)
    }

    /// `1 + x t`.
    pub fn linear(x: C, t_cap: usize) -> Self {
        let one = x.one_like();
        Self::new(vec![one, x], t_cap)
    }

    pub fn t_cap(&self) -> usize {
        self.t_cap
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    pub fn coeff(&self, r: usize) -> Result<&C, AlgError> {
        self.coeffs.get(r).ok_or(AlgError::BeyondCap { requested: r, cap: self.t_cap })
    }

    pub fn zero_like(&self) -> Self {
        Self::constant(self.coeffs[0].zero_like(), self.t_cap)
    }

    pub fn one_like(&self) -> Self {
        Self::constant(self.coeffs[0].one_like(), self.t_cap)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn truncate(&self, t_cap: usize) -> Self {
        Self::new(self.coeffs.clone(), t_cap.min(self.t_cap))
    }

    pub fn add(&self, other: &Self) -> Self {
        let cap = self.t_cap.min(other.t_cap);
        Self::new((0..=cap).map(|r| self.coeffs[r].add(&other.coeffs[r])).collect(), cap)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let cap = self.t_cap.min(other.t_cap);
        Self::new((0..=cap).map(|r| self.coeffs[r].sub(&other.coeffs[r])).collect(), cap)
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.neg()).collect(), self.t_cap)
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.scale(q)).collect(), self.t_cap)
    }

    /// Multiplies every coefficient on the left by `x`.
    pub fn scale_by(&self, x: &C) -> Self {
        Self::new(self.coeffs.iter().map(|c| x.mul(c)).collect(), self.t_cap)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let cap = self.t_cap.min(other.t_cap);
        let mut out: Vec<C> = (0..=cap).map(|_| self.coeffs[0].zero_like()).collect();
        for i in 0..=cap {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=cap - i {
                if other.coeffs[j].is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].add(&self.coeffs[i].mul(&other.coeffs[j]));
            }
        }
        Self::new(out, cap)
    }

    /// Multiplies by `t^k`, keeping the cap.
    pub fn shift(&self, k: usize) -> Self {
        let z = self.coeffs[0].zero_like();
        let mut v = vec![z; k];
        v.extend(self.coeffs.iter().cloned());
        Self::new(v, self.t_cap)
    }

    pub fn ddt(&self) -> Self {
        if self.t_cap == 0 {
            return self.zero_like();
        }
        let v = (1..=self.t_cap).map(|r| self.coeffs[r].scale(&rational::int(r as i64))).collect();
        Self::new(v, self.t_cap - 1)
    }

    fn constant_is(&self, target: &C) -> bool {
        self.coeffs[0] == *target
    }

    pub fn reciprocal(&self) -> Result<Self, AlgError> {
        let one = self.coeffs[0].one_like();
        if !self.constant_is(&one) {
            return Err(AlgError::ConstantTerm("reciprocal needs constant coefficient 1".into()));
        }
        let mut b: Vec<C> = vec![one];
        for k in 1..=self.t_cap {
            let mut acc = self.coeffs[0].zero_like();
            for j in 1..=k {
                if !self.coeffs[j].is_zero() {
                    acc = acc.add(&self.coeffs[j].mul(&b[k - j]));
                }
            }
            b.push(acc.neg());
        }
        Ok(Self::new(b, self.t_cap))
    }

    /// exp of a series with zero constant coefficient, via `k E_k = Σ j U_j E_{k-j}`.
    pub fn exp(&self) -> Result<Self, AlgError> {
        if !self.coeffs[0].is_zero() {
            return Err(AlgError::ConstantTerm("exp needs constant coefficient 0".into()));
        }
        let mut e: Vec<C> = vec![self.coeffs[0].one_like()];
        for k in 1..=self.t_cap {
            let mut acc = self.coeffs[0].zero_like();
            for j in 1..=k {
                if !self.coeffs[j].is_zero() {
                    acc = acc.add(&self.coeffs[j].mul(&e[k - j]).scale(&rational::int(j as i64)));
                }
            }
            e.push(acc.scale(&rational::frac(1, k as i64)));
        }
        Ok(Self::new(e, self.t_cap))
    }

    /// log of a series with constant coefficient 1, via `k L_k = k C_k − Σ_{j<k} j L_j C_{k−j}`.
    pub fn log(&self) -> Result<Self, AlgError> {
        let one = self.coeffs[0].one_like();
        if !self.constant_is(&one) {
            return Err(AlgError::ConstantTerm("log needs constant coefficient 1".into()));
        }
        let mut l: Vec<C> = vec![self.coeffs[0].zero_like()];
        for k in 1..=self.t_cap {
            let mut acc = self.coeffs[k].scale(&rational::int(k as i64));
            for j in 1..k {
                if !l[j].is_zero() && !self.coeffs[k - j].is_zero() {
                    acc = acc.sub(&l[j].mul(&self.coeffs[k - j]).scale(&rational::int(j as i64)));
                }
            }
            l.push(acc.scale(&rational::frac(1, k as i64)));
        }
        Ok(Self::new(l, self.t_cap))
    }

    /// Integer power; negative exponents need constant coefficient 1.
    pub fn pow_i(&self, m: i64) -> Result<Self, AlgError> {
        let base = if m < 0 { self.reciprocal()? } else { self.clone() };
        let mut out = self.one_like();
        let mut sq = base;
        let mut e = m.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(out)
    }

    /// `(1+u)^{m+w} := (1+u)^m · exp(w · log(1+u))` for `u` with zero constant term.
    pub fn binomial_power(u: &Self, m: i64, w: &C) -> Result<Self, AlgError> {
        if !u.coeffs[0].is_zero() {
            return Err(AlgError::ConstantTerm("binomial_power needs u(0) = 0".into()));
        }
        let base = u.add(&u.one_like());
        let mut out = base.pow_i(m)?;
        if !w.is_zero() {
            out = out.mul(&base.log()?.scale_by(w).exp()?);
        }
        Ok(out)
    }

    /// Coefficientwise conversion into another coefficient algebra.
    pub fn map<D: Algebra>(&self, f: impl Fn(&C) -> D) -> TSeries<D> {
        TSeries::new(self.coeffs.iter().map(f).collect(), self.t_cap)
    }

    pub fn try_map<D: Algebra, E>(&self, f: impl Fn(&C) -> Result<D, E>) -> Result<TSeries<D>, E> {
        let v = self.coeffs.iter().map(f).collect::<Result<Vec<_>, E>>()?;
        Ok(TSeries::new(v, self.t_cap))
    }
}
