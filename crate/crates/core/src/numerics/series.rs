//! Sequences that eventually satisfy a linear recurrence, with exact tail sums.

use super::scalar::{Ctx, Scalar};
use super::NumericsError;

/// Characteristic polynomial of a square matrix, leading coefficient first:
/// `det(xI - m) = sum_k out[k] x^(n-k)`. Division free (Berkowitz).
pub fn charpoly<C: Ctx>(ctx: &C, m: &[Vec<C::S>]) -> Vec<C::S> {
    let n = m.len();
    let mut p = vec![ctx.one()];
    for r in 0..n {
        // first column of the Toeplitz factor: 1, -a, -R C, -R M C, ...
        let mut col = Vec::with_capacity(r + 2);
        col.push(ctx.one());
        col.push(m[r][r].neg());
        let mut vec_c: Vec<C::S> = (0..r).map(|i| m[i][r].clone()).collect();
        for _ in 0..r {
            let rc = (0..r).fold(ctx.zero(), |acc, j| acc.add(&m[r][j].mul(&vec_c[j])));
            col.push(rc.neg());
            vec_c = (0..r)
                .map(|i| (0..r).fold(ctx.zero(), |acc, j| acc.add(&m[i][j].mul(&vec_c[j]))))
                .collect();
        }
        let next: Vec<C::S> = (0..r + 2)
            .map(|i| {
                (0..=i.min(r)).fold(ctx.zero(), |acc, j| acc.add(&col[i - j].mul(&p[j])))
            })
            .collect();
        p = next;
    }
    p
}

/// Companion matrix of `s_n = sum_k c[k-1] s_(n-k)`.
pub fn companion<C: Ctx>(ctx: &C, rec: &[C::S]) -> Vec<Vec<C::S>> {
    let d = rec.len();
    let mut m = vec![vec![ctx.zero(); d]; d];
    for i in 0..d.saturating_sub(1) {
        m[i][i + 1] = ctx.one();
    }
    if d > 0 {
        for k in 1..=d {
            m[d - 1][d - k] = rec[k - 1].clone();
        }
    }
    m
}

pub fn kronecker<S: Scalar>(a: &[Vec<S>], b: &[Vec<S>]) -> Vec<Vec<S>> {
    let (n, m) = (a.len(), b.len());
    let mut out = Vec::with_capacity(n * m);
    for i in 0..n {
        for k in 0..m {
            let row = (0..n)
                .flat_map(|j| (0..m).map(move |l| (j, l)))
                .map(|(j, l)| a[i][j].mul(&b[k][l]))
                .collect();
            out.push(row);
        }
    }
    out
}

/// Recurrence coefficients annihilating every product `x_n y_n` of a sequence
/// following `rx` with one following `ry`.
pub fn product_recurrence<C: Ctx>(ctx: &C, rx: &[C::S], ry: &[C::S]) -> Vec<C::S> {
    if rx.is_empty() || ry.is_empty() {
        return Vec::new();
    }
    let k = kronecker(&companion(ctx, rx), &companion(ctx, ry));
    charpoly(ctx, &k)[1..].iter().map(|c| c.neg()).collect()
}

/// A two-sided sequence that vanishes below `start`, takes the values `head`
/// on `start..start + head.len()` and continues by `s_n = sum_k rec[k-1] s_(n-k)`.
#[derive(Clone, Debug)]
pub struct EventualSeq<S: Scalar> {
    start: i64,
    head: Vec<S>,
    rec: Vec<S>,
}

impl<S: Scalar> EventualSeq<S> {
    pub fn new(start: i64, head: Vec<S>, rec: Vec<S>) -> Self {
        assert!(head.len() >= rec.len(), "head shorter than the recurrence order");
        EventualSeq { start, head, rec }
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn order(&self) -> usize {
        self.rec.len()
    }

    pub fn recurrence(&self) -> &[S] {
        &self.rec
    }

    /// First index at which the recurrence is used.
    pub fn regime(&self) -> i64 {
        self.start + self.head.len() as i64
    }

    /// Values on `from..to`.
    pub fn values<C: Ctx<S = S>>(&self, ctx: &C, from: i64, to: i64) -> Vec<S> {
        if to <= from {
            return Vec::new();
        }
        let mut out = Vec::with_capacity((to - from) as usize);
        let lo = from.max(self.start);
        for _ in from..lo.min(to) {
            out.push(ctx.zero());
        }
        if lo >= to {
            return out;
        }
        let mut buf: Vec<S> = self.head.clone();
        let need = (to - self.start) as usize;
        while buf.len() < need {
            let n = buf.len();
            let next = self
                .rec
                .iter()
                .enumerate()
                .fold(ctx.zero(), |acc, (k, c)| acc.add(&c.mul(&buf[n - 1 - k])));
            if self.rec.is_empty() {
                buf.push(ctx.zero());
            } else {
                buf.push(next);
            }
        }
        out.extend_from_slice(&buf[(lo - self.start) as usize..need]);
        out
    }

    pub fn value<C: Ctx<S = S>>(&self, ctx: &C, n: i64) -> S {
        self.values(ctx, n, n + 1).pop().expect("one value")
    }

    /// `t_n = s_(n+k)`.
    pub fn shift(&self, k: i64) -> Self {
        EventualSeq {
            start: self.start - k,
            head: self.head.clone(),
            rec: self.rec.clone(),
        }
    }

    pub fn conj(&self) -> Self {
        EventualSeq {
            start: self.start,
            head: self.head.iter().map(|x| x.conj()).collect(),
            rec: self.rec.iter().map(|x| x.conj()).collect(),
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        EventualSeq {
            start: self.start,
            head: self.head.iter().map(|x| x.mul(c)).collect(),
            rec: self.rec.clone(),
        }
    }

    /// Pointwise product.
    pub fn mul<C: Ctx<S = S>>(&self, ctx: &C, o: &Self) -> Self {
        let rec = product_recurrence(ctx, &self.rec, &o.rec);
        let start = self.start.max(o.start);
        let state_from = (self.regime() - self.order() as i64).max(o.regime() - o.order() as i64);
        let regime = (state_from + rec.len() as i64).max(start + rec.len() as i64);
        let a = self.values(ctx, start, regime);
        let b = o.values(ctx, start, regime);
        let head = a.iter().zip(&b).map(|(x, y)| x.mul(y)).collect();
        EventualSeq::new(start, head, rec)
    }

    /// Pointwise sum. Both recurrences are merged into one annihilator.
    pub fn add<C: Ctx<S = S>>(&self, ctx: &C, o: &Self) -> Self {
        let rec = poly_lcm_product(ctx, &self.rec, &o.rec);
        let start = self.start.min(o.start);
        let regime = (self.regime() + o.order() as i64)
            .max(o.regime() + self.order() as i64)
            .max(start + rec.len() as i64);
        let a = self.values(ctx, start, regime);
        let b = o.values(ctx, start, regime);
        let head = a.iter().zip(&b).map(|(x, y)| x.add(y)).collect();
        EventualSeq::new(start, head, rec)
    }

    /// `sum_(n >= from) s_n`, by the closed form of the generating function
    /// for the recurrent part. Outside the region of convergence this is the
    /// analytic continuation; a pole at 1 is reported as divergence.
    pub fn sum_from<C: Ctx<S = S>>(&self, ctx: &C, from: i64) -> Result<S, NumericsError> {
        let n0 = from.max(self.start);
        let d = self.order() as i64;
        let m = n0.max(self.regime() - d);
        let explicit = self.values(ctx, n0, m);
        let mut total = explicit.iter().fold(ctx.zero(), |acc, x| acc.add(x));
        if d == 0 {
            return Ok(total);
        }
        let u = self.values(ctx, m, m + d);
        // numerator coefficients n_j = u_j - sum_(k=1..j) c_k u_(j-k)
        let mut num = ctx.zero();
        for j in 0..d as usize {
            let mut nj = u[j].clone();
            for k in 1..=j {
                nj = nj.sub(&self.rec[k - 1].mul(&u[j - k]));
            }
            num = num.add(&nj);
        }
        let den = self.rec.iter().fold(ctx.one(), |acc, c| acc.sub(c));
        if den.is_zero() {
            return Err(NumericsError::DivergentSeries);
        }
        let tail = num.div(&den).map_err(|_| NumericsError::DivergentSeries)?;
        total = total.add(&tail);
        Ok(total)
    }

    pub fn sum_all<C: Ctx<S = S>>(&self, ctx: &C) -> Result<S, NumericsError> {
        self.sum_from(ctx, self.start)
    }

    /// Checks `s_n = sum_k c_k s_(n-k)` for every `n` in `from..to` against
    /// the stored values.
    pub fn follows<C: Ctx<S = S>>(&self, ctx: &C, rec: &[S], from: i64, to: i64) -> bool {
        let d = rec.len() as i64;
        let vals = self.values(ctx, from - d, to);
        (0..(to - from) as usize).all(|i| {
            let n = i + d as usize;
            let pred = rec
                .iter()
                .enumerate()
                .fold(ctx.zero(), |acc, (k, c)| acc.add(&c.mul(&vals[n - 1 - k])));
            pred.same(&vals[n])
        })
    }
}

/// Coefficients of the product of the two recurrence polynomials, which
/// annihilates any sum of a sequence following `a` and one following `b`.
fn poly_lcm_product<C: Ctx>(ctx: &C, a: &[C::S], b: &[C::S]) -> Vec<C::S> {
    // polynomials 1 - sum c_k z^k, multiplied
    let pa: Vec<C::S> = std::iter::once(ctx.one()).chain(a.iter().map(|c| c.neg())).collect();
    let pb: Vec<C::S> = std::iter::once(ctx.one()).chain(b.iter().map(|c| c.neg())).collect();
    if a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.same(y)) {
        return a.to_vec();
    }
    let mut prod = vec![ctx.zero(); pa.len() + pb.len() - 1];
    for (i, x) in pa.iter().enumerate() {
        for (j, y) in pb.iter().enumerate() {
            prod[i + j] = prod[i + j].add(&x.mul(y));
        }
    }
    prod[1..].iter().map(|c| c.neg()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::exact::{ratio, ExactScalar};
    use crate::numerics::scalar::ExactCtx;

    fn c() -> ExactCtx {
        ExactCtx::new(2)
    }

    fn r(n: i64, d: i64) -> ExactScalar {
        ExactScalar::from_rational(ratio(n, d), 2)
    }

    #[test]
    fn charpoly_of_two_by_two() {
        // [[1,2],[3,4]]: x^2 - 5x - 2
        let m = vec![vec![r(1, 1), r(2, 1)], vec![r(3, 1), r(4, 1)]];
        let p = charpoly(&c(), &m);
        assert_eq!(p, vec![r(1, 1), r(-5, 1), r(-2, 1)]);
    }

    #[test]
    fn charpoly_of_three_by_three() {
        // upper triangular with diagonal 2,3,5 plus noise above
        let m = vec![
            vec![r(2, 1), r(7, 1), r(1, 1)],
            vec![r(0, 1), r(3, 1), r(4, 1)],
            vec![r(0, 1), r(0, 1), r(5, 1)],
        ];
        let p = charpoly(&c(), &m);
        // (x-2)(x-3)(x-5) = x^3 - 10x^2 + 31x - 30
        assert_eq!(p, vec![r(1, 1), r(-10, 1), r(31, 1), r(-30, 1)]);
    }

    #[test]
    fn geometric_tail() {
        // s_n = 2^-n from 0
        let s = EventualSeq::new(0, vec![r(1, 1)], vec![r(1, 2)]);
        assert_eq!(s.sum_all(&c()).unwrap(), r(2, 1));
        assert_eq!(s.sum_from(&c(), 3).unwrap(), r(1, 4));
        assert_eq!(s.value(&c(), 4), r(1, 16));
        assert_eq!(s.value(&c(), -1), r(0, 1));
    }

    #[test]
    fn product_of_geometrics() {
        let a = EventualSeq::new(0, vec![r(1, 1)], vec![r(1, 2)]);
        let b = EventualSeq::new(1, vec![r(3, 1)], vec![r(1, 3)]);
        let p = a.mul(&c(), &b);
        // sum_(n>=1) 2^-n 3^(2-n) = 9 * (1/6)/(1-1/6) = 9/5
        assert_eq!(p.sum_all(&c()).unwrap(), r(9, 5));
    }

    #[test]
    fn repeated_root_products() {
        // n 2^-n satisfies x^2 - x + 1/4
        let a = EventualSeq::new(0, vec![r(0, 1), r(1, 2)], vec![r(1, 1), r(-1, 4)]);
        let sq = a.mul(&c(), &a);
        let brute: ExactScalar = (0..200)
            .map(|n| sq.value(&c(), n))
            .fold(r(0, 1), |acc, x| acc + x);
        let closed = sq.sum_all(&c()).unwrap();
        // sum n^2 4^-n = (1/4)(1+1/4)/(1-1/4)^3 = 20/27
        assert_eq!(closed, r(20, 27));
        assert!((brute.to_f64() - closed.to_f64()).abs() < 1e-12);
    }

    #[test]
    fn pole_is_divergence() {
        let s = EventualSeq::new(0, vec![r(1, 1)], vec![r(1, 1)]);
        assert!(matches!(s.sum_all(&c()), Err(NumericsError::DivergentSeries)));
    }

    #[test]
    fn continuation_outside_convergence() {
        // sum 2^n "=" 1/(1-2) = -1
        let s = EventualSeq::new(0, vec![r(1, 1)], vec![r(2, 1)]);
        assert_eq!(s.sum_all(&c()).unwrap(), r(-1, 1));
    }

    #[test]
    fn sums_of_sequences() {
        let a = EventualSeq::new(0, vec![r(1, 1)], vec![r(1, 2)]);
        let b = EventualSeq::new(-2, vec![r(5, 1), r(1, 1)], vec![r(1, 3)]);
        let s = a.add(&c(), &b);
        for n in -3..8 {
            assert_eq!(s.value(&c(), n), a.value(&c(), n) + b.value(&c(), n));
        }
        assert_eq!(
            s.sum_all(&c()).unwrap(),
            a.sum_all(&c()).unwrap() + b.sum_all(&c()).unwrap()
        );
    }
}
