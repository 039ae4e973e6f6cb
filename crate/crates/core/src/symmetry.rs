//! Evaluation of the symmetric-group identities for q-Bernoulli polynomials
//! and exhaustive verification over all of `S_n`.
//!
//! For a permutation `sigma` write `v = (w_{sigma(1)}, ..., w_{sigma(n)})`,
//! `head = v[..n-1]`, `tail = v[n-1]`, `W = prod(head)` and
//! `S(k) = sum_j (prod_{i != j} head_i) k_j` for residue tuples
//! `0 <= k_j < head_j`. Three expressions are evaluated per permutation:
//!
//! * order-`m` coefficient of the generating-function form, through the
//!   closed-form q-integral of `[W y + prod(w) x + tail S]_q^m`
//!   ([`theorem1_coefficient`]);
//! * `[W]_q^{m-1} sum_k q^{tail S} beta_{m,q^W}(tail x + tail sum_j k_j/head_j)`
//!   ([`theorem2_value`]);
//! * the expansion through T-sums ([`theorem3_value`]).
//!
//! Each is claimed independent of `sigma`, and all three agree.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::carlitz::{beta_poly, beta_poly_at_power};
use crate::error::{Error, Result};
use crate::padic::QExpPoly;
use crate::qcalc::QParam;
use crate::rational::{binomial, rat_pow, serde_text, BigRational};

/// Default cap on the number of permutations evaluated (`6!`).
pub const DEFAULT_PERMUTATION_BUDGET: u128 = 720;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct WeightVector(Vec<u64>);

impl WeightVector {
    pub fn new(weights: Vec<u64>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::InvalidWeights(format!(
                "need at least two weights, got {}",
                weights.len()
            )));
        }
        if weights.contains(&0) {
            return Err(Error::InvalidWeights("weights must be positive".into()));
        }
        Ok(Self(weights))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    /// `(w_{sigma(1)}, ..., w_{sigma(n)})`.
    pub fn permuted(&self, sigma: &Permutation) -> WeightVector {
        WeightVector(sigma.apply(&self.0))
    }
}

impl TryFrom<Vec<u64>> for WeightVector {
    type Error = Error;

    fn try_from(v: Vec<u64>) -> Result<Self> {
        WeightVector::new(v)
    }
}

impl From<WeightVector> for Vec<u64> {
    fn from(w: WeightVector) -> Self {
        w.0
    }
}

/// A permutation of `{1, ..., n}` stored by its images.
///
/// Serialized as the one-based image array `[sigma(1), ..., sigma(n)]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    /// Builds from one-based images.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        let mut zero_based = Vec::with_capacity(n);
        for &img in images {
            if img == 0 || img > n || seen[img - 1] {
                return Err(Error::InvalidPermutation(format!(
                    "{images:?} is not a bijection"
                )));
            }
            seen[img - 1] = true;
            zero_based.push(img - 1);
        }
        Ok(Self(zero_based))
    }

    /// Builds from disjoint cycles in one-based notation, e.g. `(3 1 2)` is
    /// `&[&[3, 1, 2]]` and sends 3 to 1, 1 to 2 and 2 to 3.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (1..=n).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for (pos, &from) in cycle.iter().enumerate() {
                let to = cycle[(pos + 1) % cycle.len()];
                if from == 0 || from > n || to == 0 || to > n || touched[from - 1] {
                    return Err(Error::InvalidPermutation(format!("bad cycle {cycle:?}")));
                }
                touched[from - 1] = true;
                images[from - 1] = to;
            }
        }
        Self::from_images(&images)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// One-based image of one-based `i`.
    pub fn image(&self, i: usize) -> usize {
        self.0[i - 1] + 1
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|i| i + 1).collect()
    }

    pub fn apply<T: Clone>(&self, items: &[T]) -> Vec<T> {
        assert_eq!(items.len(), self.0.len());
        self.0.iter().map(|&i| items[i].clone()).collect()
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &img) in self.0.iter().enumerate() {
            inv[img] = i;
        }
        Self(inv)
    }

    /// `self ∘ other`, i.e. `i ↦ self(other(i))`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len());
        Self(other.0.iter().map(|&i| self.0[i]).collect())
    }

    /// All permutations of `{1..n}` in lexicographic order of image arrays.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut current: Vec<usize> = (0..n).collect();
        let mut out = vec![Self(current.clone())];
        loop {
            let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
                return out;
            };
            let j = (i..n)
                .rev()
                .find(|&j| current[j] > current[i - 1])
                .expect("pivot exists");
            current.swap(i - 1, j);
            current[i..].reverse();
            out.push(Self(current.clone()));
        }
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Permutation::from_images(&v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.one_based()
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.one_based().iter().map(ToString::to_string).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

/// Odometer over `0 <= k_j < bounds_j`, last coordinate fastest.
#[derive(Clone, Debug)]
pub struct ResidueTuples {
    bounds: Vec<u64>,
    next: Option<Vec<u64>>,
}

impl Iterator for ResidueTuples {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        for j in (0..succ.len()).rev() {
            succ[j] += 1;
            if succ[j] < self.bounds[j] {
                self.next = Some(succ);
                return Some(current);
            }
            succ[j] = 0;
        }
        Some(current)
    }
}

/// Residue tuples `(k_1, ..., k_{n-1})` with `0 <= k_l < bounds_l`.
pub fn residue_tuples(bounds: &[u64]) -> ResidueTuples {
    let next = if bounds.iter().all(|&b| b > 0) {
        Some(vec![0; bounds.len()])
    } else {
        None
    };
    ResidueTuples {
        bounds: bounds.to_vec(),
        next,
    }
}

/// Residue tuples for the first `n - 1` entries of the permuted weights.
pub fn residue_tuples_for(weights: &WeightVector, sigma: &Permutation) -> ResidueTuples {
    let permuted = weights.permuted(sigma);
    residue_tuples(&permuted.as_slice()[..permuted.len() - 1])
}

/// `S(k) = sum_j (prod_{i != j} head_i) k_j`.
pub fn residue_offset(head: &[u64], k: &[u64]) -> u64 {
    assert_eq!(head.len(), k.len());
    let total: u64 = head.iter().product();
    head.iter().zip(k).map(|(&w, &kj)| (total / w) * kj).sum()
}

fn as_exp(v: u64) -> i64 {
    i64::try_from(v).expect("exponent fits in i64")
}

/// `T_{m,q}(head | l) = sum_k q^{(l+1) S(k)} [S(k)]_q^{m-l}`, with `0^0 = 1`.
pub fn t_sum(m: u32, l: u32, q: &QParam, head: &[u64]) -> Result<BigRational> {
    if l > m {
        return Err(Error::IndexExceedsOrder { l, m });
    }
    let mut total = BigRational::zero();
    for k in residue_tuples(head) {
        let s = as_exp(residue_offset(head, &k));
        let bracket = q.bracket(s);
        total += q.pow((i64::from(l) + 1) * s) * rat_pow(&bracket, i64::from(m - l))?;
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryInstance {
    pub m: u32,
    pub x: i64,
    pub q: QParam,
    pub weights: WeightVector,
}

impl SymmetryInstance {
    pub fn new(m: u32, x: i64, q: QParam, weights: WeightVector) -> Self {
        Self { m, x, q, weights }
    }

    pub fn with_order(&self, m: u32) -> Self {
        Self { m, ..self.clone() }
    }
}

struct Frame {
    head: Vec<u64>,
    tail: u64,
    head_product: u64,
}

impl Frame {
    fn new(sigma: &Permutation, weights: &WeightVector) -> Result<Self> {
        if sigma.len() != weights.len() {
            return Err(Error::InvalidPermutation(format!(
                "permutation of {} elements applied to {} weights",
                sigma.len(),
                weights.len()
            )));
        }
        let permuted = weights.permuted(sigma).0;
        let (head, tail) = permuted.split_at(permuted.len() - 1);
        Ok(Self {
            head: head.to_vec(),
            tail: tail[0],
            head_product: head.iter().product(),
        })
    }
}

/// `[W]_q^{m-1} sum_k q^{tail S} beta_{m,Q}(tail x + tail sum_j k_j / head_j)`,
/// `Q = q^W`. The fractional argument enters only through
/// `Q^{arg} = q^{tail W x + tail S}`.
pub fn theorem2_value(sigma: &Permutation, inst: &SymmetryInstance) -> Result<BigRational> {
    let frame = Frame::new(sigma, &inst.weights)?;
    let q = &inst.q;
    let w = frame.head_product;
    let big_q = q.power(w);
    let tail = as_exp(frame.tail);
    let prefactor = rat_pow(&q.bracket(as_exp(w)), i64::from(inst.m) - 1)?;
    let mut total = BigRational::zero();
    for k in residue_tuples(&frame.head) {
        let s = as_exp(residue_offset(&frame.head, &k));
        // W * (tail * sum_j k_j / head_j) must be the integer tail * S.
        let fractional: BigRational = frame
            .head
            .iter()
            .zip(&k)
            .map(|(&hj, &kj)| BigRational::new(as_exp(kj).into(), as_exp(hj).into()))
            .sum();
        assert_eq!(
            fractional * BigRational::from_integer((tail * as_exp(w)).into()),
            BigRational::from_integer((tail * s).into()),
            "non-integral exponent of q"
        );
        let exponent = tail * as_exp(w) * inst.x + tail * s;
        let beta = beta_poly_at_power(inst.m as usize, &big_q, &q.pow(exponent))?;
        total += q.pow(tail * s) * beta;
    }
    Ok(prefactor * total)
}

/// `sum_l C(m,l) [W]_q^{l-1} [tail]_q^{m-l} beta_{l,Q}(tail x) T_{m,q^tail}(head | l)`.
pub fn theorem3_value(sigma: &Permutation, inst: &SymmetryInstance) -> Result<BigRational> {
    let frame = Frame::new(sigma, &inst.weights)?;
    let q = &inst.q;
    let big_q = q.power(frame.head_product);
    let q_tail = q.power(frame.tail);
    let bracket_w = q.bracket(as_exp(frame.head_product));
    let bracket_tail = q.bracket(as_exp(frame.tail));
    let arg = as_exp(frame.tail) * inst.x;
    let mut total = BigRational::zero();
    for l in 0..=inst.m {
        let coeff = BigRational::from_integer(binomial(u64::from(inst.m), u64::from(l)));
        let term = coeff
            * rat_pow(&bracket_w, i64::from(l) - 1)?
            * rat_pow(&bracket_tail, i64::from(inst.m - l))?
            * beta_poly(l as usize, &big_q, arg)
            * t_sum(inst.m, l, &q_tail, &frame.head)?;
        total += term;
    }
    Ok(total)
}

/// Order-`m` coefficient (with respect to `t^m / m!`) of the generating
/// function form, `[W]_q^{-1} sum_k q^{tail S} I_{q^W}([W y + P x + tail S]_q^m)`
/// with `P = prod(w)`, where `I_Q` is evaluated in closed form.
pub fn theorem1_coefficient(sigma: &Permutation, inst: &SymmetryInstance) -> Result<BigRational> {
    let frame = Frame::new(sigma, &inst.weights)?;
    let q = &inst.q;
    let full_product: u64 = inst.weights.as_slice().iter().product();
    let tail = as_exp(frame.tail);
    let mut total = BigRational::zero();
    for k in residue_tuples(&frame.head) {
        let s = as_exp(residue_offset(&frame.head, &k));
        let offset = as_exp(full_product) * inst.x + tail * s;
        let integrand = QExpPoly::bracket_power(inst.m, q.value(), offset, frame.head_product);
        total += q.pow(tail * s) * integrand.q_integral_exact()?;
    }
    Ok(total / q.bracket(as_exp(frame.head_product)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TheoremKind {
    Thm1,
    Thm2,
    Thm3,
    Cross,
}

impl TheoremKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TheoremKind::Thm1 => "thm1",
            TheoremKind::Thm2 => "thm2",
            TheoremKind::Thm3 => "thm3",
            TheoremKind::Cross => "cross",
        }
    }
}

impl fmt::Display for TheoremKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "thm1" => Ok(TheoremKind::Thm1),
            "thm2" => Ok(TheoremKind::Thm2),
            "thm3" => Ok(TheoremKind::Thm3),
            "cross" => Ok(TheoremKind::Cross),
            other => Err(format!("unknown theorem kind {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationValue {
    pub permutation: Permutation,
    #[serde(with = "serde_text")]
    pub value: BigRational,
    /// Second route evaluated for the same permutation, when the check has one.
    #[serde(
        default,
        with = "serde_text::option",
        skip_serializing_if = "Option::is_none"
    )]
    pub cross_value: Option<BigRational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderCheck {
    pub m: u32,
    pub values: Vec<PermutationValue>,
    pub verdict: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MismatchKind {
    /// Two permutations gave different values.
    Permutation,
    /// The two routes disagree for one permutation.
    CrossRoute,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub kind: MismatchKind,
    pub m: u32,
    pub first: Permutation,
    #[serde(with = "serde_text")]
    pub first_value: BigRational,
    pub second: Permutation,
    #[serde(with = "serde_text")]
    pub second_value: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub theorem: TheoremKind,
    /// Series order, or the maximal order for `thm1`.
    pub m: u32,
    pub x: i64,
    pub q: QParam,
    pub weights: WeightVector,
    pub orders: Vec<OrderCheck>,
    pub verdict: bool,
    pub mismatch: Option<Mismatch>,
}

/// Per-permutation evaluator: primary value plus an optional second route.
pub type Evaluation = (BigRational, Option<BigRational>);

fn factorial_u128(n: usize) -> Option<u128> {
    (1..=n as u128).try_fold(1u128, |acc, k| acc.checked_mul(k))
}

pub fn check_budget(n: usize, budget: u128) -> Result<()> {
    match factorial_u128(n) {
        Some(count) if count <= budget => Ok(()),
        count => Err(Error::BudgetExceeded {
            n,
            count: count.unwrap_or(u128::MAX),
            budget,
        }),
    }
}

/// Evaluates `eval` for every permutation of the instance's weights and
/// compares. Values are listed in lexicographic permutation order no matter
/// how the parallel evaluation finishes.
pub fn check_invariance<F>(
    inst: &SymmetryInstance,
    budget: u128,
    eval: F,
) -> Result<(OrderCheck, Option<Mismatch>)>
where
    F: Fn(&Permutation, &SymmetryInstance) -> Result<Evaluation> + Sync,
{
    let n = inst.weights.len();
    check_budget(n, budget)?;
    let perms = Permutation::all(n);
    let values = perms
        .into_par_iter()
        .map(|sigma| {
            let (value, cross_value) = eval(&sigma, inst)?;
            Ok(PermutationValue {
                permutation: sigma,
                value,
                cross_value,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut mismatch = None;
    for pv in &values {
        if let Some(cross) = &pv.cross_value {
            if *cross != pv.value {
                mismatch = Some(Mismatch {
                    kind: MismatchKind::CrossRoute,
                    m: inst.m,
                    first: pv.permutation.clone(),
                    first_value: pv.value.clone(),
                    second: pv.permutation.clone(),
                    second_value: cross.clone(),
                });
                break;
            }
        }
    }
    if mismatch.is_none() {
        let first = &values[0];
        if let Some(other) = values.iter().find(|pv| pv.value != first.value) {
            mismatch = Some(Mismatch {
                kind: MismatchKind::Permutation,
                m: inst.m,
                first: first.permutation.clone(),
                first_value: first.value.clone(),
                second: other.permutation.clone(),
                second_value: other.value.clone(),
            });
        }
    }
    let check = OrderCheck {
        m: inst.m,
        values,
        verdict: mismatch.is_none(),
    };
    Ok((check, mismatch))
}

fn assemble(
    theorem: TheoremKind,
    inst: &SymmetryInstance,
    checks: Vec<(OrderCheck, Option<Mismatch>)>,
) -> VerificationReport {
    let mut orders = Vec::with_capacity(checks.len());
    let mut mismatch = None;
    for (check, mm) in checks {
        if mismatch.is_none() {
            mismatch = mm;
        }
        orders.push(check);
    }
    VerificationReport {
        theorem,
        m: inst.m,
        x: inst.x,
        q: inst.q.clone(),
        weights: inst.weights.clone(),
        verdict: mismatch.is_none(),
        orders,
        mismatch,
    }
}

/// Checks the chosen expression over all of `S_n`. `Cross` compares
/// [`theorem2_value`] with [`theorem3_value`] for every permutation on top of
/// the invariance check; `Thm1` delegates to [`verify_theorem1`] with
/// `inst.m` as the maximal order.
pub fn verify_theorem(
    kind: TheoremKind,
    inst: &SymmetryInstance,
    budget: u128,
) -> Result<VerificationReport> {
    let check = match kind {
        TheoremKind::Thm1 => return verify_theorem1(inst.m, inst, budget),
        TheoremKind::Thm2 => {
            check_invariance(inst, budget, |s, i| Ok((theorem2_value(s, i)?, None)))?
        }
        TheoremKind::Thm3 => {
            check_invariance(inst, budget, |s, i| Ok((theorem3_value(s, i)?, None)))?
        }
        TheoremKind::Cross => check_invariance(inst, budget, |s, i| {
            Ok((theorem2_value(s, i)?, Some(theorem3_value(s, i)?)))
        })?,
    };
    Ok(assemble(kind, inst, vec![check]))
}

/// Coefficient-wise check of the generating-function identity: for every
/// order `m <= max_order` the order-`m` coefficient must be the same for all
/// permutations and must equal [`theorem2_value`].
pub fn verify_theorem1(
    max_order: u32,
    inst: &SymmetryInstance,
    budget: u128,
) -> Result<VerificationReport> {
    let base = inst.with_order(max_order);
    let checks = (0..=max_order)
        .map(|m| {
            check_invariance(&inst.with_order(m), budget, |s, i| {
                Ok((theorem1_coefficient(s, i)?, Some(theorem2_value(s, i)?)))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(TheoremKind::Thm1, &base, checks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carlitz::carlitz_beta;
    use crate::rational::{int, ratio};

    fn q(n: i64, d: i64) -> QParam {
        QParam::new(ratio(n, d)).unwrap()
    }

    fn wv(w: &[u64]) -> WeightVector {
        WeightVector::new(w.to_vec()).unwrap()
    }

    #[test]
    fn weight_vector_validation() {
        assert!(WeightVector::new(vec![1]).is_err());
        assert!(WeightVector::new(vec![1, 0]).is_err());
        assert!(WeightVector::new(vec![1, 1]).is_ok());
    }

    #[test]
    fn permutations_are_lexicographic() {
        let all = Permutation::all(3);
        let images: Vec<Vec<usize>> = all.iter().map(Permutation::one_based).collect();
        assert_eq!(
            images,
            vec![
                vec![1, 2, 3],
                vec![1, 3, 2],
                vec![2, 1, 3],
                vec![2, 3, 1],
                vec![3, 1, 2],
                vec![3, 2, 1]
            ]
        );
        assert_eq!(Permutation::all(5).len(), 120);
        assert_eq!(Permutation::all(1).len(), 1);
    }

    #[test]
    fn permutation_algebra() {
        let s = Permutation::from_images(&[2, 3, 1]).unwrap();
        assert_eq!(s.compose(&s.inverse()), Permutation::identity(3));
        assert!(Permutation::from_images(&[1, 1, 2]).is_err());
        assert!(Permutation::from_images(&[0, 1]).is_err());
        let c = Permutation::from_cycles(3, &[&[3, 1, 2]]).unwrap();
        assert_eq!(c.one_based(), vec![2, 3, 1]);
    }

    #[test]
    fn residue_tuple_examples() {
        let id2 = Permutation::identity(2);
        let t: Vec<_> = residue_tuples_for(&wv(&[1, 1]), &id2).collect();
        assert_eq!(t, vec![vec![0]]);

        let w = wv(&[2, 3, 5]);
        let t: Vec<_> = residue_tuples_for(&w, &Permutation::identity(3)).collect();
        assert_eq!(
            t,
            vec![
                vec![0, 0],
                vec![0, 1],
                vec![0, 2],
                vec![1, 0],
                vec![1, 1],
                vec![1, 2]
            ]
        );

        // (3 1 2) in cycle notation: sigma(1) = 2, sigma(2) = 3.
        let sigma = Permutation::from_cycles(3, &[&[3, 1, 2]]).unwrap();
        let t: Vec<_> = residue_tuples_for(&w, &sigma).collect();
        assert_eq!(t.len(), 15);
        assert!(t.iter().all(|k| k[0] < 3 && k[1] < 5));
        let mut sorted = t.clone();
        sorted.sort();
        assert_eq!(sorted, t);

        assert_eq!(residue_tuples(&[]).count(), 1);
        assert_eq!(residue_tuples(&[3, 0]).count(), 0);
    }

    #[test]
    fn residue_offset_values() {
        assert_eq!(residue_offset(&[2, 3], &[1, 2]), 3 + 2 * 2);
        assert_eq!(residue_offset(&[4], &[3]), 3);
        assert_eq!(residue_offset(&[2, 3, 5], &[1, 1, 1]), 15 + 10 + 6);
    }

    #[test]
    fn t_sum_examples() {
        for m in 0..5 {
            for l in 0..=m {
                let expected = if m == l { int(1) } else { int(0) };
                assert_eq!(t_sum(m, l, &q(3, 5), &[1]).unwrap(), expected);
            }
        }
        assert_eq!(t_sum(2, 1, &q(2, 1), &[2]).unwrap(), int(4));

        // m = l over weights (2, 3): double geometric sum.
        let qq = q(-2, 1);
        for l in 0..4u32 {
            let mut direct = BigRational::zero();
            for k1 in 0..2i64 {
                for k2 in 0..3i64 {
                    direct += qq.pow((i64::from(l) + 1) * (3 * k1 + 2 * k2));
                }
            }
            assert_eq!(t_sum(l, l, &qq, &[2, 3]).unwrap(), direct);
        }
        assert_eq!(
            t_sum(1, 2, &qq, &[2]),
            Err(Error::IndexExceedsOrder { l: 2, m: 1 })
        );
    }

    #[test]
    fn collapse_to_beta_polynomial() {
        for m in 0..6 {
            for x in -1..3 {
                let inst = SymmetryInstance::new(m, x, q(2, 1), wv(&[1, 1]));
                let expected = beta_poly(m as usize, &inst.q, x);
                for sigma in Permutation::all(2) {
                    assert_eq!(theorem2_value(&sigma, &inst).unwrap(), expected);
                    assert_eq!(theorem3_value(&sigma, &inst).unwrap(), expected);
                    assert_eq!(theorem1_coefficient(&sigma, &inst).unwrap(), expected);
                }
            }
        }
        let inst = SymmetryInstance::new(3, 0, q(2, 1), wv(&[1, 1, 1]));
        for sigma in Permutation::all(3) {
            assert_eq!(
                theorem2_value(&sigma, &inst).unwrap(),
                carlitz_beta(3, &inst.q)
            );
        }
    }

    #[test]
    fn small_examples_agree() {
        let inst = SymmetryInstance::new(1, 0, q(2, 1), wv(&[1, 2]));
        let a = theorem2_value(&Permutation::identity(2), &inst).unwrap();
        let b = theorem2_value(&Permutation::from_images(&[2, 1]).unwrap(), &inst).unwrap();
        assert_eq!(a, b);

        let inst = SymmetryInstance::new(2, 1, q(3, 5), wv(&[2, 3]));
        for sigma in Permutation::all(2) {
            assert_eq!(
                theorem3_value(&sigma, &inst).unwrap(),
                theorem2_value(&sigma, &inst).unwrap()
            );
        }
    }

    #[test]
    fn order_zero_is_a_weighted_geometric_sum() {
        let inst = SymmetryInstance::new(0, 1, q(1, 2), wv(&[2, 3, 2]));
        for sigma in Permutation::all(3) {
            let frame = Frame::new(&sigma, &inst.weights).unwrap();
            let mut direct = BigRational::zero();
            for k in residue_tuples(&frame.head) {
                let s = residue_offset(&frame.head, &k) as i64;
                direct += inst.q.pow(frame.tail as i64 * s);
            }
            direct /= inst.q.bracket(frame.head_product as i64);
            assert_eq!(theorem2_value(&sigma, &inst).unwrap(), direct);
            assert_eq!(theorem3_value(&sigma, &inst).unwrap(), direct);
        }
    }

    #[test]
    fn relabeling_invariance() {
        let inst = SymmetryInstance::new(3, 2, q(-2, 1), wv(&[1, 2, 3]));
        let pi = Permutation::from_images(&[3, 1, 2]).unwrap();
        let relabeled = SymmetryInstance {
            weights: inst.weights.permuted(&pi),
            ..inst.clone()
        };
        for sigma in Permutation::all(3) {
            let sigma_prime = pi.inverse().compose(&sigma);
            assert_eq!(
                theorem2_value(&sigma_prime, &relabeled).unwrap(),
                theorem2_value(&sigma, &inst).unwrap()
            );
        }
    }

    #[test]
    fn verify_reports() {
        let inst = SymmetryInstance::new(3, 0, q(2, 1), wv(&[1, 1]));
        let report = verify_theorem(TheoremKind::Thm2, &inst, DEFAULT_PERMUTATION_BUDGET).unwrap();
        assert!(report.verdict);
        assert_eq!(report.orders.len(), 1);
        assert!(report.orders[0]
            .values
            .iter()
            .all(|v| v.value == carlitz_beta(3, &inst.q)));

        let inst = SymmetryInstance::new(4, 1, q(3, 5), wv(&[2, 3, 4]));
        let report = verify_theorem(TheoremKind::Cross, &inst, DEFAULT_PERMUTATION_BUDGET).unwrap();
        assert!(report.verdict);
        assert_eq!(report.orders[0].values.len(), 6);
        assert!(report.orders[0]
            .values
            .iter()
            .all(|v| v.cross_value.is_some()));
    }

    #[test]
    fn theorem1_examples() {
        let inst = SymmetryInstance::new(0, 1, q(2, 1), wv(&[2, 3]));
        let r0 = verify_theorem1(0, &inst, DEFAULT_PERMUTATION_BUDGET).unwrap();
        assert!(r0.verdict);
        assert_eq!(r0.orders.len(), 1);

        let r = verify_theorem1(4, &inst, DEFAULT_PERMUTATION_BUDGET).unwrap();
        assert!(r.verdict);
        assert_eq!(r.orders.len(), 5);

        let inst = SymmetryInstance::new(0, 0, q(1, 2), wv(&[1, 2, 3]));
        assert!(
            verify_theorem1(6, &inst, DEFAULT_PERMUTATION_BUDGET)
                .unwrap()
                .verdict
        );
    }

    #[test]
    fn corrupted_evaluator_is_caught() {
        // Drop the tail factor from the q-power weighting.
        let broken = |sigma: &Permutation, inst: &SymmetryInstance| -> Result<Evaluation> {
            let frame = Frame::new(sigma, &inst.weights)?;
            let q = &inst.q;
            let big_q = q.power(frame.head_product);
            let w = frame.head_product as i64;
            let tail = frame.tail as i64;
            let mut total = BigRational::zero();
            for k in residue_tuples(&frame.head) {
                let s = residue_offset(&frame.head, &k) as i64;
                let beta = beta_poly_at_power(
                    inst.m as usize,
                    &big_q,
                    &q.pow(tail * w * inst.x + tail * s),
                )?;
                total += q.pow(s + 1) * beta;
            }
            Ok((rat_pow(&q.bracket(w), i64::from(inst.m) - 1)? * total, None))
        };
        let inst = SymmetryInstance::new(2, 1, q(2, 1), wv(&[1, 2, 3]));
        let (check, mismatch) =
            check_invariance(&inst, DEFAULT_PERMUTATION_BUDGET, broken).unwrap();
        assert!(!check.verdict);
        assert_eq!(mismatch.unwrap().kind, MismatchKind::Permutation);

        let off_by_one = |sigma: &Permutation, inst: &SymmetryInstance| -> Result<Evaluation> {
            let bumped = inst.with_order(inst.m + 1);
            Ok((
                theorem2_value(sigma, inst)?,
                Some(theorem3_value(sigma, &bumped)?),
            ))
        };
        let (check, mismatch) =
            check_invariance(&inst, DEFAULT_PERMUTATION_BUDGET, off_by_one).unwrap();
        assert!(!check.verdict);
        assert_eq!(mismatch.unwrap().kind, MismatchKind::CrossRoute);
    }

    #[test]
    fn budget_enforced() {
        let inst = SymmetryInstance::new(0, 0, q(2, 1), wv(&[1, 1, 1, 1, 1, 1, 1]));
        assert!(matches!(
            verify_theorem(TheoremKind::Thm2, &inst, DEFAULT_PERMUTATION_BUDGET),
            Err(Error::BudgetExceeded {
                n: 7,
                count: 5040,
                budget: 720
            })
        ));
        assert!(check_budget(6, 720).is_ok());
    }

    #[test]
    fn report_serializes_rationals_as_text() {
        let inst = SymmetryInstance::new(1, 0, q(2, 1), wv(&[1, 1]));
        let report = verify_theorem(TheoremKind::Thm2, &inst, DEFAULT_PERMUTATION_BUDGET).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["orders"][0]["values"][0]["value"], "-1/3");
        assert_eq!(
            json["orders"][0]["values"][1]["permutation"],
            serde_json::json!([2, 1])
        );
        let back: VerificationReport = serde_json::from_value(json).unwrap();
        assert_eq!(back, report);
    }
}
