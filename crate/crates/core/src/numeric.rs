//! Explicit Markov chains over lumped blocks and their exact evaluation:
//! expected truncated sums (SSP) and gain/bias pairs (EMP).
//!
//! Systems are solved one strongly connected component at a time, in
//! reverse topological order, so only the coupled part of a chain is ever
//! eliminated jointly. Small components use fraction-free (Bareiss)
//! elimination over the integers; large ones use sparse rational
//! elimination with a Markowitz pivot order.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::error::{Error, Result};
use crate::rational::{from_f64, to_f64, Rational};

/// Components up to this size are solved densely with Bareiss elimination.
const DENSE_LIMIT: usize = 64;

/// Arithmetic used by the linear solvers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Arith {
    #[default]
    Exact,
    /// Double precision with partial pivoting; results are converted back to
    /// rationals. Residuals are not exact in this mode.
    Float,
}

/// Relative tolerance below which float-mode values count as equal.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

impl Arith {
    /// `a` and `b` agree up to the rounding noise of this arithmetic.
    pub fn same(self, a: &Rational, b: &Rational) -> bool {
        match self {
            Arith::Exact => a == b,
            Arith::Float => {
                let (x, y) = (to_f64(a), to_f64(b));
                (x - y).abs() <= FLOAT_TOLERANCE * (1.0 + x.abs().max(y.abs()))
            }
        }
    }
}

/// A finite Markov chain with costs, one row per block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientMc<W> {
    /// Sparse rows `(target, probability)` with positive entries.
    pub rows: Vec<Vec<(usize, Rational)>>,
    pub cost: Vec<Rational>,
    /// Goal flags; goal blocks are absorbing with value 0 in SSP evaluation.
    pub goal: Vec<bool>,
    /// A representative state per block.
    pub witness: Vec<W>,
}

impl<W> QuotientMc<W> {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Every row is a probability distribution.
    pub fn check_stochastic(&self) -> Result<()> {
        for (i, row) in self.rows.iter().enumerate() {
            let total: Rational = row.iter().map(|(_, p)| p.clone()).sum();
            if !total.is_one() || row.iter().any(|(_, p)| !p.is_positive()) {
                return Err(Error::Internal(format!("row {i} is not a distribution")));
            }
        }
        Ok(())
    }

    fn graph(&self, keep: impl Fn(usize) -> bool) -> DiGraph<(), ()> {
        let mut g = DiGraph::with_capacity(self.len(), 0);
        let nodes: Vec<_> = (0..self.len()).map(|_| g.add_node(())).collect();
        for (i, row) in self.rows.iter().enumerate() {
            if !keep(i) {
                continue;
            }
            for (j, _) in row {
                if keep(*j) {
                    g.add_edge(nodes[i], nodes[*j], ());
                }
            }
        }
        g
    }
}

/// Gain and bias of a chain, with the recurrent classes used for the
/// normalization `P* b = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GainBias {
    pub gain: Vec<Rational>,
    pub bias: Vec<Rational>,
    /// Each recurrent class with its stationary distribution.
    pub classes: Vec<(Vec<usize>, Vec<Rational>)>,
}

/// Solve `x_i - Σ_{j∈U} P_ij x_j = r_i + Σ_{j∉U} P_ij x_j` for `i ∈ U`,
/// where `x` is already known outside `U`. Returns the completed vector or
/// `None` if some component is singular.
fn solve_on<W>(
    q: &QuotientMc<W>,
    unknown: &[bool],
    rhs: &[Rational],
    mut x: Vec<Rational>,
    arith: Arith,
) -> Option<Vec<Rational>> {
    let g = q.graph(|i| unknown[i]);
    for scc in tarjan_scc(&g) {
        let members: Vec<usize> = scc.iter().map(|n| n.index()).filter(|&i| unknown[i]).collect();
        if members.is_empty() {
            continue;
        }
        let local: BTreeMap<usize, usize> = members.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let m = members.len();
        let mut rows: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); m];
        let mut b: Vec<Rational> = Vec::with_capacity(m);
        for (k, &i) in members.iter().enumerate() {
            let mut r = rhs[i].clone();
            *rows[k].entry(k).or_insert_with(Rational::zero) += Rational::one();
            for (j, p) in &q.rows[i] {
                match local.get(j) {
                    Some(&l) => *rows[k].entry(l).or_insert_with(Rational::zero) -= p,
                    None => r += p * &x[*j],
                }
            }
            rows[k].retain(|_, v| !v.is_zero());
            b.push(r);
        }
        let sol = match arith {
            Arith::Float => solve_float(&rows, &b)?,
            Arith::Exact if m <= DENSE_LIMIT => solve_bareiss(&rows, &b)?,
            Arith::Exact => solve_sparse(rows, b)?,
        };
        for (k, &i) in members.iter().enumerate() {
            x[i] = sol[k].clone();
        }
    }
    Some(x)
}

/// Expected truncated sum to the goal blocks: `v = 0` on goals and
/// `(I - P) v = C` elsewhere.
pub fn solve_ssp<W>(q: &QuotientMc<W>, arith: Arith) -> Result<Vec<Rational>> {
    let unknown: Vec<bool> = q.goal.iter().map(|g| !g).collect();
    let rhs: Vec<Rational> = (0..q.len())
        .map(|i| if q.goal[i] { Rational::zero() } else { q.cost[i].clone() })
        .collect();
    solve_on(q, &unknown, &rhs, vec![Rational::zero(); q.len()], arith)
        .ok_or_else(|| Error::NonProper("some block does not reach the goal with probability 1".into()))
}

/// Gain and bias solving `(P - I) g = 0`, `C - g + (P - I) b = 0` and
/// `P* b = 0` for a possibly multichain `P`.
pub fn solve_gain_bias<W>(q: &QuotientMc<W>, arith: Arith) -> Result<GainBias> {
    let n = q.len();
    let g = q.graph(|_| true);
    let sccs = tarjan_scc(&g);
    let mut scc_of = vec![0usize; n];
    for (k, scc) in sccs.iter().enumerate() {
        for v in scc {
            scc_of[v.index()] = k;
        }
    }
    let mut recurrent = vec![false; n];
    let mut classes = Vec::new();
    let mut gain = vec![Rational::zero(); n];
    let mut bias = vec![Rational::zero(); n];
    let singular = || Error::Internal("singular system in gain/bias evaluation".into());
    for (k, scc) in sccs.iter().enumerate() {
        let members: Vec<usize> = {
            let mut m: Vec<usize> = scc.iter().map(|v| v.index()).collect();
            m.sort();
            m
        };
        let closed = members.iter().all(|&i| q.rows[i].iter().all(|(j, _)| scc_of[*j] == k));
        if !closed {
            continue;
        }
        let pi = stationary(q, &members, arith).ok_or_else(singular)?;
        let g: Rational = members.iter().zip(&pi).map(|(&i, p)| p * &q.cost[i]).sum();
        let b = class_bias(q, &members, &pi, &g, arith).ok_or_else(singular)?;
        for (idx, &i) in members.iter().enumerate() {
            recurrent[i] = true;
            gain[i] = g.clone();
            bias[i] = b[idx].clone();
        }
        classes.push((members, pi));
    }
    let transient: Vec<bool> = recurrent.iter().map(|r| !r).collect();
    let zero = vec![Rational::zero(); n];
    let gain = solve_on(q, &transient, &zero, gain, arith).ok_or_else(singular)?;
    let rhs: Vec<Rational> = (0..n).map(|i| &q.cost[i] - &gain[i]).collect();
    let bias = solve_on(q, &transient, &rhs, bias, arith).ok_or_else(singular)?;
    classes.sort();
    Ok(GainBias { gain, bias, classes })
}

/// Stationary distribution of a closed class: `π (I - P) = 0`, `Σ π = 1`.
fn stationary<W>(q: &QuotientMc<W>, members: &[usize], arith: Arith) -> Option<Vec<Rational>> {
    let m = members.len();
    let local: BTreeMap<usize, usize> = members.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    // Row k of the transposed system is the balance equation of state k;
    // the last one is replaced by the normalization.
    let mut rows: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); m];
    for (k, &i) in members.iter().enumerate() {
        *rows[k].entry(k).or_insert_with(Rational::zero) += Rational::one();
        for (j, p) in &q.rows[i] {
            let l = local[j];
            *rows[l].entry(k).or_insert_with(Rational::zero) -= p;
        }
    }
    rows[m - 1] = (0..m).map(|k| (k, Rational::one())).collect();
    for r in rows.iter_mut() {
        r.retain(|_, v| !v.is_zero());
    }
    let mut b = vec![Rational::zero(); m];
    b[m - 1] = Rational::one();
    dispatch(rows, b, arith)
}

/// Bias on a closed class: `(I - P) b = C - g` with the first state pinned
/// to 0, then shifted so that `π·b = 0`.
fn class_bias<W>(
    q: &QuotientMc<W>,
    members: &[usize],
    pi: &[Rational],
    g: &Rational,
    arith: Arith,
) -> Option<Vec<Rational>> {
    let m = members.len();
    if m == 1 {
        return Some(vec![Rational::zero()]);
    }
    let local: BTreeMap<usize, usize> = members.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    // Unknowns b_1..b_{m-1}; equations of states 1..m-1.
    let mut rows: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); m - 1];
    let mut b = Vec::with_capacity(m - 1);
    for k in 1..m {
        let i = members[k];
        let row = &mut rows[k - 1];
        *row.entry(k - 1).or_insert_with(Rational::zero) += Rational::one();
        for (j, p) in &q.rows[i] {
            let l = local[j];
            if l > 0 {
                *row.entry(l - 1).or_insert_with(Rational::zero) -= p;
            }
        }
        row.retain(|_, v| !v.is_zero());
        b.push(&q.cost[i] - g);
    }
    let sol = dispatch(rows, b, arith)?;
    let mut full = Vec::with_capacity(m);
    full.push(Rational::zero());
    full.extend(sol);
    let shift: Rational = pi.iter().zip(&full).map(|(p, v)| p * v).sum();
    Some(full.into_iter().map(|v| v - &shift).collect())
}

fn dispatch(rows: Vec<BTreeMap<usize, Rational>>, b: Vec<Rational>, arith: Arith) -> Option<Vec<Rational>> {
    match arith {
        Arith::Float => solve_float(&rows, &b),
        Arith::Exact if rows.len() <= DENSE_LIMIT => solve_bareiss(&rows, &b),
        Arith::Exact => solve_sparse(rows, b),
    }
}

/// Fraction-free Gaussian elimination. Each equation is first scaled to
/// integer coefficients; pivots are chosen per column as the nonzero entry
/// with the fewest bits.
pub fn solve_bareiss(rows: &[BTreeMap<usize, Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = rows.len();
    let mut m: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for (row, rhs) in rows.iter().zip(b) {
        let lcm = row
            .values()
            .chain(std::iter::once(rhs))
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let mut r = vec![BigInt::zero(); n + 1];
        for (&j, v) in row {
            r[j] = v.numer() * (&lcm / v.denom());
        }
        r[n] = rhs.numer() * (&lcm / rhs.denom());
        m.push(r);
    }
    let mut prev = BigInt::one();
    for k in 0..n {
        let pivot = (k..n).filter(|&i| !m[i][k].is_zero()).min_by_key(|&i| m[i][k].bits())?;
        m.swap(k, pivot);
        let (top, bottom) = m.split_at_mut(k + 1);
        let pk = &top[k];
        for row in bottom.iter_mut() {
            if row[k].is_zero() {
                for j in k + 1..=n {
                    if !row[j].is_zero() {
                        row[j] = (&pk[k] * &row[j]) / &prev;
                    }
                }
                continue;
            }
            for j in k + 1..=n {
                let v = &pk[k] * &row[j] - &row[k] * &pk[j];
                row[j] = v / &prev;
            }
            row[k] = BigInt::zero();
        }
        prev = top[k][k].clone();
    }
    let mut x = vec![Rational::zero(); n];
    for i in (0..n).rev() {
        let mut acc = Rational::from_integer(m[i][n].clone());
        for j in i + 1..n {
            if !m[i][j].is_zero() {
                acc -= Rational::from_integer(m[i][j].clone()) * &x[j];
            }
        }
        x[i] = acc / Rational::from_integer(m[i][i].clone());
    }
    Some(x)
}

/// Sparse rational elimination with a Markowitz-style pivot choice.
pub fn solve_sparse(mut rows: Vec<BTreeMap<usize, Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = rows.len();
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for (i, r) in rows.iter().enumerate() {
        for &j in r.keys() {
            col_rows[j].insert(i);
        }
    }
    let mut active = vec![true; n];
    let mut order: Vec<(usize, usize)> = Vec::with_capacity(n);
    for _ in 0..n {
        let r = (0..n).filter(|&i| active[i]).min_by_key(|&i| rows[i].len())?;
        let c = *rows[r].keys().min_by_key(|&&j| col_rows[j].len())?;
        active[r] = false;
        for &j in rows[r].keys() {
            col_rows[j].remove(&r);
        }
        let pivot_row = rows[r].clone();
        let pv = pivot_row[&c].clone();
        let pb = b[r].clone();
        let targets: Vec<usize> = col_rows[c].iter().copied().collect();
        for i in targets {
            let f = &rows[i][&c] / &pv;
            for (j, v) in &pivot_row {
                let e = rows[i].entry(*j).or_insert_with(Rational::zero);
                *e -= &f * v;
                if e.is_zero() {
                    rows[i].remove(j);
                    col_rows[*j].remove(&i);
                } else {
                    col_rows[*j].insert(i);
                }
            }
            b[i] -= &f * &pb;
        }
        order.push((r, c));
    }
    let mut x = vec![Rational::zero(); n];
    for &(r, c) in order.iter().rev() {
        let mut acc = b[r].clone();
        for (j, v) in &rows[r] {
            if *j != c {
                acc -= v * &x[*j];
            }
        }
        x[c] = acc / &rows[r][&c];
    }
    Some(x)
}

fn solve_float(rows: &[BTreeMap<usize, Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = rows.len();
    let mut m = vec![vec![0.0f64; n + 1]; n];
    for (i, (row, rhs)) in rows.iter().zip(b).enumerate() {
        for (&j, v) in row {
            m[i][j] = to_f64(v);
        }
        m[i][n] = to_f64(rhs);
    }
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs()))?;
        if m[p][k].abs() < 1e-12 {
            return None;
        }
        m.swap(k, p);
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            if f != 0.0 {
                for j in k..=n {
                    m[i][j] -= f * m[k][j];
                }
            }
        }
    }
    let mut x = vec![0.0f64; n];
    for i in (0..n).rev() {
        let mut acc = m[i][n];
        for j in i + 1..n {
            acc -= m[i][j] * x[j];
        }
        x[i] = acc / m[i][i];
    }
    x.into_iter().map(from_f64).collect()
}

/// Residual of the SSP system, one entry per block (zero on goals).
pub fn ssp_residual<W>(q: &QuotientMc<W>, v: &[Rational]) -> Vec<Rational> {
    (0..q.len())
        .map(|i| {
            if q.goal[i] {
                v[i].clone()
            } else {
                let pv: Rational = q.rows[i].iter().map(|(j, p)| p * &v[*j]).sum();
                &q.cost[i] + pv - &v[i]
            }
        })
        .collect()
}

/// All residuals of the gain/bias system are exactly zero.
pub fn gain_bias_exact<W>(q: &QuotientMc<W>, gb: &GainBias) -> bool {
    let n = q.len();
    for i in 0..n {
        let pg: Rational = q.rows[i].iter().map(|(j, p)| p * &gb.gain[*j]).sum();
        if pg != gb.gain[i] {
            return false;
        }
        let pb: Rational = q.rows[i].iter().map(|(j, p)| p * &gb.bias[*j]).sum();
        if &q.cost[i] - &gb.gain[i] + pb - &gb.bias[i] != Rational::zero() {
            return false;
        }
    }
    gb.classes.iter().all(|(members, pi)| {
        let s: Rational = members.iter().zip(pi).map(|(&i, p)| p * &gb.bias[i]).sum();
        s.is_zero()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn chain(rows: Vec<Vec<(usize, Rational)>>, cost: Vec<i64>, goal: Vec<bool>) -> QuotientMc<()> {
        let n = rows.len();
        QuotientMc {
            rows,
            cost: cost.into_iter().map(int).collect(),
            goal,
            witness: vec![(); n],
        }
    }

    #[test]
    fn ssp_hand_cases() {
        let q = chain(vec![vec![(0, int(1))]], vec![0], vec![true]);
        assert_eq!(solve_ssp(&q, Arith::Exact).unwrap(), vec![int(0)]);

        let q = chain(
            vec![vec![(0, int(1))], vec![(1, rat(4, 5)), (0, rat(1, 5))]],
            vec![0, 1],
            vec![true, false],
        );
        assert_eq!(solve_ssp(&q, Arith::Exact).unwrap(), vec![int(0), int(5)]);

        let q = chain(
            vec![vec![(1, int(1))], vec![(2, int(1))], vec![(2, int(1))]],
            vec![2, 3, 0],
            vec![false, false, true],
        );
        let v = solve_ssp(&q, Arith::Exact).unwrap();
        assert_eq!(v, vec![int(5), int(3), int(0)]);
        assert!(ssp_residual(&q, &v).iter().all(|r| r.is_zero()));
    }

    #[test]
    fn ssp_detects_improper_block() {
        let q = chain(
            vec![vec![(0, int(1))], vec![(1, int(1))]],
            vec![0, 1],
            vec![true, false],
        );
        assert!(matches!(solve_ssp(&q, Arith::Exact), Err(Error::NonProper(_))));
    }

    #[test]
    fn gain_bias_hand_cases() {
        let q = chain(vec![vec![(1, int(1))], vec![(0, int(1))]], vec![0, 2], vec![false; 2]);
        let gb = solve_gain_bias(&q, Arith::Exact).unwrap();
        assert_eq!(gb.gain, vec![int(1), int(1)]);
        assert_eq!(gb.bias, vec![rat(-1, 2), rat(1, 2)]);
        assert!(gain_bias_exact(&q, &gb));

        let q = chain(vec![vec![(0, int(1))]], vec![7], vec![false]);
        let gb = solve_gain_bias(&q, Arith::Exact).unwrap();
        assert_eq!((gb.gain[0].clone(), gb.bias[0].clone()), (int(7), int(0)));

        let q = chain(
            vec![
                vec![(1, rat(1, 2)), (2, rat(1, 2))],
                vec![(1, int(1))],
                vec![(2, int(1))],
            ],
            vec![5, 1, 3],
            vec![false; 3],
        );
        let gb = solve_gain_bias(&q, Arith::Exact).unwrap();
        assert_eq!(gb.gain, vec![int(2), int(1), int(3)]);
        assert!(gain_bias_exact(&q, &gb));
    }

    #[test]
    fn solvers_agree() {
        let mut rows: Vec<BTreeMap<usize, Rational>> = Vec::new();
        let mut b = Vec::new();
        for i in 0..6usize {
            let mut r = BTreeMap::new();
            r.insert(i, int(4 + i as i64));
            r.insert((i + 1) % 6, rat(-1, 3));
            r.insert((i + 3) % 6, rat(1, 7));
            rows.push(r);
            b.push(rat(i as i64 - 2, 5));
        }
        let x = solve_bareiss(&rows, &b).unwrap();
        assert_eq!(solve_sparse(rows.clone(), b.clone()).unwrap(), x);
        for (r, rhs) in rows.iter().zip(&b) {
            let lhs: Rational = r.iter().map(|(j, v)| v * &x[*j]).sum();
            assert_eq!(&lhs, rhs);
        }
        let f = solve_float(&rows, &b).unwrap();
        for (a, e) in f.iter().zip(&x) {
            assert!((to_f64(a) - to_f64(e)).abs() < 1e-9);
        }
    }

    #[test]
    fn singular_is_none() {
        let mut r = BTreeMap::new();
        r.insert(0, int(1));
        r.insert(1, int(1));
        let rows = vec![r.clone(), r];
        assert!(solve_bareiss(&rows, &[int(1), int(2)]).is_none());
        assert!(solve_sparse(rows, vec![int(1), int(2)]).is_none());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        /// A random chain on `n` states; with `proper`, state 0 is the goal
        /// and every other state moves to a smaller index with positive
        /// probability.
        fn random_chain(proper: bool) -> impl Strategy<Value = QuotientMc<()>> {
            (2usize..9).prop_flat_map(move |n| {
                let row = proptest::collection::vec((0..n, 1i64..5), 1..4);
                (
                    proptest::collection::vec(row, n),
                    proptest::collection::vec(1i64..6, n),
                    Just(n),
                )
                    .prop_map(move |(raw, cost, n)| {
                        let mut rows = Vec::new();
                        for (i, mut entries) in raw.into_iter().enumerate() {
                            if proper && i == 0 {
                                rows.push(vec![(0, int(1))]);
                                continue;
                            }
                            if proper {
                                entries.push((i - 1, 1));
                            }
                            let total: i64 = entries.iter().map(|(_, w)| w).sum();
                            let mut row: BTreeMap<usize, Rational> = BTreeMap::new();
                            for (j, w) in entries {
                                *row.entry(j).or_insert_with(Rational::zero) += rat(w, total);
                            }
                            rows.push(row.into_iter().collect());
                        }
                        let mut goal = vec![false; n];
                        let mut cost: Vec<Rational> = cost.into_iter().map(int).collect();
                        if proper {
                            goal[0] = true;
                            cost[0] = Rational::zero();
                        }
                        QuotientMc {
                            rows,
                            cost,
                            goal,
                            witness: vec![(); n],
                        }
                    })
            })
        }

        fn permute(q: &QuotientMc<()>, perm: &[usize]) -> QuotientMc<()> {
            let n = q.len();
            let mut out = QuotientMc {
                rows: vec![Vec::new(); n],
                cost: vec![Rational::zero(); n],
                goal: vec![false; n],
                witness: vec![(); n],
            };
            for i in 0..n {
                out.rows[perm[i]] = q.rows[i].iter().map(|(j, p)| (perm[*j], p.clone())).collect();
                out.cost[perm[i]] = q.cost[i].clone();
                out.goal[perm[i]] = q.goal[i];
            }
            out
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn ssp_is_permutation_invariant(q in random_chain(true), seed in any::<u64>()) {
                let v = solve_ssp(&q, Arith::Exact).unwrap();
                prop_assert!(ssp_residual(&q, &v).iter().all(|r| r.is_zero()));
                let mut perm: Vec<usize> = (0..q.len()).collect();
                let mut s = seed;
                for i in (1..perm.len()).rev() {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    perm.swap(i, (s >> 33) as usize % (i + 1));
                }
                let w = solve_ssp(&permute(&q, &perm), Arith::Exact).unwrap();
                for i in 0..q.len() {
                    prop_assert_eq!(&v[i], &w[perm[i]]);
                }
                let f = solve_ssp(&q, Arith::Float).unwrap();
                for (a, e) in f.iter().zip(&v) {
                    prop_assert!((to_f64(a) - to_f64(e)).abs() < 1e-6);
                }
            }

            #[test]
            fn gain_bias_satisfies_equations(q in random_chain(false)) {
                let gb = solve_gain_bias(&q, Arith::Exact).unwrap();
                prop_assert!(gain_bias_exact(&q, &gb));
                let rev: Vec<usize> = (0..q.len()).rev().collect();
                let gb2 = solve_gain_bias(&permute(&q, &rev), Arith::Exact).unwrap();
                for i in 0..q.len() {
                    prop_assert_eq!(&gb.gain[i], &gb2.gain[rev[i]]);
                    prop_assert_eq!(&gb.bias[i], &gb2.bias[rev[i]]);
                }
            }
        }
    }
}
