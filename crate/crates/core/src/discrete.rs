//! Discrete p-median over a finite candidate set.
//!
//! Select `p` of `m` candidate columns minimizing `sum_i w_i min_{j in P} d_ij`.
//! Assignment variables are implicit: every demand row is served by its
//! closest selected column, ties going to the lowest column index.
//!
//! * [`solve_exact`] proves optimality by exhaustive enumeration when
//!   `C(m, p)` is small enough, otherwise by best-first branch-and-bound on
//!   candidate inclusion.
//! * [`solve_interchange`] is a multistart greedy + vertex-substitution
//!   heuristic for the instances where proof is out of reach.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::candidates::CandidateSite;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::instance::Instance;
use crate::rng::Lcg64;

/// Dense `demand x candidate` Euclidean distance matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_points(demand: &[Point], sites: &[Point]) -> Self {
        let data = demand.iter().flat_map(|a| sites.iter().map(move |s| a.dist(*s))).collect();
        DistanceMatrix { rows: demand.len(), cols: sites.len(), data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

pub fn build_matrix(instance: &Instance, candidates: &[CandidateSite]) -> DistanceMatrix {
    let sites: Vec<Point> = candidates.iter().map(|c| c.location).collect();
    DistanceMatrix::from_points(&instance.demand_points(), &sites)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteSolution {
    /// Selected column indices, ascending.
    pub selected: Vec<usize>,
    /// Column serving each demand row.
    pub assignment: Vec<usize>,
    pub objective: f64,
    /// Whether optimality was proven.
    pub proven: bool,
}

/// Closest-column assignment and objective for a fixed selection.
pub fn evaluate(matrix: &DistanceMatrix, weights: &[f64], selected: &[usize]) -> DiscreteSolution {
    let mut selected = selected.to_vec();
    selected.sort_unstable();
    selected.dedup();
    let mut objective = 0.0;
    let assignment = (0..matrix.rows())
        .map(|i| {
            let row = matrix.row(i);
            let best = selected
                .iter()
                .copied()
                .min_by(|&a, &b| row[a].total_cmp(&row[b]).then(a.cmp(&b)))
                .expect("non-empty selection");
            objective += weights[i] * row[best];
            best
        })
        .collect();
    DiscreteSolution { selected, assignment, objective, proven: false }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBudget {
    /// Enumerate every p-subset when `C(m, p)` does not exceed this.
    pub max_enumeration: u64,
    /// Branch-and-bound node expansions.
    pub max_nodes: u64,
    pub time_limit: Option<Duration>,
}

pub const DEFAULT_ENUMERATION_LIMIT: u64 = 10_000_000;
pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;
pub const DEFAULT_STARTS: usize = 100;

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_enumeration: DEFAULT_ENUMERATION_LIMIT, max_nodes: DEFAULT_NODE_BUDGET, time_limit: None }
    }
}

/// `C(n, k)`, saturating at `u64::MAX`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k) as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n as u128 - i) / (i + 1);
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Weighted costs stored column-major: `col(j)[i] = w_i d_ij`.
struct CostColumns {
    n: usize,
    m: usize,
    data: Vec<f64>,
}

impl CostColumns {
    fn new(matrix: &DistanceMatrix, weights: &[f64]) -> Self {
        assert_eq!(weights.len(), matrix.rows(), "one weight per demand row");
        let (n, m) = (matrix.rows(), matrix.cols());
        let mut data = vec![0.0; n * m];
        for i in 0..n {
            for j in 0..m {
                data[j * n + i] = weights[i] * matrix.get(i, j);
            }
        }
        CostColumns { n, m, data }
    }

    #[inline]
    fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.n..(j + 1) * self.n]
    }
}

fn check_cardinality(matrix: &DistanceMatrix, p: usize) -> Result<()> {
    if p == 0 {
        return Err(Error::Domain("p must be at least 1".into()));
    }
    if matrix.rows() == 0 {
        return Err(Error::Domain("no demand rows".into()));
    }
    if matrix.cols() < p {
        return Err(Error::InfeasibleCardinality { m: matrix.cols(), p });
    }
    Ok(())
}

/// Deterministic "better than" for reductions: objective, then selection.
fn better(a: &(f64, Vec<usize>), b: &(f64, Vec<usize>)) -> bool {
    match a.0.total_cmp(&b.0) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => a.1 < b.1,
    }
}

fn pick_best(a: (f64, Vec<usize>), b: (f64, Vec<usize>)) -> (f64, Vec<usize>) {
    if better(&b, &a) {
        b
    } else {
        a
    }
}

/// Provably optimal selection, or [`Error::BudgetExhausted`] carrying the
/// best selection found.
pub fn solve_exact(matrix: &DistanceMatrix, weights: &[f64], p: usize, budget: &SearchBudget) -> Result<DiscreteSolution> {
    check_cardinality(matrix, p)?;
    let costs = CostColumns::new(matrix, weights);
    let best = if binomial(costs.m, p) <= budget.max_enumeration {
        enumerate(&costs, p)
    } else {
        let incumbent = solve_interchange(matrix, weights, p, DEFAULT_STARTS, 0)?;
        match branch_and_bound(&costs, p, incumbent.selected.clone(), budget) {
            Ok(sel) => sel,
            Err(sel) => {
                let sol = evaluate(matrix, weights, &sel);
                return Err(Error::BudgetExhausted(Box::new(sol)));
            }
        }
    };
    let mut sol = evaluate(matrix, weights, &best);
    sol.proven = true;
    Ok(sol)
}

fn enumerate(costs: &CostColumns, p: usize) -> Vec<usize> {
    let (n, m) = (costs.n, costs.m);
    let worst = (f64::INFINITY, Vec::new());
    let best = (0..=m - p)
        .into_par_iter()
        .map(|first| {
            // mins[k] = column-wise minimum over the first k+1 chosen columns.
            let mut mins = vec![vec![0.0; n]; p];
            mins[0].copy_from_slice(costs.col(first));
            let mut chosen = vec![first; p];
            let mut best = (f64::INFINITY, Vec::new());
            descend(costs, p, 1, first + 1, &mut mins, &mut chosen, &mut best);
            best
        })
        .reduce(|| worst.clone(), pick_best);
    best.1
}

fn descend(
    costs: &CostColumns,
    p: usize,
    depth: usize,
    from: usize,
    mins: &mut [Vec<f64>],
    chosen: &mut [usize],
    best: &mut (f64, Vec<usize>),
) {
    if depth == p {
        let value: f64 = mins[p - 1].iter().sum();
        let cand = (value, chosen.to_vec());
        if better(&cand, best) {
            *best = cand;
        }
        return;
    }
    let last = depth + 1 == p;
    for j in from..=costs.m - (p - depth) {
        chosen[depth] = j;
        let col = costs.col(j);
        if last {
            let prev = &mins[depth - 1];
            let value: f64 = prev.iter().zip(col).map(|(a, b)| a.min(*b)).sum();
            if value <= best.0 {
                let cand = (value, chosen.to_vec());
                if better(&cand, best) {
                    *best = cand;
                }
            }
        } else {
            let (head, tail) = mins.split_at_mut(depth);
            for ((dst, a), b) in tail[0].iter_mut().zip(&head[depth - 1]).zip(col) {
                *dst = a.min(*b);
            }
            descend(costs, p, depth + 1, j + 1, mins, chosen, best);
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Node {
    bound: f64,
    /// Next position in the branching order to decide.
    next: usize,
    included: usize,
    /// Head of the included-list chain in the arena, `usize::MAX` if empty.
    chain: usize,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // Max-heap: smallest bound first, deeper nodes first on ties.
    fn cmp(&self, other: &Self) -> Ordering {
        other.bound.total_cmp(&self.bound).then(self.next.cmp(&other.next)).then(self.chain.cmp(&other.chain))
    }
}

const MAX_OPEN_NODES: usize = 4_000_000;

/// Best-first branch-and-bound. Candidates are decided in order of
/// increasing single-facility cost; a node's bound lets every demand row
/// use its cheapest column among the included ones and those not yet
/// decided. Returns `Err(incumbent)` if the budget runs out.
fn branch_and_bound(costs: &CostColumns, p: usize, incumbent: Vec<usize>, budget: &SearchBudget) -> Result<Vec<usize>, Vec<usize>> {
    let (n, m) = (costs.n, costs.m);
    let mut order: Vec<usize> = (0..m).collect();
    let col_cost: Vec<f64> = (0..m).map(|j| costs.col(j).iter().sum()).collect();
    order.sort_by(|&a, &b| col_cost[a].total_cmp(&col_cost[b]).then(a.cmp(&b)));

    // suffix[k][i] = min over order[k..] of cost; suffix[m] = +inf.
    let mut suffix = vec![f64::INFINITY; (m + 1) * n];
    for k in (0..m).rev() {
        let col = costs.col(order[k]);
        for i in 0..n {
            suffix[k * n + i] = suffix[(k + 1) * n + i].min(col[i]);
        }
    }
    let selection_value = |sel: &[usize]| -> f64 {
        (0..n).map(|i| sel.iter().map(|&j| costs.col(j)[i]).fold(f64::INFINITY, f64::min)).sum()
    };

    let mut best_sel = incumbent;
    best_sel.sort_unstable();
    let mut best_val = selection_value(&best_sel);

    let mut arena: Vec<(usize, usize)> = Vec::new(); // (column, parent)
    let collect = |arena: &[(usize, usize)], mut chain: usize| {
        let mut cols = Vec::with_capacity(p);
        while chain != usize::MAX {
            cols.push(arena[chain].0);
            chain = arena[chain].1;
        }
        cols
    };
    let mut scratch = vec![0.0; n];
    let bound_of = |included: &[usize], next: usize, scratch: &mut [f64]| -> f64 {
        scratch.copy_from_slice(&suffix[next * n..(next + 1) * n]);
        for &j in included {
            for (s, c) in scratch.iter_mut().zip(costs.col(j)) {
                *s = s.min(*c);
            }
        }
        scratch.iter().sum()
    };

    let root_bound = bound_of(&[], 0, &mut scratch);
    let mut heap = BinaryHeap::new();
    heap.push(Node { bound: root_bound, next: 0, included: 0, chain: usize::MAX });
    let started = Instant::now();
    let mut expanded: u64 = 0;
    let tol = |v: f64| 1e-12 * (1.0 + v.abs());

    while let Some(node) = heap.pop() {
        if node.bound >= best_val - tol(best_val) {
            // Every open node is at least as bad.
            let mut sel = best_sel;
            sel.sort_unstable();
            return Ok(sel);
        }
        expanded += 1;
        if expanded > budget.max_nodes
            || heap.len() > MAX_OPEN_NODES
            || budget.time_limit.is_some_and(|t| started.elapsed() > t)
        {
            return Err(best_sel);
        }
        let included = collect(&arena, node.chain);
        let remaining = m - node.next;
        let need = p - node.included;
        if need == 0 || need == remaining {
            let mut sel = included.clone();
            if need > 0 {
                sel.extend(order[node.next..].iter().copied());
            }
            let v = selection_value(&sel);
            if v < best_val {
                best_val = v;
                best_sel = sel;
            }
            continue;
        }
        let col = order[node.next];
        // Include: the allowed set is unchanged, so is the bound.
        arena.push((col, node.chain));
        heap.push(Node { bound: node.bound, next: node.next + 1, included: node.included + 1, chain: arena.len() - 1 });
        // Exclude.
        if remaining > need {
            let b = bound_of(&included, node.next + 1, &mut scratch);
            if b < best_val - tol(best_val) {
                heap.push(Node { bound: b, next: node.next + 1, included: node.included, chain: node.chain });
            }
        }
    }
    best_sel.sort_unstable();
    Ok(best_sel)
}

/// Best of `starts` greedy + vertex-substitution local searches.
///
/// Start 0 is the pure greedy construction; later starts pick uniformly
/// among the three best additions at each greedy step. Swap candidates are
/// scanned in a freshly shuffled order on every pass and the first
/// improving swap (with its best removal) is applied.
pub fn solve_interchange(matrix: &DistanceMatrix, weights: &[f64], p: usize, starts: usize, seed: u64) -> Result<DiscreteSolution> {
    check_cardinality(matrix, p)?;
    let costs = CostColumns::new(matrix, weights);
    let starts = starts.max(1);
    let best = (0..starts)
        .into_par_iter()
        .map(|run| {
            let mut rng = Lcg64::derive(seed, run as u64);
            let mut ls = LocalSearch::greedy(&costs, p, if run == 0 { 1 } else { 3 }, &mut rng);
            ls.improve(&mut rng);
            let mut sel = ls.selected;
            sel.sort_unstable();
            let value = selection_objective(&costs, &sel);
            (value, sel)
        })
        .reduce(|| (f64::INFINITY, Vec::new()), pick_best);
    let mut sol = evaluate(matrix, weights, &best.1);
    sol.proven = p == matrix.cols();
    Ok(sol)
}

fn selection_objective(costs: &CostColumns, sel: &[usize]) -> f64 {
    (0..costs.n).map(|i| sel.iter().map(|&j| costs.col(j)[i]).fold(f64::INFINITY, f64::min)).sum()
}

struct LocalSearch<'a> {
    costs: &'a CostColumns,
    selected: Vec<usize>,
    in_solution: Vec<bool>,
    /// Closest and second-closest selected cost per row, and the slot in
    /// `selected` of the closest.
    d1: Vec<f64>,
    d2: Vec<f64>,
    slot1: Vec<usize>,
}

impl<'a> LocalSearch<'a> {
    fn greedy(costs: &'a CostColumns, p: usize, choices: usize, rng: &mut Lcg64) -> Self {
        let (n, m) = (costs.n, costs.m);
        let mut current = vec![f64::INFINITY; n];
        let mut in_solution = vec![false; m];
        let mut selected = Vec::with_capacity(p);
        for _ in 0..p {
            let mut scored: Vec<(f64, usize)> = (0..m)
                .filter(|&j| !in_solution[j])
                .map(|j| {
                    let v: f64 = current.iter().zip(costs.col(j)).map(|(a, b)| a.min(*b)).sum();
                    (v, j)
                })
                .collect();
            let k = choices.min(scored.len());
            scored.select_nth_unstable_by(k - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            scored[..k].sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let pick = scored[if k > 1 { rng.below(k) } else { 0 }].1;
            in_solution[pick] = true;
            selected.push(pick);
            for (c, v) in current.iter_mut().zip(costs.col(pick)) {
                *c = c.min(*v);
            }
        }
        let mut ls = LocalSearch { costs, selected, in_solution, d1: vec![0.0; n], d2: vec![0.0; n], slot1: vec![0; n] };
        ls.refresh();
        ls
    }

    fn refresh(&mut self) {
        for i in 0..self.costs.n {
            let (mut b1, mut b2, mut s1) = (f64::INFINITY, f64::INFINITY, 0);
            for (slot, &j) in self.selected.iter().enumerate() {
                let c = self.costs.col(j)[i];
                if c < b1 {
                    b2 = b1;
                    b1 = c;
                    s1 = slot;
                } else if c < b2 {
                    b2 = c;
                }
            }
            self.d1[i] = b1;
            self.d2[i] = b2;
            self.slot1[i] = s1;
        }
    }

    fn improve(&mut self, rng: &mut Lcg64) {
        let m = self.costs.m;
        let p = self.selected.len();
        let mut loss = vec![0.0; p];
        loop {
            let objective: f64 = self.d1.iter().sum();
            let eps = 1e-12 * (1.0 + objective);
            let mut order: Vec<usize> = (0..m).filter(|&j| !self.in_solution[j]).collect();
            rng.shuffle(&mut order);
            let mut improved = false;
            for u in order {
                if self.in_solution[u] {
                    continue;
                }
                let col = self.costs.col(u);
                let mut gain = 0.0;
                loss.iter_mut().for_each(|l| *l = 0.0);
                for i in 0..self.costs.n {
                    let du = col[i];
                    if du < self.d1[i] {
                        gain += self.d1[i] - du;
                    } else {
                        loss[self.slot1[i]] += du.min(self.d2[i]) - self.d1[i];
                    }
                }
                let (slot, &worst) = loss
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
                    .expect("p >= 1");
                if gain - worst > eps {
                    let out = self.selected[slot];
                    self.in_solution[out] = false;
                    self.in_solution[u] = true;
                    self.selected[slot] = u;
                    self.refresh();
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
    }
}

/// How [`solve_discrete`] picks a method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMode {
    /// Prove optimality, by enumeration or branch-and-bound.
    Exact,
    /// Multistart interchange only.
    Heuristic,
    /// Enumeration when `C(m, p)` is within the enumeration limit,
    /// interchange otherwise.
    Auto,
}

impl std::str::FromStr for SolveMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact" => Ok(SolveMode::Exact),
            "heuristic" => Ok(SolveMode::Heuristic),
            "auto" => Ok(SolveMode::Auto),
            other => Err(format!("unknown mode {other:?} (expected exact, heuristic or auto)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteOptions {
    pub mode: SolveMode,
    pub budget: SearchBudget,
    pub starts: usize,
    pub seed: u64,
}

impl Default for DiscreteOptions {
    fn default() -> Self {
        DiscreteOptions { mode: SolveMode::Auto, budget: SearchBudget::default(), starts: DEFAULT_STARTS, seed: 0 }
    }
}

pub fn solve_discrete(matrix: &DistanceMatrix, weights: &[f64], p: usize, opts: &DiscreteOptions) -> Result<DiscreteSolution> {
    check_cardinality(matrix, p)?;
    match opts.mode {
        SolveMode::Exact => solve_exact(matrix, weights, p, &opts.budget),
        SolveMode::Heuristic => solve_interchange(matrix, weights, p, opts.starts, opts.seed),
        SolveMode::Auto if binomial(matrix.cols(), p) <= opts.budget.max_enumeration => {
            solve_exact(matrix, weights, p, &opts.budget)
        }
        SolveMode::Auto => solve_interchange(matrix, weights, p, opts.starts, opts.seed),
    }
}
