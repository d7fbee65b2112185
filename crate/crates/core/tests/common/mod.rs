//! Independent oracles and instance generators shared by the integration tests.
//!
//! Nothing here calls the solver. The oracles use machine integers or small
//! fixed-size fractions so they share no arithmetic with the library.
#![allow(dead_code)]

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use tugames::exact_lp::{LinearProgram, Relation, Sense, VarSign};
use tugames::game_model::{Game, RestrictedGame};
use tugames::rational::{int, Rational};
use tugames::set_algebra::{Coalition, PlayerUniverse, SetFamily};

pub type Q = Ratio<i64>;

pub fn to_rational(q: Q) -> Rational {
    Rational::new(BigInt::from(*q.numer()), BigInt::from(*q.denom()))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Small LPs and a boxed vertex-enumeration oracle.

#[derive(Debug, Clone)]
pub struct SmallLp {
    pub maximize: bool,
    pub objective: Vec<i64>,
    /// `(coefficients, relation, rhs)` with relation −1 for ≤, 0 for =, 1 for ≥.
    pub rows: Vec<(Vec<i64>, i8, i64)>,
    pub free: Vec<bool>,
}

impl SmallLp {
    pub fn random(r: &mut ChaCha8Rng) -> Self {
        let vars = r.gen_range(1..=6);
        let rows = r.gen_range(1..=8);
        let coef = |r: &mut ChaCha8Rng| r.gen_range(-3i64..=3);
        SmallLp {
            maximize: r.gen_bool(0.5),
            objective: (0..vars).map(|_| coef(r)).collect(),
            rows: (0..rows)
                .map(|_| {
                    let a = (0..vars).map(|_| coef(r)).collect();
                    let rel = [-1i8, -1, 0, 1, 1][r.gen_range(0..5)];
                    (a, rel, coef(r))
                })
                .collect(),
            free: (0..vars).map(|_| r.gen_bool(0.3)).collect(),
        }
    }

    pub fn to_lp(&self) -> LinearProgram {
        let sense = if self.maximize {
            Sense::Max
        } else {
            Sense::Min
        };
        let signs = self
            .free
            .iter()
            .map(|&f| {
                if f {
                    VarSign::Free
                } else {
                    VarSign::NonNegative
                }
            })
            .collect();
        let mut lp = LinearProgram::new(
            sense,
            self.objective.iter().map(|&c| int(c)).collect(),
            signs,
        )
        .unwrap();
        for (a, rel, b) in &self.rows {
            let relation = match rel {
                -1 => Relation::Le,
                0 => Relation::Eq,
                _ => Relation::Ge,
            };
            lp.add_constraint(
                a.iter().enumerate().map(|(j, &c)| (j, int(c))),
                relation,
                int(*b),
            )
            .unwrap();
        }
        lp
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleStatus {
    Infeasible,
    Unbounded,
    /// Optimal value `num / den`.
    Optimal(i128, i128),
}

fn det(mut m: Vec<Vec<i128>>) -> i128 {
    // Bareiss fraction-free elimination.
    let n = m.len();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&i| m[i][k] != 0) else {
                return 0;
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

fn combinations(total: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(
        start: usize,
        total: usize,
        k: usize,
        cur: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]),
    ) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..total {
            if total - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, total, k, cur, f);
            cur.pop();
        }
    }
    rec(0, total, k, &mut Vec::new(), f);
}

/// Best objective over the LP intersected with the box `|x_j| ≤ bound`,
/// in the caller's sense. `None` when the boxed problem is infeasible.
fn boxed_optimum(lp: &SmallLp, bound: i128) -> Option<(i128, i128)> {
    let n = lp.objective.len();
    // Every row as `a·x ≥ b`, equalities flagged.
    let mut rows: Vec<(Vec<i128>, i128, bool)> = Vec::new();
    for (a, rel, b) in &lp.rows {
        let a: Vec<i128> = a.iter().map(|&c| c as i128).collect();
        let b = *b as i128;
        match rel {
            -1 => rows.push((a.iter().map(|c| -c).collect(), -b, false)),
            0 => rows.push((a, b, true)),
            _ => rows.push((a, b, false)),
        }
    }
    for j in 0..n {
        let mut e = vec![0i128; n];
        e[j] = 1;
        rows.push((e.clone(), if lp.free[j] { -bound } else { 0 }, false));
        rows.push((e.iter().map(|c| -c).collect(), -bound, false));
    }
    let sign: i128 = if lp.maximize { 1 } else { -1 };
    let c: Vec<i128> = lp.objective.iter().map(|&c| c as i128).collect();
    let mut best: Option<(i128, i128)> = None;
    combinations(rows.len(), n, &mut |pick| {
        let a: Vec<Vec<i128>> = pick.iter().map(|&i| rows[i].0.clone()).collect();
        let mut d = det(a.clone());
        if d == 0 {
            return;
        }
        let mut x: Vec<i128> = (0..n)
            .map(|j| {
                let mut aj = a.clone();
                for (k, &i) in pick.iter().enumerate() {
                    aj[k][j] = rows[i].1;
                }
                det(aj)
            })
            .collect();
        if d < 0 {
            d = -d;
            x.iter_mut().for_each(|v| *v = -*v);
        }
        let feasible = rows.iter().all(|(a, b, eq)| {
            let lhs: i128 = a.iter().zip(&x).map(|(p, q)| p * q).sum();
            if *eq {
                lhs == b * d
            } else {
                lhs >= b * d
            }
        });
        if !feasible {
            return;
        }
        let value: i128 = c.iter().zip(&x).map(|(p, q)| p * q).sum::<i128>() * sign;
        let better = match best {
            None => true,
            Some((bn, bd)) => value * bd > bn * d,
        };
        if better {
            best = Some((value, d));
        }
    });
    best.map(|(v, d)| (v * sign, d))
}

/// Status and optimum by enumerating vertices of the LP cut by two boxes.
/// A bounded optimum sits at a vertex well inside the smaller box, so the
/// two boxes agree exactly when the LP is bounded.
pub fn lp_oracle(lp: &SmallLp) -> OracleStatus {
    let small = boxed_optimum(lp, 1 << 30);
    let large = boxed_optimum(lp, 1 << 31);
    match (small, large) {
        (None, _) => OracleStatus::Infeasible,
        (Some((a, b)), Some((c, d))) if a * d == b * c => {
            let g = a.gcd(&b);
            OracleStatus::Optimal(a / g, b / g)
        }
        _ => OracleStatus::Unbounded,
    }
}

// ---------------------------------------------------------------------------
// Balanced collections by enumeration.

/// Solves `Σ_k λ_k χ_{S_k} = χ_N` over `{1..n}` for independent characteristic
/// vectors; `None` if dependent or inconsistent.
fn unique_weights(n: u32, sets: &[u32]) -> Option<Vec<Q>> {
    let k = sets.len();
    let mut m: Vec<Vec<Q>> = (0..n)
        .map(|i| {
            let mut row: Vec<Q> = sets
                .iter()
                .map(|s| Q::from_integer(i64::from(s >> i & 1)))
                .collect();
            row.push(Q::from_integer(1));
            row
        })
        .collect();
    let mut pivot_row = 0;
    let mut pivot_cols = Vec::new();
    for col in 0..k {
        let Some(p) = (pivot_row..n as usize).find(|&r| m[r][col] != Q::from_integer(0)) else {
            return None;
        };
        m.swap(pivot_row, p);
        let pv = m[pivot_row][col];
        for j in 0..=k {
            m[pivot_row][j] /= pv;
        }
        for r in 0..n as usize {
            if r != pivot_row && m[r][col] != Q::from_integer(0) {
                let f = m[r][col];
                for j in 0..=k {
                    let t = m[pivot_row][j];
                    m[r][j] -= f * t;
                }
            }
        }
        pivot_cols.push(col);
        pivot_row += 1;
    }
    if (pivot_row..n as usize).any(|r| m[r][k] != Q::from_integer(0)) {
        return None;
    }
    Some((0..k).map(|c| m[c][k]).collect())
}

/// Maximum of `Σ λ_S v(S)` over minimal balanced collections drawn from
/// `pool` (bitmasks over `{1..n}`, bit `i−1` for player `i`). The grand
/// coalition is added to the pool. Exhaustive over subsets of size ≤ n.
pub fn max_balanced_sum(n: u32, pool: &[u32], value: impl Fn(u32) -> Q) -> Q {
    let full = (1u32 << n) - 1;
    let mut sets: Vec<u32> = pool.iter().copied().filter(|&s| s != 0).collect();
    if !sets.contains(&full) {
        sets.push(full);
    }
    sets.sort_unstable();
    sets.dedup();
    let mut best = value(full);
    for k in 1..=n as usize {
        combinations(sets.len(), k, &mut |pick| {
            let chosen: Vec<u32> = pick.iter().map(|&i| sets[i]).collect();
            if let Some(w) = unique_weights(n, &chosen) {
                if w.iter().all(|l| *l > Q::from_integer(0)) {
                    let total = chosen
                        .iter()
                        .zip(&w)
                        .fold(Q::from_integer(0), |acc, (s, l)| acc + *l * value(*s));
                    if total > best {
                        best = total;
                    }
                }
            }
        });
    }
    best
}

// ---------------------------------------------------------------------------
// Fields of sets over {1..n}, n ≤ 4, by brute force over all families.

/// Every field over `{1..n}` as a family bitmask indexed by subset masks.
pub fn all_fields(n: u32) -> &'static [u32] {
    static CACHE: [OnceLock<Vec<u32>>; 5] = [const { OnceLock::new() }; 5];
    CACHE[n as usize].get_or_init(|| {
        let subsets = 1u32 << n;
        let full = subsets - 1;
        let families = 1u64 << subsets;
        let mut out = Vec::new();
        for fam in 0..families {
            let fam = fam as u32;
            let has = |s: u32| fam >> s & 1 == 1;
            if !has(0) {
                continue;
            }
            let members: Vec<u32> = (0..subsets).filter(|&s| has(s)).collect();
            let closed = members.iter().all(|&s| has(full & !s))
                && members.iter().all(|&s| members.iter().all(|&t| has(s | t)));
            if closed {
                out.push(fam);
            }
        }
        out
    })
}

/// The smallest field containing the generators, as a family bitmask.
pub fn brute_hull(n: u32, generators: &[u32]) -> u32 {
    all_fields(n)
        .iter()
        .copied()
        .filter(|fam| generators.iter().all(|&g| fam >> g & 1 == 1))
        .min_by_key(|fam| fam.count_ones())
        .expect("the power set is a field")
}

// ---------------------------------------------------------------------------
// Partitions and sums.

/// All set partitions of `{0..k}` as block-index assignments.
pub fn set_partitions(k: usize) -> Vec<Vec<usize>> {
    fn rec(i: usize, k: usize, cur: &mut Vec<usize>, blocks: usize, out: &mut Vec<Vec<usize>>) {
        if i == k {
            out.push(cur.clone());
            return;
        }
        for b in 0..=blocks {
            cur.push(b);
            rec(i + 1, k, cur, blocks.max(b + 1), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, k, &mut Vec::new(), 0, &mut out);
    out
}

/// `1 + 1/2 + ⋯ + 1/n`, summed over a running common denominator.
pub fn harmonic_oracle(n: u32) -> Rational {
    let mut num = BigInt::from(0);
    let mut den = BigInt::from(1);
    for k in 1..=n {
        let k = BigInt::from(k);
        num = num * &k + &den;
        den *= k;
    }
    let g = num.gcd(&den);
    Rational::new(num / &g, den / g)
}

// ---------------------------------------------------------------------------
// Instance generators.

pub fn finite(n: u32, mask: u32) -> Coalition {
    Coalition::from_mask(n, u64::from(mask))
}

/// Game on the power set of `{1..n}` with integer values in `[lo, hi]`.
pub fn random_game(r: &mut ChaCha8Rng, n: u32, lo: i64, hi: i64) -> (Game, Vec<i64>) {
    let full = (1u32 << n) - 1;
    let mut values = vec![0i64; 1 << n];
    for s in 1..=full {
        values[s as usize] = r.gen_range(lo..=hi);
    }
    let table = (1..full)
        .map(|s| (finite(n, s), int(values[s as usize])))
        .collect();
    let game = Game::explicit(
        PlayerUniverse::Finite(n),
        table,
        int(values[full as usize]),
        None,
    )
    .unwrap();
    (game, values)
}

/// Restricted game on a random family of at most `max_sets` coalitions.
pub fn random_restricted(
    r: &mut ChaCha8Rng,
    n: u32,
    max_sets: usize,
) -> (RestrictedGame, Vec<(u32, i64)>) {
    let full = (1u32 << n) - 1;
    let count = r.gen_range(1..=max_sets);
    let mut sets: Vec<u32> = if full > 1 {
        (0..count).map(|_| r.gen_range(1..full)).collect()
    } else {
        Vec::new()
    };
    sets.sort_unstable();
    sets.dedup();
    let entries: Vec<(u32, i64)> = sets.iter().map(|&s| (s, r.gen_range(-5..=5))).collect();
    let grand = r.gen_range(-5..=5);
    let universe = PlayerUniverse::Finite(n);
    let table = entries
        .iter()
        .map(|&(s, v)| (finite(n, s), int(v)))
        .collect();
    let rg = RestrictedGame::new(universe, None, table, int(grand)).unwrap();
    let mut all = entries;
    all.push((full, grand));
    (rg, all)
}

pub fn family(n: u32, masks: &[u32]) -> SetFamily {
    SetFamily::new(
        PlayerUniverse::Finite(n),
        masks.iter().map(|&m| finite(n, m)),
    )
    .unwrap()
}

/// `v(S) = a(S) − slack_S` with `v(N) = a(N)`, so `a` is in the core. Returns
/// the game and a declared lower bound at or below its minimum.
pub fn balanced_game(r: &mut ChaCha8Rng, n: u32) -> (Game, Rational) {
    let a: Vec<i64> = (0..n).map(|_| r.gen_range(-5..=5)).collect();
    let full = (1u32 << n) - 1;
    let mut min = 0i64;
    let mut table = Vec::new();
    for s in 1..full {
        let sum: i64 = (0..n)
            .filter(|i| s >> i & 1 == 1)
            .map(|i| a[i as usize])
            .sum();
        let value = sum - r.gen_range(0..=3);
        min = min.min(value);
        table.push((finite(n, s), int(value)));
    }
    let grand: i64 = a.iter().sum();
    let declared = int(min.min(grand) - r.gen_range(0..=2));
    (
        Game::explicit(
            PlayerUniverse::Finite(n),
            table,
            int(grand),
            Some(declared.clone()),
        )
        .unwrap(),
        declared,
    )
}
