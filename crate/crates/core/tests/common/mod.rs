//! Naive reference implementations, written straight from the definitions
//! and sharing no code with the library beyond reading the edge list.

#![allow(dead_code)]

use std::collections::BTreeSet;

use dcs_core::{CsInstance, ExactRatio, RawInstance};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub fn q(n: usize, d: usize) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn exact(r: &ExactRatio) -> BigRational {
    r.as_big_rational().clone()
}

/// Index-based copy of an instance built from its raw edge list.
pub struct Naive {
    pub ins: Vec<String>,
    pub outs: Vec<String>,
    pub certs: Vec<String>,
    /// Certificates adjacent to each in-class point.
    pub in_adj: Vec<Vec<usize>>,
    /// Certificates adjacent to each out-class point.
    pub out_adj: Vec<Vec<usize>>,
}

impl Naive {
    pub fn new(instance: &CsInstance) -> Self {
        Self::from_raw(&instance.to_raw())
    }

    pub fn from_raw(raw: &RawInstance) -> Self {
        let sorted = |v: &[String]| {
            let mut v = v.to_vec();
            v.sort();
            v.dedup();
            v
        };
        let (ins, outs, certs) = (
            sorted(&raw.in_class),
            sorted(&raw.out_class),
            sorted(&raw.certificates),
        );
        let mut in_adj = vec![BTreeSet::new(); ins.len()];
        let mut out_adj = vec![BTreeSet::new(); outs.len()];
        for (a, b) in &raw.edges {
            let (d, c) = if certs.contains(b) { (a, b) } else { (b, a) };
            let c = certs
                .iter()
                .position(|id| id == c)
                .expect("certificate endpoint");
            if let Some(x) = ins.iter().position(|id| id == d) {
                in_adj[x].insert(c);
            } else if let Some(y) = outs.iter().position(|id| id == d) {
                out_adj[y].insert(c);
            }
        }
        let flat =
            |v: Vec<BTreeSet<usize>>| v.into_iter().map(|s| s.into_iter().collect()).collect();
        Naive {
            ins,
            outs,
            certs,
            in_adj: flat(in_adj),
            out_adj: flat(out_adj),
        }
    }

    pub fn m(&self) -> usize {
        self.certs.len()
    }

    fn in_of(&self, c: usize) -> usize {
        self.in_adj.iter().filter(|n| n.contains(&c)).count()
    }

    fn out_of(&self, c: usize) -> usize {
        self.out_adj.iter().filter(|n| n.contains(&c)).count()
    }

    fn has(mask: u64, c: usize) -> bool {
        mask >> c & 1 == 1
    }

    pub fn completeness(&self, accepted: u64, prover: &[usize]) -> BigRational {
        q(
            prover.iter().filter(|&&c| Self::has(accepted, c)).count(),
            self.ins.len(),
        )
    }

    pub fn soundness(&self, accepted: u64) -> BigRational {
        let safe = self
            .out_adj
            .iter()
            .filter(|n| n.iter().all(|&c| !Self::has(accepted, c)))
            .count();
        q(safe, self.outs.len())
    }

    pub fn precision(&self, c: usize) -> Option<BigRational> {
        let (i, o) = (self.in_of(c), self.out_of(c));
        (i + o > 0).then(|| q(i, i + o))
    }

    /// `(|N(F) ∩ D₁|, |N(F) ∩ D₋₁|)`.
    pub fn neighbourhood(&self, set: u64) -> (usize, usize) {
        let touches = |n: &Vec<usize>| n.iter().any(|&c| Self::has(set, c));
        (
            self.in_adj.iter().filter(|n| touches(n)).count(),
            self.out_adj.iter().filter(|n| touches(n)).count(),
        )
    }

    pub fn set_precision(&self, set: u64) -> Option<BigRational> {
        let (i, o) = self.neighbourhood(set);
        (i + o > 0).then(|| q(i, i + o))
    }

    pub fn prover_precision(&self, prover: &[usize]) -> BigRational {
        let total = prover.iter().fold(BigRational::zero(), |acc, &c| {
            acc + self.precision(c).expect("used certificate has a neighbour")
        });
        total / q(self.ins.len(), 1)
    }

    /// The averaged κ expression for one set, evaluated term by term.
    pub fn afc_of(&self, set: u64) -> Option<BigRational> {
        let (p, big_q) = self.neighbourhood(set);
        if p == 0 || big_q == 0 {
            return None;
        }
        let mut total = BigRational::zero();
        for n in &self.in_adj {
            let best = n
                .iter()
                .filter(|&&c| Self::has(set, c))
                .map(|&c| q(self.out_of(c) * p, big_q * self.in_of(c)))
                .max();
            if let Some(k) = best {
                total += k;
            }
        }
        Some(total / q(p, 1))
    }

    pub fn afc_max(&self) -> Option<BigRational> {
        (1u64..1 << self.m()).filter_map(|s| self.afc_of(s)).max()
    }

    /// Every total prover, as certificate choices per in-class point.
    pub fn provers(&self) -> Vec<Vec<usize>> {
        let mut all = vec![Vec::new()];
        for n in &self.in_adj {
            all = all
                .into_iter()
                .flat_map(|p| {
                    n.iter().map(move |&c| {
                        let mut p = p.clone();
                        p.push(c);
                        p
                    })
                })
                .collect();
        }
        all
    }

    pub fn prover_count(&self) -> u128 {
        self.in_adj.iter().map(|n| n.len() as u128).product()
    }

    /// Minimum `Pr(M)` over provers with completeness at least `1 - eps_c`.
    pub fn min_prover_precision(&self, accepted: u64, eps_c: &BigRational) -> Option<BigRational> {
        let floor = BigRational::one() - eps_c;
        self.provers()
            .iter()
            .filter(|p| self.completeness(accepted, p) >= floor)
            .map(|p| self.prover_precision(p))
            .min()
    }

    /// Best DCS objective over all (A, M), or `None` when infeasible.
    pub fn dcs(&self, eps_c: &BigRational, eps_s: &BigRational) -> Option<BigRational> {
        let provers: Vec<(Vec<usize>, BigRational)> = self
            .provers()
            .into_iter()
            .map(|p| {
                let pr = self.prover_precision(&p);
                (p, pr)
            })
            .collect();
        let (c_floor, s_floor) = (BigRational::one() - eps_c, BigRational::one() - eps_s);
        let mut best: Option<BigRational> = None;
        for a in 0u64..1 << self.m() {
            if self.soundness(a) < s_floor {
                continue;
            }
            for (p, pr) in &provers {
                if self.completeness(a, p) >= c_floor {
                    let value = BigRational::one() - pr;
                    if best.as_ref().is_none_or(|b| value > *b) {
                        best = Some(value);
                    }
                }
            }
        }
        best
    }

    /// Best DCS2 objective over all (A, M), or `None` when infeasible.
    pub fn dcs2(&self, eps_c: &BigRational, q_gap: &BigRational) -> Option<BigRational> {
        let provers: Vec<(Vec<usize>, BigRational)> = self
            .provers()
            .into_iter()
            .map(|p| {
                let pr = self.prover_precision(&p);
                (p, pr)
            })
            .collect();
        let (c_floor, ceiling) = (BigRational::one() - eps_c, BigRational::one() - q_gap);
        let mut best: Option<BigRational> = None;
        for a in 0u64..1 << self.m() {
            let value = BigRational::one() - self.soundness(a);
            if best.as_ref().is_some_and(|b| value >= *b) {
                continue;
            }
            if provers
                .iter()
                .any(|(p, pr)| *pr <= ceiling && self.completeness(a, p) >= c_floor)
            {
                best = Some(value);
            }
        }
        best
    }
}

/// Connected graphs on 2..=5 vertices, one per isomorphism class, with at
/// most `max_edges` edges, followed by a few 6-vertex graphs.
pub fn connected_graph_fixtures(max_edges: usize) -> Vec<(usize, Vec<(usize, usize)>)> {
    let mut out = Vec::new();
    for n in 2..=5usize {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        let perms = permutations(n);
        let mut seen = BTreeSet::new();
        for mask in 1u32..1 << pairs.len() {
            let edges: Vec<(usize, usize)> = (0..pairs.len())
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| pairs[i])
                .collect();
            if edges.len() > max_edges || !connected(n, &edges) {
                continue;
            }
            let canonical = perms
                .iter()
                .map(|p| {
                    let mut e: Vec<(usize, usize)> = edges
                        .iter()
                        .map(|&(u, v)| (p[u].min(p[v]), p[u].max(p[v])))
                        .collect();
                    e.sort();
                    e
                })
                .min()
                .expect("at least one permutation");
            if seen.insert(canonical.clone()) {
                out.push((n, canonical));
            }
        }
    }
    let cycle: Vec<_> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
    let path: Vec<_> = (0..5).map(|i| (i, i + 1)).collect();
    let star: Vec<_> = (1..6).map(|i| (0, i)).collect();
    let k33: Vec<_> = (0..3).flat_map(|u| (3..6).map(move |v| (u, v))).collect();
    let prism = vec![
        (0, 1),
        (1, 2),
        (0, 2),
        (3, 4),
        (4, 5),
        (3, 5),
        (0, 3),
        (1, 4),
        (2, 5),
    ];
    out.extend([cycle, path, star, k33, prism].into_iter().map(|e| (6, e)));
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    permutations(n - 1)
        .into_iter()
        .flat_map(|p| {
            (0..n).map(move |pos| {
                let mut p = p.clone();
                p.insert(pos, n - 1);
                p
            })
        })
        .collect()
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut reached = vec![false; n];
    reached[0] = true;
    let mut changed = true;
    while changed {
        changed = false;
        for &(u, v) in edges {
            if reached[u] != reached[v] {
                reached[u] = true;
                reached[v] = true;
                changed = true;
            }
        }
    }
    reached.into_iter().all(|r| r)
}

/// Fixed 2- and 3-uniform set systems with at most 9 sets over at most 8 elements.
pub fn uniform_set_fixtures() -> Vec<(usize, Vec<Vec<usize>>)> {
    vec![
        (4, vec![vec![0, 1], vec![1, 2], vec![2, 3]]),
        (3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]),
        (4, vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]]),
        (5, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![0, 4]]),
        (4, vec![vec![0, 1], vec![0, 1], vec![2, 3], vec![1, 2]]),
        (
            6,
            vec![vec![0, 1], vec![2, 3], vec![4, 5], vec![1, 2], vec![3, 4]],
        ),
        (
            4,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3],
            ],
        ),
        (
            8,
            vec![
                vec![0, 1],
                vec![1, 2],
                vec![2, 3],
                vec![3, 4],
                vec![4, 5],
                vec![5, 6],
                vec![6, 7],
                vec![7, 0],
            ],
        ),
        (
            5,
            vec![
                vec![0, 1],
                vec![1, 2],
                vec![2, 3],
                vec![3, 4],
                vec![4, 0],
                vec![0, 2],
                vec![1, 3],
                vec![2, 4],
                vec![3, 0],
            ],
        ),
        (4, vec![vec![0, 1, 2], vec![1, 2, 3], vec![0, 2, 3]]),
        (
            6,
            vec![vec![0, 1, 2], vec![3, 4, 5], vec![1, 2, 3], vec![0, 4, 5]],
        ),
        (
            5,
            vec![
                vec![0, 1, 2],
                vec![0, 1, 3],
                vec![0, 1, 4],
                vec![2, 3, 4],
                vec![1, 2, 3],
            ],
        ),
        (
            7,
            vec![
                vec![0, 1, 2],
                vec![0, 3, 4],
                vec![0, 5, 6],
                vec![1, 3, 5],
                vec![1, 4, 6],
                vec![2, 3, 6],
                vec![2, 4, 5],
            ],
        ),
        (
            8,
            vec![
                vec![0, 1, 2],
                vec![2, 3, 4],
                vec![4, 5, 6],
                vec![6, 7, 0],
                vec![1, 3, 5],
                vec![3, 5, 7],
            ],
        ),
        (
            6,
            vec![
                vec![0, 1, 2],
                vec![0, 1, 3],
                vec![0, 2, 3],
                vec![1, 2, 3],
                vec![3, 4, 5],
                vec![2, 4, 5],
                vec![0, 4, 5],
                vec![1, 4, 5],
                vec![0, 1, 4],
            ],
        ),
    ]
}
