//! Deterministic instance generators.
//!
//! Random instances use ChaCha8 seeded through `seed_from_u64` from
//! `rand_chacha` 0.3. Edge `(d, c)` is present iff the next raw 64-bit draw
//! `u` satisfies `u * den < num * 2^64` for the class probability `num/den`.
//! Draws are taken over in-class points, then out-class points, each against
//! every certificate in id order. Isolated in-class points are then repaired
//! in id order: draw `u` until `u < m * floor(2^64 / m)` and attach
//! certificate `u mod m`. [`RNG_ALGORITHM`] names this procedure and is copied
//! into the metadata of every generated file.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::CsInstance;
use crate::ratio::ExactRatio;
use crate::reductions::{reduce_dks, reduce_mku, ReductionArtifact, SetSystem, SourceGraph};

pub const RNG_ALGORITHM: &str = "chacha8/rand_chacha-0.3/seed_from_u64; bernoulli: u64 threshold; repair: rejection-sampled uniform";

fn width(n: usize) -> usize {
    n.saturating_sub(1).to_string().len().max(2)
}

/// The letters/digits family: `n` single-letter in-class points plus one
/// all-digits point, `n` single-digit out-class points plus one all-letters
/// point. Letter `i` touches single-letter point `i` and the all-letters
/// point; digit `j` touches single-digit point `j` and the all-digits point.
///
/// Every certificate has precision 1/2, yet accepting all letters reaches
/// completeness and soundness `n/(n+1)`; the AFC is `n`.
pub fn letters_digits(n: usize) -> Result<CsInstance> {
    if n == 0 {
        return Err(Error::InvalidArgument("letters_digits needs n >= 1".into()));
    }
    let w = width(n);
    let mut in_class = vec!["x-all-digits".to_string()];
    let mut out_class = vec!["y-all-letters".to_string()];
    let mut certificates = Vec::with_capacity(2 * n);
    let mut edges = Vec::with_capacity(4 * n);
    for i in 0..n {
        let (letter, digit) = (format!("letter-{i:0w$}"), format!("digit-{i:0w$}"));
        let (x, y) = (format!("x-letter-{i:0w$}"), format!("y-digit-{i:0w$}"));
        edges.push((x.clone(), letter.clone()));
        edges.push(("y-all-letters".to_string(), letter.clone()));
        edges.push((y.clone(), digit.clone()));
        edges.push(("x-all-digits".to_string(), digit.clone()));
        in_class.push(x);
        out_class.push(y);
        certificates.push(letter);
        certificates.push(digit);
    }
    CsInstance::new(&in_class, &out_class, &certificates, &edges)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomCsiParams {
    pub n_in: usize,
    pub n_out: usize,
    pub m: usize,
    pub p_in: ExactRatio,
    pub p_out: ExactRatio,
    pub seed: u64,
}

impl RandomCsiParams {
    pub fn check(&self) -> Result<()> {
        if self.n_in == 0 || self.n_out == 0 || self.m == 0 {
            return Err(Error::InvalidArgument(
                "n_in, n_out and m must be at least 1".into(),
            ));
        }
        for (name, p) in [("p_in", &self.p_in), ("p_out", &self.p_out)] {
            if p.is_negative() || *p > ExactRatio::one() {
                return Err(Error::InvalidArgument(format!(
                    "{name} = {p} is outside [0, 1]"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomCsi {
    pub instance: CsInstance,
    /// In-class points that had no edge and received one random certificate.
    pub repaired: Vec<String>,
}

/// Bernoulli trial on one raw draw, exact for any rational probability.
struct Coin {
    small: Option<(u128, u128)>,
    big: (BigInt, BigInt),
}

impl Coin {
    fn new(p: &ExactRatio) -> Self {
        let (num, den) = (p.numerator().clone(), p.denominator().clone());
        let small = den.to_u64().and_then(|d| Some((num.to_u128()?, d as u128)));
        Coin {
            small,
            big: (num, den),
        }
    }

    fn flip(&self, u: u64) -> bool {
        match self.small {
            Some((num, den)) => (u as u128) * den < num << 64,
            None => BigInt::from(u) * &self.big.1 < &self.big.0 << 64,
        }
    }
}

fn uniform_below(rng: &mut ChaCha8Rng, m: usize) -> usize {
    let m = m as u128;
    let zone = (1u128 << 64) / m * m;
    loop {
        let u = rng.next_u64() as u128;
        if u < zone {
            return (u % m) as usize;
        }
    }
}

/// Seeded random instance with ids `x..`, `y..` and `c..`.
pub fn random_csi(params: &RandomCsiParams) -> Result<RandomCsi> {
    params.check()?;
    let id = |prefix: &str, n: usize| {
        let w = width(n);
        (0..n)
            .map(|i| format!("{prefix}{i:0w$}"))
            .collect::<Vec<_>>()
    };
    let (in_class, out_class, certificates) = (
        id("x", params.n_in),
        id("y", params.n_out),
        id("c", params.m),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut edges = Vec::new();
    let mut isolated = Vec::new();
    for (points, coin, repair) in [
        (&in_class, Coin::new(&params.p_in), true),
        (&out_class, Coin::new(&params.p_out), false),
    ] {
        for d in points {
            let before = edges.len();
            for c in &certificates {
                if coin.flip(rng.next_u64()) {
                    edges.push((d.clone(), c.clone()));
                }
            }
            if repair && edges.len() == before {
                isolated.push(d.clone());
            }
        }
    }
    for d in &isolated {
        let c = uniform_below(&mut rng, params.m);
        edges.push((d.clone(), certificates[c].clone()));
    }
    let instance = CsInstance::new(&in_class, &out_class, &certificates, &edges)?;
    Ok(RandomCsi {
        instance,
        repaired: isolated,
    })
}

/// Solver stress instance: `m` certificates, `m` points per class, every
/// datapoint–certificate edge present with probability 1/3.
pub fn stress_instance(m: usize, seed: u64) -> Result<RandomCsi> {
    random_csi(&RandomCsiParams {
        n_in: m,
        n_out: m,
        m,
        p_in: ExactRatio::new(1, 3),
        p_out: ExactRatio::new(1, 3),
        seed,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZooEntry {
    pub name: &'static str,
    pub instance: CsInstance,
    /// Present for entries built by a reduction.
    pub artifact: Option<ReductionArtifact>,
}

/// The small fixed instances used throughout the tests and docs.
pub fn gadget_zoo() -> Vec<ZooEntry> {
    let plain = |name, instance: Result<CsInstance>| ZooEntry {
        name,
        instance: instance.expect("fixed zoo instance"),
        artifact: None,
    };
    let reduced = |name, artifact: Result<ReductionArtifact>| {
        let artifact = artifact.expect("fixed zoo reduction");
        ZooEntry {
            name,
            instance: artifact.instance.clone(),
            artifact: Some(artifact),
        }
    };
    let k3 = SourceGraph::new(&["1", "2", "3"], &[("1", "2"), ("2", "3"), ("1", "3")]).expect("K3");
    let path = SetSystem::new(
        &["1", "2", "3", "4"],
        &[vec!["1", "2"], vec!["2", "3"], vec!["3", "4"]],
    )
    .expect("path set system");
    vec![
        plain(
            "T1",
            CsInstance::new(
                &["x1", "x2"],
                &["y1"],
                &["a", "b"],
                &[("x1", "a"), ("x2", "a"), ("x2", "b"), ("y1", "b")],
            ),
        ),
        plain(
            "balanced-identity",
            CsInstance::new(
                &["x1", "x2"],
                &["y1", "y2"],
                &["a"],
                &[("x1", "a"), ("x2", "a"), ("y1", "a")],
            ),
        ),
        reduced("k3-dks-k2", reduce_dks(&k3, 2)),
        reduced("mku-path", reduce_mku(&path, 1)),
    ]
}

pub fn zoo_entry(name: &str) -> Option<ZooEntry> {
    gadget_zoo().into_iter().find(|e| e.name == name)
}
