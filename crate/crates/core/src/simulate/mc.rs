use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::models::{ModelBundle, ModelKind};
use crate::ratlinalg::{to_f64, Rational};
use crate::{Error, Result};

use super::stats::{Moments, SimStats};
use super::tree::{MSTree, Statistic};

/// Independent stream for trial `trial`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Grows a tree to `n` keys by uniform gap choice.
pub fn random_tree(m: usize, n: u64, rng: &mut impl Rng) -> Result<MSTree> {
    let mut t = MSTree::with_capacity(m, n as usize)?;
    grow(&mut t, n, rng)?;
    Ok(t)
}

fn grow(t: &mut MSTree, n: u64, rng: &mut impl Rng) -> Result<()> {
    while t.n() < n {
        let r = rng.random_range(0..=t.n());
        t.insert_key(r)?;
    }
    Ok(())
}

/// Largest tree size a run may ask for.
pub const SIM_N_CAP: u64 = 100_000_000;
/// Largest total number of insertions, `n * trials`.
pub const SIM_WORK_CAP: u64 = 1_000_000_000_000;

#[derive(Clone, Debug)]
pub enum SimMode {
    /// Real trees built key by key.
    Tree,
    /// The ball process of a model, from its start state.
    Urn(Box<ModelBundle>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct McConfig {
    pub m: usize,
    pub n: u64,
    pub trials: u64,
    pub seed: u64,
    pub statistics: Vec<String>,
    pub keep_samples: bool,
}

/// Runs `trials` independent trials. Trial `t` draws from
/// `trial_rng(seed, t)` and results are folded in trial order, so the output
/// does not depend on the thread count.
pub fn run_mc(mode: &SimMode, cfg: &McConfig) -> Result<Vec<SimStats>> {
    if cfg.trials == 0 {
        return Err(Error::Domain("trials must be at least 1".into()));
    }
    if cfg.n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    if cfg.n > SIM_N_CAP || cfg.n.saturating_mul(cfg.trials) > SIM_WORK_CAP {
        return Err(Error::Size(format!(
            "n = {} with {} trials exceeds the caps n <= {SIM_N_CAP}, n * trials <= {SIM_WORK_CAP}",
            cfg.n, cfg.trials
        )));
    }
    if cfg.statistics.is_empty() {
        return Err(Error::Domain("no statistic requested".into()));
    }
    let values: Vec<Vec<f64>> = match mode {
        SimMode::Tree => {
            let stats: Vec<Statistic> = cfg
                .statistics
                .iter()
                .map(|s| Statistic::parse(s))
                .collect::<Result<_>>()?;
            MSTree::new(cfg.m)?;
            (0..cfg.trials)
                .into_par_iter()
                .map_init(
                    || MSTree::with_capacity(cfg.m, cfg.n as usize).expect("arity checked"),
                    |tree, t| {
                        tree.clear();
                        let mut rng = trial_rng(cfg.seed, t);
                        grow(tree, cfg.n, &mut rng).expect("ranks are in range");
                        let s = tree.count_stats();
                        stats.iter().map(|&x| s.get(x) as f64).collect()
                    },
                )
                .collect()
        }
        SimMode::Urn(bundle) => {
            if bundle.m != cfg.m {
                return Err(Error::Domain(format!(
                    "model has m = {}, run asked for m = {}",
                    bundle.m, cfg.m
                )));
            }
            let urn = UrnSampler::new(bundle)?;
            let fns: Vec<&[Rational]> = cfg
                .statistics
                .iter()
                .map(|s| urn_functional(bundle, s))
                .collect::<Result<_>>()?;
            if cfg.n < bundle.n0 {
                return Err(Error::Domain(format!(
                    "urn mode starts at n0 = {} keys; use tree mode for n = {}",
                    bundle.n0, cfg.n
                )));
            }
            let steps = cfg.n - bundle.n0;
            (0..cfg.trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = trial_rng(cfg.seed, t);
                    let x = urn.run(steps, &mut rng);
                    fns.iter().map(|c| evaluate(c, &x)).collect()
                })
                .collect()
        }
    };
    Ok(cfg
        .statistics
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let moments: Moments = values.iter().map(|v| v[k]).collect();
            SimStats {
                statistic: name.clone(),
                m: cfg.m,
                n: cfg.n,
                trials: cfg.trials,
                seed: cfg.seed,
                moments,
                samples: cfg
                    .keep_samples
                    .then(|| values.iter().map(|v| v[k]).collect()),
            }
        })
        .collect())
}

/// A model functional by name; tree statistic names are accepted where the
/// model measures the same quantity.
pub fn urn_functional<'a>(bundle: &'a ModelBundle, name: &str) -> Result<&'a [Rational]> {
    let alias = match (bundle.model, name) {
        (ModelKind::Protected, "two_protected") => "protected",
        _ => name,
    };
    bundle.functional(alias)
}

fn evaluate(c: &[Rational], x: &[u64]) -> f64 {
    let mut s = Rational::zero();
    for (ci, &xi) in c.iter().zip(x) {
        if xi != 0 && !ci.is_zero() {
            s += ci * Rational::from_integer(xi.into());
        }
    }
    to_f64(&s)
}

/// Integer-weighted ball process with a Fenwick tree over `a_i X_i`.
struct UrnSampler {
    q: usize,
    act: Vec<u64>,
    start: Vec<u64>,
    /// Per type: cumulative outcome weights over a common denominator and the
    /// sparse deltas.
    rules: Vec<Option<(Vec<u64>, Vec<Vec<(usize, i64)>>)>>,
}

impl UrnSampler {
    fn new(b: &ModelBundle) -> Result<Self> {
        let spec = &b.spec;
        let act: Vec<u64> = spec
            .activities()
            .iter()
            .map(|a| {
                if a.is_integer() {
                    a.to_integer().to_u64()
                } else {
                    None
                }
            })
            .collect::<Option<_>>()
            .ok_or_else(|| Error::Domain("urn simulation needs integer activities".into()))?;
        let mut rules = Vec::with_capacity(spec.q());
        for i in 0..spec.q() {
            rules.push(spec.rule(i).map(|r| {
                let den = r.outcomes.iter().fold(num_bigint::BigInt::from(1), |l, o| {
                    num_integer::Integer::lcm(&l, o.p.denom())
                });
                let mut acc = 0u64;
                let cum = r
                    .outcomes
                    .iter()
                    .map(|o| {
                        acc += (o.p.numer() * (&den / o.p.denom()))
                            .to_u64()
                            .expect("small weights");
                        acc
                    })
                    .collect();
                let deltas = r
                    .outcomes
                    .iter()
                    .map(|o| o.delta.nonzero().to_vec())
                    .collect();
                (cum, deltas)
            }));
        }
        Ok(Self {
            q: spec.q(),
            act,
            start: b.start.clone(),
            rules,
        })
    }

    fn run(&self, steps: u64, rng: &mut impl Rng) -> Vec<u64> {
        let mut x = self.start.clone();
        let mut fw = Fenwick::new(self.q);
        for i in 0..self.q {
            fw.add(i, (self.act[i] * x[i]) as i64);
        }
        for _ in 0..steps {
            let total = fw.total();
            let u = rng.random_range(0..total);
            let i = fw.find(u);
            let (cum, deltas) = self.rules[i].as_ref().expect("drawn types have rules");
            let v = rng.random_range(0..*cum.last().expect("nonempty"));
            let k = cum.partition_point(|&c| c <= v);
            for &(j, d) in &deltas[k] {
                x[j] = (x[j] as i64 + d) as u64;
                if self.act[j] != 0 {
                    fw.add(j, d * self.act[j] as i64);
                }
            }
        }
        x
    }
}

struct Fenwick {
    tree: Vec<i64>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Self {
            tree: vec![0; n + 1],
        }
    }

    fn add(&mut self, i: usize, d: i64) {
        let mut i = i + 1;
        while i < self.tree.len() {
            self.tree[i] += d;
            i += i & i.wrapping_neg();
        }
    }

    fn total(&self) -> u64 {
        let mut i = self.tree.len() - 1;
        let mut s = 0;
        while i > 0 {
            s += self.tree[i];
            i &= i - 1;
        }
        s as u64
    }

    /// Smallest index whose prefix sum exceeds `u`.
    fn find(&self, mut u: u64) -> usize {
        let n = self.tree.len() - 1;
        let mut pos = 0;
        let mut step = n.next_power_of_two();
        while step > 0 {
            let nxt = pos + step;
            if nxt <= n && (self.tree[nxt] as u64) <= u {
                pos = nxt;
                u -= self.tree[nxt] as u64;
            }
            step >>= 1;
        }
        pos
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{oneprotected_urn, protected_urn};

    fn cfg(m: usize, n: u64, trials: u64, stats: &[&str]) -> McConfig {
        McConfig {
            m,
            n,
            trials,
            seed: 7,
            statistics: stats.iter().map(|s| s.to_string()).collect(),
            keep_samples: false,
        }
    }

    #[test]
    fn fenwick_find() {
        let mut f = Fenwick::new(4);
        for (i, w) in [3, 0, 2, 5].into_iter().enumerate() {
            f.add(i, w);
        }
        let got: Vec<usize> = (0..10).map(|u| f.find(u)).collect();
        assert_eq!(got, vec![0, 0, 0, 2, 2, 3, 3, 3, 3, 3]);
        assert_eq!(f.total(), 10);
    }

    #[test]
    fn reproducible() {
        let c = cfg(3, 500, 8, &["two_protected", "leaves"]);
        assert_eq!(
            run_mc(&SimMode::Tree, &c).unwrap(),
            run_mc(&SimMode::Tree, &c).unwrap()
        );
        let u = SimMode::Urn(Box::new(protected_urn(3).unwrap()));
        assert_eq!(run_mc(&u, &c).unwrap(), run_mc(&u, &c).unwrap());
    }

    #[test]
    fn binary_internal_is_n() {
        let s = run_mc(&SimMode::Tree, &cfg(2, 300, 5, &["internal"])).unwrap();
        assert_eq!(s[0].mean(), 300.0);
        assert_eq!(s[0].variance(), 0.0);
        let u = SimMode::Urn(Box::new(oneprotected_urn(2).unwrap()));
        let s = run_mc(&u, &cfg(2, 300, 5, &["internal"])).unwrap();
        assert_eq!(s[0].mean(), 300.0);
    }

    #[test]
    fn errors() {
        assert!(run_mc(&SimMode::Tree, &cfg(3, 10, 1, &["height"])).is_err());
        assert!(run_mc(&SimMode::Tree, &cfg(3, 10, 0, &["leaves"])).is_err());
        let u = SimMode::Urn(Box::new(protected_urn(3).unwrap()));
        assert!(run_mc(&u, &cfg(3, 2, 1, &["leaves"])).is_err());
    }
}
