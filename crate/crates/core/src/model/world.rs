use crate::error::{Error, Result};
use crate::model::{Formula, Labelling};

/// Largest argument count any world-space object will accept.
pub const MAX_WORLD_ARGS: usize = 30;

/// Default soft limit on argument counts for world-space computations.
pub const DEFAULT_WORLD_LIMIT: usize = 16;

/// A possible world: bit `i` is set iff the `i`-th argument (canonical order)
/// is accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct World(pub u32);

impl World {
    pub fn contains(self, arg: usize) -> bool {
        (self.0 >> arg) & 1 == 1
    }

    pub fn from_accepted(args: impl IntoIterator<Item = usize>) -> Self {
        World(args.into_iter().fold(0, |m, a| m | 1 << a))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

pub(crate) fn check_world_limit(what: &'static str, n: usize, limit: usize) -> Result<()> {
    let limit = limit.min(MAX_WORLD_ARGS);
    if n > limit {
        Err(Error::TooManyArguments { what, n, limit })
    } else {
        Ok(())
    }
}

/// A probability function over all `2^n` worlds, stored densely by world mask.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldDistribution {
    num_args: usize,
    probs: Vec<f64>,
}

impl WorldDistribution {
    /// Validates non-negativity and normalization (within 1e-9).
    pub fn new(num_args: usize, probs: Vec<f64>) -> Result<Self> {
        check_world_limit("a world distribution", num_args, MAX_WORLD_ARGS)?;
        let expected = 1usize << num_args;
        if probs.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: probs.len(),
            });
        }
        if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::InvalidDistribution(format!("entry {p} is not a probability")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDistribution(format!("entries sum to {total}")));
        }
        Ok(WorldDistribution { num_args, probs })
    }

    /// Clips small negative noise to zero and renormalizes. Used for solver output.
    pub(crate) fn from_noisy(num_args: usize, mut probs: Vec<f64>) -> Self {
        for p in probs.iter_mut() {
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let total: f64 = probs.iter().sum();
        for p in probs.iter_mut() {
            *p /= total;
        }
        WorldDistribution { num_args, probs }
    }

    pub fn point_mass(num_args: usize, world: World) -> Result<Self> {
        check_world_limit("a world distribution", num_args, MAX_WORLD_ARGS)?;
        let mut probs = vec![0.0; 1 << num_args];
        probs[world.index()] = 1.0;
        Ok(WorldDistribution { num_args, probs })
    }

    pub fn uniform(num_args: usize) -> Result<Self> {
        check_world_limit("a world distribution", num_args, MAX_WORLD_ARGS)?;
        let size = 1usize << num_args;
        Ok(WorldDistribution {
            num_args,
            probs: vec![1.0 / size as f64; size],
        })
    }

    /// The product distribution P_L induced by a labelling:
    /// `P_L(w) = prod_{A in w} L(A) * prod_{A not in w} (1 - L(A))`.
    pub fn factorized(labelling: &Labelling) -> Result<Self> {
        let n = labelling.len();
        check_world_limit("a factorized distribution", n, MAX_WORLD_ARGS)?;
        // Build the table one argument at a time; entry w of the partial table
        // covers arguments 0..k.
        let mut probs = Vec::with_capacity(1 << n);
        probs.push(1.0);
        for &l in labelling.values() {
            let half = probs.len();
            for w in 0..half {
                let p = probs[w];
                probs.push(p * l);
                probs[w] = p * (1.0 - l);
            }
        }
        Ok(WorldDistribution { num_args: n, probs })
    }

    pub fn num_args(&self) -> usize {
        self.num_args
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, world: World) -> f64 {
        self.probs[world.index()]
    }

    pub fn worlds(&self) -> impl Iterator<Item = (World, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(|(w, &p)| (World(w as u32), p))
    }

    /// P(f): total probability of the worlds satisfying `f`.
    pub fn prob_of_formula(&self, f: &Formula) -> Result<f64> {
        f.check_arity(self.num_args)?;
        Ok(self
            .worlds()
            .filter(|(w, _)| f.eval(*w))
            .map(|(_, p)| p)
            .sum())
    }

    /// P(A): total probability of the worlds accepting `arg`.
    pub fn marginal(&self, arg: usize) -> Result<f64> {
        if arg >= self.num_args {
            return Err(Error::IndexOutOfRange {
                index: arg,
                len: self.num_args,
            });
        }
        Ok(self
            .worlds()
            .filter(|(w, _)| w.contains(arg))
            .map(|(_, p)| p)
            .sum())
    }

    /// The labelling L_P with L_P(A) = P(A).
    pub fn labelling(&self) -> Labelling {
        let mut values = vec![0.0; self.num_args];
        for (w, p) in self.worlds() {
            for (a, v) in values.iter_mut().enumerate() {
                if w.contains(a) {
                    *v += p;
                }
            }
        }
        Labelling::from_noisy(values)
    }
}
