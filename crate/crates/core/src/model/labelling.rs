use crate::error::{Error, Result};
use crate::model::Baf;

/// A probability labelling: one degree of belief in `[0, 1]` per argument,
/// indexed in the framework's canonical order.
///
/// A labelling stands for the whole class of probability functions sharing
/// these marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct Labelling {
    values: Vec<f64>,
}

impl Labelling {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v >= 0.0 && **v <= 1.0))
        {
            return Err(Error::InvalidLabelling(format!(
                "value {v} at index {i} is outside [0, 1]"
            )));
        }
        Ok(Labelling { values })
    }

    /// Builds a labelling from named values; every argument of `baf` must be
    /// assigned exactly once.
    pub fn from_names<S: AsRef<str>>(
        baf: &Baf,
        values: impl IntoIterator<Item = (S, f64)>,
    ) -> Result<Self> {
        let mut out = vec![None; baf.len()];
        for (name, v) in values {
            let i = baf.index_of(name.as_ref())?;
            if out[i].replace(v).is_some() {
                return Err(Error::InvalidLabelling(format!(
                    "`{}` assigned twice",
                    name.as_ref()
                )));
            }
        }
        let values = out
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                v.ok_or_else(|| {
                    Error::InvalidLabelling(format!("`{}` is unassigned", baf.name(i)))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Labelling::new(values)
    }

    /// Clamps solver output into `[0, 1]`.
    pub(crate) fn from_noisy(mut values: Vec<f64>) -> Self {
        for v in values.iter_mut() {
            *v = v.clamp(0.0, 1.0);
        }
        Labelling { values }
    }

    pub fn uniform(n: usize) -> Self {
        Labelling {
            values: vec![0.5; n],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, arg: usize) -> f64 {
        self.values[arg]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value_of(&self, baf: &Baf, name: &str) -> Result<f64> {
        Ok(self.values[baf.index_of(name)?])
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if self.values.len() == n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: n,
                found: self.values.len(),
            })
        }
    }
}
