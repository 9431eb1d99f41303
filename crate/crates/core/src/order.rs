use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Rng;

/// Where an arrival order came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrderProvenance {
    AsGiven,
    UniformRandom { seed: u64, stream_id: u64 },
    Explicit,
}

/// A permutation of dataset indices: `perm[t]` is the dataset index of the
/// point arriving at position `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamOrder {
    perm: Vec<usize>,
    provenance: OrderProvenance,
}

impl StreamOrder {
    pub fn as_given(n: usize) -> Self {
        StreamOrder {
            perm: (0..n).collect(),
            provenance: OrderProvenance::AsGiven,
        }
    }

    pub fn explicit(perm: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; perm.len()];
        for &i in &perm {
            match seen.get_mut(i) {
                Some(s) if !*s => *s = true,
                _ => return Err(Error::invalid(format!("not a permutation: index {i}"))),
            }
        }
        Ok(StreamOrder {
            perm,
            provenance: OrderProvenance::Explicit,
        })
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn provenance(&self) -> OrderProvenance {
        self.provenance
    }

    /// Short label used in report rows.
    pub fn label(&self) -> String {
        match self.provenance {
            OrderProvenance::AsGiven => "given".to_string(),
            OrderProvenance::UniformRandom { seed, stream_id } => {
                format!("random:{seed}/{stream_id}")
            }
            OrderProvenance::Explicit => "explicit".to_string(),
        }
    }
}

/// A uniformly random arrival order (Fisher-Yates), reproducible from `rng`'s
/// seed and stream.
pub fn uniform_permutation(n: usize, rng: &mut Rng) -> Result<StreamOrder> {
    if n == 0 {
        return Err(Error::invalid("cannot permute an empty dataset"));
    }
    let provenance = OrderProvenance::UniformRandom {
        seed: rng.seed(),
        stream_id: rng.stream_id(),
    };
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    Ok(StreamOrder { perm, provenance })
}
