//! Uniform random and jittered point-set generators.
//!
//! Jittered sampling draws one uniform point from each cell of an
//! equal-area partition. Cell `i` always draws from stream `i` of the user
//! seed, so a set does not depend on the order in which cells are sampled.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::invalid;
use crate::onebit::{Method, PointSet, PointSetMeta};
use crate::partition::Partition;
use crate::rng;
use crate::sphere::{uniform_into, Point};
use crate::Result;

fn check(d: usize, n: usize) -> Result<()> {
    if d < 1 {
        return Err(invalid("d", "sphere dimension must be at least 1"));
    }
    if n < 1 {
        return Err(invalid("N", "must be at least 1"));
    }
    Ok(())
}

/// `N` independent uniform points on `S^d`.
pub fn random_set(d: usize, n: usize, seed: u64) -> Result<PointSet> {
    check(d, n)?;
    let mut r = rng::stream(seed, 0);
    let mut buf = vec![0.0; d + 1];
    let points = (0..n)
        .map(|_| {
            uniform_into(&mut buf, &mut r);
            Point::normalize(buf.clone())
        })
        .collect::<Result<Vec<_>>>()?;
    PointSet::new(
        points,
        PointSetMeta {
            method: Method::Random,
            seed: Some(seed),
            partition_n: None,
        },
    )
}

/// The point drawn in cell `i` of a jittered set with the given seed.
pub fn jittered_point(partition: &Partition, i: usize, seed: u64) -> Result<Point> {
    partition.cell_sample(i, &mut rng::stream(seed, i as u64))
}

/// One uniform point per cell of `partition`, in cell order.
pub fn jittered_from_partition(partition: &Partition, seed: u64) -> Result<PointSet> {
    let points = (0..partition.len())
        .map(|i| jittered_point(partition, i, seed))
        .collect::<Result<Vec<_>>>()?;
    PointSet::new(
        points,
        PointSetMeta {
            method: Method::Jittered,
            seed: Some(seed),
            partition_n: Some(partition.len()),
        },
    )
}

/// A jittered set over a freshly built partition of `S^d` into `N` cells.
pub fn jittered_set(d: usize, n: usize, seed: u64) -> Result<PointSet> {
    check(d, n)?;
    jittered_from_partition(&Partition::build(d, n)?, seed)
}

/// Partitions keyed by `(d, N)`, built on first use.
#[derive(Debug, Default, Clone)]
pub struct PartitionCache {
    built: BTreeMap<(usize, usize), Arc<Partition>>,
}

impl PartitionCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, d: usize, n: usize) -> Result<Arc<Partition>> {
        if let Some(p) = self.built.get(&(d, n)) {
            return Ok(Arc::clone(p));
        }
        check(d, n)?;
        let p = Arc::new(Partition::build(d, n)?);
        self.built.insert((d, n), Arc::clone(&p));
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.built.len()
    }

    pub fn is_empty(&self) -> bool {
        self.built.is_empty()
    }

    /// A jittered set using the cached partition for `(d, N)`.
    pub fn jittered_set(&mut self, d: usize, n: usize, seed: u64) -> Result<PointSet> {
        let p = self.get(d, n)?;
        jittered_from_partition(&p, seed)
    }
}
