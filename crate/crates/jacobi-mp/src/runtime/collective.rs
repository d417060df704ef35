//! Star-topology collectives over the mailboxes: every non-root exchanges
//! exactly one message with the root, and an allreduce is a gather followed
//! by a broadcast. Collective traffic is metered into `collective_bytes` on
//! the sending side and does not touch the point-to-point counters.

use super::context::RankContext;
use super::stats::ELEMENT_BYTES;
use super::{RuntimeError, TAG_BROADCAST, TAG_GATHER};

impl RankContext<'_> {
    fn raw_collective_recv(&self, src: usize, tag: u32, what: &str) -> Result<Vec<f64>, RuntimeError> {
        let rank = self.rank();
        self.job.blocking_take(
            rank,
            || format!("{what}(src={src})"),
            &self.job.mailboxes[rank].queues,
            &self.job.mailboxes[rank].cv,
            |queues| queues.get_mut(&(src, tag)).and_then(|q| q.pop_front()),
        )
    }

    /// Concatenates every rank's block at `root` in rank order. Non-roots
    /// get `None`. All ranks must pass blocks of the same length.
    pub fn gather(&mut self, root: usize, local: &[f64]) -> Result<Option<Vec<f64>>, RuntimeError> {
        self.job.check_rank(root)?;
        if self.rank() != root {
            self.job.mailboxes[root].push(self.rank(), TAG_GATHER, local.to_vec());
            self.stats.collective_bytes += local.len() as u64 * ELEMENT_BYTES;
            return Ok(None);
        }
        let mut full = Vec::with_capacity(local.len() * self.world_size());
        for r in 0..self.world_size() {
            if r == root {
                full.extend_from_slice(local);
            } else {
                let block = self.raw_collective_recv(r, TAG_GATHER, "gather")?;
                if block.len() != local.len() {
                    let err = RuntimeError::CollectiveMismatch {
                        rank: self.rank(),
                        detail: format!(
                            "gather block from rank {r} has length {}, root expected {}",
                            block.len(),
                            local.len()
                        ),
                    };
                    self.job.state.record_failure(self.rank(), err.clone());
                    return Err(err);
                }
                full.extend_from_slice(&block);
            }
        }
        Ok(Some(full))
    }

    /// Delivers the root's value to every rank.
    pub fn broadcast(&mut self, root: usize, value: &[f64]) -> Result<Vec<f64>, RuntimeError> {
        self.job.check_rank(root)?;
        if self.rank() == root {
            for r in 0..self.world_size() {
                if r != root {
                    self.job.mailboxes[r].push(root, TAG_BROADCAST, value.to_vec());
                    self.stats.collective_bytes += value.len() as u64 * ELEMENT_BYTES;
                }
            }
            Ok(value.to_vec())
        } else {
            self.raw_collective_recv(root, TAG_BROADCAST, "broadcast")
        }
    }

    /// Elementwise sum of every rank's vector, available on all ranks. The
    /// sum is formed once at rank 0 in ascending rank order and broadcast, so
    /// each rank sees bitwise-identical results.
    pub fn allreduce_sum(&mut self, local: &[f64]) -> Result<Vec<f64>, RuntimeError> {
        const ROOT: usize = 0;
        let gathered = self.gather(ROOT, local)?;
        let sum = gathered.map(|blocks| {
            let mut acc = vec![0.0; local.len()];
            for r in 0..self.world_size() {
                let block = &blocks[r * local.len()..(r + 1) * local.len()];
                for (a, v) in acc.iter_mut().zip(block) {
                    *a += v;
                }
            }
            acc
        });
        match sum {
            Some(acc) => self.broadcast(ROOT, &acc),
            None => self.broadcast(ROOT, &[]),
        }
    }
}
