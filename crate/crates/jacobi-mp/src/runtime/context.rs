use super::job::Job;
use super::stats::ELEMENT_BYTES;
use super::{CommStats, RuntimeError};

/// The per-rank handle a worker uses for every runtime operation. Exactly one
/// exists per rank per job; it is moved into the worker and never shared.
pub struct RankContext<'job> {
    rank: usize,
    world: usize,
    pub(crate) job: &'job Job,
    pub(crate) stats: CommStats,
    pub(crate) windows_created: usize,
}

/// A non-blocking transfer in flight. Completion is sticky: once `test`
/// observes it, the payload is held here until `wait` hands it over.
pub struct PendingTransfer {
    kind: TransferKind,
    state: TransferState,
}

enum TransferKind {
    Send,
    Receive { src: usize, tag: u32 },
}

enum TransferState {
    InFlight,
    Complete(Option<Vec<f64>>),
}

impl<'job> RankContext<'job> {
    pub(crate) fn new(rank: usize, world: usize, job: &'job Job) -> Self {
        Self { rank, world, job, stats: CommStats::default(), windows_created: 0 }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn world_size(&self) -> usize {
        self.world
    }

    pub fn stats(&self) -> &CommStats {
        &self.stats
    }

    fn check_peer(&self, peer: usize) -> Result<(), RuntimeError> {
        self.job.check_rank(peer)?;
        if peer == self.rank {
            return Err(RuntimeError::SelfMessage(self.rank));
        }
        Ok(())
    }

    /// Buffered send: copies the payload into the destination mailbox and
    /// returns immediately. Messages on a fixed `(source, dest, tag)` channel
    /// are received in send order.
    pub fn send(&mut self, dest: usize, tag: u32, data: &[f64]) -> Result<(), RuntimeError> {
        self.check_peer(dest)?;
        self.job.mailboxes[dest].push(self.rank, tag, data.to_vec());
        self.stats.point_to_point_messages += 1;
        self.stats.point_to_point_bytes += data.len() as u64 * ELEMENT_BYTES;
        Ok(())
    }

    /// Blocking receive of the next payload on the `(src, tag)` channel.
    pub fn recv(&mut self, src: usize, tag: u32) -> Result<Vec<f64>, RuntimeError> {
        self.check_peer(src)?;
        let rank = self.rank;
        self.job.blocking_take(
            rank,
            || format!("recv(src={src}, tag={tag})"),
            &self.job.mailboxes[rank].queues,
            &self.job.mailboxes[rank].cv,
            |queues| queues.get_mut(&(src, tag)).and_then(|q| q.pop_front()),
        )
    }

    /// Non-blocking send. With buffered semantics the transfer completes at
    /// issue time; the handle exists so send and receive sides share one
    /// test/wait protocol.
    pub fn isend(&mut self, dest: usize, tag: u32, data: &[f64]) -> Result<PendingTransfer, RuntimeError> {
        self.send(dest, tag, data)?;
        Ok(PendingTransfer { kind: TransferKind::Send, state: TransferState::Complete(None) })
    }

    /// Non-blocking receive: returns immediately; the payload is claimed by
    /// `test`/`wait`. At most one receive per channel should be outstanding,
    /// matching how the solvers use the shift pattern.
    pub fn irecv(&mut self, src: usize, tag: u32) -> Result<PendingTransfer, RuntimeError> {
        self.check_peer(src)?;
        Ok(PendingTransfer { kind: TransferKind::Receive { src, tag }, state: TransferState::InFlight })
    }

    /// Polls a pending transfer without blocking.
    pub fn test(&mut self, transfer: &mut PendingTransfer) -> Result<bool, RuntimeError> {
        match (&transfer.kind, &transfer.state) {
            (_, TransferState::Complete(_)) => Ok(true),
            (TransferKind::Send, TransferState::InFlight) => unreachable!("sends complete at issue"),
            (&TransferKind::Receive { src, tag }, TransferState::InFlight) => {
                match self.job.mailboxes[self.rank].try_pop(src, tag) {
                    Some(payload) => {
                        transfer.state = TransferState::Complete(Some(payload));
                        Ok(true)
                    }
                    None => Ok(false),
                }
            }
        }
    }

    /// Blocks until the transfer completes. Returns the payload for a
    /// receive (once; taking it twice is an error) and `None` for a send.
    pub fn wait(&mut self, transfer: &mut PendingTransfer) -> Result<Option<Vec<f64>>, RuntimeError> {
        match transfer.kind {
            TransferKind::Send => Ok(None),
            TransferKind::Receive { src, tag } => {
                match &mut transfer.state {
                    TransferState::Complete(slot) => {
                        return slot.take().map(Some).ok_or(RuntimeError::WaitAfterConsumed);
                    }
                    TransferState::InFlight => {}
                }
                let rank = self.rank;
                let payload = self.job.blocking_take(
                    rank,
                    || format!("wait(irecv src={src}, tag={tag})"),
                    &self.job.mailboxes[rank].queues,
                    &self.job.mailboxes[rank].cv,
                    |queues| queues.get_mut(&(src, tag)).and_then(|q| q.pop_front()),
                )?;
                transfer.state = TransferState::Complete(None);
                Ok(Some(payload))
            }
        }
    }
}
