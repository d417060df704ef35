//! In-process SPMD message-passing runtime.
//!
//! [`run_spmd`] spawns one worker thread per rank; workers talk through
//! buffered point-to-point mailboxes (FIFO per `(source, dest, tag)`
//! channel), star-topology collectives, and one-sided memory windows with
//! active-target epoch synchronization. Every transfer is metered into
//! per-rank [`CommStats`]. A watchdog aborts the job with a per-rank state
//! dump when every live worker has been blocked for the configured interval.

mod collective;
mod context;
mod job;
mod spmd;
mod stats;
mod window;

pub use context::{PendingTransfer, RankContext};
pub use spmd::{run_spmd, run_spmd_with, SpmdRun};
pub use stats::CommStats;
pub use window::{ProcessGroup, WindowAccess, WindowHandle, WindowLog, WindowOp};

use std::sync::{Mutex, MutexGuard};
use std::time::Duration;
use thiserror::Error;

/// Tag used by the solvers' cyclic-shift sends.
pub const TAG_SHIFT: u32 = 1;
/// Tag used internally by the gather collective.
pub const TAG_GATHER: u32 = 2;
/// Tag used internally by the broadcast collective.
pub const TAG_BROADCAST: u32 = 3;
/// Tag used by setup and teardown traffic (data distribution, result return).
pub const TAG_CONTROL: u32 = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RuntimeError {
    #[error("world size must be at least 1")]
    EmptyWorld,
    #[error("rank {rank} out of range for world size {world}")]
    InvalidRank { rank: usize, world: usize },
    #[error("rank {0} attempted to message itself")]
    SelfMessage(usize),
    #[error("deadlock: every live rank blocked past the watchdog interval\n{dump}")]
    Deadlock { dump: String },
    #[error("worker at rank {0} panicked")]
    WorkerPanicked(usize),
    #[error("cancelled after a failure on another rank")]
    Cancelled,
    #[error("collective mismatch at rank {rank}: {detail}")]
    CollectiveMismatch { rank: usize, detail: String },
    #[error("invalid process group: {0}")]
    InvalidGroup(String),
    #[error("window epoch violation at rank {rank}: {detail}")]
    EpochViolation { rank: usize, detail: String },
    #[error("window range violation: offset {offset} + length {len} exceeds window length {window}")]
    RangeViolation { offset: usize, len: usize, window: usize },
    #[error("rank {rank} is not the owner of the window (owner is {owner})")]
    NotOwner { rank: usize, owner: usize },
    #[error("pending receive payload already taken")]
    WaitAfterConsumed,
}

/// Runtime tuning knobs; the defaults suit production-sized runs, tests use
/// a much shorter watchdog interval.
#[derive(Debug, Clone, Copy)]
pub struct RuntimeConfig {
    /// How long every live rank must stay blocked before the watchdog calls
    /// the job deadlocked.
    pub deadlock_timeout: Duration,
    /// How often a blocked rank wakes to re-check cancellation and the
    /// deadlock condition.
    pub poll_interval: Duration,
}

impl Default for RuntimeConfig {
    fn default() -> Self {
        Self { deadlock_timeout: Duration::from_secs(5), poll_interval: Duration::from_millis(25) }
    }
}

/// Mutex lock that survives a poisoning panic on another thread; worker
/// panics are already converted into job failures, so the protected state is
/// still consistent.
pub(crate) fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|e| e.into_inner())
}
