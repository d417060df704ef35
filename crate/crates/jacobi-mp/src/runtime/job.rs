use super::window::WindowShared;
use super::{lock, RuntimeConfig, RuntimeError};
use std::collections::{HashMap, VecDeque};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Condvar, Mutex};
use std::time::Instant;

/// Per-rank inbox: queued payloads keyed by `(source, tag)`. Senders push
/// without blocking (buffered semantics); only the owning rank pops.
pub(crate) struct Mailbox {
    pub(crate) queues: Mutex<HashMap<(usize, u32), VecDeque<Vec<f64>>>>,
    pub(crate) cv: Condvar,
}

impl Mailbox {
    fn new() -> Self {
        Self { queues: Mutex::new(HashMap::new()), cv: Condvar::new() }
    }

    pub(crate) fn push(&self, src: usize, tag: u32, payload: Vec<f64>) {
        lock(&self.queues).entry((src, tag)).or_default().push_back(payload);
        self.cv.notify_one();
    }

    pub(crate) fn try_pop(&self, src: usize, tag: u32) -> Option<Vec<f64>> {
        lock(&self.queues).get_mut(&(src, tag)).and_then(|q| q.pop_front())
    }
}

#[derive(Debug, Clone)]
enum Phase {
    Running,
    Blocked { since: Instant, what: String },
    Finished,
}

/// Shared job control: per-rank phases for the deadlock watchdog, the
/// cancellation flag, and the first recorded failure.
pub(crate) struct JobState {
    phases: Mutex<Vec<Phase>>,
    cancel: AtomicBool,
    failure: Mutex<Option<(usize, RuntimeError)>>,
}

impl JobState {
    fn new(world: usize) -> Self {
        Self {
            phases: Mutex::new(vec![Phase::Running; world]),
            cancel: AtomicBool::new(false),
            failure: Mutex::new(None),
        }
    }

    pub(crate) fn cancelled(&self) -> bool {
        self.cancel.load(Ordering::Relaxed)
    }

    pub(crate) fn finish(&self, rank: usize) {
        lock(&self.phases)[rank] = Phase::Finished;
    }

    fn set_blocked(&self, rank: usize, what: String) {
        lock(&self.phases)[rank] = Phase::Blocked { since: Instant::now(), what };
    }

    fn set_running(&self, rank: usize) {
        lock(&self.phases)[rank] = Phase::Running;
    }

    /// Records the first real failure and flips the cancellation flag so
    /// every other rank unwinds at its next blocking operation.
    pub(crate) fn record_failure(&self, rank: usize, err: RuntimeError) {
        if matches!(err, RuntimeError::Cancelled) {
            return;
        }
        let mut slot = lock(&self.failure);
        if slot.is_none() {
            *slot = Some((rank, err));
        }
        self.cancel.store(true, Ordering::Relaxed);
    }

    pub(crate) fn take_failure(&self) -> Option<(usize, RuntimeError)> {
        lock(&self.failure).take()
    }

    /// When every live rank has been blocked for at least `timeout`, returns
    /// the per-rank state dump; otherwise `None`.
    fn deadlock_dump(&self, timeout: std::time::Duration) -> Option<String> {
        let phases = lock(&self.phases);
        let now = Instant::now();
        let mut live = 0usize;
        for phase in phases.iter() {
            match phase {
                Phase::Finished => {}
                Phase::Blocked { since, .. } if now.duration_since(*since) >= timeout => live += 1,
                _ => return None,
            }
        }
        if live == 0 {
            return None;
        }
        let mut dump = String::new();
        for (rank, phase) in phases.iter().enumerate() {
            let line = match phase {
                Phase::Running => format!("  rank {rank}: running"),
                Phase::Finished => format!("  rank {rank}: finished"),
                Phase::Blocked { since, what } => format!(
                    "  rank {rank}: blocked in {what} for {:.3}s",
                    now.duration_since(*since).as_secs_f64()
                ),
            };
            dump.push_str(&line);
            dump.push('\n');
        }
        Some(dump)
    }
}

pub(crate) struct Job {
    pub(crate) world: usize,
    pub(crate) config: RuntimeConfig,
    pub(crate) mailboxes: Vec<Mailbox>,
    pub(crate) windows: Mutex<Vec<Arc<WindowShared>>>,
    pub(crate) state: JobState,
}

// Brief polling burst before parking on the condvar; the common case is a
// payload that is already buffered, which the first check catches.
const SPIN_CHECKS: usize = 16;
const SPIN_HINTS: usize = 32;

impl Job {
    pub(crate) fn new(world: usize, config: RuntimeConfig) -> Self {
        Self {
            world,
            config,
            mailboxes: (0..world).map(|_| Mailbox::new()).collect(),
            windows: Mutex::new(Vec::new()),
            state: JobState::new(world),
        }
    }

    /// Blocks `rank` until `take` yields a value from the state behind
    /// `mutex`, unwinding early on cancellation and reporting a deadlock when
    /// the whole job goes quiet. `take` may mutate the protected state; it is
    /// re-run after every wakeup.
    pub(crate) fn blocking_take<S, R>(
        &self,
        rank: usize,
        what: impl Fn() -> String,
        mutex: &Mutex<S>,
        cv: &Condvar,
        mut take: impl FnMut(&mut S) -> Option<R>,
    ) -> Result<R, RuntimeError> {
        for _ in 0..SPIN_CHECKS {
            if let Some(r) = take(&mut lock(mutex)) {
                return Ok(r);
            }
            if self.state.cancelled() {
                return Err(RuntimeError::Cancelled);
            }
            for _ in 0..SPIN_HINTS {
                std::hint::spin_loop();
            }
        }

        self.state.set_blocked(rank, what());
        let result = self.park_until(rank, mutex, cv, &mut take);
        self.state.set_running(rank);
        result
    }

    fn park_until<S, R>(
        &self,
        rank: usize,
        mutex: &Mutex<S>,
        cv: &Condvar,
        take: &mut impl FnMut(&mut S) -> Option<R>,
    ) -> Result<R, RuntimeError> {
        let mut guard = lock(mutex);
        loop {
            if let Some(r) = take(&mut guard) {
                return Ok(r);
            }
            if self.state.cancelled() {
                return Err(RuntimeError::Cancelled);
            }
            let (next, timeout) = cv
                .wait_timeout(guard, self.config.poll_interval)
                .unwrap_or_else(|e| e.into_inner());
            guard = next;
            if timeout.timed_out() {
                if let Some(dump) = self.state.deadlock_dump(self.config.deadlock_timeout) {
                    let err = RuntimeError::Deadlock { dump };
                    self.state.record_failure(rank, err.clone());
                    return Err(err);
                }
            }
        }
    }

    pub(crate) fn check_rank(&self, rank: usize) -> Result<(), RuntimeError> {
        if rank < self.world {
            Ok(())
        } else {
            Err(RuntimeError::InvalidRank { rank, world: self.world })
        }
    }
}
