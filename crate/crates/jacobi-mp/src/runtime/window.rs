//! One-sided memory windows with active-target synchronization.
//!
//! The owner opens an exposure epoch with `window_post` and closes it with
//! `window_wait`; origins open an access epoch with `window_start` and close
//! it with `window_complete`. Gets observe the window contents as of the
//! epoch open; puts are buffered and applied, in `(origin, issue order)`
//! order, when the owner's `window_wait` returns — so transfers are visible
//! exactly at epoch boundaries and a get can never see a torn put.

use super::context::RankContext;
use super::stats::ELEMENT_BYTES;
use super::{lock, RuntimeError};
use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Condvar, Mutex};

/// A non-empty, duplicate-free set of ranks taking part in an epoch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessGroup {
    members: Vec<usize>,
}

impl ProcessGroup {
    pub fn new(mut members: Vec<usize>) -> Result<Self, RuntimeError> {
        if members.is_empty() {
            return Err(RuntimeError::InvalidGroup("group must be non-empty".into()));
        }
        members.sort_unstable();
        if members.windows(2).any(|w| w[0] == w[1]) {
            return Err(RuntimeError::InvalidGroup("duplicate rank in group".into()));
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, rank: usize) -> bool {
        self.members.binary_search(&rank).is_ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowOp {
    Get,
    Put,
}

/// One logged window access, kept for post-run inspection of solver
/// discipline (which windows were read or written in which epoch).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowAccess {
    pub epoch: u64,
    pub origin: usize,
    pub op: WindowOp,
    pub offset: usize,
    pub len: usize,
}

/// Access log of one window, returned alongside the job results.
#[derive(Debug, Clone)]
pub struct WindowLog {
    pub owner: usize,
    pub len: usize,
    pub accesses: Vec<WindowAccess>,
}

struct Exposure {
    id: u64,
    group: Vec<usize>,
    completed: BTreeSet<usize>,
}

struct PendingPut {
    origin: usize,
    seq: u64,
    offset: usize,
    data: Vec<f64>,
}

pub(crate) struct WinState {
    committed: Vec<f64>,
    pending: Vec<PendingPut>,
    exposure: Option<Exposure>,
    post_seq: u64,
    last_completed: HashMap<usize, u64>,
    log: Vec<WindowAccess>,
}

pub(crate) struct WindowShared {
    owner: usize,
    len: usize,
    state: Mutex<WinState>,
    cv: Condvar,
}

impl WindowShared {
    fn new(owner: usize, len: usize) -> Self {
        Self {
            owner,
            len,
            state: Mutex::new(WinState {
                committed: vec![0.0; len],
                pending: Vec::new(),
                exposure: None,
                post_seq: 0,
                last_completed: HashMap::new(),
                log: Vec::new(),
            }),
            cv: Condvar::new(),
        }
    }

    pub(crate) fn snapshot_log(&self) -> WindowLog {
        let state = lock(&self.state);
        WindowLog { owner: self.owner, len: self.len, accesses: state.log.clone() }
    }
}

/// A rank's handle onto a shared window: the storage lives with the owner,
/// and this side carries only the access-epoch state.
pub struct WindowHandle {
    shared: Arc<WindowShared>,
    access_epoch: Option<u64>,
    put_seq: u64,
}

impl WindowHandle {
    pub fn owner(&self) -> usize {
        self.shared.owner
    }

    pub fn len(&self) -> usize {
        self.shared.len
    }

    pub fn is_empty(&self) -> bool {
        self.shared.len == 0
    }

    fn check_range(&self, offset: usize, len: usize) -> Result<(), RuntimeError> {
        if offset + len > self.shared.len {
            return Err(RuntimeError::RangeViolation { offset, len, window: self.shared.len });
        }
        Ok(())
    }
}

impl RankContext<'_> {
    /// Collectively registers a window of `len` elements owned by `owner`.
    /// Every rank must call with the same arguments, in the same order
    /// relative to its other `window_create` calls; storage is allocated
    /// only at the owner, all other handles just reference it.
    pub fn window_create(&mut self, owner: usize, len: usize) -> Result<WindowHandle, RuntimeError> {
        self.job.check_rank(owner)?;
        if len == 0 {
            return Err(RuntimeError::RangeViolation { offset: 0, len: 0, window: 0 });
        }
        let index = self.windows_created;
        self.windows_created += 1;
        let mut registry = lock(&self.job.windows);
        let shared = if index < registry.len() {
            let existing = Arc::clone(&registry[index]);
            if existing.owner != owner || existing.len != len {
                let err = RuntimeError::CollectiveMismatch {
                    rank: self.rank(),
                    detail: format!(
                        "window {index} created as owner={} len={}, this rank passed owner={owner} len={len}",
                        existing.owner, existing.len
                    ),
                };
                self.job.state.record_failure(self.rank(), err.clone());
                return Err(err);
            }
            existing
        } else {
            let created = Arc::new(WindowShared::new(owner, len));
            registry.push(Arc::clone(&created));
            created
        };
        Ok(WindowHandle { shared, access_epoch: None, put_seq: 0 })
    }

    /// Owner side: opens an exposure epoch for the origins in `group`.
    pub fn window_post(&mut self, window: &WindowHandle, group: &ProcessGroup) -> Result<(), RuntimeError> {
        if self.rank() != window.owner() {
            return Err(RuntimeError::NotOwner { rank: self.rank(), owner: window.owner() });
        }
        for &r in group.members() {
            self.job.check_rank(r)?;
        }
        let mut state = lock(&window.shared.state);
        if state.exposure.is_some() {
            return Err(self.epoch_violation("post while the previous exposure epoch is still open"));
        }
        state.post_seq += 1;
        state.exposure = Some(Exposure {
            id: state.post_seq,
            group: group.members().to_vec(),
            completed: BTreeSet::new(),
        });
        window.shared.cv.notify_all();
        Ok(())
    }

    /// Origin side: opens an access epoch, blocking until the owner has
    /// posted a matching exposure that includes this rank. `group` names the
    /// target side and must contain exactly the window owner.
    pub fn window_start(&mut self, window: &mut WindowHandle, group: &ProcessGroup) -> Result<(), RuntimeError> {
        if group.members() != [window.owner()] {
            return Err(self.epoch_violation("start group must contain exactly the window owner"));
        }
        if window.access_epoch.is_some() {
            return Err(self.epoch_violation("start while an access epoch is already open"));
        }
        let rank = self.rank();
        let owner = window.owner();
        let epoch = self.job.blocking_take(
            rank,
            || format!("window_start(owner={owner})"),
            &window.shared.state,
            &window.shared.cv,
            |state| match &state.exposure {
                Some(exposure)
                    if exposure.group.contains(&rank)
                        && exposure.id > state.last_completed.get(&rank).copied().unwrap_or(0) =>
                {
                    Some(exposure.id)
                }
                _ => None,
            },
        )?;
        window.access_epoch = Some(epoch);
        window.put_seq = 0;
        Ok(())
    }

    /// Writes `data` at `offset` in the owner's window. Buffered until the
    /// epoch closes; visible at the target after its `window_wait` returns.
    pub fn window_put(&mut self, window: &mut WindowHandle, offset: usize, data: &[f64]) -> Result<(), RuntimeError> {
        let epoch = window
            .access_epoch
            .ok_or_else(|| self.epoch_violation("put outside an access epoch"))?;
        window.check_range(offset, data.len())?;
        let origin = self.rank();
        let mut state = lock(&window.shared.state);
        state.pending.push(PendingPut { origin, seq: window.put_seq, offset, data: data.to_vec() });
        state.log.push(WindowAccess { epoch, origin, op: WindowOp::Put, offset, len: data.len() });
        window.put_seq += 1;
        self.stats.window_put_bytes += data.len() as u64 * ELEMENT_BYTES;
        Ok(())
    }

    /// Reads `len` elements at `offset` as of the epoch open (puts issued in
    /// the current epoch are not yet visible).
    pub fn window_get(&mut self, window: &WindowHandle, offset: usize, len: usize) -> Result<Vec<f64>, RuntimeError> {
        let epoch = window
            .access_epoch
            .ok_or_else(|| self.epoch_violation("get outside an access epoch"))?;
        window.check_range(offset, len)?;
        let origin = self.rank();
        let mut state = lock(&window.shared.state);
        let data = state.committed[offset..offset + len].to_vec();
        state.log.push(WindowAccess { epoch, origin, op: WindowOp::Get, offset, len });
        self.stats.window_get_bytes += len as u64 * ELEMENT_BYTES;
        Ok(data)
    }

    /// Origin side: closes this rank's access epoch.
    pub fn window_complete(&mut self, window: &mut WindowHandle) -> Result<(), RuntimeError> {
        let epoch = window
            .access_epoch
            .take()
            .ok_or_else(|| self.epoch_violation("complete without a matching start"))?;
        let rank = self.rank();
        let mut state = lock(&window.shared.state);
        debug_assert!(matches!(&state.exposure, Some(e) if e.id == epoch));
        if let Some(exposure) = state.exposure.as_mut() {
            exposure.completed.insert(rank);
        }
        state.last_completed.insert(rank, epoch);
        window.shared.cv.notify_all();
        Ok(())
    }

    /// Owner side: blocks until every origin in the posted group has
    /// completed, then applies all buffered puts and closes the exposure.
    pub fn window_wait(&mut self, window: &WindowHandle) -> Result<(), RuntimeError> {
        if self.rank() != window.owner() {
            return Err(RuntimeError::NotOwner { rank: self.rank(), owner: window.owner() });
        }
        if lock(&window.shared.state).exposure.is_none() {
            return Err(self.epoch_violation("wait without a matching post"));
        }
        let rank = self.rank();
        let owner = window.owner();
        self.job.blocking_take(
            rank,
            || format!("window_wait(owner={owner})"),
            &window.shared.state,
            &window.shared.cv,
            |state| {
                let done = match &state.exposure {
                    Some(e) => e.group.iter().all(|r| e.completed.contains(r)),
                    None => false,
                };
                if !done {
                    return None;
                }
                // Apply puts in (origin, issue order); deterministic no
                // matter how origin threads interleaved.
                let mut pending = std::mem::take(&mut state.pending);
                pending.sort_by_key(|put| (put.origin, put.seq));
                for put in pending {
                    state.committed[put.offset..put.offset + put.data.len()].copy_from_slice(&put.data);
                }
                state.exposure = None;
                Some(())
            },
        )
    }

    /// Owner-local read of the whole window, allowed only between epochs.
    pub fn window_owner_read(&self, window: &WindowHandle) -> Result<Vec<f64>, RuntimeError> {
        self.owner_local(window)?;
        Ok(lock(&window.shared.state).committed.clone())
    }

    /// Owner-local overwrite, allowed only between epochs; moves no bytes
    /// through the runtime.
    pub fn window_owner_write(&self, window: &WindowHandle, offset: usize, data: &[f64]) -> Result<(), RuntimeError> {
        self.owner_local(window)?;
        window.check_range(offset, data.len())?;
        lock(&window.shared.state).committed[offset..offset + data.len()].copy_from_slice(data);
        Ok(())
    }

    fn owner_local(&self, window: &WindowHandle) -> Result<(), RuntimeError> {
        if self.rank() != window.owner() {
            return Err(RuntimeError::NotOwner { rank: self.rank(), owner: window.owner() });
        }
        if lock(&window.shared.state).exposure.is_some() {
            return Err(self.epoch_violation("owner-local access during an open exposure epoch"));
        }
        Ok(())
    }

    fn epoch_violation(&self, detail: &str) -> RuntimeError {
        RuntimeError::EpochViolation { rank: self.rank(), detail: detail.to_string() }
    }
}
