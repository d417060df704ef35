use super::context::RankContext;
use super::job::Job;
use super::window::WindowLog;
use super::{lock, CommStats, RuntimeConfig, RuntimeError};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Mutex;

/// Everything a completed job produced: per-rank body results and traffic
/// counters (both indexed by rank), plus the access log of every window the
/// job created.
#[derive(Debug)]
pub struct SpmdRun<T> {
    pub results: Vec<T>,
    pub stats: Vec<CommStats>,
    pub window_logs: Vec<WindowLog>,
}

/// Runs `body` on `world` concurrent rank workers and waits for all of them.
///
/// The first failure (an error returned by a body, a panic, or a watchdog
/// deadlock verdict) cancels the remaining workers and is propagated.
pub fn run_spmd<T, F>(world: usize, body: F) -> Result<SpmdRun<T>, RuntimeError>
where
    T: Send,
    F: Fn(&mut RankContext<'_>) -> Result<T, RuntimeError> + Sync,
{
    run_spmd_with(RuntimeConfig::default(), world, body)
}

/// [`run_spmd`] with explicit runtime tuning (tests shorten the watchdog).
pub fn run_spmd_with<T, F>(config: RuntimeConfig, world: usize, body: F) -> Result<SpmdRun<T>, RuntimeError>
where
    T: Send,
    F: Fn(&mut RankContext<'_>) -> Result<T, RuntimeError> + Sync,
{
    if world == 0 {
        return Err(RuntimeError::EmptyWorld);
    }
    let job = Job::new(world, config);
    let slots: Vec<Mutex<Option<(T, CommStats)>>> = (0..world).map(|_| Mutex::new(None)).collect();

    std::thread::scope(|scope| {
        for rank in 0..world {
            let job = &job;
            let body = &body;
            let slot = &slots[rank];
            std::thread::Builder::new()
                .name(format!("rank-{rank}"))
                .spawn_scoped(scope, move || {
                    let mut ctx = RankContext::new(rank, world, job);
                    let outcome = catch_unwind(AssertUnwindSafe(|| body(&mut ctx)));
                    let stats = *ctx.stats();
                    match outcome {
                        Ok(Ok(value)) => *lock(slot) = Some((value, stats)),
                        Ok(Err(err)) => job.state.record_failure(rank, err),
                        Err(_) => job.state.record_failure(rank, RuntimeError::WorkerPanicked(rank)),
                    }
                    job.state.finish(rank);
                })
                .expect("failed to spawn rank worker");
        }
    });

    if let Some((_, err)) = job.state.take_failure() {
        return Err(err);
    }

    let mut results = Vec::with_capacity(world);
    let mut stats = Vec::with_capacity(world);
    for slot in slots {
        let (value, rank_stats) = lock(&slot).take().expect("worker finished without result or failure");
        results.push(value);
        stats.push(rank_stats);
    }
    let window_logs = lock(&job.windows).iter().map(|w| w.snapshot_log()).collect();
    Ok(SpmdRun { results, stats, window_logs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runtime::{ProcessGroup, RuntimeError};
    use std::time::Duration;

    fn short_watchdog() -> RuntimeConfig {
        RuntimeConfig {
            deadlock_timeout: Duration::from_millis(150),
            poll_interval: Duration::from_millis(10),
        }
    }

    #[test]
    fn single_rank_returns_its_result() {
        let run = run_spmd(1, |ctx| Ok(ctx.rank())).unwrap();
        assert_eq!(run.results, vec![0]);
    }

    #[test]
    fn results_are_indexed_by_rank() {
        let run = run_spmd(4, |ctx| Ok(ctx.rank() * ctx.rank())).unwrap();
        assert_eq!(run.results, vec![0, 1, 4, 9]);
    }

    #[test]
    fn zero_world_is_rejected() {
        assert_eq!(run_spmd(0, |_| Ok(())).unwrap_err(), RuntimeError::EmptyWorld);
    }

    #[test]
    fn circular_receive_trips_the_watchdog() {
        let err = run_spmd_with(short_watchdog(), 2, |ctx| {
            let peer = 1 - ctx.rank();
            ctx.recv(peer, 9)?;
            Ok(())
        })
        .unwrap_err();
        match err {
            RuntimeError::Deadlock { dump } => {
                assert!(dump.contains("rank 0"), "dump missing rank 0: {dump}");
                assert!(dump.contains("rank 1"), "dump missing rank 1: {dump}");
                assert!(dump.contains("recv"), "dump missing blocked op: {dump}");
            }
            other => panic!("expected deadlock, got {other:?}"),
        }
    }

    #[test]
    fn worker_panic_is_reported_and_cancels_peers() {
        let err = run_spmd_with(short_watchdog(), 2, |ctx| {
            if ctx.rank() == 1 {
                panic!("boom");
            }
            // Rank 0 would wait forever; cancellation must unwind it.
            ctx.recv(1, 0)?;
            Ok(())
        })
        .unwrap_err();
        assert_eq!(err, RuntimeError::WorkerPanicked(1));
    }

    #[test]
    fn body_error_wins_over_cancellations() {
        let err = run_spmd_with(short_watchdog(), 3, |ctx| {
            if ctx.rank() == 2 {
                return Err(RuntimeError::SelfMessage(2));
            }
            ctx.recv(2, 0)?;
            Ok(())
        })
        .unwrap_err();
        assert_eq!(err, RuntimeError::SelfMessage(2));
    }

    #[test]
    fn send_recv_roundtrip_and_fifo() {
        let run = run_spmd(2, |ctx| {
            if ctx.rank() == 0 {
                ctx.send(1, 7, &[1.0, 2.0])?;
                ctx.send(1, 7, &[3.0])?;
                Ok(Vec::new())
            } else {
                let first = ctx.recv(0, 7)?;
                let second = ctx.recv(0, 7)?;
                Ok(vec![first, second])
            }
        })
        .unwrap();
        assert_eq!(run.results[1], vec![vec![1.0, 2.0], vec![3.0]]);
        assert_eq!(run.stats[0].point_to_point_messages, 2);
        assert_eq!(run.stats[0].point_to_point_bytes, 3 * 8);
        assert_eq!(run.stats[1].point_to_point_bytes, 0);
    }

    #[test]
    fn invalid_and_self_peers_are_rejected() {
        let run = run_spmd(2, |ctx| {
            if ctx.rank() == 0 {
                let out_of_range = ctx.send(2, 0, &[1.0]).unwrap_err();
                assert_eq!(out_of_range, RuntimeError::InvalidRank { rank: 2, world: 2 });
                let self_send = ctx.send(0, 0, &[1.0]).unwrap_err();
                assert_eq!(self_send, RuntimeError::SelfMessage(0));
            }
            Ok(())
        });
        run.unwrap();
    }

    #[test]
    fn isend_then_wait_matches_blocking_send() {
        let run = run_spmd(2, |ctx| {
            if ctx.rank() == 0 {
                let mut t = ctx.isend(1, 1, &[4.0, 5.0])?;
                assert!(ctx.test(&mut t)?);
                assert_eq!(ctx.wait(&mut t)?, None);
                Ok(Vec::new())
            } else {
                ctx.recv(0, 1)
            }
        })
        .unwrap();
        assert_eq!(run.results[1], vec![4.0, 5.0]);
    }

    #[test]
    fn irecv_completes_only_after_the_send() {
        let run = run_spmd(2, |ctx| {
            if ctx.rank() == 0 {
                let mut t = ctx.irecv(1, 1)?;
                // The peer will not send until it gets the go signal, so the
                // first poll must come back incomplete.
                assert!(!ctx.test(&mut t)?);
                ctx.send(1, 2, &[0.0])?;
                let payload = ctx.wait(&mut t)?.expect("receive payload");
                // A second wait on a consumed receive is an error.
                assert_eq!(ctx.wait(&mut t).unwrap_err(), RuntimeError::WaitAfterConsumed);
                assert!(ctx.test(&mut t)?, "completion is sticky");
                Ok(payload)
            } else {
                ctx.recv(0, 2)?;
                ctx.send(0, 1, &[6.0, 7.0])?;
                Ok(Vec::new())
            }
        })
        .unwrap();
        assert_eq!(run.results[0], vec![6.0, 7.0]);
    }

    #[test]
    fn gather_concatenates_in_rank_order() {
        let run = run_spmd(2, |ctx| {
            let local = if ctx.rank() == 0 { [1.0, 2.0] } else { [3.0, 4.0] };
            ctx.gather(0, &local)
        })
        .unwrap();
        assert_eq!(run.results[0].as_deref(), Some(&[1.0, 2.0, 3.0, 4.0][..]));
        assert_eq!(run.results[1], None);
        // Star topology: only the non-root block moves.
        assert_eq!(run.stats[0].collective_bytes, 0);
        assert_eq!(run.stats[1].collective_bytes, 2 * 8);
    }

    #[test]
    fn broadcast_reaches_every_rank() {
        let run = run_spmd(4, |ctx| {
            let value = if ctx.rank() == 0 { vec![3.14] } else { Vec::new() };
            ctx.broadcast(0, &value)
        })
        .unwrap();
        for r in 0..4 {
            assert_eq!(run.results[r], vec![3.14]);
        }
        assert_eq!(run.stats[0].collective_bytes, 3 * 8);
    }

    #[test]
    fn allreduce_sums_elementwise_everywhere() {
        let run = run_spmd(3, |ctx| {
            let r = ctx.rank() as f64;
            ctx.allreduce_sum(&[r, r])
        })
        .unwrap();
        for r in 0..3 {
            assert_eq!(run.results[r], vec![3.0, 3.0]);
        }
        // gather legs: 2 * 2 * 8 from non-roots; broadcast legs: 2 * 2 * 8 at root.
        let total: u64 = run.stats.iter().map(|s| s.collective_bytes).sum();
        assert_eq!(total, 2 * 2 * 8 + 2 * 2 * 8);
    }

    #[test]
    fn gather_length_mismatch_is_detected() {
        let err = run_spmd_with(short_watchdog(), 2, |ctx| {
            let local = if ctx.rank() == 0 { vec![1.0] } else { vec![2.0, 3.0] };
            ctx.gather(0, &local)?;
            Ok(())
        })
        .unwrap_err();
        assert!(matches!(err, RuntimeError::CollectiveMismatch { rank: 0, .. }), "got {err:?}");
    }

    #[test]
    fn put_is_visible_at_the_owner_after_wait() {
        let run = run_spmd(2, |ctx| {
            let mut w = ctx.window_create(1, 4)?;
            let origins = ProcessGroup::new(vec![0])?;
            let target = ProcessGroup::new(vec![1])?;
            if ctx.rank() == 0 {
                ctx.window_start(&mut w, &target)?;
                ctx.window_put(&mut w, 2, &[9.0, 9.0])?;
                ctx.window_complete(&mut w)?;
                Ok(Vec::new())
            } else {
                ctx.window_post(&w, &origins)?;
                ctx.window_wait(&w)?;
                ctx.window_owner_read(&w)
            }
        })
        .unwrap();
        assert_eq!(run.results[1], vec![0.0, 0.0, 9.0, 9.0]);
        assert_eq!(run.stats[0].window_put_bytes, 2 * 8);
        assert_eq!(run.window_logs.len(), 1);
        assert_eq!(run.window_logs[0].accesses.len(), 1);
    }

    #[test]
    fn get_of_untouched_window_is_zeros() {
        let run = run_spmd(2, |ctx| {
            let mut w = ctx.window_create(0, 3)?;
            if ctx.rank() == 0 {
                ctx.window_post(&w, &ProcessGroup::new(vec![1])?)?;
                ctx.window_wait(&w)?;
                Ok(Vec::new())
            } else {
                ctx.window_start(&mut w, &ProcessGroup::new(vec![0])?)?;
                let data = ctx.window_get(&w, 0, 3)?;
                ctx.window_complete(&mut w)?;
                Ok(data)
            }
        })
        .unwrap();
        assert_eq!(run.results[1], vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn out_of_range_put_is_rejected() {
        run_spmd(2, |ctx| {
            let mut w = ctx.window_create(1, 4)?;
            if ctx.rank() == 0 {
                ctx.window_start(&mut w, &ProcessGroup::new(vec![1])?)?;
                let err = ctx.window_put(&mut w, 3, &[1.0, 2.0]).unwrap_err();
                assert_eq!(err, RuntimeError::RangeViolation { offset: 3, len: 2, window: 4 });
                ctx.window_complete(&mut w)?;
            } else {
                ctx.window_post(&w, &ProcessGroup::new(vec![0])?)?;
                ctx.window_wait(&w)?;
            }
            Ok(())
        })
        .unwrap();
    }

    #[test]
    fn access_outside_an_epoch_is_a_violation() {
        run_spmd(2, |ctx| {
            let mut w = ctx.window_create(1, 4)?;
            if ctx.rank() == 0 {
                let put = ctx.window_put(&mut w, 0, &[1.0]).unwrap_err();
                assert!(matches!(put, RuntimeError::EpochViolation { rank: 0, .. }));
                let get = ctx.window_get(&w, 0, 1).unwrap_err();
                assert!(matches!(get, RuntimeError::EpochViolation { rank: 0, .. }));
            } else {
                let read = ctx.window_owner_read(&w)?;
                assert_eq!(read, vec![0.0; 4]);
                let wait = ctx.window_wait(&w).unwrap_err();
                assert!(matches!(wait, RuntimeError::EpochViolation { rank: 1, .. }), "got {wait:?}");
            }
            Ok(())
        })
        .unwrap();
    }

    #[test]
    fn non_owner_local_access_is_rejected() {
        run_spmd(2, |ctx| {
            let w = ctx.window_create(1, 2)?;
            if ctx.rank() == 0 {
                assert_eq!(
                    ctx.window_owner_read(&w).unwrap_err(),
                    RuntimeError::NotOwner { rank: 0, owner: 1 }
                );
                assert_eq!(
                    ctx.window_wait(&w).unwrap_err(),
                    RuntimeError::NotOwner { rank: 0, owner: 1 }
                );
            }
            Ok(())
        })
        .unwrap();
    }

    #[test]
    fn gets_snapshot_the_epoch_open_state() {
        // Rank 0 puts inside the epoch; rank 0's own get in the same epoch
        // must still see the pre-epoch contents.
        let run = run_spmd(2, |ctx| {
            let mut w = ctx.window_create(1, 2)?;
            let origins = ProcessGroup::new(vec![0])?;
            let target = ProcessGroup::new(vec![1])?;
            if ctx.rank() == 0 {
                ctx.window_start(&mut w, &target)?;
                ctx.window_put(&mut w, 0, &[5.0, 6.0])?;
                let during = ctx.window_get(&w, 0, 2)?;
                ctx.window_complete(&mut w)?;
                // Second epoch: the put is now visible.
                ctx.window_start(&mut w, &target)?;
                let after = ctx.window_get(&w, 0, 2)?;
                ctx.window_complete(&mut w)?;
                Ok((during, after))
            } else {
                ctx.window_post(&w, &origins)?;
                ctx.window_wait(&w)?;
                ctx.window_post(&w, &origins)?;
                ctx.window_wait(&w)?;
                Ok((Vec::new(), Vec::new()))
            }
        })
        .unwrap();
        assert_eq!(run.results[0].0, vec![0.0, 0.0]);
        assert_eq!(run.results[0].1, vec![5.0, 6.0]);
    }
}
