//! Tour of the message-passing runtime on its own: point-to-point transfer,
//! non-blocking overlap, collectives, one-sided windows, and the deadlock
//! watchdog.
//!
//! Run with: cargo run --example runtime_primitives

use jacobi_mp::runtime::{run_spmd, run_spmd_with, ProcessGroup, RuntimeError};
use jacobi_mp::RuntimeConfig;
use std::time::Duration;

fn main() {
    point_to_point();
    nonblocking_overlap();
    collectives();
    windows();
    watchdog();
}

fn point_to_point() {
    println!("-- point to point --");
    let run = run_spmd(2, |ctx| {
        if ctx.rank() == 0 {
            ctx.send(1, 7, &[1.0, 2.0, 3.0])?;
            Ok(Vec::new())
        } else {
            ctx.recv(0, 7)
        }
    })
    .unwrap();
    println!("rank 1 received {:?}", run.results[1]);
    println!("rank 0 sent {} bytes", run.stats[0].point_to_point_bytes);
}

fn nonblocking_overlap() {
    println!("-- non-blocking overlap --");
    let run = run_spmd(2, |ctx| {
        if ctx.rank() == 0 {
            let mut transfer = ctx.irecv(1, 1)?;
            // Work while the payload is (possibly) still in flight.
            let mut local = 0.0;
            let mut polls = 0;
            while !ctx.test(&mut transfer)? {
                local += 1.0;
                polls += 1;
            }
            let payload = ctx.wait(&mut transfer)?.expect("payload");
            println!("overlapped {polls} polls of local work (sum {local})");
            Ok(payload)
        } else {
            ctx.send(0, 1, &[42.0])?;
            Ok(Vec::new())
        }
    })
    .unwrap();
    println!("payload after overlap: {:?}", run.results[0]);
}

fn collectives() {
    println!("-- collectives --");
    let run = run_spmd(4, |ctx| {
        let rank = ctx.rank() as f64;
        let gathered = ctx.gather(0, &[rank])?;
        let full = ctx.broadcast(0, gathered.as_deref().unwrap_or(&[]))?;
        let sum = ctx.allreduce_sum(&[rank, rank * 10.0])?;
        Ok((full, sum))
    })
    .unwrap();
    println!("every rank sees the gathered vector {:?}", run.results[3].0);
    println!("allreduce_sum of [r, 10r] over 4 ranks: {:?}", run.results[0].1);
}

fn windows() {
    println!("-- one-sided windows --");
    let run = run_spmd(3, |ctx| {
        let owner = 2;
        let mut w = ctx.window_create(owner, 4)?;
        let origins = ProcessGroup::new(vec![0, 1])?;
        let target = ProcessGroup::new(vec![owner])?;
        if ctx.rank() == owner {
            ctx.window_post(&w, &origins)?;
            ctx.window_wait(&w)?;
            ctx.window_owner_read(&w)
        } else {
            ctx.window_start(&mut w, &target)?;
            let before = ctx.window_get(&w, 0, 4)?;
            ctx.window_put(&mut w, ctx.rank() * 2, &[ctx.rank() as f64 + 1.0; 2])?;
            ctx.window_complete(&mut w)?;
            Ok(before)
        }
    })
    .unwrap();
    println!("origins saw the epoch-open snapshot {:?}", run.results[0]);
    println!("owner sees the applied puts       {:?}", run.results[2]);
}

fn watchdog() {
    println!("-- deadlock watchdog --");
    let config = RuntimeConfig {
        deadlock_timeout: Duration::from_millis(200),
        poll_interval: Duration::from_millis(10),
    };
    // Both ranks receive first; nobody ever sends.
    let err = run_spmd_with(config, 2, |ctx| {
        ctx.recv(1 - ctx.rank(), 0)?;
        Ok(())
    })
    .unwrap_err();
    match err {
        RuntimeError::Deadlock { dump } => println!("watchdog fired:\n{dump}"),
        other => println!("unexpected result: {other}"),
    }
}
