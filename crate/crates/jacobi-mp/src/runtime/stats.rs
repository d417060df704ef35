/// Per-rank counters of traffic through the runtime, in messages and bytes.
///
/// Byte counts are exact: every payload is a run of `f64`s, so a transfer of
/// `k` elements counts `k * 8` bytes, metered on the side that moves the data
/// (the sender for point-to-point and collective legs, the origin for window
/// puts and gets). Counters only ever increase.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CommStats {
    pub point_to_point_messages: u64,
    pub point_to_point_bytes: u64,
    pub collective_bytes: u64,
    pub window_put_bytes: u64,
    pub window_get_bytes: u64,
}

pub(crate) const ELEMENT_BYTES: u64 = std::mem::size_of::<f64>() as u64;

impl CommStats {
    pub fn total_bytes(&self) -> u64 {
        self.point_to_point_bytes + self.collective_bytes + self.window_put_bytes + self.window_get_bytes
    }

    /// Elementwise sum over a set of per-rank counters.
    pub fn merged(stats: &[CommStats]) -> CommStats {
        let mut out = CommStats::default();
        for s in stats {
            out.point_to_point_messages += s.point_to_point_messages;
            out.point_to_point_bytes += s.point_to_point_bytes;
            out.collective_bytes += s.collective_bytes;
            out.window_put_bytes += s.window_put_bytes;
            out.window_get_bytes += s.window_get_bytes;
        }
        out
    }
}
