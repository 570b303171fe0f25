use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

/// Position in a counter-based normal stream. Each `(seed, stream_id)` pair
/// selects an independent ChaCha20 stream; `position` counts the normals
/// already drawn from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
    pub position: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id, position: 0 }
    }

    /// Standard normals starting at the current position; advances it.
    pub fn standard_normals(&mut self, count: usize) -> Vec<f64> {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        // a Box-Muller pair consumes two u64, i.e. four 32-bit words
        let pair = self.position / 2;
        rng.set_word_pos(u128::from(pair) * 4);
        let skip = (self.position % 2) as usize;
        let mut out = Vec::with_capacity(count + 1);
        while out.len() < count + skip {
            let (a, b) = box_muller(rng.next_u64(), rng.next_u64());
            out.push(a);
            out.push(b);
        }
        out.drain(..skip);
        out.truncate(count);
        self.position += count as u64;
        out
    }
}

fn unit_open(x: u64) -> f64 {
    // (0, 1]: avoids ln(0)
    ((x >> 11) as f64 + 1.0) * (1.0 / (1u64 << 53) as f64)
}

fn box_muller(a: u64, b: u64) -> (f64, f64) {
    let r = (-2.0 * unit_open(a).ln()).sqrt();
    let theta = std::f64::consts::TAU * unit_open(b);
    (r * theta.cos(), r * theta.sin())
}

/// `steps` i.i.d. N(0, dt) increments drawn from `stream`.
pub fn brownian_increments(stream: &mut RngStream, steps: usize, dt: f64) -> crate::Result<Vec<f64>> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(crate::Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    let s = dt.sqrt();
    Ok(stream.standard_normals(steps).into_iter().map(|x| s * x).collect())
}
