//! Versioned binary policy snapshots.
//!
//! Layout (little endian): magic `RRPC`, u32 version, 64 ASCII hex bytes of
//! config hash, actor and critic layer sizes (u32 count then u32 widths),
//! u64 parameter count, f64 parameters.

use super::nn::Mlp;
use super::policy::Agent;

const MAGIC: &[u8; 4] = b"RRPC";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CheckpointError {
    #[error("not a policy checkpoint")]
    Magic,
    #[error("unsupported checkpoint version {0}")]
    Version(u32),
    #[error("truncated or malformed checkpoint")]
    Malformed,
    #[error("checkpoint was written for config {found}, expected {expected}")]
    ConfigMismatch { found: String, expected: String },
}

pub fn encode(agent: &Agent, config_hash: &str) -> Vec<u8> {
    assert_eq!(config_hash.len(), 64, "config hash must be 64 hex characters");
    let mut out = Vec::with_capacity(96 + agent.params.len() * 8);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(config_hash.as_bytes());
    for net in [&agent.actor, &agent.critic] {
        out.extend_from_slice(&(net.sizes.len() as u32).to_le_bytes());
        for &s in &net.sizes {
            out.extend_from_slice(&(s as u32).to_le_bytes());
        }
    }
    out.extend_from_slice(&(agent.params.len() as u64).to_le_bytes());
    for p in &agent.params {
        out.extend_from_slice(&p.to_le_bytes());
    }
    out
}

struct Reader<'a>(&'a [u8]);

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8], CheckpointError> {
        if self.0.len() < n {
            return Err(CheckpointError::Malformed);
        }
        let (a, b) = self.0.split_at(n);
        self.0 = b;
        Ok(a)
    }

    fn u32(&mut self) -> Result<u32, CheckpointError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn mlp(&mut self) -> Result<Mlp, CheckpointError> {
        let n = self.u32()? as usize;
        if !(2..=64).contains(&n) {
            return Err(CheckpointError::Malformed);
        }
        let sizes = (0..n).map(|_| self.u32().map(|s| s as usize)).collect::<Result<Vec<_>, _>>()?;
        if sizes.contains(&0) {
            return Err(CheckpointError::Malformed);
        }
        Ok(Mlp::new(sizes))
    }
}

/// Returns the agent and the config hash it was written with.
pub fn decode(bytes: &[u8]) -> Result<(Agent, String), CheckpointError> {
    let mut r = Reader(bytes);
    if r.take(4).map_err(|_| CheckpointError::Magic)? != MAGIC {
        return Err(CheckpointError::Magic);
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(CheckpointError::Version(version));
    }
    let hash = String::from_utf8(r.take(64)?.to_vec()).map_err(|_| CheckpointError::Malformed)?;
    let (actor, critic) = (r.mlp()?, r.mlp()?);
    let n = u64::from_le_bytes(r.take(8)?.try_into().unwrap()) as usize;
    if n != actor.param_count() + critic.param_count() || r.0.len() != n * 8 {
        return Err(CheckpointError::Malformed);
    }
    let params = r.0.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    Ok((Agent { actor, critic, params }, hash))
}

/// Decodes and checks the embedded config hash.
pub fn decode_for(bytes: &[u8], expected_hash: &str) -> Result<Agent, CheckpointError> {
    let (agent, found) = decode(bytes)?;
    if found != expected_hash {
        return Err(CheckpointError::ConfigMismatch { found, expected: expected_hash.to_string() });
    }
    Ok(agent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip_and_checks() {
        let agent = Agent::new(21, 3, &[8, 8], &mut ChaCha8Rng::seed_from_u64(3));
        let hash = "ab".repeat(32);
        let bytes = encode(&agent, &hash);
        assert_eq!(decode_for(&bytes, &hash).unwrap(), agent);
        assert!(matches!(decode_for(&bytes, &"cd".repeat(32)), Err(CheckpointError::ConfigMismatch { .. })));
        assert_eq!(decode(&bytes[..bytes.len() - 1]), Err(CheckpointError::Malformed));
        assert_eq!(decode(b"nope"), Err(CheckpointError::Magic));
        let mut v2 = bytes.clone();
        v2[4] = 2;
        assert_eq!(decode(&v2), Err(CheckpointError::Version(2)));
    }
}
