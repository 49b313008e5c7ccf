//! Trajectory CSV export and binary checkpoints.

use std::io::Write;

use super::ledger::LocalTimeLedger;
use super::noise::NoiseSource;
use super::params::SimParams;
use super::simulate::{ProcessKind, Simulator, State, Trajectory};
use crate::error::{Error, Result};
use crate::geometry::{BallSystem, Configuration, ReducedConfiguration};

const MAGIC: &[u8; 4] = b"HBCK";
const VERSION: u32 = 1;

fn coordinate_names(traj: &Trajectory) -> Vec<String> {
    match traj.states.first() {
        Some(State::Full(c)) => (0..c.count())
            .flat_map(|i| (0..c.dimension()).map(move |k| format!("x{i}_{k}")))
            .collect(),
        Some(State::Reduced(c)) => (0..c.count())
            .flat_map(|i| (0..c.dimension()).map(move |k| format!("y{i}_{k}")))
            .collect(),
        Some(State::MedianPair { u1, .. }) => {
            let d = u1.len();
            (0..d).map(|k| format!("u1_{k}")).chain((0..d).map(|k| format!("u23_{k}"))).collect()
        }
        Some(State::Scalar(_)) => vec![match traj.kind {
            ProcessKind::Radial => "y".into(),
            ProcessKind::Affine => "z".into(),
            _ => "u".into(),
        }],
        None => Vec::new(),
    }
}

/// Writes `t, coordinates..., V, L, cluster`, preceded by `# comment` when given.
pub fn write_trajectory_csv<W: Write>(mut w: W, traj: &Trajectory, comment: Option<&str>) -> std::io::Result<()> {
    if let Some(c) = comment {
        writeln!(w, "# {c}")?;
    }
    let mut header = vec!["t".to_string()];
    header.extend(coordinate_names(traj));
    header.extend(["V".into(), "L".into(), "cluster".into()]);
    writeln!(w, "{}", header.join(","))?;
    for idx in 0..traj.len() {
        let mut row = vec![traj.times[idx].to_string()];
        row.extend(traj.states[idx].coordinates().iter().map(f64::to_string));
        row.push(traj.energies[idx].map(|v| v.to_string()).unwrap_or_default());
        row.push(traj.local_times[idx].iter().sum::<f64>().to_string());
        row.push(match traj.cluster[idx] {
            Some(true) => "1".into(),
            Some(false) => "0".into(),
            None => String::new(),
        });
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::Checkpoint("truncated".into()))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn u128(&mut self) -> Result<u128> {
        Ok(u128::from_le_bytes(self.take(16)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64s(&mut self) -> Result<Vec<f64>> {
        let len = self.u32()? as usize;
        (0..len).map(|_| self.f64()).collect()
    }
}

fn put_f64s(out: &mut Vec<u8>, xs: &[f64]) {
    out.extend_from_slice(&(xs.len() as u32).to_le_bytes());
    for x in xs {
        out.extend_from_slice(&x.to_le_bytes());
    }
}

impl Simulator {
    /// Versioned little-endian snapshot of the exact state, ledger and stream position.
    pub fn checkpoint(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.push(self.kind().tag());
        out.extend_from_slice(&self.kind().drift().to_le_bytes());
        let (n, d) = match self.state() {
            State::Full(c) => (c.count(), c.dimension()),
            State::Reduced(c) => (c.count(), c.dimension()),
            State::MedianPair { u1, .. } => (0, u1.len()),
            State::Scalar(_) => (0, 0),
        };
        out.extend_from_slice(&(n as u32).to_le_bytes());
        out.extend_from_slice(&(d as u32).to_le_bytes());
        out.extend_from_slice(&self.params().r.to_le_bytes());
        out.extend_from_slice(&self.steps().to_le_bytes());
        out.extend_from_slice(&self.noise().seed().to_le_bytes());
        out.extend_from_slice(&self.noise().index().to_le_bytes());
        out.extend_from_slice(&self.noise().position().to_le_bytes());
        put_f64s(&mut out, &self.state().coordinates());
        out.extend_from_slice(&(self.ledger().count() as u32).to_le_bytes());
        put_f64s(&mut out, self.ledger().values());
        out
    }

    /// Rebuilds a simulator from [`Simulator::checkpoint`] output. `params`
    /// must agree with the snapshot's seed, `r`, `n` and `d`.
    pub fn restore(bytes: &[u8], params: SimParams) -> Result<Simulator> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(Error::Checkpoint("bad magic".into()));
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(Error::Checkpoint(format!("unsupported version {version}")));
        }
        let tag = r.u8()?;
        let c = r.f64()?;
        let kind = ProcessKind::from_tag(tag, c).ok_or_else(|| Error::Checkpoint(format!("unknown kind {tag}")))?;
        let n = r.u32()? as usize;
        let d = r.u32()? as usize;
        let radius = r.f64()?;
        let steps = r.u64()?;
        let seed = r.u64()?;
        let index = r.u64()?;
        let position = r.u128()?;
        let coords = r.f64s()?;
        let ledger_n = r.u32()? as usize;
        let ell = r.f64s()?;
        if r.pos != bytes.len() {
            return Err(Error::Checkpoint("trailing bytes".into()));
        }
        if seed != params.seed || radius != params.r {
            return Err(Error::Checkpoint("seed or r differ from the supplied parameters".into()));
        }
        params.validate()?;
        let state = match kind {
            ProcessKind::Full => State::Full(Configuration::from_flat(n, d, coords, radius)?),
            ProcessKind::Reduced => State::Reduced(ReducedConfiguration::from_flat(n, d, coords, radius)?),
            ProcessKind::MedianPair => {
                if coords.len() != 2 * d {
                    return Err(Error::Checkpoint("median state has wrong length".into()));
                }
                let (u1, u23) = coords.split_at(d);
                State::MedianPair {
                    u1: u1.to_vec(),
                    u23: u23.to_vec(),
                }
            }
            _ => match coords.as_slice() {
                [v] => State::Scalar(*v),
                _ => return Err(Error::Checkpoint("scalar state has wrong length".into())),
            },
        };
        if matches!(kind, ProcessKind::Full | ProcessKind::Reduced) && (n != params.n || d != params.d) {
            return Err(Error::Checkpoint("n or d differ from the supplied parameters".into()));
        }
        let ledger = LocalTimeLedger::from_values(ledger_n, ell).ok_or_else(|| Error::Checkpoint("ledger size mismatch".into()))?;
        let mut noise = NoiseSource::new(seed, index);
        noise.seek(position);
        Ok(Simulator::from_parts(kind, params, state, ledger, noise, steps))
    }
}
