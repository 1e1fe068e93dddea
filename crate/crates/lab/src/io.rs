//! File formats: graph JSON, spectrum and trajectory CSV, binary frames.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use fractal_wave_core::evolution::{Scheme, Trajectory};
use fractal_wave_core::{ApproxGraph, EigenBasis, EnergyForm, Field};
use serde::Serialize;

use crate::error::{io_err, LabError, Result};

pub const GRAPH_FORMAT_VERSION: u32 = 1;

#[derive(Serialize)]
struct GraphVertex<'a> {
    word: &'a [u8],
    corner: u8,
    x: f64,
    y: f64,
    mu: f64,
    boundary: bool,
}

#[derive(Serialize)]
struct GraphFile<'a> {
    format_version: u32,
    fractal: &'a str,
    level: usize,
    vertices: Vec<GraphVertex<'a>>,
    /// `[x, y, conductance]` with `x < y`.
    edges: Vec<(usize, usize, f64)>,
}

pub fn fractal_name(graph: &ApproxGraph) -> &'static str {
    match graph.kind() {
        fractal_wave_core::FractalKind::Interval => "interval",
        fractal_wave_core::FractalKind::SierpinskiGasket => "sg",
    }
}

pub fn graph_json(form: &EnergyForm) -> Result<String> {
    let g = form.graph();
    let vertices = g
        .vertices()
        .iter()
        .zip(g.coords())
        .enumerate()
        .map(|(i, (v, c))| GraphVertex {
            word: &v.word,
            corner: v.corner,
            x: c[0],
            y: c[1],
            mu: form.mu()[i],
            boundary: g.is_boundary(i),
        })
        .collect();
    let edges = g.edges().iter().zip(form.conductances()).map(|(&(a, b), &c)| (a, b, c)).collect();
    let file = GraphFile { format_version: GRAPH_FORMAT_VERSION, fractal: fractal_name(g), level: g.level(), vertices, edges };
    let mut s = serde_json::to_string_pretty(&file)?;
    s.push('\n');
    Ok(s)
}

pub fn write_graph_json(form: &EnergyForm, path: &Path) -> Result<()> {
    fs::write(path, graph_json(form)?).map_err(io_err(path))
}

/// `n, lambda, cluster, simple`, one row per eigenpair.
pub fn spectrum_csv(basis: &EigenBasis) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "lambda", "cluster", "simple"])?;
    for (c, range) in basis.clusters().iter().enumerate() {
        for k in range.clone() {
            w.write_record([(k + 1).to_string(), format!("{:?}", basis.lambdas()[k]), c.to_string(), (range.len() == 1).to_string()])?;
        }
    }
    into_bytes(w)
}

/// The first `count` eigenfunctions as columns `phi_<n>`, one row per vertex.
pub fn vectors_csv(basis: &EigenBasis, count: usize) -> Result<Vec<u8>> {
    let count = count.min(basis.len());
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["vertex".to_string()];
    header.extend((1..=count).map(|n| format!("phi_{n}")));
    w.write_record(&header)?;
    for x in 0..basis.num_vertices() {
        let mut row = vec![x.to_string()];
        row.extend((0..count).map(|k| format!("{:?}", basis.phi(k)[x])));
        w.write_record(&row)?;
    }
    into_bytes(w)
}

/// [`spectrum_csv`] at `path`, and with `vectors` also [`vectors_csv`] in
/// `<stem>_vectors.csv` next to it.
pub fn write_spectrum_csv(basis: &EigenBasis, path: &Path, vectors: Option<usize>) -> Result<()> {
    fs::write(path, spectrum_csv(basis)?).map_err(io_err(path))?;
    if let Some(count) = vectors {
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("spectrum");
        let vpath = path.with_file_name(format!("{stem}_vectors.csv"));
        fs::write(&vpath, vectors_csv(basis, count)?).map_err(io_err(&vpath))?;
    }
    Ok(())
}

/// Long format `step, time, vertex, value`. `every` thins the frames.
pub fn trajectory_csv(traj: &Trajectory, every: usize) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["step", "time", "vertex", "value"])?;
    for (k, frame) in traj.frames.iter().enumerate().step_by(every.max(1)) {
        let t = traj.t0 + k as f64 * traj.h;
        for (x, v) in frame.iter().enumerate() {
            w.write_record([k.to_string(), format!("{t:?}"), x.to_string(), format!("{v:?}")])?;
        }
    }
    into_bytes(w)
}

pub fn write_trajectory_csv(traj: &Trajectory, path: &Path, every: usize) -> Result<()> {
    fs::write(path, trajectory_csv(traj, every)?).map_err(io_err(path))
}

fn into_bytes(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>> {
    w.into_inner().map_err(|e| LabError::Format(format!("csv buffer: {e}")))
}

/// Reads back a file written by [`write_trajectory_csv`] with `every = 1`.
pub fn read_trajectory_csv(path: &Path, scheme: Scheme, level: usize) -> Result<Trajectory> {
    let mut r = csv::Reader::from_path(path)?;
    let mut frames: Vec<Vec<f64>> = Vec::new();
    let mut times = Vec::new();
    for rec in r.deserialize::<(usize, f64, usize, f64)>() {
        let (step, time, vertex, value) = rec?;
        if step == frames.len() {
            frames.push(Vec::new());
            times.push(time);
        }
        let frame = frames.get_mut(step).filter(|f| f.len() == vertex);
        match frame {
            Some(f) => f.push(value),
            None => return Err(LabError::Format(format!("{}: rows out of order at step {step}", path.display()))),
        }
    }
    let h = if times.len() > 1 { times[1] - times[0] } else { 0.0 };
    let t0 = times.first().copied().unwrap_or(0.0);
    Ok(Trajectory { scheme, level, h, t0, frames: frames.into_iter().map(|v| Field::new(level, v)).collect() })
}

pub const FRAME_MAGIC: &[u8; 4] = b"FWTR";
pub const FRAME_VERSION: u32 = 1;

fn scheme_code(s: Scheme) -> u32 {
    match s {
        Scheme::Leapfrog => 0,
        Scheme::SpectralWave => 1,
        Scheme::SpectralHeat => 2,
    }
}

/// Binary frames, all little endian: magic `FWTR`, `u32` version, `u32`
/// level, `u32` scheme, `u64` steps (frames minus one), `u64` vertex count,
/// `f64` h, `f64` t0, then the frames as consecutive `f64` blocks.
pub fn write_frames(traj: &Trajectory, out: &mut impl Write) -> Result<()> {
    let n = traj.num_vertices();
    let io = |e| LabError::Format(format!("write failed: {e}"));
    out.write_all(FRAME_MAGIC).map_err(io)?;
    let mut header = Vec::with_capacity(44);
    header.extend(FRAME_VERSION.to_le_bytes());
    header.extend((traj.level as u32).to_le_bytes());
    header.extend(scheme_code(traj.scheme).to_le_bytes());
    header.extend((traj.frames.len().saturating_sub(1) as u64).to_le_bytes());
    header.extend((n as u64).to_le_bytes());
    header.extend(traj.h.to_le_bytes());
    header.extend(traj.t0.to_le_bytes());
    out.write_all(&header).map_err(io)?;
    let mut buf = Vec::with_capacity(8 * n);
    for f in &traj.frames {
        if f.len() != n {
            return Err(LabError::Format("frames differ in length".into()));
        }
        buf.clear();
        f.iter().for_each(|v| buf.extend(v.to_le_bytes()));
        out.write_all(&buf).map_err(io)?;
    }
    Ok(())
}

pub fn read_frames(input: &mut impl Read) -> Result<Trajectory> {
    let short = |_| LabError::Format("truncated input".into());
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic).map_err(short)?;
    if &magic != FRAME_MAGIC {
        return Err(LabError::Format("bad magic".into()));
    }
    let mut header = [0u8; 44];
    input.read_exact(&mut header).map_err(short)?;
    let u32_at = |i: usize| u32::from_le_bytes(header[i..i + 4].try_into().unwrap());
    let u64_at = |i: usize| u64::from_le_bytes(header[i..i + 8].try_into().unwrap());
    let f64_at = |i: usize| f64::from_le_bytes(header[i..i + 8].try_into().unwrap());
    if u32_at(0) != FRAME_VERSION {
        return Err(LabError::Format(format!("unsupported version {}", u32_at(0))));
    }
    let level = u32_at(4) as usize;
    let scheme = match u32_at(8) {
        0 => Scheme::Leapfrog,
        1 => Scheme::SpectralWave,
        2 => Scheme::SpectralHeat,
        c => return Err(LabError::Format(format!("unknown scheme code {c}"))),
    };
    let (steps, n) = (u64_at(12) as usize, u64_at(20) as usize);
    let (h, t0) = (f64_at(28), f64_at(36));
    let mut frames = Vec::with_capacity(steps + 1);
    let mut buf = vec![0u8; 8 * n];
    for _ in 0..=steps {
        input.read_exact(&mut buf).map_err(short)?;
        let values = buf.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        frames.push(Field::new(level, values));
    }
    let mut rest = [0u8; 1];
    if input.read(&mut rest).map_err(short)? != 0 {
        return Err(LabError::Format("trailing bytes after the last frame".into()));
    }
    Ok(Trajectory { scheme, level, h, t0, frames })
}

pub fn save_frames(traj: &Trajectory, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    write_frames(traj, &mut w)?;
    w.flush().map_err(io_err(path))
}

pub fn load_frames(path: &Path) -> Result<Trajectory> {
    let file = File::open(path).map_err(io_err(path))?;
    read_frames(&mut BufReader::new(file))
}
