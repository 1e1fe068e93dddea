use fractal_wave_core::evolution::{leapfrog, Scheme, Trajectory, WaveInput};
use fractal_wave_core::spectral::eigendecompose;
use fractal_wave_core::{Boundary, EnergyForm, Field, FractalSpec};
use fractal_wave_lab::io::*;
use proptest::prelude::*;

fn sample_trajectory() -> (EnergyForm, Trajectory) {
    let form = EnergyForm::build(&FractalSpec::sierpinski_gasket(), 3, Boundary::Dirichlet).unwrap();
    let g = form.graph();
    let f = Field::from_fn(g, |i| if g.is_boundary(i) { 0.0 } else { (i as f64 * 0.7).sin() / 3.0 });
    let traj = leapfrog(&form, &WaveInput::position(&form, f).unwrap(), 0.01, 40).unwrap();
    (form, traj)
}

#[test]
fn trajectory_csv_roundtrips_exactly() {
    let (_, traj) = sample_trajectory();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    write_trajectory_csv(&traj, &path, 1).unwrap();
    let back = read_trajectory_csv(&path, Scheme::Leapfrog, traj.level).unwrap();
    assert_eq!(back.frames, traj.frames);
    assert_eq!(back.h, traj.h);
}

#[test]
fn binary_frames_roundtrip_and_reject_damage() {
    let (_, traj) = sample_trajectory();
    let mut bytes = Vec::new();
    write_frames(&traj, &mut bytes).unwrap();
    assert_eq!(bytes.len(), 4 + 44 + 8 * traj.num_vertices() * traj.frames.len());
    assert_eq!(read_frames(&mut bytes.as_slice()).unwrap(), traj);

    let mut truncated = bytes.clone();
    truncated.pop();
    assert!(read_frames(&mut truncated.as_slice()).is_err());
    let mut trailing = bytes.clone();
    trailing.push(0);
    assert!(read_frames(&mut trailing.as_slice()).is_err());
    let mut magic = bytes.clone();
    magic[0] = b'X';
    assert!(read_frames(&mut magic.as_slice()).is_err());
    let mut version = bytes;
    version[4] = 9;
    assert!(read_frames(&mut version.as_slice()).is_err());

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.fwtr");
    save_frames(&traj, &path).unwrap();
    assert_eq!(load_frames(&path).unwrap(), traj);
}

#[test]
fn graph_json_describes_the_graph() {
    let form = EnergyForm::build(&FractalSpec::sierpinski_gasket(), 2, Boundary::Dirichlet).unwrap();
    let json: serde_json::Value = serde_json::from_str(&graph_json(&form).unwrap()).unwrap();
    assert_eq!(json["fractal"], "sg");
    assert_eq!(json["vertices"].as_array().unwrap().len(), 15);
    assert_eq!(json["edges"].as_array().unwrap().len(), 27);
    let boundary = json["vertices"].as_array().unwrap().iter().filter(|v| v["boundary"] == true).count();
    assert_eq!(boundary, 3);
    let mass: f64 = json["vertices"].as_array().unwrap().iter().map(|v| v["mu"].as_f64().unwrap()).sum();
    assert!((mass - 1.0).abs() < 1e-12);
}

#[test]
fn spectrum_csv_lists_every_eigenpair() {
    let form = EnergyForm::build(&FractalSpec::interval(), 4, Boundary::Neumann).unwrap();
    let basis = eigendecompose(&form).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spectrum.csv");
    write_spectrum_csv(&basis, &path, Some(3)).unwrap();
    let mut r = csv::Reader::from_path(&path).unwrap();
    let rows: Vec<(usize, f64, usize, bool)> = r.deserialize().map(|x| x.unwrap()).collect();
    assert_eq!(rows.len(), basis.len());
    for (k, row) in rows.iter().enumerate() {
        assert_eq!((row.0, row.1), (k + 1, basis.lambdas()[k]));
        assert!(row.3, "interval eigenvalues are simple");
    }
    let v = std::fs::read_to_string(dir.path().join("spectrum_vectors.csv")).unwrap();
    assert!(v.starts_with("vertex,phi_1,phi_2,phi_3\n"));
    assert_eq!(v.lines().count(), 1 + basis.num_vertices());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn any_frames_roundtrip(level in 0usize..4, h in 1e-6f64..1.0, t0 in -1.0f64..1.0,
                            data in prop::collection::vec(prop::num::f64::ANY, 0..40), width in 1usize..6) {
        let n = width;
        let frames: Vec<Field> = data.chunks_exact(n).map(|c| Field::new(level, c.to_vec())).collect();
        prop_assume!(!frames.is_empty());
        let traj = Trajectory { scheme: Scheme::SpectralWave, level, h, t0, frames };
        let mut bytes = Vec::new();
        write_frames(&traj, &mut bytes).unwrap();
        let back = read_frames(&mut bytes.as_slice()).unwrap();
        prop_assert_eq!(back.frames.len(), traj.frames.len());
        for (a, b) in back.frames.iter().zip(&traj.frames) {
            for (x, y) in a.iter().zip(b.iter()) {
                prop_assert_eq!(x.to_bits(), y.to_bits());
            }
        }
        prop_assert_eq!((back.level, back.h, back.t0, back.scheme), (level, h, t0, Scheme::SpectralWave));
    }
}
