use fractal_wave_core::{Boundary, EnergyForm, FractalSpec};
use fractal_wave_lab::presets::Preset;
use proptest::prelude::*;

fn forms() -> Vec<EnergyForm> {
    let mut v = Vec::new();
    for b in [Boundary::Neumann, Boundary::Dirichlet] {
        v.push(EnergyForm::build(&FractalSpec::sierpinski_gasket(), 3, b).unwrap());
        v.push(EnergyForm::build(&FractalSpec::interval(), 5, b).unwrap());
    }
    v
}

#[test]
fn every_preset_vanishes_on_the_boundary_set() {
    for form in forms() {
        for p in ["eigenmode:3", "bump:1", "bump:2", "smooth:1", "constant:2", "sine", "random"] {
            let p: Preset = p.parse().unwrap();
            let u = p.field(&form, 11).unwrap();
            assert_eq!(u.len(), form.num_vertices());
            for &b in form.graph().boundary() {
                assert_eq!(u[b], 0.0, "{p} on {:?}", form.graph().kind());
            }
        }
    }
}

#[test]
fn random_preset_depends_only_on_the_seed() {
    let form = &forms()[0];
    let p = Preset::Random;
    assert_eq!(p.field(form, 5).unwrap(), p.field(form, 5).unwrap());
    assert_ne!(p.field(form, 5).unwrap(), p.field(form, 6).unwrap());
}

#[test]
fn smooth_preset_is_normalized_and_nonnegative() {
    for form in forms() {
        let u = Preset::Smooth(1).field(&form, 0).unwrap();
        let max = u.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        assert!((max - 1.0).abs() < 1e-12);
        assert!(u.iter().all(|&v| v >= -1e-12));
    }
}

#[test]
fn bad_presets_are_rejected() {
    for bad in ["", "eigenmode", "eigenmode:0", "bump:x", "wiggle", "constant:abc"] {
        assert!(bad.parse::<Preset>().is_err(), "{bad}");
    }
    let form = &forms()[0];
    assert!(Preset::Eigenmode(10_000).field(form, 0).is_err());
}

proptest! {
    #[test]
    fn display_roundtrips(n in 1usize..1000, k in 0usize..6, c in -1e6f64..1e6) {
        for p in [Preset::Eigenmode(n), Preset::Bump(k), Preset::Smooth(k), Preset::Constant(c), Preset::Sine, Preset::Random] {
            let back: Preset = p.to_string().parse().unwrap();
            prop_assert_eq!(back, p);
        }
    }
}
