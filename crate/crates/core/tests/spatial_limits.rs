use zenolab_core::linops::{norm, StateVector};
use zenolab_core::spatial::{dirichlet_mode, fidelity, Grid1D, SpatialSystem, Window, DEFAULT_QUADRATURE_NODES};

fn scenario(n: usize) -> (Grid1D, Window, SpatialSystem, StateVector) {
    let grid = Grid1D::free(n, 2.0, 1.0).unwrap();
    let w = Window::from_interval(&grid, 0.5, 1.5).unwrap();
    let sys = SpatialSystem::new(&grid).unwrap();
    let psi0 = dirichlet_mode(&grid, &w, 0).unwrap();
    (grid, w, sys, psi0)
}

#[test]
fn fidelity_and_survival_improve_with_n() {
    let (_, w, sys, psi0) = scenario(512);
    let reference = sys.dirichlet_evolve(&w, 0.2, &psi0).unwrap();
    let mut fids = Vec::new();
    let mut losses = Vec::new();
    for n in [500u32, 1000, 2000, 4000, 8000] {
        let z = sys.zeno_product(&w, n, 0.2, &psi0).unwrap();
        fids.push(fidelity(&reference, &z));
        losses.push(1.0 - norm(&z).powi(2));
    }
    assert!(fids[2] >= 0.99, "{fids:?}");
    for pair in fids[..4].windows(2) {
        assert!(pair[1] >= pair[0] - 1e-4, "{fids:?}");
    }
    assert!(losses[2] <= 4.0 * losses[4], "{losses:?}");
}

#[test]
fn norm_never_grows() {
    let (_, w, sys, psi0) = scenario(256);
    let norms = sys.zeno_product_norms(&w, 500, 0.2, &psi0).unwrap();
    for pair in norms.windows(2) {
        assert!(pair[1] <= pair[0] + 1e-12);
    }
}

#[test]
fn time_averaged_defect_halves_per_doubling() {
    let (_, w, sys, psi0) = scenario(512);
    let d: Vec<f64> = [500u32, 1000, 2000]
        .iter()
        .map(|&n| {
            sys.time_averaged_defect(&w, n, 0.2, &psi0, DEFAULT_QUADRATURE_NODES)
                .unwrap()
        })
        .collect();
    for pair in d.windows(2) {
        let ratio = pair[1] / pair[0];
        assert!((0.3..=0.7).contains(&ratio), "{d:?}");
    }
}

#[test]
fn zero_horizon_has_no_defect() {
    let (_, w, sys, psi0) = scenario(64);
    assert_eq!(sys.time_averaged_defect(&w, 64, 0.0, &psi0, 9).unwrap(), 0.0);
}

#[test]
fn density_vanishes_at_the_walls() {
    let (grid, w, sys, psi0) = scenario(256);
    let edges = [w.lo(), w.hi() - 1];
    let ground: f64 = edges.iter().map(|&j| psi0.amplitudes()[j].norm_sqr()).sum();
    let times = [0.05, 0.1, 0.15, 0.2, 0.25, 0.3];
    let mut averaged = 0.0;
    for &t in &times {
        let n = (t * 10_000.0) as u32;
        let z = sys.zeno_product(&w, n, t, &psi0).unwrap();
        let nz = norm(&z).powi(2);
        averaged += edges.iter().map(|&j| z[j].norm_sqr() / nz).sum::<f64>() / times.len() as f64;
    }
    assert!(
        averaged <= 10.0 * ground,
        "edge density {averaged:e} vs ground {ground:e}"
    );
    let _ = grid;
}
