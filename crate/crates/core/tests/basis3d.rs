mod common;

use common::fd;
use dotforge::basis3d::{
    build_basis, canonical_orthogonalize, ground_energy_sweep, induced_dipole, overlap_integral_o, solve_states,
    BasisOptions, DotFamily, ExcitonPair, ProductBasis,
};
use dotforge::wells1d::StateKind;
use dotforge::{DotGeometry, MaterialParams, Species};
use nalgebra::{DMatrix, SymmetricEigen, Vector3};

fn zero() -> Vector3<f64> {
    Vector3::zeros()
}

fn field_x(f: f64) -> Vector3<f64> {
    Vector3::new(f, 0.0, 0.0)
}

fn basis(dot: DotGeometry, material: MaterialParams, species: Species, n_unbound: usize) -> ProductBasis {
    let options = BasisOptions {
        n_unbound,
        ..BasisOptions::default()
    };
    build_basis(&dot, &material, species, options).unwrap()
}

fn max_off_identity(m: &DMatrix<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((m[(i, j)] - want).abs());
        }
    }
    worst
}

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    s * h / 3.0
}

#[test]
fn basis_contents() {
    let b = basis(DotGeometry::cube(10.0), MaterialParams::default(), Species::Electron, 4);
    for axis in &b.axes {
        assert!(axis.states.iter().any(|s| s.kind == StateKind::Bound));
        assert_eq!(axis.states.iter().filter(|s| s.kind == StateKind::Unbound).count(), 4);
        assert!(axis.states.windows(2).all(|p| p[0].energy < p[1].energy));
    }
    assert_eq!(b.dim(), b.counts().iter().product::<usize>());
    assert!(!b.unconverged_by_construction);
    let bare = basis(DotGeometry::cube(10.0), MaterialParams::default(), Species::Electron, 0);
    assert!(bare.unconverged_by_construction);
}

#[test]
fn overlap_matrix_properties() {
    let deep = basis(DotGeometry::new(0.1, 0.2), MaterialParams::default().with_depth(1e6), Species::Electron, 0);
    assert!(max_off_identity(&deep.overlap_matrix()) < 1e-6);

    let shallow = basis(DotGeometry::new(1.5, 2.0), MaterialParams::default().with_depth(120.0), Species::Electron, 3);
    let s = shallow.overlap_matrix();
    for i in 0..s.nrows() {
        assert!((s[(i, i)] - 1.0).abs() < 1e-10);
        let a = shallow.multi_index(i);
        for j in 0..s.ncols() {
            assert_eq!(s[(i, j)], s[(j, i)]);
            let b = shallow.multi_index(j);
            let mixed = (0..3).any(|ax| shallow.axes[ax].states[a[ax]].parity != shallow.axes[ax].states[b[ax]].parity);
            if mixed {
                assert_eq!(s[(i, j)], 0.0);
            }
        }
    }
    let lambda = SymmetricEigen::new(s.clone()).eigenvalues;
    assert!(lambda.iter().all(|l| *l > 0.0));
    let x = canonical_orthogonalize(&s);
    assert!(max_off_identity(&(x.transform.transpose() * &s * &x.transform)) < 1e-10);
}

#[test]
fn separable_limit_is_nearly_diagonal() {
    // deviations are second order in the 1D tail weights, which shrink as the well deepens
    let depth = 1e6;
    let worst = |w: f64| {
        let b = basis(DotGeometry::new(0.5 * w, w), MaterialParams::default().with_depth(depth), Species::Electron, 0);
        let h = b.hamiltonian_matrix(&zero());
        let mut worst: f64 = 0.0;
        for i in 0..b.dim() {
            let idx = b.multi_index(i);
            if (0..3).any(|a| b.axes[a].states[idx[a]].energy > 0.25 * depth) {
                continue;
            }
            let sum: f64 = (0..3).map(|a| b.axes[a].states[idx[a]].energy).sum();
            worst = worst.max(((h[(i, i)] - sum) / sum).abs());
            for j in 0..i {
                worst = worst.max((h[(i, j)] / sum).abs());
            }
        }
        worst
    };
    let shallow = worst(0.2);
    let deep = worst(0.5);
    assert!(deep < 0.01, "{deep}");
    assert!(deep < shallow);
}

#[test]
fn ground_product_element_matches_quadrature() {
    // <Ξ111|H|Ξ111> = Σ_a [E_a − V(1 − p_a)] + V(1 − p_x p_y p_z), p_a = inside weight
    let depth = 500.0;
    let b = basis(DotGeometry::cube(10.0), MaterialParams::default(), Species::Electron, 4);
    let h = b.hamiltonian_matrix(&zero());
    let mut sum = 0.0;
    let mut product = 1.0;
    for axis in &b.axes {
        let s = &axis.states[0];
        let half = 0.5 * s.params.width_w;
        let inside = simpson(|u| s.eval(u).powi(2), -half, half, 20_000);
        sum += s.energy - depth * (1.0 - inside);
        product *= inside;
    }
    let want = sum + depth * (1.0 - product);
    assert!((h[(0, 0)] - want).abs() < 1e-7, "{} vs {want}", h[(0, 0)]);
}

#[test]
fn structured_solver_matches_dense_rayleigh_ritz() {
    let b = basis(DotGeometry::new(4.0, 3.0), MaterialParams::default(), Species::Electron, 2);
    for f in [0.0, 60.0] {
        let field = field_x(f);
        let x = canonical_orthogonalize(&b.overlap_matrix());
        let dense = solve_states(&b, &b.hamiltonian_matrix(&field), &x.transform, 6);
        let fast = b.solve(&field, 6).unwrap();
        for (d, s) in dense.iter().zip(&fast) {
            assert!((d.energy - s.energy).abs() < 1e-8, "{} vs {}", d.energy, s.energy);
        }
        assert!((dense[0].mean_position[0] - fast[0].mean_position[0]).abs() < 1e-8);
        let ground = b.ground_state(&field).unwrap();
        assert!((ground.energy - fast[0].energy).abs() < 1e-8);
        // unit norm in the orthonormal basis and cᵀSc = 1
        let norm: f64 = ground.ortho_coeffs.iter().map(|c| c * c).sum();
        assert!((norm - 1.0).abs() < 1e-10);
        let c = nalgebra::DVector::from_vec(ground.coeffs.clone());
        assert!(((c.transpose() * b.overlap_matrix() * &c)[0] - 1.0).abs() < 1e-10);
    }
}

#[test]
fn spectrum_invariant_under_field_reversal_and_axis_swap() {
    let b = basis(DotGeometry::new(5.0, 4.0), MaterialParams::default(), Species::Electron, 2);
    let plus = b.solve(&field_x(40.0), 5).unwrap();
    let minus = b.solve(&field_x(-40.0), 5).unwrap();
    let along_y = b.solve(&Vector3::new(0.0, 40.0, 0.0), 5).unwrap();
    for i in 0..5 {
        assert!((plus[i].energy - minus[i].energy).abs() < 1e-8);
        assert!((plus[i].energy - along_y[i].energy).abs() < 1e-8);
    }
    // (2,1,1) and (1,2,1) are degenerate at zero field
    let free = b.solve(&zero(), 3).unwrap();
    assert!((free[1].energy - free[2].energy).abs() < 1e-8);
    assert!(free[1].dominant_index < free[2].dominant_index);
}

#[test]
fn ground_state_dominance() {
    let material = MaterialParams::default();
    for species in [Species::Electron, Species::Hole] {
        for (a_cube, a_flat) in [(3.0, 6.0), (4.0, 8.0), (6.0, 10.0), (8.0, 12.0), (10.0, 15.0)] {
            let cube = basis(DotGeometry::cube(a_cube), material, species, 4).ground_state(&zero()).unwrap();
            assert!(cube.dominant_amplitude > 0.999, "cube a={a_cube}: {}", cube.dominant_amplitude);
            let flat = basis(DotFamily::FlatCuboid.dot(a_flat), material, species, 4).ground_state(&zero()).unwrap();
            assert!(flat.dominant_amplitude > 0.99, "cuboid a={a_flat}: {}", flat.dominant_amplitude);
        }
    }
}

#[test]
fn variational_convergence() {
    for dot in [DotGeometry::cube(5.0), DotGeometry::new(8.0, 1.6)] {
        let energies: Vec<f64> = [0, 2, 4, 8]
            .iter()
            .map(|&n| basis(dot, MaterialParams::default(), Species::Electron, n).ground_state(&zero()).unwrap().energy)
            .collect();
        assert!(energies.windows(2).all(|p| p[1] <= p[0] + 1e-9), "{energies:?}");
        assert!(((energies[2] - energies[3]) / energies[3]).abs() < 5e-3);
    }
}

#[test]
fn box_size_convergence() {
    let dot = DotGeometry::new(8.0, 1.6);
    let mut energies = Vec::new();
    for box_factor in [10.0, 20.0] {
        let options = BasisOptions {
            box_factor,
            ..BasisOptions::default()
        };
        let b = build_basis(&dot, &MaterialParams::default(), Species::Electron, options).unwrap();
        energies.push(b.ground_state(&zero()).unwrap().energy);
    }
    assert!(((energies[0] - energies[1]) / energies[1]).abs() < 1e-3, "{energies:?}");
}

#[test]
fn size_sweep_shape() {
    let material = MaterialParams::default();
    let sizes = [2.0, 3.0, 5.0, 8.0, 12.0];
    let cube = ground_energy_sweep(DotFamily::Cube, Species::Electron, &material, &sizes, &[500.0], BasisOptions::default()).unwrap();
    let flat = ground_energy_sweep(DotFamily::FlatCuboid, Species::Electron, &material, &sizes, &[500.0], BasisOptions::default()).unwrap();
    assert!(cube.windows(2).all(|p| p[1].energy < p[0].energy));
    for (c, f) in cube.iter().zip(&flat) {
        assert!(f.energy > c.energy, "a={}: {} vs {}", c.base_half, f.energy, c.energy);
    }
    // small dots sit close to the barrier top
    assert!(cube[0].energy > 0.85 * 500.0 && cube[0].energy < 500.0, "{}", cube[0].energy);
    // bulk limit for heavy particles
    let big = ground_energy_sweep(DotFamily::Cube, Species::Hole, &material, &[20.0, 40.0], &[500.0], BasisOptions::default()).unwrap();
    assert!(big[1].energy > 0.0 && big[1].energy < 0.3 * big[0].energy, "{big:?}");
}

#[test]
fn cube_energy_matches_3d_finite_difference() {
    let a = 10.0;
    let b = basis(DotGeometry::cube(a), MaterialParams::default(), Species::Electron, 4);
    let energy = b.ground_state(&zero()).unwrap().energy;
    // 64 nodes per axis, 8 node spacings of barrier on each side
    let extent = 2.0 * a / (1.0 - 16.0 / 64.0);
    let grid = fd::Grid3::new([extent; 3], [64; 3]);
    let (oracle, _) = fd::ground_state_3d(&grid, fd::cuboid(a, 2.0 * a, 500.0), 0.06, 400);
    assert!(((energy - oracle) / oracle).abs() < 0.02, "{energy} vs {oracle}");
}

#[test]
fn induced_dipole_matches_3d_finite_difference() {
    let dot = DotFamily::FlatCuboid.dot(8.0);
    let material = MaterialParams::default();
    let field = 100.0;
    let p = induced_dipole(&dot, &material, &field_x(field), BasisOptions::default()).unwrap();

    let width = 2.0 * dot.base_half;
    let ext_x = width / (1.0 - 20.0 / 64.0);
    let ext_z = dot.height / (1.0 - 58.0 / 64.0);
    let grid = fd::Grid3::new([ext_x, ext_x, ext_z], [64, 64, 64]);
    let mut mean = [0.0; 2];
    for (k, species) in [Species::Electron, Species::Hole].into_iter().enumerate() {
        let well = fd::cuboid(dot.base_half, dot.height, 500.0);
        let slope = -species.charge() * 0.1 * field;
        let (_, psi) = fd::ground_state_3d(&grid, |x, y, z| well(x, y, z) + slope * x, material.mass(species), 600);
        mean[k] = fd::mean_coordinate(&grid, &psi, 0);
    }
    let oracle = mean[1] - mean[0];
    assert!(((p[0] - oracle) / oracle).abs() < 0.05, "{} vs {oracle}", p[0]);
    assert!(p[1].abs() < 1e-12 && p[2].abs() < 1e-12);
}

#[test]
fn field_reach_is_converged() {
    let dot = DotGeometry::new(8.0, 2.0);
    let dipole = |field_reach| {
        let options = BasisOptions {
            field_reach,
            ..BasisOptions::default()
        };
        induced_dipole(&dot, &MaterialParams::default(), &field_x(100.0), options).unwrap()[0]
    };
    let (near, far) = (dipole(1.5), dipole(2.0));
    assert!(((near - far) / far).abs() < 0.02, "{near} vs {far}");
}

#[test]
fn dipole_symmetry() {
    let material = MaterialParams::default();
    let cube = DotGeometry::cube(6.0);
    let p0 = induced_dipole(&cube, &material, &zero(), BasisOptions::default()).unwrap();
    assert!(p0.norm() < 1e-8);
    let plus = induced_dipole(&cube, &material, &field_x(30.0), BasisOptions::default()).unwrap();
    let minus = induced_dipole(&cube, &material, &field_x(-30.0), BasisOptions::default()).unwrap();
    assert!(plus[0] > 0.0);
    assert!((plus + minus).norm() < 1e-8);
}

#[test]
fn dipole_saturates() {
    let dot = DotFamily::FlatCuboid.dot(8.0);
    let fields = [0.0, 25.0, 50.0, 100.0, 150.0];
    let p: Vec<f64> = fields
        .iter()
        .map(|&f| induced_dipole(&dot, &MaterialParams::default(), &field_x(f), BasisOptions::default()).unwrap()[0])
        .collect();
    let slopes: Vec<f64> = (1..fields.len()).map(|i| (p[i] - p[i - 1]) / (fields[i] - fields[i - 1])).collect();
    assert!(slopes.iter().all(|s| *s > 0.0), "{p:?}");
    assert!(slopes.windows(2).all(|w| w[1] < w[0]), "{slopes:?}");
    assert!(p[4] < 2.0 * dot.base_half);
}

#[test]
fn overlap_integral_properties() {
    let dot = DotGeometry::cube(10.0);
    let equal = MaterialParams {
        m_h_eff: 0.06,
        ..MaterialParams::default()
    };
    let o = overlap_integral_o(&dot, &equal, &zero(), BasisOptions::default()).unwrap();
    assert!((o - 1.0).abs() < 1e-8, "{o}");

    let material = MaterialParams::default();
    let o0 = overlap_integral_o(&dot, &material, &zero(), BasisOptions::default()).unwrap();
    let o50 = overlap_integral_o(&dot, &material, &field_x(50.0), BasisOptions::default()).unwrap();
    assert!(o0 < 1.0 && o0 > 0.0);
    assert!(o50 < o0 && o50 >= 0.0);

    // deeper confinement squeezes the mismatch between the two envelopes
    let big = DotGeometry::cube(3.0);
    let values: Vec<f64> = [200.0, 500.0, 1500.0]
        .iter()
        .map(|&v| overlap_integral_o(&big, &material.with_depth(v), &zero(), BasisOptions::default()).unwrap())
        .collect();
    assert!(values.windows(2).all(|w| w[1] > w[0]), "{values:?}");
}

#[test]
fn overlap_with_itself_is_one() {
    let pair = ExcitonPair::solve(&DotGeometry::new(6.0, 2.0), &MaterialParams::default(), &field_x(20.0), BasisOptions::default()).unwrap();
    let own = dotforge::basis3d::state_overlap(&pair.hole, &pair.hole_basis, &pair.hole, &pair.hole_basis);
    assert!((own - 1.0).abs() < 1e-10);
}
