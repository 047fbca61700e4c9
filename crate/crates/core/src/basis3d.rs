//! Product basis of 1D finite-well states and variational single-particle
//! states in a cuboid dot, optionally in a uniform electric field.
//!
//! The confinement is V outside the cuboid, so in the product basis
//! H = Tx⊗Sy⊗Sz + Sx⊗Ty⊗Sz + Sx⊗Sy⊗Tz + V (S⊗S⊗S − Px⊗Py⊗Pz) + field
//! where P is the 1D overlap restricted to the inside of the well. All large
//! operators are applied through this Kronecker structure.

use nalgebra::{DMatrix, SymmetricEigen, Vector3};

use crate::eigen;
use crate::error::{Error, Result};
use crate::geometry::{DotGeometry, MaterialParams, Species};
use crate::units::SLOPE_PER_KV_CM;
use crate::wells1d::{self, Parity, Well1DParams, Well1DState};

/// Smallest overlap eigenvalue kept by canonical orthogonalisation.
pub const PRUNE_THRESHOLD: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasisOptions {
    /// Unbound states added per axis on top of all bound states.
    pub n_unbound: usize,
    /// Outer box width as a multiple of the well width.
    pub box_factor: f64,
    /// The field potential is linear for |u| < field_reach * w/2 and flat
    /// beyond, so box-edge continuum states cannot undercut the dot state.
    pub field_reach: f64,
}

impl Default for BasisOptions {
    fn default() -> Self {
        BasisOptions {
            n_unbound: 4,
            box_factor: 10.0,
            field_reach: 1.5,
        }
    }
}

/// 1D states along one axis with their matrix elements.
#[derive(Clone, Debug)]
pub struct AxisBasis {
    pub states: Vec<Well1DState>,
    pub overlap: DMatrix<f64>,
    pub kinetic: DMatrix<f64>,
    /// Overlap restricted to the inside of the well.
    pub inside: DMatrix<f64>,
    pub position: DMatrix<f64>,
    /// Matrix of the clamped field coordinate.
    pub field_position: DMatrix<f64>,
}

impl AxisBasis {
    fn new(states: Vec<Well1DState>, field_reach: f64) -> Self {
        let n = states.len();
        let build = |f: &dyn Fn(&Well1DState, &Well1DState) -> f64| {
            let mut m = DMatrix::zeros(n, n);
            for i in 0..n {
                for j in i..n {
                    let v = f(&states[i], &states[j]);
                    m[(i, j)] = v;
                    m[(j, i)] = v;
                }
            }
            m
        };
        // parity selection rules are applied exactly
        let same = |a: &Well1DState, b: &Well1DState| a.parity == b.parity;
        let overlap = build(&|a, b| if same(a, b) { wells1d::overlap(a, b) } else { 0.0 });
        let kinetic = build(&|a, b| if same(a, b) { wells1d::kinetic(a, b) } else { 0.0 });
        let inside = build(&|a, b| if same(a, b) { wells1d::overlap_inside(a, b) } else { 0.0 });
        let position = build(&|a, b| if same(a, b) { 0.0 } else { wells1d::position(a, b) });
        let reach = 0.5 * field_reach * states.first().map_or(0.0, |s| s.params.width_w);
        let field_position = build(&|a, b| {
            if same(a, b) {
                0.0
            } else {
                wells1d::clamped_position(a, b, reach)
            }
        });
        AxisBasis {
            states,
            overlap,
            kinetic,
            inside,
            position,
            field_position,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct ProductBasis {
    pub species: Species,
    pub dot: DotGeometry,
    pub material: MaterialParams,
    pub options: BasisOptions,
    pub axes: [AxisBasis; 3],
    /// True when no unbound states were requested.
    pub unconverged_by_construction: bool,
}

/// Build the product basis: every bound state plus `n_unbound` unbound
/// states on each axis.
pub fn build_basis(
    dot: &DotGeometry,
    material: &MaterialParams,
    species: Species,
    options: BasisOptions,
) -> Result<ProductBasis> {
    dot.validate()?;
    material.validate()?;
    if !(options.field_reach.is_finite() && options.field_reach >= 1.0) {
        return Err(Error::InvalidParameter {
            field: "field_reach",
            reason: format!("must be >= 1, got {}", options.field_reach),
        });
    }
    if !(options.box_factor.is_finite() && options.box_factor > 1.0) {
        return Err(Error::InvalidParameter {
            field: "box_factor",
            reason: format!("must be > 1, got {}", options.box_factor),
        });
    }
    let widths = dot.widths();
    let mass = material.mass(species);
    let depth = material.depth(species);
    let mut axes = Vec::with_capacity(3);
    for w in widths {
        // the x and y wells are identical for square bases
        if let Some(prev) = axes.iter().find(|a: &&AxisBasis| a.states[0].params.width_w == w) {
            axes.push(prev.clone());
            continue;
        }
        let params = Well1DParams::new(w, depth, mass).with_box(options.box_factor * w);
        let mut states = wells1d::solve_bound(&params)?;
        if options.n_unbound > 0 {
            states.extend(wells1d::solve_unbound(&params, options.n_unbound)?);
        }
        axes.push(AxisBasis::new(states, options.field_reach));
    }
    let axes: [AxisBasis; 3] = axes.try_into().expect("three axes");
    Ok(ProductBasis {
        species,
        dot: *dot,
        material: *material,
        options,
        axes,
        unconverged_by_construction: options.n_unbound == 0,
    })
}

impl ProductBasis {
    pub fn counts(&self) -> [usize; 3] {
        [self.axes[0].len(), self.axes[1].len(), self.axes[2].len()]
    }

    pub fn dim(&self) -> usize {
        self.counts().iter().product()
    }

    pub fn flat_index(&self, idx: [usize; 3]) -> usize {
        let [_, ny, nz] = self.counts();
        (idx[0] * ny + idx[1]) * nz + idx[2]
    }

    pub fn multi_index(&self, flat: usize) -> [usize; 3] {
        let [_, ny, nz] = self.counts();
        [flat / (ny * nz), (flat / nz) % ny, flat % nz]
    }

    fn depth(&self) -> f64 {
        self.material.depth(self.species)
    }

    /// Potential slope (meV/nm) per axis for `field` (kV/cm): U = −q E·r.
    fn field_slopes(&self, field: &Vector3<f64>) -> [f64; 3] {
        let q = self.species.charge();
        [0, 1, 2].map(|a| -q * SLOPE_PER_KV_CM * field[a])
    }

    /// Full overlap matrix in the original basis.
    pub fn overlap_matrix(&self) -> DMatrix<f64> {
        let s = [&self.axes[0].overlap, &self.axes[1].overlap, &self.axes[2].overlap];
        kron3(s[0], s[1], s[2])
    }

    /// Full Hamiltonian in the original basis; `field` in kV/cm.
    pub fn hamiltonian_matrix(&self, field: &Vector3<f64>) -> DMatrix<f64> {
        let [x, y, z] = &self.axes;
        let slopes = self.field_slopes(field);
        let mut h = kron3(&x.kinetic, &y.overlap, &z.overlap)
            + kron3(&x.overlap, &y.kinetic, &z.overlap)
            + kron3(&x.overlap, &y.overlap, &z.kinetic)
            + self.depth() * (kron3(&x.overlap, &y.overlap, &z.overlap) - kron3(&x.inside, &y.inside, &z.inside));
        if slopes[0] != 0.0 {
            h += slopes[0] * kron3(&x.field_position, &y.overlap, &z.overlap);
        }
        if slopes[1] != 0.0 {
            h += slopes[1] * kron3(&x.overlap, &y.field_position, &z.overlap);
        }
        if slopes[2] != 0.0 {
            h += slopes[2] * kron3(&x.overlap, &y.overlap, &z.field_position);
        }
        h
    }

    /// Lowest `n_states` variational states; `field` in kV/cm.
    pub fn solve(&self, field: &Vector3<f64>, n_states: usize) -> Result<Vec<EnvelopeState>> {
        let slopes = self.field_slopes(field);
        // the ground state is even along every axis without a field
        let ground_only = n_states == 1;
        let reduced: Vec<ReducedAxis> = (0..3)
            .map(|a| {
                let keep_even_only = ground_only && slopes[a] == 0.0;
                ReducedAxis::new(&self.axes[a], keep_even_only)
            })
            .collect();
        let dims = [reduced[0].k(), reduced[1].k(), reduced[2].k()];
        let dim: usize = dims.iter().product();
        let mut active = vec![true; dim];
        let mut pruned = 0;
        for (i, a) in active.iter_mut().enumerate() {
            let ix = [i / (dims[1] * dims[2]), (i / dims[2]) % dims[1], i % dims[2]];
            let lambda = reduced[0].lambda[ix[0]] * reduced[1].lambda[ix[1]] * reduced[2].lambda[ix[2]];
            if lambda < PRUNE_THRESHOLD {
                *a = false;
                pruned += 1;
            }
        }
        let depth = self.depth();
        let apply = |v: &[f64], out: &mut [f64]| {
            out.iter_mut().zip(v).for_each(|(o, x)| *o = depth * x);
            let confined = apply_kron(
                [Some(&reduced[0].inside), Some(&reduced[1].inside), Some(&reduced[2].inside)],
                v,
                dims,
            );
            for (o, c) in out.iter_mut().zip(&confined) {
                *o -= depth * c;
            }
            for a in 0..3 {
                let mut ops: [Option<&DMatrix<f64>>; 3] = [None, None, None];
                ops[a] = Some(&reduced[a].kinetic);
                let t = apply_kron(ops, v, dims);
                out.iter_mut().zip(&t).for_each(|(o, x)| *o += x);
                if slopes[a] != 0.0 {
                    ops[a] = Some(&reduced[a].field_position);
                    let f = apply_kron(ops, v, dims);
                    out.iter_mut().zip(&f).for_each(|(o, x)| *o += slopes[a] * x);
                }
            }
        };
        let pairs = eigen::lowest(apply, &active, n_states);

        let transforms = [&reduced[0].transform, &reduced[1].transform, &reduced[2].transform];
        let mut states: Vec<EnvelopeState> = pairs
            .into_iter()
            .map(|p| {
                let mut coeffs = apply_kron(transforms.map(Some), &p.vector, dims);
                let mut ortho = p.vector;
                // sign: (1,1,1) amplitude positive, else the largest one
                let pivot = if coeffs[0].abs() > 1e-8 { 0 } else { argmax_abs(&coeffs) };
                if coeffs[pivot] < 0.0 {
                    coeffs.iter_mut().for_each(|c| *c = -*c);
                    ortho.iter_mut().for_each(|c| *c = -*c);
                }
                let mut mean_position = Vector3::zeros();
                for a in 0..3 {
                    let mut ops: [Option<&DMatrix<f64>>; 3] = [None, None, None];
                    ops[a] = Some(&reduced[a].position);
                    let xv = apply_kron(ops, &ortho, dims);
                    mean_position[a] = xv.iter().zip(&ortho).map(|(x, y)| x * y).sum();
                }
                let dominant_index = self.multi_index(argmax_abs(&coeffs));
                EnvelopeState {
                    species: self.species,
                    energy: p.value,
                    dominant_amplitude: coeffs[0].abs(),
                    dominant_index,
                    mean_position,
                    coeffs,
                    ortho_coeffs: ortho,
                    pruned,
                }
            })
            .collect();
        sort_states(&mut states);
        Ok(states)
    }

    /// Variational ground state.
    pub fn ground_state(&self, field: &Vector3<f64>) -> Result<EnvelopeState> {
        Ok(self.solve(field, 1)?.remove(0))
    }
}

/// Rayleigh-Ritz on explicit matrices: eigenpairs of XᵀHX mapped back to
/// the original basis of `basis`.
pub fn solve_states(basis: &ProductBasis, h: &DMatrix<f64>, x: &DMatrix<f64>, n_states: usize) -> Vec<EnvelopeState> {
    let reduced = x.transpose() * h * x;
    let eig = SymmetricEigen::new(0.5 * (&reduced + reduced.transpose()));
    let mut order: Vec<usize> = (0..reduced.nrows()).collect();
    order.sort_by(|a, b| eig.eigenvalues[*a].total_cmp(&eig.eigenvalues[*b]));
    let dims = basis.counts();
    let mut states: Vec<EnvelopeState> = order
        .into_iter()
        .take(n_states)
        .map(|c| {
            let mut ortho: Vec<f64> = eig.eigenvectors.column(c).iter().copied().collect();
            let mut coeffs: Vec<f64> = (x * eig.eigenvectors.column(c)).iter().copied().collect();
            let pivot = if coeffs[0].abs() > 1e-8 { 0 } else { argmax_abs(&coeffs) };
            if coeffs[pivot] < 0.0 {
                coeffs.iter_mut().for_each(|v| *v = -*v);
                ortho.iter_mut().for_each(|v| *v = -*v);
            }
            let mut mean_position = Vector3::zeros();
            for a in 0..3 {
                let mut ops = [0, 1, 2].map(|b| Some(&basis.axes[b].overlap));
                ops[a] = Some(&basis.axes[a].position);
                let xv = apply_kron(ops, &coeffs, dims);
                mean_position[a] = xv.iter().zip(&coeffs).map(|(p, q)| p * q).sum();
            }
            EnvelopeState {
                species: basis.species,
                energy: eig.eigenvalues[c],
                dominant_amplitude: coeffs[0].abs(),
                dominant_index: basis.multi_index(argmax_abs(&coeffs)),
                mean_position,
                coeffs,
                ortho_coeffs: ortho,
                pruned: basis.dim() - x.ncols(),
            }
        })
        .collect();
    sort_states(&mut states);
    states
}

fn argmax_abs(v: &[f64]) -> usize {
    v.iter()
        .enumerate()
        .fold((0, -1.0), |acc, (i, x)| if x.abs() > acc.1 { (i, x.abs()) } else { acc })
        .0
}

fn sort_states(states: &mut [EnvelopeState]) {
    states.sort_by(|a, b| {
        let tol = 1e-9 * a.energy.abs().max(1.0);
        if (a.energy - b.energy).abs() <= tol {
            a.dominant_index.cmp(&b.dominant_index)
        } else {
            a.energy.total_cmp(&b.energy)
        }
    });
}

/// Per-axis orthonormalised block: transform Y (original × kept) and the
/// transformed kinetic, inside-overlap and position matrices.
struct ReducedAxis {
    transform: DMatrix<f64>,
    lambda: Vec<f64>,
    kinetic: DMatrix<f64>,
    inside: DMatrix<f64>,
    position: DMatrix<f64>,
    field_position: DMatrix<f64>,
}

impl ReducedAxis {
    fn new(axis: &AxisBasis, even_only: bool) -> Self {
        let n = axis.len();
        let keep: Vec<usize> = (0..n)
            .filter(|&i| !even_only || axis.states[i].parity == Parity::Even)
            .collect();
        let sub = axis.overlap.select_rows(&keep).select_columns(&keep);
        let ortho = canonical_orthogonalize(&sub);
        let mut transform = DMatrix::zeros(n, ortho.transform.ncols());
        for (r, &i) in keep.iter().enumerate() {
            transform.set_row(i, &ortho.transform.row(r));
        }
        let conj = |m: &DMatrix<f64>| transform.transpose() * m * &transform;
        ReducedAxis {
            kinetic: conj(&axis.kinetic),
            inside: conj(&axis.inside),
            position: conj(&axis.position),
            field_position: conj(&axis.field_position),
            lambda: ortho.eigenvalues,
            transform,
        }
    }

    fn k(&self) -> usize {
        self.transform.ncols()
    }
}

#[derive(Clone, Debug)]
pub struct Orthogonalization {
    /// X with Xᵀ S X = I; one column per kept direction.
    pub transform: DMatrix<f64>,
    /// Overlap eigenvalues of the kept directions, ascending.
    pub eigenvalues: Vec<f64>,
    pub pruned: usize,
}

/// Canonical orthogonalisation X = U λ^(-1/2), dropping λ < 1e-10.
pub fn canonical_orthogonalize(s: &DMatrix<f64>) -> Orthogonalization {
    let n = s.nrows();
    let eig = SymmetricEigen::new(0.5 * (s + s.transpose()));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|a, b| eig.eigenvalues[*b].total_cmp(&eig.eigenvalues[*a]));
    let kept: Vec<usize> = order
        .into_iter()
        .filter(|&i| eig.eigenvalues[i] >= PRUNE_THRESHOLD)
        .collect();
    let mut transform = DMatrix::zeros(n, kept.len());
    let mut eigenvalues = Vec::with_capacity(kept.len());
    for (c, &i) in kept.iter().enumerate() {
        let lambda = eig.eigenvalues[i];
        let mut col = eig.eigenvectors.column(i).into_owned();
        // deterministic column sign
        let p = col.iamax();
        if col[p] < 0.0 {
            col = -col;
        }
        transform.set_column(c, &(col / lambda.sqrt()));
        eigenvalues.push(lambda);
    }
    Orthogonalization {
        transform,
        eigenvalues,
        pruned: n - kept.len(),
    }
}

#[derive(Clone, Debug)]
pub struct EnvelopeState {
    pub species: Species,
    pub energy: f64,
    /// Coefficients on the original (non-orthogonal) product basis.
    pub coeffs: Vec<f64>,
    /// Coefficients on the orthonormalised basis, unit norm.
    pub ortho_coeffs: Vec<f64>,
    /// |coefficient| of the (1,1,1) product function.
    pub dominant_amplitude: f64,
    /// Product index (0-based) with the largest |coefficient|.
    pub dominant_index: [usize; 3],
    /// ⟨r⟩ (nm) relative to the dot centre.
    pub mean_position: Vector3<f64>,
    /// Canonical directions dropped by orthogonalisation.
    pub pruned: usize,
}

impl EnvelopeState {
    /// Envelope amplitude (nm^-3/2) at `r` relative to the dot centre.
    pub fn eval(&self, basis: &ProductBasis, r: &Vector3<f64>) -> f64 {
        let vals: Vec<Vec<f64>> = (0..3)
            .map(|a| basis.axes[a].states.iter().map(|s| s.eval(r[a])).collect())
            .collect();
        let [nx, ny, nz] = basis.counts();
        let mut acc = 0.0;
        for i in 0..nx {
            for j in 0..ny {
                let vij = vals[0][i] * vals[1][j];
                if vij == 0.0 {
                    continue;
                }
                for k in 0..nz {
                    acc += self.coeffs[(i * ny + j) * nz + k] * vij * vals[2][k];
                }
            }
        }
        acc
    }
}

/// Apply per-axis matrices (None = identity) to a flattened 3-tensor.
pub(crate) fn apply_kron(ops: [Option<&DMatrix<f64>>; 3], v: &[f64], dims: [usize; 3]) -> Vec<f64> {
    let mut cur = v.to_vec();
    let mut d = dims;
    for (axis, op) in ops.iter().enumerate() {
        let Some(m) = op else { continue };
        assert_eq!(m.ncols(), d[axis], "operator does not match axis {axis}");
        let outer: usize = d[..axis].iter().product();
        let inner: usize = d[axis + 1..].iter().product();
        let rows = m.nrows();
        let mut next = vec![0.0; outer * rows * inner];
        for o in 0..outer {
            for c in 0..d[axis] {
                let src = &cur[(o * d[axis] + c) * inner..(o * d[axis] + c + 1) * inner];
                if src.iter().all(|x| *x == 0.0) {
                    continue;
                }
                for r in 0..rows {
                    let w = m[(r, c)];
                    if w == 0.0 {
                        continue;
                    }
                    let dst = &mut next[(o * rows + r) * inner..(o * rows + r + 1) * inner];
                    for (x, y) in dst.iter_mut().zip(src) {
                        *x += w * y;
                    }
                }
            }
        }
        cur = next;
        d[axis] = rows;
    }
    cur
}

fn kron3(a: &DMatrix<f64>, b: &DMatrix<f64>, c: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b).kronecker(c)
}

/// ∫ ψ_a ψ_b d³r between two states on (possibly different) bases.
pub fn state_overlap(a: &EnvelopeState, basis_a: &ProductBasis, b: &EnvelopeState, basis_b: &ProductBasis) -> f64 {
    let cross: Vec<DMatrix<f64>> = (0..3)
        .map(|ax| {
            let sa = &basis_a.axes[ax].states;
            let sb = &basis_b.axes[ax].states;
            DMatrix::from_fn(sa.len(), sb.len(), |i, j| {
                if sa[i].parity == sb[j].parity {
                    wells1d::overlap(&sa[i], &sb[j])
                } else {
                    0.0
                }
            })
        })
        .collect();
    let mapped = apply_kron([Some(&cross[0]), Some(&cross[1]), Some(&cross[2])], &b.coeffs, basis_b.counts());
    mapped.iter().zip(&a.coeffs).map(|(x, y)| x * y).sum()
}

/// Electron and hole ground states of one dot.
#[derive(Clone, Debug)]
pub struct ExcitonPair {
    pub electron_basis: ProductBasis,
    pub hole_basis: ProductBasis,
    pub electron: EnvelopeState,
    pub hole: EnvelopeState,
}

impl ExcitonPair {
    pub fn solve(dot: &DotGeometry, material: &MaterialParams, field: &Vector3<f64>, options: BasisOptions) -> Result<Self> {
        let electron_basis = build_basis(dot, material, Species::Electron, options)?;
        let hole_basis = build_basis(dot, material, Species::Hole, options)?;
        let electron = electron_basis.ground_state(field)?;
        let hole = hole_basis.ground_state(field)?;
        Ok(ExcitonPair {
            electron_basis,
            hole_basis,
            electron,
            hole,
        })
    }

    /// Electron-hole envelope overlap O.
    pub fn overlap(&self) -> f64 {
        state_overlap(&self.electron, &self.electron_basis, &self.hole, &self.hole_basis)
    }

    /// Static dipole p = e(⟨r⟩_h − ⟨r⟩_e) in e·nm; points along the field.
    pub fn dipole(&self) -> Vector3<f64> {
        self.hole.mean_position - self.electron.mean_position
    }
}

/// Electron-hole ground-state envelope overlap O for a dot in `field`.
pub fn overlap_integral_o(dot: &DotGeometry, material: &MaterialParams, field: &Vector3<f64>, options: BasisOptions) -> Result<f64> {
    Ok(ExcitonPair::solve(dot, material, field, options)?.overlap())
}

/// Field-induced exciton dipole (e·nm).
pub fn induced_dipole(
    dot: &DotGeometry,
    material: &MaterialParams,
    field: &Vector3<f64>,
    options: BasisOptions,
) -> Result<Vector3<f64>> {
    Ok(ExcitonPair::solve(dot, material, field, options)?.dipole())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DotFamily {
    /// Height equals the base side (a = h/2).
    Cube,
    /// Base half-width five times the height (a = 5h).
    FlatCuboid,
}

impl DotFamily {
    pub fn dot(self, base_half: f64) -> DotGeometry {
        match self {
            DotFamily::Cube => DotGeometry::cube(base_half),
            DotFamily::FlatCuboid => DotGeometry::new(base_half, base_half / 5.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DotFamily::Cube => "cube",
            DotFamily::FlatCuboid => "cuboid",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub family: DotFamily,
    pub species: Species,
    pub base_half: f64,
    pub depth: f64,
    pub energy: f64,
    pub dominant_amplitude: f64,
}

/// Ground energies over sizes and confinement depths.
pub fn ground_energy_sweep(
    family: DotFamily,
    species: Species,
    base_material: &MaterialParams,
    sizes: &[f64],
    depths: &[f64],
    options: BasisOptions,
) -> Result<Vec<SweepRow>> {
    use rayon::prelude::*;
    let jobs: Vec<(f64, f64)> = depths.iter().flat_map(|&v| sizes.iter().map(move |&a| (v, a))).collect();
    jobs.par_iter()
        .map(|&(depth, a)| {
            let material = match species {
                Species::Electron => MaterialParams { v_e: depth, ..*base_material },
                Species::Hole => MaterialParams { v_h: depth, ..*base_material },
            };
            let basis = build_basis(&family.dot(a), &material, species, options)?;
            let g = basis.ground_state(&Vector3::zeros())?;
            Ok(SweepRow {
                family,
                species,
                base_half: a,
                depth,
                energy: g.energy,
                dominant_amplitude: g.dominant_amplitude,
            })
        })
        .collect()
}
