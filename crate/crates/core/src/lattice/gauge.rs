use std::collections::VecDeque;

use serde::Serialize;

use super::GaugeLattice;
use crate::error::{Error, Result};
use crate::scalar::{distance_to_multiple, wrap_angle, Real};

/// Tolerance on `Φ_B mod π` for time-reversal symmetry.
pub const TRS_TOLERANCE: f64 = 1e-9;

/// Synthetic flux through a directed closed walk.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FluxReport<T> {
    pub cycle: Vec<usize>,
    /// Flux in `(-π, π]`.
    pub flux: T,
}

/// Sums `φ_ab` along consecutive sites of `cycle`, closing it back onto the
/// first site. A trailing repeat of the first site is accepted.
pub fn loop_flux<T: Real>(lattice: &GaugeLattice<T>, cycle: &[usize]) -> Result<FluxReport<T>> {
    let mut sites = cycle.to_vec();
    if sites.len() > 1 && sites.first() == sites.last() {
        sites.pop();
    }
    if sites.len() < 2 {
        return Err(Error::param("cycle", sites.len() as f64, "needs at least two sites"));
    }
    let mut total = T::zero();
    for k in 0..sites.len() {
        let (a, b) = (sites[k], sites[(k + 1) % sites.len()]);
        total += lattice.edge_phase(a, b).ok_or(Error::MissingEdge(a, b))?;
    }
    Ok(FluxReport {
        cycle: sites,
        flux: wrap_angle(total),
    })
}

/// Applies `b_i → e^{iϑ_i} b_i`, i.e. `φ_ij → φ_ij + ϑ_i − ϑ_j`.
pub fn gauge_transform<T: Real>(lattice: &GaugeLattice<T>, site_phases: &[T]) -> Result<GaugeLattice<T>> {
    if site_phases.len() != lattice.n_sites {
        return Err(Error::LengthMismatch {
            expected: lattice.n_sites,
            got: site_phases.len(),
        });
    }
    let mut out = lattice.clone();
    for h in &mut out.hoppings {
        h.phase = wrap_angle(h.phase + site_phases[h.i] - site_phases[h.j]);
    }
    Ok(out)
}

/// Site phases that spread the flux of `cycle` evenly, so that every edge of
/// the cycle carries `Φ_B / L` after [`gauge_transform`].
pub fn uniform_gauge<T: Real>(lattice: &GaugeLattice<T>, cycle: &[usize]) -> Result<Vec<T>> {
    let report = loop_flux(lattice, cycle)?;
    let sites = report.cycle;
    let len = sites.len();
    let mut seen = vec![false; lattice.n_sites];
    for &s in &sites {
        if std::mem::replace(&mut seen[s], true) {
            return Err(Error::param("cycle", s as f64, "sites must not repeat"));
        }
    }
    // Unwrapped sum, so that the recursion below closes exactly.
    let raw: T = (0..len)
        .map(|k| lattice.edge_phase(sites[k], sites[(k + 1) % len]).expect("checked by loop_flux"))
        .fold(T::zero(), |a, b| a + b);
    let target = raw / T::from_usize_lossy(len);
    let mut theta = vec![T::zero(); lattice.n_sites];
    for k in 0..len - 1 {
        let (a, b) = (sites[k], sites[k + 1]);
        theta[b] = theta[a] + lattice.edge_phase(a, b).expect("checked") - target;
    }
    Ok(theta)
}

struct Forest {
    parent: Vec<Option<usize>>,
    depth: Vec<usize>,
    non_tree: Vec<(usize, usize)>,
    order: Vec<usize>,
}

fn spanning_forest<T: Real>(lattice: &GaugeLattice<T>) -> Forest {
    let n = lattice.n_sites;
    let adj = lattice.neighbours();
    let mut parent = vec![None; n];
    let mut depth = vec![0; n];
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut tree_edge = std::collections::BTreeSet::new();
    for root in 0..n {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(a) = queue.pop_front() {
            order.push(a);
            for &b in &adj[a] {
                if !visited[b] {
                    visited[b] = true;
                    parent[b] = Some(a);
                    depth[b] = depth[a] + 1;
                    tree_edge.insert((a.min(b), a.max(b)));
                    queue.push_back(b);
                }
            }
        }
    }
    let non_tree = lattice
        .hoppings
        .iter()
        .map(|h| (h.i.min(h.j), h.i.max(h.j)))
        .filter(|e| !tree_edge.contains(e))
        .collect();
    Forest {
        parent,
        depth,
        non_tree,
        order,
    }
}

/// Fundamental cycles of a BFS spanning forest, each with its flux and
/// whether it is compatible with time-reversal symmetry (`Φ_B ≡ 0 mod π`).
pub fn trs_invariant<T: Real>(lattice: &GaugeLattice<T>) -> Vec<(FluxReport<T>, bool)> {
    let forest = spanning_forest(lattice);
    let tol = T::lit(TRS_TOLERANCE);
    forest
        .non_tree
        .iter()
        .map(|&(a, b)| {
            let (mut x, mut y) = (a, b);
            let (mut up_a, mut up_b) = (vec![x], vec![y]);
            while x != y {
                if forest.depth[x] >= forest.depth[y] {
                    x = forest.parent[x].expect("same component");
                    up_a.push(x);
                } else {
                    y = forest.parent[y].expect("same component");
                    up_b.push(y);
                }
            }
            // up_a ends at the common ancestor; drop its duplicate from up_b.
            up_b.pop();
            let mut cycle: Vec<usize> = up_a.into_iter().rev().collect();
            cycle.extend(up_b);
            let report = loop_flux(lattice, &cycle).expect("cycle follows existing edges");
            let symmetric = distance_to_multiple(report.flux, T::pi()) < tol;
            (report, symmetric)
        })
        .collect()
}

/// True iff every independent cycle has `Φ_B ≡ 0 mod π`.
pub fn time_reversal_symmetric<T: Real>(lattice: &GaugeLattice<T>) -> bool {
    trs_invariant(lattice).iter().all(|(_, ok)| *ok)
}

/// Site phases that remove the phase of every spanning-tree edge. After the
/// transform the remaining phases are the fundamental-cycle fluxes.
pub fn tree_gauge<T: Real>(lattice: &GaugeLattice<T>) -> Vec<T> {
    let forest = spanning_forest(lattice);
    let mut theta = vec![T::zero(); lattice.n_sites];
    for &c in &forest.order {
        if let Some(p) = forest.parent[c] {
            theta[c] = theta[p] + lattice.edge_phase(p, c).expect("tree edge exists");
        }
    }
    theta
}
