//! Orthogonal phase-vector sets: the mux lemma check and clique searches
//! over discrete phase alphabets.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{cis, is_complex_hadamard, Complex, PhaseVector, TransferMatrix};

/// Upper bound on `|alphabet|^N` accepted by the searches.
pub const SEARCH_LIMIT: f64 = 1e8;

/// Outcome of [`check_mux_lemma`].
#[derive(Clone, Debug, Serialize)]
pub struct MuxLemmaReport {
    pub v_is_complex_hadamard: bool,
    pub settings_orthonormal: bool,
    /// Largest |⟨d_j, d_k⟩ − δ_jk| over setting pairs (normalised overlap).
    pub max_overlap_error: f64,
    /// Every `U_k = W D_k V†` sends exactly one input to output 0, and
    /// different settings pick different inputs.
    pub routes_to_port_zero: bool,
    pub violations: Vec<String>,
}

impl MuxLemmaReport {
    pub fn passes(&self) -> bool {
        self.v_is_complex_hadamard && self.settings_orthonormal
    }
}

/// Check the necessary conditions for `U_k = W D_k V†` to act as an N-to-1
/// mux: `V` complex Hadamard and the `d_k` orthonormal.
pub fn check_mux_lemma(
    w: &TransferMatrix,
    v: &TransferMatrix,
    settings: &[PhaseVector],
    tol: f64,
) -> Result<MuxLemmaReport> {
    let n = w.dim();
    if v.dim() != n || settings.iter().any(|d| d.dim() != n) {
        return Err(Error::DimensionMismatch("W, V and all phase vectors must share one dimension".into()));
    }
    let mut violations = Vec::new();
    let had = is_complex_hadamard(v, tol);
    if !had {
        violations.push("V is not a complex Hadamard matrix".to_string());
    }
    let mut max_err: f64 = 0.0;
    for (j, dj) in settings.iter().enumerate() {
        for (k, dk) in settings.iter().enumerate().skip(j) {
            let want = if j == k { 1.0 } else { 0.0 };
            let err = (dj.overlap(dk) - Complex::new(want, 0.0)).norm();
            if err > tol {
                violations.push(format!("settings {j} and {k}: overlap error {err:.3e}"));
            }
            max_err = max_err.max(err);
        }
    }
    let vd = v.adjoint();
    let mut sources = Vec::new();
    let mut routes = true;
    for d in settings {
        let u = w.matmul(&d.to_diag()).matmul(&vd);
        let hits: Vec<usize> = (0..n).filter(|&t| (u.get(0, t).norm() - 1.0).abs() <= tol.max(1e-9)).collect();
        if hits.len() == 1 {
            sources.push(hits[0]);
        } else {
            routes = false;
        }
    }
    sources.sort_unstable();
    sources.dedup();
    routes &= sources.len() == settings.len();
    Ok(MuxLemmaReport {
        v_is_complex_hadamard: had,
        settings_orthonormal: max_err <= tol,
        max_overlap_error: max_err,
        routes_to_port_zero: routes,
        violations,
    })
}

/// Six pairwise-orthogonal ternary phase vectors, as multiples of −2π/3.
/// The first four use only the two phases {0, −2π/3}.
pub const TERNARY_SIX_INDICES: [[u8; 6]; 6] = [
    [0, 0, 0, 1, 1, 1],
    [0, 1, 1, 0, 1, 0],
    [1, 0, 1, 1, 0, 0],
    [1, 1, 0, 0, 0, 1],
    [0, 1, 2, 1, 0, 2],
    [1, 0, 2, 0, 1, 2],
];

pub fn ternary_six_vectors() -> Vec<PhaseVector> {
    TERNARY_SIX_INDICES
        .iter()
        .map(|row| PhaseVector::new(row.iter().map(|&j| -2.0 * PI * j as f64 / 3.0).collect()))
        .collect()
}

/// Vertex set and orthogonality graph for an alphabet search.
struct PhaseGraph {
    n: usize,
    k: usize,
    adj: Vec<Vec<u32>>,
}

impl PhaseGraph {
    fn build(alphabet: &[f64], n: usize) -> Result<Self> {
        let k = alphabet.len();
        let size = (k as f64).powi(n as i32);
        if size > SEARCH_LIMIT {
            return Err(Error::SearchSpace { size, limit: SEARCH_LIMIT });
        }
        if k == 0 || n == 0 {
            return Ok(Self { n, k, adj: vec![] });
        }
        let v = size as usize;
        // differences of alphabet phases, tabulated once
        let table: Vec<Complex> = (0..k * k).map(|ab| cis(alphabet[ab % k] - alphabet[ab / k])).collect();
        let verts: Vec<Vec<u16>> = (0..v).map(|i| digits(i, k, n)).collect();
        let tol = 1e-9 * n as f64;
        let adj: Vec<Vec<u32>> = (0..v)
            .map(|a| {
                (0..v)
                    .filter(|&b| {
                        b != a && {
                            let s: Complex = verts[a]
                                .iter()
                                .zip(&verts[b])
                                .map(|(&x, &y)| table[x as usize * k + y as usize])
                                .sum();
                            s.norm() <= tol
                        }
                    })
                    .map(|b| b as u32)
                    .collect()
            })
            .collect();
        Ok(Self { n, k, adj })
    }

    fn vector(&self, alphabet: &[f64], idx: u32) -> PhaseVector {
        PhaseVector::new(digits(idx as usize, self.k, self.n).into_iter().map(|d| alphabet[d as usize]).collect())
    }
}

fn digits(mut i: usize, k: usize, n: usize) -> Vec<u16> {
    let mut d = vec![0u16; n];
    for slot in d.iter_mut().rev() {
        *slot = (i % k) as u16;
        i /= k;
    }
    d
}

fn intersect(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn difference(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().copied().filter(|x| b.binary_search(x).is_err()).collect()
}

/// Bron–Kerbosch with Tomita pivoting; `visit` returns false to stop.
fn bron_kerbosch(
    adj: &[Vec<u32>],
    r: &mut Vec<u32>,
    p: Vec<u32>,
    x: Vec<u32>,
    visit: &mut dyn FnMut(&[u32]) -> bool,
) -> bool {
    if p.is_empty() && x.is_empty() {
        return visit(r);
    }
    let pivot = p
        .iter()
        .chain(&x)
        .copied()
        .max_by_key(|&u| intersect(&p, &adj[u as usize]).len())
        .expect("p or x non-empty");
    let candidates = difference(&p, &adj[pivot as usize]);
    let (mut p, mut x) = (p, x);
    for v in candidates {
        let nv = &adj[v as usize];
        r.push(v);
        let go_on = bron_kerbosch(adj, r, intersect(&p, nv), intersect(&x, nv), visit);
        r.pop();
        if !go_on {
            return false;
        }
        p.retain(|&u| u != v);
        let pos = x.binary_search(&v).unwrap_or_else(|e| e);
        x.insert(pos, v);
    }
    true
}

/// Maximal cliques of pairwise-orthogonal vectors over `alphabet^n` with at
/// least `target` members.
///
/// Vectors are enumerated in lexicographic order of alphabet indices; each
/// returned set is sorted that way, and the list is sorted lexicographically.
/// With `limit = Some(m)` the search stops after `m` qualifying cliques (the
/// first `m` in the deterministic search order).
pub fn search_orthogonal_phase_sets(
    alphabet: &[f64],
    n: usize,
    target: usize,
    limit: Option<usize>,
) -> Result<Vec<Vec<PhaseVector>>> {
    let g = PhaseGraph::build(alphabet, n)?;
    let mut found: Vec<Vec<u32>> = Vec::new();
    let all: Vec<u32> = (0..g.adj.len() as u32).collect();
    bron_kerbosch(&g.adj, &mut Vec::new(), all, Vec::new(), &mut |c| {
        if c.len() >= target {
            let mut s = c.to_vec();
            s.sort_unstable();
            found.push(s);
        }
        limit.map_or(true, |m| found.len() < m)
    });
    found.sort();
    Ok(found.into_iter().map(|set| set.into_iter().map(|i| g.vector(alphabet, i)).collect()).collect())
}

/// Number of maximal orthogonal sets with at least `target` members.
pub fn count_orthogonal_phase_sets(alphabet: &[f64], n: usize, target: usize) -> Result<usize> {
    let g = PhaseGraph::build(alphabet, n)?;
    let mut count = 0usize;
    let all: Vec<u32> = (0..g.adj.len() as u32).collect();
    bron_kerbosch(&g.adj, &mut Vec::new(), all, Vec::new(), &mut |c| {
        if c.len() >= target {
            count += 1;
        }
        true
    });
    Ok(count)
}

/// Size of the largest orthogonal set over `alphabet^n`, with a witness.
pub fn max_orthogonal_set(alphabet: &[f64], n: usize) -> Result<(usize, Vec<PhaseVector>)> {
    let g = PhaseGraph::build(alphabet, n)?;
    let v = g.adj.len();
    if v == 0 {
        return Ok((0, vec![]));
    }
    let mut best: Vec<u32> = vec![0];
    // simple branch and bound in vertex order
    fn grow(adj: &[Vec<u32>], r: &mut Vec<u32>, p: Vec<u32>, best: &mut Vec<u32>) {
        if r.len() > best.len() {
            *best = r.clone();
        }
        for (i, &v) in p.iter().enumerate() {
            if r.len() + (p.len() - i) <= best.len() {
                return;
            }
            let next = intersect(&p[i + 1..], &adj[v as usize]);
            r.push(v);
            grow(adj, r, next, best);
            r.pop();
        }
    }
    let all: Vec<u32> = (0..v as u32).collect();
    grow(&g.adj, &mut Vec::new(), all, &mut best);
    let witness = best.iter().map(|&i| g.vector(alphabet, i)).collect();
    Ok((best.len(), witness))
}

/// True iff every pair in the set is orthogonal within `tol` (normalised).
pub fn pairwise_orthogonal(set: &[PhaseVector], tol: f64) -> bool {
    set.iter()
        .enumerate()
        .all(|(i, a)| set[i + 1..].iter().all(|b| a.overlap(b).norm() <= tol))
}
