//! Executable permanent-to-T-Plot reduction: brute-force permanents, the
//! routing construction that plants a 0-1 matrix into f(e), and the checker
//! for Perm(A) = n! * EC_PDF(e, f, n/c(e)).

use crate::error::{Error, Result};
use crate::net::{classify_edges, Network, Routing};
use crate::stats::{exact_tplot_permutations, PlotData, PlotTarget};
use rand::Rng;

/// An n x n matrix with entries in {0, 1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroOneMatrix {
    n: usize,
    data: Vec<u8>,
}

impl ZeroOneMatrix {
    pub fn from_entries(n: usize, entries: Vec<u8>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::Structural(format!(
                "expected {} entries, got {}",
                n * n,
                entries.len()
            )));
        }
        if entries.iter().any(|&x| x > 1) {
            return Err(Error::Structural("entries must be 0 or 1".into()));
        }
        Ok(ZeroOneMatrix { n, data: entries })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0u8; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        ZeroOneMatrix { n, data }
    }

    pub fn ones(n: usize) -> Self {
        ZeroOneMatrix { n, data: vec![1u8; n * n] }
    }

    pub fn zeros(n: usize) -> Self {
        ZeroOneMatrix { n, data: vec![0u8; n * n] }
    }

    pub fn random(rng: &mut impl Rng, n: usize, density: f64, zero_diagonal: bool) -> Self {
        let mut data = vec![0u8; n * n];
        for i in 0..n {
            for j in 0..n {
                if zero_diagonal && i == j {
                    continue;
                }
                data[i * n + j] = u8::from(rng.random::<f64>() < density);
            }
        }
        ZeroOneMatrix { n, data }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u8) {
        assert!(v <= 1);
        self.data[i * self.n + j] = v;
    }

    /// Apply row permutation `rho` and column permutation `gamma`:
    /// B[i][j] = A[rho(i)][gamma(j)].
    pub fn permute(&self, rho: &[usize], gamma: &[usize]) -> Self {
        let n = self.n;
        let mut data = vec![0u8; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = self.get(rho[i], gamma[j]);
            }
        }
        ZeroOneMatrix { n, data }
    }
}

/// Exact permanent by row-wise recursion with column masking; n <= 10.
pub fn permanent_bruteforce(a: &ZeroOneMatrix) -> Result<u64> {
    let n = a.n();
    if n > 10 {
        return Err(Error::OverLimit {
            n,
            limit: 10,
            hint: "permanent enumeration costs up to n! products".into(),
        });
    }
    fn rec(a: &ZeroOneMatrix, row: usize, used: u32) -> u64 {
        if row == a.n() {
            return 1;
        }
        let mut count = 0;
        for j in 0..a.n() {
            if used & (1 << j) == 0 && a.get(row, j) == 1 {
                count += rec(a, row + 1, used | (1 << j));
            }
        }
        count
    }
    Ok(rec(a, 0, 0))
}

/// Build an oblivious routing with f_sd(e) = A_sd for every (s, d).
///
/// Commodities with A_sd = 1 follow a walk: a shortest path s -> tail(e) in
/// the graph without e, then e itself, then a shortest path head(e) -> d that
/// additionally avoids the first leg's edges (so fractions stay within 0/1).
/// Commodities with A_sd = 0 (s != d) avoid e entirely. A diagonal A_ss = 1
/// becomes a circulation through e.
pub fn reduction_routing(net: &Network, edge: usize, a: &ZeroOneMatrix) -> Result<Routing> {
    let n = net.n();
    if a.n() != n {
        return Err(Error::Structural("matrix dimension does not match network".into()));
    }
    if classify_edges(net).bridges.contains(&edge) {
        return Err(Error::InvalidArgument(format!(
            "edge `{}` is a bridge; the construction needs a non-bridge edge",
            net.edges()[edge].id
        )));
    }
    let tail = net.edges()[edge].from;
    let head = net.edges()[edge].to;
    let mut paths: Vec<(usize, usize, Vec<usize>, f64)> = Vec::new();
    for s in 0..n {
        for d in 0..n {
            if a.get(s, d) == 0 {
                if s != d {
                    let p = bfs_path(net, s, d, &[edge]).ok_or_else(|| unreachable_err(net, s, d))?;
                    paths.push((s, d, p, 1.0));
                }
                continue;
            }
            let leg1 = if s == tail {
                Vec::new()
            } else {
                bfs_path(net, s, tail, &[edge]).ok_or_else(|| unreachable_err(net, s, tail))?
            };
            let leg2 = if d == head {
                Vec::new()
            } else {
                let mut avoid = vec![edge];
                avoid.extend_from_slice(&leg1);
                match bfs_path(net, head, d, &avoid) {
                    Some(p) => p,
                    // fall back to any e-avoiding path; overlap with leg1
                    // would push a fraction past 1, which from_paths rejects
                    None => bfs_path(net, head, d, &[edge])
                        .ok_or_else(|| unreachable_err(net, head, d))?,
                }
            };
            let mut walk = leg1;
            walk.push(edge);
            walk.extend(leg2);
            paths.push((s, d, walk, 1.0));
        }
    }
    Routing::from_paths(net, paths)
}

fn unreachable_err(net: &Network, s: usize, d: usize) -> Error {
    Error::UnreachablePair {
        src: net.nodes()[s].id.clone(),
        dst: net.nodes()[d].id.clone(),
    }
}

/// Shortest path by edge count from `s` to `d` avoiding `avoid`; edge list.
fn bfs_path(net: &Network, s: usize, d: usize, avoid: &[usize]) -> Option<Vec<usize>> {
    if s == d {
        return Some(Vec::new());
    }
    let n = net.n();
    let mut prev: Vec<Option<usize>> = vec![None; n]; // incoming edge
    let mut seen = vec![false; n];
    seen[s] = true;
    let mut queue = std::collections::VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        for &e in net.out_edges(v) {
            if avoid.contains(&e) {
                continue;
            }
            let u = net.edges()[e].to;
            if !seen[u] {
                seen[u] = true;
                prev[u] = Some(e);
                if u == d {
                    let mut path = Vec::new();
                    let mut cur = d;
                    while cur != s {
                        let e = prev[cur].unwrap();
                        path.push(e);
                        cur = net.edges()[e].from;
                    }
                    path.reverse();
                    return Some(path);
                }
                queue.push_back(u);
            }
        }
    }
    None
}

/// Both sides of the permanent identity at load level L = n/c(e).
#[derive(Debug, Clone)]
pub struct ReductionCheck {
    pub permanent: u64,
    /// n! times the PDF mass at L, i.e. the number of permutations with
    /// EC(e, f, sigma) = L.
    pub scaled_pdf_mass: u64,
    pub load_level: f64,
    pub equal: bool,
}

/// Verify Perm(A) = n! * EC_PDF(e, f, L) with the constructed routing and an
/// exact permutation T-Plot; n <= 8.
pub fn verify_reduction(net: &Network, edge: usize, a: &ZeroOneMatrix) -> Result<ReductionCheck> {
    let n = net.n();
    if n > 8 {
        return Err(Error::OverLimit { n, limit: 8, hint: "reduction check enumerates n!".into() });
    }
    let permanent = permanent_bruteforce(a)?;
    let routing = reduction_routing(net, edge, a)?;
    let tp = exact_tplot_permutations(net, &routing, PlotTarget::Edge(edge), false)?;
    let load_level = n as f64 / net.edges()[edge].capacity;
    let scaled_pdf_mass = match &tp.data {
        PlotData::Atoms(atoms) => atoms
            .iter()
            .find(|&&(v, _)| v == load_level)
            .map(|&(_, c)| c)
            .unwrap_or(0),
        _ => unreachable!("exact plots store atoms"),
    };
    Ok(ReductionCheck {
        permanent,
        scaled_pdf_mass,
        load_level,
        equal: permanent == scaled_pdf_mass,
    })
}
