//! Second-order memory dissipator in the trap-free co-moving frame.
//!
//! With sigma(t) = G(t)^dag rho(t) G(t) and G the trap-free propagator,
//! the dissipator of the master equation becomes
//!
//! ```text
//! D sigma = - sum_a [ S~_a(t), Lambda~_a(t) sigma - sigma Lambda~_a(t)^dag ]
//! ```
//!
//! where S~_a(t) = G^dag S_a G and Lambda~_a(t) = int_0^t ds C_a(s) S~_a(t-s).
//! System operators are |n><n| per site (kernel C_z) and the X/Y
//! quadratures per edge (kernels C_X, C_Y); cross-correlations vanish.
//! The memory integral is a trapezoid sum on the evolution grid, frozen
//! at the start of each step.
//!
//! Two interchangeable engines build the lag integrals: a direct
//! convolution over the propagator history (any telegraph drive), and an
//! incremental phase-accumulator scheme in the eigenbasis of a constant
//! Hamiltonian that avoids the O(k) sum per step.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use super::propagator::{CMat, CVec, HermitianEig};
use crate::bath::BathKernels;
use crate::graphs::Graph;

/// One dissipation channel frozen at a step: S~ = sum_r L_r R_r^dag
/// (rank at most 2) plus the dense lag operator.
pub struct ChannelOp {
    pub terms: Vec<(CVec, CVec)>,
    pub lambda: CMat,
}

/// Accumulate D sigma into `out` for the frozen channels.
///
/// Stage inputs are Hermitian, so sigma Lambda^dag = (Lambda sigma)^dag.
pub fn apply_dissipator(out: &mut CMat, sigma: &CMat, channels: &[ChannelOp]) {
    let n = sigma.nrows();
    for ch in channels {
        let p = ch.lambda.dot(sigma);
        // m = Lambda sigma - (Lambda sigma)^dag, anti-Hermitian
        let mut m = Array2::<C64>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                m[[i, j]] = p[[i, j]] - p[[j, i]].conj();
            }
        }
        for (l, r) in &ch.terms {
            // -[S, M] with S = L R^dag: -(L (R^dag M) - (M L) R^dag)
            let mut rm = vec![C64::new(0.0, 0.0); n];
            let mut ml = vec![C64::new(0.0, 0.0); n];
            for i in 0..n {
                let ri = r[i].conj();
                for j in 0..n {
                    rm[j] += ri * m[[i, j]];
                    ml[i] += m[[i, j]] * l[j];
                }
            }
            for i in 0..n {
                for j in 0..n {
                    out[[i, j]] -= l[i] * rm[j] - ml[i] * r[j].conj();
                }
            }
        }
    }
}

fn all_zero(kernel: &[C64]) -> bool {
    kernel.iter().all(|c| c.re == 0.0 && c.im == 0.0)
}

/// Which channels actually contribute for the tabulated kernels.
struct ActiveChannels {
    sites: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

impl ActiveChannels {
    fn new(graph: &Graph, kernels: &BathKernels) -> Self {
        let sites = if all_zero(&kernels.c_z) {
            Vec::new()
        } else {
            (0..graph.n_nodes()).collect()
        };
        let edges = if all_zero(&kernels.c_x) && all_zero(&kernels.c_y) {
            Vec::new()
        } else {
            graph.edges().to_vec()
        };
        ActiveChannels { sites, edges }
    }

    fn is_empty(&self) -> bool {
        self.sites.is_empty() && self.edges.is_empty()
    }
}

/// Direct-convolution engine for a time-dependent drive. The caller
/// pushes the cumulative trap-free propagator G(t_k) at every grid point.
pub struct GeneralBath<'a> {
    kernels: &'a BathKernels,
    active: ActiveChannels,
    history: Vec<CMat>,
}

impl<'a> GeneralBath<'a> {
    /// `g0` is the propagator at t = 0 (the identity).
    pub fn new(kernels: &'a BathKernels, graph: &Graph, g0: CMat) -> Option<Self> {
        let active = ActiveChannels::new(graph, kernels);
        if active.is_empty() {
            return None;
        }
        Some(GeneralBath {
            kernels,
            active,
            history: vec![g0],
        })
    }

    pub fn push_propagator(&mut self, g: CMat) {
        self.history.push(g);
    }

    /// Channel operators frozen at grid step `k` (requires the history
    /// to contain G_0..G_k).
    pub fn channel_ops(&self, k: usize) -> Vec<ChannelOp> {
        assert!(k < self.history.len());
        let n = self.history[0].nrows();
        let h = self.kernels.grid.step();
        let g_k = &self.history[k];
        let mut ops = Vec::with_capacity(self.active.sites.len() + 2 * self.active.edges.len());

        let conj_row = |g: &CMat, a: usize| -> CVec { g.row(a).mapv(|z| z.conj()) };

        for &a in &self.active.sites {
            let mut lambda = Array2::<C64>::zeros((n, n));
            for m in 0..=k {
                let w = if k > 0 && (m == 0 || m == k) { 0.5 } else { 1.0 };
                let coeff = self.kernels.c_z[k - m] * (h * w);
                if coeff.norm_sqr() == 0.0 {
                    continue;
                }
                let row = self.history[m].row(a);
                let ga = row.as_slice().expect("standard layout");
                for i in 0..n {
                    let ui = ga[i].conj() * coeff;
                    for j in 0..n {
                        // u u^dag with u = conj(row_a G_m)
                        lambda[[i, j]] += ui * ga[j];
                    }
                }
            }
            if k == 0 {
                lambda.fill(C64::new(0.0, 0.0));
            }
            let u = conj_row(g_k, a);
            ops.push(ChannelOp {
                terms: vec![(u.clone(), u)],
                lambda,
            });
        }

        for &(a, b) in &self.active.edges {
            let mut lam_x = Array2::<C64>::zeros((n, n));
            let mut lam_y = Array2::<C64>::zeros((n, n));
            if k > 0 {
                for m in 0..=k {
                    let w = if m == 0 || m == k { 0.5 } else { 1.0 };
                    let cx = self.kernels.c_x[k - m] * (h * w);
                    let cy = self.kernels.c_y[k - m] * (C64::i() * (h * w));
                    let ga = self.history[m].row(a);
                    let gb = self.history[m].row(b);
                    let ga = ga.as_slice().expect("standard layout");
                    let gb = gb.as_slice().expect("standard layout");
                    for i in 0..n {
                        let uai = ga[i].conj();
                        let ubi = gb[i].conj();
                        for j in 0..n {
                            // z = (u_a u_b^dag)[i,j], zt = (u_b u_a^dag)[i,j]
                            let z = uai * gb[j];
                            let zt = ubi * ga[j];
                            lam_x[[i, j]] += cx * (z + zt);
                            lam_y[[i, j]] += cy * (z - zt);
                        }
                    }
                }
            }
            let u = conj_row(g_k, a);
            let v = conj_row(g_k, b);
            let iu: CVec = u.mapv(|z| z * C64::i());
            let miv: CVec = v.mapv(|z| -z * C64::i());
            ops.push(ChannelOp {
                terms: vec![(u.clone(), v.clone()), (v.clone(), u.clone())],
                lambda: lam_x,
            });
            ops.push(ChannelOp {
                terms: vec![(iu, v), (miv, u)],
                lambda: lam_y,
            });
        }
        ops
    }
}

enum KernelId {
    Z,
    X,
    Y,
}

struct FastChannel {
    kernel: KernelId,
    /// Base operator in the eigenbasis at t = 0.
    s_hat: CMat,
    base_terms: Vec<(CVec, CVec)>,
}

/// Incremental engine for a constant Hamiltonian, working in its
/// eigenbasis. S~(t) picks up elementwise phases e^{i w_ij t}, so the
/// trapezoid lag sum reduces to running kernel accumulators.
pub struct FastBath<'a> {
    kernels: &'a BathKernels,
    channels: Vec<FastChannel>,
    /// e^{-i w_ij h} per element.
    e_step: CMat,
    /// e^{-i w_ij t_k}.
    e_cur: CMat,
    r_z: CMat,
    r_x: CMat,
    r_y: CMat,
    k: usize,
}

impl<'a> FastBath<'a> {
    pub fn new(kernels: &'a BathKernels, graph: &Graph, eig: &HermitianEig) -> Option<Self> {
        let active = ActiveChannels::new(graph, kernels);
        if active.is_empty() {
            return None;
        }
        let n = graph.n_nodes();
        let h = kernels.grid.step();
        let w = |a: usize| -> CVec { eig.vectors.row(a).mapv(|z| z.conj()) };

        let mut channels = Vec::new();
        for &a in &active.sites {
            let wa = w(a);
            let s_hat = outer_sum(&[(wa.clone(), wa.clone())]);
            channels.push(FastChannel {
                kernel: KernelId::Z,
                s_hat,
                base_terms: vec![(wa.clone(), wa)],
            });
        }
        for &(a, b) in &active.edges {
            let (wa, wb) = (w(a), w(b));
            let x_terms = vec![(wa.clone(), wb.clone()), (wb.clone(), wa.clone())];
            channels.push(FastChannel {
                kernel: KernelId::X,
                s_hat: outer_sum(&x_terms),
                base_terms: x_terms,
            });
            let iwa: CVec = wa.mapv(|z| z * C64::i());
            let miwb: CVec = wb.mapv(|z| -z * C64::i());
            let y_terms = vec![(iwa, wb.clone()), (miwb, wa.clone())];
            channels.push(FastChannel {
                kernel: KernelId::Y,
                s_hat: outer_sum(&y_terms),
                base_terms: y_terms,
            });
        }

        let mut e_step = Array2::<C64>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                e_step[[i, j]] = C64::from_polar(1.0, -(eig.values[i] - eig.values[j]) * h);
            }
        }
        let ones = Array2::<C64>::from_elem((n, n), C64::new(1.0, 0.0));
        let r_z = &ones * kernels.c_z[0];
        let r_x = &ones * kernels.c_x[0];
        let r_y = &ones * kernels.c_y[0];
        Some(FastBath {
            kernels,
            channels,
            e_step,
            e_cur: ones,
            r_z,
            r_x,
            r_y,
            k: 0,
        })
    }

    /// Move the accumulators from grid step k to k+1.
    pub fn advance(&mut self) {
        self.k += 1;
        let k = self.k;
        self.e_cur = &self.e_cur * &self.e_step;
        self.r_z = &self.r_z + &(&self.e_cur * self.kernels.c_z[k]);
        self.r_x = &self.r_x + &(&self.e_cur * self.kernels.c_x[k]);
        self.r_y = &self.r_y + &(&self.e_cur * self.kernels.c_y[k]);
    }

    /// Channel operators frozen at the current grid step; `phase` is
    /// e^{i lambda t_k} per eigenvalue.
    pub fn channel_ops(&self, phase: &CVec) -> Vec<ChannelOp> {
        let n = self.e_cur.nrows();
        let h = self.kernels.grid.step();
        let k = self.k;
        self.channels
            .iter()
            .map(|ch| {
                let (r_acc, c0, ck) = match ch.kernel {
                    KernelId::Z => (&self.r_z, self.kernels.c_z[0], self.kernels.c_z[k]),
                    KernelId::X => (&self.r_x, self.kernels.c_x[0], self.kernels.c_x[k]),
                    KernelId::Y => (&self.r_y, self.kernels.c_y[0], self.kernels.c_y[k]),
                };
                let mut lambda = Array2::<C64>::zeros((n, n));
                if k > 0 {
                    let half = C64::new(0.5, 0.0);
                    for i in 0..n {
                        for j in 0..n {
                            let e = self.e_cur[[i, j]];
                            // trapezoid lag sum via the running full sum
                            let t = e.conj() * (r_acc[[i, j]] - half * c0 - half * ck * e);
                            lambda[[i, j]] = ch.s_hat[[i, j]] * t * h;
                        }
                    }
                }
                let terms = ch
                    .base_terms
                    .iter()
                    .map(|(l, r)| (l * phase, r * phase))
                    .collect();
                ChannelOp { terms, lambda }
            })
            .collect()
    }
}

fn outer_sum(terms: &[(CVec, CVec)]) -> CMat {
    let n = terms[0].0.len();
    let mut m = Array2::<C64>::zeros((n, n));
    for (l, r) in terms {
        for i in 0..n {
            for j in 0..n {
                m[[i, j]] += l[i] * r[j].conj();
            }
        }
    }
    m
}
