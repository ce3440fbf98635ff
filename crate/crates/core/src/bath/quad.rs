//! Adaptive Gauss-Kronrod (G7, K15) quadrature on a finite interval.

use crate::{Error, Result};

// K15 abscissae on [0, 1] side of the symmetric rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_17,
    0.207_784_955_007_898_47,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// G7 weights, matching the odd-indexed K15 abscissae.
const WG: [f64; 4] = [
    0.129_484_966_168_869_69,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kronrod = WGK[7] * f(c);
    let mut gauss = WG[3] * f(c);
    for i in 0..7 {
        let dx = h * XGK[i];
        let fsum = f(c - dx) + f(c + dx);
        kronrod += WGK[i] * fsum;
        if i % 2 == 1 {
            gauss += WG[i / 2] * fsum;
        }
    }
    let integral = kronrod * h;
    let err = ((kronrod - gauss) * h).abs();
    (integral, err)
}

/// Integrate `f` on [a, b] to absolute tolerance `tol`, bisecting the
/// worst panel first. `seeds` pre-splits the interval (useful when the
/// integrand has known structure); pass `&[]` for a single panel.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    seeds: &[f64],
) -> Result<f64> {
    if !(b > a) {
        return Err(Error::invalid(format!("bad interval [{a}, {b}]")));
    }
    let mut cuts: Vec<f64> = std::iter::once(a)
        .chain(seeds.iter().copied().filter(|&s| s > a && s < b))
        .chain(std::iter::once(b))
        .collect();
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());

    // (err, a, b, value) max-heap by error
    let mut heap: std::collections::BinaryHeap<Panel> = cuts
        .windows(2)
        .map(|w| {
            let (v, e) = panel(&f, w[0], w[1]);
            Panel {
                err: e,
                a: w[0],
                b: w[1],
                value: v,
            }
        })
        .collect();

    const MAX_PANELS: usize = 4000;
    let mut n_panels = heap.len();
    loop {
        let total_err: f64 = heap.iter().map(|p| p.err).sum();
        if total_err <= tol {
            let value = heap.iter().map(|p| p.value).sum();
            return Ok(value);
        }
        if n_panels >= MAX_PANELS {
            return Err(Error::numeric(
                "quadrature",
                format!(
                    "no convergence after {n_panels} panels on [{a}, {b}]: error {total_err:.3e} > tol {tol:.3e}"
                ),
            ));
        }
        let worst = heap.pop().expect("heap cannot be empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::numeric(
                "quadrature",
                format!("panel [{}, {}] cannot be split further", worst.a, worst.b),
            ));
        }
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (v, e) = panel(&f, lo, hi);
            heap.push(Panel {
                err: e,
                a: lo,
                b: hi,
                value: v,
            });
        }
        n_panels += 1;
    }
}

struct Panel {
    err: f64,
    a: f64,
    b: f64,
    value: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err
            .partial_cmp(&other.err)
            .unwrap_or(std::cmp::Ordering::Equal)
    }
}
