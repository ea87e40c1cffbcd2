use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use super::{tolerance_met, Estimate, QuadSettings};

// Kronrod abscissae on [-1, 1]; odd indices are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Nodes and weights of the 15-point Kronrod rule on [-1, 1], plus the
/// embedded 7-point Gauss weights (zero at non-Gauss nodes).
pub fn gk15_rule() -> ([f64; 15], [f64; 15], [f64; 15]) {
    let mut x = [0.0; 15];
    let mut wk = [0.0; 15];
    let mut wg = [0.0; 15];
    for j in 0..7 {
        x[j] = -XGK[j];
        x[14 - j] = XGK[j];
        wk[j] = WGK[j];
        wk[14 - j] = WGK[j];
        if j % 2 == 1 {
            wg[j] = WG[j / 2];
            wg[14 - j] = WG[j / 2];
        }
    }
    x[7] = 0.0;
    wk[7] = WGK[7];
    wg[7] = WG[3];
    (x, wk, wg)
}

struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
    resabs: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        // largest error first; ties go to the leftmost segment
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn qk15_component(fk: &[f64; 15], half: f64) -> (f64, f64, f64) {
    let mut resk = 0.0;
    let mut resg = 0.0;
    let mut resabs = 0.0;
    for (j, &v) in fk.iter().enumerate() {
        let idx = j.min(14 - j);
        resk += WGK[idx] * v;
        resabs += WGK[idx] * v.abs();
        if idx % 2 == 1 || idx == 7 {
            resg += WG[idx / 2] * v;
        }
    }
    let mean = resk * 0.5;
    let resasc: f64 = fk
        .iter()
        .enumerate()
        .map(|(j, &v)| WGK[j.min(14 - j)] * (v - mean).abs())
        .sum();
    let result = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (result, err, resabs)
}

fn qk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Segment {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut re = [0.0; 15];
    let mut im = [0.0; 15];
    for j in 0..15 {
        let x = match j.cmp(&7) {
            Ordering::Less => centre - half * XGK[j],
            Ordering::Equal => centre,
            Ordering::Greater => centre + half * XGK[14 - j],
        };
        let v = f(x);
        re[j] = v.re;
        im[j] = v.im;
    }
    let (vr, er, ar) = qk15_component(&re, half);
    let (vi, ei, ai) = qk15_component(&im, half);
    Segment {
        a,
        b,
        value: Complex64::new(vr, vi),
        err: er.hypot(ei),
        resabs: ar + ai,
    }
}

/// Globally adaptive Gauss-Kronrod (7/15) integration of a complex integrand
/// on [lo, hi]. Interior breakpoints seed the initial partition.
pub fn integrate_1d<F>(
    f: F,
    lo: f64,
    hi: f64,
    breakpoints: &[f64],
    settings: &QuadSettings,
) -> Estimate
where
    F: Fn(f64) -> Complex64,
{
    if lo == hi {
        return Estimate::zero();
    }
    let (a, b, sign) = if lo < hi {
        (lo, hi, 1.0)
    } else {
        (hi, lo, -1.0)
    };

    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|p| p.is_finite() && *p > a && *p < b)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Segment> = Vec::new();
    let mut left = a;
    for &c in cuts.iter().chain(std::iter::once(&b)) {
        heap.push(qk15(&f, left, c));
        left = c;
    }
    let mut evals = 15 * heap.len() as u64;

    let totals = |heap: &BinaryHeap<Segment>, frozen: &[Segment]| {
        let mut v = Complex64::new(0.0, 0.0);
        let mut e = 0.0;
        let mut abs = 0.0;
        for s in heap.iter().chain(frozen.iter()) {
            v += s.value;
            e += s.err;
            abs += s.resabs;
        }
        (v, e, abs)
    };

    let (mut value, mut err, mut resabs) = totals(&heap, &frozen);
    let mut converged = false;
    loop {
        // per-segment errors bottom out at 50·eps·resabs; allow rounding in the sum
        let floor = 100.0 * f64::EPSILON * resabs;
        if tolerance_met(err, value, settings) || err <= floor {
            converged = true;
            break;
        }
        if evals as usize + 30 > settings.max_evals {
            break;
        }
        let Some(worst) = heap.pop() else {
            break;
        };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b)
            || (worst.b - worst.a) < 1e-14 * worst.a.abs().max(worst.b.abs())
        {
            frozen.push(worst);
            if heap.is_empty() {
                break;
            }
            continue;
        }
        let l = qk15(&f, worst.a, mid);
        let r = qk15(&f, mid, worst.b);
        evals += 30;
        value += l.value + r.value - worst.value;
        err += l.err + r.err - worst.err;
        resabs += l.resabs + r.resabs - worst.resabs;
        heap.push(l);
        heap.push(r);
        if evals.is_multiple_of(3000) {
            // resum to stop drift in the running totals
            (value, err, resabs) = totals(&heap, &frozen);
        }
    }
    let mut segs: Vec<Segment> = heap.into_vec();
    segs.append(&mut frozen);
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut v = Complex64::new(0.0, 0.0);
    let mut e = 0.0;
    for s in &segs {
        v += s.value;
        e += s.err;
    }
    Estimate {
        value: v * sign,
        err: e,
        evals,
        converged,
    }
}
