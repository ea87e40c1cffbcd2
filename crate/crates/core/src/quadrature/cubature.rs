use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use super::{tolerance_met, Estimate, QuadSettings};

struct Region {
    lower: Vec<f64>,
    upper: Vec<f64>,
    value: Complex64,
    err: f64,
    resabs: f64,
    split_axis: usize,
    order: u64,
}

impl PartialEq for Region {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Region {}
impl PartialOrd for Region {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Region {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.order.cmp(&self.order))
    }
}

struct GenzMalik {
    dim: usize,
    l2: f64,
    l3: f64,
    l4: f64,
    l5: f64,
    w7: [f64; 5],
    w5: [f64; 4],
    ratio: f64,
}

impl GenzMalik {
    fn new(dim: usize) -> Self {
        let m = dim as f64;
        GenzMalik {
            dim,
            l2: (9.0f64 / 70.0).sqrt(),
            l3: (9.0f64 / 10.0).sqrt(),
            l4: (9.0f64 / 10.0).sqrt(),
            l5: (9.0f64 / 19.0).sqrt(),
            w7: [
                (12824.0 - 9120.0 * m + 400.0 * m * m) / 19683.0,
                980.0 / 6561.0,
                (1820.0 - 400.0 * m) / 19683.0,
                200.0 / 19683.0,
                6859.0 / 19683.0 / 2f64.powi(dim as i32),
            ],
            w5: [
                (729.0 - 950.0 * m + 50.0 * m * m) / 729.0,
                245.0 / 486.0,
                (265.0 - 100.0 * m) / 1458.0,
                25.0 / 729.0,
            ],
            ratio: (9.0 / 70.0) / (9.0 / 10.0),
        }
    }

    fn evaluate<F: Fn(&[f64]) -> Complex64>(
        &self,
        f: &F,
        lower: &[f64],
        upper: &[f64],
        order: u64,
    ) -> (Region, u64) {
        let n = self.dim;
        let c: Vec<f64> = (0..n).map(|i| 0.5 * (lower[i] + upper[i])).collect();
        let h: Vec<f64> = (0..n).map(|i| 0.5 * (upper[i] - lower[i])).collect();
        let volume: f64 = h.iter().map(|x| 2.0 * x).product();
        let mut p = c.clone();
        let mut evals = 0u64;
        let mut eval = |p: &[f64]| {
            evals += 1;
            f(p)
        };

        let f0 = eval(&c);
        let mut mag = self.w7[0].abs() * f0.norm();
        let mut s2 = Complex64::new(0.0, 0.0);
        let mut s3 = Complex64::new(0.0, 0.0);
        let mut best_axis = 0;
        let mut best_diff = -1.0;
        for i in 0..n {
            p[i] = c[i] - self.l2 * h[i];
            let a = eval(&p);
            p[i] = c[i] + self.l2 * h[i];
            let b = eval(&p);
            p[i] = c[i] - self.l3 * h[i];
            let d = eval(&p);
            p[i] = c[i] + self.l3 * h[i];
            let e = eval(&p);
            p[i] = c[i];
            s2 += a + b;
            s3 += d + e;
            mag +=
                self.w7[1].abs() * (a.norm() + b.norm()) + self.w7[2].abs() * (d.norm() + e.norm());
            let diff = ((a + b - 2.0 * f0) - self.ratio * (d + e - 2.0 * f0)).norm();
            // strict comparison keeps the lowest axis on ties
            if diff > best_diff {
                best_diff = diff;
                best_axis = i;
            }
        }
        let mut s4 = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in (i + 1)..n {
                for (si, sj) in [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)] {
                    p[i] = c[i] + si * self.l4 * h[i];
                    p[j] = c[j] + sj * self.l4 * h[j];
                    let v = eval(&p);
                    s4 += v;
                    mag += self.w7[3] * v.norm();
                }
                p[i] = c[i];
                p[j] = c[j];
            }
        }
        let mut s5 = Complex64::new(0.0, 0.0);
        for mask in 0..(1u32 << n) {
            for i in 0..n {
                let sgn = if mask & (1 << i) != 0 { 1.0 } else { -1.0 };
                p[i] = c[i] + sgn * self.l5 * h[i];
            }
            let v = eval(&p);
            s5 += v;
            mag += self.w7[4] * v.norm();
        }
        let i7 = (f0 * self.w7[0]
            + s2 * self.w7[1]
            + s3 * self.w7[2]
            + s4 * self.w7[3]
            + s5 * self.w7[4])
            * volume;
        let i5 = (f0 * self.w5[0] + s2 * self.w5[1] + s3 * self.w5[2] + s4 * self.w5[3]) * volume;
        let region = Region {
            lower: lower.to_vec(),
            upper: upper.to_vec(),
            value: i7,
            err: (i7 - i5).norm(),
            resabs: mag * volume.abs(),
            split_axis: best_axis,
            order,
        };
        (region, evals)
    }
}

/// Genz-Malik degree-7/5 adaptive cubature on a 2D or 3D box.
pub fn integrate_cubature<F>(
    f: F,
    lower: &[f64],
    upper: &[f64],
    settings: &QuadSettings,
) -> Estimate
where
    F: Fn(&[f64]) -> Complex64,
{
    let rule = GenzMalik::new(lower.len());
    let mut counter = 0u64;
    let (first, mut evals) = rule.evaluate(&f, lower, upper, counter);
    let per_region = evals;
    let mut value = first.value;
    let mut err = first.err;
    let mut resabs = first.resabs;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut converged = false;
    loop {
        if tolerance_met(err, value, settings) || err <= 50.0 * f64::EPSILON * resabs {
            converged = true;
            break;
        }
        if (evals + 2 * per_region) as usize > settings.max_evals {
            break;
        }
        let worst = heap.pop().expect("heap never empties");
        let axis = worst.split_axis;
        let mid = 0.5 * (worst.lower[axis] + worst.upper[axis]);
        let mut upper_left = worst.upper.clone();
        upper_left[axis] = mid;
        let mut lower_right = worst.lower.clone();
        lower_right[axis] = mid;
        counter += 1;
        let (l, el) = rule.evaluate(&f, &worst.lower, &upper_left, counter);
        counter += 1;
        let (r, er) = rule.evaluate(&f, &lower_right, &worst.upper, counter);
        evals += el + er;
        value += l.value + r.value - worst.value;
        err += l.err + r.err - worst.err;
        resabs += l.resabs + r.resabs - worst.resabs;
        heap.push(l);
        heap.push(r);
    }
    let mut regions = heap.into_vec();
    regions.sort_by_key(|r| r.order);
    let mut v = Complex64::new(0.0, 0.0);
    let mut e = 0.0;
    for r in &regions {
        v += r.value;
        e += r.err;
    }
    Estimate {
        value: v,
        err: e,
        evals,
        converged,
    }
}
