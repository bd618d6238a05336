/// 1/phi
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy)]
pub struct GoldenSection {
    /// Absolute width at which the bracket is considered converged.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for GoldenSection {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 500,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

impl GoldenSection {
    /// Minimizes a unimodal `f` on `[lo, hi]`. The returned point is the
    /// best evaluated point, endpoints included.
    pub fn minimize<F>(&self, mut f: F, lo: f64, hi: f64) -> Minimum
    where
        F: FnMut(f64) -> f64,
    {
        let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let mut c = b - INV_PHI * (b - a);
        let mut d = a + INV_PHI * (b - a);
        let mut fc = f(c);
        let mut fd = f(d);
        let mut iterations = 0;
        while (b - a) > self.tol && iterations < self.max_iter {
            if fc <= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - INV_PHI * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + INV_PHI * (b - a);
                fd = f(d);
            }
            iterations += 1;
        }
        let mut best = if fc <= fd { (c, fc) } else { (d, fd) };
        for x in [lo, hi] {
            let v = f(x);
            if v < best.1 {
                best = (x, v);
            }
        }
        Minimum {
            x: best.0,
            value: best.1,
            iterations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola() {
        let m = GoldenSection::default().minimize(|x| (x - 1.3).powi(2) + 2.0, -4.0, 9.0);
        assert!((m.x - 1.3).abs() < 1e-7);
        assert!((m.value - 2.0).abs() < 1e-14);
    }

    #[test]
    fn monotone_function_hits_endpoint() {
        let m = GoldenSection::default().minimize(|x| -x, 0.0, 3.0);
        assert_eq!(m.x, 3.0);
    }

    #[test]
    fn reversed_bracket() {
        let m = GoldenSection::default().minimize(|x| (x + 0.5).abs(), 2.0, -2.0);
        assert!((m.x + 0.5).abs() < 1e-10);
    }
}
