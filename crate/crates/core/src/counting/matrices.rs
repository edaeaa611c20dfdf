//! Integer matrices `(a b; c d)` of determinant `n`, `0 <= c = 0 mod N`,
//! moving `z` a small hyperbolic distance.

use num_integer::Integer;
use serde::Serialize;

use crate::arith::{divisors, SquarefreeModulus};
use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Matrix {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl Matrix {
    pub fn det(&self) -> i128 {
        self.a as i128 * self.d as i128 - self.b as i128 * self.c as i128
    }
}

#[derive(Debug, Clone)]
pub struct MatrixCountInstance {
    pub x: f64,
    pub y: f64,
    pub n: i64,
    pub level: SquarefreeModulus,
    pub delta: f64,
    pub box_cap: u128,
}

pub const DELTA_CAP: f64 = 1e4;

impl MatrixCountInstance {
    pub fn new(x: f64, y: f64, n: i64, level: SquarefreeModulus, delta: f64) -> Result<Self> {
        if !(y > 0.0) || !x.is_finite() {
            return domain("z must lie in the upper half-plane");
        }
        if n < 1 || !level.is_coprime(n as i128) {
            return domain("n must be positive and coprime to N");
        }
        if !(delta >= 0.0) || delta > DELTA_CAP {
            return domain("delta must lie in [0, 1e4]");
        }
        Ok(Self { x, y, n, level, delta, box_cap: super::DEFAULT_BOX_CAP })
    }

    /// `u(z, gz) = |c z^2 + (d - a) z - b|^2 / (4 n y^2)`.
    pub fn u_of(&self, g: &Matrix) -> f64 {
        let (x, y) = (self.x, self.y);
        let (a, b, c, d) = (g.a as f64, g.b as f64, g.c as f64, g.d as f64);
        let re = c * (x * x - y * y) + (d - a) * x - b;
        let im = 2.0 * c * x * y + (d - a) * y;
        (re * re + im * im) / (4.0 * self.n as f64 * y * y)
    }

    pub fn in_family(&self, g: &Matrix) -> bool {
        g.det() == self.n as i128
            && g.c >= 0
            && g.c % self.level.value() as i64 == 0
            && (g.c > 0 || g.a > 0)
    }

    fn accepts(&self, g: &Matrix) -> bool {
        self.in_family(g) && self.u_of(g) < self.delta
    }

    /// `e^D` for the hyperbolic radius `D` of the ball `u < delta`.
    fn exp_radius(&self) -> f64 {
        let ch = 1.0 + 2.0 * self.delta;
        ch + (ch * ch - 1.0).sqrt()
    }

    /// Entry bound containing every solution; the naive search must reach it.
    pub fn entry_bound(&self) -> f64 {
        let e = self.exp_radius();
        let nf = self.n as f64;
        let r = (nf * e).sqrt();
        let z_abs = self.x.hypot(self.y);
        let c_max = r / self.y;
        let d_max = r + c_max * self.x.abs();
        let a_max = c_max * z_abs + r + 2.0 * c_max * self.y * (self.delta * e).sqrt();
        let gz_abs = z_abs + 2.0 * self.y * (self.delta * e).sqrt();
        let b_max = gz_abs * r + a_max * z_abs;
        let b0 = 2.0 * nf * self.x.abs() + 2.0 * self.y * (nf * self.delta).sqrt();
        c_max.max(d_max).max(a_max).max(nf).max(b_max).max(b0) + 1.0
    }
}

fn cap_check(needed: f64, cap: u128) -> Result<()> {
    if needed > cap as f64 {
        return Err(Error::ResourceCap { what: "matrix search box".into(), needed: needed as u128, cap });
    }
    Ok(())
}

/// All members with `u(z, gz) < delta`, in lexicographic `(a, b, c, d)` order.
pub fn enumerate_r_n_matrices(inst: &MatrixCountInstance) -> Result<Vec<Matrix>> {
    let (x, y) = (inst.x, inst.y);
    let nf = inst.n as f64;
    let e = inst.exp_radius();
    let r = (nf * e).sqrt();
    let step = inst.level.value() as i64;
    let c_max = (r / y).floor() as i64;
    cap_check((c_max / step + 1) as f64 * (2.0 * r + 3.0), inst.box_cap)?;
    let mut out = Vec::new();

    // c = 0: a d = n, a > 0, then ((a - d) x - b)^2 + (a - d)^2 y^2 < 4 n delta y^2
    for a in divisors(inst.n as u64) {
        let a = a as i64;
        let d = inst.n / a;
        let w = 2.0 * y * (nf * inst.delta).sqrt() + 1.0;
        let centre = (d - a) as f64 * x;
        for b in (centre - w).floor() as i64..=(centre + w).ceil() as i64 {
            let g = Matrix { a, b, c: 0, d };
            if inst.accepts(&g) {
                out.push(g);
            }
        }
    }

    // c > 0: |cz + d|^2 <= n e^D and |a - Re(cz + n / (cz + d))| <= 2 c y sqrt(delta e^D)
    let mut c = step;
    while c <= c_max {
        let cf = c as f64;
        let dw = (r * r - (cf * y).powi(2)).max(0.0).sqrt();
        for d in (-cf * x - dw).floor() as i64 - 1..=(-cf * x + dw).ceil() as i64 + 1 {
            let (wr, wi) = (cf * x + d as f64, cf * y);
            let m2 = wr * wr + wi * wi;
            let centre = cf * x + nf * wr / m2;
            let half = 2.0 * (2.0 * cf * y * (inst.delta * e).sqrt()) + 1.0;
            for a in (centre - half).floor() as i64..=(centre + half).ceil() as i64 {
                let num = a as i128 * d as i128 - inst.n as i128;
                if num % c as i128 != 0 {
                    continue;
                }
                let g = Matrix { a, b: (num / c as i128) as i64, c, d };
                if inst.accepts(&g) {
                    out.push(g);
                }
            }
        }
        c += step;
    }
    out.sort_unstable();
    Ok(out)
}

/// Brute force over `|a|, |c|, |d| <= bound`; `b` from the determinant when
/// `c != 0`, otherwise every `|b| <= bound`.
pub fn enumerate_r_n_matrices_naive(inst: &MatrixCountInstance, bound: i64) -> Result<Vec<Matrix>> {
    let side = (2 * bound + 1) as f64;
    cap_check(side * side * side, inst.box_cap)?;
    let mut out = Vec::new();
    for c in -bound..=bound {
        for a in -bound..=bound {
            for d in -bound..=bound {
                if c == 0 {
                    for b in -bound..=bound {
                        let g = Matrix { a, b, c, d };
                        if inst.accepts(&g) {
                            out.push(g);
                        }
                    }
                } else {
                    let num = a as i128 * d as i128 - inst.n as i128;
                    let (q, rem) = num.div_rem(&(c as i128));
                    if rem != 0 || q.abs() > bound as i128 {
                        continue;
                    }
                    let g = Matrix { a, b: q as i64, c, d };
                    if inst.accepts(&g) {
                        out.push(g);
                    }
                }
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MatrixSplit {
    pub m: usize,
    pub m0: usize,
    pub mstar: usize,
}

pub fn matrix_count_split(inst: &MatrixCountInstance) -> Result<MatrixSplit> {
    let all = enumerate_r_n_matrices(inst)?;
    let m0 = all.iter().filter(|g| g.c == 0).count();
    Ok(MatrixSplit { m: all.len(), m0, mstar: all.len() - m0 })
}

/// `n^0.1 (1 + sqrt(n delta) y)`.
pub fn m0_shape(inst: &MatrixCountInstance) -> f64 {
    let nf = inst.n as f64;
    nf.powf(0.1) * (1.0 + (nf * inst.delta).sqrt() * inst.y)
}

/// Majorant of the point-pair kernel: `T` near the diagonal, then
/// `4 T^(1/2) u^(-1/4) (u + 1)^(-5/4)`.
pub fn kernel_majorant(u: f64, t: f64, n: i64) -> f64 {
    if u <= (n as f64).powi(-4) {
        t
    } else {
        4.0 * t.sqrt() * u.powf(-0.25) * (u + 1.0).powf(-1.25)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GeometricSum {
    pub sum: f64,
    pub shape: f64,
    pub ratio: f64,
    pub matrices: usize,
}

/// Kernel sum over the matrices with `u < delta_max`, against
/// `T + T^(1/2) n + T^(1/2) n^(1/2) y`.
pub fn geometric_sum(x: f64, y: f64, n: i64, level: SquarefreeModulus, t: f64, delta_max: f64) -> Result<GeometricSum> {
    if !(t >= 1.0) {
        return domain("T must be at least 1");
    }
    let inst = MatrixCountInstance::new(x, y, n, level, delta_max)?;
    let all = enumerate_r_n_matrices(&inst)?;
    let sum: f64 = all.iter().map(|g| kernel_majorant(inst.u_of(g), t, n)).sum();
    let nf = n as f64;
    let shape = t + t.sqrt() * nf + t.sqrt() * nf.sqrt() * y;
    Ok(GeometricSum { sum, shape, ratio: sum / shape, matrices: all.len() })
}
