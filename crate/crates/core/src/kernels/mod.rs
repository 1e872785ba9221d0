//! Benchmark kernels: pointwise comparison, radix sort, inner product and
//! matrix multiplication.

pub mod binary;

use std::fmt;
use std::str::FromStr;

use rand::RngCore;

use crate::algebra::Domain;
use crate::conversion::circuits::{less_than_bits, mul_many};
use crate::conversion::{to_arith_bits, to_bits};
use crate::engine::{Session, Sh};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kernel {
    Compare,
    Sort,
    InnerProduct,
    Matmul,
}

impl Kernel {
    pub const ALL: [Kernel; 4] = [Kernel::Compare, Kernel::Sort, Kernel::InnerProduct, Kernel::Matmul];

    pub fn name(&self) -> &'static str {
        match self {
            Kernel::Compare => "compare",
            Kernel::Sort => "sort",
            Kernel::InnerProduct => "inner_product",
            Kernel::Matmul => "matmul",
        }
    }

    /// Number of values in each input vector for size `n`.
    pub fn input_len(&self, n: usize) -> usize {
        match self {
            Kernel::Matmul => n * n,
            _ => n,
        }
    }

    /// Secret multiplications the arithmetic kernel performs, where that
    /// number does not depend on the conversion machinery.
    pub fn analytic_mults(&self, n: usize) -> Option<u64> {
        match self {
            Kernel::InnerProduct => Some(n as u64),
            Kernel::Matmul => Some((n as u64).pow(3)),
            _ => None,
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kernel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "compare" => Ok(Kernel::Compare),
            "sort" | "radix_sort" => Ok(Kernel::Sort),
            "inner_product" | "inner" => Ok(Kernel::InnerProduct),
            "matmul" => Ok(Kernel::Matmul),
            _ => Err(Error::Config(format!("unknown kernel {s:?}"))),
        }
    }
}

/// Plaintext kernel inputs. `b` is empty for sorting; matrices are row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelData {
    pub a: Vec<u128>,
    pub b: Vec<u128>,
}

impl KernelData {
    /// Uniform inputs over the logical domain.
    pub fn random<R: RngCore + ?Sized>(kernel: Kernel, n: usize, domain: Domain, rng: &mut R) -> Self {
        let len = kernel.input_len(n);
        let a = (0..len).map(|_| domain.sample(rng)).collect();
        let b = if kernel == Kernel::Sort { Vec::new() } else { (0..len).map(|_| domain.sample(rng)).collect() };
        KernelData { a, b }
    }
}

/// What the kernel computes, on plaintext.
pub fn plaintext(kernel: Kernel, n: usize, domain: Domain, data: &KernelData) -> Vec<u128> {
    let (a, b) = (&data.a, &data.b);
    match kernel {
        Kernel::Compare => a.iter().zip(b).map(|(x, y)| (x < y) as u128).collect(),
        Kernel::Sort => {
            let mut v = a.clone();
            v.sort_unstable();
            v
        }
        Kernel::InnerProduct => vec![a.iter().zip(b).fold(0, |acc, (&x, &y)| domain.add(acc, domain.mul(x, y)))],
        Kernel::Matmul => {
            let mut c = vec![0; n * n];
            for i in 0..n {
                for j in 0..n {
                    c[i * n + j] = (0..n).fold(0, |acc, k| domain.add(acc, domain.mul(a[i * n + k], b[k * n + j])));
                }
            }
            c
        }
    }
}

/// `[a_i < b_i]` for unsigned integers, by bit decomposition and a prefix
/// comparator.
pub fn compare_vectors(s: &mut Session, a: &Sh, b: &Sh) -> Result<Sh> {
    let n = a.len();
    if b.len() != n {
        return Err(Error::Param("compared vectors differ in length".into()));
    }
    let w = s.int_bits();
    let bits = to_bits(s, &Sh::concat(&[a, b]), w)?;
    let la: Vec<Sh> = bits.iter().map(|c| c.slice(0..n)).collect();
    let lb: Vec<Sh> = bits.iter().map(|c| c.slice(n..2 * n)).collect();
    less_than_bits(s, &la, &lb)
}

pub fn inner_product(s: &mut Session, a: &Sh, b: &Sh) -> Result<Sh> {
    if a.len() != b.len() {
        return Err(Error::Param("inner product of unequal lengths".into()));
    }
    Ok(s.mul(a, b)?.sum())
}

/// Row-major `n x n` product with one multiplication per term.
pub fn matmul(s: &mut Session, a: &Sh, b: &Sh, n: usize) -> Result<Sh> {
    if a.len() != n * n || b.len() != n * n {
        return Err(Error::Param(format!("matmul expects {n}x{n} matrices")));
    }
    let (ia, ib) = matmul_indices(n);
    Ok(s.mul(&a.select(&ia), &b.select(&ib))?.chunk_sums(n))
}

/// Operand indices of every term, ordered `(i, j, k)`.
fn matmul_indices(n: usize) -> (Vec<usize>, Vec<usize>) {
    let mut ia = Vec::with_capacity(n * n * n);
    let mut ib = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                ia.push(i * n + k);
                ib.push(k * n + j);
            }
        }
    }
    (ia, ib)
}

/// One-hot vector at `at`, as a public sharing of length `n`.
fn unit(s: &Session, d: Domain, n: usize, at: usize) -> Result<Sh> {
    let mut v = vec![0; n];
    v[at] = 1;
    s.constant(d, &v)
}

/// Stable partition by the secret bits `b`: zeros keep their order at the
/// front, ones follow. Destinations are built as one-hot vectors by walking
/// a zero cursor forward and a one cursor backward; every item column is
/// then routed by a secret permutation-matrix product.
pub fn partition(s: &mut Session, b: &Sh, items: &[Sh]) -> Result<Vec<Sh>> {
    let n = b.len();
    let d = b.domain;
    if n <= 1 {
        return Ok(items.to_vec());
    }
    let up = |v: &Sh| -> Sh {
        let mut idx = vec![0];
        idx.extend(0..n - 1);
        let mut out = v.select(&idx);
        for p in out.parts.iter_mut() {
            p[0] = 0;
        }
        if let Some(m) = out.mac.as_mut() {
            m[0] = 0;
        }
        out
    };
    let down = |v: &Sh| -> Sh {
        let mut idx: Vec<usize> = (1..n).collect();
        idx.push(n - 1);
        let mut out = v.select(&idx);
        for p in out.parts.iter_mut() {
            p[n - 1] = 0;
        }
        if let Some(m) = out.mac.as_mut() {
            m[n - 1] = 0;
        }
        out
    };
    let mut zeros = vec![unit(s, d, n, 0)?];
    let mut ones = vec![unit(s, d, n, n - 1)?];
    for t in 0..n - 1 {
        let zc = zeros.last().unwrap().clone();
        let oc = ones.last().unwrap().clone();
        let (zs, os) = (up(&zc), down(&oc));
        let bz = b.get(t).stretch(n);
        let bo = b.get(n - 1 - t).stretch(n);
        let diff_z = zc.sub(&zs);
        let diff_o = os.sub(&oc);
        let prods = mul_many(s, &[(&bz, &diff_z), (&bo, &diff_o)])?;
        // A zero advances the zero cursor; a one moves the one cursor back.
        zeros.push(zs.add(&prods[0]));
        ones.push(oc.add(&prods[1]));
    }
    ones.reverse();
    let z_all = Sh::concat(&zeros.iter().collect::<Vec<_>>());
    let o_all = Sh::concat(&ones.iter().collect::<Vec<_>>());
    let dest = z_all.add(&s.mul(&b.stretch(n), &o_all.sub(&z_all))?);
    // out_j = sum_i dest[i][j] * item_i, summed in j-major order.
    let jmajor: Vec<usize> = (0..n).flat_map(|j| (0..n).map(move |i| i * n + j)).collect();
    let dest_j = dest.select(&jmajor);
    let spread: Vec<Sh> = items.iter().map(|it| it.tile(n)).collect();
    let pairs: Vec<(&Sh, &Sh)> = spread.iter().map(|sp| (&dest_j, sp)).collect();
    let prods = mul_many(s, &pairs)?;
    Ok(prods.iter().map(|p| p.chunk_sums(n)).collect())
}

/// Least-significant-digit radix sort, one bit per pass.
pub fn radix_sort(s: &mut Session, v: &Sh) -> Result<Sh> {
    if v.is_empty() {
        return Err(Error::Param("nothing to sort".into()));
    }
    let w = s.int_bits();
    let mut cur = v.clone();
    for pass in 0..w as usize {
        let bits = to_bits(s, &cur, w)?;
        let b = to_arith_bits(s, &bits[pass..pass + 1])?.pop().unwrap();
        cur = partition(s, &b, &[cur])?.pop().unwrap();
    }
    Ok(cur)
}

/// Bit columns of secret integers held over `Z_2`.
pub fn radix_sort_bits(s: &mut Session, cols: &[Sh]) -> Result<Vec<Sh>> {
    let mut cur = cols.to_vec();
    for pass in 0..cols.len() {
        let b = cur[pass].clone();
        cur = partition(s, &b, &cur)?;
    }
    Ok(cur)
}

fn input_values(s: &mut Session, vals: Option<&[u128]>, len: usize) -> Result<Sh> {
    let d = s.arith();
    let v = vals.map(|v| v.to_vec());
    s.input(0, d, v.as_deref(), len)
}

/// Inputs each value as `w` bit columns over `Z_2`.
fn input_bits(s: &mut Session, vals: Option<&[u128]>, len: usize, w: u32) -> Result<Vec<Sh>> {
    let flat: Option<Vec<u128>> = vals.map(|v| (0..w).flat_map(|i| v.iter().map(move |x| (x >> i) & 1)).collect());
    let all = s.input(0, Domain::Binary, flat.as_deref(), len * w as usize)?;
    Ok((0..w as usize).map(|i| all.slice(i * len..(i + 1) * len)).collect())
}

fn open_bits(s: &mut Session, cols: &[Sh]) -> Result<Vec<u128>> {
    let mut out = vec![0u128; cols[0].len()];
    for (i, c) in cols.iter().enumerate() {
        for (o, b) in out.iter_mut().zip(s.open(c)?) {
            *o |= b << i;
        }
    }
    Ok(out)
}

/// Runs a kernel end to end: party 0 shares the inputs (other parties pass
/// `None`), the kernel runs, and the output is opened to everyone.
pub fn run_kernel(s: &mut Session, kernel: Kernel, n: usize, data: Option<&KernelData>) -> Result<Vec<u128>> {
    let len = kernel.input_len(n);
    if n == 0 {
        return Err(Error::Param("kernel size must be positive".into()));
    }
    if let Some(d) = data {
        if d.a.len() != len || (kernel != Kernel::Sort && d.b.len() != len) {
            return Err(Error::Param(format!("{kernel} with n={n} needs inputs of length {len}")));
        }
    }
    let logical = s.config().params.domain;
    if s.arith() == Domain::Binary {
        return run_binary(s, kernel, n, data);
    }
    let a = input_values(s, data.map(|d| d.a.as_slice()), len)?;
    let b = if kernel == Kernel::Sort { None } else { Some(input_values(s, data.map(|d| d.b.as_slice()), len)?) };
    let out = match kernel {
        Kernel::Compare => compare_vectors(s, &a, b.as_ref().unwrap())?,
        Kernel::Sort => radix_sort(s, &a)?,
        Kernel::InnerProduct => inner_product(s, &a, b.as_ref().unwrap())?,
        Kernel::Matmul => matmul(s, &a, b.as_ref().unwrap(), n)?,
    };
    Ok(s.open(&out)?.into_iter().map(|v| logical.reduce(v)).collect())
}

fn run_binary(s: &mut Session, kernel: Kernel, n: usize, data: Option<&KernelData>) -> Result<Vec<u128>> {
    let w = s.int_bits();
    let len = kernel.input_len(n);
    let a = input_bits(s, data.map(|d| d.a.as_slice()), len, w)?;
    let b = if kernel == Kernel::Sort { Vec::new() } else { input_bits(s, data.map(|d| d.b.as_slice()), len, w)? };
    match kernel {
        Kernel::Compare => {
            let lt = less_than_bits(s, &a, &b)?;
            s.open(&lt)
        }
        Kernel::Sort => {
            let sorted = radix_sort_bits(s, &a)?;
            open_bits(s, &sorted)
        }
        Kernel::InnerProduct => {
            let p = binary::mul_bits(s, &a, &b, w)?;
            let sum = binary::sum_groups(s, &p, n, w)?;
            open_bits(s, &sum)
        }
        Kernel::Matmul => {
            let (ia, ib) = matmul_indices(n);
            let xa: Vec<Sh> = a.iter().map(|c| c.select(&ia)).collect();
            let xb: Vec<Sh> = b.iter().map(|c| c.select(&ib)).collect();
            let p = binary::mul_bits(s, &xa, &xb, w)?;
            let sum = binary::sum_groups(s, &p, n, w)?;
            open_bits(s, &sum)
        }
    }
}
