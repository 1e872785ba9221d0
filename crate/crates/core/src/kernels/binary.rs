//! Integer arithmetic on bitwise sharings, for families whose only domain
//! is `Z_2`.

use crate::conversion::circuits::{add_bits, mul_many};
use crate::engine::{Session, Sh};
use crate::error::Result;

/// Bit-level partial products processed per block of elements.
const MUL_BITS_BUDGET: usize = 1 << 17;

/// `a * b mod 2^w` elementwise: all partial products of a block in one
/// round, then a tree of ripple adders over the shifted rows.
pub fn mul_bits(s: &mut Session, a: &[Sh], b: &[Sh], w: u32) -> Result<Vec<Sh>> {
    let len = a[0].len();
    let block = (MUL_BITS_BUDGET / (w as usize * w as usize)).max(1);
    if len <= block {
        return mul_bits_block(s, a, b, w);
    }
    let mut out: Vec<Sh> = Vec::new();
    for start in (0..len).step_by(block) {
        let r = start..len.min(start + block);
        let pa: Vec<Sh> = a.iter().map(|c| c.slice(r.clone())).collect();
        let pb: Vec<Sh> = b.iter().map(|c| c.slice(r.clone())).collect();
        let part = mul_bits_block(s, &pa, &pb, w)?;
        if out.is_empty() {
            out = part;
        } else {
            for (o, p) in out.iter_mut().zip(&part) {
                o.append(p);
            }
        }
    }
    Ok(out)
}

fn mul_bits_block(s: &mut Session, a: &[Sh], b: &[Sh], w: u32) -> Result<Vec<Sh>> {
    let w = w as usize;
    let len = a[0].len();
    let zero = a[0].scale(0);
    // Row j is (a << j) & b_j, truncated to w bits.
    let mut pairs = Vec::new();
    for j in 0..w {
        for i in j..w {
            pairs.push((&a[i - j], &b[j]));
        }
    }
    let prods = mul_many(s, &pairs)?;
    let mut rows: Vec<Vec<Sh>> = vec![vec![zero.clone(); w]; w];
    let mut at = 0;
    for (j, row) in rows.iter_mut().enumerate() {
        for i in j..w {
            row[i] = prods[at].clone();
            at += 1;
        }
    }
    // Interleave rows element-major so each element's rows form a group.
    let idx: Vec<usize> = (0..len).flat_map(|e| (0..w).map(move |j| j * len + e)).collect();
    let stacked: Vec<Sh> = (0..w)
        .map(|i| {
            let col: Vec<&Sh> = rows.iter().map(|r| &r[i]).collect();
            Sh::concat(&col).select(&idx)
        })
        .collect();
    sum_groups(s, &stacked, w, w as u32)
}

/// Sums consecutive groups of `group` elements modulo `2^w`.
pub fn sum_groups(s: &mut Session, x: &[Sh], group: usize, w: u32) -> Result<Vec<Sh>> {
    let groups = x[0].len() / group;
    let mut cur: Vec<Sh> = x.to_vec();
    let mut size = group;
    while size > 1 {
        let half = size / 2;
        let lhs: Vec<usize> = (0..groups).flat_map(|g| (0..half).map(move |t| g * size + t)).collect();
        let rhs: Vec<usize> = (0..groups).flat_map(|g| (0..half).map(move |t| g * size + half + t)).collect();
        let l: Vec<Sh> = cur.iter().map(|c| c.select(&lhs)).collect();
        let r: Vec<Sh> = cur.iter().map(|c| c.select(&rhs)).collect();
        let (sum, _) = add_bits(s, &l, &r, w, false)?;
        let next_size = size - half;
        if size % 2 == 1 {
            // The odd element rides along as the last of each new group.
            let last: Vec<usize> = (0..groups).map(|g| g * size + size - 1).collect();
            let order: Vec<usize> = (0..groups).flat_map(|g| (0..next_size).map(move |t| (g, t))).map(|(g, t)| if t < half { g * half + t } else { groups * half + g }).collect();
            cur = sum.iter().zip(&cur).map(|(sm, c)| Sh::concat(&[sm, &c.select(&last)]).select(&order)).collect();
        } else {
            cur = sum;
        }
        size = next_size;
    }
    Ok(cur)
}
