use super::Triples;
use crate::algebra::Domain;
use crate::engine::{BucketParams, Session, Sh};
use crate::error::{Error, Result};

/// Random sharings requested to produce `n` triples: two per generated
/// triple, `M = 2(N + CL)(B - 1) + 2N`.
pub fn bucket_random_sharings(n: usize, p: BucketParams) -> usize {
    2 * (n + p.c * p.l) * (p.b - 1) + 2 * n
}

/// Explicit permutations for every checking vector `D_2..D_B`: one per
/// subarray and one over subarrays.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BucketPlan {
    pub within: Vec<Vec<Vec<usize>>>,
    pub order: Vec<Vec<usize>>,
}

/// Pairwise binary check of each target against its auxiliary triple:
/// opens `rho = x ^ a`, `sigma = y ^ b` and then
/// `z ^ c ^ sigma a ^ rho b ^ rho sigma`, which must be zero.
pub fn furukawa_check(s: &mut Session, t: &Triples, aux: &Triples) -> Result<Vec<bool>> {
    let len = t.len();
    if aux.len() != len {
        return Err(Error::InsufficientRandomness(format!("{} auxiliary triples for {len} targets", aux.len())));
    }
    if len == 0 {
        return Ok(Vec::new());
    }
    let opened = s.open(&Sh::concat(&[&t.a.add(&aux.a), &t.b.add(&aux.b)]))?;
    let (rho, sigma) = opened.split_at(len);
    let rs: Vec<u128> = rho.iter().zip(sigma).map(|(&r, &g)| r & g).collect();
    let w = t.c.add(&aux.c).add(&aux.a.scale_each(sigma)).add(&aux.b.scale_each(rho));
    let w = s.add_public(&w, &rs)?;
    Ok(s.open(&w)?.iter().map(|&v| v == 0).collect())
}

/// Semi-honest AND triples from fresh random bits, not yet checked.
fn raw_and_triples(s: &mut Session, count: usize) -> Result<Triples> {
    let a = s.random(Domain::Binary, count)?;
    let b = s.random(Domain::Binary, count)?;
    let mut c = s.mul_nolog(&a, &b)?;
    s.triple_fault(&mut c);
    Ok(Triples { a, b, c })
}

/// Produces `n` checked AND triples with the configured bucket parameters.
pub fn bucket_cut_and_choose(s: &mut Session, n: usize) -> Result<Triples> {
    let p = s.config().bucket;
    bucket_cut_and_choose_with(s, n, p, None)
}

/// Alias used by the binary replicated family.
pub fn furukawa_triple_gen(s: &mut Session, count: usize) -> Result<Triples> {
    bucket_cut_and_choose(s, count)
}

fn check_perm(p: &[usize], len: usize) -> Result<()> {
    let mut seen = vec![false; len];
    if p.len() != len || p.iter().any(|&i| i >= len || std::mem::replace(&mut seen[i], true)) {
        return Err(Error::Param(format!("not a permutation of {len}")));
    }
    Ok(())
}

/// Bucket cut-and-choose with explicit parameters; `plan` fixes the
/// permutations instead of drawing them from joint coins.
pub fn bucket_cut_and_choose_with(s: &mut Session, n: usize, p: BucketParams, plan: Option<&BucketPlan>) -> Result<Triples> {
    let BucketParams { b, c, l } = p;
    if b < 2 || l == 0 || n % l != 0 {
        return Err(Error::Param(format!("bucket parameters B={b}, L={l} do not fit N={n}")));
    }
    if n == 0 {
        let e = s.empty(Domain::Binary, 0)?;
        return Ok(Triples { a: e.clone(), b: e.clone(), c: e });
    }
    let x = n / l + c;
    let total = bucket_random_sharings(n, p) / 2;
    let all = raw_and_triples(s, total)?;
    let first = all.slice(0..n);
    let mut kept: Vec<Triples> = Vec::with_capacity(b - 1);
    let mut opened_idx = Vec::new();
    for k in 0..b - 1 {
        let base = n + k * (n + c * l);
        let (order, within) = match plan {
            Some(pl) => (pl.order[k].clone(), pl.within[k].clone()),
            None => {
                let order = s.joint()?.permutation(l);
                let within = (0..l).map(|_| s.joint().map(|j| j.permutation(x))).collect::<Result<Vec<_>>>()?;
                (order, within)
            }
        };
        check_perm(&order, l)?;
        let mut idx = Vec::with_capacity(n);
        for &sub in &order {
            check_perm(&within[sub], x)?;
            let arranged: Vec<usize> = within[sub].iter().map(|&e| base + sub * x + e).collect();
            opened_idx.extend_from_slice(&arranged[..c]);
            idx.extend_from_slice(&arranged[c..]);
        }
        kept.push(all.select(&idx));
    }
    let opened = all.select(&opened_idx);
    let vals = s.open(&Sh::concat(&[&opened.a, &opened.b, &opened.c]))?;
    let m = opened.len();
    if (0..m).any(|i| vals[i] & vals[m + i] != vals[2 * m + i]) {
        return Err(Error::Abort("opened triple is not an AND triple".into()));
    }
    let mut targets = first.clone();
    let mut aux = kept[0].clone();
    for t in &kept[1..] {
        targets.append(&first);
        aux.append(t);
    }
    let verdicts = furukawa_check(s, &targets, &aux)?;
    if verdicts.iter().any(|v| !v) {
        return Err(Error::Abort("bucket check failed".into()));
    }
    Ok(first)
}
