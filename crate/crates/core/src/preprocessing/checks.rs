use super::Triples;
use crate::algebra::{lagrange_coefficients, Domain};
use crate::engine::{Session, Sh};
use crate::error::{Error, Result};

fn need_field(d: Domain, what: &str) -> Result<u128> {
    match d {
        Domain::Prime(p) => Ok(p),
        _ => Err(Error::DomainMismatch(format!("{what} runs over a prime field, not {d}"))),
    }
}

fn need_aux(t: &Triples, aux: &Triples) -> Result<Triples> {
    if aux.len() < t.len() {
        return Err(Error::InsufficientRandomness(format!("{} auxiliary triples for {} targets", aux.len(), t.len())));
    }
    Ok(aux.slice(0..t.len()))
}

fn all_pass(v: &[bool], what: &str) -> Result<()> {
    match v.iter().position(|ok| !ok) {
        Some(i) => Err(Error::Abort(format!("{what} rejected instance {i}"))),
        None => Ok(()),
    }
}

/// Linear combination `sum_i coeffs[i] * x[i]` as a length-one sharing.
fn lincomb(x: &Sh, coeffs: &[u128]) -> Sh {
    x.scale_each(coeffs).sum()
}

/// Pairwise sacrifice of `aux[i]` against `t[i]` with one public random
/// coefficient per pair; works on any sharing without native
/// multiplication, including authenticated ones.
pub fn pairwise_sacrifice_verdicts(s: &mut Session, t: &Triples, aux: &Triples) -> Result<Vec<bool>> {
    let aux = need_aux(t, aux)?;
    let d = t.a.domain;
    let len = t.len();
    if len == 0 {
        return Ok(Vec::new());
    }
    let r = s.joint()?.fill(d, len);
    let opened = s.open(&Sh::concat(&[&t.a.scale_each(&r).sub(&aux.a), &t.b.sub(&aux.b)]))?;
    let (rho, sigma) = opened.split_at(len);
    let cross: Vec<u128> = rho.iter().zip(sigma).map(|(&x, &y)| d.neg(d.mul(x, y))).collect();
    let w = t.c.scale_each(&r).sub(&aux.c).sub(&aux.a.scale_each(sigma)).sub(&aux.b.scale_each(rho));
    let w = s.add_public(&w, &cross)?;
    Ok(s.open(&w)?.iter().map(|&v| v == 0).collect())
}

pub fn pairwise_sacrifice_check(s: &mut Session, t: &Triples, aux: &Triples) -> Result<()> {
    all_pass(&pairwise_sacrifice_verdicts(s, t, aux)?, "sacrifice")
}

/// Per-instance values `[v_i]` of the masked-product sacrifice, which are
/// zero when both the target and the auxiliary triple are correct.
fn ln_values(s: &mut Session, t: &Triples, aux: &Triples) -> Result<Sh> {
    let aux = need_aux(t, aux)?;
    let d = t.a.domain;
    need_field(d, "sacrifice")?;
    let len = t.len();
    let (x, y, z) = (&t.a, &t.b, &t.c);
    let alpha = s.random(d, len)?;
    let ax = s.mul_nolog(x, &alpha)?;
    let rho = ax.add(&aux.a);
    let sigma = y.add(&aux.b);
    let prods = s.mul_nolog(&Sh::concat(&[z, &aux.a, &rho]), &Sh::concat(&[&alpha, &sigma, y]))?;
    let (az, a_sigma, rho_y) = (prods.slice(0..len), prods.slice(len..2 * len), prods.slice(2 * len..3 * len));
    let phi = s.joint()?.fill(d, len);
    let alpha_open = s.open(&alpha)?;
    let alpha_phi: Vec<u128> = alpha_open.iter().zip(&phi).map(|(&a, &f)| d.mul(a, f)).collect();
    Ok(az
        .add(&x.scale_each(&alpha_phi))
        .sub(&aux.c)
        .add(&a_sigma.add(&aux.a.scale_each(&phi)))
        .sub(&rho_y.add(&rho.scale_each(&phi))))
}

/// Runs one independent masked-product sacrifice per target, each opening
/// its own `w_i = r_i * v_i`.
pub fn sacrifice_verdicts(s: &mut Session, t: &Triples, aux: &Triples) -> Result<Vec<bool>> {
    if t.is_empty() {
        return Ok(Vec::new());
    }
    let v = ln_values(s, t, aux)?;
    let d = v.domain;
    let r: Vec<u128> = (0..v.len()).map(|_| s.joint().map(|j| j.next_nonzero(d))).collect::<Result<_>>()?;
    Ok(s.open(&v.scale_each(&r))?.iter().map(|&w| w == 0).collect())
}

/// Batched masked-product sacrifice: all `[v_i]` are folded with nonzero
/// public coefficients into one value that is opened after a last mask.
pub fn sacrifice_check(s: &mut Session, t: &Triples, aux: &Triples) -> Result<()> {
    if t.is_empty() {
        return Ok(());
    }
    let v = ln_values(s, t, aux)?;
    let d = v.domain;
    let beta: Vec<u128> = (0..v.len()).map(|_| s.joint().map(|j| j.next_nonzero(d))).collect::<Result<_>>()?;
    let r = s.joint()?.next_nonzero(d);
    let w = s.open(&lincomb(&v, &beta).scale(r))?;
    all_pass(&[w[0] == 0], "sacrifice")
}

/// Evaluates the batch polynomial identity at `z`.
///
/// `f` and `g` interpolate the `a` and `b` shares at `1..=N`; `h` takes the
/// `c` shares there and the products `f(i) * g(i)` at `N+1..2N-1`.
pub fn batch_poly_accepts_at(s: &mut Session, t: &Triples, z: u128) -> Result<bool> {
    let d = t.a.domain;
    let p = need_field(d, "batch check")?;
    let n = t.len();
    if n == 0 {
        return Ok(true);
    }
    if 2 * n as u128 - 1 >= p {
        return Err(Error::Param(format!("batch of {n} needs a prime above {}", 2 * n - 1)));
    }
    let xs: Vec<u128> = (1..=n as u128).collect();
    let mut fe = t.a.slice(0..0);
    let mut ge = t.b.slice(0..0);
    for i in n as u128 + 1..2 * n as u128 {
        let l = lagrange_coefficients(&xs, i, d)?;
        fe.append(&lincomb(&t.a, &l));
        ge.append(&lincomb(&t.b, &l));
    }
    let he = s.mul_nolog(&fe, &ge)?;
    let hs = Sh::concat(&[&t.c, &he]);
    let hx: Vec<u128> = (1..2 * n as u128).collect();
    let lz = lagrange_coefficients(&xs, z, d)?;
    let (fz, gz) = (lincomb(&t.a, &lz), lincomb(&t.b, &lz));
    let hz = lincomb(&hs, &lagrange_coefficients(&hx, z, d)?);
    let fg = s.mul_nolog(&fz, &gz)?;
    Ok(s.open(&fg.sub(&hz))?[0] == 0)
}

/// Checks a batch at a jointly chosen point; batches larger than the field
/// allows are split.
pub fn batch_poly_check(s: &mut Session, t: &Triples) -> Result<()> {
    let p = need_field(t.a.domain, "batch check")?;
    let max = ((p - 1) / 2).min(usize::MAX as u128) as usize;
    if max == 0 {
        return Err(Error::Param("field too small for the batch check".into()));
    }
    let mut start = 0;
    while start < t.len() {
        let end = (start + max).min(t.len());
        let z = s.joint()?.next(t.a.domain);
        if !batch_poly_accepts_at(s, &t.slice(start..end), z)? {
            return Err(Error::Abort("batch polynomial check failed".into()));
        }
        start = end;
    }
    Ok(())
}

/// One check per logged product `z = x * y` with auxiliary `c = a * y`:
/// opens `e = r x + a` and then `w = r z + c - e y`, which must be zero in
/// the whole carrier.
pub fn ring_check_verdicts(s: &mut Session, x: &Sh, y: &Sh, z: &Sh, a: &Sh, c: &Sh) -> Result<Vec<bool>> {
    let d = x.domain;
    let len = x.len();
    if len == 0 {
        return Ok(Vec::new());
    }
    let r = s.joint()?.fill(d, len);
    let e = s.open(&x.scale_each(&r).add(a))?;
    let w = z.scale_each(&r).add(c).sub(&y.scale_each(&e));
    Ok(s.open(&w)?.iter().map(|&v| v == 0).collect())
}

/// Checks a triple carried in the extended ring against a fresh optimistic
/// auxiliary product.
pub fn ring_triple_check(s: &mut Session, t: &Triples) -> Result<()> {
    let a = s.random(t.a.domain, t.len())?;
    let c = s.mul_nolog(&a, &t.b)?;
    all_pass(&ring_check_verdicts(s, &t.a, &t.b, &t.c, &a, &c)?, "ring check")
}

/// Verdict per logged product: masked-product sacrifice over fields, ring
/// check over rings.
pub fn postprocess_verdicts(s: &mut Session, log: &Triples) -> Result<Vec<bool>> {
    let d = log.a.domain;
    let len = log.len();
    if len == 0 {
        return Ok(Vec::new());
    }
    match d {
        Domain::Prime(_) => {
            let a = s.random(d, len)?;
            let b = s.random(d, len)?;
            let c = s.mul_nolog(&a, &b)?;
            sacrifice_verdicts(s, log, &Triples { a, b, c })
        }
        _ => {
            let a = s.random(d, len)?;
            let c = s.mul_nolog(&a, &log.b)?;
            ring_check_verdicts(s, &log.a, &log.b, &log.c, &a, &c)
        }
    }
}

pub fn postprocess_check(s: &mut Session, log: &Triples) -> Result<()> {
    all_pass(&postprocess_verdicts(s, log)?, "postprocessing")
}
