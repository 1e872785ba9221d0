use crate::algebra::Domain;
use crate::engine::share::{decode, encode};
use crate::engine::Session;
use crate::error::{Error, Result};
use crate::transport::MsgKind;

/// This party's additive share of `(sum_i x^i) * (sum_j y^j)`, elementwise,
/// where `x` and `y` are its own additive shares.
///
/// Every cross term `x^j * y^i` is produced by one correlated transfer per
/// bit of `x^j`: the sender `i` offers `(s, s + y^i)` and keeps `-s`; the
/// receiver `j` takes the message selected by its bit. Transfers are ideal:
/// both messages travel to the receiver, which keeps only the chosen one, so
/// the byte counters match a two-message OT.
pub fn ot_cross_product(s: &mut Session, d: Domain, x: &[u128], y: &[u128]) -> Result<Vec<u128>> {
    if x.len() != y.len() {
        return Err(Error::Param("operand lengths differ".into()));
    }
    let len = x.len();
    let (me, n) = (s.id(), s.parties());
    let bits = d.bits() as usize;
    let pow: Vec<u128> = (0..bits).map(|h| d.reduce(1u128 << h)).collect();
    let mut out: Vec<u128> = x.iter().zip(y).map(|(&a, &b)| d.mul(a, b)).collect();
    s.endpoint().next_round();
    for j in (0..n).filter(|&j| j != me) {
        let mut msgs = Vec::with_capacity(2 * len * bits);
        for e in 0..len {
            for &p in &pow {
                let r = s.local_fill(d, 1)[0];
                msgs.push(r);
                msgs.push(d.add(r, y[e]));
                out[e] = d.sub(out[e], d.mul(p, r));
            }
        }
        s.endpoint().send(j, MsgKind::Ot, encode(d, &msgs))?;
    }
    for i in (0..n).filter(|&i| i != me) {
        let msgs = decode(d, &s.endpoint().recv_kind(i, MsgKind::Ot)?, 2 * len * bits)?;
        for e in 0..len {
            for (h, &p) in pow.iter().enumerate() {
                let choice = ((x[e] >> h) & 1) as usize;
                let t = msgs[2 * (e * bits + h) + choice];
                out[e] = d.add(out[e], d.mul(p, t));
            }
        }
    }
    Ok(out)
}
