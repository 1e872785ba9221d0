use mpc_forge::algebra::DomainParams;
use mpc_forge::engine::{simulate, Family, ProtocolConfig, RunOptions};

#[test]
fn two_inputs_multiply() -> mpc_forge::Result<()> {
    let cfg = ProtocolConfig::new(Family::Semi2k, 3, DomainParams::ring(32)?)?;
    let res = simulate(&cfg, &RunOptions::seeded(1), |s| {
        let d = s.arith();
        let x = s.input(0, d, (s.id() == 0).then_some(&[6][..]), 1)?;
        let y = s.input(1, d, (s.id() == 1).then_some(&[7][..]), 1)?;
        let z = s.mul(&x, &y)?;
        s.open(&z)
    })?;
    assert_eq!(res.outputs[0], vec![42]);
    Ok(())
}
