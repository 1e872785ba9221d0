use mpc_forge::algebra::{Domain, DomainParams};
use mpc_forge::conversion::{from_bits, to_bits};
use mpc_forge::engine::{simulate, DomainClass, Family, ProtocolConfig, RunOptions};
use mpc_forge::preprocessing::{gen_dabits, gen_edabits};

fn configs() -> Vec<ProtocolConfig> {
    let mut out = Vec::new();
    for f in Family::ALL {
        if f == Family::FurukawaBin {
            continue;
        }
        let n = f.fixed_parties().unwrap_or(3);
        let mut params = vec![];
        if matches!(f.domain_class(), DomainClass::Field | DomainClass::Either) {
            params.push(DomainParams::prime_field(31).unwrap());
        }
        if matches!(f.domain_class(), DomainClass::Ring | DomainClass::Either) {
            params.push(DomainParams::ring(8).unwrap());
        }
        for p in params {
            for &c in f.allowed_conversions() {
                if let Ok(cfg) = ProtocolConfig::new(f, n, p).and_then(|cfg| cfg.with_conversion(c)) {
                    out.push(cfg);
                }
            }
        }
    }
    out
}

#[test]
fn bits_round_trip_under_every_conversion() {
    for cfg in configs() {
        let d = cfg.arith_domain().unwrap();
        let w = cfg.int_bits();
        let top = if matches!(cfg.params.domain, Domain::Prime(_)) { 31 } else { 256 };
        let xs: Vec<u128> = vec![0, 1, top - 1, top / 2, 7, 22];
        let res = simulate(&cfg, &RunOptions::seeded(9), |s| {
            let x = s.input(0, d, (s.id() == 0).then_some(&xs[..]), xs.len())?;
            let bits = to_bits(s, &x, w)?;
            let mut opened = Vec::new();
            for b in &bits {
                opened.push(s.open(b)?);
            }
            let back = from_bits(s, &bits)?;
            Ok((opened, s.open(&back)?))
        })
        .unwrap_or_else(|e| panic!("{} {:?}: {e}", cfg.family, cfg.conversion));
        let (bits, back) = &res.outputs[0];
        for (e, &x) in xs.iter().enumerate() {
            let got: u128 = bits.iter().enumerate().map(|(i, col)| col[e] << i).sum();
            assert_eq!(got, x, "{} {:?}", cfg.family, cfg.conversion);
        }
        let low: Vec<u128> = back.iter().map(|&v| v % top).collect();
        assert_eq!(low, xs, "{} {:?}", cfg.family, cfg.conversion);
    }
}

#[test]
fn dabits_agree_across_domains() {
    for f in [Family::Semi, Family::Semi2k, Family::Rep3Ring, Family::MalRepRing] {
        let params = if f == Family::Semi { DomainParams::prime_field(31) } else { DomainParams::ring(6) };
        let cfg = ProtocolConfig::new(f, 3, params.unwrap()).unwrap();
        let res = simulate(&cfg, &RunOptions::seeded(2), |s| {
            let db = gen_dabits(s, 40)?;
            Ok((s.open(&db.arith)?, s.open(&db.bin)?))
        })
        .unwrap();
        let (a, b) = &res.outputs[0];
        assert_eq!(a, b, "{f}");
        assert!(a.iter().any(|&v| v == 1) && a.iter().any(|&v| v == 0), "{f}");
    }
}

#[test]
fn edabits_recompose_to_their_arithmetic_value() {
    for f in [Family::Semi2k, Family::Rep3Ring, Family::MalRepRing] {
        let cfg = ProtocolConfig::new(f, 3, DomainParams::ring(6).unwrap()).unwrap();
        let res = simulate(&cfg, &RunOptions::seeded(4), |s| {
            let e = gen_edabits(s, 30, 6)?;
            let a = s.open(&e.arith)?;
            let cols: Vec<Vec<u128>> = e.bits.iter().map(|b| s.open(b)).collect::<mpc_forge::Result<_>>()?;
            Ok((a, cols))
        })
        .unwrap();
        let (a, cols) = &res.outputs[0];
        for (e, &v) in a.iter().enumerate() {
            let r: u128 = cols.iter().enumerate().map(|(i, c)| c[e] << i).sum();
            assert_eq!(v % 64, r, "{f}");
        }
    }
    let cfg = ProtocolConfig::new(Family::Semi, 3, DomainParams::prime_field(31).unwrap()).unwrap();
    let res = simulate(&cfg, &RunOptions::seeded(4), |s| {
        let e = gen_edabits(s, 30, 5)?;
        let a = s.open(&e.arith)?;
        let cols: Vec<Vec<u128>> = e.bits.iter().map(|b| s.open(b)).collect::<mpc_forge::Result<_>>()?;
        Ok((a, cols))
    })
    .unwrap();
    let (a, cols) = &res.outputs[0];
    for (e, &v) in a.iter().enumerate() {
        let r: u128 = cols.iter().enumerate().map(|(i, c)| c[e] << i).sum();
        assert_eq!(v, r);
    }
}
