use mpc_forge::algebra::{Domain, DomainParams, Prg};
use mpc_forge::conversion::{from_bits, to_bits};
use mpc_forge::engine::{simulate, Conversion, Family, ProtocolConfig, RunOptions};
use mpc_forge::kernels::{plaintext, run_kernel, Kernel, KernelData};
use mpc_forge::sharing::{reconstruct, share_additive, share_rep3, share_rep4, share_shamir, share_xor};
use proptest::prelude::*;

fn domains() -> impl Strategy<Value = Domain> {
    prop_oneof![
        prop::sample::select(vec![2u128, 5, 31, 257, (1 << 61) - 1, (1 << 127) - 1]).prop_map(Domain::Prime),
        (1u32..=128).prop_map(Domain::Ring),
        Just(Domain::Binary),
    ]
}

proptest! {
    #[test]
    fn domain_ops_form_a_ring(d in domains(), a: u128, b: u128, c: u128) {
        let (a, b, c) = (d.reduce(a), d.reduce(b), d.reduce(c));
        prop_assert_eq!(d.sub(d.add(a, b), b), a);
        prop_assert_eq!(d.add(a, d.neg(a)), 0);
        prop_assert_eq!(d.mul(a, d.add(b, c)), d.add(d.mul(a, b), d.mul(a, c)));
        prop_assert_eq!(d.mul(d.mul(a, b), c), d.mul(a, d.mul(b, c)));
        prop_assert!(d.contains(d.mul(a, b)));
    }

    #[test]
    fn field_inverse(p in prop::sample::select(vec![5u128, 31, (1 << 61) - 1]), a: u128) {
        let d = Domain::Prime(p);
        let a = d.reduce(a);
        prop_assume!(a != 0);
        prop_assert_eq!(d.mul(a, d.inv(a).unwrap()), 1);
    }

    #[test]
    fn every_sharing_reconstructs(x: u128, seed: u64, n in 2usize..6) {
        let mut prg = Prg::from_u64(seed);
        let ring = Domain::Ring(32);
        let field = Domain::Prime(257);
        let xr = ring.reduce(x);
        let xf = field.reduce(x);
        prop_assert_eq!(reconstruct(&share_additive(xr, n, ring, prg.rng()).unwrap()).unwrap(), xr);
        prop_assert_eq!(reconstruct(&share_xor(xr, 32, n, prg.rng()).unwrap()).unwrap(), xr);
        prop_assert_eq!(reconstruct(&share_rep3(xr, ring, prg.rng()).unwrap()).unwrap(), xr);
        prop_assert_eq!(reconstruct(&share_rep4(xr, ring, prg.rng()).unwrap()).unwrap(), xr);
        let t = 1 + (seed as usize % n);
        let sh = share_shamir(xf, n, t, field, prg.rng()).unwrap();
        prop_assert_eq!(reconstruct(&sh[n - t..]).unwrap(), xf);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn products_match_plaintext(
        family in prop::sample::select(vec![Family::Rep3Ring, Family::Semi2k, Family::MalRepRing, Family::Rep4]),
        xs in prop::collection::vec(any::<u16>(), 1..8),
        seed: u64,
    ) {
        let cfg = ProtocolConfig::new(family, family.fixed_parties().unwrap_or(3), DomainParams::ring(16).unwrap()).unwrap();
        let d = Domain::Ring(16);
        let xs: Vec<u128> = xs.into_iter().map(u128::from).collect();
        let want: Vec<u128> = xs.iter().map(|&x| d.mul(x, d.add(x, 3))).collect();
        let res = simulate(&cfg, &RunOptions::seeded(seed), |s| {
            let a = s.arith();
            let x = s.input(0, a, (s.id() == 0).then_some(&xs[..]), xs.len())?;
            let y = s.add_public(&x, &vec![3; xs.len()])?;
            let z = s.mul(&x, &y)?;
            s.open(&z)
        }).unwrap();
        for out in res.outputs {
            let got: Vec<u128> = out.iter().map(|&v| d.reduce(v)).collect();
            prop_assert_eq!(&got, &want);
        }
    }

    #[test]
    fn bit_decomposition_round_trips(
        conv in prop::sample::select(vec![Conversion::Local, Conversion::Dabit, Conversion::Edabit, Conversion::Off]),
        xs in prop::collection::vec(any::<u16>(), 1..6),
        seed: u64,
    ) {
        let family = if conv == Conversion::Local { Family::Rep3Ring } else { Family::Semi2k };
        let cfg = ProtocolConfig::new(family, 3, DomainParams::ring(16).unwrap()).unwrap().with_conversion(conv).unwrap();
        let xs: Vec<u128> = xs.into_iter().map(u128::from).collect();
        let res = simulate(&cfg, &RunOptions::seeded(seed), |s| {
            let a = s.arith();
            let x = s.input(0, a, (s.id() == 0).then_some(&xs[..]), xs.len())?;
            let bits = to_bits(s, &x, 16)?;
            let back = from_bits(s, &bits)?;
            s.open(&back.sub(&x))
        }).unwrap();
        prop_assert!(res.outputs[0].iter().all(|&v| Domain::Ring(16).reduce(v) == 0));
    }

    #[test]
    fn comparison_matches_plaintext(
        family in prop::sample::select(vec![Family::Rep3Ring, Family::Semi, Family::Shamir, Family::FurukawaBin]),
        n in 1usize..10,
        seed: u64,
    ) {
        let params = if family.domain_class() == mpc_forge::engine::DomainClass::Field || family == Family::Shamir {
            DomainParams::prime_field(31).unwrap()
        } else {
            DomainParams::ring(8).unwrap()
        };
        let cfg = ProtocolConfig::new(family, 3, params).unwrap();
        let d = cfg.params.domain;
        let data = KernelData::random(Kernel::Compare, n, d, Prg::from_u64(seed).rng());
        let want = plaintext(Kernel::Compare, n, d, &data);
        let res = simulate(&cfg, &RunOptions::seeded(seed), |s| run_kernel(s, Kernel::Compare, n, (s.id() == 0).then_some(&data))).unwrap();
        prop_assert_eq!(&res.outputs[0], &want);
    }
}
