use mpc_forge::algebra::{DomainParams, Prg};
use mpc_forge::engine::{simulate, DomainClass, Family, ProtocolConfig, RunOptions};
use mpc_forge::kernels::{plaintext, run_kernel, Kernel, KernelData};

fn configs() -> Vec<ProtocolConfig> {
    let mut out = Vec::new();
    for f in Family::ALL {
        let n = f.fixed_parties().unwrap_or(3);
        if matches!(f.domain_class(), DomainClass::Field | DomainClass::Either) {
            out.push(ProtocolConfig::new(f, n, DomainParams::prime_field(31).unwrap()).unwrap());
        }
        if !matches!(f.domain_class(), DomainClass::Field) {
            out.push(ProtocolConfig::new(f, n, DomainParams::ring(8).unwrap()).unwrap());
        }
    }
    out
}

fn check(cfg: &ProtocolConfig, kernel: Kernel, n: usize, data: &KernelData, seed: u64) {
    let d = cfg.params.domain;
    let want = plaintext(kernel, n, d, data);
    let res = simulate(cfg, &RunOptions::seeded(seed), |s| run_kernel(s, kernel, n, (s.id() == 0).then_some(data)))
        .unwrap_or_else(|e| panic!("{} over {d} {kernel}: {e}", cfg.family));
    for out in &res.outputs {
        assert_eq!(out, &want, "{} over {d} {kernel}", cfg.family);
    }
}

#[test]
fn every_family_matches_the_plaintext_kernels() {
    let mut prg = Prg::from_u64(99);
    for cfg in configs() {
        for kernel in Kernel::ALL {
            let n = if kernel == Kernel::Matmul { 3 } else { 6 };
            let data = KernelData::random(kernel, n, cfg.params.domain, prg.rng());
            check(&cfg, kernel, n, &data, 5);
        }
    }
}

#[test]
fn hand_examples() {
    let cfg = ProtocolConfig::new(Family::Rep3Ring, 3, DomainParams::ring(8).unwrap()).unwrap();
    let data = KernelData { a: vec![1, 2, 3, 4], b: vec![5, 6, 7, 8] };
    check(&cfg, Kernel::Matmul, 2, &data, 1);
    let res = simulate(&cfg, &RunOptions::seeded(1), |s| run_kernel(s, Kernel::Matmul, 2, (s.id() == 0).then_some(&data))).unwrap();
    assert_eq!(res.outputs[0], vec![19, 22, 43, 50]);
    let ip = KernelData { a: vec![1, 2, 3], b: vec![4, 5, 6] };
    let res = simulate(&cfg, &RunOptions::seeded(1), |s| run_kernel(s, Kernel::InnerProduct, 3, (s.id() == 0).then_some(&ip))).unwrap();
    assert_eq!(res.outputs[0], vec![32]);
    let sorted = KernelData { a: vec![1, 1, 4, 9, 200], b: vec![] };
    check(&cfg, Kernel::Sort, 5, &sorted, 2);
    let same = KernelData { a: vec![7; 5], b: vec![7; 5] };
    check(&cfg, Kernel::Compare, 5, &same, 3);
}

#[test]
fn compare_is_exhaustive_on_four_bit_pairs() {
    let cfg = ProtocolConfig::new(Family::Rep3Ring, 3, DomainParams::ring(4).unwrap()).unwrap();
    let (a, b): (Vec<u128>, Vec<u128>) = (0..16).flat_map(|x| (0..16).map(move |y| (x, y))).unzip();
    check(&cfg, Kernel::Compare, 256, &KernelData { a, b }, 4);
}
