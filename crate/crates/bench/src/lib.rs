//! Runs kernels under chosen protocol configurations and records latency,
//! traffic and preprocessing consumption.

use std::io::{Read, Write};
use std::process::Command;
use std::str::FromStr;
use std::time::{Duration, Instant};

use mpc_forge::algebra::Prg;
use mpc_forge::engine::{parse_kv, simulate, Backend, Conversion, Family, ProtocolConfig, RunOptions, Validation};
use mpc_forge::kernels::{run_kernel, Kernel, KernelData};
use mpc_forge::transport::BandwidthCap;
use mpc_forge::{Error, Result};
use serde::{Deserialize, Serialize};

/// Version of the report columns.
pub const SCHEMA_VERSION: u32 = 1;

/// Default wall-clock limit of one run.
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(600);

/// One benchmark cell.
#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub family: Family,
    pub kernel: Kernel,
    pub n: usize,
    pub bits: u32,
    pub parties: usize,
    pub bandwidth: BandwidthCap,
    pub timeout: Duration,
    pub backend: Backend,
    pub seed: u64,
    pub validation: Option<Validation>,
    pub conversion: Option<Conversion>,
}

impl BenchConfig {
    pub fn new(family: Family, kernel: Kernel, n: usize, bits: u32) -> Self {
        BenchConfig {
            family,
            kernel,
            n,
            bits,
            parties: family.fixed_parties().unwrap_or(3),
            bandwidth: BandwidthCap::UNLIMITED,
            timeout: DEFAULT_TIMEOUT,
            backend: Backend::Memory,
            seed: 1,
            validation: None,
            conversion: None,
        }
    }

    pub fn protocol(&self) -> Result<ProtocolConfig> {
        let mut cfg = ProtocolConfig::for_bits(self.family, self.parties, self.bits)?;
        if let Some(v) = self.validation {
            cfg = cfg.with_validation(v)?;
        }
        if let Some(c) = self.conversion {
            cfg = cfg.with_conversion(c)?;
        }
        Ok(cfg)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Timeout,
    Abort,
    Error,
}

/// Result of one cell. Timed-out runs carry no byte or round figures.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: u32,
    pub family: String,
    pub kernel: String,
    pub n: usize,
    pub bits: u32,
    pub parties: usize,
    pub bandwidth: String,
    pub backend: String,
    pub domain: String,
    pub validation: String,
    pub conversion: String,
    pub input_owner: usize,
    pub seed: u64,
    pub git: String,
    pub status: Status,
    pub latency_s: f64,
    pub global_bytes: Option<u64>,
    pub rounds: Option<u64>,
    pub triples_consumed: Option<u64>,
    /// Bytes sent by each party, `;`-separated.
    pub party_bytes: String,
    pub message: String,
}

fn git_describe() -> String {
    Command::new("git")
        .args(["describe", "--always", "--dirty"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .map(|o| String::from_utf8_lossy(&o.stdout).trim().to_string())
        .unwrap_or_else(|| "unknown".into())
}

/// Runs one cell. Configuration errors are returned; timeouts and aborts
/// become report statuses.
pub fn run_benchmark(bc: &BenchConfig) -> Result<RunReport> {
    let cfg = bc.protocol()?;
    if bc.n == 0 {
        return Err(Error::Config("n must be positive".into()));
    }
    let data = KernelData::random(bc.kernel, bc.n, cfg.params.domain, Prg::from_u64(bc.seed).rng());
    let opts = RunOptions { seed: bc.seed, cap: bc.bandwidth, backend: bc.backend, timeout: Some(bc.timeout), record: false, faults: Vec::new() };
    let start = Instant::now();
    let res = simulate(&cfg, &opts, |s| run_kernel(s, bc.kernel, bc.n, (s.id() == 0).then_some(&data)));
    let latency_s = start.elapsed().as_secs_f64();
    let mut report = RunReport {
        schema: SCHEMA_VERSION,
        family: bc.family.to_string(),
        kernel: bc.kernel.to_string(),
        n: bc.n,
        bits: bc.bits,
        parties: bc.parties,
        bandwidth: bc.bandwidth.label(),
        backend: match bc.backend {
            Backend::Memory => "mem".into(),
            Backend::Tcp => "tcp".into(),
        },
        domain: cfg.params.domain.to_string(),
        validation: cfg.validation.to_string(),
        conversion: cfg.conversion.to_string(),
        input_owner: 0,
        seed: bc.seed,
        git: git_describe(),
        status: Status::Ok,
        latency_s,
        global_bytes: None,
        rounds: None,
        triples_consumed: None,
        party_bytes: String::new(),
        message: String::new(),
    };
    match res {
        Ok(r) => {
            report.global_bytes = Some(r.net.global_bytes());
            report.rounds = Some(r.net.rounds());
            report.triples_consumed = Some(r.counters[0].triples + r.counters[0].bin_triples);
            report.party_bytes = r.net.bytes.iter().map(|row| row.iter().sum::<u64>().to_string()).collect::<Vec<_>>().join(";");
        }
        Err(Error::Timeout) => {
            report.status = Status::Timeout;
            report.message = "timeout".into();
        }
        Err(e @ (Error::Abort(_) | Error::InconsistentBroadcast)) => {
            report.status = Status::Abort;
            report.message = e.to_string();
        }
        Err(e) => {
            report.status = Status::Error;
            report.message = e.to_string();
        }
    }
    Ok(report)
}

/// Axes of a sweep; every combination is one cell.
#[derive(Clone, Debug)]
pub struct SweepMatrix {
    pub families: Vec<Family>,
    pub kernels: Vec<Kernel>,
    pub ns: Vec<usize>,
    pub bits: Vec<u32>,
    /// Empty means each family's default party count.
    pub parties: Vec<usize>,
    pub bandwidths: Vec<BandwidthCap>,
    pub timeout: Duration,
    pub backend: Backend,
    pub seed: u64,
}

fn list<T: FromStr>(v: &str) -> Result<Vec<T>> {
    v.split(',').map(str::trim).filter(|x| !x.is_empty()).map(|x| x.parse::<T>().map_err(|_| Error::Config(format!("bad list item {x:?}")))).collect()
}

impl SweepMatrix {
    /// Reads `key = v1, v2, ...` lines: families, kernels, n, bits, parties,
    /// bandwidth, timeout (seconds), backend, seed.
    pub fn from_kv(text: &str) -> Result<Self> {
        let kv = parse_kv(text)?;
        let get = |k: &str| kv.get(k).map(String::as_str);
        let m = SweepMatrix {
            families: list(get("families").ok_or_else(|| Error::Config("missing families".into()))?)?,
            kernels: list(get("kernels").ok_or_else(|| Error::Config("missing kernels".into()))?)?,
            ns: list(get("n").ok_or_else(|| Error::Config("missing n".into()))?)?,
            bits: list(get("bits").unwrap_or("64"))?,
            parties: list(get("parties").unwrap_or(""))?,
            bandwidths: get("bandwidth").unwrap_or("unlimited").split(',').map(BandwidthCap::parse).collect::<Result<_>>()?,
            timeout: Duration::from_secs(get("timeout").map(|t| t.parse().map_err(|_| Error::Config("bad timeout".into()))).transpose()?.unwrap_or(600)),
            backend: get("backend").unwrap_or("mem").parse()?,
            seed: get("seed").map(|t| t.parse().map_err(|_| Error::Config("bad seed".into()))).transpose()?.unwrap_or(1),
        };
        if m.families.is_empty() || m.kernels.is_empty() || m.ns.is_empty() || m.bits.is_empty() || m.bandwidths.is_empty() {
            return Err(Error::Config("sweep matrix has an empty axis".into()));
        }
        Ok(m)
    }

    pub fn cells(&self) -> Vec<BenchConfig> {
        let mut out = Vec::new();
        for &family in &self.families {
            let parties = if self.parties.is_empty() { vec![family.fixed_parties().unwrap_or(3)] } else { self.parties.clone() };
            for &kernel in &self.kernels {
                for &n in &self.ns {
                    for &bits in &self.bits {
                        for &p in &parties {
                            for &bw in &self.bandwidths {
                                let mut c = BenchConfig::new(family, kernel, n, bits);
                                c.parties = p;
                                c.bandwidth = bw;
                                c.timeout = self.timeout;
                                c.backend = self.backend;
                                c.seed = self.seed;
                                out.push(c);
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// Runs every cell in order. Cells that cannot be configured are recorded
/// with status `error` and the sweep moves on.
pub fn sweep(m: &SweepMatrix) -> Vec<RunReport> {
    m.cells()
        .into_iter()
        .map(|c| {
            run_benchmark(&c).unwrap_or_else(|e| RunReport {
                schema: SCHEMA_VERSION,
                family: c.family.to_string(),
                kernel: c.kernel.to_string(),
                n: c.n,
                bits: c.bits,
                parties: c.parties,
                bandwidth: c.bandwidth.label(),
                backend: format!("{:?}", c.backend).to_lowercase(),
                domain: String::new(),
                validation: String::new(),
                conversion: String::new(),
                input_owner: 0,
                seed: c.seed,
                git: git_describe(),
                status: Status::Error,
                latency_s: 0.0,
                global_bytes: None,
                rounds: None,
                triples_consumed: None,
                party_bytes: String::new(),
                message: e.to_string(),
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Config(format!("unknown format {s:?}"))),
        }
    }
}

const CSV_HEADER: &str = "schema,family,kernel,n,bits,parties,bandwidth,backend,domain,validation,conversion,input_owner,seed,git,status,latency_s,global_bytes,rounds,triples_consumed,party_bytes,message";

pub fn emit_report<W: Write>(reports: &[RunReport], format: Format, out: W) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
            w.write_record(CSV_HEADER.split(',')).map_err(|e| Error::Io(std::io::Error::other(e)))?;
            for r in reports {
                w.serialize(r).map_err(|e| Error::Io(std::io::Error::other(e)))?;
            }
            w.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(out, reports).map_err(|e| Error::Io(std::io::Error::other(e)))?;
        }
    }
    Ok(())
}

pub fn read_report<R: Read>(input: R, format: Format) -> Result<Vec<RunReport>> {
    match format {
        Format::Csv => csv::Reader::from_reader(input).deserialize().map(|r| r.map_err(|e| Error::Decode(e.to_string()))).collect(),
        Format::Json => serde_json::from_reader(input).map_err(|e| Error::Decode(e.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(family: Family, kernel: Kernel) -> BenchConfig {
        BenchConfig::new(family, kernel, 4, 16)
    }

    #[test]
    fn csv_and_json_round_trip() {
        let reports = vec![
            run_benchmark(&small(Family::Rep3Ring, Kernel::Compare)).unwrap(),
            run_benchmark(&small(Family::Semi2k, Kernel::InnerProduct)).unwrap(),
        ];
        for format in [Format::Csv, Format::Json] {
            let mut buf = Vec::new();
            emit_report(&reports, format, &mut buf).unwrap();
            assert_eq!(read_report(&buf[..], format).unwrap(), reports, "{format:?}");
        }
    }

    #[test]
    fn empty_report_is_header_only() {
        let mut buf = Vec::new();
        emit_report(&[], Format::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1);
        assert!(text.starts_with("schema,family,kernel,n,"));
        assert!(read_report(text.as_bytes(), Format::Csv).unwrap().is_empty());
    }

    #[test]
    fn two_by_two_sweep_gives_four_rows() {
        let m = SweepMatrix::from_kv("families = rep3-ring, semi2k\nkernels = compare, inner_product\nn = 3\nbits = 16\n").unwrap();
        let rows = sweep(&m);
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.status == Status::Ok));
    }

    #[test]
    fn rerun_gives_identical_byte_columns() {
        let cfg = small(Family::MalRepRing, Kernel::Sort);
        let a = run_benchmark(&cfg).unwrap();
        let b = run_benchmark(&cfg).unwrap();
        assert_eq!((a.global_bytes, a.rounds, &a.party_bytes), (b.global_bytes, b.rounds, &b.party_bytes));
        assert!(a.global_bytes.unwrap() > 0);
    }

    #[test]
    fn timeout_reports_no_bytes() {
        let mut cfg = BenchConfig::new(Family::SpdzField, Kernel::Sort, 64, 64);
        cfg.timeout = Duration::from_millis(1);
        let r = run_benchmark(&cfg).unwrap();
        assert_eq!(r.status, Status::Timeout);
        assert_eq!((r.global_bytes, r.rounds, r.triples_consumed), (None, None, None));
    }

    #[test]
    fn invalid_party_count_is_a_config_error() {
        let mut cfg = small(Family::Rep4, Kernel::Compare);
        cfg.parties = 3;
        assert!(matches!(run_benchmark(&cfg), Err(Error::Config(_))));
        let mut cfg = small(Family::Shamir, Kernel::Compare);
        cfg.parties = 2;
        assert!(matches!(run_benchmark(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn sweep_records_bad_cells_as_errors() {
        let m = SweepMatrix::from_kv("families = rep4\nkernels = compare\nn = 2\nbits = 16\nparties = 3\n").unwrap();
        let rows = sweep(&m);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].status, Status::Error);
    }

    #[test]
    fn larger_inputs_send_more() {
        let bytes = |n| run_benchmark(&BenchConfig::new(Family::Rep3Ring, Kernel::Compare, n, 32)).unwrap().global_bytes.unwrap();
        let sizes = [2, 8, 32, 128];
        let b: Vec<u64> = sizes.iter().map(|&n| bytes(n)).collect();
        assert!(b.windows(2).all(|w| w[0] < w[1]), "{b:?}");
    }

    #[test]
    fn unknown_sweep_values_are_rejected() {
        assert!(SweepMatrix::from_kv("families = nope\nkernels = compare\nn = 2\n").is_err());
        assert!(SweepMatrix::from_kv("kernels = compare\nn = 2\n").is_err());
    }
}
