use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::algebra::{Domain, DomainParams, MERSENNE_127, MERSENNE_61};
use crate::error::{Error, Result};
use crate::sharing::Scheme;

/// Protocol families that can be instantiated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Semi,
    Semi2k,
    Rep3Ring,
    MalRepRing,
    SpdzField,
    Spdz2k,
    Shamir,
    MalShamir,
    Rep4,
    FurukawaBin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Validation {
    Sacrifice,
    BatchPoly,
    RingCheck,
    Postprocess,
    BucketCnc,
    None,
}

/// How secret integers are split into secret bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Conversion {
    /// Replicated summands re-shared bitwise without communication, then added.
    Local,
    /// One daBit per bit.
    Dabit,
    /// One edaBit per value.
    Edabit,
    /// Arithmetic random bits; the circuit runs on arithmetic shares.
    Off,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TripleSource {
    Dealer,
    Ot,
}

/// Parameters of bucket cut-and-choose.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BucketParams {
    pub b: usize,
    pub c: usize,
    pub l: usize,
}

impl Default for BucketParams {
    fn default() -> Self {
        BucketParams { b: 3, c: 3, l: 1 }
    }
}

macro_rules! names {
    ($t:ty { $($v:ident => $s:literal),* $(,)? }) => {
        impl $t {
            pub fn name(&self) -> &'static str {
                match self { $(Self::$v => $s),* }
            }
        }
        impl FromStr for $t {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s.to_ascii_lowercase().as_str() {
                    $($s => Ok(Self::$v),)*
                    _ => Err(Error::Config(format!("unknown {} {s:?}", stringify!($t)))),
                }
            }
        }
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }
    };
}

names!(Family {
    Semi => "semi",
    Semi2k => "semi2k",
    Rep3Ring => "rep3-ring",
    MalRepRing => "mal-rep-ring",
    SpdzField => "spdz-field",
    Spdz2k => "spdz2k",
    Shamir => "shamir",
    MalShamir => "mal-shamir",
    Rep4 => "rep4",
    FurukawaBin => "furukawa-bin",
});

names!(Validation {
    Sacrifice => "sacrifice",
    BatchPoly => "batch_poly",
    RingCheck => "ring_check",
    Postprocess => "postprocess",
    BucketCnc => "bucket_cnc",
    None => "none",
});

names!(Conversion { Local => "local", Dabit => "dabit", Edabit => "edabit", Off => "off" });

names!(TripleSource { Dealer => "dealer", Ot => "ot" });

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainClass {
    Field,
    Ring,
    Either,
    Bits,
}

impl Family {
    pub const ALL: [Family; 10] = [
        Family::Semi,
        Family::Semi2k,
        Family::Rep3Ring,
        Family::MalRepRing,
        Family::SpdzField,
        Family::Spdz2k,
        Family::Shamir,
        Family::MalShamir,
        Family::Rep4,
        Family::FurukawaBin,
    ];

    pub fn is_malicious(self) -> bool {
        matches!(
            self,
            Family::MalRepRing | Family::SpdzField | Family::Spdz2k | Family::MalShamir | Family::Rep4 | Family::FurukawaBin
        )
    }

    /// The semi-honest family with the same sharing structure.
    pub fn semi_honest_counterpart(self) -> Option<Family> {
        match self {
            Family::MalRepRing | Family::FurukawaBin => Some(Family::Rep3Ring),
            Family::SpdzField => Some(Family::Semi),
            Family::Spdz2k => Some(Family::Semi2k),
            Family::MalShamir => Some(Family::Shamir),
            _ => None,
        }
    }

    pub fn domain_class(self) -> DomainClass {
        match self {
            Family::Semi | Family::SpdzField | Family::Shamir | Family::MalShamir => DomainClass::Field,
            Family::Semi2k | Family::Rep3Ring | Family::MalRepRing | Family::Spdz2k => DomainClass::Ring,
            Family::Rep4 => DomainClass::Either,
            Family::FurukawaBin => DomainClass::Bits,
        }
    }

    pub fn arith_scheme(self) -> Option<Scheme> {
        match self {
            Family::Semi | Family::Semi2k | Family::SpdzField | Family::Spdz2k => Some(Scheme::Additive),
            Family::Rep3Ring | Family::MalRepRing => Some(Scheme::Rep3),
            Family::Shamir | Family::MalShamir => Some(Scheme::Shamir),
            Family::Rep4 => Some(Scheme::Rep4),
            Family::FurukawaBin => None,
        }
    }

    /// Scheme for `Z_2` values, if the family has a binary domain.
    pub fn binary_scheme(self) -> Option<Scheme> {
        match self {
            Family::Semi | Family::Semi2k => Some(Scheme::Additive),
            Family::Rep3Ring | Family::MalRepRing | Family::FurukawaBin => Some(Scheme::Rep3),
            _ => None,
        }
    }

    pub fn uses_macs(self) -> bool {
        matches!(self, Family::SpdzField | Family::Spdz2k)
    }

    pub fn fixed_parties(self) -> Option<usize> {
        match self {
            Family::Rep3Ring | Family::MalRepRing | Family::FurukawaBin => Some(3),
            Family::Rep4 => Some(4),
            _ => None,
        }
    }

    pub fn default_validation(self) -> Validation {
        self.allowed_validations()[0]
    }

    pub fn allowed_validations(self) -> &'static [Validation] {
        match self {
            Family::SpdzField => &[Validation::Sacrifice],
            Family::Spdz2k => &[Validation::RingCheck],
            Family::MalRepRing => &[Validation::Postprocess],
            Family::MalShamir => &[Validation::Postprocess, Validation::BatchPoly],
            Family::FurukawaBin => &[Validation::BucketCnc],
            _ => &[Validation::None],
        }
    }

    pub fn default_conversion(self) -> Conversion {
        match self {
            Family::Semi => Conversion::Dabit,
            Family::Semi2k | Family::MalRepRing => Conversion::Edabit,
            Family::Rep3Ring => Conversion::Local,
            _ => Conversion::Off,
        }
    }

    pub fn allowed_conversions(self) -> &'static [Conversion] {
        match self {
            Family::Semi | Family::Semi2k | Family::MalRepRing => {
                &[Conversion::Dabit, Conversion::Edabit, Conversion::Off]
            }
            Family::Rep3Ring => &[Conversion::Local, Conversion::Dabit, Conversion::Edabit, Conversion::Off],
            _ => &[Conversion::Off],
        }
    }

    /// Whether multiplication consumes Beaver triples.
    pub fn uses_triples(self) -> bool {
        matches!(self, Family::Semi | Family::Semi2k | Family::SpdzField | Family::Spdz2k)
    }
}

/// Everything needed to instantiate a family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProtocolConfig {
    pub family: Family,
    pub n_parties: usize,
    /// Logical domain: the prime field, or the ring / bit width of integers.
    pub params: DomainParams,
    /// Corruption bound for Shamir families.
    pub threshold: usize,
    pub validation: Validation,
    pub conversion: Conversion,
    pub triple_source: TripleSource,
    pub bucket: BucketParams,
}

impl ProtocolConfig {
    /// Defaults for `family` over `params`.
    pub fn new(family: Family, n_parties: usize, params: DomainParams) -> Result<Self> {
        let cfg = ProtocolConfig {
            family,
            n_parties,
            params,
            threshold: n_parties.saturating_sub(1) / 2,
            validation: family.default_validation(),
            conversion: family.default_conversion(),
            triple_source: TripleSource::Dealer,
            bucket: BucketParams::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Family defaults at a benchmark bit width (64 or 128): fields use the
    /// Mersenne prime of that size, everything else a ring of that width.
    pub fn for_bits(family: Family, n_parties: usize, bits: u32) -> Result<Self> {
        let params = match family.domain_class() {
            DomainClass::Field => DomainParams::prime_field(match bits {
                64 => MERSENNE_61,
                128 => MERSENNE_127,
                _ => return Err(Error::Config(format!("field runs support 64 or 128 bits, not {bits}"))),
            })?,
            _ => DomainParams::ring(bits)?,
        };
        Self::new(family, n_parties, params)
    }

    pub fn with_validation(mut self, v: Validation) -> Result<Self> {
        self.validation = v;
        self.validate()?;
        Ok(self)
    }

    pub fn with_conversion(mut self, c: Conversion) -> Result<Self> {
        self.conversion = c;
        self.validate()?;
        Ok(self)
    }

    pub fn with_triple_source(mut self, t: TripleSource) -> Self {
        self.triple_source = t;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let f = self.family;
        let n = self.n_parties;
        if n < 2 {
            return Err(Error::Config(format!("{f} needs at least 2 parties")));
        }
        if let Some(fixed) = f.fixed_parties() {
            if n != fixed {
                return Err(Error::Config(format!("{f} runs with exactly {fixed} parties, not {n}")));
            }
        }
        if matches!(f, Family::Shamir | Family::MalShamir) {
            let t = self.threshold;
            if t == 0 || 2 * t + 1 > n {
                return Err(Error::Config(format!("{f} needs 2t+1 <= n with t >= 1 (n={n}, t={t})")));
            }
        }
        let d = self.params.domain;
        match (f.domain_class(), d) {
            (DomainClass::Field, Domain::Prime(p)) => {
                if (n as u128) >= p {
                    return Err(Error::Config(format!("{f} needs more field elements than parties")));
                }
            }
            (DomainClass::Ring | DomainClass::Bits, Domain::Ring(_)) => {}
            (DomainClass::Either, Domain::Ring(_) | Domain::Prime(_)) => {}
            _ => return Err(Error::Config(format!("{f} does not run over {d}"))),
        }
        if let Domain::Prime(3) = d {
            if f.arith_scheme() == Some(Scheme::Rep3) {
                return Err(Error::Config("replicated sharing needs 3 to be invertible".into()));
            }
        }
        if !f.allowed_validations().contains(&self.validation) {
            return Err(Error::Config(format!("{f} does not support validation {}", self.validation)));
        }
        if !f.allowed_conversions().contains(&self.conversion) {
            return Err(Error::Config(format!("{f} does not support conversion {}", self.conversion)));
        }
        if self.triple_source == TripleSource::Ot && !f.uses_triples() {
            return Err(Error::Config(format!("{f} does not consume Beaver triples")));
        }
        let BucketParams { b, c, l } = self.bucket;
        if b < 2 || l == 0 {
            return Err(Error::Config("bucket parameters need B >= 2 and L >= 1".into()));
        }
        let _ = c;
        self.arith_domain()?;
        Ok(())
    }

    /// Bit width of the integers the kernels work on.
    pub fn int_bits(&self) -> u32 {
        self.params.domain.bits()
    }

    /// Domain in which arithmetic shares are carried.
    pub fn arith_domain(&self) -> Result<Domain> {
        match self.family {
            Family::Spdz2k | Family::MalRepRing => self.params.extended().map_err(|e| Error::Config(e.to_string())),
            Family::FurukawaBin => Ok(Domain::Binary),
            _ => Ok(self.params.domain),
        }
    }

    /// Serializes as `key=value` lines.
    pub fn to_kv(&self) -> String {
        let (kind, modulus) = match self.params.domain {
            Domain::Prime(p) => ("prime", p.to_string()),
            Domain::Ring(k) => ("ring", k.to_string()),
            Domain::Binary => ("binary", "1".into()),
        };
        format!(
            "family={}\nparties={}\ndomain={}\nmodulus={}\nstat_sec={}\nthreshold={}\nvalidation={}\nconversion={}\ntriples={}\nbucket_b={}\nbucket_c={}\nbucket_l={}\n",
            self.family,
            self.n_parties,
            kind,
            modulus,
            self.params.s,
            self.threshold,
            self.validation,
            self.conversion,
            self.triple_source,
            self.bucket.b,
            self.bucket.c,
            self.bucket.l
        )
    }

    /// Parses the format written by [`to_kv`](Self::to_kv); missing keys take
    /// family defaults, `#` starts a comment.
    pub fn from_kv(text: &str) -> Result<Self> {
        let kv = parse_kv(text)?;
        let get = |k: &str| kv.get(k).map(String::as_str);
        let num = |k: &str| -> Result<Option<u128>> {
            get(k).map(|v| v.parse::<u128>().map_err(|_| Error::Config(format!("{k}: bad number {v:?}")))).transpose()
        };
        let family: Family = get("family").ok_or_else(|| Error::Config("missing family".into()))?.parse()?;
        let parties = num("parties")?.unwrap_or(family.fixed_parties().unwrap_or(3) as u128) as usize;
        let params = match (get("domain"), get("bits")) {
            (Some("prime"), _) => DomainParams::prime_field(num("modulus")?.unwrap_or(MERSENNE_61))?,
            (Some("ring"), _) => DomainParams::ring(num("modulus")?.unwrap_or(64) as u32)?,
            (Some(other), _) => return Err(Error::Config(format!("unknown domain {other:?}"))),
            (None, _) => {
                let bits = num("bits")?.unwrap_or(64) as u32;
                Self::for_bits(family, parties, bits)?.params
            }
        };
        let params = match num("stat_sec")? {
            Some(s) => params.with_stat_sec(s as u32)?,
            None => params,
        };
        let mut cfg = ProtocolConfig {
            family,
            n_parties: parties,
            params,
            threshold: parties.saturating_sub(1) / 2,
            validation: family.default_validation(),
            conversion: family.default_conversion(),
            triple_source: TripleSource::Dealer,
            bucket: BucketParams::default(),
        };
        if let Some(t) = num("threshold")? {
            cfg.threshold = t as usize;
        }
        if let Some(v) = get("validation") {
            cfg.validation = v.parse()?;
        }
        if let Some(v) = get("conversion") {
            cfg.conversion = v.parse()?;
        }
        if let Some(v) = get("triples") {
            cfg.triple_source = v.parse()?;
        }
        if let Some(b) = num("bucket_b")? {
            cfg.bucket.b = b as usize;
        }
        if let Some(c) = num("bucket_c")? {
            cfg.bucket.c = c as usize;
        }
        if let Some(l) = num("bucket_l")? {
            cfg.bucket.l = l as usize;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// `key=value` lines; blank lines and `#` comments ignored.
pub fn parse_kv(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key=value", no + 1)))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        for f in Family::ALL {
            let n = f.fixed_parties().unwrap_or(3);
            ProtocolConfig::for_bits(f, n, 64).unwrap();
        }
    }

    #[test]
    fn constraints() {
        assert!(ProtocolConfig::for_bits(Family::Rep3Ring, 4, 64).is_err());
        assert!(ProtocolConfig::for_bits(Family::Shamir, 2, 64).is_err());
        assert!(ProtocolConfig::for_bits(Family::Spdz2k, 3, 128).is_err());
        let c = ProtocolConfig::for_bits(Family::Semi, 3, 64).unwrap();
        assert!(c.clone().with_conversion(Conversion::Local).is_err());
        assert!(c.with_validation(Validation::Sacrifice).is_err());
        let s = ProtocolConfig::new(Family::Semi2k, 3, DomainParams::ring(8).unwrap()).unwrap();
        assert_eq!(s.arith_domain().unwrap(), Domain::Ring(8));
        let m = ProtocolConfig::new(Family::MalRepRing, 3, DomainParams::ring(8).unwrap()).unwrap();
        assert_eq!(m.arith_domain().unwrap(), Domain::Ring(48));
    }

    #[test]
    fn kv_round_trip() {
        let c = ProtocolConfig::for_bits(Family::MalShamir, 5, 64)
            .unwrap()
            .with_validation(Validation::BatchPoly)
            .unwrap();
        assert_eq!(ProtocolConfig::from_kv(&c.to_kv()).unwrap(), c);
        let parsed = ProtocolConfig::from_kv("# sweep cell\nfamily = rep3-ring\nbits=128\n").unwrap();
        assert_eq!(parsed.params.domain, Domain::Ring(128));
        assert!(ProtocolConfig::from_kv("parties=3").is_err());
    }
}
