use super::config::Validation;
use super::session::Session;
use super::share::{decode, digest, encode};
use crate::auth::batch_coefficients;
use crate::error::{Error, Result};
use crate::preprocessing::{batch_poly_check, bucket_cut_and_choose, furukawa_check, postprocess_check, Triples};
use crate::transport::MsgKind;

/// AND gates verified per bucket run.
const AND_CHUNK: usize = 1 << 16;

/// Logged AND gates that trigger verification before the run ends.
pub(crate) const AND_FLUSH: usize = 1 << 18;

impl Session {
    /// Runs every deferred check: product postprocessing, AND verification
    /// and the MAC check on all opened values.
    pub fn finish(&mut self) -> Result<()> {
        self.run_validation()?;
        if self.cfg.family.uses_macs() {
            self.mac_check()?;
        }
        Ok(())
    }

    /// Checks the logged optimistic products with the configured validator.
    pub fn run_validation(&mut self) -> Result<()> {
        if let Some((a, b, c)) = self.mult_log.take() {
            let log = Triples { a, b, c };
            match self.cfg.validation {
                Validation::BatchPoly => batch_poly_check(self, &log)?,
                Validation::Postprocess => postprocess_check(self, &log)?,
                _ => {}
            }
        }
        self.verify_ands()
    }

    /// Verifies every logged AND gate against checked bucket triples.
    pub(crate) fn verify_ands(&mut self) -> Result<()> {
        if let Some((a, b, c)) = self.and_log.take() {
            let log = Triples { a, b, c };
            let l = self.cfg.bucket.l;
            // Chunked so the bucket working set stays bounded.
            for start in (0..log.len()).step_by(AND_CHUNK) {
                let part = log.slice(start..log.len().min(start + AND_CHUNK));
                let n = part.len();
                let padded = n.div_ceil(l) * l;
                let triples = bucket_cut_and_choose(self, padded)?.slice(0..n);
                self.stats.bin_triples += n as u64;
                if furukawa_check(self, &part, &triples)?.iter().any(|ok| !ok) {
                    return Err(Error::Abort("AND gate failed verification".into()));
                }
            }
        }
        Ok(())
    }

    /// Batched MAC check over everything opened since the last check. Each
    /// party commits to its share of `sum chi_i (m_i - alpha * v_i)` before
    /// revealing it.
    pub fn mac_check(&mut self) -> Result<()> {
        let log = std::mem::take(&mut self.mac_log);
        if log.is_empty() {
            return Ok(());
        }
        let d = self.arith;
        let chi = batch_coefficients(self.joint()?, d, log.len());
        let mut y = 0u128;
        let mut m = 0u128;
        for ((v, tag), c) in log.iter().zip(&chi) {
            y = d.add(y, d.mul(*c, *v));
            m = d.add(m, d.mul(*c, *tag));
        }
        let sigma = d.sub(m, d.mul(self.alpha, y));
        let mut opening = encode(d, &[sigma]);
        opening.extend_from_slice(&self.local.fill(crate::algebra::Domain::Ring(128), 1)[0].to_le_bytes());
        let commits = self.net.broadcast(MsgKind::Commit, digest(&opening))?;
        let reveals = self.net.broadcast(MsgKind::Reveal, opening)?;
        let width = reveals[self.id].len() - 16;
        let mut total = 0u128;
        for (c, r) in commits.iter().zip(&reveals) {
            if r.len() != width + 16 || digest(r) != *c {
                return Err(Error::Abort("MAC check commitment does not open".into()));
            }
            total = d.add(total, decode(d, &r[..width], 1)?[0]);
        }
        if total != 0 {
            return Err(Error::Abort("MAC check failed".into()));
        }
        Ok(())
    }
}
