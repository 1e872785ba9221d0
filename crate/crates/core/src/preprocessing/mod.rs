//! Offline generation and validation of correlated randomness.

mod bits;
mod bucket;
mod checks;
mod ot;
mod pool;
mod triples;

use std::ops::Range;

pub use bits::{gen_dabits, gen_edabits, DaBits, EdaBits};
pub use bucket::{BucketPlan, bucket_cut_and_choose, bucket_cut_and_choose_with, bucket_random_sharings, furukawa_check, furukawa_triple_gen};
pub use checks::{
    batch_poly_accepts_at, batch_poly_check, pairwise_sacrifice_check, pairwise_sacrifice_verdicts, postprocess_check,
    postprocess_verdicts, ring_check_verdicts, ring_triple_check, sacrifice_check, sacrifice_verdicts,
};
pub use ot::ot_cross_product;
pub use pool::{read_pool, write_pool, PoolHeader};
pub use triples::{deal_triples, gen_triples_dealer, gen_triples_ot, BeaverTriple};

use crate::engine::Sh;

/// One party's shares of a batch of multiplication triples `c = a * b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triples {
    pub a: Sh,
    pub b: Sh,
    pub c: Sh,
}

impl Triples {
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn slice(&self, r: Range<usize>) -> Triples {
        Triples { a: self.a.slice(r.clone()), b: self.b.slice(r.clone()), c: self.c.slice(r) }
    }

    pub fn select(&self, idx: &[usize]) -> Triples {
        Triples { a: self.a.select(idx), b: self.b.select(idx), c: self.c.select(idx) }
    }

    pub fn append(&mut self, o: &Triples) {
        self.a.append(&o.a);
        self.b.append(&o.b);
        self.c.append(&o.c);
    }
}
