use std::sync::mpsc::{channel, Sender};
use std::sync::Arc;

use super::{BandwidthCap, Endpoint, Frame, FrameSink, Metrics};
use crate::error::{Error, Result};

struct MemSink(Sender<Frame>);

impl FrameSink for MemSink {
    fn deliver(&mut self, frame: Frame) -> Result<()> {
        self.0.send(frame).map_err(|_| Error::Transport("peer hung up".into()))
    }
}

/// In-process network: one unbounded channel per ordered pair.
pub fn mem_network(n: usize, cap: BandwidthCap, record: bool) -> Result<(Vec<Endpoint>, Arc<Metrics>)> {
    cap.validate()?;
    let metrics = Arc::new(Metrics::new(n, record));
    let mut outs: Vec<Vec<Option<Box<dyn FrameSink>>>> = (0..n).map(|_| (0..n).map(|_| None).collect()).collect();
    let mut incs: Vec<Vec<_>> = (0..n).map(|_| (0..n).map(|_| None).collect()).collect();
    for from in 0..n {
        for to in 0..n {
            if from != to {
                let (tx, rx) = channel();
                outs[from][to] = Some(Box::new(MemSink(tx)));
                incs[to][from] = Some(rx);
            }
        }
    }
    let eps = outs
        .into_iter()
        .zip(incs)
        .enumerate()
        .map(|(id, (out, inc))| Endpoint::new(id, n, out, inc, metrics.clone(), cap))
        .collect::<Result<Vec<_>>>()?;
    Ok((eps, metrics))
}
