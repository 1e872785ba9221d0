use std::io::{BufReader, Read, Write};
use std::net::{Shutdown, SocketAddr, TcpListener, TcpStream};
use std::sync::mpsc::{channel, Sender};
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use super::{BandwidthCap, Endpoint, Frame, FrameSink, Metrics, MsgKind, FRAME_HEADER};
use crate::error::{Error, Result};

struct TcpSink(TcpStream);

impl FrameSink for TcpSink {
    fn deliver(&mut self, frame: Frame) -> Result<()> {
        self.0.write_all(&frame.encode())?;
        Ok(())
    }
}

impl Drop for TcpSink {
    fn drop(&mut self) {
        let _ = self.0.shutdown(Shutdown::Write);
    }
}

fn read_frame<R: Read>(r: &mut R) -> Result<Option<Frame>> {
    let mut header = [0u8; FRAME_HEADER];
    match r.read_exact(&mut header) {
        Ok(()) => {}
        Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => return Ok(None),
        Err(e) => return Err(e.into()),
    }
    let len = u32::from_be_bytes([header[0], header[1], header[2], header[3]]) as usize;
    let kind = MsgKind::from_byte(header[4])?;
    let mut payload = vec![0u8; len];
    r.read_exact(&mut payload)?;
    Ok(Some(Frame { kind, payload }))
}

/// Drains one stream into a channel so that slow readers never block the
/// peer's writes.
fn spawn_reader(stream: TcpStream, tx: Sender<Frame>) {
    thread::spawn(move || {
        let mut r = BufReader::with_capacity(1 << 16, stream);
        while let Ok(Some(f)) = read_frame(&mut r) {
            if tx.send(f).is_err() {
                break;
            }
        }
    });
}

fn connect_retry(addr: SocketAddr, deadline: Instant) -> Result<TcpStream> {
    loop {
        match TcpStream::connect(addr) {
            Ok(s) => return Ok(s),
            Err(e) if Instant::now() < deadline => {
                let _ = e;
                thread::sleep(Duration::from_millis(20));
            }
            Err(e) => return Err(Error::Transport(format!("connecting to {addr}: {e}"))),
        }
    }
}

/// Joins a TCP mesh as party `id`. Lower ids accept, higher ids connect;
/// the connecting side announces itself with a 2-byte id that is not part of
/// the metered traffic.
pub fn tcp_endpoint(
    id: usize,
    listener: TcpListener,
    addrs: &[SocketAddr],
    metrics: Arc<Metrics>,
    cap: BandwidthCap,
    connect_timeout: Duration,
) -> Result<Endpoint> {
    let n = addrs.len();
    let deadline = Instant::now() + connect_timeout;
    let mut streams: Vec<Option<TcpStream>> = (0..n).map(|_| None).collect();
    for (j, &addr) in addrs.iter().enumerate().take(id) {
        let mut s = connect_retry(addr, deadline)?;
        s.write_all(&(id as u16).to_be_bytes())?;
        streams[j] = Some(s);
    }
    for _ in id + 1..n {
        let (mut s, _) = listener.accept()?;
        let mut b = [0u8; 2];
        s.read_exact(&mut b)?;
        let peer = u16::from_be_bytes(b) as usize;
        if peer <= id || peer >= n || streams[peer].is_some() {
            return Err(Error::Transport(format!("unexpected peer id {peer}")));
        }
        streams[peer] = Some(s);
    }
    let mut out: Vec<Option<Box<dyn FrameSink>>> = (0..n).map(|_| None).collect();
    let mut inc: Vec<Option<_>> = (0..n).map(|_| None).collect();
    for (j, s) in streams.into_iter().enumerate() {
        if let Some(s) = s {
            s.set_nodelay(true)?;
            let (tx, rx) = channel();
            spawn_reader(s.try_clone()?, tx);
            out[j] = Some(Box::new(TcpSink(s)));
            inc[j] = Some(rx);
        }
    }
    Endpoint::new(id, n, out, inc, metrics, cap)
}

/// Loopback mesh of `n` parties inside this process.
pub fn tcp_network_local(n: usize, cap: BandwidthCap, record: bool) -> Result<(Vec<Endpoint>, Arc<Metrics>)> {
    cap.validate()?;
    let metrics = Arc::new(Metrics::new(n, record));
    let listeners = (0..n).map(|_| TcpListener::bind("127.0.0.1:0")).collect::<std::io::Result<Vec<_>>>()?;
    let addrs = listeners.iter().map(|l| l.local_addr()).collect::<std::io::Result<Vec<_>>>()?;
    let eps = thread::scope(|s| {
        let handles: Vec<_> = listeners
            .into_iter()
            .enumerate()
            .map(|(id, l)| {
                let (addrs, metrics) = (&addrs, metrics.clone());
                s.spawn(move || tcp_endpoint(id, l, addrs, metrics, cap, Duration::from_secs(10)))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("connect thread")).collect::<Result<Vec<_>>>()
    })?;
    Ok((eps, metrics))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loopback_mesh_matches_mem_accounting() {
        let (eps, metrics) = tcp_network_local(3, BandwidthCap::UNLIMITED, false).unwrap();
        thread::scope(|s| {
            for mut ep in eps {
                s.spawn(move || {
                    let got = ep.broadcast(MsgKind::Data, vec![ep.id() as u8; 10]).unwrap();
                    assert_eq!(got[2], vec![2u8; 10]);
                });
            }
        });
        assert_eq!(metrics.global_bytes(), 6 * 15);
    }
}
