use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
#[cfg(unix)]
use std::os::unix::net::UnixStream;
use std::path::PathBuf;
use std::sync::{Arc, Condvar, Mutex};
use std::time::Duration;

use super::{BackendError, RequestEnvelope, ResponseEnvelope, StubBackend};

/// Moves one request envelope to a server and returns its response.
pub trait Transport: Send + Sync {
    fn exchange(&self, request: &RequestEnvelope) -> Result<ResponseEnvelope, BackendError>;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Address {
    Tcp(String),
    Unix(PathBuf),
    /// The in-process deterministic stub (see [`StubBackend`]).
    Stub,
}

impl Address {
    /// Accepts `host:port`, `tcp://host:port`, `unix:/path` and `stub`.
    pub fn parse(spec: &str) -> Result<Self, BackendError> {
        let spec = spec.trim();
        if spec == "stub" || spec == "stub:" {
            return Ok(Address::Stub);
        }
        if let Some(path) = spec.strip_prefix("unix://").or_else(|| spec.strip_prefix("unix:")) {
            if path.is_empty() {
                return Err(BackendError::NotConfigured("empty unix socket path".into()));
            }
            return Ok(Address::Unix(PathBuf::from(path)));
        }
        let hostport = spec.strip_prefix("tcp://").unwrap_or(spec);
        match hostport.rsplit_once(':') {
            Some((host, port)) if !host.is_empty() && port.parse::<u16>().is_ok() => {
                Ok(Address::Tcp(hostport.to_string()))
            }
            _ => Err(BackendError::NotConfigured(format!(
                "cannot parse backend address {spec:?}; expected host:port, unix:/path or stub"
            ))),
        }
    }
}

/// Opens a transport for `spec` (see [`Address::parse`]).
pub fn connect(spec: &str, max_in_flight: usize) -> Result<Arc<dyn Transport>, BackendError> {
    Ok(match Address::parse(spec)? {
        Address::Stub => Arc::new(StubBackend),
        addr => Arc::new(SocketTransport::new(addr, max_in_flight)),
    })
}

trait Stream: Read + Write + Send {}
impl<T: Read + Write + Send> Stream for T {}

type Conn = BufReader<Box<dyn Stream>>;

/// Line-delimited envelopes over TCP or a Unix socket.
///
/// Keeps a pool of idle connections; at most `max_in_flight` requests are
/// outstanding at once. Each connection carries one request at a time and
/// the response id must echo the request id.
pub struct SocketTransport {
    address: Address,
    idle: Mutex<Vec<Conn>>,
    in_flight: Mutex<usize>,
    slot_freed: Condvar,
    max_in_flight: usize,
    timeout: Duration,
}

impl SocketTransport {
    pub fn new(address: Address, max_in_flight: usize) -> Self {
        Self {
            address,
            idle: Mutex::new(Vec::new()),
            in_flight: Mutex::new(0),
            slot_freed: Condvar::new(),
            max_in_flight: max_in_flight.max(1),
            timeout: Duration::from_secs(120),
        }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    fn open(&self) -> Result<Conn, BackendError> {
        let io = |e: std::io::Error| BackendError::Transport(format!("{:?}: {e}", self.address));
        let stream: Box<dyn Stream> = match &self.address {
            Address::Tcp(hostport) => {
                let s = TcpStream::connect(hostport).map_err(io)?;
                s.set_read_timeout(Some(self.timeout)).map_err(io)?;
                s.set_nodelay(true).ok();
                Box::new(s)
            }
            #[cfg(unix)]
            Address::Unix(path) => {
                let s = UnixStream::connect(path).map_err(io)?;
                s.set_read_timeout(Some(self.timeout)).map_err(io)?;
                Box::new(s)
            }
            #[cfg(not(unix))]
            Address::Unix(_) => {
                return Err(BackendError::NotConfigured("unix sockets unavailable".into()))
            }
            Address::Stub => {
                return Err(BackendError::NotConfigured("stub is not a socket address".into()))
            }
        };
        Ok(BufReader::new(stream))
    }

    fn acquire(&self) {
        let mut n = self.in_flight.lock().unwrap_or_else(|p| p.into_inner());
        while *n >= self.max_in_flight {
            n = self.slot_freed.wait(n).unwrap_or_else(|p| p.into_inner());
        }
        *n += 1;
    }

    fn release(&self) {
        let mut n = self.in_flight.lock().unwrap_or_else(|p| p.into_inner());
        *n -= 1;
        self.slot_freed.notify_one();
    }

    fn round_trip(&self, conn: &mut Conn, line: &str) -> Result<String, BackendError> {
        let io = |e: std::io::Error| BackendError::Transport(e.to_string());
        let w = conn.get_mut();
        w.write_all(line.as_bytes()).map_err(io)?;
        w.write_all(b"\n").map_err(io)?;
        w.flush().map_err(io)?;
        let mut reply = String::new();
        if conn.read_line(&mut reply).map_err(io)? == 0 {
            return Err(BackendError::Transport("server closed the connection".into()));
        }
        Ok(reply)
    }
}

impl Transport for SocketTransport {
    fn exchange(&self, request: &RequestEnvelope) -> Result<ResponseEnvelope, BackendError> {
        self.acquire();
        let result = (|| {
            let pooled = self.idle.lock().unwrap_or_else(|p| p.into_inner()).pop();
            let mut conn = match pooled {
                Some(c) => c,
                None => self.open()?,
            };
            let reply = self.round_trip(&mut conn, &request.to_line())?;
            let response = ResponseEnvelope::parse(reply.trim_end())?;
            if response.id != request.id {
                return Err(BackendError::Protocol(format!(
                    "response id {} does not match request id {}",
                    response.id, request.id
                )));
            }
            self.idle.lock().unwrap_or_else(|p| p.into_inner()).push(conn);
            Ok(response)
        })();
        self.release();
        result
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn address_forms() {
        assert_eq!(Address::parse("127.0.0.1:7000").unwrap(), Address::Tcp("127.0.0.1:7000".into()));
        assert_eq!(Address::parse("tcp://localhost:1").unwrap(), Address::Tcp("localhost:1".into()));
        assert_eq!(Address::parse("unix:/tmp/s.sock").unwrap(), Address::Unix("/tmp/s.sock".into()));
        assert_eq!(Address::parse("stub").unwrap(), Address::Stub);
        assert!(Address::parse("nonsense").is_err());
        assert!(Address::parse("host:notaport").is_err());
    }

    #[test]
    fn connection_refused_is_transport_error() {
        // Bind then drop to get a port nobody listens on.
        let port = std::net::TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
        let t = SocketTransport::new(Address::Tcp(format!("127.0.0.1:{port}")), 1);
        let req = RequestEnvelope {
            id: 1,
            task: super::super::Task::Langid,
            model_id: "m".into(),
            items: vec![],
        };
        let err = t.exchange(&req).unwrap_err();
        assert!(err.is_retryable(), "{err}");
    }
}
