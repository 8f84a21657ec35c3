//! Minimal scripted HTTP server speaking the scorer protocol, for tests and
//! offline runs.

use std::io::{self, BufRead, BufReader, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;

#[derive(Clone, Debug)]
pub enum MockReply {
    /// `200 OK` with the given body.
    Ok(String),
    /// The given status with an empty body.
    Status(u16),
}

impl MockReply {
    pub fn scores(aesthetic: f64, alignment: f64) -> Self {
        MockReply::Ok(format!(r#"{{"aesthetic": {aesthetic}, "alignment": {alignment}}}"#))
    }
}

/// Serves scripted replies in order, one per connection. Once the script is
/// exhausted the listener closes (clients see connection refused), unless
/// `repeat_last` was requested.
pub struct MockScorerServer {
    addr: SocketAddr,
    requests: Arc<Mutex<Vec<String>>>,
    stop: Arc<AtomicBool>,
    handle: Option<JoinHandle<()>>,
}

fn read_request(stream: &mut TcpStream) -> io::Result<String> {
    let mut reader = BufReader::new(stream);
    let mut content_length = 0usize;
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line)? == 0 {
            break;
        }
        let line = line.trim_end();
        if line.is_empty() {
            break;
        }
        if let Some((k, v)) = line.split_once(':') {
            if k.eq_ignore_ascii_case("content-length") {
                content_length = v.trim().parse().unwrap_or(0);
            }
        }
    }
    let mut body = vec![0u8; content_length];
    reader.read_exact(&mut body)?;
    Ok(String::from_utf8_lossy(&body).into_owned())
}

fn reason(code: u16) -> &'static str {
    match code {
        200 => "OK",
        404 => "Not Found",
        500 => "Internal Server Error",
        503 => "Service Unavailable",
        _ => "Status",
    }
}

fn respond(stream: &mut TcpStream, reply: &MockReply) -> io::Result<()> {
    let (code, body) = match reply {
        MockReply::Ok(body) => (200, body.as_str()),
        MockReply::Status(code) => (*code, ""),
    };
    write!(
        stream,
        "HTTP/1.1 {code} {}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
        reason(code),
        body.len()
    )?;
    stream.flush()
}

impl MockScorerServer {
    pub fn start(script: Vec<MockReply>, repeat_last: bool) -> io::Result<Self> {
        let listener = TcpListener::bind("127.0.0.1:0")?;
        let addr = listener.local_addr()?;
        let requests = Arc::new(Mutex::new(Vec::new()));
        let stop = Arc::new(AtomicBool::new(false));
        let (req_log, stop_flag) = (Arc::clone(&requests), Arc::clone(&stop));
        let handle = std::thread::spawn(move || {
            let mut served = 0usize;
            for stream in listener.incoming() {
                if stop_flag.load(Ordering::SeqCst) {
                    break;
                }
                let Ok(mut stream) = stream else { continue };
                let reply = match script.get(served) {
                    Some(r) => r.clone(),
                    None if repeat_last && !script.is_empty() => script[script.len() - 1].clone(),
                    None => break,
                };
                if let Ok(body) = read_request(&mut stream) {
                    req_log.lock().unwrap().push(body);
                }
                let _ = respond(&mut stream, &reply);
                served += 1;
                if served >= script.len() && !repeat_last {
                    break;
                }
            }
        });
        Ok(Self {
            addr,
            requests,
            stop,
            handle: Some(handle),
        })
    }

    /// Always answers with the same scores.
    pub fn constant(aesthetic: f64, alignment: f64) -> io::Result<Self> {
        Self::start(vec![MockReply::scores(aesthetic, alignment)], true)
    }

    pub fn endpoint(&self) -> String {
        format!("http://{}", self.addr)
    }

    /// Bodies of every request received so far.
    pub fn requests(&self) -> Vec<String> {
        self.requests.lock().unwrap().clone()
    }
}

impl Drop for MockScorerServer {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        // Wake a blocked accept; fails harmlessly if the listener already closed.
        let _ = TcpStream::connect(self.addr);
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}
