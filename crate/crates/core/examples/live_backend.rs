//! Talk to a model server over the line-delimited JSON protocol.
//!
//! With no argument a throwaway server backed by the deterministic stub is
//! started on a local port. Pass `host:port` or `unix:/path` to use a real
//! one.
//!
//!     cargo run --example live_backend [ADDR]

use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::thread;

use polyhallo::backend::{connect, BackendClient, CacheMode, ModelIds, NerItem, NliPair, RequestEnvelope, StubBackend, Transport};

fn local_stub_server() -> std::io::Result<String> {
    let listener = TcpListener::bind("127.0.0.1:0")?;
    let addr = listener.local_addr()?.to_string();
    thread::spawn(move || {
        for stream in listener.incoming().flatten() {
            thread::spawn(move || {
                let mut out = stream.try_clone().expect("clone socket");
                for line in BufReader::new(stream).lines().map_while(Result::ok) {
                    eprintln!(">> {line}");
                    let reply = match RequestEnvelope::parse(&line) {
                        Ok(req) => StubBackend.exchange(&req).map(|r| r.to_line()).unwrap_or_default(),
                        Err(e) => format!("{{\"id\":0,\"error\":{{\"code\":\"bad-request\",\"message\":{:?}}}}}", e.to_string()),
                    };
                    eprintln!("<< {reply}");
                    if writeln!(out, "{reply}").is_err() {
                        break;
                    }
                }
            });
        }
    });
    Ok(addr)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let addr = match std::env::args().nth(1) {
        Some(a) => a,
        None => local_stub_server()?,
    };
    let client = BackendClient::new(ModelIds::default(), Some(connect(&addr, 4)?), None, CacheMode::Live)?;

    let probs = client.nli_batch(&[NliPair::new(
        "Yao Ming played for the Houston Rockets.",
        "Yao Ming played basketball for the Houston Rockets.",
    )])?;
    println!("nli: {:?}", probs[0]);

    let ents = client.ner_batch(&[NerItem {
        text: "Del Piero played for Juventus.".into(),
        lang: "en".into(),
    }])?;
    println!("ner: {}", ents[0].to_json());

    let guess = client.langid_batch(&["Frida Kahlo fue una pintora mexicana.".into()])?;
    println!("langid: {:?}", guess[0]);
    Ok(())
}
