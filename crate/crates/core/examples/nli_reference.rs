//! Reference-based NLI scoring: the entailment/contradiction matrix, the
//! four sentence metrics and their document means.
//!
//!     cargo run --example nli_reference

use polyhallo::backend::StubBackend;
use polyhallo::corpus::segment;
use polyhallo::nli::build_matrix;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let reference = segment(
        "Ada Lovelace was born in 1815 in London. Lovelace worked as a mathematician on the Analytical Engine.",
        "en",
    );
    let generated = segment(
        "Ada Lovelace was born in 1817 in London. Lovelace was a mathematician. Lovelace enjoyed sailing.",
        "en",
    );
    let m = build_matrix(&generated, &reference, &StubBackend)?;

    println!("entail / contradict, rows = generated sentences");
    for i in 0..m.rows() {
        let cells: Vec<String> = (0..m.cols())
            .map(|j| format!("{:.3}/{:.3}", m.entail(i, j), m.contradict(i, j)))
            .collect();
        println!("  {}  | {}", cells.join("  "), m.gen_sentences()[i]);
    }
    println!("\n{:>6} {:>7} {:>7} {:>7}", "ENT", "CON", "DIFF", "UNV");
    for s in m.all_sentence_scores() {
        println!("{:>6.3} {:>7.3} {:>7.3} {:>7.3}", s.ent, s.con, s.diff, s.unv);
    }
    let d = m.doc_scores();
    println!("doc    ENT {:.3} CON {:.3} DIFF {:.3} UNV {:.3}", d.ent, d.con, d.diff, d.unv);
    Ok(())
}
