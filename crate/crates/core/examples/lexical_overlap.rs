//! ROUGE-1, ROUGE-L and named entity overlap for one generation against its
//! reference.
//!
//!     cargo run --example lexical_overlap

use polyhallo::backend::{NerBackend, NerItem, StubBackend};
use polyhallo::corpus::segment;
use polyhallo::lexical::{entity_overlap, entity_set, rouge1, rouge_l, Coverage, StopwordSet};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let reference = "Alessandro Del Piero was born in 1974 in Conegliano. He played for Juventus for nineteen seasons.";
    let generated = "Alessandro Del Piero, born on September 28, 1976 in Brescia, Italy, is a former Italian professional football player who served as a forward for Juventus.";

    let (g, r) = (segment(generated, "en"), segment(reference, "en"));
    let stop = StopwordSet::bundled("en");
    let r1 = rouge1(&g, &r, &stop);
    let rl = rouge_l(&g, &r);
    println!("ROUGE-1  P {:.4}  R {:.4}  F1 {:.4}", r1.precision, r1.recall, r1.f1);
    println!("ROUGE-L  P {:.4}  R {:.4}  F1 {:.4}", rl.precision, rl.recall, rl.f1);

    // Entity overlap needs a recognizer. The stub treats capitalized runs
    // as entities.
    let ner = StubBackend;
    let results = ner.ner(&[
        NerItem { text: generated.into(), lang: "en".into() },
        NerItem { text: reference.into(), lang: "en".into() },
    ])?;
    let (ge, re) = (entity_set(&results[0]), entity_set(&results[1]));
    if let (Coverage::Available(ge), Coverage::Available(re)) = (&ge, &re) {
        println!("entities (gen): {:?}", ge.iter().collect::<Vec<_>>());
        println!("entities (ref): {:?}", re.iter().collect::<Vec<_>>());
        let neo = entity_overlap(ge, re);
        println!("NEO      P {:.4}  R {:.4}  F1 {:.4}", neo.precision, neo.recall, neo.f1);
    }

    // Languages outside the recognizer's coverage give no NEO at all rather
    // than a zero.
    let zh = ner.ner(&[NerItem { text: "姚明是一位篮球运动员。".into(), lang: "zh".into() }])?;
    println!("zh coverage: {:?}", entity_set(&zh[0]));
    Ok(())
}
