//! Regenerates the benchmark datasets in `kb/bench/`.
//!
//! One synthetic patient population is drawn from a fixed seed; each dataset
//! is an independent sample of it, so the datasets overlap the way several
//! registers describing the same district do.
//!
//! `cargo run -p vbd-core --example gen_bench -- [kb dir] [patients]`

use std::path::PathBuf;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use vbd_core::store::{Graph, Term, Triple};
use vbd_core::turtle::{serialize_turtle, PrefixTable};
use vbd_core::vocab::{self, vbd};

const DATASETS: usize = 4;
const SAMPLE_RATE: f64 = 0.45;
const SYMPTOMS: [&str; 12] = [
    "has_Fever",
    "has_Fever_WithChills",
    "has_Headache",
    "has_Nausea",
    "has_Vomiting",
    "has_Rash",
    "has_Joint_Pains",
    "has_Muscle_Pain",
    "has_Anaemia",
    "has_Weakness",
    "has_Weight_Loss",
    "has_Neck_Stiffness",
];
const GUIDELINES: [(&str, &[&str]); 3] = [
    ("guideline_bed_nets", &["malaria", "lymphatic_filariasis", "japanese_encephalitis"]),
    ("guideline_source_reduction", &["dengue", "chikungunya", "malaria"]),
    ("guideline_indoor_spraying", &["kala_azar"]),
];

fn add(g: &mut Graph, s: &str, p: &str, o: Term) {
    g.insert(Triple::new(Term::iri(s), Term::iri(p), o)).expect("IRI subject");
}

fn patient(rng: &mut StdRng, n: usize) -> Graph {
    let mut g = Graph::new();
    let p = vbd(&format!("bp{n:04}"));
    add(&mut g, &p, vocab::RDF_TYPE, Term::iri(vbd("patient")));
    add(&mut g, &p, &vbd("has_Name"), Term::string(format!("bp{n:04}")));
    let gender = if rng.random_bool(0.5) { "female" } else { "male" };
    add(&mut g, &p, &vbd("has_Gender"), Term::string(gender));
    add(&mut g, &p, &vbd("has_Age"), Term::integer(rng.random_range(1..80)));
    for s in SYMPTOMS {
        if rng.random_bool(0.3) {
            add(&mut g, &p, &vbd(s), Term::boolean(rng.random_bool(0.85)));
        }
    }
    if rng.random_bool(0.5) {
        let r = if rng.random_bool(0.4) { "positive" } else { "negative" };
        add(&mut g, &p, &vbd("has_RDT_Result"), Term::string(r));
    }
    if rng.random_bool(0.4) {
        let r = if rng.random_bool(0.4) { "positive" } else { "negative" };
        add(&mut g, &p, &vbd("has_ME_Result"), Term::string(r));
    }
    g
}

fn main() {
    let mut args = std::env::args().skip(1);
    let kb = PathBuf::from(args.next().unwrap_or_else(|| "kb".into()));
    let population: usize = args.next().map_or(600, |n| n.parse().expect("patient count"));
    let mut rng = StdRng::seed_from_u64(0x7ab1e10);

    let patients: Vec<Graph> = (0..population).map(|n| patient(&mut rng, n)).collect();
    let mut prefixes = PrefixTable::standard();
    prefixes.insert("", vocab::VBD);
    let out = kb.join("bench");
    std::fs::create_dir_all(&out).expect("create bench dir");
    for d in 1..=DATASETS {
        let mut g = Graph::new();
        for (name, diseases) in GUIDELINES {
            add(&mut g, &vbd(name), vocab::RDF_TYPE, Term::iri(vbd("precaution_guideline")));
            for disease in diseases {
                add(&mut g, &vbd(name), &vbd("is_Guideline_For"), Term::iri(vbd(disease)));
            }
        }
        for p in &patients {
            if rng.random_bool(SAMPLE_RATE) {
                g.extend_from(p);
            }
        }
        let path = out.join(format!("d{d}.ttl"));
        std::fs::write(&path, serialize_turtle(&g, &prefixes)).expect("write dataset");
        println!("{} {} triples", path.display(), g.len());
    }
}
