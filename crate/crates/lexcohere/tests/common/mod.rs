//! Fixtures shared by the integration test targets: two hand-built corpora
//! with planted questions and a seeded generator for randomized domains.
//!
//! The hand-built corpora keep term vocabularies disjoint on purpose, so a
//! choice drawn from the wrong topic has nothing to overlap with. Shared
//! filler words (water, heat, rack) give the df column a spread; without
//! them every feature would sit at the document-frequency maximum and all
//! idf factors would vanish.

#![allow(dead_code)]

use lexcohere::eval::Question;
use lexcohere::pdocs::{build_from_text, TermBank};
use lexcohere::space::store::SpaceStore;
use lexcohere::text::{Segmenter, Tokenizer};
use lexcohere::EngineConfig;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn tokenizer() -> Tokenizer {
    Tokenizer::bundled()
}

// fixture corpora are lowercase and one sentence per line, which the
// terminator rules of the bundled segmenter would run together
fn build_store(corpus: &str, terms: &[&str], config: &EngineConfig) -> SpaceStore {
    let tok = tokenizer();
    let bank = TermBank::from_phrases(terms.iter().copied(), &tok).expect("term bank");
    let (pdocs, stats) =
        build_from_text(corpus, &bank, &tok, &Segmenter::passthrough(), config).expect("pdocs");
    assert!(
        stats.dropped.is_empty(),
        "fixture corpus dropped terms: {:?}",
        stats.dropped
    );
    SpaceStore::build(pdocs, config).expect("store")
}

// ---- geology corpus: five disjoint topics, one planted choice each ----

pub const GEOLOGY_TERMS: [&str; 5] = ["magma", "glacier", "neuron", "comet", "enzyme"];

pub fn geology_config() -> EngineConfig {
    EngineConfig {
        min_sentences: 8,
        min_support: 2,
        min_occurrences: 2,
        ..EngineConfig::default()
    }
}

pub fn geology_corpus() -> String {
    let sentences = [
        // magma: crust, rock, lava, vent
        "the magma rose beneath the crust.",
        "hot magma pushed the crust apart.",
        "the magma cooled into new rock.",
        "dark rock formed where the magma slowed.",
        "the magma fed lava to the vent.",
        "lava burst from the vent above the magma.",
        "the magma carried heat through the rock.",
        "heat from the magma cracked the crust.",
        "the magma met water near the vent.",
        "water boiled when the magma touched it.",
        "the magma left rock upon rock along the old channel.",
        "deep in the chamber the magma waited while the crust above it slowly and quietly settled into lava.",
        "the magma vent glowed all night.",
        "molten magma seeped between rock and crust.",
        // glacier: ice, valley, snow, moraine
        "the glacier carved the valley slowly.",
        "blue ice filled the glacier from wall to wall.",
        "the glacier pushed a moraine of broken stone.",
        "snow fell and fed the glacier each winter.",
        "the glacier ground the valley floor flat.",
        "old ice at the glacier base began to slide.",
        "the glacier left a moraine across the valley mouth.",
        "snow turned to ice inside the glacier.",
        "melt water ran from the glacier in summer.",
        "the glacier lake held cold water all year.",
        "ice upon ice built the glacier higher.",
        "far beyond the ridge the glacier crept while the valley below it lay buried under drifts of winter snow.",
        "the glacier moraine stood ten meters high.",
        "the valley kept its glacier ice late into spring.",
        // neuron: axon, signal, synapse, spike
        "the neuron sent a signal down its axon.",
        "each axon carried the neuron output away.",
        "the neuron fired a spike when input rose.",
        "a spike raced along the neuron membrane.",
        "the neuron passed the signal across a synapse.",
        "every synapse joined one neuron to the next.",
        "the neuron held its charge until the signal came.",
        "one spike from the neuron crossed the synapse quickly.",
        "the neuron rested in salt water between tasks.",
        "water bathed the neuron tissue in the dish.",
        "signal after signal wore the neuron down.",
        "somewhere near the cortex edge the neuron waited while a faint signal climbed slowly up the long thin axon.",
        "the neuron axon ended at a muscle.",
        "heat slowed the neuron response in the test.",
        // comet: orbit, tail, dust, sun
        "the comet swung around the sun.",
        "sun light pushed the comet tail outward.",
        "the comet grew a long tail of dust.",
        "dust from the comet spread along its orbit.",
        "the comet kept a steady orbit for ages.",
        "each orbit brought the comet near the sun.",
        "the comet shed dust at every pass.",
        "a bright tail marked the comet path.",
        "ice and water formed most of the comet core.",
        "water vapor streamed off the comet in the heat.",
        "dust upon dust dimmed the comet glow.",
        "well past the ninth planet the comet drifted while its faint tail still pointed away from the distant sun.",
        "the comet orbit bent near the giant planets.",
        "heat from the sun boiled the comet surface.",
        // enzyme: protein, acid, reaction, substrate
        "the enzyme broke the protein into pieces.",
        "each protein met its enzyme in the cell.",
        "the enzyme sped the reaction a thousand fold.",
        "no reaction ran without the enzyme present.",
        "the enzyme gripped its substrate tightly.",
        "one substrate fit one enzyme like a key.",
        "the enzyme worked best in mild acid.",
        "strong acid unfolded the enzyme quickly.",
        "the enzyme floated in warm water.",
        "water carried the enzyme to the gut wall.",
        "protein after protein passed through the enzyme site.",
        "deep within the stomach lining the enzyme waited while a heavy meal of tough protein slid slowly toward the acid bath.",
        "the enzyme reaction slowed in the cold.",
        "heat above sixty degrees killed the enzyme.",
    ];
    sentences.join("\n")
}

pub fn geology_store() -> SpaceStore {
    build_store(&geology_corpus(), &GEOLOGY_TERMS, &geology_config())
}

fn question(id: &str, text: &str, choices: [&str; 4], key: usize) -> Question {
    Question {
        id: id.to_string(),
        question: text.to_string(),
        choices: choices.iter().map(|c| c.to_string()).collect(),
        answer_key: key,
    }
}

/// Ten questions whose correct choice reuses the question term's topic
/// vocabulary while the distractors borrow from the other topics.
pub fn geology_questions() -> Vec<Question> {
    vec![
        question(
            "geo-magma-1",
            "the magma pushed through the crust",
            [
                "lava at the vent",
                "snow on the moraine",
                "a tail of dust",
                "an axon spike",
            ],
            0,
        ),
        question(
            "geo-magma-2",
            "hot rock rose from the magma",
            [
                "the valley ice",
                "the lava vent",
                "the orbit dust",
                "protein in acid",
            ],
            1,
        ),
        question(
            "geo-glacier-1",
            "the glacier carved the valley",
            [
                "a tail of dust",
                "lava at the vent",
                "moraine and ice",
                "protein in acid",
            ],
            2,
        ),
        question(
            "geo-glacier-2",
            "snow fed the glacier ice",
            [
                "the substrate acid",
                "the orbit dust",
                "an axon spike",
                "the valley moraine",
            ],
            3,
        ),
        question(
            "geo-neuron-1",
            "the neuron fired a spike",
            [
                "a signal down the axon",
                "lava in the vent",
                "dust along the orbit",
                "ice across the valley",
            ],
            0,
        ),
        question(
            "geo-neuron-2",
            "the signal crossed the synapse",
            [
                "the orbit tail",
                "a spike on the axon",
                "rock in the crust",
                "snow on the moraine",
            ],
            1,
        ),
        question(
            "geo-comet-1",
            "the comet neared the sun",
            [
                "ice on the moraine",
                "a crust of rock",
                "a tail of dust",
                "the synapse signal",
            ],
            2,
        ),
        question(
            "geo-comet-2",
            "dust trailed the comet orbit",
            [
                "the axon signal",
                "the valley snow",
                "rock from the vent",
                "a tail near the sun",
            ],
            3,
        ),
        question(
            "geo-enzyme-1",
            "the enzyme gripped the substrate",
            [
                "protein in acid",
                "ice in the valley",
                "a tail of dust",
                "rock in the crust",
            ],
            0,
        ),
        question(
            "geo-enzyme-2",
            "the reaction needed the enzyme",
            [
                "snow and ice",
                "the substrate protein",
                "orbit and tail",
                "crust and lava",
            ],
            1,
        ),
    ]
}

// ---- conjunction margin corpus ----
//
// Every choice word of a term has the same unigram frequency (8 sentences),
// but the strong words co-occur with the term inside the conjunction window
// in all 8 while the weak words do so in only 2; the other 6 mentions sit 12
// tokens away from the term, just outside the default window of 10. The
// conjunction tf margin (8 vs 2) is then the only thing separating the
// choices, so disabling subscore 1.2 collapses each question to a 4-way tie.

pub const MARGIN_TERMS: [(&str, [&str; 2], [&str; 6]); 5] = [
    (
        "enzyme",
        ["protein", "substrate"],
        ["starch", "lipid", "resin", "amber", "chalk", "flint"],
    ),
    (
        "glacier",
        ["moraine", "crevasse"],
        ["pebble", "slate", "shale", "quartz", "basalt", "gravel"],
    ),
    (
        "volcano",
        ["lava", "ash"],
        ["cinder", "pumice", "ridge", "slope", "crater", "plume"],
    ),
    (
        "comet",
        ["orbit", "tail"],
        ["dust", "halo", "streak", "flare", "glow", "arc"],
    ),
    (
        "neuron",
        ["axon", "synapse"],
        ["spike", "pulse", "charge", "wave", "thread", "knot"],
    ),
];

pub fn margin_config() -> EngineConfig {
    // min_support 2 keeps the weak conjunctions in the rows; at the default
    // threshold they would be dropped and the binary subscores would leak
    // the margin too
    EngineConfig {
        min_sentences: 8,
        min_support: 2,
        min_occurrences: 2,
        ..EngineConfig::default()
    }
}

pub fn margin_corpus() -> String {
    let advs = ["tightly", "firmly", "neatly", "cleanly"];
    let mut out = String::new();
    for (term, strong, weak) in MARGIN_TERMS {
        for s in strong {
            for adv in advs.iter().cycle().take(8) {
                out.push_str(&format!("the {term} bound the {s} {adv}.\n"));
            }
        }
        for w in weak {
            for _ in 0..2 {
                out.push_str(&format!("the {term} split the {w} apart.\n"));
            }
            for _ in 0..6 {
                out.push_str(&format!(
                    "the {term} worked away and then later on it sat by the old {w} store.\n"
                ));
            }
        }
        for _ in 0..2 {
            out.push_str(&format!("the {term} sat in clear water.\n"));
        }
    }
    out
}

pub fn margin_terms() -> Vec<&'static str> {
    MARGIN_TERMS.iter().map(|(t, _, _)| *t).collect()
}

pub fn margin_store() -> SpaceStore {
    build_store(&margin_corpus(), &margin_terms(), &margin_config())
}

/// Two questions per term: one strong word hidden among three weak ones.
pub fn margin_questions() -> Vec<Question> {
    let mut out = Vec::new();
    for (qi, (term, strong, weak)) in MARGIN_TERMS.iter().enumerate() {
        for (j, s) in strong.iter().enumerate() {
            let pool = if j == 0 { &weak[0..3] } else { &weak[3..6] };
            let key = (2 * qi + j) % 4;
            let mut choices: Vec<String> = pool.iter().map(|w| w.to_string()).collect();
            choices.insert(key, s.to_string());
            out.push(Question {
                id: format!("cj-{term}-{}", j + 1),
                question: format!("the {term}"),
                choices,
                answer_key: key,
            });
        }
    }
    out
}

// ---- seeded randomized domains ----

pub const TERM_POOL: [&str; 20] = [
    "relay", "prism", "anvil", "rotor", "lathe", "crane", "banner", "ledger", "mortar", "pylon",
    "gasket", "funnel", "tripod", "beacon", "girder", "piston", "damper", "sprocket", "flywheel",
    "turbine",
];

pub const TOPIC_POOL: [&str; 40] = [
    "copper", "zinc", "cobalt", "nickel", "iron", "steel", "brass", "bronze", "timber", "granite",
    "basalt", "marble", "gravel", "cement", "resin", "amber", "quartz", "slate", "maple", "cedar",
    "willow", "aspen", "barley", "millet", "clover", "sage", "fennel", "thyme", "falcon", "heron",
    "osprey", "plover", "salmon", "trout", "perch", "minnow", "lantern", "candle", "torch",
    "ember",
];

const VERB_POOL: [&str; 6] = ["held", "moved", "carried", "turned", "kept", "shaped"];
const SHARED_POOL: [&str; 3] = ["water", "field", "stone"];

pub struct RandomDomain {
    pub store: SpaceStore,
    pub terms: Vec<String>,
    pub topics: Vec<Vec<String>>,
}

pub fn random_domain_config() -> EngineConfig {
    EngineConfig {
        min_sentences: 8,
        min_support: 2,
        min_occurrences: 2,
        ..EngineConfig::default()
    }
}

/// Builds a domain of `n_terms` terms with three topic words each (topics
/// overlap between terms once the pool wraps around). Every sentence names
/// its term; the fourth template plants the second topic word outside the
/// conjunction window. The `rack` filler lands in every term's row, so the
/// df maximum stays above 1 and the idf factor cannot degenerate to zero
/// everywhere.
pub fn random_domain(seed: u64, n_terms: usize) -> RandomDomain {
    assert!((2..=TERM_POOL.len()).contains(&n_terms));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut names: Vec<&str> = TERM_POOL.to_vec();
    names.shuffle(&mut rng);
    names.truncate(n_terms);
    let mut topic_pool: Vec<&str> = TOPIC_POOL.to_vec();
    topic_pool.shuffle(&mut rng);
    let topics: Vec<Vec<String>> = (0..n_terms)
        .map(|i| {
            (0..3)
                .map(|j| topic_pool[(3 * i + j) % topic_pool.len()].to_string())
                .collect()
        })
        .collect();

    let mut corpus = String::new();
    for (i, name) in names.iter().enumerate() {
        let t = &topics[i];
        let count = rng.gen_range(10..=14);
        for s in 0..count {
            let verb = VERB_POOL[rng.gen_range(0..VERB_POOL.len())];
            let line = match s % 4 {
                0 => format!("the {name} {verb} the {} and the {}.", t[0], t[1]),
                1 => format!("a {} lay near the {name} {}.", t[1], t[2]),
                2 => {
                    let shared = SHARED_POOL[rng.gen_range(0..SHARED_POOL.len())];
                    format!("the {name} {verb} the {} beside the {shared}.", t[2])
                }
                _ => format!(
                    "far across the yard the {name} {verb} while the {} stayed under the old {} rack.",
                    t[s % 3],
                    t[(s + 1) % 3]
                ),
            };
            corpus.push_str(&line);
            corpus.push('\n');
        }
    }

    let config = random_domain_config();
    let store = build_store(&corpus, &names, &config);
    RandomDomain {
        store,
        terms: names.into_iter().map(str::to_string).collect(),
        topics,
    }
}

/// One planted question over a random domain: the question names a term and
/// its first topic word, the correct choice pairs the other two topic words,
/// and each distractor pairs the corresponding words of a different term.
pub fn random_planted_question(domain: &RandomDomain, rng: &mut ChaCha8Rng, id: usize) -> Question {
    let n = domain.terms.len();
    let t = rng.gen_range(0..n);
    let mut others: Vec<usize> = (0..n).filter(|&i| i != t).collect();
    others.shuffle(rng);
    others.truncate(3);

    let topics = &domain.topics[t];
    let question = format!("the {} near the {}", domain.terms[t], topics[0]);
    let correct = format!("the {} and the {}", topics[1], topics[2]);
    let mut choices: Vec<String> = others
        .iter()
        .map(|&o| {
            let ot = &domain.topics[o];
            format!("the {} and the {}", ot[1], ot[2])
        })
        .collect();
    let key = rng.gen_range(0..=choices.len());
    choices.insert(key, correct);
    Question {
        id: format!("rnd-{id}"),
        question,
        choices,
        answer_key: key,
    }
}

/// Arbitrary short text over the full vocabulary plus words no space has
/// seen, for bounds fuzzing. May be empty.
pub fn random_phrase(rng: &mut ChaCha8Rng, max_words: usize) -> String {
    const EXTRA: [&str; 8] = ["the", "of", "a", "blorp", "zzq", "xylem", "torque", "vetch"];
    let count = rng.gen_range(0..=max_words);
    let mut words = Vec::with_capacity(count);
    for _ in 0..count {
        let pick = rng.gen_range(0..4);
        let word = match pick {
            0 => TERM_POOL[rng.gen_range(0..TERM_POOL.len())],
            1 => TOPIC_POOL[rng.gen_range(0..TOPIC_POOL.len())],
            2 => EXTRA[rng.gen_range(0..EXTRA.len())],
            _ => SHARED_POOL[rng.gen_range(0..SHARED_POOL.len())],
        };
        words.push(word);
    }
    words.join(" ")
}
