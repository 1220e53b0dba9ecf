use std::collections::HashMap;
use std::time::{Duration, Instant};

use discocat_core::diagrams::{count_class, render_baez_stay, render_cancellation};
use discocat_core::distributional::{build_model, build_verbs, parse_triples, Corpus};
use discocat_core::evaluation::compose;
use discocat_core::lambek::{self, prove};
use discocat_core::lexicon::{tokenize_sentence, Grammar};
use discocat_core::pregroup::{self, reduce};
use discocat_core::semantics::{meaning, Bindings, Logic, SpaceAssignment};
use discocat_core::tensor::Tensor;
use discocat_core::types::{lambek_to_pregroup, parse_lambek};
use discocat_core::{BasicType, Composer, LambekType, SimpleType, Weighting};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOY: &str = include_str!("../../../data/toy.json");
const CORPUS: &str = include_str!("../../../data/corpus.txt");
const TRIPLES: &str = include_str!("../../../data/triples.tsv");
const DISAMBIGUATION: &str = include_str!("../../../data/disambiguation.json");

fn simple() -> impl Strategy<Value = SimpleType> {
    (prop::sample::select(vec!["n", "s"]), -2i32..=2)
        .prop_map(|(b, o)| SimpleType::new(BasicType::new(b), o))
}

fn small_lambek() -> impl Strategy<Value = LambekType> {
    let leaf = prop::sample::select(vec!["n", "s"]).prop_map(LambekType::basic);
    leaf.prop_recursive(3, 8, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| LambekType::product(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| LambekType::limpl(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| LambekType::rimpl(a, b)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn reductions_are_sound(types in prop::collection::vec(simple(), 1..9)) {
        if let Some(r) = reduce(&types, &BasicType::new("s")) {
            prop_assert!(r.validate().is_ok());
            prop_assert_eq!(r.residual_types(), vec![SimpleType::plain("s")]);
        }
    }

    #[test]
    fn cups_match_links(types in prop::collection::vec(simple(), 1..9)) {
        if let Some(r) = reduce(&types, &BasicType::new("s")) {
            let words: Vec<String> = (0..types.len()).map(|i| format!("w{i}")).collect();
            let spans: Vec<_> = (0..types.len()).map(|i| i..i + 1).collect();
            let svg = render_cancellation(&r, &words, &spans).unwrap();
            prop_assert_eq!(count_class(&svg, "cup"), r.links.len());
            prop_assert_eq!(render_cancellation(&r, &words, &spans).unwrap(), svg);
        }
    }

    #[test]
    fn lambek_proofs_translate_to_reductions(
        gamma in prop::collection::vec(small_lambek(), 1..4),
        goal in prop::sample::select(vec!["n", "s"]),
    ) {
        let total: usize = gamma.iter().map(LambekType::connectives).sum();
        prop_assume!(total <= 12);
        if prove(&gamma, &LambekType::basic(goal)).is_some() {
            let types: Vec<SimpleType> = gamma.iter().flat_map(|t| lambek_to_pregroup(t).0).collect();
            prop_assert!(reduce(&types, &BasicType::new(goal)).is_some(), "{:?}", gamma);
        }
    }

    #[test]
    fn clasps_match_the_term(
        gamma in prop::collection::vec(small_lambek(), 1..4),
        goal in small_lambek(),
    ) {
        let total: usize = gamma.iter().map(LambekType::connectives).sum::<usize>() + goal.connectives();
        prop_assume!(total <= 10);
        if let Some(d) = prove(&gamma, &goal) {
            let svg = render_baez_stay(&d, &[]).unwrap();
            prop_assert_eq!(count_class(&svg, "clasp"), d.clasp_count());
            prop_assert_eq!(render_baez_stay(&d, &[]).unwrap(), svg);
        }
    }
}

#[test]
fn prover_terminates_on_twelve_connectives() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let leaf = |rng: &mut ChaCha8Rng| LambekType::basic(["n", "s"][rng.gen_range(0..2)]);
    fn grow(rng: &mut ChaCha8Rng, budget: usize, leaf: &dyn Fn(&mut ChaCha8Rng) -> LambekType) -> LambekType {
        if budget == 0 {
            return leaf(rng);
        }
        let left = rng.gen_range(0..budget);
        let (a, b) = (grow(rng, left, leaf), grow(rng, budget - 1 - left, leaf));
        match rng.gen_range(0..3) {
            0 => LambekType::product(a, b),
            1 => LambekType::limpl(a, b),
            _ => LambekType::rimpl(a, b),
        }
    }
    let start = Instant::now();
    for _ in 0..200 {
        let k = rng.gen_range(1..=4);
        let mut budget = 12;
        let gamma: Vec<LambekType> = (0..k)
            .map(|_| {
                let c = rng.gen_range(0..=budget.min(5));
                budget -= c;
                grow(&mut rng, c, &leaf)
            })
            .collect();
        let goal = grow(&mut rng, budget.min(3), &leaf);
        let total: usize = gamma.iter().map(LambekType::connectives).sum::<usize>() + goal.connectives();
        assert!(total <= 12);
        if let Some(d) = prove(&gamma, &goal) {
            d.check().unwrap();
        }
    }
    assert!(start.elapsed() < Duration::from_secs(30), "{:?}", start.elapsed());
}

#[test]
fn example_sentences_agree_across_logics() {
    let g = Grammar::from_json(TOY).unwrap();
    for s in ["men kill dogs", "men kill cute dogs", "men do not kill dogs"] {
        let w = tokenize_sentence(s);
        let p = pregroup::parse(&g, &w).unwrap().expect(s);
        let l = lambek::parse(&g, &w).unwrap().expect(s);
        assert_eq!(p.target, l.target);
    }
}

#[test]
fn lookup_returns_only_declared_entries() {
    let g = Grammar::from_json(TOY).unwrap();
    let raw: serde_json::Value = serde_json::from_str(TOY).unwrap();
    let declared: Vec<(String, LambekType)> = raw["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| {
            let ty = parse_lambek(e["type"].as_str().unwrap()).unwrap();
            (e["word"].as_str().unwrap().to_string(), ty)
        })
        .collect();
    for word in ["men", "dogs", "kill", "cute", "do", "not", "cats", "", "MEN"] {
        let found = g.lookup(word);
        let expected = declared.iter().filter(|(w, _)| w == word).count();
        assert_eq!(found.len(), expected, "{word}");
        for e in found {
            assert!(declared.contains(&(e.word.clone(), e.lambek_type.clone())));
        }
    }
}

#[test]
fn plans_produce_their_declared_shape() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let g = Grammar::from_json(TOY).unwrap();
    for _ in 0..20 {
        let (n, s) = (rng.gen_range(1..=4), 2);
        let mut random = |shape: Vec<usize>| {
            let len = shape.iter().product();
            Tensor::new(shape, (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
        };
        let b = Bindings::new(SpaceAssignment::new(n, s))
            .tensor("men", random(vec![n]))
            .tensor("dogs", random(vec![n]))
            .tensor("kill", random(vec![n, s, n]))
            .tensor("cute", random(vec![n, n]))
            .name("do", Tensor::identity(&[s]), None)
            .name("not", Tensor::matrix(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(), None);
        for sentence in ["men kill dogs", "men kill cute dogs", "men do not kill dogs"] {
            for logic in [Logic::Pregroup, Logic::Lambek] {
                let m = meaning(&tokenize_sentence(sentence), &g, &b, logic).unwrap();
                assert_eq!(m.vector.shape(), m.plan.output_shape.as_slice());
                let inputs: Vec<Tensor> = m.plan.input_shapes.iter().map(|s| random(s.clone())).collect();
                let out = m.plan.execute(&inputs).unwrap();
                assert_eq!(out.shape(), m.plan.output_shape.as_slice());
            }
        }
    }
}

#[test]
fn bundled_basis_and_determinism() {
    let corpus = Corpus::from_text(CORPUS);
    let a = build_model(&corpus, 10, 5, Weighting::Tfidf).unwrap();
    let b = build_model(&Corpus::from_text(CORPUS), 10, 5, Weighting::Tfidf).unwrap();
    assert_eq!(a.to_json(), b.to_json());

    // Independent count: frequency descending, then alphabetical.
    let mut freq: HashMap<String, usize> = HashMap::new();
    for tok in CORPUS.split_whitespace() {
        *freq.entry(tok.to_lowercase()).or_default() += 1;
    }
    let mut ranked: Vec<(String, usize)> = freq.into_iter().collect();
    ranked.sort_by(|x, y| y.1.cmp(&x.1).then(x.0.cmp(&y.0)));
    let oracle: Vec<String> = ranked.into_iter().take(10).map(|(w, _)| w).collect();
    assert_eq!(a.basis, oracle);
    assert_eq!(
        a.basis,
        ["the", "in", "of", "location", "show", "a", "child", "house", "express", "meet"]
    );
}

#[test]
fn pointwise_composers_ignore_word_order() {
    let g = Grammar::from_json(DISAMBIGUATION).unwrap();
    let mut model = build_model(&Corpus::from_text(CORPUS), 10, 5, Weighting::Tfidf).unwrap();
    build_verbs(&mut model, &parse_triples(TRIPLES).unwrap(), None).unwrap();
    let ab = tokenize_sentence("child meet house");
    let ba = tokenize_sentence("house meet child");
    for c in [Composer::Add, Composer::Multiply] {
        let x = compose(&ab, &g, &model, c, Logic::Pregroup).unwrap();
        let y = compose(&ba, &g, &model, c, Logic::Pregroup).unwrap();
        assert!(x.max_abs_diff(&y).unwrap() <= 1e-12, "{c}");
    }
    for c in [Composer::Cat1, Composer::Cat2] {
        let x = compose(&ab, &g, &model, c, Logic::Pregroup).unwrap();
        let y = compose(&ba, &g, &model, c, Logic::Pregroup).unwrap();
        assert!(x.max_abs_diff(&y).unwrap() > 1e-9, "{c}");
    }
}

#[test]
fn verb_of_another_arity_is_reported() {
    let g = Grammar::from_json(
        r#"{"basic_types":["n","s"],"designated":["s"],"entries":[
        {"word":"child","type":"n"},{"word":"house","type":"n"},
        {"word":"show","type":"n -o s"},{"word":"meet","type":"(n -o s) o- n"}]}"#,
    )
    .unwrap();
    let mut model = build_model(&Corpus::from_text(CORPUS), 4, 5, Weighting::Tfidf).unwrap();
    let triples = parse_triples("child\tshow\t\nchild\tmeet\thouse\n").unwrap();
    build_verbs(&mut model, &triples, None).unwrap();
    let view = model.view(discocat_core::VerbMethod::Cat1);
    let ok = meaning(&tokenize_sentence("child meet house"), &g, &view, Logic::Pregroup);
    assert!(ok.is_ok());
    let err = meaning(&tokenize_sentence("child show"), &g, &view, Logic::Pregroup).unwrap_err();
    assert!(
        matches!(err, discocat_core::semantics::SemanticsError::VerbShape { .. }),
        "{err}"
    );
}
