mod support;

use nfmatch::{
    extract_pattern_variables, integer_matcher, list_matcher, multiset_matcher, tails, unjoin, validate_pattern,
    value_equal, AtomLists, Clauses, LazySeq, List, Pattern, PatternKind, Value,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::{random_instance, GenConfig};

fn arb_value() -> impl Strategy<Value = Value> {
    let leaf = prop_oneof![
        (-2i64..3).prop_map(Value::Int),
        any::<bool>().prop_map(Value::Bool),
        prop::sample::select(vec!["a", "b"]).prop_map(Value::sym),
        prop::sample::select(vec!["", "a", "q\"s"]).prop_map(Value::str),
    ];
    leaf.prop_recursive(3, 16, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 0..3).prop_map(Value::list),
            prop::collection::vec(inner.clone(), 0..3).prop_map(Value::tuple),
            prop::collection::vec(inner, 0..3).prop_map(|xs| Value::Lazy(LazySeq::from_values(xs))),
        ]
    })
}

fn int_list() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-3i64..4, 0..8)
}

fn arb_pattern() -> impl Strategy<Value = Pattern> {
    let names = prop::sample::select(vec!["a", "b", "c", "d"]);
    let leaf = prop_oneof![
        Just(Pattern::wildcard()),
        names.clone().prop_map(Pattern::var),
        (0i64..3).prop_map(Pattern::constant),
        names.prop_map(Pattern::value_of),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Pattern::cons(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Pattern::join(a, b)),
            prop::collection::vec(inner.clone(), 1..3).prop_map(Pattern::or),
            prop::collection::vec(inner.clone(), 1..3).prop_map(Pattern::and),
            inner.clone().prop_map(Pattern::not),
            inner.prop_map(Pattern::later),
        ]
    })
}

fn every_or_branch_agrees(p: &Pattern) -> bool {
    match p.kind() {
        PatternKind::Wildcard | PatternKind::Var(_) | PatternKind::Value(_) => true,
        PatternKind::Constructor { args, .. } | PatternKind::Tuple(args) | PatternKind::And(args) => {
            args.iter().all(every_or_branch_agrees)
        }
        PatternKind::Or(args) => {
            let first = extract_pattern_variables(&args[0]);
            args.iter()
                .all(|a| extract_pattern_variables(a) == first && every_or_branch_agrees(a))
        }
        PatternKind::Not(q) | PatternKind::Later(q) => every_or_branch_agrees(q),
    }
}

fn render(lists: AtomLists) -> Vec<String> {
    lists
        .map(|l| l.unwrap().iter().map(ToString::to_string).collect::<Vec<_>>().join(" "))
        .collect()
}

fn counting_stream(xs: Vec<i64>, forced: std::sync::Arc<std::sync::atomic::AtomicUsize>) -> LazySeq {
    fn from(xs: std::sync::Arc<Vec<i64>>, i: usize, forced: std::sync::Arc<std::sync::atomic::AtomicUsize>) -> LazySeq {
        if i == xs.len() {
            return LazySeq::end();
        }
        let head = Value::Int(xs[i]);
        LazySeq::cons(head, move || {
            forced.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
            Ok(from(xs, i + 1, forced))
        })
    }
    from(std::sync::Arc::new(xs), 0, forced)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    // values

    #[test]
    fn tails_and_unjoin_have_one_more_entry_than_the_list(xs in int_list()) {
        let t = Value::ints(xs.iter().copied());
        prop_assert_eq!(tails(&t).unwrap().len(), xs.len() + 1);
        prop_assert_eq!(unjoin(&t).unwrap().len(), xs.len() + 1);
    }

    #[test]
    fn unjoin_pieces_concatenate_to_the_list(xs in int_list()) {
        let t = Value::ints(xs.iter().copied());
        for (h, s) in unjoin(&t).unwrap() {
            let joined = h.as_list().unwrap().concat(s.as_list().unwrap());
            prop_assert_eq!(Value::List(joined), t.clone());
        }
    }

    #[test]
    fn forcing_a_stream_twice_is_deterministic(xs in int_list()) {
        let forced = std::sync::Arc::new(std::sync::atomic::AtomicUsize::new(0));
        let s = counting_stream(xs.clone(), forced.clone());
        let first = s.take(xs.len()).unwrap();
        let after_first = forced.load(std::sync::atomic::Ordering::SeqCst);
        let second = s.take(xs.len()).unwrap();
        prop_assert_eq!(&first, &second);
        prop_assert_eq!(first, xs.iter().map(|&x| Value::Int(x)).collect::<Vec<_>>());
        prop_assert_eq!(forced.load(std::sync::atomic::Ordering::SeqCst), after_first);
    }

    #[test]
    fn value_equal_is_reflexive_and_symmetric(a in arb_value(), b in arb_value()) {
        prop_assert!(value_equal(&a, &a).unwrap());
        prop_assert_eq!(value_equal(&a, &b).unwrap(), value_equal(&b, &a).unwrap());
    }

    #[test]
    fn value_equal_is_transitive(a in arb_value(), b in arb_value(), c in arb_value(), pick in 0u8..4) {
        // Pull b and c towards a so equal triples actually occur.
        let b = if pick & 1 == 1 { a.clone() } else { b };
        let c = if pick & 2 == 2 { b.clone() } else { c };
        if value_equal(&a, &b).unwrap() && value_equal(&b, &c).unwrap() {
            prop_assert!(value_equal(&a, &c).unwrap());
        }
    }

    // pattern

    #[test]
    fn validated_patterns_extract_distinct_variables(p in arb_pattern()) {
        if validate_pattern(&p).is_ok() {
            let vars = extract_pattern_variables(&p);
            let mut dedup = vars.clone();
            dedup.sort_by(|a, b| a.as_str().cmp(b.as_str()));
            dedup.dedup();
            prop_assert_eq!(dedup.len(), vars.len(), "{}", p);
            prop_assert!(every_or_branch_agrees(&p), "{}", p);
        }
    }

    #[test]
    fn later_does_not_change_extracted_variables(p in arb_pattern()) {
        prop_assert_eq!(extract_pattern_variables(&Pattern::later(p.clone())), extract_pattern_variables(&p));
    }

    // matchers

    #[test]
    fn enumeration_counts(xs in int_list()) {
        let n = xs.len();
        let t = Value::ints(xs.iter().copied());
        let cons = Pattern::cons(Pattern::var("x"), Pattern::var("r"));
        let join = Pattern::join(Pattern::var("h"), Pattern::var("r"));
        let list = list_matcher(integer_matcher());
        let ms = multiset_matcher(integer_matcher());
        prop_assert_eq!(list.apply(&cons, &t).unwrap().count(), usize::from(n > 0));
        prop_assert_eq!(ms.apply(&cons, &t).unwrap().count(), n);
        prop_assert_eq!(list.apply(&join, &t).unwrap().count(), n + 1);
    }

    #[test]
    fn matchers_are_pure(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&mut rng, &GenConfig::default());
        let p = inst.pattern.to_pattern();
        let t = Value::ints(inst.target.iter().copied());
        for clauses in [Clauses::Naive, Clauses::Optimized] {
            let m = inst.kind.matcher(clauses);
            match (m.apply(&p, &t), m.apply(&p, &t)) {
                (Ok(a), Ok(b)) => prop_assert_eq!(render(a), render(b)),
                (Err(a), Err(b)) => prop_assert_eq!(a.to_string(), b.to_string()),
                _ => prop_assert!(false, "one call failed and the other did not"),
            }
        }
    }

    #[test]
    fn multiset_value_pattern_is_sorted_equality(xs in int_list(), ys in int_list(), shuffle in any::<u64>(), use_perm in any::<bool>()) {
        let ys = if use_perm {
            use rand::seq::SliceRandom;
            let mut p = xs.clone();
            p.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle));
            p
        } else {
            ys
        };
        let t = Value::ints(xs.iter().copied());
        let p = Pattern::constant(Value::ints(ys.iter().copied()));
        let matched = multiset_matcher(integer_matcher()).apply(&p, &t).unwrap().count() == 1;
        let (mut a, mut b) = (xs.clone(), ys.clone());
        a.sort_unstable();
        b.sort_unstable();
        prop_assert_eq!(matched, a == b);
    }
}

#[test]
fn deferred_and_eager_removal_agree() {
    let l = List::new((0..6).map(Value::Int).collect());
    for i in 0..6 {
        assert_eq!(Value::List(l.without(i)), Value::List(l.without_deferred(i)));
    }
}
