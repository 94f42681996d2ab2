use std::sync::Arc;

use compressed_stack::bench::PSchedule;
use compressed_stack::generators::{generate_string, GenKind, GenSpec};
use compressed_stack::{
    run_checked, CheckedStack, LineSource, MemorySource, TestRun, UpperHullF64,
};

fn src(text: String) -> Arc<dyn LineSource> {
    Arc::new(MemorySource::new(text))
}

#[test]
fn testrun_traces_pass() {
    let algo = Arc::new(TestRun);
    for (seed, kind) in [(1, GenKind::PushOnly), (2, GenKind::Xmas)] {
        let s = src(generate_string(&GenSpec::new(kind, 4096, 0.5, seed)).unwrap());
        for p in [2, 3, 10] {
            let stack = CheckedStack::for_algorithm(&algo, &s, None, p, None).unwrap();
            let o = run_checked(Arc::clone(&algo), Arc::clone(&s), stack).unwrap();
            assert!(o.passed(), "{kind} p={p}: {:?}", o.divergence);
            assert!(o.ops > 4096);
        }
    }
}

#[test]
fn upper_hull_thousand_points_passes() {
    let algo = Arc::new(UpperHullF64::new());
    let s = src(generate_string(&GenSpec::new(GenKind::Points, 1000, 0.0, 8)).unwrap());
    let p = PSchedule::Sqrt.resolve(1000);
    let stack = CheckedStack::for_algorithm(&algo, &s, None, p, None).unwrap();
    let o = run_checked(algo, s, stack).unwrap();
    assert!(o.passed(), "{:?}", o.divergence);
}

#[test]
fn corrupted_entry_is_reported_with_ordinal() {
    let algo = Arc::new(TestRun);
    let s = src(generate_string(&GenSpec::new(GenKind::Xmas, 600, 1.0, 3)).unwrap());
    let stack = CheckedStack::for_algorithm(&algo, &s, None, 4, None)
        .unwrap()
        .with_fault(|op, cs| {
            if op == 200 {
                cs.for_each_resident_mut(|d| d.payload_mut().value = -1);
            }
        });
    let o = run_checked(algo, s, stack).unwrap();
    let d = o.divergence.expect("fault must be detected");
    assert_eq!(d.op, 200);
    assert!(d.index.is_some());
    assert!(d.actual.contains("-1"), "{d}");
    assert!(d.to_string().starts_with("divergence at operation 200"));
}

#[test]
fn underestimated_size_still_agrees() {
    let algo = Arc::new(TestRun);
    let s = src(generate_string(&GenSpec::new(GenKind::Xmas, 2000, 1.0, 5)).unwrap());
    let stack = CheckedStack::for_algorithm(&algo, &s, Some(100), 3, None).unwrap();
    let o = run_checked(algo, s, stack).unwrap();
    assert!(o.passed(), "{:?}", o.divergence);
    assert!(o.metrics.unwrap().degraded_estimate);
}
