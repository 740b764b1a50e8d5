use zmlab_bench::{bench_scheme, unit_poly};

#[test]
fn inputs_are_well_formed() {
    let s = bench_scheme();
    assert_eq!(s.ell, 4);
    assert_eq!(s.window(4).unwrap().primes, [13, 17, 19, 23]);
    let p = unit_poly(100);
    assert_eq!((p.len(), p.n_max()), (100, 100));
}
