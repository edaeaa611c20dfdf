use std::time::Instant;
fn main() {
    let cfg = supnorm::suites::SuiteConfig::default();
    let pat = std::env::args().nth(1).unwrap_or_else(|| "*".into());
    for p in supnorm::suites::select(&pat) {
        let t = Instant::now();
        let o = p.run(&cfg);
        println!("{:<40} {} n={} fit={:?} lim={:?} sec={:?} {:.2}s {:?}", o.id, if o.passed {"PASS"} else {"FAIL"}, o.instances, o.fitted_constant, o.limit, o.max_ratio, t.elapsed().as_secs_f64(), o.errors.iter().take(3).collect::<Vec<_>>());
    }
}
