//! Criterion benchmarks for `cubic-melnikov`; see `benches/`.

use cubic_melnikov::family::{annuli, HamiltonianParams, PeriodAnnulus};

/// The D6+ sample `(3, -3, 1)` and its first annulus.
pub fn d6_sample() -> (HamiltonianParams, PeriodAnnulus) {
    let p = HamiltonianParams::new(3.0, -3.0, 1.0).expect("valid params");
    let an = annuli(&p).expect("annuli").remove(0);
    (p, an)
}
