//! Ad-hoc timing probe; run with --ignored to see per-check costs.
use std::time::Instant;

use carnot_core::functions::{random_field, RandomFieldSpec};
use carnot_core::group::StratifiedGroup;
use carnot_core::quad::{DomainSpec, QuadratureSpec};
use carnot_core::suite::{check_ckn, CheckContext};

#[test]
#[ignore]
fn time_single_ckn_check() {
    let g = StratifiedGroup::heisenberg(2);
    let dom = DomainSpec::new(vec![(-2.0, 2.0); 5]);
    for (tol, abs, order, depth) in [
        (1e-5, 1e-12, 8, 20),
        (1e-5, 1e-8, 8, 20),
        (1e-5, 1e-7, 10, 20),
        (1e-5, 1e-7, 12, 20),
        (3e-5, 1e-7, 12, 20),
        (1e-4, 1e-6, 12, 16),
        (1e-4, 1e-6, 10, 16),
    ] {
        let q = QuadratureSpec {
            rel_tol: tol,
            abs_tol: abs,
            max_refinement_depth: depth,
            order,
            base_cells_per_axis: 1,
        };
        let ctx = CheckContext::new(&g, &dom, &q);
        let spec = RandomFieldSpec::for_group(&g, (0.2, 1.7), 1.8);
        let t0 = Instant::now();
        let mut margin = 0.0;
        let mut err = 0.0;
        for seed in 0..10 {
            let f = random_field(seed, &spec);
            let rep = check_ckn(&ctx, &f, 0.0, 1.0, 2.0).unwrap();
            margin = rep.margin;
            err = rep.quad_err;
            assert!(rep.margin > 0.0);
            assert!(rep.converged);
        }
        println!(
            "rel {tol:.0e} abs {abs:.0e} order {order:2} depth {depth}: {:6.1} ms/check (margin {margin:.4}, err {err:.1e})",
            t0.elapsed().as_secs_f64() * 100.0
        );
    }
}
