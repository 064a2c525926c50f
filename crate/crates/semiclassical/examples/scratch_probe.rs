use num_complex::Complex64 as C64;
use semiclassical::{classical, evolution, fock, ncpoly::parse};

fn main() {
    let c = |re: f64, im: f64| C64::new(re, im);
    let sys = classical::build_system(&parse("a* a + (0.5) (a* a)(a* a)").unwrap()).unwrap();
    let traj = classical::integrate(&sys, c(1.0, 0.0), &[0.0, 2.0], 1e-10).unwrap();
    for m in [120usize, 240] {
        let start = std::time::Instant::now();
        let w0 = evolution::quadratic_evolution_with_step(&sys, &traj, m, Some(1.0 / 512.0)).unwrap();
        let (a, adag) = fock::ladder_matrices(m);
        println!("== M = {m} (build {:?})", start.elapsed());
        for t in [0.5, 1.0, 2.0] {
            let u = w0.matrix_from_origin(t);
            let p = traj.eval(t);
            let conj = u.adjoint().compose(&a).compose(&u);
            let predict = a.scale(p.gamma).add(&adag.scale(p.delta));
            let defect = conj.sub(&predict);
            for eps in [1e-6, 1e-7, 1e-8] {
                let blk = u.column_tail_block(10, eps);
                println!(
                    "t={t} eps={eps:.0e}: block {blk} defect {:.3e}",
                    defect.max_abs_block(blk)
                );
            }
        }
    }
}
