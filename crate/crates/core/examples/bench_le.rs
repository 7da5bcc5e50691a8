use le_hierarchy::linalg::{PureState, C64};
use le_hierarchy::localizable::{le, rle, OptimizerOptions};
use std::time::Instant;

fn main() {
    for n in [3usize, 4] {
        let dim = 1 << n;
        let amps: Vec<C64> = (0..dim).map(|k| C64::new((k as f64 * 1.3 + 0.2).sin(), (k as f64 * 0.7).cos())).collect();
        let rho = PureState::normalized(amps).unwrap().to_density();
        let opts = OptimizerOptions::for_qubits(n);
        let t = Instant::now();
        let reps = if n == 3 { 50 } else { 5 };
        let mut v = 0.0;
        for _ in 0..reps {
            v = le(&rho, (0, 1), &opts).unwrap().value;
        }
        let per = t.elapsed().as_secs_f64() / reps as f64;
        println!("n={n} le={v:.9} rle={:.9} {:.2} ms/le", rle(&rho, (0, 1)).unwrap().value, per * 1e3);
    }
}
