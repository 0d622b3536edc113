use chiral_decay::dynamics::{propagate, quiescence_time, uniform_grid};
use chiral_decay::model::{build_unidirectional, Dispersion, LevelChain};
use num_complex::Complex;

fn main() -> chiral_decay::Result<()> {
    // 20 degenerate levels on consecutive sites of a chiral band with v = 0.5
    let chain = LevelChain::uniform(20, 0.0, 1.0, 1)?;
    let band = Dispersion::chiral_linear(0.5, 0.0)?;
    let h = build_unidirectional(&chain, &band)?;

    let q = quiescence_time(&h, 0.97, 50.0, 0.1)?;
    println!("tau = {:.2}", q.tau);

    let mut c0 = vec![Complex::new(0.0, 0.0); 20];
    c0[0] = Complex::new(1.0, 0.0);
    let trace = propagate(&h, &h.to_sorted(&c0)?, &uniform_grid(0.5, 100))?;
    println!("P(50) = {:.3e}", trace.survival.last().unwrap());
    Ok(())
}
