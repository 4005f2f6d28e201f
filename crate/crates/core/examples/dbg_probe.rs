use cp_thermal::cylinder::CylinderConfig;
use cp_thermal::engine::{nonresonant_potential, resonant_potential, CylinderBackend};
use cp_thermal::materials::gold_drude;
use cp_thermal::molecule::{MoleculeSpec, ThermalContext};
use rayon::prelude::*;

fn main() {
    let omega = 2.79e12;
    let molecule = MoleculeSpec::single("lih-like", omega, 5.88).unwrap();
    let thermal = ThermalContext::new(300.0).unwrap();
    let r = 618e-6;
    let cyl = CylinderBackend::new(CylinderConfig::new(r, gold_drude(), 0.0));
    let t0 = std::time::Instant::now();
    let rows: Vec<(f64, f64, f64)> = (0..60)
        .into_par_iter()
        .map(|i| {
            let rho = r * (0.01 + 0.97 * i as f64 / 59.0);
            let u_nr = nonresonant_potential(&molecule, &cyl, &thermal, rho).unwrap();
            let res = resonant_potential(&molecule, &cyl, &thermal, rho).unwrap();
            (rho / r, u_nr, res.total)
        })
        .collect();
    for (phi, u_nr, u_res) in &rows {
        println!("phi = {phi:.4}: U_nr = {u_nr:+.4e}, U_res = {u_res:+.4e}, U_tot = {:+.4e}", u_nr + u_res);
    }
    println!("sweep took {:?}", t0.elapsed());
}
