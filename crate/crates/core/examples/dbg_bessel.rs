use cp_thermal::bessel;
use num_complex::Complex64;

fn main() {
    let z = Complex64::new(3.0, 0.0);
    let e = bessel::bessel_eval(0, z).unwrap();
    println!("J0(3)  = {:?}  (expect -0.26005195)", e.j);
    println!("H10(3) = {:?}  (expect -0.26005 + 0.37685 i)", e.h1);
    println!("H10'(3)= {:?}  (expect -H1_1 = -0.33906 - 0.32467 i)", e.h1p);
    let e5 = bessel::bessel_eval(5, z).unwrap();
    println!("J5(3)  = {:?}  (expect 0.043028)", e5.j);
    println!("H15(3) = {:?}  (expect 0.043028 - 1.905946 i)", e5.h1);
    let zi = Complex64::new(0.0, 3.0);
    let ei = bessel::bessel_eval(1, zi).unwrap();
    println!("J1(3i) = {:?}  (expect 3.953370 i)", ei.j);
    println!("H11(3i)= {:?}  (expect -(2/pi) K_1(3) = -0.0255766)", ei.h1);
    let r = bessel::ratio_seq(z, 3).unwrap();
    println!("jr = {:?}", r.0);
    println!("hr = {:?}", r.1);
}
