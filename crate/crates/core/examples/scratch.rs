use freeprob::characterize::*;
use std::time::Instant;
fn main() {
    for (s, t, a) in [(1.0, 2.0, 1.0), (2.0, 3.0, 0.5), (0.5, 0.5, 1.0)] {
        let t0 = Instant::now();
        match verify_prop31(s, t, a, 6) {
            Ok(rep) => {
                println!("== {s},{t},{a} {:.2}s", t0.elapsed().as_secs_f64());
                for i in &rep.identities { println!("{:28} {:>10.3e} {}", i.name, i.residual_max, i.pass); }
            }
            Err(e) => println!("ERR {e:?}"),
        }
    }
}
