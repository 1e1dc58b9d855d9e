use std::sync::Arc;
use twistl::characters::CharacterTable;
use twistl::forms::HeckeForm;
use twistl::lfunc::TwistedL;
use twistl::zeros::hardy_z;

fn main() {
    let form = HeckeForm::delta(100_000).unwrap();
    let table = CharacterTable::build(101).unwrap();
    let tl = TwistedL::new(Arc::clone(&form), table.character(63)).unwrap();
    // fine scan at step 1e-3 over [0,10]
    let n = 10_000;
    let mut prev = hardy_z(&tl, 0.0).unwrap().value;
    let mut prev_t = 0.0f64;
    let mut count = 0;
    for i in 1..=n {
        let t = 10.0 * i as f64 / n as f64;
        let z = hardy_z(&tl, t).unwrap().value;
        if prev * z < 0.0 {
            count += 1;
            println!("zero #{} in ({:.4}, {:.4})", count, prev_t, t);
        }
        prev = z;
        prev_t = t;
    }
    println!("total {count}");
}
