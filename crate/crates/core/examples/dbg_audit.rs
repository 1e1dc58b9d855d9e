use num_complex::Complex64;
use std::sync::Arc;
use twistl::characters::CharacterTable;
use twistl::forms::HeckeForm;
use twistl::lfunc::TwistedL;
use twistl::zeros::*;

fn main() {
    let form = HeckeForm::delta(60_000).unwrap();
    let table = CharacterTable::build(101).unwrap();
    let tl = TwistedL::new(Arc::clone(&form), table.character(17)).unwrap();
    let tl_bar = TwistedL::new(form, table.character(17).conjugate()).unwrap();
    for (name, t) in [("chi", &tl), ("chibar", &tl_bar)] {
        let rect = count_zeros_rectangle(t, 0.45, 3.0, 0.5, 4.5).unwrap();
        println!("{} rect [0.45,3]x[0.5,4.5] = {}", name, rect);
        // fine scan
        let mut zeros = vec![];
        let mut prev = hardy_z(t, 0.5).unwrap().value;
        let mut prev_t = 0.5f64;
        let n = 4000;
        for i in 1..=n {
            let tt = 0.5 + 4.0 * i as f64 / n as f64;
            let z = hardy_z(t, tt).unwrap().value;
            if prev * z < 0.0 { zeros.push((prev_t + tt) / 2.0); }
            prev = z; prev_t = tt;
        }
        println!("{} fine-scan zeros: {:?}", name, zeros);
    }
}
