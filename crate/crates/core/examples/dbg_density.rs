use std::sync::Arc;
use twistl::characters::CharacterTable;
use twistl::forms::HeckeForm;
use twistl::lfunc::TwistedL;
use twistl::zeros::*;

fn main() {
    let form = HeckeForm::delta(100_000).unwrap();
    for q in [101u64, 211] {
        let table = CharacterTable::build(q).unwrap();
        let half = (q - 1) / 2;
        use rayon::prelude::*;
        let results: Vec<String> = (1..=half).into_par_iter().filter_map(|j| {
            let tl = TwistedL::new(Arc::clone(&form), table.character(j)).unwrap();
            let tl_bar = TwistedL::new(Arc::clone(&form), table.character(q - 1 - j)).unwrap();
            match find_zeros_on_line(&tl, &tl_bar, 0.0, 10.0, ScanOptions::default()) {
                Ok((a, b)) => {
                    if a.offline_pairs + b.offline_pairs > 0 {
                        Some(format!(
                            "q={q} j={j}: rects {}+{} lines {}+{} step {}\n  ords_j:  {:?}\n  ords_jb: {:?}",
                            a.rect_count, b.rect_count,
                            a.ordinates.len(), b.ordinates.len(), a.scan_step,
                            a.ordinates, b.ordinates
                        ))
                    } else { None }
                }
                Err(e) => Some(format!("q={q} j={j}: ERR {e}")),
            }
        }).collect();
        for r in results { println!("{r}"); }
        println!("q={q} done");
    }
}
