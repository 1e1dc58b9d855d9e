use std::sync::Arc;
use std::time::Instant;
use twistl::characters::CharacterTable;
use twistl::forms::HeckeForm;
use twistl::argument::SweepEvaluator;

fn main() {
    let t0 = Instant::now();
    let form = HeckeForm::delta(100_000).unwrap();
    println!("delta(1e5): {:.2?}", t0.elapsed());

    let t0 = Instant::now();
    form.deligne_check(100_000).unwrap();
    println!("deligne check 1e5: {:.2?}", t0.elapsed());

    // one character S(t) at q=2003 via sweep evaluator (cold + warm)
    let table = CharacterTable::build(2003).unwrap();
    let t0 = Instant::now();
    let ev = SweepEvaluator::new(Arc::clone(&form), Arc::clone(&table), 1.0, 1e-9).unwrap();
    println!("evaluator ctx q=2003: {:.2?} (N = {})", t0.elapsed(), ev.context().n_cut());
    let t0 = Instant::now();
    let s = ev.s_arg(7).unwrap();
    println!("first s_arg (cold cache): {:.2?}, S = {s:.6}", t0.elapsed());
    let t0 = Instant::now();
    for j in 8..18 { ev.s_arg(j).unwrap(); }
    println!("next 10 s_arg (warm): {:.2?}", t0.elapsed());
}
