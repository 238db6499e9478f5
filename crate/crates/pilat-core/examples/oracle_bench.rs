use num_traits::{One, Zero};
use pilat_core::num::ratio::rat_from_decimal;
use pilat_core::optim::{min_oracle, OptProblem};
use pilat_core::poly::{Expo, MPoly};
use pilat_core::{Int, Rat};

fn main() {
    let dec = |s: &str| rat_from_decimal(s).unwrap();
    let mut p = MPoly::zero(2);
    p.add_term(Expo(vec![2, 0]), Rat::one());
    p.add_term(Expo(vec![0, 2]), Rat::one());
    let mut q = MPoly::zero(3);
    q.add_term(Expo(vec![1, 0, 1]), dec("2.72"));
    q.add_term(Expo(vec![0, 0, 2]), Rat::new(Int::from(2), Int::from(1)));
    let prob = OptProblem {
        nvars: 2,
        objective: q,
        sublevel: p,
        bound: dec("14.9"),
        param_box: vec![(dec("-0.1"), dec("0.1"))],
        tolerance: Rat::new(Int::from(1), Int::from(10000)),
    };
    let t = std::time::Instant::now();
    let res = min_oracle(&prob).unwrap();
    println!("elapsed: {:?}", t.elapsed());
    println!("nodes: {}", res.nodes);
    println!("lower: {} (~{})", res.lower, pilat_core::num::ratio::rat_to_f64(&res.lower));
    println!("upper: {} (~{})", res.upper, pilat_core::num::ratio::rat_to_f64(&res.upper));
    println!("inner_min ~{}", pilat_core::num::ratio::rat_to_f64(&res.inner_min));
    println!("inner_max ~{}", pilat_core::num::ratio::rat_to_f64(&res.inner_max));
}
