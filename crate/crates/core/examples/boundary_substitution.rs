//! The boundary substitution on ball words and on arbitrary words.

use dca::dynamics::{growth_series, recode, substitute, Word};
use dca::hyperbolic::build_ball;

fn main() {
    let ball = build_ball(4);
    for k in 1..4 {
        let w = ball.boundary_word(k).unwrap();
        let image = substitute(&w).unwrap();
        let next = ball.boundary_word(k + 1).unwrap();
        let shift = image.rotation_to(&next);
        println!("T(word_{k}) has {} letters; matches word_{} after rotation {shift:?}", image.len(), k + 1);
    }
    let w = ball.boundary_word(1).unwrap();
    println!("word_1 recoded: {}", recode(&w).unwrap());
    println!("word_2 recoded: {}", recode(&substitute(&w).unwrap()).unwrap());

    for start in ["bwbwbwbw", "ww", "bbw"] {
        let s = growth_series(&Word::parse(start, true).unwrap(), 6, 1 << 20).unwrap();
        let last = s.ratios.last().copied().unwrap_or(f64::NAN);
        println!("{start:>8}: lengths {:?}, last ratio {last:.5}", s.lengths);
    }
}
