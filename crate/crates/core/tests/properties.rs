use dca::complex::{Color, Connection, VertexFunction};
use dca::dynamics::{abelianization_matrix, decode, recode, substitute, substituted_length, Word};
use dca::euclid::cauchy::pascal_kernel;
use dca::euclid::polynomials::{in_pol, PolElement};
use dca::euclid::{hex_patch, qb_apply, qw_apply, residue, LatticeFunction};
use dca::export::{read_lattice_csv_f64, write_lattice_f64};
use dca::ops::{build_q, Family, SimplexFunction};
use dca::scalar::{q, Q};
use proptest::prelude::*;

fn cyclic_word(max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(any::<bool>(), 2..max)
        .prop_map(|bits| Word::new(bits.into_iter().map(|b| if b { Color::Black } else { Color::White }).collect(), true))
}

proptest! {
    #[test]
    fn length_law(w in cyclic_word(60)) {
        let (alt, rep) = w.pair_census();
        let image = substitute(&w).unwrap();
        prop_assert_eq!(image.len(), 4 * alt + 3 * rep);
        prop_assert_eq!(substituted_length(&w), image.len());
    }

    #[test]
    fn letter_imbalance_is_preserved(w in cyclic_word(60)) {
        let excess = |w: &Word| w.count(Color::Black) as i64 - w.count(Color::White) as i64;
        prop_assert_eq!(excess(&substitute(&w).unwrap()), excess(&w));
    }

    #[test]
    fn recode_round_trip(w in cyclic_word(80)) {
        prop_assert_eq!(decode(&recode(&w).unwrap()).unwrap(), w);
    }

    #[test]
    fn recoded_substitution_commutes(w in cyclic_word(40)) {
        let lhs = recode(&substitute(&w).unwrap()).unwrap();
        let rhs = recode(&w).unwrap().substitute();
        prop_assert!(decode(&lhs).unwrap().equivalent(&decode(&rhs).unwrap()));
    }

    #[test]
    fn abelianization_counts_letters(w in cyclic_word(40)) {
        let a = abelianization_matrix();
        let before = recode(&w).unwrap().counts();
        let after = recode(&substitute(&w).unwrap()).unwrap().counts();
        for t in 0..4 {
            let predicted: i64 = (0..4).map(|s| a[t][s] * before[s] as i64).sum();
            prop_assert_eq!(predicted, after[t] as i64);
        }
    }

    #[test]
    fn color_swap_equivariance(w in cyclic_word(40)) {
        prop_assert_eq!(substitute(&w.swapped()).unwrap(), substitute(&w).unwrap().swapped());
    }

    #[test]
    fn rotation_invariance(w in cyclic_word(40), k in 0usize..40) {
        let r = w.rotated(k % w.len());
        prop_assert!(r.equivalent(&w));
        prop_assert!(substitute(&r).unwrap().equivalent(&substitute(&w).unwrap()));
    }

    #[test]
    fn pascal_kernel_is_fundamental(depth in 2i64..14) {
        let r = qb_apply(&pascal_kernel(depth)).unwrap();
        for (p, v) in &r.values {
            prop_assert_eq!(v.clone(), q(i64::from(*p == (0, 0))));
        }
    }

    #[test]
    fn residue_functions_are_covariant_constants(a in -9i64..9, b in -9i64..9) {
        let f = [q(a), q(b), q(-a - b)];
        let psi: LatticeFunction<Q> =
            (-5..=5).flat_map(|m| (-5..=5).map(move |n| (m, n))).map(|p| (p, f[residue(p)].clone())).collect();
        prop_assert!(qb_apply(&psi).unwrap().values.values().all(|v| *v == q(0)));
        prop_assert!(qw_apply(&psi).unwrap().values.values().all(|v| *v == q(0)));
    }

    #[test]
    fn polynomials_are_holomorphic(k in 0usize..4, seed in prop::collection::vec(-5i64..5, 8)) {
        let p = PolElement::new(k, (1, -2), seed[..2 * k + 2].iter().map(|&x| q(x)).collect());
        let f = p.eval_rect((-6, 6), (-6, 6));
        prop_assert!(qb_apply(&f).unwrap().values.values().all(|v| *v == q(0)));
        prop_assert!(in_pol(&f, k).unwrap());
    }

    #[test]
    fn black_operator_adjointness(psi_seed in prop::collection::vec(-6i64..6, 37), phi_seed in prop::collection::vec(-6i64..6, 24)) {
        let patch = hex_patch(3).unwrap();
        let conn = Connection::<Q>::canonical(&patch.surface);
        let qb = build_q(&patch.surface, Some(&patch.coloring), Family::Black, &conn).unwrap();
        let psi: VertexFunction<Q> = qb.vertices().iter().zip(psi_seed.iter().cycle()).map(|(&v, &x)| (v, q(x))).collect();
        let phi: SimplexFunction<Q> = qb.rows().iter().zip(phi_seed.iter().cycle()).map(|(&t, &x)| (t, q(x))).collect();
        let qpsi = qb.apply(&psi).unwrap();
        let qstar = qb.adjoint_apply(&phi).unwrap();
        let lhs: Q = qpsi.values.iter().map(|(t, x)| x * phi.at(*t)).sum();
        let rhs: Q = psi.values.iter().map(|(v, x)| x * qstar.at(*v)).sum();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn lattice_csv_is_lossless(vals in prop::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 1..30)) {
        let f: LatticeFunction<f64> = vals.iter().enumerate().map(|(i, v)| ((i as i64 - 7, 3 - i as i64), *v)).collect();
        let mut buf = Vec::new();
        write_lattice_f64(&mut buf, &f).unwrap();
        prop_assert_eq!(read_lattice_csv_f64(&buf[..]).unwrap(), f);
    }
}

/// Non-equivalent cyclic words have non-equivalent images, checked
/// exhaustively for short words.
#[test]
fn substitution_is_injective_on_short_cyclic_words() {
    use std::collections::BTreeMap;
    let canon = |w: &Word| (0..w.len()).map(|k| w.rotated(k).to_string()).min().unwrap();
    for n in 2..=12usize {
        let mut images: BTreeMap<String, String> = BTreeMap::new();
        for bits in 0u32..(1 << n) {
            let w = Word::new((0..n).map(|i| if bits >> i & 1 == 1 { Color::Black } else { Color::White }).collect(), true);
            let key = canon(&w);
            let image = canon(&substitute(&w).unwrap());
            if let Some(prev) = images.insert(image, key.clone()) {
                assert_eq!(prev, key, "length {n}");
            }
        }
    }
}
