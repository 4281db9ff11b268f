use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use toric_mirror::cli::{self, parse_input, ChiMode, InputDocument, ProfileSpec};
use toric_mirror::curves::{MoriData, RefinedFanData};
use toric_mirror::exactalg::{rat, rint, Rat, RatFn};
use toric_mirror::iseries::MirrorSetup;
use toric_mirror::lattice::{hnf_rows, smith_normal_form, IntMatrix};
use toric_mirror::mirrorflow::*;
use toric_mirror::stackyfan::{NVec, StackyFan};

fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..4, 1usize..4).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-6i64..7, c), r))
}

fn rational() -> impl Strategy<Value = Rat> {
    (-9i64..10, 1i64..5).prop_map(|(n, d)| rat(n, d))
}

/// χ = 0 makes a tangent weight vanish.
fn nonzero() -> impl Strategy<Value = Rat> {
    rational().prop_filter("nonzero", |r| !r.is_zero())
}

/// Linear form c0 + c1·x1 + c2·x2 + c3·z in three χ-variables and z.
fn linear_ratfn() -> impl Strategy<Value = RatFn> {
    prop::collection::vec(rational(), 4).prop_map(|c| {
        let nv = 3;
        let mut f = RatFn::constant(nv, c[0].clone());
        for (i, ci) in c.iter().enumerate().skip(1).take(2) {
            f = &f + &RatFn::var(nv, i).scale(ci);
        }
        &f + &RatFn::z(nv).scale(&c[3])
    })
}

/// Weighted projective line: rays a and −b.
fn weighted_line(a: i64, b: i64) -> StackyFan {
    StackyFan::new(1, vec![], vec![vec![a], vec![-b]], vec![vec![0], vec![1]]).unwrap()
}

/// Interior points of both rays, so the box is generated.
fn line_ext(a: i64, b: i64) -> Vec<NVec> {
    (1..a).map(|x| vec![x]).chain((1..b).map(|x| vec![-x])).collect()
}

fn line_mirror(a: i64, b: i64, chi: Option<Vec<Rat>>) -> Mirror {
    let s = MirrorSetup::new(&weighted_line(a, b), 0, &line_ext(a, b), None, rint(2), 0, 1, chi.as_deref()).unwrap();
    Mirror::new(&s, select_basis(&s).unwrap()).unwrap()
}

/// Complete rank-2 fan with rays e1, e2, (−a, −b).
fn triangle(a: i64, b: i64) -> StackyFan {
    StackyFan::new(2, vec![], vec![vec![1, 0], vec![0, 1], vec![-a, -b]], vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
}

fn line_document() -> impl Strategy<Value = InputDocument> {
    (1i64..4, 1i64..4, 0u32..3, 0u32..3, 0i64..4, prop::option::of(prop::collection::vec(nonzero(), 1)), 1usize..3).prop_map(
        |(a, b, tord, yord, qdeg, chi, sigma0)| InputDocument {
            rank: 1,
            torsion: vec![],
            rays: vec![vec![a], vec![-b]],
            cones: vec![vec![1], vec![2]],
            ext: line_ext(a, b),
            ample: None,
            profile: ProfileSpec { qdeg: rint(qdeg), tord, yord },
            chi: chi.map_or(ChiMode::Symbolic, ChiMode::Values),
            sigma0,
            basis: None,
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn smith_form_is_an_equivalence(rows in small_matrix()) {
        let a = IntMatrix::from_rows(&rows);
        let (u, d, v) = smith_normal_form(&a);
        prop_assert_eq!(u.mul(&a).mul(&v), d.clone());
        prop_assert!(u.determinant().abs().is_one());
        prop_assert!(v.determinant().abs().is_one());
        let diag: Vec<BigInt> = (0..rows.len().min(rows[0].len())).map(|i| d.get(i, i).clone()).collect();
        for w in diag.windows(2) {
            prop_assert!(!w[0].is_negative());
            if !w[0].is_zero() {
                prop_assert!((&w[1] % &w[0]).is_zero());
            } else {
                prop_assert!(w[1].is_zero());
            }
        }
    }

    #[test]
    fn hermite_form_depends_only_on_the_lattice(rows in small_matrix(), i in 0usize..3, j in 0usize..3, c in -3i64..4) {
        let big: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let n = big.len();
        let (i, j) = (i % n, j % n);
        let mut moved = big.clone();
        if i != j {
            let add: Vec<BigInt> = moved[j].iter().map(|x| x * c).collect();
            for (x, y) in moved[i].iter_mut().zip(add) {
                *x += y;
            }
        }
        moved.swap(0, n - 1);
        let h = hnf_rows(&big);
        prop_assert_eq!(&h, &hnf_rows(&moved));
        prop_assert_eq!(&h, &hnf_rows(&h));
    }

    #[test]
    fn rational_function_arithmetic(a in linear_ratfn(), b in linear_ratfn(), c in linear_ratfn()) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(a.negate_z().negate_z(), a.clone());
        if !b.is_zero() {
            prop_assert_eq!(&(&a * &b) / &b, a.clone());
            prop_assert_eq!(&(&a / &b) + &(&c / &b), &(&a + &c) / &b);
        }
    }

    #[test]
    fn binomial_exponents_add(e in rational(), f in rational()) {
        let n = 6;
        let (x, y) = (binomial_series(&e, n), binomial_series(&f, n));
        let prod: Vec<Rat> = (0..=n).map(|k| (0..=k).map(|i| &x[i] * &y[k - i]).sum()).collect();
        prop_assert_eq!(prod, binomial_series(&(&e + &f), n));
    }

    #[test]
    fn document_round_trip(doc in line_document()) {
        let text = doc.serialize();
        let back = parse_input(&text).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(back.serialize(), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn reports_are_deterministic(doc in line_document()) {
        let first = cli::run("sequences", &doc).unwrap();
        let again = cli::run("sequences", &parse_input(&doc.serialize()).unwrap()).unwrap();
        prop_assert_eq!(first.to_json(), again.to_json());
        prop_assert_eq!(first.to_text(), again.to_text());
        prop_assert_eq!(cli::digest(&doc).len(), 64);
    }

    #[test]
    fn localized_series_satisfy_ode_and_galois(a in 1i64..4, b in 1i64..4, k in -4i64..5) {
        let s = MirrorSetup::new(&weighted_line(a, b), 0, &line_ext(a, b), None, rint(2), 0, 1, None).unwrap();
        prop_assert_eq!(s.galois_check_loc(&[k]), None);
        prop_assert!(s.verify_loc_ode(&[vec![k]]).ok());
    }

    #[test]
    fn enumeration_matches_brute_force(a in 1i64..4, b in 1i64..4) {
        let fan = triangle(a, b);
        let rd = RefinedFanData::new(&fan, 0).unwrap();
        let mori = MoriData::new(&rd, None).unwrap();
        let bound = rint(3);
        let mut got = mori.enumerate_effective(&bound);
        got.sort();
        let side = 10i64;
        let mut want = Vec::new();
        for q in -side..=side {
            let d = rd.from_lambda(&[q]);
            let eff = fan.max_cones.iter().any(|c| (0..fan.m()).all(|i| c.contains(&i) || d[i] >= Rat::zero()));
            if eff && mori.degree(&[q]) <= bound {
                want.push(vec![q]);
            }
        }
        prop_assert_eq!(got, want);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn quantum_product_is_commutative_and_associative(a in 1i64..4, b in 1i64..3) {
        let mir = line_mirror(a, b, None);
        let (comm, assoc) = cli::star_checks(&mir).unwrap();
        prop_assert_eq!(comm, Ok(()));
        prop_assert_eq!(assoc, Ok(()));
    }

    #[test]
    fn pairing_is_symmetric(a in 1i64..4, b in 1i64..3, chi in prop::option::of(1i64..5)) {
        let mir = line_mirror(a, b, chi.map(|c| vec![rint(c)]));
        for m in mir.pairing_matrix().unwrap().values() {
            for i in 0..mir.n() {
                for j in 0..mir.n() {
                    prop_assert_eq!(&m[i][j], &m[j][i].negate_z());
                    prop_assert!(m[i][j].is_polynomial());
                }
            }
        }
    }

    #[test]
    fn connections_are_flat(a in 1i64..4, b in 1i64..3) {
        let mir = line_mirror(a, b, None);
        let dirs = mir.directions();
        for x in &dirs {
            for y in &dirs {
                prop_assert!(mir.gm_flatness_defect(x, y).unwrap().is_zero());
                let (comm, curl) = mir.quantum_flatness_defect(x, y).unwrap();
                prop_assert!(comm.is_zero() && curl.is_zero());
            }
        }
    }

    #[test]
    fn bernoulli_terms_cancel(a in 1i64..4, b in 1i64..3) {
        let s = MirrorSetup::new(&weighted_line(a, b), 0, &line_ext(a, b), None, rint(1), 0, 1, None).unwrap();
        prop_assert_eq!(bernoulli_cancellation(&s, 3), Ok(()));
    }
}
