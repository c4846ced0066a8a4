//! Worked examples checked through the public API.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;

use padic_rigid::density::{density_report, has_root_mod_p, primes_up_to};
use padic_rigid::free::{finite_rank_free_basis, jp_linear_independence};
use padic_rigid::independence::{count_roots_mod_pn, find_relation};
use padic_rigid::poly::{IntPolynomial, UniPoly};
use padic_rigid::random::{sample_tree, Seed};
use padic_rigid::ring::{order_in_qa_mod_a, RationalVector, RingPresentation};
use padic_rigid::stats::{gl_exact_count, gl_probability, run_trials, Experiment};
use padic_rigid::zassenhaus::{complete_datum, verify_pair};
use padic_rigid::{Error, PadicApprox, PadicRing, PadicVector};

fn el(p: u64, n: u32, r: u64) -> PadicApprox {
    PadicApprox::new(p, n, r).unwrap()
}

fn ints(xs: &[i64]) -> Vec<BigInt> {
    xs.iter().map(|&x| BigInt::from(x)).collect()
}

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

#[test]
fn truncated_arithmetic() {
    assert_eq!(el(3, 2, 7).add(&el(3, 2, 5)).unwrap(), el(3, 2, 3));
    assert_eq!(el(2, 4, 15).add(&el(2, 4, 1)).unwrap(), el(2, 4, 0));
    assert_eq!(el(3, 2, 4).mul(&el(3, 2, 4)).unwrap(), el(3, 2, 7));
    assert_eq!(el(2, 3, 2).mul(&el(2, 3, 4)).unwrap(), el(2, 3, 0));
    assert_eq!(el(5, 3, 2).unit_inverse().unwrap(), el(5, 3, 63));
    assert!(matches!(el(3, 2, 3).unit_inverse(), Err(Error::NonUnit(_))));
    assert_eq!(el(2, 4, 12).valuation(), 2);
    assert_eq!(el(7, 3, 0).valuation(), 3);
    assert_eq!(el(5, 3, 13).valuation(), 0);
    assert_eq!(el(2, 4, 13).reduce_precision(2).unwrap(), el(2, 2, 1));
    assert!(el(5, 2, 1).reduce_precision(3).is_err());
    assert!(el(3, 2, 1).add(&el(3, 3, 1)).is_err());
}

#[test]
fn tree_shapes() {
    let t = sample_tree(2, 2, &Seed::new(4)).unwrap();
    assert_eq!(t.digits().len(), 7);
    let t0 = sample_tree(5, 0, &Seed::new(4)).unwrap();
    assert_eq!(t0.digits().len(), 1);
    assert!(t0.digits().values().all(|d| d < &BigUint::from(5u32)));
}

#[test]
fn relations_and_roots() {
    let ring = PadicRing::new(5, 6).unwrap();
    let lam = ring.from_i64(7);
    let xs = [lam.clone(), lam.mul(&lam).unwrap()];
    let r = find_relation(&xs, 2, 1).unwrap();
    let want = IntPolynomial::from_terms(2, [(vec![0, 1], BigInt::from(1)), (vec![2, 0], BigInt::from(-1))]);
    assert_eq!(r.witness, Some(want));
    assert_eq!(r.meaning, "relation at precision 6");

    let r = find_relation(&[ring.zero()], 1, 1).unwrap();
    assert_eq!(r.witness, Some(IntPolynomial::var(1, 0)));

    assert_eq!(count_roots_mod_pn(&"x^2-1".parse().unwrap(), 2, 3).unwrap(), BigUint::from(4u32));
    assert_eq!(count_roots_mod_pn(&"x^2+1".parse().unwrap(), 5, 2).unwrap(), BigUint::from(2u32));
    assert_eq!(count_roots_mod_pn(&UniPoly::x(), 7, 5).unwrap(), BigUint::from(1u32));
}

#[test]
fn independence_and_purification() {
    let ring = PadicRing::new(5, 10).unwrap();
    let e0 = PadicVector::basis(&ring, 0);
    let e1 = PadicVector::basis(&ring, 1);
    assert!(jp_linear_independence(&[e0.clone(), e1.clone()]).unwrap().independent);
    let v = jp_linear_independence(&[e0.clone(), e0.scale_int(&3.into())]).unwrap();
    assert!(!v.independent);
    assert_eq!(v.witness, Some(ints(&[3, -1])));
    let mixed = e0.add(&e1.scale_int(&5.into())).unwrap();
    assert!(!jp_linear_independence(&[e0.clone(), e1.clone(), mixed.clone()]).unwrap().independent);

    let r2 = PadicRing::new(2, 8).unwrap();
    let b = finite_rank_free_basis(&[PadicVector::basis(&r2, 0).scale_int(&2.into())], 4).unwrap();
    assert_eq!(b.basis[0].vector.entries().values().collect::<Vec<_>>(), [&BigUint::from(1u32)]);
    let b = finite_rank_free_basis(&[PadicVector::basis(&r2, 0).scale_int(&3.into())], 4).unwrap();
    assert_eq!(b.basis[0].vector.get(0), BigUint::from(3u32));
    assert_eq!(finite_rank_free_basis(&[e0, mixed, e1], 4).unwrap().rank, 2);
}

#[test]
fn ring_presentations() {
    let z = RingPresentation::integers();
    let gi = RingPresentation::gaussian_integers();
    assert!(z.validate().is_ok() && gi.validate().is_ok());
    assert!(RingPresentation::bundled("broken_no_identity").unwrap().validate().is_err());
    assert_eq!(gi.regular_rep(&ints(&[0, 1])), vec![ints(&[0, -1]), ints(&[1, 0])]);
    assert_eq!(z.invert_in_qa(&ints(&[2])).unwrap(), RationalVector(vec![q(1, 2)]));
    let zz = RingPresentation::bundled("z_cross_z").unwrap();
    assert!(matches!(zz.invert_in_qa(&ints(&[1, 0])), Err(Error::NonInvertible(_))));
    assert_eq!(gi.invert_in_qa(&ints(&[2, 0])).unwrap(), RationalVector(vec![q(1, 2), q(0, 1)]));
    assert_eq!(order_in_qa_mod_a(&RationalVector(vec![q(1, 2), q(1, 3)])), BigInt::from(6));
    assert_eq!(order_in_qa_mod_a(&RationalVector(vec![q(3, 4), q(1, 2)])), BigInt::from(4));
    assert_eq!(order_in_qa_mod_a(&RationalVector(vec![q(5, 1)])), BigInt::from(1));
}

#[test]
fn denominators_and_data() {
    let z = RingPresentation::integers();
    let gi = RingPresentation::gaussian_integers();
    let d = z.denominator_polynomial(&ints(&[1]), &ints(&[1])).unwrap();
    assert_eq!(d.f, "x-1".parse().unwrap());
    assert!(d.exceptional_primes.is_empty());
    let d = gi.denominator_polynomial(&ints(&[0, 1]), &ints(&[1, 0])).unwrap();
    assert_eq!(d.f, "x^2+1".parse().unwrap());
    let d = z.denominator_polynomial(&ints(&[2]), &ints(&[6])).unwrap();
    assert_eq!(d.f, "x-2".parse().unwrap());
    assert_eq!(d.exceptional_primes, vec![2, 3]);

    let dt = complete_datum(&z, 3, &ints(&[1]), 4).unwrap();
    assert_eq!((dt.r, dt.d.clone()), (1, BigInt::from(1)));
    assert!(verify_pair(&z, &ints(&[1]), &ints(&[1]), &dt).unwrap());
    let dt = complete_datum(&z, 3, &ints(&[1]), 5).unwrap();
    assert_eq!((dt.r, dt.d.clone()), (1, BigInt::from(4)));
    assert!(!verify_pair(&z, &ints(&[1]), &ints(&[1]), &dt).unwrap());
    let dt = complete_datum(&gi, 5, &ints(&[0, 1]), 7).unwrap();
    assert_eq!((dt.r, dt.d.clone()), (2, BigInt::from(2)));
    assert!(!verify_pair(&gi, &ints(&[1, 0]), &ints(&[1, 0]), &dt).unwrap());
}

#[test]
fn prime_scans() {
    assert_eq!(primes_up_to(10), [2, 3, 5, 7]);
    assert_eq!(primes_up_to(2), [2]);
    assert_eq!(primes_up_to(10_000).len(), 1229);
    let f: UniPoly = "x^2+1".parse().unwrap();
    assert!(has_root_mod_p(&f, 5).unwrap());
    assert!(!has_root_mod_p(&f, 3).unwrap());
    assert!(has_root_mod_p(&UniPoly::x(), 101).unwrap());
    let r = density_report(&"x^2-x".parse().unwrap(), 500).unwrap();
    assert_eq!(r.density_exact, "1/1");
}

#[test]
fn general_linear_counts() {
    assert_eq!(gl_exact_count(1, 2).unwrap(), BigUint::from(1u32));
    assert_eq!(gl_exact_count(2, 2).unwrap(), BigUint::from(6u32));
    assert_eq!(gl_exact_count(2, 3).unwrap(), BigUint::from(48u32));
    assert_eq!(gl_probability(1, 2).unwrap(), q(1, 2));
    assert_eq!(gl_probability(2, 2).unwrap(), q(3, 8));
    let e = Experiment::Gl { n: 2, q: 2 };
    let empty = run_trials(&e, 0, &Seed::new(1)).unwrap();
    assert_eq!(empty.frequency, None);
    let a = run_trials(&e, 300, &Seed::new(1)).unwrap();
    assert_eq!(a, run_trials(&e, 300, &Seed::new(1)).unwrap());
    let b = run_trials(&e, 300, &Seed::new(2)).unwrap();
    assert_eq!(a.merge(&b).unwrap().successes, a.successes + b.successes);
}
