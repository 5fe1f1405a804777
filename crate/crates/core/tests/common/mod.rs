#![allow(dead_code)]

use atypical::poly::SparsePoly;
use atypical::scalar::GaussRational;
use proptest::prelude::*;

pub const FIXTURES: &[(&str, &[&str])] = &[
    ("x*y - 1", &["x", "y", "z"]),
    ("y^2*z", &["x", "y", "z"]),
    ("x*y + 1", &["x", "y", "z"]),
    ("(x*y*z+1)*(x*y*z+z-1)", &["x", "y", "z"]),
    ("x + x^2*y", &["x", "y"]),
    ("x^2 + y^2", &["x", "y"]),
    ("(x+y)^2 + x*y^3", &["x", "y"]),
    ("x^2*y^2 - 2*x*y + x", &["x", "y"]),
    ("(1/2 - 3i)*x^3 - i*y + 7/3", &["x", "y"]),
    ("-(a - b)^3*c", &["a", "b", "c"]),
];

/// Random polynomials with Gaussian-integer coefficients.
pub fn random_poly(max_n: usize, max_deg: u32, max_terms: usize) -> impl Strategy<Value = SparsePoly> {
    (1..=max_n)
        .prop_flat_map(move |n| {
            let term = (prop::collection::vec(0..=max_deg, n), -5i64..=5, -5i64..=5);
            (Just(n), prop::collection::vec(term, 1..=max_terms))
        })
        .prop_map(move |(n, terms)| {
            let terms = terms.into_iter().map(move |(mut e, re, im)| {
                // keep the total degree bounded
                while e.iter().sum::<u32>() > max_deg {
                    let k = e.iter().position(|&x| x > 0).expect("positive degree");
                    e[k] -= 1;
                }
                let c = &GaussRational::from_int(re) + &(&GaussRational::from_int(im) * &GaussRational::imag_unit());
                (e, c)
            });
            SparsePoly::from_terms(n, terms).expect("lengths match")
        })
}
