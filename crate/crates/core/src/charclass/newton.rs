use std::sync::Arc;

use super::ring::{Generator, RingClass, RingSpec};
use crate::rational::q;

/// The ring `Q[e_1, ..., e_k]` with `deg e_i = 2i`, in which the `k`-th
/// Newton polynomial is homogeneous of degree `2k`.
pub fn elementary_ring(k: u32) -> Arc<RingSpec> {
    let gens = (1..=k)
        .map(|i| Generator {
            name: format!("e{i}"),
            degree: 2 * i,
        })
        .collect();
    RingSpec::new(gens, 2 * k).expect("elementary generators are valid")
}

/// `N_k` with `N_k(e_1(x), ..., e_k(x)) = sum_i x_i^k`, built from Newton's
/// identities `p_k = sum_{i<k} (-1)^{i-1} e_i p_{k-i} + (-1)^{k-1} k e_k`.
pub fn newton_polynomial(k: u32) -> RingClass {
    assert!(k >= 1, "Newton polynomials start at k = 1");
    let spec = elementary_ring(k);
    let e: Vec<RingClass> = (0..k as usize).map(|i| RingClass::generator_at(&spec, i)).collect();
    let mut p: Vec<RingClass> = vec![RingClass::zero(&spec)];
    for n in 1..=k as usize {
        let mut pn = e[n - 1].scale(&q(n as i64));
        if n % 2 == 0 {
            pn = pn.neg();
        }
        for i in 1..n {
            let term = e[i - 1].mul(&p[n - i]).expect("same ring");
            pn = if i % 2 == 1 { pn.add(&term) } else { pn.sub(&term) }.expect("same ring");
        }
        p.push(pn);
    }
    p.pop().expect("k >= 1")
}

/// `[e_0, e_1, ..., e_count]` of the given classes.
pub fn elementary_symmetric(spec: &Arc<RingSpec>, vars: &[RingClass], count: u32) -> Vec<RingClass> {
    let mut e = vec![RingClass::zero(spec); count as usize + 1];
    e[0] = RingClass::one(spec);
    for x in vars {
        for j in (1..=count as usize).rev() {
            let term = x.mul(&e[j - 1]).expect("same ring");
            e[j] = e[j].add(&term).expect("same ring");
        }
    }
    e
}

/// Expands `N_k` in `nvars` formal roots and compares with the power sum.
pub fn verify_newton(k: u32, nvars: usize) -> bool {
    let spec = RingSpec::roots(nvars, "x", 2 * k);
    let xs: Vec<RingClass> = (0..nvars).map(|i| RingClass::generator_at(&spec, i)).collect();
    let e = elementary_symmetric(&spec, &xs, k);
    let lhs = match newton_polynomial(k).substitute(&spec, &e[1..]) {
        Ok(v) => v,
        Err(_) => return false,
    };
    let rhs = RingClass::sum(&spec, xs.iter().map(|x| x.pow(k)).collect::<Vec<_>>().iter())
        .expect("same ring");
    lhs == rhs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e_poly(k: u32, terms: &[(&[u32], i64)]) -> RingClass {
        let spec = elementary_ring(k);
        RingClass::from_terms(&spec, terms.iter().map(|(m, c)| (m.to_vec(), q(*c)))).unwrap()
    }

    #[test]
    fn first_newton_polynomials() {
        assert_eq!(newton_polynomial(1), e_poly(1, &[(&[1], 1)]));
        assert_eq!(newton_polynomial(2), e_poly(2, &[(&[2, 0], 1), (&[0, 1], -2)]));
        assert_eq!(
            newton_polynomial(3),
            e_poly(3, &[(&[3, 0, 0], 1), (&[1, 1, 0], -3), (&[0, 0, 1], 3)])
        );
    }

    /// Brute-force oracle: expand e_i in k+1 variables by enumerating subsets
    /// and compare against the power sum, independent of the recursion.
    #[test]
    fn n2_by_subset_enumeration() {
        let spec = RingSpec::roots(3, "x", 4);
        let xs: Vec<RingClass> = (0..3).map(|i| RingClass::generator_at(&spec, i)).collect();
        let mut e1 = RingClass::zero(&spec);
        let mut e2 = RingClass::zero(&spec);
        for mask in 1u32..8 {
            let members: Vec<usize> = (0..3).filter(|i| mask & (1 << i) != 0).collect();
            let mut prod = RingClass::one(&spec);
            for &i in &members {
                prod = prod.mul(&xs[i]).unwrap();
            }
            match members.len() {
                1 => e1 = e1.add(&prod).unwrap(),
                2 => e2 = e2.add(&prod).unwrap(),
                _ => {}
            }
        }
        let lhs = e1.pow(2).sub(&e2.scale(&q(2))).unwrap();
        let rhs = xs.iter().fold(RingClass::zero(&spec), |a, x| a.add(&x.pow(2)).unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn newton_identity_up_to_eight() {
        for k in 1..=8 {
            assert!(verify_newton(k, k as usize + 2), "k = {k}");
        }
    }
}
