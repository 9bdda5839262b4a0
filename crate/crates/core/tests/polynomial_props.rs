use hermite_rolle::Polynomial;
use proptest::prelude::*;

fn coeffs(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, 1..=max_len)
}

fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= 1e-12 * scale.max(1.0)
}

/// Sum of term magnitudes, the natural scale for rounding in Horner.
fn magnitude(p: &Polynomial, x: f64) -> f64 {
    p.coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| c.abs() * x.abs().powi(k as i32))
        .sum()
}

proptest! {
    #[test]
    fn derivative_inverts_antiderivative(c in coeffs(11), x in -2.0f64..2.0) {
        let p = Polynomial::new(c);
        let back = p.antiderivative().derivative();
        prop_assert!(close(back.eval(x), p.eval(x), magnitude(&p, x)));
    }

    #[test]
    fn integrals_are_additive(c in coeffs(11), a in -2.0f64..0.0, mid in 0.0f64..1.0, b in 1.0f64..2.0) {
        let p = Polynomial::new(c);
        let lhs = p.integrate_definite(a, mid) + p.integrate_definite(mid, b);
        let rhs = p.integrate_definite(a, b);
        let scale = magnitude(&p.antiderivative(), 2.0);
        prop_assert!(close(lhs, rhs, scale), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn mul_commutes_and_evaluates(c1 in coeffs(6), c2 in coeffs(6), x in -2.0f64..2.0) {
        let p = Polynomial::new(c1);
        let q = Polynomial::new(c2);
        let pq = &p * &q;
        let qp = &q * &p;
        prop_assert_eq!(pq.coeffs().len(), qp.coeffs().len());
        for (a, b) in pq.coeffs().iter().zip(qp.coeffs()) {
            prop_assert!(close(*a, *b, 25.0 * 6.0));
        }
        if !p.is_zero() && !q.is_zero() {
            prop_assert_eq!(pq.degree(), p.degree() + q.degree());
        }
        let scale = magnitude(&p, x) * magnitude(&q, x);
        prop_assert!(close(pq.eval(x), p.eval(x) * q.eval(x), scale));
    }
}
