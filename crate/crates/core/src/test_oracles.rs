//! Closed-form references computed independently of the code under test.

/// `Pr[Binom(n, p) >= k]`, summed in log space.
pub fn binomial_tail_ge(n: usize, p: f64, k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > n {
        return 0.0;
    }
    let ln_fact = |m: usize| (1..=m).map(|i| (i as f64).ln()).sum::<f64>();
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    (k..=n)
        .map(|i| {
            let ln_choose = ln_fact(n) - ln_fact(i) - ln_fact(n - i);
            let term = ln_choose + i as f64 * lp + (n - i) as f64 * lq;
            term.exp()
        })
        .sum()
}

#[test]
fn small_binomial_tails() {
    assert!((binomial_tail_ge(4, 0.5, 2) - 11.0 / 16.0).abs() < 1e-12);
    assert!((binomial_tail_ge(3, 0.1, 3) - 0.001).abs() < 1e-12);
    assert_eq!(binomial_tail_ge(3, 0.3, 0), 1.0);
}
