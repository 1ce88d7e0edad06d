//! Bessel functions of the first kind, integer order, by Miller's downward
//! recurrence (stable where upward recursion is not) with a power-series path
//! for small arguments.

/// J_0(x)..J_{n_max}(x) for x ≥ 0.
pub fn bessel_jn_list(n_max: usize, x: f64) -> Vec<f64> {
    assert!(x >= 0.0 && x.is_finite());
    if x == 0.0 {
        let mut out = vec![0.0; n_max + 1];
        out[0] = 1.0;
        return out;
    }
    if x <= 2.0 {
        return (0..=n_max).map(|n| series_jn(n, x)).collect();
    }
    // start the downward recursion far enough above max(n_max, x) that the
    // contamination from the arbitrary seed has decayed below roundoff
    let n_start = {
        let base = n_max.max(x.ceil() as usize);
        let margin = 16 + (40.0 * base as f64).sqrt().ceil() as usize;
        (base + margin + 1) & !1
    };
    let mut f = vec![0.0f64; n_start + 2];
    f[n_start + 1] = 0.0;
    f[n_start] = 1e-300;
    for k in (1..=n_start).rev() {
        f[k - 1] = (2.0 * k as f64 / x) * f[k] - f[k + 1];
        if f[k - 1].abs() > 1e250 {
            for v in f.iter_mut().skip(k - 1) {
                *v *= 1e-250;
            }
        }
    }
    // normalization: J_0 + 2·Σ J_{2k} = 1
    let mut norm = f[0];
    let mut k = 2;
    while k <= n_start {
        norm += 2.0 * f[k];
        k += 2;
    }
    f.truncate(n_max + 1);
    for v in &mut f {
        *v /= norm;
    }
    while f.len() < n_max + 1 {
        f.push(0.0);
    }
    f
}

/// J_n(x) for x ≥ 0.
pub fn bessel_jn(n: usize, x: f64) -> f64 {
    bessel_jn_list(n, x)[n]
}

/// Power series Σ_k (−1)^k (x/2)^{n+2k} / (k!(n+k)!), accurate for small x.
fn series_jn(n: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    // leading term (x/2)^n / n!
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
    }
    let mut sum = term;
    for k in 1..60 {
        term *= -(half * half) / (k as f64 * (n + k) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}
