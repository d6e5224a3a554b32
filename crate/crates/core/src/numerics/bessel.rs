//! Integer-order Bessel functions of the first kind.
//!
//! Evaluated by Miller's downward recurrence normalized with
//! `J_0 + 2 Σ J_{2m} = 1`.

const RESCALE_ABOVE: f64 = 1e250;

fn start_index(kmax: usize, ax: f64) -> usize {
    let top = (kmax as f64).max(ax);
    let m = (top + 20.0 + (40.0 * top).sqrt()).ceil() as usize;
    m + (m & 1)
}

/// `J_0(x) .. J_kmax(x)` in one downward sweep.
pub fn bessel_j_seq(kmax: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; kmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();
    let start = start_index(kmax, ax);
    let two_over_x = 2.0 / ax;

    let mut j_next = 0.0;
    let mut j_cur = 1e-300;
    let mut norm = 0.0;
    for n in (1..=start).rev() {
        // j_cur holds J_n (unnormalized); produce J_{n-1}
        let j_prev = n as f64 * two_over_x * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        let idx = n - 1;
        if idx <= kmax {
            out[idx] = j_cur;
        }
        if idx % 2 == 0 && idx > 0 {
            norm += 2.0 * j_cur;
        }
        if j_cur.abs() > RESCALE_ABOVE {
            j_cur /= RESCALE_ABOVE;
            j_next /= RESCALE_ABOVE;
            norm /= RESCALE_ABOVE;
            for v in out.iter_mut() {
                *v /= RESCALE_ABOVE;
            }
        }
    }
    norm += j_cur;
    for v in out.iter_mut() {
        *v /= norm;
    }
    if x < 0.0 {
        for (k, v) in out.iter_mut().enumerate() {
            if k % 2 == 1 {
                *v = -*v;
            }
        }
    }
    out
}

/// `J_k(x)` for any integer order.
pub fn bessel_j(k: i64, x: f64) -> f64 {
    let ak = k.unsigned_abs() as usize;
    let v = bessel_j_seq(ak, x)[ak];
    if k < 0 && ak % 2 == 1 {
        -v
    } else {
        v
    }
}

/// Upper bound `(|x|/2)^k / k!` on `|J_k(x)|` for `k ≥ 0`.
pub fn bessel_tail_bound(k: usize, x: f64) -> f64 {
    let half = 0.5 * x.abs();
    let mut b = 1.0;
    for j in 1..=k {
        b *= half / j as f64;
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power_series(k: usize, x: f64) -> f64 {
        let half = 0.5 * x;
        let mut term = 1.0;
        for j in 1..=k {
            term *= half / j as f64;
        }
        let mut sum = term;
        for m in 1..200 {
            term *= -half * half / (m as f64 * (m + k) as f64);
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    }

    #[test]
    fn j0_at_origin() {
        assert_eq!(bessel_j(0, 0.0), 1.0);
        assert_eq!(bessel_j(3, 0.0), 0.0);
    }

    #[test]
    fn j1_of_two() {
        assert!((bessel_j(1, 2.0) - 0.5767248077568734).abs() < 1e-13);
        assert!((bessel_j(1, 2.0) - power_series(1, 2.0)).abs() < 1e-14);
    }

    #[test]
    fn matches_power_series_small_argument() {
        for k in 0..30 {
            for &x in &[0.1, 0.7, 1.5, 3.0, 6.0] {
                let a = bessel_j(k as i64, x);
                let b = power_series(k, x);
                assert!((a - b).abs() <= 1e-13 * b.abs().max(1e-300) + 1e-300 || (a - b).abs() < 1e-15, "k={k} x={x} {a} {b}");
            }
        }
    }

    #[test]
    fn normalization_identity() {
        for &x in &[0.3, 5.0, 47.0, 250.0, 500.0] {
            let j = bessel_j_seq(2 * (x as usize) + 60, x);
            let s: f64 = j[0] + 2.0 * j.iter().skip(2).step_by(2).sum::<f64>();
            assert!((s - 1.0).abs() < 1e-13, "x={x} sum={s}");
        }
    }

    #[test]
    fn three_term_recurrence() {
        for &x in &[0.5, 3.3, 20.0, 120.0, 480.0] {
            let j = bessel_j_seq(201, x);
            for k in 1..200 {
                let lhs = j[k - 1] + j[k + 1];
                let rhs = 2.0 * k as f64 / x * j[k];
                assert!((lhs - rhs).abs() < 1e-11, "x={x} k={k}");
            }
        }
    }

    #[test]
    fn negative_order_and_argument() {
        assert!((bessel_j(-3, 2.5) + bessel_j(3, 2.5)).abs() < 1e-16);
        assert!((bessel_j(-4, 2.5) - bessel_j(4, 2.5)).abs() < 1e-16);
        assert!((bessel_j(3, -2.5) + bessel_j(3, 2.5)).abs() < 1e-16);
    }

    #[test]
    fn large_argument_against_asymptotics() {
        let x: f64 = 400.0;
        let asym = (2.0 / (std::f64::consts::PI * x)).sqrt() * (x - std::f64::consts::FRAC_PI_4).cos();
        // leading asymptotic term is accurate to O(1/x) relative
        assert!((bessel_j(0, x) - asym).abs() < 2e-4);
    }

    #[test]
    fn tail_bound_dominates() {
        for k in 0..60 {
            let x = 7.0;
            assert!(bessel_j(k as i64, x).abs() <= bessel_tail_bound(k, x) * (1.0 + 1e-12));
        }
    }
}
