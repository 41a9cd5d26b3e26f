//! Index conventions for (2+1) dimensions.
//!
//! Lorentz indices A = 0, 1, 2 with eta = diag(-1, +1, +1); spacetime
//! indices mu = t, x, y stored as 0, 1, 2. `eps^{012} = +1` and
//! `eps^{ij} = eps^{0ij}`. Lowered symbols always go through eta, so
//! `eps_{012} = -1`.

/// Minkowski metric diagonal.
pub const ETA: [f64; 3] = [-1.0, 1.0, 1.0];

/// Totally antisymmetric symbol with `eps(0, 1, 2) = +1` (upper indices).
pub fn eps(a: usize, b: usize, c: usize) -> f64 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// `eps_{ABC}` with all indices lowered by eta.
pub fn eps_lower(a: usize, b: usize, c: usize) -> f64 {
    ETA[a] * ETA[b] * ETA[c] * eps(a, b, c)
}

/// `eps^A_{BC}`: first index up, last two lowered.
pub fn eps_mixed(a: usize, b: usize, c: usize) -> f64 {
    ETA[b] * ETA[c] * eps(a, b, c)
}

/// Two-dimensional symbol `eps^{ij}` on spatial indices 0 = x, 1 = y.
pub fn eps2(i: usize, j: usize) -> f64 {
    match (i, j) {
        (0, 1) => 1.0,
        (1, 0) => -1.0,
        _ => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowered_symbol_picks_up_one_minus_sign() {
        assert_eq!(eps_lower(0, 1, 2), -1.0);
        assert_eq!(eps_mixed(0, 1, 2), 1.0);
        assert_eq!(eps_mixed(1, 2, 0), -1.0);
    }

    #[test]
    fn contraction_identity() {
        // eps^{ABC} eps_{ABC} = -3! in Lorentzian signature
        let mut s = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    s += eps(a, b, c) * eps_lower(a, b, c);
                }
            }
        }
        assert_eq!(s, -6.0);
    }
}
