//! Extremal index functions for general densities and derivatives.
//!
//! All functions take the simplex coordinate `alpha = tau_1 / (tau_1 + tau_2)`
//! and are written without dividing by `alpha` or `1 - alpha`, so the edges of
//! the simplex need no special casing.

use super::scalar::{max, min, Scalar};

/// `Z_2 = f(Z_1)`, no further orbit relation.
///
/// `rho_ratio = rho(zeta) / rho(f zeta)`, `df = |Df(zeta)|`.
pub fn linked_theta<S: Scalar>(alpha: &S, rho_ratio: &S, df: &S) -> S {
    let beta = S::one() - alpha.clone();
    max(S::zero(), alpha.clone() - rho_ratio.clone() * beta.clone() / df.clone()) + beta
}

/// Derivative and density data along a period-2 orbit `{zeta, f zeta}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicOrbit<S> {
    pub rho_zeta: S,
    pub rho_fzeta: S,
    pub df_zeta: S,
    pub df_fzeta: S,
    /// `|Df^2(zeta)|`.
    pub df2: S,
}

/// `alpha theta_zeta + (1 - alpha) theta_{f zeta}` on a period-2 orbit.
pub fn periodic_theta<S: Scalar>(alpha: &S, p: &PeriodicOrbit<S>) -> S {
    let beta = S::one() - alpha.clone();
    let first = alpha.clone()
        - max(
            beta.clone() * p.rho_zeta.clone() / (p.rho_fzeta.clone() * p.df_zeta.clone()),
            alpha.clone() / p.df2.clone(),
        );
    let second = beta.clone()
        - max(
            alpha.clone() * p.rho_fzeta.clone() / (p.rho_zeta.clone() * p.df_fzeta.clone()),
            beta / p.df2.clone(),
        );
    max(S::zero(), first) + max(S::zero(), second)
}

/// `Z_2 = f(Z_1)` with `f(Z_2) = Z_2`; `theta_fixed` is the index of the fixed point.
pub fn fixed_image_theta<S: Scalar>(alpha: &S, rho_ratio: &S, df: &S, theta_fixed: &S) -> S {
    let beta = S::one() - alpha.clone();
    max(S::zero(), alpha.clone() - rho_ratio.clone() * beta.clone() / df.clone()) + beta * theta_fixed.clone()
}

/// Local data for two maximal sets `{zeta_1, zeta_3}`, `{zeta_2, zeta_3}` with `zeta_3 = f(zeta_1) = f(zeta_2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapData<S> {
    pub df1: S,
    pub df2: S,
    pub rho1: S,
    pub rho2: S,
    pub rho3: S,
    /// Ball-measure constants `mu(B_r(zeta_k)) ~ c_k r`.
    pub c: [S; 3],
    /// `mu(hat V_i) / mu(V_i)`; kept as inputs since any positive level gives the same ratio.
    pub r1: S,
    pub r2: S,
}

impl<S: Scalar> OverlapData<S> {
    /// Lebesgue measure and a map of constant slope `b`.
    pub fn lebesgue(b: i64) -> Self {
        let one = S::one;
        OverlapData {
            df1: S::ratio(b, 1),
            df2: S::ratio(b, 1),
            rho1: one(),
            rho2: one(),
            rho3: one(),
            c: [S::ratio(2, 1), S::ratio(2, 1), S::ratio(2, 1)],
            r1: one(),
            r2: one(),
        }
    }

    /// `tau_1 + tau_2 - c_3 min_i tau_i / (c_i + c_3)`.
    pub fn gamma_hat(&self, tau1: &S, tau2: &S) -> S {
        let [c1, c2, c3] = &self.c;
        let m = min(
            tau1.clone() / (c1.clone() + c3.clone()),
            tau2.clone() / (c2.clone() + c3.clone()),
        );
        tau1.clone() + tau2.clone() - c3.clone() * m
    }

    /// Weights `(p_1, p_2, p_3)` of the neighbourhoods of `zeta_1`, `zeta_2` and `zeta_3`.
    pub fn weights(&self, alpha: &S) -> [S; 3] {
        let beta = S::one() - alpha.clone();
        let [c1, c2, c3] = &self.c;
        let total = self.gamma_hat(alpha, &beta);
        let p1 = alpha.clone() * c1.clone() / (c1.clone() + c3.clone()) / total.clone();
        let p2 = beta * c2.clone() / (c2.clone() + c3.clone()) / total;
        let p3 = S::one() - p1.clone() - p2.clone();
        [p1, p2, p3]
    }

    /// `(p_1 (1 - theta_1), p_2 (1 - theta_2))`, the mass lost to an immediate entry near `zeta_3`.
    fn losses(&self, alpha: &S) -> [S; 2] {
        let [p1, p2, _] = self.weights(alpha);
        let beta = S::one() - alpha.clone();
        let [c1, c2, c3] = &self.c;
        let v1 = alpha.clone() * c1.clone() / (c1.clone() + c3.clone());
        let v2 = beta * c2.clone() / (c2.clone() + c3.clone());
        let one = S::one();
        // theta_1 = max{0, 1 - (rho1/rho3)/df1 * max{r1, r2/R}} with R = v1/v2, scaled by v1
        let s1 = self.rho1.clone() / (self.rho3.clone() * self.df1.clone());
        let kept1 = max(
            S::zero(),
            v1.clone() - s1 * max(self.r1.clone() * v1.clone(), self.r2.clone() * v2.clone()),
        );
        let s2 = self.rho2.clone() / (self.rho3.clone() * self.df2.clone());
        let kept2 = max(
            S::zero(),
            v2.clone() - s2 * max(self.r2.clone() * v2.clone(), self.r1.clone() * v1.clone()),
        );
        let loss = |p: S, kept: S, v: S| {
            if v.is_zero() {
                S::zero()
            } else {
                p * (one.clone() - kept / v)
            }
        };
        [loss(p1, kept1, v1), loss(p2, kept2, v2)]
    }

    /// `1 - p_1 (1 - theta_1) - p_2 (1 - theta_2)`: no return to `zeta_3`.
    pub fn theta_nonperiodic(&self, alpha: &S) -> S {
        let [l1, l2] = self.losses(alpha);
        S::one() - l1 - l2
    }

    /// `p_1 theta_1 + p_2 theta_2 + p_3 theta_3` when `zeta_3` is fixed with index `theta_3`.
    pub fn theta_periodic(&self, alpha: &S, theta3: &S) -> S {
        let [l1, l2] = self.losses(alpha);
        let [p1, p2, p3] = self.weights(alpha);
        p1 - l1 + p2 - l2 + p3 * theta3.clone()
    }
}

/// Three observables at `zeta_1`, `zeta_2` and `f(zeta_1) = f(zeta_2)`.
///
/// `k_i = rho(zeta_i) / (rho(f zeta_i) |Df(zeta_i)|)`; `(alpha, beta, gamma)` sums to one.
pub fn trivariate_theta<S: Scalar>(alpha: &S, beta: &S, k1: &S, k2: &S) -> S {
    let gamma = S::one() - alpha.clone() - beta.clone();
    S::one() - min(alpha.clone(), gamma.clone() * k1.clone()) - min(beta.clone(), gamma * k2.clone())
}
