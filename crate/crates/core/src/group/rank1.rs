//! Rank-1 operations: Weyl representatives, the maximal-window
//! decomposition identity, and the Iwahori `a`, `b`, `c` functions with
//! their closed forms.

use crate::ring::Elem;
use crate::rootsystem::Root;

use super::{Group, GroupError, Mat};

impl Group {
    /// `n = u_α(1)·u_{−α}(−1)·u_α(1)`, normalizing the diagonal torus.
    /// Verifies both factorizations `n = u u' u = u' u u'` and
    /// `u' = n u n⁻¹ = n⁻¹ u n` before returning.
    pub fn weyl_rep(&self, alpha: &Root) -> Result<Mat, GroupError> {
        if self.lo_of(alpha) != 0 || self.lo_of(&alpha.neg()) != 0 {
            // An Iwahori-type window lacks valuation-0 elements on one side.
            return Err(GroupError::NotAvailable);
        }
        let u = self.root_element(alpha, &self.ring.one())?;
        let up = self.root_element(&alpha.neg(), &self.ring.neg(&self.ring.one()))?;
        let n = self.mul(&self.mul(&u, &up), &u);
        if self.mul(&self.mul(&up, &u), &up) != n {
            return Err(GroupError::NoFactorization);
        }
        let conj = self.conjugate(&n, &u);
        let conj2 = self.mul(&self.mul(&self.inv(&n), &u), &n);
        if conj != up || conj2 != up {
            return Err(GroupError::NoFactorization);
        }
        Ok(n)
    }

    /// The maximal-window rank-1 identity: for `1+λ` a unit,
    /// `u_{−α,λ}·u_{α,1} = u_{α,1/(1+λ)}·h_{α∨,1/(1+λ)}·u_{−α,λ/(1+λ)}`.
    pub fn rank1_check(&self, alpha: &Root, lambda: &Elem) -> Result<bool, GroupError> {
        let one_plus = self.ring.add(&self.ring.one(), lambda);
        if !self.ring.is_unit(&one_plus) {
            return Err(GroupError::SingularLambda);
        }
        let a = self.ring.invert(&one_plus)?;
        let c = self.ring.mul(lambda, &a);
        let lhs = self.mul(
            &self.root_element(&alpha.neg(), lambda)?,
            &self.root_element(alpha, &self.ring.one())?,
        );
        let rhs = self.mul(
            &self.mul(&self.root_element(alpha, &a)?, &self.cochar(alpha, &a)?),
            &self.root_element(&alpha.neg(), &c)?,
        );
        Ok(lhs == rhs)
    }

    /// Solves `u_{−α,λ}·u_{α,1} = u_α(a)·h_{α∨,b}·u_{−α,c}` in an
    /// Iwahori-window rank-1 group (2×2 families), returning the parameters
    /// `(a, b, c)` with `c` in the parameter coordinates of `U_{−α}`.
    pub fn iwahori_abc(&self, alpha: &Root, lambda: &Elem) -> Result<(Elem, Elem, Elem), GroupError> {
        if self.n != 2 {
            return Err(GroupError::UnsupportedFamily(alloc::string::String::from(
                "iwahori_abc runs on rank-1 matrix groups",
            )));
        }
        let m = self.mul(
            &self.root_element_param(&alpha.neg(), lambda)?,
            &self.root_element_param(alpha, &self.ring.one())?,
        );
        // m = [[b + a b⁻¹ c', a b⁻¹], [b⁻¹ c', b⁻¹]] with c' the entry
        // value of u_{−α}(c).
        let m22 = m.entry(1, 1);
        if !self.ring.is_unit(m22) {
            return Err(GroupError::NoFactorization);
        }
        let b = self.ring.invert(m22)?;
        let a = self.ring.mul(m.entry(0, 1), &b);
        let c_entry = self.ring.mul(m.entry(1, 0), &b);
        let c = self
            .ring
            .div_uniformizer_pow(&c_entry, self.lo_of(&alpha.neg()))
            .ok_or(GroupError::NoFactorization)?;
        // Confirm the factorization exactly.
        let rhs = self.mul(
            &self.mul(&self.root_element_param(alpha, &a)?, &self.cochar(alpha, &b)?),
            &self.root_element_param(&alpha.neg(), &c)?,
        );
        if rhs != m {
            return Err(GroupError::NoFactorization);
        }
        Ok((a, b, c))
    }

    /// Checks the §4.2 closed forms `a(λ) = b(λ) = 1/(1+ϖλ)` and
    /// `c(λ) = λ/(1+ϖλ)` against a solved factorization.
    pub fn iwahori_closed_forms_hold(
        &self,
        alpha: &Root,
        lambda: &Elem,
    ) -> Result<bool, GroupError> {
        let (a, b, c) = self.iwahori_abc(alpha, lambda)?;
        let shift = self.lo_of(&alpha.neg());
        let w_lambda = self.ring.mul_uniformizer_pow(lambda, shift);
        let denom = self.ring.add(&self.ring.one(), &w_lambda);
        let expect_ab = self.ring.invert(&denom)?;
        // c lives in the U_{−α} parameter quotient: compare at its
        // precision h − lo(α) − lo(−α).
        let prec = self.depth() - self.lo_of(alpha) - shift;
        let expect_c = self
            .ring
            .truncate_val(&self.ring.mul(lambda, &expect_ab), prec);
        Ok(a == expect_ab && b == expect_ab && self.ring.truncate_val(&c, prec) == expect_c)
    }
}
