// SPDX-License-Identifier: Apache-2.0
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_rational::Ratio;
use num_traits::Zero;

/// Operation counts under the "basic operations" model: an `(a×b)(b×c)`
/// product costs `2abc`, a division `(a×a)\(a×c)` costs `8a²c/3`.
///
/// Headline counts are exact rationals grouped by named step. Elementwise
/// `O(ab)` work is tallied separately in [`FlopLedger::elementwise`], and
/// work that the model does not cover (representative re-selection) goes to
/// [`FlopLedger::auxiliary`]; neither enters [`FlopLedger::total`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FlopLedger {
    steps: Vec<(String, Ratio<i128>)>,
    elementwise: u128,
    auxiliary: Ratio<i128>,
}

impl FlopLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `amount` to `step`, creating the line on first use. Lines keep
    /// their first-use order.
    pub fn charge(&mut self, step: &str, amount: Ratio<i128>) {
        match self.steps.iter_mut().find(|(s, _)| s == step) {
            Some((_, v)) => *v += amount,
            None => self.steps.push((step.to_string(), amount)),
        }
    }

    /// Records a named line with zero cost (keeps report layout stable).
    pub fn touch(&mut self, step: &str) {
        self.charge(step, Ratio::zero());
    }

    pub fn charge_product(&mut self, step: &str, a: usize, b: usize, c: usize) {
        self.charge(step, Ratio::from_integer(2 * (a * b * c) as i128));
    }

    pub fn charge_division(&mut self, step: &str, a: usize, c: usize) {
        self.charge(step, Ratio::new(8 * (a * a * c) as i128, 3));
    }

    pub fn charge_elementwise(&mut self, count: usize) {
        self.elementwise += count as u128;
    }

    pub fn charge_auxiliary(&mut self, amount: usize) {
        self.auxiliary += Ratio::from_integer(amount as i128);
    }

    pub fn total(&self) -> Ratio<i128> {
        self.steps.iter().fold(Ratio::zero(), |acc, (_, v)| acc + v)
    }

    pub fn step(&self, name: &str) -> Option<Ratio<i128>> {
        self.steps.iter().find(|(s, _)| s == name).map(|(_, v)| *v)
    }

    pub fn steps(&self) -> &[(String, Ratio<i128>)] {
        &self.steps
    }

    pub fn elementwise(&self) -> u128 {
        self.elementwise
    }

    pub fn auxiliary(&self) -> Ratio<i128> {
        self.auxiliary
    }

    /// Folds another ledger into this one, line by line.
    pub fn merge(&mut self, other: &FlopLedger) {
        for (s, v) in &other.steps {
            self.charge(s, *v);
        }
        self.elementwise += other.elementwise;
        self.auxiliary += other.auxiliary;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cost_model() {
        let mut l = FlopLedger::new();
        l.charge_product("mul", 2, 3, 4);
        l.charge_division("div", 3, 2);
        l.charge_product("mul", 1, 1, 1);
        l.charge_elementwise(100);
        assert_eq!(l.step("mul"), Some(Ratio::from_integer(50)));
        assert_eq!(l.step("div"), Some(Ratio::from_integer(48)));
        assert_eq!(l.total(), Ratio::from_integer(98));
        assert_eq!(l.steps()[0].0, "mul");
    }

    #[test]
    fn thirds_stay_exact() {
        let mut l = FlopLedger::new();
        l.charge_division("d", 1, 1);
        l.charge_division("d", 1, 1);
        l.charge_division("d", 1, 1);
        assert_eq!(l.total(), Ratio::from_integer(8));
    }
}
