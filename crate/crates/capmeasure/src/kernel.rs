//! Rank-compressed evaluation tables for the hot exhaustive sweeps.
//!
//! Adherences and compactness measures are built from meets, joins and
//! comparisons of the finitely many point-filter costs of a structure, so
//! all intermediate values live in the fixed set of matrix entries plus
//! {0, inf}. Mapping those to small integer ranks once per structure turns
//! the inner loops into branchless u16 min/max.

use crate::extreal::ExtReal;
use crate::space::LambdaSource;

pub(crate) struct EvalKernel {
    pub n: usize,
    dict: Vec<ExtReal>,     // sorted, deduplicated; rank = index
    pub zero: u16,          // rank of 0
    pub inf: u16,           // rank of inf (last)
    lambda: Vec<u16>,       // lambda[core * n + x], core 0 included
    adh: Vec<u16>,          // adh[core * n + x], core 0 row = inf
}

impl EvalKernel {
    pub fn new<L: LambdaSource + ?Sized>(src: &L) -> EvalKernel {
        let n = src.carrier().len();
        let cores = 1usize << n;

        let mut vals: Vec<ExtReal> = vec![ExtReal::ZERO, ExtReal::INFINITY];
        for core in 0..cores as u64 {
            for x in 0..n {
                vals.push(src.lambda_mask(core, x));
            }
        }
        vals.sort_unstable();
        vals.dedup();
        let rank = |v: ExtReal| -> u16 { vals.binary_search(&v).unwrap() as u16 };

        let zero = rank(ExtReal::ZERO);
        let inf = rank(ExtReal::INFINITY);

        let mut lambda = vec![zero; cores * n];
        for core in 0..cores as u64 {
            for x in 0..n {
                lambda[core as usize * n + x] = rank(src.lambda_mask(core, x));
            }
        }

        // adherence from point rows by subset DP over the lowest bit
        let mut adh = vec![inf; cores * n];
        for core in 1..cores as u64 {
            let low = core.trailing_zeros() as usize;
            let rest = core & (core - 1);
            for x in 0..n {
                let point = lambda[(1usize << low) * n + x];
                adh[core as usize * n + x] = point.min(adh[rest as usize * n + x]);
            }
        }

        EvalKernel {
            n,
            dict: vals,
            zero,
            inf,
            lambda,
            adh,
        }
    }

    pub fn value(&self, rank: u16) -> ExtReal {
        self.dict[rank as usize]
    }

    pub fn lambda_rank(&self, core: u64, x: usize) -> u16 {
        self.lambda[core as usize * self.n + x]
    }

    pub fn adh_rank(&self, core: u64, x: usize) -> u16 {
        self.adh[core as usize * self.n + x]
    }

    /// Meet of the adherence of `core` over the points of `set`; empty set
    /// gives inf.
    pub fn adh_meet(&self, core: u64, set: u64) -> u16 {
        let mut acc = self.inf;
        let mut m = set;
        while m != 0 {
            let x = m.trailing_zeros() as usize;
            acc = acc.min(self.adh_rank(core, x));
            m &= m - 1;
        }
        acc
    }

    /// The measure of compactness of the filter `f` at the set `a` with
    /// respect to the class members `class` (core masks): the join over
    /// meshing members of the meet over `a` of their adherence.
    pub fn measure_at_set(&self, class: &[u64], a: u64, f: u64) -> u16 {
        let mut acc = self.zero;
        for &d in class {
            if d != 0 && d & f != 0 {
                acc = acc.max(self.adh_meet(d, a));
            }
        }
        acc
    }

    /// Same as [`measure_at_set`], also returning the first class member
    /// (in the given order) attaining the measure.
    pub fn measure_at_set_witness(&self, class: &[u64], a: u64, f: u64) -> (u16, Option<u64>) {
        let mut acc = self.zero;
        let mut witness = None;
        for &d in class {
            if d != 0 && d & f != 0 {
                let v = self.adh_meet(d, a);
                if witness.is_none() || v > acc {
                    acc = v;
                    witness = Some(d);
                }
            }
        }
        (acc, witness)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::{Carrier, FilterClass};
    use crate::space::CapStructure;

    fn ext(s: &str) -> ExtReal {
        s.parse().unwrap()
    }

    #[test]
    fn kernel_matches_direct_evaluation() {
        let c = Carrier::new(["a", "b"]).unwrap();
        let s = CapStructure::from_matrix(
            &c,
            &[vec![ext("0"), ext("2")], vec![ext("3"), ext("0")]],
        )
        .unwrap();
        let k = EvalKernel::new(&s);

        for core in 0..4u64 {
            for x in 0..2 {
                assert_eq!(k.value(k.lambda_rank(core, x)), s.lambda_mask(core, x));
            }
        }
        // adherence of {a,b}^ is the rowwise meet
        assert_eq!(k.value(k.adh_rank(0b11, 0)), ext("0"));
        assert_eq!(k.value(k.adh_rank(0b11, 1)), ext("0"));
        assert_eq!(k.value(k.adh_rank(0b01, 1)), ext("2"));
        assert_eq!(k.value(k.adh_rank(0, 0)), ExtReal::INFINITY);

        // measure c^{b}({a}^) with all filters = 2, witness {a}^
        let class = FilterClass::all().member_cores(&c);
        let (v, w) = k.measure_at_set_witness(&class, 0b10, 0b01);
        assert_eq!(k.value(v), ext("2"));
        assert_eq!(w, Some(0b01));
    }
}
