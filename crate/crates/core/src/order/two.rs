//! Cycling 2-machines: the polynomial test for a compatible order, and the
//! directed-path goodness check it is equivalent to.

use num_rational::Rational64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::goodness::{is_good, BadCycleWitness, Verdict};
use crate::hypergraph::path_digraph;
use crate::kernels::{component_cycle_means, strong_components, MeanCycle, WeightedDigraph};
use crate::machine::{Machine, Semantics};

/// The weighted digraph on `S` with an arc `s -> t` of weight `j - i` for
/// every transition `t ∈ f(s, (i, j))`.
pub fn weighted_state_digraph(m: &Machine) -> WeightedDigraph {
    let mut g = WeightedDigraph::new(m.num_states());
    for (s, i, j, t) in m.transitions() {
        g.add_arc(s, t, Rational64::from_integer(j as i64 - i as i64));
    }
    g
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoMachineDecision {
    pub has_order: bool,
    /// A strong component with cycles of mean `<= 0` and `>= 0`, so a closed
    /// walk of total weight zero.
    pub obstruction: Option<ZeroWalkObstruction>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroWalkObstruction {
    pub component: Vec<usize>,
    pub min_cycle: MeanCycle,
    pub max_cycle: MeanCycle,
}

pub fn decide_cycling_2machine(m: &Machine) -> Result<TwoMachineDecision> {
    if m.k() != 2 {
        return Err(Error::Precondition(format!(
            "expected a 2-machine, got k = {}",
            m.k()
        )));
    }
    m.require(Semantics::Cycling)?;
    let g = weighted_state_digraph(m);
    let comps = strong_components(&g);
    for (c, means) in component_cycle_means(&g, &comps).into_iter().enumerate() {
        let Some((lo, hi)) = means else { continue };
        if lo.mean <= Rational64::zero() && hi.mean >= Rational64::zero() {
            return Ok(TwoMachineDecision {
                has_order: false,
                obstruction: Some(ZeroWalkObstruction {
                    component: comps.members[c].clone(),
                    min_cycle: lo,
                    max_cycle: hi,
                }),
            });
        }
    }
    Ok(TwoMachineDecision {
        has_order: true,
        obstruction: None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathsVerdict {
    AllGood {
        n_max: usize,
    },
    FirstBad {
        n: usize,
        witness: Box<BadCycleWitness>,
    },
}

/// Default path length cap, `4 |S|^2`.
pub fn default_path_cap(m: &Machine) -> usize {
    4 * m.num_states() * m.num_states()
}

/// Checks `P_1, ..., P_{n_max}` in order.
pub fn check_paths_good(m: &Machine, n_max: usize) -> Result<PathsVerdict> {
    if m.k() != 2 {
        return Err(Error::Precondition(format!(
            "expected a 2-machine, got k = {}",
            m.k()
        )));
    }
    m.require(Semantics::Cycling)?;
    for n in 1..=n_max {
        if let Verdict::Bad(w) = is_good(&path_digraph(n), m)? {
            return Ok(PathsVerdict::FirstBad { n, witness: w });
        }
    }
    Ok(PathsVerdict::AllGood { n_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gen_counter_machine;

    fn one_state(transitions: &[(usize, usize)]) -> Machine {
        Machine::new(
            2,
            vec!["s".into()],
            transitions.iter().map(|&(i, j)| (0, i, j, 0)),
            [(0, 0)],
        )
        .unwrap()
    }

    #[test]
    fn counter_machines_have_orders() {
        for n in 0..=5 {
            assert!(
                decide_cycling_2machine(&gen_counter_machine(n))
                    .unwrap()
                    .has_order,
                "n = {n}"
            );
        }
    }

    #[test]
    fn opposite_self_loops_have_no_order() {
        let m = one_state(&[(1, 2), (2, 1)]);
        let d = decide_cycling_2machine(&m).unwrap();
        assert!(!d.has_order);
        assert_eq!(d.obstruction.unwrap().component, vec![0]);
        match check_paths_good(&m, 3).unwrap() {
            PathsVerdict::FirstBad { n, .. } => assert_eq!(n, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_weight_loop_has_no_order() {
        let m = one_state(&[(1, 1)]);
        assert!(!decide_cycling_2machine(&m).unwrap().has_order);
    }

    #[test]
    fn transition_free_machine_is_all_good() {
        let m = one_state(&[]);
        assert!(decide_cycling_2machine(&m).unwrap().has_order);
        assert_eq!(
            check_paths_good(&m, 6).unwrap(),
            PathsVerdict::AllGood { n_max: 6 }
        );
    }

    #[test]
    fn counter_machine_paths_are_good() {
        let m = gen_counter_machine(2);
        assert_eq!(
            check_paths_good(&m, 10).unwrap(),
            PathsVerdict::AllGood { n_max: 10 }
        );
    }

    #[test]
    fn wrong_uniformity_is_rejected() {
        let m = Machine::new(3, vec!["s".into()], [], [(0, 0)]).unwrap();
        assert!(decide_cycling_2machine(&m).is_err());
    }
}
