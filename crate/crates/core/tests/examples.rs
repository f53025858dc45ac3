//! Worked examples reproduced exactly in rational arithmetic.

use imprecise_markov::credal::{
    check_invariant_hull, convex_hull_membership, forward_joint_set_vertices, is_symmetric_set, left_marginals,
    minimal_interval_hull, minimal_reversible_extension, reverse_gamble,
};
use imprecise_markov::joint::{
    forward_pair_from, is_marginally_compatible, is_symmetric, law_from_joint_sequence, reverse_joint_sequence,
};
use imprecise_markov::lp::{
    lower_expectation_nstep, lower_expectation_two_step, solve, upper_expectation_two_step, DEFAULT_BUDGET,
};
use imprecise_markov::walk::{walk_joint, walk_lower_expectation, walk_stationary, walk_transition};
use imprecise_markov::*;

type Q = Rational;

fn q(n: i64, d: i64) -> Q {
    Q::ratio(n, d)
}

fn exact() -> Tolerance<Q> {
    Tolerance::zero()
}

fn p1() -> StochasticMatrix<Q> {
    StochasticMatrix::from_ratios(&[&[(1, 5), (4, 5)], &[(7, 10), (3, 10)]]).unwrap()
}

fn p2() -> StochasticMatrix<Q> {
    StochasticMatrix::from_ratios(&[&[(3, 5), (2, 5)], &[(1, 2), (1, 2)]]).unwrap()
}

fn pv(entries: &[(i64, i64)]) -> ProbVector<Q> {
    ProbVector::from_ratios(entries).unwrap()
}

fn indicator(n: usize, pred: impl Fn(usize, usize) -> bool) -> Matrix<Q> {
    let mut f = Matrix::zeros(n, n);
    for x in 0..n {
        for y in 0..n {
            if pred(x, y) {
                f[(x, y)] = q(1, 1);
            }
        }
    }
    f
}

mod two_matrix_chain {
    use super::*;

    #[test]
    fn stationary_distributions() {
        assert_eq!(
            stationary_distribution(&p1(), &exact()).unwrap(),
            pv(&[(7, 15), (8, 15)])
        );
        assert_eq!(stationary_distribution(&p2(), &exact()).unwrap(), pv(&[(5, 9), (4, 9)]));
        let flat = StochasticMatrix::<Q>::from_ratios(&[&[(1, 2), (1, 2)], &[(1, 2), (1, 2)]]).unwrap();
        assert_eq!(
            stationary_distribution(&flat, &exact()).unwrap(),
            ProbVector::uniform(2)
        );
    }

    #[test]
    fn marginal_and_reverse() {
        let pi2 = pv(&[(5, 9), (4, 9)]);
        let law = TransitionLaw::new(pi2.clone(), vec![p1()]).unwrap();
        let u = marginal_at(&law, 2).unwrap();
        assert_eq!(u, pv(&[(19, 45), (26, 45)]));
        assert_eq!(marginal_at(&law, 1).unwrap(), pi2);

        let rev_u = q_reverse(&p1(), &u, &exact()).unwrap();
        let expected = StochasticMatrix::from_ratios(&[&[(19, 110), (91, 110)], &[(76, 115), (39, 115)]]).unwrap();
        assert_eq!(rev_u, expected);

        let w = u.propagate(&p1()).unwrap();
        assert_eq!(w, pv(&[(22, 45), (23, 45)]));
        assert_eq!(w.propagate(&rev_u).unwrap(), u);

        let from_u = TransitionLaw::new(u.clone(), vec![p1()]).unwrap();
        let back = reverse_law(&from_u, &exact()).unwrap();
        assert_eq!(back.initial(), &w);
        assert_eq!(back.steps(), std::slice::from_ref(&rev_u));
        assert_eq!(reverse_law(&back, &exact()).unwrap(), from_u);
    }

    #[test]
    fn reversed_matrix_breaks_invariance() {
        let u = pv(&[(19, 45), (26, 45)]);
        let v = pv(&[(5, 9), (4, 9)]);
        let hull = VertexCredalSet::new(vec![u.clone(), v.clone()]).unwrap();
        let forward = MatrixSet::new(vec![p1(), p2()], true).unwrap();
        assert!(check_invariant_hull(&hull, &forward, &exact()).unwrap().is_none());

        let rev_u = q_reverse(&p1(), &u, &exact()).unwrap();
        let image = v.propagate(&rev_u).unwrap();
        assert!(image[0] < q(19, 45));
        assert!(!convex_hull_membership(&image, hull.vertices(), &exact()).unwrap());

        let extended = MatrixSet::new(vec![p1(), p2(), rev_u], true).unwrap();
        let witness = check_invariant_hull(&hull, &extended, &exact()).unwrap().unwrap();
        assert_eq!((witness.vertex, witness.matrix), (1, 2));
        assert_eq!(witness.image, image);
    }

    #[test]
    fn forward_vertices() {
        let hull = VertexCredalSet::new(vec![pv(&[(19, 45), (26, 45)]), pv(&[(5, 9), (4, 9)])]).unwrap();
        let mats = MatrixSet::new(vec![p1(), p2()], false).unwrap();
        assert_eq!(forward_joint_set_vertices(&hull, &mats).unwrap().len(), 4);

        let pi1 = VertexCredalSet::new(vec![pv(&[(7, 15), (8, 15)])]).unwrap();
        let single = MatrixSet::new(vec![p1()], false).unwrap();
        let out = forward_joint_set_vertices(&pi1, &single).unwrap();
        assert_eq!(
            out,
            vec![JointMatrix::from_ratios(&[&[(7, 75), (28, 75)], &[(28, 75), (12, 75)]]).unwrap()]
        );

        let qv = pv(&[(1, 3), (2, 3)]);
        let ident = MatrixSet::new(vec![StochasticMatrix::identity(2)], false).unwrap();
        let out = forward_joint_set_vertices(&VertexCredalSet::new(vec![qv.clone()]).unwrap(), &ident).unwrap();
        assert_eq!(out[0].matrix(), &Matrix::diag(qv.entries()));
    }

    #[test]
    fn detailed_balance_cases() {
        assert!(detailed_balance_holds(&p1(), &pv(&[(7, 15), (8, 15)]), &exact()));
        let cycle = StochasticMatrix::<Q>::from_ratios(&[
            &[(0, 1), (1, 1), (0, 1)],
            &[(0, 1), (0, 1), (1, 1)],
            &[(1, 1), (0, 1), (0, 1)],
        ])
        .unwrap();
        assert!(!detailed_balance_holds(&cycle, &ProbVector::uniform(3), &exact()));
    }

    #[test]
    fn path_probabilities() {
        let law = TransitionLaw::new(pv(&[(7, 15), (8, 15)]), vec![p1()]).unwrap();
        assert_eq!(
            path_probability(&law, &Path::new(vec![0, 1], 2).unwrap()).unwrap(),
            q(28, 75)
        );
        let det = TransitionLaw::new(ProbVector::<Q>::point(2, 0), vec![StochasticMatrix::identity(2)]).unwrap();
        assert_eq!(
            path_probability(&det, &Path::new(vec![0, 0], 2).unwrap()).unwrap(),
            q(1, 1)
        );
        assert_eq!(
            path_probability(&det, &Path::new(vec![0, 1], 2).unwrap()).unwrap(),
            q(0, 1)
        );
    }
}

mod forward_pair {
    use super::*;

    fn q1() -> JointMatrix<Q> {
        JointMatrix::from_ratios(&[&[(1, 10), (2, 10)], &[(3, 10), (4, 10)]]).unwrap()
    }

    fn q2() -> JointMatrix<Q> {
        JointMatrix::from_ratios(&[&[(2, 10), (2, 10)], &[(3, 10), (3, 10)]]).unwrap()
    }

    #[test]
    fn transitions_from_joints() {
        let (l1, t1) = forward_pair_from(&q1());
        assert_eq!(l1, pv(&[(3, 10), (7, 10)]));
        assert_eq!(
            t1,
            StochasticMatrix::from_ratios(&[&[(1, 3), (2, 3)], &[(3, 7), (4, 7)]]).unwrap()
        );
        let (_, t2) = forward_pair_from(&q2());
        assert_eq!(
            t2,
            StochasticMatrix::from_ratios(&[&[(1, 2), (1, 2)], &[(1, 2), (1, 2)]]).unwrap()
        );
    }

    #[test]
    fn mixed_marginal_leaves_hull() {
        let (_, t1) = forward_pair_from(&q1());
        let image = pv(&[(2, 5), (3, 5)]).propagate(&t1).unwrap();
        assert_eq!(image, pv(&[(41, 105), (64, 105)]));
        let verts = [pv(&[(2, 5), (3, 5)]), pv(&[(1, 2), (1, 2)])];
        assert!(!convex_hull_membership(&image, &verts, &exact()).unwrap());
        assert!(convex_hull_membership(&verts[0], &verts, &exact()).unwrap());
    }

    #[test]
    fn compatibility_and_symmetry() {
        assert!(is_marginally_compatible(&q1(), &q2(), &exact()));
        assert!(!is_marginally_compatible(&q2(), &q1(), &exact()));
        assert!(!is_symmetric(&q1(), &exact()));
        let ext = minimal_reversible_extension(&[q1()], &exact());
        assert_eq!(ext, vec![q1(), q1().transpose()]);
    }

    #[test]
    fn sequence_to_law_and_back() {
        let seq = JointSequence::new(vec![q1(), q2()], &exact()).unwrap();
        let law = law_from_joint_sequence(&seq);
        assert_eq!(law.initial(), &pv(&[(3, 10), (7, 10)]));
        assert_eq!(marginal_at(&law, 2).unwrap(), pv(&[(2, 5), (3, 5)]));
        let rev = reverse_joint_sequence(&seq);
        assert_eq!(rev.mats(), &[q2().transpose(), q1().transpose()]);
        for path in Path::enumerate(2, 3) {
            assert_eq!(
                rev.path_probability(&path.reversed()).unwrap(),
                seq.path_probability(&path).unwrap()
            );
            assert_eq!(
                seq.path_probability(&path).unwrap(),
                path_probability(&law, &path).unwrap()
            );
        }
    }
}

mod stationary_box {
    use super::*;

    fn q1() -> JointMatrix<Q> {
        joint_from(&pv(&[(7, 15), (8, 15)]), &p1()).unwrap()
    }

    fn q2() -> JointMatrix<Q> {
        joint_from(&pv(&[(5, 9), (4, 9)]), &p2()).unwrap()
    }

    fn set() -> IntervalJointSet<Q> {
        minimal_interval_hull(&[q1(), q2()]).unwrap()
    }

    #[test]
    fn joint_matrices_and_hull() {
        assert_eq!(
            q1(),
            JointMatrix::from_ratios(&[&[(7, 75), (28, 75)], &[(28, 75), (12, 75)]]).unwrap()
        );
        assert_eq!(
            q2(),
            JointMatrix::from_ratios(&[&[(1, 3), (2, 9)], &[(2, 9), (2, 9)]]).unwrap()
        );
        let s = set();
        let lo: Vec<f64> = s.lower().as_slice().iter().map(Scalar::to_f64).collect();
        let hi: Vec<f64> = s.upper().as_slice().iter().map(Scalar::to_f64).collect();
        for (got, want) in lo.iter().zip([0.0933, 0.2222, 0.2222, 0.16]) {
            assert!((got - want).abs() < 5e-5);
        }
        for (got, want) in hi.iter().zip([0.3333, 0.3733, 0.3733, 0.2222]) {
            assert!((got - want).abs() < 5e-5);
        }
        assert!(is_symmetric_set(&s, &exact()));
        assert!(s.contains(q1().matrix(), &exact()) && s.contains(q2().matrix(), &exact()));
        assert_eq!(minimal_reversible_extension(&[q1(), q2()], &exact()), vec![q1(), q2()]);
    }

    #[test]
    fn marginal_intervals_inside_outer_bound() {
        let left = left_marginals(&set(), &exact()).unwrap();
        assert!(left[0].0 >= q(3155, 10000) && left[0].1 <= q(7066, 10000));
        let degenerate = left_marginals(&IntervalJointSet::degenerate(&q1()), &exact()).unwrap();
        assert_eq!(degenerate, vec![(q(7, 15), q(7, 15)), (q(8, 15), q(8, 15))]);
    }

    #[test]
    fn expectations() {
        let degenerate = IntervalJointSet::degenerate(&q1());
        let trace = indicator(2, |x, y| x == y);
        let off = indicator(2, |x, y| x != y);
        assert_eq!(
            lower_expectation_two_step(&degenerate, &trace, &exact()).unwrap(),
            q(19, 75)
        );
        assert_eq!(
            lower_expectation_two_step(&degenerate, &off, &exact()).unwrap(),
            q(56, 75)
        );

        let c = Matrix::from_vec(2, 2, vec![q(-7, 3); 4]).unwrap();
        assert_eq!(lower_expectation_two_step(&set(), &c, &exact()).unwrap(), q(-7, 3));

        let lo = lower_expectation_two_step(&set(), &off, &exact()).unwrap();
        assert!(lo >= q(2 * 2222, 10000) && lo <= q(2 * 3733, 10000));
        let neg = off.map(|v| -v.clone());
        assert_eq!(
            upper_expectation_two_step(&set(), &off, &exact()).unwrap(),
            -lower_expectation_two_step(&set(), &neg, &exact()).unwrap()
        );

        let one = PathGamble::from_fn(2, 4, |_| q(1, 1));
        assert_eq!(
            lower_expectation_nstep(&set(), &one, DEFAULT_BUDGET, &exact()).unwrap(),
            q(1, 1)
        );
    }

    #[test]
    fn trace_program_value() {
        let program = lp::build_two_step_program(
            &IntervalJointSet::degenerate(&q1()),
            &indicator(2, |x, y| x == y),
            Sense::Minimize,
        )
        .unwrap();
        let out = solve(&program, &exact()).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert_eq!(out.value, Some(q(19, 75)));
        assert_eq!(program.max_violation(out.solution.as_ref().unwrap()), q(0, 1));
    }

    #[test]
    fn gamble_reversal_is_transposition() {
        let f = PathGamble::from_pairwise(&indicator(2, |x, y| x == 0 && y == 1), 2);
        let r = reverse_gamble(&f);
        assert_eq!(r, PathGamble::from_pairwise(&indicator(2, |x, y| x == 1 && y == 0), 2));
    }
}

mod weighted_walks {
    use super::*;

    fn w(rows: &[&[(i64, i64)]]) -> WeightMatrix<Q> {
        WeightMatrix::from_ratios(rows, false).unwrap()
    }

    #[test]
    fn transitions_and_stationary() {
        let w1 = w(&[&[(1, 1), (3, 1)], &[(3, 1), (2, 1)]]);
        let w2 = w(&[&[(1, 1), (5, 1)], &[(5, 1), (2, 1)]]);
        let mid = w(&[&[(1, 1), (4, 1)], &[(4, 1), (2, 1)]]);
        assert_eq!(
            walk_transition(&w1).unwrap(),
            StochasticMatrix::from_ratios(&[&[(1, 4), (3, 4)], &[(3, 5), (2, 5)]]).unwrap()
        );
        assert_eq!(
            walk_transition(&w2).unwrap(),
            StochasticMatrix::from_ratios(&[&[(1, 6), (5, 6)], &[(5, 7), (2, 7)]]).unwrap()
        );
        assert_eq!(
            walk_transition(&mid).unwrap(),
            StochasticMatrix::from_ratios(&[&[(1, 5), (4, 5)], &[(4, 6), (2, 6)]]).unwrap()
        );
        assert_eq!(walk_stationary(&w1).unwrap(), pv(&[(4, 9), (5, 9)]));
        assert_eq!(
            walk_joint(&w1),
            JointMatrix::from_ratios(&[&[(1, 9), (3, 9)], &[(3, 9), (2, 9)]]).unwrap()
        );

        let complete = Matrix::from_vec(3, 3, vec![q(1, 1); 9]).unwrap();
        assert_eq!(
            walk_stationary(&WeightMatrix::undirected(complete).unwrap()).unwrap(),
            ProbVector::uniform(3)
        );
    }

    #[test]
    fn degenerate_walk_expectation() {
        let w1 = w(&[&[(1, 1), (3, 1)], &[(3, 1), (2, 1)]]);
        let set = IntervalWeightSet::degenerate(&w1);
        assert_eq!(
            walk_lower_expectation(&set, &indicator(2, |x, y| x != y), &exact()).unwrap(),
            q(6, 9)
        );
        let c = Matrix::from_vec(2, 2, vec![q(5, 2); 4]).unwrap();
        assert_eq!(walk_lower_expectation(&set, &c, &exact()).unwrap(), q(5, 2));
    }
}
