//! The simplex and branch-and-bound engine against naive references.

mod common;

use common::textbook::{enumerate_binary, random_binary_program, random_lp, textbook_simplex, Outcome};
use divcode::lp::{solve_lp, solve_mip, MipOptions, Status};
use divcode::BigRational;
use num_traits::{FromPrimitive, ToPrimitive};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-7 * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lp_matches_the_tableau_reference(seed in any::<u64>()) {
        let lp = random_lp(&mut ChaCha8Rng::seed_from_u64(seed), 10, 10);
        let ours = solve_lp(&lp).unwrap();
        match textbook_simplex(&lp) {
            Outcome::Optimal(v) => {
                prop_assert_eq!(ours.status, Status::Optimal);
                prop_assert!(close(ours.objective, v), "{} vs {}", ours.objective, v);
                prop_assert!(lp.max_violation(&ours.values) <= 1e-7);
            }
            Outcome::Unbounded => prop_assert_eq!(ours.status, Status::Unbounded),
            Outcome::Infeasible => prop_assert_eq!(ours.status, Status::Infeasible),
        }
    }

    #[test]
    fn exact_lp_agrees_with_floating_point(seed in any::<u64>()) {
        let lp = random_lp(&mut ChaCha8Rng::seed_from_u64(seed), 6, 6);
        let exact = lp.map_scalar(|v| BigRational::from_f64(*v).unwrap());
        let a = solve_lp(&lp).unwrap();
        let b = solve_lp(&exact).unwrap();
        prop_assert_eq!(a.status, b.status);
        if b.status == Status::Optimal {
            prop_assert!(close(a.objective, b.objective.to_f64().unwrap()));
            prop_assert!(exact.max_violation(&b.values) == BigRational::from_integer(0.into()));
        }
    }

    #[test]
    fn binary_programs_match_enumeration(seed in any::<u64>(), n in 1usize..=16) {
        let lp = random_binary_program(&mut ChaCha8Rng::seed_from_u64(seed), n);
        let ours = solve_mip(&lp, &MipOptions::default());
        match enumerate_binary(&lp) {
            Some(v) => {
                prop_assert_eq!(ours.status, Status::Optimal);
                prop_assert_eq!(ours.objective, v);
            }
            None => prop_assert_eq!(ours.status, Status::Infeasible),
        }
    }

    #[test]
    fn exact_binary_programs_match_enumeration(seed in any::<u64>(), n in 1usize..=10) {
        let lp = random_binary_program(&mut ChaCha8Rng::seed_from_u64(seed), n);
        let exact = lp.map_scalar(|v| BigRational::from_f64(*v).unwrap());
        let ours = solve_mip(&exact, &MipOptions::default());
        match enumerate_binary(&lp) {
            Some(v) => prop_assert_eq!(ours.objective.to_f64().unwrap(), v),
            None => prop_assert_eq!(ours.status, Status::Infeasible),
        }
    }
}

#[test]
fn lp_duals_price_the_optimum() {
    // Strong duality on the random programs that have an optimum.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    for _ in 0..100 {
        let lp = random_lp(&mut rng, 8, 8);
        let sol = solve_lp(&lp).unwrap();
        if sol.status != Status::Optimal {
            continue;
        }
        let dual_obj: f64 = lp.constraints.iter().zip(&sol.duals).map(|(r, y)| r.rhs * y).sum();
        assert!(close(dual_obj, sol.objective), "{dual_obj} vs {}", sol.objective);
        checked += 1;
    }
    assert!(checked > 20);
}
