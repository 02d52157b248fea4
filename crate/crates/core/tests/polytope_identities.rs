//! Exact identities between the derived and the stated DoF regions.

use threewc::polytope::{
    feasible_point, fourier_motzkin_eliminate, polytope_equal, projected_region, rat,
    raw_constraint_system, simplex_max, sum_dof_formula, theorem1_region, vertices,
    HalfspaceSystem, Inequality, Rational, DOF_VARS,
};
use threewc::NodeConfig;

fn cfg(a: usize, b: usize, c: usize) -> NodeConfig {
    NodeConfig::new(a, b, c).unwrap()
}

fn allocation_vars(sys: &HalfspaceSystem) -> Vec<String> {
    sys.vars()
        .iter()
        .filter(|v| !DOF_VARS.contains(&v.as_str()))
        .cloned()
        .collect()
}

fn projected(c: NodeConfig, tau: &Rational) -> HalfspaceSystem {
    let raw = raw_constraint_system(c, tau).unwrap();
    let drop = allocation_vars(&raw);
    let drop: Vec<&str> = drop.iter().map(String::as_str).collect();
    fourier_motzkin_eliminate(&raw, &drop).unwrap()
}

#[test]
fn projection_matches_stated_region_321_half() {
    let c = cfg(3, 2, 1);
    let tau = rat(1, 2);
    let p = projected(c, &tau);
    let t1 = theorem1_region(c, &tau).unwrap();
    assert!(polytope_equal(&p, &t1).unwrap(), "projection:\n{p}");
}

#[test]
fn projection_matches_stated_region_432_third() {
    let c = cfg(4, 3, 2);
    let tau = rat(1, 3);
    let p = projected(c, &tau);
    let t1 = theorem1_region(c, &tau).unwrap();
    assert!(polytope_equal(&p, &t1).unwrap(), "projection:\n{p}");
}

#[test]
fn projection_vertices_agree_with_stated_vertices() {
    let c = cfg(3, 2, 1);
    let tau = rat(1, 2);
    let mut a = vertices(&projected(c, &tau)).unwrap();
    let mut b = vertices(&theorem1_region(c, &tau).unwrap()).unwrap();
    a.sort();
    b.sort();
    assert_eq!(a, b);
}

/// Every point feasible for the raw system projects into the output, and
/// random output points lift back to raw-feasible allocations.
#[test]
fn projection_sound_and_complete_on_samples() {
    let c = cfg(3, 2, 2);
    let tau = rat(2, 3);
    let raw = raw_constraint_system(c, &tau).unwrap();
    let proj = projected(c, &tau);
    let dof_cols: Vec<usize> = DOF_VARS.iter().map(|v| raw.var_index(v).unwrap()).collect();

    // soundness: vertices of raw maximizing assorted objectives
    for seed in 0..12i64 {
        let obj: Vec<Rational> = (0..raw.dim() as i64)
            .map(|j| rat(((seed * 7 + j * 13) % 5) - 1, 1))
            .collect();
        if let Ok(sol) = simplex_max(&raw, &obj) {
            let d: Vec<Rational> = dof_cols.iter().map(|&i| sol.argmax[i].clone()).collect();
            assert!(proj.satisfied_by(&d));
        }
    }

    // completeness: every vertex of the projection lifts
    for v in vertices(&proj).unwrap() {
        let mut lifted = raw.clone();
        for (col, val) in dof_cols.iter().zip(&v) {
            let mut e = vec![Rational::from_integer(0.into()); raw.dim()];
            e[*col] = rat(1, 1);
            lifted
                .push(Inequality::new(e.clone(), val.clone()))
                .unwrap();
            let neg: Vec<Rational> = e.iter().map(|x| -x).collect();
            lifted.push(Inequality::new(neg, -val.clone())).unwrap();
        }
        assert!(
            feasible_point(&lifted).unwrap().is_some(),
            "vertex {v:?} does not lift"
        );
    }
}

#[test]
fn sum_dof_small_grid() {
    for c in NodeConfig::all_up_to(3) {
        for tau in [rat(1, 3), rat(1, 1)] {
            let sys = theorem1_region(c, &tau).unwrap();
            let sol = simplex_max(&sys, &vec![rat(1, 1); 6]).unwrap();
            assert_eq!(sol.optimum, sum_dof_formula(c, &tau), "{c:?} tau={tau}");
            assert!(sys.satisfied_by(&sol.argmax));
        }
    }
}

/// At `tau = 0` the stated region is unbounded in `d23, d32`; the projected
/// raw system is the canonical region and still meets the closed form.
#[test]
fn sum_dof_at_tau_zero_uses_projection() {
    let tau = rat(0, 1);
    for c in NodeConfig::all_up_to(4) {
        let sol = simplex_max(&projected_region(c, &tau).unwrap(), &vec![rat(1, 1); 6]).unwrap();
        assert_eq!(sol.optimum, sum_dof_formula(c, &tau), "{c:?}");
        assert_eq!(
            simplex_max(&theorem1_region(c, &tau).unwrap(), &vec![rat(1, 1); 6]).unwrap_err(),
            threewc::Error::Unbounded
        );
    }
}
