mod common;

use common::*;
use maxwell_mixed::mesh::Point;
use maxwell_mixed::ElementFamily;
use proptest::prelude::*;

#[test]
fn kronecker_property_on_small_meshes() {
    for family in ElementFamily::ALL {
        for n in [1, 2, 3] {
            let (stress, _) = spaces(n, family);
            let defect = unisolvence_defect(&stress);
            assert!(defect <= 1e-12, "{family} N={n}: {defect:e}");
        }
    }
}

#[test]
fn normal_traction_is_single_valued() {
    for family in ElementFamily::ALL {
        for n in [2, 3] {
            let (stress, _) = spaces(n, family);
            let jump = max_normal_jump(&stress);
            assert!(jump <= 1e-12, "{family} N={n}: {jump:e}");
        }
    }
}

#[test]
fn constants_are_reproduced() {
    for family in ElementFamily::ALL {
        for n in [2, 3] {
            let (stress, velocity) = spaces(n, family);
            assert!(constant_reproduction_defect(&stress, &velocity) <= 1e-13);
        }
    }
}

#[test]
fn hmz_tangential_stress_may_jump() {
    // sigma_11 is only continuous across vertical edges: a horizontal-edge
    // trace of the bubble generally differs between the two neighbours.
    let (stress, _) = spaces(2, ElementFamily::Hmz);
    let alpha = stress.interpolate(|p: Point| maxwell_mixed::VoigtTensor::new(p[1] * p[1] * 10.0, 0.0, 0.0));
    let below = stress.evaluate(&alpha, 0, [0.25, 0.5]);
    let above = stress.evaluate(&alpha, 2, [0.25, 0.5]);
    assert!((below.t11 - above.t11).abs() > 1e-3);
}

#[test]
fn space_dimensions_follow_counting_formulas() {
    for n in 1..6 {
        let (s, v) = spaces(n, ElementFamily::NedelecQ1);
        assert_eq!(s.dim(), 3 * (n + 1) * (n + 1));
        assert_eq!(v.dim(), 2 * n * n);
        let (s, v) = spaces(n, ElementFamily::Hmz);
        assert_eq!(s.dim(), 2 * (n * n + n * (n + 1)) + (n + 1) * (n + 1));
        assert_eq!(v.dim(), 4 * n * n);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn divergence_matches_finite_differences(
        fam in 0usize..2, ldof in 0usize..12, elem in 0usize..9, rx in 0.05f64..0.95, ry in 0.05f64..0.95,
    ) {
        let family = ElementFamily::ALL[fam];
        let (stress, _) = spaces(3, family);
        let ldof = ldof % stress.local_dim();
        let (i, j) = stress.mesh().element_ij(elem);
        let h = stress.mesh().h();
        let p = [(i as f64 + rx) * h, (j as f64 + ry) * h];
        let d = 1e-6;
        let at = |q: Point| stress.eval_basis(elem, ldof, q).unwrap();
        let dx = |f: fn(&maxwell_mixed::VoigtTensor) -> f64| (f(&at([p[0] + d, p[1]])) - f(&at([p[0] - d, p[1]]))) / (2.0 * d);
        let dy = |f: fn(&maxwell_mixed::VoigtTensor) -> f64| (f(&at([p[0], p[1] + d])) - f(&at([p[0], p[1] - d]))) / (2.0 * d);
        let fd = [dx(|t| t.t11) + dy(|t| t.t12), dx(|t| t.t12) + dy(|t| t.t22)];
        let div = stress.eval_div(elem, ldof, p).unwrap();
        prop_assert!((div[0] - fd[0]).abs() < 1e-6 && (div[1] - fd[1]).abs() < 1e-6, "{div:?} vs {fd:?}");
    }
}
