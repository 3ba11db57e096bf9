use transport_fem::assembly::{
    assemble_advection, assemble_boundary_penalty, assemble_cip, assemble_dg_jump, assemble_gls,
    BoundarySide, GlsVariant,
};
use transport_fem::cases::{Coefficients, ProblemCase, Velocity};
use transport_fem::formulations::{Formulation, Method, Operators, StabilizationConfig};
use transport_fem::linalg::CsrMatrix;
use transport_fem::mesh::{Lcg, Mesh, Perturbation};
use transport_fem::space::{Continuity, FiniteElementSpace};

fn random_vector(rng: &mut Lcg, n: usize) -> Vec<f64> {
    (0..n).map(|_| 2.0 * rng.next_f64() - 1.0).collect()
}

fn space(c: Continuity, k: usize) -> FiniteElementSpace {
    let mesh = Mesh::build_structured(
        6,
        Some(Perturbation {
            amplitude: 0.15,
            seed: 5,
        }),
    )
    .unwrap();
    FiniteElementSpace::on_mesh(mesh, c, k).unwrap()
}

fn assert_sym_psd(name: &str, s: &CsrMatrix, rng: &mut Lcg) {
    let scale = s.max_abs().max(1.0);
    assert!(s.max_asymmetry() <= 1e-13 * scale, "{name}: asymmetric");
    for _ in 0..50 {
        let x = random_vector(rng, s.ncols());
        assert!(s.quadratic_form(&x) >= -1e-12 * scale, "{name}: indefinite");
    }
}

#[test]
fn all_stabilization_operators_symmetric_psd() {
    let mut rng = Lcg::new(99);
    let coeffs = ProblemCase::smooth(Velocity::Quartic).coefficients();
    for k in [1, 2] {
        let cont = space(Continuity::Continuous, k);
        let disc = space(Continuity::Discontinuous, k);
        assert_sym_psd(
            "gls",
            &assemble_gls(&cont, &coeffs, 0.1, GlsVariant::Primal).unwrap(),
            &mut rng,
        );
        assert_sym_psd(
            "gls*",
            &assemble_gls(&cont, &coeffs, 0.1, GlsVariant::Adjoint).unwrap(),
            &mut rng,
        );
        assert_sym_psd(
            "cip",
            &assemble_cip(&cont, &coeffs, 0.01).unwrap(),
            &mut rng,
        );
        assert_sym_psd(
            "dg",
            &assemble_dg_jump(&disc, &coeffs, 0.5).unwrap(),
            &mut rng,
        );
        for side in [
            BoundarySide::Inflow,
            BoundarySide::Outflow,
            BoundarySide::Both,
        ] {
            assert_sym_psd(
                "bc",
                &assemble_boundary_penalty(&disc, &coeffs, 0.5, side).unwrap(),
                &mut rng,
            );
        }
    }
}

#[test]
fn inflow_plus_outflow_penalty_is_whole_boundary() {
    let coeffs = ProblemCase::smooth(Velocity::Spiral).coefficients();
    let s = space(Continuity::Continuous, 2);
    let i = assemble_boundary_penalty(&s, &coeffs, 0.7, BoundarySide::Inflow).unwrap();
    let o = assemble_boundary_penalty(&s, &coeffs, 0.7, BoundarySide::Outflow).unwrap();
    let b = assemble_boundary_penalty(&s, &coeffs, 0.7, BoundarySide::Both).unwrap();
    assert!(i.add(&o).unwrap().add_scaled(&b, -1.0).unwrap().max_abs() < 1e-13);
}

#[test]
fn energy_identity_for_constant_coefficients() {
    // uᵀAu = ½∮(β·n)u² + σ‖u‖² for constant β, σ.
    let beta = [0.7, -1.3];
    let sigma = 0.4;
    let coeffs = Coefficients::constant(beta, sigma);
    let mut rng = Lcg::new(3);
    for c in [Continuity::Continuous, Continuity::Discontinuous] {
        let s = space(c, 2);
        let a = assemble_advection(&s, &s, &coeffs).unwrap();
        let plus = assemble_boundary_penalty(&s, &coeffs, 0.5, BoundarySide::Outflow).unwrap();
        let minus = assemble_boundary_penalty(&s, &coeffs, 0.5, BoundarySide::Inflow).unwrap();
        let mass = assemble_advection(&s, &s, &Coefficients::constant([0.0, 0.0], sigma)).unwrap();
        for _ in 0..10 {
            let u = random_vector(&mut rng, s.num_dofs());
            let lhs = a.quadratic_form(&u);
            let rhs = plus.quadratic_form(&u) - minus.quadratic_form(&u) + mass.quadratic_form(&u);
            assert!(
                (lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()),
                "{c:?}: {lhs} vs {rhs}"
            );
        }
    }
}

#[test]
fn jump_seminorms_vanish_on_smooth_inputs() {
    let coeffs = ProblemCase::smooth(Velocity::Quartic).coefficients();
    let cont = space(Continuity::Continuous, 2);
    let cip = assemble_cip(&cont, &coeffs, 0.01).unwrap();
    let quad = cont.interpolate(&|p: [f64; 2]| 1.0 + p[0] - 2.0 * p[1] + p[0] * p[1]);
    // gradient jumps of a P2 interpolant of a global quadratic vanish
    assert!(cip.quadratic_form(&quad).abs() < 1e-10);
    let disc = space(Continuity::Discontinuous, 1);
    let dg = assemble_dg_jump(&disc, &coeffs, 0.5).unwrap();
    let lin = disc.interpolate(&|p: [f64; 2]| 2.0 * p[0] - p[1]);
    assert!(dg.quadratic_form(&lin).abs() < 1e-10);
}

#[test]
fn operators_follow_formulation() {
    let case = ProblemCase::smooth(Velocity::Quartic);
    let s = space(Continuity::Continuous, 1);
    let std = Operators::assemble(
        &case,
        &s,
        &StabilizationConfig::defaults(Method::Cip, Formulation::Standard, 1),
    )
    .unwrap();
    assert!(std.s_a.is_none());
    let pd = Operators::assemble(
        &case,
        &s,
        &StabilizationConfig::defaults(Method::Cip, Formulation::PrimalDual, 1),
    )
    .unwrap();
    let s_a = pd.s_a.unwrap();
    // s_a penalizes the whole boundary, s_p only the inflow part
    assert!(s_a.add_scaled(&pd.s_p, -1.0).unwrap().max_abs() > 0.0);
    assert_eq!(std.advection, pd.advection);
}
