use kinfluid_core::fluid::{self, FluidConfig, FluidModel};
use kinfluid_core::hybrid::{lift, HybridConfig, HybridState, Regime, RegimePolicy};
use kinfluid_core::indicators::{self, kinetic_to_fluid};
use kinfluid_core::kinetic::kinetic_step;
use kinfluid_core::{BoundaryKind, DistributionField, MacroState, SpatialGrid, VelocityGrid};

fn sod_states(space: &SpatialGrid) -> Vec<MacroState> {
    space
        .centers()
        .iter()
        .map(|&x| if x < 0.0 { MacroState::new(1.0, [0.0; 3], 1.0) } else { MacroState::new(0.125, [0.0; 3], 0.25) })
        .collect()
}

fn beams(vg: &VelocityGrid) -> Vec<f64> {
    let a = lift(&MacroState::new(0.5, [1.0, 0.0, 1.0], 1.0), vg).unwrap();
    let b = lift(&MacroState::new(0.5, [-1.0, 0.0, -1.0], 1.0), vg).unwrap();
    a.iter().zip(&b).map(|(x, y)| x + y).collect()
}

#[test]
fn uniform_double_maxwellian_stays_kinetic() {
    let vg = VelocityGrid::new(8.0, 16).unwrap();
    let space = SpatialGrid::new(0.0, 1.0, 12, BoundaryKind::Periodic).unwrap();
    let cell = beams(&vg);
    let mut f = DistributionField::zeros(12, vg.len());
    for i in 0..12 {
        f.cell_mut(i).copy_from_slice(&cell);
    }
    let state = HybridState::from_kinetic(space, vg.clone(), vec![1e-3; 12], f).unwrap();
    let states = state.macro_states();
    let derivs = indicators::field_derivatives(&states, &state.space);
    let cfg = HybridConfig::new(1);
    for (g, s) in &derivs {
        // every gradient-based quantity is blind to the beams
        assert!(g.is_zero() && *s == Default::default());
        let v = indicators::v_matrix_ns(&states[0], g, 1e-3, &cfg.kinetic.gas);
        assert_eq!(v.eigenvalues, [1.0; 3]);
        for k in 0..2 {
            let r = kinetic_to_fluid(&cell, &vg, g, k, 1e-3, 1e-3, &cfg.kinetic.gas, &cfg.indicators).unwrap();
            assert!(!r.fluid && r.distance > 0.1, "order {k}: {}", r.distance);
        }
    }
    for order in [0, 1] {
        let next = state.classify(&HybridConfig::new(order), 1e-3).unwrap();
        assert!(next.iter().all(|&r| r == Regime::Kinetic));
    }
}

#[test]
fn forced_fluid_map_reproduces_the_fluid_solver() {
    for order in [0u8, 1] {
        let space = SpatialGrid::new(-0.5, 0.5, 60, BoundaryKind::NeumannCopy).unwrap();
        let vg = VelocityGrid::new(8.0, 6).unwrap();
        let eps = vec![1e-2; 60];
        let init = sod_states(&space);
        let mut cfg = HybridConfig::new(order);
        cfg.policy = RegimePolicy::AllFluid;
        let mut h = HybridState::from_fluid(space.clone(), vg, eps.clone(), &init).unwrap();
        let mut u: Vec<_> = init.iter().map(MacroState::to_conserved).collect();
        let fcfg = FluidConfig { model: if order == 0 { FluidModel::Euler } else { FluidModel::NavierStokes }, ..cfg.fluid };
        for _ in 0..30 {
            let r = h.step(&cfg, 1.0).unwrap();
            let dt = fluid::max_dt(&u, &eps, &fcfg, space.dx(), None);
            assert_eq!(r.dt.to_bits(), dt.to_bits());
            fluid::fluid_step(&mut u, &space, &eps, &fcfg, dt, None, None).unwrap();
        }
        assert!(h.u == u, "order {order}");
        assert_eq!(h.kinetic_cells(), 0);
    }
}

#[test]
fn forced_kinetic_map_reproduces_the_kinetic_solver() {
    let space = SpatialGrid::new(-0.5, 0.5, 40, BoundaryKind::NeumannCopy).unwrap();
    let vg = VelocityGrid::new(8.0, 10).unwrap();
    let eps = vec![1e-2; 40];
    let mut f = DistributionField::zeros(40, vg.len());
    for (i, s) in sod_states(&space).iter().enumerate() {
        f.cell_mut(i).copy_from_slice(&lift(s, &vg).unwrap());
    }
    let mut cfg = HybridConfig::new(0);
    cfg.policy = RegimePolicy::AllKinetic;
    let mut h = HybridState::from_kinetic(space.clone(), vg.clone(), eps.clone(), f.clone()).unwrap();
    let dt = cfg.kinetic.max_dt(space.dx(), &vg);
    for _ in 0..20 {
        h.step(&cfg, 1.0).unwrap();
        kinetic_step(&mut f, &space, &vg, &cfg.kinetic, &eps, dt).unwrap();
    }
    assert!(h.f == f);
}

#[test]
fn adaptive_sod_conserves_totals_and_opens_a_kinetic_zone() {
    let space = SpatialGrid::new(-0.5, 0.5, 80, BoundaryKind::NeumannCopy).unwrap();
    let vg = VelocityGrid::new(8.0, 12).unwrap();
    let mut h = HybridState::from_fluid(space.clone(), vg, vec![1e-2; 80], &sod_states(&space)).unwrap();
    let cfg = HybridConfig::new(1);
    let start = h.totals();
    let mut seen = 0;
    for _ in 0..40 {
        let r = h.step(&cfg, 1.0).unwrap();
        seen = seen.max(r.kinetic_cells);
    }
    assert!(seen > 0 && seen < 80, "kinetic cells {seen}");
    let end = h.totals();
    // nothing has reached the boundaries, which are at rest
    assert!((end[0] - start[0]).abs() < 1e-12 && (end[4] - start[4]).abs() < 1e-12, "{end:?} vs {start:?}");
    let left = h.regime.iter().position(|&r| r == Regime::Kinetic).unwrap();
    assert!(h.regime[left..].iter().take_while(|&&r| r == Regime::Kinetic).count() >= 2);
}
