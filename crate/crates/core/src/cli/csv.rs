use std::fmt::Write;

use super::{StabilityRun, StudyRow};
use crate::timestepper::{SimState, Simulation};

pub const STUDY_HEADER: &str = "N,M,dt,E_a_sigma,order_sigma,E_c_v,order_v";

fn order_cell(order: Option<f64>) -> String {
    order.map(|o| format!("{o:.4}")).unwrap_or_default()
}

/// Convergence table; the first row has empty order cells.
pub fn format_study(rows: &[StudyRow]) -> String {
    let mut out = format!("{STUDY_HEADER}\n");
    for row in rows {
        let r = &row.record;
        writeln!(
            out,
            "{},{},{:e},{:e},{},{:e},{}",
            r.n,
            r.m,
            r.dt,
            r.e_a_sigma,
            order_cell(row.order_sigma),
            r.e_c_v,
            order_cell(row.order_v)
        )
        .expect("writing to a String cannot fail");
    }
    out
}

/// Per-node energy balance of a stability run.
pub fn format_stability(run: &StabilityRun) -> String {
    let mut out = String::from("n,t,energy,dissipation,work,identity_defect,gronwall_bound,within_bound\n");
    for d in &run.diagnostics {
        writeln!(
            out,
            "{},{:e},{:e},{:e},{:e},{:e},{:e},{}",
            d.n,
            d.t,
            d.energy,
            d.dissipation,
            d.work,
            d.identity_defect(run.initial_energy),
            run.gronwall_bound,
            d.energy <= run.gronwall_bound
        )
        .expect("writing to a String cannot fail");
    }
    out
}

/// Fields at element centers for each stored state.
pub fn format_snapshots(sim: &Simulation, states: &[SimState]) -> String {
    let mesh = sim.stress.mesh();
    let dt = sim.grid.dt();
    let mut out = String::from("n,t,x,y,sigma11,sigma22,sigma12,v1,v2\n");
    for s in states {
        let n = (s.t / dt).round() as usize;
        for (e, rect) in mesh.rects().enumerate() {
            let c = rect.center();
            let sig = sim.stress.evaluate(&s.alpha, e, c);
            let v = sim.velocity.evaluate(&s.beta, e, c);
            writeln!(
                out,
                "{n},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                s.t, c[0], c[1], sig.t11, sig.t22, sig.t12, v[0], v[1]
            )
            .expect("writing to a String cannot fail");
        }
    }
    out
}
