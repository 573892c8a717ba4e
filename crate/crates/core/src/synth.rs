//! Replacing a reversible word by a short one with the same displacement.
//!
//! Given runs `p -alpha-> q -beta-> p` whose displacements cancel, the
//! pipeline builds the witness graph of the loop, pumps `p` forward and `q`
//! backward in a projection of it, closes the pumped components with a
//! zero-displacement cycle `u`, finds a short path `alpha~` with the
//! displacement of `alpha`, and returns `v^n alpha~ u^n w^n`.

use num_bigint::BigUint;

use crate::bounds::{alpha_tilde_bound, bound_report, u_cycle_bound, BoundReport};
use crate::decide::ReversibilityCertificate;
use crate::error::{stage_failure, Result, VasError};
use crate::flow::{bounded_kirchhoff_for, eulerian_circuit, euler_total_cycle, Limits};
use crate::graph::{GraphPath, SubreachabilityGraph};
use crate::pump::pump_witness_with;
use crate::reversibility::zero_total_kirchhoff;
use crate::vector::{displacement, Action, IndexSet, Run, Vas};

/// Quantities computed along the way.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynthesisTrace {
    pub s: u64,
    pub x: BigUint,
    pub j: IndexSet,
    pub projected_states: usize,
    pub projected_transitions: usize,
    pub v_len: usize,
    pub w_len: usize,
    pub u_len: usize,
    pub alpha_tilde_len: usize,
    /// Multiplier of the zero flow used to build `u`.
    pub u_multiplier: u64,
    /// `1 + 2d x^(d^d)`.
    pub proof_multiplier: BigUint,
    /// Multiplier of the zero flow used to build `alpha~`.
    pub alpha_multiplier: u64,
    pub n: u64,
    pub bounds: BoundReport,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShortRun {
    pub word: Vec<Action>,
    pub run: Run,
    pub trace: SynthesisTrace,
}

fn fail(stage: &'static str, detail: impl Into<String>) -> VasError {
    stage_failure(stage, detail)
}

fn norm(v: &[i64]) -> u64 {
    v.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0)
}

fn sum(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn repeat(word: &[Action], n: u64) -> impl Iterator<Item = &Action> {
    (0..n).flat_map(move |_| word.iter())
}

/// A word `alpha'` reversible on `p` with `Delta(alpha') = Delta(alpha)` and
/// `|alpha'| <= 17 d^2 x^(15 d^(d+2))`, where the witness gives `alpha` and
/// its return word.
pub fn synthesize_short_run(
    vas: &Vas,
    witness: &ReversibilityCertificate,
    limits: &Limits,
) -> Result<ShortRun> {
    witness.validate()?;
    if !witness.uses_only(vas) {
        return Err(VasError::Precondition("witness uses actions outside the system".into()));
    }
    let d = vas.dim();
    let p = witness.source();
    let q = witness.target();
    let alpha = witness.alpha();
    let delta_alpha = displacement(d, alpha)?;

    // The witness graph of the loop.
    let loop_run = witness.forward.concat(&witness.backward)?;
    let g = SubreachabilityGraph::from_run(&loop_run)?;
    if !g.is_witness() {
        return Err(fail("graph", "loop does not give a witness graph"));
    }

    // Pumping p forward and q backward.
    let a = vas.norm_inf();
    let s = 1 + p.norm_inf() + norm(&delta_alpha);
    let bounds = bound_report(d as u64, a, p.norm_inf(), norm(&delta_alpha));
    let x = bounds.x.clone();
    let cert = pump_witness_with(&g, s, a)?;
    let pj = &cert.projected;
    let entry_p = cert.entry(p).ok_or_else(|| fail("pump", "source was not pumped"))?;
    let entry_q = cert.entry(q).ok_or_else(|| fail("pump", "target was not pumped"))?;
    let (anchor_p, anchor_q) = (entry_p.anchor, entry_q.anchor);
    let v = entry_p.forward.label(pj);
    let w = entry_q.backward.label(pj);

    // The cycle u closing the pumped components.
    let mu = zero_total_kirchhoff(pj, limits)
        .map_err(|e| fail("zero-flow", format!("projected graph: {e}")))?;
    let mu_v = entry_p.forward.parikh(pj);
    let mu_w = entry_q.backward.parikh(pj);
    let used: Vec<u64> = (0..pj.num_transitions()).map(|t| mu_v.get(t) + mu_w.get(t)).collect();
    let m = (0..pj.num_transitions())
        .map(|t| used[t] / mu.get(t) + 1)
        .max()
        .unwrap_or(1);
    let lambda: Vec<u64> = (0..pj.num_transitions()).map(|t| m * mu.get(t) - used[t]).collect();
    let u_path = euler_total_cycle(pj, &lambda, anchor_q)?;
    let u = u_path.label(pj);
    let closing = sum(&sum(&displacement(d, &v)?, &displacement(d, &u)?), &displacement(d, &w)?);
    if closing.iter().any(|&c| c != 0) {
        return Err(fail("u-cycle", "v, u and w do not cancel"));
    }
    if !u_cycle_bound(d as u64, &x).admits_u64(u.len() as u64) {
        return Err(fail("u-cycle", format!("|u| = {} exceeds its bound", u.len())));
    }

    // A short path alpha~ from p to q with the displacement of alpha.
    let beta_tilde = pj.find_path(anchor_q, anchor_p)?;
    let z = sum(&delta_alpha, &beta_tilde.displacement(pj)?);
    let theta = bounded_kirchhoff_for(pj, &z, limits)
        .map_err(|e| fail("alpha-tilde", format!("displacement {z:?}: {e}")))?;
    let f = beta_tilde.parikh(pj);
    let c = (0..pj.num_transitions())
        .map(|t| {
            let missing = (1 + f.get(t)).saturating_sub(theta.get(t));
            missing.div_ceil(mu.get(t))
        })
        .max()
        .unwrap_or(0);
    let mut edges: Vec<(usize, usize)> = pj.transitions().iter().map(|t| (t.source, t.target)).collect();
    let mut counts: Vec<u64> = (0..pj.num_transitions())
        .map(|t| theta.get(t) + c * mu.get(t) - f.get(t))
        .collect();
    let extra = edges.len();
    edges.push((anchor_q, anchor_p));
    counts.push(1);
    let circuit = eulerian_circuit(pj.num_states(), &edges, &counts, anchor_p)
        .ok_or_else(|| fail("alpha-tilde", "augmented flow has no Eulerian circuit"))?;
    let k = circuit
        .iter()
        .position(|&e| e == extra)
        .expect("the added transition is used once");
    let mut rotated = circuit[k + 1..].to_vec();
    rotated.extend_from_slice(&circuit[..k]);
    let alpha_tilde = GraphPath::from_edges(pj, anchor_p, rotated)?;
    if alpha_tilde.target() != anchor_q || alpha_tilde.displacement(pj)? != delta_alpha {
        return Err(fail("alpha-tilde", "path does not match alpha"));
    }
    if !alpha_tilde_bound(d as u64, &x).admits_u64(alpha_tilde.len() as u64) {
        return Err(fail("alpha-tilde", format!("|alpha~| = {} exceeds its bound", alpha_tilde.len())));
    }
    let alpha_tilde = alpha_tilde.label(pj);

    // Composition.
    let n = a * alpha_tilde.len().max(u.len()) as u64;
    let word: Vec<Action> = repeat(&v, n)
        .chain(alpha_tilde.iter())
        .chain(repeat(&u, n))
        .chain(repeat(&w, n))
        .cloned()
        .collect();
    let run = Run::execute(p, &word)?
        .ok_or_else(|| fail("compose", "composed word does not run from p"))?;
    if run.last() != q {
        return Err(fail("compose", "composed run does not end at q"));
    }
    if displacement(d, &word)? != delta_alpha {
        return Err(fail("compose", "displacement differs from alpha"));
    }
    if !bounds.main.admits_u64(word.len() as u64) {
        return Err(fail("compose", format!("|alpha'| = {} exceeds its bound", word.len())));
    }

    let proof_multiplier =
        BigUint::from(1u32) + BigUint::from(2 * d as u64) * num_traits::pow(x.clone(), d.pow(d as u32));
    Ok(ShortRun {
        trace: SynthesisTrace {
            s,
            x,
            j: cert.j.clone(),
            projected_states: pj.num_states(),
            projected_transitions: pj.num_transitions(),
            v_len: v.len(),
            w_len: w.len(),
            u_len: u.len(),
            alpha_tilde_len: alpha_tilde.len(),
            u_multiplier: m,
            proof_multiplier,
            alpha_multiplier: c,
            n,
            bounds,
        },
        word,
        run,
    })
}
