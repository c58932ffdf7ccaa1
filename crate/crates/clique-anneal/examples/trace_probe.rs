use clique_anneal::annealer::{anneal, AnnealOptions, TempSchedule};
use clique_anneal::bench::{run_desk_case, DeskOptions};
use clique_anneal::encoder::integrity_values;
use clique_anneal::synth::SynthParams;

fn main() {
    let mut opts = DeskOptions::default();
    opts.train.alpha = 0.3;
    opts.train.integrity_epochs = 50000;
    opts.m_total_override = Some(10000);
    opts.anneal.max_transitions = 1;
    let mut synth = SynthParams::default();
    synth.p_intra = 0.75;
    synth.p_jitter = 0.0;
    let out = run_desk_case(&synth, 20240601, &opts).unwrap();
    println!("f1 {:.4} preds {}", out.eval.f1, out.predictions.len());

    let sizes: Vec<usize> = out.split.train.iter().map(|&i| out.comms[i].len()).collect();
    let sched = TempSchedule::from_sizes(&sizes);
    println!("sched mu {:.2} sigma {:.2}", sched.mu, sched.sigma);

    // pick two test communities; anneal each internal clique verbosely
    for &ci in out.split.test.iter().take(2) {
        let x = &out.comms[ci].members;
        let y = integrity_values(&out.params, &out.graph, x, &opts.train.encoder).unwrap();
        println!("\n## community {ci} size {} members {:?} y {:?}", x.len(), x, y.map(|v| (v*1000.0).round()/1000.0));
        let cliques: Vec<usize> = (0..out.idx.len()).filter(|&q| out.idx.clique(q).iter().all(|v| x.binary_search(v).is_ok())).collect();
        for q in cliques {
            let members = out.idx.clique(q).to_vec();
            let (fin, trace) = anneal(&out.params, &out.graph, &out.idx, &sched, &members, &opts.anneal).unwrap();
            let inter = fin.iter().filter(|v| x.binary_search(v).is_ok()).count();
            let f1 = 2.0 * inter as f64 / (fin.len() + x.len()) as f64;
            println!("clique {q} {:?} -> final |{}| f1 {:.3} steps {} trans {}", members, fin.len(), f1, trace.growth_steps, trace.transitions);
            for e in trace.events.iter().take(12) {
                println!("   step {} {:?} delta {:?} Es {:.3} Ec {:.3} Em {:.3} intf {:.3} P {:.3} gate {:.3} {:?}",
                    e.step, e.action, e.delta, e.energy_state, e.energy_candidate, e.energy_merge, e.interface_budget, e.p_score, e.p_temp, e.note);
            }
        }
    }
}
