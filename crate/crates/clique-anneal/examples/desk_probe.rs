use clique_anneal::bench::{run_desk_case, DeskOptions};
use clique_anneal::encoder::{embed_values, integrity_values};
use clique_anneal::losses::ordering_report;
use clique_anneal::synth::SynthParams;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut opts = DeskOptions::default();
    if let Ok(e) = std::env::var("INTEG_EPOCHS") {
        opts.train.integrity_epochs = e.parse().unwrap();
    }
    if let Ok(e) = std::env::var("EPOCHS") {
        opts.train.epochs = e.parse().unwrap();
    }
    if let Ok(e) = std::env::var("ALPHA") {
        opts.train.alpha = e.parse().unwrap();
    }
    if let Ok(e) = std::env::var("MTOTAL") {
        opts.m_total_override = Some(e.parse().unwrap());
    }
    if let Ok(e) = std::env::var("MAXT") {
        opts.anneal.max_transitions = e.parse().unwrap();
    }
    if let Ok(e) = std::env::var("MAXS") {
        opts.anneal.max_steps = e.parse().unwrap();
    }
    let mut synth = SynthParams::default();
    if let Ok(v) = std::env::var("P_INTRA") { synth.p_intra = v.parse().unwrap(); }
    if let Ok(v) = std::env::var("P_INTER") { synth.p_inter = v.parse().unwrap(); }
    if let Ok(v) = std::env::var("P_JITTER") { synth.p_jitter = v.parse().unwrap(); }
    let t0 = std::time::Instant::now();
    let out = run_desk_case(&synth, 20240601, &opts).unwrap();
    println!("total {:.1}s (train {:.1}s detect {:.1}s)", t0.elapsed().as_secs_f64(), out.train_secs, out.detect_secs);
    println!("graph n={} m={} cliques={}", out.graph.n(), out.graph.edge_count(), out.idx.len());
    println!("candidates {} predictions {}", out.candidates, out.predictions.len());
    println!("f1 {:.4} jaccard {:.4} onmi {:.4} s_avg {:.3}", out.eval.f1, out.eval.jaccard, out.eval.onmi, out.s_avg());
    if let Some(l) = out.train_report.integrity_epochs.last() {
        println!("final integ loss {:.4}", l);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(999);
    let rep = ordering_report(&out.params, &out.graph, &out.idx, &out.comms, &out.split.test, 25, &opts.train.encoder, &mut rng).unwrap();
    println!("pos_s rate {:.3} ({}/{})", rep.pos_s_rate(), rep.pos_s_ordered, rep.pos_s_pairs);
    println!("status acc {:.3} ({}/{})", rep.status_accuracy(), rep.status_correct, rep.status_total);
    println!("confusion {:?}", rep.confusion);
    // inspect a few energies/integrities
    let cfg = &opts.train.encoder;
    for &ci in out.split.test.iter().take(3) {
        let m = &out.comms[ci].members;
        let (_, e) = embed_values(&out.params, &out.graph, m, cfg).unwrap();
        let y = integrity_values(&out.params, &out.graph, m, cfg).unwrap();
        let tops = out.idx.top_cliques(m, 1);
        if tops.is_empty() { continue; }
        let (_, eq) = embed_values(&out.params, &out.graph, &tops[0], cfg).unwrap();
        let yq = integrity_values(&out.params, &out.graph, &tops[0], cfg).unwrap();
        println!("comm {ci} size {} E {:.3} y {:?} | top clique size {} E {:.3} y {:?}", m.len(), e, y.map(|v| (v*100.0).round()/100.0), tops[0].len(), eq, yq.map(|v| (v*100.0).round()/100.0));
    }
    // stop reasons histogram
    let mut reasons: std::collections::BTreeMap<String, usize> = Default::default();
    for t in &out.traces {
        for ev in &t.events {
            if let Some(n) = &ev.note { *reasons.entry(n.clone()).or_default() += 1; }
        }
    }
    println!("stop reasons {:?}", reasons);
    // candidate diversity + coverage diagnostics
    use clique_anneal::proposer::propose_candidates;
    let m_total = 4 * out.split.test.len();
    let set = propose_candidates(&out.params, &out.graph, &out.idx, &out.comms, &out.split.train, m_total, cfg).unwrap();
    let mut distinct: std::collections::BTreeSet<Vec<u32>> = Default::default();
    for e in &set.entries { distinct.insert(e.members.clone()); }
    println!("candidate entries {} distinct {}", set.entries.len(), distinct.len());
    let covered = out.split.test.iter().filter(|&&ti| {
        let m = &out.comms[ti].members;
        distinct.iter().any(|c| {
            let inter = c.iter().filter(|v| m.binary_search(v).is_ok()).count();
            inter * 2 >= c.len() && inter * 3 >= m.len()
        })
    }).count();
    println!("test comms covered by some candidate: {}/{}", covered, out.split.test.len());
    let d0: Vec<f64> = set.entries.iter().take(40).map(|e| e.distance).collect();
    println!("first community distances: min {:.4} q1 {:.4} med {:.4} max {:.4}", d0[0], d0[d0.len()/4], d0[d0.len()/2], d0[d0.len()-1]);
    // prediction quality vs truth: best-F1 distribution truth-side
    let mut best: Vec<f64> = out.split.test.iter().map(|&ti| {
        let m = &out.comms[ti].members;
        out.predictions.iter().map(|p| {
            let inter = p.iter().filter(|v| m.binary_search(v).is_ok()).count() as f64;
            2.0 * inter / (p.len() + m.len()) as f64
        }).fold(0.0, f64::max)
    }).collect();
    best.sort_by(|a, b| a.partial_cmp(b).unwrap());
    println!("truth-side best-F1: p10 {:.3} med {:.3} p90 {:.3}", best[best.len()/10], best[best.len()/2], best[best.len()*9/10]);
    // pred-side anatomy: best match vs ALL comms and vs test truth
    let all_comms: Vec<&Vec<u32>> = out.comms.iter().map(|c| &c.members).collect();
    let test_set: std::collections::BTreeSet<usize> = out.split.test.iter().copied().collect();
    let mut cats = std::collections::BTreeMap::new();
    let mut pred_best_test: Vec<f64> = Vec::new();
    for p in &out.predictions {
        let (mut bi, mut bf) = (0usize, 0.0f64);
        for (i, m) in all_comms.iter().enumerate() {
            let inter = p.iter().filter(|v| m.binary_search(v).is_ok()).count() as f64;
            let f1 = 2.0 * inter / (p.len() + m.len()) as f64;
            if f1 > bf { bf = f1; bi = i; }
        }
        let m = all_comms[bi];
        let inside = p.iter().filter(|v| m.binary_search(v).is_ok()).count();
        let cat = if !test_set.contains(&bi) { "train/valid-target" }
            else if inside == p.len() && p.len() == m.len() { "exact" }
            else if inside == p.len() { "subset" }
            else if inside == m.len().min(p.len()) && p.len() > m.len() { "superset" }
            else { "mixed" };
        *cats.entry(cat).or_insert(0usize) += 1;
        let tf = out.split.test.iter().map(|&ti| {
            let m = &out.comms[ti].members;
            let inter = p.iter().filter(|v| m.binary_search(v).is_ok()).count() as f64;
            2.0 * inter / (p.len() + m.len()) as f64
        }).fold(0.0, f64::max);
        pred_best_test.push(tf);
    }
    pred_best_test.sort_by(|a,b| a.partial_cmp(b).unwrap());
    let n = pred_best_test.len();
    println!("pred-side best-F1 vs test: p10 {:.3} p25 {:.3} med {:.3} mean {:.3}", pred_best_test[n/10], pred_best_test[n/4], pred_best_test[n/2], pred_best_test.iter().sum::<f64>()/n as f64);
    println!("pred categories: {:?}", cats);

}
