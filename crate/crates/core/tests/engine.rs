use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spasync::engine::{EngineConfig, ProcState};
use spasync::genbench::{generate_rmat, GenSpec};
use spasync::graph::partition_graph;
use spasync::oracle::dijkstra_seq;
use spasync::transport::{DelayModel, Simulation, TransportConfig};
use spasync::{run_sssp, Dist, Graph, RunConfig, TermMode, Verdict, VertexId, INF};

fn random_graph(seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..80usize);
    let m = rng.gen_range(0..n * 6);
    let edges: Vec<_> = (0..m)
        .map(|_| (rng.gen_range(0..n) as VertexId, rng.gen_range(0..n) as VertexId, rng.gen_range(1..20u64)))
        .collect();
    Graph::build(&edges, n, true).unwrap()
}

fn sim_config(p: usize, seed: u64, max_delay: u64) -> RunConfig {
    let mut cfg = RunConfig::sim(p, TermMode::TokenRing, seed);
    cfg.transport.delay = DelayModel::uniform(1, max_delay);
    cfg
}

#[test]
fn converges_to_oracle_on_random_graphs() {
    for gseed in 0..40 {
        let g = random_graph(gseed);
        let source = (gseed as usize % g.n_vertices()) as VertexId;
        let want = dijkstra_seq(&g, source).unwrap().dist;
        for p in [1, 2, 3, 4, 8, 16].into_iter().filter(|&p| p <= g.n_vertices()) {
            for seed in 0..3 {
                let r = run_sssp(&g, source, &sim_config(p, seed, 12)).unwrap();
                assert_eq!(r.verdict, Verdict::Clean, "graph {gseed} p={p} seed={seed}");
                assert_eq!(r.dist, want, "graph {gseed} p={p} seed={seed}");
                let sim = r.sim.unwrap();
                assert!(sim.violations.is_empty());
                assert!(sim.ledger.balanced());
            }
        }
    }
}

#[test]
fn one_vertex_per_part() {
    let g = Graph::build(&[(0, 1, 3), (1, 2, 4), (0, 2, 9)], 3, true).unwrap();
    let r = run_sssp(&g, 0, &sim_config(3, 1, 4)).unwrap();
    assert_eq!(r.verdict, Verdict::Clean);
    assert_eq!(r.dist, vec![0, 3, 7]);
    assert!(run_sssp(&g, 0, &sim_config(4, 1, 4)).is_err());
}

#[test]
fn unreachable_vertices_stay_infinite() {
    let g = Graph::build(&[(0, 1, 1), (2, 3, 1)], 4, true).unwrap();
    let r = run_sssp(&g, 0, &sim_config(2, 0, 3)).unwrap();
    assert_eq!(r.dist, vec![0, 1, INF, INF]);
}

fn gathered(sim: &Simulation<ProcState>, n: usize) -> Vec<Dist> {
    let mut dist = vec![INF; n];
    for p in sim.procs() {
        for (v, d) in p.dist().iter() {
            dist[v as usize] = d;
        }
    }
    dist
}

/// Tentative distances never undershoot the truth and never increase, and
/// the counters always sum to minus the updates in flight.
#[test]
fn per_tick_invariants() {
    for gseed in 0..10 {
        let g = generate_rmat(&GenSpec::new(8, 8, gseed)).unwrap();
        let source = g.max_out_degree_vertex().unwrap();
        let want = dijkstra_seq(&g, source).unwrap().dist;
        let p = 4;
        let procs = partition_graph(&g, p)
            .unwrap()
            .into_iter()
            .map(|part| ProcState::init(part, source, EngineConfig::default()))
            .collect();
        let cfg = TransportConfig::simulated(p, gseed).with_delay(DelayModel::uniform(1, 10));
        let mut sim = Simulation::new(procs, &cfg).unwrap();
        let mut prev = gathered(&sim, g.n_vertices());
        while sim.tick().unwrap() {
            let now = gathered(&sim, g.n_vertices());
            for v in 0..now.len() {
                assert!(now[v] >= want[v]);
                assert!(now[v] <= prev[v]);
            }
            let counters: i64 = sim.procs().iter().map(|q| q.term().counter).sum();
            assert_eq!(counters, -(sim.network().ledger().in_flight_updates() as i64));
            prev = now;
        }
        assert_eq!(prev, want);
    }
}

#[test]
fn relax_count_matches_out_degrees_of_pops() {
    for gseed in 0..10 {
        let g = random_graph(100 + gseed);
        let mut cfg = sim_config(3, gseed, 6);
        cfg.engine.prune = false;
        cfg.engine.trace_pops = true;
        let r = run_sssp(&g, 0, &cfg).unwrap();
        let expected: u64 = r.pop_logs.iter().flatten().map(|&u| g.out_degree(u) as u64).sum();
        assert_eq!(r.relax_attempts, expected);
        assert_eq!(r.pops, r.pop_logs.iter().map(Vec::len).sum::<usize>() as u64);
    }
}

#[test]
fn single_part_pops_in_oracle_order() {
    for gseed in 0..20 {
        let g = random_graph(200 + gseed);
        let mut cfg = sim_config(1, gseed, 1);
        cfg.engine.trace_pops = true;
        let r = run_sssp(&g, 0, &cfg).unwrap();
        assert_eq!(r.pop_logs[0], dijkstra_seq(&g, 0).unwrap().pop_order);
    }
}

#[test]
fn pruning_does_not_change_distances() {
    for gseed in 0..10 {
        let g = generate_rmat(&GenSpec::new(8, 32, gseed)).unwrap();
        let source = g.max_out_degree_vertex().unwrap();
        let mut on = sim_config(4, gseed, 8);
        on.engine.resume_pruning = true;
        let mut off = on.clone();
        off.engine.prune = false;
        let a = run_sssp(&g, source, &on).unwrap();
        let b = run_sssp(&g, source, &off).unwrap();
        assert_eq!(a.dist, b.dist);
        assert_eq!(b.pruned_edges, 0);
    }
}

#[test]
fn threaded_mode_matches_oracle() {
    for gseed in 0..4 {
        let g = generate_rmat(&GenSpec::new(10, 8, gseed)).unwrap();
        let source = g.max_out_degree_vertex().unwrap();
        let want = dijkstra_seq(&g, source).unwrap().dist;
        for p in [1, 2, 4] {
            let r = run_sssp(&g, source, &RunConfig::threads(p, TermMode::TokenRing)).unwrap();
            assert_eq!(r.verdict, Verdict::Clean);
            assert_eq!(r.dist, want);
            assert!(r.mteps().is_some());
        }
    }
}
