// Timing comparison between the serial reference kernels and their
// OpenMP-parallel counterparts: echo synthesis, the per-antenna
// virtual-velocity sweep, and a short Monte Carlo block.
//
// Usage: bench_kernels [repetitions]

#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "isac6d/harness.hpp"

using namespace isac6d;

namespace {

template <typename F>
double time_best_of(int reps, F&& f) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        const auto start = std::chrono::steady_clock::now();
        f();
        best = std::min(best, std::chrono::duration<double>(
                                  std::chrono::steady_clock::now() - start)
                                  .count());
    }
    return best;
}

void report(const char* name, double serial_s, double parallel_s) {
    std::printf("%-34s serial %8.3f ms   parallel %8.3f ms   speedup %.2fx\n", name,
                serial_s * 1e3, parallel_s * 1e3, serial_s / parallel_s);
}

}  // namespace

int main(int argc, char** argv) {
    const int reps = argc > 1 ? std::atoi(argv[1]) : 3;
#ifdef _OPENMP
    std::printf("OpenMP max threads: %d\n", omp_get_max_threads());
#endif

    const SimConfig cfg = desk_scale_config();
    const TargetState& tgt = cfg.targets.front();
    const SymbolFrame symbols =
        random_qpsk_frame(cfg.grid.n_symbols, cfg.grid.m_subcarriers, 2);
    const Eigen::VectorXcd beam =
        tx_beam(cfg.hu_geom, tgt.position.theta, tgt.position.phi, 1.0, 1.0);

    Scene scene;
    scene.targets = {tgt};
    scene.tx_geom = cfg.hu_geom;
    scene.rx_geom = cfg.ru_geom;
    scene.grid = cfg.grid;

    // Echo synthesis.
    const double synth_serial = time_best_of(
        reps, [&] { (void)synthesize_scene_serial(scene, beam, symbols, 0.1, 7); });
    const double synth_parallel =
        time_best_of(reps, [&] { (void)synthesize_scene(scene, beam, symbols, 0.1, 7); });
    report("echo synthesis (raw frame)", synth_serial, synth_parallel);

    // Per-antenna virtual-velocity sweep.
    const EchoTensor eec =
        erase_symbols(synthesize_scene(scene, beam, symbols, 0.01, 7), symbols);
    const EstimatorConfig est = cfg.estimator();
    const double vv_serial =
        time_best_of(reps, [&] { (void)estimate_virtual_velocities_serial(eec, est); });
    const double vv_parallel =
        time_best_of(reps, [&] { (void)estimate_virtual_velocities(eec, est); });
    report("virtual-velocity antenna sweep", vv_serial, vv_parallel);

    // Equality spot check while both results are at hand.
    {
        const auto a = estimate_virtual_velocities(eec, est);
        const auto b = estimate_virtual_velocities_serial(eec, est);
        bool same = a.size() == b.size();
        for (size_t i = 0; same && i < a.size(); ++i) same = a[i].v == b[i].v;
        std::printf("serial/parallel results identical: %s\n", same ? "yes" : "NO");
    }

    // Monte Carlo block: run_sweep parallelizes across trials.
    SimConfig mc = cfg;
    mc.trials = 8;
    mc.snr_db = {10.0};
    const double sweep_parallel = time_best_of(1, [&] { (void)run_sweep(mc); });
#ifdef _OPENMP
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const double sweep_serial = time_best_of(1, [&] { (void)run_sweep(mc); });
    omp_set_num_threads(saved);
#else
    const double sweep_serial = sweep_parallel;
#endif
    report("Monte Carlo block (8 trials)", sweep_serial, sweep_parallel);
    return 0;
}
