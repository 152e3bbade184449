// Compares the serial reference implementations against the OpenMP kernels
// and reports timings. Results must agree exactly; any mismatch aborts.

#include "hotspot/baselines.hpp"
#include "hotspot/evaluate.hpp"
#include "hotspot/predict.hpp"
#include "hotspot/synthetic.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace hotspot;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

void row(const char* kernel, double serial_ms, double parallel_ms) {
    std::printf("%-24s %10.1f ms %10.1f ms %8.2fx\n", kernel, serial_ms, parallel_ms,
                serial_ms / parallel_ms);
}

ScalarField random_field(int side, double coverage, Rng& rng) {
    ScalarField f;
    std::uniform_real_distribution<double> value(0.0, 1.0);
    for (int e = 0; e < side; ++e)
        for (int n = 0; n < side; ++n)
            if (value(rng) < coverage) f.values.emplace(CellKey{0, e, n}, value(rng));
    return f;
}

std::vector<SampleDistribution> random_samples(int n, int vocab, Rng& rng) {
    std::vector<SampleDistribution> out;
    std::uniform_int_distribution<long long> count(0, 30);
    for (int i = 0; i < n; ++i) {
        std::vector<long long> counts(vocab);
        long long total = 0;
        for (auto& c : counts) total += (c = count(rng));
        if (total == 0) counts[0] = 1;
        out.push_back(SampleDistribution::from_counts(
            i, {static_cast<double>(i), static_cast<double>(i) * 100.0, 0.0}, std::move(counts)));
    }
    return out;
}

} // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; parallel paths run serially\n");
#endif
    std::printf("%-24s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

    Rng rng(42);
    GridConfig grid{1.0, 0.0, 1};

    {
        const ScalarField field = random_field(420, 0.6, rng);
        auto t0 = std::chrono::steady_clock::now();
        const auto serial = median_smooth_serial(field, 19.0, grid);
        const double serial_ms = ms_since(t0);
        t0 = std::chrono::steady_clock::now();
        const auto parallel = median_smooth(field, 19.0, grid);
        const double parallel_ms = ms_since(t0);
        if (serial.values != parallel.values) {
            std::fprintf(stderr, "median filter mismatch\n");
            return 1;
        }
        row("median filter", serial_ms, parallel_ms);
    }

    {
        const auto train = random_samples(3000, 30, rng);
        const auto test = random_samples(3000, 30, rng);
        auto t0 = std::chrono::steady_clock::now();
        const auto serial = nn_predict_batch_serial(train, test, 3);
        const double serial_ms = ms_since(t0);
        t0 = std::chrono::steady_clock::now();
        const auto parallel = nn_predict_batch(train, test, 3);
        const double parallel_ms = ms_since(t0);
        if (serial != parallel) {
            std::fprintf(stderr, "nn batch mismatch\n");
            return 1;
        }
        row("nn batch predict", serial_ms, parallel_ms);
    }

    {
        const auto train = random_samples(6000, 30, rng);
        Rng fit_rng_a(7);
        auto t0 = std::chrono::steady_clock::now();
        const auto serial = kmeans_fit_detailed(train, 12, 3, fit_rng_a, 3, false);
        const double serial_ms = ms_since(t0);
        Rng fit_rng_b(7);
        t0 = std::chrono::steady_clock::now();
        const auto parallel = kmeans_fit_detailed(train, 12, 3, fit_rng_b, 3, true);
        const double parallel_ms = ms_since(t0);
        if (serial.sse != parallel.sse ||
            serial.centroids.coords != parallel.centroids.coords) {
            std::fprintf(stderr, "kmeans mismatch\n");
            return 1;
        }
        row("kmeans fit", serial_ms, parallel_ms);
    }

    {
        SynthSpec spec;
        spec.n_cells = 120;
        spec.obs_per_cell = 60;
        spec.seed = 9;
        const auto data = generate_synthetic(spec);
        SweepConfig sweep;
        sweep.alphas = {0.1, 0.5};
        sweep.betas = {0.1, 1.0};
        sweep.gammas = {1e-5};
        sweep.sigmas = {15000.0};
        sweep.n_hotspots = 10;
        sweep.target_taxa = most_frequent_taxa(data.dataset, 4);
        GridConfig cells{5000.0, 0.0, 1};

#ifdef _OPENMP
        omp_set_num_threads(1);
#endif
        auto t0 = std::chrono::steady_clock::now();
        const auto serial = run_sweep(data.dataset, SplitRegime::halves, sweep, false, cells, 11,
                                      0, 20, 5);
        const double serial_ms = ms_since(t0);
#ifdef _OPENMP
        omp_set_num_threads(omp_get_num_procs());
#endif
        t0 = std::chrono::steady_clock::now();
        const auto parallel = run_sweep(data.dataset, SplitRegime::halves, sweep, false, cells, 11,
                                        0, 20, 5);
        const double parallel_ms = ms_since(t0);
        for (std::size_t i = 0; i < serial.per_config.size(); ++i)
            if (serial.per_config[i].auc != parallel.per_config[i].auc) {
                std::fprintf(stderr, "sweep mismatch\n");
                return 1;
            }
        row("hyperparameter sweep", serial_ms, parallel_ms);
    }
    return 0;
}
