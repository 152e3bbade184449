#include "hotspot/random.hpp"

#include <stdexcept>

namespace hotspot {

int sample_discrete(const std::vector<double>& w, Rng& rng) {
    double total = 0.0;
    for (double x : w) {
        if (x < 0.0) throw std::invalid_argument("sample_discrete: negative weight");
        total += x;
    }
    if (!(total > 0.0)) throw std::invalid_argument("sample_discrete: zero total weight");
    const double u = std::uniform_real_distribution<double>(0.0, total)(rng);
    double acc = 0.0;
    int last_positive = -1;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] > 0.0) last_positive = static_cast<int>(i);
        acc += w[i];
        if (u < acc) return w[i] > 0.0 ? static_cast<int>(i) : last_positive;
    }
    return last_positive;
}

std::vector<double> dirichlet_symmetric(int dim, double concentration, Rng& rng) {
    return dirichlet(std::vector<double>(static_cast<std::size_t>(dim), concentration), rng);
}

std::vector<double> dirichlet(const std::vector<double>& concentration, Rng& rng) {
    std::vector<double> out(concentration.size(), 0.0);
    // Tiny concentrations can underflow every gamma draw to zero; redraw.
    for (int attempt = 0; attempt < 64; ++attempt) {
        double total = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i) {
            std::gamma_distribution<double> g(concentration[i], 1.0);
            out[i] = g(rng);
            total += out[i];
        }
        if (total > 0.0) {
            for (double& x : out) x /= total;
            return out;
        }
    }
    throw std::runtime_error("dirichlet: degenerate draw");
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace hotspot
