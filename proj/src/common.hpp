#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace anyonprep {

using cplx = std::complex<double>;

constexpr double TOL_ALGEBRA = 1e-12;  // pentagon, unitarity, dense operator identities
constexpr double TOL_EIG = 1e-10;      // projector / eigenvalue checks on states
constexpr double TOL_FID = 1e-8;       // preparation fidelities
constexpr double PRUNE_EPS = 1e-14;    // amplitudes below this are dropped

// Input that fails validation (bad category file, malformed CLI state, ...).
struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A mathematical invariant that should hold failed at runtime.
struct check_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Resource guard tripped (state too large, too many registers, ...).
struct resource_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Deterministic RNG. One instance per run, seeded from the CLI; every random
// decision in a simulation draws from this single stream in a fixed order, so
// a (seed, trial) pair fully determines the transcript.
class Rng {
  public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    // Uniform in [0,1). 53-bit mantissa so the value is exactly representable.
    double uniform() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    // Sample an index from non-negative weights by cumulative scan.
    // Weights need not be normalized.
    size_t sample(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        if (total <= 0.0) throw check_error("sample: all weights vanish");
        double x = uniform() * total;
        double acc = 0.0;
        for (size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (x < acc) return i;
        }
        return weights.size() - 1;
    }

    uint64_t raw() { return eng_(); }

  private:
    std::mt19937_64 eng_;
};

// FNV-1a over a byte string; used to fingerprint category data in reports.
inline uint64_t fnv1a(const std::string& bytes) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// Fixed float formatting for all serialized output (%.17g round-trips doubles).
std::string format_double(double x);
std::string format_hex64(uint64_t x);

}  // namespace anyonprep
