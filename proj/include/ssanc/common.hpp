#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ssanc {

struct Signal {
    std::vector<double> samples;
    int sample_rate_hz = 0;
};

// channels are outer mics 0..K-1; leakage is carried separately
struct MultichannelSignal {
    std::vector<std::vector<double>> ch;
    int sample_rate_hz = 0;
};

struct ControlFilter {
    std::vector<double> w;  // K+1 stacked blocks of length L_w
    int L_w = 0;
    int blocks() const { return L_w > 0 ? (int)w.size() / L_w : 0; }
};

// taps[i] holds the coefficient at lag i - L_a, i in [0, L_a + L_h)
struct AcausalFir {
    std::vector<double> taps;
    int L_a = 0;
    int L_h = 0;
    double at_lag(int lag) const {
        int i = lag + L_a;
        return (i >= 0 && i < (int)taps.size()) ? taps[i] : 0.0;
    }
};

struct numeric_failure : std::runtime_error {
    explicit numeric_failure(const std::string& m) : std::runtime_error(m) {}
};
struct insufficient_data : std::runtime_error {
    explicit insufficient_data(const std::string& m) : std::runtime_error(m) {}
};
// carries the final relative tap change and a still-usable averaged estimate,
// so sweeps over geometries that are non-representable at the chosen L_a can
// record the resulting design instead of aborting
struct convergence_failure : std::runtime_error {
    double misalignment;  // relative tap change at end of probe
    std::vector<AcausalFir> estimates;
    convergence_failure(const std::string& m, double mis, std::vector<AcausalFir> est = {})
        : std::runtime_error(m), misalignment(mis), estimates(std::move(est)) {}
};
struct io_failure : std::runtime_error {
    explicit io_failure(const std::string& m) : std::runtime_error(m) {}
};

inline void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

inline void check_finite(const std::vector<double>& v, const std::string& what) {
    for (double x : v)
        if (!std::isfinite(x)) throw std::invalid_argument(what + ": non-finite value");
}

// splitmix64; fixed generator so results do not depend on the standard library
struct Rng {
    uint64_t state;
    explicit Rng(uint64_t seed) : state(seed) {}
    uint64_t next_u64() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double next_unit() {  // in [0,1)
        return (next_u64() >> 11) * 0x1.0p-53;
    }
    bool have_spare = false;
    double spare = 0.0;
    double next_gauss() {  // Box-Muller with cached spare
        if (have_spare) { have_spare = false; return spare; }
        double u1 = next_unit(), u2 = next_unit();
        while (u1 <= 1e-300) u1 = next_unit();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare = r * std::sin(a);
        have_spare = true;
        return r * std::cos(a);
    }
};

inline uint64_t mix_seed(uint64_t a, uint64_t b) {
    Rng r(a ^ (b * 0x9e3779b97f4a7c15ull + 0x165667b19e3779f9ull));
    return r.next_u64();
}

}  // namespace ssanc
