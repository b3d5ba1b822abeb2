#pragma once

#include <string>
#include <vector>

#include "ssanc/common.hpp"
#include "ssanc/scenario.hpp"

namespace ssanc::reir {

struct LmsConfig {
    double step_size = 0.5;  // normalized-LMS step, 0 < step < 2
    double probe_duration_s = 10.0;
    double convergence_window_s = 1.0;
    double convergence_threshold = 1e-4;  // relative tap change over one window
};

struct ChannelEstimate {
    AcausalFir fir;
    bool converged = false;
    double final_change = 0.0;  // relative tap change over the last window
};

// single-channel NLMS identification of target against reference; acausal lags
// are realized by delaying the target by L_a samples
ChannelEstimate estimate_reir_channel(const std::vector<double>& reference,
                                      const std::vector<double>& target, int L_a, int L_h,
                                      const LmsConfig& cfg, int sample_rate_hz);

// ReIRs for all K outer channels plus the leakage channel of a white-probe
// scene. Throws convergence_failure (carrying the averaged estimates) if any
// channel fails to meet the threshold within the probe. seed is reserved;
// adaptation itself is deterministic.
std::vector<AcausalFir> estimate_reirs(const scenario::SceneRealization& probe,
                                       int reference_channel, int L_a, int L_h,
                                       const LmsConfig& cfg, uint64_t seed = 0);

// 20*log10(|h_hat - h_true| / |h_true|), floored at -300 dB; index ranges are
// aligned by lag, the shorter one zero-padded
double misalignment_db(const AcausalFir& h_hat, const AcausalFir& h_true);

void save_reir(const std::string& path, const AcausalFir& h);
AcausalFir load_reir(const std::string& path);

}  // namespace ssanc::reir
