#pragma once

#include <vector>

#include "ssanc/bands.hpp"
#include "ssanc/common.hpp"
#include "ssanc/scenario.hpp"

namespace ssanc::metrics {

struct MetricReport {
    double sd_db = 0.0;
    double nr_db = 0.0;
    double dsnr_db = 0.0;
    std::vector<double> band_breakdown;  // per-band 10log10 power ratio
    int n_samples = 0;
    bool nr_capped = false;        // e_v silent, value pinned to +300
    bool dsnr_capped = false;      // a silent denominator was involved
    bool bands_excluded = false;   // silent reference bands dropped, weights renormalized
};

struct SpeechDistortion {
    double sd_db = 0.0;
    std::vector<double> band_breakdown;
    bool bands_excluded = false;
};

// importance-weighted band log ratio of the distortion PSD to the target PSD;
// per-band ratio floored at 1e-10, bands with target power below 1e-12 of the
// total are excluded and the weights renormalized
SpeechDistortion speech_distortion(const Signal& e_s, const Signal& target,
                                   const bands::ThirdOctaveBands& bt, int segment_len = 512);

double noise_reduction(const Signal& p_v, const Signal& e_v, bool* capped = nullptr);

double snr_improvement(const Signal& e_s, const Signal& e_v, const Signal& p_s,
                       const Signal& p_v, bool* capped = nullptr);

// full report on a controlled scene; the first `trim` samples are discarded
// before any power or PSD computation
MetricReport evaluate(const scenario::ControlOutput& out, const Signal& p_s, const Signal& p_v,
                      const bands::ThirdOctaveBands& bt, int trim);

}  // namespace ssanc::metrics
