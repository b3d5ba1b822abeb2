#pragma once

#include <vector>

#include "ssanc/common.hpp"

namespace ssanc::dsp {

struct PsdEstimate {
    std::vector<double> frequencies_hz;
    std::vector<double> power;
    double resolution_hz = 0.0;
};

std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b);
Signal convolve(const Signal& a, const std::vector<double>& taps);

// windowed-sinc; length 2*half_width+1+ceil(delay), taps normalized to unit sum
std::vector<double> fractional_delay_fir(double delay_samples, int half_width);

// Kaiser-window linear-phase high-pass prototype, length order+1
std::vector<double> linear_phase_highpass(double cutoff_hz, int order, int fs,
                                          double edge_factor = 1.02, double atten_db = 50.0);

// real-cepstrum fold; returns first out_len samples of the minimum-phase counterpart
std::vector<double> min_phase_fold(const std::vector<double>& h, int nfft, double floor_rel,
                                   int out_len);

std::vector<double> min_phase_highpass(double cutoff_hz, int order, int sample_rate_hz);

PsdEstimate welch_psd(const Signal& s, int segment_len, double overlap_fraction);

std::vector<double> hann_window(int n);  // periodic

// magnitude of the FIR frequency response at one frequency (test / audit aid)
double fir_mag_at(const std::vector<double>& taps, double freq_hz, double fs);

}  // namespace ssanc::dsp
