#pragma once

#include <string>
#include <vector>

#include "ssanc/dsp.hpp"

namespace ssanc::bands {

struct ThirdOctaveBands {
    std::vector<double> center_hz;
    std::vector<double> low_hz;
    std::vector<double> high_hz;
    std::vector<double> importance;
    int count() const { return (int)center_hz.size(); }
};

// 18 bands, 160 Hz .. 8 kHz, speech-intelligibility band importances that sum
// to 1; the top band's upper edge is clipped to max_hz (Nyquist at 16 kHz)
ThirdOctaveBands builtin_band_table(double max_hz = 8000.0);

ThirdOctaveBands load_band_table(const std::string& path);
void save_band_table(const std::string& path, const ThirdOctaveBands& b);

// integral of the PSD over [low, high), rectangle rule with partial bins
std::vector<double> third_octave_power(const dsp::PsdEstimate& psd, const ThirdOctaveBands& b);

}  // namespace ssanc::bands
