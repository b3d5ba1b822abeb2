#include "ssanc/bands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ssanc/common.hpp"

namespace ssanc::bands {

ThirdOctaveBands builtin_band_table(double max_hz) {
    static const double imp[18] = {0.0083, 0.0095, 0.0150, 0.0289, 0.0440, 0.0578,
                                   0.0653, 0.0711, 0.0818, 0.0844, 0.0882, 0.0898,
                                   0.0868, 0.0844, 0.0771, 0.0527, 0.0364, 0.0185};
    ThirdOctaveBands b;
    double isum = 0.0;
    for (int i = 0; i < 18; i++) isum += imp[i];
    double half = std::pow(2.0, 1.0 / 6.0);
    for (int i = 0; i < 18; i++) {
        int k = i - 8;
        double c = 1000.0 * std::pow(2.0, k / 3.0);
        double lo = c / half;
        double hi = c * half;
        if (hi > max_hz) hi = max_hz;
        b.center_hz.push_back(c);
        b.low_hz.push_back(lo);
        b.high_hz.push_back(hi);
        b.importance.push_back(imp[i] / isum);
    }
    return b;
}

ThirdOctaveBands load_band_table(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw io_failure("cannot open band table: " + path);
    ThirdOctaveBands b;
    std::string line;
    while (std::getline(f, line)) {
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ss(line);
        double c, lo, hi, imp;
        if (ss >> c >> lo >> hi >> imp) {
            b.center_hz.push_back(c);
            b.low_hz.push_back(lo);
            b.high_hz.push_back(hi);
            b.importance.push_back(imp);
        }
    }
    require(b.count() > 0, "band table is empty: " + path);
    return b;
}

void save_band_table(const std::string& path, const ThirdOctaveBands& b) {
    std::ofstream f(path);
    if (!f) throw io_failure("cannot write band table: " + path);
    f << "# center_hz low_hz high_hz importance\n";
    char buf[160];
    for (int i = 0; i < b.count(); i++) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g\n", b.center_hz[i], b.low_hz[i],
                      b.high_hz[i], b.importance[i]);
        f << buf;
    }
}

std::vector<double> third_octave_power(const dsp::PsdEstimate& psd, const ThirdOctaveBands& b) {
    double nyq = psd.frequencies_hz.back();
    for (int i = 0; i < b.count(); i++)
        require(b.high_hz[i] <= nyq + 1e-9, "third_octave_power: band edge above Nyquist");
    double df = psd.resolution_hz;
    std::vector<double> out(b.count(), 0.0);
    for (int i = 0; i < b.count(); i++) {
        double p = 0.0;
        for (size_t j = 0; j < psd.frequencies_hz.size(); j++) {
            double blo = psd.frequencies_hz[j] - df / 2.0;
            double bhi = psd.frequencies_hz[j] + df / 2.0;
            double ov = std::min(bhi, b.high_hz[i]) - std::max(blo, b.low_hz[i]);
            if (ov > 0.0) p += psd.power[j] * ov;
        }
        out[i] = p;
    }
    return out;
}

}  // namespace ssanc::bands
