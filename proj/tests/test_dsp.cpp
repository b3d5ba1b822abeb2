#include "doctest.h"

#include <cmath>
#include <complex>
#include <numeric>

#include "ssanc/common.hpp"
#include "ssanc/dsp.hpp"
#include "ssanc/fft.hpp"

using namespace ssanc;

TEST_CASE("fft inverts itself") {
    Rng rng(9);
    std::vector<std::complex<double>> x(64);
    for (auto& v : x) v = {rng.next_gauss(), rng.next_gauss()};
    auto y = x;
    fft::fft_pow2(y, false);
    fft::fft_pow2(y, true);
    for (size_t i = 0; i < x.size(); i++) {
        CHECK(y[i].real() == doctest::Approx(x[i].real()).epsilon(1e-12));
        CHECK(y[i].imag() == doctest::Approx(x[i].imag()).epsilon(1e-12));
    }
}

TEST_CASE("rfft of a pure cosine concentrates at its bin") {
    int n = 256;
    std::vector<double> x(n);
    for (int i = 0; i < n; i++) x[i] = std::cos(2.0 * M_PI * 16.0 * i / n);
    auto X = fft::rfft(x, n);
    CHECK(std::abs(X[16]) == doctest::Approx(n / 2.0).epsilon(1e-9));
    CHECK(std::abs(X[17]) < 1e-9);
}

TEST_CASE("convolution against a hand-computed case") {
    auto y = dsp::convolve({1.0, 2.0, 3.0}, {1.0, -1.0});
    REQUIRE(y.size() == 4);
    CHECK(y[0] == doctest::Approx(1.0));
    CHECK(y[1] == doctest::Approx(1.0));
    CHECK(y[2] == doctest::Approx(1.0));
    CHECK(y[3] == doctest::Approx(-3.0));
}

TEST_CASE("fractional delay by an integer is a shifted unit pulse") {
    auto h = dsp::fractional_delay_fir(3.0, 16);
    int peak = 0;
    for (size_t i = 1; i < h.size(); i++)
        if (std::fabs(h[i]) > std::fabs(h[peak])) peak = (int)i;
    CHECK(peak == 16 + 3);
    CHECK(h[peak] == doctest::Approx(1.0).epsilon(1e-9));
    double sum = std::accumulate(h.begin(), h.end(), 0.0);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fractional delay shifts a sine by the right phase") {
    double delay = 2.37;
    auto h = dsp::fractional_delay_fir(delay, 16);
    double sum = std::accumulate(h.begin(), h.end(), 0.0);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    int n = 2048, fs = 16000;
    double f = 500.0;
    std::vector<double> x(n);
    for (int i = 0; i < n; i++) x[i] = std::sin(2.0 * M_PI * f * i / fs);
    auto y = dsp::convolve(x, h);
    // y[i + off] sees input phase i - delay once the kernel's own latency of
    // off samples is stripped
    int off = 16;
    double err = 0.0;
    for (int i = 200; i < n - 200; i++) {
        double want = std::sin(2.0 * M_PI * f * (i - delay) / fs);
        err = std::max(err, std::fabs(y[i + off] - want));
    }
    CHECK(err < 1e-3);
}

TEST_CASE("high-pass prototype kills DC and passes the band") {
    auto h = dsp::linear_phase_highpass(100.0, 512, 16000);
    // stopband rejection is set by the 50 dB window design, so DC leakage
    // sits at that level rather than at an exact null
    CHECK(dsp::fir_mag_at(h, 0.0, 16000) < 0.01);
    CHECK(dsp::fir_mag_at(h, 50.0, 16000) < 0.01);
    CHECK(dsp::fir_mag_at(h, 1000.0, 16000) == doctest::Approx(1.0).epsilon(0.01));
    CHECK(dsp::fir_mag_at(h, 4000.0, 16000) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("minimum-phase fold preserves the magnitude response") {
    auto lin = dsp::linear_phase_highpass(100.0, 512, 16000);
    auto mp = dsp::min_phase_highpass(100.0, 512, 16000);
    for (double f : {200.0, 500.0, 1000.0, 3000.0, 6000.0}) {
        double m1 = dsp::fir_mag_at(lin, f, 16000);
        double m2 = dsp::fir_mag_at(mp, f, 16000);
        CHECK(m2 == doctest::Approx(m1).epsilon(0.02));
    }
}

TEST_CASE("minimum-phase fold front-loads the energy") {
    Rng rng(3);
    std::vector<double> h(64);
    for (auto& v : h) v = rng.next_gauss();
    auto mp = dsp::min_phase_fold(h, 1 << 12, 1e-6, 64);
    double head = 0, total = 0;
    for (int i = 0; i < 64; i++) {
        total += mp[i] * mp[i];
        if (i < 16) head += mp[i] * mp[i];
    }
    CHECK(head / total > 0.5);
}

TEST_CASE("periodic hann window sums to n/2") {
    auto w = dsp::hann_window(512);
    double s = std::accumulate(w.begin(), w.end(), 0.0);
    CHECK(s == doctest::Approx(256.0).epsilon(1e-12));
    CHECK(w[0] == doctest::Approx(0.0));
}

TEST_CASE("welch psd integrates to the signal power") {
    Rng rng(17);
    int n = 65536;
    Signal s;
    s.sample_rate_hz = 16000;
    s.samples.resize(n);
    for (auto& v : s.samples) v = rng.next_gauss();
    auto psd = dsp::welch_psd(s, 512, 0.5);
    double total = 0.0;
    for (double p : psd.power) total += p * psd.resolution_hz;
    double power = 0.0;
    for (double v : s.samples) power += v * v;
    power /= n;
    CHECK(total == doctest::Approx(power).epsilon(0.05));
}

TEST_CASE("welch psd localizes a sine at its frequency") {
    int fs = 16000, n = 32768;
    Signal s;
    s.sample_rate_hz = fs;
    s.samples.resize(n);
    double f = 1000.0;
    for (int i = 0; i < n; i++) s.samples[i] = std::sin(2.0 * M_PI * f * i / fs);
    auto psd = dsp::welch_psd(s, 512, 0.5);
    size_t peak = 0;
    for (size_t i = 1; i < psd.power.size(); i++)
        if (psd.power[i] > psd.power[peak]) peak = i;
    CHECK(psd.frequencies_hz[peak] == doctest::Approx(f).epsilon(0.01));
}
