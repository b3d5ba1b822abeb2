#include "doctest.h"

#include <cmath>

#include "ssanc/bands.hpp"
#include "ssanc/common.hpp"
#include "ssanc/metrics.hpp"

using namespace ssanc;

namespace {

Signal white_signal(int n, uint64_t seed) {
    Signal s;
    s.sample_rate_hz = 16000;
    s.samples.resize(n);
    Rng rng(seed);
    for (auto& v : s.samples) v = rng.next_gauss();
    return s;
}

Signal scaled(const Signal& s, double gain) {
    Signal out = s;
    for (auto& v : out.samples) v *= gain;
    return out;
}

// exact-bin tone: with 512-sample segments at 16 kHz the periodic Hann window
// confines it to three bins, so every other band has exactly zero power
Signal tone_1khz(int n) {
    Signal s;
    s.sample_rate_hz = 16000;
    s.samples.resize(n);
    for (int i = 0; i < n; i++) s.samples[i] = std::sin(2.0 * M_PI * 1000.0 * i / 16000.0);
    return s;
}

}  // namespace

TEST_CASE("zero distortion hits the floor") {
    auto bt = bands::builtin_band_table();
    auto t = white_signal(16384, 1);
    auto r = metrics::speech_distortion(t, t, bt);
    CHECK(r.sd_db == doctest::Approx(-100.0).epsilon(1e-9));
}

TEST_CASE("coherent 20 dB-down error reads -20 dB") {
    auto bt = bands::builtin_band_table();
    auto t = white_signal(16384, 2);
    auto e = scaled(t, 1.1);  // epsilon = 0.1 * target in every band
    auto r = metrics::speech_distortion(e, t, bt);
    CHECK(r.sd_db == doctest::Approx(-20.0).epsilon(0.01));
}

TEST_CASE("unit band ratios give exactly zero distortion") {
    auto bt = bands::builtin_band_table();
    auto t = white_signal(16384, 3);
    auto e = scaled(t, 2.0);  // epsilon equals the target itself
    auto r = metrics::speech_distortion(e, t, bt);
    CHECK(r.sd_db == doctest::Approx(0.0).epsilon(1e-9));
    CHECK_FALSE(r.bands_excluded);
}

TEST_CASE("narrowband target excludes the silent bands") {
    auto bt = bands::builtin_band_table();
    auto t = tone_1khz(8192);
    auto e = scaled(t, 2.0);
    auto r = metrics::speech_distortion(e, t, bt);
    CHECK(r.bands_excluded);
    CHECK(r.sd_db == doctest::Approx(0.0).epsilon(1e-9));
    int active = 0;
    for (double b : r.band_breakdown)
        if (std::isfinite(b)) active++;
    CHECK(active >= 1);
    CHECK(active < bt.count());
}

TEST_CASE("a target with no in-band power is rejected") {
    auto bt = bands::builtin_band_table();
    Signal t;
    t.sample_rate_hz = 16000;
    t.samples.assign(8192, 0.0);
    CHECK_THROWS_AS(metrics::speech_distortion(t, t, bt), std::invalid_argument);
}

TEST_CASE("noise reduction arithmetic") {
    auto p = white_signal(8000, 4);
    CHECK(metrics::noise_reduction(p, p) == 0.0);  // identical inputs, exact zero
    CHECK(metrics::noise_reduction(p, scaled(p, 0.1)) == doctest::Approx(20.0).epsilon(1e-9));
    CHECK(metrics::noise_reduction(p, scaled(p, 0.5)) == doctest::Approx(6.0206).epsilon(1e-6 / 6.0));
}

TEST_CASE("silent residual noise caps at +300") {
    auto p = white_signal(8000, 5);
    bool capped = false;
    double nr = metrics::noise_reduction(p, scaled(p, 0.0), &capped);
    CHECK(nr == 300.0);
    CHECK(capped);
}

TEST_CASE("two silent noise signals give zero reduction without a cap") {
    Signal z;
    z.sample_rate_hz = 16000;
    z.samples.assign(100, 0.0);
    bool capped = true;
    CHECK(metrics::noise_reduction(z, z, &capped) == 0.0);
    CHECK_FALSE(capped);
}

TEST_CASE("snr improvement satisfies its decomposition identity") {
    auto e_s = white_signal(8000, 6);
    auto e_v = white_signal(8000, 7);
    auto p_s = white_signal(8000, 8);
    auto p_v = white_signal(8000, 9);
    auto energy = [](const Signal& s) {
        double t = 0;
        for (double v : s.samples) t += v * v;
        return t;
    };
    double dsnr = metrics::snr_improvement(e_s, e_v, p_s, p_v);
    double nr = metrics::noise_reduction(p_v, e_v);
    double want = nr + 10.0 * std::log10(energy(e_s)) - 10.0 * std::log10(energy(p_s));
    CHECK(std::fabs(dsnr - want) <= 1e-9);
}

TEST_CASE("metrics are invariant to a common gain") {
    auto e_s = white_signal(8192, 10);
    auto e_v = white_signal(8192, 11);
    auto p_s = white_signal(8192, 12);
    auto p_v = white_signal(8192, 13);
    double g = 37.5;
    double a = metrics::snr_improvement(e_s, e_v, p_s, p_v);
    double b = metrics::snr_improvement(scaled(e_s, g), scaled(e_v, g), scaled(p_s, g),
                                        scaled(p_v, g));
    CHECK(std::fabs(a - b) <= 1e-9);
    double n1 = metrics::noise_reduction(p_v, e_v);
    double n2 = metrics::noise_reduction(scaled(p_v, g), scaled(e_v, g));
    CHECK(std::fabs(n1 - n2) <= 1e-9);
    auto bt = bands::builtin_band_table();
    double s1 = metrics::speech_distortion(e_s, p_s, bt).sd_db;
    double s2 = metrics::speech_distortion(scaled(e_s, g), scaled(p_s, g), bt).sd_db;
    CHECK(std::fabs(s1 - s2) <= 1e-9);
}

TEST_CASE("evaluate trims the transient and reports sizes") {
    auto bt = bands::builtin_band_table();
    int n = 10000, trim = 500;
    scenario::ControlOutput out;
    out.e_s = white_signal(n, 14);
    out.e_v = white_signal(n, 15);
    out.target = white_signal(n, 16);
    auto p_s = white_signal(n, 17);
    auto p_v = white_signal(n, 18);
    auto rep = metrics::evaluate(out, p_s, p_v, bt, trim);
    CHECK(rep.n_samples == n - trim);
    // the report must match the hand-trimmed computation
    auto cut = [&](const Signal& s) {
        Signal c;
        c.sample_rate_hz = s.sample_rate_hz;
        c.samples.assign(s.samples.begin() + trim, s.samples.end());
        return c;
    };
    double want_nr = metrics::noise_reduction(cut(p_v), cut(out.e_v));
    CHECK(rep.nr_db == doctest::Approx(want_nr).epsilon(1e-12));
    double want_sd = metrics::speech_distortion(cut(out.e_s), cut(out.target), bt).sd_db;
    CHECK(rep.sd_db == doctest::Approx(want_sd).epsilon(1e-12));
    double want_dsnr = metrics::snr_improvement(cut(out.e_s), cut(out.e_v), cut(p_s), cut(p_v));
    CHECK(rep.dsnr_db == doctest::Approx(want_dsnr).epsilon(1e-12));
}
