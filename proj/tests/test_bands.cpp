#include "doctest.h"

#include <cmath>
#include <cstdio>

#include "ssanc/bands.hpp"

using namespace ssanc;

TEST_CASE("builtin band table shape and importance normalization") {
    auto b = bands::builtin_band_table();
    REQUIRE(b.count() == 18);
    double s = 0.0;
    for (double w : b.importance) {
        CHECK(w > 0.0);
        s += w;
    }
    CHECK(std::fabs(s - 1.0) <= 1e-12);
    for (int i = 0; i < b.count(); i++) {
        CHECK(b.low_hz[i] < b.center_hz[i]);
        // the top band's upper edge is clipped to 8 kHz, which coincides
        // with its nominal center
        CHECK(b.center_hz[i] <= b.high_hz[i]);
        if (i) CHECK(b.high_hz[i - 1] == doctest::Approx(b.low_hz[i]).epsilon(1e-9));
    }
    CHECK(b.high_hz.back() <= 8000.0 + 1e-9);
}

TEST_CASE("band edges follow third-octave spacing") {
    auto b = bands::builtin_band_table();
    for (int i = 1; i + 1 < b.count(); i++)
        CHECK(b.center_hz[i + 1] / b.center_hz[i] == doctest::Approx(std::pow(2.0, 1.0 / 3.0)).epsilon(1e-9));
}

TEST_CASE("flat psd integrates to bandwidth") {
    auto b = bands::builtin_band_table();
    dsp::PsdEstimate psd;
    psd.resolution_hz = 10.0;
    for (int i = 0; i < 801; i++) {
        psd.frequencies_hz.push_back(i * 10.0);
        psd.power.push_back(2.0);  // flat at 2 per Hz
    }
    auto p = bands::third_octave_power(psd, b);
    for (int i = 0; i < b.count(); i++) {
        double width = b.high_hz[i] - b.low_hz[i];
        CHECK(p[i] == doctest::Approx(2.0 * width).epsilon(0.02));
    }
}

TEST_CASE("a narrow line lands in exactly one band") {
    auto b = bands::builtin_band_table();
    dsp::PsdEstimate psd;
    psd.resolution_hz = 1.0;
    for (int i = 0; i < 8001; i++) {
        psd.frequencies_hz.push_back(i);
        psd.power.push_back(0.0);
    }
    psd.power[1000] = 5.0;  // line at 1 kHz
    auto p = bands::third_octave_power(psd, b);
    int hot = -1;
    for (int i = 0; i < b.count(); i++) {
        if (p[i] > 0) {
            CHECK(hot == -1);
            hot = i;
        }
    }
    REQUIRE(hot >= 0);
    CHECK(b.low_hz[hot] <= 1000.0);
    CHECK(1000.0 < b.high_hz[hot]);
}

TEST_CASE("the bundled band table file matches the builtin table") {
    auto b = bands::builtin_band_table();
    auto f = bands::load_band_table(std::string(SSANC_REPO_DIR) + "/data/band_importance.txt");
    REQUIRE(f.count() == b.count());
    for (int i = 0; i < b.count(); i++) {
        CHECK(f.center_hz[i] == b.center_hz[i]);
        CHECK(f.low_hz[i] == b.low_hz[i]);
        CHECK(f.high_hz[i] == b.high_hz[i]);
        CHECK(f.importance[i] == b.importance[i]);
    }
}

TEST_CASE("band table round-trips through a file") {
    auto b = bands::builtin_band_table();
    std::string path = "band_table_roundtrip.txt";
    bands::save_band_table(path, b);
    auto c = bands::load_band_table(path);
    REQUIRE(c.count() == b.count());
    for (int i = 0; i < b.count(); i++) {
        CHECK(c.center_hz[i] == b.center_hz[i]);
        CHECK(c.low_hz[i] == b.low_hz[i]);
        CHECK(c.high_hz[i] == b.high_hz[i]);
        CHECK(c.importance[i] == b.importance[i]);
    }
    std::remove(path.c_str());
}
