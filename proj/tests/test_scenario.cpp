#include "doctest.h"

#include <cmath>
#include <cstdio>

#include "ssanc/common.hpp"
#include "ssanc/dsp.hpp"
#include "ssanc/scenario.hpp"

using namespace ssanc;

namespace {

scenario::SceneConfig small_scene() {
    scenario::SceneConfig cfg;
    cfg.sample_rate_hz = 16000;
    cfg.duration_s = 0.6;
    cfg.K = 2;
    cfg.mic_pos = {{0.04, 0.0, 0.0}, {-0.04, 0.0, 0.0}};
    cfg.err_pos = {0.0, 0.01, 0.0};
    cfg.desired.azimuth_deg = 0.0;
    cfg.desired.kind = "white";
    cfg.desired.seed = 5;
    scenario::SourceSpec nz;
    nz.azimuth_deg = 45.0;
    nz.kind = "multitone";
    nz.seed = 11;
    cfg.noises = {nz};
    cfg.g.length = 16;
    cfg.g.bulk_delay = 2;
    cfg.g.decay_ms = 1.0;
    cfg.g.seed = 3;
    cfg.target_leakage_snr_db = -5.0;
    return cfg;
}

double energy(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return s;
}

}  // namespace

TEST_CASE("source position convention") {
    auto p = scenario::source_position(0.0, 2.0);
    CHECK(p[0] == doctest::Approx(2.0));
    CHECK(p[1] == doctest::Approx(0.0));
    auto q = scenario::source_position(90.0, 2.0);
    CHECK(q[0] == doctest::Approx(0.0));
    CHECK(q[1] == doctest::Approx(2.0));
}

TEST_CASE("propagation fir delay and spreading gain") {
    // distance chosen for an integer sample delay: 5 samples at 16 kHz
    double r = 343.0 * 5.0 / 16000.0;
    auto h = scenario::propagation_fir({r, 0, 0}, {0, 0, 0}, 16000);
    int peak = 0;
    for (size_t i = 1; i < h.size(); i++)
        if (std::fabs(h[i]) > std::fabs(h[peak])) peak = (int)i;
    CHECK(peak == 16 + 5);  // kernel origin plus the propagation delay
    double sum = 0;
    for (double v : h) sum += v;
    // integer delay keeps only the center sinc tap, so the dc gain is exact
    CHECK(sum == doctest::Approx(1.0 / r).epsilon(1e-9));
}

TEST_CASE("extra delay shifts only the error path") {
    double r = 343.0 * 5.0 / 16000.0;
    auto h0 = scenario::propagation_fir({r, 0, 0}, {0, 0, 0}, 16000, 0.0);
    auto h1 = scenario::propagation_fir({r, 0, 0}, {0, 0, 0}, 16000, 3.0);
    auto peak_of = [](const std::vector<double>& h) {
        int p = 0;
        for (size_t i = 1; i < h.size(); i++)
            if (std::fabs(h[i]) > std::fabs(h[p])) p = (int)i;
        return p;
    };
    CHECK(peak_of(h1) == peak_of(h0) + 3);
}

TEST_CASE("coincident source and microphone is rejected") {
    CHECK_THROWS_AS(scenario::propagation_fir({1, 0, 0}, {1, 0, 0}, 16000), std::invalid_argument);
}

TEST_CASE("generated sources are unit variance") {
    for (const char* kind : {"white", "ar1", "multitone"}) {
        scenario::SourceSpec s;
        s.kind = kind;
        auto x = scenario::generate_source(s, 16000, 16000, 42);
        double mean = 0;
        for (double v : x) mean += v;
        mean /= x.size();
        double var = 0;
        for (double v : x) var += (v - mean) * (v - mean);
        var /= x.size();
        CHECK(var == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("ar1 source has the prescribed lag-1 correlation") {
    scenario::SourceSpec s;
    s.kind = "ar1";
    auto x = scenario::generate_source(s, 200000, 16000, 7);
    double c0 = 0, c1 = 0;
    for (size_t i = 1; i < x.size(); i++) {
        c0 += x[i] * x[i];
        c1 += x[i] * x[i - 1];
    }
    CHECK(c1 / c0 == doctest::Approx(0.95).epsilon(0.02));
}

TEST_CASE("unknown source kind is rejected") {
    scenario::SourceSpec s;
    s.kind = "pink";
    CHECK_THROWS_AS(scenario::generate_source(s, 100, 16000, 1), std::invalid_argument);
}

TEST_CASE("secondary path has its bulk delay and unit norm") {
    scenario::GSpec gs;
    gs.length = 32;
    gs.bulk_delay = 4;
    gs.decay_ms = 1.0;
    auto g = scenario::make_secondary_path(gs, 16000);
    REQUIRE((int)g.size() == 32);
    for (int i = 0; i < 4; i++) CHECK(g[i] == 0.0);
    CHECK(g[4] != 0.0);
    CHECK(energy(g) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("scene realization is deterministic in the seed") {
    auto cfg = small_scene();
    auto a = scenario::realize_scene(cfg, 9);
    auto b = scenario::realize_scene(cfg, 9);
    auto c = scenario::realize_scene(cfg, 10);
    REQUIRE(a.n() == b.n());
    bool same = true, diff = false;
    for (int i = 0; i < a.n(); i++) {
        same = same && a.p_v.samples[i] == b.p_v.samples[i] && a.p_s.samples[i] == b.p_s.samples[i];
        diff = diff || a.p_v.samples[i] != c.p_v.samples[i];
    }
    CHECK(same);
    CHECK(diff);
}

TEST_CASE("leakage components meet the target SNR") {
    auto cfg = small_scene();
    cfg.target_leakage_snr_db = -5.0;
    auto sc = scenario::realize_scene(cfg, 3);
    double snr = 10.0 * std::log10(energy(sc.p_s.samples) / energy(sc.p_v.samples));
    CHECK(std::fabs(snr - (-5.0)) < 0.01);
}

TEST_CASE("negligible second source leaves the mix unchanged") {
    auto cfg = small_scene();
    auto base = scenario::realize_scene(cfg, 3);
    scenario::SourceSpec tiny;
    tiny.azimuth_deg = 180.0;
    tiny.kind = "white";
    tiny.seed = 12;
    tiny.level = 1e-9;
    cfg.noises.push_back(tiny);
    auto mixed = scenario::realize_scene(cfg, 3);
    double scale = 0;
    for (double v : base.p_v.samples) scale = std::max(scale, std::fabs(v));
    for (int i = 0; i < base.n(); i++)
        CHECK(std::fabs(mixed.p_v.samples[i] - base.p_v.samples[i]) < 1e-6 * scale);
}

TEST_CASE("noise-free scene warns instead of failing") {
    auto cfg = small_scene();
    cfg.noises.clear();
    auto sc = scenario::realize_scene(cfg, 1);
    REQUIRE(sc.warnings.size() == 1);
    CHECK(sc.warnings[0].find("no noise sources") != std::string::npos);
    CHECK(energy(sc.p_v.samples) == 0.0);
}

TEST_CASE("silent wav source is rejected") {
    Signal z;
    z.sample_rate_hz = 16000;
    z.samples.assign(4000, 0.0);
    scenario::write_wav_mono("silent_test.wav", z);
    scenario::SourceSpec s;
    s.kind = "wav";
    s.wav_path = "silent_test.wav";
    CHECK_THROWS_AS(scenario::generate_source(s, 4000, 16000, 1), std::invalid_argument);
    std::remove("silent_test.wav");
}

TEST_CASE("probe scene is noise-free white through the desired paths") {
    auto cfg = small_scene();
    cfg.desired.kind = "multitone";
    auto probe = scenario::probe_scene(cfg, 77, 0.5);
    CHECK(probe.n() == 8000);
    CHECK(energy(probe.p_v.samples) == 0.0);
    for (int k = 0; k < probe.K(); k++) CHECK(energy(probe.x_v.ch[k]) == 0.0);
    // white probe: broad flat spectrum, unlike the five-tone desired source
    auto psd = dsp::welch_psd(probe.p_s, 256, 0.5);
    int nonzero = 0;
    for (double p : psd.power)
        if (p > 1e-8) nonzero++;
    CHECK(nonzero > (int)psd.power.size() / 2);
}

TEST_CASE("leakage estimator recovers p exactly when ghat = g") {
    Rng rng(21);
    int n = 3000;
    std::vector<double> g = {0.0, 0.5, -0.25, 0.1};
    Signal y, p, e;
    y.sample_rate_hz = p.sample_rate_hz = e.sample_rate_hz = 16000;
    y.samples.resize(n);
    p.samples.resize(n);
    for (int i = 0; i < n; i++) {
        y.samples[i] = rng.next_gauss();
        p.samples[i] = rng.next_gauss();
    }
    e.samples.assign(n, 0.0);
    for (int i = 0; i < n; i++) {
        double d = 0;
        for (int j = 0; j < (int)g.size() && j <= i; j++) d += g[j] * y.samples[i - j];
        e.samples[i] = p.samples[i] + d;
    }
    auto p_hat = scenario::estimate_leakage(e, y, g);
    for (int i = 0; i < n; i++) CHECK(p_hat.samples[i] == doctest::Approx(p.samples[i]).epsilon(1e-12));
}

TEST_CASE("zero control filter passes the leakage through untouched") {
    auto cfg = small_scene();
    auto sc = scenario::realize_scene(cfg, 4);
    ControlFilter w;
    w.L_w = 8;
    w.w.assign((size_t)(sc.K() + 1) * 8, 0.0);
    auto hp = dsp::min_phase_highpass(100.0, 512, sc.fs());
    auto out = scenario::apply_control(sc, w, sc.g, hp, 4);
    for (int i = 0; i < sc.n(); i++) {
        CHECK(out.e_s.samples[i] == sc.p_s.samples[i]);  // exact, no arithmetic applied
        CHECK(out.e_v.samples[i] == sc.p_v.samples[i]);
    }
}

TEST_CASE("closed loop with exact leakage model matches the batch path") {
    auto cfg = small_scene();
    cfg.duration_s = 0.4;
    auto sc = scenario::realize_scene(cfg, 6);
    ControlFilter w;
    w.L_w = 8;
    w.w.resize((size_t)(sc.K() + 1) * 8);
    Rng rng(13);
    for (auto& v : w.w) v = 0.05 * rng.next_gauss();

    auto loop = scenario::closed_loop_sim(sc, w, sc.g, sc.g);
    for (int i = 0; i < sc.n(); i++) {
        double p = sc.p_s.samples[i] + sc.p_v.samples[i];
        CHECK(std::fabs(loop.p_hat.samples[i] - p) <= 1e-10);
    }

    auto hp = dsp::min_phase_highpass(100.0, 512, sc.fs());
    auto batch = scenario::apply_control(sc, w, sc.g, hp, 0);
    double scale = 0;
    for (int i = 0; i < sc.n(); i++)
        scale = std::max(scale, std::fabs(batch.e_s.samples[i] + batch.e_v.samples[i]));
    for (int i = 0; i < sc.n(); i++) {
        double want = batch.e_s.samples[i] + batch.e_v.samples[i];
        CHECK(std::fabs(loop.e.samples[i] - want) <= 1e-10 * std::max(1.0, scale));
    }
}

TEST_CASE("closed loop requires a delayed secondary path") {
    auto cfg = small_scene();
    auto sc = scenario::realize_scene(cfg, 6);
    ControlFilter w;
    w.L_w = 4;
    w.w.assign((size_t)(sc.K() + 1) * 4, 0.0);
    std::vector<double> bad_g = {1.0, 0.2};
    CHECK_THROWS_AS(scenario::closed_loop_sim(sc, w, bad_g, bad_g), std::invalid_argument);
}

TEST_CASE("wav files round-trip") {
    Signal s;
    s.sample_rate_hz = 16000;
    s.samples = {0.0, 0.25, -0.5, 1.0, -1.0, 0.125};
    scenario::write_wav_mono("roundtrip_test.wav", s);
    auto r = scenario::read_wav_mono("roundtrip_test.wav");
    CHECK(r.sample_rate_hz == 16000);
    REQUIRE(r.samples.size() == s.samples.size());
    for (size_t i = 0; i < s.samples.size(); i++)
        CHECK(r.samples[i] == doctest::Approx(s.samples[i]).epsilon(1e-7));
    std::remove("roundtrip_test.wav");
}

TEST_CASE("impulse responses round-trip through text files") {
    std::vector<double> h = {1.0, -0.333333333333333315, 1e-17, 0.7071067811865476};
    scenario::save_ir_text("ir_roundtrip.txt", h);
    auto r = scenario::load_ir_text("ir_roundtrip.txt");
    REQUIRE(r.size() == h.size());
    for (size_t i = 0; i < h.size(); i++) CHECK(r[i] == h[i]);
    std::remove("ir_roundtrip.txt");
}
