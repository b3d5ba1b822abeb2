#pragma once

#include <array>
#include <string>
#include <vector>

#include "ssanc/common.hpp"

namespace ssanc::scenario {

struct SourceSpec {
    double azimuth_deg = 0.0;
    std::string kind = "white";  // white | ar1 | multitone | wav
    uint64_t seed = 0;
    double level = 1.0;  // relative level among noise sources
    std::string wav_path;
};

struct GSpec {
    int length = 64;
    int bulk_delay = 2;
    double decay_ms = 5.0;
    bool minphase = false;
    uint64_t seed = 3;
};

struct SceneConfig {
    int sample_rate_hz = 16000;
    double duration_s = 3.0;
    int K = 2;
    std::vector<std::array<double, 3>> mic_pos;  // meters
    std::array<double, 3> err_pos = {0, 0, 0};
    double err_extra_delay_samples = 0.0;  // earpiece propagation into the ear
    double source_radius_m = 2.0;
    SourceSpec desired;
    std::vector<SourceSpec> noises;
    double target_leakage_snr_db = -5.0;
    GSpec g;
    int reference_channel = 0;
    // optional explicit desired-source paths: K mic FIRs then the error-mic FIR;
    // empty means synthesize from geometry
    std::vector<std::vector<double>> desired_paths;
};

struct SceneRealization {
    MultichannelSignal x_s, x_v;  // speech / noise components at outer mics
    Signal p_s, p_v;              // leakage components
    std::vector<double> g;
    int reference_channel = 0;
    std::vector<std::string> warnings;
    int K() const { return (int)x_s.ch.size(); }
    int n() const { return (int)p_s.samples.size(); }
    int fs() const { return p_s.sample_rate_hz; }
};

std::array<double, 3> source_position(double azimuth_deg, double radius_m);

// fractional-delay FIR with 1/max(r,0.1) gain; extra_delay in samples
std::vector<double> propagation_fir(const std::array<double, 3>& src,
                                    const std::array<double, 3>& mic, int fs,
                                    double extra_delay = 0.0);

// per-source path sets: desired first, then noises; each entry holds K mic
// paths followed by the error-mic path
std::vector<std::vector<std::vector<double>>> synth_paths(const SceneConfig& cfg);

std::vector<double> make_secondary_path(const GSpec& spec, int fs);

std::vector<double> generate_source(const SourceSpec& spec, int n, int fs, uint64_t mixed_seed);

SceneRealization realize_scene(const SceneConfig& cfg, uint64_t seed);

// probe realization for ReIR estimation: desired position/paths, white source
SceneRealization probe_scene(const SceneConfig& cfg, uint64_t seed, double duration_s);

// p_hat(n) = e(n) - ghat' [y(n) .. y(n-L_g+1)]
Signal estimate_leakage(const Signal& e, const Signal& y, const std::vector<double>& g_hat);

struct ControlOutput {
    Signal e_s, e_v, target;
};

// component-wise error signals via convolution with q + G w, plus the
// high-passed Delta-delayed reference speech
ControlOutput apply_control(const SceneRealization& scene, const ControlFilter& w,
                            const std::vector<double>& g, const std::vector<double>& hp,
                            int Delta);

struct ClosedLoopOutput {
    Signal e, y, p_hat, p;
};

// sample-by-sample loop; requires g[0] == 0 so the loop is well posed
ClosedLoopOutput closed_loop_sim(const SceneRealization& scene, const ControlFilter& w,
                                 const std::vector<double>& g, const std::vector<double>& g_hat);

Signal read_wav_mono(const std::string& path);
void write_wav_mono(const std::string& path, const Signal& s);

void save_ir_text(const std::string& path, const std::vector<double>& taps);
std::vector<double> load_ir_text(const std::string& path);

}  // namespace ssanc::scenario
