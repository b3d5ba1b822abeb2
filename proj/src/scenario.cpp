#include "ssanc/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ssanc/dsp.hpp"

namespace ssanc::scenario {

static const double kPi = 3.14159265358979323846264338327950288;
static const double kSpeedOfSound = 343.0;  // m/s

std::array<double, 3> source_position(double azimuth_deg, double radius_m) {
    double a = azimuth_deg * kPi / 180.0;
    return {radius_m * std::cos(a), radius_m * std::sin(a), 0.0};
}

std::vector<double> propagation_fir(const std::array<double, 3>& src,
                                    const std::array<double, 3>& mic, int fs,
                                    double extra_delay) {
    double dx = src[0] - mic[0], dy = src[1] - mic[1], dz = src[2] - mic[2];
    double r = std::sqrt(dx * dx + dy * dy + dz * dz);
    require(r > 1e-9, "propagation_fir: source and microphone coincide");
    double delay = r / kSpeedOfSound * fs + extra_delay;
    double gain = 1.0 / std::max(r, 0.1);
    std::vector<double> taps = dsp::fractional_delay_fir(delay, 16);
    for (double& t : taps) t *= gain;
    return taps;
}

std::vector<std::vector<std::vector<double>>> synth_paths(const SceneConfig& cfg) {
    require((int)cfg.mic_pos.size() == cfg.K, "scene: mic position count != K");
    std::vector<std::vector<std::vector<double>>> out;
    auto paths_for = [&](const SourceSpec& s) {
        std::vector<std::vector<double>> p;
        auto pos = source_position(s.azimuth_deg, cfg.source_radius_m);
        for (int k = 0; k < cfg.K; k++)
            p.push_back(propagation_fir(pos, cfg.mic_pos[k], cfg.sample_rate_hz));
        p.push_back(propagation_fir(pos, cfg.err_pos, cfg.sample_rate_hz,
                                    cfg.err_extra_delay_samples));
        return p;
    };
    if (!cfg.desired_paths.empty()) {
        require((int)cfg.desired_paths.size() == cfg.K + 1,
                "scene: desired_paths must hold K mic paths plus the error path");
        out.push_back(cfg.desired_paths);
    } else {
        out.push_back(paths_for(cfg.desired));
    }
    for (const auto& nz : cfg.noises) out.push_back(paths_for(nz));
    return out;
}

std::vector<double> make_secondary_path(const GSpec& spec, int fs) {
    require(spec.length > spec.bulk_delay, "secondary path: length must exceed bulk delay");
    require(spec.decay_ms > 0.0, "secondary path: decay must be positive");
    int n_tail = spec.length - spec.bulk_delay;
    Rng rng(spec.seed);
    std::vector<double> tail(n_tail);
    for (double& t : tail) t = rng.next_gauss();
    if (spec.minphase) tail = dsp::min_phase_fold(tail, 1 << 15, 1e-6, n_tail);
    double tau = spec.decay_ms * 1e-3 * fs;
    for (int i = 0; i < n_tail; i++) tail[i] *= std::exp(-i / tau);
    std::vector<double> g(spec.length, 0.0);
    for (int i = 0; i < n_tail; i++) g[spec.bulk_delay + i] = tail[i];
    double nrm = 0.0;
    for (double v : g) nrm += v * v;
    nrm = std::sqrt(nrm);
    require(nrm > 0.0, "secondary path: zero impulse response");
    for (double& v : g) v /= nrm;
    return g;
}

static std::vector<double> multitone(int n, int fs, Rng& rng) {
    static const double freqs[5] = {315.0, 700.0, 1250.0, 2500.0, 4400.0};
    std::vector<double> x(n, 0.0);
    for (double f : freqs) {
        double ph = rng.next_unit() * 2.0 * kPi;
        for (int i = 0; i < n; i++) x[i] += std::sin(2.0 * kPi * f * i / fs + ph);
    }
    return x;
}

std::vector<double> generate_source(const SourceSpec& spec, int n, int fs, uint64_t mixed_seed) {
    std::vector<double> x;
    if (spec.kind == "wav") {
        Signal s = read_wav_mono(spec.wav_path);
        require(s.sample_rate_hz == fs, "wav source: sample rate mismatch");
        require((int)s.samples.size() >= n, "wav source: file shorter than scene duration");
        x.assign(s.samples.begin(), s.samples.begin() + n);
    } else {
        Rng rng(mixed_seed);
        if (spec.kind == "multitone") {
            x = multitone(n, fs, rng);
        } else if (spec.kind == "white" || spec.kind == "ar1") {
            x.resize(n);
            for (double& v : x) v = rng.next_gauss();
            if (spec.kind == "ar1") {
                double acc = 0.0;
                for (int i = 0; i < n; i++) {
                    acc = 0.95 * acc + x[i];
                    x[i] = acc;
                }
            }
        } else {
            throw std::invalid_argument("unknown source kind: " + spec.kind);
        }
    }
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    double sd = std::sqrt(var / n);
    require(sd > 0.0, "source signal is silent");
    for (double& v : x) v /= sd;
    return x;
}

static std::vector<double> conv_trunc(const std::vector<double>& sig,
                                      const std::vector<double>& fir, int n) {
    std::vector<double> full = dsp::convolve(sig, fir);
    full.resize(n);
    return full;
}

SceneRealization realize_scene(const SceneConfig& cfg, uint64_t seed) {
    require(cfg.K >= 1, "scene: K must be >= 1");
    require(cfg.duration_s > 0.0, "scene: duration must be positive");
    require(cfg.sample_rate_hz > 0, "scene: sample rate must be positive");
    require(cfg.reference_channel >= 0 && cfg.reference_channel < cfg.K,
            "scene: reference channel out of range");
    int n = (int)std::llround(cfg.duration_s * cfg.sample_rate_hz);
    int fs = cfg.sample_rate_hz;
    auto paths = synth_paths(cfg);

    SceneRealization sc;
    sc.reference_channel = cfg.reference_channel;
    sc.x_s.sample_rate_hz = fs;
    sc.x_v.sample_rate_hz = fs;
    sc.p_s.sample_rate_hz = fs;
    sc.p_v.sample_rate_hz = fs;
    sc.g = make_secondary_path(cfg.g, fs);

    std::vector<double> s_sig =
        generate_source(cfg.desired, n, fs, mix_seed(seed, cfg.desired.seed));
    for (int k = 0; k < cfg.K; k++) sc.x_s.ch.push_back(conv_trunc(s_sig, paths[0][k], n));
    sc.p_s.samples = conv_trunc(s_sig, paths[0][cfg.K], n);

    sc.x_v.ch.assign(cfg.K, std::vector<double>(n, 0.0));
    sc.p_v.samples.assign(n, 0.0);
    if (cfg.noises.empty()) {
        sc.warnings.push_back("no noise sources: SNR scaling skipped");
        return sc;
    }

    // per-source equal energy at the error mic, then the relative level,
    // then one global gain for the target leakage SNR
    std::vector<std::vector<std::vector<double>>> xv_per;
    std::vector<std::vector<double>> pv_per;
    for (size_t j = 0; j < cfg.noises.size(); j++) {
        const SourceSpec& nz = cfg.noises[j];
        std::vector<double> z = generate_source(nz, n, fs, mix_seed(seed, nz.seed + 1000 * j));
        const auto& p = paths[1 + j];
        std::vector<std::vector<double>> xv;
        for (int k = 0; k < cfg.K; k++) xv.push_back(conv_trunc(z, p[k], n));
        pv_per.push_back(conv_trunc(z, p[cfg.K], n));
        xv_per.push_back(std::move(xv));
    }
    double e0 = 0.0;
    for (double v : pv_per[0]) e0 += v * v;
    require(e0 > 0.0, "first noise source contributes no energy at the error mic");
    for (size_t j = 0; j < pv_per.size(); j++) {
        double ej = 0.0;
        for (double v : pv_per[j]) ej += v * v;
        require(ej > 0.0, "noise source contributes no energy at the error mic");
        double s = cfg.noises[j].level * std::sqrt(e0 / ej);
        for (int k = 0; k < cfg.K; k++)
            for (int i = 0; i < n; i++) sc.x_v.ch[k][i] += s * xv_per[j][k][i];
        for (int i = 0; i < n; i++) sc.p_v.samples[i] += s * pv_per[j][i];
    }
    double es = 0.0, ev = 0.0;
    for (double v : sc.p_s.samples) es += v * v;
    for (double v : sc.p_v.samples) ev += v * v;
    require(es > 0.0, "desired source is silent at the error mic: SNR scaling undefined");
    require(ev > 0.0, "mixed noise is silent at the error mic");
    double alpha = std::sqrt(es / (ev * std::pow(10.0, cfg.target_leakage_snr_db / 10.0)));
    for (int k = 0; k < cfg.K; k++)
        for (double& v : sc.x_v.ch[k]) v *= alpha;
    for (double& v : sc.p_v.samples) v *= alpha;
    return sc;
}

SceneRealization probe_scene(const SceneConfig& cfg, uint64_t seed, double duration_s) {
    SceneConfig pc = cfg;
    pc.noises.clear();
    pc.desired.kind = "white";
    pc.desired.wav_path.clear();
    pc.duration_s = duration_s;
    return realize_scene(pc, mix_seed(seed, 0x9806e));
}

Signal estimate_leakage(const Signal& e, const Signal& y, const std::vector<double>& g_hat) {
    require(e.sample_rate_hz == y.sample_rate_hz, "estimate_leakage: sample rate mismatch");
    require(e.samples.size() == y.samples.size(), "estimate_leakage: length mismatch");
    int n = (int)e.samples.size();
    int lg = (int)g_hat.size();
    Signal p{std::vector<double>(n, 0.0), e.sample_rate_hz};
    for (int i = 0; i < n; i++) {
        double d = 0.0;
        for (int j = 0; j < lg && j <= i; j++) d += g_hat[j] * y.samples[i - j];
        p.samples[i] = e.samples[i] - d;
    }
    return p;
}

ControlOutput apply_control(const SceneRealization& scene, const ControlFilter& w,
                            const std::vector<double>& g, const std::vector<double>& hp,
                            int Delta) {
    int K = scene.K();
    require(w.blocks() == K + 1, "apply_control: control filter block count != K+1");
    int n = scene.n();
    int L = (int)g.size() + w.L_w - 1;
    // r = q + G w, one length-L block per channel; q selects the leakage block
    std::vector<std::vector<double>> r((size_t)K + 1);
    for (int k = 0; k <= K; k++) {
        std::vector<double> wk(w.w.begin() + (size_t)k * w.L_w,
                               w.w.begin() + (size_t)(k + 1) * w.L_w);
        r[k] = dsp::convolve(g, wk);
        r[k].resize(L, 0.0);
    }
    r[K][0] += 1.0;

    ControlOutput out;
    out.e_s.sample_rate_hz = out.e_v.sample_rate_hz = out.target.sample_rate_hz = scene.fs();
    out.e_s.samples.assign(n, 0.0);
    out.e_v.samples.assign(n, 0.0);
    for (int k = 0; k <= K; k++) {
        const std::vector<double>& cs = (k < K) ? scene.x_s.ch[k] : scene.p_s.samples;
        const std::vector<double>& cv = (k < K) ? scene.x_v.ch[k] : scene.p_v.samples;
        for (int i = 0; i < L; i++) {
            double ri = r[k][i];
            if (ri == 0.0) continue;
            for (int t = i; t < n; t++) {
                out.e_s.samples[t] += ri * cs[t - i];
                out.e_v.samples[t] += ri * cv[t - i];
            }
        }
    }
    std::vector<double> tgt(n, 0.0);
    const std::vector<double>& ref = scene.x_s.ch[scene.reference_channel];
    for (int i = Delta; i < n; i++) tgt[i] = ref[i - Delta];
    out.target.samples = conv_trunc(tgt, hp, n);
    return out;
}

ClosedLoopOutput closed_loop_sim(const SceneRealization& scene, const ControlFilter& w,
                                 const std::vector<double>& g, const std::vector<double>& g_hat) {
    int K = scene.K();
    require(w.blocks() == K + 1, "closed_loop_sim: control filter block count != K+1");
    require(!g.empty() && g[0] == 0.0,
            "closed_loop_sim: g must have at least one sample of bulk delay");
    int n = scene.n();
    int lw = w.L_w;
    int lg = (int)g.size();
    ClosedLoopOutput out;
    out.e.sample_rate_hz = out.y.sample_rate_hz = out.p_hat.sample_rate_hz =
        out.p.sample_rate_hz = scene.fs();
    out.e.samples.assign(n, 0.0);
    out.y.samples.assign(n, 0.0);
    out.p_hat.samples.assign(n, 0.0);
    out.p.samples.assign(n, 0.0);
    const double* wp = w.w.data();
    for (int t = 0; t < n; t++) {
        double p = scene.p_s.samples[t] + scene.p_v.samples[t];
        out.p.samples[t] = p;
        double fb = 0.0;  // g' y window; g[0] = 0 so y(t) itself is not needed
        for (int j = 1; j < lg && j <= t; j++) fb += g[j] * out.y.samples[t - j];
        out.e.samples[t] = p + fb;
        double fb_hat = 0.0;
        int lgh = (int)g_hat.size();
        for (int j = 1; j < lgh && j <= t; j++) fb_hat += g_hat[j] * out.y.samples[t - j];
        out.p_hat.samples[t] = out.e.samples[t] - fb_hat;
        double y = 0.0;
        for (int k = 0; k < K; k++) {
            const std::vector<double>& xk = scene.x_s.ch[k];
            const std::vector<double>& xv = scene.x_v.ch[k];
            const double* wk = wp + (size_t)k * lw;
            for (int j = 0; j < lw && j <= t; j++) y += wk[j] * (xk[t - j] + xv[t - j]);
        }
        const double* wl = wp + (size_t)K * lw;
        for (int j = 0; j < lw && j <= t; j++) y += wl[j] * out.p_hat.samples[t - j];
        out.y.samples[t] = y;
    }
    return out;
}

Signal read_wav_mono(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_failure("cannot open wav: " + path);
    auto rd_u32 = [&]() {
        unsigned char b[4];
        f.read((char*)b, 4);
        return (uint32_t)b[0] | ((uint32_t)b[1] << 8) | ((uint32_t)b[2] << 16) |
               ((uint32_t)b[3] << 24);
    };
    auto rd_u16 = [&]() {
        unsigned char b[2];
        f.read((char*)b, 2);
        return (uint16_t)((uint16_t)b[0] | ((uint16_t)b[1] << 8));
    };
    char tag[5] = {0};
    f.read(tag, 4);
    if (std::strncmp(tag, "RIFF", 4) != 0) throw io_failure("not a RIFF file: " + path);
    rd_u32();
    f.read(tag, 4);
    if (std::strncmp(tag, "WAVE", 4) != 0) throw io_failure("not a WAVE file: " + path);
    uint16_t fmt = 0, channels = 0, bits = 0;
    uint32_t rate = 0;
    Signal s;
    while (f.read(tag, 4)) {
        uint32_t sz = rd_u32();
        if (std::strncmp(tag, "fmt ", 4) == 0) {
            fmt = rd_u16();
            channels = rd_u16();
            rate = rd_u32();
            rd_u32();
            rd_u16();
            bits = rd_u16();
            if (sz > 16) f.seekg(sz - 16, std::ios::cur);
        } else if (std::strncmp(tag, "data", 4) == 0) {
            require(channels == 1, "wav: only mono files are supported");
            if (fmt == 1 && bits == 16) {
                size_t cnt = sz / 2;
                s.samples.resize(cnt);
                for (size_t i = 0; i < cnt; i++) {
                    int16_t v = (int16_t)rd_u16();
                    s.samples[i] = v / 32768.0;
                }
            } else if (fmt == 3 && bits == 32) {
                size_t cnt = sz / 4;
                s.samples.resize(cnt);
                for (size_t i = 0; i < cnt; i++) {
                    uint32_t u = rd_u32();
                    float fv;
                    std::memcpy(&fv, &u, 4);
                    s.samples[i] = fv;
                }
            } else {
                throw io_failure("wav: unsupported format (need PCM16 or float32)");
            }
            break;
        } else {
            f.seekg(sz + (sz & 1), std::ios::cur);
        }
    }
    require(!s.samples.empty(), "wav: no data chunk: " + path);
    s.sample_rate_hz = (int)rate;
    return s;
}

void write_wav_mono(const std::string& path, const Signal& s) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io_failure("cannot write wav: " + path);
    auto wr_u32 = [&](uint32_t v) {
        unsigned char b[4] = {(unsigned char)(v & 0xff), (unsigned char)((v >> 8) & 0xff),
                              (unsigned char)((v >> 16) & 0xff), (unsigned char)((v >> 24) & 0xff)};
        f.write((char*)b, 4);
    };
    auto wr_u16 = [&](uint16_t v) {
        unsigned char b[2] = {(unsigned char)(v & 0xff), (unsigned char)((v >> 8) & 0xff)};
        f.write((char*)b, 2);
    };
    uint32_t data_bytes = (uint32_t)(s.samples.size() * 4);
    f.write("RIFF", 4);
    wr_u32(36 + data_bytes);
    f.write("WAVE", 4);
    f.write("fmt ", 4);
    wr_u32(16);
    wr_u16(3);  // IEEE float
    wr_u16(1);
    wr_u32((uint32_t)s.sample_rate_hz);
    wr_u32((uint32_t)s.sample_rate_hz * 4);
    wr_u16(4);
    wr_u16(32);
    f.write("data", 4);
    wr_u32(data_bytes);
    for (double v : s.samples) {
        float fv = (float)v;
        uint32_t u;
        std::memcpy(&u, &fv, 4);
        wr_u32(u);
    }
}

void save_ir_text(const std::string& path, const std::vector<double>& taps) {
    std::ofstream f(path);
    if (!f) throw io_failure("cannot write ir: " + path);
    f << "# one tap per line\n";
    char buf[64];
    for (double t : taps) {
        std::snprintf(buf, sizeof buf, "%.17g\n", t);
        f << buf;
    }
}

std::vector<double> load_ir_text(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw io_failure("cannot open ir: " + path);
    std::vector<double> taps;
    std::string line;
    while (std::getline(f, line)) {
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ss(line);
        double v;
        if (ss >> v) taps.push_back(v);
    }
    require(!taps.empty(), "ir file is empty: " + path);
    return taps;
}

}  // namespace ssanc::scenario
