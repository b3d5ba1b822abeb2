#include "ssanc/reir.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ssanc::reir {

ChannelEstimate estimate_reir_channel(const std::vector<double>& reference,
                                      const std::vector<double>& target, int L_a, int L_h,
                                      const LmsConfig& cfg, int sample_rate_hz) {
    require(L_a >= 0 && L_h >= 1, "reir: need L_a >= 0 and L_h >= 1");
    require(cfg.step_size > 0.0 && cfg.step_size < 2.0, "reir: step size must be in (0,2)");
    require(reference.size() == target.size(), "reir: channel length mismatch");
    int Lt = L_a + L_h;
    int n = (int)reference.size();
    require(n > 4 * Lt, "reir: probe too short for the requested tap count");
    int win = (int)std::llround(cfg.convergence_window_s * sample_rate_hz);
    require(win >= 4, "reir: convergence window too short");
    int step = win / 4;

    // reversed reference window kept incrementally; taps[j] models lag j - L_a
    std::vector<double> h(Lt, 0.0), ema(Lt, 0.0), xw(Lt, 0.0);
    double corr = 0.0;
    double xnorm2 = 0.0;
    double a = 1.0 / win;
    double mu = cfg.step_size;
    std::vector<std::vector<double>> snaps;  // every quarter window
    ChannelEstimate out;
    for (int t = 0; t < n; t++) {
        double leaving = xw[Lt - 1];
        xnorm2 -= leaving * leaving;
        for (int j = Lt - 1; j > 0; j--) xw[j] = xw[j - 1];
        xw[0] = reference[t];
        xnorm2 += xw[0] * xw[0];
        if (xnorm2 < 0.0) xnorm2 = 0.0;
        double d = (t >= L_a) ? target[t - L_a] : 0.0;
        double e = d;
        for (int j = 0; j < Lt; j++) e -= h[j] * xw[j];
        double k = mu * e / (1e-20 + xnorm2);
        for (int j = 0; j < Lt; j++) {
            h[j] += k * xw[j];
            ema[j] += a * (h[j] - ema[j]);
        }
        corr += a * (1.0 - corr);
        if ((t + 1) % step == 0) {
            snaps.push_back(h);
            if ((int)snaps.size() >= 5) {
                const std::vector<double>& old = snaps[snaps.size() - 5];
                double dn = 0.0, hn = 0.0;
                for (int j = 0; j < Lt; j++) {
                    double dd = h[j] - old[j];
                    dn += dd * dd;
                    hn += h[j] * h[j];
                }
                out.final_change = std::sqrt(dn) / std::max(std::sqrt(hn), 1e-300);
                if (out.final_change < cfg.convergence_threshold) {
                    out.converged = true;
                    out.fir = AcausalFir{h, L_a, L_h};
                    return out;
                }
            }
        }
    }
    // not converged: hand back the bias-corrected average, which tracks the
    // Wiener solution even when the steady state keeps fluctuating
    for (int j = 0; j < Lt; j++) ema[j] /= std::max(corr, 1e-300);
    out.converged = false;
    out.fir = AcausalFir{ema, L_a, L_h};
    return out;
}

std::vector<AcausalFir> estimate_reirs(const scenario::SceneRealization& probe,
                                       int reference_channel, int L_a, int L_h,
                                       const LmsConfig& cfg, uint64_t seed) {
    (void)seed;
    int K = probe.K();
    require(reference_channel >= 0 && reference_channel < K,
            "reir: reference channel out of range");
    const std::vector<double>& ref = probe.x_s.ch[reference_channel];
    std::vector<ChannelEstimate> est((size_t)K + 1);
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k <= K; k++) {
        const std::vector<double>& tgt = (k < K) ? probe.x_s.ch[k] : probe.p_s.samples;
        est[k] = estimate_reir_channel(ref, tgt, L_a, L_h, cfg, probe.fs());
    }
    std::vector<AcausalFir> out;
    double worst = 0.0;
    int worst_k = -1;
    for (int k = 0; k <= K; k++) {
        out.push_back(est[k].fir);
        if (!est[k].converged && est[k].final_change > worst) {
            worst = est[k].final_change;
            worst_k = k;
        }
    }
    if (worst_k >= 0) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "reir: channel %d did not converge (relative tap change %.3g, "
                      "threshold %.3g)",
                      worst_k, worst, cfg.convergence_threshold);
        throw convergence_failure(buf, worst, out);
    }
    return out;
}

double misalignment_db(const AcausalFir& h_hat, const AcausalFir& h_true) {
    int lo = -std::max(h_hat.L_a, h_true.L_a);
    int hi = std::max(h_hat.L_h, h_true.L_h);
    double dn = 0.0, tn = 0.0;
    for (int lag = lo; lag < hi; lag++) {
        double d = h_hat.at_lag(lag) - h_true.at_lag(lag);
        dn += d * d;
        tn += h_true.at_lag(lag) * h_true.at_lag(lag);
    }
    require(tn > 0.0, "misalignment: true response is zero");
    if (dn == 0.0) return -300.0;
    double db = 10.0 * std::log10(dn / tn);
    return std::max(db, -300.0);
}

void save_reir(const std::string& path, const AcausalFir& h) {
    std::ofstream f(path);
    if (!f) throw io_failure("cannot write reir: " + path);
    f << "L_a=" << h.L_a << " L_h=" << h.L_h << "\n";
    char buf[80];
    for (int i = 0; i < (int)h.taps.size(); i++) {
        std::snprintf(buf, sizeof buf, "%d %.17g\n", i - h.L_a, h.taps[i]);
        f << buf;
    }
}

AcausalFir load_reir(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw io_failure("cannot open reir: " + path);
    std::string header;
    std::getline(f, header);
    AcausalFir h;
    if (std::sscanf(header.c_str(), "L_a=%d L_h=%d", &h.L_a, &h.L_h) != 2)
        throw io_failure("reir header malformed: " + path);
    require(h.L_a >= 0 && h.L_h >= 1 && h.L_a + h.L_h >= 1, "reir header out of range");
    h.taps.assign((size_t)h.L_a + h.L_h, 0.0);
    std::string line;
    while (std::getline(f, line)) {
        std::istringstream ss(line);
        int lag;
        double v;
        if (!(ss >> lag >> v)) continue;
        int i = lag + h.L_a;
        require(i >= 0 && i < (int)h.taps.size(), "reir lag outside declared range");
        h.taps[i] = v;
    }
    return h;
}

}  // namespace ssanc::reir
