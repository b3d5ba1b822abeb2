#include "ssanc/metrics.hpp"

#include <cmath>
#include <limits>

#include "ssanc/dsp.hpp"

namespace ssanc::metrics {

static double energy(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

SpeechDistortion speech_distortion(const Signal& e_s, const Signal& target,
                                   const bands::ThirdOctaveBands& bt, int segment_len) {
    require(e_s.samples.size() == target.samples.size(), "speech_distortion: length mismatch");
    require(e_s.sample_rate_hz == target.sample_rate_hz,
            "speech_distortion: sample rate mismatch");
    int n = (int)target.samples.size();
    require(n >= segment_len, "speech_distortion: signal shorter than one PSD segment");

    std::vector<double> eps(n);
    for (int i = 0; i < n; i++) eps[i] = e_s.samples[i] - target.samples[i];
    dsp::PsdEstimate pe = dsp::welch_psd(Signal{eps, e_s.sample_rate_hz}, segment_len, 0.5);
    dsp::PsdEstimate pr = dsp::welch_psd(target, segment_len, 0.5);

    int B = bt.count();
    std::vector<double> ref_power = bands::third_octave_power(pr, bt);
    std::vector<double> err_power = bands::third_octave_power(pe, bt);
    double total_ref = 0.0;
    for (int b = 0; b < B; b++) total_ref += ref_power[b];
    require(total_ref > 0.0, "speech_distortion: target is silent in every band");

    SpeechDistortion out;
    out.band_breakdown.assign(B, std::numeric_limits<double>::quiet_NaN());
    double sd = 0.0, wsum = 0.0;
    for (int b = 0; b < B; b++) {
        if (ref_power[b] < 1e-12 * total_ref) {
            out.bands_excluded = true;
            continue;
        }
        double ratio = std::max(err_power[b] / ref_power[b], 1e-10);
        out.band_breakdown[b] = 10.0 * std::log10(ratio);
        sd += bt.importance[b] * out.band_breakdown[b];
        wsum += bt.importance[b];
    }
    require(wsum > 0.0, "speech_distortion: no usable bands");
    out.sd_db = std::max(sd / wsum, -100.0);
    return out;
}

double noise_reduction(const Signal& p_v, const Signal& e_v, bool* capped) {
    require(p_v.samples.size() == e_v.samples.size(), "noise_reduction: length mismatch");
    double ep = energy(p_v.samples), ee = energy(e_v.samples);
    if (capped) *capped = false;
    if (ep == 0.0 && ee == 0.0) return 0.0;  // no noise at all; nothing reduced
    if (ee == 0.0) {
        if (capped) *capped = true;
        return 300.0;
    }
    if (ep == 0.0) {
        if (capped) *capped = true;
        return -300.0;
    }
    return 10.0 * std::log10(ep) - 10.0 * std::log10(ee);
}

double snr_improvement(const Signal& e_s, const Signal& e_v, const Signal& p_s,
                       const Signal& p_v, bool* capped) {
    require(e_s.samples.size() == e_v.samples.size() &&
                p_s.samples.size() == p_v.samples.size(),
            "snr_improvement: length mismatch");
    double es = energy(e_s.samples), ev = energy(e_v.samples);
    double ps = energy(p_s.samples), pv = energy(p_v.samples);
    if (capped) *capped = false;
    if (ev == 0.0 && es == 0.0 && pv == 0.0 && ps == 0.0) return 0.0;
    if (ev == 0.0 || pv == 0.0 || es == 0.0 || ps == 0.0) {
        if (capped) *capped = true;
        double sig = 0.0;
        if (ev == 0.0 || ps == 0.0) sig += 1.0;
        if (pv == 0.0 || es == 0.0) sig -= 1.0;
        return sig >= 0.0 ? 300.0 : -300.0;
    }
    return 10.0 * std::log10(es / ev) - 10.0 * std::log10(ps / pv);
}

MetricReport evaluate(const scenario::ControlOutput& out, const Signal& p_s, const Signal& p_v,
                      const bands::ThirdOctaveBands& bt, int trim) {
    require(trim >= 0, "evaluate: negative trim");
    int n = (int)out.e_s.samples.size();
    require(trim < n, "evaluate: trim removes the whole signal");
    auto cut = [&](const Signal& s) {
        return Signal{std::vector<double>(s.samples.begin() + trim, s.samples.end()),
                      s.sample_rate_hz};
    };
    Signal e_s = cut(out.e_s), e_v = cut(out.e_v), target = cut(out.target);
    Signal ps = cut(p_s), pv = cut(p_v);
    MetricReport rep;
    rep.n_samples = (int)e_s.samples.size();
    SpeechDistortion sd = speech_distortion(e_s, target, bt);
    rep.sd_db = sd.sd_db;
    rep.band_breakdown = std::move(sd.band_breakdown);
    rep.bands_excluded = sd.bands_excluded;
    rep.nr_db = noise_reduction(pv, e_v, &rep.nr_capped);
    rep.dsnr_db = snr_improvement(e_s, e_v, ps, pv, &rep.dsnr_capped);
    return rep;
}

}  // namespace ssanc::metrics
