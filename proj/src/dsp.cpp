#include "ssanc/dsp.hpp"

#include <cmath>
#include <complex>

#include "ssanc/fft.hpp"

namespace ssanc::dsp {

static const double kPi = 3.14159265358979323846264338327950288;

std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
    require(!a.empty() && !b.empty(), "convolve: empty input");
    std::vector<double> y(a.size() + b.size() - 1, 0.0);
    for (size_t i = 0; i < a.size(); i++) {
        double ai = a[i];
        if (ai == 0.0) continue;
        for (size_t j = 0; j < b.size(); j++) y[i + j] += ai * b[j];
    }
    return y;
}

Signal convolve(const Signal& a, const std::vector<double>& taps) {
    return Signal{convolve(a.samples, taps), a.sample_rate_hz};
}

static double sinc(double t) {
    if (t == 0.0) return 1.0;
    double pt = kPi * t;
    return std::sin(pt) / pt;
}

std::vector<double> fractional_delay_fir(double delay_samples, int half_width) {
    require(delay_samples >= 0.0, "fractional_delay_fir: negative delay");
    require(half_width >= 4, "fractional_delay_fir: half_width must be >= 4");
    int n = 2 * half_width + 1 + (int)std::ceil(delay_samples);
    std::vector<double> taps(n);
    double sum = 0.0;
    for (int i = 0; i < n; i++) {
        double t = i - half_width - delay_samples;
        double w = 0.0;
        if (std::fabs(t) <= half_width + 1)
            w = 0.5 * (1.0 + std::cos(kPi * t / (half_width + 1)));
        taps[i] = sinc(t) * w;
        sum += taps[i];
    }
    for (double& v : taps) v /= sum;
    return taps;
}

static double kaiser_beta(double a) {
    if (a > 50.0) return 0.1102 * (a - 8.7);
    if (a >= 21.0) return 0.5842 * std::pow(a - 21.0, 0.4) + 0.07886 * (a - 21.0);
    return 0.0;
}

static double bessel_i0(double x) {
    double s = 1.0, t = 1.0;
    for (int k = 1;; k++) {
        double u = x / (2.0 * k);
        t *= u * u;
        s += t;
        if (t < 1e-18 * s) break;
    }
    return s;
}

std::vector<double> linear_phase_highpass(double cutoff_hz, int order, int fs,
                                          double edge_factor, double atten_db) {
    require(order > 0 && order % 2 == 0, "highpass: order must be a positive even integer");
    require(cutoff_hz > 0.0 && cutoff_hz < fs / 2.0, "highpass: cutoff must lie below Nyquist");
    int M = order;
    double fc = edge_factor * cutoff_hz / fs;
    double beta = kaiser_beta(atten_db);
    double denom = bessel_i0(beta);
    std::vector<double> h(M + 1);
    for (int i = 0; i <= M; i++) {
        double t = i - M / 2.0;
        double lp = 2.0 * fc * sinc(2.0 * fc * t);
        double hp = -lp + (i == M / 2 ? 1.0 : 0.0);
        double arg = 1.0 - (2.0 * t / M) * (2.0 * t / M);
        double w = bessel_i0(beta * std::sqrt(arg > 0.0 ? arg : 0.0)) / denom;
        h[i] = hp * w;
    }
    return h;
}

std::vector<double> min_phase_fold(const std::vector<double>& h, int nfft, double floor_rel,
                                   int out_len) {
    require((int)h.size() <= nfft, "min_phase_fold: nfft too small");
    std::vector<std::complex<double>> X(nfft);
    for (size_t i = 0; i < h.size(); i++) X[i] = h[i];
    fft::fft_pow2(X, false);
    std::vector<std::complex<double>> logm(nfft);
    double mmax = 0.0;
    for (int i = 0; i < nfft; i++) mmax = std::max(mmax, std::abs(X[i]));
    require(mmax > 0.0, "min_phase_fold: all-zero input");
    for (int i = 0; i < nfft; i++) {
        double m = std::max(std::abs(X[i]), floor_rel * mmax);
        logm[i] = std::log(m);
    }
    fft::fft_pow2(logm, true);  // real cepstrum (imaginary parts cancel)
    std::vector<std::complex<double>> fold(nfft, 0.0);
    fold[0] = logm[0].real();
    for (int i = 1; i < nfft / 2; i++) fold[i] = 2.0 * logm[i].real();
    fold[nfft / 2] = logm[nfft / 2].real();
    fft::fft_pow2(fold, false);
    for (auto& c : fold) c = std::exp(c);
    fft::fft_pow2(fold, true);
    std::vector<double> out(out_len);
    for (int i = 0; i < out_len; i++) out[i] = fold[i].real();
    return out;
}

std::vector<double> min_phase_highpass(double cutoff_hz, int order, int sample_rate_hz) {
    std::vector<double> proto = linear_phase_highpass(cutoff_hz, order, sample_rate_hz);
    int M = order;
    int nfft = 1 << 15;
    // zero-phase amplitude A(w) = Re(H(w) e^{jwM/2}); a strictly positive
    // amplitude guarantees an exact finite minimum-phase counterpart, so lift
    // the center tap by twice the worst negative excursion
    std::vector<std::complex<double>> X(nfft);
    for (size_t i = 0; i < proto.size(); i++) X[i] = proto[i];
    fft::fft_pow2(X, false);
    double amin = 0.0;
    for (int i = 0; i <= nfft / 2; i++) {
        double w = 2.0 * kPi * i / nfft;
        double amp = (X[i] * std::polar(1.0, w * M / 2.0)).real();
        amin = std::min(amin, amp);
    }
    proto[M / 2] += 2.0 * (-amin);
    return min_phase_fold(proto, nfft, 1e-9, order + 1);
}

std::vector<double> hann_window(int n) {
    std::vector<double> w(n);
    for (int i = 0; i < n; i++) w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * i / n);
    return w;
}

PsdEstimate welch_psd(const Signal& s, int segment_len, double overlap_fraction) {
    require(segment_len > 0 && (segment_len & (segment_len - 1)) == 0,
            "welch_psd: segment length must be a power of two");
    require((int)s.samples.size() >= segment_len, "welch_psd: segment longer than signal");
    require(overlap_fraction >= 0.0 && overlap_fraction < 1.0,
            "welch_psd: overlap must be in [0,1)");
    int step = std::max(1, (int)(segment_len * (1.0 - overlap_fraction)));
    std::vector<double> w = hann_window(segment_len);
    double u = 0.0;
    for (double v : w) u += v * v;
    int nbins = segment_len / 2 + 1;
    int nsegs = (int)((s.samples.size() - segment_len) / step) + 1;
    std::vector<double> acc(nbins, 0.0);
    std::vector<std::complex<double>> seg(segment_len);
    for (int i = 0; i < nsegs; i++) {
        for (int j = 0; j < segment_len; j++)
            seg[j] = s.samples[(size_t)i * step + j] * w[j];
        fft::fft_pow2(seg, false);
        for (int j = 0; j < nbins; j++) acc[j] += std::norm(seg[j]);
    }
    double fs = s.sample_rate_hz;
    PsdEstimate out;
    out.resolution_hz = fs / segment_len;
    out.frequencies_hz.resize(nbins);
    out.power.resize(nbins);
    for (int j = 0; j < nbins; j++) {
        out.frequencies_hz[j] = j * out.resolution_hz;
        out.power[j] = acc[j] / (nsegs * u * fs);
        if (j > 0 && j < nbins - 1) out.power[j] *= 2.0;  // one-sided
    }
    return out;
}

double fir_mag_at(const std::vector<double>& taps, double freq_hz, double fs) {
    std::complex<double> h = 0.0;
    for (size_t n = 0; n < taps.size(); n++)
        h += taps[n] * std::polar(1.0, -2.0 * kPi * freq_hz * (double)n / fs);
    return std::abs(h);
}

}  // namespace ssanc::dsp
