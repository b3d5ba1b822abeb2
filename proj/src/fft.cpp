#include "ssanc/fft.hpp"

#include <cmath>

#include "ssanc/common.hpp"

namespace ssanc::fft {

static const double kPi = 3.14159265358979323846264338327950288;

int next_pow2(int n) {
    int p = 1;
    while (p < n) p <<= 1;
    return p;
}

void fft_pow2(std::vector<std::complex<double>>& x, bool inverse) {
    size_t n = x.size();
    require(n > 0 && (n & (n - 1)) == 0, "fft: length must be a power of two");
    // bit reversal
    for (size_t i = 1, j = 0; i < n; i++) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        double ang = 2.0 * kPi / (double)len * (inverse ? 1.0 : -1.0);
        std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (size_t k = 0; k < len / 2; k++) {
                std::complex<double> u = x[i + k];
                std::complex<double> v = x[i + k + len / 2] * w;
                x[i + k] = u + v;
                x[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& c : x) c /= (double)n;
}

std::vector<std::complex<double>> rfft(const std::vector<double>& x, int nfft) {
    require((int)x.size() <= nfft, "rfft: signal longer than nfft");
    std::vector<std::complex<double>> c(nfft);
    for (size_t i = 0; i < x.size(); i++) c[i] = x[i];
    fft_pow2(c, false);
    return c;
}

}  // namespace ssanc::fft
