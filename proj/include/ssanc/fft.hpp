#pragma once

#include <complex>
#include <vector>

namespace ssanc::fft {

// in-place iterative radix-2; n must be a power of two
void fft_pow2(std::vector<std::complex<double>>& x, bool inverse);

// forward DFT of a real signal zero-padded to nfft (power of two); full spectrum
std::vector<std::complex<double>> rfft(const std::vector<double>& x, int nfft);

int next_pow2(int n);

}  // namespace ssanc::fft
