#pragma once

#include <complex>
#include <vector>

namespace music::detail {

// Unnormalized DFT of length data.size(): out[n] = sum_k in[k] exp(sign * 2 pi i k n / N).
// Plans are cached per (size, sign); execution is reentrant.
void dft(const std::complex<double>* in, std::complex<double>* out, int n, int sign);

inline void dft_inplace(std::vector<std::complex<double>>& data, int sign) {
  dft(data.data(), data.data(), static_cast<int>(data.size()), sign);
}

// Smallest size >= n of the form 2^a 3^b 5^c.
int good_fft_size(int n);

}  // namespace music::detail
