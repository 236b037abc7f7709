#pragma once

#include <complex>
#include <vector>

namespace cliporg {

/// In-place iterative radix-2 FFT. data.size() must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& data);

}  // namespace cliporg
