#pragma once

#include <complex>
#include <span>
#include <vector>

namespace lct::fft {

using cplx = std::complex<double>;

/// Unnormalized multidimensional DFT of a row-major array, in place.
/// Forward uses exp(−i·2πk·m/N); `inverse` flips the sign and does not scale.
void dft(std::vector<cplx>& data, std::span<const int> dims, bool inverse = false);

/// Forward real-to-complex DFT; the last axis of the result has N/2+1 entries.
std::vector<cplx> rdft(const std::vector<double>& in, std::span<const int> dims);

}  // namespace lct::fft
