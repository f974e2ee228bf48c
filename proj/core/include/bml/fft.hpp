#pragma once

#include <complex>
#include <cstddef>
#include <span>

#include "bml/grid.hpp"

namespace bml {

/// Raw n x n real-to-complex transform (unnormalised, FFTW sign convention).
/// `out` holds n*(n/2+1) coefficients. Plans are cached per size and built
/// with FFTW_ESTIMATE so repeated runs execute identical code paths.
void fft_r2c(std::size_t n, std::span<const double> in, std::span<std::complex<double>> out);

/// Raw n x n complex-to-real transform (unnormalised). `in` is not modified.
void fft_c2r(std::size_t n, std::span<const std::complex<double>> in, std::span<double> out);

/// Normalised forward transform; rejects non-finite samples.
SpectralField forward_transform(const RealField& f);

RealField inverse_transform(const SpectralField& f, std::string label = {});

}  // namespace bml
