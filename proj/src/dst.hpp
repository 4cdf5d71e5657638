#pragma once

namespace fle::detail {

/// Unnormalised DST-I (FFTW RODFT00) along every axis of an n0 x n1 array
/// stored with axis 0 fastest.  n1 == 1 selects the 1D transform.
void dst1(const double* in, double* out, int n0, int n1);

} // namespace fle::detail
