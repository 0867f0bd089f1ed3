#pragma once

#include <string>
#include <vector>

#include "music/subspace.hpp"

namespace music {

enum class AmplitudeMethod { Quadratic, LeastSquares };

AmplitudeMethod parse_amplitude_method(const std::string& name);

// Moore-Penrose pseudoinverse; singular values below 1e-12 sigma_1 count as zero.
// Throws Degenerate if that drops the rank below the column count and require_full_rank is set.
Matrix pseudoinverse(const Matrix& a, bool require_full_rank = true);

// diag(P T P*) with P the pseudoinverse of Phi(m, xhat). Entry j pairs with xhat[j].
std::vector<cdouble> quadratic_amplitudes(const std::vector<double>& xhat, const ToeplitzMatrix& t);

// Minimum-norm solution of min_u ||y - Phi(2m-1, xhat) u||_2.
std::vector<cdouble> least_squares_amplitudes(const std::vector<double>& xhat, const SampleVector& y);

}  // namespace music
