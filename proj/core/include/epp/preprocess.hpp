#pragma once

#include "epp/common.hpp"
#include "epp/data.hpp"

#include <string>
#include <vector>

namespace epp {

/// Fitted centering/scaling (and optional whitening) transform.
///
/// Scores are computed as Z = ((X - center) / scale) * whitener. When the data
/// is not sphered the whitener is empty and treated as the p x p identity.
struct Preprocessor {
    Vector center;
    Vector scale;
    Matrix whitener;   // p x rank, empty when !sphered
    int rank = 0;
    bool sphered = false;
    std::vector<std::string> warnings;

    [[nodiscard]] Eigen::Index input_dim() const { return center.size(); }
    [[nodiscard]] Eigen::Index output_dim() const { return rank; }
};

/// Column sd below this is treated as constant: centered but left unscaled.
inline constexpr double kDegenerateScale = 1e-12;
/// Covariance eigenvalues at or below this are discarded by whitening.
inline constexpr double kRankTolerance = 1e-6;

struct Fitted {
    Matrix z;
    Preprocessor preprocessor;
};

/// Centers by column means and scales by sample sd (denominator n - 1).
Fitted standardize(const Matrix& x);

/// Standardizes, then whitens via the SVD of the standardized matrix so that
/// the scores have identity sample covariance in r = #{eigenvalues > tol} dims.
Fitted whiten_svd(const Matrix& x, double tol = kRankTolerance);

inline Fitted prepare(const Matrix& x, bool sphere) { return sphere ? whiten_svd(x) : standardize(x); }

/// Applies a fitted transform to new rows without refitting.
Matrix transform(const Preprocessor& pp, const Matrix& xnew);

/// Maps a unit direction in score space back to a unit, sign-canonical
/// direction on the centered raw columns.
Vector to_original_coords(const Preprocessor& pp, const Vector& u);

} // namespace epp
