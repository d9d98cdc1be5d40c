#include "epp/preprocess.hpp"

#include "epp/error.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace epp {

namespace {

Matrix center_and_scale(const Matrix& x, const Vector& center, const Vector& scale)
{
    return (x.rowwise() - center.transpose()).array().rowwise() / scale.transpose().array();
}

} // namespace

Fitted standardize(const Matrix& x)
{
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    if (n < 2) throw DataError("standardize needs at least 2 rows");
    if (p < 1) throw DataError("standardize needs at least 1 column");

    Fitted out;
    auto& pp = out.preprocessor;
    pp.center = x.colwise().mean().transpose();
    pp.scale.resize(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        const double ss = (x.col(j).array() - pp.center[j]).square().sum();
        const double sd = std::sqrt(ss / static_cast<double>(n - 1));
        if (sd < kDegenerateScale) {
            pp.scale[j] = 1.0;
            pp.warnings.push_back("column " + std::to_string(j + 1) + " is constant; centered but not scaled");
        } else {
            pp.scale[j] = sd;
        }
    }
    pp.rank = static_cast<int>(p);
    pp.sphered = false;
    out.z = center_and_scale(x, pp.center, pp.scale);
    return out;
}

Fitted whiten_svd(const Matrix& x, double tol)
{
    Fitted out = standardize(x);
    auto& pp = out.preprocessor;
    const double dof = static_cast<double>(x.rows() - 1);

    Eigen::BDCSVD<Matrix> svd(out.z, Eigen::ComputeThinV);
    const Vector& sv = svd.singularValues();  // descending
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv[i] * sv[i] / dof > tol) ++r;
    }
    if (r == 0) throw DataError("data has no variation");

    Matrix w = svd.matrixV().leftCols(r);
    for (int i = 0; i < r; ++i) {
        canonicalize_sign(w.col(i));
        w.col(i) *= std::sqrt(dof) / sv[i];
    }
    if (r < x.cols()) {
        pp.warnings.push_back("whitening kept " + std::to_string(r) + " of " + std::to_string(x.cols()) +
                              " dimensions (eigenvalues <= " + std::to_string(tol) + " dropped)");
    }
    out.z = out.z * w;
    pp.whitener = std::move(w);
    pp.rank = r;
    pp.sphered = true;
    return out;
}

Matrix transform(const Preprocessor& pp, const Matrix& xnew)
{
    if (xnew.cols() != pp.input_dim()) {
        throw ArgumentError("expected " + std::to_string(pp.input_dim()) + " columns, got " +
                            std::to_string(xnew.cols()));
    }
    Matrix z = center_and_scale(xnew, pp.center, pp.scale);
    if (pp.sphered) return z * pp.whitener;
    return z;
}

Vector to_original_coords(const Preprocessor& pp, const Vector& u)
{
    if (u.size() != pp.output_dim()) {
        throw ArgumentError("direction has dimension " + std::to_string(u.size()) + ", expected " +
                            std::to_string(pp.output_dim()));
    }
    if (std::abs(u.norm() - 1.0) > 1e-6) throw ArgumentError("direction is not unit length");

    Vector a = pp.sphered ? Vector(pp.whitener * u) : u;
    a = a.cwiseQuotient(pp.scale);
    const double norm = a.norm();
    if (!(norm > 1e-300)) throw ComputeError("direction maps to the zero vector in original coordinates");
    a /= norm;
    canonicalize_sign(a);
    return a;
}

} // namespace epp
