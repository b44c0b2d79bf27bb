#include "ydof/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace ydof::linalg {

namespace {

Eigen::JacobiSVD<Mat> full_svd(const Mat& a) {
    return Eigen::JacobiSVD<Mat>(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
}

int rank_from_singular_values(const Eigen::VectorXd& sv, double tol) {
    if (sv.size() == 0) return 0;
    const double cutoff = tol * sv(0);
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff && sv(i) > 0.0) ++r;
    }
    return r;
}

}  // namespace

int rank(const Mat& a, double tol) {
    if (tol <= 0.0) throw std::invalid_argument("rank: tol must be positive");
    if (a.rows() == 0 || a.cols() == 0) return 0;
    const auto svd = full_svd(a);
    return rank_from_singular_values(svd.singularValues(), tol);
}

SubspaceBasis null_space(const Mat& a, double tol) {
    if (tol <= 0.0) throw std::invalid_argument("null_space: tol must be positive");
    const int n = static_cast<int>(a.cols());
    if (n == 0) return SubspaceBasis{0, Mat::Zero(0, 0)};
    if (a.rows() == 0) return SubspaceBasis{n, Mat::Identity(n, n)};
    const auto svd = full_svd(a);
    const int r = rank_from_singular_values(svd.singularValues(), tol);
    // Right singular vectors beyond the numerical rank span the kernel.
    return SubspaceBasis{n, svd.matrixV().rightCols(n - r)};
}

SubspaceBasis left_null_space(const Mat& a, double tol) {
    return null_space(Mat(a.transpose()), tol);
}

SubspaceBasis column_space(const Mat& a, double tol) {
    if (tol <= 0.0) throw std::invalid_argument("column_space: tol must be positive");
    const int m = static_cast<int>(a.rows());
    if (m == 0 || a.cols() == 0) return SubspaceBasis{m, Mat::Zero(m, 0)};
    const auto svd = full_svd(a);
    const int r = rank_from_singular_values(svd.singularValues(), tol);
    return SubspaceBasis{m, svd.matrixU().leftCols(r)};
}

Mat pseudo_inverse(const Mat& a, double tol) {
    if (tol <= 0.0) throw std::invalid_argument("pseudo_inverse: tol must be positive");
    if (a.rows() == 0 || a.cols() == 0) return Mat::Zero(a.cols(), a.rows());
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cutoff = tol * (sv.size() > 0 ? sv(0) : 0.0);
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff && sv(i) > 0.0) inv(i) = 1.0 / sv(i);
    }
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

IntersectionPair column_space_intersection(const Mat& a, const Mat& b, double tol) {
    if (a.rows() != b.rows()) {
        throw std::invalid_argument("column_space_intersection: row counts differ");
    }
    const int ca = static_cast<int>(a.cols());
    const int cb = static_cast<int>(b.cols());
    if (ca == 0 || cb == 0) {
        return IntersectionPair{Mat::Zero(ca, 0), Mat::Zero(cb, 0)};
    }
    // Work on orthonormal column-space representatives so dependent columns
    // of a or b cannot masquerade as intersection directions.
    const SubspaceBasis qa = column_space(a, tol);
    const SubspaceBasis qb = column_space(b, tol);
    if (qa.dim() == 0 || qb.dim() == 0) {
        return IntersectionPair{Mat::Zero(ca, 0), Mat::Zero(cb, 0)};
    }
    Mat stacked(a.rows(), qa.dim() + qb.dim());
    stacked << qa.basis, -qb.basis;
    const SubspaceBasis ns = null_space(stacked, tol);
    // Each null vector (x; y) satisfies qa*x = qb*y with |x| = |y| = 1/sqrt(2);
    // rescaling gives an orthonormal basis of the intersection itself.
    const Mat inter = std::sqrt(2.0) * (qa.basis * ns.basis.topRows(qa.dim()));
    return IntersectionPair{pseudo_inverse(a, tol) * inter,
                            pseudo_inverse(b, tol) * inter};
}

double max_abs(const Mat& a) {
    if (a.size() == 0) return 0.0;
    return a.cwiseAbs().maxCoeff();
}

double min_singular_value(const Mat& a) {
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(a);
    const auto& sv = svd.singularValues();
    return sv.size() > 0 ? sv(sv.size() - 1) : 0.0;
}

Mat projector(const Mat& orthonormal_basis, int ambient_dim) {
    if (orthonormal_basis.cols() == 0) return Mat::Zero(ambient_dim, ambient_dim);
    return orthonormal_basis * orthonormal_basis.transpose();
}

}  // namespace ydof::linalg
