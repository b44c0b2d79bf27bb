#ifndef YDOF_LINALG_HPP
#define YDOF_LINALG_HPP

#include <Eigen/Dense>

namespace ydof::linalg {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Relative singular-value threshold separating structure from rounding noise.
inline constexpr double kDefaultRankTol = 1e-10;

/// An orthonormal basis of a subspace of R^ambient_dim. `basis` may have zero
/// columns (the trivial subspace). Columns satisfy basis^T * basis = I.
struct SubspaceBasis {
    int ambient_dim = 0;
    Mat basis;

    int dim() const { return static_cast<int>(basis.cols()); }
};

/// Coefficient matrices (va, vb) with a*va = b*vb; the columns of a*va form a
/// basis of span(a) ∩ span(b).
struct IntersectionPair {
    Mat va;
    Mat vb;

    int dim() const { return static_cast<int>(va.cols()); }
};

/// Number of singular values exceeding tol * sigma_max. Zero for empty or
/// all-zero input.
int rank(const Mat& a, double tol = kDefaultRankTol);

/// Orthonormal basis of { x : a*x = 0 }.
SubspaceBasis null_space(const Mat& a, double tol = kDefaultRankTol);

/// Orthonormal basis of { y : y^T * a = 0 }, i.e. null_space(a^T).
SubspaceBasis left_null_space(const Mat& a, double tol = kDefaultRankTol);

/// Orthonormal basis of span(a).
SubspaceBasis column_space(const Mat& a, double tol = kDefaultRankTol);

/// Moore-Penrose pseudoinverse via SVD with singular values below
/// tol * sigma_max treated as zero.
Mat pseudo_inverse(const Mat& a, double tol = kDefaultRankTol);

/// Intersection of the column spaces of a and b (same row count), computed
/// from the null space of [a, -b]: the top block of each null vector is a va
/// column, the bottom block a vb column. Disjoint spans give zero columns.
IntersectionPair column_space_intersection(const Mat& a, const Mat& b,
                                           double tol = kDefaultRankTol);

/// Largest absolute entry; 0 for empty matrices.
double max_abs(const Mat& a);

/// Smallest singular value; 0 for empty matrices.
double min_singular_value(const Mat& a);

/// Orthogonal projector basis*basis^T onto the space spanned by an
/// orthonormal basis. Comparing projectors makes checks invariant to basis
/// rotation and sign.
Mat projector(const Mat& orthonormal_basis, int ambient_dim);

}  // namespace ydof::linalg

#endif  // YDOF_LINALG_HPP
