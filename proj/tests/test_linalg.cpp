#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "ydof/linalg.hpp"
#include "ydof/rng.hpp"

using namespace ydof::linalg;
using ydof::rng::NormalSampler;
using ydof::rng::normal_matrix;

namespace {

Mat random_matrix(int rows, int cols, std::uint64_t seed) {
    NormalSampler s(seed);
    return normal_matrix(rows, cols, s);
}

}  // namespace

TEST_CASE("rank on fixed shapes") {
    CHECK(rank(Mat::Identity(3, 3), 1e-10) == 3);
    CHECK(rank(Mat::Zero(2, 2), 1e-10) == 0);
    CHECK(rank(Mat::Zero(0, 5)) == 0);

    const Mat a = random_matrix(4, 2, 7);
    CHECK(rank(a, 1e-10) == oracles::gram_schmidt_rank(a));
}

TEST_CASE("rank of a constructed rank-1 matrix") {
    const Mat a = random_matrix(5, 1, 3) * random_matrix(1, 4, 4);
    CHECK(rank(a) == 1);
    CHECK(oracles::gram_schmidt_rank(a) == 1);
}

TEST_CASE("null_space fixed cases") {
    Mat a(1, 2);
    a << 1.0, 1.0;
    const auto ns = null_space(a);
    REQUIRE(ns.dim() == 1);
    // direction (1,-1)/sqrt(2) up to sign
    CHECK(std::abs(std::abs(ns.basis(0, 0)) - 1.0 / std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(ns.basis(0, 0) + ns.basis(1, 0)) < 1e-12);

    CHECK(null_space(Mat::Identity(3, 3)).dim() == 0);

    const Mat b = random_matrix(1, 3, 11);
    const auto nsb = null_space(b);
    REQUIRE(nsb.dim() == 2);
    CHECK(max_abs(b * nsb.basis) <= 1e-9 * (1.0 + max_abs(b)));
    // agree with the eigendecomposition oracle up to rotation
    const Mat oracle_basis = oracles::eig_null_space(b);
    REQUIRE(oracle_basis.cols() == 2);
    const Mat p_impl = projector(nsb.basis, 3);
    Eigen::HouseholderQR<Mat> qr(oracle_basis);
    const Mat q = qr.householderQ() * Mat::Identity(3, 2);
    CHECK(max_abs(p_impl - projector(q, 3)) < 1e-8);
}

TEST_CASE("null_space basis is orthonormal") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const int rows = 1 + static_cast<int>(seed % 5);
        const Mat a = random_matrix(rows, 6, 100 + seed);
        const auto ns = null_space(a);
        const Mat gram = ns.basis.transpose() * ns.basis;
        CHECK(max_abs(gram - Mat::Identity(ns.dim(), ns.dim())) < 1e-10);
    }
}

TEST_CASE("pseudo_inverse fixed cases") {
    Mat a(2, 2);
    a << 2.0, 1.0, 1.0, 1.0;  // invertible
    CHECK(max_abs(pseudo_inverse(a) - a.inverse()) < 1e-12);

    const Mat z = Mat::Zero(3, 2);
    const Mat zp = pseudo_inverse(z);
    CHECK(zp.rows() == 2);
    CHECK(zp.cols() == 3);
    CHECK(max_abs(zp) == 0.0);

    const Mat r = random_matrix(3, 5, 21);
    CHECK(oracles::penrose_residual(r, pseudo_inverse(r)) < 1e-8);
}

TEST_CASE("column_space_intersection fixed cases") {
    const auto both = column_space_intersection(Mat::Identity(2, 2),
                                                Mat::Identity(2, 2));
    CHECK(both.dim() == 2);

    Mat e1 = Mat::Zero(3, 1);
    e1(0, 0) = 1.0;
    Mat e2 = Mat::Zero(3, 1);
    e2(1, 0) = 1.0;
    CHECK(column_space_intersection(e1, e2).dim() == 0);

    const Mat a = random_matrix(3, 2, 31);
    const Mat b = random_matrix(3, 2, 32);
    const auto inter = column_space_intersection(a, b);
    REQUIRE(inter.dim() == 1);
    CHECK((a * inter.va - b * inter.vb).norm() <= 1e-8);
}

TEST_CASE("property: dimension theorem and penrose on random shapes") {
    NormalSampler shape_rng(0xd1ce);
    for (int trial = 0; trial < 200; ++trial) {
        const int rows = 1 + static_cast<int>(shape_rng.uniform() * 12);
        const int cols = 1 + static_cast<int>(shape_rng.uniform() * 12);
        const Mat a = random_matrix(rows, cols, 1000 + trial);
        const int r = rank(a);
        CHECK(r + null_space(a).dim() == cols);
        CHECK(r == oracles::gram_schmidt_rank(a));
        CHECK(oracles::penrose_residual(a, pseudo_inverse(a)) < 1e-8);
        CHECK(max_abs(a * null_space(a).basis) <= 1e-9 * (1.0 + max_abs(a)));
    }
}

TEST_CASE("property: intersection dimension matches the rank identity") {
    NormalSampler shape_rng(0xbeef);
    for (int trial = 0; trial < 200; ++trial) {
        const int rows = 2 + static_cast<int>(shape_rng.uniform() * 8);
        const int ca = 1 + static_cast<int>(shape_rng.uniform() * rows);
        const int cb = 1 + static_cast<int>(shape_rng.uniform() * rows);
        const Mat a = random_matrix(rows, ca, 5000 + 2 * trial);
        const Mat b = random_matrix(rows, cb, 5001 + 2 * trial);
        Mat ab(rows, ca + cb);
        ab << a, b;
        const int expected = rank(a) + rank(b) - rank(ab);
        const auto inter = column_space_intersection(a, b);
        CHECK(inter.dim() == expected);
        if (inter.dim() > 0) {
            CHECK((a * inter.va - b * inter.vb).norm() <= 1e-8);
            CHECK(ydof::linalg::rank(a * inter.va) == inter.dim());
        }
    }
}

TEST_CASE("projector comparison is rotation invariant") {
    const Mat a = random_matrix(5, 3, 77);
    const auto cs = column_space(a);
    // rotate the basis by a random orthogonal matrix; projector is unchanged
    Eigen::HouseholderQR<Mat> qr(random_matrix(3, 3, 78));
    const Mat rot = qr.householderQ() * Mat::Identity(3, 3);
    CHECK(max_abs(projector(cs.basis, 5) - projector(cs.basis * rot, 5)) < 1e-10);
}
