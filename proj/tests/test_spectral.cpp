#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fraclap/spectral.hpp"
#include "oracles.hpp"

using namespace fraclap;

namespace {

ProblemParams params(double p, double s, std::size_t n) {
    ProblemParams pp;
    pp.p = p;
    pp.s = s;
    pp.n = n;
    return pp;
}

}  // namespace

TEST(Principal, MatchesDenseOracleAtPTwo) {
    for (std::size_t n : {1u, 5u, 32u}) {
        for (double s : {0.25, 0.5, 0.8}) {
            const ProblemParams pp = params(2.0, s, n);
            const Mesh mesh(pp);
            const EigenResult r = principal_eigenpair(mesh);
            const double want = fraclap::testing::dense_p2_eigenvalues(pp)(0);
            EXPECT_NEAR(r.lambda, want, 1e-8 * want) << "n=" << n << " s=" << s;
            EXPECT_NEAR(r.normalization, 1.0, 1e-10);
            EXPECT_GT(r.u.min(), 0.0);
            EXPECT_TRUE(weighted_sup(mesh, r.u).in_cone_interior());
        }
    }
}

TEST(Principal, ResidualSmallForSeveralP) {
    for (double p : {2.0, 2.5, 3.0}) {
        const Mesh mesh(params(p, 0.3, 24));
        const EigenResult r = principal_eigenpair(mesh);
        const GridFunction res = eigen_residual(mesh, Weight::uniform(mesh.size()), r.u, r.lambda);
        EXPECT_LE(res.sup_norm(), 1e-8 * std::max(1.0, r.lambda)) << "p=" << p;
        EXPECT_GT(r.u.min(), 0.0);
        EXPECT_NEAR(weighted_lp(mesh, Weight::uniform(mesh.size()), r.u), 1.0, 1e-10);
    }
}

TEST(Principal, EvenOnSymmetricDomain) {
    const Mesh mesh(params(2.5, 0.4, 17));
    const EigenResult r = principal_eigenpair(mesh);
    for (std::size_t i = 0; i < mesh.size(); ++i) EXPECT_NEAR(r.u[i], r.u[mesh.size() - 1 - i], 1e-8);
}

TEST(Principal, WeightScaling) {
    const Mesh mesh(params(2.5, 0.3, 12));
    const Weight one = Weight::uniform(mesh.size());
    const Weight two(mesh.constant(2.0));
    const double l1 = principal_eigenpair(mesh, one).lambda;
    const double l2 = principal_eigenpair(mesh, two).lambda;
    EXPECT_NEAR(l2, l1 / 2.0, 1e-10 * l1);
}

TEST(Principal, NonuniformWeightResidual) {
    const Mesh mesh(params(3.0, 0.3, 16));
    const Weight rho(mesh.sample([](double x) { return 1.0 + 0.5 * std::sin(3.0 * x); }));
    const EigenResult r = principal_eigenpair(mesh, rho);
    EXPECT_LE(eigen_residual(mesh, rho, r.u, r.lambda).sup_norm(), 1e-8 * std::max(1.0, r.lambda));
    EXPECT_NEAR(r.normalization, 1.0, 1e-10);
}

TEST(WeightValidation, Rejects) {
    EXPECT_THROW(Weight(GridFunction{0.0, 0.0}), ParameterError);
    EXPECT_THROW(Weight(GridFunction{1.0, -0.1}), ParameterError);
}

TEST(SecondEigenvalue, WithinFivePercentOfDenseOracle) {
    const ProblemParams pp = params(2.0, 0.4, 32);
    const Mesh mesh(pp);
    const EigenResult r1 = principal_eigenpair(mesh);
    const SecondEigenResult r2 = second_eigenvalue_minimax(mesh, r1, 21);
    const double want = fraclap::testing::dense_p2_eigenvalues(pp)(1);
    EXPECT_NEAR(r2.lambda2, want, 0.05 * want);
    EXPECT_GT(r2.lambda2, r1.lambda);
}

TEST(SecondEigenvalue, PathInvariants) {
    const Mesh mesh(params(2.5, 0.3, 16));
    const Weight one = Weight::uniform(mesh.size());
    const EigenResult r1 = principal_eigenpair(mesh);
    const SecondEigenResult r2 = second_eigenvalue_minimax(mesh, r1, 15);
    ASSERT_EQ(r2.path.size(), 15u);
    EXPECT_TRUE(r2.path.front() == r1.u);
    EXPECT_TRUE(r2.path.back() == -r1.u);
    for (const auto& st : r2.path) EXPECT_NEAR(weighted_lp(mesh, one, st), 1.0, 1e-10);
    EXPECT_GT(r2.lambda2, r1.lambda);
    const GridFunction& top = r2.path[r2.max_index];
    EXPECT_LT(top.min(), 0.0);
    EXPECT_GT(top.max(), 0.0);
}

TEST(SecondEigenvalue, RejectsShortPath) {
    const Mesh mesh(params(2.0, 0.3, 8));
    const EigenResult r1 = principal_eigenpair(mesh);
    EXPECT_THROW(second_eigenvalue_minimax(mesh, r1, 4), ParameterError);
}

TEST(WeightCompare, HalvedWeightDoubles) {
    const Mesh mesh(params(2.0, 0.3, 10));
    const auto cmp = weight_compare(mesh, Weight::uniform(10), Weight(mesh.constant(0.5)));
    EXPECT_NEAR(cmp.lambda_rho_tilde, 2.0 * cmp.lambda_rho, 1e-9 * cmp.lambda_rho);
    EXPECT_TRUE(cmp.strict);
}

TEST(WeightCompare, OneNodeHalvedIsStrict) {
    const Mesh mesh(params(2.5, 0.3, 10));
    GridFunction w = mesh.constant(1.0);
    w[3] = 0.5;
    const auto cmp = weight_compare(mesh, Weight::uniform(10), Weight(w));
    EXPECT_TRUE(cmp.strict);
    EXPECT_GT(cmp.gap, 0.0);
}

TEST(WeightCompare, Preconditions) {
    const Mesh mesh(params(2.0, 0.3, 6));
    EXPECT_THROW(weight_compare(mesh, Weight::uniform(6), Weight::uniform(6)), ParameterError);
    EXPECT_THROW(weight_compare(mesh, Weight(mesh.constant(0.5)), Weight::uniform(6)), ParameterError);
}
