#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fraclap/lattice.hpp"
#include "oracles.hpp"

using namespace fraclap;
using fraclap::testing::random_grid;

namespace {

struct ModelCase {
    Mesh mesh;
    EigenResult principal;
    Reaction reaction;
};

ModelCase model_setup(std::size_t n, double p, double mu_factor) {
    ProblemParams pp;
    pp.p = p;
    pp.s = 0.3;
    pp.n = n;
    pp.q = 4.0;
    Mesh mesh(pp);
    EigenResult e1 = principal_eigenpair(mesh);
    Reaction r = ModelReaction{.mu = mu_factor * e1.lambda, .kappa = 1.0, .p = p, .q = 4.0}.reaction();
    return {std::move(mesh), std::move(e1), std::move(r)};
}

}  // namespace

TEST(Checks, ExactSolutionPassesBoth) {
    const ModelCase st = model_setup(8, 2.5, 1.5);
    const SolveReport sol = minimize(Functional(st.mesh, st.reaction), st.mesh.constant(1.0));
    const auto sup = check_supersolution(st.mesh, st.reaction, sol.u, 1e-10);
    const auto sub = check_subsolution(st.mesh, st.reaction, sol.u, 1e-10);
    EXPECT_TRUE(sup.passed);
    EXPECT_TRUE(sub.passed);
    EXPECT_LE(std::abs(sup.margin), 1e-10);
    EXPECT_LE(std::abs(sub.margin), 1e-10);
}

TEST(Checks, SmallMultipleOfEigenfunctionIsSubsolution) {
    const ModelCase st = model_setup(16, 2.5, 1.5);
    const double mu = 1.5 * st.principal.lambda;
    // Residual λ₁φ(εû₁) − f(εû₁) = (λ₁ − μ)(εû₁)^{p−1} + (εû₁)^{q−1} is nonpositive for
    // ε^{q−p} ‖û₁‖^{q−p} ≤ μ − λ₁; stay a factor 2 inside that threshold.
    const double thresh = std::pow(mu - st.principal.lambda, 1.0 / (4.0 - 2.5)) / st.principal.u.sup_norm();
    for (double eps : {0.5 * thresh, 0.1 * thresh, 1e-3 * thresh}) {
        const GridFunction v = eps * st.principal.u;
        EXPECT_TRUE(check_subsolution(st.mesh, st.reaction, v, 1e-9 * apply(st.mesh, v).sup_norm()).passed) << eps;
    }
    EXPECT_FALSE(check_subsolution(st.mesh, st.reaction, 4.0 * thresh * st.principal.u, 0.0).passed);
}

TEST(Checks, LargeConstantIsSupersolution) {
    const ModelCase st = model_setup(16, 2.5, 1.5);
    const double m = constant_supersolution(st.mesh, st.reaction, 0.0);
    EXPECT_TRUE(check_supersolution(st.mesh, st.reaction, st.mesh.constant(m), 0.0).passed);
    EXPECT_TRUE(check_supersolution(st.mesh, st.reaction, st.mesh.constant(10.0 * m), 0.0).passed);
    // Below the reaction's positive zero sqrt(mu) the constant cannot be a supersolution at the centre.
    EXPECT_FALSE(check_supersolution(st.mesh, st.reaction, st.mesh.constant(1e-3), 0.0).passed);
}

TEST(MeetJoin, Identities) {
    std::mt19937_64 rng(31);
    const GridFunction u = random_grid(9, rng);
    const GridFunction v = random_grid(9, rng);
    EXPECT_TRUE(meet(u, u) == u);
    EXPECT_TRUE(join(u, u) == u);
    EXPECT_TRUE(join(-u, u) == GridFunction(u.vec().cwiseAbs()));
    EXPECT_TRUE(meet(u, v) == -join(-u, -v));
}

TEST(MeetJoin, SupersolutionClosure) {
    // Meets of supersolutions stay supersolutions; joins of subsolutions stay subsolutions.
    std::mt19937_64 rng(32);
    const ModelCase st = model_setup(12, 2.5, 1.5);
    const double m = constant_supersolution(st.mesh, st.reaction, 0.0);
    int tested = 0;
    for (int k = 0; k < 200 && tested < 50; ++k) {
        std::uniform_real_distribution<double> level(m, 3.0 * m);
        const GridFunction a = st.mesh.constant(level(rng)) + random_grid(12, rng, 0.0, 0.05 * m);
        const GridFunction b = st.mesh.constant(level(rng)) + random_grid(12, rng, 0.0, 0.05 * m);
        if (!check_supersolution(st.mesh, st.reaction, a, 0.0).passed || !check_supersolution(st.mesh, st.reaction, b, 0.0).passed) continue;
        ++tested;
        EXPECT_TRUE(check_supersolution(st.mesh, st.reaction, meet(a, b), 1e-9).passed);
        EXPECT_TRUE(check_subsolution(st.mesh, st.reaction, join(-a, -b), 1e-9).passed);
    }
    EXPECT_GE(tested, 10);
}

TEST(IntervalPair, Validation) {
    const ModelCase st = model_setup(6, 2.5, 1.5);
    const double m = constant_supersolution(st.mesh, st.reaction, 0.0);
    EXPECT_NO_THROW(make_interval_pair(st.mesh, st.reaction, st.mesh.constant(-m), st.mesh.constant(m), 0.0));
    EXPECT_THROW(make_interval_pair(st.mesh, st.reaction, st.mesh.constant(m), st.mesh.constant(-m), 0.0), ParameterError);
    EXPECT_THROW(make_interval_pair(st.mesh, st.reaction, st.mesh.constant(-m), st.mesh.constant(1e-3), 0.0), ParameterError);
}

TEST(IntervalSolve, DegenerateInterval) {
    const ModelCase st = model_setup(8, 2.5, 1.5);
    const SolveReport sol = minimize(Functional(st.mesh, st.reaction), st.mesh.constant(1.0));
    const SolveReport rep = interval_solve(st.mesh, st.reaction, IntervalPair{sol.u, sol.u});
    EXPECT_LE(sup_distance(rep.u, sol.u), 1e-12);
    EXPECT_LE(rep.residual_inf, 1e-10);
}

TEST(IntervalSolve, NonnegativeFromZeroLower) {
    const ModelCase st = model_setup(10, 2.5, 1.5);
    const double m = constant_supersolution(st.mesh, st.reaction, 0.0);
    const SolveReport rep = interval_solve(st.mesh, st.reaction, IntervalPair{st.mesh.zeros(), st.mesh.constant(m)}, {},
                                           0.5 * st.principal.u);
    EXPECT_GE(rep.u.min(), -1e-12);
    ASSERT_TRUE(rep.ordering.has_value());
    EXPECT_TRUE(rep.ordering->holds());
    EXPECT_LE(rep.residual_inf, 1e-10);
}

TEST(IntervalSolve, PositiveSolutionConfirmedByOracle) {
    const ModelCase st = model_setup(6, 2.5, 1.5);
    const double m = constant_supersolution(st.mesh, st.reaction, 0.0);
    const IntervalPair pair{1e-3 * st.principal.u, st.mesh.constant(m)};
    const SolveReport rep = interval_solve(st.mesh, st.reaction, pair);
    EXPECT_EQ(rep.classification, SignClass::positive);
    const SolutionSet set = enumerate_solutions(st.mesh, st.reaction, pair, 64);
    bool found = false;
    for (const auto& mbr : set.members) found = found || same_point(mbr.u, rep.u);
    EXPECT_TRUE(found);
}

TEST(MonotoneIteration, SingletonInterval) {
    const ModelCase st = model_setup(6, 2.5, 1.5);
    const double m = constant_supersolution(st.mesh, st.reaction, 0.0);
    const IntervalPair pair{1e-2 * st.principal.u, st.mesh.constant(m)};
    const SolutionSet set = enumerate_solutions(st.mesh, st.reaction, pair, 64);
    ASSERT_EQ(set.members.size(), 1u);
    const SolveReport lo = minimal_solution(st.mesh, st.reaction, pair);
    const SolveReport hi = maximal_solution(st.mesh, st.reaction, pair);
    EXPECT_LE(sup_distance(lo.u, set.members[0].u), 1e-8);
    EXPECT_LE(sup_distance(hi.u, set.members[0].u), 1e-8);
    EXPECT_TRUE(lo.ordering->holds());
    EXPECT_TRUE(hi.ordering->holds());
}

TEST(MonotoneIteration, ExtremalMatchOracleOnBox) {
    for (double p : {2.0, 2.5}) {
        const ModelCase st = model_setup(6, p, 1.5);
        const double m = constant_supersolution(st.mesh, st.reaction, 0.0);
        const IntervalPair box{st.mesh.constant(-m), st.mesh.constant(m)};
        const SolutionSet set = enumerate_solutions(st.mesh, st.reaction, box, 64);
        EXPECT_TRUE(set.complete_flag);
        const SolveReport lo = minimal_solution(st.mesh, st.reaction, box);
        const SolveReport hi = maximal_solution(st.mesh, st.reaction, box);
        EXPECT_LE(sup_distance(lo.u, pointwise_min(set)), 1e-6);
        EXPECT_LE(sup_distance(hi.u, pointwise_max(set)), 1e-6);
        EXPECT_LE(lo.residual_inf, 1e-8);
        EXPECT_LE(hi.residual_inf, 1e-8);
    }
}

TEST(MonotoneIteration, UserShiftTooSmallIsDetected) {
    // With σ = 0 the frozen right-hand side is not order preserving near the upper bound.
    const ModelCase st = model_setup(6, 2.0, 1.5);
    const double m = constant_supersolution(st.mesh, st.reaction, 0.0);
    LatticeOptions o;
    o.shift = 0.0;
    const IntervalPair box{st.mesh.constant(-m), st.mesh.constant(m)};
    try {
        const SolveReport lo = minimal_solution(st.mesh, st.reaction, box, o);
        EXPECT_LE(lo.residual_inf, 1e-8);
    } catch (const InternalError&) {
        SUCCEED();
    }
}

TEST(Directedness, MeetOfMembersBoundsASolution) {
    const ModelCase st = model_setup(6, 2.5, 2.5);
    const double m = constant_supersolution(st.mesh, st.reaction, 0.0);
    const IntervalPair box{st.mesh.constant(-m), st.mesh.constant(m)};
    const SolutionSet set = enumerate_solutions(st.mesh, st.reaction, box, 64);
    ASSERT_GE(set.members.size(), 3u);
    for (std::size_t a = 0; a < set.members.size(); ++a) {
        for (std::size_t b = a + 1; b < set.members.size(); ++b) {
            const GridFunction lo_top = meet(set.members[a].u, set.members[b].u);
            const SolveReport below = interval_solve(st.mesh, st.reaction, IntervalPair{box.lower, lo_top});
            for (std::size_t i = 0; i < 6; ++i) EXPECT_LE(below.u[i], lo_top[i] + 1e-8);
            EXPECT_LE(below.residual_inf, 1e-8);
            const GridFunction hi_bottom = join(set.members[a].u, set.members[b].u);
            const SolveReport above = interval_solve(st.mesh, st.reaction, IntervalPair{hi_bottom, box.upper});
            for (std::size_t i = 0; i < 6; ++i) EXPECT_GE(above.u[i], hi_bottom[i] - 1e-8);
            EXPECT_LE(above.residual_inf, 1e-8);
        }
    }
}

TEST(Enumerate, ZeroReactionHasOnlyZero) {
    ProblemParams pp;
    pp.p = 2.5;
    pp.n = 5;
    const Mesh mesh(pp);
    const SolutionSet set = enumerate_solutions(mesh, zero_reaction(), IntervalPair{mesh.constant(-1.0), mesh.constant(1.0)}, 16);
    ASSERT_EQ(set.members.size(), 1u);
    EXPECT_EQ(set.members[0].classification, SignClass::zero);
}

TEST(Enumerate, LinearResonanceMembersOnPrincipalRay) {
    ProblemParams pp;
    pp.p = 2.0;
    pp.s = 0.4;
    pp.n = 5;
    const Mesh mesh(pp);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fraclap::testing::dense_p2_matrix(pp));
    const Eigen::VectorXd v1 = es.eigenvectors().col(0);
    const SolutionSet set = enumerate_solutions(mesh, power_reaction(es.eigenvalues()(0), 2.0),
                                                IntervalPair{mesh.constant(-1.0), mesh.constant(1.0)}, 32);
    bool has_zero = false;
    for (const auto& m : set.members) {
        if (m.classification == SignClass::zero) {
            has_zero = true;
            continue;
        }
        const Eigen::VectorXd u = m.u.vec();
        const Eigen::VectorXd off = u - u.dot(v1) * v1;
        EXPECT_LE(off.cwiseAbs().maxCoeff(), 1e-8 * (1.0 + u.cwiseAbs().maxCoeff()));
    }
    EXPECT_TRUE(has_zero);
}

TEST(Enumerate, RejectsLargeMesh) {
    ProblemParams pp;
    pp.n = 9;
    const Mesh mesh(pp);
    EXPECT_THROW(enumerate_solutions(mesh, zero_reaction(), IntervalPair{mesh.constant(-1.0), mesh.constant(1.0)}, 4), ParameterError);
}

TEST(SmallestPositive, MinimalAgainstOracle) {
    const ModelCase st = model_setup(6, 2.5, 1.5);
    const ExtremalResult up = smallest_positive(st.mesh, st.reaction, st.principal);
    EXPECT_EQ(up.report.classification, SignClass::positive);
    EXPECT_TRUE(up.cone.in_cone_interior());
    EXPECT_LE(up.report.residual_inf, 1e-10);
    EXPECT_LT(up.u_hat_energy, 0.0);
    const double m = constant_supersolution(st.mesh, st.reaction, 0.0);
    const SolutionSet set = enumerate_solutions(st.mesh, st.reaction, IntervalPair{st.mesh.constant(-m), st.mesh.constant(m)}, 64);
    for (const auto& mbr : set.members) {
        if (mbr.classification != SignClass::positive) continue;
        for (std::size_t i = 0; i < 6; ++i) EXPECT_GE(mbr.u[i], up.report.u[i] - 1e-6);
    }
}

TEST(SmallestPositive, OddSymmetry) {
    const ModelCase st = model_setup(16, 2.5, 1.5);
    const ExtremalResult up = smallest_positive(st.mesh, st.reaction, st.principal);
    const ExtremalResult um = biggest_negative(st.mesh, st.reaction, st.principal);
    EXPECT_LE(sup_distance(um.report.u, -up.report.u), 1e-8);
    EXPECT_EQ(um.report.classification, SignClass::negative);
}

TEST(SmallestPositive, MuBelowLambdaOneIsParameterError) {
    const ModelCase st = model_setup(10, 2.5, 0.8);
    EXPECT_THROW(smallest_positive(st.mesh, st.reaction, st.principal), ParameterError);
}

TEST(Nodal, FindsSignChangingSolutionConfirmedByOracle) {
    const ModelCase st = model_setup(6, 2.5, 1.0);
    const SecondEigenResult e2 = second_eigenvalue_minimax(st.mesh, st.principal, 21);
    const Reaction r = ModelReaction{.mu = 1.2 * e2.lambda2, .kappa = 1.0, .p = 2.5, .q = 4.0}.reaction();
    const ExtremalResult up = smallest_positive(st.mesh, r, st.principal);
    const ExtremalResult um = biggest_negative(st.mesh, r, st.principal);
    const NodalResult nd = nodal_solution(st.mesh, r, up.report, um.report, {}, &e2);
    EXPECT_EQ(nd.report.classification, SignClass::nodal);
    ASSERT_TRUE(nd.report.ordering.has_value());
    EXPECT_TRUE(nd.report.ordering->holds());
    EXPECT_GE(nd.level, std::max(nd.energy_plus, nd.energy_minus));
    ASSERT_TRUE(nd.diagnostic.has_value());
    EXPECT_TRUE(nd.diagnostic->negative);

    const GridFunction d = st.mesh.constant(1e-3);
    const SolutionSet set = enumerate_solutions(st.mesh, r, IntervalPair{um.report.u - d, up.report.u + d}, 64);
    EXPECT_GE(set.members.size(), 4u);
    bool found = false;
    for (const auto& m : set.members) found = found || same_point(m.u, nd.report.u);
    EXPECT_TRUE(found);
}

TEST(Nodal, RejectsNonCriticalEndpoints) {
    const ModelCase st = model_setup(6, 2.5, 3.0);
    SolveReport plus;
    plus.u = st.mesh.constant(1.0);
    SolveReport minus;
    minus.u = st.mesh.constant(-1.0);
    EXPECT_THROW(nodal_solution(st.mesh, st.reaction, plus, minus), ParameterError);
}
