#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fraclap/reaction.hpp"

using namespace fraclap;

namespace {

Reaction identity_reaction() {
    return make_function_reaction([](double t) { return t; }, [](double t) { return 0.5 * t * t; }, [](double) { return 1.0; },
                                  "identity");
}

ModelReaction model(double mu, double p, double q) { return ModelReaction{.mu = mu, .kappa = 1.0, .p = p, .q = q}; }

}  // namespace

TEST(PositiveTruncation, Branches) {
    const Reaction fp = positive_truncation(identity_reaction());
    EXPECT_EQ(fp(0, -3.0), 0.0);
    EXPECT_EQ(fp(0, 2.0), 2.0);
    EXPECT_EQ(fp.primitive(0, -1.0), 0.0);
    EXPECT_DOUBLE_EQ(fp.primitive(0, 2.0), 2.0);
}

TEST(NegativeTruncation, Branches) {
    const Reaction fm = negative_truncation(identity_reaction());
    EXPECT_EQ(fm(0, 3.0), 0.0);
    EXPECT_EQ(fm(0, -2.0), -2.0);
    EXPECT_EQ(fm.primitive(0, 1.0), 0.0);
}

TEST(IntervalTruncation, Branches) {
    const std::size_t n = 3;
    const Reaction ft = interval_truncation(identity_reaction(), GridFunction(n, -1.0), GridFunction(n, 2.0));
    EXPECT_EQ(ft(1, 3.0), 2.0);
    EXPECT_EQ(ft(1, 0.5), 0.5);
    EXPECT_EQ(ft(1, -5.0), -1.0);
}

TEST(IntervalTruncation, PrimitiveIsIntegralOfClampedValue) {
    const Reaction base = model(3.0, 2.5, 4.0).reaction();
    const GridFunction lo{-0.7, -0.2, 0.1};
    const GridFunction up{0.4, 1.3, 0.9};
    const Reaction ft = interval_truncation(base, lo, up);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(ft.primitive(i, 0.0), 0.0);
        for (double t = -3.0; t <= 3.0; t += 0.173) {
            const double eps = 1e-6;
            const double fd = (ft.primitive(i, t + eps) - ft.primitive(i, t - eps)) / (2.0 * eps);
            EXPECT_NEAR(fd, ft(i, t), 1e-5 * std::max(1.0, std::abs(ft(i, t))));
        }
    }
}

TEST(IntervalTruncation, AgreesInsideAndIdempotent) {
    const Reaction base = model(2.0, 2.0, 3.5).reaction();
    const GridFunction lo{-1.0, -0.5};
    const GridFunction up{1.0, 0.25};
    const Reaction once = interval_truncation(base, lo, up);
    const Reaction twice = interval_truncation(once, lo, up);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> dist(-4.0, 4.0);
    for (int k = 0; k < 200; ++k) {
        const double t = dist(rng);
        for (std::size_t i = 0; i < 2; ++i) {
            EXPECT_EQ(once(i, t), twice(i, t));
            if (lo[i] < t && t < up[i]) EXPECT_EQ(once(i, t), base(i, t));
        }
    }
}

TEST(IntervalTruncation, BoundHolds) {
    const ModelReaction m = model(1.5, 2.0, 4.0);
    const GridFunction lo{-2.0, -0.5, -1.0};
    const GridFunction up{1.0, 3.0, 0.0};
    const Reaction ft = interval_truncation(m.reaction(), lo, up);
    for (std::size_t i = 0; i < 3; ++i) {
        const double bound = truncation_bound(m.growth_constant(), m.q, lo[i], up[i]);
        for (double t = -10.0; t <= 10.0; t += 0.01) EXPECT_LE(std::abs(ft(i, t)), bound);
    }
}

TEST(IntervalTruncation, OrderingViolationNamesNode) {
    const GridFunction lo{0.0, 1.0, 0.0};
    const GridFunction up{1.0, 0.5, 1.0};
    try {
        interval_truncation(identity_reaction(), lo, up);
        FAIL() << "expected ParameterError";
    } catch (const ParameterError& e) {
        EXPECT_NE(std::string(e.what()).find("node 1"), std::string::npos) << e.what();
    }
}

TEST(Reflect, OddPartner) {
    const Reaction base = make_function_reaction([](double t) { return std::exp(t); }, [](double t) { return std::expm1(t); },
                                                 [](double t) { return std::exp(t); });
    const Reaction g = reflect(base);
    for (double t : {-2.0, 0.0, 0.3, 1.7}) {
        EXPECT_DOUBLE_EQ(g(0, t), -base(0, -t));
        EXPECT_DOUBLE_EQ(g.derivative(0, t), base.derivative(0, -t));
    }
}

TEST(TauEps, Branches) {
    EXPECT_EQ(tau_eps(0.5, 0.25), 0.5);
    EXPECT_EQ(tau_eps(0.5, -1.0), 0.0);
    EXPECT_EQ(tau_eps(0.5, 0.5), 1.0);
    EXPECT_THROW(tau_eps(0.0, 1.0), ParameterError);
    EXPECT_THROW(tau_eps(-1.0, 1.0), ParameterError);
}

TEST(TauEps, MonotoneLipschitzBounded) {
    const double eps = 0.3;
    double prev_t = -1.0;
    double prev = tau_eps(eps, prev_t);
    for (int k = 1; k < 1000; ++k) {
        const double t = -1.0 + 2.0 * k / 999.0;
        const double v = tau_eps(eps, t);
        EXPECT_GE(v, prev);
        EXPECT_LE(v - prev, (t - prev_t) / eps + 1e-15);
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
        prev = v;
        prev_t = t;
    }
}

TEST(GrowthCheck, ModelPasses) {
    ProblemParams pp;
    pp.p = 2.0;
    pp.q = 4.0;
    pp.c0 = 2.0;
    pp.n = 4;
    const auto rep = growth_check(model(1.0, 2.0, 4.0).reaction(), pp, 50);
    EXPECT_TRUE(rep.passed) << rep.max_ratio;
}

TEST(GrowthCheck, ExponentialFails) {
    ProblemParams pp;
    pp.q = 5.0;
    pp.c0 = 100.0;
    pp.n = 2;
    const auto rep = growth_check(exponential_reaction(), pp, 20);
    EXPECT_FALSE(rep.passed);
}

TEST(GrowthCheck, ZeroPassesWithZeroRatio) {
    ProblemParams pp;
    pp.n = 3;
    const auto rep = growth_check(zero_reaction(), pp, 10);
    EXPECT_TRUE(rep.passed);
    EXPECT_EQ(rep.max_ratio, 0.0);
}

TEST(ModelReaction, PrimitiveConsistent) {
    for (double p : {2.0, 2.5, 3.0}) {
        const ModelReaction m = model(4.0, p, p + 1.5);
        const Reaction r = m.reaction();
        EXPECT_EQ(r.primitive(0, 0.0), 0.0);
        for (double t : {-2.0, -0.3, 0.1, 0.8, 3.0}) {
            const double eps = 1e-6;
            const double fd = (r.primitive(0, t + eps) - r.primitive(0, t - eps)) / (2.0 * eps);
            EXPECT_NEAR(fd, r(0, t), 1e-5 * std::max(1.0, std::abs(r(0, t))));
            const double dfd = (r(0, t + eps) - r(0, t - eps)) / (2.0 * eps);
            EXPECT_NEAR(dfd, r.derivative(0, t), 1e-5 * std::max(1.0, std::abs(dfd)));
        }
    }
}

TEST(ModelReaction, OriginSlopeIsMu) {
    for (double p : {2.0, 2.5, 3.0}) {
        const ModelReaction m = model(7.0, p, p + 1.0);
        const auto slope = origin_slope(m.reaction(), 5, p, 1e-4);
        EXPECT_NEAR(slope.min, 7.0, 7e-3);
        EXPECT_NEAR(slope.max, 7.0, 7e-3);
    }
}
