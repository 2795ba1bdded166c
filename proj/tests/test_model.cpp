#include <gtest/gtest.h>

#include "stablekernel/errors.hpp"
#include "stablekernel/model.hpp"
#include "stablekernel/presets.hpp"

namespace sk = stablekernel;

TEST(Model, ConstantKernelPassesEveryAssumption) {
    for (double alpha : {0.75, 1.0, 1.5}) {
        const auto report = sk::validate_model(sk::constant_model(alpha));
        EXPECT_TRUE(report.passed()) << "alpha=" << alpha;
    }
}

TEST(Model, SignAsymmetricKernelFailsOddMomentAtUnitIndex) {
    const auto report = sk::validate_model(sk::sign_asymmetric_model(1.0));
    EXPECT_FALSE(report.passed());
    bool odd_failed = false;
    for (const auto& c : report.checks)
        if (c.status == sk::CheckStatus::fail) {
            odd_failed = true;
            // |n(r) - n(-r)| / (2 kappa1) = a / (1 + a) for the default a = 1/2
            EXPECT_NEAR(c.worst_violation, 1.0 / 3.0, 1e-12);
        }
    EXPECT_TRUE(odd_failed);
}

TEST(Model, EvenCosineKernelPassesAtUnitIndex) { EXPECT_TRUE(sk::validate_model(sk::even_cosine_model(1.0)).passed()); }

TEST(Model, SpecFieldChecks) {
    auto s = sk::constant_model(1.5);
    EXPECT_NO_THROW(sk::check_spec_fields(s));
    s.alpha = 2.0;
    EXPECT_THROW(sk::check_spec_fields(s), sk::ConfigError);
    s = sk::constant_model(1.5);
    s.dim = 3;
    EXPECT_THROW(sk::check_spec_fields(s), sk::ConfigError);
}

TEST(Model, ThetaHatAndDriftGate) {
    auto s = sk::sinusoidal_model(1.5);
    EXPECT_DOUBLE_EQ(s.theta_hat(), 0.375);
    auto d = sk::with_constant_drift(sk::constant_model(0.75), 0.3);
    EXPECT_FALSE(d.has_drift());  // drift is ignored for alpha <= 1
    EXPECT_EQ(d.drift_at({0.0, 0.0})[0], 0.0);
    auto e = sk::with_constant_drift(sk::constant_model(1.5), 0.3);
    EXPECT_DOUBLE_EQ(e.drift_at({2.0, 0.0})[0], 0.3);
}

TEST(Model, PresetRegistry) {
    for (const auto& name : sk::preset_names()) EXPECT_NO_THROW(sk::make_preset(name)) << name;
    EXPECT_THROW(sk::make_preset("no-such-preset"), sk::ConfigError);
    EXPECT_THROW(sk::make_preset("constant", {{"bogus", 1.0}}), sk::ConfigError);
    EXPECT_DOUBLE_EQ(sk::make_preset("constant-cauchy").alpha, 1.0);
}

TEST(Model, RescaledKernel) {
    const auto s = sk::sinusoidal_model(1.5);
    const auto r = sk::rescale(s, 2.0);
    // n~(x, h) = n(x/a, h/a)
    EXPECT_NEAR(r.kernel({1.0, 0.0}, {0.3, 0.0}), s.kernel({0.5, 0.0}, {0.15, 0.0}), 1e-14);
}
