#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nbt/nu_method.hpp"
#include "nbt/polynomials.hpp"

using namespace nbt;

namespace {

// coefficients of the a3 = 0 physical reduction, hand-substituted:
// xi3 -> x1, -xi2 -> x2, xi1 -> x3
NuCoefficients physical(double xi1, double xi2, double xi3) { return {1.0, 0.0, 0.0, xi3, -xi2, xi1}; }

// default dimensionless system: b = 2.5, q = ky - b = -2.4, alpha = 1
constexpr double b_field = 2.5;
constexpr double q_y = -2.4;

NuCoefficients default_at(double energy) {
    return physical(q_y * q_y - 2.0 * energy, 2.0 * b_field * q_y, b_field * b_field);
}

double physical_level(int n) { return -0.5 * (n + 0.5) * (n + 0.5 - 4.8); }

}  // namespace

TEST(DeriveParameters, AllZeroTemplate) {
    const auto d = derive_parameters({1, 0, 0, 0, 0, 0});
    for (double v : {d.a4, d.a5, d.a6, d.a7, d.a8, d.a9}) EXPECT_EQ(v, 0.0);
}

TEST(DeriveParameters, PhysicalReduction) {
    const double xi1 = 1.3, xi2 = -0.4, xi3 = 2.2;
    const auto d = derive_parameters(physical(xi1, xi2, xi3));
    EXPECT_EQ(d.a4, 0.0);
    EXPECT_EQ(d.a5, 0.0);
    EXPECT_EQ(d.a6, xi3);
    EXPECT_EQ(d.a7, xi2);
    EXPECT_EQ(d.a8, xi1);
    EXPECT_EQ(d.a9, xi3);
}

TEST(DeriveParameters, TemplateLabelsAsStated) {
    // x1 = xi1, x2 = xi2, x3 = xi3 on the template itself: a6 = xi1, a7 = -xi2, a8 = xi3, a9 = xi1
    const auto d = derive_parameters({1, 0, 0, 0.9, 0.3, 1.7});
    EXPECT_EQ(d.a6, 0.9);
    EXPECT_EQ(d.a7, -0.3);
    EXPECT_EQ(d.a8, 1.7);
    EXPECT_EQ(d.a9, 0.9);
}

TEST(DeriveParameters, ComplexRootsFlagged) {
    const auto d = derive_parameters({1, 0, 0, -1.0, 0.0, 1.0});  // a8 = 1, a9 = -1
    EXPECT_TRUE(d.k_complex());
    EXPECT_FALSE(d.branch_real());
    EXPECT_NE(d.k_minus.imag(), 0.0);
    EXPECT_DOUBLE_EQ(d.k_minus.imag(), -d.k_plus.imag());
    EXPECT_THROW(tau_prime_condition({1, 0, 0, -1, 0, 1}, d, NuBranch::KMinus), BranchError);
    EXPECT_THROW(eigenvalue_residual({1, 0, 0, -1, 0, 1}, 0, NuBranch::KMinus), BranchError);
}

TEST(DeriveParameters, RejectsNonFinite) {
    try {
        derive_parameters({1, 0, 0, 0, std::nan(""), 0});
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("x2"), std::string::npos);
    }
}

TEST(DeriveParameters, RandomRederivation) {
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int i = 0; i < 500; ++i) {
        const NuCoefficients c{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
        const auto d = derive_parameters(c);
        const double a4 = (1 - c.a1) / 2, a5 = (c.a2 - 2 * c.a3) / 2;
        const double a6 = a5 * a5 + c.x1, a7 = 2 * a4 * a5 - c.x2, a8 = a4 * a4 + c.x3;
        const double a9 = c.a3 * a7 + c.a3 * c.a3 * a8 + a6;
        EXPECT_EQ(d.a4, a4);
        EXPECT_EQ(d.a5, a5);
        EXPECT_EQ(d.a6, a6);
        EXPECT_EQ(d.a7, a7);
        EXPECT_EQ(d.a8, a8);
        EXPECT_EQ(d.a9, a9);
        const std::complex<double> root = 2.0 * std::sqrt(std::complex<double>(a8 * a9, 0.0));
        EXPECT_EQ(d.k_minus, -(a7 + 2 * c.a3 * a8) - root);
        EXPECT_EQ(d.k_plus, -(a7 + 2 * c.a3 * a8) + root);
        EXPECT_EQ(d.k_complex(), a8 * a9 < 0);
        if (d.branch_real()) {
            EXPECT_EQ(d.a10, c.a1 + 2 * a4 + 2 * std::sqrt(a8));
            EXPECT_EQ(d.a12s, a4 - std::sqrt(a8));
            EXPECT_EQ(d.a13, a5 - (std::sqrt(a9) + c.a3 * std::sqrt(a8)));
        }
    }
}

TEST(TauPrime, SingleTermWhenA3Zero) {
    const NuCoefficients c{1, 0, 0, 4.0, 0.0, 1.0};
    const auto t = tau_prime_condition(c, derive_parameters(c), NuBranch::KMinus);
    EXPECT_DOUBLE_EQ(t.value, -2.0 * std::sqrt(4.0));
    EXPECT_TRUE(t.admissible());
}

TEST(TauPrime, DefaultPhysicalSystemNegative) {
    const auto c = default_at(physical_level(0));
    EXPECT_TRUE(tau_prime_condition(c, derive_parameters(c), NuBranch::KMinus).admissible());
}

TEST(TauPrime, DegenerateBoundary) {
    const NuCoefficients c{1, 0, 0, 0, 0, 0};
    const auto t = tau_prime_condition(c, derive_parameters(c), NuBranch::KMinus);
    EXPECT_EQ(t.value, 0.0);
    EXPECT_FALSE(t.admissible());
}

TEST(EigenvalueResidual, VanishesAtClosedFormLevels) {
    for (int n = 0; n <= 1; ++n) {
        const auto c = default_at(physical_level(n));
        const auto d = derive_parameters(c);
        const double scale = std::max({std::fabs(d.a7), (2 * n + 1) * std::sqrt(d.a9), 2 * std::sqrt(d.a8 * d.a9)});
        EXPECT_LE(std::fabs(eigenvalue_residual(c, n, NuBranch::KMinus)), 1e-10 * scale) << n;
        const auto perturbed = default_at(1.1 * physical_level(n));
        EXPECT_GT(std::fabs(eigenvalue_residual(perturbed, n, NuBranch::KMinus)), 1e-3 * scale) << n;
    }
}

TEST(EigenvalueResidual, TrivialTemplate) { EXPECT_EQ(eigenvalue_residual({1, 0, 0, 0, 0, 0}, 0, NuBranch::KMinus), 0.0); }

TEST(EigenvalueResidual, KPlusCarriesTrailingA5) {
    // with all square roots zero, the branches differ only by -a5 n (2n+1 vs 2n) and the trailing +a5
    const NuCoefficients c{1.0, 2.0, 0.0, -1.0, 0.0, 0.0};  // a5 = 1, a6 = 0, a8 = 0
    const int n = 2;
    const auto d = derive_parameters(c);
    const double minus = c.a2 * n - (2 * n + 1) * d.a5 + d.a7;
    const double plus = c.a2 * n - 2 * d.a5 * n + d.a7 + d.a5;
    EXPECT_DOUBLE_EQ(eigenvalue_residual(c, n, NuBranch::KMinus), minus);
    EXPECT_DOUBLE_EQ(eigenvalue_residual(c, n, NuBranch::KPlus), plus);
}

TEST(EigenvalueResidual, AnalyticPartialDerivatives) {
    // dR/dx_i from the chain rule through a6..a9, KMinus branch
    const NuCoefficients c{0.6, 0.8, 0.3, 1.1, -0.4, 0.9};
    const int n = 3;
    const auto d = derive_parameters(c);
    const double s8 = std::sqrt(d.a8), s9 = std::sqrt(d.a9);
    const auto grad = [&](double da8, double da9, double da7) {
        return (2 * n + 1) * (da9 / (2 * s9) + c.a3 * da8 / (2 * s8)) + da7 + 2 * c.a3 * da8 +
               (da8 * d.a9 + d.a8 * da9) / std::sqrt(d.a8 * d.a9);
    };
    const double g1 = grad(0, 1, 0);                             // x1 enters a6, a9
    const double g2 = grad(0, -c.a3, -1);                        // x2 enters a7, a9
    const double g3 = grad(1, c.a3 * c.a3, 0);                   // x3 enters a8, a9
    const double h = 1e-4;
    const auto fd = [&](int which) {
        auto plus = c, minus = c;
        double* p = which == 1 ? &plus.x1 : which == 2 ? &plus.x2 : &plus.x3;
        double* m = which == 1 ? &minus.x1 : which == 2 ? &minus.x2 : &minus.x3;
        *p += h;
        *m -= h;
        return (eigenvalue_residual(plus, n, NuBranch::KMinus) - eigenvalue_residual(minus, n, NuBranch::KMinus)) /
               (2 * h);
    };
    EXPECT_NEAR(fd(1), g1, 1e-6);
    EXPECT_NEAR(fd(2), g2, 1e-6);
    EXPECT_NEAR(fd(3), g3, 1e-6);
}

TEST(Wavefunction, LaguerreDescriptorOfPhysicalReduction) {
    const double xi1 = 1.44, xi2 = -12.0, xi3 = 6.25;
    const auto c = physical(xi1, xi2, xi3);
    const auto form = wavefunction_descriptor(c, derive_parameters(c), 2, NuBranch::KMinus);
    EXPECT_EQ(form.family, PolynomialFamily::Laguerre);
    EXPECT_EQ(form.degree, 2);
    EXPECT_DOUBLE_EQ(form.power, std::sqrt(xi1));
    EXPECT_DOUBLE_EQ(form.tail, -std::sqrt(xi3));
    EXPECT_DOUBLE_EQ(form.laguerre_index, 2 * std::sqrt(xi1));
    EXPECT_DOUBLE_EQ(form.laguerre_scale, 2 * std::sqrt(xi3));
    const double s = 0.37;
    const double expect = std::pow(s, std::sqrt(xi1)) * std::exp(-std::sqrt(xi3) * s) *
                          laguerre(2, 2 * std::sqrt(xi1), 2 * std::sqrt(xi3) * s);
    EXPECT_NEAR(evaluate_wavefunction(form, s), expect, 1e-14);
}

TEST(Wavefunction, DegreeZeroIsConstantPolynomial) {
    const NuCoefficients lag{1, 0, 0, 2.0, 0.5, 1.0};
    auto form = wavefunction_descriptor(lag, derive_parameters(lag), 0, NuBranch::KMinus);
    const double s = 0.8;
    EXPECT_DOUBLE_EQ(evaluate_wavefunction(form, s), std::pow(s, form.power) * std::exp(form.tail * s));
    const NuCoefficients jac{1, 0.5, 1.0, 2.0, 0.5, 1.0};
    form = wavefunction_descriptor(jac, derive_parameters(jac), 0, NuBranch::KMinus);
    EXPECT_EQ(form.family, PolynomialFamily::Jacobi);
    // a3 = 1, s = 0.5: weight (1 - 0.5)^(-power - tail)
    EXPECT_NEAR(evaluate_wavefunction(form, 0.5), std::pow(0.5, form.power) * std::pow(0.5, -form.power - form.tail), 1e-13);
}

TEST(Wavefunction, JacobiIndices) {
    const NuCoefficients c{1, 0.5, 1.0, 2.0, 0.5, 1.0};
    const auto d = derive_parameters(c);
    ASSERT_TRUE(d.branch_real());
    const auto form = wavefunction_descriptor(c, d, 3, NuBranch::KMinus);
    EXPECT_DOUBLE_EQ(form.jacobi_a, d.a10 - 1);
    EXPECT_DOUBLE_EQ(form.jacobi_b, d.a11 / c.a3 - d.a10 - 1);
    const auto star = wavefunction_descriptor(c, d, 3, NuBranch::KPlus);
    EXPECT_DOUBLE_EQ(star.jacobi_a, d.a10s - 1);
    EXPECT_DOUBLE_EQ(star.jacobi_b, d.a11s / c.a3 - d.a10 - 1);  // unstarred a10, as stated
    EXPECT_DOUBLE_EQ(star.power, d.a12s);
    EXPECT_DOUBLE_EQ(star.tail, d.a13s);
}

TEST(Wavefunction, DomainErrors) {
    const NuCoefficients c{1, 0.5, 1.0, 2.0, 0.5, 1.0};
    const auto form = wavefunction_descriptor(c, derive_parameters(c), 1, NuBranch::KMinus);
    EXPECT_THROW(evaluate_wavefunction(form, 0.0), std::domain_error);
    EXPECT_THROW(evaluate_wavefunction(form, 1.5), std::domain_error);
}

TEST(Wavefunction, JacobiConvergesToLaguerreAsA3Vanishes) {
    const int n = 2;
    const double s = 0.8;
    const auto make = [](double a3) { return NuCoefficients{1.0, 0.3, a3, 0.5, 0.2, 0.7}; };
    const auto lag_c = make(0.0);
    const double target = evaluate_wavefunction(wavefunction_descriptor(lag_c, derive_parameters(lag_c), n, NuBranch::KMinus), s);
    double previous = std::numeric_limits<double>::infinity();
    for (double a3 : {1e-2, 1e-4, 1e-6}) {
        const auto c = make(a3);
        const double v = evaluate_wavefunction(wavefunction_descriptor(c, derive_parameters(c), n, NuBranch::KMinus), s);
        const double gap = std::fabs(v - target);
        EXPECT_LT(gap, previous) << a3;
        previous = gap;
    }
    EXPECT_LT(previous, 1e-4 * std::fabs(target));
}

TEST(SolveEigenvalue, RecoversPhysicalLevel) {
    const auto root = solve_eigenvalue([](double e) { return default_at(e); }, 1, NuBranch::KMinus, 2.0, 2.87);
    EXPECT_NEAR(root.x, physical_level(1), 1e-12);
}
