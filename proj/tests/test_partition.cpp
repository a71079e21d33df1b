#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nbt/partition.hpp"

using namespace nbt;

namespace {

PhysicalSystem with(double b0, double alpha, double ky, EnergySign sign = EnergySign::Physical) {
    PhysicalSystem s;
    s.b0 = b0;
    s.alpha = alpha;
    s.ky = ky;
    s.sign = sign;
    return s;
}

// composite Simpson on a fine grid, plus the trapezoid end corrections
double poisson_oracle(const LevelModel& m, double beta, int n) {
    const int k = 20000 * (n + 1);
    const double h = (n + 1.0) / k;
    const auto f = [&](double x) { return std::exp(-beta * m.energy(x)); };
    double acc = f(0.0) + f(n + 1.0);
    for (int i = 1; i < k; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return acc * h / 3.0 + 0.5 * (f(0.0) + f(n + 1.0));
}

double erfi_series(double z) {
    double term = z, sum = z;
    for (int k = 1; k < 200; ++k) {
        term *= z * z / k;
        sum += term / (2 * k + 1);
    }
    return 2.0 / std::sqrt(std::numbers::pi) * sum;
}

}  // namespace

TEST(PoissonSum, Examples) {
    EXPECT_EQ(poisson_sum([](double) { return 0.0; }, 3), 0.0);
    EXPECT_NEAR(poisson_sum([](double) { return 1.0; }, 4), 6.0, 1e-14);
    const double expected = 0.5 * (1 + std::exp(-10.0)) + (1 - std::exp(-10.0));
    EXPECT_NEAR(poisson_sum([](double x) { return std::exp(-x); }, 9), expected, 1e-14);
    EXPECT_THROW(poisson_sum([](double) { return 1.0; }, -1), std::invalid_argument);
}

TEST(Partition, ExactSumExamples) {
    const PhysicalSystem s;
    EXPECT_NEAR(partition_exact(s, 1e-9, 7).value / 8.0, 1.0, 1e-6);
    const auto m = level_model(s);
    const double e0 = m.sign * 0.5 * 0.5 * (0.5 - 4.8);
    EXPECT_DOUBLE_EQ(partition_exact(s, 1.3, 0).value, std::exp(-1.3 * e0));
    EXPECT_NEAR(partition_exact(s, 1.0, 1).value, std::exp(-1.075) + std::exp(-2.475), 1e-15);

    // the sign as printed gives the positive exponents
    const auto printed = with(2.5, 1.0, 0.1, EnergySign::Mirrored);
    EXPECT_NEAR(partition_exact(printed, 1.0, 1).value / (std::exp(1.075) + std::exp(2.475)), 1.0, 1e-15);
}

TEST(Partition, HighTemperatureLimits) {
    for (int n : {0, 1, 5, 20}) {
        const PhysicalSystem s;
        EXPECT_NEAR(partition_exact(s, 1e-9, n).value / (n + 1.0), 1.0, 1e-6);
        EXPECT_NEAR(partition_poisson_quadrature(s, 1e-9, n).value / (n + 2.0), 1.0, 1e-6);
        EXPECT_NEAR(partition_closed(s, 1e-9, n).value / (n + 2.0), 1.0, 1e-6);
    }
}

TEST(Partition, ClosedMatchesQuadrature) {
    for (auto sign : {EnergySign::Physical, EnergySign::Mirrored})
        for (int n : {0, 1, 4, 12})
            for (double beta : {0.1, 1.0, 10.0}) {
                const auto s = with(2.5, 1.0, 0.1, sign);
                const auto c = partition_closed(s, beta, n);
                const auto q = partition_poisson_quadrature(s, beta, n);
                EXPECT_NEAR(c.log_value - q.log_value, 0.0, 1e-10) << n << " " << beta;
                EXPECT_FALSE(c.fallback);
            }
}

TEST(Partition, QuadratureAgainstIndependentOracle) {
    for (auto sign : {EnergySign::Physical, EnergySign::Mirrored}) {
        const auto s = with(2.5, 1.0, 0.1, sign);
        for (double beta : {0.3, 2.0}) {
            const double ref = poisson_oracle(level_model(s), beta, 3);
            EXPECT_NEAR(partition_closed(s, beta, 3).value / ref, 1.0, 1e-10);
        }
    }
}

TEST(Partition, ClosedSpotValueAtZeroC1) {
    // C1 = 0 and beta C0 = 2: with u = 2x + 1 the integral is
    // (sqrt(pi)/(4 sqrt(1/2))) (erfi(u1/sqrt2) - erfi(1/sqrt2)) for the physical sign
    const auto s = with(2.5, 1.0, 2.5);
    const double beta = 4.0;
    ASSERT_DOUBLE_EQ(spectrum_params(s).c1, 0.0);
    for (int n : {0, 1, 2}) {
        const double u1 = 2.0 * n + 3.0;
        const double z = 1.0 / std::sqrt(2.0);
        const double integral = std::sqrt(std::numbers::pi) / (4.0 * z) * (erfi_series(z * u1) - erfi_series(z));
        const auto f = [&](double x) { return std::exp(2.0 * (x + 0.5) * (x + 0.5)); };
        const double expected = integral + 0.5 * (f(0.0) + f(n + 1.0));
        EXPECT_NEAR(partition_closed(s, beta, n).value / expected, 1.0, 1e-12) << n;
    }
}

TEST(Partition, ClosedTracksExactSumInItsRegime) {
    // lowest-order Poisson is only a good proxy when many levels are thermally reachable
    const auto s = with(2.5, 1.0, 0.1, EnergySign::Mirrored);
    const double c0 = spectrum_params(s).c0;
    for (int i = 0; i <= 40; ++i) {
        const double kt = c0 * 0.5 * std::pow(40.0, i / 40.0);
        const double beta = 1.0 / kt;
        const double closed = partition_closed(s, beta, 20).value;
        const double exact = partition_exact(s, beta, 20).value;
        EXPECT_LT(std::fabs(closed / exact - 1.0), 0.05) << kt;
    }
}

TEST(Partition, RelativeErrorLimitAtHighTemperature) {
    for (int n : {0, 1, 3, 10}) {
        const PhysicalSystem s;
        const double beta = 1e-7;
        const double rel = partition_poisson_quadrature(s, beta, n).value / partition_exact(s, beta, n).value - 1.0;
        EXPECT_NEAR(rel, 1.0 / (n + 1.0), 1e-4);
    }
}

TEST(Partition, SingleLevelAtZeroC1PlusOne) {
    // C1 = -1 puts the vertex at x = 0
    const auto s = with(2.5, 1.0, 2.0, EnergySign::Mirrored);
    ASSERT_DOUBLE_EQ(spectrum_params(s).c1, -1.0);
    const double beta = 3.0;
    EXPECT_DOUBLE_EQ(partition_exact(s, beta, 0).value, std::exp(-beta * 0.5 * 0.5 * -0.5));
    EXPECT_NEAR(partition_closed(s, beta, 0).log_value, partition_poisson_quadrature(s, beta, 0).log_value, 1e-10);
}

TEST(Partition, DecreasingInBetaForPositiveLevels) {
    auto m = level_model(PhysicalSystem{});
    m.shift = 10.0;  // all retained levels positive
    for (auto method : {QMethod::ExactSum, QMethod::PoissonQuadrature, QMethod::ErfiClosed}) {
        double last = partition(m, 0.01, 3, method).value;
        for (double beta = 0.02; beta < 20.0; beta *= 1.3) {
            const double q = partition(m, beta, 3, method).value;
            EXPECT_LT(q, last) << to_string(method) << " " << beta;
            last = q;
        }
    }
}

TEST(Partition, ShiftCovariance) {
    const auto m = level_model(PhysicalSystem{});
    auto shifted = m;
    shifted.shift = 3.7;
    for (auto method : {QMethod::ExactSum, QMethod::PoissonQuadrature, QMethod::ErfiClosed})
        for (double beta : {0.1, 1.0, 10.0}) {
            const double a = partition(m, beta, 4, method).log_value;
            const double b = partition(shifted, beta, 4, method).log_value;
            EXPECT_NEAR(b, a - beta * 3.7, 1e-11 * std::max(1.0, std::fabs(a)));
        }
}

TEST(Partition, LogValueFiniteAtExtremeExponents) {
    for (auto sign : {EnergySign::Physical, EnergySign::Mirrored})
        for (double ky : {0.1, 40.0, -60.0})
            for (int n : {0, 1, 30}) {
                const auto s = with(2.5, 1.0, ky, sign);
                const auto p = spectrum_params(s);
                const double beta = 2.0 * 1e4 / (p.c0 * p.c1 * p.c1);
                const auto r = partition_closed(s, beta, n);
                EXPECT_TRUE(std::isfinite(r.log_value)) << ky << " " << n;
                EXPECT_NEAR(r.log_value, partition_poisson_quadrature(s, beta, n).log_value,
                            1e-10 * std::fabs(r.log_value));
            }
}

TEST(Partition, RejectsBadInput) {
    const PhysicalSystem s;
    EXPECT_THROW(partition_closed(s, 0.0, 1), std::invalid_argument);
    EXPECT_THROW(partition_closed(s, -1.0, 1), std::invalid_argument);
    EXPECT_THROW(partition_exact(s, 1.0, -1), std::invalid_argument);
    EXPECT_EQ(to_string(QMethod::ErfiClosed), "closed");
}
