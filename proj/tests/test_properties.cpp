#include <gtest/gtest.h>

#include "property_suites.hpp"

namespace approxsym::testing {
namespace {

constexpr unsigned kSeed = 20240611;
constexpr int kInstances = 120;

void expect_clean(const SuiteResult& r) {
    EXPECT_GE(r.instances, 100) << r.name;
    EXPECT_EQ(r.failures, 0) << r.name << ": " << r.first_failure;
}

TEST(Properties, RecursionOperatorLeibniz) { expect_clean(r_leibniz(kSeed, kInstances)); }
TEST(Properties, TotalDerivativeLeibniz) { expect_clean(total_derivative_leibniz(kSeed, kInstances)); }
TEST(Properties, TotalDerivativesCommute) { expect_clean(total_derivative_commute(kSeed, kInstances)); }
TEST(Properties, GaugeShift) { expect_clean(gauge_shift(kSeed, kInstances)); }
TEST(Properties, EpsShift) { expect_clean(eps_shift(kSeed, kInstances)); }
TEST(Properties, ZerothOrderExactness) { expect_clean(zeroth_order(kSeed, kInstances)); }
TEST(Properties, RoundTrip) { expect_clean(round_trip(kSeed, kInstances)); }

TEST(Properties, OtherSeedsStayClean) {
    for (unsigned seed : {1u, 2u, 3u}) {
        expect_clean(r_leibniz(seed, 100));
        expect_clean(total_derivative_leibniz(seed, 100));
        expect_clean(round_trip(seed, 100));
    }
}

}  // namespace
}  // namespace approxsym::testing
