#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <string>

#include "ctw/special.hpp"
#include "oracles.hpp"

using namespace ctw;

TEST(Special, Origin) {
    EXPECT_EQ(bessel_j0(0.0), 1.0);
    EXPECT_EQ(bessel_j1(0.0), 0.0);
}

TEST(Special, FrozenTable) {
    const oracle::SpecialCheck r = oracle::special_table_check(std::string(CTW_TESTDATA) + "/special_ref.txt");
    ASSERT_TRUE(r.read);
    EXPECT_EQ(r.airy, 998);
    EXPECT_EQ(r.bessel, 998);
    EXPECT_LE(r.worst, 1.0);
    EXPECT_LE(r.ai0_error, 1e-16);
}
