#pragma once

#include <gtest/gtest.h>

#include "cuefuse/distributions.hpp"
#include "cuefuse/error.hpp"

namespace cuefuse::test {

inline void expect_valid(const EmotionDistribution& d) {
    double s = 0.0;
    for (double p : d.probs()) {
        EXPECT_GE(p, 0.0);
        EXPECT_LE(p, 1.0);
        s += p;
    }
    EXPECT_NEAR(s, 1.0, kSumTolerance);
}

template <typename F>
void expect_error(ErrorKind kind, F&& f) {
    try {
        f();
        ADD_FAILURE() << "expected " << error_kind_name(kind);
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), kind) << e.what();
    }
}

}  // namespace cuefuse::test
