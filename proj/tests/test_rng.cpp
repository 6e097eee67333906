#include <doctest.h>

#include "memq/rng.hpp"

#include <cmath>
#include <set>

using namespace memq;

TEST_CASE("derived seeds are stable and distinct per component and index") {
    uint64_t a = derive_seed(42, "graph", 0);
    CHECK(a == derive_seed(42, "graph", 0));
    CHECK(a != derive_seed(42, "graph", 1));
    CHECK(a != derive_seed(42, "estimate", 0));
    CHECK(a != derive_seed(43, "graph", 0));
}

TEST_CASE("same seed gives an identical stream") {
    Rng a(7), b(7);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("uniform01 lies in [0,1) and below() respects the bound") {
    Rng r(1);
    for (int i = 0; i < 1000; ++i) {
        double x = r.uniform01();
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
        CHECK(r.below(7) < 7);
    }
}

TEST_CASE("below covers all residues") {
    Rng r(3);
    std::set<uint64_t> seen;
    for (int i = 0; i < 200; ++i) seen.insert(r.below(5));
    CHECK(seen.size() == 5);
}

TEST_CASE("from_cdf picks consistent indices") {
    Rng r(11);
    std::vector<double> cdf = {0.1, 0.1, 0.7, 1.0}; // index 1 has mass zero
    int counts[4] = {0, 0, 0, 0};
    for (int i = 0; i < 20000; ++i) ++counts[r.from_cdf(cdf)];
    CHECK(counts[1] == 0);
    CHECK(counts[0] > 1500);
    CHECK(counts[2] > 10000);
    CHECK(counts[3] > 4500);
}

TEST_CASE("normal has roughly unit variance") {
    Rng r(5);
    double sum = 0.0, sumsq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        double x = r.normal();
        sum += x;
        sumsq += x * x;
    }
    double mean = sum / n;
    double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(var - 1.0) < 0.03);
}
