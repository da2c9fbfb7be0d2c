#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tsr/filtering.hpp"
#include "tsr/rng.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace tsr;

namespace {

// independent oracle: repeated max-scan selection instead of a sort
std::vector<int> filter_oracle(const std::vector<double>& u, double ratio) {
    int p = static_cast<int>(u.size());
    int keep = std::max(1, static_cast<int>(std::floor(ratio * p)));
    std::vector<bool> taken(u.size(), false);
    std::vector<int> chosen;
    for (int k = 0; k < keep; ++k) {
        int best = -1;
        for (int i = 0; i < p; ++i) {
            if (taken[static_cast<std::size_t>(i)]) continue;
            if (best < 0 || u[static_cast<std::size_t>(i)] > u[static_cast<std::size_t>(best)])
                best = i;  // strict >, so ties resolve to the lower index
        }
        taken[static_cast<std::size_t>(best)] = true;
        chosen.push_back(best);
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

}  // namespace

TEST_CASE("outcome_uncertainty is the population standard deviation") {
    CHECK(outcome_uncertainty({1.0, 1.0, 1.0}) == 0.0);
    CHECK(outcome_uncertainty({0.0, 2.0}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(outcome_uncertainty({1.0, 2.0, 3.0}) ==
          doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-12));
    CHECK(outcome_uncertainty({5.0}) == 0.0);

    rng::Stream s(12);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 1 + static_cast<int>(s.next_below(12));
        std::vector<double> r(static_cast<std::size_t>(n));
        for (double& x : r) x = (s.next_double() - 0.5) * 20.0;
        double mean = 0.0;
        for (double x : r) mean += x;
        mean /= n;
        double var = 0.0;
        for (double x : r) var += (x - mean) * (x - mean);
        var /= n;
        CHECK(outcome_uncertainty(r) == doctest::Approx(std::sqrt(var)).epsilon(1e-12));
    }
}

TEST_CASE("retained count is max(1, floor(ratio * P))") {
    std::vector<double> u = {0.1, 0.9, 0.5, 0.7, 0.3, 0.2, 0.8, 0.4};
    CHECK(filter_groups(u, 0.25).size() == 2);   // floor(2.0)
    CHECK(filter_groups(u, 0.2).size() == 1);    // floor(1.6)
    CHECK(filter_groups(u, 0.1).size() == 1);    // max(1, 0)
    CHECK(filter_groups(u, 1.0).size() == 8);
    CHECK(filter_groups({0.5, 0.4, 0.3, 0.2, 0.1}, 0.5).size() == 2);  // floor(2.5)
    CHECK(filter_groups({1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0}, 0.25).size() == 1);
}

TEST_CASE("the most uncertain groups survive, indices come back ascending") {
    std::vector<double> u = {0.1, 0.9, 0.5, 0.7};
    CHECK(filter_groups(u, 0.5) == std::vector<int>{1, 3});
    CHECK(filter_groups(u, 0.75) == std::vector<int>{1, 2, 3});
    CHECK(filter_groups(u, 1.0) == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("ties break toward the lower group index") {
    std::vector<double> u = {0.5, 0.5, 0.5, 0.5};
    CHECK(filter_groups(u, 0.5) == std::vector<int>{0, 1});
    CHECK(filter_groups({0.2, 0.5, 0.5, 0.2}, 0.5) == std::vector<int>{1, 2});
    CHECK(filter_groups({0.2, 0.5, 0.2, 0.5}, 0.25) == std::vector<int>{1});
}

TEST_CASE("filtering matches the selection oracle on random instances") {
    rng::Stream s(777);
    for (int trial = 0; trial < 1000; ++trial) {
        int p = 1 + static_cast<int>(s.next_below(16));
        std::vector<double> u(static_cast<std::size_t>(p));
        // draw from a small value set so ties are common
        for (double& x : u) x = static_cast<double>(s.next_below(5)) / 4.0;
        double ratio = (1.0 + static_cast<double>(s.next_below(100))) / 100.0;
        CHECK(filter_groups(u, ratio) == filter_oracle(u, ratio));
    }
}

TEST_CASE("bad inputs are rejected") {
    CHECK_THROWS_AS(filter_groups({}, 0.5), ContractViolation);
    CHECK_THROWS_AS(filter_groups({0.5}, 0.0), ConfigError);
    CHECK_THROWS_AS(filter_groups({0.5}, -0.25), ConfigError);
    CHECK_THROWS_AS(filter_groups({0.5}, 1.25), ConfigError);
    CHECK_NOTHROW(filter_groups({0.5}, 1.0));
}
