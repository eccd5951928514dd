#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "dprob/parallel.hpp"
#include "dprob/rng.hpp"

using namespace dprob;

TEST_CASE("counter streams are reproducible") {
    CounterRng a = CounterRng::stream(42, 7, 1);
    CounterRng b = CounterRng::stream(42, 7, 1);
    for (int i = 0; i < 100; ++i)
        CHECK(a() == b());
}

TEST_CASE("output i depends only on key and counter") {
    CounterRng a = CounterRng::stream(1, 2, 3);
    for (int i = 0; i < 10; ++i)
        a();
    const auto expect = a();
    CounterRng b(a.key(), 10);
    CHECK(b() == expect);
}

TEST_CASE("streams differ by seed, index and domain") {
    std::set<std::uint64_t> first;
    for (std::uint64_t s = 0; s < 4; ++s)
        for (std::uint64_t i = 0; i < 4; ++i)
            for (std::uint64_t d = 0; d < 4; ++d)
                first.insert(CounterRng::stream(s, i, d)());
    CHECK(first.size() == 64);
}

TEST_CASE("uniform and below stay in range and look uniform") {
    CounterRng r = CounterRng::stream(5, 0);
    double sum = 0.0;
    std::uint64_t counts[6] = {};
    const int n = 600'000;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
        const auto k = r.below(6);
        REQUIRE(k < 6);
        ++counts[k];
    }
    CHECK(std::abs(sum / n - 0.5) < 5 * std::sqrt(1.0 / 12 / n));
    for (auto c : counts)
        CHECK(std::abs(static_cast<double>(c) - n / 6.0) < 5 * std::sqrt(n * (1.0 / 6) * (5.0 / 6)));
}

TEST_CASE("for_each_block visits every block once for any worker count") {
    for (unsigned threads : {1u, 2u, 7u}) {
        std::vector<std::atomic<int>> hits(50);
        for_each_block(50, threads, [&](std::uint64_t b) { ++hits[b]; });
        for (auto& h : hits)
            CHECK(h == 1);
    }
}

TEST_CASE("for_each_block rethrows worker exceptions") {
    CHECK_THROWS_AS(for_each_block(10, 4,
                                   [](std::uint64_t b) {
                                       if (b == 3)
                                           throw std::runtime_error("boom");
                                   }),
                    std::runtime_error);
}
