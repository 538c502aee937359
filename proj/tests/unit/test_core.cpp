#include "synthetic.hpp"
#include "vmr/core.hpp"
#include "vmr/error.hpp"

#include <doctest.h>

using namespace vmr;

TEST_CASE("TimeInterval rejects empty, inverted and non-finite spans") {
    CHECK_THROWS_AS(TimeInterval(3.0, 3.0), DataError);
    CHECK_THROWS_AS(TimeInterval(5.0, 2.0), DataError);
    CHECK_THROWS_AS(TimeInterval(-1.0, 2.0), DataError);
    CHECK_THROWS_AS(TimeInterval(0.0, std::numeric_limits<double>::infinity()), DataError);
    CHECK_THROWS_AS(TimeInterval(std::nan(""), 1.0), DataError);
    CHECK(TimeInterval(0.0, 0.5).length() == 0.5);
}

TEST_CASE("ScoredMoment rejects scores outside [0, 1] instead of clamping") {
    CHECK_THROWS_AS(ScoredMoment(TimeInterval(0, 1), 1.0001), DataError);
    CHECK_THROWS_AS(ScoredMoment(TimeInterval(0, 1), -0.01), DataError);
    CHECK_NOTHROW(ScoredMoment(TimeInterval(0, 1), 0.0));
    CHECK_NOTHROW(ScoredMoment(TimeInterval(0, 1), 1.0));
}

TEST_CASE("iou examples") {
    CHECK(iou({0, 10}, {5, 15}) == doctest::Approx(5.0 / 15.0));
    CHECK(iou({3, 7}, {3, 7}) == 1.0);
    CHECK(iou({0, 2}, {5, 9}) == 0.0);
    CHECK(iou({0, 5}, {5, 9}) == 0.0);
}

TEST_CASE("iou properties over random intervals") {
    synth::SplitRng rng(11);
    const auto random_interval = [&] {
        const double a = rng.uniform(0, 100);
        return TimeInterval(a, a + rng.uniform(0.01, 50));
    };
    for (int i = 0; i < 2000; ++i) {
        const auto a = random_interval();
        const auto b = random_interval();
        const double v = iou(a, b);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        CHECK(v == iou(b, a));
        CHECK(iou(a, a) == 1.0);
        const bool disjoint = a.end() <= b.start() || b.end() <= a.start();
        CHECK((v == 0.0) == disjoint);
        const double c = rng.uniform(0, 40);
        CHECK(iou(a.shifted(c), b.shifted(c)) == doctest::Approx(v).epsilon(1e-9));
    }
}

TEST_CASE("clamp_to_video") {
    CHECK(clamp_to_video({30, 45}, 35) == TimeInterval(30, 35));
    CHECK(clamp_to_video({0, 10}, 35) == TimeInterval(0, 10));
    CHECK_THROWS_AS(clamp_to_video({40, 50}, 35), DataError);
    CHECK_THROWS_AS(clamp_to_video({0, 10}, 0), UsageError);
}

TEST_CASE("ranking breaks score ties by start, then end") {
    std::vector<ScoredMoment> m = {{{5, 9}, 0.5}, {{2, 8}, 0.5}, {{2, 4}, 0.5}, {{0, 1}, 0.9}};
    rank_moments(m);
    CHECK(m[0].interval() == TimeInterval(0, 1));
    CHECK(m[1].interval() == TimeInterval(2, 4));
    CHECK(m[2].interval() == TimeInterval(2, 8));
    CHECK(m[3].interval() == TimeInterval(5, 9));
    CHECK(is_ranked(m));
}

TEST_CASE("QueryRecord validation") {
    QueryRecord q{1, "v", "q", 30.0, {}};
    CHECK_THROWS_AS(q.validate(), DataError);
    q.gt_windows = {TimeInterval(0, 30.4)};
    CHECK_THROWS_AS(q.validate(), DataError);
    CHECK_NOTHROW(q.validate(0.5));
}
