#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "s3ovs/fdist.hpp"
#include "s3ovs/metrics.hpp"
#include "s3ovs/ranking.hpp"
#include "s3ovs/rng.hpp"

using namespace s3ovs;

TEST_CASE("metrics: identity, degenerate classifier, formula case") {
    const std::vector<int> truth{+1, +1, -1, -1};

    SUBCASE("perfect prediction") {
        const MetricsReport r = metrics(truth, truth, +1);
        CHECK(r.acc == 1.0);
        CHECK(r.macc == 1.0);
        CHECK(r.gm == 1.0);
    }
    SUBCASE("always-positive classifier on a balanced set") {
        const std::vector<int> all_pos{+1, +1, +1, +1};
        const MetricsReport r = metrics(truth, all_pos, +1);
        CHECK(r.s_pos == 1.0);
        CHECK(r.s_neg == 0.0);
        CHECK(r.gm == 0.0);
        CHECK(r.macc == 0.5);
    }
    SUBCASE("s_pos=0.8, s_neg=0.5") {
        std::vector<int> t, p;
        for (int i = 0; i < 10; ++i) {
            t.push_back(+1);
            p.push_back(i < 8 ? +1 : -1);
        }
        for (int i = 0; i < 10; ++i) {
            t.push_back(-1);
            p.push_back(i < 5 ? -1 : +1);
        }
        const MetricsReport r = metrics(t, p, +1);
        CHECK(r.s_pos == doctest::Approx(0.8));
        CHECK(r.s_neg == doctest::Approx(0.5));
        CHECK(r.gm == doctest::Approx(std::sqrt(0.40)));
        CHECK(r.macc == doctest::Approx(0.65));
    }
}

TEST_CASE("metrics: absent class gets vacuous sensitivity 1") {
    const std::vector<int> truth{+1, +1, +1};
    const std::vector<int> pred{+1, -1, +1};
    const MetricsReport r = metrics(truth, pred, +1);
    CHECK(r.s_neg == 1.0);
    CHECK(r.s_neg_vacuous);
    CHECK_FALSE(r.s_pos_vacuous);
    CHECK_THROWS_AS(metrics(std::vector<int>{}, std::vector<int>{}, +1),
                    std::invalid_argument);
}

TEST_CASE("metrics properties over random confusion matrices") {
    Rng rng(2718);
    for (int trial = 0; trial < 10000; ++trial) {
        const long tp = static_cast<long>(rng.uniform_int(50));
        const long fn = static_cast<long>(rng.uniform_int(50));
        const long tn = static_cast<long>(rng.uniform_int(50));
        const long fp = static_cast<long>(rng.uniform_int(50));
        if (tp + fn + tn + fp == 0) continue;
        std::vector<int> truth, pred;
        for (long i = 0; i < tp; ++i) { truth.push_back(+1); pred.push_back(+1); }
        for (long i = 0; i < fn; ++i) { truth.push_back(+1); pred.push_back(-1); }
        for (long i = 0; i < tn; ++i) { truth.push_back(-1); pred.push_back(-1); }
        for (long i = 0; i < fp; ++i) { truth.push_back(-1); pred.push_back(+1); }

        const MetricsReport r = metrics(truth, pred, +1);
        CHECK(r.gm <= r.macc + 1e-12);  // AM-GM
        if (r.s_pos == r.s_neg) CHECK(r.gm == doctest::Approx(r.macc));
        if (tp + fn == tn + fp) CHECK(r.acc == doctest::Approx(r.macc));

        // Swapping the positive class swaps sensitivities, fixes gm/macc.
        const MetricsReport swapped = metrics(truth, pred, -1);
        CHECK(swapped.s_pos == doctest::Approx(r.s_neg));
        CHECK(swapped.s_neg == doctest::Approx(r.s_pos));
        CHECK(swapped.gm == doctest::Approx(r.gm));
        CHECK(swapped.macc == doctest::Approx(r.macc));
    }
}

TEST_CASE("mean_ranks: tie averaging, symmetry, dominance") {
    SUBCASE("single dataset with a tie") {
        Matrix scores(1, 3);
        scores(0, 0) = 0.9;
        scores(0, 1) = 0.8;
        scores(0, 2) = 0.8;
        // mean_ranks needs 2 datasets; duplicate the row.
        Matrix two(2, 3);
        for (int j = 0; j < 3; ++j) two(0, j) = two(1, j) = scores(0, j);
        const RankTable t = mean_ranks({"d1", "d2"}, {"a", "b", "c"}, two, true);
        CHECK(t.ranks(0, 0) == 1.0);
        CHECK(t.ranks(0, 1) == 2.5);
        CHECK(t.ranks(0, 2) == 2.5);
    }
    SUBCASE("identical columns share the average rank") {
        Matrix scores(3, 4, 0.5);
        const RankTable t = mean_ranks({"a", "b", "c"}, {"m1", "m2", "m3", "m4"},
                                       scores, true);
        for (double r : t.mean_ranks) CHECK(r == doctest::Approx(2.5));  // (k+1)/2
    }
    SUBCASE("dominant method ranks first everywhere") {
        Matrix scores(3, 3);
        for (int i = 0; i < 3; ++i) {
            scores(i, 0) = 0.9;
            scores(i, 1) = 0.5 + 0.01 * i;
            scores(i, 2) = 0.4;
        }
        const RankTable t = mean_ranks({"a", "b", "c"}, {"A", "B", "C"}, scores, true);
        CHECK(t.mean_ranks[0] == 1.0);
        // Rank sum per dataset is k(k+1)/2.
        for (int i = 0; i < 3; ++i)
            CHECK(t.ranks(i, 0) + t.ranks(i, 1) + t.ranks(i, 2) == doctest::Approx(6.0));
    }
    SUBCASE("lower-is-better flips the order") {
        Matrix scores(2, 2);
        scores(0, 0) = 1.0;
        scores(0, 1) = 2.0;
        scores(1, 0) = 1.0;
        scores(1, 1) = 2.0;
        const RankTable t = mean_ranks({"a", "b"}, {"A", "B"}, scores, false);
        CHECK(t.mean_ranks[0] == 1.0);
        CHECK(t.mean_ranks[1] == 2.0);
    }
    SUBCASE("non-finite scores are rejected") {
        Matrix scores(2, 2);
        scores(0, 0) = std::nan("");
        CHECK_THROWS_AS(mean_ranks({"a", "b"}, {"A", "B"}, scores, true),
                        std::invalid_argument);
    }
}

TEST_CASE("friedman_test: null case and degenerate maximum") {
    SUBCASE("identical ranks give chi2 = 0 and no rejection") {
        Matrix scores(4, 3, 0.7);
        const RankTable t =
            mean_ranks({"a", "b", "c", "d"}, {"A", "B", "C"}, scores, true);
        const FriedmanResult f = friedman_test(t, 0.05);
        CHECK(f.chi2 == doctest::Approx(0.0));
        CHECK(f.f_value == doctest::Approx(0.0));
        CHECK_FALSE(f.reject);
    }
    SUBCASE("perfectly consistent rankings hit the degenerate guard") {
        Matrix scores(5, 3);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 3; ++j) scores(i, j) = 1.0 - 0.1 * j;
        const RankTable t =
            mean_ranks({"a", "b", "c", "d", "e"}, {"A", "B", "C"}, scores, true);
        const FriedmanResult f = friedman_test(t, 0.05);
        CHECK(f.degenerate);
        CHECK(std::isinf(f.f_value));
        CHECK(f.reject);
    }
}

TEST_CASE("F critical values match the published intervals") {
    // k = 11 methods over N = 26 datasets -> df (10, 250).
    CHECK(f_quantile(0.95, 10, 250) == doctest::Approx(1.87).epsilon(0.006));
    // k = 7 methods over N = 26 datasets -> df (6, 150).
    CHECK(f_quantile(0.95, 6, 150) == doctest::Approx(2.16).epsilon(0.005));
}

TEST_CASE("incomplete beta sanity and F quantile round trip") {
    // I_x(1, 1) = x (uniform distribution).
    for (double x : {0.0, 0.25, 0.5, 0.75, 1.0})
        CHECK(regularized_incomplete_beta(1.0, 1.0, x) == doctest::Approx(x));
    // Symmetry I_x(a, b) = 1 - I_{1-x}(b, a).
    CHECK(regularized_incomplete_beta(2.5, 4.0, 0.3) ==
          doctest::Approx(1.0 - regularized_incomplete_beta(4.0, 2.5, 0.7)));

    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const double d1 = 1.0 + rng.uniform_int(30);
        const double d2 = 2.0 + rng.uniform_int(300);
        const double p = 0.05 + 0.9 * rng.uniform();
        const double q = f_quantile(p, d1, d2);
        CHECK(f_cdf(q, d1, d2) == doctest::Approx(p).epsilon(1e-6));
    }
    CHECK_THROWS_AS(f_quantile(0.0, 3, 5), std::invalid_argument);
    CHECK_THROWS_AS(f_cdf(1.0, -1, 5), std::invalid_argument);
}

TEST_CASE("friedman chi2 formula on a hand-computed table") {
    // Three methods, two datasets, ranks fixed by construction:
    // dataset 1 -> (1, 2, 3), dataset 2 -> (2, 1, 3).
    Matrix scores(2, 3);
    scores(0, 0) = 0.9; scores(0, 1) = 0.8; scores(0, 2) = 0.1;
    scores(1, 0) = 0.8; scores(1, 1) = 0.9; scores(1, 2) = 0.1;
    const RankTable t = mean_ranks({"a", "b"}, {"A", "B", "C"}, scores, true);
    CHECK(t.mean_ranks[0] == doctest::Approx(1.5));
    CHECK(t.mean_ranks[1] == doctest::Approx(1.5));
    CHECK(t.mean_ranks[2] == doctest::Approx(3.0));
    // chi2 = 12N/(k(k+1)) (sum R^2 - k(k+1)^2/4) = 2(4.5+9-12) = 3... with
    // N=2, k=3: 12*2/12 * (2.25+2.25+9 - 12) = 2 * 1.5 = 3.
    const FriedmanResult f = friedman_test(t, 0.05);
    CHECK(f.chi2 == doctest::Approx(3.0));
    CHECK(f.df1 == 2);
    CHECK(f.df2 == 2);
}
