#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bhsim/assignment.hpp"
#include "bhsim/core.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

using namespace bhsim;

namespace {

// Exhaustive minimum over every injection of the smaller side into the larger.
double brute_force(const Eigen::MatrixXd& c) {
    const bool wide = c.cols() >= c.rows();
    const Eigen::MatrixXd m = wide ? c : Eigen::MatrixXd(c.transpose());
    std::vector<int> cols(m.cols());
    std::iota(cols.begin(), cols.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double s = 0;
        for (int r = 0; r < m.rows(); ++r) s += m(r, cols[r]);
        best = std::min(best, s);
    } while (std::next_permutation(cols.begin(), cols.end()));
    return best;
}

void check_structure(const Assignment& a, const Eigen::MatrixXd& c, double gate) {
    std::set<int> rows, cols;
    for (auto [r, k] : a.matches) {
        CHECK(rows.insert(r).second);
        CHECK(cols.insert(k).second);
        CHECK(c(r, k) <= gate);
    }
    for (int r : a.unmatched_rows) CHECK(rows.insert(r).second);
    for (int k : a.unmatched_cols) CHECK(cols.insert(k).second);
    CHECK(rows.size() == static_cast<std::size_t>(c.rows()));
    CHECK(cols.size() == static_cast<std::size_t>(c.cols()));
}

}  // namespace

TEST_CASE("zero diagonal") {
    Eigen::MatrixXd c(2, 2);
    c << 0, 1, 1, 0;
    const auto a = solve_assignment(c);
    CHECK(a.matches == std::vector<std::pair<int, int>>{{0, 0}, {1, 1}});
    CHECK(a.total_cost == 0.0);
}

TEST_CASE("anti-diagonal optimum") {
    Eigen::MatrixXd c(2, 2);
    c << 4, 1, 2, 3;
    const auto a = solve_assignment(c);
    CHECK(a.matches == std::vector<std::pair<int, int>>{{0, 1}, {1, 0}});
    CHECK(a.total_cost == 3.0);
}

TEST_CASE("gate demotes a matched pair") {
    Eigen::MatrixXd c(1, 1);
    c << 200;
    const auto a = solve_assignment(c, 80.0);
    CHECK(a.matches.empty());
    CHECK(a.unmatched_rows == std::vector<int>{0});
    CHECK(a.unmatched_cols == std::vector<int>{0});
}

TEST_CASE("empty and rectangular shapes") {
    const auto e = solve_assignment(Eigen::MatrixXd(0, 3));
    CHECK(e.matches.empty());
    CHECK(e.unmatched_cols.size() == 3);

    Eigen::MatrixXd c(2, 3);
    c << 5, 1, 9,
         1, 7, 2;
    const auto a = solve_assignment(c);
    CHECK(a.total_cost == 2.0);
    CHECK(a.unmatched_cols == std::vector<int>{2});
    check_structure(a, c, 1e300);
}

TEST_CASE("rejects invalid costs") {
    Eigen::MatrixXd c(1, 2);
    c << 1, -1;
    CHECK_THROWS_AS(solve_assignment(c), PreconditionError);
    c << 1, std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(solve_assignment(c), PreconditionError);
    c << 1, NAN;
    CHECK_THROWS_AS(solve_assignment(c), PreconditionError);
}

TEST_CASE("matches brute force on random matrices") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> dim(1, 6);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    for (int trial = 0; trial < 300; ++trial) {
        Eigen::MatrixXd c(dim(rng), dim(rng));
        for (int i = 0; i < c.size(); ++i) c.data()[i] = trial % 3 == 0 ? std::floor(u(rng) / 10) : u(rng);
        const auto a = solve_assignment(c);
        CHECK(a.total_cost == doctest::Approx(brute_force(c)).epsilon(1e-12));
        CHECK(a.matches.size() == static_cast<std::size_t>(std::min(c.rows(), c.cols())));
        check_structure(a, c, 1e300);
    }
}

TEST_CASE("gating never keeps an over-gate pair") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 200.0);
    for (int trial = 0; trial < 200; ++trial) {
        Eigen::MatrixXd c(4, 5);
        for (int i = 0; i < c.size(); ++i) c.data()[i] = u(rng);
        check_structure(solve_assignment(c, 80.0), c, 80.0);
    }
}
