#include "doctest.h"

#include "msequiv/analysis.hpp"
#include "msequiv/continuation.hpp"
#include "msequiv/msc.hpp"

#include <algorithm>
#include <cmath>

using namespace msequiv;

namespace {

double last_fold(const std::vector<Branch>& branches) {
    double p = -1.0;
    for (const auto& b : branches) {
        for (const auto& f : b.folds) {
            p = std::max(p, f.p);
        }
    }
    return p;
}

std::vector<Branch> stable_branches(const std::string& param, double from, double to) {
    const OdeSystem sys = OdeSystem(msc::low_dim()).with_parameter(param, from);
    std::vector<Branch> out;
    for (const auto& s : find_steady_states(sys)) {
        if (s.unstable_count == 0) {
            out.push_back(continue_branch(sys, param, from, to, s.x));
        }
    }
    return out;
}

}  // namespace

TEST_CASE("linear branch has no folds") {
    const auto s = make_model("linear", {"x"}, {{"p", 0.5}}, {"p"}, {1.0}, {{0, 10}});
    const auto b = continue_branch(OdeSystem(s), "p", 0.5, 5.0, Vector::Constant(1, 0.5));
    CHECK(b.folds.empty());
    CHECK(b.other.empty());
    REQUIRE(b.points.size() >= 3);
    CHECK(b.points.back().p == doctest::Approx(5.0));
    for (const auto& pt : b.points) {
        CHECK(pt.x[0] == doctest::Approx(pt.p).epsilon(1e-9));
        CHECK(pt.unstable_count == 0);
    }
    CHECK(detect_folds(OdeSystem(s), b).empty());
}

TEST_CASE("quadratic normal form folds at zero") {
    // dx/dt = p - (x - 1)^2, written as a(x) - x.
    const auto s = make_model("fold", {"x"}, {{"p", 1.0}}, {"p - (x - 1)^2 + x"}, {1.0}, {{0, 3}});
    const auto b = continue_branch(OdeSystem(s), "p", 1.0, -1.0, Vector::Constant(1, 2.0));
    REQUIRE(b.folds.size() == 1);
    CHECK(std::abs(b.folds[0].p) < 1e-3);
    CHECK(std::abs(b.folds[0].x[0] - 1.0) < 0.05);
    CHECK(b.folds[0].unstable_before == 0);
    CHECK(b.folds[0].unstable_after == 1);
    for (const auto& pt : b.points) {
        CHECK(std::abs(pt.p - (pt.x[0] - 1) * (pt.x[0] - 1)) < 1e-9);
        CHECK(pt.unstable_count == (pt.x[0] < 1.0 ? 1 : 0));
    }
}

TEST_CASE("branch invariants") {
    const OdeSystem sys(msc::low_dim());
    const auto states = find_steady_states(sys);
    const auto b = continue_branch(sys, "uO", 0.0, 6.0, states[0].x);
    REQUIRE(b.points.size() >= 3);
    CHECK(same_state(b.points.front().x, states[0].x));
    const ContinuationOptions o;
    for (std::size_t k = 0; k < b.points.size(); ++k) {
        const auto& pt = b.points[k];
        const OdeSystem at = sys.with_parameter("uO", pt.p);
        CHECK(at.rhs(pt.x).lpNorm<Eigen::Infinity>() < 1e-8);
        if (k > 0) {
            const auto& prev = b.points[k - 1];
            Vector d(pt.x.size() + 1);
            d << pt.x - prev.x, pt.p - prev.p;
            CHECK(d.norm() <= o.max_step * (1 + 1e-9));
        }
    }
    // Stability changes only across detected folds or reported events.
    std::size_t events = 0;
    for (std::size_t k = 0; k + 1 < b.points.size(); ++k) {
        if (b.points[k].unstable_count != b.points[k + 1].unstable_count) {
            const bool fold = std::any_of(b.folds.begin(), b.folds.end(),
                                          [&](const FoldPoint& f) { return f.segment == k; });
            const bool other = std::any_of(b.other.begin(), b.other.end(),
                                           [&](const OtherBifurcation& f) { return f.segment == k; });
            CHECK((fold || other));
            ++events;
        }
    }
    CHECK(events >= 1);
}

TEST_CASE("osteogenic stimulus removes the other fates") {
    const auto branches = stable_branches("uO", 0.0, 6.0);
    REQUIRE(branches.size() == 3);
    const double p = last_fold(branches);
    CHECK(std::abs(p - msc::expected().uo_critical) <= 0.2);
    // Beyond the last fold only the osteogenic state is left.
    const auto after = find_steady_states(OdeSystem(msc::low_dim()).with_parameter("uO", p + 0.3));
    CHECK(after.size() == 1);
    CHECK(after[0].unstable_count == 0);
}

TEST_CASE("stemness parameter collapses the switch") {
    const auto branches = stable_branches("m", 1.0, 6.0);
    REQUIRE(branches.size() == 3);
    const double p = last_fold(branches);
    CHECK(std::abs(p - msc::expected().m_critical) <= 0.2);
    const auto after = find_steady_states(OdeSystem(msc::low_dim()).with_parameter("m", p + 0.3));
    CHECK(after.size() == 1);
    CHECK(after[0].unstable_count == 0);
}

TEST_CASE("unknown parameter") {
    const OdeSystem sys(msc::low_dim());
    CHECK_THROWS_AS(continue_branch(sys, "q", 0.0, 1.0, Vector{{1.0, 1.0, 1.0}}), InputError);
}
