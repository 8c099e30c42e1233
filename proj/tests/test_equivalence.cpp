#include "doctest.h"

#include "msequiv/construction.hpp"
#include "msequiv/equivalence.hpp"
#include "msequiv/msc.hpp"

using namespace msequiv;

namespace {

HighDimModel model_with(std::vector<double> rates, bool require_feasible = true) {
    ConstructionOptions o;
    o.require_feasible = require_feasible;
    return assemble_high_dim(msc::low_dim(), msc::sign_matrix(), std::move(rates), msc::default_eps(), o);
}

}  // namespace

TEST_CASE("reference MSC pair is multistability equivalent") {
    const auto h = model_with(msc::default_rates());
    const auto r = check_equivalence(OdeSystem(msc::low_dim()), OdeSystem(h.spec));
    CHECK(r.sign_check);
    CHECK(r.sign_points == 1000);
    CHECK(r.sign_mismatches.empty());
    CHECK(r.lift_check);
    CHECK(r.injective);
    CHECK(r.bijection);
    CHECK(r.low_states == 5);
    CHECK(r.high_states == 5);
    CHECK(r.unmatched_high_states == 0);
    CHECK(r.stability_check);
    CHECK(r.inconclusive.empty());
    CHECK(r.verdict);
    REQUIRE(r.pairs.size() == 5);
    const int counts[5] = {0, 0, 0, 1, 1};
    for (std::size_t k = 0; k < 5; ++k) {
        const auto& p = r.pairs[k];
        CHECK(p.low_unstable == counts[k]);
        CHECK(p.high_unstable == counts[k]);
        CHECK(p.lift_residual < 1e-8);
        CHECK(p.ok);
        REQUIRE(p.nyquist.has_value());
        CHECK(p.nyquist->winding_low == -counts[k]);
        CHECK(p.nyquist->winding_high == -counts[k]);
    }
}

TEST_CASE("slow modules break the equivalence") {
    // K4 = K5 = 1.9 makes the first module's gains negative.
    auto rates = msc::default_rates();
    rates[0] = rates[1] = 1.9;
    CHECK_THROWS_AS(model_with(rates), InfeasibleGainError);
    const auto h = model_with(rates, false);
    EquivalenceOptions o;
    o.nyquist = false;
    const auto r = check_equivalence(OdeSystem(msc::low_dim()), OdeSystem(h.spec), o);
    CHECK(!r.verdict);
    CHECK((!r.lift_check || !r.stability_check || !r.bijection || !r.sign_check));
}

TEST_CASE("sign check uses the bound parameter values") {
    // da2/dz2 has the sign of m + 0.5 z1^2 + 0.1 z3^2 - 1 - uO, so osteogenic
    // self-activation turns into repression near the origin once uO > 0.
    const auto h = model_with(msc::default_rates());
    const OdeSystem low = OdeSystem(msc::low_dim()).with_parameter("uO", 2.0);
    const OdeSystem high = OdeSystem(h.spec).with_parameter("uO", 2.0);
    EquivalenceOptions o;
    o.nyquist = false;
    const auto r = check_equivalence(low, high, o);
    CHECK(!r.sign_check);
    REQUIRE(!r.sign_mismatches.empty());
    CHECK(r.sign_mismatches.front().row == 1);
    CHECK(r.sign_mismatches.front().col == 1);
    CHECK(r.sign_mismatches.front().observed == -1);
    CHECK(!r.verdict);
    // The steady-state part of the definition still holds.
    CHECK(r.lift_check);
    CHECK(r.bijection);
    CHECK(r.stability_check);
    CHECK(r.low_states == 3);
}

TEST_CASE("high-dimensional model without construction data is rejected") {
    const OdeSystem low(msc::low_dim());
    CHECK_THROWS_AS(check_equivalence(low, low), InputError);
}
