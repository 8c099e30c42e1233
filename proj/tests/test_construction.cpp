#include "doctest.h"

#include "oracles.hpp"

#include "msequiv/analysis.hpp"
#include "msequiv/construction.hpp"
#include "msequiv/frequency.hpp"
#include "msequiv/msc.hpp"
#include "msequiv/sampling.hpp"

#include <random>

using namespace msequiv;

namespace {

std::array<double, 6> as_array(const std::vector<double>& k) {
    std::array<double, 6> a{};
    std::copy(k.begin(), k.end(), a.begin());
    return a;
}

HighDimModel reference_model() {
    return assemble_high_dim(msc::low_dim(), msc::sign_matrix(), msc::default_rates(),
                             msc::default_eps());
}

}  // namespace

TEST_CASE("module rows are linear") {
    const auto h = reference_model();
    const OdeSystem sys(h.spec);
    const Vector x = Vector::LinSpaced(9, 1.0, 9.0);
    const Vector f = sys.rhs(x);
    CHECK(f[3] == doctest::Approx(x[0] + x[3] + x[4] - 3 * x[3]));
    CHECK(f[6] == doctest::Approx(x[1] - 1 * x[6]));
    CHECK(h.spec.interaction_text(3) == "x1 + x4 + x5");
    CHECK(h.spec.interaction_text(6) == "x2");
}

TEST_CASE("module row without inputs decays") {
    // Gene 3 has no inputs at all and belongs to no module.
    const SignMatrix s({{1, 0, 0}, {0, 1, 0}, {0, 0, 0}});
    const auto a = check_modular_structure(s, 2);
    CHECK(!a.master_of[2].has_value());
    const std::vector<double> eps{1e-3, 1e-3};
    const auto low = make_model("two", {"z1", "z2"}, {}, {"z1/(1 + z1)", "z2/(1 + z2)"}, {0.5, 0.5},
                                {{0, 5}, {0, 5}});
    const auto h = assemble_high_dim(low, s, std::vector<double>{2.0}, eps);
    const OdeSystem sys(h.spec);
    const Vector x{{1.0, 2.0, 3.0}};
    CHECK(sys.rhs(x)[2] == doctest::Approx(-6.0));
}

TEST_CASE("steady-state gains follow the closed forms") {
    const auto a = check_modular_structure(msc::sign_matrix(), 3);
    for (const auto& k : {std::vector<double>{3, 3, 1, 1, 1, 1}, std::vector<double>{4, 2.5, 0.7, 2, 3, 5}}) {
        const auto g = oracle::msc_gains(as_array(k));
        const auto s = msc::sign_matrix();
        CHECK(steady_state_gain(s, a, k, 0, 3) == doctest::Approx(g.g41).epsilon(1e-12));
        CHECK(steady_state_gain(s, a, k, 0, 4) == doctest::Approx(g.g51).epsilon(1e-12));
        CHECK(steady_state_gain(s, a, k, 0, 5) == doctest::Approx(g.g61).epsilon(1e-12));
        CHECK(steady_state_gain(s, a, k, 1, 6) == doctest::Approx(g.g72).epsilon(1e-12));
        CHECK(steady_state_gain(s, a, k, 1, 7) == doctest::Approx(g.g82).epsilon(1e-12));
        CHECK(steady_state_gain(s, a, k, 1, 8) == doctest::Approx(g.g92).epsilon(1e-12));
    }
    const auto h = reference_model();
    const std::vector<double> expected{1, 1, 1, 1, 1, 2, 1, 1, 1};
    for (std::size_t i = 0; i < 9; ++i) {
        CHECK(std::abs(h.gains[i] - expected[i]) < 1e-12);
    }
}

TEST_CASE("single module gene has gain 1/K") {
    const SignMatrix s({{1, 0}, {1, 0}});
    const auto a = check_modular_structure(s, 1);
    for (double k : {0.3, 1.0, 7.0}) {
        CHECK(steady_state_gain(s, a, std::vector<double>{k}, 0, 1) == doctest::Approx(1.0 / k));
        const Complex lam(0.2, 1.5);
        CHECK(std::abs(transfer_gain(s, a, std::vector<double>{k}, 0, 1, lam) - 1.0 / (lam + k)) < 1e-14);
    }
}

TEST_CASE("transfer gain at zero equals the steady-state gain and decays") {
    const auto a = check_modular_structure(msc::sign_matrix(), 3);
    const auto s = msc::sign_matrix();
    const std::vector<double> k{3.5, 2.5, 1.3, 0.8, 2, 4};
    for (std::size_t gene : {3, 4, 5}) {
        const auto g0 = transfer_gain(s, a, k, 0, gene, 0.0);
        CHECK(std::abs(g0 - steady_state_gain(s, a, k, 0, gene)) < 1e-12);
        CHECK(std::abs(transfer_gain(s, a, k, 0, gene, Complex(0, 1e6))) < 1e-5);
    }
    const auto g72 = transfer_gain(s, a, k, 1, 6, Complex(0, 2.0));
    CHECK(std::abs(g72 - 1.0 / (Complex(0, 2.0) + 0.8)) < 1e-14);
}

TEST_CASE("small K gives a negative gain") {
    const auto a = check_modular_structure(msc::sign_matrix(), 3);
    const std::vector<double> k{1.5, 1.5, 1, 1, 1, 1};
    CHECK_THROWS_WITH_AS(compute_gains(msc::sign_matrix(), a, k), doctest::Contains("negative"),
                         InfeasibleGainError);
    const auto g = compute_gains(msc::sign_matrix(), a, k, false);
    CHECK(g[3] == doctest::Approx(oracle::msc_gains(as_array(k)).g41));
    CHECK(g[3] < 0);
    CHECK_THROWS_AS(compute_gains(msc::sign_matrix(), a, std::vector<double>{2, 2, 1, 1, 1, 1}),
                    InfeasibleGainError);  // singular
}

TEST_CASE("index vectors") {
    const auto a = check_modular_structure(msc::sign_matrix(), 3);
    const auto iv = build_index_vectors(msc::low_sign_matrix(), msc::sign_matrix(), a);
    CHECK(iv.eq(1, 0) == std::vector<std::size_t>{0, 3});
    CHECK(iv.neq(1, 0).empty());
    CHECK(iv.eq(0, 1) == std::vector<std::size_t>{8});
    CHECK(iv.eq(2, 0) == std::vector<std::size_t>{3});
    CHECK(iv.eq(2, 1) == std::vector<std::size_t>{7});
    CHECK(iv.eq(0, 0) == std::vector<std::size_t>{0});
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t nu = 0; nu < 3; ++nu) {
            for (std::size_t j : iv.eq(i, nu)) {
                CHECK((j == nu || a.master_of[j] == nu));
                CHECK(std::find(iv.neq(i, nu).begin(), iv.neq(i, nu).end(), j) == iv.neq(i, nu).end());
            }
        }
    }
    SignMatrix low = msc::low_sign_matrix();
    low.set(0, 1, 0);
    const auto iv0 = build_index_vectors(low, msc::sign_matrix(), a);
    CHECK(iv0.eq(0, 1).empty());
    CHECK(iv0.neq(0, 1).empty());
    CHECK(iv0.eq_dense(1, 0) == std::vector<int>{1, 0, 0, 1, 0, 0, 0, 0, 0});
}

TEST_CASE("opposite-sign inputs enter with weight eps") {
    // Master 2 represses master 1 directly while its module gene x3
    // activates it, so x3 lands in the opposite-sign index vector.
    const SignMatrix s({{1, -1, 1}, {0, 1, 0}, {0, 1, 0}});
    const auto a = check_modular_structure(s, 2);
    const SignMatrix low({{1, -1}, {0, 1}});
    const auto iv = build_index_vectors(low, s, a);
    CHECK(iv.eq(0, 1) == std::vector<std::size_t>{1});
    CHECK(iv.neq(0, 1) == std::vector<std::size_t>{2});
    GainTable g;
    g.gamma = {1, 1, 0.5};
    const std::vector<double> eps{0.01, 0.01};
    const Vector x{{1.0, 2.0, 3.0}};
    const Matrix mu = auxiliary_map(x, low, g, iv, eps);
    CHECK(mu(0, 1) == doctest::Approx((1 + 0.01) * 2.0 - 0.01 * 3.0 / 0.5));
    const auto ex = auxiliary_map_expr(low, g, iv, eps);
    CHECK(evaluate(ex[0][1], std::vector<double>{1, 2, 3}, {}) == doctest::Approx(mu(0, 1)));
}

TEST_CASE("auxiliary map reproduces the hand-written compositions") {
    const auto h = reference_model();
    const Vector x = Vector::LinSpaced(9, 0.5, 4.5);
    const Matrix mu = h.auxiliary(x);
    CHECK(mu(1, 0) == doctest::Approx((x[0] + x[3]) / 2));
    CHECK(mu(0, 1) == doctest::Approx(x[8]));
    CHECK(mu(2, 0) == doctest::Approx(x[3]));
    CHECK(mu(2, 1) == doctest::Approx(x[7]));
    CHECK(mu(0, 0) == doctest::Approx(x[0]));
}

TEST_CASE("auxiliary map inverts the lift at steady states") {
    const auto h = reference_model();
    for (const auto& s : find_steady_states(OdeSystem(msc::low_dim()))) {
        const Matrix mu = h.auxiliary(h.lift(s.x));
        for (Eigen::Index i = 0; i < 3; ++i) {
            for (Eigen::Index nu = 0; nu < 3; ++nu) {
                if (h.sa_low(static_cast<std::size_t>(i), static_cast<std::size_t>(nu)) != 0) {
                    CHECK(mu(i, nu) == doctest::Approx(s.x[nu]).epsilon(1e-12));
                }
            }
        }
    }
}

TEST_CASE("assembled vector field equals the hand-written one") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(0.01, 25.0);
    std::uniform_real_distribution<double> uk(3.0, 6.0);
    for (int variant = 0; variant < 3; ++variant) {
        std::vector<double> k = msc::default_rates();
        oracle::MscParams p;
        if (variant > 0) {
            for (auto& v : k) {
                v = uk(rng);
            }
            p = {1.5, 0.2, 0.7, 0.1};
        }
        ModelSpec low = msc::low_dim();
        low.set_parameter("m", p.m);
        low.set_parameter("uA", p.uA);
        low.set_parameter("uO", p.uO);
        low.set_parameter("uC", p.uC);
        const auto h = assemble_high_dim(low, msc::sign_matrix(), k, msc::default_eps());
        const OdeSystem sys(h.spec);
        double worst = 0.0;
        for (int t = 0; t < 100; ++t) {
            std::array<double, 9> x{};
            for (auto& v : x) {
                v = u(rng);
            }
            const auto ref = oracle::msc_high(x, as_array(k), p);
            const Vector f = sys.rhs(Vector::Map(x.data(), 9));
            for (int i = 0; i < 9; ++i) {
                worst = std::max(worst, std::abs(f[i] - ref[static_cast<std::size_t>(i)]) /
                                            std::max(1e-300, std::abs(ref[static_cast<std::size_t>(i)])));
            }
        }
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("sign fidelity of the constructed model") {
    const auto h = reference_model();
    const OdeSystem sys(h.spec);
    CHECK(derive_sign_matrix(sys, 1000) == msc::sign_matrix());
}

TEST_CASE("without modules the construction is the identity") {
    const ModelSpec low = msc::low_dim();
    const auto h = assemble_high_dim(low, msc::low_sign_matrix(), std::vector<double>{},
                                     msc::default_eps());
    const OdeSystem a(low), b(h.spec);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 20.0);
    for (int t = 0; t < 100; ++t) {
        const Vector x{{u(rng), u(rng), u(rng)}};
        CHECK((a.rhs(x) - b.rhs(x)).lpNorm<Eigen::Infinity>() <= 1e-15);
        CHECK((a.jacobian(x) - b.jacobian(x)).lpNorm<Eigen::Infinity>() <= 1e-15);
    }
    CHECK(h.spec.degradation == low.degradation);
    CHECK(h.spec.domain == low.domain);
}

TEST_CASE("steady states lift to steady states") {
    const auto h = reference_model();
    const OdeSystem sys(h.spec);
    const auto states = find_steady_states(OdeSystem(msc::low_dim()));
    REQUIRE(states.size() == 5);
    for (const auto& s : states) {
        CHECK(sys.rhs(h.lift(s.x)).lpNorm<Eigen::Infinity>() < 1e-8);
    }
    const Vector x1 = h.lift(states[0].x);
    CHECK(x1[5] == doctest::Approx(24.00).epsilon(1e-3));
}

TEST_CASE("constructed model survives a file round trip") {
    const auto h = reference_model();
    const auto path = std::filesystem::temp_directory_path() / "msequiv_constructed.model";
    save_model(h.spec, path);
    const ModelSpec back = load_model(path);
    REQUIRE(back.construction.has_value());
    const OdeSystem a(h.spec), b(back);
    const Vector x = Vector::LinSpaced(9, 0.2, 9.0);
    CHECK((a.rhs(x) - b.rhs(x)).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(lift_state(Vector{{1.0, 2.0, 3.0}}, *back.construction)[5] == doctest::Approx(2.0));
}

TEST_CASE("inconsistent inputs are rejected before assembly") {
    SignMatrix s = msc::sign_matrix();
    s.set(6, 0, 1);
    CHECK_THROWS_AS(assemble_high_dim(msc::low_dim(), s, msc::default_rates(), msc::default_eps()),
                    StructureError);
    CHECK_THROWS_AS(assemble_high_dim(msc::low_dim(), msc::sign_matrix(), std::vector<double>{3, 3},
                                      msc::default_eps()),
                    InputError);
    CHECK_THROWS_AS(assemble_high_dim(msc::low_dim(), msc::sign_matrix(), msc::default_rates(),
                                      std::vector<double>{1e-3, 0, 1e-3}),
                    InputError);
}
