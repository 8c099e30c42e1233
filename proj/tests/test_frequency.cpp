#include "doctest.h"

#include "msequiv/analysis.hpp"
#include "msequiv/construction.hpp"
#include "msequiv/frequency.hpp"
#include "msequiv/msc.hpp"
#include "msequiv/parameter_search.hpp"

#include <random>

using namespace msequiv;

namespace {

LoopbrokenSystem scalar(double a, double d) {
    LoopbrokenSystem s;
    s.a = Matrix::Constant(1, 1, a);
    s.d = Vector::Constant(1, d);
    return s;
}

HighDimModel reference_model() {
    return assemble_high_dim(msc::low_dim(), msc::sign_matrix(), msc::default_rates(),
                             msc::default_eps());
}

}  // namespace

TEST_CASE("loopbreaking uses the model's decay terms") {
    const OdeSystem low(msc::low_dim());
    for (const auto& s : find_steady_states(low)) {
        const auto lb = loopbreak(low, s.x);
        CHECK(lb.d == Vector::Constant(3, 0.1));
    }
    const auto h = reference_model();
    const OdeSystem high(h.spec);
    const auto lb = loopbreak(high, h.lift(Vector{{1.0, 2.0, 3.0}}));
    CHECK(lb.d == Vector{{0.1, 0.1, 0.1, 3, 3, 1, 1, 1, 1}});

    const auto decay = make_model("decay", {"a", "b"}, {}, {"0", "0"}, {0.5, 2.0}, {{0, 1}, {0, 1}});
    CHECK(loopbreak(OdeSystem(decay), Vector{{0.1, 0.2}}).a.isZero());
}

TEST_CASE("scalar transfer function") {
    const auto s = scalar(2.0, 1.0);
    for (double w : {0.0, 0.3, 10.0}) {
        const Complex g = transfer_matrix(s, Complex(0, w))(0, 0);
        CHECK(std::abs(g - 2.0 / Complex(1.0, w)) < 1e-15);
    }
    CHECK_THROWS_AS(transfer_matrix(s, -1.0), NumericalError);
}

TEST_CASE("module rows of the transfer matrix") {
    const auto h = reference_model();
    const OdeSystem high(h.spec);
    const Vector x = h.lift(Vector{{3.0, 2.0, 1.0}});
    const auto lb = loopbreak(high, x);
    const Complex lam(0.1, 0.7);
    const auto g = transfer_matrix(lb, lam);
    for (Eigen::Index i = 3; i < 9; ++i) {
        for (Eigen::Index j = 0; j < 9; ++j) {
            CHECK(std::abs(g(i, j) - lb.a(i, j) / (lam + lb.d[i])) < 1e-15);
        }
    }
    // The module block at s = 0 reproduces the steady-state gains.
    const auto g0 = transfer_matrix(lb, 0.0);
    const Eigen::MatrixXcd block = g0.block(3, 3, 3, 3);
    const Eigen::VectorXcd input = g0.block(3, 0, 3, 1);
    const Eigen::VectorXcd gains =
        (Eigen::MatrixXcd::Identity(3, 3) - block).partialPivLu().solve(input);
    CHECK(std::abs(gains[0] - h.gains[3]) < 1e-12);
    CHECK(std::abs(gains[1] - h.gains[4]) < 1e-12);
    CHECK(std::abs(gains[2] - h.gains[5]) < 1e-12);
}

TEST_CASE("trivial and analytic curves") {
    const auto stable = nyquist_curve(scalar(0.0, 1.0));
    CHECK(stable.winding == 0);
    CHECK(unstable_count_from_winding(stable) == 0);
    for (const auto& v : stable.value) {
        CHECK(v == Complex(1.0, 0.0));
    }

    // dz/dt = 2z - z: det = (jw - 1)/(jw + 1), one clockwise turn.
    const auto unstable = nyquist_curve(scalar(2.0, 1.0));
    CHECK(unstable.winding == -1);
    CHECK(unstable_count_from_winding(unstable) == 1);
    CHECK(unstable.min_distance == doctest::Approx(1.0).epsilon(1e-9));
    for (std::size_t k = 0; k < unstable.omega.size(); k += 37) {
        const double w = unstable.omega[k];
        CHECK(std::abs(unstable.value[k] - Complex(-1.0, w) / Complex(1.0, w)) < 1e-14);
    }
}

TEST_CASE("curve invariants") {
    const OdeSystem low(msc::low_dim());
    for (const auto& s : find_steady_states(low)) {
        const auto c = nyquist_curve(loopbreak(low, s.x));
        const std::size_t n = c.omega.size();
        REQUIRE(n % 2 == 1);
        for (std::size_t k = 0; k < n; ++k) {
            CHECK(c.omega[k] == -c.omega[n - 1 - k]);
            CHECK(std::abs(c.value[k] - std::conj(c.value[n - 1 - k])) <= 1e-12);
            if (k + 1 < n) {
                CHECK(c.omega[k] < c.omega[k + 1]);
                CHECK(std::abs(std::arg(c.value[k + 1] / c.value[k])) < M_PI / 2);
            }
        }
        CHECK(std::abs(c.value.back() - 1.0) < 1e-3);
        CHECK(c.winding <= 0);
        CHECK(unstable_count_from_winding(c) == s.unstable_count);
    }
}

TEST_CASE("axis eigenvalue is reported") {
    // a = d puts the closed-loop eigenvalue at 0.
    CHECK_THROWS_WITH_AS(nyquist_curve(scalar(1.0, 1.0)), doctest::Contains("imaginary axis"),
                         NumericalError);
}

TEST_CASE("argument principle on random systems") {
    std::mt19937_64 rng(2718);
    std::uniform_int_distribution<int> dim(3, 5);
    std::uniform_real_distribution<double> ud(0.1, 3.0);
    std::normal_distribution<double> ua(0.0, 1.0);
    int done = 0, regenerated = 0, mismatches = 0;
    while (done < 200) {
        const int n = dim(rng);
        LoopbrokenSystem s;
        s.d = Vector(n);
        s.a = Matrix(n, n);
        for (auto& v : s.d) {
            v = ud(rng);
        }
        for (auto& v : s.a.reshaped()) {
            v = ua(rng);
        }
        Matrix j = s.a;
        j.diagonal() -= s.d;
        const auto ev = eigenvalues(j);
        NyquistCurve c;
        try {
            c = nyquist_curve(s);
        } catch (const NumericalError&) {
            ++regenerated;
            continue;
        }
        if (c.min_distance < 1e-6) {
            ++regenerated;
            continue;
        }
        ++done;
        if (unstable_count_from_winding(c) != count_unstable(ev, 1e-9)) {
            ++mismatches;
        }
        CHECK(c.winding <= 0);
    }
    MESSAGE("regenerated " << regenerated << " of " << done + regenerated << " systems");
    CHECK(mismatches == 0);
}

TEST_CASE("identical curves lie in the tube") {
    const OdeSystem low(msc::low_dim());
    const auto s = find_steady_states(low).front();
    const auto lb = loopbreak(low, s.x);
    const auto t = compare_nyquist(lb, lb);
    CHECK(t.deviation == 0.0);
    CHECK(t.within_tube);
    CHECK(t.winding_low == t.winding_high);
}

TEST_CASE("deviation shrinks as the module rates grow") {
    std::vector<Vector> states;
    for (const auto& s : find_steady_states(OdeSystem(msc::low_dim()))) {
        states.push_back(s.x);
    }
    const auto sweep = k_sweep(msc::low_dim(), msc::sign_matrix(), msc::default_rates(),
                               msc::default_eps(), {1, 10, 100, 1000}, states);
    for (std::size_t r = 0; r < states.size(); ++r) {
        for (std::size_t k = 0; k + 1 < sweep.size(); ++k) {
            CHECK(sweep[k + 1][r].deviation < sweep[k][r].deviation);
        }
        CHECK(sweep[2][r].deviation < sweep[0][r].deviation);
        for (const auto& row : sweep) {
            // Equal winding numbers whenever the high curve stays in the tube.
            if (row[r].within_tube) {
                CHECK(row[r].winding_low == row[r].winding_high);
            }
        }
    }
}
