#include <cmath>

#include "sbtm/annealing.hpp"
#include "support.hpp"

using namespace sbtm;

namespace {
Vector v1(double x) { return Vector::Constant(1, x); }
}

TEST_CASE("geometric endpoints and affine path") {
    const auto init = make_gaussian_initial(1, 0.5);
    const auto target = make_gaussian_mixture_1d({0.25, 0.75}, {-4.0, 4.0}, {1.0, 1.0});
    const auto s = make_schedule(AnnealingSchedule::Kind::geometric, 10.0, 0.0, init, target);
    for (double x : {-3.0, -0.5, 0.0, 1.2, 5.0}) {
        CHECK(annealed_score(s, 0.0, v1(x))[0] == doctest::Approx(init.score(v1(x))[0]));
        CHECK(annealed_score(s, 10.0, v1(x))[0] == doctest::Approx(target.score(v1(x))[0]));
        CHECK(annealed_score(s, 25.0, v1(x))[0] == doctest::Approx(target.score(v1(x))[0]));
        for (double t : {1.0, 3.3, 7.9}) {
            const double a = init.score(v1(x))[0], b = target.score(v1(x))[0];
            const double v = annealed_score(s, t, v1(x))[0];
            CHECK(v >= std::min(a, b) - 1e-12);
            CHECK(v <= std::max(a, b) + 1e-12);
            CHECK(v == doctest::Approx((1 - t / 10) * a + t / 10 * b));
        }
    }
    CHECK(s.geometric_weight(-1.0) == 0.0);
    CHECK(s.geometric_weight(100.0) == 1.0);
}

TEST_CASE("dilation") {
    const auto init = make_gaussian_initial(2, 1.0);
    const auto target = make_grid_mixture(4, 8.0, 1.0);
    const double T = 10.0;
    const auto s = make_schedule(AnnealingSchedule::Kind::dilation, T, 0.5, init, target);
    const Vector x = Eigen::Vector2d(1.3, -0.4);
    CHECK((annealed_score(s, T, x) - target.score(x)).norm() < 1e-14);
    // (T / t) grad log pi((T / t) x), clamped at t_min
    CHECK((annealed_score(s, 2.0, x) - 5.0 * target.score(Vector(5.0 * x))).norm() < 1e-12);
    CHECK((annealed_score(s, 0.0, x) - 20.0 * target.score(Vector(20.0 * x))).norm() < 1e-12);
    CHECK((annealed_score(s, 0.1, x) - annealed_score(s, 0.5, x)).norm() == 0.0);
    CHECK_THROWS(make_schedule(AnnealingSchedule::Kind::dilation, T, 0.0, init, target));
    CHECK_THROWS(make_schedule(AnnealingSchedule::Kind::geometric, 0.0, 0.1, init, target));
}

TEST_CASE("none and names") {
    const auto init = make_gaussian_initial(1, 2.0);
    const auto target = make_standard_gaussian(1);
    const auto s = make_schedule(AnnealingSchedule::Kind::none, 1.0, 0.0, init, target);
    CHECK(annealed_score(s, 0.0, v1(2.0))[0] == -2.0);
    for (auto k : {AnnealingSchedule::Kind::none, AnnealingSchedule::Kind::geometric, AnnealingSchedule::Kind::dilation})
        CHECK(schedule_from_string(to_string(k)) == k);
    CHECK_THROWS(schedule_from_string("linear"));
}
