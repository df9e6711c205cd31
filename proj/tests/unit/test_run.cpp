#include <cmath>

#include "sbtm/run.hpp"
#include "support.hpp"

using namespace sbtm;

namespace {

struct Setup {
    TargetDensity target = make_standard_gaussian(1);
    InitialDensity initial = make_gaussian_initial(1, 1 - std::exp(-0.2));
    AnnealingSchedule schedule = make_schedule(AnnealingSchedule::Kind::none, 1.0, 0.0, initial, target);
};

RunOptions small(Method m) {
    RunOptions o;
    o.method = m;
    o.n = 200;
    o.sbtm.dt = 0.01;
    o.sbtm.total_time = 0.1;
    o.sbtm.training.batch_size = 100;
    o.sbtm.training.inner_steps = 2;
    o.sbtm.training.pretrain_max_steps = 50;
    o.arch = testing::small_arch(1, 16, 2);
    o.record_every = 3;
    o.sbtm.seed = 5;
    return o;
}

}  // namespace

TEST_CASE("T = 0 returns the initial ensemble and an empty series") {
    Setup s;
    auto o = small(Method::sbtm);
    o.sbtm.total_time = 0.0;
    const auto r = run(o, s.target, s.initial, s.schedule);
    CHECK(r.records.empty());
    CHECK(r.steps_taken == 0);
    CHECK(r.final_ensemble.positions == make_ensemble(s.initial, o.n, o.sbtm.seed).positions);
    REQUIRE(r.snapshots.size() == 1);
    CHECK(r.snapshots[0].t == 0.0);
}

TEST_CASE("records every k steps plus the last") {
    Setup s;
    for (Method m : {Method::sbtm, Method::langevin, Method::svgd}) {
        CAPTURE(to_string(m));
        const auto r = run(small(m), s.target, s.initial, s.schedule);
        CHECK(r.steps_taken == 10);
        // steps 0, 3, 6, 9, 10
        REQUIRE(r.records.size() == 5);
        CHECK(r.records[1].t == doctest::Approx(0.03));
        CHECK(r.records.back().t == doctest::Approx(0.1));
        CHECK(std::isnan(r.records[0].loss));
        CHECK(std::isfinite(r.records[2].kl));
        CHECK(std::isfinite(r.records[2].dissipation));
        CHECK(r.records[2].identity_lhs == -r.records[2].dissipation);
        CHECK(std::isfinite(r.records[2].l2_error) == false);  // no analytic solution attached
        CHECK(r.snapshots.front().t == 0.0);
        CHECK(r.snapshots.back().step == 10);
        CHECK(r.model.has_value() == (m == Method::sbtm));
        CHECK(r.pretrain.has_value() == (m == Method::sbtm));
        if (m == Method::sbtm) CHECK(std::isfinite(r.records[2].fisher));
        else CHECK(std::isnan(r.records[2].fisher));
    }
}

TEST_CASE("analytic solution enables l2 error and bypass") {
    Setup s;
    auto o = small(Method::sbtm_bypass);
    CHECK_THROWS_AS(run(o, s.target, s.initial, s.schedule), std::invalid_argument);
    o.analytic = AnalyticSolution{};
    const auto r = run(o, s.target, s.initial, s.schedule);
    CHECK(std::isfinite(r.records.back().l2_error));
    CHECK(r.records.back().fisher == doctest::Approx(AnalyticSolution{}.fisher_at(0.1)).epsilon(0.3));
}

TEST_CASE("runs are reproducible") {
    Setup s;
    const auto a = run(small(Method::sbtm), s.target, s.initial, s.schedule);
    const auto b = run(small(Method::sbtm), s.target, s.initial, s.schedule);
    CHECK(a.final_ensemble.positions == b.final_ensemble.positions);
    CHECK(a.model->params() == b.model->params());
    auto other = small(Method::sbtm);
    other.sbtm.seed = 6;
    CHECK(run(other, s.target, s.initial, s.schedule).final_ensemble.positions != a.final_ensemble.positions);
}

TEST_CASE("early stop on a Fisher threshold") {
    Setup s;
    auto o = small(Method::sbtm_bypass);
    o.analytic = AnalyticSolution{};
    o.early_stop_fisher = 1e9;
    o.snapshot_every = 0;
    const auto r = run(o, s.target, s.initial, s.schedule);
    CHECK(r.early_stopped);
    CHECK(r.steps_taken == 3);
    CHECK(r.records.size() == 2);
    CHECK(r.snapshots.back().step == 3);
}

TEST_CASE("observer sees every record and snapshot") {
    Setup s;
    auto o = small(Method::sbtm);
    o.snapshot_every = 5;
    int records = 0, snaps = 0;
    RunObserver obs;
    obs.on_record = [&](const DiagnosticsRecord& r, const RecordContext& ctx) {
        CHECK(ctx.model != nullptr);
        CHECK(ctx.learned_scores.cols() == o.n);
        CHECK(ctx.ensemble.time == r.t);
        CHECK(ctx.learned_scores == ctx.model->forward(ctx.ensemble.positions));
        ++records;
    };
    obs.on_snapshot = [&](const Snapshot&) { ++snaps; };
    const auto r = run(o, s.target, s.initial, s.schedule, obs);
    CHECK(records == static_cast<int>(r.records.size()));
    CHECK(snaps == 3);  // 0, 5, 10
}

TEST_CASE("step errors propagate after earlier records were observed") {
    Setup s;
    auto o = small(Method::langevin);
    o.sbtm.dt = 10.0;
    o.sbtm.total_time = 5000.0;
    o.record_every = 1;
    int seen = 0;
    RunObserver obs;
    obs.on_record = [&](const DiagnosticsRecord&, const RecordContext&) { ++seen; };
    // dX = -X dt at dt = 10 multiplies by -9 each step: overflow within a few hundred steps
    CHECK_THROWS_AS(run(o, s.target, s.initial, s.schedule, obs), NonFiniteError);
    CHECK(seen >= 1);
}

TEST_CASE("invalid options") {
    Setup s;
    auto o = small(Method::langevin);
    o.n = 0;
    CHECK_THROWS(run(o, s.target, s.initial, s.schedule));
    o = small(Method::langevin);
    o.record_every = 0;
    CHECK_THROWS(run(o, s.target, s.initial, s.schedule));
    CHECK_THROWS(run(small(Method::langevin), make_standard_gaussian(2), s.initial, s.schedule));
    CHECK(method_from_string(to_string(Method::sbtm_bypass)) == Method::sbtm_bypass);
    CHECK_THROWS(method_from_string("walk"));
}
