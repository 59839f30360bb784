#include <doctest.h>

#include <cmath>
#include <sstream>

#include "contractive/enrich.hpp"
#include "contractive/errors.hpp"
#include "contractive/iterate.hpp"

using namespace contractive;

namespace {

IterationConfig config(double lambda, double x0, std::size_t max_iters = 1000, double tol = 1e-10) {
    IterationConfig c;
    c.lambda = lambda;
    c.x0 = make_point({x0});
    c.max_iters = max_iters;
    c.stop_tol = tol;
    return c;
}

}  // namespace

TEST_CASE("ex1 with lambda 1/4 halves the error") {
    const Mapping T = Mapping::from_corpus("ex1");
    const IterationTrace t = krasnoselskij(T, config(0.25, 0.0));
    CHECK(t.terminated_by == Termination::tolerance);
    CHECK(std::abs(t.final_point()[0] - 0.5) < 1e-9);
    for (std::size_t n = 0; n < t.rows.size(); ++n) {
        CHECK(t.rows[n].n == n);
        CHECK(t.rows[n].x[0] == doctest::Approx(0.5 - 0.5 * std::pow(0.5, static_cast<double>(n))).epsilon(1e-14));
    }
    for (std::size_t n = 2; n < t.rows.size(); ++n) CHECK(*t.rows[n].step / *t.rows[n - 1].step == doctest::Approx(0.5));
    CHECK_FALSE(t.rows[0].step.has_value());
    std::size_t first = 0;
    while (std::abs(t.rows[first].x[0] - 0.5) >= 1e-8) ++first;
    CHECK(first <= 35);

    const ConvergenceReport r = convergence_report(t, fixed_points(T));
    CHECK(r.status == ConvergenceReport::Status::converged);
    REQUIRE(r.limit);
    CHECK(std::abs((*r.limit)[0] - 0.5) < 1e-9);
    CHECK(std::abs(r.observed_ratio - 0.5) < 1e-6);
}

TEST_CASE("Picard iteration on ex1 oscillates") {
    const Mapping T = Mapping::from_corpus("ex1");
    const IterationTrace t = krasnoselskij(T, config(1.0, 0.0, 50));
    CHECK(t.terminated_by == Termination::max_iters);
    CHECK(t.rows.size() == 51);
    for (const auto& row : t.rows) CHECK(row.x[0] == static_cast<double>(row.n % 2));
    const ConvergenceReport r = convergence_report(t, fixed_points(T));
    CHECK(r.status == ConvergenceReport::Status::inconclusive);
    CHECK(convergence_report(t, FixedPointSet{}).status == ConvergenceReport::Status::inconclusive);
}

TEST_CASE("lambda 1 agrees with direct composition") {
    const Mapping T = Mapping::from_expr("q", mapdef::parse("x / 2 + x ^ 2 / 4"), Domain::interval(0.0, 1.0),
                                         NormSpec::euclidean());
    const IterationTrace t = krasnoselskij(T, config(1.0, 0.9, 30, 1e-300));
    Point x = make_point({0.9});
    for (const auto& row : t.rows) {
        CHECK(row.x == x);
        x = T(x);
    }
}

TEST_CASE("segment property") {
    for (const char* name : {"ex1", "ex4", "ex5", "ex7"}) {
        const Mapping T = Mapping::from_corpus(name);
        for (double l : {0.1, 0.4, 0.5, 0.9}) {
            const IterationTrace t = krasnoselskij(T, config(l, T.domain().upper()[0], 200));
            for (std::size_t n = 1; n < t.rows.size(); ++n) {
                const double expect = l * t.rows[n - 1].residual;
                // relative to the step, or to the iterate once the step falls below its rounding
                const double scale = std::max(expect, t.rows[n - 1].x.norm());
                CHECK(std::abs(*t.rows[n].step - expect) <= 1e-12 * scale);
            }
        }
    }
}

TEST_CASE("converged limits are fixed points") {
    for (const auto& e : mapdef::corpus()) {
        const Mapping T = Mapping::from_corpus(e);
        for (double l : {0.25, 0.5}) {
            const IterationTrace t = krasnoselskij(T, config(l, T.domain().lower()[0], 5000));
            if (!t.converged()) continue;
            CAPTURE(e.name);
            CHECK(T.residual(t.final_point()) <= 10 * t.stop_tol);
        }
    }
}

TEST_CASE("ex4 at lambda 1/2 reaches a fixed point") {
    const Mapping T = Mapping::from_corpus("ex4");
    const IterationTrace t = krasnoselskij(T, config(0.5, 0.0));
    CHECK(t.converged());
    const double x = t.final_point()[0];
    CHECK((std::abs(x - 0.5) < 1e-9 || std::abs(x - 1.0) < 1e-9));
}

TEST_CASE("ex5 at lambda 0.4 from 2 converges to 1") {
    const Mapping T = Mapping::from_corpus("ex5");
    const IterationTrace t = krasnoselskij(T, config(0.4, 2.0));
    const ConvergenceReport r = convergence_report(t, fixed_points(T));
    CHECK(r.status == ConvergenceReport::Status::converged);
    REQUIRE(r.limit);
    CHECK(std::abs((*r.limit)[0] - 1.0) < 1e-9);
    // brute-force iteration oracle
    double x = 2.0;
    for (int i = 0; i < 2000; ++i) x = 0.6 * x + 0.4 / x;
    CHECK(std::abs(t.final_point()[0] - x) < 1e-9);
}

TEST_CASE("class deltas for the error bounds") {
    CHECK(delta_for(BoundKind::enriched_banach, {{"theta", 2.0}, {"b", 3.0}}) == 0.5);
    CHECK(delta_for(BoundKind::kannan, {{"a", 0.25}}) == doctest::Approx(1.0 / 3.0));
    CHECK(delta_for(BoundKind::chatterjea, {{"b", 0.25}}) == doctest::Approx(1.0 / 3.0));
    CHECK(delta_for(BoundKind::banach, {{"c", 0.7}}) == 0.7);
    CHECK(delta_for(BoundKind::almost, {{"delta", 0.2}, {"L", 3.0}}) == 0.2);
    CHECK(delta_for(BoundKind::enriched_almost, {{"theta", 1.0}, {"b", 1.0}}) == 0.5);
    CHECK_THROWS_AS(delta_for(BoundKind::kannan, {{"a", 0.5}}), PreconditionError);
    CHECK_THROWS_AS(delta_for(BoundKind::chatterjea, {{"b", 0.6}}), PreconditionError);
    CHECK_THROWS_AS(delta_for(BoundKind::enriched_banach, {{"theta", 4.0}, {"b", 3.0}}), PreconditionError);
    CHECK_THROWS_AS(delta_for(BoundKind::banach, {}), PreconditionError);
    CHECK(parse_bound_kind("enriched_almost") == BoundKind::enriched_almost);
}

TEST_CASE("a-priori bounds dominate the errors on ex1") {
    const Mapping T = Mapping::from_corpus("ex1");
    const IterationTrace t = krasnoselskij(T, config(0.25, 0.0));
    const ErrorBoundReport r = apriori_bounds(T, t, 0.5, make_point({0.5}));
    CHECK(r.all_ok);
    CHECK(r.max_violation <= 1e-9);
    REQUIRE_FALSE(r.entries.empty());
    CHECK(r.entries.front().n == 1);
    CHECK(r.entries.front().i == 1);
    CHECK(r.entries.front().bound == 0.25);
    for (const auto& e : r.entries) CHECK(e.i <= 10);
    BoundOptions full;
    full.full_range = true;
    CHECK(apriori_bounds(T, t, 0.5, make_point({0.5}), full).entries.size() > r.entries.size());
    CHECK_THROWS_AS(apriori_bounds(T, t, 1.0, make_point({0.5})), PreconditionError);
    CHECK_THROWS_AS(apriori_bounds(T, t, 0.5, make_point({0.4})), PreconditionError);
}

TEST_CASE("bounds from enriched certificates") {
    struct Case {
        const char* map;
        ClassKind kind;
        double lambda;
    };
    for (const Case& c : {Case{"ex1", ClassKind::banach, 0.25}, Case{"ex1", ClassKind::kannan, 2.0 / 3.0},
                          Case{"ex1", ClassKind::chatterjea, 0.6}, Case{"ex4", ClassKind::almost, 0.5}}) {
        const Mapping T = Mapping::from_corpus(c.map);
        const AveragedMapping avg(T, c.lambda);
        const PairSample pairs = grid_pairs(T.domain(), 64);
        const Certificate cert = c.kind == ClassKind::almost ? estimate_almost(avg.mapping(), pairs)
                                                             : estimate_class(c.kind, avg.mapping(), pairs);
        CAPTURE(c.map);
        CAPTURE(to_string(c.kind));
        REQUIRE(cert.member());
        const double delta = delta_for(cert);
        const IterationTrace t = krasnoselskij(T, config(c.lambda, 0.0));
        REQUIRE(t.converged());
        const ConvergenceReport conv = convergence_report(t, fixed_points(T));
        REQUIRE(conv.limit);
        const ErrorBoundReport r = apriori_bounds(T, t, delta, *conv.limit);
        CHECK(r.all_ok);
    }
}

TEST_CASE("enriched banach delta matches theta/(b+1) from a scan") {
    const Mapping T = Mapping::from_corpus("ex1");
    const EnrichmentResult r = enriched_scan(T, ClassKind::banach, {0.25}, grid_pairs(T.domain(), 64), {false, true});
    REQUIRE(r.best);
    Constants c = r.best->constants;
    c["b"] = r.best->b;
    CHECK(delta_for(BoundKind::enriched_banach, c) == doctest::Approx(0.5));
}

TEST_CASE("leaving the domain ends the trace") {
    const Mapping T = Mapping::from_expr("out", mapdef::parse("x + 0.3"), Domain::interval(0.0, 1.0),
                                         NormSpec::euclidean());
    REQUIRE_FALSE(T.warnings().empty());
    const IterationTrace t = krasnoselskij(T, config(1.0, 0.0));
    CHECK(t.terminated_by == Termination::left_domain);
    CHECK_FALSE(T.domain().contains(t.final_point()));
    for (std::size_t i = 0; i + 1 < t.rows.size(); ++i) CHECK(T.domain().contains(t.rows[i].x));
}

TEST_CASE("configuration checks") {
    const Mapping T = Mapping::from_corpus("ex1");
    CHECK_THROWS_AS(krasnoselskij(T, config(0.0, 0.5)), PreconditionError);
    CHECK_THROWS_AS(krasnoselskij(T, config(1.5, 0.5)), PreconditionError);
    CHECK_THROWS_AS(krasnoselskij(T, config(0.5, 2.0)), PreconditionError);
    CHECK_THROWS_AS(krasnoselskij(T, config(0.5, 0.5, 0)), PreconditionError);
    CHECK_THROWS_AS(krasnoselskij(T, config(0.5, 0.5, 10, 0.0)), PreconditionError);
    IterationConfig bad = config(0.5, 0.5);
    bad.x0 = make_point({0.1, 0.2});
    CHECK_THROWS_AS(krasnoselskij(T, bad), DimensionMismatch);
}

TEST_CASE("csv exports") {
    const Mapping T = Mapping::from_corpus("ex1");
    const IterationTrace t = krasnoselskij(T, config(0.25, 0.0, 3));
    std::ostringstream out;
    write_trace_csv(out, t);
    CHECK(out.str() == "n,x1,step_norm,residual\n0,0,,1\n1,0.25,0.25,0.5\n2,0.375,0.125,0.25\n3,0.4375,0.0625,0.125\n");
    const IterationTrace full = krasnoselskij(T, config(0.25, 0.0));
    std::ostringstream b;
    write_bounds_csv(b, apriori_bounds(T, full, 0.5, make_point({0.5})));
    CHECK(b.str().rfind("n,i,bound,actual,ok\n1,1,0.25,", 0) == 0);
}
