#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "contractive/enrich.hpp"
#include "contractive/errors.hpp"
#include "contractive/format.hpp"

using namespace contractive;

namespace {

Mapping expr_map(const std::string& text, double lo, double hi) {
    return Mapping::from_expr(text, mapdef::parse(text), Domain::interval(lo, hi), NormSpec::euclidean());
}

bool holds(double lhs, double rhs) { return rhs - lhs >= -1e-10 * std::max(1.0, std::abs(rhs) + std::abs(lhs)); }

/// Random affine self-maps A x + c of [-1,1]^d with ||A||_2 <= 1.5, or rational maps on an interval.
std::vector<Mapping> random_maps(std::uint64_t seed) {
    SampleRng rng(seed);
    std::vector<Mapping> maps;
    for (int t = 0; t < 5; ++t) {
        const int d = 1 + static_cast<int>(rng.index(3));
        Eigen::MatrixXd A(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) A(i, j) = rng.uniform(-1.0, 1.0);
        const double s = A.jacobiSvd().singularValues()(0);
        A *= rng.uniform(0.2, 1.5) / s;
        Eigen::VectorXd c(d);
        for (int i = 0; i < d; ++i) c[i] = rng.uniform(-0.2, 0.2);
        maps.emplace_back("affine" + std::to_string(t), Domain::box(Point::Constant(d, -1.0), Point::Constant(d, 1.0)),
                          NormSpec::euclidean(), [A, c](const Point& x) -> Point { return A * x + c; }, std::nullopt,
                          Mapping::SelfMapCheck::skip);
    }
    for (int t = 0; t < 5; ++t) {
        const double a = rng.uniform(0.5, 3.0);
        const double b = rng.uniform(1.0, 2.0);
        const std::string text = format_double(a) + " / (x + " + format_double(b) + ")";
        maps.push_back(Mapping::from_expr("rational" + std::to_string(t), mapdef::parse(text), Domain::interval(0.0, 2.0),
                                          NormSpec::euclidean(), Domain::interval(0.0, 10.0)));
    }
    return maps;
}

}  // namespace

TEST_CASE("ex1 banach profile is |1 - 2 lambda|") {
    const Mapping T = Mapping::from_corpus("ex1");
    const PairSample pairs = grid_pairs(T.domain(), 64);
    const EnrichmentResult r = enriched_scan(T, ClassKind::banach, default_lambda_grid(), pairs);
    REQUIRE(r.profile.size() == 100);
    for (const auto& e : r.profile) {
        CHECK(std::abs(e.certificate.constants.at("c") - std::abs(1.0 - 2.0 * e.lambda)) <= 1e-9);
    }
    CHECK(r.verdict == EnrichmentVerdict::enrichable);
    REQUIRE(r.best);
    CHECK(r.best->b == 1.0 / r.best->lambda - 1.0);
    CHECK(r.best->constants.at("theta") == doctest::Approx(r.best->constants.at("c") * (r.best->b + 1.0)));
    CHECK(r.best->constants.at("c") < 1.0);
}

TEST_CASE("lambda = 1 reproduces the plain classification") {
    for (const char* name : {"ex1", "ex5"}) {
        const Mapping T = Mapping::from_corpus(name);
        const PairSample pairs = sample_pairs(T.domain(), SampleStrategy::uniform, 800, 5);
        for (ClassKind k : {ClassKind::banach, ClassKind::kannan, ClassKind::chatterjea, ClassKind::nonexpansive}) {
            const EnrichmentResult r = enriched_scan(T, k, {1.0}, pairs);
            const Certificate plain = estimate_class(k, T, pairs);
            CHECK(r.profile[0].certificate.constants == plain.constants);
            CHECK(r.profile[0].certificate.verdict == plain.verdict);
        }
        const EnrichmentResult ra = enriched_scan(T, ClassKind::almost, {1.0}, pairs);
        CHECK(ra.profile[0].certificate.constants == estimate_almost(T, pairs).constants);
    }
}

TEST_CASE("enriched kannan examples") {
    const Mapping T = Mapping::from_corpus("ex1");
    const PairSample pairs = sample_pairs(T.domain(), SampleStrategy::uniform, 2000, 0);
    for (double a : {0.1, 0.25, 0.4}) {
        const double lambda = 1.0 / (2.0 - 2.0 * a);
        const EnrichmentResult r = enriched_scan(T, ClassKind::kannan, {lambda}, pairs, {false, true});
        CHECK(r.profile[0].certificate.constants.at("a") <= a + 1e-9);
    }
}

TEST_CASE("chatterjea constant of the averaged ex1") {
    const Mapping T = Mapping::from_corpus("ex1");
    const PairSample pairs = sample_pairs(T.domain(), SampleStrategy::uniform, 2000, 0);
    for (double b : {0.1, 0.25, 0.4}) {
        const double lambda = (2.0 * b + 1.0) / (2.0 * b + 2.0);
        const EnrichmentResult r = enriched_scan(T, ClassKind::chatterjea, {lambda}, pairs, {false, true});
        CHECK(r.profile[0].certificate.constants.at("b") <= b + 1e-9);
    }
}

TEST_CASE("ex4 is an enriched almost contraction") {
    const Mapping T = Mapping::from_corpus("ex4");
    const PairSample pairs = grid_pairs(T.domain(), 64);
    const EnrichmentResult r = enriched_scan(T, ClassKind::almost, default_lambda_grid(), pairs);
    CHECK(r.verdict == EnrichmentVerdict::enrichable);
    REQUIRE(r.best);
    CHECK(r.best->constants.at("delta") < 1.0);
}

TEST_CASE("direct enriched inequality examples") {
    const Mapping T = Mapping::from_corpus("ex1");
    const auto [lhs, rhs] = direct_enriched_residual(T, ClassKind::banach, 3.0, make_point({0.0}), make_point({1.0}),
                                                     {{"theta", 2.0}});
    CHECK(lhs == 2.0);
    CHECK(rhs == 2.0);

    const Point x = make_point({0.2});
    const Point y = make_point({0.7});
    for (ClassKind k : {ClassKind::banach, ClassKind::kannan, ClassKind::chatterjea, ClassKind::almost,
                        ClassKind::nonexpansive}) {
        const Constants c = {{"c", 0.3}, {"a", 0.3}, {"b", 0.3}, {"delta", 0.3}, {"L", 1.5}};
        ClassParams p;
        p.almost_L = 1.5;
        const auto direct = direct_enriched_residual(T, k, 0.0, x, y, c);
        const auto base = inequality_sides(k, T, x, y, 0.3 + (k == ClassKind::nonexpansive ? 0.7 : 0.0), p);
        CHECK(direct.first == doctest::Approx(base.first));
        CHECK(direct.second == doctest::Approx(base.second));
    }
    CHECK_THROWS_AS(direct_enriched_residual(T, ClassKind::ciric_quasi, 1.0, x, y), PreconditionError);
    CHECK_THROWS_AS(direct_enriched_residual(T, ClassKind::kannan, 1.0, x, y), PreconditionError);
    CHECK_THROWS_AS(direct_enriched_residual(T, ClassKind::banach, -1.0, x, y, {{"c", 0.5}}), PreconditionError);
}

TEST_CASE("ex5 satisfies the enriched nonexpansive form at b = 1.5") {
    const Mapping T = Mapping::from_corpus("ex5");
    for (const auto& [x, y] : sample_pairs(T.domain(), SampleStrategy::uniform, 3000, 8)) {
        const auto [lhs, rhs] = direct_enriched_residual(T, ClassKind::nonexpansive, 1.5, x, y);
        CHECK(lhs <= rhs + 1e-12);
        CHECK(rhs == doctest::Approx(2.5 * std::abs(x[0] - y[0])));
    }
}

TEST_CASE("direct form at b agrees with the lambda form pair by pair") {
    const std::vector<Mapping> maps = {Mapping::from_corpus("ex1"), Mapping::from_corpus("ex4"),
                                       Mapping::from_corpus("ex5"), expr_map("x ^ 2", 0.0, 1.0)};
    for (const Mapping& T : maps) {
        const PairSample pairs = sample_pairs(T.domain(), SampleStrategy::uniform, 300, 17);
        for (double lambda : {0.1, 0.3, 0.5, 2.0 / 3.0, 0.9, 1.0}) {
            const double b = b_from_lambda(lambda);
            const AveragedMapping avg(T, lambda);
            for (ClassKind k : {ClassKind::banach, ClassKind::kannan, ClassKind::chatterjea, ClassKind::almost,
                                ClassKind::nonexpansive}) {
                const double constant = 0.45;
                ClassParams p;
                p.almost_L = 0.8;
                const Constants c = {{"c", constant}, {"a", constant}, {"b", constant}, {"delta", constant}, {"L", 0.8}};
                for (const auto& [x, y] : pairs) {
                    const auto [dl, dr] = direct_enriched_residual(T, k, b, x, y, c);
                    const auto [ll, lr] =
                        inequality_sides(k, avg.mapping(), x, y, k == ClassKind::nonexpansive ? 1.0 : constant, p);
                    CAPTURE(T.label());
                    CAPTURE(to_string(k));
                    CAPTURE(lambda);
                    CHECK(holds(dl, dr) == holds(ll / lambda, lr / lambda));
                }
            }
        }
    }
}

TEST_CASE("spc saturation on ex5") {
    const Mapping T = Mapping::from_corpus("ex5");
    const SaturationReport r = spc_saturation_check(T, 0.7, sample_pairs(T.domain(), SampleStrategy::uniform, 5000, 1));
    CHECK(r.b == doctest::Approx(7.0 / 3.0));
    CHECK(r.per_pair_agreement == 1.0);
    CHECK(r.max_identity_residual < 1e-10);

    SampleOptions o;
    o.eps_near = 1e-3;
    const PairSample near = sample_pairs(Domain::interval(0.5, 0.52), SampleStrategy::near_diagonal, 2000, 2, o);
    const SaturationReport low = spc_saturation_check(T, 0.5, near);
    CHECK(low.per_pair_agreement == 1.0);
    CHECK(low.both_fail > 0);
}

TEST_CASE("saturation holds for affine nonexpansive maps") {
    for (double alpha : {-1.0, -0.5, 0.0, 0.3, 1.0}) {
        const Mapping T = Mapping("affine", Domain::interval(-1, 1), NormSpec::euclidean(),
                                  [alpha](const Point& x) -> Point { return alpha * x; });
        const SaturationReport r = spc_saturation_check(T, 0.5, sample_pairs(T.domain(), SampleStrategy::uniform, 1000, 3));
        CHECK(r.per_pair_agreement == 1.0);
        CHECK(r.both_hold == r.pairs);
    }
}

TEST_CASE("saturation agreement on corpus and random maps for every k") {
    std::vector<Mapping> maps = random_maps(99);
    for (const auto& e : mapdef::corpus()) maps.push_back(Mapping::from_corpus(e));
    for (const Mapping& T : maps) {
        const PairSample pairs = sample_pairs(T.domain(), SampleStrategy::uniform, 1000, 6);
        for (int i = 1; i <= 9; ++i) {
            const SaturationReport r = spc_saturation_check(T, i / 10.0, pairs);
            CAPTURE(T.label());
            CHECK(r.per_pair_agreement == 1.0);
            CHECK(r.max_identity_residual < 1e-10);
        }
    }
}

TEST_CASE("demicontractive saturation") {
    const Mapping ex7 = Mapping::from_corpus("ex7");
    const FixedPointSet zero{{make_point({0.0})}, 1e-8};
    const SaturationReport r = demi_saturation_check(ex7, 0.5, zero, sample_points(ex7.domain(), 5000, 0));
    CHECK(r.per_pair_agreement == 1.0);
    CHECK(r.both_hold == r.pairs);

    const Mapping ex5 = Mapping::from_corpus("ex5");
    const FixedPointSet one{{make_point({1.0})}, 1e-8};
    CHECK(demi_saturation_check(ex5, 0.7, one, sample_points(ex5.domain(), 5000, 0)).per_pair_agreement == 1.0);

    const Mapping id("identity", Domain::interval(0, 1), NormSpec::euclidean(), [](const Point& x) { return x; });
    FixedPointSet grid;
    for (const Point& p : grid_nodes(id.domain(), 11)) grid.points.push_back(p);
    const SaturationReport ri = demi_saturation_check(id, 0.3, grid, sample_points(id.domain(), 200, 0));
    CHECK(ri.both_hold == ri.pairs);

    CHECK_THROWS_AS(demi_saturation_check(ex5, 0.7, FixedPointSet{}, sample_points(ex5.domain(), 10, 0)),
                    PreconditionError);
}

TEST_CASE("saturation checks refuse non-euclidean norms") {
    const Mapping T = Mapping::from_expr("m", mapdef::parse("1 - x"), Domain::interval(0, 1), NormSpec::max_norm());
    const PairSample pairs = sample_pairs(T.domain(), SampleStrategy::uniform, 10, 0);
    CHECK_THROWS_AS(spc_saturation_check(T, 0.5, pairs), UnsupportedStructure);
    const FixedPointSet half{{make_point({0.5})}, 1e-8};
    CHECK_THROWS_AS(demi_saturation_check(T, 0.5, half, sample_points(T.domain(), 10, 0)), UnsupportedStructure);
    const Mapping E = Mapping::from_corpus("ex1");
    CHECK_THROWS_AS(spc_saturation_check(E, 1.0, pairs), PreconditionError);
    CHECK_THROWS_AS(spc_saturation_check(E, 0.0, pairs), PreconditionError);
}

TEST_CASE("scan preconditions and probe mode") {
    const Mapping T = Mapping::from_corpus("ex1");
    const PairSample pairs = sample_pairs(T.domain(), SampleStrategy::uniform, 200, 0);
    CHECK_THROWS_AS(enriched_scan(T, ClassKind::banach, {}, pairs), PreconditionError);
    CHECK_THROWS_AS(enriched_scan(T, ClassKind::banach, {0.0, 0.5}, pairs), PreconditionError);
    CHECK_THROWS_AS(enriched_scan(T, ClassKind::strict_pseudo, {0.5}, pairs), PreconditionError);
    CHECK_THROWS_AS(enriched_scan(T, ClassKind::crr, {0.5}, pairs, {true, false}), PreconditionError);
    const EnrichmentResult crr = enriched_scan(T, ClassKind::crr, {0.25, 0.5, 1.0}, pairs);
    CHECK(crr.probe);
    CHECK(crr.verdict == EnrichmentVerdict::enrichable);
    const EnrichmentResult q = enriched_scan(T, ClassKind::ciric_quasi, {0.25, 0.5, 1.0}, grid_pairs(T.domain(), 11));
    CHECK(q.profile.back().certificate.verdict == Verdict::non_member_witnessed);
}

TEST_CASE("refinement never worsens the best constant") {
    const Mapping T = Mapping::from_corpus("ex5");
    const PairSample pairs = sample_pairs(T.domain(), SampleStrategy::uniform, 500, 0);
    const auto grid = std::vector<double>{0.2, 0.4, 0.6, 0.8, 1.0};
    const EnrichmentResult coarse = enriched_scan(T, ClassKind::banach, grid, pairs, {false, true});
    const EnrichmentResult fine = enriched_scan(T, ClassKind::banach, grid, pairs);
    REQUIRE(coarse.best);
    REQUIRE(fine.best);
    CHECK(fine.best->constants.at("c") <= coarse.best->constants.at("c"));
    CHECK_FALSE(fine.refined.empty());
}
