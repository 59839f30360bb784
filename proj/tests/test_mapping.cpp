#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "contractive/errors.hpp"
#include "contractive/mapping.hpp"
#include "oracles.hpp"

using namespace contractive;

namespace {

Mapping affine(const Eigen::MatrixXd& A, const Eigen::VectorXd& c, const Domain& d) {
    return Mapping("affine", d, NormSpec::euclidean(), [A, c](const Point& x) -> Point { return A * x + c; }, std::nullopt,
                   Mapping::SelfMapCheck::skip);
}

bool same_sets(const FixedPointSet& a, const FixedPointSet& b, double tol) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if ((a.points[i] - b.points[i]).norm() > tol) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("spec file map equals the corpus map") {
    const Mapping file = Mapping::from_spec(mapdef::parse_map_spec("name=f\ndim=1\ndomain=[0,1]\nexpr=1-x\n"));
    const Mapping ex1 = Mapping::from_corpus("ex1");
    for (const Point& x : sample_points(ex1.domain(), 100, 0)) CHECK(file(x) == ex1(x));

    const Mapping inv = Mapping::from_spec(mapdef::parse_map_spec("name=g\ndomain=[1/2,2]\nexpr=1/x\n"));
    const Mapping ex5 = Mapping::from_corpus("ex5");
    CHECK(inv.domain() == ex5.domain());
    for (const Point& x : sample_points(ex5.domain(), 100, 1)) CHECK(inv(x) == ex5(x));
}

TEST_CASE("corpus maps are self-maps") {
    for (const auto& e : mapdef::corpus()) {
        const Mapping T = Mapping::from_corpus(e);
        CAPTURE(e.name);
        CHECK(T.warnings().empty());
    }
}

TEST_CASE("non-self maps are flagged with witnesses") {
    const Mapping T = Mapping::from_expr("double", mapdef::parse("2 * x"), Domain::interval(0.0, 1.0),
                                         NormSpec::euclidean());
    REQUIRE_FALSE(T.warnings().empty());
    CHECK(T.warnings().front().find("not a self-map") != std::string::npos);
    CHECK(T.warnings().size() <= 6);
}

TEST_CASE("evaluation checks dimension") {
    const Mapping T = Mapping::from_corpus("ex1");
    CHECK_THROWS_AS(T(make_point({0.1, 0.2})), DimensionMismatch);
    CHECK(T.residual(make_point({0.25})) == 0.5);
}

TEST_CASE("averaged map") {
    const Mapping T = Mapping::from_corpus("ex1");
    const AveragedMapping A(T, 0.25);
    CHECK(A.b() == 3.0);
    CHECK(A(make_point({0.0}))[0] == 0.25);
    CHECK(A.mapping()(make_point({1.0}))[0] == 0.75);
    CHECK(lambda_from_b(3.0) == 0.25);
    CHECK(b_from_lambda(lambda_from_b(1.5)) == doctest::Approx(1.5));
    CHECK_THROWS_AS(AveragedMapping(T, 0.0), PreconditionError);
    CHECK_THROWS_AS(AveragedMapping(T, 1.5), PreconditionError);
    const AveragedMapping one(T, 1.0);
    for (const Point& x : sample_points(T.domain(), 50, 3)) CHECK(one(x) == T(x));
}

TEST_CASE("fixed points of the corpus against the bisection oracle") {
    const std::vector<std::pair<const char*, std::vector<double>>> expected = {
        {"ex1", {0.5}}, {"ex4", {0.5, 1.0}}, {"ex5", {1.0}}, {"ex7", {0.0}}};
    for (const auto& [name, pts] : expected) {
        const Mapping T = Mapping::from_corpus(name);
        const FixedPointSet f = fixed_points(T);
        CAPTURE(name);
        REQUIRE(f.size() == pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            CHECK(std::abs(f.points[i][0] - pts[i]) <= 1e-8);
            CHECK(T.residual(f.points[i]) <= 1e-8);
        }
    }
    const oracle::Fn inv = [](double x) { return 1.0 / x; };
    const auto roots = oracle::fixed_points(inv, 0.5, 2.0);
    REQUIRE(roots.size() == 1);
    CHECK(std::abs(fixed_points(Mapping::from_corpus("ex5")).points[0][0] - roots[0]) <= 1e-8);
}

TEST_CASE("fixed points survive averaging") {
    for (const auto& e : mapdef::corpus()) {
        const Mapping T = Mapping::from_corpus(e);
        const FixedPointSet base = fixed_points(T);
        for (double l : {0.1, 0.25, 0.5, 0.75, 1.0}) {
            CAPTURE(e.name);
            CAPTURE(l);
            CHECK(same_sets(fixed_points(averaged(T, l).mapping()), base, 1e-8));
        }
    }
}

TEST_CASE("fixed point of an affine contraction in three dimensions") {
    Eigen::MatrixXd A(3, 3);
    A << 0.3, 0.1, 0.0, -0.1, 0.2, 0.1, 0.0, 0.05, 0.4;
    Eigen::VectorXd c(3);
    c << 0.2, 0.1, -0.1;
    const Domain d = Domain::box(Point::Constant(3, -1.0), Point::Constant(3, 1.0));
    const Mapping T = affine(A, c, d);
    const Eigen::VectorXd p = (Eigen::MatrixXd::Identity(3, 3) - A).partialPivLu().solve(c);
    const FixedPointSet f = fixed_points(T, 30);
    REQUIRE(f.size() == 1);
    CHECK((f.points[0] - p).norm() <= 1e-7);
    CHECK(T.residual(f.points[0]) <= 1e-8);
}

TEST_CASE("fixed-point-free maps") {
    const Mapping T = Mapping::from_expr("shift", mapdef::parse("x + 1"), Domain::interval(0.0, 1.0), NormSpec::euclidean(),
                                         Domain::interval(0.0, 2.0));
    CHECK(fixed_points(T).empty());
}
