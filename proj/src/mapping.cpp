#include "contractive/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "contractive/format.hpp"

namespace contractive {

namespace {

std::string point_text(const Point& x) {
    std::ostringstream os;
    os << '(';
    for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << format_double(x[i]);
    os << ')';
    return os.str();
}

constexpr std::size_t kMaxWarnings = 5;

}  // namespace

Mapping::Mapping(std::string label, Domain domain, NormSpec norm, Evaluator evaluator, std::optional<Domain> ambient,
                 SelfMapCheck check)
    : label_(std::move(label)),
      domain_(std::move(domain)),
      ambient_(std::move(ambient)),
      norm_(norm),
      evaluator_(std::move(evaluator)) {
    if (!evaluator_) throw PreconditionError("mapping '" + label_ + "' has no evaluator");
    if (ambient_ && ambient_->dim() != domain_.dim()) throw DimensionMismatch("ambient and domain dimensions differ");
    if (check == SelfMapCheck::sample) check_self_map();
}

Mapping Mapping::from_expr(std::string label, mapdef::MapExpr expr, Domain domain, NormSpec norm,
                           std::optional<Domain> ambient) {
    if (expr.dim() != domain.dim()) {
        throw DimensionMismatch("expression dimension " + std::to_string(expr.dim()) + " does not match domain dimension " +
                                std::to_string(domain.dim()));
    }
    expr.validate_coverage(domain);
    auto shared = std::make_shared<const mapdef::MapExpr>(std::move(expr));
    Mapping m(std::move(label), std::move(domain), norm, [shared](const Point& x) { return shared->eval(x); },
              std::move(ambient), SelfMapCheck::skip);
    m.expr_ = std::move(shared);
    m.check_self_map();
    return m;
}

Mapping Mapping::from_spec(const mapdef::MapSpec& spec) {
    return from_expr(spec.name, spec.expr, spec.domain, spec.norm, spec.ambient);
}

Mapping Mapping::from_corpus(const mapdef::CorpusEntry& entry) {
    return from_expr(entry.name, entry.expr, entry.domain, entry.norm, entry.ambient);
}

Mapping Mapping::from_corpus(std::string_view name) { return from_corpus(mapdef::corpus_entry(name)); }

Point Mapping::operator()(const Point& x) const {
    if (static_cast<std::size_t>(x.size()) != dim()) {
        throw DimensionMismatch("point of dimension " + std::to_string(x.size()) + " passed to '" + label_ + "' of dimension " +
                                std::to_string(dim()));
    }
    Point y = evaluator_(x);
    if (static_cast<std::size_t>(y.size()) != dim()) throw InternalError("evaluator of '" + label_ + "' changed dimension");
    if (!y.allFinite()) throw EvalError("'" + label_ + "' produced a non-finite value at " + point_text(x));
    return y;
}

double Mapping::residual(const Point& x) const { return distance((*this)(x), x, norm_); }

void Mapping::check_self_map() {
    // Grid nodes catch boundary behaviour; uniform draws cover the interior.
    const std::size_t per_axis = std::max<std::size_t>(2, static_cast<std::size_t>(std::pow(4096.0, 1.0 / static_cast<double>(dim()))));
    std::vector<Point> probes;
    if (domain_.has_interior()) {
        probes = grid_nodes(domain_, per_axis);
        const PointSample extra = sample_points(domain_, 1000, 0);
        probes.insert(probes.end(), extra.points.begin(), extra.points.end());
    } else {
        probes.push_back(domain_.center());
    }
    std::size_t violations = 0;
    for (const Point& x : probes) {
        std::string problem;
        try {
            const Point y = (*this)(x);
            if (!codomain().contains(y)) problem = "T" + point_text(x) + " = " + point_text(y) + " lies outside " + codomain().to_string();
        } catch (const Error& e) {
            problem = std::string("evaluation failed at ") + point_text(x) + ": " + e.what();
        }
        if (problem.empty()) continue;
        if (++violations <= kMaxWarnings) warnings_.push_back("not a self-map: " + problem);
    }
    if (violations > kMaxWarnings) {
        warnings_.push_back(std::to_string(violations - kMaxWarnings) + " further self-map violations omitted");
    }
}

AveragedMapping::AveragedMapping(const Mapping& base, double lambda)
    : base_(base),
      lambda_(lambda),
      averaged_(
          [&]() {
              if (!(lambda > 0.0 && lambda <= 1.0)) {
                  throw PreconditionError("averaging parameter lambda must lie in (0,1], got " + format_double(lambda));
              }
              // Convexity of the domain makes T_lambda a self-map whenever T is one.
              return Mapping(base.label() + "_lambda=" + format_double(lambda), base.domain(), base.norm(),
                             [base, lambda](const Point& x) { return average_step(x, base(x), lambda); },
                             base.codomain() == base.domain() ? std::nullopt : std::optional<Domain>(base.codomain()),
                             Mapping::SelfMapCheck::skip);
          }()) {}

AveragedMapping averaged(const Mapping& T, double lambda) { return AveragedMapping(T, lambda); }

// ---------------------------------------------------------------------------
// Fixed points

namespace {

struct Candidate {
    Point x;
    double residual;
};

// Residual that treats evaluation failures as "no information".
double safe_residual(const Mapping& T, const Point& x) {
    try {
        return T.residual(x);
    } catch (const Error&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

double signed_residual(const Mapping& T, double x) {
    try {
        return T(make_point({x}))[0] - x;
    } catch (const Error&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

double bisect(const Mapping& T, double lo, double hi, double r_lo) {
    for (int it = 0; it < 200; ++it) {
        const double mid = lo + (hi - lo) / 2.0;
        if (mid <= lo || mid >= hi) break;
        const double r_mid = signed_residual(T, mid);
        if (std::isnan(r_mid)) break;
        if (r_mid == 0.0) return mid;
        if ((r_mid < 0.0) == (r_lo < 0.0)) {
            lo = mid;
            r_lo = r_mid;
        } else {
            hi = mid;
        }
    }
    return lo + (hi - lo) / 2.0;
}

double golden_min(const Mapping& T, double lo, double hi) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double fc = std::abs(signed_residual(T, c));
    double fd = std::abs(signed_residual(T, d));
    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = std::abs(signed_residual(T, c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = std::abs(signed_residual(T, d));
        }
    }
    // The bracket endpoints are candidates too (a root may sit on the bracket boundary).
    double best = (a + b) / 2.0;
    double fbest = std::abs(signed_residual(T, best));
    for (double x : {lo, hi}) {
        const double fx = std::abs(signed_residual(T, x));
        if (fx < fbest) {
            best = x;
            fbest = fx;
        }
    }
    return best;
}

void scan_1d(const Mapping& T, std::size_t cells, double tol, std::vector<Candidate>& out) {
    const double lo = T.domain().lower()[0];
    const double hi = T.domain().upper()[0];
    std::vector<double> xs(cells + 1);
    std::vector<double> rs(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i) {
        xs[i] = i == cells ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(cells);
        rs[i] = signed_residual(T, xs[i]);
    }
    const auto consider = [&](double x) {
        const double r = safe_residual(T, make_point({x}));
        if (r <= tol && T.domain().contains(make_point({x}))) out.push_back({make_point({x}), r});
    };
    for (std::size_t i = 0; i <= cells; ++i) {
        if (std::isnan(rs[i])) continue;
        if (std::abs(rs[i]) <= tol) consider(xs[i]);
        if (i < cells && !std::isnan(rs[i + 1]) && (rs[i] < 0.0) != (rs[i + 1] < 0.0) && rs[i] != 0.0 && rs[i + 1] != 0.0) {
            consider(bisect(T, xs[i], xs[i + 1], rs[i]));
        }
        if (i > 0 && i < cells && !std::isnan(rs[i - 1]) && !std::isnan(rs[i + 1])) {
            const double a = std::abs(rs[i]);
            if (a <= std::abs(rs[i - 1]) && a <= std::abs(rs[i + 1]) && a > tol) consider(golden_min(T, xs[i - 1], xs[i + 1]));
        }
    }
}

void scan_nd(const Mapping& T, std::size_t grid_resolution, double tol, std::vector<Candidate>& out) {
    const std::size_t dim = T.dim();
    const double budget = 1.0e5;
    const auto per_axis = std::max<std::size_t>(
        3, std::min<std::size_t>(grid_resolution + 1, static_cast<std::size_t>(std::pow(budget, 1.0 / static_cast<double>(dim)))));
    const Point& lo = T.domain().lower();
    const Point& hi = T.domain().upper();

    // Full bounding-box grid in row-major order; nodes outside the domain carry NaN.
    std::size_t total = 1;
    for (std::size_t k = 0; k < dim; ++k) total *= per_axis;
    std::vector<std::size_t> stride(dim, 1);
    for (std::size_t k = dim - 1; k > 0; --k) stride[k - 1] = stride[k] * per_axis;
    const auto node = [&](std::size_t flat) {
        Point x(static_cast<Eigen::Index>(dim));
        for (std::size_t k = 0; k < dim; ++k) {
            const auto a = static_cast<Eigen::Index>(k);
            const std::size_t i = (flat / stride[k]) % per_axis;
            x[a] = i + 1 == per_axis ? hi[a] : lo[a] + (hi[a] - lo[a]) * static_cast<double>(i) / static_cast<double>(per_axis - 1);
        }
        return x;
    };
    std::vector<double> res(total);
    for (std::size_t f = 0; f < total; ++f) {
        const Point x = node(f);
        res[f] = T.domain().contains(x) ? safe_residual(T, x) : std::numeric_limits<double>::quiet_NaN();
    }

    for (std::size_t f = 0; f < total; ++f) {
        if (std::isnan(res[f])) continue;
        bool local_min = true;
        for (std::size_t k = 0; k < dim && local_min; ++k) {
            const std::size_t i = (f / stride[k]) % per_axis;
            if (i > 0 && !std::isnan(res[f - stride[k]]) && res[f - stride[k]] < res[f]) local_min = false;
            if (i + 1 < per_axis && !std::isnan(res[f + stride[k]]) && res[f + stride[k]] < res[f]) local_min = false;
        }
        if (!local_min) continue;
        // Refine by the averaged iteration (1/2)(x + Tx).
        Point x = node(f);
        double r = res[f];
        for (int it = 0; it < 20000 && r > tol / 10.0; ++it) {
            Point next;
            try {
                next = average_step(x, T(x), 0.5);
            } catch (const Error&) {
                break;
            }
            if (!T.domain().contains(next)) break;
            x = std::move(next);
            r = safe_residual(T, x);
            if (std::isnan(r)) break;
        }
        if (r <= tol) out.push_back({x, r});
    }
}

}  // namespace

FixedPointSet fixed_points(const Mapping& T, std::size_t grid_resolution, double tol) {
    if (grid_resolution == 0) throw PreconditionError("grid resolution must be positive");
    if (!(tol > 0.0)) throw PreconditionError("fixed-point tolerance must be positive");
    std::vector<Candidate> found;
    if (!T.domain().has_interior()) {
        const Point c = T.domain().center();
        const double r = safe_residual(T, c);
        if (r <= tol) found.push_back({c, r});
    } else if (T.dim() == 1) {
        scan_1d(T, grid_resolution, tol, found);
    } else {
        scan_nd(T, grid_resolution, tol, found);
    }

    std::sort(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) {
        return std::lexicographical_compare(a.x.data(), a.x.data() + a.x.size(), b.x.data(), b.x.data() + b.x.size());
    });
    const double radius = 10.0 * tol;
    std::vector<Candidate> clusters;
    for (Candidate& c : found) {
        auto it = std::find_if(clusters.begin(), clusters.end(),
                               [&](const Candidate& k) { return distance(k.x, c.x, T.norm()) <= radius; });
        if (it == clusters.end()) {
            clusters.push_back(std::move(c));
        } else if (c.residual < it->residual) {
            *it = std::move(c);
        }
    }
    FixedPointSet set;
    set.tolerance = tol;
    for (Candidate& c : clusters) set.points.push_back(std::move(c.x));
    return set;
}

}  // namespace contractive
