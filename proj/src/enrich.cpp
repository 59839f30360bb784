#include "contractive/enrich.hpp"

#include <algorithm>
#include <cmath>

#include "contractive/format.hpp"

namespace contractive {

namespace {

// Normalized margin below which an inequality counts as failed in the saturation checks.
constexpr double kMarginTol = 1e-10;

bool is_base_kind(ClassKind k) {
    return k == ClassKind::banach || k == ClassKind::kannan || k == ClassKind::chatterjea || k == ClassKind::almost ||
           k == ClassKind::nonexpansive;
}

bool is_probe_kind(ClassKind k) { return k == ClassKind::crr || k == ClassKind::ciric_quasi; }

Certificate certify_averaged(ClassKind kind, const Mapping& Tl, const PairSample& pairs) {
    switch (kind) {
        case ClassKind::almost: return estimate_almost(Tl, pairs);
        case ClassKind::crr: return estimate_crr(Tl, pairs);
        default: return estimate_class(kind, Tl, pairs);
    }
}

ProfileEntry entry_at(const Mapping& T, ClassKind kind, double lambda, const PairSample& pairs) {
    const AveragedMapping avg(T, lambda);
    return {lambda, certify_averaged(kind, avg.mapping(), pairs)};
}

const ProfileEntry* better(const ProfileEntry* current, const ProfileEntry& candidate) {
    if (!candidate.certificate.member()) return current;
    if (!current || candidate.certificate.primary_constant() < current->certificate.primary_constant()) return &candidate;
    return current;
}

std::vector<double> refinement_points(const std::vector<double>& grid, double best) {
    const auto it = std::find(grid.begin(), grid.end(), best);
    const std::size_t i = static_cast<std::size_t>(it - grid.begin());
    const double left = i > 0 ? grid[i - 1] : 0.0;
    const double right = i + 1 < grid.size() ? grid[i + 1] : best;
    std::vector<double> pts;
    for (int j = 9; j >= 1; --j) {
        const double l = best - j * (best - left) / 10.0;
        if (l > 0.0 && l < best) pts.push_back(l);
    }
    for (int j = 1; j <= 9; ++j) {
        const double r = best + j * (right - best) / 10.0;
        if (r > best && r <= 1.0) pts.push_back(r);
    }
    return pts;
}

Constants best_constants(ClassKind kind, const Certificate& cert, double b) {
    Constants c = cert.constants;
    if (kind == ClassKind::banach) c["theta"] = c.at("c") * (b + 1.0);
    if (kind == ClassKind::almost) c["theta"] = c.at("delta") * (b + 1.0);
    return c;
}

double require_constant(const Constants& c, const char* key, ClassKind kind) {
    const auto it = c.find(key);
    if (it == c.end()) throw PreconditionError(to_string(kind) + " enriched form needs constant '" + key + "'");
    return it->second;
}

void require_euclidean(const Mapping& T, const char* what) {
    if (!T.norm().has_inner_product()) {
        throw UnsupportedStructure(std::string(what) + " is an inner-product statement; refusing under the " +
                                   T.norm().to_string() + " norm");
    }
}

void require_k(double k) {
    if (!(k > 0.0 && k < 1.0)) throw PreconditionError("k must lie in (0, 1), got " + format_double(k));
}

/// Evaluates both inequalities for one (u, v) = (x - y, Tx - Ty) and records the outcome.
/// The strict pseudocontraction margin is rescaled by 1/(1-k) so both margins share units.
void tally(SaturationReport& r, const Point& u, const Point& v, const Point& u_minus_v) {
    const double A = u.squaredNorm();
    const double B = u.dot(v);
    const double C = v.squaredNorm();
    const double D = u_minus_v.squaredNorm();
    const double bp1 = r.b + 1.0;
    const double scale = bp1 * bp1 * A + C;
    const double spc_margin = (A + r.k * D - C) / (1.0 - r.k);
    const double lhs = (r.b * u + v).norm();
    const double rhs = bp1 * u.norm();
    const double ne_margin = rhs * rhs - lhs * lhs;
    const bool spc = spc_margin >= -kMarginTol * scale;
    const bool ne = ne_margin >= -kMarginTol * scale;
    r.max_identity_residual = std::max(r.max_identity_residual, std::abs(D - (A - 2.0 * B + C)));
    ++r.pairs;
    if (spc && ne) ++r.both_hold;
    else if (!spc && !ne) ++r.both_fail;
    else ++r.disagree;
}

void finish(SaturationReport& r) {
    r.per_pair_agreement = r.pairs == 0 ? 0.0 : static_cast<double>(r.both_hold + r.both_fail) / static_cast<double>(r.pairs);
}

}  // namespace

const std::vector<double>& default_lambda_grid() {
    static const std::vector<double> grid = [] {
        std::vector<double> g;
        for (int i = 1; i <= 99; ++i) g.push_back(i / 100.0);
        g.push_back(1.0);
        return g;
    }();
    return grid;
}

std::string to_string(EnrichmentVerdict v) {
    return v == EnrichmentVerdict::enrichable ? "enrichable" : "not_enriched_on_grid";
}

std::string to_string(SaturationKind k) {
    return k == SaturationKind::spc_vs_enriched_ne ? "spc_vs_enriched_ne" : "demi_vs_enriched_qne";
}

EnrichmentResult enriched_scan(const Mapping& T, ClassKind base_kind, const std::vector<double>& lambda_grid,
                               const PairSample& pairs, const ScanOptions& options) {
    const bool probe = is_probe_kind(base_kind);
    if (!is_base_kind(base_kind) && !(probe && options.allow_probe)) {
        throw PreconditionError("no enriched scan for base class " + to_string(base_kind));
    }
    if (lambda_grid.empty()) throw PreconditionError("lambda grid is empty");
    for (double l : lambda_grid) {
        if (!(l > 0.0 && l <= 1.0)) throw PreconditionError("lambda grid values must lie in (0, 1], got " + format_double(l));
    }

    EnrichmentResult result;
    result.base_kind = base_kind;
    result.probe = probe;
    result.profile.reserve(lambda_grid.size());
    for (double l : lambda_grid) result.profile.push_back(entry_at(T, base_kind, l, pairs));

    const ProfileEntry* best = nullptr;
    for (const auto& e : result.profile) best = better(best, e);

    if (best && options.refine) {
        const double at = best->lambda;
        for (double l : refinement_points(lambda_grid, at)) result.refined.push_back(entry_at(T, base_kind, l, pairs));
        for (const auto& e : result.refined) best = better(best, e);
    }

    if (best) {
        const double b = b_from_lambda(best->lambda);
        result.best = EnrichmentBest{best->lambda, b, best_constants(base_kind, best->certificate, b)};
        result.verdict = EnrichmentVerdict::enrichable;
    }

    const auto [lo, hi] = std::minmax_element(lambda_grid.begin(), lambda_grid.end());
    result.notes.push_back("grid covers b in [" + format_double(b_from_lambda(*hi)) + ", " +
                           format_double(b_from_lambda(*lo)) + "]; larger b is not scanned");
    if (probe) result.notes.push_back("probe mode: certificates only, no saturation claim");
    return result;
}

std::pair<double, double> direct_enriched_residual(const Mapping& T, ClassKind base_kind, double b, const Point& x,
                                                   const Point& y, const Constants& constants) {
    if (!(b >= 0.0)) throw PreconditionError("enrichment parameter b must be nonnegative");
    const NormSpec& n = T.norm();
    const Point tx = T(x);
    const Point ty = T(y);
    const double lhs = norm(b * (x - y) + tx - ty, n);
    switch (base_kind) {
        case ClassKind::banach: {
            const double theta = constants.count("theta") ? constants.at("theta")
                                                          : require_constant(constants, "c", base_kind) * (b + 1.0);
            return {lhs, theta * distance(x, y, n)};
        }
        case ClassKind::kannan: {
            const double a = require_constant(constants, "a", base_kind);
            return {lhs, a * (distance(x, tx, n) + distance(y, ty, n))};
        }
        case ClassKind::chatterjea: {
            const double c = require_constant(constants, "b", base_kind);
            return {lhs, c * (norm((b + 1.0) * (x - y) + y - ty, n) + norm((b + 1.0) * (y - x) + x - tx, n))};
        }
        case ClassKind::almost: {
            const double theta = constants.count("theta") ? constants.at("theta")
                                                          : require_constant(constants, "delta", base_kind) * (b + 1.0);
            const double L = require_constant(constants, "L", base_kind);
            return {lhs, theta * distance(x, y, n) + L * norm(b * (x - y) + tx - y, n)};
        }
        case ClassKind::nonexpansive:
            return {lhs, (b + 1.0) * distance(x, y, n)};
        default:
            throw PreconditionError("no direct enriched form for " + to_string(base_kind));
    }
}

SaturationReport spc_saturation_check(const Mapping& T, double k, const PairSample& pairs) {
    require_euclidean(T, "spc saturation check");
    require_k(k);
    SaturationReport r;
    r.kind = SaturationKind::spc_vs_enriched_ne;
    r.k = k;
    r.b = k / (1.0 - k);
    for (const auto& [x, y] : pairs) {
        const Point tx = T(x);
        const Point ty = T(y);
        tally(r, x - y, tx - ty, (x - y) - (tx - ty));
    }
    finish(r);
    return r;
}

SaturationReport demi_saturation_check(const Mapping& T, double k, const FixedPointSet& fix, const PointSample& points) {
    require_euclidean(T, "demicontractive saturation check");
    require_k(k);
    if (fix.empty()) throw PreconditionError("demicontractive saturation check needs a nonempty fixed-point set");
    SaturationReport r;
    r.kind = SaturationKind::demi_vs_enriched_qne;
    r.k = k;
    r.b = k / (1.0 - k);
    for (const Point& x : points) {
        const Point tx = T(x);
        for (const Point& p : fix) tally(r, x - p, tx - p, x - tx);
    }
    finish(r);
    return r;
}

}  // namespace contractive
