#include "contractive/iterate.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "contractive/format.hpp"

namespace contractive {

namespace {

double get(const Constants& c, const char* key, const char* kind) {
    const auto it = c.find(key);
    if (it == c.end()) throw PreconditionError(std::string(kind) + " bound needs constant '" + key + "'");
    return it->second;
}

void require_range(bool ok, const std::string& what) {
    if (!ok) throw PreconditionError("inadmissible constants: " + what);
}

double residual_or_nan(const Mapping& T, const Point& x) {
    try {
        return T.residual(x);
    } catch (const EvalError&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

}  // namespace

std::string to_string(Termination t) {
    switch (t) {
        case Termination::tolerance: return "tolerance";
        case Termination::max_iters: return "max_iters";
        case Termination::left_domain: return "left_domain";
    }
    return "?";
}

std::string to_string(BoundKind k) {
    switch (k) {
        case BoundKind::banach: return "banach";
        case BoundKind::enriched_banach: return "enriched_banach";
        case BoundKind::kannan: return "kannan";
        case BoundKind::chatterjea: return "chatterjea";
        case BoundKind::almost: return "almost";
        case BoundKind::enriched_almost: return "enriched_almost";
    }
    return "?";
}

BoundKind parse_bound_kind(const std::string& name) {
    for (BoundKind k : {BoundKind::banach, BoundKind::enriched_banach, BoundKind::kannan, BoundKind::chatterjea,
                        BoundKind::almost, BoundKind::enriched_almost}) {
        if (to_string(k) == name) return k;
    }
    throw PreconditionError("unknown bound kind '" + name + "'");
}

std::string to_string(ConvergenceReport::Status s) {
    return s == ConvergenceReport::Status::converged ? "converged" : "inconclusive";
}

IterationTrace krasnoselskij(const Mapping& T, const IterationConfig& cfg) {
    if (!(cfg.lambda > 0.0 && cfg.lambda <= 1.0)) throw PreconditionError("lambda must lie in (0, 1]");
    if (cfg.max_iters == 0) throw PreconditionError("max_iters must be positive");
    if (!(cfg.stop_tol > 0.0)) throw PreconditionError("stop_tol must be positive");
    if (static_cast<std::size_t>(cfg.x0.size()) != T.dim()) {
        throw DimensionMismatch("x0 has dimension " + std::to_string(cfg.x0.size()) + ", map has " +
                                std::to_string(T.dim()));
    }
    if (!T.domain().contains(cfg.x0)) throw PreconditionError("x0 lies outside the domain " + T.domain().to_string());

    IterationTrace trace;
    trace.lambda = cfg.lambda;
    trace.stop_tol = cfg.stop_tol;
    Point x = cfg.x0;
    Point tx = T(x);
    trace.rows.push_back({0, x, std::nullopt, distance(tx, x, T.norm())});
    for (std::size_t n = 1; n <= cfg.max_iters; ++n) {
        const Point next = average_step(x, tx, cfg.lambda);
        const double step = distance(next, x, T.norm());
        if (!T.domain().contains(next)) {
            trace.rows.push_back({n, next, step, residual_or_nan(T, next)});
            trace.terminated_by = Termination::left_domain;
            return trace;
        }
        x = next;
        tx = T(x);
        trace.rows.push_back({n, x, step, distance(tx, x, T.norm())});
        if (step < cfg.stop_tol) {
            trace.terminated_by = Termination::tolerance;
            return trace;
        }
    }
    trace.terminated_by = Termination::max_iters;
    return trace;
}

double delta_for(BoundKind kind, const Constants& c) {
    switch (kind) {
        case BoundKind::banach: {
            const double v = get(c, "c", "banach");
            require_range(v >= 0.0 && v < 1.0, "banach needs 0 <= c < 1");
            return v;
        }
        case BoundKind::enriched_banach:
        case BoundKind::enriched_almost: {
            const char* name = kind == BoundKind::enriched_banach ? "enriched_banach" : "enriched_almost";
            const double theta = get(c, "theta", name);
            const double b = get(c, "b", name);
            require_range(b >= 0.0 && theta >= 0.0 && theta < b + 1.0, std::string(name) + " needs 0 <= theta < b + 1");
            return theta / (b + 1.0);
        }
        case BoundKind::kannan: {
            const double a = get(c, "a", "kannan");
            require_range(a >= 0.0 && a < 0.5, "kannan needs 0 <= a < 1/2");
            return a / (1.0 - a);
        }
        case BoundKind::chatterjea: {
            const double b = get(c, "b", "chatterjea");
            require_range(b >= 0.0 && b < 0.5, "chatterjea needs 0 <= b < 1/2");
            return b / (1.0 - b);
        }
        case BoundKind::almost: {
            const double d = get(c, "delta", "almost");
            require_range(d >= 0.0 && d < 1.0, "almost needs 0 <= delta < 1");
            return d;
        }
    }
    throw InternalError("unknown bound kind");
}

double delta_for(const Certificate& cert) {
    if (!cert.member()) throw PreconditionError("a-priori bounds need a member certificate");
    switch (cert.kind) {
        case ClassKind::banach: return delta_for(BoundKind::banach, cert.constants);
        case ClassKind::kannan: return delta_for(BoundKind::kannan, cert.constants);
        case ClassKind::chatterjea: return delta_for(BoundKind::chatterjea, cert.constants);
        case ClassKind::almost: return delta_for(BoundKind::almost, cert.constants);
        default: throw PreconditionError("no a-priori estimate for " + to_string(cert.kind));
    }
}

ErrorBoundReport apriori_bounds(const Mapping& T, const IterationTrace& trace, double delta, const Point& limit,
                                const BoundOptions& options) {
    if (!(delta >= 0.0 && delta < 1.0)) throw PreconditionError("delta must lie in [0, 1), got " + format_double(delta));
    if (trace.rows.empty()) throw PreconditionError("empty trace");
    const double res = T.residual(limit);
    if (!(res <= 10.0 * trace.stop_tol)) {
        throw PreconditionError("limit is not a verified fixed point: residual " + format_double(res));
    }
    ErrorBoundReport report;
    report.delta = delta;
    report.limit = limit;
    report.max_violation = -std::numeric_limits<double>::infinity();
    const std::size_t rows = trace.rows.size();
    for (std::size_t n = 1; n < rows; ++n) {
        const double step = *trace.rows[n].step;
        const std::size_t imax = options.full_range ? rows - n : std::min<std::size_t>(10, rows - n);
        double power = 1.0;
        for (std::size_t i = 1; i <= imax; ++i) {
            power *= delta;
            BoundEntry e;
            e.n = n;
            e.i = i;
            e.bound = power / (1.0 - delta) * step;
            e.actual = distance(trace.rows[n + i - 1].x, limit, T.norm());
            e.ok = e.actual <= e.bound + options.slack;
            report.max_violation = std::max(report.max_violation, e.actual - e.bound);
            report.all_ok = report.all_ok && e.ok;
            report.entries.push_back(e);
        }
    }
    if (report.entries.empty()) report.max_violation = 0.0;
    return report;
}

ConvergenceReport convergence_report(const IterationTrace& trace, const FixedPointSet& fix) {
    if (trace.rows.empty()) throw PreconditionError("empty trace");
    ConvergenceReport r;
    const Point& last = trace.final_point();

    std::vector<double> steps;
    for (const auto& row : trace.rows) {
        if (row.step) steps.push_back(*row.step);
    }
    const std::size_t first = steps.size() > 11 ? steps.size() - 11 : 0;
    double log_sum = 0.0;
    std::size_t used = 0;
    for (std::size_t j = first + 1; j < steps.size(); ++j) {
        if (steps[j - 1] > 0.0 && steps[j] > 0.0) {
            log_sum += std::log(steps[j] / steps[j - 1]);
            ++used;
        }
    }
    if (used > 0) r.observed_ratio = std::exp(log_sum / static_cast<double>(used));

    if (!fix.empty()) {
        double best = std::numeric_limits<double>::infinity();
        for (const Point& p : fix) {
            if (p.size() != last.size()) continue;
            const double d = (p - last).norm();
            if (d < best) {
                best = d;
                r.limit = p;
            }
        }
        r.terminal_distance = best;
    }

    if (!trace.converged()) {
        r.status = ConvergenceReport::Status::inconclusive;
        r.message = "trace stopped by " + to_string(trace.terminated_by) + " without meeting the step tolerance";
        return r;
    }
    r.status = ConvergenceReport::Status::converged;
    if (fix.empty()) {
        r.limit = last;
        r.terminal_distance = 0.0;
        r.message = "no fixed points supplied; limit is the final iterate";
    } else {
        r.message = "nearest detected fixed point to the final iterate";
    }
    return r;
}

void write_trace_csv(std::ostream& out, const IterationTrace& trace) {
    const std::size_t dim = trace.rows.empty() ? 0 : static_cast<std::size_t>(trace.rows.front().x.size());
    out << 'n';
    for (std::size_t j = 1; j <= dim; ++j) out << ",x" << j;
    out << ",step_norm,residual\n";
    for (const auto& row : trace.rows) {
        out << row.n;
        for (Eigen::Index j = 0; j < row.x.size(); ++j) out << ',' << format_double(row.x[j]);
        out << ',' << (row.step ? format_double(*row.step) : std::string()) << ',' << format_double(row.residual) << '\n';
    }
}

void write_bounds_csv(std::ostream& out, const ErrorBoundReport& report) {
    out << "n,i,bound,actual,ok\n";
    for (const auto& e : report.entries) {
        out << e.n << ',' << e.i << ',' << format_double(e.bound) << ',' << format_double(e.actual) << ','
            << (e.ok ? 1 : 0) << '\n';
    }
}

}  // namespace contractive
