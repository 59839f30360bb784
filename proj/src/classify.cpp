#include "contractive/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "contractive/format.hpp"

namespace contractive {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Relative slack for non-strict inequalities and for grouping near-maximal pairs.
constexpr double kSlack = 1e-12;

struct KindTraits {
    const char* name;
    const char* constant;
    double threshold;
    bool inclusive;
    const char* threshold_text;
};

KindTraits traits(ClassKind kind) {
    switch (kind) {
        case ClassKind::banach: return {"banach", "c", 1.0, false, "c < 1"};
        case ClassKind::kannan: return {"kannan", "a", 0.5, false, "a < 1/2"};
        case ClassKind::chatterjea: return {"chatterjea", "b", 0.5, false, "b < 1/2"};
        case ClassKind::zamfirescu: return {"zamfirescu", "", 0.0, false, "each pair satisfies z1, z2 or z3"};
        case ClassKind::almost: return {"almost", "delta", 1.0, false, "delta < 1 for some L >= 0"};
        case ClassKind::ciric_quasi: return {"ciric_quasi", "h", 1.0, false, "h < 1"};
        case ClassKind::crr: return {"crr", "a", 1.0, false, "a + 2b < 1"};
        case ClassKind::nonexpansive: return {"nonexpansive", "c", 1.0, true, "c <= 1"};
        case ClassKind::quasi_nonexpansive: return {"quasi_nonexpansive", "c", 1.0, true, "c <= 1"};
        case ClassKind::strict_pseudo: return {"strict_pseudo", "k", 1.0, false, "k < 1"};
        case ClassKind::demicontractive: return {"demicontractive", "k", 1.0, false, "k < 1"};
    }
    throw InternalError("unknown class kind");
}

double ratio(double num, double den) {
    if (den == 0.0) {
        if (num > 0.0) return kInf;
        if (num < 0.0) return -kInf;
        return 0.0;
    }
    return num / den;
}

bool holds(double lhs, double rhs) {
    return lhs <= rhs + kSlack * std::max({std::abs(lhs), std::abs(rhs), std::numeric_limits<double>::min()});
}

/// The six displacements of a pair, plus the squared inner-product quantities when available.
struct Displacements {
    double xy, TxTy, xTx, yTy, xTy, yTx;
};

Displacements displacements(const Mapping& T, const Point& x, const Point& y, const Point& tx, const Point& ty) {
    const NormSpec& n = T.norm();
    return {distance(x, y, n), distance(tx, ty, n), distance(x, tx, n),
            distance(y, ty, n), distance(x, ty, n), distance(y, tx, n)};
}

void require_kind_prerequisites(ClassKind kind, const Mapping& T) {
    if (needs_inner_product(kind) && !T.norm().has_inner_product()) {
        throw UnsupportedStructure(to_string(kind) + " needs an inner product; the norm is " + T.norm().to_string());
    }
}

double required_from(ClassKind kind, const Mapping& T, const Point& x, const Point& y, const Point& tx, const Point& ty,
                     const ClassParams& params) {
    switch (kind) {
        case ClassKind::quasi_nonexpansive:
            return ratio(distance(tx, y, T.norm()), distance(x, y, T.norm()));
        case ClassKind::demicontractive: {
            const double lhs = (tx - y).squaredNorm() - (x - y).squaredNorm();
            return ratio(lhs, (x - tx).squaredNorm());
        }
        case ClassKind::strict_pseudo: {
            const double num = (tx - ty).squaredNorm() - (x - y).squaredNorm();
            return ratio(num, ((x - y) - (tx - ty)).squaredNorm());
        }
        default:
            break;
    }
    const Displacements d = displacements(T, x, y, tx, ty);
    switch (kind) {
        case ClassKind::banach:
        case ClassKind::nonexpansive: return ratio(d.TxTy, d.xy);
        case ClassKind::kannan: return ratio(d.TxTy, d.xTx + d.yTy);
        case ClassKind::chatterjea: return ratio(d.TxTy, d.xTy + d.yTx);
        case ClassKind::ciric_quasi: return ratio(d.TxTy, std::max({d.xy, d.xTx, d.yTy, d.xTy, d.yTx}));
        case ClassKind::almost: return ratio(d.TxTy - params.almost_L * d.yTx, d.xy);
        case ClassKind::crr: return ratio(d.TxTy - params.crr_b * (d.xTx + d.yTy), d.xy);
        case ClassKind::zamfirescu:
            throw PreconditionError("zamfirescu has no single required constant; use check_zamfirescu");
        default: break;
    }
    throw InternalError("unhandled class kind");
}

std::pair<double, double> sides_from(ClassKind kind, const Mapping& T, const Point& x, const Point& y, const Point& tx,
                                     const Point& ty, double constant, const ClassParams& params) {
    switch (kind) {
        case ClassKind::quasi_nonexpansive:
            return {distance(tx, y, T.norm()), constant * distance(x, y, T.norm())};
        case ClassKind::demicontractive:
            return {(tx - y).squaredNorm(), (x - y).squaredNorm() + constant * (x - tx).squaredNorm()};
        case ClassKind::strict_pseudo:
            return {(tx - ty).squaredNorm(), (x - y).squaredNorm() + constant * ((x - y) - (tx - ty)).squaredNorm()};
        default:
            break;
    }
    const Displacements d = displacements(T, x, y, tx, ty);
    switch (kind) {
        case ClassKind::banach:
        case ClassKind::nonexpansive: return {d.TxTy, constant * d.xy};
        case ClassKind::kannan: return {d.TxTy, constant * (d.xTx + d.yTy)};
        case ClassKind::chatterjea: return {d.TxTy, constant * (d.xTy + d.yTx)};
        case ClassKind::ciric_quasi: return {d.TxTy, constant * std::max({d.xy, d.xTx, d.yTy, d.xTy, d.yTx})};
        case ClassKind::almost: return {d.TxTy, constant * d.xy + params.almost_L * d.yTx};
        case ClassKind::crr: return {d.TxTy, constant * d.xy + params.crr_b * (d.xTx + d.yTy)};
        default: break;
    }
    throw PreconditionError("no single inequality for " + to_string(kind));
}

/// Index of the sample maximum. Values within the relative slack of the maximum count as tied;
/// among those the pair with the widest separation wins, then the earliest.
std::size_t pick_maximum(const std::vector<double>& values, const std::vector<double>& separation) {
    std::size_t best = 0;
    double top = -kInf;
    for (double v : values) top = std::max(top, v);
    const double band = std::isfinite(top) ? top - kSlack * std::max(1.0, std::abs(top)) : top;
    double widest = -1.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] >= band && separation[i] > widest) {
            widest = separation[i];
            best = i;
        }
    }
    return best;
}

bool below_threshold(double value, const KindTraits& t) {
    if (t.inclusive) return holds(value, t.threshold);
    return value < t.threshold;
}

SampleInfo info_of(const PairSample& s, std::size_t evaluated) {
    return {s.strategy, s.count, s.seed, evaluated};
}

struct Evaluated {
    std::vector<Point> xs;
    std::vector<Point> ys;
    std::vector<Point> txs;
    std::vector<Point> tys;
};

Evaluated evaluate_pairs(const Mapping& T, const PairSample& pairs) {
    Evaluated e;
    e.xs.reserve(pairs.size());
    for (const auto& [x, y] : pairs) {
        if (x == y) throw PreconditionError("sample contains a pair with x == y");
        e.xs.push_back(x);
        e.ys.push_back(y);
        e.txs.push_back(T(x));
        e.tys.push_back(T(y));
    }
    return e;
}

Evaluated evaluate_fixed(const Mapping& T, const std::vector<Point>& points, const FixedPointSet& fix) {
    Evaluated e;
    for (const Point& x : points) {
        const Point tx = T(x);
        for (const Point& p : fix) {
            e.xs.push_back(x);
            e.ys.push_back(p);
            e.txs.push_back(tx);
            e.tys.push_back(p);
        }
    }
    return e;
}

Certificate certify(ClassKind kind, const Mapping& T, const Evaluated& e, SampleInfo info, const ClassParams& params) {
    const KindTraits t = traits(kind);
    Certificate cert;
    cert.kind = kind;
    cert.sample = info;
    cert.sample.evaluated = e.xs.size();
    cert.threshold = t.threshold;
    cert.threshold_text = t.threshold_text;
    if (e.xs.empty()) throw EmptySample("no pairs to evaluate for " + to_string(kind));

    std::vector<double> req(e.xs.size());
    std::vector<double> sep(e.xs.size());
    for (std::size_t i = 0; i < e.xs.size(); ++i) {
        req[i] = required_from(kind, T, e.xs[i], e.ys[i], e.txs[i], e.tys[i], params);
        sep[i] = distance(e.xs[i], e.ys[i], T.norm());
    }
    const std::size_t arg = pick_maximum(req, sep);
    const double sup = req[arg];

    double constant = sup;
    switch (kind) {
        case ClassKind::strict_pseudo:
        case ClassKind::demicontractive:
            cert.constants["k_raw"] = sup;
            constant = std::max(0.0, sup);
            if (kind == ClassKind::demicontractive && sup <= 0.0) {
                cert.notes.push_back("every required k is <= 0: quasi-nonexpansive on the sample");
            }
            break;
        case ClassKind::almost:
            constant = std::max(0.0, sup);
            cert.constants["L"] = params.almost_L;
            break;
        case ClassKind::crr:
            constant = std::max(0.0, sup);
            cert.constants["b"] = params.crr_b;
            cert.threshold = 1.0 - 2.0 * params.crr_b;
            break;
        default:
            break;
    }
    cert.constants[t.constant] = constant;

    const bool member = below_threshold(constant, KindTraits{t.name, t.constant, cert.threshold, t.inclusive, t.threshold_text});
    cert.verdict = member ? Verdict::member_empirical : Verdict::non_member_witnessed;
    if (!member) {
        const auto [lhs, rhs] = sides_from(kind, T, e.xs[arg], e.ys[arg], e.txs[arg], e.tys[arg], cert.threshold, params);
        cert.witness = Witness{e.xs[arg], e.ys[arg], lhs, rhs, sup};
    }
    return cert;
}

}  // namespace

std::string to_string(ClassKind kind) { return traits(kind).name; }

ClassKind parse_class_kind(const std::string& raw) {
    std::string name = raw;
    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return c == '-' ? '_' : std::tolower(c); });
    if (name == "banach") return ClassKind::banach;
    if (name == "kannan") return ClassKind::kannan;
    if (name == "chatterjea") return ClassKind::chatterjea;
    if (name == "zamfirescu") return ClassKind::zamfirescu;
    if (name == "almost") return ClassKind::almost;
    if (name == "ciric" || name == "ciric_quasi" || name == "quasi_contraction") return ClassKind::ciric_quasi;
    if (name == "crr") return ClassKind::crr;
    if (name == "nonexpansive" || name == "ne") return ClassKind::nonexpansive;
    if (name == "quasi_nonexpansive" || name == "qne") return ClassKind::quasi_nonexpansive;
    if (name == "strict_pseudo" || name == "spc") return ClassKind::strict_pseudo;
    if (name == "demicontractive" || name == "dc") return ClassKind::demicontractive;
    throw PreconditionError("unknown class kind '" + raw + "'");
}

bool uses_fixed_points(ClassKind kind) {
    return kind == ClassKind::quasi_nonexpansive || kind == ClassKind::demicontractive;
}

bool needs_inner_product(ClassKind kind) {
    return kind == ClassKind::strict_pseudo || kind == ClassKind::demicontractive;
}

std::string to_string(Verdict v) {
    return v == Verdict::member_empirical ? "member_empirical" : "non_member_witnessed";
}

double Certificate::primary_constant() const {
    switch (kind) {
        case ClassKind::crr: return constants.at("a") + 2.0 * constants.at("b");
        case ClassKind::zamfirescu: return constants.at("violations");
        default: return constants.at(traits(kind).constant);
    }
}

double required_constant(ClassKind kind, const Mapping& T, const Point& x, const Point& y, const ClassParams& params) {
    require_kind_prerequisites(kind, T);
    if (!uses_fixed_points(kind) && x == y) throw PreconditionError("required_constant needs x != y");
    const Point tx = T(x);
    const Point ty = uses_fixed_points(kind) ? y : T(y);
    return required_from(kind, T, x, y, tx, ty, params);
}

std::pair<double, double> inequality_sides(ClassKind kind, const Mapping& T, const Point& x, const Point& y, double constant,
                                           const ClassParams& params) {
    require_kind_prerequisites(kind, T);
    const Point tx = T(x);
    const Point ty = uses_fixed_points(kind) ? y : T(y);
    return sides_from(kind, T, x, y, tx, ty, constant, params);
}

Certificate estimate_class(ClassKind kind, const Mapping& T, const PairSample& pairs, const std::optional<FixedPointSet>& fix,
                           const ClassParams& params) {
    require_kind_prerequisites(kind, T);
    if (kind == ClassKind::zamfirescu) throw PreconditionError("use check_zamfirescu for the zamfirescu class");
    if (pairs.empty()) throw EmptySample("empty pair sample");
    if (uses_fixed_points(kind)) {
        if (!fix || fix->empty()) throw PreconditionError(to_string(kind) + " needs a nonempty fixed-point set");
        std::vector<Point> points;
        points.reserve(2 * pairs.size());
        for (const auto& [x, y] : pairs) {
            points.push_back(x);
            points.push_back(y);
        }
        return certify(kind, T, evaluate_fixed(T, points, *fix), info_of(pairs, 0), params);
    }
    return certify(kind, T, evaluate_pairs(T, pairs), info_of(pairs, 0), params);
}

Certificate estimate_class(ClassKind kind, const Mapping& T, const PointSample& points, const FixedPointSet& fix) {
    if (!uses_fixed_points(kind)) throw PreconditionError(to_string(kind) + " is a two-point condition; pass a pair sample");
    require_kind_prerequisites(kind, T);
    if (fix.empty()) throw PreconditionError(to_string(kind) + " needs a nonempty fixed-point set");
    if (points.points.empty()) throw EmptySample("empty point sample");
    return certify(kind, T, evaluate_fixed(T, points.points, fix), {points.strategy, points.count, points.seed, 0}, {});
}

Certificate check_zamfirescu(const Mapping& T, const ZamfirescuParams& p, const PairSample& pairs) {
    if (!(p.a >= 0.0 && p.a < 1.0) || !(p.b > 0.0 && p.b < 0.5) || !(p.c > 0.0 && p.c < 0.5)) {
        throw PreconditionError("zamfirescu parameters need 0 <= a < 1 and 0 < b, c < 1/2");
    }
    if (pairs.empty()) throw EmptySample("empty pair sample");
    const Evaluated e = evaluate_pairs(T, pairs);
    Certificate cert;
    cert.kind = ClassKind::zamfirescu;
    cert.sample = info_of(pairs, e.xs.size());
    cert.threshold = 0.0;
    cert.threshold_text = traits(ClassKind::zamfirescu).threshold_text;
    cert.constants = {{"a", p.a}, {"b", p.b}, {"c", p.c}};

    std::size_t violations = 0;
    std::optional<std::size_t> worst;
    double worst_margin = -kInf;
    std::array<double, 3> worst_rhs{};
    for (std::size_t i = 0; i < e.xs.size(); ++i) {
        const Displacements d = displacements(T, e.xs[i], e.ys[i], e.txs[i], e.tys[i]);
        const std::array<double, 3> rhs = {p.a * d.xy, p.b * (d.xTx + d.yTy), p.c * (d.xTy + d.yTx)};
        if (holds(d.TxTy, rhs[0]) || holds(d.TxTy, rhs[1]) || holds(d.TxTy, rhs[2])) continue;
        ++violations;
        const double margin = d.TxTy - *std::max_element(rhs.begin(), rhs.end());
        if (margin > worst_margin) {
            worst_margin = margin;
            worst = i;
            worst_rhs = rhs;
        }
    }
    cert.constants["violations"] = static_cast<double>(violations);
    if (worst) {
        cert.verdict = Verdict::non_member_witnessed;
        const std::size_t i = *worst;
        cert.witness = Witness{e.xs[i], e.ys[i], distance(e.txs[i], e.tys[i], T.norm()),
                               *std::max_element(worst_rhs.begin(), worst_rhs.end()), worst_margin};
        cert.notes.push_back("z1 rhs " + format_double(worst_rhs[0]) + ", z2 rhs " + format_double(worst_rhs[1]) +
                             ", z3 rhs " + format_double(worst_rhs[2]));
    }
    return cert;
}

const std::vector<double>& default_L_grid() {
    static const std::vector<double> grid = {0.0, 0.5, 1.0, 1.5, 2.0, 3.0};
    return grid;
}

const std::vector<double>& default_crr_b_grid() {
    static const std::vector<double> grid = [] {
        std::vector<double> g;
        for (int i = 0; i <= 9; ++i) g.push_back(0.05 * i);
        return g;
    }();
    return grid;
}

namespace {

Certificate scan_parameter(ClassKind kind, const Mapping& T, const PairSample& pairs, const std::vector<double>& grid) {
    if (grid.empty()) throw PreconditionError("parameter grid is empty");
    if (pairs.empty()) throw EmptySample("empty pair sample");
    const Evaluated e = evaluate_pairs(T, pairs);
    std::optional<Certificate> best;
    std::vector<ScanEntry> scan;
    for (double param : grid) {
        ClassParams cp;
        if (kind == ClassKind::almost) {
            if (!(param >= 0.0)) throw PreconditionError("L values must be nonnegative");
            cp.almost_L = param;
        } else {
            if (!(param >= 0.0 && param < 0.5)) throw PreconditionError("CRR b values must lie in [0, 1/2)");
            cp.crr_b = param;
        }
        Certificate c = certify(kind, T, e, info_of(pairs, 0), cp);
        scan.push_back({param, kind == ClassKind::almost ? c.constants.at("delta") : c.constants.at("a")});
        if (!best || c.primary_constant() < best->primary_constant()) best = std::move(c);
    }
    best->scan = std::move(scan);
    return *best;
}

}  // namespace

Certificate estimate_almost(const Mapping& T, const PairSample& pairs, const std::vector<double>& L_grid) {
    return scan_parameter(ClassKind::almost, T, pairs, L_grid);
}

Certificate estimate_crr(const Mapping& T, const PairSample& pairs, const std::vector<double>& b_grid) {
    Certificate c = scan_parameter(ClassKind::crr, T, pairs, b_grid);
    c.constants["a+2b"] = c.primary_constant();
    c.threshold = 1.0;
    return c;
}

}  // namespace contractive
