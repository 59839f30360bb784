#include "contractive/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "contractive/classify.hpp"
#include "contractive/enrich.hpp"
#include "contractive/errors.hpp"
#include "contractive/format.hpp"
#include "contractive/iterate.hpp"
#include "contractive/mapdef.hpp"

namespace contractive::cli {

namespace {

constexpr const char* kWallClock = "wall_clock_seconds=";

struct VerbSpec {
    const char* name;
    const char* help;
    std::vector<std::pair<const char*, const char*>> options;
    std::vector<const char*> required;
    std::vector<std::pair<const char*, const char*>> flags;
};

const std::vector<VerbSpec>& verbs() {
    static const std::vector<VerbSpec> v = {
        {"classify",
         "certify one class (or all) on a pair sample",
         {{"--map", "corpus:NAME or spec file"},
          {"--kind", "class name or 'all'"},
          {"--sample", "strategy:count (uniform, grid, near_diagonal, boundary)"},
          {"--seed", "sampling seed"},
          {"--eps-near", "near-diagonal radius"},
          {"--L", "L grid for the almost class (list)"},
          {"--crr-b", "b grid for the CRR class (list)"},
          {"--zam", "zamfirescu a,b,c"},
          {"--out", "report path"}},
         {"--map", "--kind"},
         {}},
        {"scan",
         "enrichment scan of T_lambda over a lambda grid",
         {{"--map", "corpus:NAME or spec file"},
          {"--base", "base class"},
          {"--grid", "default, lo:hi:step, or a comma list"},
          {"--sample", "strategy:count"},
          {"--seed", "sampling seed"},
          {"--eps-near", "near-diagonal radius"},
          {"--out", "report path"}},
         {"--map", "--base"},
         {{"--no-refine", "skip local refinement"}}},
        {"iterate",
         "Krasnoselskij iteration with a-priori bounds",
         {{"--map", "corpus:NAME or spec file"},
          {"--lambda", "averaging weight in (0,1]"},
          {"--x0", "starting point, comma separated"},
          {"--max-iters", "iteration cap"},
          {"--tol", "step-norm tolerance"},
          {"--delta", "bound constant in [0,1)"},
          {"--delta-from", "banach, kannan, chatterjea or almost: certify T_lambda for delta"},
          {"--sample", "strategy:count for --delta-from"},
          {"--seed", "sampling seed"},
          {"--trace-csv", "trace CSV path"},
          {"--bounds-csv", "bound CSV path"},
          {"--out", "report path"}},
         {"--map"},
         {{"--full-bounds", "check every i instead of i <= 10"}}},
        {"saturate",
         "pairwise saturation checks at b = k/(1-k)",
         {{"--map", "corpus:NAME or spec file"},
          {"--k", "k in (0,1), comma list allowed"},
          {"--pairs", "pair or point count"},
          {"--seed", "sampling seed"},
          {"--mode", "spc, demi or both"},
          {"--sample", "pair strategy; any :count suffix is ignored in favour of --pairs"},
          {"--out", "report path"}},
         {"--map", "--k"},
         {}},
        {"corpus",
         "list the built-in maps",
         {{"--out", "report path"}},
         {},
         {}},
        {"report",
         "certificates, profile, saturation and trace in one report",
         {{"--map", "corpus:NAME or spec file"},
          {"--base", "base class for the profile"},
          {"--lambda", "iteration weight"},
          {"--x0", "starting point"},
          {"--k", "saturation k list"},
          {"--sample", "strategy:count"},
          {"--seed", "sampling seed"},
          {"--max-iters", "iteration cap"},
          {"--tol", "step-norm tolerance"},
          {"--out", "report path"}},
         {"--map"},
         {}},
    };
    return v;
}

// ---- value parsing ----

double parse_real(const std::string& text, const std::string& flag) {
    double v = 0.0;
    const char* b = text.data();
    const char* e = b + text.size();
    const auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e || !std::isfinite(v)) {
        throw PreconditionError(flag + ": '" + text + "' is not a finite number");
    }
    return v;
}

std::size_t parse_count(const std::string& text, const std::string& flag) {
    std::size_t v = 0;
    const char* b = text.data();
    const char* e = b + text.size();
    const auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e) throw PreconditionError(flag + ": '" + text + "' is not a nonnegative integer");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
    std::vector<double> v;
    for (const auto& part : split(text, ',')) v.push_back(parse_real(part, flag));
    if (v.empty()) throw PreconditionError(flag + " is empty");
    return v;
}

std::vector<double> parse_grid(const std::string& text) {
    if (text == "default") return default_lambda_grid();
    if (text.find(':') != std::string::npos) {
        const auto parts = split(text, ':');
        if (parts.size() != 3) throw PreconditionError("--grid range must be lo:hi:step");
        const double lo = parse_real(parts[0], "--grid");
        const double hi = parse_real(parts[1], "--grid");
        const double step = parse_real(parts[2], "--grid");
        if (!(step > 0.0) || hi < lo) throw PreconditionError("--grid range needs lo <= hi and step > 0");
        std::vector<double> g;
        const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
        for (std::size_t i = 0; i <= count; ++i) g.push_back(lo + static_cast<double>(i) * step);
        return g;
    }
    return parse_list(text, "--grid");
}

struct SampleArg {
    SampleStrategy strategy = SampleStrategy::uniform;
    std::size_t count = 2000;
};

SampleArg parse_sample(const std::string& text) {
    const auto colon = text.find(':');
    SampleArg s;
    s.strategy = parse_strategy(text.substr(0, colon));
    if (colon != std::string::npos) s.count = parse_count(text.substr(colon + 1), "--sample");
    if (s.count == 0) throw PreconditionError("--sample count must be positive");
    return s;
}

// ---- option access ----

class Options {
public:
    explicit Options(const Command& cmd) : map_(cmd.options) {}

    bool has(const std::string& k) const { return map_.count(k) > 0; }
    std::string str(const std::string& k, const std::string& fallback) const {
        const auto it = map_.find(k);
        return it == map_.end() ? fallback : it->second;
    }
    double real(const std::string& k, double fallback) const {
        return has(k) ? parse_real(map_.at(k), k) : fallback;
    }
    std::size_t count(const std::string& k, std::size_t fallback) const {
        return has(k) ? parse_count(map_.at(k), k) : fallback;
    }
    std::uint64_t seed() const { return has("--seed") ? parse_count(map_.at("--seed"), "--seed") : 0; }

private:
    const std::map<std::string, std::string>& map_;
};

PairSample pairs_for(const Mapping& T, const Options& o, SampleArg fallback) {
    const SampleArg s = o.has("--sample") ? parse_sample(o.str("--sample", "")) : fallback;
    SampleOptions so;
    so.eps_near = o.real("--eps-near", so.eps_near);
    if (s.strategy == SampleStrategy::grid) {
        PairSample p = grid_pairs(T.domain(), s.count);
        p.count = s.count;
        p.seed = o.seed();
        return p;
    }
    return sample_pairs(T.domain(), s.strategy, s.count, o.seed(), so);
}

Point parse_x0(const Mapping& T, const Options& o) {
    if (!o.has("--x0")) return T.domain().center();
    const auto v = parse_list(o.str("--x0", ""), "--x0");
    return make_point(v);
}

// ---- rendering ----

std::string pt(const Point& x) {
    std::string s = "(";
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (i) s += ", ";
        s += format_double(x[i]);
    }
    return s + ")";
}

std::string fd(double v) { return format_double(v); }

void render_constants(std::ostream& os, const Constants& c) {
    bool first = true;
    for (const auto& [k, v] : c) {
        os << (first ? "" : " ") << k << '=' << fd(v);
        first = false;
    }
}

void render_certificate(std::ostream& os, const Certificate& c) {
    os << "kind=" << to_string(c.kind) << " verdict=" << to_string(c.verdict) << " threshold: " << c.threshold_text
       << '\n';
    os << "  constants: ";
    render_constants(os, c.constants);
    os << '\n';
    os << "  sample: " << to_string(c.sample.strategy) << " count=" << c.sample.count << " seed=" << c.sample.seed
       << " evaluated=" << c.sample.evaluated << '\n';
    if (c.witness) {
        const Witness& w = *c.witness;
        os << "  witness: x=" << pt(w.x) << " y=" << pt(w.y) << " lhs=" << fd(w.lhs) << " rhs=" << fd(w.rhs)
           << " required=" << fd(w.required) << '\n';
    }
    if (!c.scan.empty()) {
        const char* p = c.kind == ClassKind::almost ? "L" : "b";
        const char* v = c.kind == ClassKind::almost ? "delta" : "a";
        os << "  scan:";
        for (const auto& e : c.scan) os << ' ' << p << '=' << fd(e.parameter) << ':' << v << '=' << fd(e.constant);
        os << '\n';
    }
    for (const auto& n : c.notes) os << "  note: " << n << '\n';
}

void render_profile(std::ostream& os, const EnrichmentResult& r) {
    os << "base=" << to_string(r.base_kind) << " verdict=" << to_string(r.verdict) << (r.probe ? " probe" : "") << '\n';
    os << "lambda b constant verdict\n";
    for (const auto& e : r.profile) {
        os << fd(e.lambda) << ' ' << fd(b_from_lambda(e.lambda)) << ' ' << fd(e.certificate.primary_constant()) << ' '
           << to_string(e.certificate.verdict) << '\n';
    }
    if (!r.refined.empty()) {
        os << "refined:\n";
        for (const auto& e : r.refined) {
            os << fd(e.lambda) << ' ' << fd(b_from_lambda(e.lambda)) << ' ' << fd(e.certificate.primary_constant())
               << ' ' << to_string(e.certificate.verdict) << '\n';
        }
    }
    if (r.best) {
        os << "best: lambda=" << fd(r.best->lambda) << " b=" << fd(r.best->b) << ' ';
        render_constants(os, r.best->constants);
        os << '\n';
    } else {
        os << "best: none\n";
    }
    for (const auto& n : r.notes) os << "note: " << n << '\n';
}

void render_saturation(std::ostream& os, const SaturationReport& r) {
    os << "kind=" << to_string(r.kind) << " k=" << fd(r.k) << " b=" << fd(r.b) << " agreement=" << fd(r.per_pair_agreement)
       << " pairs=" << r.pairs << " both_hold=" << r.both_hold << " both_fail=" << r.both_fail
       << " disagree=" << r.disagree << " max_identity_residual=" << fd(r.max_identity_residual) << '\n';
}

void render_rows(std::ostream& os, const IterationTrace& t) {
    auto row = [&](const TraceRow& r) {
        os << "  " << r.n << ' ' << pt(r.x) << " step=" << (r.step ? fd(*r.step) : std::string("-"))
           << " residual=" << fd(r.residual) << '\n';
    };
    const std::size_t n = t.rows.size();
    if (n <= 40) {
        for (const auto& r : t.rows) row(r);
        return;
    }
    for (std::size_t i = 0; i < 10; ++i) row(t.rows[i]);
    os << "  ... " << n - 20 << " rows omitted\n";
    for (std::size_t i = n - 10; i < n; ++i) row(t.rows[i]);
}

// ---- runs ----

struct Report {
    std::ostringstream certificates;
    std::ostringstream profile;
    std::ostringstream saturation;
    std::ostringstream trace;
};

std::vector<ClassKind> applicable_kinds(const Mapping& T, bool have_fix) {
    std::vector<ClassKind> kinds = {ClassKind::banach, ClassKind::kannan, ClassKind::chatterjea, ClassKind::almost,
                                    ClassKind::ciric_quasi, ClassKind::crr, ClassKind::nonexpansive};
    if (T.norm().has_inner_product()) kinds.push_back(ClassKind::strict_pseudo);
    if (have_fix) {
        kinds.push_back(ClassKind::quasi_nonexpansive);
        if (T.norm().has_inner_product()) kinds.push_back(ClassKind::demicontractive);
    }
    return kinds;
}

Certificate certify(ClassKind kind, const Mapping& T, const PairSample& pairs, const std::optional<FixedPointSet>& fix,
                    const Options& o) {
    switch (kind) {
        case ClassKind::almost:
            if (o.has("--L")) {
                const auto grid = parse_list(o.str("--L", ""), "--L");
                for (double L : grid) {
                    if (!(L >= 0.0)) throw PreconditionError("--L values must be nonnegative");
                }
                return estimate_almost(T, pairs, grid);
            }
            return estimate_almost(T, pairs);
        case ClassKind::crr:
            if (o.has("--crr-b")) {
                const auto grid = parse_list(o.str("--crr-b", ""), "--crr-b");
                for (double b : grid) {
                    if (!(b >= 0.0 && b < 0.5)) throw PreconditionError("--crr-b values must lie in [0, 1/2)");
                }
                return estimate_crr(T, pairs, grid);
            }
            return estimate_crr(T, pairs);
        case ClassKind::zamfirescu: {
            if (!o.has("--zam")) throw PreconditionError("zamfirescu needs --zam a,b,c");
            const auto v = parse_list(o.str("--zam", ""), "--zam");
            if (v.size() != 3) throw PreconditionError("--zam needs three values a,b,c");
            return check_zamfirescu(T, {v[0], v[1], v[2]}, pairs);
        }
        default:
            return estimate_class(kind, T, pairs, fix);
    }
}

void classify_into(std::ostream& os, const Mapping& T, const std::string& kind_text, const PairSample& pairs,
                   const Options& o) {
    std::optional<FixedPointSet> fix;
    auto need_fix = [&] {
        if (!fix) fix = fixed_points(T);
        return *fix;
    };
    std::vector<ClassKind> kinds;
    if (kind_text == "all") {
        kinds = applicable_kinds(T, !need_fix().empty());
        if (o.has("--zam")) kinds.push_back(ClassKind::zamfirescu);
    } else {
        kinds.push_back(parse_class_kind(kind_text));
    }
    for (ClassKind k : kinds) {
        if (uses_fixed_points(k)) {
            const FixedPointSet& f = need_fix();
            if (f.empty()) throw PreconditionError(to_string(k) + " needs fixed points and none were detected");
            os << "fixed_points:";
            for (const auto& p : f) os << ' ' << pt(p);
            os << '\n';
        }
        render_certificate(os, certify(k, T, pairs, fix, o));
    }
}

void iterate_into(std::ostream& os, const Mapping& T, const Options& o, double lambda_default) {
    IterationConfig cfg;
    cfg.lambda = o.real("--lambda", lambda_default);
    cfg.x0 = parse_x0(T, o);
    cfg.max_iters = o.count("--max-iters", 1000);
    cfg.stop_tol = o.real("--tol", 1e-10);
    const IterationTrace trace = krasnoselskij(T, cfg);
    const FixedPointSet fix = fixed_points(T);
    const ConvergenceReport conv = convergence_report(trace, fix);

    os << "lambda=" << fd(cfg.lambda) << " x0=" << pt(cfg.x0) << " max_iters=" << cfg.max_iters
       << " stop_tol=" << fd(cfg.stop_tol) << '\n';
    os << "terminated_by=" << to_string(trace.terminated_by) << " rows=" << trace.rows.size() << '\n';
    os << "final: x=" << pt(trace.final_point()) << " residual=" << fd(trace.rows.back().residual) << '\n';
    os << "convergence: status=" << to_string(conv.status)
       << " limit=" << (conv.limit ? pt(*conv.limit) : std::string("none"))
       << " terminal_distance=" << fd(conv.terminal_distance) << " observed_ratio=" << fd(conv.observed_ratio) << '\n';
    os << "  note: " << conv.message << '\n';

    std::optional<double> delta;
    if (o.has("--delta")) {
        delta = o.real("--delta", 0.0);
    } else if (o.has("--delta-from")) {
        const ClassKind k = parse_class_kind(o.str("--delta-from", ""));
        const AveragedMapping avg(T, cfg.lambda);
        const PairSample pairs = pairs_for(avg.mapping(), o, SampleArg{});
        const Certificate cert = certify(k, avg.mapping(), pairs, std::nullopt, o);
        os << "delta certificate for T_lambda:\n";
        render_certificate(os, cert);
        if (cert.member()) delta = delta_for(cert);
        else os << "bounds: skipped, certificate is not a member\n";
    }

    std::optional<ErrorBoundReport> bounds;
    if (delta) {
        if (!conv.limit || conv.status != ConvergenceReport::Status::converged) {
            os << "bounds: skipped, no verified limit\n";
        } else {
            BoundOptions bo;
            bo.full_range = o.has("--full-bounds");
            bounds = apriori_bounds(T, trace, *delta, *conv.limit, bo);
            os << "bounds: delta=" << fd(bounds->delta) << " entries=" << bounds->entries.size()
               << " max_violation=" << fd(bounds->max_violation) << " all_ok=" << (bounds->all_ok ? "true" : "false")
               << '\n';
        }
    }
    os << "rows:\n";
    render_rows(os, trace);

    if (o.has("--trace-csv")) {
        std::ofstream f(o.str("--trace-csv", ""), std::ios::binary);
        if (!f) throw PreconditionError("cannot write " + o.str("--trace-csv", ""));
        write_trace_csv(f, trace);
    }
    if (o.has("--bounds-csv")) {
        if (!bounds) throw PreconditionError("--bounds-csv needs --delta or --delta-from and a converged trace");
        std::ofstream f(o.str("--bounds-csv", ""), std::ios::binary);
        if (!f) throw PreconditionError("cannot write " + o.str("--bounds-csv", ""));
        write_bounds_csv(f, *bounds);
    }
}

void saturate_into(std::ostream& os, const Mapping& T, const Options& o, const std::string& k_default) {
    const std::vector<double> ks = parse_list(o.str("--k", k_default), "--k");
    const std::string mode = o.str("--mode", "both");
    if (mode != "spc" && mode != "demi" && mode != "both") throw PreconditionError("--mode must be spc, demi or both");
    if (!T.norm().has_inner_product()) {
        throw UnsupportedStructure("saturation checks need the euclidean norm; refusing under " + T.norm().to_string());
    }
    const std::size_t n = o.count("--pairs", 5000);
    if (n == 0) throw PreconditionError("--pairs must be positive");
    SampleOptions so;
    const SampleStrategy strat = o.has("--sample") ? parse_sample(o.str("--sample", "")).strategy : SampleStrategy::uniform;
    if (mode != "demi") {
        const PairSample pairs = strat == SampleStrategy::grid ? grid_pairs(T.domain(), n)
                                                               : sample_pairs(T.domain(), strat, n, o.seed(), so);
        for (double k : ks) render_saturation(os, spc_saturation_check(T, k, pairs));
    }
    if (mode != "spc") {
        const FixedPointSet fix = fixed_points(T);
        if (fix.empty()) {
            if (mode == "demi") throw PreconditionError("no fixed points detected for the demicontractive check");
            os << "note: no fixed points detected; demicontractive check skipped\n";
            return;
        }
        os << "fixed_points:";
        for (const auto& p : fix) os << ' ' << pt(p);
        os << '\n';
        const PointSample points = sample_points(T.domain(), n, o.seed());
        for (double k : ks) render_saturation(os, demi_saturation_check(T, k, fix, points));
    }
}

void header(std::ostream& os, const Command& cmd) {
    os << "contractive " << kVersion << '\n';
    os << "command:";
    for (const auto& a : cmd.args) os << ' ' << a;
    os << '\n';
}

void map_header(std::ostream& os, const Mapping& T) {
    os << "map: " << T.label() << " dim=" << T.dim() << " domain=" << T.domain().to_string()
       << " norm=" << T.norm().to_string() << '\n';
    if (T.expr()) os << "expr: " << mapdef::print(*T.expr()) << '\n';
    for (const auto& w : T.warnings()) os << "warning: " << w << '\n';
}

std::string build_report(const Command& cmd) {
    const Options o(cmd);
    std::ostringstream os;
    header(os, cmd);
    if (cmd.verb == "corpus") {
        os << "\n[CORPUS]\n";
        for (const auto& e : mapdef::corpus()) {
            os << e.name << ": " << mapdef::print(e.expr) << " on " << e.domain.to_string();
            if (e.ambient) os << " into " << e.ambient->to_string();
            os << " norm=" << e.norm.to_string() << '\n';
            for (const auto& n : e.notes) os << "  " << n << '\n';
        }
        return os.str();
    }

    const Mapping T = load_mapping(cmd.target);
    map_header(os, T);
    os << '\n';
    if (cmd.verb == "classify") {
        os << "[CERTIFICATES]\n";
        classify_into(os, T, o.str("--kind", ""), pairs_for(T, o, SampleArg{}), o);
    } else if (cmd.verb == "scan") {
        os << "[PROFILE]\n";
        ScanOptions so;
        so.refine = !o.has("--no-refine");
        const auto grid = parse_grid(o.str("--grid", "default"));
        render_profile(os, enriched_scan(T, parse_class_kind(o.str("--base", "")), grid, pairs_for(T, o, SampleArg{}), so));
    } else if (cmd.verb == "iterate") {
        os << "[TRACE]\n";
        iterate_into(os, T, o, 1.0);
    } else if (cmd.verb == "saturate") {
        os << "[SATURATION]\n";
        saturate_into(os, T, o, "");
    } else if (cmd.verb == "report") {
        const PairSample pairs = pairs_for(T, o, SampleArg{});
        os << "[CERTIFICATES]\n";
        classify_into(os, T, "all", pairs, o);
        os << "\n[PROFILE]\n";
        render_profile(os, enriched_scan(T, parse_class_kind(o.str("--base", "banach")), default_lambda_grid(), pairs));
        os << "\n[SATURATION]\n";
        if (T.norm().has_inner_product()) {
            saturate_into(os, T, o, "0.5");
        } else {
            os << "note: saturation checks need the euclidean norm; skipped under " << T.norm().to_string() << '\n';
        }
        os << "\n[TRACE]\n";
        iterate_into(os, T, o, 0.5);
    } else {
        throw InternalError("unhandled verb " + cmd.verb);
    }
    return os.str();
}

std::filesystem::path output_path(const Command& cmd) {
    if (const auto it = cmd.options.find("--out"); it != cmd.options.end()) return it->second;
    const char* dir = std::getenv(kOutDirEnv);
    if (!dir || !*dir) return {};
    std::string name = cmd.verb;
    if (!cmd.target.empty()) {
        std::string t = cmd.target;
        if (t.rfind("corpus:", 0) == 0) t = t.substr(7);
        t = std::filesystem::path(t).stem().string();
        name += "_" + t;
    }
    return std::filesystem::path(dir) / (name + ".txt");
}

}  // namespace

Command parse_command(const std::vector<std::string>& args) {
    CLI::App app{"contractive: contractive-class certification, enrichment scans and iteration", "contractive"};
    app.require_subcommand(1);
    std::map<std::string, std::map<std::string, std::string>> values;
    std::map<std::string, std::map<std::string, bool>> flags;
    std::map<std::string, CLI::App*> subs;
    std::string corpus_name;
    for (const VerbSpec& v : verbs()) {
        CLI::App* sub = app.add_subcommand(v.name, v.help);
        subs[v.name] = sub;
        for (const auto& [name, help] : v.options) {
            CLI::Option* opt = sub->add_option(name, values[v.name][name], help);
            if (std::find_if(v.required.begin(), v.required.end(), [&](const char* r) { return std::string(r) == name; }) !=
                v.required.end()) {
                opt->required();
            }
        }
        for (const auto& [name, help] : v.flags) sub->add_flag(name, flags[v.name][name], help);
    }
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        for (const auto& [name, sub] : subs) {
            if (sub->parsed()) throw HelpRequested{sub->help()};
        }
        throw HelpRequested{app.help()};
    } catch (const CLI::ParseError& e) {
        throw PreconditionError(e.what());
    }

    Command cmd;
    cmd.args = args;
    for (const auto& [name, sub] : subs) {
        if (!sub->parsed()) continue;
        cmd.verb = name;
        for (const auto& [opt, value] : values[name]) {
            if (sub->get_option(opt)->count() > 0) cmd.options[opt] = value;
        }
        for (const auto& [flag, set] : flags[name]) {
            if (set) cmd.options[flag] = "true";
        }
    }
    if (const auto it = cmd.options.find("--map"); it != cmd.options.end()) cmd.target = it->second;
    return cmd;
}

Mapping load_mapping(const std::string& target) {
    if (target.rfind("corpus:", 0) == 0) return Mapping::from_corpus(target.substr(7));
    return Mapping::from_spec(mapdef::load_map_spec(target));
}

std::string report_body(const std::string& report) {
    std::istringstream in(report);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind(kWallClock, 0) == 0) continue;
        out << line << '\n';
    }
    return out.str();
}

RunResult execute(const Command& cmd, std::ostream& out, std::ostream& err) {
    RunResult result;
    const auto start = std::chrono::steady_clock::now();
    try {
        std::string body = build_report(cmd);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::ostringstream wall;
        wall << '\n' << kWallClock << secs << '\n';
        result.report = body + wall.str();
        const auto path = output_path(cmd);
        if (!path.empty()) {
            if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
            std::ofstream f(path, std::ios::binary);
            if (!f) throw PreconditionError("cannot write report to " + path.string());
            f << result.report;
            if (!f) throw PreconditionError("failed writing report to " + path.string());
        }
        out << result.report;
        result.exit_code = 0;
    } catch (const InternalError& e) {
        err << "internal error: " << e.what() << '\n';
        result.exit_code = 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        result.exit_code = 1;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        result.exit_code = 1;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        result.exit_code = 2;
    }
    return result;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Command cmd;
    try {
        cmd = parse_command(args);
    } catch (const HelpRequested& h) {
        out << h.text;
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return execute(cmd, out, err).exit_code;
}

}  // namespace contractive::cli
