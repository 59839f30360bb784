#include "contractive/mapdef.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "contractive/format.hpp"

namespace contractive::mapdef {

bool operator==(const Node& a, const Node& b) {
    if (a.kind != b.kind || a.children.size() != b.children.size()) return false;
    switch (a.kind) {
        case NodeKind::number:
            if (a.value != b.value) return false;
            break;
        case NodeKind::variable:
            if (a.variable != b.variable) return false;
            break;
        case NodeKind::call:
            if (a.function != b.function) return false;
            break;
        default:
            break;
    }
    for (std::size_t i = 0; i < a.children.size(); ++i) {
        if (!(a.children[i] == b.children[i])) return false;
    }
    return true;
}

Node number(double v) {
    Node n;
    n.kind = NodeKind::number;
    n.value = v;
    return n;
}

Node pi() {
    Node n;
    n.kind = NodeKind::pi;
    return n;
}

Node variable(int index) {
    Node n;
    n.kind = NodeKind::variable;
    n.variable = index;
    return n;
}

Node negate(Node operand) {
    Node n;
    n.kind = NodeKind::negate;
    n.children.push_back(std::move(operand));
    return n;
}

Node binary(NodeKind op, Node lhs, Node rhs) {
    Node n;
    n.kind = op;
    n.children.push_back(std::move(lhs));
    n.children.push_back(std::move(rhs));
    return n;
}

Node call(Function f, std::vector<Node> args) {
    Node n;
    n.kind = NodeKind::call;
    n.function = f;
    n.children = std::move(args);
    return n;
}

std::size_t arity(Function f) {
    return (f == Function::min || f == Function::max) ? 2 : 1;
}

std::string_view function_name(Function f) {
    switch (f) {
        case Function::sin: return "sin";
        case Function::cos: return "cos";
        case Function::abs: return "abs";
        case Function::min: return "min";
        case Function::max: return "max";
    }
    return "?";
}

bool Interval::contains(double v) const {
    const bool above = lower_closed ? v >= lower : v > lower;
    const bool below = upper_closed ? v <= upper : v < upper;
    return above && below;
}

bool Guard::contains(const Point& x) const {
    if (kind == Kind::everywhere) return true;
    if (static_cast<std::size_t>(x.size()) != axes.size()) return false;
    for (std::size_t i = 0; i < axes.size(); ++i) {
        if (!axes[i].contains(x[static_cast<Eigen::Index>(i)])) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

double checked(double v, const char* what) {
    if (!std::isfinite(v)) throw EvalError(std::string("non-finite result in ") + what);
    return v;
}

}  // namespace

double eval(const Node& node, const Point& x) {
    const auto child = [&](std::size_t i) { return eval(node.children[i], x); };
    switch (node.kind) {
        case NodeKind::number: return node.value;
        case NodeKind::pi: return std::numbers::pi;
        case NodeKind::variable:
            if (node.variable < 0 || node.variable >= x.size()) {
                throw DimensionMismatch("variable x" + std::to_string(node.variable + 1) + " outside a " +
                                        std::to_string(x.size()) + "-dimensional point");
            }
            return x[node.variable];
        case NodeKind::negate: return -child(0);
        case NodeKind::add: return checked(child(0) + child(1), "addition");
        case NodeKind::subtract: return checked(child(0) - child(1), "subtraction");
        case NodeKind::multiply: return checked(child(0) * child(1), "multiplication");
        case NodeKind::divide: {
            const double num = child(0);
            const double den = child(1);
            if (den == 0.0) throw EvalError("division by zero");
            return checked(num / den, "division");
        }
        case NodeKind::power: return checked(std::pow(child(0), child(1)), "power");
        case NodeKind::call:
            switch (node.function) {
                case Function::sin: return checked(std::sin(child(0)), "sin");
                case Function::cos: return checked(std::cos(child(0)), "cos");
                case Function::abs: return std::abs(child(0));
                case Function::min: return std::min(child(0), child(1));
                case Function::max: return std::max(child(0), child(1));
            }
    }
    throw InternalError("unhandled AST node");
}

MapExpr::MapExpr(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw PreconditionError("mapping needs at least one piece");
    dim_ = pieces_.front().body.size();
    for (const Piece& p : pieces_) {
        if (p.body.size() != dim_) throw DimensionMismatch("pieces disagree on output dimension");
    }
}

std::size_t MapExpr::matching_pieces(const Point& x) const {
    return static_cast<std::size_t>(
        std::count_if(pieces_.begin(), pieces_.end(), [&](const Piece& p) { return p.guard.contains(x); }));
}

Point MapExpr::eval(const Point& x) const {
    if (static_cast<std::size_t>(x.size()) != dim_) {
        throw DimensionMismatch("point of dimension " + std::to_string(x.size()) + " passed to a " +
                                std::to_string(dim_) + "-dimensional map");
    }
    for (const Piece& p : pieces_) {
        if (!p.guard.contains(x)) continue;
        Point y(static_cast<Eigen::Index>(dim_));
        for (std::size_t i = 0; i < dim_; ++i) y[static_cast<Eigen::Index>(i)] = mapdef::eval(p.body[i], x);
        return y;
    }
    std::ostringstream os;
    os << "no piece covers point (";
    for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << format_double(x[i]);
    os << ')';
    throw EvalError(os.str());
}

Point eval(const MapExpr& expr, const Point& x) { return expr.eval(x); }

// ---------------------------------------------------------------------------
// Guard partition checks

namespace {

struct Cell {
    double rep;
    double lo;
    double hi;
};

// Atoms of the real line cut at the given endpoints: each endpoint and each open gap between.
std::vector<Cell> axis_cells(std::vector<double> cuts) {
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<Cell> cells;
    if (cuts.empty()) {
        cells.push_back({0.0, -inf, inf});
        return cells;
    }
    cells.push_back({cuts.front() - 1.0, -inf, cuts.front()});
    for (std::size_t i = 0; i < cuts.size(); ++i) {
        cells.push_back({cuts[i], cuts[i], cuts[i]});
        if (i + 1 < cuts.size()) cells.push_back({cuts[i] + (cuts[i + 1] - cuts[i]) / 2.0, cuts[i], cuts[i + 1]});
    }
    cells.push_back({cuts.back() + 1.0, cuts.back(), inf});
    return cells;
}

enum class CoverageScope { interior_hull, domain };

void check_partition(const std::vector<Piece>& pieces, std::size_t dim, const Domain* domain) {
    std::vector<std::vector<double>> cuts(dim);
    for (const Piece& p : pieces) {
        if (p.guard.kind == Guard::Kind::everywhere) continue;
        if (p.guard.axes.size() != dim) {
            throw ParseError("guard has " + std::to_string(p.guard.axes.size()) + " axes but the map has dimension " +
                                 std::to_string(dim),
                             p.line, p.column);
        }
        for (std::size_t a = 0; a < dim; ++a) {
            cuts[a].push_back(p.guard.axes[a].lower);
            cuts[a].push_back(p.guard.axes[a].upper);
        }
    }
    if (domain != nullptr) {
        for (std::size_t a = 0; a < dim; ++a) {
            cuts[a].push_back(domain->lower()[static_cast<Eigen::Index>(a)]);
            cuts[a].push_back(domain->upper()[static_cast<Eigen::Index>(a)]);
        }
    }
    std::vector<double> hull_lo(dim), hull_hi(dim);
    for (std::size_t a = 0; a < dim; ++a) {
        if (cuts[a].empty()) {
            hull_lo[a] = -std::numeric_limits<double>::infinity();
            hull_hi[a] = std::numeric_limits<double>::infinity();
        } else {
            hull_lo[a] = *std::min_element(cuts[a].begin(), cuts[a].end());
            hull_hi[a] = *std::max_element(cuts[a].begin(), cuts[a].end());
        }
    }

    std::vector<std::vector<Cell>> cells(dim);
    for (std::size_t a = 0; a < dim; ++a) cells[a] = axis_cells(cuts[a]);

    std::vector<std::size_t> idx(dim, 0);
    Point rep(static_cast<Eigen::Index>(dim));
    Point nearest(static_cast<Eigen::Index>(dim));
    while (true) {
        bool in_scope = true;
        for (std::size_t a = 0; a < dim; ++a) {
            const Cell& c = cells[a][idx[a]];
            const auto ai = static_cast<Eigen::Index>(a);
            rep[ai] = c.rep;
            if (domain == nullptr) {
                in_scope = in_scope && c.rep > hull_lo[a] && c.rep < hull_hi[a];
            } else if (domain->shape() == Domain::Shape::ball) {
                nearest[ai] = std::clamp(domain->center()[ai], c.lo, c.hi);
            }
        }
        if (domain != nullptr) {
            if (domain->shape() == Domain::Shape::box) {
                in_scope = domain->contains(rep);
            } else {
                in_scope = (nearest - domain->center()).norm() < domain->radius() * (1.0 - 1e-12);
            }
        }

        std::size_t first = pieces.size();
        std::size_t hits = 0;
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            if (!pieces[i].guard.contains(rep)) continue;
            if (++hits == 1) {
                first = i;
            } else {
                throw ParseError("guards of pieces " + std::to_string(first + 1) + " and " + std::to_string(i + 1) +
                                     " overlap",
                                 pieces[i].line, pieces[i].column);
            }
        }
        if (in_scope && hits == 0) {
            std::ostringstream os;
            os << "guards do not cover point (";
            for (std::size_t a = 0; a < dim; ++a) os << (a ? ", " : "") << format_double(rep[static_cast<Eigen::Index>(a)]);
            os << ')';
            if (domain != nullptr) os << " of domain " << domain->to_string();
            throw ParseError(os.str(), pieces.front().line, pieces.front().column);
        }

        std::size_t a = dim;
        bool done = true;
        while (a > 0) {
            --a;
            if (++idx[a] < cells[a].size()) {
                done = false;
                break;
            }
            idx[a] = 0;
        }
        if (done) return;
    }
}

}  // namespace

void MapExpr::validate_coverage(const Domain& domain) const {
    if (domain.dim() != dim_) {
        throw DimensionMismatch("domain dimension " + std::to_string(domain.dim()) + " does not match map dimension " +
                                std::to_string(dim_));
    }
    check_partition(pieces_, dim_, &domain);
}

// ---------------------------------------------------------------------------
// Lexer and parser

namespace {

enum class Tok { number, ident, plus, minus, star, slash, caret, lparen, rparen, lbracket, rbracket, comma, semicolon, equals, arrow, separator, end };

struct Token {
    Tok kind;
    std::string text;
    double value = 0.0;
    std::size_t line;
    std::size_t column;
};

std::string describe(const Token& t) {
    switch (t.kind) {
        case Tok::end: return "end of input";
        case Tok::separator: return "end of line";
        default: return "'" + t.text + "'";
    }
}

std::vector<Token> tokenize(const std::vector<SourceLine>& lines) {
    std::vector<Token> out;
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const SourceLine& src = lines[li];
        const std::string& s = src.text;
        std::size_t i = 0;
        const auto col = [&](std::size_t pos) { return src.column_offset + pos + 1; };
        while (i < s.size()) {
            const char c = s[i];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++i;
                continue;
            }
            if (c == '#') break;
            Token t{Tok::end, std::string(1, c), 0.0, src.line, col(i)};
            if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
                std::size_t j = i;
                while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.')) ++j;
                if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
                    std::size_t k = j + 1;
                    if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
                    if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
                        j = k;
                        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
                    }
                }
                t.kind = Tok::number;
                t.text = s.substr(i, j - i);
                char* endp = nullptr;
                t.value = std::strtod(t.text.c_str(), &endp);
                if (endp != t.text.c_str() + t.text.size() || !std::isfinite(t.value)) {
                    throw ParseError("malformed number '" + t.text + "'", src.line, col(i));
                }
                out.push_back(t);
                i = j;
                continue;
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t j = i;
                while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
                t.kind = Tok::ident;
                t.text = s.substr(i, j - i);
                out.push_back(t);
                i = j;
                continue;
            }
            switch (c) {
                case '+': t.kind = Tok::plus; break;
                case '-':
                    if (i + 1 < s.size() && s[i + 1] == '>') {
                        t.kind = Tok::arrow;
                        t.text = "->";
                        ++i;
                    } else {
                        t.kind = Tok::minus;
                    }
                    break;
                case '*': t.kind = Tok::star; break;
                case '/': t.kind = Tok::slash; break;
                case '^': t.kind = Tok::caret; break;
                case '(': t.kind = Tok::lparen; break;
                case ')': t.kind = Tok::rparen; break;
                case '[': t.kind = Tok::lbracket; break;
                case ']': t.kind = Tok::rbracket; break;
                case ',': t.kind = Tok::comma; break;
                case ';': t.kind = Tok::semicolon; break;
                case '=': t.kind = Tok::equals; break;
                default: throw ParseError("unexpected character '" + std::string(1, c) + "'", src.line, col(i));
            }
            out.push_back(t);
            ++i;
        }
        const std::size_t end_col = src.column_offset + s.size() + 1;
        out.push_back(Token{li + 1 < lines.size() ? Tok::separator : Tok::end, "", 0.0, src.line, end_col});
    }
    if (out.empty()) out.push_back(Token{Tok::end, "", 0.0, 1, 1});
    return out;
}

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    MapExpr parse_program() {
        std::vector<Piece> pieces;
        bool saw_bare = false;
        while (true) {
            skip_separators();
            if (peek().kind == Tok::end) break;
            const Token& start = peek();
            Piece p;
            p.line = start.line;
            p.column = start.column;
            if (start.kind == Tok::ident && start.text == "piece") {
                advance();
                p.guard = parse_guard();
                expect(Tok::arrow, "'->'");
            } else {
                saw_bare = true;
            }
            p.body = parse_body();
            pieces.push_back(std::move(p));
            if (peek().kind != Tok::end && peek().kind != Tok::separator && peek().kind != Tok::semicolon) {
                fail("unexpected " + describe(peek()));
            }
        }
        if (pieces.empty()) fail("empty mapping definition");
        if (saw_bare && pieces.size() > 1) {
            throw ParseError("a bare expression cannot be combined with other pieces", pieces[1].line, pieces[1].column);
        }
        const std::size_t dim = pieces.front().body.size();
        for (const Piece& p : pieces) {
            if (p.body.size() != dim) {
                throw ParseError("piece has " + std::to_string(p.body.size()) + " components, expected " +
                                     std::to_string(dim),
                                 p.line, p.column);
            }
            for (const Node& n : p.body) check_variables(n, dim, p);
            if (p.guard.kind == Guard::Kind::box || p.guard.kind == Guard::Kind::point) {
                if (p.guard.axes.size() != dim) {
                    throw ParseError("guard dimension " + std::to_string(p.guard.axes.size()) +
                                         " does not match map dimension " + std::to_string(dim),
                                     p.line, p.column);
                }
            }
        }
        check_partition(pieces, dim, nullptr);
        return MapExpr(std::move(pieces));
    }

    Domain parse_domain_literal() {
        skip_separators();
        Domain d = parse_domain_inner();
        skip_separators();
        if (peek().kind != Tok::end) fail("unexpected " + describe(peek()) + " after domain");
        return d;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& advance() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool accept(Tok k) {
        if (peek().kind != k) return false;
        advance();
        return true;
    }
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().line, peek().column); }
    void expect(Tok k, const char* what) {
        if (!accept(k)) fail(std::string("expected ") + what + ", found " + describe(peek()));
    }
    void skip_separators() {
        while (peek().kind == Tok::separator || peek().kind == Tok::semicolon) advance();
    }

    void check_variables(const Node& n, std::size_t dim, const Piece& p) const {
        if (n.kind == NodeKind::variable && static_cast<std::size_t>(n.variable) >= dim) {
            throw ParseError("variable x" + std::to_string(n.variable + 1) + " exceeds map dimension " +
                                 std::to_string(dim),
                             p.line, p.column);
        }
        for (const Node& c : n.children) check_variables(c, dim, p);
    }

    std::vector<Node> parse_body() {
        std::vector<Node> body;
        body.push_back(parse_expr());
        while (accept(Tok::comma)) body.push_back(parse_expr());
        return body;
    }

    Node parse_expr() {
        Node lhs = parse_term();
        while (peek().kind == Tok::plus || peek().kind == Tok::minus) {
            const NodeKind op = advance().kind == Tok::plus ? NodeKind::add : NodeKind::subtract;
            lhs = binary(op, std::move(lhs), parse_term());
        }
        return lhs;
    }

    Node parse_term() {
        Node lhs = parse_unary();
        while (peek().kind == Tok::star || peek().kind == Tok::slash) {
            const NodeKind op = advance().kind == Tok::star ? NodeKind::multiply : NodeKind::divide;
            lhs = binary(op, std::move(lhs), parse_unary());
        }
        return lhs;
    }

    Node parse_unary() {
        if (accept(Tok::minus)) return negate(parse_unary());
        return parse_power();
    }

    Node parse_power() {
        Node base = parse_primary();
        if (accept(Tok::caret)) return binary(NodeKind::power, std::move(base), parse_unary());
        return base;
    }

    Node parse_primary() {
        const Token t = peek();
        switch (t.kind) {
            case Tok::number:
                advance();
                return number(t.value);
            case Tok::lparen: {
                advance();
                Node inner = parse_expr();
                expect(Tok::rparen, "')'");
                return inner;
            }
            case Tok::ident: {
                advance();
                if (t.text == "pi") return pi();
                if (t.text == "x") return variable(0);
                if (t.text.size() > 1 && t.text[0] == 'x' &&
                    std::all_of(t.text.begin() + 1, t.text.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
                    const int idx = std::atoi(t.text.c_str() + 1);
                    if (idx < 1) throw ParseError("variables are numbered from x1", t.line, t.column);
                    return variable(idx - 1);
                }
                for (Function f : {Function::sin, Function::cos, Function::abs, Function::min, Function::max}) {
                    if (t.text != function_name(f)) continue;
                    expect(Tok::lparen, "'(' after function name");
                    std::vector<Node> args;
                    args.push_back(parse_expr());
                    while (accept(Tok::comma)) args.push_back(parse_expr());
                    if (args.size() != arity(f)) {
                        throw ParseError(std::string(function_name(f)) + " takes " + std::to_string(arity(f)) +
                                             " argument(s), got " + std::to_string(args.size()),
                                         t.line, t.column);
                    }
                    expect(Tok::rparen, "')'");
                    return call(f, std::move(args));
                }
                throw ParseError("unknown identifier '" + t.text + "'", t.line, t.column);
            }
            default:
                fail("unexpected " + describe(t));
        }
    }

    double parse_constant() {
        const Token start = peek();
        const Node n = parse_expr();
        try {
            return mapdef::eval(n, Point());
        } catch (const DimensionMismatch&) {
            throw ParseError("guard and domain endpoints must be constant expressions", start.line, start.column);
        } catch (const EvalError& e) {
            throw ParseError(e.what(), start.line, start.column);
        }
    }

    Interval parse_interval() {
        Interval iv;
        if (accept(Tok::lbracket)) {
            iv.lower_closed = true;
        } else if (accept(Tok::lparen)) {
            iv.lower_closed = false;
        } else {
            fail("expected '[' or '(' to open an interval, found " + describe(peek()));
        }
        iv.lower = parse_constant();
        expect(Tok::comma, "','");
        iv.upper = parse_constant();
        if (accept(Tok::rbracket)) {
            iv.upper_closed = true;
        } else if (accept(Tok::rparen)) {
            iv.upper_closed = false;
        } else {
            fail("expected ']' or ')' to close an interval, found " + describe(peek()));
        }
        if (iv.lower > iv.upper) fail("interval lower endpoint exceeds upper endpoint");
        return iv;
    }

    Guard parse_guard() {
        Guard g;
        if (peek().kind == Tok::ident && (peek().text == "x" || peek().text == "x1")) {
            advance();
            expect(Tok::equals, "'='");
            g.kind = Guard::Kind::point;
            std::vector<double> coords;
            if (accept(Tok::lparen)) {
                coords.push_back(parse_constant());
                while (accept(Tok::comma)) coords.push_back(parse_constant());
                expect(Tok::rparen, "')'");
            } else {
                coords.push_back(parse_constant());
            }
            for (double c : coords) g.axes.push_back(Interval{c, c, true, true});
            return g;
        }
        g.kind = Guard::Kind::box;
        g.axes.push_back(parse_interval());
        while (accept(Tok::star)) g.axes.push_back(parse_interval());
        return g;
    }

    Domain parse_domain_inner() {
        if (peek().kind == Tok::ident && peek().text == "ball") {
            advance();
            expect(Tok::lparen, "'('");
            std::vector<double> center{parse_constant()};
            while (accept(Tok::comma)) center.push_back(parse_constant());
            expect(Tok::semicolon, "';' before radius");
            const Token rtok = peek();
            const double r = parse_constant();
            expect(Tok::rparen, "')'");
            if (!(r > 0.0)) throw ParseError("ball radius must be positive", rtok.line, rtok.column);
            return Domain::ball(make_point(center), r);
        }
        std::vector<double> lo;
        std::vector<double> hi;
        do {
            const Token start = peek();
            const Interval iv = parse_interval();
            if (!iv.lower_closed || !iv.upper_closed) {
                throw ParseError("domain intervals must be closed", start.line, start.column);
            }
            lo.push_back(iv.lower);
            hi.push_back(iv.upper);
        } while (accept(Tok::star));
        return Domain::box(make_point(lo), make_point(hi));
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

std::vector<SourceLine> split_lines(std::string_view text) {
    std::vector<SourceLine> lines;
    std::size_t line = 1;
    std::size_t start = 0;
    while (true) {
        const std::size_t nl = text.find('\n', start);
        std::string_view piece = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
        if (!piece.empty() && piece.back() == '\r') piece.remove_suffix(1);
        lines.push_back(SourceLine{std::string(piece), line, 0});
        if (nl == std::string_view::npos) break;
        start = nl + 1;
        ++line;
    }
    return lines;
}

}  // namespace

MapExpr parse(const std::vector<SourceLine>& lines) {
    if (lines.empty()) throw ParseError("empty mapping definition", 1, 1);
    return Parser(tokenize(lines)).parse_program();
}

MapExpr parse(std::string_view text) {
    if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) throw ParseError("empty mapping definition", 1, 1);
    return parse(split_lines(text));
}

Domain parse_domain(std::string_view text) {
    return Parser(tokenize({SourceLine{std::string(text), 1, 0}})).parse_domain_literal();
}

NormSpec parse_norm(std::string_view text) {
    std::string s(text);
    s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }), s.end());
    if (s == "euclidean" || s == "l2") return NormSpec::euclidean();
    if (s == "max" || s == "inf") return NormSpec::max_norm();
    if (s.rfind("p:", 0) == 0) {
        char* endp = nullptr;
        const double p = std::strtod(s.c_str() + 2, &endp);
        if (endp == s.c_str() + 2 || *endp != '\0') throw PreconditionError("malformed p-norm '" + s + "'");
        return NormSpec::p_norm(p);
    }
    throw PreconditionError("unknown norm '" + s + "' (expected euclidean, p:<real> or max)");
}

// ---------------------------------------------------------------------------
// Printing

namespace {

int precedence(const Node& n) {
    switch (n.kind) {
        case NodeKind::add:
        case NodeKind::subtract: return 1;
        case NodeKind::multiply:
        case NodeKind::divide: return 2;
        case NodeKind::negate: return 3;
        case NodeKind::power: return 4;
        default: return 5;
    }
}

void print_node(std::ostream& os, const Node& n, std::size_t dim, int min_prec) {
    const bool paren = precedence(n) < min_prec;
    if (paren) os << '(';
    switch (n.kind) {
        case NodeKind::number: os << format_double(n.value); break;
        case NodeKind::pi: os << "pi"; break;
        case NodeKind::variable:
            if (dim == 1 && n.variable == 0) {
                os << 'x';
            } else {
                os << 'x' << (n.variable + 1);
            }
            break;
        case NodeKind::negate:
            os << '-';
            print_node(os, n.children[0], dim, 3);
            break;
        case NodeKind::add:
        case NodeKind::subtract:
            print_node(os, n.children[0], dim, 1);
            os << (n.kind == NodeKind::add ? " + " : " - ");
            print_node(os, n.children[1], dim, 2);
            break;
        case NodeKind::multiply:
        case NodeKind::divide:
            print_node(os, n.children[0], dim, 2);
            os << (n.kind == NodeKind::multiply ? " * " : " / ");
            print_node(os, n.children[1], dim, 3);
            break;
        case NodeKind::power:
            print_node(os, n.children[0], dim, 5);
            os << '^';
            print_node(os, n.children[1], dim, 3);
            break;
        case NodeKind::call:
            os << function_name(n.function) << '(';
            for (std::size_t i = 0; i < n.children.size(); ++i) {
                if (i) os << ", ";
                print_node(os, n.children[i], dim, 1);
            }
            os << ')';
            break;
    }
    if (paren) os << ')';
}

void print_guard(std::ostream& os, const Guard& g) {
    if (g.kind == Guard::Kind::point) {
        os << "x = ";
        if (g.axes.size() == 1) {
            os << format_double(g.axes[0].lower);
        } else {
            os << '(';
            for (std::size_t i = 0; i < g.axes.size(); ++i) os << (i ? ", " : "") << format_double(g.axes[i].lower);
            os << ')';
        }
        return;
    }
    for (std::size_t i = 0; i < g.axes.size(); ++i) {
        const Interval& iv = g.axes[i];
        if (i) os << " * ";
        os << (iv.lower_closed ? '[' : '(') << format_double(iv.lower) << ", " << format_double(iv.upper)
           << (iv.upper_closed ? ']' : ')');
    }
}

}  // namespace

std::string print(const Node& node, std::size_t dim) {
    std::ostringstream os;
    print_node(os, node, dim, 1);
    return os.str();
}

std::string print(const MapExpr& expr) {
    std::ostringstream os;
    const auto body = [&](const Piece& p) {
        for (std::size_t i = 0; i < p.body.size(); ++i) {
            if (i) os << ", ";
            print_node(os, p.body[i], expr.dim(), 1);
        }
    };
    if (!expr.is_piecewise()) {
        body(expr.pieces().front());
        return os.str();
    }
    for (std::size_t i = 0; i < expr.pieces().size(); ++i) {
        const Piece& p = expr.pieces()[i];
        if (i) os << " ; ";
        os << "piece ";
        print_guard(os, p.guard);
        os << " -> ";
        body(p);
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Spec files

MapSpec parse_map_spec(std::string_view text) {
    MapSpec spec;
    spec.source = std::string(text);
    std::vector<SourceLine> expr_lines;
    bool have_expr = false;
    bool have_pieces = false;
    bool have_domain = false;
    std::optional<std::size_t> declared_dim;
    std::size_t domain_line = 1;

    const std::vector<SourceLine> lines = split_lines(text);
    for (const SourceLine& l : lines) {
        const std::size_t first = l.text.find_first_not_of(" \t");
        if (first == std::string::npos || l.text[first] == '#') continue;
        const std::string_view body = std::string_view(l.text).substr(first);
        if (body.rfind("piece", 0) == 0 && (body.size() == 5 || !std::isalnum(static_cast<unsigned char>(body[5])))) {
            have_pieces = true;
            expr_lines.push_back(SourceLine{std::string(body), l.line, first});
            continue;
        }
        const std::size_t eq = body.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected key=value", l.line, first + 1);
        std::string key(body.substr(0, eq));
        key.erase(key.find_last_not_of(" \t") + 1);
        const std::size_t voff = first + eq + 1;
        const std::string value(body.substr(eq + 1));
        const auto rethrow_at = [&](const Error& e) -> ParseError { return ParseError(e.what(), l.line, voff + 1); };
        try {
            if (key == "name") {
                const std::size_t a = value.find_first_not_of(" \t");
                const std::size_t b = value.find_last_not_of(" \t");
                if (a == std::string::npos) throw ParseError("empty name", l.line, voff + 1);
                spec.name = value.substr(a, b - a + 1);
            } else if (key == "dim") {
                char* endp = nullptr;
                const long n = std::strtol(value.c_str(), &endp, 10);
                if (endp == value.c_str() || n < 1 || std::string_view(endp).find_first_not_of(" \t") != std::string_view::npos) {
                    throw ParseError("dim must be a positive integer", l.line, voff + 1);
                }
                declared_dim = static_cast<std::size_t>(n);
            } else if (key == "domain" || key == "ambient") {
                Domain d = Parser(tokenize({SourceLine{value, l.line, voff}})).parse_domain_literal();
                if (key == "domain") {
                    spec.domain = std::move(d);
                    have_domain = true;
                    domain_line = l.line;
                } else {
                    spec.ambient = std::move(d);
                }
            } else if (key == "norm") {
                spec.norm = parse_norm(value);
            } else if (key == "expr") {
                if (have_expr) throw ParseError("duplicate expr line", l.line, first + 1);
                have_expr = true;
                expr_lines.push_back(SourceLine{value, l.line, voff});
            } else {
                throw ParseError("unknown key '" + key + "'", l.line, first + 1);
            }
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw rethrow_at(e);
        }
    }
    if (have_expr && have_pieces) throw ParseError("use either one expr line or piece lines, not both", expr_lines.back().line, 1);
    if (!have_expr && !have_pieces) throw ParseError("missing expr or piece lines", lines.size(), 1);
    if (!have_domain) throw ParseError("missing domain line", lines.size(), 1);

    spec.expr = parse(expr_lines);
    spec.dim = declared_dim.value_or(spec.expr.dim());
    if (spec.dim != spec.expr.dim()) {
        throw ParseError("dim=" + std::to_string(spec.dim) + " but the expression has " +
                             std::to_string(spec.expr.dim()) + " components",
                         expr_lines.front().line, expr_lines.front().column_offset + 1);
    }
    if (spec.domain.dim() != spec.dim) {
        throw ParseError("domain dimension " + std::to_string(spec.domain.dim()) + " does not match dim=" +
                             std::to_string(spec.dim),
                         domain_line, 1);
    }
    if (spec.ambient && spec.ambient->dim() != spec.dim) throw ParseError("ambient dimension does not match dim", domain_line, 1);
    spec.expr.validate_coverage(spec.domain);
    return spec;
}

MapSpec load_map_spec(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PreconditionError("cannot open mapping spec '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_map_spec(buf.str());
}

}  // namespace contractive::mapdef
