#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "contractive/space.hpp"

namespace contractive::mapdef {

enum class NodeKind { number, pi, variable, negate, add, subtract, multiply, divide, power, call };
enum class Function { sin, cos, abs, min, max };

/// Arithmetic AST node. Value type; children are owned.
struct Node {
    NodeKind kind = NodeKind::number;
    double value = 0.0;      // number
    int variable = 0;        // variable, zero-based (x1 -> 0)
    Function function = Function::sin;
    std::vector<Node> children;

    friend bool operator==(const Node& a, const Node& b);
};

Node number(double v);
Node pi();
Node variable(int index);
Node negate(Node operand);
Node binary(NodeKind op, Node lhs, Node rhs);
Node call(Function f, std::vector<Node> args);

std::size_t arity(Function f);
std::string_view function_name(Function f);

struct Interval {
    double lower = 0.0;
    double upper = 0.0;
    bool lower_closed = true;
    bool upper_closed = true;

    bool contains(double v) const;
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Region selecting a piece: the whole space, a product of intervals, or a single point.
struct Guard {
    enum class Kind { everywhere, box, point };
    Kind kind = Kind::everywhere;
    std::vector<Interval> axes;

    bool contains(const Point& x) const;
    friend bool operator==(const Guard&, const Guard&) = default;
};

struct Piece {
    Guard guard;
    std::vector<Node> body;  // one expression per output coordinate
    std::size_t line = 1;
    std::size_t column = 1;

    friend bool operator==(const Piece& a, const Piece& b) { return a.guard == b.guard && a.body == b.body; }
};

/// Piecewise map R^n -> R^n. Guards are pairwise disjoint and leave no interior gaps.
class MapExpr {
public:
    MapExpr() = default;
    explicit MapExpr(std::vector<Piece> pieces);

    const std::vector<Piece>& pieces() const noexcept { return pieces_; }
    std::size_t dim() const noexcept { return dim_; }
    bool is_piecewise() const noexcept { return !(pieces_.size() == 1 && pieces_[0].guard.kind == Guard::Kind::everywhere); }

    Point eval(const Point& x) const;
    std::size_t matching_pieces(const Point& x) const;

    /// Throws ParseError unless the guards cover `domain` exactly once everywhere.
    void validate_coverage(const Domain& domain) const;

    friend bool operator==(const MapExpr& a, const MapExpr& b) { return a.pieces_ == b.pieces_; }

private:
    std::vector<Piece> pieces_;
    std::size_t dim_ = 0;
};

/// One source line of mapping text, with its position in the originating file.
struct SourceLine {
    std::string text;
    std::size_t line = 1;
    std::size_t column_offset = 0;
};

/// Parses `expr` text: a bare body (comma-separated for n > 1 outputs) or pieces
/// `piece [a,b) -> body` separated by `;` or newlines. Point pieces are written `x = c`.
MapExpr parse(std::string_view text);
MapExpr parse(const std::vector<SourceLine>& lines);

double eval(const Node& node, const Point& x);
Point eval(const MapExpr& expr, const Point& x);

std::string print(const Node& node, std::size_t dim = 1);
std::string print(const MapExpr& expr);

/// `[a,b]` (products joined with `*`) or `ball(c1, ..., cn; r)`; endpoints may be constant expressions.
Domain parse_domain(std::string_view text);
NormSpec parse_norm(std::string_view text);

/// Contents of a mapping spec file.
struct MapSpec {
    std::string name = "map";
    std::size_t dim = 0;
    Domain domain = Domain::interval(0.0, 1.0);
    std::optional<Domain> ambient;
    NormSpec norm = NormSpec::euclidean();
    MapExpr expr;
    std::string source;
};

MapSpec parse_map_spec(std::string_view text);
MapSpec load_map_spec(const std::filesystem::path& path);

struct CorpusEntry {
    std::string name;
    std::string source;  // spec-file text the entry is built from
    MapExpr expr;
    Domain domain = Domain::interval(0.0, 1.0);
    std::optional<Domain> ambient;  // codomain used for self-map checks, when larger than domain
    NormSpec norm = NormSpec::euclidean();
    std::vector<std::string> notes;
};

const std::vector<CorpusEntry>& corpus();
/// Throws PreconditionError for unknown names.
const CorpusEntry& corpus_entry(std::string_view name);

}  // namespace contractive::mapdef
