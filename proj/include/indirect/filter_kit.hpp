#ifndef INDIRECT_FILTER_KIT_HPP
#define INDIRECT_FILTER_KIT_HPP

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "indirect/interval.hpp"

namespace indirect::filter_kit
{

/// Semi-static filter: |value| > delta * beta^degree certifies the sign of
/// the floating-point evaluation.
struct FilterSpec
{
    double delta = 0.0;
    int degree = 0;

    friend bool operator==(const FilterSpec&, const FilterSpec&) = default;
};

/// Unit roundoff of binary64 under round-to-nearest.
inline constexpr double unit_roundoff = 0x1p-53;

inline constexpr int max_degree = 96;

class FormulaError : public std::runtime_error
{
public:
    enum class Kind
    {
        Syntax,
        UseBeforeDefine,
        Redefinition,
        NonPolynomial,
        TranslatedMisuse,
        UnknownRoot,
        NonHomogeneous,
        DegreeOverflow,
        ExactRoot,
    };

    FormulaError(Kind kind, std::size_t line, std::size_t column, const std::string& what)
        : std::runtime_error(format(line, column, what))
        , kind_(kind)
        , line_(line)
        , column_(column)
    {}

    Kind kind() const noexcept { return kind_; }
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    static std::string format(std::size_t line, std::size_t column, const std::string& what)
    {
        if (line == 0)
            return what;
        return "line " + std::to_string(line) + ", column " + std::to_string(column)
               + ": " + what;
    }

    Kind kind_;
    std::size_t line_;
    std::size_t column_;
};

enum class NodeKind
{
    Input,
    Translated, // difference of two inputs
    Add,
    Sub,
    Mul,
};

struct Node
{
    NodeKind kind;
    int lhs = -1;      // child node, or for Translated the minuend input node
    int rhs = -1;
    int input = -1;    // index into ExprDag::inputs() for Input nodes
    int degree = 0;    // -1 when not homogeneous
};

/// Hash-consed expression DAG built from formula text.
class ExprDag
{
public:
    std::span<const Node> nodes() const noexcept { return nodes_; }
    const std::vector<std::string>& inputs() const noexcept { return inputs_; }

    /// Named assignments in program order.
    const std::vector<std::pair<std::string, int>>& assignments() const noexcept
    {
        return assignments_;
    }

    std::optional<int> find(std::string_view name) const
    {
        for (auto it = assignments_.rbegin(); it != assignments_.rend(); ++it)
            if (it->first == name)
                return it->second;
        return std::nullopt;
    }

    std::size_t count(NodeKind k) const noexcept
    {
        return static_cast<std::size_t>(std::count_if(
            nodes_.begin(), nodes_.end(), [k](const Node& n) { return n.kind == k; }));
    }

    /// Node ids reachable from root (children before parents).
    std::vector<int> reachable(int root) const
    {
        std::vector<int> order;
        std::vector<char> seen(nodes_.size(), 0);
        std::vector<std::pair<int, bool>> stack{{root, false}};
        while (!stack.empty())
        {
            auto [id, expanded] = stack.back();
            stack.pop_back();
            if (expanded)
            {
                order.push_back(id);
                continue;
            }
            if (seen[static_cast<std::size_t>(id)])
                continue;
            seen[static_cast<std::size_t>(id)] = 1;
            stack.push_back({id, true});
            const Node& n = nodes_[static_cast<std::size_t>(id)];
            if (n.kind != NodeKind::Input)
            {
                if (!seen[static_cast<std::size_t>(n.rhs)])
                    stack.push_back({n.rhs, false});
                if (!seen[static_cast<std::size_t>(n.lhs)])
                    stack.push_back({n.lhs, false});
            }
        }
        return order;
    }

    /// Evaluates every node in the number type T with the same operation
    /// order the DAG encodes. values[i] is the value of inputs()[i].
    template <typename T>
    std::vector<T> evaluate(std::span<const T> values) const
    {
        if (values.size() != inputs_.size())
            throw std::invalid_argument("input count mismatch");
        std::vector<T> out(nodes_.size());
        for (std::size_t i = 0; i < nodes_.size(); ++i)
        {
            const Node& n = nodes_[i];
            switch (n.kind)
            {
            case NodeKind::Input: out[i] = values[static_cast<std::size_t>(n.input)]; break;
            case NodeKind::Translated:
            case NodeKind::Sub:
                out[i] = out[static_cast<std::size_t>(n.lhs)] - out[static_cast<std::size_t>(n.rhs)];
                break;
            case NodeKind::Add:
                out[i] = out[static_cast<std::size_t>(n.lhs)] + out[static_cast<std::size_t>(n.rhs)];
                break;
            case NodeKind::Mul:
                out[i] = out[static_cast<std::size_t>(n.lhs)] * out[static_cast<std::size_t>(n.rhs)];
                break;
            }
        }
        return out;
    }

    /// Leaves of root's subgraph that contribute a b-factor: plain inputs
    /// used outside a translated pair, and translated pairs.
    struct BFactors
    {
        std::vector<int> plain;                    // input indices
        std::vector<std::pair<int, int>> translated; // (minuend, subtrahend) input indices
    };

    BFactors b_factors(int root) const
    {
        BFactors bf;
        std::unordered_set<int> plain_seen;
        for (int id : reachable(root))
        {
            const Node& n = nodes_[static_cast<std::size_t>(id)];
            if (n.kind == NodeKind::Translated)
            {
                bf.translated.emplace_back(nodes_[static_cast<std::size_t>(n.lhs)].input,
                                           nodes_[static_cast<std::size_t>(n.rhs)].input);
                continue;
            }
            if (n.kind == NodeKind::Input)
                continue;
            for (int c : {n.lhs, n.rhs})
            {
                const Node& cn = nodes_[static_cast<std::size_t>(c)];
                if (cn.kind == NodeKind::Input && plain_seen.insert(cn.input).second)
                    bf.plain.push_back(cn.input);
            }
        }
        const Node& r = nodes_[static_cast<std::size_t>(root)];
        if (r.kind == NodeKind::Input && plain_seen.insert(r.input).second)
            bf.plain.push_back(r.input);
        return bf;
    }

private:
    friend class Parser;

    int intern(Node n)
    {
        const auto key = std::make_tuple(static_cast<int>(n.kind), n.lhs, n.rhs, n.input);
        if (auto it = index_.find(key); it != index_.end())
            return it->second;
        nodes_.push_back(n);
        const int id = static_cast<int>(nodes_.size() - 1);
        index_.emplace(key, id);
        return id;
    }

    std::vector<Node> nodes_;
    std::vector<std::string> inputs_;
    std::vector<std::pair<std::string, int>> assignments_;
    std::map<std::tuple<int, int, int, int>, int> index_;
};

/// Recursive-descent parser for the line-oriented formula language:
///
///     program := line+
///     line    := ident '=' expr | '#translated' ident ident
///     expr    := term (('+'|'-') term)*
///     term    := factor ('*' factor)*
///     factor  := ident | '(' expr ')'
///
/// Identifiers not yet assigned are inputs. A difference of two inputs
/// becomes a translated-input node.
class Parser
{
public:
    explicit Parser(std::string_view text) : text_(text) {}

    ExprDag run()
    {
        std::size_t line_no = 0;
        std::size_t start = 0;
        while (start <= text_.size())
        {
            std::size_t end = text_.find('\n', start);
            if (end == std::string_view::npos)
                end = text_.size();
            ++line_no;
            parse_line(text_.substr(start, end - start), line_no);
            start = end + 1;
        }
        if (dag_.assignments_.empty())
            throw FormulaError(FormulaError::Kind::Syntax, line_no, 1, "empty program");
        check_translated_pairs();
        return std::move(dag_);
    }

private:
    struct Cursor
    {
        std::string_view s;
        std::size_t pos = 0;
        std::size_t line = 0;
    };

    [[noreturn]] static void fail(FormulaError::Kind k, const Cursor& c, const std::string& what)
    {
        throw FormulaError(k, c.line, c.pos + 1, what);
    }

    static void skip_ws(Cursor& c)
    {
        while (c.pos < c.s.size() && std::isspace(static_cast<unsigned char>(c.s[c.pos])))
            ++c.pos;
    }

    static bool ident_start(char ch)
    {
        return std::isalpha(static_cast<unsigned char>(ch)) || ch == '_';
    }
    static bool ident_char(char ch)
    {
        return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_';
    }

    static std::string_view read_ident(Cursor& c)
    {
        skip_ws(c);
        if (c.pos >= c.s.size() || !ident_start(c.s[c.pos]))
            return {};
        const std::size_t b = c.pos;
        while (c.pos < c.s.size() && ident_char(c.s[c.pos]))
            ++c.pos;
        return c.s.substr(b, c.pos - b);
    }

    void parse_line(std::string_view line, std::size_t line_no)
    {
        Cursor c{line, 0, line_no};
        skip_ws(c);
        if (c.pos >= line.size())
            return;
        if (line[c.pos] == '#')
        {
            ++c.pos;
            const auto directive = read_ident(c);
            if (directive != "translated")
                fail(FormulaError::Kind::Syntax, c, "unknown directive");
            const auto a = read_ident(c);
            const auto b = read_ident(c);
            if (a.empty() || b.empty())
                fail(FormulaError::Kind::Syntax, c, "#translated expects two identifiers");
            skip_ws(c);
            if (c.pos != line.size())
                fail(FormulaError::Kind::Syntax, c, "trailing characters after directive");
            translated_.emplace_back(std::string(a), std::string(b), line_no);
            return;
        }
        const std::size_t name_pos = c.pos;
        const auto name = read_ident(c);
        if (name.empty())
            fail(FormulaError::Kind::Syntax, c, "expected identifier");
        skip_ws(c);
        if (c.pos >= line.size() || line[c.pos] != '=')
            fail(FormulaError::Kind::Syntax, c, "expected '='");
        ++c.pos;
        const int root = parse_expr(c);
        skip_ws(c);
        if (c.pos != line.size())
        {
            check_non_polynomial(c);
            fail(FormulaError::Kind::Syntax, c, "unexpected character");
        }
        const std::string key(name);
        if (used_inputs_.contains(key))
        {
            Cursor at{line, name_pos, line_no};
            fail(FormulaError::Kind::UseBeforeDefine, at,
                 "'" + key + "' is used as an input before its definition");
        }
        if (assigned_.contains(key))
        {
            Cursor at{line, name_pos, line_no};
            fail(FormulaError::Kind::Redefinition, at, "'" + key + "' is assigned twice");
        }
        assigned_.emplace(key, root);
        dag_.assignments_.emplace_back(key, root);
    }

    static void check_non_polynomial(const Cursor& c)
    {
        if (c.pos >= c.s.size())
            return;
        const char ch = c.s[c.pos];
        if (ch == '/' || ch == '^' || ch == '.' || std::isdigit(static_cast<unsigned char>(ch)))
            fail(FormulaError::Kind::NonPolynomial, c,
                 std::string("non-polynomial construct '") + ch + "'");
    }

    int parse_expr(Cursor& c)
    {
        int lhs = parse_term(c);
        for (;;)
        {
            skip_ws(c);
            if (c.pos >= c.s.size())
                return lhs;
            const char op = c.s[c.pos];
            if (op != '+' && op != '-')
                return lhs;
            ++c.pos;
            const int rhs = parse_term(c);
            lhs = make_binary(op == '+' ? NodeKind::Add : NodeKind::Sub, lhs, rhs);
        }
    }

    int parse_term(Cursor& c)
    {
        int lhs = parse_factor(c);
        for (;;)
        {
            skip_ws(c);
            if (c.pos >= c.s.size() || c.s[c.pos] != '*')
                return lhs;
            ++c.pos;
            const int rhs = parse_factor(c);
            lhs = make_binary(NodeKind::Mul, lhs, rhs);
        }
    }

    int parse_factor(Cursor& c)
    {
        skip_ws(c);
        if (c.pos >= c.s.size())
            fail(FormulaError::Kind::Syntax, c, "unexpected end of line");
        if (c.s[c.pos] == '(')
        {
            ++c.pos;
            const int e = parse_expr(c);
            skip_ws(c);
            if (c.pos >= c.s.size() || c.s[c.pos] != ')')
            {
                check_non_polynomial(c);
                fail(FormulaError::Kind::Syntax, c, "expected ')'");
            }
            ++c.pos;
            return e;
        }
        check_non_polynomial(c);
        const auto name = read_ident(c);
        if (name.empty())
            fail(FormulaError::Kind::Syntax, c, "expected identifier or '('");
        skip_ws(c);
        if (c.pos < c.s.size() && c.s[c.pos] == '(')
            fail(FormulaError::Kind::NonPolynomial, c,
                 "function call '" + std::string(name) + "(' is not polynomial");
        const std::string key(name);
        if (auto it = assigned_.find(key); it != assigned_.end())
            return it->second;
        used_inputs_.insert(key);
        return input_node(key);
    }

    int input_node(const std::string& name)
    {
        auto it = std::find(dag_.inputs_.begin(), dag_.inputs_.end(), name);
        int idx;
        if (it == dag_.inputs_.end())
        {
            dag_.inputs_.push_back(name);
            idx = static_cast<int>(dag_.inputs_.size() - 1);
        }
        else
        {
            idx = static_cast<int>(it - dag_.inputs_.begin());
        }
        Node n{NodeKind::Input};
        n.input = idx;
        n.degree = 1;
        return dag_.intern(n);
    }

    int make_binary(NodeKind k, int lhs, int rhs)
    {
        const Node& a = dag_.nodes_[static_cast<std::size_t>(lhs)];
        const Node& b = dag_.nodes_[static_cast<std::size_t>(rhs)];
        Node n{k};
        n.lhs = lhs;
        n.rhs = rhs;
        if (k == NodeKind::Sub && a.kind == NodeKind::Input && b.kind == NodeKind::Input)
        {
            n.kind = NodeKind::Translated;
            n.degree = 1;
        }
        else if (k == NodeKind::Mul)
        {
            n.degree = (a.degree < 0 || b.degree < 0) ? -1 : a.degree + b.degree;
        }
        else
        {
            n.degree = (a.degree < 0 || a.degree != b.degree) ? -1 : a.degree;
        }
        return dag_.intern(n);
    }

    // Inputs declared with #translated must only appear inside a
    // difference with their declared partner.
    void check_translated_pairs() const
    {
        std::unordered_map<int, int> partner;
        std::unordered_map<int, std::size_t> decl_line;
        auto idx_of = [this](const std::string& s) -> int {
            auto it = std::find(dag_.inputs_.begin(), dag_.inputs_.end(), s);
            return it == dag_.inputs_.end() ? -1 : static_cast<int>(it - dag_.inputs_.begin());
        };
        for (const auto& [a, b, line] : translated_)
        {
            if (assigned_.contains(a) || assigned_.contains(b))
                throw FormulaError(FormulaError::Kind::TranslatedMisuse, line, 1,
                                   "#translated names must be inputs");
            const int ia = idx_of(a);
            const int ib = idx_of(b);
            if (ia >= 0)
            {
                partner[ia] = ib;
                decl_line[ia] = line;
            }
            if (ib >= 0)
            {
                partner[ib] = ia;
                decl_line[ib] = line;
            }
        }
        if (partner.empty())
            return;
        const auto& nodes = dag_.nodes_;
        for (const Node& n : nodes)
        {
            if (n.kind == NodeKind::Input)
                continue;
            if (n.kind == NodeKind::Translated)
            {
                const int ia = nodes[static_cast<std::size_t>(n.lhs)].input;
                const int ib = nodes[static_cast<std::size_t>(n.rhs)].input;
                for (auto [x, y] : {std::pair{ia, ib}, std::pair{ib, ia}})
                    if (auto it = partner.find(x); it != partner.end() && it->second != y)
                        throw FormulaError(FormulaError::Kind::TranslatedMisuse, decl_line.at(x), 1,
                                           "'" + dag_.inputs_[static_cast<std::size_t>(x)]
                                               + "' is differenced with a non-partner input");
                continue;
            }
            for (int c : {n.lhs, n.rhs})
            {
                const Node& cn = nodes[static_cast<std::size_t>(c)];
                if (cn.kind == NodeKind::Input && partner.contains(cn.input))
                    throw FormulaError(FormulaError::Kind::TranslatedMisuse,
                                       decl_line.at(cn.input), 1,
                                       "'" + dag_.inputs_[static_cast<std::size_t>(cn.input)]
                                           + "' is used outside its translated pair");
            }
        }
        for (const auto& [name, id] : dag_.assignments_)
        {
            const Node& n = nodes[static_cast<std::size_t>(id)];
            if (n.kind == NodeKind::Input && partner.contains(n.input))
                throw FormulaError(FormulaError::Kind::TranslatedMisuse, decl_line.at(n.input), 1,
                                   "'" + name + "' aliases a translated input");
        }
    }

    std::string_view text_;
    ExprDag dag_;
    std::unordered_map<std::string, int> assigned_;
    std::unordered_set<std::string> used_inputs_;
    std::vector<std::tuple<std::string, std::string, std::size_t>> translated_;
};

inline ExprDag parse_formula(std::string_view text)
{
    return Parser(text).run();
}

/// Forward roundoff analysis. Every node carries a magnitude bound m and
/// an absolute error bound e, both in units of beta^degree:
///   input        m = 1, e = 0
///   translated   m = 1, e = u
///   add / sub    m = ma + mb,  e = ea + eb + u*m
///   mul          m = ma * mb,  e = ea*mb + eb*ma + ea*eb + u*m
/// All constant arithmetic is rounded upward.
inline FilterSpec derive_filter(const ExprDag& dag, std::string_view root_name)
{
    const auto root = dag.find(root_name);
    if (!root)
        throw FormulaError(FormulaError::Kind::UnknownRoot, 0, 0,
                           "unknown root '" + std::string(root_name) + "'");
    const auto nodes = dag.nodes();
    const Node& r = nodes[static_cast<std::size_t>(*root)];
    if (r.degree < 0)
        throw FormulaError(FormulaError::Kind::NonHomogeneous, 0, 0,
                           "root '" + std::string(root_name) + "' is not homogeneous");
    if (r.degree > max_degree)
        throw FormulaError(FormulaError::Kind::DegreeOverflow, 0, 0,
                           "root '" + std::string(root_name) + "' has degree "
                               + std::to_string(r.degree));
    if (r.kind == NodeKind::Input)
        throw FormulaError(FormulaError::Kind::ExactRoot, 0, 0,
                           "root '" + std::string(root_name) + "' is an exact input");

    using rounding::add_up;
    using rounding::mul_up;
    constexpr double u = unit_roundoff;

    std::vector<double> m(nodes.size(), 0.0);
    std::vector<double> e(nodes.size(), 0.0);
    for (int id : dag.reachable(*root))
    {
        const auto i = static_cast<std::size_t>(id);
        const Node& n = nodes[i];
        switch (n.kind)
        {
        case NodeKind::Input:
            m[i] = 1.0;
            e[i] = 0.0;
            break;
        case NodeKind::Translated:
            m[i] = 1.0;
            e[i] = u;
            break;
        case NodeKind::Add:
        case NodeKind::Sub: {
            const auto a = static_cast<std::size_t>(n.lhs);
            const auto b = static_cast<std::size_t>(n.rhs);
            m[i] = add_up(m[a], m[b]);
            e[i] = add_up(add_up(e[a], e[b]), mul_up(u, m[i]));
            break;
        }
        case NodeKind::Mul: {
            const auto a = static_cast<std::size_t>(n.lhs);
            const auto b = static_cast<std::size_t>(n.rhs);
            m[i] = mul_up(m[a], m[b]);
            e[i] = add_up(add_up(add_up(mul_up(e[a], m[b]), mul_up(e[b], m[a])),
                                 mul_up(e[a], e[b])),
                          mul_up(u, m[i]));
            break;
        }
        }
    }
    return {e[static_cast<std::size_t>(*root)], r.degree};
}

/// delta * beta^degree, never rounded below the exact value.
inline double threshold(const FilterSpec& spec, double beta) noexcept
{
    double p = spec.delta;
    for (int k = 0; k < spec.degree; ++k)
        p = rounding::mul_up(p, beta);
    return p;
}

/// Largest absolute value among the b-factors; 0 for an empty list.
inline double beta_of(std::span<const double> values) noexcept
{
    double b = 0.0;
    for (double v : values)
        b = std::max(b, std::fabs(v));
    return b;
}

} // namespace indirect::filter_kit

#endif
