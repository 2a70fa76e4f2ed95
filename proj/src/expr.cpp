#include "warpgeo/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>

namespace warpgeo::dsl {

// ---------------------------------------------------------------------------
// Jet arithmetic

Jet Jet::constant(int dim, double c) {
    Jet j;
    j.dim = dim;
    j.value = c;
    return j;
}

Jet Jet::variable(int dim, int index, double x) {
    Jet j = constant(dim, x);
    j.d(index) = 1.0;
    return j;
}

Jet operator+(const Jet& a, const Jet& b) {
    Jet r = a;
    r.value += b.value;
    for (int i = 0; i < a.dim; ++i) {
        r.d(i) += b.d(i);
        for (int j = 0; j < a.dim; ++j) r.dd(i, j) += b.dd(i, j);
    }
    return r;
}

Jet operator-(const Jet& a) {
    Jet r = a;
    r.value = -a.value;
    for (int i = 0; i < a.dim; ++i) {
        r.d(i) = -a.d(i);
        for (int j = 0; j < a.dim; ++j) r.dd(i, j) = -a.dd(i, j);
    }
    return r;
}

Jet operator-(const Jet& a, const Jet& b) { return a + (-b); }

Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    r.dim = a.dim;
    r.value = a.value * b.value;
    for (int i = 0; i < a.dim; ++i) {
        r.d(i) = a.value * b.d(i) + b.value * a.d(i);
        for (int j = 0; j < a.dim; ++j) {
            r.dd(i, j) = a.value * b.dd(i, j) + b.value * a.dd(i, j) + a.d(i) * b.d(j) +
                         b.d(i) * a.d(j);
        }
    }
    return r;
}

Jet chain(const Jet& a, double f, double df, double ddf) {
    Jet r;
    r.dim = a.dim;
    r.value = f;
    for (int i = 0; i < a.dim; ++i) {
        r.d(i) = df * a.d(i);
        for (int j = 0; j < a.dim; ++j) r.dd(i, j) = df * a.dd(i, j) + ddf * a.d(i) * a.d(j);
    }
    return r;
}

Jet operator/(const Jet& a, const Jet& b) {
    const double u = b.value;
    return a * chain(b, 1.0 / u, -1.0 / (u * u), 2.0 / (u * u * u));
}

Jet ipow(const Jet& a, int n) {
    if (n == 0) return Jet::constant(a.dim, 1.0);
    const double u = a.value;
    const double f = std::pow(u, n);
    const double df = n * std::pow(u, n - 1);
    const double ddf = (n == 1) ? 0.0 : n * (n - 1) * std::pow(u, n - 2);
    return chain(a, f, df, ddf);
}

// ---------------------------------------------------------------------------
// Tokenizer

namespace {

enum class Tok { Number, Ident, Op, End };

struct Token {
    Tok kind;
    std::size_t offset;
    std::string text;
    double number = 0.0;
    bool integral = false;
};

const std::set<std::string> kOperandStart = {"number", "identifier", "(", "-"};

std::vector<Token> tokenize(std::string_view s) {
    std::vector<Token> out;
    std::size_t i = 0;
    const auto digit = [&](std::size_t k) {
        return k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]));
    };
    while (i < s.size()) {
        const char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (digit(i) || (c == '.' && digit(i + 1))) {
            const std::size_t start = i;
            bool integral = true;
            while (digit(i)) ++i;
            if (i < s.size() && s[i] == '.') {
                integral = false;
                ++i;
                while (digit(i)) ++i;
            }
            if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
                integral = false;
                ++i;
                if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
                if (!digit(i)) {
                    throw ParseError(ParseError::Reason::Syntax, i, {"exponent digits"},
                                     "malformed number: expected exponent digits at offset " +
                                         std::to_string(i));
                }
                while (digit(i)) ++i;
            }
            Token t{Tok::Number, start, std::string(s.substr(start, i - start))};
            t.number = std::strtod(t.text.c_str(), nullptr);
            t.integral = integral;
            out.push_back(std::move(t));
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = i;
            while (i < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) {
                ++i;
            }
            out.push_back({Tok::Ident, start, std::string(s.substr(start, i - start))});
            continue;
        }
        if (std::string_view("+-*/^(),").find(c) != std::string_view::npos) {
            out.push_back({Tok::Op, i, std::string(1, c)});
            ++i;
            continue;
        }
        throw ParseError(ParseError::Reason::Syntax, i, kOperandStart,
                         std::string("unexpected character '") + c + "' at offset " +
                             std::to_string(i));
    }
    out.push_back({Tok::End, s.size(), ""});
    return out;
}

NodePtr make(NodeKind kind, std::vector<NodePtr> children, double constant = 0.0, int index = 0) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->constant = constant;
    n->index = index;
    n->children = std::move(children);
    return n;
}

std::optional<NodeKind> function_kind(const std::string& name) {
    if (name == "sin") return NodeKind::Sin;
    if (name == "cos") return NodeKind::Cos;
    if (name == "exp") return NodeKind::Exp;
    if (name == "log") return NodeKind::Log;
    if (name == "sqrt") return NodeKind::Sqrt;
    return std::nullopt;
}

std::string describe(const Token& t) {
    return t.kind == Tok::End ? std::string("end of input") : "'" + t.text + "'";
}

class Parser {
public:
    Parser(std::string_view text, int dim) : tokens_(tokenize(text)), dim_(dim) {}

    NodePtr parse_all() {
        NodePtr e = expr();
        if (peek().kind != Tok::End) {
            fail(peek(), {"+", "-", "*", "/", "end of input"});
        }
        return e;
    }

private:
    const Token& peek() const { return tokens_[pos_]; }
    const Token& next() { return tokens_[pos_++]; }
    bool at_op(char c) const { return peek().kind == Tok::Op && peek().text[0] == c; }

    [[noreturn]] void fail(const Token& t, std::set<std::string> expected) const {
        std::string list;
        for (const auto& e : expected) list += (list.empty() ? "" : ", ") + e;
        throw ParseError(ParseError::Reason::Syntax, t.offset, std::move(expected),
                         "syntax error at offset " + std::to_string(t.offset) + ": unexpected " +
                             describe(t) + ", expected one of {" + list + "}");
    }

    void expect(char c, std::set<std::string> expected) {
        if (!at_op(c)) fail(peek(), std::move(expected));
        ++pos_;
    }

    NodePtr expr() {
        NodePtr lhs = term();
        while (at_op('+') || at_op('-')) {
            const bool add = next().text[0] == '+';
            NodePtr rhs = term();
            lhs = make(add ? NodeKind::Add : NodeKind::Sub, {lhs, rhs});
        }
        return lhs;
    }

    NodePtr term() {
        NodePtr lhs = unary();
        while (at_op('*') || at_op('/')) {
            const bool mul = next().text[0] == '*';
            NodePtr rhs = unary();
            lhs = make(mul ? NodeKind::Mul : NodeKind::Div, {lhs, rhs});
        }
        return lhs;
    }

    NodePtr unary() {
        if (at_op('-')) {
            ++pos_;
            return make(NodeKind::Neg, {unary()});
        }
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (at_op('^')) {
            ++pos_;
            const int n = integer_literal();
            return make(NodeKind::Pow, {base}, 0.0, n);
        }
        return base;
    }

    int integer_literal() {
        bool negative = false;
        if (at_op('-')) {
            negative = true;
            ++pos_;
        }
        const Token& t = peek();
        if (t.kind != Tok::Number || !t.integral || t.number > 1024.0) {
            fail(t, {"integer"});
        }
        ++pos_;
        const int n = static_cast<int>(t.number);
        return negative ? -n : n;
    }

    NodePtr primary() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::Number:
                ++pos_;
                return make(NodeKind::Constant, {}, t.number);
            case Tok::Ident:
                return identifier();
            case Tok::Op:
                if (t.text[0] == '(') {
                    ++pos_;
                    NodePtr e = expr();
                    expect(')', {")", "+", "-", "*", "/"});
                    return e;
                }
                break;
            case Tok::End:
                break;
        }
        fail(t, kOperandStart);
    }

    NodePtr identifier() {
        const Token& t = next();
        const std::string& name = t.text;
        if (name == "t" && dim_ == 1) return make(NodeKind::Variable, {}, 0.0, 0);
        if (name.size() >= 2 && name[0] == 'x') {
            int index = 0;
            const auto* first = name.data() + 1;
            const auto* last = name.data() + name.size();
            auto [ptr, ec] = std::from_chars(first, last, index);
            if (ec == std::errc() && ptr == last && name[1] != '0') {
                if (index >= 1 && index <= dim_) return make(NodeKind::Variable, {}, 0.0, index - 1);
                throw ParseError(ParseError::Reason::UnknownIdentifier, t.offset, {},
                                 "variable '" + name + "' exceeds dimension " +
                                     std::to_string(dim_) + " at offset " +
                                     std::to_string(t.offset));
            }
        }
        if (name == "pow") return pow_call(t);
        const auto kind = function_kind(name);
        if (!kind) {
            throw ParseError(ParseError::Reason::UnknownIdentifier, t.offset, {},
                             "unknown identifier '" + name + "' at offset " +
                                 std::to_string(t.offset));
        }
        expect('(', {"("});
        NodePtr arg = expr();
        if (at_op(',')) {
            throw ParseError(ParseError::Reason::Arity, t.offset, {")"},
                             "function '" + name + "' takes 1 argument (offset " +
                                 std::to_string(t.offset) + ")");
        }
        expect(')', {")", "+", "-", "*", "/"});
        return make(*kind, {arg});
    }

    NodePtr pow_call(const Token& name) {
        expect('(', {"("});
        NodePtr base = expr();
        if (at_op(')')) {
            throw ParseError(ParseError::Reason::Arity, name.offset, {","},
                             "function 'pow' takes 2 arguments (offset " +
                                 std::to_string(name.offset) + ")");
        }
        expect(',', {",", "+", "-", "*", "/"});
        const int n = integer_literal();
        if (at_op(',')) {
            throw ParseError(ParseError::Reason::Arity, name.offset, {")"},
                             "function 'pow' takes 2 arguments (offset " +
                                 std::to_string(name.offset) + ")");
        }
        expect(')', {")"});
        return make(NodeKind::Pow, {base}, 0.0, n);
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    int dim_;
};

std::string format_number(double c) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", c);
    return buf;
}

// ---------------------------------------------------------------------------
// Evaluation

double value_of(const Node& n, std::span<const double> p) {
    const auto arg = [&](std::size_t i) { return value_of(*n.children[i], p); };
    switch (n.kind) {
        case NodeKind::Constant: return n.constant;
        case NodeKind::Variable: return p[static_cast<std::size_t>(n.index)];
        case NodeKind::Add: return arg(0) + arg(1);
        case NodeKind::Sub: return arg(0) - arg(1);
        case NodeKind::Mul: return arg(0) * arg(1);
        case NodeKind::Div: {
            const double d = arg(1);
            if (d == 0.0) throw EvaluationError("division by zero in " + print(n), print(n));
            return arg(0) / d;
        }
        case NodeKind::Neg: return -arg(0);
        case NodeKind::Pow: {
            const double u = arg(0);
            if (u == 0.0 && n.index < 0) {
                throw EvaluationError("negative power of zero in " + print(n), print(n));
            }
            return std::pow(u, n.index);
        }
        case NodeKind::Sin: return std::sin(arg(0));
        case NodeKind::Cos: return std::cos(arg(0));
        case NodeKind::Exp: return std::exp(arg(0));
        case NodeKind::Log: {
            const double u = arg(0);
            if (!(u > 0.0)) throw EvaluationError("log of non-positive value in " + print(n), print(n));
            return std::log(u);
        }
        case NodeKind::Sqrt: {
            const double u = arg(0);
            if (u < 0.0) throw EvaluationError("sqrt of negative value in " + print(n), print(n));
            return std::sqrt(u);
        }
    }
    return 0.0;
}

Jet jet_of(const Node& n, std::span<const double> p, int dim) {
    const auto arg = [&](std::size_t i) { return jet_of(*n.children[i], p, dim); };
    switch (n.kind) {
        case NodeKind::Constant: return Jet::constant(dim, n.constant);
        case NodeKind::Variable:
            return Jet::variable(dim, n.index, p[static_cast<std::size_t>(n.index)]);
        case NodeKind::Add: return arg(0) + arg(1);
        case NodeKind::Sub: return arg(0) - arg(1);
        case NodeKind::Mul: return arg(0) * arg(1);
        case NodeKind::Div: {
            Jet a = arg(0);
            Jet b = arg(1);
            if (b.value == 0.0) throw EvaluationError("division by zero in " + print(n), print(n));
            return a / b;
        }
        case NodeKind::Neg: return -arg(0);
        case NodeKind::Pow: {
            Jet a = arg(0);
            if (a.value == 0.0 && n.index < 0) {
                throw EvaluationError("negative power of zero in " + print(n), print(n));
            }
            return ipow(a, n.index);
        }
        case NodeKind::Sin: {
            Jet a = arg(0);
            const double s = std::sin(a.value), c = std::cos(a.value);
            return chain(a, s, c, -s);
        }
        case NodeKind::Cos: {
            Jet a = arg(0);
            const double s = std::sin(a.value), c = std::cos(a.value);
            return chain(a, c, -s, -c);
        }
        case NodeKind::Exp: {
            Jet a = arg(0);
            const double e = std::exp(a.value);
            return chain(a, e, e, e);
        }
        case NodeKind::Log: {
            Jet a = arg(0);
            const double u = a.value;
            if (!(u > 0.0)) throw EvaluationError("log of non-positive value in " + print(n), print(n));
            return chain(a, std::log(u), 1.0 / u, -1.0 / (u * u));
        }
        case NodeKind::Sqrt: {
            Jet a = arg(0);
            const double u = a.value;
            if (!(u > 0.0)) {
                throw EvaluationError("sqrt not differentiable at non-positive value in " + print(n),
                                      print(n));
            }
            const double s = std::sqrt(u);
            return chain(a, s, 0.5 / s, -0.25 / (s * u));
        }
    }
    return Jet::constant(dim, 0.0);
}

bool equal_nodes(const Node& a, const Node& b) {
    if (a.kind != b.kind || a.index != b.index || a.children.size() != b.children.size()) {
        return false;
    }
    if (a.kind == NodeKind::Constant && a.constant != b.constant) return false;
    for (std::size_t i = 0; i < a.children.size(); ++i) {
        if (!equal_nodes(*a.children[i], *b.children[i])) return false;
    }
    return true;
}

const char* function_name(NodeKind k) {
    switch (k) {
        case NodeKind::Sin: return "sin";
        case NodeKind::Cos: return "cos";
        case NodeKind::Exp: return "exp";
        case NodeKind::Log: return "log";
        case NodeKind::Sqrt: return "sqrt";
        default: return "?";
    }
}

}  // namespace

// ---------------------------------------------------------------------------

Expr parse(std::string_view text, int dim) {
    if (dim < 1 || dim > kMaxDim) {
        throw InputError("expression dimension must be in [1, " + std::to_string(kMaxDim) + "]",
                         {{"dim", static_cast<double>(dim)}});
    }
    Parser parser(text, dim);
    return Expr(parser.parse_all(), dim);
}

std::string print(const Node& n) {
    const auto child = [&](std::size_t i) { return print(*n.children[i]); };
    switch (n.kind) {
        case NodeKind::Constant: return format_number(n.constant);
        case NodeKind::Variable: return "x" + std::to_string(n.index + 1);
        case NodeKind::Add: return "(" + child(0) + " + " + child(1) + ")";
        case NodeKind::Sub: return "(" + child(0) + " - " + child(1) + ")";
        case NodeKind::Mul: return "(" + child(0) + " * " + child(1) + ")";
        case NodeKind::Div: return "(" + child(0) + " / " + child(1) + ")";
        case NodeKind::Neg: return "(-" + child(0) + ")";
        case NodeKind::Pow: return "(" + child(0) + "^" + std::to_string(n.index) + ")";
        default: return std::string(function_name(n.kind)) + "(" + child(0) + ")";
    }
}

double Expr::value(std::span<const double> p) const {
    if (static_cast<int>(p.size()) != dim_) {
        throw InputError("point dimension does not match expression dimension",
                         {{"expected", static_cast<double>(dim_)},
                          {"got", static_cast<double>(p.size())}});
    }
    return value_of(*root_, p);
}

Jet Expr::eval2(std::span<const double> p) const {
    if (static_cast<int>(p.size()) != dim_) {
        throw InputError("point dimension does not match expression dimension",
                         {{"expected", static_cast<double>(dim_)},
                          {"got", static_cast<double>(p.size())}});
    }
    Jet j = jet_of(*root_, p, dim_);
    // Ordered products in the chain rule can differ in the last bit between
    // (i, j) and (j, i); mirror the upper triangle.
    for (int i = 0; i < dim_; ++i) {
        for (int k = i + 1; k < dim_; ++k) j.dd(k, i) = j.dd(i, k);
    }
    return j;
}

std::string Expr::print() const { return dsl::print(*root_); }

bool Expr::structurally_equal(const Expr& other) const {
    return dim_ == other.dim_ && equal_nodes(*root_, *other.root_);
}

}  // namespace warpgeo::dsl
