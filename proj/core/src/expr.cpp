#include "stabcert/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <utility>

#include "stabcert/errors.hpp"

namespace stabcert {

namespace detail {

class FunctionImpl {
public:
    virtual ~FunctionImpl() = default;
    virtual double eval(double t) const = 0;
    const std::string& source() const { return source_; }

protected:
    std::string source_;
};

namespace {

// ---------------------------------------------------------------------------
// expression tree
// ---------------------------------------------------------------------------

struct Node {
    virtual ~Node() = default;
    virtual double eval(double t) const = 0;
};

using NodePtr = std::unique_ptr<Node>;

struct ConstNode final : Node {
    double value;
    explicit ConstNode(double v) : value(v) {}
    double eval(double) const override { return value; }
};

struct VarNode final : Node {
    double eval(double t) const override { return t; }
};

enum class UnaryOp { neg, exp, log, sin, cos, abs };

struct UnaryNode final : Node {
    UnaryOp op;
    NodePtr arg;
    UnaryNode(UnaryOp o, NodePtr a) : op(o), arg(std::move(a)) {}
    double eval(double t) const override {
        const double x = arg->eval(t);
        switch (op) {
            case UnaryOp::neg: return -x;
            case UnaryOp::exp: return std::exp(x);
            case UnaryOp::log: return std::log(x);
            case UnaryOp::sin: return std::sin(x);
            case UnaryOp::cos: return std::cos(x);
            case UnaryOp::abs: return std::abs(x);
        }
        return 0.0;
    }
};

enum class BinaryOp { add, sub, mul, div, pow };

struct BinaryNode final : Node {
    BinaryOp op;
    NodePtr lhs, rhs;
    BinaryNode(BinaryOp o, NodePtr l, NodePtr r)
        : op(o), lhs(std::move(l)), rhs(std::move(r)) {}
    double eval(double t) const override {
        const double a = lhs->eval(t);
        const double b = rhs->eval(t);
        switch (op) {
            case BinaryOp::add: return a + b;
            case BinaryOp::sub: return a - b;
            case BinaryOp::mul: return a * b;
            case BinaryOp::div: return a / b;
            case BinaryOp::pow: return std::pow(a, b);
        }
        return 0.0;
    }
};

// ---------------------------------------------------------------------------
// recursive-descent parser
// ---------------------------------------------------------------------------

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    NodePtr parse() {
        NodePtr root = parse_expr();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return root;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, 1, static_cast<int>(pos_) + 1);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool consume(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    NodePtr parse_expr() {
        NodePtr node = parse_term();
        for (;;) {
            if (consume('+')) {
                node = std::make_unique<BinaryNode>(BinaryOp::add, std::move(node), parse_term());
            } else if (consume('-')) {
                node = std::make_unique<BinaryNode>(BinaryOp::sub, std::move(node), parse_term());
            } else {
                return node;
            }
        }
    }

    NodePtr parse_term() {
        NodePtr node = parse_power();
        for (;;) {
            if (consume('*')) {
                node = std::make_unique<BinaryNode>(BinaryOp::mul, std::move(node), parse_power());
            } else if (consume('/')) {
                node = std::make_unique<BinaryNode>(BinaryOp::div, std::move(node), parse_power());
            } else {
                return node;
            }
        }
    }

    // right-associative: a^b^c = a^(b^c)
    NodePtr parse_power() {
        NodePtr base = parse_unary();
        if (consume('^')) {
            return std::make_unique<BinaryNode>(BinaryOp::pow, std::move(base), parse_power());
        }
        return base;
    }

    // unary minus binds looser than '^': -t^2 is -(t^2)
    NodePtr parse_unary() {
        if (consume('-')) {
            return std::make_unique<UnaryNode>(UnaryOp::neg, parse_power());
        }
        if (consume('+')) return parse_power();
        return parse_primary();
    }

    NodePtr parse_primary() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (c == '(') {
            ++pos_;
            NodePtr inner = parse_expr();
            if (!consume(')')) fail("expected ')'");
            return inner;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr parse_number() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
            ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
            if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
                ++p;
                while (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) ++p;
                pos_ = p;
            }
        }
        try {
            std::size_t used = 0;
            const double v = std::stod(std::string(text_.substr(start, pos_ - start)), &used);
            if (used != pos_ - start) fail("malformed number");
            return std::make_unique<ConstNode>(v);
        } catch (const std::exception&) {
            fail("malformed number");
        }
    }

    NodePtr parse_ident() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string name(text_.substr(start, pos_ - start));
        if (name == "t") return std::make_unique<VarNode>();

        if (name == "pow") {
            if (!consume('(')) fail("pow requires two arguments");
            NodePtr a = parse_expr();
            if (!consume(',')) fail("pow requires two arguments");
            NodePtr b = parse_expr();
            if (!consume(')')) fail("expected ')'");
            return std::make_unique<BinaryNode>(BinaryOp::pow, std::move(a), std::move(b));
        }

        // the named profiles double as expression functions
        if (name == "const") return parse_call_1(name);  // identity on its argument
        if (name == "exp_decay") {
            NodePtr k = parse_call_1(name);
            NodePtr kt = std::make_unique<BinaryNode>(BinaryOp::mul, std::move(k),
                                                      std::make_unique<VarNode>());
            return std::make_unique<UnaryNode>(
                UnaryOp::exp, std::make_unique<UnaryNode>(UnaryOp::neg, std::move(kt)));
        }
        if (name == "power_decay") {
            NodePtr k = parse_call_1(name);
            return std::make_unique<BinaryNode>(
                BinaryOp::pow, one_plus_t(),
                std::make_unique<UnaryNode>(UnaryOp::neg, std::move(k)));
        }
        if (name == "sin_damped") {
            NodePtr a = parse_call_1(name);
            NodePtr sin_t = std::make_unique<UnaryNode>(UnaryOp::sin,
                                                        std::make_unique<VarNode>());
            NodePtr denom =
                std::make_unique<BinaryNode>(BinaryOp::pow, one_plus_t(), std::move(a));
            return std::make_unique<BinaryNode>(BinaryOp::div, std::move(sin_t),
                                                std::move(denom));
        }

        UnaryOp op;
        if (name == "exp") op = UnaryOp::exp;
        else if (name == "log") op = UnaryOp::log;
        else if (name == "sin") op = UnaryOp::sin;
        else if (name == "cos") op = UnaryOp::cos;
        else if (name == "abs") op = UnaryOp::abs;
        else fail("unknown identifier '" + name + "'");

        if (!consume('(')) fail(name + " requires an argument");
        NodePtr a = parse_expr();
        if (!consume(')')) fail("expected ')'");
        return std::make_unique<UnaryNode>(op, std::move(a));
    }

    NodePtr parse_call_1(const std::string& name) {
        if (!consume('(')) fail(name + " requires an argument");
        NodePtr a = parse_expr();
        if (!consume(')')) fail("expected ')'");
        return a;
    }

    static NodePtr one_plus_t() {
        return std::make_unique<BinaryNode>(BinaryOp::add, std::make_unique<ConstNode>(1.0),
                                            std::make_unique<VarNode>());
    }
};

// ---------------------------------------------------------------------------
// impls
// ---------------------------------------------------------------------------

class ExprFunction final : public FunctionImpl {
public:
    ExprFunction(NodePtr root, std::string source) : root_(std::move(root)) {
        source_ = std::move(source);
    }
    double eval(double t) const override { return root_->eval(t); }

private:
    NodePtr root_;
};

class TableFunction final : public FunctionImpl {
public:
    TableFunction(std::vector<double> times, std::vector<double> values, InterpOrder order)
        : times_(std::move(times)), values_(std::move(values)), order_(order) {
        if (times_.size() < 2 || times_.size() != values_.size())
            throw ValidationError("tabulated function needs at least two (t, v) samples");
        for (std::size_t i = 1; i < times_.size(); ++i)
            if (!(times_[i] > times_[i - 1]))
                throw ValidationError("tabulated times must be strictly increasing");
        slopes_ = order_ == InterpOrder::cubic ? hermite_slopes() : std::vector<double>{};
        source_ = "table(n=" + std::to_string(times_.size()) +
                  (order_ == InterpOrder::cubic ? ",order=cubic" : ",order=linear") + ")";
    }

    double eval(double t) const override {
        if (t <= times_.front()) return values_.front();
        if (t >= times_.back()) return values_.back();
        std::size_t hi = 1;
        {
            // binary search for the segment containing t
            std::size_t lo = 0, up = times_.size() - 1;
            while (up - lo > 1) {
                const std::size_t mid = (lo + up) / 2;
                (times_[mid] <= t ? lo : up) = mid;
            }
            hi = up;
        }
        const std::size_t i = hi - 1;
        const double h = times_[hi] - times_[i];
        const double s = (t - times_[i]) / h;
        if (order_ == InterpOrder::linear)
            return values_[i] + s * (values_[hi] - values_[i]);
        // cubic Hermite with finite-difference slopes
        const double y0 = values_[i], y1 = values_[hi];
        const double m0 = slopes_[i] * h, m1 = slopes_[hi] * h;
        const double s2 = s * s, s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * m0 +
               (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * m1;
    }

private:
    std::vector<double> hermite_slopes() const {
        const std::size_t n = times_.size();
        std::vector<double> m(n);
        m[0] = (values_[1] - values_[0]) / (times_[1] - times_[0]);
        m[n - 1] = (values_[n - 1] - values_[n - 2]) / (times_[n - 1] - times_[n - 2]);
        for (std::size_t i = 1; i + 1 < n; ++i)
            m[i] = (values_[i + 1] - values_[i - 1]) / (times_[i + 1] - times_[i - 1]);
        return m;
    }

    std::vector<double> times_, values_, slopes_;
    InterpOrder order_;
};

// Resolve "name" or "name(args...)" against the built-in profile set.
// Returns an equivalent expression string, or empty if not a named profile.
std::string resolve_named(std::string_view text) {
    std::size_t i = 0;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_'))
        ++i;
    const std::string name(text.substr(start, i - start));
    std::vector<std::string> args;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i < text.size() && text[i] == '(') {
        const std::size_t close = text.rfind(')');
        if (close == std::string_view::npos || close < i) return {};
        std::string body(text.substr(i + 1, close - i - 1));
        for (std::size_t j = close + 1; j < text.size(); ++j)
            if (!std::isspace(static_cast<unsigned char>(text[j]))) return {};
        std::size_t from = 0;
        while (from <= body.size()) {
            const std::size_t comma = body.find(',', from);
            args.push_back(body.substr(from, comma == std::string::npos ? std::string::npos
                                                                        : comma - from));
            if (comma == std::string::npos) break;
            from = comma + 1;
        }
    } else {
        for (; i < text.size(); ++i)
            if (!std::isspace(static_cast<unsigned char>(text[i]))) return {};
    }

    const auto num = [&](const std::string& a) -> std::string { return "(" + a + ")"; };
    if (name == "sin" && args.empty()) return "sin(t)";
    if (name == "const" && args.size() == 1) return num(args[0]);
    if (name == "exp_decay" && args.size() == 1) return "exp(-" + num(args[0]) + "*t)";
    if (name == "power_decay" && args.size() == 1)
        return "pow(1+t,-" + num(args[0]) + ")";
    if (name == "sin_damped" && args.size() == 1)
        return "sin(t)/pow(1+t," + num(args[0]) + ")";
    return {};
}

}  // namespace
}  // namespace detail

TimeFunction::TimeFunction(std::shared_ptr<const detail::FunctionImpl> impl)
    : impl_(std::move(impl)) {}

double TimeFunction::operator()(double t) const { return impl_->eval(t); }

const std::string& TimeFunction::source() const { return impl_->source(); }

TimeFunction TimeFunction::parse(std::string_view text) {
    const std::string named = detail::resolve_named(text);
    const std::string expr = named.empty() ? std::string(text) : named;
    detail::Parser parser(expr);
    auto root = parser.parse();
    // keep the user's original spelling as the canonical source
    return TimeFunction(std::make_shared<detail::ExprFunction>(std::move(root),
                                                               std::string(text)));
}

TimeFunction TimeFunction::constant(double c) {
    return TimeFunction(std::make_shared<detail::ExprFunction>(
        std::make_unique<detail::ConstNode>(c), "const(" + std::to_string(c) + ")"));
}

TimeFunction TimeFunction::tabulated(std::vector<double> times, std::vector<double> values,
                                     InterpOrder order) {
    return TimeFunction(std::make_shared<detail::TableFunction>(std::move(times),
                                                                std::move(values), order));
}

std::uint64_t source_hash(std::string_view text) noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (const char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace stabcert
