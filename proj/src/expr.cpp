#include "atlasforge/expr.hpp"

#include <cctype>
#include <cmath>

namespace af {

struct Expr::Node {
    enum class Kind { Num, Var, Add, Sub, Mul, Div, Neg, Pow } kind;
    double value = 0;
    std::size_t var = 0;
    int exponent = 1;
    std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make_num(double v) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = Expr::Node::Kind::Num;
    n->value = v;
    return n;
}

NodePtr make_var(std::size_t i) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = Expr::Node::Kind::Var;
    n->var = i;
    return n;
}

NodePtr make_bin(Expr::Node::Kind k, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_neg(NodePtr a) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = Expr::Node::Kind::Neg;
    n->a = std::move(a);
    return n;
}

NodePtr make_pow(NodePtr a, int e) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = Expr::Node::Kind::Pow;
    n->a = std::move(a);
    n->exponent = e;
    return n;
}

bool is_zero(const NodePtr& n) { return n->kind == Expr::Node::Kind::Num && n->value == 0.0; }
bool is_one(const NodePtr& n) { return n->kind == Expr::Node::Kind::Num && n->value == 1.0; }

NodePtr add(NodePtr a, NodePtr b) {
    if (is_zero(a)) return b;
    if (is_zero(b)) return a;
    return make_bin(Expr::Node::Kind::Add, std::move(a), std::move(b));
}
NodePtr sub(NodePtr a, NodePtr b) {
    if (is_zero(b)) return a;
    if (is_zero(a)) return make_neg(std::move(b));
    return make_bin(Expr::Node::Kind::Sub, std::move(a), std::move(b));
}
NodePtr mul(NodePtr a, NodePtr b) {
    if (is_zero(a) || is_zero(b)) return make_num(0);
    if (is_one(a)) return b;
    if (is_one(b)) return a;
    return make_bin(Expr::Node::Kind::Mul, std::move(a), std::move(b));
}
NodePtr divide(NodePtr a, NodePtr b) {
    if (is_zero(a)) return make_num(0);
    if (is_one(b)) return a;
    return make_bin(Expr::Node::Kind::Div, std::move(a), std::move(b));
}

struct Parser {
    const std::string& s;
    std::size_t pos = 0;
    std::size_t dim;

    void skip() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
        skip();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    char peek() {
        skip();
        return pos < s.size() ? s[pos] : '\0';
    }

    NodePtr expr() {
        NodePtr t = term();
        while (true) {
            if (eat('+'))
                t = add(t, term());
            else if (eat('-'))
                t = sub(t, term());
            else
                return t;
        }
    }
    NodePtr term() {
        NodePtr f = factor();
        while (true) {
            if (eat('*'))
                f = mul(f, factor());
            else if (eat('/'))
                f = divide(f, factor());
            else
                return f;
        }
    }
    NodePtr factor() {
        if (eat('-')) return make_neg(factor());
        if (eat('+')) return factor();
        NodePtr a = atom();
        if (eat('^')) {
            bool neg = eat('-');
            skip();
            std::size_t start = pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            if (start == pos) throw MalformedInput("expression: integer exponent expected");
            int e = std::stoi(s.substr(start, pos - start));
            return make_pow(std::move(a), neg ? -e : e);
        }
        return a;
    }
    NodePtr atom() {
        skip();
        if (eat('(')) {
            NodePtr e = expr();
            if (!eat(')')) throw MalformedInput("expression: missing closing parenthesis");
            return e;
        }
        if (pos < s.size() && (s[pos] == 'x' || s[pos] == 'X')) {
            ++pos;
            std::size_t start = pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            if (start == pos) throw MalformedInput("expression: variable index expected after x");
            std::size_t idx = std::stoul(s.substr(start, pos - start));
            if (idx < 1 || idx > dim)
                throw MalformedInput("expression: variable x" + std::to_string(idx) + " out of range");
            return make_var(idx - 1);
        }
        std::size_t start = pos;
        while (pos < s.size() &&
               (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.' || s[pos] == 'e' ||
                s[pos] == 'E' ||
                ((s[pos] == '+' || s[pos] == '-') && pos > start && (s[pos - 1] == 'e' || s[pos - 1] == 'E'))))
            ++pos;
        if (start == pos) throw MalformedInput("expression: unexpected character at position " +
                                               std::to_string(pos));
        return make_num(std::stod(s.substr(start, pos - start)));
    }
};

double eval_node(const Expr::Node* n, const std::vector<double>& x) {
    using K = Expr::Node::Kind;
    switch (n->kind) {
        case K::Num:
            return n->value;
        case K::Var:
            return x[n->var];
        case K::Add:
            return eval_node(n->a.get(), x) + eval_node(n->b.get(), x);
        case K::Sub:
            return eval_node(n->a.get(), x) - eval_node(n->b.get(), x);
        case K::Mul:
            return eval_node(n->a.get(), x) * eval_node(n->b.get(), x);
        case K::Div:
            return eval_node(n->a.get(), x) / eval_node(n->b.get(), x);
        case K::Neg:
            return -eval_node(n->a.get(), x);
        case K::Pow:
            return std::pow(eval_node(n->a.get(), x), n->exponent);
    }
    return 0;
}

NodePtr diff_node(const NodePtr& n, std::size_t v) {
    using K = Expr::Node::Kind;
    switch (n->kind) {
        case K::Num:
            return make_num(0);
        case K::Var:
            return make_num(n->var == v ? 1 : 0);
        case K::Add:
            return add(diff_node(n->a, v), diff_node(n->b, v));
        case K::Sub:
            return sub(diff_node(n->a, v), diff_node(n->b, v));
        case K::Mul:
            return add(mul(diff_node(n->a, v), n->b), mul(n->a, diff_node(n->b, v)));
        case K::Div:
            // (a/b)' = (a'b - ab') / b^2
            return divide(sub(mul(diff_node(n->a, v), n->b), mul(n->a, diff_node(n->b, v))),
                          make_pow(n->b, 2));
        case K::Neg:
            return make_neg(diff_node(n->a, v));
        case K::Pow:
            if (n->exponent == 0) return make_num(0);
            return mul(mul(make_num(n->exponent), make_pow(n->a, n->exponent - 1)), diff_node(n->a, v));
    }
    return make_num(0);
}

std::string str_node(const Expr::Node* n) {
    using K = Expr::Node::Kind;
    switch (n->kind) {
        case K::Num: {
            std::string s = std::to_string(n->value);
            while (s.size() > 1 && s.back() == '0') s.pop_back();
            if (!s.empty() && s.back() == '.') s.pop_back();
            return s;
        }
        case K::Var:
            return "x" + std::to_string(n->var + 1);
        case K::Add:
            return "(" + str_node(n->a.get()) + "+" + str_node(n->b.get()) + ")";
        case K::Sub:
            return "(" + str_node(n->a.get()) + "-" + str_node(n->b.get()) + ")";
        case K::Mul:
            return "(" + str_node(n->a.get()) + "*" + str_node(n->b.get()) + ")";
        case K::Div:
            return "(" + str_node(n->a.get()) + "/" + str_node(n->b.get()) + ")";
        case K::Neg:
            return "(-" + str_node(n->a.get()) + ")";
        case K::Pow:
            return "(" + str_node(n->a.get()) + "^" + std::to_string(n->exponent) + ")";
    }
    return "";
}

}  // namespace

Expr Expr::parse(const std::string& text, std::size_t dimension) {
    Parser p{text, 0, dimension};
    Expr e;
    e.root_ = p.expr();
    p.skip();
    if (p.pos != text.size()) throw MalformedInput("expression: trailing characters");
    e.dim_ = dimension;
    return e;
}

Expr Expr::constant(double v) {
    Expr e;
    e.root_ = make_num(v);
    e.dim_ = 0;
    return e;
}

Expr Expr::variable(std::size_t index, std::size_t dimension) {
    Expr e;
    e.root_ = make_var(index);
    e.dim_ = dimension;
    return e;
}

double Expr::eval(const std::vector<double>& x) const {
    if (!root_) throw EvaluationError("expression: empty");
    double v = eval_node(root_.get(), x);
    if (!std::isfinite(v)) throw EvaluationError("expression: evaluation is not finite");
    return v;
}

Expr Expr::derivative(std::size_t var) const {
    Expr e;
    e.root_ = diff_node(root_, var);
    e.dim_ = dim_;
    return e;
}

std::string Expr::to_string() const { return root_ ? str_node(root_.get()) : ""; }

}  // namespace af
