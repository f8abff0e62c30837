#include "stab/expr.hpp"

#include <cctype>
#include <cmath>
#include <utility>

namespace stab {

struct ExprNode {
    enum class Op {
        Const, VarX, VarW, Add, Sub, Mul, Div, Neg, Pow,
        Sin, Cos, Exp, Sqrt, Abs, ZGuard
    };
    Op op;
    Rat c;          // Const
    int index = 0;  // variable index (0-based) or Pow exponent
    ExprPtr a, b;
    int tb = 0, te = 0;  // span in the source text, for error messages
};

namespace {

// ---- tokenizer -------------------------------------------------------------

struct Token {
    enum class Kind { Num, Ident, Op, LParen, RParen, Comma, End };
    Kind kind;
    std::string text;
    char op = 0;
    int pos = 0;
};

[[noreturn]] void parse_fail(int col, const std::string& msg) {
    throw InputError("column " + std::to_string(col + 1) + ": " + msg);
}

std::vector<Token> tokenize(const std::string& s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        char ch = s[i];
        if (std::isspace(static_cast<unsigned char>(ch))) {
            ++i;
            continue;
        }
        int pos = (int)i;
        if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
            std::size_t j = i;
            bool dot = false;
            while (j < s.size() &&
                   (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.')) {
                if (s[j] == '.') {
                    if (dot) parse_fail(pos, "malformed number");
                    dot = true;
                }
                ++j;
            }
            if (j == i + 1 && dot) parse_fail(pos, "malformed number");
            out.push_back({Token::Kind::Num, s.substr(i, j - i), 0, pos});
            i = j;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
                ++j;
            out.push_back({Token::Kind::Ident, s.substr(i, j - i), 0, pos});
            i = j;
            continue;
        }
        switch (ch) {
            case '+': case '-': case '*': case '/': case '^':
                out.push_back({Token::Kind::Op, std::string(1, ch), ch, pos});
                break;
            case '(': out.push_back({Token::Kind::LParen, "(", 0, pos}); break;
            case ')': out.push_back({Token::Kind::RParen, ")", 0, pos}); break;
            case ',': out.push_back({Token::Kind::Comma, ",", 0, pos}); break;
            default: parse_fail(pos, std::string("unexpected character '") + ch + "'");
        }
        ++i;
    }
    out.push_back({Token::Kind::End, "", 0, (int)s.size()});
    return out;
}

// ---- parser ----------------------------------------------------------------

struct Parser {
    const std::string& src;
    std::vector<Token> toks;
    std::size_t at = 0;
    int n, s;

    const Token& peek() const { return toks[at]; }
    Token take() { return toks[at++]; }
    bool is_op(char c) const {
        return peek().kind == Token::Kind::Op && peek().op == c;
    }

    ExprPtr node(ExprNode nd, int tb, int te) {
        nd.tb = tb;
        nd.te = te;
        return std::make_shared<ExprNode>(std::move(nd));
    }

    ExprPtr parse_sum() {
        int tb = peek().pos;
        ExprPtr lhs = parse_term();
        while (is_op('+') || is_op('-')) {
            char c = take().op;
            ExprPtr rhs = parse_term();
            int te = rhs->te;
            ExprNode nd;
            nd.op = c == '+' ? ExprNode::Op::Add : ExprNode::Op::Sub;
            nd.a = lhs;
            nd.b = rhs;
            lhs = node(std::move(nd), tb, te);
        }
        return lhs;
    }

    ExprPtr parse_term() {
        int tb = peek().pos;
        ExprPtr lhs = parse_unary();
        while (is_op('*') || is_op('/')) {
            char c = take().op;
            ExprPtr rhs = parse_unary();
            int te = rhs->te;
            ExprNode nd;
            nd.op = c == '*' ? ExprNode::Op::Mul : ExprNode::Op::Div;
            nd.a = lhs;
            nd.b = rhs;
            lhs = node(std::move(nd), tb, te);
        }
        return lhs;
    }

    ExprPtr parse_unary() {
        if (is_op('-')) {
            int tb = take().pos;
            ExprPtr inner = parse_unary();
            ExprNode nd;
            nd.op = ExprNode::Op::Neg;
            nd.a = inner;
            return node(std::move(nd), tb, inner->te);
        }
        return parse_power();
    }

    ExprPtr parse_power() {
        ExprPtr base = parse_primary();
        if (!is_op('^')) return base;
        take();
        bool neg = false;
        if (is_op('-')) {
            take();
            neg = true;
        }
        if (peek().kind != Token::Kind::Num || peek().text.find('.') != std::string::npos)
            parse_fail(peek().pos, "exponent must be an integer literal");
        Token t = take();
        int e = 0;
        for (char c : t.text) {
            e = e * 10 + (c - '0');
            if (e > 64) parse_fail(t.pos, "exponent too large");
        }
        ExprNode nd;
        nd.op = ExprNode::Op::Pow;
        nd.a = base;
        nd.index = neg ? -e : e;
        return node(std::move(nd), base->tb, t.pos + (int)t.text.size());
    }

    ExprPtr parse_primary() {
        const Token& t = peek();
        if (t.kind == Token::Kind::Num) {
            Token num = take();
            ExprNode nd;
            nd.op = ExprNode::Op::Const;
            nd.c = parse_rat(num.text);
            return node(std::move(nd), num.pos, num.pos + (int)num.text.size());
        }
        if (t.kind == Token::Kind::LParen) {
            Token open = take();
            ExprPtr inner = parse_sum();
            if (peek().kind != Token::Kind::RParen)
                parse_fail(peek().pos, "expected ')'");
            Token close = take();
            // widen the span to the parentheses so error messages quote them
            ExprNode wrapped = *inner;
            wrapped.tb = open.pos;
            wrapped.te = close.pos + 1;
            return std::make_shared<ExprNode>(std::move(wrapped));
        }
        if (t.kind == Token::Kind::Ident) return parse_ident();
        parse_fail(t.pos, "expected a value");
    }

    ExprPtr parse_ident() {
        Token id = take();
        const std::string& w = id.text;
        int end = id.pos + (int)w.size();
        auto var_index = [&](const char* what, int count) {
            int v = 0;
            if (w.size() < 2) parse_fail(id.pos, std::string("unknown name '") + w + "'");
            for (std::size_t k = 1; k < w.size(); ++k) {
                if (!std::isdigit(static_cast<unsigned char>(w[k])))
                    parse_fail(id.pos, std::string("unknown name '") + w + "'");
                v = v * 10 + (w[k] - '0');
                if (v > 1000) break;
            }
            if (v < 1 || v > count)
                parse_fail(id.pos, std::string(what) + std::to_string(v) + " out of range");
            return v - 1;
        };
        if (w[0] == 'x' && w.size() > 1 && std::isdigit(static_cast<unsigned char>(w[1]))) {
            ExprNode nd;
            nd.op = ExprNode::Op::VarX;
            nd.index = var_index("variable x", n);
            return node(std::move(nd), id.pos, end);
        }
        if (w[0] == 'w' && w.size() > 1 && std::isdigit(static_cast<unsigned char>(w[1]))) {
            ExprNode nd;
            nd.op = ExprNode::Op::VarW;
            nd.index = var_index("parameter w", s);
            return node(std::move(nd), id.pos, end);
        }
        ExprNode::Op op;
        int arity = 1;
        if (w == "sin") op = ExprNode::Op::Sin;
        else if (w == "cos") op = ExprNode::Op::Cos;
        else if (w == "exp") op = ExprNode::Op::Exp;
        else if (w == "sqrt") op = ExprNode::Op::Sqrt;
        else if (w == "abs") op = ExprNode::Op::Abs;
        else if (w == "zguard") { op = ExprNode::Op::ZGuard; arity = 2; }
        else parse_fail(id.pos, std::string("unknown name '") + w + "'");
        if (peek().kind != Token::Kind::LParen)
            parse_fail(peek().pos, w + " needs parenthesized arguments");
        take();
        ExprNode nd;
        nd.op = op;
        nd.a = parse_sum();
        if (arity == 2) {
            if (peek().kind != Token::Kind::Comma)
                parse_fail(peek().pos, w + " needs two arguments");
            take();
            nd.b = parse_sum();
        }
        if (peek().kind != Token::Kind::RParen)
            parse_fail(peek().pos, "expected ')'");
        Token close = take();
        return node(std::move(nd), id.pos, close.pos + 1);
    }
};

// ---- evaluation ------------------------------------------------------------

template <class T>
T rat_cast(const Rat& r);

template <>
double rat_cast<double>(const Rat& r) {
    return to_double(r);
}

template <>
HighFloat rat_cast<HighFloat>(const Rat& r) {
    return HighFloat(boost::multiprecision::numerator(r)) /
           HighFloat(boost::multiprecision::denominator(r));
}

template <class T>
bool finite_val(const T& x) {
    using std::isfinite;
    return bool(isfinite(x));
}

std::string span_text(const std::string& text, const ExprNode& nd) {
    int b = nd.tb, e = nd.te;
    if (b < 0 || e <= b || e > (int)text.size()) return text;
    return text.substr(b, e - b);
}

[[noreturn]] void eval_fail(const std::string& msg, const std::string& text,
                            const ExprNode& nd) {
    throw EvalError(msg, span_text(text, nd));
}

// Plain value recursion, no derivative bookkeeping.
template <class T>
T eval_value(const ExprNode& nd, const std::vector<T>& x, const std::vector<T>& w,
             const std::string& text) {
    using std::abs;
    using std::cos;
    using std::exp;
    using std::sin;
    using std::sqrt;
    switch (nd.op) {
        case ExprNode::Op::Const: return rat_cast<T>(nd.c);
        case ExprNode::Op::VarX: return x[nd.index];
        case ExprNode::Op::VarW: return w[nd.index];
        case ExprNode::Op::Add:
            return eval_value(*nd.a, x, w, text) + eval_value(*nd.b, x, w, text);
        case ExprNode::Op::Sub:
            return eval_value(*nd.a, x, w, text) - eval_value(*nd.b, x, w, text);
        case ExprNode::Op::Mul:
            return eval_value(*nd.a, x, w, text) * eval_value(*nd.b, x, w, text);
        case ExprNode::Op::Div: {
            T num = eval_value(*nd.a, x, w, text);
            T den = eval_value(*nd.b, x, w, text);
            if (den == 0) eval_fail("division by zero", text, nd);
            return num / den;
        }
        case ExprNode::Op::Neg: return -eval_value(*nd.a, x, w, text);
        case ExprNode::Op::Pow: {
            T base = eval_value(*nd.a, x, w, text);
            int e = nd.index;
            if (e < 0) {
                if (base == 0) eval_fail("zero raised to a negative power", text, nd);
                base = T(1) / base;
                e = -e;
            }
            T acc(1);
            for (int i = 0; i < e; ++i) acc *= base;
            return acc;
        }
        case ExprNode::Op::Sin: return sin(eval_value(*nd.a, x, w, text));
        case ExprNode::Op::Cos: return cos(eval_value(*nd.a, x, w, text));
        case ExprNode::Op::Exp: return exp(eval_value(*nd.a, x, w, text));
        case ExprNode::Op::Sqrt: {
            T u = eval_value(*nd.a, x, w, text);
            if (u < 0) eval_fail("square root of a negative value", text, nd);
            return sqrt(u);
        }
        case ExprNode::Op::Abs: return abs(eval_value(*nd.a, x, w, text));
        case ExprNode::Op::ZGuard: {
            T t = eval_value(*nd.a, x, w, text);
            if (t == 0) return T(0);
            return eval_value(*nd.b, x, w, text);
        }
    }
    throw InternalError("eval_value: bad opcode");
}

template <class T>
D2<T> d2_zero(int n) {
    D2<T> r;
    r.v = T(0);
    r.g.assign(n, T(0));
    r.h.assign((std::size_t)n * n, T(0));
    return r;
}

template <class T>
D2<T> d2_binmul(const D2<T>& a, const D2<T>& b, int n) {
    D2<T> r = d2_zero<T>(n);
    r.v = a.v * b.v;
    for (int i = 0; i < n; ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            r.h[(std::size_t)i * n + j] = a.h[(std::size_t)i * n + j] * b.v +
                                          a.v * b.h[(std::size_t)i * n + j] +
                                          a.g[i] * b.g[j] + a.g[j] * b.g[i];
    return r;
}

// Chain rule for f(u) given f(u.v), f'(u.v), f''(u.v).
template <class T>
D2<T> d2_chain(const D2<T>& u, const T& fv, const T& d1, const T& d2v, int n) {
    D2<T> r = d2_zero<T>(n);
    r.v = fv;
    for (int i = 0; i < n; ++i) r.g[i] = d1 * u.g[i];
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            r.h[(std::size_t)i * n + j] =
                d1 * u.h[(std::size_t)i * n + j] + d2v * u.g[i] * u.g[j];
    return r;
}

template <class T>
D2<T> eval_d2(const ExprNode& nd, const std::vector<T>& x, const std::vector<T>& w,
              int n, const std::string& text) {
    using std::abs;
    using std::cos;
    using std::exp;
    using std::sin;
    using std::sqrt;
    switch (nd.op) {
        case ExprNode::Op::Const: {
            D2<T> r = d2_zero<T>(n);
            r.v = rat_cast<T>(nd.c);
            return r;
        }
        case ExprNode::Op::VarX: {
            D2<T> r = d2_zero<T>(n);
            r.v = x[nd.index];
            r.g[nd.index] = T(1);
            return r;
        }
        case ExprNode::Op::VarW: {
            D2<T> r = d2_zero<T>(n);
            r.v = w[nd.index];
            return r;
        }
        case ExprNode::Op::Add: {
            D2<T> a = eval_d2(*nd.a, x, w, n, text);
            D2<T> b = eval_d2(*nd.b, x, w, n, text);
            a.v += b.v;
            for (int i = 0; i < n; ++i) a.g[i] += b.g[i];
            for (std::size_t i = 0; i < a.h.size(); ++i) a.h[i] += b.h[i];
            return a;
        }
        case ExprNode::Op::Sub: {
            D2<T> a = eval_d2(*nd.a, x, w, n, text);
            D2<T> b = eval_d2(*nd.b, x, w, n, text);
            a.v -= b.v;
            for (int i = 0; i < n; ++i) a.g[i] -= b.g[i];
            for (std::size_t i = 0; i < a.h.size(); ++i) a.h[i] -= b.h[i];
            return a;
        }
        case ExprNode::Op::Mul:
            return d2_binmul(eval_d2(*nd.a, x, w, n, text),
                             eval_d2(*nd.b, x, w, n, text), n);
        case ExprNode::Op::Div: {
            D2<T> a = eval_d2(*nd.a, x, w, n, text);
            D2<T> b = eval_d2(*nd.b, x, w, n, text);
            if (b.v == 0) eval_fail("division by zero", text, nd);
            T iv = T(1) / b.v;
            D2<T> inv = d2_chain(b, iv, -iv * iv, T(2) * iv * iv * iv, n);
            return d2_binmul(a, inv, n);
        }
        case ExprNode::Op::Neg: {
            D2<T> a = eval_d2(*nd.a, x, w, n, text);
            a.v = -a.v;
            for (int i = 0; i < n; ++i) a.g[i] = -a.g[i];
            for (std::size_t i = 0; i < a.h.size(); ++i) a.h[i] = -a.h[i];
            return a;
        }
        case ExprNode::Op::Pow: {
            D2<T> base = eval_d2(*nd.a, x, w, n, text);
            int e = nd.index;
            if (e < 0) {
                if (base.v == 0) eval_fail("zero raised to a negative power", text, nd);
                T iv = T(1) / base.v;
                base = d2_chain(base, iv, -iv * iv, T(2) * iv * iv * iv, n);
                e = -e;
            }
            D2<T> acc = d2_zero<T>(n);
            acc.v = T(1);
            for (int i = 0; i < e; ++i) acc = d2_binmul(acc, base, n);
            return acc;
        }
        case ExprNode::Op::Sin: {
            D2<T> u = eval_d2(*nd.a, x, w, n, text);
            T sv = sin(u.v), cv = cos(u.v);
            return d2_chain(u, sv, cv, -sv, n);
        }
        case ExprNode::Op::Cos: {
            D2<T> u = eval_d2(*nd.a, x, w, n, text);
            T sv = sin(u.v), cv = cos(u.v);
            return d2_chain(u, cv, -sv, -cv, n);
        }
        case ExprNode::Op::Exp: {
            D2<T> u = eval_d2(*nd.a, x, w, n, text);
            T ev = exp(u.v);
            return d2_chain(u, ev, ev, ev, n);
        }
        case ExprNode::Op::Sqrt: {
            D2<T> u = eval_d2(*nd.a, x, w, n, text);
            if (u.v <= 0) eval_fail("square root differentiated at or below zero", text, nd);
            T rv = sqrt(u.v);
            T d1 = T(1) / (T(2) * rv);
            T d2v = -d1 / (T(2) * u.v);
            return d2_chain(u, rv, d1, d2v, n);
        }
        case ExprNode::Op::Abs: {
            D2<T> u = eval_d2(*nd.a, x, w, n, text);
            T sgn = u.v > 0 ? T(1) : (u.v < 0 ? T(-1) : T(0));
            return d2_chain(u, abs(u.v), sgn, T(0), n);
        }
        case ExprNode::Op::ZGuard: {
            T t = eval_value(*nd.a, x, w, text);
            if (t == 0) return d2_zero<T>(n);
            return eval_d2(*nd.b, x, w, n, text);
        }
    }
    throw InternalError("eval_d2: bad opcode");
}

template <class T>
void check_finite_value(const T& v, const Expr& e) {
    if (!finite_val(v)) throw EvalError("non-finite result", e.text);
}

template <class T>
void check_finite_d2(const D2<T>& r, const Expr& e) {
    check_finite_value(r.v, e);
    for (const T& t : r.g) check_finite_value(t, e);
    for (const T& t : r.h) check_finite_value(t, e);
}

}  // namespace

Expr parse_expr(const std::string& text, int n, int s) {
    Parser p{text, tokenize(text), 0, n, s};
    ExprPtr root = p.parse_sum();
    if (p.peek().kind != Token::Kind::End)
        parse_fail(p.peek().pos, "unexpected trailing input");
    Expr e;
    e.root = root;
    e.text = text;
    e.n = n;
    e.s = s;
    return e;
}

double Expr::value(const std::vector<double>& x, const std::vector<double>& w) const {
    if (!root) throw InternalError("evaluating an empty expression");
    double v = eval_value<double>(*root, x, w, text);
    check_finite_value(v, *this);
    return v;
}

D2d Expr::eval2(const std::vector<double>& x, const std::vector<double>& w) const {
    if (!root) throw InternalError("evaluating an empty expression");
    D2d r = eval_d2<double>(*root, x, w, n, text);
    check_finite_d2(r, *this);
    return r;
}

HighFloat Expr::value_hp(const std::vector<HighFloat>& x,
                         const std::vector<HighFloat>& w) const {
    if (!root) throw InternalError("evaluating an empty expression");
    HighFloat v = eval_value<HighFloat>(*root, x, w, text);
    check_finite_value(v, *this);
    return v;
}

D2hp Expr::eval2_hp(const std::vector<HighFloat>& x,
                    const std::vector<HighFloat>& w) const {
    if (!root) throw InternalError("evaluating an empty expression");
    D2hp r = eval_d2<HighFloat>(*root, x, w, n, text);
    check_finite_d2(r, *this);
    return r;
}

}  // namespace stab
