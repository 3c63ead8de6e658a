#include "ctw/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

namespace ctw {

ParseError::ParseError(std::string message, std::size_t position, std::vector<std::string> expected)
    : ConfigError(std::move(message)), position_(position), expected_(std::move(expected)) {}

DomainFault::DomainFault(std::string message, std::string subexpression)
    : NumericalError(message + " in '" + subexpression + "'"), subexpr_(std::move(subexpression)) {}

Bindings::Bindings(std::initializer_list<std::pair<std::string_view, double>> items) {
    for (const auto& [name, x] : items) {
        if (name == "u")
            set(Var::U, x);
        else if (name == "v")
            set(Var::V, x);
        else
            throw UnboundVariable("unknown variable '" + std::string(name) + "' in bindings");
    }
}

Bindings Bindings::uv(double u, double v) {
    Bindings b;
    b.set(Var::U, u).set(Var::V, v);
    return b;
}

Bindings& Bindings::set(Var var, double x) {
    value[static_cast<int>(var)] = x;
    bound[static_cast<int>(var)] = true;
    return *this;
}

namespace detail {

enum class Kind { Num, Var, Neg, Add, Sub, Mul, Div, Pow, Func };
enum class Fn { Sin, Cos, Tan, Exp, Ln, Sqrt, Abs };

struct Node {
    Kind kind;
    double num = 0.0;
    int var = 0;
    Fn fn = Fn::Sin;
    std::shared_ptr<const Node> a, b;
};

using NodePtr = std::shared_ptr<const Node>;

struct Instr {
    Kind kind;
    double num;
    int var;
    Fn fn;
    const Node* node;
};

struct Program {
    std::vector<Instr> code;
    std::size_t depth = 0;
};

namespace {

const char* fn_name(Fn f) {
    switch (f) {
        case Fn::Sin: return "sin";
        case Fn::Cos: return "cos";
        case Fn::Tan: return "tan";
        case Fn::Exp: return "exp";
        case Fn::Ln: return "ln";
        case Fn::Sqrt: return "sqrt";
        case Fn::Abs: return "abs";
    }
    return "?";
}

std::string format_number(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

void print(const Node& n, std::string& out) {
    switch (n.kind) {
        case Kind::Num: out += format_number(n.num); return;
        case Kind::Var: out += n.var == 0 ? "u" : "v"; return;
        case Kind::Neg:
            out += "(-";
            print(*n.a, out);
            out += ")";
            return;
        case Kind::Func:
            out += fn_name(n.fn);
            out += "(";
            print(*n.a, out);
            out += ")";
            return;
        default: break;
    }
    const char* op = n.kind == Kind::Add ? "+" : n.kind == Kind::Sub ? "-" : n.kind == Kind::Mul ? "*" : n.kind == Kind::Div ? "/" : "^";
    out += "(";
    print(*n.a, out);
    out += op;
    print(*n.b, out);
    out += ")";
}

std::string node_text(const Node* n) {
    std::string s;
    print(*n, s);
    return s;
}

std::size_t emit(const Node& n, Program& p) {
    std::size_t d = 0;
    switch (n.kind) {
        case Kind::Num:
        case Kind::Var: d = 1; break;
        case Kind::Neg:
        case Kind::Func: d = emit(*n.a, p); break;
        default: {
            std::size_t da = emit(*n.a, p);
            std::size_t db = emit(*n.b, p);
            d = std::max(da, db + 1);
        }
    }
    p.code.push_back(Instr{n.kind, n.num, n.var, n.fn, &n});
    return d;
}

// ---- tokenizer / parser ----

enum class Tok { Num, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
    Tok type;
    std::size_t pos;
    std::string text;
    double num = 0.0;
};

const std::vector<std::string> kOperand = {"number", "identifier", "(", "-"};
const std::vector<std::string> kAfterOperand = {"+", "-", "*", "/", "^", ")", "end of input"};

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) { advance(); }

    NodePtr parse_all() {
        NodePtr e = parse_sum();
        if (tok_.type == Tok::RParen && depth_ == 0)
            fail("unbalanced ')'", {"+", "-", "*", "/", "^", "end of input"});
        if (tok_.type != Tok::End) fail("unexpected " + describe(tok_), kAfterOperand);
        return e;
    }

private:
    std::string_view src_;
    std::size_t at_ = 0;
    Token tok_{Tok::End, 0, {}};
    int depth_ = 0;

    static std::string describe(const Token& t) {
        switch (t.type) {
            case Tok::End: return "end of input";
            case Tok::Num: return "number '" + t.text + "'";
            case Tok::Ident: return "identifier '" + t.text + "'";
            default: return "'" + t.text + "'";
        }
    }

    [[noreturn]] void fail(const std::string& what, const std::vector<std::string>& expected) const {
        std::ostringstream os;
        os << "syntax error at position " << tok_.pos << ": " << what << "; expected one of {";
        for (std::size_t i = 0; i < expected.size(); ++i) os << (i ? ", " : "") << expected[i];
        os << "}";
        throw ParseError(os.str(), tok_.pos, expected);
    }

    void advance() {
        while (at_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[at_]))) ++at_;
        tok_ = Token{Tok::End, at_, {}};
        if (at_ >= src_.size()) return;
        char c = src_[at_];
        auto isdig = [](char ch) { return ch >= '0' && ch <= '9'; };
        if (isdig(c) || (c == '.' && at_ + 1 < src_.size() && isdig(src_[at_ + 1]))) {
            std::size_t s = at_;
            while (at_ < src_.size() && isdig(src_[at_])) ++at_;
            if (at_ < src_.size() && src_[at_] == '.') {
                ++at_;
                while (at_ < src_.size() && isdig(src_[at_])) ++at_;
            }
            if (at_ < src_.size() && (src_[at_] == 'e' || src_[at_] == 'E')) {
                std::size_t k = at_ + 1;
                if (k < src_.size() && (src_[k] == '+' || src_[k] == '-')) ++k;
                if (k < src_.size() && isdig(src_[k])) {
                    at_ = k;
                    while (at_ < src_.size() && isdig(src_[at_])) ++at_;
                }
            }
            tok_.type = Tok::Num;
            tok_.text = std::string(src_.substr(s, at_ - s));
            std::from_chars(tok_.text.data(), tok_.text.data() + tok_.text.size(), tok_.num);
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t s = at_;
            while (at_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[at_])) || src_[at_] == '_')) ++at_;
            tok_.type = Tok::Ident;
            tok_.text = std::string(src_.substr(s, at_ - s));
            return;
        }
        tok_.text = std::string(1, c);
        ++at_;
        switch (c) {
            case '+': tok_.type = Tok::Plus; return;
            case '-': tok_.type = Tok::Minus; return;
            case '*': tok_.type = Tok::Star; return;
            case '/': tok_.type = Tok::Slash; return;
            case '^': tok_.type = Tok::Caret; return;
            case '(': tok_.type = Tok::LParen; return;
            case ')': tok_.type = Tok::RParen; return;
            default: break;
        }
        --at_;
        tok_.pos = at_;
        fail("invalid character '" + tok_.text + "'", kOperand);
    }

    static NodePtr binary(Kind k, NodePtr a, NodePtr b) {
        auto n = std::make_shared<Node>();
        n->kind = k;
        n->a = std::move(a);
        n->b = std::move(b);
        return n;
    }

    NodePtr parse_sum() {
        NodePtr lhs = parse_product();
        while (tok_.type == Tok::Plus || tok_.type == Tok::Minus) {
            Kind k = tok_.type == Tok::Plus ? Kind::Add : Kind::Sub;
            advance();
            lhs = binary(k, lhs, parse_product());
        }
        return lhs;
    }

    NodePtr parse_product() {
        NodePtr lhs = parse_unary();
        while (tok_.type == Tok::Star || tok_.type == Tok::Slash) {
            Kind k = tok_.type == Tok::Star ? Kind::Mul : Kind::Div;
            advance();
            lhs = binary(k, lhs, parse_unary());
        }
        return lhs;
    }

    NodePtr parse_unary() {
        if (tok_.type == Tok::Minus) {
            advance();
            auto n = std::make_shared<Node>();
            n->kind = Kind::Neg;
            n->a = parse_unary();
            return n;
        }
        if (tok_.type == Tok::Plus) fail("unexpected '+'", kOperand);
        return parse_power();
    }

    // base ^ exponent, right associative; the exponent may carry a unary minus.
    NodePtr parse_power() {
        NodePtr base = parse_primary();
        if (tok_.type == Tok::Caret) {
            advance();
            return binary(Kind::Pow, base, parse_unary());
        }
        return base;
    }

    NodePtr parse_primary() {
        auto n = std::make_shared<Node>();
        switch (tok_.type) {
            case Tok::Num:
                n->kind = Kind::Num;
                n->num = tok_.num;
                advance();
                break;
            case Tok::LParen: {
                advance();
                ++depth_;
                NodePtr inner = parse_sum();
                if (tok_.type != Tok::RParen) fail("unexpected " + describe(tok_), {"+", "-", "*", "/", "^", ")"});
                --depth_;
                advance();
                return inner;
            }
            case Tok::Ident: {
                const std::string name = tok_.text;
                const std::size_t pos = tok_.pos;
                if (name == "u" || name == "v") {
                    n->kind = Kind::Var;
                    n->var = name == "u" ? 0 : 1;
                    advance();
                    break;
                }
                if (name == "pi" || name == "e") {
                    n->kind = Kind::Num;
                    n->num = name == "pi" ? M_PI : M_E;
                    advance();
                    break;
                }
                static const std::pair<const char*, Fn> table[] = {{"sin", Fn::Sin}, {"cos", Fn::Cos}, {"tan", Fn::Tan}, {"exp", Fn::Exp},
                                                                   {"ln", Fn::Ln},   {"sqrt", Fn::Sqrt}, {"abs", Fn::Abs}};
                for (const auto& [fname, fn] : table) {
                    if (name == fname) {
                        advance();
                        if (tok_.type != Tok::LParen) fail("function '" + name + "' requires '('", {"("});
                        advance();
                        ++depth_;
                        n->kind = Kind::Func;
                        n->fn = fn;
                        n->a = parse_sum();
                        if (tok_.type != Tok::RParen) fail("unexpected " + describe(tok_), {"+", "-", "*", "/", "^", ")"});
                        --depth_;
                        advance();
                        return n;
                    }
                }
                throw ParseError("unknown identifier '" + name + "' at position " + std::to_string(pos), pos,
                                 {"u", "v", "pi", "e", "sin", "cos", "tan", "exp", "ln", "sqrt", "abs"});
            }
            default:
                fail("unexpected " + describe(tok_), kOperand);
        }
        return n;
    }
};

inline bool is_integer(double y) { return std::isfinite(y) && y == std::nearbyint(y); }

}  // namespace

}  // namespace detail

using detail::Fn;
using detail::Kind;

namespace {

std::shared_ptr<const detail::Program> compile(const detail::Node& root) {
    auto p = std::make_shared<detail::Program>();
    p->depth = detail::emit(root, *p);
    return p;
}

[[noreturn]] void fault(const char* what, const detail::Node* n) { throw DomainFault(what, detail::node_text(n)); }

inline double checked(double r, const detail::Node* n) {
    if (!std::isfinite(r)) fault("non-finite result", n);
    return r;
}

double apply_fn(Fn f, double x, const detail::Node* n) {
    switch (f) {
        case Fn::Sin: return std::sin(x);
        case Fn::Cos: return std::cos(x);
        case Fn::Tan: return checked(std::tan(x), n);
        case Fn::Exp: return checked(std::exp(x), n);
        case Fn::Ln:
            if (!(x > 0.0)) fault("ln of nonpositive argument", n);
            return std::log(x);
        case Fn::Sqrt:
            if (x < 0.0) fault("sqrt of negative argument", n);
            return std::sqrt(x);
        case Fn::Abs: return std::fabs(x);
    }
    return 0.0;
}

double apply_pow(double x, double y, const detail::Node* n) {
    if (x < 0.0 && !detail::is_integer(y)) fault("negative base with non-integer exponent", n);
    if (x == 0.0 && y < 0.0) fault("division by zero", n);
    return checked(std::pow(x, y), n);
}

void check_vars(const detail::Program& p, const Bindings& b) {
    for (const auto& ins : p.code)
        if (ins.kind == Kind::Var && !b.bound[ins.var])
            throw UnboundVariable(std::string("unbound variable '") + (ins.var == 0 ? "u" : "v") + "'");
}

}  // namespace

Expr::Expr() {
    auto n = std::make_shared<detail::Node>();
    n->kind = Kind::Num;
    root_ = n;
    program_ = compile(*n);
    source_ = "0";
}

Expr parse(std::string_view source) {
    detail::Parser p(source);
    Expr e;
    e.root_ = p.parse_all();
    e.program_ = compile(*e.root_);
    e.source_ = std::string(source);
    return e;
}

double Expr::eval(const Bindings& b) const {
    const auto& code = program_->code;
    double local[64] = {};
    std::vector<double> heap;
    double* st = local;
    if (program_->depth > 64) {
        heap.resize(program_->depth);
        st = heap.data();
    }
    std::size_t sp = 0;
    for (const auto& ins : code) {
        switch (ins.kind) {
            case Kind::Num: st[sp++] = ins.num; break;
            case Kind::Var:
                if (!b.bound[ins.var]) check_vars(*program_, b);
                st[sp++] = b.value[ins.var];
                break;
            case Kind::Neg: st[sp - 1] = -st[sp - 1]; break;
            case Kind::Func: st[sp - 1] = apply_fn(ins.fn, st[sp - 1], ins.node); break;
            case Kind::Add: --sp; st[sp - 1] = checked(st[sp - 1] + st[sp], ins.node); break;
            case Kind::Sub: --sp; st[sp - 1] = checked(st[sp - 1] - st[sp], ins.node); break;
            case Kind::Mul: --sp; st[sp - 1] = checked(st[sp - 1] * st[sp], ins.node); break;
            case Kind::Div:
                --sp;
                if (st[sp] == 0.0) fault("division by zero", ins.node);
                st[sp - 1] = checked(st[sp - 1] / st[sp], ins.node);
                break;
            case Kind::Pow: --sp; st[sp - 1] = apply_pow(st[sp - 1], st[sp], ins.node); break;
        }
    }
    return st[0];
}

Dual Expr::eval_dual(const Bindings& b, Var seed) const {
    check_vars(*program_, b);
    std::vector<Dual> st;
    st.reserve(program_->depth);
    const int s = static_cast<int>(seed);
    for (const auto& ins : program_->code) {
        switch (ins.kind) {
            case Kind::Num: st.push_back({ins.num, 0.0}); break;
            case Kind::Var: st.push_back({b.value[ins.var], ins.var == s ? 1.0 : 0.0}); break;
            case Kind::Neg: st.back() = {-st.back().value, -st.back().derivative}; break;
            case Kind::Func: {
                Dual x = st.back();
                double val = apply_fn(ins.fn, x.value, ins.node);
                double dfdx = 0.0;
                switch (ins.fn) {
                    case Fn::Sin: dfdx = std::cos(x.value); break;
                    case Fn::Cos: dfdx = -std::sin(x.value); break;
                    case Fn::Tan: dfdx = 1.0 + val * val; break;
                    case Fn::Exp: dfdx = val; break;
                    case Fn::Ln: dfdx = 1.0 / x.value; break;
                    case Fn::Sqrt:
                        if (val == 0.0 && x.derivative != 0.0) fault("sqrt derivative at zero", ins.node);
                        dfdx = val == 0.0 ? 0.0 : 0.5 / val;
                        break;
                    case Fn::Abs: dfdx = x.value > 0.0 ? 1.0 : (x.value < 0.0 ? -1.0 : 0.0); break;
                }
                st.back() = {val, checked(dfdx * x.derivative, ins.node)};
                break;
            }
            default: {
                Dual y = st.back();
                st.pop_back();
                Dual x = st.back();
                Dual r{};
                switch (ins.kind) {
                    case Kind::Add: r = {x.value + y.value, x.derivative + y.derivative}; break;
                    case Kind::Sub: r = {x.value - y.value, x.derivative - y.derivative}; break;
                    case Kind::Mul: r = {x.value * y.value, x.derivative * y.value + x.value * y.derivative}; break;
                    case Kind::Div:
                        if (y.value == 0.0) fault("division by zero", ins.node);
                        r.value = x.value / y.value;
                        r.derivative = (x.derivative - r.value * y.derivative) / y.value;
                        break;
                    case Kind::Pow: {
                        r.value = apply_pow(x.value, y.value, ins.node);
                        double d = 0.0;
                        if (x.derivative != 0.0) {
                            if (y.value == 0.0)
                                d = 0.0;
                            else
                                d += y.value * apply_pow(x.value, y.value - 1.0, ins.node) * x.derivative;
                        }
                        if (y.derivative != 0.0) {
                            if (!(x.value > 0.0)) fault("derivative of power with nonpositive base", ins.node);
                            d += r.value * std::log(x.value) * y.derivative;
                        }
                        r.derivative = d;
                        break;
                    }
                    default: break;
                }
                r.value = checked(r.value, ins.node);
                r.derivative = checked(r.derivative, ins.node);
                st.back() = r;
            }
        }
    }
    return st.back();
}

std::set<std::string> Expr::free_vars() const {
    std::set<std::string> out;
    for (const auto& ins : program_->code)
        if (ins.kind == Kind::Var) out.insert(ins.var == 0 ? "u" : "v");
    return out;
}

bool Expr::depends_on(Var var) const {
    for (const auto& ins : program_->code)
        if (ins.kind == Kind::Var && ins.var == static_cast<int>(var)) return true;
    return false;
}

std::string Expr::to_string() const { return detail::node_text(root_.get()); }

}  // namespace ctw
