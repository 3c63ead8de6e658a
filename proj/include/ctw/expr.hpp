#pragma once

// Small expression language for the model coefficients f1, f2, g, D1.
// Variables are u and v; constants pi and e; functions sin cos tan exp ln sqrt abs.

#include <cstddef>
#include <initializer_list>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ctw/error.hpp"

namespace ctw {

class ParseError : public ConfigError {
public:
    ParseError(std::string message, std::size_t position, std::vector<std::string> expected);
    std::size_t position() const { return position_; }
    const std::vector<std::string>& expected() const { return expected_; }

private:
    std::size_t position_;
    std::vector<std::string> expected_;
};

class DomainFault : public NumericalError {
public:
    DomainFault(std::string message, std::string subexpression);
    const std::string& subexpression() const { return subexpr_; }

private:
    std::string subexpr_;
};

class UnboundVariable : public ConfigError {
public:
    using ConfigError::ConfigError;
};

enum class Var { U = 0, V = 1 };

struct Bindings {
    double value[2] = {0.0, 0.0};
    bool bound[2] = {false, false};

    Bindings() = default;
    Bindings(std::initializer_list<std::pair<std::string_view, double>> items);
    static Bindings uv(double u, double v);
    Bindings& set(Var var, double x);
};

struct Dual {
    double value;
    double derivative;
};

namespace detail {
struct Node;
struct Program;
}  // namespace detail

class Expr {
public:
    Expr();  // constant zero

    double eval(const Bindings& b) const;
    Dual eval_dual(const Bindings& b, Var seed) const;
    std::set<std::string> free_vars() const;
    bool depends_on(Var var) const;
    // Fully parenthesized form that reparses to the same tree.
    std::string to_string() const;
    const std::string& source() const { return source_; }

    friend Expr parse(std::string_view source);

private:
    std::shared_ptr<const detail::Node> root_;
    std::shared_ptr<const detail::Program> program_;
    std::string source_;
};

Expr parse(std::string_view source);

inline double eval(const Expr& e, const Bindings& b) { return e.eval(b); }
inline Dual eval_dual(const Expr& e, const Bindings& b, Var seed) { return e.eval_dual(b, seed); }

}  // namespace ctw
