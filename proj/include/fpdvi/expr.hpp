// Arithmetic expressions over the time variable `xi` and state components
// `theta_1 .. theta_n`, used by the JSON problem format for map entries that
// are not plain constants.  Deliberately tiny: +, -, *, /, ^ (right
// associative), unary minus, parentheses, numeric literals, and the
// functions exp, sin, cos, abs, sqrt, pow(a, b).  Parsed once into an AST;
// evaluation is allocation-free.

#pragma once

#include <cctype>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fpdvi/errors.hpp"

namespace fpdvi {

class Expression {
public:
    /// Parse `text` against a state of dimension `state_dimension`
    /// (controls which theta_k are in scope).  Throws ParseError on any
    /// syntax problem or unknown identifier, with the offending position.
    static Expression parse(const std::string& text, int state_dimension) {
        if (state_dimension < 0)
            throw InvalidOrder("expression: state dimension must be >= 0");
        Expression e;
        e.text_ = text;
        Parser p{text, state_dimension, e.nodes_};
        const int root = p.parse_expr();
        p.skip_space();
        if (p.pos != text.size())
            throw ParseError("unexpected trailing input at position " +
                             std::to_string(p.pos) + " in '" + text + "'");
        e.root_ = root;
        return e;
    }

    double operator()(double xi, const Eigen::VectorXd& theta) const {
        return eval(root_, xi, theta);
    }

    const std::string& text() const { return text_; }

private:
    enum class Op {
        constant, var_xi, var_theta,
        add, sub, mul, div, pow,
        neg, fn_exp, fn_sin, fn_cos, fn_abs, fn_sqrt,
    };
    struct Node {
        Op op;
        int a = -1, b = -1; // child indices
        double value = 0.0; // constant
        int index = 0;      // theta component (0-based)
    };

    std::string text_;
    std::vector<Node> nodes_;
    int root_ = -1;

    double eval(int id, double xi, const Eigen::VectorXd& theta) const {
        const Node& n = nodes_[static_cast<std::size_t>(id)];
        switch (n.op) {
        case Op::constant: return n.value;
        case Op::var_xi: return xi;
        case Op::var_theta:
            if (n.index >= theta.size())
                throw DimensionMismatch("expression refers to theta_" +
                                        std::to_string(n.index + 1) +
                                        " but the state has " +
                                        std::to_string(theta.size()) +
                                        " components");
            return theta(n.index);
        case Op::add: return eval(n.a, xi, theta) + eval(n.b, xi, theta);
        case Op::sub: return eval(n.a, xi, theta) - eval(n.b, xi, theta);
        case Op::mul: return eval(n.a, xi, theta) * eval(n.b, xi, theta);
        case Op::div: return eval(n.a, xi, theta) / eval(n.b, xi, theta);
        case Op::pow: return std::pow(eval(n.a, xi, theta), eval(n.b, xi, theta));
        case Op::neg: return -eval(n.a, xi, theta);
        case Op::fn_exp: return std::exp(eval(n.a, xi, theta));
        case Op::fn_sin: return std::sin(eval(n.a, xi, theta));
        case Op::fn_cos: return std::cos(eval(n.a, xi, theta));
        case Op::fn_abs: return std::abs(eval(n.a, xi, theta));
        case Op::fn_sqrt: return std::sqrt(eval(n.a, xi, theta));
        }
        throw UnsupportedVariant("unknown expression node");
    }

    struct Parser {
        const std::string& s;
        int dim;
        std::vector<Node>& nodes;
        std::size_t pos = 0;

        void skip_space() {
            while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
                ++pos;
        }
        bool eat(char c) {
            skip_space();
            if (pos < s.size() && s[pos] == c) {
                ++pos;
                return true;
            }
            return false;
        }
        [[noreturn]] void fail(const std::string& what) {
            throw ParseError(what + " at position " + std::to_string(pos) +
                             " in '" + s + "'");
        }
        int push(Node n) {
            nodes.push_back(n);
            return static_cast<int>(nodes.size()) - 1;
        }

        int parse_expr() {
            int lhs = parse_term();
            for (;;) {
                if (eat('+'))
                    lhs = push({Op::add, lhs, parse_term()});
                else if (eat('-'))
                    lhs = push({Op::sub, lhs, parse_term()});
                else
                    return lhs;
            }
        }
        int parse_term() {
            int lhs = parse_unary();
            for (;;) {
                if (eat('*'))
                    lhs = push({Op::mul, lhs, parse_unary()});
                else if (eat('/'))
                    lhs = push({Op::div, lhs, parse_unary()});
                else
                    return lhs;
            }
        }
        int parse_unary() {
            if (eat('-')) return push({Op::neg, parse_unary()});
            if (eat('+')) return parse_unary();
            return parse_power();
        }
        int parse_power() {
            const int base = parse_primary();
            if (eat('^')) // right associative: 2^3^2 == 2^(3^2)
                return push({Op::pow, base, parse_unary()});
            return base;
        }
        int parse_primary() {
            skip_space();
            if (pos >= s.size()) fail("unexpected end of expression");
            const char c = s[pos];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
                return parse_number();
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
                return parse_identifier();
            if (eat('(')) {
                const int inner = parse_expr();
                if (!eat(')')) fail("expected ')'");
                return inner;
            }
            fail(std::string("unexpected character '") + c + "'");
        }
        int parse_number() {
            const std::size_t start = pos;
            std::size_t consumed = 0;
            double value = 0.0;
            try {
                value = std::stod(s.substr(start), &consumed);
            } catch (const std::exception&) {
                fail("malformed number");
            }
            pos = start + consumed;
            Node n{Op::constant};
            n.value = value;
            return push(n);
        }
        int parse_identifier() {
            const std::size_t start = pos;
            while (pos < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[pos])) ||
                    s[pos] == '_'))
                ++pos;
            const std::string name = s.substr(start, pos - start);
            if (name == "xi") return push({Op::var_xi});
            if (name.rfind("theta_", 0) == 0) {
                int index = 0;
                try {
                    index = std::stoi(name.substr(6));
                } catch (const std::exception&) {
                    fail("malformed state variable '" + name + "'");
                }
                if (index < 1 || index > dim)
                    fail("state variable '" + name + "' is out of range for " +
                         std::to_string(dim) + " components");
                Node n{Op::var_theta};
                n.index = index - 1;
                return push(n);
            }
            if (!eat('(')) fail("unknown identifier '" + name + "'");
            const int arg = parse_expr();
            if (name == "pow") {
                if (!eat(',')) fail("pow expects two arguments");
                const int arg2 = parse_expr();
                if (!eat(')')) fail("expected ')'");
                return push({Op::pow, arg, arg2});
            }
            if (!eat(')')) fail("expected ')'");
            if (name == "exp") return push({Op::fn_exp, arg});
            if (name == "sin") return push({Op::fn_sin, arg});
            if (name == "cos") return push({Op::fn_cos, arg});
            if (name == "abs") return push({Op::fn_abs, arg});
            if (name == "sqrt") return push({Op::fn_sqrt, arg});
            fail("unknown function '" + name + "'");
        }
    };
};

} // namespace fpdvi
