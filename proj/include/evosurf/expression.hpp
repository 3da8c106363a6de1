// SPDX-FileCopyrightText: Copyright (c) 2026 The evosurf-ch Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EVOSURF_EXPRESSION_HPP
#define EVOSURF_EXPRESSION_HPP

#include <cctype>
#include <cmath>
#include <functional>
#include <memory>
#include <string>

#include "evosurf/core.hpp"

namespace evosurf {

/// Minimal arithmetic over the coordinates x, y, z:
///   expr   := term  (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := ('+'|'-') factor | power
///   power  := primary ('^' factor)?
///   primary:= number | 'x'|'y'|'z' | func '(' expr ')' | '(' expr ')'
/// with func in {sin, cos, tan, exp, log, sqrt, tanh, abs}.
class Expression {
public:
  static Expression parse(const std::string& text) {
    Parser parser{text, 0};
    Expression e;
    e.root_ = parser.parse_expr();
    parser.skip_ws();
    if (parser.pos != text.size())
      throw ConfigError("expression: unexpected character '" + std::string(1, text[parser.pos]) +
                        "' at position " + std::to_string(parser.pos));
    return e;
  }

  double operator()(const Vec3& p) const { return root_->eval(p); }

private:
  struct Node {
    virtual ~Node() = default;
    virtual double eval(const Vec3&) const = 0;
  };
  using NodePtr = std::shared_ptr<const Node>;

  struct Constant : Node {
    double v;
    explicit Constant(double v_) : v(v_) {}
    double eval(const Vec3&) const override { return v; }
  };
  struct Coordinate : Node {
    int axis;
    explicit Coordinate(int a) : axis(a) {}
    double eval(const Vec3& p) const override { return p[axis]; }
  };
  struct Unary : Node {
    std::function<double(double)> fn;
    NodePtr arg;
    double eval(const Vec3& p) const override { return fn(arg->eval(p)); }
  };
  struct Binary : Node {
    char op;
    NodePtr lhs, rhs;
    double eval(const Vec3& p) const override {
      const double a = lhs->eval(p), b = rhs->eval(p);
      switch (op) {
        case '+': return a + b;
        case '-': return a - b;
        case '*': return a * b;
        case '/': return a / b;
        case '^': return std::pow(a, b);
      }
      return 0.0;
    }
  };

  struct Parser {
    const std::string& text;
    std::size_t pos;

    void skip_ws() {
      while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool accept(char c) {
      skip_ws();
      if (pos < text.size() && text[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }
    [[noreturn]] void fail(const std::string& msg) const {
      throw ConfigError("expression: " + msg + " at position " + std::to_string(pos));
    }

    NodePtr parse_expr() {
      NodePtr lhs = parse_term();
      for (;;) {
        if (accept('+')) lhs = binary('+', lhs, parse_term());
        else if (accept('-')) lhs = binary('-', lhs, parse_term());
        else return lhs;
      }
    }
    NodePtr parse_term() {
      NodePtr lhs = parse_factor();
      for (;;) {
        if (accept('*')) lhs = binary('*', lhs, parse_factor());
        else if (accept('/')) lhs = binary('/', lhs, parse_factor());
        else return lhs;
      }
    }
    NodePtr parse_factor() {
      if (accept('-')) {
        auto node = std::make_shared<Unary>();
        node->fn = [](double v) { return -v; };
        node->arg = parse_factor();
        return node;
      }
      if (accept('+')) return parse_factor();
      NodePtr base = parse_primary();
      if (accept('^')) return binary('^', base, parse_factor());
      return base;
    }
    NodePtr parse_primary() {
      skip_ws();
      if (pos >= text.size()) fail("unexpected end of input");
      const char c = text[pos];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        std::size_t used = 0;
        double v;
        try {
          v = std::stod(text.substr(pos), &used);
        } catch (...) {
          fail("malformed number");
        }
        pos += used;
        return std::make_shared<Constant>(v);
      }
      if (c == '(') {
        ++pos;
        NodePtr inner = parse_expr();
        if (!accept(')')) fail("expected ')'");
        return inner;
      }
      if (std::isalpha(static_cast<unsigned char>(c))) {
        std::size_t end = pos;
        while (end < text.size() && std::isalpha(static_cast<unsigned char>(text[end]))) ++end;
        const std::string name = text.substr(pos, end - pos);
        pos = end;
        if (name.size() == 1 && (name == "x" || name == "y" || name == "z"))
          return std::make_shared<Coordinate>(name[0] - 'x');
        static const std::pair<const char*, double (*)(double)> funcs[] = {
            {"sin", std::sin}, {"cos", std::cos},   {"tan", std::tan},   {"exp", std::exp},
            {"log", std::log}, {"sqrt", std::sqrt}, {"tanh", std::tanh}, {"abs", std::fabs},
        };
        for (const auto& [fname, fn] : funcs) {
          if (name == fname) {
            if (!accept('(')) fail("expected '(' after function name");
            auto node = std::make_shared<Unary>();
            node->fn = fn;
            node->arg = parse_expr();
            if (!accept(')')) fail("expected ')'");
            return node;
          }
        }
        fail("unknown identifier '" + name + "'");
      }
      fail(std::string("unexpected character '") + c + "'");
    }
    static NodePtr binary(char op, NodePtr lhs, NodePtr rhs) {
      auto node = std::make_shared<Binary>();
      node->op = op;
      node->lhs = std::move(lhs);
      node->rhs = std::move(rhs);
      return node;
    }
  };

  NodePtr root_;
};

}  // namespace evosurf

#endif
