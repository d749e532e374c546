#include "hypercone/grad/tape.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "hypercone/geometry.hpp"

namespace hypercone::grad {

namespace {

constexpr std::array kDifferentiableOps = {
    Op::Add,   Op::Sub,          Op::Mul,         Op::Div,         Op::Neg,      Op::Square,
    Op::Exp,   Op::Log,          Op::Sqrt,        Op::Sinh,        Op::Cosh,     Op::Tanh,
    Op::Asinh, Op::AcoshClamped, Op::AsinClamped, Op::AcosClamped, Op::ClampMin, Op::ClampMax,
    Op::Relu,  Op::SinhcSqrt,    Op::Dot,         Op::Sum,         Op::LinComb,  Op::LogSumExp,
};

Tape* same_tape(std::span<const Var> args) {
  if (args.empty()) {
    throw ValidationError("tape op needs at least one argument");
  }
  Tape* t = args.front().tape;
  if (t == nullptr) {
    throw ValidationError("tape op on a detached Var");
  }
  for (const Var& v : args) {
    if (v.tape != t) {
      throw ValidationError("tape op mixes Vars from different tapes");
    }
  }
  return t;
}

Var unary(Op op, Var a, double value, std::span<const double> aux = {}) {
  const std::array args{a};
  return same_tape(args)->push(op, args, aux, value);
}

Var binary(Op op, Var a, Var b, double value) {
  const std::array args{a, b};
  return same_tape(args)->push(op, args, {}, value);
}

double sinhc_sqrt_value(double q) { return sinhc(std::sqrt(q)); }

double sinhc_sqrt_derivative(double q) {
  const double s = std::sqrt(q);
  if (s < 1e-2) {
    return 1.0 / 6.0 + q / 60.0 + q * q / 1680.0;
  }
  return (s * std::cosh(s) - std::sinh(s)) / (2.0 * s * s * s);
}

}  // namespace

std::string_view op_name(Op op) {
  switch (op) {
    case Op::Leaf: return "leaf";
    case Op::Const: return "const";
    case Op::Add: return "add";
    case Op::Sub: return "sub";
    case Op::Mul: return "mul";
    case Op::Div: return "div";
    case Op::Neg: return "neg";
    case Op::Square: return "square";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Sqrt: return "sqrt";
    case Op::Sinh: return "sinh";
    case Op::Cosh: return "cosh";
    case Op::Tanh: return "tanh";
    case Op::Asinh: return "asinh";
    case Op::AcoshClamped: return "acosh_clamped";
    case Op::AsinClamped: return "asin_clamped";
    case Op::AcosClamped: return "acos_clamped";
    case Op::ClampMin: return "clamp_min";
    case Op::ClampMax: return "clamp_max";
    case Op::Relu: return "relu";
    case Op::SinhcSqrt: return "sinhc_sqrt";
    case Op::Dot: return "dot";
    case Op::Sum: return "sum";
    case Op::LinComb: return "lincomb";
    case Op::LogSumExp: return "logsumexp";
  }
  return "unknown";
}

std::span<const Op> differentiable_ops() { return kDifferentiableOps; }

double Var::value() const {
  if (tape == nullptr) {
    throw ValidationError("value() on a detached Var");
  }
  return tape->value(*this);
}

Var Tape::leaf(double value) { return push(Op::Leaf, {}, {}, value); }

Var Tape::constant(double value) { return push(Op::Const, {}, {}, value); }

Var Tape::push(Op op, std::span<const Var> args, std::span<const double> aux, double value) {
  const auto id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back(Node{op, static_cast<std::uint32_t>(args_.size()),
                        static_cast<std::uint32_t>(args.size()),
                        static_cast<std::uint32_t>(aux_.size()), value});
  for (const Var& a : args) {
    args_.push_back(a.id);
  }
  aux_.insert(aux_.end(), aux.begin(), aux.end());
  return Var{this, id};
}

Gradients Tape::backward(std::span<const Var> output) const {
  if (output.size() != 1) {
    throw ValidationError("backward: output must be a scalar, got " +
                          std::to_string(output.size()) + " values");
  }
  return backward(output.front());
}

Gradients Tape::backward(Var output) const {
  if (output.tape != this || output.id >= nodes_.size()) {
    throw ValidationError("backward: output does not belong to this tape");
  }
  std::vector<double> adj(nodes_.size(), 0.0);
  adj[output.id] = 1.0;
  for (std::int64_t i = output.id; i >= 0; --i) {
    const Node& n = nodes_[static_cast<std::size_t>(i)];
    const double g = adj[static_cast<std::size_t>(i)];
    if (g == 0.0 || n.op == Op::Leaf || n.op == Op::Const) {
      continue;
    }
    const std::uint32_t* arg = args_.data() + n.arg_begin;
    const double* aux = aux_.data() + n.aux_begin;
    auto val = [&](std::uint32_t k) { return nodes_[arg[k]].value; };
    auto acc = [&](std::uint32_t k, double d) { adj[arg[k]] += g * d; };
    switch (n.op) {
      case Op::Add:
        acc(0, 1.0);
        acc(1, 1.0);
        break;
      case Op::Sub:
        acc(0, 1.0);
        acc(1, -1.0);
        break;
      case Op::Mul:
        acc(0, val(1));
        acc(1, val(0));
        break;
      case Op::Div:
        acc(0, 1.0 / val(1));
        acc(1, -n.value / val(1));
        break;
      case Op::Neg:
        acc(0, -1.0);
        break;
      case Op::Square:
        acc(0, 2.0 * val(0));
        break;
      case Op::Exp:
        acc(0, n.value);
        break;
      case Op::Log:
        acc(0, 1.0 / val(0));
        break;
      case Op::Sqrt:
        acc(0, 0.5 / n.value);
        break;
      case Op::Sinh:
        acc(0, std::cosh(val(0)));
        break;
      case Op::Cosh:
        acc(0, std::sinh(val(0)));
        break;
      case Op::Tanh:
        acc(0, 1.0 - n.value * n.value);
        break;
      case Op::Asinh:
        acc(0, 1.0 / std::sqrt(val(0) * val(0) + 1.0));
        break;
      case Op::AcoshClamped: {
        const double t = val(0);
        if (t >= 1.0) {
          const double tc = std::max(t, 1.0 + kAcoshEps);
          acc(0, 1.0 / std::sqrt(tc * tc - 1.0));
        }
        break;
      }
      case Op::AsinClamped: {
        const double t = val(0);
        if (t < aux[0]) {
          acc(0, 1.0 / std::sqrt(1.0 - t * t));
        }
        break;
      }
      case Op::AcosClamped: {
        const double t = val(0);
        if (t > aux[0] && t < aux[1]) {
          acc(0, -1.0 / std::sqrt(1.0 - t * t));
        }
        break;
      }
      case Op::ClampMin:
        if (val(0) > aux[0]) {
          acc(0, 1.0);
        }
        break;
      case Op::ClampMax:
        if (val(0) < aux[0]) {
          acc(0, 1.0);
        }
        break;
      case Op::Relu:
        if (val(0) > 0.0) {
          acc(0, 1.0);
        }
        break;
      case Op::SinhcSqrt:
        acc(0, sinhc_sqrt_derivative(val(0)));
        break;
      case Op::Dot: {
        const std::uint32_t half = n.arg_count / 2;
        for (std::uint32_t k = 0; k < half; ++k) {
          acc(k, val(half + k));
          acc(half + k, val(k));
        }
        break;
      }
      case Op::Sum:
        for (std::uint32_t k = 0; k < n.arg_count; ++k) {
          acc(k, 1.0);
        }
        break;
      case Op::LinComb:
        for (std::uint32_t k = 0; k < n.arg_count; ++k) {
          acc(k, aux[k]);
        }
        break;
      case Op::LogSumExp:
        for (std::uint32_t k = 0; k < n.arg_count; ++k) {
          acc(k, std::exp(val(k) - n.value));
        }
        break;
      case Op::Leaf:
      case Op::Const:
        break;
    }
  }
  return Gradients(std::move(adj));
}

Var operator+(Var a, Var b) { return binary(Op::Add, a, b, a.value() + b.value()); }
Var operator-(Var a, Var b) { return binary(Op::Sub, a, b, a.value() - b.value()); }
Var operator*(Var a, Var b) { return binary(Op::Mul, a, b, a.value() * b.value()); }
Var operator/(Var a, Var b) { return binary(Op::Div, a, b, a.value() / b.value()); }
Var operator-(Var a) { return unary(Op::Neg, a, -a.value()); }

Var operator+(Var a, double b) { return a + a.tape->constant(b); }
Var operator+(double a, Var b) { return b.tape->constant(a) + b; }
Var operator-(Var a, double b) { return a - a.tape->constant(b); }
Var operator-(double a, Var b) { return b.tape->constant(a) - b; }
Var operator*(Var a, double b) { return a * a.tape->constant(b); }
Var operator*(double a, Var b) { return b.tape->constant(a) * b; }
Var operator/(Var a, double b) { return a / a.tape->constant(b); }
Var operator/(double a, Var b) { return b.tape->constant(a) / b; }

Var square(Var a) { return unary(Op::Square, a, a.value() * a.value()); }
Var exp(Var a) { return unary(Op::Exp, a, std::exp(a.value())); }
Var log(Var a) { return unary(Op::Log, a, std::log(a.value())); }
Var sqrt(Var a) { return unary(Op::Sqrt, a, std::sqrt(a.value())); }
Var sinh(Var a) { return unary(Op::Sinh, a, std::sinh(a.value())); }
Var cosh(Var a) { return unary(Op::Cosh, a, std::cosh(a.value())); }
Var tanh(Var a) { return unary(Op::Tanh, a, std::tanh(a.value())); }
Var asinh(Var a) { return unary(Op::Asinh, a, std::asinh(a.value())); }

Var acosh_clamped(Var a) {
  return unary(Op::AcoshClamped, a, std::acosh(std::max(a.value(), 1.0)));
}

Var asin_clamped(Var a, double hi) {
  const std::array aux{hi};
  return unary(Op::AsinClamped, a, std::asin(std::min(a.value(), hi)), aux);
}

Var acos_clamped(Var a, double lo, double hi) {
  const std::array aux{lo, hi};
  return unary(Op::AcosClamped, a, std::acos(std::clamp(a.value(), lo, hi)), aux);
}

Var clamp_min(Var a, double lo) {
  const std::array aux{lo};
  return unary(Op::ClampMin, a, std::max(a.value(), lo), aux);
}

Var clamp_max(Var a, double hi) {
  const std::array aux{hi};
  return unary(Op::ClampMax, a, std::min(a.value(), hi), aux);
}

Var relu(Var a) { return unary(Op::Relu, a, std::max(a.value(), 0.0)); }

Var sinhc_sqrt(Var q) {
  if (q.value() < 0.0) {
    throw ValidationError("sinhc_sqrt: negative argument");
  }
  return unary(Op::SinhcSqrt, q, sinhc_sqrt_value(q.value()));
}

Var dot(std::span<const Var> a, std::span<const Var> b) {
  if (a.size() != b.size() || a.empty()) {
    throw ValidationError("dot: operands must be non-empty and of equal length");
  }
  std::vector<Var> args(a.begin(), a.end());
  args.insert(args.end(), b.begin(), b.end());
  double v = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    v += a[k].value() * b[k].value();
  }
  return same_tape(args)->push(Op::Dot, args, {}, v);
}

Var sum(std::span<const Var> a) {
  double v = 0.0;
  for (const Var& x : a) {
    v += x.value();
  }
  return same_tape(a)->push(Op::Sum, a, {}, v);
}

Var lincomb(std::span<const Var> a, std::span<const double> weights) {
  if (a.size() != weights.size()) {
    throw ValidationError("lincomb: weight count mismatch");
  }
  double v = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    v += weights[k] * a[k].value();
  }
  return same_tape(a)->push(Op::LinComb, a, weights, v);
}

Var logsumexp(std::span<const Var> a) {
  Tape* t = same_tape(a);
  double mx = -std::numeric_limits<double>::infinity();
  for (const Var& x : a) {
    mx = std::max(mx, x.value());
  }
  double s = 0.0;
  for (const Var& x : a) {
    s += std::exp(x.value() - mx);
  }
  return t->push(Op::LogSumExp, a, {}, mx + std::log(s));
}

}  // namespace hypercone::grad
