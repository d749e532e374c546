#pragma once

// Scalar reverse-mode tape. Nodes are appended in evaluation order, so append
// order is a topological order and backward() walks it in reverse. Reductions
// (dot, sum, lincomb, logsumexp) are single n-ary nodes to keep the tape
// small for batch losses.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "hypercone/errors.hpp"

namespace hypercone::grad {

enum class Op : std::uint8_t {
  Leaf,
  Const,
  Add,
  Sub,
  Mul,
  Div,
  Neg,
  Square,
  Exp,
  Log,
  Sqrt,
  Sinh,
  Cosh,
  Tanh,
  Asinh,
  AcoshClamped,  // acosh(max(t, 1)); derivative uses max(t, 1 + 1e-8)
  AsinClamped,   // asin(min(t, hi))
  AcosClamped,   // acos(clamp(t, lo, hi))
  ClampMin,
  ClampMax,
  Relu,
  SinhcSqrt,  // sinh(sqrt(q)) / sqrt(q), q >= 0
  Dot,        // sum_k a_k b_k over 2n inputs
  Sum,
  LinComb,    // sum_k w_k a_k with constant weights
  LogSumExp,
};

std::string_view op_name(Op op);

/// Every primitive with an adjoint (Leaf and Const excluded).
std::span<const Op> differentiable_ops();

class Tape;

/// Handle to a scalar node on a tape.
struct Var {
  Tape* tape = nullptr;
  std::uint32_t id = 0;

  double value() const;
};

class Gradients {
 public:
  explicit Gradients(std::vector<double> adjoints) : adjoints_(std::move(adjoints)) {}

  /// d(output)/d(v); zero for nodes the output does not depend on.
  double wrt(Var v) const { return adjoints_.at(v.id); }
  std::span<const double> all() const noexcept { return adjoints_; }

 private:
  std::vector<double> adjoints_;
};

class Tape {
 public:
  struct Node {
    Op op;
    std::uint32_t arg_begin;
    std::uint32_t arg_count;
    std::uint32_t aux_begin;
    double value;
  };

  Var leaf(double value);
  Var constant(double value);

  std::size_t size() const noexcept { return nodes_.size(); }
  const Node& node(std::uint32_t id) const { return nodes_.at(id); }
  double value(Var v) const { return nodes_.at(v.id).value; }

  /// Reverse pass from a scalar output.
  Gradients backward(Var output) const;

  /// Reverse pass from an output given as a list of nodes; anything other
  /// than a single node is rejected as non-scalar.
  Gradients backward(std::span<const Var> output) const;

  // Node construction; used by the free functions below.
  Var push(Op op, std::span<const Var> args, std::span<const double> aux, double value);

 private:
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> args_;
  std::vector<double> aux_;
};

Var operator+(Var a, Var b);
Var operator-(Var a, Var b);
Var operator*(Var a, Var b);
Var operator/(Var a, Var b);
Var operator-(Var a);
Var operator+(Var a, double b);
Var operator+(double a, Var b);
Var operator-(Var a, double b);
Var operator-(double a, Var b);
Var operator*(Var a, double b);
Var operator*(double a, Var b);
Var operator/(Var a, double b);
Var operator/(double a, Var b);

Var square(Var a);
Var exp(Var a);
Var log(Var a);
Var sqrt(Var a);
Var sinh(Var a);
Var cosh(Var a);
Var tanh(Var a);
Var asinh(Var a);
Var acosh_clamped(Var a);
Var asin_clamped(Var a, double hi);
Var acos_clamped(Var a, double lo, double hi);
Var clamp_min(Var a, double lo);
Var clamp_max(Var a, double hi);
Var relu(Var a);
Var sinhc_sqrt(Var q);
Var dot(std::span<const Var> a, std::span<const Var> b);
Var sum(std::span<const Var> a);
Var lincomb(std::span<const Var> a, std::span<const double> weights);
Var logsumexp(std::span<const Var> a);

}  // namespace hypercone::grad
