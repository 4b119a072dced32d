#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "nasgnn/errors.hpp"

namespace nasgnn::ad {

using Matrix = Eigen::MatrixXd;

/// A named learnable tensor. Lives outside any tape (typically inside a
/// ParamRegistry); tapes reference it without copying and accumulate into
/// `grad` on backward.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  Parameter() = default;
  Parameter(std::string n, Eigen::Index rows, Eigen::Index cols)
      : name(std::move(n)),
        value(Matrix::Zero(rows, cols)),
        grad(Matrix::Zero(rows, cols)) {}

  void zero_grad() { grad.setZero(); }
};

class Tape;

/// Handle to a node on a tape. Cheap to copy; valid until the tape is reset.
class Var {
 public:
  Var() = default;

  const Matrix& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  bool valid() const { return tape_ != nullptr; }
  Tape& tape() const { return *tape_; }

 private:
  friend class Tape;
  Var(Tape* t, std::int32_t id) : tape_(t), id_(id) {}

  Tape* tape_ = nullptr;
  std::int32_t id_ = -1;
};

/// Reverse-mode tape over rank-1/rank-2 double tensors (vectors are n x 1
/// matrices). The computation graph is rebuilt every forward pass; node
/// creation order is a topological order, so backward() is a single reverse
/// sweep. reset() keeps node storage so repeated passes of the same shape
/// do not reallocate.
///
/// A tape is single-threaded during forward+backward; distinct tapes over
/// read-only parameters may run concurrently.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Constant (non-learnable) node; no gradient flows into it.
  Var constant(Matrix v);
  Var zeros(Eigen::Index rows, Eigen::Index cols);
  Var scalar(double x);

  /// Learnable leaf. One node per distinct parameter per tape; gradients
  /// accumulate straight into p.grad.
  Var leaf(Parameter& p);

  /// Seeds d(output)/d(output) = 1 and propagates to every node, adding
  /// each leaf's contribution to its parameter's grad. Repeated calls keep
  /// accumulating until the parameters are zeroed. Throws NotScalarError
  /// unless output is 1x1.
  void backward(const Var& output);

  /// Discards the graph but keeps allocations for reuse.
  void reset();

  std::size_t size() const { return used_; }

 private:
  enum class Op : std::uint8_t {
    Constant,
    Leaf,
    MatMul,
    Add,
    Sub,
    Mul,
    Concat,
    Row,
    Sigmoid,
    Tanh,
    Relu,
    Sum,
    SumRows,
    Scale,
    AddScalar,
    ScalarMul,
  };

  struct Node {
    Matrix value;                         // owned result (unused for Leaf)
    const Matrix* value_ptr = nullptr;    // ->value, or ->parameter value
    Matrix grad;
    Matrix* extern_grad = nullptr;        // leaf target, else nullptr
    bool grad_set = false;
    Op op = Op::Constant;
    std::int32_t a = -1;
    std::int32_t b = -1;
    double aux = 0.0;                     // scale factor / row index / split
  };

  friend class Var;
  friend Var matmul(const Var&, const Var&);
  friend Var add(const Var&, const Var&);
  friend Var sub(const Var&, const Var&);
  friend Var mul(const Var&, const Var&);
  friend Var concat(const Var&, const Var&);
  friend Var row(const Var&, Eigen::Index);
  friend Var sigmoid(const Var&);
  friend Var tanh(const Var&);
  friend Var relu(const Var&);
  friend Var sum(const Var&);
  friend Var sum_rows(const Var&);
  friend Var scale(const Var&, double);
  friend Var add_scalar(const Var&, double);
  friend Var scalar_mul(const Var&, const Var&);

  Node& node(std::int32_t id) { return nodes_[static_cast<std::size_t>(id)]; }
  const Node& node(std::int32_t id) const {
    return nodes_[static_cast<std::size_t>(id)];
  }

  std::int32_t alloc(Op op, std::int32_t a, std::int32_t b);
  Var wrap(std::int32_t id) { return Var(this, id); }

  /// Gradient buffer of a node, zero-initialized on first touch. For leaves
  /// this is the external parameter grad (never cleared here).
  Matrix& grad_of(Node& n);

  std::vector<Node> nodes_;
  std::size_t used_ = 0;
  std::vector<std::pair<const Parameter*, std::int32_t>> leaf_cache_;
};

// ---- Ops (free functions, shapes checked, each registers its backward
// rule on the owning tape) ----

/// [m x k] * [k x n] -> [m x n]
Var matmul(const Var& a, const Var& b);
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
/// Elementwise product.
Var mul(const Var& a, const Var& b);
/// Vertical stack of two column vectors.
Var concat(const Var& a, const Var& b);
/// Row i of a matrix as a column vector (embedding lookup).
Var row(const Var& m, Eigen::Index i);
Var sigmoid(const Var& a);
Var tanh(const Var& a);
Var relu(const Var& a);
/// Sum of all entries -> 1x1.
Var sum(const Var& a);
/// Rowwise sum: [m x n] -> [m x 1].
Var sum_rows(const Var& a);
Var scale(const Var& a, double c);
Var add_scalar(const Var& a, double c);
/// Broadcast multiply: s is 1x1, applied to every entry of v.
Var scalar_mul(const Var& s, const Var& v);

}  // namespace nasgnn::ad
