#include "nasgnn/autodiff.hpp"

#include <cmath>

namespace nasgnn::ad {

const Matrix& Var::value() const { return *tape_->node(id_).value_ptr; }

std::int32_t Tape::alloc(Op op, std::int32_t a, std::int32_t b) {
  if (used_ == nodes_.size()) nodes_.emplace_back();
  Node& n = nodes_[used_];
  n.op = op;
  n.a = a;
  n.b = b;
  n.aux = 0.0;
  n.value_ptr = &n.value;
  n.extern_grad = nullptr;
  n.grad_set = false;
  return static_cast<std::int32_t>(used_++);
}

void Tape::reset() {
  used_ = 0;
  leaf_cache_.clear();
}

Var Tape::constant(Matrix v) {
  const auto id = alloc(Op::Constant, -1, -1);
  node(id).value = std::move(v);
  return wrap(id);
}

Var Tape::zeros(Eigen::Index rows, Eigen::Index cols) {
  const auto id = alloc(Op::Constant, -1, -1);
  Node& n = node(id);
  n.value.resize(rows, cols);
  n.value.setZero();
  return wrap(id);
}

Var Tape::scalar(double x) {
  const auto id = alloc(Op::Constant, -1, -1);
  Node& n = node(id);
  n.value.resize(1, 1);
  n.value(0, 0) = x;
  return wrap(id);
}

Var Tape::leaf(Parameter& p) {
  for (const auto& [param, id] : leaf_cache_) {
    if (param == &p) return wrap(id);
  }
  const auto id = alloc(Op::Leaf, -1, -1);
  Node& n = node(id);
  n.value_ptr = &p.value;
  n.extern_grad = &p.grad;
  leaf_cache_.emplace_back(&p, id);
  return wrap(id);
}

Matrix& Tape::grad_of(Node& n) {
  if (n.extern_grad != nullptr) return *n.extern_grad;
  if (!n.grad_set) {
    n.grad.resize(n.value_ptr->rows(), n.value_ptr->cols());
    n.grad.setZero();
    n.grad_set = true;
  }
  return n.grad;
}

namespace {

void check_same_shape(const Var& a, const Var& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": shapes " +
                     std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                     " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()));
  }
}

}  // namespace

Var matmul(const Var& a, const Var& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: inner dimensions " + std::to_string(a.cols()) +
                     " vs " + std::to_string(b.rows()));
  }
  Tape& t = a.tape();
  const auto id = t.alloc(Tape::Op::MatMul, a.id_, b.id_);
  Tape::Node& n = t.node(id);
  n.value.resize(a.rows(), b.cols());
  n.value.noalias() = a.value() * b.value();
  return t.wrap(id);
}

Var add(const Var& a, const Var& b) {
  check_same_shape(a, b, "add");
  Tape& t = a.tape();
  const auto id = t.alloc(Tape::Op::Add, a.id_, b.id_);
  t.node(id).value = a.value() + b.value();
  return t.wrap(id);
}

Var sub(const Var& a, const Var& b) {
  check_same_shape(a, b, "sub");
  Tape& t = a.tape();
  const auto id = t.alloc(Tape::Op::Sub, a.id_, b.id_);
  t.node(id).value = a.value() - b.value();
  return t.wrap(id);
}

Var mul(const Var& a, const Var& b) {
  check_same_shape(a, b, "mul");
  Tape& t = a.tape();
  const auto id = t.alloc(Tape::Op::Mul, a.id_, b.id_);
  t.node(id).value = a.value().cwiseProduct(b.value());
  return t.wrap(id);
}

Var concat(const Var& a, const Var& b) {
  if (a.cols() != 1 || b.cols() != 1) {
    throw ShapeError("concat: expects column vectors");
  }
  Tape& t = a.tape();
  const auto id = t.alloc(Tape::Op::Concat, a.id_, b.id_);
  Tape::Node& n = t.node(id);
  n.aux = static_cast<double>(a.rows());  // split point for backward
  n.value.resize(a.rows() + b.rows(), 1);
  n.value.topRows(a.rows()) = a.value();
  n.value.bottomRows(b.rows()) = b.value();
  return t.wrap(id);
}

Var row(const Var& m, Eigen::Index i) {
  if (i < 0 || i >= m.rows()) {
    throw ShapeError("row: index " + std::to_string(i) + " out of range");
  }
  Tape& t = m.tape();
  const auto id = t.alloc(Tape::Op::Row, m.id_, -1);
  Tape::Node& n = t.node(id);
  n.aux = static_cast<double>(i);
  n.value = m.value().row(i).transpose();
  return t.wrap(id);
}

Var sigmoid(const Var& a) {
  Tape& t = a.tape();
  const auto id = t.alloc(Tape::Op::Sigmoid, a.id_, -1);
  // Branch on sign for overflow-free evaluation.
  t.node(id).value = a.value().unaryExpr([](double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
  });
  return t.wrap(id);
}

Var tanh(const Var& a) {
  Tape& t = a.tape();
  const auto id = t.alloc(Tape::Op::Tanh, a.id_, -1);
  t.node(id).value = a.value().array().tanh();
  return t.wrap(id);
}

Var relu(const Var& a) {
  Tape& t = a.tape();
  const auto id = t.alloc(Tape::Op::Relu, a.id_, -1);
  t.node(id).value = a.value().cwiseMax(0.0);
  return t.wrap(id);
}

Var sum(const Var& a) {
  Tape& t = a.tape();
  const auto id = t.alloc(Tape::Op::Sum, a.id_, -1);
  Tape::Node& n = t.node(id);
  n.value.resize(1, 1);
  n.value(0, 0) = a.value().sum();
  return t.wrap(id);
}

Var sum_rows(const Var& a) {
  Tape& t = a.tape();
  const auto id = t.alloc(Tape::Op::SumRows, a.id_, -1);
  t.node(id).value = a.value().rowwise().sum();
  return t.wrap(id);
}

Var scale(const Var& a, double c) {
  Tape& t = a.tape();
  const auto id = t.alloc(Tape::Op::Scale, a.id_, -1);
  Tape::Node& n = t.node(id);
  n.aux = c;
  n.value = a.value() * c;
  return t.wrap(id);
}

Var add_scalar(const Var& a, double c) {
  Tape& t = a.tape();
  const auto id = t.alloc(Tape::Op::AddScalar, a.id_, -1);
  Tape::Node& n = t.node(id);
  n.aux = c;
  n.value = a.value().array() + c;
  return t.wrap(id);
}

Var scalar_mul(const Var& s, const Var& v) {
  if (s.rows() != 1 || s.cols() != 1) {
    throw ShapeError("scalar_mul: gate must be 1x1");
  }
  Tape& t = s.tape();
  const auto id = t.alloc(Tape::Op::ScalarMul, s.id_, v.id_);
  t.node(id).value = v.value() * s.value()(0, 0);
  return t.wrap(id);
}

void Tape::backward(const Var& output) {
  if (output.rows() != 1 || output.cols() != 1) {
    throw NotScalarError("backward: output is " +
                         std::to_string(output.rows()) + "x" +
                         std::to_string(output.cols()));
  }

  for (std::size_t i = 0; i <= static_cast<std::size_t>(output.id_); ++i) {
    nodes_[i].grad_set = false;
  }
  {
    Node& out = node(output.id_);
    if (out.extern_grad == nullptr) {
      out.grad.resize(1, 1);
      out.grad(0, 0) = 1.0;
      out.grad_set = true;
    } else {
      *out.extern_grad += Matrix::Ones(1, 1);
    }
  }

  for (std::int32_t i = output.id_; i >= 0; --i) {
    Node& n = node(i);
    if (!n.grad_set && n.extern_grad == nullptr) continue;
    if (n.op == Op::Constant || n.op == Op::Leaf) continue;
    const Matrix& g = n.extern_grad ? *n.extern_grad : n.grad;
    Node& pa = node(n.a);

    switch (n.op) {
      case Op::MatMul: {
        Node& pb = node(n.b);
        grad_of(pa).noalias() += g * pb.value_ptr->transpose();
        grad_of(pb).noalias() += pa.value_ptr->transpose() * g;
        break;
      }
      case Op::Add: {
        grad_of(pa) += g;
        grad_of(node(n.b)) += g;
        break;
      }
      case Op::Sub: {
        grad_of(pa) += g;
        grad_of(node(n.b)) -= g;
        break;
      }
      case Op::Mul: {
        Node& pb = node(n.b);
        grad_of(pa) += g.cwiseProduct(*pb.value_ptr);
        grad_of(pb) += g.cwiseProduct(*pa.value_ptr);
        break;
      }
      case Op::Concat: {
        Node& pb = node(n.b);
        const auto split = static_cast<Eigen::Index>(n.aux);
        grad_of(pa) += g.topRows(split);
        grad_of(pb) += g.bottomRows(g.rows() - split);
        break;
      }
      case Op::Row: {
        const auto idx = static_cast<Eigen::Index>(n.aux);
        grad_of(pa).row(idx) += g.transpose();
        break;
      }
      case Op::Sigmoid: {
        const auto& y = n.value.array();
        grad_of(pa).array() += g.array() * y * (1.0 - y);
        break;
      }
      case Op::Tanh: {
        const auto& y = n.value.array();
        grad_of(pa).array() += g.array() * (1.0 - y * y);
        break;
      }
      case Op::Relu: {
        grad_of(pa).array() +=
            g.array() * (pa.value_ptr->array() > 0.0).cast<double>();
        break;
      }
      case Op::Sum: {
        grad_of(pa).array() += g(0, 0);
        break;
      }
      case Op::SumRows: {
        grad_of(pa).colwise() += g.col(0);
        break;
      }
      case Op::Scale: {
        grad_of(pa) += g * n.aux;
        break;
      }
      case Op::AddScalar: {
        grad_of(pa) += g;
        break;
      }
      case Op::ScalarMul: {
        Node& pb = node(n.b);
        grad_of(pa)(0, 0) += g.cwiseProduct(*pb.value_ptr).sum();
        grad_of(pb) += g * (*pa.value_ptr)(0, 0);
        break;
      }
      case Op::Constant:
      case Op::Leaf:
        break;
    }
  }
}

}  // namespace nasgnn::ad
