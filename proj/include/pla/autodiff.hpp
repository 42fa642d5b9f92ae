#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pla/matrix.hpp"

namespace pla::ad {

// View into the flat parameter vector: a (rows x cols) block starting at
// `offset` (row-major). Vectors use cols = 1.
struct Slice {
  std::size_t offset = 0;
  std::size_t rows = 0;
  std::size_t cols = 1;

  std::size_t size() const { return rows * cols; }
};

// Eager reverse-mode tape over matrix-valued nodes. Values are computed at
// node creation; backward() accumulates d(scalar root)/d(params) into the
// bound gradient vector. The tape is an arena: reset() rewinds it without
// freeing, so per-wafer graphs in a training loop cost no allocations after
// warmup. Single-threaded by design.
class Tape {
 public:
  Tape() = default;

  void bind(const std::vector<double>* params, std::vector<double>* param_grad);
  void reset();

  // leaves
  int constant(std::span<const double> flat, std::size_t rows, std::size_t cols);
  int scalar(double v);
  int param(Slice s);

  // y = x * W^T + b (row-wise); x is (n x in), W slice (out x in), b slice (out)
  int affine(int x, Slice w, Slice b);

  // elementwise
  int relu(int x);
  int softplus(int x);
  int square(int x);
  int scale(int x, double c);
  int add_const(int x, double c);
  int add(int a, int b);
  int sub(int a, int b);
  int mul(int a, int b);

  int prefix_sum(int x);              // running sum over the flat elements
  int add_scalar(int x, int s);       // broadcast a 1x1 node over x
  int pick(int x, std::size_t index); // single element -> 1x1
  int sum(int x);                     // 1x1
  int sum_sq_from(int x, std::size_t start);  // sum_{i>=start} x_i^2 -> 1x1

  // l1 norm of the given parameter slices -> 1x1 (subgradient sign, sign(0)=0)
  int l1(std::span<const Slice> slices);

  std::size_t node_rows(int id) const { return nodes_[id].rows; }
  std::size_t node_cols(int id) const { return nodes_[id].cols; }
  std::span<const double> value(int id) const;
  double value_scalar(int id) const;

  void backward(int root);

 private:
  enum class Op : std::uint8_t {
    Constant, Param, Affine, Relu, Softplus, Square, Scale, AddConst,
    Add, Sub, Mul, PrefixSum, AddScalar, Pick, Sum, SumSqFrom, L1,
  };

  struct Node {
    Op op;
    int a = -1;
    int b = -1;
    Slice w;
    Slice bias;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t val = 0;  // offset into the value/grad arena
    double cval = 0.0;
    std::size_t index = 0;     // Pick / SumSqFrom / L1 slice range start
    std::size_t count = 0;     // L1 slice range length
  };

  int push(Node n);
  double* val_ptr(const Node& n) { return arena_.data() + n.val; }
  const double* val_ptr(const Node& n) const { return arena_.data() + n.val; }
  double* grad_ptr(const Node& n) { return grads_.data() + n.val; }

  std::vector<Node> nodes_;
  std::vector<double> arena_;
  std::vector<double> grads_;
  std::size_t used_ = 0;
  std::vector<Slice> l1_slices_;
  const std::vector<double>* params_ = nullptr;
  std::vector<double>* param_grad_ = nullptr;
};

// numerics shared with the plain (tape-free) forward paths
double stable_softplus(double x);
double stable_sigmoid(double x);
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);

}  // namespace pla::ad
