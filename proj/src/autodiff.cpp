#include "pla/autodiff.hpp"

#include <algorithm>
#include <cmath>

#include "pla/error.hpp"

namespace pla::ad {

double stable_softplus(double x) {
  // log(1 + e^x) without overflow on either side
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double dot(const double* a, const double* b, std::size_t n) {
  // four independent accumulators: fixed summation order, vectorizable
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  double s = (s0 + s1) + (s2 + s3);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void Tape::bind(const std::vector<double>* params, std::vector<double>* param_grad) {
  params_ = params;
  param_grad_ = param_grad;
}

void Tape::reset() {
  nodes_.clear();
  l1_slices_.clear();
  used_ = 0;
}

int Tape::push(Node n) {
  n.val = used_;
  used_ += n.rows * n.cols;
  if (arena_.size() < used_) {
    arena_.resize(used_);
    grads_.resize(used_);
  }
  nodes_.push_back(n);
  return static_cast<int>(nodes_.size()) - 1;
}

std::span<const double> Tape::value(int id) const {
  const Node& n = nodes_[id];
  return {val_ptr(n), n.rows * n.cols};
}

double Tape::value_scalar(int id) const {
  const Node& n = nodes_[id];
  if (n.rows * n.cols != 1) raise("ShapeMismatch", "node is not a scalar");
  return *val_ptr(n);
}

int Tape::constant(std::span<const double> flat, std::size_t rows, std::size_t cols) {
  if (flat.size() != rows * cols) raise("ShapeMismatch", "constant size mismatch");
  const int id = push({.op = Op::Constant, .rows = rows, .cols = cols});
  std::copy(flat.begin(), flat.end(), val_ptr(nodes_[id]));
  return id;
}

int Tape::scalar(double v) {
  const int id = push({.op = Op::Constant, .rows = 1, .cols = 1});
  *val_ptr(nodes_[id]) = v;
  return id;
}

int Tape::param(Slice s) {
  if (params_ == nullptr) raise("InvalidConfig", "tape has no bound parameters");
  const int id = push({.op = Op::Param, .w = s, .rows = s.rows, .cols = s.cols});
  const Node& n = nodes_[id];
  std::copy(params_->data() + s.offset, params_->data() + s.offset + s.size(),
            val_ptr(n));
  return id;
}

int Tape::affine(int x, Slice w, Slice b) {
  if (params_ == nullptr) raise("InvalidConfig", "tape has no bound parameters");
  const Node& xn = nodes_[x];
  if (xn.cols != w.cols || b.rows != w.rows || b.cols != 1)
    raise("ShapeMismatch", "affine: input/weight/bias shapes disagree");
  const int id =
      push({.op = Op::Affine, .a = x, .w = w, .bias = b, .rows = xn.rows, .cols = w.rows});
  const Node& n = nodes_[id];
  const double* xin = val_ptr(nodes_[x]);
  const double* wp = params_->data() + w.offset;
  const double* bp = params_->data() + b.offset;
  double* out = val_ptr(n);
  for (std::size_t r = 0; r < n.rows; ++r) {
    const double* xr = xin + r * w.cols;
    double* yr = out + r * w.rows;
    for (std::size_t o = 0; o < w.rows; ++o)
      yr[o] = dot(wp + o * w.cols, xr, w.cols) + bp[o];
  }
  return id;
}

int Tape::relu(int x) {
  const Node& xn = nodes_[x];
  const int id = push({.op = Op::Relu, .a = x, .rows = xn.rows, .cols = xn.cols});
  const double* in = val_ptr(nodes_[x]);
  double* out = val_ptr(nodes_[id]);
  const std::size_t n = nodes_[id].rows * nodes_[id].cols;
  for (std::size_t i = 0; i < n; ++i) out[i] = in[i] > 0.0 ? in[i] : 0.0;
  return id;
}

int Tape::softplus(int x) {
  const Node& xn = nodes_[x];
  const int id = push({.op = Op::Softplus, .a = x, .rows = xn.rows, .cols = xn.cols});
  const double* in = val_ptr(nodes_[x]);
  double* out = val_ptr(nodes_[id]);
  const std::size_t n = nodes_[id].rows * nodes_[id].cols;
  for (std::size_t i = 0; i < n; ++i) out[i] = stable_softplus(in[i]);
  return id;
}

int Tape::square(int x) {
  const Node& xn = nodes_[x];
  const int id = push({.op = Op::Square, .a = x, .rows = xn.rows, .cols = xn.cols});
  const double* in = val_ptr(nodes_[x]);
  double* out = val_ptr(nodes_[id]);
  const std::size_t n = nodes_[id].rows * nodes_[id].cols;
  for (std::size_t i = 0; i < n; ++i) out[i] = in[i] * in[i];
  return id;
}

int Tape::scale(int x, double c) {
  const Node& xn = nodes_[x];
  const int id =
      push({.op = Op::Scale, .a = x, .rows = xn.rows, .cols = xn.cols, .cval = c});
  const double* in = val_ptr(nodes_[x]);
  double* out = val_ptr(nodes_[id]);
  const std::size_t n = nodes_[id].rows * nodes_[id].cols;
  for (std::size_t i = 0; i < n; ++i) out[i] = c * in[i];
  return id;
}

int Tape::add_const(int x, double c) {
  const Node& xn = nodes_[x];
  const int id =
      push({.op = Op::AddConst, .a = x, .rows = xn.rows, .cols = xn.cols, .cval = c});
  const double* in = val_ptr(nodes_[x]);
  double* out = val_ptr(nodes_[id]);
  const std::size_t n = nodes_[id].rows * nodes_[id].cols;
  for (std::size_t i = 0; i < n; ++i) out[i] = in[i] + c;
  return id;
}

namespace {
void require_same_shape(std::size_t ar, std::size_t ac, std::size_t br, std::size_t bc) {
  if (ar != br || ac != bc) raise("ShapeMismatch", "elementwise op on unequal shapes");
}
}  // namespace

int Tape::add(int a, int b) {
  const Node &an = nodes_[a], &bn = nodes_[b];
  require_same_shape(an.rows, an.cols, bn.rows, bn.cols);
  const int id = push({.op = Op::Add, .a = a, .b = b, .rows = an.rows, .cols = an.cols});
  const double* pa = val_ptr(nodes_[a]);
  const double* pb = val_ptr(nodes_[b]);
  double* out = val_ptr(nodes_[id]);
  const std::size_t n = an.rows * an.cols;
  for (std::size_t i = 0; i < n; ++i) out[i] = pa[i] + pb[i];
  return id;
}

int Tape::sub(int a, int b) {
  const Node &an = nodes_[a], &bn = nodes_[b];
  require_same_shape(an.rows, an.cols, bn.rows, bn.cols);
  const int id = push({.op = Op::Sub, .a = a, .b = b, .rows = an.rows, .cols = an.cols});
  const double* pa = val_ptr(nodes_[a]);
  const double* pb = val_ptr(nodes_[b]);
  double* out = val_ptr(nodes_[id]);
  const std::size_t n = an.rows * an.cols;
  for (std::size_t i = 0; i < n; ++i) out[i] = pa[i] - pb[i];
  return id;
}

int Tape::mul(int a, int b) {
  const Node &an = nodes_[a], &bn = nodes_[b];
  require_same_shape(an.rows, an.cols, bn.rows, bn.cols);
  const int id = push({.op = Op::Mul, .a = a, .b = b, .rows = an.rows, .cols = an.cols});
  const double* pa = val_ptr(nodes_[a]);
  const double* pb = val_ptr(nodes_[b]);
  double* out = val_ptr(nodes_[id]);
  const std::size_t n = an.rows * an.cols;
  for (std::size_t i = 0; i < n; ++i) out[i] = pa[i] * pb[i];
  return id;
}

int Tape::prefix_sum(int x) {
  const Node& xn = nodes_[x];
  const int id = push({.op = Op::PrefixSum, .a = x, .rows = xn.rows, .cols = xn.cols});
  const double* in = val_ptr(nodes_[x]);
  double* out = val_ptr(nodes_[id]);
  const std::size_t n = nodes_[id].rows * nodes_[id].cols;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += in[i];
    out[i] = acc;
  }
  return id;
}

int Tape::add_scalar(int x, int s) {
  const Node& sn = nodes_[s];
  if (sn.rows * sn.cols != 1) raise("ShapeMismatch", "add_scalar needs a 1x1 node");
  const Node& xn = nodes_[x];
  const int id =
      push({.op = Op::AddScalar, .a = x, .b = s, .rows = xn.rows, .cols = xn.cols});
  const double sv = *val_ptr(nodes_[s]);
  const double* in = val_ptr(nodes_[x]);
  double* out = val_ptr(nodes_[id]);
  const std::size_t n = nodes_[id].rows * nodes_[id].cols;
  for (std::size_t i = 0; i < n; ++i) out[i] = in[i] + sv;
  return id;
}

int Tape::pick(int x, std::size_t index) {
  const Node& xn = nodes_[x];
  if (index >= xn.rows * xn.cols) raise("IndexOutOfRange", "pick index out of range");
  const int id = push({.op = Op::Pick, .a = x, .rows = 1, .cols = 1, .index = index});
  *val_ptr(nodes_[id]) = val_ptr(nodes_[x])[index];
  return id;
}

int Tape::sum(int x) {
  const Node& xn = nodes_[x];
  const int id = push({.op = Op::Sum, .a = x, .rows = 1, .cols = 1});
  const double* in = val_ptr(nodes_[x]);
  const std::size_t n = xn.rows * xn.cols;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += in[i];
  *val_ptr(nodes_[id]) = acc;
  return id;
}

int Tape::sum_sq_from(int x, std::size_t start) {
  const Node& xn = nodes_[x];
  const std::size_t n = xn.rows * xn.cols;
  if (start > n) raise("IndexOutOfRange", "sum_sq_from start out of range");
  const int id = push({.op = Op::SumSqFrom, .a = x, .rows = 1, .cols = 1, .index = start});
  const double* in = val_ptr(nodes_[x]);
  double acc = 0.0;
  for (std::size_t i = start; i < n; ++i) acc += in[i] * in[i];
  *val_ptr(nodes_[id]) = acc;
  return id;
}

int Tape::l1(std::span<const Slice> slices) {
  if (params_ == nullptr) raise("InvalidConfig", "tape has no bound parameters");
  const std::size_t first = l1_slices_.size();
  l1_slices_.insert(l1_slices_.end(), slices.begin(), slices.end());
  const int id = push({.op = Op::L1, .rows = 1, .cols = 1, .index = first,
                       .count = slices.size()});
  double acc = 0.0;
  for (const Slice& s : slices)
    for (std::size_t i = 0; i < s.size(); ++i)
      acc += std::abs((*params_)[s.offset + i]);
  *val_ptr(nodes_[id]) = acc;
  return id;
}

void Tape::backward(int root) {
  const Node& rn = nodes_[root];
  if (rn.rows * rn.cols != 1) raise("ShapeMismatch", "backward root must be scalar");
  if (param_grad_ == nullptr) raise("InvalidConfig", "tape has no bound gradient");

  std::fill(grads_.begin(), grads_.begin() + static_cast<long>(used_), 0.0);
  grads_[rn.val] = 1.0;

  for (int idx = root; idx >= 0; --idx) {
    const Node& n = nodes_[idx];
    const double* g = grads_.data() + n.val;
    const std::size_t len = n.rows * n.cols;
    switch (n.op) {
      case Op::Constant:
        break;
      case Op::Param: {
        double* pg = param_grad_->data() + n.w.offset;
        for (std::size_t i = 0; i < len; ++i) pg[i] += g[i];
        break;
      }
      case Op::Affine: {
        const Node& xn = nodes_[n.a];
        const double* x = val_ptr(xn);
        double* gx = grad_ptr(xn);
        const double* wp = params_->data() + n.w.offset;
        double* gw = param_grad_->data() + n.w.offset;
        double* gb = param_grad_->data() + n.bias.offset;
        const std::size_t in_dim = n.w.cols, out_dim = n.w.rows;
        for (std::size_t r = 0; r < n.rows; ++r) {
          const double* gr = g + r * out_dim;
          const double* xr = x + r * in_dim;
          double* gxr = gx + r * in_dim;
          for (std::size_t o = 0; o < out_dim; ++o) {
            const double go = gr[o];
            if (go == 0.0) continue;
            axpy(go, wp + o * in_dim, gxr, in_dim);
            axpy(go, xr, gw + o * in_dim, in_dim);
            gb[o] += go;
          }
        }
        break;
      }
      case Op::Relu: {
        const Node& xn = nodes_[n.a];
        const double* x = val_ptr(xn);
        double* gx = grad_ptr(xn);
        for (std::size_t i = 0; i < len; ++i)
          if (x[i] > 0.0) gx[i] += g[i];
        break;
      }
      case Op::Softplus: {
        const Node& xn = nodes_[n.a];
        const double* x = val_ptr(xn);
        double* gx = grad_ptr(xn);
        for (std::size_t i = 0; i < len; ++i) gx[i] += stable_sigmoid(x[i]) * g[i];
        break;
      }
      case Op::Square: {
        const Node& xn = nodes_[n.a];
        const double* x = val_ptr(xn);
        double* gx = grad_ptr(xn);
        for (std::size_t i = 0; i < len; ++i) gx[i] += 2.0 * x[i] * g[i];
        break;
      }
      case Op::Scale: {
        double* gx = grad_ptr(nodes_[n.a]);
        for (std::size_t i = 0; i < len; ++i) gx[i] += n.cval * g[i];
        break;
      }
      case Op::AddConst: {
        double* gx = grad_ptr(nodes_[n.a]);
        for (std::size_t i = 0; i < len; ++i) gx[i] += g[i];
        break;
      }
      case Op::Add: {
        double* ga = grad_ptr(nodes_[n.a]);
        double* gb = grad_ptr(nodes_[n.b]);
        for (std::size_t i = 0; i < len; ++i) {
          ga[i] += g[i];
          gb[i] += g[i];
        }
        break;
      }
      case Op::Sub: {
        double* ga = grad_ptr(nodes_[n.a]);
        double* gb = grad_ptr(nodes_[n.b]);
        for (std::size_t i = 0; i < len; ++i) {
          ga[i] += g[i];
          gb[i] -= g[i];
        }
        break;
      }
      case Op::Mul: {
        const double* av = val_ptr(nodes_[n.a]);
        const double* bv = val_ptr(nodes_[n.b]);
        double* ga = grad_ptr(nodes_[n.a]);
        double* gb = grad_ptr(nodes_[n.b]);
        for (std::size_t i = 0; i < len; ++i) {
          ga[i] += bv[i] * g[i];
          gb[i] += av[i] * g[i];
        }
        break;
      }
      case Op::PrefixSum: {
        double* gx = grad_ptr(nodes_[n.a]);
        double suffix = 0.0;
        for (std::size_t i = len; i-- > 0;) {
          suffix += g[i];
          gx[i] += suffix;
        }
        break;
      }
      case Op::AddScalar: {
        double* gx = grad_ptr(nodes_[n.a]);
        double* gs = grad_ptr(nodes_[n.b]);
        double acc = 0.0;
        for (std::size_t i = 0; i < len; ++i) {
          gx[i] += g[i];
          acc += g[i];
        }
        *gs += acc;
        break;
      }
      case Op::Pick: {
        grad_ptr(nodes_[n.a])[n.index] += g[0];
        break;
      }
      case Op::Sum: {
        const Node& xn = nodes_[n.a];
        double* gx = grad_ptr(xn);
        const std::size_t xlen = xn.rows * xn.cols;
        for (std::size_t i = 0; i < xlen; ++i) gx[i] += g[0];
        break;
      }
      case Op::SumSqFrom: {
        const Node& xn = nodes_[n.a];
        const double* x = val_ptr(xn);
        double* gx = grad_ptr(xn);
        const std::size_t xlen = xn.rows * xn.cols;
        for (std::size_t i = n.index; i < xlen; ++i) gx[i] += 2.0 * x[i] * g[0];
        break;
      }
      case Op::L1: {
        for (std::size_t k = 0; k < n.count; ++k) {
          const Slice& s = l1_slices_[n.index + k];
          double* pg = param_grad_->data() + s.offset;
          const double* pv = params_->data() + s.offset;
          for (std::size_t i = 0; i < s.size(); ++i) {
            if (pv[i] > 0.0)
              pg[i] += g[0];
            else if (pv[i] < 0.0)
              pg[i] -= g[0];
          }
        }
        break;
      }
    }
  }
}

}  // namespace pla::ad
