#include "pla/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>

#include "pla/error.hpp"

namespace pla {

void KernelParams::validate() const {
  if (max_subseq_len < 1)
    raise("InvalidConfig", "kernel max_subseq_len must be >= 1");
  if (!(decay > 0.0 && decay < 1.0))
    raise("InvalidConfig", "kernel decay must lie in (0,1)");
}

int SymbolInterner::intern(const std::string& sym) {
  auto it = ids_.find(sym);
  if (it != ids_.end()) return it->second;
  const int id = static_cast<int>(ids_.size());
  ids_.emplace(sym, id);
  return id;
}

std::vector<int> symbolize(const std::string& text, const KernelParams& params,
                           SymbolInterner* interner) {
  std::vector<int> out;
  if (params.char_level) {
    out.reserve(text.size());
    for (char c : text) out.push_back(static_cast<unsigned char>(c));
    return out;
  }
  if (interner == nullptr)
    raise("InvalidConfig", "field-level symbolization needs a SymbolInterner");
  std::string field;
  auto flush = [&] {
    out.push_back(interner->intern(field));
    field.clear();
  };
  for (char c : text) {
    if (c == params.field_separator)
      flush();
    else
      field.push_back(c);
  }
  if (!text.empty()) flush();
  return out;
}

std::vector<double> subseq_kernel_by_length(std::span<const int> s,
                                            std::span<const int> t,
                                            std::size_t p, double decay) {
  std::vector<double> out(p, 0.0);
  const std::size_t n = s.size(), m = t.size();
  if (n == 0 || m == 0) return out;

  const double lam = decay;
  const double lam2 = lam * lam;

  // kprev(i,j) = K'_{q-1} over prefixes s[0..i), t[0..j); kcur builds K'_q.
  // K'_q(i,j) = lam * K'_q(i-1,j) + K''_q(i,j)
  // K''_q(i,j) = lam * K''_q(i,j-1) + [s_i==t_j] lam^2 K'_{q-1}(i-1,j-1)
  // K_q = sum over matching end pairs (i,j) of lam^2 K'_{q-1}(i-1,j-1).
  Matrix kprev(n + 1, m + 1, 1.0);
  Matrix kcur(n + 1, m + 1, 0.0);
  std::vector<double> kdd(m + 1, 0.0);

  for (std::size_t q = 1; q <= p; ++q) {
    double total = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      const int si = s[i - 1];
      for (std::size_t j = 1; j <= m; ++j) {
        if (si == t[j - 1]) total += lam2 * kprev(i - 1, j - 1);
      }
    }
    out[q - 1] = total;
    if (q == p) break;

    for (std::size_t j = 0; j <= m; ++j) kcur(0, j) = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      const int si = s[i - 1];
      kcur(i, 0) = 0.0;
      kdd[0] = 0.0;
      const double* prev_diag = &kprev(i - 1, 0);
      const double* up = &kcur(i - 1, 0);
      double* cur = &kcur(i, 0);
      for (std::size_t j = 1; j <= m; ++j) {
        double dd = lam * kdd[j - 1];
        if (si == t[j - 1]) dd += lam2 * prev_diag[j - 1];
        kdd[j] = dd;
        cur[j] = lam * up[j] + dd;
      }
    }
    std::swap(kprev.data, kcur.data);
  }
  return out;
}

namespace {

std::vector<double> kernel_values(const std::string& s, const std::string& t,
                                  const KernelParams& params) {
  params.validate();
  SymbolInterner interner;
  SymbolInterner* ip = params.char_level ? nullptr : &interner;
  const auto ss = symbolize(s, params, ip);
  const auto ts = symbolize(t, params, ip);
  return subseq_kernel_by_length(ss, ts, params.max_subseq_len, params.decay);
}

}  // namespace

double subseq_kernel(const std::string& s, const std::string& t,
                     const KernelParams& params) {
  return kernel_values(s, t, params).back();
}

double subseq_kernel_sum(const std::string& s, const std::string& t,
                         const KernelParams& params) {
  const auto vals = kernel_values(s, t, params);
  double sum = 0.0;
  for (double v : vals) sum += v;
  return sum;
}

KernelMatrix kernel_matrix(const Vocabulary& vocab, const KernelParams& params,
                           bool normalize) {
  params.validate();
  const std::size_t v = vocab.size();
  if (v == 0) raise("InvalidConfig", "kernel matrix needs a non-empty vocabulary");

  SymbolInterner interner;
  SymbolInterner* ip = params.char_level ? nullptr : &interner;
  std::vector<std::vector<int>> symbols(v);
  for (std::size_t i = 0; i < v; ++i)
    symbols[i] = symbolize(vocab.token(i).text, params, ip);

  KernelMatrix km;
  km.values = Matrix(v, v, 0.0);
  Matrix& K = km.values;

  // upper-triangle rows are interleaved across workers to balance the load
  auto fill_rows = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < v; i += stride) {
      for (std::size_t j = i; j < v; ++j) {
        const auto vals = subseq_kernel_by_length(
            symbols[i], symbols[j], params.max_subseq_len, params.decay);
        double sum = 0.0;
        for (double x : vals) sum += x;
        K(i, j) = sum;
      }
    }
  };

  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, v));
  if (workers <= 1 || v < 16) {
    fill_rows(0, 1);
  } else {
    std::vector<std::future<void>> futs;
    for (unsigned w = 0; w < workers; ++w)
      futs.push_back(std::async(std::launch::async, fill_rows, w, workers));
    for (auto& f : futs) f.get();
  }

  // mirror the upper triangle so symmetry holds exactly
  for (std::size_t i = 0; i < v; ++i)
    for (std::size_t j = i + 1; j < v; ++j) K(j, i) = K(i, j);

  if (normalize) {
    std::vector<double> diag(v);
    for (std::size_t i = 0; i < v; ++i) {
      diag[i] = K(i, i);
      if (diag[i] <= 0.0)
        raise("DegenerateToken", "token '" + vocab.token(i).text +
                                     "' has zero self-similarity");
      diag[i] = std::sqrt(diag[i]);
    }
    for (std::size_t i = 0; i < v; ++i)
      for (std::size_t j = 0; j < v; ++j) K(i, j) /= diag[i] * diag[j];
    // recenter the diagonal on exactly 1 and re-mirror to kill rounding skew
    for (std::size_t i = 0; i < v; ++i) {
      K(i, i) = 1.0;
      for (std::size_t j = i + 1; j < v; ++j) K(j, i) = K(i, j);
    }
    km.normalized = true;
  }
  return km;
}

}  // namespace pla
