#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "pla/matrix.hpp"
#include "pla/tokenize.hpp"

namespace pla {

// Gap-weighted subsequence kernel parameters. The kernel can run over the
// characters of the token text (default) or over whole attribute fields,
// obtained by splitting the token on `field_separator`; field level is much
// cheaper for long tokens.
struct KernelParams {
  std::size_t max_subseq_len = 3;  // p
  double decay = 0.5;              // gap decay in (0,1)
  bool char_level = true;
  char field_separator = '|';

  void validate() const;
};

// token -> symbol id sequence; `interner` keeps field symbols consistent
// across tokens (required when char_level is false).
class SymbolInterner {
 public:
  int intern(const std::string& sym);

 private:
  std::unordered_map<std::string, int> ids_;
};

std::vector<int> symbolize(const std::string& text, const KernelParams& params,
                           SymbolInterner* interner = nullptr);

// K_q(s,t) for q = 1..p in one dynamic-programming pass: each K_q sums
// lambda^(span(u in s) + span(u in t)) over all common subsequences u of
// length exactly q, where span is the number of positions between the first
// and last matched index, inclusive. O(p * |s| * |t|).
std::vector<double> subseq_kernel_by_length(std::span<const int> s,
                                            std::span<const int> t,
                                            std::size_t p, double decay);

// Fixed-length variant: K_p alone. Empty input on either side yields 0.
double subseq_kernel(const std::string& s, const std::string& t,
                     const KernelParams& params);

// Blended variant used for the token kernel matrix: sum of K_q over q = 1..p.
double subseq_kernel_sum(const std::string& s, const std::string& t,
                         const KernelParams& params);

struct KernelMatrix {
  Matrix values;  // symmetric V_d x V_d
  bool normalized = false;
};

// Pairwise token similarities. Each unordered pair is computed once; with
// `normalize` the matrix is rescaled to unit diagonal
// (K[i,j] / sqrt(K[i,i] K[j,j])), which throws Error("DegenerateToken") if a
// self-similarity is zero. Upper-triangle fill is data-parallel; the result
// does not depend on the schedule.
KernelMatrix kernel_matrix(const Vocabulary& vocab, const KernelParams& params,
                           bool normalize);

}  // namespace pla
