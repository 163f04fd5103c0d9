#include "sbl/form_value.hpp"


namespace sbl {

namespace {

struct Tables {
  std::array<std::array<std::vector<Mask>, kMaxIndexDim + 1>, kMaxIndexDim + 1> masks;
  std::array<std::array<int, 64>, kMaxIndexDim + 1> rank{};

  Tables() {
    for (int dim = 0; dim <= kMaxIndexDim; ++dim) {
      // lexicographic order of sorted tuples
      for (int k = 0; k <= dim; ++k) {
        std::vector<int> idx(k);
        for (int i = 0; i < k; ++i) idx[i] = i;
        while (true) {
          Mask m = 0;
          for (int i : idx) m = Mask(m | (1u << i));
          rank[dim][m] = int(masks[dim][k].size());
          masks[dim][k].push_back(m);
          int p = k - 1;
          while (p >= 0 && idx[p] == dim - k + p) --p;
          if (p < 0) break;
          ++idx[p];
          for (int q = p + 1; q < k; ++q) idx[q] = idx[q - 1] + 1;
        }
      }
    }
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

}  // namespace

const std::vector<Mask>& masks_of(int dim, int k) { return tables().masks.at(dim).at(k); }

int mask_rank(int dim, Mask mask) { return tables().rank[dim][mask]; }

int shuffle_sign(Mask a, Mask b) {
  int inversions = 0;
  for (int i = 0; i < kMaxIndexDim; ++i)
    if (a & (1u << i)) inversions += std::popcount(unsigned(b & ((1u << i) - 1)));
  return inversions % 2 ? -1 : 1;
}

int binomial(int n, int k) {
  static constexpr int table[7][7] = {{1, 0, 0, 0, 0, 0, 0},  {1, 1, 0, 0, 0, 0, 0},
                                      {1, 2, 1, 0, 0, 0, 0},  {1, 3, 3, 1, 0, 0, 0},
                                      {1, 4, 6, 4, 1, 0, 0},  {1, 5, 10, 10, 5, 1, 0},
                                      {1, 6, 15, 20, 15, 6, 1}};
  if (n < 0 || n > 6 || k < 0 || k > n) return 0;
  return table[n][k];
}

}  // namespace sbl
