#pragma once

// Independent reference computations shared by the test binaries. Nothing
// here calls into the engines under test.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

/// All set partitions of [k] as restricted growth strings.
inline void for_each_set_partition(int k, const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> a(static_cast<std::size_t>(k), 0);
  std::function<void(int, int)> rec = [&](int p, int maxb) {
    if (p == k) {
      visit(a);
      return;
    }
    for (int b = 0; b <= maxb + 1; ++b) {
      a[static_cast<std::size_t>(p)] = b;
      rec(p + 1, std::max(maxb, b));
    }
  };
  if (k == 0) {
    visit(a);
    return;
  }
  rec(1, 0);
}

/// Non-crossing test on block labels by checking every a < b < c < d.
inline bool labels_noncrossing(const std::vector<int>& lab) {
  const int k = static_cast<int>(lab.size());
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b)
      for (int c = b + 1; c < k; ++c)
        for (int d = c + 1; d < k; ++d)
          if (lab[a] == lab[c] && lab[b] == lab[d] && lab[a] != lab[b]) return false;
  return true;
}

inline bool is_pairing(const std::vector<int>& lab) {
  std::vector<int> sz(lab.size(), 0);
  for (int l : lab) ++sz[static_cast<std::size_t>(l)];
  for (std::size_t i = 0; i < lab.size(); ++i) {
    if (sz[i] != 0 && sz[i] != 2) return false;
  }
  return true;
}

/// All perfect matchings of [k] as partner tables, by naive recursion.
inline void for_each_matching(int k, const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> partner(static_cast<std::size_t>(k), -1);
  std::function<void()> rec = [&]() {
    int a = 0;
    while (a < k && partner[static_cast<std::size_t>(a)] != -1) ++a;
    if (a == k) {
      visit(partner);
      return;
    }
    for (int b = a + 1; b < k; ++b) {
      if (partner[static_cast<std::size_t>(b)] != -1) continue;
      partner[static_cast<std::size_t>(a)] = b;
      partner[static_cast<std::size_t>(b)] = a;
      rec();
      partner[static_cast<std::size_t>(a)] = -1;
      partner[static_cast<std::size_t>(b)] = -1;
    }
  };
  rec();
}

inline int crossings(const std::vector<int>& partner) {
  int c = 0;
  const int k = static_cast<int>(partner.size());
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b) {
      int pa = partner[a], pb = partner[b];
      if (a < pa && b < pb && a < b && b < pa && pa < pb) ++c;
    }
  return c;
}

}  // namespace oracle
