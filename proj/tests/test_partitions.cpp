#include <set>

#include "doctest.h"
#include "oracles.hpp"

#include "chaoskit/error.hpp"
#include "chaoskit/partitions.hpp"
#include "chaoskit/rng.hpp"

using namespace chaoskit;

namespace {

SetPartition parse(int k, std::initializer_list<std::vector<int>> blocks) {
  std::vector<std::vector<int>> b;
  for (auto v : blocks) {
    for (auto& x : v) --x;
    b.push_back(v);
  }
  return SetPartition(k, b);
}

}  // namespace

TEST_CASE("pairing enumeration sizes and order") {
  auto s = enumerate_pairings(4);
  std::vector<std::string> seen;
  while (s.next()) seen.push_back(s.current().to_partition().str());
  CHECK(seen == std::vector<std::string>{"{12|34}", "{13|24}", "{14|23}"});
  CHECK(count_pairings(2) == 1);
  CHECK(count_pairings(8) == 105);
  for (int m = 1; m <= 8; ++m) CHECK(count_pairings(2 * m) == double_factorial(2 * m - 1));
  CHECK_THROWS_WITH_AS(enumerate_pairings(5), doctest::Contains("OddGround"), Error);
  CHECK_THROWS_WITH_AS(enumerate_pairings(22), doctest::Contains("TooLarge"), Error);
}

TEST_CASE("pairing streams are duplicate-free") {
  std::set<std::vector<int>> uniq;
  auto s = enumerate_pairings(10);
  while (s.next()) uniq.insert(s.current().partner);
  CHECK(uniq.size() == 945);
}

TEST_CASE("crossing counts") {
  CHECK(crossing_count(Pairing::from_partition(parse(4, {{1, 2}, {3, 4}}))) == 0);
  CHECK(crossing_count(Pairing::from_partition(parse(4, {{1, 3}, {2, 4}}))) == 1);
  CHECK(crossing_count(Pairing::from_partition(parse(6, {{1, 4}, {2, 5}, {3, 6}}))) == 3);
  int agree = 0;
  oracle::for_each_matching(8, [&](const std::vector<int>& p) {
    Pairing q{p};
    if (crossing_count(q) == oracle::crossings(p)) ++agree;
  });
  CHECK(agree == 105);
}

TEST_CASE("non-crossing pairings match the filtered oracle") {
  CHECK(count_nc_pairings(4) == 2);
  for (int m = 1; m <= 7; ++m) {
    std::set<std::vector<int>> expect;
    oracle::for_each_matching(2 * m, [&](const std::vector<int>& p) {
      if (oracle::crossings(p) == 0) expect.insert(p);
    });
    std::set<std::vector<int>> got;
    auto s = enumerate_nc_pairings(2 * m);
    while (s.next()) {
      CHECK(crossing_count(s.current()) == 0);
      got.insert(s.current().partner);
    }
    CHECK(got == expect);
    CHECK(got.size() == catalan(m));
  }
  CHECK(count_nc_pairings(24) == catalan(12));
}

TEST_CASE("non-crossing partitions match the filtered oracle") {
  CHECK(count_nc_partitions(1) == 1);
  CHECK(count_nc_partitions(3) == 5);
  CHECK(count_nc_partitions(4) == 14);
  for (int k = 1; k <= 8; ++k) {
    std::set<std::vector<int>> expect;
    oracle::for_each_set_partition(k, [&](const std::vector<int>& a) {
      if (oracle::labels_noncrossing(a)) expect.insert(a);
    });
    std::set<std::vector<int>> got;
    for_each_nc_partition(k, [&](std::span<const int> lab) {
      std::vector<int> v(lab.begin(), lab.end());
      CHECK(SetPartition::from_labels(v).is_noncrossing());
      got.insert(SetPartition::from_labels(v).labels());
    });
    CHECK(got == expect);
  }
  for (int k = 1; k <= 10; ++k) CHECK(count_nc_partitions(k) == catalan(k));
  CHECK_THROWS_AS(count_nc_partitions(15), Error);
}

TEST_CASE("index kernel") {
  std::vector<int> w1{1, 2, 1, 2}, w2{5, 5, 5}, w3{1, 2, 3};
  CHECK(index_kernel(w1).str() == "{13|24}");
  CHECK(index_kernel(w2).str() == "{123}");
  CHECK(index_kernel(w3).str() == "{1|2|3}");
}

TEST_CASE("refinement examples") {
  CHECK(refines(parse(3, {{1}, {2}, {3}}), parse(3, {{1, 2, 3}})));
  CHECK(!refines(parse(3, {{1, 2}, {3}}), parse(3, {{1, 3}, {2}})));
  auto p = parse(4, {{1, 4}, {2, 3}});
  CHECK(refines(p, p));
  CHECK_THROWS_AS(refines(p, parse(3, {{1, 2, 3}})), Error);
}

TEST_CASE("refinement is a partial order on random partitions of [8]") {
  RandomStream rng(42);
  std::vector<SetPartition> ps;
  for (int r = 0; r < 40; ++r) {
    int blocks = 1 + static_cast<int>(rng.bits() % 8);
    std::vector<int> lab(8);
    for (auto& l : lab) l = static_cast<int>(rng.bits() % static_cast<std::uint64_t>(blocks));
    ps.push_back(SetPartition::from_labels(lab));
  }
  // coarsenings guarantee some comparable pairs
  for (int r = 0; r < 20; ++r) {
    auto lab = ps[static_cast<std::size_t>(r)].labels();
    for (auto& l : lab) l /= 2;
    ps.push_back(SetPartition::from_labels(lab));
  }
  for (const auto& a : ps) {
    CHECK(refines(a, a));
    for (const auto& b : ps) {
      if (refines(a, b) && refines(b, a)) CHECK(a == b);
      for (const auto& c : ps) {
        if (refines(a, b) && refines(b, c)) CHECK(refines(a, c));
      }
    }
  }
}

TEST_CASE("star pairings") {
  CHECK(count_star_pairings(1, false) == 3);
  CHECK(count_star_pairings(2, false) == 105 - 4 * 15 + 6 * 3 - 4 * 1 + 1);
  CHECK(count_star_pairings(2, true) == 3);
  for (int k = 1; k <= 4; ++k) {
    CHECK(count_star_pairings(k, true) >= 2);
    CHECK(count_star_pairings(k, false) >= 3);
  }
  CHECK_THROWS_AS(count_star_pairings(6, false), Error);
}

TEST_CASE("star pairing counts by closed form agree with enumeration") {
  for (int k = 1; k <= 5; ++k) CHECK(star_pairing_count(k, 4, false) == count_star_pairings(k, false));
  for (int k = 1; k <= 5; ++k) CHECK(star_pairing_count(k, 4, true) == count_star_pairings(k, true));
  // direct enumeration with interval filter for other m
  for (int k = 1; k <= 3; ++k) {
    for (int m = 1; m * k <= 12; ++m) {
      if ((k * m) % 2) continue;
      Integer all = 0, nc = 0;
      oracle::for_each_matching(k * m, [&](const std::vector<int>& p) {
        for (int a = 0; a < k * m; ++a)
          if (a / k == p[static_cast<std::size_t>(a)] / k) return;
        ++all;
        if (oracle::crossings(p) == 0) ++nc;
      });
      CHECK(star_pairing_count(k, m, false) == all);
      CHECK(star_pairing_count(k, m, true) == nc);
    }
  }
  CHECK(star_pairing_count(3, 3, false) == 0);
}

TEST_CASE("labelled non-crossing pairings") {
  std::vector<int> a{1, 1, 1, 1}, b{1, 2, 1, 2}, c{1, 1, 2, 2};
  CHECK(count_labelled_nc_pairings(a) == 2);
  CHECK(count_labelled_nc_pairings(b) == 0);
  CHECK(count_labelled_nc_pairings(c) == 1);
}

TEST_CASE("crossing polynomial") {
  auto p4 = crossing_polynomial(4);
  CHECK(p4 == std::vector<Integer>{2, 1});
  auto p6 = crossing_polynomial(6);
  Integer total = 0;
  for (const auto& c : p6) total += c;
  CHECK(total == 15);
  CHECK(p6[0] == 5);
}
