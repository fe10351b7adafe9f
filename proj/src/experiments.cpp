#include "chaoskit/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "json.hpp"

#include "chaoskit/classical_moments.hpp"
#include "chaoskit/error.hpp"
#include "chaoskit/free_moments.hpp"
#include "chaoskit/parallel.hpp"

namespace chaoskit {

namespace {

using ojson = nlohmann::ordered_json;

ojson number_json(const Number& x) {
  if (x.is_exact()) return x.str();
  return x.approx;
}

std::vector<int> sorted_grid(std::vector<int> grid) {
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.empty()) throw Error(ErrorCode::ShapeMismatch, "empty n grid");
  return grid;
}

void add_meta(ScanReport& r, const std::string& key, const ojson& value) { r.meta.emplace_back(key, value.dump()); }

void add_common_meta(ScanReport& r, Family family, const ScanOptions& opt, const std::vector<int>& grid) {
  add_meta(r, "family", std::string(family_name(family)));
  add_meta(r, "d", opt.d);
  add_meta(r, "n_grid", grid);
  add_meta(r, "seed", opt.seed ? ojson(*opt.seed) : ojson(nullptr));
  add_meta(r, "timestamp", opt.timestamp ? ojson(*opt.timestamp) : ojson(nullptr));
}

Kernel row_kernel(Family f, int n, const ScanOptions& opt) { return chaoskit::family(f, n, opt.d, opt.seed); }

void require_class(const ClassicalDist& law, bool allow_outside) {
  if (!allow_outside && law.outside_theorem_class()) {
    throw Error(ErrorCode::OutsideTheoremClass, "law '" + law.name + "' needs m1 = 0, m2 = 1, m3 = 0 and chi4 >= 0");
  }
}

void require_class(const FreeDist& law, bool allow_outside) {
  if (!allow_outside && law.outside_theorem_class()) {
    throw Error(ErrorCode::OutsideTheoremClass, "law '" + law.name + "' needs kappa1 = 0, kappa2 = 1 and kappa4 >= 0");
  }
}

bool is_semicircular(const FreeDist& law) {
  for (int j = 1; j <= law.max_order(); ++j) {
    if (law.cumulant(j) != Surd(j == 2 ? 1 : 0)) return false;
  }
  return true;
}

Number classical_m4(const Kernel& k, const ClassicalDist& law) { return exact_moment_partition(k, law, 4).value; }

Number sqrt_dfact_pow(int d, int power) {
  return Number(Surd::sqrt(factorial(static_cast<unsigned>(d))).pow(static_cast<unsigned>(power)));
}

// d!^2 phi(Q^4), the fourth moment of the unit-variance free sum.
Number free_m4(const Kernel& k, const FreeDist& law) {
  Number phi = is_semicircular(law) ? semicircular_sum_moment(k, 4).value : free_sum_moment(k, law, 4).value;
  return phi * sqrt_dfact_pow(k.degree(), 4);
}

Number gap(const Number& m4, int target) { return abs(m4 - Number(Rational(target))); }

// Shrinking: strictly smaller at the end than at the start, never growing
// by more than the tolerance in between.
bool shrinking(const std::vector<double>& seq) {
  if (seq.size() < 2) return false;
  for (std::size_t i = 1; i < seq.size(); ++i) {
    if (seq[i] > seq[i - 1] + kVerdictTolerance) return false;
  }
  return seq.back() < seq.front() - kVerdictTolerance;
}

std::vector<double> column_values(const ScanReport& r, const std::string& column) {
  std::vector<double> out;
  for (std::size_t i = 0; i < r.rows.size(); ++i) out.push_back(r.at(i, column).approx);
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t h = v.size() / 2;
  return v.size() % 2 != 0 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

// Runs one job per grid point and stores rows in grid order.
void fill_rows(ScanReport& r, const std::vector<int>& grid, unsigned workers,
               const std::function<ScanRow(int)>& make_row) {
  r.rows.resize(grid.size());
  parallel_for(grid.size(), workers, [&](std::size_t i) { r.rows[i] = make_row(grid[i]); });
}

std::string word_name(const std::string& prefix, const std::vector<int>& word) {
  std::string s = prefix + "[";
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(word[i] + 1);
  }
  return s + "]";
}

}  // namespace

const Verdict& ScanReport::verdict(const std::string& name) const {
  for (const auto& v : verdicts) {
    if (v.name == name) return v;
  }
  throw Error(ErrorCode::ShapeMismatch, "no verdict named '" + name + "'");
}

const Number& ScanReport::at(std::size_t row, const std::string& column) const {
  auto it = std::find(columns.begin(), columns.end(), column);
  if (it == columns.end()) throw Error(ErrorCode::ShapeMismatch, "no column named '" + column + "'");
  return rows.at(row).values.at(static_cast<std::size_t>(it - columns.begin()));
}

std::string ScanReport::to_json() const {
  ojson j;
  j["kind"] = kind;
  ojson meta_j = ojson::object();
  for (const auto& [k, v] : meta) meta_j[k] = ojson::parse(v);
  j["meta"] = meta_j;
  j["columns"] = columns;
  ojson rows_j = ojson::array();
  for (const auto& row : rows) {
    ojson rj;
    rj["n"] = row.n;
    rj["tau"] = number_json(row.tau);
    ojson vals = ojson::object();
    for (std::size_t c = 0; c < columns.size(); ++c) vals[columns[c]] = number_json(row.values[c]);
    rj["values"] = vals;
    rows_j.push_back(rj);
  }
  j["rows"] = rows_j;
  ojson verdicts_j = ojson::array();
  for (const auto& v : verdicts) {
    ojson vj;
    vj["name"] = v.name;
    vj["value"] = v.value;
    vj["rule"] = v.rule;
    vj["threshold"] = v.threshold ? ojson(*v.threshold) : ojson(nullptr);
    verdicts_j.push_back(vj);
  }
  j["verdicts"] = verdicts_j;
  return j.dump(2) + "\n";
}

std::string ScanReport::to_csv() const {
  std::ostringstream os;
  os << "n,tau";
  for (const auto& c : columns) os << ',' << '"' << c << '"';
  os << '\n';
  for (const auto& row : rows) {
    os << row.n << ',' << row.tau.str();
    for (const auto& v : row.values) os << ',' << v.str();
    os << '\n';
  }
  return os.str();
}

ScanReport criterion_scan(Family family, const ClassicalDist& law, const ScanOptions& opt) {
  require_class(law, opt.allow_outside);
  auto grid = sorted_grid(opt.n_grid);
  ScanReport r;
  r.kind = "criterion";
  add_meta(r, "side", "classical");
  add_meta(r, "law", law.name);
  add_common_meta(r, family, opt, grid);
  r.columns = {"m4", "gap"};
  fill_rows(r, grid, opt.workers, [&](int n) {
    Kernel k = row_kernel(family, n, opt);
    Number m4 = classical_m4(k, law);
    return ScanRow{n, influence_profile(k).tau, {m4, gap(m4, 3)}};
  });
  r.verdicts.push_back({"fourth_moment_converges", shrinking(column_values(r, "gap")),
                        "gap = |m4 - 3| non-increasing along the grid and last < first", kVerdictTolerance});
  return r;
}

ScanReport criterion_scan(Family family, const FreeDist& law, const ScanOptions& opt) {
  require_class(law, opt.allow_outside);
  auto grid = sorted_grid(opt.n_grid);
  ScanReport r;
  r.kind = "criterion";
  add_meta(r, "side", "free");
  add_meta(r, "law", law.name);
  add_common_meta(r, family, opt, grid);
  r.columns = {"m4", "gap"};
  fill_rows(r, grid, opt.workers, [&](int n) {
    Kernel k = row_kernel(family, n, opt);
    Number m4 = free_m4(k, law);
    return ScanRow{n, influence_profile(k).tau, {m4, gap(m4, 2)}};
  });
  r.verdicts.push_back({"fourth_moment_converges", shrinking(column_values(r, "gap")),
                        "gap = |d!^2 phi(Q^4) - 2| non-increasing along the grid and last < first", kVerdictTolerance});
  return r;
}

ScanReport invariance_ratio(Family family, const ClassicalDist& law, const ScanOptions& opt) {
  require_class(law, opt.allow_outside);
  auto grid = sorted_grid(opt.n_grid);
  const ClassicalDist gauss = classical_law("gaussian");
  ScanReport r;
  r.kind = "invariance";
  add_meta(r, "side", "classical");
  add_meta(r, "law", law.name);
  add_meta(r, "reference", gauss.name);
  add_common_meta(r, family, opt, grid);
  r.columns = {"m4_x", "m4_gauss", "delta", "ratio"};
  fill_rows(r, grid, opt.workers, [&](int n) {
    Kernel k = row_kernel(family, n, opt);
    Number mx = classical_m4(k, law);
    Number mg = classical_m4(k, gauss);
    Number delta = abs(mx - mg);
    Number tau = influence_profile(k).tau;
    Number root = tau.is_exact() && tau.exact->is_rational() ? Number(Surd::sqrt(*tau.exact->as_rational()))
                                                              : Number::inexact(std::sqrt(tau.approx));
    return ScanRow{n, tau, {mx, mg, delta, divide(delta, root)}};
  });
  auto ratios = column_values(r, "ratio");
  double max_ratio = *std::max_element(ratios.begin(), ratios.end());
  r.verdicts.push_back({"ratio_bounded", max_ratio <= 2.0 * median(ratios) + kVerdictTolerance,
                        "max ratio <= 2 * median ratio over the grid", 2.0});
  return r;
}

ScanReport transfer_scan(Family family, const ClassicalDist& law_x, const FreeDist& law_y, const ScanOptions& opt) {
  require_class(law_x, opt.allow_outside);
  require_class(law_y, opt.allow_outside);
  auto grid = sorted_grid(opt.n_grid);
  ScanReport r;
  r.kind = "transfer";
  add_meta(r, "law", law_x.name);
  add_meta(r, "free_law", law_y.name);
  add_common_meta(r, family, opt, grid);
  r.columns = {"gap_classical", "gap_free"};
  fill_rows(r, grid, opt.workers, [&](int n) {
    Kernel k = row_kernel(family, n, opt);
    return ScanRow{n, influence_profile(k).tau, {gap(classical_m4(k, law_x), 3), gap(free_m4(k, law_y), 2)}};
  });
  bool c = shrinking(column_values(r, "gap_classical"));
  bool f = shrinking(column_values(r, "gap_free"));
  r.verdicts.push_back({"classical_gap_shrinking", c, "gap_classical non-increasing and last < first", kVerdictTolerance});
  r.verdicts.push_back({"free_gap_shrinking", f, "gap_free non-increasing and last < first", kVerdictTolerance});
  r.verdicts.push_back({"transfer_consistent", c == f, "both gaps shrink or neither does", kVerdictTolerance});
  return r;
}

VectorSpec::VectorSpec(std::vector<Kernel> ks) : kernels(std::move(ks)) {
  if (kernels.empty()) throw Error(ErrorCode::ShapeMismatch, "a vector needs at least one kernel");
  if (kernels.size() > 3) throw Error(ErrorCode::TooLarge, "vector experiments take at most 3 kernels");
  for (const auto& k : kernels) {
    if (k.n() != kernels.front().n() || k.degree() != kernels.front().degree()) {
      throw Error(ErrorCode::ShapeMismatch, "vector kernels must share n and d");
    }
  }
  const std::size_t m = kernels.size();
  C.assign(m, std::vector<Number>(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      C[i][j] = covariance(kernels[i], kernels[j]);
      C[j][i] = C[i][j];
    }
    if (std::fabs(C[i][i].approx - 1.0) > 1e-9) throw Error(ErrorCode::NotStandardized, "kernel variance must be 1");
  }
}

VectorSpec vector_family(const std::string& name, int n) {
  RawExactEntries a, b;
  if (name == "disjoint_blocks") {
    if (n < 4 || n % 4 != 0) throw Error(ErrorCode::BadFamilyParams, "disjoint_blocks requires n divisible by 4");
    for (int i = 0; i < n / 2; i += 2) a[{i, i + 1}] = 1;
    for (int i = n / 2; i < n; i += 2) b[{i, i + 1}] = 1;
  } else if (name == "overlap_half") {
    if (n < 6 || n % 6 != 0) throw Error(ErrorCode::BadFamilyParams, "overlap_half requires n divisible by 6");
    const int p = n / 3;  // pairs per kernel, half of them shared
    for (int j = 0; j < p; ++j) a[{2 * j, 2 * j + 1}] = 1;
    for (int j = 0; j < p / 2; ++j) b[{2 * j, 2 * j + 1}] = 1;
    for (int j = 0; j < p / 2; ++j) b[{2 * p + 2 * j, 2 * p + 2 * j + 1}] = 1;
  } else {
    throw Error(ErrorCode::BadFamilyParams, "unknown vector family '" + name + "'");
  }
  return VectorSpec({make_kernel(n, 2, a), make_kernel(n, 2, b)});
}

std::vector<std::string> vector_family_names() { return {"disjoint_blocks", "overlap_half"}; }

namespace {

std::vector<std::vector<int>> joint_words(int m, int order, bool commutative) {
  std::vector<std::vector<int>> out;
  std::vector<int> w;
  std::function<void(int)> rec = [&](int len) {
    if (static_cast<int>(w.size()) == len) {
      out.push_back(w);
      return;
    }
    int start = commutative && !w.empty() ? w.back() : 0;
    for (int c = start; c < m; ++c) {
      w.push_back(c);
      rec(len);
      w.pop_back();
    }
  };
  for (int len = 2; len <= order; ++len) rec(len);
  return out;
}

template <class Law, class Mixed, class Wick>
ScanReport joint_scan(const std::vector<VectorSpec>& specs, const Law& law, const JointOptions& opt, bool free_side,
                      Mixed mixed, Wick wick) {
  if (specs.empty()) throw Error(ErrorCode::ShapeMismatch, "no vectors to scan");
  if (opt.order < 2 || opt.order > 4) throw Error(ErrorCode::TooLarge, "joint scans take total degree 2..4");
  const int m = static_cast<int>(specs.front().size());
  for (const auto& s : specs) {
    if (static_cast<int>(s.size()) != m) throw Error(ErrorCode::ShapeMismatch, "every vector needs the same length");
  }
  auto words = joint_words(m, opt.order, !free_side);
  ScanReport r;
  r.kind = "joint";
  add_meta(r, "side", free_side ? "free" : "classical");
  add_meta(r, "law", law.name);
  add_meta(r, "components", m);
  add_meta(r, "order", opt.order);
  add_meta(r, "eps", opt.eps ? ojson(*opt.eps) : ojson(nullptr));
  add_meta(r, "timestamp", opt.timestamp ? ojson(*opt.timestamp) : ojson(nullptr));
  for (const auto& w : words) r.columns.push_back(word_name("dev", w));
  for (int i = 0; i < m; ++i) r.columns.push_back("m4dev[" + std::to_string(i + 1) + "]");
  r.columns.push_back("joint_max");
  r.columns.push_back("componentwise_max");

  std::vector<std::size_t> order(specs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return specs[a].kernels[0].n() < specs[b].kernels[0].n(); });
  r.rows.resize(specs.size());
  parallel_for(specs.size(), opt.workers, [&](std::size_t row) {
    const VectorSpec& v = specs[order[row]];
    ScanRow out;
    out.n = v.kernels[0].n();
    out.tau = Number(Rational(0));
    bool exact_tau = true;
    double tau_approx = 0.0;
    for (const auto& k : v.kernels) {
      Number t = influence_profile(k).tau;
      if (t.is_exact() && out.tau.is_exact()) {
        if (t.approx > out.tau.approx) out.tau = t;
      } else {
        exact_tau = false;
      }
      tau_approx = std::max(tau_approx, t.approx);
    }
    if (!exact_tau) out.tau = Number::inexact(tau_approx);
    Number joint_max = Number(Rational(0));
    for (const auto& w : words) {
      std::vector<const Kernel*> slots;
      for (int c : w) slots.push_back(&v.kernels[static_cast<std::size_t>(c)]);
      Number dev = abs(mixed(slots) - wick(w, v.C));
      if (dev.approx > joint_max.approx) joint_max = dev;
      out.values.push_back(dev);
    }
    Number comp_max = Number(Rational(0));
    for (int i = 0; i < m; ++i) {
      std::vector<const Kernel*> slots(4, &v.kernels[static_cast<std::size_t>(i)]);
      Number dev = abs(mixed(slots) - Number(Rational(free_side ? 2 : 3)));
      if (dev.approx > comp_max.approx) comp_max = dev;
      out.values.push_back(dev);
    }
    out.values.push_back(joint_max);
    out.values.push_back(comp_max);
    r.rows[row] = std::move(out);
  });

  auto converging = [&](const std::string& col) {
    auto seq = column_values(r, col);
    return seq.back() <= kVerdictTolerance || shrinking(seq);
  };
  bool j = converging("joint_max");
  bool c = converging("componentwise_max");
  r.verdicts.push_back({"joint_converging", j, "joint_max vanishes at the last row or shrinks along the grid",
                        kVerdictTolerance});
  r.verdicts.push_back({"componentwise_converging", c,
                        "componentwise_max vanishes at the last row or shrinks along the grid", kVerdictTolerance});
  r.verdicts.push_back({"joint_componentwise_consistent", j == c, "joint and componentwise deviations behave alike",
                        kVerdictTolerance});
  if (opt.eps) {
    r.verdicts.push_back({"joint_matches_wick", r.rows.back().values[words.size() + static_cast<std::size_t>(m)].approx <= *opt.eps,
                          "joint_max at the last row <= eps", *opt.eps});
  }
  return r;
}

}  // namespace

ScanReport joint_vs_componentwise(const std::vector<VectorSpec>& specs, const ClassicalDist& law,
                                  const JointOptions& opt) {
  return joint_scan(
      specs, law, opt, false,
      [&](const std::vector<const Kernel*>& slots) { return exact_mixed_moment(slots, law).value; },
      [](const std::vector<int>& w, const std::vector<std::vector<Number>>& C) { return gaussian_wick_joint(w, C); });
}

ScanReport joint_vs_componentwise(const std::vector<VectorSpec>& specs, const FreeDist& law, const JointOptions& opt) {
  return joint_scan(
      specs, law, opt, true,
      [&](const std::vector<const Kernel*>& slots) {
        int d = slots.front()->degree();
        return free_mixed_moment(slots, law).value * sqrt_dfact_pow(d, static_cast<int>(slots.size()));
      },
      [](const std::vector<int>& w, const std::vector<std::vector<Number>>& C) {
        return semicircular_wick_joint(w, C);
      });
}

std::vector<TransferCase> transfer_catalog() {
  return {
      {Family::DisjointPairs, "laplace", "freepoisson:1", {4, 8, 16}},
      {Family::Concentrated, "laplace", "tetilla", {4, 8, 16}},
      {Family::DisjointPairs, "gaussian", "semicircular", {4, 8, 16}},
  };
}

std::vector<JointCase> joint_catalog() {
  return {
      {"disjoint_blocks", false, "gaussian", {4, 8, 16}},
      {"disjoint_blocks", true, "semicircular", {4, 8, 16}},
      {"overlap_half", false, "gaussian", {6, 12, 24}},
      {"overlap_half", false, "laplace", {6, 12, 24}},
      {"overlap_half", true, "semicircular", {6, 12, 24}},
  };
}

}  // namespace chaoskit
